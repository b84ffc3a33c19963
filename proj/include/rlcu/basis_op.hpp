#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "rlcu/pauli.hpp"

namespace rlcu {

using cplx = std::complex<double>;

enum class Basis { pauli, symmetry };

Basis parse_basis(const std::string& s);
std::string to_string(Basis b);

inline constexpr int kMaxSimQubits = 16;
inline constexpr std::uint64_t kIdentityPerm = 0xFEDCBA9876543210ull;

// Monomial unitary Z^z X^x P_perm on at most 16 qubits.
// P_perm moves bit q of a basis index to position perm[q].
// Closed under products; covers Pauli strings (perm = id) and
// SWAP/Z-string words (x = 0).
struct BasisOp {
    std::uint64_t z = 0;
    std::uint64_t x = 0;
    std::uint64_t perm = kIdentityPerm;

    static BasisOp swap(int i, int j);
    static BasisOp zstring(std::uint64_t mask) { return BasisOp{mask, 0, kIdentityPerm}; }
    // Hermitian Pauli P = herm_phase * op
    static BasisOp from_pauli(const PauliString& p, cplx* herm_phase);

    int target(int q) const { return static_cast<int>((perm >> (4 * q)) & 15u); }
    bool perm_identity() const { return perm == kIdentityPerm; }
    bool is_identity() const { return z == 0 && x == 0 && perm_identity(); }
    std::uint64_t permute(std::uint64_t b, int n) const;
    std::string str(int n) const;

    auto operator<=>(const BasisOp&) const = default;
};

struct BasisOpHash {
    std::size_t operator()(const BasisOp& o) const noexcept;
};

struct SignedOp {
    int sign = 1;
    BasisOp op;
};

SignedOp multiply(const BasisOp& a, const BasisOp& b);
SignedOp adjoint(const BasisOp& a);

// Hermitian involution h*op for one Hamiltonian term.
struct TrotterTerm {
    double coeff = 0.0;
    BasisOp op;
    cplx h{1.0, 0.0};
};

std::vector<TrotterTerm> trotter_terms(const Hamiltonian& H, Basis basis);
// Coefficient of the identity dropped by trotter_terms: H = offset * I + sum of terms.
double identity_offset(const Hamiltonian& H, Basis basis);

}  // namespace rlcu
