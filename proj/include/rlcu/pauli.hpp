#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rlcu {

inline constexpr int kMaxQubits = 128;

// Two-word qubit bitmask, bit q = qubit q.
struct QubitMask {
    std::array<std::uint64_t, 2> w{0, 0};

    bool test(int q) const { return (w[q >> 6] >> (q & 63)) & 1u; }
    void set(int q) { w[q >> 6] |= std::uint64_t{1} << (q & 63); }
    void flip(int q) { w[q >> 6] ^= std::uint64_t{1} << (q & 63); }
    int count() const;
    bool none() const { return (w[0] | w[1]) == 0; }
    std::uint64_t low() const { return w[0]; }

    friend QubitMask operator^(QubitMask a, const QubitMask& b) { a.w[0] ^= b.w[0]; a.w[1] ^= b.w[1]; return a; }
    friend QubitMask operator&(QubitMask a, const QubitMask& b) { a.w[0] &= b.w[0]; a.w[1] &= b.w[1]; return a; }
    friend QubitMask operator|(QubitMask a, const QubitMask& b) { a.w[0] |= b.w[0]; a.w[1] |= b.w[1]; return a; }
    auto operator<=>(const QubitMask&) const = default;
};

// Hermitian Pauli string. Per-qubit factor from (x,z): I=(0,0) X=(1,0) Z=(0,1) Y=(1,1).
struct PauliString {
    int n = 0;
    QubitMask x, z;

    static PauliString identity(int n);
    static PauliString single(int n, int q, char p);
    static PauliString from_label(std::string_view label);

    int weight() const { return (x | z).count(); }
    bool is_identity() const { return (x | z).none(); }
    char at(int q) const;
    std::string label() const;

    auto operator<=>(const PauliString&) const = default;
};

struct PauliStringHash {
    std::size_t operator()(const PauliString& p) const noexcept;
};

// a*b = i^phase * result
struct PhasedPauli {
    int phase = 0;
    PauliString string;
};

PhasedPauli multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

struct PauliTerm {
    double coeff = 0.0;
    PauliString string;
};

struct HamiltonianStats {
    int L = 0;
    double lambda = 0.0;
    double Lambda = 0.0;
    int wt = 0;
    int wt_m = 0;
    int n_L = 0;
};

HamiltonianStats hamiltonian_stats(const std::vector<PauliTerm>& terms);

// Weighted Pauli sum. Zero terms are dropped and repeated strings merged,
// keeping the position of the first occurrence.
class Hamiltonian {
public:
    Hamiltonian() = default;
    Hamiltonian(int n, std::vector<PauliTerm> terms);

    int n() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    const HamiltonianStats& stats() const { return stats_; }
    double one_norm() const { return stats_.lambda; }
    bool empty() const { return terms_.empty(); }

private:
    int n_ = 0;
    std::vector<PauliTerm> terms_;
    HamiltonianStats stats_;
};

struct ModelParams {
    // tfim / two_local
    double J = 1.0;
    double h = 1.0;
    // heisenberg_xxz
    double Jx = 1.0;
    double Jy = 1.0;
    double Jz = 2.0;
    double hx = 0.0;
    double c = 2.0;
    bool periodic = true;
};

Hamiltonian build_model(std::string_view name, int n, const ModelParams& params = {});

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

Hamiltonian parse_hamiltonian(std::istream& in);
Hamiltonian load_hamiltonian(const std::string& path);

// Unitary terms that commute with the total Z operator.
struct SymmetryTerm {
    enum class Kind { Swap, ZString, Identity };
    Kind kind = Kind::Identity;
    int i = 0, j = 0;  // Swap sites
    QubitMask support;  // ZString sites
    double coeff = 0.0;
};

std::string to_string(const SymmetryTerm& t);

std::vector<SymmetryTerm> to_symmetry_basis(const Hamiltonian& H);

}  // namespace rlcu
