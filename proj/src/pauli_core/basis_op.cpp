#include "rlcu/basis_op.hpp"

#include <bit>
#include <stdexcept>

namespace rlcu {

Basis parse_basis(const std::string& s) {
    if (s == "pauli") return Basis::pauli;
    if (s == "symmetry") return Basis::symmetry;
    throw std::invalid_argument("unknown basis '" + s + "'");
}

std::string to_string(Basis b) { return b == Basis::pauli ? "pauli" : "symmetry"; }

BasisOp BasisOp::swap(int i, int j) {
    if (i < 0 || j < 0 || i >= kMaxSimQubits || j >= kMaxSimQubits || i == j)
        throw std::invalid_argument("malformed SWAP support");
    BasisOp o;
    std::uint64_t mi = std::uint64_t{15} << (4 * i), mj = std::uint64_t{15} << (4 * j);
    o.perm = (o.perm & ~(mi | mj)) | (std::uint64_t(j) << (4 * i)) | (std::uint64_t(i) << (4 * j));
    return o;
}

BasisOp BasisOp::from_pauli(const PauliString& p, cplx* herm_phase) {
    if (p.n > kMaxSimQubits) throw std::invalid_argument("Pauli string too wide for simulation");
    BasisOp o{p.z.low(), p.x.low(), kIdentityPerm};
    // Y = -i Z X
    static const cplx pw[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    if (herm_phase) *herm_phase = pw[std::popcount(o.x & o.z) & 3];
    return o;
}

std::uint64_t BasisOp::permute(std::uint64_t b, int n) const {
    if (perm_identity()) return b;
    std::uint64_t r = 0;
    for (int q = 0; q < n; ++q) r |= ((b >> q) & 1u) << target(q);
    return r;
}

static std::uint64_t compose(std::uint64_t pi, std::uint64_t sigma) {
    // (pi o sigma)[q] = pi[sigma[q]]
    std::uint64_t r = 0;
    for (int q = 0; q < 16; ++q) {
        std::uint64_t s = (sigma >> (4 * q)) & 15u;
        r |= ((pi >> (4 * s)) & 15u) << (4 * q);
    }
    return r;
}

static std::uint64_t inverse(std::uint64_t pi) {
    std::uint64_t r = 0;
    for (int q = 0; q < 16; ++q) {
        std::uint64_t t = (pi >> (4 * q)) & 15u;
        r |= std::uint64_t(q) << (4 * t);
    }
    return r;
}

static std::uint64_t apply_perm(std::uint64_t pi, std::uint64_t b) {
    if (pi == kIdentityPerm) return b;
    std::uint64_t r = 0;
    while (b) {
        int q = std::countr_zero(b);
        b &= b - 1;
        r |= std::uint64_t{1} << ((pi >> (4 * q)) & 15u);
    }
    return r;
}

std::string BasisOp::str(int n) const {
    std::string s;
    auto bits = [&](char c, std::uint64_t m) {
        if (!m) return;
        s += c;
        s += '(';
        bool first = true;
        for (int q = 0; q < n; ++q)
            if ((m >> q) & 1u) {
                if (!first) s += ',';
                s += std::to_string(q);
                first = false;
            }
        s += ')';
    };
    bits('Z', z);
    bits('X', x);
    if (!perm_identity()) {
        int moved = 0, a = -1, b = -1;
        for (int q = 0; q < n; ++q)
            if (target(q) != q) {
                (moved == 0 ? a : b) = q;
                ++moved;
            }
        if (moved == 2 && target(a) == b) {
            s += "SWAP(" + std::to_string(a) + "," + std::to_string(b) + ")";
        } else {
            s += "P[";
            for (int q = 0; q < n; ++q) s += (q ? "," : "") + std::to_string(target(q));
            s += "]";
        }
    }
    return s.empty() ? "I" : s;
}

std::size_t BasisOpHash::operator()(const BasisOp& o) const noexcept {
    std::uint64_t h = o.z * 0x9e3779b97f4a7c15ull;
    h ^= o.x + 0xbf58476d1ce4e5b9ull + (h << 6) + (h >> 2);
    h ^= o.perm + 0x94d049bb133111ebull + (h << 6) + (h >> 2);
    return h;
}

// (Z^a X^b P)(Z^c X^d S) = (-1)^{|b & P(c)|} Z^{a^P(c)} X^{b^P(d)} (P o S)
SignedOp multiply(const BasisOp& a, const BasisOp& b) {
    std::uint64_t pc = apply_perm(a.perm, b.z);
    std::uint64_t pd = apply_perm(a.perm, b.x);
    SignedOp r;
    r.sign = (std::popcount(a.x & pc) & 1) ? -1 : 1;
    r.op.z = a.z ^ pc;
    r.op.x = a.x ^ pd;
    r.op.perm = a.perm == kIdentityPerm ? b.perm : (b.perm == kIdentityPerm ? a.perm : compose(a.perm, b.perm));
    return r;
}

// (Z^a X^b P)^dag = (-1)^{|a&b|} Z^{P^-1 a} X^{P^-1 b} P^-1
SignedOp adjoint(const BasisOp& a) {
    SignedOp r;
    r.sign = (std::popcount(a.z & a.x) & 1) ? -1 : 1;
    std::uint64_t inv = a.perm_identity() ? kIdentityPerm : inverse(a.perm);
    r.op.z = apply_perm(inv, a.z);
    r.op.x = apply_perm(inv, a.x);
    r.op.perm = inv;
    return r;
}

std::vector<TrotterTerm> trotter_terms(const Hamiltonian& H, Basis basis) {
    if (H.n() > kMaxSimQubits) throw std::invalid_argument("too many qubits for simulation");
    std::vector<TrotterTerm> out;
    if (basis == Basis::pauli) {
        for (const auto& t : H.terms()) {
            if (t.string.is_identity()) continue;
            TrotterTerm tt;
            tt.coeff = t.coeff;
            tt.op = BasisOp::from_pauli(t.string, &tt.h);
            out.push_back(tt);
        }
    } else {
        for (const auto& s : to_symmetry_basis(H)) {
            TrotterTerm tt;
            tt.coeff = s.coeff;
            if (s.kind == SymmetryTerm::Kind::Swap)
                tt.op = BasisOp::swap(s.i, s.j);
            else if (s.kind == SymmetryTerm::Kind::ZString)
                tt.op = BasisOp::zstring(s.support.low());
            else
                continue;
            out.push_back(tt);
        }
    }
    if (out.empty()) throw std::invalid_argument("Hamiltonian has no non-identity terms");
    return out;
}

double identity_offset(const Hamiltonian& H, Basis basis) {
    double c = 0;
    if (basis == Basis::pauli) {
        for (const auto& t : H.terms())
            if (t.string.is_identity()) c += t.coeff;
    } else {
        for (const auto& s : to_symmetry_basis(H))
            if (s.kind == SymmetryTerm::Kind::Identity) c += s.coeff;
    }
    return c;
}

}  // namespace rlcu
