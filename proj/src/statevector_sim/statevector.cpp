#include "rlcu/statevector.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace rlcu {

StateVector::StateVector(int n_qubits, std::uint64_t basis_index) : n(n_qubits) {
    if (n < 1 || n > kMaxSimQubits) throw std::invalid_argument("state qubit count out of range");
    amps.assign(std::size_t{1} << n, cplx(0.0, 0.0));
    if (basis_index >= amps.size()) throw std::invalid_argument("basis index out of range");
    amps[basis_index] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<cplx> a) : n(n_qubits), amps(std::move(a)) {
    if (n < 1 || n > kMaxSimQubits || amps.size() != (std::size_t{1} << n))
        throw std::invalid_argument("amplitude count does not match qubit count");
}

double StateVector::norm() const {
    double s = 0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

cplx inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

namespace {

inline double zsign(std::uint64_t z, std::uint64_t c) { return (std::popcount(z & c) & 1) ? -1.0 : 1.0; }

// Index map b -> x ^ perm(b), with a fast path for a single transposition.
struct IndexMap {
    std::uint64_t x;
    const BasisOp* op;
    int n;
    int si = -1, sj = -1;  // transposition
    bool identity;

    IndexMap(const BasisOp& o, int n_) : x(o.x), op(&o), n(n_), identity(o.perm_identity()) {
        if (identity) return;
        int moved[3], cnt = 0;
        for (int q = 0; q < n && cnt < 3; ++q)
            if (o.target(q) != q) moved[cnt++] = q;
        if (cnt == 2 && o.target(moved[0]) == moved[1]) {
            si = moved[0];
            sj = moved[1];
        }
    }
    std::uint64_t operator()(std::uint64_t b) const {
        if (identity) return b ^ x;
        if (si >= 0) {
            std::uint64_t d = ((b >> si) ^ (b >> sj)) & 1u;
            return (b ^ ((d << si) | (d << sj))) ^ x;
        }
        return op->permute(b, n) ^ x;
    }
};

}  // namespace

void apply_op(StateVector& psi, const BasisOp& op, cplx scale) {
    const std::size_t d = psi.dim();
    if (op.x >> psi.n || op.z >> psi.n) throw std::invalid_argument("operator wider than state");
    if (op.perm_identity() && op.x == 0) {
        for (std::size_t b = 0; b < d; ++b) psi.amps[b] *= scale * zsign(op.z, b);
        return;
    }
    IndexMap map(op, psi.n);
    thread_local std::vector<cplx> scratch;
    scratch.resize(d);
    for (std::size_t b = 0; b < d; ++b) {
        std::uint64_t c = map(b);
        scratch[c] = scale * zsign(op.z, c) * psi.amps[b];
    }
    psi.amps.swap(scratch);
}

void apply_rotation(StateVector& psi, const BasisOp& op, cplx h, double phi) {
    const std::size_t d = psi.dim();
    if (op.x >> psi.n || op.z >> psi.n) throw std::invalid_argument("operator wider than state");
    const double cs = std::cos(phi), sn = std::sin(phi);
    const cplx ish = cplx(0.0, sn) * h;
    if (op.perm_identity() && op.x == 0) {
        const cplx plus = cs + ish, minus = cs - ish;
        for (std::size_t b = 0; b < d; ++b) psi.amps[b] *= (std::popcount(op.z & b) & 1) ? minus : plus;
        return;
    }
    IndexMap map(op, psi.n);
    for (std::size_t b = 0; b < d; ++b) {
        std::uint64_t c = map(b);
        if (c < b) continue;
        if (c == b) {
            psi.amps[b] *= cs + ish * zsign(op.z, b);
            continue;
        }
        cplx ab = psi.amps[b], ac = psi.amps[c];
        psi.amps[b] = cs * ab + ish * zsign(op.z, b) * ac;
        psi.amps[c] = cs * ac + ish * zsign(op.z, c) * ab;
    }
}

void apply_pauli(StateVector& psi, const PauliString& p) {
    if (p.n != psi.n) throw std::invalid_argument("Pauli string dimension mismatch");
    cplx h;
    BasisOp o = BasisOp::from_pauli(p, &h);
    apply_op(psi, o, h);
}

void apply_exp_pauli(StateVector& psi, const PauliString& p, double theta) {
    if (p.n != psi.n) throw std::invalid_argument("Pauli string dimension mismatch");
    cplx h;
    BasisOp o = BasisOp::from_pauli(p, &h);
    apply_rotation(psi, o, h, -theta);
}

void apply_swap(StateVector& psi, int i, int j) {
    if (i >= psi.n || j >= psi.n) throw std::invalid_argument("malformed SWAP support");
    apply_op(psi, BasisOp::swap(i, j));
}

void apply_zstring(StateVector& psi, std::uint64_t mask) {
    if (mask >> psi.n) throw std::invalid_argument("malformed Z-string support");
    apply_op(psi, BasisOp::zstring(mask));
}

static BasisOp symmetry_op(const SymmetryTerm& t, int n) {
    switch (t.kind) {
        case SymmetryTerm::Kind::Swap:
            if (t.i >= n || t.j >= n) throw std::invalid_argument("malformed SWAP support");
            return BasisOp::swap(t.i, t.j);
        case SymmetryTerm::Kind::ZString:
            if (t.support.w[1] || (t.support.low() >> n)) throw std::invalid_argument("malformed Z-string support");
            return BasisOp::zstring(t.support.low());
        default:
            return BasisOp{};
    }
}

void apply_symmetry_term(StateVector& psi, const SymmetryTerm& t) { apply_op(psi, symmetry_op(t, psi.n)); }

void apply_exp_symmetry_term(StateVector& psi, const SymmetryTerm& t, double theta) {
    apply_rotation(psi, symmetry_op(t, psi.n), 1.0, -theta);
}

static void append_scaled(TrotterSchedule& out, const TrotterSchedule& s, double f) {
    for (auto [idx, frac] : s) {
        if (!out.empty() && out.back().first == idx)
            out.back().second += f * frac;
        else
            out.emplace_back(idx, f * frac);
    }
}

TrotterSchedule trotter_schedule(int num_terms, int k) {
    if (k < 0 || k > 2) throw std::invalid_argument("Trotter half-order k must be 0, 1 or 2");
    if (num_terms < 1) throw std::invalid_argument("empty term list");
    TrotterSchedule s;
    if (k == 0) return s;
    // S_2: reverse half sweep, then forward half sweep
    for (int l = num_terms - 1; l >= 0; --l) s.emplace_back(l, 0.5);
    for (int l = 0; l < num_terms; ++l) append_scaled(s, {{l, 0.5}}, 1.0);
    for (int j = 2; j <= k; ++j) {
        const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / (2 * j - 1)));
        TrotterSchedule next;
        for (double f : {p, p, 1 - 4 * p, p, p}) append_scaled(next, s, f);
        s = std::move(next);
    }
    return s;
}

TrotterCircuit::TrotterCircuit(int n, std::vector<TrotterTerm> terms, int k)
    : n_(n), k_(k), terms_(std::move(terms)), schedule_(trotter_schedule(static_cast<int>(terms_.size()), k)) {}

TrotterCircuit::TrotterCircuit(const Hamiltonian& H, int k, Basis basis)
    : TrotterCircuit(H.n(), trotter_terms(H, basis), k) {}

void TrotterCircuit::apply(StateVector& psi, double m) const {
    if (psi.n != n_) throw std::invalid_argument("state dimension mismatch");
    for (auto [idx, frac] : schedule_) {
        const auto& t = terms_[idx];
        apply_rotation(psi, t.op, t.h, -t.coeff * frac * m);
    }
}

void trotter_step(StateVector& psi, const Hamiltonian& H, double m, int k) {
    TrotterCircuit(H, k).apply(psi, m);
}

void Compensation::apply(StateVector& psi) const {
    switch (kind) {
        case Kind::identity: break;
        case Kind::op: apply_op(psi, op); break;
        case Kind::rotation: apply_rotation(psi, op, h, phi); break;
    }
}

std::string Compensation::str(int n) const {
    switch (kind) {
        case Kind::identity: return "I";
        case Kind::op: return op.str(n);
        default: {
            // exp(i phi h op) written with the Hermitian generator h*op
            std::string g = op.str(n);
            if (h == cplx(0, 1)) g = "i*" + g;
            else if (h == cplx(0, -1)) g = "-i*" + g;
            else if (h == cplx(-1, 0)) g = "-" + g;
            return fmt::format("exp(i*{:.10g}*{})", phi, g);
        }
    }
}

std::string CircuitInstance::trace(int n) const {
    std::ostringstream os;
    os << fmt::format("instance t={:.10g} nu={} weight=({:.10g},{:.10g}) mu={:.10g}\n", t, nu, weight.real(),
                      weight.imag(), mu_total);
    for (std::size_t q = 0; q < segments.size(); ++q) {
        os << fmt::format("seg q={} S m={:.10g}\n", q + 1, m);
        os << fmt::format("seg q={} W {}\n", q + 1, segments[q].str(n));
    }
    return os.str();
}

void run_instance_inplace(StateVector& psi, const CircuitInstance& inst, const TrotterCircuit& trotter) {
    if (static_cast<int>(inst.segments.size()) != inst.nu) throw std::invalid_argument("segment count mismatch");
    for (const auto& w : inst.segments) {
        trotter.apply(psi, inst.m);
        w.apply(psi);
    }
}

StateVector run_instance(const StateVector& psi0, const CircuitInstance& inst, const TrotterCircuit& trotter) {
    StateVector psi = psi0;
    run_instance_inplace(psi, inst, trotter);
    return psi;
}

cplx overlap(const StateVector& phi, const PauliString& P, const StateVector& psi) {
    if (phi.dim() != psi.dim() || P.n != psi.n) throw std::invalid_argument("dimension mismatch");
    cplx h;
    BasisOp o = BasisOp::from_pauli(P, &h);
    cplx s = 0;
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        std::uint64_t c = b ^ o.x;
        s += std::conj(phi.amps[c]) * (zsign(o.z, c) * psi.amps[b]);
    }
    return h * s;
}

cplx overlap(const StateVector& phi, const Hamiltonian& O, const StateVector& psi) {
    cplx s = 0;
    for (const auto& t : O.terms()) s += t.coeff * overlap(phi, t.string, psi);
    return s;
}

std::vector<double> hamming_weight_distribution(const StateVector& psi) {
    std::vector<double> w(psi.n + 1, 0.0);
    for (std::size_t b = 0; b < psi.dim(); ++b) w[std::popcount(b)] += std::norm(psi.amps[b]);
    return w;
}

double total_z_expectation(const StateVector& psi) {
    double s = 0;
    for (std::size_t b = 0; b < psi.dim(); ++b) s += std::norm(psi.amps[b]) * (psi.n - 2 * std::popcount(b));
    return s;
}

}  // namespace rlcu
