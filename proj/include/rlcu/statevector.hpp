#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "rlcu/basis_op.hpp"
#include "rlcu/pauli.hpp"

namespace rlcu {

struct StateVector {
    int n = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(int n_qubits, std::uint64_t basis_index = 0);
    StateVector(int n_qubits, std::vector<cplx> a);

    std::size_t dim() const { return amps.size(); }
    double norm() const;
};

cplx inner(const StateVector& a, const StateVector& b);  // <a|b>

// psi <- scale * op psi
void apply_op(StateVector& psi, const BasisOp& op, cplx scale = 1.0);
// psi <- exp(i phi h op) psi, where h*op is a Hermitian involution
void apply_rotation(StateVector& psi, const BasisOp& op, cplx h, double phi);

void apply_pauli(StateVector& psi, const PauliString& p);
// exp(-i theta P)
void apply_exp_pauli(StateVector& psi, const PauliString& p, double theta);

void apply_swap(StateVector& psi, int i, int j);
void apply_zstring(StateVector& psi, std::uint64_t mask);
void apply_symmetry_term(StateVector& psi, const SymmetryTerm& t);
// exp(-i theta T)
void apply_exp_symmetry_term(StateVector& psi, const SymmetryTerm& t, double theta);

// Application-order list of (term index, time fraction) for S_{2k}(m).
// k = 0 gives an empty list.
using TrotterSchedule = std::vector<std::pair<int, double>>;
TrotterSchedule trotter_schedule(int num_terms, int k);

class TrotterCircuit {
public:
    TrotterCircuit() = default;
    TrotterCircuit(int n, std::vector<TrotterTerm> terms, int k);
    TrotterCircuit(const Hamiltonian& H, int k, Basis basis = Basis::pauli);

    int n() const { return n_; }
    int k() const { return k_; }
    const std::vector<TrotterTerm>& terms() const { return terms_; }
    const TrotterSchedule& schedule() const { return schedule_; }
    // psi <- S_{2k}(m) psi
    void apply(StateVector& psi, double m) const;

private:
    int n_ = 0;
    int k_ = 0;
    std::vector<TrotterTerm> terms_;
    TrotterSchedule schedule_;
};

void trotter_step(StateVector& psi, const Hamiltonian& H, double m, int k);

// One sampled compensation unitary W.
struct Compensation {
    enum class Kind { identity, op, rotation };
    Kind kind = Kind::identity;
    BasisOp op;
    cplx h{1.0, 0.0};
    double phi = 0.0;  // rotation exp(i phi h op)

    void apply(StateVector& psi) const;
    std::string str(int n) const;
};

struct CircuitInstance {
    double t = 0.0;
    double m = 0.0;  // segment duration t / nu
    int nu = 0;
    std::vector<Compensation> segments;  // size nu
    cplx weight{1.0, 0.0};
    double mu_total = 1.0;

    std::string trace(int n) const;
};

// prod_q W_q S(m) psi0
StateVector run_instance(const StateVector& psi0, const CircuitInstance& inst, const TrotterCircuit& trotter);
void run_instance_inplace(StateVector& psi, const CircuitInstance& inst, const TrotterCircuit& trotter);

// <phi|O|psi> for a real Pauli sum O
cplx overlap(const StateVector& phi, const Hamiltonian& O, const StateVector& psi);
cplx overlap(const StateVector& phi, const PauliString& P, const StateVector& psi);

std::vector<double> hamming_weight_distribution(const StateVector& psi);
double total_z_expectation(const StateVector& psi);

}  // namespace rlcu
