#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rlcu/pauli.hpp"

namespace rlcu {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxDenseQubits = 12;

CMatrix dense_matrix(const PauliString& p);
CMatrix dense_matrix(const Hamiltonian& H);

struct EigenSystem {
    int n = 0;
    Eigen::VectorXd energies;  // ascending
    CMatrix vectors;           // columns

    double gap(int j) const;
    // |<u_j|psi>|^2
    double overlap(const CVector& psi, int j = 0) const;
};

EigenSystem diagonalize(const Hamiltonian& H);

// g(tau(H - omega)) psi with g(h) = exp(-h^2)
CVector apply_filter_exact(const EigenSystem& es, const CVector& psi, double tau, double omega);

struct NDValue {
    double N = 0.0;
    double D = 0.0;
    double ratio() const { return N / D; }
};

NDValue exact_N_and_D(const EigenSystem& es, const CVector& psi, const CMatrix& O, double tau, double omega);
NDValue exact_N_and_D(const EigenSystem& es, const CVector& psi, const Hamiltonian& O, double tau, double omega);

std::vector<double> exact_D_curve(const EigenSystem& es, const CVector& psi, double tau,
                                  const std::vector<double>& omega_grid);

// lo, lo+h, ... up to hi inclusive (within 1e-9 h)
std::vector<double> uniform_grid(double lo, double hi, double h);
// first index of the maximum
std::size_t argmax_lowest(const std::vector<double>& v);

// Computational basis state with the largest overlap with u_j.
CVector default_initial_state(const EigenSystem& es, int j = 0);
// One "re im" pair per line, 2^n lines, normalized on load.
CVector load_state(const std::string& path, int n);

}  // namespace rlcu
