#include "rlcu/exact.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rlcu/basis_op.hpp"

namespace rlcu {

static void check_dense(int n) {
    if (n > kMaxDenseQubits) throw std::invalid_argument("dense oracle limited to 12 qubits");
}

static void add_term(CMatrix& m, const PauliString& p, double coeff) {
    cplx h;
    BasisOp o = BasisOp::from_pauli(p, &h);
    const std::uint64_t d = std::uint64_t{1} << p.n;
    for (std::uint64_t b = 0; b < d; ++b) {
        std::uint64_t c = b ^ o.x;
        double s = (std::popcount(o.z & c) & 1) ? -1.0 : 1.0;
        m(c, b) += coeff * s * h;
    }
}

CMatrix dense_matrix(const PauliString& p) {
    check_dense(p.n);
    CMatrix m = CMatrix::Zero(1 << p.n, 1 << p.n);
    add_term(m, p, 1.0);
    return m;
}

CMatrix dense_matrix(const Hamiltonian& H) {
    check_dense(H.n());
    CMatrix m = CMatrix::Zero(1 << H.n(), 1 << H.n());
    for (const auto& t : H.terms()) add_term(m, t.string, t.coeff);
    return m;
}

double EigenSystem::gap(int j) const {
    const int d = static_cast<int>(energies.size());
    double g = std::numeric_limits<double>::infinity();
    if (j + 1 < d) g = std::min(g, energies[j + 1] - energies[j]);
    if (j > 0) g = std::min(g, energies[j] - energies[j - 1]);
    return g;
}

double EigenSystem::overlap(const CVector& psi, int j) const {
    return std::norm(vectors.col(j).dot(psi));
}

EigenSystem diagonalize(const Hamiltonian& H) {
    check_dense(H.n());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(dense_matrix(H));
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    EigenSystem es;
    es.n = H.n();
    es.energies = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    return es;
}

static void check_state(const EigenSystem& es, const CVector& psi) {
    if (psi.size() != es.vectors.rows()) throw std::invalid_argument("state dimension mismatch");
}

CVector apply_filter_exact(const EigenSystem& es, const CVector& psi, double tau, double omega) {
    check_state(es, psi);
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    CVector c = es.vectors.adjoint() * psi;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        double h = tau * (es.energies[i] - omega);
        c[i] *= std::exp(-h * h);
    }
    return es.vectors * c;
}

NDValue exact_N_and_D(const EigenSystem& es, const CVector& psi, const CMatrix& O, double tau,
                      double omega) {
    if (O.rows() != es.vectors.rows() || O.cols() != O.rows())
        throw std::invalid_argument("observable dimension mismatch");
    if ((O - O.adjoint()).norm() > 1e-10 * std::max(1.0, O.norm()))
        throw std::invalid_argument("observable is not Hermitian");
    CVector g = apply_filter_exact(es, psi, tau, omega);
    cplx N = g.dot(O * g);
    if (std::abs(N.imag()) > 1e-10 * std::max(1.0, std::abs(N)))
        throw std::runtime_error("numerator has an imaginary residue");
    return {N.real(), g.squaredNorm()};
}

NDValue exact_N_and_D(const EigenSystem& es, const CVector& psi, const Hamiltonian& O, double tau,
                      double omega) {
    if (O.n() != es.n) throw std::invalid_argument("observable qubit count mismatch");
    return exact_N_and_D(es, psi, dense_matrix(O), tau, omega);
}

std::vector<double> exact_D_curve(const EigenSystem& es, const CVector& psi, double tau,
                                  const std::vector<double>& omega_grid) {
    check_state(es, psi);
    if (omega_grid.empty()) throw std::invalid_argument("empty omega grid");
    Eigen::VectorXd w = (es.vectors.adjoint() * psi).cwiseAbs2();
    std::vector<double> out;
    out.reserve(omega_grid.size());
    for (double om : omega_grid) {
        double s = 0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            double h = tau * (es.energies[i] - om);
            s += w[i] * std::exp(-2 * h * h);
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, double h) {
    if (!(h > 0) || !(hi >= lo)) throw std::invalid_argument("bad grid");
    std::vector<double> g;
    const auto cnt = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9));
    for (std::size_t i = 0; i <= cnt; ++i) g.push_back(lo + h * double(i));
    return g;
}

std::size_t argmax_lowest(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

CVector default_initial_state(const EigenSystem& es, int j) {
    Eigen::Index best = 0;
    es.vectors.col(j).cwiseAbs2().maxCoeff(&best);
    CVector psi = CVector::Zero(es.vectors.rows());
    psi[best] = 1.0;
    return psi;
}

CVector load_state(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state file " + path);
    const Eigen::Index d = Eigen::Index{1} << n;
    CVector psi(d);
    std::string line;
    Eigen::Index k = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double re, im;
        std::string extra;
        if (!(ls >> re >> im) || (ls >> extra))
            throw ParseError(lineno, "expected 're im'");
        if (k >= d) throw ParseError(lineno, "more than 2^n amplitudes");
        psi[k++] = cplx(re, im);
    }
    if (k != d) throw ParseError(lineno, "expected " + std::to_string(d) + " amplitudes");
    double nrm = psi.norm();
    if (std::abs(nrm - 1.0) > 1e-6) throw std::invalid_argument("state is not normalized");
    return psi / nrm;
}

}  // namespace rlcu
