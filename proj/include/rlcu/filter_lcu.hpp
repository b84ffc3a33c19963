#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlcu/basis_op.hpp"
#include "rlcu/pauli.hpp"
#include "rlcu/statevector.hpp"

namespace rlcu {

using Rng = std::mt19937_64;

// Independent stream for (seed, index); fixed mapping so results do not
// depend on thread scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

// ---- Gaussian time sampling ----------------------------------------------
// g(h) = exp(-h^2) = \int p(x) exp(ixh) dx with p(x) = exp(-x^2/4) / (2 sqrt(pi)).

double gaussian_density(double x);
// \int_{-x_c}^{x_c} p(x) dx
double truncated_mass(double x_c);
// x from p restricted to [-x_c, x_c]
double sample_truncated_gaussian(Rng& rng, double x_c);
// tau * x
double sample_time(Rng& rng, double tau, double x_c);
// x1 - x2 with x1, x2 independent truncated draws
double sample_time_pair_for_D(Rng& rng, double x_c);
// density of x1 - x2 for truncated x1, x2
double difference_density(double x, double x_c);

// ---- segment and truncation bounds ------------------------------------------

double c_k(int k);
// smallest nu with nu >= (2(e+c_k) lambda t / ln mu)^{1/(4k+1)} 2 lambda t, at least 1
long long segment_count(double lambda, double t, int k, double mu_target = 2.0);
double lambert_w0(double x);
// max(ceil(ln(mu nu/eps) / W0(nu ln(mu nu/eps) / (2 e lambda t)) - 1), 4k+1)
int truncation_order(double nu, double eps_sc, int k, double lambda_t, double mu_target = 2.0);
// asymptotic form with unit constant: ln(4nu/eps) / ln(nu^{1/(4k+2)} ln(4nu/eps)), floored at 4k+1
int truncation_order_asymptotic(double nu, double eps_sc, int k);

// nu_c = 4(4(e+c_k)/ln2)^{1/(4k+1)} (lambda/Delta * ln(3(2|O|+1)/(eta eps)))^{1+1/(4k+1)}
double nu_c_actual(double lambda, double Delta, double eta, double eps, int k, double O_norm = 1.0);
// nu_c = 2(2(e+c_k)/ln2)^{1/(4k+1)} (lambda tau x_c)^{1+1/(4k+1)}
double nu_c_form(double lambda, double tau, double x_c, int k);
// lattice mode: lambda^{1+1/(4k+1)} replaced by n^{2/(4k+1)}, unit hidden constant
double nu_c_lattice(int n, double Delta, double eta, double eps, int k, double O_norm = 1.0);

std::vector<std::pair<double, double>> gauss_legendre(int npts);  // nodes, weights on [-1, 1]

// ---- compensation table ----------------------------------------------------

struct OpCoeff {
    BasisOp op;
    cplx c;
};

struct OrderBlock {
    int s = 0;
    double norm1 = 0.0;          // sum |c|
    std::vector<OpCoeff> terms;  // sorted by |c| descending
    std::vector<double> cdf;     // cumulative |c| / norm1
};

// Pairs identity with the self-adjoint part of the leading order:
// I + i m^q sum theta_r H_r = sqrt(1 + Theta^2 m^{2q}) sum p_r exp(i phi_r H_r).
struct PairedBlock {
    bool enabled = false;
    int q = 0;
    double Theta = 0.0;
    std::vector<OpCoeff> rot;  // c = theta_r, op with Hermitian phase in h
    std::vector<cplx> h;
    std::vector<double> cdf;
};

// Series V(m) = U(m) S_{2k}(m)^dag = sum_s m^s C_s, truncated at s_c.
class CompensationTable {
public:
    CompensationTable(int n, const std::vector<TrotterTerm>& terms, const TrotterSchedule& schedule, int k,
                      int s_c, bool pair_leading = true);

    int n() const { return n_; }
    int k() const { return k_; }
    int s_c() const { return s_c_; }
    double lambda() const { return lambda_; }
    // 1-norms of orders 1..2k before they are discarded
    const std::vector<double>& vanishing_norms() const { return vanishing_; }
    const std::vector<OrderBlock>& orders() const { return orders_; }
    const PairedBlock& paired() const { return paired_; }
    double pruned_mass(int s) const { return pruned_[s]; }

    double mu(double m) const;
    // bound on ||V(m) - V_trunc(m)||
    double eps_segment(double m) const;
    Compensation sample(double m, Rng& rng, cplx& phase) const;

    // explicit (prob, W, phase) list for small checks
    struct Summand {
        double prob;
        Compensation w;
        cplx phase;
    };
    std::vector<Summand> summands(double m) const;

    Eigen::MatrixXcd dense_truncated(double m) const;  // sum_{s <= s_c} m^s C_s
    std::string dump(int top = 10) const;

private:
    int n_, k_, s_c_;
    double lambda_ = 0.0;
    double gamma_ = 0.0;
    std::vector<double> vanishing_;
    std::vector<double> pruned_;
    std::vector<OrderBlock> orders_;  // orders q..s_c that are sampled as plain monomials
    PairedBlock paired_;
    double identity_weight_ = 1.0;  // 1 when unpaired, else 0
};

// ---- plan and sampler -----------------------------------------------------------

enum class SegmentMode { general, adaptive, tight };
SegmentMode parse_segment_mode(const std::string& s);
std::string to_string(SegmentMode m);

struct FilterPlan {
    double tau = 0.0;
    double x_c = 0.0;
    int k = 1;
    int s_c = 3;
    Basis basis = Basis::pauli;
    SegmentMode mode = SegmentMode::general;
    double nu_c = 1.0;  // general mode: nu(t) = max(1, ceil(nu_c |t| / t_c))
    double mu_target = 2.0;
    bool pair_leading = true;
    double lambda = 0.0;
    double omega = 0.0;
    std::vector<double> omega_grid;
    double eps_tau = 0.0, eps_c = 0.0, eps_n = 0.0, eps_sc = 0.0;
    long long N_s = 1;

    double t_c() const { return tau * x_c; }
    std::string describe() const;
};

class FilterLcu {
public:
    FilterLcu(const Hamiltonian& H, const FilterPlan& plan);

    const FilterPlan& plan() const { return plan_; }
    const TrotterCircuit& trotter() const { return trotter_; }
    const CompensationTable& table() const { return table_; }
    int n() const { return trotter_.n(); }
    // identity part of H, carried as the phase exp(-i offset t) in instance weights
    double offset() const { return offset_; }

    // mu_scale = 1 for a single filter time, 2 for the D pool (time up to 2 t_c)
    long long segments(double t, int mu_scale = 1) const;
    double mu_total(double t, int mu_scale = 1) const;
    // ||U(t) - U_trunc(t)|| <= nu mu^nu eps_seg
    double eps_total(double t, int mu_scale = 1) const;
    CircuitInstance sample_instance(double t, Rng& rng, int mu_scale = 1) const;

private:
    FilterPlan plan_;
    TrotterCircuit trotter_;
    CompensationTable table_;
    double offset_ = 0.0;
};

struct Certificate {
    double mu_total = 1.0;  // at t = x_c tau
    double eps_xc = 0.0;
    double eps_sc = 0.0;
    double eps_total = 0.0;
    double dense_error = -1.0;  // -1 when not computed
};

// Dense path reconstructs g_{tau, x_c, s_c}(H - omega) by composite Gauss-Legendre quadrature.
Certificate certify_formula(const Hamiltonian& H, const FilterPlan& plan, bool dense_check = true);

// Quadrature nodes (x, weight) on [-x_max, x_max] that split at every change of the
// segment count, for integrands f(x) U_trunc(x tau). Weights exclude any density.
std::vector<std::pair<double, double>> segment_quadrature(const FilterLcu& f, double x_max, int npts, int mu_scale = 1);

// The filter operator built from the truncated series, for small n.
Eigen::MatrixXcd truncated_filter_matrix(const FilterLcu& f, int npts = 8);
// U_trunc(t) = (V_trunc(m) S(m))^nu
Eigen::MatrixXcd truncated_evolution_matrix(const FilterLcu& f, double t, int mu_scale = 1);

}  // namespace rlcu
