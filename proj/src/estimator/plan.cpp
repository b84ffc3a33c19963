#include <cmath>
#include <numbers>

#include "rlcu/estimator.hpp"

namespace rlcu {

long long shots_required(double O_norm1, double eps_n, double vartheta) {
    if (!(eps_n > 0)) throw InfeasiblePlan("shot budget eps_n must be positive");
    if (!(vartheta > 0 && vartheta < 1)) throw std::invalid_argument("vartheta must lie in (0, 1)");
    const double c = 2.0;
    const double ns = 2 * std::pow(c, 4) * O_norm1 * O_norm1 * std::log(1 / vartheta) / (eps_n * eps_n);
    if (ns > 9e18) throw InfeasiblePlan("shot count overflows");
    return std::max<long long>(1, static_cast<long long>(std::ceil(ns)));
}

static void check_common(double Delta, double eta, double vartheta, int k, double lambda) {
    if (!(Delta > 0)) throw std::invalid_argument("gap must be positive");
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("overlap eta must lie in (0, 1]");
    if (!(vartheta > 0 && vartheta < 1)) throw std::invalid_argument("vartheta must lie in (0, 1)");
    if (k < 0 || k > 2) throw std::invalid_argument("k must be 0, 1 or 2");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
}

FilterPlan parameter_selection(const PropertyInputs& in) {
    check_common(in.Delta, in.eta, in.vartheta, in.k, in.lambda);
    if (!(in.eps > 0)) throw std::invalid_argument("eps must be positive");
    FilterPlan p;
    p.k = in.k;
    p.basis = in.basis;
    p.mode = in.mode;
    p.lambda = in.lambda;
    p.eps_tau = p.eps_c = in.eta * in.eps / (3 * (2 * in.O_norm + 1));
    p.eps_n = in.eta * in.eps / (3 * (in.O_norm + in.O_norm1 + 1));
    if (!(p.eps_n > 0) || !(p.eps_c > 0)) throw InfeasiblePlan("error budget is empty");
    p.eps_sc = p.eps_c;
    p.tau = std::sqrt(std::log(2 / p.eps_tau)) / in.Delta;
    p.x_c = 2 * std::sqrt(std::log(2 / p.eps_c));
    p.nu_c = nu_c_actual(in.lambda, in.Delta, in.eta, in.eps, in.k, in.O_norm);
    p.s_c = truncation_order(std::max(1.0, p.nu_c), p.eps_sc, in.k, in.lambda * p.t_c(), p.mu_target);
    p.N_s = shots_required(in.O_norm1, p.eps_n, in.vartheta);
    return p;
}

FilterPlan energy_plan(const EnergyInputs& in) {
    check_common(in.Delta, in.eta, in.vartheta, in.k, in.lambda);
    if (!(in.kappa > 0)) throw std::invalid_argument("kappa must be positive");
    if (!(in.E_hi >= in.E_lo)) throw std::invalid_argument("empty search window");
    FilterPlan p;
    p.k = in.k;
    p.basis = in.basis;
    p.mode = in.mode;
    p.lambda = in.lambda;
    p.eps_tau = p.eps_c = p.eps_n = 0.1;
    p.eps_sc = in.eta * p.eps_c;
    p.tau = std::max(1 / in.kappa, 2 / in.Delta * std::sqrt(std::log(2 / (in.eta * p.eps_tau))));
    p.x_c = 2 * std::sqrt(std::log(2 / (in.eta * p.eps_c)));
    const double e = std::numbers::e;
    const double a = 1.0 / (4 * in.k + 1);
    p.nu_c = 4 * std::pow(2 * (e + c_k(in.k)) / std::numbers::ln2, a) *
             std::pow(in.lambda / in.kappa * std::log(20 / in.eta), 1 + a);
    p.s_c = truncation_order(std::max(1.0, p.nu_c), p.eps_sc, in.k, in.lambda * p.t_c(), p.mu_target);
    p.N_s = shots_required(1.0, in.eta * p.eps_n, in.vartheta);
    p.omega_grid = uniform_grid(in.E_lo, in.E_hi, in.kappa / 4);
    p.omega = p.omega_grid.front();
    return p;
}

FilterPlan unknown_energy_plan(PropertyInputs in, double kappa) {
    if (!(kappa >= 0)) throw std::invalid_argument("kappa must be nonnegative");
    const double eta0 = in.eta;
    FilterPlan p = parameter_selection(in);
    // tau depends on eta through the budget; iterate to the fixed point
    for (int it = 0; it < 50; ++it) {
        if (p.tau * kappa > 1)
            throw InfeasiblePlan("tau * kappa > 1: filter damping at the energy offset exceeds the budget");
        const double eta_eff = eta0 * std::exp(-2 * p.tau * p.tau * kappa * kappa);
        if (std::abs(eta_eff - in.eta) <= 1e-14 * eta0) break;
        in.eta = eta_eff;
        p = parameter_selection(in);
    }
    if (p.tau * kappa > 1) throw InfeasiblePlan("tau * kappa > 1: filter damping at the energy offset exceeds the budget");
    return p;
}

}  // namespace rlcu
