#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "rlcu/exact.hpp"
#include "rlcu/filter_lcu.hpp"

namespace rlcu {

SegmentMode parse_segment_mode(const std::string& s) {
    if (s == "general") return SegmentMode::general;
    if (s == "adaptive") return SegmentMode::adaptive;
    if (s == "tight") return SegmentMode::tight;
    throw std::invalid_argument("unknown segment mode '" + s + "'");
}

std::string to_string(SegmentMode m) {
    switch (m) {
        case SegmentMode::general: return "general";
        case SegmentMode::adaptive: return "adaptive";
        default: return "tight";
    }
}

std::string FilterPlan::describe() const {
    std::ostringstream os;
    os << fmt::format("tau={:.10g} x_c={:.10g} t_c={:.10g} k={} s_c={} basis={} mode={} nu_c={:.10g}\n", tau, x_c,
                      t_c(), k, s_c, to_string(basis), to_string(mode), nu_c);
    os << fmt::format("eps_tau={:.6g} eps_c={:.6g} eps_n={:.6g} eps_sc={:.6g} N_s={} mu_target={} omega={:.10g}\n",
                      eps_tau, eps_c, eps_n, eps_sc, N_s, mu_target, omega);
    return os.str();
}

FilterLcu::FilterLcu(const Hamiltonian& H, const FilterPlan& plan)
    : plan_(plan),
      trotter_(H, plan.k, plan.basis),
      table_(H.n(), trotter_.terms(), trotter_.schedule(), plan.k, plan.s_c, plan.pair_leading) {
    if (plan_.lambda <= 0) plan_.lambda = table_.lambda();
    offset_ = identity_offset(H, plan.basis);
}

long long FilterLcu::segments(double t, int mu_scale) const {
    const double at = std::abs(t);
    const double target = std::pow(plan_.mu_target, mu_scale);
    switch (plan_.mode) {
        case SegmentMode::general: {
            const double tc = plan_.t_c();
            if (tc <= 0 || at == 0) return 1;
            return std::max<long long>(1, static_cast<long long>(std::ceil(plan_.nu_c * at / tc - 1e-12)));
        }
        case SegmentMode::adaptive:
            return segment_count(table_.lambda(), at, plan_.k, target);
        default: {
            if (at == 0) return 1;
            auto ok = [&](long long nu) {
                const double m = at / double(nu);
                try {
                    const double mt = std::pow(table_.mu(m), double(nu));
                    return mt <= target && double(nu) * mt * table_.eps_segment(m) <= plan_.eps_sc;
                } catch (const std::overflow_error&) {
                    return false;
                }
            };
            long long hi = 1;
            while (!ok(hi)) {
                if (hi > (1ll << 40)) throw std::runtime_error("no feasible segment count");
                hi *= 2;
            }
            long long lo = hi / 2;  // lo fails (or is 0)
            while (hi - lo > 1) {
                long long mid = lo + (hi - lo) / 2;
                (ok(mid) ? hi : lo) = mid;
            }
            return hi;
        }
    }
}

double FilterLcu::mu_total(double t, int mu_scale) const {
    const long long nu = segments(t, mu_scale);
    return std::pow(table_.mu(t / double(nu)), double(nu));
}

double FilterLcu::eps_total(double t, int mu_scale) const {
    const long long nu = segments(t, mu_scale);
    const double m = t / double(nu);
    return double(nu) * std::pow(table_.mu(m), double(nu)) * table_.eps_segment(m);
}

CircuitInstance FilterLcu::sample_instance(double t, Rng& rng, int mu_scale) const {
    CircuitInstance inst;
    const long long nu = segments(t, mu_scale);
    inst.t = t;
    inst.nu = static_cast<int>(nu);
    inst.m = t / double(nu);
    const double mu = table_.mu(inst.m);
    inst.mu_total = std::pow(mu, double(nu));
    inst.segments.reserve(nu);
    cplx w = 1.0;
    for (long long q = 0; q < nu; ++q) {
        cplx ph;
        inst.segments.push_back(table_.sample(inst.m, rng, ph));
        w *= ph;
    }
    inst.weight = w * inst.mu_total * std::exp(cplx(0, -offset_ * t));
    return inst;
}

static Eigen::MatrixXcd trotter_matrix(const TrotterCircuit& tc, double m) {
    const int d = 1 << tc.n();
    Eigen::MatrixXcd S(d, d);
    for (int b = 0; b < d; ++b) {
        StateVector e(tc.n(), b);
        tc.apply(e, m);
        for (int r = 0; r < d; ++r) S(r, b) = e.amps[r];
    }
    return S;
}

static Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd M, long long p) {
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Identity(M.rows(), M.cols());
    while (p > 0) {
        if (p & 1) R = R * M;
        p >>= 1;
        if (p) M = M * M;
    }
    return R;
}

Eigen::MatrixXcd truncated_evolution_matrix(const FilterLcu& f, double t, int mu_scale) {
    const long long nu = f.segments(t, mu_scale);
    const double m = t / double(nu);
    Eigen::MatrixXcd M = f.table().dense_truncated(m) * trotter_matrix(f.trotter(), m);
    return std::exp(cplx(0, -f.offset() * t)) * matrix_power(M, nu);
}

// Breakpoints in |x| where the segment count changes, assuming it is
// nondecreasing in |t|.
static std::vector<double> breakpoints(const FilterLcu& f, double tau, double x_max, int mu_scale) {
    std::vector<double> bp{0.0};
    if (tau <= 0 || x_max <= 0) {
        bp.push_back(x_max);
        return bp;
    }
    double a = 0;
    long long nu_a = f.segments(0, mu_scale);
    const long long nu_end = f.segments(tau * x_max, mu_scale);
    while (nu_a < nu_end) {
        double lo = a, hi = x_max;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (f.segments(tau * mid, mu_scale) > nu_a ? hi : lo) = mid;
        }
        if (hi <= a) break;
        bp.push_back(hi);
        a = hi;
        nu_a = f.segments(tau * std::nextafter(hi, 2 * x_max + 1), mu_scale);
    }
    if (bp.back() < x_max) bp.push_back(x_max);
    return bp;
}

std::vector<std::pair<double, double>> segment_quadrature(const FilterLcu& f, double x_max, int npts, int mu_scale) {
    std::vector<std::pair<double, double>> out;
    const auto gl = gauss_legendre(npts);
    const auto bp = breakpoints(f, f.plan().tau, x_max, mu_scale);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (bp[i + 1] <= bp[i]) continue;
        // wide pieces are split so the Gaussian weight itself is resolved
        const int parts = static_cast<int>(std::ceil((bp[i + 1] - bp[i]) / 0.5));
        const double h = (bp[i + 1] - bp[i]) / parts;
        for (int q = 0; q < parts; ++q) {
            const double a = bp[i] + q * h, b = a + h;
            for (auto [node, wt] : gl) {
                const double x = 0.5 * (a + b) + 0.5 * (b - a) * node;
                out.emplace_back(x, 0.5 * (b - a) * wt);
                out.emplace_back(-x, 0.5 * (b - a) * wt);
            }
        }
    }
    return out;
}

Eigen::MatrixXcd truncated_filter_matrix(const FilterLcu& f, int npts) {
    const auto& plan = f.plan();
    const int d = 1 << f.n();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(d, d);
    if (plan.tau == 0 || plan.x_c == 0) {
        return truncated_mass(plan.x_c) * Eigen::MatrixXcd::Identity(d, d);
    }
    for (auto [x, w] : segment_quadrature(f, plan.x_c, npts)) {
        const double t = plan.tau * x;
        G += w * gaussian_density(x) * std::exp(cplx(0, t * plan.omega)) * truncated_evolution_matrix(f, t);
    }
    return G;
}

Certificate certify_formula(const Hamiltonian& H, const FilterPlan& plan, bool dense_check) {
    FilterLcu f(H, plan);
    Certificate c;
    const double tc = plan.t_c();
    c.mu_total = f.mu_total(tc);
    c.eps_xc = 1.0 - truncated_mass(plan.x_c);
    if (plan.x_c > 0 && plan.tau > 0) {
        const auto bp = breakpoints(f, plan.tau, plan.x_c, 1);
        double worst = 0;
        // within a piece the error grows with |t|: check right ends and a uniform grid
        for (double x : bp) worst = std::max(worst, f.eps_total(plan.tau * x));
        for (int i = 1; i <= 400; ++i) worst = std::max(worst, f.eps_total(tc * i / 400.0));
        c.eps_sc = worst * truncated_mass(plan.x_c);
    }
    c.eps_total = c.eps_xc + c.eps_sc;
    if (dense_check) {
        if (H.n() > 6) throw std::invalid_argument("dense certification limited to 6 qubits");
        auto es = diagonalize(H);
        const int d = 1 << H.n();
        Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            const double h = plan.tau * (es.energies[i] - plan.omega);
            target += std::exp(-h * h) * es.vectors.col(i) * es.vectors.col(i).adjoint();
        }
        Eigen::MatrixXcd g8 = truncated_filter_matrix(f, 8);
        Eigen::MatrixXcd g16 = truncated_filter_matrix(f, 16);
        Eigen::JacobiSVD<Eigen::MatrixXcd> conv(g16 - g8);
        if (conv.singularValues()(0) > std::max(1e-9, 1e-2 * c.eps_total))
            throw std::runtime_error("quadrature did not converge");
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g16 - target);
        c.dense_error = svd.singularValues()(0);
    }
    return c;
}

}  // namespace rlcu
