#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rlcu/filter_lcu.hpp"

namespace rlcu {

static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ull)));
}

double gaussian_density(double x) { return std::exp(-x * x / 4) / (2 * std::sqrt(std::numbers::pi)); }

double truncated_mass(double x_c) { return x_c <= 0 ? 0.0 : std::erf(x_c / 2); }

double sample_truncated_gaussian(Rng& rng, double x_c) {
    if (x_c <= 0) return 0.0;
    if (x_c >= 1) {
        std::normal_distribution<double> g(0.0, std::numbers::sqrt2);
        for (;;) {
            double x = g(rng);
            if (std::abs(x) <= x_c) return x;
        }
    }
    // narrow window: uniform proposal, acceptance >= exp(-1/4)
    std::uniform_real_distribution<double> u(-x_c, x_c), a(0.0, 1.0);
    for (;;) {
        double x = u(rng);
        if (a(rng) <= std::exp(-x * x / 4)) return x;
    }
}

double sample_time(Rng& rng, double tau, double x_c) { return tau * sample_truncated_gaussian(rng, x_c); }

double sample_time_pair_for_D(Rng& rng, double x_c) {
    double x1 = sample_truncated_gaussian(rng, x_c);
    double x2 = sample_truncated_gaussian(rng, x_c);
    return x1 - x2;
}

static double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double difference_density(double x, double x_c) {
    if (std::abs(x) > 2 * x_c || x_c <= 0) return 0.0;
    const double a = std::max(-x_c, x - x_c), b = std::min(x_c, x + x_c);
    const double Z = truncated_mass(x_c);
    const double pi = std::numbers::pi;
    return std::exp(-x * x / 8) * std::sqrt(2 * pi) * (Phi(b - x / 2) - Phi(a - x / 2)) / (4 * pi * Z * Z);
}

double c_k(int k) { return 0.5 * std::pow(std::numbers::e / (2 * k + 1), 4 * k + 2); }

static void check_k(int k) {
    if (k < 0 || k > 2) throw std::invalid_argument("Trotter half-order k must be 0, 1 or 2");
}

long long segment_count(double lambda, double t, int k, double mu_target) {
    check_k(k);
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!(mu_target > 1)) throw std::invalid_argument("mu target must exceed 1");
    const double lt = lambda * std::abs(t);
    if (lt == 0) return 1;
    const double e = std::numbers::e;
    double nu = std::pow(2 * (e + c_k(k)) * lt / std::log(mu_target), 1.0 / (4 * k + 1)) * 2 * lt;
    return std::max<long long>(1, static_cast<long long>(std::ceil(nu)));
}

double lambert_w0(double x) {
    if (x < -1 / std::numbers::e) throw std::domain_error("W0 undefined below -1/e");
    if (x == 0) return 0;
    double w = x < 1 ? std::log1p(x) : std::log(x) - (x > 3 ? std::log(std::log(x)) : 0.0);
    for (int it = 0; it < 100; ++it) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double step = f / (ew * (w + 1));
        w -= step;
        if (std::abs(step) <= 1e-10 * (1 + std::abs(w))) break;
    }
    return w;
}

int truncation_order(double nu, double eps_sc, int k, double lambda_t, double mu_target) {
    check_k(k);
    if (!(nu >= 1) || !(eps_sc > 0 && eps_sc < 1)) throw std::invalid_argument("bad truncation arguments");
    const int floor_order = 4 * k + 1;
    lambda_t = std::abs(lambda_t);
    if (lambda_t == 0) return floor_order;
    const double L = std::log(mu_target * nu / eps_sc);
    const double w = lambert_w0(nu * L / (2 * std::numbers::e * lambda_t));
    const double s = std::ceil(L / w - 1);
    return std::max(floor_order, static_cast<int>(s));
}

int truncation_order_asymptotic(double nu, double eps_sc, int k) {
    check_k(k);
    const double L = std::log(4 * nu / eps_sc);
    const double denom = std::max(1.0, std::log(std::pow(nu, 1.0 / (4 * k + 2)) * L));
    return std::max(4 * k + 1, static_cast<int>(std::ceil(L / denom)));
}

static double log_budget(double eta, double eps, double O_norm) {
    if (!(eta > 0 && eta <= 1) || !(eps > 0)) throw std::invalid_argument("need 0 < eta <= 1 and eps > 0");
    return std::log(3 * (2 * O_norm + 1) / (eta * eps));
}

double nu_c_actual(double lambda, double Delta, double eta, double eps, int k, double O_norm) {
    check_k(k);
    const double a = 1.0 / (4 * k + 1);
    const double pre = 4 * std::pow(4 * (std::numbers::e + c_k(k)) / std::numbers::ln2, a);
    return pre * std::pow(lambda / Delta * log_budget(eta, eps, O_norm), 1 + a);
}

double nu_c_form(double lambda, double tau, double x_c, int k) {
    check_k(k);
    const double a = 1.0 / (4 * k + 1);
    return 2 * std::pow(2 * (std::numbers::e + c_k(k)) / std::numbers::ln2, a) * std::pow(lambda * tau * x_c, 1 + a);
}

double nu_c_lattice(int n, double Delta, double eta, double eps, int k, double O_norm) {
    check_k(k);
    const double a = 1.0 / (4 * k + 1);
    const double pre = 4 * std::pow(4 * (std::numbers::e + c_k(k)) / std::numbers::ln2, a);
    return pre * std::pow(double(n), 2 * a) * std::pow(log_budget(eta, eps, O_norm) / Delta, 1 + a);
}

std::vector<std::pair<double, double>> gauss_legendre(int npts) {
    if (npts < 1) throw std::invalid_argument("need at least one node");
    std::vector<std::pair<double, double>> out(npts);
    for (int i = 0; i < npts; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double dp = 1;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int j = 2; j <= npts; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (npts == 1) p0 = 1;
            dp = npts * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        out[i] = {x, 2 / ((1 - x * x) * dp * dp)};
    }
    return out;
}

}  // namespace rlcu
