#include <fmt/format.h>

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rlcu/estimator.hpp"

namespace rlcu {

EstimatorPath parse_estimator_path(const std::string& s) {
    if (s == "sampled") return EstimatorPath::sampled;
    if (s == "exact_overlap" || s == "exact-overlap") return EstimatorPath::exact_overlap;
    if (s == "analytic") return EstimatorPath::analytic;
    throw std::invalid_argument("unknown estimator path '" + s + "'");
}

std::string to_string(EstimatorPath p) {
    switch (p) {
        case EstimatorPath::sampled: return "sampled";
        case EstimatorPath::exact_overlap: return "exact_overlap";
        case EstimatorPath::analytic: return "analytic";
    }
    return "?";
}

cplx ShotRecord::value(double omega) const {
    return amp * std::exp(cplx(0, omega * (t_i - t_j))) * d_hat;
}

void draw_outcomes(cplx z, Rng& rng, int& a, int& b) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double pa = std::clamp(0.5 * (1 + z.real()), 0.0, 1.0);
    const double pb = std::clamp(0.5 * (1 + z.imag()), 0.0, 1.0);
    a = u(rng) < pa ? 0 : 1;
    b = u(rng) < pb ? 0 : 1;
}

// ---- engine ----------------------------------------------------------------

static constexpr double kC = 2.0;  // c(mu) per filter side

ShotEngine::ShotEngine(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O, const FilterPlan& plan,
                       bool fixed_c)
    : filter_(H, plan), psi0_(psi0), fixed_c_(fixed_c) {
    if (psi0.n != H.n()) throw std::invalid_argument("initial state size does not match Hamiltonian");
    if (O.n() != H.n()) throw std::invalid_argument("observable size does not match Hamiltonian");
    if (O.empty()) throw std::invalid_argument("observable has no terms");
    double acc = 0;
    for (const auto& t : O.terms()) {
        O_terms_.push_back(t.string);
        O_sign_.push_back(t.coeff >= 0 ? 1.0 : -1.0);
        acc += std::abs(t.coeff);
        O_cdf_.push_back(acc);
    }
    O_norm1_ = acc;
    for (auto& c : O_cdf_) c /= acc;
    O_cdf_.back() = 1.0;
    Z_c_ = truncated_mass(plan.x_c);
}

double ShotEngine::bound_N() const { return std::numbers::sqrt2 * Z_c_ * Z_c_ * kC * kC * O_norm1_; }
double ShotEngine::bound_D() const { return std::numbers::sqrt2 * Z_c_ * Z_c_ * kC * kC; }

void ShotEngine::evolve(double t, int mu_scale, double C, Rng& rng, StateVector& out, cplx& w) const {
    CircuitInstance inst = filter_.sample_instance(t, rng, mu_scale);
    out.n = psi0_.n;
    out.amps = psi0_.amps;
    if (!fixed_c_) {
        run_instance_inplace(out, inst, filter_.trotter());
        w = inst.weight;
        return;
    }
    if (inst.mu_total > C * (1 + 1e-12))
        throw InfeasiblePlan(fmt::format("instance 1-norm {:.6g} exceeds c = {} at t = {:.6g}", inst.mu_total, C, t));
    // keep with probability mu/C, otherwise a signed identity that averages to zero
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) * C < inst.mu_total) {
        run_instance_inplace(out, inst, filter_.trotter());
        w = C * inst.weight / inst.mu_total;
    } else {
        w = u(rng) < 0.5 ? C : -C;
    }
}

ShotRecord ShotEngine::shoot_N(Rng& rng, bool sample_outcomes) const {
    thread_local StateVector si, sj;
    const auto& p = filter_.plan();
    ShotRecord r;
    r.t_i = p.tau * sample_truncated_gaussian(rng, p.x_c);
    r.t_j = p.tau * sample_truncated_gaussian(rng, p.x_c);
    cplx wi, wj;
    evolve(r.t_i, 1, kC, rng, si, wi);
    evolve(r.t_j, 1, kC, rng, sj, wj);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double v = u(rng);
    r.l = static_cast<int>(std::lower_bound(O_cdf_.begin(), O_cdf_.end(), v) - O_cdf_.begin());
    if (r.l >= static_cast<int>(O_terms_.size())) r.l = static_cast<int>(O_terms_.size()) - 1;
    const cplx z = overlap(sj, O_terms_[r.l], si);
    if (sample_outcomes) {
        draw_outcomes(z, rng, r.a, r.b);
        r.d_hat = cplx(r.a ? -1.0 : 1.0, r.b ? -1.0 : 1.0);
    } else {
        r.a = r.b = -1;
        r.d_hat = z;
    }
    r.amp = Z_c_ * Z_c_ * wi * std::conj(wj) * O_norm1_ * O_sign_[r.l];
    return r;
}

ShotRecord ShotEngine::shoot_D(Rng& rng, bool sample_outcomes) const {
    thread_local StateVector s;
    const auto& p = filter_.plan();
    ShotRecord r;
    r.t_i = p.tau * sample_time_pair_for_D(rng, p.x_c);
    r.t_j = 0.0;
    cplx w;
    evolve(r.t_i, 2, kC * kC, rng, s, w);
    const cplx z = inner(psi0_, s);
    if (sample_outcomes) {
        draw_outcomes(z, rng, r.a, r.b);
        r.d_hat = cplx(r.a ? -1.0 : 1.0, r.b ? -1.0 : 1.0);
    } else {
        r.a = r.b = -1;
        r.d_hat = z;
    }
    r.amp = Z_c_ * Z_c_ * w;
    return r;
}

// Runs fn(chunk, rng, begin, end) over fixed chunks; the stream depends only on
// (seed, pool, chunk).
template <class Fn>
static void for_each_chunk(long long shots, std::uint64_t seed, std::uint64_t pool, bool parallel, Fn&& fn) {
    const long long chunks = (shots + ShotEngine::kChunk - 1) / ShotEngine::kChunk;
    std::exception_ptr err;
    std::mutex mu;
    auto body = [&](long long c) {
        try {
            Rng rng = make_stream(seed, (pool << 48) | static_cast<std::uint64_t>(c));
            const long long b = c * ShotEngine::kChunk, e = std::min(shots, b + ShotEngine::kChunk);
            fn(c, rng, b, e);
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!err) err = std::current_exception();
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long c = 0; c < chunks; ++c) body(c);
    } else {
        for (long long c = 0; c < chunks; ++c) body(c);
    }
    if (err) std::rethrow_exception(err);
}

std::vector<ShotRecord> ShotEngine::run_pool(bool numerator, long long shots, std::uint64_t seed, bool parallel,
                                             bool sample_outcomes) const {
    if (shots < 1) throw std::invalid_argument("shot count must be positive");
    std::vector<ShotRecord> recs(shots);
    for_each_chunk(shots, seed, numerator ? 1 : 2, parallel, [&](long long, Rng& rng, long long b, long long e) {
        for (long long s = b; s < e; ++s) recs[s] = numerator ? shoot_N(rng, sample_outcomes) : shoot_D(rng, sample_outcomes);
    });
    return recs;
}

// Streaming statistics at fixed omega, folded per chunk and combined in chunk order.
struct Partial {
    double sre = 0, sim = 0, sre2 = 0;
    long long n = 0;
};

static PoolStats finish(const std::vector<Partial>& parts, double bound, double vartheta) {
    Partial t;
    for (const auto& p : parts) {
        t.sre += p.sre;
        t.sim += p.sim;
        t.sre2 += p.sre2;
        t.n += p.n;
    }
    PoolStats s;
    s.shots = t.n;
    s.mean = t.sre / t.n;
    s.mean_im = t.sim / t.n;
    const double var = t.n > 1 ? std::max(0.0, (t.sre2 - t.n * s.mean * s.mean) / (t.n - 1)) : 0.0;
    s.stderr_ = std::sqrt(var / t.n);
    s.hoeffding = bound * std::sqrt(2 * std::log(2 / vartheta) / t.n);
    return s;
}

static PoolStats stream_pool(const ShotEngine& eng, bool numerator, long long shots, std::uint64_t seed,
                             bool parallel, bool sample_outcomes, double omega, double vartheta,
                             std::vector<ShotRecord>* keep) {
    if (shots < 1) throw std::invalid_argument("shot count must be positive");
    const long long chunks = (shots + ShotEngine::kChunk - 1) / ShotEngine::kChunk;
    std::vector<Partial> parts(chunks);
    if (keep) keep->assign(shots, ShotRecord{});
    for_each_chunk(shots, seed, numerator ? 1 : 2, parallel, [&](long long c, Rng& rng, long long b, long long e) {
        Partial p;
        for (long long s = b; s < e; ++s) {
            ShotRecord r = numerator ? eng.shoot_N(rng, sample_outcomes) : eng.shoot_D(rng, sample_outcomes);
            const cplx v = r.value(omega);
            p.sre += v.real();
            p.sim += v.imag();
            p.sre2 += v.real() * v.real();
            ++p.n;
            if (keep) (*keep)[s] = r;
        }
        parts[c] = p;
    });
    return finish(parts, numerator ? eng.bound_N() : eng.bound_D(), vartheta);
}

PoolStats pool_stats(const std::vector<ShotRecord>& recs, double omega, double bound, double vartheta) {
    if (recs.empty()) throw std::invalid_argument("no shot records");
    Partial p;
    for (const auto& r : recs) {
        const cplx v = r.value(omega);
        p.sre += v.real();
        p.sim += v.imag();
        p.sre2 += v.real() * v.real();
        ++p.n;
    }
    return finish({p}, bound, vartheta);
}

// ---- reports ---------------------------------------------------------------------

static void fill_ratio(EstimateReport& r) {
    r.ratio = r.N_hat.real() / r.D_hat;
    r.stderr_ratio = std::sqrt(r.stderr_N * r.stderr_N + r.ratio * r.ratio * r.stderr_D * r.stderr_D) /
                     std::abs(r.D_hat);
    r.unstable = std::abs(r.D_hat) < 10 * r.stderr_D || r.D_hat == 0.0;
}

EstimateReport accumulate(const std::vector<ShotRecord>& num, const std::vector<ShotRecord>& den,
                          const FilterPlan& plan, double omega, double bound_N, double bound_D, double vartheta) {
    if (num.empty() || den.empty()) throw std::invalid_argument("accumulate needs nonempty shot pools");
    const PoolStats n = pool_stats(num, omega, bound_N, vartheta);
    const PoolStats d = pool_stats(den, omega, bound_D, vartheta);
    EstimateReport r;
    r.plan = plan;
    r.plan.omega = omega;
    r.N_hat = cplx(n.mean, n.mean_im);
    r.D_hat = d.mean;
    r.stderr_N = n.stderr_;
    r.stderr_D = d.stderr_;
    r.hoeffding_N = n.hoeffding;
    r.hoeffding_D = d.hoeffding;
    r.shots_N = n.shots;
    r.shots_D = d.shots;
    fill_ratio(r);
    return r;
}

std::vector<double> accumulate_D_grid(const std::vector<ShotRecord>& den, const std::vector<double>& grid) {
    if (den.empty()) throw std::invalid_argument("no shot records");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double w : grid) {
        double s = 0;
        for (const auto& r : den) s += r.value(w).real();
        out.push_back(s / den.size());
    }
    return out;
}

std::string EstimateReport::text() const {
    std::ostringstream os;
    os << "path: " << to_string(path) << "\n";
    os << plan.describe();
    os << fmt::format("N_hat = {:.10g} {:+.3g}i  stderr {:.3g}  hoeffding {:.3g}  shots {}\n", N_hat.real(),
                      N_hat.imag(), stderr_N, hoeffding_N, shots_N);
    os << fmt::format("D_hat = {:.10g}  stderr {:.3g}  hoeffding {:.3g}  shots {}\n", D_hat, stderr_D, hoeffding_D,
                      shots_D);
    os << fmt::format("ratio = {:.10g}  stderr {:.3g}{}\n", ratio, stderr_ratio, unstable ? "  UNSTABLE" : "");
    for (std::size_t i = 0; i < D_grid.size(); ++i)
        os << fmt::format("  D({:.6g}) = {:.6g}\n", omega_grid[i], D_grid[i]);
    return os.str();
}

std::string EstimateReport::csv_header() {
    return "path,omega,re_N,im_N,D,ratio,stderr_N,stderr_D,stderr_ratio,hoeffding_N,hoeffding_D,shots_N,shots_D,"
           "unstable";
}

std::string EstimateReport::csv_row() const {
    return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{}",
                       to_string(path), plan.omega, N_hat.real(), N_hat.imag(), D_hat, ratio, stderr_N, stderr_D,
                       stderr_ratio, hoeffding_N, hoeffding_D, shots_N, shots_D, unstable ? 1 : 0);
}

// ---- quadrature ---------------------------------------------------------------------

// psi <- U_trunc(t) psi, with the truncated remainder applied densely
static void apply_truncated(const FilterLcu& f, double t, int mu_scale, StateVector& psi) {
    const long long nu = f.segments(t, mu_scale);
    const double m = t / double(nu);
    const Eigen::MatrixXcd V = f.table().dense_truncated(m);
    Eigen::Map<Eigen::VectorXcd> v(psi.amps.data(), psi.amps.size());
    Eigen::VectorXcd tmp(psi.amps.size());
    for (long long q = 0; q < nu; ++q) {
        f.trotter().apply(psi, m);
        tmp.noalias() = V * v;
        v = tmp;
    }
    v *= std::exp(cplx(0, -f.offset() * t));
}

AnalyticND analytic_N_and_D(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O,
                            const FilterPlan& plan, int npts) {
    if (H.n() > kMaxDenseQubits) throw std::invalid_argument("analytic path limited to small systems");
    FilterLcu f(H, plan);
    const double tau = plan.tau, w = plan.omega;
    AnalyticND out;
    StateVector phi(psi0.n, std::vector<cplx>(psi0.dim(), 0.0));
    for (auto [x, wt] : segment_quadrature(f, plan.x_c, npts, 1)) {
        StateVector s = psi0;
        apply_truncated(f, tau * x, 1, s);
        const cplx c = wt * gaussian_density(x) * std::exp(cplx(0, tau * x * w));
        for (std::size_t i = 0; i < s.dim(); ++i) phi.amps[i] += c * s.amps[i];
    }
    out.N = overlap(phi, O, phi);
    out.D_norm = inner(phi, phi);
    const double Zc = truncated_mass(plan.x_c);
    for (auto [x, wt] : segment_quadrature(f, 2 * plan.x_c, npts, 2)) {
        StateVector s = psi0;
        apply_truncated(f, tau * x, 2, s);
        out.D += Zc * Zc * wt * difference_density(x, plan.x_c) * std::exp(cplx(0, tau * x * w)) * inner(psi0, s);
    }
    return out;
}

std::vector<double> analytic_D_curve(const Hamiltonian& H, const StateVector& psi0, const FilterPlan& plan,
                                     const std::vector<double>& grid, int npts) {
    if (H.n() > kMaxDenseQubits) throw std::invalid_argument("analytic path limited to small systems");
    FilterLcu f(H, plan);
    const double Zc = truncated_mass(plan.x_c);
    std::vector<std::pair<double, cplx>> nodes;
    for (auto [x, wt] : segment_quadrature(f, 2 * plan.x_c, npts, 2)) {
        StateVector s = psi0;
        apply_truncated(f, plan.tau * x, 2, s);
        nodes.emplace_back(x, Zc * Zc * wt * difference_density(x, plan.x_c) * inner(psi0, s));
    }
    std::vector<double> out;
    for (double w : grid) {
        cplx acc = 0;
        for (auto [x, c] : nodes) acc += c * std::exp(cplx(0, plan.tau * x * w));
        out.push_back(acc.real());
    }
    return out;
}

// ---- drivers -------------------------------------------------------------------------

ObservableResult estimate_observable(const Hamiltonian& H, const StateVector& psi0, const Hamiltonian& O,
                                     const FilterPlan& plan, const ShotOptions& opt,
                                     std::vector<ShotRecord>* num_out, std::vector<ShotRecord>* den_out) {
    ObservableResult res;
    EstimateReport& r = res.report;
    r.plan = plan;
    r.path = opt.path;
    if (opt.path == EstimatorPath::analytic) {
        const AnalyticND a = analytic_N_and_D(H, psi0, O, plan);
        r.N_hat = a.N;
        r.D_hat = a.D.real();
        r.ratio = a.N.real() / a.D.real();
        r.unstable = r.D_hat == 0.0;
        res.value = r.ratio;
        if (r.unstable) throw UnstableRatio("denominator vanishes");
        return res;
    }
    const ShotEngine eng(H, psi0, O, plan, opt.fixed_c);
    const long long shots = opt.shots_override > 0 ? opt.shots_override : plan.N_s;
    const bool sample = opt.path == EstimatorPath::sampled;
    const double vt = opt.vartheta;
    const PoolStats n = stream_pool(eng, true, shots, opt.seed, opt.parallel, sample, plan.omega, vt, num_out);
    const PoolStats d = stream_pool(eng, false, shots, opt.seed, opt.parallel, sample, plan.omega, vt, den_out);
    r.N_hat = cplx(n.mean, n.mean_im);
    r.D_hat = d.mean;
    r.stderr_N = n.stderr_;
    r.stderr_D = d.stderr_;
    r.hoeffding_N = n.hoeffding;
    r.hoeffding_D = d.hoeffding;
    r.shots_N = n.shots;
    r.shots_D = d.shots;
    fill_ratio(r);
    res.value = r.ratio;
    const double denom = std::abs(r.D_hat) - r.hoeffding_D;
    res.error = denom > 0 ? (r.hoeffding_N + std::abs(r.ratio) * r.hoeffding_D) / denom
                          : std::numeric_limits<double>::infinity();
    return res;
}

std::size_t peak_index(const std::vector<double>& D) { return argmax_lowest(D); }

EnergySearchResult search_eigenenergy(const Hamiltonian& H, const StateVector& psi0, const FilterPlan& plan,
                                      const ShotOptions& opt) {
    if (plan.omega_grid.empty()) throw std::invalid_argument("plan has no energy grid");
    EnergySearchResult res;
    res.grid = plan.omega_grid;
    if (opt.path == EstimatorPath::analytic) {
        res.D = analytic_D_curve(H, psi0, plan, res.grid);
        res.index = peak_index(res.D);
        res.E_hat = res.grid[res.index];
        return res;
    }
    Hamiltonian I(H.n(), {PauliTerm{1.0, PauliString::identity(H.n())}});
    const ShotEngine eng(H, psi0, I, plan, opt.fixed_c);
    const long long shots = opt.shots_override > 0 ? opt.shots_override : plan.N_s;
    const auto recs = eng.run_pool(false, shots, opt.seed, opt.parallel, opt.path == EstimatorPath::sampled);
    res.D = accumulate_D_grid(recs, res.grid);
    res.index = peak_index(res.D);
    res.E_hat = res.grid[res.index];
    res.shots = shots;
    res.stderr_ = pool_stats(recs, res.E_hat, eng.bound_D(), opt.vartheta).stderr_;
    if (!(res.D[res.index] >= 3 * res.stderr_))
        throw NoPeak(fmt::format("no detectable peak in window: max D_hat {:.3g} below 3 stderr {:.3g}",
                                 res.D[res.index], 3 * res.stderr_));
    return res;
}

// ---- ancilla-free scheme ----------------------------------------------------------------

static bool conserves_number(const BasisOp& op) { return op.x == 0; }

AncillaFreeEstimate ancilla_free_amplitude_phase(const StateVector& psi0, const CircuitInstance& inst,
                                                 const TrotterCircuit& trotter, long long shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("shot count must be positive");
    for (const auto& t : trotter.terms())
        if (!conserves_number(t.op)) throw std::invalid_argument("ancilla-free scheme needs symmetry-basis terms");
    for (const auto& w : inst.segments)
        if (w.kind != Compensation::Kind::identity && !conserves_number(w.op))
            throw std::invalid_argument("ancilla-free scheme needs symmetry-basis compensation");
    if (std::norm(psi0.amps[0]) > 1e-12)
        throw std::invalid_argument("reference not in an orthogonal sector: initial state overlaps the vacuum");
    const auto hw = hamming_weight_distribution(psi0);
    int sectors = 0;
    for (double p : hw) sectors += p > 1e-12;
    if (sectors != 1) throw std::invalid_argument("initial state is not a particle-number eigenstate");

    AncillaFreeEstimate est;
    const StateVector out = run_instance(psi0, inst, trotter);
    const cplx z = inner(psi0, out);
    const StateVector vac = run_instance(StateVector(psi0.n, 0), inst, trotter);
    est.reference_phase = vac.amps[0];
    const cplx zr = std::conj(est.reference_phase) * z;  // e^{-i alpha} z

    auto freq = [&](double p) {
        std::binomial_distribution<long long> bin(shots, std::clamp(p, 0.0, 1.0));
        return double(bin(rng)) / double(shots);
    };
    const double p_amp = freq(std::norm(z));
    est.r = std::sqrt(p_amp);
    if (!(est.r > 0)) throw std::runtime_error("phase unrecoverable: amplitude estimate is zero");
    est.stderr_r = std::sqrt(p_amp * (1 - p_amp) / shots + 1.0 / (double(shots) * shots)) / (2 * est.r);
    if (est.r < 3 * est.stderr_r) throw std::runtime_error("phase unrecoverable: amplitude below 3 stderr");
    // |<+|U|+>|^2 and |<+i|U|+>|^2 with |+> = (|vac> + |psi0>)/sqrt2
    const double base = 1 + std::norm(z);
    const double pR = freq(0.25 * (base + 2 * zr.real()));
    const double pI = freq(0.25 * (base + 2 * zr.imag()));
    const double b_hat = 0.5 * (1 + p_amp);
    const double re = 2 * pR - b_hat, im = 2 * pI - b_hat;
    est.theta = std::arg(est.reference_phase) + std::atan2(im, re);
    est.theta = std::remainder(est.theta, 2 * std::numbers::pi);
    est.value = std::polar(est.r, est.theta);
    return est;
}

std::string shot_csv_header() { return "shot_id,t_i,t_j,re_d,im_d,l"; }

void write_shot_csv(std::ostream& os, const std::vector<ShotRecord>& recs, long long id_offset) {
    os << shot_csv_header() << "\n";
    long long id = id_offset;
    for (const auto& r : recs)
        os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", id++, r.t_i, r.t_j, r.d_hat.real(),
                          r.d_hat.imag(), r.l);
}

}  // namespace rlcu
