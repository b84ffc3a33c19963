// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "rlcu/estimator.hpp"
#include "rlcu/resources.hpp"

using namespace rlcu;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Hamiltonian xxz(int n) {
    ModelParams p;
    p.Jx = -1;
    p.Jy = -1;
    p.Jz = -2;
    return build_model("heisenberg_xxz", n, p);
}

Hamiltonian z1z2(int n) {
    std::string l(n, 'I');
    l[1] = l[2] = 'Z';
    return Hamiltonian(n, {{1.0, PauliString::from_label(l)}});
}

StateVector as_state(const CVector& v, int n) { return StateVector(n, std::vector<cplx>(v.data(), v.data() + v.size())); }

Eigen::MatrixXcd expmi(const Eigen::MatrixXcd& H, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXcd ph = (es.eigenvalues().array() * -t).unaryExpr([](double a) { return std::exp(cplx(0, a)); });
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

double opnorm(const Eigen::MatrixXcd& m) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0); }

// ---- 1 ------------------------------------------------------------------------------------

Outcome filter_correctness() {
    double worst = 0, worst_peak = 0;
    for (const char* model : {"xxz", "tfim"})
        for (int n : {2, 4, 6}) {
            const Hamiltonian H = std::string(model) == "xxz" ? xxz(n) : build_model("tfim", n);
            const EigenSystem es = diagonalize(H);
            const CVector psi = default_initial_state(es);
            const Eigen::MatrixXcd Hm = dense_matrix(H);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(Hm);
            const double Delta = es.gap(0), E0 = es.energies(0);
            for (double tau : {0.3, 1.0}) {
                const double om = E0 + 0.2;
                Eigen::VectorXd g = (-(tau * (ref.eigenvalues().array() - om)).square()).exp();
                Eigen::MatrixXcd G = ref.eigenvectors() * g.cast<cplx>().asDiagonal() * ref.eigenvectors().adjoint();
                worst = std::max(worst, (apply_filter_exact(es, psi, tau, om) - G * psi).norm());
            }
            const double kappa = Delta / 10;
            const double tau = 2 / Delta * std::sqrt(std::log(2 / 0.02));
            const auto grid = uniform_grid(E0 - 2 * Delta, E0 + Delta / 2, kappa / 4);
            const auto D = exact_D_curve(es, psi, tau, grid);
            worst_peak = std::max(worst_peak, std::abs(grid[argmax_lowest(D)] - E0) / kappa);
        }
    return {worst <= 1e-10 && worst_peak <= 1,
            fmt::format("max |filter - eigen exp| = {:.2e}; max |argmax - E0| / kappa = {:.3f}", worst, worst_peak)};
}

// ---- 2 ------------------------------------------------------------------------------------

Outcome certification() {
    const Hamiltonian H = build_model("tfim", 2);
    const EigenSystem es = diagonalize(H);
    std::string detail;
    bool pass = true;
    for (int k : {0, 1}) {
        FilterPlan p;
        p.k = k;
        const double eps_c = 0.01;
        p.tau = std::sqrt(std::log(2 / eps_c)) / es.gap(0);
        p.x_c = 2 * std::sqrt(std::log(2 / eps_c));
        p.omega = es.energies(0);
        p.lambda = H.one_norm();
        p.nu_c = double(segment_count(p.lambda, p.t_c(), k));
        p.s_c = truncation_order(p.nu_c, eps_c, k, p.lambda * p.t_c());
        p.eps_sc = eps_c;
        const Certificate c = certify_formula(H, p);
        const bool ok = c.dense_error >= 0 && c.dense_error <= c.eps_xc + c.eps_sc;
        pass &= ok;
        detail += fmt::format("{}k={}: error {:.3e} <= budget {:.3e} (s_c={}, mu={:.4f})", detail.empty() ? "" : "; ", k, c.dense_error,
                              c.eps_xc + c.eps_sc, p.s_c, c.mu_total);
    }
    return {pass, detail};
}

// ---- 3 ------------------------------------------------------------------------------------

Outcome vanishing_orders() {
    const Hamiltonian H = build_model("tfim", 2);
    const int k = 1;
    TrotterCircuit tc(H, k);
    CompensationTable tab(2, tc.terms(), tc.schedule(), k, 4 * k + 1);
    const double lam = tab.lambda();
    bool pass = true;
    double worst = 0;
    for (int s = 1; s <= 2 * k; ++s) {
        const double r = tab.vanishing_norms()[s - 1] / std::pow(lam, s);
        worst = std::max(worst, r);
        pass &= r <= 1e-10;
    }
    const Eigen::MatrixXcd Hm = dense_matrix(H);
    auto trotter = [&](double m) {
        Eigen::MatrixXcd S(4, 4);
        for (int b = 0; b < 4; ++b) {
            StateVector e(2, b);
            tc.apply(e, m);
            for (int r = 0; r < 4; ++r) S(r, b) = e.amps[r];
        }
        return S;
    };
    auto err = [&](double m) { return opnorm(tab.dense_truncated(m) - expmi(Hm, m) * trotter(m).adjoint()); };
    double min_ratio = INFINITY;
    for (double m : {0.4, 0.2, 0.1}) min_ratio = std::min(min_ratio, err(m) / err(m / 2));
    const double need = std::pow(2.0, 2 * k + 2);
    pass &= min_ratio >= need;
    return {pass, fmt::format("max ||F_s||_1 / lambda^s = {:.2e}; min remainder ratio on halving m = {:.1f} (need {})",
                              worst, min_ratio, need)};
}

// ---- 4 ------------------------------------------------------------------------------------

FilterPlan property_plan(const Hamiltonian& H, const EigenSystem& es, double eta, double eps) {
    PropertyInputs in;
    in.Delta = es.gap(0);
    in.eta = eta;
    in.eps = eps;
    in.lambda = H.one_norm();
    in.basis = Basis::symmetry;
    in.mode = SegmentMode::tight;
    in.vartheta = 0.1;
    FilterPlan p = parameter_selection(in);
    p.omega = es.energies(0);
    return p;
}

Outcome estimator_coverage(int reps) {
    const int n = 4;
    const Hamiltonian H = xxz(n), O = z1z2(n);
    const EigenSystem es = diagonalize(H);
    const CVector psi = default_initial_state(es);
    const StateVector s0 = as_state(psi, n);
    const double eta = es.overlap(psi, 0);

    // quadrature against the exact filter at the tightest plan used elsewhere
    const FilterPlan tight = property_plan(H, es, eta, 0.05);
    const AnalyticND a = analytic_N_and_D(H, s0, O, tight);
    const NDValue ex = exact_N_and_D(es, psi, O, tight.tau, tight.omega);
    const double budget = tight.eps_tau + tight.eps_c;
    const double dN = std::abs(a.N.real() - ex.N), dD = std::abs(a.D.real() - ex.D);
    bool pass = dN <= budget && dD <= budget;

    // coverage of the sampled numerator at the plan's N_s
    const FilterPlan p = property_plan(H, es, eta, 0.5);
    const double N_ref = analytic_N_and_D(H, s0, O, p).N.real();
    const double N_exact = exact_N_and_D(es, psi, O, p.tau, p.omega).N;
    const ShotEngine eng(H, s0, O, p);
    int hits = 0;
    for (int r = 0; r < reps; ++r) {
        const auto recs = eng.run_pool(true, p.N_s, 1000 + r, true);
        const PoolStats st = pool_stats(recs, p.omega, eng.bound_N(), 0.1);
        hits += std::abs(st.mean - N_ref) <= p.eps_n;
    }
    const double frac = double(hits) / reps;
    pass &= frac >= 0.85;
    return {pass, fmt::format("quadrature |dN| {:.2e} |dD| {:.2e} <= {:.2e}; |N_hat - N| <= eps_n={:.4f} in {}/{} "
                              "({:.1f}%) at eps=0.5, N_s={} (exact N {:.5f}, estimator mean {:.5f})",
                              dN, dD, budget, p.eps_n, hits, reps, 100 * frac, p.N_s, N_exact, N_ref)};
}

// ---- 5 ------------------------------------------------------------------------------------

Outcome end_to_end(bool full, long long diag_shots, double budget_s) {
    struct Case {
        int n;
        Hamiltonian H, O;
        EigenSystem es;
        CVector psi;
        FilterPlan plan;
        double target;
    };
    std::vector<Case> cases;
    for (int n : {4, 6}) {
        Case c{n, xxz(n), z1z2(n), {}, {}, {}, 0};
        c.es = diagonalize(c.H);
        c.psi = default_initial_state(c.es);
        c.plan = property_plan(c.H, c.es, c.es.overlap(c.psi, 0), 0.05);
        const CVector u0 = c.es.vectors.col(0);
        c.target = (u0.adjoint() * dense_matrix(c.O) * u0)(0, 0).real();
        cases.push_back(std::move(c));
    }
    const int seeds = 50;
    // measured throughput on a short calibration run per size
    double projected = 0;
    std::string detail;
    for (auto& c : cases) {
        const StateVector s0 = as_state(c.psi, c.n);
        const ShotEngine eng(c.H, s0, c.O, c.plan);
        const long long cal = 2 * ShotEngine::kChunk;
        const auto t0 = std::chrono::steady_clock::now();
        eng.run_pool(true, cal, 7, true);
        eng.run_pool(false, cal, 7, true);
        const double per = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / (2.0 * cal);
        projected += per * 2.0 * double(c.plan.N_s) * seeds;
        detail += fmt::format("n={}: N_s={} per pool, {:.1f} us/shot; ", c.n, c.plan.N_s, per * 1e6);
    }
    detail += fmt::format("projected {:.0f} s for {} seeds vs budget {:.0f} s", projected, seeds, budget_s);

    if (diag_shots > 0) {
        // reduced-shot diagnostic; informational only
        for (auto& c : cases) {
            const StateVector s0 = as_state(c.psi, c.n);
            ShotOptions opt;
            opt.shots_override = diag_shots;
            int hits = 0;
            const int ds = 10;
            for (int s = 0; s < ds; ++s) {
                opt.seed = 500 + s;
                hits += std::abs(estimate_observable(c.H, s0, c.O, c.plan, opt).value - c.target) <= 0.05;
            }
            detail += fmt::format("; diagnostic n={} with {} shots/pool: {}/{} within 0.05", c.n, diag_shots, hits, ds);
        }
    }
    if (!full) return {false, "not run: " + detail};

    int hits = 0, total = 0;
    for (auto& c : cases) {
        const StateVector s0 = as_state(c.psi, c.n);
        int h = 0;
        for (int s = 0; s < seeds; ++s) {
            ShotOptions opt;
            opt.seed = 100 + s;
            h += std::abs(estimate_observable(c.H, s0, c.O, c.plan, opt).value - c.target) <= 0.05;
        }
        detail += fmt::format("; n={}: {}/{} within 0.05", c.n, h, seeds);
        hits += h >= 0.9 * seeds;
        ++total;
    }
    return {hits == total && projected <= budget_s, detail};
}

// ---- 6 ------------------------------------------------------------------------------------

Outcome headline() {
    const CostStats st = CostStats::of(build_model("heisenberg_xxz", 20));
    TaskSpec s;
    s.eps = 1e-2;
    s.Delta = 0.382;
    s.eta = 0.5;
    s.k = 1;
    s.lattice = true;
    const MethodCost c = rlcu_cost(st, s);
    const bool pass = c.per_circuit.cnot >= 1e5 && c.per_circuit.cnot <= 1e6 && c.per_circuit.t >= 2e6 &&
                      c.per_circuit.t <= 2e7;
    return {pass, fmt::format("eps=1e-2, lattice segments nu={:.0f}, s_c={}: CNOT {:.3e}, T {:.3e}, Rz {:.3e}", c.nu,
                              c.s_c, c.per_circuit.cnot, c.per_circuit.t, c.per_circuit.rz)};
}

// ---- 7 ------------------------------------------------------------------------------------

Outcome goldens() {
    int bad = 0;
    auto eq = [&](double a, double b) { bad += a != b; };
    const auto be = block_encoding_costs(8, 5, std::ldexp(1.0, -8));
    eq(be.select_x.cnot, 43);
    eq(be.select_x.t, 28);
    eq(be.select_x.hadamard, 14);
    eq(be.reflection.cnot, 18);
    eq(be.reflection.t, 23);
    eq(be.reflection.ancilla, 1);
    eq(be.prepare.cnot, 230);
    eq(be.prepare.t, 88);
    // ceil((e/0.1) ln(32 pi^-1/2 1e3)) = 267, already odd
    eq(qsp_degree(0.05, 1e-3), 267);
    // ceil(log2(sqrt2 pi 10 / 0.02)) = 12
    const auto q = qpe_qw_params(10, 1e-2, 8);
    eq(q.k, 12);
    eq(q.d, 4096);
    eq(rz_to_t(std::ldexp(1.0, -10)), 30);
    eq(rz_to_t(std::ldexp(1.0, -10), RzSynthesis::rus), 21);
    return {bad == 0, fmt::format("{} of 13 values differ", bad)};
}

// ---- 8 ------------------------------------------------------------------------------------

Outcome slopes() {
    bool pass = true;
    std::string detail;
    for (int k : {0, 1}) {
        SweepConfig cfg;
        cfg.axis = SweepAxis::Delta;
        cfg.values = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
        cfg.methods = {"rlcu"};
        cfg.spec.k = k;
        cfg.spec.eps = 1e-2;
        cfg.spec.eta = 0.5;
        const double s = sweep_slopes(run_sweep(cfg), cfg.axis).at(0).slope;
        const double want = 1 + 1.0 / (4 * k + 1);
        pass &= std::abs(s - want) <= 0.05;
        detail += fmt::format("rlcu k={} slope {:.4f} (want {:.4f}); ", k, s, want);
    }
    SweepConfig cfg;
    cfg.axis = SweepAxis::eps;
    cfg.values = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
    cfg.methods = {"qpe-trotter"};
    cfg.spec.task = Task::energy;
    cfg.spec.k = 1;
    cfg.spec.Delta = 0.382;
    cfg.spec.eta = 0.5;
    const double s = sweep_slopes(run_sweep(cfg), cfg.axis).at(0).slope;
    pass &= std::abs(s - 2.0) <= 0.1;
    detail += fmt::format("qpe-trotter k=1 slope vs 1/eps {:.4f} (want 2)", s);
    return {pass, detail};
}

// ---- 9 ------------------------------------------------------------------------------------

Outcome symmetry_conservation() {
    const int n = 4;
    const Hamiltonian H = xxz(n);
    const EigenSystem es = diagonalize(H);
    FilterPlan p = property_plan(H, es, es.overlap(default_initial_state(es), 0), 0.05);
    const FilterLcu f(H, p);
    Rng rng = make_stream(2024, 9);
    std::normal_distribution<double> g;
    std::vector<cplx> a(1u << n);
    for (auto& x : a) x = cplx(g(rng), g(rng));
    StateVector psi(n, a);
    const double nrm = psi.norm();
    for (auto& x : psi.amps) x /= nrm;
    const double z0 = total_z_expectation(psi);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const double t = sample_time(rng, p.tau, p.x_c);
        const auto inst = f.sample_instance(t, rng);
        worst = std::max(worst, std::abs(total_z_expectation(run_instance(psi, inst, f.trotter())) - z0));
    }
    return {worst <= 1e-10, fmt::format("max |<sum Z> change| over 10^4 instances = {:.2e}", worst)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria 1-9"};
    std::vector<int> only;
    bool full = false;
    int reps = 200;
    long long diag = 0;
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    app.add_flag("--full", full, "run criterion 5 at the prescribed shot count regardless of projected runtime");
    app.add_option("--diagnostic-shots", diag, "criterion 5: reduced-shot diagnostic, reported but never scored");
    app.add_option("--reps", reps, "criterion 4 repetitions");
    CLI11_PARSE(app, argc, argv);

    const std::set<int> want(only.begin(), only.end());
    const std::vector<std::pair<double, std::function<Outcome()>>> crit{
        {10, filter_correctness},
        {60, certification},
        {30, vanishing_orders},
        {300, [&] { return estimator_coverage(reps); }},
        {600, [&] { return end_to_end(full, diag, 600); }},
        {1, headline},
        {1, goldens},
        {10, slopes},
        {60, symmetry_conservation},
    };
    int failed = 0;
    for (std::size_t i = 0; i < crit.size(); ++i) {
        const int id = int(i) + 1;
        if (!want.empty() && !want.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = crit[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // criterion 5 judges its own projected runtime
        const bool in_time = id == 5 || dt <= crit[i].first;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::cout << fmt::format("criterion {}: {}  [{:.1f} s / {:.0f} s] {}{}\n", id, pass ? "PASS" : "FAIL", dt,
                                 crit[i].first, o.detail, in_time ? "" : " (over time budget)")
                  << std::flush;
    }
    return failed ? 1 : 0;
}
