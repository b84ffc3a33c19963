#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rlcu/estimator.hpp"
#include "rlcu/resources.hpp"

using namespace rlcu;

// L=10, wt=20, wt_m=2, n=5, lambda=10, Lambda=1
static const CostStats kToy{5, 10, 20, 2, 10.0, 1.0};

static TaskSpec toy_spec(Task task = Task::property) {
    TaskSpec s;
    s.task = task;
    s.eps = 1e-2;
    s.Delta = 0.5;
    s.eta = 0.5;
    s.k = 1;
    return s;
}

TEST_CASE("Rz synthesis counts") {
    CHECK(rz_to_t(std::ldexp(1.0, -10)) == 30);
    CHECK(rz_to_t(std::ldexp(1.0, -10), RzSynthesis::rus) == 21);
    CHECK(rz_to_t(0.5) == 3);
    CHECK(rz_to_t(0.5, RzSynthesis::rus) == 11);
    int prev = 0;
    for (double e = 0.5; e > 1e-12; e /= 3) {
        CHECK(rz_to_t(e) >= prev);
        prev = rz_to_t(e);
    }
    CHECK_THROWS(rz_to_t(0));
    CHECK_THROWS(rz_to_t(1));
}

TEST_CASE("block encoding sub-circuits") {
    const auto c = block_encoding_costs(8, 5, std::ldexp(1.0, -8), 12);
    CHECK(c.n_L == 3);
    CHECK(c.n_AE == 8);
    CHECK(c.select_x.cnot == 43);
    CHECK(c.select_x.t == 28);
    CHECK(c.select_x.hadamard == 14);
    CHECK(c.reflection.cnot == 18);
    CHECK(c.reflection.t == 23);
    CHECK(c.reflection.ancilla == 1);
    CHECK(c.prepare.cnot == 230);
    CHECK(c.prepare.t == 88);
    CHECK(c.prepare.ancilla == 2 * 8 + 2 * 3 + 1);
    CHECK(c.select_lattice.cnot == 5 * 7 + 12);
    CHECK(c.select_lattice.t == 28);
    CHECK(block_encoding_costs(8, 6, 0.01).reflection.ancilla == 2);
    CHECK_THROWS(block_encoding_costs(1, 5, 0.1));
}

TEST_CASE("ceil_log2 at powers of two") {
    CHECK(ceil_log2(8) == 3);
    CHECK(ceil_log2(9) == 4);
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(256) == 8);
    CHECK(ceil_log2(std::nextafter(256.0, 300.0)) == 9);
}

TEST_CASE("sign polynomial degree") {
    CHECK(qsp_degree(0.05, 1e-3) == 267);
    for (double d : {0.3, 0.05, 0.01, 0.002})
        for (double e : {1e-2, 1e-3, 1e-6}) CHECK(qsp_degree(d, e) % 2 == 1);
}

TEST_CASE("qubitized walk phase register") {
    const auto q = qpe_qw_params(10, 1e-2, 8);
    CHECK(q.k == 12);
    CHECK(q.d == 4096);
    CHECK(q.eps_AE == doctest::Approx(1e-4 / (std::numbers::pi * 80)));
    for (double lam : {3.0, 10.0, 77.0}) CHECK(qpe_qw_params(2 * lam, 1e-3, 8).k == qpe_qw_params(lam, 1e-3, 8).k + 1);
}

TEST_CASE("Trotter segment search") {
    // linear-scan reference values
    CHECK(trotter_segments(6, 1, 10, 1e-3, 2, false) == 5194);
    CHECK(trotter_segments(6, 1, 10, 1e-3, 2, true) == 6966);
    CHECK(trotter_segments(6, 1, 1e-3, 10, 1, false) == 1);
    // halving eps grows nu by about 2^(1/2k)
    for (int k : {1, 2}) {
        const double a = double(trotter_segments(20, 1, 100, 1e-6, k, false));
        const double b = double(trotter_segments(20, 1, 100, 5e-7, k, false));
        CHECK(b / a == doctest::Approx(std::pow(2.0, 1.0 / (2 * k))).epsilon(0.01));
    }
    CHECK_THROWS(trotter_segments(6, 1, 10, 1e-3, 0, false));
}

TEST_CASE("rlcu cost on toy statistics") {
    const auto c = rlcu_cost(kToy, toy_spec());
    CHECK(c.nu == 2888);
    CHECK(c.s_c == 6);
    CHECK(c.per_circuit.cnot == 283004);
    CHECK(c.per_circuit.rz == 69312);
    CHECK(c.per_circuit.t == 5475648);

    // one segment
    TaskSpec easy = toy_spec();
    easy.Delta = 1e6;
    easy.eps = 0.9;
    const auto one = rlcu_cost(kToy, easy);
    CHECK(one.nu == 1);
    CHECK(one.per_circuit.cnot == 4 * 20 + 4 * 2 + 2 * std::min(5, one.s_c * 2) - 2 * 10);
}

TEST_CASE("rlcu segment count matches the estimator plan") {
    for (int k : {0, 1, 2})
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            TaskSpec s = toy_spec();
            s.k = k;
            s.eps = eps;
            PropertyInputs in;
            in.Delta = s.Delta;
            in.eta = s.eta;
            in.eps = eps;
            in.k = k;
            in.lambda = kToy.lambda;
            const auto plan = parameter_selection(in);
            const auto c = rlcu_cost(kToy, s);
            CHECK(c.nu == std::max(1.0, std::ceil(plan.nu_c)));
            CHECK(c.s_c == plan.s_c);
        }
}

TEST_CASE("vartheta changes only totals") {
    TaskSpec a = toy_spec(), b = toy_spec();
    a.include_sampling = b.include_sampling = true;
    a.vartheta = 0.1;
    b.vartheta = 0.01;
    const auto ca = rlcu_cost(kToy, a), cb = rlcu_cost(kToy, b);
    CHECK(ca.per_circuit.cnot == cb.per_circuit.cnot);
    CHECK(ca.per_circuit.t == cb.per_circuit.t);
    CHECK(cb.total.cnot > ca.total.cnot);
}

TEST_CASE("qpe with Trotter on toy statistics") {
    const auto c = qpe_trotter_cost(kToy, toy_spec(Task::energy));
    CHECK(c.nu == 2215633);
    CHECK(c.per_circuit.cnot == 200536208);
    CHECK(c.per_circuit.rz == 125335130);
    CHECK(c.per_circuit.t == 13912199430.0);
    // runtime inverse in eps: coarse eps gives fewer segments
    TaskSpec coarse = toy_spec(Task::energy);
    coarse.eps = 0.1;
    CHECK(qpe_trotter_cost(kToy, coarse).nu < c.nu);
    const auto p = qpe_trotter_cost(kToy, toy_spec());
    CHECK(p.total.cnot > p.per_circuit.cnot);
    CHECK_THROWS(qpe_trotter_cost(kToy, [] {
        auto s = toy_spec();
        s.k = 0;
        return s;
    }()));
}

TEST_CASE("qsp pipeline on toy statistics") {
    const auto c = qsp_cost(kToy, toy_spec());
    CHECK(c.degree == 817);
    CHECK(c.per_circuit.cnot == 1334978);
    CHECK(c.per_circuit.t == 1023701);
    CHECK(c.per_circuit.ancilla == 60);
    REQUIRE(c.steps.size() == 4);
    CHECK(c.steps.back().first == "amplitude_amplification");
    CHECK(c.steps.back().second.cnot > 0);
}

TEST_CASE("qpe with qubitized walk on toy statistics") {
    const auto c = qpe_qubitized_walk_cost(kToy, toy_spec());
    CHECK(c.degree == 4096);
    CHECK(c.per_circuit.cnot == 5031592);
    CHECK(c.per_circuit.t == 1515516);
    CHECK(c.per_circuit.ancilla == 53);
    CHECK(c.shots == 4);  // 1 / (eta Delta)
}

TEST_CASE("qetu model on toy statistics") {
    const auto c = qetu_cost(kToy, toy_spec());
    CHECK(c.degree == 817);
    CHECK(c.nu == 921);
    CHECK(c.per_circuit.cnot == 45149054);
    CHECK(c.per_circuit.rz == 15049957);
    CHECK(c.per_circuit.ancilla == 1);
    bool noted = false;
    for (const auto& n : c.per_circuit.notes) noted |= n.find("modelled prefactor") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("qetu Trotter segments double when eps shrinks by 2^2k") {
    // huge L Lambda t keeps nu in the asymptotic regime; compare at fixed degree
    for (int k : {1, 2}) {
        const double a = double(trotter_segments(50, 1, 200, 1e-6, k, false));
        const double b = double(trotter_segments(50, 1, 200, 1e-6 / std::pow(2.0, 2 * k), k, false));
        CHECK(b / a == doctest::Approx(2.0).epsilon(0.02));
    }
}

TEST_CASE("gaussian discretization") {
    const auto g = gaussian_discretization(1.0, 0.02);
    CHECK(g.b == doctest::Approx(0.9759684341390416));
    CHECK(g.N_m == doctest::Approx(4.397613593276566));
    CHECK(g.N_m_bound == doctest::Approx(2 / std::numbers::pi * std::log(100.0)));
    CHECK(g.b * g.N_m == doctest::Approx(g.x_c));
    // bound holds once Delta <= 1/2 and scales as 1/Delta
    for (double d : {0.5, 0.1, 0.01}) {
        const auto h = gaussian_discretization(d, 0.02);
        CHECK(h.N_m <= h.N_m_bound);
        CHECK(h.N_m_bound * d == doctest::Approx(g.N_m_bound));
    }
}

TEST_CASE("derivative search scaling") {
    // lambda=10, Delta=0.5, eta=0.5, kappa=0.05, vartheta=0.1, k=1
    const auto r = derivative_search_scaling(10, 0.5, 0.5, 0.05, 0.1, 1);
    CHECK(r.nu_c == doctest::Approx(1073.7151758284986).epsilon(1e-12));
    CHECK(r.N_s == doctest::Approx(1e4 * 4 * std::pow(std::log(800.0), 2) * std::log(10.0)));
    // Delta^4 kappa^-4 at fixed ratio, kappa^-4 log^2 at fixed Delta
    const auto h = derivative_search_scaling(10, 0.5, 0.5, 0.025, 0.1, 1);
    CHECK(h.N_s / r.N_s == doctest::Approx(16 * std::pow(std::log(3200.0) / std::log(800.0), 2)));
    CHECK(h.nu_c > r.nu_c);
}

TEST_CASE("gap model through the anchors") {
    CHECK(heisenberg_gap_fit(20) == doctest::Approx(0.382).epsilon(0.01));
    CHECK(heisenberg_gap_fit(50) == doctest::Approx(0.124).epsilon(0.01));
    CHECK(heisenberg_gap_fit(100) == doctest::Approx(0.041).epsilon(0.01));
    CHECK(heisenberg_gap_exponent() == doctest::Approx(0.355).epsilon(0.02));
    CHECK(heisenberg_gap_fit(30) < heisenberg_gap_fit(20));
}

TEST_CASE("headline anchor on the 20-site Heisenberg chain") {
    const auto st = CostStats::of(build_model("heisenberg_xxz", 20));
    TaskSpec s;
    s.eps = 1e-2;
    s.Delta = 0.382;
    s.eta = 0.5;
    s.k = 1;
    s.lattice = true;
    const auto c = rlcu_cost(st, s);
    CHECK(c.per_circuit.cnot >= 1e5);
    CHECK(c.per_circuit.cnot <= 1e6);
    CHECK(c.per_circuit.t >= 2e6);
    CHECK(c.per_circuit.t <= 2e7);
}

TEST_CASE("costs are monotone on random parameter grids") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 150; ++trial) {
        CostStats s;
        s.n = int(4 + U(g) * 40);
        s.L = int(4 + U(g) * 60);
        s.wt_m = int(1 + U(g) * 3);
        s.wt = int(s.L * (1 + U(g) * 2));
        s.Lambda = 0.5 + U(g) * 2;
        s.lambda = s.L * s.Lambda * (0.3 + 0.7 * U(g));
        TaskSpec sp;
        sp.eps = std::pow(10, -1 - 3 * U(g));
        sp.Delta = std::pow(10, -2 + 1.5 * U(g));
        sp.eta = 0.1 + 0.9 * U(g);
        sp.k = U(g) < 0.5 ? 1 : 2;
        sp.task = U(g) < 0.5 ? Task::property : Task::energy;
        for (const auto& m : known_methods()) {
            const auto base = method_cost(m, s, sp);
            auto check = [&](const MethodCost& c, bool up, const char* what) {
                INFO(m << " " << what << " trial " << trial);
                auto ok = [&](double x, double y) { return up ? y >= x * (1 - 1e-12) : y <= x * (1 + 1e-12); };
                CHECK(ok(base.per_circuit.cnot, c.per_circuit.cnot));
                CHECK(ok(base.per_circuit.t, c.per_circuit.t));
                CHECK(ok(base.per_circuit.rz, c.per_circuit.rz));
                CHECK(ok(base.total.cnot, c.total.cnot));
            };
            TaskSpec e = sp;
            e.eps *= 1.3;
            check(method_cost(m, s, e), false, "eps");
            TaskSpec d = sp;
            d.Delta *= 1.3;
            check(method_cost(m, s, d), false, "Delta");
            CostStats l = s;  // three more terms of the same mean weight
            l.L += 3;
            l.wt += 3 * ((s.wt + s.L - 1) / s.L);
            l.lambda += 1.5 * s.Lambda;
            check(method_cost(m, l, sp), true, "L");
            CostStats lam = s;
            lam.lambda *= 1.3;
            check(method_cost(m, lam, sp), true, "lambda");
            CostStats w = s;
            w.wt += 5;
            check(method_cost(m, w, sp), true, "wt");
        }
    }
}

TEST_CASE("formulas are reproducible") {
    for (const auto& m : known_methods()) {
        const auto a = method_cost(m, kToy, toy_spec()), b = method_cost(m, kToy, toy_spec());
        CHECK(a.per_circuit.cnot == b.per_circuit.cnot);
        CHECK(a.per_circuit.t == b.per_circuit.t);
        CHECK(a.total.cnot == b.total.cnot);
    }
    CHECK_THROWS(method_cost("qft", kToy, toy_spec()));
}

TEST_CASE("sweep slopes") {
    for (int k : {0, 1}) {
        SweepConfig cfg;
        cfg.axis = SweepAxis::Delta;
        cfg.values = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
        cfg.spec.k = k;
        const auto s = sweep_slopes(run_sweep(cfg), cfg.axis);
        REQUIRE(s.size() == 1);
        CHECK(s[0].slope == doctest::Approx(1 + 1.0 / (4 * k + 1)).epsilon(0.01));
    }
    SweepConfig cfg;
    cfg.axis = SweepAxis::eps;
    cfg.values = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    cfg.methods = {"qpe-trotter"};
    cfg.spec.task = Task::energy;
    cfg.spec.Delta = 0.382;
    const auto s = sweep_slopes(run_sweep(cfg), cfg.axis);
    CHECK(std::abs(s[0].slope - 2.0) < 0.1);
    cfg.methods = {};
    CHECK_THROWS(run_sweep(cfg));
}

TEST_CASE("sweep csv rows") {
    SweepConfig cfg;
    cfg.axis = SweepAxis::n;
    cfg.values = {8, 12};
    cfg.methods = {"rlcu", "qsp"};
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(sweep_csv_header() ==
          "method,n,L,wt,wt_m,lambda,Delta,eta,eps,k,nu,degree_d,shots,ancilla,cnot,t,rz,hadamard,notes");
    const auto row = sweep_csv_row(rows[0]);
    CHECK(row.rfind("rlcu,8,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') >= 18);
    CHECK(rows[0].spec.Delta == doctest::Approx(heisenberg_gap_fit(8)));
}
