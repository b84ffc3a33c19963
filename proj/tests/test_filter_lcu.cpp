#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>

#include "dense.hpp"
#include "models.hpp"
#include "rlcu/exact.hpp"
#include "rlcu/filter_lcu.hpp"

using namespace rlcu;

static dense::Mat op_dense(const BasisOp& o, int n) {
    const int d = 1 << n;
    dense::Mat m = dense::Mat::Zero(d, d);
    for (std::uint64_t b = 0; b < std::uint64_t(d); ++b) {
        std::uint64_t c = o.x ^ o.permute(b, n);
        m(c, b) = (std::popcount(o.z & c) & 1) ? -1.0 : 1.0;
    }
    return m;
}

static dense::Mat comp_dense(const Compensation& w, int n) {
    const int d = 1 << n;
    switch (w.kind) {
        case Compensation::Kind::identity: return dense::Mat::Identity(d, d);
        case Compensation::Kind::op: return op_dense(w.op, n);
        default: {
            dense::Mat G = w.h * op_dense(w.op, n);
            return std::cos(w.phi) * dense::Mat::Identity(d, d) + dense::cplx(0, std::sin(w.phi)) * G;
        }
    }
}

static dense::Mat trotter_dense(const TrotterCircuit& tc, double m) {
    const int d = 1 << tc.n();
    dense::Mat S(d, d);
    for (int b = 0; b < d; ++b) {
        StateVector e(tc.n(), b);
        tc.apply(e, m);
        for (int r = 0; r < d; ++r) S(r, b) = e.amps[r];
    }
    return S;
}

TEST_CASE("truncated gaussian sampling") {
    Rng rng = make_stream(1, 0);
    CHECK(sample_time(rng, 3.0, 0.0) == 0.0);
    CHECK(sample_time_pair_for_D(rng, 0.0) == 0.0);
    const int N = 1000000;
    double s = 0, s2 = 0, d = 0, d2 = 0;
    for (int i = 0; i < N; ++i) {
        double x = sample_truncated_gaussian(rng, 50.0);
        s += x, s2 += x * x;
        double y = sample_time_pair_for_D(rng, 50.0);
        d += y, d2 += y * y;
    }
    const double sd = std::sqrt(2.0);
    CHECK(std::abs(s / N) < 3 * sd / 1000);
    CHECK(s2 / N == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::abs(d / N) < 3 * 2.0 / 1000);
    CHECK(d2 / N == doctest::Approx(4.0).epsilon(0.02));

    // truncation respected; narrow windows use the uniform proposal
    for (int i = 0; i < 1000; ++i) {
        CHECK(std::abs(sample_truncated_gaussian(rng, 0.3)) <= 0.3);
        CHECK(std::abs(sample_truncated_gaussian(rng, 2.5)) <= 2.5);
    }
    // density integrates to one; the mass function agrees with quadrature
    auto gl = gauss_legendre(40);
    double mass = 0;
    for (auto [x, w] : gl) mass += 3.0 * w * gaussian_density(3.0 * x);
    CHECK(mass == doctest::Approx(truncated_mass(3.0)).epsilon(1e-12));
    double dm = 0;
    // kink at zero: integrate each half separately
    for (auto [x, w] : gl) dm += 1.5 * w * (difference_density(1.5 * (x + 1), 1.5) + difference_density(-1.5 * (x + 1), 1.5));
    CHECK(dm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a = make_stream(42, 7), b = make_stream(42, 7), c = make_stream(42, 8);
    CHECK(a() == b());
    CHECK(a() != c());
}

TEST_CASE("segment count") {
    CHECK(segment_count(3.0, 0.0, 1) == 1);
    CHECK(segment_count(1.0, 10.0, 1) == 49);
    // growth exponent 1 + 1/(4k+1)
    double r = double(segment_count(1.0, 2000.0, 1)) / double(segment_count(1.0, 1000.0, 1));
    CHECK(r == doctest::Approx(std::pow(2.0, 1.2)).epsilon(1e-3));
    CHECK(c_k(1) == doctest::Approx(0.5 * std::pow(std::numbers::e / 3, 6)));
}

TEST_CASE("lambert w and truncation order") {
    for (double x : {1e-6, 0.3, 1.0, std::numbers::e, 10.0, 1e6}) {
        double w = lambert_w0(x);
        CHECK(w * std::exp(w) == doctest::Approx(x).epsilon(1e-10));
    }
    CHECK(truncation_order(1, 0.5, 0, 1.0) >= 1);
    CHECK(truncation_order(1, 0.5, 1, 1.0) >= 5);
    CHECK(truncation_order(1000, 1e-3, 1, 50.0) == 5);
    CHECK(truncation_order(1000, 1e-3, 1, 200.0) == 7);
    CHECK(truncation_order(1000, 1e-3, 1, 500.0) == 10);
    CHECK(truncation_order_asymptotic(1000, 1e-3, 1) >= 5);
}

TEST_CASE("closed form segment numbers") {
    CHECK(nu_c_actual(10, 0.5, 0.5, 0.05, 1) == doctest::Approx(2160.803400696328).epsilon(1e-12));
    // single-Pauli form uses ln(9/(eta eps))
    const double a = nu_c_actual(1, 1, 0.5, 0.1, 1), b = nu_c_actual(1, 1, 0.5, 0.1, 1, 1.0);
    CHECK(a == b);
}

TEST_CASE("compensation table: low orders vanish") {
    for (int k : {1, 2}) {
        auto H = build_model("tfim", 2);
        TrotterCircuit tc(H, k);
        CompensationTable tab(2, tc.terms(), tc.schedule(), k, 4 * k + 3);
        const double lam = tab.lambda();
        REQUIRE(tab.vanishing_norms().size() == std::size_t(2 * k));
        for (int s = 1; s <= 2 * k; ++s) CHECK(tab.vanishing_norms()[s - 1] <= 1e-10 * std::pow(lam, s));
        CHECK(tab.mu(0.0) == doctest::Approx(1.0));
        CHECK(tab.mu(1e-4) >= 1.0);
        CHECK(tab.mu(1e-4) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("compensation table: commuting hamiltonian") {
    Hamiltonian Hz(3, {{0.4, PauliString::from_label("ZZI")}, {-1.1, PauliString::from_label("IZZ")}});
    TrotterCircuit tc(Hz, 1);
    CompensationTable tab(3, tc.terms(), tc.schedule(), 1, 7);
    CHECK(tab.mu(0.3) == doctest::Approx(1.0).epsilon(1e-12));
    FilterPlan plan;
    plan.k = 1;
    plan.s_c = 7;
    plan.tau = 1;
    plan.x_c = 2;
    plan.nu_c = 3;
    FilterLcu f(Hz, plan);
    Rng rng = make_stream(3, 0);
    auto inst = f.sample_instance(1.5, rng);
    CHECK(std::abs(inst.weight - 1.0) < 1e-12);
}

TEST_CASE("compensation table: k=0 reproduces the Taylor series") {
    auto H = build_model("tfim", 3);
    TrotterCircuit tc(H, 0);
    CompensationTable tab(3, tc.terms(), tc.schedule(), 0, 6, false);
    REQUIRE(!tab.orders().empty());
    CHECK(tab.orders()[0].s == 1);
    CHECK(tab.orders()[0].norm1 == doctest::Approx(tab.lambda()));
    // s_c = 1 without pairing: identity with probability 1/mu, else a Pauli
    CompensationTable one(3, tc.terms(), tc.schedule(), 0, 1, false);
    const double m = 0.05;
    auto sm = one.summands(m);
    CHECK(sm.front().w.kind == Compensation::Kind::identity);
    CHECK(sm.front().prob == doctest::Approx(1 / (1 + tab.lambda() * m)));
    CHECK(sm.size() == 1 + H.terms().size());
}

TEST_CASE("compensation table: dense check and probabilities") {
    auto H = build_model("tfim", 2);
    dense::Mat Hm = dense_matrix(H);
    for (int k : {0, 1, 2})
        for (bool pair : {true, false}) {
            TrotterCircuit tc(H, k);
            const int sc = 4 * k + 3;
            CompensationTable tab(2, tc.terms(), tc.schedule(), k, sc, pair);
            for (double m : {0.1, -0.07}) {
                dense::Mat target = dense::expmi(Hm, m) * trotter_dense(tc, m).adjoint();
                double err = dense::opnorm(tab.dense_truncated(m) - target);
                CHECK(err <= tab.eps_segment(m));
                auto sm = tab.summands(m);
                double ptot = 0;
                dense::Mat rebuilt = dense::Mat::Zero(4, 4);
                for (const auto& s : sm) {
                    CHECK(s.prob >= 0);
                    ptot += s.prob;
                    rebuilt += s.prob * s.phase * comp_dense(s.w, 2);
                }
                CHECK(ptot == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(dense::opnorm(tab.mu(m) * rebuilt - target) <= tab.eps_segment(m));
            }
        }
}

TEST_CASE("compensation table: remainder order") {
    auto H = build_model("tfim", 2);
    dense::Mat Hm = dense_matrix(H);
    TrotterCircuit tc(H, 1);
    CompensationTable tab(2, tc.terms(), tc.schedule(), 1, 5);
    auto err = [&](double m) {
        dense::Mat target = dense::expmi(Hm, m) * trotter_dense(tc, m).adjoint();
        return dense::opnorm(tab.dense_truncated(m) - target);
    };
    CHECK(err(0.2) / err(0.1) >= 16);
    // pairing is exact: the same series with and without it
    CompensationTable raw(2, tc.terms(), tc.schedule(), 1, 5, false);
    CHECK(dense::opnorm(raw.dense_truncated(0.2) - tab.dense_truncated(0.2)) < 1e-14);
    CHECK(tab.mu(0.2) < raw.mu(0.2));
    CHECK(tab.dump().find("paired order 3") != std::string::npos);
}

TEST_CASE("symmetry basis table and instances") {
    auto H = xxz_test(4);
    FilterPlan plan;
    plan.k = 1;
    plan.s_c = 5;
    plan.basis = Basis::symmetry;
    plan.tau = 0.3;
    plan.x_c = 4;
    plan.mode = SegmentMode::tight;
    plan.eps_sc = 1e-3;
    FilterLcu f(H, plan);
    dense::Mat tz = dense::total_z(4);
    for (const auto& s : f.table().summands(0.05)) {
        dense::Mat W = comp_dense(s.w, 4);
        CHECK((W * tz - tz * W).norm() < 1e-12);
    }
    CHECK(f.mu_total(plan.t_c()) <= 2.0);
    CHECK(f.eps_total(plan.t_c()) <= 1e-3);
}

TEST_CASE("ensemble average reproduces the evolution") {
    auto H = build_model("tfim", 2);
    dense::Mat Hm = dense_matrix(H);
    FilterPlan plan;
    plan.k = 1;
    plan.s_c = 5;
    plan.tau = 1;
    plan.x_c = 1;
    plan.nu_c = 3;
    FilterLcu f(H, plan);
    const double t = 0.8;
    const int N = 100000;
    dense::Mat mean = dense::Mat::Zero(4, 4);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(4, 4);
    Rng rng = make_stream(5, 1);
    for (int i = 0; i < N; ++i) {
        auto inst = f.sample_instance(t, rng);
        dense::Mat M(4, 4);
        for (int b = 0; b < 4; ++b) {
            auto psi = run_instance(StateVector(2, b), inst, f.trotter());
            for (int r = 0; r < 4; ++r) M(r, b) = psi.amps[r];
        }
        M *= inst.weight;
        mean += M;
        sq += M.cwiseAbs2();
    }
    mean /= N;
    Eigen::MatrixXd var = sq / N - mean.cwiseAbs2();
    const double sigma = std::sqrt(var.sum() / N);
    const double err = dense::opnorm(mean - dense::expmi(Hm, t));
    CHECK(err <= f.eps_total(t) + 5 * sigma);
    CHECK(err > 0);
}

TEST_CASE("certification") {
    auto H = build_model("tfim", 2);
    FilterPlan zero;
    zero.tau = 0;
    zero.x_c = 3;
    zero.s_c = 5;
    auto c0 = certify_formula(H, zero);
    CHECK(c0.mu_total == 1.0);
    CHECK(c0.eps_sc == 0.0);

    auto Z = single_pauli(1, "Z");
    FilterPlan p;
    p.k = 1;
    p.tau = 1.5;
    p.x_c = 2 * std::sqrt(std::log(2 / 0.01));
    p.omega = -1;
    p.nu_c = double(segment_count(1.0, p.t_c(), 1));
    p.s_c = truncation_order(p.nu_c, 0.01, 1, p.t_c());
    auto c = certify_formula(Z, p);
    CHECK(c.dense_error <= c.eps_total);
    CHECK(c.mu_total <= 2.0);
}

TEST_CASE("truncated evolution keeps the identity part of H in both bases") {
    auto H = xxz_test(4);
    dense::Mat Hd = dense::Mat::Zero(16, 16);
    for (const auto& t : H.terms()) Hd += t.coeff * dense::pauli(t.string.label());
    for (Basis b : {Basis::pauli, Basis::symmetry}) {
        FilterPlan p;
        p.tau = 0.4;
        p.x_c = 5;
        p.s_c = 6;
        p.basis = b;
        p.mode = SegmentMode::tight;
        p.eps_sc = 1e-4;
        FilterLcu f(H, p);
        for (double t : {0.3, -0.9}) {
            dense::Mat E = dense::expmi(Hd, t);
            CHECK((truncated_evolution_matrix(f, t) - E).norm() < 1e-5);
        }
    }
}
