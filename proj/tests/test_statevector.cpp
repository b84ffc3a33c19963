#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dense.hpp"
#include "models.hpp"
#include "rlcu/exact.hpp"
#include "rlcu/statevector.hpp"

using namespace rlcu;

static StateVector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << n);
    double s = 0;
    for (auto& x : a) {
        x = cplx(g(rng), g(rng));
        s += std::norm(x);
    }
    for (auto& x : a) x /= std::sqrt(s);
    return StateVector(n, a);
}

static dense::Vec to_vec(const StateVector& s) {
    dense::Vec v(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) v[i] = s.amps[i];
    return v;
}

static std::string random_label(std::mt19937_64& rng, int n) {
    std::string s(n, 'I');
    for (auto& c : s) c = "IXYZ"[rng() % 4];
    return s;
}

TEST_CASE("pauli application") {
    StateVector s(1, 0);
    apply_pauli(s, PauliString::from_label("X"));
    CHECK(std::abs(s.amps[1] - 1.0) < 1e-15);
    StateVector t(2, 0b10);  // qubit 0 = 0, qubit 1 = 1
    apply_pauli(t, PauliString::from_label("ZZ"));
    CHECK(std::abs(t.amps[0b10] + 1.0) < 1e-15);

    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        auto psi = random_state(4, rng);
        auto l = random_label(rng, 4);
        dense::Vec want = dense::pauli(l) * to_vec(psi);
        apply_pauli(psi, PauliString::from_label(l));
        CHECK((to_vec(psi) - want).norm() < 1e-13);
    }
    StateVector w(3, 0);
    CHECK_THROWS_AS(apply_pauli(w, PauliString::from_label("XX")), std::invalid_argument);
}

TEST_CASE("pauli exponentials") {
    StateVector s(1, 0);
    apply_exp_pauli(s, PauliString::from_label("X"), 0.0);
    CHECK(std::abs(s.amps[0] - 1.0) < 1e-15);
    apply_exp_pauli(s, PauliString::from_label("X"), M_PI / 2);
    CHECK(std::abs(s.amps[1] - cplx(0, -1)) < 1e-15);
    CHECK(std::abs(s.amps[0]) < 1e-15);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int rep = 0; rep < 30; ++rep) {
        auto psi = random_state(3, rng);
        auto l = random_label(rng, 3);
        double th = u(rng);
        dense::Vec want = dense::expmi(dense::pauli(l), th) * to_vec(psi);
        apply_exp_pauli(psi, PauliString::from_label(l), th);
        CHECK((to_vec(psi) - want).norm() < 1e-12);
    }
}

TEST_CASE("swap and z-string terms") {
    StateVector s(2, 0b10);
    apply_swap(s, 0, 1);
    CHECK(std::abs(s.amps[0b01] - 1.0) < 1e-15);

    // symmetric state: SWAP eigenvalue +1
    StateVector sym(2, std::vector<cplx>{0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
    SymmetryTerm sw{SymmetryTerm::Kind::Swap, 0, 1, {}, 1.0};
    auto before = sym.amps;
    apply_exp_symmetry_term(sym, sw, 0.7);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sym.amps[i] - std::exp(cplx(0, -0.7)) * before[i]) < 1e-15);

    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        auto psi = random_state(4, rng);
        SymmetryTerm zt;
        zt.kind = SymmetryTerm::Kind::ZString;
        std::string l(4, 'I');
        for (int q = 0; q < 4; ++q)
            if (rng() & 1) {
                zt.support.set(q);
                l[q] = 'Z';
            }
        double th = 0.3 * rep;
        double z0 = total_z_expectation(psi);
        dense::Vec want = dense::expmi(dense::pauli(l), th) * to_vec(psi);
        apply_exp_symmetry_term(psi, zt, th);
        CHECK((to_vec(psi) - want).norm() < 1e-12);
        SymmetryTerm sw2{SymmetryTerm::Kind::Swap, int(rng() % 2), 2 + int(rng() % 2), {}, 1.0};
        dense::Vec want2 = dense::expmi(dense::swap(4, sw2.i, sw2.j), th) * to_vec(psi);
        apply_exp_symmetry_term(psi, sw2, th);
        CHECK((to_vec(psi) - want2).norm() < 1e-12);
        CHECK(std::abs(total_z_expectation(psi) - z0) < 1e-10);
    }
    StateVector small(2, 0);
    CHECK_THROWS_AS(apply_swap(small, 0, 3), std::invalid_argument);
}

TEST_CASE("trotter step") {
    // commuting Hamiltonian: exact
    Hamiltonian Hz(3, {{0.4, PauliString::from_label("ZZI")}, {-1.1, PauliString::from_label("IZZ")},
                       {0.3, PauliString::from_label("ZIZ")}});
    std::mt19937_64 rng(5);
    auto psi = random_state(3, rng);
    dense::Mat Hm = dense_matrix(Hz);
    dense::Vec want = dense::expmi(Hm, 0.37) * to_vec(psi);
    trotter_step(psi, Hz, 0.37, 1);
    CHECK((to_vec(psi) - want).norm() < 1e-13);

    auto phi = random_state(3, rng);
    auto keep = phi.amps;
    trotter_step(phi, Hz, 0.5, 0);
    CHECK(phi.amps == keep);
    CHECK_THROWS_AS(trotter_step(phi, Hz, 0.5, 3), std::invalid_argument);
}

static dense::Mat trotter_matrix(const Hamiltonian& H, double m, int k) {
    const int d = 1 << H.n();
    dense::Mat S(d, d);
    TrotterCircuit tc(H, k);
    for (int b = 0; b < d; ++b) {
        StateVector e(H.n(), b);
        tc.apply(e, m);
        S.col(b) = to_vec(e);
    }
    return S;
}

TEST_CASE("trotter error orders") {
    auto H = build_model("tfim", 2);
    dense::Mat Hm = dense_matrix(H);
    auto err = [&](double m, int k) { return dense::opnorm(trotter_matrix(H, m, k) - dense::expmi(Hm, m)); };
    // third order local error for k=1
    double r = err(0.1, 1) / err(0.05, 1);
    CHECK(r == doctest::Approx(8).epsilon(0.05));
    // fifth order for k=2
    double r2 = err(0.2, 2) / err(0.1, 2);
    CHECK(r2 == doctest::Approx(32).epsilon(0.1));

    // log-log slope over [1e-3, 1e-1]
    auto H3 = xxz_test(3);
    dense::Mat H3m = dense_matrix(H3);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (double m = 1e-3; m <= 0.1 + 1e-12; m *= std::pow(10.0, 0.25)) {
        double e = dense::opnorm(trotter_matrix(H3, m, 1) - dense::expmi(H3m, m));
        double x = std::log(m), y = std::log(e);
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope == doctest::Approx(3.0).epsilon(0.2 / 3));

    // S(m)^dag = S(-m)
    dense::Mat S = trotter_matrix(H3, 0.3, 2);
    CHECK((S.adjoint() - trotter_matrix(H3, -0.3, 2)).norm() < 1e-12);
}

TEST_CASE("trotter schedule merges the middle factors") {
    auto s = trotter_schedule(4, 1);
    REQUIRE(s.size() == 7);
    CHECK(s[3].first == 0);
    CHECK(s[3].second == doctest::Approx(1.0));
    double total = 0;
    for (auto [i, f] : trotter_schedule(3, 2))
        if (i == 1) total += f;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("instances") {
    auto H = xxz_test(4);
    TrotterCircuit tc(H, 1);
    std::mt19937_64 rng(6);
    auto psi0 = random_state(4, rng);

    CircuitInstance inst;
    inst.nu = 3;
    inst.m = 0.05;
    inst.t = 0.15;
    inst.segments.assign(3, Compensation{});
    auto a = run_instance(psi0, inst, tc);
    auto b = psi0;
    for (int i = 0; i < 3; ++i) tc.apply(b, 0.05);
    CHECK((to_vec(a) - to_vec(b)).norm() < 1e-15);

    CircuitInstance one;
    one.nu = 1;
    one.m = 0.2;
    Compensation w;
    w.kind = Compensation::Kind::op;
    cplx h;
    w.op = BasisOp::from_pauli(PauliString::from_label("XIYI"), &h);
    one.segments = {w};
    auto c = run_instance(psi0, one, tc);
    auto d = psi0;
    tc.apply(d, 0.2);
    apply_op(d, w.op);
    CHECK((to_vec(c) - to_vec(d)).norm() < 1e-15);
    auto tr = one.trace(4);
    CHECK(tr.find("seg q=1 S m=0.2") != std::string::npos);
    CHECK(tr.find("seg q=1 W Z(2)X(0,2)") != std::string::npos);

    one.nu = 2;
    CHECK_THROWS(run_instance(psi0, one, tc));
}

TEST_CASE("overlaps") {
    std::mt19937_64 rng(8);
    auto psi = random_state(3, rng);
    auto id = single_pauli(3, "III");
    CHECK(std::abs(overlap(psi, id, psi) - 1.0) < 1e-14);
    CHECK(std::abs(overlap(StateVector(3, 1), id, StateVector(3, 2))) == 0.0);
    for (int rep = 0; rep < 10; ++rep) {
        auto phi = random_state(3, rng);
        Hamiltonian O(3, {{0.7, PauliString::from_label(random_label(rng, 3))},
                          {-0.2, PauliString::from_label(random_label(rng, 3))}});
        cplx want = to_vec(phi).dot(dense_matrix(O) * to_vec(psi));
        CHECK(std::abs(overlap(phi, O, psi) - want) < 1e-13);
    }
}

TEST_CASE("norm preserved over many gates") {
    std::mt19937_64 rng(9);
    auto psi = random_state(5, rng);
    for (int g = 0; g < 1000; ++g) {
        auto l = random_label(rng, 5);
        apply_exp_pauli(psi, PauliString::from_label(l), 0.01 * g);
    }
    CHECK(std::abs(psi.norm() - 1) < 1e-10);
}
