#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "dense.hpp"
#include "rlcu/basis_op.hpp"
#include "rlcu/pauli.hpp"

using namespace rlcu;

static dense::Mat matrix_of(const Hamiltonian& H) {
    dense::Mat m = dense::Mat::Zero(1 << H.n(), 1 << H.n());
    for (const auto& t : H.terms()) m += t.coeff * dense::pauli(t.string.label());
    return m;
}

static dense::Mat matrix_of(const SymmetryTerm& t, int n) {
    if (t.kind == SymmetryTerm::Kind::Swap) return dense::swap(n, t.i, t.j);
    std::string l(n, 'I');
    for (int q = 0; q < n; ++q)
        if (t.support.test(q)) l[q] = 'Z';
    return dense::pauli(l);
}

static dense::Mat matrix_of(const BasisOp& o, int n) {
    const int d = 1 << n;
    dense::Mat m = dense::Mat::Zero(d, d);
    for (std::uint64_t b = 0; b < std::uint64_t(d); ++b) {
        std::uint64_t c = o.x ^ o.permute(b, n);
        m(c, b) = (std::popcount(o.z & c) & 1) ? -1.0 : 1.0;
    }
    return m;
}

static const dense::cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

static std::string random_label(std::mt19937_64& rng, int n) {
    std::string s(n, 'I');
    for (auto& c : s) c = "IXYZ"[rng() % 4];
    return s;
}

TEST_CASE("single qubit products") {
    auto r = multiply(PauliString::from_label("X"), PauliString::from_label("Y"));
    CHECK(r.phase == 1);
    CHECK(r.string.label() == "Z");
    auto id = multiply(PauliString::from_label("II"), PauliString::from_label("XZ"));
    CHECK(id.phase == 0);
    CHECK(id.string.label() == "XZ");
}

TEST_CASE("two qubit product against dense matrices") {
    auto r = multiply(PauliString::from_label("XZ"), PauliString::from_label("YZ"));
    CHECK(r.phase == 1);
    CHECK(r.string.label() == "ZI");
    dense::Mat lhs = dense::pauli("XZ") * dense::pauli("YZ");
    CHECK((lhs - kPhase[r.phase] * dense::pauli("ZI")).norm() < 1e-14);
}

TEST_CASE("exhaustive products for n <= 2 and random for n = 3, 4") {
    for (int n = 1; n <= 2; ++n) {
        int cnt = 1 << (2 * n);
        for (int a = 0; a < cnt; ++a)
            for (int b = 0; b < cnt; ++b) {
                std::string la, lb;
                for (int q = 0; q < n; ++q) {
                    la += "IXYZ"[(a >> (2 * q)) & 3];
                    lb += "IXYZ"[(b >> (2 * q)) & 3];
                }
                auto r = multiply(PauliString::from_label(la), PauliString::from_label(lb));
                dense::Mat want = dense::pauli(la) * dense::pauli(lb);
                CHECK((want - kPhase[r.phase] * dense::pauli(r.string.label())).norm() < 1e-13);
                CHECK(commutes(PauliString::from_label(la), PauliString::from_label(lb)) ==
                      ((dense::pauli(la) * dense::pauli(lb) - dense::pauli(lb) * dense::pauli(la)).norm() < 1e-12));
            }
    }
    std::mt19937_64 rng(7);
    for (int n = 3; n <= 4; ++n)
        for (int rep = 0; rep < 200; ++rep) {
            auto la = random_label(rng, n), lb = random_label(rng, n);
            auto r = multiply(PauliString::from_label(la), PauliString::from_label(lb));
            dense::Mat want = dense::pauli(la) * dense::pauli(lb);
            CHECK((want - kPhase[r.phase] * dense::pauli(r.string.label())).norm() < 1e-12);
        }
}

TEST_CASE("qubit count mismatch throws") {
    CHECK_THROWS_AS(multiply(PauliString::from_label("X"), PauliString::from_label("XX")), std::invalid_argument);
}

TEST_CASE("weight invariants") {
    CHECK(PauliString::identity(5).weight() == 0);
    CHECK(PauliString::from_label("XIYZ").weight() == 3);
}

TEST_CASE("stats of small models") {
    auto tfim = build_model("tfim", 3);
    const auto& s = tfim.stats();
    CHECK(s.L == 6);
    CHECK(s.lambda == doctest::Approx(6.0));
    CHECK(s.wt == 9);
    CHECK(s.wt_m == 2);
    CHECK(s.n_L == 3);

    Hamiltonian one(2, {{0.5, PauliString::from_label("ZI")}});
    CHECK(one.stats().L == 1);
    CHECK(one.stats().lambda == 0.5);
    CHECK(one.stats().wt == 1);
    CHECK(one.stats().wt_m == 1);
    CHECK(one.stats().n_L == 0);

    ModelParams p;
    p.hx = 0.1;
    auto xxz = build_model("heisenberg_xxz", 4, p);
    // 4 bonds x 3 couplings + 4 x-fields + 2 boundary Z terms
    CHECK(xxz.stats().L == 18);
    double b = std::sqrt(3.0);
    CHECK(xxz.stats().lambda == doctest::Approx(4 * (1 + 1 + 2) + 0.4 + 2 * b));
    CHECK(xxz.stats().wt == 12 * 2 + 4 + 2);
    CHECK(xxz.stats().Lambda == doctest::Approx(2.0));
    CHECK(xxz.stats().n_L == 5);
}

TEST_CASE("stats are permutation invariant") {
    auto H = build_model("heisenberg_xxz", 5);
    auto terms = H.terms();
    std::mt19937_64 rng(3);
    std::shuffle(terms.begin(), terms.end(), rng);
    auto a = H.stats(), b = hamiltonian_stats(terms);
    CHECK(a.L == b.L);
    CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(1e-15));
    CHECK(a.Lambda == b.Lambda);
    CHECK(a.wt == b.wt);
    CHECK(a.wt_m == b.wt_m);
    double norm = 0;
    for (const auto& t : H.terms()) norm += std::abs(t.coeff / H.one_norm());
    CHECK(std::abs(norm - 1) < 1e-12);
}

TEST_CASE("model term enumeration") {
    auto xxz = build_model("heisenberg_xxz", 4);
    CHECK(xxz.terms().size() == 14);
    auto tl = build_model("two_local", 3);
    CHECK(tl.terms().size() == 6);
    ModelParams open;
    open.periodic = false;
    auto t2 = build_model("tfim", 2, open);
    REQUIRE(t2.terms().size() == 3);
    CHECK(t2.terms()[0].string.label() == "ZZ");
    CHECK(t2.terms()[1].string.label() == "XI");
    CHECK(t2.terms()[2].string.label() == "IX");
    CHECK_THROWS_AS(build_model("potts", 3), std::invalid_argument);
    CHECK_THROWS_AS(build_model("tfim", 1), std::invalid_argument);
}

TEST_CASE("duplicates merge and zeros drop") {
    Hamiltonian H(2, {{1.0, PauliString::from_label("XX")},
                      {0.0, PauliString::from_label("ZI")},
                      {0.5, PauliString::from_label("XX")}});
    REQUIRE(H.terms().size() == 1);
    CHECK(H.terms()[0].coeff == 1.5);
    CHECK_THROWS(Hamiltonian(2, {}));
}

TEST_CASE("hamiltonian file parser") {
    std::istringstream ok("# header\n\n1.5 XIZ\n-0.25 IYI # trailing\n");
    auto H = parse_hamiltonian(ok);
    CHECK(H.n() == 3);
    CHECK(H.terms().size() == 2);
    std::istringstream bad("1.0 XX\n0.5 XXX\n");
    try {
        parse_hamiltonian(bad);
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream junk("abc XX\n");
    CHECK_THROWS_AS(parse_hamiltonian(junk), ParseError);
}

TEST_CASE("swap reconstruction of XX + YY") {
    const double J1 = 0.7;
    Hamiltonian H(2, {{J1, PauliString::from_label("XX")}, {J1, PauliString::from_label("YY")}});
    auto terms = to_symmetry_basis(H);
    REQUIRE(terms.size() == 3);
    double swap_c = 0, zz_c = 0, id_c = 0;
    for (const auto& t : terms) {
        if (t.kind == SymmetryTerm::Kind::Swap) swap_c = t.coeff;
        if (t.kind == SymmetryTerm::Kind::ZString) zz_c = t.coeff;
        if (t.kind == SymmetryTerm::Kind::Identity) id_c = t.coeff;
    }
    CHECK(swap_c == doctest::Approx(2 * J1));
    CHECK(zz_c == doctest::Approx(-J1));
    CHECK(id_c == doctest::Approx(-J1));
    // a 4*J1 SWAP coefficient does not reproduce the operator
    dense::Mat target = J1 * (dense::pauli("XX") + dense::pauli("YY"));
    dense::Mat wrong = 4 * J1 * dense::swap(2, 0, 1) - J1 * dense::pauli("ZZ");
    dense::Mat derived = 2 * J1 * dense::swap(2, 0, 1) - J1 * dense::pauli("ZZ");
    CHECK((target - derived + J1 * dense::Mat::Identity(4, 4)).norm() < 1e-12);
    dense::Mat diff = target - wrong;
    CHECK((diff - diff(0, 0) * dense::Mat::Identity(4, 4)).norm() > 1.0);
}

TEST_CASE("symmetry basis reconstructs models exactly") {
    for (int n : {2, 3, 4, 6}) {
        ModelParams p;
        p.Jx = p.Jy = -1;
        p.Jz = -2;
        auto H = build_model("heisenberg_xxz", n, p);
        auto terms = to_symmetry_basis(H);
        dense::Mat rebuilt = dense::Mat::Zero(1 << n, 1 << n);
        dense::Mat tz = dense::total_z(n);
        for (const auto& t : terms) {
            dense::Mat m = matrix_of(t, n);
            rebuilt += t.coeff * m;
            CHECK((m * tz - tz * m).norm() == 0.0);
        }
        CHECK((matrix_of(H) - rebuilt).norm() < 1e-10);
    }
    ModelParams eq;
    eq.Jz = 1;
    auto iso = to_symmetry_basis(build_model("heisenberg_xxz", 4, eq));
    for (const auto& t : iso) {
        if (t.kind == SymmetryTerm::Kind::ZString) CHECK(t.support.count() == 1);
    }
    CHECK_THROWS_AS(to_symmetry_basis(build_model("tfim", 3)), std::invalid_argument);
    // identity terms of H survive the conversion
    Hamiltonian shifted(2, {{0.5, PauliString::identity(2)}, {1.0, PauliString::from_label("ZI")}});
    auto st = to_symmetry_basis(shifted);
    REQUIRE(st.size() == 2);
    CHECK(st[1].kind == SymmetryTerm::Kind::Identity);
    CHECK(st[1].coeff == 0.5);
}

TEST_CASE("basis operator algebra against dense matrices") {
    std::mt19937_64 rng(11);
    const int n = 4;
    auto random_op = [&] {
        BasisOp o;
        o.z = rng() & 15;
        o.x = rng() & 15;
        std::array<int, 4> p{0, 1, 2, 3};
        std::shuffle(p.begin(), p.end(), rng);
        for (int q = 0; q < n; ++q) {
            o.perm &= ~(std::uint64_t{15} << (4 * q));
            o.perm |= std::uint64_t(p[q]) << (4 * q);
        }
        return o;
    };
    for (int rep = 0; rep < 100; ++rep) {
        BasisOp a = random_op(), b = random_op();
        auto ab = multiply(a, b);
        CHECK((matrix_of(a, n) * matrix_of(b, n) - double(ab.sign) * matrix_of(ab.op, n)).norm() < 1e-12);
        auto ad = adjoint(a);
        CHECK((matrix_of(a, n).adjoint() - double(ad.sign) * matrix_of(ad.op, n)).norm() < 1e-12);
    }
    for (int rep = 0; rep < 50; ++rep) {
        auto l = random_label(rng, n);
        cplx h;
        BasisOp o = BasisOp::from_pauli(PauliString::from_label(l), &h);
        CHECK((h * matrix_of(o, n) - dense::pauli(l)).norm() < 1e-12);
    }
    CHECK((matrix_of(BasisOp::swap(1, 2), n) - dense::swap(n, 1, 2)).norm() == 0.0);
    CHECK(BasisOp::swap(1, 2).str(n) == "SWAP(1,2)");
    CHECK(BasisOp::zstring(0b0101).str(n) == "Z(0,2)");
}
