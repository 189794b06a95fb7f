#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "walg/lattice_va.hpp"

#include <random>

using namespace walg;

namespace {

LatticeState mono_state(const VertexAlgebra &va, std::vector<std::pair<int, int>> factors,
                        IVec gamma, const Cyclotomic &c = Cyclotomic::one()) {
    std::sort(factors.begin(), factors.end());
    LatticeState s;
    s.add_term(StateKey{FockMonomial{std::move(factors)}, std::move(gamma)}, c);
    return s;
}

LatticeState basis_heis_state(const VertexAlgebra &va, int i) {
    return mono_state(va, {{1, i}}, IVec((size_t)va.rank(), 0));
}

} // namespace

TEST_CASE("heisenberg modes") {
    VertexAlgebra va('A', 2);
    IVec beta{1, 1};
    auto ebeta = LatticeState::lattice_point(beta);
    std::vector<Cyclotomic> alpha{Cyclotomic::one(), Cyclotomic::zero()}; // alpha_1

    // alpha_{(0)} e^beta = (alpha|beta) e^beta
    auto z = va.heis_mode(alpha, 0, ebeta);
    CHECK(z == ebeta * Cyclotomic((long)va.root_system().pairing(IVec{1, 0}, beta)));

    // alpha_{(1)} alpha_{(-1)} |0> = (alpha|alpha) |0>
    auto created = va.heis_mode(alpha, -1, va.vacuum());
    CHECK(va.heis_mode(alpha, 1, created) == va.vacuum() * Cyclotomic(2l));

    // annihilation beyond the weight kills
    auto w4 = mono_state(va, {{1, 0}, {3, 1}}, IVec{0, 0});
    CHECK(va.heis_mode(alpha, 5, w4).is_zero());
}

TEST_CASE("exponential modes") {
    VertexAlgebra va('A', 2);
    IVec a1{1, 0}, a2{0, 1};

    // e^alpha_{(0)} e^lambda = 0 when (alpha|lambda) >= 0
    CHECK(va.e_mode(a1, 0, LatticeState::lattice_point(a1)).is_zero());

    // (alpha|lambda) = -1: eps(alpha,lambda) e^{lambda+alpha}
    auto r = va.e_mode(a1, 0, LatticeState::lattice_point(a2));
    int eps = va.seifert().epsilon(a1, a2);
    CHECK(r == LatticeState::lattice_point(IVec{1, 1}) * Cyclotomic((long)eps));

    // vacuum axiom: e^alpha_{(-1)} |0> = e^alpha
    CHECK(va.e_mode(a1, -1, va.vacuum()) == LatticeState::lattice_point(a1));
    // and lower modes vanish on the vacuum
    CHECK(va.e_mode(a1, 0, va.vacuum()).is_zero());
    CHECK(va.e_mode(a1, 1, va.vacuum()).is_zero());

    // screening(alpha, e^{-alpha}) = eps(alpha,-alpha) alpha_{(-1)} |0>
    IVec ma1{-1, 0};
    auto sc = va.screening(a1, LatticeState::lattice_point(ma1));
    int eps2 = va.seifert().epsilon(a1, ma1);
    LatticeState expect =
        (basis_heis_state(va, 0)) * Cyclotomic((long)eps2);
    CHECK(sc == expect);

    // screening kills the vacuum
    CHECK(va.screening(a1, va.vacuum()).is_zero());
}

TEST_CASE("nth products") {
    VertexAlgebra va('A', 2);
    auto omega = va.build_omega();

    // vacuum as identity
    auto x = mono_state(va, {{2, 1}}, IVec{1, 0});
    CHECK(va.nth_product(va.vacuum(), x, -1) == x);
    CHECK(va.nth_product(va.vacuum(), x, 0).is_zero());
    CHECK(va.nth_product(x, va.vacuum(), -1) == x);

    // alpha_{(1)} beta = (alpha|beta) |0>
    auto a = basis_heis_state(va, 0), b = basis_heis_state(va, 1);
    CHECK(va.nth_product(a, b, 1) == va.vacuum() * Cyclotomic(-1l));
    CHECK(va.nth_product(a, a, 1) == va.vacuum() * Cyclotomic(2l));

    // omega_{(1)} omega = 2 omega, omega_{(3)} omega = (N/2)|0>
    CHECK(va.nth_product(omega, omega, 1) == omega + omega);
    CHECK(va.nth_product(omega, omega, 3) == va.vacuum() * Cyclotomic(Rational(2, 2)));
    CHECK(va.nth_product(omega, omega, 2).is_zero());
}

TEST_CASE("L_0 grading") {
    VertexAlgebra va('A', 2);
    auto omega = va.build_omega();
    auto x = mono_state(va, {{2, 0}, {1, 1}}, IVec{1, 1}); // weight 3 + 1
    long w = va.term_weight(x.terms().begin()->first);
    CHECK(w == 4);
    CHECK(va.nth_product(omega, x, 1) == x * Cyclotomic((long)w));
}

TEST_CASE("omega for A_1") {
    VertexAlgebra va('A', 1);
    CHECK(va.build_omega() == mono_state(va, {{1, 0}, {1, 0}}, IVec{0}, Cyclotomic(Rational(1, 4))));
}

TEST_CASE("screening kernel membership") {
    VertexAlgebra va('A', 2);
    auto omega = va.build_omega();
    for (const auto &alpha : va.root_system().roots())
        CHECK(va.screening(alpha, omega).is_zero());
    CHECK(va.in_w_algebra(omega));

    CHECK(va.in_w_algebra(va.build_omega_d(1)));
    CHECK(va.in_w_algebra(va.build_omega_d(2)));
    for (int d = 1; d <= 3; ++d)
        CHECK(va.state_weight(va.build_omega_d(d)) == d + 1);

    // a bare current is not in the W-algebra
    CHECK_FALSE(va.in_w_algebra(basis_heis_state(va, 0)));

    // states outside Fock are rejected
    CHECK_THROWS_AS(va.in_w_algebra(LatticeState::lattice_point(IVec{1, 0})), NotInFock);
}

TEST_CASE("nu^d") {
    VertexAlgebra a1('A', 1);
    auto lam0 = a1.default_lambda0();
    CHECK(a1.weyl_orbit(lam0).size() == 2);
    // nu^1 cancels entirely; nu^2 is proportional to omega
    CHECK(a1.build_nu_d(lam0, 1).is_zero());
    auto nu2 = a1.build_nu_d(lam0, 2);
    auto omega = a1.build_omega();
    bool plus = nu2 == omega, minus = nu2 == omega * Cyclotomic(-1l);
    CHECK((plus || minus));
    CHECK(a1.in_w_algebra(nu2));

    VertexAlgebra a2('A', 2);
    auto lam2 = a2.default_lambda0();
    CHECK(a2.weyl_orbit(lam2).size() == 3);
    auto nu = a2.build_nu_d(lam2, 1);
    CHECK(a2.in_w_algebra(nu));
    CHECK(a2.in_w_algebra(a2.build_nu_d(lam2, 2)));

    // roots are inadmissible as lambda_0
    std::vector<Rational> root{Rational(1), Rational(0)};
    CHECK_THROWS_AS(a2.build_nu_d(root, 1), InadmissibleLambda0);
}

TEST_CASE("nu^d construction for the exceptional types") {
    // minuscule orbits exist for E6 and E7; the E8 default is rejected
    VertexAlgebra e6('E', 6);
    auto lam6 = e6.default_lambda0();
    CHECK(e6.weyl_orbit(lam6).size() == 27);
    CHECK_FALSE(e6.build_nu_d(lam6, 1).is_zero());

    VertexAlgebra e7('E', 7);
    auto lam7 = e7.default_lambda0();
    CHECK(e7.weyl_orbit(lam7).size() == 56);
    CHECK_FALSE(e7.build_nu_d(lam7, 1).is_zero());

    VertexAlgebra e8('E', 8);
    CHECK_THROWS_AS(e8.default_lambda0(), InadmissibleLambda0);
}

TEST_CASE("pi^N for type D") {
    VertexAlgebra d4('D', 4);
    auto pi = d4.build_pi_n();
    CHECK(d4.state_weight(pi) == 4);
    CHECK(d4.in_w_algebra(pi));

    VertexAlgebra a2('A', 2);
    CHECK_THROWS_AS(a2.build_pi_n(), UnsupportedType);
}

TEST_CASE("epsilon cancellation mechanism behind nu^d") {
    // for a root alpha and lattice lambda with (alpha|lambda) = -1:
    // eps(alpha, -r_alpha(lambda)) = -eps(alpha, lambda)
    VertexAlgebra va('A', 2);
    const auto &rs = va.root_system();
    std::mt19937 rng(21);
    std::uniform_int_distribution<long> c(-2, 2);
    std::uniform_int_distribution<size_t> pick(0, rs.roots().size() - 1);
    int found = 0;
    for (int trial = 0; trial < 200 && found < 20; ++trial) {
        IVec alpha = rs.roots()[pick(rng)];
        IVec lam{c(rng), c(rng)};
        if (rs.pairing(alpha, lam) != -1)
            continue;
        ++found;
        IVec mral(2), mlam(2);
        for (int i = 0; i < 2; ++i) {
            mral[(size_t)i] = -(lam[(size_t)i] - rs.pairing(alpha, lam) * alpha[(size_t)i]);
            mlam[(size_t)i] = lam[(size_t)i];
        }
        CHECK(va.seifert().epsilon(alpha, mral) == -va.seifert().epsilon(alpha, mlam));
    }
    CHECK(found >= 10);
}

TEST_CASE("zero modes act as derivations") {
    VertexAlgebra va('A', 2);
    std::mt19937 rng(17);
    std::uniform_int_distribution<size_t> pick(0, va.root_system().roots().size() - 1);
    auto a = basis_heis_state(va, 0) + mono_state(va, {{1, 1}}, IVec{1, 1});
    auto b = basis_heis_state(va, 1) + LatticeState::lattice_point(IVec{-1, 0});
    for (int n : {-2, -1, 0, 1}) {
        IVec alpha = va.root_system().roots()[pick(rng)];
        auto lhs = va.e_mode(alpha, 0, va.nth_product(a, b, n));
        auto rhs = va.nth_product(va.e_mode(alpha, 0, a), b, n) +
                   va.nth_product(a, va.e_mode(alpha, 0, b), n);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("virasoro bracket with central charge N") {
    VertexAlgebra va('A', 2);
    auto omega = va.build_omega();
    auto xs = std::vector<LatticeState>{
        va.vacuum(),
        basis_heis_state(va, 0),
        mono_state(va, {{1, 0}, {1, 1}}, IVec{0, 0}),
        LatticeState::lattice_point(IVec{1, 0}),
        mono_state(va, {{2, 1}}, IVec{0, 1}),
    };
    for (int m : {-2, -1, 0, 1, 2})
        for (int n : {-1, 0, 2})
            for (const auto &x : xs) {
                auto lhs = va.virasoro_mode(omega, m, va.virasoro_mode(omega, n, x)) -
                           va.virasoro_mode(omega, n, va.virasoro_mode(omega, m, x));
                auto rhs = va.virasoro_mode(omega, m + n, x) * Cyclotomic((long)(m - n));
                if (m + n == 0) {
                    long c = (long)m * m * m - m; // times N/12
                    rhs += x * Cyclotomic(Rational(c * 2, 12));
                }
                CHECK(lhs == rhs);
            }
}

TEST_CASE("borcherds identity") {
    VertexAlgebra va('A', 2);
    auto alpha = basis_heis_state(va, 0);
    auto ebeta = LatticeState::lattice_point(IVec{0, 1});

    CHECK(va.borcherds_check(va.vacuum(), alpha, ebeta, 0, 0, 0));
    CHECK(va.borcherds_check(alpha, alpha, ebeta, 1, -1, 0));
    CHECK(va.borcherds_check(alpha, alpha, ebeta, 0, 2, -1));

    std::mt19937 rng(31);
    std::uniform_int_distribution<int> mode(-2, 2);
    std::uniform_int_distribution<int> which(0, 3);
    auto random_state = [&](VertexAlgebra &v) {
        switch (which(rng)) {
        case 0:
            return v.vacuum();
        case 1:
            return basis_heis_state(v, which(rng) % v.rank());
        case 2:
            return mono_state(v, {{1, 0}, {which(rng) % 2 + 1, v.rank() - 1}},
                              IVec((size_t)v.rank(), 0));
        default: {
            IVec g((size_t)v.rank(), 0);
            g[(size_t)(which(rng) % v.rank())] = 1;
            return LatticeState::lattice_point(g);
        }
        }
    };
    for (int trial = 0; trial < 25; ++trial) {
        auto a = random_state(va), b = random_state(va), c = random_state(va);
        CHECK(va.borcherds_check(a, b, c, mode(rng), mode(rng), mode(rng)));
    }
}

TEST_CASE("truncation guard") {
    VertexAlgebra va('A', 1, 6);
    CHECK_THROWS_AS(va.e_mode(IVec{1}, -9, LatticeState::lattice_point(IVec{-1})),
                    TruncationExceeded);
}
