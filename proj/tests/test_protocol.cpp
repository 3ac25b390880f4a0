#include <doctest.h>

#include "matkex/attack_span.hpp"
#include "matkex/protocol.hpp"
#include "test_support.hpp"

using namespace matkex;
using testing::Mat;

namespace {
using PM = Matrix<PrimeField>;
using PP = PolyCoeffs<PrimeField>;
const PrimeField kF(1'000'003);
}  // namespace

TEST_CASE("eval_matrix_poly") {
    Rng rng(1);
    const auto u = PM::random(kF, 4, rng);
    CHECK(eval_matrix_poly(u, PP{{5}}) == PM::scalar(kF, 4, 5));
    CHECK(eval_matrix_poly(PM::identity(kF, 3), PP{{1, 1, 1}}) == PM::scalar(kF, 3, 3));

    const PrimeField f7(7);
    const PM nil(f7, 2, {0, 1, 0, 0});
    CHECK(eval_matrix_poly(nil, PP{{2, 3, 7 % 7}}) == PM(f7, 2, {2, 3, 0, 2}));
    CHECK(eval_matrix_poly(PM(PrimeField(11), 2, {0, 1, 0, 0}), PP{{2, 3, 7}}) == PM(PrimeField(11), 2, {2, 3, 0, 2}));

    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + t % 5;
        const auto m = PM::random(kF, n, rng);
        const auto c = random_poly(kF, 2 * n + 1, rng);
        CHECK(eval_matrix_poly(m, c).vec() == testing::naive_poly_eval(m.vec(), c.coeffs, n, kF.modulus()));
    }
}

TEST_CASE("keygen_party") {
    const DegreeParams params{4, 3, 2, 5, 1};
    Rng r1(99), r2(99);
    const auto a1 = keygen_party(kF, r1, params, Role::alice);
    const auto a2 = keygen_party(kF, r2, params, Role::alice);
    CHECK(a1.priv.first == a2.priv.first);
    CHECK(a1.priv.second == a2.priv.second);
    CHECK(a1.platform == a2.platform);
    CHECK(a1.priv.first.coeffs.size() == 4);
    CHECK(a1.priv.second.coeffs.size() == 3);

    const auto b = keygen_party(kF, r1, params, Role::bob);
    CHECK(b.priv.first.coeffs.size() == 6);
    CHECK(b.priv.second.coeffs.size() == 2);

    CHECK_THROWS_AS(keygen_party(kF, r1, DegreeParams{4, 0, 1, 1, 1}, Role::alice), InvalidConfig);

    // Singular draws occur with probability about n/p; 100 draws should be almost all invertible.
    Rng rng(3);
    int invertible = 0;
    for (int t = 0; t < 100; ++t) {
        const auto kp = keygen_party(kF, rng, DegreeParams::defaults(6), Role::alice);
        if (testing::naive_det(kp.platform.vec(), 6, kF.modulus()) != 0) ++invertible;
    }
    CHECK(invertible >= 90);
}

TEST_CASE("compute_public") {
    Rng rng(5);
    const auto u = PM::random(kF, 3, rng), v = PM::random(kF, 3, rng);
    CHECK(compute_public(u, v, {PP{{1}}, PP{{1}}}) == PM::identity(kF, 3));

    const auto a = random_poly(kF, 3, rng), at = random_poly(kF, 2, rng);
    const auto i3 = PM::identity(kF, 3);
    auto sum = [](const PP& p) {
        std::uint64_t s = 0;
        for (auto c : p.coeffs) s = (s + c) % kF.modulus();
        return s;
    };
    CHECK(compute_public(i3, i3, {a, at}) == PM::scalar(kF, 3, kF.mul(sum(a), sum(at))));

    SUBCASE("hand expansion over F_7, n = 2, degree 1") {
        const PrimeField f7(7);
        Rng r(8);
        for (int t = 0; t < 30; ++t) {
            const auto u7 = PM::random(f7, 2, r), v7 = PM::random(f7, 2, r);
            const PP p{{f7.sample(r), f7.sample(r)}}, q{{f7.sample(r), f7.sample(r)}};
            // (a0 I + a1 U)(ã0 I + ã1 V) = a0ã0 I + a0ã1 V + a1ã0 U + a1ã1 UV
            Mat expect(4, 0);
            const Mat uv = testing::naive_mul(u7.vec(), v7.vec(), 2, 7);
            for (std::size_t e = 0; e < 4; ++e) {
                const std::uint64_t id = (e == 0 || e == 3) ? 1 : 0;
                expect[e] = (p.coeffs[0] * q.coeffs[0] * id + p.coeffs[0] * q.coeffs[1] * v7.vec()[e] +
                             p.coeffs[1] * q.coeffs[0] * u7.vec()[e] + p.coeffs[1] * q.coeffs[1] * uv[e]) %
                            7;
            }
            CHECK(compute_public(u7, v7, {p, q}).vec() == expect);
        }
    }
    CHECK_THROWS_AS(compute_public(u, PM::identity(kF, 2), {a, at}), DimensionMismatch);
}

TEST_CASE("compute_shared") {
    Rng rng(6);
    const auto u = PM::random(kF, 4, rng), v = PM::random(kF, 4, rng), peer = PM::random(kF, 4, rng);
    CHECK(compute_shared(u, v, {PP{{1}}, PP{{1}}}, peer) == peer);

    SUBCASE("both parties agree, n <= 8, both field kinds") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const std::size_t n = 1 + seed % 8;
            const auto ex = run_exchange(kF, DegreeParams{n, 1 + seed % 3, n + 1, 2 * n, 1}, seed, true);
            CHECK(ex.keys_agree);
            CHECK(ex.k_alice == ex.k_bob);
            CHECK(*ex.transcript.oracle_K == ex.k_alice);

            const auto exc = run_exchange(ComplexField(), DegreeParams::defaults(n), seed, false);
            CHECK(exc.keys_agree);
            CHECK(exc.relative_error <= 1e-6);
            CHECK_FALSE(exc.transcript.oracle_K.has_value());
        }
    }
    SUBCASE("U = V: every factor commutes") {
        const auto a = random_poly(kF, 3, rng), at = random_poly(kF, 3, rng);
        const auto b = random_poly(kF, 3, rng), bt = random_poly(kF, 3, rng);
        const auto pub_a = compute_public(u, u, {a, at});
        const auto pub_b = compute_public(u, u, {b, bt});
        const auto ka = compute_shared(u, u, {a, at}, pub_b);
        CHECK(ka == compute_shared(u, u, {b, bt}, pub_a));
        const auto expect = eval_matrix_poly(u, a) * eval_matrix_poly(u, b) * eval_matrix_poly(u, bt) *
                            eval_matrix_poly(u, at);
        CHECK(ka == expect);
    }
}

TEST_CASE("check_noncommutativity") {
    Rng rng(7);
    const auto u = PM::random(kF, 3, rng), v = PM::random(kF, 3, rng);
    const auto c1 = random_poly(kF, 2, rng), c2 = random_poly(kF, 2, rng);
    CHECK_FALSE(check_noncommutativity(u, u, c1, c2));
    CHECK_FALSE(check_noncommutativity(u, v, PP{{4}}, c2));
    CHECK_FALSE(check_noncommutativity(u, v, c1, PP{{9}}));
    CHECK(check_noncommutativity(u, v, c1, c2));

    const PrimeField f7(7);
    const PM a(f7, 2, {1, 1, 0, 1}), b(f7, 2, {1, 0, 1, 1});
    CHECK(check_noncommutativity(a, b, PP{{0, 1}}, PP{{0, 1}}));

    const ComplexField cf;
    Rng r2(8);
    const auto cu = Matrix<ComplexField>::random(cf, 3, r2);
    const PolyCoeffs<ComplexField> cc{{{0.5, 0.1}, {1.0, -0.3}}};
    CHECK_FALSE(check_noncommutativity(cu, cu, cc, cc));
}

TEST_CASE("demonstrate_degree_collapse") {
    Rng rng(9);
    const auto u = PM::random(kF, 5, rng);
    const auto cp = char_poly(u);
    const auto r0 = demonstrate_degree_collapse(u, cp);
    CHECK(r0.equal);
    CHECK(r0.remainder.coeffs == std::vector<std::uint64_t>(5, 0));
    CHECK(eval_matrix_poly(u, cp).is_zero());

    const PP low{{1, 2, 3}};
    const auto r1 = demonstrate_degree_collapse(u, low);
    CHECK(r1.equal);
    CHECK(r1.remainder == low);

    for (int t = 0; t < 20; ++t) {
        const auto c = random_poly(kF, 15, rng);
        const auto res = demonstrate_degree_collapse(u, c);
        CHECK(res.equal);
        CHECK(res.remainder.coeffs.size() == 5);
        CHECK(testing::naive_poly_eval(u.vec(), c.coeffs, 5, kF.modulus()) ==
              testing::naive_poly_eval(u.vec(), res.remainder.coeffs, 5, kF.modulus()));
    }
    CHECK_THROWS_AS(demonstrate_degree_collapse(PM::identity(PrimeField(3), 3), PP{{1, 1, 1, 1, 1}}), ModulusTooSmall);
}

TEST_CASE("public keys lie in span{U^i V^j : i, j < n}") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const std::size_t n = 2 + seed % 5;
        const auto ex = run_exchange(kF, DegreeParams{n, 3 * n, 2, n, 3 * n}, seed, false);
        const auto& t = ex.transcript;
        const auto basis = build_span_basis(t.U, t.V);
        for (const auto& e : basis.exponents) {
            CHECK(e.k < n);
            CHECK(e.l < n);
        }
        CHECK(span_contains(basis, t.A));
        CHECK(span_contains(basis, t.B));
    }
}

TEST_CASE("run_exchange validates its inputs") {
    CHECK_THROWS_AS(run_exchange(PrimeField(3), DegreeParams::defaults(3), 1, false), InvalidConfig);
    CHECK_THROWS_AS(run_exchange(kF, DegreeParams{0, 1, 1, 1, 1}, 1, false), InvalidConfig);
    const auto ex = run_exchange(kF, DegreeParams::defaults(1), 1, true);
    CHECK(ex.transcript.n == 1);
    CHECK(ex.keys_agree);
    CHECK(DegreeParams::defaults(1).m1 == 1);
    CHECK(DegreeParams::defaults(5).j2 == 4);
}
