#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "matkex/linalg.hpp"
#include "matkex/matrix.hpp"
#include "matkex/scalar_field.hpp"

namespace matkex {

/// Degree bounds of a, ã (Alice) and b, b̃ (Bob) for n×n platforms.
struct DegreeParams {
    std::size_t n = 1;
    std::size_t m1 = 1, m2 = 1, j1 = 1, j2 = 1;

    /// n−1 for every bound (clamped to 1): larger degrees collapse anyway.
    static DegreeParams defaults(std::size_t n) {
        const std::size_t d = n > 1 ? n - 1 : 1;
        return {n, d, d, d, d};
    }

    void validate() const {
        if (n == 0) throw InvalidConfig("n must be positive");
        if (m1 == 0 || m2 == 0 || j1 == 0 || j2 == 0) throw InvalidConfig("degree bounds must be >= 1");
    }

    friend bool operator==(const DegreeParams&, const DegreeParams&) = default;
};

enum class Role { alice, bob };

template <Field F>
struct PartyPrivate {
    PolyCoeffs<F> first;   // a or b, applied to U
    PolyCoeffs<F> second;  // ã or b̃, applied to V
};

template <Field F>
struct KeyPair {
    PartyPrivate<F> priv;
    Matrix<F> platform;  // U for Alice, V for Bob
};

struct TranscriptMeta {
    std::uint64_t seed = 0;
    std::string rng_name{Rng::kName};
    DegreeParams degrees;
};

/// What an eavesdropper sees. Attacks take only this.
template <Field F>
struct PublicView {
    F field;
    std::size_t n;
    Matrix<F> U, V, A, B;
};

template <Field F>
struct Transcript {
    F field;
    std::size_t n;
    Matrix<F> U, V, A, B;
    TranscriptMeta meta;
    std::optional<Matrix<F>> oracle_K;  // test-only; never read by attacks

    PublicView<F> public_view() const { return {field, n, U, V, A, B}; }
};

/// Σ c_m U^m by Horner's scheme; c_0 contributes c_0·I.
template <Field F>
Matrix<F> eval_matrix_poly(const Matrix<F>& u, const PolyCoeffs<F>& c) {
    const F& f = u.field();
    const std::size_t n = u.n();
    if (c.coeffs.empty()) return Matrix<F>(f, n);
    Matrix<F> acc = Matrix<F>::scalar(f, n, c.coeffs.back());
    for (std::size_t m = c.coeffs.size() - 1; m-- > 0;) {
        acc = mat_mul(acc, u);
        for (std::size_t i = 0; i < n; ++i) acc(i, i) = f.add(acc(i, i), c.coeffs[m]);
    }
    return acc;
}

template <Field F>
PolyCoeffs<F> random_poly(const F& f, std::size_t degree, Rng& rng) {
    PolyCoeffs<F> p{std::vector<typename F::Element>(degree + 1)};
    for (auto& e : p.coeffs) e = f.sample(rng);
    return p;
}

/// Draws the private vectors (first, then second) and then the platform matrix.
template <Field F>
KeyPair<F> keygen_party(const F& f, Rng& rng, const DegreeParams& params, Role role) {
    params.validate();
    const bool alice = role == Role::alice;
    auto first = random_poly(f, alice ? params.m1 : params.j1, rng);
    auto second = random_poly(f, alice ? params.m2 : params.j2, rng);
    auto platform = Matrix<F>::random(f, params.n, rng);
    return {{std::move(first), std::move(second)}, std::move(platform)};
}

/// P(U, first)·P(V, second), U-polynomial on the left for both parties.
template <Field F>
Matrix<F> compute_public(const Matrix<F>& u, const Matrix<F>& v, const PartyPrivate<F>& priv) {
    u.require_same(v);
    return mat_mul(eval_matrix_poly(u, priv.first), eval_matrix_poly(v, priv.second));
}

/// P(U, first)·peer·P(V, second).
template <Field F>
Matrix<F> compute_shared(const Matrix<F>& u, const Matrix<F>& v, const PartyPrivate<F>& priv,
                         const Matrix<F>& peer_public) {
    u.require_same(v);
    u.require_same(peer_public);
    return mat_mul(mat_mul(eval_matrix_poly(u, priv.first), peer_public), eval_matrix_poly(v, priv.second));
}

/// True iff P(U,c1)·P(V,c2) and P(V,c2)·P(U,c1) differ beyond the field's zero test.
template <Field F>
bool check_noncommutativity(const Matrix<F>& u, const Matrix<F>& v, const PolyCoeffs<F>& c1,
                            const PolyCoeffs<F>& c2) {
    const auto pu = eval_matrix_poly(u, c1);
    const auto pv = eval_matrix_poly(v, c2);
    return !(mat_mul(pu, pv) - mat_mul(pv, pu)).is_zero();
}

template <Field F>
struct DegreeCollapse {
    PolyCoeffs<F> remainder;
    bool equal = false;
};

/// Reduces c modulo the characteristic polynomial of U and checks that both
/// polynomials evaluate to the same matrix at U.
template <Field F>
DegreeCollapse<F> demonstrate_degree_collapse(const Matrix<F>& u, const PolyCoeffs<F>& c) {
    const auto r = poly_mod(c, char_poly(u), u.field());
    const bool eq = approx_equal(eval_matrix_poly(u, c), eval_matrix_poly(u, r));
    return {r, eq};
}

template <Field F>
struct ExchangeResult {
    Transcript<F> transcript;
    KeyPair<F> alice;
    KeyPair<F> bob;
    Matrix<F> k_alice;
    Matrix<F> k_bob;
    /// Exact equality over F_p; relative Frobenius error ≤ 1e-6 over ℂ.
    bool keys_agree = false;
    double relative_error = 0.0;
};

/// Runs one full exchange from a single seed: Alice's draws precede Bob's.
template <Field F>
ExchangeResult<F> run_exchange(const F& f, const DegreeParams& params, std::uint64_t seed, bool with_oracle) {
    params.validate();
    f.config().validate(params.n);
    Rng rng(seed);
    auto alice = keygen_party(f, rng, params, Role::alice);
    auto bob = keygen_party(f, rng, params, Role::bob);
    const auto& u = alice.platform;
    const auto& v = bob.platform;

    auto a_pub = compute_public(u, v, alice.priv);
    auto b_pub = compute_public(u, v, bob.priv);
    auto k_a = compute_shared(u, v, alice.priv, b_pub);
    auto k_b = compute_shared(u, v, bob.priv, a_pub);

    Transcript<F> t{f, params.n, u, v, std::move(a_pub), std::move(b_pub), {seed, std::string(Rng::kName), params}, {}};
    if (with_oracle) t.oracle_K = k_a;

    const double err = relative_frobenius_error(k_a, k_b);
    const bool agree = keys_match(k_a, k_b);
    return {std::move(t), std::move(alice), std::move(bob), std::move(k_a), std::move(k_b), agree, err};
}

}  // namespace matkex
