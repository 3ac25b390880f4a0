#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "matkex/linalg.hpp"
#include "matkex/matrix.hpp"
#include "matkex/protocol.hpp"

namespace matkex {

struct Exponent {
    std::size_t k = 0;  // power of U
    std::size_t l = 0;  // power of V
    friend bool operator==(const Exponent&, const Exponent&) = default;
};

/// Basis b_i = U^{k_i} V^{l_i} of span{U^k V^l : k, l ≥ 0}, built layer by
/// layer (layer i holds the products with k + l = i).
template <Field F>
struct SpanBasis {
    std::size_t n = 0;
    std::vector<Exponent> exponents;
    std::vector<Matrix<F>> mats;
    RrefState<F> rref;
    /// Last layer that contributed a basis element; the layer after it adds nothing.
    std::size_t stop_layer = 0;
    /// Over ℂ: rank decisions that fell within a factor 10 of zero_tol.
    std::size_t borderline = 0;

    std::size_t size() const noexcept { return exponents.size(); }
    const F& field() const noexcept { return rref.field(); }
};

/// Offline phase. Reads only U and V.
template <Field F>
SpanBasis<F> build_span_basis(const Matrix<F>& u, const Matrix<F>& v) {
    u.require_same(v);
    const F& f = u.field();
    const std::size_t n = u.n();
    const std::size_t full = n * n;

    SpanBasis<F> basis{n, {}, {}, RrefState<F>(f, full), 0, 0};
    std::vector<Matrix<F>> up{Matrix<F>::identity(f, n)};
    std::vector<Matrix<F>> vp{Matrix<F>::identity(f, n)};

    for (std::size_t layer = 0;; ++layer) {
        if (layer >= up.size()) {
            up.push_back(mat_mul(up.back(), u));
            vp.push_back(mat_mul(vp.back(), v));
        }
        bool grew = false;
        for (std::size_t k = 0; k <= layer; ++k) {
            const std::size_t l = layer - k;
            auto prod = (k == 0) ? vp[l] : (l == 0) ? up[k] : mat_mul(up[k], vp[l]);
            const auto res = basis.rref.insert(prod.entries());
            if (res.borderline) ++basis.borderline;
            if (!res.added) continue;
            basis.exponents.push_back({k, l});
            basis.mats.push_back(std::move(prod));
            grew = true;
            if (basis.size() == full) break;
        }
        if (!grew) break;
        basis.stop_layer = layer;
        if (basis.size() == full) break;
    }
    return basis;
}

/// Rebuilds a basis from a persisted exponent list. Throws Error if the
/// exponents are not independent for these platform matrices.
template <Field F>
SpanBasis<F> rebuild_span_basis(const Matrix<F>& u, const Matrix<F>& v, const std::vector<Exponent>& exponents,
                                std::size_t stop_layer) {
    u.require_same(v);
    const F& f = u.field();
    const std::size_t n = u.n();
    std::size_t max_pow = 0;
    for (const auto& e : exponents) max_pow = std::max({max_pow, e.k, e.l});
    const auto up = power_table(u, max_pow);
    const auto vp = power_table(v, max_pow);

    SpanBasis<F> basis{n, {}, {}, RrefState<F>(f, n * n), stop_layer, 0};
    for (const auto& e : exponents) {
        auto prod = mat_mul(up[e.k], vp[e.l]);
        const auto res = basis.rref.insert(prod.entries());
        if (!res.added)
            throw Error("basis element U^" + std::to_string(e.k) + " V^" + std::to_string(e.l) +
                        " is dependent on its predecessors");
        basis.exponents.push_back(e);
        basis.mats.push_back(std::move(prod));
    }
    return basis;
}

template <Field F>
bool span_contains(const SpanBasis<F>& basis, const Matrix<F>& m) {
    return basis.rref.contains(m.entries());
}

/// Online step 1: α with Σ α_i b_i = M. Throws NotInSpan.
template <Field F>
std::vector<typename F::Element> express_B(const SpanBasis<F>& basis, const Matrix<F>& b) {
    if (b.n() != basis.n) throw DimensionMismatch("matrix size does not match basis");
    auto alpha = basis.rref.coordinates(b.entries());
    if (!alpha) throw NotInSpan("matrix is not in the span of the platform products");
    return *alpha;
}

/// Online step 2: K̂ = Σ α_i U^{k_i} A V^{l_i}.
template <Field F>
Matrix<F> recover_key_span(const SpanBasis<F>& basis, const std::vector<typename F::Element>& alpha,
                           const Matrix<F>& a, const Matrix<F>& u, const Matrix<F>& v) {
    u.require_same(v);
    u.require_same(a);
    if (alpha.size() != basis.size()) throw DimensionMismatch("coefficient count does not match basis size");
    const F& f = u.field();
    std::size_t max_k = 0, max_l = 0;
    for (const auto& e : basis.exponents) {
        max_k = std::max(max_k, e.k);
        max_l = std::max(max_l, e.l);
    }
    // U^k·A once per k; then one product per basis element.
    const auto up = power_table(u, max_k);
    const auto vp = power_table(v, max_l);
    std::vector<Matrix<F>> ua;
    ua.reserve(max_k + 1);
    for (const auto& p : up) ua.push_back(mat_mul(p, a));

    // Group by l so each V^l multiplies once: Σ_l (Σ_{i: l_i = l} α_i U^{k_i} A) V^l.
    std::vector<std::optional<Matrix<F>>> by_l(max_l + 1);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& e = basis.exponents[i];
        if (!by_l[e.l]) by_l[e.l].emplace(f, u.n());
        by_l[e.l]->add_scaled(alpha[i], ua[e.k]);
    }
    Matrix<F> key(f, u.n());
    for (std::size_t l = 0; l <= max_l; ++l)
        if (by_l[l]) key += mat_mul(*by_l[l], vp[l]);
    return key;
}

template <Field F>
struct SpanAttackResult {
    Matrix<F> key;
    std::size_t basis_size = 0;
    std::size_t stop_layer = 0;
    std::size_t borderline = 0;
};

/// Online phase against a prepared basis. Both A and B must lie in the span;
/// either failing means the transcript is not protocol-honest.
template <Field F>
Matrix<F> attack_span_online(const SpanBasis<F>& basis, const PublicView<F>& t) {
    if (!span_contains(basis, t.A)) throw NotInSpan("A is not in the span of the platform products");
    const auto alpha = express_B(basis, t.B);
    return recover_key_span(basis, alpha, t.A, t.U, t.V);
}

template <Field F>
SpanAttackResult<F> attack_span(const PublicView<F>& t) {
    const auto basis = build_span_basis(t.U, t.V);
    auto key = attack_span_online(basis, t);
    return {std::move(key), basis.size(), basis.stop_layer, basis.borderline};
}

}  // namespace matkex
