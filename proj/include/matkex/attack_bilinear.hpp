#pragma once

#include <cstddef>
#include <vector>

#include "matkex/linalg.hpp"
#include "matkex/matrix.hpp"
#include "matkex/protocol.hpp"

namespace matkex {

/// Linear system whose column (i, j), i-major, is vec(U^i V^j).
template <Field F>
struct BilinearSystem {
    std::size_t degree = 0;  // i, j range over 0..degree
    Grid<typename F::Element> grid;
    std::vector<typename F::Element> rhs;
};

/// Unknowns x_{ij} (from A) and y_{kl} (from B); (degree+1)² each.
template <Field F>
struct BilinearSolution {
    std::size_t degree = 0;
    Grid<typename F::Element> x;
    Grid<typename F::Element> y;
};

/// Builds the system Σ_{i,j ≤ degree} x_{ij} U^i V^j = target. The default
/// degree n−1 is enough for any honest transcript by Cayley-Hamilton.
template <Field F>
BilinearSystem<F> build_bilinear_system(const Matrix<F>& u, const Matrix<F>& v, const Matrix<F>& target,
                                        std::optional<std::size_t> degree = std::nullopt) {
    u.require_same(v);
    u.require_same(target);
    const F& f = u.field();
    const std::size_t n = u.n();
    const std::size_t d = degree.value_or(n - 1);
    const auto up = power_table(u, d);
    const auto vp = power_table(v, d);

    BilinearSystem<F> sys{d, Grid<typename F::Element>(n * n, (d + 1) * (d + 1), f.zero()), target.vec()};
    for (std::size_t i = 0; i <= d; ++i) {
        for (std::size_t j = 0; j <= d; ++j) {
            const auto prod = mat_mul(up[i], vp[j]);
            const std::size_t col = i * (d + 1) + j;
            for (std::size_t e = 0; e < n * n; ++e) sys.grid(e, col) = prod.vec()[e];
        }
    }
    return sys;
}

namespace detail {

template <Field F>
Grid<typename F::Element> unflatten(const F& f, const std::vector<typename F::Element>& flat, std::size_t d) {
    Grid<typename F::Element> g(d + 1, d + 1, f.zero());
    g.data = flat;
    return g;
}

}  // namespace detail

/// Solves both systems (free variables zeroed). Throws Inconsistent when A or
/// B lies outside span{U^i V^j}, i.e. the transcript is not protocol-honest.
template <Field F>
BilinearSolution<F> solve_bilinear(const PublicView<F>& t, std::optional<std::size_t> degree = std::nullopt) {
    const auto sa = build_bilinear_system(t.U, t.V, t.A, degree);
    const auto sb = build_bilinear_system(t.U, t.V, t.B, degree);
    auto x = solve_linear(t.field, sa.grid, std::span<const typename F::Element>(sa.rhs));
    auto y = solve_linear(t.field, sb.grid, std::span<const typename F::Element>(sb.rhs));
    return {sa.degree, detail::unflatten(t.field, x, sa.degree), detail::unflatten(t.field, y, sa.degree)};
}

/// K̂ = Σ_{i,k} x_{ik} U^i B V^k for an arbitrary solution x of the A-system.
template <Field F>
Matrix<F> recover_from_x(const PublicView<F>& t, const Grid<typename F::Element>& x) {
    const F& f = t.field;
    const std::size_t d = x.rows - 1;
    const auto up = power_table(t.U, d);
    const auto vp = power_table(t.V, d);

    std::vector<Matrix<F>> bv;
    bv.reserve(d + 1);
    for (std::size_t k = 0; k <= d; ++k) bv.push_back(mat_mul(t.B, vp[k]));

    Matrix<F> key(f, t.n);
    for (std::size_t i = 0; i <= d; ++i) {
        Matrix<F> w(f, t.n);
        for (std::size_t k = 0; k <= d; ++k) {
            if (F::kind == FieldKind::prime && f.is_zero(x(i, k))) continue;
            w.add_scaled(x(i, k), bv[k]);
        }
        key += mat_mul(up[i], w);
    }
    return key;
}

/// Recovers the shared key from public data only, via the contracted form.
template <Field F>
Matrix<F> recover_key_bilinear(const PublicView<F>& t) {
    return recover_from_x(t, solve_bilinear(t).x);
}

/// Fully expanded recombination Σ x_{ik} y_{jl} U^{i+j} V^{k+l}, used to
/// cross-check the contracted form.
template <Field F>
Matrix<F> recover_key_bilinear_expanded(const PublicView<F>& t, const BilinearSolution<F>& s) {
    const F& f = t.field;
    const std::size_t d = s.degree;
    const std::size_t span = 2 * d + 1;
    Grid<typename F::Element> c(span, span, f.zero());
    for (std::size_t i = 0; i <= d; ++i)
        for (std::size_t k = 0; k <= d; ++k)
            for (std::size_t j = 0; j <= d; ++j)
                for (std::size_t l = 0; l <= d; ++l)
                    c(i + j, k + l) = f.mul_add(s.x(i, k), s.y(j, l), c(i + j, k + l));

    const auto up = power_table(t.U, 2 * d);
    const auto vp = power_table(t.V, 2 * d);
    Matrix<F> key(f, t.n);
    for (std::size_t p = 0; p < span; ++p)
        for (std::size_t q = 0; q < span; ++q) key.add_scaled(c(p, q), mat_mul(up[p], vp[q]));
    return key;
}

}  // namespace matkex
