#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matkex/errors.hpp"
#include "matkex/matrix.hpp"
#include "matkex/scalar_field.hpp"

namespace matkex {

/// Rectangular row-major grid of scalars; coefficient matrices of linear systems.
template <class E>
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<E> data;

    Grid() = default;
    Grid(std::size_t r, std::size_t c, E fill) : rows(r), cols(c), data(r * c, fill) {}

    E& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const E& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// [U^0 = I, U^1, …, U^d_max], one multiplication per step.
template <Field F>
std::vector<Matrix<F>> power_table(const Matrix<F>& u, std::size_t d_max) {
    std::vector<Matrix<F>> out;
    out.reserve(d_max + 1);
    out.push_back(Matrix<F>::identity(u.field(), u.n()));
    for (std::size_t d = 1; d <= d_max; ++d) out.push_back(mat_mul(out.back(), u));
    return out;
}

namespace detail {

template <Field F>
double max_magnitude(const F& f, std::span<const typename F::Element> v) {
    double m = 0.0;
    for (const auto& e : v) m = std::max(m, f.magnitude(e));
    return m;
}

/// Zero test for an eliminated entry. Over ℂ the threshold scales with the
/// magnitude of the data being reduced.
template <Field F>
bool negligible(const F& f, const typename F::Element& x, double scale) {
    if constexpr (F::kind == FieldKind::prime) {
        return f.is_zero(x);
    } else {
        return f.magnitude(x) <= f.zero_tol() * std::max(1.0, scale);
    }
}

/// Column pivot: first nonzero over F_p, largest magnitude over ℂ.
template <Field F>
std::optional<std::size_t> choose_pivot(const F& f, std::span<const typename F::Element> candidates, double scale) {
    std::optional<std::size_t> best;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (negligible(f, candidates[i], scale)) continue;
        if constexpr (F::kind == FieldKind::prime) {
            return i;
        } else {
            const double mag = f.magnitude(candidates[i]);
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
    }
    return best;
}

struct Reduced {
    std::vector<std::size_t> pivot_cols;
};

/// Gauss-Jordan on g in place, restricted to the first `elim_cols` columns
/// (trailing columns are carried along). Returns the pivot columns.
template <Field F>
Reduced gauss_jordan(const F& f, Grid<typename F::Element>& g, std::size_t elim_cols) {
    using E = typename F::Element;
    const double scale = max_magnitude(f, std::span<const E>(g.data));
    Reduced out;
    std::size_t r = 0;
    std::vector<E> column(g.rows);
    for (std::size_t c = 0; c < elim_cols && r < g.rows; ++c) {
        const std::size_t cand = g.rows - r;
        for (std::size_t i = 0; i < cand; ++i) column[i] = g(r + i, c);
        auto pick = choose_pivot(f, std::span<const E>(column.data(), cand), scale);
        if (!pick) continue;
        const std::size_t pr = r + *pick;
        if (pr != r)
            for (std::size_t j = 0; j < g.cols; ++j) std::swap(g(r, j), g(pr, j));
        const E piv_inv = f.inv(g(r, c));
        g(r, c) = f.one();
        for (std::size_t j = c + 1; j < g.cols; ++j) g(r, j) = f.mul(g(r, j), piv_inv);
        for (std::size_t i = 0; i < g.rows; ++i) {
            if (i == r) continue;
            const E factor = g(i, c);
            if (f.is_zero(factor) && F::kind == FieldKind::prime) continue;
            const E neg = f.neg(factor);
            g(i, c) = f.zero();
            for (std::size_t j = c + 1; j < g.cols; ++j) g(i, j) = f.mul_add(neg, g(r, j), g(i, j));
        }
        out.pivot_cols.push_back(c);
        ++r;
    }
    return out;
}

}  // namespace detail

/// One solution of M x = rhs, free variables set to zero. Throws Inconsistent.
template <Field F>
std::vector<typename F::Element> solve_linear(const F& f, const Grid<typename F::Element>& m,
                                              std::span<const typename F::Element> rhs) {
    using E = typename F::Element;
    if (rhs.size() != m.rows)
        throw DimensionMismatch("rhs length " + std::to_string(rhs.size()) + " != rows " + std::to_string(m.rows));

    Grid<E> aug(m.rows, m.cols + 1, f.zero());
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = rhs[i];
    }
    const auto red = detail::gauss_jordan(f, aug, m.cols);
    const std::size_t rank = red.pivot_cols.size();

    const double scale = std::max(detail::max_magnitude(f, std::span<const E>(m.data)), detail::max_magnitude(f, rhs));
    for (std::size_t i = rank; i < m.rows; ++i)
        if (!detail::negligible(f, aug(i, m.cols), scale)) throw Inconsistent();

    std::vector<E> x(m.cols, f.zero());
    for (std::size_t i = 0; i < rank; ++i) x[red.pivot_cols[i]] = aug(i, m.cols);

    if constexpr (F::kind == FieldKind::complex) {
        // ‖Mx − rhs‖∞ ≤ zero_tol·(1 + ‖rhs‖∞)·(1 + ‖M‖∞·‖x‖∞) guards against silent rank misjudgement.
        double resid = 0.0, mx = 0.0, xnorm = detail::max_magnitude(f, std::span<const E>(x));
        for (std::size_t i = 0; i < m.rows; ++i) {
            E acc = -rhs[i];
            double row_abs = 0.0;
            for (std::size_t j = 0; j < m.cols; ++j) {
                acc += m(i, j) * x[j];
                row_abs += std::abs(m(i, j));
            }
            resid = std::max(resid, std::abs(acc));
            mx = std::max(mx, row_abs);
        }
        const double rhs_norm = detail::max_magnitude(f, rhs);
        if (resid > f.zero_tol() * (1.0 + rhs_norm) * (1.0 + mx * xnorm)) throw Inconsistent();
    }
    return x;
}

/// Basis of {x : M x = 0}, one vector per free column.
template <Field F>
std::vector<std::vector<typename F::Element>> nullspace_basis(const F& f, Grid<typename F::Element> m) {
    using E = typename F::Element;
    const auto red = detail::gauss_jordan(f, m, m.cols);
    std::vector<bool> is_pivot(m.cols, false);
    for (auto c : red.pivot_cols) is_pivot[c] = true;

    std::vector<std::vector<E>> basis;
    for (std::size_t free = 0; free < m.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<E> v(m.cols, f.zero());
        v[free] = f.one();
        for (std::size_t i = 0; i < red.pivot_cols.size(); ++i) v[red.pivot_cols[i]] = f.neg(m(i, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Incrementally maintained reduced row-echelon basis of a subspace of F^m.
///
/// Rows are kept sorted by pivot column; each pivot entry is 1 and its
/// column vanishes in every other row. Over F_p the pivot is the first
/// nonzero entry of its row; over ℂ it is the largest-magnitude entry of the
/// residual at insertion time. Alongside each row the state records its
/// expression as a combination of the accepted generators, so membership
/// queries also return coordinates over those generators.
template <Field F>
class RrefState {
public:
    using Element = typename F::Element;

    struct InsertResult {
        bool added = false;
        /// ‖residual‖∞ after reduction, relative to max(1, ‖v‖∞).
        double residual = 0.0;
        /// Over ℂ: the rank decision fell within a factor 10 of zero_tol.
        bool borderline = false;
    };

    RrefState(F field, std::size_t m) : field_(std::move(field)), m_(m) {}

    const F& field() const noexcept { return field_; }
    std::size_t dim() const noexcept { return m_; }
    std::size_t rank() const noexcept { return rows_.size(); }
    const std::vector<std::vector<Element>>& rows() const noexcept { return rows_; }
    const std::vector<std::size_t>& pivot_cols() const noexcept { return pivots_; }
    std::size_t borderline_decisions() const noexcept { return borderline_; }

    /// Adds v when it lies outside the current row space. O(rank·(m + rank)).
    InsertResult insert(std::span<const Element> v) {
        check_len(v);
        const F& f = field_;
        const double scale = std::max(1.0, detail::max_magnitude(f, v));

        std::vector<Element> r(v.begin(), v.end());
        std::vector<Element> coords(rows_.size(), f.zero());
        reduce(r, coords);

        InsertResult res;
        res.residual = detail::max_magnitude(f, std::span<const Element>(r)) / scale;
        if constexpr (F::kind == FieldKind::complex) {
            const double tol = f.zero_tol();
            res.borderline = res.residual > tol / 10.0 && res.residual <= tol * 10.0;
            if (res.borderline) ++borderline_;
        }
        auto pick = detail::choose_pivot(f, std::span<const Element>(r), scale);
        if (!pick || rank() == m_) return res;

        // Generator combination of the residual: e_new − Σ coords_j · combo_j.
        const std::size_t g = generators_;
        ++generators_;
        for (auto& c : combos_) c.push_back(f.zero());
        std::vector<Element> combo(generators_, f.zero());
        combo[g] = f.one();
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (f.is_zero(coords[j])) continue;
            const Element neg = f.neg(coords[j]);
            for (std::size_t t = 0; t < g; ++t) combo[t] = f.mul_add(neg, combos_[j][t], combo[t]);
        }

        const std::size_t pc = *pick;
        const Element inv = f.inv(r[pc]);
        for (auto& e : r) e = f.mul(e, inv);
        r[pc] = f.one();
        for (auto& e : combo) e = f.mul(e, inv);

        // Clear column pc from the existing rows.
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            const Element factor = rows_[j][pc];
            if (f.is_zero(factor) && F::kind == FieldKind::prime) continue;
            const Element neg = f.neg(factor);
            for (std::size_t t = 0; t < m_; ++t) rows_[j][t] = f.mul_add(neg, r[t], rows_[j][t]);
            rows_[j][pc] = f.zero();
            for (std::size_t t = 0; t < generators_; ++t) combos_[j][t] = f.mul_add(neg, combo[t], combos_[j][t]);
        }

        const auto pos = static_cast<std::size_t>(std::lower_bound(pivots_.begin(), pivots_.end(), pc) - pivots_.begin());
        pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), pc);
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(r));
        combos_.insert(combos_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(combo));
        res.added = true;
        return res;
    }

    bool contains(std::span<const Element> v) const { return coordinates(v).has_value(); }

    /// Coefficients α over the accepted generators with Σ α_i g_i = v, or
    /// nullopt when v is outside the row space.
    std::optional<std::vector<Element>> coordinates(std::span<const Element> v) const {
        check_len(v);
        const F& f = field_;
        const double scale = std::max(1.0, detail::max_magnitude(f, v));
        std::vector<Element> r(v.begin(), v.end());
        std::vector<Element> coords(rows_.size(), f.zero());
        reduce(r, coords);
        for (const auto& e : r)
            if (!detail::negligible(f, e, scale)) return std::nullopt;

        std::vector<Element> alpha(generators_, f.zero());
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (f.is_zero(coords[j]) && F::kind == FieldKind::prime) continue;
            for (std::size_t t = 0; t < generators_; ++t) alpha[t] = f.mul_add(coords[j], combos_[j][t], alpha[t]);
        }
        return alpha;
    }

private:
    void check_len(std::span<const Element> v) const {
        if (v.size() != m_)
            throw DimensionMismatch("vector length " + std::to_string(v.size()) + " != " + std::to_string(m_));
    }

    /// r ← r − Σ r[pc_j]·row_j, recording the multipliers.
    void reduce(std::vector<Element>& r, std::vector<Element>& coords) const {
        const F& f = field_;
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            const Element c = r[pivots_[j]];
            coords[j] = c;
            if (f.is_zero(c) && F::kind == FieldKind::prime) continue;
            const Element neg = f.neg(c);
            const auto& row = rows_[j];
            for (std::size_t t = 0; t < m_; ++t) r[t] = f.mul_add(neg, row[t], r[t]);
            r[pivots_[j]] = f.zero();
        }
    }

    F field_;
    std::size_t m_;
    std::vector<std::vector<Element>> rows_;
    std::vector<std::size_t> pivots_;
    std::vector<std::vector<Element>> combos_;
    std::size_t generators_ = 0;
    std::size_t borderline_ = 0;
};

/// Adds v to the state if independent; returns whether it was added.
template <Field F>
bool basis_try_insert(RrefState<F>& state, std::span<const typename F::Element> v) {
    return state.insert(v).added;
}

/// Coordinates of v over `generators`, which must be the vectors accepted by
/// `state`, in acceptance order. Throws NotInSpan.
template <Field F>
std::vector<typename F::Element> express_in_rowspace(const RrefState<F>& state, std::span<const typename F::Element> v,
                                                     const std::vector<std::vector<typename F::Element>>& generators) {
    if (generators.size() != state.rank())
        throw DimensionMismatch("expected " + std::to_string(state.rank()) + " generators, got " +
                                std::to_string(generators.size()));
    auto alpha = state.coordinates(v);
    if (!alpha) throw NotInSpan();
    return *alpha;
}

/// Coefficients (c_0, …, c_d) of Σ c_m X^m; constant term first. Trailing
/// zeros are allowed, so the length is a degree bound.
template <Field F>
struct PolyCoeffs {
    std::vector<typename F::Element> coeffs;

    std::size_t degree_bound() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    friend bool operator==(const PolyCoeffs&, const PolyCoeffs&) = default;
};

/// Monic characteristic polynomial by Faddeev–LeVerrier. Needs 1..n
/// invertible, i.e. modulus > n over F_p.
template <Field F>
PolyCoeffs<F> char_poly(const Matrix<F>& u) {
    const F& f = u.field();
    const std::size_t n = u.n();
    if constexpr (F::kind == FieldKind::prime) {
        if (f.modulus() <= n)
            throw ModulusTooSmall("characteristic polynomial of a " + std::to_string(n) + "x" + std::to_string(n) +
                                  " matrix needs modulus > " + std::to_string(n));
    }
    PolyCoeffs<F> c{std::vector<typename F::Element>(n + 1, f.zero())};
    c.coeffs[n] = f.one();

    Matrix<F> um(f, n);  // U·M_{k−1}; M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix<F> mk = um;
        for (std::size_t i = 0; i < n; ++i) mk(i, i) = f.add(mk(i, i), c.coeffs[n - k + 1]);
        um = mat_mul(u, mk);
        auto trace = f.zero();
        for (std::size_t i = 0; i < n; ++i) trace = f.add(trace, um(i, i));
        c.coeffs[n - k] = f.neg(f.mul(trace, f.inv(f.from_int(static_cast<std::int64_t>(k)))));
    }
    return c;
}

/// Remainder of p modulo the monic divisor c. When deg bound of p is already
/// below deg c, p is returned unchanged; otherwise the result has length deg c.
template <Field F>
PolyCoeffs<F> poly_mod(const PolyCoeffs<F>& p, const PolyCoeffs<F>& c, const F& f) {
    if (c.coeffs.size() < 2 || !f.equal(c.coeffs.back(), f.one())) throw NonMonicDivisor();
    const std::size_t dc = c.coeffs.size() - 1;
    if (p.coeffs.size() <= dc) return p;

    auto r = p.coeffs;
    for (std::size_t i = r.size() - 1; i >= dc; --i) {
        const auto lead = r[i];
        if (!(F::kind == FieldKind::prime && f.is_zero(lead))) {
            const auto neg = f.neg(lead);
            for (std::size_t j = 0; j <= dc; ++j) r[i - dc + j] = f.mul_add(neg, c.coeffs[j], r[i - dc + j]);
        }
        r[i] = f.zero();
        if (i == dc) break;
    }
    r.resize(dc);
    return PolyCoeffs<F>{std::move(r)};
}

}  // namespace matkex
