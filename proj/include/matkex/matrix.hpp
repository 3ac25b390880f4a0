#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matkex/errors.hpp"
#include "matkex/scalar_field.hpp"

namespace matkex {

/// Dense square matrix over F, row-major. Carries its field so products and
/// sums need no extra context.
template <Field F>
class Matrix {
public:
    using Element = typename F::Element;

    Matrix(F field, std::size_t n) : field_(std::move(field)), n_(n), entries_(n * n, field_.zero()) {}

    Matrix(F field, std::size_t n, std::vector<Element> entries)
        : field_(std::move(field)), n_(n), entries_(std::move(entries)) {
        if (entries_.size() != n_ * n_)
            throw DimensionMismatch("matrix of side " + std::to_string(n_) + " needs " + std::to_string(n_ * n_) +
                                    " entries, got " + std::to_string(entries_.size()));
    }

    static Matrix identity(const F& field, std::size_t n) {
        Matrix m(field, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
        return m;
    }

    static Matrix scalar(const F& field, std::size_t n, Element c) {
        Matrix m(field, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
        return m;
    }

    static Matrix random(const F& field, std::size_t n, Rng& rng) {
        Matrix m(field, n);
        for (auto& e : m.entries_) e = field.sample(rng);
        return m;
    }

    const F& field() const noexcept { return field_; }
    std::size_t n() const noexcept { return n_; }

    Element& operator()(std::size_t r, std::size_t c) { return entries_[r * n_ + c]; }
    const Element& operator()(std::size_t r, std::size_t c) const { return entries_[r * n_ + c]; }

    /// Row-major vectorization, length n².
    std::span<const Element> entries() const noexcept { return entries_; }
    const std::vector<Element>& vec() const noexcept { return entries_; }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [&](const Element& e) { return field_.is_zero(e); });
    }

    /// Entrywise identity of stored values (no tolerance).
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

    Matrix& operator+=(const Matrix& o) {
        require_same(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = field_.add(entries_[i], o.entries_[i]);
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = field_.sub(entries_[i], o.entries_[i]);
        return *this;
    }
    /// this += c·o
    Matrix& add_scaled(Element c, const Matrix& o) {
        require_same(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = field_.mul_add(c, o.entries_[i], entries_[i]);
        return *this;
    }
    Matrix& scale(Element c) {
        for (auto& e : entries_) e = field_.mul(c, e);
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(const Matrix& a, const Matrix& b) { return mat_mul(a, b); }

    void require_same(const Matrix& o) const {
        if (o.n_ != n_)
            throw DimensionMismatch("matrix sizes differ: " + std::to_string(n_) + " vs " + std::to_string(o.n_));
    }

private:
    F field_;
    std::size_t n_;
    std::vector<Element> entries_;
};

/// Standard O(n³) product.
template <Field F>
Matrix<F> mat_mul(const Matrix<F>& a, const Matrix<F>& b) {
    a.require_same(b);
    const F& f = a.field();
    const std::size_t n = a.n();
    Matrix<F> c(f, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) c(i, j) = f.mul_add(aik, b(k, j), c(i, j));
        }
    }
    return c;
}

/// ‖a − b‖_F / max(‖b‖_F, tiny). Meant for the complex backend.
template <Field F>
double relative_frobenius_error(const Matrix<F>& a, const Matrix<F>& b) {
    a.require_same(b);
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < a.vec().size(); ++i) {
        const double d = a.field().magnitude(a.vec()[i] - b.vec()[i]);
        const double r = b.field().magnitude(b.vec()[i]);
        diff += d * d;
        ref += r * r;
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
}

template <>
inline double relative_frobenius_error(const Matrix<PrimeField>& a, const Matrix<PrimeField>& b) {
    a.require_same(b);
    return a == b ? 0.0 : 1.0;
}

/// Key comparison: exact over F_p, relative Frobenius error ≤ rel_tol over ℂ.
template <Field F>
bool keys_match(const Matrix<F>& a, const Matrix<F>& b, double rel_tol = 1e-6) {
    if (a.n() != b.n()) return false;
    if constexpr (F::kind == FieldKind::prime) {
        return a == b;
    } else {
        return relative_frobenius_error(a, b) <= rel_tol;
    }
}

/// Entrywise comparison using the field's zero test on differences.
template <Field F>
bool approx_equal(const Matrix<F>& a, const Matrix<F>& b) {
    if (a.n() != b.n()) return false;
    const F& f = a.field();
    for (std::size_t i = 0; i < a.vec().size(); ++i)
        if (!f.equal(a.vec()[i], b.vec()[i])) return false;
    return true;
}

}  // namespace matkex
