#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include "matkex/errors.hpp"
#include "matkex/op_counter.hpp"

namespace matkex {

enum class FieldKind { prime, complex };

inline constexpr std::uint64_t kDefaultModulus = 1'000'003;
inline constexpr double kDefaultZeroTol = 1e-9;

/// Which scalar backend to use, plus its single parameter.
struct FieldConfig {
    FieldKind kind = FieldKind::prime;
    std::uint64_t modulus = kDefaultModulus;  // prime kind only
    double zero_tol = kDefaultZeroTol;        // complex kind only

    static FieldConfig prime(std::uint64_t p = kDefaultModulus) { return {FieldKind::prime, p, kDefaultZeroTol}; }
    static FieldConfig complex(double tol = kDefaultZeroTol) { return {FieldKind::complex, 0, tol}; }

    /// Parses `prime:<p>`, `complex` or `complex:<zero_tol>`.
    static FieldConfig parse(std::string_view text);
    std::string to_string() const;

    /// Throws InvalidConfig unless the parameters are usable for n×n instances.
    void validate(std::size_t n = 0) const;

    friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t x) noexcept;

/// Seeded 64-bit stream. The output of mt19937_64 is fixed by the C++
/// standard; the mappings below avoid the implementation-defined std
/// distributions so draws agree across platforms.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform in [-1, 1).
    double symmetric_unit() {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return 2.0 * u - 1.0;
    }

private:
    std::mt19937_64 engine_;
};

/// Exact arithmetic modulo a prime p < 2^62.
class PrimeField {
public:
    using Element = std::uint64_t;
    static constexpr FieldKind kind = FieldKind::prime;

    explicit PrimeField(std::uint64_t p = kDefaultModulus) : p_(p) { config().validate(); }

    std::uint64_t modulus() const noexcept { return p_; }
    FieldConfig config() const { return FieldConfig::prime(p_); }

    Element zero() const noexcept { return 0; }
    Element one() const noexcept { return 1 % p_; }
    Element from_int(std::int64_t v) const noexcept {
        const auto m = static_cast<std::int64_t>(p_);
        auto r = v % m;
        if (r < 0) r += m;
        return static_cast<Element>(r);
    }

    Element add(Element x, Element y) const noexcept {
        ++thread_ops().adds;
        const Element s = x + y;
        return s >= p_ ? s - p_ : s;
    }
    Element sub(Element x, Element y) const noexcept {
        ++thread_ops().adds;
        return x >= y ? x - y : x + p_ - y;
    }
    Element neg(Element x) const noexcept {
        ++thread_ops().adds;
        return x == 0 ? 0 : p_ - x;
    }
    Element mul(Element x, Element y) const noexcept {
        ++thread_ops().muls;
        return static_cast<Element>(static_cast<unsigned __int128>(x) * y % p_);
    }
    /// x·y + z, counted as one mul and one add.
    Element mul_add(Element x, Element y, Element z) const noexcept {
        thread_ops().muls += 1;
        thread_ops().adds += 1;
        return static_cast<Element>((static_cast<unsigned __int128>(x) * y + z) % p_);
    }
    Element inv(Element x) const {
        ++thread_ops().invs;
        if (x == 0) throw InversionOfZero();
        // Fermat: x^(p-2).
        Element result = 1 % p_, base = x;
        for (std::uint64_t e = p_ - 2; e > 0; e >>= 1) {
            if (e & 1) result = static_cast<Element>(static_cast<unsigned __int128>(result) * base % p_);
            base = static_cast<Element>(static_cast<unsigned __int128>(base) * base % p_);
        }
        return result;
    }

    bool is_zero(Element x) const noexcept { return x == 0; }
    bool equal(Element x, Element y) const noexcept { return x == y; }
    bool is_canonical(Element x) const noexcept { return x < p_; }
    double magnitude(Element x) const noexcept { return x == 0 ? 0.0 : 1.0; }

    Element sample(Rng& rng) const { return rng.below(p_); }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint64_t p_;
};

/// IEEE double complex arithmetic with a magnitude threshold for zero tests.
class ComplexField {
public:
    using Element = std::complex<double>;
    static constexpr FieldKind kind = FieldKind::complex;

    explicit ComplexField(double zero_tol = kDefaultZeroTol) : tol_(zero_tol) { config().validate(); }

    double zero_tol() const noexcept { return tol_; }
    FieldConfig config() const { return FieldConfig::complex(tol_); }

    Element zero() const noexcept { return {0.0, 0.0}; }
    Element one() const noexcept { return {1.0, 0.0}; }
    Element from_int(std::int64_t v) const noexcept { return {static_cast<double>(v), 0.0}; }

    Element add(Element x, Element y) const {
        ++thread_ops().adds;
        return checked(x + y);
    }
    Element sub(Element x, Element y) const {
        ++thread_ops().adds;
        return checked(x - y);
    }
    Element neg(Element x) const {
        ++thread_ops().adds;
        return -x;
    }
    Element mul(Element x, Element y) const {
        ++thread_ops().muls;
        return checked(cmul(x, y));
    }
    Element mul_add(Element x, Element y, Element z) const {
        thread_ops().muls += 1;
        thread_ops().adds += 1;
        return checked(cmul(x, y) + z);
    }
    Element inv(Element x) const {
        ++thread_ops().invs;
        if (is_zero(x)) throw InversionOfZero();
        return checked(1.0 / x);
    }

    bool is_zero(Element x) const noexcept { return std::abs(x) <= tol_; }
    bool equal(Element x, Element y) const noexcept { return std::abs(x - y) <= tol_; }
    bool is_canonical(Element x) const noexcept { return std::isfinite(x.real()) && std::isfinite(x.imag()); }
    double magnitude(Element x) const noexcept { return std::abs(x); }

    Element sample(Rng& rng) const {
        const double re = rng.symmetric_unit();
        const double im = rng.symmetric_unit();
        return {re, im};
    }

    friend bool operator==(const ComplexField&, const ComplexField&) = default;

private:
    // Plain formula; std::complex operator* adds NaN recovery branches we never need.
    static Element cmul(Element x, Element y) noexcept {
        return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
    }
    static Element checked(Element x) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw NonFiniteResult();
        return x;
    }

    double tol_;
};

template <class F>
concept Field = requires(const F& f, typename F::Element x, Rng& rng) {
    { f.zero() } -> std::same_as<typename F::Element>;
    { f.one() } -> std::same_as<typename F::Element>;
    { f.add(x, x) } -> std::same_as<typename F::Element>;
    { f.sub(x, x) } -> std::same_as<typename F::Element>;
    { f.mul(x, x) } -> std::same_as<typename F::Element>;
    { f.inv(x) } -> std::same_as<typename F::Element>;
    { f.is_zero(x) } -> std::same_as<bool>;
    { f.magnitude(x) } -> std::same_as<double>;
    { f.sample(rng) } -> std::same_as<typename F::Element>;
    { f.config() } -> std::same_as<FieldConfig>;
};

static_assert(Field<PrimeField>);
static_assert(Field<ComplexField>);

}  // namespace matkex
