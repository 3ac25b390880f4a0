#include "matkex/scalar_field.hpp"

#include <charconv>
#include <sstream>

namespace matkex {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    for (b %= m; e > 0; e >>= 1) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t x) noexcept {
    if (x < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (x % q == 0) return x == q;
    }
    std::uint64_t d = x - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t y = powmod(a, d, x);
        if (y == 1 || y == x - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            y = mulmod(y, y, x);
            if (y == x - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldConfig FieldConfig::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (head == "prime") {
        if (tail.empty()) throw InvalidConfig("prime field needs a modulus: prime:<p>");
        std::uint64_t p = 0;
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
        if (ec != std::errc{} || ptr != tail.data() + tail.size())
            throw InvalidConfig("bad modulus '" + std::string(tail) + "'");
        FieldConfig cfg = prime(p);
        cfg.validate();
        return cfg;
    }
    if (head == "complex") {
        double tol = kDefaultZeroTol;
        if (!tail.empty()) {
            // from_chars for double is missing from older libstdc++.
            std::istringstream in{std::string(tail)};
            if (!(in >> tol) || !in.eof()) throw InvalidConfig("bad zero_tol '" + std::string(tail) + "'");
        }
        FieldConfig cfg = complex(tol);
        cfg.validate();
        return cfg;
    }
    throw InvalidConfig("unknown field '" + std::string(text) + "' (expected prime:<p> or complex[:<tol>])");
}

std::string FieldConfig::to_string() const {
    if (kind == FieldKind::prime) return "prime:" + std::to_string(modulus);
    std::ostringstream out;
    out.precision(17);
    out << "complex:" << zero_tol;
    return out.str();
}

void FieldConfig::validate(std::size_t n) const {
    if (kind == FieldKind::prime) {
        if (modulus >= (std::uint64_t{1} << 62)) throw InvalidConfig("modulus must be below 2^62");
        if (!is_prime_u64(modulus)) throw InvalidConfig("modulus " + std::to_string(modulus) + " is not prime");
        if (n > 0 && modulus <= n)
            throw InvalidConfig("modulus " + std::to_string(modulus) + " must exceed n = " + std::to_string(n));
    } else {
        if (!(zero_tol > 0.0) || !std::isfinite(zero_tol)) throw InvalidConfig("zero_tol must be positive and finite");
    }
}

}  // namespace matkex
