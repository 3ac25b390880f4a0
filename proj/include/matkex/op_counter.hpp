#pragma once

#include <cstdint>

namespace matkex {

/// Field-operation tallies. Every scalar add/sub/neg, mul and inv performed
/// through a field object bumps the calling thread's counter.
struct OpCounter {
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    std::uint64_t invs = 0;

    std::uint64_t total() const noexcept { return adds + muls + invs; }

    OpCounter& operator+=(const OpCounter& o) noexcept {
        adds += o.adds;
        muls += o.muls;
        invs += o.invs;
        return *this;
    }
    friend OpCounter operator-(OpCounter a, const OpCounter& b) noexcept {
        a.adds -= b.adds;
        a.muls -= b.muls;
        a.invs -= b.invs;
        return a;
    }
};

namespace detail {
inline thread_local OpCounter g_ops{};
}

inline OpCounter& thread_ops() noexcept { return detail::g_ops; }

/// Measures the field operations performed on this thread during its lifetime.
class OpRegion {
public:
    OpRegion() : start_(detail::g_ops) {}
    OpCounter elapsed() const noexcept { return detail::g_ops - start_; }

private:
    OpCounter start_;
};

}  // namespace matkex
