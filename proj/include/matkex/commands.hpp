#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "matkex/bench.hpp"
#include "matkex/protocol.hpp"

namespace matkex {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // MISMATCH, verification failure, dishonest transcript
inline constexpr int kExitUsage = 2;

struct ExchangeOptions {
    std::uint64_t seed = 0;
    std::size_t n = 4;
    FieldConfig field = FieldConfig::prime();
    std::optional<DegreeParams> degrees;  // defaults to n−1 each
    std::string out_path;                 // empty: transcript goes to `out`
    bool with_oracle = false;
};

enum class AttackMethod { bilinear, span, both };

struct AttackOptions {
    std::string transcript_path;
    AttackMethod method = AttackMethod::both;
    std::string basis_path;  // optional precomputed offline phase (span only)
};

/// Parses "m1,m2,j1,j2" for an n×n instance.
DegreeParams parse_degrees(const std::string& text, std::size_t n);
AttackMethod parse_method(const std::string& text);

int cmd_exchange(const ExchangeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err);
int cmd_span_basis(const std::string& transcript_path, const std::string& out_path, std::ostream& out,
                   std::ostream& err);
int cmd_verify(const std::string& transcript_path, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, const std::string& jsonl_path, std::ostream& out, std::ostream& err);

}  // namespace matkex
