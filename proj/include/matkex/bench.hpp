#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matkex/op_counter.hpp"
#include "matkex/scalar_field.hpp"

namespace matkex {

/// Field-operation totals and wall time for one measured phase.
struct PhaseCost {
    double ops = 0.0;  // mean over seeds
    double seconds = 0.0;
};

struct BenchRecord {
    std::size_t n = 0;
    std::size_t seeds = 0;
    PhaseCost span_offline;
    PhaseCost span_online;
    PhaseCost bilinear_solve;    // build + solve of both systems
    PhaseCost bilinear_recover;  // contracted recombination
    bool all_recovered = true;   // both attacks reproduced the shared key in every cell
};

struct BenchSlopes {
    double span_offline = 0.0;
    double span_online = 0.0;
    double bilinear_solve = 0.0;
    double bilinear_recover = 0.0;
    double bilinear_total = 0.0;
};

struct BenchReport {
    FieldConfig field;
    std::vector<BenchRecord> records;
    BenchSlopes slopes;
};

struct BenchOptions {
    std::vector<std::size_t> sizes;
    std::size_t seeds_per_n = 1;
    FieldConfig field = FieldConfig::prime();
    std::uint64_t base_seed = 1;
    std::size_t threads = 0;  // 0: hardware concurrency
};

/// Least-squares slope of log y against log x. Needs ≥ 3 distinct x.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Throws InvalidConfig for fewer than three distinct sizes.
BenchReport run_bench(const BenchOptions& opts);

/// One JSON object per line: a record per size, then a slopes line.
std::string bench_to_jsonl(const BenchReport& report);
std::string bench_to_table(const BenchReport& report);

}  // namespace matkex
