#include "matkex/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "matkex/attack_bilinear.hpp"
#include "matkex/attack_span.hpp"
#include "matkex/protocol.hpp"

namespace matkex {

namespace {

struct CellResult {
    OpCounter offline, online, solve, recover;
    double t_offline = 0, t_online = 0, t_solve = 0, t_recover = 0;
    bool recovered = false;
};

template <class Fn>
auto timed(double& seconds, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = fn();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

template <Field F>
CellResult run_cell(const F& f, std::size_t n, std::uint64_t seed) {
    const auto ex = run_exchange(f, DegreeParams::defaults(n), seed, false);
    const auto view = ex.transcript.public_view();
    CellResult r;

    {
        OpRegion region;
        const auto basis = timed(r.t_offline, [&] { return build_span_basis(view.U, view.V); });
        r.offline = region.elapsed();

        OpRegion online;
        const auto k_span = timed(r.t_online, [&] {
            const auto alpha = express_B(basis, view.B);
            return recover_key_span(basis, alpha, view.A, view.U, view.V);
        });
        r.online = online.elapsed();
        r.recovered = keys_match(k_span, ex.k_alice);
    }
    {
        OpRegion solve;
        const auto sol = timed(r.t_solve, [&] { return solve_bilinear(view); });
        r.solve = solve.elapsed();

        OpRegion recover;
        const auto k_bil = timed(r.t_recover, [&] { return recover_from_x(view, sol.x); });
        r.recover = recover.elapsed();
        r.recovered = r.recovered && keys_match(k_bil, ex.k_alice);
    }
    return r;
}

}  // namespace

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidConfig("slope fit: length mismatch");
    if (std::set<double>(xs.begin(), xs.end()).size() < 3) throw InvalidConfig("slope fit: need >= 3 distinct sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0) || !(ys[i] > 0)) throw InvalidConfig("slope fit: values must be positive");
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

BenchReport run_bench(const BenchOptions& opts) {
    if (std::set<std::size_t>(opts.sizes.begin(), opts.sizes.end()).size() < 3)
        throw InvalidConfig("need >= 3 sizes");
    if (opts.seeds_per_n == 0) throw InvalidConfig("need >= 1 seed per size");
    const std::size_t max_n = *std::max_element(opts.sizes.begin(), opts.sizes.end());
    opts.field.validate(max_n);
    for (auto n : opts.sizes)
        if (n == 0) throw InvalidConfig("sizes must be positive");

    const std::size_t cells = opts.sizes.size() * opts.seeds_per_n;
    std::vector<CellResult> results(cells);
    std::atomic<std::size_t> next{0};

    // Each worker owns its thread-local counter; cells never share one.
    auto worker = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < cells;) {
            const std::size_t n = opts.sizes[c / opts.seeds_per_n];
            const std::uint64_t seed = opts.base_seed + 1'000'003ull * n + c % opts.seeds_per_n;
            if (opts.field.kind == FieldKind::prime)
                results[c] = run_cell(PrimeField(opts.field.modulus), n, seed);
            else
                results[c] = run_cell(ComplexField(opts.field.zero_tol), n, seed);
        }
    };
    std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, cells);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BenchReport report{opts.field, {}, {}};
    for (std::size_t si = 0; si < opts.sizes.size(); ++si) {
        BenchRecord rec;
        rec.n = opts.sizes[si];
        rec.seeds = opts.seeds_per_n;
        const double k = static_cast<double>(opts.seeds_per_n);
        for (std::size_t s = 0; s < opts.seeds_per_n; ++s) {
            const auto& r = results[si * opts.seeds_per_n + s];
            rec.span_offline.ops += static_cast<double>(r.offline.total()) / k;
            rec.span_online.ops += static_cast<double>(r.online.total()) / k;
            rec.bilinear_solve.ops += static_cast<double>(r.solve.total()) / k;
            rec.bilinear_recover.ops += static_cast<double>(r.recover.total()) / k;
            rec.span_offline.seconds += r.t_offline / k;
            rec.span_online.seconds += r.t_online / k;
            rec.bilinear_solve.seconds += r.t_solve / k;
            rec.bilinear_recover.seconds += r.t_recover / k;
            rec.all_recovered = rec.all_recovered && r.recovered;
        }
        report.records.push_back(rec);
    }

    std::vector<double> xs, off, on, sol, rec, tot;
    for (const auto& r : report.records) {
        xs.push_back(static_cast<double>(r.n));
        off.push_back(r.span_offline.ops);
        on.push_back(r.span_online.ops);
        sol.push_back(r.bilinear_solve.ops);
        rec.push_back(r.bilinear_recover.ops);
        tot.push_back(r.bilinear_solve.ops + r.bilinear_recover.ops);
    }
    report.slopes = {loglog_slope(xs, off), loglog_slope(xs, on), loglog_slope(xs, sol), loglog_slope(xs, rec),
                     loglog_slope(xs, tot)};
    return report;
}

std::string bench_to_jsonl(const BenchReport& report) {
    using nlohmann::json;
    auto phase = [](const PhaseCost& p) { return json{{"ops", p.ops}, {"seconds", p.seconds}}; };
    std::ostringstream out;
    for (const auto& r : report.records) {
        out << json{{"type", "record"},
                    {"n", r.n},
                    {"seeds", r.seeds},
                    {"field", report.field.to_string()},
                    {"span_offline", phase(r.span_offline)},
                    {"span_online", phase(r.span_online)},
                    {"bilinear_solve", phase(r.bilinear_solve)},
                    {"bilinear_recover", phase(r.bilinear_recover)},
                    {"all_recovered", r.all_recovered}}
                   .dump()
            << "\n";
    }
    const auto& s = report.slopes;
    out << json{{"type", "slopes"},
                {"span_offline", s.span_offline},
                {"span_online", s.span_online},
                {"bilinear_solve", s.bilinear_solve},
                {"bilinear_recover", s.bilinear_recover},
                {"bilinear_total", s.bilinear_total},
                {"claimed", {{"span_offline", 8}, {"span_online", 6}, {"bilinear_solve", 6}, {"bilinear_total", 7}}}}
               .dump()
        << "\n";
    return out.str();
}

std::string bench_to_table(const BenchReport& report) {
    std::ostringstream out;
    out << "field " << report.field.to_string() << "\n";
    out << std::setw(5) << "n" << std::setw(16) << "span_offline" << std::setw(16) << "span_online" << std::setw(16)
        << "bil_solve" << std::setw(16) << "bil_recover" << std::setw(12) << "wall_s" << "  keys\n";
    for (const auto& r : report.records) {
        const double wall =
            r.span_offline.seconds + r.span_online.seconds + r.bilinear_solve.seconds + r.bilinear_recover.seconds;
        out << std::setw(5) << r.n << std::setprecision(6) << std::setw(16) << r.span_offline.ops << std::setw(16)
            << r.span_online.ops << std::setw(16) << r.bilinear_solve.ops << std::setw(16) << r.bilinear_recover.ops
            << std::setw(12) << std::setprecision(4) << wall << "  " << (r.all_recovered ? "ok" : "FAIL") << "\n";
    }
    const auto& s = report.slopes;
    out << std::fixed << std::setprecision(2);
    out << "log-log slopes (measured vs claimed upper bound)\n";
    out << "  span offline      " << s.span_offline << "  vs 8\n";
    out << "  span online       " << s.span_online << "  vs 6\n";
    out << "  bilinear solve    " << s.bilinear_solve << "  vs 6\n";
    out << "  bilinear recover  " << s.bilinear_recover << "\n";
    out << "  bilinear overall  " << s.bilinear_total << "  vs 7\n";
    return out.str();
}

}  // namespace matkex
