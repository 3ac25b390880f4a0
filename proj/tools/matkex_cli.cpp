// matkex: run matrix-polynomial key exchanges, attack transcripts, and
// measure field-operation counts of both attacks.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matkex/commands.hpp"

int main(int argc, char** argv) {
    using namespace matkex;

    CLI::App app{"Matrix-polynomial key exchange and its linear-algebra attacks"};
    app.require_subcommand(1);

    std::string field_arg = "prime:" + std::to_string(kDefaultModulus);

    ExchangeOptions ex;
    std::string degrees;
    auto* exchange = app.add_subcommand("exchange", "run one exchange and write its transcript");
    exchange->add_option("--seed", ex.seed, "64-bit RNG seed");
    exchange->add_option("--n", ex.n, "matrix size")->check(CLI::PositiveNumber);
    exchange->add_option("--field", field_arg, "prime:<p> or complex[:<zero_tol>]");
    exchange->add_option("--degrees", degrees, "m1,m2,j1,j2 (default n-1 each)");
    exchange->add_option("--out", ex.out_path, "transcript path (default stdout)");
    exchange->add_flag("--with-oracle", ex.with_oracle, "store the shared key for test comparisons");

    AttackOptions at;
    std::string method = "both";
    auto* attack = app.add_subcommand("attack", "recover the shared key from a transcript");
    attack->add_option("transcript", at.transcript_path)->required();
    attack->add_option("--method", method, "bilinear, span or both")
        ->check(CLI::IsMember({"bilinear", "span", "both"}));
    attack->add_option("--basis", at.basis_path, "precomputed span basis (from span-basis)");

    std::string sb_in, sb_out;
    auto* span_basis = app.add_subcommand("span-basis", "offline phase: build and save the span basis");
    span_basis->add_option("transcript", sb_in)->required();
    span_basis->add_option("--out", sb_out, "basis path (default stdout)");

    std::string verify_in;
    auto* verify = app.add_subcommand("verify", "structural and span-membership checks");
    verify->add_option("transcript", verify_in)->required();

    BenchOptions bo;
    std::string jsonl;
    auto* bench = app.add_subcommand("bench", "field-operation counts and log-log slopes");
    bench->add_option("--sizes", bo.sizes, "matrix sizes (>= 3 distinct)")->required()->delimiter(',');
    bench->add_option("--seeds", bo.seeds_per_n, "seeds per size")->check(CLI::PositiveNumber);
    bench->add_option("--field", field_arg, "prime:<p> or complex[:<zero_tol>]");
    bench->add_option("--base-seed", bo.base_seed, "seed offset");
    bench->add_option("--threads", bo.threads, "worker threads (0 = all cores)");
    bench->add_option("--out", jsonl, "line-delimited JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*exchange) {
            ex.field = FieldConfig::parse(field_arg);
            if (!degrees.empty()) ex.degrees = parse_degrees(degrees, ex.n);
            return cmd_exchange(ex, std::cout, std::cerr);
        }
        if (*attack) {
            at.method = parse_method(method);
            return cmd_attack(at, std::cout, std::cerr);
        }
        if (*span_basis) return cmd_span_basis(sb_in, sb_out, std::cout, std::cerr);
        if (*verify) return cmd_verify(verify_in, std::cout, std::cerr);
        if (*bench) {
            bo.field = FieldConfig::parse(field_arg);
            return cmd_bench(bo, jsonl, std::cout, std::cerr);
        }
    } catch (const InvalidConfig& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
