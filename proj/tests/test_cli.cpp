#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "matkex/bench.hpp"
#include "matkex/commands.hpp"
#include "matkex/io.hpp"
#include "test_support.hpp"

using namespace matkex;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("matkex_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

template <class Fn>
Run capture(Fn&& fn) {
    std::ostringstream out, err;
    const int code = fn(out, err);
    return {code, out.str(), err.str()};
}

Run exchange(const ExchangeOptions& o) {
    return capture([&](auto& out, auto& err) { return cmd_exchange(o, out, err); });
}
Run attack(const std::string& path, AttackMethod m, const std::string& basis = "") {
    return capture([&](auto& out, auto& err) { return cmd_attack({path, m, basis}, out, err); });
}
Run verify(const std::string& path) {
    return capture([&](auto& out, auto& err) { return cmd_verify(path, out, err); });
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("exchange command") {
    TempDir dir;
    SUBCASE("deterministic output") {
        ExchangeOptions o{7, 4, FieldConfig::prime(), {}, dir.file("a.json"), true};
        REQUIRE(exchange(o).code == kExitOk);
        o.out_path = dir.file("b.json");
        REQUIRE(exchange(o).code == kExitOk);
        CHECK(read_text_file(dir.file("a.json")) == read_text_file(dir.file("b.json")));

        const auto stdout_run = exchange({7, 4, FieldConfig::prime(), {}, "", true});
        CHECK(stdout_run.out == read_text_file(dir.file("a.json")));
        CHECK(contains(stdout_run.err, "K_A = K_B: yes"));
    }
    SUBCASE("n = 1") {
        const auto r = exchange({3, 1, FieldConfig::prime(), {}, "", true});
        REQUIRE(r.code == kExitOk);
        const auto t = std::get<Transcript<PrimeField>>(parse_transcript(r.out));
        CHECK(t.n == 1);
        CHECK(t.oracle_K->vec().size() == 1);
    }
    SUBCASE("complex field reports the agreement error") {
        const auto r = exchange({5, 4, FieldConfig::complex(), {}, dir.file("c.json"), false});
        CHECK(r.code == kExitOk);
        CHECK(contains(r.out, "K_A = K_B: yes (relative error"));
    }
    SUBCASE("explicit degrees are recorded") {
        const auto r = exchange({5, 3, FieldConfig::prime(), parse_degrees("9,1,2,7", 3), "", false});
        REQUIRE(r.code == kExitOk);
        const auto t = std::get<Transcript<PrimeField>>(parse_transcript(r.out));
        CHECK(t.meta.degrees == DegreeParams{3, 9, 1, 2, 7});
        CHECK_FALSE(t.oracle_K.has_value());
    }
    SUBCASE("modulus not above n is a usage error") {
        CHECK(exchange({1, 5, FieldConfig::prime(5), {}, "", false}).code == kExitUsage);
    }
}

TEST_CASE("flag parsing helpers") {
    CHECK(parse_degrees("1,2,3,4", 5) == DegreeParams{5, 1, 2, 3, 4});
    CHECK_THROWS_AS(parse_degrees("1,2,3", 5), InvalidConfig);
    CHECK_THROWS_AS(parse_degrees("1,2,x,4", 5), InvalidConfig);
    CHECK_THROWS_AS(parse_degrees("1,0,3,4", 5), InvalidConfig);
    CHECK(parse_method("span") == AttackMethod::span);
    CHECK_THROWS_AS(parse_method("guess"), InvalidConfig);
}

TEST_CASE("attack command") {
    TempDir dir;
    const auto path = dir.file("t.json");
    REQUIRE(exchange({11, 5, FieldConfig::prime(), {}, path, true}).code == kExitOk);

    SUBCASE("each method matches the oracle") {
        for (auto m : {AttackMethod::bilinear, AttackMethod::span}) {
            const auto r = attack(path, m);
            CHECK(r.code == kExitOk);
            CHECK(contains(r.out, "MATCH"));
            CHECK_FALSE(contains(r.out, "MISMATCH"));
        }
        const auto both = attack(path, AttackMethod::both);
        CHECK(both.code == kExitOk);
        CHECK(contains(both.out, "attacks agree: yes"));
    }
    SUBCASE("wrong oracle is a mismatch") {
        auto t = std::get<Transcript<PrimeField>>(parse_transcript(read_text_file(path)));
        (*t.oracle_K)(0, 0) = t.field.add((*t.oracle_K)(0, 0), 1);
        write_text_file(path, dump_transcript(t));
        const auto r = attack(path, AttackMethod::span);
        CHECK(r.code == kExitFailure);
        CHECK(contains(r.out, "span: MISMATCH"));
    }
    SUBCASE("off-span transcripts are flagged as dishonest") {
        int found = 0;
        for (std::uint64_t seed = 0; seed < 200 && found < 3; ++seed) {
            const auto c = testing::find_off_span_case(seed);
            if (!c) continue;
            ++found;
            for (const auto* bad : {&c->bad_a, &c->bad_b}) {
                write_text_file(path, dump_transcript(*bad));
                for (auto m : {AttackMethod::bilinear, AttackMethod::span, AttackMethod::both}) {
                    const auto r = attack(path, m);
                    CHECK(r.code == kExitFailure);
                    CHECK(contains(r.err, "not protocol-honest"));
                }
            }
        }
        CHECK(found == 3);
    }
    SUBCASE("precomputed basis") {
        const auto bpath = dir.file("basis.json");
        const auto sb = capture([&](auto& out, auto& err) { return cmd_span_basis(path, bpath, out, err); });
        REQUIRE(sb.code == kExitOk);
        const auto r = attack(path, AttackMethod::span, bpath);
        CHECK(r.code == kExitOk);
        CHECK(contains(r.out, "span: MATCH"));

        // The file stores exponents only, so it is rebuilt against the transcript's
        // own platform; a basis for another size does not apply.
        const auto other = dir.file("other.json");
        REQUIRE(exchange({12, 4, FieldConfig::prime(), {}, other, true}).code == kExitOk);
        const auto r2 = attack(other, AttackMethod::span, bpath);
        CHECK(r2.code != kExitOk);
    }
    SUBCASE("complex transcripts") {
        const auto cpath = dir.file("c.json");
        REQUIRE(exchange({13, 5, FieldConfig::complex(), {}, cpath, true}).code == kExitOk);
        const auto r = attack(cpath, AttackMethod::both);
        CHECK(r.code == kExitOk);
        CHECK(contains(r.out, "attacks agree: yes"));
    }
    SUBCASE("missing and malformed files") {
        CHECK(attack(dir.file("nope.json"), AttackMethod::both).code == kExitUsage);
        write_text_file(path, "{not json");
        CHECK(attack(path, AttackMethod::both).code == kExitFailure);
    }
}

TEST_CASE("verify command") {
    TempDir dir;
    const auto path = dir.file("t.json");
    REQUIRE(exchange({21, 4, FieldConfig::prime(), {}, path, true}).code == kExitOk);

    const auto ok = verify(path);
    CHECK(ok.code == kExitOk);
    CHECK(contains(ok.out, "structure: ok"));
    CHECK(contains(ok.out, "A ∈ span: yes, B ∈ span: yes"));

    SUBCASE("shape violation") {
        auto j = json::parse(read_text_file(path));
        j["A"]["entries"].erase(0);
        write_text_file(path, j.dump());
        const auto r = verify(path);
        CHECK(r.code == kExitFailure);
        CHECK(contains(r.out, "A: shape violation"));
    }
    SUBCASE("non-canonical residue") {
        auto j = json::parse(read_text_file(path));
        j["U"]["entries"][0] = 1'000'003;
        write_text_file(path, j.dump());
        const auto r = verify(path);
        CHECK(r.code == kExitFailure);
        CHECK(contains(r.out, "U: 1 non-canonical scalar(s)"));
    }
    SUBCASE("off-span B") {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const auto c = testing::find_off_span_case(seed);
            if (!c) continue;
            write_text_file(path, dump_transcript(c->bad_b));
            const auto r = verify(path);
            CHECK(r.code == kExitFailure);
            CHECK(contains(r.out, "A ∈ span: yes, B ∈ span: no"));
            break;
        }
    }
    SUBCASE("unknown field") {
        write_text_file(path, R"({"field":{"kind":"octonion"},"n":2})");
        CHECK(verify(path).code == kExitFailure);
    }
}

TEST_CASE("transcript text form round-trips losslessly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 1 + seed % 6;
        const auto p = run_exchange(PrimeField(), DegreeParams::defaults(n), seed, seed % 2 == 0).transcript;
        const auto text = dump_transcript(p);
        CHECK(dump_transcript(parse_transcript(text)) == text);

        const auto c = run_exchange(ComplexField(1e-10), DegreeParams::defaults(n), seed, true).transcript;
        const auto back = std::get<Transcript<ComplexField>>(parse_transcript(dump_transcript(c)));
        CHECK(back.U == c.U);  // bitwise equal doubles
        CHECK(back.A == c.A);
        CHECK(*back.oracle_K == *c.oracle_K);
        CHECK(back.field.zero_tol() == 1e-10);
        CHECK(back.meta.seed == seed);
        CHECK(back.meta.rng_name == "mt19937_64");
    }
    CHECK_THROWS_AS(parse_transcript(R"({"field":{"kind":"prime","modulus":7},"n":2,"U":{"n":2,"entries":[1,2,3]}})"),
                    ParseError);
    CHECK_THROWS_AS(parse_transcript(R"({"field":{"kind":"prime","modulus":2},"n":2})"), ParseError);
}

TEST_CASE("basis file round trip") {
    const BasisFile b{3, FieldConfig::prime(101), {{0, 0}, {1, 0}, {0, 1}}, 1};
    const auto back = basis_from_json(basis_to_json(b));
    CHECK(back.n == 3);
    CHECK(back.field == b.field);
    CHECK(back.exponents == b.exponents);
    CHECK(back.stop_layer == 1);
    CHECK_THROWS_AS(basis_from_json(json::parse(R"({"n":2})")), ParseError);
}

TEST_CASE("bench") {
    SUBCASE("needs three sizes") {
        const auto r = capture([](auto& out, auto& err) {
            return cmd_bench(BenchOptions{{4, 8}, 1, FieldConfig::prime(), 1, 1}, "", out, err);
        });
        CHECK(r.code == kExitUsage);
        CHECK(contains(r.err, "need >= 3 sizes"));
        CHECK_THROWS_AS(run_bench(BenchOptions{{4, 4, 8}, 1, FieldConfig::prime(), 1, 1}), InvalidConfig);
    }
    SUBCASE("op counts grow with n and slopes respect the claimed bounds") {
        const auto report = run_bench(BenchOptions{{4, 6, 8, 12, 16}, 1, FieldConfig::prime(), 1, 0});
        for (std::size_t i = 1; i < report.records.size(); ++i) {
            CHECK(report.records[i].span_offline.ops >= report.records[i - 1].span_offline.ops);
            CHECK(report.records[i].bilinear_solve.ops >= report.records[i - 1].bilinear_solve.ops);
        }
        for (const auto& r : report.records) CHECK(r.all_recovered);
        CHECK(report.slopes.span_offline > 0);
        CHECK(report.slopes.span_offline <= 8.5);
        CHECK(report.slopes.span_online > 0);
        CHECK(report.slopes.span_online <= 6.5);
        CHECK(report.slopes.bilinear_solve > 0);
        CHECK(report.slopes.bilinear_solve <= 6.5);

        const auto jsonl = bench_to_jsonl(report);
        std::istringstream in(jsonl);
        std::string line;
        int records = 0, slopes = 0;
        while (std::getline(in, line)) {
            const auto j = json::parse(line);
            (j["type"] == "record" ? records : slopes)++;
        }
        CHECK(records == 5);
        CHECK(slopes == 1);
    }
    SUBCASE("thread count does not change op counts") {
        const BenchOptions one{{2, 3, 4}, 2, FieldConfig::prime(), 5, 1};
        BenchOptions many = one;
        many.threads = 4;
        const auto a = run_bench(one), b = run_bench(many);
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            CHECK(a.records[i].span_offline.ops == b.records[i].span_offline.ops);
            CHECK(a.records[i].bilinear_solve.ops == b.records[i].bilinear_solve.ops);
        }
    }
    SUBCASE("slope fit") {
        CHECK(loglog_slope({1, 2, 4}, {3, 24, 192}) == doctest::Approx(3.0));
        CHECK_THROWS_AS(loglog_slope({1, 1, 2}, {1, 1, 2}), InvalidConfig);
    }
}

TEST_CASE("Gauss elimination on k x k systems is cubic in op count") {
    const PrimeField f;
    Rng rng(31);
    std::vector<double> ks, ops;
    for (std::size_t k : {16, 32, 64, 128}) {
        Grid<std::uint64_t> m(k, k, 0);
        for (auto& e : m.data) e = f.sample(rng);
        std::vector<std::uint64_t> rhs(k);
        for (auto& e : rhs) e = f.sample(rng);
        OpRegion region;
        solve_linear(f, m, std::span<const std::uint64_t>(rhs));
        ks.push_back(static_cast<double>(k));
        ops.push_back(static_cast<double>(region.elapsed().total()));
    }
    const double slope = loglog_slope(ks, ops);
    CHECK(slope > 2.5);
    CHECK(slope <= 3.3);
}
