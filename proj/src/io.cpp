#include "matkex/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace matkex {

json field_to_json(const FieldConfig& cfg) {
    if (cfg.kind == FieldKind::prime) return json{{"kind", "prime"}, {"modulus", cfg.modulus}};
    return json{{"kind", "complex"}, {"zero_tol", cfg.zero_tol}};
}

FieldConfig field_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    FieldConfig cfg;
    if (kind == "prime") {
        cfg = FieldConfig::prime(j.at("modulus").get<std::uint64_t>());
    } else if (kind == "complex") {
        cfg = FieldConfig::complex(j.at("zero_tol").get<double>());
    } else {
        throw ParseError("unknown field kind '" + kind + "'");
    }
    cfg.validate();
    return cfg;
}

json scalar_to_json(const PrimeField&, PrimeField::Element x) { return x; }

json scalar_to_json(const ComplexField&, ComplexField::Element x) { return json::array({x.real(), x.imag()}); }

PrimeField::Element scalar_from_json(const PrimeField& f, const json& j) {
    if (!j.is_number_unsigned()) throw ParseError("prime scalar must be a nonnegative integer, got " + j.dump());
    const auto x = j.get<std::uint64_t>();
    if (!f.is_canonical(x))
        throw ParseError("residue " + std::to_string(x) + " not reduced mod " + std::to_string(f.modulus()));
    return x;
}

ComplexField::Element scalar_from_json(const ComplexField& f, const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("complex scalar must be [re, im], got " + j.dump());
    const ComplexField::Element x{j[0].get<double>(), j[1].get<double>()};
    if (!f.is_canonical(x)) throw ParseError("complex scalar is not finite");
    return x;
}

namespace {

json degrees_to_json(const DegreeParams& d) { return json::array({d.m1, d.m2, d.j1, d.j2}); }

template <Field F>
json typed_to_json(const Transcript<F>& t) {
    json j{
        {"field", field_to_json(t.field.config())},
        {"n", t.n},
        {"meta", {{"seed", t.meta.seed}, {"rng", t.meta.rng_name}, {"degrees", degrees_to_json(t.meta.degrees)}}},
        {"U", matrix_to_json(t.U)},
        {"V", matrix_to_json(t.V)},
        {"A", matrix_to_json(t.A)},
        {"B", matrix_to_json(t.B)},
    };
    if (t.oracle_K) j["oracle_K"] = matrix_to_json(*t.oracle_K);
    return j;
}

template <Field F>
Transcript<F> typed_from_json(const F& f, const json& j) {
    const auto n = j.at("n").get<std::size_t>();
    if (n == 0) throw ParseError("n must be positive");
    f.config().validate(n);
    auto read = [&](const char* key) {
        auto m = matrix_from_json(f, j.at(key));
        if (m.n() != n) throw ParseError(std::string(key) + " has side " + std::to_string(m.n()) + ", expected " + std::to_string(n));
        return m;
    };
    TranscriptMeta meta;
    meta.degrees = DegreeParams::defaults(n);
    if (j.contains("meta")) {
        const auto& mj = j.at("meta");
        meta.seed = mj.value("seed", std::uint64_t{0});
        meta.rng_name = mj.value("rng", std::string(Rng::kName));
        if (mj.contains("degrees")) {
            const auto d = mj.at("degrees").get<std::vector<std::size_t>>();
            if (d.size() != 4) throw ParseError("meta.degrees must have four entries");
            meta.degrees = {n, d[0], d[1], d[2], d[3]};
        }
    }
    Transcript<F> t{f, n, read("U"), read("V"), read("A"), read("B"), meta, {}};
    if (j.contains("oracle_K")) t.oracle_K = read("oracle_K");
    return t;
}

}  // namespace

json transcript_to_json(const AnyTranscript& t) {
    return std::visit([](const auto& tt) { return typed_to_json(tt); }, t);
}

AnyTranscript transcript_from_json(const json& j) {
    try {
        const auto cfg = field_from_json(j.at("field"));
        if (cfg.kind == FieldKind::prime) return typed_from_json(PrimeField(cfg.modulus), j);
        return typed_from_json(ComplexField(cfg.zero_tol), j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed transcript: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("malformed transcript: ") + e.what());
    } catch (const InvalidConfig& e) {
        throw ParseError(std::string("malformed transcript: ") + e.what());
    }
}

std::string dump_transcript(const AnyTranscript& t) { return transcript_to_json(t).dump() + "\n"; }

AnyTranscript parse_transcript(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return transcript_from_json(j);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json basis_to_json(const BasisFile& b) {
    json ex = json::array();
    for (const auto& e : b.exponents) ex.push_back(json::array({e.k, e.l}));
    return json{{"n", b.n}, {"field", field_to_json(b.field)}, {"exponents", std::move(ex)}, {"stop_layer", b.stop_layer}};
}

BasisFile basis_from_json(const json& j) {
    try {
        BasisFile b;
        b.n = j.at("n").get<std::size_t>();
        b.field = field_from_json(j.at("field"));
        b.stop_layer = j.value("stop_layer", std::size_t{0});
        for (const auto& e : j.at("exponents")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("exponent must be [k, l]");
            b.exponents.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
        }
        return b;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed basis file: ") + e.what());
    }
}

std::vector<std::string> structural_violations(const json& j) {
    std::vector<std::string> out;
    if (!j.is_object()) return {"document is not an object"};

    FieldConfig cfg;
    try {
        cfg = field_from_json(j.at("field"));
    } catch (const std::exception& e) {
        out.push_back(std::string("field: ") + e.what());
        return out;
    }
    if (!j.contains("n") || !j["n"].is_number_unsigned() || j["n"].get<std::size_t>() == 0) {
        out.emplace_back("n: missing or not a positive integer");
        return out;
    }
    const auto n = j["n"].get<std::size_t>();
    try {
        cfg.validate(n);
    } catch (const std::exception& e) {
        out.push_back(std::string("field: ") + e.what());
    }

    auto check_matrix = [&](const std::string& key, bool required) {
        if (!j.contains(key)) {
            if (required) out.push_back(key + ": missing");
            return;
        }
        const auto& m = j[key];
        if (!m.is_object() || !m.contains("n") || !m.contains("entries") || !m["entries"].is_array()) {
            out.push_back(key + ": not a matrix object {n, entries}");
            return;
        }
        if (!m["n"].is_number_unsigned() || m["n"].get<std::size_t>() != n)
            out.push_back(key + ": side " + m["n"].dump() + " differs from n = " + std::to_string(n));
        if (m["entries"].size() != n * n)
            out.push_back(key + ": shape violation, " + std::to_string(m["entries"].size()) + " entries, expected " +
                          std::to_string(n * n));
        std::size_t bad = 0;
        for (const auto& e : m["entries"]) {
            try {
                if (cfg.kind == FieldKind::prime)
                    scalar_from_json(PrimeField(cfg.modulus), e);
                else
                    scalar_from_json(ComplexField(cfg.zero_tol), e);
            } catch (const std::exception&) {
                ++bad;
            }
        }
        if (bad > 0) out.push_back(key + ": " + std::to_string(bad) + " non-canonical scalar(s)");
    };
    for (const char* key : {"U", "V", "A", "B"}) check_matrix(key, true);
    check_matrix("oracle_K", false);
    return out;
}

}  // namespace matkex
