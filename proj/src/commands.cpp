#include "matkex/commands.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "matkex/attack_bilinear.hpp"
#include "matkex/attack_span.hpp"
#include "matkex/io.hpp"

namespace matkex {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

template <Field F>
void print_key(std::ostream& out, const char* method, const Matrix<F>& key) {
    out << json{{"method", method}, {"key", matrix_to_json(key)}}.dump() << "\n";
}

/// Reports MATCH/MISMATCH against the oracle; returns false on mismatch.
template <Field F>
bool report_oracle(std::ostream& out, const char* method, const Transcript<F>& t, const Matrix<F>& key) {
    if (!t.oracle_K) return true;
    const bool ok = keys_match(key, *t.oracle_K);
    out << method << ": " << (ok ? "MATCH" : "MISMATCH");
    if constexpr (F::kind == FieldKind::complex)
        out << " (relative error " << std::scientific << std::setprecision(3)
            << relative_frobenius_error(key, *t.oracle_K) << std::defaultfloat << ")";
    out << "\n";
    return ok;
}

template <Field F>
int attack_typed(const AttackOptions& opts, const Transcript<F>& t, std::ostream& out, std::ostream& err) {
    const auto view = t.public_view();
    bool ok = true;
    std::optional<Matrix<F>> k_bil, k_span;

    try {
        if (opts.method != AttackMethod::span) {
            k_bil = recover_key_bilinear(view);
            print_key(out, "bilinear", *k_bil);
            ok = report_oracle(out, "bilinear", t, *k_bil) && ok;
        }
        if (opts.method != AttackMethod::bilinear) {
            SpanBasis<F> basis = [&] {
                if (opts.basis_path.empty()) return build_span_basis(view.U, view.V);
                const auto bf = basis_from_json(json::parse(read_text_file(opts.basis_path)));
                if (bf.n != t.n || !(bf.field == t.field.config()))
                    throw ParseError("basis file does not match the transcript's n and field");
                return rebuild_span_basis(view.U, view.V, bf.exponents, bf.stop_layer);
            }();
            if (basis.borderline > 0)
                err << "warning: " << basis.borderline << " rank decision(s) within 10x of zero_tol\n";
            k_span = attack_span_online(basis, view);
            print_key(out, "span", *k_span);
            ok = report_oracle(out, "span", t, *k_span) && ok;
        }
    } catch (const Inconsistent& e) {
        err << "transcript not protocol-honest: " << e.what() << "\n";
        return kExitFailure;
    } catch (const NotInSpan& e) {
        err << "transcript not protocol-honest: " << e.what() << "\n";
        return kExitFailure;
    }

    if (k_bil && k_span) {
        const bool agree = keys_match(*k_bil, *k_span);
        out << "attacks agree: " << yes_no(agree) << "\n";
        ok = ok && agree;
    }
    return ok ? kExitOk : kExitFailure;
}

template <Field F>
int exchange_typed(const ExchangeOptions& opts, const F& f, std::ostream& out, std::ostream& err) {
    const DegreeParams degrees = opts.degrees.value_or(DegreeParams::defaults(opts.n));
    const auto ex = run_exchange(f, degrees, opts.seed, opts.with_oracle);

    std::ostream& info = opts.out_path.empty() ? err : out;
    info << "K_A = K_B: " << yes_no(ex.keys_agree);
    if constexpr (F::kind == FieldKind::complex)
        info << " (relative error " << std::scientific << std::setprecision(3) << ex.relative_error
             << std::defaultfloat << ")";
    info << "\n";
    if (!ex.keys_agree) {
        err << "error: parties derived different keys\n";
        return kExitFailure;
    }
    const auto text = dump_transcript(AnyTranscript{ex.transcript});
    if (opts.out_path.empty()) {
        out << text;
    } else {
        write_text_file(opts.out_path, text);
        info << "wrote " << opts.out_path << "\n";
    }
    return kExitOk;
}

template <Field F>
void verify_typed(const Transcript<F>& t, std::ostream& out, bool& ok) {
    const auto basis = build_span_basis(t.U, t.V);
    const bool a_in = span_contains(basis, t.A);
    const bool b_in = span_contains(basis, t.B);
    out << "basis size: " << basis.size() << ", stop layer: " << basis.stop_layer << "\n";
    out << "A ∈ span: " << yes_no(a_in) << ", B ∈ span: " << yes_no(b_in) << "\n";
    ok = ok && a_in && b_in;
}

}  // namespace

DegreeParams parse_degrees(const std::string& text, std::size_t n) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) throw InvalidConfig("--degrees expects m1,m2,j1,j2");
    std::size_t v[4];
    for (int i = 0; i < 4; ++i) {
        std::size_t pos = 0;
        try {
            v[i] = std::stoul(parts[i], &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != parts[i].size()) throw InvalidConfig("bad degree '" + parts[i] + "'");
    }
    DegreeParams d{n, v[0], v[1], v[2], v[3]};
    d.validate();
    return d;
}

AttackMethod parse_method(const std::string& text) {
    if (text == "bilinear") return AttackMethod::bilinear;
    if (text == "span") return AttackMethod::span;
    if (text == "both") return AttackMethod::both;
    throw InvalidConfig("unknown method '" + text + "' (bilinear, span, both)");
}

int cmd_exchange(const ExchangeOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        opts.field.validate(opts.n);
        if (opts.field.kind == FieldKind::prime) return exchange_typed(opts, PrimeField(opts.field.modulus), out, err);
        return exchange_typed(opts, ComplexField(opts.field.zero_tol), out, err);
    } catch (const InvalidConfig& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_attack(const AttackOptions& opts, std::ostream& out, std::ostream& err) {
    std::optional<AnyTranscript> t;
    try {
        t = parse_transcript(read_text_file(opts.transcript_path));
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const Error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        return std::visit([&](const auto& tt) { return attack_typed(opts, tt, out, err); }, *t);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_span_basis(const std::string& transcript_path, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
    try {
        const auto t = parse_transcript(read_text_file(transcript_path));
        const auto bf = std::visit(
            [](const auto& tt) {
                const auto basis = build_span_basis(tt.U, tt.V);
                return BasisFile{tt.n, tt.field.config(), basis.exponents, basis.stop_layer};
            },
            t);
        const auto text = basis_to_json(bf).dump() + "\n";
        if (out_path.empty()) {
            out << text;
        } else {
            write_text_file(out_path, text);
            out << "basis size " << bf.exponents.size() << ", stop layer " << bf.stop_layer << ", wrote " << out_path
                << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_verify(const std::string& transcript_path, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = read_text_file(transcript_path);
    } catch (const Error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        out << "violation: invalid JSON (" << e.what() << ")\n";
        return kExitFailure;
    }
    const auto violations = structural_violations(j);
    for (const auto& v : violations) out << "violation: " << v << "\n";
    if (!violations.empty()) return kExitFailure;
    out << "structure: ok\n";

    bool ok = true;
    try {
        const auto t = transcript_from_json(j);
        std::visit([&](const auto& tt) { verify_typed(tt, out, ok); }, t);
    } catch (const std::exception& e) {
        out << "violation: " << e.what() << "\n";
        return kExitFailure;
    }
    return ok ? kExitOk : kExitFailure;
}

int cmd_bench(const BenchOptions& opts, const std::string& jsonl_path, std::ostream& out, std::ostream& err) {
    BenchReport report;
    try {
        report = run_bench(opts);
    } catch (const InvalidConfig& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    out << bench_to_table(report);
    if (!jsonl_path.empty()) {
        try {
            write_text_file(jsonl_path, bench_to_jsonl(report));
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitFailure;
        }
    }
    for (const auto& r : report.records)
        if (!r.all_recovered) return kExitFailure;
    return kExitOk;
}

}  // namespace matkex
