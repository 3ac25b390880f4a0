#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "matkex/attack_bilinear.hpp"
#include "matkex/attack_span.hpp"
#include "matkex/bench.hpp"
#include "matkex/io.hpp"
#include "matkex/protocol.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace matkex;

namespace {

std::string exchange(std::size_t n, std::uint64_t seed, const std::string& field,
                     std::optional<std::vector<std::size_t>> degrees, bool with_oracle) {
    const auto cfg = FieldConfig::parse(field);
    cfg.validate(n);
    DegreeParams d = DegreeParams::defaults(n);
    if (degrees) {
        if (degrees->size() != 4) throw InvalidConfig("degrees must be [m1, m2, j1, j2]");
        d = {n, (*degrees)[0], (*degrees)[1], (*degrees)[2], (*degrees)[3]};
    }
    auto run = [&](const auto& f) {
        const auto ex = run_exchange(f, d, seed, with_oracle);
        if (!ex.keys_agree) throw Error("parties derived different keys");
        return dump_transcript(AnyTranscript{ex.transcript});
    };
    if (cfg.kind == FieldKind::prime) return run(PrimeField(cfg.modulus));
    return run(ComplexField(cfg.zero_tol));
}

std::string recover_key(const std::string& transcript, const std::string& method) {
    const auto t = parse_transcript(transcript);
    return std::visit(
        [&](const auto& tt) {
            const auto view = tt.public_view();
            if (method == "bilinear") return matrix_to_json(recover_key_bilinear(view)).dump();
            if (method == "span") return matrix_to_json(attack_span(view).key).dump();
            throw InvalidConfig("method must be 'bilinear' or 'span'");
        },
        t);
}

py::dict verify(const std::string& transcript) {
    const auto t = parse_transcript(transcript);
    py::dict out;
    std::visit(
        [&](const auto& tt) {
            const auto basis = build_span_basis(tt.U, tt.V);
            out["basis_size"] = basis.size();
            out["stop_layer"] = basis.stop_layer;
            out["a_in_span"] = span_contains(basis, tt.A);
            out["b_in_span"] = span_contains(basis, tt.B);
        },
        t);
    return out;
}

std::string span_basis(const std::string& transcript) {
    const auto t = parse_transcript(transcript);
    return std::visit(
        [](const auto& tt) {
            const auto basis = build_span_basis(tt.U, tt.V);
            return basis_to_json(BasisFile{tt.n, tt.field.config(), basis.exponents, basis.stop_layer}).dump();
        },
        t);
}

Matrix<PrimeField> prime_matrix(const std::vector<std::vector<std::uint64_t>>& rows, std::uint64_t modulus) {
    const PrimeField f(modulus);
    std::vector<std::uint64_t> entries;
    for (const auto& r : rows) {
        if (r.size() != rows.size()) throw DimensionMismatch("matrix must be square");
        for (auto x : r) entries.push_back(x % modulus);
    }
    return Matrix<PrimeField>(f, rows.size(), std::move(entries));
}

std::vector<std::uint64_t> char_poly_prime(const std::vector<std::vector<std::uint64_t>>& rows, std::uint64_t modulus) {
    return char_poly(prime_matrix(rows, modulus)).coeffs;
}

std::vector<std::uint64_t> poly_mod_prime(const std::vector<std::uint64_t>& p, const std::vector<std::uint64_t>& c,
                                          std::uint64_t modulus) {
    const PrimeField f(modulus);
    return poly_mod(PolyCoeffs<PrimeField>{p}, PolyCoeffs<PrimeField>{c}, f).coeffs;
}

std::string bench(const std::vector<std::size_t>& sizes, std::size_t seeds, const std::string& field,
                  std::uint64_t base_seed, std::size_t threads) {
    BenchOptions opts{sizes, seeds, FieldConfig::parse(field), base_seed, threads};
    py::gil_scoped_release release;
    return bench_to_jsonl(run_bench(opts));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Matrix-polynomial key exchange with its bilinear-system and span attacks.
        Transcripts and matrices cross the boundary as JSON text.
    )pbdoc";

    static py::exception<NotInSpan> not_honest(m, "DishonestTranscript", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Inconsistent& e) {
            PyErr_SetString(not_honest.ptr(), e.what());
        } catch (const NotInSpan& e) {
            PyErr_SetString(not_honest.ptr(), e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("exchange", &exchange, py::arg("n"), py::arg("seed"), py::arg("field") = "prime:1000003",
          py::arg("degrees") = py::none(), py::arg("with_oracle") = false,
          "Run one exchange; returns the transcript as JSON text.");
    m.def("recover_key", &recover_key, py::arg("transcript"), py::arg("method"),
          "Recover the shared key from a transcript (JSON text); returns the key matrix as JSON text.");
    m.def("verify", &verify, py::arg("transcript"), "Span-membership report for A and B.");
    m.def("span_basis", &span_basis, py::arg("transcript"), "Offline phase; returns the basis file as JSON text.");
    m.def("char_poly", &char_poly_prime, py::arg("matrix"), py::arg("modulus"),
          "Monic characteristic polynomial over F_p, constant term first.");
    m.def("poly_mod", &poly_mod_prime, py::arg("p"), py::arg("c"), py::arg("modulus"));
    m.def("bench", &bench, py::arg("sizes"), py::arg("seeds") = 1, py::arg("field") = "prime:1000003",
          py::arg("base_seed") = 1, py::arg("threads") = 0, "Op-count benchmark; returns line-delimited JSON.");

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
