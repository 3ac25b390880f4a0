#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "matkex/attack_span.hpp"
#include "matkex/protocol.hpp"

namespace matkex {

using json = nlohmann::json;

using AnyTranscript = std::variant<Transcript<PrimeField>, Transcript<ComplexField>>;

// Text forms. Prime scalars are decimal residues, complex scalars are
// [re, im] with round-trip precision. Matrices are {n, entries} row-major.

json field_to_json(const FieldConfig& cfg);
FieldConfig field_from_json(const json& j);

json scalar_to_json(const PrimeField& f, PrimeField::Element x);
json scalar_to_json(const ComplexField& f, ComplexField::Element x);
PrimeField::Element scalar_from_json(const PrimeField& f, const json& j);
ComplexField::Element scalar_from_json(const ComplexField& f, const json& j);

template <Field F>
json matrix_to_json(const Matrix<F>& m) {
    json entries = json::array();
    for (const auto& e : m.vec()) entries.push_back(scalar_to_json(m.field(), e));
    return json{{"n", m.n()}, {"entries", std::move(entries)}};
}

template <Field F>
Matrix<F> matrix_from_json(const F& f, const json& j) {
    const auto n = j.at("n").get<std::size_t>();
    const auto& arr = j.at("entries");
    if (!arr.is_array()) throw ParseError("matrix entries must be an array");
    std::vector<typename F::Element> entries;
    entries.reserve(arr.size());
    for (const auto& e : arr) entries.push_back(scalar_from_json(f, e));
    return Matrix<F>(f, n, std::move(entries));
}

json transcript_to_json(const AnyTranscript& t);
AnyTranscript transcript_from_json(const json& j);

std::string dump_transcript(const AnyTranscript& t);
AnyTranscript parse_transcript(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Persisted offline phase: the exponent list only; matrices and the
/// elimination state are recomputed from U and V on load.
struct BasisFile {
    std::size_t n = 0;
    FieldConfig field;
    std::vector<Exponent> exponents;
    std::size_t stop_layer = 0;
};

json basis_to_json(const BasisFile& b);
BasisFile basis_from_json(const json& j);

/// Structural problems in a transcript document (empty when well-formed).
std::vector<std::string> structural_violations(const json& j);

}  // namespace matkex
