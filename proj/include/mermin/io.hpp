#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mermin/algebra.hpp"

// Versioned JSON file formats for settings, states and dense operators, plus
// small helpers shared by the CLI. Parse failures surface as validation
// errors carrying file, line and column.

namespace mermin::io {

using nlohmann::json;

inline constexpr const char* kSettingsSchema = "mermin-settings/1";
inline constexpr const char* kStateSchema = "mermin-state/1";
inline constexpr const char* kOperatorSchema = "mermin-operator/1";
inline constexpr const char* kReportSchema = "mermin-report/1";

// ---------------------------------------------------------------------------
// File plumbing

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error(path + ": cannot open file for writing");
    out << content;
}

// FNV-1a 64-bit content digest, reported in run logs so inputs are pinned.
inline std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_digest(const std::string& path) { return fnv1a_digest(read_file(path)); }

// Parse with a line/column-anchored diagnostic on failure.
inline json parse_json(const std::string& text, const std::string& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw validation_error(path + ":" + std::to_string(line) + ":" + std::to_string(column) +
                               ": parse error: " + e.what());
    }
}

inline json load_json_file(const std::string& path) { return parse_json(read_file(path), path); }

namespace detail {

inline void require_schema(const json& doc, const std::string& expected,
                           const std::string& path) {
    if (!doc.is_object()) throw validation_error(path + ": top-level value must be an object");
    if (!doc.contains("schema") || !doc["schema"].is_string() || doc["schema"] != expected) {
        throw validation_error(path + ": missing or wrong 'schema' field (expected \"" +
                               expected + "\")");
    }
}

inline std::array<double, 3> triple_from(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        throw validation_error(where + ": expected a 3-vector of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Measurement settings

inline json settings_to_json(const MeasurementSettings& settings) {
    json pairs = json::array();
    for (int j = 1; j <= settings.n; ++j) {
        const BlochVector& a = settings.a(j);
        const BlochVector& ap = settings.a_prime(j);
        pairs.push_back({{"a", {a.x, a.y, a.z}}, {"a_prime", {ap.x, ap.y, ap.z}}});
    }
    return {{"schema", kSettingsSchema}, {"n", settings.n}, {"pairs", std::move(pairs)}};
}

inline MeasurementSettings settings_from_json(const json& doc, const std::string& path) {
    detail::require_schema(doc, kSettingsSchema, path);
    if (!doc.contains("n") || !doc["n"].is_number_integer()) {
        throw validation_error(path + ": missing integer field 'n'");
    }
    const int n = doc["n"].get<int>();
    if (!doc.contains("pairs") || !doc["pairs"].is_array()) {
        throw validation_error(path + ": missing array field 'pairs'");
    }
    std::vector<std::pair<BlochVector, BlochVector>> pairs;
    int j = 0;
    for (const json& p : doc["pairs"]) {
        ++j;
        const std::string where = path + ": pair " + std::to_string(j);
        if (!p.is_object() || !p.contains("a") || !p.contains("a_prime")) {
            throw validation_error(where + ": expected an object with 'a' and 'a_prime'");
        }
        const auto a = detail::triple_from(p["a"], where + " 'a'");
        const auto ap = detail::triple_from(p["a_prime"], where + " 'a_prime'");
        pairs.emplace_back(BlochVector(a[0], a[1], a[2]), BlochVector(ap[0], ap[1], ap[2]));
    }
    if (j != n) throw validation_error(path + ": 'pairs' must contain exactly n entries");
    return MeasurementSettings(n, std::move(pairs));
}

inline MeasurementSettings load_settings(const std::string& path) {
    return settings_from_json(load_json_file(path), path);
}

inline void save_settings(const MeasurementSettings& settings, const std::string& path) {
    write_file(path, settings_to_json(settings).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// State vectors

inline json state_to_json(const StateVector& state) {
    json amps = json::array();
    for (std::int64_t i = 0; i < state.amplitudes.size(); ++i) {
        amps.push_back({state.amplitudes[i].real(), state.amplitudes[i].imag()});
    }
    return {{"schema", kStateSchema}, {"n", state.n}, {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const json& doc, const std::string& path) {
    detail::require_schema(doc, kStateSchema, path);
    if (!doc.contains("n") || !doc["n"].is_number_integer()) {
        throw validation_error(path + ": missing integer field 'n'");
    }
    const int n = doc["n"].get<int>();
    if (n < 1 || n > 30) throw validation_error(path + ": 'n' out of range");
    if (!doc.contains("amplitudes") || !doc["amplitudes"].is_array() ||
        doc["amplitudes"].size() != static_cast<std::size_t>(dim_of(n))) {
        throw validation_error(path + ": 'amplitudes' must be an array of 2^n [re, im] pairs");
    }
    VectorX amps(dim_of(n));
    std::int64_t i = 0;
    for (const json& pair : doc["amplitudes"]) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
            throw validation_error(path + ": amplitude " + std::to_string(i) +
                                   " must be a [re, im] pair");
        }
        amps[i++] = cx(pair[0].get<double>(), pair[1].get<double>());
    }
    return StateVector(n, std::move(amps));
}

inline StateVector load_state(const std::string& path) {
    return state_from_json(load_json_file(path), path);
}

inline void save_state(const StateVector& state, const std::string& path) {
    write_file(path, state_to_json(state).dump() + "\n");
}

// ---------------------------------------------------------------------------
// Dense operators (debugging aid; row-major, gated by the dense cap)

inline json operator_to_json(const DenseOperator& op) {
    json entries = json::array();
    for (std::int64_t r = 0; r < op.entries.rows(); ++r) {
        for (std::int64_t c = 0; c < op.entries.cols(); ++c) {
            entries.push_back({op.entries(r, c).real(), op.entries(r, c).imag()});
        }
    }
    return {{"schema", kOperatorSchema}, {"n", op.n}, {"entries", std::move(entries)}};
}

inline DenseOperator operator_from_json(const json& doc, const std::string& path) {
    detail::require_schema(doc, kOperatorSchema, path);
    if (!doc.contains("n") || !doc["n"].is_number_integer()) {
        throw validation_error(path + ": missing integer field 'n'");
    }
    const int n = doc["n"].get<int>();
    if (n < 1) throw validation_error(path + ": 'n' out of range");
    require_dense_cap(n, "operator file");
    const std::int64_t dim = dim_of(n);
    if (!doc.contains("entries") || !doc["entries"].is_array() ||
        doc["entries"].size() != static_cast<std::size_t>(dim * dim)) {
        throw validation_error(path + ": 'entries' must hold 4^n [re, im] pairs (row-major)");
    }
    MatrixX entries(dim, dim);
    std::int64_t k = 0;
    for (const json& pair : doc["entries"]) {
        if (!pair.is_array() || pair.size() != 2) {
            throw validation_error(path + ": entry " + std::to_string(k) +
                                   " must be a [re, im] pair");
        }
        entries(k / dim, k % dim) = cx(pair[0].get<double>(), pair[1].get<double>());
        ++k;
    }
    return {n, std::move(entries)};
}

inline DenseOperator load_operator(const std::string& path) {
    return operator_from_json(load_json_file(path), path);
}

inline void save_operator(const DenseOperator& op, const std::string& path) {
    write_file(path, operator_to_json(op).dump() + "\n");
}

} // namespace mermin::io
