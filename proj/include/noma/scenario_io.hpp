#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noma/errors.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// Scenario document layout:
///   { "gains": [real...], "total_power": real, "label": optional string }
/// Reals round-trip exactly (shortest decimal form of the double).

struct ScenarioLoadResult {
    Scenario scenario;
    /// True when the document's gains were not already sorted
    /// non-increasing; the scenario holds them sorted regardless.
    bool reordered = false;
};

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json doc;
    doc["gains"] = s.gains();
    doc["total_power"] = s.total_power();
    if (!s.label().empty()) doc["label"] = s.label();
    return doc;
}

inline void save_scenario(const Scenario& s, std::ostream& out) {
    out << scenario_to_json(s).dump(2) << '\n';
    if (!out) throw IoError("scenario: write failed");
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("scenario: cannot open '" + path + "' for writing");
    save_scenario(s, out);
    if (!out) throw IoError("scenario: write to '" + path + "' failed");
}

inline ScenarioLoadResult parse_scenario(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("scenario document: expected a JSON object");
    if (!doc.contains("gains")) throw ValidationError("scenario document: missing field 'gains'");
    if (!doc.contains("total_power")) {
        throw ValidationError("scenario document: missing field 'total_power'");
    }
    const auto& gains_node = doc["gains"];
    if (!gains_node.is_array() || gains_node.empty()) {
        throw ValidationError("scenario document: 'gains' must be a non-empty array of numbers");
    }
    std::vector<double> gains;
    gains.reserve(gains_node.size());
    for (const auto& v : gains_node) {
        if (!v.is_number()) {
            throw ValidationError("scenario document: 'gains' entries must be numbers");
        }
        gains.push_back(v.get<double>());
    }
    if (!doc["total_power"].is_number()) {
        throw ValidationError("scenario document: 'total_power' must be a number");
    }
    const bool sorted = std::is_sorted(gains.begin(), gains.end(), std::greater<double>());

    Scenario s = make_scenario(std::move(gains), doc["total_power"].get<double>());
    if (doc.contains("label")) {
        if (!doc["label"].is_string()) {
            throw ValidationError("scenario document: 'label' must be a string");
        }
        s.set_label(doc["label"].get<std::string>());
    }
    return ScenarioLoadResult{std::move(s), !sorted};
}

inline ScenarioLoadResult load_scenario(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("scenario document: ") + e.what());
    }
    return parse_scenario(doc);
}

inline ScenarioLoadResult load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("scenario: cannot open '" + path + "' for reading");
    try {
        return load_scenario(in);
    } catch (const ValidationError& e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

} // namespace noma
