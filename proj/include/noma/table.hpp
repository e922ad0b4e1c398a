#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "noma/errors.hpp"

namespace noma {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Provenance carried alongside experiment rows. seed is absent for
/// experiments without randomness; parameters keep insertion order so the
/// emitted metadata line is deterministic. timestamp is informational and
/// never emitted, keeping output files reproducible byte for byte.
struct TableMetadata {
    std::optional<std::uint64_t> seed;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string timestamp;
};

namespace detail {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

inline std::string format_int(std::int64_t v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

/// RFC-4180 quoting, applied only when the text needs it.
inline std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string format_cell(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return format_int(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return csv_escape(std::get<std::string>(cell));
}

} // namespace detail

/// Tidy result carrier: one row per trial or sweep point, column names in
/// schema order. Row width is checked at insertion so a table is always
/// emittable.
class ExperimentTable {
public:
    explicit ExperimentTable(std::vector<std::string> schema) : schema_(std::move(schema)) {
        if (schema_.empty()) throw ValidationError("ExperimentTable: schema must be non-empty");
    }

    void add_row(std::vector<Cell> row) {
        if (row.size() != schema_.size()) {
            throw ValidationError("ExperimentTable: row has " + std::to_string(row.size()) +
                                  " cells, schema has " + std::to_string(schema_.size()));
        }
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] const std::vector<std::string>& schema() const { return schema_; }
    [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    [[nodiscard]] TableMetadata& metadata() { return metadata_; }
    [[nodiscard]] const TableMetadata& metadata() const { return metadata_; }

private:
    std::vector<std::string> schema_;
    std::vector<std::vector<Cell>> rows_;
    TableMetadata metadata_;
};

/// CSV layout: one '#' metadata comment line (seed and parameters), the
/// header row, then data rows. Doubles use shortest round-trip decimals,
/// so parsing the file back recovers them bit-exact.
inline void emit_csv(const ExperimentTable& t, std::ostream& out) {
    out << '#';
    if (t.metadata().seed) out << " seed=" << *t.metadata().seed;
    for (const auto& [key, value] : t.metadata().parameters) {
        out << ' ' << key << '=' << value;
    }
    out << '\n';
    for (std::size_t c = 0; c < t.schema().size(); ++c) {
        if (c > 0) out << ',';
        out << detail::csv_escape(t.schema()[c]);
    }
    out << '\n';
    for (const auto& row : t.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ',';
            out << detail::format_cell(row[c]);
        }
        out << '\n';
    }
}

inline void emit_csv(const ExperimentTable& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    emit_csv(t, out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace noma
