#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dualmode/detail/format.hpp"

namespace dualmode::cli {

/// One output value, carrying enough type information to serialize to both
/// CSV (plain text, empty for null) and JSON (typed literals).
struct Cell {
    enum class Kind { number, text, boolean, null };
    Kind kind = Kind::null;
    std::string repr;
};

inline Cell cell(double x) {
    // JSON has no literal for non-finite numbers; emit them as text.
    if (!std::isfinite(x)) return Cell{Cell::Kind::text, detail::format_double(x)};
    return Cell{Cell::Kind::number, detail::format_double(x)};
}

inline Cell cell(std::uint64_t n) { return Cell{Cell::Kind::number, std::to_string(n)}; }

inline Cell cell(const std::string& s) { return Cell{Cell::Kind::text, s}; }

inline Cell cell(const char* s) { return Cell{Cell::Kind::text, s}; }

inline Cell cell(bool b) { return Cell{Cell::Kind::boolean, b ? "true" : "false"}; }

inline Cell cell_null() { return Cell{}; }

/// Description of one system as echoed into output metadata.
struct SystemMeta {
    std::string name;
    double mu0, K, f1, f2;
    double mu_star, lambda_max, rho_max;
    std::string system_class;
};

/// Column-oriented result of one CLI command, serializable as CSV or JSON.
struct Table {
    std::string command;
    std::vector<SystemMeta> systems;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

inline std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += csv_escape(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            if (row[c].kind != Cell::Kind::null) out += csv_escape(row[c].repr);
        }
        out += '\n';
    }
    return out;
}

namespace detail_json {

inline void append_cell(std::string& out, const Cell& c) {
    switch (c.kind) {
        case Cell::Kind::number:
        case Cell::Kind::boolean: out += c.repr; break;
        case Cell::Kind::text:
            out += '"';
            out += json_escape(c.repr);
            out += '"';
            break;
        case Cell::Kind::null: out += "null"; break;
    }
}

}  // namespace detail_json

/// JSON form: header object, one-line row objects keyed by column name.
inline std::string to_json(const Table& table) {
    using dualmode::detail::format_double;
    std::string out = "{\n";
    out += "  \"command\": \"" + json_escape(table.command) + "\",\n";
    out += "  \"systems\": [\n";
    for (std::size_t s = 0; s < table.systems.size(); ++s) {
        const SystemMeta& m = table.systems[s];
        out += "    {\"name\": \"" + json_escape(m.name) + "\"";
        out += ", \"mu0\": " + format_double(m.mu0);
        out += ", \"K\": " + format_double(m.K);
        out += ", \"f1\": " + format_double(m.f1);
        out += ", \"f2\": " + format_double(m.f2);
        out += ", \"mu_star\": " + format_double(m.mu_star);
        out += ", \"lambda_max\": " + format_double(m.lambda_max);
        out += ", \"rho_max\": " + format_double(m.rho_max);
        out += ", \"class\": \"" + json_escape(m.system_class) + "\"}";
        out += s + 1 < table.systems.size() ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += "  \"columns\": [";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ", ";
        out += '"' + json_escape(table.columns[c]) + '"';
    }
    out += "],\n";
    out += "  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += "    {";
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (c > 0) out += ", ";
            out += '"' + json_escape(table.columns[c]) + "\": ";
            detail_json::append_cell(out, table.rows[r][c]);
        }
        out += r + 1 < table.rows.size() ? "},\n" : "}\n";
    }
    out += "  ]\n}\n";
    return out;
}

inline std::string serialize(const Table& table, const std::string& format) {
    return format == "json" ? to_json(table) : to_csv(table);
}

}  // namespace dualmode::cli
