#pragma once

// Tabular results of an experiment run: documented numeric columns, one row
// per item and resolution, CSV output and a JSON summary.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pshlab/serialize.hpp"

namespace pshlab {

struct Column {
    std::string name;
    std::string doc;
};

/// pass: 1 = all hard checks hold, 0 = a hard check failed, -1 = not checked
/// (solver failure or nothing to check).
struct Row {
    std::size_t item = 0;
    std::string label;
    int resolution = 0;
    std::string status = "ok";
    int pass = -1;
    std::vector<double> values;
    std::string note;
};

class Table {
public:
    Table() = default;
    Table(std::string scenario, std::vector<Column> columns) : scenario_(std::move(scenario)), columns_(std::move(columns)) {}

    const std::string& scenario() const { return scenario_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<Row>& rows() const { return rows_; }
    std::vector<Row>& rows() { return rows_; }

    Row make_row(std::size_t item, std::string label, int resolution) const {
        Row r;
        r.item = item;
        r.label = std::move(label);
        r.resolution = resolution;
        r.values.assign(columns_.size(), std::numeric_limits<double>::quiet_NaN());
        return r;
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].name == name) return i;
        }
        throw std::logic_error("no column named " + name);
    }

    void set(Row& r, const std::string& name, double v) const { r.values[column(name)] = v; }
    double get(const Row& r, const std::string& name) const { return r.values[column(name)]; }

    void add(Row r) { rows_.push_back(std::move(r)); }

private:
    std::string scenario_;
    std::vector<Column> columns_;
    std::vector<Row> rows_;
};

/// Fixed columns that precede the scenario columns in every CSV.
inline const std::vector<Column>& base_columns() {
    static const std::vector<Column> cols{
        {"scenario", "scenario name"},
        {"item", "index of the set, function or probe combination in input order"},
        {"label", "item label"},
        {"resolution", "grid nodes per unit length"},
        {"status", "ok, or the error kind when the item could not be evaluated"},
        {"pass", "1 if every hard check on the row holds, 0 if one fails, -1 if nothing was checked"},
    };
    return cols;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string to_csv(const Table& t) {
    std::string out;
    bool first = true;
    for (const auto& c : base_columns()) {
        out += (first ? "" : ",") + c.name;
        first = false;
    }
    for (const auto& c : t.columns()) out += "," + c.name;
    out += ",note\n";
    for (const auto& r : t.rows()) {
        out += csv_escape(t.scenario()) + "," + std::to_string(r.item) + "," + csv_escape(r.label) + "," +
               std::to_string(r.resolution) + "," + csv_escape(r.status) + "," + std::to_string(r.pass);
        for (double v : r.values) out += "," + format_number(v);
        out += "," + csv_escape(r.note) + "\n";
    }
    return out;
}

/// JSON numbers cannot be NaN or infinite; those become null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Min and max of every numeric column over the rows at one resolution.
inline Json column_stats(const Table& t, int resolution) {
    Json out = Json::object();
    for (std::size_t c = 0; c < t.columns().size(); ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        const Row* at_lo = nullptr;
        const Row* at_hi = nullptr;
        for (const auto& r : t.rows()) {
            if (r.resolution != resolution || !std::isfinite(r.values[c])) continue;
            if (r.values[c] < lo) lo = r.values[c], at_lo = &r;
            if (r.values[c] > hi) hi = r.values[c], at_hi = &r;
        }
        if (!at_lo) continue;
        out[t.columns()[c].name] = {{"min", lo}, {"argmin", at_lo->label}, {"max", hi}, {"argmax", at_hi->label}};
    }
    return out;
}

/// Largest relative change of each column between matching rows (same item,
/// same position within the item) at two resolutions.
inline Json refinement_changes(const Table& t, int from, int to) {
    std::vector<std::vector<const Row*>> coarse, fine;
    for (const auto& r : t.rows()) {
        if (r.resolution != from && r.resolution != to) continue;
        auto& dst = r.resolution == from ? coarse : fine;
        if (dst.size() <= r.item) dst.resize(r.item + 1);
        dst[r.item].push_back(&r);
    }
    Json out = Json::object();
    for (std::size_t c = 0; c < t.columns().size(); ++c) {
        double worst = -1.0;
        std::string where;
        for (std::size_t i = 0; i < std::min(coarse.size(), fine.size()); ++i) {
            for (std::size_t p = 0; p < std::min(coarse[i].size(), fine[i].size()); ++p) {
                const double x = coarse[i][p]->values[c], y = fine[i][p]->values[c];
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                const double scale = std::max(std::abs(x), std::abs(y));
                const double rel = scale > 0 ? std::abs(y - x) / scale : 0.0;
                if (rel > worst) worst = rel, where = coarse[i][p]->label;
            }
        }
        if (worst >= 0.0) out[t.columns()[c].name] = {{"max_relative_change", worst}, {"at", where}};
    }
    return out;
}

inline Json column_docs(const Table& t) {
    Json out = Json::object();
    for (const auto& c : base_columns()) out[c.name] = c.doc;
    for (const auto& c : t.columns()) out[c.name] = c.doc;
    out["note"] = "free-text diagnostic";
    return out;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + path);
    f << content;
    if (!f) throw Error(ErrorKind::InvalidConfig, "failed writing " + path);
}

}  // namespace pshlab
