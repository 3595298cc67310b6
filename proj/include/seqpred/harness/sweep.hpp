#pragma once

#include <string>
#include <vector>

#include "seqpred/harness/scenarios.hpp"

namespace seqpred::harness {

struct SweepPoint {
    std::size_t index = 0;
    json coordinates;  // dotted key -> value
    ExperimentConfig config;
};

struct SweepResult {
    std::vector<std::string> keys;
    std::vector<SweepPoint> points;
    std::vector<ExperimentReport> reports;
    std::string aggregate_csv;
};

// Sets doc[a][b][c] for key "a.b.c", creating intermediate objects.
inline void set_dotted(json& doc, const std::string& key, const json& value) {
    json* cur = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos
                                                                            : dot - start);
        if (part.empty()) throw ConfigError(key, "empty segment in dotted key");
        if (!cur->is_object()) throw ConfigError(key, "path runs through a non-object value");
        if (dot == std::string::npos) {
            (*cur)[part] = value;
            return;
        }
        cur = &(*cur)[part];
        if (cur->is_null()) *cur = json::object();
        start = dot + 1;
    }
}

// Cartesian product of the grid in key order; every point is validated
// before anything runs.
inline std::vector<SweepPoint> expand_grid(const json& templ, const json& grid) {
    if (!grid.is_object() || grid.empty()) throw ConfigError("<grid>", "grid must be a nonempty object");
    std::vector<std::string> keys;
    std::vector<const json*> values;
    for (auto it = grid.begin(); it != grid.end(); ++it) {
        if (!it->is_array() || it->empty()) {
            throw ConfigError("<grid>." + it.key(), "expected a nonempty list of values");
        }
        keys.push_back(it.key());
        values.push_back(&*it);
    }
    std::vector<SweepPoint> points;
    std::vector<std::size_t> idx(keys.size(), 0);
    while (true) {
        SweepPoint p;
        p.index = points.size();
        json doc = templ;
        p.coordinates = json::object();
        for (std::size_t k = 0; k < keys.size(); ++k) {
            const json& v = (*values[k])[idx[k]];
            set_dotted(doc, keys[k], v);
            p.coordinates[keys[k]] = v;
        }
        try {
            p.config = parse_config(doc);
        } catch (const ConfigError& e) {
            throw ConfigError("grid point " + std::to_string(p.index) + ": " + e.field(), e.what());
        }
        points.push_back(std::move(p));
        std::size_t k = keys.size();
        while (k > 0) {
            --k;
            if (++idx[k] < values[k]->size()) break;
            idx[k] = 0;
            if (k == 0) return points;
        }
        if (keys.empty()) return points;
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string coordinate_text(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

inline SweepResult run_sweep(const json& templ, const json& grid) {
    SweepResult res;
    res.points = expand_grid(templ, grid);
    for (auto it = grid.begin(); it != grid.end(); ++it) res.keys.push_back(it.key());
    std::string csv = "point";
    for (const auto& k : res.keys) csv += "," + csv_field(k);
    csv += ",series,kind,route,n,running_average,stderr,status\n";
    for (const auto& p : res.points) {
        ExperimentReport r = run_experiment(p.config);
        for (const auto& s : r.series) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                const auto n = s.n_at(i);
                bool wanted = i + 1 == s.size();
                for (auto h : r.report_horizons) wanted = wanted || h == n;
                if (!wanted) continue;
                csv += std::to_string(p.index);
                for (const auto& k : res.keys) csv += "," + csv_field(coordinate_text(p.coordinates[k]));
                const double v = i < s.running_average.size() ? s.running_average[i] : s.per_step[i];
                csv += "," + csv_field(s.name) + "," + s.kind + "," + s.route + "," +
                       std::to_string(n) + "," + format_double(v) + "," +
                       (i < s.std_error.size() ? format_double(s.std_error[i]) : "") + "," +
                       (r.complete ? "COMPLETE" : "INCOMPLETE") + "\n";
            }
        }
        res.reports.push_back(std::move(r));
    }
    res.aggregate_csv = std::move(csv);
    return res;
}

}  // namespace seqpred::harness
