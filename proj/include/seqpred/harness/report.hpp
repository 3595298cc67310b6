#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace seqpred::harness {

using json = nlohmann::json;

// Shortest round-trip decimal form; inf and nan spelled out.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// JSON cannot hold infinities, so they become strings.
inline json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

struct Verdict {
    std::string id;
    std::string claim;
    std::string description;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how measured compares to threshold
    std::string detail;

    json to_json() const {
        json j = {{"id", id},
                  {"claim", claim},
                  {"description", description},
                  {"result", pass ? "PASS" : "FAIL"},
                  {"measured", json_number(measured)},
                  {"relation", relation},
                  {"threshold", json_number(threshold)},
                  {"tolerance", json_number(tolerance)}};
        if (!detail.empty()) j["detail"] = detail;
        return j;
    }
};

// One raw series as written to CSV.
struct SeriesTable {
    std::string name;   // file stem
    std::string kind;   // divergence kind or quantity
    std::string route;  // exact, monte_carlo, path, closed_form ...
    std::vector<double> per_step;
    std::vector<double> running_average;
    std::vector<double> std_error;  // empty when not applicable
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::uint64_t> index;  // n values; empty means 1..size

    std::size_t size() const { return std::max(per_step.size(), running_average.size()); }
    std::uint64_t n_at(std::size_t i) const { return index.empty() ? i + 1 : index[i]; }

    std::string csv() const {
        std::string out = "n,per_step,running_average,stderr\n";
        for (std::size_t i = 0; i < size(); ++i) {
            out += std::to_string(n_at(i));
            out += ',';
            out += i < per_step.size() ? format_double(per_step[i]) : "";
            out += ',';
            out += i < running_average.size() ? format_double(running_average[i]) : "";
            out += ',';
            out += i < std_error.size() ? format_double(std_error[i]) : "";
            out += '\n';
        }
        return out;
    }

    json summary_at(std::size_t i) const {
        json j = {{"n", n_at(i)}};
        if (i < running_average.size()) j["mean"] = json_number(running_average[i]);
        if (i < per_step.size()) j["per_step"] = json_number(per_step[i]);
        j["stderr"] = i < std_error.size() ? json_number(std_error[i]) : json(nullptr);
        j["min"] = i < min.size() ? json_number(min[i]) : json(nullptr);
        j["max"] = i < max.size() ? json_number(max[i]) : json(nullptr);
        return j;
    }
};

struct ExperimentReport {
    std::string scenario;
    json config;
    std::vector<SeriesTable> series;
    std::vector<std::uint64_t> report_horizons;
    std::optional<json> dominance;
    json extra = json::object();
    std::vector<Verdict> verdicts;
    bool complete = true;
    std::vector<std::string> notes;
    double wall_seconds = 0.0;
    std::uint64_t budget_leaves = 0;

    bool all_pass() const {
        for (const auto& v : verdicts) {
            if (!v.pass) return false;
        }
        return true;
    }

    void add(Verdict v) { verdicts.push_back(std::move(v)); }

    json to_json() const {
        json j;
        j["scenario"] = scenario;
        j["status"] = complete ? "COMPLETE" : "INCOMPLETE";
        j["config"] = config;
        json ss = json::array();
        for (const auto& s : series) {
            json e = {{"name", s.name}, {"kind", s.kind}, {"route", s.route}, {"length", s.size()}};
            json pts = json::array();
            for (std::size_t i = 0; i < s.size(); ++i) {
                const auto n = s.n_at(i);
                bool wanted = i + 1 == s.size();
                for (auto h : report_horizons) wanted = wanted || h == n;
                if (wanted) pts.push_back(s.summary_at(i));
            }
            e["summaries"] = std::move(pts);
            ss.push_back(std::move(e));
        }
        j["series"] = std::move(ss);
        if (dominance) j["dominance"] = *dominance;
        if (!extra.empty()) j["results"] = extra;
        json vs = json::array();
        for (const auto& v : verdicts) vs.push_back(v.to_json());
        j["verdicts"] = std::move(vs);
        j["notes"] = notes;
        j["stats"] = {{"wall_seconds", wall_seconds}, {"budget_leaves", budget_leaves}};
        return j;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

// Writes <dir>/<prefix>_<series>.csv for every series and <dir>/<prefix>_report.json.
inline std::vector<std::filesystem::path> write_report(const ExperimentReport& r,
                                                       const std::filesystem::path& dir,
                                                       const std::string& prefix) {
    std::vector<std::filesystem::path> files;
    for (const auto& s : r.series) {
        files.push_back(dir / (prefix + "_" + s.name + ".csv"));
        write_text(files.back(), s.csv());
    }
    files.push_back(dir / (prefix + "_report.json"));
    write_text(files.back(), r.to_json().dump(2) + "\n");
    return files;
}

}  // namespace seqpred::harness
