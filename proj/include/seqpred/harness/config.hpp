#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqpred/divergences.hpp"
#include "seqpred/schedule.hpp"

namespace seqpred::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config error at '" + field + "': " + message),
          field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(at(key), "missing required field");
        return j_.at(key);
    }

    const json* optional(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key) { return as_number(raw(key), at(key)); }
    double number(const std::string& key, double fallback) {
        const json* v = optional(key);
        return v ? as_number(*v, at(key)) : fallback;
    }
    std::uint64_t count(const std::string& key) { return as_count(raw(key), at(key)); }
    std::uint64_t count(const std::string& key, std::uint64_t fallback) {
        const json* v = optional(key);
        return v ? as_count(*v, at(key)) : fallback;
    }
    std::string string(const std::string& key) { return as_string(raw(key), at(key)); }
    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = optional(key);
        return v ? as_string(*v, at(key)) : fallback;
    }
    bool boolean(const std::string& key, bool fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v->get<bool>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
        }
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw ConfigError(where, "expected a number");
        return v.get<double>();
    }
    static std::uint64_t as_count(const json& v, const std::string& where) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        throw ConfigError(where, "expected a non-negative integer");
    }
    static std::string as_string(const json& v, const std::string& where) {
        if (!v.is_string()) throw ConfigError(where, "expected a string");
        return v.get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "laplace_vs_bernoulli", "dom_decay", "nodom", "contaminate_Edbar",
        "nosumad", "nosumavad", "ryabko_stationary", "custom"};
    return names;
}

struct OutputSpec {
    std::string dir;     // empty: resolved from flags or environment
    std::string prefix;  // empty: scenario name
};

struct ExperimentConfig {
    std::string scenario;
    std::optional<json> true_measure;
    std::optional<json> predictor;
    std::optional<json> contaminant;
    double eps = 0.5;
    std::vector<DivergenceKind> kinds = {DivergenceKind::KL, DivergenceKind::ABS};
    std::optional<std::uint64_t> horizon;
    std::uint64_t paths = 0;
    std::uint64_t seed = 1;
    bool exact = false;
    bool dominance = false;
    std::optional<StepSchedule> schedule;
    std::vector<std::uint64_t> horizons;
    std::optional<std::uint64_t> k_max;
    std::vector<double> p_grid;
    std::optional<std::uint64_t> budget_leaves;
    OutputSpec output;
    json source;  // the document as given, echoed in reports
};

inline StepSchedule parse_schedule(const json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return StepSchedule::from_name(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where, std::string(e.what()) + " (POW2, DOUBLE_EXP, CUBIC or a list)");
        }
    }
    if (v.is_array()) {
        std::vector<std::uint64_t> steps;
        for (std::size_t i = 0; i < v.size(); ++i) {
            steps.push_back(ObjectReader::as_count(v[i], where + "[" + std::to_string(i) + "]"));
        }
        try {
            return StepSchedule::custom(std::move(steps));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where, e.what());
        }
    }
    throw ConfigError(where, "expected a schedule name or a list of steps");
}

inline json schedule_to_json(const StepSchedule& s, std::uint64_t horizon) {
    if (s.rule() != StepSchedule::Rule::Custom) return s.name();
    return s.materialize(horizon);
}

inline std::vector<DivergenceKind> parse_kinds(const json& v, const std::string& where) {
    std::vector<DivergenceKind> out;
    auto one = [&](const json& e, const std::string& w) {
        try {
            out.push_back(parse_kind(ObjectReader::as_string(e, w)));
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(w, ex.what());
        }
    };
    if (v.is_string()) {
        one(v, where);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) one(v[i], where + "[" + std::to_string(i) + "]");
    } else {
        throw ConfigError(where, "expected a divergence kind or a list of kinds");
    }
    if (out.empty()) throw ConfigError(where, "divergence kind list is empty");
    return out;
}

inline ExperimentConfig parse_config(const json& doc) {
    ObjectReader r(doc, "");
    ExperimentConfig c;
    c.source = doc;
    const std::uint64_t version = r.count("schema_version");
    if (version != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported version " + std::to_string(version) +
                                                " (expected " + std::to_string(kSchemaVersion) + ")");
    }
    c.scenario = r.string("scenario");
    bool known = false;
    for (const auto& s : scenario_names()) known = known || s == c.scenario;
    if (!known) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");

    if (const json* v = r.optional("true_measure")) c.true_measure = *v;
    if (const json* v = r.optional("predictor")) c.predictor = *v;
    if (const json* v = r.optional("contaminant")) c.contaminant = *v;
    c.eps = r.number("eps", 0.5);
    if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps", "must lie in (0, 1)");
    if (const json* v = r.optional("kinds")) c.kinds = parse_kinds(*v, "kinds");
    if (r.has("horizon")) c.horizon = r.count("horizon");
    c.paths = r.count("paths", 0);
    c.seed = r.count("seed", 1);
    c.exact = r.boolean("exact", false);
    c.dominance = r.boolean("dominance", false);
    if (const json* v = r.optional("schedule")) c.schedule = parse_schedule(*v, "schedule");
    if (const json* v = r.optional("horizons")) {
        if (!v->is_array()) throw ConfigError("horizons", "expected a list of step counts");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto n = ObjectReader::as_count((*v)[i], "horizons[" + std::to_string(i) + "]");
            if (n == 0) throw ConfigError("horizons[" + std::to_string(i) + "]", "must be >= 1");
            c.horizons.push_back(n);
        }
    }
    if (r.has("k_max")) c.k_max = r.count("k_max");
    if (const json* v = r.optional("p_grid")) {
        if (!v->is_array() || v->empty()) throw ConfigError("p_grid", "expected a nonempty list");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string w = "p_grid[" + std::to_string(i) + "]";
            const double p = ObjectReader::as_number((*v)[i], w);
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(w, "must lie in [0, 1]");
            c.p_grid.push_back(p);
        }
    }
    if (r.has("budget_leaves")) c.budget_leaves = r.count("budget_leaves");
    if (const json* v = r.optional("output")) {
        ObjectReader o(*v, "output");
        c.output.dir = o.string("dir", "");
        c.output.prefix = o.string("prefix", "");
        o.finish();
    }
    r.finish();
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace seqpred::harness
