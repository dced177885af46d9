#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/stability.hpp"

namespace dualmode::cli {

/// One system under study, kept in both parameterizations. Idealized systems
/// (f1 = 0 or f2 = 1) carry infinite-rate sentinels and cannot be simulated.
struct SystemSpec {
    std::string name;
    CanonicalParams canon;
    RateParams rates;
    bool has_finite_rates;
};

inline SystemSpec make_system_spec(std::string name, const CanonicalParams& canon) {
    validate_canonical(canon);
    SystemSpec spec;
    spec.name = std::move(name);
    spec.canon = canon;
    spec.rates = from_canonical(canon, RateMode::extended);
    spec.has_finite_rates = canon.f1 > 0.0 && canon.f2 < 1.0;
    return spec;
}

inline SystemSpec make_system_spec(std::string name, const RateParams& raw) {
    SystemSpec spec;
    spec.name = std::move(name);
    spec.rates = validate_rates(raw);
    spec.canon = to_canonical(spec.rates);
    spec.has_finite_rates = true;
    return spec;
}

/// Built-in systems: mu0 = 1, K = 4 with three workload-fraction pairs
/// covering the three system classes.
inline SystemSpec preset_system(const std::string& name) {
    if (name == "systemA") return make_system_spec(name, CanonicalParams{1.0, 4.0, 0.1, 0.3});
    if (name == "systemB") return make_system_spec(name, CanonicalParams{1.0, 4.0, 0.05, 0.15});
    if (name == "systemC") return make_system_spec(name, CanonicalParams{1.0, 4.0, 0.25, 0.4});
    fail(errc::invalid_config,
         "unknown preset '" + name + "' (available: systemA, systemB, systemC)");
}

/// Options shared by the sweep commands; file values are overridden by
/// command-line flags.
struct ScenarioOptions {
    std::vector<double> loads;
    bool absolute = false;  ///< loads are absolute lambda instead of rho
    int p_points = 401;
    std::uint64_t seed = 1;
    std::uint64_t jobs = 1000000;
    std::optional<std::uint64_t> warmup;  ///< default: jobs / 10
    int batches = 20;
    double confidence = 0.95;
    double pass_fraction = 8.0 / 9.0;
    std::string format = "csv";
};

struct Scenario {
    std::vector<SystemSpec> systems;
    ScenarioOptions options;
};

namespace detail_scenario {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::string lower(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

inline double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        fail(errc::invalid_config, "value for '" + key + "' is not a number: '" + value + "'");
    }
}

inline std::uint64_t parse_count(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(value, &pos);
        if (pos != value.size() || n < 0) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(n);
    } catch (const std::exception&) {
        fail(errc::invalid_config,
             "value for '" + key + "' is not a nonnegative integer: '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(errc::invalid_config, "value for '" + key + "' is not a boolean: '" + value + "'");
}

}  // namespace detail_scenario

/// Parses a load axis: either a comma-separated list ("0.3, 0.5, 0.7") or an
/// inclusive range "lo:hi:step". The result must be strictly increasing.
inline std::vector<double> parse_load_axis(const std::string& text) {
    using detail_scenario::parse_number;
    using detail_scenario::trim;
    std::vector<double> loads;
    const std::string body = trim(text);
    if (body.empty()) return loads;
    if (body.find(':') != std::string::npos) {
        std::istringstream in(body);
        std::string lo_s, hi_s, step_s;
        if (!std::getline(in, lo_s, ':') || !std::getline(in, hi_s, ':') ||
            !std::getline(in, step_s)) {
            fail(errc::invalid_config, "range must be lo:hi:step, got '" + body + "'");
        }
        const double lo = parse_number("range lo", trim(lo_s));
        const double hi = parse_number("range hi", trim(hi_s));
        const double step = parse_number("range step", trim(step_s));
        if (!(step > 0.0) || hi < lo) {
            fail(errc::invalid_config, "range requires lo <= hi and step > 0");
        }
        // Half-step slack keeps hi included despite accumulated rounding.
        for (double x = lo; x <= hi + step * 0.5; x += step) loads.push_back(std::min(x, hi));
    } else {
        std::istringstream in(body);
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty()) loads.push_back(parse_number("load", t));
        }
    }
    for (std::size_t i = 1; i < loads.size(); ++i) {
        if (!(loads[i] > loads[i - 1])) {
            fail(errc::invalid_config, "load grid must be strictly increasing");
        }
    }
    for (double x : loads) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            fail(errc::invalid_config, "loads must be finite and positive");
        }
    }
    return loads;
}

/// Scenario file: '#' comments, [system]/[sweep]/[options] sections with
/// key = value lines. The [system] section holds exactly one of the raw-rate
/// group {mu_l1, mu_l2, mu_c1, mu_c2} or the canonical group {mu0, k, f1, f2}.
inline Scenario parse_scenario(std::istream& in) {
    using namespace detail_scenario;
    std::map<std::string, std::string> system_kv, sweep_kv, options_kv;
    std::map<std::string, std::string>* section = nullptr;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') {
                fail(errc::invalid_config,
                     "line " + std::to_string(line_no) + ": malformed section header");
            }
            const std::string name = lower(trim(body.substr(1, body.size() - 2)));
            if (name == "system") {
                section = &system_kv;
            } else if (name == "sweep") {
                section = &sweep_kv;
            } else if (name == "options") {
                section = &options_kv;
            } else {
                fail(errc::invalid_config, "unknown section [" + name + "]");
            }
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos || section == nullptr) {
            fail(errc::invalid_config,
                 "line " + std::to_string(line_no) + ": expected 'key = value' inside a section");
        }
        const std::string key = lower(trim(body.substr(0, eq)));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(errc::invalid_config, "line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!section->emplace(key, value).second) {
            fail(errc::invalid_config, "duplicate key '" + key + "'");
        }
    }

    auto take = [](std::map<std::string, std::string>& kv,
                   const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    Scenario scenario;
    std::string name = "custom";
    if (auto v = take(system_kv, "name")) name = *v;

    const bool has_rates = system_kv.count("mu_l1") || system_kv.count("mu_l2") ||
                           system_kv.count("mu_c1") || system_kv.count("mu_c2");
    const bool has_canon = system_kv.count("mu0") || system_kv.count("k") ||
                           system_kv.count("f1") || system_kv.count("f2");
    if (has_rates == has_canon) {
        fail(errc::invalid_config,
             "[system] must contain exactly one of the rate group "
             "{mu_l1, mu_l2, mu_c1, mu_c2} or the canonical group {mu0, k, f1, f2}");
    }
    auto require = [&](const char* key) {
        auto v = take(system_kv, key);
        if (!v) fail(errc::invalid_config, std::string("[system] is missing '") + key + "'");
        return parse_number(key, *v);
    };
    if (has_rates) {
        RateParams raw;
        raw.mu_l1 = require("mu_l1");
        raw.mu_l2 = require("mu_l2");
        raw.mu_c1 = require("mu_c1");
        raw.mu_c2 = require("mu_c2");
        scenario.systems.push_back(make_system_spec(name, raw));
    } else {
        CanonicalParams canon;
        canon.mu0 = require("mu0");
        canon.K = require("k");
        canon.f1 = require("f1");
        canon.f2 = require("f2");
        scenario.systems.push_back(make_system_spec(name, canon));
    }
    if (!system_kv.empty()) {
        fail(errc::invalid_config, "unknown [system] key '" + system_kv.begin()->first + "'");
    }

    ScenarioOptions& opt = scenario.options;
    const auto loads_v = take(sweep_kv, "loads");
    const auto grid_v = take(sweep_kv, "grid");
    if (loads_v && grid_v) {
        fail(errc::invalid_config, "[sweep] must not contain both 'loads' and 'grid'");
    }
    if (loads_v) opt.loads = parse_load_axis(*loads_v);
    if (grid_v) opt.loads = parse_load_axis(*grid_v);
    if (auto v = take(sweep_kv, "absolute")) opt.absolute = parse_bool("absolute", *v);
    if (!sweep_kv.empty()) {
        fail(errc::invalid_config, "unknown [sweep] key '" + sweep_kv.begin()->first + "'");
    }

    if (auto v = take(options_kv, "p_points")) {
        opt.p_points = static_cast<int>(parse_count("p_points", *v));
    }
    if (auto v = take(options_kv, "seed")) opt.seed = parse_count("seed", *v);
    if (auto v = take(options_kv, "jobs")) opt.jobs = parse_count("jobs", *v);
    if (auto v = take(options_kv, "warmup")) opt.warmup = parse_count("warmup", *v);
    if (auto v = take(options_kv, "batches")) {
        opt.batches = static_cast<int>(parse_count("batches", *v));
    }
    if (auto v = take(options_kv, "confidence")) {
        opt.confidence = parse_number("confidence", *v);
    }
    if (auto v = take(options_kv, "pass_fraction")) {
        opt.pass_fraction = parse_number("pass_fraction", *v);
    }
    if (auto v = take(options_kv, "format")) {
        opt.format = detail_scenario::lower(*v);
        if (opt.format != "csv" && opt.format != "json") {
            fail(errc::invalid_config, "format must be csv or json");
        }
    }
    if (!options_kv.empty()) {
        fail(errc::invalid_config, "unknown [options] key '" + options_kv.begin()->first + "'");
    }
    return scenario;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::invalid_config, "cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

}  // namespace dualmode::cli
