#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dualmode/assignment.hpp"
#include "dualmode/cli/parallel.hpp"
#include "dualmode/cli/scenario.hpp"
#include "dualmode/cli/table.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/sim.hpp"
#include "dualmode/stability.hpp"

namespace dualmode::cli {

inline SystemMeta system_meta(const SystemSpec& spec) {
    const StabilityRegion region = stability_region(spec.canon);
    SystemMeta m;
    m.name = spec.name;
    m.mu0 = spec.canon.mu0;
    m.K = spec.canon.K;
    m.f1 = spec.canon.f1;
    m.f2 = spec.canon.f2;
    m.mu_star = spec.canon.mu_star();
    m.lambda_max = region.lambda_max;
    m.rho_max = region.lambda_max / m.mu_star;
    m.system_class = system_class_name(classify(spec.canon));
    return m;
}

/// Converts sweep loads to absolute arrival rates. Loads are rho = lambda /
/// mu_star unless the scenario says they are absolute.
inline std::vector<double> to_arrival_rates(const SystemSpec& spec,
                                            const std::vector<double>& loads, bool absolute) {
    std::vector<double> lambdas;
    lambdas.reserve(loads.size());
    for (double load : loads) {
        lambdas.push_back(absolute ? load : load * spec.canon.mu_star());
    }
    return lambdas;
}

/// Strict feasibility gate for single-system sweeps: every requested load
/// must lie strictly inside the stability region.
inline void require_feasible_loads(const SystemSpec& spec, const std::vector<double>& lambdas) {
    const double lambda_max = stability_region(spec.canon).lambda_max;
    std::string offending;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] >= lambda_max) {
            if (!offending.empty()) offending += ", ";
            offending += std::to_string(i);
        }
    }
    if (!offending.empty()) {
        fail(errc::unstable, "loads at indices " + offending +
                                 " are at or above the stability limit lambda_max = " +
                                 detail::format_double(lambda_max) + " of system '" + spec.name +
                                 "'");
    }
}

/// System summary: canonical and raw parameters, stability region, class,
/// and the structural load thresholds, as key/value rows.
inline Table cmd_info(const SystemSpec& spec) {
    const SystemMeta meta = system_meta(spec);
    const StabilityRegion region = stability_region(spec.canon);
    const StructuralThresholds th = structural_thresholds(spec.canon);
    Table t;
    t.command = "info";
    t.systems = {meta};
    t.columns = {"key", "value"};
    auto row = [&](const char* key, Cell value) {
        t.rows.push_back({cell(key), std::move(value)});
    };
    auto opt_lambda = [&](const std::optional<double>& v) {
        return v ? cell(*v) : cell_null();
    };
    auto opt_rho = [&](const std::optional<double>& v) {
        return v ? cell(*v / meta.mu_star) : cell_null();
    };
    row("name", cell(spec.name));
    row("mu_l1", cell(spec.rates.mu_l1));
    row("mu_l2", cell(spec.rates.mu_l2));
    row("mu_c1", cell(spec.rates.mu_c1));
    row("mu_c2", cell(spec.rates.mu_c2));
    row("mu0", cell(meta.mu0));
    row("K", cell(meta.K));
    row("f1", cell(meta.f1));
    row("f2", cell(meta.f2));
    row("mu_star", cell(meta.mu_star));
    row("lambda_max", cell(meta.lambda_max));
    row("rho_max", cell(meta.rho_max));
    row("binding_constraint", cell(binding_constraint_name(region.binding)));
    row("class", cell(meta.system_class));
    row("balanced_share", cell(th.balanced_share));
    row("sm2_redundant", cell(th.sm2_redundant));
    row("sm1_low_load_max_lambda", opt_lambda(th.sm1_low_load_max));
    row("sm1_low_load_max_rho", opt_rho(th.sm1_low_load_max));
    row("sm1_breakaway_min_lambda", opt_lambda(th.sm1_breakaway_min));
    row("sm1_breakaway_min_rho", opt_rho(th.sm1_breakaway_min));
    row("needs_both_min_lambda", opt_lambda(th.needs_both_min));
    row("needs_both_min_rho", opt_rho(th.needs_both_min));
    row("sm2_optimal_min_lambda", opt_lambda(th.sm2_optimal_min));
    row("sm2_optimal_min_rho", opt_rho(th.sm2_optimal_min));
    row("full_load_limit_p", opt_lambda(th.full_load_limit));
    return t;
}

/// Delay curves versus the assignment parameter: for every requested load,
/// p sweeps the closure of the feasible range; open endpoints are emitted as
/// infeasible marker rows.
inline Table cmd_delay_vs_p(const SystemSpec& spec, const std::vector<double>& loads,
                            bool absolute, int p_points) {
    if (p_points < 2) fail(errc::invalid_config, "p_points must be at least 2");
    const std::vector<double> lambdas = to_arrival_rates(spec, loads, absolute);
    require_feasible_loads(spec, lambdas);
    Table t;
    t.command = "delay-vs-p";
    t.systems = {system_meta(spec)};
    t.columns = {"system", "lambda",      "rho",        "p",          "feasible",
                 "delay",  "tm_term",     "oh_term",    "f_effective", "alpha_star",
                 "beta_star", "p_star"};
    const double mu_star_v = spec.canon.mu_star();
    std::vector<std::vector<std::vector<Cell>>> per_load(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t li) {
        const double lambda = lambdas[li];
        const AssignmentRange range = assignment_range(spec.canon, lambda);
        const AssignmentOptimum opt = optimal_assignment(spec.canon, lambda);
        auto& rows = per_load[li];
        rows.reserve(static_cast<std::size_t>(p_points));
        for (int i = 0; i < p_points; ++i) {
            const double p =
                i == p_points - 1 ? range.hi
                                  : range.lo + (range.hi - range.lo) * i / (p_points - 1);
            const bool feasible = range.contains(p);
            std::vector<Cell> row;
            row.push_back(cell(spec.name));
            row.push_back(cell(lambda));
            row.push_back(cell(lambda / mu_star_v));
            row.push_back(cell(p));
            row.push_back(cell(feasible));
            if (feasible) {
                const DelayBreakdown br = delay_decomposition(p, lambda, spec.canon);
                row.push_back(cell(br.total));
                row.push_back(cell(br.tm_term));
                row.push_back(cell(br.oh_term));
                row.push_back(cell(br.f_effective));
                if (spec.has_finite_rates) {
                    const OperatingPoint op = optimal_partition(p, lambda, spec.rates);
                    row.push_back(cell(op.alpha));
                    row.push_back(cell(op.beta));
                } else {
                    row.push_back(cell_null());
                    row.push_back(cell_null());
                }
            } else {
                for (int c = 0; c < 6; ++c) row.push_back(cell_null());
            }
            row.push_back(cell(opt.p_star));
            rows.push_back(std::move(row));
        }
    });
    for (auto& rows : per_load) {
        for (auto& row : rows) t.rows.push_back(std::move(row));
    }
    return t;
}

/// Optimal assignment parameter over a load grid, with the structural
/// prediction and the breakaway annotation.
inline Table cmd_pstar_vs_load(const SystemSpec& spec, const std::vector<double>& loads,
                               bool absolute) {
    const std::vector<double> lambdas = to_arrival_rates(spec, loads, absolute);
    require_feasible_loads(spec, lambdas);
    Table t;
    t.command = "pstar-vs-load";
    t.systems = {system_meta(spec)};
    t.columns = {"system",     "lambda",     "rho",       "p_star",
                 "delay",      "regime",     "prediction", "breakaway_lambda",
                 "breakaway_rho"};
    const double mu_star_v = spec.canon.mu_star();
    const StructuralThresholds th = structural_thresholds(spec.canon);
    Cell breakaway_lambda = cell_null();
    Cell breakaway_rho = cell_null();
    if (!th.sm2_redundant && !lambdas.empty()) {
        const double b = breakaway_load(spec.canon);
        breakaway_lambda = cell(b);
        breakaway_rho = cell(b / mu_star_v);
    }
    std::vector<std::vector<Cell>> rows(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        const double lambda = lambdas[i];
        const AssignmentOptimum opt = optimal_assignment(spec.canon, lambda);
        const RegimePrediction pred = predict_regime(spec.canon, lambda);
        std::vector<Cell> row;
        row.push_back(cell(spec.name));
        row.push_back(cell(lambda));
        row.push_back(cell(lambda / mu_star_v));
        row.push_back(cell(opt.p_star));
        row.push_back(cell(opt.delay));
        row.push_back(cell(assignment_regime_name(opt.regime)));
        row.push_back(cell(predicted_regime_name(pred.prediction)));
        row.push_back(breakaway_lambda);
        row.push_back(breakaway_rho);
        rows[i] = std::move(row);
    });
    t.rows = std::move(rows);
    return t;
}

/// Optimal dual-mode delay versus load for one or more systems, next to the
/// tunable-mode lower bound. Loads beyond a system's stability limit are
/// emitted as infeasible rows; the lower bound is still printed while the
/// tunable benchmark itself is stable.
inline Table cmd_delay_vs_load(const std::vector<SystemSpec>& specs,
                               const std::vector<double>& loads, bool absolute) {
    Table t;
    t.command = "delay-vs-load";
    t.columns = {"system", "lambda", "rho",         "feasible",
                 "p_star", "delay",  "lower_bound", "gap"};
    for (const SystemSpec& spec : specs) t.systems.push_back(system_meta(spec));
    const std::size_t total = specs.size() * loads.size();
    std::vector<std::vector<Cell>> rows(total);
    parallel_for(total, [&](std::size_t idx) {
        const SystemSpec& spec = specs[idx / loads.size()];
        const double load = loads[idx % loads.size()];
        const double mu_star_v = spec.canon.mu_star();
        const double lambda = absolute ? load : load * mu_star_v;
        const double lambda_max = stability_region(spec.canon).lambda_max;
        const bool feasible = lambda < lambda_max;
        std::vector<Cell> row;
        row.push_back(cell(spec.name));
        row.push_back(cell(lambda));
        row.push_back(cell(lambda / mu_star_v));
        row.push_back(cell(feasible));
        if (feasible) {
            const AssignmentOptimum opt = optimal_assignment(spec.canon, lambda);
            const double bound = optimal_fraction(lambda, spec.canon).t_star;
            row.push_back(cell(opt.p_star));
            row.push_back(cell(opt.delay));
            row.push_back(cell(bound));
            row.push_back(cell(opt.delay - bound));
        } else {
            row.push_back(cell_null());
            row.push_back(cell_null());
            // The tunable benchmark may still be stable past this system's
            // assignment limit.
            if (lambda < mu_star_v) {
                row.push_back(cell(optimal_fraction(lambda, spec.canon).t_star));
            } else {
                row.push_back(cell_null());
            }
            row.push_back(cell_null());
        }
        rows[idx] = std::move(row);
    });
    t.rows = std::move(rows);
    return t;
}

struct ValidationSummary {
    std::size_t points = 0;
    std::size_t passed = 0;
    std::size_t required = 0;
    bool ok = true;
};

/// Simulation validation at the optimal operating point of every grid load.
/// Per-point seeds derive from (seed, index), so results do not depend on
/// the worker count. The run fails when fewer than pass_fraction of the
/// points agree with the analytic delay within the CI slack.
inline Table cmd_validate(const SystemSpec& spec, const std::vector<double>& loads,
                          const ScenarioOptions& opt, ValidationSummary& summary) {
    if (!spec.has_finite_rates) {
        fail(errc::infinite_rate,
             "system '" + spec.name + "' has an infinite rate and cannot be simulated");
    }
    const std::vector<double> lambdas = to_arrival_rates(spec, loads, opt.absolute);
    require_feasible_loads(spec, lambdas);
    Table t;
    t.command = "validate";
    t.systems = {system_meta(spec)};
    t.columns = {"system",       "lambda",        "rho",
                 "p_star",       "alpha_star",    "beta_star",
                 "analytic_delay", "sim_delay",   "ci_half_width",
                 "jobs_measured", "little_law_rel_error", "pass"};
    const double mu_star_v = spec.canon.mu_star();
    std::vector<std::vector<Cell>> rows(lambdas.size());
    std::vector<char> passed(lambdas.size(), 0);
    parallel_for(lambdas.size(), [&](std::size_t i) {
        const double lambda = lambdas[i];
        const double p_star = optimal_assignment(spec.canon, lambda).p_star;
        SimConfig cfg;
        cfg.seed = derive_seed(opt.seed, i);
        cfg.horizon_jobs = opt.jobs;
        cfg.warmup_jobs = opt.warmup.value_or(opt.jobs / 10);
        cfg.batches = opt.batches;
        cfg.confidence = opt.confidence;
        const PointValidation v = validate_point(spec.rates, p_star, lambda, cfg);
        const double little_l = v.sim.time_avg_in_system;
        const double little_lw = lambda * v.sim.mean_delay;
        const double little_err =
            little_lw > 0.0 ? std::abs(little_l - little_lw) / little_lw : 0.0;
        std::vector<Cell> row;
        row.push_back(cell(spec.name));
        row.push_back(cell(lambda));
        row.push_back(cell(lambda / mu_star_v));
        row.push_back(cell(p_star));
        row.push_back(cell(v.op.alpha));
        row.push_back(cell(v.op.beta));
        row.push_back(cell(v.analytic_delay));
        row.push_back(cell(v.sim.mean_delay));
        row.push_back(cell(v.sim.ci_half_width));
        row.push_back(cell(static_cast<std::uint64_t>(v.sim.jobs_measured)));
        row.push_back(cell(little_err));
        row.push_back(cell(v.pass));
        rows[i] = std::move(row);
        passed[i] = v.pass ? 1 : 0;
    });
    t.rows = std::move(rows);
    summary.points = lambdas.size();
    summary.passed = 0;
    for (char p : passed) summary.passed += p;
    summary.required =
        lambdas.empty()
            ? 0
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::floor(
                         static_cast<double>(lambdas.size()) * opt.pass_fraction + 1e-9)));
    summary.ok = summary.passed >= summary.required;
    return t;
}

}  // namespace dualmode::cli
