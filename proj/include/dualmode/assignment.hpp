#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dualmode/allocation.hpp"
#include "dualmode/detail/format.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/stability.hpp"

namespace dualmode {

enum class AssignmentRegime {
    exclusive_sm1,  ///< p* = 1
    exclusive_sm2,  ///< p* = 0
    mixed,          ///< p* in (0, 1)
};

inline const char* assignment_regime_name(AssignmentRegime r) {
    switch (r) {
        case AssignmentRegime::exclusive_sm1: return "exclusive-sm1";
        case AssignmentRegime::exclusive_sm2: return "exclusive-sm2";
        case AssignmentRegime::mixed: return "mixed";
    }
    return "unknown";
}

struct AssignmentOptimum {
    double p_star;
    double delay;
    AssignmentRegime regime;
};

enum class PredictedRegime {
    forced_sm1,          ///< p* = 1 is guaranteed
    forced_sm2,          ///< p* = 0 is guaranteed
    must_mix,            ///< p* in (0,1) is guaranteed
    breakaway_required,  ///< p* < 1 is guaranteed (existence only)
    no_prediction,
};

inline const char* predicted_regime_name(PredictedRegime p) {
    switch (p) {
        case PredictedRegime::forced_sm1: return "forced-sm1";
        case PredictedRegime::forced_sm2: return "forced-sm2";
        case PredictedRegime::must_mix: return "must-mix";
        case PredictedRegime::breakaway_required: return "breakaway-required";
        case PredictedRegime::no_prediction: return "no-prediction";
    }
    return "unknown";
}

/// Which structural rule produced a prediction.
enum class StructuralRule {
    none,
    redundant_sm2,          ///< f1 >= 1/(K+1): SM2 never helps, p* = 1 at every load
    sm2_optimal_high_load,  ///< f2 <= 1/(K+1) and load high enough: p* = 0
    needs_both_modes,       ///< load exceeds both exclusive capacities: p* in (0,1)
    low_load_sm1,           ///< load at or below the SM1 touch load: p* = 1
    high_load_breakaway,    ///< load at or above the SM1 saturation point: p* < 1
};

inline const char* structural_rule_name(StructuralRule r) {
    switch (r) {
        case StructuralRule::none: return "none";
        case StructuralRule::redundant_sm2: return "redundant-sm2";
        case StructuralRule::sm2_optimal_high_load: return "sm2-optimal-high-load";
        case StructuralRule::needs_both_modes: return "needs-both-modes";
        case StructuralRule::low_load_sm1: return "low-load-sm1";
        case StructuralRule::high_load_breakaway: return "high-load-breakaway";
    }
    return "unknown";
}

struct RegimePrediction {
    PredictedRegime prediction;
    StructuralRule rule;
    std::string certificate;  ///< the fired inequality, instantiated with numbers
};

/// Load thresholds at which the structural rules switch on, precomputed per
/// system. Fields are absent when the corresponding rule cannot apply.
struct StructuralThresholds {
    double balanced_share;                    ///< 1/(K+1)
    bool sm2_redundant;                       ///< f1 >= balanced_share
    std::optional<double> sm1_low_load_max;   ///< largest load with guaranteed p* = 1
    std::optional<double> sm1_breakaway_min;  ///< load forcing p* < 1; equals mu_c1
    std::optional<double> needs_both_min;     ///< load forcing p* in (0,1)
    std::optional<double> sm2_optimal_min;    ///< load from which p* = 0 is guaranteed
    std::optional<double> full_load_limit;    ///< lim p*(lambda) at the capacity boundary
};

inline StructuralThresholds structural_thresholds(const CanonicalParams& canon) {
    validate_canonical(canon);
    const double root_k = std::sqrt(canon.K);
    const double touch_load = canon.mu0 * (canon.K - root_k);
    StructuralThresholds out;
    out.balanced_share = 1.0 / (canon.K + 1.0);
    out.sm2_redundant = canon.f1 >= out.balanced_share;
    if (!out.sm2_redundant) {
        out.sm1_low_load_max = touch_load / (1.0 - canon.f1 * (1.0 + root_k));
        out.sm1_breakaway_min = canon.K * canon.mu0 / (1.0 - canon.f1);
    }
    if (canon.f2 <= out.balanced_share) {
        out.sm2_optimal_min = touch_load / (1.0 - canon.f2 * (1.0 + root_k));
    }
    if (classify(canon) == SystemClass::throughput_efficient) {
        out.needs_both_min =
            std::max(canon.mu0 / canon.f2, canon.K * canon.mu0 / (1.0 - canon.f1));
        out.full_load_limit = (canon.f2 - out.balanced_share) / (canon.f2 - canon.f1);
    }
    return out;
}

/// Closed-form limit of p*(lambda) as lambda approaches the capacity
/// boundary of a throughput-efficient system; the mix whose effective
/// fraction f(p) balances the two servers.
inline double limit_assignment(const CanonicalParams& canon) {
    const StructuralThresholds th = structural_thresholds(canon);
    if (!th.full_load_limit) {
        fail(errc::not_applicable,
             "full-load assignment limit requires a throughput-efficient system");
    }
    return *th.full_load_limit;
}

/// First structural rule that fires at (canon, lambda), in precedence order:
/// exact-regime rules first (redundant SM2, SM2-optimal, needs-both,
/// low-load SM1), then the existence-only breakaway rule.
inline RegimePrediction predict_regime(const CanonicalParams& canon, double lambda) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    const StructuralThresholds th = structural_thresholds(canon);
    auto num = [](double x) { return detail::format_double(x); };
    if (th.sm2_redundant) {
        return RegimePrediction{
            PredictedRegime::forced_sm1, StructuralRule::redundant_sm2,
            "f1 = " + num(canon.f1) + " >= 1/(K+1) = " + num(th.balanced_share)};
    }
    if (th.sm2_optimal_min && lambda >= *th.sm2_optimal_min) {
        return RegimePrediction{
            PredictedRegime::forced_sm2, StructuralRule::sm2_optimal_high_load,
            "f2 = " + num(canon.f2) + " <= 1/(K+1) = " + num(th.balanced_share) +
                " and lambda = " + num(lambda) + " >= " + num(*th.sm2_optimal_min)};
    }
    if (th.needs_both_min && lambda > *th.needs_both_min) {
        return RegimePrediction{
            PredictedRegime::must_mix, StructuralRule::needs_both_modes,
            "lambda = " + num(lambda) + " > max(mu0/f2, K*mu0/(1-f1)) = " +
                num(*th.needs_both_min)};
    }
    if (th.sm1_low_load_max && lambda <= *th.sm1_low_load_max) {
        return RegimePrediction{
            PredictedRegime::forced_sm1, StructuralRule::low_load_sm1,
            "f1 = " + num(canon.f1) + " < 1/(K+1) = " + num(th.balanced_share) +
                " and lambda = " + num(lambda) + " <= " + num(*th.sm1_low_load_max)};
    }
    if (th.sm1_breakaway_min && lambda >= *th.sm1_breakaway_min) {
        return RegimePrediction{
            PredictedRegime::breakaway_required, StructuralRule::high_load_breakaway,
            "f1 = " + num(canon.f1) + " < 1/(K+1) and lambda = " + num(lambda) +
                " >= K*mu0/(1-f1) = " + num(*th.sm1_breakaway_min)};
    }
    return RegimePrediction{PredictedRegime::no_prediction, StructuralRule::none, ""};
}

namespace detail {

/// Golden-section minimization of fn over [a, b]; returns the best probe.
/// fn may return +inf. Converges to boundary minima as well as interior
/// ones because only the bracket shrinks, never the evaluated set.
template <typename Fn>
inline std::pair<double, double> golden_min(Fn&& fn, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = fn(x1);
    double f2 = fn(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fn(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace detail

/// Globally minimizes the optimally partitioned delay over the feasible
/// assignment range: a coarse grid over the closure (open endpoints
/// excluded) followed by golden-section refinement of the best grid basins.
/// The critical-point equation is a high-degree polynomial, so no structure
/// beyond continuity is assumed. Ties are broken toward larger p, and
/// results within 1e-6 of a feasible endpoint snap to it.
inline AssignmentOptimum optimal_assignment(const CanonicalParams& canon, double lambda,
                                            double tol = 1e-9) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (!(tol > 0.0)) fail(errc::invalid_parameter, "tol must be positive");
    const AssignmentRange range = assignment_range(canon, lambda);
    if (range.empty) {
        fail(errc::unstable, "lambda = " + detail::format_double(lambda) +
                                 " is at or above lambda_max = " +
                                 detail::format_double(stability_region(canon).lambda_max));
    }
    auto objective = [&](double p) { return detail::optimal_delay_unchecked(canon, lambda, p); };

    constexpr int grid_points = 512;
    constexpr int refine_basins = 3;
    constexpr double tol_p = 1e-6;
    const double lo = range.lo;
    const double hi = range.hi;
    const double step = (hi - lo) / (grid_points - 1);

    std::vector<double> value(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        const double p = i == grid_points - 1 ? hi : lo + step * i;
        const bool excluded =
            (i == 0 && range.lo_open) || (i == grid_points - 1 && range.hi_open);
        value[i] = excluded ? std::numeric_limits<double>::infinity() : objective(p);
    }

    // Candidate pool: all grid points, plus refinements of the best basins.
    double best_p = hi;
    double best_v = std::numeric_limits<double>::infinity();
    auto offer = [&](double p, double v) {
        // Ties go to larger p.
        if (v < best_v || (v == best_v && p > best_p)) {
            best_p = p;
            best_v = v;
        }
    };
    for (int i = 0; i < grid_points; ++i) {
        offer(i == grid_points - 1 ? hi : lo + step * i, value[i]);
    }

    std::vector<int> minima;
    for (int i = 0; i < grid_points; ++i) {
        const double left = i > 0 ? value[i - 1] : std::numeric_limits<double>::infinity();
        const double right =
            i + 1 < grid_points ? value[i + 1] : std::numeric_limits<double>::infinity();
        if (std::isfinite(value[i]) && value[i] <= left && value[i] <= right) {
            minima.push_back(i);
        }
    }
    std::sort(minima.begin(), minima.end(),
              [&](int a, int b) { return value[a] < value[b]; });
    if (static_cast<int>(minima.size()) > refine_basins) minima.resize(refine_basins);
    for (int i : minima) {
        const double a = std::max(lo, lo + step * (i - 1));
        const double b = std::min(hi, lo + step * (i + 1));
        const auto [p, v] = detail::golden_min(objective, a, b, tol);
        offer(p, v);
    }

    AssignmentOptimum out;
    out.p_star = best_p;
    // Snap to an endpoint of the unit interval when it is feasible and the
    // refined optimum landed within tol_p of it.
    if (!range.hi_open && hi == 1.0 && 1.0 - best_p <= tol_p) out.p_star = 1.0;
    if (!range.lo_open && lo == 0.0 && best_p - 0.0 <= tol_p) out.p_star = 0.0;
    out.delay = objective(out.p_star);
    out.regime = out.p_star == 1.0  ? AssignmentRegime::exclusive_sm1
                 : out.p_star == 0.0 ? AssignmentRegime::exclusive_sm2
                                     : AssignmentRegime::mixed;
    return out;
}

inline AssignmentOptimum optimal_assignment(double lambda, const RateParams& rates,
                                            double tol = 1e-9) {
    return optimal_assignment(to_canonical(rates), lambda, tol);
}

/// Smallest load at which exclusive SM1 assignment stops being optimal,
/// located by bisection of the predicate "p*(lambda) < 1" on the bracket
/// guaranteed by the low-load and saturation rules. A 64-point scan checks
/// that the predicate is monotone on the bracket before bisecting.
inline double breakaway_load(const CanonicalParams& canon, double tol = 1e-6) {
    validate_canonical(canon);
    if (!(tol > 0.0)) fail(errc::invalid_parameter, "tol must be positive");
    const StructuralThresholds th = structural_thresholds(canon);
    if (th.sm2_redundant) {
        fail(errc::not_applicable,
             "f1 = " + detail::format_double(canon.f1) +
                 " >= 1/(K+1): exclusive SM1 stays optimal at every load");
    }
    constexpr double tol_p = 1e-6;
    auto broken_away = [&](double lambda) {
        return optimal_assignment(canon, lambda).p_star < 1.0 - tol_p;
    };
    const double lo = *th.sm1_low_load_max;
    const double hi = *th.sm1_breakaway_min;
    constexpr int scan_points = 64;
    bool seen_true = false;
    for (int i = 0; i < scan_points; ++i) {
        const double lambda = lo + (hi - lo) * i / (scan_points - 1);
        const bool b = broken_away(lambda);
        if (seen_true && !b) {
            fail(errc::non_monotone_breakaway,
                 "exclusive-SM1 optimality is not monotone in load near lambda = " +
                     detail::format_double(lambda));
        }
        seen_true = seen_true || b;
    }
    double a = lo;
    double b = hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        (broken_away(mid) ? b : a) = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace dualmode
