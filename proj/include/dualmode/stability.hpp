#pragma once

#include <algorithm>
#include <cmath>

#include "dualmode/detail/format.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"

namespace dualmode {

/// Real interval with explicit open/closed endpoint flags and an explicit
/// empty state. Stability boundaries are open; endpoints produced by
/// clipping to [0,1] are closed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;
    bool empty = true;

    static Interval make_empty() { return Interval{}; }

    /// Open interval (raw_lo, raw_hi) intersected with [0,1]. The caller
    /// guarantees the intersection is non-empty.
    static Interval clip_to_unit(double raw_lo, double raw_hi) {
        Interval r;
        r.empty = false;
        r.lo_open = raw_lo >= 0.0;
        r.hi_open = raw_hi <= 1.0;
        r.lo = std::max(raw_lo, 0.0);
        r.hi = std::min(raw_hi, 1.0);
        r.hi = std::max(r.hi, r.lo);
        return r;
    }

    double width() const { return empty ? 0.0 : hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }

    bool contains(double x) const {
        if (empty) return false;
        if (x < lo || x > hi) return false;
        if (x == lo && lo_open) return false;
        if (x == hi && hi_open) return false;
        return true;
    }
};

using AssignmentRange = Interval;
using FractionRange = Interval;

enum class BindingConstraint {
    local_capacity,   ///< mu_l1: all-SM1 traffic saturates the local server
    cloud_capacity,   ///< mu_c2: all-SM2 traffic saturates the cloud server
    system_capacity,  ///< mu_star: combined capacity of both servers
};

inline const char* binding_constraint_name(BindingConstraint b) {
    switch (b) {
        case BindingConstraint::local_capacity: return "local-capacity";
        case BindingConstraint::cloud_capacity: return "cloud-capacity";
        case BindingConstraint::system_capacity: return "system-capacity";
    }
    return "unknown";
}

struct StabilityRegion {
    double lambda_max;
    BindingConstraint binding;
};

/// Combined two-server capacity in raw rates. Equals (K+1)*mu0.
inline double mu_star(const RateParams& r) {
    const double num = r.mu_c1 * r.mu_c2 * (r.mu_l1 - r.mu_l2) +
                       r.mu_l1 * r.mu_l2 * (r.mu_c2 - r.mu_c1);
    const double den = r.mu_l1 * r.mu_c2 - r.mu_l2 * r.mu_c1;
    return num / den;
}

namespace detail {

inline StabilityRegion stability_region_from(double mu_l1, double mu_c2, double mu_s) {
    const double lambda_max = std::min({mu_l1, mu_c2, mu_s});
    // Tie-break order: system capacity, then local, then cloud.
    BindingConstraint binding = BindingConstraint::cloud_capacity;
    if (mu_s == lambda_max) {
        binding = BindingConstraint::system_capacity;
    } else if (mu_l1 == lambda_max) {
        binding = BindingConstraint::local_capacity;
    }
    return StabilityRegion{lambda_max, binding};
}

}  // namespace detail

inline StabilityRegion stability_region(const RateParams& rates) {
    const RateParams r = validate_rates(rates);
    return detail::stability_region_from(r.mu_l1, r.mu_c2, mu_star(r));
}

inline StabilityRegion stability_region(const CanonicalParams& canon) {
    validate_canonical(canon);
    const double inf = std::numeric_limits<double>::infinity();
    const double mu_l1 = canon.f1 == 0.0 ? inf : canon.mu0 / canon.f1;
    const double mu_c2 = canon.f2 == 1.0 ? inf : canon.K * canon.mu0 / (1.0 - canon.f2);
    return detail::stability_region_from(mu_l1, mu_c2, canon.mu_star());
}

namespace detail {

/// Raw open interval (p_min, p_max) of SM1 assignment probabilities that
/// admit a stabilizing partition, before clipping to [0,1]. Below p_min the
/// combined local work overloads the local server; above p_max the combined
/// cloud work overloads the cloud server.
inline void raw_assignment_bounds(const CanonicalParams& c, double lambda, double& p_min,
                                  double& p_max) {
    const double df = c.f2 - c.f1;
    p_min = (c.f2 - c.mu0 / lambda) / df;
    p_max = (c.K * c.mu0 / lambda - (1.0 - c.f2)) / df;
}

}  // namespace detail

inline AssignmentRange assignment_range(const CanonicalParams& canon, double lambda) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (lambda >= stability_region(canon).lambda_max) return Interval::make_empty();
    double p_min, p_max;
    detail::raw_assignment_bounds(canon, lambda, p_min, p_max);
    return Interval::clip_to_unit(p_min, p_max);
}

inline AssignmentRange assignment_range(const RateParams& rates, double lambda) {
    return assignment_range(to_canonical(rates), lambda);
}

inline FractionRange feasible_fractions(const CanonicalParams& canon, double lambda) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (lambda >= canon.mu_star()) return Interval::make_empty();
    return Interval::clip_to_unit(1.0 - canon.K * canon.mu0 / lambda, canon.mu0 / lambda);
}

/// Per-queue stability check of one operating point. A queue with zero
/// arrival rate is stable regardless of its capacity share, which makes the
/// exclusive endpoints p = 0 and p = 1 usable with alpha, beta in {0,1}.
inline bool is_stable(const RateParams& rates, const OperatingPoint& op, double lambda) {
    auto queue_ok = [](double arrival, double capacity) {
        return arrival <= 0.0 || arrival < capacity;
    };
    const double sm1 = lambda * op.p;
    const double sm2 = lambda * (1.0 - op.p);
    return queue_ok(sm1, op.alpha * rates.mu_l1) &&
           queue_ok(sm2, (1.0 - op.alpha) * rates.mu_l2) &&
           queue_ok(sm1, op.beta * rates.mu_c1) &&
           queue_ok(sm2, (1.0 - op.beta) * rates.mu_c2);
}

/// Constructive stabilizing point: midpoint assignment plus midpoint
/// partitions, each sitting halfway between its two stability constraints.
inline OperatingPoint witness_operating_point(const RateParams& rates, double lambda) {
    const RateParams r = validate_rates(rates);
    const AssignmentRange range = assignment_range(r, lambda);
    if (range.empty) {
        fail(errc::unstable, "lambda = " + detail::format_double(lambda) +
                                 " is at or above lambda_max = " +
                                 detail::format_double(stability_region(r).lambda_max));
    }
    const double p = range.midpoint();
    const double pbar = 1.0 - p;
    OperatingPoint op;
    op.p = p;
    op.alpha = 0.5 * (1.0 - lambda * pbar / r.mu_l2 + lambda * p / r.mu_l1);
    op.beta = 0.5 * (1.0 - lambda * pbar / r.mu_c2 + lambda * p / r.mu_c1);
    return op;
}

}  // namespace dualmode
