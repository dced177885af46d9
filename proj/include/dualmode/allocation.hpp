#pragma once

#include <cmath>
#include <limits>

#include "dualmode/detail/format.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/stability.hpp"
#include "dualmode/tunable.hpp"

namespace dualmode {

/// Split of the optimally partitioned dual-mode delay into the tunable-mode
/// benchmark value at the effective fraction f(p) plus the nonnegative
/// mode-splitting overhead.
struct DelayBreakdown {
    double total;
    double tm_term;
    double oh_term;
    double f_effective;
};

namespace detail {

/// Validates p against the feasible assignment range. Values within 1e-12 of
/// a closed endpoint are snapped to it so sweep grids touching 0 or 1 do not
/// fall out of the range through rounding.
inline double require_feasible_p(double p, const Interval& range, double lambda) {
    if (!range.empty) {
        if (range.contains(p)) return p;
        if (!range.lo_open && std::abs(p - range.lo) <= 1e-12) return range.lo;
        if (!range.hi_open && std::abs(p - range.hi) <= 1e-12) return range.hi;
    }
    fail(errc::infeasible_assignment,
         "p = " + format_double(p) + " is outside the feasible assignment range at lambda = " +
             format_double(lambda));
}

/// Optimally partitioned dual-mode delay in canonical form. Returns +inf
/// instead of throwing on infeasible p; used by optimizers on closures.
inline double optimal_delay_unchecked(const CanonicalParams& c, double lambda,
                                      double p) noexcept {
    if (!(p >= 0.0 && p <= 1.0)) return std::numeric_limits<double>::infinity();
    const double pbar = 1.0 - p;
    const double f = p * c.f1 + pbar * c.f2;
    const double local_slack = c.mu0 - lambda * f;
    const double cloud_slack = c.K * c.mu0 - lambda * (1.0 - f);
    if (!(local_slack > 0.0) || !(cloud_slack > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    const double a = std::sqrt(p * c.f1) + std::sqrt(pbar * c.f2);
    const double b = std::sqrt(p * (1.0 - c.f1)) + std::sqrt(pbar * (1.0 - c.f2));
    return a * a / local_slack + b * b / cloud_slack;
}

}  // namespace detail

/// Mean delay at an explicit operating point: four M/M/1 sojourn terms, two
/// per mode. A mode with zero assignment probability contributes nothing
/// regardless of its (idle) capacity shares.
inline double delay_dm(const OperatingPoint& op, double lambda, const RateParams& rates) {
    if (!rates.finite()) {
        fail(errc::infinite_rate, "raw-rate evaluation requires finite rates");
    }
    auto term = [](double weight, double load, double capacity) {
        if (weight == 0.0) return 0.0;
        const double slack = capacity - load;
        if (slack <= 0.0) {
            fail(errc::unstable, "queue load " + detail::format_double(load) +
                                     " meets or exceeds capacity " +
                                     detail::format_double(capacity));
        }
        return weight / slack;
    };
    const double p = op.p;
    const double pbar = 1.0 - op.p;
    const double sm1 = lambda * p;
    const double sm2 = lambda * pbar;
    return term(p, sm1, op.alpha * rates.mu_l1) + term(p, sm1, op.beta * rates.mu_c1) +
           term(pbar, sm2, (1.0 - op.alpha) * rates.mu_l2) +
           term(pbar, sm2, (1.0 - op.beta) * rates.mu_c2);
}

/// Delay-optimal capacity split (alpha*, beta*) for a fixed assignment p, in
/// closed form. At p = 0 and p = 1 the formulas degenerate to handing all
/// capacity to the active mode.
inline OperatingPoint optimal_partition(double p, double lambda, const RateParams& rates) {
    const RateParams r = validate_rates(rates);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    p = detail::require_feasible_p(p, assignment_range(r, lambda), lambda);
    const double pbar = 1.0 - p;
    const double sl1 = std::sqrt(p / r.mu_l1);
    const double sl2 = std::sqrt(pbar / r.mu_l2);
    const double sc1 = std::sqrt(p / r.mu_c1);
    const double sc2 = std::sqrt(pbar / r.mu_c2);
    OperatingPoint op;
    op.p = p;
    op.alpha = ((lambda * p / r.mu_l1) * sl2 + (1.0 - lambda * pbar / r.mu_l2) * sl1) /
               (sl1 + sl2);
    op.beta = ((lambda * p / r.mu_c1) * sc2 + (1.0 - lambda * pbar / r.mu_c2) * sc1) /
              (sc1 + sc2);
    return op;
}

/// Dual-mode delay under the optimal partition for fixed p, in closed form.
inline double optimal_delay_dm(double p, double lambda, const RateParams& rates) {
    const RateParams r = validate_rates(rates);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    p = detail::require_feasible_p(p, assignment_range(r, lambda), lambda);
    const double pbar = 1.0 - p;
    const double local_slack = 1.0 - lambda * p / r.mu_l1 - lambda * pbar / r.mu_l2;
    const double cloud_slack = 1.0 - lambda * p / r.mu_c1 - lambda * pbar / r.mu_c2;
    const double a = std::sqrt(p / r.mu_l1) + std::sqrt(pbar / r.mu_l2);
    const double b = std::sqrt(p / r.mu_c1) + std::sqrt(pbar / r.mu_c2);
    return a * a / local_slack + b * b / cloud_slack;
}

/// Canonical-form evaluation of the optimally partitioned delay, split into
/// the tunable-mode term at f(p) and the mode-splitting overhead. Stays
/// finite for idealized systems (f1 = 0 or f2 = 1).
inline DelayBreakdown delay_decomposition(double p, double lambda,
                                          const CanonicalParams& canon) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    p = detail::require_feasible_p(p, assignment_range(canon, lambda), lambda);
    const double pbar = 1.0 - p;
    DelayBreakdown out;
    out.f_effective = p * canon.f1 + pbar * canon.f2;
    out.tm_term = delay_tm(out.f_effective, lambda, canon);
    const double local_slack = canon.mu0 - lambda * out.f_effective;
    const double cloud_slack = canon.K * canon.mu0 - lambda * (1.0 - out.f_effective);
    out.oh_term = 2.0 * std::sqrt(p * pbar) *
                  (std::sqrt(canon.f1 * canon.f2) / local_slack +
                   std::sqrt((1.0 - canon.f1) * (1.0 - canon.f2)) / cloud_slack);
    out.total = out.tm_term + out.oh_term;
    return out;
}

/// Excess of the optimally partitioned dual-mode delay at assignment p over
/// the tunable-mode optimum. Nonnegative; zero exactly at touch points.
inline double lower_bound_gap(double p, double lambda, const CanonicalParams& canon) {
    const DelayBreakdown breakdown = delay_decomposition(p, lambda, canon);
    return breakdown.total - optimal_fraction(lambda, canon).t_star;
}

}  // namespace dualmode
