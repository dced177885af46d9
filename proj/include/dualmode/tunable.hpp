#pragma once

#include <cassert>
#include <cmath>

#include "dualmode/detail/format.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/stability.hpp"

namespace dualmode {

enum class TunableRegime {
    cloud_only,  ///< f* = 0: all work offloaded
    interior,    ///< f* = f_min > 0: local share pinned by the local queue
};

struct TunableOptimum {
    double f_star;
    double t_star;
    TunableRegime regime;
};

/// Mean delay of the tunable benchmark system that routes a fraction f of
/// every job's work to the local server: two M/M/1 terms at effective rates
/// mu0/f and K*mu0/(1-f).
inline double delay_tm(double f, double lambda, const CanonicalParams& canon) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (!(f >= 0.0 && f <= 1.0)) {
        fail(errc::infeasible_fraction,
             "f = " + detail::format_double(f) + " outside [0, 1]");
    }
    const double local_slack = canon.mu0 - f * lambda;
    const double cloud_slack = canon.K * canon.mu0 - (1.0 - f) * lambda;
    if (local_slack <= 0.0 || cloud_slack <= 0.0) {
        fail(errc::infeasible_fraction,
             "f = " + detail::format_double(f) + " is outside the stable fraction range");
    }
    return f / local_slack + (1.0 - f) / cloud_slack;
}

/// Delay-minimizing local fraction f*(lambda) and the minimal delay, both in
/// closed form. Below the threshold load mu0*(K - sqrt(K)) the cloud alone
/// is best; above it the optimum is the interior stationary point f_min.
inline TunableOptimum optimal_fraction(double lambda, const CanonicalParams& canon) {
    validate_canonical(canon);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (lambda >= canon.mu_star()) {
        fail(errc::unstable, "lambda = " + detail::format_double(lambda) +
                                 " is at or above total capacity " +
                                 detail::format_double(canon.mu_star()));
    }
    const double root_k = std::sqrt(canon.K);
    // Sign test before the division so lambda -> 0 cannot overflow.
    const double fmin_num = lambda - canon.mu0 * (canon.K - root_k);
    TunableOptimum out;
    if (fmin_num <= 0.0) {
        out.f_star = 0.0;
        out.t_star = 1.0 / (canon.K * canon.mu0 - lambda);
        out.regime = TunableRegime::cloud_only;
    } else {
        out.f_star = fmin_num / (lambda * (1.0 + root_k));
        const double rk1 = root_k - 1.0;
        out.t_star =
            (2.0 * lambda - rk1 * rk1 * canon.mu0) / (lambda * (canon.mu_star() - lambda));
        out.regime = TunableRegime::interior;
    }
    // The closed form is the claim under test; it must agree with a direct
    // evaluation of the delay at f_star.
    assert(std::abs(out.t_star - delay_tm(out.f_star, lambda, canon)) <=
           1e-12 * std::abs(out.t_star) + 1e-15);
    return out;
}

}  // namespace dualmode
