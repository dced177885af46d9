#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dualmode/detail/format.hpp"
#include "dualmode/error.hpp"

namespace dualmode {

/// Full-capacity service rates of the two servers under each service mode.
/// Under SM1 a job offloads more of its work to the cloud than under SM2,
/// so the local server clears SM1 jobs faster and the cloud clears them
/// slower: mu_l1 > mu_l2 and mu_c1 < mu_c2.
struct RateParams {
    double mu_l1;  ///< local server rate when serving an SM1 job
    double mu_l2;  ///< local server rate when serving an SM2 job
    double mu_c1;  ///< cloud server rate when serving an SM1 job
    double mu_c2;  ///< cloud server rate when serving an SM2 job

    bool finite() const {
        return std::isfinite(mu_l1) && std::isfinite(mu_l2) && std::isfinite(mu_c1) &&
               std::isfinite(mu_c2);
    }
};

/// Canonical parameterization: effective local capacity mu0, cloud/local
/// capacity ratio K > 1, and local workload fractions f1 < f2 of the two
/// modes. The mapping to rates is mu_l1 = mu0/f1, mu_l2 = mu0/f2,
/// mu_c1 = K*mu0/(1-f1), mu_c2 = K*mu0/(1-f2); total service capacity is
/// mu_star() = (K+1)*mu0. f1 = 0 or f2 = 1 describe idealized systems whose
/// corresponding raw rate is infinite.
struct CanonicalParams {
    double mu0;
    double K;
    double f1;
    double f2;

    double mu_star() const { return (K + 1.0) * mu0; }
};

/// Operating point: probability p of assigning an arrival to SM1, plus the
/// local and cloud capacity fractions alpha, beta reserved for SM1 traffic.
struct OperatingPoint {
    double p;
    double alpha;
    double beta;
};

enum class SystemClass {
    throughput_efficient,  ///< f1 < 1/(K+1) < f2; mixing can reach full capacity
    local_bottleneck,      ///< f1 >= 1/(K+1); SM1 alone already local-bound
    cloud_bottleneck,      ///< f2 <= 1/(K+1); SM2 alone already cloud-bound
};

/// Whether from_canonical may return infinite rates for idealized systems
/// (f1 = 0 or f2 = 1) instead of rejecting them.
enum class RateMode { finite_only, extended };

/// Checks positivity, mode ordering and that the cloud is effectively faster
/// (K > 1). With normalize_server_order set, a parameterization whose K is
/// below 1 is repaired by swapping the roles of the two servers; K = 1 is
/// rejected either way.
inline RateParams validate_rates(const RateParams& raw, bool normalize_server_order = false) {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(raw.mu_l1) || !positive(raw.mu_l2) || !positive(raw.mu_c1) ||
        !positive(raw.mu_c2)) {
        fail(errc::non_positive_rate, "all four service rates must be finite and positive");
    }
    if (raw.mu_l1 == raw.mu_l2 || raw.mu_c1 == raw.mu_c2) {
        fail(errc::degenerate_modes, "the two modes must differ on both servers");
    }
    if (raw.mu_l2 > raw.mu_l1 || raw.mu_c1 > raw.mu_c2) {
        fail(errc::mode_ordering_violated,
             "SM1 must be the locally lighter mode: mu_l2 < mu_l1 and mu_c1 < mu_c2");
    }
    // K = mu_c1*mu_c2*(mu_l1-mu_l2) / (mu_l1*mu_l2*(mu_c2-mu_c1))
    const double k_num = raw.mu_c1 * raw.mu_c2 * (raw.mu_l1 - raw.mu_l2);
    const double k_den = raw.mu_l1 * raw.mu_l2 * (raw.mu_c2 - raw.mu_c1);
    if (k_num == k_den) {
        fail(errc::cloud_not_faster, "cloud/local capacity ratio K equals 1");
    }
    if (k_num < k_den) {
        if (!normalize_server_order) {
            fail(errc::cloud_not_faster,
                 "cloud/local capacity ratio K = " + detail::format_double(k_num / k_den) +
                     " must exceed 1 (pass normalize_server_order to swap servers)");
        }
        // Swapping which server is "local" exchanges mode roles as well.
        return RateParams{raw.mu_c2, raw.mu_c1, raw.mu_l2, raw.mu_l1};
    }
    return raw;
}

inline void validate_canonical(const CanonicalParams& canon) {
    if (!std::isfinite(canon.mu0) || canon.mu0 <= 0.0) {
        fail(errc::non_positive_rate, "mu0 must be finite and positive");
    }
    if (!std::isfinite(canon.K)) fail(errc::invalid_parameter, "K must be finite");
    if (canon.K <= 1.0) {
        fail(errc::cloud_not_faster,
             "K = " + detail::format_double(canon.K) + " must exceed 1");
    }
    if (!std::isfinite(canon.f1) || !std::isfinite(canon.f2) || canon.f1 < 0.0 ||
        canon.f2 > 1.0) {
        fail(errc::invalid_parameter, "workload fractions must lie in [0, 1]");
    }
    if (canon.f1 == canon.f2) fail(errc::degenerate_modes, "f1 and f2 must differ");
    if (canon.f1 > canon.f2) {
        fail(errc::mode_ordering_violated, "f1 < f2 is required (SM1 is the locally lighter mode)");
    }
}

/// Rates -> canonical. Validates the rates first, so any RateParams accepted
/// here satisfies 0 < f1 < f2 < 1 and K > 1.
inline CanonicalParams to_canonical(const RateParams& rates) {
    const RateParams r = validate_rates(rates);
    const double dl = r.mu_l1 - r.mu_l2;
    const double dc = r.mu_c2 - r.mu_c1;
    const double den = r.mu_l1 * r.mu_c2 - r.mu_l2 * r.mu_c1;
    CanonicalParams canon;
    canon.mu0 = r.mu_l1 * r.mu_l2 * dc / den;
    canon.K = r.mu_c1 * r.mu_c2 * dl / (r.mu_l1 * r.mu_l2 * dc);
    canon.f1 = r.mu_l2 * dc / den;
    canon.f2 = r.mu_l1 * dc / den;
    return canon;
}

/// Canonical -> rates. f1 = 0 or f2 = 1 yield infinite rates, which are
/// returned as +inf sentinels only in RateMode::extended.
inline RateParams from_canonical(const CanonicalParams& canon,
                                 RateMode mode = RateMode::finite_only) {
    validate_canonical(canon);
    if (mode == RateMode::finite_only && (canon.f1 == 0.0 || canon.f2 == 1.0)) {
        fail(errc::infinite_rate,
             "f1 = 0 or f2 = 1 implies an infinite rate; use RateMode::extended");
    }
    const double inf = std::numeric_limits<double>::infinity();
    RateParams r;
    r.mu_l1 = canon.f1 == 0.0 ? inf : canon.mu0 / canon.f1;
    r.mu_l2 = canon.mu0 / canon.f2;
    r.mu_c1 = canon.K * canon.mu0 / (1.0 - canon.f1);
    r.mu_c2 = canon.f2 == 1.0 ? inf : canon.K * canon.mu0 / (1.0 - canon.f2);
    return r;
}

/// Position of the balanced local share 1/(K+1) relative to [f1, f2].
inline SystemClass classify(const CanonicalParams& canon) {
    validate_canonical(canon);
    const double balanced = 1.0 / (canon.K + 1.0);
    if (canon.f1 >= balanced) return SystemClass::local_bottleneck;
    if (canon.f2 <= balanced) return SystemClass::cloud_bottleneck;
    return SystemClass::throughput_efficient;
}

inline const char* system_class_name(SystemClass c) {
    switch (c) {
        case SystemClass::throughput_efficient: return "throughput-efficient";
        case SystemClass::local_bottleneck: return "local-bottleneck";
        case SystemClass::cloud_bottleneck: return "cloud-bottleneck";
    }
    return "unknown";
}

}  // namespace dualmode
