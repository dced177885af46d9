#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <vector>

#include "dualmode/allocation.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/rng.hpp"
#include "dualmode/stability.hpp"
#include "dualmode/stats.hpp"

namespace dualmode {

struct SimConfig {
    std::uint64_t seed = 1;
    std::uint64_t horizon_jobs = 100000;  ///< departures measured after warmup
    std::uint64_t warmup_jobs = 10000;    ///< departures discarded first
    int batches = 20;
    double confidence = 0.95;
    bool allow_unstable = false;  ///< simulate anyway, truncated at the horizon
};

inline SimConfig default_sim_config(std::uint64_t seed, std::uint64_t horizon) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.horizon_jobs = horizon;
    cfg.warmup_jobs = horizon / 10;
    return cfg;
}

/// Queue indices: 0 = SM1 local, 1 = SM1 cloud, 2 = SM2 local, 3 = SM2 cloud.
struct SimResult {
    double mean_delay;
    double ci_half_width;
    std::array<double, 2> per_mode_mean;
    std::array<std::uint64_t, 2> per_mode_jobs;
    std::array<double, 4> per_queue_utilization;
    std::uint64_t jobs_measured;
    double time_avg_in_system;  ///< for the Little's-law cross-check
    double sm1_arrival_fraction;
    std::uint64_t arrivals_seen;
    double measurement_duration;
};

/// Event-driven simulation of the dual-mode system: Poisson arrivals split
/// by a Bernoulli(p) coin into two independent local->cloud tandems with
/// exponential services at the partitioned rates. Deterministic for a given
/// config: one RNG stream per stochastic source, an event heap keyed by
/// (time, sequence), and sequential accumulation in event order.
inline SimResult simulate(const RateParams& rates, const OperatingPoint& op, double lambda,
                          const SimConfig& cfg) {
    if (cfg.batches < 2) fail(errc::invalid_config, "at least 2 batches are required");
    if (cfg.horizon_jobs < static_cast<std::uint64_t>(cfg.batches) * 100) {
        fail(errc::invalid_config, "horizon_jobs must be at least batches * 100");
    }
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
        fail(errc::invalid_config, "confidence must lie in (0, 1)");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(errc::invalid_parameter, "lambda must be finite and positive");
    }
    if (!(op.p >= 0.0 && op.p <= 1.0) || !(op.alpha >= 0.0 && op.alpha <= 1.0) ||
        !(op.beta >= 0.0 && op.beta <= 1.0)) {
        fail(errc::invalid_parameter, "operating point fields must lie in [0, 1]");
    }

    const std::array<double, 4> rate = {op.alpha * rates.mu_l1, op.beta * rates.mu_c1,
                                        (1.0 - op.alpha) * rates.mu_l2,
                                        (1.0 - op.beta) * rates.mu_c2};
    if (op.p > 0.0 && (!(rate[0] > 0.0) || !(rate[1] > 0.0))) {
        fail(errc::degenerate_config, "SM1 receives jobs but has a zero-capacity queue");
    }
    if (op.p < 1.0 && (!(rate[2] > 0.0) || !(rate[3] > 0.0))) {
        fail(errc::degenerate_config, "SM2 receives jobs but has a zero-capacity queue");
    }
    if (!is_stable(rates, op, lambda) && !cfg.allow_unstable) {
        fail(errc::unstable_simulation,
             "operating point is unstable at lambda = " + detail::format_double(lambda) +
                 "; set allow_unstable to truncate at the horizon");
    }

    // Independent streams per stochastic source.
    Xoshiro256pp arrival_rng(cfg.seed, 0);
    Xoshiro256pp coin_rng(cfg.seed, 1);
    std::array<Xoshiro256pp, 4> service_rng = {
        Xoshiro256pp(cfg.seed, 2), Xoshiro256pp(cfg.seed, 3), Xoshiro256pp(cfg.seed, 4),
        Xoshiro256pp(cfg.seed, 5)};

    struct Event {
        double time;
        std::uint64_t seq;
        int type;  // -1 arrival, otherwise completion at queue `type`

        bool operator>(const Event& other) const {
            if (time != other.time) return time > other.time;
            return seq > other.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
    std::uint64_t next_seq = 0;

    std::array<std::deque<double>, 4> pending;  // job arrival stamps
    std::array<double, 4> in_service{};
    std::array<bool, 4> busy{};

    auto start_service = [&](int q, double now) {
        in_service[q] = pending[q].front();
        pending[q].pop_front();
        busy[q] = true;
        events.push(Event{now + service_rng[q].exponential(rate[q]), next_seq++, q});
    };

    const std::uint64_t batch_size = cfg.horizon_jobs / cfg.batches;
    const std::uint64_t target = batch_size * cfg.batches;
    BatchMeans batch_means(batch_size, cfg.batches);

    std::uint64_t arrivals_seen = 0;
    std::uint64_t sm1_arrivals = 0;
    std::uint64_t departures = 0;
    std::uint64_t measured = 0;
    std::array<double, 2> mode_delay_sum{};
    std::array<std::uint64_t, 2> mode_jobs{};
    std::array<double, 4> busy_time{};
    double area = 0.0;  // integral of jobs-in-system over the window
    std::uint64_t in_system = 0;
    bool measuring = cfg.warmup_jobs == 0;
    double meas_start = 0.0;
    double meas_end = 0.0;
    double last_t = 0.0;

    events.push(Event{arrival_rng.exponential(lambda), next_seq++, -1});

    while (measured < target) {
        const Event ev = events.top();
        events.pop();
        const double now = ev.time;
        if (measuring) {
            const double dt = now - last_t;
            area += static_cast<double>(in_system) * dt;
            for (int q = 0; q < 4; ++q) {
                if (busy[q]) busy_time[q] += dt;
            }
        }
        last_t = now;

        if (ev.type < 0) {
            ++arrivals_seen;
            ++in_system;
            const bool sm1 = coin_rng.uniform01() < op.p;
            if (sm1) ++sm1_arrivals;
            const int q = sm1 ? 0 : 2;
            pending[q].push_back(now);
            if (!busy[q]) start_service(q, now);
            events.push(Event{now + arrival_rng.exponential(lambda), next_seq++, -1});
        } else if (ev.type == 0 || ev.type == 2) {
            const int q = ev.type;
            const double stamp = in_service[q];
            busy[q] = false;
            if (!pending[q].empty()) start_service(q, now);
            const int cloud = q + 1;
            pending[cloud].push_back(stamp);
            if (!busy[cloud]) start_service(cloud, now);
        } else {
            const int q = ev.type;
            const double delay = now - in_service[q];
            busy[q] = false;
            if (!pending[q].empty()) start_service(q, now);
            --in_system;
            ++departures;
            if (measuring) {
                batch_means.add(delay);
                const int mode = q == 1 ? 0 : 1;
                mode_delay_sum[mode] += delay;
                ++mode_jobs[mode];
                if (++measured == target) meas_end = now;
            } else if (departures == cfg.warmup_jobs) {
                measuring = true;
                meas_start = now;
                last_t = now;
            }
        }
    }

    SimResult result;
    result.mean_delay = batch_means.mean();
    result.ci_half_width = batch_means.half_width(cfg.confidence);
    for (int m = 0; m < 2; ++m) {
        result.per_mode_mean[m] =
            mode_jobs[m] == 0 ? 0.0 : mode_delay_sum[m] / static_cast<double>(mode_jobs[m]);
        result.per_mode_jobs[m] = mode_jobs[m];
    }
    const double duration = meas_end - meas_start;
    for (int q = 0; q < 4; ++q) {
        result.per_queue_utilization[q] = duration > 0.0 ? busy_time[q] / duration : 0.0;
    }
    result.jobs_measured = target;
    result.time_avg_in_system = duration > 0.0 ? area / duration : 0.0;
    result.sm1_arrival_fraction =
        arrivals_seen == 0 ? 0.0
                           : static_cast<double>(sm1_arrivals) / static_cast<double>(arrivals_seen);
    result.arrivals_seen = arrivals_seen;
    result.measurement_duration = duration;
    return result;
}

/// Simulation check of one analytic point: simulate at the optimal partition
/// for (p, lambda) and compare against the closed-form delay.
struct PointValidation {
    OperatingPoint op;
    double analytic_delay;
    SimResult sim;
    double slack;
    bool pass;
};

inline PointValidation validate_point(const RateParams& rates, double p, double lambda,
                                      const SimConfig& cfg) {
    PointValidation v;
    v.op = optimal_partition(p, lambda, rates);
    v.analytic_delay = optimal_delay_dm(p, lambda, rates);
    v.sim = simulate(rates, v.op, lambda, cfg);
    v.slack = 1.2;
    v.pass = std::abs(v.analytic_delay - v.sim.mean_delay) <= v.sim.ci_half_width * v.slack;
    return v;
}

}  // namespace dualmode
