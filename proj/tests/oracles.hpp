#pragma once

// Independent reference computations for the test suite. Everything here is
// derived from the raw mean-delay expressions by brute force (dense scans
// with pattern-search refinement), deliberately avoiding the closed forms
// under test in the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Mean delay of the single-queue-pair benchmark that puts a fraction f of
/// every job's work on the local server (rate mu0/f) and the rest on the
/// cloud (rate K*mu0/(1-f)): two M/M/1 sojourn terms.
inline double tm_delay(double mu0, double K, double f, double lambda) {
    const double local_slack = mu0 - f * lambda;
    const double cloud_slack = K * mu0 - (1.0 - f) * lambda;
    if (!(local_slack > 0.0) || !(cloud_slack > 0.0)) return kInf;
    return f / local_slack + (1.0 - f) / cloud_slack;
}

struct Best1D {
    double x;
    double value;
};

/// Dense scan over [lo, hi] followed by a ternary-search polish of the best
/// bracket. The final answer is never worse than the best scanned point.
template <typename Fn>
inline Best1D scan_min(Fn&& fn, double lo, double hi, int points, int polish_rounds = 200) {
    double best_x = lo;
    double best_v = kInf;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double v = fn(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double step = (hi - lo) / (points - 1);
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    for (int round = 0; round < polish_rounds; ++round) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (fn(m1) <= fn(m2)) {
            b = m2;
        } else {
            a = m1;
        }
    }
    const double x = 0.5 * (a + b);
    const double v = fn(x);
    return v <= best_v ? Best1D{x, v} : Best1D{best_x, best_v};
}

inline Best1D best_fraction(double mu0, double K, double lambda, int points = 100001) {
    return scan_min([&](double f) { return tm_delay(mu0, K, f, lambda); }, 0.0, 1.0, points);
}

/// Mean delay at an explicit operating point: four M/M/1 terms, one per
/// (mode, server) queue, weighted by the mode probabilities.
inline double dm_delay(double mu_l1, double mu_l2, double mu_c1, double mu_c2, double p,
                       double alpha, double beta, double lambda) {
    const double pbar = 1.0 - p;
    auto term = [](double weight, double arrivals, double capacity) {
        if (weight == 0.0) return 0.0;
        const double slack = capacity - arrivals;
        return slack > 0.0 ? weight / slack : kInf;
    };
    return term(p, lambda * p, alpha * mu_l1) + term(p, lambda * p, beta * mu_c1) +
           term(pbar, lambda * pbar, (1.0 - alpha) * mu_l2) +
           term(pbar, lambda * pbar, (1.0 - beta) * mu_c2);
}

struct Best2D {
    double alpha;
    double beta;
    double value;
};

/// Brute-force best capacity split (alpha, beta) for fixed (p, lambda):
/// repeated zoom of a cell-center grid over the unit square. If every cell
/// center in a round is infeasible the grid is refined in place.
inline Best2D best_partition(double mu_l1, double mu_l2, double mu_c1, double mu_c2, double p,
                             double lambda, int grid = 64, int rounds = 9) {
    double alo = 0.0, ahi = 1.0, blo = 0.0, bhi = 1.0;
    Best2D best{0.5, 0.5, kInf};
    int g = grid;
    for (int round = 0; round < rounds;) {
        const double cell_a = (ahi - alo) / g;
        const double cell_b = (bhi - blo) / g;
        Best2D local{0.0, 0.0, kInf};
        for (int i = 0; i < g; ++i) {
            const double a = alo + cell_a * (i + 0.5);
            for (int j = 0; j < g; ++j) {
                const double b = blo + cell_b * (j + 0.5);
                const double v = dm_delay(mu_l1, mu_l2, mu_c1, mu_c2, p, a, b, lambda);
                if (v < local.value) local = {a, b, v};
            }
        }
        if (!std::isfinite(local.value)) {
            g *= 2;
            if (g > 4096) break;
            continue;
        }
        if (local.value < best.value) best = local;
        alo = std::max(0.0, local.alpha - 1.5 * cell_a);
        ahi = std::min(1.0, local.alpha + 1.5 * cell_a);
        blo = std::max(0.0, local.beta - 1.5 * cell_b);
        bhi = std::min(1.0, local.beta + 1.5 * cell_b);
        g = grid;
        ++round;
    }
    return best;
}

/// Delay at assignment p under the best capacity split, written out directly
/// from the square-root closed form in canonical parameters.
inline double dm_opt_delay(double mu0, double K, double f1, double f2, double p,
                           double lambda) {
    if (!(p >= 0.0 && p <= 1.0)) return kInf;
    const double pbar = 1.0 - p;
    const double f = p * f1 + pbar * f2;
    const double local_slack = mu0 - lambda * f;
    const double cloud_slack = K * mu0 - lambda * (1.0 - f);
    if (!(local_slack > 0.0) || !(cloud_slack > 0.0)) return kInf;
    const double sa = std::sqrt(p * f1) + std::sqrt(pbar * f2);
    const double sb = std::sqrt(p * (1.0 - f1)) + std::sqrt(pbar * (1.0 - f2));
    return sa * sa / local_slack + sb * sb / cloud_slack;
}

/// Dense-scan minimizer of the assignment objective over [0, 1].
inline Best1D best_assignment(double mu0, double K, double f1, double f2, double lambda,
                              int points = 100001) {
    return scan_min([&](double p) { return dm_opt_delay(mu0, K, f1, f2, p, lambda); }, 0.0,
                    1.0, points);
}

/// Deterministic generator of valid canonical parameter sets for randomized
/// tests: mu0 in [0.2, 5], K in [1.2, 25], 0 < f1 < f2 < 1 with a margin so
/// numeric brackets stay comfortably wide.
struct RandomSystem {
    double mu0, K, f1, f2;
};

inline RandomSystem random_system(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RandomSystem s;
    s.mu0 = 0.2 + 4.8 * u01(rng);
    s.K = 1.2 + 23.8 * u01(rng);
    const double a = 0.02 + 0.9 * u01(rng);
    const double b = 0.02 + 0.9 * u01(rng);
    s.f1 = std::min(a, b);
    s.f2 = std::max(a, b) + 0.05;
    if (s.f2 > 0.98) s.f2 = 0.98;
    if (s.f1 > s.f2 - 0.03) s.f1 = s.f2 - 0.03;
    return s;
}

}  // namespace oracle

namespace testsys {

/// The three built-in study systems in canonical form.
inline constexpr double kA[4] = {1.0, 4.0, 0.1, 0.3};
inline constexpr double kB[4] = {1.0, 4.0, 0.05, 0.15};
inline constexpr double kC[4] = {1.0, 4.0, 0.25, 0.4};

}  // namespace testsys
