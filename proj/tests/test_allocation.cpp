#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "dualmode/allocation.hpp"
#include "oracles.hpp"

using namespace dualmode;

namespace {

bool close(double a, double b, double rel = 1e-12, double abs = 1e-12) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

template <typename Fn>
errc thrown_code(Fn&& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("expected a dualmode::error");
    return errc::invalid_parameter;
}

const CanonicalParams kA{1.0, 4.0, 0.1, 0.3};
const RateParams kARates{10.0, 10.0 / 3.0, 40.0 / 9.0, 40.0 / 7.0};
const RateParams kBRates{20.0, 20.0 / 3.0, 80.0 / 19.0, 80.0 / 17.0};

/// Random feasible (system, lambda, p) triple with a stability margin so
/// finite-difference probes stay inside the feasible set.
struct Instance {
    CanonicalParams canon;
    RateParams rates;
    double lambda;
    double p;
};

Instance random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const oracle::RandomSystem s = oracle::random_system(rng);
    Instance inst;
    inst.canon = CanonicalParams{s.mu0, s.K, s.f1, s.f2};
    inst.rates = from_canonical(inst.canon);
    const double lmax = stability_region(inst.canon).lambda_max;
    inst.lambda = (0.1 + 0.8 * u01(rng)) * lmax;
    const AssignmentRange range = assignment_range(inst.canon, inst.lambda);
    const double margin = 0.05 * range.width();
    inst.p = range.lo + margin + (range.width() - 2.0 * margin) * u01(rng);
    return inst;
}

}  // namespace

TEST_CASE("explicit-point delay reproduces hand-computed values") {
    // System A, everything on SM1, lambda = 2: 1/(10-2) + 1/(40/9-2).
    CHECK(close(delay_dm({1.0, 1.0, 1.0}, 2.0, kARates), 0.125 + 9.0 / 22.0));
    // System B, everything on SM2, lambda = 4: 1/(20/3-4) + 1/(80/17-4).
    CHECK(close(delay_dm({0.0, 0.0, 0.0}, 4.0, kBRates), 0.375 + 17.0 / 12.0));
    // A genuinely split point agrees with the independent evaluation.
    const OperatingPoint op{0.625, 0.4, 0.65};
    CHECK(close(delay_dm(op, 4.0, kARates),
                oracle::dm_delay(10.0, 10.0 / 3.0, 40.0 / 9.0, 40.0 / 7.0, 0.625, 0.4, 0.65,
                                 4.0),
                1e-13));
    // Zero arrivals: pure service times of the active mode.
    CHECK(close(delay_dm({1.0, 1.0, 1.0}, 0.0, kARates), 1.0 / 10.0 + 9.0 / 40.0));
}

TEST_CASE("explicit-point delay rejects overloaded queues and infinite rates") {
    CHECK(thrown_code([] { (void)delay_dm({1.0, 1.0, 1.0}, 12.0, kARates); }) ==
          errc::unstable);
    CHECK(thrown_code([] { (void)delay_dm({1.0, 1.0, 1.0}, 10.0, kARates); }) ==
          errc::unstable);
    // An inactive mode is exempt: p = 1 tolerates zero SM2 capacity.
    CHECK(delay_dm({1.0, 1.0, 1.0}, 2.0, kARates) > 0.0);
    const RateParams ideal = from_canonical({1.0, 4.0, 0.0, 0.5}, RateMode::extended);
    CHECK(thrown_code([&] { (void)delay_dm({0.5, 0.5, 0.5}, 1.0, ideal); }) ==
          errc::infinite_rate);
}

TEST_CASE("optimal partition hands everything to an exclusive mode") {
    const OperatingPoint all_sm1 = optimal_partition(1.0, 2.0, kARates);
    CHECK(all_sm1.p == 1.0);
    CHECK(close(all_sm1.alpha, 1.0));
    CHECK(close(all_sm1.beta, 1.0));
    CHECK(close(delay_dm(all_sm1, 2.0, kARates), 0.125 + 9.0 / 22.0));

    const OperatingPoint all_sm2 = optimal_partition(0.0, 3.0, kARates);
    CHECK(all_sm2.p == 0.0);
    CHECK(close(all_sm2.alpha, 0.0));
    CHECK(close(all_sm2.beta, 0.0));
}

TEST_CASE("optimal partition matches the brute-force grid search") {
    // Frozen spot check: system A at (p, lambda) = (0.625, 4).
    const OperatingPoint opt = optimal_partition(0.625, 4.0, kARates);
    CHECK(std::abs(opt.alpha - 0.378115292177) <= 1e-6);
    CHECK(std::abs(opt.beta - 0.666472951761) <= 1e-6);
    CHECK(close(delay_dm(opt, 4.0, kARates), 3.41880933835, 1e-9));

    std::mt19937_64 rng(808017424);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_instance(rng);
        INFO("mu0=" << inst.canon.mu0 << " K=" << inst.canon.K << " f1=" << inst.canon.f1
                    << " f2=" << inst.canon.f2 << " lambda=" << inst.lambda
                    << " p=" << inst.p);
        const OperatingPoint op = optimal_partition(inst.p, inst.lambda, inst.rates);
        CHECK(op.alpha >= 0.0);
        CHECK(op.alpha <= 1.0);
        CHECK(op.beta >= 0.0);
        CHECK(op.beta <= 1.0);
        CHECK(is_stable(inst.rates, op, inst.lambda));
        const double via_point = delay_dm(op, inst.lambda, inst.rates);
        const oracle::Best2D ref =
            oracle::best_partition(inst.rates.mu_l1, inst.rates.mu_l2, inst.rates.mu_c1,
                                   inst.rates.mu_c2, inst.p, inst.lambda);
        // The closed form can be no worse than the brute-force best, and the
        // brute force can undercut the closed form only by its own noise.
        CHECK(via_point <= ref.value + 1e-5 + 1e-8 * ref.value);
        CHECK(ref.value <= via_point + 1e-5 + 1e-8 * via_point);
    }
}

TEST_CASE("optimal partition is a stationary point of the delay") {
    std::mt19937_64 rng(65537);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = random_instance(rng);
        if (inst.p <= 1e-6 || inst.p >= 1.0 - 1e-6) continue;
        const OperatingPoint op = optimal_partition(inst.p, inst.lambda, inst.rates);
        const double base = delay_dm(op, inst.lambda, inst.rates);

        // Central differences scaled by the feasible width: a true interior
        // minimum has a vanishing normalized slope.
        const double w_alpha = 1.0 - inst.lambda * inst.p / inst.rates.mu_l1 -
                               inst.lambda * (1.0 - inst.p) / inst.rates.mu_l2;
        const double w_beta = 1.0 - inst.lambda * inst.p / inst.rates.mu_c1 -
                              inst.lambda * (1.0 - inst.p) / inst.rates.mu_c2;
        const double ha = 1e-6 * w_alpha;
        const double hb = 1e-6 * w_beta;
        const double da = (delay_dm({op.p, op.alpha + ha, op.beta}, inst.lambda, inst.rates) -
                           delay_dm({op.p, op.alpha - ha, op.beta}, inst.lambda, inst.rates)) /
                          (2.0 * ha);
        const double db = (delay_dm({op.p, op.alpha, op.beta + hb}, inst.lambda, inst.rates) -
                           delay_dm({op.p, op.alpha, op.beta - hb}, inst.lambda, inst.rates)) /
                          (2.0 * hb);
        INFO("trial " << trial << " p=" << inst.p << " lambda=" << inst.lambda);
        CHECK(std::abs(da) * w_alpha / base < 1e-6);
        CHECK(std::abs(db) * w_beta / base < 1e-6);
    }
}

TEST_CASE("three delay routes agree: explicit point, closed form, decomposition") {
    std::mt19937_64 rng(1000003);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_instance(rng);
        const OperatingPoint op = optimal_partition(inst.p, inst.lambda, inst.rates);
        const double via_point = delay_dm(op, inst.lambda, inst.rates);
        const double via_closed = optimal_delay_dm(inst.p, inst.lambda, inst.rates);
        const DelayBreakdown split = delay_decomposition(inst.p, inst.lambda, inst.canon);
        INFO("trial " << trial);
        CHECK(close(via_point, via_closed, 1e-10));
        CHECK(close(via_closed, split.total, 1e-10));
        CHECK(close(split.total, split.tm_term + split.oh_term, 1e-12));
        CHECK(close(split.f_effective,
                    inst.p * inst.canon.f1 + (1.0 - inst.p) * inst.canon.f2, 1e-12));
    }
}

TEST_CASE("decomposition overhead is nonnegative and vanishes only at pure modes") {
    std::mt19937_64 rng(123456789);
    for (int trial = 0; trial < 200; ++trial) {
        const Instance inst = random_instance(rng);
        const DelayBreakdown split = delay_decomposition(inst.p, inst.lambda, inst.canon);
        CHECK(split.oh_term >= 0.0);
        if (inst.p > 1e-3 && inst.p < 1.0 - 1e-3) CHECK(split.oh_term > 0.0);
    }
    // Pure modes carry no mode-splitting overhead.
    CHECK(delay_decomposition(1.0, 2.0, kA).oh_term == 0.0);
    CHECK(delay_decomposition(0.0, 2.0, kA).oh_term == 0.0);
    CHECK(close(delay_decomposition(1.0, 2.0, kA).total, 0.125 + 9.0 / 22.0));
}

TEST_CASE("benchmark optimum lower-bounds the dual-mode delay") {
    std::mt19937_64 rng(987654321);
    for (int trial = 0; trial < 300; ++trial) {
        const Instance inst = random_instance(rng);
        const double gap = lower_bound_gap(inst.p, inst.lambda, inst.canon);
        INFO("trial " << trial << " p=" << inst.p << " lambda=" << inst.lambda);
        CHECK(gap >= -1e-10);
    }
}

TEST_CASE("an idealized system attains the lower bound exactly") {
    // f1 = 0 and f2 = 1: assignment p yields effective fraction 1 - p with
    // zero overhead, so p = 1 - f* reaches the benchmark optimum.
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double mu0 = 0.2 + 4.8 * u01(rng);
        const double K = 1.2 + 23.8 * u01(rng);
        const CanonicalParams ideal{mu0, K, 0.0, 1.0};
        const double lambda = (0.1 + 0.88 * u01(rng)) * ideal.mu_star();
        const TunableOptimum bench = optimal_fraction(lambda, ideal);
        const double p = 1.0 - bench.f_star;
        const AssignmentRange range = assignment_range(ideal, lambda);
        REQUIRE(range.contains(p));
        const DelayBreakdown split = delay_decomposition(p, lambda, ideal);
        CHECK(close(split.oh_term, 0.0, 0.0, 1e-12));
        CHECK(close(split.total, bench.t_star, 1e-10));
        CHECK(std::abs(lower_bound_gap(p, lambda, ideal)) <= 1e-10 * bench.t_star + 1e-12);
    }
}

TEST_CASE("system A touches the lower bound at its touch load") {
    // At lambda = 2/0.7 the benchmark optimum sits exactly at f1, so pure SM1
    // assignment (zero overhead, f(1) = f1) closes the gap.
    const double touch = 2.0 / 0.7;
    CHECK(close(optimal_fraction(touch, kA).f_star, 0.1, 1e-12));
    CHECK(std::abs(lower_bound_gap(1.0, touch, kA)) <= 1e-9);
    // Marginally away from the touch load the gap reopens.
    CHECK(lower_bound_gap(1.0, touch + 0.05, kA) > 1e-6);
    CHECK(lower_bound_gap(1.0, touch - 0.05, kA) > 1e-6);
}

TEST_CASE("relabeling the servers relabels the delay arguments") {
    // Swapping local and cloud servers turns (p, alpha, beta) into
    // (1-p, 1-beta, 1-alpha) and must leave the delay unchanged. The swapped
    // aggregate is fed to the unvalidated evaluator directly since its
    // capacity ratio is below one.
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance inst = random_instance(rng);
        const OperatingPoint op = optimal_partition(inst.p, inst.lambda, inst.rates);
        const RateParams swapped{inst.rates.mu_c2, inst.rates.mu_c1, inst.rates.mu_l2,
                                 inst.rates.mu_l1};
        const OperatingPoint mirrored{1.0 - op.p, 1.0 - op.beta, 1.0 - op.alpha};
        CHECK(close(delay_dm(op, inst.lambda, inst.rates),
                    delay_dm(mirrored, inst.lambda, swapped), 1e-12));
    }
}

TEST_CASE("infeasible assignments are rejected, boundary values snapped") {
    // System A at lambda = 4: feasible assignments are (0.25, 1].
    CHECK(thrown_code([] { (void)optimal_delay_dm(0.1, 4.0, kARates); }) ==
          errc::infeasible_assignment);
    // The open lower endpoint itself is rejected; ask the range for its exact
    // floating-point location rather than assuming the decimal 0.25.
    const AssignmentRange r4 = assignment_range(kARates, 4.0);
    REQUIRE(r4.lo_open);
    CHECK(thrown_code([&] { (void)optimal_delay_dm(r4.lo, 4.0, kARates); }) ==
          errc::infeasible_assignment);
    CHECK(thrown_code([] { (void)optimal_partition(0.2, 4.0, kARates); }) ==
          errc::infeasible_assignment);
    CHECK(thrown_code([] { (void)delay_decomposition(0.2, 4.0, kA); }) ==
          errc::infeasible_assignment);
    // The closed upper endpoint tolerates rounding-level overshoot.
    CHECK(std::isfinite(optimal_delay_dm(1.0 + 1e-13, 4.0, kARates)));
    CHECK(optimal_partition(1.0 + 1e-13, 4.0, kARates).p == 1.0);
    // Above capacity every assignment is infeasible.
    CHECK(thrown_code([] { (void)optimal_delay_dm(0.5, 5.0, kARates); }) ==
          errc::infeasible_assignment);
}
