#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dualmode/error.hpp"

namespace dualmode {

/// Acklam's rational approximation of the standard normal inverse CDF.
/// Absolute error below 1.2e-9 over (0, 1), ample for CI half-widths.
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        fail(errc::invalid_parameter, "inverse_normal_cdf requires p in (0, 1)");
    }
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Two-sided normal quantile for a confidence level, e.g. 0.95 -> 1.96.
inline double normal_quantile(double confidence) {
    return inverse_normal_cdf(0.5 * (1.0 + confidence));
}

/// Non-overlapping batch-means estimator: the grand mean plus a CI
/// half-width from the sample variance of the per-batch means.
class BatchMeans {
  public:
    BatchMeans(std::uint64_t batch_size, int batches)
        : batch_size_(batch_size), batches_(batches) {
        sums_.reserve(static_cast<std::size_t>(batches));
    }

    void add(double x) {
        current_sum_ += x;
        if (++current_count_ == batch_size_) {
            sums_.push_back(current_sum_);
            current_sum_ = 0.0;
            current_count_ = 0;
        }
    }

    bool complete() const { return sums_.size() == static_cast<std::size_t>(batches_); }

    std::uint64_t capacity() const { return batch_size_ * static_cast<std::uint64_t>(batches_); }

    double mean() const {
        double total = 0.0;
        for (double s : sums_) total += s;
        return total / (static_cast<double>(batch_size_) * static_cast<double>(sums_.size()));
    }

    double half_width(double confidence) const {
        const std::size_t n = sums_.size();
        if (n < 2) return 0.0;
        const double grand = mean();
        double ss = 0.0;
        for (double s : sums_) {
            const double diff = s / static_cast<double>(batch_size_) - grand;
            ss += diff * diff;
        }
        const double batch_var = ss / static_cast<double>(n - 1);
        return normal_quantile(confidence) * std::sqrt(batch_var / static_cast<double>(n));
    }

  private:
    std::uint64_t batch_size_;
    int batches_;
    std::vector<double> sums_;
    double current_sum_ = 0.0;
    std::uint64_t current_count_ = 0;
};

}  // namespace dualmode
