#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tdmlmc {

/// Streaming central moments up to fourth order.
///
/// Updates and merges use the one-pass formulas of Pébay, so blocks
/// accumulated on different threads combine associatively.
class Moments {
public:
    void add(double x);
    void merge(const Moments& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double sum() const { return mean_ * static_cast<double>(n_); }
    // Sum of squares about zero, sum_k x_k^2.
    double sum_sq() const { return m2_ + static_cast<double>(n_) * mean_ * mean_; }
    // Unbiased (n-1) sample variance; 0 for fewer than two samples.
    double variance() const;
    double population_variance() const;
    double fourth_central() const;

    double se_mean() const;
    // Standard error of the sample variance, sqrt((m4 - s^4) / n).
    double se_variance() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Pool-adjacent-violators projection onto nonincreasing sequences
// (unweighted least squares).
std::vector<double> isotonic_nonincreasing(std::span<const double> values);

// Runs body(k) for k in [0, count) on up to `threads` worker threads.
// Results must be written to per-index slots; scheduling order is unspecified.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

} // namespace tdmlmc
