#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace mrim {

// Streaming mean/variance (Welford); merge() uses the parallel combination
// rule so chunked accumulation stays exact up to floating-point ordering.
struct Welford {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }

  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : std::numeric_limits<double>::infinity();
  }

  // Standard error of the mean; +inf sentinel when undefined (count < 2).
  double stderr_mean() const {
    if (count < 2) return std::numeric_limits<double>::infinity();
    double v = variance();
    return v <= 0.0 ? 0.0 : std::sqrt(v / static_cast<double>(count));
  }
};

// Point estimate with a normal-approximation 95% confidence interval.
struct SpreadEstimate {
  double mean = 0.0;
  double stderr_mean = std::numeric_limits<double>::infinity();
  std::uint64_t r = 0;
  double ci_lo = -std::numeric_limits<double>::infinity();
  double ci_hi = std::numeric_limits<double>::infinity();

  bool ci_defined() const { return std::isfinite(stderr_mean); }

  static SpreadEstimate from(const Welford& w) {
    SpreadEstimate e;
    e.mean = w.mean;
    e.r = w.count;
    e.stderr_mean = w.stderr_mean();
    if (std::isfinite(e.stderr_mean)) {
      e.ci_lo = e.mean - 1.96 * e.stderr_mean;
      e.ci_hi = e.mean + 1.96 * e.stderr_mean;
    }
    return e;
  }
};

// Compensated (Kahan) accumulator for long weighted sums.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

}  // namespace mrim
