#include "ril/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ril {

double MeanAccumulator::mean() const {
    if (n == 0) throw std::logic_error("mean of an empty sample");
    return static_cast<double>(sum / n);
}

double MeanAccumulator::variance() const {
    if (n < 2) return 0.0;
    const long double m = sum / n;
    return static_cast<double>(std::max(0.0L, (sumsq - n * m * m) / (n - 1)));
}

double MeanAccumulator::std_error() const { return n < 2 ? 0.0 : std::sqrt(variance() / n); }

Interval wilson_interval(long long k, long long n, double z) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
    const double p = static_cast<double>(k) / n;
    const double z2 = z * z;
    const double den = 1.0 + z2 / n;
    const double mid = (p + z2 / (2.0 * n)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
    return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

EstimatorResult frequency_result(long long k, long long n, std::uint64_t seed, double bias_bound) {
    EstimatorResult r;
    r.n = n;
    r.seed = seed;
    r.bias_bound = bias_bound;
    r.estimate = static_cast<double>(k) / n;
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / n);
    const Interval w = wilson_interval(k, n);
    r.ci_low = w.low;
    r.ci_high = w.high;
    if (k == 0) r.note = "zero successes; one-sided upper bound " + std::to_string(w.high);
    return r;
}

EstimatorResult mean_result(const MeanAccumulator& acc, std::uint64_t seed, double bias_bound) {
    EstimatorResult r;
    r.n = acc.n;
    r.seed = seed;
    r.bias_bound = bias_bound;
    r.estimate = acc.mean();
    r.std_error = acc.std_error();
    r.ci_low = r.estimate - 1.959963984540054 * r.std_error;
    r.ci_high = r.estimate + 1.959963984540054 * r.std_error;
    return r;
}

bool intervals_overlap(const EstimatorResult& a, const EstimatorResult& b) {
    return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
}

}  // namespace ril
