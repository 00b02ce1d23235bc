#pragma once

#include <cstdint>
#include <string>

namespace ril {

struct EstimatorResult {
    double estimate = 0.0;
    double std_error = 0.0;
    long long n = 0;
    double bias_bound = 0.0;
    std::uint64_t seed = 0;
    bool log_scale = false;
    double ci_low = 0.0, ci_high = 0.0;  // 95% interval on the reported scale
    std::string note;
};

// Sufficient statistics for a sample mean; merging is associative.
struct MeanAccumulator {
    long long n = 0;
    long double sum = 0.0L, sumsq = 0.0L;
    void add(double x) {
        ++n;
        sum += x;
        sumsq += static_cast<long double>(x) * x;
    }
    void merge(const MeanAccumulator& o) {
        n += o.n;
        sum += o.sum;
        sumsq += o.sumsq;
    }
    double mean() const;
    double variance() const;  // unbiased
    double std_error() const;
};

struct Interval {
    double low, high;
};

Interval wilson_interval(long long successes, long long n, double z = 1.959963984540054);

// Frequency of a 0/1 outcome with Wilson interval; a zero count gets the one-sided note.
EstimatorResult frequency_result(long long successes, long long n, std::uint64_t seed, double bias_bound = 0.0);

// Mean with normal interval.
EstimatorResult mean_result(const MeanAccumulator& acc, std::uint64_t seed, double bias_bound = 0.0);

bool intervals_overlap(const EstimatorResult& a, const EstimatorResult& b);

}  // namespace ril
