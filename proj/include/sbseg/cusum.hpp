#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbseg {

/// Raised when a segment has zero mean (all values zero), which makes the
/// normalized contrast undefined.
class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed time interval [s, e] with at least two points.
struct Segment {
    int s = 0;
    int e = 0;

    int n() const { return e - s + 1; }
    bool operator==(const Segment&) const = default;
};

inline void validate_segment(const Segment& seg) {
    if (seg.s < 0 || seg.s >= seg.e)
        throw std::invalid_argument("invalid segment [" + std::to_string(seg.s) + ", " +
                                    std::to_string(seg.e) + "]");
}

/// Split weights for a segment of length n:
///   w(m) = sqrt((n - m) / (n * m)) for the left block of size m.
/// The right-block weight at split m is w(n - m). Shared across the many
/// per-sequence curves evaluated on one segment.
class WeightTable {
public:
    explicit WeightTable(int n);
    int n() const { return n_; }
    double left(int m) const { return w_[m]; }        // m = b - s + 1
    double right(int m) const { return w_[n_ - m]; }

private:
    int n_;
    std::vector<double> w_;
};

/// Normalized CUSUM contrast over the admissible splits b in [s, e-1]:
///   values[b] = |w(m) * sum(y[s..b]) - w(n-m) * sum(y[b+1..e])| / mean(y[s..e])
/// with m = b - s + 1. Zero for flat input; scale-invariant in y.
struct CusumCurve {
    Segment segment;
    std::vector<double> values;  // values[b - segment.s], size n - 1
    double mean_level = 0.0;

    double at(int b) const { return values[b - segment.s]; }
};

/// Compute the full curve in O(n) via compensated prefix sums.
/// y spans exactly the segment: y[0] is the value at time segment.s.
/// Throws DegenerateInput when all values are zero and std::domain_error on
/// negative input.
CusumCurve cusum_curve(std::span<const double> y, Segment segment);
CusumCurve cusum_curve(std::span<const double> y, Segment segment, const WeightTable& weights);

/// Single-split evaluation used by the post-processing re-tests.
double cusum_value_at(std::span<const double> y, Segment segment, int b);

/// Unnormalized contrast (no division by the segment mean); exposed for tests.
double cusum_contrast_at(std::span<const double> y, Segment segment, int b);

/// Maximum of the normalized curve; avoids materializing it. Returns 0 for a
/// flat segment. Same error conditions as cusum_curve.
double cusum_max(std::span<const double> y, Segment segment, const WeightTable& weights);

enum class AggRule { thr, avg, max };

std::string to_string(AggRule rule);
AggRule agg_rule_from_string(const std::string& name);

/// Panel aggregation of per-sequence curves over a shared segment.
/// pass[b] encodes the rule-specific detection test at b:
///   thr: some sequence exceeds its own threshold (values[b] > 0),
///   avg: the average exceeds the scaled threshold
///        d^-1 * sum_k 1(max_t curve_k > pi_k) * pi_k (no active sequence
///        means no detection),
///   max: the argmax sequence at b exceeds its own threshold.
struct AggregatedCurve {
    Segment segment;
    AggRule rule = AggRule::thr;
    std::vector<double> values;
    std::vector<int> counts;       // thr only: contributors per split
    std::vector<std::uint8_t> pass;
    double detect_threshold = 0.0; // avg only: the scaled threshold

    double at(int b) const { return values[b - segment.s]; }
    bool pass_at(int b) const { return pass[b - segment.s] != 0; }
};

/// Aggregate curves (all on one segment) with per-sequence thresholds.
/// Summation over sequences runs in ascending index order so results do not
/// depend on scheduling.
AggregatedCurve aggregate(const std::vector<CusumCurve>& curves, std::span<const double> thresholds,
                          AggRule rule);

} // namespace sbseg
