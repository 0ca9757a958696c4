#include "sbseg/cusum.hpp"

#include <algorithm>
#include <cmath>

namespace sbseg {
namespace {

// Kahan-compensated accumulator; prefix sums of long squared-data panels
// lose digits otherwise.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void check_input(std::span<const double> y, const Segment& seg) {
    validate_segment(seg);
    if (static_cast<int>(y.size()) != seg.n())
        throw std::invalid_argument("cusum: expected " + std::to_string(seg.n()) + " values, got " +
                                    std::to_string(y.size()));
}

double checked_total(std::span<const double> y) {
    Kahan acc;
    for (double v : y) {
        if (v < 0.0) throw std::domain_error("cusum: negative input value");
        acc.add(v);
    }
    return acc.sum;
}

} // namespace

WeightTable::WeightTable(int n) : n_(n), w_(static_cast<std::size_t>(n) + 1, 0.0) {
    if (n < 2) throw std::invalid_argument("weight table needs n >= 2");
    const double dn = static_cast<double>(n);
    for (int m = 1; m < n; ++m) w_[m] = std::sqrt((dn - m) / (dn * m));
}

CusumCurve cusum_curve(std::span<const double> y, Segment segment) {
    check_input(y, segment);
    return cusum_curve(y, segment, WeightTable(segment.n()));
}

CusumCurve cusum_curve(std::span<const double> y, Segment segment, const WeightTable& weights) {
    check_input(y, segment);
    const int n = segment.n();
    if (weights.n() != n) throw std::invalid_argument("cusum: weight table length mismatch");

    const double total = checked_total(y);
    if (total <= 0.0) throw DegenerateInput("cusum: segment sums to zero");
    const double mean = total / n;

    CusumCurve curve;
    curve.segment = segment;
    curve.mean_level = mean;
    curve.values.resize(static_cast<std::size_t>(n) - 1);

    Kahan left;
    for (int m = 1; m < n; ++m) {
        left.add(y[m - 1]);
        const double right = total - left.sum;
        curve.values[m - 1] = std::abs(weights.left(m) * left.sum - weights.right(m) * right) / mean;
    }
    return curve;
}

double cusum_contrast_at(std::span<const double> y, Segment segment, int b) {
    check_input(y, segment);
    if (b < segment.s || b >= segment.e) throw std::invalid_argument("cusum: split outside segment");
    const int n = segment.n();
    const int m = b - segment.s + 1;
    Kahan left;
    for (int t = 0; t < m; ++t) {
        if (y[t] < 0.0) throw std::domain_error("cusum: negative input value");
        left.add(y[t]);
    }
    Kahan right;
    for (int t = m; t < n; ++t) {
        if (y[t] < 0.0) throw std::domain_error("cusum: negative input value");
        right.add(y[t]);
    }
    const double dn = static_cast<double>(n);
    const double wl = std::sqrt((dn - m) / (dn * m));
    const double wr = std::sqrt(m / (dn * (dn - m)));
    return std::abs(wl * left.sum - wr * right.sum);
}

double cusum_value_at(std::span<const double> y, Segment segment, int b) {
    const double contrast = cusum_contrast_at(y, segment, b);
    const double total = checked_total(y);
    if (total <= 0.0) throw DegenerateInput("cusum: segment sums to zero");
    return contrast / (total / segment.n());
}

double cusum_max(std::span<const double> y, Segment segment, const WeightTable& weights) {
    check_input(y, segment);
    const int n = segment.n();
    if (weights.n() != n) throw std::invalid_argument("cusum: weight table length mismatch");
    const double total = checked_total(y);
    if (total <= 0.0) throw DegenerateInput("cusum: segment sums to zero");
    const double mean = total / n;

    double best = 0.0;
    Kahan left;
    for (int m = 1; m < n; ++m) {
        left.add(y[m - 1]);
        const double v = std::abs(weights.left(m) * left.sum - weights.right(m) * (total - left.sum));
        best = std::max(best, v);
    }
    return best / mean;
}

std::string to_string(AggRule rule) {
    switch (rule) {
        case AggRule::thr: return "thr";
        case AggRule::avg: return "avg";
        case AggRule::max: return "max";
    }
    return "thr";
}

AggRule agg_rule_from_string(const std::string& name) {
    if (name == "thr") return AggRule::thr;
    if (name == "avg") return AggRule::avg;
    if (name == "max") return AggRule::max;
    throw std::invalid_argument("unknown aggregation rule: " + name);
}

AggregatedCurve aggregate(const std::vector<CusumCurve>& curves, std::span<const double> thresholds,
                          AggRule rule) {
    if (curves.empty()) throw std::invalid_argument("aggregate: empty curve list");
    if (thresholds.size() != curves.size())
        throw std::invalid_argument("aggregate: thresholds length != number of curves");
    const Segment seg = curves.front().segment;
    for (const auto& c : curves)
        if (!(c.segment == seg)) throw std::invalid_argument("aggregate: mismatched segments");

    const std::size_t len = curves.front().values.size();
    const std::size_t d = curves.size();

    AggregatedCurve out;
    out.segment = seg;
    out.rule = rule;
    out.values.assign(len, 0.0);
    out.pass.assign(len, 0);

    switch (rule) {
        case AggRule::thr: {
            out.counts.assign(len, 0);
            for (std::size_t k = 0; k < d; ++k) {
                const double pi = thresholds[k];
                const auto& v = curves[k].values;
                for (std::size_t b = 0; b < len; ++b) {
                    if (v[b] > pi) {
                        out.values[b] += v[b];
                        ++out.counts[b];
                    }
                }
            }
            for (std::size_t b = 0; b < len; ++b) out.pass[b] = out.counts[b] > 0;
            break;
        }
        case AggRule::avg: {
            double scaled = 0.0;
            int active = 0;
            for (std::size_t k = 0; k < d; ++k) {
                const auto& v = curves[k].values;
                for (std::size_t b = 0; b < len; ++b) out.values[b] += v[b];
                const double peak = *std::max_element(v.begin(), v.end());
                if (peak > thresholds[k]) {
                    scaled += thresholds[k];
                    ++active;
                }
            }
            const double inv_d = 1.0 / static_cast<double>(d);
            for (auto& v : out.values) v *= inv_d;
            out.detect_threshold = scaled * inv_d;
            if (active > 0) {
                for (std::size_t b = 0; b < len; ++b)
                    out.pass[b] = out.values[b] > out.detect_threshold;
            }
            break;
        }
        case AggRule::max: {
            std::vector<std::size_t> argmax(len, 0);
            for (std::size_t k = 0; k < d; ++k) {
                const auto& v = curves[k].values;
                for (std::size_t b = 0; b < len; ++b) {
                    if (v[b] > out.values[b]) {
                        out.values[b] = v[b];
                        argmax[b] = k;
                    }
                }
            }
            for (std::size_t b = 0; b < len; ++b)
                out.pass[b] = out.values[b] > thresholds[argmax[b]];
            break;
        }
    }
    return out;
}

} // namespace sbseg
