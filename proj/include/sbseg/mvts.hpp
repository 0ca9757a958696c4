#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbseg/sbs.hpp"
#include "sbseg/series.hpp"
#include "sbseg/wavelet.hpp"

namespace sbseg {

/// Null-simulation threshold calibration settings.
struct CalibrationConfig {
    double gamma = 0.499;   // threshold rate exponent
    double quantile = 0.99; // level for the null-statistic quantile
    int R = 100;            // null replications
    double clamp = 0.99;    // AR coefficient bound
    std::uint64_t seed = 0;

    void validate() const;
};

struct MvtsConfig {
    double alpha = 2.0; // scale depth: coarsest scale is -floor(alpha * log log T)
    int delta = 0;      // 0: auto floor(sqrt(T) / 2)
    int lambda = 0;     // 0: auto floor(sqrt(T) / 2)
    AggRule rule = AggRule::thr;
    BalanceMode balance = BalanceMode::min_distance;
    double c_star = 0.7;
    CalibrationConfig calibration;
    int threads = 1;

    int effective_delta(int T) const;
    int effective_lambda(int T) const;
};

/// Coarsest scale examined at length T: -floor(alpha * log log T), at most -1.
int finest_scale_limit(double alpha, int T);

/// Lag-one sample autocorrelation, clamped into (-clamp, clamp).
/// Throws on fewer than 3 points or zero variance.
double fit_ar1(std::span<const double> x, double clamp = 0.99);

/// Per-(sequence, scale) thresholds. Sequences follow the periodogram panel
/// order: diagonals (j, j) first, then pairs j < l.
struct ThresholdEntry {
    int j = 0; // 1-based in serialized form
    int l = 0;
    int scale = -1;
    double kappa = 0.0;
    double pi = 0.0;
};

struct ThresholdTable {
    std::vector<ThresholdEntry> entries;

    double pi_for(int j, int l, int scale) const;
    /// Thresholds for one scale in panel sequence order.
    std::vector<double> scale_thresholds(int p, int scale) const;

    void write_csv(std::ostream& out) const;
    static ThresholdTable read_csv(std::istream& in, const std::string& name = "<stream>");
};

/// Fit an AR(1) proxy to each panel sequence, simulate R stationary unit-
/// innovation null paths with the fitted coefficient, take the maximum
/// normalized periodogram CUSUM per scale, and keep the configured quantile:
/// pi = kappa * T^gamma with kappa the quantile of T^-gamma * J.
/// Cross pairs fit the proxy to x_j - sign(cor(w_j, w_l)) * x_l with the
/// whole-series coefficient correlation sign at the scale being calibrated.
ThresholdTable calibrate_thresholds(const MultivariateSeries& x, std::span<const int> scales,
                                    const CalibrationConfig& cfg, int threads = 1);

struct MvtsResult {
    ChangePointSet merged;
    std::vector<std::pair<int, ChangePointSet>> per_scale; // finest first
    ThresholdTable thresholds;
    std::vector<int> scales;
    int d = 0;
};

/// The full pipeline: per scale from -1 down to the limit, build the
/// periodogram panel, segment with calibrated thresholds, prune within the
/// scale, then merge across scales.
MvtsResult sbs_mvts(const MultivariateSeries& x, const MvtsConfig& cfg,
                    const ThresholdTable* precalibrated = nullptr);

/// Pool per-scale estimates (finest first), grow location-sorted clusters
/// greedily while the diameter stays within lambda, and keep each cluster's
/// finest-scale representative (ties: larger statistic, then smaller
/// location).
ChangePointSet across_scale_merge(const std::vector<std::pair<int, ChangePointSet>>& per_scale,
                                  int lambda);

} // namespace sbseg
