#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbseg/cusum.hpp"
#include "sbseg/panel.hpp"

namespace sbseg {

/// Candidate admissibility: a fixed balance bound
/// max((b-s+1)/n, (e-b)/n) <= c_star, or a minimum distance of delta from
/// every previously detected location.
enum class BalanceMode { fixed, min_distance };

struct SbsConfig {
    std::vector<double> thresholds; // per sequence, positive
    int delta = 1;
    BalanceMode balance = BalanceMode::min_distance;
    double c_star = 0.7;   // fixed mode only, in [1/2, 1)
    int min_segment = 0;   // 0: auto = 2 * delta + 2
    AggRule rule = AggRule::thr;

    int effective_min_segment() const {
        const int floor_len = 2 * delta + 2;
        return min_segment > floor_len ? min_segment : floor_len;
    }
    void validate(int d) const;
};

struct ChangePoint {
    int location = 0;
    int level = 0;          // recursion depth at detection, root = 1
    int scale = 0;          // wavelet scale when detected through the scale loop, else 0
    Segment segment;        // segment searched when detected
    double value = 0.0;     // aggregated statistic at the split
    std::vector<int> passing; // sequences whose curve exceeded their threshold at the split
    std::vector<std::pair<int, int>> cluster_members; // (location, scale) merged into this point
};

struct ChangePointSet {
    std::vector<ChangePoint> points; // sorted by location
    std::string diagnostic;          // non-empty when the input was rejected, e.g. too short

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
    std::vector<int> locations() const;
};

/// The recursive segmentation: per-sequence CUSUM curves, aggregation, the
/// vetted split, then recursion into [s, b] and [b+1, e]. Depth-first, left
/// child first; min-distance admissibility sees every previously recorded
/// location in that traversal order.
ChangePointSet sbs_segment(const PanelSource& panel, const SbsConfig& config);

/// The split choice for one aggregated curve: the largest admissible value
/// whose whole [b-delta, b+delta] window (clipped to the segment) passes the
/// rule's detection test. Ties in value break toward the smaller split.
/// Rejected candidates stay out, their neighborhoods remain eligible.
std::optional<int> find_candidate(const AggregatedCurve& agg, const std::vector<int>& existing,
                                  const SbsConfig& config);

/// Re-test every estimate on its neighbor-triple segment and iteratively drop
/// the weakest failure (smallest margin over its best threshold), recomputing
/// affected neighbors, until all survivors pass for at least one sequence.
ChangePointSet post_process_within(const PanelSource& panel, const ChangePointSet& cps,
                                   const SbsConfig& config);

} // namespace sbseg
