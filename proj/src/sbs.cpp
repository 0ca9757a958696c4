#include "sbseg/sbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sbseg {

void SbsConfig::validate(int d) const {
    if (static_cast<int>(thresholds.size()) != d)
        throw std::invalid_argument("SbsConfig: thresholds size != panel dimension");
    for (double pi : thresholds)
        if (!(pi > 0.0)) throw std::invalid_argument("SbsConfig: thresholds must be positive");
    if (delta < 1) throw std::invalid_argument("SbsConfig: delta must be >= 1");
    if (balance == BalanceMode::fixed && !(c_star >= 0.5 && c_star < 1.0))
        throw std::invalid_argument("SbsConfig: c_star must lie in [1/2, 1)");
    if (min_segment != 0 && min_segment < 2 * delta + 2)
        throw std::invalid_argument("SbsConfig: min_segment must be >= 2 * delta + 2");
}

std::vector<int> ChangePointSet::locations() const {
    std::vector<int> out;
    out.reserve(points.size());
    for (const auto& cp : points) out.push_back(cp.location);
    return out;
}

namespace {

bool admissible(int b, const Segment& seg, const std::vector<int>& existing,
                const SbsConfig& config) {
    if (config.balance == BalanceMode::fixed) {
        const double n = seg.n();
        const double left = (b - seg.s + 1) / n;
        const double right = (seg.e - b) / n;
        return std::max(left, right) <= config.c_star;
    }
    for (int eta : existing)
        if (std::abs(b - eta) < config.delta) return false;
    return true;
}

struct Recursion {
    const PanelSource& panel;
    const SbsConfig& config;
    std::vector<ChangePoint> found;   // in traversal order
    std::vector<int> found_locations;
    std::vector<double> buf;

    Recursion(const PanelSource& p, const SbsConfig& c) : panel(p), config(c) {}

    std::vector<CusumCurve> segment_curves(Segment seg, bool root) {
        const int d = panel.count();
        std::vector<CusumCurve> curves(d);
        const WeightTable weights(seg.n());
        buf.resize(seg.n());
        for (int k = 0; k < d; ++k) {
            panel.values(k, seg, buf);
            try {
                curves[k] = cusum_curve(buf, seg, weights);
            } catch (const DegenerateInput&) {
                if (root)
                    throw DegenerateInput("sequence " + panel.label(k) +
                                          " is degenerate on the root segment");
                // A locally flat sequence carries no evidence here.
                curves[k].segment = seg;
                curves[k].mean_level = 0.0;
                curves[k].values.assign(static_cast<std::size_t>(seg.n()) - 1, 0.0);
            }
        }
        return curves;
    }

    void run(Segment seg, int level, bool root) {
        if (seg.n() < config.effective_min_segment()) return;
        auto curves = segment_curves(seg, root);
        auto agg = aggregate(curves, config.thresholds, config.rule);
        auto b = find_candidate(agg, found_locations, config);
        if (!b) return;

        ChangePoint cp;
        cp.location = *b;
        cp.level = level;
        cp.segment = seg;
        cp.value = agg.at(*b);
        for (int k = 0; k < panel.count(); ++k)
            if (curves[k].at(*b) > config.thresholds[k]) cp.passing.push_back(k);
        found.push_back(std::move(cp));
        found_locations.push_back(*b);

        run(Segment{seg.s, *b}, level + 1, false);
        run(Segment{*b + 1, seg.e}, level + 1, false);
    }
};

} // namespace

std::optional<int> find_candidate(const AggregatedCurve& agg, const std::vector<int>& existing,
                                  const SbsConfig& config) {
    if (agg.values.empty()) throw std::invalid_argument("find_candidate: empty curve");
    const Segment seg = agg.segment;
    const int len = static_cast<int>(agg.values.size()); // splits b in [s, s + len - 1]

    // Prefix counts of failing positions for O(1) window checks.
    std::vector<int> fail_prefix(len + 1, 0);
    for (int i = 0; i < len; ++i) fail_prefix[i + 1] = fail_prefix[i] + (agg.pass[i] ? 0 : 1);
    if (fail_prefix[len] == len) return std::nullopt;

    std::vector<int> order;
    order.reserve(len);
    for (int i = 0; i < len; ++i)
        if (agg.pass[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (agg.values[a] != agg.values[b]) return agg.values[a] > agg.values[b];
        return a < b;
    });

    for (int i : order) {
        const int b = seg.s + i;
        if (!admissible(b, seg, existing, config)) continue;
        const int lo = std::max(0, i - config.delta);
        const int hi = std::min(len - 1, i + config.delta);
        if (fail_prefix[hi + 1] - fail_prefix[lo] == 0) return b;
    }
    return std::nullopt;
}

ChangePointSet sbs_segment(const PanelSource& panel, const SbsConfig& config) {
    config.validate(panel.count());
    ChangePointSet out;
    const Segment root = panel.full_segment();
    if (root.n() < config.effective_min_segment()) {
        out.diagnostic = "panel length " + std::to_string(root.n()) +
                         " below minimum searchable segment " +
                         std::to_string(config.effective_min_segment());
        return out;
    }
    Recursion rec(panel, config);
    rec.run(root, 1, true);
    out.points = std::move(rec.found);
    std::sort(out.points.begin(), out.points.end(),
              [](const ChangePoint& a, const ChangePoint& b) { return a.location < b.location; });
    return out;
}

namespace {

// Statistic of estimate q against its neighbor-triple segment; the margin is
// max_k (value_k - pi_k), positive iff some sequence passes.
double triple_margin(const PanelSource& panel, const SbsConfig& config, int eta_prev, int eta,
                     int eta_next, std::vector<double>& buf) {
    const Segment seg{eta_prev + 1, eta_next};
    double margin = -std::numeric_limits<double>::infinity();
    buf.resize(seg.n());
    for (int k = 0; k < panel.count(); ++k) {
        panel.values(k, seg, buf);
        double value = 0.0;
        try {
            value = cusum_value_at(buf, seg, eta);
        } catch (const DegenerateInput&) {
            value = 0.0;
        }
        margin = std::max(margin, value - config.thresholds[k]);
    }
    return margin;
}

} // namespace

ChangePointSet post_process_within(const PanelSource& panel, const ChangePointSet& cps,
                                   const SbsConfig& config) {
    config.validate(panel.count());
    if (cps.empty()) return cps;

    std::vector<ChangePoint> pts = cps.points; // sorted by location
    const int lo = panel.t_begin();
    const int hi = panel.t_end();
    std::vector<double> buf;

    std::vector<double> margin(pts.size());
    auto recompute = [&](std::size_t q) {
        const int prev = q == 0 ? lo : pts[q - 1].location;
        const int next = q + 1 == pts.size() ? hi : pts[q + 1].location;
        margin[q] = triple_margin(panel, config, prev, pts[q].location, next, buf);
    };
    for (std::size_t q = 0; q < pts.size(); ++q) recompute(q);

    for (;;) {
        std::ptrdiff_t worst = -1;
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (margin[q] > 0.0) continue;
            if (worst < 0 || margin[q] < margin[worst]) worst = static_cast<std::ptrdiff_t>(q);
        }
        if (worst < 0) break;
        pts.erase(pts.begin() + worst);
        margin.erase(margin.begin() + worst);
        if (pts.empty()) break;
        // Only the neighbors' triples changed.
        if (worst > 0) recompute(static_cast<std::size_t>(worst) - 1);
        if (static_cast<std::size_t>(worst) < pts.size()) recompute(static_cast<std::size_t>(worst));
    }

    ChangePointSet out;
    out.points = std::move(pts);
    out.diagnostic = cps.diagnostic;
    return out;
}

} // namespace sbseg
