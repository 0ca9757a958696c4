#include "sbseg/mvts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sbseg/parallel.hpp"
#include "sbseg/rng.hpp"

namespace sbseg {

void CalibrationConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("calibration: gamma must lie in (0, 0.5)");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("calibration: quantile must lie in (0, 1]");
    if (R < 1) throw std::invalid_argument("calibration: R must be >= 1");
    if (!(clamp > 0.0 && clamp < 1.0)) throw std::invalid_argument("calibration: clamp must lie in (0, 1)");
}

int MvtsConfig::effective_delta(int T) const {
    return delta > 0 ? delta : static_cast<int>(std::floor(std::sqrt(static_cast<double>(T)) / 2.0));
}

int MvtsConfig::effective_lambda(int T) const {
    return lambda > 0 ? lambda : static_cast<int>(std::floor(std::sqrt(static_cast<double>(T)) / 2.0));
}

int finest_scale_limit(double alpha, int T) {
    if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
    if (T < 3) return -1;
    const int depth = static_cast<int>(std::floor(alpha * std::log(std::log(static_cast<double>(T)))));
    return -std::max(1, depth);
}

double fit_ar1(std::span<const double> x, double clamp) {
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("fit_ar1: need at least 3 points");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double d = x[t] - mean;
        den += d * d;
        if (t > 0) num += d * (x[t - 1] - mean);
    }
    if (den <= 0.0) throw std::invalid_argument("fit_ar1: zero variance");
    return std::clamp(num / den, -clamp, clamp);
}

double ThresholdTable::pi_for(int j, int l, int scale) const {
    for (const auto& e : entries)
        if (e.j == j && e.l == l && e.scale == scale) return e.pi;
    throw std::out_of_range("threshold table: no entry for (" + std::to_string(j) + "," +
                            std::to_string(l) + ") scale " + std::to_string(scale));
}

std::vector<double> ThresholdTable::scale_thresholds(int p, int scale) const {
    const int d = p + p * (p - 1) / 2;
    std::vector<double> out(d, 0.0);
    std::vector<bool> seen(d, false);
    auto pair_rank = [p](int j0, int l0) {
        int idx = 0;
        for (int r = 0; r < j0; ++r) idx += p - 1 - r;
        return idx + (l0 - j0 - 1);
    };
    for (const auto& e : entries) {
        if (e.scale != scale) continue;
        const int j0 = e.j - 1;
        const int l0 = e.l - 1;
        const int k = j0 == l0 ? j0 : p + pair_rank(std::min(j0, l0), std::max(j0, l0));
        if (k < 0 || k >= d) throw std::out_of_range("threshold table: pair outside panel");
        out[k] = e.pi;
        seen[k] = true;
    }
    for (int k = 0; k < d; ++k)
        if (!seen[k])
            throw std::out_of_range("threshold table: missing entry for panel sequence " +
                                    std::to_string(k) + " at scale " + std::to_string(scale));
    return out;
}

void ThresholdTable::write_csv(std::ostream& out) const {
    out.precision(17);
    out << "j,l,scale,kappa,pi\n";
    for (const auto& e : entries)
        out << e.j << ',' << e.l << ',' << e.scale << ',' << e.kappa << ',' << e.pi << '\n';
}

ThresholdTable ThresholdTable::read_csv(std::istream& in, const std::string& name) {
    ThresholdTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.rfind("j,", 0) == 0) continue;
        std::istringstream ss(line);
        ThresholdEntry e;
        char c1, c2, c3, c4;
        if (!(ss >> e.j >> c1 >> e.l >> c2 >> e.scale >> c3 >> e.kappa >> c4 >> e.pi) || c1 != ',' ||
            c2 != ',' || c3 != ',' || c4 != ',')
            throw std::invalid_argument(name + ":" + std::to_string(lineno) +
                                        ": malformed threshold row");
        table.entries.push_back(e);
    }
    if (table.entries.empty()) throw std::invalid_argument(name + ": empty threshold table");
    return table;
}

namespace {

// Stationary AR(1) path with unit innovations.
void ar1_path(double a, int T, rng::Rng& gen, std::vector<double>& out) {
    out.resize(T);
    const double denom = std::sqrt(std::max(1e-12, 1.0 - a * a));
    out[0] = gen.normal() / denom;
    for (int t = 1; t < T; ++t) out[t] = a * out[t - 1] + gen.normal();
}

// Max normalized CUSUM of the scale-i periodogram of a path over its full
// unmasked domain.
double null_statistic(std::span<const double> path, int scale, const WeightTable& weights,
                      std::vector<double>& scratch) {
    const WaveletCoeffs w = haar_coefficients(path, scale);
    scratch.resize(w.values.size());
    for (std::size_t m = 0; m < w.values.size(); ++m) scratch[m] = w.values[m] * w.values[m];
    const Segment seg{w.t0, w.t_end()};
    return cusum_max(scratch, seg, weights);
}

// Empirical upper quantile: the ceil(q * (R + 1))-th order statistic, capped
// at the sample maximum. With q = 1, R = 1 this is the single replicate.
double upper_quantile(std::vector<double>& values, double q) {
    std::sort(values.begin(), values.end());
    const int R = static_cast<int>(values.size());
    int rank = static_cast<int>(std::ceil(q * (R + 1)));
    rank = std::clamp(rank, 1, R);
    return values[rank - 1];
}

} // namespace

ThresholdTable calibrate_thresholds(const MultivariateSeries& x, std::span<const int> scales,
                                    const CalibrationConfig& cfg, int threads) {
    cfg.validate();
    if (x.p < 1 || x.T < 8) throw std::invalid_argument("calibration: series too short");
    if (scales.empty()) throw std::invalid_argument("calibration: no scales");
    const int p = x.p;
    const int T = x.T;
    const int d = p + p * (p - 1) / 2;
    const int ns = static_cast<int>(scales.size());

    // Panel per scale provides coefficient-correlation signs and segment shapes.
    std::vector<std::unique_ptr<PeriodogramPanel>> panels;
    std::vector<WeightTable> weights;
    panels.reserve(ns);
    weights.reserve(ns);
    for (int si = 0; si < ns; ++si) {
        panels.push_back(std::make_unique<PeriodogramPanel>(x, scales[si]));
        weights.emplace_back(panels.back()->full_segment().n());
    }

    std::vector<std::vector<ThresholdEntry>> rows(d);
    const double tg = std::pow(static_cast<double>(T), cfg.gamma);

    parallel_for(d, threads, [&](int k) {
        const auto [j0, l0] = panels[0]->pair_of(k);
        // Scales sharing a proxy series: all of them for diagonals, grouped
        // by the coefficient-correlation sign for pairs.
        std::map<int, std::vector<int>> groups; // group key -> scale indices
        if (j0 == l0) {
            for (int si = 0; si < ns; ++si) groups[0].push_back(si);
        } else {
            for (int si = 0; si < ns; ++si) {
                const int sign = panels[si]->sign_for(j0, l0, panels[si]->full_segment());
                groups[sign > 0 ? 0 : 1].push_back(si);
            }
        }

        std::vector<ThresholdEntry> out(ns);
        std::vector<double> proxy(T);
        std::vector<double> path, scratch;
        for (const auto& [gid, members] : groups) {
            double a_hat = 0.0;
            if (j0 == l0) {
                try {
                    a_hat = fit_ar1(x.series(j0), cfg.clamp);
                } catch (const std::invalid_argument& err) {
                    throw std::invalid_argument("calibration: sequence " + std::to_string(j0 + 1) +
                                                ": " + err.what());
                }
            } else {
                const double sign = gid == 0 ? 1.0 : -1.0;
                for (int t = 0; t < T; ++t) proxy[t] = x.at(j0, t) - sign * x.at(l0, t);
                try {
                    a_hat = fit_ar1(proxy, cfg.clamp);
                } catch (const std::invalid_argument& err) {
                    throw std::invalid_argument("calibration: pair (" + std::to_string(j0 + 1) + "," +
                                                std::to_string(l0 + 1) + "): " + err.what());
                }
            }

            std::vector<std::vector<double>> stats(members.size());
            for (auto& s : stats) s.reserve(cfg.R);
            for (int m = 0; m < cfg.R; ++m) {
                rng::Rng gen(rng::stream_seed({cfg.seed, 0xCA11B8ULL, static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(gid),
                                               static_cast<std::uint64_t>(m)}));
                ar1_path(a_hat, T, gen, path);
                for (std::size_t gi = 0; gi < members.size(); ++gi) {
                    const int si = members[gi];
                    stats[gi].push_back(null_statistic(path, scales[si], weights[si], scratch));
                }
            }
            for (std::size_t gi = 0; gi < members.size(); ++gi) {
                const int si = members[gi];
                ThresholdEntry e;
                e.j = j0 + 1;
                e.l = l0 + 1;
                e.scale = scales[si];
                e.pi = upper_quantile(stats[gi], cfg.quantile);
                e.kappa = e.pi / tg;
                out[si] = e;
            }
        }
        rows[k] = std::move(out);
    });

    ThresholdTable table;
    table.entries.reserve(static_cast<std::size_t>(d) * ns);
    for (int k = 0; k < d; ++k)
        for (int si = 0; si < ns; ++si) table.entries.push_back(rows[k][si]);
    return table;
}

MvtsResult sbs_mvts(const MultivariateSeries& x, const MvtsConfig& cfg,
                    const ThresholdTable* precalibrated) {
    if (x.p < 1 || x.T < 2) throw std::invalid_argument("sbs_mvts: empty input");
    const int T = x.T;
    const int delta = cfg.effective_delta(T);
    if (T < 2 * delta + 2) throw std::invalid_argument("sbs_mvts: T below the searchable minimum");

    const int limit = finest_scale_limit(cfg.alpha, T);
    if (T < (1 << (-limit)))
        throw std::invalid_argument("sbs_mvts: T below the coarsest scale support");

    MvtsResult result;
    for (int scale = -1; scale >= limit; --scale) result.scales.push_back(scale);
    result.d = x.p + x.p * (x.p - 1) / 2;

    if (precalibrated)
        result.thresholds = *precalibrated;
    else
        result.thresholds = calibrate_thresholds(x, result.scales, cfg.calibration, cfg.threads);

    for (int scale : result.scales) {
        PeriodogramPanel panel(x, scale);
        SbsConfig sc;
        sc.thresholds = result.thresholds.scale_thresholds(x.p, scale);
        sc.delta = delta;
        sc.balance = cfg.balance;
        sc.c_star = cfg.c_star;
        sc.rule = cfg.rule;
        ChangePointSet cps = sbs_segment(panel, sc);
        cps = post_process_within(panel, cps, sc);
        for (auto& cp : cps.points) cp.scale = scale;
        result.per_scale.emplace_back(scale, std::move(cps));
    }

    result.merged = across_scale_merge(result.per_scale, cfg.effective_lambda(T));
    return result;
}

ChangePointSet across_scale_merge(const std::vector<std::pair<int, ChangePointSet>>& per_scale,
                                  int lambda) {
    if (lambda < 1) throw std::invalid_argument("across_scale_merge: lambda must be >= 1");
    std::vector<ChangePoint> pool;
    for (const auto& [scale, cps] : per_scale)
        for (const auto& cp : cps.points) {
            pool.push_back(cp);
            pool.back().scale = scale;
        }

    ChangePointSet out;
    if (pool.empty()) return out;

    std::sort(pool.begin(), pool.end(), [](const ChangePoint& a, const ChangePoint& b) {
        if (a.location != b.location) return a.location < b.location;
        if (a.scale != b.scale) return a.scale > b.scale; // finer first
        return a.value > b.value;
    });

    std::vector<std::vector<const ChangePoint*>> clusters;
    for (const auto& cp : pool) {
        if (clusters.empty() || cp.location - clusters.back().front()->location > lambda)
            clusters.emplace_back();
        clusters.back().push_back(&cp);
    }

    for (const auto& cluster : clusters) {
        const ChangePoint* best = cluster.front();
        for (const ChangePoint* cp : cluster) {
            if (cp->scale != best->scale) {
                if (cp->scale > best->scale) best = cp; // finer scale wins
            } else if (cp->value != best->value) {
                if (cp->value > best->value) best = cp;
            } else if (cp->location < best->location) {
                best = cp;
            }
        }
        ChangePoint merged = *best;
        merged.cluster_members.clear();
        for (const ChangePoint* cp : cluster) merged.cluster_members.emplace_back(cp->location, cp->scale);
        out.points.push_back(std::move(merged));
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ChangePoint& a, const ChangePoint& b) { return a.location < b.location; });
    return out;
}

} // namespace sbseg
