#include "sbseg/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sbseg/parallel.hpp"
#include "sbseg/rng.hpp"

namespace sbseg {

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::m1_1: return "M1.1";
        case ModelId::m1_2: return "M1.2";
        case ModelId::m2_1: return "M2.1";
        case ModelId::m2_2: return "M2.2";
        case ModelId::m3: return "M3";
        case ModelId::m4: return "M4";
        case ModelId::example_a: return "A";
        case ModelId::example_b: return "B";
        case ModelId::null_model: return "null";
    }
    return "null";
}

ModelId model_from_string(const std::string& name) {
    if (name == "M1.1") return ModelId::m1_1;
    if (name == "M1.2") return ModelId::m1_2;
    if (name == "M2.1") return ModelId::m2_1;
    if (name == "M2.2") return ModelId::m2_2;
    if (name == "M3") return ModelId::m3;
    if (name == "M4") return ModelId::m4;
    if (name == "A") return ModelId::example_a;
    if (name == "B") return ModelId::example_b;
    if (name == "null") return ModelId::null_model;
    throw std::invalid_argument("unknown model: " + name);
}

void ModelSpec::validate() const {
    if (p < 1) throw std::invalid_argument("model: p must be positive");
    if (T < 128) throw std::invalid_argument("model: T must be at least 128");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("model: rho must lie in (0, 1]");
    const bool change_bearing = id != ModelId::null_model && id != ModelId::example_a &&
                                id != ModelId::example_b;
    if (change_bearing && static_cast<int>(rho * p) < 1)
        throw std::invalid_argument("model: floor(rho * p) must be at least 1");
    if ((id == ModelId::m1_2 || id == ModelId::m2_2) && static_cast<int>(rho * p / 2) < 1)
        throw std::invalid_argument("model: floor(rho * p / 2) must be at least 1 for swap models");
    if ((id == ModelId::example_a || id == ModelId::example_b) && p < 2)
        throw std::invalid_argument("model: the motivating examples need p >= 2");
}

namespace {

constexpr std::uint64_t tag_params = 0x9a7a;
constexpr std::uint64_t tag_noise = 0x17e5;

// Scale the nominal change locations (stated for T = 1024) to the requested T.
int scaled_location(int nominal, int T) {
    const long long v = static_cast<long long>(nominal) * T / 1024;
    return static_cast<int>(std::clamp<long long>(v, 1, T - 2));
}

std::vector<int> random_subset(rng::Rng& gen, int p, int m, const std::vector<int>& exclude = {}) {
    std::vector<int> idx;
    idx.reserve(p);
    for (int j = 0; j < p; ++j)
        if (std::find(exclude.begin(), exclude.end(), j) == exclude.end()) idx.push_back(j);
    if (m > static_cast<int>(idx.size()))
        throw std::invalid_argument("random_subset: not enough indices");
    for (int r = 0; r < m; ++r) {
        const int pick = r + gen.uniform_int(static_cast<int>(idx.size()) - r);
        std::swap(idx[r], idx[pick]);
    }
    std::vector<int> out(idx.begin(), idx.begin() + m);
    std::sort(out.begin(), out.end());
    return out;
}

// Innovation vectors with the block covariance used by the swap models:
// variance 4 everywhere, correlation (-0.95)^{|j-l|} inside the first half,
// independence elsewhere.
void block_noise(rng::Rng& gen, int p, std::vector<double>& eps) {
    eps.resize(p);
    const int half = p / 2;
    const double rho = -0.95;
    const double resid = std::sqrt(1.0 - rho * rho);
    double prev = 0.0;
    for (int j = 0; j < half; ++j) {
        const double n = gen.normal();
        prev = j == 0 ? n : rho * prev + resid * n;
        eps[j] = 2.0 * prev;
    }
    for (int j = half; j < p; ++j) eps[j] = 2.0 * gen.normal();
}

// Pairwise swap of two disjoint random index sets, applied to the identity.
std::vector<int> swap_permutation(rng::Rng& gen, int p, int m, std::vector<int>& affected) {
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    const std::vector<int> a = random_subset(gen, p, m);
    const std::vector<int> b = random_subset(gen, p, m, a);
    for (int r = 0; r < m; ++r) std::swap(perm[a[r]], perm[b[r]]);
    affected = a;
    affected.insert(affected.end(), b.begin(), b.end());
    std::sort(affected.begin(), affected.end());
    return perm;
}

// Segment lookup: regime r covers [cps[r-1]+1, cps[r]].
int segment_of(int t, const std::vector<int>& cps) {
    int r = 0;
    while (r < static_cast<int>(cps.size()) && t > cps[r]) ++r;
    return r;
}

struct JitterMap {
    // Per (series, event) change times; empty when jitter is off.
    std::vector<std::vector<int>> times; // [event][series]
    bool active = false;

    int time_for(int event, int series, int nominal) const {
        return active ? times[event][series] : nominal;
    }
};

JitterMap make_jitter(rng::Rng& gen, const ModelSpec& spec, const std::vector<int>& cps) {
    JitterMap map;
    map.active = spec.jitter;
    if (!spec.jitter) return map;
    const int window = std::max(1, static_cast<int>(2.0 * std::log(static_cast<double>(spec.T))));
    map.times.assign(cps.size(), std::vector<int>(spec.p, 0));
    for (std::size_t r = 0; r < cps.size(); ++r)
        for (int j = 0; j < spec.p; ++j) {
            const int offset = gen.uniform_int(window) - window / 2;
            map.times[r][j] = std::clamp(cps[r] + offset, 1, spec.T - 2);
        }
    return map;
}

MultivariateSeries generate_m1(const ModelSpec& spec) {
    const int p = spec.p, T = spec.T;
    const bool swap_variant = spec.id == ModelId::m1_2;
    const bool stationary = spec.id == ModelId::null_model;
    std::vector<int> cps;
    if (!stationary)
        cps = {scaled_location(341, T), scaled_location(614, T), scaled_location(838, T)};

    rng::Rng params(rng::stream_seed({spec.seed, tag_params, 0x11}));
    rng::Rng noise(rng::stream_seed({spec.seed, tag_noise, 0x11}));

    const int n_seg = static_cast<int>(cps.size()) + 1;
    // Per-segment AR parameters; columns stay constant unless regenerated.
    std::vector<std::vector<double>> alpha(n_seg, std::vector<double>(p));
    std::vector<std::vector<double>> sigma(n_seg, std::vector<double>(p));
    for (int j = 0; j < p; ++j) {
        alpha[0][j] = params.uniform(-0.5, 0.999);
        sigma[0][j] = params.uniform(0.5, 2.0);
    }

    MultivariateSeries x(p, T);
    x.truth = cps;
    std::vector<std::vector<int>> perms(n_seg);
    perms[0].resize(p);
    std::iota(perms[0].begin(), perms[0].end(), 0);

    const int m = static_cast<int>(spec.rho * p);
    const int m_swap = static_cast<int>(spec.rho * p / 2.0);
    for (int r = 1; r < n_seg; ++r) {
        alpha[r] = alpha[r - 1];
        sigma[r] = sigma[r - 1];
        if (!swap_variant) {
            const std::vector<int> changed = random_subset(params, p, m);
            for (int j : changed) {
                alpha[r][j] = params.uniform(-0.5, 0.999);
                sigma[r][j] = params.uniform(0.5, 2.0);
            }
            x.changed_series.push_back(changed);
        } else {
            std::vector<int> affected;
            perms[r] = swap_permutation(params, p, m_swap, affected);
            x.changed_series.push_back(affected);
        }
    }
    if (swap_variant)
        for (int r = 1; r < n_seg; ++r)
            if (perms[r].empty()) perms[r] = perms[r - 1];

    const JitterMap jitter = make_jitter(params, spec, cps);
    auto regime = [&](int j, int t) {
        int r = 0;
        for (std::size_t q = 0; q < cps.size(); ++q)
            if (t > jitter.time_for(static_cast<int>(q), j, cps[q])) r = static_cast<int>(q) + 1;
        return r;
    };

    std::vector<double> eps(p);
    for (int t = 0; t < T; ++t) {
        if (swap_variant) {
            block_noise(noise, p, eps);
        } else {
            for (int j = 0; j < p; ++j) eps[j] = 2.0 * noise.normal();
        }
        for (int j = 0; j < p; ++j) {
            const int r = regime(j, t);
            const double a = alpha[r][j];
            const double s = sigma[r][j];
            const double e = swap_variant ? eps[perms[segment_of(t, cps)][j]] : eps[j];
            if (t == 0)
                x.at(j, 0) = s * e / std::sqrt(1.0 - a * a);
            else
                x.at(j, t) = a * x.at(j, t - 1) + s * e;
        }
    }
    return x;
}

MultivariateSeries generate_m2(const ModelSpec& spec) {
    const int p = spec.p, T = spec.T;
    constexpr int n_factors = 5;
    const bool swap_variant = spec.id == ModelId::m2_2;
    const std::vector<int> cps = {scaled_location(341, T), scaled_location(614, T),
                                  scaled_location(838, T)};

    rng::Rng params(rng::stream_seed({spec.seed, tag_params, 0x22}));
    rng::Rng noise(rng::stream_seed({spec.seed, tag_noise, 0x22}));

    const int n_seg = static_cast<int>(cps.size()) + 1;
    std::vector<std::vector<double>> loadings(n_seg, std::vector<double>(p * n_factors));
    for (auto& v : loadings[0]) v = params.uniform(0.5, 1.5);

    double factor_alpha[n_factors], factor_sigma[n_factors];
    for (int f = 0; f < n_factors; ++f) {
        factor_alpha[f] = params.uniform(-0.5, 0.999);
        factor_sigma[f] = params.uniform(0.5, 2.0);
    }

    MultivariateSeries x(p, T);
    x.truth = cps;
    const int m = static_cast<int>(spec.rho * p);
    const int m_swap = static_cast<int>(spec.rho * p / 2.0);
    std::vector<std::vector<int>> perms(n_seg);
    perms[0].resize(p);
    std::iota(perms[0].begin(), perms[0].end(), 0);
    for (int r = 1; r < n_seg; ++r) {
        loadings[r] = loadings[r - 1];
        if (!swap_variant) {
            const std::vector<int> changed = random_subset(params, p, m);
            for (int j : changed)
                for (int f = 0; f < n_factors; ++f) loadings[r][j * n_factors + f] = params.normal();
            x.changed_series.push_back(changed);
            perms[r] = perms[r - 1];
        } else {
            std::vector<int> affected;
            perms[r] = swap_permutation(params, p, m_swap, affected);
            x.changed_series.push_back(affected);
        }
    }

    const JitterMap jitter = make_jitter(params, spec, cps);

    double factors[n_factors] = {0, 0, 0, 0, 0};
    std::vector<double> eps(p);
    for (int t = 0; t < T; ++t) {
        for (int f = 0; f < n_factors; ++f) {
            const double e = 2.0 * noise.normal();
            if (t == 0)
                factors[f] = factor_sigma[f] * e / std::sqrt(1.0 - factor_alpha[f] * factor_alpha[f]);
            else
                factors[f] = factor_alpha[f] * factors[f] + factor_sigma[f] * e;
        }
        block_noise(noise, p, eps);
        const int seg = segment_of(t, cps);
        for (int j = 0; j < p; ++j) {
            int r = seg;
            if (jitter.active) {
                r = 0;
                for (std::size_t q = 0; q < cps.size(); ++q)
                    if (t > jitter.time_for(static_cast<int>(q), j, cps[q])) r = static_cast<int>(q) + 1;
            }
            double acc = eps[perms[seg][j]];
            for (int f = 0; f < n_factors; ++f) acc += loadings[r][j * n_factors + f] * factors[f];
            x.at(j, t) = acc;
        }
    }
    return x;
}

// Draw an AR(1) target and a moment-matched MA(2): identical variance and
// lag-one autocorrelation on both sides of the switch, different beyond.
struct M3Params {
    double alpha, sigma, beta1, beta2, ma_scale;
};

M3Params draw_m3_params(rng::Rng& gen) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double alpha = gen.uniform(-0.5, 0.999);
        const double sigma = gen.uniform(0.5, 2.0);
        double beta2 = gen.uniform(0.3, 0.9);
        if (gen.uniform() < 0.5) beta2 = -beta2;
        const double disc = (1.0 + beta2) * (1.0 + beta2) - 4.0 * alpha * alpha * (1.0 + beta2 * beta2);
        if (disc < 0.0) continue;
        double beta1;
        if (std::abs(alpha) < 1e-6) {
            beta1 = alpha * (1.0 + beta2 * beta2) / (1.0 + beta2);
        } else {
            beta1 = ((1.0 + beta2) - std::sqrt(disc)) / (2.0 * alpha);
        }
        if (!std::isfinite(beta1)) continue;
        const double norm = 1.0 + beta1 * beta1 + beta2 * beta2;
        const double variance = sigma * sigma / (1.0 - alpha * alpha);
        return {alpha, sigma, beta1, beta2, std::sqrt(variance / norm)};
    }
    throw std::runtime_error("M3: no feasible moment-matched draw");
}

MultivariateSeries generate_m3(const ModelSpec& spec) {
    const int p = spec.p, T = spec.T;
    const int cp = scaled_location(512, T);
    rng::Rng params(rng::stream_seed({spec.seed, tag_params, 0x33}));
    rng::Rng noise(rng::stream_seed({spec.seed, tag_noise, 0x33}));

    const int m = static_cast<int>(spec.rho * p);
    std::vector<M3Params> bearing(m);
    for (int j = 0; j < m; ++j) bearing[j] = draw_m3_params(params);
    std::vector<double> plain_alpha(p - m);
    for (auto& a : plain_alpha) a = params.uniform(-0.5, 0.999);

    MultivariateSeries x(p, T);
    x.truth = {cp};
    std::vector<int> changed(m);
    std::iota(changed.begin(), changed.end(), 0);
    x.changed_series.push_back(changed);

    const JitterMap jitter = make_jitter(params, spec, x.truth);

    std::vector<double> e_prev(p), e_prev2(p);
    for (int j = 0; j < p; ++j) {
        e_prev[j] = noise.normal();
        e_prev2[j] = noise.normal();
    }
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < p; ++j) {
            const double e = noise.normal();
            if (j < m) {
                const auto& par = bearing[j];
                const int local_cp = jitter.time_for(0, j, cp);
                if (t <= local_cp) {
                    x.at(j, t) = par.ma_scale * (e + par.beta1 * e_prev[j] + par.beta2 * e_prev2[j]);
                } else {
                    x.at(j, t) = par.alpha * x.at(j, t - 1) + par.sigma * e;
                }
            } else {
                const double a = plain_alpha[j - m];
                if (t == 0)
                    x.at(j, 0) = e / std::sqrt(1.0 - a * a);
                else
                    x.at(j, t) = a * x.at(j, t - 1) + e;
            }
            e_prev2[j] = e_prev[j];
            e_prev[j] = e;
        }
    }
    return x;
}

MultivariateSeries generate_m4(const ModelSpec& spec) {
    const int p = spec.p, T = spec.T;
    const int cp = scaled_location(100, T);
    rng::Rng params(rng::stream_seed({spec.seed, tag_params, 0x44}));
    rng::Rng noise(rng::stream_seed({spec.seed, tag_noise, 0x44}));

    const int m = static_cast<int>(spec.rho * p);
    std::vector<double> first(p), second(p);
    for (int j = 0; j < m; ++j) {
        first[j] = params.uniform(0.5, 0.59);
        second[j] = params.uniform(-0.79, -0.5);
    }
    for (int j = m; j < p; ++j) {
        first[j] = params.uniform(-0.79, -0.5);
        second[j] = first[j];
    }

    MultivariateSeries x(p, T);
    x.truth = {cp};
    std::vector<int> changed(m);
    std::iota(changed.begin(), changed.end(), 0);
    x.changed_series.push_back(changed);

    const JitterMap jitter = make_jitter(params, spec, x.truth);

    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < p; ++j) {
            const double e = noise.normal();
            const int local_cp = j < m ? jitter.time_for(0, j, cp) : cp;
            const double a = (j < m && t > local_cp) ? second[j] : first[j];
            if (t == 0)
                x.at(j, 0) = e / std::sqrt(1.0 - first[j] * first[j]);
            else
                x.at(j, t) = a * x.at(j, t - 1) + e;
        }
    }
    return x;
}

MultivariateSeries generate_examples(const ModelSpec& spec) {
    const int p = spec.p, T = spec.T;
    const bool is_a = spec.id == ModelId::example_a;
    const int cp = is_a ? T / 2 : scaled_location(100, T);
    rng::Rng params(rng::stream_seed({spec.seed, tag_params, 0x55}));
    rng::Rng noise(rng::stream_seed({spec.seed, tag_noise, 0x55}));

    // A: one change-carrying series; B: half the panel switches to strong
    // negative autocorrelation after a short first segment.
    const int n_changers = is_a ? 1 : p / 2;
    std::vector<double> before(p), after(p);
    for (int j = 0; j < p; ++j) {
        if (j < n_changers) {
            before[j] = is_a ? 0.95 : 0.3;
            after[j] = is_a ? 0.3 : -0.75;
        } else {
            before[j] = params.uniform(0.5, 0.99);
            after[j] = before[j];
        }
    }

    MultivariateSeries x(p, T);
    x.truth = {cp};
    std::vector<int> changed(n_changers);
    std::iota(changed.begin(), changed.end(), 0);
    x.changed_series.push_back(changed);

    for (int t = 0; t < T; ++t) {
        for (int j = 0; j < p; ++j) {
            const double e = noise.normal();
            const double a = t > cp ? after[j] : before[j];
            if (t == 0)
                x.at(j, 0) = e / std::sqrt(1.0 - before[j] * before[j]);
            else
                x.at(j, t) = a * x.at(j, t - 1) + e;
        }
    }
    return x;
}

} // namespace

MultivariateSeries generate(const ModelSpec& spec) {
    spec.validate();
    switch (spec.id) {
        case ModelId::m1_1:
        case ModelId::m1_2:
        case ModelId::null_model: return generate_m1(spec);
        case ModelId::m2_1:
        case ModelId::m2_2: return generate_m2(spec);
        case ModelId::m3: return generate_m3(spec);
        case ModelId::m4: return generate_m4(spec);
        case ModelId::example_a:
        case ModelId::example_b: return generate_examples(spec);
    }
    throw std::logic_error("generate: unhandled model");
}

double EvalReport::detection_rate() const {
    if (detected.empty()) return 0.0;
    double sum = 0.0;
    for (auto d : detected) sum += d;
    return sum / static_cast<double>(detected.size());
}

EvalReport evaluate(const std::vector<int>& estimates, const std::vector<int>& truth, int tolerance) {
    if (tolerance < 0) throw std::invalid_argument("evaluate: tolerance must be nonnegative");
    EvalReport report;
    report.n_hat = static_cast<int>(estimates.size());
    report.detected.assign(truth.size(), 0);
    report.errors.assign(truth.size(), -1);

    struct Pair {
        int dist;
        int ti;
        int ei;
    };
    std::vector<Pair> pairs;
    pairs.reserve(truth.size() * estimates.size());
    for (std::size_t ti = 0; ti < truth.size(); ++ti)
        for (std::size_t ei = 0; ei < estimates.size(); ++ei)
            pairs.push_back({std::abs(estimates[ei] - truth[ti]), static_cast<int>(ti),
                             static_cast<int>(ei)});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.ti != b.ti) return a.ti < b.ti;
        return a.ei < b.ei;
    });

    std::vector<bool> truth_used(truth.size(), false), est_used(estimates.size(), false);
    for (const auto& pr : pairs) {
        if (truth_used[pr.ti] || est_used[pr.ei]) continue;
        truth_used[pr.ti] = true;
        est_used[pr.ei] = true;
        report.errors[pr.ti] = pr.dist;
        report.detected[pr.ti] = pr.dist <= tolerance ? 1 : 0;
    }
    return report;
}

std::vector<BenchRow> run_benchmark(const ModelSpec& spec, const std::vector<AggRule>& rules,
                                    int reps, const CalibrationConfig& calibration, int threads) {
    spec.validate();
    if (reps < 1) throw std::invalid_argument("run_benchmark: reps must be >= 1");
    if (rules.empty()) throw std::invalid_argument("run_benchmark: no rules");

    const int tolerance = static_cast<int>(std::floor(std::sqrt(static_cast<double>(spec.T)) / 2.0));

    struct RepOutcome {
        std::vector<int> n_hat;                   // per rule
        std::vector<std::vector<std::uint8_t>> detected; // per rule, per truth
    };
    std::vector<RepOutcome> outcomes(reps);

    parallel_for(reps, threads, [&](int r) {
        ModelSpec rep_spec = spec;
        rep_spec.seed = spec.seed + static_cast<std::uint64_t>(r);
        const MultivariateSeries x = generate(rep_spec);

        MvtsConfig cfg;
        cfg.calibration = calibration;
        cfg.calibration.seed = rng::stream_seed({rep_spec.seed, 0xbe9c4ULL});
        cfg.threads = 1;
        std::vector<int> scales;
        for (int s = -1; s >= finest_scale_limit(cfg.alpha, x.T); --s) scales.push_back(s);
        const ThresholdTable table = calibrate_thresholds(x, scales, cfg.calibration, 1);

        RepOutcome& outcome = outcomes[r];
        outcome.n_hat.resize(rules.size());
        outcome.detected.resize(rules.size());
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            MvtsConfig rule_cfg = cfg;
            rule_cfg.rule = rules[ri];
            const MvtsResult res = sbs_mvts(x, rule_cfg, &table);
            const EvalReport ev = evaluate(res.merged.locations(), x.truth, tolerance);
            outcome.n_hat[ri] = ev.n_hat;
            outcome.detected[ri] = ev.detected;
        }
    });

    std::vector<BenchRow> rows;
    const std::size_t n_truth = outcomes.front().detected.front().size();
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
        BenchRow row;
        row.spec = spec;
        row.rule = rules[ri];
        row.reps = reps;
        double sum = 0.0, sum2 = 0.0;
        std::vector<double> det(n_truth, 0.0);
        for (int r = 0; r < reps; ++r) {
            const double nh = outcomes[r].n_hat[ri];
            sum += nh;
            sum2 += nh * nh;
            for (std::size_t ti = 0; ti < n_truth; ++ti) det[ti] += outcomes[r].detected[ri][ti];
        }
        row.mean_nhat = sum / reps;
        row.sd_nhat = reps > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / reps) / (reps - 1))) : 0.0;
        row.det_pct.resize(n_truth);
        for (std::size_t ti = 0; ti < n_truth; ++ti) row.det_pct[ti] = 100.0 * det[ti] / reps;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out.precision(10);
    std::size_t k = 0;
    for (const auto& row : rows) k = std::max(k, row.det_pct.size());
    out << "model,rho,p,T,rule,mean_nhat,sd_nhat";
    for (std::size_t i = 0; i < k; ++i) out << ",det_pct_" << (i + 1);
    out << ",reps,seed0\n";
    for (const auto& row : rows) {
        out << to_string(row.spec.id) << ',' << row.spec.rho << ',' << row.spec.p << ','
            << row.spec.T << ',' << to_string(row.rule) << ',' << row.mean_nhat << ','
            << row.sd_nhat;
        for (std::size_t i = 0; i < k; ++i)
            out << ',' << (i < row.det_pct.size() ? std::to_string(row.det_pct[i]) : "");
        out << ',' << row.reps << ',' << row.spec.seed << '\n';
    }
}

void write_bench_report(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << std::left << std::setw(7) << "model" << std::setw(6) << "rho" << std::setw(6) << "p"
        << std::setw(7) << "T" << std::setw(6) << "rule" << std::right << std::setw(10) << "mean"
        << std::setw(10) << "sd" << "  detection %\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(7) << to_string(row.spec.id) << std::setw(6) << row.spec.rho
            << std::setw(6) << row.spec.p << std::setw(7) << row.spec.T << std::setw(6)
            << to_string(row.rule) << std::right << std::fixed << std::setprecision(2)
            << std::setw(10) << row.mean_nhat << std::setw(10) << row.sd_nhat << "  ";
        for (std::size_t i = 0; i < row.det_pct.size(); ++i)
            out << (i ? " " : "") << std::setprecision(0) << row.det_pct[i];
        out.unsetf(std::ios::fixed);
        out << '\n';
    }
}

} // namespace sbseg
