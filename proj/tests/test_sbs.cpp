#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sbseg/rng.hpp"
#include "sbseg/sbs.hpp"

using namespace sbseg;

namespace {

// Multiplicative panel: sigma profiles times squared standard normals.
MatrixPanel noise_panel(const std::vector<std::vector<double>>& sigma, rng::Rng& gen) {
    std::vector<std::vector<double>> rows(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        rows[k].resize(sigma[k].size());
        for (std::size_t t = 0; t < sigma[k].size(); ++t) {
            const double z = gen.normal();
            rows[k][t] = sigma[k][t] * z * z;
        }
    }
    return MatrixPanel(std::move(rows));
}

std::vector<double> step_profile(int T, const std::vector<std::pair<int, double>>& jumps,
                                 double base = 1.0) {
    std::vector<double> out(T, base);
    for (const auto& [at, level] : jumps)
        for (int t = at + 1; t < T; ++t) out[t] = level;
    return out;
}

// Independent re-coding of the first split: two-loop curves, indicator
// aggregation, largest passing value with the full window check.
std::optional<int> oracle_first_split(const std::vector<std::vector<double>>& rows,
                                      const std::vector<double>& pi, int delta) {
    const int n = static_cast<int>(rows.front().size());
    const int d = static_cast<int>(rows.size());
    std::vector<double> agg(n - 1, 0.0);
    for (int k = 0; k < d; ++k) {
        double mean = 0.0;
        for (double v : rows[k]) mean += v;
        mean /= n;
        for (int b = 0; b < n - 1; ++b) {
            const int m = b + 1;
            double left = 0.0;
            for (int t = 0; t <= b; ++t) left += rows[k][t];
            double right = 0.0;
            for (int t = b + 1; t < n; ++t) right += rows[k][t];
            const double wl = std::sqrt(static_cast<double>(n - m) / (static_cast<double>(n) * m));
            const double wr = std::sqrt(static_cast<double>(m) / (static_cast<double>(n) * (n - m)));
            const double v = std::abs(wl * left - wr * right) / mean;
            if (v > pi[k]) agg[b] += v;
        }
    }
    std::vector<int> order;
    for (int b = 0; b < n - 1; ++b)
        if (agg[b] > 0.0) order.push_back(b);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (agg[a] != agg[b]) return agg[a] > agg[b];
        return a < b;
    });
    for (int b : order) {
        bool ok = true;
        for (int u = std::max(0, b - delta); u <= std::min(n - 2, b + delta); ++u)
            if (agg[u] <= 0.0) {
                ok = false;
                break;
            }
        if (ok) return b;
    }
    return std::nullopt;
}

AggregatedCurve curve_from_values(const std::vector<double>& values, int s) {
    AggregatedCurve agg;
    agg.segment = Segment{s, s + static_cast<int>(values.size())};
    agg.rule = AggRule::thr;
    agg.values = values;
    agg.counts.resize(values.size());
    agg.pass.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        agg.counts[i] = values[i] > 0.0 ? 1 : 0;
        agg.pass[i] = values[i] > 0.0;
    }
    return agg;
}

} // namespace

TEST_CASE("constant panel detects nothing") {
    std::vector<std::vector<double>> rows(3, std::vector<double>(256, 2.0));
    MatrixPanel panel(std::move(rows));
    SbsConfig cfg;
    cfg.thresholds = {0.5, 0.5, 0.5};
    cfg.delta = 8;
    const auto cps = sbs_segment(panel, cfg);
    REQUIRE(cps.empty());
}

TEST_CASE("deterministic step splits at the jump") {
    const int T = 1024;
    std::vector<double> y(T, 1.0);
    for (int t = 512; t < T; ++t) y[t] = 4.0;
    MatrixPanel panel({y});
    SbsConfig cfg;
    cfg.thresholds = {0.1};
    cfg.delta = 16;
    const auto cps = sbs_segment(panel, cfg);
    REQUIRE(cps.size() == 1);
    REQUIRE(cps.points[0].location == 511);
    REQUIRE(cps.points[0].level == 1);
    REQUIRE(cps.points[0].passing == std::vector<int>{0});
}

TEST_CASE("find_candidate handles the canonical shapes") {
    SbsConfig cfg;
    cfg.thresholds = {1.0};
    cfg.delta = 2;

    SECTION("all zero means stop") {
        const auto agg = curve_from_values(std::vector<double>(50, 0.0), 0);
        REQUIRE_FALSE(find_candidate(agg, {}, cfg).has_value());
    }
    SECTION("an isolated spike is vetoed") {
        std::vector<double> v(50, 0.0);
        v[20] = 5.0;
        const auto agg = curve_from_values(v, 0);
        REQUIRE_FALSE(find_candidate(agg, {}, cfg).has_value());
    }
    SECTION("a plateau with a unique peak returns the peak") {
        cfg.delta = 10;
        std::vector<double> v(300, 0.0);
        for (int b = 100; b <= 200; ++b) v[b] = 1.0;
        v[150] = 3.0;
        const auto agg = curve_from_values(v, 0);
        const auto b = find_candidate(agg, {}, cfg);
        REQUIRE(b.has_value());
        REQUIRE(*b == 150);
    }
    SECTION("rejected spikes fall back to the next plateau candidate") {
        cfg.delta = 3;
        std::vector<double> v(100, 0.0);
        v[10] = 9.0; // isolated, rejected
        for (int b = 40; b <= 60; ++b) v[b] = 1.0;
        v[50] = 2.0;
        const auto agg = curve_from_values(v, 0);
        const auto b = find_candidate(agg, {}, cfg);
        REQUIRE(b.has_value());
        REQUIRE(*b == 50);
    }
    SECTION("min-distance admissibility excludes neighborhoods of existing points") {
        cfg.delta = 10;
        std::vector<double> v(300, 1.0);
        v[150] = 3.0;
        v[170] = 2.5;
        const auto agg = curve_from_values(v, 0);
        const auto b = find_candidate(agg, {155}, cfg);
        REQUIRE(b.has_value());
        REQUIRE(*b == 170); // 150 is within delta of 155
    }
    SECTION("fixed balance mode confines the split") {
        cfg.balance = BalanceMode::fixed;
        cfg.c_star = 0.6;
        cfg.delta = 1;
        std::vector<double> v(100, 1.0);
        v[5] = 9.0; // outside the balanced band
        v[50] = 2.0;
        const auto agg = curve_from_values(v, 0);
        const auto b = find_candidate(agg, {}, cfg);
        REQUIRE(b.has_value());
        REQUIRE(*b == 50);
    }
}

TEST_CASE("first split matches an independently coded aggregate") {
    rng::Rng gen(99);
    for (int rep = 0; rep < 30; ++rep) {
        const int T = 64 + gen.uniform_int(192);
        const int d = 1 + gen.uniform_int(5);
        std::vector<std::vector<double>> sigma(d);
        for (int k = 0; k < d; ++k) {
            std::vector<std::pair<int, double>> jumps;
            if (gen.uniform() < 0.7)
                jumps.push_back({T / 4 + gen.uniform_int(T / 2), gen.uniform(2.0, 6.0)});
            sigma[k] = step_profile(T, jumps);
        }
        std::vector<std::vector<double>> rows(d);
        for (int k = 0; k < d; ++k) {
            rows[k].resize(T);
            for (int t = 0; t < T; ++t) {
                const double z = gen.normal();
                rows[k][t] = sigma[k][t] * z * z + 1e-9;
            }
        }
        SbsConfig cfg;
        cfg.thresholds.assign(d, 1.0);
        cfg.delta = 4;

        const auto oracle = oracle_first_split(rows, cfg.thresholds, cfg.delta);
        MatrixPanel panel(std::move(rows));
        const auto cps = sbs_segment(panel, cfg);
        std::optional<int> first;
        for (const auto& cp : cps.points)
            if (cp.level == 1) first = cp.location;
        REQUIRE(first.has_value() == oracle.has_value());
        if (first) REQUIRE(*first == *oracle);
    }
}

TEST_CASE("locations stay inside their detection segments") {
    rng::Rng gen(123);
    std::vector<std::vector<double>> sigma;
    const int T = 512;
    for (int k = 0; k < 4; ++k)
        sigma.push_back(step_profile(T, {{160, 3.0}, {340, 1.2}}));
    auto panel = noise_panel(sigma, gen);
    SbsConfig cfg;
    cfg.thresholds.assign(4, 1.0);
    cfg.delta = 8;
    const auto cps = sbs_segment(panel, cfg);
    for (const auto& cp : cps.points) {
        REQUIRE(cp.location >= cp.segment.s);
        REQUIRE(cp.location < cp.segment.e);
    }
    // Sorted and unique locations.
    for (std::size_t q = 1; q < cps.points.size(); ++q)
        REQUIRE(cps.points[q - 1].location < cps.points[q].location);
}

TEST_CASE("min-distance mode keeps detections apart") {
    rng::Rng gen(7);
    const int T = 768;
    std::vector<std::vector<double>> sigma;
    for (int k = 0; k < 6; ++k)
        sigma.push_back(step_profile(T, {{200, 4.0}, {230, 1.0}, {500, 5.0}}));
    auto panel = noise_panel(sigma, gen);
    SbsConfig cfg;
    cfg.thresholds.assign(6, 1.0);
    cfg.delta = 40;
    cfg.balance = BalanceMode::min_distance;
    const auto cps = sbs_segment(panel, cfg);
    const auto locs = cps.locations();
    for (std::size_t a = 0; a < locs.size(); ++a)
        for (std::size_t b = a + 1; b < locs.size(); ++b)
            REQUIRE(std::abs(locs[a] - locs[b]) >= cfg.delta);
}

TEST_CASE("raising thresholds never adds detections") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        rng::Rng gen(seed);
        const int T = 512;
        const int d = 5;
        std::vector<std::vector<double>> sigma;
        for (int k = 0; k < d; ++k) {
            std::vector<std::pair<int, double>> jumps;
            if (k % 2 == 0) jumps = {{170, 3.5}, {341, 1.0}};
            sigma.push_back(step_profile(T, jumps));
        }
        auto panel = noise_panel(sigma, gen);
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (double factor : {1.0, 1.6, 2.5, 4.0}) {
            SbsConfig cfg;
            cfg.thresholds.assign(d, 0.9 * factor);
            cfg.delta = 8;
            const auto cps = sbs_segment(panel, cfg);
            REQUIRE(cps.size() <= previous);
            previous = cps.size();
        }
    }
}

TEST_CASE("determinism") {
    rng::Rng gen(2024);
    std::vector<std::vector<double>> sigma(3, step_profile(400, {{150, 2.5}}));
    auto panel = noise_panel(sigma, gen);
    SbsConfig cfg;
    cfg.thresholds.assign(3, 1.0);
    cfg.delta = 8;
    const auto a = sbs_segment(panel, cfg);
    const auto b = sbs_segment(panel, cfg);
    REQUIRE(a.locations() == b.locations());
    for (std::size_t q = 0; q < a.points.size(); ++q) {
        REQUIRE(a.points[q].value == b.points[q].value);
        REQUIRE(a.points[q].passing == b.points[q].passing);
    }
}

TEST_CASE("short panels come back with a diagnostic") {
    std::vector<std::vector<double>> rows(2, std::vector<double>(10, 1.0));
    MatrixPanel panel(std::move(rows));
    SbsConfig cfg;
    cfg.thresholds = {1.0, 1.0};
    cfg.delta = 16;
    const auto cps = sbs_segment(panel, cfg);
    REQUIRE(cps.empty());
    REQUIRE_FALSE(cps.diagnostic.empty());
}

TEST_CASE("a degenerate root sequence is reported by name") {
    std::vector<std::vector<double>> rows{std::vector<double>(64, 1.0),
                                          std::vector<double>(64, 0.0)};
    MatrixPanel panel(std::move(rows));
    SbsConfig cfg;
    cfg.thresholds = {1.0, 1.0};
    cfg.delta = 4;
    REQUIRE_THROWS_WITH(sbs_segment(panel, cfg), Catch::Matchers::ContainsSubstring("y2"));
}

TEST_CASE("within-segment post-processing") {
    SbsConfig cfg;
    cfg.thresholds = {0.5};
    cfg.delta = 16;

    SECTION("empty input is returned unchanged") {
        std::vector<std::vector<double>> rows(1, std::vector<double>(128, 1.0));
        MatrixPanel panel(std::move(rows));
        const auto out = post_process_within(panel, ChangePointSet{}, cfg);
        REQUIRE(out.empty());
    }

    const int T = 1024;
    std::vector<double> y(T, 1.0);
    for (int t = 512; t < T; ++t) y[t] = 4.0;

    SECTION("a true step estimate is retained") {
        MatrixPanel panel({y});
        ChangePointSet cps;
        cps.points.push_back(ChangePoint{511, 1, 0, Segment{0, T - 1}, 0.0, {0}, {}});
        const auto out = post_process_within(panel, cps, cfg);
        REQUIRE(out.size() == 1);
        REQUIRE(out.points[0].location == 511);
    }

    SECTION("a spurious neighbor of a true step is pruned") {
        std::vector<double> step(T, 1.0);
        for (int t = 301; t < T; ++t) step[t] = 4.0;
        MatrixPanel panel({step});
        ChangePointSet cps;
        cps.points.push_back(ChangePoint{300, 1, 0, Segment{0, T - 1}, 0.0, {0}, {}});
        cps.points.push_back(ChangePoint{305, 2, 0, Segment{301, T - 1}, 0.0, {0}, {}});
        const auto out = post_process_within(panel, cps, cfg);
        REQUIRE(out.size() == 1);
        REQUIRE(out.points[0].location == 300);
    }
}
