#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sbseg/cusum.hpp"
#include "sbseg/rng.hpp"

using namespace sbseg;

namespace {

// Independent two-loop evaluation of the normalized contrast, the oracle the
// fast path is checked against.
std::vector<double> brute_force_curve(const std::vector<double>& y, Segment seg) {
    const int n = seg.n();
    double total = 0.0;
    for (double v : y) total += v;
    const double mean = total / n;
    std::vector<double> out(n - 1);
    for (int b = seg.s; b < seg.e; ++b) {
        const int m = b - seg.s + 1;
        double left = 0.0, right = 0.0;
        for (int t = 0; t < m; ++t) left += y[t];
        for (int t = m; t < n; ++t) right += y[t];
        const double wl = std::sqrt(static_cast<double>(n - m) / (static_cast<double>(n) * m));
        const double wr = std::sqrt(static_cast<double>(m) / (static_cast<double>(n) * (n - m)));
        out[b - seg.s] = std::abs(wl * left - wr * right) / mean;
    }
    return out;
}

std::vector<double> random_nonnegative(rng::Rng& gen, int n) {
    std::vector<double> y(n);
    for (auto& v : y) {
        const double z = gen.normal();
        v = z * z * gen.uniform(0.1, 5.0);
    }
    return y;
}

} // namespace

TEST_CASE("constant sequence gives a zero curve") {
    const std::vector<double> y{5, 5, 5, 5};
    const auto curve = cusum_curve(y, {0, 3});
    REQUIRE(curve.values.size() == 3);
    for (double v : curve.values) REQUIRE(v == 0.0);
}

TEST_CASE("hand-evaluated step") {
    const std::vector<double> y{1, 1, 4, 4};
    const auto curve = cusum_curve(y, {0, 3});
    // |0.5 * 2 - 0.5 * 8| / 2.5
    REQUIRE_THAT(curve.at(1), Catch::Matchers::WithinAbs(1.2, 1e-14));
}

TEST_CASE("scale invariance of the normalized statistic") {
    const std::vector<double> y{2, 2, 8, 8};
    const auto curve = cusum_curve(y, {0, 3});
    REQUIRE_THAT(curve.at(1), Catch::Matchers::WithinAbs(1.2, 1e-14));

    rng::Rng gen(7);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 3 + gen.uniform_int(60);
        auto y1 = random_nonnegative(gen, n);
        const double c = gen.uniform(0.01, 100.0);
        auto y2 = y1;
        for (auto& v : y2) v *= c;
        const Segment seg{10, 10 + n - 1};
        const auto c1 = cusum_curve(y1, seg);
        const auto c2 = cusum_curve(y2, seg);
        for (std::size_t i = 0; i < c1.values.size(); ++i)
            REQUIRE_THAT(c2.values[i],
                         Catch::Matchers::WithinRel(c1.values[i], 1e-12) ||
                             Catch::Matchers::WithinAbs(c1.values[i], 1e-14));
    }
}

TEST_CASE("fast curve matches the two-loop oracle") {
    rng::Rng gen(42);
    for (int rep = 0; rep < 500; ++rep) {
        const int n = 2 + gen.uniform_int(63);
        const int s = gen.uniform_int(100);
        const Segment seg{s, s + n - 1};
        const auto y = random_nonnegative(gen, n);
        const auto fast = cusum_curve(y, seg);
        const auto slow = brute_force_curve(y, seg);
        for (std::size_t i = 0; i < slow.size(); ++i)
            REQUIRE_THAT(fast.values[i], Catch::Matchers::WithinRel(slow[i], 1e-10) ||
                                             Catch::Matchers::WithinAbs(slow[i], 1e-12));
    }
}

TEST_CASE("reversal mirrors the curve") {
    rng::Rng gen(3);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + gen.uniform_int(100);
        const auto y = random_nonnegative(gen, n);
        std::vector<double> rev(y.rbegin(), y.rend());
        const Segment seg{0, n - 1};
        const auto fwd = cusum_curve(y, seg);
        const auto bwd = cusum_curve(rev, seg);
        for (int b = 0; b < n - 1; ++b) {
            const int mirrored = n - 2 - b;
            REQUIRE_THAT(bwd.values[b], Catch::Matchers::WithinRel(fwd.values[mirrored], 1e-10) ||
                                            Catch::Matchers::WithinAbs(fwd.values[mirrored], 1e-12));
        }
    }
}

TEST_CASE("error paths") {
    const std::vector<double> zeros{0, 0, 0, 0};
    REQUIRE_THROWS_AS(cusum_curve(zeros, Segment{0, 3}), DegenerateInput);
    const std::vector<double> negative{1, -1, 2, 3};
    REQUIRE_THROWS_AS(cusum_curve(negative, Segment{0, 3}), std::domain_error);
    REQUIRE_THROWS_AS(cusum_curve(std::vector<double>{1, 2}, Segment{3, 3}), std::invalid_argument);
    REQUIRE_THROWS_AS(cusum_curve(std::vector<double>{1, 2, 3}, Segment{0, 3}),
                      std::invalid_argument);
}

TEST_CASE("single-split evaluation agrees with the curve") {
    rng::Rng gen(11);
    const int n = 40;
    const auto y = random_nonnegative(gen, n);
    const Segment seg{5, 5 + n - 1};
    const auto curve = cusum_curve(y, seg);
    for (int b = seg.s; b < seg.e; ++b)
        REQUIRE_THAT(cusum_value_at(y, seg, b), Catch::Matchers::WithinRel(curve.at(b), 1e-12) ||
                                                    Catch::Matchers::WithinAbs(curve.at(b), 1e-14));
    // The unnormalized contrast recovers through the mean level.
    const double contrast = cusum_contrast_at(y, seg, seg.s + 7);
    REQUIRE_THAT(contrast / curve.mean_level,
                 Catch::Matchers::WithinRel(curve.at(seg.s + 7), 1e-12));
}

TEST_CASE("aggregation examples") {
    CusumCurve a, b;
    a.segment = b.segment = Segment{0, 2};
    a.values = {1.5, 0.2};
    b.values = {0.5, 0.1};
    a.mean_level = b.mean_level = 1.0;
    const std::vector<double> pi{1.0, 1.0};

    const auto thr = aggregate({a, b}, pi, AggRule::thr);
    REQUIRE_THAT(thr.values[0], Catch::Matchers::WithinAbs(1.5, 1e-15));
    REQUIRE(thr.counts[0] == 1);
    REQUIRE(thr.values[1] == 0.0);
    REQUIRE(thr.counts[1] == 0);
    REQUIRE_FALSE(thr.pass_at(1));

    // All below threshold: identically zero aggregate.
    const std::vector<double> high{10.0, 10.0};
    const auto dead = aggregate({a, b}, high, AggRule::thr);
    for (double v : dead.values) REQUIRE(v == 0.0);

    // Single-curve avg and max reproduce the input.
    const auto avg1 = aggregate({a}, std::vector<double>{1.0}, AggRule::avg);
    const auto max1 = aggregate({a}, std::vector<double>{1.0}, AggRule::max);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        REQUIRE(avg1.values[i] == a.values[i]);
        REQUIRE(max1.values[i] == a.values[i]);
    }
}

TEST_CASE("aggregation bounds hold on random curves") {
    rng::Rng gen(5);
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 1 + gen.uniform_int(8);
        const int len = 2 + gen.uniform_int(30);
        std::vector<CusumCurve> curves(d);
        std::vector<double> pi(d);
        for (int k = 0; k < d; ++k) {
            curves[k].segment = Segment{0, len};
            curves[k].mean_level = 1.0;
            curves[k].values.resize(len);
            for (auto& v : curves[k].values) v = gen.uniform(0.0, 3.0);
            pi[k] = gen.uniform(0.2, 2.0);
        }
        const auto thr = aggregate(curves, pi, AggRule::thr);
        const auto mx = aggregate(curves, pi, AggRule::max);
        const double pi_max = *std::max_element(pi.begin(), pi.end());
        for (int b = 0; b < len; ++b) {
            double total = 0.0;
            for (int k = 0; k < d; ++k) {
                total += curves[k].values[b];
                const double own = curves[k].values[b] > pi[k] ? curves[k].values[b] : 0.0;
                REQUIRE(thr.values[b] >= own - 1e-12);
            }
            REQUIRE(thr.values[b] <= total + 1e-12);
            if (mx.values[b] > pi_max) {
                REQUIRE(thr.values[b] >= mx.values[b] - pi_max - 1e-12);
                REQUIRE(thr.values[b] >= -1e-12);
            }
        }
    }
}

TEST_CASE("aggregate rejects malformed input") {
    CusumCurve a, b;
    a.segment = Segment{0, 4};
    b.segment = Segment{1, 5};
    a.values.assign(4, 1.0);
    b.values.assign(4, 1.0);
    REQUIRE_THROWS_AS(aggregate({a, b}, std::vector<double>{1.0, 1.0}, AggRule::thr),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(aggregate({}, std::vector<double>{}, AggRule::thr), std::invalid_argument);
}
