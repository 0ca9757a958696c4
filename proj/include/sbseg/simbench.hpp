#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbseg/mvts.hpp"
#include "sbseg/series.hpp"

namespace sbseg {

/// The simulation-study generators: piecewise AR panels (M1), factor models
/// (M2), a moment-matched MA/AR switch (M3), a short leading segment (M4),
/// the two motivating constructions (A: one change-carrying series in a large
/// panel, B: panel-wide spuriously large statistics), and a stationary null.
enum class ModelId { m1_1, m1_2, m2_1, m2_2, m3, m4, example_a, example_b, null_model };

std::string to_string(ModelId id);
ModelId model_from_string(const std::string& name);

struct ModelSpec {
    ModelId id = ModelId::null_model;
    int p = 50;
    int T = 1024;
    double rho = 1.0; // fraction of series carrying changes
    std::uint64_t seed = 0;
    bool jitter = false; // desynchronize per-series change times in a 2*log(T) window

    void validate() const;
};

/// Draw a panel with truth metadata (locations and per-event changed series).
MultivariateSeries generate(const ModelSpec& spec);

/// Detection bookkeeping against known truth.
struct EvalReport {
    int n_hat = 0;
    std::vector<std::uint8_t> detected; // per truth location
    std::vector<int> errors;            // matched |error| per truth, -1 if unmatched

    double detection_rate() const;
};

/// Greedy nearest-first one-to-one matching of estimates to truths; a truth
/// counts as detected when its match lies within tolerance.
EvalReport evaluate(const std::vector<int>& estimates, const std::vector<int>& truth, int tolerance);

struct BenchRow {
    ModelSpec spec;
    AggRule rule = AggRule::thr;
    int reps = 0;
    double mean_nhat = 0.0;
    double sd_nhat = 0.0;
    std::vector<double> det_pct; // per truth location
};

/// Replicate the model reps times (seeds spec.seed, spec.seed+1, ...), run the
/// pipeline once per rule on shared per-rep thresholds, and summarize as the
/// benchmark table rows. Tolerance is floor(sqrt(T)/2).
std::vector<BenchRow> run_benchmark(const ModelSpec& spec, const std::vector<AggRule>& rules,
                                    int reps, const CalibrationConfig& calibration = {},
                                    int threads = 1);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_bench_report(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace sbseg
