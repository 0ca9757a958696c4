// Command-line front end for the segmentation library: simulate panels,
// calibrate thresholds, segment CSV series, dump statistic curves, and run
// the benchmark grid. Exit codes: 0 ok, 2 usage, 3 parse, 4 validation,
// 5 runtime.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sbseg/csv.hpp"
#include "sbseg/json_io.hpp"
#include "sbseg/lsw.hpp"
#include "sbseg/mvts.hpp"
#include "sbseg/parallel.hpp"
#include "sbseg/simbench.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_parse = 3;
constexpr int exit_validation = 4;
constexpr int exit_runtime = 5;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

struct CommonOpts {
    std::uint64_t seed = 0;
    int threads = 0; // 0: SBSEG_THREADS or 1
    int resolved_threads() const { return threads > 0 ? threads : sbseg::default_threads(); }
};

struct MvtsOpts {
    double alpha = 2.0;
    int delta = 0;
    int lambda = 0;
    std::string rule = "thr";
    double quantile = 0.99;
    int R = 100;
    double gamma = 0.499;

    sbseg::MvtsConfig to_config(const CommonOpts& common) const {
        sbseg::MvtsConfig cfg;
        cfg.alpha = alpha;
        cfg.delta = delta;
        cfg.lambda = lambda;
        cfg.rule = sbseg::agg_rule_from_string(rule);
        cfg.calibration.quantile = quantile;
        cfg.calibration.R = R;
        cfg.calibration.gamma = gamma;
        cfg.calibration.seed = common.seed;
        cfg.threads = common.resolved_threads();
        return cfg;
    }
};

void add_mvts_flags(CLI::App* cmd, MvtsOpts& opts) {
    cmd->add_option("--alpha", opts.alpha, "Scale-depth constant");
    cmd->add_option("--delta", opts.delta, "Spurious-spike window (0: floor(sqrt(T)/2))");
    cmd->add_option("--lambda", opts.lambda, "Across-scale cluster diameter (0: floor(sqrt(T)/2))");
    cmd->add_option("--rule", opts.rule, "Aggregation rule: thr | avg | max");
    cmd->add_option("--quantile", opts.quantile, "Calibration quantile level");
    cmd->add_option("--R", opts.R, "Calibration null replications");
    cmd->add_option("--gamma", opts.gamma, "Threshold rate exponent");
}

int cmd_simulate(const std::string& model, const std::string& spec_file, int p, int T, double rho,
                 bool jitter, const CommonOpts& common, const std::string& out_path) {
    sbseg::MultivariateSeries x;
    std::string model_name;
    double rho_out = rho;
    if (!spec_file.empty()) {
        const sbseg::LswSpec spec = sbseg::LswSpec::parse_file(spec_file);
        x = sbseg::simulate(spec, T, common.seed, common.resolved_threads());
        model_name = "lsw:" + spec_file;
        rho_out = 1.0;
    } else {
        sbseg::ModelSpec spec;
        spec.id = sbseg::model_from_string(model);
        spec.p = p;
        spec.T = T;
        spec.rho = rho;
        spec.seed = common.seed;
        spec.jitter = jitter;
        x = sbseg::generate(spec);
        model_name = model;
    }
    sbseg::write_series_csv_file(out_path, x);
    auto sidecar = open_out(out_path + ".truth.json");
    sbseg::write_truth_json(sidecar, x, model_name, rho_out, common.seed);
    std::cout << "wrote " << out_path << " (" << x.p << " x " << x.T << ") and " << out_path
              << ".truth.json\n";
    return exit_ok;
}

int cmd_segment(const std::string& input, const std::string& out_path, const MvtsOpts& opts,
                const CommonOpts& common, const std::string& thresholds_in,
                const std::string& thresholds_out, const std::string& dump_prefix) {
    const sbseg::MultivariateSeries x = sbseg::read_series_csv_file(input);
    sbseg::MvtsConfig cfg = opts.to_config(common);

    std::optional<sbseg::ThresholdTable> table;
    if (!thresholds_in.empty()) {
        std::ifstream in(thresholds_in);
        if (!in) throw std::runtime_error("cannot open " + thresholds_in);
        table = sbseg::ThresholdTable::read_csv(in, thresholds_in);
    }
    const sbseg::MvtsResult result = sbseg::sbs_mvts(x, cfg, table ? &*table : nullptr);

    if (!thresholds_out.empty()) {
        auto out = open_out(thresholds_out);
        result.thresholds.write_csv(out);
    }
    if (!dump_prefix.empty()) {
        for (int scale : result.scales) {
            sbseg::PeriodogramPanel panel(x, scale);
            std::vector<double> buf(panel.full_segment().n());
            std::vector<sbseg::CusumCurve> curves(panel.count());
            const sbseg::WeightTable weights(panel.full_segment().n());
            for (int k = 0; k < panel.count(); ++k) {
                panel.values(k, panel.full_segment(), buf);
                curves[k] = sbseg::cusum_curve(buf, panel.full_segment(), weights);
            }
            const auto agg = sbseg::aggregate(
                curves, result.thresholds.scale_thresholds(x.p, scale), cfg.rule);
            auto out = open_out(dump_prefix + ".scale" + std::to_string(-scale) + ".csv");
            out.precision(17);
            out << "b,value" << (cfg.rule == sbseg::AggRule::thr ? ",count" : "") << "\n";
            for (int b = agg.segment.s; b < agg.segment.e; ++b) {
                out << b << ',' << agg.at(b);
                if (cfg.rule == sbseg::AggRule::thr) out << ',' << agg.counts[b - agg.segment.s];
                out << '\n';
            }
        }
    }
    auto out = open_out(out_path);
    sbseg::write_mvts_result_json(out, result, x.T, cfg.rule);
    std::cout << "wrote " << out_path << " (" << result.merged.size() << " change points)\n";
    return exit_ok;
}

int cmd_calibrate(const std::string& input, const std::string& out_path, const MvtsOpts& opts,
                  const CommonOpts& common) {
    const sbseg::MultivariateSeries x = sbseg::read_series_csv_file(input);
    const sbseg::MvtsConfig cfg = opts.to_config(common);
    std::vector<int> scales;
    for (int s = -1; s >= sbseg::finest_scale_limit(cfg.alpha, x.T); --s) scales.push_back(s);
    const auto table = sbseg::calibrate_thresholds(x, scales, cfg.calibration, cfg.threads);
    auto out = open_out(out_path);
    table.write_csv(out);
    std::cout << "wrote " << out_path << " (" << table.entries.size() << " entries)\n";
    return exit_ok;
}

int cmd_bench(const std::string& model, int p, int T, double rho, bool jitter, int reps,
              const std::string& rules_csv, const MvtsOpts& opts, const CommonOpts& common,
              const std::string& out_path, const std::string& report_path) {
    sbseg::ModelSpec spec;
    spec.id = sbseg::model_from_string(model);
    spec.p = p;
    spec.T = T;
    spec.rho = rho;
    spec.seed = common.seed;
    spec.jitter = jitter;

    std::vector<sbseg::AggRule> rules;
    std::stringstream ss(rules_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) rules.push_back(sbseg::agg_rule_from_string(tok));

    sbseg::CalibrationConfig calibration;
    calibration.quantile = opts.quantile;
    calibration.R = opts.R;
    calibration.gamma = opts.gamma;

    const auto rows = sbseg::run_benchmark(spec, rules, reps, calibration, common.resolved_threads());
    auto out = open_out(out_path);
    sbseg::write_bench_csv(out, rows);
    if (!report_path.empty()) {
        auto report = open_out(report_path);
        sbseg::write_bench_report(report, rows);
    }
    sbseg::write_bench_report(std::cout, rows);
    return exit_ok;
}

int cmd_cusum(const std::string& input, const std::string& out_path, int scale, int sequence,
              const std::string& rule_name, const std::string& thresholds_in,
              const CommonOpts& common) {
    const sbseg::MultivariateSeries x = sbseg::read_series_csv_file(input);
    sbseg::PeriodogramPanel panel(x, scale);
    const sbseg::Segment full = panel.full_segment();
    const sbseg::WeightTable weights(full.n());
    std::vector<double> buf(full.n());
    auto out = open_out(out_path);
    out.precision(17);

    if (sequence >= 0) {
        if (sequence >= panel.count())
            throw std::invalid_argument("sequence index out of range (panel has " +
                                        std::to_string(panel.count()) + ")");
        panel.values(sequence, full, buf);
        const auto curve = sbseg::cusum_curve(buf, full, weights);
        out << "b,value\n";
        for (int b = full.s; b < full.e; ++b) out << b << ',' << curve.at(b) << '\n';
        std::cout << "wrote " << out_path << " (" << panel.label(sequence) << ")\n";
        return exit_ok;
    }

    sbseg::ThresholdTable table;
    if (!thresholds_in.empty()) {
        std::ifstream in(thresholds_in);
        if (!in) throw std::runtime_error("cannot open " + thresholds_in);
        table = sbseg::ThresholdTable::read_csv(in, thresholds_in);
    } else {
        sbseg::CalibrationConfig calibration;
        calibration.seed = common.seed;
        const std::vector<int> scales{scale};
        table = sbseg::calibrate_thresholds(x, scales, calibration, common.resolved_threads());
    }
    const auto rule = sbseg::agg_rule_from_string(rule_name);
    std::vector<sbseg::CusumCurve> curves(panel.count());
    for (int k = 0; k < panel.count(); ++k) {
        panel.values(k, full, buf);
        curves[k] = sbseg::cusum_curve(buf, full, weights);
    }
    const auto agg = sbseg::aggregate(curves, table.scale_thresholds(x.p, scale), rule);
    out << "b,value" << (rule == sbseg::AggRule::thr ? ",count" : "") << "\n";
    for (int b = full.s; b < full.e; ++b) {
        out << b << ',' << agg.at(b);
        if (rule == sbseg::AggRule::thr) out << ',' << agg.counts[b - full.s];
        out << '\n';
    }
    std::cout << "wrote " << out_path << " (aggregated, rule " << rule_name << ")\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-point segmentation for high-dimensional time series"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", common.threads, "Worker threads (default: SBSEG_THREADS or 1)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a panel as CSV plus a truth sidecar");
    std::string sim_model = "null", sim_spec, sim_out = "series.csv";
    int sim_p = 3, sim_T = 1024;
    double sim_rho = 1.0;
    bool sim_jitter = false;
    sim->add_option("--model", sim_model, "M1.1|M1.2|M2.1|M2.2|M3|M4|A|B|null");
    sim->add_option("--spec", sim_spec, "Process description file (overrides --model)");
    sim->add_option("--p", sim_p, "Components");
    sim->add_option("--T", sim_T, "Length");
    sim->add_option("--rho", sim_rho, "Change sparsity");
    sim->add_flag("--jitter", sim_jitter, "Desynchronize change times");
    sim->add_option("--out", sim_out, "Output CSV path");

    // segment
    auto* seg = app.add_subcommand("segment", "Detect change points in a CSV series");
    std::string seg_in, seg_out = "changepoints.json", seg_thr_in, seg_thr_out, seg_dump;
    MvtsOpts seg_opts;
    seg->add_option("--input", seg_in, "Input CSV (rows = time)")->required();
    seg->add_option("--out", seg_out, "Output JSON path");
    seg->add_option("--thresholds", seg_thr_in, "Reuse a calibrated threshold table");
    seg->add_option("--save-thresholds", seg_thr_out, "Write the threshold table used");
    seg->add_option("--dump-curves", seg_dump, "Prefix for per-scale aggregated curve CSVs");
    add_mvts_flags(seg, seg_opts);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Calibrate per-sequence thresholds");
    std::string cal_in, cal_out = "thresholds.csv";
    MvtsOpts cal_opts;
    cal->add_option("--input", cal_in, "Input CSV (rows = time)")->required();
    cal->add_option("--out", cal_out, "Output CSV path");
    add_mvts_flags(cal, cal_opts);

    // bench
    auto* bench = app.add_subcommand("bench", "Run the simulation benchmark");
    std::string bench_model = "M3", bench_rules = "thr,avg,max", bench_out = "bench.csv",
                bench_report;
    int bench_p = 20, bench_T = 1024, bench_reps = 10;
    double bench_rho = 0.5;
    bool bench_jitter = false;
    MvtsOpts bench_opts;
    bench->add_option("--model", bench_model, "Model id");
    bench->add_option("--p", bench_p, "Components");
    bench->add_option("--T", bench_T, "Length");
    bench->add_option("--rho", bench_rho, "Change sparsity");
    bench->add_flag("--jitter", bench_jitter, "Desynchronize change times");
    bench->add_option("--reps", bench_reps, "Replications");
    bench->add_option("--rules", bench_rules, "Comma-separated rules");
    bench->add_option("--out", bench_out, "Output CSV path");
    bench->add_option("--report", bench_report, "Aligned-text report path");
    add_mvts_flags(bench, bench_opts);

    // cusum
    auto* cus = app.add_subcommand("cusum", "Dump statistic curves for a CSV series");
    std::string cus_in, cus_out = "curve.csv", cus_rule = "thr", cus_thr;
    int cus_scale = -1, cus_seq = -1;
    cus->add_option("--input", cus_in, "Input CSV (rows = time)")->required();
    cus->add_option("--out", cus_out, "Output CSV path");
    cus->add_option("--scale", cus_scale, "Wavelet scale (negative)");
    cus->add_option("--sequence", cus_seq, "Panel sequence index (default: aggregate)");
    cus->add_option("--rule", cus_rule, "Aggregation rule for the aggregate dump");
    cus->add_option("--thresholds", cus_thr, "Threshold table (default: calibrate)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_model, sim_spec, sim_p, sim_T, sim_rho, sim_jitter, common,
                                sim_out);
        if (seg->parsed())
            return cmd_segment(seg_in, seg_out, seg_opts, common, seg_thr_in, seg_thr_out, seg_dump);
        if (cal->parsed()) return cmd_calibrate(cal_in, cal_out, cal_opts, common);
        if (bench->parsed())
            return cmd_bench(bench_model, bench_p, bench_T, bench_rho, bench_jitter, bench_reps,
                             bench_rules, bench_opts, common, bench_out, bench_report);
        if (cus->parsed())
            return cmd_cusum(cus_in, cus_out, cus_scale, cus_seq, cus_rule, cus_thr, common);
    } catch (const sbseg::CsvError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
