#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbseg/series.hpp"
#include "sbseg/wavelet.hpp"

namespace sbseg {

/// Right-continuous piecewise-constant function on [0, 1]:
/// value values[r] on [breakpoints[r-1], breakpoints[r]), breakpoints strictly
/// increasing inside (0, 1).
struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> values{0.0};

    double at(double z) const;
    bool is_constant() const { return breakpoints.empty(); }
    static PiecewiseConstant constant(double v) { return PiecewiseConstant{{}, {v}}; }
    static PiecewiseConstant step(double before, double z, double after) {
        return PiecewiseConstant{{z}, {before, after}};
    }
};

/// A p-variate locally stationary wavelet process over scales -1..-depth:
/// transfer functions W_i^(j)(z) and cross-correlations Sigma_i^(j,l)(z)
/// (unit diagonal implied). The derived spectra are
///   S_i^(j)(z) = W_i^(j)(z)^2 and S_i^(j,l)(z) = W_i^(j) W_i^(l) Sigma_i^(j,l).
struct LswSpec {
    int p = 1;
    int depth = 1;
    // transfer[j][a], a = 0 for scale -1, ..., depth-1 for scale -depth.
    std::vector<std::vector<PiecewiseConstant>> transfer;
    // cross[q][a] for pairs j < l in lexicographic order.
    std::vector<std::vector<PiecewiseConstant>> cross;
    std::optional<double> envelope; // declared C for |W_i| <= C * 2^{i/2}

    static LswSpec zeros(int p, int depth);
    /// S_i = 2^i on every scale, a unit-variance white-noise target.
    static LswSpec white_noise(int depth);

    int scale_index(int scale) const { return -scale - 1; }
    int pair_index(int j, int l) const;

    PiecewiseConstant& w(int j, int scale) { return transfer[j][scale_index(scale)]; }
    const PiecewiseConstant& w(int j, int scale) const { return transfer[j][scale_index(scale)]; }
    PiecewiseConstant& sigma(int j, int l, int scale);
    const PiecewiseConstant& sigma(int j, int l, int scale) const;

    /// Spectrum S_i^(j,l)(z); j == l gives the squared transfer function.
    double spectrum(int j, int l, int scale, double z) const;

    /// Check shape, the PSD of every constant piece of Sigma_i, and the
    /// envelope when declared. Throws std::invalid_argument naming the
    /// offending (scale, piece).
    void validate() const;

    /// Union of breakpoints of every W and Sigma, sorted, unique.
    std::vector<double> breakpoints() const;
    /// Discrete change-point locations implied at length T: the last index
    /// before each breakpoint takes effect.
    std::vector<int> truth_locations(int T) const;

    /// Plain-text description, one `w`/`sigma` line per non-zero function.
    static LswSpec parse(std::istream& in, const std::string& name = "<stream>");
    static LswSpec parse_file(const std::string& path);
    void save(std::ostream& out) const;
};

/// Draw the process: X^(j)_t = sum_i sum_k W_i^(j)(k/T) psi_{i,t-k} xi^(j)_{i,k}
/// with xi_{i,k} ~ N_p(0, Sigma_i(k/T)), innovations shared across components
/// at each (i, k). All k whose support overlaps [0, T-1] contribute; z = k/T
/// is clamped to [0, 1]. Same seed gives bitwise-identical output for any
/// thread count.
MultivariateSeries simulate(const LswSpec& spec, int T, std::uint64_t seed, int threads = 1);

/// Local (cross-)autocovariance c^(j,l)(z, tau) = sum_i S_i^(j,l)(z) Psi_i(tau),
/// exact for the truncated model.
double local_autocov(const LswSpec& spec, int j, int l, double z, long tau);

/// Limit of the expected scale-i periodogram:
/// beta_i^(j,l)(z) = sum_{i'} S_{i'}^(j,l)(z) A_{i,i'}.
double expected_periodogram(const LswSpec& spec, int j, int l, int scale, double z);

} // namespace sbseg
