#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "sbseg/panel.hpp"
#include "sbseg/series.hpp"

namespace sbseg {

/// Only Haar is implemented; the enum keeps the extension point visible.
enum class WaveletFamily { haar };

/// Discrete wavelet support length at scale i (i <= -1): 2^{-i}.
int wavelet_support(int scale);

/// Discrete Haar wavelet value psi_{i,k}: 2^{i/2} on the first half of the
/// support, -2^{i/2} on the second half, zero elsewhere.
double haar_psi(int scale, long k);

/// Empirical coefficients w_{i,t} = sum_u x_u psi_{i,t-u} at positions where
/// the support lies inside [0, T-1]; earlier positions are boundary-masked.
struct WaveletCoeffs {
    int scale = -1;
    int t0 = 0;                 // first unmasked position, = 2^{-i} - 1
    std::vector<double> values; // values[t - t0] for t in [t0, T-1]

    int t_end() const { return t0 + static_cast<int>(values.size()) - 1; }
    double at(int t) const { return values[t - t0]; }
};

WaveletCoeffs haar_coefficients(std::span<const double> x, int scale);

/// Autocorrelation wavelet Psi_i(tau) = sum_k psi_{i,k} psi_{i,k+tau}
/// (closed form for Haar: piecewise linear, unit at zero, support < 2^{-i}).
double autocorr_wavelet(int scale, long tau);

/// Cross-scale Psi_{i,i'}(tau) by direct summation over the finite support.
double cross_autocorr_wavelet(int scale_a, int scale_b, long tau);

/// Gram matrix A_{i,i'} = sum_tau Psi_i(tau) Psi_{i'}(tau) over scales
/// -1..-depth. Symmetric with strictly positive entries.
class InnerProductMatrix {
public:
    explicit InnerProductMatrix(int depth);

    int depth() const { return depth_; }
    /// Entry by scale pair, scales in [-depth, -1].
    double at(int scale_a, int scale_b) const;
    /// Entry by zero-based index, index 0 = scale -1.
    double at_index(int a, int b) const { return a_[static_cast<std::size_t>(a) * depth_ + b]; }

private:
    int depth_;
    std::vector<double> a_;
};

InnerProductMatrix inner_product_matrix(int depth);

/// beta_i = sum_{i'} S_{i'} A_{i,i'}, applied to one rescaled-time point.
/// Input and output are indexed by scale depth: element 0 = scale -1.
std::vector<double> beta_transform(std::span<const double> spectrum, const InnerProductMatrix& a);

/// Solve A x = beta; throws if the truncated matrix is singular (it is not,
/// for Haar, up to depth 20 -- asserted).
std::vector<double> beta_inverse(std::span<const double> beta, const InnerProductMatrix& a);

/// The scale-i periodogram panel of a p-variate series, arranged as a
/// PanelSource with d = p(p+1)/2: diagonal sequences I^(j) = w_j^2 first
/// (ascending j), then pairs j < l in lexicographic order carrying
///   (w_j - sign(cor(w_j, w_l | segment)) * w_l)^2,
/// the nonnegative multiplicative stand-in for the cross-periodogram. The
/// correlation sign is recomputed per requested segment and cached; sign(0)
/// and zero-variance segments fall back to +1 (the latter raises a warning
/// flag). Boundary-masked coefficient positions are excluded from the domain.
class PeriodogramPanel : public PanelSource {
public:
    PeriodogramPanel(const MultivariateSeries& x, int scale);

    int count() const override { return d_; }
    int t_begin() const override { return t0_; }
    int t_end() const override { return t_end_; }
    bool segment_dependent() const override { return p_ > 1; }
    void values(int k, Segment segment, std::span<double> out) const override;
    std::string label(int k) const override;

    int scale() const { return scale_; }
    int dimension() const { return p_; }

    /// Panel index helpers: k < p is diagonal j = k; k >= p maps to a pair.
    bool is_diagonal(int k) const { return k < p_; }
    std::pair<int, int> pair_of(int k) const;

    /// Sign of the coefficient correlation of a pair over a segment.
    int sign_for(int j, int l, Segment segment) const;
    /// Raw cross-periodogram w_j(t) * w_l(t), exposed for diagnostics.
    double raw_cross(int j, int l, int t) const;
    double coefficient(int j, int t) const { return coeffs_[j].at(t); }

    /// True if any sign computation so far hit a zero-variance segment.
    bool sign_warning() const { return sign_warning_; }

    /// rows = t, one column per panel sequence, header naming (j,l,i).
    void write_csv(std::ostream& out) const;

private:
    double pair_covariance(int j, int l, Segment segment) const;

    int p_;
    int d_;
    int scale_;
    int t0_;
    int t_end_;
    std::vector<WaveletCoeffs> coeffs_;
    // Kahan prefix sums of w and w^2 per component, over [t0, t_end].
    std::vector<std::vector<double>> prefix_w_;
    std::vector<std::vector<double>> prefix_ww_;
    mutable std::map<std::tuple<int, int, int, int>, int> sign_cache_;
    mutable std::mutex sign_mutex_;
    mutable bool sign_warning_ = false;
};

} // namespace sbseg
