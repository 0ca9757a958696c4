#include "sbseg/wavelet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sbseg {
namespace {

void check_scale(int scale) {
    if (scale > -1 || scale < -30) throw std::invalid_argument("scale must lie in [-30, -1]");
}

struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

int wavelet_support(int scale) {
    check_scale(scale);
    return 1 << (-scale);
}

double haar_psi(int scale, long k) {
    check_scale(scale);
    const long support = 1L << (-scale);
    if (k < 0 || k >= support) return 0.0;
    const double amp = std::exp2(0.5 * scale);
    return k < support / 2 ? amp : -amp;
}

WaveletCoeffs haar_coefficients(std::span<const double> x, int scale) {
    check_scale(scale);
    const int T = static_cast<int>(x.size());
    const int support = wavelet_support(scale);
    const int half = support / 2;
    if (T < support)
        throw std::invalid_argument("series length " + std::to_string(T) +
                                    " below wavelet support " + std::to_string(support));

    WaveletCoeffs out;
    out.scale = scale;
    out.t0 = support - 1;
    out.values.resize(T - support + 1);
    const double amp = std::exp2(0.5 * scale);

    // Sliding block sums, rebuilt periodically so drift cannot accumulate.
    double recent = 0.0; // x[t-half+1 .. t]
    double older = 0.0;  // x[t-support+1 .. t-half]
    constexpr int refresh = 1024;
    for (int t = support - 1; t < T; ++t) {
        if ((t - (support - 1)) % refresh == 0) {
            Kahan r, o;
            for (int u = t - half + 1; u <= t; ++u) r.add(x[u]);
            for (int u = t - support + 1; u <= t - half; ++u) o.add(x[u]);
            recent = r.sum;
            older = o.sum;
        } else {
            recent += x[t] - x[t - half];
            older += x[t - half] - x[t - support];
        }
        out.values[t - (support - 1)] = amp * (recent - older);
    }
    return out;
}

double autocorr_wavelet(int scale, long tau) {
    check_scale(scale);
    const double support = std::exp2(-scale);
    const double a = std::abs(static_cast<double>(tau));
    if (a >= support) return 0.0;
    if (2.0 * a <= support) return 1.0 - 3.0 * a / support;
    return a / support - 1.0;
}

double cross_autocorr_wavelet(int scale_a, int scale_b, long tau) {
    check_scale(scale_a);
    check_scale(scale_b);
    const long la = 1L << (-scale_a);
    double sum = 0.0;
    for (long k = 0; k < la; ++k) sum += haar_psi(scale_a, k) * haar_psi(scale_b, k + tau);
    return sum;
}

InnerProductMatrix::InnerProductMatrix(int depth) : depth_(depth) {
    if (depth < 1 || depth > 20)
        throw std::invalid_argument("inner product matrix depth must lie in [1, 20]");
    a_.assign(static_cast<std::size_t>(depth) * depth, 0.0);
    for (int a = 0; a < depth; ++a) {
        for (int b = a; b < depth; ++b) {
            const int ia = -(a + 1);
            const int ib = -(b + 1);
            // Product support is the finer scale's support.
            const long reach = 1L << std::min(-ia, -ib);
            Kahan acc;
            acc.add(autocorr_wavelet(ia, 0) * autocorr_wavelet(ib, 0));
            for (long tau = 1; tau < reach; ++tau)
                acc.add(2.0 * autocorr_wavelet(ia, tau) * autocorr_wavelet(ib, tau));
            a_[static_cast<std::size_t>(a) * depth_ + b] = acc.sum;
            a_[static_cast<std::size_t>(b) * depth_ + a] = acc.sum;
        }
    }
}

double InnerProductMatrix::at(int scale_a, int scale_b) const {
    const int a = -scale_a - 1;
    const int b = -scale_b - 1;
    if (a < 0 || a >= depth_ || b < 0 || b >= depth_)
        throw std::out_of_range("inner product matrix scale out of range");
    return at_index(a, b);
}

InnerProductMatrix inner_product_matrix(int depth) { return InnerProductMatrix(depth); }

std::vector<double> beta_transform(std::span<const double> spectrum, const InnerProductMatrix& a) {
    const int depth = a.depth();
    if (static_cast<int>(spectrum.size()) != depth)
        throw std::invalid_argument("beta_transform: spectrum must cover the matrix scales");
    std::vector<double> beta(depth, 0.0);
    for (int i = 0; i < depth; ++i) {
        Kahan acc;
        for (int k = 0; k < depth; ++k) acc.add(spectrum[k] * a.at_index(i, k));
        beta[i] = acc.sum;
    }
    return beta;
}

std::vector<double> beta_inverse(std::span<const double> beta, const InnerProductMatrix& a) {
    const int depth = a.depth();
    if (static_cast<int>(beta.size()) != depth)
        throw std::invalid_argument("beta_inverse: input must cover the matrix scales");
    Eigen::MatrixXd m(depth, depth);
    Eigen::VectorXd rhs(depth);
    for (int i = 0; i < depth; ++i) {
        rhs(i) = beta[i];
        for (int k = 0; k < depth; ++k) m(i, k) = a.at_index(i, k);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw std::runtime_error("beta_inverse: singular truncated matrix");
    Eigen::VectorXd x = lu.solve(rhs);
    return std::vector<double>(x.data(), x.data() + depth);
}

PeriodogramPanel::PeriodogramPanel(const MultivariateSeries& x, int scale) : p_(x.p), scale_(scale) {
    check_scale(scale);
    if (p_ < 1) throw std::invalid_argument("PeriodogramPanel: empty series");
    d_ = p_ + p_ * (p_ - 1) / 2;
    coeffs_.reserve(p_);
    for (int j = 0; j < p_; ++j) coeffs_.push_back(haar_coefficients(x.series(j), scale));
    t0_ = coeffs_.front().t0;
    t_end_ = coeffs_.front().t_end();
    if (t_end_ - t0_ + 1 < 2) throw std::invalid_argument("PeriodogramPanel: too few coefficients");

    const int len = t_end_ - t0_ + 1;
    prefix_w_.assign(p_, std::vector<double>(len + 1, 0.0));
    prefix_ww_.assign(p_, std::vector<double>(len + 1, 0.0));
    for (int j = 0; j < p_; ++j) {
        Kahan sw, sww;
        for (int m = 0; m < len; ++m) {
            const double w = coeffs_[j].values[m];
            sw.add(w);
            sww.add(w * w);
            prefix_w_[j][m + 1] = sw.sum;
            prefix_ww_[j][m + 1] = sww.sum;
        }
    }
}

std::pair<int, int> PeriodogramPanel::pair_of(int k) const {
    if (k < 0 || k >= d_) throw std::out_of_range("PeriodogramPanel: sequence index");
    if (k < p_) return {k, k};
    int q = k - p_;
    for (int j = 0; j < p_ - 1; ++j) {
        const int row = p_ - 1 - j;
        if (q < row) return {j, j + 1 + q};
        q -= row;
    }
    throw std::logic_error("PeriodogramPanel: pair unranking failure");
}

std::string PeriodogramPanel::label(int k) const {
    const auto [j, l] = pair_of(k);
    if (j == l) return "I(" + std::to_string(j + 1) + ")@" + std::to_string(scale_);
    return "C(" + std::to_string(j + 1) + "," + std::to_string(l + 1) + ")@" + std::to_string(scale_);
}

double PeriodogramPanel::pair_covariance(int j, int l, Segment segment) const {
    const int a = segment.s - t0_;
    const int b = segment.e - t0_;
    const int n = segment.n();
    Kahan prod;
    const auto& wj = coeffs_[j].values;
    const auto& wl = coeffs_[l].values;
    for (int m = a; m <= b; ++m) prod.add(wj[m] * wl[m]);
    const double sj = prefix_w_[j][b + 1] - prefix_w_[j][a];
    const double sl = prefix_w_[l][b + 1] - prefix_w_[l][a];
    return prod.sum - sj * sl / n;
}

int PeriodogramPanel::sign_for(int j, int l, Segment segment) const {
    if (segment.s < t0_ || segment.e > t_end_)
        throw std::invalid_argument("PeriodogramPanel: segment outside domain");
    const auto key = std::make_tuple(j, l, segment.s, segment.e);
    {
        std::lock_guard<std::mutex> lock(sign_mutex_);
        auto it = sign_cache_.find(key);
        if (it != sign_cache_.end()) return it->second;
    }
    const int a = segment.s - t0_;
    const int b = segment.e - t0_;
    const int n = segment.n();
    const double var_j =
        prefix_ww_[j][b + 1] - prefix_ww_[j][a] -
        (prefix_w_[j][b + 1] - prefix_w_[j][a]) * (prefix_w_[j][b + 1] - prefix_w_[j][a]) / n;
    const double var_l =
        prefix_ww_[l][b + 1] - prefix_ww_[l][a] -
        (prefix_w_[l][b + 1] - prefix_w_[l][a]) * (prefix_w_[l][b + 1] - prefix_w_[l][a]) / n;
    int sign = 1;
    if (var_j <= 0.0 || var_l <= 0.0) {
        sign_warning_ = true; // zero-variance segment, fall back to +1
    } else {
        sign = pair_covariance(j, l, segment) < 0.0 ? -1 : 1;
    }
    std::lock_guard<std::mutex> lock(sign_mutex_);
    sign_cache_.emplace(key, sign);
    return sign;
}

double PeriodogramPanel::raw_cross(int j, int l, int t) const {
    return coeffs_[j].at(t) * coeffs_[l].at(t);
}

void PeriodogramPanel::values(int k, Segment segment, std::span<double> out) const {
    if (segment.s < t0_ || segment.e > t_end_)
        throw std::invalid_argument("PeriodogramPanel: segment outside domain");
    if (static_cast<int>(out.size()) != segment.n())
        throw std::invalid_argument("PeriodogramPanel: output span size mismatch");
    const auto [j, l] = pair_of(k);
    const int a = segment.s - t0_;
    const int n = segment.n();
    const auto& wj = coeffs_[j].values;
    if (j == l) {
        for (int m = 0; m < n; ++m) {
            const double w = wj[a + m];
            out[m] = w * w;
        }
        return;
    }
    const double sign = sign_for(j, l, segment);
    const auto& wl = coeffs_[l].values;
    for (int m = 0; m < n; ++m) {
        const double diff = wj[a + m] - sign * wl[a + m];
        out[m] = diff * diff;
    }
}

void PeriodogramPanel::write_csv(std::ostream& out) const {
    out.precision(17);
    out << "t";
    for (int k = 0; k < d_; ++k) out << ',' << label(k);
    out << '\n';
    const Segment full = full_segment();
    std::vector<std::vector<double>> cols(d_, std::vector<double>(full.n()));
    for (int k = 0; k < d_; ++k) values(k, full, cols[k]);
    for (int t = t0_; t <= t_end_; ++t) {
        out << t;
        for (int k = 0; k < d_; ++k) out << ',' << cols[k][t - t0_];
        out << '\n';
    }
}

} // namespace sbseg
