#include "sbseg/lsw.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbseg/parallel.hpp"
#include "sbseg/rng.hpp"

namespace sbseg {

double PiecewiseConstant::at(double z) const {
    if (values.size() != breakpoints.size() + 1)
        throw std::invalid_argument("piecewise function: values/breakpoints mismatch");
    std::size_t idx = 0;
    while (idx < breakpoints.size() && z >= breakpoints[idx]) ++idx;
    return values[idx];
}

LswSpec LswSpec::zeros(int p, int depth) {
    LswSpec spec;
    spec.p = p;
    spec.depth = depth;
    spec.transfer.assign(p, std::vector<PiecewiseConstant>(depth, PiecewiseConstant::constant(0.0)));
    spec.cross.assign(static_cast<std::size_t>(p) * (p - 1) / 2,
                      std::vector<PiecewiseConstant>(depth, PiecewiseConstant::constant(0.0)));
    return spec;
}

LswSpec LswSpec::white_noise(int depth) {
    LswSpec spec = zeros(1, depth);
    for (int a = 0; a < depth; ++a)
        spec.transfer[0][a] = PiecewiseConstant::constant(std::exp2(0.5 * (-a - 1)));
    return spec;
}

int LswSpec::pair_index(int j, int l) const {
    if (j < 0 || l <= j || l >= p) throw std::out_of_range("pair index out of range");
    int idx = 0;
    for (int r = 0; r < j; ++r) idx += p - 1 - r;
    return idx + (l - j - 1);
}

PiecewiseConstant& LswSpec::sigma(int j, int l, int scale) {
    return cross[pair_index(j, l)][scale_index(scale)];
}

const PiecewiseConstant& LswSpec::sigma(int j, int l, int scale) const {
    return cross[pair_index(j, l)][scale_index(scale)];
}

double LswSpec::spectrum(int j, int l, int scale, double z) const {
    if (j == l) {
        const double w = transfer[j][scale_index(scale)].at(z);
        return w * w;
    }
    const int a = std::min(j, l);
    const int b = std::max(j, l);
    return transfer[a][scale_index(scale)].at(z) * transfer[b][scale_index(scale)].at(z) *
           sigma(a, b, scale).at(z);
}

namespace {

void check_piecewise(const PiecewiseConstant& f, const std::string& what) {
    if (f.values.size() != f.breakpoints.size() + 1)
        throw std::invalid_argument(what + ": values/breakpoints mismatch");
    for (std::size_t r = 0; r < f.breakpoints.size(); ++r) {
        const double z = f.breakpoints[r];
        if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument(what + ": breakpoint outside (0, 1)");
        if (r > 0 && !(z > f.breakpoints[r - 1]))
            throw std::invalid_argument(what + ": breakpoints not strictly increasing");
    }
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument(what + ": non-finite value");
}

std::vector<double> union_breakpoints(const std::vector<const PiecewiseConstant*>& fns) {
    std::vector<double> zs;
    for (const auto* f : fns) zs.insert(zs.end(), f->breakpoints.begin(), f->breakpoints.end());
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    return zs;
}

Eigen::MatrixXd sigma_matrix(const LswSpec& spec, int scale, double z) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(spec.p, spec.p);
    for (int j = 0; j < spec.p; ++j)
        for (int l = j + 1; l < spec.p; ++l) {
            const double v = spec.sigma(j, l, scale).at(z);
            m(j, l) = v;
            m(l, j) = v;
        }
    return m;
}

} // namespace

void LswSpec::validate() const {
    if (p < 1) throw std::invalid_argument("lsw spec: p must be positive");
    if (depth < 1 || depth > 25) throw std::invalid_argument("lsw spec: depth must lie in [1, 25]");
    if (static_cast<int>(transfer.size()) != p)
        throw std::invalid_argument("lsw spec: transfer rows != p");
    const std::size_t pairs = static_cast<std::size_t>(p) * (p - 1) / 2;
    if (cross.size() != pairs) throw std::invalid_argument("lsw spec: cross rows != p(p-1)/2");

    for (int j = 0; j < p; ++j) {
        if (static_cast<int>(transfer[j].size()) != depth)
            throw std::invalid_argument("lsw spec: transfer scales mismatch");
        for (int a = 0; a < depth; ++a)
            check_piecewise(transfer[j][a],
                            "W(" + std::to_string(j + 1) + ") scale " + std::to_string(-a - 1));
    }
    for (std::size_t q = 0; q < pairs; ++q) {
        if (static_cast<int>(cross[q].size()) != depth)
            throw std::invalid_argument("lsw spec: cross scales mismatch");
        for (int a = 0; a < depth; ++a)
            check_piecewise(cross[q][a], "Sigma pair " + std::to_string(q) + " scale " +
                                             std::to_string(-a - 1));
    }

    if (envelope) {
        for (int j = 0; j < p; ++j)
            for (int a = 0; a < depth; ++a) {
                const double bound = *envelope * std::exp2(0.5 * (-a - 1));
                for (double v : transfer[j][a].values)
                    if (std::abs(v) > bound * (1.0 + 1e-12))
                        throw std::invalid_argument(
                            "lsw spec: |W(" + std::to_string(j + 1) + ")| exceeds envelope at scale " +
                            std::to_string(-a - 1));
            }
    }

    // PSD of every constant piece of Sigma_i.
    for (int a = 0; a < depth; ++a) {
        std::vector<const PiecewiseConstant*> fns;
        for (const auto& pair : cross) fns.push_back(&pair[a]);
        std::vector<double> zs = union_breakpoints(fns);
        zs.insert(zs.begin(), 0.0);
        for (std::size_t r = 0; r < zs.size(); ++r) {
            Eigen::MatrixXd m = sigma_matrix(*this, -a - 1, zs[r]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
            if (eig.eigenvalues().minCoeff() < -1e-9)
                throw std::invalid_argument("lsw spec: Sigma at scale " + std::to_string(-a - 1) +
                                            ", piece " + std::to_string(r) +
                                            " is not positive semidefinite");
        }
    }
}

std::vector<double> LswSpec::breakpoints() const {
    std::vector<const PiecewiseConstant*> fns;
    for (const auto& row : transfer)
        for (const auto& f : row) fns.push_back(&f);
    for (const auto& row : cross)
        for (const auto& f : row) fns.push_back(&f);
    return union_breakpoints(fns);
}

std::vector<int> LswSpec::truth_locations(int T) const {
    std::vector<int> out;
    for (double z : breakpoints()) {
        // First index governed by the new value is ceil(z * T).
        const int first_new = static_cast<int>(std::ceil(z * T - 1e-12));
        const int nu = first_new - 1;
        if (nu > 0 && nu < T - 1) out.push_back(nu);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MultivariateSeries simulate(const LswSpec& spec, int T, std::uint64_t seed, int threads) {
    spec.validate();
    if (T < (1 << spec.depth))
        throw std::invalid_argument("simulate: T must be at least 2^depth = " +
                                    std::to_string(1 << spec.depth));

    MultivariateSeries x(spec.p, T);
    x.truth = spec.truth_locations(T);

    const int p = spec.p;
    constexpr int block = 8192;

    for (int a = 0; a < spec.depth; ++a) {
        const int scale = -a - 1;
        const int support = 1 << (-scale);
        const int half = support / 2;
        const double amp = std::exp2(0.5 * scale);
        const int k_lo = -(support - 1);
        const int count = T + support - 1; // k in [k_lo, T-1]

        // One covariance factor per constant piece of Sigma at this scale.
        std::vector<const PiecewiseConstant*> fns;
        for (const auto& pair : spec.cross) fns.push_back(&pair[a]);
        std::vector<double> zs = union_breakpoints(fns);
        std::vector<Eigen::MatrixXd> factors;
        factors.reserve(zs.size() + 1);
        for (std::size_t r = 0; r <= zs.size(); ++r) {
            const double z = r == 0 ? 0.0 : zs[r - 1];
            Eigen::MatrixXd m = sigma_matrix(spec, scale, z);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
            Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
            factors.push_back(eig.eigenvectors() * lam.cwiseSqrt().asDiagonal());
        }
        auto piece_of = [&](double z) {
            std::size_t idx = 0;
            while (idx < zs.size() && z >= zs[idx]) ++idx;
            return idx;
        };

        // Scaled innovations W_i^(j)(k/T) xi^(j)_{i,k}, independent stream per
        // (scale, block) so results do not depend on the worker count.
        std::vector<std::vector<double>> coef(p, std::vector<double>(count));
        const int nblocks = (count + block - 1) / block;
        parallel_for(nblocks, threads, [&](int bi) {
            rng::Rng gen(rng::stream_seed({seed, 0x15aULL, static_cast<std::uint64_t>(a),
                                           static_cast<std::uint64_t>(bi)}));
            Eigen::VectorXd u(p), xi(p);
            const int begin = bi * block;
            const int end = std::min(count, begin + block);
            for (int idx = begin; idx < end; ++idx) {
                const int k = k_lo + idx;
                const double z = std::clamp(static_cast<double>(k) / T, 0.0, 1.0);
                for (int j = 0; j < p; ++j) u(j) = gen.normal();
                if (p == 1) {
                    coef[0][idx] = spec.transfer[0][a].at(z) * factors[piece_of(z)](0, 0) * u(0);
                } else {
                    xi.noalias() = factors[piece_of(z)] * u;
                    for (int j = 0; j < p; ++j) coef[j][idx] = spec.transfer[j][a].at(z) * xi(j);
                }
            }
        });

        // Haar superposition: each output is a difference of two adjacent
        // block sums of the innovation sequence, taken off a prefix array.
        std::vector<double> prefix(count + 1, 0.0);
        for (int j = 0; j < p; ++j) {
            const auto& c = coef[j];
            double sum = 0.0, carry = 0.0;
            for (int idx = 0; idx < count; ++idx) {
                const double y = c[idx] - carry;
                const double t2 = sum + y;
                carry = (t2 - sum) - y;
                sum = t2;
                prefix[idx + 1] = sum;
            }
            double* out = x.series(j).data();
            for (int t = 0; t < T; ++t) {
                const int top = t + support; // prefix index just past k = t
                const double recent = prefix[top] - prefix[top - half];
                const double older = prefix[top - half] - prefix[t];
                out[t] += amp * (recent - older);
            }
        }
    }
    return x;
}

double local_autocov(const LswSpec& spec, int j, int l, double z, long tau) {
    double sum = 0.0;
    for (int a = 0; a < spec.depth; ++a)
        sum += spec.spectrum(j, l, -a - 1, z) * autocorr_wavelet(-a - 1, tau);
    return sum;
}

double expected_periodogram(const LswSpec& spec, int j, int l, int scale, double z) {
    const int depth = std::max(spec.depth, -scale);
    const InnerProductMatrix a(depth);
    double sum = 0.0;
    for (int ai = 0; ai < spec.depth; ++ai) sum += spec.spectrum(j, l, -ai - 1, z) * a.at(scale, -ai - 1);
    return sum;
}

namespace {

PiecewiseConstant parse_piecewise(std::istringstream& ss, const std::string& ctx) {
    PiecewiseConstant f;
    f.values.clear();
    double v;
    if (!(ss >> v)) throw std::invalid_argument(ctx + ": expected a value");
    f.values.push_back(v);
    std::string tok;
    while (ss >> tok) {
        if (tok != "@") throw std::invalid_argument(ctx + ": expected '@', got '" + tok + "'");
        double z;
        if (!(ss >> z >> v)) throw std::invalid_argument(ctx + ": expected '@ z value'");
        f.breakpoints.push_back(z);
        f.values.push_back(v);
    }
    return f;
}

} // namespace

LswSpec LswSpec::parse(std::istream& in, const std::string& name) {
    int p = 0, depth = 0;
    std::optional<double> envelope;
    struct Entry {
        bool is_cross;
        int j, l, scale;
        PiecewiseConstant f;
    };
    std::vector<Entry> entries;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        const std::string ctx = name + ":" + std::to_string(lineno);
        std::string eq;
        if (key == "p" || key == "depth" || key == "envelope") {
            double v;
            if (!(ss >> eq >> v) || eq != "=") throw std::invalid_argument(ctx + ": expected '= value'");
            if (key == "p")
                p = static_cast<int>(v);
            else if (key == "depth")
                depth = static_cast<int>(v);
            else
                envelope = v;
        } else if (key == "w") {
            Entry e{false, 0, 0, 0, {}};
            if (!(ss >> e.j >> e.scale >> eq) || eq != "=")
                throw std::invalid_argument(ctx + ": expected 'w j scale = ...'");
            e.f = parse_piecewise(ss, ctx);
            entries.push_back(std::move(e));
        } else if (key == "sigma") {
            Entry e{true, 0, 0, 0, {}};
            if (!(ss >> e.j >> e.l >> e.scale >> eq) || eq != "=")
                throw std::invalid_argument(ctx + ": expected 'sigma j l scale = ...'");
            e.f = parse_piecewise(ss, ctx);
            entries.push_back(std::move(e));
        } else {
            throw std::invalid_argument(ctx + ": unknown directive '" + key + "'");
        }
    }
    if (p < 1 || depth < 1) throw std::invalid_argument(name + ": missing p or depth");

    LswSpec spec = zeros(p, depth);
    spec.envelope = envelope;
    for (auto& e : entries) {
        if (e.scale > -1 || e.scale < -depth)
            throw std::invalid_argument(name + ": scale " + std::to_string(e.scale) + " out of range");
        if (e.j < 1 || e.j > p) throw std::invalid_argument(name + ": component out of range");
        if (!e.is_cross) {
            spec.w(e.j - 1, e.scale) = std::move(e.f);
        } else {
            if (e.l < 1 || e.l > p || e.l == e.j)
                throw std::invalid_argument(name + ": pair out of range");
            const int j = std::min(e.j, e.l) - 1;
            const int l = std::max(e.j, e.l) - 1;
            spec.sigma(j, l, e.scale) = std::move(e.f);
        }
    }
    spec.validate();
    return spec;
}

LswSpec LswSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open lsw spec " + path);
    return parse(in, path);
}

void LswSpec::save(std::ostream& out) const {
    out.precision(17);
    out << "p = " << p << "\n";
    out << "depth = " << depth << "\n";
    if (envelope) out << "envelope = " << *envelope << "\n";
    auto dump = [&](const PiecewiseConstant& f) {
        out << f.values[0];
        for (std::size_t r = 0; r < f.breakpoints.size(); ++r)
            out << " @ " << f.breakpoints[r] << ' ' << f.values[r + 1];
        out << '\n';
    };
    for (int j = 0; j < p; ++j)
        for (int a = 0; a < depth; ++a) {
            const auto& f = transfer[j][a];
            if (f.is_constant() && f.values[0] == 0.0) continue;
            out << "w " << (j + 1) << ' ' << (-a - 1) << " = ";
            dump(f);
        }
    for (int j = 0; j < p; ++j)
        for (int l = j + 1; l < p; ++l)
            for (int a = 0; a < depth; ++a) {
                const auto& f = cross[pair_index(j, l)][a];
                if (f.is_constant() && f.values[0] == 0.0) continue;
                out << "sigma " << (j + 1) << ' ' << (l + 1) << ' ' << (-a - 1) << " = ";
                dump(f);
            }
}

} // namespace sbseg
