#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace sbseg {

/// p component series of common length T, stored series-major, with optional
/// ground-truth metadata attached by generators.
struct MultivariateSeries {
    int p = 0;
    int T = 0;
    std::vector<double> data; // data[j * T + t]

    /// Change-point locations b: second-order structure differs between
    /// [.., b] and [b+1, ..]. Empty when unknown or stationary.
    std::vector<int> truth;
    /// For generated panels: which series changed at each truth location.
    std::vector<std::vector<int>> changed_series;

    MultivariateSeries() = default;
    MultivariateSeries(int p_, int T_) : p(p_), T(T_), data(static_cast<std::size_t>(p_) * T_, 0.0) {}

    double& at(int j, int t) { return data[static_cast<std::size_t>(j) * T + t]; }
    double at(int j, int t) const { return data[static_cast<std::size_t>(j) * T + t]; }

    std::span<const double> series(int j) const {
        if (j < 0 || j >= p) throw std::out_of_range("series index out of range");
        return {data.data() + static_cast<std::size_t>(j) * T, static_cast<std::size_t>(T)};
    }
    std::span<double> series(int j) {
        if (j < 0 || j >= p) throw std::out_of_range("series index out of range");
        return {data.data() + static_cast<std::size_t>(j) * T, static_cast<std::size_t>(T)};
    }
};

} // namespace sbseg
