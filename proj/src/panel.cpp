#include "sbseg/panel.hpp"

#include <algorithm>
#include <stdexcept>

namespace sbseg {

MatrixPanel::MatrixPanel(std::vector<std::vector<double>> rows, int t0)
    : rows_(std::move(rows)), t0_(t0) {
    if (rows_.empty()) throw std::invalid_argument("MatrixPanel: no sequences");
    len_ = static_cast<int>(rows_.front().size());
    if (len_ < 2) throw std::invalid_argument("MatrixPanel: sequences too short");
    for (const auto& r : rows_)
        if (static_cast<int>(r.size()) != len_)
            throw std::invalid_argument("MatrixPanel: ragged rows");
}

void MatrixPanel::values(int k, Segment segment, std::span<double> out) const {
    if (k < 0 || k >= count()) throw std::out_of_range("MatrixPanel: sequence index");
    if (segment.s < t0_ || segment.e > t_end())
        throw std::invalid_argument("MatrixPanel: segment outside domain");
    const auto& row = rows_[k];
    std::copy_n(row.begin() + (segment.s - t0_), segment.n(), out.begin());
}

} // namespace sbseg
