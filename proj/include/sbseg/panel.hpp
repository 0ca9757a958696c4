#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbseg/cusum.hpp"

namespace sbseg {

/// A panel of d nonnegative sequences sharing the time domain
/// [t_begin, t_end]. Sequences are served restricted to a requested segment;
/// segment_dependent() panels (cross-periodogram rows) may change values with
/// the segment through the per-segment sign, everything else is a plain
/// restriction.
class PanelSource {
public:
    virtual ~PanelSource() = default;

    virtual int count() const = 0;
    virtual int t_begin() const = 0;
    virtual int t_end() const = 0;
    virtual bool segment_dependent() const = 0;

    /// Fill out (size segment.n()) with sequence k over the segment.
    virtual void values(int k, Segment segment, std::span<double> out) const = 0;

    virtual std::string label(int k) const { return "y" + std::to_string(k + 1); }

    Segment full_segment() const { return Segment{t_begin(), t_end()}; }
};

/// Dense in-memory panel.
class MatrixPanel : public PanelSource {
public:
    /// rows: d sequences, each of length t1 - t0 + 1, starting at time t0.
    MatrixPanel(std::vector<std::vector<double>> rows, int t0 = 0);

    int count() const override { return static_cast<int>(rows_.size()); }
    int t_begin() const override { return t0_; }
    int t_end() const override { return t0_ + len_ - 1; }
    bool segment_dependent() const override { return false; }
    void values(int k, Segment segment, std::span<double> out) const override;

private:
    std::vector<std::vector<double>> rows_;
    int t0_;
    int len_;
};

} // namespace sbseg
