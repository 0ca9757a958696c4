#pragma once

#include <iosfwd>
#include <string>

#include "sbseg/mvts.hpp"
#include "sbseg/sbs.hpp"
#include "sbseg/series.hpp"
#include "sbseg/simbench.hpp"

namespace sbseg {

/// {"schema": 1, "T": ..., "d": ..., "rule": ..., "points": [...]}
void write_changepoints_json(std::ostream& out, const ChangePointSet& cps, int T, int d,
                             AggRule rule);
void write_mvts_result_json(std::ostream& out, const MvtsResult& result, int T, AggRule rule);

/// Sidecar with the generator's ground truth.
void write_truth_json(std::ostream& out, const MultivariateSeries& x, const std::string& model,
                      double rho, std::uint64_t seed);

} // namespace sbseg
