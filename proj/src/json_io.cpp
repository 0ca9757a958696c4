#include "sbseg/json_io.hpp"

#include <json.hpp>

#include <ostream>

namespace sbseg {
namespace {

nlohmann::json point_to_json(const ChangePoint& cp) {
    nlohmann::json j{{"location", cp.location},
                     {"level", cp.level},
                     {"segment", {cp.segment.s, cp.segment.e}},
                     {"value", cp.value},
                     {"passing_sequences", cp.passing}};
    if (cp.scale != 0) j["scale"] = cp.scale;
    if (!cp.cluster_members.empty()) {
        nlohmann::json members = nlohmann::json::array();
        for (const auto& [loc, scale] : cp.cluster_members)
            members.push_back({{"location", loc}, {"scale", scale}});
        j["cluster_members"] = members;
    }
    return j;
}

nlohmann::json set_to_json(const ChangePointSet& cps, int T, int d, AggRule rule) {
    nlohmann::json j{{"schema", 1}, {"T", T}, {"d", d}, {"rule", to_string(rule)}};
    nlohmann::json points = nlohmann::json::array();
    for (const auto& cp : cps.points) points.push_back(point_to_json(cp));
    j["points"] = points;
    if (!cps.diagnostic.empty()) j["diagnostic"] = cps.diagnostic;
    return j;
}

} // namespace

void write_changepoints_json(std::ostream& out, const ChangePointSet& cps, int T, int d,
                             AggRule rule) {
    out << set_to_json(cps, T, d, rule).dump(2) << '\n';
}

void write_mvts_result_json(std::ostream& out, const MvtsResult& result, int T, AggRule rule) {
    nlohmann::json j = set_to_json(result.merged, T, result.d, rule);
    j["scales"] = result.scales;
    nlohmann::json per_scale = nlohmann::json::array();
    for (const auto& [scale, cps] : result.per_scale) {
        nlohmann::json entry{{"scale", scale}};
        nlohmann::json points = nlohmann::json::array();
        for (const auto& cp : cps.points) points.push_back(point_to_json(cp));
        entry["points"] = points;
        per_scale.push_back(entry);
    }
    j["per_scale"] = per_scale;
    out << j.dump(2) << '\n';
}

void write_truth_json(std::ostream& out, const MultivariateSeries& x, const std::string& model,
                      double rho, std::uint64_t seed) {
    nlohmann::json j{{"schema", 1}, {"model", model},          {"p", x.p},
                     {"T", x.T},    {"rho", rho},              {"seed", seed},
                     {"change_points", x.truth}};
    if (!x.changed_series.empty()) j["changed_series"] = x.changed_series;
    out << j.dump(2) << '\n';
}

} // namespace sbseg
