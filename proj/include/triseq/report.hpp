#pragma once

// Stable serialization of simulation reports: JSON objects and CSV rows
// with a fixed column order. Floating-point values carry 17 significant
// digits so emitted artifacts are exactly reproducible.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "triseq/simulation.hpp"

namespace triseq {

/// 17-significant-digit decimal rendering; round-trips any double.
inline std::string fp17(double x) {
    if (std::isnan(x))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::ordered_json report_to_json(const SimulationReport& r) {
    nlohmann::ordered_json j;
    j["procedure"] = procedure_name(r.procedure);
    j["truth"] = {{"mu", fp17(r.truth.mu)}, {"var", fp17(r.truth.var)}};
    j["truth_in_box"] = r.truth_in_box;
    j["reps"] = r.reps;
    j["n1"] = r.n1;
    j["m_cap"] = r.m_cap;
    j["reject_h0_rate"] = fp17(r.reject_h0_rate);
    j["reject_h1_rate"] = fp17(r.reject_h1_rate);
    j["alpha_hat"] = fp17(r.alpha_hat);
    j["mean_n"] = fp17(r.mean_n);
    j["se_mean_n"] = fp17(r.se_mean_n);
    j["stage_histogram"] = {r.stage_histogram[0], r.stage_histogram[1],
                            r.stage_histogram[2], r.stage_histogram[3]};
    j["fallback_rate"] = fp17(r.fallback_rate);
    j["degenerate_count"] = r.degenerate_count;
    return j;
}

inline const char* report_csv_header() {
    return "procedure,mu,var,truth_in_box,reps,n1,m_cap,reject_h0_rate,"
           "reject_h1_rate,alpha_hat,mean_n,se_mean_n,stage1,stage2,stage3,"
           "per_obs,fallback_rate,degenerate_count";
}

inline std::string report_csv_row(const SimulationReport& r) {
    std::string row;
    row += procedure_name(r.procedure);
    row += ',';
    row += fp17(r.truth.mu);
    row += ',';
    row += fp17(r.truth.var);
    row += ',';
    row += r.truth_in_box ? "1" : "0";
    row += ',';
    row += std::to_string(r.reps);
    row += ',';
    row += std::to_string(r.n1);
    row += ',';
    row += std::to_string(r.m_cap);
    row += ',';
    row += fp17(r.reject_h0_rate);
    row += ',';
    row += fp17(r.reject_h1_rate);
    row += ',';
    row += fp17(r.alpha_hat);
    row += ',';
    row += fp17(r.mean_n);
    row += ',';
    row += fp17(r.se_mean_n);
    for (auto c : r.stage_histogram) {
        row += ',';
        row += std::to_string(c);
    }
    row += ',';
    row += fp17(r.fallback_rate);
    row += ',';
    row += std::to_string(r.degenerate_count);
    return row;
}

inline std::string reports_to_csv(const std::vector<SimulationReport>& rs) {
    std::string out = report_csv_header();
    out += '\n';
    for (const auto& r : rs) {
        out += report_csv_row(r);
        out += '\n';
    }
    return out;
}

} // namespace triseq
