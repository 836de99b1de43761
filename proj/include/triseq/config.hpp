#pragma once

// Declarative job configuration. One JSON document describes hypotheses,
// the parameter box, design inputs, the truth grid, the replication plan,
// procedures to run and output options. Validation reports the offending
// field path before any work starts, and the effective config (defaults
// filled in) can be echoed back.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "triseq/design.hpp"
#include "triseq/report.hpp"
#include "triseq/simulation.hpp"

namespace triseq {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LemmaCheckConfig {
    std::vector<std::int64_t> k0_values{20, 40, 80, 160};
    std::vector<double> b_values{1.0};
    std::int64_t horizon = 0; // 0 means the default 4 * m_cap
    TruthPoint truth{};
    bool truth_set = false;
};

struct JobConfig {
    double mu0 = 0, mu1 = 0;
    double mu_lo = 0, mu_hi = 0, var_lo = 0, var_hi = 0;
    double eps = 0; // 0 means default var_lo / 2
    double a0 = 0, a1 = 0;
    double c_frac = 0.5;
    double b_const = 1.0;
    double tol = 1e-10;
    std::vector<TruthPoint> truth_grid;
    ReplicationPlan plan{10000, 0, 1};
    std::vector<Procedure> procedures{Procedure::ThreeStage};
    std::int64_t n_fix = 0; // fixed-sample look, 0 means m_cap
    LemmaCheckConfig lemma;
    std::string data_file;
    std::string out_dir = ".";
    std::string format = "csv";
};

namespace detail {

inline double req_num(const nlohmann::json& j, const std::string& path,
                      const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw config_error("config: missing or non-numeric field " + path +
                           "." + key);
    return j.at(key).get<double>();
}

inline double opt_num(const nlohmann::json& j, const std::string& path,
                      const char* key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw config_error("config: non-numeric field " + path + "." + key);
    return j.at(key).get<double>();
}

inline Procedure parse_procedure(const std::string& name,
                                 const std::string& path) {
    if (name == "three-stage")
        return Procedure::ThreeStage;
    if (name == "fully-sequential")
        return Procedure::FullySequential;
    if (name == "fixed-sample")
        return Procedure::FixedSample;
    throw config_error("config: unknown procedure '" + name + "' at " + path);
}

} // namespace detail

inline DesignInputs make_inputs(const JobConfig& c);

inline JobConfig parse_config(const nlohmann::json& j) {
    JobConfig c;
    using detail::opt_num;
    using detail::req_num;

    if (!j.contains("hypothesis") || !j.at("hypothesis").is_object())
        throw config_error("config: missing object field hypothesis");
    const auto& hy = j.at("hypothesis");
    c.mu0 = req_num(hy, "hypothesis", "mu0");
    c.mu1 = req_num(hy, "hypothesis", "mu1");
    if (!(c.mu0 < c.mu1))
        throw config_error("config: hypothesis requires mu0 < mu1");

    if (!j.contains("box") || !j.at("box").is_object())
        throw config_error("config: missing object field box");
    const auto& bx = j.at("box");
    c.mu_lo = req_num(bx, "box", "mu_lo");
    c.mu_hi = req_num(bx, "box", "mu_hi");
    c.var_lo = req_num(bx, "box", "var_lo");
    c.var_hi = req_num(bx, "box", "var_hi");
    c.eps = opt_num(bx, "box", "eps", c.var_lo / 2);

    if (!j.contains("design") || !j.at("design").is_object())
        throw config_error("config: missing object field design");
    const auto& ds = j.at("design");
    c.a0 = req_num(ds, "design", "a0");
    c.a1 = req_num(ds, "design", "a1");
    c.c_frac = opt_num(ds, "design", "c_frac", 0.5);
    c.b_const = opt_num(ds, "design", "b_const", 1.0);
    c.tol = opt_num(ds, "design", "tol", 1e-10);

    if (j.contains("truth_grid")) {
        const auto& tg = j.at("truth_grid");
        if (!tg.is_array())
            throw config_error("config: truth_grid must be an array");
        std::size_t idx = 0;
        for (const auto& t : tg) {
            const std::string path = "truth_grid[" + std::to_string(idx) + "]";
            const double mu = req_num(t, path, "mu");
            const double var = req_num(t, path, "var");
            if (!(var > 0))
                throw config_error("config: " + path + ".var must be > 0");
            c.truth_grid.push_back({mu, var});
            ++idx;
        }
    }

    if (j.contains("plan")) {
        const auto& pl = j.at("plan");
        c.plan.reps =
            static_cast<std::uint64_t>(opt_num(pl, "plan", "reps", 10000));
        c.plan.seed =
            static_cast<std::uint64_t>(opt_num(pl, "plan", "seed", 0));
        c.plan.workers =
            static_cast<unsigned>(opt_num(pl, "plan", "workers", 1));
        if (c.plan.reps < 1)
            throw config_error("config: plan.reps must be >= 1");
        if (c.plan.workers < 1)
            throw config_error("config: plan.workers must be >= 1");
    }

    if (j.contains("procedures")) {
        const auto& ps = j.at("procedures");
        if (!ps.is_array() || ps.empty())
            throw config_error("config: procedures must be a non-empty array");
        c.procedures.clear();
        std::size_t idx = 0;
        for (const auto& p : ps) {
            c.procedures.push_back(detail::parse_procedure(
                p.get<std::string>(),
                "procedures[" + std::to_string(idx++) + "]"));
        }
    }

    if (j.contains("n_fix"))
        c.n_fix = static_cast<std::int64_t>(req_num(j, "", "n_fix"));

    if (j.contains("lemma")) {
        const auto& lm = j.at("lemma");
        if (lm.contains("k0")) {
            c.lemma.k0_values.clear();
            for (const auto& k : lm.at("k0"))
                c.lemma.k0_values.push_back(k.get<std::int64_t>());
        }
        if (lm.contains("b_values")) {
            c.lemma.b_values.clear();
            for (const auto& b : lm.at("b_values"))
                c.lemma.b_values.push_back(b.get<double>());
        }
        c.lemma.horizon = static_cast<std::int64_t>(
            opt_num(lm, "lemma", "horizon", 0));
        if (lm.contains("truth")) {
            c.lemma.truth.mu = req_num(lm.at("truth"), "lemma.truth", "mu");
            c.lemma.truth.var = req_num(lm.at("truth"), "lemma.truth", "var");
            c.lemma.truth_set = true;
        }
    }

    if (j.contains("data_file"))
        c.data_file = j.at("data_file").get<std::string>();
    if (j.contains("output")) {
        const auto& out = j.at("output");
        if (out.contains("dir"))
            c.out_dir = out.at("dir").get<std::string>();
        if (out.contains("format")) {
            c.format = out.at("format").get<std::string>();
            if (c.format != "csv" && c.format != "json")
                throw config_error(
                    "config: output.format must be 'csv' or 'json'");
        }
    }

    // Constructing the domain types runs the remaining invariants; rethrow
    // with the field-path prefix.
    try {
        (void)make_inputs(c);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return c;
}

inline DesignInputs make_inputs(const JobConfig& c) {
    HypothesisSpec spec(c.mu0, c.mu1);
    ParameterBox box(c.mu_lo, c.mu_hi, c.var_lo, c.var_hi, c.eps);
    return DesignInputs(c.a0, c.a1, c.c_frac, c.b_const, spec, box);
}

inline JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config: JSON parse error: ") +
                           e.what());
    }
    return parse_config(j);
}

/// Echo of the effective config with every default materialized; parsing
/// this object again yields an identical JobConfig.
inline nlohmann::ordered_json effective_config(const JobConfig& c) {
    nlohmann::ordered_json j;
    j["hypothesis"] = {{"mu0", c.mu0}, {"mu1", c.mu1}};
    j["box"] = {{"mu_lo", c.mu_lo}, {"mu_hi", c.mu_hi}, {"var_lo", c.var_lo},
                {"var_hi", c.var_hi}, {"eps", c.eps}};
    j["design"] = {{"a0", c.a0}, {"a1", c.a1}, {"c_frac", c.c_frac},
                   {"b_const", c.b_const}, {"tol", c.tol}};
    auto tg = nlohmann::ordered_json::array();
    for (const auto& t : c.truth_grid)
        tg.push_back({{"mu", t.mu}, {"var", t.var}});
    j["truth_grid"] = tg;
    j["plan"] = {{"reps", c.plan.reps}, {"seed", c.plan.seed},
                 {"workers", c.plan.workers}};
    auto ps = nlohmann::ordered_json::array();
    for (auto p : c.procedures)
        ps.push_back(procedure_name(p));
    j["procedures"] = ps;
    j["n_fix"] = c.n_fix;
    j["lemma"] = {{"k0", c.lemma.k0_values}, {"b_values", c.lemma.b_values},
                  {"horizon", c.lemma.horizon}};
    if (c.lemma.truth_set)
        j["lemma"]["truth"] = {{"mu", c.lemma.truth.mu},
                               {"var", c.lemma.truth.var}};
    if (!c.data_file.empty())
        j["data_file"] = c.data_file;
    j["output"] = {{"dir", c.out_dir}, {"format", c.format}};
    return j;
}

} // namespace triseq
