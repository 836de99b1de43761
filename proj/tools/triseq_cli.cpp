// Command-line front end: design summaries, Monte Carlo simulation and
// comparison jobs, the estimation-event sweep and single-file replay.
//
// Exit codes: 0 success, 2 config/parse error, 3 statistical degeneracy,
// 4 insufficient data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triseq/config.hpp"
#include "triseq/design.hpp"
#include "triseq/procedures.hpp"
#include "triseq/report.hpp"
#include "triseq/simulation.hpp"
#include "triseq/source.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitInsufficientData = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Path to the JSON job config")
        ->required();
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--format", opts.format, "Output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opts.seed, "Seed override")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--workers", opts.workers, "Worker thread override");
}

triseq::JobConfig load_effective(const CommonOpts& opts) {
    triseq::JobConfig cfg = triseq::load_config(opts.config_path);
    if (!opts.out_dir.empty())
        cfg.out_dir = opts.out_dir;
    if (!opts.format.empty())
        cfg.format = opts.format;
    if (opts.seed_set)
        cfg.plan.seed = opts.seed;
    if (opts.workers > 0)
        cfg.plan.workers = opts.workers;
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << body;
}

/// Echo the defaults-filled config next to the artifacts so every run is
/// self-describing.
void echo_config(const triseq::JobConfig& cfg) {
    write_file(std::filesystem::path(cfg.out_dir) / "effective_config.json",
               triseq::effective_config(cfg).dump(2) + "\n");
}

int cmd_design(const CommonOpts& opts) {
    const auto cfg = load_effective(opts);
    const auto inputs = triseq::make_inputs(cfg);
    const auto design = triseq::make_design(inputs, cfg.tol);
    echo_config(cfg);

    nlohmann::ordered_json j;
    j["mu2"] = triseq::fp17(design.mu2);
    j["n_bar"] = triseq::fp17(design.n_bar);
    j["m_cap"] = design.m_cap;
    j["n1"] = design.n1;
    j["rho_n1"] = triseq::fp17(triseq::rho(design.n1, inputs.b_const));
    j["corner_surfaces"] = {
        {"mu_lo_var_lo",
         triseq::fp17(triseq::min_surface(inputs.box.mu_lo, inputs.box.var_lo, inputs))},
        {"mu_lo_var_hi",
         triseq::fp17(triseq::min_surface(inputs.box.mu_lo, inputs.box.var_hi, inputs))},
        {"mu_hi_var_lo",
         triseq::fp17(triseq::min_surface(inputs.box.mu_hi, inputs.box.var_lo, inputs))},
        {"mu_hi_var_hi",
         triseq::fp17(triseq::min_surface(inputs.box.mu_hi, inputs.box.var_hi, inputs))}};
    const std::string body = j.dump(2) + "\n";
    std::cout << body;
    write_file(std::filesystem::path(cfg.out_dir) / "design.json", body);
    return 0;
}

std::vector<triseq::SimulationReport>
run_grid(const triseq::JobConfig& cfg, const triseq::TestDesign& design) {
    std::vector<triseq::SimulationReport> reports;
    for (const auto& truth : cfg.truth_grid)
        for (auto proc : cfg.procedures)
            reports.push_back(triseq::monte_carlo(design, truth, cfg.plan,
                                                  proc, cfg.n_fix));
    return reports;
}

void write_reports(const triseq::JobConfig& cfg, const std::string& stem,
                   const std::vector<triseq::SimulationReport>& reports) {
    const auto dir = std::filesystem::path(cfg.out_dir);
    if (cfg.format == "json") {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : reports)
            arr.push_back(triseq::report_to_json(r));
        write_file(dir / (stem + ".json"), arr.dump(2) + "\n");
    } else {
        write_file(dir / (stem + ".csv"), triseq::reports_to_csv(reports));
    }
}

int cmd_simulate(const CommonOpts& opts) {
    const auto cfg = load_effective(opts);
    if (cfg.truth_grid.empty())
        throw triseq::config_error("config: truth_grid must be non-empty");
    const auto design = triseq::make_design(triseq::make_inputs(cfg), cfg.tol);
    echo_config(cfg);
    const auto reports = run_grid(cfg, design);
    write_reports(cfg, "simulate", reports);
    return 0;
}

int cmd_compare(const CommonOpts& opts) {
    auto cfg = load_effective(opts);
    if (cfg.truth_grid.empty())
        throw triseq::config_error("config: truth_grid must be non-empty");
    const auto inputs = triseq::make_inputs(cfg);
    const auto design = triseq::make_design(inputs, cfg.tol);
    echo_config(cfg);

    // alpha estimates at the hypothesis boundaries feed the lower bound.
    const double var_for_alpha = inputs.box.var_hi;
    const auto r0 = triseq::monte_carlo(
        design, {cfg.mu0, var_for_alpha}, cfg.plan,
        triseq::Procedure::FullySequential);
    const auto r1 = triseq::monte_carlo(
        design, {cfg.mu1, var_for_alpha}, cfg.plan,
        triseq::Procedure::FullySequential);
    double alpha0 = r0.alpha_hat, alpha1 = r1.alpha_hat;
    const double floor_alpha = 1.0 / static_cast<double>(cfg.plan.reps);
    if (!(alpha0 > 0))
        alpha0 = floor_alpha;
    if (!(alpha1 > 0))
        alpha1 = floor_alpha;

    std::string csv = "mu,var,mean_n_three_stage,se_three_stage,"
                      "mean_n_fully_sequential,se_fully_sequential,"
                      "oracle_n,hoeffding_leading\n";
    for (const auto& truth : cfg.truth_grid) {
        const auto r3 = triseq::monte_carlo(design, truth, cfg.plan,
                                            triseq::Procedure::ThreeStage);
        const auto rs = triseq::monte_carlo(
            design, truth, cfg.plan, triseq::Procedure::FullySequential);
        const double oracle = triseq::oracle_sample_size(design, truth);
        const double bound = triseq::hoeffding_lower_bound(
            alpha0, alpha1, truth, inputs.spec);
        csv += triseq::fp17(truth.mu) + "," + triseq::fp17(truth.var) + "," +
               triseq::fp17(r3.mean_n) + "," + triseq::fp17(r3.se_mean_n) +
               "," + triseq::fp17(rs.mean_n) + "," +
               triseq::fp17(rs.se_mean_n) + "," + triseq::fp17(oracle) + "," +
               triseq::fp17(bound) + "\n";
    }
    std::cout << csv;
    write_file(std::filesystem::path(cfg.out_dir) / "compare.csv", csv);
    return 0;
}

int cmd_lemma_check(const CommonOpts& opts) {
    const auto cfg = load_effective(opts);
    const auto inputs = triseq::make_inputs(cfg);
    echo_config(cfg);

    triseq::TruthPoint truth = cfg.lemma.truth_set
                                   ? cfg.lemma.truth
                                   : triseq::TruthPoint{
                                         0.5 * (cfg.mu0 + cfg.mu1),
                                         0.5 * (cfg.var_lo + cfg.var_hi)};

    std::string csv = "k0,b_const,horizon,rate,one_minus_rate_times_k0\n";
    for (double b : cfg.lemma.b_values) {
        triseq::DesignInputs in_b(cfg.a0, cfg.a1, cfg.c_frac, b, inputs.spec,
                                  inputs.box);
        const auto design = triseq::make_design(in_b, cfg.tol);
        const std::int64_t horizon = cfg.lemma.horizon > 0
                                         ? cfg.lemma.horizon
                                         : 4 * design.m_cap;
        for (auto k0 : cfg.lemma.k0_values) {
            const double rate = triseq::lemma21_event_rate(
                design, truth, k0, horizon, cfg.plan);
            csv += std::to_string(k0) + "," + triseq::fp17(b) + "," +
                   std::to_string(horizon) + "," + triseq::fp17(rate) + "," +
                   triseq::fp17((1.0 - rate) * static_cast<double>(k0)) + "\n";
        }
    }
    std::cout << csv;
    write_file(std::filesystem::path(cfg.out_dir) / "lemma_check.csv", csv);
    return 0;
}

int cmd_run_file(const CommonOpts& opts) {
    const auto cfg = load_effective(opts);
    if (cfg.data_file.empty())
        throw triseq::config_error("config: data_file required for run-file");
    const auto design = triseq::make_design(triseq::make_inputs(cfg), cfg.tol);
    echo_config(cfg);

    // A short file may still suffice if the procedure stops early; source
    // exhaustion maps to the insufficient-data exit below.
    const auto data = triseq::read_observation_file(cfg.data_file);
    triseq::VectorSource source(data);
    triseq::TestOutcome outcome;
    try {
        outcome = triseq::run_three_stage(design, source, /*record_trace=*/true);
    } catch (const triseq::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInsufficientData;
    } catch (const triseq::degenerate_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    }

    nlohmann::ordered_json j;
    j["decision"] =
        outcome.verdict == triseq::Verdict::RejectH0 ? "reject_h0" : "reject_h1";
    j["total_n"] = outcome.total_n;
    j["stage"] = static_cast<int>(outcome.stage);
    j["fallback"] = outcome.fallback;
    auto tr = nlohmann::ordered_json::array();
    for (const auto& t : outcome.trace)
        tr.push_back({{"n", t.n}, {"lambda0", triseq::fp17(t.lambda0)},
                      {"lambda1", triseq::fp17(t.lambda1)},
                      {"mean", triseq::fp17(t.mean)},
                      {"variance", triseq::fp17(t.variance)}});
    j["trace"] = tr;
    const std::string body = j.dump(2) + "\n";
    std::cout << body;
    write_file(std::filesystem::path(cfg.out_dir) / "run_file.json", body);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-stage t-test design, simulation and replay"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* design = app.add_subcommand("design", "Print design constants");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo over a truth grid");
    auto* compare =
        app.add_subcommand("compare", "Three-stage vs fully-sequential table");
    auto* lemma =
        app.add_subcommand("lemma-check", "Estimation-event rate sweep");
    auto* runfile = app.add_subcommand("run-file", "Replay a data file");
    for (auto* cmd : {design, simulate, compare, lemma, runfile})
        add_common(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed())
            return cmd_design(opts);
        if (simulate->parsed())
            return cmd_simulate(opts);
        if (compare->parsed())
            return cmd_compare(opts);
        if (lemma->parsed())
            return cmd_lemma_check(opts);
        if (runfile->parsed())
            return cmd_run_file(opts);
    } catch (const triseq::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const triseq::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const triseq::degenerate_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
