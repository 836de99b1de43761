#pragma once

// Monte Carlo estimation of operating characteristics, the theoretical
// sample-size oracle, the Hoeffding lower-bound leading term and an
// empirical checker for the first-stage estimation event.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "triseq/design.hpp"
#include "triseq/procedures.hpp"
#include "triseq/source.hpp"

namespace triseq {

struct TruthPoint {
    double mu;
    double var;
};

struct ReplicationPlan {
    std::uint64_t reps = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

enum class Procedure { ThreeStage, FullySequential, FixedSample };

inline std::string procedure_name(Procedure p) {
    switch (p) {
    case Procedure::ThreeStage: return "three-stage";
    case Procedure::FullySequential: return "fully-sequential";
    case Procedure::FixedSample: return "fixed-sample";
    }
    return "?";
}

struct SimulationReport {
    TruthPoint truth{};
    Procedure procedure = Procedure::ThreeStage;
    std::uint64_t reps = 0;
    bool truth_in_box = true;
    double reject_h0_rate = 0;
    double reject_h1_rate = 0;
    double alpha_hat = std::numeric_limits<double>::quiet_NaN();
    double mean_n = 0;
    double se_mean_n = 0;
    // counts of stops at stage 1/2/3 and per-observation stops before m
    std::array<std::uint64_t, 4> stage_histogram{};
    double fallback_rate = 0;
    std::uint64_t degenerate_count = 0;
    std::int64_t n1 = 0;
    std::int64_t m_cap = 0;
};

namespace detail {

/// Runs fn(rep) for rep in [0, reps) on `workers` threads. Work is pulled
/// from a shared counter; fn must write its result into per-rep storage so
/// that downstream aggregation is independent of scheduling.
template <typename Fn>
void parallel_reps(std::uint64_t reps, unsigned workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < reps; ++r)
            fn(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t r = next.fetch_add(1);
            if (r >= reps)
                return;
            fn(r);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
}

struct RepResult {
    std::int64_t total_n = 0;
    std::uint8_t stage = 0; // Stage enum value, 0 = degenerate
    bool reject_h0 = false;
    bool fallback = false;
};

} // namespace detail

/// Deterministic synthetic stream for replicate rep_index of a plan.
inline NormalSource normal_stream(std::uint64_t seed, std::uint64_t rep_index,
                                  const TruthPoint& truth) {
    return NormalSource(seed, rep_index, truth.mu, truth.var);
}

/// Theoretical expected-sample-size target n(mu, var) under the design.
inline double oracle_sample_size(const TestDesign& design,
                                 const TruthPoint& truth) {
    if (!(truth.var > 0))
        throw std::domain_error("oracle_sample_size: require var > 0");
    return min_surface(truth.mu, truth.var, design.inputs);
}

/// Leading term of Hoeffding's lower bound on the expected sample size of
/// any test with error probabilities (alpha0, alpha1):
///   log((alpha0 + alpha1)^-1) / max_j I_j(mu, var).
/// The O(sqrt(log)) correction is not modeled.
inline double hoeffding_lower_bound(double alpha0, double alpha1,
                                    const TruthPoint& truth,
                                    const HypothesisSpec& spec) {
    const double s = alpha0 + alpha1;
    if (!(s > 0 && s < 1))
        throw std::domain_error(
            "hoeffding_lower_bound: require 0 < alpha0 + alpha1 < 1");
    const double info = std::max(kl_info(0, truth.mu, truth.var, spec),
                                 kl_info(1, truth.mu, truth.var, spec));
    return std::log(1.0 / s) / info;
}

/// Runs `plan.reps` independent replicates of the selected procedure at
/// the given truth point. Output is a pure function of (seed, design,
/// truth, procedure); worker count only affects wall time.
inline SimulationReport monte_carlo(const TestDesign& design,
                                    const TruthPoint& truth,
                                    const ReplicationPlan& plan,
                                    Procedure proc,
                                    std::int64_t n_fix = 0) {
    if (plan.reps < 1)
        throw std::invalid_argument("monte_carlo: require reps >= 1");
    if (!(truth.var > 0))
        throw std::domain_error("monte_carlo: require truth.var > 0");
    if (proc == Procedure::FixedSample && n_fix == 0)
        n_fix = design.m_cap;

    std::vector<detail::RepResult> results(plan.reps);
    detail::parallel_reps(plan.reps, plan.workers, [&](std::uint64_t r) {
        NormalSource src(plan.seed, r, truth.mu, truth.var);
        detail::RepResult& out = results[r];
        try {
            TestOutcome o = proc == Procedure::ThreeStage
                                ? run_three_stage(design, src)
                            : proc == Procedure::FullySequential
                                ? run_fully_sequential(design, src)
                                : run_fixed_sample(n_fix, design, src);
            out.total_n = o.total_n;
            out.stage = static_cast<std::uint8_t>(o.stage);
            out.reject_h0 = o.verdict == Verdict::RejectH0;
            out.fallback = o.fallback;
        } catch (const degenerate_data_error&) {
            out.stage = 0;
        }
    });

    // Sequential aggregation in replicate order; the sums over integer
    // sample sizes are exact, so the report cannot depend on scheduling.
    SimulationReport rep;
    rep.truth = truth;
    rep.procedure = proc;
    rep.reps = plan.reps;
    rep.truth_in_box = design.inputs.box.contains(truth.mu, truth.var);
    rep.n1 = design.n1;
    rep.m_cap = design.m_cap;

    std::uint64_t good = 0, h0 = 0, fb = 0;
    std::uint64_t sum_n = 0;
    long double sum_n2 = 0.0L;
    for (const auto& r : results) {
        if (r.stage == 0) {
            ++rep.degenerate_count;
            continue;
        }
        ++good;
        rep.stage_histogram[r.stage - 1] += 1;
        if (r.reject_h0)
            ++h0;
        if (r.fallback)
            ++fb;
        sum_n += static_cast<std::uint64_t>(r.total_n);
        sum_n2 += static_cast<long double>(r.total_n) *
                  static_cast<long double>(r.total_n);
    }
    if (good == 0)
        throw degenerate_data_error("monte_carlo: all replicates degenerate");

    const double g = static_cast<double>(good);
    rep.reject_h0_rate = static_cast<double>(h0) / g;
    rep.reject_h1_rate = static_cast<double>(good - h0) / g;
    rep.fallback_rate = static_cast<double>(fb) / g;
    rep.mean_n = static_cast<double>(sum_n) / g;
    const double var_n =
        good > 1 ? static_cast<double>(
                       (sum_n2 - static_cast<long double>(sum_n) *
                                     static_cast<long double>(sum_n) / g) /
                       (g - 1.0))
                 : 0.0;
    rep.se_mean_n = std::sqrt(std::max(var_n, 0.0) / g);

    // alpha_i is defined at the boundary truth mu = mu_i.
    if (truth.mu == design.inputs.spec.mu0)
        rep.alpha_hat = rep.reject_h0_rate;
    else if (truth.mu == design.inputs.spec.mu1)
        rep.alpha_hat = rep.reject_h1_rate;
    return rep;
}

/// Estimates the probability that for every k in [k0, horizon] the running
/// estimates stay inside the inflated box and the estimated surface stays
/// within (rho_k^-1, rho_k) of n(mu, var). The untruncatable "all k >= k0"
/// is cut at `horizon`.
inline double lemma21_event_rate(const TestDesign& design,
                                 const TruthPoint& truth, std::int64_t k0,
                                 std::int64_t horizon,
                                 const ReplicationPlan& plan) {
    if (!(2 <= k0 && k0 <= horizon))
        throw std::invalid_argument(
            "lemma21_event_rate: require 2 <= k0 <= horizon");
    if (!(truth.var > 0))
        throw std::domain_error("lemma21_event_rate: require var > 0");
    const double n_true = min_surface(truth.mu, truth.var, design.inputs);

    std::vector<std::uint8_t> holds(plan.reps, 0);
    detail::parallel_reps(plan.reps, plan.workers, [&](std::uint64_t r) {
        NormalSource src(plan.seed, r, truth.mu, truth.var);
        SampleAccumulator acc;
        bool ok = true;
        for (std::int64_t k = 1; k <= horizon; ++k) {
            acc.push_inplace(*src.next());
            if (k < k0)
                continue;
            const double v2 = acc.variance();
            if (!(v2 > 0) ||
                !design.inputs.box.contains_inflated(acc.mean(), v2)) {
                ok = false;
                break;
            }
            const double ratio =
                min_surface(acc.mean(), v2, design.inputs) / n_true;
            const double rk = rho(k, design.inputs.b_const);
            if (!(1.0 / rk < ratio && ratio < rk)) {
                ok = false;
                break;
            }
        }
        holds[r] = ok ? 1 : 0;
    });

    std::uint64_t count = 0;
    for (auto h : holds)
        count += h;
    return static_cast<double>(count) / static_cast<double>(plan.reps);
}

} // namespace triseq
