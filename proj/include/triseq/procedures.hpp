#pragma once

// Test executions: the three-stage t-test, the fully-sequential GLR
// baseline and a single-look fixed-sample baseline. All three share the
// rejection windows and the terminal fallback comparison.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "triseq/core_stats.hpp"
#include "triseq/design.hpp"
#include "triseq/source.hpp"

namespace triseq {

class degenerate_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Verdict { RejectH0, RejectH1 };
enum class Stage { Stage1 = 1, Stage2 = 2, Stage3 = 3, PerObservation = 4 };

struct TraceEntry {
    std::int64_t n;
    double lambda0;
    double lambda1;
    double mean;
    double variance;
};

struct TestOutcome {
    Verdict verdict;
    std::int64_t total_n;
    Stage stage;
    bool fallback;
    std::vector<TraceEntry> trace;
};

/// Rejection rule for H0: variance and mean windows strict, GLR
/// threshold weak.
inline bool check_reject_h0(const SampleAccumulator& acc,
                            const TestDesign& design) {
    if (acc.n() < 2 || !(acc.variance() > 0))
        throw degenerate_sample_error("check_reject_h0: degenerate sample");
    const auto& box = design.inputs.box;
    const auto& spec = design.inputs.spec;
    const double v2 = acc.variance();
    const double xbar = acc.mean();
    return box.var_lo - box.eps < v2 && v2 < box.var_hi + box.eps &&
           spec.mu0 < xbar && xbar < box.mu_hi + box.eps &&
           glr_stat(0, acc, spec) >= design.inputs.a0;
}

/// Rejection rule for H1, the mirror image.
inline bool check_reject_h1(const SampleAccumulator& acc,
                            const TestDesign& design) {
    if (acc.n() < 2 || !(acc.variance() > 0))
        throw degenerate_sample_error("check_reject_h1: degenerate sample");
    const auto& box = design.inputs.box;
    const auto& spec = design.inputs.spec;
    const double v2 = acc.variance();
    const double xbar = acc.mean();
    return box.var_lo - box.eps < v2 && v2 < box.var_hi + box.eps &&
           box.mu_lo - box.eps < xbar && xbar < spec.mu1 &&
           glr_stat(1, acc, spec) >= design.inputs.a1;
}

/// N2 = m ^ (N1 v ceil(rho_{N1}^2 * n(mean, variance))).
inline std::int64_t second_stage_size(const SampleAccumulator& acc_at_n1,
                                      const TestDesign& design) {
    if (acc_at_n1.n() < 2 || !(acc_at_n1.variance() > 0))
        throw degenerate_sample_error("second_stage_size: degenerate sample");
    const double r = rho(acc_at_n1.n(), design.inputs.b_const);
    const double est = r * r * min_surface(acc_at_n1.mean(),
                                           acc_at_n1.variance(),
                                           design.inputs);
    std::int64_t n2 = design.m_cap;
    if (std::isfinite(est) && est < static_cast<double>(design.m_cap))
        n2 = static_cast<std::int64_t>(std::ceil(est));
    n2 = std::max(n2, acc_at_n1.n());
    return std::min(n2, design.m_cap);
}

namespace detail {

inline void pull_to(ObservationSource& source, SampleAccumulator& acc,
                    std::int64_t target_n) {
    while (acc.n() < target_n) {
        const auto x = source.next();
        if (!x)
            throw input_error("observation source exhausted before n = " +
                              std::to_string(target_n));
        acc.push_inplace(*x);
    }
}

inline void record(std::vector<TraceEntry>* trace, const SampleAccumulator& acc,
                   const HypothesisSpec& spec) {
    if (!trace)
        return;
    const bool ok = acc.n() >= 2 && acc.variance() > 0;
    trace->push_back({acc.n(), ok ? glr_stat(0, acc, spec) : 0.0,
                      ok ? glr_stat(1, acc, spec) : 0.0, acc.mean(),
                      acc.variance()});
}

/// Terminal rule at n = m: reject H0 iff Lambda0 > Lambda1 (tie keeps H0).
inline Verdict fallback_decision(const SampleAccumulator& acc,
                                 const TestDesign& design) {
    if (!(acc.variance() > 0))
        throw degenerate_data_error(
            "zero variance estimate at the cap; fallback undefined");
    const auto& spec = design.inputs.spec;
    return glr_stat(0, acc, spec) > glr_stat(1, acc, spec) ? Verdict::RejectH0
                                                           : Verdict::RejectH1;
}

/// Checkpoint evaluation shared by all procedures. Returns the verdict if
/// a rejection rule fires; a zero-variance sample cannot fire.
inline std::optional<Verdict> checkpoint(const SampleAccumulator& acc,
                                         const TestDesign& design) {
    if (!(acc.variance() > 0))
        return std::nullopt;
    if (check_reject_h0(acc, design))
        return Verdict::RejectH0;
    if (check_reject_h1(acc, design))
        return Verdict::RejectH1;
    return std::nullopt;
}

} // namespace detail

/// Three-stage procedure: checkpoints at N1, N2 and m, then the fallback.
inline TestOutcome run_three_stage(const TestDesign& design,
                                   ObservationSource& source,
                                   bool record_trace = false) {
    SampleAccumulator acc;
    TestOutcome out{Verdict::RejectH1, 0, Stage::Stage1, false, {}};
    auto* trace = record_trace ? &out.trace : nullptr;

    detail::pull_to(source, acc, design.n1);
    detail::record(trace, acc, design.inputs.spec);
    if (auto v = detail::checkpoint(acc, design)) {
        out.verdict = *v;
        out.total_n = acc.n();
        out.stage = Stage::Stage1;
        return out;
    }

    // A zero first-stage variance leaves the surface estimate undefined;
    // go straight to the cap.
    const std::int64_t n2 = acc.variance() > 0 ? second_stage_size(acc, design)
                                               : design.m_cap;
    if (n2 > acc.n()) {
        detail::pull_to(source, acc, n2);
        detail::record(trace, acc, design.inputs.spec);
    }
    if (auto v = detail::checkpoint(acc, design)) {
        out.verdict = *v;
        out.total_n = acc.n();
        out.stage = Stage::Stage2;
        return out;
    }

    if (design.m_cap > acc.n()) {
        detail::pull_to(source, acc, design.m_cap);
        detail::record(trace, acc, design.inputs.spec);
    }
    out.total_n = acc.n();
    out.stage = Stage::Stage3;
    if (auto v = detail::checkpoint(acc, design)) {
        out.verdict = *v;
        return out;
    }
    out.fallback = true;
    out.verdict = detail::fallback_decision(acc, design);
    return out;
}

/// Fully-sequential baseline: the same rules evaluated after every
/// observation from N1 to m, with the three-stage fallback at m.
inline TestOutcome run_fully_sequential(const TestDesign& design,
                                        ObservationSource& source,
                                        bool record_trace = false) {
    SampleAccumulator acc;
    TestOutcome out{Verdict::RejectH1, 0, Stage::PerObservation, false, {}};
    auto* trace = record_trace ? &out.trace : nullptr;

    detail::pull_to(source, acc, design.n1);
    for (;;) {
        detail::record(trace, acc, design.inputs.spec);
        if (auto v = detail::checkpoint(acc, design)) {
            out.verdict = *v;
            out.total_n = acc.n();
            return out;
        }
        if (acc.n() >= design.m_cap)
            break;
        detail::pull_to(source, acc, acc.n() + 1);
    }
    out.total_n = acc.n();
    out.fallback = true;
    out.verdict = detail::fallback_decision(acc, design);
    return out;
}

/// Single look at n_fix with the m-checkpoint decision logic.
inline TestOutcome run_fixed_sample(std::int64_t n_fix,
                                    const TestDesign& design,
                                    ObservationSource& source,
                                    bool record_trace = false) {
    if (n_fix < 2)
        throw std::invalid_argument("run_fixed_sample: require n_fix >= 2");
    SampleAccumulator acc;
    TestOutcome out{Verdict::RejectH1, 0, Stage::Stage3, false, {}};
    auto* trace = record_trace ? &out.trace : nullptr;
    detail::pull_to(source, acc, n_fix);
    detail::record(trace, acc, design.inputs.spec);
    out.total_n = acc.n();
    if (auto v = detail::checkpoint(acc, design)) {
        out.verdict = *v;
        return out;
    }
    out.fallback = true;
    out.verdict = detail::fallback_decision(acc, design);
    return out;
}

} // namespace triseq
