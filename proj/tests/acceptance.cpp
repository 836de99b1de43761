// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "triseq/design.hpp"
#include "triseq/procedures.hpp"
#include "triseq/report.hpp"
#include "triseq/rng.hpp"
#include "triseq/simulation.hpp"

using namespace triseq;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int idx, const char* name, bool pass, double secs,
            const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL",
                idx, name, secs, detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!pass)
        ++g_failures;
}

DesignInputs golden_inputs(double a) {
    return DesignInputs(a, a, 0.5, 1.0, HypothesisSpec(0.0, 0.5),
                        ParameterBox(-1.0, 1.5, 0.5, 2.0, 0.25));
}

constexpr unsigned kWorkers = 4;
constexpr std::uint64_t kSeed = 20260823;

// --- criterion 1: GLR formula equivalence --------------------------------

void criterion1() {
    Timer t;
    HypothesisSpec spec(0.0, 0.5);
    SplitRng rng(1001, 0);
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto n = static_cast<std::int64_t>(2 + rng.next_u64() % 9999);
        const double mean = 20.0 * (rng.next_unit() - 0.5);
        const double var = std::pow(10.0, -3.0 + 5.0 * rng.next_unit());
        auto acc = SampleAccumulator::from_moments(
            n, mean, var * static_cast<double>(n));
        for (int i : {0, 1}) {
            const double d = mean - spec.mu(i);
            const double direct =
                0.5 * static_cast<double>(n) *
                std::log1p((d / std::sqrt(var)) * (d / std::sqrt(var)));
            const double composed = glr_stat(i, acc, spec);
            if (direct > 0)
                worst = std::max(worst, std::abs(direct - composed) / direct);
        }
    }
    const double secs = t.seconds();
    report(1, "GLR direct form vs n*I_i, 1e4 random accumulators",
           worst <= 1e-12 && secs < 1.0,
           secs, "max rel err " + fp17(worst));
}

// --- criterion 2: mu2 solver ----------------------------------------------

void criterion2() {
    Timer t;
    bool pass = true;
    std::string detail;
    SplitRng rng(2002, 0);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        const double mu0 = -1.0 + rng.next_unit();
        const double mu1 = mu0 + 0.2 + rng.next_unit();
        const double var_hi = 0.5 + 3.0 * rng.next_unit();
        const double a0 = 0.5 + 8.0 * rng.next_unit();
        const double a1 = 0.5 + 8.0 * rng.next_unit();
        DesignInputs in(a0, a1, 0.5, 1.0, HypothesisSpec(mu0, mu1),
                        ParameterBox(mu0 - 1.0, mu1 + 1.0, 0.4, var_hi, 0.2));
        const double mu2 = solve_mu2(in, 1e-10);
        const double ratio = kl_info(0, mu2, var_hi, in.spec) /
                             kl_info(1, mu2, var_hi, in.spec);
        worst = std::max(worst, std::abs(ratio - a0 / a1) / (a0 / a1));
    }
    if (worst > 1e-10) {
        pass = false;
        detail += "residual " + fp17(worst);
    }
    DesignInputs sym(3.0, 3.0, 0.5, 1.0, HypothesisSpec(-0.5, 0.5),
                     ParameterBox(-2.0, 2.0, 0.5, 2.0, 0.25));
    const double mid = solve_mu2(sym);
    if (std::abs(mid) > 1e-12) {
        pass = false;
        detail += " symmetric mu2 " + fp17(mid);
    }
    const double secs = t.seconds();
    report(2, "mu2 solver residual and symmetric midpoint",
           pass && secs < 1.0, secs, detail);
}

// --- criterion 3: supremum property of n_bar ------------------------------

void criterion3() {
    Timer t;
    const auto in = golden_inputs(5.0);
    const auto d = make_design(in);
    bool pass = true;
    for (int gi = 0; gi < 2001; ++gi) {
        const double u = in.box.mu_lo +
                         (in.box.mu_hi - in.box.mu_lo) * gi / 2000.0;
        for (double v2 : {0.4, 0.8, 1.2, 1.6, 2.0}) {
            if (min_surface(u, v2, in) > d.n_bar * (1 + 1e-12))
                pass = false;
        }
    }
    const double at_peak = min_surface(d.mu2, in.box.var_hi, in);
    if (std::abs(at_peak - d.n_bar) > 1e-8 * d.n_bar)
        pass = false;
    const double secs = t.seconds();
    report(3, "n_bar dominates min_surface on grid, equality at (mu2, var_hi)",
           pass && secs < 1.0, secs);
}

// --- criterion 4: monotone surface segments and the N1 chain --------------

void criterion4() {
    Timer t;
    const auto in = golden_inputs(5.0);
    const auto d = make_design(in);
    bool pass = true;
    double prev0 = 0.0;
    double prev1 = std::numeric_limits<double>::infinity();
    double grid_min = std::numeric_limits<double>::infinity();
    for (int gi = 0; gi < 2001; ++gi) {
        const double u = in.box.mu_lo +
                         (in.box.mu_hi - in.box.mu_lo) * gi / 2000.0;
        // the corner chain uses exactly these monotone segments: surface 0
        // rising into its pole at mu0, surface 1 falling away from mu1
        if (u <= in.spec.mu0) {
            const double s0 = surface(0, u, in.box.var_lo, in);
            if (s0 < prev0 * (1 - 1e-12))
                pass = false;
            prev0 = s0;
        }
        if (u >= in.spec.mu1) {
            const double s1 = surface(1, u, in.box.var_lo, in);
            if (s1 > prev1 * (1 + 1e-12))
                pass = false;
            prev1 = s1;
        }
        grid_min = std::min(grid_min, min_surface(u, in.box.var_lo, in));
        for (double v2 : {0.5, 0.875, 1.25, 1.625, 2.0}) {
            if (static_cast<double>(d.n1) > min_surface(u, v2, in))
                pass = false;
        }
    }
    const double corner =
        std::min(min_surface(in.box.mu_lo, in.box.var_lo, in),
                 min_surface(in.box.mu_hi, in.box.var_lo, in));
    if (std::abs(grid_min - corner) > 1e-9 * corner)
        pass = false;
    const double secs = t.seconds();
    report(4, "surface monotone segments, corner infimum, N1 <= n on J grid",
           pass && secs < 1.0, secs);
}

// --- criterion 5: hard stopping bounds ------------------------------------

void criterion5() {
    Timer t;
    const auto d = make_design(golden_inputs(5.0));
    const TruthPoint truths[] = {
        {0.0, 2.0}, {0.5, 2.0}, {0.25, 2.0}, {-0.5, 1.0}, {1.0, 0.8}};
    const std::uint64_t reps = 100000;
    std::vector<std::uint8_t> ok(reps);
    bool pass = true;
    for (const auto& truth : truths) {
        std::fill(ok.begin(), ok.end(), 1);
        detail::parallel_reps(reps, kWorkers, [&](std::uint64_t r) {
            NormalSource src(kSeed, r, truth.mu, truth.var);
            const auto out = run_three_stage(d, src, /*record_trace=*/true);
            bool good = out.total_n >= d.n1 && out.total_n <= d.m_cap;
            // N must be N1, the replicate's own N2, or m
            if (out.total_n != d.n1 && out.total_n != d.m_cap) {
                const auto& first = out.trace.front();
                const auto acc = SampleAccumulator::from_moments(
                    first.n, first.mean,
                    first.variance * static_cast<double>(first.n));
                good = good && out.total_n == second_stage_size(acc, d);
            }
            ok[r] = good ? 1 : 0;
        });
        for (auto o : ok)
            if (!o)
                pass = false;
    }
    report(5, "every replicate stops at N in {N1, N2, m} within [N1, m]",
           pass, t.seconds());
}

// --- criterion 6: error-probability decay in A ----------------------------

void criterion6() {
    Timer t;
    const std::uint64_t reps = 200000;
    bool pass = true;
    std::string detail_s;
    double alpha[2][3];
    double se[2][3];
    const double avals[3] = {2.0, 4.0, 6.0};
    for (int ai = 0; ai < 3; ++ai) {
        const auto d = make_design(golden_inputs(avals[ai]));
        const ReplicationPlan plan{reps, kSeed + 60 + static_cast<std::uint64_t>(ai), kWorkers};
        const auto r0 =
            monte_carlo(d, {0.0, 2.0}, plan, Procedure::ThreeStage);
        const auto r1 =
            monte_carlo(d, {0.5, 2.0}, plan, Procedure::ThreeStage);
        alpha[0][ai] = r0.alpha_hat;
        alpha[1][ai] = r1.alpha_hat;
        for (int i : {0, 1}) {
            const double p = alpha[i][ai];
            se[i][ai] = std::sqrt(p * (1 - p) / static_cast<double>(reps));
        }
    }
    for (int i : {0, 1}) {
        for (int ai = 1; ai < 3; ++ai) {
            const double slack =
                3.0 * std::sqrt(se[i][ai] * se[i][ai] +
                                se[i][ai - 1] * se[i][ai - 1]);
            if (alpha[i][ai] > alpha[i][ai - 1] + slack)
                pass = false;
        }
        if (alpha[i][0] <= 0 || alpha[i][2] <= 0) {
            pass = false;
            continue;
        }
        // least-squares slope over three equally spaced A values
        const double slope =
            (std::log(alpha[i][2]) - std::log(alpha[i][0])) / 4.0;
        detail_s += "slope" + std::to_string(i) + " " + fp17(slope) + " ";
        if (!(slope >= -1.6 && slope <= -0.6))
            pass = false;
    }
    detail_s += "alpha0(A) = " + fp17(alpha[0][0]) + " " + fp17(alpha[0][1]) +
                " " + fp17(alpha[0][2]);
    report(6, "alpha_hat non-increasing in A, log-slope in [-1.6, -0.6]",
           pass, t.seconds(), detail_s);
}

// --- criteria 7 and 8: efficiency and the Hoeffding floor ------------------

// Golden-seed regression constants: mean_n for the three-stage and the
// fully-sequential runs below, frozen after the first calibrated run.
// An empty string skips the comparison and prints the value instead.
const char* kRegression3s[5] = {"422.33515", "442.00259999999997",
                                "461.92644999999999", "462.96704999999997",
                                "442.4015"};
const char* kRegressionSeq[5] = {"124.4333", "150.31899999999999",
                                 "183.59100000000001", "185.02594999999999",
                                 "150.92449999999999"};

void criteria7and8() {
    Timer t;
    const auto d = make_design(golden_inputs(8.0));
    const TruthPoint truths[5] = {{0.0, 1.9},
                                  {0.05, 1.9},
                                  {0.1, 1.9},
                                  {0.4, 1.9},
                                  {0.45, 1.9}};
    const std::uint64_t reps = 20000;
    const ReplicationPlan plan{reps, kSeed + 70, kWorkers};

    bool pass7 = true, pass8 = true;
    std::string detail7, detail8;

    // boundary error rates for the lower bound (criterion 8)
    const ReplicationPlan alpha_plan{200000, kSeed + 80, kWorkers};
    const auto b0 = monte_carlo(d, {0.0, 2.0}, alpha_plan,
                                Procedure::FullySequential);
    const auto b1 = monte_carlo(d, {0.5, 2.0}, alpha_plan,
                                Procedure::FullySequential);
    double a0 = b0.alpha_hat, a1 = b1.alpha_hat;
    const double floor_alpha = 1.0 / static_cast<double>(alpha_plan.reps);
    if (!(a0 > 0))
        a0 = floor_alpha;
    if (!(a1 > 0))
        a1 = floor_alpha;
    detail8 += "alpha_hat " + fp17(a0) + " " + fp17(a1) + "; ";

    const double rho3 = std::pow(rho(d.n1, d.inputs.b_const), 3.0);
    for (int k = 0; k < 5; ++k) {
        const auto r3 =
            monte_carlo(d, truths[k], plan, Procedure::ThreeStage);
        const auto rs =
            monte_carlo(d, truths[k], plan, Procedure::FullySequential);
        const double oracle = oracle_sample_size(d, truths[k]);

        const double cap7 =
            std::min(static_cast<double>(d.m_cap), oracle * rho3 + 5.0) +
            3.0 * r3.se_mean_n;
        if (r3.mean_n > cap7)
            pass7 = false;
        const double combined =
            3.0 * std::sqrt(r3.se_mean_n * r3.se_mean_n +
                            rs.se_mean_n * rs.se_mean_n);
        if (r3.mean_n > 1.25 * rs.mean_n + combined) {
            pass7 = false;
            detail7 += "EN ratio " + fp17(r3.mean_n / rs.mean_n) +
                       " > 1.25 at point " + std::to_string(k) + "; ";
        }

        // regression constants, bit-exact under the golden seed
        if (kRegression3s[k][0] != '\0' && fp17(r3.mean_n) != kRegression3s[k]) {
            pass7 = false;
            detail7 += "3s[" + std::to_string(k) + "]=" + fp17(r3.mean_n) + " ";
        }
        if (kRegressionSeq[k][0] != '\0' && fp17(rs.mean_n) != kRegressionSeq[k]) {
            pass7 = false;
            detail7 += "seq[" + std::to_string(k) + "]=" + fp17(rs.mean_n) + " ";
        }
        if (kRegression3s[k][0] == '\0')
            detail7 += "CAL 3s[" + std::to_string(k) + "]=" + fp17(r3.mean_n) +
                       " seq[" + std::to_string(k) + "]=" + fp17(rs.mean_n) +
                       " ";

        const double bound =
            hoeffding_lower_bound(a0, a1, truths[k], d.inputs.spec);
        if (rs.mean_n < bound - 3.0 * rs.se_mean_n) {
            pass8 = false;
            detail8 += "EN(seq)=" + fp17(rs.mean_n) + " < bound=" +
                       fp17(bound) + " at point " + std::to_string(k) + "; ";
        }
    }
    const double secs = t.seconds();
    report(7, "three-stage efficiency vs cap and fully-sequential baseline",
           pass7, secs, detail7);
    report(8, "E N(fully-sequential) >= Hoeffding leading term - 3 se", pass8,
           0.0, detail8);
}

// --- criterion 9: estimation-event rate sweep ------------------------------

void criterion9() {
    Timer t;
    const auto d = make_design(golden_inputs(5.0));
    // high-separation, low-variance point: the size estimate n(mean, var)
    // is least sensitive to sampling noise here, so the ratio band holds
    // with probability 1 - O(1/k0)
    const TruthPoint truth{1.5, 0.5};
    const std::int64_t horizon = 4 * d.m_cap;
    const std::uint64_t reps = 10000;
    const ReplicationPlan plan{reps, kSeed + 90, kWorkers};

    bool pass = true;
    std::string detail_s;
    double products[4];
    double prev_rate = 0.0;
    const std::int64_t k0s[4] = {20, 40, 80, 160};
    for (int k = 0; k < 4; ++k) {
        const double rate =
            lemma21_event_rate(d, truth, k0s[k], horizon, plan);
        const double se =
            std::sqrt(rate * (1 - rate) / static_cast<double>(reps));
        if (rate < prev_rate - 3.0 * se)
            pass = false;
        prev_rate = rate;
        products[k] = (1.0 - rate) * static_cast<double>(k0s[k]);
        detail_s += "k0=" + std::to_string(k0s[k]) + " rate=" + fp17(rate) +
                    " prod=" + fp17(products[k]) + "; ";
    }
    const double pmin = *std::min_element(products, products + 4);
    const double pmax = *std::max_element(products, products + 4);
    if (!(pmin > 0) || pmax > 4.0 * pmin)
        pass = false;
    const double secs = t.seconds();
    report(9, "(1 - rate) * k0 bounded within a factor of 4, rate -> 1",
           pass && secs < 120.0, secs, detail_s);
}

// --- criterion 10: determinism and scheduling independence -----------------

void criterion10() {
    Timer t;
    const auto d = make_design(golden_inputs(5.0));
    const TruthPoint truths[] = {{0.0, 2.0}, {0.25, 1.0}, {0.5, 2.0}};

    auto job = [&](unsigned workers) {
        std::vector<SimulationReport> reports;
        for (const auto& truth : truths)
            for (auto proc :
                 {Procedure::ThreeStage, Procedure::FullySequential}) {
                ReplicationPlan plan{10000, kSeed + 100, workers};
                reports.push_back(monte_carlo(d, truth, plan, proc));
            }
        return reports_to_csv(reports);
    };

    const std::string w1 = job(1);
    const std::string w4 = job(4);
    const std::string w16 = job(16);
    const std::string w4again = job(4);
    const bool pass = w1 == w4 && w4 == w16 && w4 == w4again;
    report(10, "simulate job CSV byte-identical for workers 1/4/16 and reruns",
           pass, t.seconds());
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criteria7and8();
    criterion9();
    criterion10();
    std::printf("%s: %d criterion failure(s)\n",
                g_failures == 0 ? "ALL PASS" : "FAILED", g_failures);
    return g_failures;
}
