// Acceptance suite: one checkable criterion per number, each printing a
// single [PASS]/[FAIL] line plus measurement details. Run with no argument
// for the full battery or with a criterion number for one entry.
//
// Every tolerance below is fixed here, in code; nothing is calibrated at
// run time. Two criteria (2 and 9) encode requirements the measured
// mathematics does not meet; they are implemented as stated and report
// their measured values rather than being loosened to pass. See the
// comments on those criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "enumeration.hpp"
#include "walklab/config.hpp"
#include "walklab/io.hpp"
#include "walklab/replication.hpp"

using namespace walklab;

namespace {

struct Criterion {
    int number;
    const char* title;
    double budget_seconds;
    bool (*run)(std::string& detail);
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::int64_t rep1d(double a, std::int64_t n) {
    return 2 * std::int64_t(std::floor(a * std::sqrt(double(n)) / 2.0));
}

// ---------------------------------------------------------------- 1
// Exact point oracles against literal path enumeration, even n <= 12,
// representatives with |a| <= 2, equality of rationals (integer numerators).
bool criterion1(std::string& detail) {
    const std::vector<double> axis = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    std::uint64_t checked = 0;
    for (int n = 2; n <= 12; n += 2) {
        auto counts1 = walklab_tests::enumerate_walk_1d(n);
        for (double a : axis) {
            std::int64_t rep = rep1d(a, n);
            std::uint64_t count = counts1.count(rep) ? counts1.at(rep) : 0;
            std::uint64_t expect =
                std::llabs(rep) <= n ? exact_binomial_numerator(n, (n + rep) / 2) : 0;
            if (count != expect) {
                detail = "1-d numerator mismatch at n = " + std::to_string(n) +
                         ", a = " + std::to_string(a);
                return false;
            }
            if (exact_simple1d_point(n, a).value != std::ldexp(double(count), -n)) {
                detail = "1-d probability mismatch at n = " + std::to_string(n);
                return false;
            }
            ++checked;
        }
        auto counts2 = walklab_tests::enumerate_walk_2d(n);
        for (double ax : axis)
            for (double ay : axis) {
                if (ax * ax + ay * ay > 4.0 + 1e-12) continue; // |a| <= 2
                std::int64_t rx = rep1d(ax, n), ry = rep1d(ay, n);
                std::uint64_t count =
                    counts2.count({rx, ry}) ? counts2.at({rx, ry}) : 0;
                std::int64_t t1 = rx + ry, t2 = ry - rx;
                std::uint64_t expect = 0;
                if (std::llabs(t1) <= n && std::llabs(t2) <= n)
                    expect = exact_binomial_numerator(n, (n + t1) / 2) *
                             exact_binomial_numerator(n, (n + t2) / 2);
                if (count != expect) {
                    detail = "2-d numerator mismatch at n = " + std::to_string(n) + ", a = (" +
                             std::to_string(ax) + ", " + std::to_string(ay) + ")";
                    return false;
                }
                if (exact_simple2d_point(n, Vec{ax, ay}).value !=
                    std::ldexp(double(count), -2 * n)) {
                    detail = "2-d probability mismatch at n = " + std::to_string(n);
                    return false;
                }
                ++checked;
            }
    }
    detail = std::to_string(checked) + " (n, a) cells agree with enumeration exactly";
    return true;
}

// ---------------------------------------------------------------- 2
// Local CLT rate grid: |exact/asymptotic - 1| <= K (|a|^3/sqrt(n) + 1/n)
// with one global K <= 5, plus the pinned ratio at (n = 100, a = 0).
//
// The measured global K on this grid is 5.49, driven by (a = 0.5,
// n = 1000): the even floor representative 14 sits 1.81 below
// a sqrt(n) = 15.81 and the resulting e^{54/2000} = 2.7% deviation
// dwarfs the |a|^3/sqrt(n) + 1/n = 0.50% budget. The K <= 5 requirement
// is kept as stated and reported honestly.
bool criterion2(std::string& detail) {
    auto cal = calibrate_lclt_rate_1d();
    char buf[160];
    std::string grid;
    for (const auto& c : cal.cells) {
        std::snprintf(buf, sizeof buf, "    a=%.1f n=%-6lld dev=%.6f unit=%.6f K=%.4f\n",
                      c.a_norm, static_cast<long long>(c.n), c.deviation, c.unit, c.k);
        grid += buf;
    }
    std::printf("%s", grid.c_str());

    double dev100 = std::abs(exact_simple1d_point(100, 0.0).value /
                                 lclt_simple1d_asym(100, 0.0).value -
                             1.0);
    bool ratio_ok = dev100 >= 0.0024 && dev100 <= 0.0026;
    bool k_ok = cal.k_max <= 5.0;
    std::snprintf(buf, sizeof buf,
                  "global K = %.4f (required <= 5), |exact/asym - 1| at (100, 0) = %.6f",
                  cal.k_max, dev100);
    detail = buf;
    return ratio_ok && k_ok;
}

// ---------------------------------------------------------------- 3
// Rotation identity at a = 0 for every even n <= 1e4, exactly, and the
// pinned value at n = 100 to 1e-12 relative.
bool criterion3(std::string& detail) {
    for (std::int64_t n = 2; n <= 10000; n += 2) {
        double p1 = exact_simple1d_point(n, 0.0).value;
        double p2 = exact_simple2d_point(n, Vec{0.0, 0.0}).value;
        if (p2 != p1 * p1) {
            detail = "identity violated at n = " + std::to_string(n);
            return false;
        }
    }
    double v = exact_simple2d_point(100, Vec{0.0, 0.0}).value;
    double expect = 0.006334446707872693; // independently computed exact value
    if (std::abs(v / expect - 1.0) > 1e-12) {
        detail = "n = 100 value " + std::to_string(v) + " off the pinned 0.00633444";
        return false;
    }
    detail = "exact product identity holds for all 5000 even n, value(100) = 0.00633444";
    return true;
}

// ---------------------------------------------------------------- 4
// Berry-Esseen bracket: 1e5 Rademacher replicas at n = 1e4, a = 0, eps = 1.
bool criterion4(std::string& detail) {
    ExperimentConfig cfg;
    cfg.dist = StepDistribution::simple_walk(1);
    cfg.schedule_spec.kind = ScheduleKind::Explicit;
    cfg.schedule_spec.explicit_terms = {10000};
    cfg.schedule_spec.count = 1;
    cfg.schedule_spec.start_index = 1;
    cfg.target.mode = TargetMode::ScaledBox;
    cfg.target.a = Vec{0.0};
    cfg.target.epsilon = 1.0;
    cfg.form = TheoremForm::T3Box;
    cfg.replicas = 100000;
    cfg.master_seed = 20260804;
    auto agg = run_experiment(cfg);
    double freq = double(agg.cell(0, 0).sum_hits) / double(agg.replicas_completed);
    double target = 0.682689;
    double se = std::sqrt(freq * (1.0 - freq) / double(agg.replicas_completed));
    double bracket = oracle_constants::kBerryEsseenBox1d / 100.0; // C_BE rho / sqrt(n)
    double tol = bracket + 4.0 * se;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "freq = %.6f vs %.6f, |dev| = %.6f <= bracket %.6f + 4se %.6f", freq, target,
                  std::abs(freq - target), bracket, 4.0 * se);
    detail = buf;
    return std::abs(freq - target) <= tol;
}

// ---------------------------------------------------------------- 5
// Pooled mean hit count against the exact expected-hits total for the
// one-dimensional window experiment, checkpoints i = 2..100.
ExperimentConfig t2a_config(std::int64_t count, std::int64_t replicas, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.dist = StepDistribution::simple_walk(1);
    cfg.schedule_spec.kind = ScheduleKind::PowerLaw;
    cfg.schedule_spec.beta = 3.0;
    cfg.schedule_spec.start_index = 2;
    cfg.schedule_spec.count = count;
    cfg.target.mode = TargetMode::AlphaWindow;
    cfg.target.a = Vec{0.0};
    cfg.target.alpha = 1.0 / 6.0;
    cfg.form = TheoremForm::T2aWindow;
    cfg.replicas = replicas;
    cfg.master_seed = seed;
    cfg.epsilon_grid = {0.25, 0.5, 1.0};
    return cfg;
}

bool criterion5(std::string& detail) {
    ExperimentConfig cfg = t2a_config(99, 10000, 20260805);
    Schedule sched = build_schedule(cfg.schedule_spec, form_normalizer(cfg.form));
    auto eh = expected_hits(sched, cfg.target, cfg.dist);
    auto agg = run_experiment(cfg);
    const CellAggregate& cell = agg.cell(0, 0);
    double r = double(agg.replicas_completed);
    double mean = double(cell.sum_hits) / r;
    double var = (double(cell.sum_hits_sq) - r * mean * mean) / (r - 1.0);
    double se = std::sqrt(var / r);
    char buf[200];
    std::snprintf(buf, sizeof buf, "pooled mean = %.4f vs exact %.4f, |dev| = %.4f <= 4se = %.4f",
                  mean, eh.total.value, std::abs(mean - eh.total.value), 4.0 * se);
    detail = buf;
    return std::abs(mean - eh.total.value) <= 4.0 * se + eh.total.half_width;
}

// ---------------------------------------------------------------- 6
// Variance of delta strictly decreasing over counts 50/100/200 and mean
// delta within 4 standard errors of the oracle prediction at each count.
bool criterion6(std::string& detail) {
    ExperimentConfig cfg = t2a_config(200, 10000, 20260806);
    cfg.counts = {50, 100, 200};
    Schedule sched = build_schedule(cfg.schedule_spec, form_normalizer(cfg.form));
    auto eh = expected_hits(sched, cfg.target, cfg.dist);
    auto agg = run_experiment(cfg);

    double prev_var = 0.0;
    bool ok = true;
    std::string lines;
    char buf[240];
    for (std::size_t c = 0; c < agg.counts.size(); ++c) {
        auto s = delta_distribution(agg, 0, c);
        double prefix = 0.0;
        for (std::size_t i = 0; i < std::size_t(agg.counts[c]); ++i)
            prefix += eh.per_checkpoint[i].value;
        const CellAggregate& cell = agg.cell(0, c);
        double predicted = prefix / cell.normalizer / cell.limit;
        double se = std::sqrt(s.variance / double(s.replicas));
        bool mean_ok = std::abs(s.mean - predicted) <= 4.0 * se;
        bool var_ok = c == 0 || s.variance < prev_var;
        ok = ok && mean_ok && var_ok;
        std::snprintf(buf, sizeof buf,
                      "    count %-4lld mean = %.4f oracle = %.4f (4se = %.4f) var = %.4f%s\n",
                      static_cast<long long>(agg.counts[c]), s.mean, predicted, 4.0 * se,
                      s.variance, var_ok ? "" : "  <- variance did not decrease");
        lines += buf;
        prev_var = s.variance;
    }
    std::printf("%s", lines.c_str());
    detail = ok ? "variance strictly decreasing, means inside 4 standard errors"
                : "see the per-count lines above";
    return ok;
}

// ---------------------------------------------------------------- 7
// Rate-shape check: C fitted at count 50, the bound with Wilson slack must
// hold at counts 100 and 200 for eps in {0.25, 0.5, 1}, a in {0, 0.5, 1}.
//
// The (a = 1, eps = 0.5) cells fail, and not by chance: at a = 1 the
// expected hit count is only ~1.8-2.1, so the integer set of hit counts
// with |delta - 1| <= 0.5 shifts from {1, 2} at count 50 to {2, 3} at
// counts 100 and 200, and the right-skewed, positively correlated
// hit-count law puts less mass on the shifted band. The measured
// exceedance rises from 0.53 to 0.64 (stable across seeds, standard error
// 0.005; the pooled means match the exact oracle to z < 0.5), which sits
// 15+ standard errors above the count-50 fit. Fitting C at the smallest
// count is not a valid procedure at this scale for targets with so few
// expected hits; the check is kept as stated and reports the cells.
bool criterion7(std::string& detail) {
    ExperimentConfig cfg = t2a_config(200, 10000, 20260807);
    cfg.counts = {50, 100, 200};
    cfg.target.grid_n = 1.0;
    cfg.target.grid_step = 0.5; // targets -1, -0.5, 0, 0.5, 1
    auto agg = run_experiment(cfg);

    // project onto the criterion's target grid {0, 0.5, 1}
    ReplicaAggregate sub;
    sub.form = agg.form;
    sub.master_seed = agg.master_seed;
    sub.replicas_completed = agg.replicas_completed;
    sub.epsilon_grid = agg.epsilon_grid;
    sub.counts = agg.counts;
    for (std::size_t t = 0; t < agg.targets.size(); ++t) {
        double a = agg.targets[t][0];
        if (a == 0.0 || a == 0.5 || a == 1.0) {
            sub.targets.push_back(agg.targets[t]);
            sub.cells.push_back(agg.cells[t]);
        }
    }
    auto report = chebyshev_rate_check(sub, cfg.target.alpha);
    write_text_file("acceptance_c7_rates.csv", rate_report_csv(report));
    std::size_t failing = 0;
    for (const auto& row : report.rows)
        if (!row.pass) ++failing;
    // rows include the 9 fitting cells at count 50; 18 checked cells remain
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "fitted C = %.4f at count 50; %d/18 checked cells hold; archived "
                  "acceptance_c7_rates.csv",
                  report.fitted_c, int(18 - failing));
    detail = buf;
    return report.all_pass;
}

// ---------------------------------------------------------------- 8
// Box estimator on the geometric schedule 2^i, i <= 17: pooled mean of the
// per-replica hit frequency within 4 standard errors of the gaussian box
// limit, up to the Berry-Esseen bracket averaged over checkpoints.
bool criterion8(std::string& detail) {
    ExperimentConfig cfg;
    cfg.dist = StepDistribution::simple_walk(1);
    cfg.schedule_spec.kind = ScheduleKind::Geometric;
    cfg.schedule_spec.ratio = 2.0;
    cfg.schedule_spec.start_index = 1;
    cfg.schedule_spec.count = 17; // n_last = 131072
    cfg.target.mode = TargetMode::ScaledBox;
    cfg.target.a = Vec{0.0};
    cfg.target.epsilon = 0.5;
    cfg.form = TheoremForm::T3Box;
    cfg.replicas = 10000;
    cfg.master_seed = 20260809;
    auto agg = run_experiment(cfg);
    const CellAggregate& cell = agg.cell(0, 0);

    double r = double(agg.replicas_completed);
    double count = double(cell.count);
    double mean_freq = double(cell.sum_hits) / r / count;
    double var_freq =
        (double(cell.sum_hits_sq) / r - std::pow(double(cell.sum_hits) / r, 2.0)) /
        (count * count);
    double se = std::sqrt(var_freq / r);

    double limit = box_limit_value(Vec{0.0}, 0.5, Mat::identity(1));
    double bracket = 0.0;
    for (std::int64_t i = 1; i <= 17; ++i)
        bracket += oracle_constants::kBerryEsseenBox1d / std::sqrt(std::pow(2.0, double(i)));
    bracket /= count;

    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "mean freq = %.6f vs limit %.6f, |dev| = %.6f <= bracket %.6f + 4se %.6f",
                  mean_freq, limit, std::abs(mean_freq - limit), bracket, 4.0 * se);
    detail = buf;
    if (std::abs(limit - 0.382925) > 1e-6) {
        detail += " (limit drifted from 0.382925)";
        return false;
    }
    return std::abs(mean_freq - limit) <= bracket + 4.0 * se;
}

// ---------------------------------------------------------------- 9
// Running-min diagnostic for the planar simple walk at n_max = 1e5 over 100
// replicas. As stated, every replica must reach running_min = 0, i.e.
// return to the origin within 1e5 steps.
//
// The return probability within 1e5 steps is about 0.78 (the no-return
// probability of the planar walk decays like pi / ln n), so roughly 22 of
// 100 replicas do not return and the 100% requirement cannot hold except
// with probability ~1e-11. Implemented as stated; the measured return
// count is reported. The within-bound count (running_min <= max |h_k| = 1)
// is also reported, and is always 100 because |S_1| = 1.
bool criterion9(std::string& detail) {
    auto dist = StepDistribution::simple_walk(2);
    int returned = 0, within_bound = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        RngStream stream(20260810, r);
        auto t = run_min_tracker(dist, Vec{0.0, 0.0}, 0.5, 100000, stream);
        auto rep = liminf_report(t, 1.0); // max{|h_1|, |h_2|} = 1
        if (t.running_min == 0.0) ++returned;
        if (rep.flag == LiminfFlag::Pass) ++within_bound;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "running_min = 0 in %d/100 replicas (required 100); running_min <= 1 in %d/100",
                  returned, within_bound);
    detail = buf;
    return returned == 100;
}

// ---------------------------------------------------------------- 10
// Worker-count determinism: identical aggregate bytes for 1 and 4 workers.
bool criterion10(std::string& detail) {
    const char* text = R"ini(
[distribution]
family = simple_walk
dimension = 2

[schedule]
kind = iter_log_iter
start_index = 2
count = 64
parity = even

[target]
mode = lattice_point
a = 0 0

[replication]
form = t1
replicas = 257
master_seed = 20260811
epsilon_grid = 0.5 1
counts = 32 64
)ini";
    LabConfig cfg = parse_config_text(text);
    std::string dumps[2];
    int workers[2] = {1, 4};
    for (int i = 0; i < 2; ++i) {
        cfg.experiment.workers = workers[i];
        auto agg = run_experiment(cfg.experiment);
        dumps[i] = aggregate_to_json(agg, cfg).dump(2);
    }
    bool same = dumps[0] == dumps[1];
    detail = same ? "aggregates byte-identical across 1 and 4 workers (257 replicas)"
                  : "aggregates differ between worker counts";
    return same;
}

const Criterion kCriteria[] = {
    {1, "exact oracles vs exhaustive enumeration", 10.0, criterion1},
    {2, "local CLT rate grid, global K <= 5", 5.0, criterion2},
    {3, "rotation identity for even n <= 1e4", 5.0, criterion3},
    {4, "Berry-Esseen bracket at n = 1e4", 120.0, criterion4},
    {5, "pooled hits vs exact expected total", 300.0, criterion5},
    {6, "delta concentration trend over counts", 900.0, criterion6},
    {7, "rate-shape bound with fitted C", 900.0, criterion7},
    {8, "box estimator vs gaussian limit", 300.0, criterion8},
    {9, "planar running-min zero in all replicas", 60.0, criterion9},
    {10, "worker-count determinism", 60.0, criterion10},
};

} // namespace

int main(int argc, char** argv) {
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.number != only) continue;
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed = seconds_since(start);
        bool in_budget = elapsed <= c.budget_seconds;
        ok = ok && in_budget;
        std::printf("[%s] criterion %d: %s (%.1fs%s)\n    %s\n", ok ? "PASS" : "FAIL", c.number,
                    c.title, elapsed, in_budget ? "" : ", over budget", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
