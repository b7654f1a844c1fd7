#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "walklab/config.hpp"
#include "walklab/io.hpp"
#include "walklab/replication.hpp"

using namespace walklab;

namespace {

ExperimentConfig small_t2a(std::int64_t replicas = 200, std::uint64_t seed = 11) {
    ExperimentConfig c;
    c.dist = StepDistribution::simple_walk(1);
    c.schedule_spec.kind = ScheduleKind::PowerLaw;
    c.schedule_spec.beta = 3.0;
    c.schedule_spec.start_index = 2;
    c.schedule_spec.count = 20;
    c.target.mode = TargetMode::AlphaWindow;
    c.target.a = Vec{0.0};
    c.target.alpha = 1.0 / 6.0;
    c.form = TheoremForm::T2aWindow;
    c.replicas = replicas;
    c.master_seed = seed;
    c.epsilon_grid = {0.25, 0.5, 1.0};
    c.counts = {10, 20};
    c.workers = 1;
    return c;
}

ExperimentConfig small_t3(std::int64_t replicas = 500, std::uint64_t seed = 4242) {
    ExperimentConfig c;
    c.dist = StepDistribution::simple_walk(1);
    c.schedule_spec.kind = ScheduleKind::Geometric;
    c.schedule_spec.ratio = 2.0;
    c.schedule_spec.start_index = 1;
    c.schedule_spec.count = 10;
    c.target.mode = TargetMode::ScaledBox;
    c.target.a = Vec{0.0};
    c.target.epsilon = 0.5;
    c.form = TheoremForm::T3Box;
    c.replicas = replicas;
    c.master_seed = seed;
    c.epsilon_grid = {0.5};
    c.workers = 1;
    return c;
}

const char* kSampleConfig = R"ini(
# sample
[distribution]
family = simple_walk
dimension = 1

[schedule]
kind = power
beta = 3
start_index = 2
count = 20
parity = none

[target]
mode = alpha_window
a = 0
alpha = 0.16666666666666666

[replication]
form = t2a
replicas = 50
master_seed = 7
epsilon_grid = 0.5 1
counts = 10 20
)ini";

} // namespace

TEST_SUITE_BEGIN("replication");

TEST_CASE("wilson interval basics") {
    auto wi = wilson_interval(0, 100);
    CHECK(wi.lo == 0.0);
    CHECK(wi.hi > 0.0);
    CHECK(wi.hi < 0.2);
    auto wi2 = wilson_interval(50, 100, 2.0);
    CHECK(wi2.lo == doctest::Approx(0.5 - 2.0 * 0.05).epsilon(0.05));
    CHECK(wi2.lo < 0.5);
    CHECK(wi2.hi > 0.5);
    CHECK_THROWS_AS(wilson_interval(1, 0), error);
}

TEST_CASE("single replica fold equals the per-replica evaluation") {
    auto cfg = small_t2a(1);
    auto agg = run_experiment(cfg);
    auto results = evaluate_single_replica(cfg, 0);
    REQUIRE(results.size() == 2); // one target, two counts
    CHECK(agg.replicas_completed == 1);
    for (std::size_t c = 0; c < 2; ++c) {
        const CellAggregate& cell = agg.cell(0, c);
        CHECK(cell.sum_hits == std::uint64_t(results[c].hit_count));
        CHECK(cell.sum_hits_sq == std::uint64_t(results[c].hit_count * results[c].hit_count));
        CHECK(cell.hit_hist[std::size_t(results[c].hit_count)] == 1);
        CHECK(cell.normalizer == results[c].normalizer);
        CHECK(cell.limit == results[c].limit);
    }
}

TEST_CASE("worker count never changes the aggregate") {
    auto c1 = small_t2a(97); // deliberately not a multiple of the worker count
    c1.workers = 1;
    auto c3 = small_t2a(97);
    c3.workers = 3;
    auto a1 = run_experiment(c1);
    auto a3 = run_experiment(c3);
    LabConfig lc1;
    lc1.experiment = c1;
    lc1.canonical = canonical_config_text(lc1);
    lc1.hash = fnv1a64(lc1.canonical);
    LabConfig lc3;
    lc3.experiment = c3;
    lc3.canonical = canonical_config_text(lc3);
    lc3.hash = fnv1a64(lc3.canonical);
    CHECK(aggregate_to_json(a1, lc1).dump() == aggregate_to_json(a3, lc3).dump());
}

TEST_CASE("chunked runs reproduce the one-shot aggregate exactly") {
    auto cfg = small_t3(101);
    auto whole = run_experiment(cfg);
    auto agg = make_empty_aggregate(cfg);
    run_replica_range(cfg, 0, 37, agg);
    run_replica_range(cfg, 37, 70, agg);
    run_replica_range(cfg, 70, 101, agg);
    CHECK(agg.replicas_completed == whole.replicas_completed);
    for (std::size_t t = 0; t < whole.cells.size(); ++t)
        for (std::size_t c = 0; c < whole.cells[t].size(); ++c) {
            CHECK(agg.cells[t][c].sum_hits == whole.cells[t][c].sum_hits);
            CHECK(agg.cells[t][c].sum_hits_sq == whole.cells[t][c].sum_hits_sq);
            CHECK(agg.cells[t][c].hit_hist == whole.cells[t][c].hit_hist);
            CHECK(agg.cells[t][c].delta_hist == whole.cells[t][c].delta_hist);
            CHECK(agg.cells[t][c].exceed == whole.cells[t][c].exceed);
        }
}

TEST_CASE("merge is commutative and associative on every field") {
    auto cfg = small_t3(60);
    auto a = make_empty_aggregate(cfg);
    run_replica_range(cfg, 0, 20, a);
    auto b = make_empty_aggregate(cfg);
    run_replica_range(cfg, 20, 40, b);
    auto c = make_empty_aggregate(cfg);
    run_replica_range(cfg, 40, 60, c);

    auto ab_c = merge(merge(a, b), c);
    auto a_bc = merge(a, merge(b, c));
    auto ba_c = merge(merge(b, a), c);
    for (const auto* m : {&ab_c, &a_bc, &ba_c}) {
        CHECK(m->replicas_completed == 60);
        CHECK(m->cell(0, 0).sum_hits == ab_c.cell(0, 0).sum_hits);
        CHECK(m->cell(0, 0).hit_hist == ab_c.cell(0, 0).hit_hist);
        CHECK(m->cell(0, 0).exceed == ab_c.cell(0, 0).exceed);
    }
    // and the merged integer statistics match a straight run
    auto whole = run_experiment(cfg);
    CHECK(ab_c.cell(0, 0).sum_hits == whole.cell(0, 0).sum_hits);
    CHECK(ab_c.cell(0, 0).delta_hist == whole.cell(0, 0).delta_hist);
}

TEST_CASE("pooled hits stay within the oracle bracket") {
    auto cfg = small_t2a(2000, 99991);
    auto agg = run_experiment(cfg);
    Schedule sched = build_schedule(cfg.schedule_spec, form_normalizer(cfg.form));
    auto eh = expected_hits(sched, cfg.target, cfg.dist);
    const CellAggregate& cell = agg.cell(0, 1);
    double mean = double(cell.sum_hits) / double(agg.replicas_completed);
    double mean_sq = double(cell.sum_hits_sq) / double(agg.replicas_completed);
    double se = std::sqrt((mean_sq - mean * mean) / double(agg.replicas_completed));
    CHECK(std::abs(mean - eh.total.value) <= 4.0 * se + eh.total.half_width);
}

TEST_CASE("delta distribution summaries") {
    auto cfg = small_t3(400);
    auto agg = run_experiment(cfg);
    auto s = delta_distribution(agg, 0);
    CHECK(s.replicas == 400);
    CHECK(s.variance >= 0.0);
    CHECK(s.q05 <= s.q50);
    CHECK(s.q50 <= s.q95);
    REQUIRE(s.exceedance.size() == 1);
    // exceedance frequency matches a hand fold over the hit histogram
    const CellAggregate& cell = agg.cell(0, 0);
    std::uint64_t manual = 0;
    for (std::size_t h = 0; h < cell.hit_hist.size(); ++h) {
        double delta = double(h) / cell.normalizer / cell.limit;
        if (std::abs(delta - 1.0) > 0.5) manual += cell.hit_hist[h];
    }
    CHECK(s.exceedance[0].second == doctest::Approx(double(manual) / 400.0).epsilon(1e-12));
    // cauchy-schwarz on the stored sums
    double sum = double(cell.sum_hits), sum_sq = double(cell.sum_hits_sq);
    CHECK(sum_sq * 400.0 >= sum * sum - 1e-9);
    CHECK_THROWS_AS(delta_distribution(run_experiment(small_t3(1)), 0), error);
}

TEST_CASE("exceedance is non-increasing in epsilon") {
    auto cfg = small_t2a(500);
    cfg.epsilon_grid = {0.1, 0.25, 0.5, 0.75, 1.0, 2.0};
    auto agg = run_experiment(cfg);
    for (std::size_t c = 0; c < agg.counts.size(); ++c) {
        const auto& exceed = agg.cell(0, c).exceed;
        for (std::size_t e = 0; e + 1 < exceed.size(); ++e) CHECK(exceed[e] >= exceed[e + 1]);
    }
}

TEST_CASE("synthetic rate check fixtures") {
    // build an aggregate by hand: freq = r(n)/eps^2 exactly at every cell
    ExperimentConfig cfg = small_t2a(1000);
    cfg.counts = {10, 20};
    auto agg = make_empty_aggregate(cfg);
    const std::uint64_t R = 1000;
    agg.replicas_completed = R;
    double alpha = 1.0 / 6.0;
    for (std::size_t c = 0; c < agg.counts.size(); ++c) {
        double r = rate_function(TheoremForm::T2aWindow, agg.counts[c], alpha, 1);
        for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e) {
            double eps = agg.epsilon_grid[e];
            double freq = std::min(1.0, r / (eps * eps));
            agg.cells[0][c].exceed[e] = std::uint64_t(std::llround(freq * double(R)));
        }
    }
    auto rep = chebyshev_rate_check(agg, alpha);
    CHECK(rep.fitted_c == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.all_pass);

    // frequencies constant in n violate the decay
    for (std::size_t c = 0; c < agg.counts.size(); ++c)
        for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e)
            agg.cells[0][c].exceed[e] = 800;
    auto bad = chebyshev_rate_check(agg, alpha);
    CHECK_FALSE(bad.all_pass);

    // all-zero exceedances fit C = 0 and pass
    for (std::size_t c = 0; c < agg.counts.size(); ++c)
        for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e)
            agg.cells[0][c].exceed[e] = 0;
    auto zero = chebyshev_rate_check(agg, alpha);
    CHECK(zero.fitted_c == 0.0);
    CHECK(zero.all_pass);

    ExperimentConfig single = small_t2a(10);
    single.counts = {20};
    auto sagg = run_experiment(single);
    CHECK_THROWS_AS(chebyshev_rate_check(sagg, alpha), error);
}

TEST_CASE("weighted form experiment") {
    ExperimentConfig c;
    c.dist = StepDistribution::simple_walk(1);
    c.schedule_spec.kind = ScheduleKind::Geometric;
    c.schedule_spec.ratio = 2.0;
    c.schedule_spec.start_index = 1;
    c.schedule_spec.count = 10; // n_max = 1024
    c.target.mode = TargetMode::ScaledBox;
    c.target.a = Vec{0.0};
    c.target.epsilon = 0.5;
    c.form = TheoremForm::C3Weighted;
    c.replicas = 50;
    c.master_seed = 13;
    c.workers = 1;
    auto agg = run_experiment(c);
    CHECK(agg.counts == std::vector<std::int64_t>{1024});
    const CellAggregate& cell = agg.cell(0, 0);
    CHECK(cell.sum_weighted > 0.0);
    CHECK(cell.normalizer == doctest::Approx(std::log(1024.0)).epsilon(1e-12));
    // replaying one replica through the public op matches the fold
    auto results = evaluate_single_replica(c, 0);
    CHECK(results[0].theorem_form == TheoremForm::C3Weighted);
    CHECK(results[0].count == 1024);
}

TEST_CASE("planar window form runs end to end inside the oracle bracket") {
    ExperimentConfig c;
    c.dist = StepDistribution::uniform_box({std::sqrt(3.0), std::sqrt(3.0)});
    c.schedule_spec.kind = ScheduleKind::PowerLogPower;
    c.schedule_spec.beta = 5.0;
    c.schedule_spec.start_index = 2;
    c.schedule_spec.count = 7; // n up to (8 ln 8)^5 ~ 1.3e6
    c.target.mode = TargetMode::AlphaWindow;
    c.target.a = Vec{0.0, 0.0};
    c.target.alpha = 0.4;
    c.form = TheoremForm::T2bWindow;
    c.replicas = 100;
    c.master_seed = 777;
    c.workers = 1;
    auto agg = run_experiment(c);
    Schedule sched = build_schedule(c.schedule_spec, form_normalizer(c.form));
    auto eh = expected_hits(sched, c.target, c.dist);
    CHECK(eh.total.kind == EstimateKind::BerryEsseenInterval);
    const CellAggregate& cell = agg.cell(0, 0);
    double mean = double(cell.sum_hits) / 100.0;
    double mean_sq = double(cell.sum_hits_sq) / 100.0;
    double se = std::sqrt(std::max(mean_sq - mean * mean, 1e-12) / 100.0);
    CHECK(std::abs(mean - eh.total.value) <= 4.0 * se + eh.total.half_width);
    CHECK(cell.normalizer == doctest::Approx(std::log(std::log(7.0))).epsilon(1e-12));
}

TEST_CASE("lattice-point form runs on an aperiodic walk") {
    Mat basis = Mat::identity(2);
    ExperimentConfig c;
    c.dist = StepDistribution::lattice_atoms(
        LatticeSpec{2, basis, Vec{0.0, 0.0}},
        {{Vec{0.0, 0.0}, 0.2},
         {Vec{1.0, 0.0}, 0.2},
         {Vec{-1.0, 0.0}, 0.2},
         {Vec{0.0, 1.0}, 0.2},
         {Vec{0.0, -1.0}, 0.2}});
    c.schedule_spec.kind = ScheduleKind::IterLogIter;
    c.schedule_spec.start_index = 2;
    c.schedule_spec.count = 30;
    c.target.mode = TargetMode::LatticePoint;
    c.target.a = Vec{0.0, 0.0};
    c.form = TheoremForm::T1Lattice;
    c.replicas = 100;
    c.master_seed = 888;
    c.workers = 1;
    auto agg = run_experiment(c);
    const CellAggregate& cell = agg.cell(0, 0);
    CHECK(cell.sum_hits > 0); // visits at the origin occur on almost every seed
    CHECK(cell.limit == doctest::Approx(1.0 / (2.0 * M_PI * 0.4)).epsilon(1e-12));
    auto s = delta_distribution(agg, 0);
    CHECK(s.mean > 0.0);
}

TEST_CASE("config validation catches incompatible pairs") {
    auto cfg = small_t2a();
    cfg.form = TheoremForm::T3Box;
    CHECK_THROWS_AS(cfg.validate(), error); // box form with a window target
    auto cfg2 = small_t2a();
    cfg2.counts = {20, 10};
    CHECK_THROWS_AS(cfg2.validate(), error); // counts must increase
    auto cfg3 = small_t2a();
    cfg3.dist = StepDistribution::gaussian(Mat::identity(2));
    CHECK_THROWS_AS(cfg3.validate(), error); // t2a is one-dimensional
}

TEST_CASE("target grids enumerate the sweep box") {
    auto cfg = small_t2a();
    cfg.target.grid_n = 1.0;
    cfg.target.grid_step = 0.5;
    auto pts = cfg.target_points();
    CHECK(pts.size() == 5); // -1 -0.5 0 0.5 1
    cfg.dist = StepDistribution::simple_walk(2);
    cfg.form = TheoremForm::T2bWindow;
    cfg.target.a = Vec{0.0, 0.0};
    cfg.target.alpha = 0.4;
    auto pts2 = cfg.target_points();
    CHECK(pts2.size() == 25);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("config");

TEST_CASE("config parses and canonical form round-trips") {
    LabConfig cfg = parse_config_text(kSampleConfig);
    CHECK(cfg.experiment.form == TheoremForm::T2aWindow);
    CHECK(cfg.experiment.replicas == 50);
    CHECK(cfg.experiment.schedule_spec.count == 20);
    LabConfig again = parse_config_text(cfg.canonical);
    CHECK(again.canonical == cfg.canonical);
    CHECK(again.hash == cfg.hash);
    CHECK(hash_string(cfg.hash).substr(0, 2) == "0x");
}

TEST_CASE("alpha outside the window range names the valid interval") {
    std::string bad = kSampleConfig;
    auto pos = bad.find("alpha = 0.16666666666666666");
    bad.replace(pos, std::string("alpha = 0.16666666666666666").size(), "alpha = 0.6");
    try {
        parse_config_text(bad);
        CHECK(false);
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("[1/6, 1/2)") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_config_text("[distribution]\nfamily == oops\n");
        CHECK(false);
    } catch (const error& e) {
        std::string msg = e.what();
        CHECK(msg.find("line") != std::string::npos);
        CHECK(e.code() == errc::config_parse);
    }
    CHECK_THROWS_AS(parse_config_text("[nonsense]\nx = 1\n"), error);
}

TEST_CASE("beta must match the window exponent") {
    std::string bad = kSampleConfig;
    auto pos = bad.find("beta = 3");
    bad.replace(pos, 8, "beta = 4");
    CHECK_THROWS_AS(parse_config_text(bad), error);
}

TEST_CASE("every sample config in configs/ parses") {
    for (const char* name :
         {"theorem1.ini", "theorem1_simple.ini", "theorem2a.ini", "theorem2b.ini",
          "theorem3.ini", "corollary1.ini", "corollary3.ini"}) {
        LabConfig cfg = load_config(std::string(WALKLAB_CONFIG_DIR) + "/" + name);
        CHECK(cfg.experiment.replicas >= 1);
        LabConfig again = parse_config_text(cfg.canonical);
        CHECK(again.hash == cfg.hash);
    }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("io");

TEST_CASE("aggregate json round trip") {
    auto cfg = small_t3(40);
    auto agg = run_experiment(cfg);
    LabConfig lc;
    lc.experiment = cfg;
    lc.canonical = canonical_config_text(lc);
    lc.hash = fnv1a64(lc.canonical);
    auto j = aggregate_to_json(agg, lc);
    auto back = aggregate_from_json(j);
    CHECK(back.replicas_completed == agg.replicas_completed);
    CHECK(back.counts == agg.counts);
    CHECK(back.cell(0, 0).sum_hits == agg.cell(0, 0).sum_hits);
    CHECK(back.cell(0, 0).hit_hist == agg.cell(0, 0).hit_hist);
    CHECK(aggregate_to_json(back, lc).dump() == j.dump());
    nlohmann::json wrong{{"schema", "walklab.other.v1"}};
    CHECK_THROWS_AS(aggregate_from_json(wrong), error);
}

TEST_CASE("csv outputs") {
    auto cfg = small_t3(10);
    std::string csv = per_replica_csv(cfg, 5);
    CHECK(csv.find("theorem_form,a0,window,count,hit_count") == 0);
    CHECK(csv.find("monte_carlo") != std::string::npos);
    // 5 replicas, one target, one count, plus header
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 6);

    auto agg = run_experiment(small_t2a(100));
    auto rep = chebyshev_rate_check(agg, 1.0 / 6.0);
    std::string rates = rate_report_csv(rep);
    CHECK(rates.find("form,n,a0,epsilon,freq,wilson_lo,wilson_hi,bound,pass") == 0);
    CHECK(std::size_t(std::count(rates.begin(), rates.end(), '\n')) == rep.rows.size() + 1);
}

TEST_CASE("csv doubles round trip at 17 digits") {
    for (double v : {0.1, 1.0 / 3.0, 0.6826894921370859, 3.141592653589793e-7}) {
        CHECK(std::stod(csv_double(v)) == v);
    }
}

TEST_SUITE_END();
