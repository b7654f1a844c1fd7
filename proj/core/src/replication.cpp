#include "walklab/replication.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace walklab {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) fail(errc::insufficient_data, "wilson interval needs trials > 0");
    double p = double(successes) / double(trials);
    double n = double(trials);
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

void ExperimentConfig::validate() const {
    if (dist.dimension() == 0) fail(errc::invalid_spec, "no step distribution configured");
    if (replicas < 1) fail(errc::invalid_spec, "replicas must be >= 1");
    target.validate(dist.dimension());
    if (form_target_mode(form) != target.mode)
        fail(errc::incompatible_target,
             std::string("theorem form ") + to_string(form) + " expects target mode " +
                 to_string(form_target_mode(form)));
    if (target.mode == TargetMode::LatticePoint && !dist.is_lattice())
        fail(errc::incompatible_target, "lattice_point targets need a lattice family");
    if (form == TheoremForm::T2aWindow && dist.dimension() != 1)
        fail(errc::incompatible_target, "t2a is one-dimensional");
    if (form == TheoremForm::T2bWindow && dist.dimension() != 2)
        fail(errc::incompatible_target, "t2b is two-dimensional");
    for (double e : epsilon_grid)
        if (!(e > 0.0)) fail(errc::invalid_spec, "epsilon grid entries must be positive");
    std::int64_t max_count = schedule_spec.count;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1 || counts[i] > max_count)
            fail(errc::invalid_spec, "prefix counts must lie in [1, schedule count]");
        if (i > 0 && counts[i] <= counts[i - 1])
            fail(errc::invalid_spec, "prefix counts must be strictly increasing");
    }
}

std::vector<Vec> ExperimentConfig::target_points() const {
    std::vector<Vec> pts;
    if (target.grid_n <= 0.0) {
        pts.push_back(target.a);
        return pts;
    }
    const std::size_t d = dist.dimension();
    std::int64_t steps = static_cast<std::int64_t>(std::floor(target.grid_n / target.grid_step + 1e-9));
    std::vector<double> axis;
    for (std::int64_t j = -steps; j <= steps; ++j) axis.push_back(double(j) * target.grid_step);
    std::vector<std::size_t> idx(d, 0);
    while (true) {
        Vec p(d);
        for (std::size_t k = 0; k < d; ++k) p[k] = axis[idx[k]];
        pts.push_back(std::move(p));
        std::size_t k = 0;
        for (; k < d; ++k) {
            if (++idx[k] < axis.size()) break;
            idx[k] = 0;
        }
        if (k == d) break;
    }
    return pts;
}

namespace {

struct CellConstants {
    std::int64_t count;
    double normalizer;
    double limit;
};

struct Plan {
    Schedule schedule;
    std::vector<Vec> targets;
    std::vector<std::int64_t> counts;
    std::vector<std::vector<CellConstants>> cell_constants; // [target][count]
    bool weighted = false;                                  // C3
    Mat whiten;                                             // identity unless a window form
    bool needs_whiten = false;
};

Plan make_plan(const ExperimentConfig& config) {
    config.validate();
    Plan plan;
    plan.weighted = config.form == TheoremForm::C3Weighted;
    plan.schedule = build_schedule(config.schedule_spec, form_normalizer(config.form));
    plan.targets = config.target_points();
    if (plan.weighted && plan.targets.size() != 1)
        fail(errc::invalid_spec, "weighted runs take a single target, not a grid");
    if (plan.weighted) {
        plan.counts = {plan.schedule.last()}; // the weighted sum runs over every step
    } else if (!config.counts.empty()) {
        plan.counts = config.counts;
    } else {
        plan.counts = {plan.schedule.count()};
    }

    bool window = config.form == TheoremForm::T2aWindow || config.form == TheoremForm::T2bWindow;
    plan.needs_whiten = window;
    plan.whiten = window ? config.dist.whitener().w : Mat::identity(config.dist.dimension());

    const Mat& sigma = config.dist.sigma();
    for (const auto& a : plan.targets) {
        std::vector<CellConstants> row;
        for (std::int64_t c : plan.counts) {
            CellConstants cc;
            cc.count = c;
            cc.normalizer = normalizer_value(form_normalizer(config.form), c);
            switch (config.form) {
            case TheoremForm::T1Lattice: cc.limit = limit_value(a, &sigma, config.form); break;
            case TheoremForm::T2aWindow:
            case TheoremForm::T2bWindow: cc.limit = limit_value(a, nullptr, config.form); break;
            case TheoremForm::T3Box:
            case TheoremForm::C3Weighted:
                cc.limit = box_limit_value(a, config.target.epsilon, sigma);
                break;
            }
            row.push_back(cc);
        }
        plan.cell_constants.push_back(std::move(row));
    }
    return plan;
}

// Per-replica result: prefix hit counts per (target, count); the weighted
// form also carries its harmonic sums.
struct ReplicaOutcome {
    std::vector<std::uint32_t> hits;   // [target * counts + count_idx]
    std::vector<double> weighted;      // [target], C3 only
};

void evaluate_replica(const ExperimentConfig& config, const Plan& plan, std::uint64_t replica,
                      ReplicaOutcome& out, std::vector<std::uint8_t>& scratch) {
    const std::size_t ntargets = plan.targets.size();
    const std::size_t ncounts = plan.counts.size();
    out.hits.assign(ntargets * ncounts, 0);

    RngStream stream(config.master_seed, replica);

    if (plan.weighted) {
        out.weighted.assign(ntargets, 0.0);
        if (ntargets != 1)
            fail(errc::invalid_spec, "weighted runs take a single target");
        run_scaled_box_hits(config.dist, plan.targets[0], config.target.epsilon,
                            plan.schedule.last(), stream, scratch);
        auto res = corollary3_weighted(scratch, plan.cell_constants[0][0].limit);
        out.hits[0] = static_cast<std::uint32_t>(res.hit_count);
        out.weighted[0] = res.empirical * res.normalizer; // the raw harmonic sum
        return;
    }

    WalkCheckpoints wc = run_checkpoints(config.dist, plan.schedule, stream);
    std::vector<Vec> eval_positions;
    if (plan.needs_whiten) {
        eval_positions.reserve(wc.positions.size());
        for (const auto& p : wc.positions) eval_positions.push_back(plan.whiten.mul(p));
    }
    const std::vector<Vec>& positions = plan.needs_whiten ? eval_positions : wc.positions;

    for (std::size_t t = 0; t < ntargets; ++t) {
        const Vec& a = plan.targets[t];
        std::uint32_t running = 0;
        std::size_t next_count = 0;
        for (std::size_t i = 0; i < wc.terms.size() && next_count < ncounts; ++i) {
            std::int64_t n = wc.terms[i];
            bool hit = false;
            switch (config.form) {
            case TheoremForm::T1Lattice:
                hit = lattice_hit(wc.lattice_positions[i], a, n, config.dist);
                break;
            case TheoremForm::T2aWindow:
            case TheoremForm::T2bWindow:
                hit = alpha_window_hit(positions[i], a, n, config.target.alpha);
                break;
            case TheoremForm::T3Box:
                hit = scaled_box_hit(positions[i], a, config.target.epsilon, n);
                break;
            case TheoremForm::C3Weighted:
                break;
            }
            running += hit ? 1 : 0;
            if (static_cast<std::int64_t>(i + 1) == plan.counts[next_count]) {
                out.hits[t * ncounts + next_count] = running;
                ++next_count;
            }
        }
    }
}

void fold_replica(const Plan& plan, const std::vector<double>& epsilon_grid,
                  const ReplicaOutcome& outcome, ReplicaAggregate& agg) {
    const std::size_t ncounts = plan.counts.size();
    for (std::size_t t = 0; t < plan.targets.size(); ++t) {
        for (std::size_t c = 0; c < ncounts; ++c) {
            CellAggregate& cell = agg.cells[t][c];
            std::uint64_t h = outcome.hits[t * ncounts + c];
            cell.sum_hits += h;
            cell.sum_hits_sq += h * h;
            if (h < cell.hit_hist.size()) ++cell.hit_hist[h];
            double delta;
            if (plan.weighted) {
                double w = outcome.weighted[t];
                cell.sum_weighted += w;
                cell.sum_weighted_sq += w * w;
                delta = w / cell.normalizer / cell.limit;
            } else {
                delta = double(h) / cell.normalizer / cell.limit;
            }
            std::size_t bin = std::min(kDeltaHistBins - 1,
                                       static_cast<std::size_t>(delta / kDeltaHistBinWidth));
            ++cell.delta_hist[bin];
            for (std::size_t e = 0; e < epsilon_grid.size(); ++e)
                if (std::abs(delta - 1.0) > epsilon_grid[e]) ++cell.exceed[e];
        }
    }
    ++agg.replicas_completed;
}

} // namespace

ReplicaAggregate make_empty_aggregate(const ExperimentConfig& config) {
    Plan plan = make_plan(config);
    ReplicaAggregate agg;
    agg.form = config.form;
    agg.master_seed = config.master_seed;
    agg.epsilon_grid = config.epsilon_grid;
    agg.targets = plan.targets;
    agg.counts = plan.counts;
    agg.cells.resize(plan.targets.size());
    for (std::size_t t = 0; t < plan.targets.size(); ++t) {
        for (std::size_t c = 0; c < plan.counts.size(); ++c) {
            CellAggregate cell;
            cell.count = plan.cell_constants[t][c].count;
            cell.normalizer = plan.cell_constants[t][c].normalizer;
            cell.limit = plan.cell_constants[t][c].limit;
            cell.hit_hist.assign(static_cast<std::size_t>(std::min<std::int64_t>(cell.count, 100000)) + 1, 0);
            cell.delta_hist.assign(kDeltaHistBins, 0);
            cell.exceed.assign(config.epsilon_grid.size(), 0);
            agg.cells[t].push_back(std::move(cell));
        }
    }
    return agg;
}

void run_replica_range(const ExperimentConfig& config, std::int64_t first, std::int64_t last,
                       ReplicaAggregate& agg) {
    if (first < 0 || last < first || last > config.replicas)
        fail(errc::invalid_spec, "bad replica range");
    Plan plan = make_plan(config);

    const std::int64_t n = last - first;
    if (n == 0) return;
    int workers = config.workers > 0 ? config.workers
                                     : std::max(1u, std::thread::hardware_concurrency());
    workers = int(std::min<std::int64_t>(workers, n));

    std::vector<ReplicaOutcome> outcomes(static_cast<std::size_t>(n));
    auto work = [&](int w) {
        std::vector<std::uint8_t> scratch;
        for (std::int64_t r = first + w; r < last; r += workers)
            evaluate_replica(config, plan, static_cast<std::uint64_t>(r),
                             outcomes[static_cast<std::size_t>(r - first)], scratch);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    // in-order fold, independent of how the work was partitioned
    for (std::int64_t r = 0; r < n; ++r)
        fold_replica(plan, config.epsilon_grid, outcomes[static_cast<std::size_t>(r)], agg);
}

ReplicaAggregate run_experiment(const ExperimentConfig& config) {
    ReplicaAggregate agg = make_empty_aggregate(config);
    run_replica_range(config, 0, config.replicas, agg);
    return agg;
}

std::vector<EstimatorResult> evaluate_single_replica(const ExperimentConfig& config,
                                                     std::uint64_t replica) {
    Plan plan = make_plan(config);
    ReplicaOutcome outcome;
    std::vector<std::uint8_t> scratch;
    evaluate_replica(config, plan, replica, outcome, scratch);
    std::vector<EstimatorResult> results;
    for (std::size_t t = 0; t < plan.targets.size(); ++t) {
        for (std::size_t c = 0; c < plan.counts.size(); ++c) {
            const CellConstants& cc = plan.cell_constants[t][c];
            EstimatorResult r;
            r.theorem_form = config.form;
            r.count = cc.count;
            r.hit_count = outcome.hits[t * plan.counts.size() + c];
            r.normalizer = cc.normalizer;
            r.limit = cc.limit;
            r.empirical = plan.weighted ? outcome.weighted[t] / cc.normalizer
                                        : double(r.hit_count) / cc.normalizer;
            r.delta = r.empirical / cc.limit;
            results.push_back(r);
        }
    }
    return results;
}

ReplicaAggregate merge(const ReplicaAggregate& a, const ReplicaAggregate& b) {
    auto shape_mismatch = [] { fail(errc::schema_mismatch, "aggregate shapes differ"); };
    if (a.form != b.form || a.master_seed != b.master_seed ||
        a.epsilon_grid != b.epsilon_grid || a.counts != b.counts ||
        a.targets != b.targets)
        shape_mismatch();
    ReplicaAggregate out = a;
    out.replicas_completed += b.replicas_completed;
    for (std::size_t t = 0; t < out.cells.size(); ++t) {
        for (std::size_t c = 0; c < out.cells[t].size(); ++c) {
            CellAggregate& x = out.cells[t][c];
            const CellAggregate& y = b.cells[t][c];
            if (x.count != y.count || x.hit_hist.size() != y.hit_hist.size()) shape_mismatch();
            x.sum_hits += y.sum_hits;
            x.sum_hits_sq += y.sum_hits_sq;
            for (std::size_t i = 0; i < x.hit_hist.size(); ++i) x.hit_hist[i] += y.hit_hist[i];
            for (std::size_t i = 0; i < x.delta_hist.size(); ++i) x.delta_hist[i] += y.delta_hist[i];
            for (std::size_t i = 0; i < x.exceed.size(); ++i) x.exceed[i] += y.exceed[i];
            x.sum_weighted += y.sum_weighted;
            x.sum_weighted_sq += y.sum_weighted_sq;
        }
    }
    return out;
}

DeltaSummary delta_distribution(const ReplicaAggregate& agg, std::size_t target_idx,
                                std::size_t count_idx) {
    const CellAggregate& cell = agg.cell(target_idx, count_idx);
    const std::uint64_t r = agg.replicas_completed;
    if (r < 2) fail(errc::insufficient_replicas, "need >= 2 replicas for moments");
    DeltaSummary s;
    s.replicas = r;
    const double scale = cell.normalizer * cell.limit;
    bool weighted = agg.form == TheoremForm::C3Weighted;
    double sum = weighted ? cell.sum_weighted : double(cell.sum_hits);
    double sum_sq = weighted ? cell.sum_weighted_sq : double(cell.sum_hits_sq);
    s.mean = sum / double(r) / scale;
    double mean_raw = sum / double(r);
    s.variance = (sum_sq - double(r) * mean_raw * mean_raw) / double(r - 1) / (scale * scale);

    // quantiles from the exact hit-count histogram (delta is monotone in h)
    auto quantile = [&](double q) {
        std::uint64_t need = static_cast<std::uint64_t>(std::ceil(q * double(r)));
        need = std::max<std::uint64_t>(1, std::min(need, r));
        std::uint64_t acc = 0;
        for (std::size_t h = 0; h < cell.hit_hist.size(); ++h) {
            acc += cell.hit_hist[h];
            if (acc >= need) return double(h) / scale;
        }
        return double(cell.count) / scale;
    };
    if (!weighted) {
        s.q05 = quantile(0.05);
        s.q50 = quantile(0.50);
        s.q95 = quantile(0.95);
    }
    for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e)
        s.exceedance.emplace_back(agg.epsilon_grid[e], double(cell.exceed[e]) / double(r));
    return s;
}

RateCheckReport chebyshev_rate_check(const ReplicaAggregate& agg, double alpha) {
    if (agg.counts.size() < 2)
        fail(errc::insufficient_data, "rate check needs at least two counts");
    if (agg.epsilon_grid.empty())
        fail(errc::insufficient_data, "rate check needs an epsilon grid");
    if (agg.replicas_completed == 0) fail(errc::insufficient_data, "no replicas");
    if (agg.form == TheoremForm::C3Weighted)
        fail(errc::invalid_spec, "no rate bound for the weighted form");

    const std::size_t d = agg.targets.front().size();
    RateCheckReport rep;
    rep.fit_count = agg.counts.front();

    auto rate = [&](std::int64_t n) { return rate_function(agg.form, n, alpha, d); };

    // fit C at the smallest count
    for (std::size_t t = 0; t < agg.targets.size(); ++t)
        for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e) {
            double freq = double(agg.cell(t, 0).exceed[e]) / double(agg.replicas_completed);
            double eps = agg.epsilon_grid[e];
            rep.fitted_c = std::max(rep.fitted_c, freq * eps * eps / rate(agg.counts.front()));
        }

    for (std::size_t c = 0; c < agg.counts.size(); ++c) {
        for (std::size_t t = 0; t < agg.targets.size(); ++t) {
            for (std::size_t e = 0; e < agg.epsilon_grid.size(); ++e) {
                RateCheckRow row;
                row.form = agg.form;
                row.n = agg.counts[c];
                row.a = agg.targets[t];
                row.epsilon = agg.epsilon_grid[e];
                std::uint64_t k = agg.cell(t, c).exceed[e];
                row.freq = double(k) / double(agg.replicas_completed);
                auto wi = wilson_interval(k, agg.replicas_completed, rep.z);
                row.wilson_lo = wi.lo;
                row.wilson_hi = wi.hi;
                if (c == 0) {
                    row.bound = 0.0; // fitting count, not a check
                    row.pass = true;
                } else {
                    row.bound = rep.fitted_c / (row.epsilon * row.epsilon) * rate(row.n);
                    double slack = row.wilson_hi - row.freq;
                    row.pass = row.freq <= row.bound + slack;
                    rep.all_pass = rep.all_pass && row.pass;
                }
                rep.rows.push_back(std::move(row));
            }
        }
    }
    return rep;
}

} // namespace walklab
