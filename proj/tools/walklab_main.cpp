// Command-line front end: simulate / oracle / rates / liminf / plotdata.
// All randomness flows from the config's master_seed; outputs are
// byte-reproducible for a given config regardless of worker count.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "walklab/config.hpp"
#include "walklab/gaussian.hpp"
#include "walklab/io.hpp"
#include "walklab/oracle.hpp"
#include "walklab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(const walklab::error& e) {
    return e.code() == walklab::errc::io_failure ? kExitRuntime : kExitConfig;
}

walklab::Vec parse_vec(const std::string& text) {
    walklab::Vec v;
    std::istringstream in(text);
    double d;
    while (in >> d) v.push_back(d);
    if (v.empty() || !in.eof()) walklab::fail(walklab::errc::config_parse, "bad vector '" + text + "'");
    return v;
}

std::vector<std::int64_t> parse_ivec(const std::string& text) {
    std::vector<std::int64_t> v;
    std::istringstream in(text);
    long long d;
    while (in >> d) v.push_back(d);
    if (v.empty() || !in.eof()) walklab::fail(walklab::errc::config_parse, "bad integer list '" + text + "'");
    return v;
}

walklab::Mat parse_mat(const std::string& text) {
    std::vector<walklab::Vec> rows;
    std::istringstream in(text);
    std::string row_text;
    while (std::getline(in, row_text, ';')) rows.push_back(parse_vec(row_text));
    walklab::Mat m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            walklab::fail(walklab::errc::config_parse, "matrix must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

int env_workers() {
    if (const char* w = std::getenv("WALKLAB_WORKERS")) {
        int v = std::atoi(w);
        if (v > 0) return v;
    }
    return 0;
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::int64_t per_replica = 0;
    std::int64_t checkpoint_every = 0;
    bool resume = false;
};

int cmd_simulate(const SimulateArgs& args) {
    std::string started = walklab::utc_timestamp();
    walklab::LabConfig cfg = walklab::load_config(args.config_path);
    if (args.workers > 0) cfg.experiment.workers = args.workers;
    else if (cfg.experiment.workers == 0) cfg.experiment.workers = env_workers();

    fs::create_directories(args.out_dir);
    fs::path out(args.out_dir);
    fs::path agg_path = out / "aggregate.json";
    fs::path checkpoint_path = out / "checkpoint.json";

    walklab::ReplicaAggregate agg = walklab::make_empty_aggregate(cfg.experiment);
    std::int64_t first = 0;
    if (args.resume && fs::exists(checkpoint_path)) {
        json cj = json::parse(walklab::read_text_file(checkpoint_path.string()));
        if (cj.at("config_hash") != walklab::hash_string(cfg.hash))
            walklab::fail(walklab::errc::schema_mismatch,
                          "checkpoint belongs to a different config");
        agg = walklab::aggregate_from_json(cj.at("aggregate"));
        first = static_cast<std::int64_t>(agg.replicas_completed);
        std::cerr << "resuming at replica " << first << "\n";
    }

    const std::int64_t total = cfg.experiment.replicas;
    const std::int64_t chunk = args.checkpoint_every > 0 ? args.checkpoint_every : total;
    while (first < total) {
        std::int64_t last = std::min(total, first + chunk);
        walklab::run_replica_range(cfg.experiment, first, last, agg);
        first = last;
        if (args.checkpoint_every > 0 && first < total) {
            json cj{{"schema", "walklab.checkpoint.v1"},
                    {"config_hash", walklab::hash_string(cfg.hash)},
                    {"next_replica", first},
                    {"aggregate", walklab::aggregate_to_json(agg, cfg)}};
            walklab::write_text_file(checkpoint_path.string(), cj.dump(2) + "\n");
        }
    }

    std::vector<std::string> outputs{agg_path.filename().string()};
    walklab::write_text_file(agg_path.string(),
                             walklab::aggregate_to_json(agg, cfg).dump(2) + "\n");
    if (args.per_replica > 0) {
        fs::path csv_path = out / "replicas.csv";
        walklab::write_text_file(csv_path.string(),
                                 walklab::per_replica_csv(cfg.experiment, args.per_replica));
        outputs.push_back(csv_path.filename().string());
    }
    if (fs::exists(checkpoint_path)) fs::remove(checkpoint_path);

    fs::path manifest_path = out / "manifest.json";
    walklab::write_text_file(
        manifest_path.string(),
        walklab::manifest_json(cfg, started, walklab::utc_timestamp(), outputs).dump(2) + "\n");
    std::cerr << "wrote " << agg_path.string() << "\n";
    return kExitOk;
}

struct OracleArgs {
    std::string form;
    std::int64_t n = 0;
    std::int64_t k = -1;
    std::string a = "0";
    std::string sigma;
    double eps = 0.0;
    double alpha = 0.0;
    double rho = 0.0;
    double c_be = 0.0;
    double rate_k = walklab::oracle_constants::kLcltLatticeRateDefault;
    std::string config_path;
};

int cmd_oracle(const OracleArgs& args) {
    json inputs{{"form", args.form}};
    walklab::ProbEstimate p;
    if (args.form == "exact-binomial") {
        inputs["n"] = args.n;
        inputs["k"] = args.k;
        p = walklab::exact_binomial_prob(args.n, args.k);
    } else if (args.form == "exact1d") {
        double a = parse_vec(args.a).at(0);
        inputs["n"] = args.n;
        inputs["a"] = a;
        p = walklab::exact_simple1d_point(args.n, a);
    } else if (args.form == "exact2d") {
        auto a = parse_vec(args.a);
        inputs["n"] = args.n;
        inputs["a"] = a;
        p = walklab::exact_simple2d_point(args.n, a);
    } else if (args.form == "lclt1d") {
        double a = parse_vec(args.a).at(0);
        inputs["n"] = args.n;
        inputs["a"] = a;
        p = walklab::lclt_simple1d_asym(args.n, a);
    } else if (args.form == "lclt2d") {
        auto a = parse_vec(args.a);
        inputs["n"] = args.n;
        inputs["a"] = a;
        p = walklab::lclt_simple2d_asym(args.n, a);
    } else if (args.form == "lclt-lattice") {
        auto a = parse_vec(args.a);
        auto sigma = parse_mat(args.sigma);
        inputs["n"] = args.n;
        inputs["a"] = a;
        p = walklab::lclt_lattice_asym(args.n, a, sigma, args.rate_k);
    } else if (args.form == "box") {
        auto a = parse_vec(args.a);
        auto sigma = args.sigma.empty() ? walklab::Mat::identity(a.size()) : parse_mat(args.sigma);
        inputs["a"] = a;
        inputs["eps"] = args.eps;
        p = walklab::ProbEstimate{walklab::box_limit_value(a, args.eps, sigma),
                                  walklab::kQuadratureAbsTol, walklab::EstimateKind::Exact};
    } else if (args.form == "be-box") {
        auto a = parse_vec(args.a);
        auto sigma = args.sigma.empty() ? walklab::Mat::identity(a.size()) : parse_mat(args.sigma);
        inputs["n"] = args.n;
        inputs["a"] = a;
        inputs["eps"] = args.eps;
        inputs["rho"] = args.rho;
        p = walklab::be_box_prob(args.n, a, args.eps, sigma, args.rho, args.c_be);
    } else if (args.form == "phi") {
        auto a = parse_vec(args.a);
        inputs["n"] = args.n;
        inputs["a"] = a;
        inputs["alpha"] = args.alpha;
        double v = walklab::phi_n(a, args.n, args.alpha, a.size());
        p = walklab::ProbEstimate{v, walklab::kQuadratureAbsTol, walklab::EstimateKind::Exact};
    } else if (args.form == "expected-hits") {
        walklab::LabConfig cfg = walklab::load_config(args.config_path);
        walklab::Schedule schedule = walklab::build_schedule(
            cfg.experiment.schedule_spec, walklab::form_normalizer(cfg.experiment.form));
        auto eh = walklab::expected_hits(schedule, cfg.experiment.target, cfg.experiment.dist);
        json per = json::array();
        for (std::size_t i = 0; i < eh.per_checkpoint.size(); ++i) {
            json pj = walklab::probe_to_json(eh.per_checkpoint[i]);
            pj["n"] = schedule.terms[i];
            per.push_back(std::move(pj));
        }
        json out{{"inputs", {{"form", "expected-hits"}, {"config", args.config_path}}},
                 {"per_checkpoint", std::move(per)},
                 {"total", walklab::probe_to_json(eh.total)}};
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    } else {
        walklab::fail(walklab::errc::config_parse,
                      "unknown oracle form '" + args.form +
                          "' (exact-binomial|exact1d|exact2d|lclt1d|lclt2d|lclt-lattice|box|"
                          "be-box|phi|expected-hits)");
    }
    json out = walklab::probe_to_json(p);
    out["inputs"] = std::move(inputs);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_rates(const std::string& config_path, const std::string& out_path, int workers) {
    walklab::LabConfig cfg = walklab::load_config(config_path);
    if (workers > 0) cfg.experiment.workers = workers;
    else if (cfg.experiment.workers == 0) cfg.experiment.workers = env_workers();
    if (cfg.experiment.counts.size() < 2)
        walklab::fail(walklab::errc::insufficient_data,
                      "rates needs a [replication] counts list with >= 2 entries");
    double alpha = cfg.experiment.form == walklab::TheoremForm::T3Box ? cfg.growth_alpha
                                                                      : cfg.experiment.target.alpha;
    walklab::ReplicaAggregate agg = walklab::run_experiment(cfg.experiment);
    walklab::RateCheckReport report = walklab::chebyshev_rate_check(agg, alpha);
    walklab::write_text_file(out_path, walklab::rate_report_csv(report));
    std::cerr << "fitted C = " << report.fitted_c << " at count " << report.fit_count
              << "; all_pass = " << (report.all_pass ? "true" : "false") << "\n";
    return report.all_pass ? kExitOk : kExitCheckFailed;
}

struct LiminfArgs {
    std::string config_path;
    std::string out_path;
    double gamma = 0.5;
    std::int64_t n_max = 100000;
    std::int64_t replicas = 0; // 0 = from config
    double bound = -1.0;
    std::string snapshots;
};

int cmd_liminf(const LiminfArgs& args) {
    walklab::LabConfig cfg = walklab::load_config(args.config_path);
    const auto& dist = cfg.experiment.dist;
    walklab::Vec a = cfg.experiment.target.a;
    std::int64_t replicas = args.replicas > 0 ? args.replicas : cfg.experiment.replicas;
    std::vector<std::int64_t> snaps;
    if (!args.snapshots.empty()) snaps = parse_ivec(args.snapshots);

    json records = json::array();
    std::size_t passes = 0;
    for (std::int64_t r = 0; r < replicas; ++r) {
        walklab::RngStream stream(cfg.experiment.master_seed, static_cast<std::uint64_t>(r));
        walklab::MinTracker t =
            walklab::run_min_tracker(dist, a, args.gamma, args.n_max, stream, snaps);
        auto rep = walklab::liminf_report(
            t, args.bound >= 0.0 ? std::optional<double>(args.bound) : std::nullopt);
        if (rep.flag == walklab::LiminfFlag::Pass) ++passes;
        json rec{{"replica", r},
                 {"running_min", rep.running_min},
                 {"argmin_n", rep.argmin_n},
                 {"flag", rep.flag == walklab::LiminfFlag::Pass ? "pass" : "info"}};
        if (!t.snapshots.empty()) rec["snapshots"] = t.snapshots;
        records.push_back(std::move(rec));
    }
    json out{{"schema", "walklab.liminf.v1"},
             {"gamma", args.gamma},
             {"a", a},
             {"n_max", args.n_max},
             {"replicas", replicas},
             {"master_seed", cfg.experiment.master_seed},
             {"passes", passes},
             {"records", std::move(records)}};
    if (args.bound >= 0.0) out["bound"] = args.bound;
    if (!args.out_path.empty())
        walklab::write_text_file(args.out_path, out.dump(2) + "\n");
    else
        std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_plotdata(const std::vector<std::string>& inputs, const std::string& out_path) {
    if (inputs.empty())
        walklab::fail(walklab::errc::config_parse, "plotdata needs at least one input file");
    std::ostringstream csv;
    csv << "series,x,y,lo,hi,y_provenance\n";
    for (const auto& path : inputs) {
        json j = json::parse(walklab::read_text_file(path));
        std::string schema = j.value("schema", "");
        if (schema == "walklab.aggregate.v1") {
            walklab::ReplicaAggregate agg = walklab::aggregate_from_json(j);
            for (std::size_t t = 0; t < agg.targets.size(); ++t) {
                std::string label = "a=";
                for (std::size_t k = 0; k < agg.targets[t].size(); ++k) {
                    if (k) label += ';';
                    label += walklab::csv_double(agg.targets[t][k]);
                }
                for (std::size_t c = 0; c < agg.counts.size(); ++c) {
                    auto s = walklab::delta_distribution(agg, t, c);
                    double se = std::sqrt(s.variance / double(s.replicas));
                    csv << "delta_mean " << label << ',' << agg.counts[c] << ','
                        << walklab::csv_double(s.mean) << ','
                        << walklab::csv_double(s.mean - 4.0 * se) << ','
                        << walklab::csv_double(s.mean + 4.0 * se) << ",monte_carlo\n";
                    for (auto& [eps, freq] : s.exceedance) {
                        auto wi = walklab::wilson_interval(
                            static_cast<std::uint64_t>(std::llround(freq * double(s.replicas))),
                            s.replicas);
                        csv << "exceedance eps=" << walklab::csv_double(eps) << ' ' << label << ','
                            << agg.counts[c] << ',' << walklab::csv_double(freq) << ','
                            << walklab::csv_double(wi.lo) << ',' << walklab::csv_double(wi.hi)
                            << ",monte_carlo\n";
                    }
                }
            }
        } else if (schema == "walklab.liminf.v1") {
            for (const auto& rec : j.at("records")) {
                if (!rec.contains("snapshots")) continue;
                std::string label = "running_min replica=" + std::to_string(int(rec.at("replica")));
                for (const auto& snap : rec.at("snapshots"))
                    csv << label << ',' << snap.at(0).get<std::int64_t>() << ','
                        << walklab::csv_double(snap.at(1).get<double>()) << ",,"
                        << ",monte_carlo\n";
            }
        } else {
            walklab::fail(walklab::errc::schema_mismatch,
                          "unrecognized schema in '" + path + "'");
        }
    }
    if (!out_path.empty())
        walklab::write_text_file(out_path, csv.str());
    else
        std::cout << csv.str();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"walklab: quantitative recurrence laboratory for random walks"};
    app.set_version_flag("--version", walklab::kVersion);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a replicated experiment from a config");
    simulate->add_option("--config", sim.config_path, "experiment config file")->required();
    simulate->add_option("--out", sim.out_dir, "output directory");
    simulate->add_option("--workers", sim.workers, "worker threads (overrides WALKLAB_WORKERS)");
    simulate->add_option("--per-replica", sim.per_replica, "also write replicas.csv with this many rows");
    simulate->add_option("--checkpoint-every", sim.checkpoint_every, "write checkpoint.json every N replicas");
    simulate->add_flag("--resume", sim.resume, "resume from checkpoint.json if present");

    OracleArgs ora;
    auto* oracle = app.add_subcommand("oracle", "print a probability estimate as JSON");
    oracle->add_option("--form", ora.form, "oracle form")->required();
    oracle->add_option("--n", ora.n, "walk length");
    oracle->add_option("--k", ora.k, "binomial index");
    oracle->add_option("--a", ora.a, "target point, space-separated");
    oracle->add_option("--sigma", ora.sigma, "covariance rows, ';'-separated");
    oracle->add_option("--eps", ora.eps, "box half-width");
    oracle->add_option("--alpha", ora.alpha, "window exponent");
    oracle->add_option("--rho", ora.rho, "third absolute moment");
    oracle->add_option("--c-be", ora.c_be, "Berry-Esseen constant override");
    oracle->add_option("--rate-k", ora.rate_k, "lattice rate constant");
    oracle->add_option("--config", ora.config_path, "config file (expected-hits)");

    std::string rates_config, rates_out = "rates.csv";
    int rates_workers = 0;
    auto* rates = app.add_subcommand("rates", "multi-count exceedance rate report");
    rates->add_option("--config", rates_config, "config with a counts list")->required();
    rates->add_option("--out", rates_out, "output CSV path");
    rates->add_option("--workers", rates_workers, "worker threads");

    LiminfArgs lim;
    auto* liminf = app.add_subcommand("liminf", "running-min diagnostics");
    liminf->add_option("--config", lim.config_path, "config supplying distribution/target/seed")->required();
    liminf->add_option("--gamma", lim.gamma, "scaling exponent");
    liminf->add_option("--n-max", lim.n_max, "steps per replica");
    liminf->add_option("--replicas", lim.replicas, "replica count (default from config)");
    liminf->add_option("--bound", lim.bound, "pass bound (omit for info records)");
    liminf->add_option("--snapshots", lim.snapshots, "running-min snapshot steps, space-separated");
    liminf->add_option("--out", lim.out_path, "output JSON path (default stdout)");

    std::vector<std::string> plot_inputs;
    std::string plot_out;
    auto* plotdata = app.add_subcommand("plotdata", "tidy CSV series from result files");
    plotdata->add_option("--out", plot_out, "output CSV path (default stdout)");
    plotdata->add_option("inputs", plot_inputs, "aggregate/liminf JSON files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*oracle) return cmd_oracle(ora);
        if (*rates) return cmd_rates(rates_config, rates_out, rates_workers);
        if (*liminf) return cmd_liminf(lim);
        if (*plotdata) return cmd_plotdata(plot_inputs, plot_out);
    } catch (const walklab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
