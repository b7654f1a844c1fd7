#include "walklab/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "walklab/gaussian.hpp"
#include "walklab/version.hpp"

namespace walklab {

namespace {

const char* kAggregateSchema = "walklab.aggregate.v1";
const char* kManifestSchema = "walklab.manifest.v1";

nlohmann::json oracle_constants_json() {
    return nlohmann::json{
        {"berry_esseen_box_1d", oracle_constants::kBerryEsseenBox1d},
        {"berry_esseen_box_2d", oracle_constants::berry_esseen_box_constant(2)},
        {"lclt_rate_k_1d", oracle_constants::kLcltRateK1d},
        {"lclt_rate_k_2d", oracle_constants::kLcltRateK2d},
        {"lclt_lattice_rate_default", oracle_constants::kLcltLatticeRateDefault},
        {"quadrature_abs_tol", kQuadratureAbsTol},
    };
}

} // namespace

std::string csv_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

nlohmann::json aggregate_to_json(const ReplicaAggregate& agg, const LabConfig& config) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t t = 0; t < agg.cells.size(); ++t) {
        for (std::size_t c = 0; c < agg.cells[t].size(); ++c) {
            const CellAggregate& cell = agg.cells[t][c];
            cells.push_back(nlohmann::json{
                {"target_index", t},
                {"count_index", c},
                {"count", cell.count},
                {"normalizer", cell.normalizer},
                {"limit", cell.limit},
                {"sum_hits", cell.sum_hits},
                {"sum_hits_sq", cell.sum_hits_sq},
                {"hit_hist", cell.hit_hist},
                {"delta_hist", cell.delta_hist},
                {"exceed", cell.exceed},
                {"sum_weighted", cell.sum_weighted},
                {"sum_weighted_sq", cell.sum_weighted_sq},
            });
        }
    }
    const ScheduleSpec& ss = config.experiment.schedule_spec;
    Schedule schedule = build_schedule(ss, form_normalizer(config.experiment.form));
    nlohmann::json schedule_json{
        {"kind", to_string(ss.kind)},
        {"start_index", ss.start_index},
        {"count", ss.count},
        {"parity", to_string(ss.parity)},
        {"normalizer", to_string(schedule.normalizer_kind)},
        {"terms", schedule.terms},
    };
    if (ss.kind == ScheduleKind::PowerLaw || ss.kind == ScheduleKind::PowerLogPower)
        schedule_json["beta"] = ss.beta;
    if (ss.kind == ScheduleKind::Geometric) schedule_json["ratio"] = ss.ratio;

    return nlohmann::json{
        {"schema", kAggregateSchema},
        {"config_hash", hash_string(config.hash)},
        {"canonical_config", config.canonical},
        {"form", to_string(agg.form)},
        {"master_seed", agg.master_seed},
        {"replicas", agg.replicas_completed},
        {"epsilon_grid", agg.epsilon_grid},
        {"counts", agg.counts},
        {"targets", agg.targets},
        {"schedule", std::move(schedule_json)},
        {"delta_hist_bin_width", kDeltaHistBinWidth},
        {"delta_hist_max", kDeltaHistMax},
        {"generator", kGenerator},
        {"oracle_constants", oracle_constants_json()},
        {"cells", std::move(cells)},
    };
}

ReplicaAggregate aggregate_from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j["schema"] != kAggregateSchema)
        fail(errc::schema_mismatch, "expected schema " + std::string(kAggregateSchema));
    ReplicaAggregate agg;
    agg.form = theorem_form_from_string(j.at("form").get<std::string>());
    agg.master_seed = j.at("master_seed").get<std::uint64_t>();
    agg.replicas_completed = j.at("replicas").get<std::uint64_t>();
    agg.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
    agg.counts = j.at("counts").get<std::vector<std::int64_t>>();
    agg.targets = j.at("targets").get<std::vector<Vec>>();
    agg.cells.assign(agg.targets.size(), {});
    for (auto& row : agg.cells) row.resize(agg.counts.size());
    for (const auto& cj : j.at("cells")) {
        CellAggregate cell;
        cell.count = cj.at("count").get<std::int64_t>();
        cell.normalizer = cj.at("normalizer").get<double>();
        cell.limit = cj.at("limit").get<double>();
        cell.sum_hits = cj.at("sum_hits").get<std::uint64_t>();
        cell.sum_hits_sq = cj.at("sum_hits_sq").get<std::uint64_t>();
        cell.hit_hist = cj.at("hit_hist").get<std::vector<std::uint64_t>>();
        cell.delta_hist = cj.at("delta_hist").get<std::vector<std::uint64_t>>();
        cell.exceed = cj.at("exceed").get<std::vector<std::uint64_t>>();
        cell.sum_weighted = cj.at("sum_weighted").get<double>();
        cell.sum_weighted_sq = cj.at("sum_weighted_sq").get<double>();
        std::size_t t = cj.at("target_index").get<std::size_t>();
        std::size_t c = cj.at("count_index").get<std::size_t>();
        if (t >= agg.targets.size() || c >= agg.counts.size())
            fail(errc::schema_mismatch, "cell index out of range");
        agg.cells[t][c] = std::move(cell);
    }
    return agg;
}

nlohmann::json probe_to_json(const ProbEstimate& p) {
    return nlohmann::json{
        {"value", p.value},
        {"half_width", p.half_width},
        {"kind", to_string(p.kind)},
    };
}

nlohmann::json manifest_json(const LabConfig& config, const std::string& started_utc,
                             const std::string& finished_utc,
                             const std::vector<std::string>& outputs) {
    return nlohmann::json{
        {"schema", kManifestSchema},
        {"config_hash", hash_string(config.hash)},
        {"master_seed", config.experiment.master_seed},
        {"version", kVersion},
        {"generator", kGenerator},
        {"oracle_constants", oracle_constants_json()},
        {"started_utc", started_utc},
        {"finished_utc", finished_utc},
        {"outputs", outputs},
    };
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_failure, "cannot write '" + path + "'");
    out << text;
    if (!out) fail(errc::io_failure, "short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_failure, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string rate_report_csv(const RateCheckReport& report) {
    std::ostringstream out;
    std::size_t d = report.rows.empty() ? 1 : report.rows.front().a.size();
    out << "form,n";
    for (std::size_t k = 0; k < d; ++k) out << ",a" << k;
    out << ",epsilon,freq,wilson_lo,wilson_hi,bound,pass,freq_provenance\n";
    for (const auto& row : report.rows) {
        out << to_string(row.form) << ',' << row.n;
        for (std::size_t k = 0; k < d; ++k) out << ',' << csv_double(row.a[k]);
        out << ',' << csv_double(row.epsilon) << ',' << csv_double(row.freq) << ','
            << csv_double(row.wilson_lo) << ',' << csv_double(row.wilson_hi) << ','
            << csv_double(row.bound) << ',' << (row.pass ? 1 : 0) << ",monte_carlo\n";
    }
    return out.str();
}

std::string per_replica_csv(const ExperimentConfig& config, std::int64_t replicas_limit) {
    std::ostringstream out;
    const std::size_t d = config.dist.dimension();
    out << "theorem_form";
    for (std::size_t k = 0; k < d; ++k) out << ",a" << k;
    out << ",window,count,hit_count,normalizer,empirical,limit,delta"
        << ",normalizer_nlast,delta_nlast,seed,replica_index,value_provenance,limit_provenance\n";

    Schedule schedule = build_schedule(config.schedule_spec, form_normalizer(config.form));
    auto points = config.target_points();
    double window = config.target.mode == TargetMode::AlphaWindow ? config.target.alpha
                                                                  : config.target.epsilon;
    const char* limit_prov = (config.form == TheoremForm::T3Box ||
                              config.form == TheoremForm::C3Weighted)
                                 ? "quadrature"
                                 : "closed_form";
    // alternative normalizer evaluated at the last walk length instead of the
    // checkpoint count
    std::int64_t r_max = std::min(replicas_limit, config.replicas);
    for (std::int64_t r = 0; r < r_max; ++r) {
        auto results = evaluate_single_replica(config, static_cast<std::uint64_t>(r));
        std::size_t counts_n = results.size() / points.size();
        for (std::size_t i = 0; i < results.size(); ++i) {
            const EstimatorResult& res = results[i];
            const Vec& a = points[i / counts_n];
            std::int64_t nlast =
                config.form == TheoremForm::C3Weighted
                    ? schedule.last()
                    : schedule.terms[static_cast<std::size_t>(res.count - 1)];
            double norm_nlast = normalizer_value(form_normalizer(config.form), nlast);
            double delta_nlast = res.empirical * res.normalizer / norm_nlast / res.limit;
            out << to_string(res.theorem_form);
            for (std::size_t k = 0; k < d; ++k) out << ',' << csv_double(a[k]);
            out << ',' << csv_double(window) << ',' << res.count << ',' << res.hit_count << ','
                << csv_double(res.normalizer) << ',' << csv_double(res.empirical) << ','
                << csv_double(res.limit) << ',' << csv_double(res.delta) << ','
                << csv_double(norm_nlast) << ',' << csv_double(delta_nlast) << ','
                << config.master_seed << ',' << r << ",monte_carlo," << limit_prov << '\n';
        }
    }
    return out.str();
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace walklab
