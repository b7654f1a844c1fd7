#include "walklab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace walklab {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
};

using Section = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, Section>;

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    fail(errc::config_parse, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

RawConfig parse_raw(const std::string& text) {
    RawConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) parse_fail(lineno, "empty section name");
            cfg[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "expected key = value");
        if (section.empty()) parse_fail(lineno, "key outside any [section]");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(lineno, "empty key");
        if (cfg[section].count(key)) parse_fail(lineno, "duplicate key '" + key + "'");
        cfg[section][key] = RawValue{value, lineno};
    }
    return cfg;
}

class Reader {
public:
    Reader(const RawConfig& cfg, std::string section) : cfg_(cfg), section_(std::move(section)) {}

    bool has(const std::string& key) const {
        auto s = cfg_.find(section_);
        return s != cfg_.end() && s->second.count(key) > 0;
    }

    const RawValue& raw(const std::string& key) const {
        auto s = cfg_.find(section_);
        if (s == cfg_.end()) fail(errc::config_parse, "missing section [" + section_ + "]");
        auto k = s->second.find(key);
        if (k == s->second.end())
            fail(errc::config_parse, "section [" + section_ + "]: missing key '" + key + "'");
        return k->second;
    }

    std::string str(const std::string& key) const { return raw(key).text; }

    double num(const std::string& key) const {
        const RawValue& v = raw(key);
        try {
            std::size_t pos = 0;
            double d = std::stod(v.text, &pos);
            if (pos != v.text.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            parse_fail(v.line, "field '" + key + "': expected a number, got '" + v.text + "'");
        }
    }

    std::int64_t integer(const std::string& key) const {
        const RawValue& v = raw(key);
        try {
            std::size_t pos = 0;
            long long d = std::stoll(v.text, &pos);
            if (pos != v.text.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            parse_fail(v.line, "field '" + key + "': expected an integer, got '" + v.text + "'");
        }
    }

    std::uint64_t uinteger(const std::string& key) const {
        const RawValue& v = raw(key);
        try {
            std::size_t pos = 0;
            unsigned long long d = std::stoull(v.text, &pos);
            if (pos != v.text.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            parse_fail(v.line, "field '" + key + "': expected an unsigned integer");
        }
    }

    Vec vec(const std::string& key) const {
        const RawValue& v = raw(key);
        Vec out;
        std::istringstream in(v.text);
        double d;
        while (in >> d) out.push_back(d);
        if (!in.eof()) parse_fail(v.line, "field '" + key + "': expected space-separated reals");
        if (out.empty()) parse_fail(v.line, "field '" + key + "': empty vector");
        return out;
    }

    std::vector<std::int64_t> ivec(const std::string& key) const {
        const RawValue& v = raw(key);
        std::vector<std::int64_t> out;
        std::istringstream in(v.text);
        long long d;
        while (in >> d) out.push_back(d);
        if (!in.eof()) parse_fail(v.line, "field '" + key + "': expected space-separated integers");
        if (out.empty()) parse_fail(v.line, "field '" + key + "': empty list");
        return out;
    }

    // rows separated by ';'
    Mat matrix(const std::string& key) const {
        const RawValue& v = raw(key);
        std::vector<Vec> rows;
        std::istringstream in(v.text);
        std::string row_text;
        while (std::getline(in, row_text, ';')) {
            Vec row;
            std::istringstream rin(row_text);
            double d;
            while (rin >> d) row.push_back(d);
            if (row.empty()) parse_fail(v.line, "field '" + key + "': empty matrix row");
            rows.push_back(std::move(row));
        }
        if (rows.empty()) parse_fail(v.line, "field '" + key + "': empty matrix");
        Mat m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                parse_fail(v.line, "field '" + key + "': matrix must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    int line_of(const std::string& key) const { return raw(key).line; }

private:
    const RawConfig& cfg_;
    std::string section_;
};

ScheduleKind schedule_kind_from(const std::string& s, int line) {
    if (s == "iter_log_iter") return ScheduleKind::IterLogIter;
    if (s == "power") return ScheduleKind::PowerLaw;
    if (s == "power_log_power") return ScheduleKind::PowerLogPower;
    if (s == "geometric") return ScheduleKind::Geometric;
    if (s == "explicit") return ScheduleKind::Explicit;
    parse_fail(line, "unknown schedule kind '" + s +
                         "' (iter_log_iter|power|power_log_power|geometric|explicit)");
}

TargetMode target_mode_from(const std::string& s, int line) {
    if (s == "lattice_point") return TargetMode::LatticePoint;
    if (s == "alpha_window") return TargetMode::AlphaWindow;
    if (s == "scaled_box") return TargetMode::ScaledBox;
    parse_fail(line, "unknown target mode '" + s + "' (lattice_point|alpha_window|scaled_box)");
}

StepDistribution build_distribution(const Reader& r) {
    std::string family = r.str("family");
    if (family == "simple_walk") {
        return StepDistribution::simple_walk(static_cast<std::size_t>(r.integer("dimension")));
    }
    if (family == "gaussian") {
        return StepDistribution::gaussian(r.matrix("sigma"));
    }
    if (family == "uniform_box") {
        return StepDistribution::uniform_box(r.vec("halfwidth"));
    }
    if (family == "lattice_atoms") {
        Mat basis = r.matrix("basis");
        Vec offset = r.has("offset") ? r.vec("offset") : Vec(basis.dim(), 0.0);
        LatticeSpec lat{basis.dim(), basis, offset};
        std::vector<std::pair<Vec, double>> atoms;
        const RawValue& v = r.raw("atoms");
        std::istringstream in(v.text);
        std::string entry;
        while (std::getline(in, entry, ';')) {
            std::size_t colon = entry.find(':');
            if (colon == std::string::npos)
                parse_fail(v.line, "atom entry must be 'x.. : prob'");
            Vec point;
            std::istringstream pin(entry.substr(0, colon));
            double d;
            while (pin >> d) point.push_back(d);
            double prob = std::stod(trim(entry.substr(colon + 1)));
            atoms.emplace_back(std::move(point), prob);
        }
        return StepDistribution::lattice_atoms(std::move(lat), std::move(atoms));
    }
    if (family == "uniform_mixture") {
        // entries "weight : shift.. : halfwidth.." separated by ';'
        std::vector<MixtureComponent> comps;
        const RawValue& v = r.raw("components");
        std::istringstream in(v.text);
        std::string entry;
        while (std::getline(in, entry, ';')) {
            std::size_t c1 = entry.find(':');
            std::size_t c2 = c1 == std::string::npos ? std::string::npos : entry.find(':', c1 + 1);
            if (c2 == std::string::npos)
                parse_fail(v.line, "mixture entry must be 'weight : shift.. : halfwidth..'");
            MixtureComponent mc;
            mc.weight = std::stod(trim(entry.substr(0, c1)));
            std::istringstream sin(entry.substr(c1 + 1, c2 - c1 - 1));
            double d;
            while (sin >> d) mc.shift.push_back(d);
            std::istringstream hin(entry.substr(c2 + 1));
            while (hin >> d) mc.halfwidth.push_back(d);
            comps.push_back(std::move(mc));
        }
        return StepDistribution::uniform_mixture(std::move(comps));
    }
    parse_fail(r.line_of("family"),
               "unknown family '" + family +
                   "' (simple_walk|lattice_atoms|uniform_box|gaussian|uniform_mixture)");
}

std::string fmt(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

std::string fmt_vec(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += fmt(v[i]);
    }
    return s;
}

std::string fmt_mat(const Mat& m) {
    std::string s;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        if (i) s += " ; ";
        for (std::size_t j = 0; j < m.dim(); ++j) {
            if (j) s += ' ';
            s += fmt(m(i, j));
        }
    }
    return s;
}

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_string(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LabConfig parse_config_text(const std::string& text) {
    RawConfig raw = parse_raw(text);
    for (const auto& [name, _] : raw)
        if (name != "distribution" && name != "schedule" && name != "target" &&
            name != "replication")
            fail(errc::config_parse, "unknown section [" + name + "]");

    LabConfig cfg;
    Reader dist(raw, "distribution");
    Reader sched(raw, "schedule");
    Reader target(raw, "target");
    Reader rep(raw, "replication");

    cfg.experiment.dist = build_distribution(dist);

    ScheduleSpec& ss = cfg.experiment.schedule_spec;
    ss.kind = schedule_kind_from(sched.str("kind"), sched.line_of("kind"));
    ss.count = sched.integer("count");
    if (sched.has("beta")) ss.beta = sched.num("beta");
    if (sched.has("ratio")) ss.ratio = sched.num("ratio");
    if (sched.has("start_index")) ss.start_index = sched.integer("start_index");
    if (sched.has("terms")) ss.explicit_terms = sched.ivec("terms");
    if (sched.has("parity")) {
        std::string p = sched.str("parity");
        if (p == "even") ss.parity = Parity::Even;
        else if (p == "none") ss.parity = Parity::None;
        else parse_fail(sched.line_of("parity"), "parity must be none|even");
    }

    TargetSpec& ts = cfg.experiment.target;
    ts.mode = target_mode_from(target.str("mode"), target.line_of("mode"));
    ts.a = target.vec("a");
    if (target.has("alpha")) ts.alpha = target.num("alpha");
    if (target.has("epsilon")) ts.epsilon = target.num("epsilon");
    if (target.has("grid_n")) ts.grid_n = target.num("grid_n");
    if (target.has("grid_step")) ts.grid_step = target.num("grid_step");

    cfg.experiment.form = theorem_form_from_string(rep.str("form"));
    cfg.experiment.replicas = rep.integer("replicas");
    cfg.experiment.master_seed = rep.uinteger("master_seed");
    if (rep.has("epsilon_grid")) cfg.experiment.epsilon_grid = rep.vec("epsilon_grid");
    if (rep.has("counts")) cfg.experiment.counts = rep.ivec("counts");
    if (rep.has("workers")) cfg.experiment.workers = int(rep.integer("workers"));
    if (rep.has("growth_a")) cfg.growth_a = rep.num("growth_a");
    if (rep.has("growth_alpha")) cfg.growth_alpha = rep.num("growth_alpha");

    // walk the full validation path now so config errors surface with exit 2
    cfg.experiment.validate();
    Schedule schedule = build_schedule(cfg.experiment.schedule_spec,
                                       form_normalizer(cfg.experiment.form));
    if (cfg.growth_a > 0.0) {
        if (!validate_growth(schedule, cfg.growth_a, cfg.growth_alpha))
            fail(errc::invalid_spec, "schedule violates the growth condition n(i+1)/n(i) >= 1 + A i^-alpha");
        // alpha range depends on the dimension for the box form
        std::size_t d = cfg.experiment.dist.dimension();
        if (d > 2) {
            double amax = 1.0 / (0.5 * double(d) - 1.0);
            if (!(cfg.growth_alpha < amax))
                fail(errc::invalid_spec, "growth_alpha must be < (d/2 - 1)^-1 for d > 2");
        }
    }
    // window schedules are tied to their alpha via beta
    if (cfg.experiment.form == TheoremForm::T2aWindow && ss.kind == ScheduleKind::PowerLaw) {
        double expect = 1.0 / (0.5 - ts.alpha);
        if (std::abs(ss.beta - expect) > 1e-9)
            fail(errc::invalid_spec, "t2a needs beta = (1/2 - alpha)^-1 = " + fmt(expect));
    }
    if (cfg.experiment.form == TheoremForm::T2bWindow && ss.kind == ScheduleKind::PowerLogPower) {
        double expect = 0.5 / (0.5 - ts.alpha);
        if (std::abs(ss.beta - expect) > 1e-9)
            fail(errc::invalid_spec, "t2b needs beta = (1/2 - alpha)^-1 / 2 = " + fmt(expect));
    }

    cfg.canonical = canonical_config_text(cfg);
    cfg.hash = fnv1a64(cfg.canonical);
    return cfg;
}

LabConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_failure, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string canonical_config_text(const LabConfig& config) {
    const ExperimentConfig& e = config.experiment;
    std::ostringstream out;
    out << "[distribution]\n";
    out << "family = " << to_string(e.dist.family()) << "\n";
    out << "dimension = " << e.dist.dimension() << "\n";
    switch (e.dist.family()) {
    case Family::SimpleWalk:
        break;
    case Family::Gaussian:
        out << "sigma = " << fmt_mat(e.dist.sigma()) << "\n";
        break;
    case Family::UniformBox:
        out << "halfwidth = " << fmt_vec(e.dist.box_halfwidth()) << "\n";
        break;
    case Family::LatticeAtoms: {
        out << "basis = " << fmt_mat(e.dist.lattice().basis) << "\n";
        out << "offset = " << fmt_vec(e.dist.lattice().offset) << "\n";
        out << "atoms = ";
        const auto& atoms = e.dist.atoms();
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            if (j) out << " ; ";
            Vec amb = e.dist.lattice_to_ambient(atoms[j].coords, 0);
            for (std::size_t k = 0; k < amb.size(); ++k)
                out << fmt(amb[k] + e.dist.lattice().offset[k]) << ' ';
            out << ": " << fmt(atoms[j].probability);
        }
        out << "\n";
        break;
    }
    case Family::UniformMixture: {
        out << "components = ";
        const auto& comps = e.dist.components();
        for (std::size_t j = 0; j < comps.size(); ++j) {
            if (j) out << " ; ";
            out << fmt(comps[j].weight) << " : " << fmt_vec(comps[j].shift) << " : "
                << fmt_vec(comps[j].halfwidth);
        }
        out << "\n";
        break;
    }
    }
    out << "\n[schedule]\n";
    out << "kind = " << to_string(e.schedule_spec.kind) << "\n";
    if (e.schedule_spec.kind == ScheduleKind::PowerLaw ||
        e.schedule_spec.kind == ScheduleKind::PowerLogPower)
        out << "beta = " << fmt(e.schedule_spec.beta) << "\n";
    if (e.schedule_spec.kind == ScheduleKind::Geometric)
        out << "ratio = " << fmt(e.schedule_spec.ratio) << "\n";
    if (e.schedule_spec.kind == ScheduleKind::Explicit) {
        out << "terms =";
        for (auto t : e.schedule_spec.explicit_terms) out << ' ' << t;
        out << "\n";
    }
    out << "start_index = " << e.schedule_spec.start_index << "\n";
    out << "count = " << e.schedule_spec.count << "\n";
    out << "parity = " << to_string(e.schedule_spec.parity) << "\n";

    out << "\n[target]\n";
    out << "mode = " << to_string(e.target.mode) << "\n";
    out << "a = " << fmt_vec(e.target.a) << "\n";
    if (e.target.mode == TargetMode::AlphaWindow) out << "alpha = " << fmt(e.target.alpha) << "\n";
    if (e.target.mode == TargetMode::ScaledBox) out << "epsilon = " << fmt(e.target.epsilon) << "\n";
    if (e.target.grid_n > 0.0) {
        out << "grid_n = " << fmt(e.target.grid_n) << "\n";
        out << "grid_step = " << fmt(e.target.grid_step) << "\n";
    }

    out << "\n[replication]\n";
    out << "form = " << to_string(e.form) << "\n";
    out << "replicas = " << e.replicas << "\n";
    out << "master_seed = " << e.master_seed << "\n";
    if (!e.epsilon_grid.empty()) out << "epsilon_grid = " << fmt_vec(e.epsilon_grid) << "\n";
    if (!e.counts.empty()) {
        out << "counts =";
        for (auto c : e.counts) out << ' ' << c;
        out << "\n";
    }
    if (config.growth_a > 0.0) {
        out << "growth_a = " << fmt(config.growth_a) << "\n";
        out << "growth_alpha = " << fmt(config.growth_alpha) << "\n";
    }
    return out.str();
}

} // namespace walklab
