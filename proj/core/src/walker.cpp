#include "walklab/walker.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "walklab/hits.hpp"

namespace walklab {

namespace {

constexpr std::size_t kMaxDim = 8;

// Integer-lattice accumulation. The per-step draw path matches
// sample_lattice_step word for word, so checkpointed and single-step walks
// are interchangeable.
struct LatticeCore {
    const StepDistribution& dist;
    std::size_t d;
    bool simple;
    std::array<std::int64_t, kMaxDim> coords{};

    explicit LatticeCore(const StepDistribution& dist)
        : dist(dist), d(dist.dimension()), simple(dist.family() == Family::SimpleWalk) {}

    inline void step(RngStream& stream) {
        if (simple) {
            if (d == 1) {
                coords[0] += 1 - 2 * static_cast<std::int64_t>(stream.next_u64() >> 63);
            } else {
                std::uint64_t idx = stream.next_below(2 * d);
                coords[idx >> 1] += (idx & 1) ? -1 : +1;
            }
            return;
        }
        double u = stream.next_unit();
        const auto& atoms = dist.atoms();
        double acc = 0.0;
        std::size_t pick = atoms.size() - 1;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            acc += atoms[j].probability;
            if (u < acc) { pick = j; break; }
        }
        for (std::size_t k = 0; k < d; ++k) coords[k] += atoms[pick].coords[k];
    }

    std::vector<std::int64_t> snapshot() const {
        return std::vector<std::int64_t>(coords.begin(), coords.begin() + d);
    }
};

struct ContinuousCore {
    const StepDistribution& dist;
    std::size_t d;
    Vec accum;
    Vec step_buf;

    explicit ContinuousCore(const StepDistribution& dist)
        : dist(dist), d(dist.dimension()), accum(d, 0.0), step_buf(d, 0.0) {}

    inline void step(RngStream& stream) {
        dist.sample_step_into(stream, step_buf);
        for (std::size_t k = 0; k < d; ++k) accum[k] += step_buf[k];
    }
};

} // namespace

WalkCheckpoints run_checkpoints(const StepDistribution& dist, const Schedule& schedule,
                                RngStream& stream) {
    if (schedule.terms.empty()) fail(errc::invalid_spec, "schedule is empty");
    WalkCheckpoints out;
    out.terms = schedule.terms;
    out.replica_index = stream.replica_index();
    out.positions.reserve(out.terms.size());

    if (dist.is_lattice()) {
        out.lattice_positions.reserve(out.terms.size());
        LatticeCore core(dist);
        std::int64_t n = 0;
        for (std::int64_t target : out.terms) {
            for (; n < target; ++n) core.step(stream);
            auto coords = core.snapshot();
            out.positions.push_back(dist.lattice_to_ambient(coords, n));
            out.lattice_positions.push_back(std::move(coords));
        }
        return out;
    }

    ContinuousCore core(dist);
    std::int64_t n = 0;
    for (std::int64_t target : out.terms) {
        for (; n < target; ++n) core.step(stream);
        out.positions.push_back(core.accum);
    }
    return out;
}

MinTracker run_min_tracker(const StepDistribution& dist, const Vec& a, double gamma,
                           std::int64_t n_max, RngStream& stream,
                           const std::vector<std::int64_t>& snapshot_ns) {
    if (n_max < 1) fail(errc::invalid_spec, "n_max must be >= 1");
    const std::size_t d = dist.dimension();
    if (a.size() != d) fail(errc::wrong_dimension, "target dimension mismatch");

    MinTracker t;
    t.target = a;
    t.gamma = gamma;
    t.running_min = std::numeric_limits<double>::infinity();
    t.snapshots.reserve(snapshot_ns.size());

    std::size_t next_snap = 0;
    auto observe = [&](std::int64_t n, double dist2) {
        double val = std::pow(double(n), gamma - 0.5) * std::sqrt(dist2);
        if (val < t.running_min) {
            t.running_min = val;
            t.argmin_n = n;
        }
        while (next_snap < snapshot_ns.size() && snapshot_ns[next_snap] == n) {
            t.snapshots.emplace_back(n, t.running_min);
            ++next_snap;
        }
    };

    if (dist.is_lattice()) {
        LatticeCore core(dist);
        const LatticeSpec& lat = dist.lattice();
        bool unit_basis = true;
        for (std::size_t i = 0; i < d && unit_basis; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (lat.basis(i, j) != (i == j ? 1.0 : 0.0) || lat.offset[j] != 0.0)
                    unit_basis = false;
        Vec amb(d);
        for (std::int64_t n = 1; n <= n_max; ++n) {
            core.step(stream);
            double sqn = std::sqrt(double(n));
            double dist2 = 0.0;
            if (unit_basis) {
                for (std::size_t k = 0; k < d; ++k) {
                    double diff = double(core.coords[k]) - a[k] * sqn;
                    dist2 += diff * diff;
                }
            } else {
                amb = dist.lattice_to_ambient(core.snapshot(), n);
                for (std::size_t k = 0; k < d; ++k) {
                    double diff = amb[k] - a[k] * sqn;
                    dist2 += diff * diff;
                }
            }
            observe(n, dist2);
        }
        return t;
    }

    ContinuousCore core(dist);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        core.step(stream);
        double sqn = std::sqrt(double(n));
        double dist2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double diff = core.accum[k] - a[k] * sqn;
            dist2 += diff * diff;
        }
        observe(n, dist2);
    }
    return t;
}

void run_scaled_box_hits(const StepDistribution& dist, const Vec& a, double eps,
                         std::int64_t n_max, RngStream& stream, std::vector<std::uint8_t>& hits) {
    if (n_max < 1) fail(errc::invalid_spec, "n_max must be >= 1");
    const std::size_t d = dist.dimension();
    if (a.size() != d) fail(errc::wrong_dimension, "target dimension mismatch");
    hits.assign(static_cast<std::size_t>(n_max), 0);

    Vec pos(d);
    if (dist.is_lattice()) {
        LatticeCore core(dist);
        for (std::int64_t n = 1; n <= n_max; ++n) {
            core.step(stream);
            pos = dist.lattice_to_ambient(core.snapshot(), n);
            hits[static_cast<std::size_t>(n - 1)] = scaled_box_hit(pos, a, eps, n) ? 1 : 0;
        }
        return;
    }
    ContinuousCore core(dist);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        core.step(stream);
        hits[static_cast<std::size_t>(n - 1)] = scaled_box_hit(core.accum, a, eps, n) ? 1 : 0;
    }
}

} // namespace walklab
