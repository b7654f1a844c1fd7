#include "walklab/schedule.hpp"

#include <cmath>

namespace walklab {

const char* to_string(ScheduleKind k) {
    switch (k) {
    case ScheduleKind::IterLogIter: return "iter_log_iter";
    case ScheduleKind::PowerLaw: return "power";
    case ScheduleKind::PowerLogPower: return "power_log_power";
    case ScheduleKind::Geometric: return "geometric";
    case ScheduleKind::Explicit: return "explicit";
    }
    return "?";
}

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "none"; }

const char* to_string(NormalizerKind k) {
    switch (k) {
    case NormalizerKind::LogCount: return "log_count";
    case NormalizerKind::LogLogCount: return "log_log_count";
    case NormalizerKind::Count: return "count";
    case NormalizerKind::HarmonicLog: return "harmonic_log";
    }
    return "?";
}

namespace {

void validate_spec(const ScheduleSpec& spec) {
    if (spec.count <= 0) fail(errc::invalid_spec, "count must be positive");
    if (spec.start_index < 1) fail(errc::invalid_spec, "start_index must be >= 1");
    switch (spec.kind) {
    case ScheduleKind::IterLogIter:
        if (spec.start_index < 2)
            fail(errc::invalid_spec, "iter_log_iter needs start_index >= 2 (i = 1 yields 0)");
        break;
    case ScheduleKind::PowerLaw:
        if (!(spec.beta >= 2.0))
            fail(errc::invalid_spec, "power schedule needs beta >= 2");
        break;
    case ScheduleKind::PowerLogPower:
        if (!(spec.beta >= 2.0))
            fail(errc::invalid_spec, "power_log_power schedule needs beta >= 2");
        if (spec.start_index < 2)
            fail(errc::invalid_spec, "power_log_power needs start_index >= 2 (i = 1 yields 0)");
        break;
    case ScheduleKind::Geometric:
        if (!(spec.ratio > 1.0))
            fail(errc::invalid_spec, "geometric schedule needs ratio > 1");
        break;
    case ScheduleKind::Explicit:
        if (spec.explicit_terms.size() != static_cast<std::size_t>(spec.count))
            fail(errc::invalid_spec, "explicit schedule: count must equal the number of terms");
        for (auto t : spec.explicit_terms)
            if (t < 1) fail(errc::invalid_spec, "explicit terms must be positive");
        break;
    }
}

// Raw (real-valued) term before floor / parity mapping.
double raw_term(const ScheduleSpec& spec, std::int64_t i) {
    switch (spec.kind) {
    case ScheduleKind::IterLogIter:
        return static_cast<double>(i) * std::log(static_cast<double>(i));
    case ScheduleKind::PowerLaw:
        return std::pow(static_cast<double>(i), spec.beta);
    case ScheduleKind::PowerLogPower: {
        double l = std::log(static_cast<double>(i));
        return std::pow(static_cast<double>(i) * l, spec.beta);
    }
    case ScheduleKind::Geometric:
        return spec.ratio * std::pow(spec.ratio, static_cast<double>(i - 1));
    case ScheduleKind::Explicit:
        return static_cast<double>(spec.explicit_terms[static_cast<std::size_t>(i - spec.start_index)]);
    }
    return 0.0;
}

std::int64_t map_term(double t, Parity parity) {
    if (parity == Parity::Even) return 2 * static_cast<std::int64_t>(std::ceil(t / 2.0));
    return static_cast<std::int64_t>(std::floor(t));
}

} // namespace

Schedule build_schedule(const ScheduleSpec& spec, NormalizerKind normalizer) {
    validate_spec(spec);
    Schedule s;
    s.spec = spec;
    s.normalizer_kind = normalizer;
    s.terms.reserve(static_cast<std::size_t>(spec.count));
    for (std::int64_t i = spec.start_index; i < spec.start_index + spec.count; ++i) {
        double raw = raw_term(spec, i);
        if (!(raw > 0.0) || raw > 9.0e18)
            fail(errc::invalid_spec, "schedule term out of range at index " + std::to_string(i));
        std::int64_t term = map_term(raw, spec.parity);
        if (term < 1) fail(errc::invalid_spec, "schedule term < 1 at index " + std::to_string(i));
        if (!s.terms.empty() && term <= s.terms.back())
            fail(errc::non_monotone_schedule,
                 "terms " + std::to_string(s.terms.back()) + " -> " + std::to_string(term) +
                     " at index " + std::to_string(i) + " (duplicates are an error, never skipped)");
        s.terms.push_back(term);
    }
    return s;
}

bool validate_growth(const Schedule& schedule, double growth_a, double alpha) {
    if (schedule.terms.size() < 2) fail(errc::invalid_spec, "growth check needs >= 2 terms");
    if (!(growth_a > 0.0)) fail(errc::invalid_spec, "growth constant A must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(errc::invalid_spec, "growth alpha must lie in (0,1)");
    for (std::size_t i = 0; i + 1 < schedule.terms.size(); ++i) {
        double pos = static_cast<double>(i + 1);
        double lhs = static_cast<double>(schedule.terms[i + 1]) / static_cast<double>(schedule.terms[i]);
        double rhs = 1.0 + growth_a * std::pow(pos, -alpha);
        if (lhs < rhs) return false;
    }
    return true;
}

double normalizer_value(NormalizerKind kind, std::int64_t count) {
    if (count < 1) fail(errc::invalid_count, "count must be positive");
    double n = static_cast<double>(count);
    double v = 0.0;
    switch (kind) {
    case NormalizerKind::Count: v = n; break;
    case NormalizerKind::LogCount: v = std::log(n); break;
    case NormalizerKind::HarmonicLog: v = std::log(n); break;
    case NormalizerKind::LogLogCount: v = count >= 3 ? std::log(std::log(n)) : 0.0; break;
    }
    if (!(v > 0.0))
        fail(errc::invalid_count,
             std::string(to_string(kind)) + " normalizer is not positive at count " + std::to_string(count));
    return v;
}

} // namespace walklab
