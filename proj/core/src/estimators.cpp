#include "walklab/estimators.hpp"

#include <cmath>
#include <numbers>

#include "walklab/gaussian.hpp"

namespace walklab {

const char* to_string(TheoremForm f) {
    switch (f) {
    case TheoremForm::T1Lattice: return "t1";
    case TheoremForm::T2aWindow: return "t2a";
    case TheoremForm::T2bWindow: return "t2b";
    case TheoremForm::T3Box: return "t3";
    case TheoremForm::C3Weighted: return "c3";
    }
    return "?";
}

TheoremForm theorem_form_from_string(const std::string& s) {
    if (s == "t1") return TheoremForm::T1Lattice;
    if (s == "t2a") return TheoremForm::T2aWindow;
    if (s == "t2b") return TheoremForm::T2bWindow;
    if (s == "t3") return TheoremForm::T3Box;
    if (s == "c3") return TheoremForm::C3Weighted;
    fail(errc::invalid_spec, "unknown theorem form '" + s + "' (t1|t2a|t2b|t3|c3)");
}

NormalizerKind form_normalizer(TheoremForm f) {
    switch (f) {
    case TheoremForm::T1Lattice: return NormalizerKind::LogLogCount;
    case TheoremForm::T2aWindow: return NormalizerKind::LogCount;
    case TheoremForm::T2bWindow: return NormalizerKind::LogLogCount;
    case TheoremForm::T3Box: return NormalizerKind::Count;
    case TheoremForm::C3Weighted: return NormalizerKind::HarmonicLog;
    }
    return NormalizerKind::Count;
}

TargetMode form_target_mode(TheoremForm f) {
    switch (f) {
    case TheoremForm::T1Lattice: return TargetMode::LatticePoint;
    case TheoremForm::T2aWindow:
    case TheoremForm::T2bWindow: return TargetMode::AlphaWindow;
    case TheoremForm::T3Box:
    case TheoremForm::C3Weighted: return TargetMode::ScaledBox;
    }
    return TargetMode::ScaledBox;
}

double rate_function(TheoremForm f, std::int64_t n, double alpha, std::size_t d) {
    double nd = double(n);
    switch (f) {
    case TheoremForm::T1Lattice:
        return 1.0 / std::log(std::log(nd));
    case TheoremForm::T2aWindow:
        return std::pow(std::log(nd), -4.0 * alpha / (10.0 * alpha + 1.0));
    case TheoremForm::T2bWindow:
        return std::pow(std::log(std::log(nd)), -0.2);
    case TheoremForm::T3Box:
        return std::pow(nd, alpha * (0.5 * double(d) - 1.0) - 1.0) * std::log(nd);
    case TheoremForm::C3Weighted:
        fail(errc::invalid_spec, "no rate function for the weighted form");
    }
    return 0.0;
}

double limit_value(const Vec& a, const Mat* sigma, TheoremForm form) {
    switch (form) {
    case TheoremForm::T1Lattice: {
        if (sigma == nullptr) fail(errc::invalid_spec, "t1 limit needs sigma");
        if (a.size() != sigma->dim()) fail(errc::wrong_dimension, "a/sigma dimension mismatch");
        return gaussian_density(a, *sigma);
    }
    case TheoremForm::T2aWindow: {
        if (a.size() != 1) fail(errc::wrong_dimension, "t2a limit is one-dimensional");
        return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * a[0] * a[0]);
    }
    case TheoremForm::T2bWindow: {
        if (a.size() != 2) fail(errc::wrong_dimension, "t2b limit is two-dimensional");
        double n2 = a[0] * a[0] + a[1] * a[1];
        return 2.0 / std::numbers::pi * std::exp(-0.5 * n2);
    }
    default:
        fail(errc::invalid_spec, "limit_value covers t1/t2a/t2b; box forms use box_limit_value");
    }
}

double box_limit_value(const Vec& a, double eps, const Mat& sigma) {
    if (!(eps > 0.0)) fail(errc::invalid_spec, "eps must be positive");
    return gaussian_box_probability(a, eps, sigma);
}

EstimatorResult delta_statistic(const std::vector<std::uint8_t>& hits, const Schedule& schedule,
                                double limit, TheoremForm form) {
    if (hits.size() != schedule.terms.size())
        fail(errc::length_mismatch, "hits length " + std::to_string(hits.size()) +
                                        " != schedule length " + std::to_string(schedule.terms.size()));
    if (!(limit > 0.0)) fail(errc::invalid_spec, "limit must be positive");
    EstimatorResult r;
    r.theorem_form = form;
    r.count = schedule.count();
    for (auto h : hits) r.hit_count += h ? 1 : 0;
    r.normalizer = normalizer_value(schedule.normalizer_kind, r.count);
    r.empirical = double(r.hit_count) / r.normalizer;
    r.limit = limit;
    r.delta = r.empirical / limit;
    return r;
}

EstimatorResult corollary3_weighted(const std::vector<std::uint8_t>& hits, double limit) {
    if (hits.empty()) fail(errc::invalid_spec, "need at least one step");
    if (!(limit > 0.0)) fail(errc::invalid_spec, "limit must be positive");
    EstimatorResult r;
    r.theorem_form = TheoremForm::C3Weighted;
    r.count = static_cast<std::int64_t>(hits.size());
    double sum = 0.0, carry = 0.0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        if (!hits[k]) continue;
        ++r.hit_count;
        double y = 1.0 / double(k + 1) - carry;
        double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    r.normalizer = normalizer_value(NormalizerKind::HarmonicLog, r.count);
    r.empirical = sum / r.normalizer;
    r.limit = limit;
    r.delta = r.empirical / limit;
    return r;
}

LiminfReport liminf_report(const MinTracker& tracker, std::optional<double> bound) {
    LiminfReport rep;
    rep.running_min = tracker.running_min;
    rep.argmin_n = tracker.argmin_n;
    rep.gamma = tracker.gamma;
    rep.bound = bound;
    rep.flag = (bound && tracker.running_min <= *bound) ? LiminfFlag::Pass : LiminfFlag::Info;
    return rep;
}

} // namespace walklab
