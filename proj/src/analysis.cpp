#include "maxlat/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "maxlat/error.hpp"

namespace maxlat::analysis {

Series probe_series(const RunRecord& record, std::string_view lattice, Site site) {
    for (const auto& p : record.probes) {
        if (p.probe.lattice == lattice && p.probe.site == site) {
            Series s;
            s.reserve(p.values.size());
            for (std::size_t i = 0; i < p.values.size(); ++i)
                s.push_back({static_cast<std::int64_t>(i), p.values[i].real()});
            return s;
        }
    }
    throw ValidationError("no probe (" + std::string(lattice) + ", " + to_string(site) +
                          ") was registered for the run");
}

MaximaReport detect_maxima(const Series& s) {
    if (s.size() < 3) throw ValidationError("maxima detection needs a series of length >= 3");

    MaximaReport rep;
    const std::size_t n = s.size();

    std::size_t first_interior_min = n - 1;
    for (std::size_t t = 1; t + 1 < n; ++t) {
        if (s[t].value < s[t - 1].value && s[t].value < s[t + 1].value) {
            first_interior_min = t;
            break;
        }
    }
    bool start_dominates = true;
    for (std::size_t t = 1; t <= first_interior_min; ++t)
        if (s[0].value < s[t].value) {
            start_dominates = false;
            break;
        }
    if (start_dominates) {
        rep.maxima.push_back(s[0]);
        rep.includes_start = true;
    }
    for (std::size_t t = 1; t + 1 < n; ++t)
        if (s[t].value > s[t - 1].value && s[t].value > s[t + 1].value)
            rep.maxima.push_back(s[t]);
    return rep;
}

GrowthEstimate growth_factor(const Series& s, Window window) {
    if (s.empty() || window.lo > window.hi || window.lo < s.front().t ||
        window.hi > s.back().t)
        throw ValidationError("growth window must lie within the series");

    const MaximaReport rep = detect_maxima(s);
    std::vector<SeriesPoint> inside;
    for (const auto& m : rep.maxima)
        if (m.t >= window.lo && m.t <= window.hi) inside.push_back(m);
    if (inside.size() < 2)
        throw ValidationError("growth estimate needs at least two maxima inside the window");

    double log_sum = 0.0;
    for (std::size_t k = 0; k + 1 < inside.size(); ++k) {
        if (!(inside[k].value > 0.0) || !(inside[k + 1].value > 0.0))
            throw ValidationError("growth estimate needs positive maxima heights");
        log_sum += std::log(inside[k + 1].value / inside[k].value);
    }
    const double span = static_cast<double>(inside.back().t - inside.front().t);
    GrowthEstimate est;
    est.per_step_factor = std::exp(log_sum / span);
    est.window = window;
    return est;
}

Quantity subspace_sum(const Lattice& lat, const SubspaceSpec& spec) {
    Quantity acc{};
    lat.for_each([&](Site s, const Quantity& q) {
        if (spec.matches(s)) acc += q;
    });
    return acc;
}

double subspace_abs_sum(const Lattice& lat, const SubspaceSpec& spec) {
    double acc = 0.0;
    lat.for_each([&](Site s, const Quantity& q) {
        if (spec.matches(s)) acc += magnitude(q);
    });
    return acc;
}

double subspace_square_sum(const Lattice& lat, const SubspaceSpec& spec) {
    double acc = 0.0;
    lat.for_each([&](Site s, const Quantity& q) {
        if (spec.matches(s)) acc += sq_mag(q);
    });
    return acc;
}

int significant_digit_agreement(double a, double b) {
    if (a == b) return 15;
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0 || !std::isfinite(a) || !std::isfinite(b)) return 0;
    const double rel = std::abs(a - b) / scale;
    const double digits = std::floor(-std::log10(rel));
    return static_cast<int>(std::clamp(digits, 0.0, 15.0));
}

} // namespace maxlat::analysis
