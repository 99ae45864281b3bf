#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxlat/engine.hpp"

namespace maxlat::analysis {

struct SeriesPoint {
    std::int64_t t = 0;
    double value = 0.0;
};

/// Real part of one probe per iteration; t strictly increasing from 0.
using Series = std::vector<SeriesPoint>;

/// The recorded series of a probe registered for the run. Unknown probes
/// are an error.
Series probe_series(const RunRecord& record, std::string_view lattice, Site site);

struct MaximaReport {
    std::vector<SeriesPoint> maxima;
    bool includes_start = false;
};

/// Interior strict local maxima, plus the start: t = 0 counts as the first
/// maximum iff value(0) >= value(t) for every t up to the first interior
/// local minimum (or the series end when none exists). A flat start like
/// 1, 1, 0.97, ... therefore registers (0, 1).
MaximaReport detect_maxima(const Series& s);

struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

struct GrowthEstimate {
    double per_step_factor = 1.0;
    Window window;
    std::string method = "geometric-maxima";
};

/// Geometric per-step growth over the maxima inside the window:
/// exp( sum ln(h_{k+1}/h_k) / (t_last - t_first) ). Needs at least two
/// maxima with positive heights inside the window.
GrowthEstimate growth_factor(const Series& s, Window window);

/// Fixes a subset of the coordinates; the free ones range over all stored
/// sites. All fixed means a point statistic.
struct SubspaceSpec {
    std::optional<std::int32_t> x;
    std::optional<std::int32_t> y;
    std::optional<std::int32_t> z;

    bool matches(Site s) const {
        return (!x || *x == s.x) && (!y || *y == s.y) && (!z || *z == s.z);
    }
};

Quantity subspace_sum(const Lattice& lat, const SubspaceSpec& spec);
double subspace_abs_sum(const Lattice& lat, const SubspaceSpec& spec);
double subspace_square_sum(const Lattice& lat, const SubspaceSpec& spec);

/// Count of leading decimal significant digits on which a and b agree,
/// clamped to [0, 15]; equal values give 15.
int significant_digit_agreement(double a, double b);

} // namespace maxlat::analysis
