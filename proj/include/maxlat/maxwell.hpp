#pragma once

#include <array>
#include <string_view>

#include "maxlat/engine.hpp"

namespace maxlat::maxwell {

/// Speed of light together with the minimal time and location differences
/// that define the dimensionless units (dt for time, ds/2 for location).
struct PhysicalScale {
    double c;
    double dt;
    double ds;
};

struct HatCoordinates {
    double t;
    double x;
    double y;
    double z;
};

/// (t, x, y, z) -> (t/dt, 2x/ds, 2y/ds, 2z/ds). Integrality is the caller's
/// concern when addressing lattices.
HatCoordinates hat_coordinates(const PhysicalScale& scale, double t, double x, double y,
                               double z);

/// The dimensionless factor p = c * dt / ds multiplying every spatial
/// difference of the update equations.
class CouplingFactor {
public:
    explicit CouplingFactor(double p);
    double value() const { return value_; }
    /// Above 1/8 the wave maxima grow from the first wave on.
    bool beyond_stable_bound() const { return value_ > 0.125; }

private:
    double value_;
};

CouplingFactor coupling_factor(const PhysicalScale& scale);

/// The tabulated 12-digit value of sqrt(fine structure constant) used by the
/// reference parameter studies; kept as a literal so golden runs reproduce.
double sqrt_alpha();

inline constexpr std::array<std::string_view, 6> kFieldNames = {"Ex", "Ey", "Ez",
                                                                "Bx", "By", "Bz"};

/// E fields stay on even coordinate-sum sites and B fields on odd ones when
/// started from the canonical single-site initial condition.
inline bool even_coordinate_parity(Site s) { return ((s.x + s.y + s.z) & 1) == 0; }

/// True when the state holds exactly the six field lattices on one backend.
bool is_field_state(const EngineState& state);

/// All six field lattices empty except Ex = 1 at the origin, iteration 0.
EngineState canonical_initial_state();
EngineState canonical_initial_state_dense(Box box);

/// The 30-entry coupling table of the explicit update equations: one
/// identity entry per field plus four neighbor couplings per equation.
/// A source site s contributes to destination s + offset, so a term reading
/// a +1 neighbor becomes an entry with offset -1 along that axis.
CouplingTable build_maxwell_table(const CouplingFactor& p);

/// One fused-stencil iteration, bit-identical to step() with
/// build_maxwell_table(p) on the same state.
EngineState step_direct(const EngineState& state, const CouplingFactor& p);

/// run() with the fused stepper instead of the table interpreter.
RunRecord run_direct(EngineState state, const CouplingFactor& p, std::int64_t steps,
                     std::span<const ProbeSpec> probes, const PrunePolicy& policy);

} // namespace maxlat::maxwell
