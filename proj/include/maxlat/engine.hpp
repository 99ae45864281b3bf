#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "maxlat/lattice.hpp"

namespace maxlat {

/// One addition rule: every nonzero source site s contributes
/// factor * value to destination site s + offset.
struct CouplingEntry {
    std::string source;
    std::string destination;
    Site offset;
    Quantity factor;
};

/// Ordered entry list defining one iteration. The order fixes the
/// floating-point accumulation sequence, not the mathematical result.
struct CouplingTable {
    std::vector<CouplingEntry> entries;
};

struct PrunePolicy {
    bool enabled = false;
    std::int64_t per_lattice_budget = 0; // >= 1 when enabled
};

/// Named lattices advancing together; all share one iteration number.
class EngineState {
public:
    EngineState() = default;

    void insert(Lattice lat);
    bool contains(const std::string& name) const;
    const Lattice& at(const std::string& name) const;
    Lattice& at(const std::string& name);

    std::size_t size() const { return lattices_.size(); }
    std::int64_t iteration() const;

    auto begin() const { return lattices_.begin(); }
    auto end() const { return lattices_.end(); }
    auto begin() { return lattices_.begin(); }
    auto end() { return lattices_.end(); }

private:
    std::map<std::string, Lattice> lattices_; // deterministic name order
};

/// Empty iff every entry references existing lattices and carries a finite
/// factor. Violations are described, not thrown.
std::vector<std::string> validate_table(const CouplingTable& table, const EngineState& state);

/// One iteration: every destination frame starts from zero and receives the
/// table's additions in order, all reads taken from the previous frame.
/// Carrying a lattice forward needs an explicit identity entry.
EngineState step(const EngineState& state, const CouplingTable& table);

struct ProbeSpec {
    std::string lattice;
    Site site;
};

struct ProbeSeries {
    ProbeSpec probe;
    std::vector<Quantity> values; // index = iteration, starting at 0
};

struct RunRecord {
    std::vector<ProbeSeries> probes;
    std::vector<PruneReport> prune_reports;
    EngineState final_state;
    std::int64_t steps = 0;
};

/// Any replacement for the table interpreter must advance every lattice by
/// exactly one iteration and preserve step()'s accumulation semantics.
using Stepper = std::function<EngineState(const EngineState&)>;

RunRecord run(EngineState state, const CouplingTable& table, std::int64_t steps,
              std::span<const ProbeSpec> probes, const PrunePolicy& policy);

RunRecord run_with_stepper(EngineState state, const Stepper& stepper, std::int64_t steps,
                           std::span<const ProbeSpec> probes, const PrunePolicy& policy);

} // namespace maxlat
