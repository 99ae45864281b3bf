#include "maxlat/engine.hpp"

#include <atomic>
#include <thread>
#include <utility>

#include "maxlat/error.hpp"

namespace maxlat {

void EngineState::insert(Lattice lat) {
    if (!lattices_.empty() && lat.iteration() != iteration())
        throw ValidationError("lattice '" + lat.name() + "' at iteration " +
                              std::to_string(lat.iteration()) +
                              " does not match engine iteration " +
                              std::to_string(iteration()));
    std::string key = lat.name();
    if (!lattices_.emplace(std::move(key), std::move(lat)).second)
        throw ValidationError("duplicate lattice name in engine state");
}

bool EngineState::contains(const std::string& name) const {
    return lattices_.find(name) != lattices_.end();
}

const Lattice& EngineState::at(const std::string& name) const {
    const auto it = lattices_.find(name);
    if (it == lattices_.end())
        throw ValidationError("no lattice named '" + name + "' in engine state");
    return it->second;
}

Lattice& EngineState::at(const std::string& name) {
    const auto it = lattices_.find(name);
    if (it == lattices_.end())
        throw ValidationError("no lattice named '" + name + "' in engine state");
    return it->second;
}

std::int64_t EngineState::iteration() const {
    return lattices_.empty() ? 0 : lattices_.begin()->second.iteration();
}

std::vector<std::string> validate_table(const CouplingTable& table, const EngineState& state) {
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        const std::string tag = "entry " + std::to_string(i);
        if (!state.contains(e.source))
            violations.push_back(tag + ": unknown source lattice '" + e.source + "'");
        if (!state.contains(e.destination))
            violations.push_back(tag + ": unknown destination lattice '" + e.destination + "'");
        if (!is_finite(e.factor))
            violations.push_back(tag + ": non-finite factor");
    }
    return violations;
}

EngineState step(const EngineState& state, const CouplingTable& table) {
    const auto violations = validate_table(table, state);
    if (!violations.empty()) {
        std::string msg = "invalid coupling table:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }

    const std::int64_t n = state.iteration();
    EngineState next;
    for (const auto& [name, lat] : state) {
        Lattice frame = lat.empty_like();
        frame.set_iteration(n + 1);
        next.insert(std::move(frame));
    }
    for (const auto& e : table.entries) {
        try {
            add_shifted_scaled(next.at(e.destination), state.at(e.source), e.offset, e.factor);
        } catch (const NumericError& err) {
            throw NumericError("iteration " + std::to_string(n + 1) + ": " +
                               err.what());
        }
    }
    return next;
}

RunRecord run_with_stepper(EngineState state, const Stepper& stepper, std::int64_t steps,
                           std::span<const ProbeSpec> probes, const PrunePolicy& policy) {
    if (steps < 0) throw ValidationError("step count must be >= 0");
    if (policy.enabled && policy.per_lattice_budget < 1)
        throw ValidationError("prune budget must be >= 1 when pruning is enabled");
    for (const auto& p : probes)
        if (!state.contains(p.lattice))
            throw ValidationError("probe references unknown lattice '" + p.lattice + "'");

    RunRecord rec;
    rec.steps = steps;
    rec.probes.reserve(probes.size());
    for (const auto& p : probes) {
        ProbeSeries s;
        s.probe = p;
        s.values.reserve(static_cast<std::size_t>(steps) + 1);
        rec.probes.push_back(std::move(s));
    }

    const auto record = [&](const EngineState& st) {
        for (auto& series : rec.probes)
            series.values.push_back(st.at(series.probe.lattice).get(series.probe.site));
    };

    record(state);
    for (std::int64_t i = 0; i < steps; ++i) {
        state = stepper(state);
        if (policy.enabled) {
            // Prune over-budget lattices concurrently; reports keep the
            // deterministic name order regardless of completion order.
            std::vector<Lattice*> over;
            for (auto& [name, lat] : state)
                if (lat.nonzero_count() > policy.per_lattice_budget) over.push_back(&lat);
            std::vector<PruneReport> reports(over.size());
            const auto worker = [&](std::size_t k) {
                reports[k] = over[k]->prune(policy.per_lattice_budget);
            };
            if (over.size() > 1 && std::thread::hardware_concurrency() > 1) {
                std::atomic<std::size_t> next{0};
                std::vector<std::thread> pool;
                const unsigned n = std::min<unsigned>(
                    static_cast<unsigned>(over.size()), std::thread::hardware_concurrency());
                for (unsigned t = 0; t < n; ++t)
                    pool.emplace_back([&] {
                        for (;;) {
                            const std::size_t k = next.fetch_add(1);
                            if (k >= over.size()) return;
                            worker(k);
                        }
                    });
                for (auto& th : pool) th.join();
            } else {
                for (std::size_t k = 0; k < over.size(); ++k) worker(k);
            }
            for (auto& r : reports) rec.prune_reports.push_back(std::move(r));
        }
        record(state);
    }
    rec.final_state = std::move(state);
    return rec;
}

RunRecord run(EngineState state, const CouplingTable& table, std::int64_t steps,
              std::span<const ProbeSpec> probes, const PrunePolicy& policy) {
    return run_with_stepper(
        std::move(state), [&table](const EngineState& s) { return step(s, table); }, steps,
        probes, policy);
}

} // namespace maxlat
