#include "maxlat/maxwell.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "lattice_internal.hpp"
#include "maxlat/error.hpp"

namespace maxlat::maxwell {

namespace {

void check_scale(const PhysicalScale& s) {
    if (!(s.c > 0.0) || !(s.dt > 0.0) || !(s.ds > 0.0) || !std::isfinite(s.c) ||
        !std::isfinite(s.dt) || !std::isfinite(s.ds))
        throw ValidationError("physical scale requires finite positive c, dt, ds");
}

} // namespace

HatCoordinates hat_coordinates(const PhysicalScale& scale, double t, double x, double y,
                               double z) {
    check_scale(scale);
    return {t / scale.dt, 2.0 * x / scale.ds, 2.0 * y / scale.ds, 2.0 * z / scale.ds};
}

CouplingFactor::CouplingFactor(double p) : value_(p) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw ValidationError("coupling factor must be finite and > 0");
}

CouplingFactor coupling_factor(const PhysicalScale& scale) {
    check_scale(scale);
    return CouplingFactor(scale.c * scale.dt / scale.ds);
}

double sqrt_alpha() { return 0.085424542921; }

bool is_field_state(const EngineState& state) {
    if (state.size() != kFieldNames.size()) return false;
    int dense = 0, sparse = 0;
    for (const auto name : kFieldNames) {
        if (!state.contains(std::string(name))) return false;
        state.at(std::string(name)).is_dense() ? ++dense : ++sparse;
    }
    return dense == 0 || sparse == 0;
}

EngineState canonical_initial_state() {
    EngineState state;
    for (const auto name : kFieldNames) state.insert(Lattice::sparse(std::string(name)));
    state.at("Ex").add_assign({0, 0, 0}, Quantity{1.0, 0.0});
    return state;
}

EngineState canonical_initial_state_dense(Box box) {
    if (!box.contains(Site{0, 0, 0}))
        throw ValidationError("dense field state box must contain the origin");
    EngineState state;
    for (const auto name : kFieldNames) state.insert(Lattice::dense(std::string(name), box));
    state.at("Ex").add_assign({0, 0, 0}, Quantity{1.0, 0.0});
    return state;
}

namespace {

struct StencilTerm {
    const char* source;
    Site offset; // destination shift: source site s feeds site s + offset
    double sign; // multiplies p
};

// Four neighbor couplings per destination field, in the reading order of the
// update equations. Reading a +1 neighbor means offset -1 along that axis.
struct FieldRule {
    const char* destination;
    std::array<StencilTerm, 4> terms;
};

constexpr std::array<FieldRule, 6> kRules = {{
    {"Ex",
     {{{"Bz", {0, -1, 0}, +1.0}, {"Bz", {0, +1, 0}, -1.0}, {"By", {0, 0, -1}, -1.0},
       {"By", {0, 0, +1}, +1.0}}}},
    {"Ey",
     {{{"Bx", {0, 0, -1}, +1.0}, {"Bx", {0, 0, +1}, -1.0}, {"Bz", {-1, 0, 0}, -1.0},
       {"Bz", {+1, 0, 0}, +1.0}}}},
    {"Ez",
     {{{"By", {-1, 0, 0}, +1.0}, {"By", {+1, 0, 0}, -1.0}, {"Bx", {0, -1, 0}, -1.0},
       {"Bx", {0, +1, 0}, +1.0}}}},
    {"Bx",
     {{{"Ez", {0, -1, 0}, -1.0}, {"Ez", {0, +1, 0}, +1.0}, {"Ey", {0, 0, -1}, +1.0},
       {"Ey", {0, 0, +1}, -1.0}}}},
    {"By",
     {{{"Ex", {0, 0, -1}, -1.0}, {"Ex", {0, 0, +1}, +1.0}, {"Ez", {-1, 0, 0}, +1.0},
       {"Ez", {+1, 0, 0}, -1.0}}}},
    {"Bz",
     {{{"Ey", {-1, 0, 0}, -1.0}, {"Ey", {+1, 0, 0}, +1.0}, {"Ex", {0, -1, 0}, +1.0},
       {"Ex", {0, +1, 0}, -1.0}}}},
}};

} // namespace

CouplingTable build_maxwell_table(const CouplingFactor& p) {
    CouplingTable table;
    table.entries.reserve(30);
    for (const auto name : kFieldNames)
        table.entries.push_back(
            {std::string(name), std::string(name), {0, 0, 0}, Quantity{1.0, 0.0}});
    for (const auto& rule : kRules)
        for (const auto& term : rule.terms)
            table.entries.push_back({term.source, rule.destination, term.offset,
                                     Quantity{term.sign * p.value(), 0.0}});
    return table;
}

namespace {

using Cells = std::vector<std::pair<Site, Quantity>>;

// Contribution stream of the fused stencil, in per-destination fold order:
// the identity term first, then the four neighbor terms in rule order. This
// matches the accumulation order of the table interpreter, whose identity
// entries precede all stencil entries.
struct Contribution {
    const Lattice* source;
    Site offset;
    double factor;
};

using FieldContributions = std::array<Contribution, 5>;

FieldContributions contributions_for(const EngineState& state, const FieldRule& rule,
                                     double p) {
    FieldContributions c{};
    c[0] = {&state.at(rule.destination), {0, 0, 0}, 1.0};
    for (std::size_t i = 0; i < rule.terms.size(); ++i)
        c[i + 1] = {&state.at(rule.terms[i].source), rule.terms[i].offset,
                    rule.terms[i].sign * p};
    return c;
}

[[noreturn]] void throw_step_overflow(std::int64_t next_iteration, const char* field, Site s) {
    throw NumericError("iteration " + std::to_string(next_iteration) +
                       ": non-finite quantity at lattice '" + std::string(field) + "' site " +
                       to_string(s));
}

// The six destination fields write disjoint frames from read-only sources,
// so distributing them over threads cannot change any result bit.
template <class F>
void for_each_field_index(F&& f) {
    const unsigned threads =
        std::min<unsigned>(6, std::max<unsigned>(1, std::thread::hardware_concurrency()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < 6; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= 6) return;
                try {
                    f(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Five-way merge over shifted sorted cell streams. Every output site folds
// its present contributions in stream order, exactly as sequential
// add_shifted_scaled calls would.
Cells fused_sparse_field(const EngineState& state, const FieldRule& rule, double p,
                         std::int64_t next_iteration) {
    const FieldContributions contribs = contributions_for(state, rule, p);

    struct Cursor {
        const Cells* cells;
        std::size_t i = 0;
        Site offset;
        double factor;
        Site at{}; // shifted site of the current cell
    };
    std::array<Cursor, 5> cur{};
    std::size_t total = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        const Cells& cells = LatticeInternal::sparse_cells(*contribs[k].source);
        cur[k] = {&cells, 0, contribs[k].offset, contribs[k].factor};
        if (!cells.empty()) cur[k].at = checked_shift((*cur[k].cells)[0].first, cur[k].offset);
        total += cells.size();
    }

    Cells out;
    out.reserve(total);
    for (;;) {
        bool any = false;
        Site lo{};
        for (const auto& c : cur) {
            if (c.i >= c.cells->size()) continue;
            if (!any || c.at < lo) lo = c.at;
            any = true;
        }
        if (!any) break;

        Quantity acc{};
        bool first = true;
        for (auto& c : cur) {
            if (c.i >= c.cells->size() || !(c.at == lo)) continue;
            const Quantity contrib = Quantity{c.factor, 0.0} * (*c.cells)[c.i].second;
            acc = first ? contrib : acc + contrib;
            first = false;
            ++c.i;
            if (c.i < c.cells->size()) c.at = checked_shift((*c.cells)[c.i].first, c.offset);
        }
        if (!is_zero(acc)) {
            if (!is_finite(acc)) throw_step_overflow(next_iteration, rule.destination, lo);
            out.emplace_back(lo, normalize_zero(acc));
        }
    }
    return out;
}

EngineState step_direct_sparse(const EngineState& state, double p) {
    const std::int64_t next = state.iteration() + 1;
    std::array<Cells, 6> frames;
    for_each_field_index(
        [&](std::size_t i) { frames[i] = fused_sparse_field(state, kRules[i], p, next); });
    EngineState result;
    for (std::size_t i = 0; i < 6; ++i)
        result.insert(LatticeInternal::sparse_from_sorted(kRules[i].destination, next,
                                                          std::move(frames[i])));
    return result;
}

// Dense path: every cell of the write region (union of the six supports,
// expanded by one) is recomputed by the same five-term fold.
EngineState step_direct_dense(const EngineState& state, double p) {
    const std::int64_t next = state.iteration() + 1;
    const Box box = *state.at("Ex").dense_box();
    for (const auto name : kFieldNames)
        if (!(state.at(std::string(name)).dense_box()->lo == box.lo) ||
            !(state.at(std::string(name)).dense_box()->hi == box.hi))
            throw ValidationError("dense field lattices must share one bounding box");

    Box support = Box::empty();
    bool complex_values = false;
    for (const auto name : kFieldNames) {
        const Lattice& lat = state.at(std::string(name));
        support = support.united(LatticeInternal::dense_support(lat));
        complex_values = complex_values || !LatticeInternal::dense_im(lat).empty();
    }

    EngineState result;
    for (const auto name : kFieldNames) {
        Lattice frame = state.at(std::string(name)).empty_like();
        frame.set_iteration(next);
        result.insert(std::move(frame));
    }
    if (!support.valid()) return result;

    // Writes reach one cell beyond the support and their stencil reads one
    // more, so the declared box needs two cells of padding around it.
    const Box region = support.expanded(1);
    if (!box.contains(support.expanded(2)))
        throw ValidationError("dense bounding box too small: support reaches its boundary");

    const std::int64_t sy = box.side(1), sz = box.side(2);

    for_each_field_index([&](std::size_t f) {
        const auto& rule = kRules[f];
        const FieldContributions contribs = contributions_for(state, rule, p);

        struct Plane {
            const double* re;
            const double* im; // nullptr when never materialized
            std::int64_t delta;
            double factor;
        };
        std::array<Plane, 5> planes{};
        for (std::size_t k = 0; k < 5; ++k) {
            const Lattice& src = *contribs[k].source;
            const Site o = contribs[k].offset;
            planes[k] = {LatticeInternal::dense_re(src).data(),
                         LatticeInternal::dense_im(src).empty()
                             ? nullptr
                             : LatticeInternal::dense_im(src).data(),
                         // reading src at (site - offset)
                         -(std::int64_t{o.x} * sy * sz + o.y * sz + o.z),
                         contribs[k].factor};
        }

        Lattice& dst = result.at(rule.destination);
        auto view = LatticeInternal::dense_view(dst);
        double* out_re = view.re->data();
        double* out_im = nullptr;
        std::int64_t count = 0;
        Box written = Box::empty();

        for (std::int32_t x = region.lo.x; x <= region.hi.x; ++x)
            for (std::int32_t y = region.lo.y; y <= region.hi.y; ++y) {
                const std::int64_t row = box.index({x, y, region.lo.z});
                for (std::int32_t z = region.lo.z; z <= region.hi.z; ++z) {
                    const std::int64_t i = row + (z - region.lo.z);
                    if (!complex_values) {
                        double acc = 0.0;
                        bool present = false;
                        for (const auto& pl : planes) {
                            const double v = pl.re[i + pl.delta];
                            if (v != 0.0) {
                                acc = present ? acc + pl.factor * v : pl.factor * v;
                                present = true;
                            }
                        }
                        if (acc != 0.0) {
                            if (!std::isfinite(acc))
                                throw_step_overflow(next, rule.destination, {x, y, z});
                            out_re[i] = acc + 0.0;
                            ++count;
                            written = written.united(Box{{x, y, z}, {x, y, z}});
                        }
                        continue;
                    }
                    Quantity acc{};
                    bool present = false;
                    for (const auto& pl : planes) {
                        const double re = pl.re[i + pl.delta];
                        const double im = pl.im ? pl.im[i + pl.delta] : 0.0;
                        if (re != 0.0 || im != 0.0) {
                            const Quantity contrib =
                                Quantity{pl.factor, 0.0} * Quantity{re, im};
                            acc = present ? acc + contrib : contrib;
                            present = true;
                        }
                    }
                    if (!is_zero(acc)) {
                        if (!is_finite(acc))
                            throw_step_overflow(next, rule.destination, {x, y, z});
                        acc = normalize_zero(acc);
                        if (acc.imag() != 0.0 && !out_im) {
                            view.im->assign(view.re->size(), 0.0);
                            out_im = view.im->data();
                        }
                        out_re[i] = acc.real();
                        if (out_im) out_im[i] = acc.imag();
                        ++count;
                        written = written.united(Box{{x, y, z}, {x, y, z}});
                    }
                }
            }
        *view.count = count;
        *view.support = written;
    });
    return result;
}

} // namespace

EngineState step_direct(const EngineState& state, const CouplingFactor& p) {
    if (!is_field_state(state))
        throw ValidationError(
            "direct stepping requires exactly the six field lattices on one backend");
    return state.at("Ex").is_dense() ? step_direct_dense(state, p.value())
                                     : step_direct_sparse(state, p.value());
}

RunRecord run_direct(EngineState state, const CouplingFactor& p, std::int64_t steps,
                     std::span<const ProbeSpec> probes, const PrunePolicy& policy) {
    return run_with_stepper(
        std::move(state), [&p](const EngineState& s) { return step_direct(s, p); }, steps,
        probes, policy);
}

} // namespace maxlat::maxwell
