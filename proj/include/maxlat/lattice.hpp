#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maxlat/site.hpp"

namespace maxlat {

/// Complex quantity assigned to a lattice site. Canonical runs stay purely
/// real; the engine is defined over complex factors throughout.
using Quantity = std::complex<double>;

inline bool is_zero(const Quantity& q) { return q.real() == 0.0 && q.imag() == 0.0; }
inline bool is_finite(const Quantity& q) {
    return std::isfinite(q.real()) && std::isfinite(q.imag());
}
inline double sq_mag(const Quantity& q) {
    return q.real() * q.real() + q.imag() * q.imag();
}
inline double magnitude(const Quantity& q) { return std::abs(q); }

/// Stored components never carry negative zero; this keeps bit patterns
/// identical across backends and accumulation paths.
inline Quantity normalize_zero(Quantity q) {
    return {q.real() + 0.0, q.imag() + 0.0};
}

struct PruneReport {
    std::string lattice;
    std::int64_t iteration = 0;
    std::int64_t sites_before = 0;
    std::int64_t sites_after = 0;
    double dropped_abs_sum = 0.0; // sum of magnitudes removed
    double smallest_kept = 0.0;   // 0 when nothing kept
};

struct LatticeInternal;

/// Named map Site -> Quantity tagged with an iteration number.
///
/// Zero is never stored: a quantity that becomes exactly zero is absent.
/// Two interchangeable backends share one contract:
///   - sparse: lexicographically sorted vector of (Site, Quantity) cells;
///   - dense:  per-component planes over a declared bounding box. Reads
///     outside the box return zero, writes outside it are an error.
/// For any program of operations within the dense box both backends hold
/// bit-identical values.
class Lattice {
public:
    Lattice() = default;

    static Lattice sparse(std::string name, std::int64_t iteration = 0);
    static Lattice dense(std::string name, Box box, std::int64_t iteration = 0);

    /// Sparse lattice built from cells; they are sorted, merged and
    /// zero-normalized as needed. Throws NumericError on non-finite input.
    static Lattice from_cells(std::string name, std::int64_t iteration,
                              std::vector<std::pair<Site, Quantity>> cells);

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    std::int64_t iteration() const { return iteration_; }
    void set_iteration(std::int64_t n) { iteration_ = n; }

    bool is_dense() const { return dense_flag_; }
    /// Declared bounding box; nullptr for the sparse backend.
    const Box* dense_box() const { return dense_flag_ ? &dense_.box : nullptr; }

    /// Same name, backend, box and iteration, with no stored sites.
    Lattice empty_like() const;

    /// Stored quantity, or exact zero when absent. Never fails.
    Quantity get(Site s) const;

    /// value <- value + q; an exactly zero result removes the site.
    void add_assign(Site s, Quantity q);

    std::int64_t nonzero_count() const;

    /// max |x|+|y|+|z| over stored sites, -1 when empty.
    std::int64_t l1_support_radius() const;

    /// Keep at most `budget` sites, largest magnitude first; ties keep the
    /// lexicographically smaller site.
    PruneReport prune(std::int64_t budget);

    /// Visit nonzero cells in lexicographic site order.
    template <class F>
    void for_each(F&& f) const {
        if (!dense_flag_) {
            for (const auto& [s, q] : cells_) f(s, q);
            return;
        }
        const Box sup = dense_.support;
        if (!sup.valid()) return;
        for (std::int32_t x = sup.lo.x; x <= sup.hi.x; ++x)
            for (std::int32_t y = sup.lo.y; y <= sup.hi.y; ++y)
                for (std::int32_t z = sup.lo.z; z <= sup.hi.z; ++z) {
                    const Site s{x, y, z};
                    const std::int64_t i = dense_.box.index(s);
                    const double re = dense_.re[static_cast<std::size_t>(i)];
                    const double im =
                        dense_.im.empty() ? 0.0 : dense_.im[static_cast<std::size_t>(i)];
                    if (re != 0.0 || im != 0.0) f(s, Quantity{re, im});
                }
    }

    /// Nonzero cells as a sorted vector (copies out of either backend).
    std::vector<std::pair<Site, Quantity>> cells() const;

    /// dst(s + offset) += factor * src(s) for every nonzero src site s,
    /// traversed in lexicographic order. dst and src must be distinct.
    friend void add_shifted_scaled(Lattice& dst, const Lattice& src, Site offset,
                                   Quantity factor);

private:
    struct DenseStore {
        Box box = Box::empty();
        std::vector<double> re;       // box.volume() entries
        std::vector<double> im;       // allocated on first imaginary write
        std::int64_t count = 0;       // logically nonzero cells
        Box support = Box::empty();   // grow-only cover of nonzero cells
    };

    std::string name_;
    std::int64_t iteration_ = 0;
    bool dense_flag_ = false;
    std::vector<std::pair<Site, Quantity>> cells_; // sparse backend
    DenseStore dense_;                             // dense backend

    friend struct LatticeInternal;
};

void add_shifted_scaled(Lattice& dst, const Lattice& src, Site offset, Quantity factor);

} // namespace maxlat
