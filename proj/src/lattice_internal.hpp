#pragma once

#include <limits>

#include "maxlat/error.hpp"
#include "maxlat/lattice.hpp"

namespace maxlat {

// Shifted coordinates are formed in 64 bits so an offset can never wrap.
inline Site checked_shift(Site s, Site offset) {
    const std::int64_t x = std::int64_t{s.x} + offset.x;
    const std::int64_t y = std::int64_t{s.y} + offset.y;
    const std::int64_t z = std::int64_t{s.z} + offset.z;
    constexpr std::int64_t lim = std::numeric_limits<std::int32_t>::max();
    if (x < -lim || x > lim || y < -lim || y > lim || z < -lim || z > lim)
        throw ValidationError("shift offset overflows site coordinates at " + to_string(s));
    return {static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
            static_cast<std::int32_t>(z)};
}

// Backdoor for the fused stepping kernels. Callers own the invariants the
// public API normally enforces: sorted unique nonzero-normalized cells for
// sparse stores, consistent count/support for dense planes.
struct LatticeInternal {
    static std::vector<std::pair<Site, Quantity>>& sparse_cells(Lattice& l) {
        return l.cells_;
    }
    static const std::vector<std::pair<Site, Quantity>>& sparse_cells(const Lattice& l) {
        return l.cells_;
    }

    static Lattice sparse_from_sorted(std::string name, std::int64_t iteration,
                                      std::vector<std::pair<Site, Quantity>> cells) {
        Lattice l = Lattice::sparse(std::move(name), iteration);
        l.cells_ = std::move(cells);
        return l;
    }

    struct DenseView {
        Box box;
        std::vector<double>* re;
        std::vector<double>* im;
        std::int64_t* count;
        Box* support;
    };
    static DenseView dense_view(Lattice& l) {
        return {l.dense_.box, &l.dense_.re, &l.dense_.im, &l.dense_.count, &l.dense_.support};
    }
    static const std::vector<double>& dense_re(const Lattice& l) { return l.dense_.re; }
    static const std::vector<double>& dense_im(const Lattice& l) { return l.dense_.im; }
    static Box dense_support(const Lattice& l) { return l.dense_.support; }
};

} // namespace maxlat
