#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace maxlat {

/// A point of the unbounded 3-D integer lattice, in dimensionless hat
/// coordinates. Ordering is lexicographic (x, then y, then z); every
/// deterministic traversal in the library relies on it.
struct Site {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;

    friend constexpr auto operator<=>(const Site&, const Site&) = default;

    friend constexpr Site operator+(Site a, Site b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Site operator-(Site a, Site b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }

    constexpr std::int64_t l1_norm() const {
        return std::int64_t{std::abs(x)} + std::abs(y) + std::abs(z);
    }
};

std::string to_string(const Site& s);

/// Axis-aligned inclusive bounding box.
struct Box {
    Site lo;
    Site hi;

    constexpr bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
    constexpr bool contains(Site s) const {
        return s.x >= lo.x && s.x <= hi.x && s.y >= lo.y && s.y <= hi.y &&
               s.z >= lo.z && s.z <= hi.z;
    }
    constexpr bool contains(const Box& b) const {
        return contains(b.lo) && contains(b.hi);
    }
    constexpr std::int64_t side(int axis) const {
        switch (axis) {
        case 0: return std::int64_t{hi.x} - lo.x + 1;
        case 1: return std::int64_t{hi.y} - lo.y + 1;
        default: return std::int64_t{hi.z} - lo.z + 1;
        }
    }
    constexpr std::int64_t volume() const {
        return valid() ? side(0) * side(1) * side(2) : 0;
    }
    /// Row-major linear index; precondition: contains(s).
    constexpr std::int64_t index(Site s) const {
        return ((std::int64_t{s.x} - lo.x) * side(1) + (s.y - lo.y)) * side(2) + (s.z - lo.z);
    }
    /// Cube of L1 radius r around the origin.
    static constexpr Box centered(std::int32_t r) {
        return {{-r, -r, -r}, {r, r, r}};
    }
    constexpr Box expanded(std::int32_t m) const {
        return {{lo.x - m, lo.y - m, lo.z - m}, {hi.x + m, hi.y + m, hi.z + m}};
    }
    constexpr Box united(const Box& b) const {
        if (!valid()) return b;
        if (!b.valid()) return *this;
        return {{std::min(lo.x, b.lo.x), std::min(lo.y, b.lo.y), std::min(lo.z, b.lo.z)},
                {std::max(hi.x, b.hi.x), std::max(hi.y, b.hi.y), std::max(hi.z, b.hi.z)}};
    }
    /// Canonical empty box (valid() == false).
    static constexpr Box empty() { return {{0, 0, 0}, {-1, -1, -1}}; }
};

} // namespace maxlat
