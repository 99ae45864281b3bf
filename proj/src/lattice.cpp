#include "maxlat/lattice.hpp"

#include <algorithm>
#include <limits>

#include "lattice_internal.hpp"
#include "maxlat/error.hpp"

namespace maxlat {

std::string to_string(const Site& s) {
    return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + "," +
           std::to_string(s.z) + ")";
}

namespace {

[[noreturn]] void throw_non_finite(const std::string& lattice, Site s) {
    throw NumericError("non-finite quantity at lattice '" + lattice + "' site " +
                       to_string(s));
}

void check_store(const std::string& lattice, Site s, const Quantity& q) {
    if (!is_finite(q)) throw_non_finite(lattice, s);
}

} // namespace

Lattice Lattice::sparse(std::string name, std::int64_t iteration) {
    Lattice l;
    l.name_ = std::move(name);
    l.iteration_ = iteration;
    l.dense_flag_ = false;
    return l;
}

Lattice Lattice::dense(std::string name, Box box, std::int64_t iteration) {
    if (!box.valid()) throw ValidationError("dense lattice requires a valid bounding box");
    const std::int64_t vol = box.volume();
    Lattice l;
    l.name_ = std::move(name);
    l.iteration_ = iteration;
    l.dense_flag_ = true;
    l.dense_.box = box;
    l.dense_.re.assign(static_cast<std::size_t>(vol), 0.0);
    return l;
}

Lattice Lattice::from_cells(std::string name, std::int64_t iteration,
                            std::vector<std::pair<Site, Quantity>> cells) {
    std::stable_sort(cells.begin(), cells.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Site, Quantity>> merged;
    merged.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size();) {
        const Site s = cells[i].first;
        Quantity acc = cells[i].second;
        check_store(name, s, acc);
        for (++i; i < cells.size() && cells[i].first == s; ++i) {
            check_store(name, s, cells[i].second);
            acc += cells[i].second;
        }
        if (!is_zero(acc)) merged.emplace_back(s, normalize_zero(acc));
    }
    Lattice l = sparse(std::move(name), iteration);
    l.cells_ = std::move(merged);
    return l;
}

Lattice Lattice::empty_like() const {
    if (!dense_flag_) return sparse(name_, iteration_);
    return dense(name_, dense_.box, iteration_);
}

Quantity Lattice::get(Site s) const {
    if (!dense_flag_) {
        const auto it = std::lower_bound(
            cells_.begin(), cells_.end(), s,
            [](const auto& cell, const Site& key) { return cell.first < key; });
        if (it != cells_.end() && it->first == s) return it->second;
        return {};
    }
    if (!dense_.box.contains(s)) return {};
    const auto i = static_cast<std::size_t>(dense_.box.index(s));
    const double re = dense_.re[i];
    const double im = dense_.im.empty() ? 0.0 : dense_.im[i];
    if (re == 0.0 && im == 0.0) return {};
    return {re, im};
}

void Lattice::add_assign(Site s, Quantity q) {
    check_store(name_, s, q);
    if (!dense_flag_) {
        const auto it = std::lower_bound(
            cells_.begin(), cells_.end(), s,
            [](const auto& cell, const Site& key) { return cell.first < key; });
        if (it != cells_.end() && it->first == s) {
            const Quantity v = it->second + q;
            check_store(name_, s, v);
            if (is_zero(v))
                cells_.erase(it);
            else
                it->second = normalize_zero(v);
        } else if (!is_zero(q)) {
            cells_.insert(it, {s, normalize_zero(q)});
        }
        return;
    }
    if (!dense_.box.contains(s))
        throw ValidationError("write at " + to_string(s) + " outside dense box of lattice '" +
                              name_ + "'");
    const auto i = static_cast<std::size_t>(dense_.box.index(s));
    const double old_re = dense_.re[i];
    const double old_im = dense_.im.empty() ? 0.0 : dense_.im[i];
    const bool was_zero = (old_re == 0.0 && old_im == 0.0);
    // A logically zero cell behaves as absent: assign instead of accumulate.
    Quantity v = was_zero ? q : Quantity{old_re, old_im} + q;
    check_store(name_, s, v);
    if (is_zero(v)) {
        if (!was_zero) {
            dense_.re[i] = 0.0;
            if (!dense_.im.empty()) dense_.im[i] = 0.0;
            --dense_.count;
        }
        return;
    }
    v = normalize_zero(v);
    if (v.imag() != 0.0 && dense_.im.empty())
        dense_.im.assign(dense_.re.size(), 0.0);
    dense_.re[i] = v.real();
    if (!dense_.im.empty()) dense_.im[i] = v.imag();
    if (was_zero) {
        ++dense_.count;
        dense_.support = dense_.support.united(Box{s, s});
    }
}

std::int64_t Lattice::nonzero_count() const {
    return dense_flag_ ? dense_.count : static_cast<std::int64_t>(cells_.size());
}

std::int64_t Lattice::l1_support_radius() const {
    std::int64_t r = -1;
    for_each([&](Site s, const Quantity&) { r = std::max(r, s.l1_norm()); });
    return r;
}

std::vector<std::pair<Site, Quantity>> Lattice::cells() const {
    if (!dense_flag_) return cells_;
    std::vector<std::pair<Site, Quantity>> out;
    out.reserve(static_cast<std::size_t>(dense_.count));
    for_each([&](Site s, const Quantity& q) { out.emplace_back(s, q); });
    return out;
}

PruneReport Lattice::prune(std::int64_t budget) {
    if (budget < 0) throw ValidationError("prune budget must be >= 0");
    PruneReport rep;
    rep.lattice = name_;
    rep.iteration = iteration_;
    rep.sites_before = nonzero_count();

    if (rep.sites_before <= budget) {
        rep.sites_after = rep.sites_before;
        double smallest = std::numeric_limits<double>::infinity();
        for_each([&](Site, const Quantity& q) { smallest = std::min(smallest, magnitude(q)); });
        rep.smallest_kept = rep.sites_before > 0 ? smallest : 0.0;
        return rep;
    }

    auto all = cells();
    // Total order: larger magnitude first, lexicographically smaller site
    // wins ties. nth_element under a total order makes the kept set unique.
    const auto better = [](const std::pair<Site, Quantity>& a,
                           const std::pair<Site, Quantity>& b) {
        const double ma = sq_mag(a.second), mb = sq_mag(b.second);
        if (ma != mb) return ma > mb;
        return a.first < b.first;
    };
    auto drop_from = all.begin();
    if (budget > 0) {
        const auto boundary = all.begin() + static_cast<std::ptrdiff_t>(budget) - 1;
        std::nth_element(all.begin(), boundary, all.end(), better);
        rep.smallest_kept = magnitude(boundary->second);
        drop_from = boundary + 1;
    }
    rep.sites_after = budget;

    // Dropped magnitudes are summed in site order so the report value does
    // not depend on how nth_element arranged them.
    std::sort(drop_from, all.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double dropped = 0.0;
    for (auto it = drop_from; it != all.end(); ++it) dropped += magnitude(it->second);
    rep.dropped_abs_sum = dropped;

    if (!dense_flag_) {
        all.resize(static_cast<std::size_t>(budget));
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        cells_ = std::move(all);
        return rep;
    }
    for (auto it = drop_from; it != all.end(); ++it) {
        const auto i = static_cast<std::size_t>(dense_.box.index(it->first));
        dense_.re[i] = 0.0;
        if (!dense_.im.empty()) dense_.im[i] = 0.0;
    }
    dense_.count = budget;
    return rep;
}

namespace {

// Merge-based kernel for a sparse destination: offsetting every site by a
// constant preserves lexicographic order, so the shifted source is itself a
// sorted stream and one two-pointer pass rebuilds the destination.
void merge_into_sparse(const std::string& dst_name,
                       std::vector<std::pair<Site, Quantity>>& dst_cells,
                       const std::vector<std::pair<Site, Quantity>>& src_cells,
                       Site offset, Quantity factor) {
    std::vector<std::pair<Site, Quantity>> out;
    out.reserve(dst_cells.size() + src_cells.size());
    auto d = dst_cells.begin();
    const auto d_end = dst_cells.end();
    auto s = src_cells.begin();
    const auto s_end = src_cells.end();
    Site at{};
    if (s != s_end) at = checked_shift(s->first, offset);
    while (d != d_end || s != s_end) {
        if (s == s_end || (d != d_end && d->first < at)) {
            out.push_back(*d++);
            continue;
        }
        Quantity acc = factor * s->second;
        if (d != d_end && d->first == at) {
            acc += d->second;
            ++d;
        }
        if (!is_zero(acc)) {
            check_store(dst_name, at, acc);
            out.emplace_back(at, normalize_zero(acc));
        }
        ++s;
        if (s != s_end) at = checked_shift(s->first, offset);
    }
    dst_cells = std::move(out);
}

} // namespace

void add_shifted_scaled(Lattice& dst, const Lattice& src, Site offset, Quantity factor) {
    if (&dst == &src)
        throw ValidationError("add_shifted_scaled requires distinct source and destination");
    if (!is_finite(factor))
        throw NumericError("non-finite coupling factor into lattice '" + dst.name() + "'");

    if (!src.dense_flag_) {
        if (!dst.dense_flag_) {
            merge_into_sparse(dst.name_, dst.cells_, src.cells_, offset, factor);
            return;
        }
        for (const auto& [s, q] : src.cells_)
            dst.add_assign(checked_shift(s, offset), factor * q);
        return;
    }

    if (!dst.dense_flag_) {
        merge_into_sparse(dst.name_, dst.cells_, src.cells(), offset, factor);
        return;
    }
    src.for_each(
        [&](Site s, const Quantity& q) { dst.add_assign(checked_shift(s, offset), factor * q); });
}

} // namespace maxlat
