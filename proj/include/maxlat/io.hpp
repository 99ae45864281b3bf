#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "maxlat/analysis.hpp"
#include "maxlat/engine.hpp"

namespace maxlat::io {

struct NamedSeries {
    std::string name;
    analysis::Series series;
};

/// Versioned plain-text lattice format: a four-line header (format tag and
/// version, name, iteration, site count) followed by one "x y z re im"
/// record per site in lexicographic order, numbers printed as
/// shortest-exact decimals. load(save(lat)) reproduces the stored values
/// bit for bit.
void save_lattice(const Lattice& lat, const std::filesystem::path& path);
Lattice load_lattice(const std::filesystem::path& path);

/// Columns: t, then one column per series; header row carries the names.
/// All series must share one t column. Spatial slices relabel the abscissa.
void export_series_csv(const std::vector<NamedSeries>& series,
                       const std::filesystem::path& path,
                       std::string_view abscissa = "t");
std::vector<NamedSeries> load_series_csv(const std::filesystem::path& path);

/// One entry per line: "SRC DST dx dy dz re im"; '#' starts a comment.
CouplingTable load_coupling_table(const std::filesystem::path& path);
void save_coupling_table(const CouplingTable& table, const std::filesystem::path& path);

void save_prune_reports(const std::vector<PruneReport>& reports,
                        const std::filesystem::path& path);

/// Shortest decimal that parses back to the identical binary64.
std::string format_double(double v);

} // namespace maxlat::io
