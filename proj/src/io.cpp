#include "maxlat/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "maxlat/error.hpp"

namespace maxlat::io {

namespace {

constexpr int kLatticeFormatVersion = 1;
constexpr const char* kLatticeFormatTag = "maxlat-lattice";

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

template <class T>
T parse_number(std::string_view tok, const std::filesystem::path& path, std::size_t line,
               const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        parse_fail(path, line, std::string("malformed ") + what + " '" + std::string(tok) + "'");
    return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void save_lattice(const Lattice& lat, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << kLatticeFormatTag << ' ' << kLatticeFormatVersion << '\n';
    out << "name " << lat.name() << '\n';
    out << "iteration " << lat.iteration() << '\n';
    out << "sites " << lat.nonzero_count() << '\n';
    lat.for_each([&](Site s, const Quantity& q) {
        out << s.x << ' ' << s.y << ' ' << s.z << ' ' << format_double(q.real()) << ' '
            << format_double(q.imag()) << '\n';
    });
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Lattice load_lattice(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;

    const auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) parse_fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
        return line;
    };

    {
        const auto toks = split_ws(next_line());
        if (toks.size() != 2 || toks[0] != kLatticeFormatTag)
            parse_fail(path, lineno, "not a lattice file");
        const int version = parse_number<int>(toks[1], path, lineno, "format version");
        if (version != kLatticeFormatVersion)
            parse_fail(path, lineno,
                       "unsupported format version " + std::to_string(version) + " (expected " +
                           std::to_string(kLatticeFormatVersion) + ")");
    }
    std::string name;
    {
        const std::string& l = next_line();
        if (l.rfind("name ", 0) != 0) parse_fail(path, lineno, "expected 'name <lattice>'");
        name = l.substr(5);
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        if (name.empty()) parse_fail(path, lineno, "empty lattice name");
    }
    std::int64_t iteration = 0;
    {
        const auto toks = split_ws(next_line());
        if (toks.size() != 2 || toks[0] != "iteration")
            parse_fail(path, lineno, "expected 'iteration <n>'");
        iteration = parse_number<std::int64_t>(toks[1], path, lineno, "iteration");
        if (iteration < 0) parse_fail(path, lineno, "iteration must be >= 0");
    }
    std::int64_t sites = 0;
    {
        const auto toks = split_ws(next_line());
        if (toks.size() != 2 || toks[0] != "sites")
            parse_fail(path, lineno, "expected 'sites <count>'");
        sites = parse_number<std::int64_t>(toks[1], path, lineno, "site count");
        if (sites < 0) parse_fail(path, lineno, "site count must be >= 0");
    }

    std::vector<std::pair<Site, Quantity>> cells;
    cells.reserve(static_cast<std::size_t>(sites));
    for (std::int64_t i = 0; i < sites; ++i) {
        const auto toks = split_ws(next_line());
        if (toks.size() != 5) parse_fail(path, lineno, "expected 'x y z re im'");
        Site s{parse_number<std::int32_t>(toks[0], path, lineno, "coordinate"),
               parse_number<std::int32_t>(toks[1], path, lineno, "coordinate"),
               parse_number<std::int32_t>(toks[2], path, lineno, "coordinate")};
        const double re = parse_number<double>(toks[3], path, lineno, "value");
        const double im = parse_number<double>(toks[4], path, lineno, "value");
        cells.emplace_back(s, Quantity{re, im});
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!split_ws(line).empty()) parse_fail(path, lineno, "trailing content after records");
    }
    try {
        return Lattice::from_cells(std::move(name), iteration, std::move(cells));
    } catch (const Error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line, const std::filesystem::path& path,
                                   std::size_t lineno) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) parse_fail(path, lineno, "unterminated quote");
    out.push_back(std::move(field));
    return out;
}

} // namespace

void export_series_csv(const std::vector<NamedSeries>& series,
                       const std::filesystem::path& path, std::string_view abscissa) {
    if (series.empty()) throw ValidationError("refusing to export an empty series list");
    const auto& t0 = series.front().series;
    for (const auto& s : series)
        if (s.series.size() != t0.size())
            throw ValidationError("series lengths differ; cannot align on t");
    for (std::size_t i = 0; i < t0.size(); ++i)
        for (const auto& s : series)
            if (s.series[i].t != t0[i].t)
                throw ValidationError("series t columns differ; cannot align");

    std::ofstream out = open_out(path);
    out << abscissa;
    for (const auto& s : series) out << ',' << csv_quote(s.name);
    out << '\n';
    for (std::size_t i = 0; i < t0.size(); ++i) {
        out << t0[i].t;
        for (const auto& s : series) out << ',' << format_double(s.series[i].value);
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<NamedSeries> load_series_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++lineno;
    const auto header = csv_split(line, path, lineno);
    if (header.size() < 2) parse_fail(path, lineno, "expected header 't,<series>...'");

    std::vector<NamedSeries> out(header.size() - 1);
    for (std::size_t i = 1; i < header.size(); ++i) out[i - 1].name = header[i];

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = csv_split(line, path, lineno);
        if (fields.size() != header.size())
            parse_fail(path, lineno, "wrong number of columns");
        const auto t = parse_number<std::int64_t>(fields[0], path, lineno, "t");
        for (std::size_t i = 1; i < fields.size(); ++i)
            out[i - 1].series.push_back(
                {t, parse_number<double>(fields[i], path, lineno, "value")});
    }
    return out;
}

CouplingTable load_coupling_table(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    CouplingTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 7)
            parse_fail(path, lineno, "expected 'SRC DST dx dy dz re im'");
        CouplingEntry e;
        e.source = std::string(toks[0]);
        e.destination = std::string(toks[1]);
        e.offset = {parse_number<std::int32_t>(toks[2], path, lineno, "offset"),
                    parse_number<std::int32_t>(toks[3], path, lineno, "offset"),
                    parse_number<std::int32_t>(toks[4], path, lineno, "offset")};
        e.factor = {parse_number<double>(toks[5], path, lineno, "factor"),
                    parse_number<double>(toks[6], path, lineno, "factor")};
        table.entries.push_back(std::move(e));
    }
    if (table.entries.empty()) parse_fail(path, lineno ? lineno : 1, "no coupling entries");
    return table;
}

void save_coupling_table(const CouplingTable& table, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# SRC DST dx dy dz re im\n";
    for (const auto& e : table.entries)
        out << e.source << ' ' << e.destination << ' ' << e.offset.x << ' ' << e.offset.y
            << ' ' << e.offset.z << ' ' << format_double(e.factor.real()) << ' '
            << format_double(e.factor.imag()) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_prune_reports(const std::vector<PruneReport>& reports,
                        const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "lattice,iteration,sites_before,sites_after,dropped_abs_sum,smallest_kept\n";
    for (const auto& r : reports)
        out << csv_quote(r.lattice) << ',' << r.iteration << ',' << r.sites_before << ','
            << r.sites_after << ',' << format_double(r.dropped_abs_sum) << ','
            << format_double(r.smallest_kept) << '\n';
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace maxlat::io
