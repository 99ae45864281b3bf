#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "maxlat/error.hpp"
#include "maxlat/io.hpp"
#include "maxlat/maxwell.hpp"
#include "maxlat/plot.hpp"

using namespace maxlat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("maxlat_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

bool bit_equal(const Quantity& a, const Quantity& b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

bool lattices_bit_equal(const Lattice& a, const Lattice& b) {
    if (a.name() != b.name() || a.iteration() != b.iteration()) return false;
    const auto ca = a.cells(), cb = b.cells();
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (!(ca[i].first == cb[i].first) || !bit_equal(ca[i].second, cb[i].second))
            return false;
    return true;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("lattice files round-trip bit-exactly") {
    TempDir tmp;

    SUBCASE("canonical init") {
        const EngineState init = maxwell::canonical_initial_state();
        const fs::path f = tmp.path / "ex.lat";
        io::save_lattice(init.at("Ex"), f);
        const Lattice back = io::load_lattice(f);
        CHECK(back.nonzero_count() == 1);
        CHECK(lattices_bit_equal(back, init.at("Ex")));
    }

    SUBCASE("empty lattice is header only") {
        const Lattice empty = Lattice::sparse("Void", 12);
        const fs::path f = tmp.path / "empty.lat";
        io::save_lattice(empty, f);
        std::ifstream in(f);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        CHECK(text == "maxlat-lattice 1\nname Void\niteration 12\nsites 0\n");
        CHECK(lattices_bit_equal(io::load_lattice(f), empty));
    }

    SUBCASE("fuzzed lattices") {
        std::mt19937_64 rng(20250809);
        std::uniform_int_distribution<std::int32_t> coord(-1000000, 1000000);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int round = 0; round < 20; ++round) {
            Lattice lat = Lattice::sparse("fuzz_" + std::to_string(round), round);
            const int n = 1 + round * 7;
            for (int i = 0; i < n; ++i) {
                // spread magnitudes over many binades, mix exact and messy
                const double v = std::ldexp(uni(rng), (i * 37) % 600 - 300);
                lat.add_assign({coord(rng), coord(rng), coord(rng)},
                               {v, round % 3 ? uni(rng) : 0.0});
            }
            const fs::path f = tmp.path / ("fuzz" + std::to_string(round) + ".lat");
            io::save_lattice(lat, f);
            CHECK(lattices_bit_equal(io::load_lattice(f), lat));
        }
    }

    SUBCASE("dense lattice saves its nonzero cells") {
        Lattice dn = Lattice::dense("D", Box::centered(4), 3);
        dn.add_assign({0, 1, -2}, {0.5, -0.25});
        dn.add_assign({-3, 0, 0}, {1e-200, 0.0});
        const fs::path f = tmp.path / "dense.lat";
        io::save_lattice(dn, f);
        const Lattice back = io::load_lattice(f);
        CHECK(back.nonzero_count() == 2);
        CHECK(bit_equal(back.get({0, 1, -2}), dn.get({0, 1, -2})));
        CHECK(bit_equal(back.get({-3, 0, 0}), dn.get({-3, 0, 0})));
    }
}

TEST_CASE("lattice file parse errors carry line numbers") {
    TempDir tmp;
    const fs::path f = tmp.path / "bad.lat";

    SUBCASE("non-integer coordinate") {
        write_text(f, "maxlat-lattice 1\nname A\niteration 0\nsites 1\n0.5 0 0 1 0\n");
        try {
            io::load_lattice(f);
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find(":5:") != std::string::npos);
        }
    }

    SUBCASE("version mismatch") {
        write_text(f, "maxlat-lattice 99\nname A\niteration 0\nsites 0\n");
        try {
            io::load_lattice(f);
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }

    SUBCASE("truncated file") {
        write_text(f, "maxlat-lattice 1\nname A\niteration 0\nsites 3\n0 0 0 1 0\n");
        CHECK_THROWS_AS(io::load_lattice(f), IoError);
    }

    SUBCASE("missing file") { CHECK_THROWS_AS(io::load_lattice(tmp.path / "nope"), IoError); }
}

TEST_CASE("series CSV export") {
    TempDir tmp;
    const fs::path f = tmp.path / "series.csv";

    SUBCASE("one series gives header plus two rows") {
        io::export_series_csv({{"Ex:0,0,0", {{0, 1.0}, {1, 1.0}}}}, f);
        std::ifstream in(f);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        CHECK(text == "t,\"Ex:0,0,0\"\n0,1\n1,1\n");
    }

    SUBCASE("round-trip reparses to identical bits") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<io::NamedSeries> series(3);
        series[0].name = "Ex:0,0,0";
        series[1].name = "Bz:0,1,0";
        series[2].name = "plain";
        for (std::int64_t t = 0; t <= 40; ++t)
            for (auto& s : series)
                s.series.push_back({t, std::ldexp(uni(rng), static_cast<int>(t * 11) % 200 - 100)});
        io::export_series_csv(series, f);
        const auto back = io::load_series_csv(f);
        REQUIRE(back.size() == series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            CHECK(back[i].name == series[i].name);
            REQUIRE(back[i].series.size() == series[i].series.size());
            for (std::size_t j = 0; j < series[i].series.size(); ++j) {
                CHECK(back[i].series[j].t == series[i].series[j].t);
                CHECK(std::memcmp(&back[i].series[j].value, &series[i].series[j].value,
                                  sizeof(double)) == 0);
            }
        }
    }

    SUBCASE("empty list is rejected") {
        CHECK_THROWS_AS(io::export_series_csv({}, f), ValidationError);
    }

    SUBCASE("misaligned series are rejected") {
        CHECK_THROWS_AS(
            io::export_series_csv({{"a", {{0, 1.0}}}, {"b", {{1, 1.0}}}}, f),
            ValidationError);
    }
}

TEST_CASE("coupling table files") {
    TempDir tmp;
    const fs::path f = tmp.path / "table.tbl";

    SUBCASE("the Maxwell table survives a round trip") {
        const CouplingTable table =
            maxwell::build_maxwell_table(maxwell::CouplingFactor(maxwell::sqrt_alpha()));
        io::save_coupling_table(table, f);
        const CouplingTable back = io::load_coupling_table(f);
        REQUIRE(back.entries.size() == table.entries.size());
        for (std::size_t i = 0; i < table.entries.size(); ++i) {
            CHECK(back.entries[i].source == table.entries[i].source);
            CHECK(back.entries[i].destination == table.entries[i].destination);
            CHECK(back.entries[i].offset == table.entries[i].offset);
            CHECK(bit_equal(back.entries[i].factor, table.entries[i].factor));
        }
    }

    SUBCASE("comments and blank lines are skipped") {
        write_text(f, "# random walk on a line\nA A -1 0 0 0.5 0\nA A 1 0 0 0.5 0\n\n");
        const CouplingTable t = io::load_coupling_table(f);
        CHECK(t.entries.size() == 2);
        CHECK(t.entries[0].offset == Site{-1, 0, 0});
    }

    SUBCASE("malformed entries name the line") {
        write_text(f, "A A 0 0 0 1 0\nA B 0 0 one 1 0\n");
        try {
            io::load_coupling_table(f);
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
    }
}

TEST_CASE("svg plots are written and deterministic") {
    TempDir tmp;
    std::vector<io::NamedSeries> series(2);
    series[0].name = "Ex:0,0,0";
    series[1].name = "Bz:0,1,0";
    for (std::int64_t t = 0; t <= 50; ++t) {
        series[0].series.push_back({t, std::cos(0.2 * static_cast<double>(t))});
        series[1].series.push_back({t, 0.5 * std::sin(0.2 * static_cast<double>(t))});
    }
    const fs::path a = tmp.path / "a.svg";
    const fs::path b = tmp.path / "b.svg";
    plot::render_line_plot(series, a, "t", "probe");
    plot::render_line_plot(series, b, "t", "probe");

    std::ifstream ia(a), ib(b);
    const std::string ta((std::istreambuf_iterator<char>(ia)), {});
    const std::string tb((std::istreambuf_iterator<char>(ib)), {});
    CHECK(ta == tb);
    CHECK(ta.find("<svg") == 0);
    CHECK(ta.find("polyline") != std::string::npos);
    CHECK(ta.rfind("</svg>\n") == ta.size() - 7);

    const fs::path xy = tmp.path / "xy.svg";
    plot::render_xy_plot(series[1].series, series[0].series, xy, "B", "E");
    std::ifstream ixy(xy);
    const std::string txy((std::istreambuf_iterator<char>(ixy)), {});
    CHECK(txy.find("polyline") != std::string::npos);

    CHECK_THROWS_AS(plot::render_line_plot({}, tmp.path / "no.svg", "x", "y"),
                    ValidationError);
}
