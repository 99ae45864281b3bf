#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maxlat/analysis.hpp"
#include "maxlat/error.hpp"
#include "maxlat/maxwell.hpp"

using namespace maxlat;
using namespace maxlat::analysis;

namespace {

Series make_series(std::initializer_list<double> values) {
    Series s;
    std::int64_t t = 0;
    for (double v : values) s.push_back({t++, v});
    return s;
}

} // namespace

TEST_CASE("probe_series returns the recorded series and rejects unknown probes") {
    const EngineState init = maxwell::canonical_initial_state();
    const CouplingTable table =
        maxwell::build_maxwell_table(maxwell::CouplingFactor(maxwell::sqrt_alpha()));
    const std::vector<ProbeSpec> probes = {{"Ex", {0, 0, 0}}};

    const RunRecord rec0 = run(init, table, 0, probes, {});
    const Series s0 = probe_series(rec0, "Ex", {0, 0, 0});
    REQUIRE(s0.size() == 1);
    CHECK(s0[0].t == 0);
    CHECK(s0[0].value == 1.0);

    const RunRecord rec1 = run(init, table, 1, probes, {});
    const Series s1 = probe_series(rec1, "Ex", {0, 0, 0});
    REQUIRE(s1.size() == 2);
    CHECK(s1[1].value == 1.0);

    const RunRecord rec30 = run(init, table, 30, probes, {});
    const Series s30 = probe_series(rec30, "Ex", {0, 0, 0});
    CHECK(s30[28].value == doctest::Approx(0.98752930561647).epsilon(1e-13));

    CHECK_THROWS_AS(probe_series(rec30, "Ey", {0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(probe_series(rec30, "Ex", {1, 0, 0}), ValidationError);
}

TEST_CASE("detect_maxima counts a dominating start as the first maximum") {
    const MaximaReport rep = detect_maxima(make_series({1, 1, 0.9, 0.5, 0.7, 0.6}));
    REQUIRE(rep.maxima.size() == 2);
    CHECK(rep.includes_start);
    CHECK(rep.maxima[0].t == 0);
    CHECK(rep.maxima[0].value == 1.0);
    CHECK(rep.maxima[1].t == 4);
    CHECK(rep.maxima[1].value == 0.7);
}

TEST_CASE("detect_maxima on a monotone increasing series finds nothing") {
    const MaximaReport rep = detect_maxima(make_series({0, 1, 2, 3, 4}));
    CHECK(rep.maxima.empty());
    CHECK_FALSE(rep.includes_start);
}

TEST_CASE("detect_maxima needs three points") {
    CHECK_THROWS_AS(detect_maxima(make_series({1, 2})), ValidationError);
}

TEST_CASE("detect_maxima start rule uses the stretch up to the first interior minimum") {
    // start dips below a later crest only after the first interior minimum
    const MaximaReport rep = detect_maxima(make_series({1, 0.8, 0.4, 0.9, 1.5, 0.2}));
    REQUIRE(rep.maxima.size() == 2);
    CHECK(rep.maxima[0].t == 0); // dominates through the minimum at t=2
    CHECK(rep.maxima[1].t == 4);

    // an early rise above the start suppresses it
    const MaximaReport rep2 = detect_maxima(make_series({1, 1.1, 0.4, 0.9, 0.2, 0.1}));
    CHECK_FALSE(rep2.includes_start);
    REQUIRE(rep2.maxima.size() == 2);
    CHECK(rep2.maxima[0].t == 1);
    CHECK(rep2.maxima[1].t == 3);
}

TEST_CASE("canonical sqrt-alpha run has its second maximum at t = 28") {
    const EngineState init = maxwell::canonical_initial_state();
    const RunRecord rec =
        maxwell::run_direct(init, maxwell::CouplingFactor(maxwell::sqrt_alpha()), 40,
                            std::vector<ProbeSpec>{{"Ex", {0, 0, 0}}}, {});
    const MaximaReport rep = detect_maxima(probe_series(rec, "Ex", {0, 0, 0}));
    REQUIRE(rep.maxima.size() >= 2);
    CHECK(rep.includes_start);
    CHECK(rep.maxima[0].t == 0);
    CHECK(rep.maxima[1].t == 28);
    CHECK(std::abs(rep.maxima[1].value - 1.0) < 0.02);
}

TEST_CASE("maxima positions are scale invariant, heights scale along") {
    const Series base = make_series({1, 1, 0.9, 0.5, 0.7, 0.6, 0.2, 0.9, 0.3});
    const double s = 37.5;
    Series scaled = base;
    for (auto& pt : scaled) pt.value *= s;
    const MaximaReport a = detect_maxima(base);
    const MaximaReport b = detect_maxima(scaled);
    REQUIRE(a.maxima.size() == b.maxima.size());
    CHECK(a.includes_start == b.includes_start);
    for (std::size_t i = 0; i < a.maxima.size(); ++i) {
        CHECK(a.maxima[i].t == b.maxima[i].t);
        CHECK(b.maxima[i].value == doctest::Approx(s * a.maxima[i].value).epsilon(1e-14));
    }
}

TEST_CASE("growth_factor closed forms") {
    // maxima at (10, 1) and (20, 2): factor 2^(1/10)
    Series s;
    for (std::int64_t t = 0; t <= 30; ++t) {
        double v = 0.1;
        if (t == 10) v = 1.0;
        if (t == 20) v = 2.0;
        s.push_back({t, v});
    }
    const GrowthEstimate est = growth_factor(s, {5, 25});
    CHECK(est.per_step_factor == doctest::Approx(std::pow(2.0, 0.1)).epsilon(1e-14));

    // equal maxima give factor 1
    Series flat;
    for (std::int64_t t = 0; t <= 30; ++t) {
        double v = 0.1;
        if (t == 10 || t == 20) v = 1.0;
        flat.push_back({t, v});
    }
    CHECK(growth_factor(flat, {0, 30}).per_step_factor == 1.0);
}

TEST_CASE("growth_factor recovers a geometric maxima sequence") {
    const double ratio = 1.043;
    Series s;
    for (std::int64_t t = 0; t <= 200; ++t) {
        const bool crest = (t % 20 == 10);
        const double envelope = std::pow(ratio, static_cast<double>(t));
        s.push_back({t, crest ? envelope : 0.1 * envelope});
    }
    const GrowthEstimate est = growth_factor(s, {0, 200});
    CHECK(est.per_step_factor == doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("growth_factor validates its window and maxima") {
    const Series s = make_series({1, 1, 0.9, 0.5, 0.7, 0.6});
    CHECK_THROWS_AS(growth_factor(s, {0, 99}), ValidationError);   // outside series
    CHECK_THROWS_AS(growth_factor(s, {1, 3}), ValidationError);    // < 2 maxima
    // the interior maximum at t=2 has a negative height
    Series neg = make_series({0.1, -5, -0.5, -5, 0.1, 3, 0.1});
    CHECK_THROWS_AS(growth_factor(neg, {0, 6}), ValidationError);
}

TEST_CASE("subspace statistics") {
    Lattice lat = Lattice::sparse("Ex");

    SUBCASE("empty lattice sums to zero") {
        CHECK(subspace_sum(lat, {}) == Quantity{});
        CHECK(subspace_abs_sum(lat, {}) == 0.0);
        CHECK(subspace_square_sum(lat, {}) == 0.0);
    }

    SUBCASE("canonical init has unit square sum") {
        const EngineState init = maxwell::canonical_initial_state();
        CHECK(subspace_square_sum(init.at("Ex"), {}) == 1.0);
    }

    SUBCASE("after one step the Bz square sum is 2 p^2") {
        const double p = 1.0 / 16;
        const EngineState next =
            maxwell::step_direct(maxwell::canonical_initial_state(), maxwell::CouplingFactor(p));
        CHECK(subspace_square_sum(next.at("Bz"), {}) == 0.0078125);
    }

    SUBCASE("fixed coordinates select planes, lines and points") {
        lat.add_assign({0, 0, 0}, {1.0, 0.0});
        lat.add_assign({0, 1, 0}, {2.0, 0.0});
        lat.add_assign({1, 1, 0}, {-3.0, 0.0});
        SubspaceSpec plane;
        plane.x = 0;
        CHECK(subspace_sum(lat, plane) == Quantity{3.0, 0.0});
        CHECK(subspace_abs_sum(lat, plane) == 3.0);
        SubspaceSpec point;
        point.x = 1;
        point.y = 1;
        point.z = 0;
        CHECK(subspace_sum(lat, point) == Quantity{-3.0, 0.0});
    }

    SUBCASE("disjoint exhaustive subspaces sum to the full-space value") {
        const EngineState state = maxwell::step_direct(
            maxwell::step_direct(maxwell::canonical_initial_state(),
                                 maxwell::CouplingFactor(0.09)),
            maxwell::CouplingFactor(0.09));
        const Lattice& ex = state.at("Ex");
        const double full = subspace_square_sum(ex, {});
        double parts = 0.0;
        for (std::int32_t x = -3; x <= 3; ++x) {
            SubspaceSpec spec;
            spec.x = x;
            parts += subspace_square_sum(ex, spec);
        }
        CHECK(parts == doctest::Approx(full).epsilon(1e-12));
    }
}

TEST_CASE("significant digit agreement") {
    CHECK(significant_digit_agreement(1.234567, 1.234599) == 4);
    CHECK(significant_digit_agreement(2.75, 2.75) == 15);
    CHECK(significant_digit_agreement(1.0, -1.0) == 0);
    CHECK(significant_digit_agreement(0.0, 0.0) == 15);
    CHECK(significant_digit_agreement(1.0, 1.0 + 2e-13) == 12);
    CHECK(significant_digit_agreement(1e300, 1.0) == 0);
}
