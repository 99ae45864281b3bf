#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "maxlat/analysis.hpp"
#include "maxlat/engine.hpp"
#include "maxlat/error.hpp"
#include "maxlat/io.hpp"
#include "maxlat/maxwell.hpp"
#include "maxlat/plot.hpp"

namespace py = pybind11;
using namespace maxlat;

namespace {

Site site_from_tuple(const std::tuple<int, int, int>& t) {
    return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

std::tuple<int, int, int> site_to_tuple(Site s) { return {s.x, s.y, s.z}; }

std::vector<ProbeSpec> probes_from_python(
    const std::vector<std::pair<std::string, std::tuple<int, int, int>>>& probes) {
    std::vector<ProbeSpec> out;
    out.reserve(probes.size());
    for (const auto& [name, site] : probes) out.push_back({name, site_from_tuple(site)});
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled-lattice iteration engine for the discretized vacuum Maxwell system";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<Box>(m, "Box")
        .def(py::init([](std::tuple<int, int, int> lo, std::tuple<int, int, int> hi) {
                 return Box{site_from_tuple(lo), site_from_tuple(hi)};
             }),
             py::arg("lo"), py::arg("hi"))
        .def_static("centered", [](int r) { return Box::centered(r); }, py::arg("radius"))
        .def_property_readonly("lo", [](const Box& b) { return site_to_tuple(b.lo); })
        .def_property_readonly("hi", [](const Box& b) { return site_to_tuple(b.hi); })
        .def("volume", &Box::volume);

    py::class_<PruneReport>(m, "PruneReport")
        .def_readonly("lattice", &PruneReport::lattice)
        .def_readonly("iteration", &PruneReport::iteration)
        .def_readonly("sites_before", &PruneReport::sites_before)
        .def_readonly("sites_after", &PruneReport::sites_after)
        .def_readonly("dropped_abs_sum", &PruneReport::dropped_abs_sum)
        .def_readonly("smallest_kept", &PruneReport::smallest_kept)
        .def("__repr__", [](const PruneReport& r) {
            return "PruneReport(" + r.lattice + "@" + std::to_string(r.iteration) + ", " +
                   std::to_string(r.sites_before) + "->" + std::to_string(r.sites_after) + ")";
        });

    py::class_<Lattice>(m, "Lattice")
        .def_static("sparse", &Lattice::sparse, py::arg("name"), py::arg("iteration") = 0)
        .def_static("dense", &Lattice::dense, py::arg("name"), py::arg("box"),
                    py::arg("iteration") = 0)
        .def_property_readonly("name", &Lattice::name)
        .def_property_readonly("iteration", &Lattice::iteration)
        .def_property_readonly("is_dense", &Lattice::is_dense)
        .def("get",
             [](const Lattice& l, std::tuple<int, int, int> s) {
                 return l.get(site_from_tuple(s));
             },
             py::arg("site"))
        .def("add_assign",
             [](Lattice& l, std::tuple<int, int, int> s, Quantity q) {
                 l.add_assign(site_from_tuple(s), q);
             },
             py::arg("site"), py::arg("quantity"))
        .def("nonzero_count", &Lattice::nonzero_count)
        .def("l1_support_radius", &Lattice::l1_support_radius)
        .def("prune", &Lattice::prune, py::arg("budget"))
        .def("cells",
             [](const Lattice& l) {
                 std::vector<std::pair<std::tuple<int, int, int>, Quantity>> out;
                 out.reserve(static_cast<std::size_t>(l.nonzero_count()));
                 l.for_each([&](Site s, const Quantity& q) {
                     out.emplace_back(site_to_tuple(s), q);
                 });
                 return out;
             })
        .def("__len__", &Lattice::nonzero_count)
        .def("__repr__", [](const Lattice& l) {
            return "Lattice(" + l.name() + "@" + std::to_string(l.iteration()) + ", " +
                   std::to_string(l.nonzero_count()) + " sites)";
        });

    m.def(
        "add_shifted_scaled",
        [](Lattice& dst, const Lattice& src, std::tuple<int, int, int> offset, Quantity f) {
            add_shifted_scaled(dst, src, site_from_tuple(offset), f);
        },
        py::arg("dst"), py::arg("src"), py::arg("offset"), py::arg("factor"));

    py::class_<CouplingEntry>(m, "CouplingEntry")
        .def(py::init([](std::string src, std::string dst, std::tuple<int, int, int> offset,
                         Quantity factor) {
                 return CouplingEntry{std::move(src), std::move(dst), site_from_tuple(offset),
                                      factor};
             }),
             py::arg("source"), py::arg("destination"), py::arg("offset"), py::arg("factor"))
        .def_readonly("source", &CouplingEntry::source)
        .def_readonly("destination", &CouplingEntry::destination)
        .def_property_readonly("offset",
                               [](const CouplingEntry& e) { return site_to_tuple(e.offset); })
        .def_readonly("factor", &CouplingEntry::factor);

    py::class_<CouplingTable>(m, "CouplingTable")
        .def(py::init<>())
        .def(py::init([](std::vector<CouplingEntry> entries) {
                 return CouplingTable{std::move(entries)};
             }),
             py::arg("entries"))
        .def_readwrite("entries", &CouplingTable::entries)
        .def("__len__", [](const CouplingTable& t) { return t.entries.size(); });

    py::class_<PrunePolicy>(m, "PrunePolicy")
        .def(py::init<>())
        .def(py::init([](bool enabled, std::int64_t budget) {
                 return PrunePolicy{enabled, budget};
             }),
             py::arg("enabled"), py::arg("per_lattice_budget"))
        .def_readwrite("enabled", &PrunePolicy::enabled)
        .def_readwrite("per_lattice_budget", &PrunePolicy::per_lattice_budget);

    py::class_<EngineState>(m, "EngineState")
        .def(py::init<>())
        .def("insert", &EngineState::insert, py::arg("lattice"))
        .def("contains", &EngineState::contains, py::arg("name"))
        .def("at", py::overload_cast<const std::string&>(&EngineState::at),
             py::return_value_policy::reference_internal, py::arg("name"))
        .def("names",
             [](const EngineState& s) {
                 std::vector<std::string> out;
                 for (const auto& [name, lat] : s) out.push_back(name);
                 return out;
             })
        .def_property_readonly("iteration", &EngineState::iteration)
        .def("__len__", &EngineState::size);

    m.def("validate_table", &validate_table, py::arg("table"), py::arg("state"));
    m.def("step", &step, py::arg("state"), py::arg("table"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ProbeSeries>(m, "ProbeSeries")
        .def_property_readonly("lattice",
                               [](const ProbeSeries& p) { return p.probe.lattice; })
        .def_property_readonly("site",
                               [](const ProbeSeries& p) { return site_to_tuple(p.probe.site); })
        .def_readonly("values", &ProbeSeries::values);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("probes", &RunRecord::probes)
        .def_readonly("prune_reports", &RunRecord::prune_reports)
        .def_readonly("final_state", &RunRecord::final_state)
        .def_readonly("steps", &RunRecord::steps);

    m.def(
        "run",
        [](const EngineState& state, const CouplingTable& table, std::int64_t steps,
           const std::vector<std::pair<std::string, std::tuple<int, int, int>>>& probes,
           const PrunePolicy& policy) {
            const auto specs = probes_from_python(probes);
            const py::gil_scoped_release release;
            return run(state, table, steps, specs, policy);
        },
        py::arg("state"), py::arg("table"), py::arg("steps"),
        py::arg("probes") = std::vector<std::pair<std::string, std::tuple<int, int, int>>>{},
        py::arg("policy") = PrunePolicy{});

    auto maxwell_mod = m.def_submodule("maxwell", "The discretized vacuum Maxwell system");

    py::class_<maxwell::PhysicalScale>(maxwell_mod, "PhysicalScale")
        .def(py::init([](double c, double dt, double ds) {
                 return maxwell::PhysicalScale{c, dt, ds};
             }),
             py::arg("c"), py::arg("dt"), py::arg("ds"))
        .def_readwrite("c", &maxwell::PhysicalScale::c)
        .def_readwrite("dt", &maxwell::PhysicalScale::dt)
        .def_readwrite("ds", &maxwell::PhysicalScale::ds);

    py::class_<maxwell::CouplingFactor>(maxwell_mod, "CouplingFactor")
        .def(py::init<double>(), py::arg("p"))
        .def_property_readonly("value", &maxwell::CouplingFactor::value)
        .def_property_readonly("beyond_stable_bound",
                               &maxwell::CouplingFactor::beyond_stable_bound);

    maxwell_mod.def("hat_coordinates",
                    [](const maxwell::PhysicalScale& s, double t, double x, double y, double z) {
                        const auto h = maxwell::hat_coordinates(s, t, x, y, z);
                        return std::make_tuple(h.t, h.x, h.y, h.z);
                    },
                    py::arg("scale"), py::arg("t"), py::arg("x"), py::arg("y"), py::arg("z"));
    maxwell_mod.def("coupling_factor", &maxwell::coupling_factor, py::arg("scale"));
    maxwell_mod.def("sqrt_alpha", &maxwell::sqrt_alpha);
    maxwell_mod.def("canonical_initial_state", &maxwell::canonical_initial_state);
    maxwell_mod.def("canonical_initial_state_dense", &maxwell::canonical_initial_state_dense,
                    py::arg("box"));
    maxwell_mod.def("build_maxwell_table", &maxwell::build_maxwell_table, py::arg("p"));
    maxwell_mod.def("step_direct", &maxwell::step_direct, py::arg("state"), py::arg("p"),
                    py::call_guard<py::gil_scoped_release>());
    maxwell_mod.def(
        "run_direct",
        [](const EngineState& state, const maxwell::CouplingFactor& p, std::int64_t steps,
           const std::vector<std::pair<std::string, std::tuple<int, int, int>>>& probes,
           const PrunePolicy& policy) {
            const auto specs = probes_from_python(probes);
            const py::gil_scoped_release release;
            return maxwell::run_direct(state, p, steps, specs, policy);
        },
        py::arg("state"), py::arg("p"), py::arg("steps"),
        py::arg("probes") = std::vector<std::pair<std::string, std::tuple<int, int, int>>>{},
        py::arg("policy") = PrunePolicy{});

    auto analysis_mod = m.def_submodule("analysis", "Probe series and wave-maxima analysis");

    py::class_<analysis::MaximaReport>(analysis_mod, "MaximaReport")
        .def_property_readonly("maxima",
                               [](const analysis::MaximaReport& r) {
                                   std::vector<std::pair<std::int64_t, double>> out;
                                   for (const auto& m : r.maxima)
                                       out.emplace_back(m.t, m.value);
                                   return out;
                               })
        .def_readonly("includes_start", &analysis::MaximaReport::includes_start);

    py::class_<analysis::GrowthEstimate>(analysis_mod, "GrowthEstimate")
        .def_readonly("per_step_factor", &analysis::GrowthEstimate::per_step_factor)
        .def_readonly("method", &analysis::GrowthEstimate::method);

    const auto series_from_python =
        [](const std::vector<std::pair<std::int64_t, double>>& pts) {
            analysis::Series s;
            s.reserve(pts.size());
            for (const auto& [t, v] : pts) s.push_back({t, v});
            return s;
        };

    analysis_mod.def(
        "probe_series",
        [](const RunRecord& rec, const std::string& lattice, std::tuple<int, int, int> site) {
            std::vector<std::pair<std::int64_t, double>> out;
            for (const auto& pt : analysis::probe_series(rec, lattice, site_from_tuple(site)))
                out.emplace_back(pt.t, pt.value);
            return out;
        },
        py::arg("record"), py::arg("lattice"), py::arg("site"));
    analysis_mod.def(
        "detect_maxima",
        [series_from_python](const std::vector<std::pair<std::int64_t, double>>& pts) {
            return analysis::detect_maxima(series_from_python(pts));
        },
        py::arg("series"));
    analysis_mod.def(
        "growth_factor",
        [series_from_python](const std::vector<std::pair<std::int64_t, double>>& pts,
                             std::int64_t lo, std::int64_t hi) {
            return analysis::growth_factor(series_from_python(pts), {lo, hi});
        },
        py::arg("series"), py::arg("lo"), py::arg("hi"));

    const auto spec_from_python = [](std::optional<int> x, std::optional<int> y,
                                     std::optional<int> z) {
        analysis::SubspaceSpec spec;
        if (x) spec.x = *x;
        if (y) spec.y = *y;
        if (z) spec.z = *z;
        return spec;
    };
    analysis_mod.def(
        "subspace_sum",
        [spec_from_python](const Lattice& lat, std::optional<int> x, std::optional<int> y,
                           std::optional<int> z) {
            return analysis::subspace_sum(lat, spec_from_python(x, y, z));
        },
        py::arg("lattice"), py::arg("x") = std::nullopt, py::arg("y") = std::nullopt,
        py::arg("z") = std::nullopt);
    analysis_mod.def(
        "subspace_abs_sum",
        [spec_from_python](const Lattice& lat, std::optional<int> x, std::optional<int> y,
                           std::optional<int> z) {
            return analysis::subspace_abs_sum(lat, spec_from_python(x, y, z));
        },
        py::arg("lattice"), py::arg("x") = std::nullopt, py::arg("y") = std::nullopt,
        py::arg("z") = std::nullopt);
    analysis_mod.def(
        "subspace_square_sum",
        [spec_from_python](const Lattice& lat, std::optional<int> x, std::optional<int> y,
                           std::optional<int> z) {
            return analysis::subspace_square_sum(lat, spec_from_python(x, y, z));
        },
        py::arg("lattice"), py::arg("x") = std::nullopt, py::arg("y") = std::nullopt,
        py::arg("z") = std::nullopt);
    analysis_mod.def("significant_digit_agreement", &analysis::significant_digit_agreement,
                     py::arg("a"), py::arg("b"));

    auto io_mod = m.def_submodule("io", "Lattice files, CSV export and coupling tables");
    io_mod.def("save_lattice", &io::save_lattice, py::arg("lattice"), py::arg("path"));
    io_mod.def("load_lattice", &io::load_lattice, py::arg("path"));
    io_mod.def("load_coupling_table", &io::load_coupling_table, py::arg("path"));
    io_mod.def("save_coupling_table", &io::save_coupling_table, py::arg("table"),
               py::arg("path"));
    io_mod.def(
        "export_series_csv",
        [](const std::vector<std::pair<std::string,
                                       std::vector<std::pair<std::int64_t, double>>>>& named,
           const std::filesystem::path& path) {
            std::vector<io::NamedSeries> series;
            for (const auto& [name, pts] : named) {
                io::NamedSeries ns;
                ns.name = name;
                for (const auto& [t, v] : pts) ns.series.push_back({t, v});
                series.push_back(std::move(ns));
            }
            io::export_series_csv(series, path);
        },
        py::arg("series"), py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
