// Command-line front end: simulation runs, probe extraction, wave-maxima
// analysis, figure presets and pruning comparisons.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "maxlat/analysis.hpp"
#include "maxlat/engine.hpp"
#include "maxlat/error.hpp"
#include "maxlat/io.hpp"
#include "maxlat/maxwell.hpp"
#include "maxlat/plot.hpp"

namespace fs = std::filesystem;
using namespace maxlat;

namespace {

ProbeSpec parse_probe(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0)
        throw ValidationError("probe must look like LAT:x,y,z (got '" + text + "')");
    ProbeSpec p;
    p.lattice = text.substr(0, colon);
    const std::string coords = text.substr(colon + 1);
    int parsed = 0;
    std::array<std::int32_t, 3> c{};
    std::size_t pos = 0;
    while (parsed < 3 && pos <= coords.size()) {
        const auto comma = coords.find(',', pos);
        const std::string tok =
            coords.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            c[static_cast<std::size_t>(parsed)] = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("probe coordinate '" + tok + "' is not an integer");
        }
        ++parsed;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (parsed != 3) throw ValidationError("probe needs three coordinates: LAT:x,y,z");
    p.site = {c[0], c[1], c[2]};
    return p;
}

std::string probe_name(const ProbeSpec& p) {
    return p.lattice + ":" + std::to_string(p.site.x) + "," + std::to_string(p.site.y) + "," +
           std::to_string(p.site.z);
}

struct RunOptions {
    std::optional<double> p;
    std::vector<double> scale; // c, dt, ds
    std::int64_t steps = 0;
    std::string backend = "direct";
    std::string storage = "sparse";
    std::int64_t prune_budget = 0; // 0 = disabled
    std::vector<std::string> probe_texts;
    std::string out_dir = ".";
    std::string table_file;
    std::vector<std::string> init_files;
    bool save_final = false;
    std::int64_t dense_radius = 0; // 0: steps + 2

    maxwell::CouplingFactor coupling() const {
        if (p && !scale.empty())
            throw ValidationError("give either --p or --scale, not both");
        if (p) return maxwell::CouplingFactor(*p);
        if (scale.size() == 3)
            return maxwell::coupling_factor({scale[0], scale[1], scale[2]});
        throw ValidationError("a coupling factor is required: --p VALUE or --scale c,dt,ds");
    }

    PrunePolicy policy() const {
        return prune_budget > 0 ? PrunePolicy{true, prune_budget} : PrunePolicy{};
    }
};

RunRecord execute_maxwell(const maxwell::CouplingFactor& p, std::int64_t steps,
                          const std::vector<ProbeSpec>& probes, const PrunePolicy& policy,
                          const std::string& backend, const std::string& storage,
                          std::int64_t dense_radius) {
    EngineState init;
    if (storage == "dense") {
        const auto radius = static_cast<std::int32_t>(
            dense_radius > 0 ? dense_radius : steps + 2);
        init = maxwell::canonical_initial_state_dense(Box::centered(radius));
    } else if (storage == "sparse") {
        init = maxwell::canonical_initial_state();
    } else {
        throw ValidationError("storage must be 'sparse' or 'dense'");
    }
    if (p.beyond_stable_bound())
        std::cerr << "warning: p = " << io::format_double(p.value())
                  << " is above 1/8; maxima grow from the first wave on\n";

    if (backend == "direct") return maxwell::run_direct(std::move(init), p, steps, probes, policy);
    if (backend == "table")
        return run(std::move(init), maxwell::build_maxwell_table(p), steps, probes, policy);
    throw ValidationError("backend must be 'table' or 'direct'");
}

void write_run_outputs(const RunRecord& rec, const RunOptions& opt) {
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    if (!rec.probes.empty()) {
        std::vector<io::NamedSeries> series;
        for (const auto& p : rec.probes) {
            io::NamedSeries ns;
            ns.name = probe_name(p.probe);
            for (std::size_t t = 0; t < p.values.size(); ++t)
                ns.series.push_back({static_cast<std::int64_t>(t), p.values[t].real()});
            series.push_back(std::move(ns));
        }
        io::export_series_csv(series, dir / "probes.csv");
        std::cout << "wrote " << (dir / "probes.csv").string() << '\n';
    }
    io::save_prune_reports(rec.prune_reports, dir / "prune_reports.csv");
    std::cout << "wrote " << (dir / "prune_reports.csv").string() << " ("
              << rec.prune_reports.size() << " reports)\n";
    if (opt.save_final) {
        for (const auto& [name, lat] : rec.final_state) {
            const fs::path f = dir / (name + ".lat");
            io::save_lattice(lat, f);
            std::cout << "wrote " << f.string() << '\n';
        }
    }
}

int cmd_run(const RunOptions& opt) {
    std::vector<ProbeSpec> probes;
    for (const auto& t : opt.probe_texts) probes.push_back(parse_probe(t));

    RunRecord rec;
    if (!opt.table_file.empty()) {
        if (opt.backend == "direct")
            throw ValidationError("custom tables run on the table backend (--backend table)");
        const CouplingTable table = io::load_coupling_table(opt.table_file);
        EngineState state;
        for (const auto& f : opt.init_files) state.insert(io::load_lattice(f));
        const std::int64_t iteration = state.iteration();
        for (const auto& e : table.entries)
            for (const std::string* name : {&e.source, &e.destination})
                if (!state.contains(*name))
                    state.insert(Lattice::sparse(*name, iteration));
        rec = run(std::move(state), table, opt.steps, probes, opt.policy());
    } else {
        if (!opt.init_files.empty())
            throw ValidationError("--init requires a custom table (--table)");
        if (probes.empty()) probes.push_back({"Ex", {0, 0, 0}});
        rec = execute_maxwell(opt.coupling(), opt.steps, probes, opt.policy(), opt.backend,
                              opt.storage, opt.dense_radius);
    }
    write_run_outputs(rec, opt);
    return 0;
}

int cmd_probe(const std::string& record, const std::string& probe, const std::string& out) {
    const auto series = io::load_series_csv(record);
    for (const auto& s : series) {
        if (s.name == probe) {
            io::export_series_csv({s}, out);
            std::cout << "wrote " << out << '\n';
            return 0;
        }
    }
    throw ValidationError("no column '" + probe + "' in " + record);
}

int cmd_maxima(const std::string& record, const std::string& probe,
               const std::optional<std::pair<std::int64_t, std::int64_t>>& window) {
    const auto series = io::load_series_csv(record);
    const analysis::Series* chosen = nullptr;
    std::string chosen_name;
    for (const auto& s : series)
        if (probe.empty() || s.name == probe) {
            chosen = &s.series;
            chosen_name = s.name;
            break;
        }
    if (!chosen) throw ValidationError("no column '" + probe + "' in " + record);

    const analysis::MaximaReport rep = analysis::detect_maxima(*chosen);
    std::cout << "# maxima of " << chosen_name
              << (rep.includes_start ? " (start counted)" : "") << "\n";
    for (const auto& m : rep.maxima)
        std::cout << m.t << ' ' << io::format_double(m.value) << '\n';
    if (window) {
        const auto est = analysis::growth_factor(*chosen, {window->first, window->second});
        std::cout << "growth-factor " << io::format_double(est.per_step_factor) << " window "
                  << window->first << ' ' << window->second << '\n';
    }
    return 0;
}

int cmd_compare_prune(const RunOptions& opt) {
    if (opt.prune_budget <= 0)
        throw ValidationError("compare-prune needs --prune-budget >= 1");
    const std::vector<ProbeSpec> probes = {{"Ex", {0, 0, 0}}};
    const maxwell::CouplingFactor p = opt.coupling();
    const RunRecord plain =
        execute_maxwell(p, opt.steps, probes, {}, opt.backend, opt.storage, opt.dense_radius);
    const RunRecord pruned = execute_maxwell(p, opt.steps, probes, {true, opt.prune_budget},
                                             opt.backend, opt.storage, opt.dense_radius);
    const double a = plain.probes[0].values.back().real();
    const double b = pruned.probes[0].values.back().real();
    std::cout << "unpruned Ex:0,0,0 at t=" << opt.steps << ": " << io::format_double(a) << '\n';
    std::cout << "pruned   Ex:0,0,0 at t=" << opt.steps << " (budget " << opt.prune_budget
              << "): " << io::format_double(b) << '\n';
    std::cout << "pruning events: " << pruned.prune_reports.size() << '\n';
    std::cout << "agreement-digits " << analysis::significant_digit_agreement(a, b) << '\n';
    return 0;
}

// Bundled parameter-study figures. Location probes sit at the origin (Ex)
// and, for the field-pair figures, at (0,1,0) for Bz.
int cmd_figure(int number, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const double sqrt_alpha = maxwell::sqrt_alpha();

    struct WavePreset {
        double p;
        std::int64_t steps;
    };
    const auto probe_run = [](double p, std::int64_t steps,
                              const std::vector<ProbeSpec>& probes) {
        return maxwell::run_direct(maxwell::canonical_initial_state(),
                                   maxwell::CouplingFactor(p), steps, probes, {});
    };
    const auto single_series = [&](double p, std::int64_t steps) {
        const RunRecord rec = probe_run(p, steps, {{"Ex", {0, 0, 0}}});
        io::NamedSeries ns;
        ns.name = "Ex:0,0,0";
        ns.series = analysis::probe_series(rec, "Ex", {0, 0, 0});
        return ns;
    };
    const auto emit_line = [&](int n, const std::vector<io::NamedSeries>& series) {
        const fs::path csv = dir / ("fig" + std::to_string(n) + ".csv");
        const fs::path svg = dir / ("fig" + std::to_string(n) + ".svg");
        io::export_series_csv(series, csv);
        plot::render_line_plot(series, svg, "t", "E_x(t,0,0,0)");
        std::cout << "wrote " << csv.string() << " and " << svg.string() << '\n';
    };

    switch (number) {
    case 1:
        emit_line(1, {single_series(1.0 / 16, 60)});
        return 0;
    case 2:
        emit_line(2, {single_series(sqrt_alpha, 40)});
        return 0;
    case 3:
        emit_line(3, {single_series(1.0 / 8, 40)});
        return 0;
    case 4:
        emit_line(4, {single_series(1.0 / 16, 150)});
        return 0;
    case 5:
        emit_line(5, {single_series(sqrt_alpha, 150)});
        return 0;
    case 6:
        emit_line(6, {single_series(1.0 / 8, 150)});
        return 0;
    case 7:
    case 8: {
        const RunRecord rec =
            probe_run(sqrt_alpha, 160, {{"Ex", {0, 0, 0}}, {"Bz", {0, 1, 0}}});
        io::NamedSeries ex{"Ex:0,0,0", analysis::probe_series(rec, "Ex", {0, 0, 0})};
        io::NamedSeries bz{"Bz:0,1,0", analysis::probe_series(rec, "Bz", {0, 1, 0})};
        const fs::path csv = dir / ("fig" + std::to_string(number) + ".csv");
        const fs::path svg = dir / ("fig" + std::to_string(number) + ".svg");
        io::export_series_csv({ex, bz}, csv);
        if (number == 7)
            plot::render_line_plot({ex, bz}, svg, "t", "E_x(t,0,0,0) and B_z(t,0,1,0)");
        else
            plot::render_xy_plot(bz.series, ex.series, svg, "B_z(t,0,1,0)", "E_x(t,0,0,0)");
        std::cout << "wrote " << csv.string() << " and " << svg.string() << '\n';
        return 0;
    }
    case 9: {
        const std::int64_t steps = 150;
        const RunRecord rec = probe_run(sqrt_alpha, steps, {{"Ex", {0, 0, 0}}});
        const Lattice& ex = rec.final_state.at("Ex");
        io::NamedSeries slice;
        slice.name = "Ex:x,0,0";
        // odd x is identically zero by the checkerboard parity; emit the
        // even-x support class
        for (std::int32_t x = -static_cast<std::int32_t>(steps);
             x <= static_cast<std::int32_t>(steps); x += 2)
            slice.series.push_back({x, ex.get({x, 0, 0}).real()});
        const fs::path csv = dir / "fig9.csv";
        const fs::path svg = dir / "fig9.svg";
        io::export_series_csv({slice}, csv, "x");
        plot::render_line_plot({slice}, svg, "x", "E_x(150,x,0,0)");
        std::cout << "wrote " << csv.string() << " and " << svg.string() << '\n';
        return 0;
    }
    default:
        throw ValidationError("figure number must be 1..9");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-lattice iteration engine for the discretized vacuum Maxwell system"};
    app.require_subcommand(1);

    RunOptions opt;

    auto* run_cmd = app.add_subcommand("run", "Execute a simulation run");
    run_cmd->add_option("--p", opt.p, "Coupling factor p");
    run_cmd->add_option("--scale", opt.scale, "Physical scale c,dt,ds")->delimiter(',')->expected(3);
    run_cmd->add_option("--steps", opt.steps, "Iterations to run")->required();
    run_cmd->add_option("--backend", opt.backend, "Stepping backend: table | direct")
        ->check(CLI::IsMember({"table", "direct"}));
    run_cmd->add_option("--storage", opt.storage, "Lattice storage: sparse | dense")
        ->check(CLI::IsMember({"sparse", "dense"}));
    run_cmd->add_option("--dense-radius", opt.dense_radius,
                        "Dense bounding-box radius (default: steps + 2)");
    run_cmd->add_option("--prune-budget", opt.prune_budget,
                        "Max stored sites per lattice (0 disables pruning)");
    run_cmd->add_option("--probe", opt.probe_texts, "Probe LAT:x,y,z (repeatable)");
    run_cmd->add_option("--out", opt.out_dir, "Output directory");
    run_cmd->add_option("--table", opt.table_file, "Custom coupling table file");
    run_cmd->add_option("--init", opt.init_files, "Initial lattice file (repeatable)");
    run_cmd->add_flag("--save-final", opt.save_final, "Write final lattices as .lat files");

    std::string record_file, probe_column, probe_out;
    auto* probe_cmd = app.add_subcommand("probe", "Extract one series from a saved run");
    probe_cmd->add_option("--record", record_file, "probes.csv of a run")->required();
    probe_cmd->add_option("--probe", probe_column, "Series column, e.g. Ex:0,0,0")->required();
    probe_cmd->add_option("--out", probe_out, "Output CSV")->required();

    std::string maxima_record, maxima_probe;
    std::vector<std::int64_t> window_vals;
    auto* maxima_cmd = app.add_subcommand("maxima", "Wave maxima and growth factor");
    maxima_cmd->add_option("--record", maxima_record, "probes.csv of a run")->required();
    maxima_cmd->add_option("--probe", maxima_probe, "Series column (default: first)");
    maxima_cmd->add_option("--window", window_vals, "Growth window lo,hi")
        ->delimiter(',')
        ->expected(2);

    int figure_number = 0;
    std::string figure_out = ".";
    auto* figure_cmd = app.add_subcommand("figure", "Reproduce a bundled study figure (1-9)");
    figure_cmd->add_option("number", figure_number, "Figure number")->required();
    figure_cmd->add_option("--out", figure_out, "Output directory");

    auto* compare_cmd =
        app.add_subcommand("compare-prune", "Digit agreement of pruned vs unpruned runs");
    compare_cmd->add_option("--p", opt.p, "Coupling factor p");
    compare_cmd->add_option("--scale", opt.scale, "Physical scale c,dt,ds")
        ->delimiter(',')
        ->expected(3);
    compare_cmd->add_option("--steps", opt.steps, "Iterations to run")->required();
    compare_cmd->add_option("--prune-budget", opt.prune_budget, "Sites per lattice")->required();
    compare_cmd->add_option("--backend", opt.backend, "table | direct")
        ->check(CLI::IsMember({"table", "direct"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(opt);
        if (probe_cmd->parsed()) return cmd_probe(record_file, probe_column, probe_out);
        if (maxima_cmd->parsed()) {
            std::optional<std::pair<std::int64_t, std::int64_t>> window;
            if (window_vals.size() == 2) window = {window_vals[0], window_vals[1]};
            return cmd_maxima(maxima_record, maxima_probe, window);
        }
        if (figure_cmd->parsed()) return cmd_figure(figure_number, figure_out);
        if (compare_cmd->parsed()) return cmd_compare_prune(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
