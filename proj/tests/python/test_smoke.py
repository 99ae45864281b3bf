"""Smoke tests for the python bindings: the main operations end to end."""

import math

import pytest

import maxlat
from maxlat import analysis, io, maxwell


def test_lattice_basics():
    lat = maxlat.Lattice.sparse("A")
    assert lat.get((0, 0, 0)) == 0
    lat.add_assign((0, 0, 0), 1.0)
    lat.add_assign((2, -1, 3), 0.5 + 0.25j)
    assert lat.get((0, 0, 0)) == 1.0
    assert lat.get((2, -1, 3)) == 0.5 + 0.25j
    assert lat.nonzero_count() == 2
    assert lat.l1_support_radius() == 6
    lat.add_assign((0, 0, 0), -1.0)
    assert lat.nonzero_count() == 1


def test_shifted_scaled_add():
    src = maxlat.Lattice.sparse("src")
    src.add_assign((0, 0, 0), 1.0)
    dst = maxlat.Lattice.sparse("dst")
    maxlat.add_shifted_scaled(dst, src, (0, 1, 0), 0.25)
    assert dst.cells() == [((0, 1, 0), 0.25)]


def test_maxwell_table_shape():
    table = maxwell.build_maxwell_table(maxwell.CouplingFactor(0.1))
    assert len(table) == 30
    identities = [e for e in table.entries if e.source == e.destination]
    assert len(identities) == 6
    stencil = [e for e in table.entries if e.source != e.destination]
    assert math.isclose(sum(e.factor.real for e in stencil), 0.0, abs_tol=0.0)


def test_golden_series_and_maxima():
    p = maxwell.CouplingFactor(maxwell.sqrt_alpha())
    state = maxwell.canonical_initial_state()
    rec = maxwell.run_direct(state, p, 30, probes=[("Ex", (0, 0, 0))])
    series = analysis.probe_series(rec, "Ex", (0, 0, 0))
    assert series[0] == (0, 1.0)
    assert series[1] == (1, 1.0)
    assert analysis.significant_digit_agreement(series[28][1], 0.98752930561647) >= 12

    rec40 = maxwell.run_direct(maxwell.canonical_initial_state(), p, 40,
                               probes=[("Ex", (0, 0, 0))])
    report = analysis.detect_maxima(analysis.probe_series(rec40, "Ex", (0, 0, 0)))
    assert report.includes_start
    assert report.maxima[0] == (0, 1.0)
    assert report.maxima[1][0] == 28


def test_engine_equals_direct():
    p = maxwell.CouplingFactor(maxwell.sqrt_alpha())
    table = maxwell.build_maxwell_table(p)
    via_table = maxlat.run(maxwell.canonical_initial_state(), table, 12,
                           probes=[("Ex", (0, 0, 0))])
    via_direct = maxwell.run_direct(maxwell.canonical_initial_state(), p, 12,
                                    probes=[("Ex", (0, 0, 0))])
    assert via_table.probes[0].values == via_direct.probes[0].values


def test_prune_policy_and_reports():
    p = maxwell.CouplingFactor(maxwell.sqrt_alpha())
    rec = maxwell.run_direct(maxwell.canonical_initial_state(), p, 20,
                             probes=[("Ex", (0, 0, 0))],
                             policy=maxlat.PrunePolicy(True, 300))
    assert rec.prune_reports
    rep = rec.prune_reports[0]
    assert rep.sites_after == 300
    assert rep.smallest_kept >= 0.0


def test_lattice_file_roundtrip(tmp_path):
    lat = maxlat.Lattice.sparse("Ex", 5)
    lat.add_assign((1, 2, 3), 0.1234567890123456789)
    lat.add_assign((-4, 0, 2), -7.5e-300 + 2.25j)
    path = tmp_path / "ex.lat"
    io.save_lattice(lat, path)
    back = io.load_lattice(path)
    assert back.name == "Ex"
    assert back.iteration == 5
    assert back.cells() == lat.cells()


def test_validation_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        maxwell.CouplingFactor(-1.0)
    state = maxlat.EngineState()
    state.insert(maxlat.Lattice.sparse("A"))
    bad = maxlat.CouplingTable([maxlat.CouplingEntry("missing", "A", (0, 0, 0), 1.0)])
    assert len(maxlat.validate_table(bad, state)) == 1
    with pytest.raises(ValueError):
        maxlat.step(state, bad)


def test_hat_coordinates_and_scale():
    scale = maxwell.PhysicalScale(c=2.0, dt=0.5, ds=4.0)
    assert maxwell.hat_coordinates(scale, 0.0, 2.0, 0.0, -2.0) == (0.0, 1.0, 0.0, -1.0)
    assert maxwell.coupling_factor(scale).value == 0.25
