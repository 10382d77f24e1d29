import math

import numpy as np
import pytest

from rzspec.eisenstein import FourierBesselSeries
from rzspec.errors import (EmptyRegionError, OpenLoopError, PhaseResidualError,
                           SpacingTooCoarseError)
from rzspec.modular import reduced_chart
from rzspec.nodal import (NodalLine, bilinear, classify_nodal_scenario, detect_cross_at_i,
                          extract_nodal_lines, flux_integral, marching_squares, operator_residual,
                          polygon_mask)
from rzspec.wavefield import GridField, evaluate_grid

RESIDUAL_WINDOW = (0.2, 0.8, 0.5, 1.1)


def _synthetic(fn, window, nx, ny):
    xmin, xmax, ymin, ymax = window
    probe = GridField(xmin, xmax, ymin, ymax, nx, ny, np.zeros((ny, nx)))
    return GridField(xmin, xmax, ymin, ymax, nx, ny, fn(probe.z()))


def _residual(zero, h):
    n = int(round(0.6 / h)) + 1
    x0, _, y0, _ = RESIDUAL_WINDOW
    grid = evaluate_grid(zero, (x0, x0 + (n - 1) * h, y0, y0 + (n - 1) * h), n, n)
    return operator_residual(zero, grid).median_rel_residual


# ------------------------------------------------------------ residual

@pytest.mark.parametrize("n", [1, 2])
def test_operator_residual_second_order(zeros, n):
    zero = zeros[n - 1]
    r008, r004 = _residual(zero, 0.008), _residual(zero, 0.004)
    assert r004 <= 1e-2
    assert r008 / r004 >= 3


def test_operator_residual_control(zeros):
    # V^(-1/2) (Im tau)^2 solves the equation with E = -2, not with E_1
    grid = _synthetic(lambda z: (lambda t, v: t.imag ** 2 / np.sqrt(v))(*reduced_chart(z)),
                      RESIDUAL_WINDOW, 151, 151)
    assert operator_residual(zeros[0], grid).median_rel_residual > 0.5


def test_operator_residual_spacing_guard(zeros):
    grid = evaluate_grid(zeros[0], (0, 1, 0, 1), 11, 11)
    with pytest.raises(SpacingTooCoarseError):
        operator_residual(zeros[0], grid)


# ------------------------------------------------------ marching squares

def test_marching_squares_circle():
    xs = np.linspace(-1, 1, 81)
    ys = np.linspace(-1, 1, 81)
    z = xs[None, :] + 1j * ys[:, None]
    segs, pts = marching_squares(np.abs(z) ** 2 - 0.25, xs, ys)
    r = np.abs(np.array(list(pts.values())))
    assert len(segs) > 50 and all(a in pts and b in pts for a, b in segs)
    assert np.max(np.abs(r - 0.5)) < 2e-3


def test_saddle_gives_two_crossing_lines():
    grid = _synthetic(lambda z: z.real ** 2 - z.imag ** 2, (-0.5, 0.5, -0.4, 0.4), 40, 33)
    lines = extract_nodal_lines(grid)
    pts = np.concatenate([ln.points for ln in lines])
    assert np.max(np.abs(np.abs(pts.real) - np.abs(pts.imag))) < 0.02
    for ln in lines:
        for p, lab in zip((ln.points[0], ln.points[-1]), ln.endpoints_on):
            on_edge = (abs(p.real) > 0.5 - 1e-12) or (abs(p.imag) > 0.4 - 1e-12)
            assert on_edge or lab == "z0"
    # both diagonals are present
    assert np.any((pts.real > 0.1) & (pts.imag > 0.1)) and np.any((pts.real > 0.1) & (pts.imag < -0.1))


def test_phase_residual_guard():
    grid = _synthetic(lambda z: z.real + 1j * z.imag, (-1, 1, -1, 1), 10, 10)
    with pytest.raises(PhaseResidualError):
        extract_nodal_lines(grid)


# ------------------------------------------------------- production lines

def _check_lines(grid, lines):
    scale = np.max(np.abs(grid.values))
    xmin, xmax, ymin, ymax = grid.window
    for ln in lines:
        vals = np.abs(bilinear(grid, ln.points))
        assert np.max(vals) <= 1e-6 * scale
        if ln.closed:
            continue
        for p, lab in zip((ln.points[0], ln.points[-1]), ln.endpoints_on):
            on_edge = min(p.real - xmin, xmax - p.real, p.imag - ymin, ymax - p.imag) < 1e-9
            assert on_edge or lab in ("z0", "z1")


def test_nodal_lines_n1(nodal_grids):
    grid = nodal_grids[1]
    lines = extract_nodal_lines(grid)
    _check_lines(grid, lines)
    scen = classify_nodal_scenario(lines)
    assert scen.label == "scenario 1"
    assert len(scen.loops) == 1 and scen.loops[0].closed
    loop = scen.loops[0].points
    # the egg joins the two wells
    assert abs(loop.real.min()) < 1e-12 and abs(loop.real.max() - 1) < 1e-12


def test_nodal_lines_n2(nodal_grids):
    grid = nodal_grids[2]
    lines = extract_nodal_lines(grid)
    _check_lines(grid, lines)
    scen = classify_nodal_scenario(lines)
    assert scen.label == "scenario 2"
    assert [ln.endpoints_on for ln in scen.loops] == [("z0", "z0"), ("z1", "z1")]
    assert all(ln.closed for ln in scen.loops)


def test_scenario_two_synthetic_loops():
    t = np.linspace(0, 2 * math.pi, 50)
    loop0 = NodalLine(np.concatenate([[0j], -0.3 + 0.3 * np.exp(1j * t[1:-1]), [0j]]))
    loop1 = NodalLine(np.concatenate([[1 + 0j], 1.3 - 0.3 * np.exp(1j * t[1:-1]), [1 + 0j]]))
    scen = classify_nodal_scenario([loop0, loop1])
    assert scen.label == "scenario 2"
    assert classify_nodal_scenario([loop0]).label == "other"


def test_scenario_two_from_field():
    grid = _synthetic(lambda z: (np.abs(z + 0.3) ** 2 - 0.09) * (np.abs(z - 1.3) ** 2 - 0.09),
                      (-1, 2, -1, 1), 301, 201)
    scen = classify_nodal_scenario(extract_nodal_lines(grid))
    assert scen.label == "scenario 2"


def test_nodal_line_labels():
    ln = NodalLine([0j, 0.5 + 0.5j, 1 + 0j])
    assert ln.endpoints_on == ("z0", "z1") and not ln.closed
    assert NodalLine([0.2j, 0.5, 0.3, 0.2j]).closed


# --------------------------------------------------------------- cross

@pytest.mark.parametrize("radius", [5e-3, 1e-2, 2e-2])
def test_cross_at_i(zeros, radius):
    for zero in zeros:
        rep = detect_cross_at_i(zero, radius)
        assert rep.verdict, (zero.index, rep.angles)


def test_cross_synthetic_exact():
    rep = detect_cross_at_i(None, 1e-2, phi=lambda t: (t - 1j) ** 2 + np.conj(t - 1j) ** 2)
    assert rep.verdict
    assert np.allclose(rep.angles, [45, 135, 225, 315], atol=1e-9)


def test_cross_absent_for_linear_field():
    rep = detect_cross_at_i(None, 1e-2, phi=lambda t: (t - 1j).real)
    assert not rep.verdict and len(rep.angles) == 2


# ---------------------------------------------------------------- flux

def test_flux_through_nodal_loops(nodal_grids):
    for n, grid in nodal_grids.items():
        scen = classify_nodal_scenario(extract_nodal_lines(grid))
        assert scen.loops
        for loop in scen.loops:
            rep = flux_integral(loop, grid)
            assert rep.mass > 0
            assert rep.im_e_bound <= 1e-3


def _circle(center, radius, n=400):
    t = np.linspace(0, 2 * math.pi, n)
    pts = center + radius * np.exp(1j * t)
    pts[-1] = pts[0]
    return NodalLine(pts)


def test_flux_real_field_carries_no_current():
    grid = _synthetic(lambda z: np.abs(z - 0.5j) ** 2 - 0.16, (-1, 1, -0.5, 1.5), 201, 201)
    rep = flux_integral(_circle(0.5j, 0.4), grid)
    assert abs(rep.flux) <= 1e-12 * rep.mass


def test_flux_recovers_complex_energy():
    # off the critical line E = s(1 - s) has Im E = -2.8; the flux bound must see it
    s = complex(0.6, 14.0)
    series = FourierBesselSeries(s)

    def psi(z):
        tau, v = reduced_chart(z)
        return series.phi_normalized_reduced(tau) / np.sqrt(v)

    grid = _synthetic(psi, (0.1, 0.9, 0.1, 0.9), 321, 321)
    rep = flux_integral(_circle(0.5 + 0.5j, 0.3), grid)
    im_e = abs((s * (1 - s)).imag)
    assert abs(rep.im_e_bound - im_e) < 0.02 * im_e


def test_flux_errors():
    grid = _synthetic(lambda z: z.real, (-1, 1, -1, 1), 21, 21)
    with pytest.raises(OpenLoopError):
        flux_integral(NodalLine([0.1, 0.2 + 0.1j, 0.3]), grid)
    with pytest.raises(EmptyRegionError):
        flux_integral(_circle(0.05 + 0.05j, 0.01), grid)


def test_polygon_mask_square():
    grid = _synthetic(lambda z: z.real, (0, 1, 0, 1), 11, 11)
    sq = np.array([0.25 + 0.25j, 0.75 + 0.25j, 0.75 + 0.75j, 0.25 + 0.75j, 0.25 + 0.25j])
    mask = polygon_mask(grid, sq)
    # samples at 0.3 .. 0.7 in both directions
    assert mask.sum() == 25
