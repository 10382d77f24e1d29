"""Verification layer: operator residuals, nodal lines, the cross at
tau = i and the probability flux through closed nodal loops.

Conventions
-----------
The current of a stationary state is J = 2 Im(conj(phi) grad phi) with
phi = sqrt(V) psi, so that d/dt int_U |psi|^2 = -(outward flux of J) and
|Im E| = |flux| / (2 mass).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (EmptyRegionError, OpenLoopError, PhaseResidualError,
                     SpacingTooCoarseError)
from .modular import reduced_chart
from .wavefield import GridField, _series_for

SINGULAR_POINTS = (("z0", 0j), ("z1", 1 + 0j))


# ------------------------------------------------------------ residual

@dataclass(frozen=True)
class ResidualReport:
    """Relative residual of H psi = E psi on a grid."""

    zero_index: int
    median_rel_residual: float
    grid_spacing: float
    interior_fraction: float


def operator_residual(zero, field, energy=None, mask_radius=5.0):
    """Median of |-sqrt(V) Lap(sqrt(V) psi) - E psi| / (|E psi| + 1e-300).

    The Laplacian is the 5-point stencil.  Samples on the grid border and
    within ``mask_radius`` spacings of z = 0 or z = 1 are skipped.

    Parameters
    ----------
    zero : ZetaZero
        Supplies E = rho (1 - rho) unless ``energy`` is given.
    field : GridField
        Samples of psi with equal spacing in x and y.

    Raises
    ------
    SpacingTooCoarseError
        If h^2 gamma^2 > 0.5.
    """
    h = field.hx
    if not math.isclose(h, field.hy, rel_tol=1e-9):
        raise SpacingTooCoarseError("operator_residual needs equal x and y spacing")
    if h * h * zero.gamma_n ** 2 > 0.5:
        raise SpacingTooCoarseError(
            f"h^2 gamma^2 = {h * h * zero.gamma_n ** 2:.3g} exceeds 0.5")
    e = zero.energy if energy is None else complex(energy)
    z = field.z()
    _, v = reduced_chart(z)
    root = np.sqrt(v)
    phi = root * field.values
    lap = (phi[1:-1, 2:] + phi[1:-1, :-2] + phi[2:, 1:-1] + phi[:-2, 1:-1]
           - 4.0 * phi[1:-1, 1:-1]) / (h * h)
    inner = z[1:-1, 1:-1]
    psi = field.values[1:-1, 1:-1]
    res = np.abs(-root[1:-1, 1:-1] * lap - e * psi) / (np.abs(e * psi) + 1e-300)
    keep = (np.abs(inner) > mask_radius * h) & (np.abs(inner - 1.0) > mask_radius * h)
    if not keep.any():
        raise SpacingTooCoarseError("no interior samples left after masking")
    return ResidualReport(field.zero_index, float(np.median(res[keep])), h,
                          float(keep.sum()) / field.values.size)


# ------------------------------------------------------- marching squares

@dataclass
class NodalLine:
    """Polyline on which the field vanishes.

    Attributes
    ----------
    points : ndarray of complex
    closed : bool
        True when the first and last points coincide.
    endpoints_on : tuple of str
        Labels of the first and last points: "z0" or "z1" for the singular
        points, "open" for anything else (window border or a free loop).
    """

    points: np.ndarray
    closed: bool = False
    endpoints_on: tuple = ("open", "open")

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.closed = bool(len(self.points) > 2 and self.points[0] == self.points[-1])
        self.endpoints_on = (_label(self.points[0]), _label(self.points[-1]))

    def __len__(self):
        return len(self.points)


def _label(p):
    for name, q in SINGULAR_POINTS:
        if p == q:
            return name
    return "open"


# segment pairs per cell case; corners 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1),
# edges 0=bottom 1=right 2=top 3=left; bit k set when corner k is >= 0
_CASES = {
    1: ((3, 0),), 2: ((0, 1),), 3: ((3, 1),), 4: ((1, 2),),
    6: ((0, 2),), 7: ((3, 2),), 8: ((2, 3),), 9: ((2, 0),),
    11: ((2, 1),), 12: ((1, 3),), 13: ((1, 0),), 14: ((0, 3),),
}
# saddles: key (case, centre >= 0)
_SADDLES = {
    (5, True): ((3, 2), (1, 0)), (5, False): ((3, 0), (1, 2)),
    (10, True): ((0, 3), (2, 1)), (10, False): ((0, 1), (2, 3)),
}


def marching_squares(values, xs, ys):
    """Zero-level segments of a real grid.

    Returns a list of (edge_a, edge_b) keys and a dict mapping each edge
    key to its interpolated crossing point.  Edge keys are
    ("h", j, i) for the edge from (i, j) to (i+1, j) and ("v", j, i)
    for the edge from (i, j) to (i, j+1).  Zero counts as non-negative.
    """
    f = np.asarray(values, dtype=float)
    pos = f >= 0.0
    case = (pos[:-1, :-1].astype(np.int8) | (pos[:-1, 1:] << 1)
            | (pos[1:, 1:] << 2) | (pos[1:, :-1] << 3))
    jj, ii = np.nonzero((case != 0) & (case != 15))
    points = {}

    def edge_point(key):
        if key in points:
            return
        kind, j, i = key
        if kind == "h":
            a, b = f[j, i], f[j, i + 1]
            t = a / (a - b)
            points[key] = complex(xs[i] + t * (xs[i + 1] - xs[i]), ys[j])
        else:
            a, b = f[j, i], f[j + 1, i]
            t = a / (a - b)
            points[key] = complex(xs[i], ys[j] + t * (ys[j + 1] - ys[j]))

    segments = []
    for j, i in zip(jj.tolist(), ii.tolist()):
        c = int(case[j, i])
        keys = (("h", j, i), ("v", j, i + 1), ("h", j + 1, i), ("v", j, i))
        if c in (5, 10):
            centre = 0.25 * (f[j, i] + f[j, i + 1] + f[j + 1, i] + f[j + 1, i + 1])
            pairs = _SADDLES[(c, centre >= 0.0)]
        else:
            pairs = _CASES[c]
        for ea, eb in pairs:
            ka, kb = keys[ea], keys[eb]
            edge_point(ka)
            edge_point(kb)
            segments.append((ka, kb))
    return segments, points


def chain_segments(segments):
    """Join segments sharing an edge into ordered chains of edge keys."""
    adj = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = set()
    chains = []

    def walk(start):
        # every edge key touches at most two segments, so the walk is unique
        chain = [start]
        cur = start
        while True:
            step = next((n for n in adj[cur] if (cur, n) not in seen), None)
            if step is None:
                return chain
            seen.add((cur, step))
            seen.add((step, cur))
            chain.append(step)
            cur = step
            if cur == start:
                return chain

    for key in sorted(k for k, v in adj.items() if len(v) == 1):
        if all((key, n) in seen for n in adj[key]):
            continue
        chains.append(walk(key))
    for key in sorted(adj):
        if any((key, n) not in seen for n in adj[key]):
            chains.append(walk(key))
    return chains


def _split_at_singular(pts, h):
    """Cut a polyline where it passes within 2h of z = 0 or z = 1.

    The closest sample of each approach is replaced by the singular point
    itself and the line is broken there.
    """
    closed = len(pts) > 2 and pts[0] == pts[-1]
    cuts = []
    for _, q in SINGULAR_POINTS:
        d = np.abs(pts - q)
        near = d <= 2.0 * h
        if not near.any():
            continue
        # one cut per run of consecutive near samples
        idx = np.nonzero(near)[0]
        runs = np.split(idx, np.nonzero(np.diff(idx) > 1)[0] + 1)
        if closed and len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == len(pts) - 1:
            runs = [np.concatenate([runs[-1], runs[0]])] + runs[1:-1]
        for run in runs:
            k = int(run[np.argmin(d[run])])
            if closed and k == len(pts) - 1:
                k = 0
            cuts.append((k, q))
    if not cuts:
        return [pts]
    cuts.sort(key=lambda c: c[0])
    if closed:
        body = pts[:-1]
        k0 = cuts[0][0]
        body = np.roll(body, -k0)
        cuts = [((k - k0) % len(body), q) for k, q in cuts]
        pts = np.concatenate([body, body[:1]])
        cuts.append((len(pts) - 1, cuts[0][1]))
    pieces = []
    start = 0
    start_pt = None
    for k, q in cuts:
        seg = list(pts[start:k])
        if start_pt is not None:
            seg = [start_pt] + seg[1:] if seg else [start_pt]
        seg = seg + [q]
        if len(seg) >= 2:
            pieces.append(np.array(seg))
        start = k
        start_pt = q
    tail = list(pts[start:])
    if start_pt is not None and len(tail) > 1:
        pieces.append(np.array([start_pt] + tail[1:]))
    return [_densify(p, h) for p in pieces]


def _densify(pts, h):
    out = [pts[0]]
    for p in pts[1:]:
        gap = abs(p - out[-1])
        if gap > 2.0 * h:
            n = int(math.ceil(gap / (2.0 * h)))
            a = out[-1]
            out.extend(a + (p - a) * (k / n) for k in range(1, n))
        out.append(p)
    return np.array(out)


def extract_nodal_lines(field, tolerance=None, imag_limit=0.01):
    """Zero-level lines of the real part of a phase-normalised field.

    Raises
    ------
    PhaseResidualError
        If max |Im| exceeds ``imag_limit`` times max |Re|, or the imaginary
        part along the extracted lines exceeds 10 times the tolerance.
    """
    vals = field.values
    scale = float(np.max(np.abs(vals)))
    if tolerance is None:
        tolerance = 1e-6 * scale
    re_max = float(np.max(np.abs(vals.real)))
    im_max = float(np.max(np.abs(vals.imag)))
    if im_max > imag_limit * re_max:
        raise PhaseResidualError(
            f"imaginary fraction {im_max / max(re_max, 1e-300):.3g} exceeds {imag_limit:g}")
    xs, ys = field.xs, field.ys
    segments, points = marching_squares(vals.real, xs, ys)
    h = max(field.hx, field.hy)
    lines = []
    for chain in chain_segments(segments):
        pts = np.array([points[k] for k in chain])
        for piece in _split_at_singular(pts, h):
            lines.append(NodalLine(piece))
    for line in lines:
        im = np.abs(bilinear(field, line.points, part="imag"))
        if im.size and float(np.max(im)) > 10.0 * max(tolerance, 1e-12 * scale):
            raise PhaseResidualError("imaginary part along a nodal line exceeds 10x tolerance")
    return lines


def bilinear(field, pts, part="real", values=None):
    """Bilinear interpolation of a grid at complex points."""
    v = field.values if values is None else values
    if part == "real":
        v = v.real
    elif part == "imag":
        v = v.imag
    pts = np.asarray(pts, dtype=complex)
    fx = np.clip((pts.real - field.xmin) / field.hx, 0.0, field.nx - 1.000000001)
    fy = np.clip((pts.imag - field.ymin) / field.hy, 0.0, field.ny - 1.000000001)
    i = np.floor(fx).astype(np.intp)
    j = np.floor(fy).astype(np.intp)
    tx = fx - i
    ty = fy - j
    return ((1 - tx) * (1 - ty) * v[j, i] + tx * (1 - ty) * v[j, i + 1]
            + (1 - tx) * ty * v[j + 1, i] + tx * ty * v[j + 1, i + 1])


# ----------------------------------------------------------- scenarios

@dataclass
class NodalScenario:
    """Topology class of the nodal set near the two wells.

    ``label`` is "scenario 1" (two lines joining z = 0 to z = 1),
    "scenario 2" (separate loops based at z = 0 and at z = 1) or "other".
    ``loops`` holds the closed polylines that realise the scenario.
    """

    label: str
    loops: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def classify_nodal_scenario(lines):
    """Classify nodal lines by how they meet the singular points."""
    bridges = [ln for ln in lines if set(ln.endpoints_on) == {"z0", "z1"}]
    loops0 = [ln for ln in lines if ln.endpoints_on == ("z0", "z0") and ln.closed]
    loops1 = [ln for ln in lines if ln.endpoints_on == ("z1", "z1") and ln.closed]
    diag = {
        "lines": len(lines),
        "bridges_z0_z1": len(bridges),
        "loops_at_z0": len(loops0),
        "loops_at_z1": len(loops1),
        "open_lines": sum(1 for ln in lines if "open" in ln.endpoints_on and not ln.closed),
    }
    if len(bridges) >= 2:
        a, b = bridges[0], bridges[1]
        pa = a.points if a.endpoints_on[0] == "z0" else a.points[::-1]
        pb = b.points if b.endpoints_on[0] == "z0" else b.points[::-1]
        loop = NodalLine(np.concatenate([pa, pb[::-1][1:]]))
        return NodalScenario("scenario 1", [loop], diag)
    if loops0 and loops1:
        return NodalScenario("scenario 2", [loops0[0], loops1[0]], diag)
    return NodalScenario("other", [], diag)


# --------------------------------------------------------------- cross

@dataclass(frozen=True)
class CrossReport:
    """Nodal directions of phi around tau = i.

    ``angles`` are in degrees in [0, 360); ``verdict`` is True when there
    are exactly four crossings, each within ``window`` degrees of an odd
    multiple of 45.
    """

    angles: tuple
    verdict: bool
    radius: float


def detect_cross_at_i(zero, radius, phi=None, samples=720, window=10.0):
    """Sign changes of the phase-normalised phi on the circle |tau - i| = radius."""
    theta = 2.0 * math.pi * np.arange(samples) / samples
    eta = radius * np.exp(1j * theta)
    if phi is None:
        phi = _series_for(zero).phi_normalized
    f = np.asarray(phi(1j + eta)).real
    g = np.roll(f, -1)
    idx = np.nonzero(np.signbit(f) != np.signbit(g))[0]
    step = 2.0 * math.pi / samples
    angles = []
    for k in idx:
        t = f[k] / (f[k] - g[k]) if f[k] != g[k] else 0.0
        angles.append(math.degrees((theta[k] + t * step) % (2.0 * math.pi)))
    angles.sort()
    ok = len(angles) == 4 and all(
        abs(math.remainder(a - 45.0, 90.0)) <= window for a in angles)
    return CrossReport(tuple(angles), bool(ok), float(radius))


# ---------------------------------------------------------------- flux

@dataclass(frozen=True)
class FluxReport:
    """Flux of the probability current through a closed loop."""

    loop: NodalLine
    flux: float
    mass: float
    im_e_bound: float


def polygon_mask(field, loop_points):
    """Grid samples inside a closed polygon (even-odd scanline rule)."""
    p = np.asarray(loop_points, dtype=complex)
    x0, y0 = p[:-1].real, p[:-1].imag
    x1, y1 = p[1:].real, p[1:].imag
    xs, ys = field.xs, field.ys
    mask = np.zeros((field.ny, field.nx), dtype=bool)
    for j, y in enumerate(ys):
        hit = ((y0 <= y) & (y < y1)) | ((y1 <= y) & (y < y0))
        if not hit.any():
            continue
        xc = x0[hit] + (y - y0[hit]) * (x1[hit] - x0[hit]) / (y1[hit] - y0[hit])
        xc.sort()
        for a, b in zip(xc[0::2], xc[1::2]):
            mask[j] |= (xs >= a) & (xs < b)
    return mask


def current_density(field):
    """J = 2 Im(conj(phi) grad phi), phi = sqrt(V) psi, by central differences."""
    _, v = reduced_chart(field.z())
    phi = np.sqrt(v) * field.values
    gy, gx = np.gradient(phi, field.hy, field.hx)
    return 2.0 * np.imag(np.conj(phi) * gx), 2.0 * np.imag(np.conj(phi) * gy)


def flux_integral(loop, field):
    """Outward flux of J through ``loop`` and the mass of |psi|^2 inside.

    Raises
    ------
    OpenLoopError
        If the loop is not closed.
    EmptyRegionError
        If no grid mass lies inside the loop.
    """
    if not loop.closed:
        raise OpenLoopError("flux needs a closed loop")
    pts = loop.points
    jx, jy = current_density(field)
    mid = 0.5 * (pts[1:] + pts[:-1])
    d = pts[1:] - pts[:-1]
    jmx = bilinear(field, mid, values=jx.astype(complex))
    jmy = bilinear(field, mid, values=jy.astype(complex))
    area2 = float(np.sum(pts[:-1].real * pts[1:].imag - pts[1:].real * pts[:-1].imag))
    orient = 1.0 if area2 > 0 else -1.0
    # outward normal of a counter-clockwise edge (dx, dy) is (dy, -dx)
    flux = orient * float(np.sum(jmx * d.imag - jmy * d.real))
    inside = polygon_mask(field, pts)
    mass = float(np.sum(np.abs(field.values[inside]) ** 2)) * field.hx * field.hy
    if mass <= 0.0:
        raise EmptyRegionError("no mass inside the loop; rasterisation found no samples")
    return FluxReport(loop, flux, mass, abs(flux) / (2.0 * mass))
