"""Independent oracles and claim checks for the half-line solver.

Nothing here shares numerics with the production path: the whole-line
reference solver is a Strang split-step scheme, the interior residual uses
finite differences in time, and the weak-form check integrates the solution
against an explicit family of separable test functions.  Agreement between
these and the fixed-point output is the end-to-end evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson

from .boundary import AccuracyError
from .cutoffs import extend_initial_datum, right_bump
from .fixed_point import SolveResult, SolverConfig, SolverData, picard_solve
from .grids import GridFunction, SpaceTimeField, TimeSeries, UniformGrid
from .propagator import _field_spectrum_x, _values_from_spectrum_x
from .spectral import band_limited_sobolev_norm, forward_transform
from .cutoffs import halfline_norm_upper

__all__ = [
    "HarnessError",
    "whole_line_oracle",
    "oracle_self_errors",
    "manufactured_data",
    "pde_residual",
    "SeparableTestFunction",
    "weak_test_family",
    "weak_form_residual",
    "extension_independence",
    "ExtensionIndependenceReport",
    "smoothing_report",
    "spectral_tail_slope",
    "field_tail_slope",
]


class HarnessError(RuntimeError):
    """A verification fixture violated its own stated constraints."""


# ---------------------------------------------------------------------------
# Whole-line split-step reference solver.
# ---------------------------------------------------------------------------

def _split_step_trajectory(g_l: GridFunction, T: float, steps: int) -> np.ndarray:
    grid = g_l.grid
    xi = grid.frequencies
    dt = T / steps
    half = np.exp(-1j * (dt / 2.0) * xi**5)
    dealias = np.abs(xi) <= (2.0 / 3.0) * grid.nyquist
    deriv = 1j * xi * dealias

    def burgers_rate(v: np.ndarray) -> np.ndarray:
        v_d = np.fft.ifft(dealias * np.fft.fft(v))
        return np.fft.ifft(deriv * np.fft.fft(v_d * v_d)) * (-0.5)

    out = np.empty((grid.count, steps + 1), dtype=np.complex128)
    v = np.asarray(g_l.values, dtype=np.complex128).copy()
    out[:, 0] = v
    for n in range(steps):
        v = np.fft.ifft(half * np.fft.fft(v))
        k1 = burgers_rate(v)
        k2 = burgers_rate(v + (dt / 2.0) * k1)
        v = v + dt * k2
        v = np.fft.ifft(half * np.fft.fft(v))
        out[:, n + 1] = v
    return out


def whole_line_oracle(
    g_l: GridFunction,
    T: float,
    steps: int,
    check: bool = True,
    halving_tol: float = 1e-7,
) -> SpaceTimeField:
    """Reference trajectory of u_t + d^5_x u + u d_x u = 0 on the periodic box.

    Strang splitting: exact dispersive half-steps exp(-i dt/2 xi^5) around an
    explicit-midpoint step of the advection term with 2/3-rule dealiasing.
    With check=True the step count is halved-vs-doubled and the final-slice
    L^2 difference must stay below halving_tol, otherwise AccuracyError.
    """
    if T <= 0:
        raise ValueError("horizon T must be positive")
    if steps < 1:
        raise ValueError("need at least one step")
    vals = _split_step_trajectory(g_l, T, steps)
    if check:
        fine = _split_step_trajectory(g_l, T, 2 * steps)
        diff = float(
            np.sqrt(np.sum(np.abs(vals[:, -1] - fine[:, -1]) ** 2) * g_l.grid.step)
        )
        if diff > halving_tol:
            raise AccuracyError(
                f"split-step self-check failed: halving the step changes the final "
                f"slice by {diff:.3e} > {halving_tol:g}; increase steps"
            )
    tgrid = UniformGrid(origin=0.0, step=T / steps, count=steps + 1)
    return SpaceTimeField(g_l.grid, tgrid, vals)


def oracle_self_errors(g_l: GridFunction, T: float, steps: int) -> tuple:
    """(coarse-vs-mid, mid-vs-fine) final-slice L^2 errors for step counts
    (steps, 2*steps, 4*steps); their ratio estimates the convergence order."""
    runs = [_split_step_trajectory(g_l, T, k * steps)[:, -1] for k in (1, 2, 4)]
    dx = g_l.grid.step
    e1 = float(np.sqrt(np.sum(np.abs(runs[0] - runs[1]) ** 2) * dx))
    e2 = float(np.sqrt(np.sum(np.abs(runs[1] - runs[2]) ** 2) * dx))
    return e1, e2


def manufactured_data(
    g_l: GridFunction,
    cfg: SolverConfig,
    steps_per_node: int = 8,
    horizon: float = 1.0,
    taper_start: float = 0.7,
    oracle_check_tol: float = 1e-7,
):
    """Boundary data manufactured from the whole-line solution of g_l.

    Runs the split-step oracle on [0, horizon] at a rate that contains every
    solver time node, reads off the x = 0 traces of orders 0, 1, 2, tapers
    them smoothly to zero before the horizon end (the solver's data window
    eta(t/2T) must die before the taper begins), and returns
    (SolverData, oracle field, node stride).
    """
    dt = cfg.tgrid.step
    n_nodes = int(round(horizon / dt))
    if abs(n_nodes * dt - horizon) > 1e-12:
        raise ValueError("horizon must be a multiple of the solver time step")
    if 2.0 * cfg.T > taper_start:
        raise ValueError("data window 2T reaches into the taper; shorten T or move the taper")
    steps = n_nodes * steps_per_node
    oracle = whole_line_oracle(g_l, horizon, steps, check=True, halving_tol=oracle_check_tol)
    spec = _field_spectrum_x(oracle)
    xi = g_l.grid.frequencies[:, None]
    origin_row = g_l.grid.index_of(0.0)
    traces = []
    for j in range(3):
        deriv = _values_from_spectrum_x((1j * xi) ** j * spec, g_l.grid)
        traces.append(deriv[origin_row, :])
    taper = right_bump(oracle.tgrid.nodes, -2.0, -1.0, taper_start, horizon)
    series = []
    for tr in traces:
        vals = np.zeros(cfg.tgrid.count, dtype=np.complex128)
        sub = (tr * taper)[::steps_per_node]
        i0 = cfg.tgrid.index_of(0.0)
        vals[i0 : i0 + n_nodes + 1] = sub
        series.append(TimeSeries(cfg.tgrid, vals))
    data = SolverData(g_l=g_l, h1=series[0], h2=series[1], h3=series[2])
    return data, oracle, steps_per_node


# ---------------------------------------------------------------------------
# Interior residual of the differential equation.
# ---------------------------------------------------------------------------

_DT_STENCILS = {
    4: (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, 2),
    6: (np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0, 3),
}


def pde_residual(
    u: SpaceTimeField,
    forcing: SpaceTimeField | None = None,
    include_advection: bool = False,
    fifth_x: SpaceTimeField | None = None,
    stencil_order: int = 4,
    x_range: tuple | None = None,
    t_range: tuple | None = None,
) -> float:
    """L^2 norm of u_t + d^5_x u (+ u d_x u) - forcing over an interior window.

    The time derivative is a centered finite difference (order 4 or 6) on the
    field's own grid; the fifth x-derivative is spectral unless an analytic
    field is supplied via `fifth_x` (mandatory for fields that are not
    box-periodic, e.g. boundary potentials whose oscillatory part does not
    wrap smoothly).
    """
    if stencil_order not in _DT_STENCILS:
        raise ValueError("stencil_order must be 4 or 6")
    coeffs, margin = _DT_STENCILS[stencil_order]
    nt = u.tgrid.count
    if nt < 2 * margin + 1:
        raise ValueError("time grid too short for the requested stencil")
    dt = u.tgrid.step
    u_t = np.zeros_like(u.values)
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        shift = k - margin
        u_t[:, margin : nt - margin] += c * u.values[:, margin + shift : nt - margin + shift]
    u_t /= dt
    valid_t = np.zeros(nt, dtype=bool)
    valid_t[margin : nt - margin] = True

    if fifth_x is not None:
        if fifth_x.xgrid != u.xgrid or fifth_x.tgrid != u.tgrid:
            raise ValueError("analytic fifth derivative must share the field's grids")
        u5 = fifth_x.values
    else:
        xi = u.xgrid.frequencies[:, None]
        u5 = _values_from_spectrum_x((1j * xi) ** 5 * _field_spectrum_x(u), u.xgrid)

    res = u_t + u5
    if include_advection:
        xi = u.xgrid.frequencies[:, None]
        u_x = _values_from_spectrum_x((1j * xi) * _field_spectrum_x(u), u.xgrid)
        res = res + u.values * u_x
    if forcing is not None:
        res = res - forcing.values

    xnodes, tnodes = u.xgrid.nodes, u.tgrid.nodes
    x_mask = np.ones(u.xgrid.count, dtype=bool)
    if x_range is not None:
        x_mask &= (xnodes >= x_range[0]) & (xnodes <= x_range[1])
    t_mask = valid_t.copy()
    if t_range is not None:
        t_mask &= (tnodes >= t_range[0]) & (tnodes <= t_range[1])
    window = res[np.ix_(x_mask, t_mask)]
    return float(np.sqrt(np.sum(np.abs(window) ** 2) * u.xgrid.step * dt))


# ---------------------------------------------------------------------------
# Weak formulation against separable test functions.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparableTestFunction:
    """phi(x,t) = x^p exp(-((x-c)/w)^2) * (T-t)^q, normalized.

    p >= 2 makes phi and phi_x vanish at x = 0 exactly; the (T-t)^q factor
    vanishes at t = T.  x-derivatives up to order 5 come from the polynomial
    recursion P_{k+1} = P_k' - P_k * 2(x-c)/w^2.
    """

    T: float
    p: int
    c: float
    w: float
    q: int
    scale: float
    _xpolys: tuple

    @classmethod
    def build(cls, T: float, p: int, c: float, w: float, q: int) -> "SeparableTestFunction":
        if p < 2:
            raise HarnessError(f"need p >= 2 for the x = 0 constraints, got p={p}")
        if q < 1:
            raise HarnessError(f"need q >= 1 for the t = T constraint, got q={q}")
        poly = Polynomial([0.0] * p + [1.0])
        gauss_log_deriv = Polynomial([2.0 * c / w**2, -2.0 / w**2])
        polys = [poly]
        for _ in range(5):
            polys.append(polys[-1].deriv() + polys[-1] * gauss_log_deriv)
        xs = np.linspace(0.0, c + 8.0 * w, 400)
        envelope = np.exp(-(((xs - c) / w) ** 2))
        peak = max(float(np.max(np.abs(P(xs) * envelope))) for P in polys)
        return cls(T=T, p=p, c=c, w=w, q=q, scale=peak, _xpolys=tuple(polys))

    def x_part(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        envelope = np.exp(-(((x - self.c) / self.w) ** 2))
        return self._xpolys[order](x) * envelope / self.scale

    def theta(self, t):
        return (self.T - np.asarray(t, dtype=float)) ** self.q

    def theta_t(self, t):
        return -self.q * (self.T - np.asarray(t, dtype=float)) ** (self.q - 1)

    def check_constraints(self, t_probe) -> None:
        theta = np.max(np.abs(self.theta(np.array([self.T]))))
        x0 = abs(float(self.x_part(np.array([0.0]), 0)[0]))
        x1 = abs(float(self.x_part(np.array([0.0]), 1)[0]))
        bad = []
        if x0 > 1e-12:
            bad.append(f"phi(0,·) = {x0:.3e}")
        if x1 > 1e-12:
            bad.append(f"phi_x(0,·) = {x1:.3e}")
        if theta > 1e-12:
            bad.append(f"phi(·,T) = {theta:.3e}")
        if bad:
            raise HarnessError("test function violates constraints: " + ", ".join(bad))


def weak_test_family(T: float) -> list:
    """Twelve members: p in {2,3,4} x (c,w) in {(3,2),(6,3)} x q in {1,2}."""
    members = []
    for p in (2, 3, 4):
        for c, w in ((3.0, 2.0), (6.0, 3.0)):
            for q in (1, 2):
                members.append(SeparableTestFunction.build(T, p, c, w, q))
    return members


def weak_form_residual(
    u: SpaceTimeField,
    g: GridFunction,
    h1: TimeSeries,
    h2: TimeSeries,
    h3: TimeSeries,
    T: float,
    family: list | None = None,
    return_details: bool = False,
):
    """Max over the family of the integrated-by-parts identity

        int int [U (phi_t + d^5_x phi) + U^2/2 phi_x] dx dt
        + int g phi(x, 0) dx
        + int h1 d^4_x phi(0,t) dt - int h2 d^3_x phi(0,t) dt
        + int h3 d^2_x phi(0,t) dt

    over x >= 0, t in [0, T]; an exact solution makes every member vanish.
    """
    family = family if family is not None else weak_test_family(T)
    if not family:
        raise HarnessError("empty test-function family")
    u.tgrid.index_of(T)  # T must be a grid node
    xnodes, tnodes = u.xgrid.nodes, u.tgrid.nodes
    x_sel = np.where(xnodes >= -1e-14)[0]
    t_sel = np.where((tnodes >= -1e-14) & (tnodes <= T + 1e-14))[0]
    xs, ts = xnodes[x_sel], tnodes[t_sel]
    U = u.values[np.ix_(x_sel, t_sel)]
    g_vals = np.asarray(g.values)[x_sel]
    h_vals = [np.asarray(h.values)[t_sel] for h in (h1, h2, h3)]
    results = []
    for member in family:
        member.check_constraints(ts)
        X = [member.x_part(xs, k) for k in range(6)]
        theta, theta_t = member.theta(ts), member.theta_t(ts)
        interior = U * (X[0][:, None] * theta_t[None, :] + X[5][:, None] * theta[None, :])
        interior = interior + 0.5 * U * U * (X[1][:, None] * theta[None, :])
        inner_x = simpson(interior, x=xs, axis=0)
        total = complex(simpson(inner_x, x=ts))
        total += complex(simpson(g_vals * X[0], x=xs)) * float(member.theta(0.0))
        x0 = np.array([0.0])
        d4, d3, d2 = (float(member.x_part(x0, k)[0]) for k in (4, 3, 2))
        total += complex(simpson(h_vals[0] * theta, x=ts)) * d4
        total -= complex(simpson(h_vals[1] * theta, x=ts)) * d3
        total += complex(simpson(h_vals[2] * theta, x=ts)) * d2
        results.append(abs(total))
    worst = float(max(results))
    if return_details:
        return worst, results
    return worst


# ---------------------------------------------------------------------------
# Extension independence (observable face of uniqueness).
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionIndependenceReport:
    max_distance: float
    runs: tuple
    distances: tuple


def extension_independence(
    g: GridFunction,
    h_series: tuple,
    cfg: SolverConfig,
    methods: tuple = ("zero", "reflection"),
    collars: tuple = (2.0, 3.0),
) -> ExtensionIndependenceReport:
    """Solve once per (extension method x collar width); report the maximum
    pairwise L^2 distance of the restrictions to x >= 0, t in [0, T].

    The solution of the half-line problem must not depend on how the initial
    datum was extended to x < 0 nor on the taper used inside the boundary
    potential; agreement across these runs is the computable consequence.
    """
    if len(methods) < 2 and len(collars) < 2:
        raise ValueError("need at least two distinct runs")
    h1, h2, h3 = h_series
    solutions = []
    labels = []
    for method in methods:
        ext = extend_initial_datum(g, cfg.s, method=method)
        for collar in collars:
            run_cfg = replace(cfg, collar=collar)
            data = SolverData(g_l=ext.extension, h1=h1, h2=h2, h3=h3)
            result = picard_solve(data, run_cfg)
            solutions.append(result.u)
            labels.append(f"{method}/collar={collar:g}")
    xnodes, tnodes = cfg.xgrid.nodes, cfg.tgrid.nodes
    x_sel = np.where(xnodes >= -1e-14)[0]
    t_sel = np.where((tnodes >= -1e-14) & (tnodes <= cfg.T + 1e-14))[0]
    measure = cfg.xgrid.step * cfg.tgrid.step
    distances = []
    worst = 0.0
    for i in range(len(solutions)):
        for k in range(i + 1, len(solutions)):
            diff = (solutions[i].values - solutions[k].values)[np.ix_(x_sel, t_sel)]
            dist = float(np.sqrt(np.sum(np.abs(diff) ** 2) * measure))
            distances.append({"pair": (labels[i], labels[k]), "distance": dist})
            worst = max(worst, dist)
    return ExtensionIndependenceReport(
        max_distance=worst,
        runs=tuple(labels),
        distances=tuple(
            (d["pair"][0], d["pair"][1], d["distance"]) for d in distances
        ),
    )


# ---------------------------------------------------------------------------
# Smoothing of the nonlinear part.
# ---------------------------------------------------------------------------

def spectral_tail_slope(f: GridFunction, band: tuple) -> float:
    """Least-squares slope of log|f_hat| against log<xi> over the band."""
    spec = forward_transform(f)
    freqs = np.abs(spec.frequencies)
    mags = np.abs(spec.coefficients)
    mask = (freqs >= band[0]) & (freqs <= band[1]) & (mags > 0)
    if np.count_nonzero(mask) < 8:
        raise ValueError("band contains too few resolved modes for a slope fit")
    x = np.log1p(freqs[mask])
    y = np.log(mags[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def field_tail_slope(u: SpaceTimeField, band: tuple, t_indices) -> float:
    """Slope fit of the time-sup envelope of the x-spectrum magnitudes."""
    spec = _field_spectrum_x(u)
    envelope = np.max(np.abs(spec[:, list(t_indices)]), axis=1)
    freqs = np.abs(u.xgrid.frequencies)
    mask = (freqs >= band[0]) & (freqs <= band[1]) & (envelope > 0)
    if np.count_nonzero(mask) < 8:
        raise ValueError("band contains too few resolved modes for a slope fit")
    x = np.log1p(freqs[mask])
    y = np.log(envelope[mask])
    return float(np.polyfit(x, y, 1)[0])


def _smoothing_window(s: float, b: float, a: float) -> bool:
    if 0.0 <= s < 0.5:
        return 0.45 < b < 0.5 and 0.0 <= a < 0.5 - s
    if 0.5 < s < 1.5:
        return 0.45 < b < 0.5 and 0.0 <= a <= 0.5
    return False


def smoothing_report(
    result: SolveResult,
    cfg: SolverConfig,
    a_grid,
    g_reference: GridFunction | None = None,
    slope_band: tuple | None = None,
    band_factors: tuple = (1.0, 2.0),
    t_sample_count: int = 9,
) -> list:
    """Per-a rows quantifying how much smoother the nonlinear part is than g.

    Each row reports: the admissibility flag of (s, b, a); the sup over
    t-samples in [0, T] of the half-line H^{s+a} upper-bound norm of the
    nonlinear part; spectral tail slopes of the nonlinear part and of the
    reference datum with the gain; and the relative growth of band-limited
    H^{s+a} partial norms under band extension for the datum's free
    evolution vs the nonlinear part.  Inadmissible a values are flagged but
    still measured.
    """
    g_ref = g_reference if g_reference is not None else result.workspace.data.g_l
    tnodes = cfg.tgrid.nodes
    t_sel = np.where((tnodes >= -1e-14) & (tnodes <= cfg.T + 1e-14))[0]
    samples = t_sel[np.linspace(0, len(t_sel) - 1, t_sample_count).round().astype(int)]
    cap = cfg.cap_fraction * cfg.xgrid.nyquist
    band = slope_band or (2.0, 0.9 * cap)
    base_band = band[1] / max(band_factors)
    slope_g = spectral_tail_slope(g_ref, band)
    slope_nl = field_tail_slope(result.nonlinear, band, samples)
    rows = []
    for a in a_grid:
        target = cfg.s + a
        sup_norm = 0.0
        for n in samples:
            slice_fn = GridFunction(cfg.xgrid, result.nonlinear.values[:, n])
            sup_norm = max(sup_norm, halfline_norm_upper(slice_fn, target, method="auto"))
        growth = {}
        band_norms = {}
        # The band-extension contrast compares the datum's free evolution
        # (which fails H^{s+a} exactly as the datum does) against the
        # nonlinear remainder.  The boundary-driven piece of the linear part
        # is excluded: its x-content is confined below |Re r| <= (beta
        # band)^{1/5} by construction, so its band growth reflects the
        # quadrature band rather than the regularity of the data.
        free_part = result.workspace.free_term
        for label, part in (("linear", free_part), ("nonlinear", result.nonlinear)):
            norms = []
            for factor in band_factors:
                worst = 0.0
                for n in samples:
                    slice_fn = GridFunction(cfg.xgrid, part.values[:, n])
                    worst = max(
                        worst, band_limited_sobolev_norm(slice_fn, target, factor * base_band)
                    )
                norms.append(worst)
            growth[label] = norms[-1] / norms[0] - 1.0 if norms[0] > 0 else 0.0
            band_norms[label] = [float(v) for v in norms]
        rows.append(
            {
                "a": float(a),
                "admissible": _smoothing_window(cfg.s, cfg.b, a),
                "sup_halfline_norm": float(sup_norm),
                "tail_slope_nonlinear": slope_nl,
                "tail_slope_reference": slope_g,
                "slope_gain": float(slope_g - slope_nl),
                "meets_slope_gain": bool(slope_g - slope_nl >= 0.8 * a),
                "band_caps": [float(f * base_band) for f in band_factors],
                "band_norms_linear": band_norms["linear"],
                "band_norms_nonlinear": band_norms["nonlinear"],
                "band_growth_linear": float(growth["linear"]),
                "band_growth_nonlinear": float(growth["nonlinear"]),
            }
        )
    return rows
