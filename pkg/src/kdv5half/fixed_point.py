"""Picard iteration for the half-line initial-boundary value problem.

The solution operator is the fixed point of

    Gamma_T(u) = eta(t) W(t) g_l
               + eta(t) Duhamel[F_T(u)]
               + eta(t) BoundaryPotential[h_j - p_j]

where F_T(u) = eta(t/2T) (-1/2) d_x(u^2), p_{j+1} are the x = 0 traces of the
first two terms, and the boundary potential is driven by the corrected data
h_j - p_j so that the total trace reproduces the prescribed h_j on the
working window.  Everything is assembled on fixed grids with one shared
boundary quadrature table per solve, which makes the linear/nonlinear split
of the output exact to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .boundary import BoundaryPotential, BoundaryQuadrature, truncation_radius
from .bourgain import xsba_norm
from .cutoffs import EXCLUDED_REGULARITY, eta
from .grids import GridFunction, SpaceTimeField, TimeSeries, UniformGrid
from .propagator import (
    PropagatorPlan,
    _field_spectrum_x,
    _values_from_spectrum_x,
    duhamel_trajectory,
    free_field,
    trace_at_origin,
)
from .spectral import fractional_time_norm, sobolev_norm

__all__ = [
    "SolverConfig",
    "SolverData",
    "IterationTrace",
    "TraceDecomposition",
    "TimeHorizon",
    "NonContractionError",
    "nonlinearity_FT",
    "GammaWorkspace",
    "gamma_operator",
    "choose_T",
    "ball_radius",
    "picard_solve",
    "SolveResult",
    "nonlinear_part",
]


class NonContractionError(RuntimeError):
    """Picard iteration stopped contracting; carries the iteration trace."""

    def __init__(self, message: str, trace: "IterationTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SolverConfig:
    """Grids, norm indices, and horizon for one fixed-point solve.

    The index invariants are the contraction window of the iteration:
    max{s/5 - 1/20, 2/5} < b < bstar < 1/2 and 1/2 < alpha < 1 - bstar,
    with 0 < T <= 1/2.
    """

    xgrid: UniformGrid
    tgrid: UniformGrid
    s: float
    b: float
    bstar: float
    alpha: float
    T: float
    max_iter: int = 25
    fp_tol: float = 1e-9
    depth: int = 2
    cap_fraction: float = 0.75
    collar: float = 2.0
    spectrum_tol: float = 1e-12

    def __post_init__(self):
        if not (0.0 <= self.s < 2.75):
            raise ValueError(f"regularity s must lie in [0, 11/4), got {self.s}")
        if any(abs(self.s - e) < 1e-9 for e in EXCLUDED_REGULARITY):
            raise ValueError(
                f"regularity s = {self.s} is one of the excluded transition values {EXCLUDED_REGULARITY}"
            )
        lower = max(self.s / 5.0 - 0.05, 0.4)
        if not (lower < self.b < self.bstar < 0.5):
            raise ValueError(
                "indices must satisfy the contraction window "
                f"max{{s/5 - 1/20, 2/5}} = {lower:g} < b < bstar < 1/2; "
                f"got b={self.b}, bstar={self.bstar}"
            )
        if not (0.5 < self.alpha < 1.0 - self.bstar):
            raise ValueError(
                f"low-frequency index must satisfy 1/2 < alpha < 1 - bstar = {1.0 - self.bstar:g}; "
                f"got alpha={self.alpha}"
            )
        if not (0.0 < self.T <= 0.5):
            raise ValueError(f"horizon T must lie in (0, 1/2], got {self.T}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class SolverData:
    """Whole-line extended initial datum plus zero-extended boundary series."""

    g_l: GridFunction
    h1: TimeSeries
    h2: TimeSeries
    h3: TimeSeries
    meta: dict = dc_field(default_factory=dict)

    @property
    def boundary_series(self):
        return (self.h1, self.h2, self.h3)


@dataclass
class IterationTrace:
    norms: list = dc_field(default_factory=list)
    diffs: list = dc_field(default_factory=list)
    factors: list = dc_field(default_factory=list)
    residual: float | None = None
    converged: bool = False
    iterations: int = 0

    def record(self, norm: float, diff: float) -> None:
        self.norms.append(norm)
        self.diffs.append(diff)
        if len(self.diffs) >= 2 and self.diffs[-2] > 0:
            self.factors.append(self.diffs[-1] / self.diffs[-2])
        self.iterations += 1

    def to_payload(self) -> dict:
        return {
            "norms": list(self.norms),
            "diffs": list(self.diffs),
            "contraction_factors": list(self.factors),
            "residual": self.residual,
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class TraceDecomposition:
    """x = 0 traces: q from the free term, r from the Duhamel term, p = q + r."""

    q: tuple
    r: tuple
    p: tuple

    @classmethod
    def from_parts(cls, q, r) -> "TraceDecomposition":
        p = tuple(TimeSeries(qj.grid, qj.values + rj.values) for qj, rj in zip(q, r))
        return cls(q=tuple(q), r=tuple(r), p=p)


def nonlinearity_FT(
    u: SpaceTimeField, T: float, cap_fraction: float = 0.75
) -> SpaceTimeField:
    """F_T(u) = eta(t/2T) * (-1/2) d_x(u^2), with band caps around the square.

    The band cap is applied to u before squaring and to the derivative
    multiplier after, so the quadratic term cannot fold energy back from
    beyond the resolved band.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    xgrid = u.xgrid
    xi = xgrid.frequencies[:, None]
    mask = np.abs(xi) <= cap_fraction * xgrid.nyquist
    spec = _field_spectrum_x(u)
    u_capped = _values_from_spectrum_x(mask * spec, xgrid)
    sq_spec = _field_spectrum_x(SpaceTimeField(xgrid, u.tgrid, u_capped * u_capped))
    deriv = _values_from_spectrum_x(mask * (1j * xi) * sq_spec, xgrid)
    window = eta(u.tgrid.nodes / (2.0 * T))[None, :]
    return SpaceTimeField(xgrid, u.tgrid, -0.5 * window * deriv)


class GammaWorkspace:
    """Data-bound state for repeated applications of Gamma_T.

    Precomputes the free term and its traces once, keeps one boundary
    quadrature table (with its exponential kernel cache) across iterations,
    and records assembly diagnostics.
    """

    def __init__(self, data: SolverData, cfg: SolverConfig):
        for h in data.boundary_series:
            if h.grid != cfg.tgrid:
                raise ValueError("boundary series must live on the solver time grid")
        if data.g_l.grid != cfg.xgrid:
            raise ValueError("initial datum must live on the solver space grid")
        self.data = data
        self.cfg = cfg
        self.plan = PropagatorPlan(cfg.xgrid, cfg.cap_fraction)
        tnodes = cfg.tgrid.nodes
        self.eta_t = eta(tnodes)
        self.eta_2T = eta(tnodes / (2.0 * cfg.T))
        self.chi_pos = (tnodes > 0).astype(float)
        dt = cfg.tgrid.step
        self.t_window = (-1.0 - dt, 1.0 + dt)
        free = free_field(data.g_l, cfg.tgrid, self.plan)
        self.free_term = SpaceTimeField(cfg.xgrid, cfg.tgrid, free.values * self.eta_t[None, :])
        self.q = tuple(trace_at_origin(data.g_l, j, cfg.tgrid, self.plan) for j in (0, 1, 2))
        self._pot: BoundaryPotential | None = None
        self._t_sel: np.ndarray | None = None
        self.diagnostics: dict = {"applications": 0}

    # -- corrected boundary data -------------------------------------------------
    def corrected_series(self, r_traces) -> tuple:
        """eta(t/2T) * chi_{t>0} * (h_j - q_j - r_j) for j = 0, 1, 2."""
        window = self.eta_2T * self.chi_pos
        out = []
        for h, qj, rj in zip(self.data.boundary_series, self.q, r_traces):
            out.append(TimeSeries(self.cfg.tgrid, window * (h.values - qj.values - rj.values)))
        return tuple(out)

    def zero_extension_flags(self, series) -> list:
        """Near-origin magnitudes of the corrected data, with the per-channel
        requirement: channel j must vanish at t = 0+ when s > 1/2 + j."""
        flags = []
        dt = self.cfg.tgrid.step
        for j, d in enumerate(series):
            scale = float(np.max(np.abs(d.values)))
            near = float(abs(d.values[self.cfg.tgrid.index_of(0.0) + 1]))
            required = self.cfg.s > 0.5 + j
            ok = (not required) or (scale == 0.0) or (near <= 0.05 * scale + 1e-12)
            flags.append(
                {"channel": j + 1, "required": required, "near_origin": near, "ok": bool(ok)}
            )
        return flags

    # -- boundary potential ------------------------------------------------------
    def _boundary_field(self, series) -> SpaceTimeField:
        cfg = self.cfg
        values = np.zeros((cfg.xgrid.count, cfg.tgrid.count), dtype=np.complex128)
        if all(np.all(d.values == 0) for d in series):
            return SpaceTimeField(cfg.xgrid, cfg.tgrid, values)
        if self._pot is None:
            cap = cfg.cap_fraction * cfg.tgrid.nyquist
            radius, tail, ok = truncation_radius(series, cfg.spectrum_tol, cap)
            tnodes = cfg.tgrid.nodes
            self._t_sel = np.where((tnodes >= self.t_window[0]) & (tnodes <= self.t_window[1]))[0]
            ttargets = tnodes[self._t_sel]
            quad = BoundaryQuadrature.build(
                radius,
                cfg.depth,
                t_span=float(np.max(np.abs(ttargets))),
                x_span=float(np.max(np.abs(cfg.xgrid.nodes))),
                collar=cfg.collar,
            )
            self._pot = BoundaryPotential(quad, *series)
            self.diagnostics.update(
                {
                    "beta_radius": radius,
                    "spectrum_within_band": ok,
                    "tail_mass": tail,
                    "quadrature_nodes": quad.node_count,
                }
            )
        else:
            self._pot.update_data(*series)
        ttargets = cfg.tgrid.nodes[self._t_sel]
        chunk = 256
        xnodes = cfg.xgrid.nodes
        for start in range(0, cfg.xgrid.count, chunk):
            xs = xnodes[start : start + chunk]
            values[start : start + chunk, self._t_sel] = self._pot.field_values(xs, ttargets)
        values *= self.eta_t[None, :]
        return SpaceTimeField(cfg.xgrid, cfg.tgrid, values)

    def boundary_field_for(self, series) -> SpaceTimeField:
        """Assemble eta(t) * BoundaryPotential[series] on the shared table."""
        return self._boundary_field(series)

    # -- one application of Gamma_T ---------------------------------------------
    def apply(self, u: SpaceTimeField) -> tuple:
        """Returns (Gamma_T(u), parts) where parts carries the assembled pieces."""
        cfg = self.cfg
        if u.xgrid != cfg.xgrid or u.tgrid != cfg.tgrid:
            raise ValueError("iterate must live on the solver grids")
        forcing = nonlinearity_FT(u, cfg.T, cfg.cap_fraction)
        if np.any(forcing.values):
            duh_raw = duhamel_trajectory(forcing, self.plan, t_window=self.t_window)
            duh = SpaceTimeField(cfg.xgrid, cfg.tgrid, duh_raw.values * self.eta_t[None, :])
            r = tuple(trace_at_origin(duh_raw, j, cfg.tgrid, self.plan) for j in (0, 1, 2))
        else:
            zero_t = np.zeros(cfg.tgrid.count, dtype=np.complex128)
            duh = SpaceTimeField(
                cfg.xgrid, cfg.tgrid, np.zeros((cfg.xgrid.count, cfg.tgrid.count), np.complex128)
            )
            r = tuple(TimeSeries(cfg.tgrid, zero_t.copy()) for _ in range(3))
        corrected = self.corrected_series(r)
        boundary = self._boundary_field(corrected)
        total = SpaceTimeField(
            cfg.xgrid, cfg.tgrid, self.free_term.values + duh.values + boundary.values
        )
        self.diagnostics["applications"] += 1
        parts = {
            "duhamel": duh,
            "boundary": boundary,
            "r": r,
            "corrected": corrected,
        }
        return total, parts


def gamma_operator(
    u: SpaceTimeField, data: SolverData, cfg: SolverConfig, workspace: GammaWorkspace | None = None
) -> SpaceTimeField:
    """One application of the solution operator Gamma_T to the iterate u."""
    ws = workspace or GammaWorkspace(data, cfg)
    total, _ = ws.apply(u)
    return total


@dataclass(frozen=True)
class TimeHorizon:
    T: float
    margin: float
    capped: bool


def choose_T(R: float, c_emp: float, b: float, bstar: float, floor: float = 1e-4) -> TimeHorizon:
    """Largest T <= 1/2 with 2 * c_emp * R * T^(bstar-b) <= 1/2.

    The returned horizon sits strictly inside the constraint (factor 0.99), so
    doubling R scales the result by exactly 2^(-1/(bstar-b)) whenever both
    values are below the cap.
    """
    if R < 0:
        raise ValueError("ball radius R must be positive")
    if c_emp <= 0:
        raise ValueError("calibration constant must be positive")
    if not (0 < b < bstar):
        raise ValueError("need 0 < b < bstar")
    if R == 0.0:
        return TimeHorizon(T=0.5, margin=0.5, capped=True)
    exponent = bstar - b
    T_eq = (1.0 / (4.0 * c_emp * R)) ** (1.0 / exponent)
    if T_eq > 0.5 * (1.0 + 1e-9):
        T = 0.5
        capped = True
    else:
        T = 0.99 * T_eq
        capped = False
    if T < floor:
        raise ValueError(
            f"no admissible horizon above {floor:g} for ball radius {R:g} "
            f"(equality at T = {T_eq:.3e}); reduce the data size"
        )
    margin = 0.5 - 2.0 * c_emp * R * T**exponent
    return TimeHorizon(T=float(T), margin=float(margin), capped=capped)


def ball_radius(data: SolverData, s: float, c_emp: float) -> float:
    """2 * c_emp * (||g_l||_{H^s} + sum_j ||h_{j+1}||_{H^{(s+2-j)/5}_t})."""
    total = sobolev_norm(data.g_l, s)
    for j, h in enumerate(data.boundary_series):
        total += fractional_time_norm(h, (s + 2.0 - j) / 5.0)
    return 2.0 * c_emp * total


@dataclass(frozen=True)
class SolveResult:
    u: SpaceTimeField
    trace: IterationTrace
    decomposition: TraceDecomposition
    nonlinear: SpaceTimeField
    linear: SpaceTimeField
    diagnostics: dict
    workspace: GammaWorkspace


def picard_solve(data: SolverData, cfg: SolverConfig) -> SolveResult:
    """Iterate u_{k+1} = Gamma_T(u_k) from u_0 = 0 to the fixed point.

    Convergence is declared when the successive difference in the discrete
    X^{s,b,alpha} norm falls below cfg.fp_tol; the returned residual is
    measured by one extra application.  Three consecutive non-contracting
    steps raise NonContractionError with the trace attached (the horizon is
    too large for the data at this resolution).
    """
    ws = GammaWorkspace(data, cfg)
    zero = SpaceTimeField(
        cfg.xgrid, cfg.tgrid, np.zeros((cfg.xgrid.count, cfg.tgrid.count), np.complex128)
    )
    trace = IterationTrace()
    u = zero
    parts = None
    for _ in range(cfg.max_iter):
        u_next, parts = ws.apply(u)
        diff = xsba_norm(
            SpaceTimeField(cfg.xgrid, cfg.tgrid, u_next.values - u.values),
            cfg.s,
            cfg.b,
            cfg.alpha,
        )
        trace.record(norm=xsba_norm(u_next, cfg.s, cfg.b, cfg.alpha), diff=diff)
        u = u_next
        if diff < cfg.fp_tol:
            trace.converged = True
            break
        if len(trace.factors) >= 3 and all(f >= 1.0 for f in trace.factors[-3:]):
            raise NonContractionError(
                "Picard iteration failed to contract for 3 consecutive steps; "
                "the horizon T is too large for this data at this resolution",
                trace,
            )
    if not trace.converged:
        raise NonContractionError(
            f"no convergence within {cfg.max_iter} iterations (last diff {trace.diffs[-1]:.3e})",
            trace,
        )
    residual_field, _ = ws.apply(u)
    trace.residual = xsba_norm(
        SpaceTimeField(cfg.xgrid, cfg.tgrid, residual_field.values - u.values),
        cfg.s,
        cfg.b,
        cfg.alpha,
    )
    decomposition = TraceDecomposition.from_parts(ws.q, parts["r"])
    window = ws.eta_2T * ws.chi_pos
    nl_series = tuple(
        TimeSeries(cfg.tgrid, window * rj.values) for rj in parts["r"]
    )
    nl_boundary = ws.boundary_field_for(nl_series)
    nonlinear = SpaceTimeField(
        cfg.xgrid, cfg.tgrid, parts["duhamel"].values - nl_boundary.values
    )
    linear = SpaceTimeField(cfg.xgrid, cfg.tgrid, u.values - nonlinear.values)
    diagnostics = dict(ws.diagnostics)
    diagnostics["zero_extension_flags"] = ws.zero_extension_flags(parts["corrected"])
    diagnostics["T"] = cfg.T
    return SolveResult(
        u=u,
        trace=trace,
        decomposition=decomposition,
        nonlinear=nonlinear,
        linear=linear,
        diagnostics=diagnostics,
        workspace=ws,
    )


def nonlinear_part(
    u: SpaceTimeField,
    data: SolverData,
    cfg: SolverConfig,
    workspace: GammaWorkspace | None = None,
) -> SpaceTimeField:
    """Duhamel term of Gamma_T(u) minus the boundary potential driven by the
    Duhamel traces alone — the portion of the solution beyond its linear part."""
    ws = workspace or GammaWorkspace(data, cfg)
    _, parts = ws.apply(u)
    window = ws.eta_2T * ws.chi_pos
    nl_series = tuple(TimeSeries(cfg.tgrid, window * rj.values) for rj in parts["r"])
    nl_boundary = ws.boundary_field_for(nl_series)
    return SpaceTimeField(cfg.xgrid, cfg.tgrid, parts["duhamel"].values - nl_boundary.values)
