"""Dispersive space-time norms and bilinear-estimate ratio monitors.

The norms weight the two-dimensional spectrum by powers of <xi> = 1 + |xi|
and of the modulation <tau + xi^5> = 1 + |tau + xi^5|; the modulation
vanishes exactly on the characteristic surface tau = -xi^5 traced out by
solutions of u_t + d^5u/dx^5 = 0 under this package's transform convention.

All functionals are plain weighted Parseval sums on the periodic box, so a
single on-grid mode of amplitude A carries the box factor sqrt(Lx*Lt) in its
norm.  Ratio monitors divide one such norm by a product of two, so they are
grid-stable under refinement at a fixed box but are empirical constants, not
certified operator norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SpaceTimeField, UniformGrid
from .spectral import spectrum_matrix, values_from_spectrum_matrix

__all__ = [
    "NormIndices",
    "xsb_norm",
    "xsba_norm",
    "ysba_norm",
    "bilinear_ratio",
    "seeded_band_limited_field",
]


@dataclass(frozen=True)
class NormIndices:
    """Index bundle (s, b, alpha, a) with admissibility flags.

    `gain_admissible` is the window of the derivative-gain bilinear estimate
    (numerator measured in X^{s+a, -b}); `auxiliary_admissible` is the window
    of the companion estimate used at higher regularity (numerator in
    X^{1/2, (2(s+a)-1-10b)/10}); `contraction_admissible` is the b-window of
    the fixed-point argument.
    """

    s: float
    b: float
    alpha: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"regularity s must be >= 0, got {self.s}")
        if self.a < 0:
            raise ValueError(f"gain index a must be >= 0, got {self.a}")

    @property
    def gain_admissible(self) -> bool:
        return not self.gain_violations()

    @property
    def auxiliary_admissible(self) -> bool:
        return not self.auxiliary_violations()

    @property
    def contraction_admissible(self) -> bool:
        return max(self.s / 5.0 - 0.05, 0.4) < self.b < 0.5

    def gain_violations(self) -> list:
        v = []
        if self.s < 0:
            v.append(f"s >= 0 (got s={self.s})")
        if not (0.4 <= self.b < 0.5):
            v.append(f"2/5 <= b < 1/2 (got b={self.b})")
        if not (0.0 <= self.a <= 10.0 * self.b - 4.0):
            v.append(f"0 <= a <= 10b-4 = {10.0 * self.b - 4.0:g} (got a={self.a})")
        return v

    def auxiliary_violations(self) -> list:
        v = []
        if not (0.5 < self.s < 2.75):
            v.append(f"1/2 < s < 11/4 (got s={self.s})")
        if not (0.0 <= self.a < 2.75 - self.s):
            v.append(f"0 <= a < 11/4 - s = {2.75 - self.s:g} (got a={self.a})")
        lower = max((self.s + self.a) / 5.0 - 0.05, 0.4)
        if not (lower < self.b < 0.5):
            v.append(f"max{{(s+a)/5 - 1/20, 2/5}} = {lower:g} < b < 1/2 (got b={self.b})")
        return v


def _spectrum_weights(u: SpaceTimeField):
    spec = spectrum_matrix(u)
    xi = u.xgrid.frequencies[:, None]
    tau = u.tgrid.frequencies[None, :]
    measure = u.xgrid.freq_step * u.tgrid.freq_step
    return spec, xi, tau, measure


def _weighted_l2(spec: np.ndarray, weight: np.ndarray, measure: float) -> float:
    return float(np.sqrt(np.sum((weight * np.abs(spec)) ** 2) * measure))


def xsb_norm(u: SpaceTimeField, s: float, b: float) -> float:
    """sqrt( sum <xi>^{2s} <tau+xi^5>^{2b} |u_hat|^2 dxi dtau ).

    At (s, b) = (0, 0) this is the space-time L^2 norm (Parseval).
    """
    spec, xi, tau, measure = _spectrum_weights(u)
    weight = (1.0 + np.abs(xi)) ** s * (1.0 + np.abs(tau + xi**5)) ** b
    return _weighted_l2(spec, weight, measure)


def xsba_norm(u: SpaceTimeField, s: float, b: float, alpha: float) -> float:
    """Norm with the low-frequency time weight added for |xi| <= 1.

    The weight is <xi>^s <tau+xi^5>^b + chi_{[-1,1]}(xi) <tau>^alpha applied
    to the spectrum before the L^2 sum, so the result always dominates
    xsb_norm.
    """
    spec, xi, tau, measure = _spectrum_weights(u)
    weight = (1.0 + np.abs(xi)) ** s * (1.0 + np.abs(tau + xi**5)) ** b
    weight = weight + (np.abs(xi) <= 1.0) * (1.0 + np.abs(tau)) ** alpha
    return _weighted_l2(spec, weight, measure)


def ysba_norm(u: SpaceTimeField, s: float, b: float, alpha: float) -> float:
    """Three-term companion norm used for the inhomogeneous estimates.

    term 1: || <xi>^s <tau+xi^5>^{-b} u_hat ||_{L^2}
    term 2: || chi_{[-1,1]}(xi) <tau>^{alpha-1} u_hat ||_{L^2}
    term 3: || <xi>^s  integral |u_hat| / <tau+xi^5> dtau ||_{L^2_xi}
    """
    spec, xi, tau, measure = _spectrum_weights(u)
    modulation = 1.0 + np.abs(tau + xi**5)
    bracket_x = 1.0 + np.abs(xi)
    t1 = _weighted_l2(spec, bracket_x**s * modulation ** (-b), measure)
    t2 = _weighted_l2(spec, (np.abs(xi) <= 1.0) * (1.0 + np.abs(tau)) ** (alpha - 1.0), measure)
    inner = np.sum(np.abs(spec) / modulation, axis=1) * u.tgrid.freq_step
    t3 = float(np.sqrt(np.sum((bracket_x[:, 0] ** s * inner) ** 2) * u.xgrid.freq_step))
    return t1 + t2 + t3


def _x_derivative_of_product(v: SpaceTimeField, w: SpaceTimeField, cap_fraction: float) -> SpaceTimeField:
    product = SpaceTimeField(v.xgrid, v.tgrid, v.values * w.values)
    spec = spectrum_matrix(product)
    xi = v.xgrid.frequencies[:, None]
    mult = 1j * xi * (np.abs(xi) <= cap_fraction * v.xgrid.nyquist)
    return values_from_spectrum_matrix(mult * spec, product.xgrid, product.tgrid)


def bilinear_ratio(
    v: SpaceTimeField,
    w: SpaceTimeField,
    s: float,
    b: float,
    a: float = 0.0,
    mode: str = "gain",
    cap_fraction: float = 0.75,
) -> float:
    """Ratio ||d_x(vw)||_numerator / (||v||_{X^{s,b}} ||w||_{X^{s,b}}).

    mode="gain":      numerator norm X^{s+a, -b}; indices must satisfy the
                      derivative-gain window s >= 0, 2/5 <= b < 1/2,
                      0 <= a <= 10b-4.
    mode="auxiliary": numerator norm X^{1/2, (2(s+a)-1-10b)/10}; indices must
                      satisfy 1/2 < s < 11/4, 0 <= a < 11/4 - s,
                      max{(s+a)/5 - 1/20, 2/5} < b < 1/2.

    The product is formed pointwise in physical space and differentiated
    spectrally under the standard band cap.  Invariant under independent
    rescaling of v and w.
    """
    idx = NormIndices(s=s, b=b, a=a)
    if mode == "gain":
        violations = idx.gain_violations()
        label = "derivative-gain bilinear estimate"
    elif mode == "auxiliary":
        violations = idx.auxiliary_violations()
        label = "auxiliary bilinear estimate"
    else:
        raise ValueError(f"mode must be 'gain' or 'auxiliary', got {mode!r}")
    if violations:
        raise ValueError(f"inadmissible indices for the {label}: violated " + "; ".join(violations))
    if v.xgrid != w.xgrid or v.tgrid != w.tgrid:
        raise ValueError("bilinear ratio arguments must share grids")
    denom = xsb_norm(v, s, b) * xsb_norm(w, s, b)
    if denom == 0.0:
        raise ValueError("bilinear ratio undefined for zero factors")
    deriv = _x_derivative_of_product(v, w, cap_fraction)
    if mode == "gain":
        numer = xsb_norm(deriv, s + a, -b)
    else:
        numer = xsb_norm(deriv, 0.5, (2.0 * (s + a) - 1.0 - 10.0 * b) / 10.0)
    return numer / denom


def seeded_band_limited_field(
    xgrid: UniformGrid,
    tgrid: UniformGrid,
    band_x: float,
    band_t: float,
    seed: int,
) -> SpaceTimeField:
    """Random band-limited field reproducible across grid refinements.

    Coefficients are drawn on the fixed frequency lattice determined by the
    box lengths (spacing 2*pi/L), restricted to |xi| <= band_x, |tau| <=
    band_t, in an order independent of the grid resolution.  Refining a grid
    at a fixed box therefore reproduces the same continuum field exactly.
    """
    rng = np.random.default_rng(seed)
    kx_max = int(np.floor(band_x / xgrid.freq_step))
    kt_max = int(np.floor(band_t / tgrid.freq_step))
    if 2 * kx_max + 1 > xgrid.count or 2 * kt_max + 1 > tgrid.count:
        raise ValueError("band exceeds the grid's resolvable lattice")
    envelope_x = np.exp(-0.5 * (np.arange(-kx_max, kx_max + 1) / max(kx_max, 1)) ** 2)
    envelope_t = np.exp(-0.5 * (np.arange(-kt_max, kt_max + 1) / max(kt_max, 1)) ** 2)
    draws = rng.standard_normal((2 * kx_max + 1, 2 * kt_max + 1, 2))
    block = (draws[..., 0] + 1j * draws[..., 1]) * envelope_x[:, None] * envelope_t[None, :]
    spec = np.zeros((xgrid.count, tgrid.count), dtype=np.complex128)
    for i, kx in enumerate(range(-kx_max, kx_max + 1)):
        for jj, kt in enumerate(range(-kt_max, kt_max + 1)):
            spec[kx % xgrid.count, kt % tgrid.count] = block[i, jj]
    values = values_from_spectrum_matrix(spec, xgrid, tgrid).values
    peak = float(np.max(np.abs(values)))
    if peak > 0:
        values = values / peak
    return SpaceTimeField(xgrid, tgrid, values)
