"""Resolvent of the difference Laplacian and its boundary values.

Off the spectrum the resolvent is the absolutely convergent torus integral

    (R_eta f)(x) = (2 pi)^(-d/2) * integral over T^d of
                   fhat(k) exp(i k.x) / (phi(k) - eta) dk,

evaluated here by tensor-product periodic trapezoidal quadrature (spectrally
accurate for analytic integrands).  On the spectrum, for regular lam, the
two boundary values R(lam +- i0) exist pointwise and are computed from the
splitting induced by a smooth cutoff chi supported on |phi - lam| < delta:

    (i)   a smooth torus integral carrying the factor (1 - chi),
    (ii)  a principal-value integral in the level parameter rho of
          Phi(x, rho) / (rho - lam) over |rho - lam| < delta, evaluated in
          the removable-singularity form (Phi(rho) - Phi(lam)) / (rho - lam),
    (iii) the half-residue surface term +- (i/2) Phi(x, lam),

where Phi(x, rho) = (2 pi)^(1 - d/2) * integral over the level surface at
rho of chi fhat exp(i k.x) / |grad phi| ds.  Since phi is constant on each
level surface, chi restricts there to a scalar factor.

An independent oracle (`eta_extrapolate`) realises the boundary value as the
limit of R(lam +- i eps) along a geometric ladder in eps with polynomial
extrapolation; the two routes must agree and are cross-checked by the test
suite.  At exceptional spectral values the limit does not exist; for d = 2
at the band centre the divergence is logarithmic in eps and
`log_coefficient_estimate` fits its coefficient.

All entry points are pure functions of their arguments; reductions use
numpy's pairwise summation, so results are reproducible for a fixed
configuration.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len

from .dispersion import (
    exceptional_set,
    exceptional_set_contains,
    is_regular,
    surface_mesh,
)
from .lattice import CompactLatticeFunction, Site, _as_site, delta
from .quadrature import bump_indicator, gauss_legendre, neville_at_zero, torus_axis

__all__ = [
    "QuadratureConfig",
    "BoundaryValue",
    "ResolventValue",
    "ExceptionalPointError",
    "EtaOnSpectrumError",
    "LadderDivergenceError",
    "QuadratureAccuracyWarning",
    "resolvent_offspectrum",
    "resolvent_offspectrum_window",
    "surface_integral_phi",
    "LapPlan",
    "lap_apply",
    "lap_apply_window",
    "eta_extrapolate",
    "fundamental_solution",
    "log_coefficient_estimate",
]

_ENV_ORDER = "LATWAVE_TORUS_ORDER"

_DEFAULT_TORUS = {1: 128, 2: 128, 3: 64}
_DEFAULT_SURFACE = {1: 2, 2: 512, 3: 64}
_LADDER_CAP = {1: 1 << 17, 2: 4096, 3: 256}
_LADDER_FLOOR = {1: 1024, 2: 256, 3: 128}


class ExceptionalPointError(ValueError):
    """Boundary values do not exist at exceptional spectral points."""


class EtaOnSpectrumError(ValueError):
    """eta lies on the spectrum interval; use boundary values instead."""


class LadderDivergenceError(RuntimeError):
    """The eps ladder grows instead of converging (the expected outcome at
    exceptional spectral values)."""

    def __init__(self, msg, ladder=None):
        super().__init__(msg)
        self.ladder = ladder


class QuadratureAccuracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BoundaryValue:
    """Spectral parameter lam approached from above (+1) or below (-1)."""

    lam: float
    side: int = +1

    def __post_init__(self):
        if self.side not in (+1, -1):
            raise ValueError("side must be +1 (lam + i0) or -1 (lam - i0)")

    @staticmethod
    def plus(lam: float) -> "BoundaryValue":
        return BoundaryValue(lam, +1)

    @staticmethod
    def minus(lam: float) -> "BoundaryValue":
        return BoundaryValue(lam, -1)

    def conj(self) -> "BoundaryValue":
        return BoundaryValue(self.lam, -self.side)


@dataclass(frozen=True)
class ResolventValue:
    site: Site
    value: complex
    error_estimate: float

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")


@dataclass
class QuadratureConfig:
    """Knobs for torus, level-parameter and surface quadrature.

    `torus_order` is the number of trapezoidal points per dimension (even,
    >= 16); `delta` the half-width of the cutoff window around lam (must
    stay below the distance from lam to the exceptional set); `rho_order`
    the Gauss-Legendre order of the principal-value integral;
    `surface_resolution` the base-grid order of the level-surface meshes.
    Fields left as None are filled per dimension by `resolved`; the
    environment variable LATWAVE_TORUS_ORDER overrides the torus default.
    """

    torus_order: int | None = None
    delta: float | None = None
    chi_profile: str = "exp-bump"
    rho_order: int = 48
    surface_resolution: int | None = None

    def resolved(self, d: int, lam: float | None = None) -> "QuadratureConfig":
        torus = self.torus_order
        if torus is None:
            torus = int(os.environ.get(_ENV_ORDER, 0)) or _DEFAULT_TORUS[min(d, 3)]
        surf = self.surface_resolution or _DEFAULT_SURFACE[min(d, 3)]
        dlt = self.delta
        if dlt is None and lam is not None:
            dist = min(abs(lam - s) for s in exceptional_set(d))
            dlt = min(0.6, 0.5 * dist)
        cfg = QuadratureConfig(
            torus_order=int(torus),
            delta=dlt,
            chi_profile=self.chi_profile,
            rho_order=int(self.rho_order),
            surface_resolution=int(surf),
        )
        cfg.validate(d, lam)
        return cfg

    def validate(self, d: int, lam: float | None = None) -> None:
        if self.chi_profile != "exp-bump":
            raise ValueError(f"unknown chi profile {self.chi_profile!r}")
        if self.torus_order is not None:
            if self.torus_order < 16 or self.torus_order % 2:
                raise ValueError("torus_order must be even and >= 16")
        if self.rho_order < 2:
            raise ValueError("rho_order must be >= 2")
        if self.delta is not None and lam is not None:
            dist = min(abs(lam - s) for s in exceptional_set(d))
            if not 0 < self.delta < dist:
                raise ValueError(
                    f"delta={self.delta} must lie in (0, dist(lambda, exceptional "
                    f"set)={dist:.6g})"
                )

    def to_json_dict(self) -> dict:
        return {
            "torus_order": self.torus_order,
            "delta": self.delta,
            "chi_profile": self.chi_profile,
            "rho_order": self.rho_order,
            "surface_resolution": self.surface_resolution,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "QuadratureConfig":
        keys = {"torus_order", "delta", "chi_profile", "rho_order", "surface_resolution"}
        unknown = set(obj) - keys
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return QuadratureConfig(**obj)


# ----------------------------------------------------------------------
# torus quadrature of the off-spectrum resolvent
# ----------------------------------------------------------------------


def _fhat_on_axes(f: CompactLatticeFunction, axes) -> np.ndarray:
    """fhat on the tensor grid spanned by per-dimension axis arrays."""
    d = f.d
    out = np.zeros(tuple(len(a) for a in axes), dtype=complex)
    for site, v in f.items():
        term = np.asarray(complex(v))
        for j in range(d):
            term = np.multiply.outer(term, np.exp(-1j * axes[j] * site[j]))
        out += term
    return out * (2 * np.pi) ** (-d / 2)


def _phi_on_axes(axes) -> np.ndarray:
    d = len(axes)
    out = np.zeros(tuple(len(a) for a in axes))
    for j, a in enumerate(axes):
        shape = [1] * d
        shape[j] = len(a)
        out = out + (2.0 * np.cos(a)).reshape(shape)
    return out


def _contract_site(G: np.ndarray, axes, site) -> complex:
    """(2 pi)^(-d/2) integral of G exp(i k.site) dk on the trapezoidal grid."""
    term = G
    d = len(axes)
    for j in range(d):
        shape = [1] * d
        shape[j] = len(axes[j])
        term = term * np.exp(1j * axes[j] * site[j]).reshape(shape)
    return complex((2 * np.pi) ** (d / 2) * term.mean())


def _grid_window(G: np.ndarray, sites_idx: np.ndarray) -> np.ndarray:
    """Same contraction as `_contract_site` for all integer sites at once."""
    d = G.ndim
    W = (2 * np.pi) ** (d / 2) * np.fft.ifftn(G)
    idx = sites_idx % np.asarray(G.shape)
    return W[tuple(idx[:, j] for j in range(d))]


def _eta_domain_check(eta: complex, d: int) -> None:
    eta = complex(eta)
    if eta.imag == 0 and abs(eta.real) <= 2 * d:
        raise EtaOnSpectrumError(
            f"eta={eta} lies on the spectrum [-{2 * d}, {2 * d}]; "
            "boundary values require lap_apply"
        )


def resolvent_offspectrum(
    f: CompactLatticeFunction,
    eta: complex,
    xi,
    cfg: QuadratureConfig | None = None,
) -> ResolventValue:
    """(R_eta f)(xi) for eta off [-2d, 2d], by periodic trapezoidal quadrature.

    The error estimate compares the full order with its half-order subgrid;
    a warning is emitted when that comparison suggests non-convergence.
    """
    d = f.d
    _eta_domain_check(eta, d)
    xi = _as_site(xi, d)
    cfg = (cfg or QuadratureConfig()).resolved(d)
    n = cfg.torus_order
    axes = [torus_axis(n)] * d
    G = _fhat_on_axes(f, axes) / (_phi_on_axes(axes) - eta)
    val = _contract_site(G, axes, xi)
    sl = tuple(slice(None, None, 2) for _ in range(d))
    val_half = _contract_site(G[sl], [a[::2] for a in axes], xi)
    est = abs(val - val_half)
    if est > 1e-6 and est > 0.05 * abs(val):
        warnings.warn(
            f"torus quadrature may not have converged (order {n}: "
            f"estimate {est:.2e} vs value {abs(val):.2e})",
            QuadratureAccuracyWarning,
        )
    return ResolventValue(site=xi, value=val, error_estimate=est)


def resolvent_offspectrum_window(
    f: CompactLatticeFunction,
    eta: complex,
    sites,
    cfg: QuadratureConfig | None = None,
    order: int | None = None,
    with_half_order: bool = False,
):
    """(R_eta f) on many sites at once via one FFT of the grid integrand.

    Returns a dict site -> value, or (dict, half-order dict) when
    `with_half_order` is set (used for rung reliability estimates).
    """
    d = f.d
    _eta_domain_check(eta, d)
    cfg = (cfg or QuadratureConfig()).resolved(d)
    n = int(order or cfg.torus_order)
    axes = [torus_axis(n)] * d
    G = _fhat_on_axes(f, axes) / (_phi_on_axes(axes) - eta)
    site_list = [_as_site(s, d) for s in sites]
    idx = np.asarray(site_list, dtype=int).reshape(-1, d)
    vals = _grid_window(G, idx)
    out = {s: complex(v) for s, v in zip(site_list, vals)}
    if not with_half_order:
        return out
    sl = tuple(slice(None, None, 2) for _ in range(d))
    vals2 = _grid_window(G[sl], idx)
    return out, {s: complex(v) for s, v in zip(site_list, vals2)}


# ----------------------------------------------------------------------
# boundary values via the cutoff splitting
# ----------------------------------------------------------------------


def _fhat_points(f: CompactLatticeFunction, pts: np.ndarray) -> np.ndarray:
    """fhat at arbitrary points of shape (N, d)."""
    out = np.zeros(pts.shape[0], dtype=complex)
    for site, v in f.items():
        out += v * np.exp(-1j * (pts @ np.asarray(site, dtype=float)))
    return out * (2 * np.pi) ** (-f.d / 2)


def _mesh_sums(nodes: np.ndarray, coeff: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """sum_n coeff_n exp(i nodes_n . site) for every site; blocked over nodes."""
    out = np.zeros(len(sites), dtype=complex)
    block = max(1, int(4e6 // max(len(sites), 1)))
    S = sites.T  # (d, S)
    for i in range(0, len(nodes), block):
        ph = np.exp(1j * (nodes[i : i + block] @ S))
        out += coeff[i : i + block] @ ph
    return out


class _MeshData:
    """Level-surface mesh at one rho, reduced to phase-sum ingredients."""

    __slots__ = ("nodes", "coeff")

    def __init__(self, f: CompactLatticeFunction, rho: float, d: int, res: int):
        mesh = surface_mesh(rho, d, res)
        self.nodes = mesh.nodes()
        self.coeff = mesh.quad_weights() * _fhat_points(f, self.nodes)

    def phi(self, d: int, sites: np.ndarray, scale: float = 1.0) -> np.ndarray:
        pref = (2 * np.pi) ** (1 - d / 2) * scale
        return pref * _mesh_sums(self.nodes, self.coeff, sites)


class LapPlan:
    """Precomputed state for one boundary value evaluated at many sites.

    Builds the (1 - chi) torus grid and the level-surface meshes at the
    Gauss-Legendre nodes of the principal-value integral (plus a half-order
    node set and a half-resolution mesh for error estimation); `values`
    then evaluates the three-term splitting per site.  Construction is the
    expensive part and is shared across sites.
    """

    def __init__(
        self,
        f: CompactLatticeFunction,
        bv: BoundaryValue,
        cfg: QuadratureConfig | None = None,
    ):
        d = f.d
        lam = float(bv.lam)
        if abs(lam) > 2 * d:
            raise EtaOnSpectrumError(
                f"lambda={lam} lies outside the spectrum; use resolvent_offspectrum"
            )
        if exceptional_set_contains(lam, d):
            raise ExceptionalPointError(
                f"lambda={lam} is an exceptional spectral value for d={d}: "
                "the resolvent has no pointwise boundary value there"
            )
        cfg = (cfg or QuadratureConfig()).resolved(d, lam)
        self.f, self.bv, self.cfg, self.d, self.lam = f, bv, cfg, d, lam
        dlt = cfg.delta

        # term (i): smooth torus integrand (1 - chi) fhat / (phi - lam)
        n = cfg.torus_order
        axes = [torus_axis(n)] * d
        phi = _phi_on_axes(axes)
        chi = bump_indicator((phi - lam) / dlt)
        num = (1.0 - chi) * _fhat_on_axes(f, axes)
        G = np.zeros_like(num)
        np.divide(num, phi - lam, out=G, where=(1.0 - chi) > 0)
        self._G = G

        # terms (ii)/(iii): meshes at GL nodes and at lam
        res = cfg.surface_resolution
        self._rho, self._w = gauss_legendre(lam - dlt, lam + dlt, cfg.rho_order)
        self._meshes = [_MeshData(f, r, d, res) for r in self._rho]
        self._chi_rho = bump_indicator((self._rho - lam) / dlt)
        half_order = max(cfg.rho_order // 2, 2)
        self._rho_h, self._w_h = gauss_legendre(lam - dlt, lam + dlt, half_order)
        self._meshes_h = [_MeshData(f, r, d, res) for r in self._rho_h]
        self._chi_rho_h = bump_indicator((self._rho_h - lam) / dlt)
        self._mesh_lam = _MeshData(f, lam, d, res)
        self._mesh_lam_half = _MeshData(f, lam, d, max(res // 2, 2))

    def _pv(self, sites, meshes, chis, rho, w, phi_lam):
        phi_rho = np.stack(
            [m.phi(self.d, sites, scale=c) for m, c in zip(meshes, chis)]
        )
        return w @ ((phi_rho - phi_lam[None, :]) / (rho[:, None] - self.lam))

    def values(self, sites, with_estimate: bool = True):
        """Boundary values at the given sites: (dict site -> value, estimate)."""
        d = self.d
        site_list = [_as_site(s, d) for s in sites]
        idx = np.asarray(site_list, dtype=int).reshape(-1, d)
        S = idx.astype(float)

        t1 = _grid_window(self._G, idx)
        phi_lam = self._mesh_lam.phi(d, S)
        pv = self._pv(S, self._meshes, self._chi_rho, self._rho, self._w, phi_lam)
        vals = t1 + pv / (2 * np.pi) + self.bv.side * 0.5j * phi_lam

        est = 0.0
        if with_estimate:
            sl = tuple(slice(None, None, 2) for _ in range(d))
            t1h = _grid_window(self._G[sl], idx)
            pv_h = self._pv(
                S, self._meshes_h, self._chi_rho_h, self._rho_h, self._w_h, phi_lam
            )
            phi_lam_h = self._mesh_lam_half.phi(d, S)
            est = float(
                np.max(np.abs(t1 - t1h))
                + np.max(np.abs(pv - pv_h)) / (2 * np.pi)
                + 0.5 * np.max(np.abs(phi_lam - phi_lam_h))
            )
        out = {s: complex(v) for s, v in zip(site_list, vals)}
        return out, est


def surface_integral_phi(
    f: CompactLatticeFunction,
    xi,
    rho: float,
    lam: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> complex:
    """Phi(xi, rho): the cutoff surface integral over the level set at rho.

    `lam` centres the cutoff chi (defaults to rho itself, which makes the
    cutoff equal to 1 on the surface).  For d = 1 the level set is a pair
    of points and the integral degenerates to the corresponding two-term
    sum weighted by 1/(2 |sin k|).
    """
    d = f.d
    if not is_regular(rho, d):
        raise ValueError(f"rho={rho} is not a regular spectral value for d={d}")
    lam = rho if lam is None else float(lam)
    cfg = (cfg or QuadratureConfig()).resolved(d, lam)
    if abs(rho - lam) >= cfg.delta:
        return 0j
    scale = float(bump_indicator((rho - lam) / cfg.delta))
    md = _MeshData(f, rho, d, cfg.surface_resolution)
    xi_arr = np.asarray(_as_site(xi, d), dtype=float).reshape(1, d)
    return complex(md.phi(d, xi_arr, scale=scale)[0])


def lap_apply(
    f: CompactLatticeFunction,
    bv: BoundaryValue,
    xi,
    cfg: QuadratureConfig | None = None,
) -> ResolventValue:
    """Pointwise boundary value (R_{lam + side * i0} f)(xi)."""
    plan = LapPlan(f, bv, cfg)
    out, est = plan.values([xi])
    site = _as_site(xi, f.d)
    return ResolventValue(site=site, value=out[site], error_estimate=est)


def lap_apply_window(
    f: CompactLatticeFunction,
    bv: BoundaryValue,
    sites,
    cfg: QuadratureConfig | None = None,
):
    """Boundary values on a whole site collection from one shared plan.

    Returns (dict site -> complex, shared error estimate).
    """
    return LapPlan(f, bv, cfg).values(sites)


def fundamental_solution(
    bv: BoundaryValue, xi, cfg: QuadratureConfig | None = None, d: int | None = None
) -> ResolventValue:
    """E_side(xi): the boundary value applied to the point mass at the origin."""
    if d is None:
        d = len(_as_site(xi))
    return lap_apply(delta(d), bv, xi, cfg)


# ----------------------------------------------------------------------
# eps-ladder oracle
# ----------------------------------------------------------------------


def _ladder_orders(d: int, eps: np.ndarray, base: int, xi_norm: int) -> list[int]:
    cap = _LADDER_CAP[min(d, 3)]
    floor = max(_LADDER_FLOOR[min(d, 3)], base)
    out = []
    for e in eps:
        want = int(2 * xi_norm + 48 * np.sqrt(d) / e)
        n = next_fast_len(int(np.clip(want, floor, cap)))
        out.append(n + (n % 2))
    return out


def _extrapolate_ladder(eps, vals, ests, d: int, degree: int, lam: float):
    """Divergence check + degree-limited Neville for one site's ladder."""
    sane = (np.abs(vals) > 0) & (ests < 0.1 * np.maximum(np.abs(vals), 1e-30))
    mags = np.abs(vals[sane])
    if len(mags) >= 3:
        if mags[-1] > 1.05 * mags[-2] and mags[-2] > 1.05 * mags[-3]:
            raise LadderDivergenceError(
                f"resolvent ladder diverges at lam={lam} (|values| "
                f"{mags[-3]:.4g} -> {mags[-2]:.4g} -> {mags[-1]:.4g})",
                ladder=list(zip(eps.tolist(), vals.tolist())),
            )
    tol_rung = 3e-6 if d <= 2 else 2e-4
    keep = np.where(ests <= tol_rung)[0]
    if len(keep) < 2:
        keep = np.argsort(ests)[: degree + 1]
    keep = np.sort(keep)[-(degree + 1) :]
    value, diff = neville_at_zero(eps[keep], vals[keep])
    return value, abs(diff) + float(np.max(ests[keep]))


def eta_extrapolate_window(
    f: CompactLatticeFunction,
    lam: float,
    side: int,
    sites,
    cfg: QuadratureConfig | None = None,
    eps0: float = 0.2,
    halvings: int = 8,
    degree: int = 3,
) -> dict[Site, ResolventValue]:
    """`eta_extrapolate` over many sites, sharing one FFT grid per rung."""
    d = f.d
    if side not in (+1, -1):
        raise ValueError("side must be +1 or -1")
    if abs(lam) > 2 * d:
        raise EtaOnSpectrumError("lam must lie on the spectrum for the ladder oracle")
    cfg = (cfg or QuadratureConfig()).resolved(d)
    site_list = [_as_site(s, d) for s in sites]
    xi_norm = max(max(abs(c) for c in s) for s in site_list)

    eps = eps0 / 2.0 ** np.arange(halvings + 1)
    orders = _ladder_orders(d, eps, cfg.torus_order, xi_norm)
    vals = {s: [] for s in site_list}
    ests = {s: [] for s in site_list}
    for e, n in zip(eps, orders):
        full, half = resolvent_offspectrum_window(
            f, lam + 1j * side * e, site_list, cfg, order=n, with_half_order=True
        )
        for s in site_list:
            vals[s].append(full[s])
            ests[s].append(abs(full[s] - half[s]))
    out = {}
    for s in site_list:
        value, est = _extrapolate_ladder(
            eps, np.asarray(vals[s]), np.asarray(ests[s]), d, degree, lam
        )
        out[s] = ResolventValue(site=s, value=value, error_estimate=est)
    return out


def eta_extrapolate(
    f: CompactLatticeFunction,
    lam: float,
    side: int,
    xi,
    cfg: QuadratureConfig | None = None,
    eps0: float = 0.2,
    halvings: int = 8,
    degree: int = 3,
) -> ResolventValue:
    """Boundary value as the extrapolated limit of R(lam + side * i * eps).

    Evaluates the off-spectrum resolvent along the geometric ladder
    eps = eps0 / 2^j, j = 0..halvings, and extrapolates polynomially
    (degree 3 by default) to eps = 0; for regular lam the boundary value is
    analytic in eps at 0, so the ladder converges geometrically.  Rungs are
    computed at a torus order that grows as eps shrinks (capped per
    dimension); rungs whose half-order comparison flags quadrature loss are
    dropped before extrapolation, and the reported error estimate combines
    the extrapolation spread with the kept rungs' quadrature estimates.

    Growth of the ladder (last three reliable magnitudes increasing by more
    than 5%) raises LadderDivergenceError; that is the expected outcome at
    exceptional spectral values.

    This routine is deliberately independent of `lap_apply`: no cutoff, no
    surface mesh, no principal value.
    """
    xi = _as_site(xi, f.d)
    return eta_extrapolate_window(f, lam, side, [xi], cfg, eps0, halvings, degree)[xi]


def log_coefficient_estimate(
    xi,
    cfg: QuadratureConfig | None = None,
    side: int = +1,
    eps0: float = 0.3,
    rungs: int = 8,
    residual_tol: float = 0.05,
) -> complex:
    """Fitted slope of R(i * side * eps) delta_0 at xi against ln eps (d = 2).

    At the band centre of the planar lattice the resolvent diverges
    logarithmically; the coefficient alternates with the site parity and
    vanishes at odd-parity sites.  The fit uses the basis
    {1, ln eps, eps ln eps, eps} so the slowly decaying corrections do not
    pollute the slope.  Raises if the fit residual exceeds `residual_tol`
    relative to the data scale.
    """
    xi = _as_site(xi, 2)
    f = delta(2)
    cfg = (cfg or QuadratureConfig()).resolved(2)
    eps = eps0 / 2.0 ** np.arange(rungs)
    vals = []
    for e in eps:
        n = next_fast_len(int(np.clip(40 / e, 256, 4096)))
        n += n % 2
        w = resolvent_offspectrum_window(f, 1j * side * e, [xi], cfg, order=n)
        vals.append(w[xi])
    vals = np.asarray(vals)
    A = np.stack([np.ones_like(eps), np.log(eps), eps * np.log(eps), eps], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    resid = np.abs(A @ coef - vals).max()
    scale = max(np.abs(vals).max(), 1e-12)
    if resid > residual_tol * scale:
        raise RuntimeError(
            f"log-slope fit residual {resid:.2e} too large relative to {scale:.2e}"
        )
    return complex(coef[1])
