"""Stationary-phase far fields and discrete radiation conditions.

Away from singular directions, the outgoing/incoming boundary-value
solutions behave along a lattice ray of direction omega like a finite sum of
waves,

    psi(x) ~ sum_s a_s exp(+- i mu_s |x|) / |x|^((d-1)/2),

one wave per surface point k_s whose oriented normal matches omega, with
radial wavenumber mu_s = k_s . omega and amplitude

    a_s = sqrt(2 pi) fhat(k_s) exp(i (sigma_s + 2) pi / 4)
          / (sqrt(|K_s|) |grad phi(k_s)|).

Each wave also satisfies the discrete radiation conditions
psi(x + e_j) = exp(+- i k_j) psi(x) + O(|x|^(-(d+1)/2)).  This module
builds the expansions, evaluates them, measures shift residuals and decay
exponents, and fits wavenumbers from sampled values (including the
multi-wave case, where several distinct mu produce beats along a ray).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .dispersion import K_TOL, StationaryPoint, stationary_points
from .lattice import CompactLatticeFunction, Site, _as_site, fourier_transform

__all__ = [
    "VanishingCurvatureError",
    "DirectionOutsideDomainError",
    "MultiWaveDirectionError",
    "FarFieldExpansion",
    "amplitude",
    "build_expansion",
    "asymptotic_eval",
    "radiation_residual",
    "farfield_decay_fit",
    "local_wavenumber",
    "ray_sites",
    "fit_wavenumbers",
    "write_comparison_csv",
]


class VanishingCurvatureError(ValueError):
    """Amplitude undefined where the total curvature vanishes."""


class DirectionOutsideDomainError(ValueError):
    """Evaluation direction does not match the expansion's direction."""


class MultiWaveDirectionError(ValueError):
    """Several waves overlap along this direction; a decomposed input is
    required for per-wave shift residuals."""


def amplitude(f: CompactLatticeFunction, sp: StationaryPoint, side: int = +1) -> complex:
    """Stationary-phase amplitude of the wave carried by `sp`.

    Side +1 returns a, side -1 its complex conjugate (the incoming field of
    a real source is the mirror of the outgoing one).
    """
    if abs(sp.curvature) < K_TOL:
        raise VanishingCurvatureError(
            f"total curvature {sp.curvature:.2e} below tolerance at k={sp.k}"
        )
    fk = fourier_transform(f, np.asarray(sp.k))
    a = (
        math.sqrt(2 * math.pi)
        * fk
        * np.exp(1j * (sp.signature + 2) * math.pi / 4)
        / (math.sqrt(abs(sp.curvature)) * sp.grad_norm)
    )
    return complex(a) if side > 0 else complex(np.conj(a))


@dataclass
class FarFieldExpansion:
    """Finite-wave expansion of one boundary-value solution along a direction.

    `terms` holds (mu_s, amplitude) pairs, already conjugated for the minus
    side; `order_constant` is an observed bound on the scaled remainder
    |x|^((d+1)/2) |psi - expansion|, filled by comparisons against computed
    solutions.
    """

    d: int
    direction: tuple[float, ...]
    lam: float
    side: int
    terms: list[tuple[float, complex]] = field(default_factory=list)
    points: list[StationaryPoint] = field(default_factory=list)
    order_constant: float | None = None

    @property
    def wave_count(self) -> int:
        return len(self.terms)


def build_expansion(
    f: CompactLatticeFunction,
    omega,
    lam: float,
    side: int = +1,
) -> FarFieldExpansion:
    """Expansion of the boundary-value solution for source f along omega."""
    omega = np.asarray(omega, dtype=float)
    pts = stationary_points(omega, lam, include_singular=True, warn=False)
    if any(abs(p.curvature) < K_TOL for p in pts):
        raise VanishingCurvatureError(
            "direction is singular: a matched surface point has vanishing curvature"
        )
    terms = [(p.mu, amplitude(f, p, side)) for p in pts]
    return FarFieldExpansion(
        d=f.d,
        direction=tuple(float(x) for x in omega),
        lam=float(lam),
        side=int(side),
        terms=terms,
        points=pts,
    )


def asymptotic_eval(exp: FarFieldExpansion, xi, dir_tol: float = 1e-9) -> complex:
    """Evaluate the m-term wave sum at a lattice site (no remainder)."""
    xi = np.asarray(_as_site(xi, exp.d), dtype=float)
    r = float(np.linalg.norm(xi))
    if r == 0:
        raise DirectionOutsideDomainError("cannot evaluate the expansion at the origin")
    omega = xi / r
    if np.max(np.abs(omega - np.asarray(exp.direction))) > dir_tol:
        raise DirectionOutsideDomainError(
            f"site direction {tuple(np.round(omega, 6))} is not the expansion "
            f"direction {tuple(np.round(exp.direction, 6))}"
        )
    total = 0j
    for mu, a in exp.terms:
        total += a * np.exp(1j * exp.side * mu * r)
    return complex(total / r ** ((exp.d - 1) / 2))


def _getter(psi):
    if callable(psi):
        return psi
    return lambda s: complex(psi.get(s, 0j))


def radiation_residual(
    psi,
    sp: StationaryPoint,
    xi,
    side: int = +1,
    decomposed: bool = False,
) -> np.ndarray:
    """Shift residuals psi(x + e_j) - exp(side * i k_j) psi(x), j = 1..d.

    For a single-wave direction these decay one power of |x| faster than
    psi itself.  When several waves overlap (wave count > 1) the residual of
    the undecomposed field does not decay; pass `decomposed=True` only when
    psi is already a single-wave component.
    """
    d = len(sp.k)
    xi = _as_site(xi, d)
    if not decomposed:
        r = np.linalg.norm(xi)
        omega = np.asarray(xi, dtype=float) / r
        others = stationary_points(omega, sp.lam, include_singular=True, warn=False)
        if len(others) > 1:
            raise MultiWaveDirectionError(
                f"{len(others)} waves overlap along {tuple(np.round(omega, 4))}; "
                "per-wave residuals need a decomposed input"
            )
    g = _getter(psi)
    out = np.zeros(d, dtype=complex)
    for j in range(d):
        step = xi[:j] + (xi[j] + 1,) + xi[j + 1 :]
        out[j] = g(step) - np.exp(1j * side * sp.k[j]) * g(xi)
    return out


def ray_sites(omega, radii) -> list[Site]:
    """Nearest lattice sites to r * omega, deduplicated, radius order."""
    omega = np.asarray(omega, dtype=float)
    seen = []
    for r in radii:
        s = tuple(int(round(c)) for c in r * omega)
        if s not in seen and any(s):
            seen.append(s)
    return seen


def farfield_decay_fit(psi, omega, radii) -> tuple[float, float]:
    """Least-squares slope of log |psi| against log |x| along a lattice ray.

    Returns (slope, rms residual of the fit).  Vanishing samples are skipped
    with a warning; if fewer than two usable samples remain the slope is the
    sentinel -inf (the compactly-supported case).
    """
    radii = list(radii)
    if len(radii) < 4:
        raise ValueError("need at least 4 radii")
    g = _getter(psi)
    xs, ys = [], []
    for s in ray_sites(omega, radii):
        v = abs(g(s))
        if v == 0.0:
            warnings.warn(f"skipping vanishing sample at {s}")
            continue
        xs.append(math.log(float(np.linalg.norm(s))))
        ys.append(math.log(v))
    if len(xs) < 2:
        return float("-inf"), 0.0
    A = np.stack([np.ones(len(xs)), np.asarray(xs)], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - ys) ** 2)))
    return float(coef[1]), resid


def local_wavenumber(psi, sites, j: int = 1) -> tuple[float, float]:
    """Circular mean and spread of arg(psi(x + e_j) / psi(x)) over sites."""
    g = _getter(psi)
    phases = []
    for s in sites:
        jj = j - 1
        step = s[:jj] + (s[jj] + 1,) + s[jj + 1 :]
        num, den = g(step), g(s)
        if num == 0 or den == 0:
            continue
        phases.append(num / den / abs(num / den))
    if not phases:
        raise ValueError("no usable sites for the wavenumber fit")
    z = np.mean(phases)
    spread = float(np.sqrt(max(0.0, -2.0 * math.log(max(abs(z), 1e-300)))))
    return float(np.angle(z)), spread


def _varpro_amps(thetas, t, s):
    M = np.exp(1j * np.outer(t, thetas))
    amps, *_ = np.linalg.lstsq(M, s, rcond=None)
    return amps, M


def fit_wavenumbers(values, radii, n_freq: int, d: int, init=None):
    """Fit `n_freq` complex exponentials to uniformly spaced ray samples.

    `values` are psi at consecutive steps of a lattice ray and `radii` the
    matching |x|; the samples are rescaled by |x|^((d-1)/2) so the model is
    s_t = sum_m c_m exp(i theta_m t) with t the step index.  Returns
    (thetas, amps, rms residual); thetas are phases per step in (-pi, pi],
    sorted by descending |amp| (a wavenumber mu along a ray of step length
    h appears as theta = mu h modulo 2 pi).  Starting phases come from a
    zero-padded periodogram unless `init` is given.
    """
    vals = np.asarray(values, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    t = np.arange(len(vals), dtype=float)
    s = vals * radii ** ((d - 1) / 2)
    if init is None:
        pad = 4096
        spec = np.abs(np.fft.fft(s * np.hanning(len(s)), pad))
        order = np.argsort(spec)[::-1]
        picked = []
        for idx in order:
            th = 2 * np.pi * idx / pad
            th = (th + np.pi) % (2 * np.pi) - np.pi
            if all(
                min(abs(th - p), 2 * np.pi - abs(th - p)) > 0.2 for p in picked
            ):
                picked.append(th)
            if len(picked) == n_freq:
                break
        init = picked
    th0 = np.asarray(init, dtype=float)

    def resid(th):
        amps, M = _varpro_amps(th, t, s)
        r = M @ amps - s
        return np.concatenate([r.real, r.imag])

    sol = least_squares(resid, th0, method="lm", max_nfev=400)
    thetas = (sol.x + np.pi) % (2 * np.pi) - np.pi
    amps, M = _varpro_amps(thetas, t, s)
    rms = float(np.sqrt(np.mean(np.abs(M @ amps - s) ** 2)))
    order = np.argsort(-np.abs(amps))
    return thetas[order], amps[order], rms


def write_comparison_csv(path, entries) -> None:
    """Far-field report rows: |x|, computed and predicted parts, scaled gap.

    `entries` yields (site, computed, predicted, d) tuples; the scaled
    residual column is |computed - predicted| * |x|^((d+1)/2).
    """
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(
            ["abs_xi", "re_computed", "im_computed", "re_predicted", "im_predicted",
             "scaled_residual"]
        )
        for site, comp, pred, d in entries:
            r = float(np.linalg.norm(site))
            gap = abs(comp - pred) * r ** ((d + 1) / 2)
            wr.writerow(
                [f"{r:.12g}", f"{comp.real:.12g}", f"{comp.imag:.12g}",
                 f"{pred.real:.12g}", f"{pred.imag:.12g}", f"{gap:.12g}"]
            )
