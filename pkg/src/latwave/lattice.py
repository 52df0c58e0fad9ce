"""Exact arithmetic on the integer lattice Z^d.

The central object is a finitely supported complex-valued function on Z^d,
stored as a sparse map from integer sites to values.  On top of it sit the
difference Laplacian

    (lap f)(x) = sum of f over the 2d nearest neighbours of x,

the forward difference derivative, the (2 pi)^(-d/2)-normalised Fourier
transform (a finite trigonometric sum, hence entire and 2 pi periodic), the
discrete Green identity on cubes, and radial shell statistics.  Everything in
this module is exact up to floating point rounding: no quadrature happens
here.

All functions are pure and all values are immutable by convention, so they
are safe to share between threads.
"""

from __future__ import annotations

import json
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

Site = tuple[int, ...]

__all__ = [
    "Site",
    "CompactLatticeFunction",
    "BoxRegion",
    "delta",
    "apply_laplacian",
    "apply_schrodinger",
    "difference_derivative",
    "fourier_transform",
    "green_identity_residual",
    "shell_average",
    "box_sites",
    "boundary_sites",
    "shell_sites",
]


def _as_site(x: Iterable[int] | int, d: int | None = None) -> Site:
    if isinstance(x, (int, np.integer)):
        x = (int(x),)
    site = tuple(int(c) for c in x)
    if d is not None and len(site) != d:
        raise ValueError(f"site {site} does not have dimension {d}")
    return site


class CompactLatticeFunction:
    """Finitely supported map Z^d -> C.  Absent sites read as 0.

    Instances are treated as immutable values: all arithmetic returns new
    objects and the entry map is never mutated after construction.
    """

    __slots__ = ("d", "_entries")

    def __init__(self, d: int, entries: Mapping[Site, complex] | None = None):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = int(d)
        ent: dict[Site, complex] = {}
        if entries:
            for site, val in entries.items():
                site = _as_site(site, self.d)
                val = complex(val)
                if val != 0:
                    ent[site] = val
        self._entries = ent

    # -- basic container behaviour -------------------------------------

    def __getitem__(self, site) -> complex:
        return self._entries.get(_as_site(site, self.d), 0j)

    def __iter__(self) -> Iterator[Site]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def support(self) -> list[Site]:
        return sorted(self._entries)

    def support_radius(self) -> int:
        """Smallest r with supp(f) contained in the cube [-r, r]^d."""
        if not self._entries:
            return 0
        return max(max(abs(c) for c in site) for site in self._entries)

    # -- algebra --------------------------------------------------------

    def _check_dim(self, other: "CompactLatticeFunction") -> None:
        if self.d != other.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")

    def __add__(self, other: "CompactLatticeFunction") -> "CompactLatticeFunction":
        self._check_dim(other)
        ent = dict(self._entries)
        for s, v in other._entries.items():
            ent[s] = ent.get(s, 0j) + v
        return CompactLatticeFunction(self.d, ent)

    def __sub__(self, other: "CompactLatticeFunction") -> "CompactLatticeFunction":
        return self + (-1) * other

    def __rmul__(self, c) -> "CompactLatticeFunction":
        c = complex(c)
        return CompactLatticeFunction(self.d, {s: c * v for s, v in self._entries.items()})

    def __mul__(self, c) -> "CompactLatticeFunction":
        return self.__rmul__(c)

    def multiply(self, other: "CompactLatticeFunction") -> "CompactLatticeFunction":
        """Pointwise product; used for potentials acting by multiplication."""
        self._check_dim(other)
        common = self._entries.keys() & other._entries.keys()
        return CompactLatticeFunction(self.d, {s: self._entries[s] * other._entries[s] for s in common})

    def conjugate(self) -> "CompactLatticeFunction":
        return CompactLatticeFunction(self.d, {s: np.conj(v) for s, v in self._entries.items()})

    def shift(self, site) -> "CompactLatticeFunction":
        """Translate: (shift_a f)(x) = f(x - a)."""
        a = _as_site(site, self.d)
        return CompactLatticeFunction(
            self.d, {tuple(s + t for s, t in zip(sit, a)): v for sit, v in self._entries.items()}
        )

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(v.imag) <= tol for v in self._entries.values())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CompactLatticeFunction)
            and self.d == other.d
            and self._entries == other._entries
        )

    def __repr__(self) -> str:
        return f"CompactLatticeFunction(d={self.d}, support={len(self)} sites)"

    # -- serialisation ---------------------------------------------------

    def to_json(self) -> str:
        entries = [
            {"site": list(site), "re": float(v.real), "im": float(v.imag)}
            for site, v in sorted(self._entries.items())
        ]
        return json.dumps({"d": self.d, "entries": entries})

    @staticmethod
    def from_json(text: str) -> "CompactLatticeFunction":
        obj = json.loads(text)
        d = int(obj["d"])
        ent: dict[Site, complex] = {}
        for rec in obj["entries"]:
            site = _as_site(rec["site"], d)
            if site in ent:
                raise ValueError(f"duplicate site {site} in lattice-function JSON")
            ent[site] = complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0)))
        return CompactLatticeFunction(d, ent)


class BoxRegion:
    """The cube [-r, r]^d of Z^d; it contains (2r+1)^d sites."""

    __slots__ = ("r",)

    def __init__(self, r: int):
        if r < 1:
            raise ValueError("box radius must be >= 1")
        self.r = int(r)

    def site_count(self, d: int) -> int:
        return (2 * self.r + 1) ** d

    def __repr__(self) -> str:
        return f"BoxRegion(r={self.r})"


def delta(d: int, site=None) -> CompactLatticeFunction:
    """Point mass at the given site (origin by default)."""
    site = (0,) * d if site is None else _as_site(site, d)
    return CompactLatticeFunction(d, {site: 1.0 + 0j})


def _neighbors(site: Site):
    for j in range(len(site)):
        for sgn in (1, -1):
            yield site[:j] + (site[j] + sgn,) + site[j + 1 :]


def apply_laplacian(f: CompactLatticeFunction) -> CompactLatticeFunction:
    """(lap f)(x) = sum of f over the 2d nearest neighbours of x."""
    ent: dict[Site, complex] = {}
    for site, v in f.items():
        for nb in _neighbors(site):
            ent[nb] = ent.get(nb, 0j) + v
    return CompactLatticeFunction(f.d, ent)


def apply_schrodinger(
    f: CompactLatticeFunction, q: CompactLatticeFunction, lam: complex
) -> CompactLatticeFunction:
    """Apply lap + q - lam to f, with q acting by pointwise multiplication."""
    if f.d != q.d:
        raise ValueError(f"dimension mismatch: f has d={f.d}, q has d={q.d}")
    return apply_laplacian(f) + q.multiply(f) + (-complex(lam)) * f


def difference_derivative(f: CompactLatticeFunction, j: int) -> CompactLatticeFunction:
    """Forward difference along coordinate j (1-based): f(x + e_j) - f(x)."""
    if not 1 <= j <= f.d:
        raise IndexError(f"coordinate index {j} out of range 1..{f.d}")
    jj = j - 1
    ent: dict[Site, complex] = {}
    for site, v in f.items():
        back = site[:jj] + (site[jj] - 1,) + site[jj + 1 :]
        ent[back] = ent.get(back, 0j) + v
        ent[site] = ent.get(site, 0j) - v
    return CompactLatticeFunction(f.d, ent)


def fourier_transform(f: CompactLatticeFunction, k) -> complex | np.ndarray:
    """fhat(k) = (2 pi)^(-d/2) * sum_x f(x) exp(-i k.x).

    `k` may be a single point of shape (d,) or a batch of shape (..., d);
    the result matches the leading shape.
    """
    k = np.asarray(k, dtype=float)
    if k.shape[-1] != f.d:
        raise ValueError(f"k has dimension {k.shape[-1]}, expected {f.d}")
    out = np.zeros(k.shape[:-1], dtype=complex)
    for site, v in f.items():
        out = out + v * np.exp(-1j * (k @ np.asarray(site, dtype=float)))
    out = out * (2 * np.pi) ** (-f.d / 2)
    return complex(out) if out.ndim == 0 else out


def box_sites(r: int, d: int) -> list[Site]:
    """All sites of the cube [-r, r]^d."""
    axes = [np.arange(-r, r + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return [tuple(int(c) for c in row) for row in grid]


def boundary_sites(r: int, d: int) -> list[Site]:
    return [s for s in box_sites(r, d) if max(abs(c) for c in s) == r]


def shell_sites(R: int, d: int) -> list[Site]:
    """Sites of B_{2R} \\ B_R (sup-norm annulus)."""
    return [s for s in box_sites(2 * R, d) if max(abs(c) for c in s) > R]


def _value_getter(psi) -> Callable[[Site], complex]:
    if isinstance(psi, CompactLatticeFunction):
        return psi.__getitem__
    if isinstance(psi, Mapping):
        return lambda s: complex(psi.get(s, 0j))
    if callable(psi):
        return psi
    raise TypeError("expected CompactLatticeFunction, mapping, or callable")


def green_identity_residual(psi, E, r: BoxRegion | int, d: int | None = None) -> complex:
    """Residual of the discrete Green identity on the cube [-r, r]^d.

    Returns  sum_{B_r} (lap(psi) E - psi lap(E))
           - sum_{boundary} (psi' E - psi E'),
    where u'(x) = u(x + e) and e runs over the outward unit normals of every
    face containing x (corner sites contribute one term per face).  The
    identity is exact, so the residual is 0 up to rounding for any pair of
    functions defined on B_{r+1}.
    """
    if isinstance(r, BoxRegion):
        r = r.r
    if d is None:
        if isinstance(psi, CompactLatticeFunction):
            d = psi.d
        else:
            raise ValueError("dimension required for non-CompactLatticeFunction input")
    pv = _value_getter(psi)
    ev = _value_getter(E)

    interior = 0j
    for site in box_sites(r, d):
        lap_p = sum(pv(nb) for nb in _neighbors(site))
        lap_e = sum(ev(nb) for nb in _neighbors(site))
        interior += lap_p * ev(site) - pv(site) * lap_e

    flux = 0j
    for site in boundary_sites(r, d):
        for j, c in enumerate(site):
            if abs(c) == r:
                out = site[:j] + (c + (1 if c > 0 else -1),) + site[j + 1 :]
                flux += pv(out) * ev(site) - pv(site) * ev(out)
    return interior - flux


def shell_average(psi, R: int, d: int | None = None) -> float:
    """(1/R) * sum over B_{2R} \\ B_R of |psi|^2; nonnegative."""
    if R < 1:
        raise ValueError("R must be >= 1")
    if d is None:
        if isinstance(psi, CompactLatticeFunction):
            d = psi.d
        else:
            raise ValueError("dimension required for non-CompactLatticeFunction input")
    pv = _value_getter(psi)
    total = sum(abs(pv(s)) ** 2 for s in shell_sites(R, d))
    return float(total) / R
