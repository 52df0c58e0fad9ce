"""Geometry of the lattice symbol and its level surfaces.

The difference Laplacian acts in Fourier space as multiplication by

    phi(k) = 2 (cos k_1 + ... + cos k_d),        k in T^d,

so its spectrum is [-2d, 2d] and the role of the sphere |k| = sqrt(lam) from
the continuum is played by the level surface Gamma(lam) = {phi = lam}.  This
module provides:

* the exceptional set of spectral parameters where the surface is critical
  (the boundary-value limits of the resolvent fail exactly there),
* location of the finitely many surface points whose oriented normal matches
  a given unit direction (the carriers of outgoing/incoming waves), via a
  sign-pattern reduction to scalar root finding,
* total curvature (closed form and projected-Hessian route), signature,
  convexity scans, and singular-direction detection,
* overlapping graph-patch meshes of Gamma(lam) carrying smooth
  partition-of-unity quadrature weights for surface integrals of the form
  integral of g / |grad phi| ds, and
* CSV / SVG exports of meshes and level curves.

Torus points are reduced to the cube [-pi, pi)^d when lam >= 0 and to
[0, 2 pi)^d when lam < 0; all reported coordinates follow that convention.
"""

from __future__ import annotations

import csv
import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .quadrature import smooth_step

__all__ = [
    "K_TOL",
    "GradientVanishesError",
    "DegeneratePointError",
    "SingularContactWarning",
    "StationaryPoint",
    "MeshPatch",
    "SurfaceMesh",
    "symbol",
    "symbol_value",
    "exceptional_set",
    "exceptional_set_contains",
    "is_regular",
    "cube_start",
    "reduce_to_cube",
    "stationary_points",
    "total_curvature",
    "principal_curvatures",
    "signature",
    "surface_mesh",
    "convexity_scan",
    "singular_direction_check",
    "mesh_to_csv",
    "level_polylines",
    "polylines_to_svg",
]

K_TOL = 1e-9  # total curvatures below this mark a singular contact


class GradientVanishesError(ValueError):
    """Raised where grad phi = 0 and surface geometry is undefined."""


class DegeneratePointError(ValueError):
    """Raised when a principal curvature sits at 0 within tolerance."""


class SingularContactWarning(UserWarning):
    """Emitted when a direction touches the surface at vanishing curvature."""


# ----------------------------------------------------------------------
# symbol and exceptional set
# ----------------------------------------------------------------------


def symbol(k):
    """Value, gradient and Hessian of phi at a single torus point.

    phi(k) = 2 sum cos k_j, grad phi = -2 (sin k_1, ..., sin k_d),
    Hess phi = diag(-2 cos k_j).
    """
    k = np.asarray(k, dtype=float)
    value = 2.0 * float(np.sum(np.cos(k)))
    grad = -2.0 * np.sin(k)
    hess = np.diag(-2.0 * np.cos(k))
    return value, grad, hess


def symbol_value(k):
    """phi on an array of points of shape (..., d)."""
    return 2.0 * np.sum(np.cos(np.asarray(k, dtype=float)), axis=-1)


def exceptional_set(d: int) -> list[float]:
    """Critical values of phi: +-4n (d even) or +-2(2n+1) (d odd), 2n <= d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    vals: set[float] = set()
    for n in range(0, d // 2 + 1):
        v = 4.0 * n if d % 2 == 0 else 2.0 * (2 * n + 1)
        if abs(v) <= 2 * d:
            vals.add(v)
            vals.add(-v)
    return sorted(vals)


def exceptional_set_contains(lam: float, d: int, tol: float = 1e-9) -> bool:
    return any(abs(lam - s) <= tol for s in exceptional_set(d))


def is_regular(lam: float, d: int, tol: float = 1e-9) -> bool:
    """True iff lam lies on the spectrum but off the exceptional set."""
    return abs(lam) <= 2 * d and not exceptional_set_contains(lam, d, tol)


def cube_start(lam: float) -> float:
    """Left endpoint of the fundamental cube: -pi for lam >= 0, 0 for lam < 0."""
    return -np.pi if lam >= 0 else 0.0


def reduce_to_cube(k, lam: float) -> np.ndarray:
    start = cube_start(lam)
    return np.mod(np.asarray(k, dtype=float) - start, 2.0 * np.pi) + start


# ----------------------------------------------------------------------
# curvature
# ----------------------------------------------------------------------


def _sin2_and_cos(k):
    k = np.atleast_2d(np.asarray(k, dtype=float))
    return np.sin(k) ** 2, np.cos(k)


def total_curvature(k) -> float | np.ndarray:
    """Total curvature of the level surface through k (closed form).

    K = [sum_j sin^2 k_j * prod_{m != j} cos k_m] / (sum_j sin^2 k_j)^((d+1)/2),
    the product of the principal curvatures taken with respect to the normal
    grad phi.  Accepts a single point (d,) or a batch (..., d).
    """
    karr = np.asarray(k, dtype=float)
    single = karr.ndim == 1
    s2, c = _sin2_and_cos(karr.reshape(-1, karr.shape[-1]))
    d = s2.shape[1]
    denom = np.sum(s2, axis=1)
    if single and denom[0] <= 1e-28:
        raise GradientVanishesError("grad phi vanishes; curvature undefined")
    num = np.zeros_like(denom)
    for j in range(d):
        others = [m for m in range(d) if m != j]
        num += s2[:, j] * (np.prod(c[:, others], axis=1) if others else 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = num / denom ** ((d + 1) / 2.0)
    if single:
        return float(K[0])
    return K.reshape(karr.shape[:-1])


def principal_curvatures(k) -> np.ndarray:
    """Eigenvalues of the second fundamental form at k, w.r.t. n = grad phi.

    Computed as the spectrum of -Hess(phi) restricted to the tangent plane
    and divided by |grad phi|; independent of the closed form used by
    :func:`total_curvature`, which it must reproduce as a product.
    """
    value, grad, hess = symbol(k)
    g = float(np.linalg.norm(grad))
    if g <= 1e-14:
        raise GradientVanishesError("grad phi vanishes; curvature undefined")
    d = len(grad)
    if d == 1:
        return np.zeros(0)
    nu = grad / g
    # orthonormal tangent basis: columns of Q orthogonal to nu
    q, _ = np.linalg.qr(np.column_stack([nu, np.eye(d)]))
    T = q[:, 1:d]
    M = -(T.T @ hess @ T) / g
    return np.sort(np.linalg.eigvalsh(M))


def signature(k, deg_tol: float = K_TOL) -> int:
    """Number of positive minus number of negative principal curvatures."""
    pc = principal_curvatures(k)
    small = np.abs(pc) < deg_tol
    if np.any(small):
        raise DegeneratePointError(f"principal curvature within {deg_tol} of 0 at k={k}")
    if np.any(np.abs(pc) < 10 * deg_tol):
        warnings.warn("near-degenerate principal curvature", SingularContactWarning)
    return int(np.sum(pc > 0) - np.sum(pc < 0))


# ----------------------------------------------------------------------
# stationary points
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class StationaryPoint:
    """A surface point whose oriented normal matches a unit direction.

    `k` solves phi(k) = lam with grad phi(k) = 2 kappa omega, kappa > 0;
    `mu` is the projection k . omega after reduction to the fundamental cube,
    `curvature` the total curvature, `signature` the curvature-sign count
    (None for singular contacts), and `sign_pattern` records the sign of
    cos k_j per coordinate.
    """

    k: tuple[float, ...]
    mu: float
    curvature: float
    signature: int | None
    sign_pattern: tuple[int, ...]
    kappa: float
    lam: float
    omega: tuple[float, ...]

    @property
    def grad_norm(self) -> float:
        return 2.0 * self.kappa


def _scalar_roots(signs, w2, target, kappa_max, scan_cells):
    """Roots of F(kappa) = sum_j s_j sqrt(1 - kappa^2 w2_j) - target on (0, kmax]."""
    signs = np.asarray(signs, dtype=float)

    def F(x):
        return float(signs @ np.sqrt(np.clip(1.0 - x * x * w2, 0.0, None)) - target)

    def dF(x):
        rad = np.sqrt(np.clip(1.0 - x * x * w2, 1e-300, None))
        return float(signs @ (-x * w2 / rad))

    grid = kappa_max * np.arange(1, scan_cells + 1) / scan_cells
    vals = np.array([F(x) for x in grid])
    roots: list[float] = []

    def refine(a, b):
        fa, fb = F(a), F(b)
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = F(m)
            if fa * fm <= 0:
                b, fb = m, fm
            else:
                a, fa = m, fm
            if b - a < 1e-13 * max(1.0, kappa_max):
                break
        x = 0.5 * (a + b)
        # Newton polish inside the bracket
        for _ in range(8):
            der = dF(x)
            if der == 0:
                break
            step = F(x) / der
            xn = x - step
            if not (a - 1e-12 <= xn <= b + 1e-12):
                break
            x = xn
            if abs(step) < 1e-15 * max(1.0, kappa_max):
                break
        return min(x, kappa_max)

    lo = 0.0
    flo = F(1e-14 * kappa_max)
    for x, fx in zip(grid, vals):
        if fx == 0.0:
            roots.append(float(x))
        elif flo != 0.0 and flo * fx < 0:
            roots.append(refine(max(lo, 1e-14 * kappa_max), x))
        lo, flo = x, fx

    # tangency sweep: interior minima of |F| that Newton can pull to a root
    absv = np.abs(vals)
    for i in range(1, scan_cells - 1):
        if absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1] and absv[i] < 0.05:
            x = float(grid[i])
            for _ in range(60):
                der = dF(x)
                if der == 0:
                    break
                x = x - F(x) / der
                if not 0 < x <= kappa_max:
                    break
            if 0 < x <= kappa_max and abs(F(x)) < 1e-11:
                roots.append(x)

    roots.sort()
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > 1e-11 * max(1.0, kappa_max):
            out.append(r)
    return out


def stationary_points(
    omega,
    lam: float,
    *,
    k_tol: float = K_TOL,
    dedup_tol: float = 1e-8,
    scan_cells: int = 512,
    include_singular: bool = False,
    warn: bool = True,
) -> list[StationaryPoint]:
    """All points of Gamma(lam) whose normal is a positive multiple of omega.

    The normal condition grad phi = 2 kappa omega with kappa > 0 forces
    sin k_j = -kappa omega_j, so cos k_j = s_j sqrt(1 - kappa^2 omega_j^2)
    for a sign pattern s in {+-1}^d, and the surface equation becomes a
    scalar root problem in kappa per pattern.  Coordinates with omega_j = 0
    branch exactly over k_j in {0, pi}.  Roots are located by a 512-cell
    bracketing scan plus bisection, then Newton-polished.

    Points with |total curvature| < k_tol are singular contacts: they are
    excluded from the returned list (unless ``include_singular``) and
    reported through :class:`SingularContactWarning`.
    """
    omega = np.asarray(omega, dtype=float)
    d = omega.size
    if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be a unit vector (within 1e-12)")
    if not is_regular(lam, d):
        raise ValueError(f"lambda={lam} is not a regular spectral value for d={d}")

    zero = np.abs(omega) < 1e-14
    J = np.where(~zero)[0]
    Z = np.where(zero)[0]
    w = omega[J]
    w2 = w ** 2
    kappa_max = 1.0 / np.max(np.abs(w))

    found: list[StationaryPoint] = []
    kept_k: list[np.ndarray] = []
    reduced_tau = 2.0 * np.pi

    for fixed in itertools.product((0.0, np.pi), repeat=len(Z)):
        target0 = lam / 2.0 - sum(np.cos(v) for v in fixed)
        for signs in itertools.product((1, -1), repeat=len(J)):
            for kappa in _scalar_roots(signs, w2, target0, kappa_max, scan_cells):
                k = np.zeros(d)
                c = np.sqrt(np.clip(1.0 - kappa * kappa * w2, 0.0, None))
                k[J] = np.arctan2(-kappa * w, np.asarray(signs, dtype=float) * c)
                k[Z] = fixed
                k = reduce_to_cube(k, lam)
                if abs(symbol_value(k) - lam) > 1e-10:
                    continue
                dup = False
                for kk in kept_k:
                    diff = np.abs(np.mod(k - kk + np.pi, reduced_tau) - np.pi)
                    if np.max(diff) < dedup_tol:
                        dup = True
                        break
                if dup:
                    continue
                kept_k.append(k)
                K = total_curvature(k)
                singular = abs(K) < k_tol
                if singular and warn:
                    warnings.warn(
                        f"direction touches the surface with |K|={abs(K):.2e} < {k_tol}"
                        f" at k={np.round(k, 6)}",
                        SingularContactWarning,
                    )
                if singular and not include_singular:
                    continue
                sig = None
                if not singular:
                    try:
                        sig = signature(k)
                    except DegeneratePointError:
                        sig = None
                pattern = tuple(
                    1 if np.cos(kj) >= 0 else -1 for kj in k
                )
                found.append(
                    StationaryPoint(
                        k=tuple(float(x) for x in k),
                        mu=float(k @ omega),
                        curvature=float(K),
                        signature=sig,
                        sign_pattern=pattern,
                        kappa=float(kappa),
                        lam=float(lam),
                        omega=tuple(float(x) for x in omega),
                    )
                )

    found.sort(key=lambda p: (p.mu, p.k))
    return found


def singular_direction_check(omega, lam: float, k_tol: float = K_TOL):
    """(is_singular, min |K|) over all stationary points of the direction.

    Runs the solver with the curvature filter disabled; the direction is
    singular iff some matched point has |K| < k_tol.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularContactWarning)
        pts = stationary_points(omega, lam, include_singular=True, warn=False)
    if not pts:
        return False, float("inf")
    m = min(abs(p.curvature) for p in pts)
    return m < k_tol, m


# ----------------------------------------------------------------------
# surface meshes
# ----------------------------------------------------------------------


@dataclass
class MeshPatch:
    """Graph patch k_axis = g(k') of one sheet of the surface.

    `quad_weight` integrates g/|grad phi| ds and equals
    pou * dk' / (2 |sin k_axis|); `measure_weight` integrates ds.
    """

    axis: int
    sheet: int
    nodes: np.ndarray  # (N, d)
    quad_weight: np.ndarray  # (N,)
    measure_weight: np.ndarray  # (N,)


@dataclass
class SurfaceMesh:
    d: int
    lam: float
    resolution: int
    patches: list[MeshPatch] = field(default_factory=list)
    covered: bool = True  # False if pou thresholds dropped genuine surface area

    def nodes(self) -> np.ndarray:
        if not self.patches:
            return np.zeros((0, self.d))
        return np.concatenate([p.nodes for p in self.patches], axis=0)

    def quad_weights(self) -> np.ndarray:
        if not self.patches:
            return np.zeros(0)
        return np.concatenate([p.quad_weight for p in self.patches])

    def total_measure(self) -> float:
        return float(sum(p.measure_weight.sum() for p in self.patches))

    def integrate_over_gradient(self, g) -> complex:
        """integral over Gamma of g(k)/|grad phi| ds for vectorised g."""
        total = 0j
        for p in self.patches:
            total += np.sum(np.asarray(g(p.nodes)) * p.quad_weight)
        return complex(total)


def _mesh_d1(lam: float, d: int) -> SurfaceMesh:
    a = float(np.arccos(np.clip(lam / 2.0, -1.0, 1.0)))
    pts = np.array([[a], [-a]]) if lam >= 0 else np.array([[a], [2 * np.pi - a]])
    s = np.abs(np.sin(pts[:, 0]))
    if np.any(s < 1e-13):
        raise ValueError("level set degenerate at a band edge")
    mesh = SurfaceMesh(d=1, lam=lam, resolution=2)
    mesh.patches.append(
        MeshPatch(
            axis=0,
            sheet=1,
            nodes=pts,
            quad_weight=1.0 / (2.0 * s),
            measure_weight=np.ones(2),
        )
    )
    return mesh


def surface_mesh(lam: float, d: int, resolution: int = 256) -> SurfaceMesh:
    """Overlapping graph-patch quadrature mesh of Gamma(lam).

    For each lifting coordinate j and sheet sign, the base region
    {k' : |lam/2 - sum_{m != j} cos k_m| <= 1} is sampled on a uniform grid
    and lifted through k_j = +-arccos(...).  A smooth partition of unity
    built on |sin k_j| (the fold indicator) assigns each surface point total
    weight one and kills the 1/|sin k_j| edge blowup, so every patch
    integrand is smooth and periodic on the base torus.

    Weights are quadrature-exact only for regular lam; at exceptional lam
    the mesh is still produced for display but `covered` may be False.
    """
    if abs(lam) > 2 * d:
        raise ValueError(f"|lambda| = {abs(lam)} exceeds 2d = {2 * d}: empty surface")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if d == 1:
        return _mesh_d1(lam, d)

    start = cube_start(lam)
    n = int(resolution)
    h = 2.0 * np.pi / n
    axis_vals = start + h * np.arange(n)

    # first pass: raw nodes to calibrate partition thresholds
    raw_nodes = []
    for j in range(d):
        others = [m for m in range(d) if m != j]
        grids = np.meshgrid(*([axis_vals] * (d - 1)), indexing="ij")
        base = np.stack([g.ravel() for g in grids], axis=-1) if d > 1 else np.zeros((1, 0))
        t = lam / 2.0 - np.sum(np.cos(base), axis=-1)
        mask = np.abs(t) <= 1.0
        if not np.any(mask):
            continue
        tm = np.clip(t[mask], -1.0, 1.0)
        a = np.arccos(tm)
        for sheet in (1, -1):
            kj = sheet * a if start < 0 else (a if sheet > 0 else 2 * np.pi - a)
            nodes = np.empty((kj.size, d))
            nodes[:, others] = base[mask]
            nodes[:, j] = kj
            raw_nodes.append(nodes)
    if not raw_nodes:
        raise ValueError(f"level set phi = {lam} is empty")
    allnodes = np.concatenate(raw_nodes, axis=0)
    max_sin = np.max(np.abs(np.sin(allnodes)), axis=1)
    g_min = float(np.min(max_sin))

    s1 = min(0.8 * g_min, 0.5)
    covered = True
    if s1 < 0.05:  # exceptional lam: surface meets critical points
        s1 = 0.05
        covered = False
    s0 = 0.5 * s1

    def pou_weights(nodes, j):
        hvals = smooth_step((np.abs(np.sin(nodes)) - s0) / (s1 - s0))
        tot = np.sum(hvals, axis=1)
        ok = tot > 0
        w = np.zeros(nodes.shape[0])
        w[ok] = hvals[ok, j] / tot[ok]
        return w, ok

    mesh = SurfaceMesh(d=d, lam=lam, resolution=n, covered=covered)
    cell = h ** (d - 1)
    for j in range(d):
        others = [m for m in range(d) if m != j]
        grids = np.meshgrid(*([axis_vals] * (d - 1)), indexing="ij")
        base = np.stack([g.ravel() for g in grids], axis=-1)
        t = lam / 2.0 - np.sum(np.cos(base), axis=-1)
        mask = np.abs(t) <= 1.0
        if not np.any(mask):
            continue
        tm = np.clip(t[mask], -1.0, 1.0)
        a = np.arccos(tm)
        for sheet in (1, -1):
            kj = sheet * a if start < 0 else (a if sheet > 0 else 2 * np.pi - a)
            nodes = np.empty((kj.size, d))
            nodes[:, others] = base[mask]
            nodes[:, j] = kj
            w, ok = pou_weights(nodes, j)
            if not np.all(ok):
                covered = False
            sin_j = np.abs(np.sin(kj))
            keep = w > 1e-300
            if not np.any(keep):
                continue
            nodes = nodes[keep]
            w = w[keep]
            sin_j = sin_j[keep]
            sin_all = np.sqrt(np.sum(np.sin(nodes) ** 2, axis=1))
            mesh.patches.append(
                MeshPatch(
                    axis=j,
                    sheet=sheet,
                    nodes=nodes,
                    quad_weight=w * cell / (2.0 * sin_j),
                    measure_weight=w * cell * sin_all / sin_j,
                )
            )
    mesh.covered = covered
    return mesh


def convexity_scan(lam: float, d: int, resolution: int = 256):
    """(min total curvature over a mesh of Gamma(lam), min > 0 flag)."""
    if not (abs(lam) <= 2 * d):
        raise ValueError("empty surface: |lambda| > 2d")
    mesh = surface_mesh(lam, d, resolution)
    nodes = mesh.nodes()
    K = total_curvature(nodes)
    good = np.isfinite(K)
    mn = float(np.min(K[good]))
    return mn, mn > 0


# ----------------------------------------------------------------------
# exports
# ----------------------------------------------------------------------


def mesh_to_csv(mesh: SurfaceMesh, path: str) -> None:
    """Columns: patch_id, k_1..k_d, weight (the g/|grad phi| ds weight)."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["patch_id"] + [f"k_{i + 1}" for i in range(mesh.d)] + ["weight"])
        for pid, p in enumerate(mesh.patches):
            for row, w in zip(p.nodes, p.quad_weight):
                wr.writerow([pid] + [f"{x:.12g}" for x in row] + [f"{w:.12g}"])


_MS_EDGES = {  # marching-squares: case -> list of (edge_in, edge_out)
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 5: [(3, 2), (1, 0)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)], 10: [(0, 3), (2, 1)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def _ms_segments(x, y, F, level):
    """Marching squares: line segments of {F = level} on the grid (x, y)."""
    segs = []
    below = F < level
    nx, ny = F.shape
    for i in range(nx - 1):
        for j in range(ny - 1):
            c = (
                (not below[i, j]) * 1
                + (not below[i + 1, j]) * 2
                + (not below[i + 1, j + 1]) * 4
                + (not below[i, j + 1]) * 8
            )
            if c in (0, 15):
                continue
            corners = [
                (x[i], y[j], F[i, j]),
                (x[i + 1], y[j], F[i + 1, j]),
                (x[i + 1], y[j + 1], F[i + 1, j + 1]),
                (x[i], y[j + 1], F[i, j + 1]),
            ]

            def interp(e):
                (x0, y0, f0), (x1, y1, f1) = corners[e], corners[(e + 1) % 4]
                t = 0.5 if f1 == f0 else (level - f0) / (f1 - f0)
                return (x0 + t * (x1 - x0), y0 + t * (y1 - y0))

            for e0, e1 in _MS_EDGES[c]:
                segs.append((interp(e0), interp(e1)))
    return segs


def _chain(segs):
    """Join segments into polylines by matching endpoints."""

    def key(p):
        return (round(p[0], 9), round(p[1], 9))

    by_end: dict = {}
    for i, (a, b) in enumerate(segs):
        by_end.setdefault(key(a), []).append((i, 1))
        by_end.setdefault(key(b), []).append((i, 0))
    used = [False] * len(segs)
    lines = []
    for i, (a, b) in enumerate(segs):
        if used[i]:
            continue
        used[i] = True
        line = [a, b]
        for grow_end in (True, False):
            while True:
                tip = line[-1] if grow_end else line[0]
                nxt = None
                for j, other_end in by_end.get(key(tip), ()):
                    if not used[j]:
                        nxt = segs[j][other_end]
                        used[j] = True
                        break
                if nxt is None:
                    break
                if grow_end:
                    line.append(nxt)
                else:
                    line.insert(0, nxt)
        lines.append(np.asarray(line))
    return lines


def level_polylines(lam: float, d2_offset: float = 0.0, lam_sign: float | None = None,
                    n: int = 512):
    """Polylines of the planar level set 2 cos u + 2 cos v = lam - d2_offset.

    For d = 2 use d2_offset = 0; for a d = 3 coordinate slice k_3 = c pass
    d2_offset = 2 cos c.  The sampling cube follows the sign convention of
    `lam_sign` (defaults to lam itself).
    """
    start = cube_start(lam if lam_sign is None else lam_sign)
    u = np.linspace(start, start + 2 * np.pi, n + 1)
    U, V = np.meshgrid(u, u, indexing="ij")
    F = 2 * np.cos(U) + 2 * np.cos(V)
    return _chain(_ms_segments(u, u, F, lam - d2_offset))


def polylines_to_svg(polylines, path: str, box, labels=None, size: int = 480) -> None:
    """Write polylines as a standalone SVG (pure geometry, no renderer).

    `box` = (x0, x1) maps the square [x0, x1]^2 onto the image.
    """
    x0, x1 = box
    scale = size / (x1 - x0)

    def tx(p):
        return (p[0] - x0) * scale, (x1 - p[1]) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" '
        'stroke="black" stroke-width="1"/>',
    ]
    for line in polylines:
        pts = " ".join(f"{px:.3f},{py:.3f}" for px, py in (tx(p) for p in line))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.2"/>'
        )
    if labels:
        for (lx, ly), text in labels:
            px, py = tx((lx, ly))
            parts.append(f'<text x="{px:.1f}" y="{py:.1f}" font-size="12">{text}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
