"""Split-system (horizontal-explicit / vertical-implicit) stability regions.

The scalar three-component test system couples a horizontally propagating
wave, treated by the explicit half of a pair, with a vertically propagating
one treated implicitly.  Scanning the spectral radius of the resulting
amplification matrix over scaled wave numbers (x, z) maps out the region of
step sizes that remain stable for mixed wave content.

Grid scans dispatch to a compiled kernel when the extension built, falling
back to a vectorized numpy implementation with identical semantics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _hstab_py
from ._hstab_py import N_MATRIX, S_MATRIX
from .tableau import DoubleTableau

try:  # pragma: no cover - exercised only when the extension is built
    from . import _hstab_cy
except ImportError:  # pragma: no cover
    _hstab_cy = None

DEFAULT_EXTRA_Z = (100.0, 1000.0, 1000000.0)
DEFAULT_RHO_TOL = 1e-8


def kernel_name() -> str:
    return "compiled" if _hstab_cy is not None else "python"


def _kernel_scan(tab: DoubleTableau, xs, zs, kernel: str = "auto") -> np.ndarray:
    A = np.ascontiguousarray(tab.explicit_part.A)
    b = np.ascontiguousarray(tab.explicit_part.b)
    Ahat = np.ascontiguousarray(tab.implicit_part.A)
    bhat = np.ascontiguousarray(tab.implicit_part.b)
    xs = np.ascontiguousarray(xs, dtype=float)
    zs = np.ascontiguousarray(zs, dtype=float)
    if kernel == "auto":
        kernel = "compiled" if _hstab_cy is not None else "python"
    if kernel == "compiled":
        if _hstab_cy is None:
            raise RuntimeError("compiled kernel requested but not built")
        out = np.empty((xs.size, zs.size))
        _hstab_cy.scan(A, b, Ahat, bhat, xs, zs, out)
        return out
    if kernel == "python":
        return _hstab_py.scan(A, b, Ahat, bhat, xs, zs)
    raise ValueError(f"unknown kernel {kernel!r}")


def hstability_matrix(t: DoubleTableau, x: float, z: float) -> np.ndarray:
    """The 3x3 amplification matrix at one scaled wave-number pair.

    Assembled literally from the Kronecker-product definition and a dense
    solve; the grid kernels use an equivalent block substitution and are
    tested against this form.
    """
    if x < 0 or z < 0:
        raise ValueError("scaled wave numbers must be nonnegative")
    r = t.r
    A, b = t.explicit_part.A, t.explicit_part.b
    Ahat, bhat = t.implicit_part.A, t.implicit_part.b
    M = (
        np.eye(3 * r, dtype=complex)
        + np.kron(A, 1j * x * N_MATRIX)
        + np.kron(Ahat, 1j * z * S_MATRIX)
    )
    E = np.kron(np.ones((r, 1)), np.eye(3))
    try:
        G = np.linalg.solve(M, E)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"singular stage system at (x, z) = ({x}, {z})") from exc
    top = np.kron(b[None, :], x * N_MATRIX) + np.kron(bhat[None, :], z * S_MATRIX)
    return np.eye(3, dtype=complex) - 1j * (top @ G)


def spectral_radius(m: np.ndarray) -> float:
    """Largest eigenvalue modulus of a 3x3 matrix.

    Closed-form characteristic cubic with Newton polish; when the polished
    roots sit nearly on top of each other the result is cross-checked by a
    Rayleigh-quotient power iteration.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError("spectral_radius expects a 3x3 matrix")
    batch = m[None, :, :]
    tr = np.trace(m)
    roots = _hstab_py._cubic_roots(
        np.array([tr]),
        np.array([
            m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
            + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
        ]),
        np.array([np.linalg.det(m)]),
    )[0]
    rho = float(_hstab_py.spectral_radius_batch(batch)[0])
    gaps = [abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)]
    scale = max(1.0, float(np.abs(roots).max()))
    if min(gaps) < 1e-6 * scale:
        lam = _power_iteration_eigenvalue(m)
        if lam is not None:
            rho = max(rho, abs(lam))
    return rho


def _power_iteration_eigenvalue(m: np.ndarray, iters: int = 200) -> complex | None:
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    lam = 0.0 + 0.0j
    for _ in range(iters):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0 + 0.0j
        v = w / norm
        lam = np.vdot(v, m @ v)
    residual = np.linalg.norm(m @ v - lam * v)
    return complex(lam) if residual <= 1e-12 * max(1.0, np.linalg.norm(m)) else None


@dataclass(frozen=True, eq=False)
class HStabilityGrid:
    """Sampled spectral radii over a rectangle of scaled wave numbers."""

    x_grid: np.ndarray
    z_grid: np.ndarray
    rho: np.ndarray  # shape (len(x_grid), len(z_grid))

    def __post_init__(self):
        for label in ("x_grid", "z_grid", "rho"):
            arr = np.asarray(getattr(self, label), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, label, arr)
        if self.rho.shape != (self.x_grid.size, self.z_grid.size):
            raise ValueError("rho shape must match the grids")

    def column_stable(self, tol: float = DEFAULT_RHO_TOL) -> np.ndarray:
        """Boolean per x column: every sampled z stays within 1 + tol."""
        return np.all(self.rho <= 1.0 + tol, axis=1)


def scan_grid(
    t: DoubleTableau,
    x_max: float,
    z_max: float,
    nx: int,
    nz: int,
    extra_z_samples=(),
    kernel: str = "auto",
) -> HStabilityGrid:
    """Uniform scan of [0, x_max] x [0, z_max] plus extra large-z probes."""
    if x_max < 0 or z_max < 0 or nx < 1 or nz < 1:
        raise ValueError("grid extents and counts must be positive")
    xs = np.linspace(0.0, x_max, nx) if nx > 1 else np.array([0.0])
    zs = np.linspace(0.0, z_max, nz) if nz > 1 else np.array([0.0])
    extras = np.asarray(sorted(set(float(v) for v in extra_z_samples)), dtype=float)
    if extras.size:
        zs = np.concatenate([zs, extras[extras > zs[-1]]])
    rho = _kernel_scan(t, xs, zs, kernel=kernel)
    return HStabilityGrid(xs, zs, rho)


def default_scan(
    t: DoubleTableau,
    explicit_limit: float,
    nx: int = 401,
    nz: int = 501,
    kernel: str = "auto",
) -> HStabilityGrid:
    """Standard analysis window: x to the explicit axis limit plus margin."""
    x_max = max(explicit_limit + 0.5, 1.0)
    return scan_grid(t, x_max, 50.0, nx, nz, DEFAULT_EXTRA_Z, kernel=kernel)


def region_T_contained(g: HStabilityGrid, n0: float, tol: float = DEFAULT_RHO_TOL) -> bool:
    """Whether every sampled point with x <= n0 is stable."""
    if g.x_grid[-1] < n0 - 1e-12:
        raise ValueError(f"grid covers x <= {g.x_grid[-1]}, below n0 = {n0}")
    cols = g.x_grid <= n0 + 1e-12
    return bool(np.all(g.rho[cols] <= 1.0 + tol))


def min_gamma(g: HStabilityGrid, n0: float, tol: float = DEFAULT_RHO_TOL) -> float | None:
    """Smallest cone slope whose exterior-above region is sampled stable.

    Over every sampled column 0 < x <= n0 the largest unstable z is divided
    by x and the maximum taken.  Returns 0.0 when no sampled instability
    exists, None when some column is still unstable at its largest sampled z
    (no cone can work).
    """
    if g.x_grid[-1] < n0 - 1e-12:
        raise ValueError(f"grid covers x <= {g.x_grid[-1]}, below n0 = {n0}")
    unstable = g.rho > 1.0 + tol
    cols = np.nonzero((g.x_grid > 0.0) & (g.x_grid <= n0 + 1e-12))[0]
    if unstable[cols][:, g.z_grid == 0.0].any():
        raise ValueError("explicit axis unstable before n0")
    gamma = 0.0
    for idx in cols:
        bad = np.nonzero(unstable[idx])[0]
        if bad.size == 0:
            continue
        if bad[-1] == g.z_grid.size - 1:
            return None
        gamma = max(gamma, g.z_grid[bad[-1]] / g.x_grid[idx])
    return gamma


def stable_column_width(g: HStabilityGrid, tol: float = DEFAULT_RHO_TOL) -> float:
    """Largest sampled x whose whole column (all sampled z) is stable."""
    stable = g.column_stable(tol)
    idx = np.nonzero(stable)[0]
    return float(g.x_grid[idx[-1]]) if idx.size else 0.0


def write_grid_csv(g: HStabilityGrid, path) -> None:
    """Emit `x,z,rho` rows, x-major, at 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,z,rho\n")
        for i, x in enumerate(g.x_grid):
            for j, z in enumerate(g.z_grid):
                fh.write(f"{x:.17g},{z:.17g},{g.rho[i, j]:.17g}\n")


def read_grid_csv(path) -> HStabilityGrid:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    xs = np.unique(data[:, 0])
    zs = np.unique(data[:, 1])
    if xs.size * zs.size != data.shape[0]:
        raise ValueError("grid csv does not cover a full tensor grid")
    rho = data[:, 2].reshape(xs.size, zs.size)
    return HStabilityGrid(xs, zs, rho)
