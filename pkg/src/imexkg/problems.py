"""Split test problems for the IMEX integrator.

* scalar split Dahlquist with separate nonstiff/stiff rates,
* the three-component wave test system whose one-step map is the
  amplification matrix scanned by :mod:`imexkg.hevi`,
* a single-column compressible acoustic model in a mass-based vertical
  coordinate: vertical velocity and geopotential on interfaces, stiff
  buoyancy/compression terms treated implicitly via a tridiagonal Newton
  reduction, everything advective out of scope.

The column carries vertical velocity w and geopotential phi on L+1
interfaces of a terrain-following coordinate increasing downward from the
model top to 1 at the surface.  Mass-weighted virtual potential temperature
and the hydrostatic-pressure gradient live on layer midpoints.  Pressure is
recovered from the discrete hydrostatic relation in compression form, the
implicit forcing is the imbalance between the pressure gradient and its
hydrostatic value, and the rigid bottom holds w = 0 with the surface
geopotential pinned by the terrain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from ._hstab_py import N_MATRIX, S_MATRIX
from .integrate import (
    NewtonConfig,
    NewtonError,
    SplitOdeProblem,
    _NewtonController,
    residual_negligible,
    wrms_norm,
)

GRAVITY = 9.80616          # m s^-2
GAS_CONSTANT = 287.04      # J kg^-1 K^-1
KAPPA = GAS_CONSTANT / 1004.64


class StateOutOfDomainError(ValueError):
    """Pressure recovery hit a nonpositive argument (overturned layer)."""


def dahlquist_split(lam_n: complex, lam_s: complex) -> SplitOdeProblem:
    """Scalar test problem x' = lam_n x + lam_s x."""
    total = lam_n + lam_s

    def solver(E, a_jj, dt, t_stage, cfg):
        return E / (1.0 - dt * a_jj * lam_s), 1

    return SplitOdeProblem(
        dimension=1,
        n=lambda x, t: lam_n * x,
        s=lambda x, t: lam_s * x,
        jac_s=lambda x, t: np.array([[lam_s]]),
        stage_solver=solver,
        exact_solution=lambda t: np.array([np.exp(total * t)], dtype=complex),
    )


def hevi_problem(k_x: float, k_z: float, u0=None) -> SplitOdeProblem:
    """Three-component wave system u' = -i k_x N u - i k_z S u.

    The generator is Hermitian times -i, so the exact solution preserves the
    norm; the implicit stage solve is a direct 3x3 complex solve.
    """
    if u0 is None:
        u0 = np.array([1.0, 1.0, 1.0], dtype=complex)
    u0 = np.asarray(u0, dtype=complex)
    H = k_x * N_MATRIX + k_z * S_MATRIX
    w, V = np.linalg.eigh(H)
    coeff = V.conj().T @ u0

    def exact(t):
        return V @ (np.exp(-1j * w * t) * coeff)

    Bs = -1j * k_z * S_MATRIX

    def solver(E, a_jj, dt, t_stage, cfg):
        M = np.eye(3, dtype=complex) - (dt * a_jj) * Bs
        return np.linalg.solve(M, E), 1

    return SplitOdeProblem(
        dimension=3,
        n=lambda u, t: -1j * k_x * (N_MATRIX @ u),
        s=lambda u, t: -1j * k_z * (S_MATRIX @ u),
        jac_s=lambda u, t: Bs,
        stage_solver=solver,
        exact_solution=exact,
    )


@dataclass(frozen=True, eq=False)
class ColumnBackground:
    """Fixed column structure: grid, thermodynamic profile, constants."""

    layers: int
    eta: np.ndarray        # L+1 interface coordinates, increasing downward
    theta: np.ndarray      # L midpoint mass-weighted virtual potential temps
    dpi: np.ndarray        # L midpoint hydrostatic pressure gradients (> 0)
    pi_top: float
    gravity: float = GRAVITY
    gas_constant: float = GAS_CONSTANT
    kappa: float = KAPPA

    def __post_init__(self):
        L = self.layers
        for label, want in (("eta", L + 1), ("theta", L), ("dpi", L)):
            arr = np.asarray(getattr(self, label), dtype=float)
            if arr.shape != (want,):
                raise ValueError(f"{label} must have length {want}")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, label, arr)
        if np.any(self.dpi <= 0):
            raise ValueError("dpi must be positive")
        if np.any(np.diff(self.eta) <= 0):
            raise ValueError("eta must increase downward")

    @property
    def deta(self) -> np.ndarray:
        return np.diff(self.eta)

    @property
    def pi_interfaces(self) -> np.ndarray:
        return self.pi_top + np.concatenate([[0.0], np.cumsum(self.dpi * self.deta)])

    @property
    def pi_midpoints(self) -> np.ndarray:
        pi = self.pi_interfaces
        return 0.5 * (pi[:-1] + pi[1:])


def default_background(layers: int = 20, t_ref: float = 300.0,
                       pi_top: float = 225.0, pi_surface: float = 1.0e5) -> ColumnBackground:
    """Isothermal column on a linear-in-pressure coordinate."""
    eta_top = pi_top / pi_surface
    eta = np.linspace(eta_top, 1.0, layers + 1)
    dpi = np.full(layers, pi_surface)
    pi_mid = pi_top + dpi[0] * (0.5 * (eta[:-1] + eta[1:]) - eta_top)
    theta = dpi * t_ref * pi_mid ** (-KAPPA)
    return ColumnBackground(layers, eta, theta, dpi, pi_top)


def hydrostatic_state(bg: ColumnBackground) -> np.ndarray:
    """Balanced (w, phi): zero velocity, geopotential integrating the
    discrete hydrostatic relation so the recovered pressure equals the
    hydrostatic pressure to rounding."""
    L = bg.layers
    pi_mid = bg.pi_midpoints
    phi = np.zeros(L + 1)
    dphi = -bg.gas_constant * bg.theta * pi_mid ** (bg.kappa - 1.0) * bg.deta
    for k in range(L - 1, -1, -1):
        phi[k] = phi[k + 1] - dphi[k]
    return np.concatenate([np.zeros(L + 1), phi])


def perturb_phi(state: np.ndarray, amplitude: float, interface: int) -> np.ndarray:
    out = state.copy()
    half = out.size // 2
    if not (0 < interface < half - 1):
        raise ValueError("perturbation must hit an interior interface")
    out[half + interface] += amplitude
    return out


def split_state(state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = state.size // 2
    return state[:half], state[half:]


def column_pressure(bg: ColumnBackground, phi: np.ndarray) -> np.ndarray:
    """Midpoint pressure from the discrete compression relation.

    The exponent 1/(kappa - 1) is negative, so the recovery is a reciprocal
    power of a positive argument; a nonpositive argument signals an
    overturned layer.
    """
    dphi = np.diff(phi) / bg.deta
    xi = -dphi / (bg.gas_constant * bg.theta)
    if np.any(xi <= 0.0):
        raise StateOutOfDomainError("nonpositive pressure-recovery argument")
    return xi ** (1.0 / (bg.kappa - 1.0))


def column_mu(bg: ColumnBackground, phi: np.ndarray) -> np.ndarray:
    """Pressure-gradient ratio on interfaces 0..L-1 (bottom excluded).

    Interior interfaces difference the two flanking midpoint pressures; the
    top interface uses a one-sided difference against the fixed pressure at
    the model top.
    """
    p = column_pressure(bg, phi)
    pi_mid = bg.pi_midpoints
    mu = np.empty(bg.layers)
    mu[0] = (p[0] - bg.pi_top) / (pi_mid[0] - bg.pi_top)
    mu[1:] = np.diff(p) / np.diff(pi_mid)
    return mu


def _mu_jacobian_bands(bg: ColumnBackground, phi: np.ndarray) -> np.ndarray:
    """Tridiagonal d mu_k / d phi_j (k, j in 0..L-1) in solve_banded layout.

    mu_k sees phi through the flanking midpoint pressures; dp_i/dxi_i
    follows from the reciprocal power law, and each xi_i differences the two
    interface values above and below midpoint i.
    """
    L = bg.layers
    p = column_pressure(bg, phi)
    dphi = np.diff(phi) / bg.deta
    xi = -dphi / (bg.gas_constant * bg.theta)
    dp_dxi = p / ((bg.kappa - 1.0) * xi)
    # xi_i = -(phi_{i+1} - phi_i) / (deta_i R theta_i)
    dxi_dphi_lo = 1.0 / (bg.deta * bg.gas_constant * bg.theta)    # d xi_i/d phi_i
    dxi_dphi_hi = -dxi_dphi_lo                                    # d xi_i/d phi_{i+1}
    dp_lo = dp_dxi * dxi_dphi_lo   # d p_i / d phi_i
    dp_hi = dp_dxi * dxi_dphi_hi   # d p_i / d phi_{i+1}

    pi_mid = bg.pi_midpoints
    denom = np.empty(L)
    denom[0] = pi_mid[0] - bg.pi_top
    denom[1:] = np.diff(pi_mid)

    bands = np.zeros((3, L))  # rows: super, main, sub (solve_banded layout)
    # top interface: mu_0 = (p_0 - pi_top)/denom_0 depends on phi_0, phi_1
    bands[1, 0] = dp_lo[0] / denom[0]
    bands[0, 1] = dp_hi[0] / denom[0]
    for k in range(1, L):
        inv = 1.0 / denom[k]
        bands[2, k - 1] += -dp_lo[k - 1] * inv           # d mu_k/d phi_{k-1}
        bands[1, k] += (dp_lo[k] - dp_hi[k - 1]) * inv   # d mu_k/d phi_k
        if k + 1 < L:
            bands[0, k + 1] += dp_hi[k] * inv            # d mu_k/d phi_{k+1}
    return bands


def mu_jacobian_dense(bg: ColumnBackground, phi: np.ndarray) -> np.ndarray:
    """Dense d mu / d phi over all L+1 interfaces (for tests and the dense
    stage-solver route); the last column covers the fixed surface value."""
    L = bg.layers
    bands = _mu_jacobian_bands(bg, phi)
    J = np.zeros((L, L + 1))
    for k in range(L):
        J[k, k] = bands[1, k]
        if k > 0:
            J[k, k - 1] = bands[2, k - 1]
        if k + 1 < L:
            J[k, k + 1] = bands[0, k + 1]
    # d mu_{L-1} / d phi_L enters through p_{L-1}
    p = column_pressure(bg, phi)
    xi = -(np.diff(phi) / bg.deta) / (bg.gas_constant * bg.theta)
    dp_dxi = p / ((bg.kappa - 1.0) * xi)
    dp_hi_last = dp_dxi[L - 1] * (-1.0 / (bg.deta[L - 1] * bg.gas_constant * bg.theta[L - 1]))
    pi_mid = bg.pi_midpoints
    J[L - 1, L] = dp_hi_last / (pi_mid[L - 1] - pi_mid[L - 2])
    return J


def column_tendency(bg: ColumnBackground, state: np.ndarray) -> np.ndarray:
    """Stiff tendency (w', phi') = (-g (1 - mu), g w) with the bottom
    interface masked (rigid lower boundary, surface geopotential fixed)."""
    w, phi = split_state(state)
    mu = column_mu(bg, phi)
    dw = np.zeros_like(w)
    dphi = np.zeros_like(phi)
    dw[:-1] = -bg.gravity * (1.0 - mu)
    dphi[:-1] = bg.gravity * w[:-1]
    return np.concatenate([dw, dphi])


def column_jac_s(bg: ColumnBackground, state: np.ndarray) -> np.ndarray:
    """Dense stiff Jacobian of the full masked (w, phi) system."""
    L = bg.layers
    dim = 2 * (L + 1)
    _, phi = split_state(state)
    J = np.zeros((dim, dim))
    Jmu = mu_jacobian_dense(bg, phi)
    J[:L, L + 1:] = bg.gravity * Jmu
    for k in range(L):
        J[L + 1 + k, k] = bg.gravity
    return J


def column_stage_solve(
    bg: ColumnBackground,
    E_w: np.ndarray,
    E_phi: np.ndarray,
    a_jj: float,
    dt: float,
    cfg: NewtonConfig,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Implicit stage for the column via elimination of w.

    Substituting w = (phi - E_phi)/(g dt a_jj) reduces the stage system to a
    scalar equation per unmasked interface,

        G(phi) = phi - E_phi - g dt a_jj E_w + (g dt a_jj)^2 (1 - mu(phi)),

    whose Jacobian is tridiagonal because mu couples three neighbouring
    interfaces.  Newton iterates with a banded direct solve; convergence
    control matches the generic stage solver.
    """
    if a_jj == 0.0:
        raise ValueError("column stage solve requires a nonzero diagonal entry")
    L = bg.layers
    c = bg.gravity * dt * a_jj
    phi = E_phi.copy()
    eps_a = np.asarray(cfg.eps_a)
    ctrl = _NewtonController(cfg)
    solves = 0
    for _ in range(cfg.max_iters):
        mu = column_mu(bg, phi)
        forcing = c * c * (1.0 - mu)
        G = phi[:-1] - E_phi[:-1] - c * E_w[:-1] + forcing
        if residual_negligible(G, phi[:-1], E_phi[:-1], c * E_w[:-1], forcing):
            break
        bands = _mu_jacobian_bands(bg, phi)
        J = -c * c * bands
        J[1] += 1.0
        try:
            delta = solve_banded((1, 1), J, -G)
        except np.linalg.LinAlgError as exc:
            raise NewtonError("singular tridiagonal stage Jacobian") from exc
        phi[:-1] += delta
        solves += 1
        if ctrl.converged(wrms_norm(delta, phi[:-1], cfg.eps_r, eps_a)):
            break
    else:
        raise NewtonError(
            f"column stage solve did not converge in {cfg.max_iters} iterations"
        )
    w = E_w.copy()
    w[:-1] = (phi[:-1] - E_phi[:-1]) / c
    return w, phi, max(solves, 1)


def _column_newton_config(layers: int, eps_r: float = 1e-6) -> NewtonConfig:
    # Component magnitudes differ sharply between w (m/s) and phi (m^2/s^2).
    eps_a = np.concatenate([
        np.full(layers + 1, 10.0 * eps_r),
        np.full(layers + 1, 1e5 * eps_r),
    ])
    return NewtonConfig(eps_r=eps_r, eps_a=eps_a)


def acoustic_column(bg: ColumnBackground, reduced: bool = True) -> SplitOdeProblem:
    """Split problem for the column; the nonstiff half is identically zero.

    With ``reduced`` the implicit stages use the tridiagonal elimination;
    otherwise the generic dense Newton route exercises the same equations.
    """
    L = bg.layers
    dim = 2 * (L + 1)
    cfg_default = _column_newton_config(L)

    def solver(E, a_jj, dt, t_stage, cfg):
        E_w, E_phi = split_state(E)
        phi_cfg = NewtonConfig(
            epsilon=cfg.epsilon,
            eps_r=cfg.eps_r,
            eps_a=np.asarray(cfg.eps_a).ravel()[-1]
            if np.asarray(cfg.eps_a).size > 1
            else cfg.eps_a,
            max_iters=cfg.max_iters,
            rate_floor=cfg.rate_floor,
        )
        w, phi, iters = column_stage_solve(bg, E_w, E_phi, a_jj, dt, phi_cfg)
        return np.concatenate([w, phi]), iters

    return SplitOdeProblem(
        dimension=dim,
        n=lambda x, t: np.zeros(dim),
        s=lambda x, t: column_tendency(bg, x),
        jac_s=lambda x, t: column_jac_s(bg, x),
        stage_solver=solver if reduced else None,
        newton=cfg_default,
    )


def write_column_csv(bg: ColumnBackground, state: np.ndarray, path) -> None:
    """Snapshot rows `eta,w,phi,p,mu`; midpoint/interface-only quantities
    are written as nan where not defined."""
    w, phi = split_state(state)
    p = column_pressure(bg, phi)
    mu = column_mu(bg, phi)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("eta,w,phi,p,mu\n")
        for k in range(bg.layers + 1):
            pk = f"{p[k]:.17g}" if k < bg.layers else "nan"
            muk = f"{mu[k]:.17g}" if k < bg.layers else "nan"
            fh.write(f"{bg.eta[k]:.17g},{w[k]:.17g},{phi[k]:.17g},{pk},{muk}\n")
