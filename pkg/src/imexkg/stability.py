"""Linear stability of the explicit and implicit halves of an IMEX pair.

The explicit half has a polynomial amplification factor; the implicit half a
rational one whose denominator collects one linear factor per nonzero
diagonal entry.  Both are extracted exactly by forward substitution with
polynomial arithmetic, so degree drops (which decide whether the function
vanishes at infinity) are structural rather than numerical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tableau import ButcherTableau, ImkgCoefficients, TableauError, expand_imkg

DEGREE_TOL = 1e-10


def _poly_trim(coeffs: np.ndarray, tol: float = DEGREE_TOL) -> np.ndarray:
    """Drop trailing coefficients below tol relative to the largest one."""
    coeffs = np.asarray(coeffs, dtype=float)
    scale = max(1.0, float(np.abs(coeffs).max(initial=0.0)))
    deg = 0
    for k in range(coeffs.size - 1, -1, -1):
        if abs(coeffs[k]) > tol * scale:
            deg = k
            break
    return coeffs[: deg + 1].copy()


def _poly_add(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = max(p.size, q.size)
    out = np.zeros(n)
    out[: p.size] += p
    out[: q.size] += q
    return out


def _poly_scale_shift(p: np.ndarray, factor: float) -> np.ndarray:
    """factor * z * p(z)."""
    out = np.zeros(p.size + 1)
    out[1:] = factor * p
    return out


def _poly_mul_linear(p: np.ndarray, d: float) -> np.ndarray:
    """(1 - d z) * p(z)."""
    out = np.zeros(p.size + 1)
    out[: p.size] += p
    out[1:] -= d * p
    return out


def _poly_div_linear(p: np.ndarray, d: float) -> np.ndarray:
    """Exact quotient p(z) / (1 - d z); the division must leave no remainder."""
    if p.size == 1:
        if abs(p[0]) > 1e-9:
            raise ArithmeticError("inexact division by linear stability factor")
        return np.zeros(1)
    q = np.zeros(p.size - 1)
    q[0] = p[0]
    for k in range(1, q.size):
        q[k] = p[k] + d * q[k - 1]
    remainder = p[-1] + d * q[-1]
    scale = max(1.0, float(np.abs(p).max()))
    if abs(remainder) > 1e-9 * scale:
        raise ArithmeticError("inexact division by linear stability factor")
    return q


def _poly_eval(coeffs: np.ndarray, z) -> np.ndarray:
    z = np.asarray(z)
    out = np.zeros(z.shape, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


@dataclass(frozen=True, eq=False)
class StabilityPolynomial:
    """P(z) = sum sigma_k z^k with sigma_0 = 1; trailing zeros trimmed."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = _poly_trim(np.asarray(self.coefficients, dtype=float))
        if coeffs.size == 0 or abs(coeffs[0] - 1.0) > 1e-12:
            raise TableauError("stability polynomial must have constant term 1")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, z):
        return _poly_eval(self.coefficients, z)

    def abs_on_imaginary_axis(self, y):
        return np.abs(self(1j * np.asarray(y, dtype=float)))


@dataclass(frozen=True, eq=False)
class RationalStabilityFunction:
    """R(z) = P(z) / prod_j (1 - z d_j) for the diagonally implicit half."""

    numerator: np.ndarray            # coefficients of P, constant term 1
    denominator_roots: np.ndarray    # the nonzero diagonal entries d_j

    def __post_init__(self):
        num = np.asarray(self.numerator, dtype=float).copy()
        if num.size == 0 or abs(num[0] - 1.0) > 1e-12:
            raise TableauError("numerator must have constant term 1")
        roots = np.asarray(self.denominator_roots, dtype=float).copy()
        num.setflags(write=False)
        roots.setflags(write=False)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator_roots", roots)

    @property
    def numerator_degree(self) -> int:
        return _poly_trim(self.numerator).size - 1

    @property
    def denominator_degree(self) -> int:
        return self.denominator_roots.size

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        den = np.ones(z.shape, dtype=complex)
        for d in self.denominator_roots:
            den = den * (1.0 - z * d)
        return _poly_eval(self.numerator, z) / den

    def abs_on_imaginary_axis(self, y):
        return np.abs(self(1j * np.asarray(y, dtype=float)))

    @property
    def vanishes_at_infinity(self) -> bool:
        return self.numerator_degree < self.denominator_degree


def explicit_polynomial_general(t: ButcherTableau) -> StabilityPolynomial:
    """Amplification polynomial 1 + z b (I - zA)^-1 1 by forward substitution."""
    if not t.is_strictly_lower_triangular():
        raise TableauError("explicit polynomial requires strictly lower triangular A")
    r = t.r
    stages = []  # stage value polynomials
    for i in range(r):
        g = np.array([1.0])
        for k in range(i):
            if t.A[i, k] != 0.0:
                g = _poly_add(g, _poly_scale_shift(stages[k], t.A[i, k]))
        stages.append(g)
    p = np.array([1.0])
    for k in range(r):
        if t.b[k] != 0.0:
            p = _poly_add(p, _poly_scale_shift(stages[k], t.b[k]))
    return StabilityPolynomial(p)


def imkg_explicit_polynomial(c: ImkgCoefficients) -> StabilityPolynomial:
    """Closed-form coefficients sigma_k = (prod of trailing alphas) * (alpha + beta)."""
    q = c.q
    sigma = np.zeros(q + 1)
    sigma[0] = 1.0
    prod = 1.0
    for k in range(1, q + 1):
        alpha_term = c.alpha[q - k]                       # alpha_{q-k+1}
        beta_term = c.beta[q - k - 1] if q - k >= 1 else 0.0  # beta_{q-k}
        sigma[k] = prod * (alpha_term + beta_term)
        prod *= c.alpha[q - k]
    return StabilityPolynomial(sigma)


def implicit_stability_function(t: ButcherTableau) -> RationalStabilityFunction:
    """Exact P/Q for a lower triangular tableau.

    Stage value polynomials are carried premultiplied by the full denominator
    Q(z) = prod over stages with nonzero diagonal of (1 - z d); dividing out
    a stage's own factor is then an exact synthetic division.
    """
    if not t.is_lower_triangular():
        raise TableauError("implicit stability function requires lower triangular A")
    r = t.r
    diag = t.diagonal
    roots = diag[diag != 0.0]
    Q = np.array([1.0])
    for d in roots:
        Q = _poly_mul_linear(Q, d)
    G: list[np.ndarray] = []  # G_i = g_i * Q
    for i in range(r):
        rhs = Q.copy()
        for k in range(i):
            if t.A[i, k] != 0.0:
                rhs = _poly_add(rhs, _poly_scale_shift(G[k], t.A[i, k]))
        if diag[i] != 0.0:
            G.append(_poly_div_linear(rhs, diag[i]))
        else:
            G.append(rhs)
    P = Q.copy()
    for k in range(r):
        if t.b[k] != 0.0:
            P = _poly_add(P, _poly_scale_shift(G[k], t.b[k]))
    # P has formal length r+1+deg(Q); everything beyond deg(Q)+r is zero fill.
    return RationalStabilityFunction(_poly_trim(P), roots)


def _esym(values: np.ndarray, k: int) -> float:
    """Elementary symmetric polynomial e_k over the given values."""
    e = np.zeros(k + 1)
    e[0] = 1.0
    for v in values:
        for j in range(min(k, len(values)), 0, -1):
            e[j] += v * e[j - 1]
    return float(e[k])


def sigma_hat_closed_form(c: ImkgCoefficients) -> tuple[float, float, float]:
    """First three numerator coefficients of the implicit stability function.

    The nested form mirrors the explicit closed form, with partial elementary
    symmetric sums of the diagonal entries entering at each level; sums over
    distinct index pairs and triples count each product once.
    """
    if c.q < 3:
        raise TableauError("closed-form numerator coefficients require q >= 3")
    q = c.q
    ah = lambda k: float(c.alpha_hat[k - 1]) if k >= 1 else 0.0
    bh = lambda k: float(c.beta_hat[k - 1]) if k >= 1 else 0.0
    d = c.delta_hat
    e1 = lambda m: _esym(d[:m], 1) if m > 0 else 0.0
    e2 = lambda m: _esym(d[:m], 2) if m > 1 else 0.0
    e3 = lambda m: _esym(d[:m], 3) if m > 2 else 0.0

    s1 = ah(q) + bh(q - 1) - e1(q - 1)
    s2 = ah(q) * (ah(q - 1) + bh(q - 2) - e1(q - 2)) - bh(q - 1) * e1(q - 1) + e2(q - 1)
    s3 = (
        ah(q)
        * (
            ah(q - 1) * (ah(q - 2) + bh(q - 3) - e1(q - 3))
            - bh(q - 2) * e1(q - 2)
            + e2(q - 2)
        )
        + bh(q - 1) * e2(q - 1)
        - e3(q - 1)
    )
    return s1, s2, s3


def imaginary_axis_limit(p: StabilityPolynomial, tol: float = 1e-8) -> float:
    """Largest y* with |P(iy)| <= 1 + 1e-12 on a dense sample of [0, y*].

    Found by bisection on the window height; the window endpoint is always
    sampled, so the crossing is resolved to ``tol``.  The result is checked
    against the degree bound y* <= degree - 1.
    """
    if p.degree < 1:
        raise TableauError("imaginary axis limit requires degree >= 1")
    threshold = 1.0 + 1e-12
    samples = 2048

    def stable_up_to(y: float) -> bool:
        ys = np.linspace(0.0, y, samples)
        return bool(np.all(p.abs_on_imaginary_axis(ys) <= threshold))

    upper = p.degree - 1.0 + 0.5
    if not stable_up_to(min(1e-6, upper if upper > 0 else 1e-6)):
        return 0.0
    if upper <= 0:
        return 0.0
    lo, hi = 0.0, upper
    if stable_up_to(upper):
        lo = upper
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable_up_to(mid):
            lo = mid
        else:
            hi = mid
    limit = lo
    # The 1e-12 admission slack on |P(iy)| widens the attainable limit by up
    # to sqrt(2e-12), so the degree-bound check carries a matching margin.
    if limit > p.degree - 1.0 + 1e-5:
        raise ArithmeticError(
            f"computed imaginary-axis limit {limit} exceeds the degree bound {p.degree - 1}"
        )
    return limit


def classify_kg(p: StabilityPolynomial, tol: float = 1e-6) -> str:
    """'KGO' or 'KGNO' when the axis limit matches d-1 or sqrt((d-1)^2-1)."""
    if p.degree < 2:
        return "other"
    r0 = imaginary_axis_limit(p)
    d = p.degree
    if abs(r0 - (d - 1.0)) <= tol:
        return "KGO"
    if abs(r0 - math.sqrt((d - 1.0) ** 2 - 1.0)) <= tol:
        return "KGNO"
    return "other"


I_SAMPLE_DECADES = (-4.0, 6.0)
I_SAMPLE_PER_DECADE = 2048
GAMMA_TOL = 1e-10


def _sampled_i_stable(R: RationalStabilityFunction) -> tuple[bool, float]:
    n = int((I_SAMPLE_DECADES[1] - I_SAMPLE_DECADES[0]) * I_SAMPLE_PER_DECADE) + 1
    ys = np.logspace(I_SAMPLE_DECADES[0], I_SAMPLE_DECADES[1], n)
    sup = float(R.abs_on_imaginary_axis(ys).max())
    return sup <= 1.0 + 1e-10, sup


def gamma_coefficients(
    sigma: tuple[float, float, float], roots: np.ndarray
) -> tuple[float, float, float]:
    """Coefficients of |P(iy)|^2 - |Q(iy)|^2 = g1 y^2 + g2 y^4 + g3 y^6 - (...) y^8.

    Valid when the numerator has degree at most 3; distinct-index sums run
    over unordered sets with squared factors.
    """
    s1, s2, s3 = sigma
    d2 = np.asarray(roots, dtype=float) ** 2
    g1 = s1 * s1 - 2.0 * s2 - _esym(d2, 1)
    g2 = s2 * s2 - 2.0 * s1 * s3 - _esym(d2, 2)
    g3 = s3 * s3 - _esym(d2, 3)
    return g1, g2, g3


@dataclass(frozen=True)
class StabilityReport:
    """Stability classification of one method's implicit/explicit halves."""

    name: str
    i_stable: bool
    a_stable: bool
    vi: bool
    l_stable: bool
    sd: bool
    explicit_imag_limit: float
    kg_class: str
    gammas: tuple[float, float, float] | None
    gamma_test_applicable: bool
    i_stable_by_sampling: bool
    sampled_sup: float | None
    sigma_hat: tuple[float, ...]
    diagnostics: tuple[str, ...] = ()


def stability_report(c: ImkgCoefficients, name: str = "") -> StabilityReport:
    """Full stability classification of a compact-form method.

    Vanishing at infinity is decided by the exact numerator degree against
    the count of nonzero diagonal entries.  I-stability uses the sufficient
    quadratic-form test when the numerator has degree at most 3, falling back
    to (and double-checked by) a dense sample of the imaginary axis; A-
    stability additionally requires all poles in the right half-plane, i.e.
    no negative diagonal entries.
    """
    pair = expand_imkg(c, name or "method")
    R = implicit_stability_function(pair.implicit_part)
    P = imkg_explicit_polynomial(c)
    r0 = imaginary_axis_limit(P)
    kg = classify_kg(P)

    diagnostics: list[str] = []
    num = _poly_trim(R.numerator)
    deg_p = num.size - 1
    vi = deg_p < R.denominator_degree

    gamma_applicable = deg_p <= 3
    gammas = None
    i_stable = False
    by_sampling = False
    sampled_sup = None
    if gamma_applicable:
        sig = tuple(float(num[k]) if k < num.size else 0.0 for k in (1, 2, 3))
        gammas = gamma_coefficients(sig, R.denominator_roots)
        if all(g <= GAMMA_TOL for g in gammas):
            i_stable = True
    if not i_stable:
        ok, sampled_sup = _sampled_i_stable(R)
        if ok:
            i_stable = True
            by_sampling = True
            diagnostics.append(
                "i-stability established by axis sampling only (sufficient test inconclusive)"
            )
        else:
            diagnostics.append(
                f"axis sample exceeds 1: sup |R(iy)| = {sampled_sup:.6g}"
            )

    a_stable = bool(i_stable and np.all(R.denominator_roots >= -1e-14))
    if i_stable and not a_stable:
        diagnostics.append("negative diagonal entry places a pole in the left half-plane")
    l_stable = bool(a_stable and vi)

    sigma_hat = tuple(float(v) for v in num)
    return StabilityReport(
        name=name or "method",
        i_stable=i_stable,
        a_stable=a_stable,
        vi=vi,
        l_stable=l_stable,
        sd=pair.sd,
        explicit_imag_limit=r0,
        kg_class=kg,
        gammas=gammas,
        gamma_test_applicable=gamma_applicable,
        i_stable_by_sampling=by_sampling,
        sampled_sup=sampled_sup,
        sigma_hat=sigma_hat,
        diagnostics=tuple(diagnostics),
    )
