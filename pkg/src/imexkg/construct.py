"""Derivation of second- and third-order methods from stability targets.

Given a target amplification polynomial for the explicit half (optimal or
near-optimal on the imaginary axis) the explicit chain is recovered by
inverting the closed-form coefficient products; the implicit chain is then
pinned down by the order conditions plus degree-reduction constraints on the
implicit numerator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stability import implicit_stability_function
from .tableau import ImkgCoefficients, expand_imkg


class DerivationError(ValueError):
    """A construction formula was evaluated outside its parameter domain."""


@dataclass(frozen=True)
class PolynomialTarget:
    """Target amplification coefficients sigma_1..sigma_q (sigma_0 = 1)."""

    family: str  # "KGO", "KGNO", or "custom"
    q: int
    sigma: tuple[float, ...]

    def __post_init__(self):
        if len(self.sigma) != self.q:
            raise DerivationError("target must supply sigma_1..sigma_q")


BUILTIN_TARGETS: dict[tuple[str, int], tuple[float, ...]] = {
    ("KGO", 3): (1.0, 1.0 / 2.0, 1.0 / 4.0),
    ("KGNO", 4): (1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0),
    ("KGO", 5): (1.0, 1.0 / 2.0, 3.0 / 16.0, 1.0 / 32.0, 1.0 / 128.0),
    ("KGNO", 5): (1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 30.0, 1.0 / 150.0),
}


def builtin_target(family: str, q: int) -> PolynomialTarget:
    try:
        sigma = BUILTIN_TARGETS[(family, q)]
    except KeyError:
        raise DerivationError(f"no built-in {family} target for q={q}")
    return PolynomialTarget(family, q, sigma)


def alpha_from_polynomial(target: PolynomialTarget) -> np.ndarray:
    """Recover the beta-free explicit chain from target coefficients.

    With all beta zero, sigma_k is the product of the trailing k-1 alphas
    times alpha_{q-k+1}, so the chain unwinds top-down as long as every
    partial product stays nonzero.
    """
    sigma = target.sigma
    if abs(sigma[0] - 1.0) > 1e-12 or (target.q >= 2 and abs(sigma[1] - 0.5) > 1e-12):
        raise DerivationError("target requires sigma_1 = 1 and sigma_2 = 1/2")
    q = target.q
    alpha = np.zeros(q)
    prod = 1.0
    for k in range(1, q + 1):
        value = sigma[k - 1] / prod
        if value == 0.0:
            raise DerivationError("target incompatible with nonzero alpha chain")
        alpha[q - k] = value
        prod *= value
    return alpha


def derive_imkg2(
    q: int,
    target: PolynomialTarget,
    dhat,
    alpha_hat_free=(),
) -> ImkgCoefficients:
    """Second-order beta-free method from a target polynomial.

    ``dhat`` supplies the full diagonal pattern (length q-1) and
    ``alpha_hat_free`` the unconstrained implicit entries alpha_hat_1 ..
    alpha_hat_{q-2}; the top two implicit entries are fixed by the order
    conditions.
    """
    dhat = np.asarray(dhat, dtype=float)
    if dhat.shape != (q - 1,):
        raise DerivationError(f"dhat must have length {q - 1}")
    free = np.asarray(alpha_hat_free, dtype=float)
    if free.shape != (max(q - 2, 0),):
        raise DerivationError(f"alpha_hat_free must have length {q - 2}")
    alpha = alpha_from_polynomial(target)
    alpha_hat = np.zeros(q)
    alpha_hat[: q - 2] = free
    # The abscissa of stage q must be 1/2, pairing alpha_hat_{q-1} with the
    # diagonal entry of that same stage.
    alpha_hat[q - 2] = 0.5 - dhat[q - 2]
    alpha_hat[q - 1] = 1.0
    zeros = np.zeros(q - 1)
    return ImkgCoefficients(q, alpha, zeros, alpha_hat, zeros.copy(), dhat)


def derive_imkg3_q4(d2: float, d3: float, alpha2: float, beta1: float) -> ImkgCoefficients:
    """Third-order five-stage method from (d2, d3, alpha2, beta1).

    The explicit chain matches the near-optimal quartic target; the two
    lowest implicit entries are the closed-form quotients that force the
    implicit numerator down to degree 2.
    """
    s = alpha2 + beta1
    if s == 0.0:
        raise DerivationError("alpha2 + beta1 must be nonzero (alpha3 formula)")
    alpha3 = 2.0 / (9.0 * s)
    beta2 = 2.0 / 3.0 - alpha3
    alpha4 = 0.75
    beta3 = 0.25
    ah4 = 0.75
    bh3 = 0.25
    ah3 = (2.0 / 9.0 - 2.0 * d3 / 3.0) / s
    bh2 = 2.0 / 3.0 - d3 - ah3
    bh1 = beta1
    if ah3 == 0.0:
        raise DerivationError("alpha_hat_3 vanished (alpha_hat_2 formula)")
    ah2 = (2.0 / 9.0 - 2.0 * d3 / 3.0) / ah3 - d2 - bh1

    denom = ah4 * d2 + bh3 * d2 + bh3 * d3 - d2 * d3 - ah3 * ah4 - ah4 * bh2
    if denom == 0.0:
        raise DerivationError("degree-reduction denominator vanished (d1 formula)")
    # Zeroing the cubic numerator coefficient is linear in d1; this is the
    # resulting quotient (the companion quartic condition fixes ah1 below).
    d1 = (-ah2 * ah3 * ah4 - ah3 * ah4 * bh1 + ah4 * bh2 * d2 - bh3 * d2 * d3) / denom
    if ah2 * ah3 * ah4 == 0.0:
        raise DerivationError("alpha_hat_2*alpha_hat_3*alpha_hat_4 vanished (alpha_hat_1 formula)")
    ah1 = (ah3 * ah4 * bh1 * d1 - ah4 * bh2 * d1 * d2 + bh3 * d1 * d2 * d3) / (
        ah2 * ah3 * ah4
    )

    prod = alpha2 * alpha3 * alpha4
    if prod == 0.0:
        raise DerivationError("alpha2*alpha3*alpha4 vanished (alpha1 formula)")
    alpha1 = 1.0 / (24.0 * prod)

    return ImkgCoefficients(
        4,
        np.array([alpha1, alpha2, alpha3, alpha4]),
        np.array([beta1, beta2, beta3]),
        np.array([ah1, ah2, ah3, ah4]),
        np.array([bh1, bh2, bh3]),
        np.array([d1, d2, d3]),
    )


def phat_degree(c: ImkgCoefficients) -> int:
    """Exact numerator degree of the implicit stability function."""
    pair = expand_imkg(c, "probe")
    return implicit_stability_function(pair.implicit_part).numerator_degree
