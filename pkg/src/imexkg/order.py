"""IMEX Runge-Kutta order conditions up to third order.

Two routes are provided: the general tableau-level conditions (quadrature
sums over both parts and their abscissae) and the simplified conditions for
the compact IMKG coefficient form.  They agree on expanded pairs, which the
test suite checks by projection onto the constraint set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tableau import DoubleTableau, ImkgCoefficients

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class OrderReport:
    """Residuals of a condition set and the order they certify."""

    order_classified: int
    residuals: tuple[tuple[str, float], ...]
    tolerance: float

    def residual(self, cond_id: str) -> float:
        for cid, value in self.residuals:
            if cid == cond_id:
                return value
        raise KeyError(cond_id)

    @property
    def max_abs_residual(self) -> float:
        return max((abs(v) for _, v in self.residuals), default=0.0)

    def violated(self, tol: float | None = None) -> tuple[str, ...]:
        tol = self.tolerance if tol is None else tol
        return tuple(cid for cid, v in self.residuals if abs(v) > tol)


def _conditions(t: DoubleTableau, order: int) -> list[tuple[str, int, float]]:
    """(id, order, residual) triples for all conditions up to ``order``."""
    ex, im = t.explicit_part, t.implicit_part
    weights = {"b": ex.b, "bhat": im.b}
    matrices = {"A": ex.A, "Ahat": im.A}
    nodes = {"c": ex.c, "chat": im.c}
    out = [
        ("b.1", 1, float(ex.b.sum()) - 1.0),
        ("bhat.1", 1, float(im.b.sum()) - 1.0),
    ]
    if order >= 2:
        for wname, w in weights.items():
            for vname, v in nodes.items():
                out.append((f"{wname}.{vname}", 2, float(w @ v) - 0.5))
    if order >= 3:
        for wname, w in weights.items():
            for mname, m in matrices.items():
                for vname, v in nodes.items():
                    out.append(
                        (f"{wname}.{mname}.{vname}", 3, float(w @ (m @ v)) - 1.0 / 6.0)
                    )
        for wname, w in weights.items():
            for dname, d in nodes.items():
                for vname, v in nodes.items():
                    label = "C" if dname == "c" else "Chat"
                    out.append(
                        (f"{wname}.{label}.{vname}", 3, float(w @ (d * v)) - 1.0 / 3.0)
                    )
    return out


def _classify(conds: list[tuple[str, int, float]], tol: float, top: int) -> int:
    order = 0
    for p in range(1, top + 1):
        if all(abs(res) <= tol for _, o, res in conds if o == p):
            order = p
        else:
            break
    return order


def check_order2_general(t: DoubleTableau, tol: float = DEFAULT_TOL) -> OrderReport:
    """Evaluate the six first- and second-order quadrature conditions."""
    conds = _conditions(t, 2)
    return OrderReport(
        order_classified=_classify(conds, tol, 2),
        residuals=tuple((cid, res) for cid, _, res in conds),
        tolerance=tol,
    )


def check_order3_general(t: DoubleTableau, tol: float = DEFAULT_TOL) -> OrderReport:
    """Evaluate all 22 conditions through third order."""
    conds = _conditions(t, 3)
    return OrderReport(
        order_classified=_classify(conds, tol, 3),
        residuals=tuple((cid, res) for cid, _, res in conds),
        tolerance=tol,
    )


def classify_order(t: DoubleTableau, tol: float = DEFAULT_TOL) -> int:
    """Largest order in {0..3} whose full general condition set passes."""
    return check_order3_general(t, tol).order_classified


def _coef(vec: np.ndarray, index: int) -> float:
    """1-based access with the convention that indices <= 0 read as zero."""
    return float(vec[index - 1]) if index >= 1 else 0.0


def check_order_compact(c: ImkgCoefficients, target_order: int) -> OrderReport:
    """Simplified order conditions on the compact coefficient form.

    For target order 2 the six reduced quadrature conditions are evaluated.
    For target order 3 the condition family consists of the fixed top
    coefficients, both versions of the 2/3-sum, and four versions of the
    product condition: the leading factor and the trailing diagonal term are
    either both plain or both hatted, independently of whether the inner sum
    is built from plain or hatted coefficients (plain diagonal terms are
    zero).
    """
    if target_order not in (2, 3):
        raise ValueError("target_order must be 2 or 3")
    q = c.q
    a = lambda k: _coef(c.alpha, k)
    b = lambda k: _coef(c.beta, k)
    ah = lambda k: _coef(c.alpha_hat, k)
    bh = lambda k: _coef(c.beta_hat, k)
    dh = lambda k: _coef(c.delta_hat, k)

    res: list[tuple[str, float]] = []
    if target_order == 2:
        # The hatted sum is the abscissa of stage q, so the diagonal term is
        # d_{q-1}; pairing it with d_{q-2} breaks equivalence with the
        # general conditions whenever the trailing diagonal entries differ.
        plain = b(q - 2) + a(q - 1)
        hatted = bh(q - 2) + ah(q - 1) + dh(q - 1)
        res += [
            ("aq*(b+a)=1/2", a(q) * plain - 0.5),
            ("aq*(bh+ah+dh)=1/2", a(q) * hatted - 0.5),
            ("ahq*(bh+ah+dh)=1/2", ah(q) * hatted - 0.5),
            ("ahq*(b+a)=1/2", ah(q) * plain - 0.5),
            ("aq+b(q-1)=1", a(q) + b(q - 1) - 1.0),
            ("ahq+bh(q-1)=1", ah(q) + bh(q - 1) - 1.0),
        ]
        order = 2 if all(abs(v) <= DEFAULT_TOL for _, v in res) else 0
    else:
        inner_plain = a(q - 2) + b(q - 3)
        inner_hat = ah(q - 2) + dh(q - 2) + bh(q - 3)
        res += [
            ("aq=3/4", a(q) - 0.75),
            ("ahq=3/4", ah(q) - 0.75),
            ("b(q-1)=1/4", b(q - 1) - 0.25),
            ("bh(q-1)=1/4", bh(q - 1) - 0.25),
            ("a(q-1)+b(q-2)=2/3", a(q - 1) + b(q - 2) - 2.0 / 3.0),
            (
                "ah(q-1)+dh(q-1)+bh(q-2)=2/3",
                ah(q - 1) + dh(q - 1) + bh(q - 2) - 2.0 / 3.0,
            ),
            ("a(q-1)*plain=2/9", a(q - 1) * inner_plain - 2.0 / 9.0),
            ("a(q-1)*hat=2/9", a(q - 1) * inner_hat - 2.0 / 9.0),
            (
                "ah(q-1)*plain+2dh/3=2/9",
                ah(q - 1) * inner_plain + 2.0 * dh(q - 1) / 3.0 - 2.0 / 9.0,
            ),
            (
                "ah(q-1)*hat+2dh/3=2/9",
                ah(q - 1) * inner_hat + 2.0 * dh(q - 1) / 3.0 - 2.0 / 9.0,
            ),
        ]
        order = 3 if all(abs(v) <= DEFAULT_TOL for _, v in res) else 0
    return OrderReport(order, tuple(res), DEFAULT_TOL)
