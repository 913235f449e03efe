"""Shipped IMKG coefficient records, their normalization, and lookup.

The published tables these records come from carry several alignment
defects: vectors shorter or longer than the q-convention, a missing trailing
1 on some second-order implicit chains, and a missing leading explicit
entry.  Normalization applies a fixed repair sequence (zero padding/trimming
only; printed nonzero values are never altered), then validates the claimed
order and implicit stage count.  Methods that still violate their claims are
flagged rather than repaired further.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .construct import BUILTIN_TARGETS
from .order import (
    OrderReport,
    check_order2_general,
    check_order3_general,
)
from .tableau import DoubleTableau, ImkgCoefficients, TableauError, expand_imkg

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
_GAMMA_MINUS = 0.08931639747704086
_GAMMA_PLUS = 1.2440169358562922

_NAME_RE = re.compile(r"^IMKG(\d)(\d)(\d)([a-z])$")


class UnknownMethodError(KeyError):
    """Lookup of a method name with no coefficient record."""


@dataclass(frozen=True)
class RawCoefficientRecord:
    """A coefficient record exactly as published, before normalization."""

    name: str
    order: int            # claimed order p
    explicit_stages: int  # f digit; the compact form's q
    implicit_stages: int  # claimed count j of nonzero diagonal entries
    letter: str
    alpha: tuple[float, ...]
    alpha_hat: tuple[float, ...]
    delta_hat: tuple[float, ...]
    beta: tuple[float, ...] | None = None  # second-order records omit beta


def parse_name(name: str) -> tuple[int, int, int, str]:
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError(f"method name {name!r} does not match IMKG<p><f><j><letter>")
    p, f, j = (int(m.group(k)) for k in (1, 2, 3))
    if p not in (2, 3) or f < 2 or not (1 <= j < f + 1):
        raise ValueError(f"method name {name!r} has out-of-range digits")
    return p, f, j, m.group(4)


def _rec(name: str, alpha, alpha_hat, delta_hat, beta=None) -> RawCoefficientRecord:
    p, f, j, letter = parse_name(name)
    return RawCoefficientRecord(
        name=name,
        order=p,
        explicit_stages=f,
        implicit_stages=j,
        letter=letter,
        alpha=tuple(alpha),
        alpha_hat=tuple(alpha_hat),
        delta_hat=tuple(delta_hat),
        beta=None if beta is None else tuple(beta),
    )


RAW_RECORDS: tuple[RawCoefficientRecord, ...] = (
    _rec(
        "IMKG232a",
        (0.5, 0.5, 1.0),
        (0.0, 0.0, (SQRT2 - 1.0) / 2.0),
        ((2.0 - SQRT2) / 2.0, (2.0 - SQRT2) / 2.0),
    ),
    _rec(
        "IMKG232b",
        (0.5, 0.5, 1.0),
        (0.0, 0.0, -(1.0 + SQRT2) / 2.0),
        (0.0, (2.0 + SQRT2) / 2.0, (2.0 + SQRT2) / 2.0),
    ),
    _rec(
        "IMKG242a",
        (0.25, 1.0 / 3.0, 0.5, 1.0),
        (0.0, 0.0, (SQRT2 - 1.0) / 2.0, 1.0),
        (0.0, 0.0, (2.0 - SQRT2) / 2.0, (2.0 - SQRT2) / 2.0),
    ),
    _rec(
        "IMKG242b",
        (0.25, 1.0 / 3.0, 0.5, 1.0),
        (0.0, 0.0, -(1.0 + SQRT2) / 2.0, 1.0),
        (0.0, 0.0, (2.0 + SQRT2) / 2.0, (2.0 + SQRT2) / 2.0),
    ),
    _rec(
        "IMKG243a",
        (0.25, 1.0 / 3.0, 0.5, 1.0),
        (0.0, 1.0 / 6.0, SQRT3 / 6.0, 1.0),
        (0.0, 0.5 + SQRT3 / 6.0, 0.5 + SQRT3 / 6.0, 0.5 + SQRT3 / 6.0),
    ),
    _rec(
        "IMKG252a",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, 0.0, (SQRT2 - 1.0) / 2.0, 1.0),
        # The final entry is published as 2*sqrt(2)/2 even though the family
        # pattern suggests (2-sqrt(2))/2; printed nonzero values are kept.
        (0.0, 0.0, 0.0, (2.0 - SQRT2) / 2.0, SQRT2),
    ),
    _rec(
        "IMKG252b",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, 0.0, -(1.0 + SQRT2) / 2.0, 1.0),
        (0.0, 0.0, 0.0, (2.0 + SQRT2) / 2.0, (2.0 + SQRT2) / 2.0),
    ),
    _rec(
        "IMKG253a",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, _GAMMA_MINUS, SQRT3 / 6.0, 1.0),
        (0.0, 0.5 - SQRT3 / 6.0, 0.5 - SQRT3 / 6.0, 0.5 - SQRT3 / 6.0),
    ),
    _rec(
        "IMKG253b",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, _GAMMA_PLUS, -SQRT3 / 6.0, 1.0),
        (0.0, 0.5 + SQRT3 / 6.0, 0.5 + SQRT3 / 6.0, 0.5 + SQRT3 / 6.0),
    ),
    _rec(
        "IMKG254a",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, -0.3, 5.0 / 6.0, -1.5),
        (-0.5, 1.0, 1.0, 2.0),
    ),
    _rec(
        "IMKG254b",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, -0.05, 1.25, -0.5),
        (-0.5, 1.0, 1.0, 1.0),
    ),
    _rec(
        "IMKG254c",
        (0.25, 1.0 / 6.0, 0.375, 0.5, 1.0),
        (0.0, 0.05, 5.0 / 36.0, 1.0 / 3.0, 1.0),
        (1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0),
    ),
    _rec(
        "IMKG342a",
        (1.0 / 3.0, 1.0 / 3.0, 0.75),
        (0.0, -(1.0 + SQRT3) / 6.0, -(1.0 + SQRT3) / 6.0, 0.75),
        (0.0, (1.0 + SQRT3 / 3.0) / 2.0, (1.0 + SQRT3 / 3.0) / 2.0),
        beta=(1.0 / 3.0, 1.0 / 3.0, 0.25),
    ),
    _rec(
        "IMKG343a",
        (0.25, 2.0 / 3.0, 1.0 / 3.0, 0.75),
        (0.0, -1.0 / 3.0, -2.0 / 3.0, 0.75),
        (-1.0 / 3.0, 1.0, 1.0),
        beta=(0.0, 1.0 / 3.0, 0.25),
    ),
    _rec(
        "IMKG353a",
        (0.25, 2.0 / 3.0, 1.0 / 3.0, 0.75),
        (0.0, -359.0 / 600.0, -559.0 / 600.0, 0.75),
        (-1.1678009811335388, 1.265, 1.265),
        beta=(0.0, 0.0, 1.0 / 3.0, 0.25),
    ),
    _rec(
        "IMKG354a",
        (0.2, 0.2, 2.0 / 3.0, 1.0 / 3.0, 0.75),
        (0.0, 0.0, 11.0 / 30.0, -2.0 / 3.0, 0.75),
        (0.0, 0.4, 0.4, 1.0),
        beta=(0.0, 0.0, 1.0 / 3.0, 0.25),
    ),
)

# Published I/A, VI, SD properties accompanying the coefficient tables.
# "IMKG243b" appears in the property table only; it has no coefficients.
PUBLISHED_PROPERTIES: dict[str, dict[str, object]] = {
    "IMKG232a": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG232b": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG242a": {"i_or_a": "A", "vi": False, "sd": True},
    "IMKG242b": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG243a": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG243b": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG252a": {"i_or_a": "A", "vi": False, "sd": True},
    "IMKG252b": {"i_or_a": "A", "vi": False, "sd": True},
    "IMKG253a": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG253b": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG254a": {"i_or_a": "I", "vi": True, "sd": False},
    "IMKG254b": {"i_or_a": "I", "vi": True, "sd": False},
    "IMKG254c": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG342a": {"i_or_a": "A", "vi": False, "sd": True},
    "IMKG343a": {"i_or_a": "I", "vi": True, "sd": False},
    "IMKG353a": {"i_or_a": "A", "vi": True, "sd": True},
    "IMKG354a": {"i_or_a": "I", "vi": True, "sd": False},
}

MISSING_METHODS: tuple[str, ...] = ("IMKG243b",)

FLAG_INCONSISTENT = "as_printed_inconsistent"


@dataclass(frozen=True)
class NormalizationResult:
    """Outcome of normalizing one raw record."""

    record: RawCoefficientRecord
    coefficients: ImkgCoefficients | None
    tableau: DoubleTableau | None
    order_report: OrderReport | None
    flags: tuple[str, ...]
    violations: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return self.coefficients is not None and not self.flags

    @property
    def name(self) -> str:
        return self.record.name


def _align(vec: tuple[float, ...], target: int, label: str) -> np.ndarray:
    """Left-pad with zeros, or trim leading zeros, to the target length."""
    arr = np.asarray(vec, dtype=float)
    if arr.size == target:
        return arr
    if arr.size < target:
        return np.concatenate([np.zeros(target - arr.size), arr])
    excess = arr.size - target
    if np.any(arr[:excess] != 0.0):
        raise TableauError(f"{label} cannot be aligned: leading entries are nonzero")
    return arr[excess:]


def _recover_alpha(rec: RawCoefficientRecord, q: int) -> np.ndarray:
    """Fill in a missing leading explicit entry from the family target."""
    printed = np.asarray(rec.alpha, dtype=float)
    if printed.size == q:
        return printed
    if printed.size != q - 1:
        raise TableauError("alpha cannot be aligned: unexpected length")
    family = "KGNO" if rec.order == 3 else "KGO"
    try:
        sigma_q = BUILTIN_TARGETS[(family, q)][q - 1]
    except KeyError:
        raise TableauError(f"no {family} target available to recover alpha_1 for q={q}")
    prod = float(np.prod(printed))
    if prod == 0.0:
        raise TableauError("alpha cannot be recovered: zero in the printed chain")
    return np.concatenate([[sigma_q / prod], printed])


def normalize_raw(rec: RawCoefficientRecord) -> NormalizationResult:
    """Apply the documented repair sequence and validate the record's claims.

    Repairs, in order: zero out (second order) or copy (third order) the
    one-column chains; append the required trailing 1 to a second-order
    implicit chain that lacks it; align every vector to the q-convention by
    zero padding or trimming; recover a missing leading explicit entry from
    the family's target polynomial.  Validation failures set the
    inconsistency flag and report the violated conditions.
    """
    q = rec.explicit_stages
    flags: list[str] = []
    violations: list[str] = []
    try:
        if rec.order == 2:
            beta = np.zeros(q - 1)
        else:
            if rec.beta is None:
                raise TableauError("third-order record lacks beta")
            beta = _align(rec.beta, q - 1, "beta")
        beta_hat = beta.copy()

        alpha_hat_printed = list(rec.alpha_hat)
        if rec.order == 2 and abs(alpha_hat_printed[-1] - 1.0) > 1e-12:
            alpha_hat_printed.append(1.0)
        alpha_hat = _align(tuple(alpha_hat_printed), q, "alpha_hat")
        delta_hat = _align(rec.delta_hat, q - 1, "delta_hat")
        alpha = _recover_alpha(rec, q)
        coeffs = ImkgCoefficients(q, alpha, beta, alpha_hat, beta_hat, delta_hat)
        tableau = expand_imkg(coeffs, rec.name)
    except TableauError as exc:
        return NormalizationResult(
            rec, None, None, None, (FLAG_INCONSISTENT,), (str(exc),)
        )

    if rec.order == 2:
        report = check_order2_general(tableau)
    else:
        report = check_order3_general(tableau)
    order_bad = report.violated(1e-10)
    if order_bad:
        violations.extend(f"order{rec.order}:{cid}" for cid in order_bad)
    nu = coeffs.implicit_stage_count
    if nu != rec.implicit_stages:
        violations.append(f"implicit stage count {nu} != claimed {rec.implicit_stages}")
    if violations:
        flags.append(FLAG_INCONSISTENT)
    return NormalizationResult(
        rec, coeffs, tableau, report, tuple(flags), tuple(violations)
    )


@lru_cache(maxsize=1)
def registry() -> tuple[NormalizationResult, ...]:
    """Normalization results for every shipped coefficient record."""
    return tuple(normalize_raw(rec) for rec in RAW_RECORDS)


def lookup(name: str) -> NormalizationResult:
    for entry in registry():
        if entry.name == name:
            return entry
    raise UnknownMethodError(name)


def clean_methods() -> tuple[NormalizationResult, ...]:
    return tuple(entry for entry in registry() if entry.clean)
