"""Butcher tableau pairs and the compact IMKG coefficient form.

An IMEX pair couples a strictly lower triangular explicit tableau with a
diagonally implicit (lower triangular) one of equal stage count.  Abscissae
are always the row sums of the coefficient matrix, so a tableau is fully
determined by (A, b).

The IMKG family is parameterized by five vectors (alpha, beta, alpha_hat,
beta_hat, delta_hat) that expand into a first-same-as-last (q+1)-stage pair:
stage j+1 of the explicit part reads alpha_j from stage j and beta_{j-1} from
stage 1; the implicit part adds a diagonal entry d_j, and its final stage
carries diagonal zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROWSUM_TOL = 1e-14


class TableauError(ValueError):
    """Raised when tableau data violates a structural requirement."""


class TableauFileError(TableauError):
    """Raised on malformed tableau files; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """A single Runge-Kutta tableau (A, b) with c = A @ 1 enforced."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray = field(default=None)  # recomputed unless supplied

    def __post_init__(self):
        A = _readonly(self.A)
        b = _readonly(self.b)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise TableauError(f"A must be square, got shape {A.shape}")
        r = A.shape[0]
        if r < 1:
            raise TableauError("stage count must be positive")
        if b.shape != (r,):
            raise TableauError(f"b must have length {r}, got {b.shape}")
        rowsums = A.sum(axis=1)
        if self.c is not None:
            c = np.asarray(self.c, dtype=float)
            scale = max(1.0, float(np.abs(A).max(initial=0.0)))
            if c.shape != (r,) or np.abs(c - rowsums).max() > ROWSUM_TOL * scale:
                raise TableauError("c must equal the row sums of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", _readonly(rowsums))

    @property
    def r(self) -> int:
        return self.A.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.A)

    def is_strictly_lower_triangular(self, tol: float = 0.0) -> bool:
        return bool(np.abs(np.triu(self.A)).max(initial=0.0) <= tol)

    def is_lower_triangular(self, tol: float = 0.0) -> bool:
        return bool(np.abs(np.triu(self.A, 1)).max(initial=0.0) <= tol)

    def equals(self, other: "ButcherTableau", tol: float = 0.0) -> bool:
        return (
            self.r == other.r
            and np.abs(self.A - other.A).max(initial=0.0) <= tol
            and np.abs(self.b - other.b).max(initial=0.0) <= tol
        )


@dataclass(frozen=True, eq=False)
class DoubleTableau:
    """An explicit/implicit tableau pair defining an IMEX RK method."""

    name: str
    explicit_part: ButcherTableau
    implicit_part: ButcherTableau

    def __post_init__(self):
        ex, im = self.explicit_part, self.implicit_part
        if ex.r != im.r:
            raise TableauError("explicit and implicit parts must have equal stage count")
        if not ex.is_strictly_lower_triangular():
            raise TableauError("explicit part not strictly lower triangular")
        if not im.is_lower_triangular():
            raise TableauError("implicit part not lower triangular")

    @property
    def r(self) -> int:
        return self.explicit_part.r

    @property
    def fsal(self) -> bool:
        """True iff both quadrature rows repeat the final stage rows."""
        ex, im = self.explicit_part, self.implicit_part
        return bool(
            np.array_equal(ex.b, ex.A[-1]) and np.array_equal(im.b, im.A[-1])
        )

    @property
    def implicit_stage_count(self) -> int:
        return int(np.count_nonzero(self.implicit_part.diagonal))

    @property
    def sd(self) -> bool:
        """Single-diagonal flag: all nonzero implicit diagonal entries equal."""
        d = self.implicit_part.diagonal
        nz = d[d != 0.0]
        if nz.size == 0:
            return True
        scale = np.abs(nz).max()
        return bool(np.abs(nz - nz[0]).max() <= 1e-14 * scale)

    def equals(self, other: "DoubleTableau", tol: float = 0.0) -> bool:
        return self.explicit_part.equals(other.explicit_part, tol) and (
            self.implicit_part.equals(other.implicit_part, tol)
        )


@dataclass(frozen=True, eq=False)
class ImkgCoefficients:
    """Compact (alpha, beta, alpha_hat, beta_hat, delta_hat) parameterization.

    Vector lengths are q, q-1, q, q-1, q-1 for a (q+1)-stage expanded pair.
    """

    q: int
    alpha: np.ndarray
    beta: np.ndarray
    alpha_hat: np.ndarray
    beta_hat: np.ndarray
    delta_hat: np.ndarray

    def __post_init__(self):
        q = int(self.q)
        if q < 2:
            raise TableauError("q must be at least 2")
        vectors = {
            "alpha": (self.alpha, q),
            "beta": (self.beta, q - 1),
            "alpha_hat": (self.alpha_hat, q),
            "beta_hat": (self.beta_hat, q - 1),
            "delta_hat": (self.delta_hat, q - 1),
        }
        for label, (vec, want) in vectors.items():
            arr = _readonly(vec)
            if arr.shape != (want,):
                raise TableauError(
                    f"{label} must have length {want} for q={q}, got {arr.shape}"
                )
            object.__setattr__(self, label, arr)
        object.__setattr__(self, "q", q)

    @property
    def implicit_stage_count(self) -> int:
        return int(np.count_nonzero(self.delta_hat))

    @property
    def is_strict_family(self) -> bool:
        """Whether alpha and alpha_hat are entirely nonzero.

        The family definition requires this, but several shipped methods
        carry leading zeros; the flag is informational only.
        """
        return bool(np.all(self.alpha != 0.0) and np.all(self.alpha_hat != 0.0))


def expand_imkg(c: ImkgCoefficients, name: str) -> DoubleTableau:
    """Expand compact coefficients into the (q+1)-stage FSAL tableau pair."""
    q = c.q
    r = q + 1
    A = np.zeros((r, r))
    Ahat = np.zeros((r, r))
    # Stage i (0-based, i >= 1) reads alpha_i from stage i-1 and, from the
    # third stage on, beta_{i-1} from stage 0.
    for i in range(1, r):
        A[i, i - 1] = c.alpha[i - 1]
        if i >= 2:
            A[i, 0] += c.beta[i - 2]
    for i in range(1, q):
        Ahat[i, i - 1] = c.alpha_hat[i - 1]
        Ahat[i, i] = c.delta_hat[i - 1]
        if i >= 2:
            Ahat[i, 0] += c.beta_hat[i - 2]
    Ahat[q, q - 1] = c.alpha_hat[q - 1]  # final stage: diagonal stays zero
    Ahat[q, 0] += c.beta_hat[q - 2]
    explicit = ButcherTableau(A, A[-1].copy())
    implicit = ButcherTableau(Ahat, Ahat[-1].copy())
    return DoubleTableau(name, explicit, implicit)


def _format_row(values) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def write_tableau_file(t: DoubleTableau, path) -> None:
    """Write a pair in the line-oriented decimal text format."""
    lines = [f"name {t.name}", f"r {t.r}", "A"]
    lines += [_format_row(row) for row in t.explicit_part.A]
    lines += ["b", _format_row(t.explicit_part.b), "Ahat"]
    lines += [_format_row(row) for row in t.implicit_part.A]
    lines += ["bhat", _format_row(t.implicit_part.b)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_tableau_file(path) -> DoubleTableau:
    """Read a pair written by :func:`write_tableau_file`.

    Abscissae are recomputed as row sums.  Structural violations (explicit
    part not strictly lower triangular, implicit part not lower triangular)
    raise :class:`TableauFileError` with the offending line number.
    """
    with open(path, encoding="utf-8") as fh:
        raw = fh.readlines()
    tokens: list[tuple[int, str]] = []  # (line number, stripped content)
    for idx, line in enumerate(raw, start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.append((idx, body))
    pos = 0

    def take(expect: str | None = None) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(tokens):
            raise TableauFileError("unexpected end of file", len(raw))
        lineno, body = tokens[pos]
        pos += 1
        if expect is not None and body.split()[0] != expect:
            raise TableauFileError(f"expected '{expect}', got '{body}'", lineno)
        return lineno, body

    lineno, body = take("name")
    parts = body.split()
    if len(parts) != 2:
        raise TableauFileError("name line must be 'name <id>'", lineno)
    name = parts[1]
    lineno, body = take("r")
    try:
        r = int(body.split()[1])
    except (IndexError, ValueError):
        raise TableauFileError("r line must be 'r <int>'", lineno)
    if r < 1:
        raise TableauFileError("stage count must be positive", lineno)

    def read_rows(count: int, width: int) -> np.ndarray:
        rows = []
        for _ in range(count):
            lineno, body = take()
            try:
                row = [float(tok) for tok in body.split()]
            except ValueError:
                raise TableauFileError(f"non-numeric entry in '{body}'", lineno)
            if len(row) != width:
                raise TableauFileError(
                    f"expected {width} entries, got {len(row)}", lineno
                )
            rows.append(row)
        return np.array(rows)

    take("A")
    a_first = tokens[pos][0] if pos < len(tokens) else len(raw)
    A = read_rows(r, r)
    take("b")
    b = read_rows(1, r)[0]
    take("Ahat")
    ahat_first = tokens[pos][0] if pos < len(tokens) else len(raw)
    Ahat = read_rows(r, r)
    take("bhat")
    bhat = read_rows(1, r)[0]

    explicit = ButcherTableau(A, b)
    implicit = ButcherTableau(Ahat, bhat)
    if not explicit.is_strictly_lower_triangular():
        raise TableauFileError("explicit part not strictly lower triangular", a_first)
    if not implicit.is_lower_triangular():
        raise TableauFileError("implicit part not lower triangular", ahat_first)
    return DoubleTableau(name, explicit, implicit)
