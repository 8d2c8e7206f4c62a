"""Entries and truncations of the signed transfer-operator matrices.

The operators act on coefficient sequences in the generalized Laguerre
basis through the infinite matrices A(+-) with entries

    alpha_{kn} = k! Gamma(n+2q) / 2^{n+k+2q}
                 * sum_{m <= min(n,k)} (1 +- (-1)^m)
                   / (Gamma(m+2q) m! (n-m)! (k-m)!),

together with the symmetric variants c_{nk} (inner products against the
basis) and the diagonal D = diag(Gamma(n+2q)/n!), related by
A = D^{-1} C.  The plus sign keeps even m, the minus sign odd m, so all
surviving terms are positive and every entry can be computed in log
space per term with no cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .formats import format_float, metadata_lines
from .specfun import log_gamma

_LN2 = math.log(2.0)
_INDEX_CAP = 400


class SignChoice(str, Enum):
    """The sign between the two preimage branches of the operator."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def parity(self) -> int:
        """Parity of the surviving summation terms: 0 even, 1 odd."""
        return 0 if self is SignChoice.PLUS else 1


def _check_index(value: int, name: str) -> None:
    if not 0 <= value <= _INDEX_CAP:
        raise ValueError(f"{name} must lie in [0, {_INDEX_CAP}], got {value}")


def entry_alpha(q: float, sign: SignChoice, k: int, n: int) -> float:
    """Single matrix entry alpha(+-)_{kn}, row k and column n.

    Each surviving term of the m-sum is assembled as the exponential of
    a log-space sum and the (all positive) terms are added with fsum.
    Relative accuracy is a few 1e-14 up to the index cap.
    """
    if q <= 0.0:
        raise ValueError("q must be positive")
    _check_index(k, "k")
    _check_index(n, "n")
    base = log_gamma(k + 1.0) + log_gamma(n + 2.0 * q) - (n + k + 2.0 * q) * _LN2 + _LN2
    terms = [
        math.exp(
            base
            - log_gamma(m + 2.0 * q)
            - log_gamma(m + 1.0)
            - log_gamma(n - m + 1.0)
            - log_gamma(k - m + 1.0)
        )
        for m in range(sign.parity, min(n, k) + 1, 2)
    ]
    return math.fsum(terms)


def entry_c(q: float, sign: SignChoice, n: int, k: int) -> float:
    """Symmetric entry c(+-)_{nk} = (P(+-) e_n, e_k).

    Computed from its own formula (not by rescaling entry_alpha), so the
    relation alpha_{kn} = (k!/Gamma(k+2q)) c_{nk} stays a genuine
    cross-check between two code paths.
    """
    if q <= 0.0:
        raise ValueError("q must be positive")
    _check_index(n, "n")
    _check_index(k, "k")
    base = (
        log_gamma(n + 2.0 * q)
        + log_gamma(k + 2.0 * q)
        - (n + k + 2.0 * q) * _LN2
        + _LN2
    )
    terms = [
        math.exp(
            base
            - log_gamma(m + 2.0 * q)
            - log_gamma(m + 1.0)
            - log_gamma(n - m + 1.0)
            - log_gamma(k - m + 1.0)
        )
        for m in range(sign.parity, min(n, k) + 1, 2)
    ]
    return math.fsum(terms)


def diag_d(q: float, n: int) -> float:
    """Diagonal weight D_n = Gamma(n+2q)/n! (log-space evaluation)."""
    if q <= 0.0:
        raise ValueError("q must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.exp(log_gamma(n + 2.0 * q) - log_gamma(n + 1.0))


@dataclass(frozen=True, eq=False)
class TruncatedMatrix:
    """North-west N x N corner of A(+-) for a given (q, sign).

    entries[k, n] is alpha_{kn}; rows are indexed by k, columns by n.
    For the minus sign, row 0 and column 0 are identically zero; for the
    plus sign every entry is strictly positive and row 0 equals twice
    row 1.
    """

    q: float
    sign: SignChoice
    size: int
    entries: np.ndarray


def _half_log_factors(q: float, ms: np.ndarray, lgq: np.ndarray, lgf: np.ndarray) -> np.ndarray:
    # Split the per-m factor 2^{1-2q} / (Gamma(m+2q) m!) evenly between
    # the two table rows so each table stays within a polynomial range.
    return 0.5 * ((1.0 - 2.0 * q) * _LN2 - lgq[ms] - lgf[ms])


def _build_tables(q: float, sign: SignChoice, size: int):
    """Scaled factor tables X, Y with A = X^T Y and C = Y^T Y.

    X[j, k] = exp(lg k! - lg (k-m_j)! - k ln 2 + h_j) and
    Y[j, n] = exp(lg Gamma(n+2q) - lg (n-m_j)! - n ln 2 + h_j), where
    m_j runs over the surviving parities and h_j is half the log of the
    shared per-m factor.  Every table entry is bounded polynomially in
    the size, so the products never overflow and the sums contain only
    nonnegative terms.
    """
    idx = np.arange(size)
    lgf = np.array([log_gamma(j + 1.0) for j in idx])
    lgq = np.array([log_gamma(j + 2.0 * q) for j in idx])
    ms = np.arange(sign.parity, size, 2)
    half = _half_log_factors(q, ms, lgq, lgf)
    X = np.zeros((len(ms), size))
    Y = np.zeros((len(ms), size))
    for j, m in enumerate(ms):
        cols = idx[m:]
        X[j, m:] = np.exp(lgf[cols] - lgf[cols - m] - cols * _LN2 + half[j])
        Y[j, m:] = np.exp(lgq[cols] - lgf[cols - m] - cols * _LN2 + half[j])
    return X, Y


def build_truncation(q: float, sign: SignChoice, size: int) -> TruncatedMatrix:
    """N x N truncation of A(+-) via the scaled-table matrix product.

    Args:
        q: positive parameter of the operator family.
        sign: branch sign choice.
        size: truncation size N, 1 <= N <= 400.

    Returns:
        TruncatedMatrix holding alpha entries; agrees with entry_alpha
        to a few 1e-14 relative, at O(N^3/2) arithmetic cost overall.
    """
    if q <= 0.0:
        raise ValueError("q must be positive")
    if not 1 <= size <= _INDEX_CAP:
        raise ValueError(f"size must lie in [1, {_INDEX_CAP}], got {size}")
    X, Y = _build_tables(q, sign, size)
    entries = X.T @ Y
    return TruncatedMatrix(q=q, sign=sign, size=size, entries=entries)


def build_c_matrix(q: float, sign: SignChoice, size: int) -> np.ndarray:
    """N x N matrix of c entries, c[n, k], by the symmetric table product."""
    if q <= 0.0:
        raise ValueError("q must be positive")
    if not 1 <= size <= _INDEX_CAP:
        raise ValueError(f"size must lie in [1, {_INDEX_CAP}], got {size}")
    _, Y = _build_tables(q, sign, size)
    return Y.T @ Y


def adjacent_minor(q: float, sign: SignChoice, k: int, n: int) -> float:
    """Second-order minor of adjacent rows/columns anchored at (k, n).

    Returns alpha_{k,n} alpha_{k+1,n+1} - alpha_{k+1,n} alpha_{k,n+1},
    which is nonnegative up to rounding on the product scale.
    """
    a = entry_alpha(q, sign, k, n)
    b = entry_alpha(q, sign, k + 1, n + 1)
    c = entry_alpha(q, sign, k + 1, n)
    d = entry_alpha(q, sign, k, n + 1)
    return a * b - c * d


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of one structural identity check."""

    name: str
    max_violation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class IdentityReport:
    """Aggregated structural identity checks at one (q, N)."""

    q: float
    size: int
    checks: tuple[IdentityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "size": self.size,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


_TINY = 1e-300
_ROW_SUM_TERMS = 200


def _relative_minor_floor(entries: np.ndarray) -> float:
    """Most negative adjacent minor relative to its product scale."""
    a = entries[:-1, :-1]
    b = entries[1:, 1:]
    c = entries[1:, :-1]
    d = entries[:-1, 1:]
    minors = a * b - c * d
    scale = np.maximum(a * b + c * d, _TINY)
    return float(np.min(minors / scale))


def check_identities(q: float, size: int) -> IdentityReport:
    """Run the structural identity battery at one parameter value.

    Covers, for both signs where meaningful: the halving identity
    between rows 0 and 1 of A(+), the vanishing row/column 0 of A(-),
    consistency of A with D^{-1} C, nonnegativity of adjacent minors,
    and the two partial row-sum limits (2 for the plus row 0, 1 for the
    minus row 1, both over 200 terms).  Failures are data in the report,
    not exceptions.
    """
    if size < 2:
        raise ValueError("size must be at least 2")
    checks = []
    dvals = np.array([diag_d(q, n) for n in range(size)])
    for sign in (SignChoice.PLUS, SignChoice.MINUS):
        A = build_truncation(q, sign, size).entries
        C = build_c_matrix(q, sign, size)
        tag = sign.value
        if sign is SignChoice.PLUS:
            dev = np.abs(A[0] - 2.0 * A[1]) / np.maximum(np.abs(A[0]), _TINY)
            checks.append(IdentityCheck("halving_row0_row1_plus", float(dev.max()), 1e-14, bool(dev.max() <= 1e-14)))
        else:
            border = max(float(np.abs(A[0]).max()), float(np.abs(A[:, 0]).max()))
            checks.append(IdentityCheck("null_row_col0_minus", border, 0.0, border == 0.0))
        recon = C.T / dvals[:, None]
        dev = np.abs(A - recon) / np.maximum(np.abs(A), _TINY)
        if sign is SignChoice.MINUS:
            dev[0, :] = 0.0
            dev[:, 0] = 0.0
        checks.append(IdentityCheck(f"a_equals_dinv_c_{tag}", float(dev.max()), 1e-12, bool(dev.max() <= 1e-12)))
        sym = np.abs(C - C.T) / np.maximum(np.abs(C), _TINY)
        checks.append(IdentityCheck(f"c_symmetry_{tag}", float(sym.max()), 1e-13, bool(sym.max() <= 1e-13)))
        floor = _relative_minor_floor(A)
        checks.append(IdentityCheck(f"adjacent_minors_{tag}", max(0.0, -floor), 1e-14, bool(floor >= -1e-14)))
    row0 = math.fsum(entry_alpha(q, SignChoice.PLUS, 0, n) for n in range(_ROW_SUM_TERMS))
    checks.append(IdentityCheck("row_sum_plus_row0", abs(row0 - 2.0), 1e-8, abs(row0 - 2.0) < 1e-8))
    row1 = math.fsum(entry_alpha(q, SignChoice.MINUS, 1, n) for n in range(1, _ROW_SUM_TERMS))
    checks.append(IdentityCheck("row_sum_minus_row1", abs(row1 - 1.0), 1e-8, abs(row1 - 1.0) < 1e-8))
    return IdentityReport(q=q, size=size, checks=tuple(checks))


def matrix_to_csv(matrix: TruncatedMatrix) -> str:
    """Render a truncation as CSV with '#' metadata lines.

    After the metadata block comes a header row labeling the columns by
    basis index, then the entries row-major with 17 significant digits,
    one matrix row per CSV line.
    """
    lines = metadata_lines(q=matrix.q, sign=matrix.sign.value, N=matrix.size)
    lines.append(",".join(f"n{n}" for n in range(matrix.size)))
    for row in matrix.entries:
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"
