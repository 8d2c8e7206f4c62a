"""Dominant eigenpairs of the truncated operator matrices and sweeps.

The truncations are entrywise positive (after dropping the null row and
column of the minus sign), so the dominant pair is a simple Perron pair
and plain power iteration converges from any positive start.  Sweeps in
the truncation size N certify the eigenvalue from below: the sequence
lambda_N is non-decreasing, as is each eigenvector component under the
normalization used here.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .farey_matrix import SignChoice, TruncatedMatrix, build_truncation, diag_d
from .formats import format_bool, format_float, metadata_lines

GOLDEN_GAMMA = (math.sqrt(5.0) - 1.0) / 2.0

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 200000


def reference_bound(q: float, sign: SignChoice) -> float:
    """Eigenvalue bound drawn as the reference curve: 1 + 2^{-2q} or 1."""
    if sign is SignChoice.PLUS:
        return 1.0 + 2.0 ** (-2.0 * q)
    return 1.0


def spectral_bound(q: float) -> float:
    """Upper edge 1 + gamma^{2q} of the operator spectrum interval."""
    return 1.0 + GOLDEN_GAMMA ** (2.0 * q)


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Dominant eigenvalue and eigenvector of one truncation.

    Attributes:
        lam: the eigenvalue estimate lambda_N.
        phi: eigenvector of length size, with phi[normalization_index]
            equal to 1 exactly; for the minus sign phi[0] is 0.
        normalization_index: 0 for plus, 1 for minus.
        iterations: power-iteration steps performed.
        converged: whether successive eigenvalue estimates met tol.
        residual: ||A phi - lam phi||_inf / (lam ||phi||_inf), measured
            on the full truncation after iteration ends.
        degenerate: True only for the minus sign at N = 1, whose matrix
            is identically zero; then lam = 0 and phi = (0,), and the
            normalization invariant is vacuous.
    """

    lam: float
    phi: np.ndarray
    normalization_index: int
    iterations: int
    converged: bool
    q: float
    sign: SignChoice
    size: int
    residual: float
    degenerate: bool = False


def dominant_eigenpair(
    matrix: TruncatedMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenPair:
    """Power iteration for the Perron pair of a truncation.

    Starts from the all-ones vector, renormalizes by the component at
    the normalization index each step, and stops once successive
    eigenvalue estimates agree to tol relatively.  For the minus sign
    the iteration runs on the positive submatrix with indices >= 1.

    Args:
        matrix: truncation to solve.
        tol: relative tolerance on successive eigenvalue estimates,
            within [1e-15, 1e-6].
        max_iter: iteration cap; on hitting it the best estimate is
            returned with converged=False, never an exception.

    Returns:
        EigenPair with convergence metadata and the measured residual.
    """
    if not 1e-15 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-15, 1e-6], got {tol}")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    q, sign, size = matrix.q, matrix.sign, matrix.size
    norm_index = 0 if sign is SignChoice.PLUS else 1
    if sign is SignChoice.MINUS and size == 1:
        return EigenPair(
            lam=0.0,
            phi=np.zeros(1),
            normalization_index=norm_index,
            iterations=0,
            converged=True,
            q=q,
            sign=sign,
            size=size,
            residual=0.0,
            degenerate=True,
        )
    sub = matrix.entries if sign is SignChoice.PLUS else matrix.entries[1:, 1:]
    v = np.ones(sub.shape[0])
    lam = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = sub @ v
        lam_new = float(w[0])
        v = w / lam_new
        if iterations > 1 and abs(lam_new - lam) < tol * abs(lam_new):
            lam = lam_new
            converged = True
            break
        lam = lam_new
    phi = v if sign is SignChoice.PLUS else np.concatenate(([0.0], v))
    full_residual = float(
        np.max(np.abs(matrix.entries @ phi - lam * phi)) / (lam * np.max(np.abs(phi)))
    )
    return EigenPair(
        lam=lam,
        phi=phi,
        normalization_index=norm_index,
        iterations=iterations,
        converged=converged,
        q=q,
        sign=sign,
        size=size,
        residual=full_residual,
    )


@dataclass(frozen=True)
class SweepRecord:
    """One sampled point of a sweep curve."""

    parameter: float
    lam: float
    bound: float
    converged: bool
    iterations: int
    spectral_bound: float | None = None
    hypothesis_ok: bool | None = None


@dataclass(frozen=True)
class SweepCurve:
    """Tabulated (parameter, lambda, bound) records for one sweep.

    kind is "q" for parameter sweeps at fixed size and "N" for
    truncation sweeps at fixed q.  Parameters are strictly increasing.
    """

    kind: str
    records: tuple[SweepRecord, ...]

    def parameters(self) -> list[float]:
        return [r.parameter for r in self.records]

    def lambdas(self) -> list[float]:
        return [r.lam for r in self.records]


@dataclass(frozen=True)
class TruncationSweep:
    """Truncation sweep output: the curve plus monotonicity verdicts.

    heads holds the first ten eigenvector components per size (fewer
    when the size is smaller).  aitken_lambda is a diagnostic
    acceleration of the eigenvalue sequence and is never a certified
    value; the certified approximation from below is the last lambda.
    """

    curve: SweepCurve
    heads: tuple[tuple[float, ...], ...]
    lambda_monotone: bool
    component_monotone: tuple[bool, ...]
    aitken_lambda: float | None


_LAMBDA_MONOTONE_SLACK = 1e-13
_COMPONENT_MONOTONE_SLACK = 1e-12
_TRACKED_COMPONENTS = 10


def _worker_count() -> int:
    raw = os.environ.get("FAREY_SPECTRUM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def truncation_sweep(
    q: float,
    sign: SignChoice,
    sizes,
    tol: float = DEFAULT_TOL,
) -> TruncationSweep:
    """Solve a nested family of truncations and report monotonicity.

    The largest truncation is built once and the smaller ones are its
    north-west corners, so the whole sweep costs one matrix build.

    Args:
        q: operator parameter.
        sign: branch sign.
        sizes: strictly increasing truncation sizes.
        tol: eigensolver tolerance.

    Returns:
        TruncationSweep; lambda_monotone is the verdict that lambda_N
        never decreases (beyond 1e-13), component_monotone the same per
        tracked eigenvector component with 1e-12 slack.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be a nonempty strictly increasing sequence")
    big = build_truncation(q, sign, sizes[-1])

    def solve(n: int) -> EigenPair:
        corner = TruncatedMatrix(q=q, sign=sign, size=n, entries=big.entries[:n, :n])
        return dominant_eigenpair(corner, tol=tol)

    pairs = _map_ordered(solve, sizes)
    bound = reference_bound(q, sign)
    records = tuple(
        SweepRecord(
            parameter=float(n),
            lam=p.lam,
            bound=bound,
            converged=p.converged,
            iterations=p.iterations,
            spectral_bound=spectral_bound(q),
        )
        for n, p in zip(sizes, pairs)
    )
    lams = [p.lam for p in pairs]
    lambda_monotone = all(
        b - a >= -_LAMBDA_MONOTONE_SLACK for a, b in zip(lams, lams[1:])
    )
    heads = tuple(tuple(float(x) for x in p.phi[:_TRACKED_COMPONENTS]) for p in pairs)
    component_monotone = []
    for k in range(min(_TRACKED_COMPONENTS, sizes[-1])):
        ok = True
        prev = None
        for head in heads:
            if k >= len(head):
                continue
            if prev is not None and head[k] - prev < -_COMPONENT_MONOTONE_SLACK:
                ok = False
            prev = head[k]
        component_monotone.append(ok)
    aitken = None
    if len(lams) >= 3:
        d1 = lams[-1] - lams[-2]
        d2 = d1 - (lams[-2] - lams[-3])
        if d2 != 0.0:
            aitken = lams[-1] - d1 * d1 / d2
    return TruncationSweep(
        curve=SweepCurve(kind="N", records=records),
        heads=heads,
        lambda_monotone=lambda_monotone,
        component_monotone=tuple(component_monotone),
        aitken_lambda=aitken,
    )


def q_sweep(q_grid, sign: SignChoice, size: int, tol: float = DEFAULT_TOL) -> SweepCurve:
    """Sweep the dominant eigenvalue over a grid of q values.

    Each record carries the reference bound (1 + 2^{-2q} for plus, 1 for
    minus), the spectral bound 1 + gamma^{2q}, and for the plus sign the
    verdict of the component hypothesis phi_k <= 1/2 for k >= 1, under
    which the reference bound is proven.  The hypothesis is checked on
    the computed eigenvector, never assumed.
    """
    grid = [float(x) for x in q_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("q_grid must be a nonempty strictly increasing sequence")
    if any(x <= 0.0 for x in grid):
        raise ValueError("all q values must be positive")

    def solve(qv: float) -> SweepRecord:
        pair = dominant_eigenpair(build_truncation(qv, sign, size), tol=tol)
        hypothesis = None
        if sign is SignChoice.PLUS:
            # Allow rounding slack: phi_1 equals 1/2 up to 1 ulp by the
            # halving identity, and must not spuriously fail the check.
            hypothesis = bool(np.all(pair.phi[1:] <= 0.5 + 1e-12))
        return SweepRecord(
            parameter=qv,
            lam=pair.lam,
            bound=reference_bound(qv, sign),
            converged=pair.converged,
            iterations=pair.iterations,
            spectral_bound=spectral_bound(qv),
            hypothesis_ok=hypothesis,
        )

    return SweepCurve(kind="q", records=tuple(_map_ordered(solve, grid)))


def norm_partial_sums(pair: EigenPair) -> np.ndarray:
    """Partial weighted-norm sums S_N(k) of an eigenvector.

    S_N(k) = sum_{n <= k} phi_n^2 Gamma(n+2q)/n!, the quantity whose
    growth in k diagnoses whether the coefficient sequence lies in the
    weighted l^2 space behind the matrix representation.  Non-decreasing
    in k by construction.
    """
    if not pair.converged:
        raise ValueError("norm partial sums need a converged pair")
    weights = np.array([diag_d(pair.q, n) for n in range(pair.size)])
    return np.cumsum(pair.phi**2 * weights)


def sweep_to_csv(curve: SweepCurve, metadata: dict) -> str:
    """Render a sweep curve as CSV with '#' metadata lines.

    Columns are parameter, lambda, bound, converged, iterations with 17
    significant digits on the floats.
    """
    lines = metadata_lines(**metadata)
    lines.append("parameter,lambda,bound,converged,iterations")
    for r in curve.records:
        lines.append(
            ",".join(
                (
                    format_float(r.parameter),
                    format_float(r.lam),
                    format_float(r.bound),
                    format_bool(r.converged),
                    str(r.iterations),
                )
            )
        )
    return "\n".join(lines) + "\n"
