"""The interval map, pointwise transfer operators, and eigenfunctions.

The map sends x to x/(1-x) on the left half of [0,1] and to (1-x)/x on
the right half; its transfer operators average a function over the two
preimages with weight (x+1)^{-2q} and a sign between the branches.  A
coefficient vector phi from the matrix eigenproblem lifts to an actual
function on (0,1) through the integral transform of the basis, whose
closed form per basis element is (Gamma(2q+n)/n!) (1-x)^n.  That turns
the eigenvector into a plain power series in (1-x) and enables an
end-to-end residual check of the whole pipeline, independent of the
matrix algebra that produced the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import EigenPair
from .farey_matrix import SignChoice, diag_d
from .formats import format_float, metadata_lines
from .specfun import QuadratureRule, laguerre_eval


def farey(x: float) -> float:
    """The interval map: x/(1-x) left of 1/2, (1-x)/x right of it.

    Both branch formulas agree at x = 1/2, where the map reaches 1; the
    endpoints 0 and 1 map to 0.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x <= 0.5:
        return x / (1.0 - x)
    return (1.0 - x) / x


@dataclass(frozen=True, eq=False)
class EigenfunctionSeries:
    """A function f(x) = sum_n phi_n (Gamma(2q+n)/n!) (1-x)^n on (0,1).

    The stored series_coeffs are the products phi_n Gamma(2q+n)/n!.
    Truncation is inherent: the evaluator exposes a crude tail bound,
    |last kept term| * N, instead of assuming any decay rate for phi.
    """

    q: float
    phi: np.ndarray
    series_coeffs: np.ndarray

    def evaluate(self, x: float) -> float:
        """Evaluate by Horner's scheme in the variable u = 1 - x."""
        u = 1.0 - x
        acc = 0.0
        for c in self.series_coeffs[::-1]:
            acc = acc * u + c
        return acc

    __call__ = evaluate

    def tail_bound(self, x: float) -> float:
        """Reported truncation-tail bound |a_{N-1} (1-x)^{N-1}| * N."""
        n = len(self.series_coeffs)
        u = 1.0 - x
        return abs(self.series_coeffs[-1] * u ** (n - 1)) * n


def reconstruct_eigenfunction(pair: EigenPair) -> EigenfunctionSeries:
    """Lift a converged matrix eigenpair to a function on (0, 1).

    Args:
        pair: converged, non-degenerate eigenpair.

    Returns:
        The power series in (1-x) with coefficients phi_n Gamma(2q+n)/n!.
    """
    if not pair.converged:
        raise ValueError("eigenfunction reconstruction needs a converged pair")
    if pair.degenerate:
        raise ValueError("degenerate pair has no eigenfunction")
    weights = np.array([diag_d(pair.q, n) for n in range(pair.size)])
    return EigenfunctionSeries(
        q=pair.q, phi=np.asarray(pair.phi, dtype=float), series_coeffs=pair.phi * weights
    )


def bq_transform_quadrature(q: float, n: int, x: float, rule: QuadratureRule) -> float:
    """The basis transform x^{-2q} int e^{-t/x} e^t e_n(t) m_q(dt) by quadrature.

    Independent numerical route for the closed form
    (Gamma(2q+n)/n!) (1-x)^n used by reconstruct_eigenfunction.  The
    exponentials are combined into exp(t (1 - 1/x)) before evaluation,
    which decays for x < 1, so no node overflows.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0, 1)")
    if abs(rule.alpha - (2.0 * q - 1.0)) > 1e-12:
        raise ValueError("rule alpha must equal 2q-1")
    decay = 1.0 - 1.0 / x
    total = math.fsum(
        w * math.exp(t * decay) * laguerre_eval(n, q, t)
        for t, w in zip(rule.nodes, rule.weights)
    )
    return x ** (-2.0 * q) * total


def apply_transfer_pointwise(f: EigenfunctionSeries, sign: SignChoice, x: float) -> float:
    """Pointwise transfer operator applied to a series function.

    Returns (1/(x+1))^{2q} [ f(x/(x+1)) +- f(1/(x+1)) ]; the two
    arguments are the preimages of x under the map's branches.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0, 1)")
    weight = (1.0 / (x + 1.0)) ** (2.0 * f.q)
    left = f.evaluate(x / (x + 1.0))
    right = f.evaluate(1.0 / (x + 1.0))
    if sign is SignChoice.PLUS:
        return weight * (left + right)
    return weight * (left - right)


@dataclass(frozen=True)
class ResidualRow:
    """One grid point of the end-to-end residual table."""

    x: float
    f_value: float
    transfer_value: float
    relative_residual: float


def residual_table(pair: EigenPair, x_grid) -> list[ResidualRow]:
    """Tabulate f, the transferred f, and their relative mismatch.

    The relative residual at x is |(P f)(x) - lam f(x)| / (lam |f(x)|).
    """
    if not pair.converged:
        raise ValueError("residual table needs a converged pair")
    series = reconstruct_eigenfunction(pair)
    rows = []
    for x in x_grid:
        x = float(x)
        fx = series.evaluate(x)
        px = apply_transfer_pointwise(series, pair.sign, x)
        rel = abs(px - pair.lam * fx) / (pair.lam * abs(fx))
        rows.append(ResidualRow(x=x, f_value=fx, transfer_value=px, relative_residual=rel))
    return rows


def eigen_residual(pair: EigenPair, x_grid) -> float:
    """Max relative residual of the transfer equation over the grid."""
    return max(row.relative_residual for row in residual_table(pair, x_grid))


def residual_rows_to_csv(rows, metadata: dict) -> str:
    """Render residual rows as CSV with '#' metadata lines."""
    lines = metadata_lines(**metadata)
    lines.append("x,f_value,transfer_value,relative_residual")
    for r in rows:
        lines.append(
            ",".join(
                (
                    format_float(r.x),
                    format_float(r.f_value),
                    format_float(r.transfer_value),
                    format_float(r.relative_residual),
                )
            )
        )
    return "\n".join(lines) + "\n"
