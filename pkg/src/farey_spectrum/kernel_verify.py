"""Quadrature checks of the operator representation behind the matrices.

On L^2 of the measure t^{2q-1} e^{-t} dt, the signed transfer operators
act as M +- N_q, where M multiplies by e^{-t} and N_q integrates against
the Bessel kernel J_{2q-1}(2 sqrt(st)) / (st)^{q-1/2}.  The two basis
families e_n (generalized Laguerre) and f_n (scaled monomials) are
swapped by the kernel: N_q f_n = M e_n and N_q e_n = M f_n.  This module
realizes M and N_q with Gauss-Laguerre rules and measures how well those
exchange relations, the basis orthogonality, and the matrix entries are
reproduced.  It is a verification harness, not a production quadrature:
residuals are reported, never assumed small.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .farey_matrix import SignChoice
from .specfun import QuadratureRule, bessel_j_series, laguerre_eval, log_gamma, monomial_eval


@dataclass(frozen=True)
class SampledFunction:
    """A function on (0, infinity) paired with a descriptive label."""

    fn: Callable[[float], float]
    label: str

    def __call__(self, t: float) -> float:
        return self.fn(t)


def basis_e(n: int, q: float) -> SampledFunction:
    """The Laguerre basis function e_n(t) = L_n^{2q-1}(t)."""
    return SampledFunction(lambda t: laguerre_eval(n, q, t), f"e_{n}")


def basis_f(n: int) -> SampledFunction:
    """The monomial family member f_n(t) = t^n / n!."""
    return SampledFunction(lambda t: monomial_eval(n, t), f"f_{n}")


def basis_ell(n: int, q: float, sign: SignChoice) -> SampledFunction:
    """The combination ell_n = e_n + f_n (plus) or e_n - f_n (minus)."""
    s = 1.0 if sign is SignChoice.PLUS else -1.0
    return SampledFunction(
        lambda t: laguerre_eval(n, q, t) + s * monomial_eval(n, t),
        f"ell_{n}^{sign.value}",
    )


def basis_zeta(n: int, q: float, sign: SignChoice) -> SampledFunction:
    """The damped combination zeta_n(t) = e^{-t} (e_n(t) +- f_n(t))."""
    s = 1.0 if sign is SignChoice.PLUS else -1.0
    return SampledFunction(
        lambda t: math.exp(-t) * (laguerre_eval(n, q, t) + s * monomial_eval(n, t)),
        f"zeta_{n}^{sign.value}",
    )


def apply_m(f: SampledFunction, t: float) -> float:
    """Multiplication operator: (M f)(t) = e^{-t} f(t)."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    return math.exp(-t) * f(t)


def _check_rule(q: float, rule: QuadratureRule) -> None:
    if abs(rule.alpha - (2.0 * q - 1.0)) > 1e-12:
        raise ValueError(
            f"rule has alpha={rule.alpha}, expected 2q-1={2.0 * q - 1.0} for q={q}"
        )


def apply_n_q_flagged(
    f: SampledFunction, t: float, q: float, rule: QuadratureRule
) -> tuple[float, bool]:
    """Kernel operator by quadrature, with the Bessel accuracy flag.

    Computes sum_i w_i J_{2q-1}(2 sqrt(s_i t)) / (s_i t)^{q-1/2} f(s_i)
    and reports whether any node drove the Bessel series into its
    cancellation regime (flag True means the value may be inaccurate).
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    _check_rule(q, rule)
    nu = 2.0 * q - 1.0
    power = 0.5 - q
    flagged = False
    terms = []
    for s, w in zip(rule.nodes, rule.weights):
        st = s * t
        res = bessel_j_series(nu, 2.0 * math.sqrt(st))
        if res.accuracy_loss:
            flagged = True
        terms.append(w * res.value * st**power * f(s))
    return math.fsum(terms), flagged


def apply_n_q(f: SampledFunction, t: float, q: float, rule: QuadratureRule) -> float:
    """Kernel operator (N_q f)(t) by Gauss-Laguerre quadrature."""
    value, _ = apply_n_q_flagged(f, t, q, rule)
    return value


def inner_product(f: SampledFunction, g: SampledFunction, rule: QuadratureRule) -> float:
    """Inner product against the measure via the quadrature rule."""
    return math.fsum(
        w * f(s) * g(s) for s, w in zip(rule.nodes, rule.weights)
    )


@dataclass(frozen=True)
class IntertwiningRecord:
    """Exchange-relation residuals for one (n, t)."""

    n: int
    t: float
    residual_fn: float
    residual_en: float


@dataclass(frozen=True)
class IntertwiningReport:
    """Residuals of N_q f_n = M e_n and N_q e_n = M f_n over a grid."""

    q: float
    quadrature_order: int
    records: tuple[IntertwiningRecord, ...]
    max_residual: float
    accuracy_loss: bool


def verify_intertwining(
    q: float, n_max: int, t_grid, rule: QuadratureRule
) -> IntertwiningReport:
    """Measure the exchange-relation residuals on a (n, t) grid.

    Args:
        q: operator parameter; the rule must carry alpha = 2q-1.
        n_max: largest basis index, at most 8 (desk scale).
        t_grid: evaluation points, all positive.
        rule: quadrature rule shared across the grid.

    Returns:
        IntertwiningReport; large residuals are data, not errors.
    """
    if not 0 <= n_max <= 8:
        raise ValueError("n_max must lie in [0, 8]")
    _check_rule(q, rule)
    records = []
    worst = 0.0
    flagged = False
    for n in range(n_max + 1):
        e_n = basis_e(n, q)
        f_n = basis_f(n)
        for t in t_grid:
            nf, flag_f = apply_n_q_flagged(f_n, t, q, rule)
            ne, flag_e = apply_n_q_flagged(e_n, t, q, rule)
            flagged = flagged or flag_f or flag_e
            r_fn = abs(nf - apply_m(e_n, t))
            r_en = abs(ne - apply_m(f_n, t))
            records.append(IntertwiningRecord(n=n, t=float(t), residual_fn=r_fn, residual_en=r_en))
            worst = max(worst, r_fn, r_en)
    return IntertwiningReport(
        q=q,
        quadrature_order=rule.order,
        records=tuple(records),
        max_residual=worst,
        accuracy_loss=flagged,
    )


def kernel_bound(q: float, st: float = 0.0) -> float:
    """Bound on |J_{2q-1}(2 sqrt(st)) / (st)^{q-1/2}| for q >= 1/2.

    With nu = 2q-1 >= 0 the Poisson integral representation gives
    |J_nu(x)| <= (x/2)^nu / Gamma(nu+1), so the kernel never exceeds
    1/Gamma(2q); and |J_nu(x)| <= 1 sharpens that to (st)^{1/2-q} once
    st >= 1.  Called with the product st, returns the tighter of the
    two; with the default st=0 it returns the uniform bound.
    """
    if q < 0.5:
        raise ValueError("kernel bound needs Bessel order 2q-1 >= 0, so q >= 0.5")
    uniform = math.exp(-log_gamma(2.0 * q))
    if st <= 1.0:
        return uniform
    return min(uniform, st ** (0.5 - q))


@lru_cache(maxsize=8)
def _kernel_table(q: float, rule: QuadratureRule):
    """Kernel values at all node pairs, with untrustworthy pairs bounded.

    Returns (values, bounds): values[i, j] holds the kernel at
    (t_i, s_j), zeroed where the Bessel series reported accuracy loss;
    bounds[i, j] holds kernel_bound(q, t_i s_j) exactly there and zero
    elsewhere.  Both tables are symmetric because the two factors run
    over the same rule.
    """
    nodes = rule.nodes
    count = len(nodes)
    power = 0.5 - q
    nu = 2.0 * q - 1.0
    values = np.zeros((count, count))
    bounds = np.zeros((count, count))
    for i in range(count):
        for j in range(i + 1):
            st = nodes[i] * nodes[j]
            res = bessel_j_series(nu, 2.0 * math.sqrt(st))
            if res.accuracy_loss:
                bounds[i, j] = bounds[j, i] = kernel_bound(q, st)
            else:
                values[i, j] = values[j, i] = res.value * st**power
    return values, bounds


def matrix_element_bounded(
    q: float, sign: SignChoice, n: int, k: int, rule: QuadratureRule
) -> tuple[float, float]:
    """Entry (P(+-) e_n, e_k) by nested quadrature, with a discard bound.

    Realizes apply_m(e_n, .) +- apply_n_q(e_n, .) at the rule's nodes
    and takes the quadrature inner product with e_k, written out as one
    double sum over node pairs.  Pairs whose Bessel evaluation lands in
    the series' cancellation regime carry no usable digits, but their
    true contribution is tiny (the double weight decays like
    e^{-s-t} <= e^{-2 sqrt(st)} while the kernel stays bounded), so
    those pairs are dropped and the second return value is a rigorous
    bound on everything dropped: kernel_bound(q, st) times the
    discarded weight mass.  The caller decides whether that bound is
    small enough; nothing is assumed here.
    """
    _check_rule(q, rule)
    values, bounds = _kernel_table(q, rule)
    nodes = np.asarray(rule.nodes)
    weights = np.asarray(rule.weights)
    ev_n = np.array([laguerre_eval(n, q, t) for t in nodes])
    ev_k = np.array([laguerre_eval(k, q, t) for t in nodes])
    wn = weights * ev_n
    wk = weights * ev_k
    m_part = float(np.dot(wk * ev_n, np.exp(-nodes)))
    n_part = float(wk @ values @ wn)
    bound = float(np.abs(wk) @ bounds @ np.abs(wn))
    s = 1.0 if sign is SignChoice.PLUS else -1.0
    return m_part + s * n_part, bound


def matrix_element(
    q: float, sign: SignChoice, n: int, k: int, rule: QuadratureRule
) -> float:
    """Entry (P(+-) e_n, e_k) computed purely by quadrature.

    The expensive dual route to entry_c; see matrix_element_bounded for
    the treatment of node pairs beyond the Bessel series' reach.
    """
    value, _ = matrix_element_bounded(q, sign, n, k, rule)
    return value


def report_records(report: IntertwiningReport) -> list[dict]:
    """Flat JSON-ready records {q, n, t, residual_fn, residual_en, quadrature_order}."""
    return [
        {
            "q": report.q,
            "n": r.n,
            "t": r.t,
            "residual_fn": r.residual_fn,
            "residual_en": r.residual_en,
            "quadrature_order": report.quadrature_order,
        }
        for r in report.records
    ]


def report_to_json(report: IntertwiningReport) -> str:
    """Serialize an intertwining report as a JSON array of flat records."""
    return json.dumps(report_records(report), indent=2) + "\n"
