"""Command implementations shared by the CLI and the HTTP service.

Each function returns a JSON-ready payload dict; the CLI turns payloads
into CSV or JSON files and the service returns them over HTTP.  Keeping
this layer common guarantees that both routes produce byte-identical
artifacts from identical inputs.
"""

from __future__ import annotations

import math

import numpy as np

from .eigensolver import (
    dominant_eigenpair,
    norm_partial_sums,
    q_sweep,
    truncation_sweep,
)
from .farey_matrix import (
    SignChoice,
    build_truncation,
    check_identities,
    diag_d,
)
from .formats import TOOL_TAG
from .kernel_verify import (
    basis_e,
    inner_product,
    report_records,
    verify_intertwining,
)
from .specfun import gauss_laguerre, log_gamma
from .transfer_map import bq_transform_quadrature, reconstruct_eigenfunction, residual_table


def make_q_grid(q_min: float, q_max: float, q_step: float) -> list[float]:
    """Inclusive arithmetic grid from q_min to q_max in steps of q_step."""
    if q_min <= 0.0:
        raise ValueError("q_min must be positive")
    if q_max <= q_min:
        raise ValueError("q_max must exceed q_min")
    if q_step <= 0.0:
        raise ValueError("q_step must be positive")
    count = int(math.floor((q_max - q_min) / q_step + 1e-9)) + 1
    return [q_min + i * q_step for i in range(count)]


def _record_dict(r) -> dict:
    return {
        "parameter": r.parameter,
        "lambda": r.lam,
        "bound": r.bound,
        "converged": r.converged,
        "iterations": r.iterations,
        "spectral_bound": r.spectral_bound,
        "hypothesis_ok": r.hypothesis_ok,
    }


def entries_payload(q: float, sign: str, size: int) -> dict:
    matrix = build_truncation(q, SignChoice(sign), size)
    return {
        "q": q,
        "sign": sign,
        "size": size,
        "entries": [[float(v) for v in row] for row in matrix.entries],
        "tool": TOOL_TAG,
    }


def eigen_payload(q: float, sign: str, size: int, tol: float) -> dict:
    pair = dominant_eigenpair(build_truncation(q, SignChoice(sign), size), tol=tol)
    return {
        "q": q,
        "sign": sign,
        "size": size,
        "lambda": pair.lam,
        "phi": [float(v) for v in pair.phi],
        "normalization_index": pair.normalization_index,
        "iterations": pair.iterations,
        "converged": pair.converged,
        "residual": pair.residual,
        "degenerate": pair.degenerate,
        "tool": TOOL_TAG,
    }


def trunc_sweep_payload(q: float, sign: str, sizes: list[int], tol: float) -> dict:
    sweep = truncation_sweep(q, SignChoice(sign), sizes, tol=tol)
    return {
        "q": q,
        "sign": sign,
        "sizes": list(sizes),
        "kind": sweep.curve.kind,
        "records": [_record_dict(r) for r in sweep.curve.records],
        "heads": [list(h) for h in sweep.heads],
        "lambda_monotone": sweep.lambda_monotone,
        "component_monotone": list(sweep.component_monotone),
        "aitken_lambda": sweep.aitken_lambda,
        "converged_all": all(r.converged for r in sweep.curve.records),
        "tool": TOOL_TAG,
    }


def q_sweep_payload(
    q_min: float, q_max: float, q_step: float, sign: str, size: int, tol: float
) -> dict:
    grid = make_q_grid(q_min, q_max, q_step)
    curve = q_sweep(grid, SignChoice(sign), size, tol=tol)
    return {
        "q_min": q_min,
        "q_max": q_max,
        "q_step": q_step,
        "sign": sign,
        "size": size,
        "kind": curve.kind,
        "records": [_record_dict(r) for r in curve.records],
        "converged_all": all(r.converged for r in curve.records),
        "tool": TOOL_TAG,
    }


def norms_payload(q: float, sign: str, sizes: list[int], tol: float) -> dict:
    curves = []
    all_converged = True
    for size in sizes:
        pair = dominant_eigenpair(build_truncation(q, SignChoice(sign), size), tol=tol)
        if pair.converged:
            s_values = [float(v) for v in norm_partial_sums(pair)]
        else:
            all_converged = False
            s_values = []
        curves.append(
            {
                "size": size,
                "converged": pair.converged,
                "lambda": pair.lam,
                "s": s_values,
            }
        )
    return {
        "q": q,
        "sign": sign,
        "sizes": list(sizes),
        "curves": curves,
        "converged_all": all_converged,
        "tool": TOOL_TAG,
    }


def residual_payload(q: float, sign: str, size: int, tol: float, x_grid: list[float]) -> dict:
    pair = dominant_eigenpair(build_truncation(q, SignChoice(sign), size), tol=tol)
    if not pair.converged:
        return {
            "q": q,
            "sign": sign,
            "size": size,
            "lambda": pair.lam,
            "converged": False,
            "rows": [],
            "max_relative_residual": None,
            "tool": TOOL_TAG,
        }
    rows = residual_table(pair, x_grid)
    return {
        "q": q,
        "sign": sign,
        "size": size,
        "lambda": pair.lam,
        "converged": True,
        "rows": [
            {
                "x": r.x,
                "f_value": r.f_value,
                "transfer_value": r.transfer_value,
                "relative_residual": r.relative_residual,
            }
            for r in rows
        ],
        "max_relative_residual": max(r.relative_residual for r in rows),
        "tool": TOOL_TAG,
    }


def _check(name: str, violation: float, tolerance: float) -> dict:
    return {
        "name": name,
        "max_violation": float(violation),
        "tolerance": tolerance,
        "passed": bool(violation <= tolerance),
    }


def _log_moment(rule, j: int) -> float:
    """log of sum_i w_i t_i^j, evaluated stably in log space."""
    mask = rule.weights > 0.0
    logs = np.log(rule.weights[mask]) + j * np.log(rule.nodes[mask])
    peak = logs.max()
    return float(peak + math.log(np.exp(logs - peak).sum()))


def _quadrature_exactness_violation() -> float:
    worst = 0.0
    for order in (4, 16, 64):
        for alpha in (0.0, 0.5, 1.0):
            rule = gauss_laguerre(order, alpha)
            for j in range(2 * order):
                rel = abs(math.exp(_log_moment(rule, j) - log_gamma(alpha + 1.0 + j)) - 1.0)
                worst = max(worst, rel)
    return worst


def _orthogonality_violation(q: float, rule) -> float:
    worst = 0.0
    funcs = [basis_e(n, q) for n in range(7)]
    scale = [diag_d(q, n) for n in range(7)]
    for n in range(7):
        for m in range(n, 7):
            ip = inner_product(funcs[n], funcs[m], rule)
            expected = scale[n] if n == m else 0.0
            worst = max(worst, abs(ip - expected) / max(scale[n], scale[m]))
    return worst


def _bq_block_violation(q: float) -> float:
    rule = gauss_laguerre(80, 2.0 * q - 1.0)
    worst = 0.0
    for n in range(5):
        closed_scale = diag_d(q, n)
        for x in (0.25, 0.5, 0.75):
            closed = closed_scale * (1.0 - x) ** n
            quad = bq_transform_quadrature(q, n, x, rule)
            worst = max(worst, abs(quad - closed) / abs(closed))
    return worst


def _matrix_element_violations(q: float, rule) -> tuple[float, float, float]:
    """Quadrature route vs. the entry formula for n, k <= 4.

    Returns (plus relative, minus relative on nonzero entries, minus
    absolute on the structurally zero entries).  Each violation folds in
    the rigorous bound on node pairs the Bessel series could not reach,
    so a pass certifies the whole double sum, dropped tail included.
    """
    from .farey_matrix import entry_c
    from .kernel_verify import matrix_element_bounded

    rel_plus = rel_minus = abs_null = 0.0
    for n in range(5):
        for k in range(5):
            quad_plus, bound = matrix_element_bounded(q, SignChoice.PLUS, n, k, rule)
            quad_minus, _ = matrix_element_bounded(q, SignChoice.MINUS, n, k, rule)
            c_plus = entry_c(q, SignChoice.PLUS, n, k)
            c_minus = entry_c(q, SignChoice.MINUS, n, k)
            rel_plus = max(rel_plus, (abs(quad_plus - c_plus) + bound) / c_plus)
            if min(n, k) >= 1:
                rel_minus = max(rel_minus, (abs(quad_minus - c_minus) + bound) / c_minus)
            else:
                abs_null = max(abs_null, abs(quad_minus) + bound)
    return rel_plus, rel_minus, abs_null


def verify_payload(q: float, size: int) -> dict:
    """Aggregate identity suite over all modules at one (q, size).

    Bundles the matrix identity battery with the quadrature, basis and
    kernel cross-checks; every check carries its own tolerance and the
    overall verdict is the conjunction.  Check values are measured
    violations, so failures show up as data, not exceptions.

    Requires q >= 0.5: the kernel checks evaluate Bessel functions of
    order 2q-1, which the series implementation supports for
    nonnegative order only.
    """
    if q < 0.5:
        raise ValueError(
            "verify requires q >= 0.5 (kernel checks use Bessel order 2q-1 >= 0)"
        )
    report = check_identities(q, size)
    checks = [c.to_dict() for c in report.checks]
    checks.append(_check("quadrature_exactness", _quadrature_exactness_violation(), 1e-10))
    rule60 = gauss_laguerre(60, 2.0 * q - 1.0)
    checks.append(_check("laguerre_orthogonality", _orthogonality_violation(q, rule60), 1e-9))
    kernel_report = verify_intertwining(q, 3, (0.5, 1.0, 2.0), rule60)
    checks.append(_check("intertwining_max_residual", kernel_report.max_residual, 1e-6))
    checks.append(_check("bq_building_block", _bq_block_violation(q), 1e-8))
    rule40 = gauss_laguerre(40, 2.0 * q - 1.0)
    rel_plus, rel_minus, abs_null = _matrix_element_violations(q, rule40)
    checks.append(_check("matrix_element_consistency_plus", rel_plus, 1e-6))
    checks.append(_check("matrix_element_consistency_minus", rel_minus, 1e-6))
    checks.append(_check("matrix_element_minus_null", abs_null, 1e-8))
    return {
        "q": q,
        "size": size,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "intertwining_records": report_records(kernel_report),
        "tool": TOOL_TAG,
    }
