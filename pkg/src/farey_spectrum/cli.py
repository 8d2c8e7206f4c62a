"""Command-line interface: one-shot commands emitting CSV or JSON.

The CLI is a thin client over the shared command layer.  By default it
computes in process; with --server URL it posts the same parameters to a
running HTTP service and formats the returned payload identically, so
both routes write byte-identical files.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3
non-convergence.  The environment variable FAREY_SPECTRUM_THREADS caps
sweep parallelism (default 1, fully deterministic either way).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import runner
from .eigensolver import SweepCurve, SweepRecord, sweep_to_csv
from .farey_matrix import SignChoice, TruncatedMatrix, matrix_to_csv
from .formats import TOOL_TAG, format_float, metadata_lines
from .transfer_map import ResidualRow, residual_rows_to_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_NOT_CONVERGED = 3

_DEFAULT_FORMAT = {
    "entries": "csv",
    "eigen": "json",
    "trunc-sweep": "csv",
    "q-sweep": "csv",
    "norms": "csv",
    "verify": "json",
    "residual": "csv",
}

_CSV_COMMANDS = {"entries", "trunc-sweep", "q-sweep", "norms", "residual"}


class CliError(Exception):
    """Error carrying the process exit code."""

    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the documented usage
    # code here is 1, so route errors through CliError instead.
    def error(self, message):
        raise CliError(message)


@dataclass
class RunConfig:
    """Parsed invocation: which command to run and with what parameters."""

    command: str
    sign: str | None = None
    q: float | None = None
    q_min: float | None = None
    q_max: float | None = None
    q_step: float | None = None
    size: int | None = None
    sizes: list[int] | None = None
    sizes_text: str | None = None
    x_grid: list[float] | None = None
    tol: float = 1e-13
    output: str = "-"
    fmt: str | None = None
    server: str | None = None


def _parse_sizes(text: str) -> list[int]:
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ":" in part:
                lo, hi = part.split(":", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}: {exc}") from None
    if not out or any(b <= a for a, b in zip(out, out[1:])):
        raise argparse.ArgumentTypeError("sizes must be strictly increasing")
    return out


def _parse_x_grid(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad x grid {text!r}: {exc}") from None
    if not values or any(not 0.0 < x < 1.0 for x in values):
        raise argparse.ArgumentTypeError("x grid values must lie in (0, 1)")
    return values


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--tol", type=float, default=1e-13, help="eigensolver tolerance (default 1e-13)")
    sub.add_argument("--output", "-o", default="-", help="output path, '-' for stdout (default)")
    sub.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format (default per command)")
    sub.add_argument("--server", help="base URL of a running service; compute there instead of in process")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="farey-spectrum",
        description=(
            "Dominant eigenvalues of the signed Farey transfer operators in a "
            "generalized Laguerre basis: matrix export, eigenpairs, sweeps, "
            "norm diagnostics and structural verification."
        ),
    )
    parser.add_argument("--version", action="version", version=TOOL_TAG)
    subs = parser.add_subparsers(dest="command", metavar="command")

    p = subs.add_parser("entries", help="export a truncated operator matrix")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--size", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("eigen", help="dominant eigenvalue and eigenvector of one truncation")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--size", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("trunc-sweep", help="eigenvalue versus truncation size at fixed q")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--sizes", type=str, required=True, help="comma list and/or a:b ranges, e.g. 1:50")
    _add_common(p)

    p = subs.add_parser("q-sweep", help="eigenvalue versus q at fixed truncation size")
    p.add_argument("--q-min", type=float, required=True)
    p.add_argument("--q-max", type=float, required=True)
    p.add_argument("--q-step", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--size", type=int, required=True)
    _add_common(p)

    p = subs.add_parser("norms", help="partial weighted-norm sums S_N(k) of eigenvectors")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--sizes", type=str, required=True)
    _add_common(p)

    p = subs.add_parser("verify", help="run the structural identity suites")
    p.add_argument("--q", type=float, default=0.5, help="operator parameter, at least 0.5 (default 0.5)")
    p.add_argument("--size", type=int, default=50)
    _add_common(p)

    p = subs.add_parser("residual", help="end-to-end eigenfunction residual on a grid")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--x-grid", type=str, default=None, help="comma list of points in (0,1)")
    _add_common(p)

    return parser


_DEFAULT_X_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise CliError("a command is required (see --help)")
    config = RunConfig(command=ns.command)
    for attr in ("sign", "q", "size", "tol", "output", "fmt", "server"):
        if hasattr(ns, attr):
            setattr(config, attr, getattr(ns, attr))
    if hasattr(ns, "q_min"):
        config.q_min, config.q_max, config.q_step = ns.q_min, ns.q_max, ns.q_step
    if hasattr(ns, "sizes"):
        config.sizes_text = ns.sizes
        config.sizes = _parse_sizes_checked(ns.sizes)
    if hasattr(ns, "x_grid"):
        config.x_grid = _parse_x_grid_checked(ns.x_grid) if ns.x_grid else list(_DEFAULT_X_GRID)
    if not 1e-15 <= config.tol <= 1e-6:
        raise CliError("tol must lie in [1e-15, 1e-6]")
    if config.fmt == "csv" and config.command not in _CSV_COMMANDS:
        raise CliError(f"command {config.command!r} has no CSV form; use json")
    return config


def _parse_sizes_checked(text: str) -> list[int]:
    try:
        return _parse_sizes(text)
    except argparse.ArgumentTypeError as exc:
        raise CliError(str(exc)) from None


def _parse_x_grid_checked(text: str) -> list[float]:
    try:
        return _parse_x_grid(text)
    except argparse.ArgumentTypeError as exc:
        raise CliError(str(exc)) from None


def _params(config: RunConfig) -> dict:
    c = config
    if c.command == "entries":
        return {"q": c.q, "sign": c.sign, "size": c.size}
    if c.command == "eigen":
        return {"q": c.q, "sign": c.sign, "size": c.size, "tol": c.tol}
    if c.command == "trunc-sweep":
        return {"q": c.q, "sign": c.sign, "sizes": c.sizes, "tol": c.tol}
    if c.command == "q-sweep":
        return {
            "q_min": c.q_min,
            "q_max": c.q_max,
            "q_step": c.q_step,
            "sign": c.sign,
            "size": c.size,
            "tol": c.tol,
        }
    if c.command == "norms":
        return {"q": c.q, "sign": c.sign, "sizes": c.sizes, "tol": c.tol}
    if c.command == "verify":
        return {"q": c.q, "size": c.size}
    if c.command == "residual":
        return {"q": c.q, "sign": c.sign, "size": c.size, "tol": c.tol, "x_grid": c.x_grid}
    raise CliError(f"unknown command {c.command!r}")


_LOCAL = {
    "entries": runner.entries_payload,
    "eigen": runner.eigen_payload,
    "trunc-sweep": runner.trunc_sweep_payload,
    "q-sweep": runner.q_sweep_payload,
    "norms": runner.norms_payload,
    "verify": runner.verify_payload,
    "residual": runner.residual_payload,
}


def _fetch_remote(server: str, command: str, params: dict) -> dict:
    import httpx

    url = server.rstrip("/") + "/" + command
    try:
        response = httpx.post(url, json=params, timeout=600.0)
    except httpx.HTTPError as exc:
        raise CliError(f"server request failed: {exc}") from None
    if response.status_code == 422:
        raise CliError(f"server rejected parameters: {response.text}")
    if response.status_code != 200:
        raise CliError(f"server error {response.status_code}: {response.text}")
    return response.json()


def _records_from_payload(payload: dict) -> SweepCurve:
    records = tuple(
        SweepRecord(
            parameter=r["parameter"],
            lam=r["lambda"],
            bound=r["bound"],
            converged=r["converged"],
            iterations=r["iterations"],
        )
        for r in payload["records"]
    )
    return SweepCurve(kind=payload["kind"], records=records)


def _render_csv(config: RunConfig, payload: dict) -> str:
    c = config.command
    if c == "entries":
        matrix = TruncatedMatrix(
            q=payload["q"],
            sign=SignChoice(payload["sign"]),
            size=payload["size"],
            entries=np.array(payload["entries"], dtype=float),
        )
        return matrix_to_csv(matrix)
    if c == "trunc-sweep":
        meta = {"q": payload["q"], "sign": payload["sign"], "N": config.sizes_text}
        return sweep_to_csv(_records_from_payload(payload), meta)
    if c == "q-sweep":
        grid = f'{payload["q_min"]!r}:{payload["q_max"]!r}:{payload["q_step"]!r}'
        meta = {"q": grid, "sign": payload["sign"], "N": payload["size"]}
        return sweep_to_csv(_records_from_payload(payload), meta)
    if c == "norms":
        lines = metadata_lines(q=payload["q"], sign=payload["sign"], N=config.sizes_text)
        lines.append("size,k,s")
        for curve in payload["curves"]:
            for k, s in enumerate(curve["s"]):
                lines.append(f'{curve["size"]},{k},{format_float(s)}')
        return "\n".join(lines) + "\n"
    if c == "residual":
        rows = [ResidualRow(**r) for r in payload["rows"]]
        meta = {"q": payload["q"], "sign": payload["sign"], "N": payload["size"]}
        return residual_rows_to_csv(rows, meta)
    raise CliError(f"command {c!r} has no CSV form; use json")


def _render(config: RunConfig, payload: dict) -> str:
    fmt = config.fmt or _DEFAULT_FORMAT[config.command]
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    return _render_csv(config, payload)


def _exit_code(command: str, payload: dict) -> int:
    if command == "verify":
        return EXIT_OK if payload["passed"] else EXIT_VERIFY_FAILED
    if command == "eigen" or command == "residual":
        return EXIT_OK if payload["converged"] else EXIT_NOT_CONVERGED
    if command in ("trunc-sweep", "q-sweep", "norms"):
        return EXIT_OK if payload["converged_all"] else EXIT_NOT_CONVERGED
    return EXIT_OK


def _write(output: str, text: str) -> None:
    if output == "-":
        sys.stdout.write(text)
        return
    try:
        with open(output, "w", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {output!r}: {exc}") from None


def run(config: RunConfig) -> int:
    """Execute a parsed configuration and return the exit code.

    Output is written even when the status is nonzero, so partial or
    failed results stay inspectable.
    """
    params = _params(config)
    if config.server:
        payload = _fetch_remote(config.server, config.command, params)
    else:
        payload = _LOCAL[config.command](**params)
    _write(config.output, _render(config, payload))
    return _exit_code(config.command, payload)


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
        return run(config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
