"""Shared output formatting: CSV metadata lines and float rendering.

All file output goes through these helpers so that repeated runs with
the same inputs are byte identical.
"""

from __future__ import annotations

from ._version import __version__

TOOL_TAG = f"farey-spectrum/{__version__}"


def format_float(x: float) -> str:
    """Render a float with 17 significant digits (lossless round-trip)."""
    return "%.17g" % x


def format_bool(b: bool) -> str:
    return "true" if b else "false"


def metadata_lines(**fields) -> list[str]:
    """Comment lines ('# key = value') for the given fields, plus the tool tag.

    Field order follows the call site.  Floats use repr, which is the
    shortest representation that round-trips exactly.
    """
    lines = []
    for key, value in fields.items():
        if isinstance(value, float):
            text = repr(value)
        elif isinstance(value, (list, tuple)):
            text = ",".join(str(v) for v in value)
        else:
            text = str(value)
        lines.append(f"# {key} = {text}")
    lines.append(f"# tool = {TOOL_TAG}")
    return lines
