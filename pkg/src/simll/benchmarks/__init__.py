"""Bundled combinational benchmark circuits.

``c17`` is the classic 6-gate NAND circuit. The ``gen*`` files are
deterministic stand-ins matching the interface widths of the usual
c432/c499/c880 benchmarks; regenerate them with scripts/gen_benchmarks.py
or replace them with the real files via scripts/fetch_benchmarks.py when
network access allows.
"""

from __future__ import annotations

from importlib import resources

from ..bench import Netlist, parse_bench

__all__ = ["bundled", "list_bundled"]


def list_bundled() -> list[str]:
    """Names of all bundled circuits, sorted."""
    names = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".bench"):
            names.append(entry.name[: -len(".bench")])
    return sorted(names)


def bundled(name: str) -> Netlist:
    """Load a bundled circuit by name (e.g. ``"c17"``)."""
    ref = resources.files(__package__) / f"{name}.bench"
    if not ref.is_file():
        raise FileNotFoundError(
            f"no bundled benchmark {name!r}; available: {', '.join(list_bundled())}"
        )
    return parse_bench(ref.read_text(), name=name)
