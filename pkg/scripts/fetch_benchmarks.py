#!/usr/bin/env python3
"""Fetch the original ISCAS-85 c432/c499/c880 bench files.

Downloads from the Pleszkun/Brglez mirror hosted by the ISCAS-85 archive at
pld.ttu.ee and drops them into src/simll/benchmarks/, replacing the gen*
stand-ins for experiments that want the historical circuits. Requires
outbound network access; in an offline environment this script fails and
the bundled stand-ins remain in use.
"""

from __future__ import annotations

import pathlib
import sys
import urllib.error
import urllib.request

MIRRORS = [
    "https://pld.ttu.ee/~maksim/benchmarks/iscas85/bench/{name}.bench",
    "https://ddd.fit.cvut.cz/www/prj/Benchmarks/ISCAS85/BENCH/{name}.bench",
]
NAMES = ["c432", "c499", "c880"]
OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "simll" / "benchmarks"


def fetch(name: str) -> bytes:
    last: Exception | None = None
    for pattern in MIRRORS:
        url = pattern.format(name=name)
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError) as exc:
            print(f"  {url}: {exc}", file=sys.stderr)
            last = exc
    raise SystemExit(f"could not fetch {name}: {last}")


def main() -> None:
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))
    from simll.bench import parse_bench

    for name in NAMES:
        print(f"fetching {name}...")
        raw = fetch(name).decode("utf-8", errors="replace")
        n = parse_bench(raw, name=name)
        path = OUT_DIR / f"{name}.bench"
        path.write_text(raw)
        print(f"  ok: {len(n.inputs)} inputs, {len(n.outputs)} outputs, {len(n.gates)} gates -> {path}")


if __name__ == "__main__":
    main()
