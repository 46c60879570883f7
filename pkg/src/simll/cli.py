"""Command-line front end wiring the toolchain into reproducible pipelines.

Subcommands: ``lock`` (insert key MUXes), ``clusters`` (structural
similarity listing), ``attack`` (oracle-less key guessing), ``eval``
(score a guess), ``verify`` (correct-key equivalence).  Every run is
seeded, and every file-producing run drops a JSON manifest next to its
outputs recording the command, parameters, and input/output digests, so
rerunning the recorded command reproduces the artifacts byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import pathlib
import sys

from . import __version__
from .attacks import (
    AttackError,
    cp_attack,
    parse_guess_file,
    random_guess,
    saam_attack,
    wl_attack,
    write_guess_file,
)
from .bench import BenchError, MuxStyle, load_bench, write_bench
from .graph import to_graph
from .locking import (
    LockingError,
    dmux_lock,
    naive_mux_lock,
    parse_key_file,
    parse_lock_report,
    simll_lock,
    write_key_file,
    write_lock_report,
)
from .sim import (
    DEFAULT_PATTERNS,
    DEFAULT_X_RESOLUTIONS,
    DESK_PATTERNS,
    equivalence_check,
    evaluate_guess,
)
from .similarity import StateInterner, cluster_stats, link_clusters, node_clusters

SCHEMES = ("simll", "dmux", "naive")
METHODS = ("saam", "cp", "wl", "random")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _hops_int(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 4:
        raise argparse.ArgumentTypeError(f"hops must be in 1..4, got {value}")
    return value


def _strategy_list(text: str) -> tuple[str, ...]:
    items = tuple(s.strip().upper() for s in text.split(",") if s.strip())
    if not items:
        raise argparse.ArgumentTypeError("empty strategy list")
    return items


def _sha256(path: pathlib.Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _params(ns: argparse.Namespace) -> dict:
    skip = {"func", "subcommand"}
    out = {}
    for k, v in vars(ns).items():
        if k in skip:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _write_manifest(
    manifest_path: pathlib.Path,
    ns: argparse.Namespace,
    tokens: list[str],
    inputs: list[pathlib.Path],
    outputs: list[pathlib.Path],
) -> None:
    doc = {
        "tool": "simll",
        "version": __version__,
        "subcommand": ns.subcommand,
        "command": tokens,
        "params": _params(ns),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    manifest_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---- lock ---------------------------------------------------------------


def cmd_lock(ns: argparse.Namespace, tokens: list[str]) -> int:
    src = pathlib.Path(ns.input)
    n = load_bench(src)
    if ns.scheme == "simll":
        design = simll_lock(
            n, ns.keys, hops=ns.hops, strategies=ns.strategies, seed=ns.seed
        )
    elif ns.scheme == "dmux":
        design = dmux_lock(n, ns.keys, strategies=ns.strategies, seed=ns.seed)
    else:
        design = naive_mux_lock(n, ns.keys, seed=ns.seed)

    out_dir = pathlib.Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    style = MuxStyle.DECOMPOSED if ns.mux_style == "decomposed" else MuxStyle.PRIMITIVE
    locked_path = out_dir / "locked.bench"
    key_path = out_dir / "key.txt"
    report_path = out_dir / "lockreport.txt"
    locked_path.write_text(write_bench(design.netlist, style))
    key_path.write_text(write_key_file(design.key))
    report_path.write_text(write_lock_report(design))
    _write_manifest(
        out_dir / "manifest.json", ns, tokens, [src], [locked_path, key_path, report_path]
    )
    print(
        f"locked {n.name}: scheme={design.scheme} keys={len(design.key)} "
        f"muxes={len(design.records)} seed={design.seed} -> {out_dir}"
    )
    return 0


# ---- clusters -----------------------------------------------------------


def _short(digest: str) -> str:
    return digest[:12]


def _cluster_lines(ns: argparse.Namespace, src: pathlib.Path) -> str:
    n = load_bench(src)
    g = to_graph(n)
    interner = StateInterner()
    lines = [
        f"# tool=simll version={__version__}",
        f"# input={src} sha256={_sha256(src)}",
        f"# circuit={n.name} nodes={len(g.nodes)} links={len(g.edges)} "
        f"hops={ns.hops} seed={ns.seed}",
    ]
    if ns.kind in ("node", "both"):
        cs = node_clusters(g, ns.hops, interner)
        st = cluster_stats(cs)
        lines.append(
            f"# [node] clusters={st.n_clusters} singletons={st.n_singletons} "
            f"largest={st.largest} grouped_fraction={st.grouped_fraction:.4f}"
        )
        for i, c in enumerate(cs.clusters):
            members = " ".join(c.members)
            lines.append(f"node cluster={i} size={c.size} digest={_short(c.digest)}: {members}")
    if ns.kind in ("link", "both"):
        cs = link_clusters(g, ns.hops, interner)
        st = cluster_stats(cs)
        lines.append(
            f"# [link] clusters={st.n_clusters} singletons={st.n_singletons} "
            f"largest={st.largest} grouped_fraction={st.grouped_fraction:.4f}"
        )
        for i, c in enumerate(cs.clusters):
            members = " ".join(f"{u}->{v}" for u, v in c.members)
            lines.append(f"link cluster={i} size={c.size} digest={_short(c.digest)}: {members}")
    return "\n".join(lines) + "\n"


def cmd_clusters(ns: argparse.Namespace, tokens: list[str]) -> int:
    src = pathlib.Path(ns.input)
    text = _cluster_lines(ns, src)
    if ns.out:
        out = pathlib.Path(ns.out)
        out.write_text(text)
        _write_manifest(
            out.with_name(out.name + ".manifest.json"), ns, tokens, [src], [out]
        )
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return 0


# ---- attack -------------------------------------------------------------


def cmd_attack(ns: argparse.Namespace, tokens: list[str]) -> int:
    src = pathlib.Path(ns.locked)
    locked = load_bench(src)
    inputs = [src]
    if ns.method == "saam":
        result = saam_attack(locked)
    elif ns.method == "cp":
        result = cp_attack(locked, margin=ns.margin)
    elif ns.method == "random":
        result = random_guess(locked, seed=ns.seed)
    else:
        report_path = pathlib.Path(ns.lockreport)
        records = parse_lock_report(report_path.read_text())
        result = wl_attack(locked, records, hops=ns.hops)
        inputs.append(report_path)

    out = pathlib.Path(ns.out)
    out.write_text(write_guess_file(result))
    _write_manifest(out.with_name(out.name + ".manifest.json"), ns, tokens, inputs, [out])
    decided = result.guess.n_decided
    total = len(result.guess.bits)
    print(f"attack={result.attack} bits={total} decided={decided} x={total - decided} -> {out}")
    return 0


# ---- eval ---------------------------------------------------------------


def _ordered_truth(key_map: dict[str, int], locked_keys: tuple[str, ...]) -> list[int]:
    if set(key_map) != set(locked_keys):
        raise LockingError(
            f"key file names {sorted(key_map)} do not match the locked "
            f"design's key inputs {sorted(locked_keys)}"
        )
    return [key_map[f"keyinput{i}"] for i in range(len(locked_keys))]


def cmd_eval(ns: argparse.Namespace, tokens: list[str]) -> int:
    oracle_path = pathlib.Path(ns.oracle)
    locked_path = pathlib.Path(ns.locked)
    key_path = pathlib.Path(ns.key)
    guess_path = pathlib.Path(ns.guess)
    oracle = load_bench(oracle_path)
    locked = load_bench(locked_path)
    truth = _ordered_truth(parse_key_file(key_path.read_text()), locked.key_inputs)
    guess = parse_guess_file(guess_path.read_text())
    if len(guess.bits) != len(truth):
        raise AttackError(
            f"guess width {len(guess.bits)} does not match key width {len(truth)}"
        )
    report = evaluate_guess(
        oracle,
        locked,
        truth,
        guess,
        n_patterns=ns.patterns,
        n_resolutions=ns.xseeds,
        pattern_seed=ns.seed,
        resolution_seed=ns.seed + 1,
        threads=ns.threads,
    )
    sys.stdout.write(report.to_table() if ns.pretty else report.to_kv())
    if ns.out:
        out = pathlib.Path(ns.out)
        out.write_text(report.to_kv())
        _write_manifest(
            out.with_name(out.name + ".manifest.json"),
            ns,
            tokens,
            [oracle_path, locked_path, key_path, guess_path],
            [out],
        )
    return 0


# ---- verify -------------------------------------------------------------


def cmd_verify(ns: argparse.Namespace, tokens: list[str]) -> int:
    try:
        oracle = load_bench(pathlib.Path(ns.oracle))
        locked = load_bench(pathlib.Path(ns.locked))
        key_map = parse_key_file(pathlib.Path(ns.key).read_text())
        truth = _ordered_truth(key_map, locked.key_inputs)
        assignment = {f"keyinput{i}": b for i, b in enumerate(truth)}
        verdict = equivalence_check(
            oracle, locked, assignment, n_random=ns.patterns, seed=ns.seed
        )
    except (BenchError, LockingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if verdict.equivalent:
        print(f"PASS mode={verdict.mode} patterns={verdict.n_patterns}")
        return 0
    bad = ",".join(verdict.mismatched_outputs)
    cex = " ".join(f"{k}={v}" for k, v in sorted(verdict.counterexample.items()))
    print(f"FAIL mode={verdict.mode} patterns={verdict.n_patterns} outputs={bad}")
    print(f"counterexample: {cex}")
    return 1


# ---- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simll",
        description="Similarity-guided MUX locking toolchain for .bench netlists.",
    )
    parser.add_argument("--version", action="version", version=f"simll {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="run seed (recorded)")
    common.add_argument(
        "--threads", type=_positive_int, default=1, help="max worker processes"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("lock", parents=[common], help="insert key MUXes into a netlist")
    p.add_argument("--in", dest="input", required=True, help="input .bench file")
    p.add_argument("--keys", type=_positive_int, required=True, help="key size (>= 1)")
    p.add_argument("--hops", type=_hops_int, default=2, help="similarity radius (simll)")
    p.add_argument("--scheme", choices=SCHEMES, default="simll")
    p.add_argument(
        "--strategies",
        type=_strategy_list,
        default=("S1", "S2", "S3", "S4"),
        help="comma-separated insertion strategies (simll/dmux)",
    )
    p.add_argument("--mux-style", choices=("primitive", "decomposed"), default="primitive")
    p.add_argument("--out-dir", default=".", help="directory for the output files")
    p.set_defaults(func=cmd_lock)

    p = sub.add_parser("clusters", parents=[common], help="list structural similarity classes")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--hops", type=_hops_int, default=2)
    p.add_argument("--kind", choices=("node", "link", "both"), default="both")
    p.add_argument("--out", help="write the listing to a file instead of stdout")
    p.set_defaults(func=cmd_clusters)

    p = sub.add_parser("attack", parents=[common], help="run an oracle-less key attack")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--locked", required=True, help="locked .bench file")
    p.add_argument("--margin", type=float, default=0.0, help="cp decision margin")
    p.add_argument("--lockreport", help="ground-truth records (wl self-assessment only)")
    p.add_argument("--hops", type=_hops_int, default=2, help="wl similarity radius")
    p.add_argument("--out", required=True, help="guess file to write")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("eval", parents=[common], help="score a guess file")
    p.add_argument("--oracle", required=True, help="original .bench file")
    p.add_argument("--locked", required=True)
    p.add_argument("--key", required=True, help="correct key file")
    p.add_argument("--guess", required=True, help="guess file from an attack")
    p.add_argument("--patterns", type=_positive_int, default=DEFAULT_PATTERNS)
    p.add_argument(
        "--xseeds", type=_positive_int, default=DEFAULT_X_RESOLUTIONS,
        help="random resolutions per X bit",
    )
    p.add_argument("--pretty", action="store_true", help="human table instead of key=value")
    p.add_argument("--out", help="also write key=value metrics to a file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="correct-key equivalence check")
    p.add_argument("--oracle", required=True)
    p.add_argument("--locked", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--patterns", type=_positive_int, default=DESK_PATTERNS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    tokens = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(tokens)
    if ns.subcommand == "attack" and ns.method == "wl" and not ns.lockreport:
        parser.error("--method wl requires --lockreport (self-assessment oracle)")
    try:
        return ns.func(ns, tokens)
    except (BenchError, LockingError, AttackError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
