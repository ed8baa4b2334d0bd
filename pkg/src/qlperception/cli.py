"""Command-line interface.

Exit status is 0 on success, 2 for usage and configuration errors and 3 for
domain errors (out-of-range readings, bad angles, invalid probabilities).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import Optional, Sequence


from qlperception.errors import ConfigError, DomainError
from qlperception.query import apply_query, euclidean_distance, zero_group_probabilities
from qlperception.sampling import DEFAULT_SEED, sample
from qlperception.sensors import CONFIG_ENV_VAR, default_config, load_config, normalize_frame
from qlperception.state import (
    NormalizedInput,
    bitstring,
    bloch_coordinates,
    probabilities,
    product_state,
)
from qlperception.sweep import (
    CASE_STUDY_ROWS,
    GRIDS,
    SweepSpec,
    format_table,
    reproduce_table,
    run_sweep,
)

EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _numbers(kind):
    def parse(text: str):
        try:
            return tuple(kind(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")

    return parse


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        help=f"sensor configuration (TOML); defaults to ${CONFIG_ENV_VAR} or the bundled RGB camera",
    )
    common.add_argument("--clamp", action="store_true", help="clamp out-of-range readings")
    common.add_argument("--tau", type=float, default=1.0, help="rotation divisor (default 1)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="qlperception", description="Quantum-like multi-sensor perception model."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p, required=True):
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--frame", type=_numbers(float), help="raw readings, e.g. 204,76,178")
        group.add_argument("--x", type=_numbers(float), help="normalized input, e.g. 0.8,0.3,0.7")

    def add_target(p, required):
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--target", type=_numbers(float), help="raw target readings")
        group.add_argument("--target-x", type=_numbers(float), help="normalized target")

    def add_shots(p, default=None):
        p.add_argument("--shots", type=_positive, default=default, help="simulated measurements")
        p.add_argument(
            "--seed", type=_u64, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})"
        )

    def add_format(p, choices, default):
        p.add_argument("--format", choices=choices, default=default)

    p = sub.add_parser("encode", parents=[common], help="print the encoded statevector")
    add_input(p)
    add_format(p, ["text", "csv", "json-lines"], "text")

    p = sub.add_parser("query", parents=[common], help="apply a query and print beliefs")
    add_input(p)
    add_target(p, required=True)
    add_shots(p)
    add_format(p, ["text", "csv", "json-lines"], "text")

    p = sub.add_parser("sample", parents=[common], help="histogram of simulated measurements")
    add_input(p)
    add_target(p, required=False)
    add_shots(p, default=10**6)
    add_format(p, ["csv", "json-lines"], "csv")

    p = sub.add_parser("sweep", parents=[common], help="evaluate a grid over the sensor ranges")
    p.add_argument("--step", type=_positive, default=5, help="grid stride in domain units")
    p.add_argument("--target", type=_numbers(int), help="raw query target")
    p.add_argument("--grid", choices=GRIDS, default="start", help="grid endpoints (default start)")
    add_shots(p)
    p.add_argument("--workers", type=_positive, default=1, help="processes for sampled mode")
    p.add_argument("--metadata", help="metadata JSON path (default <output>.meta.json)")
    add_format(p, ["csv", "json-lines"], "csv")

    p = sub.add_parser("table", parents=[common], help="case-study table, exact and sampled")
    p.add_argument("--frame", type=_numbers(int), help="single input row instead of the case study")
    p.add_argument("--target", type=_numbers(int), help="query target for --frame")
    add_shots(p, default=10**6)
    add_format(p, ["text", "csv", "json-lines"], "text")
    return parser


def _config(args):
    return load_config(args.config) if args.config else default_config()


def _input(args, config) -> NormalizedInput:
    if args.x is not None:
        return NormalizedInput(args.x)
    return normalize_frame(args.frame, config, clamp=args.clamp)


def _target(args, config) -> Optional[NormalizedInput]:
    if getattr(args, "target_x", None) is not None:
        return NormalizedInput(args.target_x)
    if args.target is not None:
        return normalize_frame(args.target, config, clamp=args.clamp)
    return None


def _pct(p: float) -> str:
    return f"{100 * p:.2f}%"


def cmd_encode(args, out) -> None:
    config = _config(args)
    x = _input(args, config)
    state = product_state(x, args.tau)
    probs = probabilities(state)
    n = x.n
    names = config.names if n == config.n else [f"q{i + 1}" for i in range(n)]
    blochs = [bloch_coordinates(v, args.tau) for v in x.values]
    if args.format == "json-lines":
        for i, (v, b) in enumerate(zip(x.values, blochs)):
            row = {"kind": "qubit", "qubit": i + 1, "sensor": names[i], "x": v}
            row["bloch"] = list(b.as_tuple())
            out.write(json.dumps(row) + "\n")
        for b in range(2**n):
            row = {"kind": "basis", "state": bitstring(b, n), "index": b}
            row.update(amplitude=float(state.amplitudes[b]), probability=float(probs[b]))
            out.write(json.dumps(row) + "\n")
    elif args.format == "csv":
        out.write("bitstring,amplitude,probability\n")
        for b in range(2**n):
            out.write(f"{bitstring(b, n)},{float(state.amplitudes[b])!r},{float(probs[b])!r}\n")
    else:
        out.write("qubit  sensor        x   bloch (x, y, z)\n")
        for i, (v, b) in enumerate(zip(x.values, blochs)):
            out.write(f"q{i + 1:<5} {names[i]:<8} {v:.4f}   ({b.x:+.3f}, {b.y:+.3f}, {b.z:+.3f})\n")
        out.write("\nstate   amplitude  probability\n")
        for b in range(2**n):
            out.write(f"|{bitstring(b, n)}>  {state.amplitudes[b]:9.3f}  {_pct(probs[b]):>11}\n")


def cmd_query(args, out) -> None:
    config = _config(args)
    x = _input(args, config)
    target = _target(args, config)
    state = apply_query(x, target, args.tau)
    probs = probabilities(state)
    n = x.n
    groups = zero_group_probabilities(probs, n)
    distance = None
    if args.frame is not None and args.target is not None:
        distance = euclidean_distance(args.frame, args.target)
    freqs = None
    if args.shots is not None:
        hist = sample(probs, args.shots, args.seed)
        freqs = hist.dense() / hist.shots

    if args.format == "json-lines":
        for b in range(2**n):
            row = {"kind": "basis", "state": bitstring(b, n), "probability": float(probs[b])}
            if freqs is not None:
                row["frequency"] = float(freqs[b])
            out.write(json.dumps(row) + "\n")
        for k, mass in groups.by_zero_count.items():
            out.write(json.dumps({"kind": "group", "zeros": k, "probability": mass}) + "\n")
        summary = {"kind": "summary", "distance": distance}
        if freqs is not None:
            summary.update(shots=args.shots, seed=args.seed)
        out.write(json.dumps(summary) + "\n")
    elif args.format == "csv":
        out.write("bitstring,probability" + (",frequency" if freqs is not None else "") + "\n")
        for b in range(2**n):
            extra = f",{float(freqs[b])!r}" if freqs is not None else ""
            out.write(f"{bitstring(b, n)},{float(probs[b])!r}{extra}\n")
    else:
        out.write("state   probability" + ("    sampled" if freqs is not None else "") + "\n")
        for b in range(2**n):
            extra = f"  {_pct(freqs[b]):>9}" if freqs is not None else ""
            out.write(f"|{bitstring(b, n)}>  {_pct(probs[b]):>11}{extra}\n")
        out.write("\nzeros   probability\n")
        for k, mass in groups.by_zero_count.items():
            out.write(f"{k:<5}  {_pct(mass):>12}\n")
        if distance is not None:
            out.write(f"\nd = {distance:.2f}\n")
        if freqs is not None:
            out.write(f"shots = {args.shots}, seed = {args.seed}\n")


def cmd_sample(args, out) -> None:
    config = _config(args)
    x = _input(args, config)
    target = _target(args, config)
    state = product_state(x, args.tau) if target is None else apply_query(x, target, args.tau)
    hist = sample(probabilities(state), args.shots, args.seed)
    if args.format == "json-lines":
        for line in hist.to_lines():
            bits, count, freq = line.split(",")
            out.write(json.dumps({"state": bits, "count": int(count), "frequency": float(freq)}) + "\n")
    else:
        out.write("bitstring,count,frequency\n")
        out.write("\n".join(hist.to_lines()) + "\n")


def cmd_sweep(args, out) -> None:
    config = _config(args)
    mode = "sampled" if args.shots is not None else "exact"
    spec = SweepSpec(
        step=args.step,
        target=args.target,
        mode=mode,
        shots=args.shots,
        seed=args.seed,
        grid=args.grid,
        tau=args.tau,
    )
    result = run_sweep(spec, config, workers=args.workers)
    if args.format == "json-lines":
        result.write_json_lines(out)
    else:
        result.write_csv(out)
    meta_path = args.metadata or (args.output + ".meta.json" if args.output else None)
    if meta_path:
        with open(meta_path, "w") as fh:
            json.dump(result.metadata(), fh, indent=2)
            fh.write("\n")


def cmd_table(args, out) -> None:
    config = _config(args)
    if args.frame is not None:
        rows = [(args.frame, args.target)]
    elif args.target is not None:
        raise ConfigError("--target needs --frame")
    else:
        rows = list(CASE_STUDY_ROWS)
    table = reproduce_table(rows, config, shots=args.shots, seed=args.seed, tau=args.tau)
    n = config.n
    if args.format == "text":
        out.write(f"exact\n{format_table(table, 'exact')}\n\n")
        out.write(f"sampled, N = {args.shots}, seed = {args.seed}\n")
        out.write(format_table(table, "sampled") + "\n")
        return
    for row in table:
        for source, probs in (("exact", row.exact), ("sampled", row.sampled)):
            record = {
                "input": list(row.raw_input),
                "target": None if row.target is None else list(row.target),
                "source": source,
                **{f"p_{bitstring(b, n)}": float(probs[b]) for b in range(2**n)},
                "distance": row.distance,
            }
            if args.format == "json-lines":
                out.write(json.dumps(record) + "\n")
            else:
                if row is table[0] and source == "exact":
                    out.write(",".join(record) + "\n")
                cells = [
                    " ".join(map(str, record["input"])),
                    "" if row.target is None else " ".join(map(str, row.target)),
                    source,
                    *(repr(float(p)) for p in probs),
                    "" if row.distance is None else repr(row.distance),
                ]
                out.write(",".join(cells) + "\n")


COMMANDS = {
    "encode": cmd_encode,
    "query": cmd_query,
    "sample": cmd_sample,
    "sweep": cmd_sweep,
    "table": cmd_table,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with contextlib.ExitStack() as stack:
            out = stack.enter_context(open(args.output, "w")) if args.output else sys.stdout
            COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"qlperception: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"qlperception: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
