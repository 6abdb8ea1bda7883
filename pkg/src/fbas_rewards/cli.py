"""Command-line entry point.

Machine-readable results go to standard output (or ``--output``); logs and
progress go to standard error.

Exit codes: 0 success, 2 usage or parse error, 3 precondition refusal
(no quorum intersection / no quorums), 4 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import __version__
from .errors import EnumerationCapExceeded, FbasParseError, NoQuorumIntersection, NoQuorums
from .experiments import run_accuracy_study, run_runtime_bench
from .fbas import find_minimal_quorums, has_quorum_intersection, members, top_tier
from .generators import KINDS, TopologySpec
from .io import parse_fbas, serialize_fbas, write_report
from .power import DEFAULT_CAP, reward_distribution

log = logging.getLogger("fbas_rewards")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REFUSED = 3
EXIT_CAP = 4

AUTO_EXACT_LIMIT = 15
AUTO_SAMPLES = 10**5


class UsageError(Exception):
    pass


def parse_count(text: str) -> int:
    """Integer that may be written as ``100000``, ``1e5`` or ``10^5``."""
    text = text.strip()
    try:
        if "^" in text:
            base, exp = text.split("^")
            return int(base) ** int(exp)
        if "e" in text.lower():
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_range(text: str) -> list[int]:
    """``3..14`` (inclusive), ``5,10,20`` or a single number."""
    out: list[int] = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(parse_count(lo), parse_count(hi) + 1))
        elif part.strip():
            out.append(parse_count(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty range: {text!r}")
    return out


@dataclass
class CliConfig:
    subcommand: str
    input: str = "-"
    output: str = "-"
    format: str = "json"
    method: str = "auto"
    samples: Optional[list[int]] = None
    seed: Optional[int] = None
    kind: str = "symmetric"
    nodes: Optional[list[int]] = None
    orgs: Optional[list[int]] = None
    reps: Optional[int] = None
    cap: int = DEFAULT_CAP
    ignore_quorum_intersection: bool = False
    workers: int = 1
    full_scale: bool = False
    kinds: list[str] = field(default_factory=list)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        known = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__ and v is not None}
        return cls(**known)

    def validate(self) -> None:
        if self.cap < 1:
            raise UsageError("--cap must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.samples is not None and any(m < 1 for m in self.samples):
            raise UsageError("--samples must be positive")
        if self.reps is not None and self.reps < 1:
            raise UsageError("--reps must be at least 1")
        for name in ("nodes", "orgs"):
            values = getattr(self, name)
            if values is not None and any(v < 1 for v in values):
                raise UsageError(f"--{name} must be at least 1")
        cmd = self.subcommand
        if cmd == "rank":
            if self.method == "exact" and self.samples is not None:
                raise UsageError("--samples only applies to --method approx")
            if self.samples is not None and len(self.samples) != 1:
                raise UsageError("rank takes a single --samples value")
            if self.method == "approx" and self.seed is None:
                raise UsageError("--method approx needs --seed")
        if cmd == "gen":
            if self.kind not in KINDS:
                raise UsageError("gen needs --kind symmetric or organizational")
            size = self.nodes if self.kind == "symmetric" else self.orgs
            flag = "--nodes" if self.kind == "symmetric" else "--orgs"
            if size is None or len(size) != 1:
                raise UsageError(f"gen --kind {self.kind} needs a single {flag} value")
        if cmd in ("bench", "accuracy"):
            if self.nodes is None and self.orgs is None and not self.full_scale:
                raise UsageError(f"{cmd} needs --nodes and/or --orgs")
            if cmd == "bench" and self.method == "exact" and self.samples is not None:
                raise UsageError("--samples only applies to approximate benchmarks")


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_output(path: str, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_analyze(cfg: CliConfig) -> int:
    fbas = parse_fbas(_read_input(cfg.input))
    minimal = [members(q) for q in find_minimal_quorums(fbas)]
    summary = {
        "node_count": len(fbas),
        "minimal_quorums": minimal,
        "top_tier": members(top_tier(fbas)),
        "quorum_intersection": has_quorum_intersection(fbas),
    }
    if cfg.format == "text":
        lines = [f"{k}: {json.dumps(v, separators=(',', ':'))}" for k, v in summary.items()]
        _write_output(cfg.output, "\n".join(lines))
    else:
        _write_output(cfg.output, json.dumps(summary))
    return EXIT_OK


def cmd_rank(cfg: CliConfig) -> int:
    fbas = parse_fbas(_read_input(cfg.input))
    method = cfg.method
    samples = cfg.samples[0] if cfg.samples else None
    if method == "auto":
        tier = top_tier(fbas).bit_count()
        method = "exact" if tier <= AUTO_EXACT_LIMIT else "approx"
        log.info("top tier has %d nodes; using the %s method", tier, method)
        if method == "approx":
            if cfg.seed is None:
                raise UsageError(f"top tier of {tier} nodes needs sampling; pass --seed")
            samples = samples or AUTO_SAMPLES
    elif method == "approx":
        samples = samples or AUTO_SAMPLES
    report = reward_distribution(
        fbas, "exact" if method == "exact" else "approximate", samples=samples, seed=cfg.seed,
        ignore_quorum_intersection=cfg.ignore_quorum_intersection, cap=cfg.cap, workers=cfg.workers)
    _write_output(cfg.output, write_report(report, cfg.format))
    return EXIT_OK


def cmd_gen(cfg: CliConfig) -> int:
    size = cfg.nodes[0] if cfg.kind == "symmetric" else cfg.orgs[0]
    fbas = TopologySpec(cfg.kind, size).build()
    _write_output(cfg.output, serialize_fbas(fbas))
    return EXIT_OK


def _sweep(cfg: CliConfig) -> tuple[list[str], list[int], list[int]]:
    kinds = list(KINDS) if cfg.kind == "both" else [cfg.kind]
    counts: list[int] = []
    if cfg.nodes:
        counts.extend(cfg.nodes)
    if cfg.orgs:
        counts.extend(3 * m for m in cfg.orgs)
    if not counts:  # --full-scale without explicit sizes
        counts = list(range(3, 31))
    counts = sorted(set(counts))
    if cfg.samples:
        samples = cfg.samples
    elif cfg.full_scale:
        samples = [10**k for k in range(1, 9)]
    else:
        samples = [10**k for k in range(1, 7)]
    return kinds, counts, samples


def cmd_bench(cfg: CliConfig) -> int:
    kinds, counts, samples = _sweep(cfg)
    methods = {"exact": ("exact",), "approx": ("approximate",)}.get(cfg.method, ("exact", "approximate"))
    report = run_runtime_bench(kinds, counts, samples, cfg.reps or 10, methods=methods,
                               cap=cfg.cap, seed=cfg.seed or 0)
    _write_output(cfg.output, write_report(report, cfg.format))
    return EXIT_OK


def cmd_accuracy(cfg: CliConfig) -> int:
    kinds, counts, samples = _sweep(cfg)
    reps = cfg.reps or (50 if cfg.full_scale else 20)
    report = run_accuracy_study(kinds, counts, samples, reps, base_seed=cfg.seed or 0, cap=cfg.cap)
    _write_output(cfg.output, write_report(report, cfg.format))
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "rank": cmd_rank,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "accuracy": cmd_accuracy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbas-rewards",
        description="Quorum analysis and Shapley-Shubik reward shares for FBASs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output on stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def io_flags(p: argparse.ArgumentParser, formats: Sequence[str], with_input: bool = True) -> None:
        if with_input:
            p.add_argument("-i", "--input", default="-", help="FBAS JSON file, '-' for stdin")
        p.add_argument("-o", "--output", default="-", help="output file, '-' for stdout")
        p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("analyze", help="minimal quorums, top tier and quorum intersection")
    io_flags(p, ("json", "text"))

    p = sub.add_parser("rank", help="reward share of every node")
    io_flags(p, ("json", "csv"))
    p.add_argument("--method", choices=("auto", "exact", "approx"), default="auto",
                   help=f"auto: exact when the top tier has <= {AUTO_EXACT_LIMIT} nodes")
    p.add_argument("-m", "--samples", type=parse_count, action="append",
                   help=f"permutations to sample (default {AUTO_SAMPLES})")
    p.add_argument("--seed", type=parse_count, help="RNG seed; required whenever sampling")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max players for exact enumeration")
    p.add_argument("--ignore-quorum-intersection", action="store_true",
                   help="compute shares even if two quorums are disjoint")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("gen", help="write a synthetic FBAS")
    io_flags(p, ("json",), with_input=False)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("-n", "--nodes", type=parse_range)
    p.add_argument("--orgs", type=parse_range)

    for name, help_text in (("bench", "runtime benchmark"), ("accuracy", "MMPE of the sampler")):
        p = sub.add_parser(name, help=help_text)
        io_flags(p, ("csv", "json"), with_input=False)
        p.add_argument("--kind", choices=KINDS + ("both",), default="symmetric")
        p.add_argument("-n", "--nodes", type=parse_range, help="node counts, e.g. 3..14 or 5,20")
        p.add_argument("--orgs", type=parse_range, help="organization counts (3 nodes each)")
        p.add_argument("-m", "--samples", type=parse_range, help="sample sizes, e.g. 1e3,1e4")
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=parse_count, help="base seed (default 0)")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP)
        p.add_argument("--full-scale", action="store_true",
                       help="m = 10^1..10^8, 50 accuracy repetitions, n up to 30")
        if name == "bench":
            p.add_argument("--method", choices=("both", "exact", "approx"), default="both")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    cfg = CliConfig.from_args(args)
    try:
        cfg.validate()
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except (FbasParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoQuorumIntersection, NoQuorums) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
