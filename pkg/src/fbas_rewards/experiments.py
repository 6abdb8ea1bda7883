"""Runtime benchmarks and approximation-accuracy studies on the synthetic families.

Accuracy is measured as the mean percentage error (MPE) of sampled indices
against exact ones, averaged over players, then over repeated runs (MMPE).
Errors are reported as fractions, so 0.047 means 4.7%.
"""

from __future__ import annotations

import logging
import statistics
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .errors import EnumerationCapExceeded
from .game import CooperativeGame
from .generators import KINDS, TopologySpec
from .power import DEFAULT_CAP, approx_power_indices, exact_power_indices

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    kind: str
    n: int
    method: str
    m: Optional[int]
    reps: int
    median_seconds: Optional[float]
    skipped: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def median(self, kind: str, n: int, method: str, m: Optional[int] = None) -> Optional[float]:
        for row in self.rows:
            if (row.kind, row.n, row.method, row.m) == (kind, n, method, m):
                return row.median_seconds
        raise KeyError((kind, n, method, m))


@dataclass(frozen=True)
class AccuracyRow:
    kind: str
    n: int
    m: int
    reps: int
    base_seed: int
    mmpe: float
    mpe: tuple[float, ...] = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mpe"] = list(self.mpe)
        return d


@dataclass
class AccuracyReport:
    rows: list[AccuracyRow] = field(default_factory=list)

    def mmpe(self, kind: str, n: int, m: int) -> float:
        for row in self.rows:
            if (row.kind, row.n, row.m) == (kind, n, m):
                return row.mmpe
        raise KeyError((kind, n, m))


def topologies(kinds: Iterable[str], node_counts: Iterable[int]) -> list[TopologySpec]:
    """Topologies for the given node counts.

    Organizational FBASs only exist for multiples of three; other counts are
    skipped for that kind.
    """
    specs = []
    counts = list(node_counts)
    for kind in kinds:
        if kind not in KINDS:
            raise ValueError(f"unknown topology kind {kind!r}")
        for n in counts:
            if kind == "symmetric":
                specs.append(TopologySpec(kind, n))
            elif n % 3 == 0:
                specs.append(TopologySpec(kind, n // 3))
    return specs


def mean_percentage_error(estimate: Sequence, exact: Sequence, players: Sequence[int]) -> float:
    """(1/n) * sum over players of |estimate - exact| / |exact|.

    Inputs may be Fractions; the sum is then exact and only the result is
    rounded to float.
    """
    if not players:
        raise ValueError("MPE needs at least one player")
    total = Fraction(0)
    for i in players:
        truth = Fraction(exact[i])
        if truth == 0:
            raise ValueError(f"player {i} has exact index 0; MPE is undefined")
        total += abs(Fraction(estimate[i]) - truth) / abs(truth)
    return float(total / len(players))


def _timed(fn: Callable[[], object], clock: Callable[[], float]) -> float:
    start = clock()
    fn()
    return clock() - start


def run_runtime_bench(kinds: Iterable[str], n_range: Iterable[int], m_values: Sequence[int],
                      reps: int = 10, *, methods: Sequence[str] = ("exact", "approximate"),
                      cap: int = DEFAULT_CAP, seed: int = 0,
                      clock: Callable[[], float] = time.perf_counter) -> BenchReport:
    """Median single-threaded wall-clock time per (topology, method, m).

    The game is built over all nodes: both families consist solely of a top
    tier. Exact rows above ``cap`` players are reported as skipped.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    report = BenchReport()
    for spec in topologies(kinds, n_range):
        fbas = spec.build()
        n = spec.node_count
        if "exact" in methods:
            if n > cap:
                report.rows.append(BenchRow(spec.kind, n, "exact", None, reps, None, skipped=True))
                log.info("%s n=%d exact: skipped (cap %d)", spec.kind, n, cap)
            else:
                times = [_timed(lambda: exact_power_indices(
                    CooperativeGame.over_all_nodes(fbas), cap=cap), clock) for _ in range(reps)]
                report.rows.append(BenchRow(spec.kind, n, "exact", None, reps, statistics.median(times)))
                log.info("%s n=%d exact: %.6fs", spec.kind, n, report.rows[-1].median_seconds)
        if "approximate" in methods:
            for m in m_values:
                times = [_timed(lambda: approx_power_indices(
                    CooperativeGame.over_all_nodes(fbas), m, seed + j), clock) for j in range(reps)]
                report.rows.append(BenchRow(spec.kind, n, "approximate", m, reps, statistics.median(times)))
                log.info("%s n=%d approximate m=%d: %.6fs", spec.kind, n, m,
                         report.rows[-1].median_seconds)
    return report


def run_accuracy_study(kinds: Iterable[str], n_range: Iterable[int], m_values: Sequence[int],
                       reps: int = 20, *, base_seed: int = 0, cap: int = DEFAULT_CAP,
                       keep_mpe: bool = False) -> AccuracyReport:
    """MMPE of sampled indices for every (topology, m); run j uses seed ``base_seed + j``."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    report = AccuracyReport()
    for spec in topologies(kinds, n_range):
        n = spec.node_count
        if n > cap:
            raise EnumerationCapExceeded(n, cap)
        game = CooperativeGame.over_all_nodes(spec.build())
        exact = exact_power_indices(game, cap=cap).values
        players = game.player_list
        for m in m_values:
            mpes = []
            for j in range(reps):
                approx = approx_power_indices(game, m, base_seed + j)
                estimate = [Fraction(c, m) for c in approx.pivot_counts]
                mpes.append(mean_percentage_error(estimate, exact, players))
            mmpe = statistics.fmean(mpes)
            report.rows.append(AccuracyRow(spec.kind, n, m, reps, base_seed, mmpe,
                                           tuple(mpes) if keep_mpe else ()))
            log.info("%s n=%d m=%d: MMPE %.4f%%", spec.kind, n, m, 100 * mmpe)
    return report
