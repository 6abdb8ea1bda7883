"""Shapley-Shubik power indices and the reward distribution built on them.

Exact indices enumerate every coalition of the players and weight each
coalition in which a player is critical by (s-1)!(n-s)!/n!. Approximate
indices sample uniform permutations of the players and count how often each
player is the pivot, i.e. the one whose arrival first makes the prefix win.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import EnumerationCapExceeded, NoQuorumIntersection, NoQuorums, NoWinningCoalition
from .fbas import Fbas, NodeSet, find_minimal_quorums, has_quorum_intersection, members
from .game import MAX_BATCH_PLAYERS, CooperativeGame

log = logging.getLogger(__name__)

DEFAULT_CAP = 25
EXACT_CHUNK = 1 << 20
SAMPLE_BLOCK = 1 << 16
SEED_LIMIT = 1 << 64

Number = Union[Fraction, float]


@dataclass(frozen=True)
class PowerIndexReport:
    """Per-node shares of one FBAS.

    ``values[i]`` is a :class:`~fractions.Fraction` for the exact method and
    a float for the approximate one; nodes outside ``player_set`` get 0.
    ``pivot_counts`` (approximate only) are the raw per-node pivot tallies
    and sum to ``samples``.
    """

    values: tuple[Number, ...]
    method: str
    player_set: NodeSet
    aliases: tuple[Optional[str], ...]
    samples: Optional[int] = None
    seed: Optional[int] = None
    pivot_counts: Optional[tuple[int, ...]] = None

    @property
    def exact(self) -> bool:
        return self.method == "exact"

    def floats(self) -> list[float]:
        return [float(v) for v in self.values]

    def total(self) -> Number:
        return sum(self.values, Fraction(0) if self.exact else 0.0)

    def __getitem__(self, i: int) -> Number:
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)


def shapley_weights(n: int) -> list[Fraction]:
    """weights[s] = (s-1)!(n-s)!/n! for coalition sizes s = 1..n (index 0 unused)."""
    total = math.factorial(n)
    return [Fraction(0)] + [
        Fraction(math.factorial(s - 1) * math.factorial(n - s), total) for s in range(1, n + 1)
    ]


def _require_winning(game: CooperativeGame) -> None:
    if game.size == 0 or not game.value(game.players):
        raise NoWinningCoalition("the grand coalition contains no quorum")


def _popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.uint8)


def critical_counts(game: CooperativeGame, workers: int = 1) -> list[list[int]]:
    """counts[k][s]: coalitions of size s in which the k-th player is critical."""
    n = game.size
    total = 1 << n
    chunk = min(total, EXACT_CHUNK)
    winning = np.empty(total, dtype=bool)

    def fill(start: int) -> None:
        coalitions = np.arange(start, start + chunk, dtype=np.uint64)
        winning[start:start + chunk] = game.winning_batch(coalitions)

    starts = range(0, total, chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)

    sizes = _popcounts(n)
    counts = []
    for k in range(n):
        # Axis 1 of the reshaped table selects bit k: 0 = without, 1 = with.
        win = winning.reshape(-1, 2, 1 << k)
        size = sizes.reshape(-1, 2, 1 << k)
        critical = win[:, 1, :] & ~win[:, 0, :]
        counts.append(np.bincount(size[:, 1, :][critical], minlength=n + 1).tolist())
    return counts


def exact_power_indices(game: CooperativeGame, cap: int = DEFAULT_CAP,
                        workers: int = 1) -> PowerIndexReport:
    n = game.size
    if n > min(cap, MAX_BATCH_PLAYERS):
        raise EnumerationCapExceeded(n, cap)
    _require_winning(game)
    # sigma = sum_s count[s] * (s-1)!(n-s)! / n!, accumulated as one integer numerator.
    fact = [math.factorial(k) for k in range(n + 1)]
    numerators = [fact[s - 1] * fact[n - s] for s in range(1, n + 1)]
    values: list[Number] = [Fraction(0)] * len(game.fbas)
    players = game.player_list
    for k, counts in enumerate(critical_counts(game, workers)):
        numerator = sum(c * w for c, w in zip(counts[1:], numerators))
        values[players[k]] = Fraction(numerator, fact[n])
    return PowerIndexReport(tuple(values), "exact", game.players, game.fbas.aliases)


def _pivot_positions_batch(game: CooperativeGame, perms: np.ndarray) -> np.ndarray:
    """Index (into each row of ``perms``) of the pivot, found by binary search on prefix length."""
    count, n = perms.shape
    bits = np.left_shift(np.uint64(1), perms.astype(np.uint64))
    prefixes = np.bitwise_or.accumulate(bits, axis=1)
    # Invariant: prefix of length lo loses, prefix of length hi wins.
    lo = np.zeros(count, dtype=np.int64)
    hi = np.full(count, n, dtype=np.int64)
    active = np.arange(count) if n > 1 else np.arange(0)
    while active.size:
        mid = (lo[active] + hi[active]) // 2
        wins = game.winning_batch(prefixes[active, mid - 1])
        hi[active] = np.where(wins, mid, hi[active])
        lo[active] = np.where(wins, lo[active], mid)
        active = active[hi[active] - lo[active] > 1]
    return hi - 1


def _pivot_positions_scalar(game: CooperativeGame, perms: np.ndarray) -> np.ndarray:
    players = game.player_list
    out = np.empty(perms.shape[0], dtype=np.int64)
    for row, perm in enumerate(perms.tolist()):
        prefix = [0]
        for k in perm:
            prefix.append(prefix[-1] | 1 << players[k])
        lo, hi = 0, len(perm)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if game.value(prefix[mid]):
                hi = mid
            else:
                lo = mid
        out[row] = hi - 1
    return out


def _sample_block(game: CooperativeGame, count: int, seed_seq: np.random.SeedSequence,
                  vectorized: bool) -> np.ndarray:
    n = game.size
    rng = np.random.default_rng(seed_seq)
    perms = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (count, 1)), axis=1)
    if vectorized:
        pos = _pivot_positions_batch(game, perms)
    else:
        pos = _pivot_positions_scalar(game, perms)
    pivots = perms[np.arange(count), pos]
    return np.bincount(pivots, minlength=n)


def approx_power_indices(game: CooperativeGame, m: int, seed: int, workers: int = 1,
                         block_size: int = SAMPLE_BLOCK,
                         vectorized: Optional[bool] = None) -> PowerIndexReport:
    """Estimate indices from ``m`` random permutations.

    Permutations are drawn in fixed blocks of ``block_size``; block ``b``
    uses the ``b``-th child of ``SeedSequence(seed)``. The result therefore
    depends only on (seed, m, block_size, player order), never on
    ``workers``.
    """
    if m < 1:
        raise ValueError(f"sample count must be positive, got {m}")
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    _require_winning(game)
    if vectorized is None:
        vectorized = game.size <= MAX_BATCH_PLAYERS
    sizes = [block_size] * (m // block_size)
    if m % block_size:
        sizes.append(m % block_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, children))

    def run(job: tuple[int, np.random.SeedSequence]) -> np.ndarray:
        return _sample_block(game, job[0], job[1], vectorized)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(run, jobs))
    else:
        tallies = [run(job) for job in jobs]
    local_counts = np.sum(tallies, axis=0, dtype=np.int64)

    counts = [0] * len(game.fbas)
    for k, g in enumerate(game.player_list):
        counts[g] = int(local_counts[k])
    values = tuple(c / m for c in counts)
    return PowerIndexReport(values, "approximate", game.players, game.fbas.aliases,
                            samples=m, seed=seed, pivot_counts=tuple(counts))


def reward_distribution(fbas: Fbas, method: str = "exact", *, samples: Optional[int] = None,
                        seed: Optional[int] = None, ignore_quorum_intersection: bool = False,
                        cap: int = DEFAULT_CAP, workers: int = 1) -> PowerIndexReport:
    """Reward share of every node of ``fbas``.

    ``method`` is ``"exact"`` or ``"approximate"`` (the latter needs
    ``samples`` and ``seed``). Refuses FBASs without quorum intersection
    unless ``ignore_quorum_intersection`` is set.
    """
    if not find_minimal_quorums(fbas):
        raise NoQuorums("the FBAS has no quorum")
    if not ignore_quorum_intersection and not has_quorum_intersection(fbas):
        raise NoQuorumIntersection("the FBAS has disjoint quorums; refusing to distribute rewards")
    game = CooperativeGame(fbas)
    log.debug("top tier: %s", members(game.players))
    if method == "exact":
        return exact_power_indices(game, cap=cap, workers=workers)
    if method in ("approximate", "approx"):
        if samples is None or seed is None:
            raise ValueError("the approximate method needs both samples and seed")
        return approx_power_indices(game, samples, seed, workers=workers)
    raise ValueError(f"unknown method {method!r}")
