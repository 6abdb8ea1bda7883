"""The FBAS as a simple cooperative game.

A coalition wins iff it contains a quorum. By default the players are the
top tier; nodes outside it are never pivotal, so dropping them changes no
index.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .fbas import (
    CompiledQset, Fbas, NodeSet, QuorumSet, _greatest_quorum, _check_subset, as_nodeset,
    members, top_tier,
)

MAX_BATCH_PLAYERS = 64


def _localize(cq: CompiledQset, local_bit: dict[int, int]) -> tuple:
    """Rewrite a compiled quorum set onto player-local bit positions.

    Validators that are not players can never be in a coalition, so they are
    dropped while the threshold stays put.
    """
    threshold, vmask, inner, _ = cq
    local = 0
    for i in members(vmask):
        if i in local_bit:
            local |= 1 << local_bit[i]
    return (threshold, np.uint64(local), tuple(_localize(sub, local_bit) for sub in inner))


def _satisfied_batch(lq: tuple, coalitions: np.ndarray) -> np.ndarray:
    threshold, vmask, inner = lq
    count = np.bitwise_count(coalitions & vmask).astype(np.int16)
    for sub in inner:
        count += _satisfied_batch(sub, coalitions)
    return count >= threshold


@dataclass(eq=False)
class CooperativeGame:
    """Simple game over ``players`` (a node set of ``fbas``).

    With ``memoize=True`` scalar characteristic values are cached by
    coalition bits; the cache is guarded by a lock so lookups are safe from
    several threads.
    """

    fbas: Fbas
    players: NodeSet = -1
    memoize: bool = False
    _memo: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.players == -1:
            self.players = top_tier(self.fbas)
        else:
            self.players = as_nodeset(self.players)
            _check_subset(self.fbas, self.players)

    @classmethod
    def over_all_nodes(cls, fbas: Fbas, **kwargs) -> "CooperativeGame":
        return cls(fbas, fbas.all_nodes, **kwargs)

    @cached_property
    def player_list(self) -> list[int]:
        return members(self.players)

    @property
    def size(self) -> int:
        return self.players.bit_count()

    def value(self, coalition: Union[NodeSet, Iterable[int]]) -> int:
        c = as_nodeset(coalition)
        if c & ~self.players:
            raise ValueError(f"coalition {members(c)} is not a subset of the players")
        if not self.memoize:
            return int(_greatest_quorum(self.fbas.compiled, c) != 0)
        with self._lock:
            cached = self._memo.get(c)
        if cached is None:
            cached = int(_greatest_quorum(self.fbas.compiled, c) != 0)
            with self._lock:
                self._memo[c] = cached
        return cached

    def is_critical(self, i: int, coalition: Union[NodeSet, Iterable[int]]) -> bool:
        c = as_nodeset(coalition)
        if not c >> i & 1:
            raise ValueError(f"player {i} is not in coalition {members(c)}")
        return self.value(c) == 1 and self.value(c & ~(1 << i)) == 0

    @cached_property
    def _local_qsets(self) -> tuple[tuple[np.uint64, tuple], ...]:
        """(player mask, localized quorum set) pairs, one per distinct quorum set."""
        players = self.player_list
        if len(players) > MAX_BATCH_PLAYERS:
            raise ValueError(f"batch evaluation supports at most {MAX_BATCH_PLAYERS} players")
        local_bit = {g: k for k, g in enumerate(players)}
        groups: dict[QuorumSet, int] = {}
        for k, g in enumerate(players):
            qset = self.fbas.quorum_sets[g]
            groups[qset] = groups.get(qset, 0) | 1 << k
        return tuple((np.uint64(mask), _localize(qset.compile(), local_bit))
                     for qset, mask in groups.items())

    def winning_batch(self, coalitions: np.ndarray) -> np.ndarray:
        """Vectorised characteristic function.

        ``coalitions`` holds uint64 bitsets over *player-local* positions
        (bit k is the k-th smallest player). Same fixpoint as
        :func:`greatest_quorum_within`, run on every coalition at once.
        """
        current = np.asarray(coalitions, dtype=np.uint64).copy()
        local_qsets = self._local_qsets
        while True:
            drop = np.zeros_like(current)
            for group, lq in local_qsets:
                unsat = ~_satisfied_batch(lq, current)
                drop |= np.where(unsat, current & group, np.uint64(0))
            if not drop.any():
                return current != 0
            current &= ~drop

    def to_local(self, coalition: NodeSet) -> int:
        local = 0
        for k, g in enumerate(self.player_list):
            if coalition >> g & 1:
                local |= 1 << k
        return local


def characteristic_value(game: CooperativeGame, coalition: Union[NodeSet, Iterable[int]]) -> int:
    """1 if the coalition contains a quorum, else 0."""
    return game.value(coalition)


def is_critical(game: CooperativeGame, i: int, coalition: Union[NodeSet, Iterable[int]]) -> bool:
    """True iff ``coalition`` wins and loses once ``i`` leaves it."""
    return game.is_critical(i, coalition)
