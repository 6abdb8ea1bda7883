"""Synthetic FBAS families used for benchmarks and accuracy studies.

Both families consist solely of a top tier:

* ``symmetric``: every node uses the same flat quorum set over all nodes,
  like a classic 3f+1 quorum system.
* ``organizational``: nodes come in groups of three run by one
  organization; each organization is an inner set needing 2 of its 3 nodes,
  and every node needs a Byzantine majority of organizations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fbas import Fbas, QuorumSet

KINDS = ("symmetric", "organizational")


def byzantine_threshold(k: int) -> int:
    """Largest threshold tolerating ``floor((k-1)/3)`` faulty members out of ``k``."""
    if k < 1:
        raise ValueError(f"need at least one member, got {k}")
    return k - (k - 1) // 3


def gen_symmetric(n: int) -> Fbas:
    if n < 1:
        raise ValueError(f"symmetric FBAS needs n >= 1, got {n}")
    qset = QuorumSet(byzantine_threshold(n), tuple(range(n)))
    return Fbas((qset,) * n, tuple(f"n{i}" for i in range(n)))


def gen_organizational(m: int) -> Fbas:
    if m < 1:
        raise ValueError(f"organizational FBAS needs m >= 1, got {m}")
    orgs = tuple(QuorumSet(2, (3 * j, 3 * j + 1, 3 * j + 2)) for j in range(m))
    qset = QuorumSet(byzantine_threshold(m), (), orgs)
    aliases = tuple(f"org{j}-n{k}" for j in range(m) for k in range(3))
    return Fbas((qset,) * (3 * m), aliases)


@dataclass(frozen=True)
class TopologySpec:
    """A generated topology: ``size`` is n for symmetric, m organizations otherwise."""

    kind: str
    size: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown topology kind {self.kind!r}; expected one of {KINDS}")
        if self.size < 1:
            raise ValueError(f"topology size must be >= 1, got {self.size}")

    @property
    def node_count(self) -> int:
        return self.size if self.kind == "symmetric" else 3 * self.size

    def build(self) -> Fbas:
        if self.kind == "symmetric":
            return gen_symmetric(self.size)
        return gen_organizational(self.size)
