"""FBAS model and quorum-structure analysis.

Node sets are plain Python ints used as bitsets: bit ``i`` is set iff node
``i`` is a member. Quorum sets are never expanded into slices; every check
evaluates the threshold structure directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

NodeSet = int
"""Bitset over dense node indices."""

CompiledQset = tuple  # (threshold, validator mask, inner compiled qsets, all referenced nodes)


def nodeset(nodes: Iterable[int]) -> NodeSet:
    mask = 0
    for i in nodes:
        if i < 0:
            raise ValueError(f"negative node index {i}")
        mask |= 1 << i
    return mask


def as_nodeset(nodes: Union[NodeSet, Iterable[int]]) -> NodeSet:
    """Accept either a bitset or an iterable of indices."""
    if isinstance(nodes, int):
        if nodes < 0:
            raise ValueError("node sets must be non-negative bitsets")
        return nodes
    return nodeset(nodes)


def iter_members(mask: NodeSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: NodeSet) -> list[int]:
    """Sorted list of the indices in ``mask``."""
    return list(iter_members(mask))


class NodeId(NamedTuple):
    index: int
    alias: Optional[str] = None


@dataclass(frozen=True)
class QuorumSet:
    """Threshold structure: at least ``threshold`` of the validators and inner sets.

    A threshold larger than the number of members is allowed and makes the
    quorum set unsatisfiable.
    """

    threshold: int
    validators: tuple[int, ...] = ()
    inner_sets: tuple["QuorumSet", ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "validators", tuple(self.validators))
        object.__setattr__(self, "inner_sets", tuple(self.inner_sets))
        if self.threshold < 1:
            raise ValueError(f"threshold must be at least 1, got {self.threshold}")
        if any(v < 0 for v in self.validators):
            raise ValueError("validator indices must be non-negative")
        if len(set(self.validators)) != len(self.validators):
            raise ValueError(f"duplicate validators in quorum set {self.validators}")
        for inner in self.inner_sets:
            if not isinstance(inner, QuorumSet):
                raise TypeError("inner sets must be QuorumSet instances")

    @property
    def size(self) -> int:
        """Number of direct members (validators plus inner sets)."""
        return len(self.validators) + len(self.inner_sets)

    def referenced(self) -> set[int]:
        refs = set(self.validators)
        for inner in self.inner_sets:
            refs |= inner.referenced()
        return refs

    def compile(self) -> CompiledQset:
        inner = tuple(sub.compile() for sub in self.inner_sets)
        vmask = nodeset(self.validators)
        deep = vmask
        for sub in inner:
            deep |= sub[3]
        return (self.threshold, vmask, inner, deep)


@dataclass(frozen=True)
class Fbas:
    """An FBAS: one quorum set per node, nodes indexed densely from 0.

    ``aliases`` holds an optional human-readable name (e.g. a public key)
    per node.
    """

    quorum_sets: tuple[QuorumSet, ...]
    aliases: tuple[Optional[str], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "quorum_sets", tuple(self.quorum_sets))
        aliases = tuple(self.aliases) or (None,) * len(self.quorum_sets)
        object.__setattr__(self, "aliases", aliases)
        n = len(self.quorum_sets)
        if len(aliases) != n:
            raise ValueError(f"{len(aliases)} aliases for {n} nodes")
        named = [a for a in aliases if a is not None]
        if len(set(named)) != len(named):
            raise ValueError("node aliases must be unique")
        for i, qset in enumerate(self.quorum_sets):
            bad = sorted(v for v in qset.referenced() if v >= n)
            if bad:
                raise ValueError(f"quorum set of node {i} references unknown nodes {bad}")

    @classmethod
    def from_nodes(cls, nodes: Sequence[tuple[NodeId, QuorumSet]]) -> "Fbas":
        ordered = sorted(nodes, key=lambda item: item[0].index)
        if [node.index for node, _ in ordered] != list(range(len(ordered))):
            raise ValueError("node indices must be unique and contiguous from 0")
        return cls(tuple(q for _, q in ordered), tuple(node.alias for node, _ in ordered))

    def __len__(self) -> int:
        return len(self.quorum_sets)

    @property
    def nodes(self) -> list[tuple[NodeId, QuorumSet]]:
        return [(NodeId(i, a), q) for i, (a, q) in enumerate(zip(self.aliases, self.quorum_sets))]

    @property
    def all_nodes(self) -> NodeSet:
        return (1 << len(self)) - 1

    def quorum_set(self, i: int) -> QuorumSet:
        return self.quorum_sets[i]

    def index_of(self, alias: str) -> int:
        try:
            return self.aliases.index(alias)
        except ValueError:
            raise KeyError(alias) from None

    def label(self, i: int) -> str:
        alias = self.aliases[i]
        return alias if alias is not None else str(i)

    @cached_property
    def compiled(self) -> tuple[CompiledQset, ...]:
        return tuple(q.compile() for q in self.quorum_sets)


def _satisfied(cq: CompiledQset, s: NodeSet) -> bool:
    threshold, vmask, inner, _ = cq
    count = (s & vmask).bit_count()
    if count >= threshold:
        return True
    for sub in inner:
        if _satisfied(sub, s):
            count += 1
            if count >= threshold:
                return True
    return False


def is_quorum_set_satisfied(qset: QuorumSet, s: Union[NodeSet, Iterable[int]]) -> bool:
    """True iff validators in ``s`` plus inner sets satisfied by ``s`` reach the threshold."""
    return _satisfied(qset.compile(), as_nodeset(s))


def is_quorum(fbas: Fbas, u: Union[NodeSet, Iterable[int]]) -> bool:
    u = as_nodeset(u)
    if u == 0:
        return False
    _check_subset(fbas, u)
    compiled = fbas.compiled
    return all(_satisfied(compiled[i], u) for i in iter_members(u))


def _greatest_quorum(compiled: Sequence[CompiledQset], c: NodeSet) -> NodeSet:
    while c:
        drop = 0
        for i in iter_members(c):
            if not _satisfied(compiled[i], c):
                drop |= 1 << i
        if not drop:
            return c
        c &= ~drop
    return 0


def greatest_quorum_within(fbas: Fbas, c: Union[NodeSet, Iterable[int]]) -> NodeSet:
    """Largest quorum contained in ``c``, or 0 if ``c`` contains no quorum.

    Repeatedly drops every member whose quorum set is not satisfied by the
    current set. The union of two quorums is a quorum, so the fixed point
    contains every quorum inside ``c``.
    """
    c = as_nodeset(c)
    _check_subset(fbas, c)
    return _greatest_quorum(fbas.compiled, c)


def _shrink(compiled: Sequence[CompiledQset], quorum: NodeSet) -> NodeSet:
    for i in members(quorum):
        if not quorum >> i & 1:
            continue
        smaller = _greatest_quorum(compiled, quorum & ~(1 << i))
        if smaller:
            quorum = smaller
    return quorum


def _minimal_quorums(fbas: Fbas) -> tuple[NodeSet, ...]:
    # Cached on the instance: Fbas is immutable, and the search is exponential.
    cached = fbas.__dict__.get("_minimal_quorums")
    if cached is None:
        cached = _search_minimal_quorums(fbas)
        fbas.__dict__["_minimal_quorums"] = cached
    return cached


def _search_minimal_quorums(fbas: Fbas) -> tuple[NodeSet, ...]:
    compiled = fbas.compiled
    found: set[NodeSet] = set()
    # Explicit stack of (committed, remaining); include branch pushed last so it runs first.
    stack = [(0, fbas.all_nodes)]
    while stack:
        committed, remaining = stack.pop()
        candidate = _greatest_quorum(compiled, committed | remaining)
        if not candidate or committed & ~candidate:
            continue
        remaining = candidate & ~committed
        if committed and _greatest_quorum(compiled, committed) == committed:
            found.add(_shrink(compiled, committed))
            continue
        if not remaining:
            continue
        pick = _pick(compiled, committed, remaining)
        bit = 1 << pick
        stack.append((committed, remaining & ~bit))
        stack.append((committed | bit, remaining & ~bit))
    return tuple(sorted(found, key=lambda q: (q.bit_count(), members(q))))


def _pick(compiled: Sequence[CompiledQset], committed: NodeSet, remaining: NodeSet) -> int:
    # Branch on a node that an unsatisfied committed member still needs.
    for i in iter_members(committed):
        node = _needed(compiled[i], committed, remaining)
        if node is not None:
            return node
    return (remaining & -remaining).bit_length() - 1


def _needed(cq: CompiledQset, committed: NodeSet, remaining: NodeSet) -> Optional[int]:
    if _satisfied(cq, committed):
        return None
    _, vmask, inner, _ = cq
    # Finish inner sets already partly committed before opening new ones,
    # otherwise many non-minimal quorums get built and shrunk repeatedly.
    best, best_progress = None, 0
    for sub in inner:
        progress = (committed & sub[3]).bit_count()
        if progress > best_progress:
            node = _needed(sub, committed, remaining)
            if node is not None:
                best, best_progress = node, progress
    if best is not None:
        return best
    direct = vmask & remaining
    if direct:
        return (direct & -direct).bit_length() - 1
    for sub in inner:
        node = _needed(sub, committed, remaining)
        if node is not None:
            return node
    return None


def find_minimal_quorums(fbas: Fbas) -> list[NodeSet]:
    """All minimal quorums, sorted by size and then lexicographically by members."""
    return list(_minimal_quorums(fbas))


def top_tier(fbas: Fbas) -> NodeSet:
    tier = 0
    for q in _minimal_quorums(fbas):
        tier |= q
    return tier


def has_quorum_intersection(fbas: Fbas) -> bool:
    """True iff there is a quorum and no two quorums are disjoint.

    Every quorum contains a minimal quorum, so it is enough to check that the
    complement of each minimal quorum contains no quorum.
    """
    minimal = _minimal_quorums(fbas)
    if not minimal:
        return False
    compiled = fbas.compiled
    return all(_greatest_quorum(compiled, fbas.all_nodes & ~q) == 0 for q in minimal)


def _check_subset(fbas: Fbas, s: NodeSet) -> None:
    if s >> len(fbas):
        raise ValueError(f"node set {members(s)} is not a subset of the {len(fbas)} FBAS nodes")
