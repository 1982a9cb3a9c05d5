"""Node-collapse rule, connected bipartitions and their signed index sets.

Coordinates are symbolic. The generic starting configuration (all nodes at
distinct positions, phi left of psi) is a label state in which every node
except phi and psi is ``FREE``; a move copies the label of an adjacent
collapsed anchor onto a free node.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .model import SpringGraph

FREE = 0
AT_PHI = -1
AT_PSI = 1

_LABEL_NAMES = {FREE: "free", AT_PHI: "phi", AT_PSI: "psi"}


class IllegalMoveError(ValueError):
    """A collapse move broke the transformation rule.

    ``position`` is 1-based within the sequence; ``clause`` is one of
    ``"mover collapsed"``, ``"anchor free"``, ``"not adjacent"``, ``"unknown node"``.
    """

    def __init__(self, position: int, clause: str, message: str):
        self.position = position
        self.clause = clause
        super().__init__(f"move {position}: {message}")


class NotCollapsedError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CollapseMove:
    move: int
    anchor: int

    def to_dict(self) -> dict:
        return {"move": self.move, "anchor": self.anchor}


CollapseSequence = tuple  # tuple[CollapseMove, ...]


def as_sequence(moves: Iterable) -> tuple[CollapseMove, ...]:
    return tuple(m if isinstance(m, CollapseMove) else CollapseMove(*m) for m in moves)


@dataclass(frozen=True)
class NodeLabelState:
    labels: tuple[int, ...]  # one of FREE / AT_PHI / AT_PSI per node, 1-based via label()

    def label(self, i: int) -> int:
        return self.labels[i - 1]

    @property
    def free_nodes(self) -> list[int]:
        return [i + 1 for i, lab in enumerate(self.labels) if lab == FREE]

    @property
    def phi_side(self) -> list[int]:
        return [i + 1 for i, lab in enumerate(self.labels) if lab == AT_PHI]

    @property
    def psi_side(self) -> list[int]:
        return [i + 1 for i, lab in enumerate(self.labels) if lab == AT_PSI]

    @property
    def complete(self) -> bool:
        return FREE not in self.labels

    def describe(self) -> str:
        return " ".join(f"{i + 1}:{_LABEL_NAMES[lab]}" for i, lab in enumerate(self.labels))


def initial_state(g: SpringGraph) -> NodeLabelState:
    labels = [FREE] * g.n
    labels[g.phi - 1] = AT_PHI
    labels[g.psi - 1] = AT_PSI
    return NodeLabelState(tuple(labels))


def apply_move(g: SpringGraph, state: NodeLabelState, mv: CollapseMove, position: int = 1):
    i, j = mv.move, mv.anchor
    for node in (i, j):
        if not 1 <= node <= g.n:
            raise IllegalMoveError(position, "unknown node", f"node {node} does not exist")
    if state.label(i) != FREE:
        raise IllegalMoveError(
            position, "mover collapsed", f"node {i} already sits at {_LABEL_NAMES[state.label(i)]}"
        )
    if state.label(j) == FREE:
        raise IllegalMoveError(
            position, "anchor free", f"anchor {j} is not yet collapsed onto phi or psi"
        )
    if not g.adjacent(i, j):
        raise IllegalMoveError(position, "not adjacent", f"nodes {i} and {j} share no spring")
    labels = list(state.labels)
    labels[i - 1] = state.label(j)
    return NodeLabelState(tuple(labels))


def apply_collapse(g: SpringGraph, seq: Iterable, trace: list | None = None) -> NodeLabelState:
    """Apply a collapse sequence to the generic initial configuration.

    If ``trace`` is given, the state after each move is appended to it.
    """
    state = initial_state(g)
    for k, mv in enumerate(as_sequence(seq), start=1):
        state = apply_move(g, state, mv, k)
        if trace is not None:
            trace.append(state)
    return state


# ------------------------------------------------------------- index sets


@dataclass(frozen=True)
class SignedIndexSet:
    """Signed spring indices, kept sorted by (spring, alpha)."""

    elements: tuple[tuple[int, int], ...] = ()

    def __init__(self, elements: Iterable = ()):
        items = set()
        for alpha, j in elements:
            if alpha not in (-1, 1):
                raise ValueError(f"alpha must be +1 or -1, got {alpha}")
            items.add((int(alpha), int(j)))
        object.__setattr__(self, "elements", tuple(sorted(items, key=lambda e: (e[1], e[0]))))

    @classmethod
    def parse(cls, text: str) -> "SignedIndexSet":
        """Parse the compact form ``"+1,-3,-6,+8"``."""
        out = []
        for tok in text.replace(" ", "").split(","):
            if not tok:
                continue
            if tok[0] not in "+-":
                raise ValueError(f"index {tok!r} needs an explicit sign")
            out.append((1 if tok[0] == "+" else -1, int(tok[1:])))
        if not out:
            raise ValueError("empty index set")
        return cls(out)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item) -> bool:
        return tuple(item) in self.elements

    @property
    def springs(self) -> tuple[int, ...]:
        return tuple(sorted({j for _, j in self.elements}))

    @property
    def has_mixed_pair(self) -> bool:
        return len(self.springs) != len(self.elements)

    def without(self, item) -> "SignedIndexSet":
        return SignedIndexSet(e for e in self.elements if e != tuple(item))

    def union(self, other: "SignedIndexSet") -> "SignedIndexSet":
        return SignedIndexSet(self.elements + other.elements)

    def issubset(self, other: "SignedIndexSet") -> bool:
        return set(self.elements) <= set(other.elements)

    def negated(self) -> "SignedIndexSet":
        return SignedIndexSet((-a, j) for a, j in self.elements)

    def sort_key(self):
        return (len(self.elements), self.elements)

    def compact(self) -> str:
        return ",".join(f"{'+' if a > 0 else '-'}{j}" for a, j in self.elements)

    def to_list(self) -> list[dict]:
        return [{"alpha": a, "spring": j} for a, j in self.elements]

    def __str__(self) -> str:
        return "{" + ", ".join(f"({a},{j})" for a, j in self.elements) + "}"


def index_set_from_final(g: SpringGraph, state: NodeLabelState) -> SignedIndexSet:
    """Springs whose ends lie on opposite sides; alpha = +1 when the source is on phi's side."""
    if not state.complete:
        raise NotCollapsedError(f"nodes {state.free_nodes} are still free")
    out = []
    for sid, s, t in g.springs:
        ls, lt = state.label(s), state.label(t)
        if ls != lt:
            out.append((1 if ls == AT_PHI else -1, sid))
    return SignedIndexSet(out)


# ------------------------------------------------------------ bipartitions


@dataclass(frozen=True)
class Bipartition:
    a_side: tuple[int, ...]
    b_side: tuple[int, ...]

    def __init__(self, a_side: Iterable[int], b_side: Iterable[int]):
        object.__setattr__(self, "a_side", tuple(sorted(a_side)))
        object.__setattr__(self, "b_side", tuple(sorted(b_side)))

    @classmethod
    def from_a_side(cls, g: SpringGraph, a_side: Iterable[int]) -> "Bipartition":
        a = set(a_side)
        return cls(a, set(range(1, g.n + 1)) - a)

    def validate(self, g: SpringGraph) -> None:
        a, b = set(self.a_side), set(self.b_side)
        if a & b or a | b != set(range(1, g.n + 1)):
            raise ValueError("sides must partition the node set")
        if g.phi not in a or g.psi not in b:
            raise ValueError(f"phi={g.phi} must be on side A and psi={g.psi} on side B")
        if not g.connected_within(a):
            raise ValueError(f"side A {sorted(a)} is not connected")
        if not g.connected_within(b):
            raise ValueError(f"side B {sorted(b)} is not connected")

    def state(self, g: SpringGraph) -> NodeLabelState:
        a = set(self.a_side)
        return NodeLabelState(tuple(AT_PHI if i in a else AT_PSI for i in range(1, g.n + 1)))

    def to_dict(self) -> dict:
        return {"A": list(self.a_side), "B": list(self.b_side)}


def enumerate_bipartitions(g: SpringGraph) -> list[Bipartition]:
    """Every (A, B) with phi in A, psi in B and both induced subgraphs connected.

    Plain scan over the 2**(n-2) assignments of the other nodes.
    """
    others = [i for i in range(1, g.n + 1) if i not in (g.phi, g.psi)]
    out = []
    for bits in itertools.product((0, 1), repeat=len(others)):
        a = {g.phi} | {i for i, bit in zip(others, bits) if bit == 0}
        b = {g.psi} | {i for i, bit in zip(others, bits) if bit == 1}
        if g.connected_within(a) and g.connected_within(b):
            out.append(Bipartition(a, b))
    out.sort(key=lambda bp: bp.a_side)
    return out


def _bfs_moves(g: SpringGraph, root: int, side: set[int]) -> list[CollapseMove]:
    moves = []
    seen = {root}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for _, k in g.neighbours(i):
            if k in side and k not in seen:
                seen.add(k)
                moves.append(CollapseMove(k, i))
                queue.append(k)
    return moves


def witness_sequence(g: SpringGraph, bp: Bipartition) -> tuple[CollapseMove, ...]:
    """A legal collapse sequence ending in ``bp``: BFS in A from phi, then in B from psi."""
    bp.validate(g)
    return tuple(
        _bfs_moves(g, g.phi, set(bp.a_side)) + _bfs_moves(g, g.psi, set(bp.b_side))
    )


@dataclass
class IndexSetEntry:
    index_set: SignedIndexSet
    bipartitions: list[Bipartition] = field(default_factory=list)
    witnesses: list[tuple[CollapseMove, ...]] = field(default_factory=list)

    @property
    def bipartition(self) -> Bipartition:
        return self.bipartitions[0]

    @property
    def witness(self) -> tuple[CollapseMove, ...]:
        return self.witnesses[0]

    def to_dict(self) -> dict:
        return {
            "index_set": self.index_set.to_list(),
            "bipartitions": [bp.to_dict() for bp in self.bipartitions],
            "witnesses": [[mv.to_dict() for mv in w] for w in self.witnesses],
        }


def enumerate_index_sets(g: SpringGraph) -> list[IndexSetEntry]:
    """Index set, bipartition and witness for every connected bipartition.

    Bipartitions producing the same index set are merged into one entry.
    """
    entries: dict[SignedIndexSet, IndexSetEntry] = {}
    for bp in enumerate_bipartitions(g):
        i0 = index_set_from_final(g, bp.state(g))
        entry = entries.setdefault(i0, IndexSetEntry(i0))
        entry.bipartitions.append(bp)
        entry.witnesses.append(witness_sequence(g, bp))
    return sorted(entries.values(), key=lambda e: e.bipartitions[0].a_side)


def reachable_final_states(g: SpringGraph) -> set[tuple[int, ...]]:
    """All fully collapsed label tuples reachable by legal moves (exhaustive search)."""
    start = initial_state(g)
    seen = {start.labels}
    queue = deque([start])
    finals = set()
    while queue:
        st = queue.popleft()
        if st.complete:
            finals.add(st.labels)
            continue
        for i in st.free_nodes:
            for _, j in g.neighbours(i):
                if st.label(j) != FREE:
                    nxt = apply_move(g, st, CollapseMove(i, j))
                    if nxt.labels not in seen:
                        seen.add(nxt.labels)
                        queue.append(nxt)
    return finals


def walks_to_endpoint(g: SpringGraph, state: NodeLabelState) -> bool:
    """Every phi-labelled node reaches phi through phi-labelled nodes; same for psi."""
    for label, root in ((AT_PHI, g.phi), (AT_PSI, g.psi)):
        nodes = {i for i in range(1, g.n + 1) if state.label(i) == label}
        if not g.connected_within(nodes) or root not in nodes:
            return False
    return True
