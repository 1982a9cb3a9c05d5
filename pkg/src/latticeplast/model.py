"""Lattice spring models: parsing, graph construction and the exact matrices.

Node and spring ids are 1-based everywhere in the public API. Matrix rows
and columns are positional, so row ``j - 1`` of the incidence matrix belongs
to spring ``j`` and column ``i - 1`` to node ``i``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .rational import RationalMatrix, fraction_str, rank, to_fraction


class ModelError(ValueError):
    """Invalid model document or graph; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class SpringSpec:
    id: int
    source: int
    terminus: int
    stiffness: Fraction = Fraction(1)
    c_minus: Fraction = Fraction(-1)
    c_plus: Fraction = Fraction(1)


@dataclass(frozen=True)
class LoadingSpec:
    phi: int
    psi: int
    path: tuple[int, ...] | None = None
    l0: Fraction = Fraction(0)
    l1: Fraction = Fraction(1)


@dataclass(frozen=True)
class ModelSpec:
    node_count: int
    springs: tuple[SpringSpec, ...]
    loading: LoadingSpec

    @property
    def m(self) -> int:
        return len(self.springs)

    @property
    def n(self) -> int:
        return self.node_count


# ---------------------------------------------------------------- parsing


def _rational_field(obj: dict, key: str, default: str, path: str) -> Fraction:
    if key not in obj:
        return Fraction(default)
    try:
        return to_fraction(obj[key])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"not an exact rational ({exc})", f"{path}.{key}") from None


def _int_field(obj: dict, key: str, path: str) -> int:
    if key not in obj:
        raise ModelError("missing field", f"{path}.{key}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelError("expected an integer", f"{path}.{key}")
    return value


def model_from_dict(doc: dict) -> ModelSpec:
    """Validate a decoded model document and build a :class:`ModelSpec`."""
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    n = _int_field(doc, "nodes", "$")
    if n < 2:
        raise ModelError("at least two nodes required", "$.nodes")

    raw_springs = doc.get("springs")
    if not isinstance(raw_springs, list) or not raw_springs:
        raise ModelError("expected a non-empty list", "$.springs")

    springs: dict[int, SpringSpec] = {}
    for k, s in enumerate(raw_springs):
        path = f"$.springs[{k}]"
        if not isinstance(s, dict):
            raise ModelError("spring must be an object", path)
        sid = _int_field(s, "id", path)
        src = _int_field(s, "source", path)
        dst = _int_field(s, "terminus", path)
        if sid in springs:
            raise ModelError(f"duplicate spring id {sid}", f"{path}.id")
        for key, node in (("source", src), ("terminus", dst)):
            if not 1 <= node <= n:
                raise ModelError(f"node {node} out of range 1..{n}", f"{path}.{key}")
        if src == dst:
            raise ModelError(f"self-loop at node {src}", f"{path}.terminus")
        k_j = _rational_field(s, "stiffness", "1", path)
        lo = _rational_field(s, "c_minus", "-1", path)
        hi = _rational_field(s, "c_plus", "1", path)
        if k_j <= 0:
            raise ModelError("nonpositive stiffness", f"{path}.stiffness")
        if lo >= hi:
            raise ModelError(
                "degenerate elastic interval (c_minus must be < c_plus)", f"{path}.c_minus"
            )
        springs[sid] = SpringSpec(sid, src, dst, k_j, lo, hi)

    m = len(springs)
    if sorted(springs) != list(range(1, m + 1)):
        raise ModelError(f"spring ids must be exactly 1..{m}", "$.springs")

    ld = doc.get("loading")
    if not isinstance(ld, dict):
        raise ModelError("missing loading object", "$.loading")
    phi = _int_field(ld, "phi", "$.loading")
    psi = _int_field(ld, "psi", "$.loading")
    for key, node in (("phi", phi), ("psi", psi)):
        if not 1 <= node <= n:
            raise ModelError(f"node {node} out of range 1..{n}", f"$.loading.{key}")
    if phi == psi:
        raise ModelError("phi and psi must differ", "$.loading.psi")
    path_ids = ld.get("path")
    if path_ids is not None:
        if not isinstance(path_ids, list) or not path_ids or not all(
            isinstance(j, int) and not isinstance(j, bool) for j in path_ids
        ):
            raise ModelError("expected a non-empty list of spring ids", "$.loading.path")
        for j in path_ids:
            if j not in springs:
                raise ModelError(f"unknown spring {j}", "$.loading.path")
        path_ids = tuple(path_ids)
    loading = LoadingSpec(
        phi,
        psi,
        path_ids,
        _rational_field(ld, "l0", "0", "$.loading"),
        _rational_field(ld, "l1", "1", "$.loading"),
    )
    return ModelSpec(n, tuple(springs[j] for j in range(1, m + 1)), loading)


def parse_model(document: str) -> ModelSpec:
    """Parse a JSON model document (see README for the schema)."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON ({exc})") from None
    return model_from_dict(doc)


def model_to_dict(spec: ModelSpec) -> dict:
    loading: dict = {"phi": spec.loading.phi, "psi": spec.loading.psi}
    if spec.loading.path is not None:
        loading["path"] = list(spec.loading.path)
    loading["l0"] = fraction_str(spec.loading.l0)
    loading["l1"] = fraction_str(spec.loading.l1)
    return {
        "nodes": spec.node_count,
        "springs": [
            {
                "id": s.id,
                "source": s.source,
                "terminus": s.terminus,
                "stiffness": fraction_str(s.stiffness),
                "c_minus": fraction_str(s.c_minus),
                "c_plus": fraction_str(s.c_plus),
            }
            for s in spec.springs
        ],
        "loading": loading,
    }


def serialize_model(spec: ModelSpec) -> str:
    return json.dumps(model_to_dict(spec), indent=1)


def load_model(path) -> ModelSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def benchmark_spec() -> ModelSpec:
    """The 8-spring, 6-node benchmark network shipped with the package."""
    text = resources.files("latticeplast.data").joinpath("benchmark.json").read_text()
    return parse_model(text)


# ------------------------------------------------------------------ graph


@dataclass(frozen=True)
class SpringGraph:
    n: int
    springs: tuple[tuple[int, int, int], ...]  # (id, source, terminus), 1-based
    phi: int
    psi: int
    path: tuple[int, ...]
    r_vector: tuple[Fraction, ...]
    stiffness: tuple[Fraction, ...]
    c_minus: tuple[Fraction, ...]
    c_plus: tuple[Fraction, ...]
    l0: Fraction = Fraction(0)
    l1: Fraction = Fraction(1)
    _adj: tuple = field(default=(), repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.springs)

    def spring(self, j: int) -> tuple[int, int]:
        """(source, terminus) of spring ``j``."""
        _, s, t = self.springs[j - 1]
        return s, t

    def neighbours(self, i: int) -> list[tuple[int, int]]:
        """(spring id, other node) pairs at node ``i``, sorted by spring id."""
        return self._adj[i - 1]

    def adjacent(self, i: int, j: int) -> bool:
        return any(other == j for _, other in self.neighbours(i))

    def connected_within(self, nodes) -> bool:
        """Is the subgraph induced on ``nodes`` connected (and non-empty)?"""
        nodes = set(nodes)
        if not nodes:
            return False
        start = min(nodes)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for _, k in self.neighbours(i):
                if k in nodes and k not in seen:
                    seen.add(k)
                    stack.append(k)
        return seen == nodes


def _adjacency(n: int, springs) -> tuple:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for sid, s, t in springs:
        adj[s - 1].append((sid, t))
        adj[t - 1].append((sid, s))
    return tuple(tuple(sorted(a)) for a in adj)


def bfs_path(n: int, springs, start: int, goal: int) -> tuple[int, ...] | None:
    """Fewest-springs path start -> goal; neighbours explored by lowest spring id."""
    adj = _adjacency(n, springs)
    parent: dict[int, tuple[int, int] | None] = {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        if i == goal:
            break
        for sid, k in adj[i - 1]:
            if k not in parent:
                parent[k] = (sid, i)
                queue.append(k)
    if goal not in parent:
        return None
    path = []
    node = goal
    while parent[node] is not None:
        sid, prev = parent[node]
        path.append(sid)
        node = prev
    return tuple(reversed(path))


def _walk_signs(springs, phi: int, psi: int, path: Sequence[int]) -> list[int]:
    """Orientation sign of each path spring when walked from phi to psi."""
    ends = {sid: (s, t) for sid, s, t in springs}
    node = phi
    visited = {phi}
    signs = []
    if len(set(path)) != len(path):
        raise ModelError("path repeats a spring", "$.loading.path")
    for k, sid in enumerate(path):
        if sid not in ends:
            raise ModelError(f"unknown spring {sid}", f"$.loading.path[{k}]")
        s, t = ends[sid]
        if node == s:
            signs.append(1)
            node = t
        elif node == t:
            signs.append(-1)
            node = s
        else:
            raise ModelError(
                f"spring {sid} is not incident to node {node}", f"$.loading.path[{k}]"
            )
        if node in visited:
            raise ModelError(f"path revisits node {node}", f"$.loading.path[{k}]")
        visited.add(node)
    if node != psi:
        raise ModelError(f"path ends at node {node}, not psi={psi}", "$.loading.path")
    return signs


def build_graph(spec: ModelSpec) -> SpringGraph:
    """Check connectivity, settle the loading path and build R."""
    n = spec.node_count
    springs = tuple((s.id, s.source, s.terminus) for s in spec.springs)
    adj = _adjacency(n, springs)
    seen = {1}
    stack = [1]
    while stack:
        i = stack.pop()
        for _, k in adj[i - 1]:
            if k not in seen:
                seen.add(k)
                stack.append(k)
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)
        raise ModelError(f"graph is disconnected (nodes {missing} unreachable from 1)")

    ld = spec.loading
    path = ld.path
    if path is None:
        path = bfs_path(n, springs, ld.phi, ld.psi)
        if path is None:
            raise ModelError("no path of springs from phi to psi", "$.loading")
    r = [Fraction(0)] * len(springs)
    for sid, sgn in zip(path, _walk_signs(springs, ld.phi, ld.psi, path)):
        r[sid - 1] = Fraction(sgn)
    return SpringGraph(
        n=n,
        springs=springs,
        phi=ld.phi,
        psi=ld.psi,
        path=tuple(path),
        r_vector=tuple(r),
        stiffness=tuple(s.stiffness for s in spec.springs),
        c_minus=tuple(s.c_minus for s in spec.springs),
        c_plus=tuple(s.c_plus for s in spec.springs),
        l0=ld.l0,
        l1=ld.l1,
        _adj=adj,
    )


def graph_from_edges(
    n: int, edges: Sequence[tuple[int, int]], phi: int, psi: int, path=None
) -> SpringGraph:
    """Convenience constructor: springs numbered 1.. in the order of ``edges``."""
    doc = {
        "nodes": n,
        "springs": [
            {"id": k + 1, "source": s, "terminus": t} for k, (s, t) in enumerate(edges)
        ],
        "loading": {"phi": phi, "psi": psi},
    }
    if path is not None:
        doc["loading"]["path"] = list(path)
    return build_graph(model_from_dict(doc))


def benchmark_graph() -> SpringGraph:
    return build_graph(benchmark_spec())


# --------------------------------------------------------------- matrices


def incidence_matrix(g: SpringGraph) -> RationalMatrix:
    """The m x n matrix D: row j is -1 at source(j), +1 at terminus(j)."""
    rows = []
    for _, s, t in g.springs:
        row = [0] * g.n
        row[s - 1] = -1
        row[t - 1] = 1
        rows.append(row)
    return RationalMatrix(rows, g.n)


def spanning_tree(g: SpringGraph, root: int = 1) -> tuple[int, ...]:
    """Spring ids of the BFS spanning tree from ``root`` (lowest spring id first)."""
    seen = {root}
    queue = deque([root])
    tree = []
    while queue:
        i = queue.popleft()
        for sid, k in g.neighbours(i):
            if k not in seen:
                seen.add(k)
                tree.append(sid)
                queue.append(k)
    return tuple(sorted(tree))


def kernel_basis(g: SpringGraph, tree: Sequence[int] | None = None) -> RationalMatrix:
    """Fundamental-cycle basis of ker(D^T), one column per non-tree spring.

    Column for chord e = (s -> t) is +1 at e plus the signed tree path t -> s,
    so every column is a closed walk and annihilates D.
    """
    tree_ids = set(spanning_tree(g) if tree is None else tree)
    if len(tree_ids) != g.n - 1:
        raise ModelError(f"a spanning tree has {g.n - 1} springs, got {len(tree_ids)}")
    tree_adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(1, g.n + 1)}
    for sid in sorted(tree_ids):
        s, t = g.spring(sid)
        tree_adj[s].append((sid, t))
        tree_adj[t].append((sid, s))

    # parent pointers from node 1 give every tree path via the root
    parent: dict[int, tuple[int, int] | None] = {1: None}
    depth = {1: 0}
    queue = deque([1])
    while queue:
        i = queue.popleft()
        for sid, k in tree_adj[i]:
            if k not in parent:
                parent[k] = (sid, i)
                depth[k] = depth[i] + 1
                queue.append(k)
    if len(parent) != g.n:
        raise ModelError("given tree does not span the graph")

    def signed_step(sid: int, frm: int) -> int:
        s, _ = g.spring(sid)
        return 1 if frm == s else -1

    columns = []
    chords = [sid for sid, _, _ in g.springs if sid not in tree_ids]
    for chord in chords:
        col = [Fraction(0)] * g.m
        col[chord - 1] += 1
        s, t = g.spring(chord)
        # walk t -> s through the tree: climb both ends to their meeting point
        up_from_t, up_from_s = [], []
        a, b = t, s
        while a != b:
            if depth[a] >= depth[b]:
                sid, pa = parent[a]
                up_from_t.append((sid, a))
                a = pa
            else:
                sid, pb = parent[b]
                up_from_s.append((sid, pb))
                b = pb
        for sid, frm in up_from_t:
            col[sid - 1] += signed_step(sid, frm)
        for sid, frm in up_from_s:
            col[sid - 1] += signed_step(sid, frm)
        columns.append(col)
    return RationalMatrix.from_columns(columns, g.m) if columns else RationalMatrix([[]] * g.m, 0)


def incidence_vector_R(g: SpringGraph, path: Sequence[int]) -> tuple[Fraction, ...]:
    """Signed incidence vector of a phi -> psi path of springs."""
    r = [Fraction(0)] * g.m
    for sid, sgn in zip(path, _walk_signs(g.springs, g.phi, g.psi, path)):
        r[sid - 1] = Fraction(sgn)
    return tuple(r)


@dataclass(frozen=True)
class AssumptionReport:
    connected: bool
    rank_D: int
    m_gt_n: bool
    rank_DTR_is_1: bool
    max_cardinality: int
    DTR: tuple[Fraction, ...] = ()

    def to_dict(self) -> dict:
        return {
            "connected": self.connected,
            "rank_D": self.rank_D,
            "m_gt_n": self.m_gt_n,
            "rank_DTR_is_1": self.rank_DTR_is_1,
            "max_cardinality": self.max_cardinality,
            "DTR": [fraction_str(v) for v in self.DTR],
        }


def validate_assumptions(g: SpringGraph) -> AssumptionReport:
    D = incidence_matrix(g)
    dtr = D.T @ g.r_vector
    everyone = set(range(1, g.n + 1))
    return AssumptionReport(
        connected=g.connected_within(everyone),
        rank_D=rank(D.rows),
        m_gt_n=g.m > g.n,
        rank_DTR_is_1=any(v != 0 for v in dtr),
        max_cardinality=g.m - g.n + 2,
        DTR=tuple(dtr),
    )
