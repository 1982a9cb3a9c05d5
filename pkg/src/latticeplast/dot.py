"""Graphviz DOT rendering of spring graphs and collapsed configurations."""

from __future__ import annotations

from .model import SpringGraph
from .topology import Bipartition, SignedIndexSet, index_set_from_final

A_COLOR = "lightblue"
B_COLOR = "lightsalmon"


def to_dot(
    g: SpringGraph,
    bipartition: Bipartition | None = None,
    index_set: SignedIndexSet | None = None,
) -> str:
    """DOT text for ``g``; phi is drawn as a box, psi as a double circle.

    A bipartition colours the two sides and turns it into an index set.
    Springs in the index set are bold and labelled with their sign.
    """
    if bipartition is not None:
        bipartition.validate(g)
        derived = index_set_from_final(g, bipartition.state(g))
        if index_set is not None and index_set != derived:
            raise ValueError("index set does not match the bipartition's cut springs")
        index_set = derived
    alpha = {j: a for a, j in index_set} if index_set is not None else {}
    a_side = set(bipartition.a_side) if bipartition is not None else set()

    lines = ["digraph springs {", "  rankdir=LR;"]
    for i in range(1, g.n + 1):
        attrs = []
        if i == g.phi:
            attrs += ["shape=box", 'xlabel="Phi"']
        elif i == g.psi:
            attrs += ["shape=doublecircle", 'xlabel="Psi"']
        else:
            attrs.append("shape=circle")
        if bipartition is not None:
            color = A_COLOR if i in a_side else B_COLOR
            attrs += ["style=filled", f"fillcolor={color}"]
        lines.append(f"  {i} [{', '.join(attrs)}];")
    for sid, s, t in g.springs:
        if sid in alpha:
            sign = "+" if alpha[sid] > 0 else "-"
            lines.append(f'  {s} -> {t} [label="{sign}{sid}", style=bold, penwidth=3];')
        else:
            lines.append(f'  {s} -> {t} [label="{sid}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
