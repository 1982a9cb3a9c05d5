# %% [markdown]
# # Collapsing nodes onto the loaded ends
#
# A move "i:=j" glues a free node i onto an already collapsed neighbour j.
# Once every node sits on the Phi side or the Psi side, the springs that
# cross between the two sides form a signed index set.

# %%
from latticeplast import benchmark_graph
from latticeplast.topology import (
    apply_collapse,
    enumerate_index_sets,
    index_set_from_final,
)

g = benchmark_graph()
trace = []
final = apply_collapse(g, [(3, 1), (5, 3), (4, 6), (2, 4)], trace=trace)
for st in trace:
    print(st.describe())
print(index_set_from_final(g, final))

# %% [markdown]
# Sign +1 means the spring runs from the Phi side to the Psi side, -1 the
# reverse. Each connected bipartition gives one such set; the benchmark
# has nine.

# %%
for entry in enumerate_index_sets(g):
    seq = " ".join(f"{m.move}:{m.anchor}" for m in entry.witness)
    print(f"{str(entry.index_set):30s} A={list(entry.bipartition.a_side)}  via {seq}")
