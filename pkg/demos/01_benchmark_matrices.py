# %% [markdown]
# # The six-node benchmark network
#
# Eight unit springs join six nodes. Node 1 is held fixed (Phi) and node 6
# is pulled (Psi). Everything below is exact rational arithmetic.

# %%
from latticeplast import benchmark_graph, incidence_matrix, kernel_basis, validate_assumptions

g = benchmark_graph()
for j, s, t in g.springs:
    print(f"spring {j}: {s} -> {t}")

# %% [markdown]
# Row j of the incidence matrix D holds -1 at the source and +1 at the
# terminus, so D @ xi gives spring elongations from node displacements.

# %%
D = incidence_matrix(g)
for row in D.to_strings():
    print(" ".join(v.rjust(2) for v in row))

# %% [markdown]
# The columns of Dperp span the cycle space: one fundamental cycle per
# spring left out of a BFS spanning tree. Dperp^T D vanishes exactly.

# %%
B = kernel_basis(g)
print(B.shape, (B.T @ D).is_zero())
for row in B.to_strings():
    print(" ".join(v.rjust(2) for v in row))

# %% [markdown]
# R marks the path 1 -> 4 -> 7 from Phi to Psi; R^T D xi = xi_Psi - xi_Phi.

# %%
print("R =", [int(v) for v in g.r_vector])
print(validate_assumptions(g).to_dict())
