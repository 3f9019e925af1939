# # Quantum cluster variables of type A2
#
# The cluster scattering diagram of a seed is the completion of one wall per
# unfrozen direction. Its chambers are indexed by mutation sequences and the
# theta functions on their rays are the quantum cluster variables.

# In[1]:

from thetaforge.cluster import build_cluster_diagram, chambers, cluster_variables, compare_mutation
from thetaforge.fixtures import seed
from thetaforge.qtorus import classical_limit

a2 = seed("a2_seed")
for c in chambers(a2):
    print("chamber", c.jseq, c.rays)

# Five chambers, five cluster variables. Each is a Laurent polynomial with
# bar-invariant nonnegative coefficients.

# In[2]:

for g, q in sorted(cluster_variables(a2, 6).items()):
    print(g, q.to_text())
    print("   at t = 1:", classical_limit(q))

# Mutating the diagram by the piecewise-linear map of a mutation gives the
# diagram of the mutated seed.

# In[3]:

for name in ("a2_seed", "kronecker2_seed"):
    for j in (0, 1):
        print(name, j, compare_mutation(seed(name), j, 6).equal)

# The Kronecker seed has infinitely many chambers accumulating on the central
# ray, whose wall carries [2]_t.

# In[4]:

k2 = seed("kronecker2_seed")
print([len(chambers(k2, n)) for n in (2, 4, 6, 8)])
d = build_cluster_diagram(k2, "a", 6)
for ray, direction, factors in d.to_ee_form():
    print(direction, {j: p.to_text() for j, p in factors.items()})
