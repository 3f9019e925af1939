# # Completing a scattering diagram
#
# Two incoming lines in a rank-2 quantum torus rarely commute. Completion adds
# outgoing rays, order by order, until every loop around the origin acts as the
# identity.

# In[1]:

from thetaforge.fixtures import initial_diagram
from thetaforge.scattering import check_consistent, complete

# The simplest case: two lines with omega(v1, v2) = 1. Before completion the loop
# fails at order 2.

# In[2]:

start = initial_diagram("pentagon", 8)
report = check_consistent(start)
print("consistent before completion:", bool(report), "first failing order:", report.first_failing_order)

# After completion a single ray in direction v1 + v2 appears, carrying the same
# quantum dilogarithm as the inputs.

# In[3]:

d = complete(start, 8)
for ray, direction, factors in d.to_ee_form():
    print(ray, direction, {j: p.to_text() for j, p in factors.items()})
print("consistent after completion:", bool(check_consistent(d)))

# Shifting the second input by t^-1 gives a dense diagram: a ray in every
# direction (1, n), with wall functions led by t^-n.

# In[4]:

dense = complete(initial_diagram("dense_example", 8), 8)
for n in range(1, 6):
    print((1, n), dense.p_at((1, n)).to_text())
print("(2, 2):", dense.p_at((2, 2)).to_text())

# The same rays as an SVG picture.

# In[5]:

from thetaforge.scattering import to_svg

with open("dense_example.svg", "w") as fh:
    fh.write(to_svg(dense))
print("wrote dense_example.svg")
