# # Theta functions from broken lines
#
# A theta function theta_p at a generic point Q sums the final monomials of all
# broken lines that come in parallel to p and end at Q.

# In[1]:

from thetaforge.brokenlines import enumerate_broken_lines, structure_constants, theta, transport
from thetaforge.fixtures import initial_diagram
from thetaforge.scattering import complete

d = complete(initial_diagram("pentagon", 6), 6)

# In the chamber containing p the only broken line is the straight one.

# In[2]:

print(theta(d, (1, 0), (5, -2)).terms.to_text())

# Elsewhere the lines bend on the walls they cross.

# In[3]:

for line in enumerate_broken_lines(d, (1, 0), (-7, 3)):
    print(line.bends, line.final_monomial, line.final_coeff.to_text())
th = theta(d, (1, 0), (-7, 3))
print("theta:", th.terms.to_text(), "pointed:", th.is_pointed())

# Moving Q across walls is the same as applying the wall crossings to the
# expansion.

# In[4]:

moved = transport(d, theta(d, (1, 0), (5, -2)), (-7, 3))
print("transport agrees:", moved.terms == th.terms)

# Products of theta functions expand back in the theta basis with
# nonnegative structure constants, led by t^omega(p1, p2).

# In[5]:

for p, c in sorted(structure_constants(d, (1, 0), (0, 1)).items()):
    print(p, c.to_text())

# On the Kronecker diagram the same product picks up quantum integers.

# In[6]:

k2 = complete(initial_diagram("kronecker2", 6), 6)
for p, c in sorted(structure_constants(k2, (-1, 2), (2, -1)).items()):
    print(p, c.to_text())
