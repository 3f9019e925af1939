# # Refined DT invariants of Kronecker quivers
#
# For the quiver with n arrows between two vertices, the wall of the completed
# diagram in direction (a, b) factors into EE terms whose coefficients are the
# refined invariants Omega_(a,b).

# In[1]:

from thetaforge.dtwall import dense_witnesses, extract_dt, kronecker_diagram

for n in (1, 2, 3):
    report = extract_dt(kronecker_diagram(n, 0, 0, 6))
    print(f"n = {n}: all checks pass = {report.all_pass()}")
    for e in report.entries:
        print(f"   ({e.a}, {e.b})  chi = {e.chi:3d}  Omega = {e.omega.to_text()}")

# With three arrows the walls fill the cone where the Euler form is negative.

# In[2]:

report = extract_dt(kronecker_diagram(3, 0, 0, 6))
for e in dense_witnesses(report):
    print((e.a, e.b), e.omega.to_text())

# The same table as CSV, ready for a spreadsheet.

# In[3]:

print(extract_dt(kronecker_diagram(2, 0, 0, 6)).to_csv())
