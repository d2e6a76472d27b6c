"""CPDAGs, class enumeration, and class averaging.

Two DAGs are observationally equivalent when they share a skeleton and the
same colliders; the completed partially directed graph shows which edges
every member agrees on.  Declaring the outcome a sink shrinks the class.
"""

import numpy as np

from nscausal import WeightedDag, dag_to_cpdag, enumerate_mec, mec_average

w = np.zeros((4, 4))
w[0, 1] = 1.0   # z0 -> z1
w[1, 3] = 1.0   # z1 -> y
w[2, 3] = 1.0   # z2 -> y
g = WeightedDag(w)

print("== CPDAG of the class ==")
c = dag_to_cpdag(g)
print("compelled:", sorted(c.directed))
print("reversible:", sorted(c.undirected))

print("\n== Every member DAG ==")
members = enumerate_mec(c)
for k, member in enumerate(members):
    edges = [f"{member.labels[i]}->{member.labels[j]}"
             for i, j in np.argwhere(member.weights != 0)]
    print(f"member {k}: {edges}")

print("\n== Class average (edge orientation frequencies) ==")
print(np.round(mec_average(members), 3))

print("\n== With the outcome pinned as a sink ==")
restricted = dag_to_cpdag(g, outcome_sink=True)
sink_members = enumerate_mec(restricted)
print(f"members: {len(members)} unrestricted, {len(sink_members)} restricted")
for member in sink_members:
    assert not member.weights[member.outcome_index].any()
print("every restricted member keeps the outcome childless")
