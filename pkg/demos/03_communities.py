# Private community division and the reuse-or-repartition test.
# Run with: python demos/03_communities.py

# %%
import numpy as np

from dpstream.community import comm_div, determine, louvain, modularity
from dpstream.datasets import planted_partition
from dpstream.dp import NoiseSource

s = planted_partition([40, 40, 40], 0.25, 0.01, seed=2)
truth = np.repeat([0, 1, 2], 40)
adj = s.adjacency().toarray()

# non-private Louvain for reference
part = louvain(adj, NoiseSource(0))
print("louvain communities:", part.num_communities,
      "modularity:", round(modularity(adj, part.labels), 3),
      "planted:", round(modularity(adj, truth), 3))

# %%
# the private version groups nodes into random super-nodes, perturbs the
# super-node graph, runs Louvain there, then refines node by node
for eps_c in (0.05, 0.5, 5.0):
    p = comm_div(s, eps_c, group_size=5, ns=NoiseSource(1))
    print(f"eps_c={eps_c}: {p.num_communities} communities, "
          f"modularity {modularity(adj, p.labels):.3f}")

# %%
# later timestamps reuse the old partition unless the noisy edge count
# moved by more than the threshold (one edge per node by default)
prev = comm_div(s, 0.5, group_size=5, ns=NoiseSource(1))
for m_now in (len(s.edges) + 30, len(s.edges) + 300):
    d = determine(2, m_now, len(s.edges), s, prev, s.num_nodes, 0.5, NoiseSource(3), group_size=5)
    print(f"delta_e={d.delta_e:.0f} -> {d.kind.value}, eps_c spent {d.eps_c_spent}")
