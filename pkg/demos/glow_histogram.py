"""Glow of H_6^q: histogram of |E| / N^{3/2} over random row and column
phases, plus the normalized fourth moment against 1 - 1/N."""
import numpy as np

from hadamard.constructions import H6q
from hadamard.glow import glow_mc, normalized_moment_mc

H = H6q(np.exp(1.1j))
res = glow_mc(H, samples=200_000, seed=0)
counts, edges = res["counts"], res["edges"]
N = H.shape[0]
width = 50 / counts.max()
step = max(1, len(counts) // 20)
for k in range(0, len(counts), step):
    c = counts[k:k + step].sum()
    print(f"{edges[k] / N ** 1.5:5.2f} {'#' * int(c * width / step)}")
m, se = normalized_moment_mc(H, 2, samples=200_000, seed=1)
print(f"(1/2) E(|E|/N)^4 = {m:.4f} +- {se:.4f}, first-order term 1 - 1/N = {1 - 1 / N:.4f}")
