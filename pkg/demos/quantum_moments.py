"""Cesaro-averaged character moments of the magic grid of F_N, which converge
to the group value N^{p-1}, and the free Poisson approximation of c_2."""
from hadamard.constructions import fourier_matrix
from hadamard.quantum import cesaro_moments, free_poisson_check, magic_from_hadamard

for N in (3, 4, 5):
    g = magic_from_hadamard(fourier_matrix(N))
    vals = [cesaro_moments(g, p, k_max=200)["limit"].real for p in (1, 2, 3)]
    print(f"F_{N}: " + ", ".join(f"p={p}: {v:.6f} (target {N ** (p - 1)})" for p, v in zip((1, 2, 3), vals)))
for row in free_poisson_check(2, 1, 1, [6, 8, 10, 12]):
    print(f"M=N={row['M']}: c_2 = {row['exact']}, prediction {float(row['prediction']):.1f}, "
          f"rel error {row['rel_error']:.4f}")
