"""Partial Hadamard matrix counts and probabilities against the asymptotics."""
from hadamard.partial import count_phm, dll_asymptotic, p2_asymptotic, phm_probability

print(f"{'N':>3} {'#PHM 2xN':>14} {'P2':>9} {'asym':>9} {'P3':>9} {'asym':>9}")
for N in (4, 8, 12, 16, 20, 24):
    print(f"{N:>3} {count_phm(2, N):>14} {phm_probability(2, N):9.5f} {p2_asymptotic(N):9.5f} "
          f"{phm_probability(3, N):9.5f} {dll_asymptotic(3, N):9.5f}")
