"""Defect of the Fourier matrix of every abelian group of order <= 12,
numeric rank against the closed form."""
from hadamard.constructions import abelian_groups_upto, fourier
from hadamard.defect import defect_fourier_closed, defect_numeric

print(f"{'group':>12} {'N':>3} {'numeric':>8} {'closed':>7}")
for G in abelian_groups_upto(12):
    r = defect_numeric(fourier(G))
    print(f"{str(G):>12} {G.size:>3} {r.defect:>8} {defect_fourier_closed(G):>7}")
