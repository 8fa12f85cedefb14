"""Arithmetic obstructions for Butson matrices: vanishing sums of roots of
unity, cycle decompositions, regularity, and the Sylvester / Lam-Leung /
de Launey / Turyn type conditions."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import ButsonMatrix, ValidationError, vanishes_exact


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(l: int):
    """(p, a) if l = p^a with a >= 1, else None."""
    ps = prime_factors(l)
    if len(ps) != 1:
        return None
    p, a = ps[0], 0
    while l > 1:
        l //= p
        a += 1
    return p, a


def valuation(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# root multisets and cycles

@dataclass(frozen=True)
class RootMultiset:
    """lambda_1 + ... + lambda_N with counts[k] copies of w^k, w = e^{2 pi i/l}."""
    level: int
    counts: tuple

    def __post_init__(self):
        c = tuple(int(x) for x in self.counts)
        if len(c) != self.level or any(x < 0 for x in c):
            raise ValidationError("need l nonnegative counts")
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_exponents(cls, exps, l: int) -> "RootMultiset":
        return cls(l, tuple(np.bincount(np.asarray(exps, int).ravel() % l, minlength=l)))

    @property
    def size(self) -> int:
        return sum(self.counts)

    def value(self) -> complex:
        k = np.arange(self.level)
        return complex(np.dot(self.counts, np.exp(2j * np.pi * k / self.level)))


def cycle_support(l: int, p: int, r: int) -> list[int]:
    """Exponents of the rotated p-cycle S_p^r = w^r (1 + z + ... + z^{p-1}), z of order p."""
    step = l // p
    return [(r + j * step) % l for j in range(p)]


@dataclass(frozen=True)
class CycleDecomposition:
    """Multiplicities of rotated cycles (p, r) -> m, with r in [0, l/p)."""
    level: int
    cycles: tuple  # ((p, r, m), ...)

    def reassemble(self) -> tuple:
        c = [0] * self.level
        for p, r, m in self.cycles:
            for k in cycle_support(self.level, p, r):
                c[k] += m
        return tuple(c)

    def structure(self) -> str:
        sizes = sorted((p for p, _, m in self.cycles for _ in range(m)), reverse=True)
        return "+".join(str(s) for s in sizes) if sizes else "0"


def vanishes(m: RootMultiset) -> bool:
    return vanishes_exact(m.counts, m.level)


def cycle_decompose(m: RootMultiset) -> CycleDecomposition:
    """Decompose a vanishing sum at prime-power level p^a into rotated
    p-cycles.  The cycles S_p^r, r < l/p, partition Z_l, and a sum vanishes
    iff its counts are constant on each of them."""
    pa = prime_power(m.level)
    if pa is None:
        raise ValidationError(f"level {m.level} is not a prime power; cycle decompositions may not exist")
    p = pa[0]
    l = m.level
    cycles = []
    for r in range(l // p):
        vals = {m.counts[k] for k in cycle_support(l, p, r)}
        if len(vals) != 1:
            raise ValidationError("sum does not vanish")
        v = vals.pop()
        if v:
            cycles.append((p, r, v))
    return CycleDecomposition(l, tuple(cycles))


def cycle_search(m: RootMultiset, budget: int = 200_000):
    """Exhaustive search for a decomposition into rotated prime cycles at any
    level.  Returns (status, decomposition) with status in
    {"regular", "irregular", "inconclusive"}."""
    l = m.level
    primes = prime_factors(l)
    supports = {(p, r): cycle_support(l, p, r) for p in primes for r in range(l // p)}
    seen = set()
    steps = [0]

    def rec(c):
        if not any(c):
            return []
        if c in seen:
            return None
        steps[0] += 1
        if steps[0] > budget:
            raise TimeoutError
        k = next(i for i, x in enumerate(c) if x)
        for p in primes:
            r = k % (l // p)
            sup = supports[(p, r)]
            if all(c[j] > 0 for j in sup):
                d = list(c)
                for j in sup:
                    d[j] -= 1
                sub = rec(tuple(d))
                if sub is not None:
                    return [(p, r)] + sub
        seen.add(c)
        return None

    try:
        found = rec(m.counts)
    except TimeoutError:
        return "inconclusive", None
    if found is None:
        return "irregular", None
    cnt = Counter(found)
    return "regular", CycleDecomposition(l, tuple(sorted((p, r, v) for (p, r), v in cnt.items())))


# ---------------------------------------------------------------------------
# existence obstructions

def semigroup_member(N: int, gens) -> bool:
    ok = [False] * (N + 1)
    ok[0] = True
    for n in range(1, N + 1):
        ok[n] = any(g <= n and ok[n - g] for g in gens)
    return ok[N]


def lam_leung(N: int, l: int) -> bool:
    """N in p_1 N + ... + p_k N, p_i the primes dividing l."""
    if l < 2 or N < 1:
        raise ValidationError("need l >= 2 and N >= 1")
    return semigroup_member(N, prime_factors(l))


def sylvester(N: int) -> bool:
    """Real Hadamard matrices need N in {1, 2} or 4 | N."""
    return N in (1, 2) or N % 4 == 0


def butson_prime_power(N: int, l: int) -> bool:
    """For l = p^a, H_N(l) nonempty needs p | N."""
    pa = prime_power(l)
    if pa is None:
        raise ValidationError("l must be a prime power")
    return N % pa[0] == 0


def de_launey_l3(N: int) -> bool:
    """Determinant obstruction at levels 3 and 6: |det H|^2 = N^N must be a
    norm from Z[w], w = e^{2 pi i/3}.  Every prime p = 2 mod 3 is inert in
    Z[w], so its valuation in a norm is even.  False = obstructed."""
    return all((N * valuation(N, p)) % 2 == 0 for p in prime_factors(N) if p % 3 == 2)


def de_launey_l3_mod5(N: int) -> bool:
    """The mod 5 case: a + bw + cw^2 with |d|^2 = 0 (5) forces 5 | d, so
    v_5(N^N) = N v_5(N) must be even.  False = obstructed."""
    return (N * valuation(N, 5)) % 2 == 0


def mod5_system_solutions() -> list[tuple]:
    """Nonzero solutions mod 5 of x + y + z = 0, x^2 + y^2 + z^2 = 0 (there are none)."""
    return [(x, y, z) for x in range(5) for y in range(5) for z in range(5)
            if (x, y, z) != (0, 0, 0) and (x + y + z) % 5 == 0 and (x * x + y * y + z * z) % 5 == 0]


def turyn_circulant(counts, l: int) -> bool:
    """Necessary condition for a circulant Butson matrix whose first row has
    counts[k] entries equal to w^k."""
    a = [int(x) for x in counts]
    if len(a) != l:
        raise ValidationError("need l counts")
    N = sum(a)
    if l == 2:
        return (a[0] - a[1]) ** 2 == N
    if l == 4:
        return (a[0] - a[2]) ** 2 + (a[1] - a[3]) ** 2 == N
    if prime_power(l) == (l, 1):
        return all(sum((a[i] - a[(i + k) % l]) ** 2 for i in range(l)) == 2 * N for k in range(1, l))
    raise ValidationError("turyn_circulant supports l = 2, 4 or prime")


def turyn_circulant_exists(N: int, l: int) -> bool:
    """Some split of N into l counts passes turyn_circulant."""
    def splits(n, k):
        if k == 1:
            yield (n,)
            return
        for x in range(n + 1):
            for rest in splits(n - x, k - 1):
                yield (x,) + rest
    return any(turyn_circulant(s, l) for s in splits(N, l))


def turyn_8roots(x: int, y: int, z: int, t: int, N: int) -> bool:
    """|x + wy + iz + iwt|^2 = N with w = e^{i pi/4}, i.e. sum of squares N
    and xy + yz + zt = xt (the sqrt 2 part must vanish)."""
    return x * x + y * y + z * z + t * t == N and x * y + y * z + z * t == x * t


def _box(N: int) -> range:
    b = math.isqrt(2 * N)
    if b * b < 2 * N:
        b += 1
    return range(-b, b + 1)


def bistochastic_butson_solutions(N: int, l: int) -> list[tuple]:
    """Integer solutions of the bistochastic Turyn identities in the box |x| <= ceil(sqrt 2N)."""
    B = _box(N)
    if l == 2:
        n = math.isqrt(N // 4)
        return [(n,)] if N % 4 == 0 and 4 * n * n == N else []
    if l == 3:
        return [(x, y, -x - y) for x in B for y in B
                if abs(x + y) <= B.stop and x * x + y * y + (x + y) ** 2 == 2 * N]
    if l == 4:
        return [(a, b) for a in B for b in B if a * a + b * b == N]
    if l == 8:
        return [(x, y, z, t) for x in B for y in B for z in B for t in B if turyn_8roots(x, y, z, t, N)]
    raise ValidationError("bistochastic obstruction implemented for l in {2, 3, 4, 8}")


def bistochastic_butson_obstruction(N: int, l: int) -> bool:
    """True when the identities are solvable (no obstruction)."""
    return bool(bistochastic_butson_solutions(N, l))


# ---------------------------------------------------------------------------
# regularity

@dataclass
class RegularityReport:
    level: int
    pairs: list = field(default_factory=list)  # (i, j, status, structure)

    @property
    def status(self) -> str:
        s = {p[2] for p in self.pairs}
        if "not-orthogonal" in s:
            return "not-orthogonal"
        if "irregular" in s:
            return "irregular"
        if "inconclusive" in s:
            return "inconclusive"
        return "regular"

    @property
    def structures(self) -> set:
        return {p[3] for p in self.pairs if p[3] is not None}

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "status": self.status,
            "structures": sorted(self.structures),
            "pairs": [{"i": i, "j": j, "status": st, "structure": sc} for i, j, st, sc in self.pairs],
        }


def regularity_check(B: ButsonMatrix, budget: int = 200_000) -> RegularityReport:
    """Decompose every row scalar product into cycles.  Prime-power levels
    are decided exactly; composite levels use an exhaustive search that
    reports inconclusive when the budget runs out."""
    l = B.level
    E = B.exponents
    rep = RegularityReport(l)
    for i in range(E.shape[0]):
        for j in range(i + 1, E.shape[0]):
            m = RootMultiset.from_exponents(E[i] - E[j], l)
            if not vanishes(m):
                rep.pairs.append((i, j, "not-orthogonal", None))
                continue
            if prime_power(l):
                rep.pairs.append((i, j, "regular", cycle_decompose(m).structure()))
            else:
                st, dec = cycle_search(m, budget)
                rep.pairs.append((i, j, st, dec.structure() if dec else None))
    return rep
