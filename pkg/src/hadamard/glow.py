"""The glow: the law of the excess E = sum_ij a_i b_j H_ij over random row
and column phases.  Monte Carlo, brute-force moments, the set-partition
moment formula with its Mobius coefficients, and universality predictions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .constructions import FiniteAbelianGroup, fourier
from .core import ValidationError, as_complex

BRUTE_LIMIT = 10 ** 8
HIST_BINS = 256


# ---------------------------------------------------------------------------
# set partitions

@dataclass(frozen=True)
class Partition:
    """Set partition of {0, ..., p-1}; blocks sorted by minimum element."""
    blocks: tuple

    def __post_init__(self):
        bl = tuple(sorted((tuple(sorted(b)) for b in self.blocks if len(b)), key=lambda b: b[0]))
        flat = sorted(x for b in bl for x in b)
        if flat != list(range(len(flat))):
            raise ValidationError("blocks must partition {0, ..., p-1}")
        object.__setattr__(self, "blocks", bl)

    @property
    def p(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    @property
    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def labels(self) -> list[int]:
        lab = [0] * self.p
        for k, b in enumerate(self.blocks):
            for x in b:
                lab[x] = k
        return lab

    def refines(self, other: "Partition") -> bool:
        """self <= other in the refinement order (every block of self lies in a block of other)."""
        lab = other.labels()
        return all(len({lab[x] for x in b}) == 1 for b in self.blocks)

    def is_noncrossing(self) -> bool:
        lab = self.labels()
        for a, b, c, d in itertools.combinations(range(self.p), 4):
            if lab[a] == lab[c] and lab[b] == lab[d] and lab[a] != lab[b]:
                return False
        return True

    def __str__(self):
        return "|".join("".join(str(x + 1) for x in b) for b in self.blocks)

    @classmethod
    def from_labels(cls, lab) -> "Partition":
        d = {}
        for i, x in enumerate(lab):
            d.setdefault(x, []).append(i)
        return cls(tuple(tuple(v) for v in d.values()))

    @classmethod
    def from_sizes(cls, sizes) -> "Partition":
        """Consecutive blocks of the given sizes, e.g. (2, 2) -> 12|34."""
        out, k = [], 0
        for s in sizes:
            out.append(tuple(range(k, k + s)))
            k += s
        return cls(tuple(out))


def restricted_growth(p: int):
    """Restricted growth strings of length p (one per set partition)."""
    if p == 0:
        yield ()
        return
    def rec(prefix, m):
        if len(prefix) == p:
            yield tuple(prefix)
            return
        for x in range(m + 2):
            yield from rec(prefix + [x], max(m, x))
    yield from rec([0], 0)


def set_partitions(p: int) -> list[Partition]:
    return [Partition.from_labels(s) for s in restricted_growth(p)]


def bell(p: int) -> int:
    return len(list(restricted_growth(p)))


def noncrossing_partitions(p: int) -> list[Partition]:
    return [q for q in set_partitions(p) if q.is_noncrossing()]


@lru_cache(maxsize=None)
def _mobius_type(ks: tuple) -> int:
    """Mobius value of an interval isomorphic to P(k_1) x ... x P(k_m)
    (bottom to top), from the defining recursion
    mu(x, x) = 1, mu(x, y) = - sum_{x <= z < y} mu(x, z)."""
    ks = tuple(sorted(k for k in ks if k > 1))
    if not ks:
        return 1
    total = 0
    for choice in itertools.product(*[list(restricted_growth(k)) for k in ks]):
        if all(max(s) == 0 for s in choice):
            continue  # z = top
        sizes = []
        for s in choice:
            sizes.extend(np.bincount(s).tolist())
        total += _mobius_type(tuple(sizes))
    return -total


def mobius(pi: Partition, sigma: Partition) -> int:
    """Mobius function of the refinement lattice, zero unless pi refines sigma."""
    if pi.p != sigma.p:
        raise ValidationError("partitions of different sets")
    if not pi.refines(sigma):
        return 0
    lab = sigma.labels()
    counts = {}
    for b in pi.blocks:
        counts[lab[b[0]]] = counts.get(lab[b[0]], 0) + 1
    return _mobius_type(tuple(counts.values()))


def multinomial(pi: Partition) -> int:
    out = math.factorial(pi.p)
    for s in pi.sizes:
        out //= math.factorial(s)
    return out


def K_coeff(pi: Partition) -> int:
    """K(pi) = sum over sigma finer than pi of mu(sigma, pi) p!/prod(sigma block sizes)!.
    (The moment formula orders partitions by reverse refinement; this is the
    same sum written in the refinement order.)"""
    return sum(mobius(s, pi) * multinomial(s) for s in set_partitions(pi.p) if s.refines(pi))


def K_tilde(pi: Partition) -> Fraction:
    return Fraction(K_coeff(pi), math.factorial(pi.p))


# ---------------------------------------------------------------------------
# brute-force moments and the partition integrals

def multiset_pairs(N: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) in [N]^p x [N]^p with [i] = [j] as multisets."""
    if N ** p * math.factorial(p) > BRUTE_LIMIT:
        raise ValidationError("enumeration too large; use glow_mc instead")
    I = np.array(list(itertools.product(range(N), repeat=p)), dtype=np.int64).reshape(-1, p)
    rows = []
    for perm in itertools.permutations(range(p)):
        rows.append(np.hstack([I, I[:, list(perm)]]))
    P = np.unique(np.vstack(rows), axis=0)
    return P[:, :p], P[:, p:]


def glow_moment_bruteforce(H, p: int) -> complex:
    """Exact integral of |E|^{2p} over T^N x T^N as the sum over [i]=[k],
    [j]=[l] of prod H_{i_r j_r} conj(H_{k_r l_r}), contracted one tensor
    factor at a time."""
    H = as_complex(H)
    N = H.shape[0]
    if N ** (2 * p) > BRUTE_LIMIT:
        raise ValidationError(f"N^(2p) = {N ** (2 * p)} exceeds {BRUTE_LIMIT}; use glow_mc")
    if p == 0:
        return 1.0
    T = np.einsum("ij,kl->ikjl", H, np.conj(H)).reshape(N * N, N * N)
    A, B = multiset_pairs(N, p)
    c = np.zeros((N * N,) * p)
    c[tuple((A * N + B).T)] = 1.0
    x = c.astype(complex)
    for ax in range(p):
        x = np.moveaxis(np.tensordot(T, x, axes=([1], [ax])), 0, ax)
    return complex(np.sum(c * x))


def I_integral(H, pi: Partition) -> complex:
    """I(pi) = N^{-|pi|} sum_{[i]=[j]} prod_blocks <prod_{r in b} H_{i_r}, prod_{r in b} H_{j_r}>.

    With a FiniteAbelianGroup (or an int for Z_N) the Fourier count
    #{[i]=[j], sum_b i_r = sum_b j_r in G for each block} is used instead."""
    p = pi.p
    if isinstance(H, (FiniteAbelianGroup, int)):
        return _I_fourier_count(H, pi)
    H = as_complex(H)
    N = H.shape[0]
    A, B = multiset_pairs(N, p)
    total = np.ones(len(A), complex)
    for b in pi.blocks:
        v = np.ones((len(A), N), complex)
        for r in b:
            v *= H[A[:, r]] * np.conj(H[B[:, r]])
        total *= v.sum(axis=1) / N
    return complex(total.sum())


def _I_fourier_count(G, pi: Partition) -> int:
    if isinstance(G, int):
        G = FiniteAbelianGroup((G,))
    els = np.array(G.elements(), dtype=np.int64).reshape(G.size, len(G.orders))
    orders = np.array(G.orders)
    A, B = multiset_pairs(G.size, pi.p)
    ok = np.ones(len(A), bool)
    for b in pi.blocks:
        sa = els[A[:, list(b)]].sum(axis=1) % orders
        sb = els[B[:, list(b)]].sum(axis=1) % orders
        ok &= np.all(sa == sb, axis=1)
    return int(ok.sum())


def moment_via_partitions(H, p: int) -> complex:
    """sum_pi K(pi) N^{|pi|} I(pi).  H may be a matrix or a group (Fourier)."""
    if isinstance(H, (FiniteAbelianGroup, int)):
        N = H if isinstance(H, int) else H.size
    else:
        N = as_complex(H).shape[0]
    return sum(K_coeff(pi) * N ** len(pi) * I_integral(H, pi) for pi in set_partitions(p))


def I_two_pairs_closed(G) -> int:
    """N(4N^3 - 11N + 2^e + 7) for the partition 12|34, e = number of even cycle orders."""
    if isinstance(G, int):
        G = FiniteAbelianGroup((G,))
    N = G.size
    e = sum(1 for n in G.orders if n % 2 == 0)
    return N * (4 * N ** 3 - 11 * N + 2 ** e + 7)


def C_pr(p: int, r: int) -> int:
    """sum over compositions p = b_1 + ... + b_r (b_i >= 1) of multinomial^2."""
    tot = 0
    for comp in itertools.product(range(1, p + 1), repeat=r):
        if sum(comp) == p:
            m = math.factorial(p)
            for b in comp:
                m //= math.factorial(b)
            tot += m * m
    return tot


def I_one_block_closed(N: int, p: int) -> int:
    """#{[i] = [j]} = sum_r C_pr binom(N, r) for the one-block partition (any
    Hadamard matrix).  C_pr counts ordered block sizes, so the number of set
    partitions with r blocks contributes C_pr / r!."""
    return sum(C_pr(p, r) * math.comb(N, r) for r in range(1, p + 1))


def universality_coefficients(p: int) -> tuple:
    K1 = Fraction(math.comb(p, 2))
    K2 = Fraction(math.comb(p, 2) * (3 * p * p + p - 8), 12)
    K3 = Fraction(math.comb(p, 3) * (p ** 3 + 4 * p * p + p - 18), 8)
    return K1, K2, K3


def universality_prediction(p: int, N: int, order: int = 3) -> float:
    """1 - K_1/N + K_2/N^2 - K_3/N^3, truncated after the given order."""
    K = universality_coefficients(p)
    val = Fraction(1)
    for k in range(1, min(order, 3) + 1):
        val += (-1) ** k * K[k - 1] / Fraction(N) ** k
    return float(val)


def hadamard_p2_exact(N: int) -> float:
    """(1/2) int (|E|/N)^4 for any N x N complex Hadamard matrix:
    (2 N^4 - N^2 (2N - 1)) / (2 N^4) = 1 - 1/N + 1/(2N^2)."""
    return 1 - 1 / N + 1 / (2 * N * N)


def real_moment_pairings(p: int) -> int:
    """Number of pair partitions of 2p points, the Gaussian moment E g^{2p}."""
    return math.prod(range(1, 2 * p, 2))


# ---------------------------------------------------------------------------
# Monte Carlo

def _phases(rng, shape, s):
    if s in (None, math.inf, "inf", 0):
        return np.exp(2j * np.pi * rng.random(shape))
    s = int(s)
    if s == 2:
        return (1 - 2 * rng.integers(0, 2, shape)).astype(float)
    return np.exp(2j * np.pi * rng.integers(0, s, shape) / s)


def excess_samples(H, s, samples: int, seed=0, batch: int = 50_000) -> np.ndarray:
    """E = a^t H b for uniform a, b in Z_s^N (T^N when s is infinite)."""
    H = as_complex(H)
    N = H.shape[0]
    real = np.isrealobj(H) or not np.any(H.imag)
    Hm = H.real if (real and s == 2) else H
    rng = np.random.default_rng(seed)
    out = np.empty(samples, complex)
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        a = _phases(rng, (m, N), s)
        b = _phases(rng, (m, N), s)
        out[done:done + m] = np.einsum("ni,ni->n", a @ Hm, b)
        done += m
    return out


def glow_mc(H, s=math.inf, samples: int = 100_000, seed=0, pmax: int = 4) -> dict:
    """Histogram of |E| (256 bins over [0, N sqrt N]) and the moments
    E|E|^{2p}, p = 1..pmax, with standard errors."""
    H = as_complex(H)
    N = H.shape[0]
    E = excess_samples(H, s, samples, seed)
    absE = np.abs(E)
    counts, edges = np.histogram(absE, bins=HIST_BINS, range=(0, N * math.sqrt(N) * (1 + 1e-12)))
    moments = {}
    for p in range(1, pmax + 1):
        v = absE ** (2 * p)
        moments[p] = (float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples)))
    return {"N": N, "s": s, "samples": samples, "counts": counts, "edges": edges,
            "moments": moments, "E": E}


def normalized_moment_mc(H, p: int, s=math.inf, samples: int = 1_000_000, seed=0) -> tuple[float, float]:
    """(mean, stderr) of (1/p!) (|E|/N)^{2p}."""
    H = as_complex(H)
    N = H.shape[0]
    v = (np.abs(excess_samples(H, s, samples, seed)) / N) ** (2 * p) / math.factorial(p)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))


def real_moment_mc(H, p: int, samples: int = 1_000_000, seed=0) -> tuple[float, float]:
    """(mean, stderr) of (E/N)^{2p} with a, b uniform in {+-1}^N."""
    H = np.asarray(H).real
    N = H.shape[0]
    v = (excess_samples(H, 2, samples, seed).real / N) ** (2 * p)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))


def all_sign_vectors(N: int) -> np.ndarray:
    k = np.arange(2 ** N)
    return (1 - 2 * ((k[:, None] >> np.arange(N)[None, :]) & 1)).astype(np.int64)


def real_excess_distribution(H) -> dict:
    """Exact law of E over {+-1}^N x {+-1}^N as {value: count}."""
    H = np.rint(np.asarray(H).real).astype(np.int64)
    N = H.shape[0]
    if 4 ** N > 2 ** 24:
        raise ValidationError("exhaustive enumeration limited to 4^N <= 2^24")
    S = all_sign_vectors(N)
    V = S @ H  # all a^t H
    vals, cnts = np.unique(V @ S.T, return_counts=True)
    return dict(zip(vals.tolist(), cnts.tolist()))


def real_parity_split(H, samples: int | None = None, seed=0) -> dict:
    """Masses of the real glow on 8Z and 8Z + 4 (exhaustive when 4^N <= 2^24
    unless samples is given)."""
    H = np.rint(np.asarray(H).real).astype(np.int64)
    N = H.shape[0]
    if samples is None and 4 ** N <= 2 ** 24:
        dist = real_excess_distribution(H)
        total = sum(dist.values())
        if any(v % 4 for v in dist):
            raise ValidationError("glow not supported on 4Z (not a Hadamard matrix?)")
        even = sum(c for v, c in dist.items() if v % 8 == 0)
        return {"exhaustive": True, "even": Fraction(even, total), "odd": Fraction(total - even, total),
                "support_4Z": True}
    samples = samples or 1_000_000
    E = np.rint(excess_samples(H, 2, samples, seed).real).astype(np.int64)
    even = float(np.mean(E % 8 == 0))
    return {"exhaustive": False, "even": even, "odd": 1 - even, "support_4Z": bool(np.all(E % 4 == 0)),
            "stderr": math.sqrt(even * (1 - even) / samples)}
