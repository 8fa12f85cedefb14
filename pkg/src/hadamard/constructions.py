"""Explicit constructions: Fourier, Walsh, Paley, Williamson, the named
matrices at N = 4, 6, 7, 10, the Szollosi and McNulty-Weigert constructions,
and master Hadamard matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .core import (
    ButsonMatrix, ValidationError, as_complex, dita_deform, is_hadamard,
    root_table, verify_hadamard,
)


# ---------------------------------------------------------------------------
# finite abelian groups

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{N_1} x ... x Z_{N_k}; elements are tuples, listed lexicographically."""
    orders: tuple

    def __post_init__(self):
        o = tuple(int(n) for n in self.orders)
        if not o or any(n < 1 for n in o):
            raise ValidationError("cycle orders must be positive")
        object.__setattr__(self, "orders", o)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return reduce(math.lcm, self.orders, 1)

    def elements(self):
        return list(itertools.product(*[range(n) for n in self.orders]))

    def add(self, g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, self.orders))

    def neg(self, g):
        return tuple((-a) % n for a, n in zip(g, self.orders))

    def index(self, g) -> int:
        k = 0
        for a, n in zip(g, self.orders):
            k = k * n + a % n
        return k

    def order_of(self, g) -> int:
        return reduce(math.lcm, (n // math.gcd(a, n) for a, n in zip(g, self.orders)), 1)

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.orders)


def group(*orders) -> FiniteAbelianGroup:
    if len(orders) == 1 and not isinstance(orders[0], int):
        orders = tuple(orders[0])
    return FiniteAbelianGroup(tuple(orders))


def abelian_groups_upto(nmax: int) -> list[FiniteAbelianGroup]:
    """All finite abelian groups of order 2..nmax, one per isomorphism class,
    written as products of cyclic p-groups."""
    def partitions(n, maxpart=None):
        maxpart = n if maxpart is None else maxpart
        if n == 0:
            yield ()
            return
        for k in range(min(n, maxpart), 0, -1):
            for rest in partitions(n - k, k):
                yield (k,) + rest

    def factor(n):
        f, p = {}, 2
        while p * p <= n:
            while n % p == 0:
                f[p] = f.get(p, 0) + 1
                n //= p
            p += 1
        if n > 1:
            f[n] = f.get(n, 0) + 1
        return f

    out = []
    for n in range(2, nmax + 1):
        choices = [[[p ** k for k in part] for part in partitions(a)] for p, a in factor(n).items()]
        for combo in itertools.product(*choices):
            orders = tuple(sorted(x for part in combo for x in part))
            out.append(FiniteAbelianGroup(orders))
    return out


# ---------------------------------------------------------------------------
# Fourier and Walsh

def fourier(G) -> ButsonMatrix:
    """F_G = F_{N_1} x ... x F_{N_k} as an exponent matrix at level lcm(N_r)."""
    if isinstance(G, int):
        G = FiniteAbelianGroup((G,))
    l = G.exponent
    els = np.array(G.elements(), dtype=np.int64).reshape(G.size, len(G.orders))
    scale = np.array([l // n for n in G.orders], dtype=np.int64)
    E = (els * scale) @ els.T
    return ButsonMatrix(E % l if l > 1 else E * 0, max(l, 2))


def fourier_matrix(N: int) -> np.ndarray:
    return fourier(N).to_complex()


def walsh(n: int) -> ButsonMatrix:
    """W_{2^n} = F_2^{x n}, entries (-1)^{<i, j>} on bit strings."""
    if n < 1:
        raise ValidationError("walsh needs n >= 1")
    idx = np.arange(2 ** n)
    E = np.zeros((2 ** n, 2 ** n), dtype=np.int64)
    for b in range(n):
        E += ((idx[:, None] >> b) & 1) * ((idx[None, :] >> b) & 1)
    return ButsonMatrix(E % 2, 2)


def walsh_matrix(n: int) -> np.ndarray:
    return 1 - 2 * walsh(n).exponents


# ---------------------------------------------------------------------------
# Paley

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def legendre(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def paley_core(q: int) -> np.ndarray:
    """Q_ab = chi(b - a), chi the quadratic character of F_q."""
    chi = np.array([legendre(k, q) for k in range(q)])
    a = np.arange(q)
    return chi[(a[None, :] - a[:, None]) % q]


def paley(q: int, kind: int = 1) -> np.ndarray:
    """Paley 1 (q = 3 mod 4, size q+1, H + H^t = 2) and Paley 2
    (q = 1 mod 4, size 2q+2, symmetric), for q prime."""
    if not is_prime(q) or q == 2:
        raise ValidationError(f"paley needs an odd prime q, got {q} (prime powers unsupported)")
    Q = paley_core(q)
    ones = np.ones(q, dtype=int)
    if kind == 1:
        if q % 4 != 3:
            raise ValidationError("Paley 1 needs q = 3 mod 4")
        S = np.zeros((q + 1, q + 1), dtype=int)
        S[0, 1:] = ones
        S[1:, 0] = -ones
        S[1:, 1:] = Q
        return np.eye(q + 1, dtype=int) + S
    if kind == 2:
        if q % 4 != 1:
            raise ValidationError("Paley 2 needs q = 1 mod 4")
        S = np.zeros((q + 1, q + 1), dtype=int)
        S[0, 1:] = ones
        S[1:, 0] = ones
        S[1:, 1:] = Q
        zero = np.array([[1, -1], [-1, -1]])
        one = np.array([[1, 1], [1, -1]])
        blocks = [[zero if s == 0 else s * one for s in row] for row in S]
        return np.block(blocks)
    raise ValidationError("kind must be 1 or 2")


# ---------------------------------------------------------------------------
# Williamson

def circulant(first_row) -> np.ndarray:
    g = np.asarray(first_row)
    N = len(g)
    i = np.arange(N)
    return g[(i[None, :] - i[:, None]) % N]


def is_circulant(A, tol: float = 0.0) -> bool:
    A = np.asarray(A)
    return bool(np.all(np.abs(A - circulant(A[0])) <= tol))


def williamson(A, B, C, D) -> np.ndarray:
    """Quaternion-pattern assembly of four symmetric circulant +-1 blocks
    with A^2 + B^2 + C^2 + D^2 = 4K."""
    mats = [np.asarray(X, dtype=int) for X in (A, B, C, D)]
    K = mats[0].shape[0]
    for name, X in zip("ABCD", mats):
        if X.shape != (K, K):
            raise ValidationError(f"{name} must be {K}x{K}")
        if not np.all(np.abs(X) == 1):
            raise ValidationError(f"{name} must have +-1 entries")
        if not is_circulant(X):
            raise ValidationError(f"{name} is not circulant")
        if not np.array_equal(X, X.T):
            raise ValidationError(f"{name} is not symmetric")
    for (n1, X), (n2, Y) in itertools.combinations(zip("ABCD", mats), 2):
        if not np.array_equal(X @ Y, Y @ X):
            raise ValidationError(f"{n1} and {n2} do not commute")
    S = sum(X @ X for X in mats)
    if not np.array_equal(S, 4 * K * np.eye(K, dtype=int)):
        raise ValidationError("sum-of-squares identity A^2+B^2+C^2+D^2 = 4K fails")
    A, B, C, D = mats
    return np.block([
        [A, B, C, D],
        [-B, A, -D, C],
        [-C, D, A, -B],
        [-D, -C, B, A],
    ])


def symmetric_circulant_rows(K: int):
    """All +-1 first rows (g_0..g_{K-1}) with g_k = g_{-k}."""
    free = K // 2 + 1
    for signs in itertools.product([1, -1], repeat=free):
        g = np.empty(K, dtype=int)
        for k in range(K):
            g[k] = signs[min(k, K - k)]
        yield g


def williamson_search(K: int, limit: int | None = None) -> list[tuple]:
    """Brute force over quadruples of symmetric circulant first rows."""
    rows = list(symmetric_circulant_rows(K))
    mats = [circulant(g) for g in rows]
    sq = [X @ X for X in mats]
    target = 4 * K * np.eye(K, dtype=int)
    out = []
    for a, b, c, d in itertools.product(range(len(rows)), repeat=4):
        if np.array_equal(sq[a] + sq[b] + sq[c] + sq[d], target):
            out.append((mats[a], mats[b], mats[c], mats[d]))
            if limit and len(out) >= limit:
                break
    return out


# ---------------------------------------------------------------------------
# named matrices

W3 = np.exp(2j * np.pi / 3)


def _unit(x, name):
    x = complex(x)
    if abs(abs(x) - 1) > 1e-12:
        raise ValidationError(f"parameter {name} must have modulus 1, got |{name}| = {abs(x)}")
    return x


def K4() -> np.ndarray:
    return np.ones((4, 4), dtype=int) - 2 * np.eye(4, dtype=int)


def F4s(s=1) -> np.ndarray:
    s = _unit(s, "s")
    return np.array([
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, s, -1, -s],
        [1, -s, -1, s],
    ], dtype=complex)


def F6rs(r=1, s=1) -> np.ndarray:
    """Right Dita deformation F_2 x_Q F_3 with Q = [[1,1,1],[1,r,s]]."""
    r, s = _unit(r, "r"), _unit(s, "s")
    Q = np.array([[1, 1, 1], [1, r, s]])
    return dita_deform(fourier_matrix(2), fourier_matrix(3), Q, "right")


def F6rs_left(r=1, s=1) -> np.ndarray:
    """The displayed deformation of F_3 x F_2 (rows 1, -1, 1, -1, 1, -1 etc.)."""
    r, s = _unit(r, "r"), _unit(s, "s")
    w = W3
    return np.array([
        [1, 1, 1, 1, 1, 1],
        [1, -1, 1, -1, 1, -1],
        [1, r, w, w * r, w ** 2, w ** 2 * r],
        [1, -r, w, -w * r, w ** 2, -w ** 2 * r],
        [1, s, w ** 2, w ** 2 * s, w, w * s],
        [1, -s, w ** 2, -w ** 2 * s, w, -w * s],
    ], dtype=complex)


def H6q(q=1) -> np.ndarray:
    """Haagerup's one-parameter family."""
    q = _unit(q, "q")
    i, qb = 1j, np.conj(q)
    return np.array([
        [1, 1, 1, 1, 1, 1],
        [1, -1, i, i, -i, -i],
        [1, i, -1, -i, q, -q],
        [1, i, -i, -1, -q, q],
        [1, -i, qb, -qb, i, -1],
        [1, -i, -qb, qb, -1, i],
    ], dtype=complex)


T6_EXPONENTS = np.array([
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 2, 2],
    [0, 1, 0, 2, 2, 1],
    [0, 1, 2, 0, 1, 2],
    [0, 2, 2, 1, 0, 1],
    [0, 2, 1, 2, 1, 0],
])


def T6() -> ButsonMatrix:
    return ButsonMatrix(T6_EXPONENTS, 3)


def P7q(q=1) -> np.ndarray:
    """Parametric Petrescu matrix, w = exp(2 pi i/3)."""
    q = _unit(q, "q")
    w, qb = W3, np.conj(q)
    return np.array([
        [-q, q, w, 1, w, 1, w],
        [q, -q, w, 1, 1, w, w],
        [w, w, -w, 1, w, w, 1],
        [1, 1, 1, -1, w, w, w],
        [w, 1, w, w, -qb * w, qb * w, 1],
        [1, w, w, w, qb * w, -qb * w, 1],
        [w, w, 1, w, 1, 1, -1],
    ], dtype=complex)


def bf6_roots() -> tuple[complex, complex]:
    """Roots of a^2 + (sqrt3 - 1) a + 1 = 0 (a conjugate pair on T)."""
    r = np.roots([1, math.sqrt(3) - 1, 1])
    r = sorted(r, key=lambda z: -z.imag)
    return complex(r[0]), complex(r[1])


def BF6(root: int = 0) -> np.ndarray:
    """Bjorck-Froberg circulant matrix."""
    a = bf6_roots()[root]
    ab = np.conj(a)
    return circulant(np.array([1, 1j * a, -a, -1j, -ab, 1j * ab]))


X10_6_EXPONENTS = np.array([
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 4, 1, 5, 3, 1, 3, 3, 5, 1],
    [0, 1, 2, 3, 5, 5, 1, 3, 5, 3],
    [0, 5, 3, 2, 1, 5, 3, 5, 3, 1],
    [0, 3, 5, 1, 4, 1, 1, 5, 3, 3],
    [0, 3, 3, 3, 3, 3, 0, 0, 0, 0],
    [0, 1, 1, 5, 3, 4, 3, 0, 2, 4],
    [0, 1, 5, 3, 5, 2, 4, 3, 2, 0],
    [0, 5, 3, 5, 1, 2, 0, 2, 3, 4],
    [0, 3, 5, 1, 1, 4, 4, 2, 0, 3],
])


def X10_6() -> ButsonMatrix:
    """Level-6 Butson matrix at N = 10, log form k -> exp(k pi i/3)."""
    return ButsonMatrix(X10_6_EXPONENTS, 6)


NAMED = {
    "K4": (K4, ()),
    "F4s": (F4s, ("s",)),
    "F6rs": (F6rs, ("r", "s")),
    "F6rs_left": (F6rs_left, ("r", "s")),
    "H6q": (H6q, ("q",)),
    "T6": (T6, ()),
    "P7q": (P7q, ("q",)),
    "BF6": (BF6, ()),
    "X10_6": (X10_6, ()),
}


def named(name: str, **params) -> np.ndarray:
    """Build a named matrix (complex array) and verify it is Hadamard."""
    if name not in NAMED:
        raise ValidationError(f"unknown matrix {name!r}; known: {', '.join(NAMED)}")
    fn, keys = NAMED[name]
    extra = set(params) - set(keys)
    if extra:
        raise ValidationError(f"{name} takes parameters {keys}, got {sorted(extra)}")
    H = as_complex(fn(**params))
    if not is_hadamard(H):
        raise ValidationError(f"{name} failed Hadamard verification")
    return H


# ---------------------------------------------------------------------------
# Szollosi construction

def szollosi(H, sign: int = 1) -> np.ndarray:
    """From a dephased symmetric real Hadamard matrix of size N >= 8, an
    (N-1)x(N-1) complex Hadamard matrix with w = (1 +- i sqrt(N-5))^2/(N-4)."""
    H = np.asarray(H)
    if np.iscomplexobj(H):
        if np.max(np.abs(H.imag)) > 1e-12:
            raise ValidationError("szollosi needs a real matrix")
        H = H.real
    H = np.rint(H).astype(int)
    N = H.shape[0]
    if N < 8:
        raise ValidationError("szollosi needs N >= 8")
    if not np.array_equal(H, H.T):
        raise ValidationError("szollosi needs a symmetric matrix")
    if not (np.all(H[0] == 1) and np.all(H[:, 0] == 1)):
        raise ValidationError("szollosi needs a dephased matrix")
    if not is_hadamard(H):
        raise ValidationError("szollosi needs a Hadamard matrix")
    w = (1 + sign * 1j * math.sqrt(N - 5)) ** 2 / (N - 4)
    C = H[1:, 1:].astype(complex)
    n = N - 1
    out = C.copy()
    diag = np.eye(n, dtype=bool)
    out[diag & (C == 1)] = -w
    out[~diag & (C == -1)] = w
    return out


def szollosi_w(N: int, sign: int = 1) -> complex:
    return (1 + sign * 1j * math.sqrt(N - 5)) ** 2 / (N - 4)


# ---------------------------------------------------------------------------
# McNulty-Weigert

def mw_diagonal(q: int) -> np.ndarray:
    """D_c = w^{c(c-1)/2}."""
    c = np.arange(q)
    return root_table(q)[(c * (c - 1) // 2) % q]


def mw_vector(q: int, k: int) -> np.ndarray:
    """First row V^k of the circulant (1/sqrt q) F_q^* D^k F_q, from the
    Gauss sum V_i^k = q^{-1/2} sum_c w^{k c(c-1)/2 + i c}."""
    c = np.arange(q)
    i = np.arange(q)
    expo = (k * (c * (c - 1) // 2))[None, :] + i[:, None] * c[None, :]
    return root_table(q)[expo % q].sum(axis=1) / math.sqrt(q)


def mw_vector_closed(q: int, k: int) -> np.ndarray:
    """Closed form delta_q (k/2 | q) w^{(q^2-1)k/8} w^{-(k/2) x (x-1)}, x = i/k in Z_q."""
    k %= q
    if k == 0:
        raise ValidationError("k must be nonzero mod q")
    half = pow(2, q - 2, q)
    kinv = pow(k, q - 2, q)
    dq = 1 if q % 4 == 1 else 1j
    sgn = legendre(k * half, q)
    x = (np.arange(q) * kinv) % q
    expo = ((q * q - 1) // 8 * k - k * half * x * (x - 1)) % q
    return dq * sgn * root_table(q)[expo]


def mcnulty_weigert(q: int, S, T, K) -> np.ndarray:
    """H_{ia,jb} = K_ij V^{t_j - s_i}_{b - a}, size |S| q."""
    if not is_prime(q) or q < 3:
        raise ValidationError("q must be an odd prime")
    S, T = [int(s) % q for s in S], [int(t) % q for t in T]
    if len(S) != len(T) or len(set(S)) != len(S) or len(set(T)) != len(T):
        raise ValidationError("S and T must be sets of equal size")
    if set(S) & set(T):
        raise ValidationError("S and T must be disjoint")
    K = as_complex(K)
    N = len(S)
    if K.shape != (N, N) or not is_hadamard(K):
        raise ValidationError("K must be an |S| x |S| Hadamard matrix")
    V = {k: mw_vector(q, k) for k in range(1, q)}
    a = np.arange(q)
    shift = (a[None, :] - a[:, None]) % q
    H = np.empty((N, q, N, q), complex)
    for i in range(N):
        for j in range(N):
            H[i, :, j, :] = K[i, j] * V[(T[j] - S[i]) % q][shift]
    return H.reshape(N * q, N * q)


# ---------------------------------------------------------------------------
# master Hadamard matrices

@dataclass(frozen=True)
class MasterSpec:
    """H_ij = lambda_i^{n_j}, principal branch (e^{it})^r = e^{itr}, t in [0, 2 pi)."""
    lambdas: tuple
    exponents: tuple

    @property
    def angles(self) -> np.ndarray:
        return np.mod(np.angle(np.asarray(self.lambdas, complex)), 2 * np.pi)


def master_build(spec: MasterSpec) -> np.ndarray:
    t = spec.angles
    n = np.asarray(spec.exponents, float)
    return np.exp(1j * np.outer(t, n))


def master_function(spec: MasterSpec, z) -> complex:
    """f(z) = sum_j z^{n_j}, principal branch."""
    t = np.mod(np.angle(z), 2 * np.pi)
    return complex(np.exp(1j * t * np.asarray(spec.exponents, float)).sum())


def master_check(spec, tol: float = 1e-8) -> bool:
    """f(lambda_i / lambda_j) = N delta_ij, with the quotient's exponent taken
    as the angle difference t_i - t_j (this is what the rows of H see).
    A plain matrix argument is checked directly."""
    if not isinstance(spec, MasterSpec):
        return is_hadamard(spec, tol)
    t = spec.angles
    n = np.asarray(spec.exponents, float)
    N = len(n)
    G = np.exp(1j * (t[:, None, None] - t[None, :, None]) * n[None, None, :]).sum(axis=2)
    return bool(np.max(np.abs(G - N * np.eye(len(t)))) <= tol * N)


def fourier_master(N: int) -> MasterSpec:
    w = np.exp(2j * np.pi / N)
    return MasterSpec(tuple(w ** np.arange(N)), tuple(float(j) for j in range(N)))


def dita_master(M: int, N: int, k: int = 1, p=None) -> tuple[MasterSpec, np.ndarray]:
    """Master form of F_M x_Q F_N with Q_ib = q^{i(N p_b + b)}, q = e^{2 pi i/MNk}.

    Under the principal-branch convention the identity needs integer p_b:
    w^{a p_b} must be 1 for every a."""
    p = np.zeros(N) if p is None else np.asarray(p, float)
    if p.shape != (N,) or np.any(p != np.round(p)):
        raise ValidationError("p must be N integers (non-integer p breaks the branch identity)")
    q = np.exp(2j * np.pi / (M * N * k))
    w = np.exp(2j * np.pi / N)
    lam = [q ** i * w ** a for i in range(M) for a in range(N)]
    n = [N * k * j + N * p[b] + b for j in range(M) for b in range(N)]
    Q = np.array([[q ** (i * (N * p[b] + b)) for b in range(N)] for i in range(M)])
    return MasterSpec(tuple(lam), tuple(n)), Q


# ---------------------------------------------------------------------------
# catalogue

def catalogue() -> dict:
    """Name -> (builder, description).  Builders take no arguments."""
    cat = {
        "F2": (lambda: fourier(2), "Fourier F_2"),
        "F3": (lambda: fourier(3), "Fourier F_3"),
        "F4": (lambda: fourier(4), "Fourier F_4"),
        "F5": (lambda: fourier(5), "Fourier F_5"),
        "F6": (lambda: fourier(6), "Fourier F_6"),
        "F7": (lambda: fourier(7), "Fourier F_7"),
        "F8": (lambda: fourier(8), "Fourier F_8"),
        "W4": (lambda: walsh(2), "Walsh W_4"),
        "W8": (lambda: walsh(3), "Walsh W_8"),
        "W16": (lambda: walsh(4), "Walsh W_16"),
        "K4": (lambda: ButsonMatrix((1 - K4()) // 2, 2), "bistochastic K_4"),
        "P12": (lambda: ButsonMatrix((1 - paley(11, 1)) // 2, 2), "Paley 1, q = 11"),
        "P12b": (lambda: ButsonMatrix((1 - paley(5, 2)) // 2, 2), "Paley 2, q = 5"),
        "F4s": (lambda: named("F4s", s=np.exp(1j)), "F_4^s at s = e^i"),
        "F6rs": (lambda: named("F6rs", r=np.exp(0.7j), s=np.exp(2.1j)), "F_2 x_Q F_3 at generic r, s"),
        "F6rs_left": (lambda: named("F6rs_left", r=np.exp(0.7j), s=np.exp(2.1j)), "F_3 x_Q F_2 at generic r, s"),
        "H6": (lambda: named("H6q", q=1), "Haagerup H_6^1"),
        "H6q": (lambda: named("H6q", q=np.exp(0.9j)), "Haagerup H_6^q at q = e^{0.9i}"),
        "T6": (lambda: T6(), "Tao T_6"),
        "BF6": (lambda: named("BF6"), "Bjorck-Froberg BF_6"),
        "P7": (lambda: named("P7q", q=1), "Petrescu P_7"),
        "P7q": (lambda: named("P7q", q=np.exp(1.3j)), "Petrescu P_7^q at q = e^{1.3i}"),
        "X10_6": (lambda: X10_6(), "level-6 Butson matrix at N = 10"),
        "MW3": (lambda: mcnulty_weigert(3, [0], [1], np.ones((1, 1))), "McNulty-Weigert q = 3, |S| = 1"),
        "MW10": (lambda: mcnulty_weigert(5, [0, 1], [2, 3], fourier_matrix(2)), "McNulty-Weigert q = 5, |S| = 2, K = F_2"),
    }
    return cat
