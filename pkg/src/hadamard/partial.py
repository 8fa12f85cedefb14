"""Partial Hadamard and partial Butson matrices: verification, standard
form, exact counts with brute-force oracles, asymptotics, 4 x N profiles,
five-row completion, submatrix polar decompositions and Walsh embeddings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import ValidationError, vanishes_exact

TOL = 1e-9


@dataclass(frozen=True)
class PartialMatrix:
    """M x N matrix with pairwise orthogonal rows; real entries are +-1."""
    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2 or a.shape[0] > a.shape[1]:
            raise ValidationError("need an M x N array with M <= N")
        object.__setattr__(self, "data", a)

    @property
    def M(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]

    @property
    def verified(self) -> bool:
        return verify_phm(self.data)


def verify_phm(P, tol: float = TOL) -> bool:
    """Unimodular entries and pairwise orthogonal rows."""
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] > P.shape[1]:
        return False
    if np.max(np.abs(np.abs(P) - 1)) > tol:
        return False
    G = P @ np.conj(P).T
    off = G - np.diag(np.diag(G))
    return bool(np.max(np.abs(off), initial=0.0) <= tol * P.shape[1])


def standard_form(P) -> np.ndarray:
    """Dephase (first row and column all ones), then sort the columns so that
    +1 entries sit as far left as possible, row by row from the top."""
    P = np.asarray(P)
    if not np.all(np.isin(P, (-1, 1))):
        raise ValidationError("standard_form expects a +-1 matrix")
    P = P * P[0][None, :]
    P = P * P[:, 0][:, None]
    keys = tuple((-P[i]) for i in range(P.shape[0] - 1, -1, -1))
    return P[:, np.lexsort(keys)].astype(int)


def butson_standard_form(E, q: int) -> np.ndarray:
    """Exponent matrix version: subtract the first row from every row, the
    first column from every column, and sort columns by low powers first."""
    E = np.asarray(E, int) % q
    E = (E - E[0][None, :]) % q
    E = (E - E[:, 0][:, None]) % q
    keys = tuple(E[i] for i in range(E.shape[0] - 1, -1, -1))
    return E[:, np.lexsort(keys)]


# ---------------------------------------------------------------------------
# counting

def multinomial(N: int, parts) -> int:
    parts = list(parts)
    if sum(parts) != N or min(parts, default=0) < 0:
        return 0
    out, rest = 1, N
    for k in parts:
        out *= math.comb(rest, k)
        rest -= k
    return out


def count_phm(M: int, N: int) -> int:
    """Closed-form number of M x N partial Hadamard matrices, M in {1, 2, 3, 4}."""
    if M == 1:
        return 2 ** N
    if M == 2:
        return 2 ** N * math.comb(N, N // 2) if N % 2 == 0 else 0
    if N % 4:
        return 0
    n = N // 4
    if M == 3:
        return 2 ** N * multinomial(N, [n] * 4)
    if M == 4:
        return 2 ** N * sum(multinomial(N, [a, b, b, a, b, a, a, b]) for a in range(n + 1) for b in [n - a])
    raise ValidationError("closed forms exist for M <= 4")


def _sign_vectors(N: int) -> np.ndarray:
    return 1 - 2 * np.array(list(product((0, 1), repeat=N)), dtype=np.int64)


def count_phm_bruteforce(M: int, N: int) -> int:
    """2^N times the number of (M-1)-tuples of sign vectors which are
    orthogonal to the all-ones row and to each other (dephased first row)."""
    if N > 16:
        raise ValidationError("brute force limited to N <= 16")
    if M == 1:
        return 2 ** N
    V = _sign_vectors(N)
    V = V[V.sum(axis=1) == 0]
    if len(V) == 0:
        return 0
    O = (V @ V.T) == 0

    def extend(cands, depth):
        if depth == 0:
            return int(cands.sum())
        return sum(extend(cands & O[v], depth - 1) for v in np.flatnonzero(cands))

    return 2 ** N * extend(np.ones(len(V), bool), M - 1 - 1) if M > 2 else 2 ** N * len(V)


def phm_probability(M: int, N: int) -> float:
    """Exact P_M = #PHM / 2^{MN} from the closed forms."""
    return count_phm(M, N) / 2 ** (M * N)


def p2_asymptotic(N: int) -> float:
    return 2 / math.sqrt(2 * math.pi * N)


def dll_asymptotic(M: int, N: int) -> float:
    """P_M ~ 2^{(M-1)^2} / sqrt((2 pi N)^{C(M,2)}), N in 4N, N -> infinity."""
    return 2 ** ((M - 1) ** 2) / math.sqrt((2 * math.pi * N) ** math.comb(M, 2))


def phm_probability_mc(M: int, N: int, samples: int = 1_000_000, seed=0, batch: int = 200_000) -> dict:
    """Fraction of uniformly random M x N sign matrices that are PHM."""
    rng = np.random.default_rng(seed)
    hits, done = 0, 0
    iu = np.triu_indices(M, 1)
    while done < samples:
        m = min(batch, samples - done)
        X = rng.integers(0, 2, size=(m, M, N), dtype=np.int8) * 2 - 1
        G = np.einsum("bik,bjk->bij", X.astype(np.int32), X.astype(np.int32))
        hits += int(np.sum(np.all(G[:, iu[0], iu[1]] == 0, axis=1)))
        done += m
    p = hits / samples
    return {"p": p, "stderr": math.sqrt(max(p * (1 - p), 1e-300) / samples), "samples": samples}


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for x in range(n + 1):
        for rest in _compositions(n - x, k - 1):
            yield (x,) + rest


def multinomial_power_sum(s: int, p: int, N: int) -> dict:
    """sum over a_1 + ... + a_s = N of C(N; a)^p, exact and asymptotic."""
    exact = sum(multinomial(N, a) ** p for a in _compositions(N, s))
    asym = s ** (p * N) * math.sqrt(s ** (s * (p - 1)) / (p ** (s - 1) * (2 * math.pi * N) ** ((s - 1) * (p - 1))))
    return {"exact": exact, "asymptotic": asym, "ratio": exact / asym}


# ---------------------------------------------------------------------------
# 4 x N structure and five-row completion

def W4_rows() -> np.ndarray:
    return np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])


def four_row_profile(P) -> tuple:
    """(a, b) with a >= b, a + b = N/4: the number of W_4 and K_4 blocks."""
    P = np.asarray(P)
    if P.shape[0] != 4 or not verify_phm(P):
        raise ValidationError("need a 4 x N partial Hadamard matrix")
    S = standard_form(P)
    n = S.shape[1] // 4
    first = S[3, :n]
    a = int(np.sum(first == 1))
    b = n - a
    return (max(a, b), min(a, b))


def canonical_four_row(a: int, b: int) -> np.ndarray:
    """(W_4 ... W_4 K_4 ... K_4) with a Walsh and b K_4 blocks."""
    from .constructions import K4, walsh_matrix
    return np.hstack([walsh_matrix(2)] * a + [K4()] * b).astype(int)


def _column_types(P):
    """Column-dephased P: distinct columns and their multiplicities, plus the
    sign vector used for dephasing."""
    P = np.asarray(P, int)
    d = P[0].copy()
    Q = P * d[None, :]
    types, inv = np.unique(Q.T, axis=0, return_inverse=True)
    return Q, d, types, np.bincount(inv.ravel(), minlength=len(types)), inv.ravel()


def next_row_candidates(P, limit: int | None = None):
    """All extra rows completing P (any number of rows) to a PHM, as net
    column-type sums m_c in {-n_c, ..., n_c} with sum_c m_c c = 0."""
    Q, d, types, counts, inv = _column_types(P)
    grids = [range(-n, n + 1, 2) for n in counts]
    sols = []
    for m in product(*grids):
        if not np.any(np.asarray(m) @ types):
            sols.append(m)
            if limit and len(sols) >= limit:
                break
    return sols, (d, types, counts, inv)


def _row_from_sums(m, data) -> np.ndarray:
    d, types, counts, inv = data
    row = np.empty(len(inv), int)
    for c, (mc, nc) in enumerate(zip(m, counts)):
        idx = np.flatnonzero(inv == c)
        plus = (nc + mc) // 2
        row[idx[:plus]] = 1
        row[idx[plus:]] = -1
    return row * d


def five_row_completable(P) -> dict:
    """Decide whether a real M x N PHM (typically 4 x N) extends by one row.  The search runs over
    the net signs placed on each column type, which is exhaustive; parity is
    built in since m_c = n_c mod 2.  Returns a certificate row or the empty
    search as the obstruction."""
    P = np.asarray(P, int)
    if not verify_phm(P):
        raise ValidationError("input is not partial Hadamard")
    sols, data = next_row_candidates(P, limit=1)
    if not sols:
        _, types, counts, _ = data
        return {"completable": False, "row": None,
                "obstruction": {"column_types": types.tolist(), "multiplicities": counts.tolist(),
                                "searched": int(np.prod([n + 1 for n in counts]))}}
    row = _row_from_sums(sols[0], data)
    assert verify_phm(np.vstack([P, row]))
    return {"completable": True, "row": row, "obstruction": None}


def all_completions(P) -> np.ndarray:
    """Every +-1 row orthogonal to all rows of P (brute force, N <= 16)."""
    P = np.asarray(P, int)
    V = _sign_vectors(P.shape[1])
    return V[np.all(V @ P.T == 0, axis=1)]


def K4_block() -> np.ndarray:
    """The representative of K_4 formed by the b-type columns of the 4-row
    standard form; W_4 K^t is symmetric, as the block completions need."""
    return np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [-1, 1, 1, -1]])


def block_completions_n8() -> dict:
    """The four 8 x 8 Hadamard matrices completing (W_4 W_4) and (W_4 K_4)."""
    from .constructions import walsh_matrix
    W, K = walsh_matrix(2), K4_block()
    return {
        "W4W4": [np.block([[W, W], [W, -W]]), np.block([[W, W], [K, -K]])],
        "W4K4": [np.block([[W, K], [W, -K]]), np.block([[W, K], [K, -W]])],
    }


# ---------------------------------------------------------------------------
# submatrices and polar decompositions

@dataclass(frozen=True)
class PolarPieces:
    X_A: np.ndarray
    Y_A: np.ndarray
    E: np.ndarray
    S: np.ndarray
    U: np.ndarray
    T: np.ndarray


def _sym_sqrt(M) -> np.ndarray:
    w, V = np.linalg.eigh((M + M.T) / 2)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.T


def polar_part(A) -> np.ndarray:
    """Pol(A) = V X^t from A = V diag(s) X^t."""
    V, _, Xt = np.linalg.svd(np.asarray(A, float))
    return V @ Xt


def polar_pieces(H, r: int) -> PolarPieces:
    """Split H = [[A, B], [C, D]] with A of size r and build
    E = C X_A B, S = B^t Y_A B, Pol(D) = (D - E)/sqrt N, T = sqrt N - S."""
    H = np.asarray(H, float)
    N = H.shape[0]
    if not 1 <= r < N:
        raise ValidationError("need 1 <= r < N")
    A, B, C, D = H[:r, :r], H[:r, r:], H[r:, :r], H[r:, r:]
    if np.linalg.norm(A, 2) >= math.sqrt(N) - 1e-12:
        raise ValidationError("need ||A|| < sqrt N")
    sN = math.sqrt(N)
    X_A = np.linalg.solve(sN * np.eye(r) + _sym_sqrt(A.T @ A), polar_part(A).T)
    Y_A = np.linalg.inv(sN * np.eye(r) + _sym_sqrt(A @ A.T))
    E = C @ X_A @ B
    S = B.T @ Y_A @ B
    return PolarPieces(X_A, Y_A, E, S, (D - E) / sN, sN * np.eye(N - r) - S)


def polar_direct(H, r: int) -> dict:
    """E and S from scipy's polar decomposition of D (oracle)."""
    from scipy.linalg import polar
    H = np.asarray(H, float)
    N = H.shape[0]
    D = H[r:, r:]
    U, T = polar(D, side="right")
    sN = math.sqrt(N)
    return {"U": U, "T": T, "E": D - sN * U, "S": sN * np.eye(N - r) - T}


def polar_check(H, r: int, tol: float = 1e-9) -> dict:
    pp = polar_pieces(H, r)
    dd = polar_direct(H, r)
    eE = float(np.max(np.abs(pp.E - dd["E"])))
    eS = float(np.max(np.abs(pp.S - dd["S"])))
    Einf = float(np.max(np.abs(pp.E)))
    return {"E_error": eE, "S_error": eS, "agree": eE <= tol and eS <= tol,
            "E_inf": Einf, "ahp": Einf < 1}


def normalize_split(H, r: int) -> np.ndarray:
    """Equivalent form of a real Hadamard matrix matching the closed forms:
    dephased, A = [+] (r = 1) or [[+, +], [+, -]] (r = 2), and for r = 2 the
    remaining columns (rows) sorted by the sign in row (column) 2."""
    if r not in (1, 2):
        raise ValidationError("r in {1, 2}")
    H = np.asarray(H)
    H = H * H[0][None, :]
    H = H * H[:, 0][:, None]
    if r == 2:
        j = int(np.flatnonzero(H[1] < 0)[0])
        perm = list(range(H.shape[1]))
        perm[1], perm[j] = perm[j], perm[1]
        H = H[:, perm]
        i = int(np.flatnonzero(H[:, 1] < 0)[0])
        perm = list(range(H.shape[0]))
        perm[1], perm[i] = perm[i], perm[1]
        H = H[perm, :]
        cols = 2 + np.argsort(-H[1, 2:], kind="stable")
        rows = 2 + np.argsort(-H[2:, 1], kind="stable")
        H = H[:, [0, 1] + cols.tolist()]
        H = H[[0, 1] + rows.tolist(), :]
    return H


def polar_closed_form(N: int, r: int) -> tuple:
    """(E, S) for the normalized splits r = 1 ([+]) and r = 2 ([[+,+],[+,-]])."""
    if r == 1:
        c = 1 / (1 + math.sqrt(N))
        J = np.ones((N - 1, N - 1))
        return c * J, c * J
    if r == 2:
        n = N // 2 - 1
        blk = lambda a, b, c_, d: np.block([[a * np.ones((n, n)), b * np.ones((n, n))],
                                            [c_ * np.ones((n, n)), d * np.ones((n, n))]])
        E = 2 / (2 + math.sqrt(2 * N)) * blk(1, 1, 1, -1)
        S = 2 / (math.sqrt(2) + math.sqrt(N)) * blk(1, 0, 0, 1)
        return E, S
    raise ValidationError("closed forms for r in {1, 2}")


def ahp_bound_report(r: int, N: int, case: str = "hadamard", c: float | None = None) -> dict:
    """Bounds on ||E||_inf and the size thresholds making D an AHP."""
    if case == "hadamard":
        bound = r * math.sqrt(r) / (math.sqrt(r) + math.sqrt(N))
        threshold = r * (r - 1) ** 2
    elif case == "polar":
        if c is None:
            raise ValidationError("case 'polar' needs c = ||Pol(A) - A/sqrt N||_inf")
        if r * r >= N:
            raise ValidationError("need r^2 < N")
        bound = r * r * c * math.sqrt(N) / (N - r * r)
        x = r * c
        threshold = r * r / 4 * (x + math.sqrt(x * x + 4)) ** 2
    elif case == "general":
        if r * r >= N:
            raise ValidationError("need r^2 < N")
        bound = r * r * (1 + math.sqrt(N)) / (N - r * r)
        threshold = r * r / 4 * (r + math.sqrt(r * r + 8)) ** 2
    else:
        raise ValidationError("case must be hadamard, polar or general")
    return {"bound": bound, "threshold": threshold, "ahp": N > threshold}


# ---------------------------------------------------------------------------
# Walsh embeddings

def embed_in_walsh(D) -> dict:
    """Row and column indices placing the d x d sign matrix D inside W_{2^n}.
    Distinct columns need n = d (rows e_i, columns the bit strings of the
    columns); in general n = d + ceil(log2 d), using W_R (x) W_{2^d}."""
    D = np.asarray(D, int)
    d = D.shape[0]
    if D.shape != (d, d) or not np.all(np.isin(D, (-1, 1))):
        raise ValidationError("need a square +-1 matrix")
    bits = (1 - D) // 2
    ycols = [int("".join(map(str, bits[:, j])), 2) for j in range(d)]
    rows = [1 << (d - 1 - i) for i in range(d)]
    if len(set(ycols)) == d:
        return {"n": d, "rows": rows, "cols": ycols}
    k = math.ceil(math.log2(d)) if d > 1 else 0
    Nn = 1 << d
    return {"n": d + k, "rows": rows, "cols": [j * Nn + y for j, y in enumerate(ycols)]}


def check_embedding(D, emb) -> bool:
    from .constructions import walsh_matrix
    W = walsh_matrix(emb["n"])
    return bool(np.array_equal(W[np.ix_(emb["rows"], emb["cols"])], np.asarray(D)))


# ---------------------------------------------------------------------------
# partial Butson matrices

def _root_sum_zero(counts, q) -> bool:
    return vanishes_exact(counts, q)


def pbm_count_enumerate(q: int, M: int, N: int) -> int:
    """q^N times the number of dephased M x N partial Butson matrices over
    Z_q, by enumerating multiplicity vectors of column types (M in {2, 3})."""
    if M == 2:
        return q ** N * sum(multinomial(N, c) for c in _compositions(N, q) if _root_sum_zero(c, q))
    if M == 3:
        total = 0
        for c in _compositions(N, q * q):
            A = np.array(c).reshape(q, q)  # A[i, j]: columns with (w^i, w^j)
            if not _root_sum_zero(A.sum(axis=1), q) or not _root_sum_zero(A.sum(axis=0), q):
                continue
            diff = np.zeros(q, int)
            for i in range(q):
                for j in range(q):
                    diff[(i - j) % q] += A[i, j]
            if _root_sum_zero(diff, q):
                total += multinomial(N, c)
        return q ** N * total
    raise ValidationError("M in {2, 3}")


def pbm_count_bruteforce(q: int, M: int, N: int) -> int:
    """Direct check of all dephased exponent matrices (q^{(M-1)N} of them)."""
    if q ** ((M - 1) * N) > 5_000_000:
        raise ValidationError("brute force too large")
    w = np.exp(2j * np.pi * np.arange(q) / q)
    rows = np.array(list(product(range(q), repeat=N)))
    Z = w[rows]
    ok1 = np.abs(Z.sum(axis=1)) < 1e-9
    if M == 2:
        return q ** N * int(ok1.sum())
    if M == 3:
        R = Z[ok1]
        G = np.abs(R @ np.conj(R).T) < 1e-9
        return q ** N * int(G.sum())
    raise ValidationError("M in {2, 3}")


def pbm_count_formula(q: int, M: int, N: int) -> int:
    """Closed forms: M = 2 with q = p^k (multiplicities repeated p times),
    M = 3 with q in {2, 3} (tristochastic parametrization)."""
    from .obstructions import prime_power
    if M == 2:
        pa = prime_power(q)
        if pa is None:
            raise ValidationError("M = 2 formula needs q a prime power")
        p = pa[0]
        if N % p:
            return 0
        s = q // p
        tot = 0
        for a in _compositions(N // p, s):
            parts = [a[i % s] for i in range(q)]
            tot += multinomial(N, parts)
        return q ** N * tot
    if M == 3 and q == 2:
        return 2 ** N * multinomial(N, [N // 4] * 4) if N % 4 == 0 else 0
    if M == 3 and q == 3:
        if N % 3:
            return 0
        tot = 0
        for a, b, c in _compositions(N // 3, 3):
            tot += multinomial(N, [a, b, c, b, c, a, c, a, b])
        return 3 ** N * tot
    raise ValidationError("formula available for M = 2 (prime power q) or M = 3 (q in {2, 3})")


def pbm_probability(q: int, M: int, N: int) -> float:
    return pbm_count_enumerate(q, M, N) / q ** (M * N)


def pbm_asymptotic(q: int, M: int, N: int) -> float:
    """Large-N probability: M = 2, q = p^k, and M = 3, q in {2, 3}."""
    from .obstructions import prime_power
    if M == 2:
        pa = prime_power(q)
        if pa is None:
            raise ValidationError("q must be a prime power")
        p = pa[0]
        e = q - q / p
        return math.sqrt(p ** (2 - q / p) * q ** e / (2 * math.pi * N) ** e)
    if M == 3 and q == 2:
        return 16 / math.sqrt((2 * math.pi * N) ** 3) if N % 4 == 0 else 0.0
    if M == 3 and q == 3:
        return 243 * math.sqrt(3) / (2 * math.pi * N) ** 3
    raise ValidationError("asymptotic available for M = 2 or M = 3 with q in {2, 3}")


def tristochastic_permutation(p: int) -> np.ndarray:
    """The permutation matrix of i -> -i mod p, tristochastic for p odd."""
    A = np.zeros((p, p), int)
    for i in range(p):
        A[i, (-i) % p] = 1
    return A


def is_tristochastic(A) -> bool:
    A = np.asarray(A)
    p = A.shape[0]
    s = A[0].sum()
    diags = [sum(A[i, (i + k) % p] for i in range(p)) for k in range(p)]
    return bool(np.all(A.sum(axis=0) == s) and np.all(A.sum(axis=1) == s) and all(x == s for x in diags))


def pbm_from_tristochastic(A, reps: int = 1) -> np.ndarray:
    """Exponent matrix of the 3 x N partial Butson matrix with A_ij columns
    of type (0, i, j)."""
    A = np.asarray(A, int) * reps
    p = A.shape[0]
    cols = [(0, i, j) for i in range(p) for j in range(p) for _ in range(A[i, j])]
    return np.array(cols).T
