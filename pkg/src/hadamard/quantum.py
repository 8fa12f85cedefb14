"""Quantum permutation group side of Hadamard matrices: magic and submagic
grids, transfer matrices and truncated character moments, the transpose
duality, Tannakian membership, Kesten moments of deformed Fourier models,
free Poisson asymptotics, and partial-permutation semigroups of pre-Latin
squares."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constructions import FiniteAbelianGroup
from .core import ValidationError, as_complex
from .glow import Partition, noncrossing_partitions, set_partitions

TOL_MAGIC = 1e-9
TOL_DUAL = 1e-8
MAX_TRANSFER = 2000


# ---------------------------------------------------------------------------
# magic grids

@dataclass(frozen=True)
class MagicGrid:
    """N x N grid of D x D matrices; cells[i, j] is the cell P_ij."""
    cells: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cells, complex)
        if c.ndim != 4 or c.shape[0] != c.shape[1] or c.shape[2] != c.shape[3]:
            raise ValidationError("cells must have shape (N, N, D, D)")
        object.__setattr__(self, "cells", c)

    @property
    def N(self) -> int:
        return self.cells.shape[0]

    @property
    def D(self) -> int:
        return self.cells.shape[2]

    def errors(self) -> dict:
        """Max deviations from the projection and row/column-sum conditions."""
        P = self.cells
        Ph = np.conj(np.swapaxes(P, -1, -2))
        I = np.eye(self.D)
        return {
            "hermitian": float(np.max(np.abs(P - Ph))),
            "idempotent": float(np.max(np.abs(P @ P - P))),
            "rows": float(np.max(np.abs(P.sum(axis=1) - I))),
            "cols": float(np.max(np.abs(P.sum(axis=0) - I))),
        }

    def is_magic(self, tol: float = TOL_MAGIC) -> bool:
        return all(v <= tol for v in self.errors().values())

    def orthogonality_error(self) -> float:
        """max |P_ij P_ik| (j != k) and |P_ij P_kj| (i != k)."""
        P = self.cells
        n = self.N
        off = ~np.eye(n, dtype=bool)
        rows = np.einsum("ijab,ikbc->ijkac", P, P)[:, off]
        cols = np.einsum("ijab,kjbc->ikjac", P, P)[off]
        return float(max(np.max(np.abs(rows), initial=0.0), np.max(np.abs(cols), initial=0.0)))

    def is_submagic(self, tol: float = TOL_MAGIC) -> bool:
        e = self.errors()
        return e["hermitian"] <= tol and e["idempotent"] <= tol and self.orthogonality_error() <= tol

    def commutator_norm(self) -> float:
        """max ||[P_ij, P_kl]|| over all pairs of cells."""
        A = self.cells.reshape(-1, self.D, self.D)
        C = np.einsum("xab,ybc->xyac", A, A)
        return float(np.max(np.abs(C - np.swapaxes(C, 0, 1))))

    def dual(self) -> "MagicGrid":
        """(U'_kl)_ij = (U_ij)_kl; needs D = N."""
        if self.D != self.N:
            raise ValidationError("the transpose dual needs cell size = grid size")
        return MagicGrid(self.cells.transpose(2, 3, 0, 1))


def _rank_one(v) -> np.ndarray:
    """Orthogonal projections onto the last-axis vectors of v."""
    v = np.asarray(v, complex)
    nrm = np.sum(np.abs(v) ** 2, axis=-1)[..., None, None]
    return v[..., :, None] * np.conj(v[..., None, :]) / nrm


def _row_quotients(H) -> np.ndarray:
    """xi[i, j] = H_i / H_j entrywise."""
    H = as_complex(H)
    if np.max(np.abs(np.abs(H) - 1)) > 1e-9:
        raise ValidationError("entries must be unimodular")
    return H[:, None, :] * np.conj(H[None, :, :])


def magic_from_hadamard(H, check: bool = True) -> MagicGrid:
    """P_ij = Proj(H_i / H_j)."""
    H = as_complex(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError("need a square matrix")
    grid = MagicGrid(_rank_one(_row_quotients(H)))
    if check and not grid.is_magic():
        raise ValidationError(f"not a magic unitary: {grid.errors()}")
    return grid


def _blocks(H, K):
    H = np.asarray(H, complex)
    if H.ndim == 4:
        return H
    n = H.shape[0] // K
    if H.shape != (n * K, n * K):
        raise ValidationError("matrix size is not a multiple of the block size")
    return H.reshape(n, K, n, K).transpose(0, 2, 1, 3)


def operator_hadamard_errors(H, K: int | None = None) -> dict:
    """Deviations from the three axioms for H with K x K matrix entries:
    unitary entries, commuting rows and columns, HH* = H^t conj(H) = N."""
    B = _blocks(H, K)
    n, k = B.shape[0], B.shape[2]
    Bh = np.conj(np.swapaxes(B, -1, -2))
    I = np.eye(k)
    unit = np.max(np.abs(B @ Bh - I))
    comm = 0.0
    for i in range(n):
        for a, b in itertools.combinations(range(n), 2):
            comm = max(comm,
                       np.max(np.abs(B[i, a] @ B[i, b] - B[i, b] @ B[i, a])),
                       np.max(np.abs(B[a, i] @ B[b, i] - B[b, i] @ B[a, i])))
    # (HH*)_{ik} = sum_j H_ij H_kj^*, (H^t conj H)_{ik} = sum_j H_ji H_jk^*
    hh = np.einsum("ijab,kjcb->ikac", B, np.conj(B))
    tt = np.einsum("jiab,jkcb->ikac", B, np.conj(B))
    target = n * np.einsum("ik,ac->ikac", np.eye(n), I)
    return {"unitary": float(unit), "commute": float(comm),
            "HH*": float(np.max(np.abs(hh - target))),
            "HtHbar": float(np.max(np.abs(tt - target)))}


def generalized_magic(H, K: int | None = None, tol: float = TOL_MAGIC) -> MagicGrid:
    """(P_ij)_ab = (1/N) H_ia H_ja^* H_jb H_ib^* for H with K x K blocks.
    Each cell is an N x N matrix of K x K blocks, i.e. size NK."""
    B = _blocks(H, K)
    err = operator_hadamard_errors(B)
    if any(v > tol for v in err.values()):
        raise ValidationError(f"not an Hadamard matrix over M_K: {err}")
    n, k = B.shape[0], B.shape[2]
    Bh = np.conj(np.swapaxes(B, -1, -2))
    # X[i, j, a] = H_ia H_ja^*,  Y[i, j, b] = H_jb H_ib^*
    X = np.einsum("iaxy,jayz->ijaxz", B, Bh)
    Y = np.einsum("jbxy,ibyz->ijbxz", B, Bh)
    P = np.einsum("ijaxy,ijbyz->ijaxbz", X, Y) / n
    grid = MagicGrid(P.reshape(n, n, n * k, n * k))
    if not grid.is_magic(tol):
        raise ValidationError(f"not magic: {grid.errors()}")
    return grid


def two_unitary_example(x, y, z, t) -> np.ndarray:
    """[[x, y, x, y], [x, -y, x, -y], [z, t, -z, -t], [z, -t, -z, t]] as a
    4K x 4K array, for K x K unitaries x, y, z, t."""
    x, y, z, t = (np.asarray(m, complex) for m in (x, y, z, t))
    rows = [[x, y, x, y], [x, -y, x, -y], [z, t, -z, -t], [z, -t, -z, t]]
    return np.block(rows)


# ---------------------------------------------------------------------------
# transfer matrices and truncated moments

@dataclass(frozen=True)
class TransferMatrix:
    """(T_p)_{i, j} = tr(U_{i_1 j_1} ... U_{i_p j_p}), multi-indices flattened
    lexicographically."""
    p: int
    N: int
    entries: np.ndarray

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


def _grids(grid):
    if isinstance(grid, MagicGrid):
        return [grid]
    grids = list(grid)
    if not grids or not all(isinstance(g, MagicGrid) for g in grids):
        raise ValidationError("need a MagicGrid or a nonempty list of them")
    return grids


def _transfer_single(grid: MagicGrid, p: int) -> np.ndarray:
    n, D = grid.N, grid.D
    A = grid.cells.reshape(n * n, D, D)
    Q = A
    for _ in range(p - 2):
        Q = np.einsum("xab,ybc->xyac", Q, A).reshape(-1, D, D)
    if p == 1:
        T = np.einsum("xaa->x", A)
    else:
        T = np.einsum("xab,yba->xy", Q, A)
    # axes (i1, j1, i2, j2, ...) -> (i1..ip, j1..jp)
    T = T.reshape((n,) * (2 * p))
    order = list(range(0, 2 * p, 2)) + list(range(1, 2 * p, 2))
    return T.transpose(order).reshape(n ** p, n ** p) / D


def transfer(grid, p: int) -> TransferMatrix:
    """T_p for a grid, or the average over a list of grids (a quadrature of
    the model's parameter space)."""
    grids = _grids(grid)
    n = grids[0].N
    if p < 1:
        raise ValidationError("p >= 1")
    if n ** p > MAX_TRANSFER:
        raise ValidationError(f"N^p = {n ** p} exceeds the size guard {MAX_TRANSFER}")
    T = sum(_transfer_single(g, p) for g in grids) / len(grids)
    return TransferMatrix(p, n, T)


def character_moment(grid, p: int) -> complex:
    """c_p^1 = tr(chi^p), chi = sum_i U_ii; no size guard needed."""
    vals = []
    for g in _grids(grid):
        chi = np.einsum("iiab->ab", g.cells)
        vals.append(np.trace(np.linalg.matrix_power(chi, p)) / g.D)
    return complex(np.mean(vals))


def truncated_moment(grid, p: int, r: int) -> complex:
    """c_p^r = Tr(T_p^r)."""
    if r < 1:
        raise ValidationError("r >= 1")
    if r == 1:
        return character_moment(grid, p)
    T = transfer(grid, p).entries
    return complex(np.trace(np.linalg.matrix_power(T, r)))


def cesaro_moments(grid, p: int, k_max: int = 200, tol: float = 1e-6, window: int = 10) -> dict:
    """Cesaro averages (1/k) sum_{r<=k} c_p^r for k = 1..k_max.  Stabilized
    when successive averages differ by less than tol over `window` steps."""
    T = transfer(grid, p).entries
    lam = np.linalg.eigvals(T)
    r = np.arange(1, k_max + 1)
    c = np.real_if_close((lam[None, :] ** r[:, None]).sum(axis=1))
    avg = np.cumsum(c) / r
    diffs = np.abs(np.diff(avg))
    stab = None
    run = 0
    for k, d in enumerate(diffs, start=2):
        run = run + 1 if d < tol else 0
        if run >= window:
            stab = k
            break
    return {"p": p, "moments": c, "averages": avg, "limit": complex(avg[-1]),
            "stabilized": stab is not None, "stabilized_at": stab}


def duality_check(grid: MagicGrid, p: int, r: int, tol: float = TOL_DUAL) -> dict:
    """c_p^r(U) / N^p against c_r^p(U') / N^r."""
    n = grid.N
    lhs = truncated_moment(grid, p, r) / n ** p
    rhs = truncated_moment(grid.dual(), r, p) / n ** r
    err = abs(lhs - rhs)
    return {"p": p, "r": r, "lhs": lhs, "rhs": rhs, "error": err,
            "equal": err <= tol * max(1.0, abs(lhs))}


# ---------------------------------------------------------------------------
# Tannakian conditions

def gram_tensor(H) -> np.ndarray:
    """g[i, j, a, b] = (1/N) sum_k H_ik conj(H_jk) conj(H_ak) H_bk, the inner
    product of the unit vectors (H_i/H_j)/sqrt N and (H_a/H_b)/sqrt N."""
    H = as_complex(H)
    n = H.shape[0]
    return np.einsum("ik,jk,ak,bk->ijab", H, np.conj(H), np.conj(H), H) / n


def gram_power(H, m: int) -> np.ndarray:
    """G^m as an N^m x N^m matrix: rows are the lower indices i_1..i_m,
    columns the upper ones j_1..j_m, entry prod_t g[i_t, j_t, i_{t-1}, j_{t-1}]."""
    g = gram_tensor(H)
    n = g.shape[0]
    if n ** (2 * m) > 2 ** 24:
        raise ValidationError("G^m too large")
    gT = g.transpose(2, 3, 0, 1)
    X = np.ones((n, n), complex)
    for _ in range(m - 1):
        X = X[..., None, None] * gT
    order = list(range(0, 2 * m, 2)) + list(range(1, 2 * m, 2))
    return X.transpose(order).reshape(n ** m, n ** m)


def tannakian_member(H, T, k: int, l: int, tol: float = 1e-8) -> bool:
    """T in Hom(u^{(x)k}, u^{(x)l})  <=>  T° G^{k+2} = G^{l+2} T°, T° = id (x) T (x) id."""
    H = as_complex(H)
    n = H.shape[0]
    T = np.asarray(T, complex).reshape(n ** l, n ** k)
    I = np.eye(n)
    To = np.kron(np.kron(I, T), I)
    lhs = To @ gram_power(H, k + 2)
    rhs = gram_power(H, l + 2) @ To
    return bool(np.max(np.abs(lhs - rhs)) <= tol * max(1.0, float(np.max(np.abs(T)))))


def _tensor_power(grid: MagicGrid, k: int) -> np.ndarray:
    """u^{(x)k} as an array (N^k, N^k, D, D) of products P_{a1 j1} ... P_{ak jk}."""
    n, D = grid.N, grid.D
    U = np.eye(D, dtype=complex)[None, None]
    for _ in range(k):
        U = np.einsum("ajxy,bkyz->abjkxz", U, grid.cells)
        U = U.reshape(U.shape[0] * n, U.shape[2] * n, D, D)
    return U


def intertwines(grid: MagicGrid, T, k: int, l: int, tol: float = 1e-8) -> bool:
    """Direct test of T u^{(x)k} = u^{(x)l} T with operator entries."""
    n = grid.N
    T = np.asarray(T, complex).reshape(n ** l, n ** k)
    lhs = np.einsum("ia,ajxy->ijxy", T, _tensor_power(grid, k))
    rhs = np.einsum("ibxy,bj->ijxy", _tensor_power(grid, l), T)
    return bool(np.max(np.abs(lhs - rhs)) <= tol * max(1.0, float(np.max(np.abs(T)))))


def fixed_vectors_direct(grid: MagicGrid, k: int, tol: float = 1e-8) -> int:
    """dim{xi : u^{(x)k} xi = xi (x) 1} by a null-space computation."""
    n, D = grid.N, grid.D
    U = _tensor_power(grid, k)
    m = n ** k
    # (sum_b U_ib xi_b - xi_i 1) = 0 for every matrix entry
    A = U.transpose(0, 2, 3, 1).reshape(m * D * D, m)
    A = A - np.kron(np.eye(m), np.eye(D).reshape(D * D, 1))
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0])))


def fixed_point_dimension(grid, k: int, k_max: int = 200) -> dict:
    """dim Fix(u^{(x)k}) as the Cesaro limit of c_k^r."""
    if k == 0:
        return {"k": 0, "dimension": 1, "limit": 1.0, "stabilized": True}
    ces = cesaro_moments(grid, k, k_max)
    lim = ces["limit"].real
    return {"k": k, "dimension": int(round(lim)), "limit": lim,
            "stabilized": ces["stabilized"]}


# ---------------------------------------------------------------------------
# Kesten moments of deformed Fourier models

def _order(G) -> int:
    if isinstance(G, FiniteAbelianGroup):
        return G.size
    G = int(G)
    if G < 1:
        raise ValidationError("group order >= 1")
    return G


def kesten_moment(G, H, p: int, max_tuples: int = 50_000_000) -> Fraction:
    """(1/(|G||H|)) #{i in G^p, d in H^p : [(i_s, d_s)] = [(i_s, d_{s-1})]}
    as multisets, d_0 = d_p.  Only the orders of G and H matter."""
    M, N = _order(G), _order(H)
    if p < 1:
        raise ValidationError("p >= 1")
    if (M * N) ** p > max_tuples:
        raise ValidationError("enumeration too large")
    d = np.array(list(itertools.product(range(N), repeat=p)), dtype=np.int64)
    d_prev = np.roll(d, 1, axis=1)
    count = 0
    for i in itertools.product(range(M), repeat=p):
        i = np.array(i, dtype=np.int64)
        a = np.sort(i * N + d, axis=1)
        b = np.sort(i * N + d_prev, axis=1)
        count += int(np.all(a == b, axis=1).sum())
    return Fraction(count, M * N)


def gram_mc(G, H, p: int, samples: int = 100_000, seed=0, batch: int = 20_000) -> dict:
    """(1/N) E tr(A(q)^p) for q uniform on M x N torus matrices, A the Gram
    matrix of the rows, tr normalized by M."""
    M, N = _order(G), _order(H)
    rng = np.random.default_rng(seed)
    s1 = s2 = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        q = np.exp(2j * np.pi * rng.random((m, M, N)))
        A = q @ np.conj(np.swapaxes(q, 1, 2))
        ev = np.linalg.eigvalsh(A)
        x = (ev ** p).sum(axis=1) / (M * N)
        s1 += x.sum()
        s2 += (x * x).sum()
        done += m
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return {"p": p, "estimate": mean, "stderr": math.sqrt(var / samples), "samples": samples}


def compositions(n: int, k: int):
    """All (r_1..r_k) of nonnegative integers with sum n."""
    if k == 1:
        yield (n,)
        return
    for a in range(n + 1):
        for rest in compositions(n - a, k - 1):
            yield (a,) + rest


def torus_sum_moment(N: int, k: int) -> int:
    """int_{T^N} |a_1 + ... + a_N|^{2k} = sum of squared multinomials."""
    out = 0
    for r in compositions(k, N):
        m = math.factorial(k)
        for x in r:
            m //= math.factorial(x)
        out += m * m
    return out


def m2_blowup_moment(N: int, p: int) -> Fraction:
    """int chi^p for the 2 x N deformed Fourier model:
    (1/N) sum_k C(p, 2k) N^{p-2k} int |sum a_i|^{2k}."""
    s = sum(math.comb(p, 2 * k) * N ** (p - 2 * k) * torus_sum_moment(N, k)
            for k in range(p // 2 + 1))
    return Fraction(s, N)


# ---------------------------------------------------------------------------
# noncrossing partitions and free Poisson asymptotics

def catalan(p: int) -> int:
    return math.comb(2 * p, p) // (p + 1)


def narayana(p: int, r: int) -> int:
    if not 1 <= r <= p:
        return 0
    return math.comb(p, r) * math.comb(p, r - 1) // p


def partitions(p: int) -> list[Partition]:
    return set_partitions(p)


def noncrossing(p: int) -> list[Partition]:
    return noncrossing_partitions(p)


def noncrossing_block_counts(p: int) -> dict:
    """r -> #{pi in NC(p) : |pi| = r}, by enumeration."""
    out = {}
    for pi in noncrossing_partitions(p):
        out[len(pi)] = out.get(len(pi), 0) + 1
    return dict(sorted(out.items()))


def noncrossing_pairings(n: int) -> list[Partition]:
    """NC_2(n), generated recursively (1 is paired with an even-distance point)."""
    def rec(pts):
        if not pts:
            yield []
            return
        a = pts[0]
        for k in range(1, len(pts), 2):
            inner, outer = pts[1:k], pts[k + 1:]
            for x in rec(inner):
                for y in rec(outer):
                    yield [(a, pts[k])] + x + y
    return [Partition(tuple(b)) for b in rec(list(range(n)))]


def fatten(pi: Partition) -> Partition:
    """NC(k) -> NC_2(2k): point x becomes (2x, 2x+1), and each block
    b_1 < ... < b_s pairs 2b_j + 1 with 2b_{j+1} cyclically."""
    pairs = []
    for b in pi.blocks:
        for j in range(len(b)):
            pairs.append((2 * b[j] + 1, 2 * b[(j + 1) % len(b)]))
    return Partition(tuple(pairs))


def shrink(sigma: Partition) -> Partition:
    """Inverse of fatten: points 2x, 2x+1 collapse to x, pairs glue blocks."""
    k = sigma.p // 2
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for b in sigma.blocks:
        x, y = (find(v // 2) for v in b)
        parent[x] = y
    return Partition.from_labels([find(x) for x in range(k)])


def free_poisson_moment(k: int, t: float = 1.0) -> float:
    """M_k(pi_t) = sum over NC(k) of t^{|pi|}."""
    if k == 0:
        return 1.0
    return float(sum(c * t ** r for r, c in noncrossing_block_counts(k).items()))


def free_poisson_prediction(p: int, alpha, beta) -> Fraction:
    """c_p / K^{p-1} limit: sum_r #{NC(p), r blocks} alpha^{r-1} beta^{p-r}."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    return sum((c * alpha ** (r - 1) * beta ** (p - r)
                for r, c in noncrossing_block_counts(p).items()), Fraction(0))


def free_poisson_check(p: int, alpha, beta, K_list) -> list[dict]:
    """Exact c_p = kesten_moment(Z_M, Z_N, p), M = alpha K, N = beta K,
    against K^{p-1} times the noncrossing prediction."""
    pred = free_poisson_prediction(p, alpha, beta)
    rows = []
    for K in K_list:
        M, N = Fraction(alpha) * K, Fraction(beta) * K
        if M.denominator != 1 or N.denominator != 1:
            raise ValidationError("alpha K and beta K must be integers")
        exact = kesten_moment(int(M), int(N), p)
        target = pred * Fraction(K) ** (p - 1)
        rows.append({"K": K, "M": int(M), "N": int(N), "exact": exact,
                     "prediction": target,
                     "rel_error": float(abs(exact - target) / target)})
    return rows


# ---------------------------------------------------------------------------
# partial Hadamard matrices and pre-Latin squares

def submagic_from_phm(P, check: bool = True) -> MagicGrid:
    """M x M grid P_ij = Proj(H_i / H_j) of N x N projections."""
    P = as_complex(P)
    grid = MagicGrid(_rank_one(_row_quotients(P)))
    if check and not grid.is_submagic():
        raise ValidationError("not submagic; are the rows orthogonal?")
    return grid


@dataclass(frozen=True)
class ClassicalType:
    classical: bool
    latin: np.ndarray | None
    commutator: float


def classical_type(P, basis=None, tol: float = 1e-9) -> ClassicalType:
    """Classical when the vectors H_i/H_j are pairwise proportional or
    orthogonal.  Labels come from `basis` (vector x gives label x) when
    given, otherwise classes are numbered in row-major first appearance."""
    xi = _row_quotients(P)
    M, N = xi.shape[0], xi.shape[2]
    grid = MagicGrid(_rank_one(xi))
    flat = xi.reshape(M * M, N)
    ov = np.abs(flat @ np.conj(flat).T) / N
    ok = np.all((ov <= tol) | (np.abs(ov - 1) <= tol))
    comm = grid.commutator_norm()
    if not ok:
        return ClassicalType(False, None, comm)
    L = np.full(M * M, -1, dtype=int)
    if basis is not None:
        B = np.asarray(basis, complex)
        c = np.abs(flat @ np.conj(B).T) / (
            np.linalg.norm(flat, axis=1)[:, None] * np.linalg.norm(B, axis=1)[None, :])
        hit = np.abs(c - 1) <= tol
        if not np.all(hit.sum(axis=1) == 1):
            raise ValidationError("basis does not contain every H_i/H_j up to scalars")
        L = np.argmax(hit, axis=1)
    else:
        nxt = 0
        for x in range(M * M):
            if L[x] < 0:
                L[(np.abs(ov[x] - 1) <= tol) & (L < 0)] = nxt
                nxt += 1
    return ClassicalType(True, L.reshape(M, M), comm)


def truncated_fourier(M: int, N: int) -> np.ndarray:
    """F_{M,N}: the first M rows of F_N."""
    return np.exp(2j * np.pi * np.outer(np.arange(M), np.arange(N)) / N)


def fourier_basis(N: int) -> np.ndarray:
    """xi_x = rho^{-x}, rho = (1, w, ..., w^{N-1}); gives L_ij = j - i on F_N."""
    rho = np.exp(2j * np.pi * np.arange(N) / N)
    return np.array([rho ** (-x) for x in range(N)])


def fourier_latin(M: int, N: int) -> np.ndarray:
    i = np.arange(M)
    return (i[None, :] - i[:, None]) % N


@dataclass(frozen=True, order=True)
class PartialPermutation:
    """Bijection between subsets of {0..M-1}; pairs (x, sigma(x)) sorted."""
    M: int
    pairs: tuple

    def __post_init__(self):
        pr = tuple(sorted((int(a), int(b)) for a, b in self.pairs))
        xs = [a for a, _ in pr]
        ys = [b for _, b in pr]
        if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
            raise ValidationError("not a bijection")
        if any(not (0 <= v < self.M) for v in xs + ys):
            raise ValidationError("points must lie in {0..M-1}")
        object.__setattr__(self, "pairs", pr)

    @property
    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    @property
    def codomain(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    @property
    def kappa(self) -> int:
        return len(self.pairs)

    def __call__(self, x: int) -> int:
        return dict(self.pairs)[x]

    def __mul__(self, other: "PartialPermutation") -> "PartialPermutation":
        """(self other)(x) = self(other(x)) where defined."""
        s = dict(self.pairs)
        return PartialPermutation(self.M, tuple((a, s[b]) for a, b in other.pairs if b in s))

    def __str__(self):
        if not self.pairs:
            return "empty"
        return " ".join(f"{a + 1}->{b + 1}" for a, b in self.pairs)

    @classmethod
    def identity(cls, M: int) -> "PartialPermutation":
        return cls(M, tuple((x, x) for x in range(M)))

    @classmethod
    def empty(cls, M: int) -> "PartialPermutation":
        return cls(M, ())


def latin_generators(L) -> dict:
    """x -> sigma_x, where sigma_x(j) = i iff L_ij = x."""
    L = np.asarray(L)
    M = L.shape[0]
    for i in range(M):
        if len(set(L[i])) != M or len(set(L[:, i])) != M:
            raise ValidationError("not a pre-Latin square")
    out = {}
    for x in sorted(set(L.ravel().tolist())):
        i, j = np.nonzero(L == x)
        out[x] = PartialPermutation(M, tuple(zip(j.tolist(), i.tolist())))
    return out


def closure(gens) -> frozenset:
    """Semigroup generated under composition; the empty map is kept when
    a product produces it."""
    S = set(gens)
    frontier = list(S)
    while frontier:
        new = []
        for a in frontier:
            for b in list(S):
                for c in (a * b, b * a):
                    if c not in S:
                        S.add(c)
                        new.append(c)
        frontier = new
    return frozenset(S)


def latin_semigroup(L) -> frozenset:
    return closure(latin_generators(L).values())


def interval_shifts(M: int, include_empty: bool = True) -> frozenset:
    """sigma : I -> J, sigma(j) = j - x, with I, J intervals of {0..M-1}."""
    out = {PartialPermutation.empty(M)} if include_empty else set()
    for k in range(1, M + 1):
        for a in range(M - k + 1):
            for b in range(M - k + 1):
                out.add(PartialPermutation(M, tuple((a + t, b + t) for t in range(k))))
    return frozenset(out)


def kappa_components(S) -> dict:
    out = {}
    for s in S:
        out.setdefault(s.kappa, set()).add(s)
    return {k: frozenset(v) for k, v in sorted(out.items())}


def is_cyclic_group(S) -> bool:
    """S is a group of full permutations generated by one element."""
    S = list(S)
    if not S:
        return False
    M = S[0].M
    if any(s.kappa != M for s in S):
        return False
    for g in S:
        seen, h = {g}, g
        while True:
            h = h * g
            if h in seen:
                break
            seen.add(h)
        if len(seen) == len(S):
            return True
    return False
