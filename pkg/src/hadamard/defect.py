"""The defect d(H): the dimension of the space of first-order deformation
exponents A with H_ij q^{A_ij} Hadamard at order 1.  Numeric and exact
ranks, closed forms for Fourier and real matrices, partial and truncated
Fourier matrices, master matrices and Nicoara-White deformations."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from .constructions import FiniteAbelianGroup, MasterSpec, fourier
from .core import (
    ButsonMatrix, ValidationError, as_complex, is_hadamard, rows_orthogonal,
)
from .obstructions import prime_factors


@dataclass(frozen=True)
class TangentSystem:
    """Real constraint rows over the M*N unknowns A_ij (row-major)."""
    M: int
    N: int
    rows: np.ndarray


@dataclass(frozen=True)
class DefectReport:
    numeric_rank: int
    defect: int
    closed_form: int | None
    agree: bool | None
    isolated_hint: bool
    gap_ratio: float
    unstable: bool
    dephased_defect: int = 0

    def as_dict(self):
        return asdict(self)


def _complex_rows(H) -> np.ndarray:
    """Complex coefficient rows of sum_k H_ik conj(H_jk) (A_ik - A_jk) = 0, i < j."""
    H = as_complex(H)
    M, N = H.shape
    pairs = list(combinations(range(M), 2))
    C = np.zeros((len(pairs), M, N), complex)
    for r, (i, j) in enumerate(pairs):
        c = H[i] * np.conj(H[j])
        C[r, i] += c
        C[r, j] -= c
    return C.reshape(len(pairs), M * N)


def tangent_system(H) -> TangentSystem:
    H = as_complex(H)
    C = _complex_rows(H)
    return TangentSystem(H.shape[0], H.shape[1], np.vstack([C.real, C.imag]))


def numeric_rank(A, tol: float = 1e-8):
    """(rank, gap ratio) with singular values above tol * sigma_max counted."""
    A = np.asarray(A)
    if A.size == 0:
        return 0, math.inf
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0, math.inf
    r = int(np.sum(s > tol * s[0]))
    above = s[r - 1] if r else s[0]
    below = s[r] if r < len(s) else 0.0
    gap = math.inf if below == 0 else above / below
    return r, gap


def _report(rank, unknowns, closed, minimal, gap) -> DefectReport:
    d = unknowns - rank
    return DefectReport(rank, d, closed, None if closed is None else d == closed,
                        d == minimal, float(gap), gap < 1e3, d - minimal)


def defect_numeric(H, tol: float = 1e-8, closed_form: int | None = None) -> DefectReport:
    H = as_complex(H)
    if H.shape[0] != H.shape[1]:
        raise ValidationError("square matrix expected; use phm_defect for partial matrices")
    if not is_hadamard(H):
        raise ValidationError("matrix is not Hadamard")
    N = H.shape[0]
    r, gap = numeric_rank(tangent_system(H).rows, tol)
    return _report(r, N * N, closed_form, 2 * N - 1, gap)


def defect(H, tol: float = 1e-8) -> int:
    return defect_numeric(H, tol).defect


# ---------------------------------------------------------------------------
# closed forms

def _group(G) -> FiniteAbelianGroup:
    if isinstance(G, FiniteAbelianGroup):
        return G
    if isinstance(G, int):
        return FiniteAbelianGroup((G,))
    return FiniteAbelianGroup(tuple(G))


def defect_fourier_orders(G) -> int:
    """sum over g of |G| / ord(g)."""
    G = _group(G)
    return sum(G.size // G.order_of(g) for g in G.elements())


def defect_cyclic_closed(N: int) -> Fraction:
    """N prod (1 + a_i - a_i/p_i) over N = prod p_i^{a_i}."""
    out = Fraction(N)
    for p in prime_factors(N):
        a = 0
        n = N
        while n % p == 0:
            n //= p
            a += 1
        out *= 1 + a - Fraction(a, p)
    return out


def _qint(n: int, q: int) -> int:
    return n if q == 1 else (q ** n - 1) // (q - 1)


def _isotypic_delta(p: int, exps) -> Fraction:
    a = [0] + sorted(exps)
    r = len(exps)
    total = Fraction(1)
    for k in range(1, r + 1):
        e = (r - k) * a[k - 1] + sum(a[1:k]) - 1
        total += Fraction(p) ** e * (p ** (r - k + 1) - 1) * _qint(a[k] - a[k - 1], p ** (r - k))
    return total


def p_parts(G) -> dict:
    """Isotypic decomposition {p: [a_1, ..., a_r]} from the cycle orders."""
    G = _group(G)
    parts = {}
    for n in G.orders:
        for p in prime_factors(n):
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            parts.setdefault(p, []).append(a)
    return parts


def defect_isotypic_closed(G) -> Fraction:
    G = _group(G)
    out = Fraction(G.size)
    for p, exps in p_parts(G).items():
        out *= _isotypic_delta(p, exps)
    return out


def defect_fourier_closed(G) -> int:
    """d(F_G), with the three closed forms and the count of 1 entries of F_G
    asserted equal."""
    G = _group(G)
    d1 = defect_fourier_orders(G)
    d2 = defect_isotypic_closed(G)
    d3 = int(np.sum(fourier(G).exponents == 0))
    vals = {Fraction(d1), d2, Fraction(d3)}
    if len(G.orders) == 1:
        vals.add(defect_cyclic_closed(G.size))
    if len(vals) != 1:
        raise AssertionError(f"closed forms disagree for {G}: {vals}")
    return d1


def defect_real_closed(N: int) -> int:
    return N * (N + 1) // 2


def defect_real_phm_closed(M: int, N: int) -> int:
    """Real M x N partial Hadamard: E = (X Y) with X symmetric M x M and Y
    arbitrary M x (N-M), so d = M(M+1)/2 + M(N-M)."""
    return M * (M + 1) // 2 + M * (N - M)


# ---------------------------------------------------------------------------
# exact rank for levels 2, 3, 4, 6

def _basis_table(l: int) -> list[tuple[int, int]]:
    """Coordinates of w_l^k in the Z-basis (1, u), u = i (l = 4) or
    u = e^{2 pi i/3} (l = 3, 6); u is non-real so the coordinates of a real
    combination must vanish separately."""
    if l == 2:
        return [(1, 0), (-1, 0)]
    if l == 4:
        return [(1, 0), (0, 1), (-1, 0), (0, -1)]
    if l == 3:
        return [(1, 0), (0, 1), (-1, -1)]
    if l == 6:
        return [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]
    raise ValidationError("exact defect supports levels 2, 3, 4, 6")


def integer_rank(rows) -> int:
    """Exact rank over Q by fraction-free elimination on Python integers."""
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return 0
    ncol = len(A[0])
    rank = 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        p = A[rank]
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f, g = A[i][c], p[c]
                row = [g * x - f * y for x, y in zip(A[i], p)]
                h = 0
                for x in row:
                    h = math.gcd(h, x)
                A[i] = [x // h for x in row] if h > 1 else row
        rank += 1
        if rank == len(A):
            break
    return rank


def defect_rational(B: ButsonMatrix) -> int:
    l = B.level
    table = _basis_table(l)
    E = B.exponents
    N = E.shape[0]
    if E.shape != (N, N):
        raise ValidationError("square Butson matrix expected")
    rows = []
    for i, j in combinations(range(N), 2):
        for coord in (0, 1):
            r = [0] * (N * N)
            for k in range(N):
                v = table[(E[i, k] - E[j, k]) % l][coord]
                r[i * N + k] += v
                r[j * N + k] -= v
            rows.append(r)
    return N * N - integer_rank(rows)


# ---------------------------------------------------------------------------
# products, partial matrices, truncated Fourier

def tensor_defect_check(H, K, tol: float = 1e-8) -> bool:
    """d(H x K) >= d(H) d(K)."""
    L = np.kron(as_complex(H), as_complex(K))
    return defect(L, tol) >= defect(H, tol) * defect(K, tol)


def unitary_completion(H) -> np.ndarray:
    """K in sqrt(N) U_N whose first M rows are H (QR on [H; random])."""
    H = as_complex(H)
    M, N = H.shape
    rng = np.random.default_rng(0)
    X = np.vstack([H, rng.standard_normal((N - M, N))])
    if np.isrealobj(H) or np.max(np.abs(H.imag)) == 0:
        X = X.real
    Q, R = np.linalg.qr(X.conj().T)
    Q = Q * (np.diagonal(R) / np.abs(np.diagonal(R)))[None, :]
    K = math.sqrt(N) * Q.conj().T
    K[:M] = H.real if np.isrealobj(K) else H
    return K


def phm_defect(H, K=None, tol: float = 1e-8) -> DefectReport:
    """Defect of an M x N partial Hadamard matrix from the rectangular
    tangent system, cross-checked against the completion parametrization
    E = (X Y), X hermitian, Im[(E K)_ij conj(H_ij)] = 0."""
    H = as_complex(H)
    M, N = H.shape
    if not rows_orthogonal(H):
        raise ValidationError("rows are not orthogonal")
    r, gap = numeric_rank(tangent_system(H).rows, tol)
    d = M * N - r
    if M < N:
        K = unitary_completion(H) if K is None else as_complex(K)
        d_alt = _phm_defect_completion(H, K, tol)
        if d_alt != d:
            raise AssertionError(f"completion route gives {d_alt}, direct system gives {d}")
    closed = None
    if np.max(np.abs(H.imag)) == 0 and np.all(np.abs(H.real) == 1):
        closed = defect_real_phm_closed(M, N)
    return _report(r, M * N, closed, M + N - 1, gap)


def _phm_defect_completion(H, K, tol) -> int:
    M, N = H.shape
    # real parameters: X hermitian (M^2), Y complex (2 M (N - M))
    basis = []
    for a in range(M):
        X = np.zeros((M, N), complex)
        X[a, a] = 1
        basis.append(X)
        for b in range(a + 1, M):
            X = np.zeros((M, N), complex)
            X[a, b], X[b, a] = 1, 1
            basis.append(X)
            X = np.zeros((M, N), complex)
            X[a, b], X[b, a] = 1j, -1j
            basis.append(X)
    for a in range(M):
        for b in range(M, N):
            for z in (1, 1j):
                X = np.zeros((M, N), complex)
                X[a, b] = z
                basis.append(X)
    cols = [np.imag((E @ K) * np.conj(H)).ravel() for E in basis]
    r, _ = numeric_rank(np.array(cols).T, tol)
    return len(basis) - r


def _elements(S):
    return [(s,) if isinstance(s, (int, np.integer)) else tuple(s) for s in S]


def truncated_fourier(S, G) -> np.ndarray:
    """Rows of F_G indexed by S."""
    G = _group(G)
    F = fourier(G).to_complex()
    return F[[G.index(s) for s in _elements(S)]]


def truncated_fourier_defect(S, G, tol: float = 1e-8) -> dict:
    """Defect of F_{S,G} via P = A F_G^t with P_{i,i-j} = P_{j,i-j} (i, j in S),
    split as dim ker(A -> P) + dim of the image of the tangent space."""
    G = _group(G)
    S = _elements(S)
    M, N = len(S), G.size
    F = fourier(G).to_complex()
    idx = {g: G.index(g) for g in G.elements()}
    diffs = sorted({idx[G.add(a, G.neg(b))] for a in S for b in S})
    # Phi(A) = columns D of A F^t, as a real linear map on M*N unknowns
    Phi = np.zeros((M, len(diffs), M, N), complex)
    for i in range(M):
        for c, g in enumerate(diffs):
            Phi[i, c, i, :] = F[g, :]
    Phi = Phi.reshape(M * len(diffs), M * N)
    cons = []
    pos = {g: c for c, g in enumerate(diffs)}
    for a in range(M):
        for b in range(a + 1, M):
            c = pos[idx[G.add(S[a], G.neg(S[b]))]]
            cons.append(Phi[a * len(diffs) + c] - Phi[b * len(diffs) + c])
    cons = np.array(cons).reshape(-1, M * N) if cons else np.zeros((0, M * N))
    Rc = np.vstack([cons.real, cons.imag])
    rT, _ = numeric_rank(Rc, tol)
    dT = M * N - rT
    Rk = np.vstack([Phi.real, Phi.imag])
    rK, _ = numeric_rank(Rk, tol)
    dK = M * N - rK
    # image of the tangent space: rank of Phi on a basis of T
    if dT:
        _, s, Vt = np.linalg.svd(Rc) if Rc.size else (None, np.zeros(0), np.eye(M * N))
        Tb = Vt[rT:].T
        rI, _ = numeric_rank(np.vstack([(Phi @ Tb).real, (Phi @ Tb).imag]), tol)
    else:
        rI = 0
    direct = phm_defect(truncated_fourier(S, G), tol=tol).defect
    return {"M": M, "N": N, "defect": dT, "dim_K": dK, "dim_I": rI,
            "direct": direct, "agree": dT == dK + rI == direct,
            "isolated_hint": dT == M + N - 1}


# ---------------------------------------------------------------------------
# master matrices

def master_defect(spec: MasterSpec, tol: float = 1e-8) -> DefectReport:
    """dim_R {B in M_N(C) : conj(B) = B L / N, (B R)_{i,ij} = (B R)_{j,ij}}
    with L_ij = f(1/(lambda_i lambda_j)) and R_{i,jk} = f(lambda_j/(lambda_i lambda_k)).
    Powers of products of lambdas use the matching sum of angles."""
    t = spec.angles
    n = np.asarray(spec.exponents, float)
    N = len(n)

    def f(theta):
        return np.exp(1j * theta[..., None] * n).sum(axis=-1)

    L = f(-t[:, None] - t[None, :])
    R = f(t[None, :, None] - t[:, None, None] - t[None, None, :]).reshape(N, N * N)
    # one column per real unknown (Re B_ab, Im B_ab); both conditions are real-linear
    blocks = []
    for part in ("re", "im"):
        for a in range(N):
            for b in range(N):
                B = np.zeros((N, N), complex)
                B[a, b] = 1 if part == "re" else 1j
                r1 = (np.conj(B) - B @ L / N).ravel()
                BR = B @ R
                r2 = np.array([BR[i, i * N + j] - BR[j, i * N + j] for i in range(N) for j in range(N)])
                blocks.append(np.concatenate([r1, r2]))
    C = np.array(blocks).T
    A = np.vstack([C.real, C.imag])
    r, gap = numeric_rank(A, tol)
    return _report(r, 2 * N * N, None, 2 * N - 1, gap)


# ---------------------------------------------------------------------------
# Nicoara-White deformations

def nicoara_white_generators(G, g, h) -> np.ndarray:
    """B_pq = 1 when p = g + k h, q = g + (k+1) h for some k >= 0."""
    G = _group(G)
    g = (g,) if isinstance(g, int) else tuple(g)
    h = (h,) if isinstance(h, int) else tuple(h)
    B = np.zeros((G.size, G.size))
    p = g
    for _ in range(G.size):
        q = G.add(p, h)
        B[G.index(p), G.index(q)] = 1
        p = q
    return B


def is_partial_isometry(B, tol: float = 1e-12) -> bool:
    B = np.asarray(B)
    return bool(np.max(np.abs(B @ B.T @ B - B)) <= tol)


def deformation_check(G, g, h, t: float, tol: float = 1e-8) -> dict:
    """Whether e^{it(B + B^t)} F_G and e^{t(B - B^t)} F_G are Hadamard."""
    G = _group(G)
    B = nicoara_white_generators(G, g, h)
    F = fourier(G).to_complex()
    U1 = expm(1j * t * (B + B.T)) @ F
    U2 = expm(t * (B - B.T)) @ F
    return {"symmetric": is_hadamard(U1, tol), "antisymmetric": is_hadamard(U2, tol),
            "partial_isometry": is_partial_isometry(B)}
