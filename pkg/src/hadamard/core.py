"""Matrix carriers, the Hadamard equivalence relation, tensor and Dita products,
and verification (floating and exact cyclotomic).

Conventions: indices are 0-based, double indices (i, a) are flattened
lexicographically as i*N + a, which is the np.kron order.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

TOL_ENTRY = 1e-9
TOL_GRAM = 1e-8


class ValidationError(ValueError):
    """Input violates a mathematical precondition (not a bug)."""


class DimensionError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# carriers

@dataclass(frozen=True)
class ButsonMatrix:
    """Exponent matrix over Z_l; entry k stands for exp(2 pi i k / l)."""
    exponents: np.ndarray
    level: int

    def __post_init__(self):
        if self.level < 2:
            raise ValidationError("level must be >= 2")
        e = np.array(self.exponents, dtype=np.int64) % self.level
        if e.ndim != 2:
            raise DimensionError("exponent array must be 2-dimensional")
        e.setflags(write=False)
        object.__setattr__(self, "exponents", e)

    @property
    def shape(self):
        return self.exponents.shape

    def to_complex(self) -> np.ndarray:
        return root_table(self.level)[self.exponents]

    @classmethod
    def from_complex(cls, H, level: int, tol: float = 1e-9) -> "ButsonMatrix":
        """Round phases to the nearest l-th root; error if any entry is off by more than tol."""
        H = np.asarray(H, dtype=complex)
        k = np.rint(np.angle(H) * level / (2 * np.pi)).astype(np.int64) % level
        if np.max(np.abs(root_table(level)[k] - H), initial=0.0) > tol:
            raise ValidationError(f"entries are not {level}-th roots of unity")
        return cls(k, level)


@lru_cache(maxsize=None)
def root_table(l: int) -> np.ndarray:
    """exp(2 pi i k/l) with exact values at the quarter points."""
    t = np.exp(2j * np.pi * np.arange(l) / l)
    for k in range(l):
        if (4 * k) % l == 0:
            t[k] = [1, 1j, -1, -1j][(4 * k) // l]
    t.setflags(write=False)
    return t


def as_complex(H) -> np.ndarray:
    if isinstance(H, ButsonMatrix):
        return H.to_complex()
    H = np.asarray(H)
    if H.ndim != 2:
        raise DimensionError("matrix must be 2-dimensional")
    return H.astype(complex)


def is_unimodular(H, tol: float = TOL_ENTRY) -> bool:
    return bool(np.all(np.abs(np.abs(as_complex(H)) - 1) <= tol))


@dataclass(frozen=True)
class EquivalenceMove:
    """K[i, j] = row_phases[i] * H[row_perm[i], col_perm[j]] * col_phases[j]."""
    row_perm: np.ndarray
    col_perm: np.ndarray
    row_phases: np.ndarray
    col_phases: np.ndarray

    @staticmethod
    def identity(M: int, N: int | None = None) -> "EquivalenceMove":
        N = M if N is None else N
        return EquivalenceMove(np.arange(M), np.arange(N), np.ones(M, complex), np.ones(N, complex))

    def apply(self, H) -> np.ndarray:
        H = as_complex(H)
        return self.row_phases[:, None] * H[np.ix_(self.row_perm, self.col_perm)] * self.col_phases[None, :]

    def inverse(self) -> "EquivalenceMove":
        ri = np.argsort(self.row_perm)
        ci = np.argsort(self.col_perm)
        return EquivalenceMove(ri, ci, np.conj(self.row_phases[ri]), np.conj(self.col_phases[ci]))


def random_move(M: int, N: int, rng, phases: str | int = "circle") -> EquivalenceMove:
    """Random move; phases='circle' draws from T, an integer l draws l-th roots."""
    def ph(n):
        if phases == "circle":
            return np.exp(2j * np.pi * rng.random(n))
        return root_table(int(phases))[rng.integers(0, int(phases), n)]
    return EquivalenceMove(rng.permutation(M), rng.permutation(N), ph(M), ph(N))


@dataclass(frozen=True)
class GramReport:
    max_row_gram_error: float
    max_col_gram_error: float
    max_modulus_error: float
    is_hadamard: bool
    tol: float = TOL_GRAM
    N: int = 0

    def as_dict(self):
        return {
            "N": self.N,
            "is_hadamard": self.is_hadamard,
            "max_row_gram_error": self.max_row_gram_error,
            "max_col_gram_error": self.max_col_gram_error,
            "max_modulus_error": self.max_modulus_error,
            "tol": self.tol,
        }


# ---------------------------------------------------------------------------
# verification

def _offdiag_max(G: np.ndarray) -> float:
    G = G - np.diag(np.diag(G))
    return float(np.max(np.abs(G))) if G.size else 0.0


def verify_hadamard(H, tol: float = TOL_GRAM) -> GramReport:
    """Unimodular entries and pairwise orthogonal rows, |<H_i,H_j>| <= tol*N."""
    H = as_complex(H)
    M, N = H.shape
    if M != N:
        raise DimensionError(f"Hadamard verification needs a square matrix, got {M}x{N}")
    row = _offdiag_max(H @ H.conj().T)
    col = _offdiag_max(H.conj().T @ H)
    mod = float(np.max(np.abs(np.abs(H) - 1))) if H.size else 0.0
    ok = row <= tol * N and mod <= TOL_ENTRY
    return GramReport(row, col, mod, bool(ok), tol, N)


def is_hadamard(H, tol: float = TOL_GRAM) -> bool:
    H = as_complex(H)
    if H.shape[0] != H.shape[1]:
        return False
    return verify_hadamard(H, tol).is_hadamard


def rows_orthogonal(H, tol: float = TOL_GRAM) -> bool:
    """Partial (rectangular) version: unimodular entries, orthogonal rows."""
    H = as_complex(H)
    N = H.shape[1]
    return _offdiag_max(H @ H.conj().T) <= tol * N and bool(np.all(np.abs(np.abs(H) - 1) <= TOL_ENTRY))


# ---------------------------------------------------------------------------
# exact cyclotomic arithmetic (integer coefficient lists, lowest degree first)

def _poly_divmod(a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial b."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [0], a
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            q[k - db] = c
            for t in range(db + 1):
                a[k - db + t] -= c * b[t]
    r = a[:db] if db > 0 else [0]
    return q, r


@lru_cache(maxsize=None)
def cyclotomic(l: int) -> tuple[int, ...]:
    """Coefficients of the l-th cyclotomic polynomial, by dividing x^l - 1
    by the cyclotomic factors of the proper divisors."""
    num = [-1] + [0] * (l - 1) + [1]
    for d in range(1, l):
        if l % d == 0:
            num, r = _poly_divmod(num, list(cyclotomic(d)))
            assert not any(r)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def cyclotomic_reduce(counts: Sequence[int], l: int) -> list[int]:
    """Remainder of sum_k counts[k] x^k modulo Phi_l."""
    counts = [int(c) for c in counts]
    _, r = _poly_divmod(counts, list(cyclotomic(l)))
    return r


def vanishes_exact(counts: Sequence[int], l: int) -> bool:
    """Exact test: sum_k counts[k] w^k = 0 with w = exp(2 pi i / l)."""
    if len(counts) != l:
        raise DimensionError("need one count per l-th root")
    return not any(cyclotomic_reduce(counts, l))


def exponent_counts(exps, l: int) -> np.ndarray:
    return np.bincount(np.asarray(exps, dtype=np.int64).ravel() % l, minlength=l)


def verify_butson_exact(B: ButsonMatrix) -> bool:
    """Row orthogonality decided in Z[x]/Phi_l, no floating point."""
    E = B.exponents
    M, N = E.shape
    if M != N:
        raise DimensionError("Butson verification needs a square matrix")
    return butson_rows_orthogonal(B)


def butson_rows_orthogonal(B: ButsonMatrix) -> bool:
    E, l = B.exponents, B.level
    for i in range(E.shape[0]):
        for j in range(i + 1, E.shape[0]):
            if not vanishes_exact(exponent_counts(E[i] - E[j], l), l):
                return False
    return True


# ---------------------------------------------------------------------------
# equivalence

def dephase(H) -> tuple[np.ndarray, EquivalenceMove]:
    """Phase-only move making the first row and column all ones."""
    H = as_complex(H)
    M, N = H.shape
    r = np.conj(H[:, 0]) / np.abs(H[:, 0])
    c = np.conj(r[0] * H[0, :]) / np.abs(H[0, :])
    c[0] = 1.0
    move = EquivalenceMove(np.arange(M), np.arange(N), r, c)
    K = move.apply(H)
    K[:, 0] = 1.0
    K[0, :] = 1.0
    return K, move


def is_dephased(H, tol: float = TOL_ENTRY) -> bool:
    H = as_complex(H)
    return bool(np.all(np.abs(H[0] - 1) <= tol) and np.all(np.abs(H[:, 0] - 1) <= tol))


# ---------------------------------------------------------------------------
# products

def tensor(H, K, check: bool = True) -> np.ndarray:
    """(H x K)_{ia,jb} = H_ij K_ab in lexicographic double-index order."""
    H, K = as_complex(H), as_complex(K)
    if check:
        for name, X in (("H", H), ("K", K)):
            if X.shape[0] != X.shape[1] or not is_hadamard(X):
                raise ValidationError(f"tensor factor {name} is not Hadamard")
    return np.kron(H, K)


def dita_deform(H, K, Q, side: str = "right", check: bool = True) -> np.ndarray:
    """Right: Q_ib H_ij K_ab.  Left: Q_ja H_ij K_ab.  Q is M x N."""
    H, K, Q = as_complex(H), as_complex(K), as_complex(Q)
    M, N = H.shape[0], K.shape[0]
    if H.shape != (M, M) or K.shape != (N, N) or Q.shape != (M, N):
        raise DimensionError(f"need H MxM, K NxN, Q MxN; got {H.shape}, {K.shape}, {Q.shape}")
    if check:
        if not is_unimodular(Q):
            raise ValidationError("Q must be unimodular")
        if not (is_hadamard(H) and is_hadamard(K)):
            raise ValidationError("Dita factors must be Hadamard")
    if side == "right":
        L = np.einsum("ib,ij,ab->iajb", Q, H, K)
    elif side == "left":
        L = np.einsum("ja,ij,ab->iajb", Q, H, K)
    else:
        raise ValidationError("side must be 'left' or 'right'")
    return L.reshape(M * N, M * N)


# ---------------------------------------------------------------------------
# fingerprint

def quadruple_products(H) -> np.ndarray:
    """All H_ij H_kl conj(H_il) conj(H_kj), flattened."""
    H = as_complex(H)
    Hc = H.conj()
    # indices i, j, k, l
    T = np.einsum("ij,kl,il,kj->ijkl", H, H, Hc, Hc, optimize=True)
    return T.ravel()


def fingerprint(H, digits: int = 9) -> str:
    """Equivalence-invariant digest of the quadruple-product multiset.

    Different fingerprints prove inequivalence; equal fingerprints do not
    prove equivalence.
    """
    H = as_complex(H)
    v = quadruple_products(H)
    re = np.round(v.real, digits) + 0.0
    im = np.round(v.imag, digits) + 0.0
    order = np.lexsort((im, re))
    data = np.stack([re[order], im[order]]).tobytes()
    return f"N{H.shape[0]}:" + hashlib.sha256(data).hexdigest()[:32]


def equivalent_screen(H, K, digits: int = 9) -> bool:
    return fingerprint(H, digits) == fingerprint(K, digits)


# ---------------------------------------------------------------------------
# text formats

def format_matrix(H) -> str:
    out = io.StringIO()
    if isinstance(H, ButsonMatrix):
        M, N = H.shape
        out.write(f"butson {M} {N} {H.level}\n")
        for row in H.exponents:
            out.write(" ".join(str(int(x)) for x in row) + "\n")
        return out.getvalue()
    H = as_complex(H)
    M, N = H.shape
    out.write(f"complex {M} {N}\n")
    for row in H:
        out.write(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) + "\n")
    return out.getvalue()


def parse_matrix(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValidationError("empty matrix file")
    head = lines[0].split()
    kind = head[0].lower()
    try:
        M, N = int(head[1]), int(head[2])
    except (IndexError, ValueError):
        raise ValidationError(f"bad header: {lines[0]!r}")
    body = lines[1:]
    if len(body) != M:
        raise ValidationError(f"expected {M} rows, found {len(body)}")
    if kind == "butson":
        l = int(head[3])
        E = np.array([[int(x) for x in ln.split()] for ln in body], dtype=np.int64)
        if E.shape != (M, N):
            raise ValidationError("row length mismatch")
        if np.any(E < 0) or np.any(E >= l):
            raise ValidationError(f"exponents must lie in [0, {l})")
        return ButsonMatrix(E, l)
    if kind == "complex":
        H = np.empty((M, N), complex)
        for i, ln in enumerate(body):
            toks = ln.split()
            if len(toks) != N:
                raise ValidationError(f"row {i}: expected {N} entries")
            for j, t in enumerate(toks):
                re, im = t.split(",")
                H[i, j] = complex(float(re), float(im))
        return H
    raise ValidationError(f"unknown matrix kind {kind!r}")


def write_matrix(path, H) -> None:
    with open(path, "w") as f:
        f.write(format_matrix(H))


def read_matrix(path):
    with open(path) as f:
        return parse_matrix(f.read())
