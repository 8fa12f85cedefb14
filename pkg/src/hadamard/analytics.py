"""Determinant, p-norm and excess invariants, bistochastic forms, and the
Haar average of the 1-norm on O_N."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import TOL_GRAM, ValidationError, as_complex, verify_hadamard


@dataclass(frozen=True)
class NormReport:
    p: float
    value: float
    bound: float
    extremal: bool

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ExcessReport:
    excess: complex
    modulus: float
    bound: float
    bistochastic: bool
    row_sums: tuple
    col_sums: tuple

    def as_dict(self):
        return {
            "excess": [self.excess.real, self.excess.imag],
            "modulus": self.modulus,
            "bound": self.bound,
            "bistochastic": self.bistochastic,
        }


def det_report(H, tol: float = 1e-9) -> dict:
    """|det H| against the bound N^{N/2} (equality iff H is Hadamard)."""
    H = as_complex(H)
    N = H.shape[0]
    d = abs(np.linalg.det(H))
    bound = N ** (N / 2)
    return {"abs_det": float(d), "bound": float(bound), "extremal": bool(abs(d - bound) <= tol * bound)}


def p_norm(U, p) -> float:
    a = np.abs(np.asarray(U))
    if p == np.inf:
        return float(a.max())
    return float((a ** p).sum() ** (1 / p))


def p_norm_report(U, p, tol: float = 1e-9) -> NormReport:
    """||U||_p against N^{2/p - 1/2}: an upper bound for p < 2, a lower bound
    for p > 2, attained by rescaled Hadamard matrices."""
    U = np.asarray(U)
    N = U.shape[0]
    bound = N ** (-0.5) if p == np.inf else N ** (2 / p - 0.5)
    v = p_norm(U, p)
    return NormReport(float(p), v, float(bound), bool(abs(v - bound) <= tol * bound))


def excess_report(H, tol: float = 1e-9) -> ExcessReport:
    H = as_complex(H)
    N = H.shape[0]
    E = complex(H.sum())
    ok, _ = bistochastic_check(H, tol)
    return ExcessReport(E, abs(E), N * math.sqrt(N), ok,
                        tuple(H.sum(axis=1)), tuple(H.sum(axis=0)))


def bistochastic_check(H, tol: float = 1e-9):
    """(is_bistochastic, lambda): all row and column sums equal lambda."""
    H = as_complex(H)
    r, c = H.sum(axis=1), H.sum(axis=0)
    lam = complex(r[0])
    ok = np.max(np.abs(r - lam)) <= tol * H.shape[0] and np.max(np.abs(c - lam)) <= tol * H.shape[0]
    return bool(ok), lam


def row_stochastic_promote(H, tol: float = 1e-9) -> bool:
    """For a Hadamard H with constant row sums lambda, |lambda|^2 = N forces
    constant column sums: H^* 1 = H^* H 1 / lambda = N 1 / lambda."""
    H = as_complex(H)
    N = H.shape[0]
    r = H.sum(axis=1)
    lam = r[0]
    if np.max(np.abs(r - lam)) > tol * N or abs(abs(lam) ** 2 - N) > tol * N:
        raise ValidationError("matrix is not row-stochastic with |lambda|^2 = N")
    return bistochastic_check(H, tol)[0]


def almost_bistochastic(H, tol: float = 1e-9) -> bool:
    """All row sums lie on sqrt(N) T."""
    H = as_complex(H)
    return bool(np.max(np.abs(np.abs(H.sum(axis=1)) - math.sqrt(H.shape[0]))) <= tol * H.shape[0])


def bistochastic_search(H, iters: int = 500, restarts: int = 20, seed=0, tol: float = 1e-6) -> dict:
    """Maximize |sum_ij a_i b_j H_ij| over phase vectors by alternating
    updates a_i = phase of conj((H b)_i), b_j = phase of conj((a H)_j).
    Each step cannot decrease |E|; the optimum N sqrt N means the rescaled
    matrix diag(a) H diag(b) is bistochastic."""
    H = as_complex(H)
    N = H.shape[0]
    target = N * math.sqrt(N)
    rng = np.random.default_rng(seed)

    def unit(z):
        m = np.abs(z)
        return np.where(m > 1e-300, z / np.where(m > 0, m, 1), 1.0)

    best = (-1.0, None, None)
    for _ in range(restarts):
        b = np.exp(2j * np.pi * rng.random(N))
        a = np.ones(N, complex)
        val = 0.0
        for _ in range(iters):
            a = np.conj(unit(H @ b))
            b = np.conj(unit(a @ H))
            val = abs(a @ H @ b)
            if target - val <= tol:
                break
        if val > best[0]:
            best = (val, a, b)
        if target - best[0] <= tol:
            break
    val, a, b = best
    return {"a": a, "b": b, "excess": float(val), "target": target, "success": bool(target - val <= tol)}


def dita_bistochastic_form(N: int, Q) -> np.ndarray:
    """(w^{ij+ab} / w^{bj+j}) Q_ib / Q_{b+1,b}, an almost bistochastic matrix
    equivalent to the right deformation F_N x_Q F_N."""
    Q = as_complex(Q)
    if Q.shape != (N, N):
        raise ValidationError("Q must be N x N")
    i = np.arange(N)
    I, A, J, B = np.meshgrid(i, i, i, i, indexing="ij")
    expo = (I * J + A * B - B * J - J) % N
    w = np.exp(2j * np.pi / N)
    M = w ** expo * Q[I, B] / Q[(B + 1) % N, B]
    return M.reshape(N * N, N * N)


# ---------------------------------------------------------------------------
# Haar measure on O_N

def haar_orthogonal(N: int, rng, size: int | None = None) -> np.ndarray:
    """Haar orthogonal matrices by QR of a Gaussian matrix with the signs of
    diag(R) absorbed into Q."""
    shape = (N, N) if size is None else (size, N, N)
    Z = rng.standard_normal(shape)
    Qm, R = np.linalg.qr(Z)
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    d = np.where(d == 0, 1.0, d)
    return Qm * d[..., None, :]


def haar_unitary(N: int, rng, size: int | None = None) -> np.ndarray:
    shape = (N, N) if size is None else (size, N, N)
    Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    Qm, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    d = d / np.abs(d)
    return Qm * d[..., None, :]


def sphere_abs_moment(N: int) -> float:
    """I = integral over S^{N-1} of |x_1|."""
    if N < 2:
        raise ValidationError("N >= 2")
    M = N // 2
    if N % 2 == 0:
        return 4 ** M / (math.pi * M) / math.comb(2 * M, M)
    return math.comb(2 * M, M) / 4 ** M


def haar_onenorm_exact(N: int) -> float:
    return N * N * sphere_abs_moment(N)


def haar_onenorm_average(N: int, samples: int = 100_000, seed=0, batch: int = 20_000) -> dict:
    """MC estimate of the mean of ||U||_1 over Haar O_N, with the exact value
    and the large-N asymptotic sqrt(2/pi) N sqrt(N)."""
    rng = np.random.default_rng(seed)
    s1 = s2 = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        v = np.abs(haar_orthogonal(N, rng, m)).sum(axis=(1, 2))
        s1 += math.fsum(v)
        s2 += math.fsum(v * v)
        done += m
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return {
        "N": N,
        "samples": samples,
        "mean": mean,
        "stderr": math.sqrt(var / samples),
        "exact": haar_onenorm_exact(N),
        "asymptotic": math.sqrt(2 / math.pi) * N * math.sqrt(N),
    }
