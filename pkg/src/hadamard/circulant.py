"""Circulant Hadamard matrices: Fourier diagonalization, cyclic roots, the
circulant symmetric form of F_N, Backelin roots, and the 4-norm functional
Phi on eigenvalue vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ValidationError, as_complex, is_hadamard

TOL_ROOT = 1e-9


def dft_matrix(N: int) -> np.ndarray:
    """F_ij = w^{ij} / sqrt N, w = e^{2 pi i / N}."""
    i = np.arange(N)
    return np.exp(2j * np.pi * np.outer(i, i) / N) / math.sqrt(N)


@dataclass(frozen=True)
class CirculantSpec:
    """H_ij = gamma_{j-i}, indices mod N."""
    gamma: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(complex(g) for g in np.ravel(self.gamma)))

    @property
    def N(self) -> int:
        return len(self.gamma)

    def matrix(self) -> np.ndarray:
        g = np.array(self.gamma)
        i = np.arange(self.N)
        return g[(i[None, :] - i[:, None]) % self.N]

    @classmethod
    def from_matrix(cls, H, tol: float = 1e-9) -> "CirculantSpec":
        H = as_complex(H)
        spec = cls(H[0])
        if H.shape[0] != H.shape[1] or np.max(np.abs(spec.matrix() - H)) > tol:
            raise ValidationError("matrix is not circulant")
        return spec

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        g = np.array(self.gamma)
        return bool(np.max(np.abs(g - g[(-np.arange(self.N)) % self.N])) <= tol)


def is_circulant(H, tol: float = 1e-9) -> bool:
    try:
        CirculantSpec.from_matrix(H, tol)
        return True
    except ValidationError:
        return False


def fourier_diagonalize(C) -> np.ndarray:
    """q with C = F diag(q) F^*; q_j = sum_r w^{jr} gamma_r."""
    if not isinstance(C, CirculantSpec):
        C = CirculantSpec.from_matrix(C)
    g = np.array(C.gamma)
    return math.sqrt(C.N) * (dft_matrix(C.N) @ g)


def from_eigenvalues(q) -> CirculantSpec:
    """The circulant F diag(q) F^*, first row gamma = F q / sqrt N conjugated
    index-wise: gamma_r = (1/N) sum_k w^{-rk} q_k."""
    q = np.asarray(q, complex)
    N = len(q)
    return CirculantSpec(np.conj(dft_matrix(N)) @ q / math.sqrt(N))


def diagonalization_report(C, tol: float = 1e-10) -> dict:
    """Reconstruction error, unitarity (q on the torus) and reality
    (conj q_i = q_{-i}) of a circulant."""
    if not isinstance(C, CirculantSpec):
        C = CirculantSpec.from_matrix(C)
    q = fourier_diagonalize(C)
    F = dft_matrix(C.N)
    err = float(np.max(np.abs(F @ np.diag(q) @ np.conj(F).T - C.matrix())))
    neg = q[(-np.arange(C.N)) % C.N]
    return {
        "q": q,
        "error": err,
        "unitary": bool(np.max(np.abs(np.abs(q) - 1)) <= 1e-9),
        "real": bool(np.max(np.abs(np.conj(q) - neg)) <= 1e-9),
        "ok": err <= tol * max(1.0, float(np.max(np.abs(q)))),
    }


# ---------------------------------------------------------------------------
# cyclic roots

@dataclass
class CyclicRoot:
    z: tuple
    residuals: list = field(default_factory=list)

    def __post_init__(self):
        self.z = tuple(complex(v) for v in np.ravel(self.z))
        if not self.residuals:
            self.residuals = cyclic_root_residuals(self.z)

    @property
    def valid(self) -> bool:
        return all(r <= TOL_ROOT for r in self.residuals)


def cyclic_root_residuals(z) -> list:
    """|sum_i z_i z_{i+1} ... z_{i+K-1}| for K = 1..N-1, then the distance of
    prod z_i to 1 computed from sums of logs."""
    z = np.asarray(z, complex)
    N = len(z)
    out = []
    run = np.ones(N, complex)
    for K in range(1, N):
        run = run * np.roll(z, -(K - 1))
        out.append(float(abs(run.sum())))
    if np.any(np.abs(z) == 0):
        out.append(math.inf)
        return out
    logmod = float(np.sum(np.log(np.abs(z))))
    ang = float(np.sum(np.angle(z)))
    ang = (ang + math.pi) % (2 * math.pi) - math.pi
    out.append(abs(logmod) + abs(ang))
    return out


def cyclic_root_check(z) -> bool:
    if not isinstance(z, CyclicRoot):
        z = CyclicRoot(z)
    return z.valid


def circulant_from_root(z) -> CirculantSpec:
    """gamma = (z_0, z_0 z_1, ..., z_0 ... z_{N-1})."""
    if isinstance(z, CyclicRoot):
        z = z.z
    return CirculantSpec(np.cumprod(np.asarray(z, complex)))


def root_from_circulant(C) -> CyclicRoot:
    """z_i = gamma_i / gamma_{i-1}."""
    if not isinstance(C, CirculantSpec):
        C = CirculantSpec.from_matrix(C)
    g = np.array(C.gamma)
    return CyclicRoot(g / np.roll(g, 1))


def fourier_root(N: int) -> CyclicRoot:
    """(q, qw, ..., qw^{N-1}) with nu = e^{pi i/N}, q = nu^{N-1}, w = nu^2."""
    nu = np.exp(1j * np.pi / N)
    return CyclicRoot(nu ** (N - 1) * nu ** (2 * np.arange(N)))


def fourier_circulant_form(N: int) -> CirculantSpec:
    """F'_N: gamma_k = nu^{(N+k-1)(k+1)}, exponents reduced mod 2N."""
    if N < 1:
        raise ValidationError("N >= 1")
    k = np.arange(N)
    e = ((N + k - 1) * (k + 1)) % (2 * N)
    return CirculantSpec(np.exp(1j * np.pi * e / N))


def backelin(M: int, N: int, q, check: bool = True) -> CyclicRoot:
    """Cyclic MN-root (q_1..q_M, q_1 w..q_M w, ..., q_1 w^{N-1}..q_M w^{N-1}),
    w = e^{2 pi i/N}, valid when (q_1...q_M)^N = (-1)^{M(N-1)}."""
    q = np.asarray(q, complex).ravel()
    if M < 1 or N < 1 or N % M:
        raise ValidationError("need M | N")
    if len(q) != M:
        raise ValidationError("need M values q_1..q_M")
    if check:
        lhs = np.prod(q) ** N
        if abs(lhs - (-1) ** (M * (N - 1))) > 1e-9:
            raise ValidationError("(q_1...q_M)^N != (-1)^{M(N-1)}")
    w = np.exp(2j * np.pi / N)
    z = (w ** np.arange(N))[:, None] * q[None, :]
    return CyclicRoot(z.ravel())


def backelin_symmetric_ok(M: int, N: int, q, tol: float = 1e-9) -> bool:
    """q_1 q_2 = 1 and q_3 q_M = q_4 q_{M-1} = ... = w."""
    q = np.asarray(q, complex)
    w = np.exp(2j * np.pi / N)
    if M < 2 or abs(q[0] * q[1] - 1) > tol:
        return False
    a, b = 2, M - 1
    while a < b:
        if abs(q[a] * q[b] - w) > tol:
            return False
        a, b = a + 1, b - 1
    if a == b and abs(q[a] ** 2 - w) > tol:
        return False
    return True


# ---------------------------------------------------------------------------
# the 4-norm functional

def _phi_terms(q):
    """Array T[..., i, k, j] = q_i q_k / (q_j q_{i+k-j}) over all triples."""
    q = np.asarray(q, complex)
    N = q.shape[-1]
    i = np.arange(N)
    I, K, J = np.meshgrid(i, i, i, indexing="ij")
    L = (I + K - J) % N
    qi, qk, qj, ql = (q[..., X] for X in (I, K, J, L))
    return qi * qk * np.conj(qj) * np.conj(ql) / (np.abs(qj) ** 2 * np.abs(ql) ** 2)


def phi_functional(q) -> float:
    """Phi = sum_{i+k=j+l} q_i q_k / (q_j q_l), indices mod N."""
    T = _phi_terms(q)
    s = T.sum(axis=(-3, -2, -1))
    if np.max(np.abs(np.imag(s))) > 1e-8 * max(1.0, float(np.max(np.abs(s)))):
        raise ValidationError("Phi is not real; is q on the torus?")
    return np.real(s) if np.ndim(s) else float(np.real(s))


def phi_components(q) -> np.ndarray:
    """Phi_i: the same sum with the first index fixed."""
    return _phi_terms(q).sum(axis=(-2, -1))


def phi_fourier(q) -> float:
    """N^2 + (1/2) sum_{i != j} (|nu_i|^2 - |nu_j|^2)^2, nu = F q."""
    nu = dft_matrix(len(q)) @ np.asarray(q, complex)
    a = np.abs(nu) ** 2
    N = len(q)
    return float(N * N + 0.5 * np.sum((a[:, None] - a[None, :]) ** 2))


def phi_fourth_norm(q) -> float:
    """N^2 ||U||_4^4 with U = F diag(q) F^*."""
    U = from_eigenvalues(q).matrix()
    N = len(q)
    return float(N * N * np.sum(np.abs(U) ** 4))


def real_phi_check(q, tol: float = 1e-9) -> float:
    """Phi = sum_{i+j+k+l=0} q_i q_j q_k q_l for conj q_i = q_{-i}."""
    q = np.asarray(q, complex)
    N = len(q)
    if np.max(np.abs(np.conj(q) - q[(-np.arange(N)) % N])) > tol:
        raise ValidationError("need conj(q_i) = q_{-i}")
    i = np.arange(N)
    I, J, K = np.meshgrid(i, i, i, indexing="ij")
    L = (-(I + J + K)) % N
    s = np.sum(q[I] * q[J] * q[K] * q[L])
    return float(np.real(s))


def random_torus(N: int, rng, size=None) -> np.ndarray:
    shape = (N,) if size is None else (size, N)
    return np.exp(2j * np.pi * rng.random(shape))


def random_real_torus(N: int, rng) -> np.ndarray:
    """Random q with conj q_i = q_{-i}: q_0 and q_{N/2} are +-1."""
    q = np.exp(2j * np.pi * rng.random(N))
    q[0] = rng.choice([-1, 1])
    if N % 2 == 0:
        q[N // 2] = rng.choice([-1, 1])
    for k in range(1, (N + 1) // 2):
        q[N - k] = np.conj(q[k])
    return q


def phi_bound_sample(N: int, samples: int = 10_000, seed=0, batch: int = 2000) -> dict:
    rng = np.random.default_rng(seed)
    lo = math.inf
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        v = phi_functional(random_torus(N, rng, m))
        lo = min(lo, float(np.min(v)))
        done += m
    return {"N": N, "samples": samples, "min": lo, "bound": N * N, "holds": lo >= N * N - 1e-8}


def hadamard_eigenvector(H) -> np.ndarray:
    """q / |q| for a circulant Hadamard H = sqrt(N) F diag(q) F^*."""
    if not is_hadamard(H):
        raise ValidationError("matrix is not Hadamard")
    return fourier_diagonalize(H) / math.sqrt(np.asarray(H).shape[0])
