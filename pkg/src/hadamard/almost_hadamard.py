"""Almost Hadamard matrices: critical points and local maximizers of the
1-norm on O_N and U_N, the explicit real families (K_N, L_N, two-entry
pattern matrices, projective planes), balancing conditions, and the
second-order functional Phi(U, B) of the complex case."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ValidationError, as_complex, is_hadamard

TOL_ZERO = 1e-12
TOL_SYM = 1e-9
TOL_EIG = 1e-10


# ---------------------------------------------------------------------------
# sign / color decomposition

@dataclass
class SignDecomposition:
    """S = phases of the entries of U, and U = sum_r r U_r with U_r holding
    the phases of the entries of modulus r."""
    sign_matrix: np.ndarray
    color_components: dict = field(default_factory=dict)

    def reassemble(self) -> np.ndarray:
        out = np.zeros(self.sign_matrix.shape, complex)
        for r, Ur in self.color_components.items():
            out = out + r * Ur
        return out


def _phases(U) -> np.ndarray:
    m = np.abs(U)
    return np.where(m > TOL_ZERO, U / np.where(m > TOL_ZERO, m, 1.0), 0)


def sign_decomposition(U, tol: float = 1e-9) -> SignDecomposition:
    """Entries whose moduli agree within tol share a color."""
    U = np.asarray(U)
    real = np.isrealobj(U) or np.allclose(np.imag(U), 0, atol=TOL_ZERO)
    if real:
        U = np.real(U)
    S = _phases(U)
    mods = np.abs(U)
    comps = {}
    for v in np.sort(mods.ravel()):
        if v <= TOL_ZERO or any(abs(v - r) <= tol for r in comps):
            continue
        comps[float(v)] = None
    for r in comps:
        mask = np.abs(mods - r) <= tol
        comps[r] = np.where(mask, S, 0)
    return SignDecomposition(S, comps)


def _adj(A):
    return np.conj(A).T


def _is_selfadjoint(A, tol: float = TOL_SYM) -> bool:
    return bool(np.max(np.abs(A - _adj(A))) <= tol)


def has_zero_entry(U) -> bool:
    return bool(np.min(np.abs(np.asarray(U))) <= TOL_ZERO)


def _is_unitary(U, tol: float = 1e-9) -> bool:
    U = np.asarray(U)
    return bool(np.max(np.abs(U @ _adj(U) - np.eye(U.shape[0]))) <= tol)


# ---------------------------------------------------------------------------
# critical points and local maxima

def critical_check(U, kind: str = "real") -> bool:
    """U is a critical point of the 1-norm iff S U^t (real) or S U^*
    (complex) is symmetric / self-adjoint.  A zero entry rules out a local
    maximizer, so the check reports False there."""
    U = np.asarray(U)
    if kind not in ("real", "complex"):
        raise ValidationError("kind must be 'real' or 'complex'")
    if has_zero_entry(U):
        return False
    if kind == "real":
        U = np.real(U)
        S = np.sign(U)
        return _is_selfadjoint(S @ U.T)
    S = _phases(U)
    return _is_selfadjoint(S @ _adj(U))


def local_max_check_real(U, return_eigs: bool = False):
    """Local maximizer of the 1-norm on O_N: nonzero entries, X = S^t U
    symmetric, and the sum of the two smallest eigenvalues of X positive."""
    U = np.real(np.asarray(U))
    if has_zero_entry(U) or not _is_unitary(U):
        return (False, None) if return_eigs else False
    X = np.sign(U).T @ U
    if not _is_selfadjoint(X):
        return (False, None) if return_eigs else False
    ev = np.linalg.eigvalsh((X + X.T) / 2)
    ok = bool(ev.size < 2 or ev[0] + ev[1] > TOL_EIG)
    return (ok, ev) if return_eigs else ok


def is_almost_hadamard(H) -> bool:
    """Real AHM test for H in sqrt(N) O_N."""
    H = np.asarray(H)
    return local_max_check_real(H / math.sqrt(H.shape[0]))


# ---------------------------------------------------------------------------
# explicit families

def build_K_N(N: int) -> np.ndarray:
    """K_N = (2 I - N 1) / sqrt N, with I the all-ones matrix."""
    if N < 2:
        raise ValidationError("N >= 2")
    return (2 * np.ones((N, N)) - N * np.eye(N)) / math.sqrt(N)


def L_gamma(N: int) -> np.ndarray:
    """First row of L_N: gamma_i = (-1)^i / cos(i pi / N) / sqrt N."""
    if N < 3 or N % 2 == 0:
        raise ValidationError("L_N needs N odd, N >= 3")
    i = np.arange(N)
    return (-1.0) ** i / np.cos(i * np.pi / N) / math.sqrt(N)


def _circ(gamma) -> np.ndarray:
    g = np.asarray(gamma)
    N = len(g)
    i = np.arange(N)
    return g[(i[None, :] - i[:, None]) % N]


def _dft_star(v) -> np.ndarray:
    """F^* v with F_ij = w^{ij} / sqrt N."""
    v = np.asarray(v, complex)
    N = len(v)
    i = np.arange(N)
    Fs = np.exp(-2j * np.pi * np.outer(i, i) / N) / math.sqrt(N)
    return Fs @ v


def build_L_N(N: int, check: bool = True) -> np.ndarray:
    """Circulant symmetric AHM L_N, H_ij = gamma_{j-i}."""
    g = L_gamma(N)
    H = _circ(g)
    if check:
        nu = L_nu(N)
        if np.min(nu.real) <= 0 or np.max(np.abs(nu.imag)) > 1e-9:
            raise ValidationError("nu vector is not positive")
    return H


def circulant_ahm_vectors(gamma) -> dict:
    """alpha = F^* gamma, eps = sgn gamma, rho_i = sum_r eps_r gamma_{i+r},
    nu = F^* rho.  alpha on the torus and nu > 0 make the circulant AHM."""
    g = np.real(np.asarray(gamma))
    N = len(g)
    eps = np.sign(g)
    idx = (np.arange(N)[:, None] + np.arange(N)[None, :]) % N
    rho = (eps[None, :] * g[idx]).sum(axis=1)
    return {"alpha": _dft_star(g), "eps": eps, "rho": rho, "nu": _dft_star(rho)}


def L_nu(N: int) -> np.ndarray:
    return circulant_ahm_vectors(L_gamma(N))["nu"]


def L_nu_closed(N: int) -> np.ndarray:
    """nu_l = 1 / cos(L pi / N), L = l for l <= n, L = l - N otherwise."""
    l = np.arange(N)
    L = np.where(l <= N // 2, l, l - N)
    return 1 / np.cos(L * np.pi / N)


def abc_solution(a: int, b: int, c: int, root: int = -1):
    """(x, y) with U(x, y) orthogonal for an (a, b, c) pattern: t solves
    a t^2 - 2 b t + c = 0, x = -t / (sqrt b (t + 1)), y = 1 / (sqrt b (t + 1)).
    root = -1 takes the smaller t, the branch giving the projective AHMs."""
    if min(a, b, c) < 0 or b == 0:
        raise ValidationError("need a, c >= 0 and b >= 1")
    disc = b * b - a * c
    if disc < 0:
        raise ValidationError("no orthogonal matrix: b^2 < ac")
    if a == 0:
        t = c / (2 * b)
    else:
        t = (b + (1 if root >= 0 else -1) * math.sqrt(disc)) / a
    x = -t / (math.sqrt(b) * (t + 1))
    y = 1 / (math.sqrt(b) * (t + 1))
    return x, y


def abc_criterion(a: int, b: int, c: int, x: float, y: float) -> float:
    """(N(a-b) + 2b)|x| + (N(c-b) + 2b)|y|; sqrt(N) U is AHM when >= 0."""
    N = a + 2 * b + c
    return (N * (a - b) + 2 * b) * abs(x) + (N * (c - b) + 2 * b) * abs(y)


def is_abc_pattern(P, a: int, b: int, c: int) -> bool:
    """P in M_N(0, 1), 1 marking the x positions: any two rows share a
    x/x, b x/y, b y/x and c y/y columns."""
    P = np.asarray(P, int)
    N = P.shape[0]
    if N != a + 2 * b + c:
        return False
    Q = 1 - P
    off = ~np.eye(N, dtype=bool)
    return bool(np.all((P @ P.T)[off] == a) and np.all((P @ Q.T)[off] == b)
                and np.all((Q @ P.T)[off] == b) and np.all((Q @ Q.T)[off] == c))


def projective_incidence(q: int) -> np.ndarray:
    """Line-point incidence matrix of PG(2, q), q prime."""
    from .constructions import is_prime
    if not is_prime(q):
        raise ValidationError("projective planes are built for prime q only")
    pts = []
    for v in np.ndindex(q, q, q):
        v = tuple(v)
        nz = [u for u in v if u]
        if nz and nz[0] == 1:
            pts.append(v)
    P = np.array(pts)
    return ((P @ P.T) % q == 0).astype(int)


def _pattern_for(a: int, b: int, c: int):
    N = a + 2 * b + c
    if a == 0 and b == 1:
        return np.eye(N, dtype=int)
    if c == 0 and b == 1:
        return 1 - np.eye(N, dtype=int)
    q = b
    if a == 1 and c == q * q - q and q > 1:
        try:
            return projective_incidence(q)
        except ValidationError:
            pass
    raise ValidationError(f"no built-in ({a},{b},{c}) pattern; pass one explicitly")


def abc_pattern_matrix(a: int, b: int, c: int, pattern=None, root: int = -1):
    """(x, y, U, criterion): the orthogonal two-entry matrix on an (a, b, c)
    pattern.  The built-in patterns are the identity (0, 1, N-2) and the
    projective planes (1, q, q^2 - q); other patterns may be supplied."""
    x, y = abc_solution(a, b, c, root)
    P = _pattern_for(a, b, c) if pattern is None else np.asarray(pattern, int)
    if not is_abc_pattern(P, a, b, c):
        raise ValidationError(f"matrix is not an ({a},{b},{c}) pattern")
    U = np.where(P == 1, x, y).astype(float)
    return x, y, U, abc_criterion(a, b, c, x, y)


def projective_ahm(q: int) -> np.ndarray:
    """H in M_N(x, y), N = q^2 + q + 1, x = (1 - q sqrt q)/sqrt N on the
    incidences and y = (q + (q + 1) sqrt q)/(q sqrt N) elsewhere."""
    P = projective_incidence(q)
    N = q * q + q + 1
    x = (1 - q * math.sqrt(q)) / math.sqrt(N)
    y = (q + (q + 1) * math.sqrt(q)) / (q * math.sqrt(N))
    H = np.where(P == 1, x, y)
    if np.max(np.abs(H @ H.T - N * np.eye(N))) > 1e-8:
        raise ValidationError("projective matrix is not orthogonal")
    return H


# ---------------------------------------------------------------------------
# balancing

def balanced_check(U, strength: str = "full", tol: float = TOL_SYM) -> bool:
    """semi: U_r U^* and U^* U_r self-adjoint for all colors r.
    full: U_r U_s^* and U_r^* U_s self-adjoint for all r, s."""
    U = np.asarray(U)
    if strength not in ("semi", "full"):
        raise ValidationError("strength must be 'semi' or 'full'")
    comps = list(sign_decomposition(U).color_components.values())
    if strength == "semi":
        return all(_is_selfadjoint(Ur @ _adj(U), tol) and _is_selfadjoint(_adj(U) @ Ur, tol)
                   for Ur in comps)
    return all(_is_selfadjoint(Ur @ _adj(Us), tol) and _is_selfadjoint(_adj(Ur) @ Us, tol)
               for Ur in comps for Us in comps)


# ---------------------------------------------------------------------------
# complex case

def complex_phi(U, B) -> float:
    """Phi(U, B) = Tr(X B^2) - sum_ij Re[(UB)_ij conj(S_ij)]^2 / |U_ij|,
    X = S^* U.  U locally maximizes the 1-norm on U_N iff X >= 0 and
    Phi(U, B) >= 0 for every hermitian B."""
    U = as_complex(U)
    B = as_complex(B)
    if not _is_selfadjoint(B):
        raise ValidationError("B must be hermitian")
    if has_zero_entry(U):
        raise ValidationError("U has a zero entry")
    S = _phases(U)
    X = _adj(S) @ U
    t = np.trace(X @ B @ B)
    R = np.real((U @ B) * np.conj(S))
    return float(np.real(t) - np.sum(R * R / np.abs(U)))


def random_hermitian(N: int, rng) -> np.ndarray:
    Z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return (Z + _adj(Z)) / 2


def _hermitian_basis(N: int) -> list:
    out = []
    for i in range(N):
        E = np.zeros((N, N), complex)
        E[i, i] = 1
        out.append(E)
    for i in range(N):
        for j in range(i + 1, N):
            E = np.zeros((N, N), complex)
            E[i, j] = E[j, i] = 1
            out.append(E)
            E = np.zeros((N, N), complex)
            E[i, j], E[j, i] = 1j, -1j
            out.append(E)
    return out


def phi_quadratic_form(U) -> np.ndarray:
    """Gram matrix of B -> Phi(U, B) on the real basis of hermitian
    matrices (polarization)."""
    basis = _hermitian_basis(np.asarray(U).shape[0])
    n = len(basis)
    diag = [complex_phi(U, E) for E in basis]
    G = np.zeros((n, n))
    for a in range(n):
        G[a, a] = diag[a]
        for b in range(a + 1, n):
            v = (complex_phi(U, basis[a] + basis[b]) - diag[a] - diag[b]) / 2
            G[a, b] = G[b, a] = v
    return G


def phi_min_direction(U):
    """(lambda_min, B): the most negative direction of Phi over unit-norm
    hermitian coefficient vectors."""
    G = phi_quadratic_form(U)
    w, V = np.linalg.eigh(G)
    basis = _hermitian_basis(np.asarray(U).shape[0])
    B = sum(c * E for c, E in zip(V[:, 0], basis))
    return float(w[0]), B


def phi_counterexample_search(U, draws: int = 500, seed=0) -> dict:
    """Sample Gaussian hermitian B; report the minimum of Phi and the B
    attaining it as a failure certificate when Phi < 0."""
    rng = np.random.default_rng(seed)
    U = as_complex(U)
    N = U.shape[0]
    best, cert = math.inf, None
    for _ in range(draws):
        B = random_hermitian(N, rng)
        v = complex_phi(U, B) / np.real(np.trace(B @ B))
        if v < best:
            best, cert = v, B
    scale = 1e-9 * max(1.0, N)
    return {"min_phi": float(best), "fails": bool(best < -scale),
            "certificate": cert if best < -scale else None, "draws": draws}


def complex_local_max_check(U, draws: int = 500, seed=0) -> bool:
    """X = S^* U positive semidefinite and Phi >= 0 on the sampled B."""
    U = as_complex(U)
    if has_zero_entry(U):
        return False
    X = _adj(_phases(U)) @ U
    if not _is_selfadjoint(X) or np.linalg.eigvalsh((X + _adj(X)) / 2)[0] < -TOL_EIG:
        return False
    return not phi_counterexample_search(U, draws, seed)["fails"]


def kn_phi_closed(N: int) -> float:
    """Phi(K_N / sqrt N, all-ones) = N^2 (N - 1)(N - 4) / (2 (N - 2))."""
    return N * N * (N - 1) * (N - 4) / (2 * (N - 2))


def equality_space_dim(U, tol: float = 1e-8) -> int:
    """dim_R {B hermitian : Im[(UB)_ij conj(U_ij)] = 0 for all i, j}."""
    U = as_complex(U)
    basis = _hermitian_basis(U.shape[0])
    A = np.array([np.imag((U @ E) * np.conj(U)).ravel() for E in basis]).T
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return len(basis) - rank


def defect_equivalence_check(H, tol: float = 1e-8) -> dict:
    """Compare dim E_U (equality space of Phi at U = H / sqrt N) with the
    defect dim D_U of the first-order deformation system."""
    from .defect import defect
    H = as_complex(H)
    if not is_hadamard(H):
        raise ValidationError("matrix is not Hadamard")
    U = H / math.sqrt(H.shape[0])
    e = equality_space_dim(U, tol)
    d = defect(H, tol)
    return {"dim_E": e, "dim_D": d, "equal": e == d}
