"""Dense linear-algebra kernel: Lyapunov solves, matrix exponentials,
Gramian quadrature, dissipativity margins and weighted operator norms.

All matrices are plain numpy arrays.  Inner products other than the
Euclidean one are carried by :class:`InnerProduct`.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad_vec

from .errors import NotHurwitz, Overflow, SingularSystem, TailNotConvergent

HURWITZ_MARGIN = -1e-12


@dataclass(frozen=True)
class InnerProduct:
    """Weighted inner product <x, y> = x^T W y with W symmetric positive definite."""

    weight: np.ndarray
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        W = np.asarray(self.weight, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("weight must be a square matrix")
        if not np.all(np.isfinite(W)):
            raise ValueError("weight has non-finite entries")
        sym_err = np.max(np.abs(W - W.T))
        if sym_err > 1e-12 * max(1.0, np.max(np.abs(W))):
            raise ValueError(f"weight not symmetric (max asymmetry {sym_err:.3e})")
        W = 0.5 * (W + W.T)
        try:
            L = sla.cholesky(W, lower=True)
        except sla.LinAlgError as exc:
            raise ValueError("weight is not positive definite") from exc
        object.__setattr__(self, "weight", W)
        object.__setattr__(self, "_chol", L)

    @classmethod
    def euclidean(cls, n):
        return cls(np.eye(n))

    @property
    def dim(self):
        return self.weight.shape[0]

    def inner(self, x, y):
        return float(np.asarray(x) @ self.weight @ np.asarray(y))

    def norm(self, x):
        # ||x||_W via the Cholesky factor; cheaper and never negative under roundoff
        return float(np.linalg.norm(self._chol.T @ np.asarray(x)))

    def is_identity(self):
        return bool(np.array_equal(self.weight, np.eye(self.dim)))


def spectral_abscissa(A):
    return float(np.max(np.linalg.eigvals(A).real))


def require_hurwitz(A, what="matrix"):
    a = spectral_abscissa(A)
    if a >= HURWITZ_MARGIN:
        raise NotHurwitz(f"{what} has spectral abscissa {a:.6e} >= {HURWITZ_MARGIN}")
    return a


def solve_lyapunov(Atilde, Q):
    """Solve Atilde^T P + P Atilde = -Q for symmetric positive-definite P.

    Uses the Bartels-Stewart solver; the test suite cross-checks against an
    independent Kronecker-vectorization solve.  Requires Atilde Hurwitz and
    Q symmetric positive definite.
    """
    Atilde = np.asarray(Atilde, dtype=float)
    Q = np.asarray(Q, dtype=float)
    require_hurwitz(Atilde, "Lyapunov equation matrix")
    try:
        P = sla.solve_continuous_lyapunov(Atilde.T, -Q)
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularSystem(f"Lyapunov solve failed: {exc}") from exc
    P = 0.5 * (P + P.T)
    res = np.linalg.norm(Atilde.T @ P + P @ Atilde + Q, "fro")
    qnorm = np.linalg.norm(Q, "fro")
    if not np.all(np.isfinite(P)) or res > 1e-10 * qnorm:
        raise SingularSystem(
            f"Lyapunov solve numerically rank-deficient (residual {res:.3e}, "
            f"tolerance {1e-10 * qnorm:.3e})"
        )
    return P


def matrix_exponential(A, t=1.0):
    """e^{tA} by scaling and squaring (scipy.linalg.expm)."""
    A = np.asarray(A, dtype=float)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        E = sla.expm(t * A)
    if not np.all(np.isfinite(E)):
        raise Overflow(f"exp({t} * A) has non-finite entries")
    return E


def gramian_quadrature(A, alpha=0.0, tol=1e-8, t_max=1e6):
    """P = int_0^T exp(sA)^T exp(sA) ds + alpha*I with T set by a tail bound.

    T doubles from 1 until ||exp(TA)||^2 / (2 |max Re lambda|) <= tol.  Raises
    TailNotConvergent when the integrand norm stops decreasing before the bound
    is met.  For Hurwitz A the result agrees with solve_lyapunov(A, I) + alpha*I
    up to the quadrature tolerance.
    """
    A = np.asarray(A, dtype=float)
    abscissa = require_hurwitz(A, "Gramian matrix")
    decay = abs(abscissa)

    T = 1.0
    prev = np.linalg.norm(matrix_exponential(A, T), 2)
    while prev**2 / (2.0 * decay) > tol:
        if T > t_max:
            raise TailNotConvergent(
                f"tail bound not met by T={T:.3e} (||exp(TA)|| = {prev:.3e})")
        T *= 2.0
        cur = np.linalg.norm(matrix_exponential(A, T), 2)
        prev = cur

    def integrand(s):
        E = matrix_exponential(A, s)
        return E.T @ E

    G, _ = quad_vec(integrand, 0.0, T, epsabs=0.25 * tol, epsrel=1e-12)
    G = 0.5 * (G + G.T)
    return G + alpha * np.eye(A.shape[0])


def dissipativity_margin(A, ip=None, samples=64, seed=0):
    """Max of <Az,z> + <z,Az> over unit vectors; <= 0 means dissipative.

    Combines the exact maximum (largest eigenvalue of the symmetrized weighted
    operator, for moderate dimensions) with seeded random unit-vector sampling.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if ip is None:
        ip = InnerProduct.euclidean(n)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    W = ip.weight
    S = A.T @ W + W @ A
    S = 0.5 * (S + S.T)

    margin = -np.inf
    if n <= 2000:
        margin = float(sla.eigh(S, W, eigvals_only=True)[-1])

    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((samples, n))
    for z in Z:
        nz = ip.norm(z)
        if nz == 0.0:
            continue
        z = z / nz
        margin = max(margin, float(z @ S @ z))
    return margin


def _power_iteration(apply_op, weight_ip, n, rtol=1e-8, max_iter=200000):
    """Largest generalized Rayleigh quotient z^T (W op z) / z^T W z for a
    weight-self-adjoint positive operator, by power iteration.

    Stops on the eigen-residual ||op z - lam z||_W <= rtol * lam, which is
    robust against the slow-plateau failure of a pure value-change criterion.
    """
    z = np.ones(n) + 1e-3 * np.arange(n)
    z /= weight_ip.norm(z)
    lam = 0.0
    for _ in range(max_iter):
        y = apply_op(z)
        lam = float(weight_ip.inner(z, y))
        ny = weight_ip.norm(y)
        if ny == 0.0:
            return 0.0
        res = weight_ip.norm(y - lam * z)
        z = y / ny
        if res <= rtol * max(abs(lam), 1e-300):
            return lam
    return lam


def operator_norm(P, ip, rtol=1e-8):
    """Operator norm of a self-adjoint (w.r.t. ip) positive operator matrix P."""
    n = ip.dim
    return _power_iteration(lambda z: P @ z, ip, n, rtol=rtol)


def operator_norm_nonsym(M, ip_dom, ip_codom=None, rtol=1e-8):
    """Operator norm sup ||Mz||_codom / ||z||_dom via power iteration on M* M."""
    if ip_codom is None:
        ip_codom = ip_dom
    Wc = ip_codom.weight
    Wd = ip_dom.weight
    K = M.T @ Wc @ M

    def apply_op(z):
        return np.linalg.solve(Wd, K @ z)

    lam = _power_iteration(apply_op, ip_dom, ip_dom.dim, rtol=rtol)
    return float(np.sqrt(max(lam, 0.0)))
