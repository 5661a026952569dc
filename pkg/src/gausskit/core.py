"""Real/complex linear-algebra substrate.

A real-linear map on C^n is stored as its 2n x 2n real matrix in the
(x, y) splitting z = x + iy.  Everything downstream (validity tests,
normalization constants, squeezing unitaries) reduces to a handful of
operations on these matrices plus a branch-controlled Gaussian integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL

__all__ = [
    "realify",
    "conjugation_realified",
    "symplectic_form",
    "is_symplectic",
    "SymplecticMap",
    "m_matrix",
    "c_factor",
    "det_invsqrt_branch",
    "gaussian_integral",
    "is_positive_definite",
    "is_positive_semidefinite",
    "takagi",
]


def realify(mat: np.ndarray) -> np.ndarray:
    """2n x 2n real matrix of a complex-linear map, block form [[Re, -Im], [Im, Re]]."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    re, im = mat.real, mat.imag
    return np.block([[re, -im], [im, re]])


def conjugation_realified(n: int) -> np.ndarray:
    """Real matrix diag(I, -I) of the conjugation map z -> conj(z)."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


def symplectic_form(n: int) -> np.ndarray:
    """The 2n x 2n matrix J = [[0, I], [-I, 0]]."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def is_symplectic(l0: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """l0^T J l0 = J within a scale-free tolerance."""
    l0 = np.asarray(l0, dtype=float)
    if l0.ndim != 2 or l0.shape[0] != l0.shape[1] or l0.shape[0] % 2:
        return False
    n = l0.shape[0] // 2
    j = symplectic_form(n)
    scale = 1.0 + np.linalg.norm(l0, 2) ** 2
    return bool(np.linalg.norm(l0.T @ j @ l0 - j, 2) <= tol * scale)


@dataclass(frozen=True)
class SymplecticMap:
    """A symplectic transformation of C^n, stored as its real 2n x 2n matrix."""

    l0: np.ndarray

    def __post_init__(self):
        l0 = np.asarray(self.l0, dtype=float)
        object.__setattr__(self, "l0", l0)
        if not is_symplectic(l0):
            raise ValueError("matrix is not symplectic")

    @property
    def n(self) -> int:
        return self.l0.shape[0] // 2

    @staticmethod
    def from_unitary(u: np.ndarray) -> "SymplecticMap":
        return SymplecticMap(realify(u))

    @staticmethod
    def squeeze(r, n: int | None = None) -> "SymplecticMap":
        """diag(e^{r_1}..e^{r_n}, e^{-r_1}..e^{-r_n}); scalar r means 1 mode."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if n is not None and len(r) != n:
            raise ValueError("length of r must equal n")
        return SymplecticMap(np.diag(np.concatenate([np.exp(r), np.exp(-r)])))

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.l0 @ other.l0)

    def inv(self) -> "SymplecticMap":
        n = self.n
        j = symplectic_form(n)
        # J^T L^T J is the symplectic inverse, cheaper and exacter than solve
        return SymplecticMap(j.T @ self.l0.T @ j)


def _check_symmetric(a: np.ndarray, tol: float, what: str = "A") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square")
    scale = 1.0 + np.abs(a).max()
    if np.abs(a - a.T).max() > tol * scale:
        raise ValueError(f"{what} must be symmetric")
    return 0.5 * (a + a.T)


def _check_hermitian(m: np.ndarray, tol: float, what: str = "Lambda") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square")
    scale = 1.0 + np.abs(m).max()
    if np.abs(m - m.conj().T).max() > tol * scale:
        raise ValueError(f"{what} must be hermitian")
    return 0.5 * (m + m.conj().T)


def m_matrix(a: np.ndarray, lam: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """M(A, Lambda) = I - Lambda_0 - 2 [[Re A, Im A], [Im A, -Re A]].

    A must be complex symmetric, Lambda hermitian.  The result is real
    symmetric; its strict positivity is the validity criterion for the
    (A, Lambda) pair of a Gaussian state.
    """
    a = _check_symmetric(a, tol, "A")
    lam = _check_hermitian(lam, tol, "Lambda")
    n = a.shape[0]
    if lam.shape[0] != n:
        raise ValueError("A and Lambda must have matching size")
    a0c0 = np.block([[a.real, a.imag], [a.imag, -a.real]])
    m = np.eye(2 * n) - realify(lam).real - 2.0 * a0c0
    return 0.5 * (m + m.T)


def c_factor(a: np.ndarray, lam: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """sqrt(det M(A, Lambda)); requires M(A, Lambda) >= 0."""
    m = m_matrix(a, lam, tol)
    evals = np.linalg.eigvalsh(m)
    scale = 1.0 + abs(evals[-1])
    if evals[0] < -tol * scale:
        raise ValueError("M(A, Lambda) is not positive semidefinite")
    return float(np.sqrt(np.prod(np.clip(evals, 0.0, None))))


def det_invsqrt_branch(a: np.ndarray) -> complex:
    """det(A)^{-1/2} for complex symmetric A with Re A > 0.

    Computed as the product of lambda_j^{-1/2} over the eigenvalues of A,
    each square root taken with positive real part.  With Re A > 0 all
    eigenvalues lie in the open right half-plane, so the principal branch
    per eigenvalue realizes exactly that rule.
    """
    evals = np.linalg.eigvals(np.asarray(a, dtype=complex))
    return complex(np.prod(1.0 / np.sqrt(evals)))


def gaussian_integral(a: np.ndarray, m: np.ndarray, tol: float = DEFAULT_TOL) -> complex:
    """Closed form of int_{R^n} exp(-x^T A x + m^T x) dx.

    Equals sqrt(pi^n / det A) exp(m^T A^{-1} m / 4) with the square-root
    branch fixed by det^{-1/2} A > 0 for real positive definite A.
    Requires A symmetric with Re A strictly positive definite.
    """
    a = _check_symmetric(a, tol, "A")
    m = np.asarray(m, dtype=complex).reshape(-1)
    n = a.shape[0]
    if m.shape[0] != n:
        raise ValueError("m has wrong length")
    re_evals = np.linalg.eigvalsh(a.real)
    if re_evals[0] <= tol * (1.0 + abs(re_evals[-1])):
        raise ValueError("Re A must be strictly positive definite")
    quad = 0.25 * m @ np.linalg.solve(a, m)
    return np.pi ** (n / 2.0) * det_invsqrt_branch(a) * np.exp(quad)


def _sym_eigvals(m: np.ndarray, tol: float) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    scale = 1.0 + np.abs(m).max()
    if np.abs(m - m.conj().T).max() > tol * scale:
        raise ValueError("matrix is not (conjugate-)symmetric")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def is_positive_definite(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Smallest eigenvalue > tol * (1 + spectral norm); input must be symmetric/hermitian."""
    evals = _sym_eigvals(m, tol)
    scale = 1.0 + max(abs(evals[0]), abs(evals[-1]))
    return bool(evals[0] > tol * scale)


def is_positive_semidefinite(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Smallest eigenvalue >= -tol * (1 + spectral norm)."""
    evals = _sym_eigvals(m, tol)
    scale = 1.0 + max(abs(evals[0]), abs(evals[-1]))
    return bool(evals[0] >= -tol * scale)


def takagi(a: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Autonne-Takagi factorization A = U diag(d) U^T of a complex symmetric A.

    Returns (u, d) with u unitary and d the singular values of A in
    descending order.  u is not unique (phases/degenerate blocks); only
    the reconstruction property is guaranteed.

    Uses the real-symmetric embedding T = [[Re A, Im A], [Im A, -Re A]],
    whose eigenpairs (sigma, (x, y)) give con-eigenvectors u = x + iy with
    A conj(u) = sigma u.  For sigma > 0 the complex Gram matrix of the
    selected vectors is automatically the identity (the rotation
    [x, y] -> [-y, x] maps the +sigma eigenspace into the orthogonal
    -sigma eigenspace); the kernel block needs an explicit re-selection.
    """
    a = _check_symmetric(a, tol, "A")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    t = np.block([[a.real, a.imag], [a.imag, -a.real]])
    evals, evecs = np.linalg.eigh(t)  # ascending; spectrum is {+/- sigma_j}
    sel = evecs[:, n:][:, ::-1].copy()  # top-n eigenvectors, descending eigenvalue
    d = evals[n:][::-1].copy()
    thresh = tol * (1.0 + abs(d[0]))
    d[np.abs(d) <= thresh] = 0.0
    d = np.clip(d, 0.0, None)

    # re-pick the sigma ~ 0 columns so that v_i^T Jt v_j = 0 as well
    zero = d == 0.0
    kdim = int(np.sum(zero))
    if kdim:
        jt = np.zeros((2 * n, 2 * n))
        jt[:n, n:] = -np.eye(n)
        jt[n:, :n] = np.eye(n)
        # exact (orthonormal) kernel basis straight from eigh
        space = evecs[:, np.abs(evals) <= thresh]
        picked = []
        for _ in range(kdim):
            v = space[:, 0]
            picked.append(v)
            w = jt @ v  # kernel is Jt-invariant and v^T Jt v = 0, so {v, w} orthonormal
            b = space - np.outer(v, v @ space) - np.outer(w, w @ space)
            lead = np.linalg.svd(b, full_matrices=False)[0]
            space = lead[:, : max(space.shape[1] - 2, 0)]
        sel[:, zero] = np.column_stack(picked)

    u = sel[:n, :] + 1j * sel[n:, :]
    return u, d
