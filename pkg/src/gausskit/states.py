"""High-level Gaussian-state API.

GaussianState wraps the canonical quadruple and caches the derived
covariance pair.  On top of it: characteristic function, photon-number
statistics, marginals, bipartite separability tests for pure states,
complete-entanglement scans, and the displacement/rotation normal form.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, thread_count
from .core import c_factor, m_matrix, takagi
from .errors import InvalidStateError, UnsupportedStateError
from .fock import TruncatedOperator, dmf, general_truncate
from .params import (
    CovarianceParams,
    E2Params,
    cov_to_e2,
    e2_to_cov,
    is_pure,
    is_valid_state,
    state_params,
    trace_of_positive,
)
from .semigroup import conjugate_by_gamma, conjugate_by_weyl, mean_of_state

__all__ = [
    "GaussianState",
    "NumberDistribution",
    "NormalForm",
    "vacuum",
    "coherent",
    "thermal",
    "smsv",
    "tmsv",
    "characteristic_function",
    "number_distribution",
    "marginal",
    "marginal_via_e2",
    "is_pure_separable",
    "is_completely_entangled_pure",
    "complete_entanglement_certificate",
    "entanglement_report",
    "normal_form",
    "all_bipartitions",
]


class GaussianState:
    """Immutable n-mode Gaussian state, stored as E2 parameters."""

    def __init__(self, params: E2Params, tol: float = DEFAULT_TOL):
        if not is_valid_state(params.a, params.lam, tol):
            raise InvalidStateError("parameters fail M(A, Lambda) > 0")
        tr = trace_of_positive(params, tol)
        if abs(tr - 1.0) > 1e-8:
            raise InvalidStateError(f"parameters are not normalized: trace = {tr!r}")
        self._params = params
        self._tol = tol
        self._cov: CovarianceParams | None = None

    @property
    def n(self) -> int:
        return self._params.n

    @property
    def params(self) -> E2Params:
        return self._params

    @property
    def cov(self) -> CovarianceParams:
        if self._cov is None:
            self._cov = e2_to_cov(self._params, self._tol)
        return self._cov

    @property
    def tol(self) -> float:
        return self._tol

    @staticmethod
    def from_a_lambda(a, lam, mu=None, tol: float = DEFAULT_TOL) -> "GaussianState":
        return GaussianState(state_params(a, lam, mu, tol), tol)

    @staticmethod
    def from_cov(cov: CovarianceParams, tol: float = DEFAULT_TOL) -> "GaussianState":
        return GaussianState(cov_to_e2(cov, tol), tol)

    def mean(self) -> np.ndarray:
        return mean_of_state(self._params, self._tol)

    def is_pure(self, tol: float | None = None) -> bool:
        return is_pure(self._params, self._tol if tol is None else tol)

    def __repr__(self) -> str:
        return f"GaussianState(n={self.n}, pure={self.is_pure()})"


def vacuum(n: int) -> GaussianState:
    z = np.zeros((n, n), dtype=complex)
    return GaussianState.from_a_lambda(z, z)


def coherent(z) -> GaussianState:
    z = np.asarray(z, dtype=complex).reshape(-1)
    n = z.shape[0]
    zero = np.zeros((n, n), dtype=complex)
    return GaussianState.from_a_lambda(zero, zero, mu=z)


def thermal(lam_diag) -> GaussianState:
    lam_diag = np.atleast_1d(np.asarray(lam_diag, dtype=float))
    n = lam_diag.shape[0]
    return GaussianState.from_a_lambda(np.zeros((n, n), dtype=complex), np.diag(lam_diag))


def smsv(alpha: complex) -> GaussianState:
    """Single-mode squeezed vacuum rho(alpha, 0), |alpha| < 1/2."""
    return GaussianState.from_a_lambda([[alpha]], [[0.0]])


def tmsv(beta: complex) -> GaussianState:
    """Two-mode squeezed vacuum with A = [[0, beta], [beta, 0]], |beta| < 1/2."""
    a = np.array([[0.0, beta], [beta, 0.0]], dtype=complex)
    return GaussianState.from_a_lambda(a, np.zeros((2, 2), dtype=complex))


def characteristic_function(state: GaussianState, z) -> complex:
    """rho^(z) = exp(-2i Im<z|m> - (x, y) S (x, y)^T) with z = x + iy."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    cov = state.cov
    xy = np.concatenate([z.real, z.imag])
    phase = -2.0 * np.imag(np.vdot(z, cov.m))
    return complex(np.exp(1j * phase - xy @ cov.s @ xy))


@dataclass(frozen=True)
class NumberDistribution:
    """Particle-count probabilities on the window plus the reported tail."""

    probs: dict[tuple, float]
    tail: float

    def __getitem__(self, t) -> float:
        return self.probs.get(tuple(int(x) for x in t), 0.0)


def _window_matrix(state: GaussianState, cutoff: int) -> TruncatedOperator:
    p = state.params
    if np.any(p.mu):
        return general_truncate(p.as_general(), cutoff)
    return dmf(p.a, p.lam, cutoff, state.tol)


def number_distribution(state: GaussianState, cutoff: int) -> NumberDistribution:
    """Diagonal of the window density matrix; mass deficit goes to `tail`."""
    op = _window_matrix(state, cutoff)
    diag = np.clip(op.entries.diagonal().real, 0.0, None)
    probs = {t: float(pr) for t, pr in zip(op.basis, diag)}
    return NumberDistribution(probs, max(0.0, 1.0 - float(diag.sum())))


def _check_subset(n: int, modes: list[int]) -> list[int]:
    modes = [int(m) for m in modes]
    if len(set(modes)) != len(modes) or any(m < 0 or m >= n for m in modes):
        raise ValueError("modes must be distinct indices in range")
    if not modes or len(modes) == n:
        raise ValueError("modes must be a nonempty proper subset")
    return modes


def marginal(state: GaussianState, modes: list[int]) -> GaussianState:
    """Reduced state on `modes` via covariance restriction (exact for Gaussians)."""
    modes = _check_subset(state.n, modes)
    cov = state.cov
    n = state.n
    rows = np.array(modes + [n + m for m in modes])
    sub = CovarianceParams(cov.m[modes], cov.s[np.ix_(rows, rows)])
    return GaussianState.from_cov(sub, state.tol)


def marginal_via_e2(state: GaussianState, modes: list[int],
                    quarter_prefactor: bool = True) -> E2Params:
    """Marginal through the direct E2-parameter formula (validated alternative).

    With blocks taken across kept/traced modes and
    C01 = [Lambda01 + 2 A01, i(Lambda01 - 2 A01)]:

        A0      = A00 + q C01 M(A11, Lambda11)^{-1} C01^T
        Lambda0 = Lambda00 + q C01 M(A11, Lambda11)^{-1} C01^dagger

    quarter_prefactor=True uses q = 1/4, which on the two-mode squeezed
    vacuum yields Lambda0 = 2|beta|^2 where the covariance path and the
    partial-trace oracle both give 4|beta|^2; q = 1/2
    (quarter_prefactor=False) is the value that reconciles them.  The
    covariance path in marginal() is authoritative; this one exists for
    cross-checking and the tests record the q = 1/4 discrepancy.
    """
    modes = _check_subset(state.n, modes)
    drop = [m for m in range(state.n) if m not in modes]
    p = state.params
    if np.any(p.mu):
        raise UnsupportedStateError("E2-direct marginal implemented for mean-zero states")
    q = 0.25 if quarter_prefactor else 0.5
    a00 = p.a[np.ix_(modes, modes)]
    a01 = p.a[np.ix_(modes, drop)]
    a11 = p.a[np.ix_(drop, drop)]
    l00 = p.lam[np.ix_(modes, modes)]
    l01 = p.lam[np.ix_(modes, drop)]
    l11 = p.lam[np.ix_(drop, drop)]
    c01 = np.hstack([l01 + 2.0 * a01, 1j * (l01 - 2.0 * a01)])
    m11_inv = np.linalg.inv(m_matrix(a11, l11, state.tol))
    a0 = a00 + q * (c01 @ m11_inv @ c01.T)
    lam0 = l00 + q * (c01 @ m11_inv @ c01.conj().T)
    c0 = c_factor(p.a, p.lam, state.tol) / c_factor(a11, l11, state.tol)
    return E2Params(c0, np.zeros(len(modes), dtype=complex),
                    0.5 * (a0 + a0.T), 0.5 * (lam0 + lam0.conj().T))


def all_bipartitions(n: int) -> list[tuple[list[int], list[int]]]:
    """The 2^(n-1) - 1 basis-aligned splits, as (subset containing mode 0, rest)."""
    out = []
    for mask in range(0, 2 ** (n - 1) - 1):
        left = [0] + [m for m in range(1, n) if (mask >> (m - 1)) & 1]
        right = [m for m in range(1, n) if m not in left]
        out.append((left, right))
    return out


def _offdiag_norm(a: np.ndarray, left: list[int], right: list[int]) -> float:
    return float(np.linalg.norm(a[np.ix_(left, right)]))


def is_pure_separable(state: GaussianState, modes: list[int],
                      tol: float | None = None) -> bool:
    """Pure state separable across (modes | rest) iff the A off-block vanishes."""
    tol = state.tol if tol is None else tol
    if not state.is_pure():
        raise UnsupportedStateError("separability criterion applies to pure states only")
    left = _check_subset(state.n, modes)
    right = [m for m in range(state.n) if m not in left]
    scale = 1.0 + np.abs(state.params.a).max()
    return bool(_offdiag_norm(state.params.a, left, right) <= tol * scale)


def is_completely_entangled_pure(state: GaussianState, tol: float | None = None) -> bool:
    """Exact scan: entangled across every basis-aligned bipartition."""
    if not state.is_pure():
        raise UnsupportedStateError("complete-entanglement test applies to pure states only")
    splits = all_bipartitions(state.n)

    def entangled(split) -> bool:
        return not is_pure_separable(state, split[0], tol)

    workers = thread_count()
    if workers > 1 and len(splits) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return all(pool.map(entangled, splits))
    return all(map(entangled, splits))


def complete_entanglement_certificate(state: GaussianState,
                                      tol: float | None = None) -> bool:
    """Fast sufficient condition: every off-diagonal A entry nonzero and ||A|| < 1/2."""
    tol = state.tol if tol is None else tol
    if not state.is_pure():
        raise UnsupportedStateError("certificate applies to pure states only")
    a = state.params.a
    n = state.n
    scale = 1.0 + np.abs(a).max()
    offdiag_ok = all(abs(a[i, j]) > tol * scale for i in range(n) for j in range(n) if i != j)
    return offdiag_ok and np.linalg.norm(a, 2) < 0.5


def entanglement_report(state: GaussianState, tol: float | None = None) -> dict:
    """{split-label: {"separable": bool, "offdiag_norm": float}} over all splits."""
    if not state.is_pure():
        raise UnsupportedStateError("entanglement report applies to pure states only")
    out = {}
    for left, right in all_bipartitions(state.n):
        label = ",".join(str(m) for m in left) + "|" + ",".join(str(m) for m in right)
        out[label] = {
            "separable": is_pure_separable(state, left, tol),
            "offdiag_norm": _offdiag_norm(state.params.a, left, right),
        }
    return out


@dataclass(frozen=True)
class NormalForm:
    """Transforms bringing a state to mu = 0 and diagonal Lambda (and diagonal A when pure)."""

    displacement: np.ndarray
    unitary: np.ndarray
    canonical: E2Params


def normal_form(state: GaussianState) -> NormalForm:
    """Weyl displacement to zero mean, then a second-quantized unitary.

    The unitary diagonalizes Lambda with descending eigenvalues; for pure
    states it additionally Takagi-diagonalizes A, exhibiting the state as
    a rotated product of one-mode factors.
    """
    p = state.params
    z = mean_of_state(p, state.tol)
    centered = conjugate_by_weyl(p, z)
    if state.is_pure():
        u_tak, _ = takagi(centered.a, state.tol)
        u = u_tak.conj().T
    else:
        evals, evecs = np.linalg.eigh(centered.lam)
        order = np.argsort(evals)[::-1]
        u = evecs[:, order].conj().T
    canon = conjugate_by_gamma(centered, u, state.tol)
    # scrub numerical dust so the canonical block structure is exact
    mu = canon.mu.copy()
    mu[np.abs(mu) < 1e-13] = 0.0
    return NormalForm(z, u, E2Params(canon.c, mu, canon.a, canon.lam))
