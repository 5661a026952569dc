"""Exact particle-basis constructions on a total-number-truncated window.

The basis over n modes with cutoff N is every occupation tuple t with
|t| <= N in graded lexicographic order (by |t|, then lex).  In that
order the creation-side matrix E_A is lower triangular and second
quantizations are block diagonal, so the density-matrix factorization
c(A, Lambda) E_A Gamma(Lambda) E_A^dagger is exact entrywise on the
window (no truncation error inside the window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import io
from .config import DEFAULT_TOL
from .core import c_factor
from .errors import InvalidStateError
from .params import E2Params, GeneralE2Params, is_valid_state

__all__ = [
    "multi_factorial",
    "multi_binomial",
    "wedge",
    "basis_indices",
    "basis_index_map",
    "enumerate_delta",
    "phi",
    "gamma_lambda_entry",
    "gamma_matrix",
    "e_a_matrix",
    "dmf",
    "matrix_element",
    "mixing_kernel_element",
    "pure_state_vector",
    "z1_matrix",
    "general_truncate",
    "TruncatedOperator",
    "TruncatedVector",
    "psd_sqrt",
]


# ---------------------------------------------------------------------------
# multi-index conventions


def multi_factorial(t) -> int:
    """t! = prod_j t_j!"""
    out = 1
    for x in t:
        out *= math.factorial(int(x))
    return out


def multi_binomial(t, s) -> int:
    """binom(t, s) componentwise; zero unless s <= t componentwise."""
    out = 1
    for a, b in zip(t, s):
        if b > a or b < 0:
            return 0
        out *= math.comb(int(a), int(b))
    return out


def wedge(t, s) -> tuple:
    """Componentwise minimum."""
    return tuple(min(int(a), int(b)) for a, b in zip(t, s))


def _degree_indices(n: int, deg: int) -> list[tuple]:
    if n == 1:
        return [(deg,)]
    out = []
    for first in range(deg + 1):
        out.extend((first,) + rest for rest in _degree_indices(n - 1, deg - first))
    return out


def basis_indices(n: int, cutoff: int) -> list[tuple]:
    """All t with |t| <= cutoff, graded lexicographic."""
    if n < 1 or cutoff < 0:
        raise ValueError("need n >= 1 and cutoff >= 0")
    out = []
    for deg in range(cutoff + 1):
        out.extend(_degree_indices(n, deg))
    return out


def basis_index_map(basis: list[tuple]) -> dict[tuple, int]:
    return {t: i for i, t in enumerate(basis)}


# ---------------------------------------------------------------------------
# Delta(t) and phi_B


def enumerate_delta(t) -> list[tuple]:
    """All upper-triangular nonnegative integer matrices R with r~(R) = t.

    r~(R)_i counts row i from the diagonal on plus column i up to the
    diagonal, so diagonal cells weigh twice.  Returned as tuples of row
    tuples in a fixed depth-first order; empty when |t| is odd.
    """
    t = tuple(int(x) for x in t)
    if any(x < 0 for x in t):
        raise ValueError("occupation numbers must be nonnegative")
    n = len(t)
    if sum(t) % 2:
        return []
    cells = [(i, j) for i in range(n) for j in range(i, n)]
    r = [[0] * n for _ in range(n)]
    rem = list(t)
    out: list[tuple] = []

    def rec(ci: int) -> None:
        if ci == len(cells):
            out.append(tuple(tuple(row) for row in r))
            return
        i, j = cells[ci]
        closes_row = j == n - 1  # no later cell touches index i
        if i == j:
            for v in range(rem[i] // 2 + 1):
                if closes_row and rem[i] - 2 * v != 0:
                    continue
                r[i][i] = v
                rem[i] -= 2 * v
                rec(ci + 1)
                rem[i] += 2 * v
            r[i][i] = 0
        else:
            for v in range(min(rem[i], rem[j]) + 1):
                if closes_row and rem[i] - v != 0:
                    continue
                r[i][j] = v
                rem[i] -= v
                rem[j] -= v
                rec(ci + 1)
                rem[i] += v
                rem[j] += v
            r[i][j] = 0

    rec(0)
    return out


class _PhiTable:
    """phi_B values memoized per occupation tuple for one fixed B."""

    def __init__(self, b: np.ndarray):
        self.b = np.asarray(b, dtype=complex)
        self.memo: dict[tuple, complex] = {}

    def __call__(self, t: tuple) -> complex:
        val = self.memo.get(t)
        if val is None:
            val = _phi_direct(self.b, t)
            self.memo[t] = val
        return val


def _phi_direct(b: np.ndarray, t: tuple) -> complex:
    total = 0.0 + 0.0j
    for r in enumerate_delta(t):
        term_num = 1
        term_den = 1
        coeff = 1.0 + 0.0j
        tr = 0
        size = 0
        for i, row in enumerate(r):
            for j in range(i, len(row)):
                rij = row[j]
                if rij:
                    coeff *= b[i, j] ** rij
                    term_den *= math.factorial(rij)
                    size += rij
                    if i == j:
                        tr += rij
        total += (2 ** (size - tr)) * coeff * (term_num / term_den)
    return complex(math.sqrt(multi_factorial(t)) * total)


_PHI_TABLES: dict[bytes, _PhiTable] = {}


def _phi_table(b: np.ndarray) -> _PhiTable:
    b = np.asarray(b, dtype=complex)
    key = b.tobytes()
    table = _PHI_TABLES.get(key)
    if table is None:
        if len(_PHI_TABLES) > 128:
            _PHI_TABLES.clear()
        table = _PhiTable(b)
        _PHI_TABLES[key] = table
    return table


def phi(b, t) -> complex:
    """phi_B(t) = sqrt(t!) sum over Delta(t) of 2^(|R|-tr R) B^R / R!.

    Zero whenever |t| is odd.  B must be complex symmetric.
    """
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    if np.abs(b - b.T).max() > 1e-12 * (1.0 + np.abs(b).max()):
        raise ValueError("B must be symmetric")
    return _phi_table(b)(tuple(int(x) for x in t))


# ---------------------------------------------------------------------------
# second quantization in the particle basis


def gamma_lambda_entry(lam, k, l) -> complex:
    """<k| Gamma(Lambda) |l>: coefficient of u^k v^l in exp(u^T Lambda v), normalized.

    Equals sqrt(k! l!) times the sum over nonnegative integer matrices R
    with row sums k and column sums l of prod Lambda_ij^R_ij / R_ij!.
    Vanishes unless |k| = |l|.  Evaluated exactly (cost grows
    combinatorially with |k|; fine at desk scale).
    """
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    k = tuple(int(x) for x in k)
    l = tuple(int(x) for x in l)
    if sum(k) != sum(l):
        return 0.0 + 0.0j
    memo: dict[tuple, complex] = {}
    g = _g_recursive(lam, k, l, memo)
    return complex(math.sqrt(multi_factorial(k) * multi_factorial(l)) * g)


def _g_recursive(lam: np.ndarray, k: tuple, l: tuple, memo: dict) -> complex:
    # g(k, l) = [u^k v^l] exp(u^T Lambda v); exact recursion
    # g(k, l) = (1/k_j) sum_i Lambda_ji sqrt-free g(k - e_j, l - e_i)
    if sum(k) == 0:
        return 1.0 if sum(l) == 0 else 0.0
    key = (k, l)
    val = memo.get(key)
    if val is not None:
        return val
    j = next(i for i, x in enumerate(k) if x > 0)
    km = k[:j] + (k[j] - 1,) + k[j + 1:]
    total = 0.0 + 0.0j
    for i, li in enumerate(l):
        if li > 0 and lam[j, i] != 0:
            lm = l[:i] + (li - 1,) + l[i + 1:]
            total += lam[j, i] * _g_recursive(lam, km, lm, memo)
    total /= k[j]
    memo[key] = total
    return total


def gamma_matrix(lam, cutoff: int, basis: list[tuple] | None = None) -> np.ndarray:
    """Block-diagonal matrix of Gamma(Lambda) on the truncated window."""
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    n = lam.shape[0]
    basis = basis if basis is not None else basis_indices(n, cutoff)
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    out[0, 0] = 1.0
    # per-degree blocks via the one-particle-removal recursion, vectorized
    offset = 1
    prev_idx = {(0,) * n: 0}
    prev_block = np.ones((1, 1), dtype=complex)
    for deg in range(1, cutoff + 1):
        sector = _degree_indices(n, deg)
        dim_m = len(sector)
        col_idx = {t: i for i, t in enumerate(sector)}
        # col_map[i][col] = previous-sector column of l - e_i (or -1)
        col_map = np.full((n, dim_m), -1, dtype=int)
        col_sqrt = np.zeros((n, dim_m))
        for ci, l in enumerate(sector):
            for i in range(n):
                if l[i] > 0:
                    lm = l[:i] + (l[i] - 1,) + l[i + 1:]
                    col_map[i, ci] = prev_idx[lm]
                    col_sqrt[i, ci] = math.sqrt(l[i])
        block = np.zeros((dim_m, dim_m), dtype=complex)
        for ri, k in enumerate(sector):
            j = next(i for i, x in enumerate(k) if x > 0)
            km = k[:j] + (k[j] - 1,) + k[j + 1:]
            prev_row = prev_block[prev_idx[km], :]
            acc = np.zeros(dim_m, dtype=complex)
            for i in range(n):
                if lam[j, i] == 0:
                    continue
                valid = col_map[i] >= 0
                acc[valid] += lam[j, i] * col_sqrt[i, valid] * prev_row[col_map[i, valid]]
            block[ri, :] = acc / math.sqrt(k[j])
        out[offset:offset + dim_m, offset:offset + dim_m] = block
        prev_idx = col_idx
        prev_block = block
        offset += dim_m
    return out


def psd_sqrt(lam, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root with eigenvalues clamped at zero."""
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    evals, evecs = np.linalg.eigh(0.5 * (lam + lam.conj().T))
    if evals[0] < -max(tol, 1e-12) * (1.0 + abs(evals[-1])):
        raise ValueError("Lambda is not positive semidefinite")
    root = evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    return 0.5 * (root + root.conj().T)


# ---------------------------------------------------------------------------
# truncated carriers


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense matrix over the graded particle basis with |t| <= cutoff."""

    n: int
    cutoff: int
    basis: tuple
    entries: np.ndarray
    hermitian: bool | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, t) -> int:
        return basis_index_map(list(self.basis))[tuple(int(x) for x in t)]

    def element(self, t, s) -> complex:
        imap = basis_index_map(list(self.basis))
        return complex(self.entries[imap[tuple(t)], imap[tuple(s)]])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def tail_bound(self) -> float:
        """Advisory estimate of the probability mass beyond the window.

        max(0, 1 - trace) plus a geometric extrapolation from the last two
        total-number shells; meaningful for (near-)unit-trace operators.
        """
        diag = self.entries.diagonal().real
        degrees = np.array([sum(t) for t in self.basis])
        deficit = max(0.0, 1.0 - float(diag.sum()))
        last = float(diag[degrees == self.cutoff].sum())
        prev = float(diag[degrees == self.cutoff - 1].sum()) if self.cutoff >= 1 else 0.0
        # shells often alternate (odd shells can vanish); fall back one shell
        if prev <= 0.0 and self.cutoff >= 2:
            prev = float(diag[degrees == self.cutoff - 2].sum())
            last = max(last, float(diag[degrees == self.cutoff - 1].sum()))
        extrapolated = 0.0
        if 0.0 < last < prev:
            ratio = last / prev
            extrapolated = last * ratio / (1.0 - ratio)
        return deficit + extrapolated

    def dagger(self) -> "TruncatedOperator":
        return TruncatedOperator(self.n, self.cutoff, self.basis,
                                 self.entries.conj().T.copy(), self.hermitian)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "cutoff": self.cutoff,
            "basis": [list(t) for t in self.basis],
            "entries": [io.complex_pair(z) for z in self.entries.reshape(-1)],
        }

    def to_csv(self) -> str:
        cols = [f"t{j+1}" for j in range(self.n)] + [f"s{j+1}" for j in range(self.n)]
        lines = [",".join(cols + ["re", "im"])]
        for i, t in enumerate(self.basis):
            for j, s in enumerate(self.basis):
                z = self.entries[i, j]
                vals = [str(x) for x in t] + [str(x) for x in s]
                lines.append(",".join(vals + [format(z.real, ".17g"), format(z.imag, ".17g")]))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TruncatedVector:
    """Dense vector over the graded particle basis with |t| <= cutoff."""

    n: int
    cutoff: int
    basis: tuple
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, t) -> complex:
        return complex(self.entries[basis_index_map(list(self.basis))[tuple(int(x) for x in t)]])

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "cutoff": self.cutoff,
            "basis": [list(t) for t in self.basis],
            "entries": [io.complex_pair(z) for z in self.entries],
        }

    def to_csv(self) -> str:
        cols = [f"t{j+1}" for j in range(self.n)]
        lines = [",".join(cols + ["re", "im"])]
        for i, t in enumerate(self.basis):
            z = self.entries[i]
            lines.append(",".join([str(x) for x in t]
                                  + [format(z.real, ".17g"), format(z.imag, ".17g")]))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# matrices of the factorization and the general window


def _coeff_table(b: np.ndarray, mu: np.ndarray, basis: list[tuple]) -> dict[tuple, complex]:
    """f(x) = sum_{k <= x} mu^k / k! * phi_B(x - k) / sqrt((x - k)!) for each x in basis."""
    table = _phi_table(b)
    out: dict[tuple, complex] = {}
    mu = np.asarray(mu, dtype=complex).reshape(-1)
    plain = not np.any(mu)
    for x in basis:
        if plain:
            out[x] = table(x) / math.sqrt(multi_factorial(x))
            continue
        acc = 0.0 + 0.0j
        for k in product(*(range(xi + 1) for xi in x)):
            muk = 1.0 + 0.0j
            for mj, kj in zip(mu, k):
                if kj:
                    muk *= mj ** kj
            if muk == 0:
                continue
            rest = tuple(xi - ki for xi, ki in zip(x, k))
            acc += muk / multi_factorial(k) * table(rest) / math.sqrt(multi_factorial(rest))
        out[x] = acc
    return out


def _creation_matrix(a: np.ndarray, mu: np.ndarray, basis: list[tuple]) -> np.ndarray:
    """Lower-triangular matrix E(t, s) = sqrt(t!/s!) f_{A,mu}(t - s) for s <= t."""
    coeffs = _coeff_table(a, mu, basis)
    imap = basis_index_map(basis)
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    sqrt_fact = [math.sqrt(multi_factorial(t)) for t in basis]
    for ti, t in enumerate(basis):
        for s in product(*(range(x + 1) for x in t)):
            diff = tuple(a_ - b_ for a_, b_ in zip(t, s))
            if sum(diff) % 2 and not np.any(mu):
                continue
            si = imap[s]
            out[ti, si] = sqrt_fact[ti] / sqrt_fact[si] * coeffs[diff]
    return out


def e_a_matrix(a, cutoff: int) -> TruncatedOperator:
    """Matrix E_A(t, s) = sqrt(binom(t, s)) phi_A(t - s) for s <= t, else 0."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if np.abs(a - a.T).max() > 1e-12 * (1.0 + np.abs(a).max()):
        raise ValueError("A must be symmetric")
    n = a.shape[0]
    basis = basis_indices(n, cutoff)
    zero = np.zeros(n, dtype=complex)
    mat = _creation_matrix(a, zero, basis)
    return TruncatedOperator(n, cutoff, tuple(basis), mat)


def dmf(a, lam, cutoff: int, tol: float = DEFAULT_TOL) -> TruncatedOperator:
    """Density matrix formula: c(A, Lambda) E_A Gamma(Lambda) E_A^dagger.

    Mean-zero states only; exact entrywise on the truncated window.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    if not is_valid_state(a, lam, tol):
        raise InvalidStateError("(A, Lambda) is not a valid Gaussian state")
    n = a.shape[0]
    basis = basis_indices(n, cutoff)
    e_a = _creation_matrix(a, np.zeros(n, dtype=complex), basis)
    gam = gamma_matrix(lam, cutoff, basis)
    rho = c_factor(a, lam, tol) * (e_a @ gam @ e_a.conj().T)
    rho = 0.5 * (rho + rho.conj().T)
    return TruncatedOperator(n, cutoff, tuple(basis), rho, hermitian=True)


def matrix_element(a, lam, t, s, tol: float = DEFAULT_TOL) -> complex:
    """Single entry <t| rho(A, Lambda) |s> without building the window.

    Sum over s1 <= t, s2 <= s with |s1| = |s2| of
    E_A(t, s1) <s1|Gamma(Lambda)|s2> conj(E_A(s, s2)), times c(A, Lambda).
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    lam = np.atleast_2d(np.asarray(lam, dtype=complex))
    if not is_valid_state(a, lam, tol):
        raise InvalidStateError("(A, Lambda) is not a valid Gaussian state")
    t = tuple(int(x) for x in t)
    s = tuple(int(x) for x in s)
    table = _phi_table(a)
    diagonal = np.abs(lam - np.diag(np.diag(lam))).max() == 0
    lam_diag = np.diag(lam)
    total = 0.0 + 0.0j
    memo: dict[tuple, complex] = {}
    for s1 in product(*(range(x + 1) for x in t)):
        e1 = math.sqrt(multi_binomial(t, s1)) * table(tuple(x - y for x, y in zip(t, s1)))
        if e1 == 0:
            continue
        if diagonal:
            if not all(y <= x for x, y in zip(s, s1)):
                continue
            lam_pow = np.prod(lam_diag ** np.array(s1)) if sum(s1) else 1.0
            e2 = math.sqrt(multi_binomial(s, s1)) * table(tuple(x - y for x, y in zip(s, s1)))
            total += e1 * lam_pow * np.conj(e2)
        else:
            d1 = sum(s1)
            for s2 in product(*(range(x + 1) for x in s)):
                if sum(s2) != d1:
                    continue
                e2 = math.sqrt(multi_binomial(s, s2)) * table(tuple(x - y for x, y in zip(s, s2)))
                if e2 == 0:
                    continue
                key = (s1, s2)
                gam = memo.get(key)
                if gam is None:
                    gam = gamma_lambda_entry(lam, s1, s2)
                    memo[key] = gam
                total += e1 * gam * np.conj(e2)
    return complex(c_factor(a, lam, tol) * total)


def mixing_kernel_element(a, lam_vec, t, s, tol: float = DEFAULT_TOL) -> complex:
    """<t| rho(A, D_lambda) |s> through the mixing kernel acting on |psi_A><psi_A|.

    (c(A, D)/c(A, 0)) sum_{r <= t ^ s} sqrt(binom(t,r) binom(s,r)) lambda^r
    <t - r|psi_A><psi_A|s - r>.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    lam_vec = np.asarray(lam_vec, dtype=float).reshape(-1)
    d = np.diag(lam_vec.astype(complex))
    t = tuple(int(x) for x in t)
    s = tuple(int(x) for x in s)
    table = _phi_table(a)
    c_ratio = c_factor(a, d, tol) / c_factor(a, np.zeros_like(d), tol)
    cpure = c_factor(a, np.zeros_like(d), tol)
    total = 0.0 + 0.0j
    for r in product(*(range(min(x, y) + 1) for x, y in zip(t, s))):
        weight = math.sqrt(multi_binomial(t, r) * multi_binomial(s, r))
        lam_pow = np.prod(lam_vec ** np.array(r)) if sum(r) else 1.0
        amp_t = table(tuple(x - y for x, y in zip(t, r)))
        amp_s = table(tuple(x - y for x, y in zip(s, r)))
        total += weight * lam_pow * cpure * amp_t * np.conj(amp_s)
    return complex(c_ratio * total)


def pure_state_vector(a, cutoff: int, tol: float = DEFAULT_TOL) -> TruncatedVector:
    """|psi_A> entries sqrt(c(A, 0)) phi_A(t) on the window; needs ||A|| < 1/2."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if np.linalg.norm(a, 2) >= 0.5:
        raise InvalidStateError("2A must be a strict contraction for a pure state")
    n = a.shape[0]
    basis = basis_indices(n, cutoff)
    table = _phi_table(a)
    root_c = math.sqrt(c_factor(a, np.zeros((n, n)), tol))
    entries = np.array([root_c * table(t) for t in basis], dtype=complex)
    return TruncatedVector(n, cutoff, tuple(basis), entries)


def z1_matrix(p: E2Params, cutoff: int, tol: float = DEFAULT_TOL) -> TruncatedOperator:
    """Matrix of Z1 = sqrt(c) Gamma(sqrt(Lambda)) exp(conj(mu)^T a + a^T conj(A) a).

    Z1^dagger Z1 reproduces the positive operator with parameters p
    exactly on the window.
    """
    n = p.n
    basis = basis_indices(n, cutoff)
    root_lam = psd_sqrt(p.lam, tol)
    gam = gamma_matrix(root_lam, cutoff, basis)
    # annihilation side: <m| exp(...) |t> = sqrt(t!/m!) f_{conj(A), conj(mu)}(t - m)
    k = _creation_matrix(p.a.conj(), p.mu.conj(), basis)
    mat = math.sqrt(p.c) * (gam @ k.T)
    return TruncatedOperator(n, cutoff, tuple(basis), mat)


def general_truncate(p: GeneralE2Params, cutoff: int) -> TruncatedOperator:
    """Window matrix of any 6-tuple element: entries <r|Z|s> from its power series.

    Assembled as c * E_left Gamma(Lambda) E_right^T with E_left built from
    (A, alpha) and E_right from (B, beta); exact on the window because the
    left factor lowers, Gamma preserves and the right factor raises the
    particle number.
    """
    n = p.n
    basis = basis_indices(n, cutoff)
    left = _creation_matrix(p.a, p.alpha, basis)
    right = _creation_matrix(p.b, p.beta, basis)
    gam = gamma_matrix(p.lam, cutoff, basis)
    mat = p.c * (left @ gam @ right.T)
    herm = None
    if p.is_self_adjoint(1e-12):
        mat = 0.5 * (mat + mat.conj().T)
        herm = True
    return TruncatedOperator(n, cutoff, tuple(basis), mat, hermitian=herm)
