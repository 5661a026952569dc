import numpy as np
import pytest

from gausskit.params import E2Params, GeneralE2Params, state_params


def random_symmetric(rng, n, norm=0.15):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = a + a.T
    return a * (norm / max(np.linalg.norm(a, 2), 1e-12))


def random_psd(rng, n, norm=0.25):
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    lam = w @ w.conj().T
    return lam * (norm / max(np.linalg.norm(lam, 2), 1e-12))


def random_state(rng, n, with_mean=True, a_norm=0.15, lam_norm=0.25) -> E2Params:
    """A valid normalized state; shrinks (A, Lambda) until M(A, Lambda) > 0."""
    from gausskit.params import is_valid_state

    a = random_symmetric(rng, n, a_norm)
    lam = random_psd(rng, n, lam_norm)
    while not is_valid_state(a, lam):
        a = a * 0.8
        lam = lam * 0.8
    mu = 0.4 * (rng.normal(size=n) + 1j * rng.normal(size=n)) if with_mean \
        else np.zeros(n, dtype=complex)
    return state_params(a, lam, mu)


def params6_diff(p: GeneralE2Params, q: GeneralE2Params) -> float:
    return max(
        abs(p.c - q.c),
        np.abs(p.alpha - q.alpha).max(initial=0.0),
        np.abs(p.beta - q.beta).max(initial=0.0),
        np.abs(p.a - q.a).max(),
        np.abs(p.lam - q.lam).max(),
        np.abs(p.b - q.b).max(),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
