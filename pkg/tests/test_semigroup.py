import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from gausskit.core import SymplecticMap
from gausskit.errors import NonComposableError
from gausskit.fock import general_truncate, pure_state_vector
from gausskit.oracles import quadrature_gaussian
from gausskit.params import GeneralE2Params, state_params, trace_of_positive
from gausskit.semigroup import (
    adjoint_params,
    alpha_of_symplectic,
    compose,
    conjugate_by_gamma,
    conjugate_by_weyl,
    gamma0_params,
    identity_params,
    mean_of_state,
    second_quantization_params,
    weyl_params,
)

from conftest import params6_diff, random_state, random_symmetric


def random_symplectic(rng, n, layers=3):
    m = SymplecticMap(np.eye(2 * n))
    for _ in range(layers):
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = h + h.conj().T
        m = m @ SymplecticMap.from_unitary(expm(0.35j * h))
        m = m @ SymplecticMap.squeeze(0.4 * rng.normal(size=n))
    return m


class TestFamilies:
    def test_weyl_zero(self):
        assert params6_diff(weyl_params(np.zeros(2)), identity_params(2)) == 0.0

    def test_weyl_one_mode(self):
        p = weyl_params([1.0])
        assert abs(p.c - math.exp(-0.5)) < 1e-15
        assert p.alpha[0] == 1.0 and p.beta[0] == -1.0
        assert p.lam[0, 0] == 1.0 and p.a[0, 0] == 0.0 and p.b[0, 0] == 0.0

    def test_weyl_modulus(self, rng):
        for _ in range(5):
            z = rng.normal(size=3) + 1j * rng.normal(size=3)
            assert abs(abs(weyl_params(z).c) - math.exp(-0.5 * np.linalg.norm(z) ** 2)) < 1e-12

    def test_second_quantization(self):
        assert params6_diff(second_quantization_params(np.eye(2)), identity_params(2)) == 0.0
        vac = second_quantization_params(np.zeros((2, 2)))
        assert vac.c == 1.0 and np.abs(vac.lam).max() == 0.0

    def test_second_quantization_thermal_trace(self):
        lam = 0.35
        p = second_quantization_params(lam * np.eye(3)).as_positive()
        assert abs(trace_of_positive(p) - (1 - lam) ** -3) < 1e-12

    def test_second_quantization_rejects_expansion(self):
        with pytest.raises(ValueError):
            second_quantization_params(1.5 * np.eye(2))


class TestGamma0:
    def test_identity(self):
        assert params6_diff(gamma0_params(SymplecticMap(np.eye(4))),
                            identity_params(2)) < 1e-15

    def test_unitary_reduces_to_second_quantization(self, rng):
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = h + h.conj().T
        u = expm(1j * h)
        got = gamma0_params(SymplecticMap.from_unitary(u))
        assert params6_diff(got, second_quantization_params(u)) < 1e-12

    def test_one_mode_squeeze(self):
        r = 0.6
        g = gamma0_params(SymplecticMap.squeeze([r]))
        assert abs(g.c - math.cosh(r) ** -0.5) < 1e-13
        assert abs(g.a[0, 0] - 0.5 * math.tanh(r)) < 1e-13
        assert abs(g.lam[0, 0] - 1 / math.cosh(r)) < 1e-13
        assert abs(g.b[0, 0] + 0.5 * math.tanh(r)) < 1e-13

    def test_vacuum_image_is_pure_state_vector(self, rng):
        l = random_symplectic(rng, 2)
        g = gamma0_params(l)
        window = general_truncate(g, 16)
        vec = pure_state_vector(g.a, 16)
        np.testing.assert_allclose(window.entries[:, 0], vec.entries, atol=1e-10)

    def test_vacuum_amplitude(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            l = random_symplectic(rng, n)
            g = gamma0_params(l)
            assert abs(abs(g.c) - alpha_of_symplectic(l) ** -0.25) < 1e-12

    def test_unitarity_at_parameter_level(self, rng):
        for _ in range(5):
            n = int(rng.integers(1, 4))
            g = gamma0_params(random_symplectic(rng, n))
            assert params6_diff(compose(adjoint_params(g), g), identity_params(n)) < 1e-12

    def test_rejects_non_symplectic(self):
        with pytest.raises(ValueError):
            SymplecticMap(np.diag([1.0, 2.0]))


class TestAdjoint:
    def test_self_adjoint_fixed_point(self, rng):
        p = random_state(rng, 2).as_general()
        assert params6_diff(adjoint_params(p), p) < 1e-12

    def test_weyl_adjoint_is_negative_displacement(self, rng):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert params6_diff(adjoint_params(weyl_params(z)), weyl_params(-z)) < 1e-13

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=3), st.integers(min_value=0, max_value=10**6))
    def test_involution(self, n, seed):
        rng = np.random.default_rng(seed)
        p = GeneralE2Params(
            c=complex(rng.normal(), rng.normal()) or 1.0,
            alpha=rng.normal(size=n) + 1j * rng.normal(size=n),
            beta=rng.normal(size=n) + 1j * rng.normal(size=n),
            a=random_symmetric(rng, n, 1.0),
            lam=rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)),
            b=random_symmetric(rng, n, 1.0),
        )
        assert params6_diff(adjoint_params(adjoint_params(p)), p) == 0.0


class TestCompose:
    def test_weyl_commutation(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            u = rng.normal(size=n) + 1j * rng.normal(size=n)
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            got = compose(weyl_params(u), weyl_params(v))
            want = weyl_params(u + v)
            phase = np.exp(-1j * np.imag(np.vdot(u, v)))
            want = GeneralE2Params(phase * want.c, want.alpha, want.beta,
                                   want.a, want.lam, want.b)
            assert params6_diff(got, want) < 1e-12

    def test_second_quantization_functor(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 4))
            k1 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            k1 /= max(1.0, np.linalg.norm(k1, 2))
            k2 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            k2 /= max(1.0, np.linalg.norm(k2, 2))
            got = compose(second_quantization_params(k1), second_quantization_params(k2))
            assert params6_diff(got, second_quantization_params(k1 @ k2)) < 1e-12

    def test_vacuum_projector_idempotent(self):
        vac = second_quantization_params(np.zeros((2, 2)))
        assert params6_diff(compose(vac, vac), vac) < 1e-15

    def test_associativity(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 3))
            ps = [random_state(rng, n).as_general() for _ in range(3)]
            left = compose(compose(ps[0], ps[1]), ps[2])
            right = compose(ps[0], compose(ps[1], ps[2]))
            assert params6_diff(left, right) < 1e-9

    def test_adjoint_antihomomorphism(self, rng):
        p1 = random_state(rng, 2).as_general()
        p2 = weyl_params(rng.normal(size=2) + 1j * rng.normal(size=2))
        lhs = adjoint_params(compose(p1, p2))
        rhs = compose(adjoint_params(p2), adjoint_params(p1))
        assert params6_diff(lhs, rhs) < 1e-11

    def test_polar_positivity(self, rng):
        p = compose(adjoint_params(weyl_params([0.3 + 1j])),
                    gamma0_params(random_symplectic(rng, 1)))
        q = compose(adjoint_params(p), p)
        assert q.is_self_adjoint(1e-10)
        pos = q.as_positive(1e-10)
        assert pos.c > 0
        assert np.linalg.eigvalsh(pos.lam)[0] >= -1e-12

    def test_against_truncated_product(self, rng):
        for _ in range(5):
            n = int(rng.integers(1, 3))
            p1 = random_state(rng, n, a_norm=0.12).as_general()
            p2 = random_state(rng, n, a_norm=0.12).as_general()
            comp = compose(p1, p2)
            cutoff = 30
            m1 = general_truncate(p1, cutoff).entries
            m2 = general_truncate(p2, cutoff).entries
            mc = general_truncate(comp, cutoff).entries
            assert np.linalg.norm(m1 @ m2 - mc) <= 1e-6

    def test_against_quadrature(self):
        p1 = state_params([[0.1 + 0.05j]], [[0.2]], [0.2 - 0.1j]).as_general()
        p2 = state_params([[-0.08j]], [[0.15]], [0.1 + 0.3j]).as_general()
        comp = compose(p1, p2)
        for u, v in [(0.3 + 0.2j, -0.1 + 0.5j), (0.0, 0.0), (1.0, 1.0j)]:
            direct = comp.generating_function([u], [v])
            r = np.array([[1 - p1.b[0, 0] - p2.a[0, 0],
                           -1j * (p1.b[0, 0] - p2.a[0, 0])],
                          [-1j * (p1.b[0, 0] - p2.a[0, 0]),
                           1 + p1.b[0, 0] + p2.a[0, 0]]])
            pl = p1.beta[0] + p1.lam[0, 0] * u
            ql = p2.alpha[0] + p2.lam[0, 0] * v
            integral = quadrature_gaussian(r, np.array([pl + ql, 1j * (pl - ql)])) / math.pi
            integral *= p1.c * p2.c * np.exp(u * p1.alpha[0] + p2.beta[0] * v
                                             + p1.a[0, 0] * u * u + p2.b[0, 0] * v * v)
            assert abs(integral - direct) < 1e-8

    def test_non_composable_raises(self):
        # b1 + a2 >= 1 breaks integrability of the defining integral
        big = GeneralE2Params(1.0, [0.0], [0.0], [[0.6]], [[0.0]], [[0.6]])
        with pytest.raises(NonComposableError):
            compose(big, big)


class TestConjugations:
    def test_gamma_identity(self, rng):
        p = random_state(rng, 2)
        q = conjugate_by_gamma(p, np.eye(2))
        assert params6_diff(q.as_general(), p.as_general()) == 0.0

    def test_gamma_diagonalizes_lambda(self, rng):
        p = random_state(rng, 3)
        evecs = np.linalg.eigh(p.lam)[1]
        u = evecs.conj().T
        q = conjugate_by_gamma(p, u)
        off = q.lam - np.diag(np.diag(q.lam))
        assert np.abs(off).max() < 1e-12

    def test_permutation_fixes_theta_family(self):
        n = 3
        theta = 0.1
        a = theta * (np.ones((n, n)) - np.eye(n))
        p = state_params(a, np.zeros((n, n)))
        perm = np.eye(n)[[2, 0, 1]]
        q = conjugate_by_gamma(p, perm)
        assert params6_diff(q.as_general(), p.as_general()) < 1e-12

    def test_weyl_identity(self, rng):
        p = random_state(rng, 2)
        q = conjugate_by_weyl(p, np.zeros(2))
        assert params6_diff(q.as_general(), p.as_general()) < 1e-14

    def test_weyl_cancels_mean(self, rng):
        for _ in range(5):
            p = random_state(rng, int(rng.integers(1, 4)))
            q = conjugate_by_weyl(p, mean_of_state(p))
            assert np.abs(q.mu).max() < 1e-10
            assert abs(trace_of_positive(q) - 1.0) < 1e-10

    def test_weyl_leaves_quadratic_parameters(self, rng):
        p = random_state(rng, 2)
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        q = conjugate_by_weyl(p, z)
        assert np.abs(q.a - p.a).max() == 0.0
        assert np.abs(q.lam - p.lam).max() == 0.0

    def test_weyl_conjugation_against_operator_product(self):
        # W(-z) Z W(z) computed as a windowed matrix product
        p = state_params([[0.08 + 0.02j]], [[0.25]], [0.2 - 0.1j])
        z = np.array([0.4 - 0.3j])
        got = conjugate_by_weyl(p, z)
        cutoff = 40
        wz = general_truncate(weyl_params(z), cutoff).entries
        wmz = general_truncate(weyl_params(-z), cutoff).entries
        prod = wmz @ general_truncate(p.as_general(), cutoff).entries @ wz
        pred = general_truncate(got.as_general(), cutoff).entries
        inner = slice(0, 15)
        assert np.abs(prod[inner, inner] - pred[inner, inner]).max() < 1e-10


class TestMean:
    def test_mu_zero_gives_zero_mean(self, rng):
        p = random_state(rng, 3, with_mean=False)
        assert np.abs(mean_of_state(p)).max() < 1e-13

    def test_coherent_mean_equals_mu(self):
        z = np.array([0.3 - 0.4j])
        p = state_params([[0.0]], [[0.0]], z)
        np.testing.assert_allclose(mean_of_state(p), z, atol=1e-13)

    def test_consistency_with_covariances(self, rng):
        from gausskit.params import e2_to_cov
        p = random_state(rng, 2)
        np.testing.assert_allclose(mean_of_state(p), e2_to_cov(p).m, atol=1e-12)
