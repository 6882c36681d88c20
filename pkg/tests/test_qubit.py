import math

import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, shannon_bits
from ensemble_coherence.qubit import (
    IDENTITY,
    PAULI_Z,
    DomainError,
    InvariantError,
    MeasurementBasis,
    binary_entropy,
    bloch_vector,
    check_density,
    eigen2,
    from_bloch,
    ket,
    matrix_sqrt_psd,
    projector,
    von_neumann_entropy,
)


def riemann_log2(x, terms=1_000_000):
    """log2(x) for x in (0, 1] as -integral_x^1 dt/t / ln 2, midpoint rule."""
    t = x + (1 - x) * (np.arange(terms) + 0.5) / terms
    ln = -np.sum(1.0 / t) * (1 - x) / terms
    ln2 = np.sum(1.0 / (1 + (np.arange(terms) + 0.5) / terms)) / terms
    return ln / ln2


class TestBinaryEntropy:
    def test_endpoints_and_peak(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)

    def test_against_riemann_oracle(self):
        x = 0.146447
        oracle = -x * riemann_log2(x) - (1 - x) * riemann_log2(1 - x)
        assert binary_entropy(x) == pytest.approx(oracle, abs=1e-9)
        assert binary_entropy(x) == pytest.approx(0.60088, abs=1e-4)

    def test_symmetry_on_grid(self):
        x = np.linspace(0.0, 1.0, 10_000)
        assert np.max(np.abs(binary_entropy(x) - binary_entropy(1 - x))) <= 1e-14

    def test_clamps_tiny_excursions(self):
        assert binary_entropy(-1e-12) == 0.0
        assert binary_entropy(1 + 1e-12) == 0.0

    @pytest.mark.parametrize("bad", [-1e-6, 1.001, float("nan")])
    def test_domain_error(self, bad):
        with pytest.raises(DomainError):
            binary_entropy(bad)

    @given(st.floats(0.0, 1.0))
    def test_range(self, x):
        assert 0.0 <= binary_entropy(x) <= 1.0


class TestVonNeumann:
    def test_maximally_mixed(self):
        assert von_neumann_entropy(IDENTITY / 2) == pytest.approx(1.0, abs=1e-15)

    def test_pure(self):
        assert von_neumann_entropy(projector(ket(1, 1j))) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_example(self):
        rho = np.diag([0.853553, 0.146447]).astype(complex)
        oracle = shannon_bits(np.linalg.eigvalsh(rho))
        assert von_neumann_entropy(rho) == pytest.approx(oracle, abs=1e-12)
        assert von_neumann_entropy(rho) == pytest.approx(0.60088, abs=1e-4)

    def test_random_against_eigvalsh(self, rng):
        rhos = random_density(rng, 500)
        ours = von_neumann_entropy(rhos)
        oracle = np.array([shannon_bits(np.clip(np.linalg.eigvalsh(r), 0, None)) for r in rhos])
        assert np.max(np.abs(ours - oracle)) <= 1e-10
        assert np.all((ours >= 0) & (ours <= 1))

    @pytest.mark.parametrize(
        "rho",
        [np.diag([1.2, -0.2]), np.array([[0.5, 0.4], [0.1, 0.5]]), np.diag([0.6, 0.6])],
        ids=["negative", "non-hermitian", "trace"],
    )
    def test_rejects_invalid(self, rho):
        with pytest.raises(InvariantError):
            von_neumann_entropy(rho)


class TestEigen2:
    def test_identity_degenerate(self):
        vals, vecs = eigen2(IDENTITY)
        assert np.allclose(vals, [1, 1])
        assert np.allclose(vecs, IDENTITY)

    def test_pauli_z(self):
        vals, vecs = eigen2(PAULI_Z)
        assert np.allclose(vals, [1, -1])
        assert np.allclose(np.abs(vecs), IDENTITY)

    def test_quadratic_formula_example(self):
        h = np.array([[0.75, 0.25], [0.25, 0.25]])
        tr, det = np.trace(h), np.linalg.det(h)
        disc = math.sqrt(tr * tr / 4 - det)
        vals, vecs = eigen2(h)
        assert vals == pytest.approx([tr / 2 + disc, tr / 2 - disc], abs=1e-12)
        assert vals == pytest.approx([0.853553, 0.146447], abs=1e-6)
        for k in range(2):
            assert np.max(np.abs(h @ vecs[:, k] - vals[k] * vecs[:, k])) <= 1e-12

    def test_reconstruction_random(self, rng):
        m = rng.normal(size=(10_000, 2, 2)) + 1j * rng.normal(size=(10_000, 2, 2))
        h = m + np.swapaxes(m, 1, 2).conj()
        vals, vecs = eigen2(h)
        rebuilt = np.einsum("nik,nk,njk->nij", vecs, vals, vecs.conj())
        assert np.max(np.abs(rebuilt - h)) <= 1e-10
        assert np.all(vals[:, 0] >= vals[:, 1])
        oracle = np.linalg.eigvalsh(h)[:, ::-1]
        assert np.max(np.abs(vals - oracle)) <= 1e-10

    def test_near_pole_accuracy(self):
        h = np.array([[1.0, 1e-9], [1e-9, -1.0]], dtype=complex)
        vals, vecs = eigen2(h)
        rebuilt = vecs @ np.diag(vals) @ vecs.conj().T
        assert np.max(np.abs(rebuilt - h)) <= 1e-15

    @pytest.mark.parametrize("tiny", [1e-8, 1e-12, 1e-15])
    def test_small_eigenvalue_relative_accuracy(self, tiny):
        # rotated diag(1 - tiny, tiny): the small eigenvalue must not cancel away
        c, s = math.cos(0.3), math.sin(0.3)
        u = np.array([[c, -s], [s, c]], dtype=complex)
        h = u @ np.diag([1 - tiny, tiny]) @ u.T
        vals, _ = eigen2(h)
        with mpmath.workdps(50):
            exact = mpmath.eigh(mpmath.matrix(h.real.tolist()))[0]
        assert abs(vals.min() - float(min(exact))) <= 1e-6 * tiny + 1e-17


class TestSqrt:
    def test_identity(self):
        assert np.allclose(matrix_sqrt_psd(IDENTITY), IDENTITY)

    def test_diagonal(self):
        s = matrix_sqrt_psd(np.diag([0.25, 0.75]))
        assert np.allclose(s, np.diag([0.5, 0.8660254037844386]), atol=1e-9)

    def test_projector_idempotent(self):
        p = projector(ket(1, 2 - 1j))
        assert np.allclose(matrix_sqrt_psd(p), p, atol=1e-10)

    def test_random_psd(self, rng):
        rho = random_density(rng, 10_000)
        s = matrix_sqrt_psd(rho)
        assert np.max(np.abs(s @ s - rho)) <= 1e-10
        sample = rho[:50]
        assert np.max(np.abs(matrix_sqrt_psd(sample) - np.array([scipy.linalg.sqrtm(r) for r in sample]))) <= 1e-7

    def test_negative_raises(self):
        with pytest.raises(InvariantError):
            matrix_sqrt_psd(np.diag([1.0, -0.1]))


class TestBasis:
    def test_orthogonality_random(self, rng):
        for theta, phi in zip(rng.uniform(0, math.pi, 10_000), rng.uniform(0, 2 * math.pi, 10_000)):
            b = MeasurementBasis(theta, phi)
            assert abs(np.vdot(b.e1, b.e2)) <= 1e-12

    def test_named_bases(self):
        assert np.allclose(MeasurementBasis.computational().e1, [1, 0])
        h = MeasurementBasis.hadamard()
        assert np.allclose(h.e1, np.array([1, 1]) / math.sqrt(2))
        assert np.allclose(h.projectors().sum(axis=0), IDENTITY)

    def test_bloch_direction(self):
        b = MeasurementBasis(0.7, 1.3)
        r = bloch_vector(projector(b.e1))
        assert np.allclose(r, b.bloch)
        assert np.allclose(r, [math.sin(0.7) * math.cos(1.3), math.sin(0.7) * math.sin(1.3), math.cos(0.7)])


@settings(max_examples=200)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_roundtrip(x, y, z):
    r = np.array([x, y, z])
    if np.linalg.norm(r) > 1:
        r /= np.linalg.norm(r)
    rho = check_density(from_bloch(r))
    assert np.allclose(bloch_vector(rho), r, atol=1e-14)


def test_ket_normalization():
    with pytest.raises(DomainError):
        ket(0, 0)
    with pytest.raises(InvariantError):
        ket(1, 1, normalize=False)
    assert np.linalg.norm(ket(3, 4j)) == pytest.approx(1.0, abs=1e-15)
