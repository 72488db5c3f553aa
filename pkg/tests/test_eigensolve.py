"""Eigendecomposition against the dense oracle, parity classification."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_decompose, dense_hamiltonian, random_mirror_arrays

from pstlab import (
    ChainSpec,
    EigensolveError,
    ParityViolation,
    SpectralData,
    canonical_chain,
    classify_parity,
    decompose,
    eigenvalues_only,
    end_amplitudes,
)


def random_chain(rng, n):
    return ChainSpec(
        diagonal=rng.uniform(-5.0, 5.0, n),
        couplings=rng.uniform(0.1, 10.0, n - 1),
    )


class TestSpectralData:
    def test_rejects_unordered_eigenvalues(self):
        with pytest.raises(EigensolveError, match="descending"):
            SpectralData(eigenvalues=np.array([1.0, 2.0]),
                         eigenvectors=np.eye(2))

    def test_rejects_degenerate_eigenvalues(self):
        with pytest.raises(EigensolveError, match="descending"):
            SpectralData(eigenvalues=np.array([1.0, 1.0]),
                         eigenvectors=np.eye(2))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            SpectralData(eigenvalues=np.array([1.0, 0.0]),
                         eigenvectors=np.eye(3))


class TestDecompose:
    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(2, 14))
            c = random_chain(rng, n)
            spectral = decompose(c)
            lam, vec = dense_decompose(c.diagonal, c.couplings)
            width = lam[0] - lam[-1]
            np.testing.assert_allclose(spectral.eigenvalues, lam,
                                       atol=1e-11 * width)
            np.testing.assert_allclose(spectral.eigenvectors, vec, atol=1e-8)

    def test_descending_and_orthonormal(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            c = random_chain(rng, int(rng.integers(2, 20)))
            spectral = decompose(c)
            assert np.all(np.diff(spectral.eigenvalues) < 0)
            gram = spectral.eigenvectors.T @ spectral.eigenvectors
            np.testing.assert_allclose(gram, np.eye(c.n_sites), atol=1e-12)

    def test_first_components_positive(self):
        # Jacobi matrices have nonvanishing first components; the sign fix
        # makes them all strictly positive
        rng = np.random.default_rng(13)
        for _ in range(10):
            c = random_chain(rng, int(rng.integers(2, 20)))
            assert np.all(decompose(c).eigenvectors[0, :] > 0)

    @settings(deadline=None, max_examples=40)
    @given(st.integers(2, 10), st.integers(0, 2**31 - 1))
    def test_reconstructs_hamiltonian(self, n, seed):
        # basis-independent check, stable even under near-degeneracy
        rng = np.random.default_rng(seed)
        c = random_chain(rng, n)
        spectral = decompose(c)
        h = spectral.eigenvectors @ np.diag(spectral.eigenvalues) @ spectral.eigenvectors.T
        scale = np.abs(spectral.eigenvalues).max()
        np.testing.assert_allclose(h, dense_hamiltonian(c.diagonal, c.couplings),
                                   atol=1e-12 * max(scale, 1.0))

    def test_eigenvalues_only_agrees(self):
        rng = np.random.default_rng(14)
        for _ in range(10):
            c = random_chain(rng, int(rng.integers(2, 24)))
            np.testing.assert_allclose(eigenvalues_only(c),
                                       decompose(c).eigenvalues,
                                       atol=1e-12)


class TestClassifyParity:
    def test_alternating_pattern_on_canonical_chains(self):
        for n in range(2, 17):
            c = canonical_chain(n)
            spectral = classify_parity(decompose(c), c)
            expected = np.where(np.arange(n) % 2 == 0, 1, -1)
            np.testing.assert_array_equal(spectral.parity_signs, expected)

    def test_vectors_are_exact_mirror_eigenvectors_after_classification(self):
        rng = np.random.default_rng(15)
        for _ in range(15):
            n = int(rng.integers(2, 20))
            b, j = random_mirror_arrays(rng, n)
            c = ChainSpec(diagonal=b, couplings=j)
            spectral = classify_parity(decompose(c), c)
            vec = spectral.eigenvectors
            mirrored = vec[::-1, :]
            np.testing.assert_allclose(mirrored, vec * spectral.parity_signs,
                                       atol=1e-12)

    def test_classification_preserves_eigen_accuracy(self):
        rng = np.random.default_rng(16)
        for _ in range(15):
            n = int(rng.integers(2, 20))
            b, j = random_mirror_arrays(rng, n)
            c = ChainSpec(diagonal=b, couplings=j)
            spectral = classify_parity(decompose(c), c)
            h = dense_hamiltonian(b, j)
            resid = h @ spectral.eigenvectors - spectral.eigenvectors * spectral.eigenvalues
            scale = np.abs(spectral.eigenvalues).max()
            assert np.abs(resid).max() < 1e-10 * scale
            gram = spectral.eigenvectors.T @ spectral.eigenvectors
            np.testing.assert_allclose(gram, np.eye(n), atol=1e-10)

    def test_asymmetric_chain_is_rejected(self):
        c = ChainSpec(diagonal=[0.0, 0.0, 0.0, 0.0], couplings=[1.0, 1.0, 2.0])
        with pytest.raises(ParityViolation, match="not mirror-symmetric"):
            classify_parity(decompose(c), c)


class TestEndAmplitudes:
    def test_positive_and_normalized(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            c = random_chain(rng, int(rng.integers(2, 20)))
            a = end_amplitudes(decompose(c))
            assert np.all(a > 0)
            assert np.sum(a * a) == pytest.approx(1.0, abs=1e-12)

    def test_returns_a_copy(self):
        c = canonical_chain(4)
        spectral = decompose(c)
        a = end_amplitudes(spectral)
        a[0] = 99.0
        assert spectral.eigenvectors[0, 0] != 99.0
