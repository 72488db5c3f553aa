"""Shared corpora for the suite.

The session-scoped fixtures here pin the random corpora the acceptance tests
run on; seeds are frozen so every run exercises the same chains.
"""
import time

import numpy as np
import pytest

from oracles import random_mirror_arrays

from pstlab import ChainSpec, SpectrumSpec, certify, falsify_search, synthesize


@pytest.fixture(scope="session")
def mirror_corpus():
    """200 random mirror-symmetric chains, N in 2..32, entries in [0.1, 10]
    (116 even, 84 odd at this seed)."""
    rng = np.random.default_rng(71)
    chains = []
    for _ in range(200):
        n = int(rng.integers(2, 33))
        b, j = random_mirror_arrays(rng, n)
        chains.append(ChainSpec(diagonal=b, couplings=j))
    return chains


@pytest.fixture(scope="session")
def spectrum_corpus():
    """200 random strictly-descending spectra, N in 2..32, consecutive gap
    ratio bounded by 100 (gaps uniform in [1, 100] before scaling)."""
    rng = np.random.default_rng(72)
    spectra = []
    for _ in range(200):
        n = int(rng.integers(2, 33))
        gaps = rng.uniform(1.0, 100.0, n - 1)
        scale = rng.uniform(0.05, 5.0)
        lam = np.concatenate(([0.0], np.cumsum(gaps)))[::-1] * scale
        lam = lam - lam.mean() + rng.uniform(-5.0, 5.0)
        spectra.append(lam)
    return spectra


@pytest.fixture(scope="session")
def falsify_reports():
    """One 1e4-sample falsification search per N in 2..9 at cap 9, with the
    total wall time of the batch."""
    t0 = time.perf_counter()
    reports = {
        n: falsify_search(n, 10_000, 9, seed=100 + n) for n in range(2, 10)
    }
    elapsed = time.perf_counter() - t0
    return reports, elapsed


@pytest.fixture(scope="session")
def disorder_corpus():
    """50 certified chains plus symmetry-broken copies: random admissible
    spectra at N in 10..16 (odd multipliers up to 9), then every field and
    coupling shifted by +-1% of J_max with independent random signs."""
    rng = np.random.default_rng(73)
    entries = []
    for _ in range(50):
        n = int(rng.integers(10, 17))
        mult = rng.integers(0, 5, size=n - 1) * 2 + 1
        chain = synthesize(SpectrumSpec(unit=1.0, multipliers=mult))
        cert = certify(chain)
        assert cert.admissible
        scale = 0.01 * chain.j_max
        b = chain.diagonal + scale * rng.choice([-1.0, 1.0], size=n)
        j = chain.couplings + scale * rng.choice([-1.0, 1.0], size=n - 1)
        assert (j > 0).all()
        entries.append((chain, cert, ChainSpec(diagonal=b, couplings=j)))
    return entries
