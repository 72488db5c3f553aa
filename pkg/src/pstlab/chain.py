"""Chain Hamiltonians, the mirror operator, and mirror traces.

A chain of N sites is the real symmetric tridiagonal operator h with on-site
fields B_1..B_N on the diagonal and strictly positive couplings J_1..J_{N-1}
on the off-diagonals.  The mirror operator S is the antidiagonal permutation
(site n <-> site N+1-n); a chain is mirror-symmetric when S h S = h, i.e.
B_n = B_{N+1-n} and J_n = J_{N-n}.

Tr(S M) is the sum of M's antidiagonal, called the mirror trace here.  For a
tridiagonal h the antidiagonal meets the band only at the center, so Tr(S h)
and Tr(S h^2) collapse to a handful of central entries; for mirror-symmetric
chains they also equal alternating sums over the ordered spectrum.  Those two
routes to the same number are the backbone of the speed audits in
:mod:`pstlab.bounds`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .eigensolve import SpectralData

__all__ = [
    "ChainSpec",
    "MirrorOperator",
    "TraceReport",
    "is_mirror_symmetric",
    "traceless_shift",
    "mirror_trace_h",
    "mirror_trace_h2",
    "eigen_side_traces",
    "trace_report",
]


def _readonly_float_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"field '{name}' must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"field '{name}' contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChainSpec:
    """An N-site chain: fields ``diagonal`` (B, length N) and ``couplings``
    (J, length N-1, all > 0)."""

    diagonal: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        b = _readonly_float_array(self.diagonal, "B")
        j = _readonly_float_array(self.couplings, "J")
        if b.size < 2:
            raise ValueError(f"field 'N' must be >= 2 (got {b.size})")
        if j.size != b.size - 1:
            raise ValueError(
                f"field 'J' must have length N-1 (got {j.size}, N={b.size})"
            )
        if not np.all(j > 0):
            raise ValueError("field 'J' must be strictly positive")
        object.__setattr__(self, "diagonal", b)
        object.__setattr__(self, "couplings", j)

    @property
    def n_sites(self) -> int:
        return self.diagonal.size

    @property
    def j_max(self) -> float:
        return float(self.couplings.max())

    @classmethod
    def from_dict(cls, data: dict) -> "ChainSpec":
        """Build from the JSON schema {"N": int, "B": [...], "J": [...]};
        "B" is optional and defaults to zeros."""
        if not isinstance(data, dict):
            raise ValueError("chain JSON must be an object")
        try:
            n = int(data["N"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("field 'N' missing or not an integer") from None
        if "J" not in data:
            raise ValueError("field 'J' is required")
        j = data["J"]
        b = data.get("B", [0.0] * n)
        chain = cls(diagonal=b, couplings=j)
        if chain.n_sites != n:
            raise ValueError(
                f"field 'N' ({n}) does not match length of 'B' ({chain.n_sites})"
            )
        return chain

    def to_dict(self) -> dict:
        return {
            "N": self.n_sites,
            "B": self.diagonal.tolist(),
            "J": self.couplings.tolist(),
        }

    def dense(self) -> np.ndarray:
        """The chain as a dense matrix (for inspection; nothing in the
        production path materializes this)."""
        h = np.diag(self.diagonal)
        h += np.diag(self.couplings, 1) + np.diag(self.couplings, -1)
        return h


@dataclass(frozen=True)
class MirrorOperator:
    """The antidiagonal permutation S on n sites; S^2 = 1, S = S^T."""

    n_sites: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")

    def apply(self, x) -> np.ndarray:
        """S @ x for a vector or matrix (reverses the site axis)."""
        return np.flip(np.asarray(x), axis=0)

    def matrix(self) -> np.ndarray:
        n = self.n_sites
        s = np.zeros((n, n))
        s[np.arange(n), n - 1 - np.arange(n)] = 1.0
        return s


def is_mirror_symmetric(chain: ChainSpec, tol: float = 1e-10) -> bool:
    """True when B and J are palindromes to a relative tolerance.

    The deviation is measured against max(|B|_inf, |J|_inf, 1), so exact
    zeros on the diagonal are compared absolutely against tol * (scale of J).
    """
    b, j = chain.diagonal, chain.couplings
    scale = max(np.abs(b).max(), np.abs(j).max(), 1.0)
    asym = max(
        np.abs(b - b[::-1]).max(),
        np.abs(j - j[::-1]).max(),
    )
    return bool(asym <= tol * scale)


def traceless_shift(chain: ChainSpec) -> ChainSpec:
    """The same chain with mean(B) subtracted from the diagonal.

    Couplings are shared bit-identically; the spectrum shifts rigidly by
    -mean(B), so gaps, t0 and J_max are untouched.
    """
    return ChainSpec(
        diagonal=chain.diagonal - chain.diagonal.mean(),
        couplings=chain.couplings,
    )


def mirror_trace_h(chain: ChainSpec) -> float:
    """Tr(S h): the antidiagonal sum of h.

    The antidiagonal entry (i, N-1-i) of a tridiagonal matrix is nonzero only
    where |2i - (N-1)| <= 1: the central diagonal entry for odd N, the two
    central couplings (both J_{N/2}) for even N.
    """
    n = chain.n_sites
    if n % 2:
        return float(chain.diagonal[(n - 1) // 2])
    jk = chain.couplings[n // 2 - 1]
    return float(jk + jk)


def mirror_trace_h2(chain: ChainSpec) -> float:
    """Tr(S h^2): the antidiagonal sum of h^2.

    h^2 is pentadiagonal, so for odd N the antidiagonal picks up the central
    entry (h^2)_{cc} = B_c^2 + J_{c-1}^2 + J_c^2 plus the two flanking entries
    J_{c-1} J_c, giving B_c^2 + (J_{c-1} + J_c)^2.  For even N it picks up the
    two entries J_{N/2} (B_{N/2} + B_{N/2+1}).
    """
    n = chain.n_sites
    b, j = chain.diagonal, chain.couplings
    if n % 2:
        c = (n - 1) // 2
        jl, jr = j[c - 1], j[c]
        return float(b[c] ** 2 + (jl + jr) ** 2)
    k = n // 2
    return float(2.0 * j[k - 1] * (b[k - 1] + b[k]))


def eigen_side_traces(spectral: "SpectralData") -> tuple[float, float]:
    """(sum_n sigma_n lambda_n, sum_n sigma_n lambda_n^2) from classified
    spectral data.

    For mirror-symmetric chains these equal Tr(S h) and Tr(S h^2): expanding
    the traces in the eigenbasis, S|lambda_n> = sigma_n |lambda_n> leaves the
    alternating sums.
    """
    if spectral.parity_signs is None:
        raise ValueError(
            "spectral data carries no parity signs; run classify_parity first"
        )
    lam = spectral.eigenvalues
    s = spectral.parity_signs
    return float(np.sum(s * lam)), float(np.sum(s * lam * lam))


@dataclass(frozen=True)
class TraceReport:
    """Both routes to the mirror traces: the antidiagonal sums of h and h^2
    next to the symmetric closed forms (2 J_{N/2} resp. 4 J_{N/2} B_{N/2} for
    even N; B_c resp. B_c^2 + 4 J_{(N-1)/2}^2 for odd N).  The h pair
    coincides structurally; the h^2 pair agrees exactly iff the center of the
    chain is symmetric (B_{N/2} = B_{N/2+1} resp. J_{c-1} = J_c)."""

    trace_sh: float
    trace_sh2: float
    closed_form_sh: float
    closed_form_sh2: float


def trace_report(chain: ChainSpec) -> TraceReport:
    n = chain.n_sites
    b, j = chain.diagonal, chain.couplings
    if n % 2:
        c = (n - 1) // 2
        closed_sh = float(b[c])
        closed_sh2 = float(b[c] ** 2 + 4.0 * j[c - 1] ** 2)
    else:
        k = n // 2
        closed_sh = float(2.0 * j[k - 1])
        closed_sh2 = float(4.0 * j[k - 1] * b[k - 1])
    return TraceReport(
        trace_sh=mirror_trace_h(chain),
        trace_sh2=mirror_trace_h2(chain),
        closed_form_sh=closed_sh,
        closed_form_sh2=closed_sh2,
    )
