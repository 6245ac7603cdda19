"""Dense complex linear-algebra kernels.

Eigendecomposition of general (non-normal) matrices, the matrix exponential,
singular-value based norms, numerical rank, spectral gaps, and multiplicity
diagnosis. Everything here operates on plain square complex ndarrays; all
matrices in this package are small (<= ~100 x 100 superoperators), so the
kernels prioritize robustness over asymptotics.

The heavy lifting is delegated to LAPACK through numpy/scipy: ``eig`` uses
the Hessenberg-reduction + shifted-QR driver, ``expm`` the degree-13 Pade
scaling-and-squaring scheme, ``svd_norms`` bidiagonalization-based SVD. The
contracts (residual checks, error types) are enforced on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import CLUSTER_TOL, EIG_RESIDUAL_TOL, RANK_TAU
from .exceptions import DimensionMismatch, NonConvergence, NonFinite


def as_square_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex128 array, rejecting NaN/Inf entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return A


@dataclass
class Spectrum:
    """Eigenvalues of a matrix together with per-eigenpair residuals.

    ``residuals[i]`` is ``||M v_i - lambda_i v_i||_2 / ||M||_F`` for the
    computed (unit-norm) right eigenvector ``v_i``; ``eig`` guarantees every
    residual is below ``EIG_RESIDUAL_TOL``. ``cluster_tolerance`` records the
    default tolerance downstream multiplicity clustering will use.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    cluster_tolerance: float = CLUSTER_TOL

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=complex).ravel()
        self.residuals = np.asarray(self.residuals, dtype=float).ravel()

    def __len__(self) -> int:
        return self.eigenvalues.size


def eig(M) -> Spectrum:
    """All eigenvalues (with multiplicity) of a square complex matrix.

    Reduction to Hessenberg form followed by shifted QR with deflation
    (LAPACK zgeev). Residuals are verified against ``EIG_RESIDUAL_TOL``
    relative to ``||M||_F``; failure to meet that bound, or failure of the
    QR iteration to deflate, raises ``NonConvergence``.
    """
    A = as_square_matrix(M)
    try:
        vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"QR iteration failed to converge: {exc}") from exc
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return Spectrum(vals, np.zeros(vals.size))
    residuals = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / scale
    if np.max(residuals) > EIG_RESIDUAL_TOL:
        raise NonConvergence(
            f"eigenpair residual {np.max(residuals):.3e} exceeds {EIG_RESIDUAL_TOL:.1e}"
        )
    return Spectrum(vals, residuals)


def expm(M) -> np.ndarray:
    """Matrix exponential e^M via degree-13 diagonal Pade with scaling and squaring."""
    A = as_square_matrix(M)
    return scipy.linalg.expm(A)


def expm_taylor(M, terms: int = 60) -> np.ndarray:
    """Plain truncated Taylor series for e^M.

    Independent cross-check for ``expm``; accurate for moderate norms only
    (||M||_F <~ 5), which is all the oracle role requires.
    """
    A = as_square_matrix(M)
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ A / k
        out = out + term
    return out


def svd_norms(M) -> tuple[float, float, float]:
    """(trace norm, operator norm, Frobenius norm) from the singular values.

    trace norm = sum of singular values, operator norm = largest singular
    value, Frobenius norm = l2 norm of the singular values.
    """
    A = as_square_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    return float(np.sum(s)), float(s[0]) if s.size else 0.0, float(np.sqrt(np.sum(s**2)))


def trace_norm(M) -> float:
    """Sum of singular values."""
    return svd_norms(M)[0]


def op_norm(M) -> float:
    """Largest singular value."""
    return svd_norms(M)[1]


def rank_tol(M, tau: float = RANK_TAU) -> int:
    """Number of singular values above ``tau`` times the largest one (0 for M = 0)."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    A = as_square_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tau * s[0]))


def min_gap(spectrum) -> float:
    """Minimum pairwise distance |lambda_i - lambda_j| over i < j.

    Accepts a ``Spectrum`` or any sequence of complex values. Returns +inf
    for fewer than two eigenvalues.
    """
    vals = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else spectrum
    vals = np.asarray(vals, dtype=complex).ravel()
    if vals.size < 2:
        return math.inf
    diffs = np.abs(vals[:, None] - vals[None, :])
    return float(np.min(diffs[np.triu_indices(vals.size, k=1)]))


def _lex_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def pair_spectra(a, b) -> list[tuple[int, int]]:
    """Greedy minimal-distance matching between two equal-length spectra.

    Pairs are consumed globally closest first; ties are broken by the
    lexicographic (re, im) order of the involved values, which makes the
    matching deterministic.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise DimensionMismatch(f"spectra lengths differ: {a.size} vs {b.size}")
    candidates = sorted(
        ((abs(a[i] - b[j]), _lex_key(a[i]), _lex_key(b[j]), i, j)
         for i in range(a.size) for j in range(b.size)),
        key=lambda t: t[:3],
    )
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, _, _, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        pairs.append((i, j))
        used_a.add(i)
        used_b.add(j)
        if len(pairs) == a.size:
            break
    return pairs


def spectra_distance(a, b) -> float:
    """Largest matched distance under greedy minimal-distance pairing."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0:
        return 0.0
    return max(abs(a[i] - b[j]) for i, j in pair_spectra(a, b))


def spectra_match(a, b, tol: float) -> bool:
    """Whether two spectra agree as multisets within ``tol``."""
    return spectra_distance(a, b) <= tol


def track_order(prev, curr) -> np.ndarray:
    """Reorder ``curr`` so each entry follows its nearest predecessor in ``prev``.

    Greedy nearest-neighbor pairing; used to keep eigenvalue trajectories
    continuous across consecutive grid points of a path scan. Label swaps can
    occur near crossings, which affects presentation only.
    """
    curr = np.asarray(curr, dtype=complex).ravel()
    out = np.empty_like(curr)
    for i, j in pair_spectra(prev, curr):
        out[i] = curr[j]
    return out


@dataclass
class EigenvalueCluster:
    """One cluster of numerically coincident eigenvalues."""

    value: complex
    algebraic: int
    geometric: int

    @property
    def defective(self) -> bool:
        return self.algebraic > self.geometric


@dataclass
class SpectrumReport:
    """Spectrum plus clustered multiplicities and defectiveness flags."""

    eigenvalues: np.ndarray
    clusters: list[EigenvalueCluster] = field(default_factory=list)
    min_gap: float = math.inf
    cluster_tolerance: float = CLUSTER_TOL

    @property
    def defective(self) -> bool:
        return any(c.defective for c in self.clusters)


def _cluster_indices(vals: np.ndarray, tol: float) -> list[list[int]]:
    """Connected components of the graph with edges |v_i - v_j| <= tol."""
    m = vals.size
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(m):
        for j in range(i + 1, m):
            if abs(vals[i] - vals[j]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: _lex_key(complex(vals[g[0]])))


def spectrum_report(M, cluster_tol: float = CLUSTER_TOL,
                    rank_tau: float = RANK_TAU) -> SpectrumReport:
    """Eigenvalues with clustered algebraic and geometric multiplicities.

    Algebraic multiplicity is the cluster size under tolerance-``cluster_tol``
    connectivity; geometric multiplicity is ``dim - rank(M - lambda I)`` at
    the cluster mean with relative singular-value cutoff ``rank_tau``.
    Only multiplicities are diagnosed; no Jordan chains are computed.
    """
    A = as_square_matrix(M)
    s = eig(A)
    vals = s.eigenvalues
    clusters = []
    for idx in _cluster_indices(vals, cluster_tol):
        lam = complex(np.mean(vals[idx]))
        geo = A.shape[0] - rank_tol(A - lam * np.eye(A.shape[0]), rank_tau)
        clusters.append(EigenvalueCluster(value=lam, algebraic=len(idx), geometric=geo))
    return SpectrumReport(
        eigenvalues=vals,
        clusters=clusters,
        min_gap=min_gap(s),
        cluster_tolerance=cluster_tol,
    )
