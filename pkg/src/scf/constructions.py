"""Builders for the concrete maps used throughout the package.

* ``build_psi`` -- the unital CPTP map with n^2 distinct eigenvalues that
  every regularization procedure mixes toward. It scales diagonals by a
  doubly stochastic combination of the identity and a cyclic shift and
  multiplies each off-diagonal |j><k| by a distinct imaginary constant
  +/- i / (2^j 3^k); distinctness of the full spectrum follows from unique
  prime factorization.
* ``build_phi_mu`` -- the convex family of defective qubit channels mixing
  the unital reset channel with a maximally non-diagonalizable example.
* ``build_remark_family`` -- a two-parameter convex set of unital qubit
  channels that are non-diagonalizable whenever (a, b) != (0, 0).
* ``fujiwara_algoet`` -- the singular-value feasibility test that decides
  complete positivity for unital qubit transfer matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import PauliTransferMatrix, Superoperator, to_superop
from .exceptions import InfeasiblePTM, NotUnitalForm, OutOfRange


def cyclic_shift(n: int) -> np.ndarray:
    """Cyclic shift permutation C with C|k+1> = |k> (indices mod n), C^n = 1."""
    if n < 1:
        raise OutOfRange(f"dimension must be >= 1, got {n}")
    C = np.zeros((n, n), dtype=complex)
    for j in range(n):
        C[j, (j + 1) % n] = 1.0
    return C


def _delta(j: int, k: int) -> float:
    """delta_{jk} = 1 / (2^j 3^k) with 1-based indices j < k."""
    return 1.0 / (2.0**j * 3.0**k)


def psi_expected_spectrum(n: int) -> np.ndarray:
    """Closed-form spectrum of ``build_psi(n)``.

    The diagonal sector contributes {1/2 + 1/2 e^{2 pi i k / n}}, the
    off-diagonal sectors {+/- i / (2^j 3^k) : 1 <= j < k <= n}; all n^2
    values are distinct.
    """
    vals = [0.5 + 0.5 * np.exp(2j * np.pi * k / n) for k in range(n)]
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            vals.append(1j * _delta(j, k))
            vals.append(-1j * _delta(j, k))
    return np.array(vals, dtype=complex)


@dataclass
class PsiChannel:
    """The simple-spectrum unital CPTP perturber with its known spectrum."""

    n: int
    superop: Superoperator
    expected_spectrum: np.ndarray = field(repr=False)


def build_psi(n: int) -> PsiChannel:
    """Unital CPTP map on n x n matrices with n^2 distinct eigenvalues.

    Basis action (1-based indices): |j><j| maps to sum_l A_{lj} |l><l| with
    A = (1 + C)/2 for the cyclic shift C; |j><k| maps to i/(2^j 3^k) |j><k|
    for j < k and to -i/(2^k 3^j) |j><k| for j > k (the sign pattern makes
    the map Hermiticity-preserving).
    """
    if n < 1:
        raise OutOfRange(f"dimension must be >= 1, got {n}")
    if n == 1:
        warnings.warn("build_psi(1) is the identity map (degenerate case)", stacklevel=2)
        return PsiChannel(1, Superoperator(1, np.eye(1, dtype=complex)),
                          np.array([1.0 + 0j]))
    A = 0.5 * (np.eye(n) + cyclic_shift(n))
    M = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        for k in range(n):
            col = j * n + k
            if j == k:
                for l in range(n):
                    M[l * n + l, col] = A[l, j]
            elif j < k:
                M[col, col] = 1j * _delta(j + 1, k + 1)
            else:
                M[col, col] = -1j * _delta(k + 1, j + 1)
    return PsiChannel(n, Superoperator(n, M), psi_expected_spectrum(n))


def phi_mu_ptm(mu: float) -> PauliTransferMatrix:
    """Exact Pauli transfer matrix of the defective convex family."""
    if not 0.0 <= mu <= 1.0:
        raise OutOfRange(f"mu must lie in [0, 1], got {mu}")
    ptm = np.zeros((4, 4))
    ptm[0, 0] = 1.0
    ptm[1, 3] = -mu
    return PauliTransferMatrix(ptm)


def build_phi_mu(mu: float) -> Superoperator:
    """Convex family of defective unital qubit channels, mu in [0, 1].

    mu = 0 is the unital reset channel rho -> tr(rho) 1/2; mu = 1 is the
    non-diagonalizable example channel. For every mu > 0 the eigenvalue 0
    has algebraic multiplicity 3 but geometric multiplicity 2.
    """
    return to_superop(phi_mu_ptm(mu))


def remark_ptm(a: float, b: float) -> PauliTransferMatrix:
    """Exact Pauli transfer matrix of the two-parameter unital family.

    Raises ``InfeasiblePTM`` unless |a - b| <= 1 and |a + b| <= 1, decided
    through the Fujiwara-Algoet singular-value conditions.
    """
    ptm = np.zeros((4, 4))
    ptm[0, 0] = 1.0
    ptm[1, 2] = a
    ptm[2, 3] = b
    p = PauliTransferMatrix(ptm)
    feasible, s = fujiwara_algoet(p)
    if not feasible:
        raise InfeasiblePTM(
            f"(a, b) = ({a}, {b}) violates the unital qubit CP conditions; "
            f"singular values {tuple(round(x, 12) for x in s)}"
        )
    return p


def build_remark_family(a: float, b: float) -> Superoperator:
    """Two-parameter family of unital qubit channels, defective off (0, 0).

    The transfer matrix places ``a`` and ``b`` on the first superdiagonal of
    the lower-right 3 x 3 block; non-diagonalizable whenever (a, b) != (0, 0).
    """
    return to_superop(remark_ptm(a, b))


def fujiwara_algoet(ptm: PauliTransferMatrix,
                    tol: float = 1e-12) -> tuple[bool, tuple[float, float, float]]:
    """Complete-positivity test for unital trace-preserving qubit PTMs.

    Requires first row (1, 0, 0, 0) and first column (1, 0, 0, 0)^T. With
    s1 >= s2 >= s3 the ordered singular values of the lower-right 3 x 3
    block, the map is completely positive iff

        s1 + s2 <= 1 + s3   and   s1 - s2 <= 1 - s3.

    For unital qubit channels these conditions are necessary and sufficient.
    """
    P = ptm.mat
    border = np.concatenate([P[0, :] - np.array([1.0, 0, 0, 0]), P[1:, 0]])
    if np.max(np.abs(border)) > 1e-10:
        raise NotUnitalForm(
            "PTM must have first row (1,0,0,0) and first column (1,0,0,0)^T"
        )
    s = np.linalg.svd(P[1:, 1:], compute_uv=False)
    s1, s2, s3 = (float(x) for x in s)
    feasible = (s1 + s2 <= 1.0 + s3 + tol) and (s1 - s2 <= 1.0 - s3 + tol)
    return feasible, (s1, s2, s3)
