"""Channel data model: representations, conversions, and class certificates.

A linear map Phi on n x n complex matrices is carried in one of four
representations:

* ``Superoperator`` -- the n^2 x n^2 matrix M with vec(Phi(X)) = M vec(X),
  where vec stacks rows: vec(|j><k|) = e_j (x) e_k.
* ``ChoiMatrix`` -- J(Phi) = sum_{j,k} |j><k| (x) Phi(|j><k|), unnormalized
  (trace n for trace-preserving maps), positive semi-definite iff Phi is
  completely positive.
* ``KrausSet`` -- operators K_i with Phi(X) = sum_i K_i X K_i^dag.
* ``PauliTransferMatrix`` -- qubit only: the real 4 x 4 matrix with entries
  (1/2) tr(sigma_j Phi(sigma_k)).

Conversions are lossless; spectra are invariant under the representation
used. ``certify`` produces numerical evidence of membership in the channel
and generator classes (trace-preserving, unital, completely positive, GKSL,
sampled positivity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import (
    POSITIVITY_SAMPLES,
    REFINE_STEPS,
    TOL_CP,
    TOL_GKSL,
    TOL_TP,
    TOL_UNITAL,
)
from .exceptions import DimensionMismatch, NotCP, NotQubit
from .numerics import as_square_matrix

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def vec(X: np.ndarray) -> np.ndarray:
    """Row-stacking vectorization: vec(|j><k|) = e_j (x) e_k."""
    return np.asarray(X, dtype=complex).reshape(-1)


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of ``vec`` for an n x n matrix."""
    return np.asarray(v, dtype=complex).reshape(n, n)


@dataclass
class Superoperator:
    """An n^2 x n^2 representation matrix acting on row-vectorized inputs."""

    n: int
    mat: np.ndarray

    def __post_init__(self):
        self.mat = as_square_matrix(self.mat, "superoperator matrix")
        if self.n < 1 or self.mat.shape[0] != self.n * self.n:
            raise DimensionMismatch(
                f"superoperator for n={self.n} needs shape "
                f"({self.n**2}, {self.n**2}), got {self.mat.shape}"
            )


@dataclass
class ChoiMatrix:
    """Unnormalized Choi matrix J(Phi) = sum_{j,k} |j><k| (x) Phi(|j><k|)."""

    n: int
    mat: np.ndarray

    def __post_init__(self):
        self.mat = as_square_matrix(self.mat, "Choi matrix")
        if self.n < 1 or self.mat.shape[0] != self.n * self.n:
            raise DimensionMismatch(
                f"Choi matrix for n={self.n} needs shape "
                f"({self.n**2}, {self.n**2}), got {self.mat.shape}"
            )


@dataclass
class KrausSet:
    """A nonempty list of n x n Kraus operators."""

    n: int
    operators: list

    def __post_init__(self):
        if not self.operators:
            raise DimensionMismatch("KrausSet needs at least one operator")
        self.operators = [as_square_matrix(K, "Kraus operator") for K in self.operators]
        for K in self.operators:
            if K.shape != (self.n, self.n):
                raise DimensionMismatch(
                    f"Kraus operator shape {K.shape} inconsistent with n={self.n}"
                )

    def completeness_residual(self) -> float:
        """||sum K_i^dag K_i - 1||_F (zero for trace-preserving sets)."""
        acc = sum(K.conj().T @ K for K in self.operators)
        return float(np.linalg.norm(acc - np.eye(self.n)))


@dataclass
class PauliTransferMatrix:
    """Real 4 x 4 Pauli transfer matrix of a qubit map (n = 2)."""

    mat: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.mat)
        if A.shape != (4, 4):
            raise DimensionMismatch(f"PTM must be 4 x 4, got {A.shape}")
        if np.iscomplexobj(A) and np.max(np.abs(A.imag)) > 1e-12:
            raise DimensionMismatch("PTM entries must be real")
        self.mat = np.asarray(A.real, dtype=float)

    @property
    def n(self) -> int:
        return 2


def identity_superop(n: int) -> Superoperator:
    """The identity channel on n x n matrices."""
    return Superoperator(n, np.eye(n * n, dtype=complex))


def compose(first: Superoperator, second: Superoperator) -> Superoperator:
    """Composition first o second (apply ``second`` to the input first)."""
    if first.n != second.n:
        raise DimensionMismatch(f"cannot compose maps on n={first.n} and n={second.n}")
    return Superoperator(first.n, first.mat @ second.mat)


def apply(s: Superoperator, rho) -> np.ndarray:
    """Apply the map to an n x n matrix: un-vec(M vec(rho))."""
    R = as_square_matrix(rho, "input matrix")
    if R.shape[0] != s.n:
        raise DimensionMismatch(f"input is {R.shape[0]} x {R.shape[0]}, map needs n={s.n}")
    return unvec(s.mat @ vec(R), s.n)


def _pauli_basis_matrix() -> np.ndarray:
    """Unitary whose columns are vec(sigma_k)/sqrt(2)."""
    return np.stack([vec(P) for P in PAULIS], axis=1) / np.sqrt(2.0)


def to_choi(s: Superoperator) -> ChoiMatrix:
    """Choi matrix from a superoperator; pure entry rearrangement.

    With row-stacking vec, J[(j,a),(k,b)] = M[(a,b),(j,k)], i.e. a reshuffle
    of the 4-index tensor with no arithmetic beyond copying.
    """
    n = s.n
    J = s.mat.reshape(n, n, n, n).transpose(2, 0, 3, 1).reshape(n * n, n * n)
    return ChoiMatrix(n, J)


def _choi_to_superop(c: ChoiMatrix) -> Superoperator:
    n = c.n
    M = c.mat.reshape(n, n, n, n).transpose(1, 3, 0, 2).reshape(n * n, n * n)
    return Superoperator(n, M)


def _kraus_to_superop(k: KrausSet) -> Superoperator:
    M = sum(np.kron(K, K.conj()) for K in k.operators)
    return Superoperator(k.n, M)


def _ptm_to_superop(p: PauliTransferMatrix) -> Superoperator:
    B = _pauli_basis_matrix()
    return Superoperator(2, B @ p.mat.astype(complex) @ B.conj().T)


def to_superop(x) -> Superoperator:
    """Convert any representation to the superoperator one."""
    if isinstance(x, Superoperator):
        return x
    if isinstance(x, ChoiMatrix):
        return _choi_to_superop(x)
    if isinstance(x, KrausSet):
        return _kraus_to_superop(x)
    if isinstance(x, PauliTransferMatrix):
        return _ptm_to_superop(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a superoperator")


def to_kraus(c: ChoiMatrix, cp_tol: float = TOL_CP) -> KrausSet:
    """Kraus operators from the eigendecomposition of a near-PSD Choi matrix.

    Eigenvalues below ``-cp_tol`` raise ``NotCP``; small negatives are
    clipped to zero and (near-)zero eigenvectors are dropped, so the number
    of operators equals the numerical Choi rank.
    """
    n = c.n
    H = 0.5 * (c.mat + c.mat.conj().T)
    w, V = np.linalg.eigh(H)
    if w.min() < -cp_tol:
        raise NotCP(f"Choi matrix has eigenvalue {w.min():.3e} < -{cp_tol:.1e}")
    w = np.clip(w, 0.0, None)
    cutoff = 1e-12 * max(w.max(), 1.0)
    ops = [np.sqrt(w[i]) * unvec(V[:, i], n).T for i in range(n * n) if w[i] > cutoff]
    if not ops:
        ops = [np.zeros((n, n), dtype=complex)]
    return KrausSet(n, ops)


def to_ptm(s: Superoperator) -> PauliTransferMatrix:
    """Pauli transfer matrix (1/2) tr(sigma_j Phi(sigma_k)) of a qubit map."""
    if s.n != 2:
        raise NotQubit(f"Pauli transfer matrix requires n=2, got n={s.n}")
    B = _pauli_basis_matrix()
    P = B.conj().T @ s.mat @ B
    return PauliTransferMatrix(P.real if np.max(np.abs(P.imag)) <= 1e-12 else P)


def ptrace_first(J: np.ndarray, n: int) -> np.ndarray:
    """Partial trace over the first tensor factor of an n^2 x n^2 matrix."""
    return np.einsum("jajb->ab", J.reshape(n, n, n, n))


def ptrace_second(J: np.ndarray, n: int) -> np.ndarray:
    """Partial trace over the second tensor factor of an n^2 x n^2 matrix."""
    return np.einsum("jaka->jk", J.reshape(n, n, n, n))


def max_entangled_projector(n: int) -> np.ndarray:
    """omega = |Omega><Omega| / n with |Omega> = sum_j |j>|j>."""
    omega = np.zeros(n * n, dtype=complex)
    omega[:: n + 1] = 1.0
    return np.outer(omega, omega.conj()) / n


@dataclass
class ClassCertificate:
    """Numerical evidence of class membership, with residuals.

    Residual fields are filled for every input regardless of ``kind``; the
    boolean flags interpret them against the global tolerance set for the
    declared kind. ``positivity_min_sample`` is a documented heuristic: it
    can refute positivity (when clearly negative) but never proves it. For
    generators the sampled functional is <phi|L(psi psi*)|phi> with phi
    orthogonal to psi, the sampled analogue of conditional positivity.
    """

    kind: str
    tp_residual: float
    unital_residual: float
    cp_min_eig: float
    gksl_trace_residual: float
    gksl_ccp_min_eig: float
    positivity_min_sample: float
    herm_residual: float

    @property
    def is_tp(self) -> bool:
        return self.tp_residual <= TOL_TP

    @property
    def is_unital(self) -> bool:
        return self.unital_residual <= TOL_UNITAL

    @property
    def is_cp(self) -> bool:
        return self.cp_min_eig >= -TOL_CP and self.herm_residual <= TOL_CP

    @property
    def is_cptp(self) -> bool:
        return self.is_tp and self.is_cp

    @property
    def is_gksl(self) -> bool:
        return (
            self.kind == "generator"
            and self.gksl_trace_residual <= TOL_GKSL
            and self.gksl_ccp_min_eig >= -TOL_GKSL
            and self.herm_residual <= TOL_GKSL
        )

    @property
    def positivity_refuted(self) -> bool:
        return self.positivity_min_sample < -TOL_CP

    def flags(self) -> dict:
        """Deterministic flag view used by reports."""
        return {
            "tp": self.is_tp,
            "unital": self.is_unital,
            "cp": self.is_cp,
            "cptp": self.is_cptp,
            "gksl": self.is_gksl,
            "positivity_refuted": self.positivity_refuted,
        }


def haar_pure(n: int, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """``size`` Haar-random pure states as rows of a (size, n) array.

    Each state consumes a consecutive block of the generator stream, so for
    a fixed seed the first k states of a larger batch equal a size-k batch
    (prefix-stable sampling).
    """
    z = rng.standard_normal((size, 2, n))
    z = z[:, 0, :] + 1j * z[:, 1, :]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _sampled_positivity(s: Superoperator, kind: str, rng: np.random.Generator,
                        samples: int, refine_steps: int) -> float:
    """min over sampled pure (psi, phi) of Re <phi|Phi(psi psi*)|phi>.

    For ``kind="generator"`` each phi is orthogonalized against its psi.
    The best (lowest) pair is polished by ``refine_steps`` random local
    perturbation steps with a shrinking step size.
    """
    n = s.n
    if n == 1:
        return float(s.mat.real[0, 0])
    psi = haar_pure(n, rng, samples)
    phi = haar_pure(n, rng, samples)
    if kind == "generator":
        overlap = np.sum(psi.conj() * phi, axis=1, keepdims=True)
        phi = phi - overlap * psi
        norms = np.linalg.norm(phi, axis=1, keepdims=True)
        norms[norms < 1e-12] = 1.0
        phi = phi / norms

    def batch_value(psis: np.ndarray, phis: np.ndarray) -> np.ndarray:
        rho = psis[:, :, None] * psis.conj()[:, None, :]
        out = rho.reshape(len(psis), n * n) @ s.mat.T
        out = out.reshape(len(psis), n, n)
        return np.real(np.einsum("sa,sab,sb->s", phis.conj(), out, phis))

    values = batch_value(psi, phi)
    best = int(np.argmin(values))
    best_val = float(values[best])
    bpsi, bphi = psi[best].copy(), phi[best].copy()
    step = 0.1
    for _ in range(refine_steps):
        cpsi = bpsi + step * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        cpsi /= np.linalg.norm(cpsi)
        cphi = bphi + step * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        if kind == "generator":
            cphi = cphi - (cpsi.conj() @ cphi) * cpsi
        nrm = np.linalg.norm(cphi)
        if nrm < 1e-12:
            continue
        cphi /= nrm
        val = float(batch_value(cpsi[None, :], cphi[None, :])[0])
        if val < best_val:
            best_val, bpsi, bphi = val, cpsi, cphi
        else:
            step *= 0.9
    return best_val


def certify(s: Superoperator, kind: str = "channel",
            rng: np.random.Generator | None = None,
            samples: int = POSITIVITY_SAMPLES,
            refine_steps: int = REFINE_STEPS) -> ClassCertificate:
    """Fill a full class certificate for a map or a generator.

    ``unital_residual`` is ||Phi(1) - 1||_F for channels and ||L(1)||_F for
    generators (the identity is fixed vs. annihilated). Certificates report;
    they never raise.
    """
    if kind not in ("channel", "generator"):
        raise ValueError(f"kind must be 'channel' or 'generator', got {kind!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    n = s.n
    J = to_choi(s).mat
    Jh = 0.5 * (J + J.conj().T)
    herm_residual = float(np.linalg.norm(J - J.conj().T))
    eye = np.eye(n)
    tp_residual = float(np.linalg.norm(ptrace_second(J, n) - eye))
    phi_of_id = ptrace_first(J, n)
    if kind == "channel":
        unital_residual = float(np.linalg.norm(phi_of_id - eye))
    else:
        unital_residual = float(np.linalg.norm(phi_of_id))
    cp_min_eig = float(np.linalg.eigvalsh(Jh).min())
    gksl_trace_residual = float(np.linalg.norm(ptrace_second(J, n)))
    Q = np.eye(n * n) - max_entangled_projector(n)
    gksl_ccp_min_eig = float(np.linalg.eigvalsh(Q @ Jh @ Q).min())
    positivity = _sampled_positivity(s, kind, rng, samples, refine_steps)
    return ClassCertificate(
        kind=kind,
        tp_residual=tp_residual,
        unital_residual=unital_residual,
        cp_min_eig=cp_min_eig,
        gksl_trace_residual=gksl_trace_residual,
        gksl_ccp_min_eig=gksl_ccp_min_eig,
        positivity_min_sample=positivity,
        herm_residual=herm_residual,
    )


def random_cptp(n: int, rng: np.random.Generator, k: int | None = None) -> Superoperator:
    """Random full-rank CPTP map from k Gaussian Kraus factors (default k = n^2).

    Draw G_i with iid complex Gaussian entries, set S = sum G_i^dag G_i and
    K_i = G_i S^{-1/2}; then sum K_i^dag K_i = 1 exactly.
    """
    if k is None:
        k = n * n
    G = rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))
    S = np.einsum("iab,iac->bc", G.conj(), G)
    w, V = np.linalg.eigh(S)
    S_inv_half = (V / np.sqrt(w)) @ V.conj().T
    return _kraus_to_superop(KrausSet(n, [g @ S_inv_half for g in G]))


def random_gksl(n: int, rng: np.random.Generator, scale: float = 1.0) -> Superoperator:
    """Random GKSL generator X - id from a random CPTP map X, scaled."""
    X = random_cptp(n, rng)
    return Superoperator(n, scale * (X.mat - np.eye(n * n)))
