"""scf -- simple-spectrum channel fixer.

Represent finite-dimensional quantum channels and their generators,
diagnose non-diagonalizability, and repair any channel or generator into an
epsilon-close member of the same class with only simple eigenvalues,
together with machine-checkable certificates.
"""

from .bounds import (
    NormBound,
    contraction_check,
    diamond_bounds,
    duhamel_residual,
    one_to_one_lower,
    psd_cert_lemma8,
)
from .channels import (
    ChoiMatrix,
    ClassCertificate,
    KrausSet,
    PauliTransferMatrix,
    Superoperator,
    apply,
    certify,
    compose,
    identity_superop,
    random_cptp,
    random_gksl,
    to_choi,
    to_kraus,
    to_ptm,
    to_superop,
)
from .constructions import (
    PsiChannel,
    build_phi_mu,
    build_psi,
    build_remark_family,
    cyclic_shift,
    fujiwara_algoet,
    phi_mu_ptm,
    psi_expected_spectrum,
    remark_ptm,
)
from .numerics import (
    Spectrum,
    SpectrumReport,
    eig,
    expm,
    min_gap,
    rank_tol,
    spectra_match,
    spectrum_report,
    svd_norms,
)
from .regularize import (
    PathScanReport,
    RegularizationReport,
    is_simple,
    markovian_approximation,
    regularize_channel,
    regularize_generator,
    regularize_markovian,
    regularize_markovian_product,
    scan_path,
)

__version__ = "0.1.0"

__all__ = [
    "ChoiMatrix",
    "ClassCertificate",
    "KrausSet",
    "NormBound",
    "PathScanReport",
    "PauliTransferMatrix",
    "PsiChannel",
    "RegularizationReport",
    "Spectrum",
    "SpectrumReport",
    "Superoperator",
    "apply",
    "build_phi_mu",
    "build_psi",
    "build_remark_family",
    "certify",
    "compose",
    "contraction_check",
    "cyclic_shift",
    "diamond_bounds",
    "duhamel_residual",
    "eig",
    "expm",
    "fujiwara_algoet",
    "identity_superop",
    "is_simple",
    "markovian_approximation",
    "min_gap",
    "one_to_one_lower",
    "psd_cert_lemma8",
    "psi_expected_spectrum",
    "random_cptp",
    "random_gksl",
    "rank_tol",
    "regularize_channel",
    "regularize_generator",
    "regularize_markovian",
    "regularize_markovian_product",
    "scan_path",
    "spectra_match",
    "spectrum_report",
    "svd_norms",
    "to_choi",
    "to_kraus",
    "to_ptm",
    "to_superop",
]
