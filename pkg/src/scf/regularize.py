"""Spectral regularization procedures.

Each procedure replaces a channel or generator by an epsilon-close member of
the same class whose eigenvalues are all simple (pairwise gap above
``GAP_TOL``), together with a machine-checkable report:

* ``regularize_channel`` -- mix toward the simple-spectrum unital CPTP map
  from ``build_psi``; convexity keeps the input's class (CPTP, unital CPTP,
  positive TP) intact.
* ``regularize_generator`` -- same mixing with perturber Psi - id inside the
  (convex) set of GKSL generators.
* ``regularize_markovian`` -- regularize the generator, then rescale time
  slightly above 1 so the exponential remains simple-spectrum.
* ``regularize_markovian_product`` -- inductively rescale the factors of a
  product of exponentials, keeping every partial product simple-spectrum.
* ``scan_path`` -- sample the minimum spectral gap along the segment between
  two maps and isolate the (finitely many) exceptional parameters where the
  gap collapses.

Mixing weights come from a fixed schedule of 16 linearly decreasing trials:
exceptional weights form a finite set, so early trials succeed in practice
and the schedule bounds the work deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import diamond_bounds
from .channels import ClassCertificate, Superoperator, certify
from .config import BISECTION_WIDTH, GAP_TOL, SCAN_POINTS, SCHEDULE_TRIALS
from .constructions import build_psi
from .exceptions import (
    BudgetTooTight,
    DimensionMismatch,
    NotChannel,
    NotGKSL,
    ScanExhausted,
    ScheduleExhausted,
    ZeroGenerator,
)
from .numerics import eig, expm, min_gap, track_order


@dataclass
class RegularizationReport:
    """What a regularization procedure chose and what it achieved.

    ``fro_distance`` is the exact Frobenius distance between the input and
    output superoperator matrices. ``diamond_upper`` is a certified upper
    bound on the diamond distance: the Choi trace norm of the difference
    for the single-map procedures, and the telescoped sum of per-factor
    Choi trace norms for the product procedure.
    """

    lam: float
    time_factors: list[float] = field(default_factory=list)
    achieved_gap: float = 0.0
    fro_distance: float = 0.0
    diamond_upper: float = 0.0
    input_cert: ClassCertificate | None = None
    output_cert: ClassCertificate | None = None
    attempts: int = 0


@dataclass
class PathScanReport:
    """Gap samples along a segment plus refined exceptional intervals."""

    grid: np.ndarray
    gaps: np.ndarray
    exceptional_intervals: list[tuple[float, float]] = field(default_factory=list)
    eigenvalues: np.ndarray | None = None


def is_simple(s: Superoperator, gap_tol: float = GAP_TOL) -> tuple[bool, float]:
    """Whether all eigenvalues are simple numerically: min pairwise gap > tol."""
    gap = min_gap(eig(s.mat))
    return gap > gap_tol, gap


def _budget_distance(delta: Superoperator, budget_norm: str) -> float:
    if budget_norm == "fro":
        return float(np.linalg.norm(delta.mat))
    if budget_norm == "diamond_upper":
        return diamond_bounds(delta).upper
    raise ValueError(f"budget_norm must be 'fro' or 'diamond_upper', got {budget_norm!r}")


def _lambda_schedule(eps: float, D: float) -> tuple[float, list[float]]:
    """lambda_j = lambda_0 (1 - j/16), lambda_0 = min(eps/D, 1/2)."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    lam0 = 0.5 if D == 0.0 else min(eps / D, 0.5)
    if lam0 < 1e-14:
        raise BudgetTooTight(
            f"eps = {eps:.2e} is below 1e-14 times the perturber distance {D:.2e}"
        )
    return lam0, [lam0 * (1.0 - j / SCHEDULE_TRIALS) for j in range(SCHEDULE_TRIALS)]


def _trivial_report(s: Superoperator, kind: str) -> RegularizationReport:
    cert = certify(s, kind=kind)
    return RegularizationReport(
        lam=0.0, achieved_gap=math.inf, input_cert=cert, output_cert=cert
    )


def regularize_channel(phi: Superoperator, eps: float,
                       budget_norm: str = "fro"
                       ) -> tuple[Superoperator, RegularizationReport]:
    """Replace a trace-preserving map by an eps-close simple-spectrum one.

    The output is the convex combination (1 - lambda) Phi + lambda Psi with
    the first schedule weight whose spectrum is simple. Psi is unital CPTP,
    so the output stays in whichever convex class contains both: CPTP maps,
    unital channels, or positive trace-preserving maps.

    ``eps`` budgets the distance in ``budget_norm`` ("fro" for the exact
    Frobenius distance, "diamond_upper" for the certified Choi bound).
    """
    input_cert = certify(phi, kind="channel")
    if not input_cert.is_tp:
        raise NotChannel(
            f"input is not trace-preserving (residual {input_cert.tp_residual:.3e})"
        )
    if phi.n == 1:
        return phi, _trivial_report(phi, "channel")
    psi = build_psi(phi.n).superop
    delta = Superoperator(phi.n, phi.mat - psi.mat)
    D = _budget_distance(delta, budget_norm)
    lam0, schedule = _lambda_schedule(eps, D)
    for attempts, lam in enumerate(schedule, start=1):
        out = Superoperator(phi.n, (1.0 - lam) * phi.mat + lam * psi.mat)
        simple, gap = is_simple(out)
        if simple:
            diff = phi.mat - out.mat
            report = RegularizationReport(
                lam=lam,
                achieved_gap=gap,
                fro_distance=float(np.linalg.norm(diff)),
                diamond_upper=diamond_bounds(Superoperator(phi.n, diff)).upper,
                input_cert=input_cert,
                output_cert=certify(out, kind="channel"),
                attempts=attempts,
            )
            return out, report
    raise ScheduleExhausted(
        f"all {SCHEDULE_TRIALS} mixing weights from lambda_0 = {lam0:.3e} "
        f"left the spectrum degenerate (gap tolerance {GAP_TOL:.1e})"
    )


def markovian_approximation(phi: Superoperator) -> Superoperator:
    """Generator L = Phi - id of a channel Phi; always a GKSL generator."""
    cert = certify(phi, kind="channel")
    if not cert.is_cptp:
        raise NotChannel(
            f"input does not certify CPTP (tp {cert.tp_residual:.3e}, "
            f"cp min eig {cert.cp_min_eig:.3e})"
        )
    return Superoperator(phi.n, phi.mat - np.eye(phi.n**2))


def regularize_generator(L: Superoperator, eps: float,
                         budget_norm: str = "fro"
                         ) -> tuple[Superoperator, RegularizationReport]:
    """Replace a GKSL generator by an eps-close simple-spectrum one.

    Mixes toward Psi - id using the same weight schedule as
    ``regularize_channel``; the GKSL set is convex, so the output certifies
    GKSL again (and stays a unital generator when the input is one).
    """
    input_cert = certify(L, kind="generator")
    if not input_cert.is_gksl:
        raise NotGKSL(
            f"input does not certify GKSL (trace residual "
            f"{input_cert.gksl_trace_residual:.3e}, conditional min eig "
            f"{input_cert.gksl_ccp_min_eig:.3e})"
        )
    if L.n == 1:
        return L, _trivial_report(L, "generator")
    n = L.n
    perturber = Superoperator(n, build_psi(n).superop.mat - np.eye(n * n))
    delta = Superoperator(n, L.mat - perturber.mat)
    D = _budget_distance(delta, budget_norm)
    lam0, schedule = _lambda_schedule(eps, D)
    for attempts, lam in enumerate(schedule, start=1):
        out = Superoperator(n, (1.0 - lam) * L.mat + lam * perturber.mat)
        simple, gap = is_simple(out)
        if simple:
            diff = L.mat - out.mat
            report = RegularizationReport(
                lam=lam,
                achieved_gap=gap,
                fro_distance=float(np.linalg.norm(diff)),
                diamond_upper=diamond_bounds(Superoperator(n, diff)).upper,
                input_cert=input_cert,
                output_cert=certify(out, kind="generator"),
                attempts=attempts,
            )
            return out, report
    raise ScheduleExhausted(
        f"all {SCHEDULE_TRIALS} mixing weights from lambda_0 = {lam0:.3e} "
        f"left the spectrum degenerate (gap tolerance {GAP_TOL:.1e})"
    )


def _shrink_to_strip(delta: float, L_mat: np.ndarray) -> float:
    """Cap the scan window so (1 + delta) max|Im spec| stays below pi.

    Keeps the matrix exponential injective on the occupied horizontal strip,
    so distinct generator eigenvalues stay distinct after exponentiation.
    When even t = 1 exceeds the strip no positive cap exists; the window is
    then left unchanged and the scan proceeds empirically.
    """
    im_max = float(np.max(np.abs(eig(L_mat).eigenvalues.imag)))
    if im_max == 0.0 or (1.0 + delta) * im_max < np.pi:
        return delta
    cap = np.pi / im_max - 1.0
    if cap <= 0.0:
        return delta
    return min(delta, cap * (1.0 - 1e-9))


def regularize_markovian(L: Superoperator, eps: float
                         ) -> tuple[Superoperator, RegularizationReport]:
    """Simple-spectrum Markovian channel eps-close to e^L.

    First regularizes the generator with half the budget (diamond-upper
    norm), then scans the time factor downward from 1 + Delta toward (but
    excluding) 1, with Delta = min(1/2, eps / (2 ||L_eps||_ub)) capped by
    the exponential-injectivity strip. The first simple exponential wins;
    the returned channel is e^{t L_eps}.
    """
    if float(np.linalg.norm(L.mat)) <= 1e-14:
        raise ZeroGenerator("the zero generator cannot be time-rescaled")
    L_eps, gen_report = regularize_generator(L, eps / 2.0, budget_norm="diamond_upper")
    if L.n == 1:
        out = Superoperator(1, expm(L.mat))
        return out, _trivial_report(out, "channel")
    L_ub = diamond_bounds(L_eps).upper
    delta = min(0.5, eps / (2.0 * L_ub))
    delta = _shrink_to_strip(delta, L_eps.mat)
    input_channel = Superoperator(L.n, expm(L.mat))
    attempts = gen_report.attempts
    for k in range(SCAN_POINTS, 0, -1):
        t = 1.0 + delta * k / SCAN_POINTS
        out = Superoperator(L.n, expm(t * L_eps.mat))
        attempts += 1
        simple, gap = is_simple(out)
        if simple:
            diff = input_channel.mat - out.mat
            report = RegularizationReport(
                lam=gen_report.lam,
                time_factors=[t],
                achieved_gap=gap,
                fro_distance=float(np.linalg.norm(diff)),
                diamond_upper=diamond_bounds(Superoperator(L.n, diff)).upper,
                input_cert=gen_report.input_cert,
                output_cert=certify(out, kind="channel"),
                attempts=attempts,
            )
            return out, report
    raise ScanExhausted(
        f"no simple spectrum among {SCAN_POINTS} time factors in "
        f"(1, {1 + delta:.6f}]; gap tolerance {GAP_TOL:.1e} may be too large"
    )


def regularize_markovian_product(Ls: list[Superoperator], eps: float
                                 ) -> tuple[Superoperator, RegularizationReport]:
    """Simple-spectrum product of exponentials eps-close to prod_j e^{L_j}.

    The first factor is replaced through ``regularize_markovian`` with
    budget eps/(2m); each subsequent factor's time is scanned downward from
    1 over the window [1 - eps / (2 m ||L_k||_ub), 1], accepting the first
    factor that keeps the partial product simple-spectrum. The report's
    ``diamond_upper`` is the telescoped sum of per-factor Choi bounds,
    which upper-bounds the diamond distance because channels have diamond
    norm one.
    """
    m = len(Ls)
    if m < 1:
        raise ValueError("need at least one generator")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = Ls[0].n
    for idx, L in enumerate(Ls):
        if L.n != n:
            raise DimensionMismatch(f"factor {idx} has n={L.n}, expected {n}")
        if float(np.linalg.norm(L.mat)) <= 1e-14:
            raise ZeroGenerator(f"factor {idx} is the zero generator")
        cert = certify(L, kind="generator")
        if not cert.is_gksl:
            raise NotGKSL(f"factor {idx} does not certify GKSL")

    first_channel, first_report = regularize_markovian(Ls[0], eps / (2.0 * m))
    attempts = first_report.attempts
    time_factors = list(first_report.time_factors)
    telescoped = first_report.diamond_upper
    product = first_channel.mat.copy()
    exact_exps = [expm(L.mat) for L in Ls]

    for k in range(1, m):
        L_next = Ls[k]
        width = eps / (2.0 * m * diamond_bounds(L_next).upper)
        accepted = None
        for j in range(SCAN_POINTS):
            t = 1.0 - width * j / (SCAN_POINTS - 1)
            factor = expm(t * L_next.mat)
            candidate = product @ factor
            attempts += 1
            simple, gap = is_simple(Superoperator(n, candidate))
            if simple:
                accepted = (t, factor, candidate, gap)
                break
        if accepted is None:
            raise ScanExhausted(
                f"factor {k}: no simple partial product among {SCAN_POINTS} "
                f"time factors in [{1 - width:.6f}, 1]"
            )
        t, factor, product, gap = accepted
        time_factors.append(t)
        telescoped += diamond_bounds(
            Superoperator(n, exact_exps[k] - factor)
        ).upper

    exact_product = exact_exps[0]
    for E in exact_exps[1:]:
        exact_product = exact_product @ E
    out = Superoperator(n, product)
    _, gap = is_simple(out)
    report = RegularizationReport(
        lam=first_report.lam,
        time_factors=time_factors,
        achieved_gap=gap,
        fro_distance=float(np.linalg.norm(exact_product - product)),
        diamond_upper=telescoped,
        input_cert=certify(Superoperator(n, exact_product), kind="channel"),
        output_cert=certify(out, kind="channel"),
        attempts=attempts,
    )
    return out, report


def _gap_at(X: np.ndarray, Z: np.ndarray, t: float) -> float:
    return min_gap(eig((1.0 - t) * X + t * Z))


def _refine_boundary(X: np.ndarray, Z: np.ndarray, t_bad: float, t_good: float,
                     width: float) -> float:
    """Bisect between a sub-threshold and a healthy parameter.

    Returns the healthy-side endpoint once the bracket is narrower than
    ``width``; reported intervals use it so they conservatively contain the
    true exceptional set.
    """
    while abs(t_good - t_bad) > width:
        mid = 0.5 * (t_good + t_bad)
        if _gap_at(X, Z, mid) < GAP_TOL:
            t_bad = mid
        else:
            t_good = mid
    return t_good


def scan_path(X: Superoperator, Z: Superoperator, grid_size: int,
              track_eigenvalues: bool = True) -> PathScanReport:
    """Minimum-gap profile of the segment t -> (1 - t) X + t Z on [0, 1].

    The segment is analytic in t, so the set of exceptional parameters
    (where the number of distinct eigenvalues drops) is finite unless the
    whole segment is degenerate. Grid points with gap below ``GAP_TOL`` are
    grouped into runs and each run boundary is refined by bisection to width
    ``BISECTION_WIDTH``.
    """
    if X.n != Z.n:
        raise DimensionMismatch(f"path endpoints have n={X.n} and n={Z.n}")
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    grid = np.linspace(0.0, 1.0, grid_size)
    gaps = np.empty(grid_size)
    trajectories = None
    prev = None
    if track_eigenvalues:
        trajectories = np.empty((grid_size, X.n**2), dtype=complex)
    for i, t in enumerate(grid):
        s = eig((1.0 - t) * X.mat + t * Z.mat)
        gaps[i] = min_gap(s)
        if track_eigenvalues:
            vals = s.eigenvalues
            if prev is None:
                vals = np.array(sorted(vals, key=lambda z: (z.real, z.imag)))
            else:
                vals = track_order(prev, vals)
            trajectories[i] = vals
            prev = vals

    bad = gaps < GAP_TOL
    intervals: list[tuple[float, float]] = []
    i = 0
    while i < grid_size:
        if not bad[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid_size and bad[j + 1]:
            j += 1
        if i == 0:
            lo = float(grid[0])
        else:
            lo = _refine_boundary(X.mat, Z.mat, float(grid[i]), float(grid[i - 1]),
                                  BISECTION_WIDTH)
        if j == grid_size - 1:
            hi = float(grid[-1])
        else:
            hi = _refine_boundary(X.mat, Z.mat, float(grid[j]), float(grid[j + 1]),
                                  BISECTION_WIDTH)
        intervals.append((lo, hi))
        i = j + 1
    return PathScanReport(grid=grid, gaps=gaps, exceptional_intervals=intervals,
                          eigenvalues=trajectories)
