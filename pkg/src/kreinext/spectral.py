"""Point spectrum of an extension inside the free operator's resolvent set.

An eigenvalue of the extension away from the free spectrum is exactly a
real spectral parameter where the secular matrix becomes singular, and the
deficiency map carries its kernel bijectively onto the eigenspace. The
search scans a real window, tracks the inertia (negative-eigenvalue count)
of the Hermitian secular matrix to bracket determinant sign changes,
refines brackets by bisection, and cross-checks every candidate against a
smallest-singular-value dip so that pole-induced artifacts and
even-multiplicity touch points are both handled.

Eigenvalues embedded in the free spectrum are invisible to this criterion;
the excluded subintervals of the window are therefore reported alongside
the results as unsearchable gaps.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .krein import (
    ExcludedPointError,
    ExtensionParams,
    WeylSystem,
    range_basis,
    require_valid,
    secular_matrix,
)

__all__ = [
    "EigenResult",
    "SpectrumResult",
    "SearchOptions",
    "eigenvalue_search",
    "eigenfunction",
    "validate_eigenpair",
    "EigenpairReport",
]

KERNEL_RTOL = 1e-10
SCOPE_NOTE = (
    "point spectrum inside the resolvent set of the free operator; eigenvalues "
    "embedded in the excluded spectral set are not visible to the secular criterion"
)


@dataclass(frozen=True)
class EigenResult:
    """One eigenvalue found by the secular criterion."""

    lam: float
    sigma_min: float
    multiplicity: int
    null_basis: np.ndarray  # (n, multiplicity) columns spanning ker of the secular matrix


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple
    gaps: tuple
    metadata: dict

    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.eigenvalues])


@dataclass(frozen=True)
class SearchOptions:
    """Knobs of the window scan.

    ``nodes``: scan grid density over the whole window. ``refine_tol``:
    width target for isolating roots in lambda (sign-change brackets are
    then polished to floating-point resolution). ``kernel_tol``: absolute
    ceiling on the smallest singular value for accepting a root; it stays
    absolute so that the vanishing eigenvalue every Weyl matrix carries
    right at a spectral pole is never mistaken for a root. ``kernel_rtol``:
    relative threshold counting the kernel dimension (multiplicity).
    ``cluster_tol``: candidates closer than this merge. ``skip_excluded``:
    report excluded subintervals as gaps instead of erroring. ``threads``:
    scan parallelism cap; defaults to the KREIN_EXT_THREADS environment
    variable (results merge in lambda order, so the artifact does not
    depend on the cap).
    """

    nodes: int = 2000
    refine_tol: float = 1e-12
    kernel_tol: float = 1e-10
    kernel_rtol: float = KERNEL_RTOL
    cluster_tol: float = 1e-9
    skip_excluded: bool = True
    threads: Optional[int] = None

    def effective_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("KREIN_EXT_THREADS", "1")
        try:
            return max(1, int(env))
        except ValueError:
            return 1


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def _secular_stats(system, params, basis, lam):
    """(negative-eigenvalue count, smallest |eigenvalue|) at real lambda."""
    m = basis.conj().T @ (params.theta + system.gamma(lam)) @ basis
    w = np.linalg.eigvalsh(_hermitian_part(m))
    return int(np.sum(w < 0.0)), float(np.min(np.abs(w)))


def _subtract_gaps(lo, hi, gaps):
    segments = [(lo, hi)]
    for glo, ghi in gaps:
        new = []
        for slo, shi in segments:
            if ghi <= slo or glo >= shi:
                new.append((slo, shi))
                continue
            if glo > slo:
                new.append((slo, glo))
            if ghi < shi:
                new.append((ghi, shi))
        segments = new
    return [(a, b) for a, b in segments if b > a]


def _bisect_inertia_changes(stat, lo, hi, clo, chi, tol, out, depth=0):
    """Isolate inertia changes of the secular matrix to width ``tol``."""
    if clo == chi:
        return
    if hi - lo <= tol * max(1.0, abs(lo), abs(hi)) or depth > 60:
        out.append(_polish_crossing(stat, lo, hi, clo, chi))
        return
    mid = 0.5 * (lo + hi)
    cmid = stat(mid)[0]
    _bisect_inertia_changes(stat, lo, mid, clo, cmid, tol, out, depth + 1)
    _bisect_inertia_changes(stat, mid, hi, cmid, chi, tol, out, depth + 1)


def _polish_crossing(stat, lo, hi, clo, chi):
    """Continue the inertia bisection down to floating-point resolution."""
    floor = 4.0 * np.finfo(float).eps
    for _ in range(80):
        if hi - lo <= floor * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        cmid = stat(mid)[0]
        if cmid != clo:
            hi, chi = mid, cmid
        else:
            lo, clo = mid, cmid
    return 0.5 * (lo + hi)


def _golden_minimize(f, lo, hi, tol):
    """Golden-section minimizer for the V-shaped sigma_min dips."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a), abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def eigenvalue_search(
    system: WeylSystem,
    params: ExtensionParams,
    window,
    opts: SearchOptions | None = None,
) -> SpectrumResult:
    """Find the extension's eigenvalues in a real window.

    Returns a :class:`SpectrumResult` whose eigenvalues carry the refined
    lambda, the smallest singular value of the secular matrix there, the
    kernel dimension (= multiplicity) and an orthonormal kernel basis
    embedded in C^n; unsearchable excluded subintervals are reported in
    ``gaps``.
    """
    opts = opts or SearchOptions()
    lo, hi = float(window[0]), float(window[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ValueError(f"empty or invalid search window [{lo}, {hi}]")
    require_valid(params)
    basis = range_basis(params.pi)

    gaps = tuple(system.excluded.gaps_in(lo, hi))
    if gaps and not opts.skip_excluded:
        raise ExcludedPointError(
            f"window [{lo}, {hi}] touches the excluded set and gap skipping is disabled"
        )
    segments = _subtract_gaps(lo, hi, gaps)
    metadata = {
        "scope": SCOPE_NOTE,
        "window": [lo, hi],
        "nodes": opts.nodes,
        "segments": [[a, b] for a, b in segments],
        "searchable": bool(segments) and basis.shape[1] > 0,
    }
    if basis.shape[1] == 0 or not segments:
        return SpectrumResult((), gaps, metadata)

    def stat(lam):
        return _secular_stats(system, params, basis, lam)

    candidates = []
    width = hi - lo
    for slo, shi in segments:
        count = max(32, int(np.ceil(opts.nodes * (shi - slo) / width))) + 1
        grid = np.linspace(slo, shi, count)
        threads = min(opts.effective_threads(), count // 32)
        if threads > 1:
            chunks = np.array_split(grid, threads)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = pool.map(lambda block: [stat(lam) for lam in block], chunks)
            stats = [entry for part in parts for entry in part]
        else:
            stats = [stat(lam) for lam in grid]
        negs = np.array([s[0] for s in stats])
        smins = np.array([s[1] for s in stats])
        step = grid[1] - grid[0] if count > 1 else shi - slo

        # direct hits and dips of sigma_min (degenerate / touching roots)
        for i in range(count):
            if smins[i] <= opts.kernel_tol:
                candidates.append(grid[i])
        for i in range(1, count - 1):
            if smins[i] < smins[i - 1] and smins[i] < smins[i + 1]:
                slope = abs(smins[i + 1] - smins[i - 1]) / (2.0 * step)
                if smins[i] <= 4.0 * slope * step + opts.kernel_tol:
                    lam = _golden_minimize(
                        lambda t: stat(t)[1], grid[i - 1], grid[i + 1], opts.refine_tol
                    )
                    candidates.append(lam)
        # inertia changes (determinant sign changes, pole-free by construction)
        for i in range(count - 1):
            if negs[i] != negs[i + 1]:
                found = []
                _bisect_inertia_changes(
                    stat, grid[i], grid[i + 1], negs[i], negs[i + 1],
                    opts.refine_tol, found,
                )
                candidates.extend(found)

    merged = []
    for lam in sorted(candidates):
        if merged and lam - merged[-1][-1] <= opts.cluster_tol * max(1.0, abs(lam)):
            merged[-1].append(lam)
        else:
            merged.append([lam])

    results = []
    for cluster in merged:
        lam = float(np.median(cluster))
        m = secular_matrix(system, params, lam)
        u, s, vh = np.linalg.svd(_hermitian_part(m))
        if s.size == 0 or s[-1] > opts.kernel_tol:
            continue  # pole artifact or unconverged bracket, not a root
        tol = max(opts.kernel_rtol * s[0], opts.kernel_tol)
        mult = int(np.sum(s <= tol))
        null_compressed = vh.conj().T[:, s <= tol]
        results.append(
            EigenResult(
                lam=lam,
                sigma_min=float(s[-1]),
                multiplicity=mult,
                null_basis=basis @ null_compressed,
            )
        )
    results.sort(key=lambda r: r.lam)
    return SpectrumResult(tuple(results), gaps, metadata)


def eigenfunction(system: WeylSystem, params: ExtensionParams, lam, zeta, grid):
    """Samples of the eigenfunction G(lambda) zeta attached to a secular kernel vector.

    ``zeta`` must lie in the numerical kernel of the secular matrix at
    ``lam`` (relative tolerance 1e-10), embedded in C^n.
    """
    zeta = np.asarray(zeta, dtype=complex)
    norm = np.linalg.norm(zeta)
    if norm == 0.0:
        raise ValueError("zero vector cannot define an eigenfunction")
    m = secular_matrix(system, params, lam)
    basis = range_basis(params.pi)
    scale = 1.0 + (np.linalg.norm(m, 2) if m.size else 0.0)
    off_range = np.linalg.norm(zeta - basis @ (basis.conj().T @ zeta))
    in_kernel = np.linalg.norm(m @ (basis.conj().T @ zeta)) if m.size else 0.0
    if off_range + in_kernel > KERNEL_RTOL * scale * norm:
        raise ValueError(
            "zeta is not in the numerical kernel of the secular matrix at lambda "
            f"(residual {(off_range + in_kernel) / norm:.3e})"
        )
    return system.g_apply(lam, zeta, grid)


@dataclass(frozen=True)
class EigenpairReport:
    sigma_min: float
    kernel_residual: float
    excluded_distance: float
    excluded: bool
    range_residual: float
    coupling_residual: float


def validate_eigenpair(system: WeylSystem, params: ExtensionParams, lam, zeta) -> EigenpairReport:
    """Self-consistency report for a claimed eigenpair.

    Reports the smallest singular value of the secular matrix at lambda,
    the kernel residual of zeta (normalised), the distance of lambda to the
    excluded set (with a flag when lambda sits inside it), and the boundary
    condition residuals of the synthesized eigenfunction G(lambda) zeta,
    which hold for every model through pi Gamma(lambda) zeta + theta zeta.
    """
    lam = float(lam)
    zeta = np.asarray(zeta, dtype=complex)
    norm = np.linalg.norm(zeta)
    if norm > 0:
        zeta = zeta / norm
    excluded = bool(system.excluded.contains(lam))
    distance = float(system.excluded.distance(lam))
    if excluded:
        return EigenpairReport(np.inf, np.inf, distance, True, np.inf, np.inf)
    m = secular_matrix(system, params, lam)
    smin = linalg.min_singular(m) if m.size else np.inf
    basis = range_basis(params.pi)
    kernel_residual = float(
        np.linalg.norm(m @ (basis.conj().T @ zeta)) if m.size else np.inf
    )
    pi, theta = params.pi, params.theta
    range_residual = float(np.linalg.norm(zeta - pi @ zeta))
    coupling_residual = float(
        np.linalg.norm(pi @ (system.gamma(lam) @ zeta) + theta @ zeta)
    )
    return EigenpairReport(
        sigma_min=float(smin),
        kernel_residual=kernel_residual,
        excluded_distance=distance,
        excluded=False,
        range_residual=range_residual,
        coupling_residual=coupling_residual,
    )
