"""Inverse eigenvalue map: recover shape-matrix eigenvalues from SSCM eigenvalues.

The forward map is injective on the ordered simplex, so the inverse is
computed by a damped Newton iteration over the distinct nonzero values, with
the smallest value eliminated through the unit-sum constraint.  The Jacobian
comes from differentiating the moment integrals: writing d for the forward
map and q for the fourth-moment table,

    d d_i / d lam_j = -q_ij / lam_j          (i != j)
    d d_i / d lam_i = (d_i - q_ii) / lam_i

which makes each Newton step cost one eigenvalue evaluation plus one
fourth-moment evaluation at a relaxed tolerance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from signshape.eigenmoments import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    Spectrum,
    _as_spectrum,
    _distinct_cross_moments,
    _distinct_sscm_values,
    _grouped,
)
from signshape.estimators import SscmEstimate

__all__ = [
    "ConvergenceError",
    "InversionResult",
    "ShapeEstimate",
    "estimate_shape",
    "shape_eigenvalues",
    "sscm_eigensystem",
]


class ConvergenceError(RuntimeError):
    """Iteration failed to converge; ``result`` holds the best partial output."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class InversionResult:
    """Recovered shape spectrum with iteration diagnostics.

    ``residual`` is the sup-norm of (forward map of ``spectrum``) minus the
    target; it is at most the requested tolerance when ``converged`` is true.
    """

    spectrum: Spectrum
    iterations: int
    residual: float
    converged: bool


def _relaxed(cfg: QuadratureConfig) -> QuadratureConfig:
    # the Jacobian only steers the iteration; modest accuracy is plenty
    return QuadratureConfig(
        rel_tol=max(cfg.rel_tol, 1e-8),
        abs_tol=max(cfg.abs_tol, 1e-12),
        max_subdivisions=cfg.max_subdivisions,
    )


def shape_eigenvalues(
    sscm_spectrum,
    tol: float = 1e-9,
    max_iter: int = 100,
    cfg: QuadratureConfig | None = None,
) -> InversionResult:
    """Invert the eigenvalue map: find shape eigenvalues mapping to the target.

    Zero target entries are fixed to zero structurally and equal targets
    yield exactly equal results (the reduced problem runs over distinct
    values only).  Iterates are kept inside the ordered simplex by step
    halving and re-sorting.  On failure the best iterate found is returned
    with ``converged=False``.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 0:
        raise ValueError("max_iter must be non-negative")
    target = _as_spectrum(sscm_spectrum)
    tvals = target.values
    p = tvals.size
    support = tvals > 0.0
    dvals, mults, inv_nz = _grouped(tvals[support])
    k = dvals.size

    def expand(values: np.ndarray) -> np.ndarray:
        lam = np.zeros(p)
        lam[support] = values[inv_nz]
        return lam

    def forward(values: np.ndarray) -> np.ndarray:
        return _distinct_sscm_values(values, mults, cfg)

    if k == 1:
        resid = float(np.abs(forward(dvals) - dvals).max())
        return InversionResult(Spectrum(expand(dvals)), 0, resid, resid <= tol)

    v = dvals.copy()
    current = forward(v)
    resid = float(np.abs(current - dvals).max())
    best_v, best_resid = v, resid
    jac_cfg = _relaxed(cfg)
    iterations = 0
    while resid > tol and iterations < max_iter:
        iterations += 1
        cross = _distinct_cross_moments(v, mults, jac_cfg)
        cross_diag = np.diag(cross)
        grad = -(cross * (mults[None, :] / v[None, :]))
        grad[np.diag_indices(k)] = (current - 3.0 * cross_diag - (mults - 1.0) * cross_diag) / v
        # eliminate the last value via the unit-sum constraint
        jac = grad[:-1, :-1] - np.outer(grad[:-1, -1], mults[:-1] / mults[-1])
        try:
            step = np.linalg.solve(jac, -(current - dvals)[:-1])
        except np.linalg.LinAlgError:
            break
        accepted = False
        alpha = 1.0
        while alpha >= 2.0**-40:
            head = v[:-1] + alpha * step
            tail = (1.0 - mults[:-1] @ head) / mults[-1]
            candidate = np.append(head, tail)
            if np.all(candidate > 0.0):
                candidate = np.sort(candidate)[::-1]
                cand_out = forward(candidate)
                cand_resid = float(np.abs(cand_out - dvals).max())
                if cand_resid < resid:
                    v, current, resid = candidate, cand_out, cand_resid
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            break
        if resid < best_resid:
            best_v, best_resid = v, resid
    if best_resid < resid:
        v, resid = best_v, best_resid
    return InversionResult(Spectrum(expand(v)), iterations, resid, resid <= tol)


def sscm_eigensystem(matrix) -> tuple[Spectrum, np.ndarray]:
    """Descending eigenvalues (clamped into the simplex) and eigenvectors.

    Accepts a sample SSCM, symmetrizes it, clips small negative eigenvalues
    from roundoff to zero with a warning, and renormalizes the spectrum.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix must be finite")
    asym = np.abs(mat - mat.T).max()
    if asym > 1e-8:
        raise ValueError(f"matrix must be symmetric (asymmetry {asym:.3e})")
    sym = 0.5 * (mat + mat.T)
    eigvals, eigvecs = np.linalg.eigh(sym)
    eigvals = eigvals[::-1].copy()
    eigvecs = eigvecs[:, ::-1]
    if np.any(eigvals < 0.0):
        n_neg = int(np.count_nonzero(eigvals < 0.0))
        warnings.warn(
            f"clamping {n_neg} negative eigenvalue(s) of the SSCM to zero "
            f"(most negative {eigvals.min():.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
        eigvals = np.clip(eigvals, 0.0, None)
    if not eigvals.sum() > 0.0:
        raise ValueError("matrix has no positive eigenvalues")
    return Spectrum(eigvals), eigvecs


@dataclass
class ShapeEstimate:
    """Trace-normalized shape matrix reconstructed from a sample SSCM.

    Shares the eigenvectors of ``source.matrix``; ``inversion`` records the
    eigenvalue recovery.
    """

    matrix: np.ndarray
    source: SscmEstimate
    inversion: InversionResult


def estimate_shape(
    sscm: SscmEstimate,
    tol: float = 1e-9,
    max_iter: int = 100,
    cfg: QuadratureConfig | None = None,
) -> ShapeEstimate:
    """Consistent shape-matrix estimate built solely from a sample SSCM.

    Eigendecomposes the SSCM, inverts the eigenvalue map, and reassembles
    with the original eigenvectors.  If the inversion does not converge a
    :class:`ConvergenceError` is raised carrying the partial estimate.
    """
    spectrum, eigvecs = sscm_eigensystem(sscm.matrix)
    inversion = shape_eigenvalues(spectrum, tol=tol, max_iter=max_iter, cfg=cfg)
    lam = inversion.spectrum.values
    shape = (eigvecs * lam) @ eigvecs.T
    shape = 0.5 * (shape + shape.T)
    result = ShapeEstimate(matrix=shape, source=sscm, inversion=inversion)
    if not inversion.converged:
        raise ConvergenceError(
            f"eigenvalue inversion stalled at residual {inversion.residual:.3e} "
            f"after {inversion.iterations} iterations",
            result=result,
        )
    return result
