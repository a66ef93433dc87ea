"""Eigenvalue maps and asymptotic covariance of the spatial sign covariance matrix.

Under an elliptical model, the population SSCM shares the eigenvectors of the
trace-normalized shape matrix, and its eigenvalues depend on the shape
eigenvalues lam (descending, summing to one) alone.  Writing Y for any
spherically distributed vector with P(Y = 0) = 0,

    sscm eigenvalue i:     E[ lam_i Y_i^2 / sum_k lam_k Y_k^2 ]
    fourth moment (i, j):  E[ lam_i Y_i^2 lam_j Y_j^2 / (sum_k lam_k Y_k^2)^2 ]

Both families reduce to one-dimensional integrals over [0, inf) with the
common weight P(x) = prod_k (1 + lam_k x)^{1/2}.  We substitute x = t/(1-t)
and evaluate all integrands of a family on one shared adaptive Gauss-Kronrod
partition, in log space, so dimensions in the thousands pose no difficulty
and coordinates with equal shape eigenvalues come out exactly equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

__all__ = [
    "AsymptoticCov",
    "DEFAULT_QUADRATURE",
    "QuadratureConfig",
    "QuadratureError",
    "Spectrum",
    "sign_fourth_moments",
    "sign_moment_matrix",
    "sscm_asymptotic_cov",
    "sscm_eigenvalues",
]

# largest double below 1; keeps x = t/(1-t) finite at quadrature nodes
_T_MAX = np.nextafter(1.0, 0.0)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance; carries the residual."""

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive Gauss-Kronrod evaluation of the moment integrals."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass
class Spectrum:
    """Descending, non-negative eigenvalue vector normalized to sum one.

    Construction divides by the sum, so any positive multiple of ``values``
    describes the same spectrum.  Entries must already be sorted descending;
    use ``np.sort(v)[::-1]`` first if the ordering is not known.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("spectrum must be a non-empty 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum entries must be finite")
        if np.any(v < 0.0):
            raise ValueError("spectrum entries must be non-negative")
        if np.any(np.diff(v) > 0.0):
            raise ValueError("spectrum must be sorted in descending order")
        total = v.sum()
        if not total > 0.0:
            raise ValueError("spectrum must have a positive sum")
        self.values = v / total

    @property
    def p(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        v = self.values
        if dtype is not None:
            v = v.astype(dtype, copy=False)
        return v.copy() if copy else v


def _as_spectrum(values) -> Spectrum:
    return values if isinstance(values, Spectrum) else Spectrum(np.asarray(values, dtype=float))


def _grouped(values):
    """Distinct values descending, float multiplicities, per-entry distinct index."""
    vals, inv, counts = np.unique(values, return_inverse=True, return_counts=True)
    return (
        np.ascontiguousarray(vals[::-1]),
        np.ascontiguousarray(counts[::-1]).astype(float),
        vals.size - 1 - inv,
    )


def _integrate(integrand, cfg: QuadratureConfig) -> np.ndarray:
    res, err, info = quad_vec(
        integrand,
        0.0,
        1.0,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        norm="max",
        limit=cfg.max_subdivisions,
        quadrature="gk15",
        full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            "quadrature did not converge within "
            f"{cfg.max_subdivisions} subdivisions (error estimate {err:.3e})",
            residual=float(err),
        )
    return np.atleast_1d(res)


def _distinct_sscm_values(v: np.ndarray, m: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    """SSCM eigenvalue per distinct nonzero shape eigenvalue.

    ``v`` holds the distinct positive values descending and ``m`` their
    multiplicities.  The result is normalized so that ``m @ result == 1``.
    """
    if v.size == 1 and m[0] == 1.0:
        # all mass on one coordinate: the ratio is identically one, and the
        # integrand would have an endpoint singularity not worth chasing
        return np.array([1.0])

    def integrand(t):
        t = min(t, _T_MAX)
        x = t / (1.0 - t)
        u = np.log1p(v * x)
        return np.exp(-u - (0.5 * (m @ u) + 2.0 * np.log1p(-t)))

    raw = 0.5 * v * _integrate(integrand, cfg)
    total = float(m @ raw)
    defect = abs(total - 1.0)
    if not math.isfinite(total) or defect > 10.0 * cfg.rel_tol:
        raise QuadratureError(
            f"eigenvalue integrals sum to {total!r} before normalization "
            f"(defect {defect:.3e} exceeds {10.0 * cfg.rel_tol:.3e})",
            residual=defect,
        )
    return raw / total


def _distinct_cross_moments(v: np.ndarray, m: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    """Cross fourth moments between distinct nonzero shape eigenvalues.

    Entry (a, b) is E[s_a^2 s_b^2] for sign coordinates carrying the distinct
    values v_a and v_b with a != b; the diagonal holds the equal-value cross
    moment, of which the same-coordinate moment E[s_a^4] is exactly three times.
    """
    k = v.size
    ia, ib = np.triu_indices(k)

    def integrand(t):
        t = min(t, _T_MAX)
        x = t / (1.0 - t)
        u = np.log1p(v * x)
        return x * np.exp(-(u[ia] + u[ib]) - (0.5 * (m @ u) + 2.0 * np.log1p(-t)))

    raw = _integrate(integrand, cfg)
    cross = np.zeros((k, k))
    cross[ia, ib] = 0.25 * v[ia] * v[ib] * raw
    return cross + np.triu(cross, 1).T


def sscm_eigenvalues(shape_spectrum, cfg: QuadratureConfig | None = None) -> Spectrum:
    """Map shape-matrix eigenvalues to the eigenvalues of the population SSCM.

    Parameters
    ----------
    shape_spectrum : Spectrum or array_like
        Shape-matrix eigenvalues, descending; normalized to sum one on entry.
    cfg : QuadratureConfig, optional
        Quadrature tolerances; defaults to ``DEFAULT_QUADRATURE``.

    Returns
    -------
    Spectrum
        SSCM eigenvalues.  Zero input eigenvalues map to exact zeros, tied
        inputs map to identical outputs (one integral per distinct value),
        and the result is renormalized to sum one.  A pre-normalization
        defect above ``10 * cfg.rel_tol`` raises :class:`QuadratureError`.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    lam = _as_spectrum(shape_spectrum)
    vals, counts, inv = _grouped(lam.values)
    nonzero = vals > 0.0
    out = np.zeros_like(vals)
    out[nonzero] = _distinct_sscm_values(vals[nonzero], counts[nonzero], cfg)
    full = out[inv]
    # guard against order inversions from quadrature noise between near-ties
    np.minimum.accumulate(full, out=full)
    return Spectrum(full)


def sign_fourth_moments(shape_spectrum, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """Fourth moments E[s_i^2 s_j^2] of the spatial sign vector in the eigenbasis.

    Returns the symmetric p x p table whose row sums reproduce the SSCM
    eigenvalues.  Rows and columns at zero shape eigenvalues are exactly zero.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    lam = _as_spectrum(shape_spectrum)
    p = len(lam)
    vals, counts, inv = _grouped(lam.values)
    nonzero = vals > 0.0
    v = vals[nonzero]
    m = counts[nonzero]
    k = vals.size
    if v.size == 1 and m[0] == 1.0:
        # all mass on one axis: the sign concentrates there and s_1^4 = 1
        table = np.zeros((p, p))
        table[0, 0] = 1.0
        return table
    full = np.zeros((k, k))
    full[np.ix_(nonzero, nonzero)] = _distinct_cross_moments(v, m, cfg)
    table = full[inv][:, inv]
    diag = np.arange(p)
    table[diag, diag] = 3.0 * full[inv, inv]
    return table


def sign_moment_matrix(shape_spectrum, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """Second-moment matrix E[vec(s s^T) vec(s s^T)^T] of the sign outer product.

    In the shape eigenbasis every entry is a mixed fourth moment
    E[s_a s_b s_c s_d].  Sign-flip symmetry of each coordinate kills every
    entry with an unpaired index, so for a p x p problem only p(3p - 2) of
    the p^4 entries can be nonzero; the remaining entries are set to zero
    structurally and never computed.  Row-major vec ordering is used
    (position of matrix entry (i, j) is i*p + j).
    """
    cfg = cfg or DEFAULT_QUADRATURE
    lam = _as_spectrum(shape_spectrum)
    moments = sign_fourth_moments(lam, cfg)
    p = len(lam)
    out = np.zeros((p * p, p * p))
    for i in range(p):
        out[i * p + i, i * p + i] = moments[i, i]
    for i in range(p):
        for j in range(i + 1, p):
            mij = moments[i, j]
            out[i * p + j, i * p + j] = mij
            out[j * p + i, j * p + i] = mij
            out[i * p + i, j * p + j] = mij
            out[j * p + j, i * p + i] = mij
            out[i * p + j, j * p + i] = mij
            out[j * p + i, i * p + j] = mij
    return out


@dataclass
class AsymptoticCov:
    """Asymptotic covariance of sqrt(n) vec(S_n) with its building blocks.

    ``w`` is the p^2 x p^2 covariance, ``gamma`` the uncentered sign moment
    matrix in the eigenbasis, and ``eigenvectors`` the orthogonal matrix used
    in the Kronecker sandwich.
    """

    gamma: np.ndarray
    w: np.ndarray
    eigenvectors: np.ndarray


def sscm_asymptotic_cov(
    eigenvectors, shape_spectrum, cfg: QuadratureConfig | None = None
) -> AsymptoticCov:
    """Asymptotic covariance of the sample SSCM at an elliptical population.

    Computes ``(O kron O) (gamma - vec(D) vec(D)^T) (O kron O)^T`` where D is
    the diagonal matrix of SSCM eigenvalues and O the shape eigenvector
    matrix.  ``eigenvectors`` must be orthogonal to within 1e-10.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    lam = _as_spectrum(shape_spectrum)
    p = len(lam)
    basis = np.asarray(eigenvectors, dtype=float)
    if basis.shape != (p, p):
        raise ValueError(f"eigenvector matrix must be {p} x {p}, got {basis.shape}")
    if not np.all(np.isfinite(basis)):
        raise ValueError("eigenvector matrix must be finite")
    ortho_defect = np.abs(basis.T @ basis - np.eye(p)).max()
    if ortho_defect > 1e-10:
        raise ValueError(
            f"eigenvector matrix is not orthogonal (defect {ortho_defect:.3e} > 1e-10)"
        )
    gamma = sign_moment_matrix(lam, cfg)
    deltas = sscm_eigenvalues(lam, cfg).values
    vec_diag = np.diag(deltas).ravel()
    inner = gamma - np.outer(vec_diag, vec_diag)
    sandwich = np.kron(basis, basis)
    w = sandwich @ inner @ sandwich.T
    w = 0.5 * (w + w.T)
    return AsymptoticCov(gamma=gamma, w=w, eigenvectors=basis.copy())
