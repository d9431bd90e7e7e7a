"""Closed-form divergence and distance measures between multivariate Gaussians.

Five interchangeable criteria score how far a posterior belief has moved from
its prior: Kullback-Leibler, Renyi (order alpha), a Fisher-information
approximation, Bhattacharyya, and the squared 2-Wasserstein distance. All are
evaluated on the 4-dimensional quaternion-state Gaussian maintained by the
filter.

Near-singular covariances (the filter collapses variance along constrained
directions) are regularized to SPD before any inverse, determinant or matrix
square root: eps = 1e-10 * max(1, trace/d) is added to the diagonal whenever
the smallest eigenvalue falls below eps. Log-determinants go through Cholesky
factors, never raw determinant products.
"""
import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError


class Criterion(enum.Enum):
    KL = "kl"
    RENYI = "renyi"
    FISHER = "fisher"
    BHATTACHARYYA = "bhattacharyya"
    WASSERSTEIN2 = "wasserstein"


@dataclass(frozen=True)
class DivergenceCriterion:
    """A criterion selection, with the Renyi order where applicable."""

    kind: Criterion
    alpha: float = 0.3

    def __post_init__(self):
        if self.kind is Criterion.RENYI:
            if self.alpha <= 0 or self.alpha == 1.0:
                raise InvalidInputError("Renyi alpha must be in (0,1) or (1,inf)")

    @classmethod
    def parse(cls, name, alpha=0.3):
        aliases = {
            "kl": Criterion.KL,
            "renyi": Criterion.RENYI,
            "fisher": Criterion.FISHER,
            "bhattacharyya": Criterion.BHATTACHARYYA,
            "wasserstein": Criterion.WASSERSTEIN2,
            "wasserstein2": Criterion.WASSERSTEIN2,
        }
        try:
            return cls(aliases[name.lower()], alpha)
        except KeyError:
            raise InvalidInputError(f"unknown criterion {name!r}") from None

    @property
    def name(self):
        return self.kind.value


@dataclass(frozen=True)
class GaussianParams:
    """Mean vector and symmetric covariance of a Gaussian belief."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=np.float64).ravel()
        c = np.asarray(self.covariance, dtype=np.float64)
        if c.shape != (m.size, m.size):
            raise InvalidInputError("covariance shape does not match mean")
        if not (np.isfinite(m).all() and np.isfinite(c).all()):
            raise InvalidInputError("non-finite Gaussian parameters")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", 0.5 * (c + c.T))

    @classmethod
    def from_belief(cls, belief):
        return cls(belief.mean, belief.covariance)

    @property
    def dim(self):
        return self.mean.size


def regularize_spd(cov):
    """Return an SPD version of a symmetric covariance.

    Adds eps*I (eps = 1e-10 * max(1, trace/d)) whenever the smallest
    eigenvalue is below eps, lifting any slightly negative eigenvalue as
    well.
    """
    cov = 0.5 * (cov + cov.T)
    d = cov.shape[0]
    eps = 1e-10 * max(1.0, float(np.trace(cov)) / d)
    lam_min = float(np.linalg.eigvalsh(cov)[0])
    if lam_min < eps:
        cov = cov + (eps - min(lam_min, 0.0)) * np.eye(d)
    return cov


def _cholesky(cov, what):
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NumericalError(f"{what}: covariance not SPD after regularization") from None


def _logdet(chol):
    return 2.0 * float(np.log(np.diag(chol)).sum())


def _solve_spd(chol, B):
    y = np.linalg.solve(chol, B)
    return np.linalg.solve(chol.T, y)


def _sqrtm_psd(mat):
    """Symmetric PSD square root via eigendecomposition, clamping negatives."""
    sym = 0.5 * (mat + mat.T)
    try:
        w, V = np.linalg.eigh(sym)
    except np.linalg.LinAlgError:
        raise NumericalError("eigendecomposition failed in matrix square root") from None
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def kl_divergence(p_i, p_j):
    """KL(p_i || p_j) for Gaussians, in nats."""
    Si = regularize_spd(p_i.covariance)
    Sj = regularize_spd(p_j.covariance)
    Li = _cholesky(Si, "kl_divergence")
    Lj = _cholesky(Sj, "kl_divergence")
    d = p_i.dim
    delta = p_i.mean - p_j.mean
    trace = float(np.trace(_solve_spd(Lj, Si)))
    quad = float(delta @ _solve_spd(Lj, delta))
    return 0.5 * (_logdet(Lj) - _logdet(Li) + trace - d + quad)


def renyi_divergence(p_i, p_j, alpha):
    """Renyi divergence of order alpha; tends to KL as alpha -> 1."""
    if alpha <= 0 or alpha == 1.0:
        raise InvalidInputError("Renyi alpha must be in (0,1) or (1,inf)")
    Si = regularize_spd(p_i.covariance)
    Sj = regularize_spd(p_j.covariance)
    Sa = alpha * Sj + (1.0 - alpha) * Si
    La = _cholesky(Sa, "renyi_divergence")
    delta = p_i.mean - p_j.mean
    quad = 0.5 * alpha * float(delta @ _solve_spd(La, delta))
    log_ratio = _logdet(La) - (1.0 - alpha) * _logdet(_cholesky(Si, "renyi_divergence")) \
        - alpha * _logdet(_cholesky(Sj, "renyi_divergence"))
    return quad - log_ratio / (2.0 * (alpha - 1.0))


def fisher_metric(p_i, p_j):
    """Fisher-information criterion as tabulated (an approximation).

    |Σ_j⁻¹ (μ_i - μ_j)|² + tr(Σ_j⁻² Σ_i - 2 Σ_j⁻¹ + Σ_i⁻¹).
    """
    Si = regularize_spd(p_i.covariance)
    Sj = regularize_spd(p_j.covariance)
    Li = _cholesky(Si, "fisher_metric")
    Lj = _cholesky(Sj, "fisher_metric")
    d = p_i.dim
    Sj_inv = _solve_spd(Lj, np.eye(d))
    Si_inv = _solve_spd(Li, np.eye(d))
    delta = p_i.mean - p_j.mean
    v = Sj_inv @ delta
    return float(v @ v + np.trace(Sj_inv @ Sj_inv @ Si - 2.0 * Sj_inv + Si_inv))


def bhattacharyya_distance(p_i, p_j):
    """Bhattacharyya distance; symmetric in its arguments."""
    Si = regularize_spd(p_i.covariance)
    Sj = regularize_spd(p_j.covariance)
    S = 0.5 * (Si + Sj)
    L = _cholesky(S, "bhattacharyya_distance")
    Li = _cholesky(Si, "bhattacharyya_distance")
    Lj = _cholesky(Sj, "bhattacharyya_distance")
    delta = p_i.mean - p_j.mean
    quad = 0.125 * float(delta @ _solve_spd(L, delta))
    return quad + 0.5 * (_logdet(L) - 0.5 * (_logdet(Li) + _logdet(Lj)))


def wasserstein2_squared(p_i, p_j):
    """Squared 2-Wasserstein distance; symmetric in its arguments."""
    Si = regularize_spd(p_i.covariance)
    Sj = regularize_spd(p_j.covariance)
    root_i = _sqrtm_psd(Si)
    cross = _sqrtm_psd(root_i @ Sj @ root_i)
    delta = p_i.mean - p_j.mean
    return float(delta @ delta + np.trace(Si + Sj - 2.0 * cross))


def evaluate(criterion, posterior, prior):
    """Dispatch D(posterior || prior) for the configured criterion."""
    kind = criterion.kind
    if kind is Criterion.KL:
        return kl_divergence(posterior, prior)
    if kind is Criterion.RENYI:
        return renyi_divergence(posterior, prior, criterion.alpha)
    if kind is Criterion.FISHER:
        return fisher_metric(posterior, prior)
    if kind is Criterion.BHATTACHARYYA:
        return bhattacharyya_distance(posterior, prior)
    if kind is Criterion.WASSERSTEIN2:
        return wasserstein2_squared(posterior, prior)
    raise InvalidInputError(f"unknown criterion kind {kind!r}")
