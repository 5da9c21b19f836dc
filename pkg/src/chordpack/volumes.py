"""Normalized volumes of metric balls and related quantities.

Ball volumes ``mu(B(r))`` are normalized by the manifold volume, so they
lie in ``[0, 1]``. Four evaluation strategies are available through
:class:`VolumeModel`:

``exact-cap``
    Normalized area of the cap of radius ``r`` on the embedding sphere.
    Exact for ``V(n, 1)``; an asymptotic approximation elsewhere.
``small-ball``
    Leading term ``c * r**dim``; exact for Grassmann balls with ``r < 1``.
``gaussian``
    Large-dimension approximation of the cap through the error function.
``monte-carlo``
    Fraction of Haar samples within ``r`` of ``I_{n,p}``.

Manifold volumes are returned in log space since ``U_8`` already overflows
a double.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import specfun
from .manifolds import Kind, ManifoldDescriptor, sample_uniform_batch, squared_distance_to_identity

__all__ = [
    "ModelKind",
    "VolumeModel",
    "ValidityWarning",
    "ManifoldVolume",
    "manifold_volume",
    "log_small_ball_coeff",
    "small_ball_coeff",
    "cap_volume",
    "cap_volume_small",
    "cap_volume_gaussian",
    "ball_volume",
    "ball_volume_mc",
    "mc_squared_distances",
    "complement_radius",
    "ideal_radius_rN",
    "MC_CHUNK",
]

MC_CHUNK = 4096
MIN_MC_SAMPLES = 1000
BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200


class ValidityWarning(UserWarning):
    """A model was evaluated outside its regime of validity."""


class ModelKind(str, enum.Enum):
    EXACT_CAP = "exact-cap"
    SMALL_BALL = "small-ball"
    GAUSSIAN = "gaussian"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class VolumeModel:
    """Strategy used to evaluate ``mu(B(r))``.

    ``samples`` and ``seed`` only matter for the Monte Carlo variant.
    """

    kind: ModelKind
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.kind is ModelKind.MONTE_CARLO and self.samples < MIN_MC_SAMPLES:
            raise ValueError(f"Monte Carlo needs at least {MIN_MC_SAMPLES} samples (got {self.samples})")

    @classmethod
    def exact_cap(cls) -> "VolumeModel":
        return cls(ModelKind.EXACT_CAP)

    @classmethod
    def small_ball(cls) -> "VolumeModel":
        return cls(ModelKind.SMALL_BALL)

    @classmethod
    def gaussian(cls) -> "VolumeModel":
        return cls(ModelKind.GAUSSIAN)

    @classmethod
    def monte_carlo(cls, samples: int = 100_000, seed: int = 0) -> "VolumeModel":
        return cls(ModelKind.MONTE_CARLO, samples, seed)

    def __str__(self) -> str:
        if self.kind is ModelKind.MONTE_CARLO:
            return f"monte-carlo(samples={self.samples},seed={self.seed})"
        return self.kind.value


# -- manifold volumes -------------------------------------------------------


class ManifoldVolume(NamedTuple):
    log_value: float
    value: float | None  # None when exp(log_value) is not a normal double


def _log_factorial(k: int) -> float:
    return math.lgamma(k + 1)


def _log_volume(desc: ManifoldDescriptor) -> float:
    n, p = desc.n, desc.p
    if desc.kind is Kind.GRASSMANN:
        total = p * (n - p) * math.log(math.pi)
        for i in range(1, p + 1):
            total += _log_factorial(p - i) - _log_factorial(n - i)
        return total
    # unitary group is the Stiefel manifold with p = n: same expression
    return (
        0.5 * p * (p + 1) * math.log(2.0)
        + n * p * math.log(math.pi)
        - specfun.log_multivariate_gamma(p, n)
    )


def manifold_volume(desc: ManifoldDescriptor) -> ManifoldVolume:
    """Volume of the manifold under the metric induced by the chordal distance."""
    log_v = _log_volume(desc)
    # volumes shrink factorially in n, so underflow matters as much as overflow
    value = math.exp(log_v) if abs(log_v) < 700.0 else None
    return ManifoldVolume(log_v, value)


def log_small_ball_coeff(desc: ManifoldDescriptor) -> float:
    """Log of ``c`` in ``mu(B(r)) ~ c r**dim`` as ``r -> 0``."""
    n, p = desc.n, desc.p
    if desc.kind is Kind.GRASSMANN:
        total = -_log_factorial(p * (n - p))
        for i in range(1, p + 1):
            total += _log_factorial(n - i) - _log_factorial(p - i)
        return total
    total = -0.5 * p * (p + 1) * math.log(2.0) - 0.5 * p * math.log(math.pi)
    for i in range(1, p + 1):
        total += _log_factorial(n - i)
    return total - math.lgamma(p * (n - 0.5 * p) + 1.0)


def small_ball_coeff(desc: ManifoldDescriptor) -> float:
    return math.exp(log_small_ball_coeff(desc))


# -- spherical caps ---------------------------------------------------------


def _check_cap_args(D: int, R: float, r: float) -> float:
    if D < 2:
        raise ValueError(f"cap volume needs D >= 2 (got {D})")
    if not R > 0:
        raise ValueError(f"cap volume needs R > 0 (got {R})")
    tol = specfun.BOUNDARY_TOL * max(1.0, 2.0 * R)
    if not (-tol <= r <= 2.0 * R + tol):
        raise ValueError(f"radius {r} outside [0, 2R] with R = {R}")
    return min(max(float(r), 0.0), 2.0 * R)


def cap_volume(D: int, R: float, r: float) -> float:
    """Normalized area of a cap of chordal radius ``r`` on ``S^{D-1}(R)``."""
    r = _check_cap_args(D, R, r)
    a = 0.5 * (D - 1)
    return specfun.reg_inc_beta(r * r / (4.0 * R * R), a, a)


def cap_volume_small(D: int, R: float, r: float) -> float:
    """Small-radius asymptote of :func:`cap_volume`."""
    r = _check_cap_args(D, R, r)
    if r == 0.0:
        return 0.0
    log_v = (
        -math.log(2.0 * math.sqrt(math.pi))
        + math.lgamma(0.5 * D)
        - math.lgamma(0.5 * (D + 1))
        + (D - 1) * math.log(r / R)
    )
    return math.exp(log_v)


def cap_volume_gaussian(D: int, R: float, r: float) -> float:
    """Large-``D`` approximation of :func:`cap_volume` through ``erf``."""
    r = _check_cap_args(D, R, r)
    s = math.sqrt(0.5 * D)
    return 0.5 * math.erf(s) - 0.5 * math.erf(s * (1.0 - r * r / (2.0 * R * R)))


# -- Monte Carlo -------------------------------------------------------------


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("MPL_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def _mc_chunk(desc: ManifoldDescriptor, seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    return squared_distance_to_identity(desc, sample_uniform_batch(desc, rng, size))


_MC_CACHE: dict = {}
_MC_CACHE_MAX = 16


def _mc_draw(desc: ManifoldDescriptor, samples: int, seed: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    key = (desc, samples, seed)
    hit = _MC_CACHE.get(key)
    if hit is not None:
        return hit
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    jobs = [(desc, seed, i, s) for i, s in enumerate(sizes)]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: _mc_chunk(*job), jobs))
    else:
        parts = [_mc_chunk(*job) for job in jobs]
    raw = np.concatenate(parts)
    srt = np.sort(raw)
    raw.setflags(write=False)
    srt.setflags(write=False)
    if len(_MC_CACHE) >= _MC_CACHE_MAX:
        _MC_CACHE.pop(next(iter(_MC_CACHE)))
    _MC_CACHE[key] = (raw, srt)
    return raw, srt


def mc_squared_distances(
    desc: ManifoldDescriptor, samples: int, seed: int, threads: int | None = None
) -> np.ndarray:
    """Squared chordal distances from ``I_{n,p}`` to ``samples`` Haar points.

    Samples are drawn in chunks of :data:`MC_CHUNK`, chunk ``k`` seeded by
    ``SeedSequence([seed, k])`` and concatenated in chunk order, so the
    result does not depend on ``threads``. Results are cached per
    ``(desc, samples, seed)``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    return _mc_draw(desc, int(samples), int(seed), _resolve_threads(threads))[0]


def ball_volume_mc(desc: ManifoldDescriptor, r, samples: int = 100_000, seed: int = 0, threads: int | None = None):
    """Monte Carlo estimate of ``mu(B(r))`` with its binomial standard error.

    ``r`` may be a scalar or an array; returns ``(mu, stderr)`` of the same
    shape.
    """
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"Monte Carlo needs at least {MIN_MC_SAMPLES} samples (got {samples})")
    srt = _mc_draw(desc, int(samples), int(seed), _resolve_threads(threads))[1]
    r_arr = np.asarray(r, dtype=float)
    mu = np.searchsorted(srt, r_arr * r_arr, side="right") / samples
    se = np.sqrt(mu * (1.0 - mu) / samples)
    if np.ndim(r) == 0:
        return float(mu), float(se)
    return mu, se


# -- dispatch ------------------------------------------------------------------


def _check_radius(desc: ManifoldDescriptor, r: float) -> float:
    two_r = 2.0 * desc.radius
    tol = specfun.BOUNDARY_TOL * max(1.0, two_r)
    if not (-tol <= r <= two_r + tol):
        raise ValueError(f"radius {r} outside [0, {two_r}] for {desc}")
    return min(max(float(r), 0.0), two_r)


def ball_volume(desc: ManifoldDescriptor, r: float, model: VolumeModel, threads: int | None = None) -> float:
    """Normalized volume ``mu(B(r))`` under ``model``.

    The small-ball model is clamped to ``[0, 1]``; it emits
    :class:`ValidityWarning` when clamping fires or when a Grassmann radius
    exceeds 1, where the formula stops being exact.
    """
    r = _check_radius(desc, r)
    kind = model.kind
    if kind is ModelKind.EXACT_CAP:
        return cap_volume(desc.embed_dim, desc.radius, r)
    if kind is ModelKind.GAUSSIAN:
        return cap_volume_gaussian(desc.embed_dim, desc.radius, r)
    if kind is ModelKind.MONTE_CARLO:
        return ball_volume_mc(desc, r, model.samples, model.seed, threads)[0]
    if r == 0.0:
        return 0.0
    if desc.kind is Kind.GRASSMANN and r > 1.0:
        warnings.warn(f"small-ball volume is not exact on {desc} for r = {r:.6g} > 1", ValidityWarning, stacklevel=2)
    log_v = log_small_ball_coeff(desc) + desc.dim * math.log(r)
    if log_v > 0.0:
        warnings.warn(f"small-ball volume {math.exp(min(log_v, 700.0)):.6g} clamped to 1", ValidityWarning, stacklevel=2)
        return 1.0
    return math.exp(log_v)


def complement_radius(desc: ManifoldDescriptor, r: float) -> float:
    """Radius of the complementary ball: ``mu(B(r)) = 1 - mu(B(complement))``.

    Equals ``sqrt(4R^2 - r^2)``. For Grassmann manifolds the complementary
    ball lives in ``G(n, n - p)`` around the orthogonal complement.
    """
    r = _check_radius(desc, r)
    return math.sqrt(max(4.0 * desc.radius_sq - r * r, 0.0))


def ideal_radius_rN(desc: ManifoldDescriptor, N: int, model: VolumeModel, threads: int | None = None) -> float:
    """Radius ``r_N`` with ``mu(B(r_N)) = 1/N``.

    Closed forms for the small-ball and Gaussian models, bisection for the
    exact cap and Monte Carlo models.
    """
    if N < 2 or int(N) != N:
        raise ValueError(f"N must be an integer >= 2 (got {N})")
    N = int(N)
    target = 1.0 / N
    kind = model.kind
    if kind is ModelKind.SMALL_BALL:
        log_c = log_small_ball_coeff(desc)
        if log_c + math.log(N) < 0.0:
            warnings.warn(f"N = {N} < 1/c: small-ball radius exceeds 1 on {desc}", ValidityWarning, stacklevel=2)
        return math.exp(-(log_c + math.log(N)) / desc.dim)
    D = desc.embed_dim
    if kind is ModelKind.GAUSSIAN:
        s = math.sqrt(0.5 * D)
        inner = specfun.erf_inv(math.erf(s) - 2.0 / N) / s
        return math.sqrt(2.0 * desc.radius_sq * max(1.0 - inner, 0.0))

    if kind is ModelKind.MONTE_CARLO:
        srt = _mc_draw(desc, model.samples, model.seed, _resolve_threads(threads))[1]

        def measure(rr: float) -> float:
            return np.searchsorted(srt, rr * rr, side="right") / model.samples

        # the empirical CDF is a step function: bisect to the step itself
        tol = 0.0
    else:

        def measure(rr: float) -> float:
            return cap_volume(D, desc.radius, rr)

        tol = BISECT_TOL * target
    lo, hi = 0.0, 2.0 * desc.radius
    mid = 0.5 * (lo + hi)
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = measure(mid)
        if abs(val - target) <= tol:
            break
        if val < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(hi, 1.0):
            break
    return mid
