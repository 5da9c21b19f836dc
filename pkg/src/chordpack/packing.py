"""Codes on matrix manifolds: minimum distance, kissing radius, density, bounds.

A code is a finite set of points on one manifold. Its kissing radius is the
smallest mid-distance over codeword pairs, and its density is the fraction
of the manifold covered by the disjoint balls of that radius.

Most bounds come in two flavours: functions of the minimum distance
``delta`` (kissing radius and density bounds, Hamming-type cardinality
bounds) and functions of the code size ``N`` through the ideal radius
``r_N`` (distance bounds).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import specfun
from .manifolds import (
    Kind,
    ManifoldDescriptor,
    ManifoldPoint,
    embed_sphere,
    pair_distances,
    pair_mid_distances,
)
from .volumes import ValidityWarning, VolumeModel, ball_volume, cap_volume, ideal_radius_rN

__all__ = [
    "Code",
    "DuplicateCodewordError",
    "DensityReport",
    "min_distance",
    "kissing_radius",
    "density",
    "kissing_lower",
    "kissing_upper",
    "upper_bound_status",
    "kissing_spherical",
    "spherical_distance_from_kissing",
    "density_bounds",
    "hamming_standard",
    "hamming_improved",
    "dist_bound_hamming",
    "dist_bound_sphere",
    "dist_bound_grass",
    "dist_bound_conjectured",
    "rankin_bounds",
    "density_exact_p1",
    "spherical_image_density",
    "analyze",
]

DUPLICATE_TOL = 1e-8
REPORT_TOL = 1e-8


class DuplicateCodewordError(ValueError):
    """Two codewords coincide (distance below ``DUPLICATE_TOL``)."""


class Code:
    """Finite list of points on one manifold.

    Pairwise distance and mid-distance matrices are computed on first use
    and cached; they are read-only afterwards.

    Parameters
    ----------
    descriptor : ManifoldDescriptor
    points : sequence of ManifoldPoint or array of shape ``(N, n, p)``
    name : str, optional
    """

    def __init__(self, descriptor: ManifoldDescriptor, points, name: str | None = None):
        self.descriptor = descriptor
        self.name = name
        pts = []
        for pt in points:
            if isinstance(pt, ManifoldPoint):
                if pt.descriptor != descriptor:
                    raise ValueError(f"codeword lives on {pt.descriptor}, code is on {descriptor}")
                pts.append(pt)
            else:
                pts.append(ManifoldPoint(descriptor, pt))
        if len(pts) < 2:
            raise ValueError(f"a code needs at least 2 codewords (got {len(pts)})")
        self.points = tuple(pts)
        self.reps = np.stack([pt.rep for pt in pts])
        self.reps.setflags(write=False)
        self._dist = None
        self._mid = None
        dist = self.distance_matrix
        iu = np.triu_indices(self.N, k=1)
        if np.any(dist[iu] <= DUPLICATE_TOL):
            k = int(np.argmin(dist[iu]))
            raise DuplicateCodewordError(f"duplicate codewords {iu[0][k]} and {iu[1][k]}")

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return self.N

    def _pairs(self):
        i, j = np.triu_indices(self.N, k=1)
        return i, j

    def _symmetric(self, vals) -> np.ndarray:
        i, j = self._pairs()
        out = np.zeros((self.N, self.N))
        out[i, j] = vals
        out[j, i] = vals
        out.setflags(write=False)
        return out

    @property
    def distance_matrix(self) -> np.ndarray:
        """Symmetric matrix of chordal distances ``delta_ij``."""
        if self._dist is None:
            i, j = self._pairs()
            self._dist = self._symmetric(pair_distances(self.descriptor, self.reps[i], self.reps[j]))
        return self._dist

    @property
    def mid_distance_matrix(self) -> np.ndarray:
        """Symmetric matrix of mid-distances ``rho_ij``.

        Raises ``NoUniqueProjectionError`` for antipodal Stiefel pairs.
        """
        if self._mid is None:
            i, j = self._pairs()
            self._mid = self._symmetric(pair_mid_distances(self.descriptor, self.reps[i], self.reps[j]))
        return self._mid

    def to_json(self) -> dict:
        from .manifolds import points_to_json

        return points_to_json(self.descriptor, self.points)

    @classmethod
    def from_json(cls, obj, name: str | None = None) -> "Code":
        from .manifolds import points_from_json

        desc, pts = points_from_json(obj)
        return cls(desc, pts, name=name)


def _offdiag_min(mat: np.ndarray) -> float:
    i, j = np.triu_indices(mat.shape[0], k=1)
    return float(np.min(mat[i, j]))


def min_distance(code: Code) -> float:
    """Smallest chordal distance between two codewords."""
    return _offdiag_min(code.distance_matrix)


def kissing_radius(code: Code) -> float:
    """Smallest mid-distance over codeword pairs.

    The full matrix is available as ``code.mid_distance_matrix``.
    """
    return _offdiag_min(code.mid_distance_matrix)


def _clamped_density(value: float) -> tuple[float, bool]:
    if value > 1.0:
        warnings.warn(f"density {value:.6g} clamped to 1", ValidityWarning, stacklevel=3)
        return 1.0, True
    return value, False


def density(code: Code, model: VolumeModel, return_flag: bool = False):
    """``N mu(B(rho))`` with ``rho`` the kissing radius, clamped to 1.

    With ``return_flag=True`` returns ``(density, clamped)``.
    """
    val, clamped = _clamped_density(code.N * ball_volume(code.descriptor, kissing_radius(code), model))
    return (val, clamped) if return_flag else val


# -- kissing radius bounds ---------------------------------------------------


def _one_minus_sqrt_one_minus(y: float) -> float:
    """``1 - sqrt(1 - y)`` without cancellation for small ``y``."""
    y = min(y, 1.0)  # y = 1 + ulp when delta sits on the maximal distance
    return y / (1.0 + math.sqrt(1.0 - y))


def _check_delta(desc: ManifoldDescriptor, delta: float) -> float:
    dmax = desc.max_distance
    tol = specfun.BOUNDARY_TOL * max(1.0, dmax)
    if not (0.0 < delta <= dmax + tol):
        raise ValueError(f"minimum distance {delta} outside (0, {dmax}] for {desc}")
    return min(float(delta), dmax)


def kissing_lower(desc: ManifoldDescriptor, delta: float) -> float:
    """Lower bound on the kissing radius of any code with minimum distance ``delta``.

    Attained when all principal angles between the closest pair are equal.
    """
    delta = _check_delta(desc, delta)
    p = desc.p
    if desc.kind is Kind.GRASSMANN:
        return math.sqrt(0.5 * p * _one_minus_sqrt_one_minus(delta * delta / p))
    return math.sqrt(2.0 * p * _one_minus_sqrt_one_minus(delta * delta / (4.0 * p)))


def _ceil_term(x: float) -> float:
    """``c - sqrt(c - x)`` with ``c`` the smallest integer >= ``x``."""
    c = math.ceil(x)
    if c <= 1:
        return _one_minus_sqrt_one_minus(x)
    return c - math.sqrt(max(c - x, 0.0))


def kissing_upper(desc: ManifoldDescriptor, delta: float) -> float:
    """Upper bound on the kissing radius from the minimum distance.

    Attained by concentrating the principal angles on as few directions as
    possible. Proven for Grassmann manifolds and the unitary group; the
    Stiefel value (``p < n``) uses the unitary formula and is conjectural,
    see :func:`upper_bound_status`.
    """
    delta = _check_delta(desc, delta)
    if desc.kind is Kind.GRASSMANN:
        return math.sqrt(0.5 * _ceil_term(delta * delta))
    return math.sqrt(2.0 * _ceil_term(delta * delta / 4.0))


def upper_bound_status(desc: ManifoldDescriptor) -> str:
    """``"proven"`` or ``"conjectured"`` for :func:`kissing_upper` on ``desc``."""
    if desc.kind is Kind.STIEFEL and desc.p != desc.n:
        return "conjectured"
    return "proven"


def kissing_spherical(desc: ManifoldDescriptor, delta: float) -> float:
    """Kissing radius of a spherical code with minimum distance ``delta``
    on the embedding sphere: ``sqrt(2) R sqrt(1 - sqrt(1 - delta^2/4R^2))``."""
    two_r = 2.0 * desc.radius
    tol = specfun.BOUNDARY_TOL * max(1.0, two_r)
    if not (0.0 < delta <= two_r + tol):
        raise ValueError(f"minimum distance {delta} outside (0, {two_r}] for the sphere of {desc}")
    delta = min(float(delta), two_r)
    r2 = desc.radius_sq
    return math.sqrt(2.0 * r2 * _one_minus_sqrt_one_minus(delta * delta / (4.0 * r2)))


def spherical_distance_from_kissing(desc: ManifoldDescriptor, rho: float) -> float:
    """Inverse of :func:`kissing_spherical`: ``delta^2 = 4 rho^2 - rho^4 / R^2``."""
    return math.sqrt(max(4.0 * rho * rho - rho**4 / desc.radius_sq, 0.0))


def density_bounds(code: Code, model: VolumeModel) -> tuple[float, float]:
    """Density bounds ``N mu(B(lower))`` and ``min(1, N mu(B(upper)))``."""
    desc = code.descriptor
    delta = min_distance(code)
    lo = code.N * ball_volume(desc, kissing_lower(desc, delta), model)
    hi = min(1.0, code.N * ball_volume(desc, kissing_upper(desc, delta), model))
    return lo, hi


# -- Hamming-type bounds ---------------------------------------------------


def hamming_standard(desc: ManifoldDescriptor, delta: float, model: VolumeModel) -> float:
    """Cardinality bound ``1/mu(B(delta/2))``."""
    delta = _check_delta(desc, delta)
    return 1.0 / ball_volume(desc, 0.5 * delta, model)


def hamming_improved(desc: ManifoldDescriptor, delta: float, model: VolumeModel) -> float:
    """Cardinality bound ``1/mu(B(lower kissing radius))``."""
    return 1.0 / ball_volume(desc, kissing_lower(desc, delta), model)


def dist_bound_hamming(desc: ManifoldDescriptor, N: int, model: VolumeModel) -> float:
    """Largest ``delta`` allowed by the standard Hamming bound: ``2 r_N``."""
    return min(2.0 * ideal_radius_rN(desc, N, model), desc.max_distance)


def dist_bound_sphere(desc: ManifoldDescriptor, N: int, model: VolumeModel) -> float:
    """Distance bound from the spherical kissing radius:
    ``delta^2 <= 4 r_N^2 - r_N^4 / R^2``."""
    r = ideal_radius_rN(desc, N, model)
    return math.sqrt(max(4.0 * r * r - r**4 / desc.radius_sq, 0.0))


def dist_bound_grass(desc: ManifoldDescriptor, N: int, model: VolumeModel) -> float:
    """Grassmann distance bound ``delta^2 <= 4 r_N^2 - (4/p) r_N^4``."""
    if desc.kind is not Kind.GRASSMANN:
        raise ValueError(f"this distance bound is only defined on Grassmann manifolds (got {desc})")
    r = ideal_radius_rN(desc, N, model)
    return math.sqrt(max(4.0 * r * r - 4.0 * r**4 / desc.p, 0.0))


def dist_bound_conjectured(desc: ManifoldDescriptor, N: int, model: VolumeModel) -> float:
    """Conjectured distance bound (guaranteed only as ``N -> infinity``).

    Grassmann: ``c - (c - 2r^2)^2`` with ``c = ceil(2 r_N^2)``.
    Stiefel/unitary: ``4c - 4(c - r^2/2)^2`` with ``c = ceil(r_N^2/2)``.
    Returns ``delta``, not ``delta^2``.
    """
    r2 = ideal_radius_rN(desc, N, model) ** 2
    if desc.kind is Kind.GRASSMANN:
        x = 2.0 * r2
        c = max(math.ceil(x), 1)
        d2 = c - (c - x) ** 2
    else:
        x = 0.5 * r2
        c = max(math.ceil(x), 1)
        d2 = 4.0 * c - 4.0 * (c - x) ** 2
    return math.sqrt(max(d2, 0.0))


def rankin_bounds(D: int, R: float, N: int) -> tuple[float | None, float | None]:
    """Rankin simplex and orthoplex distance bounds for ``N`` points on ``S^{D-1}(R)``.

    Each entry is ``None`` outside its validity range (``N <= D + 1`` and
    ``N <= 2D`` respectively).
    """
    if N < 2:
        raise ValueError(f"N must be >= 2 (got {N})")
    simplex = math.sqrt(2.0 * R * R * N / (N - 1)) if N <= D + 1 else None
    orthoplex = math.sqrt(2.0) * R if N <= 2 * D else None
    return simplex, orthoplex


def density_exact_p1(desc: ManifoldDescriptor, N: int, delta: float) -> float:
    """Density of a packing with ``p = 1`` whose kissing radius is the
    spherical one for minimum distance ``delta``.

    Grassmann ``G(n,1)``: ``N ((1 - sqrt(1 - delta^2))/2)^(n-1)``.
    Stiefel ``V(n,1)``: ``N I_x((2n-1)/2, (2n-1)/2)`` with
    ``x = (1 - sqrt(1 - delta^2/4))/2``.
    """
    if desc.p != 1:
        raise ValueError(f"closed-form density needs p = 1 (got {desc})")
    delta = _check_delta(desc, delta)
    n = desc.n
    if desc.kind is Kind.GRASSMANN:
        return N * (0.5 * _one_minus_sqrt_one_minus(delta * delta)) ** (n - 1)
    a = 0.5 * (2 * n - 1)
    return N * specfun.reg_inc_beta(0.5 * _one_minus_sqrt_one_minus(delta * delta / 4.0), a, a)


def spherical_image_density(code: Code) -> float:
    """Density of the embedded code read as a spherical code (exact caps)."""
    desc = code.descriptor
    emb = np.stack([embed_sphere(pt) for pt in code.points])
    diff = emb[:, None, :] - emb[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    delta_s = _offdiag_min(dist)
    rho_s = kissing_spherical(desc, delta_s)
    return code.N * cap_volume(desc.embed_dim, desc.radius, rho_s)


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    """Summary of a code's packing quality.

    ``rho_upper_status`` is ``"conjectured"`` for Stiefel codes with
    ``p < n``; ``density_clamped`` records whether the density hit 1.
    """

    name: str
    manifold: str
    N: int
    delta: float
    kissing_radius: float
    rho_lower: float
    rho_upper: float
    rho_upper_status: str
    rho_spherical: float
    r_N: float
    density: float
    density_clamped: bool
    density_lower: float
    density_upper: float
    spherical_image_density: float
    volume_model: str

    CSV_HEADER = (
        "# name: code label\n"
        "# manifold: U(n), V(n,p) or G(n,p)\n"
        "# N: number of codewords\n"
        "# delta: minimum chordal distance\n"
        "# kissing_radius: minimum mid-distance over codeword pairs\n"
        "# rho_lower: kissing radius lower bound from delta (equal angles)\n"
        "# rho_upper: kissing radius upper bound from delta (concentrated angles)\n"
        "# rho_upper_status: proven or conjectured\n"
        "# rho_spherical: kissing radius of a spherical code with the same delta\n"
        "# r_N: radius with mu(B(r_N)) = 1/N\n"
        "# density: N mu(B(kissing_radius)), clamped to 1\n"
        "# density_clamped: whether clamping fired\n"
        "# density_lower: N mu(B(rho_lower))\n"
        "# density_upper: min(1, N mu(B(rho_upper)))\n"
        "# spherical_image_density: N sigma(cap of the embedded code's spherical kissing radius)\n"
        "# volume_model: ball volume model used for all measures\n"
    )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        row = self.to_dict()
        buf = io.StringIO()
        buf.write(self.CSV_HEADER)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(row))
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
        return buf.getvalue()

    def check_invariants(self, tol: float = REPORT_TOL) -> list[str]:
        """Names of violated report invariants (empty when all hold).

        ``kissing_radius <= r_N`` is listed separately under the prefix
        ``"report:"`` since it is expected rather than proven.
        """
        bad = []
        if self.rho_spherical > self.rho_lower + tol:
            bad.append("rho_spherical <= rho_lower")
        if self.rho_lower > self.kissing_radius + tol:
            bad.append("rho_lower <= kissing_radius")
        if self.kissing_radius > self.rho_upper + tol:
            bad.append("kissing_radius <= rho_upper")
        if self.density_lower > self.density + tol:
            bad.append("density_lower <= density")
        if self.density > self.density_upper + tol:
            bad.append("density <= density_upper")
        if self.kissing_radius > self.r_N + tol:
            bad.append("report: kissing_radius <= r_N")
        return bad


def analyze(code: Code, model: VolumeModel) -> DensityReport:
    """Fill a :class:`DensityReport` for ``code`` under ``model``."""
    desc = code.descriptor
    delta = min_distance(code)
    rho = kissing_radius(code)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        dens, clamped = density(code, model, return_flag=True)
        lo, hi = density_bounds(code, model)
        r_n = ideal_radius_rN(desc, code.N, model)
    return DensityReport(
        name=code.name or "",
        manifold=str(desc),
        N=code.N,
        delta=delta,
        kissing_radius=rho,
        rho_lower=kissing_lower(desc, delta),
        rho_upper=kissing_upper(desc, delta),
        rho_upper_status=upper_bound_status(desc),
        rho_spherical=kissing_spherical(desc, delta),
        r_N=r_n,
        density=dens,
        density_clamped=clamped,
        density_lower=lo,
        density_upper=hi,
        spherical_image_density=spherical_image_density(code),
        volume_model=str(model),
    )
