"""Points on the unitary group, complex Stiefel and complex Grassmann manifolds.

Every manifold carries the chordal distance of its spherical embedding:

======================  ==========  ==========  =========================
manifold                real dim    embed dim   sphere radius
======================  ==========  ==========  =========================
``U_n``                 n^2         2n^2        sqrt(n)
``V(n, p)``             2np - p^2   2np         sqrt(p)
``G(n, p)``             2p(n - p)   n^2 - 1     sqrt(p(n - p) / 2n)
======================  ==========  ==========  =========================

Grassmann points are stored as Stiefel representatives (an ``n x p`` matrix
with orthonormal columns); every function here depends only on the spanned
subspace.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg

__all__ = [
    "Kind",
    "ManifoldDescriptor",
    "ManifoldPoint",
    "PrincipalAngles",
    "chordal_distance",
    "geodesic_distance",
    "principal_angles",
    "midpoint",
    "mid_distance",
    "pair_distances",
    "pair_mid_distances",
    "sample_uniform",
    "sample_uniform_batch",
    "squared_distance_to_identity",
    "embed_sphere",
    "points_to_json",
    "points_from_json",
    "DescriptorMismatchError",
    "UnsupportedKindError",
]

_UNITARITY_TOL = 1e-9
GRASSMANN_EQUALITY_TOL = 1e-8


class Kind(str, enum.Enum):
    UNITARY = "unitary"
    STIEFEL = "stiefel"
    GRASSMANN = "grassmann"


class DescriptorMismatchError(ValueError):
    """Two points live on different manifolds."""


class UnsupportedKindError(ValueError):
    """Operation is not defined on this manifold kind."""


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Which manifold, with its size parameters.

    ``p`` is forced to ``n`` for the unitary group; Grassmann manifolds are
    restricted to ``p <= n/2``.
    """

    kind: Kind
    n: int
    p: int = 0

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        n, p = int(self.n), int(self.p)
        if n < 1:
            raise ValueError(f"n must be >= 1 (got {n})")
        if kind is Kind.UNITARY:
            if p not in (0, n):
                raise ValueError(f"unitary group requires p == n (got n={n}, p={p})")
            p = n
        elif kind is Kind.STIEFEL:
            if not 1 <= p <= n:
                raise ValueError(f"Stiefel manifold requires 1 <= p <= n (got n={n}, p={p})")
        else:
            if not (1 <= p and 2 * p <= n):
                raise ValueError(f"Grassmann manifold requires 1 <= p <= n/2 (got n={n}, p={p})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)

    @classmethod
    def unitary(cls, n: int) -> "ManifoldDescriptor":
        return cls(Kind.UNITARY, n, n)

    @classmethod
    def stiefel(cls, n: int, p: int) -> "ManifoldDescriptor":
        return cls(Kind.STIEFEL, n, p)

    @classmethod
    def grassmann(cls, n: int, p: int) -> "ManifoldDescriptor":
        return cls(Kind.GRASSMANN, n, p)

    @property
    def dim(self) -> int:
        """Real dimension of the manifold."""
        n, p = self.n, self.p
        if self.kind is Kind.GRASSMANN:
            return 2 * p * (n - p)
        return 2 * n * p - p * p

    @property
    def embed_dim(self) -> int:
        """Dimension ``D`` of the Euclidean space holding the embedding sphere."""
        n, p = self.n, self.p
        if self.kind is Kind.GRASSMANN:
            return n * n - 1
        return 2 * n * p

    @property
    def radius(self) -> float:
        """Radius ``R`` of the embedding sphere."""
        n, p = self.n, self.p
        if self.kind is Kind.GRASSMANN:
            return math.sqrt(p * (n - p) / (2.0 * n))
        return math.sqrt(p)

    @property
    def radius_sq(self) -> float:
        n, p = self.n, self.p
        if self.kind is Kind.GRASSMANN:
            return p * (n - p) / (2.0 * n)
        return float(p)

    @property
    def max_distance(self) -> float:
        """Largest chordal distance realised on the manifold itself."""
        if self.kind is Kind.GRASSMANN:
            return math.sqrt(self.p)
        return 2.0 * math.sqrt(self.p)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.p)

    def identity(self) -> "ManifoldPoint":
        """The point ``I_{n,p}`` (first ``p`` columns of the identity)."""
        return ManifoldPoint(self, np.eye(self.n, self.p, dtype=complex))

    def __str__(self) -> str:
        if self.kind is Kind.UNITARY:
            return f"U({self.n})"
        prefix = "V" if self.kind is Kind.STIEFEL else "G"
        return f"{prefix}({self.n},{self.p})"


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point given by a semi-unitary representative ``rep``."""

    descriptor: ManifoldDescriptor
    rep: np.ndarray = field(repr=False)

    def __post_init__(self):
        rep = np.array(self.rep, dtype=complex)
        if rep.shape != self.descriptor.shape:
            raise ValueError(f"representative has shape {rep.shape}, expected {self.descriptor.shape}")
        p = self.descriptor.p
        err = np.linalg.norm(rep.conj().T @ rep - np.eye(p))
        if not err <= _UNITARITY_TOL * math.sqrt(p):
            raise ValueError(f"representative is not semi-unitary (||Y^H Y - I|| = {err:.3g})")
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)


@dataclass(frozen=True)
class PrincipalAngles:
    """Angles describing the relative position of two points, largest first.

    Unitary angles are eigenphases in ``(-pi, pi]``; Grassmann angles lie
    in ``[0, pi/2]``.
    """

    theta: np.ndarray

    def __len__(self) -> int:
        return len(self.theta)


def _check_pair(x: ManifoldPoint, y: ManifoldPoint) -> ManifoldDescriptor:
    if x.descriptor != y.descriptor:
        raise DescriptorMismatchError(f"points live on {x.descriptor} and {y.descriptor}")
    return x.descriptor


# -- batched kernels ------------------------------------------------------
#
# Stacks have shape (k, n, p); these are the workhorses for codes and Monte
# Carlo, the single-pair API below wraps them.


def _herm(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def pair_distances(desc: ManifoldDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Chordal distances between matching representatives of two stacks."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if desc.kind is Kind.GRASSMANN:
        # sum of squared sines, from the residual of projecting b onto span(a)
        resid = b - a @ (_herm(a) @ b)
        return np.linalg.norm(resid, axis=(-2, -1))
    return np.linalg.norm(a - b, axis=(-2, -1))


def _grassmann_cosines(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(_herm(a) @ b, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def _unitary_phases(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(_herm(a) @ b)
    theta = np.angle(ev)
    return np.where(theta <= -np.pi, np.pi, theta)


def pair_mid_distances(desc: ManifoldDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each ``a[k]`` to the midpoint of ``(a[k], b[k])``.

    Unitary and Grassmann midpoints sit at half the principal angles; the
    Stiefel midpoint is the polar projection of the Euclidean mean.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if desc.kind is Kind.GRASSMANN:
        cos = _grassmann_cosines(a, b)
        # sin^2(theta/2) = (1 - cos theta)/2
        return np.sqrt(np.maximum(np.sum(1.0 - cos, axis=-1) / 2.0, 0.0))
    if desc.kind is Kind.UNITARY:
        theta = _unitary_phases(a, b)
        # 4 sin^2(theta/4) = 2 (1 - cos(theta/2))
        return np.sqrt(np.sum(4.0 * np.sin(theta / 4.0) ** 2, axis=-1))
    m = _stiefel_polar_midpoints(a, b)
    return np.linalg.norm(a - m, axis=(-2, -1))


def _stiefel_polar_midpoints(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    center = 0.5 * (a + b)
    u, s, vh = np.linalg.svd(center, full_matrices=False)
    scale = 1.0 + np.linalg.norm(center, axis=(-2, -1))
    if np.any(s[..., -1] <= 1e-10 * scale):
        raise linalg.NoUniqueProjectionError(
            "no unique projection: the mean of the pair is rank deficient (antipodal points)"
        )
    return u @ vh


# -- single-pair API ------------------------------------------------------


def chordal_distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Chordal distance of the spherical embedding.

    ``||X - Y||_F`` on the unitary group and Stiefel manifold,
    ``||XX^H - YY^H||_F / sqrt(2)`` on the Grassmann manifold.
    """
    desc = _check_pair(x, y)
    return float(pair_distances(desc, x.rep, y.rep))


def principal_angles(x: ManifoldPoint, y: ManifoldPoint) -> PrincipalAngles:
    """Principal angles between two unitary matrices or two subspaces.

    Unitary: eigenphases of ``X^H Y``. Grassmann: ``arccos`` of the clamped
    singular values of ``X^H Y``; small angles are recovered from sines to
    keep precision near zero.
    """
    desc = _check_pair(x, y)
    if desc.kind is Kind.UNITARY:
        _, theta = linalg.unitary_eig(x.rep.conj().T @ y.rep)
    elif desc.kind is Kind.GRASSMANN:
        cos = _grassmann_cosines(x.rep, y.rep)  # descending
        resid = y.rep - x.rep @ (x.rep.conj().T @ y.rep)
        sin = np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0)[::-1]  # ascending
        theta = np.where(cos > math.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
    else:
        raise UnsupportedKindError("principal angles are not defined on the Stiefel manifold")
    order = np.argsort(-np.abs(theta), kind="stable")
    return PrincipalAngles(np.asarray(theta)[order])


def geodesic_distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Intrinsic distance ``sqrt(sum theta_i^2)`` (unitary and Grassmann only)."""
    desc = _check_pair(x, y)
    if desc.kind is Kind.STIEFEL:
        raise UnsupportedKindError("geodesic distance between Stiefel points has no closed form")
    return float(np.sqrt(np.sum(principal_angles(x, y).theta ** 2)))


def midpoint(x: ManifoldPoint, y: ManifoldPoint) -> ManifoldPoint:
    """Point halfway between ``x`` and ``y``.

    Raises
    ------
    linalg.NoUniqueProjectionError
        For Stiefel pairs whose mean is rank deficient (antipodal points).
    """
    desc = _check_pair(x, y)
    if desc.kind is Kind.UNITARY:
        omega, theta = linalg.unitary_eig(x.rep.conj().T @ y.rep)
        half = omega @ np.diag(np.exp(0.5j * theta)) @ omega.conj().T
        rep = x.rep @ half
    elif desc.kind is Kind.GRASSMANN:
        u, s, v = linalg.svd(x.rep.conj().T @ y.rep)
        s = np.clip(s, 0.0, 1.0)
        # aligned principal vectors: the midpoint column is their normalised sum
        xa = x.rep @ u
        ya = y.rep @ v
        rep = (xa + ya) / np.sqrt(2.0 + 2.0 * s)
    else:
        rep = linalg.polar_factor(0.5 * (x.rep + y.rep))
    return ManifoldPoint(desc, _reorthonormalize(rep))


def _reorthonormalize(rep: np.ndarray) -> np.ndarray:
    # one polar step removes round-off drift without moving the point
    u, _, vh = np.linalg.svd(rep, full_matrices=False)
    return u @ vh


def mid_distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """``chordal_distance(x, midpoint(x, y))`` computed in closed form."""
    desc = _check_pair(x, y)
    return float(pair_mid_distances(desc, x.rep, y.rep))


# -- sampling ---------------------------------------------------------------


def sample_uniform_batch(desc: ManifoldDescriptor, rng: np.random.Generator, size: int) -> np.ndarray:
    """Stack of ``size`` Haar-distributed representatives, shape ``(size, n, p)``.

    Each is the phase-fixed Q factor of a standard complex Gaussian matrix.
    """
    n, p = desc.shape
    g = (rng.standard_normal((size, n, p)) + 1j * rng.standard_normal((size, n, p))) / math.sqrt(2.0)
    while True:
        try:
            return linalg.qr_unitary(g)
        except linalg.DegenerateInputError:  # pragma: no cover - measure zero
            g = (rng.standard_normal((size, n, p)) + 1j * rng.standard_normal((size, n, p))) / math.sqrt(2.0)


def sample_uniform(desc: ManifoldDescriptor, rng: np.random.Generator) -> ManifoldPoint:
    """One Haar-uniform point; the caller owns ``rng``."""
    return ManifoldPoint(desc, sample_uniform_batch(desc, rng, 1)[0])


def squared_distance_to_identity(desc: ManifoldDescriptor, reps: np.ndarray) -> np.ndarray:
    """Squared chordal distance from ``I_{n,p}`` to each representative."""
    p = desc.p
    top = reps[..., :p, :]
    if desc.kind is Kind.GRASSMANN:
        return np.maximum(p - np.sum(np.abs(top) ** 2, axis=(-2, -1)), 0.0)
    tr = np.real(np.trace(top, axis1=-2, axis2=-1))
    return np.maximum(2.0 * p - 2.0 * tr, 0.0)


# -- embedding --------------------------------------------------------------


def _detraced_coordinates(h: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless Hermitian matrix in an orthonormal basis."""
    n = h.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    off = h[iu, ju]
    diag = np.real(np.diag(h))
    # generalised Gell-Mann diagonal basis (sum_{j<=l} E_jj - l E_{l+1,l+1}) / sqrt(l(l+1))
    csum = np.cumsum(diag)[:-1]
    ell = np.arange(1, n)
    diag_coords = (csum - ell * diag[1:]) / np.sqrt(ell * (ell + 1.0))
    return np.concatenate([math.sqrt(2.0) * off.real, math.sqrt(2.0) * off.imag, diag_coords])


def embed_sphere(x: ManifoldPoint) -> np.ndarray:
    """Isometric image of ``x`` on the sphere of radius ``R`` in ``R^D``.

    Unitary/Stiefel: the real and imaginary parts of the row-major entries.
    Grassmann: ``(YY^H - (p/n) I)/sqrt(2)`` in an orthonormal basis of
    traceless Hermitian matrices.
    """
    desc = x.descriptor
    if desc.kind is Kind.GRASSMANN:
        proj = x.rep @ x.rep.conj().T
        h = (proj - (desc.p / desc.n) * np.eye(desc.n)) / math.sqrt(2.0)
        return _detraced_coordinates(h)
    return np.stack([x.rep.real, x.rep.imag], axis=-1).ravel()


# -- serialization ----------------------------------------------------------


def points_to_json(desc: ManifoldDescriptor, points) -> dict:
    """Serialize points to ``{kind, n, p, matrices}``.

    ``matrices[k][i][j]`` is the pair ``[re, im]`` of entry ``(i, j)`` of
    the ``k``-th representative.
    """
    mats = []
    for pt in points:
        rep = pt.rep if isinstance(pt, ManifoldPoint) else np.asarray(pt, dtype=complex)
        mats.append([[[float(z.real), float(z.imag)] for z in row] for row in rep])
    return {"kind": desc.kind.value, "n": desc.n, "p": desc.p, "matrices": mats}


def points_from_json(obj) -> tuple[ManifoldDescriptor, list[ManifoldPoint]]:
    """Inverse of :func:`points_to_json`; accepts a dict or a JSON string."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        desc = ManifoldDescriptor(Kind(obj["kind"]), int(obj["n"]), int(obj["p"]))
        mats = obj["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid code JSON: {exc}") from exc
    points = []
    for k, m in enumerate(mats):
        arr = np.asarray(m, dtype=float)
        if arr.shape != (desc.n, desc.p, 2):
            raise ValueError(f"invalid code JSON: matrix {k} has shape {arr.shape[:-1]}, expected {desc.shape}")
        points.append(ManifoldPoint(desc, arr[..., 0] + 1j * arr[..., 1]))
    return desc, points
