import json
import math

import numpy as np
import pytest
from scipy import stats

from chordpack import linalg
from chordpack.catalog import build_C1, build_C2
from chordpack.manifolds import (
    DescriptorMismatchError,
    Kind,
    ManifoldDescriptor,
    ManifoldPoint,
    UnsupportedKindError,
    chordal_distance,
    embed_sphere,
    geodesic_distance,
    mid_distance,
    midpoint,
    pair_distances,
    points_from_json,
    points_to_json,
    principal_angles,
    sample_uniform,
    sample_uniform_batch,
    squared_distance_to_identity,
)

U = ManifoldDescriptor.unitary
V = ManifoldDescriptor.stiefel
G = ManifoldDescriptor.grassmann

MANIFOLDS = [U(1), U(2), U(3), V(3, 1), V(4, 2), V(5, 3), G(2, 1), G(4, 2), G(6, 2), G(7, 3)]


def test_descriptor_table():
    for n in range(1, 6):
        d = U(n)
        assert (d.dim, d.embed_dim, d.radius) == (n * n, 2 * n * n, math.sqrt(n))
        for p in range(1, n + 1):
            d = V(n, p)
            assert (d.dim, d.embed_dim, d.radius) == (2 * n * p - p * p, 2 * n * p, math.sqrt(p))
        for p in range(1, n // 2 + 1):
            d = G(n, p)
            assert (d.dim, d.embed_dim) == (2 * p * (n - p), n * n - 1)
            assert d.radius == math.sqrt(p * (n - p) / (2 * n))


@pytest.mark.parametrize("args", [(Kind.GRASSMANN, 4, 3), (Kind.GRASSMANN, 3, 2), (Kind.STIEFEL, 3, 4), (Kind.STIEFEL, 3, 0), (Kind.UNITARY, 0, 0), (Kind.UNITARY, 3, 2)])
def test_descriptor_validation(args):
    with pytest.raises(ValueError):
        ManifoldDescriptor(*args)


def test_point_validation():
    with pytest.raises(ValueError):
        ManifoldPoint(V(3, 2), np.ones((3, 2)))
    with pytest.raises(ValueError):
        ManifoldPoint(V(3, 2), np.eye(3))
    pt = ManifoldPoint(V(3, 2), np.eye(3, 2))
    with pytest.raises(ValueError):
        pt.rep[0, 0] = 2.0


def _pt(desc, rep):
    return ManifoldPoint(desc, np.asarray(rep, dtype=complex))


def test_chordal_examples():
    d = U(3)
    assert chordal_distance(_pt(d, np.eye(3)), _pt(d, -np.eye(3))) == pytest.approx(2 * math.sqrt(3))
    g = G(4, 2)
    a = _pt(g, np.eye(4)[:, :2])
    b = _pt(g, np.eye(4)[:, 2:])
    assert chordal_distance(a, b) == pytest.approx(math.sqrt(2), abs=1e-15)
    c2 = build_C2().points
    assert chordal_distance(c2[0], c2[1]) == pytest.approx(1.0, abs=1e-15)


def test_descriptor_mismatch():
    with pytest.raises(DescriptorMismatchError):
        chordal_distance(V(4, 2).identity(), G(4, 2).identity())


def test_geodesic_examples():
    g = G(4, 2)
    a = _pt(g, np.eye(4)[:, :2])
    b = _pt(g, np.eye(4)[:, 2:])
    assert geodesic_distance(a, a) == 0.0
    assert geodesic_distance(a, b) == pytest.approx(math.pi / math.sqrt(2))
    u = U(2)
    assert geodesic_distance(_pt(u, np.diag([-1, 1])), u.identity()) == pytest.approx(math.pi)
    with pytest.raises(UnsupportedKindError):
        geodesic_distance(V(4, 2).identity(), V(4, 2).identity())


def test_principal_angle_examples():
    c2 = build_C2().points
    assert principal_angles(c2[0], c2[1]).theta == pytest.approx([math.pi / 2, 0.0], abs=1e-12)
    c1 = build_C1().points
    for i in range(4):
        for j in range(i + 1, 4):
            th = principal_angles(c1[i], c1[j]).theta
            assert th == pytest.approx([math.acos(1 / math.sqrt(3))] * 2, abs=1e-12)
    u = U(3)
    assert np.allclose(principal_angles(u.identity(), u.identity()).theta, 0.0)
    with pytest.raises(UnsupportedKindError):
        principal_angles(V(4, 2).identity(), V(4, 2).identity())


def test_principal_angles_small_and_ordered(rng):
    g = G(6, 2)
    x = sample_uniform(g, rng)
    # tiny rotation: angles recovered accurately from sines
    t = 1e-9
    rot = np.eye(6, dtype=complex)
    rot[0, 0] = rot[5, 5] = math.cos(t)
    rot[0, 5], rot[5, 0] = -math.sin(t), math.sin(t)
    q = np.linalg.qr(x.rep, mode="complete")[0]
    y = ManifoldPoint(g, q @ rot @ q.conj().T @ x.rep)
    th = principal_angles(x, y).theta
    assert np.all(th >= 0) and np.all(th <= math.pi / 2)
    assert np.all(np.diff(np.abs(th)) <= 0)
    assert chordal_distance(x, y) == pytest.approx(math.sqrt(np.sum(np.sin(th) ** 2)), rel=1e-6)


@pytest.mark.parametrize("desc", [d for d in MANIFOLDS if d.kind is not Kind.STIEFEL])
def test_distance_identities(desc, rng):
    for _ in range(200):
        x, y = sample_uniform(desc, rng), sample_uniform(desc, rng)
        th = principal_angles(x, y).theta
        d2 = chordal_distance(x, y) ** 2
        if desc.kind is Kind.UNITARY:
            assert np.all(th > -math.pi) and np.all(th <= math.pi)
            assert d2 == pytest.approx(4 * np.sum(np.sin(th / 2) ** 2), abs=1e-9)
        else:
            assert d2 == pytest.approx(np.sum(np.sin(th) ** 2), abs=1e-9)
        assert chordal_distance(x, y) <= geodesic_distance(x, y) + 1e-12


@pytest.mark.parametrize("desc", MANIFOLDS)
def test_isometric_embedding(desc, rng):
    for _ in range(1000):
        x, y = sample_uniform(desc, rng), sample_uniform(desc, rng)
        ex, ey = embed_sphere(x), embed_sphere(y)
        assert ex.shape == (desc.embed_dim,)
        assert np.linalg.norm(ex) == pytest.approx(desc.radius, abs=1e-9)
        assert abs(np.linalg.norm(ex - ey) - chordal_distance(x, y)) <= 1e-9


def test_embedding_examples(rng):
    x = sample_uniform(V(5, 1), rng)
    e = embed_sphere(x)
    assert e.shape == (10,) and np.linalg.norm(e) == pytest.approx(1.0)
    assert np.linalg.norm(embed_sphere(G(4, 2).identity())) == pytest.approx(math.sqrt(0.5))
    assert np.linalg.norm(embed_sphere(x) - embed_sphere(x)) == 0.0


def test_grassmann_class_invariance(rng):
    g = G(7, 3)
    x = sample_uniform(g, rng)
    q = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    xq = ManifoldPoint(g, x.rep @ q)
    assert chordal_distance(x, xq) <= 1e-8
    assert np.allclose(embed_sphere(x), embed_sphere(xq), atol=1e-12)


@pytest.mark.parametrize("desc", MANIFOLDS)
def test_distance_axioms(desc, rng):
    for _ in range(100):
        x, y = sample_uniform(desc, rng), sample_uniform(desc, rng)
        d = chordal_distance(x, y)
        assert d == chordal_distance(y, x) or abs(d - chordal_distance(y, x)) <= 1e-14
        assert 0 <= d <= 2 * desc.radius + 1e-12
        assert chordal_distance(x, x) <= 1e-8


@pytest.mark.parametrize("desc", MANIFOLDS)
def test_midpoint_properties(desc, rng):
    for _ in range(300):
        x, y = sample_uniform(desc, rng), sample_uniform(desc, rng)
        m = midpoint(x, y)
        dx, dy, d = chordal_distance(x, m), chordal_distance(y, m), chordal_distance(x, y)
        assert abs(dx - dy) <= 1e-8
        assert d / 2 < dx <= d / math.sqrt(2) + 1e-9
        assert dx == pytest.approx(mid_distance(x, y), abs=1e-9)
        if desc.kind is Kind.UNITARY:
            th = principal_angles(x, y).theta
            assert dx == pytest.approx(2 * math.sqrt(np.sum(np.sin(th / 4) ** 2)), abs=1e-9)
        elif desc.kind is Kind.GRASSMANN:
            th = principal_angles(x, y).theta
            assert dx == pytest.approx(math.sqrt(np.sum(np.sin(th / 2) ** 2)), abs=1e-9)


def test_midpoint_examples(rng):
    u = U(2)
    m = midpoint(u.identity(), _pt(u, np.diag([-1, 1])))
    assert chordal_distance(u.identity(), m) == pytest.approx(math.sqrt(2))
    assert np.allclose(np.abs(np.diag(m.rep)), 1.0) and np.allclose(m.rep, np.diag(np.diag(m.rep)))
    assert sorted(np.round(np.diag(m.rep), 12), key=lambda z: z.imag) == [1.0, 1j]
    c2 = build_C2().points
    assert mid_distance(c2[0], c2[1]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    s = V(5, 2)
    x = sample_uniform(s, rng)
    assert np.allclose(midpoint(x, x).rep, x.rep, atol=1e-12)


def test_stiefel_antipodal_midpoint():
    s = V(4, 2)
    with pytest.raises(linalg.NoUniqueProjectionError, match="no unique projection"):
        midpoint(s.identity(), ManifoldPoint(s, -np.eye(4, 2)))


def test_haar_invariance(rng):
    desc = V(4, 2)
    q = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    a = sample_uniform_batch(desc, rng, 10_000)
    b = sample_uniform_batch(desc, rng, 10_000)
    # distance is invariant pointwise
    assert np.allclose(pair_distances(desc, q @ a, q @ b), pair_distances(desc, a, b), atol=1e-12)
    # and the distribution of independent rotated samples matches
    a2 = sample_uniform_batch(desc, rng, 10_000)
    b2 = sample_uniform_batch(desc, rng, 10_000)
    ks = stats.ks_2samp(pair_distances(desc, q @ a2, q @ b2), pair_distances(desc, a, b)).statistic
    assert ks < 0.02


def test_sampling_moments():
    rng = np.random.default_rng(7)
    m = 20_000
    for desc, mean, var in [
        (V(6, 2), 4.0, 4.0 / 6),
        (G(6, 2), 2 * 4 / 6, 4 * 16 / (6**4 - 36)),
    ]:
        d2 = squared_distance_to_identity(desc, sample_uniform_batch(desc, rng, m))
        assert abs(d2.mean() - mean) <= 3 * math.sqrt(var / m)


def test_sampling_deterministic():
    a = sample_uniform_batch(G(5, 2), np.random.default_rng(3), 4)
    b = sample_uniform_batch(G(5, 2), np.random.default_rng(3), 4)
    assert np.array_equal(a, b)


def test_json_round_trip(rng):
    desc = G(5, 2)
    pts = [sample_uniform(desc, rng) for _ in range(3)]
    obj = points_to_json(desc, pts)
    assert set(obj) == {"kind", "n", "p", "matrices"}
    assert np.asarray(obj["matrices"]).shape == (3, 5, 2, 2)
    d2, back = points_from_json(json.dumps(obj))
    assert d2 == desc
    for p, q in zip(pts, back):
        assert np.array_equal(p.rep, q.rep)


@pytest.mark.parametrize(
    "obj",
    [{"kind": "sphere", "n": 2, "p": 1, "matrices": []}, {"n": 2}, {"kind": "stiefel", "n": 2, "p": 1, "matrices": [[[1, 0]]]}],
)
def test_json_schema_errors(obj):
    with pytest.raises(ValueError):
        points_from_json(obj)
