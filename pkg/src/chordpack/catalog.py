"""Concrete codes with known parameters, and a simple packing search.

Codes in ``G(4, 2)``
    ``C1``: four codewords ``I_2 (x) c`` built from a tetrahedron of lines
    in ``G(2, 1)``; every pair has both principal angles ``arccos(1/sqrt 3)``.
    ``C2``: the four cyclic row shifts of ``I_{4,2}``.

Families in ``G(2^m, 2)``
    ``C1^m``: tensor products ``I_2 (x) c_1 (x) ... (x) c_{m-1}``.
    ``C2^m``: all coordinate-pair subspaces.

Codes in ``G(7, 3)``
    ``C3`` and ``C4``: orbits of four generators each under the cyclic
    shift of rows, 28 codewords with minimum distance 4/3.
"""

from __future__ import annotations

import itertools
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .manifolds import Kind, ManifoldDescriptor, pair_distances, pair_mid_distances, sample_uniform_batch
from .packing import Code, kissing_radius, min_distance

__all__ = [
    "ALPHA_PLUS",
    "ALPHA_MINUS",
    "Expectation",
    "CatalogEntry",
    "build_C1",
    "build_C2",
    "build_Cm1",
    "build_Cm2",
    "build_C3",
    "build_C4",
    "catalog_names",
    "get_entry",
    "search_packing",
]

ALPHA_PLUS = math.sqrt((3.0 + math.sqrt(3.0)) / 6.0)
ALPHA_MINUS = math.sqrt((3.0 - math.sqrt(3.0)) / 6.0)

MAX_FAMILY_M = 6

# lines of the tetrahedron code in G(2, 1)
_TETRAHEDRON = (
    np.array([ALPHA_PLUS, ALPHA_MINUS], dtype=complex),
    np.array([ALPHA_PLUS, -ALPHA_MINUS], dtype=complex),
    np.array([ALPHA_MINUS, 1j * ALPHA_PLUS], dtype=complex),
    np.array([ALPHA_MINUS, -1j * ALPHA_PLUS], dtype=complex),
)

_G42 = ManifoldDescriptor.grassmann(4, 2)
_G73 = ManifoldDescriptor.grassmann(7, 3)


def build_C1() -> Code:
    """Four codewords ``I_2 (x) c`` in ``G(4, 2)``, minimum distance ``2/sqrt 3``."""
    reps = [np.kron(np.eye(2), c[:, None]) for c in _TETRAHEDRON]
    return Code(_G42, reps, name="C1")


def build_C2() -> Code:
    """Cyclic row shifts of ``I_{4,2}``, minimum distance 1."""
    base = np.eye(4, 2, dtype=complex)
    reps = [np.roll(base, k, axis=0) for k in range(4)]
    return Code(_G42, reps, name="C2")


def _check_m(m: int) -> int:
    if int(m) != m or not 2 <= m <= MAX_FAMILY_M:
        raise ValueError(f"family parameter m must be an integer in [2, {MAX_FAMILY_M}] (got {m})")
    return int(m)


def build_Cm1(m: int) -> Code:
    """``4^(m-1)`` codewords ``I_2 (x) c_1 (x) ... (x) c_{m-1}`` in ``G(2^m, 2)``."""
    m = _check_m(m)
    reps = []
    for combo in itertools.product(_TETRAHEDRON, repeat=m - 1):
        v = np.array([1.0 + 0j])
        for c in combo:
            v = np.kron(v, c)
        reps.append(np.kron(np.eye(2), v[:, None]))
    return Code(ManifoldDescriptor.grassmann(2**m, 2), reps, name=f"C1m{m}")


def build_Cm2(m: int) -> Code:
    """All ``binom(2^m, 2)`` coordinate-pair subspaces of ``C^(2^m)``."""
    m = _check_m(m)
    n = 2**m
    reps = []
    for a, b in itertools.combinations(range(n), 2):
        y = np.zeros((n, 2), dtype=complex)
        y[a, 0] = 1.0
        y[b, 1] = 1.0
        reps.append(y)
    return Code(ManifoldDescriptor.grassmann(n, 2), reps, name=f"C2m{m}")


# sign triples with product +1
_SIGNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))


def _g73_orbit_code(ones: tuple[int, int, int], roots: tuple[int, int, int], name: str) -> Code:
    """Union over sign patterns of the cyclic orbits of one generator shape.

    Column ``k`` of a generator has entry 1 at row ``ones[k]`` and
    ``+-sqrt 2`` at row ``roots[k]`` (0-based), scaled by ``1/sqrt 3``.
    """
    reps = []
    for signs in _SIGNS:
        gen = np.zeros((7, 3), dtype=complex)
        for k in range(3):
            gen[ones[k], k] = 1.0
            gen[roots[k], k] = signs[k] * math.sqrt(2.0)
        gen /= math.sqrt(3.0)
        # shifting down: row i moves to row i+1 (mod 7); shifting up gives the same set
        reps.extend(np.roll(gen, s, axis=0) for s in range(7))
    return Code(_G73, reps, name=name)


def build_C3() -> Code:
    """28 codewords in ``G(7, 3)`` with three distinct mid-distances."""
    return _g73_orbit_code((1, 2, 4), (3, 6, 5), "C3")


def build_C4() -> Code:
    """28 codewords in ``G(7, 3)`` with two distinct mid-distances."""
    return _g73_orbit_code((1, 2, 4), (6, 5, 3), "C4")


# -- catalog entries -------------------------------------------------------------


@dataclass(frozen=True)
class Expectation:
    """Expected value of a report field, with an absolute tolerance."""

    value: float
    tol: float

    def holds(self, actual: float) -> bool:
        return abs(actual - self.value) <= self.tol


@dataclass(frozen=True)
class CatalogEntry:
    """A named code with the values it is known to reproduce.

    ``expected`` keys are :class:`~chordpack.packing.DensityReport` field
    names, plus ``log10_density``; densities refer to the small-ball model.
    """

    name: str
    descriptor: ManifoldDescriptor
    builder: object = field(repr=False)
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)

    def build(self) -> Code:
        return self.builder(**self.params)

    def compare(self, report) -> list[tuple[str, float, Expectation, bool]]:
        """``(key, actual, expectation, ok)`` for each expected value."""
        rows = []
        for key, exp in self.expected.items():
            if key == "log10_density":
                actual = math.log10(report.density) if report.density > 0 else -math.inf
            else:
                actual = float(getattr(report, key))
            rows.append((key, actual, exp, exp.holds(actual)))
        return rows


_RHO_C3 = math.sqrt((9.0 - math.sqrt(2.0) - math.sqrt(3.0) - math.sqrt(6.0)) / 6.0)


def _c1_expected() -> dict:
    return {
        "delta": Expectation(2.0 / math.sqrt(3.0), 1e-12),
        "kissing_radius": Expectation(math.sqrt(2.0) * ALPHA_MINUS, 1e-9),
    }


def _c2_expected() -> dict:
    return {"delta": Expectation(1.0, 1e-12), "kissing_radius": Expectation(1.0 / math.sqrt(2.0), 1e-12)}


_FIXED = {
    "C1": CatalogEntry(
        "C1",
        _G42,
        build_C1,
        expected={**_c1_expected(), "density": Expectation(8.0 / 9.0 * (7.0 - 4.0 * math.sqrt(3.0)), 1e-9)},
    ),
    "C2": CatalogEntry("C2", _G42, build_C2, expected={**_c2_expected(), "density": Expectation(0.125, 1e-12)}),
    "C3": CatalogEntry(
        "C3",
        _G73,
        build_C3,
        expected={
            "delta": Expectation(4.0 / 3.0, 1e-9),
            "kissing_radius": Expectation(_RHO_C3, 1e-9),
            "log10_density": Expectation(-4.2, 0.1),
        },
    ),
    "C4": CatalogEntry(
        "C4",
        _G73,
        build_C4,
        expected={
            "delta": Expectation(4.0 / 3.0, 1e-9),
            "kissing_radius": Expectation(0.805, 0.005),
            "log10_density": Expectation(-3.5, 0.1),
        },
    ),
}

_FAMILY_RE = re.compile(r"^C([12])m(\d+)$")


def catalog_names() -> list[str]:
    """Fixed codes plus the family members ``C1m<m>``/``C2m<m>`` for small ``m``."""
    return list(_FIXED) + [f"C{k}m{m}" for k in (1, 2) for m in range(2, 5)]


def get_entry(name: str) -> CatalogEntry:
    """Look up a catalog entry; families accept any ``m`` in ``[2, 6]``."""
    if name in _FIXED:
        return _FIXED[name]
    match = _FAMILY_RE.match(name)
    if not match:
        raise KeyError(f"unknown catalog code {name!r}; known: {', '.join(catalog_names())}")
    family, m = int(match.group(1)), _check_m(int(match.group(2)))
    desc = ManifoldDescriptor.grassmann(2**m, 2)
    if family == 1:
        return CatalogEntry(name, desc, build_Cm1, {"m": m}, _c1_expected())
    return CatalogEntry(name, desc, build_Cm2, {"m": m}, _c2_expected())


# -- packing search ----------------------------------------------------------------

OBJECTIVES = ("max-min-distance", "max-kissing-radius")


def _retract(desc: ManifoldDescriptor, reps: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(reps, full_matrices=False)
    return u @ vh


def _objective(desc: ManifoldDescriptor, reps: np.ndarray, objective: str, iu) -> float:
    a, b = reps[iu[0]], reps[iu[1]]
    if objective == "max-min-distance":
        return float(np.min(pair_distances(desc, a, b)))
    try:
        return float(np.min(pair_mid_distances(desc, a, b)))
    except linalg.NoUniqueProjectionError:
        return -math.inf


def _gradient(desc: ManifoldDescriptor, reps: np.ndarray, objective: str, iu, temp: float) -> np.ndarray:
    """Ascent direction of a soft-min of pairwise (mid-)distances.

    Uses the Euclidean gradient of the squared chordal distance, which for
    the max-kissing-radius objective serves as a proxy: mid-distances are
    monotone in the pair distance on the embedding sphere.
    """
    a, b = reps[iu[0]], reps[iu[1]]
    if objective == "max-min-distance":
        vals = pair_distances(desc, a, b)
    else:
        vals = pair_mid_distances(desc, a, b)
    w = np.exp(-(vals - vals.min()) / temp)
    w /= w.sum()
    grad = np.zeros_like(reps)
    if desc.kind is Kind.GRASSMANN:
        # d/dA of -||A^H B||^2 is -2 B B^H A
        ga = -2.0 * b @ (np.conj(np.swapaxes(b, -1, -2)) @ a)
        gb = -2.0 * a @ (np.conj(np.swapaxes(a, -1, -2)) @ b)
    else:
        ga = 2.0 * (a - b)
        gb = 2.0 * (b - a)
    np.add.at(grad, iu[0], w[:, None, None] * ga)
    np.add.at(grad, iu[1], w[:, None, None] * gb)
    return grad


def _search_once(desc, N, objective, iterations, seed_seq) -> tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed_seq)
    reps = sample_uniform_batch(desc, rng, N)
    iu = np.triu_indices(N, k=1)
    best = _objective(desc, reps, objective, iu)
    step = 0.1
    temp = 0.02 * desc.max_distance
    for _ in range(iterations):
        grad = _gradient(desc, reps, objective, iu, temp)
        norm = np.linalg.norm(grad)
        if norm == 0.0:
            break
        trial = _retract(desc, reps + step * grad / norm)
        val = _objective(desc, trial, objective, iu)
        if val >= best:
            reps, best = trial, val
        else:
            step *= 0.5
            if step < 1e-9:
                break
    return best, reps


def search_packing(
    desc: ManifoldDescriptor,
    N: int,
    objective: str = "max-min-distance",
    iterations: int = 500,
    seed: int = 0,
    restarts: int = 10,
    threads: int = 1,
) -> Code:
    """Best code found by soft-min repulsion with polar retraction.

    Each restart starts from Haar-random codewords seeded by
    ``SeedSequence([seed, restart])``; steps that lower the objective are
    rejected and halve the step size. Deterministic given ``seed``, with no
    optimality claim.

    Parameters
    ----------
    objective : {"max-min-distance", "max-kissing-radius"}
    """
    if N < 2:
        raise ValueError(f"N must be >= 2 (got {N})")
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES} (got {objective!r})")
    seeds = [np.random.SeedSequence([seed, k]) for k in range(restarts)]
    jobs = [(desc, N, objective, iterations, s) for s in seeds]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _search_once(*job), jobs))
    else:
        results = [_search_once(*job) for job in jobs]
    # first restart wins ties, independent of scheduling
    best_k = max(range(len(results)), key=lambda k: (results[k][0], -k))
    return Code(desc, results[best_k][1], name=f"search-{objective}-N{N}")
