"""Minimum-distance bounds for G(4,2) as the number of codewords grows.

Prints the standard Hamming bound, the improved Grassmann bound, the
conjectured bound and the Rankin bounds of the embedding sphere.
"""

import math

from chordpack import packing
from chordpack.manifolds import ManifoldDescriptor
from chordpack.volumes import VolumeModel


def fmt(x):
    return f"{x:8.5f}" if x is not None else "       -"


def main():
    desc = ManifoldDescriptor.grassmann(4, 2)
    model = VolumeModel.small_ball()
    print(f"{'N':>6} {'hamming':>8} {'grass':>8} {'conj':>8} {'simplex':>8} {'orthopl':>8}")
    for k in range(1, 17):
        N = 2**k
        simplex, orthoplex = packing.rankin_bounds(desc.embed_dim, desc.radius, N)
        row = [
            packing.dist_bound_hamming(desc, N, model),
            packing.dist_bound_grass(desc, N, model),
            packing.dist_bound_conjectured(desc, N, model),
            simplex,
            orthoplex,
        ]
        print(f"{N:6d} " + " ".join(fmt(x) for x in row))
    r = packing.dist_bound_grass(desc, 2**16, model) / packing.dist_bound_hamming(desc, 2**16, model)
    print(f"\ndelta^2 ratio improved/standard at N = 2^16: {r * r:.4f}")
    print(f"Rankin simplex at N = 4: {packing.rankin_bounds(15, desc.radius, 4)[0]:.12f} (2/sqrt(3) = {2 / math.sqrt(3):.12f})")


if __name__ == "__main__":
    main()
