"""Compare the four ball-volume models on a few manifolds.

The Monte Carlo column is the reference; the small-ball model is accurate
only for small radii, the cap and Gaussian models improve as the embedding
dimension grows.
"""

import warnings

import numpy as np

from chordpack import volumes
from chordpack.manifolds import ManifoldDescriptor
from chordpack.volumes import VolumeModel

MANIFOLDS = [
    ManifoldDescriptor.unitary(2),
    ManifoldDescriptor.unitary(8),
    ManifoldDescriptor.stiefel(4, 2),
    ManifoldDescriptor.grassmann(4, 2),
]


def main():
    warnings.simplefilter("ignore", volumes.ValidityWarning)
    models = [VolumeModel.small_ball(), VolumeModel.exact_cap(), VolumeModel.gaussian()]
    for desc in MANIFOLDS:
        print(f"\n{desc}  dim={desc.dim}  D={desc.embed_dim}  R^2={desc.radius_sq:g}")
        print(f"{'r':>6} {'small-ball':>11} {'cap':>11} {'gaussian':>11} {'monte-carlo':>12}")
        for r in np.linspace(0.25, 2 * desc.radius, 8):
            mc, _ = volumes.ball_volume_mc(desc, r, 50_000, seed=0)
            vals = [volumes.ball_volume(desc, r, m) for m in models]
            print(f"{r:6.3f} " + " ".join(f"{v:11.4e}" for v in vals) + f" {mc:12.4e}")


if __name__ == "__main__":
    main()
