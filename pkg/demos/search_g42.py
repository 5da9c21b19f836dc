"""Numerically search for a 4-point packing on G(4,2) and analyze it."""

from chordpack import catalog
from chordpack.manifolds import ManifoldDescriptor
from chordpack.packing import analyze
from chordpack.volumes import VolumeModel


def main():
    desc = ManifoldDescriptor.grassmann(4, 2)
    code = catalog.search_packing(desc, 4, iterations=300, seed=1, restarts=4)
    report = analyze(code, VolumeModel.small_ball())
    print(report.to_json())


if __name__ == "__main__":
    main()
