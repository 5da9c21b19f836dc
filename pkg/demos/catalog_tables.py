"""Analyze every catalog code and print distance, kissing radius and density.

Run with ``python3 demos/catalog_tables.py``.
"""

import math

from chordpack import catalog
from chordpack.packing import analyze
from chordpack.volumes import VolumeModel


def main():
    model = VolumeModel.small_ball()
    print(f"{'code':6} {'manifold':8} {'N':>4} {'delta':>9} {'kissing':>9} {'log10 density':>14}  check")
    for name in catalog.catalog_names():
        entry = catalog.get_entry(name)
        report = analyze(entry.build(), model)
        ok = all(row[-1] for row in entry.compare(report))
        print(
            f"{name:6} {report.manifold:8} {report.N:4d} {report.delta:9.6f} "
            f"{report.kissing_radius:9.6f} {math.log10(report.density):14.4f}  {'ok' if ok else 'MISMATCH'}"
        )


if __name__ == "__main__":
    main()
