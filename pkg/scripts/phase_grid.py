"""Run a phase-transition grid and write its CSV, per-delta heatmaps and curves.

    python3 scripts/phase_grid.py --profile desk --outdir results/desk
    python3 scripts/phase_grid.py --profile paper --outdir results/full --workers 4
"""

import argparse
import time
from pathlib import Path

from qeclipse.harness import PROFILES, GridSpec, extract_phase_curve, run_grid
from qeclipse.heatmap import render_heatmap


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    spec = GridSpec(**PROFILES[args.profile])
    args.outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    rows = run_grid(spec, out_path=args.outdir / "grid.csv", workers=args.workers)
    print(f"{len(rows)} cells in {time.perf_counter() - start:.1f} s")

    lin = extract_phase_curve(rows, spec.delta_values[0], spec.level, field_name="p_lin_hat")
    print("sigma  " + " ".join(f"{s:>6g}" for s, _ in lin.points))
    for delta in spec.delta_values:
        curve = extract_phase_curve(rows, delta, spec.level)
        render_heatmap(rows, delta, curve, args.outdir / f"heatmap.delta-{delta:g}.svg")
        print(f"d={delta:<4g} " + " ".join(f"{'-' if m is None else m:>6}" for _, m in curve.points))
    print("linear " + " ".join(f"{'-' if m is None else m:>6}" for _, m in lin.points))


if __name__ == "__main__":
    main()
