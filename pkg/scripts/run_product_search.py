#!/usr/bin/env python3
"""Run the S2 x S4 energy-floor experiment and record the baseline file.

The search minimises the Nijenhuis energy of gauged structure fields over a
grid of gauge degrees; the recorded per-degree cell minima become the
regression baseline the acceptance suite checks against (subsequent runs
must stay within a factor of the committed floors).  The result is heuristic
evidence only; nothing here proves non-existence.

Usage:
    python scripts/run_product_search.py                  # acceptance scale
    python scripts/run_product_search.py --restarts 4 --budget 200 --points 40
    python scripts/run_product_search.py --baseline baselines/s2xs4_floor.json
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sphereacs.search import DISCLAIMER, ExperimentConfig, energy_floor_experiment
from sphereacs.manifold import spheres


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=1.0, help="2-sphere curvature")
    parser.add_argument("--beta", type=float, default=1.0, help="4-sphere curvature")
    parser.add_argument("--degrees", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--restarts", type=int, default=20)
    parser.add_argument("--budget", type=int, default=2000)
    parser.add_argument("--points", type=int, default=100)
    parser.add_argument("--frame-pairs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--generators", type=int, default=4)
    parser.add_argument("--baseline", default=None,
                        help="write the floor baseline JSON to this path")
    parser.add_argument("--csv", default=None, help="write flat restart rows to this path")
    args = parser.parse_args()

    cfg = ExperimentConfig(
        manifold=spheres((2, args.alpha), (4, args.beta)),
        degrees=tuple(args.degrees),
        restarts=args.restarts,
        budget=args.budget,
        points=args.points,
        frame_pairs=args.frame_pairs,
        seed=args.seed,
        generators=args.generators,
    )
    t0 = time.perf_counter()
    report = energy_floor_experiment(cfg)
    elapsed = time.perf_counter() - t0

    print(f"manifold      : {cfg.manifold.describe()}")
    print(f"grid          : degrees {cfg.degrees}, {cfg.restarts} restarts, "
          f"budget {cfg.budget}, {cfg.points} points")
    for deg in sorted(report.results):
        res = report.results[deg]
        print(f"degree {deg}: cell minimum {res.best_energy:.8f}  "
              f"(evals per restart: min {min(res.evals_per_restart)}, "
              f"max {max(res.evals_per_restart)})")
    print(f"floor         : {report.floor:.8f}")
    print(f"wall clock    : {elapsed:.1f} s")
    print(f"note          : {DISCLAIMER}")

    payload = {
        "config": {
            "manifold": cfg.manifold.describe(),
            "factors": [[f.dim, f.curvature] for f in cfg.manifold.factors],
            "degrees": list(cfg.degrees),
            "restarts": cfg.restarts,
            "budget": cfg.budget,
            "points": cfg.points,
            "frame_pairs": cfg.frame_pairs,
            "seed": cfg.seed,
            "generators": cfg.generators,
            "fd_step": cfg.fd_step,
            "init_scale": cfg.init_scale,
            "chart_margin": cfg.chart_margin,
        },
        "cell_minima": {str(d): report.results[d].best_energy for d in sorted(report.results)},
        "restart_energies": {
            str(d): list(report.results[d].restart_energies) for d in sorted(report.results)
        },
        "floor": report.floor,
        "disclaimer": DISCLAIMER,
    }
    if args.baseline:
        Path(args.baseline).parent.mkdir(parents=True, exist_ok=True)
        Path(args.baseline).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"baseline written: {args.baseline}")
    if args.csv:
        rows = report.rows()
        lines = ["degree,restart,energy,best_so_far,evals"]
        for r in rows:
            lines.append(
                f"{r['degree']},{r['restart']},{format(r['energy'], '.17g')},"
                f"{format(r['best_so_far'], '.17g')},{r['evals']}"
            )
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        Path(args.csv).write_text("\n".join(lines) + "\n")
        print(f"csv written: {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
