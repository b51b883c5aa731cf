#!/usr/bin/env python3
"""Run every audit suite at desk scale and print the combined verdict.

Equivalent to invoking the CLI once per suite with the default manifolds:
curvature symmetries, the constant-curvature cancellation of the eight-term
identity, the splitting-defect oracle equivalence, the Ricci *-tensor
exchange identity and the component-formula audit with the swap probe.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sphereacs.cli import main as cli_main


def main() -> int:
    out = sys.argv[1] if len(sys.argv) > 1 else "runs"
    worst = 0
    for suite in ("curvature", "gray", "splitting", "ricci-star", "components"):
        print(f"\n=== audit {suite} ===")
        code = cli_main(["audit", suite, "--out", out])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
