"""Command-line surface: configuration, audit suites, field runs, searches.

Commands
--------
    audit     {curvature | gray | splitting | components | ricci-star}
    nijenhuis {s2 | s6-octonion | product | gauged}
    search    {s2xs4 | s6}

Every run prints a human-readable table on stdout and writes a
machine-readable report (csv or records, 17 significant digits) plus a
manifest to the output directory.  Exit codes: 0 = completed and every
asserted check passed, 1 = an asserted check failed, 2 = usage or
configuration error.  Recorded-only mismatches (the component audit on
factor-mixing structures) never affect the exit code.

Configuration file: flat ``key = value`` lines, ``#`` comments, and one
``factor = dim=<int> curvature=<float>`` line per sphere factor.  Unknown
keys are errors.  Example::

    # S2 x S4 obstruction search
    factor = dim=2 curvature=1.0
    factor = dim=4 curvature=1.0
    seed = 7
    points = 100
    restarts = 20
    budget = 2000
    degrees = 0,1,2
    format = csv

The environment variable SPHEREACS_CONFIG_DIR may point to a directory
searched for bare config file names.

File formats referenced by config keys:

* ``acs_file`` (components suite): plain-text row-major square matrix with a
  header line holding total_dim, then one whitespace-separated row per line;
  numbers at 17 significant digits round-trip doubles exactly.
* ``points_file`` (nijenhuis commands): one sample point per line as
  whitespace-separated ambient coordinates (sum of dim+1 per factor); each
  factor block must lie on its unit sphere to 1e-6.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .acs import random_block_diagonal_acs, random_orthogonal_acs, swap_acs
from .config import TOL
from .errors import ConfigError, ContractViolation, DegenerateInput, InvalidManifold
from .fields import (
    acs_field_validity_check,
    default_acs_field,
    nijenhuis_batch,
    nijenhuis_norms,
    product_acs_field,
    projected_constant_field,
    s2_rotation_blocks,
    s6_octonion_blocks,
)
from .identities import (
    gray_combination,
    ricci_star_bilinear,
    ricci_star_component_audit,
    splitting_defect,
)
from .manifold import CurvatureOracle, ProductManifold, SphereFactor
from .report import AuditReport
from .sampling import chart_safe_points
from .search import (
    DISCLAIMER,
    ExperimentConfig,
    GaugeParametrization,
    energy_floor_experiment,
    splitting_pressure_probe,
)

FORMATS = ("table", "csv", "records")


@dataclass(frozen=True)
class RunConfig:
    factors: tuple[tuple[int, float], ...] = ()
    seed: int = 7
    samples: int = 500
    points: int = 60
    frame_pairs: int = 2
    restarts: int = 3
    budget: int = 300
    generators: int = 4
    degrees: tuple[int, ...] = (0,)
    fd_step: float = TOL.fd_step
    init_scale: float = 0.5
    chart_margin: float = 0.05
    swap_probe: bool = False
    restriction_check: bool = False
    format: str = "table"
    out: str = "runs"
    # optional file inputs: a serialised structure matrix for the components
    # suite, and a plain-text sample-point list for the field commands
    acs_file: str = ""
    points_file: str = ""
    # set when the config came from an explicit file, which then must carry
    # its own manifold spec (fail closed) instead of the per-suite default
    explicit: bool = False

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        for name in ("samples", "points", "frame_pairs", "restarts", "budget"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("fd_step", "init_scale", "chart_margin"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.generators < 0:
            raise ConfigError("generators must be >= 0")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")

    def manifold(self, default_factors: tuple[tuple[int, float], ...]) -> ProductManifold:
        if self.explicit and not self.factors:
            raise ConfigError("config file does not specify any 'factor = dim=.. curvature=..' line")
        factors = self.factors or default_factors
        if not factors:
            raise ConfigError("no sphere factors configured")
        try:
            return ProductManifold(tuple(SphereFactor(d, k) for d, k in factors))
        except InvalidManifold as exc:
            raise ConfigError(str(exc)) from exc


_INT_KEYS = ("seed", "samples", "points", "frame_pairs", "restarts", "budget", "generators")
_FLOAT_KEYS = ("fd_step", "init_scale", "chart_margin")
_BOOL_KEYS = ("swap_probe", "restriction_check")
_STR_KEYS = ("format", "out", "acs_file", "points_file")


def _parse_factor(value: str) -> tuple[int, float]:
    dim = curvature = None
    for token in value.split():
        key, _, raw = token.partition("=")
        if key == "dim":
            dim = int(raw)
        elif key == "curvature":
            curvature = float(raw)
        else:
            raise ConfigError(f"unknown factor attribute {key!r}")
    if dim is None or curvature is None:
        raise ConfigError(f"factor needs dim=<int> curvature=<float>, got {value!r}")
    return dim, curvature


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def parse_config_text(text: str) -> RunConfig:
    """Parse the flat key-value format; unknown keys are errors."""
    factors: list[tuple[int, float]] = []
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key not in _INT_KEYS + _FLOAT_KEYS + _BOOL_KEYS + _STR_KEYS + ("factor", "degrees"):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key == "factor":
                factors.append(_parse_factor(value))
            elif key in _INT_KEYS:
                fields[key] = int(value)
            elif key in _FLOAT_KEYS:
                fields[key] = float(value)
            elif key in _BOOL_KEYS:
                fields[key] = _parse_bool(value)
            elif key in _STR_KEYS:
                fields[key] = value
            else:
                fields["degrees"] = tuple(int(tok) for tok in value.replace(",", " ").split())
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    return RunConfig(factors=tuple(factors), **fields)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    if not p.exists() and os.sep not in path:
        config_dir = os.environ.get("SPHEREACS_CONFIG_DIR")
        if config_dir:
            candidate = Path(config_dir) / path
            if candidate.exists():
                p = candidate
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    return replace(parse_config_text(p.read_text(encoding="utf-8")), explicit=True)


# ---------------------------------------------------------------------------
# Report rows
# ---------------------------------------------------------------------------

def check_row(check) -> dict:
    return {
        "kind": "check",
        "name": check.name,
        "computed": check.computed,
        "expected": check.expected,
        "tolerance": check.tolerance,
        "verdict": check.verdict,
        "asserted": check.asserted,
        "claim": check.claim,
    }


def value_row(name: str, value: float, claim: str) -> dict:
    return {
        "kind": "value",
        "name": name,
        "computed": float(value),
        "expected": None,
        "tolerance": None,
        "verdict": "recorded",
        "asserted": False,
        "claim": claim,
    }


@dataclass
class CommandResult:
    title: str
    rows: list[dict] = field(default_factory=list)

    def add_report(self, report: AuditReport) -> None:
        self.rows.extend(check_row(c) for c in report.checks)

    def counts(self) -> dict:
        passes = mismatches = fails = recorded = 0
        for row in self.rows:
            if row["kind"] != "check":
                recorded += 1
            elif row["verdict"] == "pass":
                passes += 1
            elif row["asserted"]:
                fails += 1
            else:
                mismatches += 1
        return {"pass": passes, "mismatch": mismatches, "fail": fails, "recorded": recorded}

    @property
    def failed(self) -> bool:
        return any(r["kind"] == "check" and r["asserted"] and r["verdict"] != "pass" for r in self.rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


CSV_COLUMNS = ("kind", "name", "computed", "expected", "tolerance", "verdict", "asserted", "claim")


def rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        cells = []
        for col in CSV_COLUMNS:
            cell = _fmt(row[col])
            if "," in cell or '"' in cell:
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_records(rows: list[dict]) -> str:
    lines = []
    for row in rows:
        parts = []
        for col in CSV_COLUMNS:
            v = row[col]
            if v is None:
                encoded = "null"
            elif isinstance(v, bool):
                encoded = "true" if v else "false"
            elif isinstance(v, float):
                encoded = format(v, ".17g")
            else:
                encoded = json.dumps(v)
            parts.append(f"{json.dumps(col)}: {encoded}")
        lines.append("{" + ", ".join(parts) + "}")
    return "\n".join(lines) + "\n"


def rows_to_table(title: str, rows: list[dict], max_rows: int = 40) -> str:
    header = f"{'name':<46} {'computed':>24} {'expected':>24} verdict"
    lines = [title, "-" * len(header), header, "-" * len(header)]
    for row in rows[:max_rows]:
        expected = _fmt(row["expected"]) if row["expected"] is not None else "-"
        lines.append(
            f"{row['name']:<46} {_fmt(row['computed']):>24} {expected:>24} {row['verdict']}"
        )
    if len(rows) > max_rows:
        lines.append(f"... ({len(rows) - max_rows} more rows)")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Audit suites
# ---------------------------------------------------------------------------

DEFAULT_FACTORS = {
    ("audit", "curvature"): ((2, 1.0), (4, 1.0), (6, 2.0)),
    ("audit", "gray"): ((6, 1.0),),
    ("audit", "splitting"): ((2, 1.0), (4, 1.0)),
    ("audit", "components"): ((6, 1.0), (6, 2.0)),
    ("audit", "ricci-star"): ((6, 1.0), (6, 2.0)),
    ("nijenhuis", "s2"): ((2, 1.0),),
    ("nijenhuis", "s6-octonion"): ((6, 1.0),),
    ("nijenhuis", "product"): ((2, 1.0), (6, 1.0)),
    ("nijenhuis", "gauged"): ((2, 1.0), (4, 1.0)),
    ("search", "s2xs4"): ((2, 1.0), (4, 1.0)),
    ("search", "s6"): ((6, 1.0),),
}


def run_audit(suite: str, cfg: RunConfig) -> CommandResult:
    man = cfg.manifold(DEFAULT_FACTORS[("audit", suite)])
    oracle = CurvatureOracle(man)
    result = CommandResult(f"audit {suite} on {man.describe()}")

    if suite == "curvature":
        result.add_report(oracle.symmetry_audit(cfg.samples, cfg.seed))

    elif suite == "gray":
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        for s in range(cfg.samples):
            J = random_block_diagonal_acs(man, [cfg.seed, s])
            w, x, y, z = rng.standard_normal((4, man.total_dim))
            worst = max(worst, abs(gray_combination(oracle, J, w, x, y, z)))
        report = AuditReport(result.title)
        report.add(
            "gray-cancellation",
            worst,
            0.0,
            1e-10,
            "eight-term combination vanishes for per-factor structures on "
            "constant-curvature factors",
        )
        result.add_report(report)

    elif suite == "splitting":
        if man.factors[0].dim != 2:
            raise ConfigError("the splitting suite needs a 2-sphere first factor")
        x = np.zeros(man.total_dim)
        y = np.zeros(man.total_dim)
        x[0], y[1] = 1.0, 1.0
        worst_eq = worst_sign = worst_split = 0.0
        for s in range(cfg.samples):
            J = random_orthogonal_acs(man, [cfg.seed, s])
            d = splitting_defect(oracle, J, x, y)
            worst_eq = max(worst_eq, abs(d.direct - d.closed_form))
            worst_sign = max(worst_sign, d.direct)
            Jsplit = random_block_diagonal_acs(man, [cfg.seed, s])
            worst_split = max(worst_split, abs(splitting_defect(oracle, Jsplit, x, y).direct))
        probe = splitting_pressure_probe(man, cfg.samples, cfg.seed)
        report = AuditReport(result.title)
        report.add(
            "oracle-equivalence", worst_eq, 0.0, 1e-10,
            "eight-term defect == -alpha (1 - c^2)^2 + complement term",
        )
        report.add("nonpositivity", max(worst_sign, 0.0), 0.0, 1e-12, "defect <= 0 always")
        report.add(
            "split-zero", worst_split, 0.0, 1e-10,
            "block-diagonal structures (c^2 = 1) have zero defect",
        )
        alpha = man.factors[0].curvature
        if probe.subsample_count:
            report.add(
                "mixed-floor",
                min(probe.min_core_defect_mixed - alpha * probe.threshold**2, 0.0),
                0.0,
                1e-12,
                "defect minus complement term stays below -alpha t^2 when 1 - c^2 > t",
            )
        result.add_report(report)
        result.rows.append(value_row(
            "mixed-subsample-count", probe.subsample_count,
            f"samples with 1 - c^2 > {probe.threshold}",
        ))
        result.rows.append(value_row(
            "mixed-max-abs-defect", probe.max_abs_defect_mixed,
            "max |defect| over the mixed subsample",
        ))

    elif suite == "components":
        if any(f.dim != 6 for f in man.factors):
            raise ConfigError("the components suite needs every factor to be a 6-sphere")
        if cfg.acs_file:
            # audit one explicitly serialised structure in full detail
            from .acs import acs_from_text, validate_acs

            try:
                text = Path(cfg.acs_file).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read acs_file: {exc}") from exc
            try:
                J = acs_from_text(man, text)
            except ContractViolation as exc:
                raise ConfigError(str(exc)) from exc
            result.add_report(validate_acs(J))
            result.add_report(ricci_star_component_audit(oracle, J))
        n_samples = min(cfg.samples, 10)
        for s in range(n_samples):
            J = random_block_diagonal_acs(man, [cfg.seed, s])
            report = ricci_star_component_audit(oracle, J)
            for check in report.checks:
                if check.name.endswith("-max"):
                    result.rows.append(check_row(replace_name(check, f"blockdiag[{s}].{check.name}")))
        if cfg.swap_probe:
            if man.n_factors != 2 or man.factors[0].dim != man.factors[1].dim:
                raise ConfigError("the swap probe needs exactly two equal-dimension factors")
            swap_report = ricci_star_component_audit(oracle, swap_acs(man))
            for check in swap_report.checks:
                if check.name.endswith("-max") or not check.passed:
                    result.rows.append(check_row(replace_name(check, f"swap.{check.name}")))

    elif suite == "ricci-star":
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        for s in range(cfg.samples):
            J = random_orthogonal_acs(man, [cfg.seed, s])
            xv, yv = rng.standard_normal((2, man.total_dim))
            lhs = ricci_star_bilinear(oracle, J, xv, yv)
            rhs = ricci_star_bilinear(oracle, J, J.matrix @ yv, J.matrix @ xv)
            worst = max(worst, abs(lhs - rhs))
        report = AuditReport(result.title)
        report.add(
            "exchange-identity", worst, 0.0, TOL.contraction,
            "rho*(X, Y) == rho*(JY, JX) on random samples",
        )
        result.add_report(report)

    else:
        raise ConfigError(f"unknown audit suite {suite!r}")
    return result


def replace_name(check, name):
    from dataclasses import replace as dc_replace

    return dc_replace(check, name=name)


# ---------------------------------------------------------------------------
# Nijenhuis field runs
# ---------------------------------------------------------------------------

def _field_for(target: str, man: ProductManifold, cfg: RunConfig):
    if target == "s2":
        if man.n_factors != 1 or man.factors[0].dim != 2:
            raise ConfigError("the s2 field needs a single 2-sphere factor")
        return default_acs_field(man)
    if target == "s6-octonion":
        if man.n_factors != 1 or man.factors[0].dim != 6:
            raise ConfigError("the s6-octonion field needs a single 6-sphere factor")
        return default_acs_field(man)
    if target == "product":
        dims = tuple(f.dim for f in man.factors)
        if dims != (2, 6):
            raise ConfigError("the product field needs factors (2-sphere, 6-sphere)")
        return product_acs_field(man, [s2_rotation_blocks, s6_octonion_blocks], "s2xs6")
    if target == "gauged":
        parametrization = GaugeParametrization(man, cfg.degrees[0], cfg.generators, cfg.seed)
        rng = np.random.default_rng([cfg.seed, 3])
        theta = 0.3 * rng.standard_normal(parametrization.n_params)
        return parametrization.field(theta, default_acs_field(man))
    raise ConfigError(f"unknown field {target!r}")


def run_nijenhuis(target: str, cfg: RunConfig) -> CommandResult:
    man = cfg.manifold(DEFAULT_FACTORS[("nijenhuis", target)])
    jf = _field_for(target, man, cfg)
    result = CommandResult(f"nijenhuis {target} on {man.describe()}")
    if cfg.points_file:
        from .sampling import load_points

        pts = load_points(cfg.points_file, man)
    else:
        pts = chart_safe_points(man, cfg.points, cfg.seed, cfg.chart_margin)
    norms = nijenhuis_norms(jf, pts, cfg.frame_pairs, cfg.seed, cfg.fd_step)
    energy = float(np.mean(norms**2))
    validity = acs_field_validity_check(jf, pts[: min(len(pts), 25)])
    result.add_report(validity)
    for k, norm in enumerate(norms):
        result.rows.append(value_row(
            f"point[{k}].rms-norm", float(norm),
            "root mean square |N| over the seeded frame pairs at this point",
        ))
    result.rows.append(value_row(
        "energy", energy, "mean |N|^2 over all sample points and frame pairs"
    ))
    if target == "product" and cfg.restriction_check:
        result.rows.extend(_restriction_rows(man, jf, pts[: min(cfg.points, 10)], cfg))
    return result


def _restriction_rows(man: ProductManifold, jf, pts, cfg: RunConfig) -> list[dict]:
    """Compare N of the product field on second-factor-tangent fields against
    the standalone 6-sphere evaluation at the same points."""
    report = AuditReport("restriction")
    man6 = ProductManifold((man.factors[1],))
    j6 = default_acs_field(man6)
    sl6 = man.ambient_slices[1]
    amb_x = np.zeros(man.ambient_dim)
    amb_y = np.zeros(man.ambient_dim)
    amb_x[3], amb_y[5] = 1.0, 1.0
    X = projected_constant_field(man, amb_x, "X6")
    Y = projected_constant_field(man, amb_y, "Y6")
    X6 = projected_constant_field(man6, amb_x[sl6], "x6")
    Y6 = projected_constant_field(man6, amb_y[sl6], "y6")
    full = nijenhuis_batch(jf, X, Y, pts, cfg.fd_step)
    alone = nijenhuis_batch(j6, X6, Y6, pts[:, sl6], cfg.fd_step)
    for k in range(pts.shape[0]):
        diff = float(np.linalg.norm(full[k, sl6] - alone[k]))
        leak = float(np.max(np.abs(full[k, : sl6.start])))
        report.add(
            f"restriction[{k}].match", diff, 0.0, TOL.fd_linear,
            "product-field N on second-factor fields == standalone evaluation",
        )
        report.add(
            f"restriction[{k}].first-factor-leak", leak, 0.0, TOL.fd_linear,
            "no first-factor component appears",
        )
    return [check_row(c) for c in report.checks]


# ---------------------------------------------------------------------------
# Searches
# ---------------------------------------------------------------------------

def run_search(target: str, cfg: RunConfig) -> CommandResult:
    man = cfg.manifold(DEFAULT_FACTORS[("search", target)])
    if target == "s2xs4":
        dims = tuple(f.dim for f in man.factors)
        if dims != (2, 4):
            raise ConfigError("the s2xs4 experiment needs factors (2-sphere, 4-sphere)")
    elif target == "s6":
        if man.n_factors != 1 or man.factors[0].dim != 6:
            raise ConfigError("the s6 experiment needs a single 6-sphere factor")
    else:
        raise ConfigError(f"unknown experiment {target!r}")
    exp_cfg = ExperimentConfig(
        manifold=man,
        degrees=cfg.degrees,
        restarts=cfg.restarts,
        budget=cfg.budget,
        points=cfg.points,
        frame_pairs=cfg.frame_pairs,
        seed=cfg.seed,
        generators=cfg.generators,
        fd_step=cfg.fd_step,
        init_scale=cfg.init_scale,
        chart_margin=cfg.chart_margin,
    )
    report = energy_floor_experiment(exp_cfg)
    result = CommandResult(f"search {target} on {man.describe()}")
    for row in report.rows():
        result.rows.append(value_row(
            f"degree[{row['degree']}].restart[{row['restart']}].energy",
            row["energy"],
            "restart best energy",
        ))
        result.rows.append(value_row(
            f"degree[{row['degree']}].restart[{row['restart']}].best-so-far",
            row["best_so_far"],
            "minimum energy over the restart prefix",
        ))
    for deg, cell in sorted(report.cell_minima().items()):
        result.rows.append(value_row(
            f"degree[{deg}].cell-minimum", cell, "best energy of the degree cell"
        ))
    result.rows.append(value_row("floor", report.floor, DISCLAIMER))
    return result


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="path to a run configuration file")
    shared.add_argument("--seed", type=int, help="override the config seed")
    shared.add_argument("--format", choices=FORMATS, help="machine report format")
    shared.add_argument("--out", help="output directory for report files")
    parser = argparse.ArgumentParser(
        prog="sphereacs",
        description="Numerical audits and obstruction searches for orthogonal "
        "almost complex structures on products of round spheres.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_audit = sub.add_parser("audit", parents=[shared], help="run a formula audit suite")
    p_audit.add_argument(
        "suite", choices=("curvature", "gray", "splitting", "components", "ricci-star")
    )
    p_nij = sub.add_parser(
        "nijenhuis", parents=[shared], help="evaluate a structure field's Nijenhuis tensor"
    )
    p_nij.add_argument("field", choices=("s2", "s6-octonion", "product", "gauged"))
    p_search = sub.add_parser(
        "search", parents=[shared], help="run a seeded energy-minimisation experiment"
    )
    p_search.add_argument("experiment", choices=("s2xs4", "s6"))
    return parser


def _emit(result: CommandResult, cfg: RunConfig, command: str, target: str, elapsed: float) -> None:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{command}_{target.replace('-', '_')}"
    if cfg.format == "records":
        (out_dir / f"{stem}.records").write_text(rows_to_records(result.rows), encoding="utf-8")
    else:
        (out_dir / f"{stem}.csv").write_text(rows_to_csv(result.rows), encoding="utf-8")
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "target": target,
        "config": {
            "factors": [list(f) for f in cfg.factors],
            "seed": cfg.seed,
            "samples": cfg.samples,
            "points": cfg.points,
            "frame_pairs": cfg.frame_pairs,
            "restarts": cfg.restarts,
            "budget": cfg.budget,
            "generators": cfg.generators,
            "degrees": list(cfg.degrees),
            "fd_step": cfg.fd_step,
            "init_scale": cfg.init_scale,
            "chart_margin": cfg.chart_margin,
            "swap_probe": cfg.swap_probe,
            "restriction_check": cfg.restriction_check,
            "acs_file": cfg.acs_file,
            "points_file": cfg.points_file,
            "format": cfg.format,
        },
        "counts": result.counts(),
        "wall_clock_s": round(elapsed, 6),
    }
    (out_dir / f"{stem}_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.format is not None:
            cfg = replace(cfg, format=args.format)
        if args.out is not None:
            cfg = replace(cfg, out=args.out)
        start = time.perf_counter()
        if args.command == "audit":
            target = args.suite
            result = run_audit(target, cfg)
        elif args.command == "nijenhuis":
            target = args.field
            result = run_nijenhuis(target, cfg)
        else:
            target = args.experiment
            result = run_search(target, cfg)
        elapsed = time.perf_counter() - start
    except (ConfigError, InvalidManifold, ContractViolation, DegenerateInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, cfg, args.command, target, elapsed)
    print(rows_to_table(result.title, result.rows))
    counts = result.counts()
    print(
        f"{counts['pass']} pass / {counts['mismatch']} recorded mismatch / "
        f"{counts['fail']} fail / {counts['recorded']} value rows"
    )
    return 1 if result.failed else 0
