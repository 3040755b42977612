"""Configuration-driven experiment runner.

Exit status: 0 when every asserted check passes, 1 when a check fails,
2 for configuration errors and 3 for output errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dual import conductor_level, dual_table, enumerate_dual
from .families import SEEDED, FunctionSpec, generate_function
from .regularity import (
    DegenerateWindow,
    abelian_witnesses,
    condition_a_scan,
    dini_lipschitz_check,
    heisenberg_witnesses,
    lipschitz_fit,
    platonov_check,
    titchmarsh_first_check,
    titchmarsh_second_check,
)
from .tower import TowerError, TowerSpec
from .transform import dual_lq_norm, forward, inverse, lp_norm, plancherel_norm2
from .vladimirov import MODES, vt_apply_direct, vt_apply_spectral, vt_symbol

SCHEMA = "vilenkin-report/1"
EXPERIMENTS = ("dual", "transform", "vt", "modulus", "titchmarsh1", "titchmarsh2", "dini", "condition-a")
NEEDS_FUNCTION = ("transform", "vt", "modulus", "titchmarsh1", "titchmarsh2", "dini")
TOL_PLANCHEREL = 1e-10
TOL_VT = 1e-9
TOL_HY = 1e-10

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExportError(OSError):
    """Failure writing report files."""


# -- configuration ----------------------------------------------------------------


@dataclass
class ExperimentConfig:
    tower: TowerSpec
    experiment: str
    function: FunctionSpec | None = None
    params: dict = field(default_factory=dict)
    out_dir: str | None = None
    fmt: str = "json"
    plots: bool = True

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        if "tower" not in raw:
            raise ConfigError("configuration needs a 'tower' entry")
        try:
            tower = TowerSpec.from_config(raw["tower"])
        except (TowerError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad tower: {exc}") from exc
        fn = raw.get("function")
        try:
            function = FunctionSpec.from_config(fn) if fn else None
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        out = raw.get("output", {})
        cfg = cls(
            tower=tower,
            experiment=raw.get("experiment", ""),
            function=function,
            params=dict(raw.get("params", {})),
            out_dir=out.get("dir"),
            fmt=out.get("format", "json"),
            plots=bool(out.get("plots", True)),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {
            "tower": self.tower.to_config(),
            "experiment": self.experiment,
            "params": dict(self.params),
            "output": {"format": self.fmt, "plots": self.plots},
        }
        if self.out_dir is not None:
            out["output"]["dir"] = self.out_dir
        if self.function is not None:
            out["function"] = self.function.to_config()
        return out

    def param(self, name: str, default=None, kind=float):
        value = self.params.get(name, default)
        if value is None:
            raise ConfigError(f"experiment {self.experiment!r} needs parameter {name!r}")
        try:
            return kind(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"parameter {name!r} = {value!r} is not a valid {kind.__name__}") from exc

    def validate(self) -> None:
        """Check every theorem hypothesis before any computation runs."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.fmt!r}")
        t, exp = self.tower, self.experiment
        if exp in NEEDS_FUNCTION and self.function is None:
            raise ConfigError(f"experiment {exp!r} needs a function spec")
        if self.function is not None:
            fam = self.function.family
            if fam in SEEDED and self.function.seed is None:
                raise ConfigError(f"function family {fam!r} needs an explicit seed")
            if fam in ("random_fourier", "dini") and "alpha" not in self.function.params:
                if "alpha" not in self.params:
                    raise ConfigError(f"function family {fam!r} needs alpha")
        if exp == "transform":
            for p in self.params.get("p_values", [1.2, 1.5, 2.0]):
                if not 1 < float(p) <= 2:
                    raise ConfigError(f"Hausdorff-Young exponents must lie in (1, 2], got {p}")
        elif exp == "vt":
            if not self.param("a", 1.0) > 0:
                raise ConfigError("VT exponent a must be positive")
            mode = self.params.get("mode", "group")
            if mode not in MODES:
                raise ConfigError(f"mode must be one of {MODES}")
            if mode == "lie" and t.lie_dim is None:
                raise ConfigError("lie mode needs a p-adic or Heisenberg tower")
        elif exp == "modulus":
            p = self.param("p", 2.0)
            if not p >= 1:
                raise ConfigError("modulus exponent p must be >= 1")
        elif exp == "titchmarsh2":
            alpha = self.param("alpha")
            if not 0 < alpha <= 1:
                raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
        elif exp == "titchmarsh1":
            p, alpha, gamma = self.param("p", 2.0), self.param("alpha"), self.param("gamma")
            if not 1 < p <= 2:
                raise ConfigError(f"p must lie in (1, 2], got {p}")
            if not 0 < alpha <= 1:
                raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
            q = p / (p - 1)
            if not alpha < gamma < alpha + 1 / q:
                raise ConfigError(f"gamma must lie in ({alpha}, {alpha + 1 / q}), got {gamma}")
            if not self.param("beta_step", 0.05) > 0:
                raise ConfigError("beta_step must be positive")
        elif exp == "dini":
            if not self.param("alpha") >= 0:
                raise ConfigError("alpha must be >= 0")
            self.param("nu")
            if t.depth < 5:
                raise ConfigError("the two-parameter fit needs depth >= 5 (four levels n >= 1)")
        elif exp == "condition-a":
            w = self.params.get("witnesses", "pair")
            if w not in ("pair", "separate"):
                raise ConfigError("witnesses must be 'pair' or 'separate'")
            if w == "separate" and t.family != "heisenberg":
                raise ConfigError("separate witnesses apply to Heisenberg towers only")

    def build_function(self):
        spec = self.function
        params = dict(spec.params)
        if spec.family in ("random_fourier", "dini"):
            params.setdefault("alpha", self.params.get("alpha"))
            if spec.family == "dini":
                params.setdefault("nu", self.params.get("nu", 0.0))
        try:
            return generate_function(self.tower, FunctionSpec(spec.family, params, spec.seed))
        except (TowerError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad function spec: {exc}") from exc


# -- report -------------------------------------------------------------------------


def _clean(value):
    """JSON-safe, deterministic form: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return value


@dataclass
class Report:
    experiment: str
    config: dict
    tables: dict = field(default_factory=dict)  # name -> {"columns": [...], "rows": [[...]]}
    fits: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)  # name -> {"xlabel", "ylabel", "x", "series"}
    seed: int | None = None
    version: str = __version__
    schema: str = SCHEMA
    run: dict = field(default_factory=dict)  # timestamp and wall clock, excluded from the digest

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def add_table(self, name: str, columns: list[str], rows) -> None:
        self.tables[name] = {"columns": list(columns), "rows": [[r[c] for c in columns] for r in rows]}

    def content(self) -> dict:
        return _clean(
            {
                "schema": self.schema,
                "version": self.version,
                "experiment": self.experiment,
                "config": self.config,
                "seed": self.seed,
                "tables": self.tables,
                "fits": self.fits,
                "checks": self.checks,
                "values": self.values,
                "plots": self.plots,
                "passed": self.passed,
            }
        )

    def digest(self) -> str:
        text = json.dumps(self.content(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def to_json(self) -> str:
        doc = self.content()
        doc["digest"] = self.digest()
        doc["run"] = _clean(self.run)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
        return cls(
            experiment=doc["experiment"],
            config=doc["config"],
            tables=doc["tables"],
            fits=doc["fits"],
            checks=doc["checks"],
            values=doc["values"],
            plots=doc["plots"],
            seed=doc["seed"],
            version=doc["version"],
            schema=doc["schema"],
            run=doc.get("run", {}),
        )


def _log_plot(report: Report, name: str, t: TowerSpec, levels, series: dict, ylabel: str) -> None:
    """Store ``(log |G/G_n|, log y)`` pairs for every series with positive data."""
    x = [math.log(t.index(n)) for n in levels]
    out = {}
    for key, ys in series.items():
        out[key] = [math.log(y) if y > 0 else None for y in ys]
    report.plots[name] = {"xlabel": "log |G/G_n|", "ylabel": ylabel, "x": x, "series": out}


# -- experiments -------------------------------------------------------------------------


def _run_dual(cfg, report, f):
    t = cfg.tower
    dual = enumerate_dual(t)
    rows = dual_table(t)
    report.add_table("dual", ["label", "dim", "level", "bracket"], rows)
    total = sum(r.dim**2 for r in dual)
    report.values.update({"irreps": len(dual), "sum_dim_sq": total, "order": t.order})
    report.checks["peter_weyl"] = total == t.order
    report.checks["conductor_levels"] = all(conductor_level(r) == r.level for r in dual)


def _run_transform(cfg, report, f):
    t = cfg.tower
    c = forward(f)
    back = inverse(c)
    norm2 = lp_norm(f, 2) ** 2
    scale = max(norm2, 1e-300)
    planch = abs(plancherel_norm2(c) - norm2) / scale
    rt = float(np.max(np.abs(back.values - f.values))) / max(lp_norm(f, np.inf), 1e-300)
    rows = []
    dual = enumerate_dual(t)
    hs2 = c.hs2()
    for n in range(t.depth + 1):
        sel = [r for r in dual if r.level == n]
        rows.append(
            {
                "level": n,
                "bracket": t.index(n),
                "irreps": len(sel),
                "dim_sq_sum": sum(r.dim**2 for r in sel),
                "mass": float(sum(r.dim * hs2[r.position] for r in sel)),
            }
        )
    report.add_table("levels", ["level", "bracket", "irreps", "dim_sq_sum", "mass"], rows)
    hy = []
    for p in cfg.params.get("p_values", [1.2, 1.5, 2.0]):
        p = float(p)
        lhs, rhs = lp_norm(f, p), dual_lq_norm(c, p / (p - 1))
        hy.append({"p": p, "f_lp": lhs, "fhat_lq": rhs, "gap": lhs - rhs})
    report.add_table("hausdorff_young", ["p", "f_lp", "fhat_lq", "gap"], hy)
    report.values.update({"plancherel_residual": planch, "roundtrip_residual": rt})
    report.checks["plancherel"] = planch < TOL_PLANCHEREL
    report.checks["roundtrip"] = rt < TOL_PLANCHEREL
    report.checks["hausdorff_young"] = all(r["gap"] >= -TOL_HY for r in hy)
    _log_plot(report, "level_mass", t, range(1, t.depth + 1), {"mass": [r["mass"] for r in rows[1:]]}, "log mass")


def _run_vt(cfg, report, f):
    t = cfg.tower
    a, mode = cfg.param("a", 1.0), cfg.params.get("mode", "group")
    if float(a).is_integer():
        a = int(a)
    sym = vt_symbol(t, a, mode)
    report.add_table("symbol", ["level", "index", "eigenvalue", "exact"], sym.table(t))
    direct = vt_apply_direct(f, a, mode)
    spectral = vt_apply_spectral(f, a, mode)
    dev = float(np.max(np.abs(direct.values - spectral.values)))
    scale = max(lp_norm(f, np.inf), 1e-300)
    const = vt_apply_spectral(type(f)(t, np.ones(t.order)), a, mode)
    report.values.update(
        {
            "direct_vs_spectral": dev,
            "relative_deviation": dev / scale,
            "prefactor": float(sym.prefactor),
            "constant_image": float(np.max(np.abs(const.values))),
        }
    )
    if sym.gamma is not None:
        report.values["gamma"] = float(sym.gamma.value)
        report.values["gamma_exact"] = str(sym.gamma.value)
    report.checks["direct_vs_spectral"] = dev <= TOL_VT * scale
    report.checks["constants_annihilated"] = report.values["constant_image"] <= TOL_VT
    eig = sym.as_array()
    _log_plot(report, "symbol", t, range(1, t.depth + 1), {"eigenvalue": eig[1:].tolist()}, "log eigenvalue")


def _run_modulus(cfg, report, f):
    t = cfg.tower
    p = cfg.param("p", 2.0)
    plat = platonov_check(f)
    table = plat.table
    report.add_table("modulus", ["n", "index", "omega", "sqrt_tail", "ratio"], table.rows())
    report.values["platonov_violations"] = plat.violations
    report.checks["platonov"] = plat.passed
    report.checks["omega_monotone"] = bool(np.all(np.diff(table.omega) <= 1e-12 * max(table.omega.max(), 1.0)))
    try:
        fit = lipschitz_fit(f, p)
        report.fits["lipschitz"] = fit.as_dict()
    except DegenerateWindow as exc:
        report.fits["lipschitz"] = None
        report.values["lipschitz_flag"] = str(exc)
    levels = range(t.depth)
    _log_plot(report, "modulus", t, levels, {"omega": table.omega.tolist(), "sqrt_tail": table.sqrt_tail.tolist()}, "log value")


def _run_titchmarsh2(cfg, report, f):
    t = cfg.tower
    alpha = cfg.param("alpha")
    try:
        rep = titchmarsh_second_check(f, alpha)
    except DegenerateWindow as exc:
        report.values["flag"] = str(exc)
        report.checks["window"] = False
        return
    report.add_table("modulus", ["n", "index", "omega", "sqrt_tail", "ratio"], rep.table.rows())
    report.fits["modulus"] = rep.modulus_fit.as_dict()
    report.fits["tail"] = rep.tail_fit.as_dict()
    report.values.update({"alpha": alpha, "gap": rep.gap, "tolerance": rep.tol})
    report.checks["equivalence"] = rep.passed
    _log_plot(report, "decay", t, range(t.depth), {"omega": rep.table.omega.tolist(), "tail": rep.table.tail.tolist()}, "log value")


def _run_titchmarsh1(cfg, report, f):
    t = cfg.tower
    p, alpha, gamma = cfg.param("p", 2.0), cfg.param("alpha"), cfg.param("gamma")
    betas = cfg.params.get("betas")
    rep = titchmarsh_first_check(f, p, gamma, alpha, betas=betas, step=cfg.param("beta_step", 0.05))
    report.add_table(
        "tails",
        ["k", "index", "S"],
        [{"k": k, "index": t.index(k), "S": float(s)} for k, s in enumerate(rep.s_table)],
    )
    report.add_table(
        "partial_sums",
        ["n", "index", "partial"],
        [{"n": n, "index": t.index(n), "partial": float(v)} for n, v in enumerate(rep.partial_table)],
    )
    report.add_table(
        "beta_grid",
        ["beta", "fourier_norm", "fourier_shell_exponent", "sobolev_norm", "sobolev_shell_exponent"],
        rep.rows(),
    )
    report.fits["S"] = None if rep.s_fit is None else rep.s_fit.as_dict()
    report.values.update(
        {
            "q": rep.q,
            "s_slope": rep.s_slope,
            "s_target": alpha * rep.q,
            "partial_slope": rep.partial_slope,
            "partial_target": (gamma - alpha) * rep.q,
            "fourier_boundary": rep.fourier_boundary,
            "sobolev_boundary": rep.sobolev_boundary,
            "thresholds": rep.thresholds,
            "tolerance": rep.tol,
        }
    )
    report.checks["s_slope"] = rep.slope_ok
    report.checks["beta_boundary"] = rep.boundary_ok
    _log_plot(report, "S", t, range(t.depth), {"S": rep.s_table.tolist()}, "log S(k)")


def _run_dini(cfg, report, f):
    t = cfg.tower
    alpha, nu = cfg.param("alpha"), cfg.param("nu")
    try:
        rep = dini_lipschitz_check(f, alpha, nu)
    except DegenerateWindow as exc:
        report.values["flag"] = str(exc)
        report.checks["window"] = False
        return
    rows = rep.table.rows()
    for row in rows:
        row["profile"] = float(rep.profile[row["n"]])
    report.add_table("modulus", ["n", "index", "omega", "sqrt_tail", "ratio", "profile"], rows)
    report.fits["modulus"] = rep.modulus_fit.as_dict()
    report.fits["tail"] = rep.tail_fit.as_dict()
    report.values.update({"tolerance_alpha": rep.tol_alpha, "tolerance_nu": rep.tol_nu})
    report.checks["modulus_fit"] = rep.fit_ok(rep.modulus_fit)
    report.checks["tail_fit"] = rep.fit_ok(rep.tail_fit)
    levels = range(1, t.depth)
    _log_plot(
        report,
        "dini",
        t,
        levels,
        {
            "omega": rep.table.omega[1:].tolist(),
            "sqrt_tail": rep.table.sqrt_tail[1:].tolist(),
            "profile": rep.profile[1 : t.depth].tolist(),
        },
        "log value",
    )


def _run_condition_a(cfg, report, f):
    t = cfg.tower
    mode = cfg.params.get("witnesses", "pair")
    if t.family == "heisenberg":
        fn = (lambda tt, k: heisenberg_witnesses(tt, k, separate=True)) if mode == "separate" else heisenberg_witnesses
    else:
        fn = abelian_witnesses
    rows = condition_a_scan(t, fn)
    report.add_table("condition_a", ["k", "c", "worst", "irreps"], rows)
    report.values["witnesses"] = {str(k): [list(h.coords) for h in fn(t, k)] for k in range(t.depth)}
    report.values["min_c"] = min(r["c"] for r in rows)
    report.checks["positive"] = all(r["c"] > 1e-9 for r in rows)


RUNNERS = {
    "dual": _run_dual,
    "transform": _run_transform,
    "vt": _run_vt,
    "modulus": _run_modulus,
    "titchmarsh1": _run_titchmarsh1,
    "titchmarsh2": _run_titchmarsh2,
    "dini": _run_dini,
    "condition-a": _run_condition_a,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    cfg.validate()
    start = time.perf_counter()
    f = cfg.build_function() if cfg.function is not None else None
    report = Report(
        experiment=cfg.experiment,
        config=_clean(cfg.to_dict()),
        seed=None if cfg.function is None else cfg.function.seed,
    )
    RUNNERS[cfg.experiment](cfg, report, f)
    report.run = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock": time.perf_counter() - start,
    }
    return report


# -- export ----------------------------------------------------------------------------


def _csv_cell(v):
    return "" if v is None else v


def export(report: Report, out_dir, fmt: str = "json", plots: bool = True) -> list[Path]:
    """Write the report (JSON, or one CSV per table) plus plot data and figures."""
    out = Path(out_dir)
    written: list[Path] = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path = out / "report.json"
            path.write_text(report.to_json())
            written.append(path)
        elif fmt == "csv":
            for name, table in sorted(report.tables.items()):
                path = out / f"{name}.csv"
                with path.open("w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(table["columns"])
                    for row in table["rows"]:
                        w.writerow([_csv_cell(v) for v in _clean(row)])
                written.append(path)
        else:
            raise ValueError(f"unknown format {fmt!r}")
        for name, plot in sorted(report.plots.items()):
            for key, ys in sorted(plot["series"].items()):
                path = out / f"plot_{name}_{key}.csv"
                with path.open("w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["x", "y"])
                    for x, y in zip(plot["x"], ys):
                        if y is not None:
                            w.writerow([x, y])
                written.append(path)
            if plots:
                written.append(_render(out / f"plot_{name}.png", plot, name))
    except OSError as exc:
        raise ExportError(f"cannot write report to {exc.filename or out}: {exc.strerror or exc}") from exc
    return written


def _render(path: Path, plot: dict, title: str) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, ys in sorted(plot["series"].items()):
        pts = [(x, y) for x, y in zip(plot["x"], ys) if y is not None]
        if pts:
            xs, vs = zip(*pts)
            ax.plot(xs, vs, marker="o", label=key)
    ax.set_xlabel(plot["xlabel"])
    ax.set_ylabel(plot["ylabel"])
    ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


# -- command line -------------------------------------------------------------------------


def _kv(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vilenkin", description="Harmonic analysis experiments on Vilenkin towers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--out", type=Path, help="output directory (default: print only)")
        p.add_argument("--format", choices=("json", "csv"), help="report format")
        p.add_argument("--seed", type=int, help="seed for random function families")
        p.add_argument("--depth", type=int, help="tower depth N")
        p.add_argument("--family", choices=("padic", "heisenberg", "vilenkin"), help="tower family")
        p.add_argument("--prime", type=int)
        p.add_argument("--dim", type=int)
        p.add_argument("--orders", help="comma separated orders for vilenkin towers")
        p.add_argument("--function", dest="function_family", help="function family")
        p.add_argument("--fparam", type=_kv, action="append", default=[], metavar="KEY=VALUE", help="function parameter")
        p.add_argument("--param", type=_kv, action="append", default=[], metavar="KEY=VALUE", help="experiment parameter")
        for flag in ("alpha", "nu", "p", "gamma", "a"):
            p.add_argument(f"--{flag}", type=float)
        p.add_argument("--no-plots", action="store_true", help="skip PNG figures")
        p.add_argument("--quiet", action="store_true", help="suppress the stdout table")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
    raw["experiment"] = args.experiment
    tower = dict(raw.get("tower", {}))
    if args.family:
        tower["family"] = args.family
    if args.depth is not None:
        tower["depth"] = args.depth
    if args.prime is not None:
        tower["prime"] = args.prime
    if args.dim is not None:
        tower["dim"] = args.dim
    if args.orders:
        try:
            tower["orders"] = [int(o) for o in args.orders.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --orders {args.orders!r}") from exc
    if tower:
        raw["tower"] = tower
    params = dict(raw.get("params", {}))
    params.update(dict(args.param))
    for flag in ("alpha", "nu", "p", "gamma", "a"):
        if getattr(args, flag) is not None:
            params[flag] = getattr(args, flag)
    raw["params"] = params
    fn = dict(raw.get("function") or {})
    if args.function_family:
        if fn.get("family") != args.function_family:
            fn = {"family": args.function_family}
    if args.fparam:
        fn.setdefault("params", {}).update(dict(args.fparam))
    if args.seed is not None and fn:
        fn["seed"] = args.seed
    if fn:
        raw["function"] = fn
    out = dict(raw.get("output", {}))
    if args.out is not None:
        out["dir"] = str(args.out)
    if args.format:
        out["format"] = args.format
    if args.no_plots:
        out["plots"] = False
    raw["output"] = out
    return ExperimentConfig.from_dict(raw)


def _print_summary(report: Report, stream) -> None:
    for name, table in sorted(report.tables.items()):
        print(f"# {name}", file=stream)
        print("\t".join(table["columns"]), file=stream)
        rows = table["rows"]
        for row in rows[:50]:
            print("\t".join("" if v is None else str(v) for v in _clean(row)), file=stream)
        if len(rows) > 50:
            print(f"# ... {len(rows) - 50} more rows", file=stream)
    for name, ok in sorted(report.checks.items()):
        print(f"check\t{name}\t{'pass' if ok else 'FAIL'}", file=stream)
    print(f"result\t{'pass' if report.passed else 'FAIL'}", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_experiment(cfg)
    except (ConfigError, TowerError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        _print_summary(report, sys.stdout)
    if cfg.out_dir is not None:
        try:
            paths = export(report, cfg.out_dir, cfg.fmt, cfg.plots)
        except ExportError as exc:
            print(f"output error: {exc}", file=sys.stderr)
            return EXIT_IO
        if not args.quiet:
            for path in paths:
                print(f"wrote\t{path}")
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
