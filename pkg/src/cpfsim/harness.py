"""Sweep engine: formula selectors, error measurements, CSV emission, presets."""

from __future__ import annotations

import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
from mpmath import mp

from . import highprec
from .correctors import (
    cpf2_symplectic,
    cpf2k_nonperturbed,
    cpf2k_perturbed,
    cpf4_symplectic,
    corrected_yoshida,
    custom_corrector,
)
from .dense import spectral_norm
from .fitting import fit_loglog_slope, slope_window
from .formulas import (
    TrotterizedProduct,
    evaluate,
    load_yoshida_weights,
    pf1,
    pf2,
    suzuki,
    trotterize,
    yoshida,
)
from .lattice import HamiltonianSpec, build_model, eig_expm, partition_matrices

CSV_HEADER = "model,formula,alpha,t,r,tau,error,exp_count,wall_time_s"

TRIANGLE_SUFFIX = "!tri"


class ConfigError(ValueError):
    """Malformed sweep configuration or formula selector."""


# ---------------------------------------------------------------------------
# Formula selectors
# ---------------------------------------------------------------------------


def build_formula(selector: str, lam, alpha):
    """Resolve a selector string to a product at step parameter lam.

    Grammar: pf1 | pf2 | pf4 | pf2k:<k> | cpf1-symp | cpf1-sym | cpf1-com |
    cpf2-symp:<k> | cpf2-com | cpf4-symp | cpf2k-pert:<k> | cpf2k-nonpert:<k> |
    ypf:<file> | cypf:<file>:<k>
    """
    name, _, arg = selector.partition(":")
    try:
        if name == "pf1":
            return pf1(lam)
        if name == "pf2":
            return pf2(lam)
        if name == "pf4":
            return suzuki(4, lam)
        if name == "pf2k":
            return suzuki(2 * int(arg), lam)
        if name == "cpf1-symp":
            return custom_corrector("pf1-symp-ext", alpha, lam)
        if name == "cpf1-sym":
            return custom_corrector("pf1-sym", alpha, lam)
        if name == "cpf1-com":
            return custom_corrector("pf1-com", alpha, lam)
        if name == "cpf2-symp":
            return cpf2_symplectic(int(arg) if arg else 1, alpha, lam)
        if name == "cpf2-com":
            return custom_corrector("pf2-com", alpha, lam)
        if name == "cpf4-symp":
            return cpf4_symplectic(alpha, lam)
        if name == "cpf2k-pert":
            k = int(arg)
            return cpf2k_perturbed(2 * k, alpha, lam, k_corr=k)
        if name == "cpf2k-nonpert":
            return cpf2k_nonperturbed(2 * int(arg), lam, alpha)
        if name == "ypf":
            return yoshida(load_yoshida_weights(arg), lam)
        if name == "cypf":
            path, _, k = arg.rpartition(":")
            return corrected_yoshida(load_yoshida_weights(path), int(k), alpha, lam)
    except (ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad formula selector {selector!r}: {exc}") from exc
    raise ConfigError(f"unknown formula selector {selector!r}")


# ---------------------------------------------------------------------------
# Error measurements
# ---------------------------------------------------------------------------


def _exact_evolution(spec: HamiltonianSpec, t: float, precision: int | None):
    if precision is None:
        return eig_expm(spec, "full", -1j * t)
    a, b, alpha = partition_matrices(spec)
    am, bm = highprec.to_mp(a), highprec.to_mp(b)
    return highprec.expm(am + bm * highprec.mpc_(alpha), mpmath.mpc(0, -t))


def _diff_norm(x, y) -> float:
    if isinstance(x, mpmath.matrix):
        return float(highprec.spectral_norm(x - y))
    return spectral_norm(x - y)


def _step_lambda(t: float, r: int, precision: int | None):
    if precision is None:
        return -1j * (t / r)
    return mpmath.mpc(0, -(mp.mpf(t) / r))


def total_error(spec: HamiltonianSpec, selector: str, t: float, r: int,
                precision: int | None = None) -> float:
    """Spectral norm of expm(-itH) minus the r-fold trotterized product,
    powered by squaring. With ``precision`` (decimal digits) the whole
    measurement runs on the mpmath backend."""
    ctx = mp.workdps(precision) if precision is not None else _nullcontext()
    with ctx:
        lam = _step_lambda(t, r, precision)
        prod = build_formula(selector, lam, spec.alpha)
        approx = evaluate(trotterize(prod, r), spec, precision=precision)
        exact = _exact_evolution(spec, t, precision)
        return _diff_norm(approx, exact)


def per_step_error(spec: HamiltonianSpec, selector: str, tau: float,
                   precision: int | None = None) -> float:
    """Single-step error at step size tau."""
    ctx = mp.workdps(precision) if precision is not None else _nullcontext()
    with ctx:
        lam = _step_lambda(tau, 1, precision)
        prod = build_formula(selector, lam, spec.alpha)
        approx = evaluate(prod, spec, precision=precision)
        exact = _exact_evolution(spec, tau, precision)
        return _diff_norm(approx, exact)


def per_step_triangle_estimate(spec: HamiltonianSpec, selector: str, tau: float,
                               r: int, precision: int | None = None) -> float:
    """r * (single-step error at tau): the triangle-inequality bound on the
    total error; equals total_error exactly at r = 1."""
    return r * per_step_error(spec, selector, tau, precision)


class _nullcontext:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    model: str
    regime: str | None
    n: int
    formulas: tuple[str, ...]
    alphas: tuple[float, ...]
    t_min: float
    t_max: float
    t_points: int
    r: int
    error_mode: str = "total"  # total | per-step
    seed: int = 0
    output: str | None = None
    triangle: bool = False  # also emit r*|delta| rows, formula suffix "!tri"

    def t_grid(self) -> tuple[float, ...]:
        if self.t_points < 1 or self.t_min <= 0 or self.t_max < self.t_min:
            raise ConfigError("t grid must be positive ascending")
        if self.t_points == 1:
            return (self.t_min,)
        return tuple(
            float(x) for x in np.geomspace(self.t_min, self.t_max, self.t_points)
        )

    def validate(self):
        if self.r < 1:
            raise ConfigError("r must be >= 1")
        if self.error_mode not in ("total", "per-step"):
            raise ConfigError(f"unknown error_mode {self.error_mode!r}")
        if not self.formulas:
            raise ConfigError("no formulas selected")
        self.t_grid()
        return self


@dataclass(frozen=True)
class SweepRow:
    model: str
    formula: str
    alpha: float
    t: float
    r: int
    tau: float
    error: float
    exp_count: int
    wall_time_s: float

    def csv(self) -> str:
        return ",".join(
            [
                self.model,
                self.formula,
                repr(self.alpha),
                repr(self.t),
                str(self.r),
                repr(self.tau),
                repr(self.error),
                str(self.exp_count),
                repr(self.wall_time_s),
            ]
        )


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [row.csv() for row in self.rows]) + "\n"

    def to_json(self) -> str:
        return json.dumps([row.__dict__ for row in self.rows], indent=2)

    def write(self, path, as_json: bool = False):
        Path(path).write_text(self.to_json() if as_json else self.to_csv())


def _sweep_point(cfg: SweepConfig, selector: str, alpha: float, t: float,
                 measure_time: bool) -> SweepRow:
    spec = build_model(cfg.model, cfg.regime, cfg.n, alpha)
    base, is_triangle = (
        (selector[: -len(TRIANGLE_SUFFIX)], True)
        if selector.endswith(TRIANGLE_SUFFIX)
        else (selector, False)
    )
    tau = t / cfg.r
    start = time.perf_counter()
    if is_triangle:
        err = per_step_triangle_estimate(spec, base, tau, cfg.r)
    elif cfg.error_mode == "per-step":
        err = per_step_error(spec, base, tau)
    else:
        err = total_error(spec, base, t, cfg.r)
    wall = time.perf_counter() - start if measure_time else 0.0
    prod = build_formula(base, -1j * tau, spec.alpha)
    exp_count = trotterize(prod, cfg.r).exp_count
    return SweepRow(spec.model_tag, selector, alpha, t, cfg.r, tau, err,
                    exp_count, wall)


def _point_task(args):
    return _sweep_point(*args)


def run_sweep(cfg: SweepConfig, jobs: int = 1, measure_time: bool = True) -> SweepResult:
    """Full Cartesian sweep over formulas x alphas x t grid; rows sorted
    deterministically. With measure_time=False the wall-time column is zeroed
    so identical configs produce byte-identical CSV."""
    cfg.validate()
    formulas = list(cfg.formulas)
    if cfg.triangle:
        formulas += [f + TRIANGLE_SUFFIX for f in cfg.formulas]
    tasks = [
        (cfg, sel, alpha, t, measure_time)
        for sel in formulas
        for alpha in cfg.alphas
        for t in cfg.t_grid()
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("once")
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_point_task, tasks))
        else:
            rows = [_sweep_point(*task) for task in tasks]
    rows.sort(key=lambda row: (row.model, row.formula, row.alpha, row.t))
    result = SweepResult(rows)
    if cfg.output:
        result.write(cfg.output)
    return result


# ---------------------------------------------------------------------------
# Config files and presets
# ---------------------------------------------------------------------------


def parse_config(text: str) -> SweepConfig:
    """Key-value config: one `key = value` per line, '#' comments.

    Keys: model, regime, n, formula (comma list), alpha (comma list), t_min,
    t_max, t_points, r, error_mode, seed, output, triangle.
    """
    kv: dict[str, str] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()
    try:
        return SweepConfig(
            model=kv["model"],
            regime=kv.get("regime") or None,
            n=int(kv.get("n", "6")),
            formulas=tuple(s.strip() for s in kv["formula"].split(",") if s.strip()),
            alphas=tuple(float(s) for s in kv.get("alpha", "1.0").split(",")),
            t_min=float(kv.get("t_min", "1")),
            t_max=float(kv.get("t_max", "100")),
            t_points=int(kv.get("t_points", "10")),
            r=int(kv.get("r", "100")),
            error_mode=kv.get("error_mode", "total"),
            seed=int(kv.get("seed", "0")),
            output=kv.get("output"),
            triangle=kv.get("triangle", "off") in ("on", "true", "1"),
        ).validate()
    except KeyError as exc:
        raise ConfigError(f"missing config key: {exc}") from exc


def load_config(path) -> SweepConfig:
    return parse_config(Path(path).read_text())


NONPERT_FORMULAS = ("pf1", "pf2", "pf4", "cpf1-symp", "cpf1-com", "cpf2-com",
                    "cpf2k-nonpert:2")
PERT_FORMULAS = ("pf1", "cpf1-symp", "pf2", "cpf2-symp:2")


def preset_sweeps(name: str, full: bool = False) -> list[SweepConfig]:
    """Desk-scale reproductions of the error-vs-time experiments.

    fig-nonpert: the three alpha = 1 models; fig-pert: the three perturbed
    regimes at alpha = 1e-1 .. 1e-4 (plus triangle-estimate rows). `full`
    switches to lattice size n = 8 with r = 10 000 steps and 1 <= t <= 1000.
    """
    n = 8 if full else 6
    r = 10_000 if full else 100
    if name == "fig-nonpert":
        t_min, t_max, pts = (1.0, 1000.0, 13) if full else (1.0, 100.0, 10)
        return [
            SweepConfig(model, regime, n, NONPERT_FORMULAS, (1.0,),
                        t_min, t_max, pts, r, triangle=True)
            for model, regime in (
                ("heisenberg", None),
                ("tfim", "nonperturbed"),
                ("hubbard", "intermediate"),
            )
        ]
    if name == "fig-pert":
        t_min, t_max, pts = (1.0, 1000.0, 10) if full else (1.0, 10.0, 8)
        alphas = (1e-1, 1e-2, 1e-3, 1e-4)
        return [
            SweepConfig(model, regime, n, PERT_FORMULAS, alphas,
                        t_min, t_max, pts, r, triangle=True)
            for model, regime in (
                ("hubbard", "weak-coupling"),
                ("hubbard", "weak-hopping"),
                ("tfim", "weak-coupling"),
            )
        ]
    raise ConfigError(f"unknown preset {name!r}")


def run_preset(name: str, full: bool = False, jobs: int = 1,
               measure_time: bool = True) -> SweepResult:
    merged = SweepResult([])
    for cfg in preset_sweeps(name, full):
        merged.rows.extend(run_sweep(cfg, jobs=jobs, measure_time=measure_time).rows)
    merged.rows.sort(key=lambda row: (row.model, row.formula, row.alpha, row.t))
    return merged


# ---------------------------------------------------------------------------
# CSV reading and slope filtering (used by the slope CLI and the tests)
# ---------------------------------------------------------------------------


def read_csv_rows(path) -> list[dict]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header in {path}")
    names = CSV_HEADER.split(",")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        row = dict(zip(names, parts))
        for key in ("alpha", "t", "tau", "error", "wall_time_s"):
            row[key] = float(row[key])
        for key in ("r", "exp_count"):
            row[key] = int(row[key])
        out.append(row)
    return out


def filter_rows(rows: list[dict], expr: str) -> list[dict]:
    """AND-filter 'key=value,key=value'; numeric columns compare as floats."""
    if not expr or not rows:
        return rows
    clauses = []
    for part in expr.split(","):
        key, _, value = part.partition("=")
        if not _ or key.strip() not in rows[0]:
            raise ConfigError(f"bad filter clause {part!r}")
        clauses.append((key.strip(), value.strip()))

    def keep(row):
        for key, value in clauses:
            if isinstance(row[key], (int, float)):
                if abs(row[key] - float(value)) > 1e-12 * max(1.0, abs(row[key])):
                    return False
            elif str(row[key]) != value:
                return False
        return True

    return [row for row in rows if keep(row)]


def slope_of_rows(rows: list[dict], x: str = "t", floor: float = 1e-12,
                  cap: float = 0.5):
    pts = slope_window([(row[x], row["error"]) for row in rows], floor, cap)
    return fit_loglog_slope(pts)
