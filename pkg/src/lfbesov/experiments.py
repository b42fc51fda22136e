"""Seeded test-function generation, exponent fitting and theorem scans."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import platform
import re
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .besov import (
    BesovParams,
    besov_norm,
    delta_j,
    lp_decompose,
    parse_exponent,
    phi_j,
)
from .field import FieldParams, element_at, field_init
from .fourier import NAIVE_SIZE_LIMIT, fourier, inverse_fourier, transform_at
from .functions import (
    StepFunction,
    ball_indicator,
    from_terms,
    lr_norm,
    max_abs_diff,
    translate_digits,
)
from .operators import (
    HypothesisWarning,
    dilate,
    dilation_bound_check,
    localization_bound_check,
    localization_centers,
    supported_in,
)

log = logging.getLogger(__name__)

TREND_LIMIT = 0.01


# -- random test functions -----------------------------------------------------

def random_test_function(
    seed: int,
    num_terms: int,
    max_level: int,
    params: FieldParams,
    *,
    grid_level: int | None = None,
) -> StepFunction:
    """Deterministic random element of S(K): ``num_terms`` ball indicators
    with levels in [-max_level, max_level], centers drawn from the canonical
    coset representatives inside P^{-max_level} and complex coefficients of
    modulus in [0.5, 2].  The grid is (resolution, support) =
    (max_level, max_level) unless ``grid_level`` overrides both."""
    if num_terms < 1:
        raise ValueError("num_terms must be >= 1")
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    rng = np.random.default_rng(seed)
    q = params.q
    terms = []
    for _ in range(num_terms):
        level = int(rng.integers(-max_level, max_level + 1))
        index = int(rng.integers(0, q ** (max_level + level)))
        center = element_at(params, index, level, max_level)
        modulus = rng.uniform(0.5, 2.0)
        phase = rng.uniform(0.0, 2 * np.pi)
        terms.append((center, level, complex(modulus * np.cos(phase), modulus * np.sin(phase))))
    g = max_level if grid_level is None else grid_level
    return from_terms(params, terms, resolution=g, support=g)


def band_limited_function(seed: int, support: int, params: FieldParams) -> StepFunction:
    """Random function constant on cosets of D (so supp Ff lies in Gamma^0)."""
    rng = np.random.default_rng(seed)
    shape = (params.q,) * support
    data = rng.uniform(0.5, 2.0, shape) * np.exp(1j * rng.uniform(0, 2 * np.pi, shape))
    return StepFunction(params, 0, support, data)


# -- fitting ----------------------------------------------------------------------

@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residual: float


def fit_exponent(points: Sequence[tuple[float, float]], base: float) -> Fit:
    """Least squares of log_base(ratio) against k; residual is the largest
    absolute deviation from the fitted line."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    ks = np.array([float(k) for k, _ in points])
    ratios = np.array([float(r) for _, r in points])
    if np.any(ratios <= 0) or not np.all(np.isfinite(ratios)):
        raise ValueError("ratios must be positive and finite")
    y = np.log(ratios) / np.log(base)
    A = np.vstack([ks, np.ones_like(ks)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(y - (slope * ks + intercept))))
    return Fit(float(slope), float(intercept), resid)


def trend_slope(points: Sequence[tuple[float, float]]) -> float:
    """Slope of the natural log of the values against the index."""
    return fit_exponent(points, math.e).slope


# -- scan configuration -----------------------------------------------------------

MODES = ("dilation", "localization", "invariants", "besov-norm", "fourier")
_BUILTIN_RE = re.compile(r"^phi_(D|P(-?\d+))$")


class ConfigError(ValueError):
    pass


@dataclass
class ScanConfig:
    mode: str = "dilation"
    # None means q = 2, or the field named by a function file
    p: int | None = None
    c: int | None = None
    s: list[float] = field(default_factory=lambda: [1.0])
    r: list[float] = field(default_factory=lambda: [2.0])
    t: list[float] = field(default_factory=lambda: [2.0])
    kmax: int = 8
    kmin: int = 1
    jmax: int = 6
    i_levels: list[int] = field(default_factory=lambda: [0])
    n_centers: list[int] | None = None
    function: str | None = None
    builtin: str | None = None
    random: dict[str, int] | None = None
    out: str | None = None
    plot: str | None = None
    corpus: int = 20

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not (self.s and self.r and self.t):
            raise ConfigError("s, r and t lists must be nonempty")
        if self.mode == "dilation" and self.kmax < self.kmin:
            raise ConfigError("empty k range")
        if self.mode == "localization" and (self.jmax < 1 or not self.i_levels):
            raise ConfigError("empty j range or i levels")
        sources = [x for x in (self.function, self.builtin, self.random) if x is not None]
        if len(sources) > 1:
            raise ConfigError("give exactly one of function, builtin, random")
        if self.random is not None and "seed" not in self.random:
            raise ConfigError("random function source needs a seed")
        if self.builtin is not None and not _BUILTIN_RE.match(self.builtin):
            raise ConfigError(f"unknown builtin {self.builtin!r} (phi_D or phi_P<k>)")

    @property
    def params(self) -> FieldParams:
        return field_init(self.p or 2, self.c or 1)

    def besov_grid(self) -> list[BesovParams]:
        return [BesovParams(s, r, t) for s, r, t in itertools.product(self.s, self.r, self.t)]

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("r", "t"):
            d[key] = [("inf" if math.isinf(v) else v) for v in d[key]]
        return d


def builtin_function(name: str, params: FieldParams) -> StepFunction:
    m = _BUILTIN_RE.match(name)
    if not m:
        raise ConfigError(f"unknown builtin {name!r}")
    level = 0 if m.group(1) == "D" else int(m.group(2))
    return ball_indicator(params, None, level)


def load_source(cfg: ScanConfig) -> StepFunction:
    params = cfg.params
    if cfg.function is not None:
        from .funcfile import read_function

        f = read_function(cfg.function)
        if (cfg.p is not None or cfg.c is not None) and f.params != params:
            raise ConfigError("function file field differs from the configured field")
        return f
    if cfg.random is not None:
        rnd = cfg.random
        return random_test_function(
            int(rnd["seed"]), int(rnd.get("num_terms", 4)), int(rnd.get("max_level", 2)), params
        )
    return builtin_function(cfg.builtin or "phi_D", params)


# -- reports ------------------------------------------------------------------

@dataclass
class ScanReport:
    mode: str
    columns: list[str]
    rows: list[list[Any]]
    fits: dict[str, dict[str, float]] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def _bp_key(bp: BesovParams) -> str:
    return f"s={_fmt(bp.s)},r={_fmt(bp.r)},t={_fmt(bp.t)}"


def dilation_fits(rows: Sequence[Sequence[Any]], q: int) -> dict[str, dict[str, float]]:
    """Fitted exponent, constant and trend per (s, r, t), from dilation rows
    (s, r, t, k, norm_in, norm_out, ratio, bound_shape, ratio_over_bound)."""
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((float(row[0]), float(row[1]), float(row[2])), []).append(row)
    fits = {}
    for (s, r, t), grp in groups.items():
        pts = [(int(g[3]), float(g[6])) for g in grp if int(g[3]) >= 1]
        rob = [(int(g[3]), float(g[8])) for g in grp if int(g[3]) >= 1]
        entry = {"fitted_constant": max(float(g[8]) for g in grp)}
        if len(pts) >= 3:
            fit = fit_exponent(pts, q)
            entry.update(
                fitted_exponent=fit.slope,
                intercept=fit.intercept,
                residual=fit.residual,
                trend_slope=trend_slope(rob),
            )
        fits[_bp_key(BesovParams(s, r, t))] = entry
    return fits


def scan_dilation(cfg: ScanConfig, f: StepFunction) -> ScanReport:
    cols = ["s", "r", "t", "k", "norm_in", "norm_out", "ratio", "bound_shape", "ratio_over_bound"]
    rows = []
    checks = {}
    in_hyp = {}
    for bp in cfg.besov_grid():
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", HypothesisWarning)
            recs = [dilation_bound_check(f, bp, k) for k in range(cfg.kmin, cfg.kmax + 1)]
        for w in caught:
            log.warning("%s: %s", _bp_key(bp), w.message)
        in_hyp[_bp_key(bp)] = recs[0].in_hypothesis if recs else True
        for rec in recs:
            rows.append([bp.s, bp.r, bp.t, rec.k, rec.norm_in, rec.norm_out, rec.ratio,
                         rec.bound_shape, rec.ratio_over_bound])
    fits = dilation_fits(rows, f.params.q)
    for key, entry in fits.items():
        finite = all(math.isfinite(v) for v in entry.values())
        checks[f"{key}: finite"] = finite
        if in_hyp[key] and "trend_slope" in entry:
            checks[f"{key}: bounded ratio/bound"] = entry["trend_slope"] <= TREND_LIMIT
    return ScanReport("dilation", cols, rows, fits, checks)


def localization_source(f: StepFunction, i: int) -> StepFunction:
    """f itself when supported in P^i, otherwise f dilated until it is."""
    if supported_in(f, i):
        return f
    return dilate(f, i + f.support)


def scan_localization(cfg: ScanConfig, f0: StepFunction) -> ScanReport:
    cols = ["s", "r", "t", "i", "j", "n_centers", "lhs", "rhs_shape", "ratio"]
    q = f0.params.q
    counts = cfg.n_centers or [1, q, q**2, q**3]
    rows = []
    checks = {}
    fits = {}
    for bp in cfg.besov_grid():
        for i in cfg.i_levels:
            f = localization_source(f0, i)
            for n in counts:
                centers = localization_centers(f.params, i, n)
                coeffs = [1.0] * n
                pts = []
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", HypothesisWarning)
                    for j in range(1, cfg.jmax + 1):
                        rec = localization_bound_check(f, bp, j, centers, coeffs, i)
                        rows.append([bp.s, bp.r, bp.t, i, j, n, rec.lhs, rec.rhs_shape, rec.ratio])
                        pts.append((j, rec.ratio))
                key = f"{_bp_key(bp)},i={i},N={n}"
                entry = {"fitted_constant": max(r for _, r in pts)}
                if len(pts) >= 3:
                    entry["trend_slope"] = trend_slope(pts)
                    if not caught:
                        checks[f"{key}: bounded ratio"] = entry["trend_slope"] <= TREND_LIMIT
                checks[f"{key}: finite"] = all(math.isfinite(r) for _, r in pts)
                fits[key] = entry
    return ScanReport("localization", cols, rows, fits, checks)


def invariant_suite(params: FieldParams, count: int, seed: int = 0, max_level: int = 2,
                    num_terms: int = 4) -> ScanReport:
    """Plancherel, Fourier inversion, fast/naive agreement, partition of unity,
    Littlewood-Paley reconstruction, block orthogonality and Besov
    translation invariance on a seeded corpus."""
    tally: dict[str, list[float]] = {}
    tol = {
        "fourier_inversion": 1e-9,
        "plancherel": 1e-9,
        "fast_vs_naive": 1e-10,
        "partition_of_unity": 0.0,
        "lp_reconstruction": 1e-9,
        "block_orthogonality": 1e-9,
        "besov_translation": 1e-9,
    }
    rng = np.random.default_rng(seed)
    bp = BesovParams(1.0, 2.0, 2.0)
    for n in range(max_level + 2):
        total = phi_j(params, 0)
        for j in range(1, n + 1):
            total = total + phi_j(params, j)
        target = ball_indicator(params, None, -n, side="frequency")
        tally.setdefault("partition_of_unity", []).append(max_abs_diff(total, target))
    for idx in range(count):
        f = random_test_function(seed + idx, num_terms, max_level, params)
        F = fourier(f)
        back = inverse_fourier(F)
        tally.setdefault("fourier_inversion", []).append(max_abs_diff(back, f))
        n2 = lr_norm(f, 2)
        tally.setdefault("plancherel", []).append(abs(n2 - lr_norm(F, 2)) / max(n2, 1e-300))
        if f.size <= NAIVE_SIZE_LIMIT:
            err = max_abs_diff(fourier(f, method="naive"), F)
        else:
            err = 0.0
            flat = F.data.reshape(-1)
            for cell in rng.integers(0, F.size, 16):
                xi = element_at(params, int(cell), F.resolution, F.support)
                err = max(err, abs(transform_at(f, xi) - flat[cell]))
        tally.setdefault("fast_vs_naive", []).append(err)
        dec = lp_decompose(f)
        tally.setdefault("lp_reconstruction", []).append(max_abs_diff(dec.reconstruct(), f))
        worst = 0.0
        for j, b in enumerate(dec.blocks):
            for k in range(dec.n + 1):
                if k != j:
                    worst = max(worst, float(np.max(np.abs(delta_j(b, k).data), initial=0.0)))
        tally.setdefault("block_orthogonality", []).append(worst)
        z = element_at(params, int(rng.integers(0, params.q ** (2 * max_level))), max_level, max_level)
        b0 = besov_norm(f, bp)
        tally.setdefault("besov_translation", []).append(
            abs(besov_norm(translate_digits(f, z), bp) - b0) / max(b0, 1e-300)
        )
    cols = ["check", "n_pass", "n_total", "max_error", "tolerance"]
    rows = []
    checks = {}
    for name, errs in tally.items():
        n_pass = sum(e <= tol[name] for e in errs)
        rows.append([name, n_pass, len(errs), float(max(errs)), tol[name]])
        checks[name] = n_pass == len(errs)
    return ScanReport("invariants", cols, rows, {}, checks)


def run_scan(cfg: ScanConfig) -> ScanReport:
    cfg.validate()
    start = time.perf_counter()
    if cfg.mode == "dilation":
        report = scan_dilation(cfg, load_source(cfg))
    elif cfg.mode == "localization":
        report = scan_localization(cfg, load_source(cfg))
    elif cfg.mode == "invariants":
        seed = int((cfg.random or {}).get("seed", 0))
        report = invariant_suite(cfg.params, cfg.corpus, seed=seed)
    else:
        raise ConfigError(f"mode {cfg.mode!r} is not a scan")
    report.metadata = {
        "config": cfg.echo(),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_time_s": time.perf_counter() - start,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if cfg.out:
        write_report(report, cfg.out)
    if cfg.plot and report.mode in ("dilation", "localization"):
        plot_report(report, cfg.plot)
    return report


def write_report(report: ScanReport, out: str | Path) -> None:
    out = Path(out)
    out.write_text(report.csv_text(), encoding="utf-8")
    meta = {
        "mode": report.mode,
        "fits": report.fits,
        "checks": report.checks,
        "passed": report.passed,
        "metadata": report.metadata,
    }
    out.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_csv_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def plot_report(report: ScanReport, path: str | Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    if report.mode == "dilation":
        groups: dict[tuple, list] = {}
        for row in report.rows:
            groups.setdefault(tuple(row[:3]), []).append(row)
        for key, grp in groups.items():
            ks = [g[3] for g in grp]
            line, = ax.semilogy(ks, [g[6] for g in grp], "o-", label=f"ratio s,r,t={key}")
            ax.semilogy(ks, [g[7] for g in grp], "--", color=line.get_color(), label="bound shape")
        ax.set_xlabel("k")
    else:
        groups = {}
        for row in report.rows:
            groups.setdefault((row[3], row[5]), []).append(row)
        for (i, n), grp in groups.items():
            ax.plot([g[4] for g in grp], [g[8] for g in grp], "o-", label=f"i={i}, N={n}")
        ax.set_xlabel("j")
        ax.set_ylabel("lhs / rhs_shape")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def parse_list(value, conv=float) -> list:
    if isinstance(value, (list, tuple)):
        return [conv(v) for v in value]
    if isinstance(value, str):
        return [conv(v) for v in value.split(",") if v.strip()]
    return [conv(value)]


def exponent_list(value) -> list[float]:
    return parse_list(value, parse_exponent)
