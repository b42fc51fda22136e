"""lfbesov command line.

    lfbesov fourier --builtin phi_P2 --p 3
    lfbesov besov-norm --function f.json --s 1 --r 2 --t inf
    lfbesov dilate-scan --config scan.yaml --out dil.csv --plot dil.png
    lfbesov localize-scan --p 2 --jmax 4 --i-level 0,1
    lfbesov check-invariants --p 5 --seed 3

Exit codes: 0 pass, 1 check failure, 2 usage or parse error, 3 precision
overflow.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Any

import yaml

from .besov import besov_table, combine_blocks
from .experiments import (
    ConfigError,
    ScanConfig,
    ScanReport,
    _fmt,
    exponent_list,
    load_source,
    parse_list,
    run_scan,
    write_report,
)
from .field import EnumerationLimitError, FieldError, PrecisionError
from .fourier import SizeLimitError, fourier, inverse_fourier
from .funcfile import FunctionFileError, emit, write_function
from .functions import FREQUENCY, SPATIAL, StepFunction

log = logging.getLogger("lfbesov")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3

_MODE_OF = {
    "dilate-scan": "dilation",
    "localize-scan": "localization",
    "check-invariants": "invariants",
    "besov-norm": "besov-norm",
    "fourier": "fourier",
}


# -- config files -------------------------------------------------------------------

def _where(node) -> str:
    m = node.start_mark
    return f"line {m.line + 1}, column {m.column + 1}"


def _plain(node):
    """Node tree to python values; scalars are resolved by YAML's safe rules."""
    if isinstance(node, yaml.MappingNode):
        return {k.value: _plain(v) for k, v in node.value}
    if isinstance(node, yaml.SequenceNode):
        return [_plain(v) for v in node.value]
    return yaml.safe_load(yaml.serialize(node))


def _apply(cfg: ScanConfig, key: str, value: Any, node) -> None:
    try:
        if key == "field":
            if not isinstance(value, dict):
                raise ValueError("field must be a mapping with p and c")
            unknown = set(value) - {"p", "c"}
            if unknown:
                raise ValueError(f"unknown field keys {sorted(unknown)}")
            if "p" in value:
                cfg.p = int(value["p"])
            if "c" in value:
                cfg.c = int(value["c"])
        elif key == "besov":
            if not isinstance(value, dict):
                raise ValueError("besov must be a mapping with s, r, t")
            for sub, v in value.items():
                _apply(cfg, sub, v, node)
        elif key in ("p", "c", "kmin", "kmax", "jmax", "corpus"):
            setattr(cfg, key, int(value))
        elif key == "s":
            cfg.s = parse_list(value)
        elif key in ("r", "t"):
            setattr(cfg, key, exponent_list(value))
        elif key in ("k_range", "j_range"):
            lo, hi = (value["min"], value["max"]) if isinstance(value, dict) else value
            if key == "k_range":
                cfg.kmin, cfg.kmax = int(lo), int(hi)
            else:
                if int(lo) != 1:
                    raise ValueError("j_range must start at 1")
                cfg.jmax = int(hi)
        elif key in ("i_levels", "i_level"):
            cfg.i_levels = parse_list(value, int)
        elif key == "n_centers":
            cfg.n_centers = parse_list(value, int)
        elif key == "source":
            if not isinstance(value, dict) or len(value) != 1:
                raise ValueError("source must have exactly one of file, builtin, random")
            (kind, v), = value.items()
            _apply(cfg, {"file": "function"}.get(kind, kind), v, node)
        elif key == "function":
            cfg.function = str(value)
        elif key == "builtin":
            cfg.builtin = str(value)
        elif key == "random":
            if not isinstance(value, dict):
                raise ValueError("random must be a mapping with seed, num_terms, max_level")
            unknown = set(value) - {"seed", "num_terms", "max_level"}
            if unknown:
                raise ValueError(f"unknown random keys {sorted(unknown)}")
            cfg.random = {k: int(v) for k, v in value.items()}
        elif key in ("out", "plot", "mode"):
            setattr(cfg, key, str(value))
        else:
            raise ValueError(f"unknown key {key!r}")
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{_where(node)}: {key}: {exc}") from None


def load_config(text: str, cfg: ScanConfig | None = None) -> ScanConfig:
    """Parse a YAML scan config; errors carry line and column."""
    cfg = cfg or ScanConfig()
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError(f"{where}{exc.problem}") from None
    if root is None:
        return cfg
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{_where(root)}: config must be a mapping")
    for knode, vnode in root.value:
        _apply(cfg, knode.value, _plain(vnode), vnode)
    return cfg


# -- argument handling -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scan configuration")
    common.add_argument("--p", type=int, help="characteristic")
    common.add_argument("--c", type=int, help="degree of the residue field over GF(p)")
    common.add_argument("--s", help="smoothness, comma separated for sweeps")
    common.add_argument("--r", help="integrability (inf allowed)")
    common.add_argument("--t", help="summability (inf allowed)")
    common.add_argument("--kmin", type=int)
    common.add_argument("--kmax", type=int)
    common.add_argument("--jmax", type=int)
    common.add_argument("--i-level", dest="i_level", help="localization levels, comma separated")
    common.add_argument("--n-centers", dest="n_centers", help="center counts, comma separated")
    common.add_argument("--seed", type=int, help="seed for a random test function")
    common.add_argument("--num-terms", dest="num_terms", type=int, default=None)
    common.add_argument("--max-level", dest="max_level", type=int, default=None)
    common.add_argument("--corpus", type=int, help="corpus size for check-invariants")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--function", help="function file")
    src.add_argument("--builtin", help="phi_D or phi_P<k>")
    common.add_argument("--out", help="output path")
    common.add_argument("--plot", help="plot image path")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="lfbesov", description="Besov-space experiments over F_q((t)).")
    sub = ap.add_subparsers(dest="command", required=True)
    fp = sub.add_parser("fourier", parents=[common], help="transform a function file")
    fp.add_argument("--inverse", action="store_true", help="apply the inverse transform")
    sub.add_parser("besov-norm", parents=[common], help="Besov norm with its block table")
    sub.add_parser("dilate-scan", parents=[common], help="dilation bound scan")
    sub.add_parser("localize-scan", parents=[common], help="localization bound scan")
    sub.add_parser("check-invariants", parents=[common], help="identity and property suite")
    return ap


def config_from_args(args: argparse.Namespace) -> ScanConfig:
    cfg = ScanConfig(mode=_MODE_OF[args.command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        load_config(text, cfg)
        cfg.mode = _MODE_OF[args.command]
    for key in ("p", "c", "kmin", "kmax", "jmax", "corpus", "out", "plot"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    try:
        if args.s is not None:
            cfg.s = parse_list(args.s)
        if args.r is not None:
            cfg.r = exponent_list(args.r)
        if args.t is not None:
            cfg.t = exponent_list(args.t)
        if args.i_level is not None:
            cfg.i_levels = parse_list(args.i_level, int)
        if args.n_centers is not None:
            cfg.n_centers = parse_list(args.n_centers, int)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    # flags replace whatever source the config named
    if args.function is not None or args.builtin is not None or args.seed is not None:
        cfg.function = cfg.builtin = cfg.random = None
    if args.function is not None:
        cfg.function = args.function
    elif args.builtin is not None:
        cfg.builtin = args.builtin
    if args.seed is not None:
        if args.function is not None or args.builtin is not None:
            raise ConfigError("--seed selects a random function; drop --function/--builtin")
        cfg.random = {"seed": args.seed}
    if cfg.random is not None:
        if args.num_terms is not None:
            cfg.random["num_terms"] = args.num_terms
        if args.max_level is not None:
            cfg.random["max_level"] = args.max_level
    elif args.num_terms is not None or args.max_level is not None:
        raise ConfigError("--num-terms/--max-level need --seed")
    return cfg


# -- commands -------------------------------------------------------------------

def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_fourier(cfg: ScanConfig, args) -> int:
    f = load_source(cfg)
    if args.inverse:
        if f.side != FREQUENCY:
            f = StepFunction(f.params, f.resolution, f.support, f.data, FREQUENCY)
        g = inverse_fourier(f)
    else:
        if f.side != SPATIAL:
            raise ConfigError("forward transform needs a spatial function (use --inverse)")
        g = fourier(f)
    if cfg.out:
        write_function(cfg.out, g)
    else:
        sys.stdout.write(emit(g))
    return EXIT_OK


def cmd_besov_norm(cfg: ScanConfig, args) -> int:
    f = load_source(cfg)
    lines = ["s,r,t,j,block_norm,weighted"]
    summary = []
    for bp in cfg.besov_grid():
        table = besov_table(f, bp)
        for j, a, w in table:
            lines.append(",".join(_fmt(v) for v in (bp.s, bp.r, bp.t, j, a, w)))
        norm = combine_blocks([a for _, a, _ in table], bp.s, bp.t, f.params.q)
        summary.append(f"s={_fmt(bp.s)} r={_fmt(bp.r)} t={_fmt(bp.t)} norm={_fmt(norm)}")
    _write_text("\n".join(lines) + "\n", cfg.out)
    for line in summary:
        print(line, file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def _summarize(report: ScanReport) -> None:
    for name, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    for key, entry in report.fits.items():
        body = " ".join(f"{k}={v:.6g}" for k, v in entry.items())
        print(f"fit  {key}: {body}")


def cmd_scan(cfg: ScanConfig, args) -> int:
    out = cfg.out
    cfg.out = None
    report = run_scan(cfg)
    if out:
        write_report(report, out)
        _summarize(report)
    else:
        sys.stdout.write(report.csv_text())
        for name, ok in report.checks.items():
            print(f"{'PASS' if ok else 'FAIL'}  {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK


COMMANDS = {
    "fourier": cmd_fourier,
    "besov-norm": cmd_besov_norm,
    "dilate-scan": cmd_scan,
    "localize-scan": cmd_scan,
    "check-invariants": cmd_scan,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        cfg.validate()
        return COMMANDS[args.command](cfg, args)
    except PrecisionError as exc:
        print(f"precision overflow: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except FunctionFileError as exc:
        print(f"{args.function or args.config}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FieldError, EnumerationLimitError, SizeLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
