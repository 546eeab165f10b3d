"""``fairgroup`` command line: synth, run and inspect.

Exit codes: 0 success, 1 internal error, 2 usage or configuration error,
3 the fairgroup positive class misses the configured alpha.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

from .clustering import write_assignment_csv
from .config import ExperimentConfig, config_from_mapping, format_config, load_config
from .dataset import SynthConfig, save_csv, synth_acs
from .errors import FairgroupError, InvalidConfigError, MissingArtifactError
from .fairgroups import write_plan_csv
from .importance import write_feature_csv, write_point_csv
from .pipeline import load_dataset, run_experiment
from .report import format_json, format_table, format_text, load_artifacts, save_artifacts

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_UNFAIR = 0, 1, 2, 3

LOG_LEVELS = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

REPORT_TXT = "report.txt"
REPORT_JSON = "report.json"
TABLE_TXT = "table.txt"
EFFECTIVE_CFG = "effective.cfg"
ARTIFACTS = "artifacts.json"

log = logging.getLogger("fairgroup")


class UsageError(Exception):
    pass


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


# ------------------------------------------------------------ synth


def cmd_synth(args) -> int:
    if args.n < 10:
        raise UsageError("--n: must be at least 10")
    cfg = SynthConfig(protected_prevalence=args.prevalence, label_noise=args.noise, proxy_strength=args.proxy_strength)
    try:
        d = synth_acs(args.n, args.seed, cfg)
    except InvalidConfigError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    save_csv(d, out)
    meta = [
        "generator=synth_acs",
        f"n={args.n}",
        f"seed={args.seed}",
        f"prevalence={cfg.protected_prevalence!r}",
        f"noise={cfg.label_noise!r}",
        f"proxy-strength={cfg.proxy_strength!r}",
        f"intercept={cfg.intercept!r}",
        *(f"effect.{k}={v!r}" for k, v in sorted(cfg.effects.items())),
    ]
    out.with_name(out.name + ".meta").write_text("\n".join(meta) + "\n", encoding="utf-8")
    print(f"wrote {d.n} rows to {out}")
    return EXIT_OK


# ------------------------------------------------------------ run

# ExperimentConfig fields exposed as ``--key value`` flags; data has its own flag
_CONFIG_FLAGS = [f.name for f in fields(ExperimentConfig) if f.name != "data"]


def shipped_configs() -> list[str]:
    return sorted(p.name for p in resources.files("fairgroup").joinpath("data").iterdir() if p.name.endswith(".cfg"))


def resolve_config(path: str):
    """A path on disk, or failing that the name of a shipped config."""
    if Path(path).exists() or path not in shipped_configs():
        return path
    return resources.files("fairgroup").joinpath("data", path)


def effective_config(args) -> ExperimentConfig:
    """Config file first, then any flags given on the command line."""
    cfg = ExperimentConfig()
    if args.config:
        try:
            cfg = load_config(resolve_config(args.config))
        except OSError as exc:
            raise UsageError(f"--config: {exc}") from None
        except InvalidConfigError as exc:
            raise UsageError(f"{args.config}: {exc}") from None
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS if getattr(args, name) is not None}
    if args.data is not None:
        overrides["data"] = args.data
    if args.synth:
        overrides["data"] = "none"
    try:
        return config_from_mapping(overrides, cfg)
    except InvalidConfigError as exc:
        # config messages start with the offending key; point at the flag instead
        key, sep, rest = str(exc).partition(":")
        if sep and key.replace("-", "_") in overrides:
            raise UsageError(f"--{key}:{rest}") from None
        raise UsageError(str(exc)) from None


def cmd_run(args) -> int:
    cfg = effective_config(args)
    try:
        d = load_dataset(cfg)
    except (OSError, FairgroupError, KeyError) as exc:
        raise UsageError(f"data: {exc}") from None
    result = run_experiment(d, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / REPORT_TXT).write_text(format_text(result), encoding="utf-8")
    (out / REPORT_JSON).write_text(format_json(result), encoding="utf-8")
    (out / TABLE_TXT).write_text(format_table(result), encoding="utf-8")
    (out / EFFECTIVE_CFG).write_text(format_config(cfg), encoding="utf-8")
    save_artifacts(result, out / ARTIFACTS)

    print(format_table(result), end="")
    if not result.fairgroup.alpha_fair_positive:
        print(
            f"fairness gate failed: positive-class balance {result.fairgroup.positive_class_balance:.3f} < alpha {cfg.alpha}",
            file=sys.stderr,
        )
        return EXIT_UNFAIR
    return EXIT_OK


# ------------------------------------------------------------ inspect


def cmd_inspect(args) -> int:
    run_dir = Path(args.out)
    art = load_artifacts(run_dir / ARTIFACTS)
    dest = Path(args.dest) if args.dest else run_dir
    dest.mkdir(parents=True, exist_ok=True)
    ids = art.point_ids
    write_point_csv(art.importance, dest / "importance.csv", ids)
    write_feature_csv(art.importance, dest / "features.csv")
    write_assignment_csv(art.clustering, dest / "clustering.csv", ids)
    write_plan_csv(art.plan, art.clustering, art.protected, dest / "fairgroups.csv", ids)
    print(
        f"{ids.size} points, {art.clustering.k} clusters, {len(art.plan.groups)} fairgroups "
        f"of {art.plan.ratio}, {art.plan.unmatched.size} unmatched; CSVs in {dest}"
    )
    return EXIT_OK


# ------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fairgroup", description="Fairgroup post-processing for binary classifiers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write an ACS-like synthetic CSV")
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--out", required=True, help="CSV path; a .meta sidecar is written next to it")
    s.add_argument("--prevalence", type=float, default=SynthConfig.protected_prevalence)
    s.add_argument("--noise", type=float, default=SynthConfig.label_noise)
    s.add_argument("--proxy-strength", type=float, default=SynthConfig.proxy_strength)
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("run", help="baseline vs fairgroup experiment")
    r.add_argument("--config", help="key=value config file; flags override it")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--data", help="CSV input (header row, numeric cells)")
    src.add_argument("--synth", action="store_true", help="use the built-in generator")
    for name in _CONFIG_FLAGS:
        r.add_argument(_flag(name), dest=name, metavar=name.upper())
    r.add_argument("--out", default="fairgroup-run", help="directory for reports and artifacts")
    r.set_defaults(func=cmd_run)

    i = sub.add_parser("inspect", help="dump importance, clustering and fairgroups of a prior run as CSV")
    i.add_argument("--out", default="fairgroup-run", help="directory of a prior run")
    i.add_argument("--dest", help="where to write the CSVs (default: the run directory)")
    i.set_defaults(func=cmd_inspect)
    return p


def _configure_logging() -> None:
    raw = os.environ.get("FAIRGROUP_LOG", "warning").strip().lower()
    if raw not in LOG_LEVELS:
        raise UsageError(f"FAIRGROUP_LOG: expected one of {', '.join(LOG_LEVELS)}, got {raw!r}")
    logging.basicConfig(level=LOG_LEVELS[raw], format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _configure_logging()
        return args.func(args)
    except (UsageError, MissingArtifactError) as exc:
        print(f"fairgroup {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fairgroup {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a bug, not a usage problem
        log.debug("internal error", exc_info=True)
        print(f"fairgroup {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

