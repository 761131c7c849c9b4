"""Command-line front end.

    coherence-qsl evolve  [options]          trajectory CSV/JSON
    coherence-qsl qsl     [options]          speed-limit report
    coherence-qsl figure  FIG [--out PATH]   figure data (fig2_left, ..., all)
    coherence-qsl verify  [SUITE] [--seed N] oracle / properties / all

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .config import CHANNELS, FORMATS, ConfigError, RunConfig, load_config, run_trajectory
from .densmat import matrix_to_json
from .errors import NumericalError, QslError
from .figures import FIGURES, default_spec, figure_rows, rows_to_csv
from .qsl import tau_csl
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coherence-qsl", description="Coherence quantum speed limits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=("evolve", "qsl", "figure", "verify"))
    p.add_argument("target", nargs="?", help="figure id or verify suite")
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--channel", choices=CHANNELS)
    p.add_argument("--gamma", help="const:<g> or ohmic:k=<k>,wc=<w>")
    p.add_argument("--theta", help="polar angle, e.g. 1.047 or pi/3")
    p.add_argument("--phase")
    p.add_argument("--omega0", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--t0", type=float, help="rate time-origin shift")
    p.add_argument("--out")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--seed", type=int)
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    keys = ("channel", "gamma", "theta", "phase", "omega0", "tau", "steps", "t0",
            "out", "format", "seed")
    return load_config(args.config, {k: getattr(args, k) for k in keys})


def _run(operation: str, fn, *args):
    try:
        return fn(*args)
    except NumericalError as exc:
        raise NumericalError(f"{operation}: {type(exc).__name__}: {exc}") from exc


def cmd_evolve(cfg: RunConfig) -> int:
    traj = _run("trajectory", run_trajectory, cfg)
    if (cfg.format or "csv") == "csv":
        text = traj.to_csv()
    else:
        doc = {
            "version": __version__,
            "config": cfg.echo(),
            "t": traj.t.tolist(),
            "states": [matrix_to_json(m) for m in traj.states],
            "gamma_cum": traj.gamma_cum.tolist(),
        }
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_qsl(cfg: RunConfig) -> int:
    traj = _run("trajectory", run_trajectory, cfg)
    rep = _run("tau_csl", tau_csl, traj)
    fields = rep.to_dict()
    if (cfg.format or "json") == "json":
        text = json.dumps(dict(fields, config=cfg.echo(), version=__version__), indent=2) + "\n"
    else:
        row = [str(v).lower() if isinstance(v, bool) else f"{v:.17g}" for v in fields.values()]
        text = ",".join(fields) + "\n" + ",".join(row) + "\n"
    _emit(text, cfg.out)
    summary = f"tau={rep.tau:.10g} tau_csl={rep.tau_csl:.10g} ratio={rep.ratio:.10g}"
    print(summary, file=sys.stdout if cfg.out else sys.stderr)
    return EXIT_OK


def cmd_figure(figure: str | None, out: str | None) -> int:
    if figure is None:
        raise ConfigError(f"figure needs a target: one of {FIGURES + ('all',)}")
    targets = FIGURES if figure == "all" else (figure,)
    if figure != "all" and figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}")
    as_dir = figure == "all" or (out is not None and (os.path.isdir(out) or out.endswith("/")))
    for fig in targets:
        header, rows = figure_rows(default_spec(fig))
        if as_dir:
            os.makedirs(out or ".", exist_ok=True)
            path = os.path.join(out or ".", f"{fig}.csv")
        else:
            path = out or f"{fig}.csv"
        _emit(rows_to_csv(header, rows), path)
        print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_verify(suite: str | None, seed: int | None) -> int:
    suite = suite or "all"
    if suite not in SUITES:
        raise ConfigError(f"verify suite must be one of {SUITES}")
    checks = run_suite(suite, seed=0 if seed is None else seed)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "figure":
            return cmd_figure(args.target, args.out)
        if args.command == "verify":
            return cmd_verify(args.target, args.seed)
        if args.target is not None:
            raise ConfigError(f"{args.command} takes no positional target")
        cfg = _config(args)
        return cmd_evolve(cfg) if args.command == "evolve" else cmd_qsl(cfg)
    except ConfigError as exc:
        print(f"coherence-qsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"coherence-qsl: numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QslError, ValueError) as exc:
        print(f"coherence-qsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
