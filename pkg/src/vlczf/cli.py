"""Command-line front end.

Subcommands write CSV (or JSON for ``simulate``) to ``--out`` or stdout:

    boundary   xi,x,L2,R1_bits,R2_bits        one block per xi in ``xi``
    symrate    xi,sym_rate_bits               over ``xi_grid``
    coverage   xi,d1,d2,sym_rate_bits,singular  row-major in d1 then d2
    loss       xi,displacement_m,loss_pct     percentage loss vs optimum
    simulate   JSON SimReport plus a "meta" block
    verify     runs the built-in property suites

Every CSV starts with one ``# {...}`` JSON line holding ``schema_version``,
the command and every effective config value.  ``--grid N`` overrides the
command's resolution: boundary samples, xi-grid count, points per axis of the
coverage grid, or displacement count.  The config file format and its keys
are documented in :mod:`vlczf.config`.

Exit codes: 0 ok, 1 a verify check failed, 2 config error, 3 singular
channel, 4 infeasible simulation targets.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import kernels
from .channel_model import find_optimum, percentage_loss_curve, sweep_displacement
from .config import ScenarioConfig
from .errors import ConfigError, DegenerateChannel, SingularMatrix
from .rate_region import RatePoint, sym_rate, trace_boundary
from .transceiver import TxConfig, run_sim

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_INFEASIBLE = 4


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _csv(meta: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _meta(command: str, cfg: ScenarioConfig, **extra) -> dict:
    meta = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg.metadata()}
    meta.update(extra)
    return meta


def _channel_meta(H) -> dict:
    return {"H_canonical": H.matrix.tolist(), "swapped": H.swapped}


def _need_layout(cfg, command):
    if cfg.layout is None:
        raise ConfigError(f"{command} needs a room layout, not a literal H")


def _regrid(values, n):
    return np.linspace(float(values[0]), float(values[-1]), n)


def cmd_boundary(cfg: ScenarioConfig, args) -> str:
    if args.grid:
        cfg.num_samples = args.grid
    H = cfg.channel()
    snr = cfg.snr

    def rows():
        for xi in cfg.xi:
            b = trace_boundary(H, snr, xi, cfg.num_samples)
            for x, l2, r1, r2 in zip(b.x, b.l2, b.r1, b.r2):
                yield xi, x, l2, r1, r2

    meta = _meta("boundary", cfg, **_channel_meta(H))
    return _csv(meta, ["xi", "x", "L2", "R1_bits", "R2_bits"], rows())


def cmd_symrate(cfg: ScenarioConfig, args) -> str:
    if args.grid:
        cfg.xi_grid = _regrid(cfg.xi_grid, args.grid)
    H = cfg.channel()
    snr = cfg.snr
    rows = ((xi, sym_rate(H, snr, float(xi))) for xi in cfg.xi_grid)
    meta = _meta("symrate", cfg, **_channel_meta(H))
    return _csv(meta, ["xi", "sym_rate_bits"], rows)


def cmd_coverage(cfg: ScenarioConfig, args) -> str:
    _need_layout(cfg, "coverage")
    if args.grid:
        cfg.d1_range = _regrid(cfg.d1_range, args.grid)
        cfg.d2_range = _regrid(cfg.d2_range, args.grid)
    snr = cfg.snr

    def rows():
        for xi in cfg.xi:
            g = sweep_displacement(cfg.layout, cfg.params, snr, xi, cfg.d1_range, cfg.d2_range,
                                   threads=args.threads)
            for i, d1 in enumerate(g.d1):
                for j, d2 in enumerate(g.d2):
                    yield xi, d1, d2, g.rate[i, j], bool(g.singular[i, j])

    meta = _meta("coverage", cfg)
    return _csv(meta, ["xi", "d1", "d2", "sym_rate_bits", "singular"], rows())


def cmd_loss(cfg: ScenarioConfig, args) -> str:
    _need_layout(cfg, "loss")
    if args.grid:
        cfg.displacement_range = _regrid(cfg.displacement_range, args.grid)
    snr = cfg.snr
    curves = []
    optima = {}
    for xi in cfg.xi:
        opt = find_optimum(cfg.layout, cfg.params, snr, xi)
        optima[repr(float(xi))] = {"t_opt": opt[0], "rate_opt": opt[1]}
        curves.append(percentage_loss_curve(cfg.layout, cfg.params, snr, xi,
                                            cfg.displacement_range, cfg.direction, opt))
    rows = ((c.xi, d, l) for c in curves for d, l in zip(c.displacement, c.loss_pct))
    meta = _meta("loss", cfg, optimum=optima)
    return _csv(meta, ["xi", "displacement_m", "loss_pct"], rows)


class _Infeasible(Exception):
    def __init__(self, text):
        self.text = text


def cmd_simulate(cfg: ScenarioConfig, args) -> str:
    if cfg.targets is None:
        raise ConfigError("simulate needs 'targets = r1,r2'")
    if len(cfg.xi) != 1:
        raise ConfigError("simulate needs exactly one xi")
    H = cfg.channel()
    tx = TxConfig(H, cfg.snr, cfg.xi[0], RatePoint(*cfg.targets), cfg.num_symbols,
                  cfg.seed, cfg.batch_size)
    rep = run_sim(tx, threads=args.threads)
    doc = rep.to_dict()
    doc["meta"] = _meta("simulate", cfg, **_channel_meta(H))
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if not rep.feasible:
        raise _Infeasible(text)
    return text


def cmd_verify(cfg, args) -> int:
    from .verify import run_all

    print(f"kernel backend: {kernels.BACKEND}")
    results = run_all()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


COMMANDS = {
    "boundary": cmd_boundary,
    "symrate": cmd_symrate,
    "coverage": cmd_coverage,
    "loss": cmd_loss,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vlczf", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH", help="scenario file (key = value)")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    p.add_argument("--grid", type=int, metavar="N", help="command resolution override")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    return p


def _load_config(args) -> ScenarioConfig:
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.config:
        return ScenarioConfig.from_file(args.config, overrides)
    return ScenarioConfig.from_text("", overrides)


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.grid is not None and args.grid < 2:
            raise ConfigError("--grid must be >= 2")
        cfg = _load_config(args)
        if args.command == "verify":
            return cmd_verify(cfg, args)
        _emit(COMMANDS[args.command](cfg, args), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularMatrix, DegenerateChannel) as exc:
        print(f"singular channel: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except _Infeasible as exc:
        _emit(exc.text, args.out)
        print("targets infeasible at this dimming level", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
