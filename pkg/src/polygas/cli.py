"""Command-line front end: ``polygas <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys

import jsonschema
import numpy as np

from . import measure as ms
from .collision import KernelSpec
from .config import constants_from_doc, levels_config, load_config
from .dsmc import INIT_KINDS, init_ensemble, make_rng, relax
from .euler import advance_1d, sod_mesh, write_snapshot
from .models import DiscreteLevels, PhysicalConstants
from .reduction import BinningSpec, bin_measure, reduce, uniform_edges
from .thermo import ThermoModel, delta_dof, heat_capacity, theta

__all__ = ["main", "run"]

AUTO_BINS = 64
AUTO_CAP_KT = 40.0


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_delta_table(args) -> None:
    cfg = load_config(args.model)
    tm = ThermoModel.from_model(cfg.model, cfg.constants)
    space = np.geomspace if args.log else np.linspace
    Ts = space(args.tmin, args.tmax, args.points)
    delta = delta_dof(tm, Ts)
    D, cv = heat_capacity(tm, Ts)
    th = theta(tm, Ts)
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "delta", "D", "cV", "Theta"])
        for row in zip(Ts, delta, D, cv, th):
            w.writerow([_fmt(x) for x in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_reduce(args) -> None:
    cfg = load_config(args.model)
    doc = {k: cfg.doc[k] for k in ("molecularMass", "massUnit", "constants", "tMax") if k in cfg.doc}
    doc["measure"] = ms.as_dict(reduce(cfg.model))
    _write_json(doc, args.out)


def _write_json(doc, path) -> None:
    fh = _open_out(path)
    try:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_bin(args) -> None:
    with open(args.measure) as fh:
        doc = json.load(fh)
    measure = ms.from_dict(doc["measure"])
    constants = constants_from_doc({"molecularMass": 1.0, **doc})
    scale = constants.hc if args.units == "cm-1" else 1.0
    kT_ref = constants.k_B * args.t_ref if args.t_ref else None
    if args.edges:
        spec = BinningSpec(tuple(scale * e for e in _floats(args.edges)), open_tail=args.open_tail)
    elif args.uniform and kT_ref:
        spec = uniform_edges(kT_ref, args.uniform)
    else:
        raise ValueError("give --edges, or --uniform together with --t-ref")
    grounded = bin_measure(measure, spec, kT_ref)
    _write_json(levels_config(grounded, {"molecularMass": 1.0, **doc}), args.out)


def _discrete(model, constants: PhysicalConstants, T0: float, n_bins: int) -> DiscreteLevels:
    m = reduce(model)
    if m.is_atomic:
        return DiscreteLevels(tuple(m.ground_offset + m.atom_locations), tuple(m.atom_masses))
    kT = constants.k_B * T0
    return bin_measure(m, uniform_edges(kT, n_bins, AUTO_CAP_KT), kT)


def cmd_relax(args) -> None:
    cfg = load_config(args.model)
    levels = _discrete(cfg.model, cfg.constants, args.T0, args.bins)
    rng = make_rng(args.seed)
    ens = init_ensemble(levels, args.N, args.rho, 0.0, args.T0, rng, kind=args.init,
                        constants=cfg.constants, kernel=KernelSpec(args.C))
    report = relax(ens, args.steps, args.dt, rng, record_every=args.record_every)
    fh = _open_out(args.out)
    try:
        report.write_csv(fh)
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_euler1d(args) -> None:
    cfg = load_config(args.model)
    tm = ThermoModel.from_model(cfg.model, cfg.constants)
    if args.ic != "sod":
        raise ValueError(f"unknown initial condition {args.ic!r}")
    mesh = sod_mesh(tm, args.cells, tuple(_floats(args.left)), tuple(_floats(args.right)),
                    length=args.length, bc=args.bc)
    mesh = advance_1d(mesh, tm, args.cfl, args.tend)
    write_snapshot(mesh, tm, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polygas", description="Polyatomic gas kinetic toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("delta-table", help="tabulate delta, D, c_V and Theta against T")
    d.add_argument("--model", required=True)
    d.add_argument("--tmin", type=float, default=10.0)
    d.add_argument("--tmax", type=float, default=1e4)
    d.add_argument("--points", type=int, default=200)
    d.add_argument("--log", action="store_true", help="log-spaced temperatures")
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_delta_table)

    r = sub.add_parser("reduce", help="reduce a model to its energy measure")
    r.add_argument("--model", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_reduce)

    b = sub.add_parser("bin", help="bin an energy measure into discrete levels")
    b.add_argument("--measure", required=True)
    b.add_argument("--edges", help="comma-separated grounded bin edges, first must be 0")
    b.add_argument("--units", choices=["J", "cm-1"], default="J", help="unit of --edges")
    b.add_argument("--open-tail", action="store_true")
    b.add_argument("--uniform", type=int, help="number of uniform bins on [0, 40 k T_ref]")
    b.add_argument("--t-ref", type=float, help="reference temperature for the tail check")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bin)

    x = sub.add_parser("relax", help="DSMC relaxation run")
    x.add_argument("--model", required=True)
    x.add_argument("--N", type=int, default=10000)
    x.add_argument("--T0", type=float, required=True)
    x.add_argument("--init", choices=INIT_KINDS, default="maxwellian")
    x.add_argument("--steps", type=int, default=100)
    x.add_argument("--dt", type=float, required=True)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--rho", type=float, default=1.0, help="mass density")
    x.add_argument("--C", type=float, default=1.0, help="kernel rate constant")
    x.add_argument("--bins", type=int, default=AUTO_BINS, help="bins for continuous models")
    x.add_argument("--record-every", type=int, default=1)
    x.add_argument("--out", default=None)
    x.set_defaults(func=cmd_relax)

    e = sub.add_parser("euler1d", help="1D Euler shock tube")
    e.add_argument("--model", required=True)
    e.add_argument("--ic", default="sod")
    e.add_argument("--cells", type=int, default=400)
    e.add_argument("--tend", type=float, default=0.2)
    e.add_argument("--cfl", type=float, default=0.9)
    e.add_argument("--left", default="1,0,1", help="rho,u,p left of the membrane")
    e.add_argument("--right", default="0.125,0,0.1", help="rho,u,p right of the membrane")
    e.add_argument("--length", type=float, default=1.0)
    e.add_argument("--bc", choices=["transmissive", "periodic"], default="transmissive")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_euler1d)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except jsonschema.ValidationError as exc:
        print(f"polygas: invalid model config: {exc.message}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"polygas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, NotImplementedError) as exc:
        print(f"polygas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
