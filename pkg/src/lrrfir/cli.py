"""Command-line driver.

    lrrfir simulate   --config cfg.json [--out-dir D]        -> D/record.csv
    lrrfir identify   --data record.csv [--gamma G]          -> D/identify.csv, identify_report.json
    lrrfir grid       [--data record.csv]                    -> D/grid.csv, grid_report.json
    lrrfir montecarlo [--trials T --seed S]                  -> D/montecarlo.csv, ..._report.json
    lrrfir nsweep     [--trials T]                           -> D/nsweep.csv, nsweep_report.json
    lrrfir theory     [--data record.csv]                    -> D/theory_report.json

Flags override the matching config keys.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .design import assemble
from .experiments import (RunConfig, run_monte_carlo, run_n_sweep, run_tradeoff_grid,
                          lrr_gamma)
from .reports import (build_report, dump_json, emit_reports, ensure_writable, format_csv,
                      read_record_csv, validate_report, write_record_csv)
from .sim import derive_seed, make_dataset
from .solver import solve_lrr
from .theory import (chebyshev_sample_size, check_support_condition, gamma_for_order,
                     gamma_leading_lb, kappa, leading_order)

log = logging.getLogger("lrrfir")


def load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_dict(json.load(fh))
    else:
        cfg = RunConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.out_dir is not None:
        changes["out_dir"] = args.out_dir
    if args.gamma is not None:
        changes["gamma"] = args.gamma
    if args.sigma_u is not None:
        changes["sigma_u"] = args.sigma_u
        if cfg.sigma_u_grid:
            changes["sigma_u_grid"] = (args.sigma_u,)
    if args.svg:
        changes["svg"] = True
    return cfg.replace(**changes) if changes else cfg


def _record(args, cfg):
    if getattr(args, "data", None):
        return read_record_csv(args.data)
    return make_dataset(cfg.system, cfg.signal(seed=derive_seed(cfg.seed, 0, 0, 0)),
                        cfg.N, cfg.q, cfg.discard)


def cmd_simulate(args, cfg):
    out = ensure_writable(cfg.out_dir)
    rec = _record(args, cfg)
    path = write_record_csv(rec, out / "record.csv")
    print(path)


def _identify(rec, cfg):
    n_l = leading_order(cfg.bound, cfg.nu, cfg.sigma_y, rec.N, rec.q)
    gamma = lrr_gamma(cfg, cfg.sigma_u, cfg.sigma_y, n_l)
    p = assemble(rec, cfg.sigma_u, gamma, cfg.weight_vector() if cfg.q == rec.q else None)
    sol = solve_lrr(p, tol=cfg.tol, max_iter=cfg.max_iter)
    rep = None
    if 1 <= n_l < rec.q:
        rep = check_support_condition(p, n_l, cfg.bound, cfg.nu, cfg.sigma_y, cfg.mu)
    return p, sol, rep


def cmd_identify(args, cfg):
    out = ensure_writable(cfg.out_dir)
    rec = _record(args, cfg)
    p, sol, rep = _identify(rec, cfg)
    rows = [{"i": i + 1, "x": sol.x[i], "x_tilde": sol.x_tilde[i]} for i in range(p.q)]
    (out / "identify.csv").write_text(format_csv(rows, ("i", "x", "x_tilde")))
    results = {"gamma": sol.gamma, "sigma_u": p.sigma_u, "support": sol.support + 1,
               "objective": sol.objective, "iterations": sol.iterations,
               "kkt_violation": sol.kkt_violation, "N": p.N, "q": p.q}
    report = build_report("identify", cfg.to_dict(), results,
                          [rep.to_dict()] if rep is not None else [])
    validate_report(report)
    (out / "identify_report.json").write_text(dump_json(report))
    print(f"gamma={sol.gamma:.6g} support size={sol.cardinality} "
          f"kkt={sol.kkt_violation:.2g} -> {out}")


def cmd_grid(args, cfg):
    ensure_writable(cfg.out_dir)
    if not cfg.gammas:
        raise SystemExit("grid needs 'gammas' in the config")
    res = run_tradeoff_grid(_record(args, cfg), cfg)
    paths = emit_reports(res, cfg.to_dict(), cfg.out_dir, svg=cfg.svg)
    print(paths["csv"])


def cmd_montecarlo(args, cfg):
    ensure_writable(cfg.out_dir)
    res = run_monte_carlo(cfg)
    emit_reports(res, cfg.to_dict(), cfg.out_dir, svg=cfg.svg)
    for a in res.aggregates:
        print(f"{a['noise_level']:>4} {a['method']:>4}  FIT={a['FIT']:6.2f}  "
              f"TN0={a['TN0']:7.2f}  TN1={a['TN1']:.4g}  (n={a['count']})")


def cmd_nsweep(args, cfg):
    ensure_writable(cfg.out_dir)
    res = run_n_sweep(cfg)
    emit_reports(res, cfg.to_dict(), cfg.out_dir, svg=cfg.svg)
    for a in res.aggregates:
        print(f"N={a['N']:>6} {a['method']:>4}  FIT={a['FIT']:6.2f}  TN0={a['TN0']:7.2f}  "
              f"TN1={a['TN1']:.4g}")


def cmd_theory(args, cfg):
    out = ensure_writable(cfg.out_dir)
    n_l = leading_order(cfg.bound, cfg.nu, cfg.sigma_y, cfg.N, cfg.q)
    k = kappa(cfg.nu, cfg.sigma_u)
    w = cfg.weight_vector()
    results = {
        "n_l": n_l, "kappa": k,
        "gamma_lower": gamma_leading_lb(cfg.bound, cfg.sigma_y, k, w[max(n_l, 1) - 1]),
        "gamma_order": gamma_for_order(max(n_l, 1), cfg.mu, cfg.bound, cfg.nu, k, cfg.N,
                                      w[max(n_l, 1) - 1]),
    }
    if args.eps is not None and args.beta is not None:
        spec = cfg.signal()
        results["chebyshev_N"] = chebyshev_sample_size(spec.m4 - spec.nu_sq ** 2,
                                                       args.eps, args.beta)
    recovery = []
    if args.data:
        rec = read_record_csv(args.data)
        _, _, rep = _identify(rec, cfg)
        if rep is not None:
            recovery.append(rep.to_dict())
    report = build_report("theory", cfg.to_dict(), results, recovery)
    validate_report(report)
    (out / "theory_report.json").write_text(dump_json(report))
    print(dump_json(results), end="")


COMMANDS = {
    "simulate": cmd_simulate, "identify": cmd_identify, "grid": cmd_grid,
    "montecarlo": cmd_montecarlo, "nsweep": cmd_nsweep, "theory": cmd_theory,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--out-dir")
    common.add_argument("--gamma", type=float, help="fixed penalty, overrides the automatic rule")
    common.add_argument("--sigma-u", type=float)
    common.add_argument("--svg", action="store_true", help="also write SVG plots")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lrrfir", description=__doc__.splitlines()[0] or None)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("identify", "grid", "theory"):
            sp.add_argument("--data", help="DataRecord CSV (k, u, u_tilde, y)")
        if name == "theory":
            sp.add_argument("--eps", type=float, help="accuracy for the sample-size bound")
            sp.add_argument("--beta", type=float, help="failure probability for the bound")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = load_config(args)
    COMMANDS[args.command](args, cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
