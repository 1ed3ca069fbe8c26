"""Command-line front end.

Subcommands: count, zn, constants, sample, ball, asymptotics, verify.
Every run echoes its resolved configuration; identical configuration and
seed give byte-identical output.  JSON keys are sorted, CSV starts with
a "# config" comment line, and integers too large for a double are
emitted as decimal strings.  Exit codes: 0 success, 1 failed
verification, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analytic, heightcount, locallimit, sampler, treecore, verify
from .errors import ArborlabError

_BIG = 1 << 53


def _jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v) if abs(v) >= _BIG else v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _csv(config: dict, header: list[str], rows: list[list]) -> str:
    lines = ["# config " + _dump(config), ",".join(header)]
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def _parse_range(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"range must be LO:HI or LO:HI:STEP, got {text!r}")
    lo, hi = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if lo < 1 or hi < lo or step < 1:
        raise ValueError(f"bad range {text!r}")
    return list(range(lo, hi + 1, step))


def _parse_code(text: str) -> treecore.Tree:
    return treecore.decode([int(x) for x in text.split(",") if x != ""])


def _cache_dir(args) -> str | None:
    return args.cache or os.environ.get(heightcount.CACHE_ENV)


def _get_table(n: int, mode: str, cache: str | None) -> heightcount.CountTable:
    if cache:
        hit = heightcount.load_table(cache, mode, n)
        if hit is not None:
            return hit
    table = heightcount.build_count_table(n, mode=mode, materialize_cap=n)
    if cache:
        os.makedirs(cache, exist_ok=True)
        heightcount.save_table(table, cache)
    return table


def _fig_path(args, name: str) -> str | None:
    if getattr(args, "figdir", None):
        os.makedirs(args.figdir, exist_ok=True)
        return str(Path(args.figdir) / name)
    if getattr(args, "out", None):
        return str(Path(args.out).with_suffix(".png"))
    return None


# --- subcommands ---------------------------------------------------------


def _cmd_count(args) -> int:
    table = _get_table(args.n, args.mode, _cache_dir(args))
    config = {"command": "count", "N": args.n, "mode": args.mode,
              "format": args.format}
    row = list(table.row(args.n))
    lrow = [table.L(args.n, m) for m in range(1, args.n + 1)]
    if args.format == "csv":
        rows = [[h, e, l] for h, (e, l) in enumerate(zip(row, lrow), 1)]
        _emit(_csv(config, ["h", "E", "L"], rows), args.out)
    else:
        _emit(_dump({"config": config, "N": args.n, "E": row, "L": lrow}),
              args.out)
    fig = _fig_path(args, f"height_profile_{args.n}.png")
    if fig and args.figdir:
        from .plots import save_height_profile_figure
        total = table.row_sum(args.n)
        profile = [float(e / total) if table.mode == "exact" else e / total
                   for e in row]
        save_height_profile_figure([(0.0, profile)], args.n, fig)
    return 0


def _cmd_zn(args) -> int:
    ns = _parse_range(args.n_range) if args.n_range else list(
        range(1, args.n + 1))
    n_hi = ns[-1]
    config = {"command": "zn", "alpha": args.alpha, "mode": args.mode,
              "format": args.format, "N_max": n_hi}
    if args.mode == "exact":
        table = _get_table(n_hi, "exact", _cache_dir(args))
        pv = heightcount.partition_function(n_hi, args.alpha, table)
    else:
        pv = heightcount.stream_partition_functions(
            n_hi, [args.alpha])[float(args.alpha)]
    values = [pv.Z(n) for n in ns]
    if args.format == "csv":
        _emit(_csv(config, ["N", "Z"], [[n, z] for n, z in zip(ns, values)]),
              args.out)
    else:
        _emit(_dump({"config": config, "N": ns, "Z": values}), args.out)
    return 0


def _cmd_constants(args) -> int:
    branch, _ = analytic.alpha_branch(args.alpha)
    logcase = branch == "log"
    c_val = None
    err = 0.0
    if not logcase:
        c = analytic.c_alpha(args.alpha, tol=args.tol)
        c_val, err = c.value, c.error_estimate
    lead = analytic.leading_constant(args.alpha, tol=args.tol)
    out = {
        "alpha": args.alpha,
        "c_alpha": c_val,
        "C_alpha": lead.value,
        "branch": "logcase" if logcase else "generic",
        "error_estimate": max(err, lead.error_estimate),
        "provenance": lead.provenance,
        "config": {"command": "constants", "alpha": args.alpha,
                   "tol": args.tol},
    }
    _emit(_dump(out), args.out)
    return 0


def _cmd_sample(args) -> int:
    rng = sampler.RngStream(args.seed, args.stream)
    meta = {"kind": args.kind, "N": args.n, "alpha": args.alpha,
            "seed": args.seed, "stream": args.stream, "draws": args.draws}
    lines = []
    if args.kind in ("mu", "height"):
        if args.n is None:
            raise ArborlabError("sampling from the weighted measure needs --n")
        table = _get_table(args.n, "exact", _cache_dir(args))
        for _ in range(args.draws):
            if args.kind == "mu":
                t = sampler.sample_mu(args.n, args.alpha, table, rng)
            else:
                if args.height is None:
                    raise ArborlabError("--kind height needs --height")
                t = sampler.sample_uniform_given_height(
                    args.n, args.height, table, rng)
            lines.append(_dump({"code": list(t.code)}))
    elif args.kind == "bgw":
        for _ in range(args.draws):
            t = sampler.sample_bgw_branch(rng)
            lines.append(_dump({"code": list(t.code)}))
    elif args.kind == "uipt":
        meta["r"] = args.r
        for _ in range(args.draws):
            t = sampler.sample_uipt_ball(args.r, rng)
            lines.append(_dump({"code": list(t.code)}))
    _emit("\n".join([_dump(meta)] + lines), args.out)
    return 0


def _report_dict(rep) -> dict:
    out = {
        "t0": list(rep.t0_code), "r": rep.r, "n_slots": rep.n_slots,
        "alpha": rep.alpha, "N": rep.N, "mass": rep.mass,
        "lambda": float(rep.lam), "lambda_exact": rep.lam,
        "gap": rep.gap, "method": rep.method,
    }
    if rep.mass_exact is not None:
        out["mass_exact"] = rep.mass_exact
    if rep.draws is not None:
        out["draws"] = rep.draws
        out["ci_halfwidth"] = rep.ci_halfwidth
    return out


def _cmd_ball(args) -> int:
    t0 = _parse_code(args.t0)
    config = {"command": "ball", "t0": list(t0.code), "alpha": args.alpha,
              "mode": args.mode, "seed": args.seed}
    if args.sweep:
        ns = _parse_range(args.sweep)
        config["sweep"] = args.sweep
        table = _get_table(ns[-1], "scaled", _cache_dir(args))
        reports = locallimit.ball_mass_sweep(t0, ns, args.alpha, table)
        if args.format == "json":
            _emit(_dump({"config": config,
                         "rows": [_report_dict(r) for r in reports]}),
                  args.out)
        else:
            rows = [[r.N, repr(r.mass), repr(float(r.lam)), repr(r.gap)]
                    for r in reports]
            _emit(_csv(config, ["N", "exact_mass", "lambda", "gap"], rows),
                  args.out)
        fig = _fig_path(args, "ball_sweep.png")
        if fig:
            from .plots import save_ball_sweep_figure
            save_ball_sweep_figure(reports, fig)
        return 0
    if args.n is None:
        raise ArborlabError("ball needs --n or --sweep")
    config["N"] = args.n
    if args.empirical:
        table = _get_table(args.n, "exact", _cache_dir(args))
        rng = sampler.RngStream(args.seed, args.stream)
        rep = locallimit.empirical_ball_mass(
            t0, args.n, args.alpha, args.empirical, table, rng)
    else:
        table = _get_table(args.n, args.mode, _cache_dir(args))
        rep = locallimit.exact_ball_mass(t0, args.n, args.alpha, table)
    _emit(_dump({"config": config, **_report_dict(rep)}), args.out)
    return 0


def _cmd_asymptotics(args) -> int:
    alphas = [float(x) for x in args.alphas.split(",")]
    n_max = args.n_max
    config = {"command": "asymptotics", "alphas": alphas, "N_max": n_max,
              "format": args.format}
    pvs = heightcount.stream_partition_functions(n_max, alphas)
    ns = []
    n = 16
    while n < n_max:
        ns.append(n)
        n *= 2
    ns.append(n_max)
    series = []
    for a in alphas:
        try:
            limit = analytic.leading_constant(a).value
        except ArborlabError:
            limit = None
        ratios = [pvs[a].Z(m) * m ** ((3 - a) / 2) for m in ns]
        series.append((a, ns, ratios, limit))
    if args.format == "json":
        _emit(_dump({"config": config, "series": [
            {"alpha": a, "N": m, "ratio": r, "C_alpha": lim}
            for a, m, r, lim in series]}), args.out)
    else:
        rows = []
        for a, ms, ratios, lim in series:
            for m, ratio in zip(ms, ratios):
                rows.append([a, m, repr(ratio),
                             "" if lim is None else repr(lim)])
        _emit(_csv(config, ["alpha", "N", "ratio", "C_alpha"], rows),
              args.out)
    fig = _fig_path(args, "asymptotics.png")
    if fig:
        from .plots import save_asymptotics_figure
        save_asymptotics_figure(series, fig)
    return 0


def _cmd_verify(args) -> int:
    cfg = (verify.VerifyConfig.quick_config() if args.quick
           else verify.VerifyConfig())
    if args.seed != 0:
        cfg = verify.VerifyConfig(
            n_exact=cfg.n_exact, n_scaled=cfg.n_scaled, alphas=cfg.alphas,
            seed=args.seed, draws=cfg.draws, quick=cfg.quick)
    names = args.names.split(",") if args.names else None
    results = verify.run_verify(cfg, names=names, report=print)
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


# --- parser --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="arborlab",
        description="height-weighted random tree laboratory",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cache=True):
        sp.add_argument("--out", default=None, help="write to file")
        if cache:
            sp.add_argument("--cache", default=None,
                            help=f"table cache dir (or ${heightcount.CACHE_ENV})")

    sp = sub.add_parser("count", help="height-count table row at one size")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=("exact", "scaled"), default="exact")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--figdir", default=None)
    common(sp)
    sp.set_defaults(fn=_cmd_count)

    sp = sub.add_parser("zn", help="partition values Z_N(alpha)")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--n-range", default=None)
    sp.add_argument("--mode", choices=("exact", "scaled"), default="exact")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    common(sp)
    sp.set_defaults(fn=_cmd_zn)

    sp = sub.add_parser("constants", help="singularity constants for alpha")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    common(sp, cache=False)
    sp.set_defaults(fn=_cmd_constants)

    sp = sub.add_parser("sample", help="draw trees; one JSON line per draw")
    sp.add_argument("--kind", choices=("mu", "height", "bgw", "uipt"),
                    default="mu")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--height", type=int, default=None)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--draws", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    common(sp)
    sp.set_defaults(fn=_cmd_sample)

    sp = sub.add_parser("ball", help="ball mass vs its local-limit value")
    sp.add_argument("--t0", required=True, help="base tree code, e.g. 2,0,0")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--sweep", default=None, help="N range LO:HI[:STEP]")
    sp.add_argument("--mode", choices=("exact", "scaled"), default="scaled")
    sp.add_argument("--empirical", type=int, default=None, metavar="DRAWS")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    sp.add_argument("--figdir", default=None)
    common(sp)
    sp.set_defaults(fn=_cmd_ball)

    sp = sub.add_parser("asymptotics",
                        help="normalized coefficient ratios vs limits")
    sp.add_argument("--alphas", default="-3,-1,-0.5,0,2")
    sp.add_argument("--n-max", type=int, default=4096)
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    sp.add_argument("--figdir", default=None)
    common(sp, cache=False)
    sp.set_defaults(fn=_cmd_asymptotics)

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--names", default=None,
                    help="comma list to run a subset")
    sp.set_defaults(fn=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ArborlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
