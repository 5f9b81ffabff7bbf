"""Command line interface for the broadcast-channel bound computations.

Every subcommand prints a JSON run report to stdout (or ``--out``) and a
wall-clock line to stderr, so reports are byte-reproducible for a fixed
seed and config.  Exit codes: 0 success, 1 a check failed, 2 input or
validation error, 3 search budget exhausted without convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .channel import (
    Channel,
    ProductChannel,
    classify,
    load_channel_file,
    make_product,
    save_channel_file,
)
from .counterexample import verify_separation
from .marton import (
    build_lambda_curve,
    check_factorization,
    check_min_max_equality,
    curve_to_csv,
    marton_sum_rate,
)
from .regions import build_region, region_support, uv_sum_rate
from .search import SearchConfig

RATIONAL_TOL = 1e-9
MAX_DENOMINATOR = 64

DEFAULT_DIRECTIONS = (
    (0.0, 1.0, 1.0),
    (1.0, 1.0, 1.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
)

REGION_KIND_FLAGS = {
    "inner": "product_inner",
    "semi-deterministic": "semi_deterministic",
    "more-capable": "more_capable",
    "more-capable-deterministic": "more_capable_deterministic",
}


class CommandError(Exception):
    """Input or validation failure mapped to exit code 2."""


def format_bits(value: float) -> str:
    """12-significant-digit rendering, annotated when close to a small rational."""
    text = f"{value:.12g}"
    frac = Fraction(value).limit_denominator(MAX_DENOMINATOR)
    if abs(value - float(frac)) <= RATIONAL_TOL:
        if frac.denominator == 1:
            text += f" (~ {frac.numerator})"
        else:
            text += f" (~ {frac.numerator}/{frac.denominator})"
    return text


def _env_workers() -> int:
    raw = os.environ.get("BCBOUNDS_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise CommandError(f"BCBOUNDS_WORKERS must be an integer, got {raw!r}")
    if workers < 1:
        raise CommandError("BCBOUNDS_WORKERS must be >= 1")
    return workers


def _config(args) -> SearchConfig:
    cfg = SearchConfig().with_(seed=args.seed, workers=_env_workers())
    restarts = getattr(args, "restarts", None)
    if restarts is None:
        restarts = getattr(args, "default_restarts", cfg.restarts)
    cfg = cfg.with_(restarts=restarts)
    if getattr(args, "max_iters", None) is not None:
        cfg = cfg.with_(max_iters=args.max_iters)
    return cfg


def _config_echo(cfg: SearchConfig) -> dict:
    return {
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "tolerance": cfg.tolerance,
        "workers": cfg.workers,
    }


def _load(path: str):
    try:
        return load_channel_file(path)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}")
    except (ValueError, KeyError, TypeError) as exc:
        raise CommandError(f"invalid channel file {path}: {exc}")


def _load_component(path: str) -> Channel:
    obj = _load(path)
    if isinstance(obj, ProductChannel):
        raise CommandError(f"{path} holds a product; a component channel is required")
    return obj


def _load_product(path: str) -> ProductChannel:
    obj = _load(path)
    if not isinstance(obj, ProductChannel):
        raise CommandError(f"{path} holds a plain channel; a product file is required")
    return obj


def _as_single(obj) -> Channel:
    return obj.flat if isinstance(obj, ProductChannel) else obj


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report(command: str, cfg_echo: dict, results: dict, checks: list) -> dict:
    return {
        "command": command,
        "config": cfg_echo,
        "results": results,
        "checks": checks,
        "passed": all(c.get("passed", True) for c in checks),
        "converged": bool(results.get("converged", True)),
    }


def _exit_code(report: dict) -> int:
    if not report["passed"]:
        return 1
    if not report["converged"]:
        return 3
    return 0


def _check(name: str, computed: float, tolerance: float, passed: bool, target=None) -> dict:
    entry = {
        "name": name,
        "computed_bits": computed,
        "computed_display": format_bits(computed),
        "tolerance": tolerance,
        "passed": bool(passed),
    }
    if target is not None:
        entry["target_bits"] = target
    return entry


def _parse_directions(path: str | None) -> list[tuple[float, float, float]]:
    if path is None:
        return [tuple(w) for w in DEFAULT_DIRECTIONS]
    out = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                parts = body.replace(",", " ").split()
                if len(parts) != 3:
                    raise CommandError(
                        f"{path}:{line_no}: expected three weights, got {body!r}"
                    )
                w = tuple(float(p) for p in parts)
                if min(w) < 0 or max(w) <= 0:
                    raise CommandError(
                        f"{path}:{line_no}: weights must be nonnegative, not all zero"
                    )
                out.append(w)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}")
    if not out:
        raise CommandError(f"{path}: no directions found")
    return out


def _sweep_csv(rows: list[dict]) -> str:
    lines = ["w0,w1,w2,value,converged"]
    for row in rows:
        w = row["weights"]
        lines.append(
            f"{w[0]!r},{w[1]!r},{w[2]!r},{row['value_bits']!r},{row['converged']}"
        )
    return "\n".join(lines) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_classify(args) -> int:
    chan = _as_single(_load(args.channel))
    cfg = _config(args)
    rep = classify(chan, cfg)
    converged = all(
        v.converged
        for v in (
            rep.y_more_capable,
            rep.z_more_capable,
            rep.y_less_noisy,
            rep.z_less_noisy,
        )
    )
    results = rep.to_dict()
    results["converged"] = converged
    report = _report("classify", _config_echo(cfg), results, [])
    _emit(report, args.out)
    return _exit_code(report)


def _cmd_marton(args) -> int:
    chan = _as_single(_load(args.channel))
    cfg = _config(args)
    res = marton_sum_rate(chan, cfg)
    converged = res.converged
    results = {
        "sum_rate_bits": res.value,
        "sum_rate_display": format_bits(res.value),
        "lambda_star": res.lam_star,
        "scalar_evaluations": res.evaluations,
        "profile": {"nu": res.profile.nu, "nv": res.profile.nv, "nw": res.profile.nw},
    }
    if args.lambda_grid > 0:
        n = args.lambda_grid
        lambdas = [k / n for k in range(n + 1)]
        curve = build_lambda_curve(chan, lambdas, cfg)
        converged = converged and all(s.converged for s in curve.samples)
        results["curve"] = [
            {
                "lambda": s.lam,
                "value_bits": s.value,
                "subgradient": s.subgradient,
                "converged": s.converged,
            }
            for s in curve.samples
        ]
        results["curve_checks"] = {
            "convexity_violations": curve.convexity_violations,
            "hyperplane_violations": curve.hyperplane_violations,
        }
        if args.curve_csv is not None:
            _write_text(args.curve_csv, curve_to_csv(curve))
            results["curve_csv"] = args.curve_csv
    results["converged"] = converged
    report = _report("marton", _config_echo(cfg), results, [])
    _emit(report, args.out)
    return _exit_code(report)


def _cmd_uv(args) -> int:
    chan = _as_single(_load(args.channel))
    cfg = _config(args)
    res = uv_sum_rate(chan, cfg)
    results = {
        "sum_rate_bits": res.value,
        "sum_rate_display": format_bits(res.value),
        "point": res.point.to_dict(),
        "converged": res.converged,
        "budget_exhausted": res.budget_exhausted,
    }
    report = _report("uv", _config_echo(cfg), results, [])
    _emit(report, args.out)
    return _exit_code(report)


def _cmd_product(args) -> int:
    c1 = _load_component(args.component1)
    c2 = _load_component(args.component2)
    if not 0.0 <= args.lam <= 1.0:
        raise CommandError(f"--lambda must lie in [0, 1], got {args.lam}")
    pc = make_product(c1, c2)
    cfg = _config(args)
    results = {
        "nx": pc.flat.nx,
        "ny": pc.flat.ny,
        "nz": pc.flat.nz,
        "saved_to": args.save,
        "converged": True,
    }
    checks = []
    if args.save is not None:
        save_channel_file(args.save, pc)
    if args.check_factorization:
        fac = check_factorization(c1, c2, args.lam, cfg)
        results["factorization"] = fac.to_dict()
        results["converged"] = fac.converged
        checks.append(
            _check(
                "factorization_gap",
                fac.gap,
                fac.tolerance,
                fac.holds,
                target=0.0,
            )
        )
    report = _report("product", _config_echo(cfg), results, checks)
    _emit(report, args.out)
    return _exit_code(report)


def _region_sweep(args, kind: str, mirrored: bool) -> int:
    pc = _load_product(args.product)
    cfg = _config(args)
    directions = _parse_directions(args.directions)
    rows = []
    best = None
    for w in directions:
        res = region_support(
            pc, kind, w, cfg, mirrored=mirrored, fix_r0=args.fix_r0
        )
        rows.append(
            {
                "weights": list(res.weights),
                "value_bits": res.value,
                "value_display": format_bits(res.value),
                "vertex": list(res.vertex),
                "converged": res.converged,
                "budget_exhausted": res.budget_exhausted,
            }
        )
        if best is None or res.value > best.value:
            best = res
    region = build_region(pc, best.aux, kind, mirrored=mirrored)
    results = {
        "kind": kind,
        "mirrored": mirrored,
        "fix_r0": args.fix_r0,
        "sweep": rows,
        "region": {
            "tag": region.tag,
            "inequalities": region.to_json_list(),
            "notes": region.notes,
        },
        "converged": all(r["converged"] for r in rows),
    }
    if args.sweep_csv is not None:
        _write_text(args.sweep_csv, _sweep_csv(rows))
        results["sweep_csv"] = args.sweep_csv
    report = _report(args.command, _config_echo(cfg), results, [])
    _emit(report, args.out)
    return _exit_code(report)


def _cmd_outer(args) -> int:
    return _region_sweep(args, "product_outer", args.mirror)


def _cmd_region(args) -> int:
    return _region_sweep(args, REGION_KIND_FLAGS[args.kind], False)


def _cmd_verify_example(args) -> int:
    rep = verify_separation(seed=args.seed)
    results = rep.to_dict()
    check_dicts = results.pop("checks")
    results.pop("passed")
    results["converged"] = rep.converged
    checks = []
    for entry in check_dicts:
        entry = dict(entry)
        entry["computed_display"] = format_bits(entry["computed_bits"])
        entry["target_display"] = format_bits(entry["target_bits"])
        checks.append(entry)
    report = _report("verify-example", {"seed": args.seed}, results, checks)
    _emit(report, args.out)
    return _exit_code(report)


def _cmd_minmax_check(args) -> int:
    chan = _as_single(_load(args.channel))
    cfg = _config(args)
    try:
        rep = check_min_max_equality(chan, cfg, px_resolution=args.grid_resolution)
    except ValueError as exc:
        raise CommandError(str(exc))
    results = rep.to_dict()
    results["converged"] = rep.converged
    checks = [
        _check(
            "pairwise_gap",
            rep.max_pairwise_gap,
            args.tolerance,
            rep.max_pairwise_gap <= args.tolerance,
            target=0.0,
        )
    ]
    report = _report("minmax-check", _config_echo(cfg), results, checks)
    _emit(report, args.out)
    return _exit_code(report)


def _add_common(sp, budgets: bool = True, default_restarts: int = 16) -> None:
    sp.add_argument("--seed", type=int, default=0, help="rng seed (default 0)")
    sp.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    if budgets:
        sp.add_argument(
            "--restarts",
            type=int,
            default=None,
            help=f"search restarts (default {default_restarts})",
        )
        sp.add_argument("--max-iters", type=int, default=None, help="ascent iteration cap")
        sp.set_defaults(default_restarts=default_restarts)


def _add_sweep_options(sp) -> None:
    sp.add_argument("product", help="product channel JSON file")
    sp.add_argument("--directions", default=None, help="file of weight triples, one per line")
    sp.add_argument("--sweep-csv", default=None, help="write the support sweep as CSV here")
    sp.add_argument("--fix-r0", type=float, default=None, help="pin the common rate during the sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcbounds",
        description="Capacity bounds for two-receiver broadcast channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="receiver comparison report for a channel")
    sp.add_argument("channel", help="channel JSON file")
    _add_common(sp)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("marton", help="weighted-sum-rate minimum and lambda curve")
    sp.add_argument("channel", help="channel JSON file")
    sp.add_argument(
        "--lambda-grid",
        type=int,
        default=10,
        help="number of curve intervals; 0 skips the curve (default 10)",
    )
    sp.add_argument("--curve-csv", default=None, help="write the lambda curve as CSV here")
    _add_common(sp)
    sp.set_defaults(func=_cmd_marton)

    sp = sub.add_parser("uv", help="single-letter two-auxiliary outer sum rate")
    sp.add_argument("channel", help="channel JSON file")
    _add_common(sp)
    sp.set_defaults(func=_cmd_uv)

    sp = sub.add_parser("product", help="combine two channels into a product file")
    sp.add_argument("component1", help="first component channel JSON file")
    sp.add_argument("component2", help="second component channel JSON file")
    sp.add_argument("--save", default=None, help="write the product channel JSON here")
    sp.add_argument(
        "--check-factorization",
        action="store_true",
        help="compare the product sum rate against the component sum",
    )
    sp.add_argument(
        "--lambda", dest="lam", type=float, default=0.5, help="weight for the check"
    )
    _add_common(sp)
    sp.set_defaults(func=_cmd_product)

    sp = sub.add_parser("outer", help="product-form outer bound support sweep")
    _add_sweep_options(sp)
    sp.add_argument(
        "--mirror",
        action="store_true",
        help="swap which component carries each cross term",
    )
    _add_common(sp, default_restarts=8)
    sp.set_defaults(func=_cmd_outer)

    sp = sub.add_parser("region", help="specialized product region support sweep")
    _add_sweep_options(sp)
    sp.add_argument(
        "--kind",
        required=True,
        choices=sorted(REGION_KIND_FLAGS),
        help="which specialized region to sweep",
    )
    _add_common(sp, default_restarts=8)
    sp.set_defaults(func=_cmd_region)

    sp = sub.add_parser(
        "verify-example",
        help="build the separation example and check the headline numbers",
    )
    _add_common(sp, budgets=False)
    sp.set_defaults(func=_cmd_verify_example)

    sp = sub.add_parser("minmax-check", help="three max/min orderings on a tiny channel")
    sp.add_argument("channel", help="channel JSON file")
    sp.add_argument(
        "--grid-resolution",
        type=int,
        default=12,
        help="input-distribution grid resolution (default 12)",
    )
    sp.add_argument(
        "--tolerance", type=float, default=0.02, help="pairwise gap tolerance"
    )
    _add_common(sp)
    sp.set_defaults(func=_cmd_minmax_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        elapsed = time.perf_counter() - start
        print(f"elapsed_seconds={elapsed:.2f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
