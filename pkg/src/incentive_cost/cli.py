"""Command-line interface: ``incentive-cost {cost,optimize,phase,simulate,validate}``.

Exit codes: 0 success, 1 internal error or failed check, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import Regime, cost_bounds, large_selection_limit, weak_selection_limit
from .chain import build_transition_matrix, expected_visits, fundamental_matrix
from .cost import expected_cost
from .games import DonationGame, PopulationConfig, PublicGoodsGame, delta
from .montecarlo import SimConfig, simulate_visits
from .phase import N0, analyze, optimize

SCHEMES = ("reward", "punishment")


class UsageError(Exception):
    pass


def fmt(x):
    """10 significant digits (correctly rounded, ties to even)."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.10g}")


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` with ``stop`` included."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty grid {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like lo:hi, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


# ---------------------------------------------------------------------------
# shared argument handling
# ---------------------------------------------------------------------------

def _add_game_args(p, required=True):
    g = p.add_argument_group("game")
    g.add_argument("--game", choices=("dg", "pgg"), required=False, default=None)
    g.add_argument("--b", type=float, help="donation game benefit")
    g.add_argument("--c", type=float, help="cost of cooperation")
    g.add_argument("--r", type=float, help="public goods multiplier")
    g.add_argument("--n", type=int, help="public goods group size")
    p.set_defaults(_game_required=required)


def _add_common(p):
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", "-o", help="write here and add a .manifest.json sidecar")
    p.add_argument("--config", help="key=value file supplying defaults")
    p.add_argument("--threads", type=int, default=1)


def _game_from(args):
    if args.game is None:
        if args._game_required:
            raise UsageError("--game is required")
        return None
    try:
        if args.game == "dg":
            if args.b is None or args.c is None:
                raise UsageError("--game dg needs --b and --c")
            return DonationGame(args.b, args.c)
        if args.r is None or args.n is None or args.c is None:
            raise UsageError("--game pgg needs --r, --n and --c")
        return PublicGoodsGame(args.r, args.n, args.c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _pop_from(args, beta=None):
    try:
        pop = PopulationConfig(args.N, args.beta if beta is None else beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return pop


def _schemes(args):
    return SCHEMES if args.scheme == "both" else (args.scheme,)


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_") and k not in ("func", "output")}


def _pmap(fn, items, threads):
    # order of results follows ``items`` regardless of completion order
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _manifest(args, body: bytes | None = None) -> dict:
    m = {
        "subcommand": args.command,
        "parameters": _params(args),
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    if body is not None:
        m["output_sha256"] = hashlib.sha256(body).hexdigest()
    return m


def _emit(args, rows: list[dict] | None = None, payload: dict | None = None, default_format="json"):
    fmt_ = args.format or default_format
    if payload is not None and fmt_ == "csv":
        rows = [{k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
    if fmt_ == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else (f"{v:.10g}" if isinstance(v, float) else v)
                             for k, v in row.items()})
        text = buf.getvalue()
    else:
        doc = dict(payload) if payload is not None else {"rows": rows}
        doc["manifest"] = _manifest(args)
        text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        body = text.encode("utf-8")
        Path(args.output).write_bytes(body)
        sidecar = Path(str(args.output) + ".manifest.json")
        sidecar.write_text(json.dumps(_manifest(args, body), indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cost(args) -> int:
    game = _game_from(args)
    schemes = _schemes(args)
    if args.sweep == "beta":
        if args.theta_value is None:
            raise UsageError("--sweep beta needs a single --theta value")
        lo, hi = parse_range(args.log10)
        betas = 10 ** np.linspace(lo, hi, args.points)
        theta = args.theta_value
        d = delta(game, args.N)
        regime = Regime.BELOW if theta + d < 0 else Regime.ABOVE if theta + d > 0 else Regime.NEUTRAL

        def row(beta):
            pop = _pop_from(args, beta)
            r = {"beta": fmt(beta)}
            for s in schemes:
                r[f"E_{s}"] = fmt(expected_cost(game, pop, s, theta))
            r["weak_limit"] = fmt(weak_selection_limit(args.N, theta))
            for s in schemes:
                r[f"strong_limit_{s}"] = fmt(large_selection_limit(args.N, theta, s, regime))
            return r

        rows = _pmap(row, betas, args.threads)
    else:
        thetas = parse_grid(args.theta)
        pop = _pop_from(args)
        pop.check_game(game)

        def row(theta):
            r = {"theta": fmt(theta)}
            for s in schemes:
                r[f"E_{s}"] = fmt(expected_cost(game, pop, s, theta))
            lo, hi = cost_bounds(args.N, theta) if theta > 0 and args.N >= 3 else (None, None)
            r["lower_bound"], r["upper_bound"] = fmt(lo), fmt(hi)
            r["weak_limit"] = fmt(weak_selection_limit(args.N, theta))
            return r

        rows = _pmap(row, thetas, args.threads)
    _emit(args, rows=rows, default_format="csv")
    return 0


def _result_dict(res) -> dict:
    return {
        "theta_star": fmt(res.theta_star),
        "cost_star": fmt(res.cost_star),
        "branch": res.branch.value,
        "theta0": fmt(res.theta0),
        "beta_star": fmt(res.beta_star),
        "u2": fmt(res.u2),
        "theta2": fmt(res.theta2),
        "cost_theta0": fmt(res.cost_theta0),
        "cost_theta2": fmt(res.cost_theta2),
        "heuristic": res.heuristic,
        "warnings": list(res.warnings),
    }


def cmd_optimize(args) -> int:
    game = _game_from(args)
    pop = _pop_from(args)
    if pop.beta <= 0:
        raise UsageError("--beta must be > 0 for optimize")
    try:
        pop.check_game(game)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.sweep == "omega":
        omegas = parse_grid(args.omega_grid)
        if omegas[0] <= 0 or omegas[-1] >= 1:
            raise UsageError("omega grid must lie inside (0, 1)")

        def row(omega):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                r = optimize(game, pop, args.scheme, float(omega))
            d = _result_dict(r)
            d.pop("warnings")
            return {"omega": fmt(omega), **d}

        _emit(args, rows=_pmap(row, omegas, args.threads), default_format="csv")
        return 0
    if args.omega is None:
        raise UsageError("--omega is required (or use --sweep omega)")
    if not 0 < args.omega < 1:
        raise UsageError(f"--omega must lie in (0, 1), got {args.omega}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = optimize(game, pop, args.scheme, args.omega)
    _emit(args, payload={"scheme": args.scheme, "omega": args.omega, **_result_dict(res)})
    return 0


def cmd_phase(args) -> int:
    if args.N < 3:
        raise UsageError("--N must be >= 3 for phase analysis")
    game = _game_from(args)
    # F* and the P roots do not depend on the game; beta* does
    ref_game = game if game is not None else DonationGame(2, 1)
    out = []
    for s in _schemes(args):
        a = analyze(ref_game, args.N, s)
        out.append({
            "scheme": s,
            "N": args.N,
            "F_star": fmt(a.F_star),
            "u_star": fmt(a.u_star),
            "beta_star": fmt(a.beta_star) if game is not None else None,
            "P_roots": [fmt(r) for r in a.P_roots],
            "derived": s == "punishment",
            "heuristic": a.heuristic,
        })
    payload = out[0] if len(out) == 1 else {"results": out}
    _emit(args, payload=payload)
    return 0


def cmd_simulate(args) -> int:
    game = _game_from(args)
    pop = _pop_from(args)
    if args.runs < 1:
        raise UsageError(f"--runs must be >= 1, got {args.runs}")
    try:
        cfg = SimConfig(game, pop, args.scheme, args.theta_value, args.runs, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    est = simulate_visits(cfg, workers=args.threads)
    nmat = fundamental_matrix(build_transition_matrix(game, pop, args.theta_value))
    visits = np.array([expected_visits(nmat, i) for i in range(1, pop.N)])
    cost = expected_cost(game, pop, args.scheme, args.theta_value)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_visits = np.where(est.se_visits > 0, np.abs(est.mean_visits - visits) / est.se_visits, 0.0)
    z_cost = abs(est.mean_total_cost - cost) / est.se_total_cost if est.se_total_cost > 0 else 0.0
    within = bool(np.all(z_visits <= 3) and z_cost <= 3 and est.truncated_runs == 0)
    payload = {
        "runs": est.runs,
        "seed": args.seed,
        "mean_visits": [fmt(v) for v in est.mean_visits],
        "se_visits": [fmt(v) for v in est.se_visits],
        "mean_total_cost": fmt(est.mean_total_cost),
        "se_total_cost": fmt(est.se_total_cost),
        "truncated_runs": est.truncated_runs,
        "matrix_visits": [fmt(v) for v in visits],
        "matrix_total_cost": fmt(cost),
        "max_z_visits": fmt(float(z_visits.max())),
        "z_total_cost": fmt(z_cost),
        "within_3_se": within,
    }
    _emit(args, payload=payload)
    return 1 if args.check and not within else 0


def cmd_validate(args) -> int:
    from .validation import run_all

    results = run_all(skip_montecarlo=args.skip_montecarlo)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incentive-cost", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cost", allow_abbrev=False, help="expected cost on a theta grid or beta sweep")
    _add_game_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--scheme", choices=SCHEMES + ("both",), default="both")
    p.add_argument("--theta", default="0:5:0.01",
                   help="start:stop:step grid, or a single value with --sweep beta")
    p.add_argument("--sweep", choices=("theta", "beta"), default="theta")
    p.add_argument("--log10", default="-6:3", help="log10(beta) range for --sweep beta")
    p.add_argument("--points", type=int, default=91)
    _add_common(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("optimize", allow_abbrev=False, help="optimal incentive for a cooperation target")
    _add_game_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="reward")
    p.add_argument("--omega", type=float)
    p.add_argument("--sweep", choices=("omega",))
    p.add_argument("--omega-grid", default="0.01:0.99:0.01")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("phase", allow_abbrev=False, help="F*, u*, beta* and the roots of P")
    _add_game_args(p, required=False)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--scheme", choices=SCHEMES + ("both",), default="reward")
    _add_common(p)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("simulate", allow_abbrev=False, help="Monte Carlo estimate compared with the matrix values")
    _add_game_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="reward")
    p.add_argument("--theta", dest="theta_value", type=float, required=True)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true", help="exit 1 unless all estimates are within 3 SE")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", allow_abbrev=False, help="run the acceptance checks")
    p.add_argument("--skip-montecarlo", action="store_true")
    p.set_defaults(func=cmd_validate)
    parser.subcommands = sub.choices
    return parser


_FLOAT_KEYS = {"b", "c", "r", "beta", "omega", "theta_value"}
_INT_KEYS = {"n", "N", "points", "runs", "seed", "threads"}


def _coerce(key, value):
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    return value


def _parse(parser, argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = {k: _coerce(k, v) for k, v in read_config(known.config).items()}
        command = next((a for a in argv if a in parser.subcommands), None)
        if command is not None:
            sub = parser.subcommands[command]
            # config values become defaults; explicit flags still win
            for action in sub._actions:  # noqa: SLF001
                if action.dest in cfg:
                    action.required = False
            sub.set_defaults(**cfg)
    args = parser.parse_args(argv)
    if args.command == "cost" and args.sweep == "beta":
        try:
            args.theta_value = float(args.theta)
        except ValueError:
            raise UsageError("--sweep beta needs a single --theta value") from None
    elif args.command == "cost":
        args.theta_value = None
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        return args.func(args)
    except (UsageError, FileNotFoundError) as exc:
        print(f"incentive-cost: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"incentive-cost: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
