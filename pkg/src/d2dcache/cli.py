"""Command-line surface: experiment orchestration and CSV/JSON serialization.

Subcommands:
  sweep     Monte Carlo tradeoff sweep over cluster sizes, one row per (gamma, g_c)
  theory    achievable tradeoff curve (leading terms)
  bounds    outer-bound tradeoff curve (leading terms)
  simulate  single Monte Carlo tradeoff point as JSON
  cachedist dump the optimal caching pmf (columns f, Pr, z, Pc)
  verify    sample TDMA schedule slots and report protocol-model violations

Configuration is a flat key=value file (via --config) with command-line
flags taking precedence. Throughput columns are normalized by the link
rate C.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cachedist import optimal_cache_distribution
from .errors import ConfigurationError, DomainError, NumericalError, PreconditionError
from .geometry import NetworkConfig, build_clusters, reuse_factor, verify_protocol_model
from .harmonic import sample_requests, zipf_pmf
from .simulator import (
    estimate_tradeoff_point,
    realization_rng,
    sample_schedule_slot,
    sweep_cluster_sizes,
)
from .theory import achievable_curve, make_params, outer_bound_curve
from .cachedist import sample_cache_placement

CSV_HEADER = (
    "gamma,m,n,M,delta,K,g_c,p_out_sim,t_min_norm,t_mean_norm,"
    "std_err_p,std_err_t,p_out_theory,t_theory_norm,realizations,seed"
)
CSV_COLUMNS = CSV_HEADER.split(",")

DEFAULTS = {
    "gamma": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
    "m": 1000,
    "n": 10000,
    "M": 1,
    "delta": 0.5,
    "C": 1.0,
    "K": 4,
    "g_c": [4, 16, 25, 100, 400, 625, 2500],
    "realizations": 200,
    "seed": 12345,
    "exclude_self": True,
    "p_min": 0.01,
    "p_max": 1.0,
    "p_steps": 100,
    "slots": 1000,
}


def format_number(v) -> str:
    """Decimal notation with 9 significant digits; integers stay exact."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if not np.isfinite(f):
        return ""
    return np.format_float_positional(f, precision=9, unique=False, fractional=False, trim="-")


def write_csv(rows: list[dict], path: str) -> None:
    """Rows are dicts keyed by CSV_COLUMNS; missing keys serialize empty."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(format_number(row.get(col)) for col in CSV_COLUMNS))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {s!r}")


def _parse_list(s: str, cast) -> list:
    return [cast(tok) for tok in s.split(",") if tok.strip()]


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in cfg:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = _coerce(key, value)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    _validate(cfg)
    return cfg


def _coerce(key: str, value: str):
    if key == "gamma":
        return _parse_list(value, float)
    if key == "g_c":
        return _parse_list(value, int)
    if key in ("m", "n", "M", "K", "realizations", "seed", "p_steps", "slots"):
        return int(value)
    if key in ("delta", "C", "p_min", "p_max"):
        return float(value)
    if key == "exclude_self":
        return _parse_bool(value)
    raise ConfigurationError(f"unknown key {key!r}")


def _validate(cfg: dict) -> None:
    for g in cfg["gamma"]:
        if not 0.0 < g < 1.0:
            raise ConfigurationError(f"gamma: every value must lie in (0, 1), got {g}")
    for name in ("m", "n", "M", "K", "realizations", "p_steps", "slots"):
        if cfg[name] < 1:
            raise ConfigurationError(f"{name}: must be a positive integer, got {cfg[name]}")
    if cfg["delta"] <= 0:
        raise ConfigurationError(f"delta: must be > 0, got {cfg['delta']}")
    if cfg["C"] <= 0:
        raise ConfigurationError(f"C: must be > 0, got {cfg['C']}")
    if not 0.0 <= cfg["p_min"] <= cfg["p_max"] <= 1.0:
        raise ConfigurationError("p_min/p_max: need 0 <= p_min <= p_max <= 1")


def _base_row(cfg: dict, gamma: float) -> dict:
    return {
        "gamma": gamma,
        "m": cfg["m"],
        "n": cfg["n"],
        "M": cfg["M"],
        "delta": cfg["delta"],
        "K": cfg["K"],
    }


def _point_row(cfg: dict, gamma: float, pt) -> dict:
    row = _base_row(cfg, gamma)
    row.update(
        g_c=pt.g_c,
        p_out_sim=pt.p_out,
        t_min_norm=pt.t_min_norm,
        t_mean_norm=pt.t_mean_norm,
        std_err_p=pt.std_err_p,
        std_err_t=pt.std_err_t,
        realizations=pt.realizations,
        seed=pt.seed,
    )
    return row


def _cmd_sweep(cfg: dict) -> int:
    config = NetworkConfig(n=cfg["n"], delta=cfg["delta"], link_rate=cfg["C"], M=cfg["M"])
    rows = []
    for gamma in cfg["gamma"]:
        demand = zipf_pmf(gamma, cfg["m"])
        points = sweep_cluster_sizes(
            config, demand, cfg["g_c"], cfg["realizations"], cfg["seed"],
            K=cfg["K"], exclude_self=cfg["exclude_self"],
        )
        rows.extend(_point_row(cfg, gamma, pt) for pt in points)
    write_csv(rows, cfg["output"])
    print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _p_grid(cfg: dict) -> np.ndarray:
    return np.linspace(cfg["p_min"], cfg["p_max"], cfg["p_steps"])


def _cmd_theory(cfg: dict) -> int:
    rows = []
    for gamma in cfg["gamma"]:
        params = make_params(gamma, cfg["M"], cfg["delta"])
        curve = achievable_curve(params, cfg["C"], cfg["K"], cfg["m"], cfg["n"], _p_grid(cfg))
        for pt in curve:
            if not pt.feasible:
                continue
            row = _base_row(cfg, gamma)
            row.update(p_out_theory=pt.p, t_theory_norm=pt.t / cfg["C"])
            rows.append(row)
    write_csv(rows, cfg["output"])
    print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _cmd_bounds(cfg: dict) -> int:
    rows = []
    for gamma in cfg["gamma"]:
        params = make_params(gamma, cfg["M"], cfg["delta"])
        curve = outer_bound_curve(params, cfg["C"], cfg["m"], cfg["n"], _p_grid(cfg))
        for pt in curve:
            if not pt.feasible:
                continue
            row = _base_row(cfg, gamma)
            row.update(p_out_theory=pt.p, t_theory_norm=pt.t / cfg["C"])
            rows.append(row)
    write_csv(rows, cfg["output"])
    print(f"wrote {len(rows)} rows to {cfg['output']}")
    return 0


def _cmd_simulate(cfg: dict) -> int:
    gamma = cfg["gamma"][0]
    config = NetworkConfig(n=cfg["n"], delta=cfg["delta"], link_rate=cfg["C"], M=cfg["M"])
    layout = build_clusters(cfg["n"], cfg["g_c"][0], K=cfg["K"])
    demand = zipf_pmf(gamma, cfg["m"])
    dist = optimal_cache_distribution(demand, cfg["M"], cfg["g_c"][0])
    pt = estimate_tradeoff_point(
        config, layout, dist, demand, cfg["realizations"], cfg["seed"],
        exclude_self=cfg["exclude_self"],
    )
    row = _point_row(cfg, gamma, pt)
    payload = {col: row.get(col) for col in CSV_COLUMNS}
    text = json.dumps(payload, indent=2)
    if cfg.get("output"):
        with open(cfg["output"], "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


def _cmd_cachedist(cfg: dict) -> int:
    gamma = cfg["gamma"][0]
    demand = zipf_pmf(gamma, cfg["m"])
    g_c = cfg["g_c"][0]
    dist = optimal_cache_distribution(demand, cfg["M"], g_c)
    denom = cfg["M"] * (g_c - 1) - 1
    z = demand.probs ** (1.0 / denom)
    lines = ["f,Pr,z,Pc"]
    for f in range(cfg["m"]):
        lines.append(
            f"{f + 1},{format_number(demand.probs[f])},"
            f"{format_number(z[f])},{format_number(dist.pc[f])}"
        )
    text = "\n".join(lines) + "\n"
    if cfg.get("output"):
        with open(cfg["output"], "w") as fh:
            fh.write(text)
        print(f"wrote caching pmf (m_star={dist.m_star}) to {cfg['output']}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(cfg: dict) -> int:
    gamma = cfg["gamma"][0]
    K = cfg["K"] if cfg.get("K_explicit") else reuse_factor(cfg["delta"])
    layout = build_clusters(cfg["n"], cfg["g_c"][0], K=K)
    demand = zipf_pmf(gamma, cfg["m"])
    dist = optimal_cache_distribution(demand, cfg["M"], cfg["g_c"][0])
    total = 0
    for slot in range(cfg["slots"]):
        rng = realization_rng(cfg["seed"], slot)
        placement = sample_cache_placement(dist, cfg["n"], cfg["M"], rng)
        requests = sample_requests(demand, cfg["n"], rng)
        links = sample_schedule_slot(
            placement, requests, layout, slot % K, rng, exclude_self=cfg["exclude_self"]
        )
        violations = verify_protocol_model(layout, links, cfg["delta"])
        total += len(violations)
        for v in violations[:5]:
            print(
                f"slot {slot}: {v.kind} violation tx={v.tx} rx={v.rx} "
                f"offender={v.offender} d={v.distance:.6f} limit={v.limit:.6f}"
            )
    print(f"{total} violations over {cfg['slots']} slots (K={K}, delta={cfg['delta']})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2dcache", description="Throughput-outage tradeoff toolkit for D2D caching networks"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("sweep", "Monte Carlo sweep over cluster sizes"),
        ("theory", "achievable tradeoff curve"),
        ("bounds", "outer-bound tradeoff curve"),
        ("simulate", "single Monte Carlo point as JSON"),
        ("cachedist", "dump the optimal caching pmf"),
        ("verify", "protocol-model violation check over sampled slots"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--gamma", help="comma-separated Zipf exponents in (0,1)")
        p.add_argument("--m", type=int, help="library size")
        p.add_argument("--n", type=int, help="node count (perfect square)")
        p.add_argument("--M", type=int, help="per-node cache size in files")
        p.add_argument("--delta", type=float, help="interference guard factor")
        p.add_argument("--C", type=float, help="link rate (bits/slot)")
        p.add_argument("--K", type=int, help="TDMA reuse factor (perfect square)")
        p.add_argument("--g-c", dest="g_c", help="comma-separated cluster sizes")
        p.add_argument("--realizations", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--exclude-self", dest="exclude_self", choices=("true", "false"))
        p.add_argument("--p-min", dest="p_min", type=float, help="outage grid start")
        p.add_argument("--p-max", dest="p_max", type=float, help="outage grid end")
        p.add_argument("--p-steps", dest="p_steps", type=int, help="outage grid points")
        p.add_argument("--slots", type=int, help="schedule slots to verify")
        p.add_argument("--output", "-o", help="output file path")
    return parser


_COMMANDS = {
    "sweep": _cmd_sweep,
    "theory": _cmd_theory,
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "cachedist": _cmd_cachedist,
    "verify": _cmd_verify,
}

_NEEDS_OUTPUT = {"sweep", "theory", "bounds"}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    overrides = {
        key: getattr(args, key, None)
        for key in DEFAULTS
        if getattr(args, key, None) is not None
    }
    if overrides.get("gamma") is not None:
        overrides["gamma"] = _parse_list(overrides["gamma"], float)
    if overrides.get("g_c") is not None:
        overrides["g_c"] = _parse_list(overrides["g_c"], int)
    if overrides.get("exclude_self") is not None:
        overrides["exclude_self"] = _parse_bool(overrides["exclude_self"])
    try:
        cfg = load_config(args.config, overrides)
        cfg["output"] = args.output
        cfg["K_explicit"] = args.K is not None
        if args.command in _NEEDS_OUTPUT and not cfg["output"]:
            raise ConfigurationError("output: --output path is required for this subcommand")
        for g in cfg["gamma"]:
            if not 0.0 < g < 1.0:
                raise ConfigurationError(f"gamma: must lie in (0, 1), got {g}")
        return _COMMANDS[args.command](cfg)
    except (ConfigurationError, DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
