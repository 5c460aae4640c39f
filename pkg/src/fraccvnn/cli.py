"""Command-line front end: ``analyze``, ``simulate``, ``scan`` and ``equilibria``.

Each command reads a strict JSON config (unknown keys are rejected before
any computation), writes its outputs atomically and exits with 0 on
success, 1 on a domain error and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from fraccvnn import fde, hub, ring, spectral
from fraccvnn.equilibrium import DEFAULT_MAX_ITER, DEFAULT_TOL, EquilibriumState, find_equilibrium
from fraccvnn.errors import (
    ConvergenceError,
    DegenerateSpectrumError,
    DomainError,
    NonUniformCoefficientsError,
)
from fraccvnn.model import (
    InvalidNetworkError,
    NetworkSpec,
    TopologyTag,
    classify_topology,
    complex_vector_from_json,
)

logger = logging.getLogger("fraccvnn")

EXIT_OK, EXIT_DOMAIN, EXIT_CONFIG = 0, 1, 2

BUNDLED = (
    "ex_hub",
    "ex_ring",
    "fig1_q080",
    "fig1_q087",
    "fig3_ring",
    "fig2_n5",
    "fig2_n100",
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# output formatting


def fmt(x: float) -> str:
    """17 significant digits; round-trips every double."""
    return format(float(x), ".17g")


def dumps17(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps17(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps17(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, complex):
        return dumps17([obj.real, obj.imag], indent, _level)
    return json.dumps(str(obj))


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json")


# ---------------------------------------------------------------------------
# config handling


def load_config(ref: str | None) -> dict:
    if ref is None:
        return {}
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    elif ref in BUNDLED:
        text = resources.files("fraccvnn.data").joinpath(f"{ref}.json").read_text()
    else:
        raise ConfigError(f"config {ref!r} is neither a file nor a bundled name ({', '.join(BUNDLED)})")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def check_keys(cfg: dict, command: str, required: set[str], optional: set[str]) -> None:
    allowed = required | optional | {"command", "description"}
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    missing = sorted(required - set(cfg))
    if missing:
        raise ConfigError(f"missing config keys for {command}: {', '.join(missing)}")
    if "command" in cfg and cfg["command"] != command:
        raise ConfigError(f"config is for {cfg['command']!r}, not {command!r}")


def _number(cfg: dict, key: str, default=None, kind=float):
    if key not in cfg:
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (kind is int and not isinstance(v, int)):
        raise ConfigError(f"{key} must be {'an integer' if kind is int else 'a number'}")
    return kind(v)


def _network(cfg: dict) -> NetworkSpec:
    try:
        return NetworkSpec.from_json(cfg["network"])
    except InvalidNetworkError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad network: {exc}") from exc


def _vector(value, n: int, what: str) -> np.ndarray:
    try:
        v = complex_vector_from_json(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc
    if v.shape != (n,):
        raise ConfigError(f"{what} must have {n} entries")
    return v


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# analyze


ANALYZE_KEYS = {"q", "topology", "equilibrium", "guess", "tol", "max_iter"}


def _analyze_equilibrium(spec: NetworkSpec, cfg: dict) -> EquilibriumState:
    tol = _number(cfg, "tol", DEFAULT_TOL)
    if "equilibrium" in cfg:
        z = _vector(cfg["equilibrium"], spec.n, "equilibrium")
        eq = EquilibriumState.exact(spec, z)
        if eq.residual_norm > max(tol, 1e-10):
            raise ConvergenceError(f"supplied equilibrium has residual {eq.residual_norm:.3e}")
        return eq
    guess = _vector(cfg["guess"], spec.n, "guess") if "guess" in cfg else np.zeros(spec.n, complex)
    eq = find_equilibrium(spec, guess, tol=tol, max_iter=_number(cfg, "max_iter", DEFAULT_MAX_ITER, int))
    if not eq.converged:
        raise ConvergenceError(f"Newton did not converge (residual {eq.residual_norm:.3e})")
    return eq


def cmd_analyze(args, cfg: dict) -> dict:
    check_keys(cfg, "analyze", {"network"}, ANALYZE_KEYS)
    q = args.q if args.q is not None else _number(cfg, "q")
    if q is not None and not 0.0 < q < 1.0:
        raise ConfigError("q must lie in (0, 1)")
    topology = args.topology or cfg.get("topology", "auto")
    if topology not in ("auto", "general", "hub", "ring"):
        raise ConfigError(f"unknown topology {topology!r}")
    spec = _network(cfg)
    spec.require_valid()

    eq = _analyze_equilibrium(spec, cfg)
    jm = spectral.jacobian_m(spec, eq)
    scale = float(np.linalg.norm(jm.M, 1))
    eigs = spectral.eig_complex(jm.M)
    report = spectral.spectrum_report(eigs, scale)
    if report.degenerate:
        raise DegenerateSpectrumError("Jacobian has a zero eigenvalue; the argument test is undefined")

    detected = classify_topology(spec)
    forced = topology != "auto"
    if not forced:
        topology = {TopologyTag.HUB: "hub", TopologyTag.RING: "ring"}.get(detected, "general")

    out: dict[str, Any] = {
        "topology": topology,
        "detected_topology": detected.value,
        "equilibrium": {
            "z": [_pair(z) for z in eq.z],
            "residual": eq.residual_norm,
            "iterations": eq.iterations,
        },
        **report.to_json(),
        "q": q,
        "verdict_at_q": None,
    }
    if q is not None:
        out["verdict_at_q"] = spectral.matignon_report(eigs, q, scale).verdict.value
    try:
        _closed_form(out, topology, spec, eq)
    except NonUniformCoefficientsError as exc:
        if forced:
            raise
        # pattern matched but coefficients are not uniform: the general report stands
        out["topology"] = "general"
        out["closed_form_skipped"] = str(exc)
    return out


def _closed_form(out: dict, topology: str, spec: NetworkSpec, eq: EquilibriumState) -> None:
    if topology == "hub":
        out["hub"] = hub.hub_stability(hub.hub_coefficients(spec, eq)).to_json()
    elif topology == "ring":
        c = ring.ring_coefficients(spec, eq)
        lam = ring.circulant_eigenvalues(c)
        out["ring"] = {
            "alpha": _pair(c.alpha),
            "beta": _pair(c.beta),
            "gamma": _pair(c.gamma),
            "n": c.n,
            "circulant_eigenvalues": [_pair(w) for w in lam],
            "sufficient_stable": ring.ring_sufficient_stable(c),
            "q_star": ring.ring_critical_order(c),
        }


# ---------------------------------------------------------------------------
# simulate


SIMULATE_KEYS = {
    "z0",
    "perturbation",
    "seed",
    "memory_window",
    "form",
    "window_fraction",
    "eps_decay",
    "eps_osc",
}


def cmd_simulate(args, cfg: dict) -> tuple[str, dict]:
    check_keys(cfg, "simulate", {"network", "q", "h", "t_end"}, SIMULATE_KEYS)
    q = args.q if args.q is not None else _number(cfg, "q")
    seed = args.seed if args.seed is not None else _number(cfg, "seed", 0, int)
    scale = _number(cfg, "perturbation", 0.0)
    window = _number(cfg, "memory_window", None, int)
    form = cfg.get("form", "complex")
    if form not in ("complex", "split"):
        raise ConfigError(f"unknown form {form!r}")
    tail = {k: _number(cfg, k, d) for k, d in (("window_fraction", 0.2), ("eps_decay", 1e-3), ("eps_osc", 1e-3))}
    try:
        sim = fde.SimConfig(q, _number(cfg, "h"), _number(cfg, "t_end"), window)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not 0.0 < tail["window_fraction"] < 1.0:
        raise ConfigError("window_fraction must lie in (0, 1)")
    spec = _network(cfg)
    spec.require_valid()
    z0 = _vector(cfg["z0"], spec.n, "z0") if "z0" in cfg else np.zeros(spec.n, complex)
    if scale:
        rng = np.random.default_rng(seed)
        z0 = z0 + scale * (rng.standard_normal(spec.n) + 1j * rng.standard_normal(spec.n))

    traj = fde.abm_simulate(spec, z0, sim, form=form)
    meta: dict[str, Any] = {
        "cfg": {"q": sim.q, "h": sim.h, "t_end": sim.t_end, "memory_window": window, "form": form},
        "seed": seed,
        "perturbation": scale,
        "z0": [_pair(z) for z in z0],
        "steps": len(traj.times) - 1,
        "diverged": traj.diverged,
        "classification": fde.classify_tail(traj, **tail).value,
    }
    if classify_topology(spec) is TopologyTag.RING:
        r = fde.ring_attractor_check(traj, tail["window_fraction"])
        meta["ring_attractor"] = {
            "spread": r.spread,
            "modulus_defect": r.modulus_defect,
            "final_mean": _pair(r.final_mean),
        }
    header = ["t"] + [f"z{k + 1}_{part}" for k in range(spec.n) for part in ("re", "im")]
    parts = traj.states.view(float).reshape(len(traj.times), -1)
    rows = ([t, *row] for t, row in zip(traj.times.tolist(), parts.tolist()))
    return csv_text(header, rows), meta


# ---------------------------------------------------------------------------
# scan


def cmd_scan(args, cfg: dict) -> tuple[str, dict]:
    check_keys(cfg, "scan", set(), {"n", "resolution"})
    n = args.n if args.n is not None else _number(cfg, "n", None, int)
    res = args.resolution if args.resolution is not None else _number(cfg, "resolution", 256, int)
    if n is None:
        raise ConfigError("scan needs n (config key or --n)")
    if n < 3 or res < 16:
        raise ConfigError("scan needs n >= 3 and resolution >= 16")
    grid = ring.density_scan(n, res, threads=args.threads)
    text = csv_text(["theta1", "theta2", "q_star", "stable_all_q"],
                    ((t1, t2, q, int(s)) for t1, t2, q, s in grid.rows()))
    meta = {
        "n": n,
        "resolution": res,
        "theta_min": float(grid.theta[0]),
        "theta_max": float(grid.theta[-1]),
        "cell_width": 2.0 * math.pi / res,
        "rows": res * res,
        "stable_all_q_cells": int(np.count_nonzero(grid.stable_all_q)),
        "degenerate_cells": int(np.count_nonzero(grid.degenerate)),
        "family": "circ(-1, exp(i theta1), 0, ..., 0, exp(i theta2))",
    }
    return text, meta


# ---------------------------------------------------------------------------
# equilibria


def cmd_equilibria(args, cfg: dict) -> tuple[str, dict]:
    check_keys(cfg, "equilibria", {"network"}, {"seeds", "random_seeds", "seed_scale", "tol", "max_iter", "seed"})
    spec = _network(cfg)
    spec.require_valid()
    tol = _number(cfg, "tol", DEFAULT_TOL)
    max_iter = _number(cfg, "max_iter", DEFAULT_MAX_ITER, int)
    seeds = [_vector(s, spec.n, "seed vector") for s in cfg.get("seeds", [])]
    extra = _number(cfg, "random_seeds", 0, int)
    seed = args.seed if args.seed is not None else _number(cfg, "seed", 0, int)
    if extra:
        rng = np.random.default_rng(seed)
        width = _number(cfg, "seed_scale", 1.0)
        for _ in range(extra):
            seeds.append(width * (rng.standard_normal(spec.n) + 1j * rng.standard_normal(spec.n)))
    if not seeds:
        raise ConfigError("equilibria needs seeds or random_seeds")
    header = [f"seed{k + 1}_{p}" for k in range(spec.n) for p in ("re", "im")]
    header += [f"root{k + 1}_{p}" for k in range(spec.n) for p in ("re", "im")]
    header += ["residual", "converged"]
    rows = []
    for s in seeds:
        eq = find_equilibrium(spec, s, tol=tol, max_iter=max_iter)
        rows.append([*s.view(float).tolist(), *eq.z.view(float).tolist(), eq.residual_norm, int(eq.converged)])
    meta = {"seed": seed, "tol": tol, "max_iter": max_iter, "count": len(rows),
            "converged": sum(r[-1] for r in rows)}
    return csv_text(header, rows), meta


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraccvnn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="JSON config path or bundled name")
        p.add_argument("--out", required=out_required, type=Path)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int)

    p = sub.add_parser("analyze", help="stability report of an equilibrium")
    common(p, out_required=False)
    p.add_argument("--q", type=float)
    p.add_argument("--topology", choices=("auto", "general", "hub", "ring"))
    p = sub.add_parser("simulate", help="fractional trajectory to CSV")
    common(p)
    p.add_argument("--q", type=float)
    p = sub.add_parser("scan", help="ring-family critical-order grid to CSV")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--resolution", type=int)
    p = sub.add_parser("equilibria", help="Newton roots from seeds to CSV")
    common(p)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.out is not None and not args.out.resolve().parent.is_dir():
            raise ConfigError(f"output directory {args.out.parent} does not exist")
        cfg = load_config(args.config)
        if args.command == "analyze":
            if args.config is None:
                raise ConfigError("analyze needs --config")
            text = dumps17(cmd_analyze(args, cfg)) + "\n"
            if args.out is None:
                sys.stdout.write(text)
            else:
                atomic_write(args.out, text)
            return EXIT_OK
        if args.command != "scan" and args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        handler = {"simulate": cmd_simulate, "scan": cmd_scan, "equilibria": cmd_equilibria}[args.command]
        text, meta = handler(args, cfg)
        atomic_write(args.out, text)
        atomic_write(sidecar_path(args.out), dumps17(meta) + "\n")
        return EXIT_OK
    except (ConfigError, InvalidNetworkError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
