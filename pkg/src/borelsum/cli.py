"""Batch driver: parse configuration, run the pipelines, emit CSV/JSON.

Subcommands
-----------
borel-sum    classical (eps = 0) Borel summation of a system spec along one
             direction; writes sum.csv and manifest.json.
unfold-solve fixed-point solve of the convolution equation for given
             sqrt(eps); writes per-offset line CSVs, a point cloud of y(x)
             samples, and a manifest with contraction diagnostics.
confluence   table of |y(x, nu*s0) - y(x, 0)| for a decreasing nu sequence.
normalize    Riccati reduction + fundamental-solution assembly for a linear
             system; writes a residual report.
selftest     runs the acceptance suite and prints a pass/fail table.

Configuration comes from a single JSON file (--config) plus flag overrides;
flags win.  Exit codes: 0 ok, 2 config error, 3 domain/spectrum error,
4 convergence error, 5 acceptance failure.  Identical config + seed gives
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from .applications import (LinearSystemSpec, assemble_T, center_manifold_eval,
                           confluence_table, normalization_residual,
                           ode_residual, riccati_reduce, strip_margin)
from .errors import ConfigError, ConvergenceError, DomainError
from .geometry import SqrtEps, inverse_time, strip_width
from .series import SystemSpec
from .solver import export_solution, solve_fixed_point

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4
EXIT_ACCEPTANCE = 5


@dataclass
class RunConfig:
    command: str = ""
    spec: str | None = None
    sqrt_eps: complex = 0.0 + 0.0j
    alpha_lo: float = math.pi
    alpha_hi: float | None = None
    eta: float = 0.1
    rho: float = 0.2
    lam: float = 0.2
    dirs: int = 1
    side: str = "+"
    half_width: float | None = None
    nodes: int = 1025
    tol: float = 1e-10
    max_iter: int = 200
    out: str = "out"
    seed: int = 0
    linear: dict | None = None
    nu_list: list = field(default_factory=list)

    def alphas(self):
        hi = self.alpha_lo if self.alpha_hi is None else self.alpha_hi
        if self.dirs <= 1:
            return [0.5 * (self.alpha_lo + hi)]
        return list(np.linspace(self.alpha_lo, hi, self.dirs))


_FLOAT_KEYS = ("alpha_lo", "alpha_hi", "eta", "rho", "lam", "half_width",
               "tol")
_INT_KEYS = ("dirs", "nodes", "max_iter", "seed")


def _parse_sqrt_eps(text) -> complex:
    if isinstance(text, (list, tuple)):
        re, im = text
        return complex(float(re), float(im))
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError("--sqrt-eps expects RE,IM")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise ConfigError(f"bad --sqrt-eps value: {e}") from e


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    data = {}
    if args.config is not None:
        try:
            with open(args.config) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed config JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
    for key, val in data.items():
        if key == "sqrt_eps":
            cfg.sqrt_eps = _parse_sqrt_eps(val)
        elif key in _FLOAT_KEYS:
            setattr(cfg, key, None if val is None else float(val))
        elif key in _INT_KEYS:
            setattr(cfg, key, int(val))
        elif key in ("spec", "side", "out", "linear", "nu_list"):
            setattr(cfg, key, val)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    # flags win over the config file
    for key in _FLOAT_KEYS + _INT_KEYS + ("spec", "out"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "sqrt_eps", None) is not None:
        cfg.sqrt_eps = _parse_sqrt_eps(args.sqrt_eps)
    if cfg.side not in ("+", "-"):
        raise ConfigError("side must be '+' or '-'")
    if cfg.nodes < 9 or cfg.nodes % 2 == 0:
        raise ConfigError("nodes must be odd and at least 9")
    if cfg.tol <= 0 or cfg.max_iter < 1 or cfg.dirs < 1:
        raise ConfigError("tol, max_iter, dirs must be positive")
    return cfg


def _load_spec(cfg: RunConfig) -> SystemSpec:
    if cfg.spec is None:
        raise ConfigError("a system spec path is required (config key 'spec')")
    return SystemSpec.load(cfg.spec)


# ---------------------------------------------------------------------------
# output helpers


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _write_csv(path: str, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                             for v in row) + "\n")


def _config_echo(cfg: RunConfig) -> dict:
    d = {k: getattr(cfg, k) for k in ("command", "spec", "alpha_lo",
                                      "alpha_hi", "eta", "rho", "lam", "dirs",
                                      "side", "half_width", "nodes", "tol",
                                      "max_iter", "seed")}
    d["sqrt_eps"] = [cfg.sqrt_eps.real, cfg.sqrt_eps.imag]
    return d


def _write_manifest(cfg: RunConfig, outputs, diagnostics) -> str:
    manifest = {
        "config": _config_echo(cfg),
        "outputs": [{"file": os.path.basename(p), "sha256": _sha256(p)}
                    for p in outputs],
        "diagnostics": diagnostics,
    }
    path = os.path.join(cfg.out, "manifest.json")
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return path


# ---------------------------------------------------------------------------
# subcommands


def cmd_borel_sum(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    if cfg.sqrt_eps != 0:
        raise ConfigError("borel-sum is the eps = 0 pipeline; "
                          "use unfold-solve for nonzero sqrt(eps)")
    s = SqrtEps(0.0)
    alpha = cfg.alphas()[0]
    sol = solve_fixed_point(spec, s, alpha, cfg.side, cfg.lam,
                            half_width=cfg.half_width, n=cfg.nodes,
                            tol=cfg.tol, max_iter=cfg.max_iter)
    os.makedirs(cfg.out, exist_ok=True)

    def y_eval(x):
        return np.asarray(center_manifold_eval([sol], x)).ravel()

    ea = cmath.exp(1j * alpha)
    rows = []
    worst = 0.0
    for mod in np.linspace(cfg.rho / 20.0, cfg.rho, 20):
        x = mod * ea
        y = y_eval(x)
        res = ode_residual(spec, y_eval, x, s, min(1e-3, mod / 20.0),
                           direction=alpha)
        worst = max(worst, res)
        rows.append([x.real, x.imag] + [v for yi in y
                                        for v in (yi.real, yi.imag)]
                    + [float(res)])
    header = ["re_x", "im_x"]
    for i in range(spec.dim):
        header += [f"re_y{i}", f"im_y{i}"]
    header.append("residual")
    csv_path = os.path.join(cfg.out, "sum.csv")
    _write_csv(csv_path, header, rows)
    diag = {"iterations": sol.info["iterations"],
            "contraction_rate": sol.info["contraction_rate"],
            "max_residual": worst}
    _write_manifest(cfg, [csv_path], diag)
    print(f"borel-sum: wrote {csv_path}; max residual {worst:.3e}")
    return EXIT_OK


def cmd_unfold(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    s = SqrtEps(cfg.sqrt_eps)
    os.makedirs(cfg.out, exist_ok=True)
    sides = ("+", "-") if s.is_zero else (cfg.side,)
    outputs = []
    diag = {"directions": []}
    sols = []
    for i, alpha in enumerate(cfg.alphas()):
        for side in sides:
            sol = solve_fixed_point(spec, s, alpha, side, cfg.lam,
                                    half_width=cfg.half_width, n=cfg.nodes,
                                    tol=cfg.tol, max_iter=cfg.max_iter)
            sols.append(sol)
            tag = f"dir{i:02d}_{'plus' if side == '+' else 'minus'}"
            export_solution(sol, cfg.out, tag=tag)
            for kap in sol.strip.offsets:
                name = (f"{tag}_offset_{kap:+.2f}.csv"
                        .replace("+", "p").replace("-", "m"))
                outputs.append(os.path.join(cfg.out, name))
            outputs.append(os.path.join(cfg.out, f"{tag}_manifest.json"))
            diag["directions"].append(
                {"alpha": alpha, "side": side,
                 "iterations": sol.info["iterations"],
                 "contraction_rate": sol.info["contraction_rate"],
                 "relative_diff": sol.info["relative_diff"]})
    # y(x) samples over a point cloud of the common domain
    rows = []
    for sol in sols:
        W = strip_width(sol.alpha, s) if not s.is_zero else None
        ea = cmath.exp(-1j * sol.alpha)
        if W is None:
            radii = np.linspace(cfg.lam + 0.5, cfg.lam + 8.0, 12)
        else:
            radii = np.linspace(cfg.lam + 0.1 * W, W - cfg.lam - 0.1 * W, 12)
        for r in radii:
            p = inverse_time(float(r) * ea, s)
            if not s.is_zero and strip_margin(sol, p) <= 0:
                continue
            try:
                y = np.asarray(center_manifold_eval([sol], p)).ravel()
            except DomainError:
                continue
            rows.append([sol.alpha, p.x.real, p.x.imag]
                        + [v for yi in y for v in (yi.real, yi.imag)])
    header = ["alpha", "re_x", "im_x"]
    for i in range(spec.dim):
        header += [f"re_y{i}", f"im_y{i}"]
    cloud_path = os.path.join(cfg.out, "cloud.csv")
    _write_csv(cloud_path, header, rows)
    outputs.append(cloud_path)
    _write_manifest(cfg, outputs, diag)
    print(f"unfold-solve: {len(sols)} solution(s), "
          f"{len(rows)} cloud point(s) in {cfg.out}")
    return EXIT_OK


def cmd_confluence(cfg: RunConfig) -> int:
    spec = _load_spec(cfg)
    s0 = cfg.sqrt_eps
    if s0 == 0:
        raise ConfigError("confluence needs a nonzero sqrt_eps direction s0")
    alpha = cfg.alphas()[0]
    nus = [float(v) for v in cfg.nu_list] or [2.0 ** -j for j in range(7)]
    ea = cmath.exp(1j * alpha)
    xs = [mod * ea for mod in np.linspace(cfg.rho, 2.0 * cfg.rho, 10)]
    os.makedirs(cfg.out, exist_ok=True)
    csv_path = os.path.join(cfg.out, "confluence.csv")
    rows = confluence_table(spec, s0, nus, xs, alpha, cfg.lam, side=cfg.side,
                            half_width=cfg.half_width, n=cfg.nodes,
                            tol=cfg.tol, csv_path=csv_path)
    maxd = {}
    for nu, _x, d, sk in rows:
        if not sk:
            maxd[nu] = max(maxd.get(nu, 0.0), d)
    seq = [maxd.get(nu, math.inf) for nu in nus]
    mono = all(b < a for a, b in zip(seq, seq[1:]))
    diag = {"nu": nus, "max_diff": seq, "monotone": mono}
    _write_manifest(cfg, [csv_path], diag)
    print(f"confluence: wrote {csv_path}; monotone={mono}, "
          f"final max diff {seq[-1]:.3e}")
    return EXIT_OK


def cmd_normalize(cfg: RunConfig) -> int:
    if not cfg.linear:
        raise ConfigError("normalize needs config key 'linear' with "
                          "lam0, lam1, R")
    try:
        lam0 = [complex(v[0], v[1]) for v in cfg.linear["lam0"]]
        lam1 = [complex(v[0], v[1]) for v in cfg.linear["lam1"]]
        R = np.array([[complex(v[0], v[1]) for v in row]
                      for row in cfg.linear["R"]])
    except (KeyError, TypeError, IndexError) as e:
        raise ConfigError(f"bad 'linear' block: {e}") from e
    lin = LinearSystemSpec(n=len(lam0), lam0=lam0, lam1=lam1, R=R)
    spec = riccati_reduce(lin)
    s = SqrtEps(cfg.sqrt_eps)
    alpha = cfg.alphas()[0]
    sol = solve_fixed_point(spec, s, alpha, cfg.side, cfg.lam,
                            half_width=cfg.half_width, n=cfg.nodes,
                            tol=cfg.tol, max_iter=cfg.max_iter)

    def U_eval(x):
        return np.asarray(center_manifold_eval([sol], x)).ravel()

    def T_eval(x):
        return assemble_T(lin, U_eval, s, x, alpha)

    ea = cmath.exp(1j * alpha)
    per_x = []
    for mod in np.linspace(cfg.rho, 1.44 * cfg.rho, 10):
        x = mod * ea
        res = normalization_residual(lin, T_eval, x, s, 1e-4, direction=alpha)
        per_x.append({"x": [x.real, x.imag], "residual": float(res)})
    anchor = float(np.max(np.abs(T_eval(s.s) - np.eye(lin.n))))
    report = {
        "gauge": "T(sqrt_eps) = I",
        "path": {"alpha": alpha,
                 "kind": "straight ray in the time coordinate"},
        "anchor_deviation": anchor,
        "residuals": per_x,
        "max_residual": max(p["residual"] for p in per_x),
        "solver": {"iterations": sol.info["iterations"],
                   "contraction_rate": sol.info["contraction_rate"]},
    }
    os.makedirs(cfg.out, exist_ok=True)
    rpath = os.path.join(cfg.out, "normalize_report.json")
    with open(rpath, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    _write_manifest(cfg, [rpath], {"max_residual": report["max_residual"]})
    print(f"normalize: wrote {rpath}; max residual "
          f"{report['max_residual']:.3e}")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    lines = []

    def sink(msg):
        lines.append(msg)
        print(msg)

    ok = acceptance.run_all(sink)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        tpath = os.path.join(cfg.out, "selftest.txt")
        with open(tpath, "w") as f:
            f.write("\n".join(lines) + "\n")
        _write_manifest(cfg, [tpath], {"passed": ok})
    return EXIT_OK if ok else EXIT_ACCEPTANCE


COMMANDS = {
    "borel-sum": cmd_borel_sum,
    "unfold-solve": cmd_unfold,
    "confluence": cmd_confluence,
    "normalize": cmd_normalize,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="borelsum",
        description="Unfolded Borel-Laplace summation pipelines")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--spec", help="system spec JSON path")
        p.add_argument("--sqrt-eps", dest="sqrt_eps", metavar="RE,IM")
        p.add_argument("--alpha-lo", dest="alpha_lo", type=float)
        p.add_argument("--alpha-hi", dest="alpha_hi", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--dirs", type=int)
        p.add_argument("--half-width", dest="half_width", type=float)
        p.add_argument("--nodes", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"convergence error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
