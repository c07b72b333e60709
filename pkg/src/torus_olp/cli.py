"""``torus-olp``: command-line front end.

Every command writes JSON (or CSV for ``--format csv`` and ``--plot-data``)
to ``--out`` or stdout.  Failures print ``{"error": {...}}`` on stderr and exit
with status 1.  ``TORUS_OLP_THREADS`` caps BLAS threads; it has to be read
before numpy is imported, hence the order of the imports below.
"""

from __future__ import annotations

import os

_threads = os.environ.get("TORUS_OLP_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import json  # noqa: E402
import math  # noqa: E402
import sys  # noqa: E402
from dataclasses import dataclass, field  # noqa: E402
from pathlib import Path  # noqa: E402

import numpy as np  # noqa: E402

from . import acceptance, darboux, gaussborel, laurent, longilex, measure, moments, opbasis, toda  # noqa: E402
from .laurent import LaurentPolynomial  # noqa: E402

# ---------------------------------------------------------------- serialization


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 1, _level: int = 0) -> str:
    """JSON with every float at 17 significant digits and sorted keys."""
    pad = "\n" + " " * (indent * (_level + 1))
    end = "\n" + " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.generic,)):
        obj = obj.item()
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.generic)) and not isinstance(v, complex) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(dumps(v, indent, _level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cmatrix(M) -> dict:
    M = np.asarray(M)
    return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}


# ---------------------------------------------------------------- configuration


@dataclass
class RunConfig:
    D: int = 2
    K: int = 4
    weight: str | None = None
    preset: str | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None

    def validate(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.D < 1:
            raise ValueError("D must be at least 1")
        for name, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ValueError(f"tolerance {name!r} must be positive")
        return self


def _config(args) -> RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
    cfg = RunConfig(**{k: v for k, v in base.items() if k in RunConfig.__dataclass_fields__})
    for name in ("D", "K", "weight", "preset", "seed", "output"):
        v = getattr(args, name if name != "output" else "out", None)
        if v is not None:
            setattr(cfg, name, v)
    cfg.validate()
    if "singular_rtol" in cfg.tolerances:
        gaussborel.SINGULAR_RTOL = float(cfg.tolerances["singular_rtol"])
    if "poised_tol" in cfg.tolerances:
        darboux.POISED_TOL = float(cfg.tolerances["poised_tol"])
    return cfg


def _read_json_arg(text: str):
    """Inline JSON or a path to a JSON file."""
    text = text.strip()
    if text.startswith(("{", "[")):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _poly_arg(text: str, D: int | None = None) -> LaurentPolynomial:
    text = text.strip()
    if text.startswith("{") or text.endswith(".json"):
        return LaurentPolynomial.from_json(_read_json_arg(text))
    return laurent.parse_poly(text, D)


def _oracle(cfg: RunConfig) -> measure.FourierOracle:
    if cfg.weight:
        return measure.oracle_from_json(_read_json_arg(cfg.weight), cfg.D, cfg.K)
    return acceptance.preset_oracle(cfg.preset or "haar", cfg.D)


def _points(text: str, D: int) -> np.ndarray:
    """``"z1,z2;z1,z2"`` with Python complex literals, e.g. ``"0.9+0.1j,1j"``."""
    pts = [[complex(c.strip()) for c in p.split(",")] for p in text.split(";") if p.strip()]
    arr = np.array(pts, dtype=complex)
    if arr.ndim != 2 or arr.shape[1] != D:
        raise ValueError(f"each point needs {D} coordinates")
    return arr


def _curve(D: int, samples: int, direction=None) -> tuple:
    t = 2 * np.pi * np.arange(samples) / samples
    d = np.ones(D) if direction is None else np.asarray(direction, dtype=float)
    return t, np.exp(1j * t[:, None] * d[None, :])


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(_fmt(float(v)) if not isinstance(v, (int, np.integer)) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def _emit(text: str, cfg: RunConfig, name: str, suffix: str = "json"):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        out = Path(cfg.output)
        if out.is_dir() or cfg.output.endswith(os.sep):
            out.mkdir(parents=True, exist_ok=True)
            out = out / f"{name}.{suffix}"
        out.write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_basis(args, cfg) -> int:
    b = longilex.LongilexBasis(cfg.D, cfg.K - 1)
    shells = [{"k": k, "size": b.shell_len(k), "exponents": [list(a) for a in b.shells[k]]} for k in range(b.K + 1)]
    _emit(dumps({"D": cfg.D, "level": cfg.K, "dimension": b.size, "shells": shells}), cfg, "basis")
    return 0


def cmd_moments(args, cfg) -> int:
    G = moments.moment_matrix(_oracle(cfg), cfg.K)
    if args.format == "csv":
        _emit(G.to_csv(), cfg, "moments", "csv")
    else:
        payload = G.to_json()
        payload["hermitian_residual"] = moments.hermitian_residual(G)
        payload["leading_minors"] = moments.leading_minor_report(G)
        _emit(dumps(payload), cfg, "moments")
    return 0


def cmd_factorize(args, cfg) -> int:
    G = moments.moment_matrix(_oracle(cfg), cfg.K)
    f = gaussborel.factorize(G, rtol=gaussborel.SINGULAR_RTOL)
    payload = f.to_json(full=args.full)
    payload["reconstruction_residual"] = float(np.abs(f.reconstruct() - G.data).max())
    _emit(dumps(payload), cfg, "factorize")
    return 0


def cmd_eval(args, cfg) -> int:
    f = gaussborel.factorize(moments.moment_matrix(_oracle(cfg), cfg.K))
    b = f.basis
    labels = ["".join(f"{e:+d}" for e in a) for a in b.indices]
    if args.plot_data:
        t, z = _curve(cfg.D, args.samples, args.direction)
        vals = opbasis.eval_all(f, z, hat=args.hat)
        header = ["t"] + [f"{p}_{lab}" for lab in labels for p in ("re", "im")]
        rows = [[ti] + [x for v in row for x in (v.real, v.imag)] for ti, row in zip(t, vals)]
        _emit(_csv(header, rows), cfg, "eval", "csv")
        return 0
    z = _points(args.z, cfg.D)
    vals = opbasis.eval_all(f, z, hat=args.hat)
    out = [{"z": _cmatrix(p), "values": _cmatrix(v)} for p, v in zip(z, vals)]
    _emit(dumps({"family": "hat" if args.hat else "plain", "indices": [list(a) for a in b.indices], "points": out}), cfg, "eval")
    return 0


def cmd_kernel(args, cfg) -> int:
    G = moments.moment_matrix(_oracle(cfg), cfg.K)
    f = gaussborel.factorize(G)
    level = cfg.K if args.k is None else args.k
    if args.plot_data:
        t, z = _curve(cfg.D, args.samples, args.direction)
        z1 = z[0] if args.z1 is None else _points(args.z1, cfg.D)[0]
        rows = []
        for ti, p in zip(t, z):
            v = opbasis.cd_kernel(f, level, z1, p)
            rows.append([ti, v.real, v.imag])
        _emit(_csv(["t", "re", "im"], rows), cfg, "kernel", "csv")
        return 0
    z1 = _points(args.z1, cfg.D)[0]
    z2 = _points(args.z2, cfg.D)[0]
    payload = {
        "level": level,
        "value": opbasis.cd_kernel(f, level, z1, z2),
        "abc_residual": opbasis.abc_check(f, G, level, z1, z2),
        "symmetry_residual": opbasis.kernel_symmetry_check(f, level, z1, z2),
    }
    _emit(dumps(payload), cfg, "kernel")
    return 0


def cmd_nice(args, cfg) -> int:
    L = _poly_arg(args.poly)
    report = laurent.is_nice(L).to_json()
    report["oracle_agrees"] = laurent.nicety_oracle(L) == report["nice"]
    _emit(dumps(report), cfg, "nice")
    return 0


def cmd_darboux(args, cfg) -> int:
    if args.poly:
        L = _poly_arg(args.poly, cfg.D)
    elif cfg.preset in ("worked-example", "paper-3.5") or (cfg.preset is None and not cfg.weight):
        L = acceptance.worked_example_weight(cfg.D)
    else:
        raise ValueError("darboux needs --poly unless the worked-example preset is used")
    darboux.nicety_guard(L)
    base = measure.oracle_from_json(_read_json_arg(cfg.weight), L.D, cfg.K) if cfg.weight else measure.haar_oracle(L.D)
    k, m = args.k, L.longitude()
    level = max(cfg.K, k + m + 1)
    f = gaussborel.factorize(moments.moment_matrix(base, level))
    if args.nodes:
        nodes = darboux.validate_nodes(L, f, darboux.NodeSet.from_json(_read_json_arg(args.nodes)), k)
    else:
        nodes = darboux.sample_nodes(L, f, k, seed=cfg.seed)
    coeffs, remainder = darboux.christoffel_coefficients(f, L, nodes, k)
    b = f.basis
    payload = {
        "k": k,
        "longitude": m,
        "seed": cfg.seed,
        "rows": [list(a) for a in b.shells[k]],
        "columns": [list(a) for a in b.indices[: b.N(k)]],
        "coefficients": _cmatrix(coeffs),
        "division_remainder": remainder,
        "nodes": nodes.to_json(),
        "poisedness": darboux.poisedness(darboux.sample_matrices(f, nodes, k, m)[0]),
        "quasi_tau": _cmatrix(darboux.transformed_quasitau(f, L, nodes, k)),
    }
    _emit(dumps(payload), cfg, "darboux")
    return 0


def _times_arg(text: str | None) -> dict:
    if not text:
        return {}
    data = _read_json_arg(text)
    items = data.get("times", data) if isinstance(data, dict) else data
    out: dict = {}
    for t in items:
        a = tuple(int(x) for x in t["alpha"])
        out[a] = out.get(a, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
    return out


def cmd_toda(args, cfg) -> int:
    base = _oracle(cfg)
    basis = longilex.LongilexBasis(base.D, cfg.K - 1)
    D = base.D
    axes = [a for i in range(1, D + 1) for a in (i, -i)]
    report: dict = {"check": args.check}
    if args.check in ("first", "toda", "lax", "zs", "gd", "wave"):
        flow = toda.ContinuousFlow(base, basis, _times_arg(args.times))
        h = args.h
        if args.check == "first":
            report["residuals"] = {
                f"a{a}_k{k}_{key}": v
                for a in axes
                for k in range(basis.K)
                for key, v in toda.first_order_residuals(flow, a, k, h or 1e-4).items()
            }
        elif args.check == "toda":
            report["residuals"] = {
                f"a{a}_b{b}_k{k}": toda.toda_equation_residual(flow, a, b, k, h or 1e-3)
                for a in axes
                for b in axes
                for k in range(1, basis.K)
            }
        elif args.check in ("lax", "zs"):
            fn = toda.lax_residual if args.check == "lax" else toda.zero_curvature_residual
            report["residuals"] = {
                f"{toda.axis_shift(D, a)}_{toda.axis_shift(D, b)}": fn(flow, toda.axis_shift(D, a), toda.axis_shift(D, b), h or 1e-4)
                for a in axes
                for b in axes
                if a != b
            }
        elif args.check == "gd":
            report["residuals"] = {
                str(toda.axis_shift(D, a)): toda.gelfand_dickey_residual(flow, toda.axis_shift(D, a), h or 1e-4) for a in axes
            }
        else:
            report["residuals"] = {"wave": toda.wave_factorization_residual(flow)}
    elif args.check in ("discrete", "miwa"):
        rng = np.random.default_rng(cfg.seed)
        if args.check == "miwa":
            z = _points(args.z, D)[0] if args.z else np.exp(2j * np.pi * rng.uniform(size=D)) * rng.uniform(0.8, 1.25, size=D)
            report["z"] = _cmatrix(z)
            report["residuals"] = {f"k{k}": toda.miwa_residual(base, basis, np.eye(2 * D), z, k) for k in range(1, basis.K)}
        else:
            N = rng.normal(size=(2, 2 * D)) * 0.3
            flow = toda.DegreeOneFlow(N, [-3.0, 2.5])
            lat = toda.DiscreteLattice(base, basis, flow)
            report["residuals"] = {"zs": toda.zs_compatibility_residual(lat, 0, 1)}
            report["residuals"].update({f"toda_k{k}": toda.discrete_toda_residual(lat, 0, 1, k) for k in range(1, basis.K)})
    report["max_residual"] = max(report["residuals"].values())
    _emit(dumps(report), cfg, "toda")
    return 0


def cmd_verify(args, cfg) -> int:
    which = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(which)
    oracle = _oracle(cfg)
    suite = acceptance.identity_suite(oracle, cfg.K, seed=cfg.seed)
    suite.update({f"qd_{k}": v for k, v in acceptance.quasidet_suite(oracle, cfg.K).items()})
    tol = cfg.tolerances.get("suite", 1e-10)
    suite_ok = max(suite.values()) <= tol
    for r in results:
        print(r.line(), file=sys.stderr)
    print(f"invariant suite [{'PASS' if suite_ok else 'FAIL'}] preset={cfg.preset or 'custom'} D={cfg.D} K={cfg.K}", file=sys.stderr)
    ok = suite_ok and all(r.passed for r in results)
    report = {
        "passed": ok,
        "criteria": [r.to_json() for r in results],
        "invariant_suite": {"D": cfg.D, "K": cfg.K, "preset": cfg.preset, "tolerance": tol, "residuals": suite, "passed": suite_ok},
    }
    _emit(dumps(report), cfg, "verify")
    return 0 if ok else 3


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torus-olp", description="Orthogonal Laurent polynomials on the unit torus.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weight=True):
        sp.add_argument("--config", help="RunConfig JSON file (D, K, weight, preset, seed, tolerances, output)")
        sp.add_argument("--D", type=int, help="number of variables")
        sp.add_argument("--K", type=int, help="level: shells 0..K-1")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output file, or directory ending in a path separator")
        if weight:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--preset", choices=acceptance.PRESETS)
            g.add_argument("--weight", help="weight JSON (inline or path)")
        return sp

    common(sub.add_parser("basis", help="longilex shells"), weight=False)
    sp = common(sub.add_parser("moments", help="truncated moment matrix"))
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp = common(sub.add_parser("factorize", help="block Gauss-Borel factorization"))
    sp.add_argument("--full", action="store_true", help="include S and S_hat")
    for name in ("eval", "kernel"):
        sp = common(sub.add_parser(name, help="evaluate the polynomial family" if name == "eval" else "Christoffel-Darboux kernel"))
        sp.add_argument("--plot-data", action="store_true", help="CSV along the torus curve exp(i t d)")
        sp.add_argument("--samples", type=int, default=128)
        sp.add_argument("--direction", type=lambda s: [float(x) for x in s.split(",")], help="curve direction d")
        if name == "eval":
            sp.add_argument("--z", help='points "z1,z2;z1,z2"')
            sp.add_argument("--hat", action="store_true")
        else:
            sp.add_argument("--z1")
            sp.add_argument("--z2")
            sp.add_argument("--k", type=int, help="kernel level (default K)")
    sp = common(sub.add_parser("nice", help="nicety test of a Laurent polynomial"), weight=False)
    sp.add_argument("--poly", required=True, help='JSON {"terms": [...]} or text like "z1^-2 + z2^-2 + 1"')
    sp = common(sub.add_parser("darboux", help="Christoffel transform coefficients"))
    sp.add_argument("--poly", help="perturbing polynomial L (default: the worked example)")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--nodes", help="node set JSON [[[re, im], ...], ...]")
    sp = common(sub.add_parser("toda", help="Toda flow residuals"))
    sp.add_argument("--times", help='JSON list [{"alpha": [1, 0], "re": 0.1, "im": 0}, ...]')
    sp.add_argument("--check", choices=("first", "toda", "lax", "zs", "gd", "wave", "discrete", "miwa"), default="lax")
    sp.add_argument("--h", type=float)
    sp.add_argument("--z", help="Miwa point")
    sp = common(sub.add_parser("verify", help="acceptance criteria plus the invariant suite"))
    sp.add_argument("--only", help="comma-separated criterion numbers")
    return p


COMMANDS = {
    "basis": cmd_basis,
    "moments": cmd_moments,
    "factorize": cmd_factorize,
    "eval": cmd_eval,
    "kernel": cmd_kernel,
    "nice": cmd_nice,
    "darboux": cmd_darboux,
    "toda": cmd_toda,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "eval" and not args.plot_data and not args.z:
            raise ValueError("eval needs --z or --plot-data")
        if args.command == "kernel" and not args.plot_data and not (args.z1 and args.z2):
            raise ValueError("kernel needs --z1 and --z2, or --plot-data")
        return COMMANDS[args.command](args, cfg)
    except Exception as exc:
        err = {"error": {"command": args.command, "type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(dumps(err) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
