"""Command-line front end.

Every command writes CSV tables (17 significant digits, every row tagged
with the seed and tolerance) and a ``manifest.json`` holding the effective
configuration, per-stage logs and the wall time. Only the manifest carries
timing, so CSVs from identical runs are byte-identical.

Exit codes: 0 pass, 2 input error, 3 solver error, 4 inadmissible parameter,
5 assertion failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (BodyFormatError, ConstructionFailed, DegenerateDifference, DegenerateInput,
                     EmptyFloatingBody, InadmissibleParameters, LabError, NoConvergence,
                     SearchExhausted, ZeroDirection)
from .geometry.affine import AffineMap
from .geometry.bodyio import dumps, fmt, read_body, write_body
from .geometry.nets import DirectionNet
from .geometry.polytope import HPolytope, VPolytope, gauge

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_INADMISSIBLE, EXIT_ASSERTION = 0, 2, 3, 4, 5

COMMANDS = ("points", "floating", "experiment", "proptest")
EXPERIMENTS = ("example1", "example2", "theorem3", "separation")


class InputError(LabError):
    """Malformed command-line or config input."""


class AssertionFailure(LabError):
    """An experiment or property check did not hold."""


# ------------------------------------------------------------------ config


@dataclass
class RunConfig:
    """Effective configuration of one run; unknown keys are rejected."""

    command: str
    input: str | None = None
    out_dir: str = "aiplab-out"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    nets: dict = field(default_factory=dict)
    maps: str = "g,s,j,l,gdelta:0.1"
    delta_grid: str = "0.015625:0.00006103515625:9,log"
    experiment: str | None = None
    params: dict = field(default_factory=dict)
    suite: str | None = None
    trials: int = 20

    TOLERANCE_KEYS = ("tol", "vol_tol")

    @classmethod
    def keys(cls):
        return [f for f in cls.__dataclass_fields__]

    def update(self, mapping: dict, where: str):
        for key, value in mapping.items():
            if key not in self.__dataclass_fields__ or key == "command":
                raise InputError(f"{where}: unknown key {key!r}")
            if key == "tolerances":
                bad = set(value) - set(self.TOLERANCE_KEYS)
                if bad:
                    raise InputError(f"{where}: unknown tolerance key(s) {sorted(bad)}")
            if key in ("tolerances", "nets", "params"):
                if not isinstance(value, dict):
                    raise InputError(f"{where}: {key} must be a mapping")
                getattr(self, key).update(value)
            else:
                setattr(self, key, value)
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise InputError(f"{where}: seed must be a 64-bit unsigned integer")
        return self

    @property
    def tol(self):
        return self.tolerances.get("tol")

    def net_size(self, n: int) -> int:
        from .floating import DEFAULT_NET_SIZE
        v = self.nets.get(str(n), self.nets.get(n, self.nets.get("all")))
        return int(v) if v is not None else DEFAULT_NET_SIZE[n]


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    return doc


def parse_delta_grid(text: str) -> list:
    """``"a:b:steps"`` (linear) or ``"a:b:steps,log"`` (geometric), or a comma list."""
    spec, _, mode = text.partition(",")
    if ":" not in spec:
        try:
            return [float(x) for x in text.split(",") if x]
        except ValueError:
            raise InputError(f"bad delta grid {text!r}") from None
    parts = spec.split(":")
    if len(parts) != 3 or mode not in ("", "log", "lin"):
        raise InputError(f"bad delta grid {text!r}; expected a:b:steps[,log]")
    try:
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"bad delta grid {text!r}") from None
    if steps < 1:
        raise InputError("delta grid needs at least one step")
    if steps == 1:
        return [a]
    if mode == "log":
        if a <= 0 or b <= 0:
            raise InadmissibleParameters("a logarithmic delta grid needs positive ends")
        # base-2 exponents keep power-of-two grids exact
        return [float(x) for x in np.exp2(np.linspace(np.log2(a), np.log2(b), steps))]
    return [float(x) for x in np.linspace(a, b, steps)]


# ------------------------------------------------------------------ output


class Output:
    """Ordered writer for one run directory."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.stages = []
        self.files = []
        self.t0 = time.perf_counter()

    def stage(self, kind, **info):
        self.stages.append({"stage": kind, **_jsonable(info)})

    def csv(self, name, header, rows):
        tol = self.cfg.tol
        tol_text = "default" if tol is None else fmt(tol)
        path = self.dir / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(list(header) + ["seed", "tol"])
            for row in rows:
                w.writerow([_cell(x) for x in row] + [str(self.cfg.seed), tol_text])
        self.files.append(name)
        return path

    def body(self, name, body):
        path = self.dir / "snapshots" / name
        path.parent.mkdir(exist_ok=True)
        write_body(body, path)
        self.files.append(str(Path("snapshots") / name))

    def manifest(self, status, message=""):
        doc = {
            "artifact": "aiplab",
            "version": __version__,
            "command": self.cfg.command,
            "config": _jsonable(asdict(self.cfg)),
            "status": status,
            "message": message,
            "files": self.files,
            "stages": self.stages,
            "wall_time_s": time.perf_counter() - self.t0,
        }
        (self.dir / "manifest.json").write_text(dumps(doc) + "\n")


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return fmt(float(x))
    return "" if x is None else str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


def _coords(x, n):
    x = np.asarray(x, dtype=float)
    return [float(v) for v in x] + [None] * (n - len(x))


def _load_polytope(path) -> VPolytope:
    if path is None:
        raise InputError("--input is required")
    body = read_body(path)
    if isinstance(body, HPolytope):
        body = body.vpolytope
    return body


# ------------------------------------------------------------------ commands


def cmd_points(cfg: RunConfig, out: Output) -> int:
    from .points import EvalContext, parse_map

    body = _load_polytope(cfg.input)
    n = body.dim
    names = [s.strip() for s in cfg.maps.split(",") if s.strip()]
    if not names:
        raise InputError("--maps is empty")
    try:
        maps = [parse_map(s) for s in names]
    except InadmissibleParameters as exc:
        raise InputError(str(exc)) from None
    ctx = EvalContext(tol=cfg.tol, net_size={2: cfg.net_size(2), 3: cfg.net_size(3)},
                      vol_tol=cfg.tolerances.get("vol_tol", 1e-9))
    rng = np.random.default_rng(cfg.seed)
    t = AffineMap.random(n, rng)
    tb = _affine(t, body)
    g = body.centroid
    rows = []
    for name, pm in zip(names, maps):
        try:
            x = pm(body, ctx)
            y = pm(tb, ctx.transformed(t))
        except (NoConvergence, EmptyFloatingBody, DegenerateDifference, ZeroDirection) as exc:
            raise SolverFailure(f"map {name}: {exc}") from None
        res = float(np.linalg.norm(y - t(x)) / tb.diameter)
        rows.append([name, *_coords(x, n), gauge(body, g, x), res])
        out.stage("map", name=name, point=x, residual=res)
    header = ["map"] + [f"x{i + 1}" for i in range(n)] + ["gauge", "residual"]
    out.csv("points.csv", header, rows)
    return EXIT_OK


class SolverFailure(LabError):
    pass


def _affine(t, body):
    from .geometry.polytope import affine_apply
    return affine_apply(t, body)


def cmd_floating(cfg: RunConfig, out: Output) -> int:
    from .floating import FloatingParams, floating_split, richardson, sw_constant

    body = _load_polytope(cfg.input)
    n = body.dim
    deltas = parse_delta_grid(cfg.delta_grid)
    net = DirectionNet(n, cfg.net_size(n))
    vol_tol = cfg.tolerances.get("vol_tol", 1e-9)
    params = [FloatingParams(d, net, vol_tol) for d in deltas]     # validates every delta first
    vol = body.volume
    rows, sw = [], []
    for i, prm in enumerate(params):
        try:
            sp = floating_split(body, prm)
        except (EmptyFloatingBody, DegenerateDifference) as exc:
            raise SolverFailure(f"delta={prm.delta:g}: {exc}") from None
        val = sw_constant(n) * sp.rest_volume / (prm.delta * vol) ** (2.0 / (n + 1))
        sw.append(val)
        rows.append([prm.delta, sp.volume, *_coords(sp.centroid, n),
                     *_coords(sp.rest_centroid, n), val])
        out.body(f"kdelta_{i:03d}.json", sp.body)
        out.stage("delta", delta=prm.delta, volume=sp.volume)
    header = (["delta", "volume"] + [f"centroid{i + 1}" for i in range(n)]
              + [f"gdelta{i + 1}" for i in range(n)] + ["sw"])
    out.csv("floating.csv", header, rows)
    if len(deltas) >= 4 and all(a > b for a, b in zip(deltas, deltas[1:])):
        out.stage("extrapolation", sw_limit=richardson(deltas, sw, 2.0 / (n + 1)))
    return EXIT_OK


def _check(out, checks, name, ok, detail):
    checks.append((name, bool(ok), detail))
    out.stage("assert", name=name, passed=bool(ok), detail=detail)


def _finish(out, checks, table):
    out.csv(table, ["assertion", "passed", "detail"], [list(c) for c in checks])
    failed = [c for c in checks if not c[1]]
    if failed:
        raise AssertionFailure(f"{failed[0][0]}: {failed[0][2]}")
    return EXIT_OK


def _exp_example1(cfg, out):
    from .constructions import example1_bodies, example1_witness
    from .ellipsoids import john_ellipsoid, john_point
    from .points import santalo_point

    s, s1, _ = example1_bodies(cfg.params.get("lam"), cfg.params.get("gamma"))
    checks = []
    ell, _ = john_ellipsoid(s, cfg.tol)
    _check(out, checks, "mie(S) center", np.linalg.norm(ell.center) <= 1e-6,
           f"|center| = {np.linalg.norm(ell.center):.3g}")
    _check(out, checks, "mie(S) radii", np.max(np.abs(ell.radii - 1.0)) <= 1e-6,
           f"max |r - 1| = {np.max(np.abs(ell.radii - 1.0)):.3g}")
    j1 = john_point(s1, cfg.tol)
    _check(out, checks, "j(S1) = 0", np.linalg.norm(j1) <= 1e-5, f"|j| = {np.linalg.norm(j1):.3g}")
    _check(out, checks, "g(S1) moves left", s1.centroid[0] < 0.0, f"g1 = {s1.centroid[0]:.6g}")
    w = example1_witness(tol=cfg.tol)
    _, _, s2 = example1_bodies(w.lam, w.gamma)
    _check(out, checks, "j(S2) = 0", np.linalg.norm(w.j) <= 1e-5, f"|j| = {np.linalg.norm(w.j):.3g}")
    _check(out, checks, "(j,g,s)(S2) span the plane", w.simplex_volume > 1e-4,
           f"simplex volume {w.simplex_volume:.6g} at lam={w.lam}, gamma={w.gamma}")
    rows = [["S1", "j", *j1], ["S1", "g", *s1.centroid], ["S1", "s", *santalo_point(s1)],
            ["S2", "j", *w.j], ["S2", "g", *w.g], ["S2", "s", *w.s]]
    out.csv("example1.csv", ["body", "point", "x1", "x2"], rows)
    out.stage("witness", lam=w.lam, gamma=w.gamma, simplex_volume=w.simplex_volume)
    for name, body in (("S", s), ("S1", s1), ("S2", s2)):
        out.body(f"{name}.json", body)
    return _finish(out, checks, "example1_checks.csv")


def _exp_example2(cfg, out):
    from .constructions import example2_bodies, example2_parameters, simplex_volume
    from .ellipsoids import john_point, loewner_point

    prm = example2_parameters(cfg.params.get("b1"), cfg.params.get("c1"))
    quad, tri = example2_bodies(prm.b1, prm.c1)
    j = john_point(quad, cfg.tol)
    lw = loewner_point(quad, cfg.tol)
    expected = (prm.b1 + prm.b + prm.c) / 3.0
    g = quad.centroid
    checks = []
    _check(out, checks, "j(P) = 0", np.linalg.norm(j) <= 1e-5, f"|j| = {np.linalg.norm(j):.3g}")
    _check(out, checks, "l(P) = (b1+b+c)/3", np.linalg.norm(lw - expected) <= 1e-5,
           f"|l - (b1+b+c)/3| = {np.linalg.norm(lw - expected):.3g}")
    vol = simplex_volume([j, lw, g])
    _check(out, checks, "(j,l,g)(P) not collinear", vol > 1e-8, f"simplex volume {vol:.6g}")
    rows = [["j", *j], ["l", *lw], ["l_expected", *expected], ["g", *g],
            ["b1", *prm.b1], ["c1", *prm.c1], ["c_prime", *prm.c_prime],
            ["c_second", *prm.c_second]]
    out.csv("example2.csv", ["point", "x1", "x2"], rows)
    out.body("P.json", quad)
    out.body("T.json", tri)
    return _finish(out, checks, "example2_checks.csv")


def _exp_theorem3(cfg, out):
    from .constructions import theorem3_construct

    n = int(cfg.params.get("dim", 2))
    eta = float(cfg.params.get("eta", 0.05))
    if n not in (2, 3):
        raise InadmissibleParameters("theorem3 runs in dimension 2 or 3")
    body = cfg.input and _load_polytope(cfg.input)
    if not body:
        body = VPolytope(np.vstack([np.zeros(n), np.eye(n)]))
    settings = {k: v for k, v in cfg.params.items() if k not in ("dim", "eta")}
    log_header = ["stage", "delta", "distance", "note"]
    try:
        res = theorem3_construct(body, eta, seed=cfg.seed, settings=settings)
    except ConstructionFailed as exc:
        out.csv("theorem3_log.csv", log_header,
                [[r["stage"], r["delta"], r["distance"], r["note"]] for r in exc.log])
        out.stage("failed", stage=exc.stage, message=exc.detail)
        raise AssertionFailure(f"theorem3 {exc}") from None
    log = res.log
    checks = []
    bound = res.bound
    _check(out, checks, "(n+2) eta_1 < eta", bound < eta, f"{bound:.6g} < {eta:.6g}")
    for i, d in enumerate(res.distances):
        _check(out, checks, f"|v_{i + 1} - Delta_{i + 1}| <= (n+2) eta_1", d <= bound,
               f"{d:.6g} <= {bound:.6g}")
    _check(out, checks, "affine rank n", res.rank == n, f"rank {res.rank}")
    rows = []
    for i, (st, v, x) in enumerate(zip(res.steps, res.vertices, res.points)):
        rows.append([i + 1, *_coords(v, n), *_coords(st.z, n), st.r, st.eta, st.epsilon_net,
                     st.delta, *_coords(x, n), float(np.linalg.norm(v - x))])
    header = (["stage"] + [f"v{i + 1}" for i in range(n)] + [f"z{i + 1}" for i in range(n)]
              + ["r", "eta", "epsilon", "delta"] + [f"p{i + 1}" for i in range(n)] + ["distance"])
    out.csv("theorem3.csv", header, rows)
    out.csv("theorem3_log.csv", log_header,
            [[r["stage"], r["delta"], r["distance"], r["note"]] for r in log])
    out.body("Q.json", res.Q)
    return _finish(out, checks, "theorem3_checks.csv")


def _exp_separation(cfg, out):
    from .constructions import CONFIG, theorem1_separation

    p = cfg.params
    net = DirectionNet(2, int(cfg.nets.get("2", CONFIG["separation"]["net_size"])))
    try:
        res = theorem1_separation(h=p.get("h"), m=p.get("m"), net=net, ell_max=p.get("ell_max"))
    except SearchExhausted as exc:
        out.csv("separation.csv", ["h", "ell", "gap"], [list(f) for f in exc.frontier])
        raise AssertionFailure(f"separation: {exc}") from None
    out.csv("separation.csv", ["h", "ell", "gap"], [list(f) for f in res.frontier])
    checks = []
    _check(out, checks, "ell > m", res.ell > res.m, f"ell={res.ell}, m={res.m}")
    _check(out, checks, "gap >= 1/10", res.gap >= 0.1,
           f"|g_1/{res.ell} - g_1/{res.m}| = {res.gap:.6g} at h={res.h}")
    return _finish(out, checks, "separation_checks.csv")


def cmd_experiment(cfg: RunConfig, out: Output) -> int:
    runners = {"example1": _exp_example1, "example2": _exp_example2,
               "theorem3": _exp_theorem3, "separation": _exp_separation}
    if cfg.experiment not in runners:
        raise InputError(f"unknown experiment {cfg.experiment!r}; choose from {list(EXPERIMENTS)}")
    return runners[cfg.experiment](cfg, out)


def cmd_proptest(cfg: RunConfig, out: Output) -> int:
    from .proptests import SUITES, run_suite

    if cfg.suite not in SUITES:
        raise InputError(f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}")
    summary = run_suite(cfg.suite, int(cfg.trials), cfg.seed, cfg.tol)
    rows = [[s.suite, s.name, s.trials, s.max_residual, s.tolerance, s.violations,
             s.min_failing_seed] for s in summary]
    out.csv(f"proptest_{cfg.suite}.csv",
            ["suite", "property", "trials", "max_residual", "tolerance", "violations",
             "min_failing_seed"], rows)
    failed = [s for s in summary if not s.passed]
    for s in summary:
        out.stage("property", name=s.name, max_residual=s.max_residual, violations=s.violations)
    if failed:
        f = failed[0]
        raise AssertionFailure(
            f"{f.suite}/{f.name}: {f.violations} of {f.trials} trials above {f.tolerance:g}; "
            f"minimal failing seed {f.min_failing_seed}")
    return EXIT_OK


HANDLERS = {"points": cmd_points, "floating": cmd_floating,
            "experiment": cmd_experiment, "proptest": cmd_proptest}


# ------------------------------------------------------------------ argparse


def _kv(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; its keys override the flags")
    common.add_argument("--input", help="body file (JSON, see README)")
    common.add_argument("--out-dir", help="output directory (default: aiplab-out)")
    common.add_argument("--seed", type=int, help="64-bit seed recorded in every row (default 0)")
    common.add_argument("--tol", type=float, help="solver tolerance (proptest: property tolerance)")
    common.add_argument("--net", type=int, help="direction net size for both dimensions")

    fmt_cls = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="aiplab", formatter_class=fmt_cls,
        description="Affine invariant points of convex polytopes.",
        epilog="Set AIP_LAB_THREADS to cap worker threads.\n"
               "Exit codes: 0 pass, 2 input error, 3 solver error, 4 inadmissible parameter,\n"
               "5 assertion failure.")
    parser.add_argument("--version", action="version", version=f"aiplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("points", parents=[common], formatter_class=fmt_cls,
                       help="evaluate invariant points of a body",
                       epilog="example:\n  aiplab points --input square.json --maps g,s,j,l "
                              "--out-dir out/square")
    p.add_argument("--maps", help='comma list, e.g. "g,s,j,l,gdelta:0.1,comb:0.5:g+j,g@float:0.1"')

    p = sub.add_parser("floating", parents=[common], formatter_class=fmt_cls,
                       help="floating bodies over a delta grid",
                       epilog="example:\n  aiplab floating --input disk.json "
                              "--delta-grid 0.015625:0.00006103515625:9,log --net 2048")
    p.add_argument("--delta-grid", help='"a:b:steps" or "a:b:steps,log" or "d1,d2,..."')

    p = sub.add_parser("experiment", parents=[common], formatter_class=fmt_cls,
                       help="run one of the constructions",
                       epilog="example:\n  aiplab experiment example2 --out-dir out/ex2\n"
                              "  aiplab experiment theorem3 --param dim=2 --param eta=0.05\n"
                              "  aiplab experiment separation --param m=8")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--param", action="append", type=_kv, default=[],
                   metavar="KEY=VALUE", help="experiment parameter (JSON value), repeatable")

    p = sub.add_parser("proptest", parents=[common], formatter_class=fmt_cls,
                       help="randomized invariant suites",
                       epilog="example:\n  aiplab proptest equivariance --trials 200 --seed 7")
    p.add_argument("suite", choices=("equivariance", "inclusion", "brunn-minkowski", "boule",
                                     "lemma31"))
    p.add_argument("--trials", type=int, help="number of seeds (default 20)")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    flags = {}
    for key in ("input", "out_dir", "seed", "maps", "delta_grid", "trials"):
        v = getattr(args, key, None)
        if v is not None:
            flags[key] = v
    if args.tol is not None:
        flags["tolerances"] = {"tol": args.tol}
    if args.net is not None:
        flags["nets"] = {"2": args.net, "3": args.net}
    if args.command == "experiment":
        flags["experiment"] = args.name
        flags["params"] = dict(args.param)
    if args.command == "proptest":
        flags["suite"] = args.suite
    cfg.update(flags, "flags")
    if args.config:
        cfg.update(load_config_file(args.config), args.config)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = config_from_args(args)
        out = Output(cfg)
    except InputError as exc:
        print(f"aiplab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"aiplab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, message = EXIT_OK, ""
    try:
        code = HANDLERS[cfg.command](cfg, out)
    except (InputError, BodyFormatError, DegenerateInput) as exc:
        code, message = EXIT_INPUT, f"input error: {exc}"
    except InadmissibleParameters as exc:
        code, message = EXIT_INADMISSIBLE, f"inadmissible parameter: {exc}"
    except SolverFailure as exc:
        code, message = EXIT_SOLVER, f"solver error: {exc}"
    except (NoConvergence, EmptyFloatingBody, DegenerateDifference) as exc:
        code, message = EXIT_SOLVER, f"solver error: {exc}"
    except AssertionFailure as exc:
        code, message = EXIT_ASSERTION, f"assertion failed: {exc}"
    except LabError as exc:
        code, message = EXIT_SOLVER, f"error: {exc}"
    status = "PASS" if code == EXIT_OK else "FAIL"
    out.manifest(status, message)
    if message:
        print(f"aiplab: {message}", file=sys.stderr)
    else:
        print(f"aiplab: {cfg.command} {status} -> {out.dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
