"""Command-line interface.

Every subcommand writes its data files plus a JSON run report and exits with
0 when all checks pass, 1 on usage, parse or I/O errors and 2 when a
numerical invariant fails.  ``SVDGFT_THREADS`` limits BLAS/LAPACK threads.
"""

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from ._errors import ConsistencyError, GraphValidationError, HypothesisViolation
from .circulant import verify as circulant_verify
from .denoise import ExperimentConfig, piecewise_signal, run_experiment, smooth_signal
from .eulerian import (
    check_necessary_condition,
    check_reflection,
    d_sigma,
    finite_difference_errors,
    sigma_asym,
    svd_path,
)
from .fileio import (
    dumps_json,
    read_coefficients,
    read_signal,
    sha256_file,
    write_coefficients,
    write_json,
    write_matrix,
    write_signal,
    write_table,
)
from .gft import basis_residuals, gft, igft, svd_basis
from .graph import (
    build_laplacian,
    circulant_graph,
    cluster_cycle_graph,
    is_eulerian,
    knn_graph,
    load_graph,
    random_digraph,
    random_eulerian_graph,
    random_undirected_graph,
    save_graph,
)
from .rng import generator
from .variation import all_metrics, dv

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2
THREADS_ENV = "SVDGFT_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _q_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


class Run:
    """Collects inputs, outputs, residuals and checks into a report."""

    def __init__(self, command, params):
        self.command = command
        self.params = params
        self.inputs = {}
        self.outputs = []
        self.residuals = {}
        self.checks = {}
        self.results = {}

    def add_input(self, name, path):
        self.inputs[name] = {"path": path, "sha256": sha256_file(path)}

    def add_output(self, path):
        self.outputs.append(path)

    def passed(self):
        return all(self.checks.values())

    def report(self):
        digest = hashlib.sha256(
            json.dumps({"params": self.params, "inputs": self.inputs}, sort_keys=True, default=str).encode()
        ).hexdigest()
        return {
            "command": self.command,
            "version": __version__,
            "parameters": self.params,
            "inputs": self.inputs,
            "inputs_digest": digest,
            "outputs": self.outputs,
            "results": self.results,
            "residuals": self.residuals,
            "checks": self.checks,
            "status": "pass" if self.passed() else "fail",
        }

    def finish(self, report_path):
        if report_path:
            write_json(report_path, self.report())
        else:
            sys.stdout.write(dumps_json(self.report()))
        return EXIT_OK if self.passed() else EXIT_INVARIANT


def _parent(path):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    return path


def _graph(run, path):
    run.add_input("graph", path)
    return load_graph(path)


# ---------------------------------------------------------------- spectrum


def cmd_spectrum(args):
    run = Run("spectrum", {"graph": args.graph, "out": args.out})
    g = _graph(run, args.graph)
    L = build_laplacian(g)
    b = svd_basis(L)
    os.makedirs(args.out, exist_ok=True)
    paths = {k: os.path.join(args.out, f"{k}.csv") for k in ("sigma", "U", "V")}
    write_table(paths["sigma"], ["index", "sigma"], [[i, s] for i, s in enumerate(b.sigma)])
    write_matrix(paths["U"], b.U, "u")
    write_matrix(paths["V"], b.V, "v")
    for p in paths.values():
        run.add_output(p)
    res = basis_residuals(b, L)
    scale = 1.0 + float(b.sigma[-1])
    run.residuals = {k: v for k, v in res.items() if k != "sigma_nondecreasing"}
    run.results = {"n": g.n, "kernel_rank": b.kernel_rank, "sigma": b.sigma}
    run.checks = {
        "orthogonal_U": res["orthogonality_U"] <= 1e-10,
        "orthogonal_V": res["orthogonality_V"] <= 1e-10,
        "reconstruction": res["reconstruction"] <= 1e-10 * scale,
        "sigma_nondecreasing": res["sigma_nondecreasing"],
        "sigma0_zero": res["sigma0"] == 0.0,
        "v0_constant": res["v0_constant"] <= 1e-10,
    }
    report = args.report or os.path.join(args.out, "report.json")
    run.add_output(report)
    return run.finish(report)


# ---------------------------------------------------------------- gft / igft


def _transform_checks(run, b, x, c):
    nx = float(np.linalg.norm(x))
    back = igft(b, c.sum_block, c.diff_block)
    run.residuals["parseval"] = abs(c.norm() - nx)
    run.residuals["round_trip"] = float(np.linalg.norm(back - x))
    tol = 1e-10 * max(nx, 1.0)
    run.checks["parseval"] = run.residuals["parseval"] <= tol
    run.checks["round_trip"] = run.residuals["round_trip"] <= tol


def cmd_gft(args):
    if args.inverse:
        return cmd_igft(args)
    run = Run("gft", {"graph": args.graph, "signal": args.signal, "out": args.out})
    g = _graph(run, args.graph)
    run.add_input("signal", args.signal)
    x = read_signal(args.signal)
    b = svd_basis(build_laplacian(g))
    c = gft(b, x)
    write_coefficients(_parent(args.out), c)
    run.add_output(args.out)
    _transform_checks(run, b, x, c)
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


def cmd_igft(args):
    src = args.signal if args.inverse else args.coefficients
    run = Run("igft", {"graph": args.graph, "coefficients": src, "out": args.out})
    g = _graph(run, args.graph)
    run.add_input("coefficients", src)
    z1, z2 = read_coefficients(src)
    b = svd_basis(build_laplacian(g))
    x = igft(b, z1, z2)
    write_signal(_parent(args.out), x)
    run.add_output(args.out)
    c = gft(b, x)
    # distance of the coefficients from the range of the transform
    run.residuals["range_defect"] = float(np.sqrt(np.sum((c.sum_block - z1) ** 2) + np.sum((c.diff_block - z2) ** 2)))
    _transform_checks(run, b, x, c)
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


# ---------------------------------------------------------------- metrics


def cmd_metrics(args):
    run = Run("metrics", {"graph": args.graph, "signal": args.signal, "out": args.out})
    g = _graph(run, args.graph)
    run.add_input("signal", args.signal)
    x = read_signal(args.signal)
    A = g.adjacency()
    L = build_laplacian(g)
    if x.shape != (g.n,):
        raise GraphValidationError(f"signal has length {x.size}, graph has {g.n} vertices")
    m = all_metrics(A, L, x)
    write_table(_parent(args.out), ["metric", "value"], list(m.items()))
    run.add_output(args.out)
    run.results = m
    if is_eulerian(g):
        # balanced degrees split the quadratic form across edge directions: dv(x) + dv(-x) = 2 qv(x)
        run.residuals["dv_split"] = abs(dv(A, x) + dv(A, -x) - 2 * m["quadratic_variation"])
        run.checks["dv_split"] = run.residuals["dv_split"] <= 1e-9 * (1.0 + abs(m["quadratic_variation"]))
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


# ---------------------------------------------------------------- circulant


def cmd_circulant_verify(args):
    run = Run("circulant-verify", {"n": args.n, "q": args.q, "seed": args.seed})
    try:
        fac, res, checks = circulant_verify(args.n, args.q, seed=args.seed)
    except ConsistencyError as exc:
        run.residuals["error"] = str(exc)
        run.checks["factorization"] = False
        if args.out:
            run.add_output(args.out)
        return run.finish(args.out)
    run.results = {"Sigma": fac.Sigma, "q_set": list(fac.q_set)}
    run.residuals = res
    run.checks = checks
    if args.out:
        _parent(args.out)
        run.add_output(args.out)
    return run.finish(args.out)


# ---------------------------------------------------------------- eulerian


def cmd_eulerian_sweep(args):
    run = Run("eulerian-sweep", {"graph": args.graph, "steps": args.steps, "seed": args.seed, "fd_step": args.fd_step})
    g = _graph(run, args.graph)
    if not is_eulerian(g):
        raise GraphValidationError("eulerian-sweep needs an Eulerian graph (in-degree = out-degree everywhere)")
    if args.steps < 2:
        raise GraphValidationError("--steps must be at least 2")
    L = build_laplacian(g)
    grid = np.linspace(0.0, 1.0, args.steps)
    path = svd_path(L, grid)
    S = path.sigmas()
    asym = sigma_asym(L)
    smax = float(S.max())
    rows = [[float(t), i, float(s)] for t, sig in zip(grid, S) for i, s in enumerate(sig)]
    write_table(_parent(args.out), ["t", "i", "sigma"], rows)
    run.add_output(args.out)

    symmetry = float(np.abs(S - S[::-1]).max())
    dt = np.abs(grid[:, None] - grid[None, :])
    jumps = np.abs(S[:, None, :] - S[None, :, :]).max(axis=2)
    lipschitz = float((jumps - asym * dt).max())
    slack = []
    for b in path.bases:
        for i in range(1, b.n):
            try:
                slack.append(abs(d_sigma(b, L, i)) - asym)
            except HypothesisViolation:
                continue
    bound = max(slack, default=None)
    fd = []
    h = args.fd_step
    for t in grid:
        if h <= t <= 1 - h:
            e = finite_difference_errors(L, float(t), h)
            if e is not None:
                fd.append(e)
    reflection = check_reflection(path, seed=args.seed)
    necessary = check_necessary_condition(L)
    run.results = {
        "sigma_asym": asym,
        "max_variation_from_midpoint": float(np.abs(S - S[len(grid) // 2]).max()) if len(grid) % 2 else None,
        "simple_points": int(sum(path.simple_flags)),
        "grid_points": len(grid),
        "evaluated_points": path.evaluated_points,
        "reflection": reflection,
        "necessary_condition": necessary,
        "fd_points": len(fd),
    }
    run.residuals = {
        "symmetry": symmetry,
        "lipschitz_slack": lipschitz,
        "sigma0_max": float(np.abs(S[:, 0]).max()),
        "d_sigma_bound_slack": bound,
        "fd_d_sigma": max((e["d_sigma"] for e in fd), default=None),
        "fd_d_uv": max((e["d_uv"] for e in fd), default=None),
    }
    run.checks = {
        "symmetry": symmetry <= 1e-9 * (1.0 + smax),
        "lipschitz": lipschitz <= 1e-9,
        "sigma0_zero": run.residuals["sigma0_max"] == 0.0,
        "d_sigma_bound": bound is None or bound <= 1e-10,
        "fd_d_sigma": all(e["d_sigma"] <= 1e-5 for e in fd),
        "fd_d_uv": all(e["d_uv"] <= 1e-4 for e in fd),
        "reflection": reflection["status"] != "fail",
    }
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


# ---------------------------------------------------------------- denoise


def cmd_denoise(args):
    run = Run("denoise", {"config": args.config, "out": args.out, "seed": args.seed})
    run.add_input("config", args.config)
    with open(args.config, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphValidationError(f"{args.config}: line {exc.lineno}: {exc.msg}") from None
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(args.config)))
    if cfg.graph["type"] == "file":
        run.add_input("graph", cfg.graph["path"])
    rep = run_experiment(cfg)
    header = ["variance", "M", "trial", "signal", "isnr", "snr"]
    rows = [[v, int(m), int(t), int(j), a, b] for v, m, t, j, a, b in rep.rows.tolist()]
    write_table(_parent(args.out), header, rows)
    run.add_output(args.out)
    run.results = rep.to_dict()
    run.results["config"] = cfg.to_dict()
    run.residuals = {
        "gain_db": [s["mean_snr"] - s["mean_isnr"] for s in rep.summary],
    }
    run.checks = {
        "energy_monotone": rep.energy_monotone,
        "trial_counts": all(s["samples"] == cfg.trials * rep.signals for s in rep.summary),
    }
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


# ---------------------------------------------------------------- generate


_GENERATE_PARAMS = {
    "circulant": ("n", "q"),
    "knn": ("n", "k", "weight_low", "weight_high", "seed"),
    "cluster-cycle": ("clusters", "size", "seed"),
    "random": ("n", "density", "seed"),
    "undirected": ("n", "density", "seed"),
    "eulerian": ("n", "cycles", "seed"),
    "signal": ("graph", "signal_kind", "seed"),
}
_SIGNAL_PARAMS = {"random": (), "smooth": ("components", "amplitude"), "piecewise": ("pieces",)}


def cmd_generate(args):
    kind = args.kind
    keep = _GENERATE_PARAMS[kind] + ("kind", "out")
    if kind == "signal":
        keep += _SIGNAL_PARAMS[args.signal_kind]
    params = {k: getattr(args, k) for k in keep}
    run = Run("generate", params)
    if kind == "circulant":
        g = circulant_graph(args.n, args.q)
    elif kind == "knn":
        pts = generator(args.seed, 0x707473).random((args.n, 2))
        g = knn_graph(pts, args.k, args.weight_low, args.weight_high, args.seed)
    elif kind == "cluster-cycle":
        g = cluster_cycle_graph(args.clusters, args.size, args.seed)
    elif kind == "random":
        g = random_digraph(args.n, args.density, args.seed)
    elif kind == "undirected":
        g = random_undirected_graph(args.n, args.density, args.seed)
    elif kind == "eulerian":
        g = random_eulerian_graph(args.n, args.cycles, args.seed)
    elif kind == "signal":
        return _generate_signal(run, args)
    save_graph(g, _parent(args.out))
    run.add_output(args.out)
    run.results = {"n": g.n, "edges": g.num_edges, "eulerian": is_eulerian(g)}
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


def _generate_signal(run, args):
    g = _graph(run, args.graph)
    if args.signal_kind == "random":
        x = generator(args.seed, 0x78).standard_normal(g.n)
    elif args.signal_kind == "smooth":
        x = smooth_signal(svd_basis(build_laplacian(g)), min(args.components, g.n), args.amplitude, args.seed)
    else:
        x = piecewise_signal(g, args.pieces, None, args.seed)
    write_signal(_parent(args.out), x)
    run.add_output(args.out)
    run.results = {"n": g.n, "norm": float(np.linalg.norm(x))}
    if args.report:
        run.add_output(args.report)
    return run.finish(args.report)


# ---------------------------------------------------------------- parser


def build_parser():
    p = _Parser(prog="svdgft", description="SVD-based graph Fourier transform toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectrum", help="frequencies and components of a graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--out", required=True, help="output directory for sigma.csv, U.csv, V.csv")
    s.add_argument("--report", help="report path (default <out>/report.json)")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("gft", help="forward transform of a signal")
    s.add_argument("--graph", required=True)
    s.add_argument("--signal", required=True, help="signal CSV, or coefficient CSV with --inverse")
    s.add_argument("--out", required=True)
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--report")
    s.set_defaults(func=cmd_gft)

    s = sub.add_parser("igft", help="inverse transform of a coefficient file")
    s.add_argument("--graph", required=True)
    s.add_argument("--coefficients", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_igft, inverse=False)

    s = sub.add_parser("metrics", help="variation measures of a signal")
    s.add_argument("--graph", required=True)
    s.add_argument("--signal", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("circulant-verify", help="check the DFT-based SVD of a circulant Laplacian")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--q", type=_q_list, required=True, help="comma-separated generator set")
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--out", help="report path (default stdout)")
    s.set_defaults(func=cmd_circulant_verify)

    s = sub.add_parser("eulerian-sweep", help="frequencies along (1-t)L + tL^T")
    s.add_argument("--graph", required=True)
    s.add_argument("--steps", type=int, default=11, help="number of grid points in [0, 1]")
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--fd-step", type=float, default=1e-6)
    s.add_argument("--out", required=True, help="CSV t,i,sigma")
    s.add_argument("--report")
    s.set_defaults(func=cmd_eulerian_sweep)

    s = sub.add_parser("denoise", help="bandlimiting denoising experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=_nonneg_int, help="override the config's master seed")
    s.add_argument("--out", required=True, help="CSV of per-trial rows")
    s.add_argument("--report")
    s.set_defaults(func=cmd_denoise)

    s = sub.add_parser("generate", help="write a generated graph or signal")
    s.add_argument("kind", choices=["circulant", "knn", "cluster-cycle", "random", "undirected", "eulerian", "signal"])
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--q", type=_q_list, default=[1])
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--weight-low", type=float, default=0.8)
    s.add_argument("--weight-high", type=float, default=1.2)
    s.add_argument("--clusters", type=int, default=3)
    s.add_argument("--size", type=int, default=5)
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--cycles", type=int, default=3)
    s.add_argument("--graph", help="graph file (signal generation)")
    s.add_argument("--signal-kind", choices=["random", "smooth", "piecewise"], default="random")
    s.add_argument("--components", type=int, default=10)
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--pieces", type=int, default=2)
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_generate)
    return p


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise GraphValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise GraphValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        limit = _thread_limit()
        if args.command == "generate" and args.kind == "signal" and not args.graph:
            raise GraphValidationError("generate signal needs --graph")
        if limit is None:
            return args.func(args)
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=limit):
            return args.func(args)
    except (GraphValidationError, OSError) as exc:
        print(f"svdgft {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConsistencyError, HypothesisViolation) as exc:
        print(f"svdgft {args.command}: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
