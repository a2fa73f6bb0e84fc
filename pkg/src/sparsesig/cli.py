"""Command-line front end.

Every subcommand accepts --seed, --out, and --format {csv,json}; identical
invocations produce byte-identical output files. Structured failures
(invalid arguments, parse errors, numeric breakdowns) exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as sio
from .errors import InvalidArgument, NumericFailure, ParseError
from .experiments import ExperimentSpec, run_experiment
from .generators import generate
from .hermite_opt import (CompressResult, ScaleOptConfig,
                          compress_keep_largest, denoise_hard_threshold,
                          optimize_scale, optimize_shift)
from .measurement import build_partial_matrix
from .recon import (ReconConfig, cosamp, gradient_recon, omp,
                    threshold_iterative, threshold_single)
from .tfa import (DecomposeConfig, MultivariateSignal, decompose, smethod,
                  spectrogram, stft, wigner)
from .transforms import (IndexGrid, Signal, UniformGrid, build_transform,
                         transform)


def _parse_shape(ns) -> int | tuple:
    if ns.shape:
        parts = ns.shape.lower().split("x")
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
        return int(parts[0])
    if ns.n is None:
        raise InvalidArgument("one of --n or --shape is required")
    return ns.n


def _load_series(path) -> tuple[np.ndarray, np.ndarray]:
    idx, values = sio.read_csv(path)
    return idx.astype(int), values


def _emit_series(ns, values: np.ndarray, indices=None, extra=None) -> None:
    if ns.out is None:
        raise InvalidArgument("--out is required")
    if ns.format == "csv":
        sio.write_csv(ns.out, values, indices=indices)
    else:
        payload = {"values": values, "indices": indices}
        if extra:
            payload.update(extra)
        sio.write_json(ns.out, payload)


def _cmd_gen(ns) -> int:
    params = json.loads(ns.params) if ns.params else {}
    if ns.n is not None:
        params.setdefault("n", ns.n)
    if ns.k is not None:
        params.setdefault("k", ns.k)
    if ns.snr is not None:
        params.setdefault("snr_db", ns.snr)
    sig = generate(ns.model, params, seed=ns.seed)
    if isinstance(sig, MultivariateSignal):
        if ns.out is None:
            raise InvalidArgument("--out is required")
        for c in range(sig.n_channels):
            stem, dot, suffix = ns.out.rpartition(".")
            path = f"{stem}.ch{c}{dot}{suffix}" if dot else f"{ns.out}.ch{c}"
            if ns.format == "csv":
                sio.write_csv(path, sig.channels[c])
            else:
                sio.write_json(path, {"values": sig.channels[c]})
        return 0
    meta = {k: v for k, v in sig.meta.items()} if ns.format == "json" else None
    _emit_series(ns, sig.values, extra={"meta": meta} if meta else None)
    return 0


def _cmd_transform(ns) -> int:
    _, values = _load_series(ns.input)
    shape = ns.shape and _parse_shape(ns) or len(values)
    op = build_transform(ns.kind, shape, sigma=ns.sigma)
    if ns.kind == "dht1":
        from .transforms import HermiteGrid, hermite_nodes
        grid = HermiteGrid(ns.sigma * hermite_nodes(op.size), ns.sigma)
    elif ns.kind == "dct2d":
        grid = IndexGrid(op.shape)
    else:
        grid = UniformGrid(op.size)
    out = transform(op, Signal(values.reshape(-1) if ns.kind != "dct2d"
                               else values.reshape(op.shape), grid),
                    direction="inverse" if ns.inverse else "forward")
    _emit_series(ns, np.asarray(out.values).reshape(-1))
    return 0


def _cmd_reconstruct(ns) -> int:
    support, y = _load_series(ns.input)
    shape = _parse_shape(ns)
    op = build_transform(ns.domain, shape, sigma=ns.sigma)
    cfg = ReconConfig(k=ns.k, max_iter=ns.max_iter or 1000, p_nn=ns.pnn)
    if ns.algorithm == "gradient":
        full = np.zeros(op.size, dtype=y.dtype)
        full[support] = y
        missing = np.setdiff1d(np.arange(op.size), support)
        res = gradient_recon(full, missing, op, cfg)
        _emit_series(ns, np.asarray(res.signal.values),
                     extra={"t_r_db": res.t_r_db, "flags": res.flags})
        return 0
    a = build_partial_matrix(op, support)
    if ns.algorithm == "omp":
        if ns.k is not None:
            cfg = ReconConfig(k=ns.k, eps=0.0, max_iter=ns.k)
        res = omp(a, y, cfg)
    elif ns.algorithm == "cosamp":
        if ns.k is None:
            raise InvalidArgument("cosamp requires --k")
        res = cosamp(a, y, ns.k, cfg)
    elif ns.algorithm == "threshold":
        res = threshold_single(a, y, cfg)
    elif ns.algorithm == "threshold-iter":
        res = threshold_iterative(a, y, cfg)
    else:
        raise InvalidArgument(f"unknown algorithm {ns.algorithm!r}")
    _emit_series(ns, res.coefficients,
                 extra={"support": res.support, "flags": res.flags,
                        "iterations": res.iterations})
    return 0


def _cmd_denoise(ns) -> int:
    _, values = _load_series(ns.input)
    n = len(values)
    from .transforms import HermiteGrid, hermite_nodes
    if ns.kind == "dht1":
        grid = HermiteGrid(ns.sigma * hermite_nodes(n), ns.sigma)
    else:
        grid = UniformGrid(n)
    out = denoise_hard_threshold(Signal(values.real, grid), ns.sigma_eps,
                                 alpha=ns.alpha, kind=ns.kind)
    _emit_series(ns, out.values)
    return 0


def _cmd_optimize(ns) -> int:
    _, values = _load_series(ns.input)
    sig = Signal(values.real, UniformGrid(len(values), dt=ns.dt,
                                          centered=True))
    cfg = ScaleOptConfig(mu=ns.mu, max_iter=ns.max_iter)
    if ns.lmax > 0:
        shift = optimize_shift(sig, l_max=ns.lmax, cfg=cfg)
        payload = {"lag": shift.l_opt, "lam": shift.lam,
                   "lam_times_n": shift.lam * len(values),
                   "measure": shift.measure,
                   "per_shift": [list(row) for row in shift.per_shift]}
    else:
        res = optimize_scale(sig, cfg)
        payload = {"lam": res.lam, "lam_times_n": res.lam * len(values),
                   "measure": res.measure, "iterations": res.iterations,
                   "flags": res.flags}
    if ns.target_e is not None:
        comp: CompressResult = compress_keep_largest(sig, ns.target_e)
        payload["kept"] = comp.kept
        payload["error"] = comp.error
    if ns.out is None:
        raise InvalidArgument("--out is required")
    sio.write_json(ns.out, payload)
    return 0


def _cmd_decompose(ns) -> int:
    channels = []
    for path in ns.input:
        _, values = _load_series(path)
        channels.append(values)
    mv = MultivariateSignal(np.asarray(channels),
                            UniformGrid(len(channels[0])))
    cfg = DecomposeConfig(r_kind=ns.r_kind, l_d=ns.l_d,
                          n_components=ns.components,
                          win_len=ns.win_len, delta=ns.delta)
    res = decompose(mv, cfg)
    if ns.out is None:
        raise InvalidArgument("--out is required")
    if ns.format == "csv":
        for i, comp in enumerate(res.components):
            sio.write_csv(f"{ns.out}.comp{i}.csv", comp)
        sio.write_json(f"{ns.out}.json",
                       {"n_components": len(res.components),
                        "eigenvalues": res.eigenvalues,
                        "converged": res.converged, "flags": res.flags})
    else:
        sio.write_json(ns.out, {"components": res.components,
                                "eigenvalues": res.eigenvalues,
                                "converged": res.converged,
                                "flags": res.flags})
    return 0


def _cmd_tfr(ns) -> int:
    _, values = _load_series(ns.input)
    if ns.kind == "spec":
        tfr = spectrogram(values, ns.win_len, hop=ns.hop)
    elif ns.kind == "stft":
        tfr = stft(values, ns.win_len, hop=ns.hop)
    elif ns.kind == "pwd":
        tfr = wigner(values, ns.win_len, hop=ns.hop)
    elif ns.kind == "sm":
        tfr = smethod(stft(values, ns.win_len, hop=ns.hop), ns.l_d)
    else:
        raise InvalidArgument(f"unknown tfr kind {ns.kind!r}")
    if ns.pgm:
        sio.write_pgm(ns.pgm, np.abs(np.asarray(tfr.values)))
    if ns.out is None:
        return 0
    if ns.format == "csv":
        mat = np.asarray(tfr.values)
        lines = [",".join(repr(float(np.real(v))) for v in row)
                 for row in mat]
        with open(ns.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        sio.write_json(ns.out, {"kind": tfr.kind, "values": tfr.values,
                                "win_len": tfr.win_len, "hop": tfr.hop})
    return 0


def _cmd_mc(ns) -> int:
    params = json.loads(ns.params) if ns.params else {}
    spec = ExperimentSpec(ns.experiment, params, trials=ns.trials,
                          seed=ns.seed)
    result = run_experiment(spec, out_prefix=ns.out)
    if ns.out is None:
        sys.stdout.write(json.dumps(result.summary, default=str,
                                    sort_keys=True) + "\n")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sparsesig",
        description="Sparse reconstruction, Hermite tooling, and "
                    "time-frequency decomposition.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a model signal")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--params", default=None, help="JSON dict of extras")
    _add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("transform", help="apply a transform to a series")
    p.add_argument("--kind", required=True,
                   choices=("dft", "dct1d", "dct2d", "dht1", "dht2"))
    p.add_argument("--input", required=True)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--shape", default=None, help="e.g. 16x20 for dct2d")
    _add_common(p)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("reconstruct",
                       help="recover sparse coefficients from a reduced set")
    p.add_argument("--domain", required=True,
                   choices=("dft", "dct1d", "dct2d", "dht1", "dht2"))
    p.add_argument("--algorithm", required=True,
                   choices=("omp", "cosamp", "threshold", "threshold-iter",
                            "gradient"))
    p.add_argument("--input", required=True,
                   help="CSV of available samples (index = position)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--shape", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--pnn", type=float, default=0.99)
    _add_common(p)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("denoise", help="hard-threshold Hermite denoising")
    p.add_argument("--input", required=True)
    p.add_argument("--sigma-eps", type=float, required=True)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--kind", choices=("dht1", "dht2"), default="dht1")
    p.add_argument("--sigma", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=_cmd_denoise)

    p = sub.add_parser("optimize-hermite",
                       help="optimize Hermite scale (and shift)")
    p.add_argument("--input", required=True)
    p.add_argument("--mu", type=float, default=0.05)
    p.add_argument("--lmax", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--targetE", dest="target_e", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("decompose",
                       help="extract components of a multivariate signal")
    p.add_argument("--input", action="append", required=True,
                   help="repeat per channel")
    p.add_argument("--r-kind", choices=("direct", "sm"), default="direct")
    p.add_argument("--l-d", type=int, default=10)
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--win-len", type=int, default=None)
    p.add_argument("--delta", type=float, default=0.1)
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("tfr", help="time-frequency representation")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("spec", "stft", "pwd", "sm"),
                   default="spec")
    p.add_argument("--win-len", type=int, required=True)
    p.add_argument("--hop", type=int, default=1)
    p.add_argument("--l-d", type=int, default=0)
    p.add_argument("--pgm", default=None, help="also write a PGM heatmap")
    _add_common(p)
    p.set_defaults(func=_cmd_tfr)

    p = sub.add_parser("mc", help="run a canned Monte-Carlo experiment")
    p.add_argument("--experiment", required=True,
                   choices=("variance", "snr", "detection", "nonsparse",
                            "nonsparse2d"))
    p.add_argument("--params", default=None, help="JSON dict")
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=_cmd_mc)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return ns.func(ns)
    except (InvalidArgument, ParseError, NumericFailure) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def entry() -> None:
    raise SystemExit(main())
