"""Sparse reconstruction from reduced measurements.

Greedy pursuits (OMP, CoSaMP), single-pass and iterative threshold detection
with closed-form noise statistics, and the measure-steepest-descent
reconstruction that needs no sparsity assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericFailure
from .measurement import PartialMatrix, initial_estimate
from .theory import detection_threshold
from .transforms import Signal, TransformOperator

_COS_OSCILLATION = math.cos(math.radians(170.0))


@dataclass
class ReconConfig:
    eps: float = 1e-10           # residual norm stop
    max_iter: int = 1000
    r: int = 1                   # atoms admitted per greedy pass
    k: int | None = None
    p_nn: float = 0.99
    mu_step: float = 1.0
    delta_init: float | None = None
    delta_shrink: float = 3.0
    t_stop_db: float = -100.0


@dataclass
class ReconResult:
    coefficients: np.ndarray
    support: np.ndarray
    residual_norm: float
    iterations: int
    thresholds: list = field(default_factory=list)
    flags: list = field(default_factory=list)


def _largest(values: np.ndarray, r: int) -> np.ndarray:
    """Positions of the r largest magnitudes; ties go to the lowest index."""
    order = np.argsort(-np.abs(values), kind="stable")
    return order[:r]


def ls_on_support(a: PartialMatrix, y: np.ndarray, support) -> np.ndarray:
    """Least-squares coefficients on a fixed support, zero elsewhere."""
    support = np.asarray(support, dtype=int)
    y = np.asarray(y)
    cols = a.entries[:, support]
    sol, _, rank, _ = np.linalg.lstsq(cols, y, rcond=None)
    if rank < support.size:
        raise NumericFailure(
            f"rank-deficient least squares on support {support.tolist()}")
    out = np.zeros(a.n_coefficients, dtype=np.result_type(a.entries, y))
    out[support] = sol
    return out


def omp(a: PartialMatrix, y: np.ndarray, cfg: ReconConfig | None = None) -> ReconResult:
    """Orthogonal matching pursuit, r atoms per pass."""
    cfg = cfg or ReconConfig()
    y = np.asarray(y)
    support = np.array([], dtype=int)
    coeffs = np.zeros(a.n_coefficients, dtype=np.result_type(a.entries, y))
    resid = y.astype(coeffs.dtype, copy=True)
    flags: list = []
    it = 0
    while np.linalg.norm(resid) > cfg.eps and it < cfg.max_iter:
        proxy = a.entries.conj().T @ resid
        picked = _largest(proxy, cfg.r)
        merged = np.union1d(support, picked)
        if merged.size == support.size:
            flags.append("stagnated")
            break
        if merged.size > a.n_available:
            raise NumericFailure(
                f"support grew to {merged.size} atoms with only "
                f"{a.n_available} measurements")
        support = merged
        coeffs = ls_on_support(a, y, support)
        resid = y - a.entries[:, support] @ coeffs[support]
        it += 1
    return ReconResult(coeffs, support, float(np.linalg.norm(resid)), it,
                       flags=flags)


def cosamp(a: PartialMatrix, y: np.ndarray, k: int,
           cfg: ReconConfig | None = None) -> ReconResult:
    """Compressive sampling matching pursuit with fixed target sparsity k.

    Each pass solves least squares on the union of the current support and
    the 2k strongest residual correlations, then keeps the k largest entries
    of that solution.
    """
    cfg = cfg or ReconConfig()
    y = np.asarray(y)
    if k < 1:
        raise InvalidArgument(f"sparsity must be positive, got {k}")
    if 2 * k > a.n_available:
        raise InvalidArgument(
            f"cosamp needs 2k <= N_A, got k={k}, N_A={a.n_available}")
    coeffs = np.zeros(a.n_coefficients, dtype=np.result_type(a.entries, y))
    resid = y.astype(coeffs.dtype, copy=True)
    support = np.array([], dtype=int)
    flags: list = []
    it = 0
    prev_norm = np.inf
    while np.linalg.norm(resid) > cfg.eps and it < cfg.max_iter:
        proxy = a.entries.conj().T @ resid
        union = np.union1d(_largest(proxy, 2 * k), np.flatnonzero(coeffs))
        sol, _, rank, _ = np.linalg.lstsq(a.entries[:, union], y, rcond=None)
        if rank < union.size:
            raise NumericFailure(
                f"rank-deficient least squares on support {union.tolist()}")
        keep = _largest(sol, k)
        coeffs = np.zeros_like(coeffs)
        coeffs[union[keep]] = sol[keep]
        resid = y - a.entries @ coeffs
        it += 1
        new_support = np.sort(union[keep])
        norm = float(np.linalg.norm(resid))
        if np.array_equal(new_support, support) and norm >= prev_norm - 1e-15:
            support = new_support
            flags.append("stagnated")
            break
        support, prev_norm = new_support, norm
    return ReconResult(coeffs, support, float(np.linalg.norm(resid)), it,
                       flags=flags)


def _noise_sigma(a: PartialMatrix, y: np.ndarray, x0: np.ndarray) -> float:
    """Missing-sample noise deviation of the zero-filled transform, estimated
    from the data on the operator's own scale."""
    n = a.op.size
    n_a = a.n_available
    if a.domain_kind == "dft":
        return math.sqrt((n - n_a) / (n - 1) * float(np.sum(np.abs(y) ** 2)))
    base = n_a * (n - n_a) / (n * n * (n - 1))
    if a.domain_kind == "dht1":
        energy = (n / n_a) * float(np.sum(np.abs(x0) ** 2))
    else:
        energy = (n / n_a) * float(np.sum(np.abs(y) ** 2))
    return math.sqrt(base * energy)


def _threshold_for(a: PartialMatrix, sigma: float, p_nn: float) -> float:
    if a.domain_kind == "dft":
        return detection_threshold(sigma, a.op.size, 0, p_nn, form="log")
    return detection_threshold(sigma, a.op.size, 0, p_nn, form="erf")


def threshold_single(a: PartialMatrix, y: np.ndarray,
                     p_nn: float = 0.99) -> ReconResult:
    """One-shot support detection by thresholding the zero-filled transform."""
    y = np.asarray(y)
    x0 = initial_estimate(a, y)
    sigma = _noise_sigma(a, y, x0)
    thr = _threshold_for(a, sigma, p_nn)
    mags = np.abs(x0)
    support = np.flatnonzero(mags > max(thr, 1e-12 * mags.max(initial=0.0)))
    if support.size == 0:
        coeffs = np.zeros(a.n_coefficients, dtype=np.result_type(a.entries, y))
        return ReconResult(coeffs, support, float(np.linalg.norm(y)), 1,
                           thresholds=[thr], flags=["empty-support"])
    coeffs = ls_on_support(a, y, support)
    resid = y - a.entries[:, support] @ coeffs[support]
    return ReconResult(coeffs, support, float(np.linalg.norm(resid)), 1,
                       thresholds=[thr])


def threshold_iterative(a: PartialMatrix, y: np.ndarray,
                        cfg: ReconConfig | None = None) -> ReconResult:
    """Threshold detection repeated on the residual; the support only grows.

    Strong components detected in early passes are removed through a full
    least-squares fit, which lowers the noise floor enough to expose the
    weaker ones.
    """
    cfg = cfg or ReconConfig()
    y = np.asarray(y)
    support = np.array([], dtype=int)
    coeffs = np.zeros(a.n_coefficients, dtype=np.result_type(a.entries, y))
    resid = y.astype(coeffs.dtype, copy=True)
    thresholds: list = []
    flags: list = []
    it = 0
    while np.linalg.norm(resid) > cfg.eps and it < cfg.max_iter:
        x0 = initial_estimate(a, resid)
        sigma = _noise_sigma(a, resid, x0)
        thr = _threshold_for(a, sigma, cfg.p_nn)
        thresholds.append(thr)
        mags = np.abs(x0)
        detected = np.flatnonzero(mags > max(thr, 1e-12 * mags.max(initial=0.0)))
        new = np.setdiff1d(detected, support)
        it += 1
        if new.size == 0:
            flags.append("no-new-detections")
            break
        support = np.union1d(support, new)
        if support.size > a.n_available:
            raise NumericFailure(
                f"support grew to {support.size} atoms with only "
                f"{a.n_available} measurements")
        coeffs = ls_on_support(a, y, support)
        resid = y - a.entries[:, support] @ coeffs[support]
    return ReconResult(coeffs, support, float(np.linalg.norm(resid)), it,
                       thresholds=thresholds, flags=flags)


@dataclass
class GradientResult:
    signal: Signal
    t_r_db: float
    epochs: int
    sweeps: int
    converged: bool
    measure_trace: list = field(default_factory=list)
    flags: list = field(default_factory=list)


def gradient_recon(x: Signal | np.ndarray, missing, op: TransformOperator,
                   cfg: ReconConfig | None = None) -> GradientResult:
    """Fill missing samples by steepest descent on the transform-domain l1
    norm, probing each missing sample with +/-delta test deviations.

    Available samples are never touched. delta shrinks by delta_shrink once
    successive gradients turn against each other (angle above 170 degrees),
    and the epoch-to-epoch change ratio T_r decides convergence.
    """
    cfg = cfg or ReconConfig()
    grid = x.grid if isinstance(x, Signal) else None
    values = np.array(x.values if isinstance(x, Signal) else x)
    missing = np.asarray(missing, dtype=int)
    if missing.size and (missing.min() < 0 or missing.max() >= values.shape[0]):
        raise InvalidArgument("missing indices out of range")
    is_complex = np.iscomplexobj(values)
    work = values.astype(complex if is_complex else float)
    work[missing] = 0.0

    col_l1 = np.abs(op.forward).sum(axis=0).max()
    phi = op.forward / col_l1
    phi_miss = phi[:, missing]

    stop_ratio = 10.0 ** (cfg.t_stop_db / 10.0)
    delta = cfg.delta_init if cfg.delta_init is not None else float(np.abs(work).max())
    trace: list = []
    flags: list = []
    if missing.size == 0 or delta == 0.0:
        return GradientResult(Signal(work, grid) if grid else Signal(work, None),
                              -math.inf, 0, 0, True, trace, flags)

    def sweep_gradient(current, d):
        c0 = phi @ current
        plus = np.abs(c0[:, None] + d * phi_miss).sum(axis=0)
        minus = np.abs(c0[:, None] - d * phi_miss).sum(axis=0)
        g = plus - minus
        if is_complex:
            plus_i = np.abs(c0[:, None] + 1j * d * phi_miss).sum(axis=0)
            minus_i = np.abs(c0[:, None] - 1j * d * phi_miss).sum(axis=0)
            g = g + 1j * (plus_i - minus_i)
        return g

    sweeps = 0
    epochs = 0
    t_r = math.inf
    converged = False
    while sweeps < cfg.max_iter and not converged and delta > 0.0:
        snapshot = work[missing].copy()
        g_prev = None
        while sweeps < cfg.max_iter:
            g = sweep_gradient(work, delta)
            work[missing] -= cfg.mu_step * g
            sweeps += 1
            if g_prev is not None:
                denom = np.linalg.norm(g) * np.linalg.norm(g_prev)
                cos_angle = 0.0 if denom == 0 else float(
                    np.real(np.vdot(g_prev, g)) / denom)
                if denom == 0 or cos_angle < _COS_OSCILLATION:
                    break
            g_prev = g
        epochs += 1
        trace.append(float(np.abs(phi @ work).sum()))
        num = float(np.sum(np.abs(snapshot - work[missing]) ** 2))
        den = float(np.sum(np.abs(work[missing]) ** 2))
        t_r = (0.0 if num == 0.0 else math.inf) if den == 0.0 else num / den
        if t_r < stop_ratio:
            converged = True
            break
        delta /= cfg.delta_shrink
    if not converged:
        flags.append("max-iterations")
    t_r_db = -math.inf if t_r == 0.0 else 10.0 * math.log10(t_r)
    out = Signal(work, grid) if grid is not None else Signal(work, None)
    return GradientResult(out, t_r_db, epochs, sweeps, converged, trace, flags)
