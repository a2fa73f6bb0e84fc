"""Canned experiments pairing closed-form laws with their empirical twins.

Each experiment returns a result whose tables hold matched theory/empirical
columns; run_experiment dispatches by name and optionally writes the tables
to disk. All randomness flows through per-trial generators derived from the
experiment seed, so results are order-independent and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import io as sio
from .errors import InvalidArgument
from .measurement import build_partial_matrix, sample_support
from .recon import ReconConfig, omp
from .theory import (SparseModel, detection_error_probability,
                     missing_sample_variance, nonsparse_error_energy,
                     snr_after_reconstruction)
from .transforms import build_transform


@dataclass
class ExperimentSpec:
    name: str
    params: dict = field(default_factory=dict)
    trials: int = 1000
    seed: int = 0


@dataclass
class ExperimentResult:
    name: str
    summary: dict
    tables: dict                 # table name -> dict of equal-length columns


def _support_matrix(n: int, n_a: int, trials: int, seed: int) -> np.ndarray:
    """(trials, n) zero/one masks of independent uniform supports."""
    masks = np.zeros((trials, n))
    for t in range(trials):
        masks[t, sample_support(n, n_a, np.random.default_rng([seed, t]))] = 1.0
    return masks


def variance_experiment(kind: str, shape, n_a: int, positions, amplitudes,
                        trials: int = 10000, seed: int = 0,
                        sigma: float = 1.0) -> ExperimentResult:
    """Empirical missing-sample mean/variance of X0 against the closed form.

    Checks every component position plus a spread of noise-only positions.
    """
    model = SparseModel(kind, shape, amplitudes, list(positions))
    n = model.n_total
    op = build_transform(kind, shape, sigma=sigma)
    coeffs = np.zeros(n, dtype=complex if kind == "dft" else float)
    flat_pos = [int(np.ravel_multi_index(p, shape)) if kind == "dct2d" else p
                for p in model.positions]
    # dft amplitudes are harmonic magnitudes; the unnormalized coefficient
    # carries the extra factor n
    coeffs[flat_pos] = model.amplitudes * (n if kind == "dft" else 1)
    x = op.inverse @ coeffs

    masks = _support_matrix(n, n_a, trials, seed)
    x0 = op.forward @ (masks * x).T          # (n, trials)

    if kind == "dct2d":
        taken = set(map(tuple, model.positions))
        noise_flat = [i for i in range(n)
                      if np.unravel_index(i, shape) not in taken][::max(1, n // 8)]
        checked = flat_pos + noise_flat
        report_at = list(model.positions) + [np.unravel_index(i, shape)
                                             for i in noise_flat]
    else:
        noise = [i for i in range(n) if i not in flat_pos][::max(1, n // 8)]
        checked = flat_pos + noise
        report_at = flat_pos + noise

    theory_mean, theory_var, emp_mean, emp_var = [], [], [], []
    for flat, at in zip(checked, report_at):
        rep = missing_sample_variance(model, n_a, at,
                                      basis=getattr(op, "basis", None))
        theory_mean.append(rep.mean)
        theory_var.append(rep.variance)
        emp_mean.append(float(np.mean(np.real(x0[flat]))))
        # complex var is E|X - EX|^2, matching the dft law's definition
        emp_var.append(float(np.var(x0[flat], ddof=1)))
    table = {"position": [str(p) for p in report_at],
             "is_component": [p in (model.positions if kind != "dct2d"
                                    else list(map(tuple, model.positions)))
                              or p in flat_pos for p in report_at],
             "theory_mean": theory_mean, "theory_var": theory_var,
             "empirical_mean": emp_mean, "empirical_var": emp_var}
    worst = max(abs(e - t) / t for e, t in zip(emp_var, theory_var) if t > 0)
    return ExperimentResult("variance", {"kind": kind, "n_a": n_a,
                                         "trials": trials,
                                         "worst_rel_var_error": worst},
                            {"variance": table})


def snr_experiment(n: int, k: int, amplitudes, n_a_list,
                   sigma_eps2: float = 0.01, trials: int = 500,
                   seed: int = 0) -> ExperimentResult:
    """Reconstruction SNR of OMP on noisy reduced Hermite-domain samples
    versus the K/N_A gain law.

    Each N_A column uses one fixed signal whose component positions are
    drawn uniformly from {1..n-1}; the trials vary the available-sample set
    and the noise. The input SNR is measured on the available noisy samples
    and the theory column is the measured input plus 10 log10(N_A/K).
    Signal and error energies are averaged over the trials before the
    ratios are formed.
    """
    op = build_transform("dht1", n)
    amplitudes = np.asarray(amplitudes, dtype=float)
    rows_in, rows_theory, rows_emp = [], [], []
    for n_a in n_a_list:
        pos_rng = np.random.default_rng([seed, n_a])
        pos = np.sort(pos_rng.choice(np.arange(1, n), size=k, replace=False))
        coeffs = np.zeros(n)
        coeffs[pos] = amplitudes
        x = op.inverse @ coeffs
        e_sig = float(np.sum(x ** 2))
        e_sig_in = np.empty(trials)
        e_noise = np.empty(trials)
        e_err = np.empty(trials)
        for t in range(trials):
            rng = np.random.default_rng([seed, n_a, t])
            supp = sample_support(n, n_a, rng)
            noise = math.sqrt(sigma_eps2) * rng.standard_normal(n_a)
            y = x[supp] + noise
            e_sig_in[t] = np.sum(x[supp] ** 2)
            e_noise[t] = np.sum(noise ** 2)
            a = build_partial_matrix(op, supp)
            res = omp(a, y, ReconConfig(eps=0.0, max_iter=k))
            xr = op.inverse @ res.coefficients
            e_err[t] = np.sum((xr - x) ** 2)
        snr_in = 10.0 * math.log10(e_sig_in.mean() / e_noise.mean())
        rows_in.append(snr_in)
        rows_theory.append(snr_after_reconstruction(snr_in, k, n_a))
        rows_emp.append(10.0 * math.log10(e_sig / e_err.mean()))
    table = {"n_a": list(n_a_list), "snr_in_db": rows_in,
             "snr_theory_db": rows_theory, "snr_empirical_db": rows_emp}
    worst = max(abs(e - t) for e, t in zip(rows_emp, rows_theory))
    return ExperimentResult("snr", {"n": n, "k": k, "trials": trials,
                                    "worst_abs_error_db": worst},
                            {"snr": table})


def detection_experiment(n: int, positions, amplitudes, n_a_list,
                         trials: int = 3000, seed: int = 0,
                         sigma: float = 1.0) -> ExperimentResult:
    """Component-miss probabilities in the Hermite domain: exact integral,
    displacement approximation, and the empirical rate.

    A trial misses component l when some noise-only coefficient magnitude
    reaches that component's own coefficient magnitude.
    """
    op = build_transform("dht1", n, sigma=sigma)
    model = SparseModel("dht1", n, amplitudes, list(positions))
    pos = np.asarray(positions, dtype=int)
    coeffs = np.zeros(n)
    coeffs[pos] = model.amplitudes
    x = op.inverse @ coeffs
    noise_rows = np.setdiff1d(np.arange(n), pos)

    tables = {}
    summary_rows = []
    for n_a in n_a_list:
        masks = _support_matrix(n, n_a, trials, seed + n_a)
        c0 = op.forward @ (masks * x).T               # (n, trials)
        mags = np.abs(c0)
        worst_noise = mags[noise_rows].max(axis=0)    # (trials,)
        emp = (mags[pos] <= worst_noise[None, :]).mean(axis=1)
        exact = detection_error_probability(model, n_a, basis=op.basis,
                                            method="exact").per_component
        approx = detection_error_probability(model, n_a, basis=op.basis,
                                             method="approx").per_component
        tables[f"n_a_{n_a}"] = {"position": pos.tolist(),
                                "amplitude": model.amplitudes.tolist(),
                                "exact": exact.tolist(),
                                "approx": approx.tolist(),
                                "empirical": emp.tolist()}
        summary_rows.append({"n_a": int(n_a),
                             "worst_exact_gap": float(np.max(np.abs(emp - exact)))})
    return ExperimentResult("detection", {"n": n, "trials": trials,
                                          "rows": summary_rows}, tables)


def nonsparse_experiment(n: int, n_a: int, s_strong: int, k_list,
                         sigma_eps: float, trials: int = 200,
                         seed: int = 0) -> ExperimentResult:
    """K-term reconstruction error of a non-sparse DCT signal versus the
    missing-sample error energy law, across assumed sparsity K.

    The numerical error is measured at the recovered positions against the
    true coefficients there (the law describes the misrepresentation of the
    coefficients the K-term solver commits to, not the tail it never sees);
    per-realization errors are averaged on the dB scale.
    """
    op = build_transform("dct1d", n)
    l_idx = np.arange(1, n + 1)
    profile = np.where(l_idx <= s_strong, 1.0,
                       0.5 * np.exp(-2.0 * l_idx / (s_strong + 1.0)))
    k_list = list(k_list)
    err_num = {k: [] for k in k_list}
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        perm = rng.permutation(n)
        coeffs = np.zeros(n)
        coeffs[perm] = profile * rng.choice([-1.0, 1.0], size=n)
        x = op.inverse @ coeffs
        supp = sample_support(n, n_a, rng)
        noise = sigma_eps * rng.standard_normal(n_a)
        a = build_partial_matrix(op, supp)
        y = x[supp] + noise
        for k in k_list:
            res = omp(a, y, ReconConfig(eps=0.0, max_iter=k))
            picked = res.support
            err_num[k].append(float(np.sum(
                (res.coefficients[picked] - coeffs[picked]) ** 2) / k))
    rows_k, rows_num, rows_teor = [], [], []
    sorted_profile = np.sort(profile ** 2)[::-1]
    for k in k_list:
        unrec = float(np.sum(sorted_profile[k:]))
        teor = nonsparse_error_energy("dct1d", n, k, n_a, unrec,
                                      sigma_eps ** 2) / k
        rows_k.append(int(k))
        rows_num.append(float(np.mean(10.0 * np.log10(err_num[k]))))
        rows_teor.append(10.0 * np.log10(teor))
    table = {"k": rows_k, "numerical_db": rows_num, "theory_db": rows_teor}
    worst = max(abs(a - b) for a, b in zip(rows_num, rows_teor))
    return ExperimentResult("nonsparse", {"n": n, "n_a": n_a, "trials": trials,
                                          "worst_abs_gap_db": worst},
                            {"nonsparse": table})


def nonsparse2d_experiment(shape, n_a: int, k: int, trials: int = 100,
                           seed: int = 0) -> ExperimentResult:
    """K-term block reconstruction error for a non-sparse 2D-DCT block
    versus the 2D error-energy law.

    The block carries 16 distinct strong coefficients plus a smooth small
    tail; positions and signs are re-drawn each trial.
    """
    m_rows, n_cols = shape
    n = m_rows * n_cols
    op = build_transform("dct2d", shape)
    strong = np.linspace(1.0, 0.6, 16)
    tail = 0.05 * np.exp(-np.arange(1, n - 15) / 24.0)
    profile = np.concatenate([strong, tail])
    err_db = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        perm = rng.permutation(n)
        coeffs = np.zeros(n)
        coeffs[perm] = profile * rng.choice([-1.0, 1.0], size=n)
        x = op.inverse @ coeffs
        supp = sample_support(n, n_a, rng)
        a = build_partial_matrix(op, supp)
        res = omp(a, x[supp], ReconConfig(eps=0.0, max_iter=k))
        picked = res.support
        err_db.append(10.0 * np.log10(float(np.sum(
            (res.coefficients[picked] - coeffs[picked]) ** 2) / k)))
    unrec = float(np.sum(np.sort(profile ** 2)[::-1][k:]))
    teor = nonsparse_error_energy("dct2d", shape, k, n_a, unrec, 0.0) / k
    num_db = float(np.mean(err_db))
    teor_db = 10.0 * np.log10(teor)
    table = {"k": [k], "numerical_db": [num_db], "theory_db": [teor_db]}
    return ExperimentResult("nonsparse2d",
                            {"shape": list(shape), "n_a": n_a, "trials": trials,
                             "abs_gap_db": abs(num_db - teor_db)},
                            {"nonsparse2d": table})


_REGISTRY = {
    "variance": lambda spec: variance_experiment(trials=spec.trials,
                                                 seed=spec.seed, **spec.params),
    "snr": lambda spec: snr_experiment(trials=spec.trials, seed=spec.seed,
                                       **spec.params),
    "detection": lambda spec: detection_experiment(trials=spec.trials,
                                                   seed=spec.seed,
                                                   **spec.params),
    "nonsparse": lambda spec: nonsparse_experiment(trials=spec.trials,
                                                   seed=spec.seed,
                                                   **spec.params),
    "nonsparse2d": lambda spec: nonsparse2d_experiment(trials=spec.trials,
                                                       seed=spec.seed,
                                                       **spec.params),
}


def run_experiment(spec: ExperimentSpec, out_prefix=None) -> ExperimentResult:
    """Run a named experiment; optionally write summary JSON and table CSVs."""
    if spec.name not in _REGISTRY:
        raise InvalidArgument(
            f"unknown experiment {spec.name!r}; know {sorted(_REGISTRY)}")
    result = _REGISTRY[spec.name](spec)
    if out_prefix is not None:
        sio.write_json(f"{out_prefix}.json",
                       {"experiment": result.name, "summary": result.summary,
                        "seed": spec.seed, "trials": spec.trials})
        for tname, table in result.tables.items():
            _write_table_csv(f"{out_prefix}.{tname}.csv", table)
    return result


def _write_table_csv(path, table: dict) -> None:
    keys = list(table.keys())
    rows = len(next(iter(table.values())))
    lines = [",".join(keys)]
    for i in range(rows):
        lines.append(",".join(_fmt(table[k][i]) for k in keys))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v).replace(",", ";")
