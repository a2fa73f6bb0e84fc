"""Reference signal generators with ground-truth metadata.

Every generator records what it hid in the signal (coefficients, supports,
component waveforms) in the returned object's meta dict so experiments can
score themselves without re-deriving the truth.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .tfa import MultivariateSignal
from .transforms import Signal, UniformGrid, build_transform

_MV_SPAN = 128                   # multivariate examples live on t in [-128, 128]


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def add_awgn(values: np.ndarray, snr_db: float, rng) -> tuple[np.ndarray, float]:
    """Add white Gaussian noise scaled to hit snr_db exactly.

    Complex inputs get circular noise. Returns the noisy signal and the
    per-sample noise deviation actually used.
    """
    values = np.asarray(values)
    rng = _rng(rng)
    if np.iscomplexobj(values):
        noise = rng.standard_normal(values.shape) + 1j * rng.standard_normal(values.shape)
    else:
        noise = rng.standard_normal(values.shape)
    signal_norm = np.linalg.norm(values)
    noise_norm = np.linalg.norm(noise)
    if signal_norm == 0 or noise_norm == 0:
        raise InvalidArgument("cannot scale noise for a zero signal")
    scale = signal_norm * 10.0 ** (-snr_db / 20.0) / noise_norm
    sigma = scale * (np.sqrt(2.0) if np.iscomplexobj(values) else 1.0)
    return values + scale * noise, float(scale)


def _sparse_in_domain(kind: str, n: int, k: int, params: dict, rng) -> Signal:
    op = build_transform(kind, n)
    positions = params.get("positions")
    if positions is None:
        positions = np.sort(rng.choice(n, size=k, replace=False))
    positions = np.asarray(positions, dtype=int)
    amplitudes = params.get("amplitudes")
    if amplitudes is None:
        amplitudes = rng.uniform(0.5, 1.5, size=positions.size)
    amplitudes = np.asarray(amplitudes, dtype=float)
    coeffs = np.zeros(n, dtype=complex if kind == "dft" else float)
    if kind == "dft":
        phases = params.get("phases")
        if phases is None:
            phases = rng.uniform(0.0, 2.0 * np.pi, size=positions.size)
        coeffs[positions] = n * amplitudes * np.exp(1j * np.asarray(phases))
    else:
        coeffs[positions] = amplitudes
    values = op.inverse @ coeffs
    meta = {"kind": kind, "support": positions, "coefficients": coeffs[positions],
            "k": int(positions.size)}
    return Signal(values, UniformGrid(n), meta)


def _tones(n: int, table) -> Signal:
    """Sum of sinusoids given as (amplitude, kind, cycles_num, phase) rows,
    where the angular argument is cycles_num * pi * n / 128."""
    idx = np.arange(n)
    values = np.zeros(n)
    for amp, fn, cyc, phase in table:
        arg = cyc * np.pi * idx / 128.0 + phase
        values += amp * (np.sin(arg) if fn == "sin" else np.cos(arg))
    return Signal(values, UniformGrid(n), {"tones": list(table)})


def generate(model: str, params: dict | None = None, seed=None):
    """Build one of the named reference signals.

    Models: dft-sparse, dct-sparse, dht1-sparse, three-tone, mixed-tone,
    sigop, closesig, mv5.
    """
    params = dict(params or {})
    rng = _rng(seed)

    if model in ("dft-sparse", "dct-sparse", "dht1-sparse"):
        n = int(params.get("n", 128))
        k = int(params.get("k", 3))
        kind = {"dft-sparse": "dft", "dct-sparse": "dct1d",
                "dht1-sparse": "dht1"}[model]
        if kind == "dht1":
            op = build_transform("dht1", n, sigma=float(params.get("sigma", 1.0)))
            positions = params.get("positions")
            if positions is None:
                positions = np.sort(rng.choice(n, size=k, replace=False))
            positions = np.asarray(positions, dtype=int)
            amplitudes = np.asarray(
                params.get("amplitudes", rng.uniform(0.5, 1.5, positions.size)),
                dtype=float)
            coeffs = np.zeros(n)
            coeffs[positions] = amplitudes
            from .transforms import HermiteGrid
            meta = {"kind": "dht1", "support": positions,
                    "coefficients": amplitudes, "k": int(positions.size)}
            return Signal(op.inverse @ coeffs,
                          HermiteGrid(op.basis.nodes.copy(), op.basis.sigma), meta)
        return _sparse_in_domain(kind, n, k, params, rng)

    if model == "three-tone":
        n = int(params.get("n", 128))
        return _tones(n, [(4.0, "sin", 4, 0.0),
                          (3.0, "cos", 42, np.pi / 8),
                          (5.7, "sin", 240, 0.0)])

    if model == "mixed-tone":
        n = int(params.get("n", 128))
        return _tones(n, [(1.0, "cos", 32, 0.0),
                          (2.0, "cos", 24, np.pi / 8),
                          (-4.0, "sin", 240, 0.0)])

    if model == "sigop":
        n = int(params.get("n", 77))
        sigma0 = float(params.get("sigma0", 2.1))
        m = np.arange(n) - n // 2
        values = 3.0 * np.sin(5.0 * np.pi * m / n) * np.exp(-m * m / (2.0 * sigma0 ** 2))
        return Signal(values, UniformGrid(n, dt=1.0 / n, centered=True),
                      {"sigma0": sigma0})

    if model == "closesig":
        t = np.arange(-_MV_SPAN, _MV_SPAN + 1, dtype=float)
        phases = params.get("phases")
        if phases is None:
            phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
        phases = np.asarray(phases, dtype=float)
        phi = (t / 16.0) ** 4 / 128.0 - 8.0 * np.pi * (t / 16.0) ** 2 / 64.0
        envelope = np.exp(-((t / 128.0) ** 2))
        base = 0.5 * envelope * np.exp(1j * phi)
        channels = np.stack([
            (base * np.exp(1j * p) + base.conj() * np.exp(-1j * p)).real
            for p in phases])
        components = np.stack([base, base.conj()])
        meta = {"components": components, "phases": phases, "t": t}
        return MultivariateSignal(channels.astype(float), UniformGrid(t.size),
                                  meta)

    if model == "mv5":
        t = np.arange(-_MV_SPAN, _MV_SPAN + 1, dtype=float)
        u = t / 16.0
        comps = np.stack([
            np.exp(-((t / 96.0) ** 2)) * np.exp(1j * (-np.pi * u ** 2 / 5.0)),
            1.2 * np.exp(-((t / 96.0) ** 2))
            * np.exp(1j * (np.pi * u ** 3 / 32.0 + 3.0 * np.pi * u ** 2 / 10.0)),
            0.9 * np.exp(-((t / 128.0) ** 2))
            * np.exp(1j * (np.pi * u ** 4 / 200.0 + np.pi * t / 8.0)),
            np.exp(-((t / 16.0) ** 2)) * np.exp(1j * (3.0 * np.pi * t / 4.0)),
            np.exp(-((t / 96.0) ** 2))
            * np.exp(1j * (-6.0 * np.pi * u ** 2 / 25.0 + np.pi * t / 4.0)),
        ])
        n_channels = int(params.get("n_channels", 3))
        phases = params.get("phases")
        if phases is None:
            phases = rng.uniform(0.0, 2.0 * np.pi, size=(5, n_channels))
        phases = np.asarray(phases, dtype=float)
        channels = np.einsum("pc,pn->cn", np.exp(1j * phases), comps)
        noise_sigma = float(params.get("noise_sigma", 0.0))
        if noise_sigma > 0.0:
            channels = channels + noise_sigma * (
                rng.standard_normal(channels.shape)
                + 1j * rng.standard_normal(channels.shape))
        meta = {"components": comps, "phases": phases, "t": t,
                "noise_sigma": noise_sigma}
        return MultivariateSignal(channels, UniformGrid(t.size), meta)

    raise InvalidArgument(f"unknown model {model!r}")
