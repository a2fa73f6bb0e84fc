"""Time-frequency representations and multivariate component decomposition.

STFT/spectrogram, pseudo Wigner distribution, the S-method bridging the two,
concentration measures, and the eigenvector-combination decomposition of
multivariate multicomponent signals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .transforms import Signal

_WINDOWS = ("hann", "rect")


@dataclass
class TFRMatrix:
    """Time-frequency grid; rows are time frames, columns frequency bins."""

    values: np.ndarray
    kind: str                    # stft | spec | pwd | sm
    win_len: int
    hop: int
    imag_residue: float = 0.0


@dataclass
class MultivariateSignal:
    channels: np.ndarray         # (n_channels, n)
    grid: object = None
    meta: dict = field(default_factory=dict)

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]


def _as_values(x) -> np.ndarray:
    values = np.asarray(x.values if isinstance(x, Signal) else x)
    if values.ndim != 1:
        raise InvalidArgument("expected a 1D signal")
    return values


def _window(name_or_array, m: np.ndarray) -> np.ndarray:
    if isinstance(name_or_array, str):
        if name_or_array == "hann":
            return 0.5 * (1.0 + np.cos(2.0 * np.pi * m / m.shape[0]))
        if name_or_array == "rect":
            return np.ones(m.shape[0])
        raise InvalidArgument(
            f"window must be one of {_WINDOWS} or an array, got {name_or_array!r}")
    w = np.asarray(name_or_array, dtype=float)
    if w.shape[0] != m.shape[0]:
        raise InvalidArgument("window length does not match win_len")
    return w


def stft(x, win_len: int, window="hann", hop: int = 1) -> TFRMatrix:
    """Short-time Fourier transform with the window centered on each frame.

    Frame n covers samples x(n+m) for m = -win_len//2 ... win_len-1-win_len//2
    with zeros outside the record; bin k carries exp(-j2*pi*m*k/win_len).
    """
    values = _as_values(x)
    n = values.shape[0]
    if win_len < 2 or hop < 1:
        raise InvalidArgument(f"bad stft geometry win_len={win_len}, hop={hop}")
    m = np.arange(win_len) - win_len // 2
    w = _window(window, m)
    centers = np.arange(0, n, hop)
    xp = np.zeros(n + 2 * win_len, dtype=complex)
    xp[win_len:win_len + n] = values
    frames = np.lib.stride_tricks.sliding_window_view(xp, win_len)
    seg = frames[centers + win_len - win_len // 2] * w
    buf = np.zeros((centers.shape[0], win_len), dtype=complex)
    buf[:, m % win_len] = seg
    return TFRMatrix(np.fft.fft(buf, axis=1), "stft", win_len, hop)


def spectrogram(x, win_len: int, window="hann", hop: int = 1) -> TFRMatrix:
    st = stft(x, win_len, window, hop)
    return TFRMatrix(np.abs(st.values) ** 2, "spec", win_len, hop)


def wigner(x, win_len: int, hop: int = 1) -> TFRMatrix:
    """Pseudo Wigner distribution with a rectangular lag window.

    The unpaired lag m = -win_len/2 is zeroed by the window product, which
    makes every entry real up to rounding; the real part is stored and the
    worst imaginary residue recorded. Bins k and k + win_len/2 coincide by
    construction of the e^{-j4*pi*k*m/M} kernel.
    """
    values = _as_values(x)
    n = values.shape[0]
    if win_len < 4 or win_len % 2:
        raise InvalidArgument(f"win_len must be even and >= 4, got {win_len}")
    m = np.arange(win_len) - win_len // 2
    centers = np.arange(0, n, hop)
    xp = np.zeros(n + 2 * win_len, dtype=complex)
    xp[win_len:win_len + n] = values
    rows = centers[:, None] + win_len
    prod = xp[rows + m] * np.conj(xp[rows - m])
    prod[:, 0] = 0.0
    buf = np.zeros((centers.shape[0], win_len), dtype=complex)
    buf[:, m % win_len] = prod
    spec = np.fft.fft(buf, axis=1)
    picked = spec[:, (2 * np.arange(win_len)) % win_len]
    residue = float(np.abs(picked.imag).max(initial=0.0))
    return TFRMatrix(picked.real.copy(), "pwd", win_len, hop,
                     imag_residue=residue)


def smethod(st: TFRMatrix, l_d: int) -> TFRMatrix:
    """S-method: the spectrogram plus 2*Re of l_d cross-bin correction terms.

    l_d = 0 reproduces the spectrogram exactly; growing l_d converges toward
    the pseudo Wigner distribution of each isolated component while the
    cross-terms of components further than 2*l_d bins apart stay suppressed.
    """
    if st.kind != "stft":
        raise InvalidArgument(f"smethod needs an stft input, got {st.kind!r}")
    n_bins = st.values.shape[1]
    if not 0 <= l_d < n_bins:
        raise InvalidArgument(f"need 0 <= l_d < {n_bins}, got {l_d}")
    s = st.values
    sm = np.abs(s) ** 2
    for i in range(1, l_d + 1):
        sm = sm + 2.0 * np.real(np.roll(s, -i, axis=1) * np.conj(np.roll(s, i, axis=1)))
    return TFRMatrix(sm, "sm", st.win_len, st.hop)


def concentration_measure(tfr: TFRMatrix, norm: str | None = None) -> float:
    """Sparsity measure of a TFR: l1 for linear kinds, l-half for quadratic."""
    if norm is None:
        norm = "l1" if tfr.kind == "stft" else "lhalf"
    mags = np.abs(tfr.values)
    if norm == "l1":
        return float(mags.sum())
    if norm == "lhalf":
        return float(np.sqrt(mags).sum())
    raise InvalidArgument(f"norm must be l1 or lhalf, got {norm!r}")


@dataclass
class IFEstimate:
    bins: np.ndarray
    degenerate: np.ndarray       # frames whose TFR column was identically zero


def estimate_if(tfr: TFRMatrix) -> IFEstimate:
    """Per-frame argmax frequency track; ties go to the lowest bin."""
    mags = np.abs(tfr.values)
    bins = np.argmax(mags, axis=1)
    degenerate = ~mags.any(axis=1)
    bins = np.where(degenerate, 0, bins)
    return IFEstimate(bins, degenerate)


def _channels_of(x) -> np.ndarray:
    if isinstance(x, MultivariateSignal):
        return np.asarray(x.channels)
    arr = np.asarray(x)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidArgument("expected (n_channels, n) channel data")
    return arr


def mv_autocorrelation(x) -> np.ndarray:
    """R(n1, n2) = sum_i x_i(n1) * conj(x_i(n2)); Hermitian PSD, trace = energy."""
    c = _channels_of(x)
    return c.T @ c.conj()


def _oversample2(values: np.ndarray) -> np.ndarray:
    """Exact 2x Fourier interpolation; x2[2n] = x[n]."""
    n = values.shape[0]
    spec = np.fft.fft(values)
    out = np.zeros(2 * n, dtype=complex)
    half = (n + 1) // 2
    out[:half] = spec[:half]
    out[2 * n - (n - half):] = spec[half:]
    if n % 2 == 0:
        out[half] = spec[half] / 2.0
        out[2 * n - half] = spec[half] / 2.0
    return np.fft.ifft(out) * 2.0


def mv_autocorrelation_sm(x, l_d: int | None = None) -> np.ndarray:
    """Autocorrelation matrix recovered by inverting the summed S-method.

    Each channel is interpolated onto a 2x grid and expanded with a
    full-window rectangular STFT whose frame transforms are zero padded to
    twice the window, so the lag products stay linear instead of wrapping.
    The S-method surfaces summed over channels are inverse-transformed along
    frequency: the antidiagonal n1 + n2 at even lag 2(n1 - n2) returns
    R(n1, n2). A finite l_d keeps one significant eigenvalue per signal
    component even when components outnumber channels; growing l_d moves the
    matrix toward the direct channel outer-product form.
    """
    c = _channels_of(x)
    n = c.shape[1]
    m = 2 * n                    # oversampled length and window
    nfft = 2 * m
    if l_d is None:
        l_d = m - 1
    if not 0 <= l_d < nfft // 2:
        raise InvalidArgument(f"need 0 <= l_d < {nfft // 2}, got {l_d}")
    offs = np.arange(m) - m // 2
    idx = offs % nfft
    pick = np.arange(m) + m - m // 2
    sm_total = np.zeros((m, nfft))
    for chan in c:
        z = np.zeros(3 * m, dtype=complex)
        z[m:2 * m] = _oversample2(chan)
        frames = np.lib.stride_tricks.sliding_window_view(z, m)[pick]
        buf = np.zeros((m, nfft), dtype=complex)
        buf[:, idx] = frames
        st = np.fft.fft(buf, axis=1)
        sm = np.abs(st) ** 2
        for i in range(1, l_d + 1):
            sm += 2.0 * (np.roll(st, -i, axis=1)
                         * np.roll(st, i, axis=1).conj()).real
        sm_total += sm
    rows = np.fft.ifft(sm_total, axis=1)
    r = np.zeros((n, n), dtype=complex)
    for msum in range(2 * n - 1):
        n1 = np.arange(max(0, msum - (n - 1)), min(n - 1, msum) + 1)
        n2 = msum - n1
        r[n1, n2] = rows[msum, (2 * (n1 - n2)) % nfft]
    r = 0.5 * (r + r.conj().T)
    energy = float(np.sum(np.abs(c) ** 2))
    trace = float(np.trace(r).real)
    if trace > 0:
        r *= energy / trace
    return r


def count_components(eigenvalues: np.ndarray, rel_threshold: float = 1e-4) -> int:
    """Number of eigenvalues at or above rel_threshold times the largest."""
    ev = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    if ev.size == 0 or ev[0] <= 0.0:
        return 0
    return int(np.sum(ev >= rel_threshold * ev[0]))


@dataclass
class DecomposeConfig:
    r_kind: str = "direct"       # direct | sm
    l_d: int = 10                # S-method width for the sm path
    n_components: int | None = None
    rel_threshold: float = 1e-4
    delta: float = 0.1
    eps: float = 1e-8
    beta_threshold: float = 1e-3
    init_kick: float = 0.05      # imaginary seed for the free coefficients
    max_outer: int = 20
    max_inner: int = 1000
    win_len: int | None = None   # minimizer spectrogram window; default ~n/4 even
    hop: int = 1


@dataclass
class DecompositionResult:
    n_components: int
    components: np.ndarray       # (P, n), unit energy rows
    eigenvalues: np.ndarray
    outer_rounds: int
    converged: bool
    flags: list = field(default_factory=list)


def _l1_stft_measure(n: int, win_len: int, hop: int):
    """Fast closure for the l-half spectrogram measure of a unit-energy signal."""
    m = np.arange(win_len) - win_len // 2
    w = 0.5 * (1.0 + np.cos(2.0 * np.pi * m / win_len))
    idx = m % win_len
    centers = np.arange(0, n, hop)
    pick = centers + win_len - win_len // 2

    def measure(vec: np.ndarray) -> float:
        xp = np.zeros(n + 2 * win_len, dtype=complex)
        xp[win_len:win_len + n] = vec / np.linalg.norm(vec)
        frames = np.lib.stride_tricks.sliding_window_view(xp, win_len)[pick]
        buf = np.zeros((centers.shape[0], win_len), dtype=complex)
        buf[:, idx] = frames * w
        return float(np.abs(np.fft.fft(buf, axis=1)).sum())

    return measure


def _minimize_concentration(qmat: np.ndarray, i: int, cfg: DecomposeConfig,
                            measure) -> tuple[np.ndarray, bool]:
    """Steepest descent on the combination coefficients with beta_i fixed at 1.

    Returns the coefficients and whether the gradient criterion was met
    within the inner iteration budget.
    """
    p = qmat.shape[1]
    # Real-valued channel sets give a conjugate-symmetric landscape in which
    # the imaginary probe differences cancel exactly at real beta, so a pure
    # unit-vector start can never leave the real subspace.  A small imaginary
    # offset on the free coefficients breaks that symmetry.
    beta = np.full(p, 1j * cfg.init_kick, dtype=complex)
    beta[i] = 1.0
    gamma = np.zeros(p, dtype=complex)
    m_old = np.inf
    delta = cfg.delta
    for _ in range(cfg.max_inner):
        y = qmat @ beta
        m_new = measure(y)
        if m_new > m_old:
            delta /= 2.0
            beta += gamma
            y = qmat @ beta
        else:
            m_old = m_new
        gamma = np.zeros(p, dtype=complex)
        for idx in range(p):
            if idx == i:
                continue
            qp = qmat[:, idx]
            real = measure(y + delta * qp) - measure(y - delta * qp)
            imag = measure(y + 1j * delta * qp) - measure(y - 1j * delta * qp)
            gamma[idx] = 8.0 * delta * (real + 1j * imag) / m_new
        beta -= gamma
        if float(np.sum(np.abs(gamma) ** 2)) < cfg.eps:
            return beta, True
    return beta, False


def decompose(x, cfg: DecomposeConfig | None = None) -> DecompositionResult:
    """Separate the components of a multivariate signal.

    Eigenvectors of the channel autocorrelation matrix span the components;
    concentration-measure minimization over their linear combinations,
    followed by deflation of the remaining eigenvectors, turns the span into
    the components themselves.
    """
    cfg = cfg or DecomposeConfig()
    c = _channels_of(x)
    n = c.shape[1]
    if cfg.r_kind == "direct":
        r = mv_autocorrelation(c)
    elif cfg.r_kind == "sm":
        r = mv_autocorrelation_sm(c, cfg.l_d)
    else:
        raise InvalidArgument(f"r_kind must be direct or sm, got {cfg.r_kind!r}")
    w, v = np.linalg.eigh(r)
    eigvals = w[::-1].copy()
    q = v[:, ::-1].astype(complex)
    p = cfg.n_components or count_components(eigvals, cfg.rel_threshold)
    if p == 0:
        return DecompositionResult(0, np.zeros((0, n), complex), eigvals, 0,
                                   True, ["no-components"])
    qmat = q[:, :p].copy()
    flags: list = []
    if p == 1:
        return DecompositionResult(1, qmat.T.copy(), eigvals, 0, True, flags)

    win_len = cfg.win_len
    if win_len is None:
        win_len = int(round(n / 4.0))
        win_len -= win_len % 2
    measure = _l1_stft_measure(n, win_len, cfg.hop)

    converged = False
    rounds = 0
    for rounds in range(1, cfg.max_outer + 1):
        updates = 0
        for i in range(p):
            beta, ok = _minimize_concentration(qmat, i, cfg, measure)
            if not ok and "inner-max-iterations" not in flags:
                flags.append("inner-max-iterations")
            off = np.abs(np.delete(beta, i))
            if off.max(initial=0.0) > cfg.beta_threshold:
                y = qmat @ beta
                # accept only a genuine drop so a column that is already a
                # minimizer is not disturbed by the kicked start
                if measure(y) >= measure(qmat[:, i]) * (1.0 - 1e-9):
                    continue
                y /= np.linalg.norm(y)
                qmat[:, i] = y
                for k in range(i + 1, p):
                    s = np.vdot(y, qmat[:, k])
                    qmat[:, k] = (qmat[:, k] - s * y) / np.sqrt(1.0 - abs(s) ** 2)
                updates += 1
        if updates == 0:
            converged = True
            break
    if not converged:
        flags.append("partial")
    return DecompositionResult(p, qmat.T.copy(), eigvals, rounds, converged,
                               flags)
