"""Signal containers and the transform operators used everywhere else.

Four coefficient domains are supported: the unnormalized DFT, the orthonormal
DCT-II (1D and separable 2D), and two discrete Hermite transforms. DHT1 is the
Gauss-Hermite quadrature transform defined on the scaled roots of the N-th
Hermite polynomial; DHT2 is the orthonormal eigenvector basis of a symmetric
tridiagonal matrix and lives on a uniform grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidArgument


@dataclass
class UniformGrid:
    """Uniformly sampled time axis; index i maps to (i - n//2)*dt if centered."""

    n: int
    dt: float = 1.0
    centered: bool = False

    def times(self) -> np.ndarray:
        idx = np.arange(self.n, dtype=float)
        if self.centered:
            idx -= self.n // 2
        return idx * self.dt


@dataclass
class HermiteGrid:
    """Non-uniform axis holding the scaled Hermite quadrature nodes."""

    nodes: np.ndarray
    scale: float = 1.0


@dataclass
class IndexGrid:
    """Coefficient-domain axis (plain indices), possibly 2D."""

    shape: tuple


@dataclass
class Signal:
    values: np.ndarray
    grid: UniformGrid | HermiteGrid | IndexGrid
    meta: dict = field(default_factory=dict)

    def copy(self) -> "Signal":
        return Signal(np.array(self.values), self.grid, dict(self.meta))


@dataclass
class HermiteBasis:
    """Hermite functions tabulated on the sigma-scaled roots of H_N."""

    n: int
    sigma: float
    nodes: np.ndarray            # physical node positions, ascending
    psi: np.ndarray              # psi[p, j] = psi_p(nodes[j]; sigma)

    @property
    def psi_last_sq(self) -> np.ndarray:
        return self.psi[-1] ** 2


@dataclass
class TransformOperator:
    kind: str                    # dft | dct1d | dct2d | dht1 | dht2
    forward: np.ndarray
    inverse: np.ndarray
    norm_convention: str         # unnormalized | orthonormal | quadrature
    shape: tuple
    basis: HermiteBasis | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))


def hermite_nodes(n: int) -> np.ndarray:
    """Roots of the physicists' Hermite polynomial H_n, ascending.

    Computed as eigenvalues of the Jacobi matrix of the recurrence
    (off-diagonal sqrt(k/2)) and symmetrized exactly about zero.
    """
    if n < 1:
        raise InvalidArgument(f"need n >= 1 node, got {n}")
    if n == 1:
        return np.zeros(1)
    off = np.sqrt(np.arange(1, n) / 2.0)
    t = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    return (t - t[::-1]) / 2.0


def hermite_functions(n: int, t: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """First n Hermite functions psi_p(t; sigma), rows indexed by order p.

    Evaluated by the stable two-term recursion in u = t/sigma; the sigma
    dependence enters through u and a global sigma^(-1/2) factor.
    """
    if n < 1:
        raise InvalidArgument(f"need n >= 1 function, got {n}")
    if sigma <= 0:
        raise InvalidArgument(f"sigma must be positive, got {sigma}")
    u = np.asarray(t, dtype=float) / sigma
    out = np.empty((n, u.size))
    out[0] = np.pi ** -0.25 / np.sqrt(sigma) * np.exp(-u * u / 2.0)
    if n > 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for p in range(2, n):
        out[p] = u * np.sqrt(2.0 / p) * out[p - 1] - np.sqrt((p - 1) / p) * out[p - 2]
    return out


def build_hermite_basis(n: int, sigma: float = 1.0) -> HermiteBasis:
    nodes = sigma * hermite_nodes(n)
    return HermiteBasis(n=n, sigma=sigma, nodes=nodes,
                        psi=hermite_functions(n, nodes, sigma))


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    a = np.full(n, np.sqrt(2.0 / n))
    a[0] = np.sqrt(1.0 / n)
    return a[:, None] * np.cos(np.pi * (2 * m + 1) * k / (2 * n))


def build_transform(kind: str, shape, sigma: float = 1.0) -> TransformOperator:
    """Construct the forward/inverse matrix pair for one coefficient domain.

    shape is an int (or 1-tuple) for 1D kinds and an (M, N) pair for dct2d,
    whose matrices act on row-major flattened images.
    """
    if kind != "dct2d" and isinstance(shape, (tuple, list)):
        if len(shape) != 1:
            raise InvalidArgument(f"{kind} takes a scalar length, got {shape}")
        shape = shape[0]
    if kind == "dft":
        n = int(shape)
        k = np.arange(n)
        w = np.exp(-2j * np.pi * np.outer(k, k) / n)
        return TransformOperator("dft", w, w.conj() / n, "unnormalized", (n,))
    if kind == "dct1d":
        n = int(shape)
        f = _dct_matrix(n)
        return TransformOperator("dct1d", f, f.T.copy(), "orthonormal", (n,))
    if kind == "dct2d":
        m, n = (int(s) for s in shape)
        f = np.kron(_dct_matrix(m), _dct_matrix(n))
        return TransformOperator("dct2d", f, f.T.copy(), "orthonormal", (m, n))
    if kind == "dht1":
        n = int(shape)
        basis = build_hermite_basis(n, sigma)
        fwd = basis.psi / (n * basis.psi_last_sq)[None, :]
        return TransformOperator("dht1", fwd, basis.psi.T.copy(), "quadrature",
                                 (n,), basis=basis)
    if kind == "dht2":
        n = int(shape)
        if sigma <= 0:
            raise InvalidArgument(f"sigma must be positive, got {sigma}")
        s2 = sigma * sigma
        ns = np.arange(n, dtype=float)
        diag = (-2.0 * np.cos(np.pi / s2)
                * np.sin(np.pi * ns / (n * s2))
                * np.sin(np.pi * (n - 1 - ns) / (n * s2)))
        off = (np.sin(np.pi * ns[1:] / (n * s2))
               * np.sin(np.pi * (n - ns[1:]) / (n * s2)))
        w, v = eigh_tridiagonal(diag, off)
        v = v[:, np.argsort(-w, kind="stable")]
        for col in range(n):
            lead = np.flatnonzero(np.abs(v[:, col]) > 1e-12)
            if lead.size and v[lead[0], col] < 0:
                v[:, col] = -v[:, col]
        return TransformOperator("dht2", v.T.copy(), v.copy(), "orthonormal", (n,))
    raise InvalidArgument(f"unknown transform kind {kind!r}")


def transform(op: TransformOperator, s: Signal | np.ndarray,
              direction: str = "forward") -> Signal:
    """Apply op to a signal (or coefficient set) and wrap the result."""
    values = s.values if isinstance(s, Signal) else np.asarray(s)
    flat = values.reshape(-1)
    if flat.shape[0] != op.size:
        raise InvalidArgument(
            f"signal length {flat.shape[0]} does not match operator size {op.size}")
    if direction == "forward":
        coeffs = op.forward @ flat
        if len(op.shape) == 2:
            coeffs = coeffs.reshape(op.shape)
        return Signal(coeffs, IndexGrid(op.shape))
    if direction == "inverse":
        out = op.inverse @ flat
        if len(op.shape) == 2:
            out = out.reshape(op.shape)
            return Signal(out, IndexGrid(op.shape))
        if op.kind == "dht1":
            grid = HermiteGrid(op.basis.nodes.copy(), op.basis.sigma)
        elif isinstance(s, Signal) and isinstance(s.grid, (UniformGrid, HermiteGrid)):
            grid = s.grid
        else:
            grid = UniformGrid(op.size)
        return Signal(out, grid)
    raise InvalidArgument(f"direction must be forward or inverse, got {direction!r}")


def sinc_resample(x: Signal, lam: float, nodes: np.ndarray) -> Signal:
    """Resample a uniformly sampled signal at the stretched points lam*nodes.

    Uses the truncated cardinal-series interpolator; exact whenever a target
    point coincides with an input sample. Input samples are taken at
    m*dt for m = -(n//2), ..., and the same centered convention is assumed
    of the caller's values.
    """
    if not isinstance(x.grid, UniformGrid):
        raise InvalidArgument("sinc_resample expects a uniform input grid")
    values = np.asarray(x.values)
    n = values.shape[0]
    dt = x.grid.dt
    m = np.arange(n) - n // 2
    nodes = np.asarray(nodes, dtype=float)
    u = np.subtract.outer(lam * nodes, m * dt) / dt
    out = np.sinc(u) @ values
    return Signal(out, HermiteGrid(lam * nodes, lam))
