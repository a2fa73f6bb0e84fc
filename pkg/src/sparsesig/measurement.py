"""Reduced-measurement machinery: supports, partial matrices, coherence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NumericFailure
from .transforms import TransformOperator


@dataclass
class MeasurementSet:
    """Available samples of a signal: positions (sorted) and their values."""

    n_total: int
    support: np.ndarray
    values: np.ndarray


@dataclass
class PartialMatrix:
    """Rows of a transform's inverse restricted to the available samples."""

    entries: np.ndarray          # (N_A, N)
    support: np.ndarray          # available sample indices, sorted
    op: TransformOperator = field(repr=False)

    @property
    def domain_kind(self) -> str:
        return self.op.kind

    @property
    def n_available(self) -> int:
        return self.entries.shape[0]

    @property
    def n_coefficients(self) -> int:
        return self.entries.shape[1]


def sample_support(n: int, n_a: int, seed=None) -> np.ndarray:
    """Draw n_a distinct sample positions out of n, uniformly, sorted."""
    if not 1 <= n_a <= n:
        raise InvalidArgument(f"need 1 <= n_a <= n, got n_a={n_a}, n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=n_a, replace=False))


def build_partial_matrix(op: TransformOperator, support) -> PartialMatrix:
    """Measurement matrix A: row i is the inverse-transform row at support[i].

    For 2D operators the support indexes the row-major flattened image.
    """
    support = np.asarray(support, dtype=int)
    if support.ndim != 1 or support.size == 0:
        raise InvalidArgument("support must be a non-empty 1D index array")
    if np.unique(support).size != support.size:
        raise InvalidArgument("support contains repeated positions")
    if support.min() < 0 or support.max() >= op.size:
        raise InvalidArgument(
            f"support indices must lie in [0, {op.size}), got "
            f"[{support.min()}, {support.max()}]")
    support = np.sort(support)
    return PartialMatrix(op.inverse[support, :].copy(), support, op)


def initial_estimate(a: PartialMatrix, y: np.ndarray) -> np.ndarray:
    """Back-projection X0: the domain transform computed with zeros at the
    missing positions, on the operator's own scale."""
    y = np.asarray(y)
    if y.shape[0] != a.n_available:
        raise InvalidArgument(
            f"measurement length {y.shape[0]} != support size {a.n_available}")
    return a.op.forward[:, a.support] @ y


def coherence_index(a: PartialMatrix) -> float:
    """Largest normalized off-diagonal column inner product of A."""
    g = a.entries.conj().T @ a.entries
    d = np.sqrt(np.abs(np.diag(g)))
    if d.min() <= 1e-300 or d.min() < 1e-14 * d.max():
        raise NumericFailure("zero-norm column in the partial matrix")
    g = np.abs(g) / np.outer(d, d)
    np.fill_diagonal(g, 0.0)
    return float(g.max())


def verify_recovery_condition(k: int, mu: float) -> bool:
    """Uniqueness guarantee K < (1 + 1/mu)/2 for K-sparse recovery."""
    if k < 0:
        raise InvalidArgument(f"sparsity must be non-negative, got {k}")
    if mu < 0 or mu > 1 + 1e-12:
        raise InvalidArgument(f"coherence must lie in [0, 1], got {mu}")
    if mu == 0:
        return True
    return k < 0.5 * (1.0 + 1.0 / mu)
