"""Closed-form statistics of missing-sample effects, detection probabilities,
reconstruction error laws, and a deterministic Monte-Carlo harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, i0e

from .errors import InvalidArgument
from .transforms import HermiteBasis, build_hermite_basis

_WINITZKI_A = 0.147


@dataclass
class SparseModel:
    """Ground-truth sparse coefficient set in one transform domain.

    For dct1d/dct2d/dht1 the amplitudes are coefficient values on the
    orthonormal (or quadrature) scale. For dft they are the harmonic
    magnitudes of x(n) = sum_l A_l exp(j 2 pi k_l n / N), whose unnormalized
    full-record coefficient is N * A_l. positions are coefficient indices;
    (row, col) pairs for dct2d.
    """

    kind: str
    shape: int | tuple
    amplitudes: np.ndarray
    positions: list

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.amplitudes.shape[0] != len(self.positions):
            raise InvalidArgument("amplitudes and positions disagree in length")

    @property
    def k(self) -> int:
        return len(self.positions)

    @property
    def n_total(self) -> int:
        return int(np.prod(self.shape))


@dataclass
class VarianceReport:
    position: object
    mean: float
    variance: float
    sigma2_noise: float          # variance at a generic non-component position
    is_component: bool
    scale_convention: str


def _dct_pair_factor(u: int, u1: int, m: int) -> float:
    """Second-moment factor of phi_u(x)*phi_u1(x) over the DCT-II basis.

    3/2 on the component's own bin, 1/2 on its mirror bin m-u1, 1 otherwise;
    the DC and half-rate bins have flat-magnitude basis vectors and factor 1.
    """
    if u1 != 0 and 2 * u1 != m:
        if u == u1:
            return 1.5
        if u == m - u1:
            return 0.5
    return 1.0


def _dct_vector(u: int, m: int) -> np.ndarray:
    """Row u of the orthonormal DCT-II analysis matrix of size m."""
    a = math.sqrt((1.0 if u == 0 else 2.0) / m)
    return a * np.cos(np.pi * (2.0 * np.arange(m) + 1.0) * u / (2.0 * m))


def _hermite_population(model: SparseModel, basis: HermiteBasis) -> np.ndarray:
    """Per-sample contributions v[p, n] = T[p, n] x(t_n) of the model signal.

    The zero-filled coefficient X0(p) is the sum of v[p, n] over the n_a
    sampled columns, so its exact moments follow from finite-population
    sampling theory applied to each row of v.
    """
    coeffs = np.zeros(basis.n)
    coeffs[list(model.positions)] = model.amplitudes
    x = basis.psi.T @ coeffs
    return (basis.psi / (basis.n * basis.psi_last_sq)[None, :]) * x[None, :]


def _population_variance(v_row: np.ndarray, full: float, n: int, n_a: int,
                         support=None) -> float:
    """Variance of a sum of n_a draws without replacement from v_row."""
    if support is not None:
        m2 = float(np.mean(v_row[np.asarray(support, dtype=int)] ** 2))
    else:
        m2 = float(np.mean(v_row ** 2))
    pop = m2 - (full / n) ** 2
    return max(n_a * (n - n_a) / (n - 1) * pop, 0.0)


def missing_sample_variance(model: SparseModel, n_a: int, at,
                            basis: HermiteBasis | None = None,
                            support=None) -> VarianceReport:
    """Mean and variance of the zero-filled transform X0 at one position,
    over uniformly random supports of size n_a.

    DFT results are on the unnormalized-transform scale; DCT and DHT1 on the
    orthonormal/quadrature scale where the component mean is (n_a/N)*A.
    """
    n = model.n_total
    if not 1 <= n_a <= n:
        raise InvalidArgument(f"need 1 <= n_a <= {n}, got {n_a}")
    amps = model.amplitudes
    pos = list(model.positions)
    is_comp = at in pos

    if model.kind == "dft":
        mean = n_a * amps[pos.index(at)] if is_comp else 0.0
        scale = n_a * (n - n_a) / (n - 1)
        var = scale * float(sum(a * a for a, p in zip(amps, pos) if p != at))
        noise = scale * float(np.sum(amps ** 2))
        return VarianceReport(at, float(mean), var, noise, is_comp, "unnormalized")

    if model.kind == "dct1d":
        base = n_a * (n - n_a) / (n * n * (n - 1))
        mean = (n_a / n) * amps[pos.index(at)] if is_comp else 0.0
        # exact sampling law; collapses to base * sum A^2 * pair-factor at
        # bins free of component cross products
        x = np.zeros(n)
        for a, p in zip(amps, pos):
            x += a * _dct_vector(p, n)
        full = amps[pos.index(at)] if is_comp else 0.0
        var = _population_variance(_dct_vector(at, n) * x, full, n, n_a)
        noise = base * float(np.sum(amps ** 2))
        return VarianceReport(at, float(mean), var, noise, is_comp, "orthonormal")

    if model.kind == "dct2d":
        at = tuple(at)
        is_comp = at in [tuple(p) for p in pos]
        m_rows, n_cols = model.shape
        base = n_a * (n - n_a) / (m_rows ** 2 * n_cols ** 2 * (n - 1))
        idx = [tuple(p) for p in pos].index(at) if is_comp else -1
        mean = (n_a / n) * amps[idx] if is_comp else 0.0
        img = np.zeros((m_rows, n_cols))
        for a, (p, q) in zip(amps, pos):
            img += a * np.outer(_dct_vector(p, m_rows), _dct_vector(q, n_cols))
        row = np.outer(_dct_vector(at[0], m_rows), _dct_vector(at[1], n_cols))
        full = amps[idx] if is_comp else 0.0
        var = _population_variance((row * img).ravel(), full, n, n_a)
        noise = base * float(np.sum(amps ** 2))
        return VarianceReport(at, float(mean), var, noise, is_comp,
                              "orthonormal")

    if model.kind == "dht1":
        if basis is None:
            basis = build_hermite_basis(n)
        elif basis.n != n:
            raise InvalidArgument("dht1 basis size disagrees with the model")
        sigma2_cs = (n_a * (n - n_a) / (n * n * (n - 1))) * float(np.sum(amps ** 2))
        mean = (n_a / n) * amps[pos.index(at)] if is_comp else 0.0
        # Hermite rows are not flat-magnitude, so the exact sampling law is
        # applied per position instead of a position-independent average;
        # sigma2_noise keeps the position-averaged value.
        v = _hermite_population(model, basis)
        full = amps[pos.index(at)] if is_comp else 0.0
        var = _population_variance(v[at], full, n, n_a, support=support)
        return VarianceReport(at, float(mean), var, sigma2_cs, is_comp,
                              "quadrature")

    raise InvalidArgument(f"no variance law for domain kind {model.kind!r}")


@dataclass
class AwgnHermiteVariance:
    gamma: np.ndarray            # per-order noise gain gamma(p, N)
    xi: float                    # order-averaged gain

    def coefficient_variance(self, sigma_eps2: float) -> np.ndarray:
        return self.gamma * sigma_eps2

    def average_variance(self, sigma_eps2: float) -> float:
        return self.xi * sigma_eps2


def awgn_dht1_variance(basis: HermiteBasis) -> AwgnHermiteVariance:
    """Per-coefficient noise gain of DHT1 under i.i.d. sample noise.

    gamma(p, N) sums the squared forward-matrix rows; its order average
    equals xi(N) identically (Christoffel-Darboux at the quadrature nodes).
    """
    n = basis.n
    w = basis.psi / (n * basis.psi_last_sq)[None, :]
    gamma = np.sum(w * w, axis=1)
    xi = float(np.sum(basis.psi_last_sq ** -1) / (n * n))
    return AwgnHermiteVariance(gamma=gamma, xi=xi)


def detection_threshold(sigma: float, n: int, k: int = 0, p_nn: float = 0.99,
                        form: str = "erf") -> float:
    """Threshold separating the n-k noise-only coefficients from components
    with miss probability 1 - p_nn.

    form "log" inverts the Rayleigh tail (complex-coefficient domains);
    form "erf" inverts the Gaussian tail through the closed-form
    approximation of the inverse error function (a = 0.147).
    """
    if sigma < 0:
        raise InvalidArgument(f"sigma must be non-negative, got {sigma}")
    if not 0 < p_nn < 1:
        raise InvalidArgument(f"p_nn must lie in (0, 1), got {p_nn}")
    m = n - k
    if m < 1:
        raise InvalidArgument(f"need k < n, got n={n}, k={k}")
    if sigma == 0:
        return 0.0
    if form == "log":
        return sigma * math.sqrt(-math.log(1.0 - p_nn ** (1.0 / m)))
    if form == "erf":
        a = _WINITZKI_A
        el = math.log(1.0 - p_nn ** (2.0 / m))
        c = 4.0 / math.pi + a * el
        x2 = (-c + math.sqrt(c * c - 4.0 * a * el)) / (2.0 * a)
        return sigma * math.sqrt(2.0 * x2)
    raise InvalidArgument(f"form must be log or erf, got {form!r}")


@dataclass
class ProbabilityReport:
    per_component: np.ndarray
    method: str
    sigma_cs: float


def detection_error_probability(model: SparseModel, n_a: int,
                                basis: HermiteBasis | None = None,
                                support=None,
                                method: str = "exact") -> ProbabilityReport:
    """Probability that a component's zero-filled coefficient is outdone by at
    least one noise-only coefficient.

    method "exact" integrates the folded-normal component density against the
    noise-maximum CDF; "approx" evaluates the 1.5-sigma displacement bound.
    """
    n = model.n_total
    k = model.k
    if model.kind not in ("dft", "dct1d", "dht1"):
        raise InvalidArgument(f"no detection law for domain kind {model.kind!r}")
    if model.kind == "dht1" and (basis is None or basis.n != n):
        basis = build_hermite_basis(n)

    sigma_cs2 = missing_sample_variance(
        model, n_a, _off_support_position(model), basis=basis).sigma2_noise
    sigma_cs = math.sqrt(max(sigma_cs2, 0.0))

    complex_domain = model.kind == "dft"

    # survival function of the noise maximum; for dht1 the rows differ in
    # scale, so the product runs over the exact per-position variances
    # (it collapses to erf^(n-k) when they are equal)
    if model.kind == "dht1" and sigma_cs > 0.0:
        v = _hermite_population(model, basis)
        noise_pos = np.setdiff1d(np.arange(n), np.asarray(model.positions))
        pop = np.mean(v[noise_pos] ** 2, axis=1)
        sig_noise = np.sqrt(np.maximum(n_a * (n - n_a) / (n - 1) * pop, 0.0))
        sig_noise = sig_noise[sig_noise > 0.0]

        def all_noise_below(xi):
            return float(np.exp(np.sum(np.log(np.maximum(
                erf(xi / (math.sqrt(2.0) * sig_noise)), 1e-300)))))
    elif complex_domain:
        def all_noise_below(xi):
            # Rayleigh magnitude at the n-k noise positions
            return max(0.0, 1.0 - math.exp(-xi * xi / sigma_cs2)) ** (n - k)
    else:
        def all_noise_below(xi):
            return erf(xi / (math.sqrt(2.0) * sigma_cs)) ** (n - k)

    out = np.zeros(k)
    for i, p in enumerate(model.positions):
        rep = missing_sample_variance(model, n_a, p, basis=basis, support=support)
        m_q, s_q = abs(rep.mean), math.sqrt(max(rep.variance, 0.0))
        if sigma_cs == 0.0:
            out[i] = 0.0
            continue
        if method == "approx":
            if complex_domain:
                out[i] = min(1.0, max(
                    0.0, 1.0 - all_noise_below(max(m_q - 1.5 * s_q, 0.0))))
            else:
                denom = math.sqrt(2.0) * sigma_cs
                out[i] = min(1.0, max(
                    0.0, 1.0 - erf((m_q - 1.5 * s_q) / denom) ** (n - k)))
            continue
        if method != "exact":
            raise InvalidArgument(f"method must be exact or approx, got {method!r}")
        if s_q == 0.0:
            out[i] = 1.0 - all_noise_below(m_q)
            continue

        if complex_domain:
            def integrand(xi, m_q=m_q, s_q=s_q):
                # Rice density of the component's magnitude
                s2 = s_q * s_q / 2.0
                dens = ((xi / s2) * math.exp(-(xi - m_q) ** 2 / (2.0 * s2))
                        * i0e(xi * m_q / s2))
                return (1.0 - all_noise_below(xi)) * dens
        else:
            def integrand(xi, m_q=m_q, s_q=s_q):
                dens = (math.exp(-(xi - m_q) ** 2 / (2 * s_q * s_q))
                        + math.exp(-(xi + m_q) ** 2 / (2 * s_q * s_q)))
                return (1.0 - all_noise_below(xi)) * dens / (
                    s_q * math.sqrt(2.0 * math.pi))

        val, _ = quad(integrand, 0.0, m_q + 10.0 * s_q, epsabs=1e-6, limit=200)
        out[i] = min(1.0, max(0.0, val))
    return ProbabilityReport(out, method, sigma_cs)


def _off_support_position(model: SparseModel):
    if model.kind == "dct2d":
        taken = set(map(tuple, model.positions))
        m_rows, n_cols = model.shape
        for p in range(m_rows):
            for q in range(n_cols):
                if (p, q) not in taken:
                    return (p, q)
    else:
        taken = set(model.positions)
        for p in range(model.n_total):
            if p not in taken:
                return p
    raise InvalidArgument("model has no noise-only position")


def nonsparse_error_energy(kind: str, shape, k: int, n_a: int,
                           unrecovered_energy: float,
                           sigma_eps2: float = 0.0) -> float:
    """Energy of the K-term reconstruction error when the signal is not
    exactly sparse, plus the additive-noise floor (1D forms)."""
    n = int(np.prod(shape))
    if not 1 <= n_a <= n:
        raise InvalidArgument(f"need 1 <= n_a <= {n}, got {n_a}")
    if k < 0:
        raise InvalidArgument(f"k must be non-negative, got {k}")
    err = k * (n - n_a) / (n_a * (n - 1)) * unrecovered_energy
    if sigma_eps2:
        err += k / n_a * sigma_eps2 * n
    return err


def snr_after_reconstruction(snr_db: float, k: int, n_a: int) -> float:
    """Output SNR of a K-sparse reconstruction from n_a noisy samples."""
    if k < 1 or n_a < 1:
        raise InvalidArgument("k and n_a must be positive")
    return snr_db - 10.0 * math.log10(k / n_a)


@dataclass
class SparsityBound:
    max_k: float                 # largest K passing the bound; inf if unbounded
    bound: float                 # the raw right-hand side
    rule: str
    unbounded: bool = False


def sparsity_bound(n: int, n_a: int, rule: str = "4sigma") -> SparsityBound:
    """Largest sparsity K < N_A(N-1)/(c^2(N-N_A)) under the c-sigma rule."""
    if rule == "4sigma":
        c = 4.0
    elif rule == "3sigma":
        c = 3.0
    else:
        raise InvalidArgument(f"rule must be 3sigma or 4sigma, got {rule!r}")
    if not 1 <= n_a <= n:
        raise InvalidArgument(f"need 1 <= n_a <= {n}, got {n_a}")
    if n_a == n:
        return SparsityBound(math.inf, math.inf, rule, unbounded=True)
    b = n_a * (n - 1) / (c * c * (n - n_a))
    max_k = math.floor(b)
    if max_k == b:
        max_k -= 1
    return SparsityBound(float(max_k), b, rule)


@dataclass
class MCResult:
    mean: np.ndarray
    variance: np.ndarray
    stderr: np.ndarray
    trials: int
    samples: np.ndarray = field(repr=False, default=None)


def mc_experiment(estimator, trials: int, seed: int = 0,
                  keep_samples: bool = False) -> MCResult:
    """Run estimator(rng) for `trials` independent generators and aggregate.

    Trial t uses default_rng([seed, t]), so the stream of any trial does not
    depend on execution order; a parallel scheduler would reproduce the
    sequential result bit for bit.
    """
    if trials < 1:
        raise InvalidArgument(f"need at least one trial, got {trials}")
    samples = [np.asarray(estimator(np.random.default_rng([seed, t])))
               for t in range(trials)]
    arr = np.stack(samples)
    mean = arr.mean(axis=0)
    var = arr.var(axis=0, ddof=1) if trials > 1 else np.zeros_like(mean)
    stderr = np.sqrt(var / trials)
    return MCResult(mean, var, stderr, trials,
                    samples=arr if keep_samples else None)
