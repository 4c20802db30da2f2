"""Seeded Monte Carlo estimators.

All estimators draw trial ``t`` from the counter-based streams in
:mod:`percolab.rng`, keyed by ``(seed, tag, t)``. Configurations at different
densities share their uniforms (``bit = U < p``), so estimates at ``p < p'``
are coupled monotonically, and nothing depends on batching or thread count.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numba
import numpy as np

from percolab import rng
from percolab.bootstrap import BitConfig, complete_rows
from percolab.topology import GraphTopology

log = logging.getLogger(__name__)

Z99 = 2.5758
CHUNK_CELLS = 1 << 21
MAX_DOUBLINGS = 6


class DegenerateRegime(ValueError):
    """Raised when an empirical variance vanishes and a correlation is undefined."""


def set_workers(n: int | None) -> int:
    """Cap the number of threads used by the batch kernels; returns the cap in force."""
    if n is not None:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    trials: int
    ci_half_width: float
    seed: int
    z: float = Z99
    provenance: dict = field(default_factory=dict)

    @property
    def sigma(self) -> float:
        return self.ci_half_width / self.z

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PcSearchResult:
    p_c_hat: float
    target: float
    precision: float
    bracket: tuple[float, float]
    trials_per_step: int
    steps: int
    degraded: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class WindowResult:
    p_at_low_level: float
    p_at_high_level: float
    levels: tuple[float, float]
    width: float
    searches: tuple = ()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["searches"] = [s.to_dict() for s in self.searches]
        return out


def _half_width(values: np.ndarray, z: float) -> float:
    if values.size < 2:
        return 0.0
    return z * math.sqrt(float(values.var(ddof=1)) / values.size)


def _chunks(trials: int, m: int, start: int = 0):
    step = max(1, CHUNK_CELLS // max(m, 1))
    for a in range(start, start + trials, step):
        yield a, min(a + step, start + trials)


def _provenance(g: GraphTopology, k: int, **extra) -> dict:
    out = {"graph": g.kind.describe(), "k": k}
    out.update(extra)
    return out


# -- sampling -----------------------------------------------------------------------


def config_rows(m: int, p: float, seed: int, start: int, stop: int) -> np.ndarray:
    return rng.uniforms(seed, rng.CONFIG, start, stop, m) < p


def noisy_rows(rows: np.ndarray, eps: float, p: float, seed: int, start: int) -> np.ndarray:
    """Resample each bit with probability ``eps`` from Bernoulli(``p``)."""
    stop = start + rows.shape[0]
    m = rows.shape[1]
    pick = rng.uniforms(seed, rng.NOISE_PICK, start, stop, m) < eps
    fresh = rng.uniforms(seed, rng.NOISE_FRESH, start, stop, m) < p
    return np.where(pick, fresh, rows)


def sample_config(m: int, p: float, seed: int, trial_index: int) -> BitConfig:
    """Bernoulli(``p``) configuration of trial ``trial_index``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    row = config_rows(m, p, seed, trial_index, trial_index + 1)[0]
    return BitConfig(row, p, seed)


def apply_noise(omega: BitConfig, eps: float, p: float, seed: int, trial_index: int) -> BitConfig:
    if not (0 <= eps <= 1 and 0 <= p <= 1):
        raise ValueError("eps and p must lie in [0, 1]")
    row = noisy_rows(omega.occupied[None, :], eps, p, seed, trial_index)[0]
    return BitConfig(row, p, seed)


# -- success probability and p_c ------------------------------------------------------


def success_flags(g: GraphTopology, k: int, p: float, seed: int, start: int, stop: int) -> np.ndarray:
    m = g.vertex_count
    parts = [complete_rows(g, k, config_rows(m, p, seed, a, b)) for a, b in _chunks(stop - start, m, start)]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.bool_)


def estimate_success(g: GraphTopology, k: int, p: float, trials: int, seed: int, z: float = Z99) -> EstimateWithCI:
    """Fraction of trials ending in complete occupation."""
    if trials < 1:
        raise ValueError("need at least one trial")
    flags = success_flags(g, k, p, seed, 0, trials).astype(float)
    return EstimateWithCI(float(flags.mean()), trials, _half_width(flags, z), seed, z, _provenance(g, k, p=p))


def mc_success_curve(g: GraphTopology, k: int, seed: int, z: float = Z99):
    """``(p, trials) -> (mean, ci_half_width)`` that extends, rather than redraws,
    the trials already simulated at ``p``."""
    cache: dict[float, np.ndarray] = {}

    def at(p: float, trials: int):
        have = cache.get(p, np.empty(0, dtype=np.bool_))
        if have.size < trials:
            have = np.concatenate([have, success_flags(g, k, p, seed, have.size, trials)])
            cache[p] = have
        vals = have[:trials].astype(float)
        return float(vals.mean()), _half_width(vals, z)

    return at


def bisect_level(curve, target: float, precision: float, trials_per_step: int, *,
                 relative: bool = False, max_doublings: int = MAX_DOUBLINGS) -> PcSearchResult:
    """Stochastic bisection for the density at which ``curve`` crosses ``target``.

    ``curve(p, trials)`` returns ``(mean, ci_half_width)``. A midpoint whose
    estimate is within its half-width of ``target`` gets its trials doubled, up
    to ``2**max_doublings`` times; if still undecided the point estimate
    decides and the result is flagged ``degraded``.
    """
    if not 0 < target < 1:
        raise ValueError(f"target must lie in (0, 1), got {target}")
    if precision <= 0:
        raise ValueError("precision must be positive")
    lo, hi = 0.0, 1.0
    steps = 0
    degraded = False

    def width_ok():
        mid = (lo + hi) / 2
        return hi - lo <= (precision * mid if relative else precision)

    while not width_ok():
        mid = (lo + hi) / 2
        trials = trials_per_step
        mean, ci = curve(mid, trials)
        doublings = 0
        while abs(mean - target) <= ci and doublings < max_doublings:
            trials *= 2
            doublings += 1
            mean, ci = curve(mid, trials)
        if abs(mean - target) <= ci:
            degraded = True
        if mean < target:
            lo = mid
        else:
            hi = mid
        steps += 1
        if hi - lo < 1e-15:
            break
    return PcSearchResult((lo + hi) / 2, target, precision, (lo, hi), trials_per_step, steps, degraded)


def estimate_pc(g: GraphTopology, k: int, target: float = 0.5, precision: float = 1e-3,
                trials_per_step: int = 2000, seed: int = 0, *, relative: bool = False,
                z: float = Z99) -> PcSearchResult:
    """Density at which complete occupation has probability ``target``."""
    return bisect_level(mc_success_curve(g, k, seed, z), target, precision, trials_per_step, relative=relative)


def estimate_window(g: GraphTopology, k: int, levels=(0.25, 0.75), precision: float = 1e-3,
                    trials_per_step: int = 2000, seed: int = 0, z: float = Z99) -> WindowResult:
    lo_level, hi_level = levels
    if not 0 < lo_level <= hi_level < 1:
        raise ValueError(f"levels must be ordered inside (0, 1), got {levels}")
    curve = mc_success_curve(g, k, seed, z)
    low = bisect_level(curve, lo_level, precision, trials_per_step)
    high = low if hi_level == lo_level else bisect_level(curve, hi_level, precision, trials_per_step)
    return WindowResult(low.p_c_hat, high.p_c_hat, (lo_level, hi_level), high.p_c_hat - low.p_c_hat, (low, high))


# -- correlation, influence, covariance ---------------------------------------------------


def pearson_with_ci(x: np.ndarray, y: np.ndarray, z: float = Z99) -> tuple[float, float]:
    """Empirical correlation of two +-1 (bool) samples and a delta-method half-width."""
    x = np.asarray(x, dtype=np.bool_)
    y = np.asarray(y, dtype=np.bool_)
    n = x.size
    sx = 2 * int(x.sum()) - n
    sy = 2 * int(y.sum()) - n
    sxy = n - 2 * int((x != y).sum())
    num = n * sxy - sx * sy
    den2 = (n * n - sx * sx) * (n * n - sy * sy)
    if den2 == 0:
        raise DegenerateRegime("zero empirical variance: every trial gave the same outcome")
    root = math.isqrt(den2)
    r = num / root if root * root == den2 else num / math.sqrt(den2)
    xs = np.where(x, 1.0, -1.0)
    ys = np.where(y, 1.0, -1.0)
    u = (xs - xs.mean()) / xs.std()
    v = (ys - ys.mean()) / ys.std()
    psi = u * v - r / 2 * (u * u + v * v)
    return r, z * math.sqrt(float(psi.var()) / n)


def covariance_with_ci(a: np.ndarray, b: np.ndarray, z: float = Z99) -> tuple[float, float]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    prod = (a - a.mean()) * (b - b.mean())
    cov = float(prod.sum() / (n - 1))
    return cov, z * math.sqrt(float(prod.var()) / n)


def estimate_noise_corr(g: GraphTopology, k: int, p: float, eps: float, trials: int, seed: int,
                        z: float = Z99) -> EstimateWithCI:
    """Empirical ``Corr(f(w), f(w^eps))`` for complete occupation."""
    if trials < 2:
        raise ValueError("need at least two trials")
    m = g.vertex_count
    before, after = [], []
    for a, b in _chunks(trials, m):
        rows = config_rows(m, p, seed, a, b)
        before.append(complete_rows(g, k, rows))
        after.append(complete_rows(g, k, noisy_rows(rows, eps, p, seed, a)))
    r, ci = pearson_with_ci(np.concatenate(before), np.concatenate(after), z)
    return EstimateWithCI(r, trials, ci, seed, z, _provenance(g, k, p=p, eps=eps))


def estimate_influence(g: GraphTopology, k: int, p: float, x: int, trials: int, seed: int,
                       z: float = Z99) -> EstimateWithCI:
    """Probability that vertex ``x`` is pivotal, conditioning on both values of ``x``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    m = g.vertex_count
    if not 0 <= x < m:
        raise ValueError(f"vertex {x} out of range")
    parts = []
    for a, b in _chunks(trials, m):
        rows = config_rows(m, p, seed, a, b)
        rows[:, x] = True
        with_x = complete_rows(g, k, rows)
        rows[:, x] = False
        without_x = complete_rows(g, k, rows)
        parts.append(with_x != without_x)
    piv = np.concatenate(parts).astype(float)
    return EstimateWithCI(float(piv.mean()), trials, _half_width(piv, z), seed, z, _provenance(g, k, p=p, x=x))


def fspec_covariance(f, other, p: float, trials: int, seed: int, z: float = Z99) -> EstimateWithCI:
    """Empirical ``Cov(f, other)`` of two Boolean functions (values +-1) on shared inputs."""
    if trials < 2:
        raise ValueError("need at least two trials")
    if f.arity != other.arity:
        raise ValueError("functions must have the same arity")
    m = f.arity
    fa, fb = [], []
    for a, b in _chunks(trials, m):
        rows = config_rows(m, p, seed, a, b)
        fa.append(np.where(f.evaluate_rows(rows), 1.0, -1.0))
        fb.append(np.where(other.evaluate_rows(rows), 1.0, -1.0))
    cov, ci = covariance_with_ci(np.concatenate(fa), np.concatenate(fb), z)
    return EstimateWithCI(cov, trials, ci, seed, z, {"f": f.key(), "g": other.key(), "p": p})


def maj_covariance(g: GraphTopology, k: int, p: float, L: float, trials: int, seed: int,
                   z: float = Z99) -> EstimateWithCI:
    """``Cov(complete occupation, Maj_{n, 2 L sqrt(n)})`` with unit weights.

    The majority is +1 iff the number of occupied vertices exceeds
    ``n p + L sqrt(n)`` (ties count as +1).
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    n = g.vertex_count
    # unit weights: score = 2 * occupied - 2 n p - s, so only the row sums matter
    threshold = 2 * n * float(p) + 2 * L * math.sqrt(n)
    fa, fb = [], []
    for a, b in _chunks(trials, n):
        rows = config_rows(n, p, seed, a, b)
        fa.append(np.where(complete_rows(g, k, rows), 1.0, -1.0))
        fb.append(np.where(2.0 * rows.sum(axis=1) - threshold >= 0, 1.0, -1.0))
    cov, ci = covariance_with_ci(np.concatenate(fa), np.concatenate(fb), z)
    return EstimateWithCI(cov, trials, ci, seed, z, _provenance(g, k, p=p, L=L))
