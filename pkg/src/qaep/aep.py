"""
Asymptotic equipartition for block states: the spectrum read as a
probability distribution, minimal covering dimensions, eigenvalue level
sets and the typical projector.
"""

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import CapacityError, ParameterError
from .linalg import as_matrix, density_eig
from .states import BlockState, IIDProduct, block_density, entropy_nats, mean_entropy
from . import linalg

SUPPORT_CUTOFF = 1e-15
MAX_EXCLUDED_MASS = 1e-12


def _check_epsilon(epsilon: float) -> float:
    eps = float(epsilon)
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return eps


def _check_delta(delta: float) -> float:
    d = float(delta)
    if not d > 0.0:
        raise ParameterError(f"delta must be positive, got {delta!r}")
    return d


# --------------------------------------------------------------------------
# Distributions and spectra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Finite distribution with probabilities sorted in descending order."""

    labels: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_probs(cls, probs, labels=None) -> "EmpiricalDistribution":
        """Sort, drop atoms below ``SUPPORT_CUTOFF`` and renormalize.

        Raises ``ParameterError`` when the dropped atoms carry
        ``MAX_EXCLUDED_MASS`` or more.
        """
        p = np.asarray(probs, dtype=float)
        lab = np.arange(p.size) if labels is None else np.asarray(labels)
        if np.any(p < 0):
            raise ParameterError("probabilities must be nonnegative")
        order = np.argsort(-p, kind="stable")
        p, lab = p[order], lab[order]
        keep = p >= SUPPORT_CUTOFF
        excluded = float(p[~keep].sum())
        if excluded >= MAX_EXCLUDED_MASS:
            raise ParameterError(f"atoms below {SUPPORT_CUTOFF:g} carry mass {excluded:.3e}")
        p, lab = p[keep], lab[keep]
        if excluded > 0:
            p = p / p.sum()
        if abs(p.sum() - 1.0) > 1e-10:
            raise ParameterError(f"probabilities sum to {p.sum()!r}, expected 1")
        return cls(lab, p)

    def __len__(self):
        return self.probs.size

    def entropy(self) -> float:
        return entropy_nats(self.probs)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue levels in descending order, each with an integer multiplicity.

    Dense blocks give multiplicity one per eigenvalue; i.i.d. sources can
    also be described by their type classes, which stays exact far beyond
    the dense dimension limit.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    n: int

    @classmethod
    def from_block(cls, block: BlockState) -> "Spectrum":
        ev = block.eigenvalues
        return cls(ev, np.ones(ev.size, dtype=np.int64), block.n)

    @property
    def dim(self) -> int:
        return int(self.multiplicities.sum())

    def entropy(self) -> float:
        v, m = self.values, self.multiplicities
        pos = v > 0
        return float(-np.sum(m[pos] * v[pos] * np.log(v[pos])))


def iid_type_spectrum(model: IIDProduct, n: int) -> Spectrum:
    """Exact spectrum of the n-block of an i.i.d. source grouped by type class.

    Multiplicities are Python integers (object array) once ``d^n`` no longer
    fits in 64 bits.
    """
    if not isinstance(model, IIDProduct):
        raise TypeError("type-class spectra exist only for i.i.d. sources")
    d = model.d
    exact = n * math.log(d) > 62 * math.log(2)
    mu = model.site_probs
    values, mults = [], []
    for combo in combinations_with_replacement(range(d), n):
        counts = np.bincount(combo, minlength=d)
        if np.any((mu == 0) & (counts > 0)):
            v = 0.0
        else:
            nz = counts > 0
            v = math.exp(float(np.sum(counts[nz] * np.log(mu[nz]))))
        mult, left = 1, n
        for c in counts:
            mult *= math.comb(left, int(c))
            left -= int(c)
        values.append(v)
        mults.append(mult)
    values = np.array(values)
    order = np.argsort(-values, kind="stable")
    return Spectrum(values[order], np.array(mults, dtype=object if exact else np.int64)[order], n)


def block_spectrum(model, n: int) -> Spectrum:
    """Type-class spectrum for i.i.d. sources, dense block spectrum otherwise."""
    if isinstance(model, IIDProduct):
        return iid_type_spectrum(model, n)
    return Spectrum.from_block(block_density(model, n))


def _as_spectrum(obj) -> Spectrum:
    if isinstance(obj, Spectrum):
        return obj
    if isinstance(obj, BlockState):
        return Spectrum.from_block(obj)
    # a bare density operator counts as a single site (n = 1)
    ev = density_eig(as_matrix(obj)).eigenvalues
    return Spectrum(ev, np.ones(ev.size, dtype=np.int64), 1)


# --------------------------------------------------------------------------
# Entropies
# --------------------------------------------------------------------------


def von_neumann_entropy(rho) -> float:
    """``-tr rho log rho`` in nats."""
    if isinstance(rho, BlockState):
        return entropy_nats(rho.eigenvalues)
    return entropy_nats(density_eig(as_matrix(rho)).eigenvalues)


def spectrum_distribution(block) -> EmpiricalDistribution:
    """Eigenvalues of a block (or density operator) as a distribution over eigenvectors.

    For a ``BlockState`` the labels are word indices of the product eigenbasis.
    """
    if isinstance(block, BlockState):
        return EmpiricalDistribution.from_probs(block.eigenvalues, block.order)
    e = density_eig(as_matrix(block))
    return EmpiricalDistribution.from_probs(e.eigenvalues)


# --------------------------------------------------------------------------
# Minimal covering dimension
# --------------------------------------------------------------------------


def _min_cover(values: np.ndarray, mults: np.ndarray, target: float) -> int:
    """Fewest atoms, taken from the top of a descending level list, with mass >= target."""
    acc = 0.0
    count = 0
    for v, m in zip(values.tolist(), mults.tolist()):
        if m == 1:
            if acc + v >= target:
                return count + 1
            acc += v
            count += 1
            continue
        if acc + m * v >= target:
            need = max(1, math.ceil((target - acc) / v))
            need = min(need, m)
            while need > 1 and acc + (need - 1) * v >= target:
                need -= 1
            while need < m and acc + need * v < target:
                need += 1
            return count + need
        acc += m * v
        count += m
    # roundoff left the total just short of target
    return count


class BetaResult(NamedTuple):
    epsilon: float
    n: int
    count: int
    beta: float
    rate: float


def beta(block, epsilon: float) -> BetaResult:
    """Log of the smallest projector dimension capturing mass ``1 - epsilon``.

    By Ky Fan's maximum principle the optimum is the span of the top
    eigenvectors, so the count is the shortest sorted prefix reaching the
    target.
    """
    eps = _check_epsilon(epsilon)
    spec = _as_spectrum(block)
    count = _min_cover(spec.values, spec.multiplicities, 1.0 - eps)
    b = math.log(count)
    return BetaResult(eps, spec.n, count, b, b / spec.n)


def alpha(dist: EmpiricalDistribution, epsilon: float) -> float:
    """Log of the smallest number of atoms with total probability at least ``1 - epsilon``.

    Greedy selection of the largest atoms is optimal: any covering set can
    swap an atom for a larger unused one without losing mass.
    """
    eps = _check_epsilon(epsilon)
    p = np.asarray(dist.probs, dtype=float)
    return math.log(_min_cover(p, np.ones(p.size, dtype=np.int64), 1.0 - eps))


# --------------------------------------------------------------------------
# Level sets and the typical projector
# --------------------------------------------------------------------------


class LevelMasses(NamedTuple):
    above: float  # A1: p > e^{-n(h - delta)}
    window: float  # A2: e^{-n(h + delta)} <= p <= e^{-n(h - delta)}
    below: float  # A3: p < e^{-n(h + delta)}


def _window(n: int, h: float, delta: float):
    return math.exp(-n * (h + delta)), math.exp(-n * (h - delta))


def partition_levels(dist: EmpiricalDistribution, h: float, delta: float, n: int) -> LevelMasses:
    """Masses of the three level sets of ``dist`` around ``e^{-n h}``."""
    lo, hi = _window(n, h, delta)
    p = np.asarray(dist.probs, dtype=float)
    above = p > hi
    below = p < lo
    inside = ~(above | below)
    return LevelMasses(math.fsum(p[above]), math.fsum(p[inside]), math.fsum(p[below]))


@dataclass(frozen=True)
class TypicalProjector:
    """Span of the eigenvectors whose eigenvalues lie in the inner window.

    ``indices`` are positions in the sorted spectrum (levels, for type-class
    spectra); ``count`` is the projector rank.
    """

    n: int
    s: float
    delta: float
    delta_prime: float
    indices: np.ndarray
    count: int
    mass: float
    log_dim: float
    mass_ok: bool
    window_ok: bool
    dim_ok: bool

    @property
    def holds(self) -> bool:
        return self.mass_ok and self.window_ok and self.dim_ok

    def verdicts(self) -> Dict[str, bool]:
        return {"mass": self.mass_ok, "window": self.window_ok, "dimension": self.dim_ok}


def typical_projector(block, s: float, delta: float, delta_prime: Optional[float] = None) -> TypicalProjector:
    delta = _check_delta(delta)
    dp = delta / 2.0 if delta_prime is None else float(delta_prime)
    if not 0.0 < dp < delta:
        raise ParameterError(f"delta_prime must lie in (0, delta), got {dp!r}")
    spec = _as_spectrum(block)
    n = spec.n
    v, m = spec.values, spec.multiplicities

    lo, hi = _window(n, s, dp)
    sel = np.flatnonzero((v >= lo) & (v <= hi))
    count = int(m[sel].sum())
    mass = math.fsum((m[sel] * v[sel]).tolist())
    log_dim = math.log(count) if count else -math.inf

    outer_lo, outer_hi = _window(n, s, delta)
    window_ok = count > 0 and bool(np.all((v[sel] > outer_lo) & (v[sel] < outer_hi)))
    dim_ok = count > 0 and n * (s - delta) < log_dim < n * (s + delta)
    return TypicalProjector(
        n=n, s=float(s), delta=delta, delta_prime=dp, indices=sel, count=count,
        mass=mass, log_dim=log_dim, mass_ok=mass >= 1.0 - delta,
        window_ok=window_ok, dim_ok=dim_ok,
    )


def mass_threshold_n(model, delta: float, n_max: int, delta_prime: Optional[float] = None) -> Optional[int]:
    """Smallest ``n <= n_max`` whose typical projector carries mass ``>= 1 - delta``.

    Returns ``None`` if no such ``n`` exists in range. No claim is made that
    the mass stays above the bound for larger ``n``.
    """
    s = mean_entropy(model)
    for n in range(1, n_max + 1):
        if typical_projector(block_spectrum(model, n), s, delta, delta_prime).mass_ok:
            return n
    return None


# --------------------------------------------------------------------------
# Convergence report
# --------------------------------------------------------------------------


def eps_key(eps: float) -> str:
    return repr(float(eps))


def _finite(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def aep_convergence_report(
    model, n_max: int, epsilons: Sequence[float], delta: float, model_id: str = ""
) -> dict:
    """Per-n table of entropy rate, beta rates and typical-projector verdicts."""
    epsilons = [_check_epsilon(e) for e in epsilons]
    delta = _check_delta(delta)
    if n_max < 1:
        raise ParameterError(f"n_max must be at least 1, got {n_max}")
    d = model.d
    if d**n_max > linalg.MAX_DIM:
        raise CapacityError(
            f"block dimension d^n = {d}^{n_max} = {d**n_max} exceeds the maximum dimension {linalg.MAX_DIM}"
        )
    s = mean_entropy(model)
    rows = []
    for n in range(1, n_max + 1):
        rows.append(report_row(block_density(model, n), s, epsilons, delta))
    return {"model_hash": model_id, "s": s, "delta": delta, "rows": rows, "summary": _summary(rows, s, epsilons)}


def report_row(block: BlockState, s: float, epsilons: Sequence[float], delta: float) -> dict:
    tp = typical_projector(block, s, delta)
    return {
        "n": block.n,
        "entropy_rate": von_neumann_entropy(block) / block.n,
        "betas": {eps_key(e): beta(block, e).rate for e in epsilons},
        "typical": {
            "mass": tp.mass,
            "count": tp.count,
            "log_dim": _finite(tp.log_dim),
            "verdicts": tp.verdicts(),
        },
    }


def _summary(rows: List[dict], s: float, epsilons: Sequence[float]) -> dict:
    rates = [r["entropy_rate"] for r in rows]
    gaps = {eps_key(e): [abs(r["betas"][eps_key(e)] - s) for r in rows] for e in epsilons}
    holding = [r["n"] for r in rows if all(r["typical"]["verdicts"].values())]
    return {
        "entropy_rate_nonincreasing": all(b <= a + 1e-12 for a, b in zip(rates, rates[1:])),
        "final_beta_gap": {k: g[-1] for k, g in gaps.items()},
        "min_beta_gap": {k: min(g) for k, g in gaps.items()},
        "first_n_all_verdicts": holding[0] if holding else None,
    }


def report_csv(report: dict) -> str:
    """One CSV row per block length."""
    rows = report["rows"]
    eps_keys = list(rows[0]["betas"]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["n", "entropy_rate"]
        + [f"beta_rate_eps_{k}" for k in eps_keys]
        + ["typical_mass", "typical_count", "typical_log_dim", "verdict_mass", "verdict_window", "verdict_dimension"]
    )
    for r in rows:
        t = r["typical"]
        v = t["verdicts"]
        w.writerow(
            [r["n"], repr(r["entropy_rate"])]
            + [repr(r["betas"][k]) for k in eps_keys]
            + [repr(t["mass"]), t["count"], "" if t["log_dim"] is None else repr(t["log_dim"])]
            + [int(v["mass"]), int(v["window"]), int(v["dimension"])]
        )
    return buf.getvalue()
