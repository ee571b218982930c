"""
Deterministic summation machinery: a compensated running sum, chunked Matsubara
series with adaptive truncation, and the sum-minus-integral engine with an
Euler–Maclaurin far tail.

Chunks are evaluated on a thread pool of LIFSHITZ_THREADS workers but always
reduced in index order, so results do not depend on the worker count.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from casimir.lib.errors import ConvergenceFailure

# Set up logging
logger = logging.getLogger(__name__)

THREADS_ENV = "LIFSHITZ_THREADS"

# Bernoulli coefficients B_2k/(2k)! of the Euler–Maclaurin tail
_EM_COEFFS = (1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0)

_HEAD_CELLS = 32
_HEAD_ORDER = 12
_BODY_ORDER = 4
_CHEB_POINTS = 16

# beyond this argument terms are below e^{-40} of the leading one
Z_CUT = 40.0

# f(x) maps a 1-d array of arguments to an array of shape (ncomp, len(x))
VectorFunction = Callable[[np.ndarray], np.ndarray]


def worker_count() -> int:
    """Worker threads from LIFSHITZ_THREADS (default 1)"""
    raw = os.getenv(THREADS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
        return 1
    return max(count, 1)


class Accumulator:
    """Running sum kept as an unevaluated pair (s, t), like math.fsum but incremental"""

    def __init__(self, value: float = 0.0):
        self._s = float(value)
        self._t = 0.0

    @staticmethod
    def two_sum(u: float, v: float) -> Tuple[float, float]:
        """Error-free transformation: u + v = s + t exactly"""
        s = u + v
        up = s - v
        vpp = s - up
        up -= u
        vpp -= v
        return s, -(up + vpp)

    def add(self, value: float) -> "Accumulator":
        y, u = self.two_sum(float(value), self._t)
        self._s, self._t = self.two_sum(y, self._s)
        if self._s == 0.0:
            self._s = u
        else:
            self._t += u
        return self

    @property
    def value(self) -> float:
        return self._s + self._t


def ordered_map(func, items: Sequence, workers: Optional[int] = None) -> List:
    """func over items, results in input order"""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


# ---------------------------------------------------------------------------
# Matsubara series
# ---------------------------------------------------------------------------

class SeriesResult(NamedTuple):
    components: np.ndarray    # per-component sums over l ≥ start
    abs_sum: float            # Σ|term| of the component total
    tail: float               # bound on the truncated remainder
    l_max: int                # last index included
    n_terms: int
    head: Optional[np.ndarray] = None   # first `keep` terms, shape (ncomp, k)


def _geometric_tail(last: float, previous: float, l_max: int) -> float:
    last, previous = abs(last), abs(previous)
    if previous > 0 and last < previous:
        q = last / previous
        return last * q / (1.0 - q)
    # no decay visible, fall back to a crude bound
    return last * max(l_max, 1)


def matsubara_sum(evaluate: VectorFunction, ncomp: int, *, offset: float = 0.0,
                  fixed_count: Optional[int] = None, tail_rel_tol: float = 1e-13,
                  chunk_size: int = 2048, max_terms: int = 20_000_000,
                  workers: Optional[int] = None, start: int = 1,
                  keep: int = 0) -> SeriesResult:
    """
    Σ_{l ≥ start} of evaluate(l), truncated by index.

    Adaptive truncation stops after three consecutive terms whose component
    total is below tail_rel_tol·|offset + partial sum|. The decision is made in
    index order, so extra chunks computed ahead by idle workers are discarded
    without changing the result.

    Args:
        evaluate: maps an integer array of indices to a (ncomp, n) array of terms
        ncomp: number of components (polarizations)
        offset: value already accumulated (the l = 0 term) for the relative test
        fixed_count: sum exactly l = start .. start + fixed_count − 1 instead
        tail_rel_tol: adaptive threshold
        chunk_size: indices per chunk
        max_terms: work budget
        workers: thread count, defaults to LIFSHITZ_THREADS
        start: first index
        keep: number of leading terms to return individually in `head`

    Raises:
        ConvergenceFailure: adaptive truncation did not trigger within max_terms
    """
    workers = worker_count() if workers is None else workers
    totals = [Accumulator() for _ in range(ncomp)]
    grand = Accumulator(offset)
    abs_sum = Accumulator()
    small_run = 0
    previous = 0.0
    next_l = start
    limit = start + (fixed_count if fixed_count is not None else max_terms)
    kept: List[np.ndarray] = []
    n_kept = 0

    def head() -> np.ndarray:
        if not kept:
            return np.zeros((ncomp, 0))
        return np.concatenate(kept, axis=1)

    while next_l < limit:
        batch = []
        for _ in range(max(workers, 1)):
            if next_l >= limit:
                break
            hi = min(next_l + chunk_size, limit)
            batch.append(np.arange(next_l, hi))
            next_l = hi
        results = ordered_map(evaluate, batch, workers)

        for indices, terms in zip(batch, results):
            terms = np.asarray(terms, dtype=float).reshape(ncomp, -1)
            if fixed_count is not None:
                if n_kept < keep:
                    kept.append(terms[:, :keep - n_kept].copy())
                    n_kept += kept[-1].shape[1]
                for c in range(ncomp):
                    totals[c].add(math.fsum(terms[c]))
                row = terms.sum(axis=0)
                abs_sum.add(math.fsum(np.abs(row)))
                l_last = int(indices[-1])
                tail = _geometric_tail(row[-1], row[-2] if len(row) > 1 else 0.0, l_last)
                if l_last + 1 >= limit:
                    logger.debug(f"Fixed truncation at l = {l_last}")
                    return SeriesResult(np.array([t.value for t in totals]),
                                        abs_sum.value, tail, l_last, l_last - start + 1, head())
                continue

            row = terms.sum(axis=0)
            for j, l in enumerate(indices):
                for c in range(ncomp):
                    totals[c].add(terms[c, j])
                if n_kept < keep:
                    kept.append(terms[:, j:j + 1].copy())
                    n_kept += 1
                grand.add(row[j])
                abs_sum.add(abs(row[j]))
                if abs(row[j]) < tail_rel_tol * abs(grand.value):
                    small_run += 1
                else:
                    small_run = 0
                if small_run >= 3:
                    tail = _geometric_tail(row[j], previous, int(l))
                    logger.debug(f"Adaptive truncation at l = {int(l)}")
                    return SeriesResult(np.array([t.value for t in totals]),
                                        abs_sum.value, tail, int(l), int(l) - start + 1, head())
                previous = row[j]
        logger.debug(f"Matsubara sum reached l = {next_l - 1}")

    raise ConvergenceFailure(
        f"Matsubara series not converged within {max_terms} terms",
        value=grand.value,
    )


# ---------------------------------------------------------------------------
# Sum minus integral
# ---------------------------------------------------------------------------

class SumIntegralResult(NamedTuple):
    components: np.ndarray   # Σ'_l f(τl) − ∫₀^∞ f(τt) dt per component
    n_cells: int
    n_evals: int
    quad_err: float          # adaptive cell-0 error estimate
    em_remainder: float      # magnitude of the last Euler–Maclaurin term


def _unit_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = leggauss(order)
    return 0.5 * (t + 1.0), 0.5 * w


def euler_maclaurin_tail(f: VectorFunction, x_c: float, tau: float,
                         ncomp: int) -> Tuple[np.ndarray, float]:
    """
    Σ_{l≥L} f(τl) − ½f(τL) − (1/τ)∫_{τL}^∞ f(x) dx for τL = x_c, from
    Chebyshev derivatives of f on [0.75x_c, 1.25x_c].

    Returns:
        (per-component correction, magnitude of the last term kept)
    """
    lo, hi = 0.75 * x_c, 1.25 * x_c
    u = chebyshev.chebpts1(_CHEB_POINTS)
    x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * u
    values = np.asarray(f(x), dtype=float).reshape(ncomp, -1)
    scale = 2.0 / (hi - lo)
    centre = (2.0 * x_c - (hi + lo)) / (hi - lo)

    correction = np.zeros(ncomp)
    last = 0.0
    for c in range(ncomp):
        coef = chebyshev.chebfit(u, values[c], _CHEB_POINTS - 1)
        for k, weight in enumerate(_EM_COEFFS):
            order = 2 * k + 1
            deriv = chebyshev.chebval(centre, chebyshev.chebder(coef, order)) * scale ** order
            term = -weight * tau ** order * deriv
            correction[c] += term
            if k == len(_EM_COEFFS) - 1:
                last = max(last, abs(term))
    return correction, last


def _cell_differences(f: VectorFunction, tau: float, cells: np.ndarray, order: int,
                      ncomp: int) -> np.ndarray:
    """½(f(τl) + f(τ(l+1))) − ∫_l^{l+1} f(τt) dt for a run of consecutive cells"""
    t, w = _unit_rule(order)
    ends = np.arange(cells[0], cells[-1] + 2, dtype=float)
    interior = (cells[:, None] + t[None, :]).ravel()
    x = tau * np.concatenate([ends, interior])
    values = np.asarray(f(x), dtype=float).reshape(ncomp, -1)
    f_ends = values[:, :len(ends)]
    f_int = values[:, len(ends):].reshape(ncomp, len(cells), order)
    trapezoid = 0.5 * (f_ends[:, :-1] + f_ends[:, 1:])
    return trapezoid - f_int @ w


def sum_minus_integral(f: VectorFunction, tau: float, ncomp: int = 1, *,
                       x_switch: float = 1.0, direct_tau: float = 0.05,
                       kinks: Sequence[float] = (), chunk_size: int = 2048,
                       max_cells: int = 20_000_000, min_cells: int = 16,
                       workers: Optional[int] = None,
                       epsrel: float = 1e-12) -> SumIntegralResult:
    """
    Σ'_l f(τl) − ∫₀^∞ f(τt) dt, the prime halving the l = 0 term.

    The difference is accumulated cell by cell over [l, l+1] so that sum and
    integral share evaluations near each Matsubara point. Beyond x_switch the
    remaining tail is closed with three Euler–Maclaurin terms; above direct_tau
    the cells run out to x = 40 instead.

    Args:
        f: vectorized function, returns (ncomp, n)
        tau: Matsubara spacing
        ncomp: number of components
        x_switch: argument at which the Euler–Maclaurin tail takes over
        direct_tau: spacing above which the tail is summed directly
        kinks: arguments where f has structure; cells up to twice these use
            the high-order rule and cell 0 splits at them
        chunk_size: cells per chunk
        max_cells: work budget
        min_cells: never fewer cells than this
        workers: thread count
        epsrel: tolerance for the adaptive cell-0 integral
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    workers = worker_count() if workers is None else workers
    x_l = Z_CUT if tau > direct_tau else x_switch
    n_cells = max(min_cells, int(math.ceil(x_l / tau)))
    if n_cells > max_cells:
        raise ConvergenceFailure(f"sum-minus-integral needs {n_cells} cells, budget is {max_cells}")

    # cell 0 adaptively
    def g(t):
        return np.asarray(f(np.array([tau * t])), dtype=float).reshape(ncomp)

    points = [k / tau for k in kinks if 0.0 < k / tau < 1.0]
    cell0, quad_err = integrate.quad_vec(g, 0.0, 1.0, epsabs=0.0, epsrel=epsrel,
                                         points=points or None)
    ends0 = np.asarray(f(np.array([0.0, tau])), dtype=float).reshape(ncomp, 2)
    totals = [Accumulator(0.5 * (ends0[c, 0] + ends0[c, 1]) - cell0[c]) for c in range(ncomp)]
    n_evals = 0

    head = max(_HEAD_CELLS, int(math.ceil(2.0 * max(kinks, default=0.0) / tau)))
    chunks = []
    lo = 1
    while lo < n_cells:
        hi = min(lo + chunk_size, n_cells)
        if lo < head < hi:
            hi = head
        chunks.append(np.arange(lo, hi))
        lo = hi

    def run(cells):
        order = _HEAD_ORDER if cells[0] < head else _BODY_ORDER
        diffs = _cell_differences(f, tau, cells, order, ncomp)
        return [math.fsum(diffs[c]) for c in range(ncomp)], len(cells) * (order + 1) + 1

    for sums, evals in ordered_map(run, chunks, workers):
        for c in range(ncomp):
            totals[c].add(sums[c])
        n_evals += evals

    em = np.zeros(ncomp)
    em_last = 0.0
    if x_l < Z_CUT:
        em, em_last = euler_maclaurin_tail(f, tau * n_cells, tau, ncomp)
        n_evals += _CHEB_POINTS
    for c in range(ncomp):
        totals[c].add(em[c])

    logger.debug(f"Sum-minus-integral over {n_cells} cells at tau = {tau:.3e}")
    return SumIntegralResult(np.array([t.value for t in totals]), n_cells, n_evals,
                             float(np.max(quad_err)) if np.ndim(quad_err) else float(quad_err),
                             em_last)


def tail_sum(f: VectorFunction, tau: float, ncomp: int, x_c: float,
             x_end: float = 45.0, order: int = 16) -> Tuple[np.ndarray, float]:
    """
    Σ_{l≥L} f(τl) for τL = x_c by (1/τ)∫_{x_c}^{x_end} f + ½f(x_c) plus the
    Euler–Maclaurin corrections.

    Returns:
        (per-component sum, magnitude of the last correction term)
    """
    breaks = [x_c] + [b for b in (2.0, 5.0, 10.0, 20.0, 30.0) if x_c < b < x_end] + [x_end]
    t, w = _unit_rule(order)
    nodes = np.concatenate([lo + (hi - lo) * t for lo, hi in zip(breaks, breaks[1:])])
    weights = np.concatenate([(hi - lo) * w for lo, hi in zip(breaks, breaks[1:])])
    values = np.asarray(f(np.concatenate([[x_c], nodes])), dtype=float).reshape(ncomp, -1)
    integral = values[:, 1:] @ weights / tau
    em, last = euler_maclaurin_tail(f, x_c, tau, ncomp)
    return integral + 0.5 * values[:, 0] + em, last
