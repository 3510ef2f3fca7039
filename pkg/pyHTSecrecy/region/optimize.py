"""
Optimization of the type-II exponent over auxiliary channels.

The feasible set of :math:`P_{U|X}` is not convex, so the search is a multi-start local
search: every start (random Dirichlet rows or a warm start) is refined by Powell's method on
a stick-breaking parametrization of the rows, maximizing :math:`I_P(U;Y)` minus a quadratic
penalty on the constraint violations. The penalty weight is escalated when the incumbent is
still infeasible. A final repair step mixes the incumbent towards the channel with the same
:math:`P_U` but independent of :math:`X`; along that segment :math:`I_P(U;X)` is convex and
the equivocation caps are concave with their extreme values at the end point, so feasibility
is monotone and a scalar root finder locates the smallest feasible mixing weight.

Every returned exponent is certified: its argmax is re-evaluated through
:py:func:`region.evaluation.evaluate_point` before it leaves this module.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize

from pyHTSecrecy.probcore import CondPmf, SourceModel
from pyHTSecrecy.region.evaluation import AuxChannel, RegionEvaluator, evaluate_point
from pyHTSecrecy.utility.exceptions import DimensionError, NumericalError
from pyHTSecrecy.utility.process_functions import map_parallel
from pyHTSecrecy.utility.utils import derive_rng, devLogger, htparams, mylog

#: Number of times the penalty weight is multiplied by 10 before repair takes over.
PENALTY_ESCALATIONS = 3
#: Tolerance of the pointwise nesting check between the three curves of a sweep.
NESTING_TOLERANCE = 1e-6


class Baseline(Enum):
    """Which constraint set an exponent query optimizes under."""

    #: Rate and both equivocation constraints with the :math:`\\epsilon`-mixed caps.
    OPTIMAL = "OPTIMAL"
    #: Rate and the H0 equivocation constraint with :math:`\\epsilon = 0`; no H1 constraint.
    EPS_ZERO_H0_ONLY = "EPS_ZERO_H0_ONLY"
    #: Rate constraint only (no secrecy).
    NO_SECURITY = "NO_SECURITY"


class OptimizationStatus(Enum):
    """Outcome of an exponent query."""

    FEASIBLE = "FEASIBLE"
    #: Even a constant :math:`U` violates an equivocation constraint.
    INFEASIBLE = "INFEASIBLE"
    #: A certified feasible point was found, but no local search reported convergence.
    UNCONVERGED = "UNCONVERGED"


@dataclass(frozen=True)
class ExponentQuery:
    """
    A point :math:`(R, \\Delta_0, \\Delta_1, \\epsilon)` at which the largest exponent is sought.
    """

    rate: float
    delta0: float = 0.0
    delta1: float = 0.0
    epsilon: float = 0.0
    baseline: Baseline = Baseline.OPTIMAL

    def __post_init__(self):
        object.__setattr__(self, "baseline", Baseline(self.baseline))
        if not self.rate >= 0:
            raise ValueError(f"Rate must be non-negative, got {self.rate}.")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}.")


@dataclass(frozen=True)
class OptimizerConfig:
    """
    Settings of the multi-start search.

    ``u_size=None`` means the cardinality bound :math:`|\\mathcal{X}|+3`.
    """

    u_size: Optional[int] = None
    restarts: int = 6
    grid_step: float = 0.02
    max_iters: int = 60
    tol: float = 1e-6
    penalty_weight: float = 1e3
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}.")
        if not 0 < self.grid_step <= 0.5:
            raise ValueError(f"grid_step must lie in (0, 0.5], got {self.grid_step}.")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}.")
        if self.u_size is not None and self.u_size < 1:
            raise ValueError(f"u_size must be >= 1, got {self.u_size}.")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}.")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}.")

    @classmethod
    def from_defaults(cls, **overrides):
        """Build a config from ``defaults.optimizer`` in ``config.yaml`` plus overrides."""
        params = dict(htparams["defaults"]["optimizer"])
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(
            u_size=params.get("u_size"),
            restarts=int(params["restarts"]),
            grid_step=float(params["grid_step"]),
            max_iters=int(params["max_iters"]),
            tol=float(params["tol"]),
            penalty_weight=float(params["penalty_weight"]),
            seed=int(params["seed"]),
        )

    def resolved_u_size(self, x_size):
        return self.u_size if self.u_size is not None else x_size + 3


@dataclass(frozen=True)
class ExponentResult:
    """
    Answer to an exponent query.

    ``theta`` is ``nan`` and ``aux`` is ``None`` when the query is infeasible.
    """

    theta: float
    aux: Optional[AuxChannel]
    status: OptimizationStatus
    point: Optional[object] = None
    starts: int = 0
    converged_starts: int = 0
    query: Optional[ExponentQuery] = field(default=None, compare=False)

    @property
    def feasible(self):
        return self.status is not OptimizationStatus.INFEASIBLE


@dataclass(frozen=True)
class _Constraints:
    rate: float
    delta0: Optional[float]
    delta1: Optional[float]
    epsilon: float

    @classmethod
    def of(cls, q: ExponentQuery):
        if q.baseline is Baseline.OPTIMAL:
            return cls(q.rate, q.delta0, q.delta1, q.epsilon)
        if q.baseline is Baseline.EPS_ZERO_H0_ONLY:
            return cls(q.rate, q.delta0, None, 0.0)
        return cls(q.rate, None, None, 0.0)

    def margins(self, qty):
        """Signed violations (positive = violated), stacked on a trailing axis."""
        rate = qty["rate_needed"] - self.rate
        off = np.full_like(rate, -np.inf)
        d0 = off if self.delta0 is None else self.delta0 - qty["delta0_cap"]
        d1 = off if self.delta1 is None else self.delta1 - qty["delta1_cap"]
        return np.stack([rate, d0, d1], axis=-1)

    def caps_reachable(self, ev: RegionEvaluator):
        ok0 = self.delta0 is None or self.delta0 <= ev.h_p_x_given_z
        ok1 = self.delta1 is None or self.delta1 <= ev.h_q_x_given_z
        return ok0 and ok1


@dataclass(frozen=True)
class _Candidate:
    theta: float
    rate_needed: float
    rows: np.ndarray
    converged: bool
    index: int


# ---------------------------------------------------------------------------------------#
# Parametrization                                                                        #
# ---------------------------------------------------------------------------------------#
def _sticks_to_rows(v, x_size, u_size):
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0).reshape(x_size, u_size - 1)
    remaining = np.cumprod(1.0 - v, axis=1)
    rows = np.empty((x_size, u_size))
    rows[:, 0] = v[:, 0]
    rows[:, 1:-1] = v[:, 1:] * remaining[:, :-1]
    rows[:, -1] = remaining[:, -1]
    return rows


def _rows_to_sticks(rows):
    rows = np.asarray(rows, dtype=float)
    before = 1.0 - np.hstack([np.zeros((rows.shape[0], 1)), np.cumsum(rows, axis=1)[:, :-2]])
    safe = np.where(before > 1e-15, before, 1.0)
    v = np.where(before > 1e-15, rows[:, :-1] / safe, 0.5)
    return np.clip(v, 0.0, 1.0).reshape(-1)


def _check_finite(value, what):
    if not np.all(np.isfinite(value)):
        raise NumericalError(f"Non-finite value in {what}: {value}.")


# ---------------------------------------------------------------------------------------#
# Local search                                                                           #
# ---------------------------------------------------------------------------------------#
def _objective(v, ev, cons, shape, weight):
    qty = ev.quantities(_sticks_to_rows(v, *shape), cons.epsilon)
    violation = np.clip(cons.margins(qty), 0.0, None)
    value = -qty["exponent"] + weight * float(np.sum(violation**2))
    _check_finite(value, "the penalty objective")
    return value


def _max_margin(rows, ev, cons):
    return float(np.max(cons.margins(ev.quantities(rows, cons.epsilon))))


def _repair(rows, ev, cons, tol):
    """Mix ``rows`` towards the :math:`X`-independent channel until feasible within tol/2."""
    slack = tol / 2
    independent = np.tile(ev.px @ rows, (rows.shape[0], 1))

    def gap(lam):
        return _max_margin((1 - lam) * rows + lam * independent, ev, cons) - slack

    if gap(0.0) <= 0:
        return rows
    if gap(1.0) > 0:
        return None
    root = brentq(gap, 0.0, 1.0, xtol=1e-13)
    for step in (0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2):
        lam = min(1.0, root + step)
        if gap(lam) <= 0:
            break
    else:
        lam = 1.0
    return (1 - lam) * rows + lam * independent


def _local_search(start, ev, cons, cfg):
    index, rows = start
    shape = rows.shape
    v = _rows_to_sticks(rows)
    weight = cfg.penalty_weight
    converged = False
    for _ in range(PENALTY_ESCALATIONS + 1):
        res = minimize(
            _objective,
            v,
            args=(ev, cons, shape, weight),
            method="Powell",
            bounds=[(0.0, 1.0)] * v.size,
            options={"maxiter": cfg.max_iters, "xtol": 1e-9, "ftol": 1e-12},
        )
        v = np.clip(res.x, 0.0, 1.0)
        converged = bool(res.success)
        if _max_margin(_sticks_to_rows(v, *shape), ev, cons) <= cfg.tol / 2:
            break
        weight *= 10.0

    repaired = _repair(_sticks_to_rows(v, *shape), ev, cons, cfg.tol)
    devLogger.debug(
        f"start {index}: converged={converged}, final weight={weight:.3g}, "
        f"repaired={repaired is not None}."
    )
    return _as_candidate(repaired, ev, cons, converged, index)


def _as_candidate(rows, ev, cons, converged, index):
    if rows is None:
        return None
    qty = ev.quantities(rows, cons.epsilon)
    _check_finite(np.array([qty["exponent"], qty["rate_needed"]]), "a candidate")
    return _Candidate(
        theta=float(qty["exponent"]),
        rate_needed=float(qty["rate_needed"]),
        rows=rows,
        converged=converged,
        index=index,
    )


def _pick(candidates, tol):
    """Best exponent; among those within ``tol`` of it, the cheapest rate; then lowest index."""
    candidates = [c for c in candidates if c is not None]
    if not candidates:
        return None
    best = max(c.theta for c in candidates)
    near = [c for c in candidates if c.theta >= best - tol]
    return min(near, key=lambda c: (c.rate_needed, c.index))


def _fit_rows(aux, x_size, u_size):
    if aux is None or aux.x_size != x_size or aux.u_size > u_size:
        return None
    return aux.padded(u_size).matrix.copy()


# ---------------------------------------------------------------------------------------#
# Queries                                                                                #
# ---------------------------------------------------------------------------------------#
def _certify(model, q, cons, candidate, cfg, starts, converged):
    aux = AuxChannel(CondPmf(candidate.rows))
    point = evaluate_point(model, aux, cons.epsilon)
    margins = [point.rate_needed - q.rate]
    if cons.delta0 is not None:
        margins.append(cons.delta0 - point.delta0_cap)
    if cons.delta1 is not None:
        margins.append(cons.delta1 - point.delta1_cap)
    _check_finite(np.array(margins + [point.exponent]), "certification")
    if max(margins) > cfg.tol or abs(point.exponent - candidate.theta) > cfg.tol:
        raise NumericalError(
            f"Argmax failed re-verification (margins={margins}, exponent "
            f"{point.exponent:.9g} vs {candidate.theta:.9g})."
        )
    status = OptimizationStatus.FEASIBLE if converged else OptimizationStatus.UNCONVERGED
    if not converged:
        mylog.warning(
            f"No local search converged for {q}; returning the certified lower bound."
        )
    return ExponentResult(
        theta=point.exponent,
        aux=aux,
        status=status,
        point=point,
        starts=starts,
        converged_starts=converged,
        query=q,
    )


def _solve(model, q, cfg, warm_starts=(), rate_index=0, ev=None):
    ev = ev if ev is not None else RegionEvaluator(model)
    cons = _Constraints.of(q)
    x_size = model.x_size
    u_size = cfg.resolved_u_size(x_size)

    if not cons.caps_reachable(ev):
        mylog.info(
            f"{q.baseline.value} query infeasible: caps H_P(X|Z)={ev.h_p_x_given_z:.6g}, "
            f"H_Q(X|Z)={ev.h_q_x_given_z:.6g}."
        )
        return ExponentResult(
            math.nan, None, OptimizationStatus.INFEASIBLE, query=q
        )

    if q.rate <= cfg.tol or u_size == 1:
        constant = _Candidate(0.0, 0.0, AuxChannel.constant(x_size, u_size).matrix, True, 0)
        return _certify(model, q, cons, constant, cfg, 0, 1)

    starts = []
    direct = []
    for aux in warm_starts:
        rows = _fit_rows(aux, x_size, u_size)
        if rows is None:
            continue
        index = len(starts)
        starts.append((index, rows))
        if _max_margin(rows, ev, cons) <= cfg.tol / 2:
            direct.append(_as_candidate(rows, ev, cons, True, index))
    # constant and identity channels compete as candidates without a local search
    anchors = [AuxChannel.constant(x_size), AuxChannel.identity(x_size)]
    for index, aux in enumerate(anchors, start=len(starts) + cfg.restarts):
        rows = _fit_rows(aux, x_size, u_size)
        if rows is not None and _max_margin(rows, ev, cons) <= cfg.tol / 2:
            direct.append(_as_candidate(rows, ev, cons, True, index))
    for r in range(cfg.restarts):
        rng = derive_rng(cfg.seed, r, rate_index)
        starts.append((len(starts), rng.dirichlet(np.ones(u_size), size=x_size)))

    results = map_parallel(
        lambda start: _local_search(start, ev, cons, cfg),
        starts,
        desc=f"{q.baseline.value} R={q.rate:.4g}",
    )
    found = [c for c in results if c is not None]
    best = _pick(found + direct, cfg.tol)
    if best is None:
        # unreachable when the caps pre-check passed: repair always reaches U independent of X
        raise NumericalError(f"No feasible candidate found for {q}.")
    converged = sum(c.converged for c in found)
    return _certify(model, q, cons, best, cfg, len(starts), converged)


def optimal_exponent(
    model: SourceModel, q: ExponentQuery, cfg: OptimizerConfig, warm_starts=(), rate_index=0
):
    """
    Largest type-II exponent :math:`I_P(U;Y)` subject to :math:`I_P(U;X) \\le R` and both
    :math:`\\epsilon`-mixed equivocation caps.

    Parameters
    ----------
    model: SourceModel
        The source.
    q: ExponentQuery
        Query with ``baseline = OPTIMAL``.
    cfg: OptimizerConfig
        Search settings.
    warm_starts: sequence of AuxChannel, optional
        Extra starting points (also kept as candidates when already feasible).
    rate_index: int, optional
        Index of the query within a sweep; part of every restart's RNG stream key.

    Returns
    -------
    ExponentResult
        ``INFEASIBLE`` when :math:`\\Delta_0 > H_P(X|Z)` or :math:`\\Delta_1 > H_Q(X|Z)`.
    """
    if Baseline(q.baseline) is not Baseline.OPTIMAL:
        raise ValueError(f"optimal_exponent needs an OPTIMAL query, got {q.baseline}.")
    return _solve(model, q, cfg, warm_starts, rate_index)


def baseline_exponent(
    model: SourceModel, q: ExponentQuery, cfg: OptimizerConfig, warm_starts=(), rate_index=0
):
    """
    Exponent of a comparison baseline: ``EPS_ZERO_H0_ONLY`` (rate and
    :math:`\\Delta_0 \\le H_P(X|UZ)` only) or ``NO_SECURITY`` (rate only).

    Same contract as :py:func:`optimal_exponent`.
    """
    if Baseline(q.baseline) is Baseline.OPTIMAL:
        raise ValueError("baseline_exponent does not take OPTIMAL queries.")
    return _solve(model, q, cfg, warm_starts, rate_index)


def _rescore(model, result, extra, cfg, ev):
    """Replace ``result`` by a better already-known argmax when one is feasible for it."""
    if not result.feasible:
        return result
    cons = _Constraints.of(result.query)
    u_size = cfg.resolved_u_size(model.x_size)
    candidates = [_Candidate(result.theta, result.point.rate_needed, result.aux.matrix, True, 0)]
    for i, aux in enumerate(extra, start=1):
        rows = _fit_rows(aux, model.x_size, u_size)
        if rows is not None and _max_margin(rows, ev, cons) <= cfg.tol / 2:
            candidates.append(_as_candidate(rows, ev, cons, True, i))
    best = _pick(candidates, cfg.tol)
    if best.index == 0 or best.theta <= result.theta:
        return result
    improved = _certify(model, result.query, cons, best, cfg, result.starts, result.converged_starts)
    return replace(improved, status=result.status)


# ---------------------------------------------------------------------------------------#
# Oracle                                                                                 #
# ---------------------------------------------------------------------------------------#
def _simplex_grid(u_size, steps):
    if u_size == 1:
        return np.ones((1, 1))
    points = []

    def fill(prefix, left, slots):
        if slots == 1:
            points.append(prefix + [left])
            return
        for k in range(left + 1):
            fill(prefix + [k], left - k, slots - 1)

    fill([], steps, u_size)
    return np.array(points, dtype=float) / steps


def brute_force_oracle(model: SourceModel, q: ExponentQuery, grid_step: float, u_size: int):
    """
    Exhaustive grid scan over :math:`P_{U|X}` for binary :math:`X`.

    Every row ranges over the simplex grid with spacing ``grid_step``; the constraint set is
    the one of ``q.baseline``.

    Returns
    -------
    float
        The best feasible exponent on the grid, ``-inf`` when no grid point is feasible.
    """
    if model.x_size != 2 or u_size > 3 or u_size < 1:
        raise DimensionError(
            f"The oracle enumerates |X| = 2 and |U| <= 3 only (got |X|={model.x_size}, |U|={u_size})."
        )
    steps = int(round(1.0 / grid_step))
    if abs(steps * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must divide 1, got {grid_step}.")

    ev = RegionEvaluator(model)
    cons = _Constraints.of(q)
    grid = _simplex_grid(u_size, steps)
    best = -math.inf
    for first in grid:
        batch = np.empty((grid.shape[0], 2, u_size))
        batch[:, 0, :] = first
        batch[:, 1, :] = grid
        qty = ev.quantities(batch, cons.epsilon)
        feasible = np.all(cons.margins(qty) <= 1e-12, axis=-1)
        if np.any(feasible):
            best = max(best, float(np.max(qty["exponent"][feasible])))
    return best


# ---------------------------------------------------------------------------------------#
# Sweeps                                                                                 #
# ---------------------------------------------------------------------------------------#
@dataclass(frozen=True)
class SweepRow:
    """One rate point of a three-curve sweep."""

    rate: float
    optimal: ExponentResult
    eps0: ExponentResult
    nosec: ExponentResult
    nesting_ok: bool

    @property
    def theta_optimal(self):
        return self.optimal.theta

    @property
    def theta_eps0(self):
        return self.eps0.theta

    @property
    def theta_nosec(self):
        return self.nosec.theta


def _running_max(current, previous):
    if previous is None or not previous.feasible or not current.feasible:
        return current
    if previous.theta > current.theta:
        return replace(previous, query=current.query)
    return current


def sweep_rate_curve(model: SourceModel, rates, delta0, delta1, epsilon, cfg: OptimizerConfig):
    """
    Optimal exponent and both baselines over an ascending list of rates.

    Each rate's searches are warm-started from the previous rate's argmaxes and from each
    other's, and every curve is made non-decreasing by a running maximum (the feasible set
    grows with :math:`R`). The pointwise nesting
    ``theta_eps0 <= theta_optimal <= theta_nosec`` is checked on every row where the
    optimal query is feasible.

    Returns
    -------
    list of SweepRow
    """
    rates = [float(r) for r in rates]
    if any(b < a for a, b in zip(rates, rates[1:])):
        raise ValueError("Rates must be sorted in ascending order.")

    ev = RegionEvaluator(model)
    mylog.info(
        f"Sweeping {len(rates)} rates: H_P(X|Z)={ev.h_p_x_given_z:.6g}, "
        f"H_Q(X|Z)={ev.h_q_x_given_z:.6g}, I_P(X;Y)={ev.i_xy:.6g}."
    )
    rows = []
    prev = {"optimal": None, "eps0": None, "nosec": None}

    def warm(*results):
        return [r.aux for r in results if r is not None and r.aux is not None]

    for i, rate in enumerate(rates):
        q_opt = ExponentQuery(rate, delta0, delta1, epsilon, Baseline.OPTIMAL)
        q_eps0 = replace(q_opt, baseline=Baseline.EPS_ZERO_H0_ONLY)
        q_nosec = replace(q_opt, baseline=Baseline.NO_SECURITY)

        eps0 = _solve(model, q_eps0, cfg, warm(prev["eps0"]), i, ev)
        opt = _solve(model, q_opt, cfg, warm(prev["optimal"], eps0), i, ev)
        nosec = _solve(model, q_nosec, cfg, warm(prev["nosec"], opt, eps0), i, ev)

        # cross-feed argmaxes that are feasible for the other constraint sets
        opt = _rescore(model, opt, warm(nosec), cfg, ev)
        eps0 = _rescore(model, eps0, warm(opt, nosec), cfg, ev)
        nosec = _rescore(model, nosec, warm(opt, eps0), cfg, ev)

        eps0 = _running_max(eps0, prev["eps0"])
        opt = _running_max(opt, prev["optimal"])
        nosec = _running_max(nosec, prev["nosec"])

        nesting_ok = True
        if opt.feasible:
            if eps0.feasible and eps0.theta > opt.theta + NESTING_TOLERANCE:
                nesting_ok = False
            if nosec.theta < opt.theta - NESTING_TOLERANCE:
                nesting_ok = False
        if not nesting_ok:
            mylog.warning(
                f"Nesting violated at R={rate:.6g}: eps0={eps0.theta:.9g}, "
                f"optimal={opt.theta:.9g}, nosec={nosec.theta:.9g}."
            )
        devLogger.debug(
            f"R={rate:.6g}: optimal={opt.theta:.9g} ({opt.status.value}), "
            f"eps0={eps0.theta:.9g}, nosec={nosec.theta:.9g}."
        )
        rows.append(SweepRow(rate, opt, eps0, nosec, nesting_ok))
        prev = {"optimal": opt, "eps0": eps0, "nosec": nosec}
    return rows
