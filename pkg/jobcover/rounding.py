import math
import logging

import numpy as np

from .error import RoundingError, ScheduleError
from .instance import build_timeline
from .flow import build_flow_graph, max_flow, is_valid, \
    extract_schedule, validate_schedule
from .lp import TOL, FracSolution, deficiency, make_cut, separate, solve_lp
from .util import digest


logger = logging.getLogger(__name__)

REINFLATE = 10
PREFIX_SHARE = 0.1


class RoundingConfig:
    """Rounding parameters.

    Attributes
    ----------
    c : `None` or `float`
        Sampling scale in ``(0, 1/10]``; `None` - instance default.
    max_phases : `int`
        Phase cap before the deterministic fallback.
    seed : `int`
        RNG seed.
    tol : `float`
        Separation tolerance.
    close_critical : `bool`
        Grow the critical set until the reinflated solution separates.
    critical_order : `str`
        ``alpha`` - order jobs by ``C_{j,alpha}``; ``c`` - by the latest
        ``t`` with ``x'[j][t] >= c``.
    check : `bool`
        Run full separation on every reinflated solution and fail loudly.
    """

    DEFAULT_MAX_PHASES = 64
    ORDERS = ('alpha', 'c')

    def __init__(self, c=None, max_phases=DEFAULT_MAX_PHASES, seed=0,
                 tol=TOL, close_critical=True, critical_order='alpha',
                 check=False):
        if c is not None and not 0 < c <= 0.1:
            raise ValueError('c must lie in (0, 0.1], got %r' % c)
        if max_phases < 0:
            raise ValueError('max_phases must be >= 0')
        if critical_order not in self.ORDERS:
            raise ValueError('unknown critical order "%s"' % critical_order)
        self.c = c
        self.max_phases = int(max_phases)
        self.seed = seed
        self.tol = tol
        self.close_critical = close_critical
        self.critical_order = critical_order
        self.check = check

    def __str__(self):
        return '<rounding c=%s phases=%d seed=%s>' % (
            self.c, self.max_phases, self.seed
        )

    __repr__ = __str__

    def scale(self, instance):
        """Sampling scale for `instance`."""
        if self.c is not None:
            return self.c
        return default_c(instance)


def default_c(instance):
    """``min(1/10, 1 / (1000 max(1, ln ln nP)))``."""
    size = instance.n * instance.P
    loglog = math.log(math.log(size)) if size > math.e else 0.0
    return min(0.1, 1.0 / (1000.0 * max(1.0, loglog)))


class PhaseRecord:
    """One sample-test-reinflate iteration.

    Attributes
    ----------
    index : `int`
    alpha : `list` of `float`
    c_alpha : `list` of `int`
    lp_int : `float`
    lp_frac : `float`
        Cost split of the phase input.
    cuts_violated : `list` of (`int`, `tuple` of `int`)
    critical : `dict` of ((`int`, `tuple`), `tuple` of `int`)
        Critical jobs per unsatisfied cut, closure cuts included.
    critical_union : `tuple` of `int`
    next_lp_int : `None` or `float`
    next_lp_frac : `None` or `float`
        Cost split of the reinflated solution.
    next_digest : `None` or `str`
    snapped : `bool`
        Early exit on negligible fractional mass was taken.
    """

    def __init__(self, index, alpha, c_alpha, lp_int, lp_frac):
        self.index = index
        self.alpha = [float(a) for a in alpha]
        self.c_alpha = [int(c) for c in c_alpha]
        self.lp_int = lp_int
        self.lp_frac = lp_frac
        self.cuts_violated = []
        self.critical = {}
        self.critical_union = ()
        self.next_lp_int = None
        self.next_lp_frac = None
        self.next_digest = None
        self.snapped = False

    def __str__(self):
        return '<phase %d C=%s %d cuts>' % (
            self.index, self.c_alpha, len(self.cuts_violated)
        )

    __repr__ = __str__

    def to_dict(self):
        return {
            'index': self.index,
            'alpha': self.alpha,
            'c_alpha': self.c_alpha,
            'lp_int': self.lp_int,
            'lp_frac': self.lp_frac,
            'cuts_violated': [
                {'b': b, 'D': list(D)} for b, D in self.cuts_violated
            ],
            'critical': [
                {'b': b, 'D': list(D), 'jobs': list(jobs)}
                for (b, D), jobs in self.critical.items()
            ],
            'critical_union': list(self.critical_union),
            'next_lp_int': self.next_lp_int,
            'next_lp_frac': self.next_lp_frac,
            'next_digest': self.next_digest,
            'snapped': self.snapped
        }


class RoundingResult:
    """Rounding outcome.

    Attributes
    ----------
    completions : `tuple` of `int`
        Completion times on the schedule timeline.
    cost : `float`
    schedule : `jobcover.flow.Schedule`
    trace : `list` of `jobcover.rounding.PhaseRecord`
    fallback : `bool`
        The phase cap was hit.
    """

    def __init__(self, completions, cost, schedule, trace, fallback):
        self.completions = tuple(completions)
        self.cost = cost
        self.schedule = schedule
        self.trace = trace
        self.fallback = fallback

    def __str__(self):
        return '<rounding result C=%s cost=%g phases=%d%s>' % (
            list(self.completions), self.cost, self.phases,
            ' fallback' if self.fallback else ''
        )

    __repr__ = __str__

    @property
    def phases(self):
        return len(self.trace)


def split_cost(instance, x):
    """Integral and fractional cost of a fractional solution.

    Returns
    -------
    (`float`, `float`)
        ``sum_j g_j(beta_j)`` and the marginal-cost mass past ``beta_j``,
        ``beta_j`` being the latest ``t`` with ``x[j][t] = 1``.
    """
    beta = x.completions()
    lp_int = float(sum(
        instance.cost_table[j, t] for j, t in enumerate(beta)
    ))
    t = np.arange(instance.horizon + 1)
    tail = (t[None, :] > beta[:, None]) & (x.x > 0)
    lp_frac = float(np.sum(np.where(tail, x.x * instance.marginal_table,
                                    0.0)))
    return lp_int, lp_frac


def sample(x, c, rng):
    """Draw ``alpha_j ~ U[0, 1]`` in job order and threshold ``x`` at
    ``c alpha_j``.

    Returns
    -------
    (`numpy.ndarray`, `numpy.ndarray` of `int`)
        ``alpha`` and ``C_alpha``.
    """
    alpha = rng.random(x.n)
    return alpha, x.latest(c * alpha)


def integralize(completions, horizon):
    """0/1 solution that is 1 up to each completion time."""
    return FracSolution.from_completions(completions, horizon)


def unsatisfied_cuts(instance, completions):
    """Cuts ``(b, D')`` with ``D' = C`` left unsatisfied by the integral
    solution of `completions`.

    Returns
    -------
    `list` of (`int`, `tuple` of `int`)
    """
    D = tuple(int(c) for c in completions)
    return [
        (b, D) for b in range(1, instance.horizon + 1)
        if deficiency(instance, b, D) > 0
    ]


def _prefix(jobs, mass, need):
    ret = set()
    total = 0.0
    for j in jobs:
        ret.add(j)
        total += mass[j]
        if total >= need:
            break
    return frozenset(ret)


def split_critical(mass, order, V):
    """Split contributing jobs by the tenth-mass prefix rule.

    Parameters
    ----------
    mass : `list` of `float`
        Eligible mass per job.
    order : `list` of `int`
        Ordering key per job; ties go by job id.
    V : `int`
        Deficiency.

    Returns
    -------
    (`frozenset`, `frozenset`, `frozenset`)
        Critical jobs, ``L`` (increasing order prefix) and ``M``
        (decreasing order prefix). The critical set falls back to every
        contributing job when both prefixes cover them all.

    Examples
    --------
    >>> crit, L, M = split_critical([3, 3, 3, 3], [1, 2, 3, 4], 10)
    >>> sorted(crit), sorted(L), sorted(M)
    ([1, 2], [0], [3])
    >>> sorted(split_critical([1.5, 8], [1, 2], 10)[0])
    [0, 1]
    """
    contributing = [j for j, value in enumerate(mass) if value > 0]
    need = PREFIX_SHARE * V
    M = _prefix(sorted(contributing, key=lambda j: (-order[j], j)),
                mass, need)
    L = _prefix(sorted(contributing, key=lambda j: (order[j], j)),
                mass, need)
    ret = frozenset(contributing) - L - M
    if not ret:
        logger.debug('no job outside L=%s M=%s', sorted(L), sorted(M))
        ret = frozenset(contributing)
    return ret, L, M


def critical_jobs(instance, x_prev, b, D, order=None):
    """Jobs critical for satisfying cut ``(b, D)`` in ``x_prev``.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    x_prev : `jobcover.lp.FracSolution`
    b : `int`
    D : `tuple` of `int`
    order : `None` or `list` of `int`, optional
        Ordering key per job (default `D`).

    Returns
    -------
    `frozenset` of `int`
    """
    cut = make_cut(instance, b, D)
    if cut is None:
        return frozenset()
    mass = [
        float(sum(x_prev[j, t] for t in times))
        for j, times in enumerate(cut.eligible)
    ]
    return split_critical(mass, D if order is None else order, cut.V)[0]


def reinflate(x_prev, completions, critical):
    """Build the next phase input.

    Every job keeps 1 up to its completion time; critical jobs get
    ``min(1, 10 x_prev)`` after it, other jobs 0.

    Returns
    -------
    `jobcover.lp.FracSolution`
    """
    horizon = x_prev.horizon
    t = np.arange(horizon + 1)
    completions = np.asarray(completions)
    head = t[None, :] <= completions[:, None]
    scaled = np.minimum(1.0, REINFLATE * x_prev.x)
    keep = np.zeros(x_prev.n, dtype=bool)
    keep[list(critical)] = True
    x = np.where(head, 1.0, np.where(keep[:, None], scaled, 0.0))
    np.minimum.accumulate(x, axis=1, out=x)
    return FracSolution(x)


class Rounding:
    """Phased randomized rounding of a fractional job-cover solution.

    Attributes
    ----------
    instance : `jobcover.instance.Instance`
    config : `jobcover.rounding.RoundingConfig`
    rng : `numpy.random.Generator`
    trace : `list` of `jobcover.rounding.PhaseRecord`
    """

    logger = logging.getLogger(__name__)

    def __init__(self, instance, config=None):
        self.instance = instance
        self.config = config or RoundingConfig()
        self.c = self.config.scale(instance)
        self.rng = np.random.default_rng(self.config.seed)
        self.unit = build_timeline(instance, 'unit')
        self.trace = []

    def __str__(self):
        return '<rounding %s c=%g>' % (self.instance, self.c)

    __repr__ = __str__

    @property
    def snap_threshold(self):
        size = max(1, self.instance.P * self.instance.n)
        return 1.0 / size ** 2

    def _order(self, x, completions):
        if self.config.critical_order == 'c':
            return [int(t) for t in x.latest(self.c)]
        return None

    def _close(self, x, completions, critical, union, order):
        x_next = reinflate(x, completions, union)
        if not self.config.close_critical:
            return x_next, union
        while True:
            cut = separate(self.instance, x_next, self.config.tol)
            if cut is None:
                return x_next, union
            D = tuple(max(d, int(c)) for d, c in zip(cut.D, completions))
            jobs = critical_jobs(self.instance, x, cut.b, D, order)
            critical[(cut.b, D)] = tuple(sorted(jobs))
            grown = union | jobs
            self.logger.debug('closure: %s lifted to D=%s adds %s',
                              cut, list(D), sorted(jobs - union))
            if grown == union:
                self.logger.warning('closure: %s stays violated', cut)
                return x_next, union
            union = grown
            x_next = reinflate(x, completions, union)

    def _snap(self, x, index):
        fractional = x.x[(x.x > 0) & (x.x < 1)]
        if not fractional.size or fractional.max() >= self.snap_threshold:
            return None
        completions = x.completions()
        if not is_valid(self.instance, self.unit, completions):
            self.logger.warning('phase %d: snapped solution is not valid',
                                index)
            return None
        lp_int, lp_frac = split_cost(self.instance, x)
        record = PhaseRecord(index, [], completions, lp_int, lp_frac)
        record.snapped = True
        self.trace.append(record)
        self.logger.info('phase %d: snapped fractional mass to 0', index)
        return completions

    def phase(self, x, index, previous=None):
        """Run one phase.

        Returns
        -------
        (`numpy.ndarray`, `None` or `jobcover.lp.FracSolution`)
            ``C_alpha`` and the next phase input (`None` if ``C_alpha`` is
            valid).

        Raises
        ------
        jobcover.error.RoundingError
            If a phase invariant fails.
        """
        inst = self.instance
        alpha, completions = sample(x, self.c, self.rng)
        lp_int, lp_frac = split_cost(inst, x)
        record = PhaseRecord(index, alpha, completions, lp_int, lp_frac)
        self.trace.append(record)

        if previous is not None and np.any(completions < previous):
            raise RoundingError('phase %d: completion time moved earlier'
                                % index)
        cuts = unsatisfied_cuts(inst, completions)
        valid = is_valid(inst, self.unit, completions)
        if valid == bool(cuts):
            raise RoundingError('phase %d: cut test and flow test disagree'
                                ' on C=%s' % (index, list(completions)))
        record.cuts_violated = cuts
        if valid:
            self.logger.info('phase %d: C=%s valid', index,
                             list(completions))
            return completions, None

        order = self._order(x, completions)
        union = frozenset()
        for b, D in cuts:
            jobs = critical_jobs(inst, x, b, D, order)
            record.critical[(b, D)] = tuple(sorted(jobs))
            union |= jobs
        x_next, union = self._close(x, completions, record.critical,
                                    union, order)
        if self.config.check:
            cut = separate(inst, x_next, self.config.tol)
            if cut is not None:
                raise RoundingError('phase %d: reinflated solution violates'
                                    ' %s' % (index, cut))
        record.critical_union = tuple(sorted(union))
        record.next_lp_int, record.next_lp_frac = split_cost(inst, x_next)
        record.next_digest = digest(x_next.x)
        self.logger.info('phase %d: %d unsatisfied cuts, %d critical jobs',
                         index, len(cuts), len(union))
        return completions, x_next

    def fallback(self, x):
        """Deterministic completion: start from the support of `x` and
        delay the cheapest job until the vector is valid."""
        inst = self.instance
        completions = np.maximum(x.support(), inst.p)
        self.logger.warning('fallback from C=%s', list(completions))
        costs = inst.cost_table
        while not is_valid(inst, self.unit, completions):
            best = None
            for j in range(inst.n):
                c = completions[j]
                if c >= inst.horizon:
                    continue
                added = costs[j, c + 1] - costs[j, c]
                if best is None or added < best[0]:
                    best = (added, j)
            if best is None:
                raise RoundingError('fallback exhausted the horizon')
            completions[best[1]] += 1
        return completions

    def run(self, x, timeline=None):
        """Round `x` to a valid completion vector and schedule it.

        Parameters
        ----------
        x : `jobcover.lp.FracSolution`
            Feasible fractional solution.
        timeline : `None` or `jobcover.instance.Timeline`, optional
            Schedule timeline (default unit grid).

        Returns
        -------
        `jobcover.rounding.RoundingResult`
        """
        inst = self.instance
        timeline = timeline or self.unit
        completions = None
        previous = None
        fallback = False
        for index in range(self.config.max_phases):
            completions = self._snap(x, index)
            if completions is not None:
                break
            completions, x_next = self.phase(x, index, previous)
            if x_next is None:
                break
            previous = completions
            x = x_next
            completions = None
        if completions is None:
            fallback = True
            completions = self.fallback(x)

        net = build_flow_graph(inst, timeline, completions)
        flow = max_flow(net)
        sched = extract_schedule(inst, timeline, completions, flow)
        ok, report = validate_schedule(inst, timeline, completions, sched)
        if not ok:
            raise ScheduleError(report)
        cost = inst.cost_of(net.completions)
        result = RoundingResult(net.completions, cost, sched, self.trace,
                                fallback)
        self.logger.info('run: %s', result)
        return result


def run(instance, config=None, x=None, timeline=None):
    """Solve the LP if needed and round it.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    config : `None` or `jobcover.rounding.RoundingConfig`, optional
    x : `None` or `jobcover.lp.FracSolution`, optional
        Starting fractional solution (default: LP optimum).
    timeline : `None` or `jobcover.instance.Timeline`, optional

    Returns
    -------
    `jobcover.rounding.RoundingResult`
    """
    config = config or RoundingConfig()
    if x is None:
        x, _, _ = solve_lp(instance, config.tol)
    return Rounding(instance, config).run(x, timeline)
