import heapq
import logging
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .error import OracleGuardError
from .instance import FORMAT, build_timeline
from .flow import is_valid
from .lp import TOL, constraint_lhs, make_cut


logger = logging.getLogger(__name__)

BRUTE_MAX_JOBS = 6
BRUTE_MAX_HORIZON = 12
SLOT_MAX_JOBS = 3
SLOT_MAX_MACHINES = 2
SLOT_MAX_HORIZON = 9
NAIVE_MAX_JOBS = 3
NAIVE_MAX_HORIZON = 6

_EPS = 1e-12


class OracleResult:
    """Exact optimum of a small instance.

    Attributes
    ----------
    opt_cost : `float`
    opt_completions : `tuple` of `int`
    nodes : `int`
        Completion vectors checked for validity.
    """

    def __init__(self, opt_cost, opt_completions, nodes):
        self.opt_cost = float(opt_cost)
        self.opt_completions = tuple(int(c) for c in opt_completions)
        self.nodes = nodes

    def __str__(self):
        return '<optimum %g C=%s>' % (self.opt_cost,
                                      list(self.opt_completions))

    __repr__ = __str__

    def __eq__(self, res):
        return (
            isinstance(res, OracleResult)
            and self.opt_cost == res.opt_cost
            and self.opt_completions == res.opt_completions
        )

    def to_dict(self):
        return {
            'format': FORMAT,
            'opt_cost': self.opt_cost,
            'opt_completions': list(self.opt_completions),
            'nodes': self.nodes
        }


def _guard(name, instance, n=None, m=None, horizon=None):
    if n is not None and instance.n > n:
        raise OracleGuardError('%s: n=%d > %d' % (name, instance.n, n))
    if m is not None and instance.m > m:
        raise OracleGuardError('%s: m=%d > %d' % (name, instance.m, m))
    if horizon is not None and instance.horizon > horizon:
        raise OracleGuardError('%s: H=%d > %d'
                               % (name, instance.horizon, horizon))


def brute_force_opt(instance):
    """Minimum-cost valid completion vector by exhaustive enumeration.

    Vectors are tried in increasing cost order, ties in lexicographic order,
    and the first valid one is returned.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`

    Returns
    -------
    `jobcover.oracle.OracleResult`

    Raises
    ------
    jobcover.error.OracleGuardError
        If ``n > 6`` or ``H > 12``.
    """
    _guard('brute_force_opt', instance,
           n=BRUTE_MAX_JOBS, horizon=BRUTE_MAX_HORIZON)
    if instance.n == 0:
        return OracleResult(0.0, (), 0)
    p = instance.p
    H = instance.horizon
    costs = np.zeros(())
    for j in range(instance.n):
        costs = np.add.outer(costs, instance.cost_table[j, p[j]:H + 1])
    shape = costs.shape
    order = np.argsort(costs, axis=None, kind='stable')
    timeline = build_timeline(instance, 'unit')
    for nodes, flat in enumerate(order, 1):
        completions = p + np.array(np.unravel_index(flat, shape))
        if is_valid(instance, timeline, completions):
            res = OracleResult(costs.flat[flat], completions, nodes)
            logger.info('brute_force_opt: %s after %d vectors', res, nodes)
            return res
    raise OracleGuardError('brute_force_opt: no valid vector within H=%d' % H)


def slot_schedulability(instance, completions):
    """Decide validity by searching slot-by-slot machine assignments.

    Each slot runs at most ``m`` distinct unfinished jobs for one unit each.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    completions : `list` of `int`

    Returns
    -------
    `bool`

    Raises
    ------
    jobcover.error.OracleGuardError
        If ``n > 3``, ``m > 2`` or ``H > 9``.
    """
    _guard('slot_schedulability', instance, n=SLOT_MAX_JOBS,
           m=SLOT_MAX_MACHINES, horizon=SLOT_MAX_HORIZON)
    completions = tuple(int(c) for c in completions)
    if len(completions) != instance.n:
        return False
    for job, c in zip(instance.jobs, completions):
        if c < job.p or c > instance.horizon:
            return False
    m = instance.m

    @lru_cache(maxsize=None)
    def search(t, left):
        if not any(left):
            return True
        active = []
        for j, (units, c) in enumerate(zip(left, completions)):
            if not units:
                continue
            if units > c - t + 1:
                return False
            active.append(j)
        for k in range(min(m, len(active)), 0, -1):
            for chosen in combinations(active, k):
                nxt = list(left)
                for j in chosen:
                    nxt[j] -= 1
                if search(t + 1, tuple(nxt)):
                    return True
        return False

    return search(1, tuple(job.p for job in instance.jobs))


def naive_separation(instance, x, tol=TOL):
    """Most violated job-cover row by enumerating every ``(b, D)``.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    x : `jobcover.lp.FracSolution`
    tol : `float`, optional

    Returns
    -------
    `None` or `jobcover.lp.CutConstraint`
        Ties go to smaller ``b``, then lexicographically smaller ``D``.

    Raises
    ------
    jobcover.error.OracleGuardError
        If ``n > 3`` or ``H > 6``.
    """
    _guard('naive_separation', instance,
           n=NAIVE_MAX_JOBS, horizon=NAIVE_MAX_HORIZON)
    best = None
    best_violation = tol
    H = instance.horizon
    for b in range(1, H + 1):
        for D in product(range(H + 1), repeat=instance.n):
            cut = make_cut(instance, b, D)
            if cut is None:
                continue
            violation = cut.V - constraint_lhs(x, cut)
            if violation > best_violation + _EPS:
                best = cut
                best_violation = violation
    return best


def mcnaughton_feasible(instance, deadline):
    """Common-deadline feasibility by the wrap-around rule.

    Examples
    --------
    >>> from jobcover.instance import Instance, Job, CostFn
    >>> fn = CostFn('weighted-completion')
    >>> inst = Instance(2, [Job(j, 3, fn) for j in range(3)])
    >>> mcnaughton_feasible(inst, 5), mcnaughton_feasible(inst, 4)
    (True, False)
    """
    return (instance.total_p <= instance.m * deadline
            and instance.P <= deadline)


def list_schedule(instance, order):
    """Non-preemptive list scheduling onto the earliest free machine.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    order : `list` of `int`
        Job priority order.

    Returns
    -------
    `list` of `int`
        Completion times.
    """
    free = [(0, machine) for machine in range(instance.m)]
    ret = [0] * instance.n
    for j in order:
        start, machine = heapq.heappop(free)
        ret[j] = start + instance.jobs[j].p
        heapq.heappush(free, (ret[j], machine))
    return ret


def _wspt_key(job):
    weight = job.cost.weight
    ratio = job.p / weight if weight > 0 else float('inf')
    return ratio, job.id


def _edf_key(job):
    deadline = job.cost.deadline
    return (float('inf') if deadline is None else deadline), job.id


def baseline_heuristics(instance):
    """Price the list-scheduling baselines.

    ``wspt`` orders jobs by ``p / w``; ``edf`` by deadline and runs only if
    some job has one.

    Returns
    -------
    `dict` of (`str`, `float`)
    """
    ret = {}
    jobs = instance.jobs
    orders = {'wspt': sorted(range(instance.n),
                             key=lambda j: _wspt_key(jobs[j]))}
    if any(job.cost.deadline is not None for job in jobs):
        orders['edf'] = sorted(range(instance.n),
                               key=lambda j: _edf_key(jobs[j]))
    for name, order in orders.items():
        completions = list_schedule(instance, order)
        ret[name] = instance.cost_of(completions)
        logger.debug('baseline %s: C=%s cost=%g', name, completions,
                     ret[name])
    return ret
