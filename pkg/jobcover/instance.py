import json
import math
import logging
from functools import cached_property

import numpy as np

from .error import InstanceError


logger = logging.getLogger(__name__)

FORMAT = 1


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


class CostFn:
    """Non-negative non-decreasing job cost function with g(0) = 0.

    Attributes
    ----------
    kind : `str`
        One of `CostFn.KINDS`.
    w : `float`
        Weight.
    k : `float`
        Exponent (``weighted-knorm``).
    d : `int`
        Deadline (``throughput``, ``tardiness``).
    table : `tuple` of (`int`, `float`)
        Step table (``step-table``).
    """

    KINDS = (
        'weighted-completion',
        'weighted-knorm',
        'throughput',
        'tardiness',
        'exponential',
        'step-table'
    )

    DEADLINE_KINDS = ('throughput', 'tardiness')

    def __init__(self, kind, w=1.0, k=1.0, d=0, table=None):
        if kind not in self.KINDS:
            raise InstanceError('unknown cost kind "%s"' % kind)
        if w < 0:
            raise InstanceError('negative weight %r' % w)
        if kind == 'weighted-knorm' and k < 1:
            raise InstanceError('knorm exponent %r < 1' % k)
        if kind in self.DEADLINE_KINDS and d < 0:
            raise InstanceError('negative deadline %r' % d)
        self.kind = kind
        self.w = float(w)
        self.k = float(k)
        self.d = int(d)
        self.table = self._check_table(table) if kind == 'step-table' else ()

    @staticmethod
    def _check_table(table):
        if not table:
            raise InstanceError('step-table cost without table')
        ret = []
        prev_time = 0
        prev_cost = 0.0
        for row in table:
            try:
                time, cost = row
                time = int(time)
                cost = float(cost)
            except (TypeError, ValueError):
                raise InstanceError('bad step-table row %r' % (row,))
            if time <= prev_time:
                raise InstanceError('step-table times must increase from 1')
            if cost < prev_cost:
                raise InstanceError('step-table costs must not decrease')
            ret.append((time, cost))
            prev_time, prev_cost = time, cost
        return tuple(ret)

    def __str__(self):
        if self.kind == 'step-table':
            return '<cost %s %s>' % (self.kind, list(self.table))
        return '<cost %s w=%g k=%g d=%d>' % (self.kind, self.w, self.k, self.d)

    __repr__ = __str__

    def __eq__(self, fn):
        return isinstance(fn, CostFn) and self.to_dict() == fn.to_dict()

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Cost of completing at time `t`.

        Parameters
        ----------
        t : `int`
            Time, ``t >= 0``.

        Returns
        -------
        `float`
        """
        kind = self.kind
        if kind == 'weighted-completion':
            return self.w * t
        if kind == 'weighted-knorm':
            return self.w * float(t) ** self.k
        if kind == 'throughput':
            return self.w if t > self.d else 0.0
        if kind == 'tardiness':
            return self.w * max(0, t - self.d)
        if kind == 'exponential':
            try:
                return self.w * math.expm1(t)
            except OverflowError:
                return math.inf
        ret = 0.0
        for time, cost in self.table:
            if time > t:
                break
            ret = cost
        return ret

    @property
    def weight(self):
        """Weight used by list-scheduling baselines."""
        if self.kind == 'step-table':
            return self.table[-1][1]
        return self.w

    @property
    def deadline(self):
        """Deadline or `None`."""
        if self.kind in self.DEADLINE_KINDS:
            return self.d
        if self.kind == 'step-table':
            return self.table[0][0] - 1
        return None

    def to_dict(self):
        ret = {'kind': self.kind}
        if self.kind == 'step-table':
            ret['table'] = [list(row) for row in self.table]
            return ret
        ret['w'] = self.w
        if self.kind == 'weighted-knorm':
            ret['k'] = self.k
        if self.kind in self.DEADLINE_KINDS:
            ret['d'] = self.d
        return ret

    @classmethod
    def from_dict(cls, data):
        """Parse a cost function.

        Raises
        ------
        jobcover.error.InstanceError
        """
        if not isinstance(data, dict) or 'kind' not in data:
            raise InstanceError('cost must be an object with "kind"')
        try:
            return cls(data['kind'],
                       w=float(data.get('w', 1.0)),
                       k=float(data.get('k', 1.0)),
                       d=int(data.get('d', 0)),
                       table=data.get('table'))
        except (TypeError, ValueError) as ex:
            raise InstanceError('bad cost %r: %s' % (data, ex))


class Job:
    """Job.

    Attributes
    ----------
    id : `int`
    p : `int`
        Processing time.
    cost : `jobcover.instance.CostFn`
    """

    def __init__(self, id_, p, cost):
        if int(p) != p or p < 1:
            raise InstanceError('job %d: processing time %r < 1' % (id_, p))
        self.id = id_
        self.p = int(p)
        self.cost = cost

    def __str__(self):
        return '<job #%d p=%d %s>' % (self.id, self.p, self.cost)

    __repr__ = __str__

    def __eq__(self, job):
        return (
            isinstance(job, Job)
            and self.id == job.id
            and self.p == job.p
            and self.cost == job.cost
        )


class Instance:
    """Scheduling instance on identical machines.

    Attributes
    ----------
    m : `int`
        Machine count.
    jobs : `tuple` of `jobcover.instance.Job`
    horizon : `int`
        Time horizon H; time steps are ``1..H``.
    """

    logger = logging.getLogger(__name__)

    def __init__(self, m, jobs, horizon=None):
        if int(m) != m or m < 1:
            raise InstanceError('machine count %r < 1' % m)
        self.m = int(m)
        self.jobs = tuple(jobs)
        total = sum(job.p for job in self.jobs)
        if horizon is None:
            horizon = max(total, 1)
        lower = max([-(-total // self.m)] + [job.p for job in self.jobs])
        if horizon < lower:
            raise InstanceError('horizon %d < %d' % (horizon, lower))
        self.horizon = int(horizon)

    def __str__(self):
        return '<instance m=%d n=%d H=%d>' % (self.m, self.n, self.horizon)

    __repr__ = __str__

    def __eq__(self, inst):
        return (
            isinstance(inst, Instance)
            and self.m == inst.m
            and self.horizon == inst.horizon
            and self.jobs == inst.jobs
        )

    @property
    def n(self):
        return len(self.jobs)

    @property
    def H(self):
        return self.horizon

    @property
    def P(self):
        return max((job.p for job in self.jobs), default=0)

    @cached_property
    def p(self):
        """Processing times as an `int` array."""
        return np.array([job.p for job in self.jobs], dtype=int)

    @property
    def total_p(self):
        return int(self.p.sum())

    @cached_property
    def cost_table(self):
        """Dense ``g_j(t)`` table of shape ``(n, H + 1)``."""
        ret = np.zeros((self.n, self.horizon + 1))
        for j, job in enumerate(self.jobs):
            ret[j] = [job.cost.eval(t) for t in range(self.horizon + 1)]
        return ret

    @cached_property
    def marginal_table(self):
        """Dense ``g_j(t) - g_j(t - 1)`` table, column 0 is zero."""
        ret = np.zeros_like(self.cost_table)
        ret[:, 1:] = np.diff(self.cost_table, axis=1)
        return ret

    def cost_of(self, completions):
        """Objective value of a completion vector.

        Parameters
        ----------
        completions : `list` of `int`

        Returns
        -------
        `float`
        """
        return float(sum(
            job.cost.eval(c) for job, c in zip(self.jobs, completions)
        ))

    def to_dict(self):
        return {
            'format': FORMAT,
            'machines': self.m,
            'horizon': self.horizon,
            'jobs': [
                {'p': job.p, 'cost': job.cost.to_dict()}
                for job in self.jobs
            ]
        }

    @classmethod
    def from_dict(cls, data):
        """Parse an instance.

        Parameters
        ----------
        data : `dict`

        Returns
        -------
        `jobcover.instance.Instance`

        Raises
        ------
        jobcover.error.InstanceError
        """
        if not isinstance(data, dict):
            raise InstanceError('instance must be an object')
        if data.get('format', FORMAT) != FORMAT:
            raise InstanceError('unsupported format %r' % data['format'])
        try:
            machines = data['machines']
            jobs = data['jobs']
        except KeyError as ex:
            raise InstanceError('missing field %s' % ex)
        if not _is_int(machines):
            raise InstanceError('"machines" must be an integer')
        if not isinstance(jobs, list):
            raise InstanceError('"jobs" must be a list')
        horizon = data.get('horizon')
        if horizon is not None and not _is_int(horizon):
            raise InstanceError('"horizon" must be an integer')
        parsed = []
        for i, job in enumerate(jobs):
            if not isinstance(job, dict) or 'p' not in job:
                raise InstanceError('job %d: missing "p"' % i)
            if not _is_int(job['p']):
                raise InstanceError('job %d: "p" must be an integer' % i)
            parsed.append(Job(i, job['p'], CostFn.from_dict(job.get('cost'))))
        return cls(machines, parsed, horizon)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except ValueError as ex:
            raise InstanceError('invalid JSON: %s' % ex)
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        """Read an instance file.

        Raises
        ------
        jobcover.error.InstanceError
        """
        cls.logger.info('load %s', path)
        try:
            with open(path) as fp:
                text = fp.read()
        except OSError as ex:
            raise InstanceError('%s: %s' % (path, ex))
        return cls.from_json(text)


class Timeline:
    """Breakpoint time grid ``t_1 < ... < t_K = H``.

    Interval ``i`` covers time steps ``t_{i-1} + 1 .. t_i`` (``t_0 = 0``).

    Attributes
    ----------
    breakpoints : `tuple` of `int`
    lengths : `tuple` of `int`
    """

    def __init__(self, breakpoints):
        self.breakpoints = tuple(int(t) for t in breakpoints)
        prev = 0
        lengths = []
        for t in self.breakpoints:
            if t <= prev:
                raise ValueError('breakpoints must increase from 1')
            lengths.append(t - prev)
            prev = t
        self.lengths = tuple(lengths)

    def __str__(self):
        return '<timeline K=%d H=%d>' % (self.K, self.horizon)

    __repr__ = __str__

    def __eq__(self, timeline):
        return (isinstance(timeline, Timeline)
                and self.breakpoints == timeline.breakpoints)

    def __len__(self):
        return len(self.breakpoints)

    @property
    def K(self):
        return len(self.breakpoints)

    @property
    def horizon(self):
        return self.breakpoints[-1]

    @property
    def is_unit(self):
        return all(length == 1 for length in self.lengths)

    def start(self, i):
        """Time before the first step of interval `i`."""
        return self.breakpoints[i] - self.lengths[i]

    def interval_of(self, t):
        """Index of the interval containing time step `t`.

        Raises
        ------
        ValueError
            If `t` lies past the horizon.
        """
        i = int(np.searchsorted(self.breakpoints, t, side='left'))
        if i >= self.K:
            raise ValueError('time %r past horizon %d' % (t, self.horizon))
        return i

    def round_up(self, t):
        """Earliest breakpoint not before `t` (0 stays 0)."""
        if t <= 0:
            return 0
        return self.breakpoints[self.interval_of(t)]


def eval_cost(fn, t):
    """Evaluate a cost function.

    Examples
    --------
    >>> eval_cost(CostFn('weighted-completion', w=2), 5)
    10.0
    >>> eval_cost(CostFn('tardiness', w=2, d=3), 5)
    4.0
    """
    return fn.eval(t)


def marginal_cost(job, t):
    """``g_j(t) - g_j(t - 1)`` for ``t >= 1``.

    Examples
    --------
    >>> marginal_cost(Job(0, 1, CostFn('throughput', w=5, d=3)), 4)
    5.0
    """
    return job.cost.eval(t) - job.cost.eval(t - 1)


def _doubling_times(values):
    ret = []
    positive = values[(values > 0) & np.isfinite(values)]
    if not len(positive):
        return ret
    low = math.floor(math.log2(positive.min()))
    high = math.floor(math.log2(positive.max()))
    for k in range(low, high + 1):
        reached = np.nonzero(values >= 2.0 ** k)[0]
        if len(reached):
            ret.append(int(reached[0]))
    return ret


def build_timeline(instance, mode='unit'):
    """Build the time grid for flow construction.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    mode : `str`, optional
        ``unit`` - every time step; ``compressed`` - times where some job's
        cost first reaches a power of two, plus H.

    Returns
    -------
    `jobcover.instance.Timeline`
    """
    horizon = instance.horizon
    if mode == 'unit':
        return Timeline(range(1, horizon + 1))
    if mode != 'compressed':
        raise ValueError('unknown timeline mode "%s"' % mode)
    times = {horizon}
    for values in instance.cost_table:
        times.update(t for t in _doubling_times(values) if t >= 1)
    timeline = Timeline(sorted(times))
    logger.debug('compressed timeline %s: %s', timeline, timeline.breakpoints)
    return timeline
