import logging

import numpy as np
import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .error import CompletionError, ScheduleError
from .instance import Timeline


logger = logging.getLogger(__name__)

FORMAT = 1


class FlowNet:
    """Bipartite job/interval flow network.

    Arcs: ``source -> a_j`` (cap ``p_j``), ``a_j -> b_i`` (cap ``l_i``, iff
    ``t_i <= C_j``), ``b_i -> sink`` (cap ``m * l_i``).

    Attributes
    ----------
    graph : `networkx.DiGraph`
    completions : `tuple` of `int`
        Completion times rounded up to timeline breakpoints.
    timeline : `jobcover.instance.Timeline`
    """

    SOURCE = 'source'
    SINK = 'sink'

    def __init__(self, graph, completions, timeline):
        self.graph = graph
        self.completions = tuple(completions)
        self.timeline = timeline

    def __str__(self):
        return '<flow net %d nodes %d arcs>' % (
            self.graph.number_of_nodes(), self.graph.number_of_edges()
        )

    __repr__ = __str__

    @staticmethod
    def job(j):
        return ('job', j)

    @staticmethod
    def interval(i):
        return ('interval', i)

    def capacity(self, u, v):
        """Arc capacity, 0 if the arc does not exist."""
        data = self.graph.get_edge_data(u, v)
        return 0 if data is None else data['capacity']


def _check_completions(instance, timeline, completions):
    if timeline.horizon != instance.horizon:
        raise CompletionError('timeline horizon %d != instance horizon %d'
                              % (timeline.horizon, instance.horizon))
    if len(completions) != instance.n:
        raise CompletionError('%d completion times for %d jobs'
                              % (len(completions), instance.n))
    for job, c in zip(instance.jobs, completions):
        if c < job.p:
            raise CompletionError('job %d: C=%d < p=%d' % (job.id, c, job.p))
        if c > instance.horizon:
            raise CompletionError('job %d: C=%d > H=%d'
                                  % (job.id, c, instance.horizon))


def build_flow_graph(instance, timeline, completions):
    """Build the feasibility flow network of a completion vector.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    timeline : `jobcover.instance.Timeline`
    completions : `list` of `int`
        Completion times; rounded up to the next breakpoint.

    Returns
    -------
    `jobcover.flow.FlowNet`

    Raises
    ------
    jobcover.error.CompletionError
        If some ``C_j < p_j`` or ``C_j > H``.
    """
    _check_completions(instance, timeline, completions)
    rounded = [timeline.round_up(int(c)) for c in completions]
    graph = nx.DiGraph()
    graph.add_node(FlowNet.SOURCE)
    graph.add_node(FlowNet.SINK)
    for i, (t, length) in enumerate(zip(timeline.breakpoints,
                                        timeline.lengths)):
        graph.add_edge(FlowNet.interval(i), FlowNet.SINK,
                       capacity=instance.m * length)
    for j, job in enumerate(instance.jobs):
        graph.add_edge(FlowNet.SOURCE, FlowNet.job(j), capacity=job.p)
        for i, (t, length) in enumerate(zip(timeline.breakpoints,
                                            timeline.lengths)):
            if t > rounded[j]:
                break
            graph.add_edge(FlowNet.job(j), FlowNet.interval(i),
                           capacity=length)
    return FlowNet(graph, rounded, timeline)


def max_flow(net):
    """Integral maximum flow.

    Parameters
    ----------
    net : `jobcover.flow.FlowNet`

    Returns
    -------
    (`int`, `dict` of (`object`, `dict` of (`object`, `int`)))
        Flow value and per-arc flow.
    """
    value, flow = nx.maximum_flow(net.graph, FlowNet.SOURCE, FlowNet.SINK,
                                  flow_func=edmonds_karp)
    return int(value), flow


def is_valid(instance, timeline, completions):
    """Check whether every job can finish by its completion time.

    Returns
    -------
    `bool`
        `True` iff the max flow saturates every source arc.
    """
    try:
        net = build_flow_graph(instance, timeline, completions)
    except CompletionError as ex:
        logger.debug('is_valid %s: %s', list(completions), ex)
        return False
    value, _ = max_flow(net)
    return value == instance.total_p


class Schedule:
    """Preemptive migratory schedule on a breakpoint timeline.

    Within interval ``i`` each machine runs its ``(job, units)`` segments
    back to back from the interval start.

    Attributes
    ----------
    timeline : `jobcover.instance.Timeline`
    completions : `tuple` of `int`
    plan : `list` of `list` of `list` of (`int`, `int`)
        ``plan[i][machine]`` - segments of interval ``i``.
    """

    def __init__(self, timeline, completions, plan):
        self.timeline = timeline
        self.completions = tuple(int(c) for c in completions)
        self.plan = plan

    def __str__(self):
        return '<schedule K=%d C=%s>' % (self.timeline.K,
                                         list(self.completions))

    __repr__ = __str__

    def __eq__(self, sched):
        return (
            isinstance(sched, Schedule)
            and self.timeline == sched.timeline
            and self.completions == sched.completions
            and self.plan == sched.plan
        )

    @property
    def machines(self):
        return max((len(machines) for machines in self.plan), default=0)

    def allocation(self, n):
        """Units ``y[j][i]`` of job ``j`` in interval ``i``.

        Parameters
        ----------
        n : `int`
            Job count.

        Returns
        -------
        `numpy.ndarray`
        """
        ret = np.zeros((n, self.timeline.K), dtype=int)
        for i, machines in enumerate(self.plan):
            for segments in machines:
                for job, units in segments:
                    ret[job, i] += units
        return ret

    def segments(self):
        """Yield ``(job, machine, start, end)`` with ``start < time <= end``."""
        for i, machines in enumerate(self.plan):
            offset = self.timeline.start(i)
            for machine, segments in enumerate(machines):
                at = offset
                for job, units in segments:
                    yield job, machine, at, at + units
                    at += units

    def finish_times(self, n):
        """Last processed time step per job (0 if never processed)."""
        ret = [0] * n
        for job, _, _, end in self.segments():
            if 0 <= job < n:
                ret[job] = max(ret[job], end)
        return ret

    def to_dict(self):
        return {
            'format': FORMAT,
            'completions': list(self.completions),
            'intervals': [
                {
                    't_end': t,
                    'machines': [
                        [[job, units] for job, units in segments]
                        for segments in machines
                    ]
                }
                for t, machines in zip(self.timeline.breakpoints, self.plan)
            ]
        }

    @classmethod
    def from_dict(cls, data):
        """Parse a schedule.

        Raises
        ------
        jobcover.error.ScheduleError
        """
        try:
            if data.get('format', FORMAT) != FORMAT:
                raise ScheduleError('unsupported format %r' % data['format'])
            intervals = data['intervals']
            timeline = Timeline([item['t_end'] for item in intervals])
            plan = [
                [[(int(job), int(units)) for job, units in segments]
                 for segments in item['machines']]
                for item in intervals
            ]
            return cls(timeline, data.get('completions', ()), plan)
        except (AttributeError, KeyError, TypeError, ValueError) as ex:
            raise ScheduleError('bad schedule: %r' % ex)


def _blocks(timeline, completions):
    """Interval index ranges ending at each distinct completion time."""
    ends = set(completions)
    ret = []
    first = 0
    for i, t in enumerate(timeline.breakpoints):
        if t in ends or i == timeline.K - 1:
            ret.append(range(first, i + 1))
            first = i + 1
    return ret


def _wrap(units, m, length):
    """McNaughton wrap-around of ``(job, units)`` onto `m` machines.

    Returns
    -------
    `list` of `list` of (`int`, `int`, `int`)
        ``(job, start, end)`` runs per machine, relative to the block start.
    """
    machines = [[] for _ in range(m)]
    machine = 0
    at = 0
    for j, amount in units:
        while amount > 0:
            put = min(amount, length - at)
            machines[machine].append((j, at, at + put))
            amount -= put
            at += put
            if at == length:
                machine += 1
                at = 0
    return machines


def extract_schedule(instance, timeline, completions, flow):
    """Turn a full-value max flow into a machine-level schedule.

    Intervals are grouped into blocks ending at distinct completion times;
    every job eligible in a block is eligible in all of its intervals. The
    work a block receives is wrapped around the machines in ascending job
    id order and sliced back into intervals.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    timeline : `jobcover.instance.Timeline`
    completions : `list` of `int`
    flow : (`int`, `dict`)
        `jobcover.flow.max_flow` result.

    Returns
    -------
    `jobcover.flow.Schedule`

    Raises
    ------
    jobcover.error.ScheduleError
        If the flow does not route all work.
    """
    value, arcs = flow
    if value < instance.total_p:
        raise ScheduleError('flow value %d < total work %d'
                            % (value, instance.total_p))
    rounded = [timeline.round_up(c) for c in completions]
    plan = []
    for block in _blocks(timeline, rounded):
        origin = timeline.start(block[0])
        length = timeline.breakpoints[block[-1]] - origin
        units = []
        for j in range(instance.n):
            out = arcs.get(FlowNet.job(j), {})
            amount = sum(int(out.get(FlowNet.interval(i), 0)) for i in block)
            if amount:
                units.append((j, amount))
        machines = _wrap(units, instance.m, length)
        for i in block:
            lo = timeline.start(i) - origin
            hi = lo + timeline.lengths[i]
            plan.append([
                [(j, min(end, hi) - max(start, lo))
                 for j, start, end in runs if start < hi and lo < end]
                for runs in machines
            ])
    sched = Schedule(timeline, rounded, plan)
    logger.debug('extract_schedule %s', sched)
    return sched


def validate_schedule(instance, timeline, completions, sched):
    """Independent schedule checker.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    timeline : `jobcover.instance.Timeline`
    completions : `list` of `int`
        Completion times; compared after rounding up to breakpoints.
    sched : `jobcover.flow.Schedule`

    Returns
    -------
    (`bool`, `None` or `str`)
        Verdict and the first violation found.
    """
    def fail(msg, *args):
        report = msg % args
        logger.debug('validate_schedule: %s', report)
        return False, report

    if sched.timeline != timeline:
        return fail('timeline mismatch')
    if len(sched.plan) != timeline.K:
        return fail('interval count %d != %d', len(sched.plan), timeline.K)
    if len(completions) != instance.n:
        return fail('%d completion times for %d jobs',
                    len(completions), instance.n)
    rounded = [timeline.round_up(c) for c in completions]

    for i, machines in enumerate(sched.plan):
        length = timeline.lengths[i]
        total = 0
        if len(machines) > instance.m:
            return fail('capacity violation: interval %d uses %d machines',
                        i, len(machines))
        for machine, segments in enumerate(machines):
            busy = 0
            for job, units in segments:
                if not 0 <= job < instance.n:
                    return fail('unknown job %r in interval %d', job, i)
                if units <= 0:
                    return fail('empty segment of job %d in interval %d',
                                job, i)
                busy += units
            if busy > length:
                return fail('capacity violation: interval %d machine %d'
                            ' busy %d > %d', i, machine, busy, length)
            total += busy
        if total > instance.m * length:
            return fail('capacity violation: interval %d work %d > %d',
                        i, total, instance.m * length)

    alloc = sched.allocation(instance.n)
    for j in range(instance.n):
        for i, length in enumerate(timeline.lengths):
            if alloc[j, i] > length:
                return fail('interval violation: job %d gets %d > %d units'
                            ' in interval %d', j, alloc[j, i], length, i)

    spans = {}
    for job, machine, start, end in sched.segments():
        for other, lo, hi in spans.get(job, ()):
            if lo < end and start < hi:
                return fail('overlap violation: job %d runs on machines'
                            ' %d and %d during (%d, %d]', job, other,
                            machine, max(lo, start), min(hi, end))
        spans.setdefault(job, []).append((machine, start, end))

    for j in range(instance.n):
        for i, t in enumerate(timeline.breakpoints):
            if alloc[j, i] and t > rounded[j]:
                return fail('deadline violation: job %d runs in interval %d'
                            ' ending %d > C=%d', j, i, t, rounded[j])

    for j, job in enumerate(instance.jobs):
        if alloc[j].sum() != job.p:
            return fail('work violation: job %d gets %d != p=%d units',
                        j, alloc[j].sum(), job.p)
    return True, None
