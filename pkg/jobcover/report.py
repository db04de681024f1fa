import json
import time
import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor

from .error import OracleGuardError, RoundingError, SuiteError
from .instance import FORMAT, build_timeline
from .lp import solve_lp
from .rounding import Rounding, RoundingConfig
from .oracle import brute_force_opt
from .generate import gen_random, gen_three_partition
from .util import digest, run_in_executor


logger = logging.getLogger(__name__)


def _ratio(num, den, tol):
    if den > tol:
        return num / den
    if abs(num) <= tol:
        return 1.0
    return None


class RunReport:
    """End-to-end solve summary.

    Attributes
    ----------
    instance_digest : `str`
    lp_value : `float`
    alg_cost : `float`
    brute_cost : `None` or `float`
    phases : `int`
    cuts : `int`
    seed : `int`
    wall_time : `float`
    fallback : `bool`
    completions : `tuple` of `int`
    """

    def __init__(self, instance_digest, lp_value, alg_cost, phases, cuts,
                 seed, wall_time=0.0, brute_cost=None, fallback=False,
                 completions=()):
        self.instance_digest = instance_digest
        self.lp_value = float(lp_value)
        self.alg_cost = float(alg_cost)
        self.brute_cost = None if brute_cost is None else float(brute_cost)
        self.phases = phases
        self.cuts = cuts
        self.seed = seed
        self.wall_time = wall_time
        self.fallback = fallback
        self.completions = tuple(completions)

    def __str__(self):
        return '<report %s lp=%g alg=%g brute=%s>' % (
            self.instance_digest, self.lp_value, self.alg_cost,
            self.brute_cost
        )

    __repr__ = __str__

    def ratio_lp(self, tol=1e-6):
        """``alg / lp``, `None` if undefined."""
        return _ratio(self.alg_cost, self.lp_value, tol)

    def ratio_brute(self, tol=1e-6):
        """``alg / brute``, `None` without a brute-force optimum."""
        if self.brute_cost is None:
            return None
        return _ratio(self.alg_cost, self.brute_cost, tol)

    def check(self, tol=1e-6):
        """Cost ordering violations.

        Returns
        -------
        `list` of `str`
        """
        ret = []
        if self.alg_cost < self.lp_value - tol:
            ret.append('alg %g < lp %g' % (self.alg_cost, self.lp_value))
        if self.brute_cost is not None:
            if self.alg_cost < self.brute_cost - tol:
                ret.append('alg %g < brute %g'
                           % (self.alg_cost, self.brute_cost))
            if self.brute_cost < self.lp_value - tol:
                ret.append('brute %g < lp %g'
                           % (self.brute_cost, self.lp_value))
        return ret

    def to_dict(self, timing=True):
        ret = {
            'format': FORMAT,
            'instance': self.instance_digest,
            'lp_value': self.lp_value,
            'alg_cost': self.alg_cost,
            'brute_cost': self.brute_cost,
            'ratio_alg_lp': self.ratio_lp(),
            'ratio_alg_brute': self.ratio_brute(),
            'phases': self.phases,
            'cuts_added': self.cuts,
            'seed': self.seed,
            'fallback': self.fallback,
            'completions': list(self.completions)
        }
        if timing:
            ret['wall_time'] = self.wall_time
        return ret


def solve(instance, config=None, grid='unit', brute=False):
    """Run LP, rounding, schedule extraction and validation.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    config : `None` or `jobcover.rounding.RoundingConfig`, optional
    grid : `str`, optional
        Schedule timeline mode.
    brute : `bool`, optional
        Add the brute-force optimum when the instance is small enough.

    Returns
    -------
    (`jobcover.report.RunReport`, `jobcover.rounding.RoundingResult`)

    Raises
    ------
    jobcover.error.RoundingError
        If the costs break their ordering.
    """
    config = config or RoundingConfig()
    start = time.perf_counter()
    x, lp_value, cuts = solve_lp(instance, config.tol)
    timeline = build_timeline(instance, grid)
    result = Rounding(instance, config).run(x, timeline)
    brute_cost = None
    if brute:
        try:
            brute_cost = brute_force_opt(instance).opt_cost
        except OracleGuardError as ex:
            logger.info('solve: no brute-force optimum: %s', ex)
    report = RunReport(
        digest(instance.to_dict()), lp_value, result.cost, result.phases,
        cuts, config.seed, time.perf_counter() - start, brute_cost,
        result.fallback, result.completions
    )
    problems = report.check(config.tol)
    if problems:
        logger.error('solve: %s', '; '.join(problems))
        raise RoundingError('; '.join(problems))
    logger.info('solve: %s', report)
    return report, result


class BenchTask:
    """One generated instance of a bench suite.

    Attributes
    ----------
    entry : `int`
        Suite entry index.
    seed : `int`
    generator : `str`
    params : `dict`
    """

    GENERATORS = {
        'random': gen_random,
        'three_partition': gen_three_partition
    }

    def __init__(self, entry, seed, generator, params):
        self.entry = entry
        self.seed = seed
        self.generator = generator
        self.params = params

    def __str__(self):
        return '<task %s %s seed=%d>' % (self.id, self.generator, self.seed)

    __repr__ = __str__

    @property
    def id(self):
        return '%d:%d' % (self.entry, self.seed)

    @property
    def key(self):
        return self.entry, self.seed

    def instance(self):
        return self.GENERATORS[self.generator](seed=self.seed, **self.params)


def load_suite(data):
    """Expand a suite description into tasks.

    Parameters
    ----------
    data : `dict`
        ``{"format": 1, "instances": [{"generator": ..., "seeds": [lo, hi],
        ...params}]}``; seeds run from ``lo`` up to ``hi`` exclusive.

    Returns
    -------
    `list` of `jobcover.report.BenchTask`

    Raises
    ------
    jobcover.error.SuiteError
    """
    if not isinstance(data, dict):
        raise SuiteError('suite must be an object')
    if data.get('format', FORMAT) != FORMAT:
        raise SuiteError('unsupported format %r' % data['format'])
    entries = data.get('instances', [])
    if not isinstance(entries, list):
        raise SuiteError('"instances" must be a list')
    ret = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SuiteError('entry %d must be an object' % i)
        params = dict(entry)
        generator = params.pop('generator', None)
        if generator not in BenchTask.GENERATORS:
            raise SuiteError('entry %d: unknown generator %r'
                             % (i, generator))
        try:
            lo, hi = params.pop('seeds', (0, 1))
            seeds = range(int(lo), int(hi))
        except (TypeError, ValueError):
            raise SuiteError('entry %d: "seeds" must be [lo, hi]' % i)
        ret.extend(BenchTask(i, seed, generator, params) for seed in seeds)
    return ret


def _run_task(task, config, grid, brute):
    try:
        inst = task.instance()
    except TypeError as ex:
        raise SuiteError('%s: %s' % (task, ex))
    task_config = RoundingConfig(
        c=config.c, max_phases=config.max_phases, seed=task.seed,
        tol=config.tol, close_critical=config.close_critical,
        critical_order=config.critical_order, check=config.check
    )
    report, _ = solve(inst, task_config, grid, brute)
    return task, report


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def _max(values):
    values = [v for v in values if v is not None]
    return max(values) if values else None


def aggregate(reports):
    """Summary statistics of run reports."""
    ratio_lp = [r.ratio_lp() for r in reports]
    ratio_brute = [r.ratio_brute() for r in reports]
    return {
        'count': len(reports),
        'mean_ratio_alg_lp': _mean(ratio_lp),
        'max_ratio_alg_lp': _max(ratio_lp),
        'mean_ratio_alg_brute': _mean(ratio_brute),
        'max_ratio_alg_brute': _max(ratio_brute),
        'mean_phases': _mean([r.phases for r in reports]),
        'mean_cuts': _mean([r.cuts for r in reports]),
        'fallbacks': sum(1 for r in reports if r.fallback)
    }


async def bench(tasks, config=None, grid='unit', brute=True, workers=None,
                timing=False, loop=None):
    """Run bench tasks on a thread pool.

    Parameters
    ----------
    tasks : `list` of `jobcover.report.BenchTask`
    config : `None` or `jobcover.rounding.RoundingConfig`, optional
        Shared settings; every task uses its own seed.
    grid : `str`, optional
    brute : `bool`, optional
    workers : `None` or `int`, optional
        Pool size.
    timing : `bool`, optional
        Include wall times.
    loop : `None` or `asyncio.AbstractEventLoop`, optional

    Returns
    -------
    `dict`
        Per-instance reports sorted by instance id, and aggregates.
    """
    config = config or RoundingConfig()
    loop = loop or asyncio.get_running_loop()
    logger.info('bench: %d tasks', len(tasks))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = await asyncio.gather(*[
            run_in_executor(loop, executor, _run_task,
                            task, config, grid, brute)
            for task in tasks
        ])
    results.sort(key=lambda res: res[0].key)
    reports = [report for _, report in results]
    instances = []
    for task, report in results:
        item = report.to_dict(timing)
        item['id'] = task.id
        item['generator'] = task.generator
        instances.append(item)
    return {
        'format': FORMAT,
        'instances': instances,
        'aggregate': aggregate(reports)
    }


def run_bench(data, **kwargs):
    """Load a suite and run `bench` to completion."""
    tasks = load_suite(data)
    return asyncio.run(bench(tasks, **kwargs))


def dumps(data):
    """Canonical JSON text of a report."""
    return json.dumps(data, sort_keys=True, indent=2)
