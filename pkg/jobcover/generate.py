import math
import logging
from itertools import combinations_with_replacement

import numpy as np

from .instance import CostFn, Job, Instance


logger = logging.getLogger(__name__)

WEIGHTS = (1, 10)
EXP_WEIGHTS = (1, 3)
KNORM_EXPONENTS = (2, 3)
STEPS = (2, 3)


def _draw(rng, bounds):
    lo, hi = bounds
    return int(rng.integers(lo, hi + 1))


def _random_cost(rng, kind, deadline_max, horizon):
    if kind == 'weighted-completion':
        return CostFn(kind, w=_draw(rng, WEIGHTS))
    if kind == 'weighted-knorm':
        return CostFn(kind, w=_draw(rng, WEIGHTS),
                      k=_draw(rng, KNORM_EXPONENTS))
    if kind in CostFn.DEADLINE_KINDS:
        return CostFn(kind, w=_draw(rng, WEIGHTS),
                      d=_draw(rng, (1, deadline_max)))
    if kind == 'exponential':
        return CostFn(kind, w=_draw(rng, EXP_WEIGHTS))
    if kind == 'step-table':
        steps = min(_draw(rng, STEPS), horizon)
        times = np.sort(rng.choice(np.arange(1, horizon + 1), size=steps,
                                   replace=False))
        costs = np.cumsum(rng.integers(WEIGHTS[0], WEIGHTS[1] + 1,
                                       size=steps))
        return CostFn(kind, table=list(zip(times.tolist(), costs.tolist())))
    raise ValueError('unknown cost kind "%s"' % kind)


def gen_random(n, m, p_max, cost_kind='weighted-completion', seed=0):
    """Random instance.

    Processing times are uniform on ``1..p_max``. Cost parameters are
    uniform integers: weights on ``1..10`` (``1..3`` for ``exponential``),
    knorm exponents on ``2..3``, deadlines on ``1..ceil(sum p / m)`` and
    ``2..3`` table steps at distinct times with positive increments on
    ``1..10``.

    Parameters
    ----------
    n : `int`
    m : `int`
    p_max : `int`
    cost_kind : `str`, optional
    seed : `int`, optional

    Returns
    -------
    `jobcover.instance.Instance`

    Raises
    ------
    ValueError
        If a size parameter is below 1 or the cost kind is unknown.
    """
    if n < 1 or m < 1 or p_max < 1:
        raise ValueError('n, m and p_max must be >= 1, got %r, %r, %r'
                         % (n, m, p_max))
    if cost_kind not in CostFn.KINDS:
        raise ValueError('unknown cost kind "%s"' % cost_kind)
    rng = np.random.default_rng(seed)
    p = rng.integers(1, p_max + 1, size=n).tolist()
    total = sum(p)
    deadline_max = -(-total // m)
    horizon = max(total, 1)
    jobs = [
        Job(j, p[j], _random_cost(rng, cost_kind, deadline_max, horizon))
        for j in range(n)
    ]
    inst = Instance(m, jobs)
    logger.debug('gen_random seed=%r: %s', seed, inst)
    return inst


def part_bounds(B):
    """Part size range ``ceil(B/4)..ceil(B/2) - 1``, both ends inclusive.

    Parts stay strictly below ``B/2``; the lower end admits ``B/4``.

    Examples
    --------
    >>> part_bounds(8)
    (2, 3)
    >>> part_bounds(12)
    (3, 5)
    """
    return math.ceil(B / 4), (B - 1) // 2


def triples(B):
    """Sorted part triples summing to `B`.

    Examples
    --------
    >>> triples(8)
    [(2, 3, 3)]
    """
    lo, hi = part_bounds(B)
    return [
        triple
        for triple in combinations_with_replacement(range(lo, hi + 1), 3)
        if sum(triple) == B
    ]


def gen_three_partition(B, n_triples, feasible=True, seed=0, weight=1):
    """Hard instance built from a 3-partition instance.

    Every job costs nothing up to `B` and `weight` after it; there are
    ``n_triples`` machines. A feasible instance concatenates random triples
    summing to `B`, so a cost-0 schedule exists; otherwise parts are drawn
    independently.

    Parameters
    ----------
    B : `int`
    n_triples : `int`
    feasible : `bool`, optional
    seed : `int`, optional
    weight : `float`, optional

    Returns
    -------
    `jobcover.instance.Instance`

    Raises
    ------
    ValueError
        If ``B < 4``, ``n_triples < 1`` or no triple sums to `B`.
    """
    if B < 4:
        raise ValueError('B must be >= 4, got %r' % B)
    if n_triples < 1:
        raise ValueError('n_triples must be >= 1, got %r' % n_triples)
    rng = np.random.default_rng(seed)
    if feasible:
        choices = triples(B)
        if not choices:
            raise ValueError('no part triple sums to B=%d' % B)
        picked = rng.integers(len(choices), size=n_triples)
        parts = [a for i in picked for a in choices[i]]
        parts = rng.permutation(parts).tolist()
    else:
        lo, hi = part_bounds(B)
        parts = rng.integers(lo, hi + 1, size=3 * n_triples).tolist()
    cost = CostFn('throughput', w=weight, d=B)
    jobs = [Job(j, a, cost) for j, a in enumerate(parts)]
    horizon = max(B + 1, -(-sum(parts) // n_triples), max(parts))
    inst = Instance(n_triples, jobs, horizon)
    logger.debug('gen_three_partition B=%d seed=%r: %s', B, seed, inst)
    return inst
