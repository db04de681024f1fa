import logging

import numpy as np
from scipy.optimize import linprog

from .error import LPError, ConvergenceError


logger = logging.getLogger(__name__)

TOL = 1e-6
CUT_CEILING_FACTOR = 10

_EPS = 1e-12
_SNAP = 1e-9


class FracSolution:
    """Fractional LP state ``x[j][t]``, ``t = 0..H``.

    Column 0 is the constant 1 and carries no variable.

    Attributes
    ----------
    x : `numpy.ndarray`
        Shape ``(n, H + 1)``.
    """

    def __init__(self, x):
        x = np.array(x, dtype=float)
        if x.ndim != 2:
            raise ValueError('x must be 2-dimensional')
        x[:, 0] = 1.0
        self.x = x

    def __str__(self):
        return '<x n=%d H=%d>' % (self.n, self.horizon)

    __repr__ = __str__

    def __eq__(self, x):
        return (isinstance(x, FracSolution)
                and self.x.shape == x.x.shape
                and np.array_equal(self.x, x.x))

    def __getitem__(self, key):
        return self.x[key]

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def horizon(self):
        return self.x.shape[1] - 1

    @classmethod
    def from_columns(cls, values):
        """Build from an ``(n, H)`` array of the times ``1..H``."""
        values = np.asarray(values, dtype=float)
        return cls(np.hstack([np.ones((values.shape[0], 1)), values]))

    @classmethod
    def from_completions(cls, completions, horizon):
        """0/1 solution with ``x[j][t] = 1`` iff ``t <= C_j``."""
        t = np.arange(horizon + 1)
        return cls(t[None, :] <= np.asarray(completions)[:, None])

    def copy(self):
        return FracSolution(self.x.copy())

    def is_monotone(self, tol=_SNAP):
        return bool(np.all(np.diff(self.x, axis=1) <= tol))

    def in_bounds(self, tol=_SNAP):
        return bool(np.all(self.x >= -tol) and np.all(self.x <= 1 + tol))

    def repair(self):
        """Snap near-integers, clip to [0, 1] and restore monotonicity."""
        x = self.x
        x[np.abs(x) < _SNAP] = 0.0
        x[np.abs(x - 1) < _SNAP] = 1.0
        np.clip(x, 0.0, 1.0, out=x)
        x[:, 0] = 1.0
        np.minimum.accumulate(x, axis=1, out=x)
        return self

    def latest(self, threshold):
        """Per job, the latest ``t`` with ``x[j][t] >= threshold[j]``.

        Parameters
        ----------
        threshold : `float` or `numpy.ndarray`

        Returns
        -------
        `numpy.ndarray` of `int`
        """
        threshold = np.broadcast_to(np.asarray(threshold, dtype=float),
                                    (self.n,))
        mask = self.x >= threshold[:, None]
        mask[:, 0] = True
        last = self.horizon - np.argmax(mask[:, ::-1], axis=1)
        return last.astype(int)

    def completions(self):
        """Latest ``t`` with ``x[j][t] = 1``."""
        return self.latest(1.0 - _SNAP)

    def support(self):
        """Latest ``t`` with ``x[j][t] > 0``."""
        return self.latest(_SNAP)

    def is_integral(self):
        return bool(np.all((self.x == 0) | (self.x == 1)))

    def objective(self, instance):
        """``sum_j sum_t x[j][t] * (g_j(t) - g_j(t - 1))``."""
        marginal = instance.marginal_table[:, 1:]
        x = self.x[:, 1:]
        return float(np.sum(np.where(x > 0, x * marginal, 0.0)))

    def to_list(self):
        return self.x[:, 1:].tolist()


class CutConstraint:
    """Job-cover row ``sum_j sum_{t in eligible[j]} x[j][t] >= V``.

    Attributes
    ----------
    b : `int`
        Start of ``T' = [b, H]``.
    D : `tuple` of `int`
    V : `int`
        Deficiency.
    eligible : `tuple` of `tuple` of `int`
        ``E(T', D, j)`` per job.
    """

    def __init__(self, b, D, V, eligible):
        self.b = int(b)
        self.D = tuple(int(d) for d in D)
        self.V = int(V)
        self.eligible = tuple(tuple(times) for times in eligible)

    def __str__(self):
        return '<cut b=%d D=%s V=%d>' % (self.b, list(self.D), self.V)

    __repr__ = __str__

    def __eq__(self, cut):
        return isinstance(cut, CutConstraint) and self.key == cut.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        return self.b, self.D

    def lhs(self, x):
        return constraint_lhs(x, self)

    def violation(self, x):
        return self.V - self.lhs(x)

    def to_dict(self):
        return {'b': self.b, 'D': list(self.D), 'V': self.V}


def cover(instance, b):
    """Work left for ``T' = [b, H]``: ``sum p - m (b - 1)``."""
    return instance.total_p - instance.m * (b - 1)


def _earliest_count(instance, b, j):
    return max(0, min(instance.jobs[j].p, cover(instance, b),
                      instance.horizon - b + 1))


def _covered(instance, b, D, j):
    return min(max(0, D[j] - b + 1), _earliest_count(instance, b, j))


def earliest_set(instance, b, j):
    """``E(T', j)``: the earliest ``min(p_j, sum p - m (b - 1))`` steps of
    ``[b, H]``.

    Returns
    -------
    `tuple` of `int`
    """
    return tuple(range(b, b + _earliest_count(instance, b, j)))


def deficiency(instance, b, D):
    """``V(T', D)``; may be non-positive.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    b : `int`
    D : `list` of `int`

    Returns
    -------
    `int`
    """
    return cover(instance, b) - sum(
        _covered(instance, b, D, j) for j in range(instance.n)
    )


def eligible_times(instance, b, D, j):
    """``E(T', D, j)``: the earliest ``V`` steps of ``E(T', j)`` after
    ``D_j``.

    Returns
    -------
    `tuple` of `int`
    """
    V = deficiency(instance, b, D)
    if V <= 0:
        return ()
    e = _earliest_count(instance, b, j)
    k = _covered(instance, b, D, j)
    return tuple(range(b + k, b + min(k + V, e)))


def make_cut(instance, b, D):
    """Cut for ``(b, D)`` or `None` if its deficiency is not positive."""
    V = deficiency(instance, b, D)
    if V <= 0:
        return None
    return CutConstraint(b, D, V, [
        eligible_times(instance, b, D, j) for j in range(instance.n)
    ])


def seed_cuts(instance):
    """The ``D = 0`` row of every ``b`` with positive deficiency."""
    zero = (0,) * instance.n
    ret = []
    for b in range(1, instance.horizon + 1):
        cut = make_cut(instance, b, zero)
        if cut is not None:
            ret.append(cut)
    return ret


def constraint_lhs(x, cut):
    """``sum_j sum_{t in E(T', D, j)} x[j][t]``."""
    return float(sum(
        x[j, t] for j, times in enumerate(cut.eligible) for t in times
    ))


def _better(violation, b, D, best):
    if best is None:
        return True
    best_violation, best_b, best_D = best
    if violation > best_violation + _EPS:
        return True
    if violation < best_violation - _EPS:
        return False
    return (b, D) < (best_b, best_D)


def _separate_at(instance, x, b, tol):
    S = cover(instance, b)
    if S <= 0:
        return None
    n = instance.n
    G = np.arange(S + 1)
    masses = []
    tables = [None] * (n + 1)
    table = np.full((S + 1, S + 1), np.inf)
    table[:, 0] = 0.0
    tables[n] = table
    counts = [_earliest_count(instance, b, j) for j in range(n)]
    for j in reversed(range(n)):
        e = counts[j]
        prefix = np.concatenate(([0.0], np.cumsum(x[j, b:b + e])))
        k = np.arange(e + 1)[:, None]
        mass = prefix[np.minimum(k + G[None, :], e)] - prefix[k]
        new = np.full_like(table, np.inf)
        for kk in range(min(e, S) + 1):
            view = new[:, kk:]
            np.minimum(view, table[:, :S + 1 - kk] + mass[kk][:, None],
                       out=view)
        masses.insert(0, mass)
        table = new
        tables[j] = table

    best = None
    for g in range(1, S + 1):
        ell = S - g
        value = tables[0][g, ell]
        if not value < g - tol:
            continue
        D = []
        for j in range(n):
            target = tables[j][g, ell]
            for kk in range(min(counts[j], ell) + 1):
                if tables[j + 1][g, ell - kk] + masses[j][kk, g] \
                        <= target + _EPS:
                    break
            D.append(0 if kk == 0 else b + kk - 1)
            ell -= kk
        D = tuple(D)
        if _better(g - value, b, D, best):
            best = (g - value, b, D)
    return best


def separate(instance, x, tol=TOL):
    """Find the most violated job-cover row of a fractional solution.

    Runs, for every ``b``, a dynamic program over jobs whose state is the
    number of ``E(T', j)`` steps covered by ``D`` so far; all deficiency
    guesses ``G`` share one table.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    x : `jobcover.lp.FracSolution`
    tol : `float`, optional
        Violations up to `tol` are ignored.

    Returns
    -------
    `None` or `jobcover.lp.CutConstraint`
        Maximal violation; ties go to smaller ``b``, then smaller ``D``.
    """
    best = None
    for b in range(1, instance.horizon + 1):
        found = _separate_at(instance, x, b, tol)
        if found is not None and _better(*found, best):
            best = found
    if best is None:
        return None
    violation, b, D = best
    cut = make_cut(instance, b, D)
    logger.debug('separate: %s violated by %.6g', cut, violation)
    return cut


class LpModel:
    """Restricted LP over ``x[j][t]``, ``t = 1..H``.

    Rows: monotonicity, box bounds and the accumulated cut rows.

    Attributes
    ----------
    instance : `jobcover.instance.Instance`
    cuts : `dict` of (`tuple`, `jobcover.lp.CutConstraint`)
    weak : `bool`
        `True` - plain min-cut rows instead of job-cover rows.
    """

    logger = logging.getLogger(__name__)

    METHOD = 'highs-ds'

    def __init__(self, instance, weak=False):
        self.instance = instance
        self.weak = weak
        self.cuts = {}

    def __str__(self):
        return '<lp model %s %d cuts%s>' % (
            self.instance, len(self.cuts), ' weak' if self.weak else ''
        )

    __repr__ = __str__

    def add(self, cut):
        """Add a cut row.

        Returns
        -------
        `bool`
            `False` if the row was already present.
        """
        if cut.key in self.cuts:
            return False
        self.cuts[cut.key] = cut
        return True

    def seed(self):
        for cut in seed_cuts(self.instance):
            self.add(cut)
        self.logger.debug('seed: %d rows', len(self.cuts))
        return self

    def index(self, j, t):
        return j * self.instance.horizon + t - 1

    def rows(self):
        """Inequality rows as ``A_ub x <= b_ub``."""
        inst = self.instance
        n, H = inst.n, inst.horizon
        A = []
        b = []
        for j in range(n):
            for t in range(2, H + 1):
                row = np.zeros(n * H)
                row[self.index(j, t)] = 1.0
                row[self.index(j, t - 1)] = -1.0
                A.append(row)
                b.append(0.0)
        if self.weak:
            for start in range(1, H + 1):
                rhs = cover(inst, start)
                if rhs <= 0:
                    continue
                row = np.zeros(n * H)
                for j in range(n):
                    row[self.index(j, start):self.index(j, H) + 1] = -1.0
                A.append(row)
                b.append(-float(rhs))
        else:
            for cut in self.cuts.values():
                row = np.zeros(n * H)
                for j, times in enumerate(cut.eligible):
                    for t in times:
                        row[self.index(j, t)] = -1.0
                A.append(row)
                b.append(-float(cut.V))
        if not A:
            return None, None
        return np.vstack(A), np.array(b)

    def solve(self):
        """Solve the restricted LP.

        Returns
        -------
        `jobcover.lp.FracSolution`

        Raises
        ------
        jobcover.error.LPError
        """
        inst = self.instance
        if inst.n == 0:
            return FracSolution(np.ones((0, inst.horizon + 1)))
        c = inst.marginal_table[:, 1:].ravel()
        A, b = self.rows()
        res = linprog(c, A_ub=A, b_ub=b, bounds=(0.0, 1.0),
                      method=self.METHOD)
        if res.status != 0:
            self.logger.error('linprog: %s', res.message)
            raise LPError(res.message)
        x = FracSolution.from_columns(res.x.reshape(inst.n, inst.horizon))
        return x.repair()


def solve_lp(instance, tol=TOL, weak=False, max_cuts=None):
    """Cutting-plane solve of the job-cover LP.

    Seeds the ``D = 0`` rows of every ``b``, then alternates between
    re-solving and adding the most violated row until separation finds none.

    Parameters
    ----------
    instance : `jobcover.instance.Instance`
    tol : `float`, optional
        Separation tolerance.
    weak : `bool`, optional
        Solve the plain min-cut relaxation instead.
    max_cuts : `None` or `int`, optional
        Cut ceiling (default ``10 n H``).

    Returns
    -------
    (`jobcover.lp.FracSolution`, `float`, `int`)
        Solution, LP value, rows added by separation.

    Raises
    ------
    jobcover.error.ConvergenceError
        If more than `max_cuts` rows are needed.
    jobcover.error.LPError
    """
    if max_cuts is None:
        max_cuts = CUT_CEILING_FACTOR * instance.n * instance.horizon
    model = LpModel(instance, weak=weak)
    if not weak:
        model.seed()
    added = 0
    while True:
        x = model.solve()
        if weak:
            break
        cut = separate(instance, x, tol)
        if cut is None:
            break
        if not model.add(cut):
            logger.warning('separation returned existing row %s', cut)
            break
        added += 1
        if added > max_cuts:
            raise ConvergenceError('more than %d cuts' % max_cuts)
    value = x.objective(instance)
    logger.info('solve_lp %s: value %.6g, %d cuts added',
                instance, value, added)
    return x, value, added
