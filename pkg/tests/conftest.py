from itertools import combinations_with_replacement, product

import pytest

from jobcover.instance import CostFn, Job, Instance


def make_instance(m, p, kind='weighted-completion', horizon=None, **kwargs):
    """Instance with one cost function kind; list-valued keyword arguments
    are per job."""
    jobs = []
    for j, pj in enumerate(p):
        params = {
            key: value[j] if isinstance(value, (list, tuple)) else value
            for key, value in kwargs.items()
        }
        jobs.append(Job(j, pj, CostFn(kind, **params)))
    return Instance(m, jobs, horizon)


@pytest.fixture
def instance_a():
    return make_instance(1, (2, 2))


@pytest.fixture
def instance_a_weighted():
    return make_instance(1, (2, 2), w=(10, 1))


@pytest.fixture
def three_jobs():
    return make_instance(2, (3, 3, 3))


def exhaustive_family():
    """Yield every instance with ``m`` in 1..2, 2..3 jobs and processing
    times in 1..3 (as multisets) together with all of its completion
    vectors in ``0..H``."""
    for m in (1, 2):
        for n in (2, 3):
            for p in combinations_with_replacement((1, 2, 3), n):
                inst = make_instance(m, p)
                for completions in product(range(inst.H + 1), repeat=n):
                    yield inst, completions
