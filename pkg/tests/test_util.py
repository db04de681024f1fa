import asyncio
import pytest
import numpy as np

from jobcover.util import digest, run_in_executor


@pytest.mark.parametrize('test,res', [
    (({'a': 1, 'b': 2}, {'b': 2, 'a': 1}), True),
    (({'a': 1}, {'a': 2}), False),
    ((np.zeros((2, 3)), np.zeros((2, 3))), True),
    ((np.zeros((2, 3)), np.ones((2, 3))), False)
])
def test_digest(test, res):
    assert (digest(test[0]) == digest(test[1])) == res


def test_digest_length():
    assert len(digest([1, 2], 6)) == 6
    assert '+' not in digest(list(range(100)), 24)


@pytest.mark.asyncio
async def test_run_in_executor():
    loop = asyncio.get_running_loop()
    res = await run_in_executor(loop, None, max, 1, 3, 2)
    assert res == 3
