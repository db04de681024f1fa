import json
import logging
from hashlib import md5
from base64 import b64encode

import numpy as np


logger = logging.getLogger(__name__)


def digest(obj, length=12):
    """Short stable digest of a JSON-serializable object or an array.

    Parameters
    ----------
    obj : `object` or `numpy.ndarray`
    length : `int`, optional
        Digest length in characters.

    Returns
    -------
    `str`

    Examples
    --------
    >>> digest([1, 2, 3]) == digest([1, 2, 3])
    True
    >>> len(digest({'a': 1}, 8))
    8
    """
    if isinstance(obj, np.ndarray):
        data = np.ascontiguousarray(obj, dtype=float).tobytes()
    else:
        data = json.dumps(obj, sort_keys=True).encode('utf-8')
    res = md5(data).digest()
    return b64encode(res, b'-_')[:length].decode('utf-8')


def run_in_executor(loop, executor, func, *args):
    """Run a blocking call on an executor.

    Parameters
    ----------
    loop : `asyncio.AbstractEventLoop`
    executor : `None` or `concurrent.futures.Executor`
        `None` - loop default executor.
    func : `function`
    args : `list`

    Returns
    -------
    `asyncio.Future`
    """
    logger.debug('run_in_executor %s', getattr(func, '__name__', func))
    return loop.run_in_executor(executor, lambda: func(*args))
