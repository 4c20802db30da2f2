"""Counter-based random streams keyed by ``(seed, stream_tag, trial_index)``.

Every trial reads a fixed window of a Philox stream, so the numbers a trial
sees do not depend on batching, chunk size or the number of workers.
"""

import secrets

import numpy as np

MASK64 = (1 << 64) - 1

# stream tags
CONFIG = 0
NOISE_PICK = 1
NOISE_FRESH = 2


def fresh_seed() -> int:
    return secrets.randbits(63)


def uniforms(seed: int, tag: int, start: int, stop: int, m: int) -> np.ndarray:
    """Uniforms of trials ``start..stop-1``, shape ``(stop-start, m)``.

    Trial ``t`` owns draws ``[t*stride, t*stride + m)`` of the ``(seed, tag)``
    stream, with ``stride`` the smallest multiple of 4 not below ``m`` (Philox
    emits four words per counter step).
    """
    if stop <= start:
        return np.empty((0, m))
    stride = -(-m // 4) * 4
    key = np.array([seed & MASK64, tag & MASK64], dtype=np.uint64)
    counter = np.array([start * (stride // 4), 0, 0, 0], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key, counter=counter))
    draws = gen.random((stop - start) * stride).reshape(stop - start, stride)
    return draws[:, :m]
