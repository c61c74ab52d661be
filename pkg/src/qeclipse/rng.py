"""Seeding discipline.

Every random object is drawn from a fresh generator built from an explicit
seed plus an optional spawn key, so results never depend on call order or on
how work is split between processes.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def generator(seed, *key):
    """PCG64 generator for ``seed`` spawned along ``key`` (a tuple of ints)."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(master_seed, index):
    """Stateless 64-bit child seed for trial ``index`` of ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed) & _MASK64, spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])
