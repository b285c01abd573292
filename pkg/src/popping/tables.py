"""Resampling tables: reproducible per-variable value streams.

Conceptually every variable owns an infinite stack of pre-drawn uniforms;
a run only ever reads the next value of some stack.  Here the stacks are
virtual: position k of variable i under master seed s is the counter-based
hash value(s, i, k), so no storage is needed, replay is exact, and two runs
sharing a seed consume identical streams regardless of the order in which
they interleave variables.

The mixing function is defined three times with bit-identical results: in
pure Python here (the canonical definition), vectorized over numpy arrays,
and as compiled kernels in _kernels; the test suite pins their agreement.
"""

import numpy as np

__all__ = ["ResamplingTable", "derive_seed", "derive_seeds", "table_value"]

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_CURSOR_SALT = 0xD6E8FEB86659FD93
_SEED_SALT = 0xA0761D6478BD642F
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix64(z):
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def table_value(seed, var, cursor):
    """The uniform in [0, 1) at stream position (seed, var, cursor)."""
    h = _mix64((int(seed) + _GAMMA) & _MASK)
    h = _mix64(h ^ (((int(var) + 1) * _GAMMA) & _MASK))
    h = _mix64(h ^ (((int(cursor) + 1) * _CURSOR_SALT) & _MASK))
    return (h >> 11) * _INV_2_53


def derive_seed(master, *indices):
    """Derive a child seed from a master seed and an index path.

    Uses a salt distinct from the table streams, so derived seeds never
    collide with values handed out by the tables themselves.
    """
    h = int(master) & _MASK
    for ix in indices:
        h = _mix64(((h ^ _SEED_SALT) + ((int(ix) + 1) * _GAMMA) & _MASK) & _MASK)
    return h


def derive_seeds(master, n, *prefix):
    """uint64 array of derive_seed(master, *prefix, i) for i in range(n)."""
    h = int(master) & _MASK
    for ix in prefix:
        h = _mix64(((h ^ _SEED_SALT) + ((int(ix) + 1) * _GAMMA) & _MASK) & _MASK)
    idx = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(h ^ _SEED_SALT) + idx * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class ResamplingTable:
    """Per-variable cursors over the virtual value streams of one seed.

    Cursors only advance.  Two tables with the same seed replay the same
    streams; sharing one seed between two algorithms makes their runs
    comparable draw for draw.
    """

    def __init__(self, seed, num_vars):
        if num_vars < 0:
            raise ValueError("num_vars must be >= 0")
        self.seed = int(seed) & _MASK
        self.cursors = np.zeros(num_vars, dtype=np.int64)

    @property
    def num_vars(self):
        return self.cursors.shape[0]

    def draw(self, var):
        """Consume and return the next value of variable var's stream."""
        c = self.cursors[var]
        self.cursors[var] = c + 1
        return table_value(self.seed, var, c)

    def peek(self, var, offset=0):
        """Read ahead without consuming (position = cursor + offset)."""
        return table_value(self.seed, var, self.cursors[var] + offset)

    def __repr__(self):
        return (f"ResamplingTable(seed={self.seed}, num_vars={self.num_vars}, "
                f"consumed={int(self.cursors.sum())})")
