"""Sub-seed derivation for independent, reproducible per-cell streams."""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def sub_seed(seed: int, index: int) -> int:
    """Seed for stream ``index`` derived from a parent ``seed``.

    Mixes the parent first so that neighbouring parents do not share
    streams at shifted indices.
    """
    return splitmix64(splitmix64(seed & MASK64) ^ (index & MASK64))
