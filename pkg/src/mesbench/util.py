"""Small shared helpers."""

import hashlib

import numpy as np


def derive_seed(master: int, *parts) -> int:
    """Derive a child seed as a pure function of a master seed and labels.

    Same (master, parts) always gives the same child; different labels give
    unrelated streams. Used everywhere a component needs its own RNG so that
    one benchmark seed pins the entire run.
    """
    h = hashlib.sha256(repr((int(master),) + tuple(parts)).encode())
    return int.from_bytes(h.digest()[:8], "big")


def rng_from(master: int, *parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *parts))
