"""Deterministic seed derivation.

Every random stream in a run is derived from the run seed plus a salt, so
the stream an agent sees on a given day does not depend on thread
scheduling or on how many other agents exist.
"""

from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

SEED_MODULUS = 2**32

Salt = Union[str, int]


def derive_seed(run_seed: int, *salt: Salt) -> int:
    """Derive a 32-bit sub-seed from ``run_seed`` and any number of salts."""
    combined = "-".join([str(run_seed), *(str(s) for s in salt)])
    return int(hashlib.sha256(combined.encode("utf-8")).hexdigest(), 16) % SEED_MODULUS


def agent_rng(run_seed: int, agent_id: str, day: int) -> np.random.Generator:
    """Return the generator for one agent on one day."""
    return np.random.default_rng(derive_seed(run_seed, "agent", agent_id, day))


def unit_jitter(run_seed: int, *salt: Salt) -> float:
    """Deterministic value in [-1, 1] keyed by the seed and salts."""
    return derive_seed(run_seed, "jitter", *salt) / (SEED_MODULUS - 1) * 2.0 - 1.0
