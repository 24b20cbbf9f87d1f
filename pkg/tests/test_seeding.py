"""Tests for groupsim.core.seeding."""

from __future__ import annotations

import numpy as np

from groupsim.core.seeding import SEED_MODULUS, agent_rng, derive_seed, unit_jitter


class TestDeriveSeed:
    def test_stable(self):
        assert derive_seed(7, "agent", "Students-agents", 3) == derive_seed(
            7, "agent", "Students-agents", 3
        )

    def test_salt_changes_seed(self):
        seeds = {derive_seed(0, "agent", name, 1) for name in ("a", "b", "c", "d")}
        assert len(seeds) == 4
        assert derive_seed(0, "x") != derive_seed(1, "x")

    def test_range(self):
        assert all(0 <= derive_seed(s, "r") < SEED_MODULUS for s in range(100))


class TestAgentStreams:
    def test_agent_rng_reproducible(self):
        a = agent_rng(3, "Teachers-agents", 2).random(5)
        b = agent_rng(3, "Teachers-agents", 2).random(5)
        np.testing.assert_array_equal(a, b)

    def test_days_differ(self):
        assert agent_rng(3, "x", 1).random() != agent_rng(3, "x", 2).random()

    def test_unit_jitter_bounds(self):
        values = [unit_jitter(s, "views", "agent", 1) for s in range(500)]
        assert min(values) >= -1.0
        assert max(values) <= 1.0
        assert min(values) < -0.5 < 0.5 < max(values)
