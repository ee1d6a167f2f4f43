"""Channel strategies: budget truncation, determinism, charge accounting."""

import random
from fractions import Fraction

import numpy as np
import pytest

from streamcode.channel import (AttackStrategy, ErrorBudget, blockzero_attack,
                                corrupt, corruption_dist2)
from streamcode.gf import ERASE


def budget(rho, m):
    return ErrorBudget(Fraction(rho), m)


class TestBudget:
    def test_limit_is_floor(self):
        assert budget("5/100", 64).limit == 3
        assert budget("5/100", 60).limit == 3
        assert budget("5/100", 59).limit == 2

    def test_charge_cap(self):
        b = budget("1/10", 20)  # limit 2, limit2 4
        assert b.try_charge(2)
        assert b.try_charge(1)
        assert b.try_charge(1)
        assert not b.try_charge(1)
        assert b.charged2 == 4


class TestStrategies:
    def test_uniform_exact_budget_binary(self):
        word = np.zeros(200, dtype=np.uint8)
        out = corrupt(word, AttackStrategy("uniform"), budget("1/10", 200),
                      random.Random(1))
        assert int(out.sum()) == 20
        assert corruption_dist2(word, out) == 40

    def test_uniform_deterministic(self):
        word = np.zeros(100, dtype=np.uint8)
        a = corrupt(word, AttackStrategy("uniform"), budget("1/4", 100),
                    random.Random(7))
        b = corrupt(word, AttackStrategy("uniform"), budget("1/4", 100),
                    random.Random(7))
        assert np.array_equal(a, b)

    def test_burst_contiguous(self):
        word = np.zeros(100, dtype=np.uint8)
        out = corrupt(word, AttackStrategy("burst"), budget("1/10", 100),
                      random.Random(3))
        hits = np.flatnonzero(out != word)
        assert len(hits) == 10
        assert hits[-1] - hits[0] == 9  # one contiguous run

    def test_copy_kill_truncates_to_budget(self):
        # 4 copies of length 50; budget floor(0.1*200)=20 < 50.
        word = np.zeros(200, dtype=np.uint8)
        out = corrupt(word, AttackStrategy("copy_kill",
                                           {"copy_len": 50, "target_copy": 2}),
                      budget("1/10", 200), random.Random(5))
        hits = np.flatnonzero(out != word)
        assert len(hits) == 20
        assert all(100 <= h < 150 for h in hits)

    def test_copy_kill_full_copy_when_budget_allows(self):
        word = np.ones(40, dtype=np.uint8)
        out = corrupt(word, AttackStrategy("copy_kill",
                                           {"copy_len": 10, "target_copy": 0}),
                      budget("1/2", 40), random.Random(5))
        assert np.array_equal(out[:10], np.zeros(10, dtype=np.uint8))
        assert np.array_equal(out[10:], word[10:])

    def test_blockzero_charges_only_changes(self):
        word = np.ones(60, dtype=np.uint8)
        b = budget("1/6", 60)  # limit 10
        out = corrupt(word, AttackStrategy("blockzero",
                                           {"block_len": 4, "window_step": 4}),
                      b, random.Random(2))
        assert int((out != word).sum()) == 10
        assert b.charged2 == 20

    def test_blockzero_skips_already_zero(self):
        word = np.zeros(60, dtype=np.uint8)
        b = budget("1/6", 60)
        out = corrupt(word, AttackStrategy("blockzero",
                                           {"block_len": 4, "window_step": 4}),
                      b, random.Random(2))
        assert np.array_equal(out, word)
        assert b.charged2 == 0

    def test_erasure_mix_split_and_charge(self):
        word = np.full(100, 5, dtype=np.int16)
        b = budget("1/5", 100)  # limit 20: 10 flips + 20 erasures
        out = corrupt(word, AttackStrategy("erasure_mix"), b, random.Random(9))
        era = int((out == ERASE).sum())
        flips = int(((out != word) & (out != ERASE)).sum())
        assert era == 20 and flips == 10
        assert corruption_dist2(word, out) == 2 * flips + era == 40
        assert b.charged2 == 40

    def test_erasure_mix_rejects_binary(self):
        with pytest.raises(ValueError):
            corrupt(np.zeros(8, dtype=np.uint8), AttackStrategy("erasure_mix"),
                    budget("1/2", 8), random.Random(0))

    def test_symbol_substitution_stays_in_alphabet(self):
        word = np.arange(16, dtype=np.int16) % 7
        out = corrupt(word, AttackStrategy("uniform"), budget("1/2", 16),
                      random.Random(11))
        changed = out != word
        assert changed.sum() == 8
        assert out.min() >= 0

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            corrupt(np.zeros(4, dtype=np.uint8), AttackStrategy("nope"),
                    budget("1/2", 4), random.Random(0))


class TestBlockzeroAttack:
    def test_window_stops_at_word_end(self):
        # step larger than block: later blocks' windows fall off the end.
        word = np.ones(40, dtype=np.uint8)
        out = blockzero_attack(word, block_len=4, window_step=16,
                               rng=random.Random(0))
        # at most floor((40 - j)/16) <= 2 blocks zeroed
        assert 4 <= int((out != word).sum()) <= 8

    def test_never_exceeds_budget(self):
        word = np.ones(64, dtype=np.uint8)
        for seed in range(20):
            b = budget("5/100", 64)  # limit 3
            out = blockzero_attack(word, 8, 8, random.Random(seed), budget=b)
            assert corruption_dist2(word, out) <= b.limit2
