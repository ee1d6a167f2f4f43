"""Large-alphabet LDC tests on RM(q=16, m=2, d=1) over GF(16) with a
two-fold repetition inner code: 3 message symbols into 512 codeword symbols."""

import random
from fractions import Fraction

import numpy as np
import pytest

from streamcode.gf import ERASE, GF, field_mul, mul_vec
from streamcode.codes import repetition_code, doubly_extended_rs
from streamcode.ldc_large import (
    ConfidenceDist, LargeLdcParams, QueryLists, ResampleExhausted,
    UniformQuerySpec, gen_qlists, ldc_large_encode, overlap_cap,
    query_smoothness_check, sample_smooth_plan_large, smooth_local_decode_large,
    gather_syms,
)

GF16 = GF(4)


def toy_params(**over):
    kw = dict(K=GF16, e=1, m=2, d=1, inner=repetition_code(GF16, 2), r=3,
              eps=Fraction(1, 5), t=2)
    kw.update(over)
    return LargeLdcParams(**kw)


def random_message(p, rng):
    return np.array([rng.randrange(p.K.q) for _ in range(p.r)], dtype=np.int32)


def test_shapes():
    p = toy_params()
    assert p.capacity_syms == 3 and p.code_len == 512
    assert p.queries == 2 * 15 * 2
    assert p.smoothness_bound == Fraction(30, 256)


def test_encode_systematic_and_linear():
    p = toy_params()
    rng = random.Random(1)
    for _ in range(10):
        x = random_message(p, rng)
        w = ldc_large_encode(p, x)
        assert len(w) == p.code_len
        assert [int(w[p.sym_position(i)]) for i in range(p.r)] == list(x)
    a, b = random_message(p, rng), random_message(p, rng)
    assert np.array_equal(ldc_large_encode(p, a ^ b),
                          ldc_large_encode(p, a) ^ ldc_large_encode(p, b))
    # K-linearity under scalar multiplication as well
    c = 7
    ca = np.array([field_mul(GF16, c, int(v)) for v in a], dtype=np.int32)
    assert np.array_equal(ldc_large_encode(p, ca), mul_vec(GF16, c, ldc_large_encode(p, a)))


def test_smooth_uncorrupted_certainty():
    p = toy_params()
    rng = random.Random(2)
    x = random_message(p, rng)
    w = ldc_large_encode(p, x)
    for i in range(p.r):
        dist = smooth_local_decode_large(w, i, p, rng)
        sigma, mass, bot = dist.merged()
        assert sigma == int(x[i]) and mass == 1 and bot == 0


def test_smooth_single_erasure_exact_masses():
    p = toy_params()
    rng = random.Random(3)
    x = random_message(p, rng)
    w = ldc_large_encode(p, x)
    i = 1
    plan = sample_smooth_plan_large(p, i, p_rng := random.Random(7))
    # erase one position that only the first curve reads
    only_first = set(map(int, plan.curves[0].positions)) - set(map(int, plan.curves[1].positions))
    pos = sorted(only_first)[0]
    w = w.copy()
    w[pos] = ERASE
    from streamcode.ldc_large import confidence_from_words_large
    words = [gather_syms(w, c.positions) for c in plan.curves]
    dist = confidence_from_words_large(p, plan, words)
    L = p.curve_code.code_len  # 30
    # the erased curve: delta = 1/(2L); mass 1 - 1/L on sigma, 1/L on bot
    sigma, mass, bot = dist.merged()
    assert sigma == int(x[i])
    assert bot == Fraction(1, 2 * L) and mass == 1 - bot


def test_smooth_codeword_index():
    p = toy_params()
    rng = random.Random(4)
    x = random_message(p, rng)
    w = ldc_large_encode(p, x)
    for j in [0, 17, 300, 511]:
        dist = smooth_local_decode_large(w, j, p, rng, index="codeword")
        sigma, mass, bot = dist.merged()
        assert sigma == int(w[j]) and mass == 1


def test_smooth_under_symbol_corruption():
    p = toy_params(t=4)
    rng = random.Random(5)
    ok = 0
    for _ in range(30):
        x = random_message(p, rng)
        w = ldc_large_encode(p, x)
        for pos in rng.sample(range(p.code_len), p.code_len // 20):
            w[pos] = (w[pos] + 1 + rng.randrange(15)) % 16
        i = rng.randrange(p.r)
        sigma, mass, bot = smooth_local_decode_large(w, i, p, rng).merged()
        ok += int(sigma == int(x[i]))
    assert ok >= 27


def test_smooth_garbage_gives_bot():
    p = toy_params()
    rng = random.Random(6)
    w = np.full(p.code_len, ERASE, dtype=np.int32)
    dist = smooth_local_decode_large(w, 0, p, rng)
    sigma, mass, bot = dist.merged()
    assert sigma is None and bot == 1


def test_merging_rule_by_hand():
    d = ConfidenceDist({3: Fraction(1, 2), 7: Fraction(1, 3)}, Fraction(1, 6))
    sigma, mass, bot = d.merged()
    assert (sigma, mass) == (3, Fraction(1, 6))
    assert bot == Fraction(1, 6) + 2 * Fraction(1, 3)
    # equal masses annihilate completely
    d = ConfidenceDist({1: Fraction(1, 2), 2: Fraction(1, 2)}, Fraction(0))
    assert d.merged() == (None, Fraction(0), Fraction(1))


def test_confidence_total_must_be_one():
    with pytest.raises(AssertionError):
        ConfidenceDist({1: Fraction(1, 2)}, Fraction(1, 3))


def test_mds_inner_variant():
    p = toy_params(K=GF(2), e=2, inner=doubly_extended_rs(GF(2)), r=4, t=2)
    assert p.F.q == 16 and p.code_len == 256 * 5
    rng = random.Random(8)
    x = random_message(p, rng)
    w = ldc_large_encode(p, x)
    for i in range(p.r):
        sigma, mass, _ = smooth_local_decode_large(w, i, p, rng).merged()
        assert sigma == int(x[i]) and mass == 1


# ---------------------------------------------------------------------------
# query lists

def test_gen_qlists_real_params():
    p = toy_params()
    rng = random.Random(9)
    ql = gen_qlists(p, rng)
    assert len(ql.lists) == p.r and len(ql.plans) == p.r
    for lst in ql.lists:
        assert len(lst) == p.queries
    assert ql.counts.max() <= ql.cap
    assert ql.cap == overlap_cap(p.r, p.queries, p.code_len)


def test_gen_qlists_deterministic_per_seed():
    p = toy_params()
    a = gen_qlists(p, random.Random(10))
    b = gen_qlists(p, random.Random(10))
    for x, y in zip(a.lists, b.lists):
        assert np.array_equal(x, y)


def test_gen_qlists_uniform_spec():
    spec = UniformQuerySpec(r=16, Q=8, R=128)
    ql = gen_qlists(spec, random.Random(11))
    assert len(ql.lists) == 16 and all(len(l) == 8 for l in ql.lists)
    assert ql.cap == overlap_cap(16, 8, 128) == 24
    assert ql.counts.max() <= 24


def test_gen_qlists_adversarial_rng_exhausts():
    class Rigged:
        def randrange(self, n):
            return 0  # every draw lands on position 0

    spec = UniformQuerySpec(r=64, Q=8, R=2048)  # cap = ceil(3*64*64/2048) = 6
    assert overlap_cap(64, 8, 2048) == 6
    with pytest.raises(ResampleExhausted):
        gen_qlists(spec, Rigged())


def test_query_smoothness_check():
    p = toy_params()
    rng = random.Random(12)
    rep = query_smoothness_check(p, trials=800, rng=rng)
    bound = rep["bound"]
    assert rep["mean_freq"] <= bound
    sd = (float(bound) * (1 - float(bound)) / 800) ** 0.5
    assert float(rep["max_freq"]) <= float(bound) + 5 * sd
