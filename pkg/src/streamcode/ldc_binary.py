"""Binary locally decodable code: Reed-Muller over GF(2^b) concatenated with a
small binary inner code, plus its two local decoders.

Encoding packs b message bits per field symbol, places the symbols at the
systematic points of the Reed-Muller code, and re-encodes every evaluation
with the inner code, so one codeword bit is addressed as
(block, offset) = (RM point index, inner position).

Local decoding samples degree-2 curves through the target point and reads the
inner blocks along each curve; the restriction of the big code to a curve is a
small Reed-Solomon/inner concatenation that the codes layer can decode.  Two
decoders share that machinery:

- smooth_local_decode: t_smooth curves, unique decoding per curve, and an
  exact confidence pair (p0, p1) with p0 + p1 == 1 (Fractions throughout).
- decode_with_advice: t_advice iterations of higher-degree curves pinned at
  uncorrupted advice blocks, exhaustive list decoding, advice filtering, and
  a majority vote; raises AdviceMismatch when no iteration ever produces a
  unique surviving candidate.

Every decoder is split into a plan-sampling half (which positions to read)
and a value-consuming half, so single-pass stream drivers can schedule reads
without random access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .gf import GF, FieldSpec, pack_symbols, poly_eval, poly_interpolate, unpack_symbol
from .codes import (
    LinearCode, codebook, concat, list_decode_concat, make_systematic,
    rm_code, rs_code, unique_decode, word_dist2,
)


class AdviceMismatch(Exception):
    """No advice-decode iteration produced a unique surviving candidate."""


@dataclass
class Confidence:
    """Exact posterior-style weights for one bit; p0 + p1 == 1 always."""

    p0: Fraction
    p1: Fraction

    def __post_init__(self):
        assert self.p0 + self.p1 == 1, "confidence weights must sum to one"

    def best(self) -> int:
        return 1 if self.p1 > self.p0 else 0


@dataclass
class AdvicePositions:
    """k_adv uniformly chosen RM points, expanded to whole inner blocks."""

    rm_points: tuple
    positions: tuple  # codeword bit indices, block-major


@dataclass
class BinaryLdcParams:
    F: FieldSpec            # Reed-Muller alphabet, q = 2^b
    m: int                  # number of variables
    d: int                  # total degree bound
    inner: LinearCode       # binary inner code with msg_len == b
    n: int                  # message length in bits
    eps: Fraction
    t_smooth: int = 3
    t_advice: int = 3
    k_adv: int = 1

    def __post_init__(self):
        self.eps = Fraction(self.eps)
        b = self.F.k
        if self.inner.msg_len != b:
            raise ValueError("inner code must encode one field symbol (b bits)")
        if self.inner.field.k != 1:
            raise ValueError("inner code must be binary")
        if self.inner.systematic_positions is None:
            raise ValueError("inner code must be systematic")
        if not 0 < self.d < self.F.q:
            raise ValueError("need 0 < d < q")
        if self.n > self.capacity_bits:
            raise ValueError(f"message too long: {self.n} > capacity {self.capacity_bits}")
        if self.advice_size > self.t_advice * (self.F.q - 1) * self.inner.code_len:
            raise ValueError("advice larger than the advice-decoder query budget")
        self.rm = make_systematic(rm_code(self.F, self.m, self.d))
        # restriction of the code to a degree-c curve: RS on F* of degree c*d
        self.curve_code = concat(rs_code(self.F, self.nonzero_points, 2 * self.d + 1), self.inner)
        self.advice_code = concat(
            rs_code(self.F, self.nonzero_points, self.k_adv * self.d + 1), self.inner)
        # bit layout of a symbol (slot j of the packing), as a (q, b) table
        self.bits_of_sym = np.array(
            [unpack_symbol(GF(1), self.F, s) for s in range(self.F.q)], dtype=np.int32)
        cb = codebook(self.inner)
        self._inner_lookup = {
            bytes(cb.words[i].astype(np.uint8)): pack_symbols(GF(1), self.F, cb.msg_of_index(i))
            for i in range(self.inner.msg_space)}

    # -- derived sizes ------------------------------------------------------

    @property
    def b(self) -> int:
        return self.F.k

    @property
    def nonzero_points(self):
        return list(range(1, self.F.q))

    @property
    def capacity_syms(self) -> int:
        return math.comb(self.d + self.m, self.m)

    @property
    def capacity_bits(self) -> int:
        return self.capacity_syms * self.b

    @property
    def num_blocks(self) -> int:
        return self.F.q ** self.m

    @property
    def block_len(self) -> int:
        return self.inner.code_len

    @property
    def code_len(self) -> int:
        return self.num_blocks * self.block_len

    @property
    def advice_size(self) -> int:
        return self.k_adv * self.inner.code_len

    @property
    def queries_smooth(self) -> int:
        return self.t_smooth * (self.F.q - 1) * self.inner.code_len

    def point_coords(self, p: int) -> tuple:
        q = self.F.q
        return tuple((p // q ** (self.m - 1 - a)) % q for a in range(self.m))

    def point_index(self, coords) -> int:
        q = self.F.q
        p = 0
        for c in coords:
            p = p * q + int(c)
        return p

    def bit_position(self, i: int) -> int:
        """Codeword position where message bit i reads back (systematic)."""
        j, r = divmod(i, self.b)
        return self.rm.systematic_positions[j] * self.block_len + \
            self.inner.systematic_positions[r]

    def describe(self) -> dict:
        return {"q": self.F.q, "m": self.m, "d": self.d, "n": self.n,
                "eps": str(self.eps), "inner": self.inner.describe(),
                "code_len": self.code_len, "t_smooth": self.t_smooth,
                "t_advice": self.t_advice, "k_adv": self.k_adv}


# ---------------------------------------------------------------------------
# encoding

def ldc_encode(params: BinaryLdcParams, x) -> np.ndarray:
    """Encode n message bits into the full binary codeword."""
    x = np.asarray(x, dtype=np.int32)
    if x.shape != (params.n,):
        raise ValueError(f"message must be {params.n} bits")
    b = params.b
    padded = np.zeros(params.capacity_bits, dtype=np.int32)
    padded[:params.n] = x
    syms = np.array([pack_symbols(GF(1), params.F, padded[j * b:(j + 1) * b])
                     for j in range(params.capacity_syms)], dtype=np.int32)
    evals = params.rm.encode(syms)
    bitmat = params.bits_of_sym[evals]                       # (blocks, b)
    blocks = (bitmat @ params.inner.gen.T) % 2               # (blocks, N_inner)
    return blocks.reshape(-1).astype(np.int32)


# ---------------------------------------------------------------------------
# smooth local decoding

@dataclass
class CurvePlan:
    blocks: list          # block index per lambda (lambda = 1..q-1 in order)
    positions: np.ndarray  # all codeword bit positions, lambda-major


@dataclass
class SmoothPlan:
    v0: tuple             # curve base point (coordinates)
    offset: int           # inner position of the target bit
    curves: list          # t_smooth CurvePlans

    @property
    def positions(self) -> np.ndarray:
        return np.concatenate([c.positions for c in self.curves])


def _curve_blocks(params: BinaryLdcParams, coord_polys) -> list:
    return [params.point_index([poly_eval(params.F, cp, lam) for cp in coord_polys])
            for lam in params.nonzero_points]


def _block_positions(params: BinaryLdcParams, blocks) -> np.ndarray:
    L = params.block_len
    return np.concatenate([np.arange(p * L, (p + 1) * L) for p in blocks])


def sample_smooth_plan(params: BinaryLdcParams, i: int, rng,
                       index: str = "message") -> SmoothPlan:
    """Plan t_smooth random degree-2 curves through the point that carries
    index i (a message bit by default, a raw codeword bit with index="codeword")."""
    if index == "message":
        block = params.rm.systematic_positions[i // params.b]
        offset = params.inner.systematic_positions[i % params.b]
    elif index == "codeword":
        block, offset = divmod(i, params.block_len)
    else:
        raise ValueError("index must be 'message' or 'codeword'")
    v0 = params.point_coords(block)
    q = params.F.q
    curves = []
    for _ in range(params.t_smooth):
        v1 = [rng.randrange(q) for _ in range(params.m)]
        v2 = [rng.randrange(q) for _ in range(params.m)]
        coord_polys = [[v0[a], v1[a], v2[a]] for a in range(params.m)]
        blocks = _curve_blocks(params, coord_polys)
        curves.append(CurvePlan(blocks, _block_positions(params, blocks)))
    return SmoothPlan(v0, offset, curves)


def decode_curve_word(params: BinaryLdcParams, code: LinearCode, word):
    """Unique-decode one curve restriction; (h coefficients, dist2) or None."""
    msg = unique_decode(code, word)
    if msg is None:
        return None
    b = params.b
    coeffs = [pack_symbols(GF(1), params.F, msg[j * b:(j + 1) * b])
              for j in range(code.msg_len // b)]
    d2 = word_dist2(word, code.encode(msg))
    return coeffs, d2


def smooth_confidence_from_words(params: BinaryLdcParams, plan: SmoothPlan,
                                 words) -> Confidence:
    """Fold per-curve unique decodings into the exact (p0, p1) pair."""
    t = params.t_smooth
    L = 2 * params.curve_code.code_len  # dist2 denominator
    acc = {0: Fraction(0), 1: Fraction(0)}
    for word in words:
        got = decode_curve_word(params, params.curve_code, word)
        if got is None:
            acc[0] += Fraction(1, 4)
            acc[1] += Fraction(1, 4)
            continue
        coeffs, d2 = got
        h0 = coeffs[0] if coeffs else 0
        bit = int(params.inner.encode(params.bits_of_sym[h0])[plan.offset])
        delta = Fraction(d2, L)
        acc[bit] += delta
        acc[1 - bit] += Fraction(1, 2) - delta
    # p(b) collects the evidence against 1-b
    return Confidence(p0=Fraction(2, t) * acc[1], p1=Fraction(2, t) * acc[0])


def gather(oracle, positions) -> np.ndarray:
    if isinstance(oracle, np.ndarray):
        return oracle[positions]
    return np.array([oracle[int(p)] for p in positions], dtype=np.int32)


def smooth_local_decode(oracle, i: int, params: BinaryLdcParams, rng,
                        index: str = "message") -> Confidence:
    plan = sample_smooth_plan(params, i, rng, index=index)
    words = [gather(oracle, c.positions) for c in plan.curves]
    return smooth_confidence_from_words(params, plan, words)


# ---------------------------------------------------------------------------
# advice decoding

def sample_advice(params: BinaryLdcParams, rng) -> AdvicePositions:
    """k_adv independent uniform RM points, expanded to whole inner blocks."""
    points = tuple(rng.randrange(params.num_blocks) for _ in range(params.k_adv))
    L = params.block_len
    positions = tuple(int(p) * L + o for p in points for o in range(L))
    return AdvicePositions(points, positions)


@dataclass
class AdviceIterationPlan:
    nodes: list           # distinct nonzero lambdas pinning the advice points
    coord_polys: list
    positions: np.ndarray


@dataclass
class AdvicePlan:
    target_block: int
    offset: int
    iterations: list


def sample_advice_plan(params: BinaryLdcParams, i: int, adv: AdvicePositions,
                       rng, index: str = "message") -> AdvicePlan:
    if index == "message":
        block = params.rm.systematic_positions[i // params.b]
        offset = params.inner.systematic_positions[i % params.b]
    elif index == "codeword":
        block, offset = divmod(i, params.block_len)
    else:
        raise ValueError("index must be 'message' or 'codeword'")
    v0 = params.point_coords(block)
    anchors = [params.point_coords(p) for p in adv.rm_points]
    its = []
    for _ in range(params.t_advice):
        nodes = rng.sample(params.nonzero_points, params.k_adv)
        coord_polys = []
        for a in range(params.m):
            pts = [(0, v0[a])] + [(nodes[l], anchors[l][a]) for l in range(params.k_adv)]
            coord_polys.append(poly_interpolate(params.F, pts))
        blocks = _curve_blocks(params, coord_polys)
        its.append(AdviceIterationPlan(nodes, coord_polys,
                                       _block_positions(params, blocks)))
    return AdvicePlan(block, offset, its)


def advice_symbols(params: BinaryLdcParams, adv_values) -> list:
    """Decode each advice block of bits to its field symbol by exact codebook
    lookup; an invalid block gives None (and will fail every candidate)."""
    L = params.block_len
    vals = np.asarray(adv_values, dtype=np.uint8)
    out = []
    for l in range(params.k_adv):
        out.append(params._inner_lookup.get(bytes(vals[l * L:(l + 1) * L])))
    return out


def decode_advice_from_words(params: BinaryLdcParams, plan: AdvicePlan,
                             words, adv_values) -> int:
    syms = advice_symbols(params, adv_values)
    votes = []
    b = params.b
    for it, word in zip(plan.iterations, words):
        cands = list_decode_concat(params.advice_code, word, params.eps)
        survivors = []
        for msg, _ in cands:
            coeffs = [pack_symbols(GF(1), params.F, msg[j * b:(j + 1) * b])
                      for j in range(params.advice_code.msg_len // b)]
            if all(s is not None and poly_eval(params.F, coeffs, lam) == s
                   for lam, s in zip(it.nodes, syms)):
                survivors.append(msg)
        if len(survivors) == 1:
            msg = survivors[0]
            votes.append(int(params.inner.encode(msg[:b])[plan.offset]))
    if not votes:
        raise AdviceMismatch(
            f"no unique candidate in any of {params.t_advice} iterations")
    ones = sum(votes)
    return 1 if ones * 2 > len(votes) else 0


def decode_with_advice(oracle, i: int, adv: AdvicePositions, adv_values,
                       params: BinaryLdcParams, rng, index: str = "message") -> int:
    """Recover bit i given the true bits at the advice positions.  Raises
    AdviceMismatch when the advice never pins down a unique candidate."""
    plan = sample_advice_plan(params, i, adv, rng, index=index)
    words = [gather(oracle, it.positions) for it in plan.iterations]
    return decode_advice_from_words(params, plan, words, adv_values)


# ---------------------------------------------------------------------------
# asymptotic parameter relations (documentation/validation only)

def asymptotic_regime(n: int, eps: Fraction) -> dict:
    """The asymptotic parameter relations behind the construction, for a
    query budget Q: q ~ sqrt(Q), d ~ eps^6 sqrt(Q)/4, m ~ log n / log d, with
    t_smooth ~ Q^(1/3), t_advice ~ sqrt(Q), k_adv = ceil(1/eps).  Returned for
    inspection; desk-scale profiles override all of them."""
    eps = Fraction(eps)
    Q = max(16, math.ceil((math.log(max(n, 2)) / float(eps)) ** 6))
    q = 1 << max(1, math.ceil(math.log2(math.sqrt(Q))))
    d = max(1, math.floor(float(eps) ** 6 * math.sqrt(Q) / 4))
    m = max(1, math.ceil(math.log(max(n, 2)) / math.log(max(d, 2) + 1)))
    return {"Q": Q, "q": q, "d": d, "m": m,
            "t_smooth": max(1, round(Q ** (1 / 3))),
            "t_advice": max(1, round(math.sqrt(Q))),
            "k_adv": math.ceil(1 / float(eps))}
