"""Tensor-power stream codec for linear functions of the message.

The encoder views the n-bit message as a depth-d tensor over K, applies the
large-alphabet locally decodable code along every axis, and protects each
K-symbol with a small binary code (one block of N_inner bits per symbol,
blocks in lexicographic tuple order).

The decoder computes one K-linear functional of the message from the
(possibly corrupted) stream.  recurse_linear works on a tuple T of block
indices: at the base it decodes one inner block to a symbol sigma and keeps
it with probability 1 - 2*delta(block, encoding of sigma); at level a it
restricts the functional to each first-axis message index i, recursively
evaluates the children queried by that index's smooth-decoding plan, runs the
confidence decoder over the returned values, and returns sigma_1 + ... + sigma_r
with probability min_i p_i (anything else is ⊥).

Sharing discipline across the parallel instances of linear_dec:
  - base blocks: one decode and one acceptance coin, cached per block tuple —
    instances never disagree on a block's sigma/⊥ outcome;
  - level-1 nodes: their (value, p) pair is a deterministic function of the
    shared base outcomes and the per-level query lists, so it is computed once
    and cached; every instance still draws its own acceptance coin on it;
  - levels above 1 (and the roots): fully per-instance, coins included.
Query lists are generated once per level and reused by all instances, which
is what keeps the live-tuple count under cap^depth (cap = ceil(3 r Q^2 / R)).

The desk-scale driver materializes the received word with a single in-order
read and bounds the lockstep footprint through the structural live-tuple
counter rather than a bit ledger.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .gf import ERASE, GF, FieldSpec, field_mul, mul_lut, pack_symbols, unpack_symbol
from .codes import LinearCode, codebook, concat, repetition_code
from .ldc_large import (LargeLdcParams, QueryLists, confidence_from_words_large,
                        gen_qlists, overlap_cap)
from .stream import SymbolStream


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class TupleIndex:
    """Digit sequence addressing a tensor block (or message cell); lexicographic
    order on digits equals stream order of the addressed segment."""

    digits: tuple

    def flat(self, base: int) -> int:
        out = 0
        for t in self.digits:
            out = out * base + int(t)
        return out

    def child(self, j: int) -> "TupleIndex":
        return TupleIndex(self.digits + (int(j),))


def flat_to_tuple(index: int, base: int, length: int) -> tuple:
    digits = []
    for _ in range(length):
        index, rem = divmod(index, base)
        digits.append(rem)
    return tuple(reversed(digits))


@dataclass
class LinearFunctional:
    """Coefficient vector over K for a prefix of message indices; restriction
    to a first digit i is the contiguous lexicographic slice."""

    K: FieldSpec
    coeffs: np.ndarray
    path: tuple = ()

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int32)

    def restrict(self, i: int, r: int) -> "LinearFunctional":
        sub = len(self.coeffs) // r
        return LinearFunctional(self.K, self.coeffs[i * sub:(i + 1) * sub],
                                self.path + (i,))

    @property
    def scalar(self) -> int:
        assert len(self.coeffs) == 1
        return int(self.coeffs[0])


def base_symbol_code(K: FieldSpec) -> LinearCode:
    """Binary code protecting one K-symbol at the bottom of the tensor stack.

    For two-bit symbols this is an [8,2,5] code: unique decoding then succeeds
    up to two flips, i.e. through relative distance 1/4, which the acceptance
    coin 1 - 2*delta turns into a 1/2 keep rate at delta = 1/4.  One-bit
    symbols get the [4,1,4] repetition code.
    """
    if K.k == 1:
        return repetition_code(GF(1), 4)
    if K.k == 2:
        gen = np.array([[1, 0, 1, 1, 1, 1, 0, 0],
                        [0, 1, 0, 1, 1, 1, 1, 1]], dtype=np.int32).T
        return LinearCode(field=GF(1), gen=gen, kind="symbol-shield",
                          systematic_positions=(0, 1), dist2_bound=10)
    raise ValueError(f"no base code pinned for {K.k}-bit symbols")


@dataclass
class TensorParams:
    ldc: LargeLdcParams        # per-axis code K^r -> K^R
    depth: int                 # tensor power d
    n: int                     # message bits; must equal r^depth
    base_code: LinearCode      # binary shield, one K-symbol per block
    instances: int | None = None  # parallel decoders (default desk-scale rule)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.ldc.r != self.ldc.capacity_syms:
            raise ValueError("axis code must carry exactly its capacity "
                             "(no per-axis padding)")
        if self.n != self.ldc.r ** self.depth:
            raise ValueError(f"need n = r^depth = {self.ldc.r ** self.depth}")
        if self.base_code.field.k != 1:
            raise ValueError("base code must be binary")
        if self.base_code.msg_len != self.ldc.K.k:
            raise ValueError("base code must encode one K-symbol")
        if self.instances is None:
            self.instances = default_instances(self.n)
        self.axis_code = concat(self.ldc.rm, self.ldc.inner)
        assert self.axis_code.msg_len == self.ldc.r
        assert self.axis_code.code_len == self.R

    @property
    def K(self) -> FieldSpec:
        return self.ldc.K

    @property
    def r(self) -> int:
        return self.ldc.r

    @property
    def R(self) -> int:
        return self.ldc.code_len

    @property
    def Q(self) -> int:
        return self.ldc.queries

    @property
    def N_inner(self) -> int:
        return self.base_code.code_len

    @property
    def cap(self) -> int:
        return overlap_cap(self.r, self.Q, self.R)

    @property
    def code_bits(self) -> int:
        return self.N_inner * self.R ** self.depth

    def describe(self) -> dict:
        return {
            "axis": self.ldc.describe(),
            "depth": self.depth,
            "n": self.n,
            "r": self.r, "R": self.R, "Q": self.Q,
            "N_inner": self.N_inner,
            "cap": self.cap,
            "code_bits": self.code_bits,
            "instances": self.instances,
        }


def default_instances(n: int) -> int:
    return min(49, max(9, math.ceil(math.log2(n)) ** 2))


def tensor_regime(n: int, eps: Fraction, s: int) -> dict:
    """Parameter relations of the construction at scale: axis arity from the
    space budget, depth from the message length, per-level error share."""
    r = round(s ** 0.2)
    d = math.ceil(math.log(n) / math.log(r))
    return {"r": r, "depth": d, "eps_prime": Fraction(eps) / (10 * d),
            "instances": default_instances(n)}


# ---------------------------------------------------------------------------
# encoding

def _apply_axis(K: FieldSpec, gen: np.ndarray, arr: np.ndarray,
                axis: int) -> np.ndarray:
    arr = np.moveaxis(arr, axis, 0)
    out = np.zeros((gen.shape[0],) + arr.shape[1:], dtype=np.int32)
    for j in range(gen.shape[0]):
        acc = np.zeros(arr.shape[1:], dtype=np.int32)
        for i in range(gen.shape[1]):
            g = int(gen[j, i])
            if g:
                acc ^= mul_lut(K, g)[arr[i]]
        out[j] = acc
    return np.moveaxis(out, 0, axis)


def tensor_encode(code: LinearCode, d: int, x, axis_order=None) -> np.ndarray:
    """Apply the code along each of the d axes of the message tensor; the
    result is flattened in lexicographic (row-major) tuple order."""
    K = code.field
    r, R = code.msg_len, code.code_len
    x = np.asarray(x, dtype=np.int32)
    if x.size != r ** d:
        raise ValueError(f"message must have {r ** d} symbols")
    if d == 0:
        return x.copy()
    if axis_order is None:
        axis_order = range(d)
    arr = x.reshape((r,) * d)
    for axis in axis_order:
        arr = _apply_axis(K, code.gen, arr, axis)
    if arr.shape != (R,) * d:
        raise ValueError("axis_order must visit every axis exactly once")
    return arr.ravel()


def _symbol_bit_words(params: TensorParams) -> np.ndarray:
    tbl = getattr(params, "_sym_words", None)
    if tbl is None:
        K = params.K
        tbl = np.array([params.base_code.encode(
            np.array(unpack_symbol(GF(1), K, s), dtype=np.int32))
            for s in range(K.q)], dtype=np.int32)
        params._sym_words = tbl
    return tbl


def enc_linear(params: TensorParams, x) -> np.ndarray:
    """n message bits -> N_inner * R^depth codeword bits."""
    x = np.asarray(x, dtype=np.int32)
    if len(x) != params.n:
        raise ValueError(f"message must have {params.n} bits")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("message bits must be 0/1")
    syms = tensor_encode(params.axis_code, params.depth, x)
    return _symbol_bit_words(params)[syms].ravel()


# ---------------------------------------------------------------------------
# decoding

def _coin(rng, p: Fraction) -> bool:
    if p >= 1:
        return True
    if p <= 0:
        return False
    return rng.randrange(p.denominator) < p.numerator


def _base_tables(params: TensorParams):
    """Exhaustive decode table for the base code: word index -> (symbol or -1,
    dist2)."""
    tbl = getattr(params, "_base_tbl", None)
    if tbl is None:
        N = params.N_inner
        if N > 16:
            raise ValueError("base decode table capped at 16-bit blocks")
        cb = codebook(params.base_code)
        bits = (np.arange(1 << N)[:, None] >> np.arange(N)) & 1
        d2 = 2 * (bits[:, None, :] != cb.words[None, :, :]).sum(axis=2)
        best = np.argmin(d2, axis=1)
        best_d2 = d2[np.arange(1 << N), best]
        radius2 = (params.base_code.dist2_bound - 1) // 2
        syms = np.array([pack_symbols(GF(1), params.K, cb.msg_of_index(int(i)))
                         for i in best], dtype=np.int32)
        syms[best_d2 > radius2] = -1
        tbl = (syms, best_d2.astype(np.int64))
        params._base_tbl = tbl
    return tbl


def _base_outcome(params: TensorParams, key: tuple, block_bits, rng,
                  base_cache: dict):
    """Shared symbol/⊥ outcome of one base block: unique decode, then one
    acceptance coin at probability 1 - 2*delta; cached per block tuple."""
    if key in base_cache:
        return base_cache[key]
    syms, d2s = _base_tables(params)
    idx = int(np.dot(np.asarray(block_bits, dtype=np.int64),
                     1 << np.arange(params.N_inner, dtype=np.int64)))
    sym, d2 = int(syms[idx]), int(d2s[idx])
    if sym < 0:
        out = None
    else:
        out = sym if _coin(rng, 1 - Fraction(d2, params.N_inner)) else None
    base_cache[key] = out
    return out


def recurse_linear(params: TensorParams, a: int, segment, T: tuple,
                   ell: LinearFunctional, qlists: dict, rng,
                   base_cache: dict, node_cache: dict | None = None):
    """Value of the functional ell on the message behind this stream segment,
    or None (⊥).  a is the remaining depth; T the block tuple addressed so
    far; qlists maps each remaining depth to its per-index query lists."""
    if a == 0:
        out = _base_outcome(params, T, segment, rng, base_cache)
        if out is None:
            return None
        return field_mul(params.K, ell.scalar, out)
    key = (T, ell.path)
    cached = node_cache.get(key) if (node_cache is not None and a == 1) else None
    if cached is None:
        value, p = _node_value(params, a, segment, T, ell, qlists, rng,
                               base_cache, node_cache)
        if node_cache is not None and a == 1:
            node_cache[key] = (value, p)
    else:
        value, p = cached
    if value is None:
        return None
    return value if _coin(rng, p) else None


def _node_value(params: TensorParams, a: int, segment, T: tuple,
                ell: LinearFunctional, qlists: dict, rng,
                base_cache: dict, node_cache: dict | None):
    """(sigma_1 + ... + sigma_r, min_i p_i) before the acceptance coin, or
    (None, 0) when any index yields no field-symbol mass at all."""
    ldc = params.ldc
    R = params.R
    sub = len(segment) // R
    ql: QueryLists = qlists[a]
    total = 0
    p_min = Fraction(1)
    for i in range(params.r):
        child_ell = ell.restrict(i, params.r)
        values = {}
        for j in sorted({int(p) for p in ql.lists[i]}):
            values[j] = recurse_linear(params, a - 1,
                                       segment[j * sub:(j + 1) * sub],
                                       T + (j,), child_ell, qlists, rng,
                                       base_cache, node_cache)
        plan = ql.plans[i]
        words = [np.array([ERASE if values[int(j)] is None else values[int(j)]
                           for j in cv.positions], dtype=np.int32)
                 for cv in plan.curves]
        sigma, p_sig, _ = confidence_from_words_large(ldc, plan, words).merged()
        if sigma is None:
            return None, Fraction(0)
        total ^= sigma
        p_min = min(p_min, p_sig)
    return total, p_min


def lift_functional(params: TensorParams, ell_bits) -> LinearFunctional:
    ell_bits = np.asarray(ell_bits, dtype=np.int32)
    if len(ell_bits) != params.n:
        raise ValueError(f"functional must have {params.n} coefficients")
    if not np.all((ell_bits == 0) | (ell_bits == 1)):
        raise ValueError("functional coefficients must be 0/1")
    return LinearFunctional(params.K, ell_bits)


def functional_dot(ell_bits, x_bits) -> int:
    """Ground truth ell . x over GF(2)."""
    return int(np.bitwise_and(np.asarray(ell_bits, dtype=np.int32),
                              np.asarray(x_bits, dtype=np.int32)).sum() & 1)


def linear_dec_traced(params: TensorParams, stream: SymbolStream, ell_bits,
                      rng) -> tuple:
    """(majority bit, diagnostics).  One in-order read of the stream; shared
    query lists, base outcomes and level-1 nodes; per-instance coins."""
    d = params.depth
    word = np.asarray(stream.read_run(params.code_bits), dtype=np.int32)
    ell = lift_functional(params, ell_bits)
    qlists = {a: gen_qlists(params.ldc, rng) for a in range(d, 0, -1)}
    seeds = [rng.randrange(2 ** 63) for _ in range(params.instances)]

    # lockstep live-tuple footprint: at depth j a block tuple is live for one
    # (functional path) per query list containing each of its digits
    live_max, live_cap, prod = {}, {}, 1
    for depth_j, a in enumerate(range(d, 0, -1), start=1):
        prod *= int(qlists[a].counts.max())
        live_max[depth_j] = prod
        live_cap[depth_j] = params.cap ** depth_j

    # shared base outcomes, drawn in stream order (fixed coin schedule)
    base_cache: dict = {}
    needed = [sorted({int(p) for lst in qlists[a].lists for p in lst})
              for a in range(d, 0, -1)]
    Ni = params.N_inner
    keys = list(_lex_product(needed))
    flats = np.array([[sum(j * params.R ** (d - 1 - u) for u, j in enumerate(k))]
                      for k in keys], dtype=np.int64)
    blocks = word[(flats * Ni + np.arange(Ni)).reshape(len(keys), Ni)]
    syms_tbl, d2_tbl = _base_tables(params)
    idxs = blocks.astype(np.int64) @ (1 << np.arange(Ni, dtype=np.int64))
    best_sym, best_d2 = syms_tbl[idxs], d2_tbl[idxs]
    for key, sym, d2 in zip(keys, best_sym, best_d2):
        sym, d2 = int(sym), int(d2)
        if sym < 0:
            base_cache[key] = None
        elif d2 == 0:
            base_cache[key] = sym
        else:
            accept = _coin(rng, 1 - Fraction(d2, Ni))
            base_cache[key] = sym if accept else None

    node_cache: dict = {}
    votes, bots = [], 0
    for seed in seeds:
        inst_rng = random.Random(seed)
        val = recurse_linear(params, d, word, (), ell, qlists, inst_rng,
                             base_cache, node_cache)
        if val is None:
            bots += 1
            votes.append(inst_rng.randrange(2))
        else:
            votes.append(val & 1)
    bit = 1 if sum(votes) * 2 > len(votes) else 0
    diag = {
        "votes": votes,
        "bot_instances": bots,
        "live_max": live_max,
        "live_cap": live_cap,
        "live_ok": all(live_max[j] <= live_cap[j] for j in live_max),
        "base_blocks": len(base_cache),
        "level1_nodes": len(node_cache),
        "qlist_cap": params.cap,
    }
    return bit, diag


def _lex_product(needed_per_level: list):
    if not needed_per_level:
        yield ()
        return
    head, *rest = needed_per_level
    for j in head:
        for tail in _lex_product(rest):
            yield (j,) + tail


def linear_dec(params: TensorParams, stream: SymbolStream, ell_bits,
               rng) -> int:
    return linear_dec_traced(params, stream, ell_bits, rng)[0]
