"""Independent brute-force verification of the code backends.

The decoder here never reuses the backends' recovery algebra.  It treats an
encoder as a black box: probing with unit inputs extracts the GF(2) transfer
matrix from data bits to derived bits (parity streams, plus the horizontal
column for GRDP), and erased symbols are then found by Gaussian elimination
over the bit-expanded equations.  The same machinery answers erasure-pattern
solvability questions, and the secrecy auditor certifies perfect secrecy by
exact counting over every assignment of the random symbols.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .codes import Backend, CodeParams, encode_grdp, _syndrome_parities
from .errors import (
    DuplicatePosition,
    NotUnique,
    OutOfRange,
    ParamMismatch,
    TooLargeToEnumerate,
)

ENUMERATION_CAP = 1 << 30


# -- generic GF(2) solving ------------------------------------------------------

@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix; bits[i] is row i as an integer bitmask."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise ParamMismatch("matrix dimensions must be positive")
        if len(self.bits) != self.rows:
            raise ParamMismatch(f"expected {self.rows} rows, got {len(self.bits)}")
        for row in self.bits:
            if row >> self.cols:
                raise ParamMismatch("row has bits beyond the declared width")


@dataclass(frozen=True)
class GF2Solution:
    """Outcome of gf2_solve: status is 'unique', 'underdetermined' or 'inconsistent'.

    ``solution`` is a particular solution (None when inconsistent) and
    ``free_vars`` counts the unconstrained columns.
    """

    status: str
    solution: tuple[int, ...] | None
    rank: int
    free_vars: int


def gf2_solve(a: BitMatrix, b: Sequence[int]) -> GF2Solution:
    """Gaussian elimination for A x = b over GF(2)."""
    if len(b) != a.rows:
        raise ParamMismatch(f"rhs length {len(b)} != rows {a.rows}")
    rows = [(a.bits[i], b[i] & 1) for i in range(a.rows)]
    pivots: dict[int, tuple[int, int]] = {}
    inconsistent = False
    for mask, rhs in rows:
        while mask:
            bit = mask & -mask
            piv = pivots.get(bit)
            if piv is None:
                break
            mask ^= piv[0]
            rhs ^= piv[1]
        if mask:
            pivots[mask & -mask] = (mask, rhs)
        elif rhs:
            inconsistent = True
    rank = len(pivots)
    free_vars = a.cols - rank
    if inconsistent:
        return GF2Solution("inconsistent", None, rank, free_vars)
    # Particular solution with free variables set to zero, by back-substitution
    # over pivot bits in descending order.
    solution = [0] * a.cols
    for bit in sorted(pivots, reverse=True):
        mask, rhs = pivots[bit]
        col = bit.bit_length() - 1
        acc = rhs
        rest = mask ^ bit
        while rest:
            hb = rest & -rest
            acc ^= solution[hb.bit_length() - 1]
            rest ^= hb
        solution[col] = acc
    status = "unique" if free_vars == 0 else "underdetermined"
    return GF2Solution(status, tuple(solution), rank, free_vars)


# -- bit layout of symbols and derived streams -----------------------------------

def _symbol_bits(cp: CodeParams) -> int:
    if cp.backend is Backend.RS:
        return cp.field.m
    return (cp.field.p - 1) * cp.field.lane_bits


def _sym_to_int(cp: CodeParams, sym) -> int:
    if cp.backend is Backend.RS:
        return sym
    acc = 0
    width = cp.field.lane_bits
    for i in range(cp.field.p - 1):
        acc |= sym[i] << (i * width)
    return acc


def _int_to_sym(cp: CodeParams, value: int):
    if cp.backend is Backend.RS:
        return value
    width = cp.field.lane_bits
    mask = cp.field.lane_mask
    lanes = tuple((value >> (i * width)) & mask for i in range(cp.field.p - 1))
    return lanes + (0,)


def _free_positions(cp: CodeParams) -> range:
    """Positions whose symbols are free inputs to the encoder."""
    if cp.backend is Backend.GRDP:
        return range(cp.k - 1)  # column p-1 is derived
    return range(cp.k)


def _derived_streams(cp: CodeParams, data: Sequence) -> tuple:
    """Everything the encoder derives from the free data symbols.

    RS/EVENODD: the r parities.  GRDP: the horizontal column followed by the
    r-1 slope parities.
    """
    if cp.backend is Backend.GRDP:
        horizontal, slopes = encode_grdp(cp, data)
        return (horizontal,) + slopes
    return _syndrome_parities(cp, data)


@lru_cache(maxsize=None)
def _probe_matrix(cp: CodeParams) -> tuple[int, ...]:
    """Row d = GF(2) dependence of derived bit d on the free data bits."""
    sb = _symbol_bits(cp)
    free = list(_free_positions(cp))
    n_streams = cp.r  # GRDP: 1 horizontal + (r-1) slopes = r streams
    rows = [0] * (n_streams * sb)
    zero = _int_to_sym(cp, 0)
    for fi, pos in enumerate(free):
        for t in range(sb):
            data = [zero] * len(free)
            data[pos] = _int_to_sym(cp, 1 << t)
            streams = _derived_streams(cp, data)
            col = fi * sb + t
            for s, sym in enumerate(streams):
                bits = _sym_to_int(cp, sym)
                while bits:
                    b = bits & -bits
                    rows[s * sb + (b.bit_length() - 1)] |= 1 << col
                    bits ^= b
    return tuple(rows)


# -- pattern solver ---------------------------------------------------------------

class _PatternSolver:
    """Bit-level solver for one erasure pattern of one code.

    Equations: every observable derived bit equals its probe row applied to
    the data bits.  Known data bits move to the right-hand side; the unknown
    side is Jordan-reduced once, tracking which original equations combine
    into each unknown, so repeated decodes only re-evaluate right-hand sides.
    """

    def __init__(self, cp: CodeParams, erased: tuple[int, ...]):
        self.cp = cp
        self.erased = erased
        sb = _symbol_bits(cp)
        self.sb = sb
        free = list(_free_positions(cp))
        self.free = free
        known_free = [pos for pos in free if pos not in erased]
        self.known_free = known_free
        self.unknown_free = [pos for pos in free if pos in erased]
        unknown_cols = {}
        for pos in self.unknown_free:
            fi = free.index(pos)
            for t in range(sb):
                unknown_cols[fi * sb + t] = len(unknown_cols)
        self.n_unknowns = len(unknown_cols)
        known_mask = 0
        for pos in known_free:
            known_mask |= ((1 << sb) - 1) << (free.index(pos) * sb)
        probe = _probe_matrix(cp)
        # Observable streams: all parities; for GRDP the horizontal stream only
        # when column p-1 survived.
        self.grdp = cp.backend is Backend.GRDP
        self.horizontal_observed = self.grdp and (cp.k - 1) not in erased
        obs_rows = []
        if self.grdp:
            if self.horizontal_observed:
                obs_rows.extend(("h", t) for t in range(sb))
            obs_rows.extend(
                ("s", s * sb + t) for s in range(1, cp.r) for t in range(sb))
        else:
            obs_rows.extend(("s", s * sb + t) for s in range(cp.r) for t in range(sb))
        self.obs_rows = obs_rows
        rows = []
        self.known_masks = []
        for kind, d in obs_rows:
            # The horizontal column is derived stream 0, so for kind "h" the
            # global bit index is just d = t; slope/parity rows carry s*sb + t.
            row = probe[d]
            umask = 0
            bits = row & ~known_mask
            while bits:
                b = bits & -bits
                umask |= 1 << unknown_cols[b.bit_length() - 1]
                bits ^= b
            rows.append(umask)
            self.known_masks.append(row & known_mask)
        # Jordan reduction with combination tracking.
        pivots: dict[int, tuple[int, int]] = {}
        self.check_rows: list[int] = []  # combination masks that must XOR to 0
        for i, umask in enumerate(rows):
            comb = 1 << i
            while umask:
                bit = umask & -umask
                piv = pivots.get(bit)
                if piv is None:
                    break
                umask ^= piv[0]
                comb ^= piv[1]
            if umask:
                pivots[umask & -umask] = (umask, comb)
            else:
                self.check_rows.append(comb)
        self.rank = len(pivots)
        self.unique = self.rank == self.n_unknowns
        if self.unique:
            for bit in sorted(pivots, reverse=True):
                umask, comb = pivots[bit]
                rest = umask ^ bit
                while rest:
                    b = rest & -rest
                    umask ^= pivots[b][0]
                    comb ^= pivots[b][1]
                    rest = umask ^ bit
                pivots[bit] = (umask, comb)
            self.solution_combs = [
                pivots[1 << u][1] for u in range(self.n_unknowns)]
        else:
            self.solution_combs = []

    def _rhs_vector(self, present: Mapping, streams: Sequence) -> int:
        cp = self.cp
        sb = self.sb
        free_bits = 0
        for pos in self.known_free:
            free_bits |= _sym_to_int(cp, present[pos]) << (self.free.index(pos) * sb)
        if self.grdp:
            slope_bits = [
                _sym_to_int(cp, s) for s in streams]
            horiz_bits = (
                _sym_to_int(cp, present[cp.k - 1]) if self.horizontal_observed else 0)
        else:
            parity_bits = [_sym_to_int(cp, s) for s in streams]
        rhs = 0
        for i, (kind, d) in enumerate(self.obs_rows):
            if kind == "h":
                obs = (horiz_bits >> d) & 1
            elif self.grdp:
                s, t = divmod(d, sb)
                obs = (slope_bits[s - 1] >> t) & 1
            else:
                s, t = divmod(d, sb)
                obs = (parity_bits[s] >> t) & 1
            val = obs ^ ((self.known_masks[i] & free_bits).bit_count() & 1)
            rhs |= val << i
        return rhs

    def decode(self, present: Mapping, streams: Sequence) -> dict:
        if not self.unique:
            raise NotUnique(
                f"rank {self.rank} < {self.n_unknowns} unknown bits for "
                f"erasures {self.erased}")
        rhs = self._rhs_vector(present, streams)
        for comb in self.check_rows:
            if (comb & rhs).bit_count() & 1:
                raise NotUnique("view inconsistent with the expanded equations")
        sb = self.sb
        out = {}
        bitpos = 0
        for pos in self.unknown_free:
            value = 0
            for t in range(sb):
                if (self.solution_combs[bitpos] & rhs).bit_count() & 1:
                    value |= 1 << t
                bitpos += 1
            out[pos] = _int_to_sym(self.cp, value)
        if self.grdp and (self.cp.k - 1) in self.erased:
            # Column p-1 is the lane-wise XOR of the completed data columns.
            cols = dict(present)
            cols.update(out)
            lanes = list(cols[0])
            for j in range(1, self.cp.k - 1):
                lanes = [a ^ b for a, b in zip(lanes, cols[j])]
            out[self.cp.k - 1] = tuple(lanes)
        return out


@lru_cache(maxsize=None)
def _solver(cp: CodeParams, erased: tuple[int, ...]) -> _PatternSolver:
    return _PatternSolver(cp, erased)


# -- public operations -------------------------------------------------------------

def oracle_decode(cp: CodeParams, present: Mapping, parities: Sequence,
                  erased: Sequence[int]) -> dict:
    """Solve the bit-expanded parity equations for the erased symbols.

    ``parities`` carries the public streams: the r parities for RS/EVENODD,
    the r-1 slope parities for GRDP.  Returns {position: symbol} for every
    erased position.
    """
    erased_t = tuple(sorted(erased))
    if len(set(erased_t)) != len(erased_t):
        raise DuplicatePosition(f"repeated position in {erased_t}")
    data_positions = set(range(cp.k))
    for pos in erased_t:
        if pos not in data_positions:
            raise OutOfRange(f"position {pos} outside 0..{cp.k - 1}")
    if set(present) | set(erased_t) != data_positions or set(present) & set(erased_t):
        raise ParamMismatch("present and erased must partition the data positions")
    expected = cp.r - 1 if cp.backend is Backend.GRDP else cp.r
    if len(parities) != expected:
        raise ParamMismatch(f"expected {expected} public streams, got {len(parities)}")
    return _solver(cp, erased_t).decode(present, parities)


def mds_submatrix_check(cp: CodeParams, erased: Sequence[int]) -> bool:
    """True iff the erasure pattern over data positions is uniquely solvable.

    For RS/EVENODD this is exactly invertibility of the bit-expanded r x r
    submatrix of the check matrix on those columns.
    """
    erased_t = tuple(sorted(erased))
    if len(set(erased_t)) != len(erased_t):
        raise DuplicatePosition(f"repeated position in {erased_t}")
    for pos in erased_t:
        if not 0 <= pos <= cp.k - 1:
            raise OutOfRange(f"position {pos} outside 0..{cp.k - 1}")
    if len(erased_t) != cp.r:
        raise ParamMismatch(f"expected {cp.r} erased positions, got {len(erased_t)}")
    return _solver(cp, erased_t).unique


@dataclass
class SecrecyReport:
    """Exact view-count census for one adversary set.

    per_secret_counts maps each candidate secret (as a packed integer) to the
    multiset of its view frequencies (frequency -> number of views).  The
    verdict is PerfectlyUniform iff every observable view is produced by the
    same number of random tuples for every secret.
    """

    adversary_view_count: int
    tuples_per_secret: int
    per_secret_counts: dict[int, dict[int, int]]
    verdict: str
    max_deviation: int

    @property
    def is_uniform(self) -> bool:
        return self.verdict == "PerfectlyUniform"


def secrecy_audit(cp: CodeParams, adversary_positions: Sequence[int]) -> SecrecyReport:
    """Enumerate every dealing and count the adversary's views per secret.

    The adversary sees its own shares plus every public stream.  Ring
    backends are enumerated over single-bit lanes; wider lanes are that many
    independent copies of the single-bit scheme, so nothing more is learned
    by enumerating them.
    """
    adv = tuple(sorted(adversary_positions))
    if len(set(adv)) != len(adv):
        raise DuplicatePosition(f"repeated adversary position in {adv}")
    for pos in adv:
        if not 1 <= pos <= cp.k - 1:
            raise OutOfRange(f"position {pos} outside participant range 1..{cp.k - 1}")
    threshold = cp.k - cp.r
    if len(adv) > threshold - 1:
        raise ParamMismatch(
            f"adversary of size {len(adv)} reaches the threshold {threshold}; "
            "the audit precondition is at most k-r-1 positions")

    if cp.backend is Backend.RS:
        domain = range(cp.field.q)
        symbols = list(domain)
    else:
        p = cp.field.p
        domain = range(1 << (p - 1))
        symbols = [
            tuple((v >> i) & 1 for i in range(p - 1)) + (0,) for v in domain]
    n_random = len(_free_positions(cp)) - 1
    states = len(symbols) ** (n_random + 1)
    if states > ENUMERATION_CAP:
        raise TooLargeToEnumerate(
            f"{states} dealings exceed the cap of {ENUMERATION_CAP}")

    grdp = cp.backend is Backend.GRDP
    counts: dict[tuple, list[int]] = {}
    n_secrets = len(symbols)
    for si in range(n_secrets):
        secret = symbols[si]
        for tup in itertools.product(range(len(symbols)), repeat=n_random):
            data = [secret] + [symbols[v] for v in tup]
            streams = _derived_streams(cp, data)
            if grdp:
                public = streams[1:]
                share_of = lambda pos: (  # noqa: E731
                    streams[0] if pos == cp.k - 1 else data[pos])
            else:
                public = streams
                share_of = lambda pos: data[pos]  # noqa: E731
            view = tuple(_sym_to_int(cp, share_of(pos)) for pos in adv)
            view += tuple(_sym_to_int(cp, s) for s in public)
            row = counts.get(view)
            if row is None:
                row = counts[view] = [0] * n_secrets
            row[si] += 1

    tuples_per_secret = len(symbols) ** n_random
    max_dev = 0
    for row in counts.values():
        max_dev = max(max_dev, max(row) - min(row))
    per_secret: dict[int, dict[int, int]] = {}
    for si in range(n_secrets):
        freq: dict[int, int] = {}
        for row in counts.values():
            if row[si]:
                freq[row[si]] = freq.get(row[si], 0) + 1
        per_secret[_sym_to_int(cp, symbols[si])] = freq
    verdict = "PerfectlyUniform" if max_dev == 0 else "Leaky"
    return SecrecyReport(
        adversary_view_count=len(counts),
        tuples_per_secret=tuples_per_secret,
        per_secret_counts=per_secret,
        verdict=verdict,
        max_deviation=max_dev,
    )
