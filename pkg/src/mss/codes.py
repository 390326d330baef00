"""Code backends: parity encoding and secret recovery.

All backends present the same picture: k data symbols with the secret at
position 0, plus parity symbols each of which is a syndrome of the data
against one row of a Vandermonde-style check matrix.  Parity u is

    P_u = XOR_j alpha^(u*j) * D_j        for u = 0 .. r-1,

computed over GF(2^m) for the RS backend and over the ring mod M_p(x) for the
EVENODD backend.  Because every parity depends only on the data, they are
independent of each other and can be computed in any order.

Recovery never solves a linear system.  With the secret plus r-1 participant
positions missing, the syndromes restricted to the erased set combine with
the coefficients of the erasure locator

    G(x) = (x + alpha^(i_1)) ... (x + alpha^(i_{r-1}))
         = g_{r-1} + g_{r-2} x + ... + g_0 x^{r-1}      (g_0 = 1)

to isolate the secret:  XOR_u S_u g_{r-u-1} = D_0 * prod_s (1 + alpha^(i_s)).
The RS backend divides by G(1); the ring backend peels the product one
(1 + alpha^(i_s)) factor at a time with the division recursion.

GRDP replaces the u = 0 parity with an in-data horizontal parity column and
computes each slope parity over the data plus that column, so its parities
are not mutually independent; its recovery goes through a small GF(2)
elimination over whole lanes instead of the locator shortcut.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import gf2m, ring_mp
from .errors import (
    DuplicatePosition,
    InternalDegenerate,
    OutOfRange,
    ParamMismatch,
    Unsolvable,
)
from .gf2m import FieldTable
from .ring_mp import RingElement, RingParams


class Backend(enum.Enum):
    RS = "rs"
    EVENODD = "evenodd"
    GRDP = "grdp"


@dataclass(frozen=True)
class CodeParams:
    """Backend id plus the (k, r) geometry and the symbol algebra.

    k counts the data symbols (secret + k-1 participant symbols); r is the
    number of parities.  ``field`` is a FieldTable for RS and RingParams for
    the array backends.
    """

    backend: Backend
    k: int
    r: int
    field: FieldTable | RingParams

    def __post_init__(self) -> None:
        if not 1 <= self.r < self.k:
            raise ParamMismatch(f"need 1 <= r < k, got k={self.k} r={self.r}")
        if self.backend is Backend.RS:
            if not isinstance(self.field, FieldTable):
                raise ParamMismatch("RS backend needs a FieldTable")
            if self.k > self.field.q - 1:
                raise ParamMismatch(
                    f"k={self.k} exceeds q-1={self.field.q - 1}; column generators collide")
        else:
            if not isinstance(self.field, RingParams):
                raise ParamMismatch("array backends need RingParams")
            if self.backend is Backend.EVENODD and self.k > self.field.p:
                raise ParamMismatch(f"k={self.k} exceeds p={self.field.p}")
            if self.backend is Backend.GRDP and self.k != self.field.p:
                raise ParamMismatch(
                    f"GRDP fixes k = p, got k={self.k} p={self.field.p}")


@dataclass(frozen=True)
class LocatorPoly:
    """Coefficients of the erasure locator and the positions it encodes.

    g[u] is the coefficient of x^(r-1-u), so g[0] is the (monic) leading
    coefficient and g[r-1] the constant term.
    """

    g: tuple
    erased: tuple[int, ...]


@dataclass(frozen=True)
class ArrayCodeword:
    """All columns of one codeword: k data columns followed by the parities."""

    columns: tuple


# -- algebra dispatch ---------------------------------------------------------

def _sym_zero(cp: CodeParams):
    if cp.backend is Backend.RS:
        return 0
    return ring_mp.ring_zero(cp.field)


def _sym_one(cp: CodeParams):
    if cp.backend is Backend.RS:
        return 1
    return ring_mp.ring_constant(cp.field, (0,))


def _sym_xor(cp: CodeParams, a, b):
    if cp.backend is Backend.RS:
        return a ^ b
    return ring_mp.ring_xor(a, b)


def _sym_mul(cp: CodeParams, a, b):
    if cp.backend is Backend.RS:
        return gf2m.field_mul(cp.field, a, b)
    return ring_mp.ring_mul(cp.field, a, b)


def _alpha_pow_mul(cp: CodeParams, x, e: int):
    """alpha^e * x in the backend's algebra."""
    if cp.backend is Backend.RS:
        return gf2m.field_mul(cp.field, x, cp.field.alpha_pow(e))
    return ring_mp.ring_mul_monomial(cp.field, x, e)


def _alpha_elem(cp: CodeParams, e: int):
    """alpha^e as an element (broadcast constant for the ring backends)."""
    if cp.backend is Backend.RS:
        return cp.field.alpha_pow(e)
    return ring_mp.ring_constant(cp.field, (e,))


# -- syndrome-style encoding (RS and EVENODD) ---------------------------------

def _syndrome_parities(cp: CodeParams, data: Sequence) -> tuple:
    if len(data) != cp.k:
        raise ParamMismatch(f"expected {cp.k} data symbols, got {len(data)}")
    parities = []
    for u in range(cp.r):
        acc = _sym_zero(cp)
        for j, d in enumerate(data):
            acc = _sym_xor(cp, acc, _alpha_pow_mul(cp, d, u * j))
        parities.append(acc)
    return tuple(parities)


def encode_parities_rs(cp: CodeParams, data: Sequence[int]) -> tuple[int, ...]:
    """The r parity symbols of k field elements (secret first)."""
    if cp.backend is not Backend.RS:
        raise ParamMismatch("encode_parities_rs requires the RS backend")
    return _syndrome_parities(cp, data)


def encode_parities_evenodd(cp: CodeParams, data: Sequence[RingElement]) -> tuple:
    """The r parity columns of k ring columns (secret first).

    Same formula as RS but over the ring, where multiplying by alpha^(u*j) is
    a lane rotation: in the array picture each parity governs the toroidal
    lines of one slope, with even/odd line parity set by the line through the
    (zero) last entry of the first column.
    """
    if cp.backend is not Backend.EVENODD:
        raise ParamMismatch("encode_parities_evenodd requires the EVENODD backend")
    return _syndrome_parities(cp, data)


# -- syndromes, locator, recovery ----------------------------------------------

def compute_syndromes(cp: CodeParams, present: Mapping[int, object],
                      parities: Sequence) -> tuple:
    """Syndromes of a view with exactly k-r present participant symbols.

    S_u = XOR_v alpha^(u*j_v) D_{j_v}  XOR  P_u; on a valid codeword this
    equals the same sum taken over the r erased positions.
    """
    if cp.backend is Backend.GRDP:
        raise ParamMismatch("GRDP recovery does not go through syndromes")
    if len(parities) != cp.r:
        raise ParamMismatch(f"expected {cp.r} parities, got {len(parities)}")
    if len(present) != cp.k - cp.r:
        raise ParamMismatch(
            f"expected exactly {cp.k - cp.r} present symbols, got {len(present)}")
    for pos in present:
        if not 1 <= pos <= cp.k - 1:
            raise OutOfRange(f"position {pos} outside participant range 1..{cp.k - 1}")
    syndromes = []
    for u in range(cp.r):
        acc = parities[u]
        for pos, sym in present.items():
            acc = _sym_xor(cp, acc, _alpha_pow_mul(cp, sym, u * pos))
        syndromes.append(acc)
    return tuple(syndromes)


def erasure_locator(cp: CodeParams, erased_nonsecret: Sequence[int]) -> LocatorPoly:
    """Locator polynomial for the r-1 erased participant positions.

    Position 0 (the secret) is always the implicit r-th erasure and is never
    a root, so G(1) != 0.
    """
    positions = tuple(sorted(erased_nonsecret))
    if len(set(positions)) != len(positions):
        raise DuplicatePosition(f"repeated position in {positions}")
    for pos in positions:
        if not 1 <= pos <= cp.k - 1:
            raise OutOfRange(f"position {pos} outside participant range 1..{cp.k - 1}")
    if len(positions) != cp.r - 1:
        raise ParamMismatch(
            f"locator needs exactly r-1={cp.r - 1} positions, got {len(positions)}")
    # Ascending coefficients of prod (x + alpha^i); index d is the leading 1.
    coeffs = [_sym_one(cp)]
    zero = _sym_zero(cp)
    for pos in positions:
        root = _alpha_elem(cp, pos)
        nxt = [zero] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] = _sym_xor(cp, nxt[i], _sym_mul(cp, c, root))
            nxt[i + 1] = _sym_xor(cp, nxt[i + 1], c)
        coeffs = nxt
    d = len(positions)
    g = tuple(coeffs[d - u] for u in range(d + 1))
    return LocatorPoly(g=g, erased=positions)


def _combine_syndromes(cp: CodeParams, syndromes: Sequence, loc: LocatorPoly):
    if len(syndromes) != cp.r or len(loc.g) != cp.r:
        raise ParamMismatch(
            f"need {cp.r} syndromes and locator of degree {cp.r - 1}")
    acc = _sym_zero(cp)
    for u in range(cp.r):
        acc = _sym_xor(cp, acc, _sym_mul(cp, syndromes[u], loc.g[cp.r - u - 1]))
    return acc


def recover_secret_rs(cp: CodeParams, syndromes: Sequence[int],
                      loc: LocatorPoly) -> int:
    """D_0 = (XOR_u S_u g_{r-u-1}) / G(1)."""
    if cp.backend is not Backend.RS:
        raise ParamMismatch("recover_secret_rs requires the RS backend")
    num = _combine_syndromes(cp, syndromes, loc)
    den = 0
    for g in loc.g:
        den ^= g
    if den == 0:
        raise InternalDegenerate("G(1) = 0: erased positions were corrupted")
    return gf2m.field_mul(cp.field, num, gf2m.field_inv(cp.field, den))


def recover_secret_ring(cp: CodeParams, syndromes: Sequence[RingElement],
                        loc: LocatorPoly) -> RingElement:
    """Ring variant: peel each (1 + alpha^(i_s)) factor with the division recursion."""
    if cp.backend is not Backend.EVENODD:
        raise ParamMismatch("recover_secret_ring requires the EVENODD backend")
    acc = _combine_syndromes(cp, syndromes, loc)
    for pos in loc.erased:
        acc = ring_mp.ring_div_one_plus_alpha_j(cp.field, acc, pos)
    return acc


# -- GRDP ----------------------------------------------------------------------

def encode_grdp(cp: CodeParams, data: Sequence[RingElement]) -> tuple:
    """Horizontal parity plus the r-1 slope parity columns.

    data holds columns 0..p-2.  Column p-1 is the row-wise XOR of the data
    columns.  For u = 1..r-1, slope-parity entry i is the toroidal slope-u
    line sum over the p x p array (data plus horizontal column, zero row
    p-1); the line through row p-1 of column 0 is excluded, so the last lane
    of a slope column is forced to zero rather than complemented.
    """
    if cp.backend is not Backend.GRDP:
        raise ParamMismatch("encode_grdp requires the GRDP backend")
    rp: RingParams = cp.field
    p = rp.p
    if len(data) != p - 1:
        raise ParamMismatch(f"expected {p - 1} data columns, got {len(data)}")
    horizontal = data[0]
    for col in data[1:]:
        horizontal = ring_mp.ring_xor(horizontal, col)
    columns = list(data) + [horizontal]
    slopes = []
    for u in range(1, cp.r):
        acc = [0] * p
        for j, col in enumerate(columns):
            shift = (u * j) % p
            for i, lane in enumerate(col):
                if lane:
                    acc[(i + shift) % p] ^= lane
        acc[p - 1] = 0
        slopes.append(tuple(acc))
    return horizontal, tuple(slopes)


def grdp_recover(cp: CodeParams, present: Mapping[int, RingElement],
                 slope_parities: Sequence[RingElement]) -> dict[int, RingElement]:
    """Solve for the erased columns from the surviving ones plus slope parities.

    Assembles the row-parity and slope-line equations over the erased lanes
    and eliminates symbolically; every equation has per-lane coefficients, so
    the resulting solution map is a set of whole-lane XORs and applies
    unchanged to lanes of any width.  Surplus equations (fewer than r
    erasures) become value-level consistency checks.
    """
    if cp.backend is not Backend.GRDP:
        raise ParamMismatch("grdp_recover requires the GRDP backend")
    rp: RingParams = cp.field
    p = rp.p
    for pos in present:
        if not 0 <= pos <= p - 1:
            raise OutOfRange(f"column {pos} outside 0..{p - 1}")
    if len(slope_parities) != cp.r - 1:
        raise ParamMismatch(
            f"expected {cp.r - 1} slope parities, got {len(slope_parities)}")
    erased = sorted(set(range(p)) - set(present))
    if not erased:
        return {}
    if len(erased) > cp.r:
        raise ParamMismatch(
            f"{len(erased)} erasures exceed the correction budget r={cp.r}")

    unknown_id = {}
    for col in erased:
        for lane in range(p - 1):
            unknown_id[(col, lane)] = len(unknown_id)
    slot_id: dict[tuple, int] = {}
    slot_val: list[int] = []

    def slot(key, value) -> int:
        idx = slot_id.get(key)
        if idx is None:
            idx = len(slot_val)
            slot_id[key] = idx
            slot_val.append(value)
        return idx

    # Rows are (unknown mask, known-slot mask): XOR of unknowns = XOR of knowns.
    rows: list[list[int]] = []
    for i in range(p - 1):
        umask = kmask = 0
        for j in range(p):
            if j in present:
                kmask ^= 1 << slot(("col", j, i), present[j][i])
            else:
                umask ^= 1 << unknown_id[(j, i)]
        rows.append([umask, kmask])
    for u in range(1, cp.r):
        par = slope_parities[u - 1]
        for i in range(p - 1):
            umask = 0
            kmask = 1 << slot(("slope", u, i), par[i])
            for j in range(p):
                lane = (i - u * j) % p
                if lane == p - 1:
                    continue
                if j in present:
                    kmask ^= 1 << slot(("col", j, lane), present[j][lane])
                else:
                    umask ^= 1 << unknown_id[(j, lane)]
            rows.append([umask, kmask])

    pivots: dict[int, list[int]] = {}
    checks: list[int] = []
    for row in rows:
        umask, kmask = row
        while umask:
            bit = umask & -umask
            piv = pivots.get(bit)
            if piv is None:
                break
            umask ^= piv[0]
            kmask ^= piv[1]
        if umask:
            pivots[umask & -umask] = [umask, kmask]
        elif kmask:
            checks.append(kmask)
    if len(pivots) < len(unknown_id):
        raise Unsolvable(
            f"rank {len(pivots)} < {len(unknown_id)} unknown lanes")
    # Back-substitute so each pivot row has a single unknown bit.
    for bit in sorted(pivots, reverse=True):
        umask, kmask = pivots[bit]
        rest = umask ^ bit
        while rest:
            b = rest & -rest
            umask ^= pivots[b][0]
            kmask ^= pivots[b][1]
            rest = umask ^ bit
        pivots[bit] = [umask, kmask]

    def eval_mask(kmask: int) -> int:
        val = 0
        while kmask:
            b = kmask & -kmask
            val ^= slot_val[b.bit_length() - 1]
            kmask ^= b
        return val

    for kmask in checks:
        if eval_mask(kmask):
            raise Unsolvable("view inconsistent with the parity equations")

    values = {}
    for (col, lane), idx in unknown_id.items():
        values[(col, lane)] = eval_mask(pivots[1 << idx][1])
    return {
        col: tuple(values[(col, lane)] for lane in range(p - 1)) + (0,)
        for col in erased
    }


# -- convenience ---------------------------------------------------------------

def build_codeword(cp: CodeParams, data: Sequence) -> ArrayCodeword:
    """Data columns followed by every parity column, as one tuple."""
    if cp.backend is Backend.GRDP:
        horizontal, slopes = encode_grdp(cp, data)
        return ArrayCodeword(tuple(data) + (horizontal,) + slopes)
    return ArrayCodeword(tuple(data) + _syndrome_parities(cp, data))
