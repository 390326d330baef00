"""Arithmetic in the ring GF(2)[x] / M_p(x), where M_p(x) = 1 + x + ... + x^(p-1).

An element is a tuple of p integer "lanes"; lane i carries the coefficient of
alpha^i.  Each bit position across the lanes is an independent copy of the
ring (one bit plane), so a single operation on w-bit lanes processes w bit
planes at once.  Since alpha^p = 1, multiplication by alpha is a rotation of
the lanes, and since M_p(alpha) = 0, complementing every lane of a bit plane
does not change the element; the normalized representative keeps lane p-1
all-zero.

Everything here is built from XOR, lane rotation and lane copies.  There are
no lookup tables, which is the whole point of using this ring instead of a
large binary field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadShift, ParamMismatch, WrongLength

RingElement = tuple[int, ...]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingParams:
    """Ring geometry: the prime p and the byte width of each coefficient lane."""

    p: int
    lane_bytes: int = 1

    def __post_init__(self) -> None:
        if self.p < 3 or not _is_prime(self.p):
            raise ParamMismatch(f"p={self.p} must be an odd prime >= 3")
        if self.lane_bytes < 1:
            raise ParamMismatch(f"lane_bytes={self.lane_bytes} must be >= 1")

    @property
    def lane_bits(self) -> int:
        return 8 * self.lane_bytes

    @property
    def lane_mask(self) -> int:
        return (1 << self.lane_bits) - 1


def ring_zero(rp: RingParams) -> RingElement:
    return (0,) * rp.p


def ring_normalize(rp: RingParams, v: Sequence[int]) -> RingElement:
    """Normalized representative of a raw p-lane vector.

    Wherever lane p-1 has a set bit, that bit plane is complemented across all
    lanes (adding M_p(alpha) = 0), leaving lane p-1 all-zero.
    """
    if len(v) != rp.p:
        raise WrongLength(f"expected {rp.p} lanes, got {len(v)}")
    top = v[rp.p - 1]
    if not top:
        return tuple(v)
    return tuple(lane ^ top for lane in v)


def ring_xor(a: RingElement, b: RingElement) -> RingElement:
    """Lane-wise sum; normalized inputs give a normalized result."""
    return tuple(x ^ y for x, y in zip(a, b))


def ring_constant(rp: RingParams, exponents: Iterable[int]) -> RingElement:
    """The element sum of alpha^e over ``exponents``, broadcast to every bit plane.

    Lanes of the result are 0 or all-ones, so multiplying by it scales every
    bit plane by the same binary-coefficient polynomial.
    """
    lanes = [0] * rp.p
    for e in exponents:
        lanes[e % rp.p] ^= rp.lane_mask
    return ring_normalize(rp, lanes)


def ring_mul_monomial(rp: RingParams, a: RingElement, j: int) -> RingElement:
    """alpha^j * a: rotate the lanes by j positions, then normalize."""
    if len(a) != rp.p:
        raise WrongLength(f"expected {rp.p} lanes, got {len(a)}")
    j %= rp.p
    return ring_normalize(rp, a[rp.p - j:] + a[:rp.p - j])


def ring_mul(rp: RingParams, a: RingElement, b: RingElement) -> RingElement:
    """Full product of two elements, reduced and normalized.

    Works per bit plane: acc[(i+j) mod p] ^= a[i] AND b[j].  When one operand
    is a broadcast constant (see ring_constant) this applies that polynomial
    to every bit plane of the other operand.
    """
    if len(a) != rp.p or len(b) != rp.p:
        raise WrongLength(f"expected {rp.p} lanes")
    p = rp.p
    acc = [0] * p
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if bj:
                acc[(i + j) % p] ^= ai & bj
    return ring_normalize(rp, acc)


def ring_div_one_plus_alpha_j(rp: RingParams, y: RingElement, j: int) -> RingElement:
    """Solve (1 + alpha^j) * x = y by the lane-parallel recursion.

    With s the XOR of all lanes of y, set yhat[i] = y[i] ^ s.  Seeding
    x[p-1] = 0 and walking u = 1..p-1 through the index chain
    <-u*j - 1> covers every residue once:

        x[<-u*j - 1>] = x[<-(u-1)*j - 1>] ^ yhat[<-(u-1)*j - 1>]

    The result keeps lane p-1 zero, i.e. it is already normalized.
    """
    p = rp.p
    j %= p
    if j == 0:
        raise BadShift("1 + alpha^0 = 0 is not invertible")
    y = ring_normalize(rp, y)
    total = 0
    for lane in y:
        total ^= lane
    yhat = [lane ^ total for lane in y]
    x = [0] * p
    prev = p - 1
    for u in range(1, p):
        cur = (-u * j - 1) % p
        x[cur] = x[prev] ^ yhat[prev]
        prev = cur
    return tuple(x)
