"""GF(2^m) arithmetic backed by log/antilog tables.

Elements are integers in [0, 2^m); bit i of the value is the coefficient of
alpha^i, where alpha is a root of the defining primitive polynomial.
Addition is plain XOR.  Multiplication and inversion go through exponent
tables built once at construction, where the polynomial's primitivity is
verified by checking that the powers of alpha cycle through all q-1 nonzero
elements.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadDegree, DivideByZero, NonPrimitivePoly

#: Primitive polynomials used when the caller does not pick one, keyed by the
#: bit width m.  Bit i of the value is the coefficient of x^i.  Every entry is
#: verified by the order check in field_new (exercised by the test suite).
DEFAULT_POLYNOMIALS: dict[int, int] = {
    2: 0b111,                # 1 + x + x^2
    3: 0b1011,               # 1 + x + x^3
    4: 0b10011,              # 1 + x + x^4
    5: 0b100101,             # 1 + x^2 + x^5
    6: 0b1000011,            # 1 + x + x^6
    7: 0b10001001,           # 1 + x^3 + x^7
    8: 0b100011101,          # 1 + x^2 + x^3 + x^4 + x^8
    9: 0b1000010001,         # 1 + x^4 + x^9
    10: 0b10000001001,       # 1 + x^3 + x^10
    11: 0b100000000101,      # 1 + x^2 + x^11
    12: 0b1000001010011,     # 1 + x + x^4 + x^6 + x^12
    13: 0b10000000011011,    # 1 + x + x^3 + x^4 + x^13
    14: 0b100010001000011,   # 1 + x + x^6 + x^10 + x^14
    15: 0b1000000000000011,  # 1 + x + x^15
    16: 0b10001000000001011,  # 1 + x + x^3 + x^12 + x^16
}


@dataclass(frozen=True)
class FieldTable:
    """Log/antilog tables for one field instance.

    ``antilog[e]`` is alpha^e for 0 <= e < q-1, and ``log[a]`` is the exponent
    of a for nonzero a (slot 0 holds the sentinel -1).
    """

    m: int
    primitive_poly: int
    log: tuple[int, ...]
    antilog: tuple[int, ...]

    @property
    def q(self) -> int:
        return 1 << self.m

    def alpha_pow(self, e: int) -> int:
        """alpha^e for any exponent e >= 0."""
        return self.antilog[e % (self.q - 1)]


def field_new(m: int, primitive_poly: int) -> FieldTable:
    """Build the tables for GF(2^m) defined by ``primitive_poly``.

    Raises BadDegree if m is outside [2, 16] or the polynomial's degree is not
    m, and NonPrimitivePoly if the powers of alpha fail to have order exactly
    q-1 (which also rejects reducible polynomials).
    """
    if not 2 <= m <= 16:
        raise BadDegree(f"bit width m={m} outside supported range [2, 16]")
    if primitive_poly.bit_length() != m + 1:
        raise BadDegree(
            f"polynomial {primitive_poly:#x} does not have degree {m}")
    q = 1 << m
    log = [-1] * q
    antilog = [0] * (q - 1)
    val = 1
    for e in range(q - 1):
        if log[val] != -1:
            raise NonPrimitivePoly(
                f"{primitive_poly:#x}: alpha cycles after {e} steps, need {q - 1}")
        log[val] = e
        antilog[e] = val
        val <<= 1
        if val & q:
            val ^= primitive_poly
    if val != 1:
        raise NonPrimitivePoly(
            f"{primitive_poly:#x}: alpha^{q - 1} != 1 (not a primitive polynomial)")
    return FieldTable(m, primitive_poly, tuple(log), tuple(antilog))


def field_mul(t: FieldTable, a: int, b: int) -> int:
    """Product of two field elements; zero absorbs."""
    if a == 0 or b == 0:
        return 0
    return t.antilog[(t.log[a] + t.log[b]) % (t.q - 1)]


def field_inv(t: FieldTable, a: int) -> int:
    """Multiplicative inverse of a nonzero element."""
    if a == 0:
        raise DivideByZero("zero has no multiplicative inverse")
    return t.antilog[(t.q - 1 - t.log[a]) % (t.q - 1)]
