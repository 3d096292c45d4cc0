"""Arithmetic over binary-extension Galois fields GF(2^m), m <= 8."""

import numpy as np

# Conventional primitive polynomials, bitmask includes the x^m term.
DEFAULT_PRIMITIVE_POLY = {
    2: 0x3,
    4: 0x7,
    8: 0xB,
    16: 0x13,
    32: 0x25,
    64: 0x43,
    128: 0x89,
    256: 0x11D,
}


class GaloisField:
    """GF(2^m) with log/antilog tables and a dense multiplication table.

    Elements are plain integers in [0, q). Addition is XOR. The field is
    immutable after construction and safe to share across workers.
    """

    def __init__(self, order, primitive_poly=None):
        if order not in DEFAULT_PRIMITIVE_POLY:
            raise ValueError(f"field order must be a power of two in [2, 256], got {order}")
        self.order = order
        self.primitive_poly = primitive_poly if primitive_poly is not None else DEFAULT_PRIMITIVE_POLY[order]
        self.bits_per_symbol = order.bit_length() - 1

        q = order
        exp = np.zeros(2 * (q - 1), dtype=np.int32)
        log = np.zeros(q, dtype=np.int32)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & q:
                x ^= self.primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {self.primitive_poly:#x} is not primitive for GF({q})")
        exp[q - 1:] = exp[: q - 1]
        self.exp_table = exp
        self.log_table = log

        # Dense q x q product table; at q=256 this is 256 KiB and makes
        # vectorized multiplies and decoder permutations cheap.
        mul = np.zeros((q, q), dtype=np.int32)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self.mul_table = mul

        inv = np.zeros(q, dtype=np.int32)
        inv[nz] = exp[(q - 1 - log[nz]) % (q - 1)]
        self.inv_table = inv

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.inv_table[a]

    def __eq__(self, other):
        return (
            isinstance(other, GaloisField)
            and other.order == self.order
            and other.primitive_poly == self.primitive_poly
        )

    def __repr__(self):
        return f"GaloisField(order={self.order}, primitive_poly={self.primitive_poly:#x})"
