import numpy as np
import pytest

from rafharq.galois import GaloisField


@pytest.fixture(scope="module")
def gf256():
    return GaloisField(256)


@pytest.fixture(scope="module")
def gf16():
    return GaloisField(16)


def test_addition_examples(gf256):
    assert gf256.add(0x57, 0x57) == 0x00
    assert gf256.add(0x00, 0x3A) == 0x3A
    assert gf256.add(0x57, 0x83) == (0x57 ^ 0x83) == 0xD4


def test_multiplicative_identity_and_zero(gf256):
    x = np.arange(256)
    assert np.array_equal(gf256.mul(1, x), x)
    assert np.array_equal(gf256.mul(0, x), np.zeros(256, dtype=np.int32))


def test_known_product(gf256):
    # 0x02 * 0x80 wraps past degree 8 and reduces by 0x11D
    assert gf256.mul(0x02, 0x80) == 0x1D


def _poly_mul_reduce(a, b, poly, m):
    # schoolbook carryless multiply, then reduce modulo the field polynomial
    prod = 0
    for i in range(m):
        if (b >> i) & 1:
            prod ^= a << i
    for deg in range(2 * m - 2, m - 1, -1):
        if (prod >> deg) & 1:
            prod ^= poly << (deg - m)
    return prod


def test_mul_matches_polynomial_oracle(gf256):
    rng = np.random.default_rng(0)
    for _ in range(500):
        a, b = rng.integers(0, 256, size=2)
        assert gf256.mul(a, b) == _poly_mul_reduce(int(a), int(b), 0x11D, 8)


def test_log_exp_invariants(gf256):
    q = 256
    for a in range(1, q):
        assert gf256.exp_table[gf256.log_table[a]] == a
    # period q-1 over nonzero elements
    assert np.array_equal(gf256.exp_table[: q - 1], gf256.exp_table[q - 1 : 2 * (q - 1)])
    assert len(set(gf256.exp_table[: q - 1].tolist())) == q - 1


def test_mul_equals_log_sum(gf256):
    rng = np.random.default_rng(1)
    a = rng.integers(1, 256, size=1000)
    b = rng.integers(1, 256, size=1000)
    expected = gf256.exp_table[(gf256.log_table[a] + gf256.log_table[b]) % 255]
    assert np.array_equal(gf256.mul(a, b), expected)


def test_inverse_defining_property(gf256):
    assert gf256.inv(1) == 1
    rng = np.random.default_rng(2)
    a = rng.integers(1, 256, size=200)
    assert np.all(gf256.mul(a, gf256.inv(a)) == 1)


def test_inverse_of_zero_rejected(gf256):
    with pytest.raises(ZeroDivisionError):
        gf256.inv(0)


def test_inverse_brute_force_gf16(gf16):
    for a in range(1, 16):
        found = [b for b in range(1, 16) if gf16.mul(a, b) == 1]
        assert found == [gf16.inv(a)]


def test_field_axioms_exhaustive_gf16(gf16):
    q = 16
    elems = np.arange(q)
    a, b = np.meshgrid(elems, elems, indexing="ij")
    assert np.array_equal(gf16.mul(a, b), gf16.mul(b, a))
    assert np.array_equal(gf16.add(a, b), gf16.add(b, a))
    for c in range(q):
        assert np.array_equal(gf16.mul(gf16.mul(a, b), c), gf16.mul(a, gf16.mul(b, c)))
        assert np.array_equal(
            gf16.mul(a, gf16.add(b, c)),
            gf16.add(gf16.mul(a, b), gf16.mul(a, c)),
        )


def test_field_axioms_randomized_gf256(gf256):
    rng = np.random.default_rng(3)
    n = 100_000
    a = rng.integers(0, 256, size=n)
    b = rng.integers(0, 256, size=n)
    c = rng.integers(0, 256, size=n)
    assert np.array_equal(gf256.mul(a, b), gf256.mul(b, a))
    assert np.array_equal(gf256.mul(gf256.mul(a, b), c), gf256.mul(a, gf256.mul(b, c)))
    assert np.array_equal(
        gf256.mul(a, gf256.add(b, c)),
        gf256.add(gf256.mul(a, b), gf256.mul(a, c)),
    )


@pytest.mark.parametrize("order", [2, 4, 16, 256])
def test_multiplication_by_nonzero_is_bijection(order):
    gf = GaloisField(order)
    elems = np.arange(order)
    for z in range(1, order):
        image = gf.mul(z, elems)
        assert len(set(image.tolist())) == order


def test_invalid_order_rejected():
    with pytest.raises(ValueError):
        GaloisField(100)
