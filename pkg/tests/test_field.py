from __future__ import annotations

import random

import pytest

from conftest import direct_products, rng
from rookbench.field import (
    M61,
    DimensionMismatch,
    FieldMatrix,
    OpCounter,
    PrimeField,
    SingularMatrix,
    field_pow,
    is_prime_u64,
    mat_add,
    mat_mul,
    mat_random,
    mat_scale,
    solve_linear,
)


def test_primality_checker():
    assert is_prime_u64(2)
    assert is_prime_u64(101)
    assert is_prime_u64(M61)
    assert not is_prime_u64(1)
    assert not is_prime_u64((1 << 61) + 1)
    assert not is_prime_u64(561)  # Carmichael


def test_field_construction_rejects_bad_moduli():
    with pytest.raises(ValueError):
        PrimeField(4)
    with pytest.raises(ValueError):
        PrimeField(1 << 64)  # prime or not, too wide
    assert PrimeField().modulus == M61


def test_exponent_bound_check():
    f = PrimeField(101)
    f.check_exponent_bound(99)
    with pytest.raises(ValueError):
        f.check_exponent_bound(100)


def test_field_pow_examples():
    f = PrimeField(M61)
    assert field_pow(f, 7, 0) == 1
    assert field_pow(f, 2, 10) == 1024
    g = PrimeField(101)
    assert field_pow(g, 3, 100) == 1  # Fermat


def test_field_pow_matches_repeated_multiplication():
    f = PrimeField(101)
    r = rng(1)
    for _ in range(50):
        x = f.rand_element(r)
        e = r.randrange(65)
        acc = 1
        for _ in range(e):
            acc = acc * x % 101
        assert field_pow(f, x, e) == acc == pow(x, e, 101)


def test_field_pow_mul_count_bounded_and_deterministic():
    f = PrimeField(M61)
    for e in (1, 2, 3, 10, 255, 1 << 40, (1 << 40) + 12345):
        c1 = OpCounter()
        field_pow(f, 3, e, c1)
        c2 = OpCounter()
        field_pow(f, 987654321, e, c2)
        assert c1.mul_count == c2.mul_count  # depends only on e's bits
        assert c1.mul_count <= 2 * (e.bit_length() - 1)


def test_field_pow_rejects_negative_exponent():
    with pytest.raises(ValueError):
        field_pow(PrimeField(101), 2, -1)


def test_ring_axioms_sampled():
    f = PrimeField(M61)
    r = rng(2)
    for _ in range(200):
        a, b, c = (f.rand_element(r) for _ in range(3))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


def test_inv_counts_inversions():
    f = PrimeField(101)
    ctr = OpCounter()
    f.inv(7, ctr)
    f.inv(9, ctr)
    assert ctr.inv_count == 2


def test_mat_mul_examples(gf101):
    m = FieldMatrix.from_rows([[1, 2], [3, 4]])
    ident = FieldMatrix.identity(3)
    x = mat_random(gf101, 3, 3, rng(3))
    assert mat_mul(gf101, ident, x) == x
    assert mat_mul(gf101, FieldMatrix(1, 1, [3]), FieldMatrix(1, 1, [2])).entries == [6]
    prod = mat_mul(gf101, m, FieldMatrix.from_rows([[5, 6], [7, 8]]))
    assert prod.to_rows() == [[19, 22], [43, 50]]  # hand schoolbook check


def test_mat_mul_counts_and_dimension_error(gf101):
    a = mat_random(gf101, 2, 3, rng(4))
    b = mat_random(gf101, 3, 4, rng(5))
    ctr = OpCounter()
    mat_mul(gf101, a, b, ctr)
    assert ctr.mul_count == 2 * 3 * 4
    with pytest.raises(DimensionMismatch):
        mat_mul(gf101, a, a)


def test_mat_helpers(gf101):
    a = FieldMatrix.from_rows([[1, 2], [3, 4]])
    b = FieldMatrix.from_rows([[100, 100], [100, 100]])
    assert mat_add(gf101, a, b).to_rows() == [[0, 1], [2, 3]]
    assert mat_scale(gf101, 2, a).to_rows() == [[2, 4], [6, 8]]
    with pytest.raises(ValueError):
        FieldMatrix(2, 2, [1, 2, 3])


def test_mat_random_determinism(gf_m61):
    a = mat_random(gf_m61, 3, 4, rng(99))
    b = mat_random(gf_m61, 3, 4, rng(99))
    c = mat_random(gf_m61, 3, 4, rng(100))
    assert a == b
    assert a != c
    empty = mat_random(gf_m61, 0, 4, rng(1))
    assert empty.rows == 0 and empty.entries == []


def test_solve_identity(gf101):
    blocks = [mat_random(gf101, 2, 2, rng(i)) for i in range(3)]
    out = solve_linear(gf101, FieldMatrix.identity(3), blocks)
    assert out == blocks


def test_solve_vandermonde_recovers_quadratic(gf101):
    # Forward-evaluate a known quadratic at x = 1, 2, 3, then solve.
    coeffs = [17, 42, 99]
    xs = [1, 2, 3]
    v = FieldMatrix.from_rows([[pow(x, j, 101) for j in range(3)] for x in xs])
    rhs = [
        FieldMatrix(1, 1, [sum(c * pow(x, j) for j, c in enumerate(coeffs)) % 101])
        for x in xs
    ]
    out = solve_linear(gf101, v, rhs)
    assert [m.entries[0] for m in out] == coeffs


def test_solve_singular_on_equal_rows(gf101):
    v = FieldMatrix.from_rows([[1, 2], [1, 2]])
    rhs = [FieldMatrix(1, 1, [1]), FieldMatrix(1, 1, [2])]
    with pytest.raises(SingularMatrix):
        solve_linear(gf101, v, rhs)


def test_solve_roundtrip_random_systems(gf_m61):
    r = rng(7)
    for trial in range(10):
        size = r.choice([1, 2, 3, 5, 8, 13, 21, 32])
        v = mat_random(gf_m61, size, size, r)
        want = [mat_random(gf_m61, 2, 3, r) for _ in range(size)]
        rhs = []
        for i in range(size):
            acc = FieldMatrix.zeros(2, 3)
            for j in range(size):
                acc = mat_add(gf_m61, acc, mat_scale(gf_m61, v.at(i, j), want[j]))
            rhs.append(acc)
        try:
            got = solve_linear(gf_m61, v, rhs)
        except SingularMatrix:
            continue  # vanishing probability at p = 2^61 - 1
        assert got == want


def test_solve_counts_pivot_inversions(gf101):
    r = rng(8)
    v = mat_random(gf101, 4, 4, r)
    rhs = [mat_random(gf101, 1, 1, r) for _ in range(4)]
    ctr = OpCounter()
    try:
        solve_linear(gf101, v, rhs, ctr)
    except SingularMatrix:
        pytest.skip("random system happened to be singular")
    assert ctr.inv_count == 4


def test_op_counts_deterministic_for_fixed_inputs(gf101):
    a = mat_random(gf101, 3, 3, rng(11))
    b = mat_random(gf101, 3, 3, rng(12))
    counts = []
    for _ in range(2):
        ctr = OpCounter()
        mat_mul(gf101, a, b, ctr)
        field_pow(gf101, 5, 1000, ctr)
        counts.append(ctr.as_dict())
    assert counts[0] == counts[1]


def test_counter_reset_and_absorb():
    c = OpCounter()
    c.mul_count = 3
    d = OpCounter()
    d.inv_count = 2
    c.absorb(d)
    assert (c.mul_count, c.inv_count) == (3, 2)
    c.reset()
    assert c.as_dict() == {"mul_count": 0, "add_count": 0, "inv_count": 0}


def test_matrix_json_roundtrip(gf_m61):
    m = mat_random(gf_m61, 2, 3, rng(13))
    d = m.to_json_dict()
    assert all(isinstance(e, str) for e in d["entries"])  # decimal strings
    back = FieldMatrix.from_json_dict(d, gf_m61)
    assert back == m
    with pytest.raises(ValueError):
        FieldMatrix.from_json_dict(
            {"rows": 1, "cols": 1, "entries": [str(M61)]}, gf_m61
        )


def test_distinct_nonzero_draw(gf101):
    pts = gf101.distinct_nonzero(rng(14), 100)
    assert len(set(pts)) == 100
    assert all(0 < x < 101 for x in pts)
    with pytest.raises(ValueError):
        gf101.distinct_nonzero(rng(14), 101)
