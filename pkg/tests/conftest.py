from __future__ import annotations

import random

import pytest

from rookbench.field import M61, FieldMatrix, PrimeField, mat_mul


@pytest.fixture
def gf101():
    return PrimeField(101)


@pytest.fixture
def gf_m61():
    return PrimeField(M61)


def rng(seed: int) -> random.Random:
    return random.Random(seed)


def scalar(v: int) -> FieldMatrix:
    return FieldMatrix(1, 1, [v])


def direct_products(field, inputs):
    """The uncoded oracle: one schoolbook product per input pair."""
    return [mat_mul(field, a, b) for a, b in inputs]
