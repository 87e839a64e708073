"""Exact arithmetic over a prime field, matrices over it, and op counting.

Field elements are canonical Python ints in [0, modulus).  Python's bigints
make 61-bit x 61-bit products exact, which is why the default modulus is the
Mersenne prime 2^61 - 1: arithmetic never overflows and exponents up to
~2^61 stay representable as monomial degrees.

Operation counts are accumulated into explicit OpCounter objects passed to
the counted operations (one counter per logical task), so there is no global
mutable state and concurrent tasks cannot interfere.
"""

from __future__ import annotations

M61 = (1 << 61) - 1  # 2^61 - 1, prime


class FieldError(Exception):
    pass


class DimensionMismatch(FieldError):
    pass


class SingularMatrix(FieldError):
    pass


# Deterministic Miller-Rabin witnesses for all n < 3.3 * 10^24 (covers u64).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime_u64(n: int) -> bool:
    """Deterministic Miller-Rabin primality test, exact for n < 2^64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class OpCounter:
    """Mutable tally of field multiplications, additions, and inversions.

    Scoped per logical task; totals only ever increase within a scope.
    Inversions are tracked separately because a division costs several
    multiplications and the schemes under comparison differ exactly in
    whether they divide at all.
    """

    __slots__ = ("mul_count", "add_count", "inv_count")

    def __init__(self) -> None:
        self.mul_count = 0
        self.add_count = 0
        self.inv_count = 0

    def reset(self) -> None:
        self.mul_count = 0
        self.add_count = 0
        self.inv_count = 0

    def absorb(self, other: "OpCounter") -> None:
        self.mul_count += other.mul_count
        self.add_count += other.add_count
        self.inv_count += other.inv_count

    def as_dict(self) -> dict:
        return {
            "mul_count": self.mul_count,
            "add_count": self.add_count,
            "inv_count": self.inv_count,
        }

    def __repr__(self) -> str:
        return f"OpCounter(mul={self.mul_count}, add={self.add_count}, inv={self.inv_count})"


class PrimeField:
    """The field Z/pZ for a prime p that fits in 64 bits."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int = M61):
        if modulus >= (1 << 64):
            raise ValueError(f"modulus {modulus} does not fit in 64 bits")
        if not is_prime_u64(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(self.modulus)

    def __repr__(self) -> str:
        return f"PrimeField({self.modulus})"

    # Scalar helpers.  These are not op-counted; counting happens in the
    # bulk operations below whose counts the reports actually use.
    def element(self, v: int) -> int:
        return v % self.modulus

    def add(self, a: int, b: int) -> int:
        s = a + b
        p = self.modulus
        return s - p if s >= p else s

    def sub(self, a: int, b: int) -> int:
        d = a - b
        return d + self.modulus if d < 0 else d

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def neg(self, a: int) -> int:
        return self.modulus - a if a else 0

    def inv(self, a: int, counter: OpCounter | None = None) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if counter is not None:
            counter.inv_count += 1
        return pow(a, self.modulus - 2, self.modulus)

    def check_exponent_bound(self, max_exponent: int) -> None:
        # Monomials x^e must stay distinct as functions on the nonzero
        # elements, which holds only while e < p - 1 (the group order).
        if max_exponent >= self.modulus - 1:
            raise ValueError(
                f"exponent {max_exponent} too large for modulus {self.modulus}; "
                "need max exponent < modulus - 1"
            )

    def rand_element(self, rng) -> int:
        return rng.randrange(self.modulus)

    def rand_nonzero(self, rng) -> int:
        return rng.randrange(1, self.modulus)

    def distinct_nonzero(self, rng, count: int, exclude=()) -> list[int]:
        """Draw `count` distinct nonzero elements avoiding `exclude`."""
        banned = set(exclude)
        if count + len(banned) > self.modulus - 1:
            raise ValueError(
                f"cannot draw {count} distinct nonzero points from GF({self.modulus})"
            )
        out: list[int] = []
        seen = set(banned)
        while len(out) < count:
            x = rng.randrange(1, self.modulus)
            if x not in seen:
                seen.add(x)
                out.append(x)
        return out


def field_pow(field: PrimeField, x: int, e: int, counter: OpCounter | None = None) -> int:
    """x^e by left-to-right square-and-multiply, counting multiplications.

    Uses at most 2*floor(log2 e) multiplications for e >= 1; the count
    depends only on the bit pattern of e.
    """
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if e == 0:
        return 1
    p = field.modulus
    muls = 0
    result = x % p
    for bit in bin(e)[3:]:  # skip '0b' and the leading 1-bit
        result = result * result % p
        muls += 1
        if bit == "1":
            result = result * x % p
            muls += 1
    if counter is not None:
        counter.mul_count += muls
    return result


class FieldMatrix:
    """Dense matrix over a prime field; entries are a row-major int list."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: list[int]):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "FieldMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "FieldMatrix":
        ent = [0] * (n * n)
        for i in range(n):
            ent[i * n + i] = 1
        return cls(n, n, ent)

    @classmethod
    def from_rows(cls, rows_data) -> "FieldMatrix":
        rows = len(rows_data)
        cols = len(rows_data[0]) if rows else 0
        ent: list[int] = []
        for r in rows_data:
            if len(r) != cols:
                raise ValueError("ragged rows")
            ent.extend(r)
        return cls(rows, cols, ent)

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[int]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [self.row(i) for i in range(self.rows)]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, tuple(self.entries)))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.rows}x{self.cols}, {self.entries!r})"

    def to_json_dict(self) -> dict:
        # Entries as decimal strings: JSON numbers lose exactness past 2^53.
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [str(e) for e in self.entries],
        }

    @classmethod
    def from_json_dict(cls, d: dict, field: PrimeField | None = None) -> "FieldMatrix":
        entries = [int(e) for e in d["entries"]]
        if field is not None:
            p = field.modulus
            if any(e < 0 or e >= p for e in entries):
                raise ValueError("entry out of field range")
        return cls(int(d["rows"]), int(d["cols"]), entries)


def mat_mul(
    field: PrimeField,
    a: FieldMatrix,
    b: FieldMatrix,
    counter: OpCounter | None = None,
) -> FieldMatrix:
    """Schoolbook product; counts a.rows * a.cols * b.cols multiplications."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} times {b.rows}x{b.cols}")
    p = field.modulus
    n, k, m = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = [0] * (n * m)
    for i in range(n):
        arow = ae[i * k : (i + 1) * k]
        base = i * m
        for j in range(m):
            acc = 0
            idx = j
            for t in range(k):
                acc += arow[t] * be[idx]
                idx += m
            out[base + j] = acc % p
    if counter is not None:
        counter.mul_count += n * k * m
        counter.add_count += n * m * (k - 1 if k > 0 else 0)
    return FieldMatrix(n, m, out)


def mat_add(
    field: PrimeField,
    a: FieldMatrix,
    b: FieldMatrix,
    counter: OpCounter | None = None,
) -> FieldMatrix:
    if a.rows != b.rows or a.cols != b.cols:
        raise DimensionMismatch("matrix addition shape mismatch")
    p = field.modulus
    out = [(x + y) % p for x, y in zip(a.entries, b.entries)]
    if counter is not None:
        counter.add_count += a.rows * a.cols
    return FieldMatrix(a.rows, a.cols, out)


def mat_sub(
    field: PrimeField,
    a: FieldMatrix,
    b: FieldMatrix,
    counter: OpCounter | None = None,
) -> FieldMatrix:
    if a.rows != b.rows or a.cols != b.cols:
        raise DimensionMismatch("matrix subtraction shape mismatch")
    p = field.modulus
    out = [(x - y) % p for x, y in zip(a.entries, b.entries)]
    if counter is not None:
        counter.add_count += a.rows * a.cols
    return FieldMatrix(a.rows, a.cols, out)


def mat_scale(
    field: PrimeField,
    s: int,
    a: FieldMatrix,
    counter: OpCounter | None = None,
) -> FieldMatrix:
    p = field.modulus
    out = [s * x % p for x in a.entries]
    if counter is not None:
        counter.mul_count += a.rows * a.cols
    return FieldMatrix(a.rows, a.cols, out)


def mat_random(field: PrimeField, rows: int, cols: int, rng) -> FieldMatrix:
    """Uniform random matrix; deterministic given the rng stream."""
    p = field.modulus
    return FieldMatrix(rows, cols, [rng.randrange(p) for _ in range(rows * cols)])


def solve_linear(
    field: PrimeField,
    v: FieldMatrix,
    rhs: list[FieldMatrix],
    counter: OpCounter | None = None,
) -> list[FieldMatrix]:
    """Solve V * C = rhs block-wise by Gaussian elimination over the field.

    V is L x L; rhs is a list of L equally-shaped matrix blocks.  Raises
    SingularMatrix when no nonzero pivot exists in some column, which
    signals the decoder to try different evaluation points.  Each pivot
    costs one inversion (tallied in inv_count).
    """
    if v.rows != v.cols:
        raise DimensionMismatch("V must be square")
    n = v.rows
    if len(rhs) != n:
        raise DimensionMismatch("rhs block count must equal V's row count")
    if n == 0:
        return []
    br, bc = rhs[0].rows, rhs[0].cols
    for blk in rhs:
        if blk.rows != br or blk.cols != bc:
            raise DimensionMismatch("rhs blocks must share dimensions")

    p = field.modulus
    a = [v.row(i) for i in range(n)]
    b = [list(blk.entries) for blk in rhs]
    muls = 0
    invs = 0
    blen = br * bc

    for col in range(n):
        pivot = None
        for r in range(col, n):
            if a[r][col]:
                pivot = r
                break
        if pivot is None:
            raise SingularMatrix(f"no nonzero pivot in column {col}")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            b[col], b[pivot] = b[pivot], b[col]
        inv = pow(a[col][col], p - 2, p)
        invs += 1
        arow = a[col]
        for j in range(col, n):
            arow[j] = arow[j] * inv % p
        brow = b[col]
        for j in range(blen):
            brow[j] = brow[j] * inv % p
        muls += (n - col) + blen
        for r in range(col + 1, n):
            f = a[r][col]
            if not f:
                continue
            rrow = a[r]
            for j in range(col, n):
                rrow[j] = (rrow[j] - f * arow[j]) % p
            rb = b[r]
            for j in range(blen):
                rb[j] = (rb[j] - f * brow[j]) % p
            muls += (n - col) + blen

    # Back substitution on the unit upper-triangular system.
    for col in range(n - 1, -1, -1):
        bcol = b[col]
        for r in range(col):
            f = a[r][col]
            if not f:
                continue
            rb = b[r]
            for j in range(blen):
                rb[j] = (rb[j] - f * bcol[j]) % p
            a[r][col] = 0
            muls += blen

    if counter is not None:
        counter.mul_count += muls
        counter.inv_count += invs
    return [FieldMatrix(br, bc, row) for row in b]
