"""Baseline batch-multiplication codes behind the rook pipeline interface.

LCC interpolates the inputs at anchor points z_i and ships evaluations of
that interpolant; CSA ships evaluations of a rational encoding with poles
at the anchors.  Both have recovery threshold 2n-1 and both must divide
while encoding, which is the cost the rook path avoids.  Plain replication
rounds out the comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exponents import ExponentPair, base3_exponents, behrend_exponents, poly_code_exponents, sum_support
from .field import (
    DimensionMismatch,
    FieldError,
    FieldMatrix,
    OpCounter,
    PrimeField,
    field_pow,
    mat_add,
    mat_mul,
    mat_scale,
    solve_linear,
)
from .rook import DuplicateEvaluationPoint, NotEnoughProducts, WorkerProduct, WorkerShare


class PoleEvaluation(FieldError):
    pass


class UncoveredPair(FieldError):
    pass


# --- LCC --------------------------------------------------------------------


@dataclass(frozen=True)
class LccScheme:
    field: PrimeField
    z: tuple
    eval_points: tuple

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def threshold(self) -> int:
        return 2 * self.n - 1


def make_lcc_scheme(n, field, m, rng=None, z=None, eval_points=None) -> LccScheme:
    """Anchors default to 1..n; explicit eval points may coincide with them
    (the interpolation property makes anchor evaluations trivially valid),
    though the random draw avoids them."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if 2 * n - 1 > field.modulus:
        raise ValueError(f"need 2n-1 <= {field.modulus} distinct points")
    if z is None:
        z = tuple(range(1, n + 1))
    else:
        z = tuple(v % field.modulus for v in z)
    if len(set(z)) != n:
        raise ValueError("anchors must be pairwise distinct")
    if eval_points is None:
        if rng is None:
            raise ValueError("need rng or explicit eval_points")
        eval_points = tuple(field.distinct_nonzero(rng, m, exclude=z))
    else:
        eval_points = tuple(x % field.modulus for x in eval_points)
        if len(set(eval_points)) != len(eval_points):
            raise ValueError("evaluation points must be pairwise distinct")
    return LccScheme(field=field, z=z, eval_points=eval_points)


def _lagrange_basis(field, z, x, counter):
    """L_i(x) = prod_{j != i} (x - z_j) / (z_i - z_j); one inversion each."""
    p = field.modulus
    out = []
    muls = 0
    for i, zi in enumerate(z):
        num = 1
        den = 1
        for j, zj in enumerate(z):
            if j == i:
                continue
            num = num * (x - zj) % p
            den = den * (zi - zj) % p
            muls += 2
        inv = field.inv(den, counter)
        out.append(num * inv % p)
        muls += 1
    if counter is not None:
        counter.mul_count += muls
    return out


def lcc_encode(scheme: LccScheme, inputs, worker_id: int, counter: OpCounter | None = None) -> WorkerShare:
    """Evaluate the Lagrange interpolants of the inputs at x_w."""
    field = scheme.field
    x = scheme.eval_points[worker_id]
    basis = _lagrange_basis(field, scheme.z, x, counter)
    a = None
    b = None
    for coeff, (ai, bi) in zip(basis, inputs):
        ta = mat_scale(field, coeff, ai, counter)
        tb = mat_scale(field, coeff, bi, counter)
        a = ta if a is None else mat_add(field, a, ta, counter)
        b = tb if b is None else mat_add(field, b, tb, counter)
    return WorkerShare(worker_id=worker_id, x=x, a_tilde=a, b_tilde=b)


def _select_products(products, needed):
    if len(products) < needed:
        raise NotEnoughProducts(f"need {needed} products, have {len(products)}")
    chosen = list(products[:needed])
    if len({pr.x for pr in chosen}) != needed:
        raise DuplicateEvaluationPoint("duplicate x among selected products")
    return chosen


def lcc_decode(products, scheme: LccScheme, counter: OpCounter | None = None):
    """Interpolate the degree-(2n-2) product polynomial, evaluate at anchors."""
    field = scheme.field
    n = scheme.n
    L = 2 * n - 1
    chosen = _select_products(products, L)
    rows = []
    for pr in chosen:
        row = [1]
        for _ in range(L - 1):
            row.append(field.mul(row[-1], pr.x))
        if counter is not None:
            counter.mul_count += L - 1
        rows.append(row)
    coeffs = solve_linear(field, FieldMatrix.from_rows(rows), [pr.e for pr in chosen], counter)
    out = []
    for zi in scheme.z:
        acc = coeffs[-1]
        for j in range(L - 2, -1, -1):
            acc = mat_add(field, coeffs[j], mat_scale(field, zi, acc, counter), counter)
        out.append(acc)
    return out


# --- CSA --------------------------------------------------------------------


@dataclass(frozen=True)
class CsaScheme:
    field: PrimeField
    z: tuple
    eval_points: tuple
    residues: tuple  # c_i = prod_{k != i} (z_k - z_i)

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def threshold(self) -> int:
        return 2 * self.n - 1


def make_csa_scheme(n, field, m, rng=None, z=None, eval_points=None) -> CsaScheme:
    """Anchors 1..n; eval points drawn disjoint from the anchors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if z is None:
        z = tuple(range(1, n + 1))
    else:
        z = tuple(v % field.modulus for v in z)
    if len(set(z)) != n:
        raise ValueError("anchors must be pairwise distinct")
    if eval_points is None:
        if rng is None:
            raise ValueError("need rng or explicit eval_points")
        eval_points = tuple(field.distinct_nonzero(rng, m, exclude=z))
    else:
        eval_points = tuple(x % field.modulus for x in eval_points)
        if len(set(eval_points)) != len(eval_points):
            raise ValueError("evaluation points must be pairwise distinct")
        if set(eval_points) & set(z):
            raise ValueError("evaluation points must avoid the anchors")
    p = field.modulus
    residues = []
    for i, zi in enumerate(z):
        c = 1
        for k, zk in enumerate(z):
            if k != i:
                c = c * (zk - zi) % p
        residues.append(c)
    return CsaScheme(field=field, z=z, eval_points=eval_points, residues=tuple(residues))


def csa_encode(scheme: CsaScheme, inputs, worker_id: int, counter: OpCounter | None = None) -> WorkerShare:
    """A~(x) = f(x) * sum_i A_i/(z_i - x);  B~(x) = sum_i B_i/(z_i - x)."""
    field = scheme.field
    p = field.modulus
    x = scheme.eval_points[worker_id]
    if x in scheme.z:
        raise PoleEvaluation(f"x = {x} is an anchor pole")
    invs = [field.inv((zi - x) % p, counter) for zi in scheme.z]
    f = (scheme.z[0] - x) % p
    for zi in scheme.z[1:]:
        f = f * (zi - x) % p
    if counter is not None:
        counter.mul_count += scheme.n - 1
    a = None
    b = None
    for inv_i, (ai, bi) in zip(invs, inputs):
        ta = mat_scale(field, inv_i, ai, counter)
        tb = mat_scale(field, inv_i, bi, counter)
        a = ta if a is None else mat_add(field, a, ta, counter)
        b = tb if b is None else mat_add(field, b, tb, counter)
    a = mat_scale(field, f, a, counter)
    return WorkerShare(worker_id=worker_id, x=x, a_tilde=a, b_tilde=b)


def csa_decode(products, scheme: CsaScheme, counter: OpCounter | None = None):
    """Separate pole residues from the polynomial noise part and rescale.

    The product evaluations satisfy E_w = sum_i D_i/(z_i - x_w) + sum_j N_j x_w^j
    with D_i = c_i * A_i B_i, so a (2n-1)-column solve recovers the D_i and
    the noise blocks are discarded.
    """
    field = scheme.field
    p = field.modulus
    n = scheme.n
    L = 2 * n - 1
    chosen = _select_products(products, L)
    rows = []
    for pr in chosen:
        row = [field.inv((zi - pr.x) % p, counter) for zi in scheme.z]
        poly = 1
        for j in range(n - 1):
            row.append(poly)
            if j < n - 2:
                poly = field.mul(poly, pr.x)
        if counter is not None and n > 2:
            counter.mul_count += n - 2
        rows.append(row)
    blocks = solve_linear(field, FieldMatrix.from_rows(rows), [pr.e for pr in chosen], counter)
    out = []
    for i in range(n):
        c_inv = field.inv(scheme.residues[i], counter)
        out.append(mat_scale(field, c_inv, blocks[i], counter))
    return out


# --- replication -------------------------------------------------------------


@dataclass(frozen=True)
class ReplicationScheme:
    n: int
    lam: int

    @property
    def m(self) -> int:
        return self.lam * self.n

    def assignment(self, worker_id: int) -> int:
        return worker_id % self.n

    @property
    def threshold(self) -> int:
        # Worst case: all lambda replicas of one pair may fail together.
        return self.m - self.lam + 1


def replication_run(
    field: PrimeField,
    inputs,
    lam: int,
    alive_workers,
    counter: OpCounter | None = None,
):
    """Compute every pair's product from its first alive replica.

    Workers are assigned round-robin (worker w handles pair w mod n).
    Raises UncoveredPair when some pair lost all lambda replicas.
    """
    n = len(inputs)
    scheme = ReplicationScheme(n=n, lam=lam)
    alive = sorted(set(alive_workers))
    if any(w < 0 or w >= scheme.m for w in alive):
        raise ValueError("alive worker id out of range")
    chosen = {}
    for w in alive:
        idx = scheme.assignment(w)
        if idx not in chosen:
            chosen[idx] = w
    missing = [i for i in range(n) if i not in chosen]
    if missing:
        raise UncoveredPair(f"pairs {missing} have no alive replica")
    out = []
    for i in range(n):
        a, b = inputs[i]
        out.append(mat_mul(field, a, b, counter))
    return out


# --- descriptors -------------------------------------------------------------

ROOK_SCHEMES = ("rook-poly", "rook-base3", "rook-behrend")
ALL_SCHEMES = ROOK_SCHEMES + ("lcc", "csa", "replication")


@dataclass(frozen=True)
class SchemeDescriptor:
    """Which code to run, plus its parameters."""

    scheme: str
    n: int
    lam: int | None = None
    exponents: ExponentPair | None = None

    def __post_init__(self):
        if self.scheme not in ALL_SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.scheme == "replication" and (self.lam is None or self.lam < 1):
            raise ValueError("replication needs lambda >= 1")

    def to_json_dict(self) -> dict:
        d = {"scheme": self.scheme, "n": self.n}
        if self.lam is not None:
            d["lambda"] = self.lam
        if self.exponents is not None:
            d["exponents"] = self.exponents.to_json_dict()
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "SchemeDescriptor":
        exps = d.get("exponents")
        return cls(
            scheme=d["scheme"],
            n=int(d["n"]),
            lam=int(d["lambda"]) if "lambda" in d else None,
            exponents=ExponentPair.from_json_dict(exps) if exps else None,
        )


def rook_exponents_for(descriptor: SchemeDescriptor) -> ExponentPair:
    if descriptor.exponents is not None:
        return descriptor.exponents
    if descriptor.scheme == "rook-poly":
        return poly_code_exponents(descriptor.n)
    if descriptor.scheme == "rook-base3":
        return base3_exponents(descriptor.n)
    if descriptor.scheme == "rook-behrend":
        return behrend_exponents(descriptor.n)
    raise ValueError(f"{descriptor.scheme} has no exponent pair")


def scheme_threshold(descriptor: SchemeDescriptor) -> int:
    """Recovery threshold: |P+Q| for rook codes, 2n-1 for LCC/CSA,
    m - lambda + 1 (worst case) for replication."""
    if descriptor.scheme in ROOK_SCHEMES:
        return sum_support(rook_exponents_for(descriptor)).L
    if descriptor.scheme in ("lcc", "csa"):
        return 2 * descriptor.n - 1
    return ReplicationScheme(n=descriptor.n, lam=descriptor.lam).threshold
