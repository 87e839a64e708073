"""Deterministic master-worker simulator with fail-stop and straggler faults.

Each worker draws its fate from a PRNG stream keyed by (seed, worker id),
so a run is reproducible regardless of host parallelism: failed workers
never respond, survivors respond at base_delay * (work size) plus an
exponential straggle term, and the master consumes responses in completion
order, attempting a decode once the scheme's threshold is reached.  Every
successful decode is verified against direct per-pair products.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import random
from dataclasses import dataclass, field as dc_field

from . import baselines, rook
from .baselines import ReplicationScheme, SchemeDescriptor, scheme_threshold
from .field import M61, FieldError, OpCounter, PrimeField, mat_mul, mat_random


class ConfigInvalid(Exception):
    pass


@dataclass(frozen=True)
class FaultModel:
    fail_prob: float = 0.0  # fail-stop: the worker never responds
    straggle_mean: float = 0.0  # mean of exponential extra delay
    base_delay: float = 1.0  # sim-units per unit of multiply work

    def validate(self):
        if not 0.0 <= self.fail_prob <= 1.0:
            raise ConfigInvalid(f"fail_prob {self.fail_prob} outside [0, 1]")
        if self.straggle_mean < 0 or self.base_delay < 0:
            raise ConfigInvalid("delays must be nonnegative")


@dataclass(frozen=True)
class SimConfig:
    descriptor: SchemeDescriptor
    m: int
    dims: tuple = (2, 2, 2)  # (rows of A, inner, cols of B)
    seed: int = 0
    encode_at: str = "master"  # master | workers
    fault: FaultModel = dc_field(default_factory=FaultModel)
    modulus: int = M61


@dataclass
class SimReport:
    scheme: str
    n: int
    m: int
    seed: int
    success: bool
    responses_received: int
    responses_used: int
    failed_workers: list
    threshold: int
    encode_muls: int
    encode_invs: int
    worker_muls: int
    decode_muls: int
    decode_invs: int
    wallclock_sim_units: float
    verified: bool
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "n": self.n,
            "m": self.m,
            "seed": self.seed,
            "success": self.success,
            "responses_received": self.responses_received,
            "responses_used": self.responses_used,
            "failed_workers": list(self.failed_workers),
            "threshold": self.threshold,
            "encode_muls": self.encode_muls,
            "encode_invs": self.encode_invs,
            "worker_muls": self.worker_muls,
            "decode_muls": self.decode_muls,
            "decode_invs": self.decode_invs,
            "wallclock_sim_units": self.wallclock_sim_units,
            "verified": self.verified,
            "error": self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def stream(seed: int, *key) -> random.Random:
    """Independent PRNG stream keyed by (seed, *key); stable across runs."""
    material = repr((int(seed),) + tuple(key)).encode()
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _validate(config: SimConfig):
    if config.m < 1:
        raise ConfigInvalid("m must be >= 1")
    if len(config.dims) != 3 or any(d < 1 for d in config.dims):
        raise ConfigInvalid("dims must be three positive integers")
    if config.encode_at not in ("master", "workers"):
        raise ConfigInvalid(f"encode_at must be master or workers, got {config.encode_at!r}")
    config.fault.validate()
    desc = config.descriptor
    if desc.scheme == "replication" and config.m != desc.lam * desc.n:
        raise ConfigInvalid(
            f"replication needs m = lambda*n = {desc.lam * desc.n}, got {config.m}"
        )


def run_simulation(config: SimConfig) -> SimReport:
    """One full encode / fault-inject / collect / decode / verify round."""
    _validate(config)
    desc = config.descriptor
    fld = PrimeField(config.modulus)
    rows, inner, cols = config.dims
    n = desc.n
    seed = config.seed

    inputs = [
        (
            mat_random(fld, rows, inner, stream(seed, "input", i, "a")),
            mat_random(fld, inner, cols, stream(seed, "input", i, "b")),
        )
        for i in range(n)
    ]
    oracle = [mat_mul(fld, a, b) for a, b in inputs]

    threshold = scheme_threshold(desc)
    report = SimReport(
        scheme=desc.scheme,
        n=n,
        m=config.m,
        seed=seed,
        success=False,
        responses_received=0,
        responses_used=0,
        failed_workers=[],
        threshold=threshold,
        encode_muls=0,
        encode_invs=0,
        worker_muls=0,
        decode_muls=0,
        decode_invs=0,
        wallclock_sim_units=0.0,
        verified=False,
    )
    if config.m < threshold:
        # Still runnable (faults may not matter for replication's realized
        # coverage), but the worst case cannot be satisfied.
        report.error = "InsufficientWorkers"

    scheme_rng = stream(seed, "scheme")
    encode_ctr = OpCounter()
    decode_ctr = OpCounter()

    if desc.scheme in baselines.ROOK_SCHEMES:
        pair = baselines.rook_exponents_for(desc)
        scheme = rook.make_rook_scheme(pair, fld, config.m, rng=scheme_rng)
        encode_one = lambda w, ctr: rook.rook_encode_share(scheme, inputs, w, ctr)
        decode = lambda prods: rook.rook_decode(prods, scheme, decode_ctr)
    elif desc.scheme == "lcc":
        scheme = baselines.make_lcc_scheme(n, fld, config.m, rng=scheme_rng)
        encode_one = lambda w, ctr: baselines.lcc_encode(scheme, inputs, w, ctr)
        decode = lambda prods: baselines.lcc_decode(prods, scheme, decode_ctr)
    elif desc.scheme == "csa":
        scheme = baselines.make_csa_scheme(n, fld, config.m, rng=scheme_rng)
        encode_one = lambda w, ctr: baselines.csa_encode(scheme, inputs, w, ctr)
        decode = lambda prods: baselines.csa_decode(prods, scheme, decode_ctr)
    elif desc.scheme == "replication":
        scheme = ReplicationScheme(n=n, lam=desc.lam)
        encode_one = None
        decode = None
    else:  # pragma: no cover - descriptor validation rules this out
        raise ConfigInvalid(f"unhandled scheme {desc.scheme}")

    # Fault and timing draws, one stream per worker.
    work_units = rows * inner * cols
    arrivals = []
    failed = []
    for w in range(config.m):
        wrng = stream(seed, "worker", w)
        if wrng.random() < config.fault.fail_prob:
            failed.append(w)
            continue
        t = config.fault.base_delay * work_units
        if config.fault.straggle_mean > 0:
            t += wrng.expovariate(1.0 / config.fault.straggle_mean)
        arrivals.append((t, w))
    arrivals.sort()
    report.failed_workers = failed
    report.responses_received = len(arrivals)

    if desc.scheme == "replication":
        return _run_replication(config, fld, scheme, inputs, oracle, arrivals, report)

    # Encoding cost lands on the master (all m shares) or on each surviving
    # worker, depending on where encoding is delegated.
    survivors = {w for _, w in arrivals}
    shares = {}
    if config.encode_at == "master":
        for w in range(config.m):
            shares[w] = encode_one(w, encode_ctr)
    else:
        for w in sorted(survivors):
            shares[w] = encode_one(w, encode_ctr)

    worker_ctr = OpCounter()
    products_by_worker = {
        w: rook.rook_worker(fld, shares[w], worker_ctr) for w in sorted(survivors)
    }

    products = []
    decoded = None
    used = 0
    clock = 0.0
    for t, w in arrivals:
        products.append(products_by_worker[w])
        clock = t
        if len(products) < threshold:
            continue
        try:
            decoded = decode(products)
        except FieldError as exc:
            report.error = type(exc).__name__
            continue
        used = threshold
        report.error = None
        break

    report.encode_muls = encode_ctr.mul_count
    report.encode_invs = encode_ctr.inv_count
    report.worker_muls = worker_ctr.mul_count
    report.decode_muls = decode_ctr.mul_count
    report.decode_invs = decode_ctr.inv_count
    report.wallclock_sim_units = clock

    if decoded is None:
        report.success = False
        if report.error is None:
            report.error = "InsufficientWorkers"
        return report

    report.success = True
    report.responses_used = used
    report.verified = decoded == oracle
    return report


def _run_replication(config, fld, scheme, inputs, oracle, arrivals, report):
    # Every responding worker multiplies its assigned pair, whether or not
    # the master ends up using that copy.
    worker_ctr = OpCounter()
    responses = {
        w: mat_mul(fld, *inputs[scheme.assignment(w)], worker_ctr) for _, w in arrivals
    }
    covered = {}
    used = 0
    clock = 0.0
    for t, w in arrivals:
        used += 1
        clock = t
        covered.setdefault(scheme.assignment(w), responses[w])
        if len(covered) == scheme.n:
            break
    report.worker_muls = worker_ctr.mul_count
    report.wallclock_sim_units = clock
    if len(covered) < scheme.n:
        report.success = False
        report.error = "UncoveredPair" if arrivals else "InsufficientWorkers"
        return report
    decoded = [covered[i] for i in range(scheme.n)]
    report.success = True
    report.responses_used = used
    report.error = None
    report.verified = decoded == oracle
    return report


SWEEP_COLUMNS = (
    "scheme",
    "n",
    "trial",
    "threshold",
    "responses_used",
    "encode_muls",
    "encode_invs",
    "worker_muls",
    "decode_time",
    "success",
    "verified",
)


def sweep(
    schemes,
    n_values,
    trials: int = 1,
    extra_workers: int = 4,
    dims: tuple = (2, 2, 2),
    seed: int = 0,
    encode_at: str = "master",
    fault: FaultModel | None = None,
    modulus: int = M61,
    lam: int = 2,
):
    """Run trials per (scheme, n); one row each plus a mean row per group.

    Worker count is threshold + extra_workers (replication uses lambda * n).
    decode_time is an op-count proxy: decode multiplications + inversions.
    """
    fault = fault or FaultModel()
    out_rows = []
    for scheme_name in schemes:
        for n in n_values:
            if scheme_name == "replication":
                desc = SchemeDescriptor(scheme=scheme_name, n=n, lam=lam)
                m = lam * n
            else:
                desc = SchemeDescriptor(scheme=scheme_name, n=n)
                m = scheme_threshold(desc) + extra_workers
            group = []
            for trial in range(trials):
                cfg = SimConfig(
                    descriptor=desc,
                    m=m,
                    dims=dims,
                    seed=stream(seed, scheme_name, n, trial).getrandbits(63),
                    encode_at=encode_at,
                    fault=fault,
                    modulus=modulus,
                )
                rep = run_simulation(cfg)
                row = {
                    "scheme": scheme_name,
                    "n": n,
                    "trial": trial,
                    "threshold": rep.threshold,
                    "responses_used": rep.responses_used,
                    "encode_muls": rep.encode_muls,
                    "encode_invs": rep.encode_invs,
                    "worker_muls": rep.worker_muls,
                    "decode_time": rep.decode_muls + rep.decode_invs,
                    "success": int(rep.success),
                    "verified": int(rep.verified),
                }
                group.append(row)
                out_rows.append(row)
            if group:
                mean_row = {"scheme": scheme_name, "n": n, "trial": "mean"}
                for col in SWEEP_COLUMNS[3:]:
                    mean_row[col] = sum(r[col] for r in group) / len(group)
                out_rows.append(mean_row)
    return out_rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
