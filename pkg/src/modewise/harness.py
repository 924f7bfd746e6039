"""Recovery-experiment sweep: seeded trials over schemes and dimensions.

Every trial is reproducible in isolation: truth tensors, operators, noise,
and solver initialization each get a seed derived from the master seed with a
fixed 64-bit mixing function.  Truth and initialization seeds depend only on
the trial index, so cells of the same sweep see paired inputs and success is
comparable across target dimensions.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .decomposition import random_low_rank
from .measurement import (
    MeasurementOperator,
    ModewiseOperator,
    TwoStageOperator,
    VectorizedOperator,
    make_gaussian,
    make_sors,
    measure,
)
from .tensor import ReshapePlan
from .tiht import TihtConfig, tiht_recover

SCHEMES = (
    "vectorized_gaussian",
    "vectorized_sors",
    "modewise_gaussian",
    "modewise_sors",
    "twostage_gaussian",
    "twostage_sors",
)

CSV_COLUMNS = (
    "scheme",
    "m_intermediate",
    "m0",
    "trials",
    "successes",
    "fraction",
    "mean_iters_success",
    "storage_entries",
    "wall_time_s",
    "seed",
)

_MASK = (1 << 64) - 1
_ROLE_TRUTH = 1
_ROLE_OPERATOR = 2
_ROLE_NOISE = 3
_ROLE_INIT = 4


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *parts: int) -> int:
    """Mix the master seed with integer coordinates into a fresh 64-bit seed."""
    h = master & _MASK
    for p in parts:
        h = _splitmix64(h ^ (p & _MASK))
    return h


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: a single scheme over intermediate and target dimensions."""

    n: int = 10
    d: int = 4
    kappa: int = 2
    rank: tuple[int, ...] = (2, 2, 2, 2)
    scheme: str = "twostage_sors"
    intermediate_m: tuple[int, ...] = (90, 80, 70)
    m0: tuple[int, ...] = (600, 800, 1000)
    trials: int = 100
    noise_norm: float = 0.0
    master_seed: int = 0
    max_iterations: int = 1000
    success_factor: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "rank", tuple(int(r) for r in self.rank))
        object.__setattr__(self, "intermediate_m", tuple(int(m) for m in self.intermediate_m))
        object.__setattr__(self, "m0", tuple(int(m) for m in self.m0))
        validate_spec(self)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "kappa": self.kappa,
            "rank": list(self.rank),
            "scheme": self.scheme,
            "intermediate_m": list(self.intermediate_m),
            "m0": list(self.m0),
            "trials": self.trials,
            "noise_norm": self.noise_norm,
            "master_seed": self.master_seed,
            "max_iterations": self.max_iterations,
            "success_factor": self.success_factor,
        }


def validate_spec(spec: ExperimentSpec) -> None:
    if spec.n < 1:
        raise ValueError("n: must be >= 1")
    if spec.d < 1:
        raise ValueError("d: must be >= 1")
    if spec.kappa < 1 or spec.d % spec.kappa != 0:
        raise ValueError(f"kappa: {spec.kappa} does not divide d={spec.d}")
    if spec.scheme not in SCHEMES:
        raise ValueError(f"scheme: {spec.scheme!r} is not one of {SCHEMES}")
    if len(spec.rank) != spec.d or any(not 1 <= r <= spec.n for r in spec.rank):
        raise ValueError(f"rank: {spec.rank} incompatible with shape {(spec.n,) * spec.d}")
    full = spec.n**spec.d
    if any(not 1 <= m0 <= full for m0 in spec.m0):
        raise ValueError(f"m0: entries must lie in [1, n^d = {full}]")
    reshaped = spec.n**spec.kappa
    if any(not 1 <= m <= reshaped for m in spec.intermediate_m):
        raise ValueError(f"intermediate_m: entries must lie in [1, n^kappa = {reshaped}]")
    if spec.trials < 1:
        raise ValueError("trials: must be >= 1")
    if spec.noise_norm < 0:
        raise ValueError("noise_norm: must be >= 0")
    if spec.max_iterations < 1:
        raise ValueError("max_iterations: must be >= 1")
    if not 0.0 < spec.success_factor < 1.0:
        raise ValueError("success_factor: must lie in (0, 1)")


@dataclass(frozen=True)
class CellRow:
    scheme: str
    m_intermediate: int
    m0: int
    trials: int
    successes: int
    fraction: float
    mean_iters_success: float | None
    storage_entries: int
    wall_time_s: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "m_intermediate": self.m_intermediate,
            "m0": self.m0,
            "trials": self.trials,
            "successes": self.successes,
            "fraction": self.fraction,
            "mean_iters_success": self.mean_iters_success,
            "storage_entries": self.storage_entries,
            "wall_time_s": self.wall_time_s,
            "seed": self.seed,
        }


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    rows: list[CellRow]
    skipped: list[dict] = field(default_factory=list)


def _scheme_id(scheme: str) -> int:
    return SCHEMES.index(scheme)


def build_operator(
    scheme: str, n: int, d: int, kappa: int, m: int | None, m0: int | None, seed: int
) -> MeasurementOperator:
    """Fresh operator for one trial; every matrix gets a derived sub-seed."""
    shape = (n,) * d
    family, kind = scheme.split("_")
    draw = make_gaussian if kind == "gaussian" else _sors_matrix
    if family == "vectorized":
        return VectorizedOperator(draw(m0, n**d, derive_seed(seed, 0)), shape)
    plan = ReshapePlan(shape, kappa)
    matrices = [
        draw(m, plan.target_shape[i], derive_seed(seed, i)) for i in range(plan.d_prime)
    ]
    if family == "modewise":
        return ModewiseOperator(plan, matrices)
    second = draw(m0, m**plan.d_prime, derive_seed(seed, plan.d_prime))
    return TwoStageOperator(plan, matrices, second)


def _sors_matrix(m, n, seed):
    return make_sors(m, n, seed).matrix


def _cells(spec: ExperimentSpec):
    """Cell grid as (m_intermediate, m0) pairs; 0 marks an unused axis."""
    family = spec.scheme.split("_")[0]
    if family == "vectorized":
        return [(0, m0) for m0 in spec.m0]
    if family == "modewise":
        return [(m, 0) for m in spec.intermediate_m]
    return [(m, m0) for m in spec.intermediate_m for m0 in spec.m0]


def run_trial(spec: ExperimentSpec, m: int, m0: int, trial: int) -> tuple[bool, int, int]:
    """One seeded trial; returns (success, iterations, storage entries)."""
    sid = _scheme_id(spec.scheme)
    truth = random_low_rank(
        spec.shape, spec.rank, derive_seed(spec.master_seed, _ROLE_TRUTH, trial)
    )
    op = build_operator(
        spec.scheme,
        spec.n,
        spec.d,
        spec.kappa,
        m or None,
        m0 or None,
        derive_seed(spec.master_seed, _ROLE_OPERATOR, sid, m, m0, trial),
    )
    meas = measure(
        op,
        truth,
        spec.noise_norm,
        derive_seed(spec.master_seed, _ROLE_NOISE, sid, m, m0, trial),
    )
    cfg = TihtConfig(
        rank=spec.rank,
        max_iterations=spec.max_iterations,
        success_factor=spec.success_factor,
        seed=derive_seed(spec.master_seed, _ROLE_INIT, trial),
    )
    result = tiht_recover(op, meas.y, cfg, truth=truth)
    return result.success, result.iterations_used, op.storage_entries()


def run_experiment(spec: ExperimentSpec, threads: int = 1, log=None) -> ExperimentReport:
    """Run every feasible grid cell; rows come back in grid order."""
    rows: list[CellRow] = []
    skipped: list[dict] = []
    family = spec.scheme.split("_")[0]
    for m, m0 in _cells(spec):
        if family == "twostage" and m0 > m**(spec.d // spec.kappa):
            skipped.append(
                {
                    "scheme": spec.scheme,
                    "m_intermediate": m,
                    "m0": m0,
                    "reason": f"m0={m0} exceeds first-stage output length {m**(spec.d // spec.kappa)}",
                }
            )
            continue
        start = time.perf_counter()
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(
                    pool.map(lambda t: run_trial(spec, m, m0, t), range(spec.trials))
                )
        else:
            outcomes = [run_trial(spec, m, m0, t) for t in range(spec.trials)]
        elapsed = time.perf_counter() - start
        successes = sum(1 for ok, _, _ in outcomes if ok)
        iters = [it for ok, it, _ in outcomes if ok]
        row = CellRow(
            scheme=spec.scheme,
            m_intermediate=m,
            # modewise sweeps have no second stage; report their actual output length
            m0=m0 if m0 else m ** (spec.d // spec.kappa),
            trials=spec.trials,
            successes=successes,
            fraction=successes / spec.trials,
            mean_iters_success=sum(iters) / len(iters) if iters else None,
            storage_entries=outcomes[0][2],
            wall_time_s=elapsed,
            seed=spec.master_seed,
        )
        rows.append(row)
        if log is not None:
            log(
                f"{spec.scheme} m={m} m0={row.m0}: "
                f"{successes}/{spec.trials} recovered in {elapsed:.1f}s"
            )
    return ExperimentReport(spec=spec, rows=rows, skipped=skipped)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(report: ExperimentReport, include_wall_time: bool = True) -> str:
    """CSV text: fixed column order, LF line endings, '.' decimal separator."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        rec = row.to_dict()
        if not include_wall_time:
            rec["wall_time_s"] = 0.0
        rec["wall_time_s"] = f"{rec['wall_time_s']:.3f}"
        writer.writerow([_format_cell(rec[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_report(report: ExperimentReport, fmt: str, path) -> None:
    """Write the sweep results as ``csv`` rows or a ``json`` document."""
    if fmt == "csv":
        payload = rows_to_csv(report)
    elif fmt == "json":
        payload = json.dumps(
            {
                "spec": report.spec.to_dict(),
                "rows": [row.to_dict() for row in report.rows],
                "skipped": report.skipped,
            },
            indent=2,
        )
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_report_json(path) -> ExperimentReport:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    spec_doc = dict(doc["spec"])
    spec_doc["rank"] = tuple(spec_doc["rank"])
    spec_doc["intermediate_m"] = tuple(spec_doc["intermediate_m"])
    spec_doc["m0"] = tuple(spec_doc["m0"])
    spec = ExperimentSpec(**spec_doc)
    rows = [CellRow(**row) for row in doc["rows"]]
    return ExperimentReport(spec=spec, rows=rows, skipped=list(doc.get("skipped", [])))


_INT_KEYS = ("n", "d", "kappa", "trials", "master_seed", "max_iterations")
_FLOAT_KEYS = ("noise_norm", "success_factor")
_LIST_KEYS = ("rank", "intermediate_m", "m0")
_STR_KEYS = ("scheme",)
CONFIG_KEYS = _INT_KEYS + _FLOAT_KEYS + _LIST_KEYS + _STR_KEYS


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _LIST_KEYS:
            return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ValueError(f"{key}: cannot parse {raw!r}") from exc
    return raw


def parse_config(path=None, overrides=None) -> ExperimentSpec:
    """Build a spec from a flat key=value file plus override values.

    Overrides (typically CLI flags) win over file values, which win over the
    defaults.  Unknown keys and out-of-range values raise with the field name.
    """
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in CONFIG_KEYS:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _parse_value(key, raw)
    for key, value in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown override {key!r}")
        if value is not None:
            values[key] = _parse_value(key, str(value)) if isinstance(value, str) else value
    spec = ExperimentSpec()
    if "d" in values or "rank" in values:
        # keep the default rank consistent when only d changes
        d = values.get("d", spec.d)
        values.setdefault("rank", (2,) * d)
    return replace(spec, **values)
