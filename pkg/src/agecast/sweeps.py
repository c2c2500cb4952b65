"""Parameter sweeps comparing closed-form ages against simulation.

A sweep walks the priority group size k or the service-time shift c,
evaluates both closed forms at each point, runs the simulator with the
same master seed (common random numbers across points, so curves stay
smooth), and emits one CSV row per point under a fixed schema.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .order_stats import ServiceDistribution
from .simulator import SimConfig, run_simulation
from .theory import age_nonpriority, age_priority_lower_bound, priority_age

__all__ = [
    "CSV_COLUMNS",
    "AgeReport",
    "AgeRow",
    "SweepSpec",
    "read_report_csv",
    "sweep_k",
    "sweep_shift",
    "write_report_csv",
]

CSV_COLUMNS = (
    "sweep_value",
    "delta_p_theory",
    "delta_p_sim",
    "delta_p_stderr",
    "delta_e_theory",
    "delta_e_sim",
    "delta_e_stderr",
    "lower_bound",
    "relerr_p",
    "relerr_e",
)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request.

    ``variable`` is ``"k"`` or ``"c"``.  For a k sweep ``shift`` is the
    fixed shift (zero for plain exponential); for a c sweep ``k`` is the
    fixed group size and ``values`` enumerates shifts.  ``out_path`` of
    None keeps the report in memory only.
    """

    variable: str
    values: tuple
    rate: float
    shift: float
    k: int
    num_intervals: int
    replications: int
    seed: int
    tolerance: float
    out_path: str | None = None

    def __post_init__(self) -> None:
        if self.variable not in ("k", "c"):
            raise ValueError(f"sweep variable must be 'k' or 'c', got {self.variable!r}")
        if len(self.values) == 0:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"sweep values must be strictly increasing, got {self.values}")
        if self.variable == "k":
            if any(not isinstance(v, int) or v < 1 for v in self.values):
                raise ValueError(f"k values must be positive integers, got {self.values}")
        else:
            if any(v < 0 or not math.isfinite(v) for v in self.values):
                raise ValueError(f"c values must be nonnegative reals, got {self.values}")
            if not isinstance(self.k, int) or self.k < 1:
                raise ValueError(f"fixed k must be a positive integer, got {self.k!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive, got {self.rate!r}")
        if not (math.isfinite(self.shift) and self.shift >= 0):
            raise ValueError(f"shift must be nonnegative, got {self.shift!r}")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0):
            raise ValueError(f"tolerance must be nonnegative, got {self.tolerance!r}")


@dataclass(frozen=True)
class AgeRow:
    """One sweep point; ``lower_bound`` is None for plain-exponential runs."""

    sweep_value: float
    delta_p_theory: float
    delta_p_sim: float
    delta_p_stderr: float
    delta_e_theory: float
    delta_e_sim: float
    delta_e_stderr: float
    lower_bound: float | None
    relerr_p: float
    relerr_e: float


@dataclass(frozen=True)
class AgeReport:
    """All rows of one sweep plus the tolerance they were run against."""

    variable: str
    rows: tuple[AgeRow, ...]
    tolerance: float

    def max_relerr(self) -> float:
        return max(max(r.relerr_p, r.relerr_e) for r in self.rows)

    def within_tolerance(self) -> bool:
        return self.max_relerr() <= self.tolerance

    def gaps(self) -> tuple[float, ...]:
        """Theory gap delta_e - delta_p per row."""
        return tuple(r.delta_e_theory - r.delta_p_theory for r in self.rows)


def _sweep_point(
    dist: ServiceDistribution,
    k: int,
    spec: SweepSpec,
    sweep_value: float,
    include_bound: bool,
) -> AgeRow:
    if include_bound:
        bound = age_priority_lower_bound(dist.rate, dist.shift, k)
    else:
        bound = None
    theory_p = priority_age(dist, k)
    theory_e = age_nonpriority(dist, k)
    sim = run_simulation(
        SimConfig(
            dist=dist,
            k=k,
            num_intervals=spec.num_intervals,
            seed=spec.seed,
            replications=spec.replications,
        )
    )
    return AgeRow(
        sweep_value=sweep_value,
        delta_p_theory=theory_p.value,
        delta_p_sim=sim.age_priority_hat,
        delta_p_stderr=sim.age_priority_se,
        delta_e_theory=theory_e.value,
        delta_e_sim=sim.age_nonpriority_hat,
        delta_e_stderr=sim.age_nonpriority_se,
        lower_bound=bound,
        relerr_p=abs(sim.age_priority_hat - theory_p.value) / theory_p.value,
        relerr_e=abs(sim.age_nonpriority_hat - theory_e.value) / theory_e.value,
    )


def sweep_k(spec: SweepSpec) -> AgeReport:
    """Sweep the priority group size at a fixed service law.

    The lower-bound column is filled for shifted laws and left empty for
    the plain exponential.
    """
    if spec.variable != "k":
        raise ValueError(f"sweep_k needs a k-variable spec, got {spec.variable!r}")
    dist = ServiceDistribution(rate=spec.rate, shift=spec.shift)
    rows = [
        _sweep_point(dist, k, spec, float(k), include_bound=spec.shift > 0)
        for k in spec.values
    ]
    report = AgeReport(variable="k", rows=tuple(rows), tolerance=spec.tolerance)
    if spec.out_path is not None:
        write_report_csv(report, spec.out_path)
    return report


def sweep_shift(spec: SweepSpec) -> AgeReport:
    """Sweep the service-time shift at a fixed group size.

    Rows keep the lower-bound column populated even at c = 0 so the
    whole sweep shares one schema.
    """
    if spec.variable != "c":
        raise ValueError(f"sweep_shift needs a c-variable spec, got {spec.variable!r}")
    rows = []
    for c in spec.values:
        dist = ServiceDistribution(rate=spec.rate, shift=float(c))
        rows.append(_sweep_point(dist, spec.k, spec, float(c), include_bound=True))
    report = AgeReport(variable="c", rows=tuple(rows), tolerance=spec.tolerance)
    if spec.out_path is not None:
        write_report_csv(report, spec.out_path)
    return report


def _format_cell(value: float | None) -> str:
    # repr round-trips float64 exactly, keeping emitted files byte-stable
    return "" if value is None else repr(float(value))


def write_report_csv(report: AgeReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [
                    _format_cell(getattr(row, column))
                    for column in CSV_COLUMNS
                ]
            )


def read_report_csv(path, variable: str = "", tolerance: float = 0.0) -> AgeReport:
    """Re-parse an emitted CSV into the identical row tuple."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for record in reader:
            values = dict(zip(CSV_COLUMNS, record))
            rows.append(
                AgeRow(
                    **{
                        column: (
                            None
                            if values[column] == ""
                            else float(values[column])
                        )
                        for column in CSV_COLUMNS
                    }
                )
            )
    return AgeReport(variable=variable, rows=tuple(rows), tolerance=tolerance)
