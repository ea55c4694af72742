"""End-to-end sweep pipeline and report serialization.

A report row is one basis size N pushed through the whole chain:
matrices -> both ground states -> expectation values on the nuclear-motion
state -> correction breakdown.  Numeric cells are stored as strings (20
significant digits) so that emit -> parse -> emit is byte-stable; the
delta columns (dE_inf, dE0, dE_total: change against the previous row) are
derived data and are recomputed from the energy columns whenever a document
is loaded.
"""

import csv
import io
import json
import time
from dataclasses import dataclass, field, asdict

from mpmath import mp

from . import __version__ as ENGINE_VERSION
from .basis import enumerate_basis
from .config import DEFAULT_SWEEP, RunConfig
from .constants import default_constants
from .corrections import total_energy
from .eigen import build_systems, ground_state_pair, optimize_k
from .matrices import build_operator_matrices, expectation_set

SCHEMA_VERSION = 1

CSV_COLUMNS = ("N", "E_inf", "dE_inf", "E0", "dE0", "deltaE2", "deltaE3",
               "E_total", "dE_total", "k_opt")


class UsageError(ValueError):
    """Malformed request (empty sweep, bad format); maps to exit code 2."""


def _fmt(x):
    """Canonical 20-digit string for a report cell."""
    return mp.nstr(mp.mpf(x), 20)


@dataclass
class Row:
    """One basis size.  k_opt and residual belong to the nuclear-motion
    Hamiltonian, whose state also feeds the corrections."""

    N: int
    ok: bool = True
    error: str = ""
    E_inf: str = ""
    dE_inf: str = ""
    E0: str = ""
    dE0: str = ""
    deltaE2: str = ""
    deltaE3: str = ""
    E_total: str = ""
    dE_total: str = ""
    k_opt: str = ""
    residual: str = ""
    wall_time: str = ""


@dataclass
class ReportDocument:
    schema_version: int
    engine_version: str
    config: dict
    constants: dict
    cache: dict
    rows: list = field(default_factory=list)

    @property
    def all_ok(self):
        return all(row.ok for row in self.rows)

    def to_json(self):
        payload = {
            "schema_version": self.schema_version,
            "engine_version": self.engine_version,
            "config": self.config,
            "constants": self.constants,
            "cache": self.cache,
            "rows": [asdict(row) for row in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        doc = cls(
            schema_version=payload["schema_version"],
            engine_version=payload["engine_version"],
            config=payload["config"],
            constants=payload["constants"],
            cache=payload["cache"],
            rows=[Row(**row) for row in payload["rows"]],
        )
        recompute_deltas(doc.rows)
        return doc

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([row.N, row.E_inf, row.dE_inf, row.E0, row.dE0,
                             row.deltaE2, row.deltaE3, row.E_total,
                             row.dE_total, row.k_opt])
        return buf.getvalue()

    def to_human(self):
        def num(cell, width=15):
            if cell == "":
                return " " * width
            return f"{float(mp.mpf(cell)):>{width}.8f}"

        lines = []
        lines.append(f"engine {self.engine_version}   schema {self.schema_version}")
        lines.append("constants: " + ", ".join(
            f"{k}={v}" for k, v in sorted(self.constants.items())))
        lines.append("config:    " + ", ".join(
            f"{k}={v}" for k, v in sorted(self.config.items())))
        if self.cache:
            lines.append("cache:     " + ", ".join(
                f"{k}={v}" for k, v in sorted(self.cache.items())))
        lines.append("")
        head = (f"{'N':>4} {'E_inf':>15} {'dE_inf':>12} {'E0':>15} {'dE0':>12} "
                f"{'deltaE2':>12} {'deltaE3':>12} {'E_total':>15} "
                f"{'dE_total':>12} {'k_opt':>15}")
        lines.append(head)
        lines.append("-" * len(head))
        for row in self.rows:
            if not row.ok:
                lines.append(f"{row.N:>4} FAILED: {row.error}")
                continue
            lines.append(
                f"{row.N:>4} {num(row.E_inf)} {num(row.dE_inf, 12)} "
                f"{num(row.E0)} {num(row.dE0, 12)} {num(row.deltaE2, 12)} "
                f"{num(row.deltaE3, 12)} {num(row.E_total)} "
                f"{num(row.dE_total, 12)} {num(row.k_opt)}")
        lines.append("")
        for row in self.rows:
            if row.ok:
                lines.append(f"  N={row.N}: residual {row.residual}, "
                             f"wall {row.wall_time}s")
        return "\n".join(lines) + "\n"

    def emit(self, fmt):
        if fmt == "human":
            return self.to_human()
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise UsageError(f"unknown output format {fmt!r}")


def recompute_deltas(rows):
    """Fill dE_* cells as differences against the previous successful row."""
    with mp.workdps(30):
        prev = None
        for row in rows:
            if not row.ok:
                continue
            for dcol, col in (("dE_inf", "E_inf"), ("dE0", "E0"),
                              ("dE_total", "E_total")):
                if prev is None or getattr(prev, col) == "":
                    setattr(row, dcol, "")
                else:
                    diff = mp.mpf(getattr(row, col)) - mp.mpf(getattr(prev, col))
                    setattr(row, dcol, _fmt(diff))
            prev = row
    return rows


def compute_row(n, config, constants, table=None):
    """Run the full pipeline for one basis size; returns (Row, results)."""
    t0 = time.time()
    with mp.workdps(config.precision_digits):
        basis = enumerate_basis(n)
        mats = build_operator_matrices(basis, Z=constants.Z, table=table)
        res_inf, res_0 = ground_state_pair(
            mats, constants.mass_ratio_M, k_init=config.k_init,
            k_tol=config.k_tol, max_outer_iters=config.max_outer_iters)
        exps = expectation_set(basis, res_0.coeffs, res_0.k_opt, mats.W,
                               gamma=constants.gamma_mp())
        breakdown = total_energy(res_0.energy, exps, constants)
        row = Row(
            N=n,
            E_inf=_fmt(res_inf.energy),
            E0=_fmt(res_0.energy),
            deltaE2=_fmt(breakdown.deltaE2),
            deltaE3=_fmt(breakdown.deltaE3),
            E_total=_fmt(breakdown.E_total),
            k_opt=_fmt(res_0.k_opt),
            residual=mp.nstr(res_0.residual, 3),
            wall_time=f"{time.time() - t0:.2f}",
        )
    return row, (res_inf, res_0, exps, breakdown)


def run_tables(config=None, constants=None, n_list=None, table=None):
    """Sweep the basis sizes and assemble a ReportDocument.

    A failing size produces a failure row instead of aborting the sweep;
    all_ok reflects it.  An explicitly empty sweep is a usage error.
    """
    config = config or RunConfig()
    constants = constants or default_constants()
    if n_list is None:
        n_list = list(DEFAULT_SWEEP)
    if not n_list:
        raise UsageError("empty sweep: need at least one basis size")
    if any(n < 1 for n in n_list):
        raise UsageError(f"basis sizes must be >= 1, got {n_list}")
    rows = []
    for n in n_list:
        try:
            row, _ = compute_row(n, config, constants, table=table)
        except Exception as exc:  # noqa: BLE001 - failure rows are the contract
            row = Row(N=n, ok=False, error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    recompute_deltas(rows)
    return ReportDocument(
        schema_version=SCHEMA_VERSION,
        engine_version=ENGINE_VERSION,
        config=config.echo(),
        constants=constants.echo(),
        cache=table.stats() if table is not None else {},
        rows=rows,
    )


def solve_single(n, config=None, constants=None, nuclear_motion=True):
    """One Hamiltonian at one basis size (the `solve` CLI verb)."""
    config = config or RunConfig()
    constants = constants or default_constants()
    with mp.workdps(config.precision_digits):
        basis = enumerate_basis(n)
        mats = build_operator_matrices(basis, Z=constants.Z)
        systems = build_systems(
            mats, mass_ratio=constants.mass_ratio_M if nuclear_motion else None,
            include=("0",) if nuclear_motion else ("inf",))
        system = systems["0" if nuclear_motion else "inf"]
        result = optimize_k(system, k_init=config.k_init, k_tol=config.k_tol,
                            max_outer_iters=config.max_outer_iters)
    return result


def corrections_single(n, config=None, constants=None):
    """Full correction breakdown at one basis size (the `corrections` verb)."""
    config = config or RunConfig()
    constants = constants or default_constants()
    row, (res_inf, res_0, exps, breakdown) = compute_row(n, config, constants)
    return row, res_0, exps, breakdown
