"""End-to-end puzzle generation.

Each attempt draws a random operator grid, clears it into a polynomial
system, runs the case solver for a few solution families, fills the
best family's free parameters with small random integers, encodes the
resulting cell values as letters, and keeps the puzzle if the digit
assignment solving it is unique.  One master random generator drives
everything, so a fixed seed reproduces the identical puzzle, and the
returned provenance record alone suffices to rebuild it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Mapping

from .cases import InstantiateError, SolutionFamily
from .grid import OperatorGrid, grid_to_system, random_grid, var_grid
from .puzzle import Puzzle, encode_letters, instantiate
from .solver import SolveOptions, Workbench
from .unique import count_assignments

PROVENANCE_FORMAT = "puzzle-provenance"
PROVENANCE_VERSION = 1


class GenerateError(Exception):
    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = stats or {}


@dataclass(frozen=True)
class GenConfig:
    size: int = 5
    n_times: int = 1
    n_div: int = 1
    seed: int = 0
    param_bound: int = 9
    max_attempts: int = 20
    diag_mode: str | None = None
    plist: tuple[str, ...] = SolveOptions().plist
    leading_zero: bool = True
    draws_per_family: int = 8
    value_bound: int = 10**6
    unique_cap: int = 2
    max_cases: int = 400
    max_terms: int = 100_000
    stop_after_families: int = 3

    def resolved_diag_mode(self) -> str:
        if self.diag_mode is not None:
            return self.diag_mode
        return "all" if self.size >= 6 else "main"


@dataclass(frozen=True)
class GenResult:
    puzzle: Puzzle
    assignment: dict[str, int]
    provenance: dict
    attempts: int


def _family_rank(fam: SolutionFamily) -> tuple[int, int]:
    terms = sum(num.term_count + den.term_count for _, num, den in fam.bindings)
    return (terms, -len(fam.free_params))


def generate(cfg: GenConfig) -> GenResult:
    """First unique puzzle within the attempt budget; raises
    GenerateError with run statistics when the budget runs out."""
    diag_mode = cfg.resolved_diag_mode()
    master = Random(cfg.seed)
    stats = {"attempts": 0, "solves_without_family": 0, "draws": 0, "nonunique": 0}
    for attempt in range(1, cfg.max_attempts + 1):
        stats["attempts"] = attempt
        grid_seed = master.randrange(2**32)
        grid = random_grid(cfg.size, cfg.n_times, cfg.n_div, grid_seed)
        system = grid_to_system(grid, diag_mode)
        wb = Workbench(
            system.equations,
            system.inequalities,
            declared_vars=system.var_ids,
            options=SolveOptions(
                plist=cfg.plist,
                max_terms=cfg.max_terms,
                max_cases=cfg.max_cases,
                stop_after_families=cfg.stop_after_families,
            ),
        )
        wb.run()
        if not wb.families:
            stats["solves_without_family"] += 1
            continue
        for fam in sorted(wb.families, key=_family_rank):
            for _ in range(cfg.draws_per_family):
                stats["draws"] += 1
                params = {
                    v: Fraction(master.randint(-cfg.param_bound, cfg.param_bound))
                    for v in sorted(fam.free_params)
                }
                letter_seed = master.randrange(2**32)
                try:
                    values = instantiate(fam, params, bound=cfg.value_bound)
                except InstantiateError:
                    continue
                puzzle, assignment = encode_letters(
                    grid, values, letter_seed, cfg.leading_zero, diag_mode
                )
                result = count_assignments(puzzle, cap=cfg.unique_cap)
                if result.count != 1:
                    stats["nonunique"] += 1
                    continue
                provenance = _provenance(
                    cfg, attempt, grid_seed, grid, fam, params, values, letter_seed,
                    assignment, result.nodes, diag_mode,
                )
                return GenResult(puzzle, assignment, provenance, attempt)
    raise GenerateError(
        f"no unique puzzle within {cfg.max_attempts} attempts", stats
    )


def _provenance(
    cfg: GenConfig,
    attempt: int,
    grid_seed: int,
    grid: OperatorGrid,
    fam: SolutionFamily,
    params: Mapping[int, Fraction],
    values: Mapping[int, Fraction],
    letter_seed: int,
    assignment: Mapping[str, int],
    count_nodes: int,
    diag_mode: str,
) -> dict:
    return {
        "format": PROVENANCE_FORMAT,
        "version": PROVENANCE_VERSION,
        "config": {
            "size": cfg.size,
            "times": cfg.n_times,
            "div": cfg.n_div,
            "seed": cfg.seed,
            "param_bound": cfg.param_bound,
            "max_attempts": cfg.max_attempts,
            "diag_mode": diag_mode,
            "plist": list(cfg.plist),
            "leading_zero": cfg.leading_zero,
        },
        "attempt": attempt,
        "grid_seed": grid_seed,
        "grid": {
            "row_ops": [list(r) for r in grid.row_ops],
            "col_ops": [list(r) for r in grid.col_ops],
            "diag_ops": [list(r) for r in grid.diag_ops],
        },
        "family": {
            "id": fam.id,
            "case": fam.case_id,
            "free_params": [f"u{v}" for v in sorted(fam.free_params)],
            "binding_terms": sum(n.term_count + d.term_count for _, n, d in fam.bindings),
        },
        "params": {f"u{v}": str(q) for v, q in sorted(params.items())},
        "values": {f"u{v}": str(q) for v, q in sorted(values.items())},
        "letter_seed": letter_seed,
        "assignment": dict(sorted(assignment.items())),
        "count_nodes": count_nodes,
    }


def replay(provenance: Mapping) -> tuple[Puzzle, dict[str, int]]:
    """Rebuild the puzzle a provenance record describes, from the
    recorded grid, cell values, and letter seed alone."""
    if provenance.get("format") != PROVENANCE_FORMAT:
        raise GenerateError("not a puzzle provenance record")
    if provenance.get("version") != PROVENANCE_VERSION:
        raise GenerateError(f"unsupported provenance version {provenance.get('version')!r}")
    cfg = provenance["config"]
    g = provenance["grid"]
    grid = var_grid(int(cfg["size"]), g["row_ops"], g["col_ops"], g["diag_ops"])
    values = {int(k[1:]): Fraction(v) for k, v in provenance["values"].items()}
    puzzle, assignment = encode_letters(
        grid,
        values,
        int(provenance["letter_seed"]),
        bool(cfg["leading_zero"]),
        cfg["diag_mode"],
    )
    return puzzle, assignment


def provenance_to_json(provenance: Mapping) -> str:
    return json.dumps(provenance, indent=2) + "\n"


def provenance_from_json(text: str) -> dict:
    try:
        blob = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GenerateError(f"bad provenance JSON: {exc}") from None
    if not isinstance(blob, dict):
        raise GenerateError("bad provenance JSON: expected an object")
    return blob
