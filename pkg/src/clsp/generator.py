"""Benchmark instance generator with a 72-cell full factorial design.

Each cell combines one level of five factors, encoded as a five-letter tag
(one letter per factor, in this order):

* demand variability -- sigma of the normal demand draw:
  ``a`` high U[0, 50], ``b`` medium U[0, 25], ``c`` low U[0, 10];
* capacity usage -- ``d`` every item uses 1 unit, ``e`` per-item usage
  rounded up from U[1, 5];
* setup-cost magnitude -- per-item economic reorder interval drawn from
  ``f`` U[1, 6] (long, expensive setups) or ``g`` U[1, 2] (short);
* capacity tightness -- constant per-period capacity equal to the average
  period load times ``h`` 1.11, ``i`` 1.25, or ``j`` 2.00;
* demand pattern -- ``k`` plain normal draws, ``l`` lumpy (each cell is
  zeroed with probability 1/2 and survivors are doubled).

Per-period demand is Normal(100, sigma) truncated at zero and rounded up.
Holding costs are 1; item setup costs follow from the drawn reorder
interval: S = ceil(tbo^2 * h * mean_demand / 2), so that tbo matches the
economic interval of the realized demand.  Draws that violate the
cumulative-capacity feasibility criterion are redrawn with a fresh
substream (up to ``max_attempts`` times).

Instances are identified as ``{size}-{letters}-{rep}``, e.g.
``12x12-adfhk-3``.  All draws derive from a seed plus the instance
coordinates, so any instance can be regenerated in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Tuple, Union

import numpy as np

from .model import Instance, instance_feasible

__all__ = [
    "FactorCell",
    "CELLS",
    "cell_for_letters",
    "generate_instance",
    "generate_suite",
    "parse_size",
]

DEMAND_MEAN = 100.0
REPS_PER_CELL = 5

_STD_LEVELS = (("a", 50.0), ("b", 25.0), ("c", 10.0))
_USAGE_LEVELS = (("d", False), ("e", True))
_TBO_LEVELS = (("f", 6.0), ("g", 2.0))
_TIGHTNESS_LEVELS = (("h", 1.11), ("i", 1.25), ("j", 2.00))
_PATTERN_LEVELS = (("k", False), ("l", True))


@dataclass(frozen=True)
class FactorCell:
    """One combination of factor levels."""

    letters: str
    sigma_hi: float      # demand sigma ~ U[0, sigma_hi]
    random_usage: bool   # False: all 1; True: ceil of U[1, 5]
    tbo_hi: float        # reorder interval ~ U[1, tbo_hi]
    tightness: float     # capacity = tightness * average period load
    lumpy: bool


def _build_cells() -> List[FactorCell]:
    cells = []
    for s_letter, sigma in _STD_LEVELS:
        for u_letter, random_usage in _USAGE_LEVELS:
            for t_letter, tbo_hi in _TBO_LEVELS:
                for c_letter, tight in _TIGHTNESS_LEVELS:
                    for p_letter, lumpy in _PATTERN_LEVELS:
                        cells.append(FactorCell(
                            letters=s_letter + u_letter + t_letter + c_letter + p_letter,
                            sigma_hi=sigma,
                            random_usage=random_usage,
                            tbo_hi=tbo_hi,
                            tightness=tight,
                            lumpy=lumpy,
                        ))
    return cells


CELLS: List[FactorCell] = _build_cells()
_CELL_BY_LETTERS = {cell.letters: cell for cell in CELLS}


def cell_for_letters(letters: str) -> FactorCell:
    try:
        return _CELL_BY_LETTERS[letters]
    except KeyError:
        raise ValueError(f"unknown factor combination {letters!r}") from None


def parse_size(size: Union[str, Tuple[int, int]]) -> Tuple[int, int]:
    """Accepts (items, periods) or a string like '12x12'."""
    if isinstance(size, tuple):
        n, t = size
    else:
        try:
            left, right = size.lower().split("x")
            n, t = int(left), int(right)
        except ValueError:
            raise ValueError(f"size must look like '12x12', got {size!r}") from None
    if n < 1 or t < 1:
        raise ValueError("size must be positive")
    return n, t


def _draw_instance(cell: FactorCell, n: int, t: int, name: str,
                   rng: np.random.Generator) -> Instance:
    sigma = rng.uniform(0.0, cell.sigma_hi)
    raw = rng.normal(DEMAND_MEAN, sigma, size=(n, t))
    raw = np.maximum(raw, 0.0)
    if cell.lumpy:
        keep = rng.random((n, t)) >= 0.5
        raw = np.where(keep, 2.0 * raw, 0.0)
    demand = np.ceil(raw).astype(np.int64)

    if cell.random_usage:
        usage = np.ceil(rng.uniform(1.0, 5.0, size=n)).astype(np.int64)
    else:
        usage = np.ones(n, dtype=np.int64)

    tbo = rng.uniform(1.0, cell.tbo_hi, size=n)
    holding = np.ones(n, dtype=np.int64)
    mean_demand = demand.sum(axis=1) / t
    setup = np.ceil(tbo * tbo * holding * mean_demand / 2.0).astype(np.int64)

    period_load = (usage[:, None] * demand).sum() / t
    capacity = np.full(t, int(np.ceil(cell.tightness * period_load)), dtype=np.int64)

    return Instance(demand=demand, capacity=capacity, setup_cost=setup,
                    holding_cost=holding, capacity_usage=usage, name=name)


def generate_instance(size: Union[str, Tuple[int, int]], letters: str, rep: int,
                      seed: int, max_attempts: int = 1000) -> Instance:
    """Generate one instance; redraw until it is feasible."""
    n, t = parse_size(size)
    cell = cell_for_letters(letters)
    if rep < 1:
        raise ValueError("rep indices start at 1")
    name = f"{n}x{t}-{letters}-{rep}"
    cell_index = CELLS.index(cell)
    for attempt in range(max_attempts):
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence((seed, n, t, cell_index, rep, attempt))
        ))
        inst = _draw_instance(cell, n, t, name, rng)
        if instance_feasible(inst):
            return inst
    raise RuntimeError(f"{name}: no feasible draw in {max_attempts} attempts")


def generate_suite(size: Union[str, Tuple[int, int]], seed: int,
                   reps: int = REPS_PER_CELL) -> Iterator[Instance]:
    """All 72 cells x ``reps`` instances of one size, in manifest order."""
    for cell in CELLS:
        for rep in range(1, reps + 1):
            yield generate_instance(size, cell.letters, rep, seed)
