"""Qubit counts of the catalytically transformed hypergraph resources.

``rnq1`` is the straightforward construction (one small hypergraph per
CCZ placement); ``rnq2`` embeds a sorting network and is an upper bound.
Python integers are unbounded, so no overflow handling is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable


class CountError(ValueError):
    pass


@dataclass(frozen=True)
class ResourceParams:
    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise CountError(f"n and d must be >= 1, got n={self.n}, d={self.d}")


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def qubits_rnq1(p: ResourceParams) -> int:
    """``d (2n + 63) C(n, 3) - n + 1``."""
    if p.n < 3:
        raise CountError(f"rnq1 needs n >= 3, got {p.n}")
    return p.d * (2 * p.n + 63) * comb(p.n, 3) - p.n + 1


def qubits_rnq2(p: ResourceParams) -> int:
    """``3d [n C(ceil(log2 n), 2) + 2(2n - 1)] + n + 1`` (upper bound)."""
    return 3 * p.d * (p.n * comb(_ceil_log2(p.n), 2) + 2 * (2 * p.n - 1)) + p.n + 1


FORMULAS: dict[str, Callable[[ResourceParams], int]] = {"rnq1": qubits_rnq1, "rnq2": qubits_rnq2}
# Smallest n scanned by default: a CCZ needs three wires, so below n=3 an
# {H, CCZ} depth has no CCZ layer to count.
MIN_N = 3
LABELS = {"rnq1": "exact", "rnq2": "upper bound"}


def count(formula: str, n: int, d: int) -> int:
    try:
        f = FORMULAS[formula]
    except KeyError:
        raise CountError(f"unknown formula {formula!r}; expected rnq1 or rnq2") from None
    return f(ResourceParams(n, d))


def _max_d(formula: str, n: int, budget: int) -> int:
    """Largest d with count <= budget, 0 if even d=1 is over. Counts are affine in d."""
    per_d = count(formula, n, 2) - count(formula, n, 1)
    offset = count(formula, n, 1) - per_d
    return max(0, (budget - offset) // per_d)


@dataclass(frozen=True)
class BudgetResult:
    budget: int
    formula: str
    n_max: int
    d_at_n_max: int
    d_max: int
    n_at_d_max: int
    frontier: tuple[tuple[int, int], ...]  # (n, largest feasible d)

    def to_dict(self) -> dict:
        return {
            "budget": self.budget,
            "formula": self.formula,
            "label": LABELS[self.formula],
            "n_max": self.n_max,
            "d_at_n_max": self.d_at_n_max,
            "d_max": self.d_max,
            "n_at_d_max": self.n_at_d_max,
            "frontier": [list(p) for p in self.frontier],
        }


def max_under_budget(budget: int, formula: str, min_n: int = MIN_N) -> BudgetResult:
    """Scan n upward from ``min_n`` until even d=1 no longer fits.

    With ``min_n=2`` the rnq2 scan finds a much larger d at n=2, where the
    circuit has no CCZ; the default keeps that case out.
    """
    if formula not in FORMULAS:
        raise CountError(f"unknown formula {formula!r}; expected rnq1 or rnq2")
    if formula == "rnq1" and min_n < 3:
        raise CountError("rnq1 needs n >= 3")
    if min_n < 1:
        raise CountError(f"min_n must be >= 1, got {min_n}")
    frontier = []
    n = min_n
    while True:
        d = _max_d(formula, n, budget)
        if d == 0:
            break
        frontier.append((n, d))
        n += 1
    if not frontier:
        raise CountError(
            f"budget {budget} is below the smallest {formula} count {count(formula, min_n, 1)}"
        )
    n_max, d_at_n_max = frontier[-1]
    n_at_d_max, d_max = max(frontier, key=lambda p: (p[1], -p[0]))
    return BudgetResult(budget, formula, n_max, d_at_n_max, d_max, n_at_d_max, tuple(frontier))
