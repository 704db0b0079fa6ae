"""Deterministic linear and mixed-integer solver used by the workbench.

A dense two-phase tableau simplex with a Dantzig pivot rule that switches
to Bland's rule after 500 iterations (anti-cycling), plus a depth-first
branch-and-bound layer for integer variables. Everything is deterministic:
ties break toward the lowest variable index, the lower branch is explored
first, and no randomness is involved, so repeated runs return identical
assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelMalformed

FEAS_TOL = 1e-9          # feasibility/optimality tolerance on row-scaled data
INT_TOL = 1e-6           # integrality tolerance for branch-and-bound
BLAND_AFTER = 500        # pivot count after which Bland's rule takes over
MAX_PIVOTS = 1_000_000   # hard stop; Bland guarantees termination long before


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    integer: bool = False


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, float]   # variable index -> coefficient
    relation: str                 # "<=", ">=" or "="
    rhs: float


@dataclass(frozen=True)
class Objective:
    coeffs: Mapping[int, float]
    sense: str                    # "min" or "max"
    constant: float = 0.0         # carried so reported objectives are absolute


@dataclass(frozen=True)
class LinearModel:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Objective | None = None


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    assignment: dict[str, float] | None = None
    objective: float | None = None
    nodes: int = 0

    def value(self, name: str) -> float:
        if self.assignment is None:
            raise ValueError("no assignment on a non-optimal outcome")
        return self.assignment[name]


def validate_model(model: LinearModel) -> None:
    n = len(model.variables)
    seen = set()
    for v in model.variables:
        if v.name in seen:
            raise ModelMalformed(f"duplicate variable name {v.name!r}")
        seen.add(v.name)
        if math.isnan(v.lower) or math.isnan(v.upper):
            raise ModelMalformed(f"variable {v.name!r} has NaN bounds")
        if v.lower > v.upper + FEAS_TOL:
            raise ModelMalformed(
                f"variable {v.name!r} bounds reversed: [{v.lower}, {v.upper}]")
    rows = list(model.constraints)
    if model.objective is not None:
        if model.objective.sense not in ("min", "max"):
            raise ModelMalformed(f"bad objective sense {model.objective.sense!r}")
        rows.append(Constraint(model.objective.coeffs, "<=", 0.0))
    for row in rows:
        if row.relation not in ("<=", ">=", "="):
            raise ModelMalformed(f"bad relation {row.relation!r}")
        if not math.isfinite(row.rhs):
            raise ModelMalformed("constraint rhs must be finite")
        for idx, coeff in row.coeffs.items():
            if not isinstance(idx, int) or idx < 0 or idx >= n:
                raise ModelMalformed(f"coefficient references unknown variable index {idx}")
            if not math.isfinite(coeff):
                raise ModelMalformed("constraint coefficients must be finite")


# --------------------------------------------------------------- public API

def solve_lp(model: LinearModel) -> SolveOutcome:
    """Solve the continuous relaxation; integrality flags are ignored."""
    validate_model(model)
    lower = [v.lower for v in model.variables]
    upper = [v.upper for v in model.variables]
    return _solve_lp_bounds(model, lower, upper)


def solve_milp(model: LinearModel) -> SolveOutcome:
    """Depth-first branch and bound over the simplex relaxation.

    Branches on the most fractional integer variable (ties: lowest index),
    lower branch first, and prunes nodes whose relaxation cannot beat the
    incumbent. Deterministic: among equally good integer optima the first
    one reached in this fixed node order wins.
    """
    validate_model(model)
    int_idx = [i for i, v in enumerate(model.variables) if v.integer]
    if not int_idx:
        return solve_lp(model)

    lower = [float(v.lower) for v in model.variables]
    upper = [float(v.upper) for v in model.variables]
    for i in int_idx:
        if math.isfinite(lower[i]):
            lower[i] = math.ceil(lower[i] - INT_TOL)
        if math.isfinite(upper[i]):
            upper[i] = math.floor(upper[i] + INT_TOL)
        if lower[i] > upper[i]:
            return SolveOutcome(Status.INFEASIBLE, nodes=0)

    sense = model.objective.sense if model.objective else "min"
    sign = 1.0 if sense == "min" else -1.0

    best: SolveOutcome | None = None
    best_key = math.inf
    nodes = 0
    stack: list[tuple[list[float], list[float]]] = [(lower, upper)]
    while stack:
        node_lower, node_upper = stack.pop()
        relaxed = _solve_lp_bounds(model, node_lower, node_upper)
        nodes += 1
        if relaxed.status is Status.INFEASIBLE:
            continue
        if relaxed.status is Status.UNBOUNDED:
            # An unbounded relaxation with integer variables still bounded in
            # a box cannot occur here; treat as unbounded overall.
            return SolveOutcome(Status.UNBOUNDED, nodes=nodes)
        relaxed_key = sign * (relaxed.objective or 0.0)
        if relaxed_key >= best_key - FEAS_TOL:
            continue
        values = [relaxed.assignment[v.name] for v in model.variables]
        open_idx = [i for i in int_idx if node_lower[i] < node_upper[i]]
        branch_var, branch_dist = -1, INT_TOL
        for i in open_idx:
            dist = abs(values[i] - round(values[i]))
            if dist > branch_dist + 1e-12:
                branch_var, branch_dist = i, dist
        if branch_var < 0:
            snapped = dict(relaxed.assignment)
            for i in int_idx:
                snapped[model.variables[i].name] = float(round(values[i]))
            if assignment_satisfies(model, snapped):
                objective = _evaluate_objective(model, snapped)
                key = sign * objective
                if key < best_key - FEAS_TOL:
                    best = SolveOutcome(Status.OPTIMAL, snapped, objective)
                    best_key = key
                if model.objective is None:
                    break   # feasibility probe: first integer point settles it
                continue
            # Snapping nearly-integral values pushed a knife-edge row out of
            # tolerance. With every integer variable pinned the node is a
            # single point and that point just failed, so the box is dead.
            # Otherwise split an unpinned variable so the children's
            # relaxations decide the point's fate honestly.
            if not open_idx:
                continue
            branch_var, branch_dist = open_idx[0], 0.0
            for i in open_idx:
                dist = abs(values[i] - round(values[i]))
                if dist > branch_dist + 1e-12:
                    branch_var, branch_dist = i, dist
        # Clamp the split into the node box: simplex tolerance can park a
        # value a hair outside its bounds, and flooring that would hand one
        # child the parent's exact box and loop forever.
        split = min(max(values[branch_var], node_lower[branch_var]),
                    node_upper[branch_var])
        floor_val = min(max(math.floor(split), node_lower[branch_var]),
                        node_upper[branch_var] - 1.0)
        up_lower = list(node_lower)
        up_lower[branch_var] = floor_val + 1.0
        down_upper = list(node_upper)
        down_upper[branch_var] = float(floor_val)
        stack.append((up_lower, node_upper))       # explored second
        stack.append((node_lower, down_upper))     # lower branch first
    if best is None:
        return SolveOutcome(Status.INFEASIBLE, nodes=nodes)
    return SolveOutcome(best.status, best.assignment, best.objective, nodes)


def check_feasible(model: LinearModel) -> SolveOutcome:
    """Find any assignment satisfying rows, bounds and integrality.

    Equivalent to solve_milp with a zero objective; any objective on the
    model is ignored. Stops at the first integer-feasible point.
    """
    stripped = LinearModel(model.variables, model.constraints, None)
    return solve_milp(stripped)


def assignment_satisfies(model: LinearModel, assignment: Mapping[str, float],
                         tol: float = FEAS_TOL, check_integrality: bool = False) -> bool:
    """Replay an assignment against raw rows and bounds.

    Row slack is measured against tol scaled by the row's largest absolute
    coefficient, mirroring the solver's row scaling.
    """
    values = []
    for v in model.variables:
        if v.name not in assignment:
            return False
        x = assignment[v.name]
        if x < v.lower - tol or x > v.upper + tol:
            return False
        if check_integrality and v.integer and abs(x - round(x)) > INT_TOL:
            return False
        values.append(x)
    for row in model.constraints:
        scale = max(1.0, max((abs(c) for c in row.coeffs.values()), default=0.0))
        lhs = sum(c * values[i] for i, c in row.coeffs.items())
        slack = lhs - row.rhs
        if row.relation == "<=" and slack > tol * scale:
            return False
        if row.relation == ">=" and slack < -tol * scale:
            return False
        if row.relation == "=" and abs(slack) > tol * scale:
            return False
    return True


# ---------------------------------------------------------- simplex internals

def _evaluate_objective(model: LinearModel, assignment: Mapping[str, float]) -> float:
    if model.objective is None:
        return 0.0
    obj = model.objective
    total = obj.constant
    for idx, coeff in obj.coeffs.items():
        total += coeff * assignment[model.variables[idx].name]
    return total


def _solve_lp_bounds(model: LinearModel, lower: Sequence[float],
                     upper: Sequence[float]) -> SolveOutcome:
    """Simplex over the model with overridden variable bounds."""
    n = len(model.variables)

    # Per-variable transforms onto x' >= 0.
    # ("const", value): fixed variable folded into the rhs.
    # ("shift", lb, col): x = lb + x'.
    # ("neg", ub, col): x = ub - x' (lower bound -inf).
    # ("split", colp, coln): x = x+ - x- (both bounds infinite).
    transforms: list[tuple] = []
    col_count = 0
    upper_rows: list[tuple[int, float]] = []   # (column, span) rows x' <= span
    for i in range(n):
        lb, ub = lower[i], upper[i]
        if ub < lb - FEAS_TOL:
            return SolveOutcome(Status.INFEASIBLE)
        if math.isfinite(lb) and math.isfinite(ub) and ub - lb <= FEAS_TOL:
            transforms.append(("const", 0.5 * (lb + ub)))
        elif math.isfinite(lb):
            transforms.append(("shift", lb, col_count))
            if math.isfinite(ub):
                upper_rows.append((col_count, ub - lb))
            col_count += 1
        elif math.isfinite(ub):
            transforms.append(("neg", ub, col_count))
            col_count += 1
        else:
            transforms.append(("split", col_count, col_count + 1))
            col_count += 2

    def to_prime(coeffs: Mapping[int, float]) -> tuple[dict[int, float], float]:
        """Rewrite a row over original vars into x' space; returns (row, rhs shift)."""
        prime: dict[int, float] = {}
        shift = 0.0
        for idx, coeff in coeffs.items():
            tr = transforms[idx]
            if tr[0] == "const":
                shift += coeff * tr[1]
            elif tr[0] == "shift":
                prime[tr[2]] = prime.get(tr[2], 0.0) + coeff
                shift += coeff * tr[1]
            elif tr[0] == "neg":
                prime[tr[2]] = prime.get(tr[2], 0.0) - coeff
                shift += coeff * tr[1]
            else:
                prime[tr[1]] = prime.get(tr[1], 0.0) + coeff
                prime[tr[2]] = prime.get(tr[2], 0.0) - coeff
        return prime, shift

    rows: list[dict[int, float]] = []
    relations: list[str] = []
    rhs: list[float] = []
    for row in model.constraints:
        prime, shift = to_prime(row.coeffs)
        b = row.rhs - shift
        scale = max((abs(c) for c in prime.values()), default=0.0)
        if scale <= 0.0:
            # Row reduced to 0 (relation) b.
            ok = ((row.relation == "<=" and b >= -FEAS_TOL)
                  or (row.relation == ">=" and b <= FEAS_TOL)
                  or (row.relation == "=" and abs(b) <= FEAS_TOL))
            if not ok:
                return SolveOutcome(Status.INFEASIBLE)
            continue
        rows.append({j: c / scale for j, c in prime.items()})
        relations.append(row.relation)
        rhs.append(b / scale)
    for col, span in upper_rows:
        rows.append({col: 1.0})
        relations.append("<=")
        rhs.append(span)

    # Objective in x' space (internally minimized).
    obj_prime: dict[int, float] = {}
    if model.objective is not None and model.objective.coeffs:
        sense_sign = 1.0 if model.objective.sense == "min" else -1.0
        prime, _ = to_prime(model.objective.coeffs)
        obj_prime = {j: sense_sign * c for j, c in prime.items()}
        obj_scale = max((abs(c) for c in obj_prime.values()), default=0.0)
        if obj_scale > 0:
            obj_prime = {j: c / obj_scale for j, c in obj_prime.items()}

    m = len(rows)
    # Flip rows to nonnegative rhs; assign slack/surplus/artificial columns.
    slack_count = sum(1 for r in relations if r in ("<=", ">="))
    art_needed = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = {j: -c for j, c in rows[i].items()}
            rhs[i] = -rhs[i]
            relations[i] = {"<=": ">=", ">=": "<=", "=": "="}[relations[i]]
        art_needed.append(relations[i] != "<=")
    art_count = sum(art_needed)

    total_cols = col_count + slack_count + art_count
    T = np.zeros((m + 1, total_cols + 1))
    basis = [0] * m
    slack_at = col_count
    art_at = col_count + slack_count
    art_cols = []
    for i in range(m):
        for j, c in rows[i].items():
            T[i, j] = c
        T[i, -1] = rhs[i]
        if relations[i] == "<=":
            T[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif relations[i] == ">=":
            T[i, slack_at] = -1.0
            slack_at += 1
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1
        else:
            T[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1

    if art_cols:
        # Phase 1: minimize the artificial sum.
        for j in art_cols:
            T[-1, j] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                T[-1, :] -= T[i, :]
        status = _pivot_until_optimal(T, basis, allowed=total_cols)
        if status is Status.UNBOUNDED:          # cannot happen; defensive
            return SolveOutcome(Status.INFEASIBLE)
        if -T[-1, -1] > 1e-7:
            return SolveOutcome(Status.INFEASIBLE)
        art_set = set(art_cols)
        for i in range(m):
            if basis[i] in art_set:
                pivot_col = -1
                for j in range(col_count + slack_count):
                    if abs(T[i, j]) > 1e-7:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(T, i, pivot_col)
                    basis[i] = pivot_col
        keep_rows = [i for i in range(m) if basis[i] not in art_set]
        keep_cols = list(range(col_count + slack_count)) + [total_cols]
        T = T[np.ix_(keep_rows + [m], keep_cols)]
        basis = [basis[i] for i in keep_rows]
        m = len(basis)

    # Phase 2: the real objective over the remaining columns.
    T[-1, :] = 0.0
    for j, c in obj_prime.items():
        T[-1, j] = c
    for i in range(m):
        cj = T[-1, basis[i]]
        if cj != 0.0:
            T[-1, :] -= cj * T[i, :]
    status = _pivot_until_optimal(T, basis, allowed=T.shape[1] - 1)
    if status is Status.UNBOUNDED:
        return SolveOutcome(Status.UNBOUNDED)

    prime_values = np.zeros(T.shape[1] - 1)
    for i in range(m):
        prime_values[basis[i]] = T[i, -1]
    assignment: dict[str, float] = {}
    for i, v in enumerate(model.variables):
        tr = transforms[i]
        if tr[0] == "const":
            x = tr[1]
        elif tr[0] == "shift":
            x = tr[1] + prime_values[tr[2]]
        elif tr[0] == "neg":
            x = tr[1] - prime_values[tr[2]]
        else:
            x = prime_values[tr[1]] - prime_values[tr[2]]
        assignment[v.name] = float(x)
    objective = _evaluate_objective(model, assignment) if model.objective else 0.0
    return SolveOutcome(Status.OPTIMAL, assignment, objective)


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row, :] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row, :])
    T[:, col] = 0.0
    T[row, col] = 1.0


def _pivot_until_optimal(T: np.ndarray, basis: list[int], allowed: int) -> Status:
    """Run pivots until no reduced cost is below -FEAS_TOL.

    Dantzig's rule (most negative reduced cost, lowest index on ties) for
    the first BLAND_AFTER pivots, then Bland's rule to rule out cycling.
    """
    iterations = 0
    while True:
        costs = T[-1, :allowed]
        if costs.size == 0:
            return Status.OPTIMAL
        if iterations < BLAND_AFTER:
            entering = int(np.argmin(costs))
            if costs[entering] >= -FEAS_TOL:
                return Status.OPTIMAL
        else:
            below = np.flatnonzero(costs < -FEAS_TOL)
            if below.size == 0:
                return Status.OPTIMAL
            entering = int(below[0])

        column = T[:-1, entering]
        positive = np.flatnonzero(column > FEAS_TOL)
        if positive.size == 0:
            return Status.UNBOUNDED
        ratios = T[:-1, -1][positive] / column[positive]
        best = ratios.min()
        ties = positive[np.flatnonzero(ratios <= best + 1e-12)]
        leaving = min(ties, key=lambda i: basis[i])
        _pivot(T, int(leaving), entering)
        basis[int(leaving)] = entering
        iterations += 1
        if iterations > MAX_PIVOTS:
            raise RuntimeError("simplex failed to terminate")


class ModelBuilder:
    """Incremental LinearModel assembly with name-based lookups."""

    def __init__(self) -> None:
        self._variables: list[Variable] = []
        self._index: dict[str, int] = {}
        self._constraints: list[Constraint] = []
        self._objective: Objective | None = None

    def add_variable(self, name: str, lower: float = 0.0, upper: float = math.inf,
                     integer: bool = False) -> int:
        if name in self._index:
            raise ModelMalformed(f"duplicate variable name {name!r}")
        self._index[name] = len(self._variables)
        self._variables.append(Variable(name, lower, upper, integer))
        return self._index[name]

    def index(self, name: str) -> int:
        return self._index[name]

    def add_constraint(self, coeffs: Mapping[str, float], relation: str, rhs: float) -> None:
        indexed = {self._index[name]: c for name, c in coeffs.items()}
        self._constraints.append(Constraint(indexed, relation, rhs))

    def set_objective(self, coeffs: Mapping[str, float], sense: str,
                      constant: float = 0.0) -> None:
        indexed = {self._index[name]: c for name, c in coeffs.items()}
        self._objective = Objective(indexed, sense, constant)

    def build(self) -> LinearModel:
        return LinearModel(tuple(self._variables), tuple(self._constraints), self._objective)


def with_extra_rows(model: LinearModel, rows: Sequence[Constraint],
                    objective: Objective | None = None) -> LinearModel:
    """New model sharing variables, with appended rows and optional new objective."""
    return LinearModel(model.variables,
                       model.constraints + tuple(rows),
                       model.objective if objective is None else objective)


def variable_index(model: LinearModel, name: str) -> int:
    for i, v in enumerate(model.variables):
        if v.name == name:
            return i
    raise KeyError(name)
