"""Small dense LP/IP substrate with duals.

LPs are solved through scipy's HiGHS backend, which returns row marginals;
this module normalizes them to the sign convention used throughout: duals
of >= rows are nonnegative, duals of <= rows nonpositive (minimization).
Integer programs are solved by an in-house depth-first branch-and-bound so
that callers can attach lazy-row callbacks (subtour elimination needs rows
generated from integral candidates) - an off-the-shelf MIP interface would
not expose that hook.

Tolerances: feasibility 1e-7, objective 1e-6, integrality 1e-6.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

FEAS_TOL = 1e-7
OBJ_TOL = 1e-6
INT_TOL = 1e-6


class LpError(RuntimeError):
    """Numerical failure inside the LP backend (not infeasible/unbounded)."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """min objective @ x subject to rows (coeffs, sense, rhs) and bounds."""

    objective: np.ndarray
    rows: list
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        nvar = self.objective.shape[0]
        if self.lower.shape != (nvar,) or self.upper.shape != (nvar,):
            raise ValueError("bounds must match the variable count")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        for coeffs, sense, _rhs in self.rows:
            if np.asarray(coeffs).shape != (nvar,):
                raise ValueError("row dimension mismatch")
            if sense not in (">=", "<=", "="):
                raise ValueError(f"unknown row sense {sense!r}")


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    proven: bool = True
    nodes: int = 0
    incumbent_trace: list = field(default_factory=list)


def solve_lp(lp, extra_rows=(), lower=None, upper=None):
    """Solve the LP to optimality; duals are returned one per row, in row
    order (lp.rows then extra_rows), with >= duals nonnegative."""
    rows = list(lp.rows) + list(extra_rows)
    lo = lp.lower if lower is None else lower
    up = lp.upper if upper is None else upper
    a_ub, b_ub, ub_map = [], [], []
    a_eq, b_eq, eq_map = [], [], []
    for k, (coeffs, sense, rhs) in enumerate(rows):
        coeffs = np.asarray(coeffs, dtype=float)
        if sense == "<=":
            a_ub.append(coeffs)
            b_ub.append(rhs)
            ub_map.append((k, 1.0))
        elif sense == ">=":
            a_ub.append(-coeffs)
            b_ub.append(-rhs)
            ub_map.append((k, -1.0))
        else:
            a_eq.append(coeffs)
            b_eq.append(rhs)
            eq_map.append(k)
    res = linprog(
        lp.objective,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=list(zip(lo, up)),
        method="highs",
    )
    if res.status == 2:
        return LpSolution(status=LpStatus.INFEASIBLE)
    if res.status == 3:
        return LpSolution(status=LpStatus.UNBOUNDED)
    if res.status != 0:
        raise LpError(f"LP backend failed: {res.message}")
    duals = np.zeros(len(rows))
    for (k, sign), marg in zip(ub_map, res.ineqlin.marginals if a_ub else []):
        duals[k] = sign * marg
    for k, marg in zip(eq_map, res.eqlin.marginals if a_eq else []):
        duals[k] = marg
    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=res.x,
        objective=float(res.fun),
        duals=duals,
    )


def _most_fractional(x, integer_vars):
    best_j, best_dist = -1, 1.0
    for j in integer_vars:
        frac = abs(x[j] - round(x[j]))
        dist_to_half = abs(frac - 0.5)
        if frac > INT_TOL and dist_to_half < best_dist:
            best_j, best_dist = j, dist_to_half
    return best_j


def solve_ip(lp, integer_vars, node_budget=None, lazy_rows=None,
             fractional_cuts=None):
    """Branch-and-bound over solve_lp with optional row callbacks.

    ``lazy_rows(x)`` is called on every integral candidate; returned rows
    are added globally and the node is re-solved (callbacks must not return
    rows they already emitted).  ``fractional_cuts(x)`` works the same way
    at fractional nodes.  With a ``node_budget``, exhaustion returns the
    best incumbent with ``proven=False``.
    """
    integer_vars = sorted(set(integer_vars))
    extra = []
    incumbent = None
    trace = []
    nodes = 0
    proven = True
    stack = [(lp.lower.copy(), lp.upper.copy())]
    while stack:
        if node_budget is not None and nodes >= node_budget:
            proven = False
            break
        lo, up = stack.pop()
        nodes += 1
        sol = solve_lp(lp, extra_rows=extra, lower=lo, upper=up)
        while sol.status == LpStatus.OPTIMAL:
            if incumbent is not None and sol.objective >= incumbent.objective - OBJ_TOL:
                break
            j = _most_fractional(sol.x, integer_vars)
            if j < 0:
                new = list(lazy_rows(sol.x)) if lazy_rows else []
                if new:
                    extra.extend(new)
                    sol = solve_lp(lp, extra_rows=extra, lower=lo, upper=up)
                    continue
                x = sol.x.copy()
                for v in integer_vars:
                    x[v] = round(x[v])
                obj = float(lp.objective @ x)
                incumbent = LpSolution(status=LpStatus.OPTIMAL, x=x, objective=obj,
                                       duals=sol.duals)
                trace.append(obj)
                break
            if fractional_cuts:
                new = list(fractional_cuts(sol.x))
                if new:
                    extra.extend(new)
                    sol = solve_lp(lp, extra_rows=extra, lower=lo, upper=up)
                    continue
            lo_up, up_up = lo.copy(), up.copy()
            lo_up[j] = math.ceil(sol.x[j] - INT_TOL)
            lo_dn, up_dn = lo.copy(), up.copy()
            up_dn[j] = math.floor(sol.x[j] + INT_TOL)
            if sol.x[j] - math.floor(sol.x[j]) < 0.5:
                stack.append((lo_up, up_up))
                stack.append((lo_dn, up_dn))
            else:
                stack.append((lo_dn, up_dn))
                stack.append((lo_up, up_up))
            break
        if sol.status == LpStatus.UNBOUNDED:
            return LpSolution(status=LpStatus.UNBOUNDED, nodes=nodes)
    if incumbent is None:
        return LpSolution(status=LpStatus.INFEASIBLE, proven=proven, nodes=nodes)
    incumbent.proven = proven
    incumbent.nodes = nodes
    incumbent.incumbent_trace = trace
    return incumbent
