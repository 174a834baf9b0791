"""Atomic functionals, dual pairing, LP-based predual norms, and the
subset-enumeration finiteness certifier.

The generating atoms are point evaluations delta_x^alpha (|alpha| <= k) and
scaled differences (delta_x^alpha - delta_y^alpha)/omega(||x-y||) with
|alpha| = k, x != y. For k = 0 the predual norm of a finite combination of
evaluation atoms is computed exactly: the LP
    max sum c_i u_i   s.t. |u_i| <= 1, |u_i - u_j| <= omega(||x_i - x_j||)
ranges over exactly the traces of norm-<=1 functions (every feasible u
McShane-extends with the same constants), so the optimum is the true norm.
For k >= 1 only a bracket [lo, hi] is produced: lo maximizes the pairing over
fields satisfying the pairwise compatibility constraints with lambda <= 1,
hi is the minimum total-variation atomic decomposition over atoms supported
on the functional's own points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SizeError
from .fields import (
    NormContext,
    WhitneyField,
    mi_factorial,
    mi_order,
    mi_sub,
    multi_indices,
)
from .modulus import Modulus
from .simplex import OPTIMAL, LinearProgram, solve
from .whitney import whitney_lambda


@dataclass(frozen=True)
class Atom:
    """delta_x^alpha, or the scaled difference (delta_x^alpha - delta_y^alpha)/omega."""

    kind: str  # "delta" | "diff"
    x: tuple[float, ...]
    alpha: tuple[int, ...]
    y: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("delta", "diff"):
            raise InputError("atom kind must be 'delta' or 'diff'")
        if self.kind == "diff":
            if self.y is None:
                raise InputError("difference atom needs a second point")
            if tuple(self.y) == tuple(self.x):
                raise InputError("difference atom needs distinct points")

    def validate(self, ctx: NormContext):
        if len(self.x) != ctx.n or len(self.alpha) != ctx.n:
            raise InputError("atom dimension mismatch")
        if self.kind == "delta" and mi_order(self.alpha) > ctx.k:
            raise InputError(f"delta atom needs |alpha| <= {ctx.k}")
        if self.kind == "diff" and mi_order(self.alpha) != ctx.k:
            raise InputError(f"difference atom needs |alpha| = {ctx.k}")


def delta(x, alpha=None) -> Atom:
    x = tuple(float(v) for v in np.atleast_1d(x))
    alpha = (0,) * len(x) if alpha is None else tuple(int(a) for a in alpha)
    return Atom("delta", x, alpha)


def difference(x, y, alpha=None) -> Atom:
    x = tuple(float(v) for v in np.atleast_1d(x))
    y = tuple(float(v) for v in np.atleast_1d(y))
    alpha = (0,) * len(x) if alpha is None else tuple(int(a) for a in alpha)
    return Atom("diff", x, alpha, y)


@dataclass(frozen=True)
class AtomicFunctional:
    """Finite combination of atoms; duplicates merged, zero coefficients dropped."""

    atoms: tuple[Atom, ...]
    coeffs: tuple[float, ...]
    ctx: NormContext

    def __post_init__(self):
        if len(self.atoms) != len(self.coeffs):
            raise InputError("one coefficient per atom required")
        merged: dict[Atom, float] = {}
        for a, c in zip(self.atoms, self.coeffs):
            a.validate(self.ctx)
            merged[a] = merged.get(a, 0.0) + float(c)
        pruned = [(a, c) for a, c in merged.items() if c != 0.0]
        object.__setattr__(self, "atoms", tuple(a for a, _ in pruned))
        object.__setattr__(self, "coeffs", tuple(c for _, c in pruned))

    def support(self) -> tuple[tuple[float, ...], ...]:
        pts = set()
        for a in self.atoms:
            pts.add(a.x)
            if a.y is not None:
                pts.add(a.y)
        return tuple(sorted(pts))

    def scale(self, s: float) -> "AtomicFunctional":
        return AtomicFunctional(self.atoms, tuple(s * c for c in self.coeffs), self.ctx)

    def add(self, other: "AtomicFunctional") -> "AtomicFunctional":
        if other.ctx != self.ctx:
            raise InputError("functionals live in different contexts")
        return AtomicFunctional(self.atoms + other.atoms, self.coeffs + other.coeffs, self.ctx)


def functional(atoms, coeffs, ctx: NormContext) -> AtomicFunctional:
    return AtomicFunctional(tuple(atoms), tuple(float(c) for c in coeffs), ctx)


def pair(f, g: AtomicFunctional) -> float:
    """Dual pairing <f, g> = sum coef * (D^alpha f(x) or the scaled difference).

    f is a WhitneyField carrying jets at every atom point, or a derivative
    oracle callable(alpha, X) on (m, n) arrays.
    """
    om = g.ctx.modulus
    if isinstance(f, WhitneyField):
        if f.k < g.ctx.k or f.n != g.ctx.n:
            raise InputError("field order/dimension insufficient for the functional")
        table = {tuple(p): j for p, j in zip(f.points, f.jets)}

        def deriv(alpha, pt):
            j = table.get(tuple(pt))
            if j is None:
                raise InputError(f"field has no jet at atom point {pt}")
            return j.coeff(alpha)

    else:

        def deriv(alpha, pt):
            return float(np.asarray(f(alpha, np.asarray(pt, dtype=float).reshape(1, -1)))[0])

    total = 0.0
    for a, c in zip(g.atoms, g.coeffs):
        if a.kind == "delta":
            total += c * deriv(a.alpha, a.x)
        else:
            d = float(np.linalg.norm(np.asarray(a.x) - np.asarray(a.y)))
            total += c * (deriv(a.alpha, a.x) - deriv(a.alpha, a.y)) / om(d)
    return total


# ---------------------------------------------------------------------------
# k = 0 exact norm


def _k0_norm_lp(g: AtomicFunctional, omega: Modulus):
    n = g.ctx.n
    zero = (0,) * n
    for a in g.atoms:
        if a.kind != "delta" or a.alpha != zero:
            raise InputError("predual_norm_k0 handles k=0 delta atoms only")
    support = g.support()
    if not support:
        return 0.0, support, np.zeros(0)
    index = {p: i for i, p in enumerate(support)}
    c = np.zeros(len(support))
    for a, coef in zip(g.atoms, g.coeffs):
        c[index[a.x]] += coef
    rows, rhs = [], []
    m = len(support)
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        rows += [e, -e]
        rhs += [1.0, 1.0]
    for i in range(m):
        for j in range(i + 1, m):
            d = float(np.linalg.norm(np.asarray(support[i]) - np.asarray(support[j])))
            w = omega(d)
            e = np.zeros(m)
            e[i], e[j] = 1.0, -1.0
            rows += [e, -e]
            rhs += [w, w]
    sol = solve(LinearProgram(c, lhs_ineq=np.array(rows), rhs_ineq=np.array(rhs)))
    if sol.status != OPTIMAL:
        raise InputError(f"k=0 norm LP unexpectedly {sol.status}")
    return sol.optimum, support, sol.x


def predual_norm_k0(g: AtomicFunctional, omega: Modulus | None = None) -> float:
    """Exact predual norm of a k=0 combination of evaluation atoms."""
    om = omega or g.ctx.modulus
    value, _, _ = _k0_norm_lp(g, om)
    return value


def predual_norm_k0_certificate(g: AtomicFunctional, omega: Modulus | None = None):
    """(norm, support points, optimal trace vector u) for duality tests:
    the McShane extension of u attains the pairing value."""
    om = omega or g.ctx.modulus
    return _k0_norm_lp(g, om)


# ---------------------------------------------------------------------------
# general k bracket


def predual_norm_bracket(g: AtomicFunctional, ctx: NormContext | None = None):
    """Two-sided bracket [lo, hi] for the predual norm at general k.

    lo: max <f, g> over Whitney fields on the support with the pairwise
    compatibility constant lambda <= 1 (a valid lower bound: lambda
    underestimates the true trace norm up to fixed equivalence constants, and
    every atom has |<f, atom>| <= 1 under these constraints).
    hi: minimum total variation of a decomposition of g over atoms supported
    on the support points (a valid upper bound since every atom has norm <= 1).
    """
    ctx = ctx or g.ctx
    k, n, om = ctx.k, ctx.n, ctx.modulus
    support = g.support()
    if not support:
        return 0.0, 0.0
    mis = multi_indices(n, k)
    m, J = len(support), len(mis)
    idx = {p: i for i, p in enumerate(support)}

    def slot(p, alpha):
        return idx[p] * J + mis.index(alpha)

    gamma = np.zeros(m * J)
    for a, coef in zip(g.atoms, g.coeffs):
        if a.kind == "delta":
            gamma[slot(a.x, a.alpha)] += coef
        else:
            d = float(np.linalg.norm(np.asarray(a.x) - np.asarray(a.y)))
            w = om(d)
            gamma[slot(a.x, a.alpha)] += coef / w
            gamma[slot(a.y, a.alpha)] -= coef / w

    # --- lo: LP over jet coefficients with lambda <= 1 constraints
    rows, rhs = [], []
    for i in range(m):
        for alpha in mis:
            e = np.zeros(m * J)
            e[slot(support[i], alpha)] = 1.0
            rows += [e, -e]
            rhs += [1.0, 1.0]

    def d_taylor_row(p, alpha, z):
        """coefficients of D^alpha T_p(z) in the jet variables of point p"""
        row = np.zeros(m * J)
        dz = np.asarray(z) - np.asarray(p)
        for beta in mis:
            rem = mi_sub(beta, alpha)
            if rem is None:
                continue
            row[slot(p, beta)] = float(np.prod(dz ** np.asarray(rem))) / mi_factorial(rem)
        return row

    for i in range(m):
        for j in range(i + 1, m):
            p, q = support[i], support[j]
            d = float(np.linalg.norm(np.asarray(p) - np.asarray(q)))
            w = om(d)
            for z in (p, q):
                for alpha in mis:
                    bound = d ** (k - mi_order(alpha)) * w
                    row = d_taylor_row(p, alpha, z) - d_taylor_row(q, alpha, z)
                    rows += [row, -row]
                    rhs += [bound, bound]
    sol = solve(LinearProgram(gamma, lhs_ineq=np.array(rows), rhs_ineq=np.array(rhs)))
    if sol.status != OPTIMAL:
        raise InputError(f"bracket lower LP unexpectedly {sol.status}")
    lo = sol.optimum

    # --- hi: min total variation decomposition over atoms on the support
    columns = []
    for p in support:
        for alpha in mis:
            col = np.zeros(m * J)
            col[slot(p, alpha)] = 1.0
            columns.append(col)
    top = [alpha for alpha in mis if mi_order(alpha) == k]
    for i in range(m):
        for j in range(i + 1, m):
            p, q = support[i], support[j]
            d = float(np.linalg.norm(np.asarray(p) - np.asarray(q)))
            w = om(d)
            for alpha in top:
                col = np.zeros(m * J)
                col[slot(p, alpha)] = 1.0 / w
                col[slot(q, alpha)] = -1.0 / w
                columns.append(col)
    M = np.array(columns).T  # (mJ, n_atoms)
    na = M.shape[1]
    # t = tp - tm, minimize sum(tp + tm) s.t. M (tp - tm) = gamma, tp, tm >= 0
    obj = np.ones(2 * na)
    eq = np.hstack([M, -M])
    nonneg = -np.eye(2 * na)
    sol = solve(
        LinearProgram(
            obj,
            lhs_ineq=nonneg,
            rhs_ineq=np.zeros(2 * na),
            lhs_eq=eq,
            rhs_eq=gamma,
            sense="min",
        )
    )
    if sol.status != OPTIMAL:
        raise InputError(f"bracket upper LP unexpectedly {sol.status}")
    hi = sol.optimum
    return lo, hi


# ---------------------------------------------------------------------------
# finiteness certifier


@dataclass(frozen=True)
class FinitenessReport:
    full: float
    subset_sup: float
    ratio: float
    d: int
    witness_subset: tuple
    early_exit: bool
    n_subsets: int

    def to_dict(self) -> dict:
        return {
            "full": self.full,
            "subset_sup": self.subset_sup,
            "ratio": self.ratio,
            "d": self.d,
            "witness_subset": list(self.witness_subset),
            "early_exit": self.early_exit,
            "n_subsets": self.n_subsets,
        }


def finiteness_gap(field: WhitneyField, d: int, ctx: NormContext) -> FinitenessReport:
    """Compare the full trace quantity with its sup over card <= d subsets.

    The trace quantity is the pairwise compatibility constant (for k = 0 the
    exact trace norm). The left inequality subset_sup <= full holds exactly
    (every subset maximum ranges over a subset of the same terms); for k = 0
    and d >= 2 the ratio is exactly one.
    """
    if d < 1:
        raise InputError("d must be >= 1")
    m = len(field)
    total = sum(math.comb(m, s) for s in range(1, min(d, m) + 1))
    if total > 10**6:
        raise SizeError(f"{total} subsets exceed the 1e6 enumeration guard")

    full = whitney_lambda(field, ctx).lam
    subset_sup = 0.0
    witness: tuple = ()
    checked = 0
    early = False
    for size in range(1, min(d, m) + 1):
        for combo in itertools.combinations(range(m), size):
            v = whitney_lambda(field.restrict(combo), ctx).lam
            checked += 1
            if v > subset_sup:
                subset_sup = v
                witness = combo
            if subset_sup >= full:
                early = True
                break
        if early:
            break

    if subset_sup == 0.0:
        ratio = 1.0 if full == 0.0 else math.inf
    else:
        ratio = full / subset_sup
    return FinitenessReport(full, subset_sup, ratio, d, witness, early, checked)
