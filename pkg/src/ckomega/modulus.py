"""Moduli of continuity.

A modulus omega is a nonnegative function on (0, inf) such that omega(t) and
t/omega(t) are nondecreasing and omega(t) -> 0 as t -> 0+. Four kinds are
provided: power (t^a with 0 < a <= 1), linear (t), capped (min(t^a, cap)) and
table (piecewise-linear through sorted breakpoints, anchored at (0, 0) on the
left and constant beyond the last breakpoint). Axiom checking is grid-based,
not symbolic; see ``validate``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

_KINDS = ("power", "linear", "capped", "table")


@dataclass(frozen=True)
class Modulus:
    """A modulus of continuity. Immutable; evaluation is pure.

    Parameters
    ----------
    kind : str
        One of "power", "linear", "capped", "table".
    exponent : float, optional
        Exponent a in (0, 1] for the power/capped kinds.
    cap : float, optional
        Ceiling value for the capped kind (must be > 0).
    breakpoints : sequence of (t, w) pairs, optional
        Sorted positive breakpoints for the table kind. Evaluation is linear
        between (0, 0), the breakpoints, and constant after the last one.
    """

    kind: str
    exponent: float | None = None
    cap: float | None = None
    breakpoints: tuple[tuple[float, float], ...] | None = field(default=None)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown modulus kind {self.kind!r}")
        if self.kind in ("power", "capped"):
            a = self.exponent
            if a is None or not (0.0 < a <= 1.0):
                raise InputError("power modulus needs exponent in (0, 1]")
        if self.kind == "capped":
            if self.cap is None or self.cap <= 0.0:
                raise InputError("capped modulus needs cap > 0")
        if self.kind == "table":
            bp = self.breakpoints
            if not bp or len(bp) < 1:
                raise InputError("table modulus needs at least one breakpoint")
            ts = [t for t, _ in bp]
            ws = [w for _, w in bp]
            if any(t <= 0 for t in ts) or any(w <= 0 for w in ws):
                raise InputError("table breakpoints must be positive")
            if sorted(ts) != ts or len(set(ts)) != len(ts):
                raise InputError("table breakpoints must be strictly increasing")
            object.__setattr__(self, "breakpoints", tuple((float(t), float(w)) for t, w in bp))

    def __call__(self, t):
        """Evaluate omega(t). Accepts scalars or arrays; t must be > 0."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
            raise InputError("modulus argument must be finite and > 0")
        if self.kind == "linear":
            out = arr
        elif self.kind == "power":
            out = arr ** self.exponent
        elif self.kind == "capped":
            out = np.minimum(arr ** self.exponent, self.cap)
        else:
            ts = np.array([0.0] + [t for t, _ in self.breakpoints])
            ws = np.array([0.0] + [w for _, w in self.breakpoints])
            out = np.interp(arr, ts, ws)  # constant beyond the last breakpoint
        if np.ndim(t) == 0:
            return float(out)
        return out


def linear() -> Modulus:
    return Modulus("linear")


def power(exponent: float) -> Modulus:
    return Modulus("power", exponent=exponent)


def capped(exponent: float, cap: float) -> Modulus:
    return Modulus("capped", exponent=exponent, cap=cap)


def table(breakpoints) -> Modulus:
    return Modulus("table", breakpoints=tuple(breakpoints))


@dataclass(frozen=True)
class Violation:
    axiom: str
    t_lo: float
    t_hi: float
    value_lo: float
    value_hi: float


@dataclass(frozen=True)
class ValidationReport:
    """Grid-based axiom check result. ``violations`` empty means all three
    axioms hold on the supplied grid (not a proof for all of (0, inf))."""

    grid: tuple[float, ...]
    violations: tuple[Violation, ...]
    zero_limit_witness: float  # omega at the smallest probed t

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "ok": self.ok,
            "zero_limit_witness": self.zero_limit_witness,
            "violations": [
                {
                    "axiom": v.axiom,
                    "pair": [v.t_lo, v.t_hi],
                    "values": [v.value_lo, v.value_hi],
                }
                for v in self.violations
            ],
        }


# Comparison slack: axiom checks should not fail on float roundoff alone.
_REL_SLACK = 1e-12


def validate(m: Modulus, grid) -> ValidationReport:
    """Check the modulus axioms on a sorted positive grid.

    Checks, pairwise on consecutive grid points: omega nondecreasing,
    t/omega(t) nondecreasing; and omega(t) -> 0 by probing a decreasing
    sequence below min(grid) until omega < 1e-6 (or 60 halvings).
    """
    g = [float(t) for t in grid]
    if len(g) < 2:
        raise InputError("validation grid needs at least 2 points")
    if any(t <= 0 for t in g):
        raise InputError("validation grid must be positive")
    if sorted(g) != g:
        raise InputError("validation grid must be sorted ascending")

    violations: list[Violation] = []
    vals = [m(t) for t in g]
    for (t0, w0), (t1, w1) in zip(zip(g, vals), zip(g[1:], vals[1:])):
        slack = _REL_SLACK * max(abs(w0), abs(w1), 1.0)
        if w1 < w0 - slack:
            violations.append(Violation("omega nondecreasing", t0, t1, w0, w1))
        r0, r1 = t0 / w0, t1 / w1
        slack_r = _REL_SLACK * max(abs(r0), abs(r1), 1.0)
        if r1 < r0 - slack_r:
            violations.append(Violation("t/omega(t) nondecreasing", t0, t1, r0, r1))

    t_probe = g[0]
    w_probe = m(t_probe)
    for _ in range(60):
        if w_probe < 1e-6:
            break
        t_probe /= 2.0
        w_probe = m(t_probe)
    else:
        violations.append(Violation("omega(0+) = 0", t_probe, g[0], w_probe, m(g[0])))

    return ValidationReport(tuple(g), tuple(violations), w_probe)


def limit_at_infinity_reciprocal(m: Modulus, probe: float) -> float:
    """Numerical proxy for lim_{t->inf} 1/omega(t), evaluated at a large probe.

    The probe choice is the caller's responsibility and should be recorded
    alongside the result.
    """
    if probe < 1.0:
        raise InputError("probe must be >= 1")
    return 1.0 / m(probe)


def default_grid() -> list[float]:
    """Logarithmic default grid used by the CLI for validate-omega."""
    return list(np.logspace(-6, 6, 49))


def from_json(spec) -> Modulus:
    """Build a Modulus from its JSON object form.

    Schema: {"kind": "power"|"linear"|"capped"|"table",
             "exponent"?: num, "cap"?: num, "breakpoints"?: [[t, w], ...]}.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("modulus spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "table":
        return Modulus("table", breakpoints=tuple(tuple(p) for p in spec.get("breakpoints", ())))
    return Modulus(
        kind,
        exponent=spec.get("exponent"),
        cap=spec.get("cap"),
    )


def to_json(m: Modulus) -> dict:
    out: dict = {"kind": m.kind}
    if m.exponent is not None:
        out["exponent"] = m.exponent
    if m.cap is not None:
        out["cap"] = m.cap
    if m.breakpoints is not None:
        out["breakpoints"] = [list(p) for p in m.breakpoints]
    return out
