"""Jackson-kernel smoothing pipeline.

The kernel J_N(t) = gamma_N (sin(Ntilde t/2)/sin(t/2))^4, Ntilde = floor(N/2),
normalized to unit mass on [-pi, pi], drives three operators:

* the circle convolution (L_N f)(x) = int f(x - t) J_N(t) dt for 2pi-periodic f;
* the cutoff periodization f_ell (period 8 ell sqrt(n) per coordinate, equal
  to f on the cube K_ell^n, cutoff rho_ell applied on the fundamental cell);
* the tensor smoothing (E_N f_ell)(x) = int f_ell(x - lambda t) prod J_N(t_i) dt
  with scale lambda = 4 ell sqrt(n) / pi, whose rescaling u -> (E_N f_ell)(lambda u)
  is a trigonometric polynomial of degree <= N per coordinate.

Convolutions use the uniform periodic rule with the node count a multiple of
4N+1 (see decisions about exactness on trigonometric polynomials); the kernel
normalization uses adaptive Gauss-Legendre with the removable singularity at
t = 0 replaced by its limit value.

Point-set callables follow one convention: f(X) takes an (m, n) array and
returns (m,); derivative oracles take (alpha, X). Purely 1D periodic
functions (jackson_smooth_1d) take plain (m,) arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cutoff import CutoffFamily
from .errors import InputError
from .fields import NormContext, mi_binom, mi_order, mi_sub, multi_indices
from .quadrature import adaptive_gauss_legendre, periodic_nodes

# ---------------------------------------------------------------------------
# kernel


@dataclass(frozen=True)
class JacksonKernel:
    """Normalized Jackson kernel of parameter N (trig degree 2*floor(N/2))."""

    N: int
    ntilde: int
    gamma: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        s = np.sin(0.5 * t)
        num = np.sin(0.5 * self.ntilde * t)
        ratio = np.full(t.shape, float(self.ntilde))
        ok = np.abs(s) > 1e-12
        ratio[ok] = num[ok] / s[ok]
        return self.gamma * ratio**4

    @property
    def degree(self) -> int:
        return 2 * self.ntilde


@lru_cache(maxsize=None)
def kernel_normalize(N: int) -> JacksonKernel:
    """Build J_N with gamma_N from adaptive quadrature of the raw kernel."""
    if N < 2:
        raise InputError("Jackson kernel needs N >= 2")
    ntilde = N // 2

    def raw(t):
        s = np.sin(0.5 * t)
        num = np.sin(0.5 * ntilde * t)
        ratio = np.full(t.shape, float(ntilde))
        ok = np.abs(s) > 1e-12
        ratio[ok] = num[ok] / s[ok]
        return ratio**4

    mass, _ = adaptive_gauss_legendre(raw, -math.pi, math.pi, rel_tol=1e-13,
                                      start_panels=max(8, ntilde))
    return JacksonKernel(N, ntilde, 1.0 / mass)


def kernel_mass_closed_form(N: int) -> float:
    """Independent closed form of the raw kernel mass, by squaring the Fejer
    kernel expansion: int (sin(Mt/2)/sin(t/2))^4 dt = 2 pi M (2 M^2 + 1) / 3."""
    m = N // 2
    return 2.0 * math.pi * m * (2.0 * m * m + 1.0) / 3.0


# ---------------------------------------------------------------------------
# periodization


def lattice_period(ell: int, n: int) -> float:
    return 8.0 * ell * math.sqrt(n)


def length_scale(ell: int, n: int) -> float:
    """The scale lambda mapping one kernel period to one lattice period."""
    return 4.0 * ell * math.sqrt(n) / math.pi


def reduce_to_cell(X, period: float) -> np.ndarray:
    """Reduce coordinates into [-period/2, period/2); identity on the open cell."""
    X = np.asarray(X, dtype=float)
    return X - period * np.round(X / period)


def _as_points(x, n: int | None = None):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
        return arr, True, 1
    if arr.ndim == 1:
        return arr.reshape(1, -1), True, arr.size
    if n is not None and arr.shape[1] != n:
        raise InputError(f"points have dimension {arr.shape[1]}, expected {n}")
    return arr, False, arr.shape[1]


def periodize(f, ell: int, x, cutoff: CutoffFamily | None = None):
    """Evaluate f_ell at x: reduce modulo the lattice, apply rho_ell * f.

    Exactly periodic by construction; coincides with f on K_ell^n (the
    reduction returns cell points unchanged and rho_ell is literally 1 there).
    """
    if ell < 1:
        raise InputError("ell must be a positive integer")
    X, single, n = _as_points(x)
    cf = cutoff or CutoffFamily(n, ell)
    Y = reduce_to_cell(X, lattice_period(ell, n))
    vals = cf.rho(Y) * np.asarray(f(Y), dtype=float)
    return float(vals[0]) if single else vals


def periodized_derivative(f_derivs, ell: int, alpha, x, cutoff: CutoffFamily | None = None):
    """D^alpha f_ell via the Leibniz rule on rho_ell * f, on reduced points.

    Requires the caller-supplied derivative oracle f_derivs(beta, X) for all
    beta <= alpha; cutoff derivatives are exact.
    """
    alpha = tuple(int(a) for a in alpha)
    X, single, n = _as_points(x, len(alpha) if len(alpha) > 1 else None)
    if len(alpha) != n:
        raise InputError("multi-index dimension mismatch")
    cf = cutoff or CutoffFamily(n, ell)
    Y = reduce_to_cell(X, lattice_period(ell, n))
    total = np.zeros(X.shape[0])
    for nu in multi_indices(n, mi_order(alpha)):
        rem = mi_sub(alpha, nu)
        if rem is None:
            continue
        fvals = np.asarray(f_derivs(rem, Y), dtype=float)
        total += mi_binom(alpha, nu) * cf.rho_deriv(Y, nu) * fvals
    return float(total[0]) if single else total


# ---------------------------------------------------------------------------
# convolutions


def _conv_node_count(N: int, n: int, target: int | None = None) -> int:
    base = 4 * N + 1
    if target is None:
        target = {1: max(512, 8 * N), 2: 96, 3: 48}.get(n, 48)
    return base * max(1, math.ceil(target / base))


def jackson_smooth_1d(f, N: int, x, quad_target: int | None = None):
    """(L_N f)(x) for a bounded continuous 2pi-periodic f (plain 1D arrays)."""
    kernel = kernel_normalize(N)
    m = _conv_node_count(N, 1, quad_target)
    t, w = periodic_nodes(m)
    J = kernel(t) * w
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    chunk = max(1, 4_000_000 // m)
    for s in range(0, xs.size, chunk):
        xb = xs[s : s + chunk]
        vals = np.asarray(f((xb[:, None] - t[None, :]).ravel()), dtype=float)
        out[s : s + chunk] = vals.reshape(xb.size, m) @ J
    return float(out[0]) if np.ndim(x) == 0 else out


def _tensor_convolve(cell_fn, ell: int, N: int, X: np.ndarray, n: int,
                     quad_target: int | None = None) -> np.ndarray:
    """Tensor-product circle convolution of a lattice-periodic function given
    by its fundamental-cell evaluation cell_fn (applied to reduced points)."""
    if n > 3:
        raise InputError("tensor quadrature limited to n <= 3")
    kernel = kernel_normalize(N)
    m = _conv_node_count(N, n, quad_target)
    t, w = periodic_nodes(m)
    J = kernel(t)
    if n == 1:
        T = t[:, None]
        W = J * w
    else:
        mesh = np.meshgrid(*([t] * n), indexing="ij")
        T = np.stack([g.ravel() for g in mesh], axis=1)
        jm = np.meshgrid(*([J] * n), indexing="ij")
        W = np.prod(np.stack([g.ravel() for g in jm], axis=1), axis=1) * w**n
    lam = length_scale(ell, n)
    period = lattice_period(ell, n)
    out = np.empty(X.shape[0])
    chunk = max(1, int(4_000_000 // T.shape[0]))
    for s in range(0, X.shape[0], chunk):
        xb = X[s : s + chunk]
        Y = xb[:, None, :] - lam * T[None, :, :]
        Yr = reduce_to_cell(Y, period)
        vals = np.asarray(cell_fn(Yr.reshape(-1, n)), dtype=float)
        out[s : s + chunk] = vals.reshape(xb.shape[0], -1) @ W
    return out


def smooth_EN(f, ell: int, N: int, x, quad_target: int | None = None):
    """(E_N f_ell)(x): tensor convolution of the periodized f at scale lambda."""
    X, single, n = _as_points(x)
    cf = CutoffFamily(n, ell)
    out = _tensor_convolve(lambda Y: cf.rho(Y) * np.asarray(f(Y), dtype=float),
                           ell, N, X, n, quad_target)
    return float(out[0]) if single else out


def finite_rank_LNN(f_derivs, N: int, x, alpha, ell: int | None = None,
                    quad_target: int | None = None):
    """D^alpha (L_{N,ell} f)(x) = (E_N D^alpha f_ell)(x), default ell = N.

    The derivative of the periodization is expanded by the Leibniz rule on
    rho_ell * f with exact cutoff derivatives and caller-supplied D^beta f.
    """
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)
    X, single, n_pts = _as_points(x)
    if n_pts != n:
        raise InputError("point dimension does not match the multi-index")
    if ell is None:
        ell = N
    cf = CutoffFamily(n, ell)

    def cell(Y):
        total = np.zeros(Y.shape[0])
        for nu in multi_indices(n, mi_order(alpha)):
            rem = mi_sub(alpha, nu)
            if rem is None:
                continue
            total += mi_binom(alpha, nu) * cf.rho_deriv(Y, nu) * np.asarray(
                f_derivs(rem, Y), dtype=float
            )
        return total

    out = _tensor_convolve(cell, ell, N, X, n, quad_target)
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# trigonometric analysis


@dataclass(frozen=True)
class TensorTrigPoly:
    """Trigonometric polynomial data fitted from uniform samples.

    ``coeffs`` holds complex Fourier coefficients for frequencies -M..M per
    axis (index 0 is frequency -M); ``scale`` is the x-unit length of one
    radian in the sampled variable (x = scale * u).
    """

    coeffs: np.ndarray
    M: int
    scale: float

    @property
    def n(self) -> int:
        return self.coeffs.ndim

    def tail_max(self, degree: int) -> float:
        """Largest |coefficient| with some frequency component > degree."""
        freqs = np.arange(-self.M, self.M + 1)
        mask = np.zeros(self.coeffs.shape, dtype=bool)
        for axis in range(self.n):
            shape = [1] * self.n
            shape[axis] = freqs.size
            mask |= np.abs(freqs).reshape(shape) > degree
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.coeffs[mask])))

    def max_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def derivative(self, alpha) -> "TensorTrigPoly":
        """Derivative in x-units: multiply by (i q / scale)^alpha_i per axis."""
        out = self.coeffs.copy()
        freqs = np.arange(-self.M, self.M + 1)
        for axis, a in enumerate(alpha):
            if a == 0:
                continue
            shape = [1] * self.n
            shape[axis] = freqs.size
            out = out * (1j * freqs.reshape(shape) / self.scale) ** a
        return TensorTrigPoly(out, self.M, self.scale)

    def evaluate(self, u) -> np.ndarray:
        """Evaluate at u (radian units), shape (m, n) or (m,) for n=1."""
        U = np.atleast_2d(np.asarray(u, dtype=float))
        if U.shape[0] == 1 and U.shape[1] != self.n and U.shape[1] > 1 and self.n == 1:
            U = U.T
        freqs = np.arange(-self.M, self.M + 1)
        vals = np.ones((U.shape[0],) + self.coeffs.shape, dtype=complex)
        for axis in range(self.n):
            phase = np.exp(1j * np.outer(U[:, axis], freqs))
            shape = [U.shape[0]] + [1] * self.n
            shape[axis + 1] = freqs.size
            vals = vals * phase.reshape(shape)
        out = np.tensordot(vals, self.coeffs, axes=(tuple(range(1, self.n + 1)),
                                                    tuple(range(self.n))))
        return np.real(out)


def fit_trig_poly(fn_of_u, M: int, n: int = 1, scale: float = 1.0) -> TensorTrigPoly:
    """Fit Fourier coefficients from samples on the uniform (2M+1)^n grid.

    fn_of_u receives radian-unit points ((m, n) array) and must be
    2pi-periodic per coordinate.
    """
    size = 2 * M + 1
    u = 2.0 * math.pi * np.arange(size) / size
    mesh = np.meshgrid(*([u] * n), indexing="ij")
    U = np.stack([g.ravel() for g in mesh], axis=1)
    samples = np.asarray(fn_of_u(U), dtype=float).reshape((size,) * n)
    coeffs = np.fft.fftn(samples) / size**n
    coeffs = np.fft.fftshift(coeffs)
    return TensorTrigPoly(coeffs, M, scale)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ApproxReport:
    """Empirical constants of the periodization/smoothing pipeline on a grid."""

    N: int
    ell: int
    norm_f: float
    norm_f_ell: float
    norm_EN: float
    sup_error: float
    sup_errors_per_alpha: dict
    c_ell_emp: float
    c_ell_EN_emp: float
    c_N_emp: float
    n_grid: int
    n_pairs: int

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "ell": self.ell,
            "sampled_norm_f": self.norm_f,
            "sampled_norm_f_ell": self.norm_f_ell,
            "sampled_norm_EN_f_ell": self.norm_EN,
            "sup_error_C_k": self.sup_error,
            "sup_errors_per_alpha": {str(a): v for a, v in self.sup_errors_per_alpha.items()},
            "empirical_C_ell": self.c_ell_emp,
            "empirical_C_ell_EN": self.c_ell_EN_emp,
            "empirical_c_N": self.c_N_emp,
            "n_grid": self.n_grid,
            "n_pairs": self.n_pairs,
        }


def _sampled_norm(values_by_alpha, pair_values_by_alpha, ctx: NormContext, dists):
    sup = 0.0
    for _, vals in values_by_alpha.items():
        if vals.size:
            sup = max(sup, float(np.max(np.abs(vals))))
    semi = 0.0
    om = ctx.modulus(dists) if len(dists) else np.zeros(0)
    for alpha, (vx, vy) in pair_values_by_alpha.items():
        if mi_order(alpha) != ctx.k or not len(dists):
            continue
        semi = max(semi, float(np.max(np.abs(vx - vy) / om)))
    return max(sup, semi), sup, semi


def error_report(f_derivs, ell: int, N: int, ctx: NormContext, grid,
                 pairs=None, quad_target: int | None = None) -> ApproxReport:
    """Empirical ratios ||f_ell||/||f||, ||E_N f_ell||/||f|| and the sampled
    C^k error ||f_ell - E_N f_ell|| / ||f|| on a grid in the fundamental cell."""
    X = np.atleast_2d(np.asarray(grid, dtype=float))
    if X.size == 0:
        raise InputError("degenerate grid")
    n = ctx.n
    if X.shape[1] != n:
        raise InputError("grid dimension mismatch")
    period = lattice_period(ell, n)
    if np.max(np.abs(X)) >= 0.5 * period:
        raise InputError("grid must lie inside the fundamental cell")
    if pairs is None:
        pairs = list(zip(X[:-1], X[1:])) if X.shape[0] > 1 else []
    px = np.array([p[0] for p in pairs]).reshape(-1, n) if pairs else np.zeros((0, n))
    py = np.array([p[1] for p in pairs]).reshape(-1, n) if pairs else np.zeros((0, n))
    dists = np.linalg.norm(px - py, axis=1) if pairs else np.zeros(0)
    if pairs and np.any(dists == 0.0):
        raise InputError("pair sample contains coincident endpoints")

    cf = CutoffFamily(n, ell)
    mis = multi_indices(n, ctx.k)

    def all_values(evaluator):
        vals = {a: np.asarray(evaluator(a, X), dtype=float) for a in mis}
        pvals = {
            a: (
                np.asarray(evaluator(a, px), dtype=float),
                np.asarray(evaluator(a, py), dtype=float),
            )
            for a in mis
        }
        return vals, pvals

    f_vals, f_pvals = all_values(lambda a, P: f_derivs(a, P) if P.size else np.zeros(0))
    fl_vals, fl_pvals = all_values(
        lambda a, P: periodized_derivative(f_derivs, ell, a, P, cutoff=cf)
        if P.size else np.zeros(0)
    )
    en_vals, en_pvals = all_values(
        lambda a, P: finite_rank_LNN(f_derivs, N, P, a, ell=ell, quad_target=quad_target)
        if P.size else np.zeros(0)
    )

    norm_f = _sampled_norm(f_vals, f_pvals, ctx, dists)[0]
    norm_fl = _sampled_norm(fl_vals, fl_pvals, ctx, dists)[0]
    norm_en = _sampled_norm(en_vals, en_pvals, ctx, dists)[0]

    errs = {a: float(np.max(np.abs(fl_vals[a] - en_vals[a]))) for a in mis}
    sup_err = max(errs.values())

    def ratio(v):
        return 0.0 if norm_f == 0.0 else v / norm_f

    return ApproxReport(
        N, ell, norm_f, norm_fl, norm_en, sup_err, errs,
        ratio(norm_fl), ratio(norm_en), ratio(sup_err), X.shape[0], len(dists),
    )


@dataclass(frozen=True)
class ConvergenceVerdict:
    converged: bool
    failing_condition: str | None  # "norm_bound" (a) or "pointwise" (b)
    sampled_norms: tuple
    norm_cap: float
    pointwise_residual: float
    tol: float


def weakstar_check(fns, ctx: NormContext, probes, norm_cap: float,
                   grid=None, pairs=None, tol: float = 1e-3) -> ConvergenceVerdict:
    """Check the two sampled conditions characterizing weak* convergence of a
    sequence: (a) sampled norms uniformly bounded by the cap, (b) per-probe
    Cauchy-style convergence of all D^alpha f_i(x) within tol (tail of the
    last half against the final element)."""
    P = np.atleast_2d(np.asarray(probes, dtype=float))
    if P.shape[1] != ctx.n:
        raise InputError("probe dimension mismatch")
    if grid is None:
        grid = P
    G = np.atleast_2d(np.asarray(grid, dtype=float))
    if pairs is None:
        pairs = []
        step = np.zeros(ctx.n)
        step[0] = 1e-3
        for g in G:
            pairs.append((g, g + step))
        pairs.extend(zip(G[:-1], G[1:]))
    px = np.array([p[0] for p in pairs]).reshape(-1, ctx.n)
    py = np.array([p[1] for p in pairs]).reshape(-1, ctx.n)
    dists = np.linalg.norm(px - py, axis=1)
    om = ctx.modulus(dists)
    mis = multi_indices(ctx.n, ctx.k)
    top = [a for a in mis if mi_order(a) == ctx.k]

    norms = []
    for f in fns:
        sup = max(float(np.max(np.abs(np.asarray(f(a, G), dtype=float)))) for a in mis)
        semi = 0.0
        for a in top:
            vx = np.asarray(f(a, px), dtype=float)
            vy = np.asarray(f(a, py), dtype=float)
            semi = max(semi, float(np.max(np.abs(vx - vy) / om)))
        norms.append(max(sup, semi))
    if any(v > norm_cap for v in norms):
        return ConvergenceVerdict(False, "norm_bound", tuple(norms), norm_cap,
                                  math.inf, tol)

    residual = 0.0
    half = len(fns) // 2
    for a in mis:
        vals = np.stack([np.asarray(f(a, P), dtype=float) for f in fns])
        tail = np.abs(vals[half:] - vals[-1])
        residual = max(residual, float(np.max(tail)))
    if residual > tol:
        return ConvergenceVerdict(False, "pointwise", tuple(norms), norm_cap, residual, tol)
    return ConvergenceVerdict(True, None, tuple(norms), norm_cap, residual, tol)
