import itertools

import numpy as np
import pytest

from ckomega import modulus as mo
from ckomega.errors import InputError, SizeError
from ckomega.extension import mcshane_extension
from ckomega.fields import NormContext, field_from_data, field_from_jets, jet
from ckomega.predual import (
    delta,
    difference,
    finiteness_gap,
    functional,
    pair,
    predual_norm_bracket,
    predual_norm_k0,
    predual_norm_k0_certificate,
)

CTX0 = NormContext(0, 1, mo.linear())


# ---------------------------------------------------------------------------
# pairing


def test_pair_evaluation_functional():
    f = field_from_data([[0.4]], [2.5])
    g = functional([delta([0.4])], [1.0], CTX0)
    assert pair(f, g) == 2.5


def test_pair_difference_atom_example():
    f = field_from_data([[0.0], [1.0]], [0.0, 1.0])  # f(x) = x on the support
    g = functional([difference([0.0], [1.0])], [1.0], CTX0)
    assert pair(f, g) == pytest.approx(-1.0)


def test_pair_linearity_on_constants():
    f = field_from_data([[0.0], [1.0]], [1.0, 1.0])
    g = functional([delta([0.0]), delta([1.0])], [2.0, 3.0], CTX0)
    assert pair(f, g) == pytest.approx(5.0)


def test_pair_missing_jet_raises():
    f = field_from_data([[0.0]], [1.0])
    g = functional([delta([2.0])], [1.0], CTX0)
    with pytest.raises(InputError):
        pair(f, g)


def test_atom_validation():
    ctx1 = NormContext(1, 1, mo.linear())
    with pytest.raises(InputError):
        functional([delta([0.0], [2])], [1.0], ctx1)  # |alpha| > k
    with pytest.raises(InputError):
        functional([difference([0.0], [1.0], [0])], [1.0], ctx1)  # |alpha| != k
    with pytest.raises(InputError):
        difference([0.0], [0.0])


def test_atom_deduplication():
    g = functional([delta([0.0]), delta([0.0]), delta([1.0])], [1.0, 2.0, 0.0], CTX0)
    assert len(g.atoms) == 1
    assert g.coeffs == (3.0,)


# ---------------------------------------------------------------------------
# exact k=0 norm


def test_norm_single_atom_is_one():
    assert predual_norm_k0(functional([delta([0.7])], [1.0], CTX0)) == 1.0


def test_norm_two_point_examples():
    g_far = functional([delta([0.0]), delta([2.0])], [1.0, -1.0], CTX0)
    assert predual_norm_k0(g_far) == pytest.approx(2.0, abs=1e-10)
    g_near = functional([delta([0.0]), delta([1.0])], [1.0, -1.0], CTX0)
    assert predual_norm_k0(g_near) == pytest.approx(1.0, abs=1e-10)


def test_norm_rejects_non_k0():
    ctx1 = NormContext(1, 1, mo.linear())
    g = functional([delta([0.0], [1])], [1.0], ctx1)
    with pytest.raises(InputError):
        predual_norm_k0(g, mo.linear())


def _brute_force_k0(points, coeffs, omega):
    """Vertex enumeration of {|u_i|<=1, |u_i-u_j|<=omega(d_ij)} (oracle)."""
    m = len(points)
    rows, rhs = [], []
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        rows += [e, -e]
        rhs += [1.0, 1.0]
    for i in range(m):
        for j in range(i + 1, m):
            d = float(np.linalg.norm(np.asarray(points[i]) - np.asarray(points[j])))
            e = np.zeros(m)
            e[i], e[j] = 1.0, -1.0
            rows += [e, -e]
            rhs += [omega(d), omega(d)]
    A, b = np.array(rows), np.array(rhs)
    c = np.asarray(coeffs)
    best = None
    for combo in itertools.combinations(range(len(A)), m):
        sub = A[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        v = np.linalg.solve(sub, b[list(combo)])
        if np.all(A @ v <= b + 1e-10):
            val = c @ v
            best = val if best is None else max(best, val)
    return best


def test_norm_matches_vertex_enumeration():
    rng = np.random.default_rng(77)
    for trial in range(40):
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 5))
        pts = rng.uniform(-2, 2, (m, n))
        while m > 1:
            d2 = np.sum((pts[:, None] - pts[None, :]) ** 2, -1)
            np.fill_diagonal(d2, 1.0)
            if d2.min() > 1e-3:
                break
            pts = rng.uniform(-2, 2, (m, n))
        coeffs = rng.normal(size=m)
        om = mo.linear() if trial % 2 else mo.power(0.5)
        ctx = NormContext(0, n, om)
        g = functional([delta(p) for p in pts], coeffs, ctx)
        got = predual_norm_k0(g, om)
        want = _brute_force_k0([tuple(p) for p in pts], coeffs, om)
        assert got == pytest.approx(want, abs=1e-8)


def test_norm_axioms():
    rng = np.random.default_rng(88)
    om = mo.linear()
    for _ in range(60):
        m = int(rng.integers(1, 5))
        pts = [tuple(p) for p in rng.uniform(-2, 2, (m, 1))]
        c1, c2 = rng.normal(size=m), rng.normal(size=m)
        g1 = functional([delta(p) for p in pts], c1, CTX0)
        g2 = functional([delta(p) for p in pts], c2, CTX0)
        s = float(rng.normal())
        assert predual_norm_k0(g1.scale(s), om) == pytest.approx(
            abs(s) * predual_norm_k0(g1, om), abs=1e-9
        )
        assert predual_norm_k0(g1.add(g2), om) <= (
            predual_norm_k0(g1, om) + predual_norm_k0(g2, om) + 1e-9
        )


def test_duality_mcshane_extension_attains_norm():
    rng = np.random.default_rng(99)
    om = mo.linear()
    for _ in range(20):
        m = int(rng.integers(2, 5))
        pts = rng.uniform(-2, 2, (m, 1))
        while True:
            d2 = np.sum((pts[:, None] - pts[None, :]) ** 2, -1)
            np.fill_diagonal(d2, 1.0)
            if d2.min() > 1e-2:
                break
            pts = rng.uniform(-2, 2, (m, 1))
        coeffs = rng.normal(size=m)
        g = functional([delta(p) for p in pts], coeffs, CTX0)
        value, support, u = predual_norm_k0_certificate(g, om)
        # u is a feasible trace: its McShane extension has norm <= 1 and
        # pairs with g to the optimum (strong duality realized)
        fld = field_from_data(np.array(support), u)
        ext = mcshane_extension(fld, om)
        assert ext.lam <= 1.0 + 1e-9
        assert ext.sup_bound <= 1.0 + 1e-9
        paired = sum(c * ext(np.asarray(p).reshape(1, -1))[0]
                     for p, c in zip([a.x for a in g.atoms], g.coeffs))
        assert paired == pytest.approx(value, abs=1e-8)


def test_difference_atom_norm_formula():
    # |(delta_x - delta_y)| = min(2, omega(d)) for the unnormalized difference
    rng = np.random.default_rng(111)
    for _ in range(50):
        n = int(rng.integers(1, 4))
        x = rng.uniform(-3, 3, n)
        y = x.copy()
        while np.linalg.norm(x - y) < 1e-6:
            y = x + rng.uniform(-4, 4, n)
        om = mo.power(float(rng.uniform(0.3, 1.0)))
        ctx = NormContext(0, n, om)
        g = functional([delta(x), delta(y)], [1.0, -1.0], ctx)
        d = float(np.linalg.norm(x - y))
        assert predual_norm_k0(g, om) == pytest.approx(min(2.0, om(d)), abs=1e-9)


# ---------------------------------------------------------------------------
# bracket for k >= 1


def test_bracket_single_atom_hi_at_most_one():
    for k, n in ((1, 1), (2, 1), (1, 2)):
        ctx = NormContext(k, n, mo.linear())
        alpha = (k,) + (0,) * (n - 1)
        g = functional([delta([0.3] * n, alpha)], [1.0], ctx)
        lo, hi = predual_norm_bracket(g, ctx)
        assert hi <= 1.0 + 1e-9
        assert lo <= hi + 1e-9


def test_bracket_zero_functional():
    ctx = NormContext(1, 1, mo.linear())
    assert predual_norm_bracket(functional([], [], ctx), ctx) == (0.0, 0.0)


def test_bracket_difference_atom_k1():
    ctx = NormContext(1, 1, mo.linear())
    g = functional([difference([0.0], [1.0], [1])], [1.0], ctx)
    lo, hi = predual_norm_bracket(g, ctx)
    assert hi <= 1.0 + 1e-9
    assert lo <= 1.0 + 1e-9
    assert lo <= hi + 1e-9


def test_bracket_consistent_with_k0_exact_norm():
    # for k=0 delta functionals the lower LP has the same feasible set as the
    # exact norm LP, so lo == exact and hi >= exact
    rng = np.random.default_rng(5)
    om = mo.linear()
    for _ in range(15):
        m = int(rng.integers(1, 5))
        pts = [tuple(p) for p in rng.uniform(-2, 2, (m, 1))]
        g = functional([delta(p) for p in pts], rng.normal(size=m), CTX0)
        exact = predual_norm_k0(g, om)
        lo, hi = predual_norm_bracket(g, CTX0)
        assert lo == pytest.approx(exact, abs=1e-8)
        assert hi >= exact - 1e-8


def test_bracket_order_random():
    rng = np.random.default_rng(6)
    for _ in range(15):
        k = int(rng.integers(1, 3))
        ctx = NormContext(k, 1, mo.linear())
        m = int(rng.integers(1, 4))
        pts = np.sort(rng.uniform(-2, 2, m))
        while m > 1 and np.min(np.diff(pts)) < 0.1:
            pts = np.sort(rng.uniform(-2, 2, m))
        atoms, coeffs = [], []
        for p in pts:
            for order in range(k + 1):
                if rng.uniform() < 0.6:
                    atoms.append(delta([p], [order]))
                    coeffs.append(float(rng.normal()))
        if not atoms:
            continue
        g = functional(atoms, coeffs, ctx)
        lo, hi = predual_norm_bracket(g, ctx)
        assert lo <= hi + 1e-7


# ---------------------------------------------------------------------------
# finiteness


def test_finiteness_k0_d2_ratio_exactly_one():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(2, 12))
        pts = rng.uniform(-2, 2, (m, n))
        while True:
            d2 = np.sum((pts[:, None] - pts[None, :]) ** 2, -1)
            np.fill_diagonal(d2, 1.0)
            if d2.min() > 1e-6:
                break
            pts = rng.uniform(-2, 2, (m, n))
        fld = field_from_data(pts, rng.normal(size=m))
        rep = finiteness_gap(fld, 2, NormContext(0, n, mo.linear()))
        assert rep.ratio == 1.0
        assert rep.subset_sup <= rep.full


def test_finiteness_single_point():
    fld = field_from_data([[0.0]], [2.0])
    rep = finiteness_gap(fld, 3, CTX0)
    assert rep.ratio == 1.0
    assert rep.witness_subset == (0,)


def test_finiteness_k1_ratio_one_for_pairwise_proxy():
    # the proxy quantity is pair-based, so d = k+2 >= 2 gives ratio 1
    rng = np.random.default_rng(8)
    ratios = []
    for _ in range(30):
        m = int(rng.integers(2, 7))
        pts = np.sort(rng.uniform(-2, 2, m))
        while np.min(np.diff(pts)) < 0.05:
            pts = np.sort(rng.uniform(-2, 2, m))
        fld = field_from_jets([jet([p], rng.normal(size=2), 1) for p in pts])
        rep = finiteness_gap(fld, 3, NormContext(1, 1, mo.linear()))
        ratios.append(rep.ratio)
        assert rep.ratio >= 1.0 - 1e-12
    assert max(ratios) <= 1.0 + 1e-12  # bounded (identically one for the proxy)


def test_finiteness_subset_sup_monotone_in_d():
    rng = np.random.default_rng(9)
    for _ in range(20):
        m = int(rng.integers(3, 8))
        pts = rng.uniform(-2, 2, (m, 2))
        while True:
            d2 = np.sum((pts[:, None] - pts[None, :]) ** 2, -1)
            np.fill_diagonal(d2, 1.0)
            if d2.min() > 1e-4:
                break
            pts = rng.uniform(-2, 2, (m, 2))
        fld = field_from_data(pts, rng.normal(size=m))
        ctx = NormContext(0, 2, mo.power(0.5))
        prev = 0.0
        for d in (1, 2, 3):
            rep = finiteness_gap(fld, d, ctx)
            assert rep.subset_sup >= prev - 1e-15
            assert rep.subset_sup <= rep.full + 1e-15  # left inclusion, exact
            prev = rep.subset_sup


def test_finiteness_combinatorial_guard():
    pts = np.arange(40, dtype=float).reshape(-1, 1)
    fld = field_from_data(pts, np.zeros(40))
    with pytest.raises(SizeError):
        finiteness_gap(fld, 8, CTX0)
