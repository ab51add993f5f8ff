"""Independent reference computations, written directly in sympy.

Nothing here calls the substitution engine, the Hermite/Smith code or the
kernel solver of the package; only the input data (tables, action tables)
are read from package objects.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

import sympy as sp

D, x, l, m, t = sp.symbols("D x l m t")
SYMS = {"D": D, "x": x, "l": l, "m": m, "t": t}


def to_sym(p) -> sp.Expr:
    return sp.expand(sp.sympify(str(p).replace("^", "**"), locals=SYMS))


def from_dict(d):
    return {k: sp.expand(v) for k, v in d.items() if sp.expand(v) != 0}


# -- n-products from the D-rules alone --------------------------------------------------------
#   (D a)_n b = -n a_(n-1) b,    a_n (D b) = D (a_n b) + n a_(n-1) b


def table_nprod(C, a: str, b: str, n: int) -> dict:
    """``a _n b`` for basis symbols: ``n!`` times the ``l^n`` coefficient of the table entry."""
    out = {}
    for c, p in C.table.get((a, b), {}).items():
        coeff = to_sym(p).coeff(l, n)
        if coeff != 0:
            out[c] = sp.expand(coeff * factorial(n))
    return out


def _mono_nprod(C, r: int, a: str, s: int, b: str, n: int) -> dict:
    if n < 0:
        return {}
    if r > 0:
        inner = _mono_nprod(C, r - 1, a, s, b, n - 1)
        return from_dict({k: -n * v for k, v in inner.items()})
    if s > 0:
        first = _mono_nprod(C, 0, a, s - 1, b, n)
        second = _mono_nprod(C, 0, a, s - 1, b, n - 1)
        keys = set(first) | set(second)
        return from_dict({k: D * first.get(k, 0) + n * second.get(k, 0) for k in keys})
    return table_nprod(C, a, b, n)


def element_terms(e):
    """``[(r, symbol, coefficient)]`` for ``sum c D^r symbol``."""
    out = []
    for sym, p in e.items():
        poly = sp.Poly(to_sym(p), D)
        for (r,), c in poly.terms():
            out.append((r, sym, c))
    return out


def nprod(C, a, b, n: int) -> dict:
    acc = {}
    for r, sa, ca in element_terms(a):
        for s, sb, cb in element_terms(b):
            for k, v in _mono_nprod(C, r, sa, s, sb, n).items():
                acc[k] = acc.get(k, 0) + ca * cb * v
    return from_dict(acc)


def lprod(C, a, b, nmax: int = 12) -> dict:
    acc = {}
    for n in range(nmax + 1):
        for k, v in nprod(C, a, b, n).items():
            acc[k] = acc.get(k, 0) + v * l ** n / factorial(n)
    return from_dict(acc)


def as_dict(e) -> dict:
    return from_dict({s: to_sym(p) for s, p in e.items()})


# -- Cend_n -------------------------------------------------------------------------------------


def cend_mat(a) -> sp.Matrix:
    return sp.Matrix([[to_sym(a[i, j]) for j in range(a.size)] for i in range(a.size)])


def cend_product(A: sp.Matrix, B: sp.Matrix, sigma=l) -> sp.Matrix:
    """``f(D,x)E _s g(D,x)F = f(-s, x) g(D+s, x+s) EF`` entrywise on matrices."""
    left = A.applyfunc(lambda f: f.subs(D, -sigma))
    right = B.applyfunc(lambda g: g.subs({D: D + sigma, x: x + sigma}, simultaneous=True))
    return (left * right).applyfunc(sp.expand)


def cend_act(A: sp.Matrix, v: sp.Matrix, sigma=l) -> sp.Matrix:
    """``f(D,x)E _s h(D)u = f(-s, D) h(D+s) E u``."""
    left = A.applyfunc(lambda f: f.subs({D: -sigma, x: D}, simultaneous=True))
    right = v.applyfunc(lambda h: h.subs(D, D + sigma))
    return (left * right).applyfunc(sp.expand)


def series_act(A: sp.Matrix, v: sp.Matrix, sigma=l, nmax: int = 12) -> sp.Matrix:
    """Same action recomputed through the Taylor expansion ``h(D + s) = sum s^j/j! h^(j)(D)``."""
    out = sp.zeros(A.rows, 1)
    for i in range(A.rows):
        acc = 0
        for j in range(A.cols):
            f = sp.Poly(A[i, j], D, x)
            shifted = sum(sigma ** k / factorial(k) * sp.diff(v[j], D, k) for k in range(nmax + 1))
            for (r, k), c in f.terms():
                acc += c * (-sigma) ** r * D ** k * shifted
        out[i] = sp.expand(acc)
    return out


def tau(A: sp.Matrix) -> sp.Matrix:
    """Encoded right endomorphism of ``A``: entries ``f(x - D, x)``, matrix order kept."""
    return A.applyfunc(lambda f: sp.expand(f.subs(D, x - D)))


# -- kernels by brute force -----------------------------------------------------------------------


def rep_kernel_dim(R, degree: int) -> int:
    """Dimension over Q of ``{sum f_b(D) b : deg f_b <= degree}`` acting as zero.

    ``(f(D) b) _l g = f(-l) phi_(b,g)(D, l)`` modulo the torsion relation of each target.
    """
    basis = list(R.algebra.basis)
    cs = {(b, k): sp.Symbol(f"c_{i}_{k}") for i, b in enumerate(basis) for k in range(degree + 1)}
    eqs = []
    for g in R.module.generators:
        image = {}
        for b in basis:
            f = sum(cs[(b, k)] * (-l) ** k for k in range(degree + 1))
            for tgt, p in R.action.get((b, g), {}).items():
                image[tgt] = image.get(tgt, 0) + f * to_sym(p)
        for tgt, val in image.items():
            h = to_sym(R.module.relation(tgt))
            val = sp.expand(val)
            if h != 0:
                val = sp.rem(sp.Poly(val, D), sp.Poly(h, D)).as_expr()
            poly = sp.Poly(sp.expand(val), D, l)
            eqs.extend(poly.coeffs())
    unknowns = list(cs.values())
    if not eqs:
        return len(unknowns)
    A, _ = sp.linear_eq_to_matrix(eqs, unknowns)
    return len(unknowns) - A.rank()


def syzygies_up_to(M, degree: int):
    """All vectors ``v`` with ``deg v_i <= degree`` and ``v M = 0``, as a sympy basis over Q."""
    rows, cols = M.rows, M.cols
    cs = [[sp.Symbol(f"v_{i}_{k}") for k in range(degree + 1)] for i in range(rows)]
    v = [sum(cs[i][k] * D ** k for k in range(degree + 1)) for i in range(rows)]
    eqs = []
    for j in range(cols):
        s = sp.expand(sum(v[i] * to_sym(M.entry(i, j)) for i in range(rows)))
        if s != 0:
            eqs.extend(sp.Poly(s, D).coeffs())
    flat = [c for row in cs for c in row]
    if eqs:
        A, _ = sp.linear_eq_to_matrix(eqs, flat)
        null = A.nullspace()
    else:
        null = [sp.Matrix([1 if q == p else 0 for q in range(len(flat))]) for p in range(len(flat))]
    out = []
    for vec in null:
        sub = dict(zip(flat, vec))
        out.append([sp.expand(e.subs(sub)) for e in v])
    return out


def determinantal_invariants(M) -> list:
    """Invariant factors as ``d_k / d_(k-1)``, ``d_k`` the monic gcd of the ``k x k`` minors."""
    A = sp.Matrix([[to_sym(M.entry(i, j)) for j in range(M.cols)] for i in range(M.rows)])
    out, prev = [], sp.Integer(1)
    for k in range(1, min(A.rows, A.cols) + 1):
        g = sp.Integer(0)
        for rows in itertools.combinations(range(A.rows), k):
            for cols in itertools.combinations(range(A.cols), k):
                g = sp.gcd(g, A.extract(list(rows), list(cols)).det())
        if g == 0:
            break
        g = sp.Poly(g, D).monic().as_expr()
        out.append(sp.expand(sp.cancel(g / prev)))
        prev = g
    return out


# -- growth by enumerating bracketings ------------------------------------------------------------


def cend1_growth(gen: sp.Expr, nmax: int) -> list:
    """Ranks over ``Q[D]`` of spans of all n-product monomials of length ``<= n`` in ``gen``."""

    @lru_cache(maxsize=None)
    def monomials(k: int):
        if k == 1:
            return (sp.expand(gen),)
        out = set()
        for i in range(1, k):
            for u in monomials(i):
                for w in monomials(k - i):
                    lp = sp.expand(cend_product(sp.Matrix([[u]]), sp.Matrix([[w]]))[0, 0])
                    deg = sp.degree(lp, l) if lp != 0 else -1
                    for n in range(deg + 1):
                        c = sp.expand(lp.coeff(l, n) * factorial(n))
                        if c != 0:
                            out.add(c)
        return tuple(sorted(out, key=sp.default_sort_key))

    ranks = []
    acc = []
    for n in range(1, nmax + 1):
        acc.extend(monomials(n))
        xdeg = max(sp.degree(p, x) for p in acc)
        rows = [[sp.Poly(p, x).as_expr().coeff(x, k) for k in range(xdeg + 1)] for p in acc]
        ranks.append(sp.Matrix(rows).rank())
    return ranks


# -- number fields ------------------------------------------------------------------------------------


def ext_mul(a, b, minpoly):
    """Product of coordinate vectors in ``Q[y]/(minpoly)``."""
    y = sp.Symbol("y")
    pa = sum(sp.Rational(c) * y ** i for i, c in enumerate(a))
    pb = sum(sp.Rational(c) * y ** i for i, c in enumerate(b))
    mp = sum(sp.Rational(c) * y ** i for i, c in enumerate(minpoly))
    r = sp.Poly(sp.rem(sp.expand(pa * pb), mp, y), y)
    n = len(minpoly) - 1
    return [r.as_expr().coeff(y, i) for i in range(n)]


def binom(n, k):
    return comb(n, k) if 0 <= k <= n else 0
