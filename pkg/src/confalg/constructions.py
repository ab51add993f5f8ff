"""Builders of finite faithful representations.

* :func:`adjoin_unit_rep`: associative algebras act on the span of ``b _n v``
  for an adjoined generator ``v`` with ``N(b, v) = M'``.
* :func:`double_rep`: a Lie algebra acts on ``V + M`` given a pairing
  ``<. _l .>: L x V -> M[l]``.
* :func:`central_pbw_rep`: the double built from the action of ``L`` on
  ``Q[t] (x)_H L`` modulo the tail ``I(B, N)``.
* :func:`solvable_faithful_rep`: locality bounds from a triangular basis,
  then the central builder; optionally over ``Q(a)`` followed by
  restriction of scalars.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import comb, factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .confcore import (
    CheckReport,
    ConfAlgebra,
    ConfElement,
    _require_associative,
    apply_table,
    derived_series,
    element,
    locality,
    n_product,
    product_at,
)
from .errors import BasisError, DimensionError, FormatError, PreconditionError
from .exactmath import LAM, MU, D, ExtFieldElem, FieldContext, MultiPoly
from .representations import (
    ConfRep,
    HModulePresentation,
    kernel_of_tables,
    make_rep,
    regular_rep,
    rename_generators,
    restrict_scalars,
    trivial_rep,
)

# -- unit adjunction -----------------------------------------------------------------


def table_degree_bound(C: ConfAlgebra) -> int:
    """Largest D-degree among the n-product coefficients of the table."""
    if C.kind != "associative":
        raise PreconditionError(f"table_degree_bound needs an associative algebra, got kind {C.kind!r}")
    return C.max_d_degree()


def _module_name(b: str, n: int) -> str:
    return f"{b}_{n}v"


def adjoin_unit_rep(C: ConfAlgebra, Mprime: Optional[int] = None, generator: str = "v") -> ConfRep:
    """Action of ``C`` on the free module with basis ``v`` and ``b _n v`` (``n < M'``).

    ``c _k (b _n v) = sum_s C(k, s) (c _(k-s) b) _(n+s) v``, where
    ``(D^r d) _p v = (-1)^r p!/(p-r)! d _(p-r) v`` and indices ``>= M'`` vanish.
    Faithfulness is guaranteed when ``M' > M = table_degree_bound(C)``.
    """
    _require_associative(C, "adjoin_unit_rep")
    M = table_degree_bound(C)
    Mp = M + 1 if Mprime is None else Mprime
    if Mp < 0:
        raise ValueError("M' must be non-negative")
    notes = [f"M = {M}", f"M' = {Mp}"]
    if Mp <= M:
        notes.append(f"M' = {Mp} <= M = {M}: faithfulness is not guaranteed by the construction")
    gens = [generator] + [_module_name(b, n) for b in C.basis for n in range(Mp)]
    if len(set(gens)) != len(gens):
        raise FormatError(f"module generator names clash; pick another name than {generator!r}")

    def lower(d: str, r: int, p: int) -> Optional[Tuple[str, Fraction]]:
        if r > p or p - r >= Mp:
            return None
        return _module_name(d, p - r), Fraction((-1) ** r * factorial(p), factorial(p - r))

    table: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for c in C.basis:
        row = {_module_name(c, k): LAM ** k * Fraction(1, factorial(k)) for k in range(Mp)}
        if row:
            table[(c, generator)] = row
    for c, b in iproduct(C.basis, repeat=2):
        lp = C.entry(c, b)
        if lp.is_zero():
            continue
        N = lp.lambda_degree() + 1
        prods = [lp.n_coefficient(j) for j in range(N)]
        for n in range(Mp):
            acc: Dict[str, MultiPoly] = {}
            for k in range(N + Mp + M + 1):
                coeff = {}
                for s in range(k + 1):
                    if k - s >= N:
                        continue
                    for d, h in prods[k - s].items():
                        for r, hr in enumerate(h.coefficients_in("D")):
                            if not hr:
                                continue
                            low = lower(d, r, n + s)
                            if low is None:
                                continue
                            target, f = low
                            coeff[target] = coeff.get(target, 0) + comb(k, s) * f * hr.constant_term()
                for target, v in coeff.items():
                    if v:
                        acc[target] = acc.get(target, MultiPoly.const(0)) + LAM ** k * (v / factorial(k))
            if acc:
                table[(c, _module_name(b, n))] = acc
    return make_rep(C, HModulePresentation.free(gens), table, notes=notes)


# -- double construction -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Pairing:
    """``<b _l e> = sum phi(D, l) m`` for ``b`` in the basis of ``L``, ``e`` a generator of ``V``.

    Extended to all of ``L (x) V`` by sesqui-linearity (condition (D1)).
    """

    table: Mapping[Tuple[str, str], Mapping[str, MultiPoly]]

    def __post_init__(self):
        clean = {}
        for key, row in self.table.items():
            entry = {t: MultiPoly.coerce(p) for t, p in row.items() if MultiPoly.coerce(p)}
            if entry:
                clean[tuple(key)] = entry
        object.__setattr__(self, "table", clean)

    def validate(self, L: ConfAlgebra, V: ConfRep, M: ConfRep):
        for (b, e), row in self.table.items():
            if b not in L.basis:
                raise BasisError(f"pairing symbol {b!r} not in basis {list(L.basis)}")
            if e not in V.module.generators:
                raise BasisError(f"pairing source {e!r} is not a generator of V")
            for t, p in row.items():
                if t not in M.module.generators:
                    raise BasisError(f"pairing target {t!r} is not a generator of M")
                if not p.involves_only(["D", "l"]):
                    raise FormatError(f"pairing entry ({b},{e})->{t} = {p} must involve only D and l")


def pair_at(P: Pairing, M: ConfRep, a: ConfElement, w: ConfElement, sigma: MultiPoly) -> ConfElement:
    return M.module.reduce(apply_table(P.table, a, w, sigma))


def _act(R: ConfRep, a: ConfElement, w: ConfElement, sigma: MultiPoly) -> ConfElement:
    return R.module.reduce(apply_table(R.action, a, w, sigma))


def _d2_residual(L, V, M, P, pair) -> List[Tuple[str, ConfElement]]:
    x, y = (ConfElement.of(s) for s in pair)
    out = []
    for e in V.module.generators:
        ev = ConfElement.of(e)
        lhs = _act(M, x, pair_at(P, M, y, ev, MU), LAM) - pair_at(P, M, y, _act(V, x, ev, LAM), MU)
        rhs = pair_at(P, M, product_at(L, x, y, LAM), ev, LAM + MU)
        r = lhs - rhs
        if r:
            out.append((e, r))
    return out


def check_double_conditions(L: ConfAlgebra, V: ConfRep, M: ConfRep, P: Pairing) -> CheckReport:
    """(D1) holds by the sesqui-linear extension; (D2) and (D3) are computed.

    (D2): ``x _l <y _m e> - <y _m (x _l e)> = <[x _l y] _(l+m) e>`` on basis pairs and generators of ``V``.
    (D3): the common kernel of the pairing, of ``V`` and of ``M`` is zero.
    """
    if L.kind != "lie":
        raise PreconditionError(f"the double construction needs a Lie algebra, got kind {L.kind!r}")
    for R in (V, M):
        if not R.algebra.same_table(L):
            raise PreconditionError("V and M must be modules over the given algebra")
    P.validate(L, V, M)
    witnesses = []
    for pair in iproduct(L.basis, repeat=2):
        for e, r in _d2_residual(L, V, M, P, pair):
            witnesses.append({"condition": "D2", "pair": list(pair), "generator": e, "residual": str(r)})
    K = kernel_of_tables(L, [(V.module.generators, M.module, P.table),
                             (V.module.generators, V.module, V.action),
                             (M.module.generators, M.module, M.action)])
    for g in K.generators:
        witnesses.append({"condition": "D3", "kernel_element": str(ConfElement.from_vector(L.basis, g))})
    return CheckReport("double-conditions", not witnesses, witnesses, ["D1 holds by sesqui-linear extension"])


def double_rep(L: ConfAlgebra, V: ConfRep, M: ConfRep, P: Pairing, verify: bool = True) -> ConfRep:
    """``a ^_l v = a _l v + l <a _l v>`` on ``V``, ``a ^_l m = a _l m`` on ``M``."""
    if verify:
        report = check_double_conditions(L, V, M, P)
        if not report.passed:
            raise PreconditionError("double construction conditions fail", witness=report.witnesses)
    else:
        P.validate(L, V, M)
    if set(V.module.generators) & set(M.module.generators):
        ren_v = {g: f"V.{g}" for g in V.module.generators}
        ren_m = {g: f"M.{g}" for g in M.module.generators}
        V, M = rename_generators(V, ren_v), rename_generators(M, ren_m)
        P = Pairing({(b, ren_v[e]): {ren_m[t]: p for t, p in row.items()} for (b, e), row in P.table.items()})
    module = HModulePresentation(V.module.generators + M.module.generators, V.module.relations + M.module.relations)
    table: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for key, row in V.action.items():
        table[key] = dict(row)
    for key, row in P.table.items():
        target = table.setdefault(key, {})
        for t, p in row.items():
            target[t] = target.get(t, MultiPoly.const(0)) + LAM * p
    for key, row in M.action.items():
        table[key] = dict(row)
    return make_rep(L, module, table, notes=V.notes + M.notes)


def canonical_pairing(L: ConfAlgebra, generator: str = "u") -> Tuple[ConfRep, ConfRep, Pairing]:
    """``V = H u`` trivial, ``M = L`` adjoint, ``<b _l u> = b``."""
    V = trivial_rep(L, (generator,))
    M = regular_rep(L)
    P = Pairing({(b, generator): {b: MultiPoly.const(1)} for b in L.basis})
    return V, M, P


# -- the central action ------------------------------------------------------------------------


class CentralElement:
    """``sum c * t^m (x)_H b`` in ``Q[t] (x)_H L`` with ``t^m (x) D b = -m t^(m-1) (x) b``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Tuple[int, str], object] | None = None):
        self.terms: Dict[Tuple[int, str], object] = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def basis(cls, m: int, b: str) -> "CentralElement":
        return cls({(m, b): Fraction(1)})

    @classmethod
    def from_tensor(cls, m: int, x: ConfElement, coeff: object = 1) -> "CentralElement":
        """``t^m (x) x`` with every ``D`` in ``x`` moved onto ``t``."""
        out: Dict[Tuple[int, str], object] = {}
        for b, h in x.items():
            for r, hr in enumerate(h.coefficients_in("D")):
                if not hr or r > m:
                    continue
                c = hr.constant_term() * ((-1) ** r * factorial(m) // factorial(m - r)) * coeff
                out[(m - r, b)] = out.get((m - r, b), 0) + c
        return cls(out)

    def __add__(self, other: "CentralElement") -> "CentralElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return CentralElement(out)

    def __sub__(self, other: "CentralElement") -> "CentralElement":
        return self + other.scale(-1)

    def scale(self, c) -> "CentralElement":
        return CentralElement({k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, CentralElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][0], kv[0][1]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m, b), c in self.items():
            t = "1" if m == 0 else ("t" if m == 1 else f"t^{m}")
            parts.append(f"{c} * {t} ({b})")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"CentralElement({str(self)!r})"


def central_action(L: ConfAlgebra, x, n: int, u: CentralElement) -> CentralElement:
    """``x _n (t^m (x) a) = sum_s C(n, s) t^(m+s) (x) [x _(n-s) a]``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = element(x, L.basis)
    out = CentralElement()
    for (m, a), c in u.terms.items():
        for s in range(n + 1):
            br = n_product(L, x, ConfElement.of(a), n - s)
            if br:
                out = out + CentralElement.from_tensor(m + s, br, comb(n, s) * c)
    return out


def _normalize_bounds(L: ConfAlgebra, N) -> Dict[str, int]:
    if isinstance(N, int):
        N = {b: N for b in L.basis}
    N = dict(N)
    missing = [b for b in L.basis if b not in N]
    if missing:
        raise FormatError(f"locality bound missing for {missing}")
    for b in N:
        if b not in L.basis:
            raise BasisError(f"locality bound given for unknown symbol {b!r}")
    bad = {b: v for b, v in N.items() if v < 1}
    if bad:
        raise PreconditionError("locality bounds must be positive", witness=bad)
    return N


def _windows(L: ConfAlgebra, N: Mapping[str, int]) -> Tuple[int, int]:
    """Exponent drop is at most the table D-degree ``d``; beyond these windows every image lies in ``I``."""
    d = L.max_d_degree()
    loc = max((L.table_locality(a, b) for a, b in iproduct(L.basis, repeat=2)), default=0)
    top = max(N.values(), default=0)
    return d, top + loc + d + 1


def _outside(N: Mapping[str, int], w: CentralElement) -> List[Tuple[int, str]]:
    return [(m, b) for (m, b) in w.terms if m < N[b]]


def check_central_pbw(L: ConfAlgebra, N, extra_window: int = 0) -> CheckReport:
    """Invariance of ``I(B, N) = span{t^m (x) b : m >= N(b)}`` under the central action.

    For each ``a, b`` it scans ``m`` from ``N(b)`` up to
    ``max(N(b) + d + 1, max N + d)`` and ``n`` up to ``max N + max locality + d + 1``
    (``d`` the largest table D-degree); past those windows every image
    provably stays in ``I``.
    """
    if L.kind != "lie":
        raise PreconditionError(f"check_central_pbw needs a Lie algebra, got kind {L.kind!r}")
    N = _normalize_bounds(L, N)
    d, nmax = _windows(L, N)
    top = max(N.values(), default=0)
    for a, b in iproduct(L.basis, repeat=2):
        mmax = max(N[b] + d + 1, top + d) + extra_window
        for m in range(N[b], mmax + 1):
            for n in range(nmax + extra_window + 1):
                w = central_action(L, a, n, CentralElement.basis(m, b))
                bad = _outside(N, w)
                if bad:
                    wit = {"x": a, "n": n, "m": m, "b": b, "image": str(w),
                           "outside": [f"t^{mm} ({bb})" for mm, bb in bad]}
                    return CheckReport("central-pbw", False, [wit], [f"N = {N}"])
    return CheckReport("central-pbw", True, [], [f"N = {N}", f"windows: n <= {nmax}, D-degree {d}"])


def _tail_name(m: int, b: str) -> str:
    return f"t{m}.{b}"


def central_pbw_rep(L: ConfAlgebra, N, generator: str = "u", verify: bool = True) -> ConfRep:
    """Double of the trivial ``H u`` and ``M = H (x) (Q[t] (x)_H L / I(B, N))``.

    Pairing ``<x _l u> = sum_(n < N(x)) l^n/n! t^n (x) x``; rank ``1 + sum N(b)``.
    """
    N = _normalize_bounds(L, N)
    report = check_central_pbw(L, N)
    if not report.passed:
        raise PreconditionError("I(B, N) is not invariant under the central action", witness=report.witnesses[0])
    d, nmax = _windows(L, N)
    gens = [_tail_name(m, b) for b in L.basis for m in range(N[b])]
    action: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for a in L.basis:
        for b in L.basis:
            for m in range(N[b]):
                row: Dict[str, MultiPoly] = {}
                for n in range(nmax + 1):
                    w = central_action(L, a, n, CentralElement.basis(m, b))
                    for (mm, bb), c in w.terms.items():
                        if mm < N[bb]:
                            key = _tail_name(mm, bb)
                            row[key] = row.get(key, MultiPoly.const(0)) + LAM ** n * c / factorial(n)
                if row:
                    action[(a, _tail_name(m, b))] = row
    module = HModulePresentation.free(gens)
    M = ConfRep(L, module, action) if not verify else make_rep(L, module, action)
    V = ConfRep(L, HModulePresentation.free((generator,)), {})
    P = Pairing({(x, generator): {_tail_name(n, x): LAM ** n * Fraction(1, factorial(n)) for n in range(N[x])}
                 for x in L.basis})
    R = double_rep(L, V, M, P, verify=verify)
    return ConfRep(R.algebra, R.module, R.action, R.side, R.notes + (f"N = {N}",))


# -- solvable algebras -------------------------------------------------------------------------


def check_triangular(L: ConfAlgebra, order: Optional[Sequence[str]] = None) -> Optional[dict]:
    """First entry ``[a _l b_i]`` with a component on ``b_j``, ``j < i``; ``None`` if triangular."""
    order = list(order or L.basis)
    if sorted(order) != sorted(L.basis):
        raise FormatError(f"order {order} is not a permutation of the basis {list(L.basis)}")
    pos = {b: i for i, b in enumerate(order)}
    for a in L.basis:
        for bi in order:
            for t in L.entry(a, bi).support():
                if pos[t] < pos[bi]:
                    return {"x": a, "b": bi, "component": t, "value": str(L.entry(a, bi))}
    return None


def solvable_bounds(L: ConfAlgebra, K: int = 1, order: Optional[Sequence[str]] = None) -> Dict[str, int]:
    """``N(b_n) = K``, ``N(b_i) = max(K, N(b_j) + deg_D phi_(a,i)^j for j > i)``."""
    if L.kind != "lie":
        raise PreconditionError(f"solvable_bounds needs a Lie algebra, got kind {L.kind!r}")
    if K < 1:
        raise ValueError("K must be positive")
    order = list(order or L.basis)
    bad = check_triangular(L, order)
    if bad is not None:
        raise PreconditionError(f"table is not triangular: [{bad['x']} _l {bad['b']}] has a {bad['component']} "
                                f"component", witness=bad)
    N: Dict[str, int] = {}
    for i in reversed(range(len(order))):
        bi = order[i]
        best = K
        for a in L.basis:
            for t, phi in L.entry(a, bi).items():
                if t != bi:
                    best = max(best, N[t] + max(phi.degree("D"), 0))
        N[bi] = best
    return {b: N[b] for b in L.basis}


def change_basis(L: ConfAlgebra, new_basis: Sequence[str], matrix: Sequence[Sequence[object]]) -> ConfAlgebra:
    """Table of ``L`` in ``b'_i = sum_k S_ik b_k`` for a constant invertible ``S`` (over Q or Q(a))."""
    n = len(L.basis)
    S = [[x for x in row] for row in matrix]
    if len(S) != n or any(len(r) != n for r in S):
        raise DimensionError(f"change of basis must be {n}x{n}")
    Sinv = _invert(S)
    old = [ConfElement({b: MultiPoly.const(S[i][k]) for k, b in enumerate(L.basis) if S[i][k]}) for i in range(n)]
    table = {}
    for i, j in iproduct(range(n), repeat=2):
        val = product_at(L, old[i], old[j], LAM)
        row: Dict[str, MultiPoly] = {}
        for k, b in enumerate(L.basis):
            p = val[b]
            if not p:
                continue
            for t in range(n):
                if Sinv[k][t]:
                    row[new_basis[t]] = row.get(new_basis[t], MultiPoly.const(0)) + p * Sinv[k][t]
        if row:
            table[(new_basis[i], new_basis[j])] = row
    return ConfAlgebra(L.kind, tuple(new_basis), table, name=f"{L.name}'")


def _invert(S):
    """Gauss-Jordan inverse over Q or Q(a)."""
    n = len(S)
    A = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(S)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            raise PreconditionError("change of basis matrix is singular")
        A[c], A[p] = A[p], A[c]
        inv = A[c][c].inverse() if isinstance(A[c][c], ExtFieldElem) else 1 / Fraction(A[c][c])
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def solvable_faithful_rep(L: ConfAlgebra, K: int = 1, order: Optional[Sequence[str]] = None,
                          field: Optional[FieldContext] = None,
                          change: Optional[Sequence[Sequence[object]]] = None) -> ConfRep:
    """Faithful representation of a solvable ``L`` on a free module of rank ``1 + sum N(b)``.

    ``order`` lists a triangular basis.  When triangularising needs a finite
    extension, pass ``field`` and ``change`` (a constant matrix over it whose
    rows express the triangular basis in ``L``'s basis): the builder runs
    over ``Q(a)``, pulls the action back to ``L``'s basis and restricts
    scalars, which multiplies the rank by ``deg p``.
    """
    if L.kind != "lie":
        raise PreconditionError(f"solvable_faithful_rep needs a Lie algebra, got kind {L.kind!r}")
    series, solvable = derived_series(L)
    if not solvable:
        raise PreconditionError("algebra is not solvable: the derived series stabilises at a nonzero term",
                                witness={"terminal_rank": series[-1].module_rank})
    if change is None:
        N = solvable_bounds(L, K, order)
        R = central_pbw_rep(L, N)
        return ConfRep(R.algebra, R.module, R.action, R.side, R.notes + (f"K = {K}",))
    if field is None:
        raise PreconditionError("a change of basis over an extension needs its field")
    new_names = [f"{b}'" for b in L.basis]
    Lp = change_basis(L, new_names, change)
    N = solvable_bounds(Lp, K, order)
    Rp = central_pbw_rep(Lp, N, verify=False)
    S = [list(r) for r in change]
    Sinv = _invert(S)
    # b_k = sum_i Sinv[k][i] b'_i
    action: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for k, b in enumerate(L.basis):
        for g in Rp.module.generators:
            row: Dict[str, MultiPoly] = {}
            for i, bp in enumerate(new_names):
                c = Sinv[k][i]
                if not c:
                    continue
                for t, p in Rp.action.get((bp, g), {}).items():
                    row[t] = row.get(t, MultiPoly.const(0)) + p * c
            row = {t: p for t, p in row.items() if p}
            if row:
                action[(b, g)] = row
    R = restrict_scalars(L, Rp.module, action, field, notes=Rp.notes + (f"K = {K}",))
    return R
