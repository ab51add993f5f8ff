"""Finite conformal algebras given by lambda-product tables on a free H-basis.

A table stores, for every ordered pair of basis symbols ``(a, b)``, the
lambda-product ``a_l b = sum_c g_abc(D, l) c``.  Everything else (n-products,
braced products, opposite and commutator algebras, axiom checks) is derived
from that single table by sesqui-linearity:

    f(D) a  _s  g(D) b  =  f(-s) g(D + s) (a _s b)

for any expression ``s`` free of ``D``.  Axiom checks only need basis
tuples because both sides of each identity are sesqui-linear in every
argument.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import _parallel
from .errors import BasisError, FormatError, PreconditionError
from .exactmath import D, LAM, MU, T, MultiPoly
from .hlinalg import SubmoduleBasis, solve_affine

KINDS = ("associative", "lie")


# -- elements -------------------------------------------------------------------


class ConfElement:
    """Finite formal combination ``sum f_s * s`` of symbols with polynomial coefficients.

    Used for algebra elements (coefficients in ``D``), lambda-values
    (coefficients in ``D`` and ``l``) and module vectors alike.
    """

    __slots__ = ("_coords", "_hash")

    def __init__(self, coords: Mapping[str, object] | None = None):
        clean = {}
        for s, p in (coords or {}).items():
            p = MultiPoly.coerce(p)
            if p:
                clean[s] = p
        self._coords: Dict[str, MultiPoly] = clean
        self._hash = None

    @classmethod
    def of(cls, symbol: str, coeff: object = 1) -> "ConfElement":
        return cls({symbol: coeff})

    @classmethod
    def zero(cls):
        return cls()

    @property
    def coords(self) -> Dict[str, MultiPoly]:
        return dict(self._coords)

    def items(self):
        return self._coords.items()

    def __getitem__(self, symbol: str) -> MultiPoly:
        return self._coords.get(symbol, MultiPoly.const(0))

    def support(self) -> Tuple[str, ...]:
        return tuple(self._coords)

    def is_zero(self) -> bool:
        return not self._coords

    def __bool__(self):
        return bool(self._coords)

    def _combine(self, other, sign: int):
        out = dict(self._coords)
        for s, p in other._coords.items():
            q = out.get(s)
            q = p * sign if q is None else q + p * sign
            if q:
                out[s] = q
            else:
                out.pop(s, None)
        return type(self)._raw(out)

    @classmethod
    def _raw(cls, coords):
        e = object.__new__(cls)
        e._coords = coords
        e._hash = None
        return e

    def __add__(self, other):
        if not isinstance(other, ConfElement):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if not isinstance(other, ConfElement):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)._raw({s: -p for s, p in self._coords.items()})

    def __rmul__(self, scalar):
        scalar = MultiPoly.coerce(scalar)
        if not scalar:
            return type(self)()
        return type(self)._raw({s: q for s, p in self._coords.items() if (q := scalar * p)})

    __mul__ = __rmul__

    def map(self, fn) -> "ConfElement":
        return type(self)({s: fn(p) for s, p in self._coords.items()})

    def substitute(self, assignment: Mapping[str, object]) -> "ConfElement":
        return self.map(lambda p: p.substitute(assignment))

    def degree(self, var: str) -> int:
        return max((p.degree(var) for p in self._coords.values()), default=-1)

    def involves_only(self, names: Iterable[str]) -> bool:
        names = list(names)
        return all(p.involves_only(names) for p in self._coords.values())

    def __eq__(self, other):
        if isinstance(other, ConfElement):
            return self._coords == other._coords
        if other == 0:
            return not self._coords
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._coords.items()))
        return self._hash

    def to_vector(self, basis: Sequence[str]) -> List[MultiPoly]:
        extra = set(self._coords) - set(basis)
        if extra:
            raise BasisError(f"symbols {sorted(extra)} not in basis {list(basis)}")
        return [self[s] for s in basis]

    @classmethod
    def from_vector(cls, basis: Sequence[str], vector: Sequence[object]):
        return cls(dict(zip(basis, vector)))

    def __str__(self):
        if not self._coords:
            return "0"
        parts = []
        for s, p in self._coords.items():
            if p == 1:
                parts.append(s)
            elif p == -1:
                parts.append(f"-{s}")
            elif len(p) == 1:
                parts.append(f"{p}*{s}")
            else:
                parts.append(f"({p})*{s}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r})"


class LambdaElem(ConfElement):
    """Value of a lambda-product: a polynomial in ``l`` with element coefficients."""

    __slots__ = ()

    def lambda_degree(self) -> int:
        return self.degree("l")

    def n_coefficient(self, n: int) -> ConfElement:
        """``n! * [l^n]``, i.e. the n-th product extracted from a lambda-product."""
        out = {}
        for s, p in self._coords.items():
            cs = p.coefficients_in("l")
            if n < len(cs) and cs[n]:
                out[s] = cs[n] * factorial(n)
        return ConfElement(out)


def element(value, basis: Sequence[str] | None = None) -> ConfElement:
    """Build an element from a symbol, a ``{symbol: poly}`` mapping or an element."""
    if isinstance(value, ConfElement):
        e = value
    elif isinstance(value, str):
        e = ConfElement.of(value)
    elif isinstance(value, Mapping):
        e = ConfElement(value)
    else:
        raise FormatError(f"cannot interpret {value!r} as an element")
    if basis is not None:
        bad = [s for s in e.support() if s not in basis]
        if bad:
            raise BasisError(f"symbols {bad} not in basis {list(basis)}")
    return e


# -- algebras -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConfAlgebra:
    """Conformal algebra with H-basis ``basis`` and lambda-product ``table``.

    ``table[(a, b)]`` maps target symbols to polynomials in ``D`` and ``l``;
    missing pairs mean a zero product.
    """

    kind: str
    basis: Tuple[str, ...]
    table: Mapping[Tuple[str, str], Mapping[str, MultiPoly]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FormatError(f"algebra kind must be one of {KINDS}, got {self.kind!r}")
        basis = tuple(self.basis)
        if len(set(basis)) != len(basis):
            raise FormatError(f"duplicate basis symbols in {basis}")
        clean = {}
        for (a, b), row in self.table.items():
            for s in (a, b, *row):
                if s not in basis:
                    raise BasisError(f"table symbol {s!r} not in basis {list(basis)}")
            entry = {}
            for c, p in row.items():
                p = MultiPoly.coerce(p)
                if not p.involves_only(["D", "l"]):
                    raise FormatError(f"table entry ({a},{b})->{c} = {p} must involve only D and l")
                if p:
                    entry[c] = p
            if entry:
                clean[(a, b)] = entry
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "table", clean)

    def entry(self, a: str, b: str) -> LambdaElem:
        if a not in self.basis or b not in self.basis:
            raise BasisError(f"({a}, {b}) not a pair of basis symbols of {self.name or 'algebra'}")
        return LambdaElem(self.table.get((a, b), {}))

    def table_locality(self, a: str, b: str) -> int:
        e = self.entry(a, b)
        return 0 if e.is_zero() else e.lambda_degree() + 1

    def max_d_degree(self) -> int:
        return max((p.degree("D") for row in self.table.values() for p in row.values()), default=0)

    def gen(self, symbol: str) -> ConfElement:
        if symbol not in self.basis:
            raise BasisError(f"{symbol!r} not in basis {list(self.basis)}")
        return ConfElement.of(symbol)

    def same_table(self, other: "ConfAlgebra") -> bool:
        return self.basis == other.basis and self.kind == other.kind and self.table == other.table

    def __eq__(self, other):
        if not isinstance(other, ConfAlgebra):
            return NotImplemented
        return self.same_table(other)

    def __hash__(self):
        return hash((self.kind, self.basis, frozenset((k, frozenset(v.items())) for k, v in self.table.items())))

    def __str__(self):
        lines = [f"{self.kind} conformal algebra {self.name or ''} on basis {{{', '.join(self.basis)}}}".replace("  ", " ")]
        for a, b in iproduct(self.basis, self.basis):
            e = self.entry(a, b)
            if e:
                lines.append(f"  {a} _l {b} = {e}")
        return "\n".join(lines)


# -- the product engine ------------------------------------------------------------------


def _check_basis(C: ConfAlgebra, x: ConfElement):
    for s in x.support():
        if s not in C.basis:
            raise BasisError(f"symbol {s!r} not in basis {list(C.basis)}")


def apply_table(table: Mapping[Tuple[str, str], Mapping[str, MultiPoly]], a: ConfElement, b: ConfElement,
                sigma: MultiPoly) -> ConfElement:
    """Sesqui-linear extension of ``table`` evaluated at ``sigma`` (free of ``D``).

    Shared by algebra products, module actions and pairings: ``table`` maps
    ``(left symbol, right symbol)`` to ``{target: g(D, l)}``.
    """
    out: Dict[str, MultiPoly] = {}
    left = [(s, f.substitute({"D": -sigma})) for s, f in a.items()]
    shift = D + sigma
    right = [(s, g.substitute({"D": shift})) for s, g in b.items()]
    cache: Dict[Tuple[str, str], List[Tuple[str, MultiPoly]]] = {}
    for sa, fa in left:
        for sb, gb in right:
            row = table.get((sa, sb))
            if not row:
                continue
            if (sa, sb) not in cache:
                cache[(sa, sb)] = [(c, h.substitute({"l": sigma})) for c, h in row.items()]
            coef = fa * gb
            for c, h in cache[(sa, sb)]:
                term = coef * h
                prev = out.get(c)
                out[c] = term if prev is None else prev + term
    return ConfElement(out)


def product_at(C: ConfAlgebra, a: ConfElement, b: ConfElement, sigma: MultiPoly) -> ConfElement:
    """``a _sigma b`` for ``sigma`` free of ``D``; coefficients may carry other parameters."""
    return apply_table(C.table, a, b, sigma)


def braced_at(C: ConfAlgebra, a: ConfElement, b: ConfElement, sigma: MultiPoly) -> ConfElement:
    """``{a _sigma b} = a _(-D-sigma) b`` with ``D`` acting on the product."""
    raw = product_at(C, a, b, T)
    return raw.substitute({"t": -D - sigma})


def lambda_product(C: ConfAlgebra, a, b) -> LambdaElem:
    a, b = element(a), element(b)
    _check_basis(C, a)
    _check_basis(C, b)
    return LambdaElem(product_at(C, a, b, LAM).coords)


def braced_lambda(C: ConfAlgebra, a, b) -> LambdaElem:
    a, b = element(a), element(b)
    _check_basis(C, a)
    _check_basis(C, b)
    return LambdaElem(braced_at(C, a, b, LAM).coords)


def n_product(C: ConfAlgebra, a, b, n: int) -> ConfElement:
    if n < 0:
        raise ValueError("n-products need n >= 0")
    return lambda_product(C, a, b).n_coefficient(n)


def braced_product(C: ConfAlgebra, a, b, n: int) -> ConfElement:
    if n < 0:
        raise ValueError("braced products need n >= 0")
    return braced_lambda(C, a, b).n_coefficient(n)


def locality(C: ConfAlgebra, a, b) -> int:
    lp = lambda_product(C, a, b)
    return 0 if lp.is_zero() else lp.lambda_degree() + 1


# -- checks -----------------------------------------------------------------------------


@dataclass
class CheckReport:
    """Outcome of a checker: ``passed`` plus the witnesses that made it fail."""

    check: str
    passed: bool
    witnesses: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"check": self.check, "passed": self.passed, "witnesses": self.witnesses, "notes": self.notes}

    def __str__(self):
        head = f"{self.check}: {'pass' if self.passed else 'FAIL'}"
        lines = [head] + [f"  witness: {w}" for w in self.witnesses] + [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _assoc_residual(C: ConfAlgebra, triple) -> ConfElement:
    a, b, c = (ConfElement.of(s) for s in triple)
    lhs = product_at(C, a, product_at(C, b, c, MU), LAM)
    rhs = product_at(C, product_at(C, a, b, LAM), c, LAM + MU)
    return lhs - rhs


def _jacobi_residual(C: ConfAlgebra, triple) -> ConfElement:
    a, b, c = (ConfElement.of(s) for s in triple)
    lhs = product_at(C, a, product_at(C, b, c, MU), LAM) - product_at(C, b, product_at(C, a, c, LAM), MU)
    rhs = product_at(C, product_at(C, a, b, LAM), c, LAM + MU)
    return lhs - rhs


def _skew_residual(C: ConfAlgebra, pair) -> ConfElement:
    a, b = (ConfElement.of(s) for s in pair)
    return product_at(C, a, b, LAM) + braced_at(C, b, a, LAM)


def _collect(C, fn, tuples, label, check) -> CheckReport:
    residuals = _parallel.ordered_map(functools.partial(fn, C), tuples)
    witnesses = [{label: list(t), "residual": str(r)} for t, r in zip(tuples, residuals) if r]
    return CheckReport(check, not witnesses, witnesses)


def check_associativity(C: ConfAlgebra) -> CheckReport:
    """Verify ``a_l (b_m c) = (a_l b)_(l+m) c`` on all basis triples, in Q[D, l, m]."""
    if C.kind != "associative":
        raise PreconditionError(f"check_associativity needs an associative algebra, got kind {C.kind!r}")
    return _collect(C, _assoc_residual, list(iproduct(C.basis, repeat=3)), "triple", "associativity")


def check_lie(C: ConfAlgebra) -> CheckReport:
    """Skew-symmetry on basis pairs and the Jacobi identity on basis triples."""
    if C.kind != "lie":
        raise PreconditionError(f"check_lie needs a Lie algebra, got kind {C.kind!r}")
    skew = _collect(C, _skew_residual, list(iproduct(C.basis, repeat=2)), "pair", "skew-symmetry")
    jac = _collect(C, _jacobi_residual, list(iproduct(C.basis, repeat=3)), "triple", "jacobi")
    return CheckReport("lie", skew.passed and jac.passed,
                       [dict(w, identity="skew") for w in skew.witnesses]
                       + [dict(w, identity="jacobi") for w in jac.witnesses])


def check_axioms(C: ConfAlgebra) -> CheckReport:
    return check_associativity(C) if C.kind == "associative" else check_lie(C)


def _require_associative(C: ConfAlgebra, what: str):
    if C.kind != "associative":
        raise PreconditionError(f"{what} needs an associative algebra, got kind {C.kind!r}")
    rep = check_associativity(C)
    if not rep.passed:
        raise PreconditionError(f"{what}: input is not associative", witness=rep.witnesses[0])


# -- derived algebras ---------------------------------------------------------------------


def commutator_algebra(C: ConfAlgebra) -> ConfAlgebra:
    """``C^(-)`` with ``[a_l b] = a_l b - {b_l a}``."""
    _require_associative(C, "commutator_algebra")
    table = {}
    for a, b in iproduct(C.basis, repeat=2):
        val = lambda_product(C, a, b) - braced_lambda(C, b, a)
        if val:
            table[(a, b)] = val.coords
    return ConfAlgebra("lie", C.basis, table, name=f"{C.name}^(-)" if C.name else "")


def opposite_algebra(C: ConfAlgebra) -> ConfAlgebra:
    """``C^op`` with ``a _l^op b = {b _l a}``."""
    _require_associative(C, "opposite_algebra")
    table = {}
    for a, b in iproduct(C.basis, repeat=2):
        val = braced_lambda(C, b, a)
        if val:
            table[(a, b)] = val.coords
    name = C.name[:-3] if C.name.endswith("^op") else (f"{C.name}^op" if C.name else "")
    return ConfAlgebra("associative", C.basis, table, name=name)


# -- units ---------------------------------------------------------------------------------


def _unit_equations(C: ConfAlgebra, unknowns, side: str):
    """Linear conditions on the unknown coefficients; each row sums to a target."""
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    rhs: Dict[tuple, Fraction] = {}
    sides = ["left", "right"] if side == "two-sided" else [side]
    for sd in sides:
        for c in C.basis:
            key_base = (sd, c)
            rhs[key_base + (c, 0)] = Fraction(1)
            for idx, (b, k) in enumerate(unknowns):
                e = ConfElement.of(b, D ** k)
                if sd == "left":
                    val = n_product(C, e, c, 0)
                else:
                    val = braced_product(C, c, e, 0)
                for d, p in val.items():
                    for ex, coef in p.items():
                        key = key_base + (d, ex[0])
                        rows.setdefault(key, {})[idx] = coef
    keys = sorted(set(rows) | set(rhs), key=str)
    A = [[rows.get(k, {}).get(i, Fraction(0)) for i in range(len(unknowns))] for k in keys]
    b = [rhs.get(k, Fraction(0)) for k in keys]
    return A, b


def _combine(unknowns, coeffs) -> ConfElement:
    acc: Dict[str, MultiPoly] = {}
    for (b, k), c in zip(unknowns, coeffs):
        if c:
            acc[b] = acc.get(b, MultiPoly.const(0)) + D ** k * c
    return ConfElement(acc)


def find_unit(C: ConfAlgebra, side: str = "left", degree_bound: Optional[int] = None) -> Optional[ConfElement]:
    """Search ``e = sum f_b(D) b`` (``deg f_b <= degree_bound``) that is a unit on ``side``.

    The unit conditions are linear in the coefficients and solved exactly;
    the extra requirement ``N(e, e) <= 1`` is quadratic and is resolved over
    the affine solution space.  ``None`` means "none within the bound", not
    non-existence.
    """
    if side not in ("left", "right", "two-sided"):
        raise ValueError(f"side must be left, right or two-sided, got {side!r}")
    _require_associative(C, "find_unit")
    if not C.basis:
        return None
    if degree_bound is None:
        degree_bound = C.max_d_degree() + 2
    unknowns = [(b, k) for k in range(degree_bound + 1) for b in C.basis]
    A, rhs = _unit_equations(C, unknowns, side)
    sol = solve_affine(A, rhs, len(unknowns))
    if sol is None:
        return None
    particular, null = sol
    e0 = _combine(unknowns, particular)
    if locality(C, e0, e0) <= 1:
        return e0
    if not null:
        return None
    return _resolve_locality(C, unknowns, particular, null)


def _resolve_locality(C, unknowns, particular, null, max_params: int = 10):
    """Pick parameters ``s`` with ``N(e0 + sum s_i n_i, e0 + ...) <= 1`` via sympy."""
    import sympy

    if len(null) > max_params:
        return None
    vecs = [_combine(unknowns, particular)] + [_combine(unknowns, v) for v in null]
    syms = sympy.symbols(f"s1:{len(null) + 1}")
    weights = [sympy.Integer(1)] + list(syms)
    eqs: Dict[tuple, object] = {}
    for i, j in iproduct(range(len(vecs)), repeat=2):
        lp = lambda_product(C, vecs[i], vecs[j])
        for d, p in lp.items():
            for ex, coef in p.items():
                if ex[2] >= 1:
                    key = (d, ex)
                    eqs[key] = eqs.get(key, 0) + weights[i] * weights[j] * sympy.Rational(coef.numerator, coef.denominator)
    system = [sympy.expand(e) for e in eqs.values() if sympy.expand(e) != 0]
    if not system:
        return vecs[0]
    solutions = sympy.solve(system, syms, dict=True)
    for s in solutions:
        values = []
        ok = True
        for sym in syms:
            v = s.get(sym, sympy.Integer(0)).subs({x: 0 for x in syms})
            if not v.is_rational:
                ok = False
                break
            values.append(Fraction(int(v.p), int(v.q)))
        if not ok:
            continue
        coeffs = [p + sum(val * n[i] for val, n in zip(values, null)) for i, p in enumerate(particular)]
        e = _combine(unknowns, coeffs)
        if locality(C, e, e) <= 1:
            return e
    return None


def is_unit(C: ConfAlgebra, e, side: str = "left") -> bool:
    e = element(e, C.basis)
    if locality(C, e, e) > 1:
        return False
    for c in C.basis:
        if side in ("left", "two-sided") and n_product(C, e, c, 0) != ConfElement.of(c):
            return False
        if side in ("right", "two-sided") and braced_product(C, c, e, 0) != ConfElement.of(c):
            return False
    return True


# -- derived series --------------------------------------------------------------------------


def _span(C: ConfAlgebra, elems: Iterable[ConfElement]) -> SubmoduleBasis:
    return SubmoduleBasis.span([e.to_vector(C.basis) for e in elems], len(C.basis))


def _gens(C: ConfAlgebra, S: SubmoduleBasis) -> List[ConfElement]:
    return [ConfElement.from_vector(C.basis, g) for g in S.generators]


def all_products(C: ConfAlgebra, a: ConfElement, b: ConfElement) -> List[ConfElement]:
    lp = lambda_product(C, a, b)
    if lp.is_zero():
        return []
    return [lp.n_coefficient(n) for n in range(lp.lambda_degree() + 1)]


def derived_series(C: ConfAlgebra) -> Tuple[List[SubmoduleBasis], bool]:
    """``L = L^1 > L^2 > ...`` with ``L^(k+1)`` spanned by all n-products of ``L^k``."""
    if C.kind != "lie":
        raise PreconditionError(f"derived_series needs a Lie algebra, got kind {C.kind!r}")
    current = SubmoduleBasis.full(len(C.basis))
    series = [current]
    while not current.is_zero():
        gens = _gens(C, current)
        prods = [p for g, h in iproduct(gens, repeat=2) for p in all_products(C, g, h)]
        nxt = _span(C, prods)
        if nxt == current:
            return series, False
        series.append(nxt)
        current = nxt
    return series, True


# -- growth -------------------------------------------------------------------------------------


class TableAmbient:
    """Adapter exposing a finite table algebra to :func:`growth_profile`."""

    def __init__(self, C: ConfAlgebra):
        self.C = C

    def coerce(self, g) -> ConfElement:
        return element(g, self.C.basis)

    def products(self, u: ConfElement, v: ConfElement) -> List[ConfElement]:
        return all_products(self.C, u, v)

    def coords(self, u: ConfElement) -> Dict[object, MultiPoly]:
        return dict(u.items())

    def from_coords(self, coords: Mapping[object, MultiPoly]) -> ConfElement:
        return ConfElement(coords)


def _span_in(ambient, elems) -> Tuple[int, list]:
    """H-rank of the span plus a reduced generating list of elements."""
    coords = [ambient.coords(e) for e in elems]
    keys = sorted({k for c in coords for k in c}, key=repr)
    if not keys:
        return 0, []
    S = SubmoduleBasis.span([[c.get(k, 0) for k in keys] for c in coords], len(keys))
    gens = [ambient.from_coords(dict(zip(keys, g))) for g in S.generators]
    return S.module_rank, gens


def growth_profile(ambient, generators: Sequence, n_max: int) -> List[int]:
    """``[rank V(1), ..., rank V(n_max)]`` for the spans of monomials of length <= n.

    ``V(n+1) = V(n) + sum_{i+j=n+1} span{u _k v : u in V(i), v in V(j), k >= 0}``,
    which covers every bracketing by induction on the length.
    """
    if isinstance(ambient, ConfAlgebra):
        ambient = TableAmbient(ambient)
    gens = [ambient.coerce(g) for g in generators]
    rank, basis = _span_in(ambient, gens)
    levels = [basis]
    ranks = [rank]
    for n in range(2, n_max + 1):
        new = list(levels[-1])
        for i in range(1, n):
            j = n - i
            for u, v in iproduct(levels[i - 1], levels[j - 1]):
                new.extend(ambient.products(u, v))
        rank, basis = _span_in(ambient, new)
        levels.append(basis)
        ranks.append(rank)
    return ranks
