"""Concrete conformal algebras: currents, Virasoro, Cend_n and friends.

Finite algebras come back as :class:`~confalg.confcore.ConfAlgebra` tables.
``Cend_n`` is infinite over ``H`` and is handled through its elements,
``n x n`` matrices over ``Q[D, x]``, with product and action oracles:

    f(D,x)A  _l  g(D,x)B  =  f(-l, x) g(D+l, x+l) AB
    f(D,x)A  _l  h(D)u    =  f(-l, D) h(D+l) Au

``D`` acts on ``Cend_n`` by multiplication.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .confcore import ConfAlgebra, ConfElement, check_axioms
from .errors import DimensionError, FormatError, MembershipError, PreconditionError
from .exactmath import LAM, ONE, T, D, X, MultiPoly, divmod_in
from .hlinalg import PolyMatrix

# -- ordinary algebras ---------------------------------------------------------


@dataclass(frozen=True)
class OrdinaryAlgebra:
    """Finite-dimensional algebra over Q given by structure constants.

    ``constants[(i, j)]`` maps ``k`` to ``c_ij^k`` so that ``e_i e_j = sum_k c_ij^k e_k``.
    ``derivation[j]`` lists the coordinates of ``d(e_j)``.
    """

    names: Tuple[str, ...]
    constants: Mapping[Tuple[int, int], Mapping[int, Fraction]]
    kind: str = "associative"
    derivation: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    name: str = ""

    def __post_init__(self):
        n = len(self.names)
        if self.kind not in ("associative", "lie"):
            raise FormatError(f"ordinary algebra kind must be associative or lie, got {self.kind!r}")
        clean = {}
        for (i, j), row in self.constants.items():
            for k in (i, j, *row):
                if not 0 <= k < n:
                    raise DimensionError(f"structure constant index {k} outside 0..{n - 1}")
            row = {k: Fraction(c) for k, c in row.items() if c}
            if row:
                clean[(i, j)] = row
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "constants", clean)
        if self.derivation is not None:
            d = tuple(tuple(Fraction(c) for c in col) for col in self.derivation)
            if len(d) != n or any(len(col) != n for col in d):
                raise DimensionError(f"derivation must be {n}x{n}")
            object.__setattr__(self, "derivation", d)

    @property
    def dim(self) -> int:
        return len(self.names)

    def basis_vector(self, i: int) -> List[Fraction]:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def mul(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * self.dim
        for (i, j), row in self.constants.items():
            c = u[i] * v[j]
            if c:
                for k, s in row.items():
                    out[k] += c * s
        return out

    def apply_derivation(self, v: Sequence[Fraction], times: int = 1) -> List[Fraction]:
        out = list(v)
        for _ in range(times):
            nxt = [Fraction(0)] * self.dim
            if self.derivation is not None:
                for j, c in enumerate(out):
                    if c:
                        for k, s in enumerate(self.derivation[j]):
                            nxt[k] += c * s
            out = nxt
        return out

    def identity_witness(self):
        """First basis tuple violating associativity or skew/Jacobi, else ``None``."""
        e = self.basis_vector
        sub = lambda u, v: [a - b for a, b in zip(u, v)]
        add = lambda u, v: [a + b for a, b in zip(u, v)]
        n = self.dim
        if self.kind == "associative":
            for i, j, k in iproduct(range(n), repeat=3):
                if self.mul(self.mul(e(i), e(j)), e(k)) != self.mul(e(i), self.mul(e(j), e(k))):
                    return ("associativity", self.names[i], self.names[j], self.names[k])
            return None
        for i, j in iproduct(range(n), repeat=2):
            if any(add(self.mul(e(i), e(j)), self.mul(e(j), e(i)))):
                return ("skew", self.names[i], self.names[j])
        for i, j, k in iproduct(range(n), repeat=3):
            lhs = self.mul(e(i), self.mul(e(j), e(k)))
            rhs = add(self.mul(self.mul(e(i), e(j)), e(k)), self.mul(e(j), self.mul(e(i), e(k))))
            if any(sub(lhs, rhs)):
                return ("jacobi", self.names[i], self.names[j], self.names[k])
        return None

    def derivation_witness(self):
        """First basis pair where the Leibniz rule fails, else ``None``."""
        if self.derivation is None:
            return None
        e = self.basis_vector
        for i, j in iproduct(range(self.dim), repeat=2):
            lhs = self.apply_derivation(self.mul(e(i), e(j)))
            rhs = [a + b for a, b in zip(self.mul(self.apply_derivation(e(i)), e(j)),
                                         self.mul(e(i), self.apply_derivation(e(j))))]
            if lhs != rhs:
                return (self.names[i], self.names[j])
        return None

    def nilpotency_index(self) -> Optional[int]:
        """Least ``k`` with ``d^k = 0`` (at most ``dim``), or ``None`` if ``d`` is not nilpotent."""
        if self.derivation is None:
            return 1
        for k in range(1, self.dim + 1):
            if all(not any(self.apply_derivation(self.basis_vector(j), k)) for j in range(self.dim)):
                return k
        return None


def ordinary_algebra(names, table, kind="associative", derivation=None, name=""):
    idx = {s: i for i, s in enumerate(names)}
    consts = {}
    for (a, b), row in table.items():
        consts[(idx[a], idx[b])] = {idx[c]: Fraction(v) for c, v in row.items()}
    return OrdinaryAlgebra(tuple(names), consts, kind, derivation, name)


def field_q() -> OrdinaryAlgebra:
    return ordinary_algebra(["e"], {("e", "e"): {"e": 1}}, name="Q")


def dual_numbers() -> OrdinaryAlgebra:
    """``Q[eps]/(eps^2)`` on the basis ``1, eps`` (symbols ``u``, ``eps``)."""
    return ordinary_algebra(["u", "eps"], {("u", "u"): {"u": 1}, ("u", "eps"): {"eps": 1}, ("eps", "u"): {"eps": 1}},
               name="Q[eps]/(eps^2)")


def matrix_units(n: int) -> OrdinaryAlgebra:
    """``M_n(Q)`` on the matrix units ``E11, E12, ...``."""
    names = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    table = {}
    for i, j, k in iproduct(range(n), repeat=3):
        table[(f"E{i + 1}{j + 1}", f"E{j + 1}{k + 1}")] = {f"E{i + 1}{k + 1}": 1}
    return ordinary_algebra(names, table, name=f"M{n}(Q)")


def sl2() -> OrdinaryAlgebra:
    t = {("e", "f"): {"h": 1}, ("f", "e"): {"h": -1},
         ("h", "e"): {"e": 2}, ("e", "h"): {"e": -2},
         ("h", "f"): {"f": -2}, ("f", "h"): {"f": 2}}
    return ordinary_algebra(["e", "h", "f"], t, kind="lie", name="sl2")


def solvable2() -> OrdinaryAlgebra:
    """Two-dimensional non-abelian Lie algebra ``[a, b] = b``."""
    return ordinary_algebra(["a", "b"], {("a", "b"): {"b": 1}, ("b", "a"): {"b": -1}}, kind="lie", name="solv2")


def abelian(names: Sequence[str]) -> OrdinaryAlgebra:
    return ordinary_algebra(list(names), {}, kind="lie", name="abelian")


def truncated_polynomials(k: int, derivation: Optional[str] = None) -> OrdinaryAlgebra:
    """``Q[x]/(x^k)`` on ``x0 = 1, x1, ..., x(k-1)``.

    ``derivation="d/dx"`` attaches ``x^i -> i x^(i-1)``; ``"x^2 d/dx"`` attaches
    ``x^i -> i x^(i+1)``, which (unlike ``d/dx``) respects the relation ``x^k = 0``.
    """
    names = [f"x{i}" for i in range(k)]
    table = {(names[i], names[j]): {names[i + j]: 1} for i in range(k) for j in range(k) if i + j < k}
    der = None
    if derivation is not None:
        cols = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            if derivation == "d/dx" and i >= 1:
                cols[i][i - 1] = Fraction(i)
            elif derivation == "x^2 d/dx" and 1 <= i and i + 1 < k:
                cols[i][i + 1] = Fraction(i)
            elif derivation not in ("d/dx", "x^2 d/dx"):
                raise FormatError(f"unknown derivation {derivation!r}")
        der = tuple(tuple(c) for c in cols)
    return ordinary_algebra(names, table, derivation=der, name=f"Q[x]/(x^{k})")


def with_derivation(A: OrdinaryAlgebra, derivation) -> OrdinaryAlgebra:
    return OrdinaryAlgebra(A.names, A.constants, A.kind, derivation, A.name)


def inner_derivation(A: OrdinaryAlgebra, element: Sequence) -> OrdinaryAlgebra:
    """Attach ``ad(z) = [z, -]`` (for associative ``A``: ``zb - bz``)."""
    z = [Fraction(c) for c in element]
    cols = []
    for j in range(A.dim):
        b = A.basis_vector(j)
        if A.kind == "associative":
            cols.append(tuple(p - q for p, q in zip(A.mul(z, b), A.mul(b, z))))
        else:
            cols.append(tuple(A.mul(z, b)))
    return with_derivation(A, tuple(cols))


def ordinary_commutator(A: OrdinaryAlgebra) -> OrdinaryAlgebra:
    """``A^(-)`` with ``[a, b] = ab - ba``."""
    consts = {}
    for i, j in iproduct(range(A.dim), repeat=2):
        row = dict(A.constants.get((i, j), {}))
        for k, c in A.constants.get((j, i), {}).items():
            row[k] = row.get(k, 0) - c
        consts[(i, j)] = row
    return OrdinaryAlgebra(A.names, consts, "lie", None, f"{A.name}^(-)")


# -- finite conformal algebras ---------------------------------------------------------


def current_algebra(A: OrdinaryAlgebra, name: str = "") -> ConfAlgebra:
    """``Curr A``: ``a _l b = ab`` on the basis of ``A``, constant in ``l``."""
    w = A.identity_witness()
    if w is not None:
        raise PreconditionError(f"ordinary {A.kind} identity fails for {A.name or 'input'}", witness=w)
    table = {}
    for (i, j), row in A.constants.items():
        table[(A.names[i], A.names[j])] = {A.names[k]: MultiPoly.const(c) for k, c in row.items()}
    return ConfAlgebra(A.kind, A.names, table, name=name or f"Curr({A.name})")


def differential_algebra(A: OrdinaryAlgebra, strict: bool = True, name: str = "") -> ConfAlgebra:
    """``H (x) A`` with ``a _l b = a e^(l d)(b)``, i.e. ``a _n b = a d^n(b)``.

    ``d`` must be nilpotent so the exponential is a polynomial.  With
    ``strict`` the Leibniz rule is enforced as well; without it the table is
    still produced (it is associative only when ``d`` is a derivation).
    """
    if A.kind != "associative":
        raise PreconditionError("differential algebras need an associative base algebra")
    idx = A.nilpotency_index()
    if idx is None:
        raise PreconditionError("derivation is not nilpotent", witness={"power": A.dim})
    if strict:
        w = A.identity_witness()
        if w is not None:
            raise PreconditionError("base algebra is not associative", witness=w)
        w = A.derivation_witness()
        if w is not None:
            raise PreconditionError(f"d is not a derivation of {A.name or 'the base algebra'}",
                                    witness={"pair": list(w)})
    table = {}
    for i, j in iproduct(range(A.dim), repeat=2):
        ei = A.basis_vector(i)
        acc: Dict[str, MultiPoly] = {}
        for n in range(idx):
            coords = A.mul(ei, A.apply_derivation(A.basis_vector(j), n))
            for k, c in enumerate(coords):
                if c:
                    acc[A.names[k]] = acc.get(A.names[k], MultiPoly.const(0)) + LAM ** n * (c / factorial(n))
        if acc:
            table[(A.names[i], A.names[j])] = acc
    return ConfAlgebra("associative", A.names, table, name=name or f"Diff({A.name})")


def virasoro() -> ConfAlgebra:
    return ConfAlgebra("lie", ("x",), {("x", "x"): {"x": D + 2 * LAM}}, name="Vir")


def solv_xy() -> ConfAlgebra:
    """Rank-two solvable algebra ``[x_l y] = l y``, ``[y_l x] = (D + l) y``, ``[x_l x] = [y_l y] = 0``."""
    return ConfAlgebra("lie", ("x", "y"), {("x", "y"): {"y": LAM}, ("y", "x"): {"y": D + LAM}}, name="solv_xy")


def abelian_conformal(names: Sequence[str]) -> ConfAlgebra:
    return ConfAlgebra("lie", tuple(names), {}, name="abelian")


def split_null_truncation() -> ConfAlgebra:
    """Closed finite piece ``H 1 + H v`` of ``Cend_1 + Hv`` (split null extension).

    ``1 _l 1 = 1``, ``1 _l v = v``, and ``v`` annihilates everything from the left.
    """
    return ConfAlgebra("associative", ("one", "v"),
                       {("one", "one"): {"one": ONE}, ("one", "v"): {"v": ONE}}, name="split_null")


# -- Cend_n ------------------------------------------------------------------------------


class MatrixConfElem:
    """Element of ``Cend_n``: an ``n x n`` matrix over ``Q[D, x]``.

    Products carry ``l`` (or other parameters) in their entries; the
    invariant "entries in ``D, x`` only" is checked by :meth:`is_plain`.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[object]]):
        rows = [[MultiPoly.coerce(p) for p in r] for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("Cend elements are square matrices")
        self.rows: Tuple[Tuple[MultiPoly, ...], ...] = tuple(tuple(r) for r in rows)

    @classmethod
    def scalar(cls, n: int, f: object = 1) -> "MatrixConfElem":
        f = MultiPoly.coerce(f)
        return cls([[f if i == j else MultiPoly.const(0) for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int, f: object = 1) -> "MatrixConfElem":
        rows = [[MultiPoly.const(0)] * n for _ in range(n)]
        rows[i][j] = MultiPoly.coerce(f)
        return cls(rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> MultiPoly:
        return self.rows[ij[0]][ij[1]]

    def is_plain(self) -> bool:
        return all(p.involves_only(["D", "x"]) for r in self.rows for p in r)

    def is_zero(self) -> bool:
        return all(p.is_zero() for r in self.rows for p in r)

    def _check(self, other):
        if not isinstance(other, MatrixConfElem):
            return NotImplemented
        if other.size != self.size:
            raise DimensionError(f"size mismatch {self.size} vs {other.size}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return MatrixConfElem([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        other = self._check(other)
        return MatrixConfElem([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return MatrixConfElem([[-a for a in r] for r in self.rows])

    def __rmul__(self, scalar):
        s = MultiPoly.coerce(scalar)
        return MatrixConfElem([[s * a for a in r] for r in self.rows])

    def matmul(self, other: "MatrixConfElem") -> "MatrixConfElem":
        """Plain matrix product over ``Q[D, x]`` (no conformal twist)."""
        other = self._check(other)
        n = self.size
        return MatrixConfElem([[sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), MultiPoly.const(0))
                                for j in range(n)] for i in range(n)])

    def map(self, fn: Callable[[MultiPoly], MultiPoly]) -> "MatrixConfElem":
        return MatrixConfElem([[fn(a) for a in r] for r in self.rows])

    def substitute(self, assignment) -> "MatrixConfElem":
        return self.map(lambda p: p.substitute(assignment))

    def coefficient_in(self, var: str, n: int) -> "MatrixConfElem":
        def pick(p):
            cs = p.coefficients_in(var)
            return cs[n] if n < len(cs) else MultiPoly.const(0)
        return self.map(pick)

    def degree(self, var: str) -> int:
        return max(p.degree(var) for r in self.rows for p in r)

    def __eq__(self, other):
        if not isinstance(other, MatrixConfElem):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __str__(self):
        if self.size == 1:
            return str(self.rows[0][0])
        return "[" + "; ".join(", ".join(str(p) for p in r) for r in self.rows) + "]"

    def __repr__(self):
        return f"MatrixConfElem({str(self)!r})"


def _lift(a) -> MatrixConfElem:
    if isinstance(a, MatrixConfElem):
        return a
    return MatrixConfElem([[a]])


def cend_product(a, b, sigma: object = LAM) -> MatrixConfElem:
    """``a _sigma b`` in ``Cend_n``: entries ``sum_k a_ik(-sigma, x) b_kj(D+sigma, x+sigma)``."""
    a, b = _lift(a), _lift(b)
    if a.size != b.size:
        raise DimensionError(f"size mismatch {a.size} vs {b.size}")
    sigma = MultiPoly.coerce(sigma)
    left = a.substitute({"D": -sigma})
    right = b.substitute({"D": D + sigma, "x": X + sigma})
    return left.matmul(right)


def cend_n_product(a, b, n: int) -> MatrixConfElem:
    return cend_product(a, b).coefficient_in("l", n).map(lambda p: p * factorial(n))


def cend_braced(a, b, sigma: object = LAM) -> MatrixConfElem:
    """``{a _sigma b} = a _(-D-sigma) b``; ``D`` acts by multiplication on ``Cend_n``."""
    sigma = MultiPoly.coerce(sigma)
    return cend_product(a, b, T).substitute({"t": -D - sigma})


def cend_braced_n(a, b, n: int) -> MatrixConfElem:
    return cend_braced(a, b).coefficient_in("l", n).map(lambda p: p * factorial(n))


def cend_act(a, v: Sequence[object], sigma: object = LAM) -> List[MultiPoly]:
    """Action on ``H^n``: ``(a _sigma v)_i = sum_j a_ij(-sigma, D) v_j(D + sigma)``."""
    a = _lift(a)
    v = [MultiPoly.coerce(p) for p in v]
    if len(v) != a.size:
        raise DimensionError(f"vector of length {len(v)} for Cend_{a.size}")
    sigma = MultiPoly.coerce(sigma)
    left = a.substitute({"D": -sigma, "x": D})
    right = [p.substitute({"D": D + sigma}) for p in v]
    return [sum((left.rows[i][j] * right[j] for j in range(a.size)), MultiPoly.const(0)) for i in range(a.size)]


def cend_act_n(a, v, n: int) -> List[MultiPoly]:
    out = []
    for p in cend_act(a, v):
        cs = p.coefficients_in("l")
        out.append(cs[n] * factorial(n) if n < len(cs) else MultiPoly.const(0))
    return out


def weyl_element(f: object) -> MatrixConfElem:
    """Element ``f(D, x)`` of the Weyl conformal algebra ``Cend_1``."""
    return MatrixConfElem([[f]])


# -- right presentation and the transpose tau ------------------------------------------------


def tau_transpose(a: MatrixConfElem) -> MatrixConfElem:
    """``tau(a)_l = a_(-D-l)`` written as a right conformal endomorphism.

    A right endomorphism ``r`` of ``H^n`` is stored as a matrix ``F(D, x)``
    with ``r_l(h(D)u) = h(-l) F(-l, D) u``.  Under this encoding ``tau``
    sends ``f(D, x)A`` to ``f(x - D, x)A`` and is its own inverse.
    """
    return _lift(a).substitute({"D": X - D})


def right_product(r, s, sigma: object = LAM) -> MatrixConfElem:
    """``r _sigma s`` in ``Cend^r``: ``(r_s s)_m = s_(s+m) r_m`` in encoded form."""
    r, s = _lift(r), _lift(s)
    if r.size != s.size:
        raise DimensionError(f"size mismatch {r.size} vs {s.size}")
    sigma = MultiPoly.coerce(sigma)
    return s.substitute({"D": D - sigma}).matmul(r.substitute({"x": D - sigma}))


def right_braced(r, s, sigma: object = LAM) -> MatrixConfElem:
    """``{r _sigma s}``; ``D`` acts on encoded right endomorphisms as multiplication by ``x - D``."""
    sigma = MultiPoly.coerce(sigma)
    return right_product(r, s, T).substitute({"t": D - X - sigma})


def right_braced_n(r, s, n: int) -> MatrixConfElem:
    return right_braced(r, s).coefficient_in("l", n).map(lambda p: p * factorial(n))


def right_act(r, v: Sequence[object], sigma: object = LAM) -> List[MultiPoly]:
    """``r_sigma`` applied to ``sum h_j(D) e_j``."""
    r = _lift(r)
    sigma = MultiPoly.coerce(sigma)
    F = r.substitute({"D": -sigma, "x": D})
    h = [MultiPoly.coerce(p).substitute({"D": -sigma}) for p in v]
    return [sum((F.rows[i][j] * h[j] for j in range(r.size)), MultiPoly.const(0)) for i in range(r.size)]


def random_cend(n: int, degree: int, rng: random.Random, coeff_range: int = 3) -> MatrixConfElem:
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            terms = {}
            for a in range(degree + 1):
                for b in range(degree + 1 - a):
                    c = rng.randint(-coeff_range, coeff_range)
                    if c:
                        terms[(a, b, 0, 0, 0)] = c
            row.append(MultiPoly(terms))
        rows.append(row)
    return MatrixConfElem(rows)


# -- one-sided ideals of Cend_n ----------------------------------------------------------------


def _as_matrix(P, n: Optional[int] = None) -> MatrixConfElem:
    if isinstance(P, MatrixConfElem):
        M = P
    elif isinstance(P, (MultiPoly, int, Fraction, str)):
        M = MatrixConfElem.scalar(n or 1, MultiPoly.coerce(P))
    else:
        M = MatrixConfElem(P)
    return M


def cend_ideal_element(side: str, P, A) -> MatrixConfElem:
    """``P(x) A`` (right ideal ``Cend_{P,n}``) or ``A P(x - D)`` (left ideal ``Cend_{n,P}``)."""
    A = _lift(A)
    P = _as_matrix(P, A.size)
    if P.size != A.size:
        raise DimensionError(f"P has size {P.size}, A has size {A.size}")
    if not P.is_plain() or P.degree("D") > 0:
        raise FormatError("ideal generator P must be a matrix over Q[x]")
    if side == "right":
        return P.matmul(A)
    if side == "left":
        return A.matmul(P.substitute({"x": X - D}))
    raise ValueError(f"side must be left or right, got {side!r}")


def _adjugate(P: MatrixConfElem) -> Tuple[MatrixConfElem, MultiPoly]:
    n = P.size
    rows = [[P.rows[i][j].substitute({}) for j in range(n)] for i in range(n)]
    det = PolyMatrix(rows, var="x").det() if n else ONE

    def minor(i, j):
        sub = [[rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
        return PolyMatrix(sub, var="x").det() if sub else ONE

    adj = [[minor(j, i) * (-1) ** (i + j) for j in range(n)] for i in range(n)]
    return MatrixConfElem(adj), det


def in_cend_ideal(side: str, P, X_: MatrixConfElem) -> bool:
    """Membership in ``Cend_{P,n}`` / ``Cend_{n,P}`` for ``P`` with nonzero determinant."""
    X_ = _lift(X_)
    P = _as_matrix(P, X_.size)
    adj, det = _adjugate(P)
    if det.is_zero():
        raise PreconditionError("ideal membership is implemented for det P != 0 only")
    if side == "right":
        Y = adj.matmul(X_)
    elif side == "left":
        Y = X_.substitute({"x": X + D}).matmul(adj)
    else:
        raise ValueError(f"side must be left or right, got {side!r}")
    return all(divmod_in(p, det, "x")[1].is_zero() for r in Y.rows for p in r)


# -- split null extensions ------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitNullElem:
    """``a + u`` with ``a`` in ``Cend_n`` and ``u`` in ``H^n``."""

    alg: MatrixConfElem
    mod: Tuple[MultiPoly, ...]

    def __post_init__(self):
        mod = tuple(MultiPoly.coerce(p) for p in self.mod)
        if len(mod) != self.alg.size:
            raise DimensionError(f"module part of length {len(mod)} for Cend_{self.alg.size}")
        object.__setattr__(self, "mod", mod)

    def __str__(self):
        return f"({self.alg}, ({', '.join(str(p) for p in self.mod)}))"


def c0_member(a: MatrixConfElem) -> bool:
    """Shape predicate for ``C_0``: ``[[f(D), g(D, x)], [0, f(D)]]``."""
    if a.size != 2:
        return False
    f, g = a.rows[0][0], a.rows[0][1]
    return a.rows[1][0].is_zero() and a.rows[1][1] == f and f.involves_only(["D"])


def split_null_product(u: SplitNullElem, w: SplitNullElem, sigma: object = LAM,
                       subalgebra: Optional[Callable[[MatrixConfElem], bool]] = None) -> SplitNullElem:
    """``(a + u) _sigma (b + w) = a _sigma b + a_sigma(w)``."""
    if u.alg.size != w.alg.size:
        raise DimensionError(f"size mismatch {u.alg.size} vs {w.alg.size}")
    if subalgebra is not None:
        for part in (u.alg, w.alg):
            if not subalgebra(part):
                raise MembershipError("algebra part outside the declared subalgebra", witness=str(part))
    return SplitNullElem(cend_product(u.alg, w.alg, sigma), tuple(cend_act(u.alg, w.mod, sigma)))


def example_c0_generator(k: int) -> MatrixConfElem:
    """``a_k = [[0, x^k / k!], [0, 0]]`` in ``C_0``."""
    return MatrixConfElem.unit(2, 0, 1, X ** k * Fraction(1, factorial(k)))


# -- growth ambient ----------------------------------------------------------------------------------


class CendAmbient:
    """``Cend_n`` as an ambient for :func:`confcore.growth_profile`, H-basis ``x^k e_ij``."""

    def __init__(self, n: int = 1):
        self.n = n

    def coerce(self, g) -> MatrixConfElem:
        if isinstance(g, str):
            g = MultiPoly.coerce(g)
        g = _lift(g)
        if g.size != self.n:
            raise DimensionError(f"generator of size {g.size} in Cend_{self.n}")
        return g

    def products(self, u: MatrixConfElem, v: MatrixConfElem) -> List[MatrixConfElem]:
        lp = cend_product(u, v)
        d = lp.degree("l")
        return [lp.coefficient_in("l", k) for k in range(d + 1)]

    def coords(self, u: MatrixConfElem) -> Dict[tuple, MultiPoly]:
        out = {}
        for i, j in iproduct(range(self.n), repeat=2):
            for k, c in enumerate(u.rows[i][j].coefficients_in("x")):
                if c:
                    out[(i, j, k)] = c
        return out

    def from_coords(self, coords) -> MatrixConfElem:
        rows = [[MultiPoly.const(0)] * self.n for _ in range(self.n)]
        for (i, j, k), c in coords.items():
            rows[i][j] = rows[i][j] + MultiPoly.coerce(c) * X ** k
        return MatrixConfElem(rows)


# -- registry ------------------------------------------------------------------------------------------


def builtin_algebras() -> Dict[str, Callable[[], ConfAlgebra]]:
    """Named finite algebras known to the command line."""
    return {
        "virasoro": virasoro,
        "curr_q": lambda: current_algebra(field_q(), "curr_q"),
        "curr_dual": lambda: current_algebra(dual_numbers(), "curr_dual"),
        "curr_m2": lambda: current_algebra(matrix_units(2), "curr_m2"),
        "curr_gl2": lambda: current_algebra(ordinary_commutator(matrix_units(2)), "curr_gl2"),
        "curr_sl2": lambda: current_algebra(sl2(), "curr_sl2"),
        "curr_solv2": lambda: current_algebra(solvable2(), "curr_solv2"),
        "solv_xy": solv_xy,
        "split_null": split_null_truncation,
        "diff_x3": lambda: differential_algebra(truncated_polynomials(3, "d/dx"), strict=False, name="diff_x3"),
        "diff_x3_x2d": lambda: differential_algebra(truncated_polynomials(3, "x^2 d/dx"), name="diff_x3_x2d"),
    }
