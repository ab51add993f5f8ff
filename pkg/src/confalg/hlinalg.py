"""Linear algebra over the principal ideal domains Q[D] and Q[l].

Matrices carry univariate :class:`MultiPoly` entries in one designated
variable.  Internally every algorithm works on dense coefficient lists
(low degree first) and converts back at the boundary.

Pivots are chosen by least degree, ties broken by row (then column) index,
so all normal forms and certificates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .errors import DimensionError, FormatError
from .exactmath import NVARS, MultiPoly, var_index

UPoly = List[object]


# -- dense univariate kernels -------------------------------------------------


def _trim(a: UPoly) -> UPoly:
    while a and not a[-1]:
        a.pop()
    return a


def _deg(a: UPoly) -> int:
    return len(a) - 1


def _add(a: UPoly, b: UPoly) -> UPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] = out[i] + y
    return _trim(out)


def _neg(a: UPoly) -> UPoly:
    return [-c for c in a]


def _sub(a: UPoly, b: UPoly) -> UPoly:
    return _add(a, _neg(b))


def _mul(a: UPoly, b: UPoly) -> UPoly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def _scale(a: UPoly, c) -> UPoly:
    if not c:
        return []
    return [x * c for x in a]


def _divmod(a: UPoly, b: UPoly) -> Tuple[UPoly, UPoly]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    q: UPoly = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = Fraction(1) / b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        f = r[-1] * inv
        q[k] = f
        for i, y in enumerate(b):
            r[k + i] = r[k + i] - f * y
        r.pop()
        _trim(r)
    return _trim(q), r


def _to_u(p: MultiPoly, var: str) -> UPoly:
    if not p.involves_only([var]):
        raise FormatError(f"matrix entry {p} is not univariate in {var}")
    i = var_index(var)
    if p.is_zero():
        return []
    out: UPoly = [Fraction(0)] * (p.degree(var) + 1)
    for e, c in p.items():
        out[e[i]] = c
    return out


def _from_u(a: UPoly, var: str) -> MultiPoly:
    i = var_index(var)
    terms = {}
    for k, c in enumerate(a):
        if c:
            e = [0] * NVARS
            e[i] = k
            terms[tuple(e)] = c
    return MultiPoly(terms)


def _row_axpy(rows, dst: int, src: int, q: UPoly):
    """rows[dst] -= q * rows[src]"""
    if not q:
        return
    rows[dst] = [_sub(x, _mul(q, y)) for x, y in zip(rows[dst], rows[src])]


def _identity(n: int) -> List[List[UPoly]]:
    return [[[Fraction(1)] if i == j else [] for j in range(n)] for i in range(n)]


# -- matrices -----------------------------------------------------------------


class PolyMatrix:
    """Dense matrix of univariate polynomials in ``var`` (``D`` or ``l``)."""

    __slots__ = ("rows", "cols", "var", "_u")

    def __init__(self, entries: Sequence[Sequence[object]], var: str = "D", cols: int | None = None):
        self.var = var
        u = [[_to_u(MultiPoly.coerce(e), var) for e in row] for row in entries]
        self.rows = len(u)
        self.cols = len(u[0]) if u else (cols or 0)
        if any(len(r) != self.cols for r in u):
            raise DimensionError("ragged matrix rows")
        self._u = u

    @classmethod
    def _wrap(cls, u: List[List[UPoly]], var: str, cols: int | None = None) -> "PolyMatrix":
        m = object.__new__(cls)
        m.var = var
        m._u = u
        m.rows = len(u)
        m.cols = len(u[0]) if u else (cols or 0)
        return m

    @classmethod
    def identity(cls, n: int, var: str = "D") -> "PolyMatrix":
        return cls._wrap(_identity(n), var, n)

    def entry(self, i: int, j: int) -> MultiPoly:
        return _from_u(self._u[i][j], self.var)

    def to_rows(self) -> List[List[MultiPoly]]:
        return [[_from_u(a, self.var) for a in row] for row in self._u]

    def row(self, i: int) -> Tuple[MultiPoly, ...]:
        return tuple(_from_u(a, self.var) for a in self._u[i])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows or self.var != other.var:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc: UPoly = []
                for k in range(self.cols):
                    if self._u[i][k] and other._u[k][j]:
                        acc = _add(acc, _mul(self._u[i][k], other._u[k][j]))
                row.append(acc)
            out.append(row)
        return PolyMatrix._wrap(out, self.var, other.cols)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix._wrap([[self._u[i][j] for i in range(self.rows)] for j in range(self.cols)],
                                self.var, self.rows)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.var, self.rows, self.cols) == (other.var, other.rows, other.cols) and self._u == other._u

    def is_diagonal(self) -> bool:
        return all(not self._u[i][j] for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self) -> MultiPoly:
        """Determinant by fraction-free (Bareiss) elimination."""
        n = self.rows
        if n != self.cols:
            raise DimensionError("determinant of a non-square matrix")
        if n == 0:
            return MultiPoly.const(1)
        a = [[list(x) for x in row] for row in self._u]
        sign = 1
        prev: UPoly = [Fraction(1)]
        for k in range(n - 1):
            if not a[k][k]:
                swap = next((i for i in range(k + 1, n) if a[i][k]), None)
                if swap is None:
                    return MultiPoly.const(0)
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = _sub(_mul(a[i][j], a[k][k]), _mul(a[i][k], a[k][j]))
                    q, r = _divmod(num, prev)
                    assert not r, "Bareiss division must be exact"
                    a[i][j] = q
            prev = a[k][k]
        return _from_u(_scale(a[n - 1][n - 1], sign), self.var)

    def __str__(self):
        rows = self.to_rows()
        return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in rows) + "]"

    __repr__ = __str__


def is_unimodular(U: PolyMatrix) -> bool:
    d = U.det()
    return d.is_constant() and not d.is_zero()


# -- Hermite normal form --------------------------------------------------------


def _hermite(a: List[List[UPoly]], r: int, c: int, track: bool = True):
    a = [[list(x) for x in row] for row in a]
    u = _identity(r) if track else None
    pivots: List[int] = []
    row = 0
    for col in range(c):
        if row == r:
            break
        while True:
            nz = [i for i in range(row, r) if a[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: (_deg(a[i][col]), i))
            if p != row:
                a[p], a[row] = a[row], a[p]
                if track:
                    u[p], u[row] = u[row], u[p]
            clean = True
            for i in range(row + 1, r):
                if a[i][col]:
                    q, rem = _divmod(a[i][col], a[row][col])
                    _row_axpy(a, i, row, q)
                    if track:
                        _row_axpy(u, i, row, q)
                    if rem:
                        clean = False
            if clean:
                break
        if not a[row][col]:
            continue
        inv = Fraction(1) / a[row][col][-1]
        if inv != 1:
            a[row] = [_scale(x, inv) for x in a[row]]
            if track:
                u[row] = [_scale(x, inv) for x in u[row]]
        for i in range(row):
            if a[i][col]:
                q, _ = _divmod(a[i][col], a[row][col])
                _row_axpy(a, i, row, q)
                if track:
                    _row_axpy(u, i, row, q)
        pivots.append(col)
        row += 1
    return a, u, pivots


def hermite_normal_form(M: PolyMatrix) -> Tuple[PolyMatrix, PolyMatrix]:
    """Return ``(H, U)`` with ``U @ M == H``, ``U`` unimodular, ``H`` in reduced echelon form.

    Pivots are monic and entries above a pivot have smaller degree than it,
    which makes ``H`` canonical for the row module of ``M``.
    """
    a, u, _ = _hermite(M._u, M.rows, M.cols)
    return PolyMatrix._wrap(a, M.var, M.cols), PolyMatrix._wrap(u, M.var, M.rows)


# -- Smith normal form ----------------------------------------------------------


def smith_normal_form(M: PolyMatrix) -> Tuple[PolyMatrix, PolyMatrix, PolyMatrix]:
    """Return ``(S, U, V)`` with ``U @ M @ V == S`` diagonal, ``d1 | d2 | ...`` and monic."""
    r, c = M.rows, M.cols
    a = [[list(x) for x in row] for row in M._u]
    u = _identity(r)
    v = _identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def col_axpy(dst, src, q):
        for row in a:
            row[dst] = _sub(row[dst], _mul(q, row[src]))
        for row in v:
            row[dst] = _sub(row[dst], _mul(q, row[src]))

    for t in range(min(r, c)):
        cand = [(i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
        if not cand:
            break
        i0, j0 = min(cand, key=lambda ij: (_deg(a[ij[0]][ij[1]]), ij))
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            dirty = False
            for i in range(t + 1, r):
                if a[i][t]:
                    q, rem = _divmod(a[i][t], a[t][t])
                    _row_axpy(a, i, t, q)
                    _row_axpy(u, i, t, q)
                    dirty = dirty or bool(rem)
            for j in range(t + 1, c):
                if a[t][j]:
                    q, rem = _divmod(a[t][j], a[t][t])
                    col_axpy(j, t, q)
                    dirty = dirty or bool(rem)
            if dirty:
                line = [(i, t) for i in range(t, r) if a[i][t]] + [(t, j) for j in range(t + 1, c) if a[t][j]]
                i0, j0 = min(line, key=lambda ij: (_deg(a[ij[0]][ij[1]]), ij))
                swap_rows(t, i0)
                swap_cols(t, j0)
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if a[i][j] and _divmod(a[i][j], a[t][t])[1]), None)
            if bad is None:
                break
            # fold the offending row into the pivot row and redo the elimination
            i = bad[0]
            a[t] = [_add(x, y) for x, y in zip(a[t], a[i])]
            u[t] = [_add(x, y) for x, y in zip(u[t], u[i])]
        inv = Fraction(1) / a[t][t][-1]
        if inv != 1:
            a[t] = [_scale(x, inv) for x in a[t]]
            u[t] = [_scale(x, inv) for x in u[t]]
    return (PolyMatrix._wrap(a, M.var, c), PolyMatrix._wrap(u, M.var, r), PolyMatrix._wrap(v, M.var, c))


def invariant_factors(M: PolyMatrix) -> List[MultiPoly]:
    S, _, _ = smith_normal_form(M)
    return [S.entry(i, i) for i in range(min(S.rows, S.cols)) if S._u[i][i]]


# -- submodules -----------------------------------------------------------------


@dataclass(frozen=True)
class SubmoduleBasis:
    """Submodule of ``R^rank`` (``R = Q[var]``) stored by its reduced Hermite basis.

    Two instances are equal exactly when they describe the same submodule.
    """

    rank: int
    generators: Tuple[Tuple[MultiPoly, ...], ...]
    var: str = "D"

    @classmethod
    def span(cls, vectors: Sequence[Sequence[object]], rank: int, var: str = "D") -> "SubmoduleBasis":
        rows = []
        for v in vectors:
            if len(v) != rank:
                raise DimensionError(f"vector of length {len(v)} in ambient rank {rank}")
            rows.append([_to_u(MultiPoly.coerce(e), var) for e in v])
        a, _, pivots = _hermite(rows, len(rows), rank, track=False)
        gens = tuple(tuple(_from_u(x, var) for x in a[i]) for i in range(len(pivots)))
        return cls(rank, gens, var)

    @classmethod
    def zero(cls, rank: int, var: str = "D") -> "SubmoduleBasis":
        return cls(rank, (), var)

    @classmethod
    def full(cls, rank: int, var: str = "D") -> "SubmoduleBasis":
        return cls.span([[1 if i == j else 0 for j in range(rank)] for i in range(rank)], rank, var)

    @property
    def module_rank(self) -> int:
        return len(self.generators)

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, v: Sequence[object]) -> bool:
        return submodule_contains(self, v)

    def contains_module(self, other: "SubmoduleBasis") -> bool:
        return all(self.contains(g) for g in other.generators)

    def __str__(self):
        if not self.generators:
            return "0"
        return "span{" + ", ".join("(" + ", ".join(str(e) for e in g) + ")" for g in self.generators) + "}"


def submodule_contains(S: SubmoduleBasis, v: Sequence[object]) -> bool:
    """Decide membership by reduction against the Hermite basis of ``S``."""
    if len(v) != S.rank:
        raise DimensionError(f"vector of length {len(v)} tested against ambient rank {S.rank}")
    w = [_to_u(MultiPoly.coerce(e), S.var) for e in v]
    for g in S.generators:
        gu = [_to_u(e, S.var) for e in g]
        p = next(j for j, e in enumerate(gu) if e)
        if not w[p]:
            continue
        q, rem = _divmod(w[p], gu[p])
        if rem:
            return False
        w = [_sub(x, _mul(q, y)) for x, y in zip(w, gu)]
    return not any(w)


def syzygy_kernel(M: PolyMatrix) -> SubmoduleBasis:
    """Left kernel ``{v : v^T M = 0}`` of ``M`` as a submodule of ``R^rows``."""
    a, u, pivots = _hermite(M._u, M.rows, M.cols)
    kernel_rows = [[_from_u(x, M.var) for x in u[i]] for i in range(len(pivots), M.rows)]
    return SubmoduleBasis.span(kernel_rows, M.rows, M.var)


def intersect(A: SubmoduleBasis, B: SubmoduleBasis) -> SubmoduleBasis:
    """Intersection via the syzygies of the stacked generators."""
    if A.rank != B.rank or A.var != B.var:
        raise DimensionError("submodules live in different ambient modules")
    if A.is_zero() or B.is_zero():
        return SubmoduleBasis.zero(A.rank, A.var)
    stacked = PolyMatrix(list(A.generators) + list(B.generators), A.var)
    K = syzygy_kernel(stacked)
    na = len(A.generators)
    vecs = []
    for k in K.generators:
        acc = [MultiPoly.const(0)] * A.rank
        for c, g in zip(k[:na], A.generators):
            acc = [x + c * y for x, y in zip(acc, g)]
        vecs.append(acc)
    return SubmoduleBasis.span(vecs, A.rank, A.var)


# -- torsion ------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionDecomposition:
    """``R^free_rank + sum R/(d_i)`` with monic nonconstant ``d_1 | d_2 | ...``."""

    free_rank: int
    invariant_factors: Tuple[MultiPoly, ...]

    @property
    def is_torsion_free(self) -> bool:
        return not self.invariant_factors


def torsion_decomposition(relations: Sequence[Sequence[object]], ngens: int, var: str = "D") -> TorsionDecomposition:
    """Structure of ``R^ngens / (row span of relations)`` from the Smith form."""
    if not relations:
        return TorsionDecomposition(ngens, ())
    M = PolyMatrix(relations, var)
    if M.cols != ngens:
        raise DimensionError(f"relations have {M.cols} columns for {ngens} generators")
    diag = invariant_factors(M)
    return TorsionDecomposition(ngens - len(diag), tuple(d for d in diag if not d.is_constant()))


# -- linear systems over the coefficient field ----------------------------------------


def rref(rows: Sequence[Sequence[object]], ncols: int):
    """Reduced row echelon form over a field; returns ``(rows, pivot_columns)``."""
    a = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def solve_affine(A: Sequence[Sequence[object]], b: Sequence[object], ncols: int):
    """Solve ``A x = b`` exactly.

    Returns ``(particular, nullspace)`` with free variables set to zero in
    ``particular``, or ``None`` when the system is inconsistent.
    """
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    free = [c for c in range(ncols) if c not in pivots]
    null = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        null.append(v)
    return x, null
