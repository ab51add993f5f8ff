"""Exact polynomial arithmetic over Q (and over simple extensions Q(a)).

Polynomials live in a fixed five-letter alphabet ``D x l m t`` (``l`` and
``m`` stand for lambda and mu).  Exponent vectors are dense 5-tuples and
coefficients are :class:`fractions.Fraction` or :class:`ExtFieldElem`;
nothing here ever touches floats.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from functools import reduce
from math import factorial
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .errors import ContextError, FormatError

VARS: Tuple[str, ...] = ("D", "x", "l", "m", "t")
NVARS = len(VARS)
_INDEX = {v: i for i, v in enumerate(VARS)}
_ALIASES = {"λ": "l", "μ": "m", "lam": "l", "mu": "m"}
# variables inside a monomial print highest-first: l*x, t^2*D
_PRINT_ORDER = (4, 3, 2, 1, 0)

Exps = Tuple[int, ...]
_ZERO_EXPS: Exps = (0,) * NVARS


def var_index(name: str) -> int:
    name = _ALIASES.get(name, name)
    try:
        return _INDEX[name]
    except KeyError:
        raise FormatError(f"unknown variable {name!r}; expected one of {VARS}") from None


def _coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, ExtFieldElem):
        return c
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class MultiPoly:
    """Immutable sparse polynomial in the variables ``D x l m t``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Exps, object] | None = None):
        clean: Dict[Exps, object] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != NVARS:
                    raise FormatError(f"exponent vector {e} must have arity {NVARS}")
                c = _coerce(c)
                if c:
                    clean[tuple(e)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Exps, object]) -> "MultiPoly":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = _coerce(c)
        return cls._raw({_ZERO_EXPS: c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        e = [0] * NVARS
        e[var_index(name)] = power
        return cls._raw({tuple(e): Fraction(1)})

    @classmethod
    def coerce(cls, value) -> "MultiPoly":
        if isinstance(value, MultiPoly):
            return value
        if isinstance(value, str):
            return parse_poly(value)
        return cls.const(value)

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Dict[Exps, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_constant(self) -> bool:
        return all(e == _ZERO_EXPS for e in self._terms)

    def constant_term(self):
        return self._terms.get(_ZERO_EXPS, Fraction(0))

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if omitted); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        i = var_index(var)
        return max(e[i] for e in self._terms)

    def variables(self) -> Tuple[str, ...]:
        used = [False] * NVARS
        for e in self._terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for v, u in zip(VARS, used) if u)

    def involves_only(self, names: Iterable[str]) -> bool:
        allowed = {var_index(n) for n in names}
        return all(i in allowed for e in self._terms for i, k in enumerate(e) if k)

    # -- arithmetic ---------------------------------------------------------

    def _other(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction, ExtFieldElem)):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExtFieldElem)):
            other = _coerce(other)
            if not other:
                return MultiPoly._raw({})
            return MultiPoly._raw({e: c * other for e, c in self._terms.items()})
        other = self._other(other)
        if other is NotImplemented:
            return other
        out: Dict[Exps, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, ExtFieldElem)):
            other = _coerce(other)
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            inv = 1 / other
            return self * inv
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, ExtFieldElem)):
            return self._terms == MultiPoly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- structural operations ---------------------------------------------

    def map_coefficients(self, fn) -> "MultiPoly":
        return MultiPoly({e: fn(c) for e, c in self._terms.items()})

    def coefficients_in(self, var: str, divided: bool = False) -> List["MultiPoly"]:
        """Split ``p = sum c_i var^i``; with ``divided`` return ``i! * c_i`` instead."""
        i = var_index(var)
        buckets: Dict[int, Dict[Exps, object]] = {}
        for e, c in self._terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            buckets.setdefault(k, {})[rest] = c
        if not buckets:
            return []
        out = []
        for k in range(max(buckets) + 1):
            q = MultiPoly._raw(buckets.get(k, {}))
            out.append(q * factorial(k) if divided else q)
        return out

    def coefficient(self, **powers: int) -> "MultiPoly":
        """Coefficient of the monomial given by ``powers`` (remaining variables kept)."""
        idx = {var_index(k): v for k, v in powers.items()}
        out = {}
        for e, c in self._terms.items():
            if all(e[i] == k for i, k in idx.items()):
                out[tuple(0 if i in idx else k for i, k in enumerate(e))] = c
        return MultiPoly._raw(out)

    def substitute(self, assignment: Mapping[str, object]) -> "MultiPoly":
        return substitute_affine(self, assignment)

    def __call__(self, **assignment) -> "MultiPoly":
        return substitute_affine(self, assignment)

    def derivative(self, var: str) -> "MultiPoly":
        i = var_index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MultiPoly._raw(out)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self) -> List[Tuple[Exps, object]]:
        return sorted(self._terms.items(), key=lambda it: (-sum(it[0]), tuple(-k for k in it[0])))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _format_monomial(e)
            if isinstance(c, ExtFieldElem):
                body = f"({c})" + (f"*{mono}" if mono else "")
                parts.append(("+", body))
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = _format_fraction(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_format_fraction(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(e: Exps) -> str:
    factors = []
    for i in _PRINT_ORDER:
        k = e[i]
        if k == 1:
            factors.append(VARS[i])
        elif k:
            factors.append(f"{VARS[i]}^{k}")
    return "*".join(factors)


ZERO = MultiPoly.const(0)
ONE = MultiPoly.const(1)
D = MultiPoly.var("D")
X = MultiPoly.var("x")
LAM = MultiPoly.var("l")
MU = MultiPoly.var("m")
T = MultiPoly.var("t")


def poly(value) -> MultiPoly:
    """Coerce a string, number or polynomial to :class:`MultiPoly`."""
    return MultiPoly.coerce(value)


# -- affine substitution ------------------------------------------------------


def substitute_affine(p: MultiPoly, assignment: Mapping[str, object]) -> MultiPoly:
    """Simultaneously replace variables by affine combinations of variables.

    ``assignment`` maps a variable name to a polynomial (or text) of total
    degree at most one.  Unlisted variables are left alone.
    """
    images: Dict[int, MultiPoly] = {}
    for name, value in assignment.items():
        img = MultiPoly.coerce(value)
        if img.degree() > 1:
            raise FormatError(f"substitution for {name!r} is not affine: {img}")
        images[var_index(name)] = img
    if not images or not p._terms:
        return p
    powers: Dict[Tuple[int, int], MultiPoly] = {}

    def power(i: int, k: int) -> MultiPoly:
        key = (i, k)
        if key not in powers:
            powers[key] = images[i] ** k
        return powers[key]

    acc: Dict[Exps, object] = {}
    for e, c in p._terms.items():
        kept = tuple(0 if i in images else k for i, k in enumerate(e))
        term = MultiPoly._raw({kept: c})
        for i, img in images.items():
            if e[i]:
                term = term * power(i, e[i])
        for te, tc in term._terms.items():
            s = acc.get(te)
            acc[te] = tc if s is None else s + tc
    return MultiPoly._raw({e: c for e, c in acc.items() if c})


def coefficients_in(p: MultiPoly, v: str, divided: bool = False) -> List[MultiPoly]:
    return p.coefficients_in(v, divided=divided)


def divmod_in(p: MultiPoly, q: MultiPoly, var: str) -> Tuple[MultiPoly, MultiPoly]:
    """Divide ``p`` by ``q`` as polynomials in ``var``.

    ``q`` must be univariate in ``var`` (its leading coefficient is a field
    element), while ``p`` may carry other variables in its coefficients.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if not q.involves_only([var]):
        raise FormatError(f"divisor {q} must be univariate in {var}")
    i = var_index(var)
    dq = q.degree(var)
    lead = q.coefficient(**{var: dq}).constant_term()
    inv_lead = 1 / lead
    rem = dict(p._terms)
    quo: Dict[Exps, object] = {}
    qterms = list(q._terms.items())
    while True:
        top = max((e[i] for e in rem), default=-1)
        if top < dq:
            break
        for e, c in [(e, c) for e, c in rem.items() if e[i] == top]:
            f = c * inv_lead
            shift = top - dq
            qe = e[:i] + (shift,) + e[i + 1:]
            quo[qe] = quo.get(qe, 0) + f
            for ge, gc in qterms:
                ne = tuple(a + b for a, b in zip(qe, ge))
                s = rem.get(ne, 0) - f * gc
                if s:
                    rem[ne] = s
                else:
                    rem.pop(ne, None)
    return MultiPoly(quo), MultiPoly._raw(rem)


def reduce_mod(p: MultiPoly, q: MultiPoly, var: str = "D") -> MultiPoly:
    return divmod_in(p, q, var)[1]


def monic(p: MultiPoly, var: str):
    """Return ``(p / lc, lc)`` for ``p`` univariate in ``var``."""
    if p.is_zero():
        return p, Fraction(0)
    lc = p.coefficient(**{var: p.degree(var)}).constant_term()
    return p * (1 / lc), lc


# -- parsing ------------------------------------------------------------------


def parse_poly(text: str) -> MultiPoly:
    """Parse the polynomial text grammar: rationals, ``D x l m t``, ``+ - * ^ /``, parentheses."""
    if not isinstance(text, str):
        raise FormatError(f"expected polynomial text, got {type(text).__name__}")
    src = text.replace("^", "**").strip()
    if not src:
        raise FormatError("empty polynomial text")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise FormatError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
    return _eval_node(tree.body, text)


def _eval_node(node, text) -> MultiPoly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return MultiPoly.const(node.value)
    if isinstance(node, ast.Name):
        try:
            return MultiPoly.var(node.id)
        except FormatError:
            raise FormatError(f"unknown variable {node.id!r} in {text!r}") from None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand, text)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, text)
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 0):
                raise FormatError(f"exponents must be non-negative integer literals in {text!r}")
            return left ** exp.value
        right = _eval_node(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or right.is_zero():
                raise FormatError(f"division only by nonzero rational constants in {text!r}")
            return left / right.constant_term()
    raise FormatError(f"unsupported syntax in polynomial {text!r}")


# -- univariate helpers over a field (dense lists, low degree first) ----------

UPoly = List[object]


def _utrim(a: UPoly) -> UPoly:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _usub(a: UPoly, b: UPoly) -> UPoly:
    n = max(len(a), len(b))
    return _utrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _umul(a: UPoly, b: UPoly) -> UPoly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _utrim(out)


def _udivmod(a: UPoly, b: UPoly) -> Tuple[UPoly, UPoly]:
    a, b = _utrim(a), _utrim(b)
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    inv = Fraction(1) / b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        f = r[-1] * inv
        q[k] = f
        for i, y in enumerate(b):
            r[k + i] -= f * y
        r = _utrim(r)
    return _utrim(q), r


def _uinverse_mod(a: UPoly, m: UPoly) -> UPoly:
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    r0, r1 = _utrim(m), _utrim(a)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _usub(s0, _umul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible modulo the minimal polynomial")
    c = Fraction(1) / r0[0]
    return _udivmod([x * c for x in s0], m)[1]


# -- simple algebraic extensions Q(a) -------------------------------------------


class FieldContext:
    """The field Q[a]/(p(a)) for a monic irreducible ``p``.

    ``minpoly`` lists the coefficients of ``p`` from the constant term up.
    Irreducibility is the caller's responsibility; inversion of a zero
    divisor raises :class:`ZeroDivisionError`.
    """

    def __init__(self, minpoly: Sequence, name: str = "a"):
        coeffs = _utrim([_coerce(c) for c in minpoly])
        if len(coeffs) < 2:
            raise FormatError("minimal polynomial must have degree >= 1")
        lead = coeffs[-1]
        self.minpoly: Tuple[Fraction, ...] = tuple(c / lead for c in coeffs)
        self.degree = len(coeffs) - 1
        self.name = name

    def __eq__(self, other):
        return isinstance(other, FieldContext) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"FieldContext({[str(c) for c in self.minpoly]})"

    def element(self, coords: Sequence) -> "ExtFieldElem":
        return ExtFieldElem(self, coords)

    def from_upoly(self, a: UPoly) -> "ExtFieldElem":
        r = _udivmod(a, list(self.minpoly))[1] if len(a) > self.degree else a
        return ExtFieldElem(self, r)

    def gen(self) -> "ExtFieldElem":
        return self.from_upoly([Fraction(0), Fraction(1)])

    def power_of_gen(self, k: int) -> "ExtFieldElem":
        return self.from_upoly([Fraction(0)] * k + [Fraction(1)])

    def one(self) -> "ExtFieldElem":
        return ExtFieldElem(self, [1])


class ExtFieldElem:
    """Element of Q(a) in the power basis ``1, a, ..., a^(n-1)``."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx: FieldContext, coords: Sequence):
        cs = [_coerce(c) for c in coords]
        if len(cs) > ctx.degree:
            raise FormatError(f"{len(cs)} coordinates exceed field degree {ctx.degree}")
        cs += [Fraction(0)] * (ctx.degree - len(cs))
        self.ctx = ctx
        self.coords: Tuple[Fraction, ...] = tuple(cs)

    def _lift(self, other) -> "ExtFieldElem":
        if isinstance(other, ExtFieldElem):
            if other.ctx != self.ctx:
                raise ContextError("elements belong to different extension fields")
            return other
        if isinstance(other, (int, Fraction)):
            return ExtFieldElem(self.ctx, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return ExtFieldElem(self.ctx, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return ExtFieldElem(self.ctx, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExtFieldElem(self.ctx, [a * other for a in self.coords])
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.ctx.from_upoly(_umul(_utrim(self.coords), _utrim(other.coords)))

    __rmul__ = __mul__

    def inverse(self) -> "ExtFieldElem":
        if not self:
            raise ZeroDivisionError("inversion of zero in an extension field")
        return ExtFieldElem(self.ctx, _uinverse_mod(list(self.coords), list(self.ctx.minpoly)))

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return reduce(lambda a, _: a * self, range(n), self.ctx.one())

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords == ExtFieldElem(self.ctx, [other]).coords
        if isinstance(other, ExtFieldElem):
            return self.ctx == other.ctx and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        if not any(self.coords[1:]):
            return hash(self.coords[0])
        return hash((self.ctx, self.coords))

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coords):
            if not c:
                continue
            base = "" if k == 0 else (self.ctx.name if k == 1 else f"{self.ctx.name}^{k}")
            if not base:
                terms.append(_format_fraction(c))
            elif c == 1:
                terms.append(base)
            elif c == -1:
                terms.append(f"-{base}")
            else:
                terms.append(f"{_format_fraction(c)}*{base}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def __repr__(self):
        return f"ExtFieldElem({self})"


def extfield_arith(a: ExtFieldElem, b: ExtFieldElem | None, op: str) -> ExtFieldElem:
    """Dispatch ``add``, ``mul`` or ``inv`` on extension-field elements."""
    if op == "inv":
        return a.inverse()
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if a.ctx != b.ctx:
        raise ContextError("elements belong to different extension fields")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown extension-field operation {op!r}")


Scalar = Union[Fraction, ExtFieldElem]
