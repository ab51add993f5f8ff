"""Conformal modules over finite table algebras.

A module is a finitely generated H-module presented as a sum of free
summands ``H e_i`` and cyclic torsion summands ``H e_i / (h_i)``.  An action
is a table ``(b, e_i) -> {e_j: phi(D, l)}`` extended sesqui-linearly, exactly
like an algebra product.  Right modules over ``C`` are stored as left
modules over ``C^op`` (``c _l^op m = {m _l c}``).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import _parallel
from .confcore import (
    CheckReport,
    ConfAlgebra,
    ConfElement,
    apply_table,
    check_axioms,
    element,
    opposite_algebra,
    product_at,
)
from .errors import BasisError, ContextError, DimensionError, FormatError, PreconditionError, WellDefinednessError
from .exactmath import LAM, MU, D, ExtFieldElem, FieldContext, MultiPoly, divmod_in, monic
from .hlinalg import PolyMatrix, SubmoduleBasis, TorsionDecomposition, syzygy_kernel, torsion_decomposition

Table = Mapping[Tuple[str, str], Mapping[str, MultiPoly]]


@dataclass(frozen=True)
class HModulePresentation:
    """``sum H e_i / (h_i)``; ``h_i = 0`` marks a free summand.  Nonzero relations are stored monic."""

    generators: Tuple[str, ...]
    relations: Tuple[MultiPoly, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise FormatError(f"duplicate module generators in {gens}")
        rels = tuple(MultiPoly.coerce(h) for h in self.relations) or tuple(MultiPoly.const(0) for _ in gens)
        if len(rels) != len(gens):
            raise DimensionError(f"{len(rels)} relations for {len(gens)} generators")
        clean = []
        for g, h in zip(gens, rels):
            if not h.involves_only(["D"]):
                raise FormatError(f"relation for {g} must be a polynomial in D, got {h}")
            if h.is_constant() and not h.is_zero():
                raise FormatError(f"relation for {g} is a unit; drop the generator instead")
            clean.append(monic(h, "D")[0] if h else h)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", tuple(clean))

    @classmethod
    def free(cls, generators: Sequence[str]) -> "HModulePresentation":
        return cls(tuple(generators))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def relation(self, g: str) -> MultiPoly:
        try:
            return self.relations[self.generators.index(g)]
        except ValueError:
            raise BasisError(f"{g!r} is not a module generator of {list(self.generators)}") from None

    def is_free(self) -> bool:
        return all(h.is_zero() for h in self.relations)

    def reduce(self, w: ConfElement) -> ConfElement:
        """Canonical representative: torsion coordinates of D-degree below ``deg h_i``."""
        out = {}
        for g, p in w.items():
            h = self.relation(g)
            out[g] = divmod_in(p, h, "D")[1] if h else p
        return ConfElement(out)

    def decomposition(self) -> TorsionDecomposition:
        rows = []
        for i, h in enumerate(self.relations):
            if h:
                row = [MultiPoly.const(0)] * self.rank
                row[i] = h
                rows.append(row)
        return torsion_decomposition(rows, self.rank)

    def __str__(self):
        parts = [g if not h else f"H{g}/({h})" for g, h in zip(self.generators, self.relations)]
        return " + ".join(parts) or "0"


@dataclass(frozen=True, eq=False)
class ConfRep:
    """Action of ``algebra`` on ``module``; ``side="right"`` means ``algebra`` is ``C^op`` of a right action."""

    algebra: ConfAlgebra
    module: HModulePresentation
    action: Table
    side: str = "left"
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise FormatError(f"side must be left or right, got {self.side!r}")
        clean = {}
        for (b, g), row in self.action.items():
            if b not in self.algebra.basis:
                raise BasisError(f"action symbol {b!r} not in algebra basis {list(self.algebra.basis)}")
            for s in (g, *row):
                if s not in self.module.generators:
                    raise BasisError(f"{s!r} is not a module generator of {list(self.module.generators)}")
            entry = {}
            for t, p in row.items():
                p = MultiPoly.coerce(p)
                if not p.involves_only(["D", "l"]):
                    raise FormatError(f"action entry ({b},{g})->{t} = {p} must involve only D and l")
                if p:
                    entry[t] = p
            if entry:
                clean[(b, g)] = entry
        object.__setattr__(self, "action", clean)
        object.__setattr__(self, "notes", tuple(self.notes))

    @property
    def rank(self) -> int:
        return self.module.rank

    def entry(self, b: str, g: str) -> ConfElement:
        return ConfElement(self.action.get((b, g), {}))

    def __str__(self):
        lines = [f"{self.side} representation of {self.algebra.name or 'algebra'} on {self.module}"]
        for b, g in iproduct(self.algebra.basis, self.module.generators):
            e = self.module.reduce(self.entry(b, g))
            if e:
                lines.append(f"  {b} _l {g} = {e}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


# -- construction and evaluation ----------------------------------------------------------


def _reduced_action(module: HModulePresentation, action: Table) -> Dict:
    return {k: module.reduce(ConfElement(v)).coords for k, v in action.items()}


def make_rep(C: ConfAlgebra, module: HModulePresentation, action: Table, side: str = "left",
             notes: Sequence[str] = ()) -> ConfRep:
    """Build a representation after checking that the action respects the torsion relations."""
    if not isinstance(module, HModulePresentation):
        module = HModulePresentation.free(module)
    R = ConfRep(C, module, action, side, tuple(notes))
    R = ConfRep(C, module, _reduced_action(module, R.action), side, tuple(notes))
    for g, h in zip(module.generators, module.relations):
        if not h:
            continue
        for b in C.basis:
            image = act(R, b, ConfElement.of(g, h))
            if image:
                raise WellDefinednessError(
                    f"action of {b} does not annihilate the relation ({h})*{g}",
                    witness={"symbol": b, "generator": g, "image": str(image)})
    return R


def act_at(R: ConfRep, a: ConfElement, w: ConfElement, sigma: MultiPoly) -> ConfElement:
    return R.module.reduce(apply_table(R.action, a, w, sigma))


def act(R: ConfRep, a, w) -> ConfElement:
    """``a _l w`` as a reduced module element with coefficients in ``D, l``."""
    a = element(a, R.algebra.basis)
    w = element(w, R.module.generators)
    return act_at(R, a, w, LAM)


def act_n(R: ConfRep, a, w, n: int) -> ConfElement:
    from .confcore import LambdaElem

    return LambdaElem(act(R, a, w).coords).n_coefficient(n)


def right_rep(C: ConfAlgebra, module: HModulePresentation, right_action: Table, notes: Sequence[str] = ()) -> ConfRep:
    """Right module ``m _l c`` turned into the left ``C^op``-module ``c _l^op m = {m _l c}``."""
    op = opposite_algebra(C)
    table: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for (g, c), row in right_action.items():
        table[(c, g)] = {t: MultiPoly.coerce(p).substitute({"l": -D - LAM}) for t, p in row.items()}
    return make_rep(op, module, table, side="right", notes=notes)


# -- checks -------------------------------------------------------------------------------


def _rep_residual(R: ConfRep, triple) -> ConfElement:
    a, b, g = triple
    ea, eb, eg = ConfElement.of(a), ConfElement.of(b), ConfElement.of(g)
    lhs = act_at(R, ea, act_at(R, eb, eg, MU), LAM)
    if R.algebra.kind == "lie":
        lhs = lhs - act_at(R, eb, act_at(R, ea, eg, LAM), MU)
    rhs = act_at(R, product_at(R.algebra, ea, eb, LAM), eg, LAM + MU)
    return lhs - rhs


def check_rep(R: ConfRep) -> CheckReport:
    """Module law on all (basis, basis, generator) triples, compared in the quotient module.

    Associative: ``a_l (b_m e) = (a_l b)_(l+m) e``.
    Lie: ``a_l (b_m e) - b_m (a_l e) = [a_l b]_(l+m) e``.
    """
    triples = list(iproduct(R.algebra.basis, R.algebra.basis, R.module.generators))
    residuals = _parallel.ordered_map(functools.partial(_rep_residual, R), triples)
    witnesses = [{"triple": list(t), "residual": str(r)} for t, r in zip(triples, residuals) if r]
    return CheckReport("representation", not witnesses, witnesses)


def check_well_defined(R: ConfRep) -> CheckReport:
    witnesses = []
    for g, h in zip(R.module.generators, R.module.relations):
        if h:
            for b in R.algebra.basis:
                image = act(R, b, ConfElement.of(g, h))
                if image:
                    witnesses.append({"symbol": b, "generator": g, "image": str(image)})
    return CheckReport("well-definedness", not witnesses, witnesses)


# -- kernels ------------------------------------------------------------------------------


def kernel_of_tables(C: ConfAlgebra, blocks: Sequence[Tuple[Sequence[str], HModulePresentation, Table]]) -> SubmoduleBasis:
    """``{x = sum f_b(D) b : x _l e = 0 for every source generator e of every block}``.

    A block is ``(sources, target module, table)``; for a module action the
    sources are the module's own generators, for a pairing they belong to
    another module.

    ``x _l e_i = sum_b f_b(-l) phi_(b,i)(D, l)``.  Each reduced ``phi`` is
    sliced by target generator and D-degree into a matrix over ``Q[l]``; its
    left kernel ``g(l)`` gives the answer through ``f_b(D) = g_b(-D)``.
    Slicing is exact because ``f_b(-l)`` is free of ``D``.
    """
    columns: Dict[tuple, Dict[str, MultiPoly]] = {}
    for k, (sources, module, table) in enumerate(blocks):
        for b in C.basis:
            for g in sources:
                image = module.reduce(ConfElement(table.get((b, g), {})))
                for t, p in image.items():
                    for d, coeff in enumerate(p.coefficients_in("D")):
                        if coeff:
                            columns.setdefault((k, g, t, d), {})[b] = coeff
    nb = len(C.basis)
    if nb == 0:
        return SubmoduleBasis.zero(0)
    if not columns:
        return SubmoduleBasis.full(nb)
    keys = sorted(columns, key=repr)
    M = PolyMatrix([[columns[key].get(b, MultiPoly.const(0)) for key in keys] for b in C.basis], var="l")
    K = syzygy_kernel(M)
    back = [[MultiPoly.coerce(p).substitute({"l": -D}) for p in g] for g in K.generators]
    return SubmoduleBasis.span(back, nb)


def rep_kernel(R: ConfRep) -> SubmoduleBasis:
    return kernel_of_tables(R.algebra, [(R.module.generators, R.module, R.action)])


def is_faithful(R: ConfRep) -> Tuple[bool, Optional[ConfElement]]:
    K = rep_kernel(R)
    if K.is_zero():
        return True, None
    return False, ConfElement.from_vector(R.algebra.basis, K.generators[0])


def kernel_elements(C: ConfAlgebra, K: SubmoduleBasis) -> List[ConfElement]:
    return [ConfElement.from_vector(C.basis, g) for g in K.generators]


# -- standard representations ----------------------------------------------------------------


def regular_rep(C: ConfAlgebra) -> ConfRep:
    """``C`` acting on itself (left regular / adjoint)."""
    return ConfRep(C, HModulePresentation.free(C.basis), C.table)


def trivial_rep(C: ConfAlgebra, generators: Sequence[str] = ("u",), relations: Sequence = ()) -> ConfRep:
    return make_rep(C, HModulePresentation(tuple(generators), tuple(relations)), {})


def rename_generators(R: ConfRep, mapping: Mapping[str, str]) -> ConfRep:
    gens = tuple(mapping.get(g, g) for g in R.module.generators)
    action = {(b, mapping.get(g, g)): {mapping.get(t, t): p for t, p in row.items()} for (b, g), row in R.action.items()}
    return ConfRep(R.algebra, HModulePresentation(gens, R.module.relations), action, R.side, R.notes)


def direct_sum(R1: ConfRep, R2: ConfRep) -> ConfRep:
    """Block action on ``M1 + M2``; clashing generator names get ``1.``/``2.`` prefixes."""
    if not R1.algebra.same_table(R2.algebra) or R1.side != R2.side:
        raise PreconditionError("direct_sum needs representations of the same algebra")
    if set(R1.module.generators) & set(R2.module.generators):
        R1 = rename_generators(R1, {g: f"1.{g}" for g in R1.module.generators})
        R2 = rename_generators(R2, {g: f"2.{g}" for g in R2.module.generators})
    module = HModulePresentation(R1.module.generators + R2.module.generators,
                                 R1.module.relations + R2.module.relations)
    action = dict(R1.action)
    action.update(R2.action)
    return ConfRep(R1.algebra, module, action, R1.side, R1.notes + R2.notes)


# -- restriction of scalars -------------------------------------------------------------------


def _ext_coords(c, ctx: FieldContext, k: int) -> Tuple[Fraction, ...]:
    if isinstance(c, ExtFieldElem):
        if c.ctx != ctx:
            raise ContextError(f"coefficient {c} lives in {c.ctx}, expected {ctx}")
        return (ctx.power_of_gen(k) * c).coords
    return (ctx.power_of_gen(k) * Fraction(c)).coords


def restrict_scalars(C: ConfAlgebra, module: HModulePresentation, action: Table, ctx: FieldContext,
                     notes: Sequence[str] = ()) -> ConfRep:
    """Rational representation on ``e_i^k`` (``k < deg p``) from an action over ``Q(a)``.

    ``b _l e_i^k = sum_(j,l) f_(b,i,k)^(j,l) e_j^l`` where
    ``a^k phi_(b,i)^j = sum_l a^l f_(b,i,k)^(j,l)``.
    """
    n = ctx.degree
    name = lambda g, k: f"{g}^{k}"
    gens, rels = [], []
    for g, h in zip(module.generators, module.relations):
        for k in range(n):
            gens.append(name(g, k))
            rels.append(h)
    table: Dict[Tuple[str, str], Dict[str, MultiPoly]] = {}
    for (b, g), row in action.items():
        for k in range(n):
            out: Dict[str, Dict] = {}
            for t, p in row.items():
                p = MultiPoly.coerce(p) if not isinstance(p, MultiPoly) else p
                for e, c in p.items():
                    for l, v in enumerate(_ext_coords(c, ctx, k)):
                        if v:
                            out.setdefault(name(t, l), {})[e] = v
            if out:
                table[(b, name(g, k))] = {t: MultiPoly(terms) for t, terms in out.items()}
    return make_rep(C, HModulePresentation(tuple(gens), tuple(rels)), table,
                    notes=tuple(notes) + (f"restricted from Q(a), p = {list(map(str, ctx.minpoly))}",))


def ext_act(C: ConfAlgebra, action: Table, a: ConfElement, w: ConfElement, sigma: MultiPoly = LAM) -> ConfElement:
    """Action over ``Q(a)`` (free module) evaluated without restriction; used for cross-checks."""
    return apply_table(action, a, w, sigma)
