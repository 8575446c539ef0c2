"""Words, noncommutative polynomials, oriented rewrite systems and morphisms.

Elements of every algebra and calculus in the engine are NCPoly values:
finite linear combinations of words in graded generators with ParamScalar
coefficients.  Quotient algebras are realized as confluent rewrite systems
(Presentation); equality is equality of normal forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .scalars import ONE, ZERO, ParamScalar

Word = tuple  # tuple of generator names


class AlgebraError(ValueError):
    pass


class ReductionLimit(RuntimeError):
    """Raised when a single element exceeds the rewrite step budget."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int = 0
    base: Optional[str] = None  # degree-0 generator this one differentiates


class NCPoly:
    """Linear combination of words; no zero coefficients are stored."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for w, c in terms.items():
                if not isinstance(c, ParamScalar):
                    c = ParamScalar.from_int(c) if isinstance(c, int) \
                        else ParamScalar.from_fraction(c)
                if not c.is_zero():
                    t[tuple(w)] = c
        self.terms = t

    @staticmethod
    def zero() -> "NCPoly":
        return NCPoly()

    @staticmethod
    def unit(coef=ONE) -> "NCPoly":
        return NCPoly({(): coef})

    @staticmethod
    def word(w: Iterable[str], coef=ONE) -> "NCPoly":
        return NCPoly({tuple(w): coef})

    @staticmethod
    def gen(name: str) -> "NCPoly":
        return NCPoly({(name,): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, ZERO) + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return NCPoly._raw(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (ParamScalar, int)):
            return self.scale(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = out.get(w, ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(w, None)
                else:
                    out[w] = s
        return NCPoly._raw(out)

    def __rmul__(self, other):
        if isinstance(other, (ParamScalar, int)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "NCPoly":
        if isinstance(c, int):
            c = ParamScalar.from_int(c)
        if c.is_zero():
            return NCPoly()
        return NCPoly._raw({w: cc * c for w, cc in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @staticmethod
    def _raw(terms: dict) -> "NCPoly":
        p = NCPoly.__new__(NCPoly)
        p.terms = terms
        return p

    def map_words(self, f) -> "NCPoly":
        """Linear extension of a word -> NCPoly map."""
        out = NCPoly()
        for w, c in self.terms.items():
            out = out + f(w).scale(c)
        return out

    def words(self):
        return self.terms.keys()

    def __str__(self):
        from .parsing import format_poly
        return format_poly(self)

    def __repr__(self):
        return f"NCPoly({self})"


@dataclass(frozen=True)
class MonomialOrder:
    """Word order: length first, then left-lexicographic by precedence.

    `precedence` lists generator names from largest to smallest; the order
    is multiplicative, so oriented rules yield terminating rewriting.
    """

    precedence: tuple

    def rank(self, name: str) -> int:
        return self.precedence.index(name)

    def word_key(self, w: Word):
        return (len(w), tuple(-self.precedence.index(g) for g in w))

    def greater(self, a: Word, b: Word) -> bool:
        return self.word_key(a) > self.word_key(b)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: NCPoly


@dataclass
class ConfluencePair:
    """A critical pair whose two reductions disagree."""

    witness: Word
    left: NCPoly
    right: NCPoly


@dataclass
class Presentation:
    """Generators, monomial order, oriented rules and optional differential."""

    name: str
    generators: dict
    order: MonomialOrder
    rules: list
    differential: dict = field(default_factory=dict)
    genericity_notes: list = field(default_factory=list)
    tensor: object = None  # TensorInfo when this is a skew tensor product
    max_steps: int = 10 ** 6

    def __post_init__(self):
        for g in self.generators.values():
            if g.base is not None:
                base = self.generators.get(g.base)
                if base is None or g.degree != base.degree + 1:
                    raise AlgebraError(
                        f"differential generator {g.name} must raise degree by 1")
        for r in self.rules:
            self._check_rule(r)
        self._by_first = {}
        for r in sorted(self.rules, key=lambda r: self.order.word_key(r.lhs)):
            self._by_first.setdefault(r.lhs[0], []).append(r)
        self._nf_cache = {}

    def _check_rule(self, r: RewriteRule):
        key = self.order.word_key(r.lhs)
        for w in r.rhs.words():
            if self.order.word_key(w) >= key:
                raise AlgebraError(
                    f"rule {list(r.lhs)} not oriented: rhs word {list(w)} not smaller")

    # -- degrees ---------------------------------------------------------
    def degree_of_word(self, w: Word) -> int:
        return sum(self.generators[g].degree for g in w)

    def degrees(self, e: NCPoly):
        return sorted({self.degree_of_word(w) for w in e.words()})

    def is_homogeneous(self, e: NCPoly) -> bool:
        return len(self.degrees(e)) <= 1

    def check_element(self, e: NCPoly):
        for w in e.words():
            for g in w:
                if g not in self.generators:
                    raise AlgebraError(f"unknown generator {g!r} in element")

    # -- rewriting ---------------------------------------------------------
    def _find_redex(self, w: Word):
        for pos in range(len(w)):
            rules = self._by_first.get(w[pos])
            if not rules:
                continue
            for r in rules:
                n = len(r.lhs)
                if w[pos:pos + n] == r.lhs:
                    return pos, r
        return None

    def _nf_word(self, w: Word, budget: list) -> dict:
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        hit = self._find_redex(w)
        if hit is None:
            out = {w: ONE}
            self._nf_cache[w] = out
            return out
        pos, rule = hit
        budget[0] += 1
        if budget[0] > self.max_steps:
            raise ReductionLimit(
                f"normal form of {'*'.join(w)} in {self.name} exceeded "
                f"{self.max_steps} rewrite steps")
        pre, post = w[:pos], w[pos + len(rule.lhs):]
        out: dict = {}
        for rw, rc in rule.rhs.terms.items():
            sub = self._nf_word(pre + rw + post, budget)
            for sw, sc in sub.items():
                s = out.get(sw, ZERO) + rc * sc
                if s.is_zero():
                    out.pop(sw, None)
                else:
                    out[sw] = s
        self._nf_cache[w] = out
        return out

    def normal_form(self, e: NCPoly) -> NCPoly:
        self.check_element(e)
        budget = [0]
        out: dict = {}
        for w, c in e.terms.items():
            for sw, sc in self._nf_word(w, budget).items():
                s = out.get(sw, ZERO) + c * sc
                if s.is_zero():
                    out.pop(sw, None)
                else:
                    out[sw] = s
        return NCPoly._raw(out)

    def nf(self, e: NCPoly) -> NCPoly:
        return self.normal_form(e)

    def is_irreducible(self, w: Word) -> bool:
        return self._find_redex(w) is None

    # -- enumeration --------------------------------------------------------
    def irreducible_words(self, max_len: int, degree: Optional[int] = None):
        """All rule-irreducible words of length <= max_len, in monomial order.

        With `degree` given, filters to that differential degree.
        """
        names = list(self.generators)
        found = [()]
        frontier = [()]
        for _ in range(max_len):
            nxt = []
            for w in frontier:
                for g in names:
                    ww = w + (g,)
                    # every proper prefix is irreducible, so only check suffix hits
                    if self._find_redex(ww) is None:
                        nxt.append(ww)
            found.extend(nxt)
            frontier = nxt
        if degree is not None:
            found = [w for w in found if self.degree_of_word(w) == degree]
        return sorted(found, key=self.order.word_key)

    # -- notes ----------------------------------------------------------------
    def add_note(self, note: str):
        if note not in self.genericity_notes:
            self.genericity_notes.append(note)


def orient_relation(rel: NCPoly, order: MonomialOrder, notes: Optional[list] = None):
    """Orient relation = 0 into a rewrite rule lhs -> rhs.

    Divides by the leading coefficient; a parameter-dependent division is
    recorded as a genericity note (the unit is nonzero for generic values).
    """
    if rel.is_zero():
        return None
    lhs = max(rel.words(), key=order.word_key)
    lc = rel.terms[lhs]
    if notes is not None and not lc.is_rational():
        notes.append(f"divided by unit {lc} (assumed nonzero for generic parameters)")
    rest = NCPoly._raw({w: c for w, c in rel.terms.items() if w != lhs})
    rhs = rest.scale(-(ONE / lc))
    return RewriteRule(lhs, rhs)


def make_presentation(name, generators, precedence, relations,
                      differential=None, notes=None, max_steps=10 ** 6,
                      interreduce=True) -> Presentation:
    """Build a presentation by orienting relations, with interreduction.

    Relations are processed largest-lhs first; each candidate is reduced
    against the rules accepted so far, so redundant or overlapping inputs
    collapse.  No completion is attempted: the result must still pass
    check_local_confluence.
    """
    gens = {}
    for g in generators:
        if g.name in gens:
            raise AlgebraError(f"duplicate generator {g.name}")
        gens[g.name] = g
    order = MonomialOrder(tuple(precedence))
    if set(order.precedence) != set(gens):
        raise AlgebraError("precedence must list exactly the generators")
    notes = list(notes or [])
    pres = Presentation(name, gens, order, [], dict(differential or {}),
                        notes, max_steps=max_steps)
    pending = [r for r in relations if not r.is_zero()]
    pending.sort(key=lambda rel: max(order.word_key(w) for w in rel.words()),
                 reverse=True)
    while pending:
        rel = pending.pop()
        rel = pres.normal_form(rel) if interreduce else rel
        rule = orient_relation(rel, order, notes)
        if rule is None:
            continue
        pres = Presentation(name, gens, order, pres.rules + [rule],
                            dict(differential or {}), notes, max_steps=max_steps)
    if interreduce:
        pres = _interreduce(pres)
    return pres


def _interreduce(pres: Presentation, max_passes: int = 10) -> Presentation:
    """Reduce every rule against the others; drop or rewrite subsumed rules."""
    rules = list(pres.rules)
    for _ in range(max_passes):
        changed = False
        for i in range(len(rules)):
            rest = rules[:i] + rules[i + 1:]
            scratch = Presentation(pres.name, pres.generators, pres.order, rest,
                                   pres.differential, pres.genericity_notes,
                                   max_steps=pres.max_steps)
            rel = scratch.normal_form(NCPoly.word(rules[i].lhs) - rules[i].rhs)
            new = orient_relation(rel, pres.order, None)
            if new is None:
                rules = rest
                changed = True
                break
            if new.lhs != rules[i].lhs or new.rhs != rules[i].rhs:
                rules[i] = new
                changed = True
        if not changed:
            break
    rules.sort(key=lambda r: pres.order.word_key(r.lhs))
    return Presentation(pres.name, pres.generators, pres.order, rules,
                        pres.differential, pres.genericity_notes,
                        tensor=pres.tensor, max_steps=pres.max_steps)


# -- local confluence ---------------------------------------------------------

@dataclass
class ConfluenceReport:
    presentation: str
    pairs_checked: int
    unresolved: list  # ConfluencePair

    @property
    def confluent(self) -> bool:
        return not self.unresolved


def _critical_witnesses(l1: Word, l2: Word):
    """Overlap and containment witnesses of two rule left-hand sides.

    Yields (witness, pos1, pos2): positions where l1 and l2 start in the word.
    """
    # proper overlaps: suffix of l1 = prefix of l2
    for k in range(1, min(len(l1), len(l2))):
        if l1[len(l1) - k:] == l2[:k]:
            yield l1 + l2[k:], 0, len(l1) - k
    # containment: l2 inside l1
    if len(l2) < len(l1):
        for pos in range(len(l1) - len(l2) + 1):
            if l1[pos:pos + len(l2)] == l2:
                yield l1, 0, pos


def check_local_confluence(pres: Presentation, overlap_bound: Optional[int] = None
                           ) -> ConfluenceReport:
    """Enumerate critical pairs up to the bound and reduce both branches.

    The default bound, twice the longest left-hand side, covers every
    possible overlap or containment witness, so an empty report certifies
    local confluence outright.
    """
    rules = pres.rules
    if overlap_bound is None:
        overlap_bound = 2 * max((len(r.lhs) for r in rules), default=1)
    checked = 0
    bad = []
    seen = set()

    def branch(witness, pos, rule):
        pre, post = witness[:pos], witness[pos + len(rule.lhs):]
        return pres.normal_form(
            NCPoly.word(pre) * rule.rhs * NCPoly.word(post))

    for r1, r2 in itertools.product(rules, repeat=2):
        for witness, p1, p2 in _critical_witnesses(r1.lhs, r2.lhs):
            if r1 is r2 and p1 == p2:
                continue
            if len(witness) > overlap_bound:
                continue
            key = (witness, p1, p2, id(r1), id(r2))
            if key in seen:
                continue
            seen.add(key)
            checked += 1
            b1 = branch(witness, p1, r1)
            b2 = branch(witness, p2, r2)
            if b1 != b2:
                bad.append(ConfluencePair(witness, b1, b2))
    return ConfluenceReport(pres.name, checked, bad)


# -- morphisms ---------------------------------------------------------------

@dataclass
class MorphismFailure:
    relation: Word
    residue: NCPoly


@dataclass
class Morphism:
    """Generator-image map between presentations, applied multiplicatively."""

    source: Presentation
    target: Presentation
    images: dict  # source generator name -> NCPoly in target
    name: str = ""

    def __call__(self, e: NCPoly) -> NCPoly:
        out = NCPoly()
        for w, c in e.terms.items():
            img = NCPoly.unit()
            for g in w:
                if g not in self.images:
                    raise AlgebraError(
                        f"morphism {self.name or '?'} undefined on generator {g!r}")
                img = img * self.images[g]
            out = out + img.scale(c)
        return self.target.normal_form(out)

    def compose(self, inner: "Morphism") -> "Morphism":
        images = {g: self(inner.images[g]) for g in inner.images}
        return Morphism(inner.source, self.target, images,
                        name=f"{self.name}∘{inner.name}")


@dataclass
class MorphismReport:
    name: str
    failures: list  # MorphismFailure
    degree_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.degree_ok and not self.failures


def check_morphism(m: Morphism) -> MorphismReport:
    """Well-definedness: every source rule maps to zero; degrees preserved."""
    degree_ok = True
    for g, img in m.images.items():
        d = m.source.generators[g].degree
        for w in img.words():
            if m.target.degree_of_word(w) != d:
                degree_ok = False
    failures = []
    for r in m.source.rules:
        rel = NCPoly.word(r.lhs) - r.rhs
        residue = m(rel)
        if not residue.is_zero():
            failures.append(MorphismFailure(r.lhs, residue))
    return MorphismReport(m.name, failures, degree_ok)


def identity_morphism(pres: Presentation) -> Morphism:
    return Morphism(pres, pres, {g: NCPoly.gen(g) for g in pres.generators},
                    name=f"id_{pres.name}")


# -- exact linear algebra over the scalar field -------------------------------

class SpanSolver:
    """Incremental row echelon form over ParamScalar with word pivots."""

    def __init__(self, keyfunc):
        self.key = keyfunc.word_key if isinstance(keyfunc, MonomialOrder) else keyfunc
        self.pivots: dict = {}  # pivot word -> reduced row dict

    def _reduce(self, row: dict) -> dict:
        row = dict(row)
        while row:
            piv = max(row, key=self.key)
            hit = self.pivots.get(piv)
            if hit is None:
                return row
            c = row[piv]
            for w, cc in hit.items():
                s = row.get(w, ZERO) - c * cc
                if s.is_zero():
                    row.pop(w, None)
                else:
                    row[w] = s
        return row

    def add(self, vec: NCPoly) -> bool:
        """Insert vector into the span; returns True if it was independent."""
        row = self._reduce(vec.terms)
        if not row:
            return False
        piv = max(row, key=self.key)
        inv = ONE / row[piv]
        self.pivots[piv] = {w: c * inv for w, c in row.items()}
        return True

    def contains(self, vec: NCPoly) -> bool:
        return not self._reduce(vec.terms)

    @property
    def dimension(self) -> int:
        return len(self.pivots)


def nullspace(vectors, keyfunc):
    """Basis of {x : sum_j x_j v_j = 0} by incremental elimination.

    `vectors` is a list of NCPoly; returns a list of dicts index -> scalar.
    """
    key = keyfunc.word_key if isinstance(keyfunc, MonomialOrder) else keyfunc
    pivots: dict = {}   # pivot word -> (row dict, combo dict)
    out = []
    for j, vec in enumerate(vectors):
        row = dict(vec.terms)
        combo = {j: ONE}
        while row:
            piv = max(row, key=key)
            hit = pivots.get(piv)
            if hit is None:
                break
            prow, pcombo = hit
            c = row[piv]
            for w, cc in prow.items():
                s = row.get(w, ZERO) - c * cc
                if s.is_zero():
                    row.pop(w, None)
                else:
                    row[w] = s
            for i, cc in pcombo.items():
                s = combo.get(i, ZERO) - c * cc
                if s.is_zero():
                    combo.pop(i, None)
                else:
                    combo[i] = s
        if not row:
            out.append(combo)
        else:
            piv = max(row, key=key)
            inv = ONE / row[piv]
            pivots[piv] = ({w: c * inv for w, c in row.items()},
                           {i: c * inv for i, c in combo.items()})
    return out


def ideal_membership_bounded(e: NCPoly, gens, pres: Presentation,
                             degree_bound: int, side: str = "two") -> bool:
    """Brute-force membership of e in the (two-sided) ideal of gens.

    Spans {nf(u*g*v)} over irreducible words u, v with
    len(u) + len(g-word) + len(v) <= degree_bound and decides membership by
    exact linear algebra.  `side` restricts to left or right multiples.
    This is the independent oracle used to certify rewrite-level claims.
    """
    target = pres.normal_form(e)
    if target.is_zero():
        return True
    max_e = max(len(w) for w in e.words())
    if degree_bound < max_e:
        raise AlgebraError(
            f"degree bound {degree_bound} below element length {max_e}")
    solver = SpanSolver(pres.order)
    for g in gens:
        if g.is_zero():
            continue
        glen = max(len(w) for w in g.words())
        room = degree_bound - glen
        if room < 0:
            continue
        lefts = [()] if side == "right" else pres.irreducible_words(room)
        for u in lefts:
            rights_room = room - len(u)
            rights = [()] if side == "left" else pres.irreducible_words(rights_room)
            for v in rights:
                vec = pres.normal_form(NCPoly.word(u) * g * NCPoly.word(v))
                if not vec.is_zero():
                    solver.add(vec)
    return solver.contains(target)


def graded_basis(pres: Presentation, degree: int, length_bound: int):
    """Rule-irreducible words of the given degree up to the length bound."""
    return pres.irreducible_words(length_bound, degree=degree)
