"""Differential structure: graded Leibniz differential, differential-ideal
closure, skew tensor products of calculi, and d^2 = 0 verification."""

from __future__ import annotations

from dataclasses import dataclass

from .freealg import (AlgebraError, ConfluenceReport, Generator, MonomialOrder,
                      Morphism, NCPoly, Presentation, check_local_confluence,
                      make_presentation, orient_relation)
from .scalars import ONE, ZERO


def differentiate(e: NCPoly, pres: Presentation) -> NCPoly:
    """Graded Leibniz extension of the presentation's differential assignment.

    d(g1...gk) = sum_i (-1)^(deg g1...g_{i-1}) g1...g_{i-1} d(g_i) g_{i+1}...gk,
    with d of a positive-degree generator equal to 0.  Result is normal-formed.
    """
    out = NCPoly.zero()
    for w, c in e.terms.items():
        sign = 1
        for i, g in enumerate(w):
            gen = pres.generators[g]
            if gen.degree == 0:
                dg = pres.differential.get(g)
                if dg is None:
                    raise AlgebraError(
                        f"no differential assigned to generator {g!r} in {pres.name}")
                term = NCPoly.word(w[:i]) * dg * NCPoly.word(w[i + 1:])
                out = out + term.scale(c if sign > 0 else -c)
            sign *= (-1) ** gen.degree
    return pres.normal_form(out)


@dataclass
class DSquaredFailure:
    element: NCPoly
    residue: NCPoly


@dataclass
class DSquaredReport:
    presentation: str
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def check_d_squared(pres: Presentation, sample=()) -> DSquaredReport:
    """Assert d(d(g)) = 0 on every degree-0 generator and every sample element."""
    failures = []
    checked = 0
    elems = [NCPoly.gen(g.name) for g in pres.generators.values() if g.degree == 0]
    elems += list(sample)
    for e in elems:
        checked += 1
        r = differentiate(differentiate(e, pres), pres)
        if not r.is_zero():
            failures.append(DSquaredFailure(e, r))
    return DSquaredReport(pres.name, checked, failures)


def close_differential_ideal(pres: Presentation, ideal_gens, extra=(),
                             name=None) -> Presentation:
    """Quotient of a calculus by the differential ideal of the given generators.

    Rules come from orienting the generators, their single differentials,
    and any hand-supplied consequences in `extra` (deeper consequences are
    not searched for; the result must pass check_local_confluence, which
    the caller asserts).  Candidates are interreduced, so relations whose
    coefficients vanish under a parameter specialization drop out instead
    of forcing a division by zero.
    """
    candidates = list(extra)
    for g in ideal_gens:
        candidates.append(g)
        candidates.append(differentiate_free(g, pres))
    relations = [NCPoly.word(r.lhs) - r.rhs for r in pres.rules] + candidates
    out = make_presentation(
        name or f"{pres.name}/ideal",
        list(pres.generators.values()),
        pres.order.precedence,
        relations,
        differential=dict(pres.differential),
        notes=list(pres.genericity_notes),
        max_steps=pres.max_steps)
    return out


def differentiate_free(e: NCPoly, pres: Presentation) -> NCPoly:
    """Leibniz differential without normal-forming (for ideal generators)."""
    out = NCPoly.zero()
    for w, c in e.terms.items():
        sign = 1
        for i, g in enumerate(w):
            gen = pres.generators[g]
            if gen.degree == 0:
                dg = pres.differential.get(g)
                if dg is None:
                    raise AlgebraError(
                        f"no differential assigned to generator {g!r} in {pres.name}")
                term = NCPoly.word(w[:i]) * dg * NCPoly.word(w[i + 1:])
                out = out + term.scale(c if sign > 0 else -c)
            sign *= (-1) ** gen.degree
    return out


# -- skew tensor products -------------------------------------------------------

@dataclass
class TensorInfo:
    factors: tuple          # factor presentations
    leg_of: dict            # tensor generator name -> leg index
    orig_name: dict         # tensor generator name -> name in its factor
    tensor_name: tuple      # per leg: dict orig name -> tensor name

    def split_word(self, w):
        """Split a normal-form word into per-leg subwords (legs are sorted)."""
        legs = [[] for _ in self.factors]
        last = -1
        for g in w:
            leg = self.leg_of[g]
            if leg < last:
                raise AlgebraError(f"word {w} is not leg-sorted; normal-form first")
            last = leg
            legs[leg].append(self.orig_name[g])
        return tuple(tuple(l) for l in legs)


def skew_tensor(*factors: Presentation, name=None) -> Presentation:
    """Skew tensor product of graded calculi.

    Cross-commutation rules implement the Koszul sign
    (1 (x) rho)(gamma (x) 1) = (-1)^(deg rho * deg gamma) (gamma (x) rho);
    each factor's rules act verbatim on its (possibly renamed) generators.
    Name collisions between factors are resolved by a `_<leg>` suffix.
    """
    if len(factors) < 2:
        raise AlgebraError("skew_tensor needs at least two factors")
    counts: dict = {}
    for f in factors:
        for g in f.generators:
            counts[g] = counts.get(g, 0) + 1
    leg_of, orig_name = {}, {}
    tensor_name = []
    gens = []
    notes = []
    for k, f in enumerate(factors):
        ren = {}
        for g in f.generators.values():
            nm = g.name if counts[g.name] == 1 else f"{g.name}_{k + 1}"
            ren[g.name] = nm
            leg_of[nm] = k
            orig_name[nm] = g.name
        for g in f.generators.values():
            base = ren[g.base] if g.base is not None else None
            gens.append(Generator(ren[g.name], g.degree, base))
        tensor_name.append(ren)
        notes.extend(f.genericity_notes)
        if any(counts[g] > 1 for g in f.generators):
            notes.append(f"factor {k + 1} generators renamed with suffix _{k + 1}")
    # later legs get higher precedence so cross rules orient toward leg order
    precedence = []
    for k in reversed(range(len(factors))):
        precedence.extend(tensor_name[k][g] for g in factors[k].order.precedence)
    rules = []
    for k, f in enumerate(factors):
        ren = tensor_name[k]
        for r in f.rules:
            lhs = tuple(ren[g] for g in r.lhs)
            rhs = NCPoly({tuple(ren[g] for g in w): c for w, c in r.rhs.terms.items()})
            rules.append((lhs, rhs))
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            for gi in factors[i].generators.values():
                for gj in factors[j].generators.values():
                    a = tensor_name[i][gi.name]
                    b = tensor_name[j][gj.name]
                    sign = (-1) ** (gi.degree * gj.degree)
                    rules.append(((b, a), NCPoly({(a, b): sign})))
    differential = {}
    for k, f in enumerate(factors):
        ren = tensor_name[k]
        for g, dg in f.differential.items():
            differential[ren[g]] = NCPoly(
                {tuple(ren[x] for x in w): c for w, c in dg.terms.items()})
    order = MonomialOrder(tuple(precedence))
    pres = Presentation(
        name or "(x)".join(f.name for f in factors),
        {g.name: g for g in gens}, order,
        [_as_rule(lhs, rhs) for lhs, rhs in rules],
        differential, notes,
        tensor=TensorInfo(tuple(factors), leg_of, orig_name, tuple(tensor_name)),
        max_steps=max(f.max_steps for f in factors))
    return pres


def _as_rule(lhs, rhs):
    from .freealg import RewriteRule
    return RewriteRule(tuple(lhs), rhs)


def embed(e: NCPoly, tensor: Presentation, leg: int) -> NCPoly:
    """Embed a factor element into the tensor presentation at the given leg."""
    ren = tensor.tensor.tensor_name[leg]
    return NCPoly({tuple(ren[g] for g in w): c for w, c in e.terms.items()})


def split_legs(e: NCPoly, tensor: Presentation):
    """Decompose a tensor element into (coefficient, per-leg words) summands.

    The element is normal-formed first; reassembling the legs reproduces it.
    """
    e = tensor.normal_form(e)
    out = []
    for w in sorted(e.words(), key=tensor.order.word_key):
        out.append((e.terms[w], tensor.tensor.split_word(w)))
    return out


def assemble_legs(parts, tensor: Presentation) -> NCPoly:
    """Inverse of split_legs (up to normal form)."""
    out = NCPoly.zero()
    for c, legwords in parts:
        w = NCPoly.unit(c)
        for leg, lw in enumerate(legwords):
            ren = tensor.tensor.tensor_name[leg]
            w = w * NCPoly.word(tuple(ren[g] for g in lw))
        out = out + w
    return tensor.normal_form(out)


def factor_embedding(tensor: Presentation, leg: int, name=None) -> Morphism:
    f = tensor.tensor.factors[leg]
    images = {g: NCPoly.gen(tensor.tensor.tensor_name[leg][g])
              for g in f.generators}
    return Morphism(f, tensor, images, name or f"leg{leg}_of_{tensor.name}")


def tensor_morphism(src: Presentation, dst: Presentation, leg_images,
                    name: str = "") -> Morphism:
    """Morphism between tensor presentations from per-leg generator images.

    leg_images[j] maps the j-th factor's generator names to NCPoly values
    in dst (already embedded at whatever legs they should land in).
    """
    images = {}
    for gname in src.generators:
        leg = src.tensor.leg_of[gname]
        orig = src.tensor.orig_name[gname]
        images[gname] = leg_images[leg][orig]
    return Morphism(src, dst, images, name)
