"""Built-in algebras and calculi: quantum discs, the circle, U(1) Hopf data.

Every builder takes a Params value so the same construction serves the
symbolic session and rational specializations.  All built-ins are
hand-completed rewrite systems; confluence is machine-checked in tests and
hand-supplied rules are certified against the ideal-membership oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dga import close_differential_ideal
from .freealg import Generator, MonomialOrder, NCPoly, Presentation
from .parsing import parse_element, parse_scalar
from .scalars import ParamScalar


@dataclass(frozen=True)
class Params:
    """Parameter mode: symbolic, or an exact rational assignment."""

    assignment: Optional[dict] = None  # name -> Fraction; None = symbolic

    @staticmethod
    def symbolic() -> "Params":
        return Params(None)

    @staticmethod
    def rational(p, q, nu) -> "Params":
        vals = {"p": Fraction(p), "q": Fraction(q), "nu": Fraction(nu)}
        for k, v in vals.items():
            if not (0 < v <= 1):
                raise ValueError(f"parameter {k} = {v} outside (0, 1]")
        return Params(vals)

    @property
    def is_symbolic(self) -> bool:
        return self.assignment is None

    def scalar(self, text: str) -> ParamScalar:
        s = parse_scalar(text)
        if self.assignment is None:
            return s
        return s.specialize(self.assignment)

    def element(self, text: str, pres: Presentation) -> NCPoly:
        """Parse an expression, specializing coefficients in rational mode."""
        e = parse_element(text, pres)
        if self.assignment is None:
            return e
        return NCPoly({w: c.specialize(self.assignment)
                       for w, c in e.terms.items()})

    def value(self, name: str):
        return None if self.assignment is None else self.assignment[name]

    def describe(self) -> str:
        if self.assignment is None:
            return "symbolic"
        return ",".join(f"{k}={v}" for k, v in sorted(self.assignment.items()))

    @property
    def collapse_overlap_calculus(self) -> bool:
        """Whether d(alpha) = 0 holds in the glued overlap calculus.

        True for generic parameters; at a rational point it fails only when
        p = q = nu = 1 (the classical point, where the calculus on the
        circle stays classical).
        """
        if self.assignment is None:
            return True
        return not all(v == 1 for v in self.assignment.values())


def _free_calculus(name, base_names, precedence, params_rel, differential_pairs,
                   max_steps=10 ** 6) -> Presentation:
    gens = []
    for nm in base_names:
        gens.append(Generator(nm, 0))
    for nm, d in differential_pairs:
        gens.append(Generator(d, 1, nm))
    pres = Presentation(name, {g.name: g for g in gens},
                        MonomialOrder(tuple(precedence)), [],
                        differential={nm: NCPoly.gen(d) for nm, d in differential_pairs},
                        max_steps=max_steps)
    return pres


def disc_calculus(params: Params, var: str = "x", deform: str = "p",
                  name: Optional[str] = None) -> Presentation:
    """Calculus on a quantum disc: generators var, var*, d(var), d(var*).

    Algebra relation  xs*x = p*x*xs + (1-p); first-order relations commute
    functions past differentials with p-powers; the degree-2 consequences
    (dx*dx = 0 etc.) come from differentiating those once.
    """
    x, xs = var, var + "s"
    dx, dxs = "d" + var, "d" + var + "s"
    name = name or f"disc_{deform}"
    free = _free_calculus(name, [x, xs], [xs, x, dxs, dx],
                          params, [(x, dx), (xs, dxs)])
    P = params.scalar(deform)
    pinv = params.scalar(f"1/{deform}")
    one = ParamScalar.from_int(1)
    g = NCPoly.gen
    rels = [
        g(xs) * g(x) - (g(x) * g(xs)).scale(P) - NCPoly.unit(one - P),
        g(x) * g(dx) - (g(dx) * g(x)).scale(pinv),
        g(xs) * g(dxs) - (g(dxs) * g(xs)).scale(P),
        g(x) * g(dxs) - (g(dxs) * g(x)).scale(pinv),
        g(xs) * g(dx) - (g(dx) * g(xs)).scale(P),
    ]
    return close_differential_ideal(free, rels, name=name)


def circle_algebra(params: Params, name: str = "circle") -> Presentation:
    """Polynomials on the circle: alpha, alphas with alpha*alphas = alphas*alpha = 1."""
    gens = [Generator("alpha", 0), Generator("alphas", 0)]
    pres = Presentation(name, {g.name: g for g in gens},
                        MonomialOrder(("alphas", "alpha")), [])
    g = NCPoly.gen
    rels = [g("alpha") * g("alphas") - NCPoly.unit(),
            g("alphas") * g("alpha") - NCPoly.unit()]
    from .freealg import make_presentation
    return make_presentation(name, gens, ["alphas", "alpha"], rels)


def circle_universal_calculus(params: Params, name: str = "circle_univ"
                              ) -> Presentation:
    """Circle with differentials, quotiented only by the algebra relations
    and their single differentials (the starting point for overlap calculi)."""
    free = _free_calculus(name, ["alpha", "alphas"],
                          ["alphas", "alpha", "dalphas", "dalpha"],
                          params, [("alpha", "dalpha"), ("alphas", "dalphas")])
    g = NCPoly.gen
    rels = [g("alpha") * g("alphas") - NCPoly.unit(),
            g("alphas") * g("alpha") - NCPoly.unit()]
    return close_differential_ideal(free, rels, name=name)


def u1_calculus_extras(params: Params, deformation: Optional[ParamScalar] = None):
    """Hand-completed consequences for the nu-deformed circle calculus.

    Each is certified to lie in the differential ideal by the bounded
    membership oracle (see tests); they make the rewrite system confluent.
    `deformation` overrides the twist scalar (default: the nu parameter).
    """
    nu = deformation if deformation is not None else params.scalar("nu")
    nuinv = ParamScalar.from_int(1) / nu
    g = NCPoly.gen
    return [
        g("alpha") * g("dalpha") - (g("dalpha") * g("alpha")).scale(nuinv),
        g("alphas") * g("dalphas") - (g("dalphas") * g("alphas")).scale(nu),
        g("dalpha") * g("alphas") * g("alphas") + g("dalphas").scale(nuinv),
        g("dalpha") * g("dalpha"),
        g("dalphas") * g("dalphas"),
        g("dalpha") * g("dalphas"),
    ]


def overlap_collapse_extras():
    """Hand-supplied consequences d(alpha) = d(alphas) = 0 for the glued
    overlap calculus at generic parameters."""
    return [NCPoly.gen("dalpha"), NCPoly.gen("dalphas")]


def u1_hopf(params: Params, name: str = "u1") -> "HopfData":
    """The Hopf algebra of the structure group U(1): group-like alpha.

    Delta(alpha) = alpha (x) alpha, eps(alpha) = 1, S(alpha) = alphas;
    S is its own inverse here and is supplied explicitly.
    """
    from .hopf import HopfData
    alg = circle_algebra(params, name=name)
    T2 = None  # built lazily by HopfData
    g = NCPoly.gen
    coproduct = {
        "alpha": NCPoly.word(("alpha_1", "alpha_2")),
        "alphas": NCPoly.word(("alphas_1", "alphas_2")),
    }
    counit = {"alpha": ParamScalar.from_int(1), "alphas": ParamScalar.from_int(1)}
    from .freealg import Morphism
    S = Morphism(alg, alg, {"alpha": g("alphas"), "alphas": g("alpha")}, name="S")
    Sinv = Morphism(alg, alg, {"alpha": g("alphas"), "alphas": g("alpha")}, name="S_inv")
    return HopfData(alg, coproduct, counit, S, Sinv, name=name)


def u1_right_ideal(params: Params, H=None) -> "RightIdealData":
    """The right ideal generated by alpha + nu*alphas - (1+nu)*1."""
    from .hopf import RightIdealData
    if H is None:
        H = u1_hopf(params)
    nu = params.scalar("nu")
    one = ParamScalar.from_int(1)
    r = NCPoly.gen("alpha") + NCPoly.gen("alphas").scale(nu) \
        - NCPoly.unit(one + nu)
    return RightIdealData(H, [r])


def u1_calculus(params: Params, H=None, R=None, name: str = "u1_calc"
                ) -> Presentation:
    """The nu-deformed right-covariant calculus on U(1)."""
    from .hopf import covariant_calculus
    if H is None:
        H = u1_hopf(params)
    if R is None:
        R = u1_right_ideal(params, H)
    return covariant_calculus(H, R, extra=u1_calculus_extras(params), name=name)


@dataclass
class RelationSystem:
    """Generators with relations but no normal forms.

    Used for algebras (like the glued two-sphere in abstract generators)
    whose relation ideal admits no finite confluent rewrite system under
    the engine's word order; questions about them go through the bounded
    linear-algebra oracle on the free presentation.
    """

    name: str
    free: Presentation          # free presentation on the generators (no rules)
    relations: list             # NCPoly relation = 0 generators of the ideal

    def parse(self, text: str) -> NCPoly:
        return parse_element(text, self.free)

    def apply_images(self, e: NCPoly, images: dict, target: Presentation) -> NCPoly:
        out = NCPoly.zero()
        for w, c in e.terms.items():
            img = NCPoly.unit()
            for gname in w:
                img = img * images[gname]
            out = out + img.scale(c)
        return target.normal_form(out)


def sphere_system(params: Params, name: str = "sphere") -> RelationSystem:
    """The glued quantum two-sphere in abstract generators f1, f0, fm1.

    fm1*f1 - q*f1*fm1 = (p-q)*f0 + (1-p);  f0*f1 - p*f1*f0 = (1-p)*f1;
    fm1*f0 - p*f0*fm1 = (1-p)*fm1;  (1-f0)*(f1*fm1 - f0) = 0.
    """
    gens = [Generator("f1", 0), Generator("f0", 0), Generator("fm1", 0)]
    free = Presentation(name, {g.name: g for g in gens},
                        MonomialOrder(("fm1", "f0", "f1")), [])
    sc = params.scalar
    g = NCPoly.gen
    p, q = sc("p"), sc("q")
    one = ParamScalar.from_int(1)
    rels = [
        g("fm1") * g("f1") - (g("f1") * g("fm1")).scale(q)
        - NCPoly.gen("f0").scale(p - q) - NCPoly.unit(one - p),
        g("f0") * g("f1") - (g("f1") * g("f0")).scale(p) - g("f1").scale(one - p),
        g("fm1") * g("f0") - (g("f0") * g("fm1")).scale(p) - g("fm1").scale(one - p),
        (NCPoly.unit() - g("f0")) * (g("f1") * g("fm1") - g("f0")),
    ]
    return RelationSystem(name, free, rels)


def pone_system(params: Params, name: str = "pone") -> RelationSystem:
    """The total space of the winding-1 bundle in abstract generators
    a, as, b, bs (two commuting quantum discs glued by (1-a*as)*(1-b*bs) = 0)."""
    gens = [Generator("a", 0), Generator("as", 0),
            Generator("b", 0), Generator("bs", 0)]
    free = Presentation(name, {g.name: g for g in gens},
                        MonomialOrder(("as", "a", "bs", "b")), [])
    sc = params.scalar
    g = NCPoly.gen
    p, q = sc("p"), sc("q")
    one = ParamScalar.from_int(1)
    rels = [
        g("as") * g("a") - (g("a") * g("as")).scale(q) - NCPoly.unit(one - q),
        g("bs") * g("b") - (g("b") * g("bs")).scale(p) - NCPoly.unit(one - p),
        g("b") * g("a") - g("a") * g("b"),
        g("b") * g("as") - g("as") * g("b"),
        g("bs") * g("a") - g("a") * g("bs"),
        g("bs") * g("as") - g("as") * g("bs"),
        (NCPoly.unit() - g("a") * g("as")) * (NCPoly.unit() - g("b") * g("bs")),
    ]
    return RelationSystem(name, free, rels)
