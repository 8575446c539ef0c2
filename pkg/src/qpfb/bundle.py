"""Two-chart coverings and gluings: transition-function validation, gluing
isomorphisms, the reconstructed bundle as compatible chart pairs, its
coaction and base embedding, the glued overlap calculus, and bounded
coinvariant computation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .catalog import RelationSystem
from .dga import (close_differential_ideal, differentiate, differentiate_free,
                  embed, skew_tensor, split_legs, tensor_morphism)
from .freealg import (AlgebraError, Morphism, NCPoly, Presentation, SpanSolver,
                      check_morphism, ideal_membership_bounded, nullspace)
from .hopf import HopfData, RightIdealData
from .reports import CheckItem
from .scalars import ONE, ZERO, ParamScalar


class BundleError(AlgebraError):
    pass


# -- coverings and transitions ---------------------------------------------------

@dataclass
class CoveringData:
    """Two chart calculi, the overlap, and the calculus-level projections."""

    chart1: Presentation        # Gamma(B_1)
    chart2: Presentation        # Gamma(B_2)
    overlap: Presentation       # glued overlap calculus Gamma_m(B_12)
    proj1: Morphism             # Gamma(B_1) -> overlap
    proj2: Morphism             # Gamma(B_2) -> overlap

    def __post_init__(self):
        hit = {g for img in list(self.proj1.images.values())
               + list(self.proj2.images.values()) for w in img.words() for g in w}
        missing = set(self.overlap.generators) - hit
        if missing:
            raise BundleError(f"projections not surjective on generators: {missing}")


@dataclass
class TransitionData:
    """Transition functions as generator-image maps H -> B_12."""

    hopf: HopfData
    tau12_images: dict          # H gen -> NCPoly over overlap deg-0 names
    tau21_images: dict

    def tau(self, which: str, target: Presentation) -> Morphism:
        images = self.tau12_images if which == "12" else self.tau21_images
        return Morphism(self.hopf.algebra, target, images, name=f"tau{which}")


def _sample_powers(degree: int):
    """Monomial samples 1, alpha^k, alphas^k for 1 <= k <= degree."""
    out = [NCPoly.unit()]
    for k in range(1, degree + 1):
        out.append(NCPoly.word(("alpha",) * k))
        out.append(NCPoly.word(("alphas",) * k))
    return out


def check_transition(t: TransitionData, covering: CoveringData,
                     sample_degree: int = 4):
    """Validate the transition-function conditions on monomial samples.

    Convolution inverse, antipode relation, and centrality are verified in
    the overlap; the triple-overlap cocycle is vacuous for two charts and
    reported as such rather than silently passing.
    """
    H = t.hopf
    overlap = covering.overlap
    tau12 = t.tau("12", overlap)
    tau21 = t.tau("21", overlap)
    items = []
    for name, m in (("tau12 well-defined", tau12), ("tau21 well-defined", tau21)):
        rep = check_morphism(m)
        items.append(CheckItem(name, "tau is an algebra map H -> B12",
                               "pass" if rep.ok else "fail",
                               None if rep.ok else str(rep.failures)))
    samples = _sample_powers(sample_degree)
    conv_res = []
    for h in samples:
        acc = NCPoly.zero()
        for c, w1, w2 in H.sweedler(h, 2):
            acc = acc + (tau12(NCPoly.word(w1)) * tau21(NCPoly.word(w2))).scale(c)
        acc = overlap.normal_form(acc - NCPoly.unit(H.counit(h)))
        if not acc.is_zero():
            conv_res.append(acc)
    items.append(CheckItem("convolution inverse",
                           "sum tau12(h1) tau21(h2) = eps(h) 1",
                           "fail" if conv_res else "pass",
                           str(conv_res[0]) if conv_res else None))
    anti_res = []
    for h in samples:
        r = overlap.normal_form(tau21(H.antipode(h)) - tau12(h))
        if not r.is_zero():
            anti_res.append(r)
    items.append(CheckItem("antipode relation", "tau21(S(h)) = tau12(h)",
                           "fail" if anti_res else "pass",
                           str(anti_res[0]) if anti_res else None))
    cen_res = []
    deg0 = [g.name for g in overlap.generators.values() if g.degree == 0]
    for h in samples:
        for tau in (tau12, tau21):
            th = tau(h)
            for a in deg0:
                r = overlap.normal_form(th * NCPoly.gen(a) - NCPoly.gen(a) * th)
                if not r.is_zero():
                    cen_res.append(r)
    items.append(CheckItem("centrality", "tau(h) a = a tau(h) for a in B12",
                           "fail" if cen_res else "pass",
                           str(cen_res[0]) if cen_res else None))
    items.append(CheckItem("diagonal normalization", "tau_ii = eps 1", "vacuous",
                           notes=["identity-chart transitions are not stored"]))
    items.append(CheckItem("triple cocycle", "cocycle condition on triple overlaps",
                           "vacuous", notes=["two-chart covering: no triple overlaps"]))
    return items


# -- charts, gluing isomorphisms, bundle -----------------------------------------

@dataclass
class Chart:
    """One trivialization: the chart calculus tensor and its structure maps."""

    index: int
    base: Presentation          # Gamma(B_i)
    hopf_calc: Presentation     # Gamma(H)
    tensor: Presentation        # Gamma(B_i) (x) Gamma(H)
    t3: Presentation            # Gamma(B_i) (x) Gamma(H) (x) H
    coaction: Morphism          # tensor -> t3 (id (x) Delta)
    body_names: tuple           # per body leg: factor generator -> tensor generator
    hopf_name_in_chart: dict    # H generator -> tensor generator name

    def base_elem(self, e: NCPoly) -> NCPoly:
        return embed(e, self.tensor, 0)

    def hopf_elem(self, e: NCPoly) -> NCPoly:
        return embed(e, self.tensor, 1)

    def horizontal(self, e: NCPoly) -> bool:
        """No Gamma(H) differentials in any normal-form word."""
        e = self.tensor.normal_form(e)
        for w in e.words():
            for g in w:
                gen = self.tensor.generators[g]
                if gen.degree > 0 and self.tensor.tensor.leg_of[g] == 1:
                    return False
        return True


def build_chart(index: int, base_calc: Presentation, hopf_calc: Presentation,
                H: HopfData) -> Chart:
    tensor = skew_tensor(base_calc, hopf_calc,
                         name=f"chart{index}")
    t3 = skew_tensor(base_calc, hopf_calc, H.algebra, name=f"chart{index}x H")
    # id (x) Delta on generators; the H-leg coproduct acts on Gamma(H) by
    # Delta_Gamma(h0 dh1) = Delta(h0)(d (x) id)Delta(h1)
    leg0 = {g: embed(NCPoly.gen(g), t3, 0) for g in base_calc.generators}
    leg1 = {}
    for g, gen in hopf_calc.generators.items():
        if gen.degree == 0:
            img = NCPoly.zero()
            for c, w1, w2 in H.sweedler(NCPoly.gen(g), 2):
                img = img + (embed(NCPoly.word(w1), t3, 1)
                             * embed(NCPoly.word(w2), t3, 2)).scale(c)
            leg1[g] = img
        else:
            img = NCPoly.zero()
            for c, w1, w2 in H.sweedler(NCPoly.gen(gen.base), 2):
                d1 = differentiate_free(embed(NCPoly.word(w1), t3, 1), t3)
                img = img + (d1 * embed(NCPoly.word(w2), t3, 2)).scale(c)
            leg1[g] = img
    coaction = tensor_morphism(tensor, t3, [leg0, leg1], name=f"coact{index}")
    body_names = (dict(tensor.tensor.tensor_name[0]),
                  dict(tensor.tensor.tensor_name[1]))
    hopf_name_in_chart = {g: tensor.tensor.tensor_name[1][g]
                          for g in H.algebra.generators}
    return Chart(index, base_calc, hopf_calc, tensor, t3, coaction,
                 body_names, hopf_name_in_chart)


@dataclass(frozen=True)
class BundleElement:
    """A bundle element in the gluing picture: one value per chart."""

    f1: NCPoly
    f2: NCPoly

    def __add__(self, other):
        return BundleElement(self.f1 + other.f1, self.f2 + other.f2)

    def __sub__(self, other):
        return BundleElement(self.f1 - other.f1, self.f2 - other.f2)

    def __mul__(self, other):
        if isinstance(other, BundleElement):
            return BundleElement(self.f1 * other.f1, self.f2 * other.f2)
        return BundleElement(self.f1.scale(other), self.f2.scale(other))

    def __str__(self):
        return f"({self.f1}, {self.f2})"


@dataclass
class BundleData:
    """The glued bundle: charts, transition data, gluing isomorphisms."""

    covering: CoveringData
    transition: TransitionData
    chart1: Chart
    chart2: Chart
    overlap_tensor: Presentation        # Gamma_m(B12) (x) Gamma(H)
    proj_tensor1: Morphism              # chart1.tensor -> overlap_tensor
    proj_tensor2: Morphism
    phi12: Morphism                     # overlap_tensor -> overlap_tensor
    phi21: Morphism
    base: Optional[RelationSystem] = None
    base_images1: Optional[dict] = None  # base gen -> NCPoly in Gamma(B_1)
    base_images2: Optional[dict] = None

    def charts(self):
        return (self.chart1, self.chart2)

    def normal_form(self, f: BundleElement) -> BundleElement:
        return BundleElement(self.chart1.tensor.normal_form(f.f1),
                             self.chart2.tensor.normal_form(f.f2))


def phi_iso(t: TransitionData, overlap_tensor: Presentation,
            direction: str) -> Morphism:
    """The gluing isomorphism phi_ij(a (x) h) = sum a tau_ji(h1) (x) h2.

    Defined on generators of the overlap chart tensor; fixes a (x) 1 and
    extends to differentials by commuting with d.
    """
    H = t.hopf
    tau_images = t.tau21_images if direction == "12" else t.tau12_images
    overlap_calc = overlap_tensor.tensor.factors[0]
    tau = Morphism(H.algebra, overlap_calc, tau_images, name=f"tau({direction})")
    leg0 = {g: embed(NCPoly.gen(g), overlap_tensor, 0)
            for g in overlap_calc.generators}
    leg1 = {}
    hopf_calc = overlap_tensor.tensor.factors[1]
    for g, gen in hopf_calc.generators.items():
        if gen.degree == 0:
            img = NCPoly.zero()
            for c, w1, w2 in H.sweedler(NCPoly.gen(g), 2):
                img = img + (embed(tau(NCPoly.word(w1)), overlap_tensor, 0)
                             * embed(NCPoly.word(w2), overlap_tensor, 1)).scale(c)
            leg1[g] = img
    for g, gen in hopf_calc.generators.items():
        if gen.degree > 0:
            leg1[g] = differentiate(leg1[gen.base], overlap_tensor)
    return tensor_morphism(overlap_tensor, overlap_tensor, [leg0, leg1],
                           name=f"phi{direction}")


def build_bundle(covering: CoveringData, transition: TransitionData,
                 hopf_calc: Presentation,
                 base: Optional[RelationSystem] = None,
                 base_images1: Optional[dict] = None,
                 base_images2: Optional[dict] = None) -> BundleData:
    H = transition.hopf
    chart1 = build_chart(1, covering.chart1, hopf_calc, H)
    chart2 = build_chart(2, covering.chart2, hopf_calc, H)
    overlap_tensor = skew_tensor(covering.overlap, hopf_calc, name="overlap_chart")
    leg1_id = {}
    for g in hopf_calc.generators:
        leg1_id[g] = embed(NCPoly.gen(g), overlap_tensor, 1)
    pt1 = tensor_morphism(
        chart1.tensor, overlap_tensor,
        [{g: embed(covering.proj1.images[g], overlap_tensor, 0)
          for g in covering.chart1.generators}, leg1_id],
        name="proj1(x)id")
    pt2 = tensor_morphism(
        chart2.tensor, overlap_tensor,
        [{g: embed(covering.proj2.images[g], overlap_tensor, 0)
          for g in covering.chart2.generators}, leg1_id],
        name="proj2(x)id")
    phi12 = phi_iso(transition, overlap_tensor, "12")
    phi21 = phi_iso(transition, overlap_tensor, "21")
    return BundleData(covering, transition, chart1, chart2, overlap_tensor,
                      pt1, pt2, phi12, phi21, base, base_images1, base_images2)


def is_bundle_element(f: BundleElement, b: BundleData):
    """Gluing compatibility: (proj1 (x) id)(f1) = phi12((proj2 (x) id)(f2)).

    Returns (ok, witness difference)."""
    lhs = b.proj_tensor1(f.f1)
    rhs = b.phi12(b.proj_tensor2(f.f2))
    diff = b.overlap_tensor.normal_form(lhs - rhs)
    return diff.is_zero(), diff


def coaction(f: BundleElement, b: BundleData, check: bool = True):
    """Componentwise id (x) Delta; optionally re-checks chart compatibility
    of the H-leg-stripped components."""
    c1 = b.chart1.coaction(f.f1)
    c2 = b.chart2.coaction(f.f2)
    if check:
        ren = (b.chart1.tensor.tensor.tensor_name, b.chart2.tensor.tensor.tensor_name)
        for (cc, chart) in ((c1, b.chart1), (c2, b.chart2)):
            names = ren[chart.index - 1]
            back = NCPoly.zero()
            for co, legs in split_legs(cc, chart.t3):
                eps = ONE
                for g in legs[2]:
                    eps = eps * b.transition.hopf.counit_values[g]
                body = [names[0][g] for g in legs[0]] + [names[1][g] for g in legs[1]]
                back = back + NCPoly.word(tuple(body), co * eps)
            if chart.tensor.normal_form(back) != chart.tensor.normal_form(
                    f.f1 if chart.index == 1 else f.f2):
                raise BundleError("coaction counit-compatibility failed")
    return c1, c2


def iota(base_elem: NCPoly, b: BundleData) -> BundleElement:
    """Embed a base element: (pi_1(a) (x) 1, pi_2(a) (x) 1)."""
    if b.base is None or b.base_images1 is None:
        raise BundleError("bundle carries no abstract base data")
    e1 = b.base.apply_images(base_elem, b.base_images1, b.covering.chart1)
    e2 = b.base.apply_images(base_elem, b.base_images2, b.covering.chart2)
    return BundleElement(b.chart1.base_elem(e1), b.chart2.base_elem(e2))


# -- the glued overlap calculus --------------------------------------------------

@dataclass
class OverlapIdealResult:
    jbij_ok: bool
    jbij_residues: list
    generators: list  # NCPoly in the universal overlap calculus


def jm_ideal(t: TransitionData, R: RightIdealData, covering_charts,
             overlap_universal: Presentation, proj_images,
             membership_bound: int = 6) -> OverlapIdealResult:
    """Generators of the glued differential ideal on the overlap.

    Three families: projected chart-calculus relations, the transition
    twists of the right ideal, and centrality of d(tau) images.  Requires
    the compatibility sum tau12(S(r1) r3) (x) r2 to stay inside B12 (x) R,
    checked first with the bounded right-ideal oracle.
    """
    H = t.hopf
    alg = H.algebra
    residues = []
    tensorBH = skew_tensor(overlap_universal, alg, name="B12(x)H")
    for r in R.generators:
        acc = NCPoly.zero()
        tau12 = t.tau("12", overlap_universal)
        for c, w1, w2, w3 in H.sweedler(r, 3):
            val = tau12(H.antipode(NCPoly.word(w1)) * NCPoly.word(w3))
            acc = acc + (embed(val, tensorBH, 0)
                         * embed(NCPoly.word(w2), tensorBH, 1)).scale(c)
        # group the H legs over the overlap basis and test right-ideal membership
        groups: dict = {}
        for c, (w1, w2) in split_legs(acc, tensorBH):
            cur = groups.get(w1, NCPoly.zero())
            groups[w1] = cur + NCPoly.word(w2, c)
        for w1, h_comp in groups.items():
            if not ideal_membership_bounded(h_comp, R.generators, alg,
                                            membership_bound, side="right"):
                residues.append((w1, h_comp))
    if residues:
        return OverlapIdealResult(False, residues, [])
    gens = []
    for chart_calc, images in zip(covering_charts, proj_images):
        for rule in chart_calc.rules:
            rel = NCPoly.word(rule.lhs) - rule.rhs
            img = NCPoly.zero()
            for w, c in rel.terms.items():
                acc = NCPoly.unit(c)
                for g in w:
                    acc = acc * images[g]
                img = img + acc
            gens.append(img)
    tau12 = t.tau("12", overlap_universal)
    tau21 = t.tau("21", overlap_universal)
    for r in R.generators:
        acc = NCPoly.zero()
        for c, w1, w2 in H.sweedler(r, 2):
            acc = acc + (tau21(NCPoly.word(w1))
                         * differentiate_free(tau12(NCPoly.word(w2)),
                                              overlap_universal)).scale(c)
        gens.append(acc)
    deg0 = [g.name for g in overlap_universal.generators.values() if g.degree == 0]
    for tau in (tau21, tau12):
        for hg in alg.generators:
            dth = differentiate_free(tau(NCPoly.gen(hg)), overlap_universal)
            for a in deg0:
                gens.append(dth * NCPoly.gen(a) - NCPoly.gen(a) * dth)
    return OverlapIdealResult(True, [], gens)


def build_overlap_calculus(result: OverlapIdealResult,
                           overlap_universal: Presentation,
                           extra=(), name: str = "overlap_m") -> Presentation:
    if not result.jbij_ok:
        raise BundleError(
            "right ideal fails the gluing compatibility; the general overlap "
            "calculus construction is not implemented")
    return close_differential_ideal(overlap_universal, result.generators,
                                    extra=extra, name=name)


# -- coinvariants -----------------------------------------------------------------

def chart_weights(chart: Chart, H: HopfData) -> dict:
    """Coaction weight of every chart generator (H = U(1) grading)."""
    weights = {}
    for g in chart.tensor.generators:
        img = chart.coaction(NCPoly.gen(g))
        parts = split_legs(img, chart.t3)
        if len(parts) != 1:
            raise BundleError(f"generator {g} is not coaction-homogeneous")
        _, legs = parts[0]
        w = 0
        for name in legs[2]:
            w += 1 if name == "alpha" else -1
        weights[g] = w
    return weights


def coinvariants_bounded(b: BundleData, length: int):
    """Basis of the coaction-invariant subspace at chart word length <= bound.

    Chart-wise weight filtering (invariant chart words are those of weight
    zero, i.e. pure base words) plus exact linear algebra for the gluing
    compatibility.  Returns a list of BundleElement.
    """
    H = b.transition.hopf
    cands = []
    vectors = []
    for chart, proj, sign in ((b.chart1, b.proj_tensor1, 1),
                              (b.chart2, b.proj_tensor2, -1)):
        weights = chart_weights(chart, H)
        for w in chart.tensor.irreducible_words(length, degree=0):
            if sum(weights[g] for g in w):
                continue
            cands.append((chart.index, w))
            img = proj(NCPoly.word(w))
            if sign < 0:
                img = b.phi12(img)
            vectors.append(img.scale(sign))
    combos = nullspace(vectors, b.overlap_tensor.order)
    out = []
    for combo in combos:
        f1, f2 = NCPoly.zero(), NCPoly.zero()
        for j, c in combo.items():
            idx, w = cands[j]
            if idx == 1:
                f1 = f1 + NCPoly.word(w, c)
            else:
                f2 = f2 + NCPoly.word(w, c)
        out.append(BundleElement(f1, f2))
    return out


def pair_vector(f: BundleElement, b: BundleData) -> NCPoly:
    """Encode a chart pair as a single vector (for span comparisons)."""
    t = {}
    for w, c in b.chart1.tensor.normal_form(f.f1).terms.items():
        t[("@1",) + w] = c
    for w, c in b.chart2.tensor.normal_form(f.f2).terms.items():
        t[("@2",) + w] = c
    return NCPoly._raw(t)


def pair_key(w):
    return (len(w), w)
