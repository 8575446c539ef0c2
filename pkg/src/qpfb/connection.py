"""Connections from local connection-form data: covariant derivative,
horizontal projection, connection and curvature forms, local curvature,
structure equation, the left/right bijection, and difference-map checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .bundle import BundleData, BundleElement, Chart
from .dga import differentiate, differentiate_free, embed, split_legs
from .freealg import AlgebraError, Morphism, NCPoly, Presentation
from .hopf import FunctionalPair, HopfData, RightIdealData
from .reports import CheckItem
from .scalars import ONE, ZERO, ParamScalar


class ConnectionError(AlgebraError):
    pass


@dataclass
class XExpansionForm:
    """Local connection form in rank-one expansion: A(h) = X(h) * omega."""

    functionals: FunctionalPair
    omega: NCPoly               # degree-1 element of the chart base calculus

    def __call__(self, h: NCPoly) -> NCPoly:
        return self.omega.scale(self.functionals.x(h))


@dataclass
class PulledBackForm:
    """A composed with a Hopf-algebra map (used for A_r = -A_l o S)."""

    inner: Callable
    pre: Morphism
    negate: bool = True

    def __call__(self, h: NCPoly) -> NCPoly:
        v = self.inner(self.pre(h))
        return -v if self.negate else v


@dataclass
class ConnectionData:
    """A left or right connection given by local maps A_i: H -> Gamma^1(B_i)."""

    bundle: BundleData
    hopf: HopfData
    right_ideal: RightIdealData
    handedness: str                      # "left" | "right"
    local_forms: tuple                   # (A_1, A_2) callables NCPoly -> NCPoly

    def chart(self, i: int) -> Chart:
        return self.bundle.chart1 if i == 1 else self.bundle.chart2

    def local_form(self, i: int):
        return self.local_forms[i - 1]


def right_from_left(c: ConnectionData) -> ConnectionData:
    """The right connection with A_r = -A_l o S."""
    if c.handedness != "left":
        raise ConnectionError("right_from_left expects a left connection")
    forms = tuple(PulledBackForm(A, c.hopf.antipode) for A in c.local_forms)
    return ConnectionData(c.bundle, c.hopf, c.right_ideal, "right", forms)


# -- elementwise machinery ---------------------------------------------------------

def _chart_split(chart: Chart, e: NCPoly):
    """Split a chart element into (coef, base word, hopf-leg word) triples."""
    return [(cf, legs[0], legs[1]) for cf, legs in split_legs(e, chart.tensor)]


def _assemble(chart: Chart, base: NCPoly, hleg: NCPoly) -> NCPoly:
    return chart.tensor.normal_form(
        embed(base, chart.tensor, 0) * embed(hleg, chart.tensor, 1))


def _require_horizontal(chart: Chart, parts):
    for _, _, wh in parts:
        for g in wh:
            if chart.hopf_calc.generators[g].degree > 0:
                raise ConnectionError(
                    f"element is not horizontal: {g} in the fibre leg")


def covariant_derivative(c: ConnectionData, elem: NCPoly, chart_index: int
                         ) -> NCPoly:
    """D on horizontal chart elements.

    Left:  D(gamma (x) h) = d gamma (x) h + (-1)^(n+1) sum gamma A(h1) (x) h2.
    Right: D(gamma (x) h) = d gamma (x) h + (-1)^(n+1) sum A(h1) gamma (x) h2.
    """
    chart = c.chart(chart_index)
    A = c.local_form(chart_index)
    H = c.hopf
    parts = _chart_split(chart, elem)
    _require_horizontal(chart, parts)
    out = NCPoly.zero()
    for cf, wb, wh in parts:
        n = chart.base.degree_of_word(wb)
        gamma = NCPoly.word(wb)
        dterm = _assemble(chart, differentiate(gamma, chart.base),
                          NCPoly.word(wh)).scale(cf)
        out = out + dterm
        sgn = (-1) ** (n + 1)
        for c2, w1, w2 in H.sweedler(NCPoly.word(wh), 2):
            a_val = A(NCPoly.word(w1))
            if a_val.is_zero():
                continue
            body = gamma * a_val if c.handedness == "left" else a_val * gamma
            out = out + _assemble(chart, body, NCPoly.word(w2)).scale(cf * c2 * sgn)
    return chart.tensor.normal_form(out)


def bundle_covariant_derivative(c: ConnectionData, f: BundleElement) -> BundleElement:
    return BundleElement(covariant_derivative(c, f.f1, 1),
                         covariant_derivative(c, f.f2, 2))


def _vertical_decompose(calc: Presentation, w):
    """Write a degree-1 word of the fibre calculus as sum c * h * d(k).

    Peels trailing degree-0 letters with d(k) t = d(k t) - k d(t); the
    result is a list of (coef, h word, k word) with k a degree-0 word.
    """
    dpos = [i for i, g in enumerate(w) if calc.generators[g].degree > 0]
    if len(dpos) != 1:
        raise ConnectionError(f"expected exactly one differential letter in {w}")
    i = dpos[0]
    head, dlet, tail = w[:i], w[i], w[i + 1:]
    base = calc.generators[dlet].base
    parts = [(ONE, head, (base,))]
    for t in tail:
        nxt = []
        for cf, h, k in parts:
            nxt.append((cf, h, k + (t,)))
            nxt.append((-cf, h + k, (t,)))
        parts = nxt
    return parts


def horizontal_projection(c: ConnectionData, elem: NCPoly, chart_index: int
                          ) -> NCPoly:
    """Projection of degree-1 chart forms onto the horizontal submodule.

    Fixes Gamma^1(B_i) (x) H; on the vertical part
    a (x) h dk -> -sum a A(k1) (x) h k2         (left case)
    a (x) h dk -> (-sum A((hk)1) (x) (hk)2 + sum A(h1) (x) h2 k) a  (right case).
    """
    chart = c.chart(chart_index)
    A = c.local_form(chart_index)
    H = c.hopf
    out = NCPoly.zero()
    for cf, legs in split_legs(elem, chart.tensor):
        wb, wh = legs
        nb = chart.base.degree_of_word(wb)
        nh = chart.hopf_calc.degree_of_word(wh)
        if nb + nh != 1:
            raise ConnectionError("horizontal projection expects total degree 1")
        if nh == 0:
            out = out + _assemble(chart, NCPoly.word(wb), NCPoly.word(wh)).scale(cf)
            continue
        for c2, h, k in _vertical_decompose(chart.hopf_calc, wh):
            if c.handedness == "left":
                for c3, w1, w2 in H.sweedler(NCPoly.word(k), 2):
                    val = NCPoly.word(wb) * A(NCPoly.word(w1))
                    out = out + _assemble(
                        chart, val,
                        NCPoly.word(h) * NCPoly.word(w2)).scale(-cf * c2 * c3)
            else:
                hk = H.algebra.normal_form(NCPoly.word(h) * NCPoly.word(k))
                for c3, w1, w2 in H.sweedler(hk, 2):
                    out = out + _assemble(
                        chart, A(NCPoly.word(w1)) * NCPoly.word(wb),
                        NCPoly.word(w2)).scale(-cf * c2 * c3)
                for c3, w1, w2 in H.sweedler(NCPoly.word(h), 2):
                    out = out + _assemble(
                        chart, A(NCPoly.word(w1)) * NCPoly.word(wb),
                        NCPoly.word(w2) * NCPoly.word(k)).scale(cf * c2 * c3)
    return chart.tensor.normal_form(out)


# -- connection and curvature forms ----------------------------------------------

def connection_form(c: ConnectionData, h: NCPoly, chart_index: int) -> NCPoly:
    """Chart value of the (pre-)connection form.

    Left:  chi_i(omega(h)) = -sum 1 (x) S(h1) d(h2) - sum A(h2) (x) S(h1) h3.
    Right: chi_i(omega(h)) = -sum 1 (x) (d h2) S^-1(h1) - sum A(h2) (x) h3 S^-1(h1).
    """
    chart = c.chart(chart_index)
    A = c.local_form(chart_index)
    H = c.hopf
    calc = chart.hopf_calc
    out = NCPoly.zero()
    if c.handedness == "left":
        for cf, w1, w2 in H.sweedler(h, 2):
            theta = H.antipode(NCPoly.word(w1)) * differentiate_free(
                NCPoly.word(w2), calc)
            out = out - _assemble(chart, NCPoly.unit(), theta).scale(cf)
        for cf, w1, w2, w3 in H.sweedler(h, 3):
            out = out - _assemble(
                chart, A(NCPoly.word(w2)),
                H.antipode(NCPoly.word(w1)) * NCPoly.word(w3)).scale(cf)
    else:
        Sinv = H.inverse_antipode
        for cf, w1, w2 in H.sweedler(h, 2):
            theta = differentiate_free(NCPoly.word(w2), calc) * Sinv(
                NCPoly.word(w1))
            out = out - _assemble(chart, NCPoly.unit(), theta).scale(cf)
        for cf, w1, w2, w3 in H.sweedler(h, 3):
            out = out - _assemble(
                chart, A(NCPoly.word(w2)),
                NCPoly.word(w3) * Sinv(NCPoly.word(w1))).scale(cf)
    return chart.tensor.normal_form(out)


def curvature_form(c: ConnectionData, h: NCPoly, chart_index: int) -> NCPoly:
    """Structure equation: Omega(h) = d omega(h) -+ omega products.

    Left: d omega(h) - sum omega(h1) omega(h2);
    right: d omega(h) + sum omega(h2) omega(h1).
    """
    chart = c.chart(chart_index)
    H = c.hopf
    out = differentiate(connection_form(c, h, chart_index), chart.tensor)
    for cf, w1, w2 in H.sweedler(h, 2):
        o1 = connection_form(c, NCPoly.word(w1), chart_index)
        o2 = connection_form(c, NCPoly.word(w2), chart_index)
        if c.handedness == "left":
            out = out - (o1 * o2).scale(cf)
        else:
            out = out + (o2 * o1).scale(cf)
    return chart.tensor.normal_form(out)


def curvature_F(c: ConnectionData, h: NCPoly, chart_index: int) -> NCPoly:
    """Local curvature in the chart base calculus.

    Left: F(h) = dA(h) + sum A(h1) A(h2); right: F(h) = dA(h) - sum A(h2) A(h1).
    """
    chart = c.chart(chart_index)
    A = c.local_form(chart_index)
    H = c.hopf
    out = differentiate(A(h), chart.base)
    for cf, w1, w2 in H.sweedler(h, 2):
        prod = A(NCPoly.word(w1)) * A(NCPoly.word(w2)) if c.handedness == "left" \
            else -(A(NCPoly.word(w2)) * A(NCPoly.word(w1)))
        out = out + prod.scale(cf)
    return chart.base.normal_form(out)


def curvature_form_via_F(c: ConnectionData, h: NCPoly, chart_index: int) -> NCPoly:
    """Independent route: Omega(h) = -sum F(h2) (x) S(h1) h3 (left),
    -sum F(h2) (x) h3 S^-1(h1) (right)."""
    chart = c.chart(chart_index)
    H = c.hopf
    out = NCPoly.zero()
    for cf, w1, w2, w3 in H.sweedler(h, 3):
        F = curvature_F(c, NCPoly.word(w2), chart_index)
        if c.handedness == "left":
            hpart = H.antipode(NCPoly.word(w1)) * NCPoly.word(w3)
        else:
            hpart = NCPoly.word(w3) * H.inverse_antipode(NCPoly.word(w1))
        out = out - _assemble(chart, F, hpart).scale(cf)
    return chart.tensor.normal_form(out)


# -- checks -----------------------------------------------------------------------

def _connection_samples(degree: int):
    out = [NCPoly.unit()]
    for k in range(1, degree + 1):
        out.append(NCPoly.word(("alpha",) * k))
        out.append(NCPoly.word(("alphas",) * k))
    return out


def check_connection(c: ConnectionData, sample_degree: int = 4):
    """Local-connection-form conditions, sampled on monomials.

    A(1) = 0; the right ideal (S^-1 of it, in the right case) is killed by
    every A_i; and the local forms glue across the overlap by
    pi(A_1(h)) = sum tau12(h1) pi(A_2(h2)) tau21(h3) + sum tau12(h1) d tau21(h2).
    """
    H = c.hopf
    b = c.bundle
    gm = b.covering.overlap
    items = []
    res = []
    for i in (1, 2):
        v = c.local_form(i)(NCPoly.unit())
        if not v.is_zero():
            res.append((i, v))
    items.append(CheckItem("unit annihilation", "A_i(1) = 0",
                           "fail" if res else "pass",
                           str(res[0][1]) if res else None,
                           notes=["sampled"]))
    kern = []
    samples = _connection_samples(sample_degree)
    for r in c.right_ideal.generators:
        r_eff = r if c.handedness == "left" else H.inverse_antipode(r)
        for h in samples:
            arg = H.algebra.normal_form(r_eff * h)
            for i in (1, 2):
                v = c.local_form(i)(arg)
                if not v.is_zero():
                    kern.append(((i, arg), v))
    law = "R subset ker A_i" if c.handedness == "left" \
        else "S^-1(R) subset ker A_i"
    items.append(CheckItem("kernel condition", law,
                           "fail" if kern else "pass",
                           str(kern[0][1]) if kern else None,
                           notes=["sampled"]))
    tau12 = b.transition.tau("12", gm)
    tau21 = b.transition.tau("21", gm)
    glue = []
    all_zero = True
    for h in samples:
        lhs = b.covering.proj1(c.local_form(1)(h))
        rhs = NCPoly.zero()
        for cf, w1, w2, w3 in H.sweedler(h, 3):
            rhs = rhs + (tau12(NCPoly.word(w1))
                         * b.covering.proj2(c.local_form(2)(NCPoly.word(w2)))
                         * tau21(NCPoly.word(w3))).scale(cf)
        for cf, w1, w2 in H.sweedler(h, 2):
            rhs = rhs + (tau12(NCPoly.word(w1))
                         * differentiate(tau21(NCPoly.word(w2)), gm)).scale(cf)
        diff = gm.normal_form(lhs - rhs)
        if not (gm.normal_form(lhs).is_zero() and gm.normal_form(rhs).is_zero()):
            all_zero = False
        if not diff.is_zero():
            glue.append((h, diff))
    notes = ["sampled"]
    if all_zero:
        notes.append("both sides vanish: overlap calculus has no degree-1 part")
    items.append(CheckItem(
        "local form gluing",
        "pi(A_1(h)) = sum tau12(h1) pi(A_2(h2)) tau21(h3) + sum tau12(h1) d tau21(h2)",
        "fail" if glue else "pass",
        str(glue[0][1]) if glue else None, notes=notes))
    items.append(CheckItem(
        "trivialization kernels", "D preserves chart kernels", "vacuous",
        notes=["holds by representation: elements are stored chart-wise"]))
    return items


def check_structure_equation(c: ConnectionData, samples, chart_index: int):
    """D^2(gamma) = sum gamma_0 Omega(gamma_1) (left) or
    sum Omega(gamma_1) gamma_0 (right), on horizontal samples."""
    chart = c.chart(chart_index)
    H = c.hopf
    items = []
    for e in samples:
        lhs = covariant_derivative(
            c, covariant_derivative(c, e, chart_index), chart_index)
        rhs = NCPoly.zero()
        for cf, legs in split_legs(chart.coaction(e), chart.t3):
            body = _assemble(chart, NCPoly.word(legs[0]), NCPoly.word(legs[1]))
            om = curvature_form(c, NCPoly.word(legs[2]), chart_index)
            prod = body * om if c.handedness == "left" else om * body
            rhs = rhs + prod.scale(cf)
        diff = chart.tensor.normal_form(lhs - rhs)
        items.append(CheckItem(
            f"structure equation chart {chart_index}: {e}",
            "D^2(gamma) = curvature pairing",
            "pass" if diff.is_zero() else "fail",
            None if diff.is_zero() else str(diff)))
    return items


def check_curvature_gluing(c: ConnectionData, sample_degree: int = 3):
    """pi(F_1(h)) = sum tau12(h1) pi(F_2(h2)) tau21(h3), in the overlap."""
    H = c.hopf
    b = c.bundle
    gm = b.covering.overlap
    tau12 = b.transition.tau("12", gm)
    tau21 = b.transition.tau("21", gm)
    fails = []
    all_zero = True
    for h in _connection_samples(sample_degree):
        lhs = b.covering.proj1(curvature_F(c, h, 1))
        rhs = NCPoly.zero()
        for cf, w1, w2, w3 in H.sweedler(h, 3):
            rhs = rhs + (tau12(NCPoly.word(w1))
                         * b.covering.proj2(curvature_F(c, NCPoly.word(w2), 2))
                         * tau21(NCPoly.word(w3))).scale(cf)
        if not (gm.normal_form(lhs).is_zero() and gm.normal_form(rhs).is_zero()):
            all_zero = False
        diff = gm.normal_form(lhs - rhs)
        if not diff.is_zero():
            fails.append((h, diff))
    notes = ["sampled"]
    if all_zero:
        notes.append("both sides vanish: overlap calculus has no degree-2 part")
    return [CheckItem("curvature gluing",
                      "pi(F_1(h)) = sum tau12(h1) pi(F_2(h2)) tau21(h3)",
                      "fail" if fails else "pass",
                      str(fails[0][1]) if fails else None, notes=notes)]


def check_difference_map(cA: ConnectionData, cB: ConnectionData, samples):
    """Difference C = D_A - D_B of two covariant derivatives on one bundle:
    C(1) = 0, module linearity over base forms, covariance under the
    coaction, chart-kernel preservation (structural)."""
    if cA.bundle is not cB.bundle or cA.handedness != cB.handedness:
        raise ConnectionError("difference map needs connections on one bundle")
    items = []

    def C(e, i):
        return cA.chart(i).tensor.normal_form(
            covariant_derivative(cA, e, i) - covariant_derivative(cB, e, i))

    v = [C(NCPoly.unit(), i) for i in (1, 2)]
    items.append(CheckItem("difference annihilates the unit", "C(1) = 0",
                           "pass" if all(x.is_zero() for x in v) else "fail",
                           None if all(x.is_zero() for x in v) else str(v)))
    fails = []
    for i in (1, 2):
        chart = cA.chart(i)
        base_forms = [NCPoly.gen(g.name) for g in chart.base.generators.values()]
        for gb in base_forms:
            n = chart.base.degrees(gb)[0]
            for e in samples:
                lhs_arg = chart.tensor.normal_form(embed(gb, chart.tensor, 0) * e)
                if cA.handedness == "left":
                    lhs = C(lhs_arg, i)
                    rhs = (embed(gb, chart.tensor, 0) * C(e, i)).scale((-1) ** n)
                else:
                    ne = _total_degree(chart, e)
                    lhs = C(chart.tensor.normal_form(e * embed(gb, chart.tensor, 0)), i)
                    rhs = (C(e, i) * embed(gb, chart.tensor, 0)).scale((-1) ** ne)
                diff = chart.tensor.normal_form(lhs - rhs)
                if not diff.is_zero():
                    fails.append((i, gb, e, diff))
    items.append(CheckItem("module linearity",
                           "C(iota(gamma) e) = (-1)^n gamma C(e)",
                           "fail" if fails else "pass",
                           str(fails[0][3]) if fails else None,
                           notes=["sampled"]))
    cov_fails = []
    for i in (1, 2):
        chart = cA.chart(i)
        for e in samples:
            lhs = chart.coaction(C(e, i))
            rhs = NCPoly.zero()
            for cf, legs in split_legs(chart.coaction(e), chart.t3):
                body = _assemble(chart, NCPoly.word(legs[0]), NCPoly.word(legs[1]))
                ce = C(body, i)
                rhs = rhs + _into_t3(chart, ce, NCPoly.word(legs[2])).scale(cf)
            diff = chart.t3.normal_form(lhs - rhs)
            if not diff.is_zero():
                cov_fails.append((i, e, diff))
    items.append(CheckItem("covariance", "(C (x) id) Delta = Delta C",
                           "fail" if cov_fails else "pass",
                           str(cov_fails[0][2]) if cov_fails else None,
                           notes=["sampled"]))
    items.append(CheckItem("chart kernels", "C preserves chart kernels",
                           "vacuous",
                           notes=["holds by representation: chart-wise storage"]))
    return items


def _total_degree(chart: Chart, e: NCPoly) -> int:
    degs = chart.tensor.degrees(e)
    return degs[0] if degs else 0


def _into_t3(chart: Chart, chart_elem: NCPoly, hopf_tail: NCPoly) -> NCPoly:
    """Inject a chart element into t3 legs (0,1) and multiply an H tail."""
    out = NCPoly.zero()
    for cf, legs in split_legs(chart_elem, chart.tensor):
        body = embed(NCPoly.word(legs[0]), chart.t3, 0) \
            * embed(NCPoly.word(legs[1]), chart.t3, 1)
        out = out + (body * embed(hopf_tail, chart.t3, 2)).scale(cf)
    return chart.t3.normal_form(out)
