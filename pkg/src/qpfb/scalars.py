"""Exact coefficient field: rational functions over the integers in named parameters.

Scalars are quotients of multivariate integer polynomials in a fixed,
ordered set of parameter names (built-ins: p < q < nu).  Every scalar is
kept in canonical form from construction on: numerator and denominator
share no polynomial factor and the denominator's leading coefficient is
positive.  Canonical forms make equality a structural comparison, which
is what the rewriting engine leans on.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd

# Parameter registry.  The set is fixed per session: built-ins first, any
# further names in first-registration order.
_PARAM_INDEX: dict[str, int] = {"p": 0, "q": 1, "nu": 2}
_PARAM_NAMES: list[str] = ["p", "q", "nu"]


class ScalarError(ValueError):
    pass


def register_parameter(name: str) -> int:
    """Register an extra parameter name; returns its index."""
    if name not in _PARAM_INDEX:
        _PARAM_INDEX[name] = len(_PARAM_NAMES)
        _PARAM_NAMES.append(name)
    return _PARAM_INDEX[name]


def parameter_names() -> tuple[str, ...]:
    return tuple(_PARAM_NAMES)


def is_parameter(name: str) -> bool:
    return name in _PARAM_INDEX


# A monomial is a tuple of (parameter index, exponent>0) pairs, sorted by
# index; a polynomial is a dict monomial -> nonzero int coefficient.

_ONE: tuple = ()


def _mon_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = {}
    for i, e in a:
        out[i] = e
    for i, e in b:
        out[i] = out.get(i, 0) + e
    return tuple(sorted(out.items()))


def _mon_div(a, b):
    """a / b, or None if not divisible."""
    out = dict(a)
    for i, e in b:
        r = out.get(i, 0) - e
        if r < 0:
            return None
        if r == 0:
            out.pop(i, None)
        else:
            out[i] = r
    return tuple(sorted(out.items()))


def _mon_key(m, width):
    # deglex key: total degree, then exponents by parameter index.
    vec = [0] * width
    for i, e in m:
        vec[i] = e
    return (sum(e for _, e in m), tuple(vec))


def _poly_width(a):
    w = 0
    for m in a:
        for i, _ in m:
            if i + 1 > w:
                w = i + 1
    return w


def _lead(a, width=None):
    if width is None:
        width = _poly_width(a)
    m = max(a, key=lambda mm: _mon_key(mm, width))
    return m, a[m]


def _padd(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pneg(a):
    return {m: -c for m, c in a.items()}

def _psub(a, b):
    return _padd(a, _pneg(b))


def _pmul(a, b):
    if not a or not b:
        return {}
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mon_mul(m1, m2)
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _pscale(a, k):
    if k == 0:
        return {}
    return {m: c * k for m, c in a.items()}


def _int_content(a):
    g = 0
    for c in a.values():
        g = _igcd(g, abs(c))
        if g == 1:
            return 1
    return g or 1


def _mon_content(a):
    mons = iter(a)
    com = dict(next(mons))
    for m in mons:
        d = dict(m)
        for i in list(com):
            e = d.get(i, 0)
            if e < com[i]:
                if e == 0:
                    del com[i]
                else:
                    com[i] = e
        if not com:
            break
    return tuple(sorted(com.items()))


def _pdiv_mon(a, mon, k=1):
    """Divide by k * monomial (exact by construction)."""
    out = {}
    for m, c in a.items():
        out[_mon_div(m, mon)] = c // k
    return out


def _main_var(a):
    return max(i for m in a for i, _ in m)


def _to_univ(a, v):
    """Represent a as dense list of coefficient polys in variable v."""
    cofs: dict[int, dict] = {}
    for m, c in a.items():
        e = 0
        rest = []
        for i, ei in m:
            if i == v:
                e = ei
            else:
                rest.append((i, ei))
        cofs.setdefault(e, {})[tuple(rest)] = c
    deg = max(cofs)
    return [cofs.get(k, {}) for k in range(deg + 1)]


def _from_univ(lst, v):
    out = {}
    for e, poly in enumerate(lst):
        for m, c in poly.items():
            mm = _mon_mul(m, ((v, e),)) if e else m
            out[mm] = out.get(mm, 0) + c
    return {m: c for m, c in out.items() if c}


def _univ_trim(A):
    while A and not A[-1]:
        A.pop()
    return A


def _univ_content(A):
    g = {}
    for c in A:
        if c:
            g = _pgcd(g, c)
    return g


def _univ_scale(A, poly):
    return [_pmul(c, poly) for c in A]


def _univ_prem(A, B):
    """Pseudo-remainder of A by B (univariate, poly coefficients)."""
    A = list(A)
    db, lb = len(B) - 1, B[-1]
    while len(A) - 1 >= db and _univ_trim(A):
        da, la = len(A) - 1, A[-1]
        # lb*A - la*x^(da-db)*B
        A = [_pmul(c, lb) for c in A]
        shift = da - db
        for k, c in enumerate(B):
            A[k + shift] = _psub(A[k + shift], _pmul(la, c))
        A = _univ_trim(A)
        if len(A) - 1 == da and A:
            raise AssertionError("pseudo-division failed to reduce degree")
    return A


def _pgcd(a, b):
    """Gcd of integer polynomials, positive leading coefficient."""
    if not a:
        g = dict(b)
    elif not b:
        g = dict(a)
    else:
        ic = _igcd(_int_content(a), _int_content(b))
        ma, mb = _mon_content(a), _mon_content(b)
        mc = tuple(sorted((i, min(dict(ma).get(i, 0), dict(mb).get(i, 0)))
                          for i in set(dict(ma)) & set(dict(mb))
                          if min(dict(ma).get(i, 0), dict(mb).get(i, 0)) > 0))
        pa = _pdiv_mon(a, ma, _int_content(a))
        pb = _pdiv_mon(b, mb, _int_content(b))
        if len(pa) == 1 or len(pb) == 1:
            g = {mc: ic}
        else:
            v = max(_main_var(pa), _main_var(pb))
            g = _pmul({mc: ic}, _pgcd_univ(pa, pb, v))
    if not g:
        return g
    _, lc = _lead(g)
    if lc < 0:
        g = _pneg(g)
    return g


def _pgcd_univ(a, b, v):
    A, B = _to_univ(a, v), _to_univ(b, v)
    ca, cb = _univ_content(A), _univ_content(B)
    cont = _pgcd(ca, cb)
    A = [_pdivexact(c, ca) for c in A]
    B = [_pdivexact(c, cb) for c in B]
    if len(A) < len(B):
        A, B = B, A
    # primitive PRS
    while True:
        B = _univ_trim(B)
        if not B:
            g = A
            break
        if len(B) == 1:
            g = [{_ONE: 1}]
            break
        R = _univ_prem(A, B)
        if not _univ_trim(R):
            g = B
            break
        cr = _univ_content(R)
        A, B = B, [_pdivexact(c, cr) for c in R]
    cg = _univ_content(g)
    g = [_pdivexact(c, cg) for c in g]
    return _pmul(cont, _from_univ(g, v))


def _pdivexact(a, g):
    """Exact division a/g; raises if not exact."""
    if not a:
        return {}
    if g == {_ONE: 1}:
        return dict(a)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    width = max(_poly_width(a), _poly_width(g))
    mg, cg = _lead(g, width)
    rem = {m: Fraction(c) for m, c in a.items()}
    quo: dict = {}
    while rem:
        mr = max(rem, key=lambda mm: _mon_key(mm, width))
        t = _mon_div(mr, mg)
        if t is None:
            raise ScalarError("inexact polynomial division")
        fc = rem[mr] / cg
        quo[t] = quo.get(t, 0) + fc
        for m, c in g.items():
            mm = _mon_mul(m, t)
            s = rem.get(mm, 0) - fc * c
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    out = {}
    for m, c in quo.items():
        if c:
            if c.denominator != 1:
                raise ScalarError("inexact polynomial division")
            out[m] = int(c)
    return out


def _peval(a, values):
    total = Fraction(0)
    for m, c in a.items():
        t = Fraction(c)
        for i, e in m:
            t *= values[i] ** e
        total += t
    return total


def _pstr(a):
    if not a:
        return "0"
    width = _poly_width(a)
    mons = sorted(a, key=lambda m: _mon_key(m, width), reverse=True)
    parts = []
    for m in mons:
        c = a[m]
        factors = []
        if abs(c) != 1 or not m:
            factors.append(str(abs(c)))
        for i, e in m:
            nm = _PARAM_NAMES[i]
            factors.append(nm if e == 1 else f"{nm}^{e}")
        term = "*".join(factors)
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append((" + " if c > 0 else " - ") + term)
    return "".join(parts)


class ParamScalar:
    """Canonical rational function over the integers in the session parameters.

    Immutable after construction; all arithmetic returns canonical values.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = {_ONE: 1}
        if not den:
            raise ScalarError("zero denominator")
        if _canonical:
            self.num, self.den = num, den
            return
        if not num:
            self.num, self.den = {}, {_ONE: 1}
            return
        g = _pgcd(num, den)
        if g != {_ONE: 1}:
            num = _pdivexact(num, g)
            den = _pdivexact(den, g)
        _, lc = _lead(den)
        if lc < 0:
            num, den = _pneg(num), _pneg(den)
        self.num, self.den = num, den

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_int(k: int) -> "ParamScalar":
        return ParamScalar({_ONE: k} if k else {})

    @staticmethod
    def from_fraction(f) -> "ParamScalar":
        f = Fraction(f)
        return ParamScalar({_ONE: f.numerator} if f.numerator else {},
                           {_ONE: f.denominator})

    @staticmethod
    def parameter(name: str) -> "ParamScalar":
        if name not in _PARAM_INDEX:
            raise ScalarError(f"unknown parameter {name!r}")
        return ParamScalar({((_PARAM_INDEX[name], 1),): 1})

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == {_ONE: 1} and self.den == {_ONE: 1}

    def is_rational(self) -> bool:
        return (not self.num or set(self.num) == {_ONE}) and set(self.den) == {_ONE}

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError(f"{self} is not a rational constant")
        return Fraction(self.num.get(_ONE, 0), self.den[_ONE])

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if self.den == other.den:
            return ParamScalar(_padd(self.num, other.num), dict(self.den))
        return ParamScalar(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __neg__(self):
        return ParamScalar(_pneg(self.num), dict(self.den), _canonical=True)

    def __mul__(self, other):
        other = _coerce(other)
        return ParamScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def inverse(self) -> "ParamScalar":
        if not self.num:
            raise ScalarError("inverse of zero")
        return ParamScalar(dict(self.den), dict(self.num))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ParamScalar.from_int(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _coerce(other)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((frozenset(self.num.items()), frozenset(self.den.items())))

    # -- evaluation ------------------------------------------------------
    def eval(self, assignment: dict[str, Fraction]) -> Fraction:
        """Exact evaluation; every parameter occurring must be assigned."""
        values = {}
        for m in list(self.num) + list(self.den):
            for i, _ in m:
                name = _PARAM_NAMES[i]
                if name not in assignment:
                    raise ScalarError(f"parameter {name!r} not assigned")
                values[i] = Fraction(assignment[name])
        den = _peval(self.den, values)
        if den == 0:
            raise ScalarError("denominator vanishes under assignment")
        return _peval(self.num, values) / den

    def specialize(self, assignment) -> "ParamScalar":
        return ParamScalar.from_fraction(self.eval(assignment))

    # -- printing ----------------------------------------------------------
    def __str__(self):
        if self.den == {_ONE: 1}:
            return _pstr(self.num)
        ns = _pstr(self.num)
        if len(self.num) > 1:
            ns = f"({ns})"
        ds = _pstr(self.den)
        if len(self.den) > 1 or (len(self.den) == 1 and _ONE not in self.den) \
                or self.den.get(_ONE, 0) < 0:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"ParamScalar({self})"


def _coerce(x) -> ParamScalar:
    if isinstance(x, ParamScalar):
        return x
    if isinstance(x, int):
        return ParamScalar.from_int(x)
    if isinstance(x, Fraction):
        return ParamScalar.from_fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to ParamScalar")


ZERO = ParamScalar.from_int(0)
ONE = ParamScalar.from_int(1)


def scalar_canonicalize(num, den) -> ParamScalar:
    """Canonicalize a raw numerator/denominator pair of polynomial dicts."""
    return ParamScalar(num, den)
