"""Expression grammar and the presentation file format.

Expressions: integers, parameter names, generator names, `d(ident)` for
differential generators, `+ - * / ^` and parentheses.  Division requires a
scalar-valued divisor.  The same grammar is used for scalars embedded in
expressions, for residues printed in reports (round-trippable), and for
presentation files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .freealg import (AlgebraError, Generator, MonomialOrder, NCPoly,
                      Presentation, make_presentation)
from .scalars import ONE, ParamScalar, is_parameter, register_parameter

FILE_VERSION = 1

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()=])|(\S))")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _tokenize(text: str):
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            break
        if m.group(4):
            raise ParseError(f"unexpected character {m.group(4)!r}", m.start(4))
        if m.group(1):
            out.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2):
            out.append(("ident", m.group(2), m.start(2)))
        else:
            sym = "^" if m.group(3) == "**" else m.group(3)
            out.append(("sym", sym, m.start(3)))
        i = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, pres: Presentation | None):
        self.tokens = _tokenize(text)
        self.k = 0
        self.pres = pres

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect_sym(self, s):
        kind, val, pos = self.next()
        if kind != "sym" or val != s:
            raise ParseError(f"expected {s!r}", pos)

    def parse(self) -> NCPoly:
        e = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return e

    def expr(self) -> NCPoly:
        kind, val, _ = self.peek()
        neg = False
        if kind == "sym" and val in "+-":
            self.next()
            neg = val == "-"
        e = self.term()
        if neg:
            e = -e
        while True:
            kind, val, _ = self.peek()
            if kind == "sym" and val in "+-":
                self.next()
                t = self.term()
                e = e - t if val == "-" else e + t
            else:
                return e

    def term(self) -> NCPoly:
        e = self.power()
        while True:
            kind, val, pos = self.peek()
            if kind == "sym" and val == "*":
                self.next()
                e = e * self.power()
            elif kind == "sym" and val == "/":
                self.next()
                d = self.power()
                e = e.scale(ONE / _as_scalar(d, pos))
            else:
                return e

    def power(self) -> NCPoly:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "sym" and val == "^":
            self.next()
            kind, val, pos = self.next()
            sign = 1
            if kind == "sym" and val == "-":
                sign = -1
                kind, val, pos = self.next()
            if kind != "int":
                raise ParseError("exponent must be an integer", pos)
            n = sign * val
            if n < 0:
                return NCPoly.unit(_as_scalar(base, pos) ** n)
            out = NCPoly.unit()
            for _ in range(n):
                out = out * base
            return out
        return base

    def atom(self) -> NCPoly:
        kind, val, pos = self.next()
        if kind == "int":
            return NCPoly.unit(ParamScalar.from_int(val))
        if kind == "sym" and val == "(":
            e = self.expr()
            self.expect_sym(")")
            return e
        if kind == "sym" and val == "-":
            return -self.atom()
        if kind == "ident":
            nxt_kind, nxt_val, _ = self.peek()
            if val == "d" and nxt_kind == "sym" and nxt_val == "(":
                self.next()
                ikind, iname, ipos = self.next()
                if ikind != "ident":
                    raise ParseError("d(...) expects a generator name", ipos)
                self.expect_sym(")")
                return NCPoly.gen(self._dgen(iname, ipos))
            return self._ident(val, pos)
        raise ParseError("expected an atom", pos)

    def _dgen(self, base: str, pos: int) -> str:
        if self.pres is None:
            raise ParseError("d(...) not allowed in scalar context", pos)
        for g in self.pres.generators.values():
            if g.base == base:
                return g.name
        raise ParseError(f"no differential generator with base {base!r}", pos)

    def _ident(self, name: str, pos: int) -> NCPoly:
        if self.pres is not None and name in self.pres.generators:
            return NCPoly.gen(name)
        if is_parameter(name):
            return NCPoly.unit(ParamScalar.parameter(name))
        raise ParseError(f"unknown generator {name!r}", pos)


def _as_scalar(e: NCPoly, pos: int) -> ParamScalar:
    if e.is_zero():
        return ParamScalar.from_int(0)
    if set(e.words()) != {()}:
        raise ParseError("divisor / exponent base must be scalar-valued", pos)
    return e.terms[()]


def parse_element(text: str, pres: Presentation) -> NCPoly:
    """Parse an expression over a presentation's generators (not normal-formed)."""
    return _Parser(text, pres).parse()


def parse_scalar(text: str) -> ParamScalar:
    """Parse a pure scalar expression."""
    return _as_scalar(_Parser(text, None).parse(), 0)


# -- formatting ---------------------------------------------------------------

def format_word(w) -> str:
    return "*".join(w) if w else "1"


def _coef_factor(c: ParamScalar) -> str:
    s = str(c)
    if " " in s or s.startswith("-"):
        return f"({s})"
    return s


def format_poly(e: NCPoly) -> str:
    """Deterministic, re-parseable rendering of an element."""
    if e.is_zero():
        return "0"
    parts = []
    for w in sorted(e.words(), key=lambda w: (len(w), w)):
        c = e.terms[w]
        cs = str(c)
        neg = cs.startswith("-")
        if neg:
            c = -c
            cs = str(c)
        if not w:
            body = cs if " " not in cs else f"({cs})"
        elif c.is_one():
            body = format_word(w)
        else:
            body = f"{_coef_factor(c)}*{format_word(w)}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# -- presentation files ---------------------------------------------------------

_SECTIONS = ("params", "generators", "precedence", "relations", "differential")


@dataclass
class PresentationFile:
    name: str
    presentation: Presentation


def _split_sections(text: str, path: str):
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    if not lines or not lines[0].strip().startswith("version"):
        raise AlgebraError(f"{path}: missing version line")
    ver = lines[0].split()
    if len(ver) != 2 or ver[1] != str(FILE_VERSION):
        raise AlgebraError(f"{path}: unsupported file version {' '.join(ver[1:])!r}")
    sections: dict[str, list[str]] = {}
    current = None
    for ln in lines[1:]:
        s = ln.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            sections.setdefault(current, [])
        else:
            if current is None:
                raise AlgebraError(f"{path}: content before first section: {s!r}")
            sections[current].append(s)
    return sections


def load_presentation(path: str, max_steps: int = 10 ** 6) -> Presentation:
    """Load a presentation file; relations are auto-oriented and interreduced.

    Sections: [params] [generators] [precedence] [relations] [differential].
    Unknown sections are rejected.  When a differential is assigned, the
    relations are closed under one differentiation (their d-images join the
    rule set).  Confluence is *not* asserted here; run
    check_local_confluence to validate the result.
    """
    with open(path, "r", encoding="utf-8") as fh:
        sections = _split_sections(fh.read(), path)
    unknown = set(sections) - set(_SECTIONS)
    if unknown:
        raise AlgebraError(f"{path}: unknown sections {sorted(unknown)}")
    for pname in " ".join(sections.get("params", [])).split():
        register_parameter(pname)
    gens = []
    for ln in sections.get("generators", []):
        bits = ln.split()
        if len(bits) == 2:
            gens.append(Generator(bits[0], int(bits[1])))
        elif len(bits) == 3:
            gens.append(Generator(bits[0], int(bits[1]), bits[2]))
        else:
            raise AlgebraError(f"{path}: bad generator line {ln!r}")
    precedence = " ".join(sections.get("precedence", [])).split()
    # a scratch presentation so relation expressions can be parsed
    scratch = Presentation("scratch", {g.name: g for g in gens},
                           order=MonomialOrder(tuple(precedence)), rules=[])
    relations = [parse_element(ln, scratch) for ln in sections.get("relations", [])]
    differential = {}
    for ln in sections.get("differential", []):
        if "=" not in ln:
            raise AlgebraError(f"{path}: bad differential line {ln!r}")
        lhs, rhs = ln.split("=", 1)
        gname = lhs.strip()
        if gname not in scratch.generators:
            raise AlgebraError(f"{path}: differential of unknown generator {gname!r}")
        differential[gname] = parse_element(rhs.strip(), scratch)
    import os
    name = os.path.splitext(os.path.basename(path))[0]
    if differential:
        from .dga import close_differential_ideal
        free = Presentation(name, {g.name: g for g in gens},
                            MonomialOrder(tuple(precedence)), [],
                            differential=differential, max_steps=max_steps)
        return close_differential_ideal(free, relations, name=name)
    return make_presentation(name, gens, precedence, relations,
                             differential=differential, max_steps=max_steps)


def load_hopf_scenario(path: str) -> dict:
    """Load a Hopf scenario file: [hopf] base = <name>; [ideal] expressions."""
    with open(path, "r", encoding="utf-8") as fh:
        sections = _split_sections(fh.read(), path)
    unknown = set(sections) - {"hopf", "ideal"}
    if unknown:
        raise AlgebraError(f"{path}: unknown sections {sorted(unknown)}")
    conf = {}
    for ln in sections.get("hopf", []):
        if "=" not in ln:
            raise AlgebraError(f"{path}: bad hopf line {ln!r}")
        k, v = ln.split("=", 1)
        conf[k.strip()] = v.strip()
    conf["ideal"] = list(sections.get("ideal", []))
    return conf
