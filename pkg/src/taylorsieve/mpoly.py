"""Sparse multivariate polynomials over a finite field, and truncated jets.

Monomials are ordered graded-lex with x0 > x1 > ...; that order is used for
printing and for the column order of every evaluation matrix.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import FieldMismatch, ParseError
from .gf import Embedding, FieldCtx, FqElem, build_embedding, format_element


def _grlex_key(e):
    return (sum(e), e)


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``d`` in graded-lex (descending) order."""
    if nvars == 0:
        return ((),) if d == 0 else ()
    out = []
    for first in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def jet_monomials(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Exponents of total degree < ``order``: constant first, then degree 1, ..."""
    return tuple(e for deg in range(order) for e in monomials(nvars, deg))


class MPoly:
    """Polynomial in ``nvars`` variables with coefficients in ``ctx``.

    Coefficients are kept as field encodings internally; :attr:`terms`
    exposes them as :class:`FqElem`.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "ctx", "_terms", "_hash")

    def __init__(self, nvars: int, ctx: FieldCtx, terms: Mapping | None = None):
        self.nvars = nvars
        self.ctx = ctx
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {nvars} variables")
            if isinstance(c, FqElem):
                if c.ctx != ctx:
                    raise FieldMismatch(f"coefficient {c!r} not in {ctx}")
                v = c.value
            else:
                v = int(c)
                if not 0 <= v < ctx.q:
                    raise ValueError(f"coefficient encoding {v} out of range")
            if v:
                clean[e] = v
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True))
        self._hash = None

    @classmethod
    def _raw(cls, nvars, ctx, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.ctx = ctx
        obj._terms = dict(sorted(((e, v) for e, v in terms.items() if v),
                                 key=lambda kv: _grlex_key(kv[0]), reverse=True))
        obj._hash = None
        return obj

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, nvars, ctx):
        return cls._raw(nvars, ctx, {})

    @classmethod
    def constant(cls, nvars, ctx, c):
        v = ctx(c).value
        return cls._raw(nvars, ctx, {(0,) * nvars: v})

    @classmethod
    def var(cls, nvars, ctx, i):
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, ctx, {tuple(e): 1})

    @classmethod
    def monomial(cls, ctx, exponent, coeff=1):
        exponent = tuple(exponent)
        return cls._raw(len(exponent), ctx, {exponent: ctx(coeff).value})

    @classmethod
    def from_coefficients(cls, ctx, nvars, d, values: Sequence[int]):
        """Homogeneous degree-``d`` polynomial from encodings listed in the
        graded-lex monomial order."""
        mons = monomials(nvars, d)
        if len(values) != len(mons):
            raise ValueError(f"expected {len(mons)} coefficients, got {len(values)}")
        return cls._raw(nvars, ctx, {e: int(v) for e, v in zip(mons, values)})

    # -- basic queries --------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], FqElem]:
        return {e: FqElem(self.ctx, v) for e, v in self._terms.items()}

    def items_raw(self):
        return self._terms.items()

    def coefficient(self, exponent) -> FqElem:
        return FqElem(self.ctx, self._terms.get(tuple(exponent), 0))

    def coefficient_vector(self, d: int) -> list[int]:
        if not self.is_homogeneous(d):
            raise ValueError(f"not homogeneous of degree {d}")
        return [self._terms.get(e, 0) for e in monomials(self.nvars, d)]

    def constant_term(self) -> FqElem:
        return self.coefficient((0,) * self.nvars)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self._terms}
        if d is None:
            return len(degs) <= 1
        return degs <= {d}

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.ctx, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"MPoly({format_poly(self)!r} over {self.ctx})"

    def __str__(self):
        return format_poly(self)

    # -- ring operations ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars or other.ctx != self.ctx:
                raise FieldMismatch("polynomials live in different rings")
            return other
        if isinstance(other, (int, FqElem)):
            return MPoly.constant(self.nvars, self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add = self.ctx.add
        out = dict(self._terms)
        for e, v in other._terms.items():
            out[e] = add(out.get(e, 0), v)
        return MPoly._raw(self.nvars, self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ctx.neg
        return MPoly._raw(self.nvars, self.ctx, {e: neg(v) for e, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add, mul = self.ctx.add, self.ctx.mul
        out: dict = {}
        for e1, v1 in self._terms.items():
            for e2, v2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = add(out.get(e, 0), mul(v1, v2))
        return MPoly._raw(self.nvars, self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.constant(self.nvars, self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "MPoly":
        c = self.ctx(c).value
        mul = self.ctx.mul
        return MPoly._raw(self.nvars, self.ctx, {e: mul(c, v) for e, v in self._terms.items()})

    # -- calculus and substitutions ------------------------------------------

    def partial(self, i: int) -> "MPoly":
        return partial(self, i)

    def base_change(self, emb: Embedding) -> "MPoly":
        if emb.source != self.ctx:
            raise FieldMismatch(f"embedding source {emb.source} != {self.ctx}")
        return MPoly._raw(self.nvars, emb.target,
                          {e: emb.apply_value(v) for e, v in self._terms.items()})

    def __call__(self, *point):
        return evaluate(self, point)


# --------------------------------------------------------------------------
# parsing and formatting

_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(t)|(\*\*|[-+*^()]))")


class _Parser:
    def __init__(self, src, nvars, ctx):
        self.src = src
        self.nvars = nvars
        self.ctx = ctx
        self.tokens = []
        pos = 0
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
                raise ParseError("unexpected character", src, bad)
            start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
            num, var, gen, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num), start))
            elif var is not None:
                self.tokens.append(("var", int(var), start))
            elif gen is not None:
                self.tokens.append(("gen", None, start))
            else:
                self.tokens.append(("op", "^" if op == "**" else op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", None, len(self.src))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", self.src, tok[2])

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", self.src, 0)
        f = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError("unexpected token", self.src, tok[2])
        return f

    def expr(self):
        f = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self):
        f = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            f = f * self.factor()
        return f

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            f = self.factor()
            return -f if tok[1] == "-" else f
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exp_tok = self.take()
            if exp_tok[0] != "num":
                raise ParseError("exponent must be a non-negative integer", self.src, exp_tok[2])
            base = base ** exp_tok[1]
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return MPoly.constant(self.nvars, self.ctx, val)
        if kind == "var":
            if val >= self.nvars:
                raise ParseError(f"variable x{val} out of range for {self.nvars} variables",
                                 self.src, pos)
            return MPoly.var(self.nvars, self.ctx, val)
        if kind == "gen":
            if self.ctx.k == 1:
                raise ParseError("generator t is only available in extension fields",
                                 self.src, pos)
            return MPoly.constant(self.nvars, self.ctx, self.ctx.gen)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        raise ParseError("unexpected token", self.src, pos)


def parse(src: str, nvars: int, ctx: FieldCtx) -> MPoly:
    """Parse ``src`` in variables x0..x{nvars-1}.

    Integer literals are read in the prime field; in an extension field the
    symbol ``t`` denotes the generator.

    >>> from taylorsieve.gf import field_create
    >>> str(parse("x0*x2 - x1^2", 3, field_create(3)))
    'x0*x2 + 2*x1^2'
    """
    return _Parser(src, nvars, ctx).parse()


def _format_mono(e):
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{k}")
    return "*".join(parts)


def format_poly(f: MPoly) -> str:
    if f.is_zero():
        return "0"
    out = []
    for e, v in f.items_raw():
        c = format_element(FqElem(f.ctx, v))
        mono = _format_mono(e)
        if not mono:
            out.append(c)
        elif c == "1":
            out.append(mono)
        else:
            out.append(f"{c}*{mono}")
    return " + ".join(out)


# --------------------------------------------------------------------------
# operations


def evaluate(f: MPoly, point: Sequence[FqElem], emb: Embedding | None = None) -> FqElem:
    """Value of ``f`` at ``point`` (coordinates possibly in an extension),
    with coefficients pushed through ``emb``."""
    if len(point) != f.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.nvars} variables")
    if f.nvars == 0:
        if emb is None:
            return f.constant_term()
        return emb(f.constant_term())
    K = point[0].ctx
    if any(c.ctx != K for c in point):
        raise FieldMismatch("point coordinates lie in different fields")
    if emb is None:
        emb = build_embedding(f.ctx, K)
    elif emb.source != f.ctx or emb.target != K:
        raise FieldMismatch(f"embedding {emb} does not map {f.ctx} into {K}")
    vals = [c.value for c in point]
    add, mul, pw = K.add, K.mul, K.pow
    acc = 0
    for e, v in f.items_raw():
        term = emb.apply_value(v)
        for x, k in zip(vals, e):
            if k:
                term = mul(term, pw(x, k))
        acc = add(acc, term)
    return FqElem(K, acc)


def partial(f: MPoly, i: int) -> MPoly:
    """Formal partial derivative in x_i (exponents reduce mod p)."""
    if not 0 <= i < f.nvars:
        raise IndexError(f"variable index {i} out of range")
    ctx = f.ctx
    out = {}
    for e, v in f.items_raw():
        k = e[i]
        if k % ctx.p == 0:
            continue
        ne = list(e)
        ne[i] -= 1
        out[tuple(ne)] = ctx.mul(v, ctx.from_int(k))
    return MPoly._raw(f.nvars, ctx, out)


def dehomogenize(f: MPoly, j: int) -> MPoly:
    """Set x_j = 1 in a homogeneous polynomial; remaining variables keep
    their relative order."""
    if not f.is_homogeneous():
        raise ValueError("dehomogenize needs a homogeneous polynomial")
    if not 0 <= j < f.nvars:
        raise IndexError(f"chart index {j} out of range")
    add = f.ctx.add
    out: dict = {}
    for e, v in f.items_raw():
        ne = e[:j] + e[j + 1:]
        out[ne] = add(out.get(ne, 0), v)
    return MPoly._raw(f.nvars - 1, f.ctx, out)


def homogenize(g: MPoly, j: int, d: int) -> MPoly:
    """Inverse of :func:`dehomogenize` for polynomials of degree <= d."""
    out = {}
    for e, v in g.items_raw():
        s = sum(e)
        if s > d:
            raise ValueError(f"degree {s} exceeds {d}")
        out[e[:j] + (d - s,) + e[j:]] = v
    return MPoly._raw(g.nvars + 1, g.ctx, out)


def _binom_mod(n, k, p):
    return math.comb(n, k) % p


def taylor_coefficients(g: MPoly, a: Sequence[int], order: int) -> list[int]:
    """Coefficients of g(a + y) for monomials of degree < ``order`` (in
    :func:`jet_monomials` order).  ``g`` and ``a`` are over the same field;
    ``a`` is given as encodings.  Binomials are reduced mod p, so this is the
    Hasse-derivative expansion and is valid in every characteristic."""
    K = g.ctx
    p = K.p
    n = g.nvars
    jm = jet_monomials(n, order)
    out = [0] * len(jm)
    add, mul, pw = K.add, K.mul, K.pow
    for e, v in g.items_raw():
        for idx, b in enumerate(jm):
            if any(bi > ei for bi, ei in zip(b, e)):
                continue
            c = v
            for ai, ei, bi in zip(a, e, b):
                bc = _binom_mod(ei, bi, p)
                if bc == 0:
                    c = 0
                    break
                if bc != 1:
                    c = mul(c, K.from_int(bc))
                if ei > bi:
                    c = mul(c, pw(ai, ei - bi))
            if c:
                out[idx] = add(out[idx], c)
    return out


@dataclass(frozen=True, eq=False)
class Jet:
    """Image of a section in O_{x}/m_x^order, written in affine chart
    coordinates centred at the point.

    ``values`` is dense over :func:`jet_monomials` (degree < order).
    """

    center_field: FieldCtx
    order: int
    nvars: int
    chart: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(jet_monomials(self.nvars, self.order)):
            raise ValueError("jet has the wrong number of coefficients")

    @property
    def coeffs(self) -> dict[tuple[int, ...], FqElem]:
        K = self.center_field
        return {e: FqElem(K, v) for e, v in zip(jet_monomials(self.nvars, self.order), self.values)}

    @property
    def value(self) -> FqElem:
        return FqElem(self.center_field, self.values[0])

    @property
    def gradient(self) -> tuple[FqElem, ...]:
        if self.order < 2:
            raise ValueError("an order-1 jet carries no gradient")
        K = self.center_field
        return tuple(FqElem(K, v) for v in self.values[1:1 + self.nvars])

    def is_zero(self) -> bool:
        return not any(self.values)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.order == other.order and self.nvars == other.nvars
                and self.chart == other.chart and self.center_field == other.center_field
                and self.values == other.values)

    def __hash__(self):
        return hash((self.order, self.nvars, self.chart, self.values))

    def __add__(self, other):
        self._check(other)
        K = self.center_field
        return Jet(K, self.order, self.nvars, self.chart,
                   tuple(K.add(a, b) for a, b in zip(self.values, other.values)))

    def __mul__(self, other):
        """Product in the truncated ring O/m^order."""
        self._check(other)
        K = self.center_field
        jm = jet_monomials(self.nvars, self.order)
        index = {e: i for i, e in enumerate(jm)}
        out = [0] * len(jm)
        for e1, v1 in zip(jm, self.values):
            if not v1:
                continue
            for e2, v2 in zip(jm, other.values):
                if not v2:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                i = index.get(e)
                if i is not None:
                    out[i] = K.add(out[i], K.mul(v1, v2))
        return Jet(K, self.order, self.nvars, self.chart, tuple(out))

    def _check(self, other):
        if (self.order, self.nvars, self.chart) != (other.order, other.nvars, other.chart) \
                or self.center_field != other.center_field:
            raise FieldMismatch("jets live in different truncated rings")

    def __repr__(self):
        K = self.center_field
        body = ", ".join(f"{_format_mono(e) or '1'}: {format_element(FqElem(K, v))}"
                         for e, v in zip(jet_monomials(self.nvars, self.order), self.values) if v)
        return f"Jet(order={self.order}, chart={self.chart}, {{{body}}})"


def chart_of(coords: Sequence[FqElem]) -> int:
    """Smallest index of a nonvanishing coordinate."""
    for j, c in enumerate(coords):
        if c.value:
            return j
    raise ValueError("the zero vector is not a projective point")


def jet_at(f: MPoly, x, order: int, chart: int | None = None) -> Jet:
    """Jet of x_j^{-d} f at the point ``x`` (a ClosedPoint or ProjPoint),
    truncated mod m_x^order.

    The chart defaults to the smallest nonvanishing coordinate of the
    canonical representative.  Passing another ``chart`` recomputes the jet
    in that chart (used for chart-independence checks).
    """
    if order < 1:
        raise ValueError("jet order must be >= 1")
    rep = getattr(x, "rep", x)
    coords = tuple(rep.coords)
    if len(coords) != f.nvars:
        raise ValueError("point and polynomial have different ambient dimension")
    if not f.is_homogeneous():
        raise ValueError("jet_at needs a homogeneous polynomial")
    K = coords[0].ctx
    j = chart_of(coords) if chart is None else chart
    xj = coords[j].value
    if xj == 0:
        raise ValueError(f"coordinate x{j} vanishes at the point")
    emb = build_embedding(f.ctx, K)
    g = dehomogenize(f, j).base_change(emb)
    # affine coordinates of the point in chart j
    inv_xj = K.inv(xj)
    a = [K.mul(c.value, inv_xj) for i, c in enumerate(coords) if i != j]
    vals = taylor_coefficients(g, a, order)
    return Jet(K, order, f.nvars - 1, j, tuple(vals))


def iter_homogeneous(ctx: FieldCtx, nvars: int, d: int) -> Iterable[MPoly]:
    """All of S_d in lex order of coefficient encodings (small cases only)."""
    mons = monomials(nvars, d)
    for vals in itertools.product(range(ctx.q), repeat=len(mons)):
        yield MPoly._raw(nvars, ctx, dict(zip(mons, vals)))
