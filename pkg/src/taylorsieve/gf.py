"""Finite fields GF(p^k) as single extensions of the prime field.

An element of GF(p^k) = F_p[t]/(m(t)) is stored as the integer
``c0 + c1*p + ... + c_{k-1}*p^(k-1)`` built from its coefficient vector
``[c0, ..., c_{k-1}]`` in the power basis of ``t``.  That integer is the
element's *encoding*; comparing encodings is the canonical ordering used
for every tie-break in the package (modulus choice, embedding roots,
orbit representatives).

Fields up to ``TABLE_LIMIT`` elements carry exp/log tables and support the
vectorised ``*_array`` operations used by the enumeration code.  Larger
fields fall back to polynomial arithmetic for scalars only.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, FieldMismatch, ParseError

TABLE_LIMIT = 1 << 20


# --------------------------------------------------------------------------
# polynomials over F_p as little-endian lists (helpers, not public API)


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _pdivmod(a, b, p):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return _trim(quot), a


def _pmod(a, b, p):
    return _pdivmod(a, b, p)[1]


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: monic ``poly`` of degree k is irreducible over F_p iff
    gcd(poly, x^(p^i) - x) = 1 for every i <= k/2."""
    f = _trim([c % p for c in poly])
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(1, k // 2 + 1):
        xp = _ppowmod(xp, p, f, p)
        if len(_pgcd(f, _psub(xp, x, p), p)) > 1:
            return False
    return True


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``k`` whose lower coefficients have the
    smallest encoding; returned little-endian including the leading 1."""
    if k == 1:
        return (0, 1)
    for low in range(p**k):
        coeffs = [(low // p**i) % p for i in range(k)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


# --------------------------------------------------------------------------


class FieldCtx:
    """The field GF(p^k) with a fixed monic irreducible modulus.

    Build instances through :func:`field_create`, which caches them so that
    identical fields are the same object.
    """

    def __init__(self, p: int, k: int, modulus: Sequence[int]):
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {k}")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._pows = [p**i for i in range(k)]
        self.has_tables = self.q <= TABLE_LIMIT
        if self.has_tables:
            self._build_tables()

    # -- construction helpers ---------------------------------------------

    def _digits(self, v):
        p = self.p
        out = []
        for _ in range(self.k):
            out.append(v % p)
            v //= p
        return out

    def _encode(self, digits):
        return sum(int(c) * w for c, w in zip(digits, self._pows))

    def _ref_mul(self, a, b):
        prod = _pmod(_pmul(_trim(self._digits(a)), _trim(self._digits(b)), self.p),
                     list(self.modulus), self.p)
        return self._encode(prod)

    def _ref_pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._ref_mul(r, a)
            a = self._ref_mul(a, a)
            e >>= 1
        return r

    def _find_primitive(self):
        if self.q == 2:
            return 1
        factors = _prime_factors(self.q - 1)
        for g in range(2, self.q):
            if all(self._ref_pow(g, (self.q - 1) // f) != 1 for f in factors):
                return g
        raise AssertionError("multiplicative group is not cyclic?")

    def _build_tables(self):
        q, p, k = self.q, self.p, self.k
        idx = np.arange(q, dtype=np.int64)
        digits = np.stack([(idx // w) % p for w in self._pows], axis=1)
        weights = np.array(self._pows, dtype=np.int64)
        self.digits = digits
        self._weights = weights
        if q == 2:
            g = 1
        else:
            g = self._find_primitive()
        self.primitive = g
        # multiplication by g as an F_p-linear map on coordinate vectors
        G = np.array([self._digits(self._ref_mul(g, p**i)) for i in range(k)],
                     dtype=np.int64)  # row i = g * t^i
        times_g = ((digits @ G) % p) @ weights
        exp = np.empty(2 * (q - 1) + 1, dtype=np.int64)
        perm = times_g.tolist()
        v = 1
        for i in range(q - 1):
            exp[i] = v
            v = perm[v]
        exp[q - 1:2 * (q - 1)] = exp[:q - 1]
        exp[-1] = exp[0]
        log = np.full(q, -1, dtype=np.int64)
        log[exp[:q - 1]] = np.arange(q - 1)
        self.exp = exp
        self.log = log
        self._exp_l = exp.tolist()
        self._log_l = log.tolist()
        if p == 2:
            self._neg_arr = idx
        else:
            self._neg_arr = ((-digits) % p) @ weights
        self._neg_l = self._neg_arr.tolist()
        self._add_table = None
        if q <= 256:
            a = digits[:, None, :] + digits[None, :, :]
            self._add_table = ((a % p) @ weights).astype(np.int64)

    # -- identity -----------------------------------------------------------

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return (isinstance(other, FieldCtx) and self.p == other.p and self.k == other.k
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __reduce__(self):
        return (field_create, (self.p, self.k))

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    # -- scalar arithmetic on encodings ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return int(self._add_table[a, b])
        p = self.p
        out, w = 0, 1
        for _ in range(self.k):
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.k == 1:
            return (-a) % self.p
        if self.has_tables:
            return self._neg_l[a]
        return self._encode([(-c) % self.p for c in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        if self.has_tables:
            return self._exp_l[self._log_l[a] + self._log_l[b]]
        return self._ref_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        # extended Euclid on representative polynomials
        p = self.p
        r0, r1 = list(self.modulus), _trim(self._digits(a))
        s0, s1 = [], [1]
        while r1:
            quot, rem = _pdivmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(quot, s1, p), p)
        c = pow(r0[0], p - 2, p)
        return self._encode([x * c % p for x in s0] + [0] * self.k)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.has_tables and self.q > 2:
            return self._exp_l[(self._log_l[a] * e) % (self.q - 1)]
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def frob(self, a: int, s: int = 1) -> int:
        """a -> a^(p^s)."""
        return self.pow(a, self.p**s)

    def from_int(self, n: int) -> int:
        """Encoding of the integer ``n`` (its image in the prime field)."""
        return n % self.p

    # -- vectorised arithmetic (table-backed fields only) ------------------

    def _need_tables(self):
        if not self.has_tables:
            raise BudgetExceeded(f"{self} exceeds the table limit {TABLE_LIMIT}; "
                                 "vectorised arithmetic unavailable")

    def add_array(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.k == 1:
            return (np.asarray(a) + b) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        self._need_tables()
        return ((self.digits[a] + self.digits[b]) % self.p) @ self._weights

    def neg_array(self, a):
        if self.p == 2:
            return np.asarray(a)
        if self.k == 1:
            return (-np.asarray(a)) % self.p
        self._need_tables()
        return self._neg_arr[a]

    def sub_array(self, a, b):
        return self.add_array(a, self.neg_array(b))

    def mul_array(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if self.k == 1:
            return a * b % self.p
        self._need_tables()
        la = self.log[a]
        lb = self.log[b]
        out = self.exp[np.maximum(la, 0) + np.maximum(lb, 0)]
        return np.where((la < 0) | (lb < 0), 0, out)

    def pow_array(self, a, e: int):
        a = np.asarray(a)
        self._need_tables()
        if e == 0:
            return np.ones_like(a)
        if self.q == 2:
            return a.copy()
        la = self.log[a]
        e_mod = e % (self.q - 1)
        if e < 0:
            if np.any(la < 0):
                raise ZeroDivisionError("negative power of zero")
        out = self.exp[(np.maximum(la, 0) * e_mod) % (self.q - 1)]
        return np.where(la < 0, 0, out)

    def frob_array(self, a, s: int = 1):
        return self.pow_array(a, self.p**s)

    # -- elements ------------------------------------------------------------

    def element(self, value: int) -> "FqElem":
        """Wrap an encoding."""
        if not 0 <= value < self.q:
            raise ValueError(f"encoding {value} out of range for {self}")
        return FqElem(self, int(value))

    def __call__(self, x) -> "FqElem":
        """Coerce ``x``: an int is read in the prime field, a sequence as a
        coefficient vector, an ``FqElem`` of this field passes through."""
        if isinstance(x, FqElem):
            if x.ctx != self:
                raise FieldMismatch(f"{x!r} is not an element of {self}")
            return x
        if isinstance(x, (int, np.integer)):
            return FqElem(self, int(x) % self.p)
        if isinstance(x, str):
            return parse_element(x, self)
        coeffs = list(x)
        if len(coeffs) > self.k:
            raise ValueError(f"coefficient vector longer than {self.k}")
        return FqElem(self, self._encode([int(c) % self.p for c in coeffs]))

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    @property
    def gen(self) -> "FqElem":
        """The class of ``t``; for k = 1 this is 0 (root of the modulus x)."""
        return FqElem(self, self.p if self.k > 1 else 0)

    def elements(self) -> list["FqElem"]:
        return [FqElem(self, v) for v in range(self.q)]

    def coeffs_of(self, v: int) -> tuple[int, ...]:
        return tuple(self._digits(v))

    def contains_subfield(self, other: "FieldCtx") -> bool:
        return other.p == self.p and self.k % other.k == 0


@functools.lru_cache(maxsize=None)
def field_create(p: int, k: int = 1) -> FieldCtx:
    """GF(p^k) with the lexicographically smallest monic irreducible modulus.

    >>> field_create(3, 2).modulus
    (1, 0, 1)
    """
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"characteristic must be prime, got {p}")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"extension degree must be >= 1, got {k}")
    return FieldCtx(int(p), int(k), smallest_irreducible(int(p), int(k)))


@dataclass(frozen=True, slots=True, eq=False)
class FqElem:
    """An element of a :class:`FieldCtx`, stored by its encoding."""

    ctx: FieldCtx
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs_of(self.value)

    def _other(self, other):
        if isinstance(other, FqElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise FieldMismatch(f"cannot combine elements of {self.ctx} and {other.ctx}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.sub(o, self.value))

    def __neg__(self):
        return FqElem(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElem(self.ctx, self.ctx.div(o, self.value))

    def __pow__(self, e: int):
        return FqElem(self.ctx, self.ctx.pow(self.value, e))

    def inv(self) -> "FqElem":
        return FqElem(self.ctx, self.ctx.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.value == other.value and self.ctx == other.ctx
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.ctx.p
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.q, self.value))

    def __lt__(self, other):
        return self.value < other.value

    def __bool__(self):
        return self.value != 0

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self):
        return f"{self.ctx}({format_element(self)})"

    def __str__(self):
        return format_element(self)

    def to_json(self) -> list[int]:
        return list(self.coeffs)


# --------------------------------------------------------------------------
# free-function forms of the operations


def arith(a: FqElem, b: FqElem, op: str) -> FqElem:
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    if not isinstance(b, FqElem) or b.ctx != a.ctx:
        raise FieldMismatch("arith operands must share a field")
    return ops[op](b)


def inv(a: FqElem) -> FqElem:
    return a.inv()


def frobenius(a: FqElem, base_power: int = 1) -> FqElem:
    """a^(p^s), the Frobenius of GF(p^k) relative to GF(p^s); requires s | k."""
    s = base_power
    if s < 1 or a.ctx.k % s:
        raise ValueError(f"Frobenius base degree {s} does not divide {a.ctx.k}")
    return FqElem(a.ctx, a.ctx.frob(a.value, s))


def format_element(a: FqElem) -> str:
    """Prime-field elements print as integers, others as ``(c0 + c1*t + ...)``."""
    c = a.coeffs
    if all(x == 0 for x in c[1:]):
        return str(c[0])
    parts = []
    for i, ci in enumerate(c):
        if ci == 0:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if not mono:
            parts.append(str(ci))
        elif ci == 1:
            parts.append(mono)
        else:
            parts.append(f"{ci}*{mono}")
    return "(" + " + ".join(parts) + ")"


def parse_element(src: str, ctx: FieldCtx) -> FqElem:
    """Parse an element expression in the generator ``t`` (e.g. ``"t^2+1"``)."""
    from .mpoly import parse

    f = parse(src, 0, ctx)
    return f.constant_term()


def element_from_json(obj, ctx: FieldCtx) -> FqElem:
    """Elements serialize as ``[c0, ..., c(k-1)]``; a bare int or a string
    expression in ``t`` is also accepted."""
    if isinstance(obj, bool):
        raise ParseError(f"not a field element: {obj!r}")
    if isinstance(obj, int):
        return ctx(obj)
    if isinstance(obj, str):
        return parse_element(obj, ctx)
    if isinstance(obj, list) and all(isinstance(c, int) for c in obj):
        return ctx(obj)
    raise ParseError(f"not a field element: {obj!r}")


def field_from_json(obj: dict) -> FieldCtx:
    ctx = field_create(int(obj["p"]), int(obj.get("k", 1)))
    if "modulus" in obj and tuple(obj["modulus"]) != ctx.modulus:
        ctx = FieldCtx(ctx.p, ctx.k, obj["modulus"])
    return ctx


# --------------------------------------------------------------------------


class Embedding:
    """F_p-algebra map GF(p^s) -> GF(p^(s r)) sending the source generator to
    ``image_of_generator``."""

    def __init__(self, source: FieldCtx, target: FieldCtx, image_of_generator: FqElem):
        if image_of_generator.ctx != target:
            raise FieldMismatch("image of generator must lie in the target field")
        self.source = source
        self.target = target
        self.image_of_generator = image_of_generator
        g = image_of_generator.value
        basis = [1]
        for _ in range(1, source.k):
            basis.append(target.mul(basis[-1], g))
        self._basis = basis
        self._table = None
        if source.q <= TABLE_LIMIT:
            self._table = np.array([self._apply_value(v) for v in range(source.q)],
                                   dtype=np.int64)

    def _apply_value(self, v: int) -> int:
        tgt = self.target
        out = 0
        for c, b in zip(self.source.coeffs_of(v), self._basis):
            if c:
                out = tgt.add(out, tgt.mul(tgt.from_int(c), b))
        return out

    def apply_value(self, v: int) -> int:
        if self._table is not None:
            return int(self._table[v])
        return self._apply_value(v)

    def apply_array(self, values):
        if self._table is None:
            raise BudgetExceeded("embedding table unavailable for this source size")
        return self._table[np.asarray(values)]

    def __call__(self, a: FqElem) -> FqElem:
        if a.ctx != self.source:
            raise FieldMismatch(f"{a!r} is not in the source field {self.source}")
        return FqElem(self.target, self.apply_value(a.value))

    def image(self) -> list[FqElem]:
        return [self(a) for a in self.source.elements()]

    def compose(self, outer: "Embedding") -> "Embedding":
        """``outer o self``."""
        if outer.source != self.target:
            raise FieldMismatch("embeddings do not compose")
        return Embedding(self.source, outer.target, outer(self.image_of_generator))

    def __repr__(self):
        return (f"Embedding({self.source} -> {self.target}, "
                f"t -> {format_element(self.image_of_generator)})")


def _poly_roots(coeffs: Sequence[int], src: FieldCtx, emb_coeffs, dst: FieldCtx):
    """Roots in ``dst`` of a polynomial whose coefficients are already
    encodings in ``dst``."""
    if dst.has_tables:
        xs = np.arange(dst.q, dtype=np.int64)
        acc = np.zeros(dst.q, dtype=np.int64)
        for c in reversed(emb_coeffs):
            acc = dst.add_array(dst.mul_array(acc, xs), np.full(dst.q, c, dtype=np.int64))
        return np.flatnonzero(acc == 0).tolist()
    roots = []
    for x in range(dst.q):
        acc = 0
        for c in reversed(emb_coeffs):
            acc = dst.add(dst.mul(acc, x), c)
        if acc == 0:
            roots.append(x)
    return roots


@functools.lru_cache(maxsize=None)
def build_embedding(src: FieldCtx, dst: FieldCtx) -> Embedding:
    """Deterministic embedding GF(p^s) -> GF(p^(s r)): the generator goes to
    the root of ``src.modulus`` in ``dst`` with the smallest encoding."""
    if src.p != dst.p or dst.k % src.k:
        raise FieldMismatch(f"{src} does not embed in {dst}")
    if src == dst:
        return Embedding(src, dst, dst.gen)
    # modulus coefficients are prime-field integers
    emb_coeffs = [dst.from_int(c) for c in src.modulus]
    roots = _poly_roots(src.modulus, src, emb_coeffs, dst)
    if not roots:
        raise AssertionError(f"modulus of {src} has no root in {dst}")
    return Embedding(src, dst, dst.element(min(roots)))


def extension(base: FieldCtx, r: int) -> tuple[FieldCtx, Embedding]:
    """The degree-r extension of ``base`` as a single extension of F_p,
    together with the stored embedding of the base."""
    big = field_create(base.p, base.k * r)
    return big, build_embedding(base, big)


def relative_frobenius_array(K: FieldCtx, base: FieldCtx, a):
    """Vectorised a -> a^q with q = #base."""
    return K.frob_array(a, base.k)


def iter_vectors(ctx: FieldCtx, n: int) -> Iterable[tuple[FqElem, ...]]:
    for vals in itertools.product(range(ctx.q), repeat=n):
        yield tuple(FqElem(ctx, v) for v in vals)
