"""Points, closed points and truncated zeta functions of quasiprojective
subschemes of P^n over F_q.

A subscheme is a membership predicate: homogeneous equations that must
vanish, non-equations that must not, and finitely many excluded closed
points.  Points over F_{q^r} are found by brute force, vectorised over
numpy arrays of field encodings.  Linear equations are solved first, so a
line in P^2 is enumerated as a copy of P^1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .errors import BudgetExceeded, ConfigError, FieldMismatch
from .gf import (Embedding, FieldCtx, FqElem, build_embedding, element_from_json, extension,
                 field_create, format_element)
from .mpoly import MPoly, parse

DEFAULT_POINT_BUDGET = 1 << 28
_CHUNK = 1 << 18


# --------------------------------------------------------------------------
# points


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of P^n over some GF(q^r), first nonzero coordinate equal to 1."""

    coords: tuple[FqElem, ...]

    def __post_init__(self):
        if not self.coords:
            raise ValueError("a projective point needs coordinates")
        K = self.coords[0].ctx
        if any(c.ctx != K for c in self.coords):
            raise FieldMismatch("coordinates lie in different fields")
        first = next((c for c in self.coords if c.value), None)
        if first is None:
            raise ValueError("all coordinates are zero")
        if first.value != 1:
            raise ValueError("ProjPoint must be normalized; use ProjPoint.normalized")

    @classmethod
    def normalized(cls, coords: Sequence[FqElem]) -> "ProjPoint":
        coords = tuple(coords)
        first = next((c for c in coords if c.value), None)
        if first is None:
            raise ValueError("all coordinates are zero")
        s = first.inv()
        return cls(tuple(c * s for c in coords))

    @property
    def field(self) -> FieldCtx:
        return self.coords[0].ctx

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.key == other.key and self.field == other.field

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def frobenius(self, base: FieldCtx) -> "ProjPoint":
        K = self.field
        return ProjPoint(tuple(FqElem(K, K.frob(c.value, base.k)) for c in self.coords))

    def __repr__(self):
        return "(" + ":".join(format_element(c) for c in self.coords) + ")"


@dataclass(frozen=True, eq=False)
class ClosedPoint:
    """Frobenius orbit of ``degree`` points over kappa(x) = GF(q^degree);
    ``rep`` is the member with the smallest coordinate encodings."""

    rep: ProjPoint
    degree: int
    base: FieldCtx
    orbit: tuple[ProjPoint, ...]
    parent: "Subscheme | None" = field(default=None, repr=False)

    @property
    def field(self) -> FieldCtx:
        return self.rep.field

    @property
    def embedding(self) -> Embedding:
        return build_embedding(self.base, self.field)

    @property
    def n(self) -> int:
        return len(self.rep.coords) - 1

    def sort_key(self):
        return (self.degree, self.rep.key)

    def __eq__(self, other):
        if not isinstance(other, ClosedPoint):
            return NotImplemented
        return (self.degree, self.rep.key, self.base) == (other.degree, other.rep.key, other.base)

    def __hash__(self):
        return hash((self.degree, self.rep.key))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"ClosedPoint(deg={self.degree}, rep={self.rep!r})"

    def embedded_orbit(self, K: FieldCtx) -> list[tuple[int, ...]]:
        """Orbit rows as encodings in a field K containing kappa(x)."""
        emb = build_embedding(self.field, K)
        return [tuple(emb.apply_value(c.value) for c in P.coords) for P in self.orbit]


def _orbit_of(P: ProjPoint, base: FieldCtx) -> list[ProjPoint]:
    orbit = [P]
    cur = P.frobenius(base)
    while cur != P:
        orbit.append(cur)
        cur = cur.frobenius(base)
    return orbit


def closed_point(coords: Sequence, base: FieldCtx, parent=None) -> ClosedPoint:
    """The closed point through ``coords`` (elements of base or of any
    extension of it), with its residue field trimmed to GF(q^deg)."""
    coords = [base(c) if not isinstance(c, FqElem) else c for c in coords]
    P = ProjPoint.normalized(coords)
    if not P.field.contains_subfield(base):
        raise FieldMismatch(f"{P.field} does not contain {base}")
    orbit = _orbit_of(P, base)
    r = len(orbit)
    Kr, _ = extension(base, r)
    if Kr != P.field:
        # descend to kappa(x) = GF(q^r) via the inverse of the embedding
        emb = build_embedding(Kr, P.field)
        inverse = {emb.apply_value(v): v for v in range(Kr.q)}
        P = ProjPoint(tuple(FqElem(Kr, inverse[c.value]) for c in P.coords))
        orbit = _orbit_of(P, base)
    orbit.sort()
    rep = orbit[0]
    orbit = _orbit_of(rep, base)
    return ClosedPoint(rep, r, base, tuple(orbit), parent)


# --------------------------------------------------------------------------
# subschemes


@dataclass(frozen=True, eq=False)
class Subscheme:
    """Quasiprojective subscheme of P^n_{F_q} given by a membership predicate.

    ``dim`` is the user-declared dimension m; it is never computed.  When
    ``finite`` is set the scheme is that finite set of closed points (still
    cut by the other predicates).
    """

    n: int
    base: FieldCtx
    equations: tuple[MPoly, ...] = ()
    non_equations: tuple[MPoly, ...] = ()
    excluded: tuple[ClosedPoint, ...] = ()
    dim: int | None = None
    name: str = ""
    finite: tuple[ClosedPoint, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "non_equations", tuple(self.non_equations))
        object.__setattr__(self, "excluded", tuple(self.excluded))
        if self.finite is not None:
            object.__setattr__(self, "finite", tuple(self.finite))
        for f in self.equations + self.non_equations:
            if f.nvars != self.n + 1:
                raise ValueError(f"{f} is not a polynomial in {self.n + 1} variables")
            if f.ctx != self.base:
                raise FieldMismatch(f"{f} is not defined over {self.base}")
            if not f.is_homogeneous():
                raise ValueError(f"{f} is not homogeneous")
        for z in self.excluded + (self.finite or ()):
            if z.base != self.base or z.n != self.n:
                raise FieldMismatch(f"{z} is not a closed point of P^{self.n} over {self.base}")

    @property
    def q(self) -> int:
        return self.base.q

    def contains(self, P: ProjPoint) -> bool:
        K = P.field
        emb = build_embedding(self.base, K)
        row = np.array([P.key], dtype=np.int64)
        if self.finite is not None and not _in_rows(row, _finite_rows(self, K))[0]:
            return False
        return bool(_member_mask(self, row, K, emb, skip_linear=False)[0])

    def contains_closed(self, x: ClosedPoint) -> bool:
        return self.contains(x.rep)

    def minus(self, points: Iterable[ClosedPoint], name: str = "") -> "Subscheme":
        return replace(self, excluded=self.excluded + tuple(points), name=name or self.name)

    def with_dim(self, m: int) -> "Subscheme":
        return replace(self, dim=m)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"Subscheme{label}(P^{self.n}/{self.base}, eqs={[str(f) for f in self.equations]}, "
                f"non_eqs={[str(f) for f in self.non_equations]}, excluded={len(self.excluded)})")


def projective_space(n: int, base: FieldCtx) -> Subscheme:
    return Subscheme(n, base, dim=n, name=f"P^{n}")


def finite_scheme(points: Sequence[ClosedPoint], base: FieldCtx, n: int) -> Subscheme:
    return Subscheme(n, base, finite=tuple(points), dim=0, name="finite")


def line_at_infinity_minus(q_base: FieldCtx, removed: Sequence[Sequence]) -> Subscheme:
    """{x0 = 0} in P^2 with the listed rational points removed."""
    L = Subscheme(2, q_base, equations=(parse("x0", 3, q_base),), dim=1, name="L")
    pts = [closed_point(c, q_base) for c in removed]
    uniq = []
    for z in pts:
        if z not in uniq:
            uniq.append(z)
    return L.minus(uniq, name="U")


# --------------------------------------------------------------------------
# vectorised evaluation


def eval_array(f: MPoly, rows: np.ndarray, K: FieldCtx, emb: Embedding,
               _pow_cache: dict | None = None) -> np.ndarray:
    """Values of ``f`` at each row of encodings (shape (N, nvars))."""
    N = rows.shape[0]
    acc = np.zeros(N, dtype=np.int64)
    cache = {} if _pow_cache is None else _pow_cache
    for e, v in f.items_raw():
        term = np.full(N, emb.apply_value(v), dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                key = (i, k)
                if key not in cache:
                    cache[key] = K.pow_array(rows[:, i], k)
                term = K.mul_array(term, cache[key])
        acc = K.add_array(acc, term)
    return acc


def _in_rows(rows: np.ndarray, table: list[tuple[int, ...]]) -> np.ndarray:
    hit = np.zeros(rows.shape[0], dtype=bool)
    for t in table:
        hit |= np.all(rows == np.asarray(t, dtype=np.int64), axis=1)
    return hit


def _finite_rows(X: Subscheme, K: FieldCtx) -> list[tuple[int, ...]]:
    out = []
    for z in X.finite or ():
        if K.k % z.field.k == 0:
            out.extend(z.embedded_orbit(K))
    return out


def _member_mask(X: Subscheme, rows, K, emb, skip_linear=True) -> np.ndarray:
    mask = np.ones(rows.shape[0], dtype=bool)
    cache: dict = {}
    for f in X.equations:
        if skip_linear and f.degree() <= 1:
            continue
        mask &= eval_array(f, rows, K, emb, cache) == 0
    for g in X.non_equations:
        mask &= eval_array(g, rows, K, emb, cache) != 0
    ex = []
    for z in X.excluded:
        if K.k % z.field.k == 0:
            ex.extend(z.embedded_orbit(K))
    if ex:
        mask &= ~_in_rows(rows, ex)
    return mask


def _linear_basis(X: Subscheme):
    """RREF basis rows (over the base field) of the linear span cut out by
    the degree <= 1 equations, or None if the scheme is empty."""
    ctx = X.base
    lin = []
    for f in X.equations:
        if f.is_zero():
            continue
        if f.degree() == 0:
            return None
        if f.degree() == 1:
            lin.append(f.coefficient_vector(1))
    for g in X.non_equations:
        if g.is_zero():
            return None
    if not lin:
        return [[1 if i == j else 0 for j in range(X.n + 1)] for i in range(X.n + 1)]
    basis = linalg.nullspace(lin, ctx, X.n + 1)
    if not basis:
        return None
    R, _ = linalg.rref(basis, ctx, X.n + 1)
    return R


def _projective_chunks(Q: int, t: int, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """Normalized points of P^t over encodings 0..Q-1, in lex order."""
    for lead in range(t, -1, -1):
        free = t - lead
        total = Q**free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
            block = np.zeros((idx.size, t + 1), dtype=np.int64)
            block[:, lead] = 1
            rem = idx
            for col in range(t, lead, -1):
                block[:, col] = rem % Q
                rem = rem // Q
            yield block


def _point_chunks(X: Subscheme, r: int, budget: int):
    """Yield (K, emb, rows) blocks of X(F_{q^r}) in lex order."""
    K, emb = extension(X.base, r)
    if X.finite is not None:
        rows = sorted(set(_finite_rows(X, K)))
        if rows:
            arr = np.array(rows, dtype=np.int64)
            yield K, emb, arr[_member_mask(X, arr, K, emb, skip_linear=False)]
        return
    B = _linear_basis(X)
    if B is None:
        return
    t = len(B) - 1
    Q = K.q
    candidates = (Q ** (t + 1) - 1) // (Q - 1)
    if candidates > budget:
        raise BudgetExceeded(
            f"enumerating X(F_{{q^{r}}}) needs {candidates} candidate points of P^{t}, "
            f"over the budget {budget}; lower the degree cutoff or raise the budget")
    K._need_tables()
    Bk = np.array([[emb.apply_value(v) for v in row] for row in B], dtype=np.int64)
    for lam in _projective_chunks(Q, t):
        rows = np.zeros((lam.shape[0], X.n + 1), dtype=np.int64)
        for i in range(t + 1):
            for j in range(X.n + 1):
                if Bk[i, j]:
                    rows[:, j] = K.add_array(rows[:, j], K.mul_array(lam[:, i], Bk[i, j]))
        yield K, emb, rows[_member_mask(X, rows, K, emb)]


def point_array(X: Subscheme, r: int, budget: int = DEFAULT_POINT_BUDGET):
    """(K, embedding, rows) with rows the encodings of X(F_{q^r}) in lex order."""
    if r < 1:
        raise ValueError("extension degree must be >= 1")
    K, emb = extension(X.base, r)
    blocks = [rows for _, _, rows in _point_chunks(X, r, budget)]
    if blocks:
        arr = np.concatenate(blocks)
    else:
        arr = np.zeros((0, X.n + 1), dtype=np.int64)
    return K, emb, arr


def enumerate_points(X: Subscheme, r: int, budget: int = DEFAULT_POINT_BUDGET) -> list[ProjPoint]:
    """X(F_{q^r}) as normalized points in lex order."""
    K, _, arr = point_array(X, r, budget)
    return [ProjPoint(tuple(FqElem(K, int(v)) for v in row)) for row in arr]


def count_points(X: Subscheme, r: int, budget: int = DEFAULT_POINT_BUDGET) -> int:
    """N_r = #X(F_{q^r})."""
    if r < 1:
        raise ValueError("extension degree must be >= 1")
    return sum(int(rows.shape[0]) for _, _, rows in _point_chunks(X, r, budget))


# --------------------------------------------------------------------------
# Frobenius orbits


def _lex_le(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise A <= B in lex order."""
    le = np.ones(A.shape[0], dtype=bool)
    undecided = np.ones(A.shape[0], dtype=bool)
    for j in range(A.shape[1]):
        lt = A[:, j] < B[:, j]
        gt = A[:, j] > B[:, j]
        le[undecided & gt] = False
        undecided &= ~(lt | gt)
    return le


def _proper_divisors(r):
    return [s for s in range(1, r) if r % s == 0]


def _orbit_flags(X, rows, K, emb, r, verify=True):
    """(exact_degree_r, is_lex_min_in_orbit) for each row."""
    exact = np.ones(rows.shape[0], dtype=bool)
    is_rep = np.ones(rows.shape[0], dtype=bool)
    cur = rows
    divisors = set(_proper_divisors(r))
    for s in range(1, r):
        cur = K.frob_array(cur, X.base.k)
        if verify:
            if X.finite is not None:
                ok = _in_rows(cur, _finite_rows(X, K)) & _member_mask(X, cur, K, emb, False)
            else:
                ok = _member_mask(X, cur, K, emb, skip_linear=False)
            if not np.all(ok):
                raise AssertionError("membership is not Frobenius-stable; is X defined over F_q?")
        if s in divisors:
            exact &= np.any(cur != rows, axis=1)
        is_rep &= _lex_le(rows, cur)
    return exact, is_rep


def closed_point_counts_orbits(X: Subscheme, E: int, budget: int = DEFAULT_POINT_BUDGET,
                               verify: bool = True) -> list[tuple[int, int]]:
    """c_r for r <= E by partitioning X(F_{q^r}) into Frobenius orbits."""
    out = []
    for r in range(1, E + 1):
        c = 0
        for K, emb, rows in _point_chunks(X, r, budget):
            exact, is_rep = _orbit_flags(X, rows, K, emb, r, verify)
            c += int(np.count_nonzero(exact & is_rep))
        out.append((r, c))
    return out


def closed_points(X: Subscheme, E: int, budget: int = DEFAULT_POINT_BUDGET,
                  verify: bool = True, min_degree: int = 1) -> list[ClosedPoint]:
    """Closed points of degree <= E, sorted by (degree, representative)."""
    if E < 1:
        raise ValueError("degree cutoff must be >= 1")
    out = []
    for r in range(min_degree, E + 1):
        for K, emb, rows in _point_chunks(X, r, budget):
            exact, is_rep = _orbit_flags(X, rows, K, emb, r, verify)
            reps = rows[exact & is_rep]
            conj = [reps]
            for _ in range(1, r):
                conj.append(K.frob_array(conj[-1], X.base.k))
            for i in range(reps.shape[0]):
                orbit = tuple(ProjPoint(tuple(FqElem(K, int(v)) for v in c[i])) for c in conj)
                out.append(ClosedPoint(orbit[0], r, X.base, orbit, X))
    return out


def mobius(n: int) -> int:
    if n == 1:
        return 1
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def counts_from_point_counts(N: Sequence[int]) -> list[tuple[int, int]]:
    """Closed-point counts from N_1..N_E by Moebius inversion."""
    out = []
    for r in range(1, len(N) + 1):
        total = sum(mobius(r // d) * N[d - 1] for d in range(1, r + 1) if r % d == 0)
        if total % r:
            raise AssertionError(f"Moebius sum {total} not divisible by {r}")
        out.append((r, total // r))
    return out


def closed_point_counts_moebius(X: Subscheme, E: int,
                                budget: int = DEFAULT_POINT_BUDGET) -> list[tuple[int, int]]:
    """c_r = (1/r) sum_{d | r} mu(r/d) N_d for r <= E."""
    N = [count_points(X, r, budget) for r in range(1, E + 1)]
    return counts_from_point_counts(N)


# --------------------------------------------------------------------------
# zeta functions


@dataclass(frozen=True)
class ZetaTruncation:
    """prod_{deg x <= E} (1 - q^{-s deg x}), with per-degree partial products."""

    s: int
    E: int
    q: int
    value: Fraction
    per_degree: tuple[tuple[int, int, Fraction], ...]
    tail_bound: float | None = None
    below_convergence: bool = False

    def __float__(self):
        return float(self.value)


def _coprime_fraction(num: int, den: int) -> Fraction:
    # caller guarantees gcd(num, den) == 1; skips a gcd on huge integers
    out = Fraction.__new__(Fraction)
    out._numerator = num
    out._denominator = den
    return out


def euler_product(q: int, s: int, counts: Sequence[tuple[int, int]]):
    """prod_r (1 - q^{-s r})^{c_r} and its running partial products.

    The numerator prod (q^{sr} - 1)^{c_r} is prime to q, so every partial
    product is already in lowest terms over a power of q.
    """
    num, den = 1, 1
    per = []
    for r, c in counts:
        qsr = q ** (s * r)
        num *= (qsr - 1) ** c
        den *= qsr**c
        per.append((r, c, _coprime_fraction(num, den)))
    value = per[-1][2] if per else Fraction(1)
    return value, tuple(per)


def _tail_bound(q, s, m, counts, E):
    """Sum_{r>E} c_r q^{-sr} bounded with c_r <= C q^{rm}/r, C from data."""
    if m is None or s <= m:
        return None
    C = max((r * c / q ** (r * m) for r, c in counts), default=0.0)
    if C == 0:
        return 0.0
    ratio = q ** (m - s)
    return C * ratio ** (E + 1) / ((E + 1) * (1 - ratio))


def zeta_inverse_truncated(X: Subscheme, s: int, E: int,
                           budget: int = DEFAULT_POINT_BUDGET,
                           counts: Sequence[tuple[int, int]] | None = None) -> ZetaTruncation:
    """Exact truncated Euler product for zeta_X(s)^{-1}."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if E < 1:
        raise ValueError("degree cutoff must be >= 1")
    if counts is None:
        counts = closed_point_counts_moebius(X, E, budget)
    value, per = euler_product(X.q, s, counts)
    below = X.dim is not None and s <= X.dim
    return ZetaTruncation(s, E, X.q, value, per, _tail_bound(X.q, s, X.dim, counts, E), below)


def closed_form_zeta_inverse(X: Subscheme, s: int) -> Fraction | None:
    """Exact zeta_X(s)^{-1} when X is a linear subspace (or empty) minus
    finitely many closed points; None otherwise."""
    if X.finite is not None:
        return Fraction(1) if not X.finite else None
    if any(f.degree() > 1 for f in X.equations) or X.non_equations:
        if any(g.is_zero() for g in X.non_equations):
            return Fraction(1)
        return None
    B = _linear_basis(X)
    if B is None:
        return Fraction(1)
    t = len(B) - 1
    q = X.q
    value = Fraction(1)
    for i in range(t + 1):
        value *= 1 - Fraction(q**i, q**s)
    seen = []
    L = replace(X, excluded=())
    for z in X.excluded:
        if z in seen or not L.contains_closed(z):
            continue
        seen.append(z)
        value /= 1 - Fraction(1, q ** (s * z.degree))
    return value


# --------------------------------------------------------------------------
# scheme files


def _poly_list(items, n, ctx, where):
    out = []
    for i, src in enumerate(items or []):
        try:
            out.append(parse(src, n + 1, ctx))
        except ConfigError as exc:
            raise ConfigError(f"{where}[{i}]: {exc}") from exc
    return out


def scheme_from_json(obj: dict) -> Subscheme:
    """Build a Subscheme from the JSON schema
    ``{"p", "k", "n", "equations", "non_equations", "excluded", "dim"}``."""
    try:
        ctx = field_create(int(obj["p"]), int(obj.get("k", 1)))
        n = int(obj["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"scheme needs integer p, n (and optional k): {exc}") from exc
    eqs = _poly_list(obj.get("equations"), n, ctx, "equations")
    neqs = _poly_list(obj.get("non_equations"), n, ctx, "non_equations")
    excluded = []
    for i, coords in enumerate(obj.get("excluded") or []):
        if not isinstance(coords, list) or len(coords) != n + 1:
            raise ConfigError(f"excluded[{i}] must list {n + 1} coordinates")
        try:
            z = closed_point([element_from_json(c, ctx) for c in coords], ctx)
        except ValueError as exc:
            raise ConfigError(f"excluded[{i}]: {exc}") from exc
        if z not in excluded:
            excluded.append(z)
    dim = obj.get("dim")
    return Subscheme(n, ctx, tuple(eqs), tuple(neqs), tuple(excluded),
                     None if dim is None else int(dim), str(obj.get("name", "")))


def load_scheme(path) -> Subscheme:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return scheme_from_json(obj)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def scheme_to_json(X: Subscheme) -> dict:
    if X.finite is not None:
        raise ValueError("finite schemes have no JSON form")
    if any(z.degree > 1 for z in X.excluded):
        raise ValueError("only rational excluded points serialize")
    out = {"p": X.base.p, "k": X.base.k, "n": X.n,
           "equations": [str(f) for f in X.equations],
           "non_equations": [str(f) for f in X.non_equations],
           "excluded": [[list(c.coeffs) for c in z.rep.coords] for z in X.excluded]}
    if X.dim is not None:
        out["dim"] = X.dim
    if X.name:
        out["name"] = X.name
    return out


MAX_EXACT_DIGITS = 1000


def format_big_int(m: int) -> str:
    """Decimal string, or empty when it would exceed MAX_EXACT_DIGITS digits."""
    if m.bit_length() > MAX_EXACT_DIGITS * 3.32:
        return ""
    return str(m)


def closed_point_table_csv(ztr: ZetaTruncation) -> str:
    """One row per degree.  Exact partial products whose numerator or
    denominator is too long to print are left blank; the decimal column is
    always filled."""
    lines = ["degree,count,partial_product_num,partial_product_den,partial_product"]
    for r, c, v in ztr.per_degree:
        num, den = format_big_int(v.numerator), format_big_int(v.denominator)
        if not (num and den):
            num = den = ""
        lines.append(f"{r},{c},{num},{den},{float(v):.10f}")
    return "\n".join(lines) + "\n"
