"""Taylor conditions at closed points.

A locally free quotient Q of the restricted cotangent sheaf is handled one
fiber at a time: at a closed point x it is an l x n matrix over kappa(x)
acting on gradients written in the canonical affine chart.  A section f
satisfies the condition at x when (f(x), Q . grad f(x)) is nonzero.  Twists
by O(d) are trivialised by the x_j^{-d} normalisation of ``jet_at``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import linalg
from .errors import ConfigError, FieldMismatch, PreconditionError
from .geom import ClosedPoint, ProjPoint, Subscheme, closed_point, closed_points
from .gf import FieldCtx, FqElem, build_embedding, element_from_json
from .mpoly import Jet, MPoly, chart_of, evaluate, jet_at, jet_monomials, monomials


# --------------------------------------------------------------------------
# fibers


def taylor1_fiber(f: MPoly, x) -> tuple[FqElem, tuple[FqElem, ...]]:
    """(value, gradient) of x_j^{-d} f at x in the canonical chart."""
    jet = jet_at(f, x, 2)
    return jet.value, jet.gradient


@dataclass(frozen=True, eq=False)
class QuotientAtPoint:
    """Fiber at ``point`` of a rank-``ell`` quotient of the cotangent sheaf.

    ``matrix`` is ell x n over kappa(x), acting on gradients in ``chart``.
    """

    point: ClosedPoint
    ell: int
    matrix: tuple[tuple[FqElem, ...], ...]
    chart: int

    def __post_init__(self):
        K = self.point.field
        n = self.point.n
        if len(self.matrix) != self.ell or any(len(row) != n for row in self.matrix):
            raise ValueError(f"quotient matrix must be {self.ell} x {n}")
        if any(c.ctx != K for row in self.matrix for c in row):
            raise FieldMismatch("quotient matrix entries must lie in kappa(x)")
        if linalg.rank(self.raw(), K, n) != self.ell:
            raise PreconditionError(f"quotient matrix at {self.point} is not surjective "
                                    f"(rank < {self.ell})")

    def raw(self) -> list[list[int]]:
        return [[c.value for c in row] for row in self.matrix]

    def apply(self, gradient: Sequence[FqElem]) -> tuple[FqElem, ...]:
        K = self.point.field
        out = linalg.mat_vec(self.raw(), [g.value for g in gradient], K)
        return tuple(FqElem(K, v) for v in out)

    def fiber(self, f: MPoly) -> tuple[FqElem, ...]:
        """Image of f in the fiber of E_d: (value, Q . gradient)."""
        jet = jet_at(f, self.point, 2, chart=self.chart)
        return (jet.value,) + self.apply(jet.gradient)


def eval_quotient_condition(qd: QuotientAtPoint | None, f: MPoly) -> bool:
    """True iff f does not vanish in the fiber of E_d; ``None`` stands for
    a point outside the carrier, where the condition holds by convention."""
    if qd is None:
        return True
    return any(c.value for c in qd.fiber(f))


# --------------------------------------------------------------------------
# built-in quotients


def _gradients_in_chart(polys: Iterable[MPoly], x: ClosedPoint) -> list[list[int]]:
    return [[g.value for g in jet_at(f, x, 2).gradient] for f in polys]


def smoothness_quotient(X: Subscheme, x: ClosedPoint) -> QuotientAtPoint:
    """Omega^1_X at x as a quotient of the cotangent space of P^n.

    Its kernel is the row space of the Jacobian of X's equations, so the
    rows of the matrix span the tangent space of X at x.
    """
    if X.dim is None:
        raise PreconditionError("smoothness quotient needs the declared dimension of X")
    n = X.n
    K = x.field
    J = [row for row in _gradients_in_chart(X.equations, x) if any(row)]
    rk = linalg.rank(J, K, n) if J else 0
    if rk != n - X.dim:
        raise PreconditionError(f"X is not smooth of dimension {X.dim} at {x}: "
                                f"Jacobian rank {rk}, expected {n - X.dim}")
    tangent = linalg.nullspace(J, K, n) if J else [[int(i == j) for j in range(n)]
                                                    for i in range(n)]
    matrix = tuple(tuple(FqElem(K, v) for v in row) for row in tangent)
    return QuotientAtPoint(x, X.dim, matrix, chart_of(x.rep.coords))


def constant_quotient(matrix_rows: Sequence[Sequence], base: FieldCtx):
    """Provider for a quotient given by one matrix over F_q at every point."""
    rows = [[base(c) if not isinstance(c, FqElem) else c for c in row] for row in matrix_rows]

    def provider(x: ClosedPoint) -> QuotientAtPoint:
        emb = x.embedding
        m = tuple(tuple(emb(c) for c in row) for row in rows)
        return QuotientAtPoint(x, len(rows), m, chart_of(x.rep.coords))

    return provider


_CONIC_MONOMIALS = monomials(3, 2)  # x0^2, x0x1, x0x2, x1^2, x1x2, x2^2


@dataclass(frozen=True, eq=False)
class ConicData:
    """a x0^2 + b x0x1 + c x0x2 + d x1^2 + e x1x2 + f x2^2 over kappa(x)."""

    coefficients: tuple[FqElem, ...]
    gram: tuple[tuple[FqElem, ...], ...]
    smooth: bool
    point: ClosedPoint | None = None

    @property
    def poly(self) -> MPoly:
        K = self.coefficients[0].ctx
        return MPoly(3, K, dict(zip(_CONIC_MONOMIALS, self.coefficients)))

    def gram_det(self) -> FqElem:
        K = self.coefficients[0].ctx
        return FqElem(K, linalg.det([[c.value for c in row] for row in self.gram], K))


def _gram(coeffs: Sequence[FqElem]) -> tuple[tuple[FqElem, ...], ...]:
    a, b, c, d, e, f = coeffs
    half = coeffs[0].ctx(2).inv()
    return ((a, b * half, c * half),
            (b * half, d, e * half),
            (c * half, e * half, f))


def conic_through(Y: Sequence, x: ClosedPoint) -> ConicData:
    """The conic through the four F_q-points of Y and the representative of x.

    Raises PreconditionError unless the five points impose independent
    conditions and the resulting conic is smooth.
    """
    K = x.field
    if K.p == 2:
        raise PreconditionError("conic construction needs odd characteristic")
    if len(Y) != 4:
        raise ValueError("Y must consist of four points")
    pts = []
    for y in Y:
        if isinstance(y, ClosedPoint):
            if y.degree != 1:
                raise ValueError("points of Y must be rational")
            y = y.rep
        coords = y.coords if isinstance(y, ProjPoint) else [
            c if isinstance(c, FqElem) else x.base(c) for c in y]
        emb = build_embedding(coords[0].ctx, K)
        pts.append([emb(c) for c in coords])
    pts.append(list(x.rep.coords))
    rows = []
    for P in pts:
        row = []
        for e in _CONIC_MONOMIALS:
            v = K.one
            for c, k in zip(P, e):
                v = v * c**k
            row.append(v.value)
        rows.append(row)
    sol = linalg.nullspace(rows, K, 6)
    if len(sol) != 1:
        raise PreconditionError(f"the five points through {x} do not impose independent "
                                f"conditions on conics (solution dimension {len(sol)})")
    coeffs = tuple(FqElem(K, v) for v in linalg.normalize_first_nonzero(sol[0], K))
    gram = _gram(coeffs)
    data = ConicData(coeffs, gram, False, x)
    smooth = not data.gram_det().is_zero()
    if not smooth:
        raise PreconditionError(f"the conic through Y and {x} is singular")
    return ConicData(coeffs, gram, True, x)


def conic_tangent_quotient(C: ConicData, x: ClosedPoint) -> QuotientAtPoint:
    """Rank-1 quotient pairing a gradient with the tangent direction of C at x."""
    K = x.field
    if C.coefficients[0].ctx != K:
        raise FieldMismatch("conic and point live over different fields")
    jet = jet_at(C.poly, x, 2)
    if jet.value.value:
        raise PreconditionError(f"{x} does not lie on the conic")
    g = [c.value for c in jet.gradient]
    if not any(g):
        raise PreconditionError(f"the conic is singular at {x}")
    v = linalg.normalize_first_nonzero(linalg.nullspace([g], K, len(g))[0], K)
    return QuotientAtPoint(x, 1, (tuple(FqElem(K, c) for c in v),), chart_of(x.rep.coords))


def conic_provider(Y: Sequence):
    def provider(x: ClosedPoint) -> QuotientAtPoint:
        return conic_tangent_quotient(conic_through(Y, x), x)

    return provider


CONIC_Y = ((1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1))


def conic_family(base: FieldCtx, Y=CONIC_Y):
    """(Y, U) for the conic family: U is the line x0 = 0 with the points
    where lines through two points of Y meet it removed."""
    pts = [[base(c) for c in y] for y in Y]
    removed = []
    for P, Q in itertools.combinations(pts, 2):
        # line through P and Q is their cross product (a, b, c); on x0 = 0
        # it leaves the point (0 : c : -b)
        b = P[2] * Q[0] - P[0] * Q[2]
        c = P[0] * Q[1] - P[1] * Q[0]
        if b.value or c.value:
            z = closed_point([base.zero, c, -b], base)
            if z not in removed:
                removed.append(z)
    L = Subscheme(2, base, equations=(MPoly.var(3, base, 0),), dim=1, name="L")
    return tuple(tuple(y) for y in pts), L.minus(sorted(removed), name="U")


# --------------------------------------------------------------------------
# other condition kinds


def restrict_to_Z(f: MPoly, Z: Sequence[ClosedPoint], charts: Sequence[int] | None = None
                  ) -> tuple[FqElem, ...]:
    """Per-component value of x_{j_i}^{-d} f at the representative of z_i."""
    out = []
    for i, z in enumerate(Z):
        j = chart_of(z.rep.coords) if charts is None else charts[i]
        if not z.rep.coords[j].value:
            raise PreconditionError(f"coordinate x{j} vanishes at {z}")
        out.append(jet_at(f, z, 1, chart=j).value)
    return tuple(out)


def eval_jet_condition(x: ClosedPoint, order: int, allowed, f: MPoly,
                       complement: bool = False) -> bool:
    """jet_at(f, x, order) in ``allowed`` (or not in it, for a complement)."""
    for jet in allowed:
        if jet.order != order or jet.center_field != x.field:
            raise FieldMismatch(f"allowed jet {jet} does not match order {order} at {x}")
    jet = jet_at(f, x, order)
    return (jet in allowed) != complement


# --------------------------------------------------------------------------
# condition classes


@dataclass(eq=False)
class QuotientNonvanishing:
    """Nonvanishing in the fiber of E_d at each closed point of ``carrier``."""

    carrier: Subscheme
    provider: Callable[[ClosedPoint], QuotientAtPoint]
    ell: int
    name: str = "quotient"
    _cache: dict = field(default_factory=dict, repr=False)

    def at(self, x: ClosedPoint) -> QuotientAtPoint | None:
        if x not in self._cache:
            if not self.carrier.contains_closed(x):
                self._cache[x] = None
            else:
                qd = self.provider(x)
                if qd.ell != self.ell:
                    raise PreconditionError(f"provider returned rank {qd.ell}, expected {self.ell}")
                self._cache[x] = qd
        return self._cache[x]

    def holds(self, f: MPoly, x: ClosedPoint) -> bool:
        return eval_quotient_condition(self.at(x), f)

    def local_probability(self, x: ClosedPoint) -> Fraction:
        return 1 - Fraction(1, x.base.q ** ((self.ell + 1) * x.degree))


def smoothness_condition(X: Subscheme) -> QuotientNonvanishing:
    if X.dim is None:
        raise PreconditionError("declare the dimension of X for the smoothness condition")
    return QuotientNonvanishing(X, lambda x: smoothness_quotient(X, x), X.dim, "smoothness")


def conic_condition(Y: Sequence, carrier: Subscheme) -> QuotientNonvanishing:
    return QuotientNonvanishing(carrier, conic_provider(Y), 1, "conic")


def constant_condition(carrier: Subscheme, matrix_rows) -> QuotientNonvanishing:
    return QuotientNonvanishing(carrier, constant_quotient(matrix_rows, carrier.base),
                                len(matrix_rows), "constant")


@dataclass(frozen=True, eq=False)
class JetAllowedSet:
    """Order-``order`` jets at ``point`` must lie in ``allowed`` (or outside
    it when ``complement`` is set, so small exclusions stay explicit)."""

    point: ClosedPoint
    order: int
    allowed: frozenset
    complement: bool = False

    def __post_init__(self):
        for jet in self.allowed:
            if jet.order != self.order or jet.center_field != self.point.field:
                raise FieldMismatch("allowed jets must match the point and order")

    @property
    def space_size(self) -> int:
        return self.point.field.q ** len(jet_monomials(self.point.n, self.order))

    def holds(self, f: MPoly) -> bool:
        return eval_jet_condition(self.point, self.order, self.allowed, f, self.complement)

    def local_probability(self) -> Fraction:
        size = len(self.allowed)
        if self.complement:
            size = self.space_size - size
        return Fraction(size, self.space_size)


@dataclass(frozen=True, eq=False)
class RestrictionToZ:
    """f|_Z must lie in T, a subset of prod kappa(z_i)."""

    points: tuple[ClosedPoint, ...]
    allowed: frozenset
    charts: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.charts is None:
            object.__setattr__(self, "charts", tuple(chart_of(z.rep.coords) for z in self.points))
        for t in self.allowed:
            if len(t) != len(self.points) or any(
                    v.ctx != z.field for v, z in zip(t, self.points)):
                raise FieldMismatch("elements of T must be tuples over the residue fields of Z")
        for z, j in zip(self.points, self.charts):
            if not z.rep.coords[j].value:
                raise PreconditionError(f"coordinate x{j} vanishes at {z}")

    @property
    def h0_size(self) -> int:
        out = 1
        for z in self.points:
            out *= z.field.q
        return out

    def holds(self, f: MPoly) -> bool:
        return restrict_to_Z(f, self.points, self.charts) in self.allowed

    def local_probability(self) -> Fraction:
        return Fraction(len(self.allowed), self.h0_size)


@dataclass(eq=False)
class TaylorCondition:
    """A combination of condition specs.

    At a point carrying a jet condition only that jet condition applies; at
    a point of Z only the restriction-to-Z condition applies; elsewhere every
    quotient condition whose carrier contains the point applies.
    """

    quotients: tuple = ()
    jets: tuple = ()
    z: RestrictionToZ | None = None
    name: str = ""

    def __post_init__(self):
        self.quotients = tuple(self.quotients)
        self.jets = tuple(self.jets)
        self._jet_at = {j.point: j for j in self.jets}
        self._z_points = set(self.z.points) if self.z else set()

    @property
    def base(self) -> FieldCtx:
        for qc in self.quotients:
            return qc.carrier.base
        for j in self.jets:
            return j.point.base
        if self.z:
            return self.z.points[0].base
        raise ValueError("empty condition")

    @property
    def n(self) -> int:
        for qc in self.quotients:
            return qc.carrier.n
        for j in self.jets:
            return j.point.n
        if self.z:
            return self.z.points[0].n
        raise ValueError("empty condition")

    @property
    def ell(self) -> int:
        return min((qc.ell for qc in self.quotients), default=self.n)

    def quotient_data(self, x: ClosedPoint) -> list[QuotientAtPoint]:
        if x in self._jet_at or x in self._z_points:
            return []
        return [qd for qd in (qc.at(x) for qc in self.quotients) if qd is not None]

    def holds_at(self, f: MPoly, x: ClosedPoint) -> bool:
        if x in self._jet_at:
            return self._jet_at[x].holds(f)
        if x in self._z_points:
            return True
        data = self.quotient_data(x)
        if not data:
            return True
        value = jet_at(f, x, 2)
        if value.value.value:
            return True
        return all(any(c.value for c in qd.apply(value.gradient)) for qd in data)

    def check_points(self, E: int, budget: int | None = None) -> list[ClosedPoint]:
        """Closed points of degree <= E where some condition is imposed,
        sorted by (degree, representative)."""
        pts = set()
        for qc in self.quotients:
            kw = {} if budget is None else {"budget": budget}
            for x in closed_points(qc.carrier, E, **kw):
                if x not in self._z_points:
                    pts.add(x)
        pts.update(j.point for j in self.jets)
        return sorted(pts)

    def local_probability(self, x: ClosedPoint) -> Fraction:
        if x in self._jet_at:
            return self._jet_at[x].local_probability()
        data = self.quotient_data(x)
        if not data:
            return Fraction(1)
        if len(data) == 1:
            return 1 - Fraction(1, x.base.q ** ((data[0].ell + 1) * x.degree))
        return _multi_quotient_probability(data, x)

    def satisfied(self, f: MPoly, points: Sequence[ClosedPoint]) -> bool:
        if self.z is not None and not self.z.holds(f):
            return False
        return all(self.holds_at(f, x) for x in points)


def _multi_quotient_probability(data, x: ClosedPoint) -> Fraction:
    """Fraction of 1-jets (value, gradient) with value != 0 or every
    Q_i . gradient != 0, by enumerating the gradient space."""
    K = x.field
    n = x.n
    mats = [qd.raw() for qd in data]
    good = 0
    for grad in itertools.product(range(K.q), repeat=n):
        if all(any(linalg.mat_vec(M, grad, K)) for M in mats):
            good += 1
    Q = K.q
    return Fraction(Q - 1, Q) + Fraction(good, Q ** (n + 1))


# --------------------------------------------------------------------------
# condition files


def _points_from_json(items, base, where):
    out = []
    for i, coords in enumerate(items):
        try:
            out.append(closed_point([element_from_json(c, base) for c in coords], base))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{where}[{i}]: {exc}") from exc
    return out


def condition_from_json(obj: dict, scheme: Subscheme) -> TaylorCondition:
    """Condition description in JSON.

    ``{"kind": "smoothness"}``, ``{"kind": "conic", "Y": [[..],..]}`` or
    ``{"kind": "constant", "matrix": [[..]]}`` build a quotient condition on
    ``scheme``.  Optional keys: ``"Z": [[coords], ...]`` with ``"T"`` (list of
    tuples of elements) and ``"jets": [{"point": [..], "order": M,
    "allowed": [{"exponents": value, ...}], "complement": bool}]``.
    """
    base = scheme.base
    kind = obj.get("kind", "smoothness")
    Z = None
    z_points = []
    if obj.get("Z"):
        z_points = _points_from_json(obj["Z"], base, "Z")
        T = set()
        for i, t in enumerate(obj.get("T", [])):
            if len(t) != len(z_points):
                raise ConfigError(f"T[{i}] must have one entry per point of Z")
            vals = []
            for z, v in zip(z_points, t):
                if z.degree != 1:
                    raise ConfigError("T entries in JSON are supported for rational Z only")
                vals.append(element_from_json(v, base))
            T.add(tuple(vals))
        Z = RestrictionToZ(tuple(z_points), frozenset(T))
    carrier = scheme.minus(z_points) if z_points else scheme
    if kind == "smoothness":
        quotients = (smoothness_condition(carrier),)
    elif kind == "conic":
        Y = obj.get("Y")
        if not Y or len(Y) != 4:
            raise ConfigError("conic condition needs four points Y")
        quotients = (conic_condition([[element_from_json(c, base) for c in y] for y in Y],
                                     carrier),)
    elif kind == "constant":
        rows = obj.get("matrix")
        if not rows:
            raise ConfigError("constant condition needs a matrix")
        quotients = (constant_condition(carrier, [[element_from_json(c, base) for c in row]
                                                  for row in rows]),)
    elif kind == "none":
        quotients = ()
    else:
        raise ConfigError(f"unknown condition kind {kind!r}")
    jets = []
    for i, jet_obj in enumerate(obj.get("jets", [])):
        (x,) = _points_from_json([jet_obj["point"]], base, f"jets[{i}].point")
        order = int(jet_obj.get("order", 2))
        mons = jet_monomials(scheme.n, order)
        allowed = set()
        for entry in jet_obj.get("allowed", []):
            vals = [0] * len(mons)
            for key, v in entry.items():
                e = tuple(int(c) for c in key.split(","))
                if e not in mons:
                    raise ConfigError(f"jets[{i}]: exponent {key} not of degree < {order}")
                vals[mons.index(e)] = element_from_json(v, base).value
            emb = x.embedding
            allowed.add(Jet(x.field, order, scheme.n, chart_of(x.rep.coords),
                            tuple(emb.apply_value(v) for v in vals)))
        jets.append(JetAllowedSet(x, order, frozenset(allowed), bool(jet_obj.get("complement"))))
    return TaylorCondition(quotients, tuple(jets), Z, name=kind)


def load_condition(path, scheme: Subscheme) -> TaylorCondition:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return condition_from_json(obj, scheme)
