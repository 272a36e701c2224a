"""Probabilities of Taylor conditions on S_d.

Every target (a closed point with its condition, or the finite scheme Z)
receives the images of the monomial basis of S_d in its fiber.  Those
fibers are rewritten over the prime field: an element of kappa(x) becomes
its base-p digits, and F_q-coefficients are split the same way.  The
evaluation map is then one integer matrix A over F_p, and the fibers of a
batch of polynomials are ``digits(c) @ A mod p``.

Exhaustive mode walks all of F_p^D in chunks (a table of low-digit images
plus one high-digit offset per chunk); Monte Carlo mode samples digits
with a Philox generator.  Both attribute the first failure of each
polynomial to a degree band.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionError
from .geom import (ClosedPoint, Subscheme, closed_point_counts_moebius, closed_points,
                   counts_from_point_counts,
                   euler_product, projective_space, zeta_inverse_truncated)
from .gf import FieldCtx, build_embedding, field_create
from .mpoly import (MPoly, chart_of, dehomogenize, evaluate, jet_at, jet_monomials,
                    monomials, partial)
from .taylor import JetAllowedSet, RestrictionToZ, TaylorCondition

DEFAULT_EXHAUSTIVE_BUDGET = 1 << 25
DEFAULT_IMAGE_BUDGET = 1 << 22
RNG_ALGORITHM = "numpy.Philox4x64-10/SeedSequence"
_CHUNK_BITS = 16
_MC_CHUNK = 4096

BANDS = ("low", "med", "high")


# --------------------------------------------------------------------------
# targets


@dataclass(eq=False)
class Target:
    """One summand of the evaluation map.

    ``segments`` lists (field, encodings of shape (N, L)) per block of
    columns; ``kind`` selects the predicate on the fiber.
    """

    kind: str  # "quotient", "jet" or "z"
    points: tuple[ClosedPoint, ...]
    segments: list
    blocks: tuple[int, ...] = ()  # quotient: column counts (1, l_1, l_2, ...)
    allowed: frozenset = frozenset()
    complement: bool = False
    local_probability: Fraction = Fraction(1)

    @property
    def degree(self) -> int:
        return self.points[0].degree if self.kind != "z" else 0

    @property
    def point(self) -> ClosedPoint | None:
        return self.points[0] if self.kind != "z" else None

    def fq_dim(self, base: FieldCtx) -> int:
        return sum(enc.shape[1] * (K.k // base.k) for K, enc in self.segments)


def _fiber_columns(f_list: Sequence[MPoly], x: ClosedPoint, qds) -> np.ndarray:
    rows = []
    for m in f_list:
        jet = jet_at(m, x, 2, chart=qds[0].chart)
        row = [jet.value.value]
        for qd in qds:
            row.extend(c.value for c in qd.apply(jet.gradient))
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(f_list), -1)


def build_targets(cond: TaylorCondition, d: int, points: Sequence[ClosedPoint],
                  include_z: bool = True) -> list[Target]:
    """Targets for the given check points (sorted by degree, then lex) and,
    optionally, the restriction to Z."""
    n = cond.n
    base = cond.base
    mons = [MPoly.monomial(base, e) for e in monomials(n + 1, d)]
    jets = {j.point: j for j in cond.jets}
    out = []
    for x in sorted(points):
        if x in jets:
            J: JetAllowedSet = jets[x]
            enc = np.array([jet_at(m, x, J.order).values for m in mons], dtype=np.int64)
            enc = enc.reshape(len(mons), -1)
            out.append(Target("jet", (x,), [(x.field, enc)], allowed=J.allowed,
                              complement=J.complement,
                              local_probability=J.local_probability()))
            continue
        qds = cond.quotient_data(x)
        if not qds:
            continue
        enc = _fiber_columns(mons, x, qds)
        out.append(Target("quotient", (x,), [(x.field, enc)],
                          blocks=(1,) + tuple(qd.ell for qd in qds),
                          local_probability=cond.local_probability(x)))
    if include_z and cond.z is not None:
        Z: RestrictionToZ = cond.z
        segs = []
        for z, j in zip(Z.points, Z.charts):
            enc = np.array([jet_at(m, z, 1, chart=j).values for m in mons], dtype=np.int64)
            segs.append((z.field, enc.reshape(len(mons), 1)))
        out.append(Target("z", Z.points, segs, allowed=Z.allowed,
                          local_probability=Z.local_probability()))
    return out


# --------------------------------------------------------------------------
# prime-field engine


def _digits(enc: np.ndarray, K: FieldCtx) -> np.ndarray:
    """Base-p digits of encodings, shape enc.shape + (K.k,)."""
    p = K.p
    powers = p ** np.arange(K.k, dtype=np.int64)
    return (enc[..., None] // powers) % p


class _Engine:
    """Evaluation map over F_p and the per-target predicates."""

    def __init__(self, targets: Sequence[Target], base: FieldCtx, n_monomials: int):
        self.targets = list(targets)
        self.base = base
        p, k = base.p, base.k
        self.p = p
        self.D = n_monomials * k
        cols = []
        self.layout = []  # per target: list of (start, stop) digit slices per column block
        pos = 0
        for t in self.targets:
            spans = []
            for K, enc in t.segments:
                emb = build_embedding(base, K)
                # rows (m, i): image of alpha^i * monomial m
                basis = [emb.apply_value(p ** i) for i in range(k)]
                per_i = [_digits(K.mul_array(enc, b) if K.q > 1 else enc, K) for b in basis]
                # shape (N, k, L, kK) -> (N*k, L*kK)
                blk = np.stack(per_i, axis=1)
                N, _, L, kK = blk.shape
                cols.append(blk.reshape(N * k, L * kK))
                spans.append((pos, pos + L * kK, L, K))
                pos += L * kK
            self.layout.append(spans)
        self.R = pos
        self.A = (np.concatenate(cols, axis=1) if cols else
                  np.zeros((self.D, 0), dtype=np.int64)).astype(np.int64)
        self.dtype = np.uint8 if p < 128 else np.int64
        self._codes = [self._allowed_codes(t, spans) for t, spans in zip(self.targets, self.layout)]

    # ---- predicates

    def _allowed_codes(self, t: Target, spans):
        if t.kind == "quotient":
            return None
        width = sum(stop - start for start, stop, _, _ in spans)
        if width * math.log2(self.p) > 62:
            raise BudgetExceeded(f"fiber of {t.kind} target too large to encode ({width} digits)")
        shifts = []
        shift = 1
        for _, _, L, K in spans:
            for _ in range(L):
                shifts.append(shift)
                shift *= K.q
        codes = []
        for item in t.allowed:
            vals = item.values if t.kind == "jet" else tuple(v.value for v in item)
            codes.append(sum(v * s for v, s in zip(vals, shifts)))
        return np.array(sorted(codes), dtype=np.int64)

    def _weights(self, spans) -> np.ndarray:
        w = []
        shift = 1
        for _, _, L, K in spans:
            for _ in range(L * K.k):
                w.append(shift)
                shift *= self.p
        return np.array(w, dtype=np.int64)

    def fail_matrix(self, imgs: np.ndarray) -> np.ndarray:
        """Boolean (B, T): target t fails for row b."""
        B = imgs.shape[0]
        out = np.zeros((B, len(self.targets)), dtype=bool)
        for ti, (t, spans) in enumerate(zip(self.targets, self.layout)):
            if t.kind == "quotient":
                start, stop, L, K = spans[0]
                kK = K.k
                val_nz = imgs[:, start:start + kK].any(axis=1)
                ok_all = np.ones(B, dtype=bool)
                c = start + kK
                for ell in t.blocks[1:]:
                    ok_all &= imgs[:, c:c + ell * kK].any(axis=1)
                    c += ell * kK
                out[:, ti] = ~(val_nz | ok_all)
            else:
                lo = spans[0][0]
                hi = spans[-1][1]
                code = imgs[:, lo:hi].astype(np.int64) @ self._weights(spans)
                inside = np.isin(code, self._codes[ti], assume_unique=False)
                out[:, ti] = inside if t.complement else ~inside
        return out

    # ---- images

    def images(self, cdig: np.ndarray) -> np.ndarray:
        return ((cdig.astype(np.int64) @ self.A) % self.p).astype(self.dtype)

    def span_table(self, rows: np.ndarray) -> np.ndarray:
        """All F_p-combinations of ``rows`` (r, R) as a (p^r, R) table."""
        p = self.p
        T = np.zeros((1, self.R), dtype=self.dtype)
        for row in rows:
            row = row.astype(self.dtype)
            parts = [T]
            cur = T
            for _ in range(p - 1):
                cur = self._add(cur, row)
                parts.append(cur)
            T = np.concatenate(parts, axis=0)
        return T

    def _add(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return ((a.astype(np.int64) + b) % self.p).astype(self.dtype)


# --------------------------------------------------------------------------
# linear algebra mod p


def _rref_mod_p(M: np.ndarray, p: int):
    """Reduced row echelon form over F_p; returns (rank, pivot columns)."""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    inv = [0] + [pow(a, -1, p) for a in range(1, p)]
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * inv[M[r, c]]) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return r, pivots


# --------------------------------------------------------------------------
# evaluation map


@dataclass(eq=False)
class EvaluationMap:
    """S_d -> direct sum of target fibers, written over the prime field.

    ``rank`` and ``target_dim`` are F_q-dimensions (F_p-ranks divided by k).
    """

    d: int
    condition: TaylorCondition
    targets: list
    engine: _Engine
    rank: int
    target_dim: int
    source_dim: int
    pivot_rows: list = field(repr=False, default_factory=list)

    @property
    def surjective(self) -> bool:
        return self.rank == self.target_dim

    @property
    def matrix(self) -> np.ndarray:
        """F_p matrix with one row per (monomial, F_p-basis element of F_q)."""
        return self.engine.A

    def fibers(self, f: MPoly) -> np.ndarray:
        """Digit vector of the fibers of f (through the matrix)."""
        base = self.condition.base
        vec = np.array(f.coefficient_vector(self.d), dtype=np.int64)
        return self.engine.images(_digits(vec, base).reshape(1, -1))[0]


def build_evaluation_map(cond: TaylorCondition, d: int, e: int, points=None,
                         include_z: bool = True) -> EvaluationMap:
    """Evaluation map onto the fibers at the check points of degree < e
    (or the given ``points``) and, when present, onto H^0(Z, O_Z)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    if points is None:
        points = [x for x in cond.check_points(max(e - 1, 0)) if x.degree < e] if e > 1 else []
    base = cond.base
    targets = build_targets(cond, d, points, include_z)
    N = len(monomials(cond.n + 1, d))
    eng = _Engine(targets, base, N)
    if eng.R:
        rank_p, piv = _rref_mod_p(eng.A.T, base.p)
    else:
        rank_p, piv = 0, []
    k = base.k
    return EvaluationMap(d, cond, targets, eng, rank_p // k, sum(t.fq_dim(base) for t in targets),
                         N, piv)


# --------------------------------------------------------------------------
# reports


@dataclass
class SieveReport:
    mode: str
    d: int
    e: int | None
    E: int | None
    probability: Fraction | None = None
    estimate: float | None = None
    stderr: float | None = None
    prediction: Fraction | None = None
    band_failures: dict = field(default_factory=lambda: dict.fromkeys(BANDS, 0))
    band_any: dict = field(default_factory=lambda: dict.fromkeys(BANDS, 0))
    z_failures: int = 0
    sample_size: int = 0
    satisfied: int = 0
    rng_seed: int | None = None
    rng_algorithm: str | None = None
    surjective: bool | None = None
    rank: int | None = None
    target_dim: int | None = None
    n_targets: int = 0
    target_failures: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    CSV_FIELDS = ("d", "mode", "probability_num", "probability_den", "estimate", "stderr",
                  "prediction_num", "prediction_den", "low_fail", "med_fail", "high_fail",
                  "surjective", "seed")

    @property
    def value(self) -> float:
        return float(self.probability) if self.probability is not None else self.estimate

    def row(self) -> dict:
        P, pred = self.probability, self.prediction
        return {
            "d": self.d,
            "mode": self.mode,
            "probability_num": "" if P is None else P.numerator,
            "probability_den": "" if P is None else P.denominator,
            "estimate": f"{self.value:.10f}",
            "stderr": "" if self.stderr is None else f"{self.stderr:.10f}",
            "prediction_num": "" if pred is None else pred.numerator,
            "prediction_den": "" if pred is None else pred.denominator,
            "low_fail": self.band_failures["low"],
            "med_fail": self.band_failures["med"],
            "high_fail": self.band_failures["high"],
            "surjective": "" if self.surjective is None else int(self.surjective),
            "seed": "" if self.rng_seed is None else self.rng_seed,
        }

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k not in ("probability", "prediction")}
        for key in ("probability", "prediction"):
            v = getattr(self, key)
            out[key] = None if v is None else f"{v.numerator}/{v.denominator}"
        return out


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# --------------------------------------------------------------------------
# exact low-degree probability


def exact_low_probability(emap: EvaluationMap, budget: int = DEFAULT_IMAGE_BUDGET) -> SieveReport:
    """Probability that f in S_d meets every target of ``emap``.

    When the map is surjective this is the product of the local
    probabilities.  Otherwise the image (spanned by independent rows of the
    prime-field matrix) is enumerated, which needs p^rank within budget.
    """
    base = emap.condition.base
    rep = SieveReport("exact", emap.d, None, None, surjective=emap.surjective,
                      rank=emap.rank, target_dim=emap.target_dim, n_targets=len(emap.targets))
    if emap.surjective:
        prob = Fraction(1)
        for t in emap.targets:
            prob *= t.local_probability
        rep.probability = prob
        return rep
    eng = emap.engine
    rank_p = len(emap.pivot_rows)
    if base.p ** rank_p > budget:
        raise BudgetExceeded(f"d={emap.d} is below the stability threshold and the image has "
                             f"{base.p}^{rank_p} elements (budget {budget})")
    basis = eng.A[emap.pivot_rows]
    good = 0
    for chunk in _span_chunks(eng, basis):
        fail = eng.fail_matrix(chunk)
        good += int((~fail.any(axis=1)).sum())
    rep.probability = Fraction(good, base.p ** rank_p)
    rep.sample_size = base.p ** rank_p
    rep.satisfied = good
    return rep


def _span_chunks(eng: _Engine, rows: np.ndarray) -> Iterator[np.ndarray]:
    """All F_p-combinations of ``rows``, chunk by chunk."""
    b = min(len(rows), _CHUNK_BITS)
    low = eng.span_table(rows[:b])
    high_rows = rows[b:]
    for digits in itertools.product(range(eng.p), repeat=len(high_rows)):
        if high_rows.shape[0]:
            h = (np.array(digits, dtype=np.int64) @ high_rows) % eng.p
            yield eng._add(low, h.astype(eng.dtype))
        else:
            yield low


# --------------------------------------------------------------------------
# exhaustive and Monte Carlo


def _band(deg: int, d: int, e: int, ell: int) -> str:
    if deg < e:
        return "low"
    if deg <= d // (ell + 1):
        return "med"
    return "high"


class _Tally:
    def __init__(self, targets, d, e, ell):
        self.point_idx = np.array([i for i, t in enumerate(targets) if t.kind != "z"], dtype=np.int64)
        self.z_idx = [i for i, t in enumerate(targets) if t.kind == "z"]
        bands = [_band(targets[i].degree, d, e, ell) for i in self.point_idx]
        self.band_of = np.array([BANDS.index(b) for b in bands], dtype=np.int64)
        self.total = 0
        self.satisfied = 0
        self.z_fail = 0
        self.first = np.zeros(3, dtype=np.int64)
        self.any = np.zeros(3, dtype=np.int64)
        self.per_target = np.zeros(len(targets), dtype=np.int64)

    def add(self, fail: np.ndarray):
        self.total += fail.shape[0]
        self.per_target += fail.sum(axis=0)
        pf = fail[:, self.point_idx]
        any_pf = pf.any(axis=1)
        z_ok = ~fail[:, self.z_idx].any(axis=1) if self.z_idx else np.ones(len(fail), dtype=bool)
        self.z_fail += int((~z_ok).sum())
        self.satisfied += int((~any_pf & z_ok).sum())
        if pf.shape[1]:
            first = np.argmax(pf[any_pf], axis=1)
            self.first += np.bincount(self.band_of[first], minlength=3)
            for b in range(3):
                sel = self.band_of == b
                if sel.any():
                    self.any[b] += int(pf[:, sel].any(axis=1).sum())

    def merge(self, other: "_Tally"):
        self.total += other.total
        self.satisfied += other.satisfied
        self.z_fail += other.z_fail
        self.first += other.first
        self.any += other.any
        self.per_target += other.per_target

    def fill(self, rep: SieveReport):
        rep.sample_size = self.total
        rep.satisfied = self.satisfied
        rep.z_failures = self.z_fail
        rep.band_failures = dict(zip(BANDS, map(int, self.first)))
        rep.band_any = dict(zip(BANDS, map(int, self.any)))
        rep.target_failures = [int(v) for v in self.per_target]


def _sieve_setup(cond: TaylorCondition, d: int, E: int, points=None):
    if points is None:
        points = cond.check_points(E)
    targets = build_targets(cond, d, points)
    N = len(monomials(cond.n + 1, d))
    return targets, _Engine(targets, cond.base, N), N


def exhaustive_probability(cond: TaylorCondition, d: int, E: int, e: int = 1,
                           budget: int = DEFAULT_EXHAUSTIVE_BUDGET, threads: int = 1,
                           points=None) -> SieveReport:
    """Exact fraction of f in S_d satisfying the condition at every check
    point of degree <= E (and on Z), by enumerating S_d."""
    base = cond.base
    N = len(monomials(cond.n + 1, d))
    if base.q ** N > budget:
        raise BudgetExceeded(f"S_{d} has {base.q}^{N} elements (budget {budget}); "
                             f"use Monte Carlo mode or raise --budget")
    targets, eng, _ = _sieve_setup(cond, d, E, points)
    ell = cond.ell
    low_b = min(eng.D, _CHUNK_BITS)
    low = eng.span_table(eng.A[:low_b])
    high_rows = eng.A[low_b:]
    combos = list(itertools.product(range(eng.p), repeat=eng.D - low_b))

    def work(part):
        tally = _Tally(targets, d, e, ell)
        for digits in part:
            if high_rows.shape[0]:
                h = ((np.array(digits, dtype=np.int64) @ high_rows) % eng.p).astype(eng.dtype)
                imgs = eng._add(low, h)
            else:
                imgs = low
            tally.add(eng.fail_matrix(imgs))
        return tally

    tally = _run_parts(work, combos, threads, _Tally(targets, d, e, ell))
    rep = SieveReport("exhaustive", d, e, E, n_targets=len(targets))
    tally.fill(rep)
    rep.probability = Fraction(tally.satisfied, tally.total)
    return rep


def _run_parts(work, items, threads, acc):
    threads = max(1, int(threads))
    if threads == 1 or len(items) < 2:
        acc.merge(work(items))
        return acc
    size = math.ceil(len(items) / threads)
    parts = [items[i:i + size] for i in range(0, len(items), size)]
    with ThreadPoolExecutor(threads) as pool:
        for t in pool.map(work, parts):
            acc.merge(t)
    return acc


def monte_carlo_probability(cond: TaylorCondition, d: int, E: int, trials: int, seed: int,
                            e: int = 1, threads: int = 1, points=None) -> SieveReport:
    """Estimate with ``trials`` uniform samples of S_d.

    Samples are drawn in fixed chunks, chunk i from the Philox stream keyed
    by (seed, i), so results do not depend on the thread count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    targets, eng, _ = _sieve_setup(cond, d, E, points)
    ell = cond.ell
    chunks = [(i, min(_MC_CHUNK, trials - i * _MC_CHUNK))
              for i in range(math.ceil(trials / _MC_CHUNK))]

    def work(part):
        tally = _Tally(targets, d, e, ell)
        for i, size in part:
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,))))
            cdig = rng.integers(0, eng.p, size=(size, eng.D), dtype=np.int64)
            tally.add(eng.fail_matrix(eng.images(cdig)))
        return tally

    tally = _run_parts(work, chunks, threads, _Tally(targets, d, e, ell))
    rep = SieveReport("monte_carlo", d, e, E, rng_seed=seed, rng_algorithm=RNG_ALGORITHM,
                      n_targets=len(targets))
    tally.fill(rep)
    p_hat = tally.satisfied / tally.total
    rep.estimate = p_hat
    rep.stderr = math.sqrt(p_hat * (1 - p_hat) / tally.total)
    return rep


# --------------------------------------------------------------------------
# diagnostics and predictions


def band_decomposition(cond: TaylorCondition, f: MPoly, d: int, e: int, E: int):
    """Failing check points of degree <= E split into the three bands."""
    if e < 1 or E < e:
        raise ValueError("need 1 <= e <= E")
    if f.degree() not in (-1, d) or not f.is_homogeneous():
        raise ValueError(f"f must be homogeneous of degree {d}")
    bands = {b: [] for b in BANDS}
    for x in cond.check_points(E):
        if not cond.holds_at(f, x):
            bands[_band(x.degree, d, e, cond.ell)].append(x)
    return bands["low"], bands["med"], bands["high"]


def predicted_density(X: Subscheme, ell: int, E: int, **kw) -> Fraction:
    return zeta_inverse_truncated(X, ell + 1, E, **kw).value


def predicted_probability(cond: TaylorCondition, E: int, **kw) -> Fraction:
    """Product of local probabilities over points of degree <= E, times the
    Z factor #T / #H^0(Z).  A single quotient condition uses the zeta product,
    which needs point counts only."""
    if len(cond.quotients) == 1 and not cond.jets and cond.z is None:
        qc = cond.quotients[0]
        return predicted_density(qc.carrier, qc.ell, E, **kw)
    out = cond.z.local_probability() if cond.z is not None else Fraction(1)
    for x in cond.check_points(E, **kw):
        out *= cond.local_probability(x)
    return out


def surjectivity_table(cond: TaylorCondition, e: int, d_range: Sequence[int]):
    """(d, rank, target_dim, surjective) for each d."""
    out = []
    points = [x for x in cond.check_points(max(e - 1, 0)) if x.degree < e] if e > 1 else []
    for d in d_range:
        m = build_evaluation_map(cond, d, e, points=points)
        out.append((d, m.rank, m.target_dim, m.surjective))
    return out


def stability_threshold(table) -> int | None:
    """Smallest tested d from which every tested d' >= d is surjective."""
    d0 = None
    for d, _, _, surj in reversed(table):
        if not surj:
            break
        d0 = d
    return d0


# --------------------------------------------------------------------------
# the diagonal counterexample


@dataclass
class DiagonalReport:
    n: int
    q: int
    d_max: int
    sections: int
    points_used: int
    max_point_degree: int
    empty: dict
    E: int
    local_product: Fraction
    limit: Fraction
    jets_checked: int

    @property
    def distance(self) -> float:
        return abs(float(self.local_product) - float(self.limit))


def _independent_one_jet(f: MPoly, x: ClosedPoint) -> tuple[int, ...]:
    """(value, gradient) of x_j^{-d} f at x from formal partial derivatives,
    without the Taylor-expansion routine."""
    coords = x.rep.coords
    j = chart_of(coords)
    K = x.field
    emb = build_embedding(f.ctx, K)
    g = dehomogenize(f, j).base_change(emb)
    inv = coords[j].inv()
    a = [c * inv for i, c in enumerate(coords) if i != j]
    out = [evaluate(g, a).value]
    for i in range(len(a)):
        out.append(evaluate(partial(g, i), a).value)
    return tuple(out)


def diagonal_counterexample(n: int, q: int, d_max: int, E: int = 8,
                            budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> DiagonalReport:
    """Pair the i-th section f_i (all of S_0, S_1, ..., S_dmax, each in lex
    order of coefficient vectors) with the i-th closed point x_i of P^n, and
    exclude at x_i exactly the 1-jet of f_i.

    Every f in S_d for d <= d_max is some f_i and fails at x_i, so P_d is
    empty; this is re-verified by recomputing the jet independently.
    """
    p, k = _prime_power(q)
    base = field_create(p, k)
    Pn = projective_space(n, base)
    sizes = [q ** len(monomials(n + 1, d)) for d in range(d_max + 1)]
    total = sum(sizes)
    if total > budget:
        raise BudgetExceeded(f"{total} sections exceed budget {budget}")
    # #P^n(F_{q^r}) is known, so the needed degree is found without enumeration
    N = []
    need_E = 0
    while True:
        r = len(N) + 1
        N.append((q ** (r * (n + 1)) - 1) // (q ** r - 1))
        if sum(c for _, c in counts_from_point_counts(N)) >= total:
            need_E = r
            break
    pts = closed_points(Pn, need_E, verify=False)[:total]
    empty = {}
    i = 0
    checked = 0
    for d in range(d_max + 1):
        mons = monomials(n + 1, d)
        ok = True
        for vals in itertools.product(range(q), repeat=len(mons)):
            f = MPoly(n + 1, base, {e: base.element(v) for e, v in zip(mons, vals) if v})
            x = pts[i]
            excluded = jet_at(f, x, 2)
            fails = _independent_one_jet(f, x) == excluded.values
            ok &= fails
            checked += 1
            i += 1
        empty[d] = ok
    local, _ = euler_product(q, n + 1, closed_point_counts_moebius(Pn, E))
    limit = Fraction(1)
    for i_ in range(1, n + 2):
        limit *= 1 - Fraction(1, q ** i_)
    return DiagonalReport(n, q, d_max, total, len(pts), pts[-1].degree, empty, E,
                          local, limit, checked)


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                break
            return p, k
    raise PreconditionError(f"q={q} is not a prime power")
