"""Empty-cylinder certificates at concrete instances.

Given an integer point v with distances r(v), h(v) to the theta line and
its orthogonal hyperplane, define gamma by r(v) = h(v)**(-gamma) and let t
be the smallest scale at which the cylinder

    { r(x) <= t,  h(x) <= t * h(v)**(-1-gamma) }

captures a nonzero integer point.  Writing h(v) = t**alpha and
alpha = (1+beta)/(1+gamma), the half-open cylinder

    C = { r(x) < t,  t**(-beta) <= h(x) <= t**(-alpha) - t**(-beta) }

contains no integer point as soon as t**beta > 2 t**alpha: for any x in C
the inner product <v, x> is strictly between 0 and 1.

Everything the certificate needs reduces to the primitive quantities
r(v), h(v), t:

    t**(-beta)                    = r(v) t / h(v)
    t**(-alpha)                   = 1 / h(v)
    t**beta > 2 t**alpha   <=>    band top > band bottom   <=>   r(v) t < 1/2

so the cylinder band is stored in that primitive form and the hypothesis
check carries an honest margin instead of comparing two copies of the same
interval.  The minimax search for t is exact: t = min over nonzero x of
max(r(x), h(x) h(v)/r(v)), enumerated exhaustively over a box certified by
the Minkowski volume bound (cross-polytope lower bound for the unit-ball
volume, doubled for safety).  A vectorized float prefilter selects
candidate minimizers; certified arithmetic makes every decision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import BudgetExceeded, DegenerateT, PrecisionExhausted
from .geometry import IntegerVector, LineFrame, project
from .records import DEFAULT_BUDGET, RecordKind, enumerate_lin, enumerate_sim_count
from .scalar import (
    CertifiedScalar,
    ComparisonResult,
    certified_compare,
    certified_sign,
    intervals_overlap,
)


class LemmaVerdict(enum.Enum):
    CERTIFIED_EMPTY = "CERTIFIED_EMPTY"
    HYPOTHESIS_FAILS = "HYPOTHESIS_FAILS"
    UNDECIDED = "UNDECIDED"


class BruteVerdict(enum.Enum):
    EMPTY = "EMPTY"
    WITNESS = "WITNESS"
    SKIPPED = "SKIPPED"


class CaseTag(enum.Enum):
    CASE1 = "CASE1"
    CASE2 = "CASE2"


@dataclass(frozen=True)
class Cylinder:
    """Half-open cylinder {r(x) < t, band_lo <= h(x) <= band_hi}.  The
    exponent pair (alpha, beta) is carried when known; rt_product is the
    r(v)*t margin quantity for pipeline-built instances."""

    frame: LineFrame
    t: CertifiedScalar
    band_lo: CertifiedScalar
    band_hi: CertifiedScalar
    alpha: CertifiedScalar | None = None
    beta: CertifiedScalar | None = None
    rt_product: CertifiedScalar | None = None

    @classmethod
    def from_exponents(cls, frame, t, alpha, beta, precision_bits=None):
        p = precision_bits or frame.precision_bits
        t = _as_cs(t, p)
        alpha = _as_cs(alpha, p)
        beta = _as_cs(beta, p)
        lo = t ** (-beta)
        hi = t ** (-alpha) - lo
        return cls(frame, t, lo, hi, alpha, beta)

    @classmethod
    def from_band(cls, frame, t, band_lo, band_hi, precision_bits=None):
        p = precision_bits or frame.precision_bits
        return cls(frame, _as_cs(t, p), _as_cs(band_lo, p), _as_cs(band_hi, p))

    @classmethod
    def from_witness(cls, frame, r_v, h_v, t, alpha, beta):
        rt = r_v * t
        lo = rt / h_v
        hi = 1 / h_v - lo
        return cls(frame, t, lo, hi, alpha, beta, rt_product=rt)

    def hypothesis_holds(self, max_precision=4096):
        """Certified verdict on t**beta > 2 t**alpha, in the equivalent
        band form band_hi > band_lo (True / False / None when undecided)."""
        if self.rt_product is not None:
            cmp_ = certified_compare(self.rt_product, Fraction(1, 2), max_precision)
            if cmp_ is ComparisonResult.LESS:
                return True
            if cmp_ is ComparisonResult.UNDECIDED:
                return None
            return False
        cmp_ = certified_compare(self.band_hi, self.band_lo, max_precision)
        if cmp_ is ComparisonResult.GREATER:
            return True
        if cmp_ is ComparisonResult.UNDECIDED:
            return None
        return False

    def to_json(self):
        return {
            "t": self.t.json_pair(),
            "band_lo": self.band_lo.json_pair(),
            "band_hi": self.band_hi.json_pair(),
            "alpha": None if self.alpha is None else self.alpha.json_pair(),
            "beta": None if self.beta is None else self.beta.json_pair(),
        }


@dataclass(frozen=True)
class EmptinessProof:
    method: str  # "lemma" or "brute_force"
    verdict: object  # LemmaVerdict or BruteVerdict
    witness: IntegerVector | None = None
    note: str = ""

    def to_json(self):
        return {
            "method": self.method,
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_json(),
            "note": self.note,
        }


def _as_cs(v, p):
    if isinstance(v, CertifiedScalar):
        return v
    return CertifiedScalar.from_fraction(Fraction(v), p)


# ---------------------------------------------------------------------------
# Slab enumeration shared by the minimax search and the brute-force oracle
# ---------------------------------------------------------------------------

def _canon_tail_iter(n, B):
    """Canonical-sign tuples over (x_1..x_n): first nonzero positive;
    yields (prefix, tail_array)."""
    if n == 1:
        yield (), np.arange(1, B + 1, dtype=np.float64)
        return
    span = range(-B, B + 1)
    for prefix in product(*([span] * (n - 1))):
        first_nz = next((c for c in prefix if c != 0), None)
        if first_nz is None:
            yield prefix, np.arange(1, B + 1, dtype=np.float64)
        elif first_nz > 0:
            yield prefix, np.arange(-B, B + 1, dtype=np.float64)


def _scan_slab(frame, B, s_window, visit):
    """Visit every canonical integer point with (x_1..x_n) in the B-box and
    |x_0 + sum theta_i x_i| <= s_window (plus the pure-x_0 axis points when
    they can satisfy the window).  `visit` receives numpy arrays
    (x0, tail, habs, r, dh, dr, prefix)."""
    ff = frame.float_mirror()
    K = max(ff.theta_err) + (1 + max(abs(t) for t in ff.theta)) * 2.0 ** -48
    norm_f = ff.norm
    K_off = int(s_window) + 1

    def _emit(prefix, tail, x0):
        pm_sum = sum(abs(c) for c in prefix)
        lf = x0 + sum(t * c for t, c in zip(ff.theta, prefix)) + ff.theta[-1] * tail
        habs = np.abs(lf) / norm_f
        nsq = x0 * x0 + sum(c * c for c in prefix) + tail * tail
        dh = ((pm_sum + np.abs(tail) + np.abs(x0) + 2) * K) / norm_f + 1e-300
        r2 = np.maximum(nsq - habs * habs, 0.0)
        r = np.sqrt(r2)
        dr2 = 2.0 * habs * dh + nsq * 2.0 ** -48 + 1e-300
        dr = np.sqrt(dr2)
        visit(x0, tail, habs, r, dh, dr, prefix)

    for prefix, tail in _canon_tail_iter(frame.n, B):
        sigma = sum(t * c for t, c in zip(ff.theta, prefix)) + ff.theta[-1] * tail
        x0c = np.rint(-sigma)
        for k in range(-K_off, K_off + 1):
            x0 = x0c + k
            keep = np.abs(x0 + sigma) <= s_window + 1.0
            if not keep.any():
                continue
            _emit(prefix, tail[keep], x0[keep])

    # pure-x_0 axis points (all x_i = 0): in the window only when s >= 1
    if s_window >= 1.0:
        x0 = np.arange(1.0, math.floor(s_window) + 2.0)
        zeros = np.zeros_like(x0)
        _emit((), zeros, x0) if frame.n == 1 else None
        if frame.n > 1:
            prefix = tuple([0] * (frame.n - 1))
            _emit(prefix, zeros, x0)


# ---------------------------------------------------------------------------
# smallest_t: exact minimax reformulation
# ---------------------------------------------------------------------------

def smallest_t(frame: LineFrame, v: IntegerVector, gamma=None,
               precision_bits: int | None = None, budget: int = DEFAULT_BUDGET,
               weight: CertifiedScalar | None = None):
    """Smallest t such that {r(x) <= t, h(x) <= t/weight} contains a nonzero
    integer point, with weight = h(v)**(1+gamma); equivalently the minimum
    over nonzero x of max(r(x), h(x) * weight), which is attained and makes
    the search exact.  Returns (t, attaining_point); t is the very scalar
    max(r, h*weight) of the attaining point.

    When gamma comes from the record identity r(v) = h(v)**(-gamma) the
    caller should pass weight = h(v)/r(v), which is the same real number in
    division form (no transcendental step)."""
    p = precision_bits or frame.precision_bits
    r_v, h_v = project(frame, v, p)
    if certified_sign(h_v) != 1:
        raise ValueError("h(v) must be certified positive")
    if weight is None:
        if gamma is None:
            raise ValueError("need gamma or an explicit weight")
        gamma = _as_cs(gamma, p)
        if certified_sign(gamma) != 1:
            raise ValueError("gamma must be certified positive")
        weight = h_v ** (1 + gamma)

    n = frame.n
    # cross-polytope bound: vol(unit ball) >= 2^n / n!, so the Minkowski
    # scale is at most (n! * weight)^(1/(n+1)); doubled for safety
    cap_scalar = (math.factorial(n) * weight) ** Fraction(1, n + 1)
    t_cap = 2 * cap_scalar.refine(64).upper_fraction()
    wref = weight.refine(96)
    w_lo = wref.lower_fraction()
    if w_lo <= 0:
        raise PrecisionExhausted("weight not certified positive", detail=weight)
    H_max = t_cap / w_lo
    norm_up = frame.direction_norm.refine(64).upper_fraction()
    s_window = float(norm_up * H_max) * 1.0000001 + 1e-12
    B = int(t_cap + H_max) + 1

    n_slab = (2 * B + 1) ** n * (2 * (int(s_window) + 1) + 1)
    if n_slab > budget:
        raise BudgetExceeded(
            f"minimax search needs ~{n_slab} candidates (box {B}), budget {budget}")

    weight_f = wref.midpoint_float()
    weight_err = float(wref.upper_fraction() - wref.lower_fraction()) * 1.01 \
        + weight_f * 2.0 ** -40

    state = {"bound": math.inf, "cands": []}

    def _pass1(x0, tail, habs, r, dh, dr, prefix):
        m = np.maximum(r, habs * weight_f)
        marg = dr + weight_f * dh + habs * weight_err + 1e-9 * (m + 1.0)
        val = float(np.min(m + marg))
        if val < state["bound"]:
            state["bound"] = val

    def _pass2(x0, tail, habs, r, dh, dr, prefix):
        m = np.maximum(r, habs * weight_f)
        marg = dr + weight_f * dh + habs * weight_err + 1e-9 * (m + 1.0)
        mask = (m - marg) <= state["bound"]
        for i in np.nonzero(mask)[0]:
            coords = (int(x0[i]),) + prefix + (int(tail[i]),)
            state["cands"].append(coords)

    _scan_slab(frame, B, s_window, _pass1)
    if not math.isfinite(state["bound"]):
        raise PrecisionExhausted("no candidate found inside the Minkowski box",
                                 detail=v)
    _scan_slab(frame, B, s_window, _pass2)

    best = None
    maxp = max(4096, 16 * p)
    for coords in sorted(set(state["cands"])):
        x = IntegerVector(coords)
        if x.is_zero():
            continue
        r_x, h_x = project(frame, x, p)
        m_h = h_x * weight
        m = r_x.max_with(m_h)
        if best is None:
            best = (m, x, r_x, m_h)
            continue
        cmp_ = certified_compare(m, best[0], maxp)
        if cmp_ is ComparisonResult.LESS:
            best = (m, x, r_x, m_h)
        elif cmp_ is ComparisonResult.GREATER:
            continue
        else:
            raise PrecisionExhausted(
                f"minimax tie between {x.coords} and {best[1].coords}",
                detail=m)
    if best is None:
        raise PrecisionExhausted("candidate set empty", detail=v)

    m, x, r_x, m_h = best
    # resolve which branch attains the max so that t IS that scalar: the
    # attaining point is then proven to sit on the boundary r(x) = t
    branch = certified_compare(r_x, m_h, maxp)
    if branch is ComparisonResult.GREATER:
        t = r_x
    elif branch is ComparisonResult.LESS:
        t = m_h
    else:
        raise PrecisionExhausted(
            f"minimax branch tie at {x.coords}", detail=m)
    return t.refine(p), x


# ---------------------------------------------------------------------------
# (alpha, beta) from the defining relations
# ---------------------------------------------------------------------------

def derive_alpha_beta(frame: LineFrame, v: IntegerVector, gamma, t,
                      precision_bits: int | None = None):
    """alpha = log h(v) / log t and beta = alpha (1 + gamma) - 1."""
    p = precision_bits or frame.precision_bits
    gamma = _as_cs(gamma, p)
    t = _as_cs(t, p)
    if certified_sign(t) != 1:
        raise ValueError("t must be certified positive")
    cmp1 = certified_compare(t, Fraction(1), max(4096, 16 * p))
    if cmp1 in (ComparisonResult.EQUAL_PROVEN, ComparisonResult.UNDECIDED):
        raise DegenerateT("t cannot be separated from 1")
    _, h_v = project(frame, v, p)
    if certified_sign(h_v) != 1:
        raise ValueError("h(v) must be certified positive")
    alpha = h_v.log() / t.log()
    beta = alpha * (1 + gamma) - 1
    return alpha.refine(p), beta.refine(p)


# ---------------------------------------------------------------------------
# Lemma certificate
# ---------------------------------------------------------------------------

def lemma_certificate(frame: LineFrame, v: IntegerVector, C: Cylinder,
                      precision_bits: int | None = None) -> LemmaVerdict:
    """Certify emptiness of C via the inner-product argument.

    Three checks: (1) the scale hypothesis in its band form band_hi >
    band_lo; (2) the defining relations h(v) = t**alpha and
    r(v) = t**(alpha-1-beta), as certified overlap in the primitive forms
    (h(v) * (band_lo + band_hi) against 1, and r(v) t against
    h(v) band_lo); (3) the two corner inequalities of the inner-product
    bound, with equality admitted because the r-edge of the cylinder is
    open.  For pipeline-built cylinders checks 2 and 3 hold with exact-zero
    margins by construction; a certified violation of any check means the
    lemma does not apply to this (v, C)."""
    p = precision_bits or frame.precision_bits
    maxp = max(2048, 8 * p)
    r_v, h_v = project(frame, v, p)

    hyp = C.hypothesis_holds(maxp)
    if hyp is None:
        return LemmaVerdict.UNDECIDED
    if not hyp:
        return LemmaVerdict.HYPOTHESIS_FAILS

    one = CertifiedScalar.from_int(1, p)
    rel1_l = (C.band_lo + C.band_hi) * h_v
    rel2_l = r_v * C.t
    rel2_r = h_v * C.band_lo
    for lhs, rhs in ((rel1_l, one), (rel2_l, rel2_r)):
        cmp_ = certified_compare(lhs, rhs, maxp)
        if cmp_ in (ComparisonResult.LESS, ComparisonResult.GREATER):
            return LemmaVerdict.HYPOTHESIS_FAILS

    corner_low = h_v * C.band_lo - r_v * C.t
    corner_high = 1 - (h_v * C.band_hi + r_v * C.t)
    if certified_sign(corner_low, maxp) == -1:
        return LemmaVerdict.HYPOTHESIS_FAILS
    if certified_sign(corner_high, maxp) == -1:
        return LemmaVerdict.HYPOTHESIS_FAILS
    return LemmaVerdict.CERTIFIED_EMPTY


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def brute_force_empty(frame: LineFrame, C: Cylinder,
                      precision_bits: int | None = None,
                      budget: int = DEFAULT_BUDGET) -> EmptinessProof:
    """Exhaustive certified scan of the cylinder's bounding box.  Membership
    uses the half-open semantics (r strict, band closed).  Returns EMPTY or
    the lexicographically first witness."""
    p = precision_bits or frame.precision_bits
    maxp = max(2048, 8 * p)

    band_cmp = certified_compare(C.band_hi, C.band_lo, maxp)
    if band_cmp is ComparisonResult.LESS:
        return EmptinessProof("brute_force", BruteVerdict.EMPTY,
                              note="vacuous band")

    t_up = C.t.refine(64).upper_fraction()
    top_up = (C.band_lo + C.band_hi).refine(64).upper_fraction()
    B = int(_fr_sqrt_upper(t_up * t_up + top_up * top_up)) + 1
    norm_up = frame.direction_norm.refine(64).upper_fraction()
    s_window = float(norm_up * top_up) * 1.0000001 + 1e-12

    n_slab = (2 * B + 1) ** frame.n * (2 * (int(s_window) + 1) + 1)
    if n_slab > budget:
        raise BudgetExceeded(
            f"brute force needs ~{n_slab} candidates (box {B}), budget {budget}")

    t_f = C.t.midpoint_float()
    lo_ref = C.band_lo.refine(64)
    hi_ref = C.band_hi.refine(64)
    lo_f, hi_f = lo_ref.midpoint_float(), hi_ref.midpoint_float()
    band_err = max(float(lo_ref.upper_fraction() - lo_ref.lower_fraction()),
                   float(hi_ref.upper_fraction() - hi_ref.lower_fraction())) * 1.01 \
        + (abs(lo_f) + abs(hi_f) + abs(t_f)) * 2.0 ** -40 + 1e-300

    cands = []

    def _visit(x0, tail, habs, r, dh, dr, prefix):
        out = (habs > hi_f + dh + band_err) | (habs < lo_f - dh - band_err) \
            | (r > t_f + dr + band_err)
        mask = ~out
        for i in np.nonzero(mask)[0]:
            cands.append((int(x0[i]),) + prefix + (int(tail[i]),))

    _scan_slab(frame, B, s_window, _visit)

    members = []
    for coords in sorted(set(cands)):
        x = IntegerVector(coords)
        if x.is_zero():
            continue
        if _certified_member(frame, C, x, p, maxp):
            members.append(x)
    if not members:
        return EmptinessProof("brute_force", BruteVerdict.EMPTY,
                              note=f"box {B}, {len(cands)} near-boundary checks")
    lex_first = min(tuple(w.coords) for w in members + [-w for w in members])
    return EmptinessProof("brute_force", BruteVerdict.WITNESS,
                          IntegerVector(lex_first))


def _fr_sqrt_upper(f: Fraction) -> int:
    return math.isqrt(f.numerator // f.denominator) + 1


def _certified_member(frame, C, x, p, maxp) -> bool:
    r, h = project(frame, x, p)
    cmp_r = certified_compare(r, C.t, maxp)
    if cmp_r is not ComparisonResult.LESS:
        if cmp_r is ComparisonResult.UNDECIDED:
            raise PrecisionExhausted(
                f"membership r < t undecided at {x.coords}", detail=r)
        return False
    cmp_hi = certified_compare(h, C.band_hi, maxp)
    if cmp_hi is ComparisonResult.GREATER:
        return False
    if cmp_hi is ComparisonResult.UNDECIDED:
        raise PrecisionExhausted(
            f"membership h <= band_hi undecided at {x.coords}", detail=h)
    cmp_lo = certified_compare(h, C.band_lo, maxp)
    if cmp_lo is ComparisonResult.LESS:
        return False
    if cmp_lo is ComparisonResult.UNDECIDED:
        raise PrecisionExhausted(
            f"membership h >= band_lo undecided at {x.coords}", detail=h)
    return True


# ---------------------------------------------------------------------------
# Pipeline: records -> witnesses -> implied exponent bounds
# ---------------------------------------------------------------------------

@dataclass
class PipelineWitness:
    record_index: int
    case_tag: CaseTag
    v: IntegerVector
    status: str = "OK"  # OK | GUARD | BUDGET | DEGENERATE_T
    gamma: CertifiedScalar | None = None
    t: CertifiedScalar | None = None
    alpha: CertifiedScalar | None = None
    beta: CertifiedScalar | None = None
    boundary_point: IntegerVector | None = None
    cylinder: Cylinder | None = None
    hypothesis_ok: bool | None = None
    lemma_verdict: LemmaVerdict | None = None
    brute: EmptinessProof | None = None
    ab_identity_overlap: bool | None = None
    implied: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self):
        def pair(v):
            return None if v is None else v.json_pair()
        return {
            "record_index": self.record_index,
            "case": self.case_tag.value,
            "v": self.v.to_json(),
            "status": self.status,
            "gamma": pair(self.gamma),
            "t": pair(self.t),
            "alpha": pair(self.alpha),
            "beta": pair(self.beta),
            "boundary_point": None if self.boundary_point is None
            else self.boundary_point.to_json(),
            "cylinder": None if self.cylinder is None else self.cylinder.to_json(),
            "hypothesis_ok": self.hypothesis_ok,
            "lemma_verdict": None if self.lemma_verdict is None
            else self.lemma_verdict.value,
            "brute_force": None if self.brute is None else self.brute.to_json(),
            "ab_identity_overlap": self.ab_identity_overlap,
            "implied": {k: pair(v) for k, v in self.implied.items()},
            "note": self.note,
        }


@dataclass
class PipelineResult:
    case_tag: CaseTag
    witnesses: list
    aggregate: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "case": self.case_tag.value,
            "witnesses": [w.to_json() for w in self.witnesses],
            "aggregate": {k: (v.json_pair() if isinstance(v, CertifiedScalar) else v)
                          for k, v in self.aggregate.items()},
        }


def _case_guards(case, r_v, h_v):
    """Premise checks making gamma positive: CASE1 wants h(v) > 1 > r(v) > 0,
    CASE2 wants r(v) > 1 > h(v) > 0."""
    if case is CaseTag.CASE1:
        pairs = [(h_v, Fraction(1), ComparisonResult.GREATER, "h(v) > 1"),
                 (r_v, Fraction(1), ComparisonResult.LESS, "r(v) < 1"),
                 (r_v, Fraction(0), ComparisonResult.GREATER, "r(v) > 0")]
    else:
        pairs = [(h_v, Fraction(1), ComparisonResult.LESS, "h(v) < 1"),
                 (h_v, Fraction(0), ComparisonResult.GREATER, "h(v) > 0"),
                 (r_v, Fraction(1), ComparisonResult.GREATER, "r(v) > 1")]
    for a, b, want, label in pairs:
        if certified_compare(a, b) is not want:
            return label
    return None


def build_witness(frame: LineFrame, record, case: CaseTag,
                  precision_bits: int | None = None,
                  budget: int = DEFAULT_BUDGET,
                  brute_check: bool = True) -> PipelineWitness:
    p = precision_bits or frame.precision_bits
    v = record.x
    w = PipelineWitness(record.k, case, v)
    r_v, h_v = record.r, record.h

    guard = _case_guards(case, r_v, h_v)
    if guard is not None:
        w.status = "GUARD"
        w.note = f"case premise fails: {guard}"
        return w

    gamma = (-(r_v.log())) / h_v.log()
    w.gamma = gamma.refine(p)
    weight = h_v / r_v
    try:
        t, attaining = smallest_t(frame, v, precision_bits=p, budget=budget,
                                  weight=weight)
    except BudgetExceeded as exc:
        w.status = "BUDGET"
        w.note = str(exc)
        return w
    w.t = t
    w.boundary_point = attaining
    try:
        alpha, beta = derive_alpha_beta(frame, v, gamma, t, p)
    except DegenerateT as exc:
        w.status = "DEGENERATE_T"
        w.note = str(exc)
        return w
    w.alpha, w.beta = alpha, beta

    C = Cylinder.from_witness(frame, r_v, h_v, t, alpha, beta)
    w.cylinder = C
    w.hypothesis_ok = C.hypothesis_holds()
    w.lemma_verdict = lemma_certificate(frame, v, C, p)
    if brute_check:
        try:
            w.brute = brute_force_empty(frame, C, p, budget)
        except BudgetExceeded as exc:
            w.brute = EmptinessProof("brute_force", BruteVerdict.SKIPPED,
                                     note=str(exc))

    lhs = (alpha * (1 + gamma)).refine(p)
    rhs = (1 + beta).refine(p)
    w.ab_identity_overlap = intervals_overlap(lhs, rhs)

    if case is CaseTag.CASE1:
        w.implied = {"omega_lower": beta, "omega_hat_upper": alpha}
    else:
        implied = {}
        if certified_sign(beta) == 1:
            implied["lambda_lower"] = (1 / beta).refine(p)
        implied["lambda_hat_upper"] = (1 / alpha).refine(p)
        w.implied = implied
    return w


def ss_pipeline(frame: LineFrame, case: CaseTag, records=None,
                count: int = 10, T: int | None = None,
                precision_bits: int | None = None,
                budget: int = DEFAULT_BUDGET,
                brute_check: bool = True) -> PipelineResult:
    """Run the record list through the empty-cylinder construction.  CASE1
    consumes simultaneous records, CASE2 linear-form records.  Witnesses
    whose premises or budgets fail are emitted flagged, never dropped."""
    p = precision_bits or frame.precision_bits
    if records is None:
        if case is CaseTag.CASE1:
            records = enumerate_sim_count(frame, count, p)
        else:
            if T is None:
                raise ValueError("CASE2 needs records or an explicit T")
            records = enumerate_lin(frame, T, p, budget=budget)
    else:
        want = RecordKind.SIM if case is CaseTag.CASE1 else RecordKind.LIN
        if records and records[0].kind is not want:
            raise ValueError(f"{case.value} expects {want.value} records")

    witnesses = [build_witness(frame, rec, case, p, budget, brute_check)
                 for rec in records]

    agg: dict = {"n_records": len(witnesses),
                 "n_hypothesis_ok": sum(1 for w in witnesses if w.hypothesis_ok),
                 "n_certified_empty": sum(
                     1 for w in witnesses
                     if w.lemma_verdict is LemmaVerdict.CERTIFIED_EMPTY)}
    usable = [w for w in witnesses if w.hypothesis_ok]
    if usable:
        if case is CaseTag.CASE1:
            best_low = usable[0].beta
            best_up = usable[0].alpha
            for w in usable[1:]:
                best_low = best_low.max_with(w.beta)
                best_up = best_up.min_with(w.alpha)
            agg["omega_lower"] = best_low.refine(p)
            agg["omega_hat_upper"] = best_up.refine(p)
        else:
            lows = [w.implied["lambda_lower"] for w in usable
                    if "lambda_lower" in w.implied]
            ups = [w.implied["lambda_hat_upper"] for w in usable]
            if lows:
                best = lows[0]
                for s in lows[1:]:
                    best = best.max_with(s)
                agg["lambda_lower"] = best.refine(p)
            best = ups[0]
            for s in ups[1:]:
                best = best.min_with(s)
            agg["lambda_hat_upper"] = best.refine(p)
    return PipelineResult(case, witnesses, agg)
