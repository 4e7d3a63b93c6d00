"""Best-approximation record enumeration and finite-scale exponent estimates.

Two enumeration problems over integer points x = (x_0, ..., x_n):

* SIM: for each height x_0 = 1..T round each x_0 theta_i to the nearest
  integer x_i and keep the points whose error max_i |x_0 theta_i - x_i|
  certifiably beats every smaller height.
* LIN: for each shell max_i |x_i| = m <= T pick x_0 killing the integer
  part of -sum theta_i x_i, minimize |x_0 + sum theta_i x_i| over the
  shell, and keep the strictly improving minima.

Enumeration is exhaustive.  For inexact theta a vectorized float prefilter
selects candidate heights/points first; its margins dominate the float
error by construction, and every decision that reaches a record is then
re-established in certified arithmetic, so the prefilter can only cost
time, never correctness.  Exact rational theta bypasses floats entirely
and detects err = 0 relations exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import (
    BudgetExceeded,
    PrecisionExhausted,
    RationalDependence,
    TooFewRecords,
)
from .geometry import FloatFrame, IntegerVector, LineFrame, project
from .scalar import (
    CertifiedScalar,
    ComparisonResult,
    certified_compare,
    certified_nearest_int,
    endpoint_str,
)

DEFAULT_BUDGET = 100_000_000
_CHUNK = 1 << 21


class RecordKind(enum.Enum):
    SIM = "SIM"
    LIN = "LIN"


@dataclass(frozen=True)
class ApproxRecord:
    k: int
    kind: RecordKind
    x: IntegerVector
    height_t: int
    err: CertifiedScalar
    r: CertifiedScalar
    h: CertifiedScalar
    tie: bool = False

    def to_json(self):
        return {
            "k": self.k,
            "kind": self.kind.value,
            "t": self.height_t,
            "x": self.x.to_json(),
            "err": self.err.json_pair(),
            "r": self.r.json_pair(),
            "h": self.h.json_pair(),
            "tie": self.tie,
        }


@dataclass(frozen=True)
class ExponentEstimates:
    kind: RecordKind
    regular: CertifiedScalar
    uniform: CertifiedScalar
    window: tuple
    search_bound: int

    def to_json(self):
        return {
            "kind": self.kind.value,
            "regular": self.regular.json_pair(),
            "uniform": self.uniform.json_pair(),
            "window": list(self.window),
            "search_bound": self.search_bound,
        }


# ---------------------------------------------------------------------------
# SIM enumeration
# ---------------------------------------------------------------------------

def enumerate_sim(frame: LineFrame, T: int, precision_bits: int | None = None):
    """Simultaneous-approximation records for heights x_0 = 1..T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    p = precision_bits or frame.precision_bits
    if frame.all_exact:
        return _sim_exact(frame, T, p)
    candidates = _sim_candidates_prefilter(frame, T)
    return _sim_confirm(frame, candidates, p)


def _sim_exact(frame, T, p):
    theta = frame.spec.exact_values()
    records = []
    best = None
    half = Fraction(1, 2)
    for x0 in range(1, T + 1):
        xs, errs, tie = [x0], [], False
        for th in theta:
            v = th * x0
            fl = v.numerator // v.denominator
            frac = v - fl
            if frac == half:
                xi = fl if fl % 2 == 0 else fl + 1
                tie = True
            else:
                xi = fl if frac < half else fl + 1
            xs.append(xi)
            errs.append(abs(v - xi))
        err = max(errs)
        x = IntegerVector(tuple(xs))
        if err == 0:
            raise RationalDependence(x, records)
        if best is None or err < best:
            best = err
            records.append(_make_record(frame, len(records), RecordKind.SIM,
                                        x, x0, p, tie=tie))
    return records


def _sim_candidates_prefilter(frame, T):
    """Heights whose float error beats the running minimum within the
    rigorous float-error margin; every true record is among them."""
    ff = frame.float_mirror()
    K = max(ff.theta_err) + (1 + max(abs(t) for t in ff.theta)) * 2.0 ** -48
    out = []
    prev_best = math.inf
    start = 1
    while start <= T:
        stop = min(T, start + _CHUNK - 1)
        x0 = np.arange(start, stop + 1, dtype=np.float64)
        err = np.zeros_like(x0)
        for t in ff.theta:
            prod_ = x0 * t
            np.maximum(err, np.abs(prod_ - np.rint(prod_)), out=err)
        marg = x0 * K
        upper = err + marg
        run = np.minimum.accumulate(upper)
        prev = np.empty_like(run)
        prev[0] = prev_best
        prev[1:] = run[:-1]
        prev = np.minimum(prev, prev_best)
        mask = (err - marg) < prev
        out.extend(int(v) for v in x0[mask])
        prev_best = min(prev_best, float(run[-1]))
        start = stop + 1
    return out


def _sim_confirm(frame, candidate_heights, p):
    records = []
    best_err = None
    for x0 in candidate_heights:
        xs, tie = [x0], False
        terms = []
        for t in frame.theta:
            v = t * x0
            xi, is_tie = certified_nearest_int(v)
            tie = tie or is_tie
            xs.append(xi)
            terms.append((v - xi).abs())
        err = terms[0]
        for term in terms[1:]:
            err = err.max_with(term)
        if best_err is not None:
            cmp_ = certified_compare(err, best_err)
            if cmp_ is ComparisonResult.GREATER:
                continue
            if cmp_ is not ComparisonResult.LESS:
                raise PrecisionExhausted(
                    f"record comparison undecided at height {x0}", detail=err)
        best_err = err
        records.append(_make_record(frame, len(records), RecordKind.SIM,
                                    IntegerVector(tuple(xs)), x0, p,
                                    tie=tie, err=err))
    return records


def _make_record(frame, k, kind, x, height_t, p, tie=False, err=None):
    if err is None:
        err = _certified_err(frame, kind, x, p)
    r, h = project(frame, x, p)
    return ApproxRecord(k, kind, x, height_t, err.refine(p), r, h, tie=tie)


def _certified_err(frame, kind, x, p):
    if kind is RecordKind.SIM:
        terms = []
        for t, xi in zip(frame.theta, x.coords[1:]):
            terms.append((t * x[0] - xi).abs())
        err = terms[0]
        for term in terms[1:]:
            err = err.max_with(term)
        return err
    return frame.linear_form(x).abs()


def enumerate_sim_count(frame: LineFrame, count: int,
                        precision_bits: int | None = None,
                        start_T: int = 1 << 10, max_T: int = 1 << 27):
    """First `count` SIM records, growing the search bound as needed."""
    T = start_T
    while True:
        records = enumerate_sim(frame, T, precision_bits)
        if len(records) >= count:
            return records[:count]
        if T >= max_T:
            raise BudgetExceeded(
                f"only {len(records)} records up to T={T}, wanted {count}")
        T *= 4


# ---------------------------------------------------------------------------
# LIN enumeration
# ---------------------------------------------------------------------------

def lin_candidate_count(T: int, n: int) -> int:
    return ((2 * T + 1) ** n - 1) // 2


def enumerate_lin(frame: LineFrame, T: int, precision_bits: int | None = None,
                  budget: int = DEFAULT_BUDGET):
    """Linear-form records over shells max_i |x_i| = 1..T.  Only one point
    of each +-x pair is visited (first nonzero coordinate of (x_1..x_n)
    positive); the mirror point has the same error."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if lin_candidate_count(T, frame.n) > budget:
        raise BudgetExceeded(
            f"LIN enumeration needs {lin_candidate_count(T, frame.n)} candidates, "
            f"budget is {budget}")
    p = precision_bits or frame.precision_bits
    if frame.all_exact:
        return _lin_exact(frame, T, p)
    shell_cands = _lin_candidates_prefilter(frame, T)
    return _lin_confirm(frame, shell_cands, T, p)


def _lin_tail_iter(frame, T):
    """Canonical-sign box iteration: yields (prefix, tail_array) where
    prefix covers (x_1..x_{n-1}) and the tail is a numpy range for x_n."""
    n = frame.n
    if n == 1:
        yield (), np.arange(1, T + 1, dtype=np.float64)
        return
    span = range(-T, T + 1)
    for prefix in product(*([span] * (n - 1))):
        first_nz = next((c for c in prefix if c != 0), None)
        if first_nz is None:
            yield prefix, np.arange(1, T + 1, dtype=np.float64)
        elif first_nz > 0:
            yield prefix, np.arange(-T, T + 1, dtype=np.float64)


def _lin_candidates_prefilter(frame, T):
    """Per-shell candidate minimizers within the rigorous float margin.

    Distance to the nearest integer is 1-Lipschitz, so |err_f - err_true|
    is bounded by the sigma error, which the per-point margin dominates.
    Pass 1 finds a certified upper bound on each shell minimum; pass 2
    collects every point that could still attain it.
    """
    ff = frame.float_mirror()
    K = max(ff.theta_err) + (1 + max(abs(t) for t in ff.theta)) * 2.0 ** -48
    shell_upper = np.full(T + 1, np.inf)

    def _scan(collect):
        shell_pts = [[] for _ in range(T + 1)] if collect else None
        for prefix, tail in _lin_tail_iter(frame, T):
            base = sum(t * c for t, c in zip(ff.theta, prefix))
            sigma = base + ff.theta[-1] * tail
            err = np.abs(sigma - np.rint(sigma))
            pm = max((abs(c) for c in prefix), default=0)
            sum_abs = sum(abs(c) for c in prefix)
            m = np.maximum(np.abs(tail), pm).astype(np.int64)
            marg = (sum_abs + np.abs(tail) + 1) * K
            if collect:
                mask = (err - marg) <= shell_upper[m]
                for i in np.nonzero(mask)[0]:
                    shell_pts[int(m[i])].append(prefix + (int(tail[i]),))
            else:
                np.minimum.at(shell_upper, m, err + marg)
        return shell_pts

    _scan(collect=False)
    return _scan(collect=True)


def _lin_confirm(frame, shell_pts, T, p):
    records = []
    best = None
    for m in range(1, T + 1):
        cands = shell_pts[m]
        if not cands:
            continue
        shell_min = None
        shell_x = None
        for pt in sorted(cands):
            sigma = _sigma_scalar(frame, pt)
            x0, _ = certified_nearest_int(-sigma)
            err = (sigma + x0).abs()
            if shell_min is None:
                shell_min, shell_x = err, (x0,) + pt
                continue
            cmp_ = certified_compare(err, shell_min)
            if cmp_ is ComparisonResult.LESS:
                shell_min, shell_x = err, (x0,) + pt
            elif cmp_ is ComparisonResult.UNDECIDED:
                raise PrecisionExhausted(
                    f"shell minimum undecided at height {m}", detail=err)
        if best is not None:
            cmp_ = certified_compare(shell_min, best)
            if cmp_ is ComparisonResult.GREATER:
                continue
            if cmp_ is not ComparisonResult.LESS:
                raise PrecisionExhausted(
                    f"record comparison undecided at height {m}", detail=shell_min)
        best = shell_min
        records.append(_make_record(frame, len(records), RecordKind.LIN,
                                    IntegerVector(shell_x), m, p, err=shell_min))
    return records


def _sigma_scalar(frame, pt):
    acc = None
    for t, c in zip(frame.theta, pt):
        if not c:
            continue
        term = t * c
        acc = term if acc is None else acc + term
    if acc is None:
        acc = CertifiedScalar.from_int(0, frame.precision_bits)
    return acc


def _lin_exact(frame, T, p):
    theta = frame.spec.exact_values()
    records = []
    best = None
    half = Fraction(1, 2)
    for m in range(1, T + 1):
        shell_min, shell_x = None, None
        for pt in _exact_shell_points(frame.n, m):
            sigma = Fraction(sum(th * c for th, c in zip(theta, pt)))
            v = -sigma
            fl = v.numerator // v.denominator
            frac = v - fl
            if frac == half:
                x0 = fl if fl % 2 == 0 else fl + 1
            else:
                x0 = fl if frac < half else fl + 1
            err = abs(x0 + sigma)
            x = IntegerVector((x0,) + pt)
            if err == 0:
                raise RationalDependence(x, records)
            if shell_min is None or err < shell_min:
                shell_min, shell_x = err, x
        if shell_min is None:
            continue
        if best is None or shell_min < best:
            best = shell_min
            records.append(_make_record(frame, len(records), RecordKind.LIN,
                                        shell_x, m, p))
    return records


def _exact_shell_points(n, m):
    """Canonical-sign points with max|x_i| = m, lexicographic order."""
    span = range(-m, m + 1)
    for pt in product(*([span] * n)):
        if max(abs(c) for c in pt) != m:
            continue
        first_nz = next((c for c in pt if c != 0), 0)
        if first_nz > 0:
            yield pt


# ---------------------------------------------------------------------------
# Exponent estimation
# ---------------------------------------------------------------------------

def estimate_exponents(records, tail_fraction: float | Fraction = Fraction(1, 2)
                       ) -> ExponentEstimates:
    """Finite-scale (regular, uniform) exponent estimates over the trailing
    window of the record list.

    The regular slope of record k is log(1/err_k)/log(t_k); the uniform
    slope uses the successor height t_{k+1}, because err_k is the best
    error available for every t below t_{k+1} (step-function bridge between
    records and the exponent definitions).  The last record has no
    successor and is excluded from the uniform minimum; heights t_k = 1 are
    excluded from the regular maximum (zero log).
    """
    K = len(records)
    if K < 4:
        raise TooFewRecords(f"need at least 4 records, got {K}")
    tf = Fraction(tail_fraction).limit_denominator(10 ** 6) \
        if not isinstance(tail_fraction, Fraction) else tail_fraction
    if not 0 < tf <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    W = math.ceil(tf * K)
    first = K - W

    regular = None
    for rec in records[first:]:
        if rec.height_t < 2:
            continue
        slope = (-(rec.err.log())) / CertifiedScalar.from_int(rec.height_t).log()
        regular = slope if regular is None else regular.max_with(slope)
    if regular is None:
        raise TooFewRecords("window contains no record with height >= 2")

    uniform = None
    for idx in range(max(first, 0), K - 1):
        rec, nxt = records[idx], records[idx + 1]
        slope = (-(rec.err.log())) / CertifiedScalar.from_int(nxt.height_t).log()
        uniform = slope if uniform is None else uniform.min_with(slope)
    if uniform is None:
        raise TooFewRecords("window has no record with a successor")

    prec = records[-1].err.precision_bits
    return ExponentEstimates(records[0].kind, regular.refine(prec),
                             uniform.refine(prec), (first, K - 1),
                             records[-1].height_t)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def records_csv(records) -> str:
    if not records:
        return "kind,k,t,err_lo,err_hi,r_lo,r_hi,h_lo,h_hi\n"
    n = records[0].x.dim - 1
    cols = ["kind", "k", "t", "err_lo", "err_hi"] + \
        [f"x{i}" for i in range(n + 1)] + ["r_lo", "r_hi", "h_lo", "h_hi"]
    lines = [",".join(cols)]
    for rec in records:
        row = [rec.kind.value, str(rec.k), str(rec.height_t),
               endpoint_str(rec.err.lower), endpoint_str(rec.err.upper)]
        row += [str(c) for c in rec.x.coords]
        row += [endpoint_str(rec.r.lower), endpoint_str(rec.r.upper),
                endpoint_str(rec.h.lower), endpoint_str(rec.h.upper)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def records_json(records):
    return [rec.to_json() for rec in records]
