"""Transference-inequality evaluation over a 4-tuple of Diophantine
exponent values, plus the largest-root machinery for the two ratio-bound
polynomials.

The two polynomial families (parameter w = uniform linear exponent,
l = uniform simultaneous exponent, both after clearing denominators)

    f: x^n - w x + (w - 1)          -> deflated  x^{n-1} + ... + x + (1 - w)
    g: (1-l) x^n - x^{n-1} + l      -> deflated  (1-l) x^{n-1} - l (x^{n-2} + ... + 1)

always vanish at x = 1; the deflated polynomials have exactly one positive
root (one Descartes sign change), it is >= 1 exactly on the admissible
parameter range, and it is monotone increasing in the parameter.  Roots
are certified by exact dyadic bisection on the deflated polynomial, with
interval parameters handled through the endpoint polynomials.

The three-way ordering of G_lin, (w l)^(1/(n-1)), A = (1-1/w)/(1-l) and
G_sim is decided by the sign of g at A, which is exact rational arithmetic
for exact inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import DegenerateDenominator, PrecisionExhausted
from .scalar import (
    DEFAULT_PRECISION,
    INFINITE,
    CertifiedScalar,
    ComparisonResult,
    certified_compare,
    certified_sign,
    is_infinite,
)
from .thetaspec import ipoly_sign


class Provenance(enum.Enum):
    EXACT_INPUT = "EXACT_INPUT"
    ESTIMATED = "ESTIMATED"


class Verdict(enum.Enum):
    HOLDS = "HOLDS"
    VIOLATED = "VIOLATED"
    UNDECIDED = "UNDECIDED"
    NA = "NA"


class Branch(enum.Enum):
    ALT1 = "ALT1"
    ALT2 = "ALT2"
    ALL_EQUAL = "ALL_EQUAL"
    UNDECIDED = "UNDECIDED"


def _as_scalar(v, prec):
    if is_infinite(v) or isinstance(v, CertifiedScalar):
        return v
    return CertifiedScalar.from_fraction(Fraction(v), prec)


@dataclass(frozen=True)
class ExponentTuple:
    n: int
    lam: CertifiedScalar
    lam_hat: CertifiedScalar
    om: object  # CertifiedScalar or INFINITE
    om_hat: CertifiedScalar
    provenance: Provenance = Provenance.EXACT_INPUT

    @classmethod
    def make(cls, n, lam, lam_hat, om, om_hat,
             provenance=Provenance.EXACT_INPUT, precision_bits=DEFAULT_PRECISION):
        if n < 2:
            raise ValueError("exponent tuples need n >= 2")
        t = cls(n, _as_scalar(lam, precision_bits), _as_scalar(lam_hat, precision_bits),
                _as_scalar(om, precision_bits), _as_scalar(om_hat, precision_bits),
                provenance)
        if provenance is Provenance.EXACT_INPUT:
            t._validate_trivial()
        return t

    @classmethod
    def from_estimates(cls, sim_estimates, lin_estimates, n):
        return cls(n, sim_estimates.regular, sim_estimates.uniform,
                   lin_estimates.regular, lin_estimates.uniform,
                   Provenance.ESTIMATED)

    def _validate_trivial(self):
        """lam >= lam_hat >= 1/n, om >= om_hat >= n, lam_hat <= 1."""
        checks = [
            (self.lam, self.lam_hat, "lambda >= lambda_hat"),
            (self.lam_hat, Fraction(1, self.n), "lambda_hat >= 1/n"),
            (self.om_hat, Fraction(self.n), "omega_hat >= n"),
            (Fraction(1), self.lam_hat, "lambda_hat <= 1"),
        ]
        if not is_infinite(self.om):
            checks.append((self.om, self.om_hat, "omega >= omega_hat"))
        for big, small, label in checks:
            big_s = _as_scalar(big, DEFAULT_PRECISION)
            small_s = _as_scalar(small, DEFAULT_PRECISION)
            if certified_compare(big_s, small_s) is ComparisonResult.LESS:
                raise ValueError(f"exact exponent tuple violates {label}")

    def om_inv(self, prec=DEFAULT_PRECISION):
        if is_infinite(self.om):
            return CertifiedScalar.from_int(0, prec)
        return 1 / self.om


# ---------------------------------------------------------------------------
# Largest roots of the deflated ratio-bound polynomials
# ---------------------------------------------------------------------------

def _deflated_lin(w: Fraction, n: int):
    """Ascending coefficients of x^{n-1} + ... + x + (1 - w)."""
    return [1 - w] + [Fraction(1)] * (n - 1)


def _deflated_sim(l: Fraction, n: int):
    """Ascending coefficients of (1-l) x^{n-1} - l(x^{n-2} + ... + 1)."""
    return [-l] * (n - 1) + [1 - l]


def _int_coeffs(coeffs):
    mult = lcm(*[c.denominator for c in coeffs])
    return [int(c * mult) for c in coeffs]


def _largest_root(coeffs, hi0: Fraction, precision_bits: int):
    """Largest real root of f = (x - 1) * q as a dyadic bracket, where q has
    ascending coefficients `coeffs` with exactly one positive root.  Returns
    [1, 1] when that root is certified <= 1."""
    ic = _int_coeffs([Fraction(c) for c in coeffs])
    one = Fraction(1)
    s1 = ipoly_sign(ic, one)
    if s1 >= 0:
        return one, one
    hi = hi0 if hi0 > 1 else Fraction(2)
    for _ in range(128):
        if ipoly_sign(ic, hi) > 0:
            break
        hi *= 2
    else:
        raise PrecisionExhausted("cannot bracket the deflated root", detail=coeffs)
    lo = one
    target = Fraction(1, 2 ** (precision_bits + 4))
    while hi - lo > target * max(1, abs(lo)):
        mid = (lo + hi) / 2
        s = ipoly_sign(ic, mid)
        if s == 0:
            return mid, mid
        if s > 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


class _RatioRootProvider:
    """Refinable largest-root value; interval parameters are propagated
    through the endpoint polynomials (the root is monotone increasing in
    the parameter for both families)."""

    __slots__ = ("kind", "param", "n")

    def __init__(self, kind, param: CertifiedScalar, n: int):
        self.kind = kind
        self.param = param
        self.n = n

    def _coeffs(self, value: Fraction):
        return _deflated_lin(value, self.n) if self.kind == "lin" \
            else _deflated_sim(value, self.n)

    def _bracket_top(self, value: Fraction):
        if self.kind == "lin":
            return max(value, Fraction(2))
        return 1 / (1 - value) if value < 1 else Fraction(2)

    def bounds(self, precision_bits: int):
        e = self.param.exact
        if e is not None:
            return _largest_root(self._coeffs(e), self._bracket_top(e),
                                 precision_bits)
        ref = self.param.refine(precision_bits + 8)
        plo, phi = ref.lower_fraction(), ref.upper_fraction()
        if self.kind == "sim" and phi >= 1:
            raise PrecisionExhausted(
                "lambda_hat not certified below 1", detail=self.param)
        lo, _ = _largest_root(self._coeffs(plo), self._bracket_top(plo),
                              precision_bits)
        _, hi = _largest_root(self._coeffs(phi), self._bracket_top(phi),
                              precision_bits)
        return lo, hi


def _require(cond, message, exc=ValueError):
    if not cond:
        raise exc(message)


def mm_root_lin(omega_hat: CertifiedScalar, n: int,
                precision_bits: int = DEFAULT_PRECISION) -> CertifiedScalar:
    """G_lin(omega_hat): certified largest root of the linear-problem ratio
    polynomial, via exact deflation by (x - 1) and dyadic bisection."""
    _require(n >= 2, "n must be >= 2")
    _require(certified_compare(omega_hat, Fraction(n)) is not ComparisonResult.LESS,
             "omega_hat must be >= n")
    exact = None
    if n == 2 and omega_hat.exact is not None:
        exact = omega_hat.exact - 1
    return CertifiedScalar.from_provider(
        _RatioRootProvider("lin", omega_hat, n), precision_bits,
        exact=exact).refine(precision_bits)


def mm_root_sim(lambda_hat: CertifiedScalar, n: int,
                precision_bits: int = DEFAULT_PRECISION) -> CertifiedScalar:
    """G_sim(lambda_hat): certified largest root of the simultaneous-problem
    ratio polynomial."""
    _require(n >= 2, "n must be >= 2")
    _require(certified_compare(lambda_hat, Fraction(1, n)) is not ComparisonResult.LESS,
             "lambda_hat must be >= 1/n")
    if certified_compare(lambda_hat, Fraction(1)) is not ComparisonResult.LESS:
        raise DegenerateDenominator("lambda_hat must be certified < 1")
    exact = None
    if n == 2 and lambda_hat.exact is not None:
        e = lambda_hat.exact
        exact = e / (1 - e)
    return CertifiedScalar.from_provider(
        _RatioRootProvider("sim", lambda_hat, n), precision_bits,
        exact=exact).refine(precision_bits)


# ---------------------------------------------------------------------------
# Proposition-2 style ordering of the four ratio lower bounds
# ---------------------------------------------------------------------------

def _g_at(l, n, x):
    """g(x) = (1-l) x^n - x^{n-1} + l, exact Fractions."""
    return (1 - l) * x ** n - x ** (n - 1) + l


def ordering_branch(e: ExponentTuple, precision_bits: int = DEFAULT_PRECISION
                    ) -> Branch:
    """Which chain the four quantities G_lin, (w l)^(1/(n-1)), A, G_sim form.
    Decided by the sign of g at A = (1 - 1/w)/(1 - l): negative means the
    first chain (A above the geometric mean), positive the second, zero the
    all-equal degeneracy."""
    w, l, n = e.om_hat, e.lam_hat, e.n
    if certified_compare(l, Fraction(1)) is not ComparisonResult.LESS:
        raise DegenerateDenominator("lambda_hat must be certified < 1")
    if certified_compare(w, Fraction(1)) is not ComparisonResult.GREATER:
        raise DegenerateDenominator("omega_hat must be certified > 1")

    if w.exact is not None and l.exact is not None:
        A = (1 - 1 / w.exact) / (1 - l.exact)
        sgn = _g_at(l.exact, n, A)
        s = (sgn > 0) - (sgn < 0)
    else:
        A = (1 - 1 / w) / (1 - l)
        gA = (1 - l) * A ** n - A ** (n - 1) + l
        s = certified_sign(gA, max_precision=max(1024, 8 * precision_bits))
        if s is None:
            # equivalent criterion: compare A against the geometric mean
            M = (w * l) ** Fraction(1, n - 1)
            cmp_ = certified_compare(A, M, max_precision=max(1024, 8 * precision_bits))
            if cmp_ is ComparisonResult.LESS:
                s = 1
            elif cmp_ is ComparisonResult.GREATER:
                s = -1
            elif cmp_ is ComparisonResult.EQUAL_PROVEN:
                s = 0
            else:
                return Branch.UNDECIDED
    if s < 0:
        return Branch.ALT1
    if s > 0:
        return Branch.ALT2
    return Branch.ALL_EQUAL


# ---------------------------------------------------------------------------
# Inequality report
# ---------------------------------------------------------------------------

@dataclass
class InequalityEntry:
    name: str
    lhs: object
    rhs: object
    verdict: Verdict
    slack: object
    note: str = ""

    def to_json(self):
        return {
            "name": self.name,
            "lhs": _value_json(self.lhs),
            "rhs": _value_json(self.rhs),
            "verdict": self.verdict.value,
            "slack": _value_json(self.slack),
            "note": self.note,
        }


def _value_json(v):
    if v is None:
        return None
    if is_infinite(v):
        return "INF"
    return v.json_pair()


@dataclass
class InequalityReport:
    n: int
    provenance: Provenance
    entries: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)
    branch: Branch = Branch.UNDECIDED

    @property
    def violated(self):
        return [e for e in self.entries if e.verdict is Verdict.VIOLATED]

    @property
    def hard_failure(self) -> bool:
        return bool(self.violated) and self.provenance is Provenance.EXACT_INPUT

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_json(self):
        return {
            "n": self.n,
            "provenance": self.provenance.value,
            "inequalities": [e.to_json() for e in self.entries],
            "derived": {k: _value_json(v) for k, v in self.derived.items()},
            "branch": self.branch.value,
        }


def _cmp_entry(name, lhs, rhs, kind="ge", note="", max_precision=2048):
    """Entry for lhs >= rhs ('ge'), lhs <= rhs ('le'), or lhs == rhs ('eq');
    the slack is always oriented so that negative slack means violation."""
    if lhs is None or rhs is None:
        return InequalityEntry(name, lhs, rhs, Verdict.NA, None, note or "undefined")
    inf_l, inf_r = is_infinite(lhs), is_infinite(rhs)
    if inf_l or inf_r:
        if kind == "ge":
            verdict = Verdict.HOLDS if inf_l else Verdict.VIOLATED
        elif kind == "le":
            verdict = Verdict.HOLDS if inf_r else Verdict.VIOLATED
        else:
            verdict = Verdict.HOLDS if (inf_l and inf_r) else Verdict.VIOLATED
        return InequalityEntry(name, lhs, rhs, verdict, INFINITE, note)
    slack = lhs - rhs if kind in ("ge", "eq") else rhs - lhs
    if kind == "eq":
        if slack.exact is not None:
            verdict = Verdict.HOLDS if slack.exact == 0 else Verdict.VIOLATED
        else:
            s = certified_sign(slack, max_precision=max_precision)
            verdict = Verdict.VIOLATED if s in (-1, 1) else Verdict.UNDECIDED
        return InequalityEntry(name, lhs, rhs, verdict, slack, note)
    s = certified_sign(slack, max_precision=max_precision)
    if s is None:
        verdict = Verdict.UNDECIDED
    elif s >= 0:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.VIOLATED
    return InequalityEntry(name, lhs, rhs, verdict, slack, note)


def _chain_entry(name, first, second):
    """Conjunction of two entries sharing a middle term."""
    if first.verdict is Verdict.NA or second.verdict is Verdict.NA:
        return InequalityEntry(name, None, None, Verdict.NA, None, "undefined part")
    order = [Verdict.VIOLATED, Verdict.UNDECIDED, Verdict.HOLDS]
    verdict = min((first.verdict, second.verdict), key=order.index)
    slack = None
    if not (is_infinite(first.slack) or is_infinite(second.slack)):
        slack = first.slack.min_with(second.slack)
    elif is_infinite(first.slack) and is_infinite(second.slack):
        slack = INFINITE
    else:
        slack = second.slack if is_infinite(first.slack) else first.slack
    return InequalityEntry(name, first.lhs, second.rhs, verdict, slack,
                           f"chain of {first.name} and {second.name}")


def evaluate_inequalities(e: ExponentTuple,
                          precision_bits: int = DEFAULT_PRECISION
                          ) -> InequalityReport:
    """Evaluate the full inequality suite on the tuple with certified
    comparisons.  n=2-only identities are emitted only for n=2; an infinite
    regular linear exponent uses the 1/omega -> 0 convention; entries whose
    denominators degenerate are marked NA rather than failing the run."""
    n = e.n
    lam, lam_hat, om_hat = e.lam, e.lam_hat, e.om_hat
    om = e.om
    om_is_inf = is_infinite(om)
    om_inv = e.om_inv(precision_bits)
    report = InequalityReport(n, e.provenance)
    maxp = max(2048, 8 * precision_bits)

    lam_hat_lt1 = certified_compare(lam_hat, Fraction(1)) is ComparisonResult.LESS
    om_hat_gt1 = certified_compare(om_hat, Fraction(1)) is ComparisonResult.GREATER

    # ratio of the two khintchine-style packages
    khin_lin_lhs = INFINITE if om_is_inf else (1 + om) / (1 + lam)
    khin_sim_lhs = (1 + om_inv) / (1 + 1 / lam)

    ent = report.entries.append
    ent(_cmp_entry("khintchine_lin", khin_lin_lhs,
                   CertifiedScalar.from_int(n), "ge", max_precision=maxp))
    ent(_cmp_entry("khintchine_sim", khin_sim_lhs,
                   CertifiedScalar.from_fraction(Fraction(1, n)), "ge",
                   max_precision=maxp))

    A = None
    if lam_hat_lt1:
        A = (1 - om_inv) / (1 - lam_hat)
    bl_lin_rhs = (n - 1) / (1 - lam_hat) if lam_hat_lt1 else None
    ent(_cmp_entry("bugeaud_laurent_lin", khin_lin_lhs, bl_lin_rhs, "ge",
                   note="" if lam_hat_lt1 else "lambda_hat = 1",
                   max_precision=maxp))
    bl_sim_rhs = (1 - 1 / om_hat) / (n - 1)
    ent(_cmp_entry("bugeaud_laurent_sim", khin_sim_lhs, bl_sim_rhs, "ge",
                   max_precision=maxp))

    ut_lin = _cmp_entry("uniform_transference_lin", om_hat, bl_lin_rhs, "ge",
                        note="" if lam_hat_lt1 else "lambda_hat = 1",
                        max_precision=maxp)
    ut_sim = _cmp_entry("uniform_transference_sim", lam_hat,
                        (1 - 1 / om_hat) * Fraction(1, n - 1), "ge",
                        max_precision=maxp)
    ent(ut_lin)
    ent(ut_sim)

    ss_lin = _cmp_entry("schmidt_summerer_lin", om_hat, khin_lin_lhs, "le",
                        max_precision=maxp)
    ss_sim = _cmp_entry("schmidt_summerer_sim", lam_hat, khin_sim_lhs, "le",
                        max_precision=maxp)
    ent(ss_lin)
    ent(ss_sim)

    # B = (1+lambda)/(1+1/omega) and the rewritten ratio bounds
    B = (1 + lam) / (1 + om_inv)
    ratio_lin = INFINITE if om_is_inf else om / om_hat
    ratio_sim = lam / lam_hat
    ent(_cmp_entry("ratio_bound_lin", ratio_lin, B, "ge", max_precision=maxp))
    ent(_cmp_entry("ratio_bound_sim", ratio_sim, B, "ge", max_precision=maxp))
    ent(_cmp_entry("b_dominates_a", B, A, "ge",
                   note="" if A is not None else "lambda_hat = 1",
                   max_precision=maxp))
    ent(_cmp_entry("ratio_bound_lin_weak", ratio_lin, A, "ge",
                   note="" if A is not None else "lambda_hat = 1",
                   max_precision=maxp))
    ent(_cmp_entry("ratio_bound_sim_weak", ratio_sim, A, "ge",
                   note="" if A is not None else "lambda_hat = 1",
                   max_precision=maxp))

    G_lin = G_sim = None
    mm_ok = certified_compare(om_hat, Fraction(n)) is not ComparisonResult.LESS \
        and certified_compare(lam_hat, Fraction(1, n)) is not ComparisonResult.LESS
    if mm_ok and lam_hat_lt1:
        G_lin = mm_root_lin(om_hat, n, precision_bits)
        G_sim = mm_root_sim(lam_hat, n, precision_bits)
    ent(_cmp_entry("marnat_moshchevitin_lin", ratio_lin, G_lin, "ge",
                   note="" if G_lin is not None else "tuple outside root domain",
                   max_precision=maxp))
    ent(_cmp_entry("marnat_moshchevitin_sim", ratio_sim, G_sim, "ge",
                   note="" if G_sim is not None else "tuple outside root domain",
                   max_precision=maxp))
    if G_lin is not None:
        ent(_cmp_entry("combined_lower_lin", ratio_lin, B.max_with(G_lin), "ge",
                       max_precision=maxp))
        ent(_cmp_entry("combined_lower_sim", ratio_sim, B.max_with(G_sim), "ge",
                       max_precision=maxp))
        ent(_cmp_entry("a_dominates_min_roots", A, G_lin.min_with(G_sim), "ge",
                       note="" if A is not None else "lambda_hat = 1",
                       max_precision=maxp))

    # power-form dual bounds
    dual_unif_rhs = INFINITE if om_is_inf else om ** (n - 1) / om_hat ** n
    dual_reg_rhs = INFINITE if om_is_inf else om ** n / om_hat ** (n + 1)
    ent(_cmp_entry("schleischitz_dual_uniform", lam_hat, dual_unif_rhs, "le",
                   max_precision=maxp))
    ent(_cmp_entry("schleischitz_dual_regular", lam, dual_reg_rhs, "le",
                   max_precision=maxp))

    # chained versions recovering the khintchine-package bounds
    ent(_chain_entry("chain_lin", ss_lin, ut_lin))
    ent(_chain_entry("chain_sim", ss_sim, ut_sim))

    if n == 2:
        ident_lhs = 1 / om_hat + lam_hat
        ent(_cmp_entry("jarnik_identity", ident_lhs,
                       CertifiedScalar.from_int(1), "eq", max_precision=maxp))
        ent(_cmp_entry("jarnik_ratio_lin", ratio_lin, om_hat - 1, "ge",
                       max_precision=maxp))
        jr_sim_rhs = lam_hat / (1 - lam_hat) if lam_hat_lt1 else None
        ent(_cmp_entry("jarnik_ratio_sim", ratio_sim, jr_sim_rhs, "ge",
                       note="" if lam_hat_lt1 else "lambda_hat = 1",
                       max_precision=maxp))

    geo = None
    if om_hat_gt1 and lam_hat_lt1:
        geo = (om_hat * lam_hat) ** Fraction(1, n - 1)
    report.derived = {
        "B": B,
        "A": A,
        "G_lin": G_lin,
        "G_sim": G_sim,
        "geo_mean_pow": geo,
    }
    try:
        report.branch = ordering_branch(e, precision_bits) \
            if (om_hat_gt1 and lam_hat_lt1) else Branch.UNDECIDED
    except DegenerateDenominator:
        report.branch = Branch.UNDECIDED
    return report
