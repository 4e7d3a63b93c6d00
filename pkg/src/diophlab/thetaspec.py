"""Symbolic specifications of the target vector theta and their certified
evaluation.

Component grammar (one component per coordinate)::

    rat:p/q                  exact rational
    dec:3.14159              exact decimal literal (no binary conversion slop)
    sqrt:p/q                 square root of a nonnegative rational
    alg:c_k,...,c_0@[lo,hi]  real root of c_k x^k + ... + c_0 isolated in [lo,hi]
    lac:b@a1,a2,...          lacunary sum of b**(-a_i) over the given schedule

Components are joined with commas; a comma starts a new component exactly
when it is followed by one of the type tags, so algebraic coefficient lists
need no extra quoting.  Algebraic components are validated at parse time:
the isolating interval must show a sign change and a Sturm count of exactly
one root.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import MalformedSpec
from .scalar import DEFAULT_PRECISION, CertifiedScalar

_SPLIT_RE = re.compile(r",(?=(?:rat|dec|sqrt|alg|lac):)")
_LAC_BIT_CAP = 1_000_000  # largest b**a_K we are willing to materialize


# ---------------------------------------------------------------------------
# Exact polynomial helpers (coefficients ascending, x^0 first)
# ---------------------------------------------------------------------------

def poly_eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def ipoly_sign(coeffs, x: Fraction) -> int:
    """Sign of an integer-coefficient polynomial at a rational point,
    computed exactly in integers (denominators cleared)."""
    p, q = x.numerator, x.denominator
    v = coeffs[-1]
    qq = 1
    for c in reversed(coeffs[:-1]):
        qq *= q
        v = v * p + c * qq
    return (v > 0) - (v < 0)


def _poly_deriv(coeffs):
    return [Fraction(i) * c for i, c in enumerate(coeffs)][1:] or [Fraction(0)]


def _poly_trim(coeffs):
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    return coeffs


def _poly_rem(a, b):
    """Remainder of a / b over the rationals."""
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    db, lb = len(b) - 1, b[-1]
    while True:
        da = len(a) - 1
        if da < db or (da == 0 and a[0] == 0):
            break
        factor = a[-1] / lb
        shift = da - db
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a[-1] = Fraction(0)
        a = _poly_trim(a)
    return a


def sturm_chain(coeffs):
    f0 = _poly_trim([Fraction(c) for c in coeffs])
    chain = [f0, _poly_trim(_poly_deriv(f0))]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        r = _poly_rem(chain[-2], chain[-1])
        if len(r) == 1 and r[0] == 0:
            break
        chain.append([-c for c in r])
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for f in chain:
        v = poly_eval(f, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_root_count(coeffs, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    chain = sturm_chain(coeffs)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


# ---------------------------------------------------------------------------
# Component kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalComponent:
    value: Fraction
    source: str = "rat"

    def text(self):
        if self.source == "dec":
            return f"dec:{self.raw}"
        return f"rat:{self.value.numerator}/{self.value.denominator}"

    raw: str = ""

    @property
    def exact_value(self):
        return self.value

    def scalar(self, precision_bits=DEFAULT_PRECISION):
        return CertifiedScalar.from_fraction(self.value, precision_bits)


@dataclass(frozen=True)
class SqrtComponent:
    radicand: Fraction

    def text(self):
        return f"sqrt:{self.radicand.numerator}/{self.radicand.denominator}" \
            if self.radicand.denominator != 1 else f"sqrt:{self.radicand.numerator}"

    @property
    def exact_value(self):
        s = CertifiedScalar.sqrt_rational(self.radicand, 16)
        return s.exact

    def scalar(self, precision_bits=DEFAULT_PRECISION):
        return CertifiedScalar.sqrt_rational(self.radicand, precision_bits)


class _AlgebraicRootProvider:
    """Bisection refinement of an isolated real root, with a persistent
    bracket so that higher-precision requests resume where previous ones
    stopped."""

    __slots__ = ("coeffs", "lo", "hi", "_sign_hi")

    def __init__(self, coeffs, lo: Fraction, hi: Fraction):
        self.coeffs = tuple(coeffs)
        self.lo = lo
        self.hi = hi
        self._sign_hi = ipoly_sign(self.coeffs, hi)

    def bounds(self, precision_bits: int):
        lo, hi = self.lo, self.hi
        tol_num = max(1, abs(lo.numerator) // lo.denominator)
        target = Fraction(tol_num, 1) / (Fraction(2) ** (precision_bits + 4))
        while hi - lo > target:
            mid = (lo + hi) / 2
            s = ipoly_sign(self.coeffs, mid)
            if s == 0:
                lo = hi = mid
                break
            if s == self._sign_hi:
                hi = mid
            else:
                lo = mid
        self.lo, self.hi = lo, hi
        return lo, hi


@dataclass(frozen=True)
class AlgebraicComponent:
    coeffs: tuple  # ascending integer coefficients
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "_provider",
                           _AlgebraicRootProvider(self.coeffs, self.lo, self.hi))

    def text(self):
        cs = ",".join(str(c) for c in reversed(self.coeffs))
        return f"alg:{cs}@[{_frac_text(self.lo)},{_frac_text(self.hi)}]"

    @property
    def exact_value(self):
        return None

    def scalar(self, precision_bits=DEFAULT_PRECISION):
        return CertifiedScalar.from_provider(self._provider, precision_bits)


class _LacunaryProvider:
    """Partial sums of sum_k b**(-a_k); when evaluation stops before the
    last scheduled exponent, the remaining terms are bounded above by
    2 * b**(-a_{next}) and that bound is added to the upper endpoint."""

    __slots__ = ("base", "exponents")

    def __init__(self, base, exponents):
        self.base = base
        self.exponents = tuple(exponents)

    def bounds(self, precision_bits: int):
        b, exps = self.base, self.exponents
        thresh = Fraction(1, 2 ** (precision_bits + 4))
        total = Fraction(0)
        for j, a in enumerate(exps):
            total += Fraction(1, b ** a)
            if j + 1 < len(exps):
                tail = Fraction(2, b ** exps[j + 1])
                if tail <= thresh:
                    return total, total + tail
        return total, total


@dataclass(frozen=True)
class LacunaryComponent:
    base: int
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "_provider",
                           _LacunaryProvider(self.base, self.exponents))

    def text(self):
        return f"lac:{self.base}@{','.join(str(a) for a in self.exponents)}"

    @property
    def exact_value(self):
        return None

    def scalar(self, precision_bits=DEFAULT_PRECISION):
        return CertifiedScalar.from_provider(self._provider, precision_bits)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _frac_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedSpec(f"cannot parse rational {text!r}: {exc}") from exc


def _parse_component(token: str):
    token = token.strip()
    if ":" not in token:
        raise MalformedSpec(f"component {token!r} lacks a type tag")
    tag, body = token.split(":", 1)

    if tag == "rat":
        f = _parse_fraction(body)
        return RationalComponent(f)

    if tag == "dec":
        if "/" in body:
            raise MalformedSpec(f"dec: expects a decimal literal, got {body!r}")
        f = _parse_fraction(body)
        return RationalComponent(f, source="dec", raw=body.strip())

    if tag == "sqrt":
        f = _parse_fraction(body)
        if f < 0:
            raise MalformedSpec(f"sqrt of negative rational {body!r}")
        return SqrtComponent(f)

    if tag == "alg":
        m = re.fullmatch(r"(.*)@\[(.+),(.+)\]", body.strip())
        if not m:
            raise MalformedSpec(f"alg component needs 'coeffs@[lo,hi]': {token!r}")
        coeff_text, lo_text, hi_text = m.groups()
        try:
            desc = [int(c.strip()) for c in coeff_text.split(",")]
        except ValueError as exc:
            raise MalformedSpec(f"non-integer coefficient in {token!r}") from exc
        coeffs = tuple(reversed(desc))  # store ascending
        if len(coeffs) < 2 or coeffs[-1] == 0:
            raise MalformedSpec(f"alg polynomial must have degree >= 1: {token!r}")
        lo, hi = _parse_fraction(lo_text), _parse_fraction(hi_text)
        if not lo < hi:
            raise MalformedSpec(f"empty isolating interval in {token!r}")
        slo, shi = ipoly_sign(coeffs, lo), ipoly_sign(coeffs, hi)
        if slo == 0 or shi == 0:
            raise MalformedSpec(
                f"isolating interval endpoint is a root in {token!r}; "
                "use rat: for rational values")
        if slo == shi:
            raise MalformedSpec(f"no sign change over the interval in {token!r}")
        if sturm_root_count(coeffs, lo, hi) != 1:
            raise MalformedSpec(f"interval does not isolate one root in {token!r}")
        return AlgebraicComponent(coeffs, lo, hi)

    if tag == "lac":
        m = re.fullmatch(r"(\d+)@(.+)", body.strip())
        if not m:
            raise MalformedSpec(f"lac component needs 'b@a1,a2,...': {token!r}")
        base = int(m.group(1))
        if base < 2:
            raise MalformedSpec(f"lacunary base must be >= 2: {token!r}")
        try:
            exps = [int(a.strip()) for a in m.group(2).split(",")]
        except ValueError as exc:
            raise MalformedSpec(f"non-integer exponent in {token!r}") from exc
        if not exps or any(a <= 0 for a in exps) or \
                any(a >= b for a, b in zip(exps, exps[1:])):
            raise MalformedSpec(
                f"lacunary schedule must be strictly increasing positive: {token!r}")
        if exps[-1] * math.log2(base) > _LAC_BIT_CAP:
            raise MalformedSpec(f"lacunary schedule too deep to evaluate: {token!r}")
        return LacunaryComponent(base, tuple(exps))

    raise MalformedSpec(f"unknown component tag {tag!r}")


class ThetaSpec:
    """An n-tuple of component specs, evaluable to certified scalars."""

    def __init__(self, components):
        components = list(components)
        if not components:
            raise MalformedSpec("theta needs at least one component")
        self.components = components
        self.n = len(components)

    @classmethod
    def parse(cls, text: str) -> "ThetaSpec":
        tokens = _SPLIT_RE.split(text.strip())
        return cls([_parse_component(tok) for tok in tokens])

    def text(self) -> str:
        return ",".join(c.text() for c in self.components)

    @property
    def all_exact(self) -> bool:
        return all(c.exact_value is not None for c in self.components)

    def exact_values(self):
        return [c.exact_value for c in self.components]

    def scalars(self, precision_bits: int = DEFAULT_PRECISION):
        """Component scalars at construction precision (not width-refined)."""
        return [c.scalar(precision_bits) for c in self.components]

    def __repr__(self):
        return f"ThetaSpec({self.text()!r})"


def evaluate(spec: ThetaSpec, precision_bits: int):
    """Certified evaluation of every component to relative width
    2**(1 - precision_bits)."""
    if precision_bits < 8:
        raise ValueError("precision_bits must be >= 8")
    return [c.scalar(precision_bits).refine(precision_bits)
            for c in spec.components]


# ---------------------------------------------------------------------------
# Built-in corpus
# ---------------------------------------------------------------------------

CORPUS = {
    "sqrt2_sqrt3": ("sqrt:2,sqrt:3",
                    "quadratic pair (sqrt 2, sqrt 3), the workhorse example"),
    "plastic": ("alg:1,0,-1,-1@[1,2],alg:1,-2,1,-1@[1,2]",
                "(rho, rho^2) for the real root rho of x^3 - x - 1"),
    "golden": ("alg:1,-1,-1@[1,2]",
               "golden ratio (1+sqrt 5)/2, n = 1"),
    "sqrt2": ("sqrt:2", "sqrt 2 alone, n = 1"),
    "liouville_pair": ("lac:2@2,6,20,60,180,lac:2@3,8,23,64,185",
                       "two interleaved lacunary series with collapsing records"),
    "rationals": ("rat:1/2,rat:1/3", "degenerate rational pair (relation demo)"),
}


def corpus_spec(name: str) -> ThetaSpec:
    if name not in CORPUS:
        raise MalformedSpec(f"unknown corpus entry {name!r}")
    return ThetaSpec.parse(CORPUS[name][0])
