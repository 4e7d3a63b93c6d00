"""Certified real scalars: directed-rounding intervals over an expression DAG.

A :class:`CertifiedScalar` is an immutable interval ``[lower, upper]`` with
dyadic-rational endpoints (MPFR numbers) that provably contains the exact
real value of its defining expression.  Every scalar keeps a reference to
that expression, so it can be re-evaluated ("refined") at any precision;
comparisons escalate precision until they either resolve with proof or
return UNDECIDED.

Endpoint arithmetic is delegated to gmpy2/MPFR with explicit RoundDown /
RoundUp contexts, which keeps the endpoints exactly reproducible across
platforms.  Exact rationals are tracked through the DAG so that purely
rational computations compare exactly (EQUAL_PROVEN) instead of refining
forever.
"""

from __future__ import annotations

import enum
from fractions import Fraction

import gmpy2

from .errors import PrecisionExhausted

DEFAULT_PRECISION = 128

# escalation cap for internal evaluations; beyond this we give up honestly
_HARD_PRECISION_CAP = 1 << 20

_NEG_INF = gmpy2.mpfr("-inf")
_POS_INF = gmpy2.mpfr("inf")

_ctx_cache: dict[int, tuple] = {}


def _ctxs(prec: int):
    """(round-down, round-up) context pair at working precision `prec`."""
    pair = _ctx_cache.get(prec)
    if pair is None:
        pair = (
            gmpy2.context(precision=prec, round=gmpy2.RoundDown),
            gmpy2.context(precision=prec, round=gmpy2.RoundUp),
        )
        _ctx_cache[prec] = pair
    return pair


def _desanitize(lo, hi):
    # NaN can only arise from inf-inf style overflow artifacts; widen soundly.
    if gmpy2.is_nan(lo):
        lo = _NEG_INF
    if gmpy2.is_nan(hi):
        hi = _POS_INF
    return lo, hi


class _NeedsPrecision(Exception):
    """Internal: the current working precision cannot evaluate this node
    (denominator straddles zero, log/pow argument not yet separated)."""


class ComparisonResult(enum.Enum):
    LESS = "LESS"
    GREATER = "GREATER"
    EQUAL_PROVEN = "EQUAL_PROVEN"
    UNDECIDED = "UNDECIDED"


class _InfiniteType:
    """Distinguished infinite magnitude (e.g. the angle tangent of a
    perpendicular subspace, or an infinite exponent)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"


INFINITE = _InfiniteType()


def is_infinite(x) -> bool:
    return x is INFINITE


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------

class _Node:
    __slots__ = ("op", "args", "payload", "exact", "_cprec", "_clo", "_chi")

    def __init__(self, op, args=(), payload=None, exact=None):
        self.op = op
        self.args = args
        self.payload = payload
        self.exact = exact
        self._cprec = 0
        self._clo = None
        self._chi = None


def _exact_sqrt(f: Fraction):
    """Exact rational square root of a nonnegative Fraction, or None."""
    rn, en = gmpy2.iroot(gmpy2.mpz(f.numerator), 2)
    if not en:
        return None
    rd, ed = gmpy2.iroot(gmpy2.mpz(f.denominator), 2)
    if not ed:
        return None
    return Fraction(int(rn), int(rd))


def _exact_pow(base: Fraction, exp: Fraction):
    """Exact value of base**exp for positive rational base when the result
    is rational, else None."""
    if base <= 0:
        return None if base != 0 else (Fraction(0) if exp > 0 else None)
    p, q = exp.numerator, exp.denominator
    if q == 1:
        return base ** p
    rn, en = gmpy2.iroot(gmpy2.mpz(base.numerator), q)
    if not en:
        return None
    rd, ed = gmpy2.iroot(gmpy2.mpz(base.denominator), q)
    if not ed:
        return None
    return Fraction(int(rn), int(rd)) ** p


def _round_fraction(f: Fraction, prec: int):
    cd, cu = _ctxs(prec)
    q = gmpy2.mpq(f.numerator, f.denominator)
    zero = gmpy2.mpfr(0)
    return cd.add(zero, q), cu.add(zero, q)


def _eval(node: _Node, prec: int):
    """Sound enclosure of `node` with endpoint arithmetic at `prec` bits.
    Caches the widest precision evaluated so far (tighter is always valid)."""
    if node._cprec >= prec:
        return node._clo, node._chi

    if node.exact is not None:
        lo, hi = _round_fraction(node.exact, prec)
    else:
        lo, hi = _eval_inner(node, prec)
        lo, hi = _desanitize(lo, hi)

    node._cprec = prec
    node._clo = lo
    node._chi = hi
    return lo, hi


def _eval_inner(node: _Node, prec: int):
    cd, cu = _ctxs(prec)
    op = node.op

    if op == "rat":
        return _round_fraction(node.payload, prec)

    if op == "provider":
        flo, fhi = node.payload.bounds(prec)
        lo, _ = _round_fraction(flo, prec)
        _, hi = _round_fraction(fhi, prec)
        return lo, hi

    if op == "neg":
        alo, ahi = _eval(node.args[0], prec)
        return -ahi, -alo

    if op == "abs":
        alo, ahi = _eval(node.args[0], prec)
        if alo >= 0:
            return alo, ahi
        if ahi <= 0:
            return -ahi, -alo
        return gmpy2.mpfr(0), max(-alo, ahi)

    if op == "add":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        return cd.add(alo, blo), cu.add(ahi, bhi)

    if op == "sub":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        return cd.sub(alo, bhi), cu.sub(ahi, blo)

    if op == "mul":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        lo = min(cd.mul(alo, blo), cd.mul(alo, bhi), cd.mul(ahi, blo), cd.mul(ahi, bhi))
        hi = max(cu.mul(alo, blo), cu.mul(alo, bhi), cu.mul(ahi, blo), cu.mul(ahi, bhi))
        return lo, hi

    if op == "div":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        if blo <= 0 <= bhi:
            raise _NeedsPrecision("division by an interval containing zero")
        lo = min(cd.div(alo, blo), cd.div(alo, bhi), cd.div(ahi, blo), cd.div(ahi, bhi))
        hi = max(cu.div(alo, blo), cu.div(alo, bhi), cu.div(ahi, blo), cu.div(ahi, bhi))
        return lo, hi

    if op == "sqrt":
        alo, ahi = _eval(node.args[0], prec)
        if ahi < 0:
            raise PrecisionExhausted(
                "square root of a certified-negative quantity", detail=node)
        if alo < 0:
            if not node.payload:  # payload: clamping allowed
                raise _NeedsPrecision("sqrt argument not yet certified nonnegative")
            return gmpy2.mpfr(0), cu.sqrt(ahi)
        return cd.sqrt(alo), cu.sqrt(ahi)

    if op == "log":
        alo, ahi = _eval(node.args[0], prec)
        if alo <= 0:
            raise _NeedsPrecision("log argument not yet certified positive")
        return cd.log(alo), cu.log(ahi)

    if op == "pow":
        xlo, xhi = _eval(node.args[0], prec)
        ylo, yhi = _eval(node.args[1], prec)
        if xlo <= 0:
            raise _NeedsPrecision("pow base not yet certified positive")
        # x**y is monotone in each argument separately for x > 0, so the
        # extrema over the rectangle sit at its corners.
        corners = ((xlo, ylo), (xlo, yhi), (xhi, ylo), (xhi, yhi))
        lo = min(cd.pow(x, y) for x, y in corners)
        hi = max(cu.pow(x, y) for x, y in corners)
        return lo, hi

    if op == "max":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        return max(alo, blo), max(ahi, bhi)

    if op == "min":
        alo, ahi = _eval(node.args[0], prec)
        blo, bhi = _eval(node.args[1], prec)
        return min(alo, blo), min(ahi, bhi)

    raise AssertionError(f"unknown node op {op!r}")


def _eval_escalating(node: _Node, prec: int, cap: int):
    q = prec
    while True:
        try:
            return _eval(node, q)
        except _NeedsPrecision as exc:
            q *= 2
            if q > cap:
                raise PrecisionExhausted(str(exc), detail=node) from exc


def _width_ok(lo, hi, precision_bits: int) -> bool:
    if gmpy2.is_infinite(lo) or gmpy2.is_infinite(hi):
        return False
    cd, cu = _ctxs(64)
    w = cu.sub(hi, lo)
    scale = max(gmpy2.mpfr(1), abs(lo))
    bound = cd.mul(gmpy2.exp2(gmpy2.mpfr(1 - precision_bits)), scale)
    return w <= bound


# ---------------------------------------------------------------------------
# Public scalar type
# ---------------------------------------------------------------------------

class CertifiedScalar:
    """Immutable certified interval with a refinable defining expression."""

    __slots__ = ("lower", "upper", "precision_bits", "_node")

    def __init__(self, lower, upper, precision_bits, node):
        self.lower = lower
        self.upper = upper
        self.precision_bits = precision_bits
        self._node = node

    # -- construction -------------------------------------------------

    @staticmethod
    def _from_node(node: _Node, precision_bits: int) -> "CertifiedScalar":
        lo, hi = _eval_escalating(node, precision_bits + 8, _HARD_PRECISION_CAP)
        return CertifiedScalar(lo, hi, precision_bits, node)

    @classmethod
    def from_fraction(cls, value, precision_bits: int = DEFAULT_PRECISION):
        f = Fraction(value)
        return cls._from_node(_Node("rat", payload=f, exact=f), precision_bits)

    @classmethod
    def from_int(cls, value: int, precision_bits: int = DEFAULT_PRECISION):
        return cls.from_fraction(Fraction(value), precision_bits)

    @classmethod
    def from_decimal_string(cls, text: str, precision_bits: int = DEFAULT_PRECISION):
        return cls.from_fraction(Fraction(text.strip()) if "/" in text
                                 else Fraction(_decimal_to_fraction(text)),
                                 precision_bits)

    @classmethod
    def from_provider(cls, provider, precision_bits: int = DEFAULT_PRECISION,
                      exact=None):
        """Wrap any object with a ``bounds(precision_bits) -> (Fraction, Fraction)``
        method (algebraic roots, lacunary series, polynomial roots)."""
        return cls._from_node(_Node("provider", payload=provider, exact=exact),
                              precision_bits)

    @classmethod
    def sqrt_rational(cls, value, precision_bits: int = DEFAULT_PRECISION):
        f = Fraction(value)
        if f < 0:
            raise ValueError("sqrt_rational of a negative rational")
        return cls.from_fraction(f, precision_bits).sqrt()

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CertifiedScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return CertifiedScalar.from_fraction(other, self.precision_bits)
        return NotImplemented

    def _binary(self, other, op, exact_fn):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        exact = None
        ea, eb = self._node.exact, other._node.exact
        if ea is not None and eb is not None:
            exact = exact_fn(ea, eb)
        prec = max(self.precision_bits, other.precision_bits)
        return CertifiedScalar._from_node(
            _Node(op, args=(self._node, other._node), exact=exact), prec)

    def __add__(self, other):
        return self._binary(other, "add", lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, "sub", lambda a, b: a - b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ea, eb = self._node.exact, other._node.exact
        if ea is not None and eb is not None:
            exact = ea * eb
        elif ea == 0 or eb == 0:
            exact = Fraction(0)
        else:
            exact = None
        prec = max(self.precision_bits, other.precision_bits)
        return CertifiedScalar._from_node(
            _Node("mul", args=(self._node, other._node), exact=exact), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, "div",
                            lambda a, b: a / b if b != 0 else None)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        e = self._node.exact
        return CertifiedScalar._from_node(
            _Node("neg", args=(self._node,), exact=None if e is None else -e),
            self.precision_bits)

    def abs(self):
        e = self._node.exact
        return CertifiedScalar._from_node(
            _Node("abs", args=(self._node,), exact=None if e is None else abs(e)),
            self.precision_bits)

    def sqrt(self):
        e = self._node.exact
        exact = _exact_sqrt(e) if (e is not None and e >= 0) else None
        return CertifiedScalar._from_node(
            _Node("sqrt", args=(self._node,), payload=False, exact=exact),
            self.precision_bits)

    def sqrt_clamped(self):
        """Square root clamped at zero when the argument interval dips below
        zero; sound whenever the true argument is known nonnegative."""
        e = self._node.exact
        exact = _exact_sqrt(e) if (e is not None and e >= 0) else None
        return CertifiedScalar._from_node(
            _Node("sqrt", args=(self._node,), payload=True, exact=exact),
            self.precision_bits)

    def log(self):
        e = self._node.exact
        exact = Fraction(0) if e == 1 else None
        return CertifiedScalar._from_node(
            _Node("log", args=(self._node,), exact=exact), self.precision_bits)

    def __pow__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        exact = None
        ea, eb = self._node.exact, other._node.exact
        if ea is not None and eb is not None:
            exact = _exact_pow(ea, eb)
        prec = max(self.precision_bits, other.precision_bits)
        return CertifiedScalar._from_node(
            _Node("pow", args=(self._node, other._node), exact=exact), prec)

    def max_with(self, other):
        return self._binary(other, "max", lambda a, b: max(a, b))

    def min_with(self, other):
        return self._binary(other, "min", lambda a, b: min(a, b))

    # -- refinement and inspection ---------------------------------------

    def refine(self, precision_bits: int) -> "CertifiedScalar":
        """New scalar whose relative width is <= 2**(1 - precision_bits)."""
        node = self._node
        cap = max(1 << 16, precision_bits * 64)
        q = precision_bits + 16
        while True:
            lo, hi = _eval_escalating(node, q, _HARD_PRECISION_CAP)
            if _width_ok(lo, hi, precision_bits):
                return CertifiedScalar(lo, hi, precision_bits, node)
            q *= 2
            if q > cap:
                raise PrecisionExhausted(
                    f"cannot reach relative width 2^(1-{precision_bits})",
                    detail=node)

    @property
    def exact(self):
        """Exact Fraction value when the expression is known rational."""
        return self._node.exact

    def lower_fraction(self) -> Fraction:
        if gmpy2.is_infinite(self.lower):
            raise OverflowError("lower endpoint overflowed")
        n, d = self.lower.as_integer_ratio()
        return Fraction(int(n), int(d))

    def upper_fraction(self) -> Fraction:
        if gmpy2.is_infinite(self.upper):
            raise OverflowError("upper endpoint overflowed")
        n, d = self.upper.as_integer_ratio()
        return Fraction(int(n), int(d))

    def width_fraction(self) -> Fraction:
        return self.upper_fraction() - self.lower_fraction()

    def midpoint_float(self) -> float:
        return (float(self.lower) + float(self.upper)) / 2.0

    @property
    def contains_zero(self) -> bool:
        return self.lower <= 0 <= self.upper

    def json_pair(self):
        return [endpoint_str(self.lower), endpoint_str(self.upper)]

    def __repr__(self):
        return f"CertifiedScalar[{self.lower!r}, {self.upper!r}]"


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------

def certified_compare(a: CertifiedScalar, b, max_precision: int | None = None
                      ) -> ComparisonResult:
    """Three-way certified comparison.  LESS/GREATER only on certified
    interval disjointness; EQUAL_PROVEN only for exact rationals or the
    very same expression; otherwise UNDECIDED after refining both sides
    up to `max_precision`."""
    if isinstance(b, (int, Fraction)):
        b = CertifiedScalar.from_fraction(b, a.precision_bits)
    if max_precision is None:
        max_precision = max(512, 4 * max(a.precision_bits, b.precision_bits))

    if a._node is b._node:
        return ComparisonResult.EQUAL_PROVEN
    ea, eb = a._node.exact, b._node.exact
    if ea is not None and eb is not None:
        if ea < eb:
            return ComparisonResult.LESS
        if ea > eb:
            return ComparisonResult.GREATER
        return ComparisonResult.EQUAL_PROVEN

    x, y = a, b
    p = max(x.precision_bits, y.precision_bits)
    while True:
        if x.upper < y.lower:
            return ComparisonResult.LESS
        if y.upper < x.lower:
            return ComparisonResult.GREATER
        if p >= max_precision:
            return ComparisonResult.UNDECIDED
        p = min(2 * p, max_precision)
        try:
            x = x.refine(p)
            y = y.refine(p)
        except PrecisionExhausted:
            return ComparisonResult.UNDECIDED


def certified_less(a, b, max_precision=None) -> bool:
    return certified_compare(a, b, max_precision) is ComparisonResult.LESS


def certified_greater(a, b, max_precision=None) -> bool:
    return certified_compare(a, b, max_precision) is ComparisonResult.GREATER


def certified_sign(a: CertifiedScalar, max_precision=None):
    """-1, 0 (only if exactly rational zero), +1, or None when undecided."""
    r = certified_compare(a, Fraction(0), max_precision)
    if r is ComparisonResult.LESS:
        return -1
    if r is ComparisonResult.GREATER:
        return 1
    if r is ComparisonResult.EQUAL_PROVEN:
        return 0
    return None


def intervals_overlap(a: CertifiedScalar, b: CertifiedScalar) -> bool:
    """True when the two certified intervals are not disjoint (the honest
    'these may be equal' check used for constructed identities)."""
    return not (a.upper < b.lower or b.upper < a.lower)


def certified_nearest_int(x: CertifiedScalar, max_precision: int | None = None
                          ) -> tuple[int, bool]:
    """Nearest integer to a certified scalar, with exact round-half-to-even
    tie handling.  Returns (value, tie_flag).  Raises PrecisionExhausted when
    a non-exact value cannot be separated from a half-integer."""
    e = x._node.exact
    if e is not None:
        fl = e.numerator // e.denominator
        frac = e - fl
        if frac == Fraction(1, 2):
            return (fl if fl % 2 == 0 else fl + 1), True
        return (fl if frac < Fraction(1, 2) else fl + 1), False

    if max_precision is None:
        max_precision = max(2048, 8 * x.precision_bits)
    p = x.precision_bits
    cur = x
    half = Fraction(1, 2)
    while True:
        lo = cur.lower_fraction() + half
        hi = cur.upper_fraction() + half
        klo = lo.numerator // lo.denominator
        khi = hi.numerator // hi.denominator
        if klo == khi and lo != klo and hi != khi:
            return klo, False
        if p >= max_precision:
            raise PrecisionExhausted(
                "nearest integer undecidable (value within rounding slack of a "
                "half-integer)", detail=x)
        p = min(2 * p, max_precision)
        cur = cur.refine(p)


# ---------------------------------------------------------------------------
# Exact decimal export of dyadic endpoints
# ---------------------------------------------------------------------------

_DECIMAL_DIGIT_CAP = 100_000


def _decimal_to_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def dyadic_decimal(f: Fraction) -> str:
    """Exact decimal string of a dyadic rational (denominator a power of 2)."""
    num, den = f.numerator, f.denominator
    k = den.bit_length() - 1
    if den != 1 << k:
        raise ValueError(f"not a dyadic rational: {f}")
    sign = "-" if num < 0 else ""
    num = abs(num)
    if k == 0:
        return f"{sign}{num}"
    if k > _DECIMAL_DIGIT_CAP:
        return f"{sign}{num}*2^-{k}"
    scaled = num * 5 ** k
    digits = str(scaled).rjust(k + 1, "0")
    ipart, fpart = digits[:-k], digits[-k:]
    fpart = fpart.rstrip("0")
    return f"{sign}{ipart}.{fpart}" if fpart else f"{sign}{ipart}"


def endpoint_str(x) -> str:
    """Exact decimal string of an MPFR endpoint (dyadic), or inf markers."""
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    n, d = x.as_integer_ratio()
    return dyadic_decimal(Fraction(int(n), int(d)))
