"""Euclidean geometry relative to the line spanned by (1, theta_1, ..., theta_n).

For an integer point x the two distances of interest are

    h(x) = |x_0 + theta_1 x_1 + ... + theta_n x_n| / sqrt(1 + sum theta_i^2)

(distance to the hyperplane orthogonal to the line, i.e. the length of the
projection onto the line) and

    r(x) = sqrt(||x||^2 - h(x)^2)

(distance to the line itself).  Everything here is certified: h comes from
the exact integer linear form evaluated over certified theta, and r goes
through Pythagoras with a clamped square root so the enclosure stays sound
even when x lies on the line.

Rational subspaces are handled with exact integer linear algebra: Hermite
reduction, saturation via a double orthogonal kernel, Gram determinants for
heights, and adjugate-based normal equations for the angle tangent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import DependentInput, WrongDimension
from .scalar import (
    DEFAULT_PRECISION,
    INFINITE,
    CertifiedScalar,
    certified_sign,
)
from .thetaspec import ThetaSpec


@dataclass(frozen=True)
class IntegerVector:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def norm_sq(self) -> int:
        return sum(c * c for c in self.coords)

    def dot(self, other) -> int:
        oc = other.coords if isinstance(other, IntegerVector) else tuple(other)
        return sum(a * b for a, b in zip(self.coords, oc))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __neg__(self):
        return IntegerVector(tuple(-c for c in self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def to_json(self):
        return list(self.coords)


class LineFrame:
    """The line through (1, theta_1, ..., theta_n) with shared certified
    theta leaves, so that identical subexpressions are recognized by the
    comparison machinery."""

    def __init__(self, spec: ThetaSpec, precision_bits: int = DEFAULT_PRECISION):
        self.spec = spec
        self.precision_bits = precision_bits
        self.n = spec.n
        self.dim = spec.n + 1
        self.theta = spec.scalars(precision_bits)
        norm_sq = CertifiedScalar.from_int(1, precision_bits)
        for t in self.theta:
            norm_sq = norm_sq + t * t
        self.direction_norm_sq = norm_sq
        self.direction_norm = norm_sq.sqrt()
        # projection cache: the same integer point always maps to the same
        # expression nodes, so boundary points compare as proven-equal
        self._proj_cache: dict = {}

    @property
    def all_exact(self) -> bool:
        return self.spec.all_exact

    def linear_form(self, x: IntegerVector) -> CertifiedScalar:
        """x_0 + sum theta_i x_i as a certified scalar (zero coefficients
        skipped so exact zeros stay exact)."""
        acc = CertifiedScalar.from_int(x[0], self.precision_bits)
        for t, c in zip(self.theta, x.coords[1:]):
            if c:
                acc = acc + t * c
        return acc

    def float_mirror(self) -> "FloatFrame":
        return FloatFrame(self)


class FloatFrame:
    """Float approximations of theta with rigorous error bounds, used only
    to prefilter enumeration candidates.  Every decision made from these
    floats is re-established in certified arithmetic; the only property the
    prefilter needs is that its margin dominates |float - true|, which the
    stored per-component bounds guarantee with large headroom."""

    def __init__(self, frame: LineFrame):
        self.n = frame.n
        theta, err = [], []
        for t in frame.theta:
            ref = t.refine(64)
            tf = float(ref.lower)
            # |tf - true| <= |hi - lo| + conversion slack
            e = abs(float(ref.upper) - float(ref.lower)) * 2.0 \
                + abs(tf) * 2.0 ** -50 + 2.0 ** -300
            theta.append(tf)
            err.append(e)
        self.theta = theta
        self.theta_err = err
        self.norm = (1.0 + sum(t * t for t in theta)) ** 0.5


class InnerVerdict(enum.Enum):
    STRICTLY_BETWEEN_0_AND_1 = "STRICTLY_BETWEEN_0_AND_1"
    OUTSIDE = "OUTSIDE"
    UNDECIDED = "UNDECIDED"


def project(frame: LineFrame, x: IntegerVector, precision_bits: int | None = None):
    """Certified (r, h) distances of an integer point.  r is computed via
    Pythagoras from the exact squared norm; its square root is clamped at
    zero, which is sound because the true difference is nonnegative."""
    if x.dim != frame.dim:
        raise WrongDimension(
            f"vector has dimension {x.dim}, frame expects {frame.dim}")
    p = precision_bits or frame.precision_bits
    cached = frame._proj_cache.get(x.coords)
    if cached is None:
        h = (frame.linear_form(x).abs()) / frame.direction_norm
        r = (CertifiedScalar.from_int(x.norm_sq(), p) - h * h).sqrt_clamped()
        cached = (r, h)
        frame._proj_cache[x.coords] = cached
    r, h = cached
    return r.refine(p), h.refine(p)


def inner_certificate(v: IntegerVector, x, precision_bits: int | None = None
                      ) -> InnerVerdict:
    """Certify 0 < <v, x> < 1 for a rational point x (exact arithmetic)."""
    s = sum(Fraction(c) * Fraction(xi) for c, xi in zip(v.coords, x))
    if 0 < s < 1:
        return InnerVerdict.STRICTLY_BETWEEN_0_AND_1
    return InnerVerdict.OUTSIDE


# ---------------------------------------------------------------------------
# Exact integer linear algebra
# ---------------------------------------------------------------------------

def row_hnf(rows):
    """Canonical row Hermite normal form (positive pivots, entries above a
    pivot reduced into [0, pivot)).  Zero rows are dropped, so the result is
    a canonical basis of the integer row lattice."""
    mat = [list(r) for r in rows]
    mat = [r for r in mat if any(r)]
    if not mat:
        return []
    m = len(mat[0])
    pivot_row = 0
    for col in range(m):
        if pivot_row >= len(mat):
            break
        while True:
            nz = [i for i in range(pivot_row, len(mat)) if mat[i][col] != 0]
            if len(nz) <= 1:
                break
            i_min = min(nz, key=lambda i: (abs(mat[i][col]), i))
            for i in nz:
                if i == i_min:
                    continue
                q = mat[i][col] // mat[i_min][col]
                if q:
                    mat[i] = [a - q * b for a, b in zip(mat[i], mat[i_min])]
        nz = [i for i in range(pivot_row, len(mat)) if mat[i][col] != 0]
        if not nz:
            continue
        i0 = nz[0]
        mat[pivot_row], mat[i0] = mat[i0], mat[pivot_row]
        if mat[pivot_row][col] < 0:
            mat[pivot_row] = [-a for a in mat[pivot_row]]
        p = mat[pivot_row][col]
        for i in range(pivot_row):
            q = mat[i][col] // p
            if q:
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[pivot_row])]
        pivot_row += 1
    return [r for r in mat[:pivot_row] if any(r)]


def orthogonal_kernel(vectors, m: int):
    """Canonical basis of {x in Z^m : <x, v> = 0 for every v in vectors}."""
    k = len(vectors)
    if k == 0:
        return [[1 if j == i else 0 for j in range(m)] for i in range(m)]
    rows = []
    for i in range(m):
        rows.append([v[i] for v in vectors] + [1 if j == i else 0 for j in range(m)])
    reduced = row_hnf(rows)
    out = [r[k:] for r in reduced if all(c == 0 for c in r[:k])]
    return row_hnf(out)


def integer_rank(rows) -> int:
    return len(row_hnf(rows))


def gram_matrix(rows):
    return [[sum(a * b for a, b in zip(r1, r2)) for r2 in rows] for r1 in rows]


def int_det(mat) -> int:
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    n = len(mat)
    if n == 0:
        return 1
    m = [row[:] for row in mat]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def adjugate(mat):
    """Adjugate of an integer matrix: det * inverse, exact integers."""
    n = len(mat)
    d = int_det(mat)
    if n == 1:
        return [[1]]
    inv = _fraction_inverse(mat)
    adj = [[inv[i][j] * d for j in range(n)] for i in range(n)]
    out = []
    for row in adj:
        out.append([int(v) if v.denominator == 1 else _bad_adj(v) for v in row])
    return out


def _bad_adj(v):
    raise ArithmeticError(f"adjugate entry not integral: {v}")


def _fraction_inverse(mat):
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] +
         [Fraction(1 if j == i else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        f = a[col][col]
        a[col] = [v / f for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                g = a[i][col]
                a[i] = [v - g * w for v, w in zip(a[i], a[col])]
    return [row[n:] for row in a]


def lattice_contains(basis_rows, vector) -> bool:
    """Whether `vector` lies in the integer row lattice of `basis_rows`
    (basis assumed HNF-reduced; used by saturation sanity checks and tests)."""
    v = list(vector)
    for row in basis_rows:
        lead = next((j for j, c in enumerate(row) if c != 0), None)
        if lead is None:
            continue
        if v[lead] % row[lead] == 0:
            q = v[lead] // row[lead]
            v = [a - q * b for a, b in zip(v, row)]
    return all(c == 0 for c in v)


# ---------------------------------------------------------------------------
# Rational subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalSubspace:
    spanning: tuple
    saturated_basis: tuple
    dim: int

    @property
    def ambient_dim(self) -> int:
        return self.saturated_basis[0].dim

    def basis_rows(self):
        return [list(b.coords) for b in self.saturated_basis]

    def to_json(self):
        return {"dim": self.dim, "basis": [b.to_json() for b in self.saturated_basis]}


def saturate(spanning) -> RationalSubspace:
    """Saturated basis of span(spanning) intersected with the integer
    lattice, via a double orthogonal kernel; the result rows are the
    canonical Hermite basis of the saturation."""
    spanning = [v if isinstance(v, IntegerVector) else IntegerVector(tuple(v))
                for v in spanning]
    if not spanning:
        raise DependentInput("empty spanning set")
    m = spanning[0].dim
    rows = [list(v.coords) for v in spanning]
    if integer_rank(rows) != len(rows):
        raise DependentInput("spanning vectors are linearly dependent")
    complement = orthogonal_kernel(rows, m)
    basis = orthogonal_kernel(complement, m)
    if len(basis) != len(rows):
        raise DependentInput("saturation rank mismatch")
    return RationalSubspace(tuple(spanning),
                            tuple(IntegerVector(tuple(r)) for r in basis),
                            len(rows))


def height(L: RationalSubspace) -> CertifiedScalar:
    """H(L): covolume of the saturated lattice, sqrt of the exact Gram
    determinant (exact when the determinant is a perfect square)."""
    det = int_det(gram_matrix(L.basis_rows()))
    return CertifiedScalar.sqrt_rational(det)


def angle_tangent(frame: LineFrame, L: RationalSubspace,
                  precision_bits: int | None = None):
    """tan of the angle between the theta line and L, via the certified
    normal equations; INFINITE when the line is certified orthogonal to L."""
    p = precision_bits or frame.precision_bits
    if L.dim == frame.dim:
        return CertifiedScalar.from_int(0, p)
    rows = L.basis_rows()
    G = gram_matrix(rows)
    detG = int_det(G)
    adj = adjugate(G)

    # <b_i, e> over e = (1, theta_1, ..., theta_n)
    be = []
    for row in rows:
        acc = CertifiedScalar.from_int(row[0], p)
        for t, c in zip(frame.theta, row[1:]):
            if c:
                acc = acc + t * c
        be.append(acc)

    # N = be^T adj(G) be = detG * ||proj_L e||^2
    N = CertifiedScalar.from_int(0, p)
    d = len(rows)
    for i in range(d):
        for j in range(d):
            if adj[i][j]:
                N = N + adj[i][j] * (be[i] * be[j])

    sign = certified_sign(N, max_precision=max(1024, 8 * p))
    if sign == 0:
        return INFINITE
    if sign is None:
        # exact-rational frames decide this exactly; for irrational frames a
        # true zero would be a rational dependence, so refinement resolves it
        from .errors import PrecisionExhausted
        raise PrecisionExhausted("cannot separate the projection norm from zero",
                                 detail=N)
    ratio = (detG * frame.direction_norm_sq) / N - 1
    return ratio.sqrt_clamped().refine(p)


def integer_normal(L: RationalSubspace) -> IntegerVector:
    """The primitive integer normal of a hyperplane subspace (dim = n),
    sign-normalized so its first nonzero coordinate is positive."""
    m = L.ambient_dim
    if L.dim != m - 1:
        raise WrongDimension(f"integer normal needs dim {m - 1}, got {L.dim}")
    kernel = orthogonal_kernel(L.basis_rows(), m)
    if len(kernel) != 1:
        raise WrongDimension("normal space is not one-dimensional")
    w = kernel[0]
    lead = next(c for c in w if c != 0)
    if lead < 0:
        w = [-c for c in w]
    return IntegerVector(tuple(w))
