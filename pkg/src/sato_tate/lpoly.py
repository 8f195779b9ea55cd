"""
Point counting on hyperelliptic models y^2 = f(x) and normalized Frobenius
characteristic polynomials.

Counting is exhaustive over x (vectorised with numpy): O(p) per prime over F_p
and O(p^2) over F_{p^2}. Only rational primes are used.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from math import comb
from typing import List, Optional, Protocol, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import Poly, Symbol, isprime, primerange
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .errors import (
    BadReductionError,
    InconsistencyError,
    InvalidCurveError,
    UnsupportedGenusError,
)
from .ff_arith import (
    check_modulus,
    find_nonresidue,
    fp2_chi_grid,
    fp2_poly_grid,
    legendre,
    legendre_table,
    poly_values_mod_p,
)
from .monitoring import PerformanceMonitor, structured_log

logger = logging.getLogger(__name__)

_X = Symbol("x")
_TRANSFORMATIONS = standard_transformations + (
    convert_xor,
    implicit_multiplication_application,
)
# elements per F_{p^2} block; keeps memory flat for large p
_GRID_BLOCK = 1 << 22
UNIT_CIRCLE_TOL = 1e-9


class CurveSpec(BaseModel):
    """Hyperelliptic model y^2 = f(x), f with integer coefficients in increasing degree."""

    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[int, ...]

    @model_validator(mode="before")
    @classmethod
    def _strip_zeros(cls, data):
        if isinstance(data, dict) and "coefficients" in data:
            coeffs = [int(c) for c in data["coefficients"]]
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            data = {**data, "coefficients": tuple(coeffs)}
        return data

    @model_validator(mode="after")
    def _check_model(self) -> "CurveSpec":
        degree = len(self.coefficients) - 1
        if degree not in range(3, 9):
            raise InvalidCurveError(
                f"deg f must be in 3..8 for genus 1..3, got {degree}"
            )
        if self.discriminant == 0:
            raise InvalidCurveError(f"f is not squarefree: {self.canonical()}")
        return self

    @classmethod
    def parse(cls, text: str) -> "CurveSpec":
        """Parse ``y^2=<polynomial in x>``."""
        compact = "".join(str(text).split())
        lhs, sep, rhs = compact.partition("=")
        if not sep or lhs not in ("y^2", "y**2") or not rhs:
            raise InvalidCurveError(f"expected 'y^2=f(x)', got {text!r}")
        try:
            expr = parse_expr(rhs, local_dict={"x": _X}, transformations=_TRANSFORMATIONS)
            poly = Poly(expr, _X)
        except Exception as e:
            raise InvalidCurveError(f"cannot parse curve {text!r}: {e}") from e
        if poly.free_symbols - {_X}:
            raise InvalidCurveError(f"f must be a polynomial in x only: {text!r}")
        coeffs = list(reversed(poly.all_coeffs()))
        if any(not c.is_integer for c in coeffs):
            raise InvalidCurveError(f"f must have integer coefficients: {text!r}")
        return cls(coefficients=tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    @cached_property
    def discriminant(self) -> int:
        """Discriminant of f."""
        return int(Poly.from_list(list(reversed(self.coefficients)), _X).discriminant())

    def canonical(self) -> str:
        """``y^2=c_d*x^d+...+c_0`` with zero terms omitted."""
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coefficients[d]
            if c == 0:
                continue
            terms.append(f"{c}*x^{d}" if d > 0 else f"{c}")
        return "y^2=" + "+".join(terms).replace("+-", "-")

    def is_bad_prime(self, p: int) -> bool:
        """True if p divides the leading coefficient or the discriminant."""
        return self.discriminant % p == 0 or self.leading % p == 0

    def __str__(self) -> str:
        return self.canonical()


class FrobPoly(BaseModel):
    """Monic characteristic polynomial of Frobenius, coefficients c_0..c_{2g}."""

    model_config = ConfigDict(frozen=True)

    p: int
    g: int = Field(ge=1, le=3)
    coefficients: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_weil(self) -> "FrobPoly":
        g, p, c = self.g, self.p, self.coefficients
        if len(c) != 2 * g + 1 or c[-1] != 1:
            raise InconsistencyError(f"not a monic degree-{2 * g} polynomial: {c}")
        for k in range(g):
            if c[k] != p ** (g - k) * c[2 * g - k]:
                raise InconsistencyError(
                    f"functional equation fails at p={p}: c_{k}={c[k]}, "
                    f"c_{2 * g - k}={c[2 * g - k]}"
                )
        for k in range(2 * g + 1):
            if c[k] * c[k] > comb(2 * g, k) ** 2 * p ** (2 * g - k):
                raise InconsistencyError(f"Weil bound fails at p={p} for c_{k}={c[k]}")
        return self

    @property
    def trace(self) -> int:
        """a_p, the trace of Frobenius."""
        return -self.coefficients[2 * self.g - 1]

    def power_sums(self, kmax: int) -> List[float]:
        """sum alpha_i^k for k = 1..kmax from numerically extracted roots."""
        roots = np.roots(list(reversed(self.coefficients)))
        return [float(np.sum(roots ** k).real) for k in range(1, kmax + 1)]

    def point_counts(self, kmax: int) -> List[int]:
        """N_k = p^k + 1 - sum alpha_i^k, rounded; raises if not near an integer."""
        counts = []
        for k, s in enumerate(self.power_sums(kmax), start=1):
            n = self.p ** k + 1 - s
            if abs(n - round(n)) > 0.01:
                raise InconsistencyError(f"N_{k} = {n} is not integral at p={self.p}")
            counts.append(int(round(n)))
        return counts

    def cache_row(self) -> str:
        return ",".join(str(v) for v in (self.p, *reversed(self.coefficients[:-1])))

    def __str__(self) -> str:
        parts = []
        for k in range(2 * self.g, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if k == 2 * self.g:
                parts.append(mono)
            else:
                coef = "" if abs(c) == 1 and k > 0 else str(abs(c))
                parts.append(("- " if c < 0 else "+ ") + coef + mono)
        return " ".join(parts)


class FrobTrace(BaseModel):
    """Trace-only Frobenius data: c_{2g-1} = -a_p, from N_1 alone."""

    model_config = ConfigDict(frozen=True)

    p: int
    g: int = Field(ge=1, le=3)
    c_top: int

    @model_validator(mode="after")
    def _check_weil(self) -> "FrobTrace":
        if self.c_top * self.c_top > 4 * self.g * self.g * self.p:
            raise InconsistencyError(f"Weil bound fails at p={self.p} for a_p={-self.c_top}")
        return self

    @property
    def trace(self) -> int:
        return -self.c_top

    def cache_row(self) -> str:
        return f"{self.p},{self.c_top}"


FrobData = Union[FrobPoly, FrobTrace]


class NormalizedPoly(BaseModel):
    """Unit-circle normalization; ``a[k-1]`` is the coefficient of T^(2g-k)."""

    model_config = ConfigDict(frozen=True)

    g: int = Field(ge=1, le=3)
    a: Tuple[float, ...]
    p: Optional[int] = None
    trace_only: bool = False

    @model_validator(mode="after")
    def _check_unit_circle(self) -> "NormalizedPoly":
        expected = 1 if self.trace_only else self.g
        if len(self.a) != expected:
            raise InconsistencyError(f"expected {expected} coefficients, got {len(self.a)}")
        if abs(self.a[0]) > 2 * self.g + UNIT_CIRCLE_TOL:
            raise InconsistencyError(f"|a_1| = {abs(self.a[0])} exceeds 2g at p={self.p}")
        if not self.trace_only:
            self.real_traces()
        return self

    @property
    def a1(self) -> float:
        return self.a[0]

    @property
    def a2(self) -> Optional[float]:
        return self.a[1] if len(self.a) > 1 else None

    def full_coefficients(self) -> List[float]:
        """Monic coefficients from T^{2g} down to T^0."""
        if self.trace_only:
            raise UnsupportedGenusError("trace-only data has no full polynomial")
        head = [1.0, *self.a]
        return head + list(reversed(head[:-1]))

    def trace_polynomial(self) -> Polynomial:
        """Q(x) with P(T) = T^g Q(T + 1/T)."""
        x = Polynomial([0.0, 1.0])
        s_prev, s_cur = Polynomial([2.0]), x
        coeffs = [1.0, *self.a]
        q = Polynomial([coeffs[self.g]])
        for j in range(1, self.g + 1):
            q = q + coeffs[self.g - j] * s_cur
            s_prev, s_cur = s_cur, x * s_cur - s_prev
        return q

    def real_traces(self) -> np.ndarray:
        """x_i = 2cos(theta_i) for the g conjugate root pairs; all must lie in [-2, 2]."""
        xs = self.trace_polynomial().roots()
        scale = max(1.0, float(np.max(np.abs(xs))))
        if np.max(np.abs(np.imag(xs))) > 1e-6 * scale:
            raise InconsistencyError(f"roots off the unit circle at p={self.p}: {xs}")
        xs = np.real(xs)
        if np.max(np.abs(xs)) > 2 + UNIT_CIRCLE_TOL:
            raise InconsistencyError(f"roots off the unit circle at p={self.p}: {xs}")
        return np.clip(xs, -2.0, 2.0)

    def roots(self) -> np.ndarray:
        """Roots of the normalized polynomial, all on the unit circle."""
        xs = self.real_traces()
        ys = np.sqrt(4.0 - xs * xs)
        return np.concatenate([(xs + 1j * ys) / 2, (xs - 1j * ys) / 2])


class CoefficientSource(Protocol):
    def get(self, p: int) -> Optional[FrobData]: ...

    def set(self, data: FrobData) -> None: ...


class ApSequence(BaseModel):
    """Ordered normalized data at good odd primes, plus the skipped bad primes."""

    curve: CurveSpec
    bound: int
    entries: List[Tuple[int, NormalizedPoly]] = Field(default_factory=list)
    raw: List[FrobData] = Field(default_factory=list)
    skipped: List[int] = Field(default_factory=list)

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.entries]

    @property
    def polys(self) -> List[NormalizedPoly]:
        return [poly for _, poly in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def _check_good_prime(curve: CurveSpec, p: int) -> int:
    if isinstance(p, (int, np.integer)) and p >= 2 and isprime(int(p)) and curve.is_bad_prime(p):
        raise BadReductionError(f"{curve.canonical()} has bad reduction at p={p}", p=int(p))
    return check_modulus(p)


def _points_at_infinity(curve: CurveSpec, p: int, quadratic: bool = False) -> int:
    if curve.degree % 2 == 1:
        return 1
    if quadratic:
        # every element of F_p is a square in F_{p^2}
        return 2
    return 1 + legendre(curve.leading, p)


def count_points(curve: CurveSpec, p: int) -> int:
    """Projective points of the smooth model over F_p."""
    p = _check_good_prime(curve, p)
    chi = legendre_table(p)
    values = poly_values_mod_p(curve.coefficients, p)
    return p + int(chi[values].sum()) + _points_at_infinity(curve, p)


def count_points_p2(curve: CurveSpec, p: int) -> int:
    """Projective points of the smooth model over F_{p^2}."""
    p = _check_good_prime(curve, p)
    n = find_nonresidue(p)
    rows = max(1, _GRID_BLOCK // p)
    total = p * p
    for start in range(0, p, rows):
        b_values = np.arange(start, min(start + rows, p), dtype=np.int64)
        va, vb = fp2_poly_grid(curve.coefficients, p, n, b_values)
        total += int(fp2_chi_grid(va, vb, p, n).sum())
    return total + _points_at_infinity(curve, p, quadratic=True)


def frob_poly(curve: CurveSpec, p: int) -> FrobPoly:
    """Characteristic polynomial of Frobenius from N_1 (and N_2 for genus 2)."""
    g = curve.genus
    if g == 3:
        raise UnsupportedGenusError(
            "genus 3 needs N_3 over F_{p^3}; use trace_only statistics"
        )
    n1 = count_points(curve, p)
    t1 = p + 1 - n1
    if g == 1:
        return FrobPoly(p=p, g=1, coefficients=(p, -t1, 1))
    n2 = count_points_p2(curve, p)
    t2 = p * p + 1 - n2
    diff = t1 * t1 - t2
    if diff % 2:
        raise InconsistencyError(
            f"parity failure at p={p}: t1^2 - t2 = {diff} is odd (N1={n1}, N2={n2})"
        )
    c3 = -t1
    c2 = diff // 2
    return FrobPoly(p=p, g=2, coefficients=(p * p, p * c3, c2, c3, 1))


def frob_trace(curve: CurveSpec, p: int) -> FrobTrace:
    """Trace of Frobenius only; enough for genus 3 statistics."""
    n1 = count_points(curve, p)
    return FrobTrace(p=p, g=curve.genus, c_top=n1 - p - 1)


def normalize(data: FrobData) -> NormalizedPoly:
    """P(T) -> p^{-g} P(p^{1/2} T); a_k = c_{2g-k} p^{-k/2}."""
    root_p = float(np.sqrt(data.p))
    if isinstance(data, FrobTrace):
        return NormalizedPoly(g=data.g, a=(data.c_top / root_p,), p=data.p, trace_only=True)
    g, c = data.g, data.coefficients
    a = tuple(c[2 * g - k] / root_p ** k for k in range(1, g + 1))
    return NormalizedPoly(g=g, a=a, p=data.p)


def good_primes(curve: CurveSpec, bound: int) -> Tuple[List[int], List[int]]:
    """Odd primes up to ``bound`` split into (good, bad)."""
    good, bad = [], []
    for p in primerange(3, bound + 1):
        (bad if curve.is_bad_prime(p) else good).append(int(p))
    return good, bad


def _compute(curve: CurveSpec, p: int, trace_only: bool, monitor: PerformanceMonitor) -> FrobData:
    with monitor.timed():
        return frob_trace(curve, p) if trace_only else frob_poly(curve, p)


def ap_sequence(
    curve: CurveSpec,
    bound: int,
    trace_only: bool = False,
    workers: int = 1,
    cache: Optional[CoefficientSource] = None,
    monitor: Optional[PerformanceMonitor] = None,
) -> ApSequence:
    """Normalized Frobenius data at every good odd prime p <= bound, in increasing order."""
    if curve.genus == 3 and not trace_only:
        raise UnsupportedGenusError("genus 3 sequences require trace_only=True")
    monitor = monitor or PerformanceMonitor()
    good, bad = good_primes(curve, bound)
    for _ in bad:
        monitor.record_skip()

    known = {}
    if cache is not None:
        for p in good:
            hit = cache.get(p)
            if hit is not None and isinstance(hit, FrobTrace) == trace_only:
                known[p] = hit
                monitor.record_cache_hit()
    missing = [p for p in good if p not in known]

    if workers > 1 and len(missing) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            computed = list(pool.map(lambda p: _compute(curve, p, trace_only, monitor), missing))
    else:
        computed = [_compute(curve, p, trace_only, monitor) for p in missing]

    for data in computed:
        known[data.p] = data
        if cache is not None:
            cache.set(data)

    raw = [known[p] for p in good]
    structured_log(
        "INFO",
        "frobenius data assembled",
        curve=curve.canonical(),
        bound=bound,
        good=len(good),
        skipped=len(bad),
        computed=len(missing),
    )
    return ApSequence(
        curve=curve,
        bound=bound,
        entries=[(d.p, normalize(d)) for d in raw],
        raw=raw,
        skipped=bad,
    )


def parse_cache_row(row: str, g: int) -> FrobData:
    """Inverse of ``cache_row``: ``p,c_{2g-1},...,c_0`` or ``p,c_{2g-1}``."""
    try:
        values = [int(v) for v in row.strip().split(",")]
    except ValueError as e:
        raise InconsistencyError(f"malformed cache row {row!r}") from e
    p, rest = values[0], values[1:]
    if len(rest) == 1 and g > 1:
        return FrobTrace(p=p, g=g, c_top=rest[0])
    if len(rest) != 2 * g:
        raise InconsistencyError(f"cache row {row!r} does not match genus {g}")
    return FrobPoly(p=p, g=g, coefficients=(*reversed(rest), 1))

