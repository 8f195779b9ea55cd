"""
Exact arithmetic in F_p and F_{p^2}.

F_{p^2} is modelled as F_p[s]/(s^2 - n) with n the smallest quadratic
non-residue mod p. Scalar operations are pure functions on immutable values;
the ``*_table`` and ``*_grid`` helpers are their vectorised counterparts used
by exhaustive point enumeration.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from sympy import isprime

from .errors import IncompatibleFieldError, InvalidModulusError

MAX_MODULUS = 2 ** 20


def check_modulus(p: int) -> int:
    """Validate an odd prime modulus within the overflow-safe bound."""
    if not isinstance(p, (int, np.integer)) or p == 2 or p < 3 or not isprime(int(p)):
        raise InvalidModulusError(f"modulus must be an odd prime, got {p!r}")
    if p > MAX_MODULUS:
        raise InvalidModulusError(f"modulus {p} exceeds the supported bound 2^20")
    return int(p)


class Fp(BaseModel):
    """Element of F_p."""

    model_config = ConfigDict(frozen=True)

    p: int
    value: int

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, dict) and "p" in data and "value" in data:
            p = check_modulus(data["p"])
            data = {**data, "p": p, "value": int(data["value"]) % p}
        return data

    def __add__(self, other: "Fp") -> "Fp":
        self._same_field(other)
        return Fp(p=self.p, value=self.value + other.value)

    def __mul__(self, other: "Fp") -> "Fp":
        self._same_field(other)
        return Fp(p=self.p, value=self.value * other.value)

    def __neg__(self) -> "Fp":
        return Fp(p=self.p, value=-self.value)

    def __pow__(self, k: int) -> "Fp":
        return Fp(p=self.p, value=pow(self.value, k, self.p))

    def _same_field(self, other: "Fp") -> None:
        if self.p != other.p:
            raise IncompatibleFieldError(f"F_{self.p} and F_{other.p} elements cannot be combined")


class Fp2(BaseModel):
    """Element a + b*s of F_p[s]/(s^2 - n)."""

    model_config = ConfigDict(frozen=True)

    p: int
    n: int
    a: int = 0
    b: int = 0

    @model_validator(mode="before")
    @classmethod
    def _reduce(cls, data):
        if isinstance(data, dict) and "p" in data:
            p = check_modulus(data["p"])
            data = {
                **data,
                "p": p,
                "n": int(data.get("n", find_nonresidue(p))) % p,
                "a": int(data.get("a", 0)) % p,
                "b": int(data.get("b", 0)) % p,
            }
        return data

    @model_validator(mode="after")
    def _check_nonresidue(self) -> "Fp2":
        if legendre(self.n, self.p) != -1:
            raise IncompatibleFieldError(
                f"{self.n} is not a quadratic non-residue mod {self.p}"
            )
        return self

    @classmethod
    def of(cls, p: int, a: int = 0, b: int = 0) -> "Fp2":
        """Element in the canonical model (smallest non-residue)."""
        return cls(p=p, n=find_nonresidue(p), a=a, b=b)

    @property
    def coords(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def frobenius(self) -> "Fp2":
        """x -> x^p, i.e. a + b*s -> a - b*s."""
        return Fp2(p=self.p, n=self.n, a=self.a, b=-self.b)

    def norm(self) -> int:
        """Norm down to F_p."""
        return (self.a * self.a - self.n * self.b * self.b) % self.p

    def __mul__(self, other: "Fp2") -> "Fp2":
        return fp2_mul(self, other)

    def __add__(self, other: "Fp2") -> "Fp2":
        _same_field(self, other)
        return Fp2(p=self.p, n=self.n, a=self.a + other.a, b=self.b + other.b)

    def __pow__(self, k: int) -> "Fp2":
        return fp2_pow(self, k)


def legendre(a: int, p: int) -> int:
    """Euler criterion a^((p-1)/2) mapped to {-1, 0, 1}."""
    p = check_modulus(p)
    r = pow(int(a) % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@lru_cache(maxsize=None)
def find_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod p."""
    p = check_modulus(p)
    n = 2
    while legendre(n, p) != -1:
        n += 1
    return n


def _same_field(x: Fp2, y: Fp2) -> None:
    if x.p != y.p or x.n != y.n:
        raise IncompatibleFieldError(
            f"F_{x.p}[s]/(s^2-{x.n}) and F_{y.p}[s]/(s^2-{y.n}) elements cannot be combined"
        )


def fp2_mul(x: Fp2, y: Fp2) -> Fp2:
    """Product in F_p[s]/(s^2 - n)."""
    _same_field(x, y)
    p, n = x.p, x.n
    return Fp2(
        p=p,
        n=n,
        a=(x.a * y.a + n * x.b * y.b) % p,
        b=(x.a * y.b + x.b * y.a) % p,
    )


def fp2_pow(x: Fp2, k: int) -> Fp2:
    """Square-and-multiply; negative exponents use x^(p^2-1) = 1."""
    if k < 0:
        if x.is_zero():
            raise ZeroDivisionError("zero has no inverse in F_{p^2}")
        k %= x.p * x.p - 1
    result = Fp2(p=x.p, n=x.n, a=1, b=0)
    base = x
    while k:
        if k & 1:
            result = fp2_mul(result, base)
        base = fp2_mul(base, base)
        k >>= 1
    return result


def fp2_is_square(x: Fp2) -> bool:
    """Euler's criterion in F_{p^2}."""
    if x.is_zero():
        return True
    return fp2_pow(x, (x.p * x.p - 1) // 2).coords == (1, 0)


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """chi(v) for v = 0..p-1, built by marking squares (read-only)."""
    p = check_modulus(p)
    xs = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int64)
    chi[(xs * xs) % p] = 1
    chi[0] = 0
    chi.setflags(write=False)
    return chi


def poly_values_mod_p(coefficients: Tuple[int, ...], p: int) -> np.ndarray:
    """f(x) mod p for every x in F_p; coefficients in increasing degree."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(coefficients):
        acc = (acc * xs + int(c) % p) % p
    return acc


def fp2_poly_grid(
    coefficients: Tuple[int, ...], p: int, n: int, b_values: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """f(a + b*s) for every a in F_p and each b in ``b_values``.

    Returns the (len(b_values), p) coordinate arrays of the values.
    """
    a_grid, b_grid = np.meshgrid(
        np.arange(p, dtype=np.int64), np.asarray(b_values, dtype=np.int64)
    )
    nb_grid = (n * b_grid) % p
    acc_a = np.zeros_like(a_grid)
    acc_b = np.zeros_like(a_grid)
    for c in reversed(coefficients):
        # (acc_a + acc_b s)(a + b s) = (acc_a a + n acc_b b) + (acc_a b + acc_b a) s
        new_a = (acc_a * a_grid + acc_b * nb_grid) % p
        new_b = (acc_a * b_grid + acc_b * a_grid) % p
        acc_a = (new_a + int(c) % p) % p
        acc_b = new_b
    return acc_a, acc_b


def fp2_chi_grid(values_a: np.ndarray, values_b: np.ndarray, p: int, n: int) -> np.ndarray:
    """Quadratic character of F_{p^2} through the norm: chi_2(x) = chi(N(x))."""
    norms = (values_a * values_a - ((n * values_b) % p) * values_b) % p
    return legendre_table(p)[norms]
