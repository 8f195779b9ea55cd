"""
Twisted decomposable Lefschetz groups from endomorphism data.

The endomorphism algebra D is presented as rational 2g x 2g matrices acting on
V = Q^{2g}, together with the polarization form J and the Galois action on D.
Every computation here is exact: linear systems are solved by fraction-free
elimination over ZZ and no floating point is involved.

Unknown matrices X are flattened row-major, entry X[i][j] at index i*n + j.
"""

import logging
from functools import reduce
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import ImmutableMatrix, Rational, SympifyError, eye, ilcm, zeros
from sympy.matrices import MatrixBase
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from .catalog import LIE_DIMS, ComponentTag, lookup
from .errors import (
    InconsistencyError,
    InvalidEndoDataError,
    InvalidGaloisError,
)
from .groups import FiniteGroup, direct_product, generated_closure, trivial_group, word_for_elements
from .monitoring import structured_log

logger = logging.getLogger(__name__)

Row = List[Any]
MatrixLike = Union[ImmutableMatrix, Sequence[Sequence[Any]]]


def rational_matrix(value: MatrixLike) -> ImmutableMatrix:
    """Coerce nested rows of ints, strings ("a/b") or Rationals to a rational matrix."""
    if isinstance(value, MatrixBase):
        return ImmutableMatrix(value).applyfunc(Rational)
    rows = [[Rational(x) for x in row] for row in value]
    if not rows or any(len(row) != len(rows[0]) for row in rows):
        raise InvalidEndoDataError("matrix rows are empty or ragged")
    return ImmutableMatrix(rows)


# ---------------------------------------------------------------------------
# Exact linear algebra
# ---------------------------------------------------------------------------


def _integer_matrix(rows: Sequence[Row], ncols: int) -> DomainMatrix:
    integer_rows = []
    for row in rows:
        entries = [Rational(x) for x in row]
        scale = reduce(ilcm, (x.q for x in entries), 1)
        integer_rows.append([ZZ(int(x * scale)) for x in entries])
    return DomainMatrix(integer_rows, (len(integer_rows), ncols), ZZ)


def _echelon(rows: Sequence[Row], ncols: int) -> Tuple[Any, Rational, Tuple[int, ...]]:
    """Reduced echelon form with common denominator, via fraction-free elimination."""
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return None, Rational(1), ()
    reduced, den, pivots = _integer_matrix(rows, ncols).rref_den()
    return reduced.to_Matrix(), Rational(int(den)), tuple(pivots)


def exact_rank(rows: Sequence[Row], ncols: int) -> int:
    """Rank of a rational row system."""
    return len(_echelon(rows, ncols)[2])


def exact_nullspace(rows: Sequence[Row], ncols: int) -> List[Tuple[Rational, ...]]:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    reduced, den, pivots = _echelon(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [Rational(0)] * ncols
        vector[free] = Rational(1)
        for r, col in enumerate(pivots):
            vector[col] = -reduced[r, free] / den
        basis.append(tuple(vector))
    return basis


def _coordinates(
    basis: Sequence[ImmutableMatrix], targets: Sequence[ImmutableMatrix]
) -> List[Tuple[Rational, ...]]:
    """Coordinates of each target in the basis; raises if dependent or outside the span."""
    m = len(basis)
    size = basis[0].rows * basis[0].cols
    rows = [[b[e] for b in basis] + [t[e] for t in targets] for e in range(size)]
    reduced, den, pivots = _echelon(rows, m + len(targets))
    if pivots[:m] != tuple(range(m)):
        raise InvalidEndoDataError("basis matrices are linearly dependent")
    if len(pivots) > m:
        raise InvalidEndoDataError("matrix product leaves the span of the basis")
    return [
        tuple(reduced[i, m + t] / den for i in range(m)) for t in range(len(targets))
    ]


def _commutation_rows(beta: ImmutableMatrix, target: ImmutableMatrix) -> List[Row]:
    """Rows of X*beta - target*X = 0."""
    n = beta.rows
    rows = []
    for r in range(n):
        for c in range(n):
            row: Row = [0] * (n * n)
            for j in range(n):
                row[r * n + j] += beta[j, c]
            for i in range(n):
                row[i * n + c] -= target[r, i]
            rows.append(row)
    return rows


def _symplectic_lie_rows(J: ImmutableMatrix) -> List[Row]:
    """Rows of X^T J + J X = 0; the left side is antisymmetric so r < c suffices."""
    n = J.rows
    rows = []
    for r in range(n):
        for c in range(r + 1, n):
            row: Row = [0] * (n * n)
            for k in range(n):
                row[k * n + r] += J[k, c]
                row[k * n + c] += J[r, k]
            rows.append(row)
    return rows


def _unflatten(vector: Sequence[Rational], n: int) -> ImmutableMatrix:
    return ImmutableMatrix(n, n, list(vector))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


class AlbertDescriptor(BaseModel):
    """Albert type of the simple factor: center E with [E:Q] = e and [D:E] = d^2."""

    model_config = ConfigDict(frozen=True)

    albert_type: Literal["I", "II", "III", "IV", "CM"]
    e: int
    d: int
    g: int
    absolutely_simple: bool = True

    @model_validator(mode="after")
    def _check_degrees(self) -> "AlbertDescriptor":
        if min(self.e, self.d, self.g) < 1:
            raise InvalidEndoDataError("albert degrees must be positive")
        if (2 * self.g) % (self.e * self.d * self.d):
            raise InvalidEndoDataError(
                f"e*d^2 = {self.e * self.d * self.d} does not divide 2g = {2 * self.g}"
            )
        if self.albert_type == "I" and self.d != 1:
            raise InvalidEndoDataError("type I needs d = 1")
        if self.albert_type in ("II", "III") and self.d != 2:
            raise InvalidEndoDataError(f"type {self.albert_type} needs d = 2")
        if self.albert_type == "CM" and self.e * self.d != 2 * self.g:
            raise InvalidEndoDataError("CM needs a commutative subalgebra of dimension 2g")
        return self

    @property
    def odd_ratio(self) -> bool:
        de = self.d * self.e
        return self.g % de == 0 and (self.g // de) % 2 == 1


class EndoData(BaseModel):
    """
    Endomorphism data: basis of D (identity first), form J and Galois action.

    ``rho[tau]`` is the m x m matrix of rho_e(tau) in the basis; column i holds
    the coordinates of the image of ``basis[i]``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    g: int
    basis: Tuple[ImmutableMatrix, ...]
    J: ImmutableMatrix
    galois: FiniteGroup = trivial_group()
    rho: Tuple[ImmutableMatrix, ...] = ()
    name: str = ""

    @model_validator(mode="before")
    @classmethod
    def _coerce_matrices(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if not data.get("basis"):
            raise InvalidEndoDataError("basis is empty")
        data["basis"] = tuple(rational_matrix(b) for b in data.get("basis", ()))
        if "J" in data:
            data["J"] = rational_matrix(data["J"])
        rho = data.get("rho") or ()
        if not rho:
            galois = data.get("galois")
            order = galois.order if isinstance(galois, FiniteGroup) else 1
            if order != 1:
                raise InvalidGaloisError("a nontrivial galois table needs rho matrices")
            rho = (eye(len(data["basis"])),)
        data["rho"] = tuple(rational_matrix(r) for r in rho)
        return data

    @model_validator(mode="after")
    def _check_structure(self) -> "EndoData":
        n = 2 * self.g
        if self.g < 1:
            raise InvalidEndoDataError(f"dimension must be positive, got {self.g}")
        if self.J.shape != (n, n):
            raise InvalidEndoDataError(f"J must be {n}x{n}")
        if self.J.T != -self.J:
            raise InvalidEndoDataError("J is not antisymmetric")
        if self.J.det() == 0:
            raise InvalidEndoDataError("J is degenerate")
        if not self.basis:
            raise InvalidEndoDataError("basis is empty")
        if any(b.shape != (n, n) for b in self.basis):
            raise InvalidEndoDataError(f"basis matrices must be {n}x{n}")
        if self.basis[0] != eye(n):
            raise InvalidEndoDataError("first basis matrix must be the identity")

        products = [bi * bj for bi in self.basis for bj in self.basis]
        structure = _coordinates(self.basis, products)
        self._check_galois(structure)
        return self

    def _check_galois(self, structure: List[Tuple[Rational, ...]]) -> None:
        m = self.m
        group = self.galois
        if len(self.rho) != group.order:
            raise InvalidGaloisError(
                f"expected {group.order} rho matrices, got {len(self.rho)}"
            )
        if any(r.shape != (m, m) for r in self.rho):
            raise InvalidGaloisError(f"rho matrices must be {m}x{m}")
        if self.rho[group.identity] != eye(m):
            raise InvalidGaloisError("rho(identity) is not the identity")
        for a in group.elements:
            for b in group.elements:
                if self.rho[group.mul(a, b)] != self.rho[a] * self.rho[b]:
                    raise InvalidGaloisError(f"rho fails the homomorphism law at ({a}, {b})")
        for tau in group.elements:
            images = [self._combine(self.rho[tau][:, i]) for i in range(m)]
            for i in range(m):
                for j in range(m):
                    coords = self.rho[tau] * ImmutableMatrix(structure[i * m + j])
                    if images[i] * images[j] != self._combine(coords):
                        raise InvalidGaloisError(
                            f"rho({tau}) is not multiplicative on basis pair ({i}, {j})"
                        )

    def _combine(self, coords: Any) -> ImmutableMatrix:
        total = zeros(self.n, self.n)
        for c, b in zip(coords, self.basis):
            if c != 0:
                total += c * b
        return ImmutableMatrix(total)

    @property
    def n(self) -> int:
        return 2 * self.g

    @property
    def m(self) -> int:
        return len(self.basis)

    def coordinates(self, X: ImmutableMatrix) -> Tuple[Rational, ...]:
        """Coordinates of X in the basis of D."""
        return _coordinates(self.basis, [X])[0]

    def apply_rho(self, tau: int, X: ImmutableMatrix) -> ImmutableMatrix:
        """rho_e(tau) applied to an element of D."""
        self.galois.check(tau)
        coords = ImmutableMatrix(self.coordinates(X))
        return self._combine(self.rho[tau] * coords)

    def galois_kernel(self) -> List[int]:
        """Elements acting trivially on D."""
        m = self.m
        return [t for t in self.galois.elements if self.rho[t] == eye(m)]

    def effective_galois(self) -> FiniteGroup:
        """Gal(L_e/K): the Galois table modulo the kernel of rho_e."""
        kernel = self.galois_kernel()
        if len(kernel) == 1:
            return self.galois
        return self.galois.quotient(kernel)[0]


Theorem = Literal["CM", "AlbertOdd", "DimLe3", "ConditionsChecked", "Unverified"]


class GroupIdentification(BaseModel):
    model_config = ConfigDict(frozen=True)

    identity_component_id: ComponentTag
    g: int
    lie_dim: int
    center_dim: int
    component_group: FiniteGroup
    galois_order: int
    applicable_theorem: Theorem
    witnessed_cosets: Optional[Tuple[int, ...]] = None

    @model_validator(mode="after")
    def _check_dimensions(self) -> "GroupIdentification":
        if LIE_DIMS[self.identity_component_id] != self.lie_dim:
            raise InconsistencyError(
                f"lie_dim {self.lie_dim} does not match {self.identity_component_id.value}"
            )
        if self.verified and self.component_group.order != self.galois_order:
            raise InconsistencyError(
                f"component group order {self.component_group.order} "
                f"differs from |Gal(L_e/K)| = {self.galois_order}"
            )
        return self

    @property
    def verified(self) -> bool:
        return self.applicable_theorem != "Unverified"

    def summary(self) -> str:
        flag = "" if self.verified else " (unverified)"
        return (
            f"component={self.identity_component_id.value} lie_dim={self.lie_dim} "
            f"pi0_order={self.component_group.order} theorem={self.applicable_theorem}{flag}"
        )


class TwistedCosetSystem(BaseModel):
    """Linear constraints g*beta_i = rho(tau)(beta_i)*g on the entries of g."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau: int
    n: int
    rows: Tuple[Tuple[Any, ...], ...]
    J: ImmutableMatrix

    def solution_basis(self) -> List[ImmutableMatrix]:
        """Basis of all (not necessarily invertible) solutions."""
        return [
            _unflatten(v, self.n) for v in exact_nullspace(self.rows, self.n * self.n)
        ]

    @property
    def dimension(self) -> int:
        return self.n * self.n - exact_rank(self.rows, self.n * self.n)

    def is_solution(self, g: MatrixLike) -> bool:
        """True if g satisfies every linear constraint."""
        flat = list(rational_matrix(g))
        return all(sum(a * x for a, x in zip(row, flat)) == 0 for row in self.rows)

    def multiplier(self, g: MatrixLike) -> Optional[Rational]:
        """lambda with g^T J g = lambda J, or None if g is not an invertible similitude."""
        g = rational_matrix(g)
        if g.det() == 0:
            return None
        form = g.T * self.J * g
        r, c = next((r, c) for r in range(self.n) for c in range(self.n) if self.J[r, c] != 0)
        lam = form[r, c] / self.J[r, c]
        if lam == 0 or form != lam * self.J:
            return None
        return lam

    def is_symplectic_solution(self, g: MatrixLike) -> bool:
        """A solution with multiplier exactly 1."""
        return self.is_solution(g) and self.multiplier(g) == 1


class CosetWitness(BaseModel):
    """Rational similitude g in the tau-coset; g / sqrt(multiplier) is symplectic over C."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau: int
    matrix: ImmutableMatrix
    multiplier: Rational


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _centralizer_rows(data: EndoData) -> List[Row]:
    rows = _symplectic_lie_rows(data.J)
    for beta in data.basis[1:]:
        rows.extend(_commutation_rows(beta, beta))
    return rows


def centralizer_basis(data: EndoData) -> List[ImmutableMatrix]:
    """Exact basis of Lie(L(A)) = {X in sp(J) commuting with D}."""
    return [_unflatten(v, data.n) for v in exact_nullspace(_centralizer_rows(data), data.n ** 2)]


def centralizer_lie_dim(data: EndoData) -> int:
    """Dimension of Lie(L(A)) over Q."""
    return data.n ** 2 - exact_rank(_centralizer_rows(data), data.n ** 2)


def center_dim(data: EndoData) -> int:
    """Dimension of the center of the centralizer Lie algebra."""
    basis = centralizer_basis(data)
    d = len(basis)
    if d <= 1:
        return d
    brackets = [[x * y - y * x for x in basis] for y in basis]
    rows = []
    for per_y in brackets:
        for e in range(data.n ** 2):
            rows.append([per_y[k][e] for k in range(d)])
    return d - exact_rank(rows, d)


def twisted_coset_constraints(data: EndoData, tau: int) -> TwistedCosetSystem:
    """Linear system whose invertible solutions with multiplier 1 form the tau-coset."""
    data.galois.check(tau)
    rows = []
    for beta in data.basis[1:]:
        rows.extend(_commutation_rows(beta, data.apply_rho(tau, beta)))
    rows = [tuple(row) for row in rows if any(x != 0 for x in row)]
    return TwistedCosetSystem(tau=tau, n=data.n, rows=tuple(rows), J=data.J)


def find_coset_witness(
    data: EndoData, tau: int, max_candidates: int = 256
) -> Optional[CosetWitness]:
    """Search small integer combinations of the solution basis for a similitude."""
    system = twisted_coset_constraints(data, tau)
    basis = system.solution_basis()
    d = len(basis)
    if d == 0:
        return None
    if d <= 4:
        vectors = sorted(
            (v for v in product(range(-2, 3), repeat=d) if any(v)),
            key=lambda v: (sum(abs(x) for x in v), v),
        )
    else:
        vectors = [tuple(int(i == k) for i in range(d)) for k in range(d)]
        vectors += [
            tuple(int(i == a) + s * int(i == b) for i in range(d))
            for a in range(d) for b in range(a + 1, d) for s in (1, -1)
        ]
    for coeffs in vectors[:max_candidates]:
        g = ImmutableMatrix(sum((c * b for c, b in zip(coeffs, basis) if c), zeros(data.n, data.n)))
        lam = system.multiplier(g)
        if lam is not None:
            return CosetWitness(tau=tau, matrix=g, multiplier=lam)
    return None


def _theorem_for(data: EndoData, albert: AlbertDescriptor) -> Theorem:
    if albert.albert_type == "CM":
        return "CM"
    if data.g <= 3:
        return "DimLe3"
    if albert.albert_type in ("I", "II", "III") and albert.absolutely_simple and albert.odd_ratio:
        return "AlbertOdd"
    return "Unverified"


def classify(
    data: EndoData, albert: AlbertDescriptor, witnesses: bool = False
) -> GroupIdentification:
    """Identity component from the catalog plus component group Gal(L_e/K)."""
    if data.g % albert.g:
        raise InvalidEndoDataError(
            f"albert descriptor for g={albert.g} does not fit data of g={data.g}"
        )
    lie_dim = centralizer_lie_dim(data)
    centre = center_dim(data)
    tag = lookup(data.g, lie_dim, centre)
    if (
        albert.albert_type == "CM"
        and albert.absolutely_simple
        and albert.g == data.g
        and data.g <= 3
        and lie_dim != data.g
    ):
        raise InconsistencyError(
            f"CM data of dimension {data.g} must have a {data.g}-dimensional torus, "
            f"got lie_dim {lie_dim}"
        )

    theorem = _theorem_for(data, albert)
    component_group = data.effective_galois()
    witnessed = None
    if witnesses:
        witnessed = tuple(
            tau for tau in data.galois.elements if find_coset_witness(data, tau) is not None
        )

    identification = GroupIdentification(
        identity_component_id=tag,
        g=data.g,
        lie_dim=lie_dim,
        center_dim=centre,
        component_group=component_group,
        galois_order=data.galois.order // len(data.galois_kernel()),
        applicable_theorem=theorem,
        witnessed_cosets=witnessed,
    )
    structured_log(
        "INFO" if identification.verified else "WARNING",
        "group identified",
        data=data.name,
        component=tag.value,
        lie_dim=lie_dim,
        center_dim=centre,
        pi0_order=component_group.order,
        theorem=theorem,
    )
    return identification


def base_change(data: EndoData, subgroup: Sequence[int]) -> EndoData:
    """Restrict the Galois action to a subgroup (the fixed field L of that subgroup)."""
    if set(subgroup) == set(data.galois.elements):
        return data
    group, members = data.galois.subgroup(subgroup)
    return EndoData(
        g=data.g,
        basis=data.basis,
        J=data.J,
        galois=group,
        rho=tuple(data.rho[a] for a in members),
        name=f"{data.name}|L",
    )


def _assemble(
    g: int,
    J: ImmutableMatrix,
    basis: List[ImmutableMatrix],
    galois: FiniteGroup,
    image: Callable[[int, ImmutableMatrix], ImmutableMatrix],
    name: str,
) -> EndoData:
    m = len(basis)
    rho = []
    for tau in galois.elements:
        coords = _coordinates(basis, [image(tau, b) for b in basis])
        rho.append(ImmutableMatrix(m, m, lambda i, j: coords[j][i]))
    return EndoData(g=g, basis=tuple(basis), J=J, galois=galois, rho=tuple(rho), name=name)


def _block_diagonal(blocks: Sequence[ImmutableMatrix]) -> ImmutableMatrix:
    size = sum(b.rows for b in blocks)
    out = zeros(size, size)
    offset = 0
    for b in blocks:
        out[offset:offset + b.rows, offset:offset + b.rows] = b
        offset += b.rows
    return ImmutableMatrix(out)


def product_power(data: EndoData, s: int) -> EndoData:
    """Data of A^s: D(A^s) = M_s(D) acting on V^s, form J^(+s), Galois entrywise."""
    if s < 1:
        raise InvalidEndoDataError(f"power must be at least 1, got {s}")
    if s == 1:
        return data
    n, size = data.n, s * data.n

    def block(a: int, b: int, X: ImmutableMatrix) -> ImmutableMatrix:
        out = zeros(size, size)
        out[a * n:(a + 1) * n, b * n:(b + 1) * n] = X
        return ImmutableMatrix(out)

    basis = [ImmutableMatrix(eye(size))]
    for a in range(s):
        for b in range(s):
            for k, beta in enumerate(data.basis):
                if (a, b, k) != (0, 0, 0):
                    basis.append(block(a, b, beta))

    def image(tau: int, M: ImmutableMatrix) -> ImmutableMatrix:
        out = zeros(size, size)
        for a in range(s):
            for b in range(s):
                sub = ImmutableMatrix(M[a * n:(a + 1) * n, b * n:(b + 1) * n])
                if any(x != 0 for x in sub):
                    out[a * n:(a + 1) * n, b * n:(b + 1) * n] = data.apply_rho(tau, sub)
        return ImmutableMatrix(out)

    return _assemble(
        g=s * data.g,
        J=_block_diagonal([data.J] * s),
        basis=basis,
        galois=data.galois,
        image=image,
        name=f"{data.name}^{s}",
    )


def direct_sum(
    a: EndoData,
    b: EndoData,
    joint_galois: Optional[FiniteGroup] = None,
    to_a: Optional[Sequence[int]] = None,
    to_b: Optional[Sequence[int]] = None,
) -> EndoData:
    """
    Data of A x B with Hom(A, B) = 0: only diagonal blocks enter D.

    Without an explicit joint table the direct product of both tables is used,
    element (x, y) at index x * |b| + y.
    """
    if joint_galois is None:
        joint_galois = direct_product(a.galois, b.galois)
        to_a = [i // b.galois.order for i in joint_galois.elements]
        to_b = [i % b.galois.order for i in joint_galois.elements]
    if to_a is None or to_b is None:
        raise InvalidGaloisError("a joint galois table needs maps onto both factors")
    for factor, mapping in ((a, to_a), (b, to_b)):
        if not joint_galois.is_homomorphism(factor.galois, mapping):
            raise InvalidGaloisError("joint galois table does not map homomorphically")
        if set(mapping) != set(factor.galois.elements):
            raise InvalidGaloisError("joint galois table does not map onto a factor")

    na, nb = a.n, b.n
    zero_a = ImmutableMatrix(zeros(na, na))
    zero_b = ImmutableMatrix(zeros(nb, nb))
    basis = [
        ImmutableMatrix(eye(na + nb)),
        _block_diagonal([a.basis[0], zero_b]),
    ]
    basis += [_block_diagonal([beta, zero_b]) for beta in a.basis[1:]]
    basis += [_block_diagonal([zero_a, beta]) for beta in b.basis[1:]]

    def image(sigma: int, M: ImmutableMatrix) -> ImmutableMatrix:
        top = ImmutableMatrix(M[:na, :na])
        bottom = ImmutableMatrix(M[na:, na:])
        return _block_diagonal([a.apply_rho(to_a[sigma], top), b.apply_rho(to_b[sigma], bottom)])

    return _assemble(
        g=a.g + b.g,
        J=_block_diagonal([a.J, b.J]),
        basis=basis,
        galois=joint_galois,
        image=image,
        name=f"{a.name}+{b.name}",
    )


def isogeny_transport(data: EndoData, P: MatrixLike) -> EndoData:
    """Move the data along a rational change of basis P of V (an isogeny)."""
    P = rational_matrix(P)
    if P.shape != (data.n, data.n) or P.det() == 0:
        raise InvalidEndoDataError("isogeny matrix must be square and invertible")
    P_inv = P.inv()
    return EndoData(
        g=data.g,
        basis=tuple(P * b * P_inv for b in data.basis),
        J=P_inv.T * data.J * P_inv,
        galois=data.galois,
        rho=data.rho,
        name=data.name,
    )


# ---------------------------------------------------------------------------
# EndoData files
# ---------------------------------------------------------------------------


def _sections(text: str) -> Dict[str, List[str]]:
    sections: Dict[str, List[str]] = {}
    current: Optional[str] = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
        elif line:
            raise InvalidEndoDataError(f"content outside a section: {raw!r}")
    return sections


def _matrix_blocks(lines: List[str]) -> List[ImmutableMatrix]:
    blocks, current = [], []
    for line in lines + [""]:
        if line:
            current.append(line.split())
        elif current:
            blocks.append(rational_matrix(current))
            current = []
    return blocks


def _parse_galois(lines: List[str], m: int) -> Tuple[FiniteGroup, Tuple[ImmutableMatrix, ...]]:
    lines = [line for line in lines if line]
    name, identity = "", 0
    table: List[Tuple[int, ...]] = []
    generators: Dict[int, ImmutableMatrix] = {}
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if head[0] == "name":
            name = " ".join(head[1:])
            i += 1
        elif head[0] == "identity":
            identity = int(head[1])
            i += 1
        elif head[0] == "table":
            first = lines[i + 1].split()
            order = len(first)
            table = [tuple(int(x) for x in lines[i + 1 + r].split()) for r in range(order)]
            i += 1 + order
        elif head[0] == "generator":
            generators[int(head[1])] = rational_matrix(
                [lines[i + 1 + r].split() for r in range(m)]
            )
            i += 1 + m
        else:
            raise InvalidEndoDataError(f"unknown galois entry {lines[i]!r}")
    if not table:
        return trivial_group(), (ImmutableMatrix(eye(m)),)

    group = FiniteGroup(table=tuple(table), identity=identity, name=name)
    words = word_for_elements(group, [group.check(s) for s in generators])
    if len(words) != group.order:
        raise InvalidGaloisError("generators do not generate the galois table")
    rho = []
    for element in group.elements:
        matrix = ImmutableMatrix(eye(m))
        for s in words[element]:
            matrix = matrix * generators[s]
        rho.append(matrix)
    return group, tuple(rho)


def _parse_albert(lines: List[str]) -> Optional[AlbertDescriptor]:
    fields: Dict[str, str] = {}
    for line in lines:
        for token in line.split():
            key, _, value = token.partition("=")
            fields[key] = value
    if not fields:
        return None
    try:
        return AlbertDescriptor(
            albert_type=fields["type"],
            e=int(fields["e"]),
            d=int(fields.get("d", "1")),
            g=int(fields["g"]),
            absolutely_simple=fields.get("simple", "1") not in ("0", "false", "no"),
        )
    except (KeyError, ValueError) as exc:
        raise InvalidEndoDataError(f"bad [albert] section: {exc}") from exc


def parse_endo_data(text: str, name: str = "") -> Tuple[EndoData, Optional[AlbertDescriptor]]:
    """Parse the sectioned EndoData text format."""
    sections = _sections(text)
    for required in ("basis", "j"):
        if required not in sections:
            raise InvalidEndoDataError(f"missing [{required}] section")
    try:
        basis = _matrix_blocks(sections["basis"])
        J = _matrix_blocks(sections["j"])
    except (TypeError, ValueError, SympifyError) as exc:
        raise InvalidEndoDataError(f"unreadable matrix entry: {exc}") from exc
    if len(J) != 1 or not basis:
        raise InvalidEndoDataError("[J] must hold exactly one matrix and [basis] at least one")
    galois, rho = _parse_galois(sections.get("galois", []), len(basis))
    data = EndoData(
        g=J[0].rows // 2, basis=tuple(basis), J=J[0], galois=galois, rho=rho, name=name
    )
    return data, _parse_albert(sections.get("albert", []))


def load_endo_data(path: Union[str, Path]) -> Tuple[EndoData, Optional[AlbertDescriptor]]:
    """Read and parse an EndoData file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidEndoDataError(f"cannot read {path}: {exc}") from exc
    logger.debug("loading endomorphism data from %s", path)
    return parse_endo_data(text, name=path.stem)


def _render_matrix(M: ImmutableMatrix) -> List[str]:
    return [" ".join(str(M[r, c]) for c in range(M.cols)) for r in range(M.rows)]


def _generating_set(group: FiniteGroup) -> List[int]:
    generators: List[int] = []
    reached = {group.identity}
    for x in group.elements:
        if x not in reached:
            generators.append(x)
            reached = set(generated_closure(group, generators))
    return generators


def render_endo_data(data: EndoData, albert: Optional[AlbertDescriptor] = None) -> str:
    """EndoData in the format read by parse_endo_data."""
    lines = ["[basis]"]
    for i, beta in enumerate(data.basis):
        if i:
            lines.append("")
        lines.extend(_render_matrix(beta))
    lines += ["", "[J]"] + _render_matrix(data.J)
    if data.galois.order > 1:
        lines += ["", "[galois]"]
        if data.galois.name:
            lines.append(f"name {data.galois.name}")
        lines += [f"identity {data.galois.identity}", "table"]
        lines += [" ".join(str(x) for x in row) for row in data.galois.table]
        for s in _generating_set(data.galois):
            lines.append(f"generator {s}")
            lines.extend(_render_matrix(data.rho[s]))
    if albert is not None:
        lines += [
            "",
            "[albert]",
            f"type={albert.albert_type} e={albert.e} d={albert.d} g={albert.g} "
            f"simple={int(albert.absolutely_simple)}",
        ]
    return "\n".join(lines) + "\n"


def write_endo_data(
    path: Union[str, Path], data: EndoData, albert: Optional[AlbertDescriptor] = None
) -> Path:
    """Write EndoData to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_endo_data(data, albert))
    return path
