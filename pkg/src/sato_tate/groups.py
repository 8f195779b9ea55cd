"""
Finite group tables.

Galois groups Gal(L_e/K) and component groups are small, so they are stored as
Cayley tables over the element indices ``0..n-1``.
"""

from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from .errors import InvalidGaloisError, NotASubgroupError, UnknownElementError


class FiniteGroup(BaseModel):
    """Finite group given by its Cayley table; ``table[a][b]`` is the index of a*b."""

    model_config = ConfigDict(frozen=True)

    table: Tuple[Tuple[int, ...], ...]
    identity: int = 0
    name: str = ""

    @model_validator(mode="after")
    def _check_group_axioms(self) -> "FiniteGroup":
        n = len(self.table)
        if n == 0:
            raise InvalidGaloisError("group table is empty")
        elements = set(range(n))
        for row in self.table:
            if len(row) != n or set(row) != elements:
                raise InvalidGaloisError("group table is not a Latin square")
        if not 0 <= self.identity < n:
            raise InvalidGaloisError(f"identity {self.identity} outside table")
        if any(self.table[self.identity][a] != a for a in range(n)):
            raise InvalidGaloisError(f"element {self.identity} is not an identity")
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise InvalidGaloisError("group table is not associative")
        return self

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> List[int]:
        return list(range(self.order))

    def check(self, a: int) -> int:
        """Return a if it is an element, else raise UnknownElementError."""
        if not isinstance(a, int) or not 0 <= a < self.order:
            raise UnknownElementError(f"element {a!r} is not in a group of order {self.order}")
        return a

    def mul(self, a: int, b: int) -> int:
        return self.table[self.check(a)][self.check(b)]

    def inverse(self, a: int) -> int:
        row = self.table[self.check(a)]
        return row.index(self.identity)

    def element_order(self, a: int) -> int:
        """Smallest k >= 1 with a^k = identity."""
        k, x = 1, self.check(a)
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def order_profile(self) -> Tuple[int, ...]:
        return tuple(sorted(self.element_order(a) for a in self.elements))

    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in self.elements for b in self.elements
        )

    def is_subgroup(self, subset: Sequence[int]) -> bool:
        """True if subset is closed under products and inverses."""
        members = {self.check(a) for a in subset}
        if self.identity not in members:
            return False
        return all(
            self.mul(a, b) in members and self.inverse(a) in members
            for a in members for b in members
        )

    def subgroup(self, subset: Sequence[int]) -> Tuple["FiniteGroup", List[int]]:
        """Restrict to a subgroup; returns the new table and the embedding old indices."""
        if not self.is_subgroup(subset):
            raise NotASubgroupError(
                f"elements {sorted(set(subset))} are not closed under product and inverse"
            )
        members = sorted(set(subset), key=lambda a: (a != self.identity, a))
        position = {a: i for i, a in enumerate(members)}
        table = tuple(
            tuple(position[self.mul(a, b)] for b in members) for a in members
        )
        return FiniteGroup(table=table, identity=0, name=f"{self.name}|sub"), members

    def is_homomorphism(self, target: "FiniteGroup", mapping: Sequence[int]) -> bool:
        """True if mapping respects products in target."""
        if len(mapping) != self.order:
            return False
        if any(not 0 <= m < target.order for m in mapping):
            return False
        return all(
            mapping[self.mul(a, b)] == target.mul(mapping[a], mapping[b])
            for a in self.elements for b in self.elements
        )

    def kernel(self, target: "FiniteGroup", mapping: Sequence[int]) -> List[int]:
        """Elements sent to the identity of target."""
        if not self.is_homomorphism(target, mapping):
            raise InvalidGaloisError("map is not a group homomorphism")
        return [a for a in self.elements if mapping[a] == target.identity]

    def quotient(self, normal: Sequence[int]) -> Tuple["FiniteGroup", List[int]]:
        """Quotient by a normal subgroup; returns the table and the projection."""
        members = {self.check(a) for a in normal}
        if not self.is_subgroup(members):
            raise NotASubgroupError(f"elements {sorted(members)} do not form a subgroup")
        for a in self.elements:
            for k in members:
                if self.mul(self.mul(a, k), self.inverse(a)) not in members:
                    raise NotASubgroupError(f"subgroup {sorted(members)} is not normal")
        coset_of = {a: min(self.mul(a, k) for k in members) for a in self.elements}
        reps = sorted(set(coset_of.values()), key=lambda r: (r != coset_of[self.identity], r))
        position = {r: i for i, r in enumerate(reps)}
        table = tuple(
            tuple(position[coset_of[self.mul(x, y)]] for y in reps) for x in reps
        )
        projection = [position[coset_of[a]] for a in self.elements]
        return FiniteGroup(table=table, identity=0, name=f"{self.name}/N"), projection

    def is_isomorphic(self, other: "FiniteGroup") -> bool:
        """True if some bijection is a homomorphism to other."""
        if self.order != other.order or self.order_profile() != other.order_profile():
            return False
        if self.order > 8:
            # order profile plus commutativity separates the groups we ship
            return self.is_abelian() == other.is_abelian()
        return find_isomorphism(self, other) is not None


def find_isomorphism(a: FiniteGroup, b: FiniteGroup) -> Optional[List[int]]:
    """Brute-force isomorphism search for small tables."""
    if a.order != b.order:
        return None
    others_a = [x for x in a.elements if x != a.identity]
    others_b = [x for x in b.elements if x != b.identity]
    for image in permutations(others_b):
        mapping = [0] * a.order
        mapping[a.identity] = b.identity
        for x, y in zip(others_a, image):
            mapping[x] = y
        if a.is_homomorphism(b, mapping):
            return mapping
    return None


def trivial_group() -> FiniteGroup:
    """Group of order 1."""
    return FiniteGroup(table=((0,),), identity=0, name="C1")


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with element k standing for k mod n."""
    if n < 1:
        raise InvalidGaloisError(f"cyclic group order must be positive, got {n}")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(table=table, identity=0, name=f"C{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Product with element (x, y) stored at index x * |b| + y."""
    n = b.order

    def index(x: int, y: int) -> int:
        return x * n + y

    table = tuple(
        tuple(
            index(a.mul(x1, x2), b.mul(y1, y2))
            for x2 in a.elements for y2 in b.elements
        )
        for x1 in a.elements for y1 in b.elements
    )
    return FiniteGroup(
        table=table,
        identity=index(a.identity, b.identity),
        name=f"{a.name}x{b.name}",
    )


def generated_closure(group: FiniteGroup, generators: Sequence[int]) -> List[int]:
    """Elements of the subgroup generated by ``generators``."""
    members = {group.identity}
    frontier = [group.identity]
    while frontier:
        x = frontier.pop()
        for s in generators:
            y = group.mul(x, s)
            if y not in members:
                members.add(y)
                frontier.append(y)
    return sorted(members)


def word_for_elements(group: FiniteGroup, generators: Sequence[int]) -> Dict[int, List[int]]:
    """Shortest generator word reaching each element (breadth first)."""
    words: Dict[int, List[int]] = {group.identity: []}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in generators:
                y = group.mul(x, s)
                if y not in words:
                    words[y] = words[x] + [s]
                    nxt.append(y)
        frontier = nxt
    return words
