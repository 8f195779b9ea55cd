"""
Unit tests for finite group tables and the component catalog.
"""

import pytest

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from src.sato_tate.catalog import (
    CATALOG_INDEX,
    LIE_DIMS,
    ComponentTag,
    lookup,
    tags_for_genus,
)
from src.sato_tate.errors import (
    InvalidGaloisError,
    NotASubgroupError,
    UnknownComponentError,
    UnknownElementError,
)
from src.sato_tate.groups import (
    FiniteGroup,
    cyclic_group,
    direct_product,
    find_isomorphism,
    generated_closure,
    trivial_group,
    word_for_elements,
)


def s3() -> FiniteGroup:
    """Symmetric group on three letters, elements as permutation tuples."""
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(a[b[k]] for k in range(3))] for b in perms) for a in perms
    )
    return FiniteGroup(table=table, identity=0, name="S3")


@pytest.mark.unit
class TestFiniteGroup:
    """Test group axioms and basic operations."""

    def test_cyclic(self):
        c4 = cyclic_group(4)
        assert c4.order == 4
        assert c4.mul(3, 2) == 1
        assert c4.inverse(1) == 3
        assert c4.element_order(2) == 2
        assert c4.order_profile() == (1, 2, 4, 4)

    def test_non_latin_square(self):
        with pytest.raises(InvalidGaloisError):
            FiniteGroup(table=((0, 1), (1, 1)))

    def test_wrong_identity(self):
        with pytest.raises(InvalidGaloisError):
            FiniteGroup(table=((0, 1), (1, 0)), identity=1)

    def test_non_associative(self):
        table = ((0, 1, 2), (1, 2, 0), (2, 1, 0))
        with pytest.raises(InvalidGaloisError):
            FiniteGroup(table=table)

    def test_unknown_element(self):
        with pytest.raises(UnknownElementError):
            cyclic_group(2).mul(0, 2)

    def test_abelian(self):
        assert cyclic_group(6).is_abelian()
        assert not s3().is_abelian()

    def test_invalid_cyclic_order(self):
        with pytest.raises(InvalidGaloisError):
            cyclic_group(0)


@pytest.mark.unit
class TestSubgroups:
    """Test subgroup restriction and quotients."""

    def test_subgroup_of_c4(self):
        group, members = cyclic_group(4).subgroup([0, 2])
        assert group.order == 2
        assert members == [0, 2]
        assert group.is_isomorphic(cyclic_group(2))

    def test_not_closed(self):
        with pytest.raises(NotASubgroupError):
            cyclic_group(4).subgroup([0, 1])

    def test_full_subgroup(self):
        group, members = s3().subgroup(range(6))
        assert group.order == 6
        assert group.is_isomorphic(s3())

    def test_quotient(self):
        quotient, projection = cyclic_group(4).quotient([0, 2])
        assert quotient.order == 2
        assert projection == [0, 1, 0, 1]
        assert quotient.is_isomorphic(cyclic_group(2))

    def test_quotient_by_non_normal(self):
        with pytest.raises(NotASubgroupError):
            s3().quotient([0, 1])

    def test_quotient_of_s3_by_a3(self):
        quotient, projection = s3().quotient([0, 4, 5])
        assert quotient.order == 2
        assert projection[1] == projection[2] == projection[3] != projection[0]

    def test_homomorphism_and_kernel(self):
        c4, c2 = cyclic_group(4), cyclic_group(2)
        assert c4.is_homomorphism(c2, [0, 1, 0, 1])
        assert c4.kernel(c2, [0, 1, 0, 1]) == [0, 2]
        with pytest.raises(InvalidGaloisError):
            c4.kernel(c2, [0, 1, 1, 0])


@pytest.mark.unit
class TestConstructions:
    """Test products, isomorphisms and generators."""

    def test_direct_product_indexing(self):
        product = direct_product(cyclic_group(2), cyclic_group(3))
        assert product.order == 6
        # (1, 2) * (1, 2) = (0, 1)
        assert product.mul(1 * 3 + 2, 1 * 3 + 2) == 0 * 3 + 1
        assert product.is_isomorphic(cyclic_group(6))

    def test_klein_not_cyclic(self):
        klein = direct_product(cyclic_group(2), cyclic_group(2))
        assert not klein.is_isomorphic(cyclic_group(4))
        assert find_isomorphism(klein, cyclic_group(4)) is None

    def test_isomorphism_map(self):
        c4 = cyclic_group(4)
        sigma = [0, 2, 1, 3]
        relabelled = FiniteGroup(
            table=tuple(tuple(sigma[(sigma[a] + sigma[b]) % 4] for b in range(4)) for a in range(4))
        )
        mapping = find_isomorphism(relabelled, c4)
        assert mapping is not None
        assert relabelled.is_homomorphism(c4, mapping)

    def test_closure_and_words(self):
        c6 = cyclic_group(6)
        assert generated_closure(c6, [2]) == [0, 2, 4]
        words = word_for_elements(c6, [1])
        assert words[0] == []
        assert words[3] == [1, 1, 1]

    def test_trivial(self):
        assert trivial_group().order == 1
        assert trivial_group().is_isomorphic(cyclic_group(1))


@pytest.mark.unit
class TestCatalog:
    """Test the identity-component catalog."""

    @pytest.mark.parametrize(
        "g,lie_dim,center_dim,tag",
        [
            (1, 3, 0, ComponentTag.SU2),
            (1, 1, 1, ComponentTag.U1),
            (2, 10, 0, ComponentTag.USp4),
            (2, 3, 0, ComponentTag.SU2diag),
            (2, 2, 2, ComponentTag.U1xU1),
            (2, 4, 1, ComponentTag.U1xSU2),
            (2, 6, 0, ComponentTag.SU2xSU2),
            (3, 21, 0, ComponentTag.USp6),
            (3, 1, 1, ComponentTag.U1),
        ],
    )
    def test_lookup(self, g, lie_dim, center_dim, tag):
        assert lookup(g, lie_dim, center_dim) == tag

    def test_unknown(self):
        with pytest.raises(UnknownComponentError) as exc_info:
            lookup(4, 36, 0)
        assert exc_info.value.lie_dim == 36

    def test_keys_consistent(self):
        for (g, lie_dim, _), tag in CATALOG_INDEX.items():
            assert LIE_DIMS[tag] == lie_dim
            assert tag in tags_for_genus(g)

    def test_genus_tags(self):
        assert set(tags_for_genus(1)) == {ComponentTag.U1, ComponentTag.SU2}
        assert ComponentTag.USp6 in tags_for_genus(3)
