"""
Compact Sato-Tate groups: a catalog identity component together with one
explicit coset representative per component-group element.

Coordinates of C^{2g} are ordered (e_1..e_g, f_1..f_g) with
J = [[0, I], [-I, 0]]; pair i spans (e_i, f_i). Identity-component elements are
drawn as torus elements with Weyl-density eigenphases, which is exact for every
statistic of the characteristic polynomial.
"""

import logging
import math
from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.integrate import quad_vec

from .catalog import GENERA, LIE_DIMS, ComponentTag
from .endo_group import GroupIdentification
from .errors import EmbeddingError, EmptySampleError, InconsistencyError, UnsupportedError
from .groups import FiniteGroup, cyclic_group, find_isomorphism, trivial_group
from .monitoring import structured_log, track_samples
from .stats import MomentReport, report_from_values

logger = logging.getLogger(__name__)

MATRIX_TOL = 1e-9
CHECK_POINTS = 10
MAX_EXACT_ORDER = 10
DEFAULT_SHARD_SIZE = 65536

# bounds on the unnormalized Weyl density over [0, pi]^k
ENVELOPES = {1: 1.0, 2: 16.0, 3: 10.0}


def symplectic_form(g: int) -> np.ndarray:
    """Standard form [[0, I], [-I, 0]] of size 2g."""
    eye = np.eye(g)
    zero = np.zeros((g, g))
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


def is_unitary_symplectic(M: np.ndarray, tol: float = MATRIX_TOL) -> bool:
    """True if M is unitary and preserves the standard symplectic form."""
    n = M.shape[0]
    J = symplectic_form(n // 2)
    return bool(
        np.allclose(M.conj().T @ M, np.eye(n), atol=tol)
        and np.allclose(M.T @ J @ M, J, atol=tol)
    )


class Factor(BaseModel):
    """One simple or toral factor acting on the listed coordinate pairs."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["U1", "SU2", "USp"]
    pairs: Tuple[int, ...]

    @property
    def n_params(self) -> int:
        return len(self.pairs) if self.kind == "USp" else 1

    @property
    def lie_dim(self) -> int:
        if self.kind == "U1":
            return 1
        if self.kind == "SU2":
            return 3
        k = len(self.pairs)
        return k * (2 * k + 1)

    def bounds(self) -> List[Tuple[float, float]]:
        if self.kind == "U1":
            return [(0.0, 2 * math.pi)]
        return [(0.0, math.pi)] * self.n_params

    def density(self, theta: np.ndarray) -> np.ndarray:
        """Unnormalized Weyl density; ``theta`` has shape (..., n_params)."""
        if self.kind == "U1":
            return np.ones(theta.shape[:-1])
        weight = np.prod(np.sin(theta) ** 2, axis=-1)
        x = 2 * np.cos(theta)
        for i in range(self.n_params):
            for j in range(i + 1, self.n_params):
                weight = weight * (x[..., i] - x[..., j]) ** 2
        return weight

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw count parameter vectors from the factor's Haar measure."""
        if self.kind == "U1":
            return rng.uniform(0.0, 2 * math.pi, size=(count, 1))
        k = self.n_params
        envelope = ENVELOPES[k]
        accepted: List[np.ndarray] = []
        have = 0
        while have < count:
            batch = max(2 * (count - have), 64)
            theta = rng.uniform(0.0, math.pi, size=(batch, k))
            keep = rng.uniform(0.0, envelope, size=batch) < self.density(theta)
            accepted.append(theta[keep])
            have += int(keep.sum())
        return np.concatenate(accepted)[:count]


def _component_factors(tag: ComponentTag, g: int) -> Tuple[Factor, ...]:
    every = tuple(range(g))
    layouts = {
        ComponentTag.U1: (("U1", every),),
        ComponentTag.SU2: (("SU2", every),),
        ComponentTag.SU2diag: (("SU2", every),),
        ComponentTag.U1xU1: (("U1", (0,)), ("U1", (1,))),
        ComponentTag.U1xSU2: (("U1", (0,)), ("SU2", (1,))),
        ComponentTag.SU2xSU2: (("SU2", (0,)), ("SU2", (1,))),
        ComponentTag.USp4: (("USp", every),),
        ComponentTag.USp6: (("USp", every),),
    }
    return tuple(Factor(kind=kind, pairs=pairs) for kind, pairs in layouts[tag])


def _diagonal(factors: Sequence[Factor], g: int, params: np.ndarray) -> np.ndarray:
    """Torus elements diag(d, conj(d)) from parameter rows; uncovered pairs stay 1."""
    out = np.ones((params.shape[0], 2 * g), dtype=complex)
    offset = 0
    for factor in factors:
        for j, pair in enumerate(factor.pairs):
            column = offset + (j if factor.kind == "USp" else 0)
            phase = np.exp(1j * params[:, column])
            out[:, pair] = phase
            out[:, pair + g] = np.conj(phase)
        offset += factor.n_params
    return out


def _density(factors: Sequence[Factor], params: np.ndarray) -> np.ndarray:
    weight = np.ones(params.shape[:-1])
    offset = 0
    for factor in factors:
        weight = weight * factor.density(params[..., offset:offset + factor.n_params])
        offset += factor.n_params
    return weight


def _draw(rng: np.random.Generator, factors: Sequence[Factor], count: int) -> np.ndarray:
    if not factors:
        return np.zeros((count, 0))
    return np.concatenate([f.draw(rng, count) for f in factors], axis=1)


def _su2_matrix(rng: np.random.Generator) -> np.ndarray:
    a, b, c, d = rng.standard_normal(4)
    norm = math.sqrt(a * a + b * b + c * c + d * d)
    a, b, c, d = a / norm, b / norm, c / norm, d / norm
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


class IdentityComponent(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: ComponentTag
    g: int
    lie_dim: Optional[int] = None

    @model_validator(mode="before")
    @classmethod
    def _default_dim(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("lie_dim") is None:
            try:
                data = {**data, "lie_dim": LIE_DIMS[ComponentTag(data["tag"])]}
            except (KeyError, ValueError):
                raise EmbeddingError(f"unknown identity component {data.get('tag')!r}") from None
        return data

    @model_validator(mode="after")
    def _check_embedding(self) -> "IdentityComponent":
        if self.g not in GENERA[self.tag]:
            raise EmbeddingError(f"{self.tag.value} does not embed in USp({2 * self.g})")
        if self.lie_dim != LIE_DIMS[self.tag]:
            raise EmbeddingError(
                f"lie_dim {self.lie_dim} does not match {self.tag.value} ({LIE_DIMS[self.tag]})"
            )
        if sum(f.lie_dim for f in self.factors) != self.lie_dim:
            raise InconsistencyError(f"factor layout of {self.tag.value} has the wrong dimension")
        return self

    @property
    def factors(self) -> Tuple[Factor, ...]:
        return _component_factors(self.tag, self.g)

    @property
    def is_abelian(self) -> bool:
        return all(f.kind == "U1" for f in self.factors)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        """A full (non-diagonal where possible) element, used to test normalizers."""
        g = self.g
        M = np.eye(2 * g, dtype=complex)
        for factor in self.factors:
            if factor.kind == "SU2":
                U = _su2_matrix(rng)
                for i in factor.pairs:
                    idx = [i, i + g]
                    M[np.ix_(idx, idx)] = U
            else:
                params = _draw(rng, (factor,), 1)
                d = _diagonal((factor,), g, params)[0]
                for i in factor.pairs:
                    M[i, i], M[i + g, i + g] = d[i], d[i + g]
        return M

    def contains(self, M: np.ndarray, tol: float = MATRIX_TOL) -> bool:
        """True if M lies in the identity component."""
        g = self.g
        if M.shape != (2 * g, 2 * g) or not is_unitary_symplectic(M, tol):
            return False
        allowed = np.zeros(M.shape, dtype=bool)
        for factor in self.factors:
            if factor.kind == "USp":
                coords = list(factor.pairs) + [i + g for i in factor.pairs]
                allowed[np.ix_(coords, coords)] = True
                continue
            first = factor.pairs[0]
            block0 = M[np.ix_([first, first + g], [first, first + g])]
            if factor.kind == "U1" and (abs(block0[0, 1]) > tol or abs(block0[1, 0]) > tol):
                return False
            for i in factor.pairs:
                idx = [i, i + g]
                allowed[np.ix_(idx, idx)] = True
                if not np.allclose(M[np.ix_(idx, idx)], block0, atol=tol):
                    return False
        return bool(np.all(np.abs(M[~allowed]) <= tol))


class STModel(BaseModel):
    """
    Identity component plus coset representatives indexed by pi0 elements.

    ``coset_factors[c]`` is the torus parameterization used for coset c; it
    defaults to the component's own factors.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    component: IdentityComponent
    pi0: FiniteGroup = trivial_group()
    coset_reps: Tuple[Any, ...] = ()
    coset_factors: Optional[Tuple[Tuple[Factor, ...], ...]] = None
    name: str = ""

    @model_validator(mode="before")
    @classmethod
    def _coerce_reps(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        reps = data.get("coset_reps") or ()
        if not reps:
            component = data["component"]
            g = component.g if isinstance(component, IdentityComponent) else component["g"]
            reps = (np.eye(2 * g),)
        data["coset_reps"] = tuple(np.asarray(r, dtype=complex) for r in reps)
        return data

    @model_validator(mode="after")
    def _check_cosets(self) -> "STModel":
        g, order = self.component.g, self.pi0.order
        if len(self.coset_reps) != order:
            raise EmbeddingError(f"need {order} coset representatives, got {len(self.coset_reps)}")
        if self.coset_factors is not None and len(self.coset_factors) != order:
            raise EmbeddingError("one coset parameterization per pi0 element is required")
        for rep in self.coset_reps:
            if rep.shape != (2 * g, 2 * g) or not is_unitary_symplectic(rep):
                raise EmbeddingError("coset representative is not in USp(2g)")
        if not np.allclose(self.coset_reps[self.pi0.identity], np.eye(2 * g), atol=MATRIX_TOL):
            raise EmbeddingError("the neutral coset must be represented by the identity")
        if order > 1 and any(f.kind == "USp" for f in self.component.factors):
            raise EmbeddingError("USp components are self-normalizing; pi0 must be trivial")

        rng = np.random.default_rng(0)
        for rep in self.coset_reps:
            for _ in range(CHECK_POINTS):
                k = self.component.random_element(rng)
                if not self.component.contains(rep @ k @ rep.conj().T):
                    raise EmbeddingError(
                        f"coset representative does not normalize {self.component.tag.value}"
                    )
        for a in self.pi0.elements:
            for b in self.pi0.elements:
                ab = self.coset_reps[self.pi0.mul(a, b)]
                defect = ab.conj().T @ self.coset_reps[a] @ self.coset_reps[b]
                if not self.component.contains(defect):
                    raise EmbeddingError(f"rep({a})rep({b}) is not in the coset of rep({a}*{b})")
        return self

    @property
    def g(self) -> int:
        return self.component.g

    @property
    def order(self) -> int:
        return self.pi0.order

    @property
    def label(self) -> str:
        return f"{self.component.tag.value}/{self.order}"

    @property
    def model_id(self) -> str:
        return self.name or model_id_for(self.component.tag, self.g, self.order)

    def factors_for(self, coset: int) -> Tuple[Factor, ...]:
        """Factor layout integrated over the given coset."""
        if self.coset_factors is None:
            return self.component.factors
        return self.coset_factors[coset]

    def trace_free_cosets(self) -> List[int]:
        """Cosets whose trace vanishes identically, found by collecting each character."""
        g = self.g
        free = []
        for c, rep in enumerate(self.coset_reps):
            characters: Dict[Tuple[Any, ...], complex] = {}
            owner: Dict[int, Tuple[int, int]] = {}
            for f_index, factor in enumerate(self.factors_for(c)):
                for j, pair in enumerate(factor.pairs):
                    owner[pair] = (f_index, j if factor.kind == "USp" else 0)
            for coord in range(2 * g):
                pair, sign = coord % g, (1 if coord < g else -1)
                key = (*owner[pair], sign) if pair in owner else ("const",)
                characters[key] = characters.get(key, 0) + rep[coord, coord]
            if all(abs(v) < MATRIX_TOL for v in characters.values()):
                free.append(c)
        return free

    def exact_moments(self, k_max: int = 8) -> MomentReport:
        """Exact moment profile by quadrature."""
        return exact_moments(self, k_max)

    def sample(self, seed: int, n: int, shard_size: int = DEFAULT_SHARD_SIZE) -> "HaarSamples":
        """Haar samples of this model."""
        return sample(self, seed, n, shard_size)


# ---------------------------------------------------------------------------
# Built-in coset tables
# ---------------------------------------------------------------------------


def _block_rep(g: int, blocks: Dict[int, np.ndarray]) -> np.ndarray:
    M = np.eye(2 * g, dtype=complex)
    for i, block in blocks.items():
        idx = [i, i + g]
        M[np.ix_(idx, idx)] = block
    return M


def _quarter_turn() -> np.ndarray:
    """e1 -> e2 -> f1 -> f2 -> -e1; its square is J up to sign."""
    P = np.zeros((4, 4), dtype=complex)
    P[1, 0] = P[2, 1] = P[3, 2] = 1
    P[0, 3] = -1
    return P


def _pair_swap() -> np.ndarray:
    return np.eye(4, dtype=complex)[[1, 0, 3, 2]]


_ANTIDIAGONAL = np.array([[0, 1], [-1, 0]], dtype=complex)

# (tag, pi0 order) -> (generator for genus g, torus parameterization of non-neutral cosets)
BUILTIN_COSETS = {
    (ComponentTag.U1, 2): (lambda g: symplectic_form(g), None),
    (ComponentTag.U1xU1, 2): (lambda g: symplectic_form(g), None),
    (ComponentTag.U1xU1, 4): (lambda g: _quarter_turn(), None),
    (ComponentTag.U1xSU2, 2): (lambda g: _block_rep(g, {0: _ANTIDIAGONAL}), None),
    (ComponentTag.SU2xSU2, 2): (
        lambda g: _pair_swap(),
        # swap.(A, B) is conjugate to swap.(1, BA)
        (Factor(kind="SU2", pairs=(1,)),),
    ),
}


def model_id_for(tag: ComponentTag, g: int, order: int) -> str:
    """Id used in candidate lists: 'N(U1)', 'tag' or 'tag/order'."""
    if order == 1:
        return tag.value
    if tag == ComponentTag.U1 and g == 1 and order == 2:
        return "N(U1)"
    return f"{tag.value}/{order}"


def build_model(tag: Union[ComponentTag, str], g: int, pi0: Optional[FiniteGroup] = None) -> STModel:
    """Model with built-in representatives; ``pi0`` must be cyclic and tabulated."""
    tag = ComponentTag(tag)
    component = IdentityComponent(tag=tag, g=g)
    pi0 = pi0 or trivial_group()
    if pi0.order == 1:
        return STModel(component=component, pi0=pi0)
    entry = BUILTIN_COSETS.get((tag, pi0.order))
    iso = find_isomorphism(pi0, cyclic_group(pi0.order)) if entry else None
    if entry is None or iso is None:
        raise EmbeddingError(
            f"no built-in coset representatives for {tag.value} with |pi0| = {pi0.order}; "
            "supply coset_reps explicitly"
        )
    generator, reduced = entry
    gen = generator(g)
    reps = [np.linalg.matrix_power(gen, iso[x]) for x in pi0.elements]
    coset_factors = None
    if reduced is not None:
        coset_factors = tuple(
            component.factors if x == pi0.identity else reduced for x in pi0.elements
        )
    return STModel(component=component, pi0=pi0, coset_reps=tuple(reps), coset_factors=coset_factors)


def model_from_identification(identification: GroupIdentification) -> STModel:
    """Built-in model for an identification; order must agree."""
    model = build_model(
        identification.identity_component_id, identification.g, identification.component_group
    )
    if model.order != identification.component_group.order:
        raise InconsistencyError("STModel pi0 differs from the identified component group")
    return model


def model_from_id(model_id: str, g: int) -> STModel:
    """Parse ids such as 'SU2', 'N(U1)', 'U1xU1/4'."""
    text = model_id.strip()
    if text == "N(U1)":
        tag_text, order = "U1", 2
    elif "/" in text:
        tag_text, _, order_text = text.partition("/")
        try:
            order = int(order_text)
        except ValueError:
            raise EmbeddingError(f"bad component group order in {model_id!r}") from None
    else:
        tag_text, order = text, 1
    try:
        tag = ComponentTag(tag_text)
    except ValueError:
        raise EmbeddingError(f"unknown group id {model_id!r}") from None
    model = build_model(tag, g, cyclic_group(order) if order > 1 else None)
    return model.model_copy(update={"name": text}) if text != model.model_id else model


def catalog_model_ids(g: int) -> List[str]:
    """Every built-in model id for genus g."""
    ids = []
    for tag, genera in GENERA.items():
        if g not in genera:
            continue
        ids.append(model_id_for(tag, g, 1))
        for (entry_tag, order) in BUILTIN_COSETS:
            if entry_tag == tag:
                ids.append(model_id_for(tag, g, order))
    return ids


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


class HaarSample(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: Any
    label: int

    @model_validator(mode="after")
    def _check_matrix(self) -> "HaarSample":
        if not is_unitary_symplectic(np.asarray(self.matrix)):
            raise InconsistencyError("sample is not unitary symplectic")
        return self

    def charpoly(self) -> np.ndarray:
        """Coefficients of det(x I - M), leading coefficient first."""
        return np.poly(self.matrix)


class CoefficientSamples(BaseModel):
    """Characteristic-polynomial coefficients a1 (and a2 for g >= 2) per sample."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: str
    g: int
    a1: Any
    a2: Any = None
    labels: Any

    def __len__(self) -> int:
        return len(self.a1)


class HaarSamples(BaseModel):
    """Samples stored as coset labels plus torus diagonals; matrices built on access."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    group: str
    g: int
    reps: Any
    labels: Any
    diagonals: Any

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> HaarSample:
        label = int(self.labels[i])
        return HaarSample(matrix=self.reps[label] * self.diagonals[i][None, :], label=label)

    def __iter__(self) -> Iterator[HaarSample]:  # type: ignore[override]
        for i in range(len(self)):
            yield self[i]

    def coset_counts(self) -> np.ndarray:
        """Number of samples per coset label."""
        return np.bincount(self.labels, minlength=len(self.reps))

    def coefficients(self) -> CoefficientSamples:
        """a1 (and a2) of every sample."""
        a1, a2 = _coefficients(self.reps, self.labels, self.diagonals, self.g)
        return CoefficientSamples(group=self.group, g=self.g, a1=a1, a2=a2, labels=self.labels)


def _coefficients(
    reps: np.ndarray, labels: np.ndarray, diagonals: np.ndarray, g: int
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    n = len(labels)
    trace = np.zeros(n, dtype=complex)
    trace_sq = np.zeros(n, dtype=complex)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        R, D = reps[c], diagonals[idx]
        trace[idx] = D @ np.diag(R)
        trace_sq[idx] = np.einsum("ni,ij,nj->n", D, R * R.T, D)
    a1 = -trace.real
    a2 = ((trace * trace - trace_sq) / 2).real if g >= 2 else None
    return a1, a2


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    """Independent PCG64 stream for one shard of a seeded run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shard,))))


def _iter_shards(
    model: STModel, seed: int, n: int, shard_size: int
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    if n < 1:
        raise UnsupportedError(f"sample count must be positive, got {n}")
    g = model.g
    for shard, start in enumerate(range(0, n, shard_size)):
        count = min(shard_size, n - start)
        rng = shard_rng(seed, shard)
        labels = rng.integers(0, model.order, size=count)
        diagonals = np.empty((count, 2 * g), dtype=complex)
        for c in range(model.order):
            idx = np.flatnonzero(labels == c)
            if idx.size:
                factors = model.factors_for(c)
                diagonals[idx] = _diagonal(factors, g, _draw(rng, factors, idx.size))
        yield labels, diagonals


def sample(model: STModel, seed: int, n: int, shard_size: int = DEFAULT_SHARD_SIZE) -> HaarSamples:
    """n Haar samples; shard s is drawn from the stream of (seed, s)."""
    shards = list(_iter_shards(model, seed, n, shard_size))
    track_samples(model.component.tag.value, n)
    return HaarSamples(
        group=model.label,
        g=model.g,
        reps=np.stack(model.coset_reps),
        labels=np.concatenate([labels for labels, _ in shards]),
        diagonals=np.concatenate([d for _, d in shards]),
    )


def sample_coefficients(
    model: STModel, seed: int, n: int, shard_size: int = DEFAULT_SHARD_SIZE
) -> CoefficientSamples:
    """Same draws as ``sample`` reduced shard by shard to coefficients."""
    reps = np.stack(model.coset_reps)
    a1_parts, a2_parts, label_parts = [], [], []
    for labels, diagonals in _iter_shards(model, seed, n, shard_size):
        a1, a2 = _coefficients(reps, labels, diagonals, model.g)
        a1_parts.append(a1)
        a2_parts.append(a2)
        label_parts.append(labels)
    track_samples(model.component.tag.value, n)
    return CoefficientSamples(
        group=model.label,
        g=model.g,
        a1=np.concatenate(a1_parts),
        a2=np.concatenate(a2_parts) if model.g >= 2 else None,
        labels=np.concatenate(label_parts),
    )


def coefficient_stats(samples: Union[HaarSamples, CoefficientSamples]) -> MomentReport:
    """Moment report of Haar samples."""
    if len(samples) == 0:
        raise EmptySampleError("no Haar samples")
    if isinstance(samples, HaarSamples):
        samples = samples.coefficients()
    return report_from_values(samples.a1, samples.a2, samples.g, group=samples.group)


# ---------------------------------------------------------------------------
# Exact moments
# ---------------------------------------------------------------------------

_PROFILE_CACHE: Dict[Tuple[Any, ...], MomentReport] = {}


def _integrate(fn: Any, bounds: Sequence[Tuple[float, float]], tol: float) -> np.ndarray:
    lo, hi = bounds[0]
    if len(bounds) == 1:
        def inner(x: float) -> np.ndarray:
            return fn(np.array([x]))
    else:
        def inner(x: float) -> np.ndarray:
            return _integrate(lambda rest: fn(np.concatenate(([x], rest))), bounds[1:], tol)
    value, _ = quad_vec(inner, lo, hi, epsabs=tol, epsrel=tol)
    return value


def _coset_moments(model: STModel, coset: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    g = model.g
    R = model.coset_reps[coset]
    factors = model.factors_for(coset)
    diag_R = np.diag(R)
    square_R = R * R.T
    a1_orders = np.arange(MAX_EXACT_ORDER + 1)
    a2_orders = np.arange(1, 5)

    def integrand(theta: np.ndarray) -> np.ndarray:
        D = _diagonal(factors, g, theta[None, :])[0]
        trace = D @ diag_R
        a1 = -trace.real
        weight = float(_density(factors, theta[None, :])[0])
        values = [weight * a1 ** a1_orders]
        if g >= 2:
            a2 = ((trace * trace - D @ square_R @ D) / 2).real
            values.append(weight * a2 ** a2_orders)
        return np.concatenate(values)

    bounds = [b for f in factors for b in f.bounds()]
    if bounds:
        tol = 1e-10 if len(bounds) <= 2 else 1e-3
        totals = _integrate(integrand, bounds, tol)
    else:
        totals = integrand(np.zeros(0))
    totals = totals / totals[0]
    a1 = totals[: MAX_EXACT_ORDER + 1]
    a2 = np.concatenate(([1.0], totals[MAX_EXACT_ORDER + 1:])) if g >= 2 else None
    return a1, a2


def _profile(model: STModel) -> MomentReport:
    key = (
        model.label,
        model.g,
        b"".join(r.tobytes() for r in model.coset_reps),
        model.coset_factors,
    )
    if key in _PROFILE_CACHE:
        return _PROFILE_CACHE[key]
    per_coset = [_coset_moments(model, c) for c in range(model.order)]
    a1 = np.mean([m[0] for m in per_coset], axis=0)
    a2 = np.mean([m[1] for m in per_coset], axis=0) if model.g >= 2 else None
    report = MomentReport(
        group=model.label,
        g=model.g,
        a1=tuple(float(x) for x in a1),
        a2=tuple(float(x) for x in a2) if a2 is not None else None,
        zero_density=len(model.trace_free_cosets()) / model.order,
        exact=True,
    )
    _PROFILE_CACHE[key] = report
    structured_log("DEBUG", "exact moments computed", group=model.label, g=model.g)
    return report


def exact_moments(model: STModel, k_max: int = 8) -> MomentReport:
    """Haar moments of a1 up to k_max (and a2 up to 4 for g >= 2) by quadrature."""
    if not 0 <= k_max <= MAX_EXACT_ORDER:
        raise UnsupportedError(f"exact moments are available up to order {MAX_EXACT_ORDER}")
    full = _profile(model)
    return full.model_copy(update={"a1": full.a1[: k_max + 1]})
