"""
Moment statistics of normalized Frobenius data and matching against
candidate Sato-Tate groups.
"""

import logging
import math
from pathlib import Path
from typing import (
    TYPE_CHECKING,
    Callable,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import (
    EmbeddingError,
    EmptySampleError,
    IncompleteRuleError,
    InconsistencyError,
    InsufficientDataError,
)
from .lpoly import NormalizedPoly
from .monitoring import structured_log

if TYPE_CHECKING:
    from .st_group import STModel

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-9
A1_MAX_ORDER = 8
A2_MAX_ORDER = 4
JACKKNIFE_BLOCKS = 20
VARIANCE_FLOOR = 1e-6
MIN_MATCH_SAMPLES = 100
MATCH_A1_ORDERS = (2, 4, 6)
MATCH_A2_ORDERS = (1, 2)
HISTOGRAM_BINS = 50

SplittingRule = Union[Callable[[int], int], Mapping[int, int]]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


class MomentReport(BaseModel):
    """
    Moments of a1 (index k holds M_k, so ``a1[0] == 1``) and optionally of a2.

    ``count`` is the sample count; exact reports carry ``count == 0`` and no
    standard errors.
    """

    model_config = ConfigDict(frozen=True)

    group: str = "empirical"
    g: int
    a1: Tuple[float, ...]
    a2: Optional[Tuple[float, ...]] = None
    zero_density: float
    count: int = 0
    exact: bool = False
    a1_stderr: Optional[Tuple[float, ...]] = None
    a2_stderr: Optional[Tuple[float, ...]] = None
    zero_stderr: Optional[float] = None

    @model_validator(mode="after")
    def _check_moment_chain(self) -> "MomentReport":
        if not -ZERO_TOL <= self.zero_density <= 1 + ZERO_TOL:
            raise InconsistencyError(f"zero density {self.zero_density} outside [0, 1]")
        for series in (self.a1, self.a2 or ()):
            for k in range(0, len(series), 2):
                if series[k] < -ZERO_TOL:
                    raise InconsistencyError(f"negative even moment M_{k} = {series[k]}")
        if len(self.a1) > 4:
            m2, m4 = self.a1[2], self.a1[4]
            if m2 > math.sqrt(max(m4, 0.0)) * (1 + 1e-9) + ZERO_TOL:
                raise InconsistencyError(f"M_2 = {m2} violates M_2^2 <= M_4 = {m4}")
        return self

    def moment(self, k: int) -> float:
        """k-th a1 moment."""
        return self.a1[k]

    def a2_moment(self, k: int) -> Optional[float]:
        """k-th a2 moment, or None if the report has no a2."""
        if self.a2 is None or k >= len(self.a2):
            return None
        return self.a2[k]

    def render(self) -> str:
        """Text form read back by ``parse``."""
        lines = []
        for k, value in enumerate(self.a1):
            line = f"group={self.group} k={k} moment={_fmt(value)}"
            if self.a1_stderr is not None:
                line += f" stderr={_fmt(self.a1_stderr[k])}"
            lines.append(line)
        for k, value in enumerate(self.a2 or ()):
            line = f"group={self.group} k={k} a2_moment={_fmt(value)}"
            if self.a2_stderr is not None:
                line += f" stderr={_fmt(self.a2_stderr[k])}"
            lines.append(line)
        lines.append(f"zero_density={_fmt(self.zero_density)}")
        if self.zero_stderr is not None:
            lines.append(f"zero_stderr={_fmt(self.zero_stderr)}")
        lines.append(f"g={self.g}")
        lines.append(f"count={self.count}")
        lines.append(f"exact={int(self.exact)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "MomentReport":
        """Inverse of ``render``."""
        a1: Dict[int, float] = {}
        a2: Dict[int, float] = {}
        a1_err: Dict[int, float] = {}
        a2_err: Dict[int, float] = {}
        fields: Dict[str, str] = {}
        group = "empirical"
        for line in text.splitlines():
            tokens = dict(token.split("=", 1) for token in line.split() if "=" in token)
            if "k" in tokens:
                group = tokens.get("group", group)
                k = int(tokens["k"])
                if "moment" in tokens:
                    a1[k] = float(tokens["moment"])
                    if "stderr" in tokens:
                        a1_err[k] = float(tokens["stderr"])
                elif "a2_moment" in tokens:
                    a2[k] = float(tokens["a2_moment"])
                    if "stderr" in tokens:
                        a2_err[k] = float(tokens["stderr"])
            else:
                fields.update(tokens)

        def ordered(values: Dict[int, float]) -> Optional[Tuple[float, ...]]:
            return tuple(values[k] for k in sorted(values)) if values else None

        return cls(
            group=group,
            g=int(fields.get("g", "1")),
            a1=ordered(a1) or (1.0,),
            a2=ordered(a2),
            zero_density=float(fields.get("zero_density", "0")),
            count=int(fields.get("count", "0")),
            exact=fields.get("exact", "0") == "1",
            a1_stderr=ordered(a1_err),
            a2_stderr=ordered(a2_err),
            zero_stderr=float(fields["zero_stderr"]) if "zero_stderr" in fields else None,
        )


class MatchVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    best: str
    scores: Dict[str, float]
    decisive: bool

    @model_validator(mode="after")
    def _check_scores(self) -> "MatchVerdict":
        if any(score < 0 for score in self.scores.values()):
            raise InconsistencyError("negative match score")
        if self.scores[self.best] > min(self.scores.values()):
            raise InconsistencyError(f"best candidate {self.best} does not have the minimal score")
        return self

    def verdict_line(self) -> str:
        """First line of verdict.txt."""
        return f"best={self.best} decisive={int(self.decisive)}"

    def render(self) -> str:
        lines = [self.verdict_line(), "candidate score"]
        for name, score in sorted(self.scores.items(), key=lambda item: (item[1], item[0])):
            lines.append(f"{name} {_fmt(score)}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Moment accumulation
# ---------------------------------------------------------------------------


def _moments(values: np.ndarray, max_order: int) -> Tuple[float, ...]:
    n = len(values)
    powers = np.ones_like(values)
    out = [1.0]
    for _ in range(max_order):
        powers = powers * values
        out.append(math.fsum(powers.tolist()) / n)
    return tuple(out)


def jackknife_stderr(values: np.ndarray, max_order: int, blocks: int = JACKKNIFE_BLOCKS) -> Tuple[float, ...]:
    """Delete-one-block jackknife standard error of the k-th moment, k = 0..max_order."""
    n = len(values)
    blocks = min(blocks, n)
    if blocks < 2:
        return tuple(0.0 for _ in range(max_order + 1))
    powers = values[:, None] ** np.arange(max_order + 1)[None, :]
    edges = np.linspace(0, n, blocks + 1).astype(int)
    block_sums = np.add.reduceat(powers, edges[:-1], axis=0)
    block_sizes = np.diff(edges)[:, None]
    total = powers.sum(axis=0)
    leave_out = (total[None, :] - block_sums) / (n - block_sizes)
    spread = ((leave_out - leave_out.mean(axis=0)) ** 2).sum(axis=0)
    return tuple(float(x) for x in np.sqrt((blocks - 1) / blocks * spread))


def report_from_values(
    a1: np.ndarray,
    a2: Optional[np.ndarray],
    g: int,
    group: str = "empirical",
    zero_mask: Optional[np.ndarray] = None,
) -> MomentReport:
    """Moments, jackknife errors and zero density of raw coefficient arrays."""
    a1 = np.asarray(a1, dtype=float)
    if a1.size == 0:
        raise EmptySampleError("no samples to take moments of")
    if zero_mask is None:
        zero_mask = np.abs(a1) < ZERO_TOL
    zeros = zero_mask.astype(float)
    a2_moments = a2_err = None
    if a2 is not None:
        a2 = np.asarray(a2, dtype=float)
        a2_moments = _moments(a2, A2_MAX_ORDER)
        a2_err = jackknife_stderr(a2, A2_MAX_ORDER)
    return MomentReport(
        group=group,
        g=g,
        a1=_moments(a1, A1_MAX_ORDER),
        a2=a2_moments,
        zero_density=math.fsum(zeros.tolist()) / len(zeros),
        count=int(a1.size),
        a1_stderr=jackknife_stderr(a1, A1_MAX_ORDER),
        a2_stderr=a2_err,
        zero_stderr=jackknife_stderr(zeros, 1)[1],
    )


def empirical_moments(aps: Sequence[NormalizedPoly], group: str = "empirical") -> MomentReport:
    """Averages of powers of a1 (and a2 when every entry carries it)."""
    if len(aps) == 0:
        raise EmptySampleError("empty Frobenius sequence")
    g = aps[0].g
    a1 = np.array([poly.a1 for poly in aps], dtype=float)
    a2 = None
    if g >= 2 and all(poly.a2 is not None for poly in aps):
        a2 = np.array([poly.a2 for poly in aps], dtype=float)
    return report_from_values(a1, a2, g, group=group)


def _label_for(rule: SplittingRule, p: int) -> int:
    if isinstance(rule, Mapping):
        if p not in rule:
            raise IncompleteRuleError(f"splitting rule has no label for p={p}", p=p)
        return rule[p]
    try:
        return rule(p)
    except KeyError:
        raise IncompleteRuleError(f"splitting rule has no label for p={p}", p=p) from None


def residue_rule(modulus: int, classes: Mapping[int, int]) -> Callable[[int], int]:
    """Label primes by their residue mod ``modulus``, e.g. p mod 4 for Q(i)/Q."""

    def rule(p: int) -> int:
        residue = p % modulus
        if residue not in classes:
            raise IncompleteRuleError(
                f"residue {residue} mod {modulus} of p={p} has no label", p=p
            )
        return classes[residue]

    return rule


def component_split(
    entries: Iterable[Tuple[int, NormalizedPoly]], rule: SplittingRule
) -> Dict[int, MomentReport]:
    """Per-coset reports, keyed by component-group label."""
    grouped: Dict[int, List[NormalizedPoly]] = {}
    for p, poly in entries:
        grouped.setdefault(_label_for(rule, p), []).append(poly)
    if not grouped:
        raise EmptySampleError("empty Frobenius sequence")
    reports = {
        label: empirical_moments(polys, group=f"coset{label}")
        for label, polys in sorted(grouped.items())
    }
    structured_log(
        "INFO",
        "sequence split by coset",
        counts={str(label): r.count for label, r in reports.items()},
    )
    return reports


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def _weight(stderr: Optional[Sequence[float]], k: int) -> float:
    if stderr is None:
        return 1.0
    return 1.0 / max(stderr[k] ** 2, VARIANCE_FLOOR)


def score_against(report: MomentReport, profile: MomentReport) -> float:
    """Weighted squared distance between a report and a group's exact profile."""
    terms = []
    for k in MATCH_A1_ORDERS:
        if k < len(report.a1) and k < len(profile.a1):
            terms.append((report.a1[k] - profile.a1[k]) ** 2 * _weight(report.a1_stderr, k))
    if report.g >= 2 and report.a2 is not None and profile.a2 is not None:
        for k in MATCH_A2_ORDERS:
            terms.append((report.a2[k] - profile.a2[k]) ** 2 * _weight(report.a2_stderr, k))
    zero_weight = 1.0
    if report.zero_stderr is not None:
        zero_weight = 1.0 / max(report.zero_stderr ** 2, VARIANCE_FLOOR)
    terms.append((report.zero_density - profile.zero_density) ** 2 * zero_weight)
    return math.fsum(terms)


def match(report: MomentReport, candidates: Sequence["STModel"]) -> MatchVerdict:
    """Score the report against each candidate's exact moment profile."""
    if len(candidates) < 2:
        raise InsufficientDataError(f"need at least 2 candidates, got {len(candidates)}")
    if not report.exact and report.count < MIN_MATCH_SAMPLES:
        raise InsufficientDataError(
            f"{report.count} samples; at least {MIN_MATCH_SAMPLES} are needed to match"
        )
    scores: Dict[str, float] = {}
    for model in candidates:
        if model.g != report.g:
            raise EmbeddingError(f"candidate {model.model_id} has g={model.g}, data has g={report.g}")
        profile = model.exact_moments(max(MATCH_A1_ORDERS))
        scores[model.model_id] = score_against(report, profile)
    ranked = sorted(scores.items(), key=lambda item: (item[1], item[0]))
    best, best_score = ranked[0]
    decisive = best_score < 0.5 * ranked[1][1]
    verdict = MatchVerdict(best=best, scores=scores, decisive=decisive)
    structured_log("INFO", "match verdict", best=best, decisive=decisive, scores=scores)
    return verdict


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def histogram(a1: Sequence[float], g: int, bins: int = HISTOGRAM_BINS) -> Tuple[np.ndarray, np.ndarray]:
    """a1 histogram over [-2g, 2g]."""
    counts, edges = np.histogram(np.asarray(a1, dtype=float), bins=bins, range=(-2.0 * g, 2.0 * g))
    return edges, counts


def render_histogram(edges: np.ndarray, counts: np.ndarray) -> str:
    """CSV with left,right,count columns."""
    lines = ["left,right,count"]
    for left, right, count in zip(edges[:-1], edges[1:], counts):
        lines.append(f"{_fmt(left)},{_fmt(right)},{int(count)}")
    return "\n".join(lines) + "\n"


def _write(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info("wrote %s", path)
    return path


def write_histogram(path: Union[str, Path], a1: Sequence[float], g: int) -> Path:
    """Write the a1 histogram CSV."""
    return _write(path, render_histogram(*histogram(a1, g)))


def write_report(path: Union[str, Path], report: MomentReport) -> Path:
    """Write a MomentReport in its text form."""
    return _write(path, report.render())


def write_verdict(path: Union[str, Path], verdict: MatchVerdict) -> Path:
    """Write verdict.txt."""
    return _write(path, verdict.render())
