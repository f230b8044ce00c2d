"""Sampling produced cells for manual judgment and estimating precision.

Sampling is deterministic given a seed: cells are canonically sorted, every
pair is ranked by the SHA-256 digest of seed and pair, and the n smallest
digests win. That keeps samples reproducible across runs and Python
versions without pickling RNG state, and item ids are content hashes so
judgments stay attached to their cells across re-runs.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable, Sequence

from .alignment import Correspondence

log = logging.getLogger(__name__)

VERDICTS = ("same", "different", "unsure")


def max_error(n: int, confidence: float = 0.95) -> float:
    """Worst-case half-width of a proportion estimate from n judgments.

    Uses the normal approximation at p=0.5, the proportion with the widest
    interval, so the bound holds whatever the true precision is.
    """
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
    return z * (0.25 / n) ** 0.5


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must be in [0, {trials}], got {successes}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = p + z2 / (2.0 * trials)
    spread = z * (p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) ** 0.5
    # the exact interval brackets p inside [0, 1]; clamp away rounding noise
    low = min(max((centre - spread) / denom, 0.0), p)
    high = max(min((centre + spread) / denom, 1.0), p)
    return low, high


def item_id(matcher: str, task: str, source: str, target: str) -> str:
    """Stable identifier for a sampled cell, independent of sampling order."""
    digest = hashlib.sha256("\x1f".join((matcher, task, source, target)).encode("utf-8"))
    return digest.hexdigest()[:16]


@dataclass(frozen=True)
class SampleItem:
    id: str
    correspondence: Correspondence
    task: str
    matcher: str


def _rank(seed: int | str, pair: tuple[str, str]) -> bytes:
    return hashlib.sha256(f"{seed}|{pair[0]}|{pair[1]}".encode("utf-8")).digest()


def sample(
    cells: Iterable[Correspondence],
    n: int,
    seed: int | str,
    matcher: str = "",
    task: str = "",
) -> list[SampleItem]:
    """Draw n cells without replacement, deterministically for a given seed.

    Requesting more cells than exist returns them all; duplicate pairs are
    drawn at most once. The draw depends only on the cell set, never on the
    order the cells arrived in.
    """
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    by_pair = {c.pair: c for c in cells}
    if not by_pair:
        log.warning("sampling from an empty alignment: returning no items")
        return []
    ranked = sorted(by_pair, key=lambda p: (_rank(seed, p), p))
    return [
        SampleItem(item_id(matcher, task, s, t), by_pair[(s, t)], task, matcher)
        for s, t in ranked[:n]
    ]


@dataclass(frozen=True)
class Judgment:
    item_id: str
    verdict: str
    annotator: str
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")


def resolve(judgments: Sequence[Judgment]) -> dict[str, str]:
    """Collapse raw judgments to one verdict per item.

    Per annotator the latest judgment wins (a revision replaces the earlier
    one); across annotators the majority decides, with ties falling back to
    "unsure".
    """
    latest: dict[tuple[str, str], Judgment] = {}
    for j in judgments:
        key = (j.item_id, j.annotator)
        if key not in latest or j.timestamp >= latest[key].timestamp:
            latest[key] = j

    votes: dict[str, dict[str, int]] = {}
    for j in latest.values():
        votes.setdefault(j.item_id, {v: 0 for v in VERDICTS})[j.verdict] += 1

    resolved: dict[str, str] = {}
    for item, tally in votes.items():
        same, different = tally["same"], tally["different"]
        if same > different:
            resolved[item] = "same"
        elif different > same:
            resolved[item] = "different"
        else:
            resolved[item] = "unsure"
    return resolved


@dataclass(frozen=True)
class PrecisionEstimate:
    point: float
    interval: tuple[float, float]
    n_judged: int
    n_unsure: int
    successes: int
    confidence: float


def estimate_precision(verdicts: Iterable[str], confidence: float = 0.95) -> PrecisionEstimate:
    """Point estimate and Wilson interval from per-item verdicts.

    "unsure" verdicts are excluded from the judged count but reported, so
    the caller can see how much of the sample actually got decided.
    """
    successes = failures = unsure = 0
    for v in verdicts:
        if v == "same":
            successes += 1
        elif v == "different":
            failures += 1
        elif v == "unsure":
            unsure += 1
        else:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {v!r}")
    decided = successes + failures
    if decided == 0:
        raise ValueError("no decisive judgments")
    return PrecisionEstimate(
        successes / decided,
        wilson_interval(successes, decided, confidence),
        decided,
        unsure,
        successes,
        confidence,
    )
