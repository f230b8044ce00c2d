"""Fleiss' kappa for a fixed rater count over categorical judgments."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

BANDS = [
    (0.0, "poor"),
    (0.20, "slight"),
    (0.40, "fair"),
    (0.60, "moderate"),
    (0.80, "substantial"),
    (1.0, "almost perfect"),
]


class DegenerateAgreementError(ValueError):
    """All raters used one single category: chance agreement is 1, kappa undefined."""


@dataclass
class RatingsMatrix:
    """N subjects x k categories; cell (i, j) counts raters choosing j for i."""

    counts: list[list[int]]

    def __post_init__(self) -> None:
        if not self.counts:
            raise ValueError("ratings matrix is empty")
        k = len(self.counts[0])
        if k < 2:
            raise ValueError("need at least 2 categories")
        n = sum(self.counts[0])
        for i, row in enumerate(self.counts):
            if len(row) != k:
                raise ValueError(f"row {i} has {len(row)} categories, expected {k}")
            if any(c < 0 for c in row):
                raise ValueError(f"row {i} has negative counts")
            if sum(row) != n:
                raise ValueError(f"row {i} sums to {sum(row)}, expected {n}")
        if n < 2:
            raise ValueError("need at least 2 raters per subject")
        self.n_subjects = len(self.counts)
        self.n_raters = n
        self.n_categories = k

    @classmethod
    def from_tsv(cls, path) -> "RatingsMatrix":
        rows: list[list[int]] = []
        for line_no, raw in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([int(v) for v in line.split("\t")])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-integer rating count") from None
        return cls(rows)


def interpretation_band(kappa: float) -> str:
    if kappa <= 0:
        return "poor"
    for upper, label in BANDS[1:]:
        if kappa <= upper:
            return label
    return "almost perfect"


def fleiss_kappa(m: RatingsMatrix) -> tuple[float, str]:
    """Chance-corrected agreement and its interpretation band.

    Per-subject agreement is (sum_j n_ij^2 - n) / (n (n-1)); expected chance
    agreement is the sum of squared category proportions. Raises
    :class:`DegenerateAgreementError` when every rating lands in a single
    category, which leaves kappa undefined.
    """
    n = m.n_raters
    big_n = m.n_subjects

    p_i_sum = 0.0
    column_sums = [0] * m.n_categories
    for row in m.counts:
        p_i_sum += (sum(c * c for c in row) - n) / (n * (n - 1))
        for j, c in enumerate(row):
            column_sums[j] += c
    p_bar = p_i_sum / big_n

    total = big_n * n
    p_e = sum((c / total) ** 2 for c in column_sums)
    if p_e >= 1.0:
        raise DegenerateAgreementError("degenerate: no category variance")
    kappa = (p_bar - p_e) / (1 - p_e)
    return kappa, interpretation_band(kappa)
