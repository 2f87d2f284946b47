"""Statistical tests used by the study analyses.

The test statistics are computed here directly; tail probabilities come from
scipy's distribution CDFs. Wilcoxon uses the exact signed-rank distribution
(a subset-sum convolution over the observed ranks) up to n = 25 and the
tie-corrected normal approximation above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    df: tuple[float, ...] = ()
    method: str = ""


def paired_t(a, b) -> TestResult:
    """Two-sided paired t-test."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length vectors")
    n = a.size
    if n < 2:
        raise ValueError("need at least two pairs")
    d = a - b
    sd = d.std(ddof=1)
    if sd == 0.0:
        raise ValueError("zero variance of differences")
    t = d.mean() / (sd / math.sqrt(n))
    p = 2.0 * _sps.t.sf(abs(t), n - 1)
    return TestResult(float(t), float(p), (n - 1,), "paired t")


def rm_anova_1way(matrix) -> TestResult:
    """One-way repeated-measures ANOVA on a participants x conditions matrix."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise ValueError("matrix must be participants x conditions")
    n, k = m.shape
    if n < 2 or k < 2:
        raise ValueError("need at least two participants and two conditions")
    grand = m.mean()
    ss_conditions = n * ((m.mean(axis=0) - grand) ** 2).sum()
    ss_subjects = k * ((m.mean(axis=1) - grand) ** 2).sum()
    ss_total = ((m - grand) ** 2).sum()
    ss_error = ss_total - ss_conditions - ss_subjects
    df1 = k - 1
    df2 = (k - 1) * (n - 1)
    ms_conditions = ss_conditions / df1
    ms_error = ss_error / df2
    if ms_error == 0.0:
        raise ValueError("zero error variance")
    f = ms_conditions / ms_error
    p = _sps.f.sf(f, df1, df2)
    return TestResult(float(f), float(p), (df1, df2), "repeated-measures ANOVA")


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    sorted_vals = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def friedman(matrix) -> TestResult:
    """Friedman rank-sum test (chi-square approximation, tie-corrected)."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise ValueError("matrix must be participants x conditions")
    n, k = m.shape
    if n < 2 or k < 2:
        raise ValueError("need at least two participants and two conditions")
    ranks = np.vstack([_midranks(row) for row in m])
    rank_sums = ranks.sum(axis=0)
    chi2 = 12.0 / (n * k * (k + 1)) * (rank_sums**2).sum() - 3.0 * n * (k + 1)
    # tie correction
    tie_term = 0.0
    for row in m:
        _, counts = np.unique(row, return_counts=True)
        tie_term += float((counts**3 - counts).sum())
    correction = 1.0 - tie_term / (n * k * (k * k - 1))
    if correction <= 0.0:
        return TestResult(0.0, 1.0, (k - 1,), "friedman")
    chi2 /= correction
    p = _sps.chi2.sf(chi2, k - 1)
    return TestResult(float(chi2), float(p), (k - 1,), "friedman")


def _wilcoxon_exact_p(scaled_ranks: list[int], w2_obs: int) -> float:
    """Two-sided exact p for the signed-rank statistic.

    scaled_ranks are the midranks times two (integers even with ties);
    w2_obs is twice the observed positive-rank sum. Convolves the subset-sum
    distribution of the positive rank sum under random signs.
    """
    total = sum(scaled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in scaled_ranks:
        for s in range(total - r, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
    n_total = 2 ** len(scaled_ranks)
    lo = min(w2_obs, total - w2_obs)
    tail = sum(counts[: lo + 1]) + sum(counts[total - lo :])
    return min(1.0, tail / n_total)


def wilcoxon_signed_rank(a, b) -> TestResult:
    """Two-sided Wilcoxon signed-rank test; zero differences are dropped.

    Exact distribution for n <= 25 (ties handled through doubled midranks),
    normal approximation with tie correction above. All-zero differences
    yield p = 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length vectors")
    d = a - b
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return TestResult(0.0, 1.0, (0,), "wilcoxon signed-rank")
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if n <= 25:
        scaled = [int(round(2 * r)) for r in ranks]
        p = _wilcoxon_exact_p(scaled, int(round(2 * w_plus)))
        return TestResult(w, p, (n,), "wilcoxon signed-rank (exact)")
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(np.abs(d), return_counts=True)
    tie_term = float((counts**3 - counts).sum())
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    z = (w_plus - mean) / math.sqrt(var)
    p = 2.0 * _sps.norm.sf(abs(z))
    return TestResult(w, min(1.0, p), (n,), "wilcoxon signed-rank (normal)")


def holm_adjust(p_values) -> list[float]:
    """Holm-Bonferroni step-down adjustment, returned in the input order."""
    ps = list(map(float, p_values))
    m = len(ps)
    if m == 0:
        return []
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        candidate = (m - rank) * ps[idx]
        running = max(running, candidate)
        adjusted[idx] = min(1.0, running)
    return adjusted
