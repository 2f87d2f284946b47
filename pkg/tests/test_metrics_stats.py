import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from fronttouch.metrics import (
    mean_alignment_size,
    msd,
    msd_error_rate,
    optimal_alignment_count,
    selection_aggregates,
    text_entry_aggregates,
    wpm,
)
from fronttouch.stats import (
    friedman,
    holm_adjust,
    paired_t,
    rm_anova_1way,
    wilcoxon_signed_rank,
)
from fronttouch.tasks import TrialRecord


# --- wpm ---------------------------------------------------------------------

def test_wpm_formula():
    assert wpm(26, 30.0) == pytest.approx(10.0)


def test_wpm_single_char_is_zero():
    assert wpm(1, 12.3) == 0.0


def test_wpm_rejects_bad_inputs():
    with pytest.raises(ValueError):
        wpm(0, 10.0)
    with pytest.raises(ValueError):
        wpm(10, 0.0)


def test_wpm_paper_anchor_duration():
    # a 27-char phrase at 11.738 wpm implies roughly 26.6 seconds
    implied = (27 - 1) * 12.0 / 11.738
    assert implied == pytest.approx(26.58, abs=0.01)


# --- msd -----------------------------------------------------------------------

def brute_force_alignments(a: str, b: str):
    """All alignments via explicit recursion; returns (min cost, sizes of the
    optimal ones). Exponential; only for short strings."""
    best = {}

    def walk(i, j, cost, size):
        if i == len(a) and j == len(b):
            best.setdefault(cost, []).append(size)
            return
        if i < len(a) and j < len(b):
            walk(i + 1, j + 1, cost + (a[i] != b[j]), size + 1)
        if i < len(a):
            walk(i + 1, j, cost + 1, size + 1)
        if j < len(b):
            walk(i, j + 1, cost + 1, size + 1)

    walk(0, 0, 0, 0)
    min_cost = min(best)
    return min_cost, best[min_cost]


def test_msd_identity():
    assert msd_error_rate("hello", "hello") == 0.0


def test_msd_single_substitution():
    assert msd("hello", "hxllo") == 1
    assert mean_alignment_size("hello", "hxllo") == pytest.approx(5.0)
    assert msd_error_rate("hello", "hxllo") == pytest.approx(20.0)


def test_msd_matches_exhaustive_enumeration():
    rng = random.Random(13)
    alphabet = "abc"
    for _ in range(250):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
        cost, sizes = brute_force_alignments(a, b)
        assert msd(a, b) == cost, (a, b)
        assert optimal_alignment_count(a, b) == len(sizes), (a, b)
        assert mean_alignment_size(a, b) == pytest.approx(sum(sizes) / len(sizes)), (a, b)


def test_msd_error_rate_symmetry():
    rng = random.Random(5)
    for _ in range(50):
        a = "".join(rng.choice("ab") for _ in range(rng.randint(1, 7)))
        b = "".join(rng.choice("ab") for _ in range(rng.randint(1, 7)))
        assert msd_error_rate(a, b) == pytest.approx(msd_error_rate(b, a))


@settings(max_examples=200, deadline=None)
@given(
    st.text(alphabet="abcd", min_size=0, max_size=6),
    st.text(alphabet="abcd", min_size=0, max_size=6),
    st.text(alphabet="abcd", min_size=0, max_size=6),
)
def test_msd_triangle_inequality(a, b, c):
    assert msd(a, c) <= msd(a, b) + msd(b, c)


def test_msd_rejects_empty():
    with pytest.raises(ValueError):
        msd_error_rate("", "abc")


# --- aggregates -------------------------------------------------------------------

def _rec(participant, technique, correct, start, commit, task="menu15", **kw):
    return TrialRecord(
        session_id=f"s{participant}",
        participant=participant,
        technique=technique,
        task=task,
        trial_index=0,
        target_id=1,
        t_start_ms=start,
        t_commit_ms=commit,
        correct=correct,
        error_commits=0 if correct else 1,
        **kw,
    )


def test_accuracy_is_pooled():
    records = [
        _rec(0, "side-gaze", True, 0, 1000),
        _rec(0, "side-gaze", True, 0, 1000),
        _rec(0, "side-gaze", True, 0, 1000),
        _rec(1, "side-gaze", False, 0, 1000),
    ]
    agg = selection_aggregates(records)
    assert agg["side-gaze"]["accuracy_pct"] == pytest.approx(75.0)


def test_mean_time_is_two_level():
    # participant 0 mean 10 s over three trials, participant 1 mean 20 s over one
    records = [
        _rec(0, "side-gaze", True, 0, 9000),
        _rec(0, "side-gaze", True, 0, 10000),
        _rec(0, "side-gaze", True, 0, 11000),
        _rec(1, "side-gaze", True, 0, 20000),
    ]
    agg = selection_aggregates(records)
    assert agg["side-gaze"]["mean_time_s"] == pytest.approx(15.0)


def test_aggregates_reject_empty_and_mixed():
    with pytest.raises(ValueError):
        selection_aggregates([])
    mixed = [
        _rec(0, "side-gaze", True, 0, 1000),
        _rec(0, "side-gaze", True, 0, 1000, task="keyboard", presented="ab", transcription="ab"),
    ]
    with pytest.raises(ValueError):
        selection_aggregates(mixed)


def test_text_entry_aggregates():
    records = [
        _rec(0, "side-gaze", True, 0, 30000, task="keyboard", presented="x" * 26, transcription="x" * 26),
    ]
    agg = text_entry_aggregates(records)
    assert agg["side-gaze"]["mean_wpm"] == pytest.approx(10.0)
    assert agg["side-gaze"]["mean_msd_error_pct"] == 0.0


# --- stats --------------------------------------------------------------------------

ANOVA_EXAMPLE = np.array([
    [7.0, 5.0, 8.0],
    [4.0, 3.0, 6.0],
    [6.0, 4.0, 7.0],
    [8.0, 6.0, 9.0],
    [6.0, 5.0, 8.0],
    [3.0, 2.0, 5.0],
    [5.0, 3.0, 6.0],
    [7.0, 4.0, 8.0],
])
# frozen from statsmodels AnovaRM on the same table
ANOVA_EXPECTED_F = 131.88
ANOVA_EXPECTED_P = 8.264342840192894e-10


def test_rm_anova_matches_worked_example():
    res = rm_anova_1way(ANOVA_EXAMPLE)
    assert res.statistic == pytest.approx(ANOVA_EXPECTED_F, abs=1e-3)
    assert res.p_value == pytest.approx(ANOVA_EXPECTED_P, rel=1e-6)
    assert res.df == (2, 14)


def test_rm_anova_random_vs_statsmodels():
    pd = pytest.importorskip("pandas")
    from statsmodels.stats.anova import AnovaRM

    rng = np.random.default_rng(3)
    for _ in range(5):
        m = rng.normal(size=(6, 4)) + rng.normal(size=(6, 1))
        rows = [
            {"subject": s, "cond": c, "y": m[s, c]}
            for s in range(m.shape[0])
            for c in range(m.shape[1])
        ]
        table = AnovaRM(pd.DataFrame(rows), depvar="y", subject="subject", within=["cond"]).fit().anova_table
        res = rm_anova_1way(m)
        assert res.statistic == pytest.approx(float(table["F Value"].iloc[0]), rel=1e-9)
        assert res.p_value == pytest.approx(float(table["Pr > F"].iloc[0]), rel=1e-9)


def test_paired_t_matches_scipy():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = rng.normal(size=12)
        b = rng.normal(size=12)
        mine = paired_t(a, b)
        ref = sps.ttest_rel(a, b)
        assert mine.statistic == pytest.approx(ref.statistic, rel=1e-12)
        assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-12)


def test_paired_t_zero_variance_raises():
    with pytest.raises(ValueError):
        paired_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])


def test_friedman_matches_scipy():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = rng.normal(size=(9, 3))
        mine = friedman(m)
        ref = sps.friedmanchisquare(*(m[:, j] for j in range(3)))
        assert mine.statistic == pytest.approx(ref.statistic, rel=1e-12)
        assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-12)


def test_wilcoxon_exact_matches_scipy_without_ties():
    rng = np.random.default_rng(21)
    for _ in range(10):
        # distinct absolute differences so scipy's exact mode applies
        d = rng.permutation(np.arange(1, 13)) * rng.choice([-1.0, 1.0], size=12)
        a = np.zeros(12)
        mine = wilcoxon_signed_rank(d, a)
        ref = sps.wilcoxon(d, a, zero_method="wilcox", mode="exact")
        assert mine.statistic == pytest.approx(ref.statistic)
        assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_wilcoxon_exact_matches_sign_enumeration_with_ties():
    # independent oracle: enumerate all 2^n sign assignments
    diffs = np.array([1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 7.0])
    n = len(diffs)
    ranks_abs = sps.rankdata(np.abs(diffs))
    obs_plus = ranks_abs[diffs > 0].sum()
    total = ranks_abs.sum()
    lo = min(obs_plus, total - obs_plus)
    count = 0
    for signs in itertools.product([0, 1], repeat=n):
        w_plus = sum(r for r, s in zip(ranks_abs, signs) if s)
        if w_plus <= lo + 1e-12 or w_plus >= total - lo - 1e-12:
            count += 1
    expected_p = count / 2**n
    mine = wilcoxon_signed_rank(diffs, np.zeros(n))
    assert mine.p_value == pytest.approx(expected_p, rel=1e-12)


def test_wilcoxon_all_zero_differences():
    res = wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0])
    assert res.p_value == 1.0


def test_wilcoxon_normal_branch_for_large_n():
    rng = np.random.default_rng(5)
    a = rng.normal(0.8, 1.0, 40)
    b = rng.normal(0.0, 1.0, 40)
    mine = wilcoxon_signed_rank(a, b)
    ref = sps.wilcoxon(a, b, zero_method="wilcox", mode="approx", correction=False)
    assert mine.p_value == pytest.approx(ref.pvalue, rel=1e-9)
    assert "normal" in mine.method


def test_holm_adjust_hand_example():
    assert holm_adjust([0.01, 0.04, 0.03]) == pytest.approx([0.03, 0.06, 0.06])


def test_holm_adjust_properties():
    rng = random.Random(3)
    for _ in range(100):
        m = rng.randint(1, 8)
        ps = [rng.random() for _ in range(m)]
        adj = holm_adjust(ps)
        for p, q in zip(ps, adj):
            assert q >= p - 1e-15
            assert q <= min(1.0, m * p) + 1e-12  # never above Bonferroni
        order = sorted(range(m), key=lambda i: ps[i])
        sorted_adj = [adj[i] for i in order]
        assert all(x <= y + 1e-15 for x, y in zip(sorted_adj, sorted_adj[1:]))


def test_t_and_wilcoxon_agree_on_separated_data():
    rng = np.random.default_rng(17)
    a = rng.normal(2.0, 1.0, 20)
    b = rng.normal(0.0, 1.0, 20)
    assert paired_t(a, b).p_value < 0.01
    assert wilcoxon_signed_rank(a, b).p_value < 0.01
