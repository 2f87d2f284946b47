"""Text-entry and selection metrics.

WPM uses the standard five-characters-per-word rate with the first character
excluded from the count. The error rate divides the minimum string distance
by the mean size of all optimal alignments, counted exactly through the DP
table rather than by enumerating alignments.
"""

from __future__ import annotations

from collections import defaultdict

from .tasks import TrialRecord


def wpm(transcribed_len: int, duration_s: float) -> float:
    """Words per minute: ((len - 1) / seconds) * 60 / 5."""
    if transcribed_len < 1:
        raise ValueError("transcribed length must be at least 1")
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    return (transcribed_len - 1) / duration_s * 12.0


def msd(a: str, b: str) -> int:
    """Minimum string distance: unit-cost insert / delete / substitute."""
    d, _, _ = _msd_tables(a, b)
    return d[len(a)][len(b)]


def mean_alignment_size(a: str, b: str) -> float:
    """Average length over all optimal alignments of a and b."""
    _, counts, sizes = _msd_tables(a, b)
    return sizes[len(a)][len(b)] / counts[len(a)][len(b)]


def optimal_alignment_count(a: str, b: str) -> int:
    _, counts, _ = _msd_tables(a, b)
    return counts[len(a)][len(b)]


def _msd_tables(a: str, b: str):
    """DP tables: distance, optimal-alignment count, and summed alignment
    sizes (every optimal predecessor extends each of its alignments by one
    column, so sizes accumulate as S_pred + N_pred)."""
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    count = [[0] * (m + 1) for _ in range(n + 1)]
    size = [[0] * (m + 1) for _ in range(n + 1)]
    count[0][0] = 1
    for i in range(1, n + 1):
        dist[i][0] = i
        count[i][0] = 1
        size[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
        count[0][j] = 1
        size[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            sub = dist[i - 1][j - 1] + (a[i - 1] != b[j - 1])
            dele = dist[i - 1][j] + 1
            ins = dist[i][j - 1] + 1
            best = min(sub, dele, ins)
            dist[i][j] = best
            c = s = 0
            if sub == best:
                c += count[i - 1][j - 1]
                s += size[i - 1][j - 1] + count[i - 1][j - 1]
            if dele == best:
                c += count[i - 1][j]
                s += size[i - 1][j] + count[i - 1][j]
            if ins == best:
                c += count[i][j - 1]
                s += size[i][j - 1] + count[i][j - 1]
            count[i][j] = c
            size[i][j] = s
    return dist, count, size


def msd_error_rate(presented: str, transcribed: str) -> float:
    """MSD divided by the mean optimal-alignment size, as a percentage."""
    if not presented or not transcribed:
        raise ValueError("both strings must be non-empty")
    distance = msd(presented, transcribed)
    if distance == 0:
        return 0.0
    return distance / mean_alignment_size(presented, transcribed) * 100.0


# --- aggregates -----------------------------------------------------------------

def _two_level_mean(values_by_participant: dict[int, list[float]]) -> float:
    """Mean per participant, then across participants."""
    per = [sum(v) / len(v) for v in values_by_participant.values()]
    return sum(per) / len(per)


def selection_aggregates(records: list[TrialRecord]) -> dict[str, dict]:
    """Per-technique mean selection time (two-level) and pooled accuracy."""
    if not records:
        raise ValueError("no records")
    kinds = {r.task for r in records}
    if len(kinds) != 1:
        raise ValueError(f"records mix task kinds: {sorted(kinds)}")
    by_tech: dict[str, list[TrialRecord]] = defaultdict(list)
    for r in records:
        by_tech[r.technique].append(r)
    out: dict[str, dict] = {}
    for tech, recs in sorted(by_tech.items()):
        times: dict[int, list[float]] = defaultdict(list)
        for r in recs:
            times[r.participant].append(r.duration_s())
        out[tech] = {
            "mean_time_s": _two_level_mean(times),
            "accuracy_pct": 100.0 * sum(r.correct for r in recs) / len(recs),
            "trials": len(recs),
            "participants": len(times),
        }
    return out


def text_entry_aggregates(records: list[TrialRecord]) -> dict[str, dict]:
    """Per-technique mean WPM and MSD error rate for keyboard records."""
    if not records:
        raise ValueError("no records")
    by_tech: dict[str, list[TrialRecord]] = defaultdict(list)
    for r in records:
        if r.task != "keyboard":
            raise ValueError("text entry aggregates expect keyboard records")
        by_tech[r.technique].append(r)
    out: dict[str, dict] = {}
    for tech, recs in sorted(by_tech.items()):
        wpms: dict[int, list[float]] = defaultdict(list)
        errs: dict[int, list[float]] = defaultdict(list)
        for r in recs:
            if len(r.transcription) >= 1 and r.t_commit_ms > r.t_start_ms:
                wpms[r.participant].append(wpm(len(r.transcription), r.duration_s()))
            if r.transcription:
                errs[r.participant].append(msd_error_rate(r.presented, r.transcription))
            else:
                errs[r.participant].append(100.0)  # typed nothing
        out[tech] = {
            "mean_wpm": _two_level_mean(wpms) if wpms else 0.0,
            "mean_msd_error_pct": _two_level_mean(errs) if errs else 0.0,
            "phrases": len(recs),
            "participants": len({r.participant for r in recs}),
        }
    return out
