"""The three study tasks, trial records, condition ordering, and phrases.

Task runners are event consumers: the session engine feeds them select /
select-miss events and they produce TrialRecords, recolor targets, and keep
the keyboard transcription. One runner instance covers one session.
"""

from __future__ import annotations

import csv
import random
import string
from dataclasses import dataclass, field
from importlib import resources

from .scene import Scene

TASK_KINDS = ("binary", "menu15", "keyboard")

CSV_HEADER = [
    "session_id",
    "participant",
    "technique",
    "task",
    "trial",
    "target",
    "start_ms",
    "commit_ms",
    "correct",
    "errors",
    "presented",
    "transcribed",
]


class InsufficientCorpus(ValueError):
    """Not enough phrases satisfy the requested length bounds."""


class EventUnderflow(RuntimeError):
    """The event stream ended in the middle of a trial."""


@dataclass(frozen=True)
class TaskSpec:
    kind: str  # binary / menu15 / keyboard
    technique: str
    seed: int = 0
    binary_trials: int = 20
    menu_sessions: int = 3
    menu_trials_per_session: int = 14
    keyboard_phrases: int = 5

    def __post_init__(self) -> None:
        if self.kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")


@dataclass
class TrialRecord:
    session_id: str
    participant: int
    technique: str
    task: str
    trial_index: int
    target_id: int
    t_start_ms: int
    t_commit_ms: int
    correct: bool
    error_commits: int
    presented: str | None = None
    transcription: str | None = None

    def __post_init__(self) -> None:
        if self.t_commit_ms < self.t_start_ms:
            raise ValueError("trial must not end before it starts")
        if self.error_commits < 0:
            raise ValueError("error count must be non-negative")
        if (self.task == "keyboard") != (self.transcription is not None):
            raise ValueError("transcription present iff keyboard task")

    def duration_s(self) -> float:
        return (self.t_commit_ms - self.t_start_ms) / 1000.0

    def to_csv_row(self) -> list[str]:
        return [
            self.session_id,
            str(self.participant),
            self.technique,
            self.task,
            str(self.trial_index),
            str(self.target_id),
            str(self.t_start_ms),
            str(self.t_commit_ms),
            "true" if self.correct else "false",
            str(self.error_commits),
            self.presented or "",
            self.transcription if self.transcription is not None else "",
        ]

    @staticmethod
    def from_csv_row(row: list[str]) -> "TrialRecord":
        return TrialRecord(
            session_id=row[0],
            participant=int(row[1]),
            technique=row[2],
            task=row[3],
            trial_index=int(row[4]),
            target_id=int(row[5]),
            t_start_ms=int(row[6]),
            t_commit_ms=int(row[7]),
            correct=row[8] == "true",
            error_commits=int(row[9]),
            presented=row[10] or None,
            transcription=row[11] if row[3] == "keyboard" else None,
        )


def write_records_csv(path, records: list[TrialRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(r.to_csv_row())


def read_records_csv(path) -> list[TrialRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        return [TrialRecord.from_csv_row(row) for row in reader]


# --- condition ordering -------------------------------------------------------

def latin_square(n: int) -> list[list[int]]:
    """Condition-order matrix: balanced (Williams) for even n, cyclic for odd.

    Every condition appears exactly once per row and per column; for even n
    each ordered adjacency pair also appears exactly once.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return [[0]]
    if n % 2 == 0:
        first = [0]
        lo, hi = 1, n - 1
        for k in range(1, n):
            first.append(hi if k % 2 else lo)
            if k % 2:
                hi -= 1
            else:
                lo += 1
        return [[(c + i) % n for c in first] for i in range(n)]
    return [[(i + j) % n for j in range(n)] for i in range(n)]


# --- phrases -------------------------------------------------------------------

_PHRASE_ALPHABET = set(string.ascii_lowercase + " ")


@dataclass(frozen=True)
class PhraseSet:
    phrases: tuple[str, ...]
    source: str = "bundled"

    def __post_init__(self) -> None:
        for p in self.phrases:
            if not p or set(p) - _PHRASE_ALPHABET:
                raise ValueError(f"phrase {p!r} is not lowercase letters and spaces")


def load_phrase_set(path=None) -> PhraseSet:
    """Phrase corpus: UTF-8 text, one phrase per line."""
    if path is None:
        text = resources.files("fronttouch.data").joinpath("phrases.txt").read_text()
        source = "bundled"
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        source = str(path)
    phrases = tuple(line.strip() for line in text.splitlines() if line.strip())
    return PhraseSet(phrases, source)


def sample_phrases(
    phrase_set: PhraseSet,
    count: int,
    seed: int,
    length_bounds: tuple[int, int] = (25, 28),
    exclude: tuple[str, ...] = (),
) -> list[str]:
    lo, hi = length_bounds
    pool = [p for p in phrase_set.phrases if lo <= len(p) <= hi and p not in exclude]
    if len(pool) < count:
        raise InsufficientCorpus(
            f"only {len(pool)} phrases with length in [{lo}, {hi}] (need {count})"
        )
    return random.Random(seed).sample(pool, count)


# --- task runners ---------------------------------------------------------------

@dataclass
class RunnerUpdate:
    completed: list[TrialRecord] = field(default_factory=list)
    scene_changed: bool = False
    key_click: bool = False
    done: bool = False


class TaskRunner:
    """Consumes select / miss events; subclasses score one session."""

    def __init__(self, scene: Scene, session_id: str, participant: int, technique: str) -> None:
        self.scene = scene
        self.session_id = session_id
        self.participant = participant
        self.technique = technique
        self.records: list[TrialRecord] = []

    def on_select(self, node_id: int, t_ms: int) -> RunnerUpdate:
        raise NotImplementedError

    def on_miss(self, t_ms: int) -> RunnerUpdate:
        raise NotImplementedError

    def is_done(self) -> bool:
        raise NotImplementedError

    def goal_node_id(self) -> int | None:
        """Node the synthetic user should aim for next (None when done)."""
        raise NotImplementedError

    def finalize(self, reason: str = "end of stream"):
        """Called when the stream ends; a trial in flight counts as abandoned."""
        return None


class MenuTaskRunner(TaskRunner):
    """One menu session: gate on the middle button, then 14 targets, each
    non-middle button exactly once in seeded random order."""

    MIDDLE = 7

    def __init__(self, scene, session_id, participant, technique, seed: int, trials: int = 14) -> None:
        super().__init__(scene, session_id, participant, technique)
        labels = [n.role.value for n in scene.find_by_role("button")]
        candidates = sorted(label for label in labels if label != self.MIDDLE)
        order = candidates[:]
        random.Random(seed).shuffle(order)
        self.targets = order[:trials]
        self.trial_index = 0
        self.in_trial = False
        self.t_start = 0
        self.errors = 0
        self.abandoned = 0
        self._recolor()

    def _button(self, label: int):
        return self.scene.node_by_role_value("button", label)

    def _recolor(self) -> None:
        for node in self.scene.find_by_role("button"):
            node.color = "neutral"
        if self.is_done():
            return
        if self.in_trial:
            self._button(self.targets[self.trial_index]).color = "red"
        else:
            self._button(self.MIDDLE).color = "blue"

    def is_done(self) -> bool:
        return self.trial_index >= len(self.targets)

    def goal_node_id(self):
        if self.is_done():
            return None
        label = self.targets[self.trial_index] if self.in_trial else self.MIDDLE
        return self._button(label).id

    def on_select(self, node_id: int, t_ms: int) -> RunnerUpdate:
        if self.is_done():
            return RunnerUpdate()
        role = self.scene.nodes[node_id].role
        label = role.value if role is not None and role.kind == "button" else None
        if not self.in_trial:
            if label == self.MIDDLE:
                self.in_trial = True
                self.t_start = t_ms
                self.errors = 0
                self._recolor()
                return RunnerUpdate(scene_changed=True)
            return RunnerUpdate()  # stray commit before the gate: not scored
        target = self.targets[self.trial_index]
        if label == target:
            record = TrialRecord(
                session_id=self.session_id,
                participant=self.participant,
                technique=self.technique,
                task="menu15",
                trial_index=self.trial_index,
                target_id=target,
                t_start_ms=self.t_start,
                t_commit_ms=t_ms,
                correct=self.errors == 0,
                error_commits=self.errors,
            )
            self.records.append(record)
            self.trial_index += 1
            self.in_trial = False
            self._recolor()
            return RunnerUpdate(completed=[record], scene_changed=True, done=self.is_done())
        self.errors += 1
        return RunnerUpdate()

    def on_miss(self, t_ms: int) -> RunnerUpdate:
        if self.in_trial and not self.is_done():
            self.errors += 1
        return RunnerUpdate()

    def finalize(self, reason: str = "end of stream"):
        if self.in_trial and not self.is_done():
            self.abandoned += 1
            self.in_trial = False
        return None


class BinaryTaskRunner(TaskRunner):
    """Alternating-plane selection; each successful selection both scores a
    trial and re-arms the other plane as the next target."""

    def __init__(self, scene, session_id, participant, technique, seed: int, trials: int = 20) -> None:
        super().__init__(scene, session_id, participant, technique)
        self.trials = trials
        planes = sorted(scene.find_by_role("plane"), key=lambda n: n.role.value)
        self.planes = planes
        self.red_index = random.Random(seed).randint(0, 1)
        self.trial_index = 0
        self.t_prev = 0
        self.errors = 0
        self.abandoned = 0
        self._recolor()

    def _recolor(self) -> None:
        for i, plane in enumerate(self.planes):
            plane.color = "red" if i == self.red_index else "blue"

    def is_done(self) -> bool:
        return self.trial_index >= self.trials

    def goal_node_id(self):
        if self.is_done():
            return None
        return self.planes[self.red_index].id

    def on_select(self, node_id: int, t_ms: int) -> RunnerUpdate:
        if self.is_done():
            return RunnerUpdate()
        role = self.scene.nodes[node_id].role
        if role is None or role.kind != "plane":
            self.errors += 1
            return RunnerUpdate()
        if role.value == self.planes[self.red_index].role.value:
            record = TrialRecord(
                session_id=self.session_id,
                participant=self.participant,
                technique=self.technique,
                task="binary",
                trial_index=self.trial_index,
                target_id=self.red_index,
                t_start_ms=self.t_prev,
                t_commit_ms=t_ms,
                correct=self.errors == 0,
                error_commits=self.errors,
            )
            self.records.append(record)
            self.trial_index += 1
            self.t_prev = t_ms
            self.errors = 0
            self.red_index = 1 - self.red_index
            self._recolor()
            return RunnerUpdate(completed=[record], scene_changed=True, done=self.is_done())
        self.errors += 1
        return RunnerUpdate()

    def on_miss(self, t_ms: int) -> RunnerUpdate:
        if not self.is_done():
            self.errors += 1
        return RunnerUpdate()

    def finalize(self, reason: str = "end of stream"):
        if not self.is_done() and (self.errors or self.t_prev):
            self.abandoned += 1
        return None


class KeyboardTaskRunner(TaskRunner):
    """Phrase transcription: key commits fold into the transcription text;
    the done key closes the phrase."""

    def __init__(self, scene, session_id, participant, technique, phrases: list[str]) -> None:
        super().__init__(scene, session_id, participant, technique)
        self.phrases = list(phrases)
        self.phrase_index = 0
        self.transcription = ""
        self.t_first: int | None = None
        self.t_last: int | None = None
        self.errors = 0
        self.abandoned = 0
        self._sync_text()

    def _sync_text(self) -> None:
        presented = self.phrases[self.phrase_index] if not self.is_done() else ""
        self.scene.node_by_role_value("text", "presented").text = presented
        self.scene.node_by_role_value("text", "transcribed").text = self.transcription

    def is_done(self) -> bool:
        return self.phrase_index >= len(self.phrases)

    @property
    def presented(self) -> str:
        return self.phrases[self.phrase_index]

    def goal_key(self) -> str | None:
        if self.is_done():
            return None
        if len(self.transcription) < len(self.presented):
            return self.presented[len(self.transcription)]
        return "done"

    def goal_node_id(self):
        key = self.goal_key()
        if key is None:
            return None
        return self.scene.node_by_role_value("key", key).id

    def on_select(self, node_id: int, t_ms: int) -> RunnerUpdate:
        if self.is_done():
            return RunnerUpdate()
        role = self.scene.nodes[node_id].role
        if role is None or role.kind != "key":
            self.errors += 1
            return RunnerUpdate()
        key = role.value
        if key == "done":
            record = TrialRecord(
                session_id=self.session_id,
                participant=self.participant,
                technique=self.technique,
                task="keyboard",
                trial_index=self.phrase_index,
                target_id=self.phrase_index,
                t_start_ms=self.t_first if self.t_first is not None else t_ms,
                t_commit_ms=self.t_last if self.t_last is not None else t_ms,
                correct=self.transcription == self.presented,
                error_commits=self.errors,
                presented=self.presented,
                transcription=self.transcription,
            )
            self.records.append(record)
            self.phrase_index += 1
            self.transcription = ""
            self.t_first = None
            self.t_last = None
            self.errors = 0
            self._sync_text()
            return RunnerUpdate(completed=[record], scene_changed=True, key_click=True, done=self.is_done())
        if key == "backspace":
            self.transcription = self.transcription[:-1]
        else:
            self.transcription += key
        if self.t_first is None:
            self.t_first = t_ms
        self.t_last = t_ms
        self._sync_text()
        return RunnerUpdate(scene_changed=True, key_click=True)

    def on_miss(self, t_ms: int) -> RunnerUpdate:
        if not self.is_done():
            self.errors += 1
        return RunnerUpdate()

    def finalize(self, reason: str = "end of stream"):
        if not self.is_done() and (self.transcription or self.t_first is not None):
            self.abandoned += 1
        return None
