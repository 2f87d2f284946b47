import random

import pytest

from fronttouch.config import TECHNIQUES, TechniqueConfig
from fronttouch.mapping import MappingMode, MappingModel
from fronttouch.techniques import (
    Commit,
    CursorMoved,
    HeadPose,
    OffScreenCancel,
    TouchEvent,
    format_transition_table,
    legal_transitions,
    make_technique,
    technique_pad,
)

from technique_oracle import TableReplayer, abstract_machine_actions, legal_event_sequences


def make_model(mode=MappingMode.ABSOLUTE, fraction=0.25):
    return MappingModel(ax=40.0, bx=1280.0, ay=-35.0, by=720.0, mode=mode, correction_fraction=fraction)


DEFAULT_MODE = {
    "side-gaze": None,
    "front-gaze": None,
    "front-world": MappingMode.ABSOLUTE,
    "front-view": MappingMode.ABSOLUTE,
    "two-fingers": MappingMode.ABSOLUTE,
    "drag-n-tap": MappingMode.RELATIVE,
}


def machine_for(technique, cfg=None):
    mode = DEFAULT_MODE[technique]
    model = make_model(mode) if mode is not None else None
    return make_technique(technique, model, cfg)


def ev(t, action, finger, x, y, source="front"):
    return TouchEvent(t_ms=t, action=action, finger=finger, x=x, y=y, source=source)


# --- scenario tests ---------------------------------------------------------

def test_two_fingers_tap_commits_once():
    m = machine_for("two-fingers")
    actions = []
    actions += m.step(ev(0, "down", 0, 1000, 700))
    actions += m.step(ev(100, "move", 0, 1040, 700))
    actions += m.step(ev(300, "down", 1, 1500, 800))
    actions += m.step(ev(400, "up", 1, 1500, 800))
    commits = [a for a in actions if isinstance(a, Commit)]
    assert len(commits) == 1
    # commit position sampled at the tap finger's down instant
    assert commits[0].theta1 == pytest.approx((1040 - 1280) / 40.0)
    after = m.step(ev(600, "up", 0, 1040, 700))
    assert not any(isinstance(a, Commit) for a in after)


def test_two_fingers_no_commit_if_dragger_lifts_first():
    m = machine_for("two-fingers")
    out = []
    out += m.step(ev(0, "down", 0, 1000, 700))
    out += m.step(ev(100, "down", 1, 1500, 800))
    out += m.step(ev(150, "up", 0, 1000, 700))
    out += m.step(ev(200, "up", 1, 1500, 800))
    assert not any(isinstance(a, Commit) for a in out)


def test_two_fingers_single_finger_tap_never_commits():
    m = machine_for("two-fingers")
    out = []
    out += m.step(ev(0, "down", 0, 1000, 700))
    out += m.step(ev(100, "up", 0, 1000, 700))
    assert not any(isinstance(a, Commit) for a in out)


def test_drag_n_tap_retap_commits_at_frozen_cursor():
    m = machine_for("drag-n-tap")
    m.step(ev(0, "down", 0, 1000, 700))
    m.step(ev(300, "move", 0, 1400, 700))  # drag +400 px -> +10 degrees
    m.step(ev(400, "up", 0, 1400, 700))
    frozen = m.cursor
    assert frozen[0] == pytest.approx(10.0)
    out = []
    out += m.step(ev(600, "down", 0, 1410, 705))
    out += m.step(ev(700, "up", 0, 1410, 705))
    commits = [a for a in out if isinstance(a, Commit)]
    assert len(commits) == 1
    assert (commits[0].theta1, commits[0].theta2) == frozen
    # the committing tap never moved the cursor
    assert not any(isinstance(a, CursorMoved) for a in out)


def test_drag_n_tap_expired_window_no_commit():
    m = machine_for("drag-n-tap")
    m.step(ev(0, "down", 0, 1000, 700))
    m.step(ev(100, "move", 0, 1100, 700))
    m.step(ev(200, "up", 0, 1100, 700))
    out = []
    out += m.step(ev(200 + 401, "down", 0, 1100, 700))
    out += m.step(ev(200 + 501, "up", 0, 1100, 700))
    assert not any(isinstance(a, Commit) for a in out)


def test_drag_n_tap_never_commits_while_dragging():
    m = machine_for("drag-n-tap")
    out = []
    out += m.step(ev(0, "down", 0, 1000, 700))
    for i in range(10):
        out += m.step(ev(50 + 40 * i, "move", 0, 1000 + 30 * i, 700))
    assert not any(isinstance(a, Commit) for a in out)


def test_side_gaze_commit_is_centered_and_ignores_front_pad():
    m = machine_for("side-gaze")
    assert m.step(ev(0, "down", 0, 100, 100, source="front")) == []
    assert m.step(ev(50, "up", 0, 100, 100, source="front")) == []
    m.step(HeadPose(60, 20.0, -5.0))
    out = []
    out += m.step(ev(100, "down", 0, 900, 400, source="side"))
    out += m.step(ev(180, "up", 0, 900, 400, source="side"))
    commits = [a for a in out if isinstance(a, Commit)]
    assert len(commits) == 1
    assert (commits[0].theta1, commits[0].theta2) == (0.0, 0.0)


def test_gaze_touch_moves_never_move_cursor():
    for name in ("side-gaze", "front-gaze"):
        m = machine_for(name)
        pad = technique_pad(name)
        out = []
        out += m.step(ev(0, "down", 0, 500, 500, source=pad))
        out += m.step(ev(40, "move", 0, 900, 900, source=pad))
        out += m.step(ev(80, "up", 0, 900, 900, source=pad))
        assert not any(isinstance(a, CursorMoved) for a in out)
        assert m.cursor == (0.0, 0.0)


def test_front_world_tap_commits_slow_lift_does_not():
    m = machine_for("front-world")
    out = []
    out += m.step(ev(0, "down", 0, 1320, 700))
    out += m.step(ev(100, "up", 0, 1320, 700))
    commits = [a for a in out if isinstance(a, Commit)]
    assert len(commits) == 1
    assert commits[0].theta1 == pytest.approx(1.0)
    m2 = machine_for("front-world")
    out2 = []
    out2 += m2.step(ev(0, "down", 0, 1320, 700))
    out2 += m2.step(ev(500, "up", 0, 1320, 700))
    assert not any(isinstance(a, Commit) for a in out2)


def test_debounce_suppresses_rapid_double_commit():
    m = machine_for("front-gaze")
    out = []
    out += m.step(ev(0, "down", 0, 500, 500))
    out += m.step(ev(60, "up", 0, 500, 500))
    out += m.step(ev(120, "down", 0, 500, 500))
    out += m.step(ev(180, "up", 0, 500, 500))
    assert len([a for a in out if isinstance(a, Commit)]) == 1
    cfg = TechniqueConfig(debounce_enabled=False)
    m2 = machine_for("front-gaze", cfg)
    out2 = []
    out2 += m2.step(ev(0, "down", 0, 500, 500))
    out2 += m2.step(ev(60, "up", 0, 500, 500))
    out2 += m2.step(ev(120, "down", 0, 500, 500))
    out2 += m2.step(ev(180, "up", 0, 500, 500))
    assert len([a for a in out2 if isinstance(a, Commit)]) == 2


def test_off_screen_cancels_pending_tap():
    m = machine_for("two-fingers")
    m.step(ev(0, "down", 0, 1000, 700))
    m.step(ev(100, "down", 1, 2500, 1400))
    out = m.step(ev(140, "move", 1, 2600, 1500))  # tap finger slides off the pad
    assert any(isinstance(a, OffScreenCancel) for a in out)
    out2 = m.step(ev(160, "up", 1, 2600, 1500))
    assert not any(isinstance(a, Commit) for a in out2)
    # the dragger is unaffected
    moved = m.step(ev(200, "move", 0, 1040, 700))
    assert any(isinstance(a, CursorMoved) for a in moved)


def test_off_screen_drag_aborts_drag_n_tap_window():
    m = machine_for("drag-n-tap")
    m.step(ev(0, "down", 0, 1000, 700))
    out = m.step(ev(100, "move", 0, -5, 700))
    assert any(isinstance(a, OffScreenCancel) for a in out)
    # no retap window was opened by the failed gesture
    out2 = []
    out2 += m.step(ev(150, "down", 0, 1000, 700))
    out2 += m.step(ev(220, "up", 0, 1000, 700))
    assert not any(isinstance(a, Commit) for a in out2)


def test_head_pose_events_are_inert_for_machines():
    for name in TECHNIQUES:
        m = machine_for(name)
        assert m.step(HeadPose(0, 25.0, 10.0)) == []


# --- transition tables -------------------------------------------------------

def test_tables_have_unique_keys_and_known_actions():
    for name in TECHNIQUES:
        table = legal_transitions(name)
        assert table  # non-empty
        for (state, symbol), (nxt, actions) in table.items():
            assert isinstance(state, str) and isinstance(symbol, str) and isinstance(nxt, str)
            for a in actions:
                assert a in ("map_down", "map_move", "map_catchup", "commit")


def test_gaze_tables_have_no_cursor_actions():
    for name in ("side-gaze", "front-gaze"):
        for (_, _), (_, actions) in legal_transitions(name).items():
            assert "map_down" not in actions and "map_move" not in actions


def test_format_transition_table_renders_markdown():
    text = format_transition_table("two-fingers")
    assert text.startswith("| state | event |")
    assert "commit" in text


# --- enumeration oracle -------------------------------------------------------

FINGER_BASE = {0: (1000, 700), 1: (1400, 740)}


def drive_sequence(technique, seq, spacing_ms=170, move_px=10, cfg=None):
    """Run one abstract (action, finger) sequence through the machine and the
    transition table, returning (machine trace, table trace)."""
    cfg = cfg or TechniqueConfig()
    mode = DEFAULT_MODE[technique]
    machine = machine_for(technique, cfg)
    replayer = TableReplayer(technique, mode, cfg)
    pad = technique_pad(technique)
    pos = {}
    mine = []
    table = []
    for i, (action, finger) in enumerate(seq):
        t = 1000 + i * spacing_ms
        if action == "down":
            pos[finger] = FINGER_BASE[finger]
        elif action == "move":
            x, y = pos[finger]
            pos[finger] = (x + move_px, y + 3)
        x, y = pos[finger]
        event = ev(t, action, finger, x, y, source=pad)
        mine.extend(abstract_machine_actions(machine.step(event)))
        table.extend(replayer.step(event))
    return mine, table


@pytest.mark.parametrize("technique", TECHNIQUES)
@pytest.mark.parametrize("move_px", [10, 48], ids=["small-moves", "big-moves"])
def test_machine_matches_table_exhaustively(technique, move_px):
    count = 0
    for seq in legal_event_sequences(6):
        mine, table = drive_sequence(technique, seq, move_px=move_px)
        assert mine == table, f"{technique} diverged on {seq}"
        count += 1
    assert count == 872  # all per-finger-legal sequences up to length 6


# Hand-derived commit counts (events 170 ms apart, 10 px moves; a lone
# down..up pair is 170 ms -> tap, anything spanning 2+ steps is too slow).
HAND_REFERENCE = {
    "two-fingers": {
        (("down", 0), ("move", 0), ("down", 1), ("up", 1), ("up", 0)): 1,
        (("down", 0), ("down", 1), ("up", 1), ("up", 0)): 1,
        (("down", 0), ("down", 1), ("up", 0), ("up", 1)): 0,
        (("down", 0), ("down", 1), ("move", 1), ("up", 1)): 0,
        (("down", 0), ("up", 0), ("down", 1), ("up", 1)): 0,
        (("down", 0), ("up", 0)): 0,
    },
    "front-gaze": {
        (("down", 0), ("up", 0)): 1,
        (("down", 0), ("move", 0), ("up", 0)): 0,
        (("down", 0), ("up", 0), ("down", 1), ("up", 1)): 2,
        (("down", 0), ("down", 1), ("up", 0), ("up", 1)): 0,
    },
    "side-gaze": {
        (("down", 0), ("up", 0)): 1,
        (("down", 0), ("move", 0), ("up", 0)): 0,
    },
    "front-world": {
        (("down", 0), ("up", 0)): 1,
        (("down", 0), ("move", 0), ("up", 0)): 0,
        (("down", 0), ("down", 1), ("up", 1), ("up", 0)): 0,
    },
    "front-view": {
        (("down", 0), ("up", 0)): 1,
    },
    "drag-n-tap": {
        (("down", 0), ("up", 0)): 0,
        (("down", 0), ("up", 0), ("down", 0), ("up", 0)): 1,
        (("down", 0), ("move", 0), ("up", 0), ("down", 0), ("up", 0)): 1,
        (("down", 0), ("up", 0), ("down", 1), ("up", 1)): 0,  # retap too far away
        (("down", 0), ("up", 0), ("down", 0), ("up", 0), ("down", 0), ("up", 0)): 1,
    },
}


@pytest.mark.parametrize("technique", sorted(HAND_REFERENCE))
def test_hand_written_commit_counts(technique):
    for seq, expected in HAND_REFERENCE[technique].items():
        mine, _ = drive_sequence(technique, list(seq))
        commits = [a for a in mine if isinstance(a, tuple)]
        assert len(commits) == expected, f"{technique} {seq}: got {len(commits)}"


def random_event_stream(rng, n_events, pad):
    """Random legal touch stream with random timing and positions."""
    t = 0
    down = {}
    pos = {}
    events = []
    for _ in range(n_events):
        t += rng.randint(10, 260)
        choices = []
        for f in (0, 1):
            if down.get(f):
                choices += [("move", f), ("up", f)]
            else:
                choices += [("down", f)]
        action, f = rng.choice(choices)
        if action == "down":
            pos[f] = (rng.randint(0, 2559), rng.randint(0, 1439))
            down[f] = True
        elif action == "move":
            x, y = pos[f]
            pos[f] = (
                min(2559, max(0, x + rng.randint(-60, 60))),
                min(1439, max(0, y + rng.randint(-30, 30))),
            )
        else:
            down[f] = False
        events.append(ev(t, action, f, *pos[f], source=pad))
    return events


@pytest.mark.parametrize("technique", TECHNIQUES)
def test_fuzzed_equivalence_and_safety(technique):
    rng = random.Random(hash(technique) % (2**32))
    cfg = TechniqueConfig()
    mode = DEFAULT_MODE[technique]
    pad = technique_pad(technique)
    for _ in range(1500):
        events = random_event_stream(rng, rng.randint(1, 10), pad)
        machine = machine_for(technique, cfg)
        replayer = TableReplayer(technique, mode, cfg)
        fingers_down = set()
        max_simultaneous = 0
        ever_two = False
        for event in events:
            if event.action == "down":
                fingers_down.add(event.finger)
            elif event.action == "up":
                fingers_down.discard(event.finger)
            max_simultaneous = max(max_simultaneous, len(fingers_down))
            ever_two = ever_two or max_simultaneous >= 2
            mine = abstract_machine_actions(machine.step(event))
            table = replayer.step(event)
            assert mine == table, f"{technique} diverged on {event} in {events}"
            committed = any(isinstance(a, tuple) for a in mine)
            if committed and technique == "two-fingers":
                assert ever_two, "two-fingers committed without two fingers down"
            if committed and technique == "drag-n-tap":
                assert not fingers_down or machine.phase == "idle"


def test_study1_traces_replay_identically_through_tables():
    # noiseless study-style sessions: the technique machines and their
    # transition tables must agree event-for-event on real task traces
    from fronttouch.simulate import simulate_participant, zeroed_noise
    from fronttouch.trace import TraceHeader
    from fronttouch.techniques import TouchEvent as TE

    for technique in ("side-gaze", "two-fingers", "drag-n-tap"):
        header = TraceHeader(task="menu15", technique=technique, seed=6, participant=0)
        sim = simulate_participant(header, noise=zeroed_noise())
        pad = technique_pad(technique)
        touches = [e for e in sim.events if isinstance(e, TE) and e.source == pad]
        assert touches, technique
        machine = machine_for(technique)
        replayer = TableReplayer(technique, DEFAULT_MODE[technique], TechniqueConfig())
        for event in touches:
            mine = abstract_machine_actions(machine.step(event))
            table = replayer.step(event)
            assert mine == table, f"{technique} diverged on {event}"


def test_determinism_same_events_same_actions():
    rng = random.Random(99)
    events = random_event_stream(rng, 40, "front")
    runs = []
    for _ in range(2):
        m = machine_for("two-fingers")
        out = []
        for event in events:
            out.extend(m.step(event))
        runs.append(out)
    assert runs[0] == runs[1]
