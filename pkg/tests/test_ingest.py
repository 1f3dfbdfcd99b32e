"""File loading, defender context, and shot-window extraction."""

import json

import numpy as np
import pytest

from shotarc.ingest import (
    EventRecord,
    NonMonotoneTimestampsError,
    TrackingFrame,
    contest_angle,
    extract_shot_events,
    load_events,
    load_roster,
    load_tracking,
    nearest_defender,
)
from shotarc.sim import SimConfig, simulate_season, write_season


def frame_line(game_id="G0", t=0.0, ball=(10.0, 25.0, 8.0), n_players=10):
    players = [{"id": f"P{k}", "team": "A" if k < 5 else "B",
                "x": float(k), "y": float(k)} for k in range(n_players)]
    return json.dumps({"game_id": game_id, "t": t, "ball": list(ball), "players": players})


class TestLoadTracking:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text("")
        games, report = load_tracking(p)
        assert games == {}
        assert report.n_rows == 0

    def test_three_row_parse_echo(self, tmp_path):
        p = tmp_path / "t.jsonl"
        lines = [frame_line(t=0.00, ball=(1.5, 2.5, 3.5)),
                 frame_line(t=0.04, ball=(1.6, 2.6, 3.6)),
                 frame_line(t=0.08, ball=(1.7, 2.7, 3.7))]
        p.write_text("\n".join(lines) + "\n")
        games, report = load_tracking(p)
        assert report.n_loaded == 3 and report.n_rejected == 0
        g = games["G0"]
        assert len(g) == 3
        np.testing.assert_array_equal(g.ball[1], [1.6, 2.6, 3.6])
        fr = g.frame(0)
        assert isinstance(fr, TrackingFrame)
        assert fr.players[3] == ("P3", "A", 3.0, 3.0)
        assert fr.players[7][1] == "B"

    def test_one_malformed_among_100(self, tmp_path):
        p = tmp_path / "t.jsonl"
        lines = [frame_line(t=i * 0.04) for i in range(100)]
        lines[40] = '{"game_id": "G0", "t": "broken"'
        p.write_text("\n".join(lines) + "\n")
        games, report = load_tracking(p)
        assert report.n_rows == 100
        assert report.n_loaded == 99
        assert report.reasons == {"unparseable": 1}

    def test_wrong_player_count_rejected(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text(frame_line(n_players=9) + "\n" + frame_line(t=0.04) + "\n")
        games, report = load_tracking(p)
        assert report.reasons == {"wrong_player_count": 1}
        assert len(games["G0"]) == 1

    def test_non_monotone_raises(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text(frame_line(t=1.0) + "\n" + frame_line(t=0.5) + "\n")
        with pytest.raises(NonMonotoneTimestampsError):
            load_tracking(p)

    def test_csv_variant(self, tmp_path):
        p = tmp_path / "t.csv"
        header = ["game_id", "t", "ball_x", "ball_y", "ball_z"]
        for k in range(10):
            header += [f"p{k}_id", f"p{k}_team", f"p{k}_x", f"p{k}_y"]
        row = ["G1", "0.04", "1.0", "2.0", "9.0"]
        for k in range(10):
            row += [f"P{k}", "A" if k < 5 else "B", str(k), str(k)]
        p.write_text(",".join(header) + "\n" + ",".join(row) + "\n")
        games, report = load_tracking(p, fmt="csv")
        assert report.n_loaded == 1
        assert games["G1"].ball[0, 2] == 9.0


class TestRosterAndEvents:
    def test_roster_height_bounds(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("player_id,height_in,position\nA,75.5,G\nB,300,C\nC,59,G\n")
        roster, report = load_roster(p)
        assert set(roster) == {"A"}
        assert report.reasons == {"height_out_of_range": 2}

    def test_events_loaded_and_validated(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("shot_id,game_id,shooter_id,release_frame,outcome,hoop_end\n"
                     "s1,G0,P1,10,1,left\n"
                     "s2,G0,P2,frame,0,left\n"
                     "s3,G0,P3,20,2,right\n")
        events, report = load_events(p)
        assert [e.shot_id for e in events] == ["s1"]
        assert report.reasons == {"unparseable": 2}


def make_frame(players, ball=(0.0, 0.0, 9.0)):
    return TrackingFrame(game_id="G", t=0.0, ball=ball, players=tuple(players))


class TestNearestDefender:
    def test_three_four_five(self):
        frame = make_frame([
            ("S", "A", 0.0, 0.0),
            ("D1", "B", 3.0, 4.0),
            ("D2", "B", 10.0, 0.0),
        ] + [(f"X{k}", "A", 50.0, 50.0) for k in range(7)])
        pid, ndd = nearest_defender(frame, "S")
        assert pid == "D1"
        assert ndd == pytest.approx(5.0)

    def test_co_located_opponent(self):
        frame = make_frame([("S", "A", 2.0, 2.0), ("D", "B", 2.0, 2.0)])
        pid, ndd = nearest_defender(frame, "S")
        assert (pid, ndd) == ("D", 0.0)

    def test_tie_lexicographic(self):
        frame = make_frame([
            ("S", "A", 0.0, 0.0),
            ("DB", "B", 6.0, 0.0),
            ("DA", "B", 0.0, 6.0),
        ])
        pid, ndd = nearest_defender(frame, "S")
        assert pid == "DA"
        assert ndd == pytest.approx(6.0)

    def test_no_opponents(self):
        frame = make_frame([("S", "A", 0.0, 0.0), ("T", "A", 3.0, 3.0)])
        with pytest.raises(Exception):
            nearest_defender(frame, "S")


class TestContestAngle:
    def test_on_segment_zero(self):
        assert contest_angle((0, 0), (5, 0), (20, 0)) == pytest.approx(0.0)

    def test_perpendicular_right(self):
        # shooter faces +x; their right is -y
        assert contest_angle((0, 0), (0, -1), (20, 0)) == pytest.approx(90.0)

    def test_hand_geometry_minus_45(self):
        assert contest_angle((0, 0), (1, 1), (20, 0)) == pytest.approx(-45.0)

    def test_mirror_negates(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            s = rng.uniform(-10, 10, 2)
            d = rng.uniform(-10, 10, 2)
            r = rng.uniform(-10, 10, 2)
            if np.hypot(*(r - s)) < 1e-6 or np.hypot(*(d - s)) < 1e-6:
                continue
            a = contest_angle(tuple(s), tuple(d), tuple(r))
            b = contest_angle((s[0], -s[1]), (d[0], -d[1]), (r[0], -r[1]))
            if abs(a) == pytest.approx(180.0, abs=1e-9):
                continue
            assert b == pytest.approx(-a, abs=1e-9)

    def test_co_located_defender_flagged(self):
        with pytest.raises(Exception):
            contest_angle((1.0, 1.0), (1.0, 1.0), (20.0, 0.0))


@pytest.fixture(scope="module")
def season_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("season")
    cfg = SimConfig(n_games=5, shots_per_game=25, seed=21)
    season = simulate_season(cfg)
    paths = write_season(season, out)
    return season, paths


class TestExtraction:
    def test_round_trip_matches_ground_truth(self, season_files):
        season, paths = season_files
        tracking, _ = load_tracking(paths["tracking"])
        events, _ = load_events(paths["events"])
        roster, _ = load_roster(paths["roster"])
        shots, report = extract_shot_events(tracking, events, roster)
        assert report.rejections == {}
        truth = {r.shot_id: r for r in season.ground_truth}
        assert len(shots) == len(truth)
        for ev in shots:
            t = truth[ev.shot_id]
            assert ev.shooter == t.shooter_id
            assert ev.defender == t.defender_id
            assert ev.ndd_ft == pytest.approx(t.ndd_ft, abs=1e-9)
            assert ev.outcome == t.outcome

    def test_windows_cut_at_rim_plane(self, season_files):
        season, paths = season_files
        tracking, _ = load_tracking(paths["tracking"])
        events, _ = load_events(paths["events"])
        roster, _ = load_roster(paths["roster"])
        shots, _ = extract_shot_events(tracking, events, roster)
        for ev in shots[:40]:
            z = ev.samples[:, 2]
            apex = int(np.argmax(z))
            if z[apex] > 10.0 and z[-1] <= 10.0:
                # descending arrival frame included, nothing beyond it
                assert np.all(z[apex:-1] > 10.0)

    def test_insufficient_samples_flagged_not_dropped(self, tmp_path):
        # 3 in-flight frames only
        lines = []
        for i, z in enumerate((8.0, 9.0, 9.5)):
            players = [{"id": f"P{k}", "team": "A" if k < 5 else "B",
                        "x": 30.0 + k, "y": 25.0} for k in range(10)]
            lines.append(json.dumps({"game_id": "G0", "t": i * 0.04,
                                     "ball": [10.0, 25.0, z], "players": players}))
        p = tmp_path / "t.jsonl"
        p.write_text("\n".join(lines) + "\n")
        games, _ = load_tracking(p)
        events = [EventRecord("s1", "G0", "P0", 0, 1, "left")]
        shots, report = extract_shot_events(games, events, {})
        assert len(shots) == 1
        assert "insufficient_samples" in shots[0].flags
        assert report.n_flagged == 1

    def test_release_out_of_range_rejected(self, tmp_path):
        p = tmp_path / "t.jsonl"
        p.write_text(frame_line() + "\n")
        games, _ = load_tracking(p)
        events = [EventRecord("s1", "G0", "P0", 99, 1, "left")]
        shots, report = extract_shot_events(games, events, {})
        assert shots == []
        assert report.rejections == {"release_out_of_range": 1}

    def test_contest_angle_convention_against_simulator(self, season_files):
        # the simulator plants defenders rotated by a known signed angle
        season, paths = season_files
        tracking, _ = load_tracking(paths["tracking"])
        events, _ = load_events(paths["events"])
        roster, _ = load_roster(paths["roster"])
        shots, _ = extract_shot_events(tracking, events, roster)
        angles = np.array([ev.contest_angle_deg for ev in shots])
        assert np.isfinite(angles).all()
        assert np.abs(angles).max() <= 180.0
        # planted distribution is zero-centered with sd 25
        assert abs(np.mean(angles)) < 10.0
