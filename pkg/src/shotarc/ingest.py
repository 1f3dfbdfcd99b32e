"""Loading tracking/event/roster files and assembling per-shot samples.

File formats (all UTF-8 text, base-10 numerals):

  tracking.jsonl  one frame per line:
                  {"game_id": ..., "t": seconds, "ball": [x, y, z],
                   "players": [{"id", "team", "x", "y"} x 10]}
                  A flattened CSV variant is also accepted (columns game_id,
                  t, ball_x, ball_y, ball_z, p0_id, p0_team, p0_x, p0_y, ...).
  events.csv      shot_id, game_id, shooter_id, release_frame, outcome, hoop_end
  roster.csv      player_id, height_in, position

Malformed rows are counted and skipped, never fatal; structurally broken
files (missing, unparseable, non-monotone timestamps) raise.

Shot windows run from the tagged release frame to the first frame at or
below rim height after the apex ("the ball reaches the rim plane"), or
until the 25 Hz stream breaks off.  Ball samples are converted to the
rim-local frame of the attacked hoop.  Defender context (nearest defender,
its roster height, and the signed contest angle) is evaluated at the
release frame only.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    CourtGeometry,
    DEFAULT_GEOMETRY,
    GameId,
    PlayerId,
    rim_center_xy,
    to_local_frame,
)

PLAYERS_PER_FRAME = 10


class IngestError(ValueError):
    pass


class NonMonotoneTimestampsError(IngestError):
    pass


class NoOpponentsError(IngestError):
    pass


@dataclass(frozen=True)
class TrackingFrame:
    """One 25 Hz snapshot: ball position plus ten (player, team, x, y) entries."""

    game_id: GameId
    t: float
    ball: tuple[float, float, float]
    players: tuple[tuple[PlayerId, str, float, float], ...]


@dataclass
class GameTracking:
    """Column-oriented frames of one game (memory-friendly for long seasons)."""

    game_id: GameId
    times: np.ndarray          # (n,)
    ball: np.ndarray           # (n, 3)
    player_ids: np.ndarray     # (n, 10) indices into id_table
    player_xy: np.ndarray      # (n, 10, 2)
    id_table: list[PlayerId]
    team_of: dict[PlayerId, str]

    def __len__(self) -> int:
        return len(self.times)

    def frame(self, i: int) -> TrackingFrame:
        ids = [self.id_table[j] for j in self.player_ids[i]]
        return TrackingFrame(
            game_id=self.game_id,
            t=float(self.times[i]),
            ball=tuple(self.ball[i].tolist()),
            players=tuple(
                (pid, self.team_of[pid], float(x), float(y))
                for pid, (x, y) in zip(ids, self.player_xy[i].tolist())
            ),
        )

    def frames(self) -> list[TrackingFrame]:
        return [self.frame(i) for i in range(len(self))]


@dataclass(frozen=True)
class LoadReport:
    n_rows: int
    n_loaded: int
    n_rejected: int
    reasons: dict[str, int] = field(default_factory=dict)


class _GameAccumulator:
    def __init__(self, game_id: GameId):
        self.game_id = game_id
        self.times: list[float] = []
        self.ball: list[tuple[float, float, float]] = []
        self.pids: list[list[int]] = []
        self.pxy: list[list[tuple[float, float]]] = []
        self.id_table: list[PlayerId] = []
        self.id_index: dict[PlayerId, int] = {}
        self.team_of: dict[PlayerId, str] = {}

    def add(self, t: float, ball, players) -> None:
        row_ids, row_xy = [], []
        for pid, team, x, y in players:
            j = self.id_index.get(pid)
            if j is None:
                j = len(self.id_table)
                self.id_index[pid] = j
                self.id_table.append(pid)
                self.team_of[pid] = team
            row_ids.append(j)
            row_xy.append((x, y))
        self.times.append(t)
        self.ball.append(ball)
        self.pids.append(row_ids)
        self.pxy.append(row_xy)

    def finish(self) -> GameTracking:
        return GameTracking(
            game_id=self.game_id,
            times=np.asarray(self.times, dtype=float),
            ball=np.asarray(self.ball, dtype=float),
            player_ids=np.asarray(self.pids, dtype=np.int16),
            player_xy=np.asarray(self.pxy, dtype=float),
            id_table=self.id_table,
            team_of=self.team_of,
        )


def _parse_jsonl_row(line: str):
    doc = json.loads(line)
    ball = doc["ball"]
    players = [(p["id"], p["team"], float(p["x"]), float(p["y"])) for p in doc["players"]]
    return str(doc["game_id"]), float(doc["t"]), (float(ball[0]), float(ball[1]), float(ball[2])), players


def _parse_csv_row(row: list[str]):
    game_id, t = row[0], float(row[1])
    ball = (float(row[2]), float(row[3]), float(row[4]))
    players = []
    for k in range(PLAYERS_PER_FRAME):
        base = 5 + 4 * k
        players.append((row[base], row[base + 1], float(row[base + 2]), float(row[base + 3])))
    return game_id, t, ball, players


def load_tracking(
    path: str | Path,
    fmt: str = "jsonl",
    monotone_tol: float = 1e-9,
) -> tuple[dict[GameId, GameTracking], LoadReport]:
    """Load tracking frames grouped by game, preserving within-game time order.

    Rows that fail to parse, carry a wrong player count, or duplicate a
    timestamp are counted and skipped.  A timestamp stepping backwards by
    more than ``monotone_tol`` within a game aborts the load.
    """
    if fmt not in ("jsonl", "csv"):
        raise IngestError(f"unknown tracking format {fmt!r}")
    path = Path(path)
    games: dict[GameId, _GameAccumulator] = {}
    n_rows = 0
    reasons: Counter[str] = Counter()

    def consume(parsed) -> None:
        game_id, t, ball, players = parsed
        if len(players) != PLAYERS_PER_FRAME:
            reasons["wrong_player_count"] += 1
            return
        if not all(math.isfinite(v) for v in (t, *ball)):
            reasons["non_finite"] += 1
            return
        acc = games.get(game_id)
        if acc is None:
            acc = games[game_id] = _GameAccumulator(game_id)
        if acc.times:
            prev = acc.times[-1]
            if t < prev - monotone_tol:
                raise NonMonotoneTimestampsError(
                    f"game {game_id}: timestamp {t} after {prev}")
            if t <= prev:
                reasons["duplicate_timestamp"] += 1
                return
        acc.add(t, ball, players)

    with path.open("r", encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            for line in fh:
                if not line.strip():
                    continue
                n_rows += 1
                try:
                    consume(_parse_jsonl_row(line))
                except NonMonotoneTimestampsError:
                    raise
                except (ValueError, KeyError, TypeError, IndexError):
                    reasons["unparseable"] += 1
        else:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                return {}, LoadReport(0, 0, 0, {})
            for row in reader:
                if not row:
                    continue
                n_rows += 1
                try:
                    consume(_parse_csv_row(row))
                except NonMonotoneTimestampsError:
                    raise
                except (ValueError, KeyError, TypeError, IndexError):
                    reasons["unparseable"] += 1

    loaded = {gid: acc.finish() for gid, acc in games.items()}
    n_loaded = sum(len(g) for g in loaded.values())
    return loaded, LoadReport(
        n_rows=n_rows,
        n_loaded=n_loaded,
        n_rejected=n_rows - n_loaded,
        reasons=dict(reasons),
    )


@dataclass(frozen=True)
class RosterRecord:
    player_id: PlayerId
    height_in: float
    position: str


def load_roster(path: str | Path) -> tuple[dict[PlayerId, RosterRecord], LoadReport]:
    """Read roster rows; heights outside [60, 96] inches are rejected."""
    path = Path(path)
    records: dict[PlayerId, RosterRecord] = {}
    reasons: Counter[str] = Counter()
    n_rows = 0
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            n_rows += 1
            try:
                pid = row["player_id"].strip()
                height = float(row["height_in"])
                pos = row.get("position", "").strip()
            except (KeyError, ValueError, AttributeError):
                reasons["unparseable"] += 1
                continue
            if not pid:
                reasons["empty_id"] += 1
                continue
            if not 60.0 <= height <= 96.0:
                reasons["height_out_of_range"] += 1
                continue
            records[pid] = RosterRecord(player_id=pid, height_in=height, position=pos)
    return records, LoadReport(n_rows, len(records), n_rows - len(records), dict(reasons))


@dataclass(frozen=True)
class EventRecord:
    shot_id: str
    game_id: GameId
    shooter_id: PlayerId
    release_frame: int
    outcome: int
    hoop_end: str


def load_events(path: str | Path) -> tuple[list[EventRecord], LoadReport]:
    path = Path(path)
    events: list[EventRecord] = []
    reasons: Counter[str] = Counter()
    n_rows = 0
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            n_rows += 1
            try:
                outcome = int(row["outcome"])
                if outcome not in (0, 1):
                    raise ValueError("outcome must be 0/1")
                events.append(EventRecord(
                    shot_id=row["shot_id"].strip(),
                    game_id=row["game_id"].strip(),
                    shooter_id=row["shooter_id"].strip(),
                    release_frame=int(row["release_frame"]),
                    outcome=outcome,
                    hoop_end=row["hoop_end"].strip(),
                ))
            except (KeyError, ValueError, AttributeError):
                reasons["unparseable"] += 1
    return events, LoadReport(n_rows, len(events), n_rows - len(events), dict(reasons))


# --- defender context ----------------------------------------------------------

def nearest_defender(frame: TrackingFrame, shooter_id: PlayerId) -> tuple[PlayerId, float]:
    """Opposing player minimizing planar distance to the shooter at this frame.

    Ties break toward the lexicographically smaller player id.
    """
    shooter = next((p for p in frame.players if p[0] == shooter_id), None)
    if shooter is None:
        raise IngestError(f"shooter {shooter_id} not on court")
    _, s_team, sx, sy = shooter
    best: tuple[float, PlayerId] | None = None
    for pid, team, x, y in frame.players:
        if team == s_team:
            continue
        dist = math.hypot(x - sx, y - sy)
        if best is None or (dist, pid) < best:
            best = (dist, pid)
    if best is None:
        raise NoOpponentsError("no opposing player on court at release")
    return best[1], best[0]


def contest_angle(
    shooter_xy: tuple[float, float],
    defender_xy: tuple[float, float],
    rim_xy: tuple[float, float],
) -> float:
    """Signed angle between shooter->rim and shooter->defender rays, degrees.

    Positive means the defender stands on the shooter's right; the value
    lies in (-180, 180].
    """
    ux, uy = rim_xy[0] - shooter_xy[0], rim_xy[1] - shooter_xy[1]
    vx, vy = defender_xy[0] - shooter_xy[0], defender_xy[1] - shooter_xy[1]
    if math.hypot(ux, uy) < 1e-12:
        raise IngestError("shooter co-located with the rim")
    if math.hypot(vx, vy) < 1e-12:
        raise IngestError("defender co-located with the shooter; angle undefined")
    cross = ux * vy - uy * vx
    dot = ux * vx + uy * vy
    return math.degrees(math.atan2(-cross, dot))


# --- shot extraction -------------------------------------------------------------

@dataclass(frozen=True)
class ShotEvent:
    """One extracted three-point attempt with defender context and ball samples."""

    shot_id: str
    game_id: GameId
    shooter: PlayerId
    defender: PlayerId
    release_index: int
    ndd_ft: float
    defender_height_in: float
    contest_angle_deg: float
    outcome: int
    samples: np.ndarray          # (n, 3) rim-local frame
    sample_times: np.ndarray     # (n,)
    release_xy: tuple[float, float]   # shooter location, rim-local frame
    flags: tuple[str, ...] = ()

    @property
    def max_gap_s(self) -> float:
        if len(self.sample_times) < 2:
            return 0.0
        return float(np.max(np.diff(self.sample_times)))


@dataclass(frozen=True)
class ExtractionReport:
    n_events: int
    n_extracted: int
    rejections: dict[str, int] = field(default_factory=dict)
    n_flagged: int = 0


def _ball_to_local(ball: np.ndarray, hoop_end: str) -> np.ndarray:
    rx, ry = rim_center_xy(hoop_end)
    out = ball.copy()
    if hoop_end == "left":
        out[:, 0] -= rx
        out[:, 1] -= ry
    else:
        out[:, 0] = rx - out[:, 0]
        out[:, 1] = ry - out[:, 1]
    return out


def _cut_at_rim_plane(z: np.ndarray, rim_z: float) -> int:
    """Index one past the first frame at/below rim height on the way down.

    Arcs that never rise above the rim plane have no descending crossing;
    the whole window is kept.
    """
    if len(z) == 0:
        return 0
    apex = int(np.argmax(z))
    if z[apex] <= rim_z:
        return len(z)
    for i in range(apex + 1, len(z)):
        if z[i] <= rim_z:
            return i + 1
    return len(z)


def extract_shot_events(
    tracking: dict[GameId, GameTracking],
    events: list[EventRecord],
    roster: dict[PlayerId, RosterRecord],
    geometry: CourtGeometry = DEFAULT_GEOMETRY,
    min_samples: int = 5,
    stream_break_s: float = 1.0,
    max_window_s: float = 3.0,
) -> tuple[list[ShotEvent], ExtractionReport]:
    """Assemble ShotEvents from tagged releases.

    A window ends at the first descending rim-plane arrival, at a break in
    the 25 Hz stream (gap > ``stream_break_s``), or after ``max_window_s``.
    Shots are rejected when their game or release frame is unknown, the
    shooter is off court, or no opponent is on court; thin windows are only
    flagged (``insufficient_samples``) so callers can report them.
    """
    out: list[ShotEvent] = []
    reasons: Counter[str] = Counter()
    n_flagged = 0
    rim_z = geometry.rim_center[2]

    for ev in events:
        game = tracking.get(ev.game_id)
        if game is None:
            reasons["unknown_game"] += 1
            continue
        if not 0 <= ev.release_frame < len(game):
            reasons["release_out_of_range"] += 1
            continue
        try:
            rim_xy = rim_center_xy(ev.hoop_end)
        except ValueError:
            reasons["unknown_hoop_end"] += 1
            continue

        frame = game.frame(ev.release_frame)
        try:
            defender_id, ndd = nearest_defender(frame, ev.shooter_id)
        except NoOpponentsError:
            reasons["no_defender"] += 1
            continue
        except IngestError:
            reasons["shooter_not_on_court"] += 1
            continue

        # window: stop at a stream break, then cut at the rim plane
        t0 = game.times[ev.release_frame]
        hi = ev.release_frame + 1
        limit = len(game)
        while hi < limit:
            if game.times[hi] - game.times[hi - 1] > stream_break_s:
                break
            if game.times[hi] - t0 > max_window_s:
                break
            hi += 1
        window = slice(ev.release_frame, hi)
        ball_local = _ball_to_local(game.ball[window], ev.hoop_end)
        cut = _cut_at_rim_plane(ball_local[:, 2], rim_z)
        samples = ball_local[:cut]
        times = game.times[window][:cut]

        flags: list[str] = []
        if len(samples) < min_samples:
            flags.append("insufficient_samples")

        shooter_entry = next(p for p in frame.players if p[0] == ev.shooter_id)
        defender_entry = next(p for p in frame.players if p[0] == defender_id)
        shooter_xy = (shooter_entry[2], shooter_entry[3])
        try:
            angle = contest_angle(shooter_xy, (defender_entry[2], defender_entry[3]), rim_xy)
        except IngestError:
            angle = float("nan")
            flags.append("contest_angle_undefined")

        height = float("nan")
        rec = roster.get(defender_id)
        if rec is not None:
            height = rec.height_in
        else:
            flags.append("defender_height_missing")

        release_local = to_local_frame((shooter_xy[0], shooter_xy[1], 0.0), ev.hoop_end)
        if flags:
            n_flagged += 1
        out.append(ShotEvent(
            shot_id=ev.shot_id,
            game_id=ev.game_id,
            shooter=ev.shooter_id,
            defender=defender_id,
            release_index=ev.release_frame,
            ndd_ft=ndd,
            defender_height_in=height,
            contest_angle_deg=angle,
            outcome=ev.outcome,
            samples=samples,
            sample_times=times,
            release_xy=(release_local[0], release_local[1]),
            flags=tuple(flags),
        ))

    return out, ExtractionReport(
        n_events=len(events),
        n_extracted=len(out),
        rejections=dict(reasons),
        n_flagged=n_flagged,
    )
