"""Synthetic season generator with a deterministic rim-geometry make oracle.

Seasons are generated shot by shot: a shooter's intended rim-plane crossing
(depth, left-right, entry angle) is drawn from their skill distribution,
perturbed by defender pressure as a function of nearest-defender distance
(NDD), realized as a drag-free parabola sampled at 25 Hz with isotropic
tracking noise, and scored by rim geometry.  Everything downstream of the
master seed is deterministic, including the emitted text files.

Outcome rule.  The clean-entry oracle scores a make when the crossing
point clears both front and back rim:

    sqrt((depth - rim_radius)^2 + lr^2) <= rim_radius - ball_radius / sin(angle)

Real rims are kinder on the deep side: a ball contacting the back rim on
the way down tends to deaden and drop, while front-rim contact is fatal.
The simulator models this with an optional deterministic back-rim capture
zone that extends the make region deep of center by a fixed margin
(config ``back_rim_capture_ft``; 0 disables it, leaving the pure
clean-entry disk).  The capture zone is what moves the best-scoring depth
bin past the geometric center, as observed on real shooting data.

Pressure model.  NDD maps to a contest intensity in [0, 1] through a steep
logistic ramp centered between the open (>6 ft) and contested (<4 ft)
regimes.  Intensity scales a short-depth bias, depth/left-right variance
inflation, and an entry-angle rise that grows with defender height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .core import (
    CourtGeometry,
    DEFAULT_GEOMETRY,
    GameId,
    PlayerId,
    from_local_frame,
)

GRAVITY_FT_S2 = 32.174
FRAME_RATE_HZ = 25.0


class UnreachableTargetError(ValueError):
    """No ascending-release parabola reaches the requested crossing."""


@dataclass(frozen=True)
class ReleaseState:
    """Horizontal release location (local frame) and release height."""

    xy: tuple[float, float]
    height_ft: float


@dataclass(frozen=True)
class TargetCrossing:
    """Intended rim-plane crossing in shot-factor coordinates."""

    depth_ft: float
    lr_ft: float
    entry_angle_deg: float


@dataclass(frozen=True)
class SampledTrajectory:
    """25 Hz ball samples for one shot, local frame."""

    points: np.ndarray          # (n_flight + extra, 3)
    n_flight: int               # samples within [0, flight_time)
    flight_time_s: float
    direction: np.ndarray       # horizontal unit vector, release -> rim side
    s_cross_ft: float           # path coordinate of the crossing


def _path_through(release_xy: np.ndarray, lr_ft: float, geometry: CourtGeometry) -> np.ndarray:
    """Horizontal unit direction from release whose line misses rim center by lr."""
    rim = np.asarray(geometry.rim_center[:2])
    offset = rim - release_xy
    dist = float(np.hypot(*offset))
    if abs(lr_ft) >= dist:
        raise UnreachableTargetError("left-right offset exceeds release distance")
    u = offset / dist
    phi = -math.asin(lr_ft / dist)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([c * u[0] - s * u[1], s * u[0] + c * u[1]])


def sample_trajectory(
    release: ReleaseState,
    target: TargetCrossing,
    rng: np.random.Generator,
    noise_sigma_ft: float = 0.0,
    frame_rate_hz: float = FRAME_RATE_HZ,
    geometry: CourtGeometry = DEFAULT_GEOMETRY,
    extra_frames: int = 0,
) -> SampledTrajectory:
    """Sample the unique parabola through the release point and target crossing.

    The vertical-plane quadratic is pinned by three conditions: it passes
    the release height at the release point, reaches rim height at the
    target crossing, and descends there at the target entry angle.  Flight
    time follows from projectile kinematics, and the sample count is the
    flight time times the frame rate, rounded.  ``extra_frames`` appends
    continuation samples past the crossing so rim-plane cutting is
    exercised downstream.
    """
    release_xy = np.asarray(release.xy, dtype=float)
    d = _path_through(release_xy, target.lr_ft, geometry)
    rim = np.asarray(geometry.rim_center[:2])
    s_center = float((rim - release_xy) @ d)
    s_cross = s_center + target.depth_ft - geometry.rim_radius_ft
    if s_cross <= 0:
        raise UnreachableTargetError("crossing lies behind the release point")

    rim_z = geometry.rim_center[2]
    tan_a = math.tan(math.radians(target.entry_angle_deg))
    c2 = -((rim_z - release.height_ft) + tan_a * s_cross) / s_cross**2
    c1 = -tan_a - 2.0 * c2 * s_cross
    if c2 >= 0.0 or c1 <= 0.0:
        raise UnreachableTargetError("no ascending-release parabola reaches the target")

    v_h = math.sqrt(GRAVITY_FT_S2 / (-2.0 * c2))
    flight_time = s_cross / v_h
    n_flight = int(round(flight_time * frame_rate_hz))
    n_total = n_flight + extra_frames
    t = np.arange(n_total) / frame_rate_hz
    s = v_h * t
    xy = release_xy[None, :] + s[:, None] * d[None, :]
    z = release.height_ft + c1 * s + c2 * s * s
    pts = np.column_stack([xy, z])
    if noise_sigma_ft > 0.0:
        pts = pts + rng.normal(0.0, noise_sigma_ft, pts.shape)
    return SampledTrajectory(
        points=pts,
        n_flight=n_flight,
        flight_time_s=flight_time,
        direction=d,
        s_cross_ft=s_cross,
    )


def clean_entry_radius_ft(entry_angle_deg: float, geometry: CourtGeometry = DEFAULT_GEOMETRY) -> float:
    """Radius around rim center within which a crossing at this angle swishes."""
    return geometry.rim_radius_ft - geometry.ball_radius_ft / math.sin(math.radians(entry_angle_deg))


def physical_make_oracle(
    depth_ft: float,
    lr_ft: float,
    entry_angle_deg: float,
    geometry: CourtGeometry = DEFAULT_GEOMETRY,
) -> bool:
    """Clean-entry make rule: the crossing point must clear front and back rim.

    The crossing point in path coordinates relative to rim center is
    (depth - rim_radius, lr); a make requires its distance from the center
    to stay within ``clean_entry_radius_ft`` of the entry angle.
    """
    if not 0.0 < entry_angle_deg <= 90.0:
        raise ValueError("entry angle must lie in (0, 90]")
    rad = clean_entry_radius_ft(entry_angle_deg, geometry)
    if rad <= 0.0:
        return False
    u = depth_ft - geometry.rim_radius_ft
    return math.hypot(u, lr_ft) <= rad


def make_with_back_rim_capture(
    depth_ft: float,
    lr_ft: float,
    entry_angle_deg: float,
    capture_ft: float,
    geometry: CourtGeometry = DEFAULT_GEOMETRY,
) -> bool:
    """Clean-entry oracle extended deep of center by a back-rim capture margin.

    Crossings past the clean window but within ``capture_ft`` of it on the
    deep side contact the back rim steeply enough to deaden and drop.
    ``capture_ft = 0`` reduces exactly to :func:`physical_make_oracle`.
    """
    if physical_make_oracle(depth_ft, lr_ft, entry_angle_deg, geometry):
        return True
    if capture_ft <= 0.0:
        return False
    u = depth_ft - geometry.rim_radius_ft
    if u <= 0.0:
        return False
    rad = clean_entry_radius_ft(entry_angle_deg, geometry)
    if rad <= 0.0:
        return False
    return math.hypot(max(u - capture_ft, 0.0), lr_ft) <= rad


# --- season configuration ----------------------------------------------------

@dataclass(frozen=True)
class ShooterSkill:
    """Ground-truth aim distribution and contest sensitivity for one shooter."""

    player_id: PlayerId
    height_in: float
    aim_mean: np.ndarray            # (3,) depth_ft, lr_ft, angle_deg
    aim_cov: np.ndarray             # (3, 3)
    resilience: float               # multiplies pressure-induced depth bias; 1 = league average
    participation: float            # relative chance of appearing in a game lineup


@dataclass(frozen=True)
class DefenderTrait:
    """Planted pressure parameters for one defender."""

    player_id: PlayerId
    height_in: float
    pressure_scale: float           # multiplies all contest effects; 1 = league average
    participation: float


@dataclass(frozen=True)
class PressureModel:
    """How NDD translates into trajectory perturbations."""

    open_threshold_ft: float = 6.0
    contested_threshold_ft: float = 4.0
    ramp_midpoint_ft: float = 5.0
    ramp_width_ft: float = 0.18
    depth_shift_ft: float = -0.07           # mean depth bias at full contest
    depth_var_inflation: float = 1.56       # contested/open depth variance target
    lr_var_inflation: float = 1.38          # contested/open left-right variance target
    angle_rise_deg: float = 1.1             # mean entry-angle rise at full contest
    angle_height_coef: float = 0.22         # extra degrees per inch of defender height above mean

    def intensity(self, ndd_ft: np.ndarray | float) -> np.ndarray | float:
        return expit((self.ramp_midpoint_ft - np.asarray(ndd_ft, dtype=float)) / self.ramp_width_ft)


@dataclass(frozen=True)
class SimConfig:
    """Season-level knobs; every random draw descends from ``seed``."""

    seed: int = 20140615
    n_games: int = 24
    shots_per_game: int = 50
    n_shooters: int = 40
    n_defenders: int = 40

    # league-level aim distribution (per-shooter means are drawn around these)
    mean_depth_ft: float = 0.70             # 8.4 in: shooters bias short of center
    depth_sd_ft: float = 0.24
    mean_angle_deg: float = 45.5
    angle_sd_deg: float = 4.3
    lr_sd_ft: float = 0.18
    depth_angle_corr: float = 0.35
    shooter_depth_mean_sd_ft: float = 0.07  # between-shooter spread of mean depth
    shooter_angle_mean_sd_deg: float = 1.3
    shooter_lr_sd_jitter: float = 0.20      # lognormal sigma of per-shooter lr sd
    resilience_sd: float = 0.45

    # defender pool
    defender_height_mean_in: float = 79.0
    defender_height_sd_in: float = 3.2
    pressure_scale_sd: float = 0.40
    participation_sd: float = 0.50          # lognormal sigma of lineup weights

    # release geometry
    release_distance_range_ft: tuple[float, float] = (22.5, 26.5)
    release_azimuth_range_deg: tuple[float, float] = (-55.0, 55.0)
    release_height_ft: float = 7.0
    release_height_jitter_ft: float = 0.0

    # nearest defender distance ~ Gamma(shape, scale), clipped
    ndd_gamma_shape: float = 4.0
    ndd_gamma_scale: float = 1.25
    ndd_range_ft: tuple[float, float] = (0.75, 10.0)
    contest_angle_sd_deg: float = 25.0

    pressure: PressureModel = field(default_factory=PressureModel)

    # measurement + outcome layers
    tracking_noise_ft: float = 0.10
    back_rim_capture_ft: float = 0.18
    outcome_flip_prob: float = 0.0          # optional extra outcome noise beyond rim geometry
    corrupt_fraction: float = 0.0           # fraction of shots with injected tracking corruption
    extra_frames_past_rim: int = 2

    def __post_init__(self) -> None:
        if not (0 <= self.outcome_flip_prob < 0.5):
            raise ValueError("outcome_flip_prob must lie in [0, 0.5)")
        if not (0 <= self.corrupt_fraction <= 1):
            raise ValueError("corrupt_fraction must lie in [0, 1]")
        if self.pressure.depth_var_inflation < 1 or self.pressure.lr_var_inflation < 1:
            raise ValueError("variance inflation factors must be >= 1")
        if abs(self.depth_angle_corr) >= 1:
            raise ValueError("depth_angle_corr must lie in (-1, 1)")
        if self.tracking_noise_ft < 0:
            raise ValueError("tracking noise must be non-negative")

    @property
    def n_shots(self) -> int:
        return self.n_games * self.shots_per_game


def make_shooter_pool(config: SimConfig, rng: np.random.Generator) -> list[ShooterSkill]:
    pool = []
    heights = np.clip(rng.normal(77.5, 3.0, config.n_shooters), 70, 88)
    for i in range(config.n_shooters):
        mean_depth = rng.normal(config.mean_depth_ft, config.shooter_depth_mean_sd_ft)
        mean_angle = rng.normal(config.mean_angle_deg, config.shooter_angle_mean_sd_deg)
        lr_sd = config.lr_sd_ft * float(np.exp(rng.normal(0.0, config.shooter_lr_sd_jitter)))
        sd = np.array([config.depth_sd_ft, lr_sd, config.angle_sd_deg])
        corr = np.array([
            [1.0, 0.0, config.depth_angle_corr],
            [0.0, 1.0, 0.0],
            [config.depth_angle_corr, 0.0, 1.0],
        ])
        cov = corr * np.outer(sd, sd)
        pool.append(ShooterSkill(
            player_id=f"S{i:03d}",
            height_in=float(heights[i]),
            aim_mean=np.array([mean_depth, 0.0, mean_angle]),
            aim_cov=cov,
            resilience=float(np.clip(rng.normal(1.0, config.resilience_sd), 0.0, 2.5)),
            participation=float(np.exp(rng.normal(0.0, config.participation_sd))),
        ))
    return pool


def make_defender_pool(config: SimConfig, rng: np.random.Generator) -> list[DefenderTrait]:
    pool = []
    heights = np.clip(
        rng.normal(config.defender_height_mean_in, config.defender_height_sd_in, config.n_defenders),
        72, 88,
    )
    for i in range(config.n_defenders):
        pool.append(DefenderTrait(
            player_id=f"D{i:03d}",
            height_in=float(heights[i]),
            pressure_scale=float(np.clip(rng.normal(1.0, config.pressure_scale_sd), 0.0, 2.5)),
            participation=float(np.exp(rng.normal(0.0, config.participation_sd))),
        ))
    return pool


# --- season containers ---------------------------------------------------------

@dataclass(frozen=True)
class GroundTruthShot:
    shot_id: str
    game_id: GameId
    shooter_id: PlayerId
    defender_id: PlayerId
    ndd_ft: float
    contest_intensity: float
    true_depth_ft: float
    true_lr_ft: float
    true_angle_deg: float
    outcome: int
    corrupted: bool


@dataclass(frozen=True)
class SimShot:
    shot_id: str
    shooter_id: PlayerId
    release_frame: int              # index into the game's frame sequence
    outcome: int
    ball_points: np.ndarray         # (n, 3) court frame
    times_s: np.ndarray             # (n,)
    player_xy: np.ndarray           # (10, 2) court frame, lineup order, static over the window


@dataclass(frozen=True)
class SimGame:
    game_id: GameId
    hoop_end: str
    player_ids: tuple[PlayerId, ...]    # 10 on-court ids; teams index-aligned
    player_teams: tuple[str, ...]
    shots: tuple[SimShot, ...]

    @property
    def n_frames(self) -> int:
        return sum(len(s.times_s) for s in self.shots)


@dataclass(frozen=True)
class SeasonData:
    config: SimConfig
    shooter_pool: list[ShooterSkill]
    defender_pool: list[DefenderTrait]
    games: list[SimGame]
    ground_truth: list[GroundTruthShot]


# fixed off-ball formation (local frame): teammates near midcourt, opponents deeper
_TEAMMATE_SPOTS = np.array([[30.0, -15.0], [32.0, -5.0], [34.0, 5.0], [30.0, 15.0]])
_OPPONENT_SPOTS = np.array([[44.0, -12.0], [46.0, -4.0], [48.0, 4.0], [44.0, 12.0]])


def _rotate(v: np.ndarray, angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def simulate_season(config: SimConfig) -> SeasonData:
    """Generate a full synthetic season; deterministic given ``config.seed``."""
    root = np.random.SeedSequence(config.seed)
    pool_ss, season_ss = root.spawn(2)
    pool_rng = np.random.default_rng(pool_ss)
    shooters = make_shooter_pool(config, pool_rng)
    defenders = make_defender_pool(config, pool_rng)

    s_weights = np.array([s.participation for s in shooters])
    s_weights = s_weights / s_weights.sum()
    d_weights = np.array([d.participation for d in defenders])
    d_weights = d_weights / d_weights.sum()

    game_seeds = season_ss.spawn(config.n_games)
    games: list[SimGame] = []
    truth: list[GroundTruthShot] = []
    shot_counter = 0
    mean_def_height = float(np.mean([d.height_in for d in defenders]))

    for g in range(config.n_games):
        rng = np.random.default_rng(game_seeds[g])
        game_id = f"G{g:04d}"
        hoop_end = "left" if g % 2 == 0 else "right"
        lineup_s = rng.choice(len(shooters), size=min(5, len(shooters)), replace=False, p=s_weights)
        lineup_d = rng.choice(len(defenders), size=min(5, len(defenders)), replace=False, p=d_weights)
        on_court_s = [shooters[i] for i in lineup_s]
        on_court_d = [defenders[i] for i in lineup_d]
        ids = tuple([s.player_id for s in on_court_s] + [d.player_id for d in on_court_d])
        teams = tuple(["A"] * len(on_court_s) + ["B"] * len(on_court_d))

        shots: list[SimShot] = []
        frame_cursor = 0
        for k in range(config.shots_per_game):
            si = int(rng.integers(len(on_court_s)))
            di = int(rng.integers(len(on_court_d)))
            shooter = on_court_s[si]
            defender = on_court_d[di]

            # release geometry (local frame)
            dist = rng.uniform(*config.release_distance_range_ft)
            azim = math.radians(rng.uniform(*config.release_azimuth_range_deg))
            release_xy = np.array([dist * math.cos(azim), dist * math.sin(azim)])
            height = config.release_height_ft
            if config.release_height_jitter_ft > 0:
                height += rng.normal(0.0, config.release_height_jitter_ft)

            # defender context
            ndd = float(np.clip(
                rng.gamma(config.ndd_gamma_shape, config.ndd_gamma_scale), *config.ndd_range_ft))
            contest = float(config.pressure.intensity(ndd)) * defender.pressure_scale

            # pressured aim distribution
            mean = shooter.aim_mean.copy()
            mean[0] += config.pressure.depth_shift_ft * contest * shooter.resilience
            mean[2] += (config.pressure.angle_rise_deg
                        + config.pressure.angle_height_coef * (defender.height_in - mean_def_height)
                        ) * contest
            scale = np.array([
                math.sqrt(1.0 + (config.pressure.depth_var_inflation - 1.0) * contest),
                math.sqrt(1.0 + (config.pressure.lr_var_inflation - 1.0) * contest),
                1.0,
            ])
            cov = shooter.aim_cov * np.outer(scale, scale)
            draw = rng.multivariate_normal(mean, cov, method="cholesky")
            depth = float(np.clip(draw[0], -0.9, 2.6))
            lr = float(np.clip(draw[1], -2.5, 2.5))
            angle = float(np.clip(draw[2], 33.0, 64.0))

            made = make_with_back_rim_capture(depth, lr, angle, config.back_rim_capture_ft)
            if config.outcome_flip_prob > 0.0 and rng.random() < config.outcome_flip_prob:
                made = not made

            traj = sample_trajectory(
                ReleaseState((float(release_xy[0]), float(release_xy[1])), height),
                TargetCrossing(depth, lr, angle),
                rng,
                noise_sigma_ft=config.tracking_noise_ft,
                extra_frames=config.extra_frames_past_rim,
            )
            pts = traj.points
            corrupted = False
            if config.corrupt_fraction > 0.0 and rng.random() < config.corrupt_fraction:
                corrupted = True
                if rng.random() < 0.5:
                    pts = pts.copy()
                    pts[:, 2] += rng.normal(0.0, 1.2, len(pts))
                else:
                    pts = pts[: max(3, len(pts) // 8)]

            # defender placement at the release frame; positive contest angle
            # puts the defender on the shooter's right
            to_rim = -release_xy / np.linalg.norm(release_xy)
            chi = math.radians(rng.normal(0.0, config.contest_angle_sd_deg))
            defender_xy = release_xy + ndd * _rotate(to_rim, -chi)

            player_local = np.empty((10, 2))
            t_spots = iter(_TEAMMATE_SPOTS)
            o_spots = iter(_OPPONENT_SPOTS)
            for j in range(len(on_court_s)):
                player_local[j] = release_xy if j == si else next(t_spots)
            for j in range(len(on_court_d)):
                player_local[5 + j] = defender_xy if j == di else next(o_spots)
            player_court = np.array([
                from_local_frame((p[0], p[1], 0.0), hoop_end)[:2] for p in player_local
            ])
            ball_court = np.array([from_local_frame(tuple(p), hoop_end) for p in pts])

            t0 = k * 30.0
            times = np.round(t0 + np.arange(len(pts)) / FRAME_RATE_HZ, 2)

            shot_id = f"T{shot_counter:06d}"
            shot_counter += 1
            shots.append(SimShot(
                shot_id=shot_id,
                shooter_id=shooter.player_id,
                release_frame=frame_cursor,
                outcome=int(made),
                ball_points=ball_court,
                times_s=times,
                player_xy=player_court,
            ))
            frame_cursor += len(pts)
            truth.append(GroundTruthShot(
                shot_id=shot_id,
                game_id=game_id,
                shooter_id=shooter.player_id,
                defender_id=defender.player_id,
                ndd_ft=ndd,
                contest_intensity=contest,
                true_depth_ft=depth,
                true_lr_ft=lr,
                true_angle_deg=angle,
                outcome=int(made),
                corrupted=corrupted,
            ))

        games.append(SimGame(
            game_id=game_id,
            hoop_end=hoop_end,
            player_ids=ids,
            player_teams=teams,
            shots=tuple(shots),
        ))

    return SeasonData(
        config=config,
        shooter_pool=shooters,
        defender_pool=defenders,
        games=games,
        ground_truth=truth,
    )


# --- file emission ---------------------------------------------------------------

def _position_tag(height_in: float) -> str:
    if height_in <= 76.0:
        return "G"
    if height_in <= 81.0:
        return "F"
    return "C"


def write_season(season: SeasonData, out_dir: str | Path) -> dict[str, Path]:
    """Emit the ingest-compatible season files plus the ground-truth log.

    Floats are written with ``repr`` so values round-trip exactly; output
    bytes depend only on the season content.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "tracking": out / "tracking.jsonl",
        "events": out / "events.csv",
        "roster": out / "roster.csv",
        "ground_truth": out / "ground_truth.csv",
    }

    with paths["tracking"].open("w", encoding="utf-8", newline="\n") as fh:
        for game in season.games:
            prefix = f'{{"game_id":"{game.game_id}","t":'
            for shot in game.shots:
                players = ",".join(
                    f'{{"id":"{pid}","team":"{team}","x":{x!r},"y":{y!r}}}'
                    for pid, team, (x, y) in zip(
                        game.player_ids, game.player_teams, shot.player_xy.tolist())
                )
                for t, (bx, by, bz) in zip(shot.times_s.tolist(), shot.ball_points.tolist()):
                    fh.write(f'{prefix}{t!r},"ball":[{bx!r},{by!r},{bz!r}],"players":[{players}]}}\n')

    with paths["events"].open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("shot_id,game_id,shooter_id,release_frame,outcome,hoop_end\n")
        for game in season.games:
            for shot in game.shots:
                fh.write(f"{shot.shot_id},{game.game_id},{shot.shooter_id},"
                         f"{shot.release_frame},{shot.outcome},{game.hoop_end}\n")

    with paths["roster"].open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("player_id,height_in,position\n")
        entries = [(s.player_id, s.height_in) for s in season.shooter_pool]
        entries += [(d.player_id, d.height_in) for d in season.defender_pool]
        for pid, height in sorted(entries):
            fh.write(f"{pid},{height!r},{_position_tag(height)}\n")

    with paths["ground_truth"].open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("shot_id,game_id,shooter_id,defender_id,ndd_ft,contest_intensity,"
                 "true_depth_ft,true_lr_ft,true_angle_deg,outcome,corrupted\n")
        for r in season.ground_truth:
            fh.write(f"{r.shot_id},{r.game_id},{r.shooter_id},{r.defender_id},"
                     f"{r.ndd_ft!r},{r.contest_intensity!r},{r.true_depth_ft!r},"
                     f"{r.true_lr_ft!r},{r.true_angle_deg!r},{r.outcome},{int(r.corrupted)}\n")

    return paths
