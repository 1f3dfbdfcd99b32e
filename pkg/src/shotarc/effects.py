"""Defender-impact and shooter-resilience regressions with sum-to-zero contrasts.

Two linear probability models over per-shot responses (binary outcome or
modeled make probability):

  defender kind:    Y = b0 + alpha_shooter + gamma_defender
  resilience kind:  Y = b0 + alpha_shooter + delta*NDD + gamma_shooter*NDD

Sum-to-zero coding makes b0 a grand mean, alpha/gamma deviations from it.
In the resilience model the default parametrization centers NDD at its
league mean and includes a common slope, so each shooter's gamma is the
deviation of their NDD sensitivity from the league average.  The literal
variant (per-shooter slopes, no common column) is available via
``common_slope=False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PlayerId

RESPONSE_KINDS = ("raw", "prob")
MODEL_KINDS = ("defender", "resilience")


class EffectsError(ValueError):
    pass


class RankDeficientError(EffectsError):
    def __init__(self, message: str, aliased: tuple[str, ...] = ()):
        super().__init__(message)
        self.aliased = aliased


@dataclass(frozen=True)
class EffectsDataset:
    """Per-shot rows joining shooter, defender, NDD, and responses."""

    shooters: np.ndarray      # (n,) str
    defenders: np.ndarray     # (n,) str
    ndd_ft: np.ndarray        # (n,) float
    outcomes: np.ndarray      # (n,) float in {0, 1}
    probs: np.ndarray | None = None   # (n,) float in [0, 1]
    game_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        n = len(self.shooters)
        for name in ("defenders", "ndd_ft", "outcomes"):
            if len(getattr(self, name)) != n:
                raise EffectsError(f"column {name} has mismatched length")
        if self.probs is not None and len(self.probs) != n:
            raise EffectsError("column probs has mismatched length")
        if self.game_ids is not None and len(self.game_ids) != n:
            raise EffectsError("column game_ids has mismatched length")
        if np.any(self.ndd_ft < 0):
            raise EffectsError("ndd must be non-negative")
        if self.probs is not None and (np.any(self.probs < 0) or np.any(self.probs > 1)):
            raise EffectsError("probs must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.shooters)

    def response(self, kind: str) -> np.ndarray:
        if kind == "raw":
            return np.asarray(self.outcomes, dtype=float)
        if kind == "prob":
            if self.probs is None:
                raise EffectsError("dataset has no prob column")
            return np.asarray(self.probs, dtype=float)
        raise EffectsError(f"unknown response kind {kind!r}")

    def subset(self, mask: np.ndarray) -> "EffectsDataset":
        return EffectsDataset(
            shooters=self.shooters[mask],
            defenders=self.defenders[mask],
            ndd_ft=self.ndd_ft[mask],
            outcomes=self.outcomes[mask],
            probs=None if self.probs is None else self.probs[mask],
            game_ids=None if self.game_ids is None else self.game_ids[mask],
        )


def apply_min_shots_filter(
    dataset: EffectsDataset,
    threshold: int = 100,
    roles: tuple[str, ...] = ("shooter", "defender"),
) -> EffectsDataset:
    """Drop rows of players below the shot-count threshold, to a fixed point.

    Removing one player's rows can push another below the threshold, so the
    scan repeats until no further rows are removed.
    """
    data = dataset
    while True:
        keep = np.ones(len(data), dtype=bool)
        if "shooter" in roles:
            ids, counts = np.unique(data.shooters, return_counts=True)
            low = set(ids[counts < threshold])
            if low:
                keep &= ~np.isin(data.shooters, list(low))
        if "defender" in roles:
            ids, counts = np.unique(data.defenders, return_counts=True)
            low = set(ids[counts < threshold])
            if low:
                keep &= ~np.isin(data.defenders, list(low))
        if keep.all():
            return data
        data = data.subset(keep)


def _contrast_columns(labels: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Sum-to-zero coding: one column per level but the last; the last level is -1 everywhere."""
    n_levels = len(levels)
    idx = np.searchsorted(levels, labels)
    cols = np.zeros((len(labels), n_levels - 1))
    in_contrast = idx < n_levels - 1
    cols[np.arange(len(labels))[in_contrast], idx[in_contrast]] = 1.0
    cols[~in_contrast, :] = -1.0
    return cols


@dataclass(frozen=True)
class EffectsDesign:
    matrix: np.ndarray
    column_names: tuple[str, ...]
    shooter_levels: np.ndarray
    defender_levels: np.ndarray | None
    model_kind: str
    common_slope: bool
    ndd_center: float


def build_design(
    dataset: EffectsDataset,
    model_kind: str,
    common_slope: bool = True,
) -> EffectsDesign:
    """Full-rank contrast-coded design for either model kind."""
    if model_kind not in MODEL_KINDS:
        raise EffectsError(f"unknown model kind {model_kind!r}")
    shooter_levels = np.unique(dataset.shooters)
    if len(shooter_levels) < 2:
        raise EffectsError("need at least 2 shooters after filtering")
    cols = [np.ones((len(dataset), 1))]
    names = ["intercept"]
    s_contrasts = _contrast_columns(dataset.shooters, shooter_levels)
    cols.append(s_contrasts)
    names += [f"shooter[{p}]" for p in shooter_levels[:-1]]

    defender_levels: np.ndarray | None = None
    ndd_center = 0.0
    if model_kind == "defender":
        defender_levels = np.unique(dataset.defenders)
        if len(defender_levels) < 2:
            raise EffectsError("need at least 2 defenders after filtering")
        cols.append(_contrast_columns(dataset.defenders, defender_levels))
        names += [f"defender[{p}]" for p in defender_levels[:-1]]
    else:
        ndd = np.asarray(dataset.ndd_ft, dtype=float)
        if common_slope:
            ndd_center = float(ndd.mean())
            centered = ndd - ndd_center
            cols.append(centered[:, None])
            names.append("ndd")
            cols.append(s_contrasts * centered[:, None])
            names += [f"ndd:shooter[{p}]" for p in shooter_levels[:-1]]
        else:
            # literal variant: an uncentered slope per shooter, no common column
            idx = np.searchsorted(shooter_levels, dataset.shooters)
            slopes = np.zeros((len(dataset), len(shooter_levels)))
            slopes[np.arange(len(dataset)), idx] = ndd
            cols.append(slopes)
            names += [f"ndd:shooter[{p}]" for p in shooter_levels]

    return EffectsDesign(
        matrix=np.hstack(cols),
        column_names=tuple(names),
        shooter_levels=shooter_levels,
        defender_levels=defender_levels,
        model_kind=model_kind,
        common_slope=common_slope,
        ndd_center=ndd_center,
    )


@dataclass(frozen=True)
class EffectEstimates:
    """Fitted intercept and player effects, expanded to every level."""

    model_kind: str
    response_kind: str
    intercept: float
    shooter_effects: dict[PlayerId, float]
    effect_role: str                       # which role the headline gammas describe
    effects: dict[PlayerId, float]         # defender impacts, or resilience slopes
    common_ndd_slope: float | None
    residual_sse: float
    n_rows: int
    player_counts: dict[PlayerId, int] = field(default_factory=dict)
    player_mean_response: dict[PlayerId, float] = field(default_factory=dict)


def _expand_contrasts(levels: np.ndarray, coefs: np.ndarray) -> dict[str, float]:
    full = np.append(coefs, -coefs.sum())
    return {str(p): float(v) for p, v in zip(levels, full)}


def fit_effects(
    dataset: EffectsDataset,
    model_kind: str,
    response_kind: str,
    common_slope: bool = True,
) -> EffectEstimates:
    """Ordinary least squares on the contrast design; effects sum to zero."""
    if response_kind not in RESPONSE_KINDS:
        raise EffectsError(f"unknown response kind {response_kind!r}")
    y = dataset.response(response_kind)
    design = build_design(dataset, model_kind, common_slope=common_slope)
    X = design.matrix
    coefs, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        aliased = _find_aliased(X, design.column_names)
        raise RankDeficientError(
            f"design rank {rank} < {X.shape[1]} columns; aliased: {', '.join(aliased) or 'unknown'}",
            aliased=aliased,
        )
    resid = y - X @ coefs
    sse = float(resid @ resid)

    n_s = len(design.shooter_levels) - 1
    intercept = float(coefs[0])
    shooter_effects = _expand_contrasts(design.shooter_levels, coefs[1:1 + n_s])

    common = None
    if model_kind == "defender":
        assert design.defender_levels is not None
        effects = _expand_contrasts(design.defender_levels, coefs[1 + n_s:])
        role = "defender"
        count_col, levels = dataset.defenders, design.defender_levels
    else:
        role = "shooter"
        count_col, levels = dataset.shooters, design.shooter_levels
        if common_slope:
            common = float(coefs[1 + n_s])
            effects = _expand_contrasts(design.shooter_levels, coefs[2 + n_s:])
        else:
            effects = {str(p): float(v) for p, v in zip(design.shooter_levels, coefs[1 + n_s:])}

    counts: dict[str, int] = {}
    means: dict[str, float] = {}
    for p in levels:
        mask = count_col == p
        counts[str(p)] = int(mask.sum())
        means[str(p)] = float(y[mask].mean())

    return EffectEstimates(
        model_kind=model_kind,
        response_kind=response_kind,
        intercept=intercept,
        shooter_effects=shooter_effects,
        effect_role=role,
        effects=effects,
        common_ndd_slope=common,
        residual_sse=sse,
        n_rows=len(dataset),
        player_counts=counts,
        player_mean_response=means,
    )


def _find_aliased(X: np.ndarray, names: tuple[str, ...]) -> tuple[str, ...]:
    """Best-effort identification of linearly dependent columns via pivoted QR."""
    import scipy.linalg

    _, r, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
    dropped = piv[np.sum(diag > tol):]
    return tuple(names[j] for j in sorted(dropped))


@dataclass(frozen=True)
class RankedPlayer:
    rank: int
    player_id: PlayerId
    effect: float
    effect_per_100: float
    n_shots: int
    opp_mean_prob: float


def rank_players(estimates: EffectEstimates, direction: str = "ascending") -> list[RankedPlayer]:
    """Ordered effect table; effects also scaled per 100 shots.

    'ascending' puts the most negative effect first (best defenders);
    'descending' the most positive first (most resilient shooters).
    Ties break lexicographically by player id.
    """
    if direction not in ("ascending", "descending"):
        raise EffectsError(f"unknown direction {direction!r}")
    sign = 1.0 if direction == "ascending" else -1.0
    ordered = sorted(estimates.effects.items(), key=lambda kv: (sign * kv[1], kv[0]))
    return [
        RankedPlayer(
            rank=i + 1,
            player_id=pid,
            effect=val,
            effect_per_100=val * 100.0,
            n_shots=estimates.player_counts.get(pid, 0),
            opp_mean_prob=estimates.player_mean_response.get(pid, float("nan")),
        )
        for i, (pid, val) in enumerate(ordered)
    ]
