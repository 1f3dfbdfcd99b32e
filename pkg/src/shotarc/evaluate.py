"""Season-level analyses: contest variance ratios, factor profiles, depth-bin
make rates, subsample MSE curves, and split-half rank stability.

All procedures are order-independent in their inputs and bit-reproducible
under a fixed seed.  Tables are returned as plain dataclasses; CSV emission
lives in the CLI layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .effects import (
    EffectsDataset,
    EffectsError,
    RankDeficientError,
    apply_min_shots_filter,
    fit_effects,
)

OPEN_NDD_FT = 6.0
CONTESTED_NDD_FT = 4.0


class EvalError(ValueError):
    pass


def _rank_with_ties(x: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties sharing the mean of their positions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x), dtype=float)
    ranks[order] = np.arange(1, len(x) + 1, dtype=float)
    # average the ranks within tied groups
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        if j > i:
            ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise EvalError("sequences differ in length")
    if len(x) < 2:
        raise EvalError("need at least 2 observations")
    rx, ry = _rank_with_ties(x), _rank_with_ties(y)
    sx, sy = rx.std(), ry.std()
    if sx == 0.0 or sy == 0.0:
        raise EvalError("zero rank variance")
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx, len(rx) + 1.0 - ry):
        return -1.0
    rho = float(np.mean((rx - rx.mean()) * (ry - ry.mean())) / (sx * sy))
    return min(1.0, max(-1.0, rho))


# --- contested/open variance ----------------------------------------------------

@dataclass(frozen=True)
class VarianceComparison:
    factor: str
    contested_var: float
    open_var: float
    ratio: float
    ci_low: float
    ci_high: float
    n_contested: int
    n_open: int


def variance_comparison(
    depth_ft: np.ndarray,
    lr_ft: np.ndarray,
    ndd_ft: np.ndarray,
    open_threshold_ft: float = OPEN_NDD_FT,
    contested_threshold_ft: float = CONTESTED_NDD_FT,
    n_bootstrap: int = 1000,
    seed: int = 0,
    min_group: int = 30,
) -> dict[str, VarianceComparison]:
    """Contested/open variance ratios for depth and left-right, with
    percentile bootstrap intervals."""
    depth = np.asarray(depth_ft, dtype=float)
    lr = np.asarray(lr_ft, dtype=float)
    ndd = np.asarray(ndd_ft, dtype=float)
    contested = ndd < contested_threshold_ft
    is_open = ndd > open_threshold_ft
    n_c, n_o = int(contested.sum()), int(is_open.sum())
    if n_c < min_group or n_o < min_group:
        raise EvalError(f"group below minimum size {min_group}: contested={n_c}, open={n_o}")

    rng = np.random.default_rng(seed)
    out: dict[str, VarianceComparison] = {}
    for name, values in (("depth", depth), ("lr", lr)):
        vc = values[contested]
        vo = values[is_open]
        ratio = float(vc.var(ddof=1) / vo.var(ddof=1))
        idx_c = rng.integers(0, n_c, size=(n_bootstrap, n_c))
        idx_o = rng.integers(0, n_o, size=(n_bootstrap, n_o))
        boot = vc[idx_c].var(axis=1, ddof=1) / vo[idx_o].var(axis=1, ddof=1)
        lo, hi = np.percentile(boot, [2.5, 97.5])
        out[name] = VarianceComparison(
            factor=name,
            contested_var=float(vc.var(ddof=1)),
            open_var=float(vo.var(ddof=1)),
            ratio=ratio,
            ci_low=float(lo),
            ci_high=float(hi),
            n_contested=n_c,
            n_open=n_o,
        )
    return out


# --- binned summaries --------------------------------------------------------------

@dataclass(frozen=True)
class BinRow:
    center: float
    mean: float
    se: float
    n: int


@dataclass(frozen=True)
class BinnedProfile:
    bin_by: str
    value: str
    rows: list[BinRow]
    trend: float     # Spearman of per-bin means against bin centers


def binned_profiles(
    bin_values: np.ndarray,
    values: np.ndarray,
    bin_edges: np.ndarray,
    bin_by: str = "ndd",
    value: str = "entry_angle",
) -> BinnedProfile:
    """Per-bin mean, standard error, and count, with a monotone-trend statistic.

    Empty bins are reported with n = 0 and NaN mean; the trend uses
    non-empty bins only.
    """
    b = np.asarray(bin_values, dtype=float)
    v = np.asarray(values, dtype=float)
    edges = np.asarray(bin_edges, dtype=float)
    if len(edges) < 2:
        raise EvalError("need at least 2 bin edges")
    rows: list[BinRow] = []
    centers, means = [], []
    for k in range(len(edges) - 1):
        mask = (b >= edges[k]) & (b < edges[k + 1])
        n = int(mask.sum())
        center = 0.5 * (edges[k] + edges[k + 1])
        if n == 0:
            rows.append(BinRow(center=center, mean=float("nan"), se=float("nan"), n=0))
            continue
        vals = v[mask]
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
        rows.append(BinRow(center=center, mean=mean, se=se, n=n))
        centers.append(center)
        means.append(mean)
    trend = float("nan")
    if len(means) >= 2 and len(set(means)) > 1:
        trend = spearman(centers, means)
    return BinnedProfile(bin_by=bin_by, value=value, rows=rows, trend=trend)


@dataclass(frozen=True)
class DepthBinTable:
    rows: list[BinRow]          # center in inches, mean = make fraction
    argmax_center_in: float
    bin_width_in: float


def binned_mean_by_depth(
    depth_ft: np.ndarray,
    response: np.ndarray,
    bin_width_in: float = 1.0,
    min_bin_n: int = 1,
) -> DepthBinTable:
    """Mean response per depth bin (bins centered on multiples of the width).

    With a 0/1 response this is the make percentage by landing depth; with
    modeled probabilities it is the model's depth profile.  The argmax is
    taken over bins with at least ``min_bin_n`` shots.
    """
    depth_in = np.asarray(depth_ft, dtype=float) * 12.0
    y = np.asarray(response, dtype=float)
    if len(depth_in) != len(y):
        raise EvalError("depth and response differ in length")
    if len(y) == 0:
        raise EvalError("no shots")
    centers = np.round(depth_in / bin_width_in) * bin_width_in
    rows: list[BinRow] = []
    best: tuple[float, float] | None = None
    for c in np.unique(centers):
        mask = centers == c
        n = int(mask.sum())
        mean = float(y[mask].mean())
        se = float(y[mask].std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
        rows.append(BinRow(center=float(c), mean=mean, se=se, n=n))
        if n >= min_bin_n and (best is None or mean > best[0]):
            best = (mean, float(c))
    if best is None:
        raise EvalError(f"no bin reaches min_bin_n={min_bin_n}")
    return DepthBinTable(rows=rows, argmax_center_in=best[1], bin_width_in=bin_width_in)


def make_pct_by_depth_bin(
    depth_ft: np.ndarray,
    outcomes: np.ndarray,
    bin_width_in: float = 1.0,
    min_bin_n: int = 1,
) -> DepthBinTable:
    """Make fraction per depth bin; outcomes must be 0/1."""
    y = np.asarray(outcomes, dtype=float)
    if not np.all((y == 0.0) | (y == 1.0)):
        raise EvalError("outcomes must be 0/1")
    return binned_mean_by_depth(depth_ft, y, bin_width_in=bin_width_in, min_bin_n=min_bin_n)


# --- subsample MSE curves (variance-reduction experiment) --------------------------

@dataclass(frozen=True)
class SubsampleSpec:
    fractions: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    n_replicates: int = 20
    seed: int = 0
    unit: str = "game"      # subsampling draws whole games, never loose shots

    def __post_init__(self) -> None:
        if any(not 0.0 < f <= 1.0 for f in self.fractions):
            raise EvalError("fractions must lie in (0, 1]")
        if self.n_replicates < 1:
            raise EvalError("need at least 1 replicate")
        if self.unit != "game":
            raise EvalError(f"unsupported subsampling unit {self.unit!r}")


@dataclass(frozen=True)
class SubsampleResult:
    fraction: float
    response_kind: str
    mse: float
    n_replicates_used: int
    n_dropped: int


def _gamma_vector(estimates, players: np.ndarray) -> np.ndarray:
    return np.array([estimates.effects[p] for p in players])


def subsample_mse(
    dataset: EffectsDataset,
    spec: SubsampleSpec,
    model_kind: str = "defender",
    response_kinds: tuple[str, ...] = ("raw", "prob"),
    min_shots: int = 100,
) -> list[SubsampleResult]:
    """MSE of subsample-fitted effects against full-season raw-response effects.

    The reference fit applies the minimum-shots filter and uses binary
    outcomes.  Each replicate samples games without replacement, keeps rows
    whose players survived the reference filter, refits, and measures the
    mean squared deviation of the headline effects over players present in
    the replicate.  Rank-deficient replicates are dropped and counted.
    """
    if dataset.game_ids is None:
        raise EvalError("dataset must carry game ids for game-unit subsampling")
    reference_data = apply_min_shots_filter(dataset, threshold=min_shots)
    if len(reference_data) == 0:
        raise EvalError("no rows survive the minimum-shots filter")
    reference = fit_effects(reference_data, model_kind, "raw")
    ref_effects = reference.effects

    games = np.unique(np.asarray(reference_data.game_ids))
    rng = np.random.default_rng(spec.seed)
    results: list[SubsampleResult] = []
    for frac in spec.fractions:
        n_games = max(1, int(round(frac * len(games))))
        errors: dict[str, list[float]] = {k: [] for k in response_kinds}
        dropped: dict[str, int] = {k: 0 for k in response_kinds}
        for _ in range(spec.n_replicates):
            chosen = rng.choice(games, size=n_games, replace=False)
            mask = np.isin(reference_data.game_ids, chosen)
            sub = reference_data.subset(mask)
            for kind in response_kinds:
                try:
                    est = fit_effects(sub, model_kind, kind)
                except (RankDeficientError, EffectsError):
                    dropped[kind] += 1
                    continue
                players = np.array(sorted(set(est.effects) & set(ref_effects)))
                if len(players) == 0:
                    dropped[kind] += 1
                    continue
                diff = _gamma_vector(est, players) - np.array([ref_effects[p] for p in players])
                errors[kind].append(float(np.mean(diff**2)))
        for kind in response_kinds:
            used = len(errors[kind])
            results.append(SubsampleResult(
                fraction=frac,
                response_kind=kind,
                mse=float(np.mean(errors[kind])) if used else float("nan"),
                n_replicates_used=used,
                n_dropped=dropped[kind],
            ))
    return results


def split_half_rank_correlation(
    dataset: EffectsDataset,
    model_kind: str = "defender",
    response_kind: str = "raw",
    min_shots: int = 100,
) -> float:
    """Spearman correlation of player effects fitted on each chronological
    half of the season (games sorted by id)."""
    if dataset.game_ids is None:
        raise EvalError("dataset must carry game ids for the chronological split")
    filtered = apply_min_shots_filter(dataset, threshold=min_shots)
    if len(filtered) == 0:
        raise EvalError("no rows survive the minimum-shots filter")
    games = np.unique(np.asarray(filtered.game_ids))
    if len(games) < 2:
        raise EvalError("need at least 2 games to split")
    first = set(games[: len(games) // 2])
    mask = np.isin(filtered.game_ids, list(first))
    half_a = filtered.subset(mask)
    half_b = filtered.subset(~mask)
    est_a = fit_effects(half_a, model_kind, response_kind)
    est_b = fit_effects(half_b, model_kind, response_kind)
    common = sorted(set(est_a.effects) & set(est_b.effects))
    if len(common) < 2:
        raise EvalError("fewer than 2 players present in both halves")
    return spearman(
        [est_a.effects[p] for p in common],
        [est_b.effects[p] for p in common],
    )
