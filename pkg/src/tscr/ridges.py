"""Peak extraction in the (scale, chirp-rate) plane and ridge association.

Per time slice, strict local maxima of the transform magnitude above a
threshold are the candidate mode locations; maxima that fall inside one
separation zone (relative scale width ``2*delta*a/mu``, chirp-rate width
``2*delta1``) are merged into the stronger one.  Peaks are then linked
frame to frame by greedy nearest-neighbour matching in normalized
(IF, chirp-rate) coordinates, with gap bridging so that ridges survive the
frames where crossing components merge into a single blob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transform import TscrVolume

__all__ = [
    "Peak",
    "PeakSet",
    "RidgeEntry",
    "RidgeSet",
    "SeparationParams",
    "NonEmptyViolation",
    "RidgeCountError",
    "extract_peaks",
    "track_ridges",
    "argmax_in_zone",
    "argmax_in_zone_refined",
    "refine_peak",
    "write_ridges_csv",
]

_FLOAT_FMT = "%.17g"


class NonEmptyViolation(Exception):
    """No above-threshold node inside the requested zone."""


class RidgeCountError(Exception):
    """Fewer ridges found than requested."""

    def __init__(self, expected: int, found: int):
        super().__init__(f"expected {expected} ridges but only found {found}")
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class SeparationParams:
    """Zone half-widths and detection threshold.

    ``delta`` is the dimensionless scale-zone half-width (|mu - a*IF| <
    delta), ``delta1`` the chirp-rate half-width in Hz/s, ``threshold`` an
    absolute magnitude floor.
    """

    delta: float = 0.2
    delta1: float = 30.0
    threshold: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.delta1 > 0:
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")


@dataclass(frozen=True)
class Peak:
    a: float
    lam: float
    value: complex
    magnitude: float
    a_index: int
    lambda_index: int


@dataclass(frozen=True)
class PeakSet:
    b: float
    b_index: int
    peaks: tuple
    threshold: float

    def __len__(self) -> int:
        return len(self.peaks)


@dataclass
class RidgeEntry:
    """One tracked component: per-frame scale/chirp-rate ridge and values."""

    b_indices: np.ndarray
    b_values: np.ndarray
    a_hat: np.ndarray
    lambda_hat: np.ndarray
    u_values: np.ndarray
    observed: np.ndarray  # False on gap-interpolated frames

    def __len__(self) -> int:
        return self.b_indices.size


@dataclass
class RidgeSet:
    entries: list = field(default_factory=list)

    @property
    def k_detected(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i) -> RidgeEntry:
        return self.entries[i]


def _local_maxima(mag: np.ndarray, threshold: float):
    """Strict 8-neighbourhood local maxima above threshold.

    A maximum must beat every existing neighbour and, along any axis with
    at least three nodes, must not sit on the grid border: a value that
    only grows toward the edge of the evaluated window is a clipped
    artifact, not a peak of the underlying surface.
    """
    padded = np.full((mag.shape[0] + 2, mag.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = mag
    center = padded[1:-1, 1:-1]
    is_max = center > threshold
    for dj in (-1, 0, 1):
        for dl in (-1, 0, 1):
            if dj == 0 and dl == 0:
                continue
            neighbor = padded[1 + dj : padded.shape[0] - 1 + dj, 1 + dl : padded.shape[1] - 1 + dl]
            is_max &= center > neighbor
    if mag.shape[0] >= 3:
        is_max[0, :] = False
        is_max[-1, :] = False
    if mag.shape[1] >= 3:
        is_max[:, 0] = False
        is_max[:, -1] = False
    return np.argwhere(is_max)


def extract_peaks(
    volume: TscrVolume,
    b_index: int,
    params: SeparationParams,
    mu: float = 1.0,
) -> PeakSet:
    """All strict local maxima of |U| in one time slice, zone-merged."""
    grid = volume.grid
    if not 0 <= b_index < grid.b_values.size:
        raise IndexError(f"b_index {b_index} out of range")
    plane = volume.values[b_index]
    mag = np.abs(plane)
    cand = _local_maxima(mag, params.threshold)
    order = np.argsort(-mag[cand[:, 0], cand[:, 1]], kind="stable") if cand.size else []
    accepted: list[Peak] = []
    for idx in order:
        j, l = int(cand[idx, 0]), int(cand[idx, 1])
        a = float(grid.a_values[j])
        lam = float(grid.lambda_values[l])
        merged = False
        for p in accepted:
            if abs(a - p.a) < 2.0 * params.delta * p.a / mu and abs(lam - p.lam) < 2.0 * params.delta1:
                merged = True  # same zone, keep the stronger (already accepted)
                break
        if not merged:
            accepted.append(
                Peak(a=a, lam=lam, value=complex(plane[j, l]), magnitude=float(mag[j, l]),
                     a_index=j, lambda_index=l)
            )
    return PeakSet(
        b=float(grid.b_values[b_index]),
        b_index=b_index,
        peaks=tuple(accepted),
        threshold=params.threshold,
    )


def argmax_in_zone(
    volume: TscrVolume,
    b_index: int,
    zone_center,
    params: SeparationParams,
    mu: float = 1.0,
):
    """Maximizer of |U| restricted to the zone around ``zone_center=(a, lam)``.

    Node (a, lam) is in the zone when ``|mu - a * (mu/zone_a)| < delta`` and
    ``|lam - zone_lam| < delta1``.  Deterministic ties: smaller a, then
    smaller lambda.  Raises :class:`NonEmptyViolation` when nothing in the
    zone clears the threshold.
    """
    grid = volume.grid
    zone_a, zone_lam = float(zone_center[0]), float(zone_center[1])
    if_center = mu / zone_a
    a_ok = np.abs(mu - grid.a_values * if_center) < params.delta
    lam_ok = np.abs(grid.lambda_values - zone_lam) < params.delta1
    if not a_ok.any() or not lam_ok.any():
        raise NonEmptyViolation(f"zone around (a={zone_a}, lambda={zone_lam}) misses the grid")
    mag = np.abs(volume.values[b_index])
    sub = mag[np.ix_(a_ok, lam_ok)]
    best = float(sub.max())
    if best <= params.threshold:
        raise NonEmptyViolation(
            f"no node above threshold {params.threshold} in zone (a={zone_a}, lambda={zone_lam})"
        )
    j_sub, l_sub = np.argwhere(sub == best)[0]  # argwhere is row-major: smallest a, then lambda
    j = int(np.flatnonzero(a_ok)[j_sub])
    l = int(np.flatnonzero(lam_ok)[l_sub])
    return float(grid.a_values[j]), float(grid.lambda_values[l]), complex(volume.values[b_index, j, l])


def argmax_in_zone_refined(
    volume: TscrVolume,
    b_index: int,
    zone_center,
    params: SeparationParams,
    evaluator,
    mu: float = 1.0,
):
    """Sub-grid zone maximizer via coordinate-wise refinement.

    Starting from the in-zone grid argmax, the scale coordinate is refined
    by log-magnitude interpolation, then the chirp-rate profile is
    re-evaluated along the zone's lambda nodes at the refined scale (with
    ``evaluator``, see :class:`tscr.transform.PointEvaluator`) and refined
    the same way.  Reading the chirp-rate profile at the refined scale
    matters: at an off-ridge scale column the profile maximum drifts,
    which a coarse scale grid would otherwise leak into the estimate.

    Returns ``(a, lambda, value)`` with ``value`` re-evaluated at the
    refined node.
    """
    grid = volume.grid
    a0, lam0, _ = argmax_in_zone(volume, b_index, zone_center, params, mu=mu)
    j = int(np.argmin(np.abs(grid.a_values - a0)))
    l = int(np.argmin(np.abs(grid.lambda_values - lam0)))
    a_ref, _ = refine_peak(volume, b_index, j, l)
    b = float(grid.b_values[b_index])
    zone_lam_idx = np.flatnonzero(np.abs(grid.lambda_values - float(zone_center[1])) < params.delta1)
    profile = np.array([evaluator(b, a_ref, grid.lambda_values[li]) for li in zone_lam_idx])
    mags = np.abs(profile)
    pos = int(np.argmax(mags))
    lam_ref = float(grid.lambda_values[zone_lam_idx[pos]])
    if 0 < pos < mags.size - 1 and mags[pos - 1] > 0 and mags[pos + 1] > 0:
        y0, y1, y2 = np.log(mags[pos - 1]), np.log(mags[pos]), np.log(mags[pos + 1])
        denom = y0 - 2.0 * y1 + y2
        if denom < 0.0:
            off = float(np.clip(0.5 * (y0 - y2) / denom, -0.5, 0.5))
            step = float(
                grid.lambda_values[zone_lam_idx[pos] + 1] - grid.lambda_values[zone_lam_idx[pos]]
                if zone_lam_idx[pos] + 1 < grid.lambda_values.size
                else grid.lambda_values[zone_lam_idx[pos]] - grid.lambda_values[zone_lam_idx[pos] - 1]
            )
            lam_ref = lam_ref + off * step
    return a_ref, lam_ref, evaluator(b, a_ref, lam_ref)


def refine_peak(volume: TscrVolume, b_index: int, a_index: int, lambda_index: int):
    """Quadratic log-magnitude interpolation of a grid peak along each axis.

    Returns a refined (a, lambda) pair; falls back to the node location at
    grid borders or non-concave fits.
    """
    grid = volume.grid
    mag = np.abs(volume.values[b_index])
    j, l = a_index, lambda_index

    def parabola(y0, y1, y2):
        denom = y0 - 2.0 * y1 + y2
        if denom >= 0.0:
            return 0.0
        off = 0.5 * (y0 - y2) / denom
        return float(np.clip(off, -0.5, 0.5))

    a = float(grid.a_values[j])
    if 0 < j < grid.a_values.size - 1 and mag[j - 1, l] > 0 and mag[j + 1, l] > 0 and mag[j, l] > 0:
        off = parabola(math.log(mag[j - 1, l]), math.log(mag[j, l]), math.log(mag[j + 1, l]))
        # scale lattice is uniform in log(a)
        step = math.log(grid.a_values[min(j + 1, grid.a_values.size - 1)] / grid.a_values[j])
        if j + 1 >= grid.a_values.size:
            step = math.log(grid.a_values[j] / grid.a_values[j - 1])
        a = float(grid.a_values[j] * math.exp(off * step))
    lam = float(grid.lambda_values[l])
    if 0 < l < grid.lambda_values.size - 1 and mag[j, l - 1] > 0 and mag[j, l + 1] > 0 and mag[j, l] > 0:
        off = parabola(math.log(mag[j, l - 1]), math.log(mag[j, l]), math.log(mag[j, l + 1]))
        step = grid.lambda_values[l + 1] - grid.lambda_values[l]
        lam = float(grid.lambda_values[l] + off * step)
    return a, lam


class _Trajectory:
    __slots__ = ("obs", "last_b", "last_if", "recent_lams", "missed", "total_mag")

    #: rolling window for the chirp-rate memory; the median over it resists
    #: the interference-corrupted frames near a crossover
    LAMBDA_MEMORY = 25

    def __init__(self, frame: int, b: float, peak: Peak, mu: float):
        self.obs = [(frame, peak)]
        self.last_b = b
        self.last_if = mu / peak.a
        self.recent_lams = [peak.lam]
        self.missed = 0
        self.total_mag = peak.magnitude

    def add(self, frame: int, b: float, peak: Peak, mu: float):
        self.obs.append((frame, peak))
        self.last_b = b
        self.last_if = mu / peak.a
        self.recent_lams.append(peak.lam)
        if len(self.recent_lams) > self.LAMBDA_MEMORY:
            self.recent_lams.pop(0)
        self.missed = 0
        self.total_mag += peak.magnitude

    def predict(self, b: float):
        """Extrapolate along the trajectory's own chirp rate (IF slope)."""
        lam = float(np.median(self.recent_lams))
        return self.last_if + lam * (b - self.last_b), lam

    @property
    def length(self) -> int:
        return len(self.obs)


def track_ridges(
    peaks_over_time,
    k_expected: int | None = None,
    mu: float = 1.0,
    volume: TscrVolume | None = None,
    min_length_frac: float = 0.05,
    max_gap_frac: float = 0.5,
    if_gate_frac: float = 0.2,
    lambda_gate: float = 30.0,
) -> RidgeSet:
    """Associate per-frame peaks into ridges.

    Greedy nearest-neighbour linking in normalized (IF, chirp rate)
    coordinates.  Each trajectory is extrapolated along its own chirp-rate
    estimate, and a peak is only eligible when it falls inside a zone-sized
    window around the prediction (relative IF gate ``if_gate_frac``,
    absolute chirp-rate gate ``lambda_gate``); this keeps crossover blobs
    from capturing foreign ridges.  A trajectory survives up to
    ``max_gap_frac`` of the frame count without a match, and interior gaps
    of the kept trajectories are filled by linear interpolation of
    (IF, lambda).  With ``k_expected`` the longest/strongest trajectories
    are kept; fewer raises :class:`RidgeCountError`.
    """
    frames = list(peaks_over_time)
    n_frames = len(frames)
    if n_frames == 0 or all(len(ps) == 0 for ps in frames):
        if k_expected:
            raise RidgeCountError(k_expected, 0)
        return RidgeSet([])

    all_ifs = [mu / p.a for ps in frames for p in ps.peaks]
    all_lams = [p.lam for ps in frames for p in ps.peaks]
    if volume is not None:
        ifs = mu / volume.grid.a_values
        if_span = float(ifs.max() - ifs.min())
        lam_span = float(volume.grid.lambda_values.max() - volume.grid.lambda_values.min())
    else:
        if_span = max(all_ifs) - min(all_ifs) if all_ifs else 0.0
        lam_span = max(all_lams) - min(all_lams) if all_lams else 0.0
    if_span = if_span if if_span > 0 else 1.0
    lam_span = lam_span if lam_span > 0 else 1.0

    max_gap = max(1, int(round(max_gap_frac * n_frames)))
    active: list[_Trajectory] = []
    finished: list[_Trajectory] = []

    for frame_idx, ps in enumerate(frames):
        b = frames[frame_idx].b
        peaks = list(ps.peaks)
        pairs = []
        for ti, traj in enumerate(active):
            if_pred, lam_pred = traj.predict(b)
            for pi, p in enumerate(peaks):
                d_if = abs(mu / p.a - if_pred)
                d_lam = abs(p.lam - lam_pred)
                if d_if > if_gate_frac * max(if_pred, 1e-30) or d_lam > lambda_gate:
                    continue
                pairs.append((d_if / if_span + d_lam / lam_span, ti, pi))
        pairs.sort(key=lambda t: (t[0], t[1], t[2]))
        used_t: set[int] = set()
        used_p: set[int] = set()
        for _, ti, pi in pairs:
            if ti in used_t or pi in used_p:
                continue
            active[ti].add(frame_idx, b, peaks[pi], mu)
            used_t.add(ti)
            used_p.add(pi)
        for pi, p in enumerate(peaks):
            if pi not in used_p:
                active.append(_Trajectory(frame_idx, b, p, mu))
        still_active = []
        for ti, traj in enumerate(active):
            if ti not in used_t and traj.obs[-1][0] != frame_idx:
                traj.missed += 1
            if traj.missed > max_gap:
                finished.append(traj)
            else:
                still_active.append(traj)
        active = still_active
    finished.extend(active)

    min_length = max(2, int(round(min_length_frac * n_frames)))
    trajectories = [t for t in finished if t.length >= min_length]
    trajectories.sort(key=lambda t: (-t.length, -t.total_mag))
    if k_expected is not None:
        if len(trajectories) < k_expected:
            raise RidgeCountError(k_expected, len(trajectories))
        trajectories = trajectories[:k_expected]
        # stable presentation order: by mean IF, high to low
        trajectories.sort(key=lambda t: -np.mean([mu / p.a for _, p in t.obs]))

    entries = []
    for traj in trajectories:
        obs_frames = np.array([f for f, _ in traj.obs])
        first, last = int(obs_frames[0]), int(obs_frames[-1])
        span = np.arange(first, last + 1)
        obs_if = np.array([mu / p.a for _, p in traj.obs])
        obs_lam = np.array([p.lam for _, p in traj.obs])
        if_interp = np.interp(span, obs_frames, obs_if)
        lam_interp = np.interp(span, obs_frames, obs_lam)
        a_interp = mu / if_interp
        observed = np.isin(span, obs_frames)
        u_vals = np.empty(span.size, dtype=np.complex128)
        obs_map = {f: p for f, p in traj.obs}
        for i, f in enumerate(span):
            if f in obs_map:
                u_vals[i] = obs_map[f].value
            elif volume is not None:
                j = int(np.argmin(np.abs(volume.grid.a_values - a_interp[i])))
                l = int(np.argmin(np.abs(volume.grid.lambda_values - lam_interp[i])))
                u_vals[i] = volume.values[f, j, l]
            else:
                u_vals[i] = np.interp(f, obs_frames, np.array([p.value for _, p in traj.obs]))
        b_vals = (
            volume.grid.b_values[span]
            if volume is not None
            else np.array([frames[f].b for f in span])
        )
        entries.append(
            RidgeEntry(
                b_indices=span,
                b_values=np.asarray(b_vals, dtype=float),
                a_hat=a_interp,
                lambda_hat=lam_interp,
                u_values=u_vals,
                observed=observed,
            )
        )
    return RidgeSet(entries)


def write_ridges_csv(path, ridge_set: RidgeSet, mu: float = 1.0):
    with open(path, "w", encoding="utf-8") as f:
        f.write("component,b,a_hat,lambda_hat,if_hat,re,im,abs\n")
        for ci, entry in enumerate(ridge_set):
            for i in range(len(entry)):
                u = entry.u_values[i]
                vals = (
                    entry.b_values[i],
                    entry.a_hat[i],
                    entry.lambda_hat[i],
                    mu / entry.a_hat[i],
                    u.real,
                    u.imag,
                    abs(u),
                )
                f.write(str(ci + 1) + "," + ",".join(_FLOAT_FMT % v for v in vals) + "\n")
