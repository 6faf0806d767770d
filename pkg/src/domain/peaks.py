from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.configs import settings
from src.core.errors import DomainError
from src.models.results import PeakRecord, PeakTrack


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive (start, end) index pairs of the True runs in mask."""
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def detect_peaks(
    curve: Sequence[float],
    threshold_frac: Optional[float] = None,
    min_gap: Optional[int] = None,
    n: Optional[Sequence[int]] = None,
) -> List[PeakRecord]:
    """
    Peak regions of a real time series.

    A region is a maximal run of samples at or above threshold_frac times the
    global maximum. Regions whose gap is smaller than min_gap samples are
    merged. The center is the first argmax inside the region.

    Args:
        curve: Real samples, e.g. M_lk(n) for n = 0..n_max
        threshold_frac: Fraction of the global maximum (defaults to settings)
        min_gap: Merge distance in samples (defaults to settings)
        n: Kick counts of the samples (defaults to 0..len-1)

    Returns:
        list: PeakRecord per region, ordered by time
    """
    threshold_frac = settings.peak_threshold_frac if threshold_frac is None else threshold_frac
    min_gap = settings.peak_min_gap if min_gap is None else min_gap
    if not 0.0 < threshold_frac < 1.0:
        raise DomainError(f"threshold_frac must lie in (0, 1), got {threshold_frac}")
    if min_gap < 0:
        raise DomainError(f"min_gap must be >= 0, got {min_gap}")

    values = np.asarray(curve, dtype=float)
    if values.size == 0 or not np.max(values) > 0.0:
        return []
    times = np.arange(values.size) if n is None else np.asarray(n, dtype=int)
    threshold = threshold_frac * float(np.max(values))

    merged: List[List[int]] = []
    for start, end in _runs(values >= threshold):
        if merged and start - merged[-1][1] < min_gap:
            merged[-1][1] = end
        else:
            merged.append([start, end])

    records = []
    for start, end in merged:
        center = start + int(np.argmax(values[start : end + 1]))
        records.append(
            PeakRecord(
                center_n=int(times[center]),
                height=float(values[center]),
                n_start=int(times[start]),
                n_end=int(times[end]),
                threshold=threshold,
            )
        )
    return records


def track_peak_centers(
    curves: Dict[float, Sequence[float]],
    threshold_frac: Optional[float] = None,
    min_gap: Optional[int] = None,
    n: Optional[Sequence[int]] = None,
) -> Tuple[List[PeakTrack], Optional[float]]:
    """
    First and second peak of every echo curve, ordered by k.

    The first peak is the earliest region. The second is the tallest of the
    later regions, so a split second peak is followed through its dominant
    half. The merge point is the smallest k with a single region after some
    smaller k showed two or more.

    Args:
        curves: k -> M_lk(n) at fixed l
        threshold_frac: Passed to detect_peaks
        min_gap: Passed to detect_peaks
        n: Kick counts shared by all curves

    Returns:
        tuple: (tracks ordered by k, merge k or None)
    """
    tracks = []
    merge_k = None
    seen_pair = False
    for k in sorted(curves):
        peaks = detect_peaks(curves[k], threshold_frac, min_gap, n)
        first = peaks[0] if peaks else None
        second = max(peaks[1:], key=lambda p: p.height) if len(peaks) > 1 else None
        tracks.append(PeakTrack(k=float(k), first=first, second=second, n_peaks=len(peaks)))

        if len(peaks) >= 2:
            seen_pair = True
        elif len(peaks) == 1 and seen_pair and merge_k is None:
            merge_k = k
    return tracks, merge_k
