"""Position sketches and consistent weighted sampling for pair filtering.

A pattern's sketch is the multiset of dataset segments its accepted
occurrences touch.  Sampling follows Ioffe's consistent weighted scheme,
so the probability that two signatures agree at one sample equals the
weighted Jaccard similarity of the underlying multisets.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .model import EventDataset


class NoSignatureError(ValueError):
    """An empty weight map has no signature."""


class SegmentMap:
    """Global segment indexing: every sequence splits into fixed-size chunks."""

    def __init__(self, dataset: EventDataset, segment_len: int = 20) -> None:
        if segment_len < 1:
            raise ValueError("segment length must be positive")
        self.segment_len = segment_len
        self.bases: list[int] = []
        total = 0
        for seq in dataset.sequences:
            self.bases.append(total)
            total += -(len(seq) // -segment_len)
        self.total_segments = total

    def segments_for(self, seq_idx: int, first_event: int, last_event: int) -> range:
        """Global segment ids an occurrence touches; spans count every chunk."""
        base = self.bases[seq_idx]
        lo = first_event // self.segment_len
        hi = last_event // self.segment_len
        return range(base + lo, base + hi + 1)


def weighted_jaccard(w1: Mapping[int, float], w2: Mapping[int, float]) -> float:
    """Sum of per-key minima over sum of per-key maxima; 0 for two empties."""
    if not w1 and not w2:
        return 0.0
    num = 0.0
    den = 0.0
    for key in set(w1) | set(w2):
        a = w1.get(key, 0.0)
        b = w2.get(key, 0.0)
        num += min(a, b)
        den += max(a, b)
    return num / den if den > 0 else 0.0


class IcwsHasher:
    """Consistent weighted sampler over a fixed universe of positions.

    All randomness is drawn once from the seed, so signatures are a pure
    function of the weight map.
    """

    def __init__(self, num_positions: int, num_samples: int = 64, seed: int = 0) -> None:
        if num_positions < 1:
            raise ValueError("need at least one position")
        if num_samples < 1:
            raise ValueError("need at least one sample")
        rng = np.random.default_rng(seed)
        shape = (num_positions, num_samples)
        # Gamma(2, 1) via the sum of two exponentials
        self._r = -np.log(rng.random(shape) * rng.random(shape))
        self._c = -np.log(rng.random(shape) * rng.random(shape))
        self._beta = rng.random(shape)
        self.num_positions = num_positions
        self.num_samples = num_samples

    def signature(self, weights: Mapping[int, float]) -> np.ndarray:
        """Array of shape (2, num_samples): sampled position and its t value."""
        if not weights:
            raise NoSignatureError("cannot sketch an empty weight map")
        items = sorted(weights.items())
        positions = np.array([p for p, _w in items], dtype=np.int64)
        w = np.array([wv for _p, wv in items], dtype=np.float64)
        if np.any(w <= 0):
            raise ValueError("sketch weights must be positive")
        if positions[-1] >= self.num_positions or positions[0] < 0:
            raise ValueError("position outside the sampled universe")
        r = self._r[positions]
        beta = self._beta[positions]
        lnw = np.log(w)[:, None]
        t = np.floor(lnw / r + beta)
        lny = r * (t - beta)
        lna = np.log(self._c[positions]) - lny - r
        winner = np.argmin(lna, axis=0)
        cols = np.arange(self.num_samples)
        return np.stack([positions[winner], t[winner, cols].astype(np.int64)])


def estimated_similarity(sig1: np.ndarray, sig2: np.ndarray) -> float:
    """Fraction of samples on which two signatures fully agree."""
    both = np.all(sig1 == sig2, axis=0)
    return float(np.mean(both))


def promising_pairs(
    patterns: list,
    sketches: list,
    threshold: float,
    min_cooccur: float | None = None,
    totals: list[float] | None = None,
) -> list[tuple[int, int]]:
    """Index pairs (i <= j) whose estimated similarity clears the bar.

    A non-positive threshold with no co-occurrence floor keeps every pair,
    which makes the filter a no-op.  With `min_cooccur`, a pair must also
    reach that expected shared weight, translated per pair into a
    similarity floor against the larger total sketch weight.
    """
    n = len(patterns)
    if threshold <= 0 and min_cooccur is None:
        return [(i, j) for i in range(n) for j in range(i, n)]
    if totals is None:
        totals = [0.0] * n
    sig_pos = np.stack([s[0] for s in sketches]) if sketches else np.zeros((0, 0))
    sig_t = np.stack([s[1] for s in sketches]) if sketches else np.zeros((0, 0))
    out: list[tuple[int, int]] = []
    for i in range(n):
        eq = (sig_pos[i] == sig_pos[i:]) & (sig_t[i] == sig_t[i:])
        sims = eq.mean(axis=1)
        for off, sim in enumerate(sims):
            j = i + off
            bar = threshold
            if min_cooccur is not None:
                big = max(totals[i], totals[j])
                if big > 0:
                    bar = max(bar, min(1.0, min_cooccur / big))
            if sim >= bar:
                out.append((i, j))
    return out
