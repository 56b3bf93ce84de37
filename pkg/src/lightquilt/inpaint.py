"""Hole filling with Telea's fast-marching inpainting.

The hole is filled from its boundary inward in order of arrival time of
a unit-speed front (an eikonal solution). Each pixel reached by the
front gets a weighted average of the already-known pixels within ``radius``; the
weight multiplies three factors:

* direction: alignment of the sample offset with the front normal,
* geometric distance: ``1 / |r|^2``,
* level-set distance: ``1 / (1 + |T_sample - T_pixel|)``.

Only the zeroth-order term of the original method is used (no image
gradient correction), so every filled value is a convex combination of
known samples.
"""

from __future__ import annotations

import heapq
import math
from enum import IntEnum

import numpy as np
from numba import njit

from .errors import DimensionMismatch, InvalidValue, MaskCoversEverything, NoKnownNeighbor
from .imagecore import as_image, to_uint8

_EPS = 1e-6


class Label(IntEnum):
    KNOWN = 0
    BAND = 1
    INSIDE = 2


@njit(cache=True)
def _upwind(a, b):
    """Arrival time from the smallest settled horizontal (a) and vertical (b) times."""
    if math.isinf(a) or math.isinf(b):
        return min(a, b) + 1.0
    disc = 2.0 - (a - b) * (a - b)
    if disc >= 0.0:
        t = (a + b + math.sqrt(disc)) / 2.0
        if t >= max(a, b):
            return t
    return min(a, b) + 1.0


def solve_eikonal_step(neighbors) -> float:
    """Upwind update of the arrival time from the 4-neighborhood.

    ``neighbors`` holds ``(time, label)`` samples for left, right, up and down
    in that order; missing neighbors are ``None``. INSIDE samples carry no
    information and are ignored.
    """
    neighbors = list(neighbors) + [None] * (4 - len(neighbors))
    axes = []
    for pair in (neighbors[0:2], neighbors[2:4]):
        ts = [e[0] for e in pair if e is not None and e[1] != Label.INSIDE]
        axes.append(min(ts) if ts else math.inf)
    a, b = axes
    if math.isinf(a) and math.isinf(b):
        raise NoKnownNeighbor("no KNOWN or BAND neighbor to update from")
    return float(_upwind(float(a), float(b)))


@njit(cache=True)
def _settled_time(times, flags, i, j):
    # smallest horizontal and vertical times among non-INSIDE neighbors
    h, w = flags.shape
    a = np.inf
    b = np.inf
    if j > 0 and flags[i, j - 1] != 2:
        a = min(a, times[i, j - 1])
    if j + 1 < w and flags[i, j + 1] != 2:
        a = min(a, times[i, j + 1])
    if i > 0 and flags[i - 1, j] != 2:
        b = min(b, times[i - 1, j])
    if i + 1 < h and flags[i + 1, j] != 2:
        b = min(b, times[i + 1, j])
    return _upwind(a, b)


@njit(cache=True)
def _grad_axis(times, flags, i, j, di, dj):
    """Central difference where both sides are settled, one-sided otherwise, else 0."""
    h, w = flags.shape
    li, lj = i - di, j - dj
    hi, hj = i + di, j + dj
    lo_ok = 0 <= li < h and 0 <= lj < w and flags[li, lj] != 2
    hi_ok = 0 <= hi < h and 0 <= hj < w and flags[hi, hj] != 2
    if lo_ok and hi_ok:
        return (times[hi, hj] - times[li, lj]) / 2.0
    if hi_ok:
        return times[hi, hj] - times[i, j]
    if lo_ok:
        return times[i, j] - times[li, lj]
    return 0.0


@njit(cache=True)
def _fill_pixel(values, times, flags, i, j, radius):
    h, w = flags.shape
    gx = _grad_axis(times, flags, i, j, 0, 1)
    gy = _grad_axis(times, flags, i, j, 1, 0)
    gnorm = math.sqrt(gx * gx + gy * gy)
    acc = np.zeros(values.shape[2])
    total = 0.0
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            d2 = dy * dy + dx * dx
            if d2 == 0 or d2 > radius * radius:
                continue
            y = i + dy
            x = j + dx
            if y < 0 or y >= h or x < 0 or x >= w or flags[y, x] == 2:
                continue
            length = math.sqrt(d2)
            ry = float(-dy)
            rx = float(-dx)
            if gnorm > 0.0:
                direction = abs(rx * gx + ry * gy) / (max(length, _EPS) * gnorm)
                direction = max(direction, _EPS)
            else:
                direction = 1.0
            dst = 1.0 / max(d2, _EPS)
            lev = 1.0 / (1.0 + abs(times[y, x] - times[i, j]))
            wgt = direction * dst * lev
            total += wgt
            for c in range(values.shape[2]):
                acc[c] += wgt * values[y, x, c]
    for c in range(values.shape[2]):
        values[i, j, c] = acc[c] / total


@njit(cache=True)
def _march(values, flags, times, seeds_i, seeds_j, radius, trace):
    """Run the front over the hole; returns the number of pops written to ``trace``."""
    h, w = flags.shape
    heap = [(0.0, seeds_i[0], seeds_j[0])]
    for k in range(1, seeds_i.size):
        heap.append((0.0, seeds_i[k], seeds_j[k]))
    heapq.heapify(heap)
    n = 0
    last = 0.0
    while len(heap) > 0:
        t, i, j = heapq.heappop(heap)
        if flags[i, j] == 0:
            continue
        if t < last - 1e-9:
            return -1
        last = t
        flags[i, j] = 0
        if n < trace.size:
            trace[n] = t
        n += 1
        for k in range(4):
            ni = i + (0, 0, -1, 1)[k]
            nj = j + (-1, 1, 0, 0)[k]
            if ni < 0 or ni >= h or nj < 0 or nj >= w or flags[ni, nj] != 2:
                continue
            times[ni, nj] = _settled_time(times, flags, ni, nj)
            _fill_pixel(values, times, flags, ni, nj, radius)
            flags[ni, nj] = 1
            heapq.heappush(heap, (times[ni, nj], ni, nj))
    return n


def telea_inpaint(image, mask, radius: int = 3, trace: list | None = None) -> np.ndarray:
    """Fill pixels where ``mask`` is true; other pixels are returned untouched.

    ``trace``, when given, receives the arrival time of every pixel in the
    order it leaves the narrow band.
    """
    image = as_image(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != image.shape[:2]:
        raise DimensionMismatch(f"mask {mask.shape} does not match image {image.shape[:2]}")
    if radius < 1:
        raise InvalidValue("radius", "must be >= 1")
    if not mask.any():
        return image.copy()
    if mask.all():
        raise MaskCoversEverything("the hole mask leaves no known pixels to propagate from")

    values = image.astype(np.float64)
    flags = np.where(mask, Label.INSIDE, Label.KNOWN).astype(np.int8)
    times_init = np.where(mask, np.inf, 0.0)

    # seed band: known pixels 4-adjacent to the hole
    grown = mask.copy()
    grown[1:, :] |= mask[:-1, :]
    grown[:-1, :] |= mask[1:, :]
    grown[:, 1:] |= mask[:, :-1]
    grown[:, :-1] |= mask[:, 1:]
    band = grown & ~mask
    flags[band] = Label.BAND
    seeds_i, seeds_j = (a.astype(np.int64) for a in np.nonzero(band))

    popped_times = np.empty(int(mask.sum() + band.sum()) if trace is not None else 0)
    popped = _march(values, flags, times_init, seeds_i, seeds_j, int(radius), popped_times)
    if popped < 0:
        raise AssertionError("fast-marching arrival times were not monotone")
    if trace is not None:
        trace.extend(popped_times[:popped].tolist())

    out = image.copy()
    out[mask] = to_uint8(values[mask])
    return out
