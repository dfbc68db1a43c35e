"""Marching-squares isoline extraction on a masked rectangular field.

Operates in index coordinates: a field value ``f[i, j]`` sits at grid node
``(i, j)``.  Cells touching an invalid node are skipped, crossing points are
placed by linear interpolation along the cell edges, and the resulting
segments are stitched into polylines.  Closed loops are returned with the
first vertex repeated at the end.
"""

from __future__ import annotations

import numpy as np

__all__ = ["isolines"]

# Corner bits within a cell anchored at (i, j):
#   1: (i, j)   2: (i+1, j)   4: (i+1, j+1)   8: (i, j+1)
# Edge ids: 0: (i,j)-(i+1,j)  1: (i+1,j)-(i+1,j+1)  2: (i+1,j+1)-(i,j+1)
#           3: (i,j+1)-(i,j)
_EDGE_CORNERS = ((0, 1), (1, 2), (2, 3), (3, 0))
_SEGMENTS = {
    1: ((3, 0),),
    2: ((0, 1),),
    3: ((3, 1),),
    4: ((1, 2),),
    6: ((0, 2),),
    7: ((3, 2),),
    8: ((2, 3),),
    9: ((0, 2),),
    11: ((1, 2),),
    12: ((1, 3),),
    13: ((0, 1),),
    14: ((0, 3),),
}


def _corner_offsets():
    return ((0, 0), (1, 0), (1, 1), (0, 1))


def _edge_point(i, j, edge, f):
    """Interpolated zero crossing of ``f`` along ``edge`` of cell (i, j)."""
    ca, cb = _EDGE_CORNERS[edge]
    offs = _corner_offsets()
    ia, ja = i + offs[ca][0], j + offs[ca][1]
    ib, jb = i + offs[cb][0], j + offs[cb][1]
    fa, fb = f[ia, ja], f[ib, jb]
    t = fa / (fa - fb)
    return (ia + t * (ib - ia), ja + t * (jb - ja))


def _cell_segments(i, j, case, f):
    if case in _SEGMENTS:
        pairs = _SEGMENTS[case]
    else:
        # Saddle (case 5 or 10): break the tie with the cell-center value.
        offs = _corner_offsets()
        center = sum(f[i + di, j + dj] for di, dj in offs) / 4.0
        if case == 5:
            pairs = ((0, 1), (2, 3)) if center <= 0 else ((3, 0), (1, 2))
        else:
            pairs = ((0, 3), (1, 2)) if center <= 0 else ((0, 1), (2, 3))
    return [(_edge_point(i, j, ea, f), _edge_point(i, j, eb, f)) for ea, eb in pairs]


def _stitch(segments):
    """Chain segments that share endpoints into maximal polylines."""
    def key(pt):
        return (round(pt[0], 9), round(pt[1], 9))

    by_end: dict[tuple, list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        by_end.setdefault(key(a), []).append(idx)
        by_end.setdefault(key(b), []).append(idx)

    used = [False] * len(segments)
    lines = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        # Grow forward from the tail, then backward from the head.
        for endpoint, append in ((chain[-1], True), (chain[0], False)):
            while True:
                candidates = [i for i in by_end.get(key(endpoint), ()) if not used[i]]
                if not candidates:
                    break
                idx = candidates[0]
                used[idx] = True
                sa, sb = segments[idx]
                nxt = sb if key(sa) == key(endpoint) else sa
                if append:
                    chain.append(nxt)
                else:
                    chain.insert(0, nxt)
                endpoint = nxt
        if len(chain) > 2 and key(chain[0]) == key(chain[-1]):
            chain[-1] = chain[0]
        lines.append(np.asarray(chain, dtype=np.float64))
    return lines


def isolines(field: np.ndarray, valid: np.ndarray, level: float) -> list[np.ndarray]:
    """Isolines of ``field == level`` restricted to fully valid cells.

    Returns a list of ``(k, 2)`` arrays of fractional ``(i, j)`` index
    coordinates.  Nodes exactly on the level are treated as inside
    (``field <= level``).
    """
    f = np.where(valid, field - level, np.nan)
    inside = valid & (f <= 0.0)

    cell_ok = valid[:-1, :-1] & valid[1:, :-1] & valid[1:, 1:] & valid[:-1, 1:]
    case = (
        inside[:-1, :-1].astype(np.int8)
        + 2 * inside[1:, :-1]
        + 4 * inside[1:, 1:]
        + 8 * inside[:-1, 1:]
    )
    active = cell_ok & (case > 0) & (case < 15)

    segments = []
    for i, j in np.argwhere(active):
        segments.extend(_cell_segments(int(i), int(j), int(case[i, j]), f))
    if not segments:
        return []
    return _stitch(segments)
