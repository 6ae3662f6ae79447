"""Zigzag modules, their interval barcodes, and the 3-vertex frames of a grid module.

Barcodes are computed from generalized ranks: for an interval [b, d] the rank
of the canonical map from the limit to the colimit of the restricted diagram
counts the bars containing [b, d], and the bar multiplicities follow by
inclusion-exclusion.  Vertices are numbered from 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exact_linalg import DenseMatrix, PrimeField, hstack, kernel_basis, rank, vstack
from .grid_module import E1, E2, Grade, GridModule, space_dim

FWD = "fwd"
BWD = "bwd"


class ZigzagError(ValueError):
    pass


class Interval(NamedTuple):
    start: int
    end: int

    def __str__(self):
        return f"[{self.start},{self.end}]"


class Barcode:
    """Multiset of intervals, iterated in (start, end) order."""

    __slots__ = ("_counts",)

    def __init__(self, bars: Iterable[tuple[int, int]] | dict = ()):
        c: Counter = Counter()
        if isinstance(bars, dict):
            for iv, k in bars.items():
                c[Interval(*iv)] += int(k)
        else:
            for iv in bars:
                c[Interval(*iv)] += 1
        for iv in c:
            if iv.start < 1 or iv.start > iv.end:
                raise ZigzagError(f"malformed interval {tuple(iv)}")
        self._counts = {iv: k for iv, k in sorted(c.items()) if k > 0}

    def __getitem__(self, iv) -> int:
        return self._counts.get(Interval(*iv), 0)

    def items(self):
        return list(self._counts.items())

    def bars(self) -> list[Interval]:
        return [iv for iv, k in self._counts.items() for _ in range(k)]

    def __len__(self):
        return sum(self._counts.values())

    def __eq__(self, other):
        if isinstance(other, Barcode):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._counts.items()))

    def __repr__(self):
        return f"Barcode({self.bars()!r})"

    def __str__(self):
        return " ".join(f"{iv}x{k}" if k > 1 else str(iv) for iv, k in self._counts.items()) or "(empty)"

    def covering(self, i: int) -> int:
        """Number of bars containing vertex ``i``."""
        return sum(k for iv, k in self._counts.items() if iv.start <= i <= iv.end)


@dataclass(frozen=True, eq=False)
class ZigzagModule:
    """Spaces ``dims[0..L-1]`` (vertices 1..L) with one map per consecutive pair.

    ``maps[i] = (matrix, FWD)`` is vertex i+1 -> vertex i+2 (shape
    ``dims[i+1] x dims[i]``); ``(matrix, BWD)`` goes the other way.
    """

    field: PrimeField
    dims: tuple
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "maps", tuple((m, d) for m, d in self.maps))

    @property
    def length(self) -> int:
        return len(self.dims)

    @property
    def directions(self) -> list[str]:
        return [d for _, d in self.maps]


def validate_zigzag(z: ZigzagModule) -> list[str]:
    out = []
    if len(z.maps) != max(len(z.dims) - 1, 0):
        return [f"{len(z.maps)} maps for {len(z.dims)} vertices"]
    for i, (m, d) in enumerate(z.maps):
        if d not in (FWD, BWD):
            out.append(f"map {i + 1}: unknown direction {d!r}")
            continue
        want = (z.dims[i + 1], z.dims[i]) if d == FWD else (z.dims[i], z.dims[i + 1])
        if m.shape != want:
            out.append(f"map {i + 1} ({d}): shape {m.shape}, expected {want}")
        if m.field != z.field:
            out.append(f"map {i + 1}: field mismatch")
    return out


def generalized_rank(z: ZigzagModule, b: int, d: int) -> int:
    """Rank of lim -> colim for the restriction to vertices b..d (1-based)."""
    if b < 1 or d > z.length or b > d:
        return 0
    f = z.field
    idx = list(range(b - 1, d))
    offs = {}
    tot = 0
    for i in idx:
        offs[i] = tot
        tot += z.dims[i]
    if tot == 0:
        return 0
    # constraints (limit) and relations (colimit), one block per edge
    cons, rels = [], []
    for i in idx[:-1]:
        m, direction = z.maps[i]
        src, dst = (i, i + 1) if direction == FWD else (i + 1, i)
        # rows: dst coordinates; m v_src - v_dst = 0
        c = np.zeros((z.dims[dst], tot), dtype=np.int64)
        c[:, offs[src] : offs[src] + z.dims[src]] = m.array
        c[:, offs[dst] : offs[dst] + z.dims[dst]] -= np.eye(z.dims[dst], dtype=np.int64)
        cons.append(DenseMatrix(c, f))
        # relation generators: inj_src(v) - inj_dst(m v)
        r = np.zeros((tot, z.dims[src]), dtype=np.int64)
        r[offs[src] : offs[src] + z.dims[src], :] = np.eye(z.dims[src], dtype=np.int64)
        r[offs[dst] : offs[dst] + z.dims[dst], :] -= m.array
        rels.append(DenseMatrix(r, f))
    C = vstack(cons, cols=tot, field=f)
    limit = kernel_basis(C)
    if limit.cols == 0:
        return 0
    # lim -> colim: project a compatible tuple to its vertex-b entry, inject at b
    lb = np.zeros((tot, limit.cols), dtype=np.int64)
    i0 = idx[0]
    lb[offs[i0] : offs[i0] + z.dims[i0], :] = limit.array[offs[i0] : offs[i0] + z.dims[i0], :]
    R = hstack(rels, rows=tot, field=f)
    return rank(hstack([R, DenseMatrix(lb, f)])) - rank(R)


def rank_table(z: ZigzagModule) -> dict[tuple[int, int], int]:
    L = z.length
    return {(b, d): generalized_rank(z, b, d) for b in range(1, L + 1) for d in range(b, L + 1)}


def barcode(z: ZigzagModule) -> Barcode:
    """Interval decomposition of a zigzag module."""
    errs = validate_zigzag(z)
    if errs:
        raise ZigzagError("; ".join(errs))
    L = z.length
    r = rank_table(z)

    def R(b, d):
        return r.get((b, d), 0)

    bars = {}
    for b in range(1, L + 1):
        for d in range(b, L + 1):
            k = R(b, d) - R(b - 1, d) - R(b, d + 1) + R(b - 1, d + 1)
            if k < 0:
                raise ZigzagError(f"negative multiplicity {k} for [{b},{d}]")
            if k:
                bars[(b, d)] = k
    return Barcode(bars)


def gen_from_barcode(bars: Barcode | Iterable, directions: Sequence[str], field: PrimeField) -> ZigzagModule:
    """Direct sum of interval modules, one per bar, over the given arrow directions."""
    if not isinstance(bars, Barcode):
        bars = Barcode(bars)
    L = len(directions) + 1
    blist = bars.bars()
    for iv in blist:
        if iv.end > L:
            raise ZigzagError(f"bar {iv} exceeds length {L}")
    alive = [[k for k, iv in enumerate(blist) if iv.start <= v <= iv.end] for v in range(1, L + 1)]
    maps = []
    for i, direction in enumerate(directions):
        if direction not in (FWD, BWD):
            raise ZigzagError(f"unknown direction {direction!r}")
        src, dst = (i, i + 1) if direction == FWD else (i + 1, i)
        pos = {k: r for r, k in enumerate(alive[dst])}
        a = np.zeros((len(alive[dst]), len(alive[src])), dtype=np.int64)
        for c, k in enumerate(alive[src]):
            if k in pos:
                a[pos[k], c] = 1
        maps.append((DenseMatrix(a, field), direction))
    return ZigzagModule(field, [len(a) for a in alive], maps)


def restrict_into_frame(m: GridModule, alpha) -> ZigzagModule:
    """M_(a-e1) -> M_a <- M_(a-e2) as a 3-vertex zigzag."""
    a = Grade(*alpha)
    left, right = a - E1, a - E2
    dims = [space_dim(m, left), space_dim(m, a), space_dim(m, right)]
    return ZigzagModule(m.field, dims, [(m.hmap(left), FWD), (m.vmap(right), BWD)])


def restrict_outward_frame(m: GridModule, alpha) -> ZigzagModule:
    """M_(a+e1) <- M_a -> M_(a+e2) as a 3-vertex zigzag."""
    a = Grade(*alpha)
    dims = [space_dim(m, a + E1), space_dim(m, a), space_dim(m, a + E2)]
    return ZigzagModule(m.field, dims, [(m.hmap(a), BWD), (m.vmap(a), FWD)])


def y_alpha(m: GridModule, alpha) -> int:
    """dim of M_a modulo the images of both incoming edges."""
    a = Grade(*alpha)
    incoming = hstack([m.hmap(a - E1), m.vmap(a - E2)])
    return space_dim(m, a) - rank(incoming)


def z_alpha(m: GridModule, alpha) -> int:
    """dim of the joint kernel of both outgoing edges at a."""
    a = Grade(*alpha)
    outgoing = vstack([m.hmap(a), m.vmap(a)])
    return space_dim(m, a) - rank(outgoing)


def y_alpha_barcode(m: GridModule, alpha) -> int:
    return barcode(restrict_into_frame(m, alpha))[(2, 2)]


def z_alpha_barcode(m: GridModule, alpha) -> int:
    return barcode(restrict_outward_frame(m, alpha))[(2, 2)]
