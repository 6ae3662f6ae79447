"""Line-oriented text formats for grid modules (.pm2) and zigzags (.zz).

.pm2::

    field <p>
    box <s1> <s2>
    dims
    <x> <y> <d>          # only grades with d > 0
    hmap <x> <y>         # then d(x+1,y) rows of d(x,y) entries
    vmap <x> <y>         # then d(x,y+1) rows of d(x,y) entries

.zz::

    field <p>
    len <L>
    dims <d1> ... <dL>
    map <i> fwd|bwd      # then the matrix rows (omitted if it is empty)

``#`` starts a comment.  Writers emit every map whose source and target are
both nonzero, grades in lexicographic order, so output is canonical.
"""

from __future__ import annotations

import numpy as np

from .exact_linalg import DenseMatrix, PrimeField
from .grid_module import Grade, GridModule, ModuleError, validate
from .zigzag import BWD, FWD, ZigzagModule, validate_zigzag


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield n, s.split()


def _ints(tokens, n):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", n) from None


def _field(tokens, n) -> PrimeField:
    if len(tokens) != 2:
        raise ParseError("expected 'field <p>'", n)
    p = _ints(tokens[1:], n)[0]
    try:
        return PrimeField(p)
    except ValueError as e:
        raise ParseError(str(e), n) from None


class _Reader:
    def __init__(self, text):
        self.items = list(_lines(text))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self, what):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise ParseError(f"unexpected end of input, expected {what}", last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def matrix(self, rows, cols, field, header_line):
        data = []
        for _ in range(rows):
            n, toks = self.next(f"a matrix row (block at line {header_line})")
            vals = _ints(toks, n)
            if len(vals) != cols:
                raise ParseError(f"row has {len(vals)} entries, expected {cols}", n)
            data.append(vals)
        return DenseMatrix(np.array(data, dtype=np.int64).reshape(rows, cols), field)


def parse_module(text: str, check: bool = True) -> GridModule:
    """Parse a .pm2 document; with ``check`` the module must also validate."""
    r = _Reader(text)
    n, toks = r.next("'field'")
    if toks[0] != "field":
        raise ParseError("expected 'field <p>'", n)
    field = _field(toks, n)
    n, toks = r.next("'box'")
    if toks[0] != "box" or len(toks) != 3:
        raise ParseError("expected 'box <s1> <s2>'", n)
    box = tuple(_ints(toks[1:], n))
    if min(box) < 0:
        raise ParseError("box sizes must be non-negative", n)
    n, toks = r.next("'dims'")
    if toks != ["dims"]:
        raise ParseError("expected 'dims'", n)
    dims = {}
    while True:
        n, toks = r.peek()
        if toks is None or toks[0] in ("hmap", "vmap"):
            break
        r.pos += 1
        if len(toks) != 3:
            raise ParseError("expected '<x> <y> <dim>'", n)
        x, y, d = _ints(toks, n)
        if not (0 <= x <= box[0] and 0 <= y <= box[1]):
            raise ParseError(f"grade ({x},{y}) outside box {box}", n)
        if d < 0:
            raise ParseError("negative dimension", n)
        if (x, y) in dims:
            raise ParseError(f"duplicate grade ({x},{y})", n)
        dims[(x, y)] = d
    dim = lambda g: dims.get(tuple(g), 0)  # noqa: E731
    maps = {"hmap": {}, "vmap": {}}
    where = {}
    while r.peek()[1] is not None:
        n, toks = r.next("a map block")
        if toks[0] not in maps or len(toks) != 3:
            raise ParseError(f"expected 'hmap <x> <y>' or 'vmap <x> <y>', got {' '.join(toks)!r}", n)
        x, y = _ints(toks[1:], n)
        g = Grade(x, y)
        t = g + ((1, 0) if toks[0] == "hmap" else (0, 1))
        if not (0 <= g.x and 0 <= g.y and t.x <= box[0] and t.y <= box[1]):
            raise ParseError(f"{toks[0]} at {g} leaves the box", n)
        if g in maps[toks[0]]:
            raise ParseError(f"duplicate {toks[0]} at {g}", n)
        if dim(g) == 0 or dim(t) == 0:
            raise ParseError(f"{toks[0]} at {g} touches a zero space; omit it", n)
        maps[toks[0]][g] = r.matrix(dim(t), dim(g), field, n)
        where[(toks[0], g)] = n
    try:
        m = GridModule.build(field, box, dims, maps["hmap"], maps["vmap"])
    except ModuleError as e:
        raise ParseError(str(e)) from None
    if check:
        errs = validate(m)
        if errs:
            raise ParseError("; ".join(errs))
    return m


def _matrix_lines(a: DenseMatrix) -> list[str]:
    if a.rows == 0 or a.cols == 0:
        return []
    return [" ".join(str(v) for v in row) for row in a.to_lists()]


def write_module(m: GridModule) -> str:
    out = [f"field {m.field.p}", f"box {m.box[0]} {m.box[1]}", "dims"]
    for g in m.grades():
        if m.dims[g]:
            out.append(f"{g.x} {g.y} {m.dims[g]}")
    for name, maps in (("hmap", m.hmaps), ("vmap", m.vmaps)):
        for g in sorted(maps):
            a = maps[g]
            if a.rows and a.cols:
                out.append(f"{name} {g.x} {g.y}")
                out.extend(_matrix_lines(a))
    return "\n".join(out) + "\n"


def parse_zigzag(text: str) -> ZigzagModule:
    r = _Reader(text)
    n, toks = r.next("'field'")
    if toks[0] != "field":
        raise ParseError("expected 'field <p>'", n)
    field = _field(toks, n)
    n, toks = r.next("'len'")
    if toks[0] != "len" or len(toks) != 2:
        raise ParseError("expected 'len <L>'", n)
    (L,) = _ints(toks[1:], n)
    if L < 1:
        raise ParseError("length must be positive", n)
    n, toks = r.next("'dims'")
    if toks[0] != "dims":
        raise ParseError("expected 'dims d1 ... dL'", n)
    dims = _ints(toks[1:], n)
    if len(dims) != L or min(dims) < 0:
        raise ParseError(f"expected {L} non-negative dimensions", n)
    maps = {}
    while r.peek()[1] is not None:
        n, toks = r.next("a map block")
        if toks[0] != "map" or len(toks) != 3 or toks[2] not in (FWD, BWD):
            raise ParseError("expected 'map <i> fwd|bwd'", n)
        (i,) = _ints(toks[1:2], n)
        if not 1 <= i < L:
            raise ParseError(f"map index {i} out of range 1..{L - 1}", n)
        if i in maps:
            raise ParseError(f"duplicate map {i}", n)
        src, dst = (i - 1, i) if toks[2] == FWD else (i, i - 1)
        rows, cols = dims[dst], dims[src]
        if rows and cols:
            mat = r.matrix(rows, cols, field, n)
        else:
            mat = DenseMatrix.zeros(rows, cols, field)
        maps[i] = (mat, toks[2])
    missing = [i for i in range(1, L) if i not in maps]
    if missing:
        raise ParseError(f"missing map blocks {missing}")
    z = ZigzagModule(field, dims, [maps[i] for i in range(1, L)])
    errs = validate_zigzag(z)
    if errs:
        raise ParseError("; ".join(errs))
    return z


def write_zigzag(z: ZigzagModule) -> str:
    out = [f"field {z.field.p}", f"len {z.length}", "dims " + " ".join(str(d) for d in z.dims)]
    for i, (a, d) in enumerate(z.maps, 1):
        out.append(f"map {i} {d}")
        out.extend(_matrix_lines(a))
    return "\n".join(out) + "\n"
