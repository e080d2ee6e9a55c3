"""Two-dimensional strings, the brute-force oracle, linearisation and grid I/O.

Arrays are indexed ``[x, y]`` so that ``cells.ravel()`` is the column-by-column
linearisation ``S[x*h + y]``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import BadShape, EmptyString, GridFormatError
from .geom import Point

WILDCARD = np.int64(2**31 - 1)
SYMBOL_DTYPE = np.int64


@dataclass
class Grid2D:
    """A rectangular string: ``cells[x, y]`` sits at ``origin + (x, y)``."""
    origin: Point
    cells: np.ndarray

    def __post_init__(self):
        self.origin = Point(*map(int, self.origin))
        self.cells = np.asarray(self.cells, dtype=SYMBOL_DTYPE)
        if self.cells.ndim != 2:
            raise BadShape("grid cells must be two-dimensional")

    @property
    def width(self):
        return self.cells.shape[0]

    @property
    def height(self):
        return self.cells.shape[1]

    @property
    def size(self):
        return self.cells.size

    @classmethod
    def from_rows(cls, rows, origin=(0, 0)):
        """Build from a list of rows, row ``r`` holding the cells with ``y = r``."""
        arr = np.array(rows, dtype=SYMBOL_DTYPE)
        if arr.ndim != 2:
            raise BadShape("rows must have equal length")
        return cls(Point(*origin), arr.T.copy())

    def is_origin_square(self):
        return self.origin == (0, 0) and self.width == self.height

    def has_wildcards(self):
        return bool((self.cells == WILDCARD).any())

    def get(self, u):
        x, y = u[0] - self.origin.x, u[1] - self.origin.y
        if 0 <= x < self.width and 0 <= y < self.height:
            return int(self.cells[x, y])
        return None

    def to_sparse(self, keep_wildcards=False):
        xs, ys = np.nonzero(np.ones_like(self.cells, dtype=bool))
        syms = self.cells[xs, ys]
        if not keep_wildcards:
            keep = syms != WILDCARD
            xs, ys, syms = xs[keep], ys[keep], syms[keep]
        return Sparse2D(xs + self.origin.x, ys + self.origin.y, syms, presorted=True)


class Sparse2D:
    """A string on an arbitrary finite domain, stored sorted by ``(x, y)``."""

    def __init__(self, xs, ys, syms, presorted=False):
        xs = np.asarray(xs, dtype=np.int64).ravel()
        ys = np.asarray(ys, dtype=np.int64).ravel()
        syms = np.asarray(syms, dtype=SYMBOL_DTYPE).ravel()
        if not (len(xs) == len(ys) == len(syms)):
            raise BadShape("coordinate and symbol arrays differ in length")
        if not presorted and len(xs) > 1:
            order = np.lexsort((ys, xs))
            xs, ys, syms = xs[order], ys[order], syms[order]
            dup = (np.diff(xs) == 0) & (np.diff(ys) == 0)
            if dup.any():
                raise BadShape("duplicate points in sparse string")
        self.xs, self.ys, self.syms = xs, ys, syms

    @classmethod
    def from_dict(cls, mapping):
        if not mapping:
            return cls.empty()
        pts = list(mapping)
        return cls([p[0] for p in pts], [p[1] for p in pts], [mapping[p] for p in pts])

    @classmethod
    def empty(cls):
        return cls([], [], [], presorted=True)

    def __len__(self):
        return len(self.xs)

    def __repr__(self):
        return f"Sparse2D({len(self)} points)"

    def points(self):
        return [Point(int(x), int(y)) for x, y in zip(self.xs, self.ys)]

    def as_dict(self):
        return {Point(int(x), int(y)): int(s) for x, y, s in zip(self.xs, self.ys, self.syms)}

    def coords(self):
        return np.stack([self.xs, self.ys], axis=1)

    def bbox(self):
        if len(self) == 0:
            raise EmptyString("empty string has no bounding box")
        return (int(self.xs.min()), int(self.xs.max()), int(self.ys.min()), int(self.ys.max()))

    def subset(self, mask):
        return Sparse2D(self.xs[mask], self.ys[mask], self.syms[mask], presorted=True)

    def shifted(self, u):
        return Sparse2D(self.xs + u[0], self.ys + u[1], self.syms, presorted=True)

    def symbols(self):
        return set(int(s) for s in np.unique(self.syms))

    def to_grid(self, bounds=None):
        """Materialise on a rectangle (default: the bounding box), wildcards elsewhere."""
        x0, x1, y0, y1 = bounds if bounds is not None else self.bbox()
        cells = np.full((x1 - x0 + 1, y1 - y0 + 1), WILDCARD, dtype=SYMBOL_DTYPE)
        inside = (self.xs >= x0) & (self.xs <= x1) & (self.ys >= y0) & (self.ys <= y1)
        if not inside.all():
            raise BadShape("bounds do not contain the string")
        cells[self.xs - x0, self.ys - y0] = self.syms
        return Grid2D(Point(x0, y0), cells)


def concat_sparse(parts):
    parts = [p for p in parts if len(p)]
    if not parts:
        return Sparse2D.empty()
    return Sparse2D(np.concatenate([p.xs for p in parts]), np.concatenate([p.ys for p in parts]),
                    np.concatenate([p.syms for p in parts]))


def as_grid(S):
    return S if isinstance(S, Grid2D) else S.to_grid()


def shift(S, u):
    if isinstance(S, Grid2D):
        return Grid2D(S.origin + u, S.cells)
    return S.shifted(u)


def hamming_oracle(S, R):
    """Mismatch count and positions over the common domain; wildcards match everything."""
    a = S if isinstance(S, Sparse2D) else S.to_sparse(keep_wildcards=True)
    b = R.as_dict() if isinstance(R, Sparse2D) else R.to_sparse(keep_wildcards=True).as_dict()
    where = set()
    for u, s in a.as_dict().items():
        r = b.get(u)
        if r is None or s == WILDCARD or r == WILDCARD:
            continue
        if s != r:
            where.add(u)
    return len(where), where


@dataclass
class OffsetCounts:
    """Per-offset values on a rectangle of offsets starting at ``origin``."""
    origin: Point
    values: np.ndarray

    def __getitem__(self, q):
        return int(self.values[q[0] - self.origin.x, q[1] - self.origin.y])

    def __eq__(self, other):
        return (isinstance(other, OffsetCounts) and self.origin == other.origin
                and self.values.shape == other.values.shape
                and bool(np.array_equal(self.values, other.values)))

    def items(self):
        """Offsets in row-major order: ``y`` outer, ``x`` inner."""
        w, h = self.values.shape
        for dy in range(h):
            for dx in range(w):
                yield Point(self.origin.x + dx, self.origin.y + dy), int(self.values[dx, dy])

    def as_dict(self):
        return dict(self.items())


def _check_origin_squares(P, T):
    if not (isinstance(P, Grid2D) and isinstance(T, Grid2D)):
        raise BadShape("pattern and text must be grids")
    if not (P.is_origin_square() and T.is_origin_square()):
        raise BadShape("pattern and text must be squares anchored at the origin")
    if P.size == 0 or T.size == 0:
        raise EmptyString("empty pattern or text")
    if P.width > T.width:
        raise BadShape("pattern larger than text")


def oracle_all_offsets(P, T, k):
    """Brute force ``min(k+1, Ham(P+q, T))`` for every offset ``q`` in ``[n-m+1]^2``."""
    _check_origin_squares(P, T)
    m, n = P.width, T.width
    span = n - m + 1
    out = np.zeros((span, span), dtype=np.int64)
    tc, pc = T.cells, P.cells
    for dx in range(m):
        for dy in range(m):
            p = pc[dx, dy]
            if p == WILDCARD:
                continue
            window = tc[dx:dx + span, dy:dy + span]
            out += (window != p) & (window != WILDCARD)
    return OffsetCounts(Point(0, 0), np.minimum(out, k + 1))


@dataclass
class Lin1D:
    symbols: np.ndarray
    height: int


def linearize(S):
    g = as_grid(S)
    return Lin1D(g.cells.ravel().copy(), g.height)


@dataclass
class OffsetMap:
    """Translates 2D offsets to positions in the padded 1D problem and back."""
    base: Point         # smallest admissible offset
    span_x: int
    span_y: int
    stride: int         # text height

    def to_1d(self, q):
        dx, dy = q[0] - self.base.x, q[1] - self.base.y
        if not (0 <= dx < self.span_x and 0 <= dy < self.span_y):
            raise BadShape(f"offset {tuple(q)} does not keep the pattern inside the text box")
        return dx * self.stride + dy

    def gather(self, values_1d):
        """Pick the 2D offsets out of a length ``|T| - |P| + 1`` result vector."""
        need = self.span_x * self.stride
        vals = np.asarray(values_1d)
        if len(vals) < need:
            # the tail never maps to an admissible offset
            vals = np.concatenate([vals, np.zeros(need - len(vals), dtype=vals.dtype)])
        block = vals[:need].reshape(self.span_x, self.stride)[:, :self.span_y]
        return OffsetCounts(self.base, block.copy())


def pad_embed(P, T):
    """Reduce 2D matching to 1D matching on the text's bounding box.

    The pattern box is padded with wildcards to the text height so that both
    linearisations use the same column stride; the padding after the last
    pattern column is dropped.
    """
    gp, gt = as_grid(P), as_grid(T)
    if gp.width > gt.width or gp.height > gt.height:
        raise BadShape("pattern box does not fit in text box")
    padded = np.full((gp.width, gt.height), WILDCARD, dtype=SYMBOL_DTYPE)
    padded[:, :gp.height] = gp.cells
    base = gt.origin - gp.origin
    omap = OffsetMap(base, gt.width - gp.width + 1, gt.height - gp.height + 1, gt.height)
    flat = padded.ravel()[:(gp.width - 1) * gt.height + gp.height]
    return flat, gt.cells.ravel().copy(), omap


class SymbolTable:
    """Interns grid-file tokens; ``?`` is the wildcard."""

    def __init__(self):
        self.codes = {}
        self.names = []

    def intern(self, token):
        if token == "?":
            return int(WILDCARD)
        code = self.codes.get(token)
        if code is None:
            code = len(self.names)
            self.codes[token] = code
            self.names.append(token)
        return code

    def name(self, code):
        return "?" if code == WILDCARD else self.names[code]


def parse_grid(text, table=None, source="<grid>"):
    table = table if table is not None else SymbolTable()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GridFormatError(f"{source}: empty input")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise GridFormatError(f"{source}: first line must be 'R C'")
    rows, cols = int(head[0]), int(head[1])
    if rows == 0 or cols == 0:
        raise GridFormatError(f"{source}: grid must be non-empty")
    body = lines[1:]
    if len(body) != rows:
        raise GridFormatError(f"{source}: expected {rows} rows, found {len(body)}")
    out = []
    for r, line in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise GridFormatError(f"{source}: row {r} has {len(toks)} tokens, expected {cols}")
        out.append([table.intern(t) for t in toks])
    return Grid2D.from_rows(out)


def read_grid(path, table=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise GridFormatError(f"{path}: {exc.strerror}") from exc
    return parse_grid(text, table, source=str(path))


def format_grid(G, table=None):
    name = table.name if table is not None else (lambda c: "?" if c == WILDCARD else str(c))
    lines = [f"{G.height} {G.width}"]
    for y in range(G.height):
        lines.append(" ".join(name(int(G.cells[x, y])) for x in range(G.width)))
    return "\n".join(lines) + "\n"
