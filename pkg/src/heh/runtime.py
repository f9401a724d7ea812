"""Value universe, store, environments, linearization, and box algebra.

Values are strict arrays (shape tuple + flat data in row-major order),
function closures, lazy index-map closures, and lazy filter closures.
The store maps integer handles to values and supports in-place overwrite
and alias cells; handles are never reused within a session.
"""

from typing import Dict, List, Optional, Tuple

from .ordinal import Ordinal, ZERO

ShapeVec = Tuple[Ordinal, ...]


class Fault(Exception):
    """Internal error carrier; the evaluator wraps these with span and rule."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


### ---- values -----------------------------------------------------------------


class StrictArray:
    """Shape/data pair; scalars have empty shape and a single data element."""

    __slots__ = ("shape", "data")

    def __init__(self, shape: ShapeVec, data: list):
        if __debug__:
            assert all(isinstance(s, Ordinal) for s in shape)
            assert all(s.is_natural for s in shape), "strict arrays have finite shape"
            n = 1
            for s in shape:
                n *= s.natural()
            assert len(data) == n, f"data length {len(data)} != shape product {n}"
        self.shape = shape
        self.data = data

    @property
    def rank(self) -> int:
        return len(self.shape)

    def is_scalar(self) -> bool:
        return self.shape == ()

    def scalar(self):
        assert self.shape == ()
        return self.data[0]

    def __repr__(self) -> str:
        return f"StrictArray({self.shape!r}, {self.data!r})"


def scalar_value(x) -> StrictArray:
    return StrictArray((), [x])


def vector_value(elements: list) -> StrictArray:
    return StrictArray((Ordinal(len(elements)),), list(elements))


class FunClosure:
    __slots__ = ("param", "body", "env")

    def __init__(self, param: str, body, env: "Env"):
        self.param = param
        self.body = body
        self.env = env


class Gen:
    """Evaluated generator: variable name plus ordinal bounds vectors."""

    __slots__ = ("var", "lower", "upper")

    def __init__(self, var: str, lower: ShapeVec, upper: ShapeVec):
        self.var = var
        self.lower = lower
        self.upper = upper

    @property
    def box(self) -> "Box":
        return (self.lower, self.upper)


class Unevaluated:
    __slots__ = ("expr", "env")

    def __init__(self, expr, env: "Env"):
        self.expr = expr
        self.env = env


class Memoized:
    __slots__ = ("handle",)

    def __init__(self, handle: int):
        self.handle = handle


class ImapPart:
    __slots__ = ("gen", "body")

    def __init__(self, gen: Gen, body):
        self.gen = gen
        self.body = body  # Unevaluated | Memoized


class ImapClosure:
    __slots__ = ("frame", "cell", "partitions", "memo_index", "scan_hint")

    def __init__(self, frame: ShapeVec, cell: ShapeVec, partitions: List[ImapPart]):
        self.frame = frame
        self.cell = cell
        self.partitions = partitions
        # frame index -> handle, a fast path over the Memoized partition boxes
        self.memo_index: Dict[ShapeVec, int] = {}
        # position of the most recently matched partition; sequential access
        # patterns (filter scans, row-major forcing) hit a neighbour of the
        # previous match, so probing around the hint avoids a linear scan
        self.scan_hint = 0

    @property
    def shape(self) -> ShapeVec:
        return self.frame + self.cell


class FilterSegment:
    __slots__ = ("prefix", "scan")

    def __init__(self):
        self.prefix: List[int] = []  # handles of accepted elements, in order
        self.scan = 0                # source elements inspected in this segment


class FilterClosure:
    __slots__ = ("predicate", "argument", "arg_shape", "partitions")

    def __init__(self, predicate: int, argument: int, arg_shape: ShapeVec):
        self.predicate = predicate
        self.argument = argument
        self.arg_shape = arg_shape
        self.partitions: Dict[Ordinal, FilterSegment] = {}

    def segment(self, xi: Ordinal) -> FilterSegment:
        seg = self.partitions.get(xi)
        if seg is None:
            seg = self.partitions[xi] = FilterSegment()
        return seg


### ---- store and environment ---------------------------------------------------


class _Alias:
    __slots__ = ("target",)

    def __init__(self, target: int):
        self.target = target


class _Bottom:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class Store:
    """Append-only cell table; cells may be overwritten but never freed."""

    def __init__(self):
        self.cells: list = []

    def insert(self, value) -> int:
        self.cells.append(value)
        return len(self.cells) - 1

    def insert_bottom(self, name: str) -> int:
        return self.insert(_Bottom(name))

    def resolve(self, handle: int) -> int:
        while isinstance(self.cells[handle], _Alias):
            handle = self.cells[handle].target
        return handle

    def get(self, handle: int):
        cell = self.cells[self.resolve(handle)]
        if isinstance(cell, _Bottom):
            raise Fault("UnboundVariable",
                        f"premature recursive reference to '{cell.name}'")
        return cell

    def is_bottom(self, handle: int) -> bool:
        return isinstance(self.cells[self.resolve(handle)], _Bottom)

    def set(self, handle: int, value) -> None:
        self.cells[self.resolve(handle)] = value

    def set_alias(self, handle: int, target: int) -> None:
        self.cells[handle] = _Alias(target)


class Env:
    """Chained frames; lookup finds the most recent binding."""

    __slots__ = ("frame", "parent")

    def __init__(self, frame: Optional[dict] = None, parent: Optional["Env"] = None):
        self.frame = frame if frame is not None else {}
        self.parent = parent

    def lookup(self, name: str) -> Optional[int]:
        env = self
        while env is not None:
            handle = env.frame.get(name)
            if handle is not None:
                return handle
            env = env.parent
        return None

    def extend(self, name: str, handle: int) -> "Env":
        return Env({name: handle}, self)

    def define(self, name: str, handle: int) -> None:
        self.frame[name] = handle


### ---- row-major linearization ---------------------------------------------------


def shape_naturals(shape: ShapeVec) -> Tuple[int, ...]:
    return tuple(s.natural() for s in shape)


def element_count(shape: ShapeVec) -> int:
    n = 1
    for s in shape:
        n *= s.natural()
    return n


def linearize(shape: ShapeVec, index: ShapeVec) -> int:
    """Row-major offset of `index` within `shape` (0-based, finite)."""
    if len(shape) != len(index):
        raise Fault("RankMismatch",
                    f"index of length {len(index)} into rank-{len(shape)} array")
    offset = 0
    for s, i in zip(shape, index):
        if not (ZERO <= i < s):
            raise Fault("IndexOutOfBounds",
                        f"index [{', '.join(map(str, index))}] outside shape "
                        f"[{', '.join(map(str, shape))}]")
        offset = offset * s.natural() + i.natural()
    return offset


def delinearize(shape: ShapeVec, offset: int) -> ShapeVec:
    """Inverse of linearize: the index vector at `offset`."""
    total = element_count(shape)
    if not 0 <= offset < total:
        raise Fault("IndexOutOfBounds",
                    f"offset {offset} outside 0..{total - 1}")
    index = []
    for s in reversed(shape_naturals(shape)):
        index.append(Ordinal(offset % s))
        offset //= s
    return tuple(reversed(index))


### ---- box algebra over ordinal index spaces --------------------------------------

Box = Tuple[ShapeVec, ShapeVec]  # (inclusive lower corner, exclusive upper corner)


def box_is_empty(box: Box) -> bool:
    lower, upper = box
    return any(l >= u for l, u in zip(lower, upper))


def box_contains(box: Box, index: ShapeVec) -> bool:
    lower, upper = box
    return all(l <= i < u for l, i, u in zip(lower, index, upper))


def box_inside(inner: Box, outer: Box) -> bool:
    if box_is_empty(inner):
        return True
    return all(ol <= il and iu <= ou
               for ol, il, iu, ou in zip(outer[0], inner[0], inner[1], outer[1]))


def box_intersect(a: Box, b: Box) -> Box:
    lower = tuple(max(x, y) for x, y in zip(a[0], b[0]))
    upper = tuple(min(x, y) for x, y in zip(a[1], b[1]))
    return (lower, upper)


def box_subtract(outer: Box, inner: Box) -> List[Box]:
    """Disjoint boxes covering outer minus inner, guillotine order:
    axis-0 low side, axis-0 high side, axis-1 low side, ..."""
    inner = box_intersect(inner, outer)
    if box_is_empty(inner):
        return [] if box_is_empty(outer) else [outer]
    pieces = []
    lower, upper = list(outer[0]), list(outer[1])
    for axis in range(len(lower)):
        if lower[axis] < inner[0][axis]:
            piece = (tuple(lower), tuple(upper[:axis] + [inner[0][axis]] + upper[axis + 1:]))
            if not box_is_empty(piece):
                pieces.append(piece)
        if inner[1][axis] < upper[axis]:
            piece = (tuple(lower[:axis] + [inner[1][axis]] + lower[axis + 1:]), tuple(upper))
            if not box_is_empty(piece):
                pieces.append(piece)
        lower[axis], upper[axis] = inner[0][axis], inner[1][axis]
    return pieces


def forms_partition(frame: Box, gens: List[Box]) -> Optional[str]:
    """None when the boxes tile the frame exactly, else a description."""
    for i, g in enumerate(gens):
        if not box_inside(g, frame):
            return f"generator {i} reaches outside the frame"
        for j in range(i):
            if not box_is_empty(box_intersect(g, gens[j])):
                return f"generators {j} and {i} overlap"
    remainder = [] if box_is_empty(frame) else [frame]
    for g in gens:
        remainder = [piece for r in remainder for piece in box_subtract(r, g)]
    if remainder:
        lo, up = remainder[0]
        return ("the frame is not fully covered (e.g. indices from "
                f"[{', '.join(map(str, lo))}] up to [{', '.join(map(str, up))}])")
    return None


### ---- plain value rendering ------------------------------------------------------


def render_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Ordinal):
        return str(x)
    if isinstance(x, FunClosure):
        return "<fun>"
    raise TypeError(f"not a scalar payload: {x!r}")


def render_strict(value: StrictArray) -> str:
    """Nested-bracket form of a strict array."""
    def nest(shape: Tuple[int, ...], data: list) -> str:
        if not shape:
            return render_scalar(data[0])
        chunk = len(data) // shape[0] if shape[0] else 0
        parts = [nest(shape[1:], data[i * chunk:(i + 1) * chunk])
                 for i in range(shape[0])]
        return "[" + ", ".join(parts) + "]"

    return nest(shape_naturals(value.shape), value.data)


def render_shape(shape: ShapeVec) -> str:
    return "[" + ", ".join(str(s) for s in shape) + "]"
