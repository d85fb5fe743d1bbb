"""Vertices of the infinite k-regular tree, addressed by reduced words.

The tree is generated by k involutions: from any vertex there is one edge
per letter d in {0, ..., k-1}, and following the same letter twice returns
to the start.  A vertex is therefore a word over those letters in which no
two adjacent letters are equal ("reduced"), the empty word being the
origin.  Distance from the origin is word length, and the last letter of a
nonempty word is the edge pointing back toward the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AtOrigin, DegenerateK, LetterOutOfRange, RepeatedLetter


@dataclass(frozen=True)
class TreeParams:
    """Degree of the regular tree; k >= 3 throughout."""

    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 3:
            raise DegenerateK(f"tree degree must be an integer >= 3, got {self.k!r}")


class Vertex(tuple):
    """A reduced word of direction letters; the empty word is the origin.

    Subclassing tuple keeps vertices hashable, comparable and cheap to build
    in the simulation hot path.  Validation against a particular k happens
    in make_vertex, not here.
    """

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Vertex({vertex_to_str(self)!r})"


ORIGIN = Vertex(())


def make_vertex(letters, params: TreeParams) -> Vertex:
    """Build a vertex from an iterable of letters, checking reducedness."""
    word = tuple(letters)
    prev = None
    for d in word:
        if not isinstance(d, int) or not 0 <= d < params.k:
            raise LetterOutOfRange(f"letter {d!r} not in [0, {params.k})")
        if d == prev:
            raise RepeatedLetter(f"adjacent repeated letter {d} in {word}")
        prev = d
    return Vertex(word)


def neighbor(v: Vertex, d: int, params: TreeParams) -> Vertex:
    """The vertex reached from v along direction d.

    Because each generator is an involution, following the inward letter
    cancels it; any other letter extends the word.
    """
    if not isinstance(d, int) or not 0 <= d < params.k:
        raise LetterOutOfRange(f"direction {d!r} not in [0, {params.k})")
    if v and v[-1] == d:
        return Vertex(v[:-1])
    return Vertex(v + (d,))


def toward_origin(v: Vertex) -> int:
    """The letter leading one step closer to the origin."""
    if not v:
        raise AtOrigin("the origin has no inward direction")
    return v[-1]


def sphere_size(x: int, params: TreeParams) -> int:
    """Number of vertices at distance exactly x: 1, then k*(k-1)^(x-1)."""
    if x < 0:
        raise ValueError(f"distance must be nonnegative, got {x}")
    if x == 0:
        return 1
    return params.k * (params.k - 1) ** (x - 1)


def same_parity(x: int, t: int) -> bool:
    """Whether x and t have equal parity (walk reachability condition)."""
    return (x - t) % 2 == 0


def ball_vertices(radius: int, params: TreeParams) -> list[Vertex]:
    """All vertices within the given radius, origin first.

    Order is deterministic: by word length, then lexicographically.  The
    recursion extends each word by every non-repeating letter in increasing
    order, which yields exactly that order per layer.
    """
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    out = [ORIGIN]
    layer = [ORIGIN]
    for _ in range(radius):
        nxt = []
        for w in layer:
            last = w[-1] if w else None
            for d in range(params.k):
                if d != last:
                    nxt.append(Vertex(w + (d,)))
        out.extend(nxt)
        layer = nxt
    return out


def sphere_vertices(x: int, params: TreeParams) -> list[Vertex]:
    """All vertices at distance exactly x, in deterministic lexicographic order."""
    if x < 0:
        raise ValueError(f"distance must be nonnegative, got {x}")
    layer = [ORIGIN]
    for _ in range(x):
        nxt = []
        for w in layer:
            last = w[-1] if w else None
            for d in range(params.k):
                if d != last:
                    nxt.append(Vertex(w + (d,)))
        layer = nxt
    return layer


def common_prefix_len(u: Vertex, v: Vertex) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


def distance(u: Vertex, v: Vertex) -> int:
    """Graph distance; paths to the origin overlap along the common prefix."""
    return len(u) + len(v) - 2 * common_prefix_len(u, v)


def descend_canonical(v: Vertex, steps: int) -> Vertex:
    """The canonical descendant `steps` levels below v.

    Extends the word by letter 0, or by letter 1 whenever 0 would repeat
    the previous letter.  Deterministic, so distinct start vertices give
    distinct descendants at equal depth.
    """
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    word = tuple(v)
    for _ in range(steps):
        word += (1,) if (word and word[-1] == 0) else (0,)
    return Vertex(word)


def vertex_to_str(v: Vertex) -> str:
    """Dot-separated serial form; the origin is the empty string."""
    return ".".join(str(d) for d in v)


def vertex_from_str(text: str, params: TreeParams) -> Vertex:
    if text == "":
        return ORIGIN
    try:
        letters = [int(part) for part in text.split(".")]
    except ValueError as exc:
        raise LetterOutOfRange(f"bad vertex string {text!r}") from exc
    return make_vertex(letters, params)
