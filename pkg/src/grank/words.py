"""Words, presentations, Nielsen moves and partitioned tuples.

A word is a freely reduced tuple of nonzero integers: generator ``i`` (1-based)
is the letter ``i`` and its formal inverse is ``-i``.  In text, a lowercase
generator name is the generator and the uppercase name is its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union


class AlphabetError(ValueError):
    """A letter or name that is not part of the declared alphabet."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise AlphabetError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class Word(tuple):
    """Freely reduced word; behaves like an immutable tuple of signed letters.

    ``*`` is concatenation followed by free reduction, ``~w`` the inverse.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, free_reduce(letters))

    def __mul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return Word(tuple.__add__(self, other))

    def __rmul__(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        return Word(tuple(other) + tuple(self))

    __add__ = __mul__

    def __invert__(self) -> "Word":
        return Word(-x for x in reversed(self))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        base = self if n >= 0 else ~self
        return Word(tuple(base) * abs(n))

    def __repr__(self):
        return f"Word({_default_format(self) or 'ε'})"

    def cyclic_reduce(self) -> "Word":
        w = tuple(self)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return Word(w)

    def exponent_sums(self, ngens: int) -> list[int]:
        sums = [0] * ngens
        for x in self:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return sums


EPSILON = Word()


def _default_format(w: Sequence[int]) -> str:
    out = []
    for x in w:
        c = chr(ord("a") + abs(x) - 1) if abs(x) <= 26 else f"x{abs(x)}"
        out.append(c if x > 0 else c.upper())
    return "".join(out)


def letter_rank(x: int) -> int:
    """Position of a letter in the order a < A < b < B < ..."""
    return 2 * (abs(x) - 1) + (x < 0)


def shortlex_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(letter_rank(x) for x in w))


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise AlphabetError(f"duplicate generator names in {names}")
        for name in names:
            if not name or not name.isidentifier():
                raise AlphabetError(f"bad generator name {name!r}")

    @classmethod
    def of(cls, spec: Union[str, Sequence[str]]) -> "Alphabet":
        """``Alphabet.of("ab")`` or ``Alphabet.of(["x0", "x1"])``."""
        if isinstance(spec, str):
            spec = spec.split() if " " in spec else list(spec)
        return cls(tuple(spec))

    @classmethod
    def standard(cls, n: int) -> "Alphabet":
        if n <= 26:
            return cls(tuple(chr(ord("a") + i) for i in range(n)))
        return cls(tuple(f"x{i}" for i in range(1, n + 1)))

    def __len__(self):
        return len(self.names)

    @property
    def single_letters(self) -> bool:
        return all(len(n) == 1 and n.islower() for n in self.names)

    @property
    def letters(self) -> tuple[int, ...]:
        """Signed letters in shortlex order: a, A, b, B, ..."""
        return tuple(s * i for i in range(1, len(self.names) + 1) for s in (1, -1))

    def parse(self, text: str) -> Word:
        if text in ("1", "ε", ""):
            return EPSILON
        if self.single_letters:
            out = []
            for pos, ch in enumerate(text):
                low = ch.lower()
                if low not in self.names:
                    raise AlphabetError(f"unknown letter {ch!r}", pos)
                i = self.names.index(low) + 1
                out.append(i if ch == low else -i)
            return Word(out)
        out = []
        for pos, tok in enumerate(text.split()):
            sign = 1
            if tok.endswith("^-1"):
                tok, sign = tok[:-3], -1
            if tok not in self.names:
                raise AlphabetError(f"unknown generator {tok!r}", pos)
            out.append(sign * (self.names.index(tok) + 1))
        return Word(out)

    def format(self, w: Sequence[int]) -> str:
        if not w:
            return "1"
        if self.single_letters:
            return "".join(
                self.names[abs(x) - 1] if x > 0 else self.names[abs(x) - 1].upper()
                for x in w
            )
        return " ".join(
            self.names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in w
        )


@dataclass(frozen=True)
class Presentation:
    """``<alphabet | relators>``; relators are stored cyclically reduced and nonempty."""

    alphabet: Alphabet
    relators: tuple[Word, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = len(self.alphabet)
        rels = []
        for r in self.relators:
            r = Word(r).cyclic_reduce()
            if any(abs(x) > n for x in r):
                raise AlphabetError(f"relator {r!r} uses a letter outside the alphabet")
            if r:
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def ngens(self) -> int:
        return len(self.alphabet)

    @property
    def generators(self) -> list[Word]:
        return [Word((i,)) for i in range(1, self.ngens + 1)]

    def word(self, text: str) -> Word:
        return self.alphabet.parse(text)

    def words(self, *texts: str) -> list[Word]:
        return [self.alphabet.parse(t) for t in texts]

    def fmt(self, w: Sequence[int]) -> str:
        return self.alphabet.format(w)

    def __str__(self):
        gens = ", ".join(self.alphabet.names)
        rels = ", ".join(self.fmt(r) for r in self.relators)
        return f"<{gens} | {rels}>"


def presentation(gens: Union[str, Sequence[str]], *relators: str, name: str = "") -> Presentation:
    """Convenience constructor: ``presentation("ab", "abAB")``."""
    alphabet = Alphabet.of(gens)
    return Presentation(alphabet, tuple(alphabet.parse(r) for r in relators), name=name)


def commutator(u: Word, v: Word) -> Word:
    return ~u * ~v * u * v


# ---------------------------------------------------------------- Nielsen moves


@dataclass(frozen=True)
class NielsenMove:
    """Elementary Nielsen move with 0-based indices.

    N1(i): g_i <- g_i^-1;  N2(i, j): g_i <- g_i g_j;  N3(i, j): swap g_i, g_j.
    """

    kind: str
    i: int
    j: int | None = None

    def __post_init__(self):
        if self.kind not in ("N1", "N2", "N3"):
            raise ValueError(f"unknown Nielsen move {self.kind}")
        if self.kind != "N1" and (self.j is None or self.j == self.i):
            raise ValueError(f"{self.kind} needs two distinct indices")

    def __repr__(self):
        return f"{self.kind}({self.i})" if self.kind == "N1" else f"{self.kind}({self.i},{self.j})"

    def inverse(self) -> list["NielsenMove"]:
        if self.kind == "N2":
            return [N1(self.j), N2(self.i, self.j), N1(self.j)]
        return [self]


def N1(i: int) -> NielsenMove:
    return NielsenMove("N1", i)


def N2(i: int, j: int) -> NielsenMove:
    return NielsenMove("N2", i, j)


def N3(i: int, j: int) -> NielsenMove:
    return NielsenMove("N3", i, j)


def right_multiply(i: int, j: int, sign: int = 1) -> list[NielsenMove]:
    """Moves realizing g_i <- g_i g_j^sign."""
    if sign == 1:
        return [N2(i, j)]
    return [N1(j), N2(i, j), N1(j)]


def left_multiply(i: int, j: int, sign: int = 1) -> list[NielsenMove]:
    """Moves realizing g_i <- g_j^sign g_i."""
    return [N1(i)] + right_multiply(i, j, -sign) + [N1(i)]


def apply_move(t: Sequence, move: NielsenMove, mul: Callable = None, inv: Callable = None) -> tuple:
    """Apply one Nielsen move to a tuple of group elements.

    Defaults operate on :class:`Word` entries; pass ``mul``/``inv`` to act on
    other element representations (permutations, matrices, D-infinity pairs).
    """
    n = len(t)
    for k in (move.i, move.j):
        if k is not None and not 0 <= k < n:
            raise IndexError(f"{move} out of range for a tuple of length {n}")
    mul = mul or (lambda u, v: Word(tuple(u) + tuple(v)))
    inv = inv or (lambda u: ~Word(u))
    out = list(t)
    if move.kind == "N1":
        out[move.i] = inv(out[move.i])
    elif move.kind == "N2":
        out[move.i] = mul(out[move.i], out[move.j])
    else:
        out[move.i], out[move.j] = out[move.j], out[move.i]
    return tuple(out)


def nielsen_move(t: Sequence[Word], move: NielsenMove) -> tuple[Word, ...]:
    return apply_move(tuple(Word(w) for w in t), move)


def replay(t: Sequence, moves: Iterable[NielsenMove], mul=None, inv=None) -> tuple:
    for m in moves:
        t = apply_move(t, m, mul, inv)
    return tuple(t)


@dataclass
class NielsenTrace:
    start: tuple
    moves: list[NielsenMove]
    end: tuple

    def replays(self, mul=None, inv=None, eq=None) -> bool:
        got = replay(self.start, self.moves, mul, inv)
        if eq is None:
            return got == tuple(self.end)
        return len(got) == len(self.end) and all(eq(a, b) for a, b in zip(got, self.end))

    def then(self, other: "NielsenTrace") -> "NielsenTrace":
        return NielsenTrace(self.start, self.moves + other.moves, other.end)


# ----------------------------------------------------------- partitioned tuples


@dataclass(frozen=True, order=True)
class Complexity:
    """Complexity ``(m, n)`` = (tail length, number of parts); ordered with m dominant."""

    m: int
    n: int


def compare(c1: Complexity, c2: Complexity) -> int:
    """-1, 0 or 1 as ``c1`` is less than, equal to or greater than ``c2``."""
    return (c1 > c2) - (c1 < c2)


@dataclass(frozen=True)
class PartitionedTuple:
    parts: tuple[tuple[Word, ...], ...]
    tail: tuple[Word, ...] = ()

    def __post_init__(self):
        parts = tuple(tuple(Word(w) for w in y) for y in self.parts)
        tail = tuple(Word(w) for w in self.tail)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "tail", tail)
        if not parts and not tail:
            raise ValueError("a partitioned tuple needs a part or a nonempty tail")
        if any(len(y) == 0 for y in parts):
            raise ValueError("parts must be nonempty tuples")

    @property
    def underlying(self) -> tuple[Word, ...]:
        return tuple(w for y in self.parts for w in y) + self.tail

    @property
    def length(self) -> int:
        return len(self.underlying)

    def complexity(self) -> Complexity:
        return Complexity(len(self.tail), len(self.parts))

    def part_positions(self, i: int) -> range:
        start = sum(len(y) for y in self.parts[:i])
        return range(start, start + len(self.parts[i]))

    def tail_position(self, i: int) -> int:
        return sum(len(y) for y in self.parts) + i

    def check_parts_nontrivial(self, is_trivial: Callable[[Word], bool]) -> None:
        """Raise unless every part generates a nontrivial subgroup.

        ``is_trivial`` is the caller's word-problem oracle.
        """
        for i, y in enumerate(self.parts):
            if all(is_trivial(w) for w in y):
                raise ValueError(f"part {i} generates the trivial subgroup")


def complexity(m: PartitionedTuple) -> Complexity:
    return m.complexity()


# An expression is a product of underlying-tuple entries: ((position, ±1), ...).
Expression = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ConjugatePart:
    """Replace part ``part`` by g^-1 Y g, with g given as an expression."""

    part: int
    conjugator: Expression


@dataclass(frozen=True)
class SlideTailEntry:
    """Replace tail entry ``entry`` by u t u', with u and u' given as expressions."""

    entry: int
    left: Expression = ()
    right: Expression = ()


def evaluate(expr: Expression, entries: Sequence[Word]) -> Word:
    w = EPSILON
    for pos, sign in expr:
        w = w * (entries[pos] if sign == 1 else ~entries[pos])
    return w


def elementary_move(
    m: PartitionedTuple, move: Union[ConjugatePart, SlideTailEntry]
) -> tuple[PartitionedTuple, list[NielsenMove]]:
    """Apply an elementary move and return the result with its Nielsen expansion.

    The returned moves carry ``m.underlying`` to the new underlying tuple letter
    for letter.
    """
    entries = m.underlying
    moves: list[NielsenMove] = []
    if isinstance(move, ConjugatePart):
        if not 0 <= move.part < len(m.parts):
            raise IndexError(f"no part {move.part}")
        targets = list(m.part_positions(move.part))
        forbidden = set(targets)
        _check_expression(move.conjugator, forbidden, len(entries))
        for pos in targets:
            for ref, sign in move.conjugator:
                moves += right_multiply(pos, ref, sign)
            for ref, sign in move.conjugator:
                moves += left_multiply(pos, ref, -sign)
        g = evaluate(move.conjugator, entries)
        parts = list(m.parts)
        parts[move.part] = tuple(~g * y * g for y in parts[move.part])
        result = PartitionedTuple(tuple(parts), m.tail)
    elif isinstance(move, SlideTailEntry):
        if not 0 <= move.entry < len(m.tail):
            raise IndexError(f"no tail entry {move.entry}")
        pos = m.tail_position(move.entry)
        for expr in (move.left, move.right):
            _check_expression(expr, {pos}, len(entries))
        for ref, sign in move.right:
            moves += right_multiply(pos, ref, sign)
        for ref, sign in reversed(move.left):
            moves += left_multiply(pos, ref, sign)
        u = evaluate(move.left, entries)
        u2 = evaluate(move.right, entries)
        tail = list(m.tail)
        tail[move.entry] = u * tail[move.entry] * u2
        result = PartitionedTuple(m.parts, tuple(tail))
    else:
        raise TypeError(f"not an elementary move: {move!r}")
    return result, moves


def _check_expression(expr: Expression, forbidden: set[int], n: int) -> None:
    for ref, sign in expr:
        if sign not in (1, -1):
            raise ValueError(f"exponent {sign} is not ±1")
        if not 0 <= ref < n:
            raise IndexError(f"expression refers to entry {ref} of {n}")
        if ref in forbidden:
            raise ValueError(f"expression refers to forbidden entry {ref}")


# -------------------------------------------------------------- abelianization


def relation_matrix(p: Presentation) -> list[list[int]]:
    return [r.exponent_sums(p.ngens) for r in p.relators]


def smith_invariants(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form of an integer matrix."""
    a = [list(r) for r in rows if any(r)]
    factors: list[int] = []
    t = 0
    while True:
        nz = [(abs(a[i][j]), i, j) for i in range(t, len(a)) for j in range(t, ncols) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, len(a)):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, ncols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if dirty:
                nz = [(abs(a[i][t]), i, t) for i in range(t, len(a)) if a[i][t]]
                nz += [(abs(a[t][j]), t, j) for j in range(t, ncols) if a[t][j]]
                _, pi, pj = min(nz)
                a[t], a[pi] = a[pi], a[t]
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                continue
            bad = next(
                (i for i in range(t + 1, len(a)) for j in range(t + 1, ncols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        factors.append(abs(a[t][t]))
        t += 1
        if t >= len(a) or t >= ncols:
            break
    return factors


def abelian_invariants(p: Presentation) -> tuple[int, list[int]]:
    """``(free rank, torsion invariant factors > 1)`` of the abelianization."""
    factors = smith_invariants(relation_matrix(p), p.ngens)
    return p.ngens - len(factors), [d for d in factors if d > 1]


def abelianized_rank(p: Presentation) -> int:
    free, torsion = abelian_invariants(p)
    return free + len(torsion)
