"""Line-based presentation files.

::

    # comment
    group Z2xZ
    gens a b c
    rel abAB
    sub H aa b
    tuple T ab b

Generators are distinct lowercase letters; an uppercase letter is the
inverse; ``1`` stands for the identity inside ``sub`` and ``tuple`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .words import Alphabet, AlphabetError, Presentation, Word


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class InputFile:
    presentation: Presentation
    subgroups: dict[str, tuple[Word, ...]] = field(default_factory=dict)
    tuples: dict[str, tuple[Word, ...]] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.presentation.name

    def subgroup(self, name: str) -> tuple[Word, ...]:
        if name not in self.subgroups:
            raise KeyError(f"no subgroup named {name!r}; have {sorted(self.subgroups)}")
        return self.subgroups[name]

    def tuple(self, name: str) -> tuple[Word, ...]:
        if name not in self.tuples:
            raise KeyError(f"no tuple named {name!r}; have {sorted(self.tuples)}")
        return self.tuples[name]


def parse_input(data: bytes | str) -> InputFile:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    name = ""
    alphabet: Alphabet | None = None
    rels: list[Word] = []
    named: dict[str, dict[str, tuple[Word, ...]]] = {"sub": {}, "tuple": {}}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = []
        col = 0
        for piece in line.split():
            col = line.index(piece, col)
            tokens.append((piece, col + 1))
            col += len(piece)
        if not tokens:
            continue
        (key, kcol), args = tokens[0], tokens[1:]

        def need_alphabet():
            if alphabet is None:
                raise ParseError(f"'{key}' before 'gens'", lineno, kcol)
            return alphabet

        def word(tok, tcol, allow_identity):
            if tok == "1":
                if allow_identity:
                    return Word(())
                raise ParseError("relators must be nonempty words", lineno, tcol)
            try:
                return need_alphabet().parse(tok)
            except AlphabetError as exc:
                raise ParseError(str(exc.args[0]), lineno, tcol + (exc.position or 0)) from None

        if key == "group":
            if len(args) != 1:
                raise ParseError("'group' takes one name", lineno, kcol)
            name = args[0][0]
        elif key == "gens":
            if alphabet is not None:
                raise ParseError("'gens' given twice", lineno, kcol)
            for tok, tcol in args:
                if len(tok) != 1 or not tok.islower() or not tok.isalpha():
                    raise ParseError(f"generator {tok!r} is not a lowercase letter", lineno, tcol)
            letters = [t for t, _ in args]
            dup = next((c for t, c in args if letters.count(t) > 1), None)
            if dup is not None:
                raise ParseError("duplicate generator", lineno, dup)
            alphabet = Alphabet(tuple(letters))
        elif key == "rel":
            if len(args) != 1:
                raise ParseError("'rel' takes exactly one word", lineno, kcol)
            rels.append(word(*args[0], allow_identity=False))
        elif key in ("sub", "tuple"):
            if not args:
                raise ParseError(f"'{key}' needs a name", lineno, kcol)
            label, lcol = args[0]
            if label in named[key]:
                raise ParseError(f"{key} {label!r} defined twice", lineno, lcol)
            named[key][label] = tuple(word(t, c, allow_identity=True) for t, c in args[1:])
        else:
            raise ParseError(f"unknown keyword {key!r}", lineno, kcol)
    if alphabet is None:
        raise ParseError("missing 'gens' line", max(1, len(text.splitlines())), 1)
    p = Presentation(alphabet, tuple(rels), name=name)
    return InputFile(p, named["sub"], named["tuple"])


def emit_input(f: InputFile) -> str:
    p = f.presentation
    out = []
    if p.name:
        out.append(f"group {p.name}")
    out.append("gens " + " ".join(p.alphabet.names))
    out += [f"rel {p.fmt(r)}" for r in p.relators]
    for key, table in (("sub", f.subgroups), ("tuple", f.tuples)):
        for label, words in table.items():
            out.append(" ".join([key, label] + [p.fmt(w) for w in words]))
    return "\n".join(out) + "\n"


def load_file(path) -> InputFile:
    with open(path, "rb") as fh:
        return parse_input(fh.read())


def corpus_names() -> list[str]:
    root = resources.files("grank") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".grp"))


def load_corpus(name: str) -> InputFile:
    """One of the bundled example groups, e.g. ``load_corpus("genus2")``."""
    path = resources.files("grank") / "corpus" / f"{name}.grp"
    return parse_input(path.read_bytes())
