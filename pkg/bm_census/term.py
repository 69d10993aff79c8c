"""
Terms over one binary operation and identities between them.

Two text grammars are supported:

* compact: juxtaposition (``xy``) binds tighter than the mid-dot (``·`` or
  ``.``), both associate to the left, parentheses override. ``xy·zx`` is
  ``(x*y)*(z*x)``.
* explicit: fully parenthesized products with ``*`` and no precedence.
  ``((x*y)*z)*x``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from bm_census.constants import MID_DOT, MID_DOTS, VARIABLES


class Grammar(str, Enum):
    COMPACT = "compact"
    EXPLICIT = "explicit"


class BolMoufangClass(str, Enum):
    CLASSICAL = "classical"
    GENERALIZED = "generalized"
    NEITHER = "neither"


class ParseError(ValueError):
    """Syntax error located by UTF-8 byte offset into the source text."""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"❌ {message} at byte {offset} in {text!r}")


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Prod:
    left: Term
    right: Term


Term = Var | Prod


@dataclass(frozen=True, slots=True)
class Identity:
    lhs: Term
    rhs: Term
    name: str | None = field(default=None, compare=False)
    abbrev: str | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return format_identity(self)


# ----------------------
# Structure helpers
# ----------------------
def leaves(term: Term) -> tuple[str, ...]:
    """Variable names read left to right."""
    if isinstance(term, Var):
        return (term.name,)
    return leaves(term.left) + leaves(term.right)


def variables(identity: Identity) -> tuple[str, ...]:
    """Distinct variables of both sides in first-seen order (LHS first)."""
    return tuple(dict.fromkeys(leaves(identity.lhs) + leaves(identity.rhs)))


def mirror(term: Term) -> Term:
    """Swap the children of every product."""
    if isinstance(term, Var):
        return term
    return Prod(mirror(term.right), mirror(term.left))


def rename(term: Term, mapping: dict[str, str]) -> Term:
    if isinstance(term, Var):
        return Var(mapping[term.name])
    return Prod(rename(term.left, mapping), rename(term.right, mapping))


def has_square(term: Term) -> bool:
    """True if some subterm multiplies a variable by itself (``xx``)."""
    if isinstance(term, Var):
        return False
    if term.left == term.right and isinstance(term.left, Var):
        return True
    return has_square(term.left) or has_square(term.right)


def swap(identity: Identity) -> Identity:
    return Identity(identity.rhs, identity.lhs, identity.name, identity.abbrev)


# ----------------------
# Parsing
# ----------------------
_VAR, _DOT, _STAR, _OPEN, _CLOSE, _EQ, _END = (
    "variable",
    "'·'",
    "'*'",
    "'('",
    "')'",
    "'='",
    "end of input",
)


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str, grammar: Grammar) -> list[tuple[str, str, int]]:
    """Split text into (kind, lexeme, byte offset) tokens; whitespace is dropped."""
    tokens = []
    for index, char in enumerate(text):
        offset = _byte_offset(text, index)
        if char.isspace():
            continue
        if char in VARIABLES:
            tokens.append((_VAR, char, offset))
        elif char.isalpha():
            raise ParseError(
                f"Unknown variable {char!r} (expected one of {', '.join(VARIABLES)})",
                text,
                offset,
            )
        elif char in MID_DOTS:
            if grammar is Grammar.EXPLICIT:
                raise ParseError("Mid-dot is not allowed in explicit grammar", text, offset)
            tokens.append((_DOT, char, offset))
        elif char == "*":
            if grammar is Grammar.COMPACT:
                raise ParseError("'*' is only allowed in explicit grammar", text, offset)
            tokens.append((_STAR, char, offset))
        elif char == "(":
            tokens.append((_OPEN, char, offset))
        elif char == ")":
            tokens.append((_CLOSE, char, offset))
        elif char == "=":
            tokens.append((_EQ, char, offset))
        else:
            raise ParseError(f"Unexpected character {char!r}", text, offset)
    tokens.append((_END, "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    """Recursive descent over the token list for either grammar."""

    def __init__(self, text: str, grammar: Grammar):
        self.text = text
        self.grammar = grammar
        self.tokens = _tokenize(text, grammar)
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, expected: str):
        kind, lexeme, offset = self.tokens[self.pos]
        found = "end of input" if kind == _END else repr(lexeme)
        raise ParseError(f"Expected {expected}, found {found}", self.text, offset)

    def expect(self, kind: str):
        if self.peek() != kind:
            self.fail(kind)
        return self.advance()

    def term(self) -> Term:
        if self.grammar is Grammar.COMPACT:
            return self.dotted()
        return self.explicit()

    # compact: dotted := juxt ('·' juxt)*
    def dotted(self) -> Term:
        term = self.juxt()
        while self.peek() == _DOT:
            self.advance()
            term = Prod(term, self.juxt())
        return term

    # compact: juxt := atom atom*
    def juxt(self) -> Term:
        term = self.atom(self.dotted)
        while self.peek() in (_VAR, _OPEN):
            term = Prod(term, self.atom(self.dotted))
        return term

    # explicit: expr := operand ['*' operand]
    def explicit(self) -> Term:
        term = self.atom(self.explicit)
        if self.peek() == _STAR:
            self.advance()
            term = Prod(term, self.atom(self.explicit))
            if self.peek() == _STAR:
                self.fail("')' (explicit products must be parenthesized)")
        return term

    def atom(self, inner) -> Term:
        if self.peek() == _VAR:
            return Var(self.advance()[1])
        if self.peek() == _OPEN:
            self.advance()
            term = inner()
            self.expect(_CLOSE)
            return term
        self.fail("a variable or '('")


def parse_term(text: str, grammar: Grammar = Grammar.COMPACT) -> Term:
    """Parse one term; the whole text must be consumed."""
    parser = _Parser(text, grammar)
    if parser.peek() == _END:
        raise ParseError("Empty term", text, 0)
    term = parser.term()
    parser.expect(_END)
    return term


def parse_identity(
    text: str,
    grammar: Grammar = Grammar.COMPACT,
    name: str | None = None,
    abbrev: str | None = None,
) -> Identity:
    """Parse ``lhs = rhs``. No balance check is made here."""
    equals = [i for i, char in enumerate(text) if char == "="]
    if not equals:
        raise ParseError("Missing '='", text, len(text.encode("utf-8")))
    if len(equals) > 1:
        raise ParseError("Repeated '='", text, _byte_offset(text, equals[1]))

    parser = _Parser(text, grammar)
    if parser.peek() == _EQ:
        parser.fail("a variable or '('")
    lhs = parser.term()
    parser.expect(_EQ)
    if parser.peek() == _END:
        parser.fail("a variable or '('")
    rhs = parser.term()
    parser.expect(_END)
    return Identity(lhs, rhs, name, abbrev)


# ----------------------
# Formatting
# ----------------------
def _is_word(term: Term) -> bool:
    """A variable or a product of two variables, written without brackets."""
    return isinstance(term, Var) or (
        isinstance(term.left, Var) and isinstance(term.right, Var)
    )


def _compact(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    left, right = term.left, term.right
    if isinstance(left, Var):
        if isinstance(right, Var):
            return left.name + right.name
        if _is_word(right):
            return f"{left.name}{MID_DOT}{_compact(right)}"
        return f"{left.name}({_compact(right)})"
    if isinstance(right, Var):
        if _is_word(left):
            return f"{_compact(left)}{MID_DOT}{right.name}"
        return f"({_compact(left)}){right.name}"
    # right operand of a mid-dot must sit at juxtaposition level
    right_text = _compact(right) if _is_word(right) else f"({_compact(right)})"
    return f"{_compact(left)}{MID_DOT}{right_text}"


def _explicit(term: Term, top: bool = True) -> str:
    if isinstance(term, Var):
        return term.name
    text = f"{_explicit(term.left, False)}*{_explicit(term.right, False)}"
    return text if top else f"({text})"


def format_term(term: Term, grammar: Grammar = Grammar.COMPACT) -> str:
    if grammar is Grammar.COMPACT:
        return _compact(term)
    return _explicit(term)


def format_identity(identity: Identity, grammar: Grammar = Grammar.COMPACT) -> str:
    return f"{format_term(identity.lhs, grammar)} = {format_term(identity.rhs, grammar)}"


# ----------------------
# Classification
# ----------------------
def _one_letter_twice(sequence: tuple[str, ...]) -> bool:
    return len(sequence) == 4 and len(Counter(sequence)) == 3


def is_generalized(identity: Identity) -> bool:
    """Same three letters on both sides, the same one of them twice."""
    left, right = leaves(identity.lhs), leaves(identity.rhs)
    return Counter(left) == Counter(right) and _one_letter_twice(left)


def is_classical(identity: Identity) -> bool:
    """Generalized, and the letters appear in the same order on both sides."""
    return is_generalized(identity) and leaves(identity.lhs) == leaves(identity.rhs)


def classify(identity: Identity) -> BolMoufangClass:
    """Strongest applicable Bol-Moufang label."""
    if is_classical(identity):
        return BolMoufangClass.CLASSICAL
    if is_generalized(identity):
        return BolMoufangClass.GENERALIZED
    return BolMoufangClass.NEITHER


# ----------------------
# Renaming and the (12)-parastrophe
# ----------------------
def canonical_rename(identity: Identity) -> Identity:
    """Rename variables to x, y, z in order of first appearance, LHS first."""
    mapping = {name: VARIABLES[i] for i, name in enumerate(variables(identity))}
    return Identity(
        rename(identity.lhs, mapping),
        rename(identity.rhs, mapping),
        identity.name,
        identity.abbrev,
    )


def parastrophe_identity(identity: Identity) -> Identity:
    """
    The identity F* that holds in the (12)-parastrophe x*y = y·x exactly when
    F holds in (G, ·): every product is mirrored, then variables are renamed.
    """
    name = f"{identity.name}*" if identity.name else None
    mirrored = Identity(mirror(identity.lhs), mirror(identity.rhs), name)
    return canonical_rename(mirrored)


def identities_equal(a: Identity, b: Identity) -> bool:
    """Equal up to renaming of variables and the orientation of the sides."""
    first = canonical_rename(a)
    for candidate in (b, swap(b)):
        other = canonical_rename(candidate)
        if (first.lhs, first.rhs) == (other.lhs, other.rhs):
            return True
    return False
