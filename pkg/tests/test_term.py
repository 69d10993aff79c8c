import pytest
from hypothesis import given
from hypothesis import strategies as st

from bm_census.term import (
    BolMoufangClass,
    Grammar,
    Identity,
    ParseError,
    Prod,
    Var,
    canonical_rename,
    classify,
    format_identity,
    format_term,
    has_square,
    identities_equal,
    leaves,
    mirror,
    parastrophe_identity,
    parse_identity,
    parse_term,
    swap,
    variables,
)

x, y, z = Var("x"), Var("y"), Var("z")

terms = st.recursive(
    st.sampled_from([x, y, z]),
    lambda inner: st.builds(Prod, inner, inner),
    max_leaves=8,
)


# ----------------------
# Parsing
# ----------------------
@pytest.mark.parametrize(
    "text, expected",
    [
        ("x", x),
        ("xy", Prod(x, y)),
        ("xyz", Prod(Prod(x, y), z)),
        ("xy·zx", Prod(Prod(x, y), Prod(z, x))),
        ("xy.zx", Prod(Prod(x, y), Prod(z, x))),
        ("(xy·z)x", Prod(Prod(Prod(x, y), z), x)),
        ("x(y·zx)", Prod(x, Prod(y, Prod(z, x)))),
        ("x·yz", Prod(x, Prod(y, z))),
        ("(xy)(xz)", Prod(Prod(x, y), Prod(x, z))),
        (" ( x y ) z ", Prod(Prod(x, y), z)),
    ],
)
def test_parse_compact(text, expected):
    assert parse_term(text) == expected


def test_parse_explicit():
    assert parse_term("((x*y)*z)*x", Grammar.EXPLICIT) == Prod(Prod(Prod(x, y), z), x)
    assert parse_term("(x*(y*z))", Grammar.EXPLICIT) == Prod(x, Prod(y, z))


@pytest.mark.parametrize(
    "text, grammar, offset",
    [
        ("xw", Grammar.COMPACT, 1),
        ("x*y", Grammar.COMPACT, 1),
        ("x·y", Grammar.EXPLICIT, 1),
        ("x*y*z", Grammar.EXPLICIT, 3),
        ("(xy", Grammar.COMPACT, 3),
        ("x·", Grammar.COMPACT, 3),  # the mid-dot is two bytes
        ("", Grammar.COMPACT, 0),
    ],
)
def test_parse_errors_report_byte_offset(text, grammar, offset):
    with pytest.raises(ParseError) as info:
        parse_term(text, grammar)
    assert info.value.offset == offset


def test_parse_identity():
    identity = parse_identity("xy·zx = (xy·z)x", name="F1")
    assert identity.lhs == Prod(Prod(x, y), Prod(z, x))
    assert identity.rhs == Prod(Prod(Prod(x, y), z), x)
    assert identity.name == "F1"


@pytest.mark.parametrize(
    "text, message, offset",
    [
        ("xy·zx", "Missing '='", 6),
        ("x = y = z", "Repeated '='", 6),
        ("= x", "Expected", 0),
        ("x =", "Expected", 3),
    ],
)
def test_parse_identity_errors(text, message, offset):
    with pytest.raises(ParseError, match=message) as info:
        parse_identity(text)
    assert info.value.offset == offset


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        parse_term("q")


# ----------------------
# Formatting
# ----------------------
@pytest.mark.parametrize(
    "text, formatted",
    [
        ("xy·zx", "xy·zx"),
        ("(xy·z)x", "(xy·z)x"),
        ("(x·yz)x", "(x·yz)x"),
        ("x(y·zx)", "x(y·zx)"),
        ("x(yz·x)", "x(yz·x)"),
        ("x(y(zx))", "x(y·zx)"),
        ("((xx)y)z", "(xx·y)z"),
        ("(xy)z", "xy·z"),
    ],
)
def test_format_compact(text, formatted):
    assert format_term(parse_term(text)) == formatted


def test_format_explicit():
    term = parse_term("(xy·z)x")
    assert format_term(term, Grammar.EXPLICIT) == "((x*y)*z)*x"
    identity = parse_identity("xy·zx = (xy·z)x")
    assert format_identity(identity, Grammar.EXPLICIT) == "(x*y)*(z*x) = ((x*y)*z)*x"


@given(terms, st.sampled_from(list(Grammar)))
def test_format_parse_round_trip(term, grammar):
    assert parse_term(format_term(term, grammar), grammar) == term


# ----------------------
# Structure and classification
# ----------------------
def test_leaves_and_variables():
    identity = parse_identity("yx·zx = (yx·z)x")
    assert leaves(identity.lhs) == ("y", "x", "z", "x")
    assert variables(identity) == ("y", "x", "z")


def test_has_square():
    assert has_square(parse_term("(xx·y)z"))
    assert not has_square(parse_term("(xy·x)z"))


@pytest.mark.parametrize(
    "text, label",
    [
        ("xy·zx = (xy·z)x", BolMoufangClass.CLASSICAL),
        ("(xy)(xz) = (xx)(zy)", BolMoufangClass.GENERALIZED),
        ("x·yz = x", BolMoufangClass.NEITHER),
        ("xy = yx", BolMoufangClass.NEITHER),
        ("x(yz) = (xy)z", BolMoufangClass.NEITHER),
    ],
)
def test_classify(text, label):
    assert classify(parse_identity(text)) is label


# ----------------------
# Renaming and parastrophes
# ----------------------
def test_canonical_rename():
    renamed = canonical_rename(parse_identity("yx·zx = (yx·z)x"))
    assert format_identity(renamed) == "xy·zy = (xy·z)y"


def test_parastrophe_identity():
    # F1* = F3
    f1 = parse_identity("xy·zx = (xy·z)x", name="F1")
    star = parastrophe_identity(f1)
    assert format_identity(star) == "xy·zx = x(y·zx)"
    assert star.name == "F1*"


def test_parastrophe_of_trivial_identity():
    assert parastrophe_identity(parse_identity("x=x")) == Identity(x, x)


@given(terms, terms)
def test_parastrophe_is_involution_up_to_renaming(lhs, rhs):
    identity = Identity(lhs, rhs)
    twice = parastrophe_identity(parastrophe_identity(identity))
    assert twice == canonical_rename(identity)


@given(terms)
def test_mirror_is_involution(term):
    assert mirror(mirror(term)) == term


def test_identities_equal_ignores_names_and_orientation():
    a = parse_identity("xy·zx = (xy·z)x")
    b = parse_identity("(zx·y)z = zx·yz")
    assert identities_equal(a, b)
    assert identities_equal(a, swap(a))
    assert not identities_equal(a, parse_identity("xy·zx = (x·yz)x"))
