"""Text format: parsing, canonical printing, corpus round trips."""

import re
from fractions import Fraction
from pathlib import Path

import pytest

from localfourier.connection import FormalConnection, RegularPart
from localfourier.dsl import (
    ParsedDocument,
    connection_schema,
    parse,
    parse_scalar_text,
    print_canonical,
    relabel_variable,
    render_connection,
    render_scalar,
    render_series,
)
from localfourier.errors import DomainError, ParseError
from localfourier.exactfield import ONE, rational, zeta
from localfourier.fourier import INFINITY, fourier_0_inf
from localfourier.series import LaurentSeries

CORPUS = Path(__file__).parent / "corpus"
VALID = sorted((CORPUS / "valid").glob("*.conn"))
MALFORMED = sorted((CORPUS / "malformed").glob("*.conn"))


def _first(doc: ParsedDocument):
    return doc.statements[0].value


# -- parsing basics --------------------------------------------------------

def test_parse_elementary():
    el = _first(parse("El(rho=u^2, phi=1/1*u^-3, R=[(1:1)])")).summands[0]
    assert el.p == 2 and el.q == 3
    assert el.slope == Fraction(3, 2)
    assert el.reg == RegularPart([(1, 1)])


def test_parse_residue_sugar():
    el = _first(parse("Reg(R=[(res:1/2 : 2)])")).summands[0]
    assert el.reg == RegularPart([(rational(-1), 2)])
    el = _first(parse("Reg(R=[(res:-1/3 : 1)])")).summands[0]
    assert el.reg.jordan[0][0] == zeta(3) ** 2


def test_parse_rejects_constant_rho():
    with pytest.raises(ParseError, match="constant term in rho"):
        parse("El(rho=u^0, phi=1/1*u^-1, R=[(1:1)])")
    with pytest.raises(ParseError, match="constant term in rho"):
        parse("El(rho=u + 2/1, phi=1/1*u^-1, R=[(1:1)])")
    with pytest.raises(ParseError, match="order at least one"):
        parse("El(rho=0/1, phi=1/1*u^-1, R=[(1:1)])")


def test_parse_direct_sum_and_names():
    doc = parse("a = El(rho=u, phi=1/1*u^-1, R=[(1:1)]) (+) Reg(R=[(2:1)]);\nb = Reg(R=[(1:1)]);")
    assert set(doc.connections) == {"a", "b"}
    assert len(doc.connections["a"].summands) == 2
    assert doc.statements[0].line == 1 and doc.statements[1].line == 2


def test_parse_anonymous_document():
    doc = parse("El(rho=u, phi=1/1*u^-1, R=[(1:1)])")
    assert doc.statements[0].name is None
    assert isinstance(_first(doc), FormalConnection)


def test_parse_series_features():
    el = _first(parse("El(rho=u, phi=1/1*u^-1 + 1/1*u^-1 - 1/2*u^-3, R=[(1:1)])")).summands[0]
    assert el.phi.coefficient(-1) == rational(2)
    assert el.phi.coefficient(-3) == rational(Fraction(-1, 2))
    el = _first(parse("El(rho=u^2 + O(u^4), phi=1/1*u^-1, R=[(1:1)])")).summands[0]
    assert el.rho.prec == 4


def test_parse_scalar_text_forms():
    assert parse_scalar_text("3/2") == rational(Fraction(3, 2))
    assert parse_scalar_text("-2") == rational(-2)
    assert parse_scalar_text("i") == zeta(4)
    assert parse_scalar_text("zeta(3)^2") == zeta(3) ** 2
    assert parse_scalar_text("root(2,2)") ** 2 == rational(2)
    assert parse_scalar_text("(1+i)*(1-i)") == rational(2)
    assert parse_scalar_text("2 - 3/4") == rational(Fraction(5, 4))


def test_parse_sing_finite():
    d = _first(parse("s = Sing(at=0, summands=El(rho=u, phi=1/1*u^-1, R=[(1:1)]), germ=[(2:1)]);"))
    assert not d.is_infinity()
    assert d.location == rational(0)
    assert len(d.summands) == 1
    assert d.germ.psi == RegularPart([(2, 1)])


def test_parse_sing_infinity():
    text = (
        "s = Sing(at=infinity, gt1=El(rho=u, phi=1/1*u^-3, R=[(1:1)]), "
        "eq1=[(shat=2, els=El(rho=u^3, phi=1/1*u^-2, R=[(1:1)]), R=[(5:1)])], "
        "reg=[]);"
    )
    d = _first(parse(text))
    assert d.is_infinity() and d.location is INFINITY
    assert len(d.slope_gt1) == 1
    shat, els, reg = d.slope_eq1[0]
    assert shat == rational(2) and len(els) == 1 and reg == RegularPart([(5, 1)])
    assert d.lt1_regular == RegularPart([])


def test_document_accessors():
    doc = parse(
        "c = El(rho=u, phi=1/1*u^-1, R=[(1:1)]);\n"
        "s = Sing(at=0, germ=[(2:1)]);"
    )
    assert list(doc.connections) == ["c"]
    assert list(doc.data) == ["s"]
    assert len(doc.data_list()) == 1 and len(doc.connection_list()) == 1


# -- located errors --------------------------------------------------------

def test_error_location_on_later_line():
    text = "a = Reg(R=[(1:1)]);\nb = El(rho=u, phi=1/1*u^-1, R=[(0:2)]);"
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == 2
    assert "zero eigenvalue" in str(exc.value)


def test_error_messages():
    cases = {
        "El(rho=u, phi=1/1*u^-1/2, R=[(1:1)])": "non-integer exponent",
        "El(rho=u, phi=1/0*u^-1, R=[(1:1)])": "zero denominator",
        "zeta = Reg(R=[(1:1)]);": "reserved word",
        "a = Reg(R=[(1:1)]);\na = Reg(R=[(1:1)]);": "duplicate name",
        "El(rho=u, phi=1/1*v^-1, R=[(1:1)])": "conflicts",
        "El(rho=u*u, phi=1/1*u^-1, R=[(1:1)])": "two variable factors",
        "s = Sing(at=0, orbit=[(1:1)]);": "unknown field",
        "": "empty document",
    }
    for text, needle in cases.items():
        with pytest.raises(ParseError, match=needle):
            parse(text)


def test_semantic_errors_from_constructors_have_locations():
    with pytest.raises(ParseError) as exc:
        parse("s = Sing(at=infinity, lt1=El(rho=u, phi=1/1*u^-3, R=[(1:1)]));")
    assert exc.value.line == 1 and "slope" in str(exc.value)


# -- printing --------------------------------------------------------------

def test_golden_family_text():
    el = _first(parse("El(rho=u, phi=1/1*u^-1, R=[(1:1)])")).summands[0]
    tr = fourier_0_inf(el, sign="-")
    text = render_connection(relabel_variable(tr, "u"))
    assert text == "El(rho=-1/1*u^2, phi=2/1*u^-1, R=[(-1:1)])"


def test_scalar_rendering():
    assert render_scalar(rational(-1)) == "-1"
    assert render_scalar(rational(Fraction(3, 2))) == "3/2"
    assert render_scalar(zeta(4)) == "zeta(4)"
    assert render_scalar(zeta(3) ** 2) == "-1 - zeta(3)"
    assert render_scalar(rational(2) * zeta(3)) == "2*zeta(3)"
    two_root = parse_scalar_text("root(2,2)")
    assert render_scalar(two_root) == "root(2,2)"
    assert parse_scalar_text(render_scalar(two_root * rational(3) + ONE)) == (
        two_root * rational(3) + ONE
    )


def test_series_rendering():
    s = LaurentSeries({-1: 1, 2: rational(Fraction(-2, 3))})
    assert render_series(s) == "u^-1 - 2/3*u^2"
    assert render_series(LaurentSeries({}, 3)) == "O(u^3)"
    assert render_series(LaurentSeries({})) == "0/1"
    assert render_series(LaurentSeries({1: -1})) == "-1/1*u"


def test_relabel_variable():
    conn = _first(parse("El(rho=w^2, phi=5/1*w^-3, R=[(1:1)])"))
    out = relabel_variable(conn, "u")
    assert out.summands[0].rho.var == "u"
    assert out.summands[0].rho.items() == conn.summands[0].rho.items()


def test_json_schema():
    conn = _first(parse("El(rho=u, phi=1/1*u^-2, R=[(1:2)]) (+) Reg(R=[(3:1)])"))
    schema = connection_schema(conn)
    assert schema["total"] == {"rank": 3, "irr": 4}
    first = schema["summands"][0]
    assert set(first) == {"rho", "phi", "jordan", "p", "q", "r", "slope", "irr", "rank"}
    assert first["slope"] == "2"
    import json

    assert json.loads(print_canonical(conn, format="json")) == schema
    with pytest.raises(DomainError):
        print_canonical(conn, format="html")


# -- the corpus ------------------------------------------------------------

@pytest.mark.parametrize("path", VALID, ids=lambda p: p.stem)
def test_corpus_roundtrip(path):
    doc = parse(path.read_text())
    text1 = print_canonical(doc)
    doc2 = parse(text1)
    text2 = print_canonical(doc2)
    assert text1 == text2
    for a, b in zip(doc.statements, doc2.statements):
        assert a.name == b.name
        if isinstance(a.value, FormalConnection):
            assert a.value == b.value


def test_corpus_is_large_enough():
    assert len(VALID) >= 30
    assert len(MALFORMED) >= 10


@pytest.mark.parametrize("path", MALFORMED, ids=lambda p: p.stem)
def test_corpus_malformed(path):
    with pytest.raises(ParseError) as exc:
        parse(path.read_text())
    assert exc.value.line >= 1 and exc.value.column >= 1
    assert re.match(r"^\d+:\d+: ", str(exc.value))
