import json

import numpy as np
import pytest
from pydantic import ValidationError

from errors import InvalidArgumentError, ReportIOError, SymbolValidationError
from schemas import (
    GENERATED_CORPUS,
    RunConfig,
    build_symbol,
    corpus_entries,
    load_symbol,
    parse_alpha,
    parse_coefficients,
    symbol_document,
)
from symbols import BlaschkeSymbol, ProductSymbol, SingularInnerSymbol, random_blaschke


def test_build_polynomial_document():
    phi = build_symbol({"variant": "polynomial", "dim": 1, "terms": [{"index": [1], "coeff": [1.0, 0.0]}]})
    assert phi.eval(0.25) == pytest.approx(0.25)


def test_build_rejects_unknown_variant():
    with pytest.raises(SymbolValidationError):
        build_symbol({"variant": "spline", "dim": 1})


@pytest.mark.parametrize(
    "phi",
    [
        random_blaschke(4, seed=3),
        SingularInnerSymbol(((1j, 0.5),)),
        ProductSymbol((BlaschkeSymbol(((0.3 + 0j, 2),)), SingularInnerSymbol(((-1 + 0j, 1.0),))), gamma=0.5),
    ],
)
def test_document_roundtrip_preserves_values(phi):
    again = build_symbol(json.loads(json.dumps(symbol_document(phi))))
    z = np.array([[0.1], [-0.4j], [0.5 + 0.2j]])
    np.testing.assert_allclose(again.eval(z), phi.eval(z), atol=1e-15)


def test_load_symbol_sources(tmp_path):
    assert load_symbol("z").eval(0.5) == pytest.approx(0.5)
    assert load_symbol("z1_ball2").dim == 2
    inline = '{"variant": "constant", "value": [0.3, 0.0]}'
    assert load_symbol(inline).value_at_origin() == pytest.approx(0.3)
    path = tmp_path / "sym.json"
    path.write_text(inline, encoding="utf-8")
    assert load_symbol(str(path)).is_constant


def test_load_symbol_errors():
    with pytest.raises(ReportIOError):
        load_symbol("no_such_symbol")
    with pytest.raises(SymbolValidationError):
        load_symbol("{not json")


def test_corpus_entries():
    entries = corpus_entries()
    for name in ("z", "z2", "z3", "half_plus_half_z", "const_03", "z_099", "z1_ball2", "z1z2_ball2"):
        assert name in entries
    assert set(GENERATED_CORPUS) <= set(entries)
    assert list(entries) == sorted(entries)
    assert entries["random_blaschke6"].degree == 6


def test_parse_alpha_forms():
    assert parse_alpha("1") == 1
    assert parse_alpha("i") == 1j
    assert parse_alpha("-i") == -1j
    assert parse_alpha("0.6+0.8i") == pytest.approx(0.6 + 0.8j)
    assert parse_alpha("turn:0.25") == pytest.approx(1j)
    with pytest.raises(InvalidArgumentError):
        parse_alpha("0.5")


def test_parse_coefficients():
    assert parse_coefficients("0, 0.5, 0.3i") == [0, 0.5, 0.3j]
    with pytest.raises(InvalidArgumentError):
        parse_coefficients(" , ")
    with pytest.raises(InvalidArgumentError):
        parse_coefficients("1,abc")


def test_run_config_defaults_and_caps():
    config = RunConfig(command="clark", symbol="z")
    assert config.alpha_value() is None
    assert config.radii[-1] < 1.0
    with pytest.raises(ValidationError):
        RunConfig(command="clark", alpha_nodes=10**9)
    with pytest.raises(ValidationError):
        RunConfig(command="clark", radii=[0.9, 0.5])
    with pytest.raises(ValidationError):
        RunConfig(command="clark", alpha="2")
    with pytest.raises(ValidationError):
        RunConfig(command="clark", symbol="no_such_symbol")


def test_hashable_dict_ignores_output():
    a = RunConfig(command="clark", symbol="z", out="a.json")
    b = RunConfig(command="clark", symbol="z", out="b.json", format="csv")
    assert a.hashable_dict() == b.hashable_dict()
