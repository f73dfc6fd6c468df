import json
from fractions import Fraction

import pytest

from penner.errors import ValidationError
from penner.model import (PRESETS, Potential, build_potential, load_config, preset, serialize,
                          validate)


@pytest.mark.parametrize("name", PRESETS)
def test_presets_validate(name):
    p = preset(name)
    validate(p)
    assert p.name == name


def test_gaussian_penner_pairs_and_vprime():
    p = preset("gaussian_penner")
    assert p.z2
    assert p.pairs() == [(Fraction(1, 2), (0, 0))]
    assert p.v_prime_coeffs() == [Fraction(1, 2)]


def test_cubic_w0_prime():
    assert preset("cubic_penner").w0_prime_coeffs() == [0, 0, 1]


def test_config_roundtrip(tmp_path):
    p = preset("double_penner", Fraction(1, 3), Fraction(2))
    path = tmp_path / "p.json"
    path.write_text(serialize(p, N=6))
    q, N = load_config(path)
    assert q == p and N == 6


def test_config_errors(tmp_path):
    with pytest.raises(ValidationError):
        build_potential({"poly": ["1"], "colour": "red"})
    with pytest.raises(ValidationError):
        preset("quintic")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValidationError):
        load_config(bad)


def test_log_point_inside_contour_rejected():
    with pytest.raises(ValidationError):
        validate(Potential((1,), ((1, 2),), "half_line"))


def test_z2_needs_even_polynomial():
    with pytest.raises(ValidationError):
        validate(Potential((1, 1), (), "real_line", True))


def test_preset_by_config_name():
    p = build_potential(json.loads('{"preset": "double_penner", "params": {"mu0": "1/2", "mu1": "3"}}'))
    assert p.logterms[0].mu == Fraction(1, 2)
