import numpy as np
import pytest

from robincone.errors import ConfigError
from robincone.expr import compile_profile


def test_constant_plus_cosine():
    f = compile_profile("0.7853981633974483 + 0.1*cos(2*phi)")
    phi = np.linspace(0, 2 * np.pi, 17)
    expect = 0.7853981633974483 + 0.1 * np.cos(2 * phi)
    assert np.allclose(f(phi), expect, atol=1e-15)


def test_precedence_and_parentheses():
    f = compile_profile("1 + 2*3 - 4/2")
    assert f(0.0) == pytest.approx(5.0)
    g = compile_profile("(1 + 2)*(3 - 4)/2")
    assert g(0.0) == pytest.approx(-1.5)


def test_unary_minus_and_nesting():
    f = compile_profile("-sin(-phi) + cos(phi*0)")
    assert f(0.5) == pytest.approx(np.sin(0.5) + 1.0)


def test_scalar_and_array_shapes():
    f = compile_profile("sin(phi)/2")
    assert np.isscalar(float(f(1.0)))
    assert f(np.zeros((3,))).shape == (3,)


def test_rejects_unknown_names():
    with pytest.raises(ConfigError):
        compile_profile("tan(phi)")
    with pytest.raises(ConfigError):
        compile_profile("phi + x")


def test_rejects_malformed():
    for text in ("1 +", "sin phi", "(1", "1 2", "cos()"):
        with pytest.raises(ConfigError):
            compile_profile(text)
