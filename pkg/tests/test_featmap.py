import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgc.featmap import (FeatureMapError, FeatureMapSpec, expand, expand_mp, expand_rp,
                         expand_rsp, expanded_dim)


def _monomial_values(x, r):
    # every exponent vector with total degree <= r
    d = len(x)
    vals = []
    for e in itertools.product(range(r + 1), repeat=d):
        if sum(e) <= r:
            vals.append(float(np.prod([xi ** k for xi, k in zip(x, e)])))
    return sorted(vals)


@given(d=st.integers(1, 8), r=st.integers(1, 5))
@settings(max_examples=60, deadline=None)
def test_dimensions(d, r):
    x = np.linspace(-0.9, 0.8, d)
    assert expand_mp(x, r).size == comb(d + r, r) == expanded_dim(FeatureMapSpec("MP", r), d)
    n_rp = 1 + r + d * (2 * r - 1)
    assert expand_rp(x, r).size == n_rp
    assert expand_rsp(x, r, 0.5, 0.3).size == n_rp == expanded_dim(FeatureMapSpec("RSP", r), d)


@pytest.mark.parametrize("d, r", [(1, 3), (2, 2), (3, 3), (4, 2)])
def test_mp_matches_monomial_enumeration(d, r, rng):
    x = rng.uniform(-1.5, 1.5, d)
    q = expand_mp(x, r)
    assert q[0] == 1.0
    np.testing.assert_allclose(sorted(q), _monomial_values(x, r), rtol=1e-12)


def test_mp_order_graded_lex():
    q = expand_mp(np.array([2.0, 3.0]), 2)
    np.testing.assert_array_equal(q, [1, 2, 3, 4, 6, 9])


def test_rp_explicit_terms():
    x1, x2 = 2.0, 3.0
    s = x1 + x2
    want = [1, x1, x2, x1 ** 2, x2 ** 2, x1 ** 3, x2 ** 3, s, s ** 2, s ** 3,
            x1 * s, x2 * s, x1 * s ** 2, x2 * s ** 2]
    np.testing.assert_allclose(expand_rp(np.array([x1, x2]), 3), want)


def test_rsp_is_rp_of_sinh(rng):
    x = rng.normal(size=(5, 3))
    np.testing.assert_allclose(expand_rsp(x, 3, 0.5, 0.3), expand_rp(0.5 * np.sinh(0.3 * x), 3))


def test_rsp_overflow_guard():
    with pytest.raises(FeatureMapError, match="overflow"):
        expand_rsp(np.array([1000.0]), 2, 1.0, 1.0)
    with pytest.raises(FeatureMapError):
        expand_rsp(np.array([1.0]), 2, -1.0, 1.0)


def test_batch_equals_rows(rng):
    X = rng.normal(size=(4, 3))
    spec = FeatureMapSpec("RP", 3)
    np.testing.assert_allclose(expand(X, spec), np.vstack([expand(x, spec) for x in X]))


def test_lin_is_mp_order_one():
    x = np.array([0.5, -2.0])
    np.testing.assert_array_equal(expand(x, FeatureMapSpec("LIN")), [1.0, 0.5, -2.0])


@pytest.mark.parametrize("text, want", [
    ("lin", FeatureMapSpec("LIN")),
    ("mp:r=2", FeatureMapSpec("MP", 2)),
    ("RP:r=3", FeatureMapSpec("RP", 3)),
    ("rsp:r=2,eta=0.5,sigma=0.3", FeatureMapSpec("RSP", 2, 0.5, 0.3)),
    ("rspf", FeatureMapSpec("RSP", 2, 1.0, 1.0)),
    ("rspf:r=4", FeatureMapSpec("RSP", 4, 1.0, 1.0)),
])
def test_parse(text, want):
    spec = FeatureMapSpec.parse(text)
    assert spec == want
    assert FeatureMapSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("bad", ["poly", "mp:r=0", "mp:q=2", "lin:r=2", "mp:eta=1",
                                 "rsp:r=2,eta=-1", "rsp:r=x", ""])
def test_parse_rejects(bad):
    with pytest.raises(FeatureMapError):
        FeatureMapSpec.parse(bad)
