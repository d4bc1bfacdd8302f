import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wigner.rays import (
    Ray,
    RayPair,
    canonical_gauge,
    format_ray,
    parse_ray,
    ray_equal,
    ray_from_vector,
    ray_product,
    rephase,
)

from .conftest import e, random_unit

angles = st.floats(-10, 10, allow_nan=False)


def test_ray_from_vector_normalizes():
    np.testing.assert_array_equal(ray_from_vector([2, 0]).rep, [1, 0])
    r = ray_from_vector([0, 3j])
    assert abs(r.rep[1]) == pytest.approx(1.0)
    assert ray_equal(r, ray_from_vector(e(2, 1)), 1e-14)
    with pytest.raises(ValueError, match="zero vector has no ray"):
        ray_from_vector([0, 0])


def test_ray_rejects_non_unit_rep():
    with pytest.raises(ValueError):
        Ray(np.array([1.0, 1.0]))


def test_ray_is_immutable():
    r = ray_from_vector([1, 1j])
    with pytest.raises(ValueError):
        r.rep[0] = 5


def test_ray_from_scaled_vector_is_same_ray(rng):
    v = random_unit(rng, 4)
    for c in (2.5, -1j, 3 - 4j, 1e-3 * np.exp(0.3j)):
        assert ray_equal(ray_from_vector(c * v), ray_from_vector(v), 1e-14)


def test_ray_product_examples():
    for theta in np.linspace(0, 2 * np.pi, 7):
        assert ray_product(ray_from_vector(e(2, 0)),
                           ray_from_vector(np.exp(1j * theta) * e(2, 0))) == pytest.approx(1.0, abs=1e-15)
    assert ray_product(ray_from_vector(e(2, 0)), ray_from_vector(e(2, 1))) == 0.0
    xi = ray_from_vector(e(2, 0) + e(2, 1))
    assert ray_product(ray_from_vector(e(2, 0)), xi) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_ray_product_dimension_mismatch():
    with pytest.raises(ValueError):
        ray_product(ray_from_vector(e(2, 0)), ray_from_vector(e(3, 0)))
    with pytest.raises(ValueError):
        RayPair(ray_from_vector(e(2, 0)), ray_from_vector(e(3, 0)))


def test_ray_equal_examples(rng):
    r = ray_from_vector(random_unit(rng, 3))
    assert ray_equal(r, rephase(r, 1.7), 1e-12)
    assert not ray_equal(ray_from_vector(e(2, 0)), ray_from_vector(e(2, 1)), 1e-10)
    v = random_unit(rng, 2)
    w = v + 1e-14 * e(2, 1)
    # direct computation of the product agrees with the decision
    direct = abs(np.vdot(v, w)) / np.linalg.norm(w)
    assert direct >= 1 - 1e-10
    assert ray_equal(ray_from_vector(v), ray_from_vector(w), 1e-10)


def test_rephase_examples():
    r = ray_from_vector([0.6, 0.8j])
    np.testing.assert_array_equal(rephase(r, 0.0).rep, r.rep)
    np.testing.assert_allclose(rephase(ray_from_vector(e(2, 0)), math.pi).rep, [-1, 0], atol=1e-15)
    np.testing.assert_allclose(rephase(rephase(r, math.pi / 2), math.pi / 2).rep,
                               rephase(r, math.pi).rep, atol=1e-15)


@given(st.integers(1, 6), angles, angles, st.integers(0, 2**32 - 1))
def test_gauge_invariance(dim, t1, t2, seed):
    rng = np.random.default_rng(seed)
    r1, r2 = ray_from_vector(random_unit(rng, dim)), ray_from_vector(random_unit(rng, dim))
    p = ray_product(r1, r2)
    assert abs(ray_product(rephase(r1, t1), rephase(r2, t2)) - p) <= 1e-14
    assert 0.0 <= p <= 1 + 1e-14
    assert ray_product(r1, r1) == pytest.approx(1.0, abs=1e-14)


def test_canonical_gauge_is_phase_free(rng):
    r = ray_from_vector(random_unit(rng, 5))
    np.testing.assert_allclose(canonical_gauge(rephase(r, 2.2)), canonical_gauge(r), atol=1e-15)
    k = int(np.argmax(np.abs(r.rep)))
    assert canonical_gauge(r)[k].imag == pytest.approx(0.0, abs=1e-16)


def test_ray_text_format(rng):
    r = ray_from_vector(random_unit(rng, 3))
    line = format_ray(r)
    assert line.startswith("ray ")
    np.testing.assert_array_equal(parse_ray(line).rep, r.rep)
    with pytest.raises(ValueError):
        parse_ray("vec 1,0")
