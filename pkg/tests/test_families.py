import numpy as np
import pytest

from vilenkin import FunctionSpec, TowerError, forward, generate_function, heisenberg, padic, vilenkin
from vilenkin.families import dini_tail, power_tail
from vilenkin.regularity import tail_table


def test_indicator():
    t = padic(3, 3)
    f = generate_function(t, FunctionSpec("indicator", {"m": 1}))
    assert np.array_equal(np.flatnonzero(f.values), np.arange(0, 27, 3))
    with pytest.raises(TowerError):
        generate_function(t, FunctionSpec("indicator", {"m": 3}))


def test_radial():
    t = padic(3, 3)
    f = generate_function(t, {"family": "radial", "params": {"alpha": 1}})
    assert f.values[6] == pytest.approx(1 / 3)
    assert f.values[0] == 0
    assert f.values[1] == 1


def test_random_fourier_exact_tail():
    t = padic(3, 6)
    f = generate_function(t, {"family": "random_fourier", "params": {"alpha": 0.5}, "seed": 7})
    tails = tail_table(forward(f))
    assert tails[1] == pytest.approx(1 / 3, rel=1e-12)
    assert np.allclose(tails, power_tail(t, 0.5), rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("t", [heisenberg(3, 2), vilenkin([2, 3, 4, 5]), padic(5, 3, dim=2)], ids=lambda t: t.describe())
def test_shaped_tails_other_towers(t):
    f = generate_function(t, {"family": "random_fourier", "params": {"alpha": 0.25}, "seed": 1})
    assert np.allclose(tail_table(forward(f)), power_tail(t, 0.25), rtol=1e-10, atol=1e-15)
    g = generate_function(t, {"family": "dini", "params": {"alpha": 0.5, "nu": 1}, "seed": 1})
    assert np.allclose(tail_table(forward(g)), dini_tail(t, 0.5, 1), rtol=1e-10, atol=1e-15)


def test_dini_tail_envelope():
    t = padic(3, 8)
    tail = dini_tail(t, 0.5, 1)
    assert np.all(np.diff(tail) <= 0)
    x = np.asarray(t.indices, dtype=float)
    profile = x**-1 * np.log(x) ** 2
    assert np.allclose(tail[2:-1], profile[2:-1])
    assert tail[1] == pytest.approx(profile[2])


def test_determinism_and_seeds():
    t = heisenberg(3, 1)
    spec = {"family": "random_fourier", "params": {"alpha": 0.5}, "seed": 3}
    assert np.array_equal(generate_function(t, spec).values, generate_function(t, spec).values)
    other = generate_function(t, {**spec, "seed": 4})
    assert not np.array_equal(generate_function(t, spec).values, other.values)
    for fam in ("random", "random_fourier", "dini"):
        with pytest.raises(ValueError):
            generate_function(t, {"family": fam, "params": {"alpha": 0.5}})


def test_unknown_family_and_values():
    t = padic(3, 2)
    with pytest.raises(ValueError):
        generate_function(t, {"family": "gaussian"})
    f = generate_function(t, {"family": "values", "params": {"values": list(range(9))}})
    assert f.values[4] == 4
    with pytest.raises(TowerError):
        generate_function(t, {"family": "values", "params": {"values": [1, 2]}})
