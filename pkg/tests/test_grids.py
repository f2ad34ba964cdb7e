"""Grid containers, immutability, and deterministic serialization."""

import json

import numpy as np
import pytest

from kdv5half.grids import (
    GridFunction,
    GridMismatchError,
    SpaceTimeField,
    TimeSeries,
    UniformGrid,
    canonical_json,
    field_from_json,
    field_to_json,
    grid_function_from_csv,
    grid_function_from_json,
    grid_function_to_csv,
    grid_function_to_json,
)


def small_grid():
    return UniformGrid(origin=-1.0, step=0.25, count=8)


class TestUniformGrid:
    def test_nodes_and_length(self):
        g = small_grid()
        assert g.length == pytest.approx(2.0)
        assert g.nodes[0] == -1.0
        assert g.nodes[-1] == pytest.approx(-1.0 + 7 * 0.25)

    def test_frequency_lattice(self):
        g = small_grid()
        assert g.freq_step == pytest.approx(2.0 * np.pi / g.length)
        assert g.nyquist == pytest.approx(np.pi / g.step)
        assert set(np.round(g.frequencies / g.freq_step).astype(int)) == {
            0, 1, 2, 3, -4, -3, -2, -1,
        }

    def test_index_of_hits_nodes(self):
        g = small_grid()
        for k in range(g.count):
            assert g.index_of(g.nodes[k]) == k

    def test_index_of_rejects_off_node(self):
        with pytest.raises(ValueError, match="does not lie on a grid node"):
            small_grid().index_of(0.1)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            UniformGrid(origin=0.0, step=0.0, count=8)
        with pytest.raises(ValueError):
            UniformGrid(origin=0.0, step=1.0, count=1)


class TestGridFunction:
    def test_values_are_frozen(self):
        f = GridFunction(small_grid(), np.ones(8, dtype=complex))
        with pytest.raises(ValueError):
            f.values[0] = 5.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            GridFunction(small_grid(), np.ones(7, dtype=complex))

    def test_arithmetic(self):
        g = small_grid()
        f = GridFunction.from_callable(g, lambda x: x)
        h = GridFunction.from_callable(g, lambda x: 2 * x)
        assert np.allclose((f + h).values, 3 * g.nodes)
        assert np.allclose((h - f).values, g.nodes)
        assert np.allclose((f * 2.0).values, 2 * g.nodes)

    def test_cross_grid_arithmetic_rejected(self):
        f = GridFunction(small_grid(), np.zeros(8, dtype=complex))
        other = GridFunction(
            UniformGrid(origin=0.0, step=0.25, count=8), np.zeros(8, dtype=complex)
        )
        with pytest.raises(GridMismatchError):
            _ = f + other


class TestSpaceTimeField:
    def test_slices(self):
        xg, tg = small_grid(), UniformGrid(origin=0.0, step=0.5, count=4)
        vals = np.arange(32, dtype=complex).reshape(8, 4)
        u = SpaceTimeField(xg, tg, vals)
        assert isinstance(u.time_slice(1), GridFunction)
        assert np.allclose(u.time_slice(1).values, vals[:, 1])
        assert isinstance(u.space_slice(2), TimeSeries)
        assert np.allclose(u.space_slice(2).values, vals[2, :])


class TestCanonicalJson:
    def test_deterministic_and_parseable(self):
        payload = {"b": 1.0 / 3.0, "a": [1e-300, 2.5, 0.1], "c": {"x": True, "y": None}}
        first = canonical_json(payload, indent=2)
        second = canonical_json(json.loads(first), indent=2)
        assert first == second
        assert json.loads(first)["b"] == pytest.approx(1.0 / 3.0, rel=0, abs=0)

    def test_17_digit_round_trip(self):
        x = 0.1 + 0.2
        text = canonical_json({"v": x})
        assert json.loads(text)["v"] == x

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            canonical_json({"v": float("nan")})


class TestSerialization:
    def test_grid_function_csv_round_trip(self):
        g = small_grid()
        f = GridFunction(g, (np.sin(g.nodes) + 1j * np.cos(g.nodes)).astype(complex))
        back = grid_function_from_csv(grid_function_to_csv(f))
        assert back.grid == g
        assert np.array_equal(back.values, f.values)

    def test_grid_function_json_round_trip(self):
        g = small_grid()
        f = GridFunction(g, np.exp(1j * g.nodes))
        back = grid_function_from_json(grid_function_to_json(f))
        assert back.grid == g
        assert np.array_equal(back.values, f.values)

    def test_field_json_round_trip(self):
        xg, tg = small_grid(), UniformGrid(origin=0.0, step=0.5, count=4)
        u = SpaceTimeField(xg, tg, np.random.default_rng(0).standard_normal((8, 4)) + 0j)
        back = field_from_json(field_to_json(u))
        assert back.xgrid == xg and back.tgrid == tg
        assert np.array_equal(back.values, u.values)
