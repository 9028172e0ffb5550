import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from statsmodels.nonparametric.smoothers_lowess import lowess as sm_lowess

from conftest import write_long_csv
from tailcount import (
    DailyPanel,
    SeasonalProfile,
    deseasonalize,
    load_panel,
    seasonal_profile,
    write_panel,
    yearly_maxima,
)
from tailcount.errors import (
    LengthMismatchError,
    MissingCellError,
    NegativeValueError,
    NonNumericError,
    RaggedYearError,
)


def grid_rows(S, R, T1, T2, value=0.5):
    return [(r, y, d, s, value) for r, y, d, s in itertools.product(
        range(1, R + 1), range(1, T1 + 1), range(1, T2 + 1), range(1, S + 1))]


class TestLoadPanel:
    def test_minimal_grid(self, tmp_path):
        path = tmp_path / "p.csv"
        write_long_csv(path, grid_rows(2, 1, 1, 3))
        panel = load_panel(path)
        assert panel.dims == (2, 1, 1, 3)
        assert np.all(panel.values == 0.5)

    def test_missing_cell(self, tmp_path):
        rows = [r for r in grid_rows(2, 1, 1, 3) if not (r[3] == 2 and r[2] == 3)]
        path = tmp_path / "p.csv"
        write_long_csv(path, rows)
        with pytest.raises(MissingCellError):
            load_panel(path)

    def test_duplicate_cell(self, tmp_path):
        rows = grid_rows(2, 1, 1, 3)
        path = tmp_path / "p.csv"
        write_long_csv(path, rows + rows[:1])
        with pytest.raises(MissingCellError):
            load_panel(path)

    def test_non_numeric(self, tmp_path):
        rows = grid_rows(2, 1, 1, 3)
        rows[4] = rows[4][:4] + ("abc",)
        path = tmp_path / "p.csv"
        write_long_csv(path, rows)
        with pytest.raises(NonNumericError):
            load_panel(path)

    def test_negative(self, tmp_path):
        rows = grid_rows(2, 1, 1, 3)
        rows[2] = rows[2][:4] + (-0.1,)
        path = tmp_path / "p.csv"
        write_long_csv(path, rows)
        with pytest.raises(NegativeValueError):
            load_panel(path)

    def test_ragged_year(self, tmp_path):
        rows = grid_rows(1, 1, 2, 3) + [(1, 2, 4, 1, 0.5)]
        path = tmp_path / "p.csv"
        write_long_csv(path, rows)
        with pytest.raises(RaggedYearError):
            load_panel(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("run,year,site,day,value\n1,1,1,1,0.5\n")
        with pytest.raises(MissingCellError):
            load_panel(path)

    def test_values_land_in_right_cells(self, tmp_path):
        rows = [(r, y, d, s, 1000 * s + 100 * r + 10 * y + d) for r, y, d, s in itertools.product(
            range(1, 3), range(1, 3), range(1, 4), range(1, 4))]
        rows = rows[::-1]
        path = tmp_path / "p.csv"
        write_long_csv(path, rows)
        p = load_panel(path)
        assert p.values[2, 0, 1, 2] == 3000 + 100 + 20 + 3

    @pytest.mark.parametrize("layout", ["long", "wide"])
    def test_round_trip_bit_exact(self, tmp_path, rng, layout):
        values = rng.pareto(2.0, size=(3, 2, 3, 5)) * 10.0 ** rng.integers(-8, 8, size=(3, 2, 3, 5))
        values[0, 0, 0, 0] = 0.0
        p = DailyPanel(values)
        path = tmp_path / f"p_{layout}.csv"
        write_panel(p, path, layout)
        q = load_panel(path, layout)
        assert q.dims == p.dims
        assert np.array_equal(q.values, p.values)

    def test_competition_dims(self, tmp_path, rng):
        values = rng.random((25, 4, 165, 365)).round(3)
        path = tmp_path / "competition.csv"
        write_panel(DailyPanel(values), path, "wide")
        p = load_panel(path, "wide")
        assert p.dims == (25, 4, 165, 365)
        assert p.values.size == 6_022_500
        assert np.array_equal(p.values, values)


class TestDailyPanel:
    def test_immutable(self, small_panel):
        with pytest.raises(ValueError):
            small_panel.values[0, 0, 0, 0] = 1.0

    def test_rejects_negative_and_nan(self):
        with pytest.raises(NegativeValueError):
            DailyPanel(-np.ones((1, 1, 1, 2)))
        with pytest.raises(NonNumericError):
            DailyPanel(np.full((1, 1, 1, 2), np.nan))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            DailyPanel(np.ones((2, 2, 2)))


class TestYearlyMaxima:
    def test_single_year(self):
        p = DailyPanel(np.array([0.1, 0.9, 0.3]).reshape(1, 1, 1, 3))
        assert yearly_maxima(p)[0, 0, 0] == 0.9

    def test_constant(self):
        p = DailyPanel(np.full((2, 2, 3, 4), 2.5))
        assert np.all(yearly_maxima(p) == 2.5)

    def test_matches_scan(self, rng):
        values = rng.random((3, 2, 4, 10))
        out = yearly_maxima(DailyPanel(values))
        for i, r, t in itertools.product(range(3), range(2), range(4)):
            best = values[i, r, t, 0]
            for v in values[i, r, t, 1:]:
                best = v if v > best else best
            assert out[i, r, t] == best

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (2, 2, 3, 6), elements=st.floats(0, 1e6)), st.randoms())
    def test_day_permutation_invariance(self, values, random):
        perm = list(range(6))
        random.shuffle(perm)
        a = yearly_maxima(DailyPanel(values))
        b = yearly_maxima(DailyPanel(values[..., perm]))
        assert np.array_equal(a, b)


class TestSeasonalProfile:
    def test_constant(self):
        p = DailyPanel(np.full((3, 2, 4, 60), 1.25))
        prof = seasonal_profile(p, 0.2)
        assert np.allclose(prof.day_mean, 1.25)
        assert np.allclose(prof.smoothed, 1.25, atol=1e-12)

    def test_noiseless_sine_matches_lowess_oracle(self):
        T2 = 365
        day = np.arange(1, T2 + 1)
        signal = 2.0 + np.sin(2 * np.pi * day / T2)
        p = DailyPanel(np.broadcast_to(signal, (2, 2, 3, T2)))
        prof = seasonal_profile(p, 0.1)
        oracle = sm_lowess(signal, day.astype(float), frac=0.1, it=3, return_sorted=False)
        interior = slice(20, T2 - 20)
        assert np.max(np.abs(prof.smoothed[interior] - oracle[interior])) < 1e-6
        # Sanity: the smooth also tracks the signal itself closely.
        assert np.max(np.abs(prof.smoothed[interior] - signal[interior])) < 1e-2

    def test_pooled_is_mean_of_run_means(self, rng):
        a = rng.random((2, 1, 3, 20))
        b = rng.random((2, 1, 3, 20))
        p = DailyPanel(np.concatenate([a, b], axis=1))
        pooled = seasonal_profile(p, 0.3)
        per_run = seasonal_profile(p, 0.3, pooled_over="per_run")
        assert per_run.day_mean.shape == (2, 20)
        assert np.allclose(pooled.day_mean, (a.mean(axis=(0, 1, 2)) + b.mean(axis=(0, 1, 2))) / 2)
        assert np.allclose(pooled.day_mean, per_run.day_mean.mean(axis=0))


class TestDeseasonalize:
    def test_constant(self):
        p = DailyPanel(np.full((2, 2, 3, 30), 0.7))
        out = deseasonalize(p, seasonal_profile(p, 0.2))
        assert np.allclose(out, 0.0, atol=1e-12)

    def test_profile_replicated(self, rng):
        prof_vals = rng.random(15)
        prof = SeasonalProfile(day_mean=prof_vals, smoothed=prof_vals)
        p = DailyPanel(np.broadcast_to(prof_vals, (2, 3, 4, 15)))
        assert np.all(deseasonalize(p, prof) == 0.0)

    def test_round_trip(self, small_panel):
        prof = seasonal_profile(small_panel, 0.5)
        out = deseasonalize(small_panel, prof)
        assert np.max(np.abs(out + prof.smoothed - small_panel.values)) < 1e-12

    def test_per_run_profile(self, small_panel):
        prof = seasonal_profile(small_panel, 0.5, pooled_over="per_run")
        out = deseasonalize(small_panel, prof)
        restored = out + prof.smoothed[None, :, None, :]
        assert np.max(np.abs(restored - small_panel.values)) < 1e-12

    def test_length_mismatch(self, small_panel):
        prof = SeasonalProfile(day_mean=np.zeros(5), smoothed=np.zeros(5))
        with pytest.raises(LengthMismatchError):
            deseasonalize(small_panel, prof)
