import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from precipmix.errors import ParseError, PreconditionError
from precipmix.ingest import (
    DailySeries,
    IngestConfig,
    day_states,
    extract_spells,
    markov_order_test,
    parse_csv,
)


class TestParse:
    def test_basic(self):
        s = parse_csv(b"2000-01-01,0.0\n2000-01-02,5.2\n")
        assert len(s) == 2
        assert s.depth.tolist() == [0.0, 5.2]

    def test_header_and_empty_field(self):
        s = parse_csv(io.StringIO("date,precip_mm\n2000-01-01,1\n2000-01-02,2\n2000-01-03,\n"))
        assert s.missing.tolist() == [False, False, True]

    def test_sentinel(self):
        s = parse_csv(b"2000-01-01,1\n2000-01-02,-999\n", IngestConfig(missing_sentinel=-999))
        assert s.missing.tolist() == [False, True]
        with pytest.raises(ParseError):
            parse_csv(b"2000-01-01,1\n2000-01-02,-999\n")

    def test_gaps_become_missing(self):
        s = parse_csv(b"2000-01-01,1\n2000-01-04,2\n")
        assert len(s) == 4 and s.missing.tolist() == [False, True, True, False]
        with pytest.raises(ParseError):
            parse_csv(b"2000-01-01,1\n2000-01-04,2\n", IngestConfig(fill_gaps=False))

    def test_errors_carry_every_line(self):
        text = b"date,precip\n2000-01-01,1\n2000-01-02,abc\n2000-01-02,1\nnot-a-date,3\n2000-01-05,-2\n"
        with pytest.raises(ParseError) as info:
            parse_csv(text)
        lines = [line for line, _ in info.value.problems]
        assert lines == [3, 5, 6]

    def test_duplicate_date_rejected(self):
        with pytest.raises(ParseError) as info:
            parse_csv(b"2000-01-01,1\n2000-01-02,1\n2000-01-02,0\n")
        assert info.value.problems[0][0] == 3

    def test_path_and_empty(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("2001-03-01,0\n")
        assert len(parse_csv(str(path))) == 1
        assert len(parse_csv(b"")) == 0

    def test_series_validation(self):
        with pytest.raises(ValueError):
            DailySeries(np.array(["2000-01-01", "2000-01-03"], dtype="datetime64[D]"), [1.0, 2.0], [False, False])


class TestSpells:
    def test_toy_series(self):
        s = extract_spells(DailySeries.from_depths([0, 1, 2, 0, 3, 0]))
        assert s.wet_durations.tolist() == [2, 1]
        assert s.wet_totals.tolist() == [3.0, 3.0]
        assert s.dry_durations.tolist() == [1]
        assert s.discarded_spells == 2

    def test_boundary_runs_dropped(self):
        s = extract_spells(DailySeries.from_depths([1, 0, 1]))
        assert s.wet_durations.size == 0 and s.discarded_spells == 2
        assert s.dry_durations.tolist() == [1]

    def test_all_dry(self):
        s = extract_spells(DailySeries.from_depths([0.0] * 10))
        assert s.wet_durations.size == 0 and s.dry_durations.size == 0
        assert s.discarded_spells == 1 and s.discarded_days == 10

    def test_missing_day_breaks_spell(self):
        s = extract_spells(DailySeries.from_depths([0, 2, None, 2, 0, 1, 1, 0]))
        assert s.wet_durations.tolist() == [2]
        assert s.missing_days == 1

    def test_threshold(self):
        s = extract_spells(DailySeries.from_depths([0, 0.1, 0.5, 0.05, 2, 0]), wet_threshold=0.1)
        # 0.1 is not above the threshold
        assert s.wet_durations.tolist() == [1, 1]
        assert s.wet_day_depths.tolist() == [0.5, 2.0]
        with pytest.raises(ValueError):
            extract_spells(DailySeries.from_depths([0]), wet_threshold=-1)

    @given(st.lists(st.one_of(st.none(), st.just(0.0), st.floats(0.0, 20.0)), max_size=60))
    @settings(max_examples=200, deadline=None)
    def test_conservation_and_alternation(self, depths):
        s = extract_spells(DailySeries.from_depths(depths))
        kept = int(s.wet_durations.sum() + s.dry_durations.sum())
        assert kept + s.discarded_days + s.missing_days == len(depths)
        assert np.all(s.wet_durations >= 1) and np.all(s.dry_durations >= 1)
        assert np.all(s.wet_totals > 0)
        assert s.wet_day_depths.size == sum(1 for v in depths if v is not None and v > 0)

    def test_serialisation(self):
        s = extract_spells(DailySeries.from_depths([0, 1, 0]))
        assert '"wet_durations": [\n    1\n  ]' in s.to_json()

    def test_states(self):
        st_ = day_states(DailySeries.from_depths([0, 1, None]))
        assert st_.tolist() == [0, 1, 2]


class TestMarkov:
    def test_short_series(self):
        with pytest.raises(PreconditionError):
            markov_order_test(DailySeries.from_depths([1.0, 0.0] * 40))

    def test_alternation(self):
        rep = markov_order_test(DailySeries.from_depths([2.0, 0.0] * 500), max_order=2)
        assert rep.rows[0]["p_value"] < 1e-6
        assert rep.rows[0]["df"] == 1 and rep.rows[1]["df"] == 2
        # alternation is exactly first order: adding a second lag explains nothing
        assert rep.rows[1]["statistic"] == pytest.approx(0.0, abs=1e-9)

    def test_second_order_chain(self):
        # x_t = x_{t-2} flipped with small noise: order-1 model is wrong, order-2 fits
        rng = np.random.default_rng(0)
        x = list(rng.integers(0, 2, 2))
        for _ in range(5000):
            x.append(x[-2] if rng.random() < 0.9 else 1 - x[-2])
        rep = markov_order_test(DailySeries.from_depths([float(v) for v in x]), max_order=3)
        assert rep.rows[1]["p_value"] < 1e-6
        assert rep.rows[2]["p_value"] > 1e-4

    def test_missing_days_split_segments(self):
        depths = [2.0, 0.0] * 100
        depths[50] = None
        rep = markov_order_test(DailySeries.from_depths(depths), max_order=1)
        assert rep.rows[0]["transitions"] == 199 - 2
        assert rep.n_days == 199
