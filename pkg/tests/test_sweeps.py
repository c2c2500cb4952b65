"""Sweep drivers, report math and the CSV schema."""

import pytest

from agecast.sweeps import (
    CSV_COLUMNS,
    SweepSpec,
    read_report_csv,
    sweep_k,
    sweep_shift,
    write_report_csv,
)


def k_spec(**overrides):
    base = dict(
        variable="k",
        values=(1, 2, 5),
        rate=1.0,
        shift=0.0,
        k=1,
        num_intervals=4000,
        replications=2,
        seed=11,
        tolerance=0.05,
    )
    base.update(overrides)
    return SweepSpec(**base)


@pytest.fixture(scope="module")
def exp_report():
    return sweep_k(k_spec())


@pytest.fixture(scope="module")
def sexp_report():
    return sweep_k(k_spec(shift=1.0, seed=12))


@pytest.fixture(scope="module")
def shift_report():
    return sweep_shift(
        k_spec(
            variable="c",
            values=(0.0, 0.5, 1.0, 2.0),
            rate=2.0,
            k=5,
            seed=13,
        )
    )


class TestSweepSpec:
    @pytest.mark.parametrize(
        "overrides,message",
        [
            (dict(variable="rho"), "variable"),
            (dict(values=()), "non-empty"),
            (dict(values=(2, 1)), "increasing"),
            (dict(values=(1, 1)), "increasing"),
            (dict(values=(1, 2.5)), "positive integers"),
            (dict(variable="c", values=(-0.5, 1.0)), "nonnegative"),
            (dict(variable="c", values=(0.0, 1.0), k=0), "fixed k"),
            (dict(rate=0.0), "rate"),
            (dict(shift=-1.0), "shift"),
            (dict(tolerance=-0.1), "tolerance"),
        ],
    )
    def test_rejects_bad_specs(self, overrides, message):
        with pytest.raises(ValueError, match=message):
            k_spec(**overrides)

    def test_wrong_variable_routing(self):
        with pytest.raises(ValueError, match="sweep_k"):
            sweep_k(k_spec(variable="c", values=(0.0, 1.0)))
        with pytest.raises(ValueError, match="sweep_shift"):
            sweep_shift(k_spec())


class TestSweepK:
    def test_row_shape(self, exp_report):
        assert exp_report.variable == "k"
        assert [row.sweep_value for row in exp_report.rows] == [1.0, 2.0, 5.0]

    def test_exponential_classes_age_alike(self, exp_report):
        for row in exp_report.rows:
            assert row.delta_e_theory == pytest.approx(row.delta_p_theory, abs=1e-10)
            assert row.lower_bound is None

    def test_relerr_recomputes(self, exp_report):
        for row in exp_report.rows:
            assert row.relerr_p == pytest.approx(
                abs(row.delta_p_sim - row.delta_p_theory) / row.delta_p_theory
            )
            assert row.relerr_e == pytest.approx(
                abs(row.delta_e_sim - row.delta_e_theory) / row.delta_e_theory
            )

    def test_sim_tracks_theory(self, exp_report):
        assert exp_report.max_relerr() < 0.05

    def test_shifted_rows_carry_bound(self, sexp_report):
        for row in sexp_report.rows:
            assert row.lower_bound is not None
            assert row.lower_bound < row.delta_p_theory

    def test_gap_is_shift_over_k(self, sexp_report):
        # for the shifted exponential the class gap collapses to c/k
        gaps = sexp_report.gaps()
        for gap, k in zip(gaps, (1, 2, 5)):
            assert gap == pytest.approx(1.0 / k, rel=1e-9)


class TestSweepShift:
    def test_zero_shift_closes_the_gap(self, shift_report):
        first = shift_report.rows[0]
        assert first.sweep_value == 0.0
        assert first.delta_e_theory == pytest.approx(first.delta_p_theory, abs=1e-10)

    def test_gap_grows_linearly_with_shift(self, shift_report):
        gaps = shift_report.gaps()
        for gap, c in zip(gaps, (0.0, 0.5, 1.0, 2.0)):
            assert gap == pytest.approx(c / 5, abs=1e-9)
        assert all(b > a for a, b in zip(gaps, gaps[1:]))

    def test_known_point(self, shift_report):
        row = shift_report.rows[2]
        assert row.sweep_value == 1.0
        assert row.delta_p_theory == pytest.approx(2.6562581063553825, rel=1e-12)

    def test_bound_present_on_every_row(self, shift_report):
        assert all(row.lower_bound is not None for row in shift_report.rows)


class TestReportCsv:
    def test_round_trip(self, tmp_path, exp_report, sexp_report):
        for name, report in (("exp.csv", exp_report), ("sexp.csv", sexp_report)):
            path = tmp_path / name
            write_report_csv(report, path)
            again = read_report_csv(path)
            assert again.rows == report.rows
            rewrite = tmp_path / ("re_" + name)
            write_report_csv(again, rewrite)
            assert rewrite.read_bytes() == path.read_bytes()

    def test_header(self, tmp_path, exp_report):
        path = tmp_path / "report.csv"
        write_report_csv(exp_report, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("alpha,beta\n1,2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            read_report_csv(path)

    def test_rerun_is_byte_identical(self, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        sweep_k(k_spec(values=(1, 2), num_intervals=2000, out_path=str(first)))
        sweep_k(k_spec(values=(1, 2), num_intervals=2000, out_path=str(second)))
        assert first.read_bytes() == second.read_bytes()

    def test_empty_bound_cells_for_plain_exponential(self, tmp_path, exp_report):
        path = tmp_path / "exp.csv"
        write_report_csv(exp_report, path)
        body = path.read_text(encoding="utf-8").splitlines()[1:]
        bound_col = CSV_COLUMNS.index("lower_bound")
        assert all(line.split(",")[bound_col] == "" for line in body)


class TestTolerance:
    def test_zero_tolerance_never_passes(self, exp_report):
        strict = type(exp_report)(
            variable=exp_report.variable, rows=exp_report.rows, tolerance=0.0
        )
        assert not strict.within_tolerance()
        assert strict.max_relerr() > 0.0

    def test_generous_tolerance_passes(self, exp_report):
        assert exp_report.within_tolerance()
