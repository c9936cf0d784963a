import os

import pytest

from freeconv.cli import main
from freeconv.series import parse_series


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestCommutator:
    def test_route_all_agrees(self, capsys):
        code, out = run(capsys, "commutator", "--a", "semicircular:2",
                        "--b", "semicircular:2", "--order", "8", "--route", "all")
        assert code == 0
        assert "route agreement: AGREE" in out
        # cumulants 0,2,0,2,...
        lines = [ln.split() for ln in out.splitlines() if ln and ln[0].isdigit()]
        assert [ln[2] for ln in lines] == ["0", "2"] * 4

    def test_bernoulli_reduction_row(self, capsys):
        code, out = run(capsys, "commutator", "--a", "semicircular:2",
                        "--b", "atomic:(1/2@-1,1/2@1)", "--order", "8")
        assert code == 0
        rows = {int(ln.split()[0]): ln.split()[1]
                for ln in out.splitlines() if ln and ln[0].isdigit()}
        # moments of mu plus its negative: variance 2, fourth moment 8
        assert rows[2] == "2" and rows[4] == "8"

    def test_default_orders(self, capsys):
        code, out = run(capsys, "commutator", "--a", "projection:1/3",
                        "--b", "projection:1/2")
        assert code == 0 and " 12 " not in out  # table rows go to 12
        assert any(ln.startswith("12") for ln in out.splitlines())
        code, out = run(capsys, "commutator", "--a", "projection:1/3",
                        "--b", "projection:1/2", "--route", "all")
        assert code == 0
        assert any(ln.startswith("8") for ln in out.splitlines())
        assert not any(ln.startswith("9") for ln in out.splitlines())

    def test_deterministic(self, capsys):
        args = ("commutator", "--a", "arcsine:1", "--b", "poisson:1,1",
                "--order", "6", "--route", "all")
        _, first = run(capsys, *args)
        _, second = run(capsys, *args)
        assert first == second

    def test_decimal_rendering(self, capsys):
        code, out = run(capsys, "commutator", "--a", "projection:1/2",
                        "--b", "projection:1/2", "--order", "4", "--decimal", "3")
        assert code == 0
        assert "0.125" in out  # variance 2 * (1/4)^2

    def test_oracle_order_guard(self, capsys):
        code = main(["commutator", "--a", "semicircular:2", "--b",
                     "semicircular:2", "--order", "10", "--route", "oracle"])
        assert code == 2


class TestTables:
    def test_moments(self, capsys):
        code, out = run(capsys, "moments", "--law", "poisson:1,1", "--order", "5")
        assert code == 0
        assert [ln.split()[1] for ln in out.splitlines() if ln and ln[0].isdigit()] \
            == ["1", "2", "5", "14", "42"]

    def test_cumulants_dump_roundtrip(self, capsys):
        code, out = run(capsys, "cumulants", "--law", "semicircular:2",
                        "--order", "6", "--dump-series")
        assert code == 0
        body = "\n".join(ln for ln in out.splitlines() if not ln.startswith("#"))
        series = parse_series(body)
        assert series.coef(2) == 1 and series.coef(4) == 0

    def test_table1_match(self, capsys):
        for law in ("semicircular:2", "poisson:1,1", "arcsine:3/2",
                    "bernoulli:1/3,-2,1", "projection:1/4"):
            code, out = run(capsys, "table1", "--law", law)
            assert code == 0, law
            assert "verdict: MATCH" in out


class TestExprIterate:
    def test_expr_agreement(self, capsys):
        code, out = run(capsys, "expr", "--tree", "[[1,2],[3,4]]", "--args",
                        "semicircular:2;projection:1/3;arcsine:1;bernoulli:1/2,-1,1",
                        "--order", "8")
        assert code == 0
        assert "route agreement: AGREE" in out

    def test_expr_arity_error(self, capsys):
        code = main(["expr", "--tree", "[1,2]", "--args", "semicircular:2"])
        assert code == 2

    def test_iterate_variance_column(self, capsys):
        code, out = run(capsys, "iterate", "--mu", "bernoulli:1/2,-1,1",
                        "--steps", "4", "--order", "8")
        assert code == 0
        rows = [ln.split() for ln in out.splitlines() if ln and ln[0].isdigit()]
        assert [r[1] for r in rows] == [r[2] for r in rows] == ["1", "2", "4", "8"]


class TestDensity:
    def test_csv_shape(self, capsys):
        code, out = run(capsys, "density", "--example", "semi_proj:1/4",
                        "--grid=-1:1:5")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t,density"
        assert lines[1].startswith("# atom 0 0.5")
        data = [ln for ln in lines if not ln.startswith("#") and ln != "t,density"]
        assert len(data) == 5

    def test_stieltjes_method(self, capsys):
        code, out = run(capsys, "density", "--example", "semi_semi",
                        "--grid=0:0:1", "--method", "stieltjes")
        assert code == 0
        value = float(out.splitlines()[-1].split(",")[1])
        assert abs(value - 1 / 3.141592653589793) < 1e-6

    def test_unknown_example(self, capsys):
        assert main(["density", "--example", "cauchy:1"]) == 2


class TestCheck:
    def test_single_suite(self, capsys):
        code, out = run(capsys, "check", "--suite", "nco-cancellation")
        assert code == 0
        assert "[PASS] nco-cancellation" in out
        assert "ALL PASS" in out

    def test_unknown_suite(self, capsys):
        assert main(["check", "--suite", "everything"]) == 2

    def test_thread_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("FREECONV_THREADS", "2")
        code, out = run(capsys, "check", "--suite", "star-inverse")
        assert code == 0 and "ALL PASS" in out

    def test_instance_mode(self, capsys):
        code, out = run(capsys, "check", "--partition", "{{1,2},{3,4,5}}",
                        "--eps", "11221")
        assert code == 0
        assert "{{1},{2,3,5},{4}}" in out
        code, out = run(capsys, "check", "--partition", "{{1,2},{3,4}}")
        assert code == 0
        assert "{{1},{2,4},{3}}" in out

    def test_instance_rejects_crossing(self, capsys):
        assert main(["check", "--partition", "{{1,3},{2,4}}"]) == 2

    def test_check_requires_something(self, capsys):
        assert main(["check"]) == 2


class TestErrors:
    def test_bad_law(self, capsys):
        assert main(["moments", "--law", "gamma:1", "--order", "4"]) == 2

    def test_anticommutator_needs_even(self, capsys):
        assert main(["anticommutator", "--a", "projection:1/2",
                     "--b", "projection:1/2"]) == 2

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["commutator", "--a", "semicircular:2"])
        assert exc.value.code == 2
