import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from voaforge.cli import StateSyntaxError, format_state, main, parse_state
from voaforge.linalg import Q
from voaforge.voa import construct_voa

HEIS = construct_voa("heisenberg")
VIR = construct_voa("virasoro", Q(1, 2))


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0
    return json.loads(text)


def test_parse_examples():
    assert parse_state("a(-1)|0>", HEIS) == HEIS.generator()
    assert parse_state("1/2 a(-1)^2|0>", HEIS) == HEIS.omega()
    v = parse_state("L(-2)L(-2)|0> - 3/10 L(-4)|0>", VIR)
    assert v.weight == 4 and len(v.terms) == 2
    assert format_state(v) == "L(-2)^2|0> - 3/10 L(-4)|0>"
    # modes apply right to left and positive modes evaluate
    assert parse_state("L(2)L(-2)|0>", VIR) == Q(1, 4) * VIR.vacuum()
    assert parse_state("L(-1)L(-2)|0>", VIR) == VIR.state((3,))
    assert parse_state("a(1)|l>", HEIS.fock(Q(2))).is_zero()


@pytest.mark.parametrize("text,pos", [("L(-2)L(-2|0>", 9), ("L(-2)|0> +", 10), ("1/0 L(-2)|0>", 2)])
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(StateSyntaxError) as err:
        parse_state(text, VIR)
    assert err.value.pos == pos
    assert f"position {pos}" in str(err.value)


def test_generator_must_match_the_realization():
    with pytest.raises(StateSyntaxError):
        parse_state("a(-1)|0>", VIR)
    with pytest.raises(StateSyntaxError):
        parse_state("L(-2)|l>", VIR)


modes = st.lists(st.tuples(st.integers(-4, -1), st.integers(1, 2)), min_size=1, max_size=3)
terms = st.lists(st.tuples(st.fractions(min_value=-5, max_value=5, max_denominator=6), modes),
                 min_size=1, max_size=4)


def _render(ts, gen, ket):
    out = []
    for c, ms in ts:
        ops = "".join(f"{gen}({m})" + (f"^{k}" if k > 1 else "") for m, k in ms)
        out.append(f"+ {c.numerator}/{c.denominator} {ops}{ket}")
    return " ".join(out)[2:]


@settings(max_examples=60, deadline=None)
@given(terms, st.sampled_from(["heis", "vir", "fock", "verma"]))
def test_print_parse_round_trip(ts, kind):
    M = {"heis": HEIS, "vir": VIR, "fock": HEIS.fock(Q(1, 3)), "verma": VIR.verma(Q(2, 5))}[kind]
    gen = "a" if kind in ("heis", "fock") else "L"
    ket = {"heis": "|0>", "vir": "|0>", "fock": "|l>", "verma": "|h>"}[kind]
    text = _render(ts, gen, ket).replace("+ -", "- ")
    v = parse_state(text, M)
    printed = format_state(v)
    assert parse_state(printed, M) == v
    assert format_state(parse_state(printed, M)) == printed


def test_parse_command():
    doc = run_json("parse", "--voa", "virasoro", "--c", "1/2", "L(-2)L(-2)|0> - 3/10 L(-4)|0>")
    assert doc["result"]["state"] == "L(-2)^2|0> - 3/10 L(-4)|0>"
    assert set(doc) == {"config", "result", "warnings", "version"}


def test_an_table_documents():
    doc = run_json("an-table", "--voa", "heisenberg", "--n", "0", "--cutoff", "4")
    res = doc["result"]
    assert res["filtration_dims"] == [1, 2, 3, 4, 5] and res["identity_ok"]
    vir = run_json("an-table", "--voa", "virasoro", "--c", "1/2", "--cutoff", "6")
    assert vir["result"]["omega_powers_rank"] == 4
    assert vir["config"]["c"] == "1/2" and vir["config"]["n"] == 0


def test_json_is_deterministic():
    argv = ["an-table", "--voa", "virasoro", "--c", "1/2", "--n", "1", "--cutoff", "6"]
    assert run(*argv) == run(*argv)


def test_csv_output():
    code, text = run("an-table", "--voa", "heisenberg", "--cutoff", "3", "--format", "csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert len(lines) > 2 and "." not in "".join(lines[1:]).replace("|0>", "")


def test_rationals_must_be_exact(capsys):
    with pytest.raises(SystemExit) as err:
        main(["an-table", "--voa", "virasoro", "--c", "pi"])
    assert err.value.code == 2
    assert "not an exact rational" in capsys.readouterr().err


def test_omega_and_induce_commands():
    om = run_json("omega", "--voa", "virasoro", "--c", "2/3", "--h", "5/7", "--levels", "4")
    assert om["result"]["dims"] == [1, 0, 0, 0, 0]
    zero = run_json("induce", "--voa", "virasoro", "--c", "1/2", "--h", "1/3", "--levels", "3", "--udim", "0")
    assert zero["result"]["dims"] == [0, 0, 0, 0]
    ind = run_json("induce", "--voa", "virasoro", "--c", "1/3", "--h", "2/7", "--levels", "3", "--oracle")
    assert ind["result"]["dims"] == [1, 1, 2, 3] and ind["result"]["oracle_equal"]


def test_degenerate_point_is_flagged():
    doc = run_json("induce", "--voa", "virasoro", "--c", "7/10", "--h", "3/80", "--levels", "4", "--oracle")
    res = doc["result"]
    assert res["dims"] == [1, 1, 2, 3, 4] and res["oracle_equal"] is False
    assert res["singular_levels"] == [4] and doc["warnings"]


def test_verify_small_cutoff_warns_but_passes():
    code, text = run("verify", "--suite", "anv", "--cutoff", "2")
    assert code == 0 and "warning:" in text and "inconclusive" in text


def test_verify_formal_passes():
    code, text = run("verify", "--suite", "formal")
    assert code == 0 and text.strip().endswith("exit status 0")


def test_tampered_theta_is_caught():
    code, text = run("verify", "--suite", "regrep", "--tamper-theta")
    assert code != 0
    assert "theta involution" in text.splitlines()[-1]
