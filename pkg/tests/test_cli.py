import json
import subprocess
import sys
from itertools import combinations

import pytest

from skewminor import (
    GF,
    QQ,
    LabeledMatrix,
    MinorTable,
    Witness,
    apply_witness,
    determinant,
    diag_similar_up_to_transposition,
    gen_random_dense,
    gen_skew_cycle,
)
from skewminor.cli import main
from skewminor.skewmat import gen_planted_hl_clan, load_matrix, matrix_from_json
from skewminor.witness import load_witness

ALT = {"1": 1, "2": -1, "3": 1, "4": -1}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else obj.dumps(), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main(["--quiet", *argv])
        out = capsys.readouterr().out
        try:
            return code, json.loads(out)
        except json.JSONDecodeError:
            return code, out
    return _run


def ones4():
    return LabeledMatrix.from_upper(4, {(i, j): 1 for i, j in combinations(range(1, 5), 2)})


class TestAnalyze:
    def test_fixture(self, run, write, fixture4):
        code, env = run("analyze", write("a.json", fixture4))
        assert code == 0 and env["status"] == "ok" and env["command"] == "analyze"
        assert env["verdict"]["dense"] is True
        assert env["verdict"]["hl"]["kind"] == "hl-indecomposable"
        assert len(env["inputs"]["matrix"]["sha256"]) == 64

    def test_cycle_not_dense(self, run, write):
        code, env = run("analyze", write("c.json", gen_skew_cycle(6, "A")))
        assert env["verdict"]["dense"] is False and env["verdict"]["zero_pair"] == ["1", "3"]

    def test_all_ones_separable(self, run, write):
        _, env = run("analyze", write("o.json", ones4()))
        sep = env["verdict"]["separability"]
        assert sep["kind"] == "separable" and "partition" in sep

    def test_malformed(self, run, write):
        code, env = run("analyze", write("bad.json", "{not json"))
        assert code == 2 and env["status"] == "input-error" and "verdict" not in env and env["message"]

    def test_missing_file(self, run, tmp_path):
        code, env = run("analyze", str(tmp_path / "nope.json"))
        assert code == 2 and env["status"] == "input-error"


class TestCompare:
    def test_cycles(self, run, write):
        a = write("a6.json", gen_skew_cycle(6, "A"))
        b = write("b6.json", gen_skew_cycle(6, "B"))
        code, env = run("compare", a, b, "--order", "5")
        assert code == 0 and env["verdict"]["equivalent"] is True
        code, env = run("compare", a, b, "-k", "6")
        assert code == 1 and env["verdict"]["witness_subset"] == ["1", "2", "3", "4", "5", "6"]
        code, env = run("compare", a, a)
        assert code == 0

    def test_label_mismatch(self, run, write, fixture4):
        other = LabeledMatrix.from_rows(fixture4.rows, labels=list("abcd"))
        code, env = run("compare", write("a.json", fixture4), write("b.json", other))
        assert code == 2 and env["status"] == "input-error"

    def test_bad_order(self, run, write, fixture4):
        a = write("a.json", fixture4)
        code, _ = run("compare", a, a, "--order", "9")
        assert code == 2


class TestWitnessCommands:
    def test_fixture_pair(self, run, write, fixture4, tmp_path):
        a = write("a.json", fixture4)
        b = write("b.json", apply_witness(fixture4, Witness(ALT)))
        code, env = run("witness", a, b, "--verify-input")
        assert code == 0
        W = Witness.from_json(env["verdict"])
        assert W.same_up_to_global_sign(Witness(ALT))

        w = write("w.json", W)
        out = str(tmp_path / "applied.json")
        assert main(["apply", a, w, "-o", out]) == 0
        assert load_matrix(out) == load_matrix(b)
        assert load_witness(w) == W

    def test_self(self, run, write, fixture4):
        a = write("a.json", fixture4)
        code, env = run("witness", a, a)
        assert code == 0 and set(env["verdict"]["signs"].values()) == {1}

    def test_flip_counterexample(self, run, write):
        A = gen_planted_hl_clan(GF(13), 6, ["1", "2", "3"], 0)
        a = write("a.json", A)
        code, _ = run("generate", "flip", "--input", a, "--set", "1,2,3", "-o", a.replace("a.json", "f.json"))
        assert code == 0
        code, env = run("witness", a, a.replace("a.json", "f.json"))
        assert code == 1 and env["status"] == "negative"
        assert env["verdict"]["failure"] == "hypothesis" and env["verdict"]["hl_clan"]

    def test_not_skew(self, run, write):
        M = LabeledMatrix.from_rows([[0, 1], [1, 0]])
        code, _ = run("witness", write("a.json", M), write("b.json", M))
        assert code == 2


class TestMinorsAndReconstruct:
    def test_fixture(self, run, write, fixture4, tmp_path):
        table = str(tmp_path / "t.json")
        assert main(["minors", write("a.json", fixture4), "--order", "4", "-o", table]) == 0
        T = MinorTable.from_json(json.loads(open(table).read()), QQ)
        assert T.max_order == 4 and T[fixture4.labels] == QQ.element(4)
        out_dir = tmp_path / "reps"
        code, env = run("reconstruct", table, "--out-dir", str(out_dir))
        assert code == 0 and env["verdict"]["count"] == 2
        reps = sorted(out_dir.iterdir())
        assert [p.name for p in reps] == ["representative_1.json", "representative_2.json"]
        assert load_matrix(reps[0]) == fixture4
        W = diag_similar_up_to_transposition(fixture4, load_matrix(reps[1]))
        assert W is not None and W.transposed

    def test_odd_minor(self, run, write, fixture4, tmp_path):
        table = str(tmp_path / "t.json")
        main(["minors", write("a.json", fixture4), "-o", table])
        obj = json.loads(open(table).read())
        for m in obj["minors"]:
            if m["subset"] == ["1", "2", "4"]:
                m["value"] = "1"
        code, env = run("reconstruct", write("t2.json", json.dumps(obj)))
        assert code == 1 and env["verdict"]["failure"] == "inconsistent"
        assert env["verdict"]["subset"] == ["1", "2", "4"]

    def test_round_trip_gf7(self, run, write, tmp_path):
        A = gen_random_dense(GF(7), 5, 11)
        table = str(tmp_path / "t.json")
        assert main(["minors", write("a.json", A), "-k", "4", "-o", table]) == 0
        code, env = run("reconstruct", table, "--p", "7")
        assert code == 0
        reps = [matrix_from_json(r) for r in env["verdict"]["representatives"]]
        assert any(diag_similar_up_to_transposition(R, A) for R in reps)

    def test_low_order(self, run, write, fixture4, tmp_path):
        table = str(tmp_path / "t.json")
        main(["minors", write("a.json", fixture4), "-k", "2", "-o", table])
        code, _ = run("reconstruct", table)
        assert code == 2


class TestGenerate:
    def test_skew_cycle(self, run):
        code, obj = run("generate", "skew-cycle", "--n", "6", "--variant", "B")
        assert code == 0 and determinant(matrix_from_json(obj)) == QQ.element(4)

    def test_golden(self, run, data_dir):
        _, out = run("generate", "random-dense", "--n", "6", "--p", "7", "--seed", "42")
        assert out == json.loads((data_dir / "random_dense_gf7_n6_seed42.json").read_text())

    def test_flip_empty_set(self, run, write, fixture4, tmp_path):
        out = str(tmp_path / "f.json")
        assert main(["generate", "flip", "--input", write("a.json", fixture4), "--set", "", "-o", out]) == 0
        assert load_matrix(out) == fixture4

    def test_flip_needs_set(self, run, write, fixture4):
        code, _ = run("generate", "flip", "--input", write("a.json", fixture4))
        assert code == 2

    @pytest.mark.parametrize("argv", [
        ["generate", "skew-cycle", "--n", "5"],
        ["generate", "sym-cycle"],
        ["generate", "random-dense", "--n", "4", "--p", "4"],
        ["generate", "nonsense"],
        ["frobnicate"],
    ])
    def test_bad_params(self, run, argv):
        code, _ = run(*argv)
        assert code == 2


class TestPUCheck:
    def test_all_plus(self, run, write):
        m = write("o.json", ones4())
        for mode in ("direct", "wesp"):
            code, env = run("pu-check", m, "--mode", mode)
            assert code == 0 and env["verdict"]["principally_unimodular"] is True

    def test_minor_nine(self, run, write):
        A = LabeledMatrix.from_upper(4, {(1, 2): 1, (1, 3): -1, (1, 4): 1, (2, 3): 1, (2, 4): 1, (3, 4): 1})
        m = write("n.json", A)
        for mode in ("direct", "wesp"):
            code, env = run("pu-check", m, "--mode", mode)
            assert code == 1 and env["verdict"]["principally_unimodular"] is False

    def test_small_wesp_warns(self, capsys, write):
        m = write("s.json", LabeledMatrix.from_upper(3, {(1, 2): 1, (1, 3): 1, (2, 3): -1}))
        assert main(["pu-check", m, "--mode", "wesp"]) == 0
        assert "vacuous" in capsys.readouterr().err
        assert main(["pu-check", m]) == 0

    def test_bad_entries(self, run, write):
        code, _ = run("pu-check", write("b.json", LabeledMatrix.from_upper(2, {(1, 2): 2})))
        assert code == 2


def test_output_is_byte_identical(write, fixture4):
    a = write("a.json", fixture4)
    cmd = [sys.executable, "-m", "skewminor", "analyze", a]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)["status"] == "ok"


def test_console_script_exit_codes(write):
    a = write("a6.json", gen_skew_cycle(6, "A"))
    b = write("b6.json", gen_skew_cycle(6, "B"))
    r = subprocess.run([sys.executable, "-m", "skewminor", "-q", "compare", a, b], capture_output=True)
    assert r.returncode == 1 and r.stderr == b""
