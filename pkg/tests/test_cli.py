from __future__ import annotations

import io
import subprocess
import sys

import pytest

from mvpavelka.algebra import FiniteAlgebra, format_algebra
from mvpavelka.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eval():
    assert call("eval", "--profile", "base", "p & q", "--val", "p=7/10,q=3/5") == (0, "3/10\n", "")


def test_degree_human_and_lines():
    code, out, _ = call("degree", "--profile", "base,constants", "p -> (p & p)")
    assert code == 0 and out == "exact lo 1/2 hi 1/2 witness p=1/2\n"
    code, out, _ = call("degree", "--format", "lines", "p -> (p & p)")
    assert out.splitlines() == ["exact", "lo 1/2", "hi 1/2", "witness p=1/2", "vacuous: no"]


def test_degree_with_theory(tmp_path):
    th = tmp_path / "t.txt"
    th.write_text("p\np -> q\n")
    code, out, _ = call("degree", "q", "--theory", str(th))
    assert code == 0 and out.startswith("exact lo 1 hi 1")


def test_degree_falls_back_to_grid():
    code, out, _ = call("degree", "p * p")
    assert code == 0 and out.startswith("grid lo")


def test_replay_and_check(tmp_path):
    path = tmp_path / "p33.txt"
    code, out, _ = call("replay", "prop33", "--alpha", "p", "--beta", "q", "--gamma", "r", "--out", str(path))
    assert code == 0 and "accepted" in out
    code, out, _ = call("check", str(path))
    assert code == 0 and out.startswith("accepted")


def test_rejected_proof_exit_code(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("theory: p\ntheory: p -> q\n1 | p | hyp:1\n2 | p -> q | hyp:2\n3 | q | mp:2,1\n")
    code, out, _ = call("check", str(path))
    assert code == 1 and "step 3" in out


@pytest.mark.parametrize("argv", [
    ("eval", "p &"),
    ("eval", "--profile", "base", "d3(p)"),
    ("eval", "p", "--val", "p"),
    ("eval", "p & q", "--val", "p=1"),
    ("check", "/nonexistent/proof.txt"),
    ("degree", "p", "--eps", "x"),
    ("nosuchcommand",),
])
def test_malformed_input(argv):
    assert call(*argv)[0] == 2


def test_gap(tmp_path):
    th = tmp_path / "t.txt"
    th.write_text("p\n")
    proof = tmp_path / "gap.txt"
    code, out, _ = call("gap", "p", "--theory", str(th), "--out", str(proof))
    assert code == 0
    assert out.splitlines()[:3] == ["proof_lower 1 (proof file emitted)", "truth 1", "gap 0"]
    assert call("check", str(proof))[0] == 0


def test_compact(tmp_path):
    th = tmp_path / "t.txt"
    th.write_text("p\np -> q\nq -> p\n")
    code, out, _ = call("compact", "q", "--theory", str(th), "--r", "1")
    assert code == 0 and out.splitlines()[0] == "subset {p, p -> q}"
    assert call("compact", "q", "--theory", str(th), "--r", "1", "--max-generators", "2")[0] == 2


def test_congr(tmp_path):
    alg = FiniteAlgebra.chain(2).product(FiniteAlgebra.chain(3))
    path = tmp_path / "a.txt"
    path.write_text(format_algebra(alg.expand("c", 0, 1)))
    code, out, _ = call("congr", str(path))
    assert code == 0
    assert "congruences 4" in out and "expansion compatible: yes" in out


def test_axioms():
    code, out, _ = call("axioms", "--profile", "base,fixpoint", "--trials", "50", "--max-chain", "4")
    assert code == 0 and out.splitlines()[-1] == "failures 0"
    assert "fix !K = K on random: PASS" in out


def test_out_writes_report(tmp_path):
    path = tmp_path / "r.txt"
    code, out, _ = call("eval", "p", "--val", "p=1/3", "--out", str(path))
    assert code == 0 and out == "" and path.read_text() == "1/3\n"


def test_seed_environment_override(monkeypatch):
    from mvpavelka import cli
    seen = []

    def fake(number, seed):
        seen.append(seed)
        return cli.acceptance.CriterionResult(number, "stub", True)

    monkeypatch.setattr(cli.acceptance, "run_criterion", fake)
    monkeypatch.setenv("MVPAVELKA_SEED", "42")
    assert call("suite", "--only", "3", "--seed", "1")[0] == 0
    assert seen == [42]


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "mvpavelka", "axioms", "--format", "lines", "--trials", "30",
           "--max-chain", "3", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
