import pytest

from pcalab.cli import main, parse_graph
from pcalab.machine import finite_set_encode, pair


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# --- apply

def test_graph_empty_premise(capsys):
    assert run(capsys, "apply", "--model", "E", "{(5,[])}", "{}") == (0, "{5}\ndefined\n", "")


def test_graph_premises(capsys):
    code, out, _ = run(capsys, "apply", "--model", "E", "{(5,[]), (3,[1,2]), 7}", "{1,2}")
    assert (code, out) == (0, "{3,5}\ndefined\n")


def test_k1_divergence(capsys):
    code, out, _ = run(capsys, "apply", "--model", "K1", "1", "0")
    assert code == 2 and out.startswith("out of fuel")


def test_k201_zero_stream(capsys):
    assert run(capsys, "apply", "--model", "K201", "0^w", "k")[:2] == (2, "undefined: zero stream\n")


def test_k2_table(capsys):
    code, out, _ = run(capsys, "apply", "--model", "K2", "--window", "6", "k", "table(3,1,4)")
    assert code == 0
    assert out.splitlines()[0].startswith("[10 3 1 4 0 0] index=")
    assert out.splitlines()[1] == "defined at window 6"


def test_b_holes(capsys):
    code, out, _ = run(capsys, "apply", "--model", "B", "--window", "4", "k", "table(3,.,4)")
    assert code == 0 and out.startswith("[10 3 . 4] index=")


def test_k2_undefined_at_window(capsys):
    # head 1 is the self-looping program, so the product fails at the first point
    code, out, _ = run(capsys, "apply", "--model", "K2", "--steps", "2000", "table(1)", "k")
    assert (code, out) == (2, "undefined at 0: out of fuel after 2000 steps\n")


def test_k2_partial_literal_is_rejected(capsys):
    code, _, err = run(capsys, "apply", "--model", "K2", "--steps", "2000", "1", "k")
    assert code == 1 and "undefined at 0" in err


def test_check_table_mismatch(capsys):
    code, _, err = run(capsys, "apply", "--model", "K2", "5:1,2", "k")
    assert code == 1 and "error:" in err


@pytest.mark.parametrize("argv", [
    ("apply", "--model", "K2", "table(3,x)", "k"),
    ("apply", "--model", "K1", "--steps", "0", "1", "1"),
    ("apply", "--model", "E", "{(5,[)}", "{}"),
    ("apply", "--model", "CL", "k", "k"),
    ("apply", "--model", "K1", "-3", "1"),
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err.startswith("error:")


def test_graph_literals():
    assert parse_graph("{}").approx(1) == frozenset()
    assert parse_graph("{(3,[1,2]), 7}").approx(1) == {pair(3, finite_set_encode([1, 2])), 7}


# --- compile

@pytest.mark.parametrize("model", ["K1", "K2", "K201", "B", "CL"])
def test_compile_identity(capsys, tmp_path, model):
    code, out, _ = run(capsys, "compile", "--model", model, write(tmp_path, "i.lam", "lambda x. x\n"))
    assert code == 0
    assert out.splitlines()[1].startswith("verified: 3 of 3")


def test_compile_k_shape(capsys, tmp_path):
    code, out, _ = run(capsys, "compile", "--model", "CL", write(tmp_path, "k.lam", "lambda x y. x"))
    assert code == 0 and out.splitlines()[0] == "((s (k k)) ((s k) k))"


def test_compile_k_in_k1(capsys, tmp_path):
    code, out, _ = run(capsys, "compile", "--model", "K1", write(tmp_path, "k.lam", "lambda x y. x"))
    assert code == 0 and out.splitlines()[0].isdigit()


def test_compile_free_variable(capsys, tmp_path):
    code, _, err = run(capsys, "compile", write(tmp_path, "z.lam", "lambda x. x z"))
    assert code == 1 and "free variable z" in err


def test_compile_syntax_error(capsys, tmp_path):
    code, _, err = run(capsys, "compile", write(tmp_path, "bad.lam", "lambda x. (x"))
    assert code == 1 and "line 1" in err


# --- probes and checks

def candidate(tmp_path, source, target, name):
    return write(tmp_path, f"{name}.cand", f"# candidate\nsource {source}\ntarget {target}\nmap {name}\n")


def test_probe_truncating_fake(capsys, tmp_path):
    out_path = tmp_path / "w.log"
    code, out, _ = run(capsys, "probe", candidate(tmp_path, "B", "K2", "truncating-fake"), "sigma",
                       "--out", str(out_path))
    assert code == 3
    assert "replays: yes" in out
    assert out_path.read_text().startswith("witness SigmaCollision\ncandidate truncating-fake\n")


def test_probe_identity_all(capsys, tmp_path):
    code, out, _ = run(capsys, "probe", candidate(tmp_path, "E", "E", "identity-E-images"), "all")
    assert code == 0 and out.splitlines()[-1].startswith("consistent at bounds (steps=100000")


def test_probe_witness_to_stdout(capsys, tmp_path):
    code, out, _ = run(capsys, "probe", candidate(tmp_path, "E", "K2", "parity-fake"), "monotone")
    assert code == 3 and "witness MonotonicityExploit" in out


@pytest.mark.parametrize("text", [
    "source K2\ntarget K2\nmap nonsense\n",
    "source B\ntarget K2\nmap identity-K2\n",
    "source K2\nmap identity-K2\n",
    "source K2\nsource K2\ntarget K2\nmap identity-K2\n",
    "garbage\n",
])
def test_malformed_candidates(capsys, tmp_path, text):
    code, _, err = run(capsys, "probe", write(tmp_path, "bad.cand", text), "all")
    assert code == 1 and err.startswith("error:")


def test_probe_not_applicable(capsys, tmp_path):
    code, _, err = run(capsys, "probe", candidate(tmp_path, "K2", "K2", "identity-K2"), "monotone")
    assert code == 1 and "does not apply" in err


def test_check_refutes_planted_defect(capsys, tmp_path):
    path = candidate(tmp_path, "E", "E", "planted-homomorphism-defect")
    code, out, _ = run(capsys, "check", path, "--samples", "60")
    assert code == 3 and "refuted by HomomorphismClash" in out


def test_check_consistent(capsys, tmp_path):
    code, out, _ = run(capsys, "check", candidate(tmp_path, "K2", "K201", "graph-K2-K201"),
                       "--samples", "10")
    assert code == 0 and "consistent at sample size 10" in out


# --- gadgets

def test_gadgets(capsys):
    assert run(capsys, "gadget", "R", "{}", "{}")[:2] == (0, "{0}\n")
    assert run(capsys, "gadget", "R", "{0}", "{}")[:2] == (0, "{0,1}\n")
    assert run(capsys, "gadget", "C", "{1}", "{1}")[:2] == (0, "{0}\n")
    assert run(capsys, "gadget", "C", "{1}", "{2}")[:2] == (0, "{0,1}\n")
    assert run(capsys, "gadget", "nope")[0] == 1


def test_tot_gadget(capsys):
    from pcalab.embeddings import TOT_UNIVERSE
    code, out, _ = run(capsys, "gadget", "tot", str(TOT_UNIVERSE["2x"]))
    assert code == 0 and "certified table says total" in out


def test_determinism(capsys, tmp_path):
    argv = ("probe", candidate(tmp_path, "E", "K2", "decision-fake"), "decision")
    assert run(capsys, *argv) == run(capsys, *argv)


def test_help_documents_literals(capsys):
    with pytest.raises(SystemExit):
        main(["apply", "--help"])
    out = capsys.readouterr().out
    for needle in ("table(3,1,4)", "0^w", "(5,[])", "lambda x y."):
        assert needle in out
