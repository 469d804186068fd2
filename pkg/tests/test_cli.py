from click.testing import CliRunner

from llinf.cli import main

CYCLIC = "def M = y #M ;\nroot M ;\n"
RHO = "def N = N (\\x. x) ;\nroot N ;\n"
DEAD = "def D = (\\!x. x) (#(\\y. y)) ;\nroot D ;\n"
LAM = "def T = \\x. T ;\nroot T ;\nflags 100 ;\n"
OMEGA = "def O = (\\!x. x !x) (!(\\!x. x !x)) ;\nroot O ;\n"


def run(args, files=None):
    runner = CliRunner()
    with runner.isolated_filesystem():
        for name, text in (files or {}).items():
            with open(name, "w") as fh:
                fh.write(text)
        return runner.invoke(main, args)


def test_check_accept():
    r = run(["check", "--system", "llinf", "--env", "!y", "cyc.lli"],
            {"cyc.lli": CYCLIC})
    assert r.exit_code == 0
    assert "accepted" in r.output


def test_check_reject_shows_loop():
    r = run(["check", "--system", "llinf", "--env", "", "rho.lli"],
            {"rho.lli": RHO})
    assert r.exit_code == 1
    assert "inductive loop" in r.output


def test_check_infer():
    r = run(["check", "--system", "llinf", "--infer", "cyc.lli"],
            {"cyc.lli": CYCLIC})
    assert r.exit_code == 0
    assert "!y" in r.output


def test_check_lambda_flags():
    r = run(["check", "lam.lam"], {"lam.lam": LAM})
    assert r.exit_code == 0
    r = run(["check", "--flags", "001", "lam.lam"], {"lam.lam": LAM})
    assert r.exit_code == 1


def test_parse_error_exit_code():
    r = run(["check", "bad.lli"], {"bad.lli": "def M = ( ; root M"})
    assert r.exit_code == 3


def test_eval_deadlock_exit():
    r = run(["eval", "--depth", "1", "--fuel", "10", "dead.lli"],
            {"dead.lli": DEAD})
    assert r.exit_code == 1
    assert "deadlocked at" in r.output


def test_eval_fuel_exit():
    r = run(["eval", "--depth", "0", "--fuel", "4", "om.lli"],
            {"om.lli": OMEGA})
    assert r.exit_code == 2


def test_eval_normalizes():
    r = run(["eval", "--depth", "1", "--fuel", "50", "t.lli"],
            {"t.lli": "def T = #((\\x. x) y) ;\nroot T ;\n"})
    assert r.exit_code == 0
    assert "#y" in r.output
    assert "normalized" in r.output


def test_trace_tab_separated():
    r = run(["trace", "--depth", "1", "--fuel", "50", "t.lli"],
            {"t.lli": "def T = (\\x. x) (#((\\q. q) y)) ;\nroot T ;\n"})
    assert r.exit_code == 0
    lines = [ln for ln in r.output.splitlines() if "\t" in ln]
    assert lines[0].split("\t") == ["0", "", "0", "linear", ""]
    assert lines[1].split("\t") == ["1", "c", "1", "linear", "box"]


def test_weight_table():
    r = run(["weight", "--depths", "0..2", "id.lli"],
            {"id.lli": "def I = \\x. x ;\nroot I ;\n"})
    assert r.exit_code == 0
    lines = r.output.strip().splitlines()
    assert lines[0] == "depth\tsize\tdf\ttwei"
    assert lines[1] == "0\t2\t1\t2"


def test_embed_output_parses():
    r = run(["embed", "--which", "girard", "--a", "0", "d.lam"],
            {"d.lam": "def D = \\x. x x ;\nroot D ;\n"})
    assert r.exit_code == 0
    assert "\\!x. x !x" in r.output


def test_encode_decode_round_trip():
    r = run(["encode", "--mode", "algebra", "011"])
    assert r.exit_code == 0
    r2 = run(["decode", "--mode", "algebra", "enc.lli"], {"enc.lli": r.output})
    assert r2.exit_code == 0
    assert r2.output.strip() == "011e"


def test_examples_listing_and_run():
    r = run(["examples"])
    assert r.exit_code == 0
    assert "nonconf" in r.output
    r2 = run(["examples", "deadlock"])
    assert r2.exit_code == 0
    assert "deadlocked" in r2.output
    r3 = run(["examples", "--run"])
    assert r3.exit_code == 0, r3.output
    assert "FAIL" not in r3.output


def test_bench_deterministic():
    args = ["bench", "--seed", "2", "--count", "6", "--system", "4s",
            "--size", "20"]
    r1 = run(args)
    r2 = run(args)
    assert r1.exit_code == 0, r1.output
    assert r1.output == r2.output


def test_bench_metrics_file():
    runner = CliRunner()
    with runner.isolated_filesystem():
        r = runner.invoke(main, ["bench", "--seed", "2", "--count", "4",
                                 "--system", "4s", "--size", "18",
                                 "--metrics-out", "m.tsv"])
        assert r.exit_code == 0, r.output
        table = open("m.tsv").read().splitlines()
        assert table[0] == "index\tdepth\tsize\tdf\ttwei"
        assert len(table) == 1 + 4 * 3
