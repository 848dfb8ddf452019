import subprocess
import sys

import pytest

from dyndbg.cli import main, read_sequences


@pytest.fixture
def fasta(tmp_path):
    p = tmp_path / "in.fa"
    p.write_text(">r1\nACGTAC\nGTTGCA\n>r2\nTTTTACG\n")
    return p


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_read_sequences(fasta, tmp_path):
    assert read_sequences(str(fasta), "dna") == ["ACGTACGTTGCA", "TTTTACG"]
    plain = tmp_path / "p.txt"
    plain.write_text("ACGT\n\nGGGA\n")
    assert read_sequences(str(plain), "dna") == ["ACGT", "GGGA"]


def test_build_query_neighbors_verify(capsys, fasta, tmp_path):
    snap = str(tmp_path / "g.dbgf")
    code, out, _ = run(capsys, "build", "--input", str(fasta), "--k", "4", "--seed", "1",
                       "--out", snap)
    assert code == 0 and out.startswith("n=")
    assert run(capsys, "query", "--snapshot", snap, "--kmer", "ACGT")[:2] == (0, "1\n")
    assert run(capsys, "query", "--snapshot", snap, "--kmer", "CCCC")[:2] == (1, "0\n")
    code, out, _ = run(capsys, "neighbors", "--snapshot", snap, "--kmer", "CGTA", "--dir", "both")
    assert "out\tC\tGTAC" in out and "in\tA\tACGT" in out
    code, out, _ = run(capsys, "verify", "--snapshot", snap)
    assert code == 0 and "0 violation(s)" in out


def test_query_stdin(fasta, tmp_path):
    snap = str(tmp_path / "g.dbgf")
    assert main(["build", "--input", str(fasta), "--k", "4", "--seed", "1", "--out", snap]) == 0
    proc = subprocess.run([sys.executable, "-m", "dyndbg.cli", "query", "--snapshot", snap,
                           "--stdin"], input="ACGT\nCCCC\n", capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["ACGT\t1", "CCCC\t0"]


def test_jumbled_cli(capsys, tmp_path):
    src = tmp_path / "t.txt"
    src.write_text("AACGTTGA\n")
    snap = str(tmp_path / "j.dbgf")
    assert run(capsys, "build", "--input", str(src), "--k", "3", "--mode", "jumbled",
               "--seed", "0", "--out", snap)[0] == 0
    assert run(capsys, "query", "--snapshot", snap, "--pattern", "CAA")[:2] == (0, "1\n")
    assert run(capsys, "query", "--snapshot", snap, "--pattern", "CCC")[:2] == (1, "0\n")
    assert run(capsys, "verify", "--snapshot", snap)[0] == 0


def test_batch_static_needs_thaw(capsys, fasta, tmp_path):
    snap = str(tmp_path / "g.dbgf")
    main(["build", "--input", str(fasta), "--k", "4", "--seed", "1", "--out", snap])
    script = tmp_path / "ops.txt"
    script.write_text("addnode CCCC\naddedge CCCC CCCA\nquery CCCC = 1\ncheck\n")
    code, _, err = run(capsys, "batch", "--snapshot", snap, "--script", str(script))
    assert code == 1 and "--thaw" in err
    code, out, _ = run(capsys, "batch", "--snapshot", snap, "--script", str(script), "--thaw",
                       "--auto-add", "--out", str(tmp_path / "d.dbgf"))
    assert code == 0 and "mismatches=0" in out
    assert run(capsys, "query", "--snapshot", str(tmp_path / "d.dbgf"), "--kmer", "CCCA")[0] == 0


def test_batch_without_snapshot(capsys, tmp_path):
    script = tmp_path / "ops.txt"
    script.write_text("init k=3 symbols=ACGT seed=2\nseq ACGTT\nhasedge ACG CGT = 1\n"
                      "deledge ACG CGT\nhasedge ACG CGT = 1\nsucc CGT\ndelnode GGG\n")
    code, out, _ = run(capsys, "batch", "--script", str(script))
    lines = out.splitlines()
    assert code == 1 and "MISMATCH" in lines[2]
    assert lines[3].endswith("T:GTT")
    assert "error NodeAbsent" in lines[4]


def test_batch_oracle_pass(capsys, tmp_path):
    script = tmp_path / "ops.txt"
    script.write_text("init k=3 symbols=ACGT seed=2\nseq ACGTT\naddnode TTA\n"
                      "addedge GTT TTA\ndeledge ACG CGT\ncheck\n")
    code, out, _ = run(capsys, "batch", "--oracle", "--script", str(script))
    assert code == 0 and out.startswith("PASS")


def test_fuzz_and_bench(capsys):
    code, out, _ = run(capsys, "fuzz", "--seed", "3", "--ops", "200", "--k", "5")
    assert code == 0 and out.startswith("PASS seed=3")
    code, out, err = run(capsys, "bench", "--sizes", "2000", "--queries", "200")
    assert code == 0 and out.splitlines()[0] == "mode,n,k,sigma,op,ns_per_op"
    assert "is_node" in out and err.startswith("seed=")
    code, out, _ = run(capsys, "bench", "--mode", "update", "--sizes", "500", "--queries",
                       "50", "--seed", "1")
    assert code == 0 and "add_edge" in out


def test_errors_exit_codes(capsys, tmp_path):
    assert run(capsys, "verify", "--snapshot", str(tmp_path / "missing"))[0] == 1
    bad = tmp_path / "bad"
    bad.write_bytes(b"not a snapshot at all")
    code, _, err = run(capsys, "query", "--snapshot", str(bad), "--kmer", "ACGT")
    assert code == 1 and "not a DBGF" in err
    with pytest.raises(SystemExit) as exc:
        main(["build"])
    assert exc.value.code == 2
