import random
import subprocess
import threading

import pytest

import morphpiece
from conftest import ROOT


def fixture_sentences(n, seed=7):
    words = [line.split("\t")[0] for line in (ROOT / "data" / "mini_morphology.tsv").read_text().splitlines()]
    filler = ["the", "you", "He", "was", "walk", "zxqv", "café", "42", "don't", "(", ")", ",", "."]
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        parts = [rng.choice(words if rng.random() < 0.5 else filler) for _ in range(rng.randint(1, 10))]
        out.append(" ".join(parts).replace(" ,", ",").replace("( ", "("))
    return out


def test_version():
    assert morphpiece.version() == "0.1.0"


def test_encode_table_word(artifacts):
    tok = morphpiece.load(artifacts)
    ids = morphpiece.encode(tok, "batting")
    assert [tok.id_to_token(i) for i in ids] == ["bat", "#ing"]
    assert tok.tokenize("decompress") == ["de#", "compress"]
    assert tok.coverage_trace("batting zxqv") == ["MorphTable", "BpeSplit"]


def test_round_trip(artifacts):
    tok = morphpiece.load(artifacts)
    for s in fixture_sentences(300):
        assert morphpiece.decode(tok, morphpiece.encode(tok, s)) == s
        assert morphpiece.detokenize(tok, tok.tokenize(s)) == s


def test_missing_vocab_file(artifacts, tmp_path):
    for name in ("morphtable.tsv", "bpe.model", "bpe.vocab"):
        (tmp_path / name).write_bytes((artifacts / name).read_bytes())
    with pytest.raises(morphpiece.MorphPieceError) as err:
        morphpiece.load(tmp_path)
    assert err.value.code == "ArtifactMissing"


def test_corrupt_merges_line(artifacts, tmp_path):
    for name in ("morphtable.tsv", "bpe.vocab", "vocab.tsv"):
        (tmp_path / name).write_bytes((artifacts / name).read_bytes())
    lines = (artifacts / "bpe.model").read_text(encoding="utf-8").splitlines()
    lines[4] = "broken-merge-line"
    (tmp_path / "bpe.model").write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(morphpiece.MorphPieceError) as err:
        morphpiece.load(tmp_path)
    assert err.value.code == "ParseError"
    assert err.value.line == 5


def test_invalid_utf8_and_unknown_id(artifacts):
    tok = morphpiece.load(artifacts)
    with pytest.raises(morphpiece.MorphPieceError) as err:
        tok.encode(b"bad \xc3")
    assert err.value.code == "InvalidUtf8"
    with pytest.raises(morphpiece.MorphPieceError) as err:
        tok.decode([tok.vocab_size + 10])
    assert err.value.code == "UnknownId"


def test_closed_handle(artifacts):
    tok = morphpiece.load(artifacts)
    tok.close()
    assert tok.closed
    with pytest.raises(ValueError):
        tok.encode("batting")
    with morphpiece.load(artifacts) as scoped:
        assert scoped.encode("batting")
    assert scoped.closed


def test_handles_do_not_interfere(artifacts):
    a = morphpiece.load(artifacts)
    b = morphpiece.load(artifacts, joiner=False)
    assert a.tokenize("(batting") == ["(", "<|nospace|>", "bat", "#ing"]
    assert b.tokenize("(batting") == ["(", "bat", "#ing"]
    a.close()
    assert b.tokenize("batting") == ["bat", "#ing"]


def test_shared_handle_across_threads(artifacts):
    tok = morphpiece.load(artifacts)
    sentences = fixture_sentences(200, seed=3)
    expected = [tok.encode(s) for s in sentences]
    results = {}

    def work(k):
        results[k] = [tok.encode(s) for s in sentences]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results.values())


def test_cli_parity(artifacts, cli, tmp_path):
    tok = morphpiece.load(artifacts)
    sentences = fixture_sentences(1000, seed=11)
    source = tmp_path / "sentences.txt"
    source.write_text("\n".join(sentences) + "\n", encoding="utf-8")
    run = lambda *args: subprocess.run(
        [str(cli), *args, "--dir", str(artifacts)], check=True, capture_output=True
    ).stdout.decode("utf-8")

    cli_ids = run("encode", "--emit", "ids", "--input", str(source)).splitlines()
    assert len(cli_ids) == len(sentences)
    for s, line in zip(sentences, cli_ids):
        assert " ".join(map(str, tok.encode(s))) == line

    ids_file = tmp_path / "ids.txt"
    ids_file.write_text("\n".join(cli_ids) + "\n", encoding="utf-8")
    cli_text = run("decode", "--input", str(ids_file)).splitlines()
    for line, decoded in zip(cli_ids, cli_text):
        assert tok.decode([int(x) for x in line.split()]) == decoded
