import os
import pathlib
import shutil
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


def cli_path():
    candidate = os.environ.get("MORPHPIECE_CLI") or ROOT / "build" / "tools" / "morphpiece"
    candidate = pathlib.Path(candidate)
    if candidate.exists():
        return candidate
    found = shutil.which("morphpiece")
    return pathlib.Path(found) if found else None


@pytest.fixture(scope="session")
def cli():
    path = cli_path()
    if path is None:
        pytest.skip("morphpiece CLI not built")
    return path


@pytest.fixture(scope="session")
def artifacts(cli, tmp_path_factory):
    out = tmp_path_factory.mktemp("artifacts")
    data = ROOT / "data"
    steps = [
        ["build-morphtable", "--source", str(data / "mini_morphology.tsv"), "--min-count", "1"],
        ["train-bpe", "--corpus", str(data / "mini_corpus.txt"), "--vocab-size", "1000"],
        ["build-vocab"],
    ]
    for step in steps:
        subprocess.run([str(cli), *step, "--dir", str(out)], check=True, capture_output=True)
    return out
