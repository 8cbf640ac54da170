from . import _core
from ._errors import MorphPieceError

Tokenizer = _core.Tokenizer

__all__ = ["MorphPieceError", "Tokenizer", "decode", "detokenize", "encode", "load", "version"]


def load(artifact_dir, case="exact", joiner=True):
    return _core.load(str(artifact_dir), case, joiner)


def encode(handle, text):
    return handle.encode(text)


def decode(handle, ids):
    return handle.decode(list(ids))


def detokenize(handle, tokens):
    return handle.detokenize(list(tokens))


def version():
    return _core.version()
