"""Python front end for the matkex C++ core.

Transcripts are plain dicts in the same shape as the CLI's transcript files.
"""

import json

from . import _core
from ._core import DishonestTranscript, __version__

__all__ = [
    "DishonestTranscript",
    "bench",
    "char_poly",
    "exchange",
    "poly_mod",
    "recover_key",
    "span_basis",
    "verify",
]


def _text(transcript):
    return transcript if isinstance(transcript, str) else json.dumps(transcript)


def exchange(n, seed, field="prime:1000003", degrees=None, with_oracle=False):
    return json.loads(_core.exchange(n, seed, field, degrees, with_oracle))


def recover_key(transcript, method="span"):
    return json.loads(_core.recover_key(_text(transcript), method))


def verify(transcript):
    return _core.verify(_text(transcript))


def span_basis(transcript):
    return json.loads(_core.span_basis(_text(transcript)))


def char_poly(matrix, modulus):
    return _core.char_poly(matrix, modulus)


def poly_mod(p, c, modulus):
    return _core.poly_mod(p, c, modulus)


def bench(sizes, seeds=1, field="prime:1000003", base_seed=1, threads=0):
    lines = _core.bench(list(sizes), seeds, field, base_seed, threads).splitlines()
    return [json.loads(line) for line in lines if line]
