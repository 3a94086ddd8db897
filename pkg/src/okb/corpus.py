"""Plain-text ingestion: normalization, sentence segmentation, tokenization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import OkbError


class CorpusError(OkbError):
    pass


# Cyrillic and Latin letters; apostrophes (U+0027, U+2019) and hyphens join a
# word only when flanked by letters on both sides.
_L = "A-Za-zЀ-ӿ"
TOKEN_RE = re.compile(
    rf"(?P<word>[{_L}]+(?:['’-][{_L}]+)*)|(?P<num>[0-9]+)|(?P<punct>\S)"
)
_MARKER_RE = re.compile(r"^[0-9]+\s+")
_TERMINATORS = ".!?"


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int  # exclusive, offsets within the sentence text
    kind: str  # WORD | NUM | PUNCT


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    tokens: tuple[Token, ...] = ()


@dataclass(frozen=True)
class Document:
    id: str
    name: str
    text: str  # normalized
    sentences: tuple[Sentence, ...] = ()


def tokenize(text: str) -> list[Token]:
    """Tokens of a sentence, in order, with character offsets.

    WORD tokens are maximal letter runs (with internal apostrophes/hyphens),
    digit runs become NUM, any other non-space character is a one-char PUNCT.
    """
    tokens = []
    for m in TOKEN_RE.finditer(text):
        kind = "WORD" if m.lastgroup == "word" else "NUM" if m.lastgroup == "num" else "PUNCT"
        tokens.append(Token(m.group(), m.start(), m.end(), kind))
    return tokens


def segment(text: str) -> list[Sentence]:
    """Split normalized text into sentences.

    A sentence ends after `.`, `!` or `?` when whitespace plus an uppercase
    letter or digit follows, or at end of text. The terminator stays with its
    sentence; inter-sentence whitespace belongs to neither side.
    """
    sentences: list[Sentence] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j == n or (j > i + 1 and (text[j].isupper() or text[j].isdigit())):
                piece = text[start:i + 1].strip()
                if piece:
                    sentences.append(Sentence(len(sentences), piece, tuple(tokenize(piece))))
                start = j
                i = j
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(Sentence(len(sentences), tail, tuple(tokenize(tail))))
    return sentences


def normalize(raw: str) -> str:
    """Collapse whitespace runs and strip leading list markers like `12 ` per line."""
    lines = [_MARKER_RE.sub("", line) for line in raw.splitlines()]
    return re.sub(r"\s+", " ", " ".join(lines)).strip()


def ingest_document(raw: str, name: str, doc_id: str = "d1") -> Document:
    """Normalize raw text and build a segmented, tokenized Document.

    Raises CorpusError("empty document") when nothing but whitespace remains.
    """
    text = normalize(raw)
    if not text:
        raise CorpusError("empty document")
    return Document(doc_id, name, text, tuple(segment(text)))
