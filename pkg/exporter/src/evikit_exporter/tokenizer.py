"""Toy subword tokenizer with word alignment.

Splits each document token (word) into fixed-width character pieces and maps
pieces to stable vocabulary ids by hashing, so no trained vocabulary file is
needed. The piece -> word mapping is recorded so attributions computed per
piece can be pooled back onto document token positions.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass


@dataclass(frozen=True)
class Encoding:
    piece_ids: list[int]   # vocabulary bucket per piece
    word_index: list[int]  # originating document token position per piece


class HashPieceTokenizer:
    """Deterministic subword tokenizer: character chunks hashed into id buckets."""

    def __init__(self, vocab_size: int = 512, max_piece_len: int = 4):
        if vocab_size < 2:
            raise ValueError("vocab_size must be >= 2")
        if max_piece_len < 1:
            raise ValueError("max_piece_len must be >= 1")
        self.vocab_size = vocab_size
        self.max_piece_len = max_piece_len

    def pieces(self, word: str) -> list[str]:
        step = self.max_piece_len
        return [word[i : i + step] for i in range(0, len(word), step)]

    def piece_id(self, piece: str) -> int:
        return zlib.crc32(piece.encode("utf-8")) % self.vocab_size

    def encode_words(self, words: list[str]) -> Encoding:
        """Encode document tokens; every word must produce at least one piece."""
        piece_ids: list[int] = []
        word_index: list[int] = []
        for w, word in enumerate(words):
            pieces = self.pieces(word)
            if not pieces:
                raise AlignmentError(w, word)
            for piece in pieces:
                piece_ids.append(self.piece_id(piece))
                word_index.append(w)
        return Encoding(piece_ids=piece_ids, word_index=word_index)


class AlignmentError(Exception):
    """A document token could not be mapped to any subword piece."""

    def __init__(self, word_position: int, word: str):
        super().__init__(f"token {word_position} ({word!r}) produced no subword pieces")
        self.word_position = word_position
        self.word = word
