"""Build an attribute matrix from an ordered document corpus.

Documents are nodes in their given (publication) order; the retained tokens
of a document are its features.  A token becomes a new feature in the first
document that mentions it, which reproduces the left-ordered column layout
by construction.
"""
from __future__ import annotations

import re
import warnings

from sklearn.base import BaseEstimator

from .matrix import AttributeMatrix

__all__ = ["tokenize", "load_stoplist", "build_matrix", "read_corpus_tsv", "CorpusVectorizer"]

_TOKEN_SPLIT = re.compile(r"[^a-z]+")


def tokenize(text: str, min_token_len: int = 2) -> list[str]:
    """Lowercase, split on non-alphabetic characters, drop short tokens."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if len(t) >= min_token_len]


def load_stoplist(path) -> frozenset:
    """Newline-separated word list; lowercased, blank lines ignored."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip())


def read_corpus_tsv(path):
    """Read documents from a TSV with columns (id, date, title, abstract).

    Rows must already be sorted in corpus order.  Returns (ids, texts).
    """
    ids, texts = [], []
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3:
                raise ValueError(f"{path}: expected >= 3 tab-separated columns")
            ids.append(parts[0])
            texts.append(" ".join(parts[2:]))
    return ids, texts


def build_matrix(
    texts, stopwords=frozenset(), min_token_len: int = 2
) -> tuple[AttributeMatrix, list[str], int]:
    """First-occurrence feature assignment over the documents in order.

    Returns (matrix, feature_names, skipped) where ``skipped`` counts the
    documents that retained no token at all (they become empty rows).
    """
    texts = list(texts)
    if not texts:
        raise ValueError("corpus is empty")
    vocab: dict[str, int] = {}
    rows = []
    skipped = 0
    for doc_no, text in enumerate(texts):
        tokens = tokenize(text or "", min_token_len)
        kept = sorted({t for t in tokens if t not in stopwords})
        if not kept:
            skipped += 1
            warnings.warn(f"document {doc_no} has no retained tokens")
        ids = []
        for tok in kept:
            if tok not in vocab:
                vocab[tok] = len(vocab)
            ids.append(vocab[tok])
        rows.append(sorted(ids))
    names = [None] * len(vocab)
    for tok, idx in vocab.items():
        names[idx] = tok
    return AttributeMatrix(rows), names, skipped


class CorpusVectorizer(BaseEstimator):
    """Corpus-to-matrix transformer with the scikit-learn protocol.

    Parameters
    ----------
    stopwords : collection of str
        Words never turned into features.
    min_token_len : int
        Tokens shorter than this are dropped (default 2; pass 1 to keep
        single letters).

    Attributes (after ``fit``)
    --------------------------
    matrix_ : AttributeMatrix
    feature_names_ : list of str, index-aligned with the matrix columns
    skipped_ : int, documents that contributed no token
    """

    def __init__(self, stopwords=frozenset(), min_token_len: int = 2):
        self.stopwords = stopwords
        self.min_token_len = min_token_len

    def fit(self, X, y=None):
        matrix, names, skipped = build_matrix(
            X, frozenset(self.stopwords), self.min_token_len
        )
        self.matrix_ = matrix
        self.feature_names_ = names
        self.skipped_ = skipped
        return self

    def fit_transform(self, X, y=None) -> AttributeMatrix:
        return self.fit(X).matrix_
