"""Deterministic text utilities shared by retrieval, the responder and analytics.

Everything here is a pure function of its inputs: tokenization, Porter
stemming, stopword removal, question detection and smoothed sentence-level
BLEU. Retrieval indexes store a fingerprint of the TokenPipelineConfig they
were built with, so the config is treated as immutable once an index exists.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*", re.UNICODE)

_QUESTION_CUES = frozenset(
    "what why how do does did are is can could would have has who where when which".split()
)

_SENTENCE_RE = re.compile(r"[^.!?]*[.!?]+|[^.!?]+")


def data_file(*parts: str):
    """Traversable handle on a file shipped under oumwoz/data."""
    node = resources.files("oumwoz").joinpath("data")
    for part in parts:
        node = node.joinpath(part)
    return node


def _default_stopwords() -> frozenset[str]:
    return frozenset(load_stopwords_text(data_file("stopwords.txt").read_text("utf-8")))


def load_stopwords_text(text: str) -> set[str]:
    """Parse a stopword file: one lowercase token per line, '#' comments allowed."""
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return words


def load_stopwords(path) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        return load_stopwords_text(fh.read())


@dataclass(frozen=True)
class TokenPipelineConfig:
    """Term pipeline settings: lowercase, then stopword removal, then stemming."""

    lowercase: bool = True
    stem: bool = True
    stopwords: frozenset[str] = field(default_factory=_default_stopwords)

    def fingerprint(self) -> str:
        payload = "|".join(
            [str(self.lowercase), str(self.stem), ",".join(sorted(self.stopwords))]
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split on non-alphanumeric boundaries, keeping apostrophes inside words."""
    tokens = _TOKEN_RE.findall(text)
    if lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens


def word_count(text: str) -> int:
    """Token count before any stopword removal."""
    return len(tokenize(text))


def preprocess(text: str, config: TokenPipelineConfig | None = None) -> list[str]:
    """tokenize -> lowercase -> drop stopwords -> stem, preserving order."""
    if config is None:
        config = TokenPipelineConfig()
    terms = tokenize(text, lowercase=config.lowercase)
    if config.stopwords:
        terms = [t for t in terms if t not in config.stopwords]
    if config.stem:
        terms = [porter_stem(t) for t in terms]
    return terms


def split_sentences(text: str) -> list[str]:
    """Split on .!? runs, keeping each sentence's terminal punctuation."""
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]


def is_question(sentence: str) -> bool:
    """'?'-terminated, or opening with an interrogative cue word."""
    stripped = sentence.strip()
    if not stripped:
        return False
    if stripped.endswith("?"):
        return True
    head = stripped.split(None, 1)
    if len(head) < 2:
        return False
    return head[0].lower().rstrip(",") in _QUESTION_CUES


# ---------------------------------------------------------------------------
# Porter stemmer (original 1980 rule set)
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count of VC sequences in the [C](VC)^m[V] decomposition."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def _replace_longest(word: str, rules, min_measure: int) -> str:
    best = None
    for suffix, repl in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    if best is None:
        return word
    stem = word[: len(word) - len(best[0])]
    if _measure(stem) > min_measure - 1:
        return stem + best[1]
    return word


def porter_stem(word: str) -> str:
    """Stem a single lowercase word; words of length <= 2 pass through."""
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        applied = False
        if word.endswith("ed") and _contains_vowel(word[:-2]):
            word = word[:-2]
            applied = True
        elif word.endswith("ing") and _contains_vowel(word[:-3]):
            word = word[:-3]
            applied = True
        if applied:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _contains_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _replace_longest(word, _STEP2, 1)
    word = _replace_longest(word, _STEP3, 1)

    # Step 4: plain deletion at m > 1, with the s/t gate on "ion"
    best = None
    for suffix in _STEP4:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best)):
            best = suffix
    if best is not None:
        stem = word[: len(word) - len(best)]
        if _measure(stem) > 1 and (best != "ion" or stem.endswith(("s", "t"))):
            word = stem

    # Step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word


# ---------------------------------------------------------------------------
# Smoothed sentence-level BLEU
# ---------------------------------------------------------------------------


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(candidate: list[str], reference: list[str], max_n: int = 4) -> float:
    """Geometric mean of add-1-smoothed modified n-gram precisions times
    the brevity penalty exp(min(0, 1 - |ref|/|cand|)). Empty candidate -> 0.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not candidate:
        return 0.0
    log_prec_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = _ngram_counts(candidate, n)
        ref_counts = _ngram_counts(reference, n)
        matched = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        total = max(len(candidate) - n + 1, 0)
        log_prec_sum += math.log((matched + 1) / (total + 1))
    brevity = math.exp(min(0.0, 1.0 - len(reference) / len(candidate)))
    return brevity * math.exp(log_prec_sum / max_n)


def max_bleu_against(candidate: list[str], references: list[list[str]], max_n: int = 4) -> float:
    """Highest sentence_bleu of the candidate against any single reference; 0 if none."""
    if not references:
        return 0.0
    return max(sentence_bleu(candidate, ref, max_n) for ref in references)
