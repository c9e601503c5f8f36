"""Reference dictionaries and frequency lists used to exclude known words.

A lexicon is an immutable, lowercased, NFC-normalized word -> count map.
On top of it sit the spelling predicates (diacritic folding, adjacent
swaps) and a length-bucketed index for exact nearest-word queries under
normalized Levenshtein distance.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

POLISH_FOLD_PAIRS = {
    "ą": "a",
    "ć": "c",
    "ę": "e",
    "ł": "l",
    "ń": "n",
    "ó": "o",
    "ś": "s",
    "ź": "z",
    "ż": "z",
}


class LexiconError(Exception):
    """Raised for unreadable, malformed or empty lexicon files."""


def normalize_form(word: str) -> str:
    """Canonical stored shape of a surface form: NFC, lowercased."""
    return unicodedata.normalize("NFC", word).lower()


@dataclass(frozen=True)
class DiacriticFoldTable:
    """Maps diacritic characters to base characters. Folding is idempotent."""

    pairs: Mapping[str, str] = field(default_factory=lambda: dict(POLISH_FOLD_PAIRS))

    def fold(self, word: str) -> str:
        w = normalize_form(word)
        return w.translate({ord(k): v for k, v in self.pairs.items()})


class ReferenceLexicon:
    """Immutable word/count store. Lookups never mutate state."""

    def __init__(self, name: str, kind: str, entries: Dict[str, int]):
        if kind not in ("dictionary", "frequency-list"):
            raise LexiconError(f"unknown lexicon kind: {kind!r}")
        if not entries:
            raise LexiconError(f"lexicon {name!r} has no entries")
        self.name = name
        self.kind = kind
        self._entries = dict(entries)
        self._folded_cache: Dict[Tuple[Tuple[str, str], ...], frozenset] = {}

    @property
    def entries(self) -> Mapping[str, int]:
        return dict(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, word: str) -> bool:
        return self.contains(word)

    def contains(self, word: str) -> bool:
        return normalize_form(word) in self._entries

    def count(self, word: str) -> int:
        return self._entries.get(normalize_form(word), 0)

    def forms(self) -> Iterable[str]:
        return self._entries.keys()

    def folded_forms(self, fold: DiacriticFoldTable) -> frozenset:
        """Set of entries after diacritic folding, cached per fold table."""
        key = tuple(sorted(fold.pairs.items()))
        cached = self._folded_cache.get(key)
        if cached is None:
            cached = frozenset(fold.fold(w) for w in self._entries)
            self._folded_cache[key] = cached
        return cached


def load_lexicon(path: str | Path, kind: str, name: Optional[str] = None) -> ReferenceLexicon:
    """Load a dictionary (one form per line) or frequency list (form<TAB>count).

    Lines starting with ``#`` are ignored in dictionaries. Duplicate forms merge
    by summing counts. Raises LexiconError with the offending line number on
    malformed input.
    """
    path = Path(path)
    name = name or path.stem
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise LexiconError(f"lexicon file {path} is not valid UTF-8: {exc}") from exc

    entries: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if kind == "frequency-list":
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{path}:{lineno}: expected 'form<TAB>count', got {raw!r}")
            form, count_str = parts
            try:
                count = int(count_str)
            except ValueError:
                raise LexiconError(f"{path}:{lineno}: count is not an integer: {count_str!r}")
            if count < 0:
                raise LexiconError(f"{path}:{lineno}: negative count {count}")
        else:
            if "\t" in line:
                raise LexiconError(f"{path}:{lineno}: dictionary line contains a tab: {raw!r}")
            form, count = line, 1
        form = normalize_form(form)
        if not form:
            raise LexiconError(f"{path}:{lineno}: empty form")
        entries[form] = entries.get(form, 0) + count

    if not entries:
        raise LexiconError(f"lexicon file {path} contains no entries")
    return ReferenceLexicon(name=name, kind=kind, entries=entries)


def contains(lexicon: ReferenceLexicon, word: str) -> bool:
    return lexicon.contains(word)


def levenshtein(a: str, b: str, cutoff: Optional[int] = None) -> int:
    """Raw Levenshtein distance. With ``cutoff`` set, any true distance
    above it is reported as ``cutoff + 1`` (band abandoned early); distances
    up to the cutoff are exact.
    """
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la > lb:
        a, b, la, lb = b, a, lb, la
    if la == 0:
        d = lb
        return d if cutoff is None or d <= cutoff else cutoff + 1
    if cutoff is not None and lb - la > cutoff:
        return cutoff + 1

    previous = list(range(la + 1))
    current = [0] * (la + 1)
    for j in range(1, lb + 1):
        current[0] = j
        cb = b[j - 1]
        row_min = current[0]
        for i in range(1, la + 1):
            cost = 0 if a[i - 1] == cb else 1
            val = min(previous[i] + 1, current[i - 1] + 1, previous[i - 1] + cost)
            current[i] = val
            if val < row_min:
                row_min = val
        if cutoff is not None and row_min > cutoff:
            return cutoff + 1
        previous, current = current, previous
    d = previous[la]
    if cutoff is not None and d > cutoff:
        return cutoff + 1
    return d


def normalized_levenshtein(a: str, b: str) -> float:
    """Levenshtein distance divided by max(len(a), len(b)), in [0, 1]."""
    if not a and not b:
        return 0.0
    return levenshtein(a, b) / max(len(a), len(b))


class EditDistanceIndex:
    """Length-bucketed dictionary index for exact min normalized distance.

    Forms whose length differs from the query by more than
    best * max(len, L) cannot beat the running best, so whole buckets are
    skipped without approximating the returned minimum.
    """

    def __init__(self, lexicon: ReferenceLexicon):
        self.source = lexicon.name
        self.buckets: Dict[int, List[str]] = {}
        for form in lexicon.forms():
            self.buckets.setdefault(len(form), []).append(form)
        for bucket in self.buckets.values():
            bucket.sort()
        self._lengths = sorted(self.buckets)

    def __len__(self) -> int:
        return sum(len(b) for b in self.buckets.values())

    def min_normalized_distance(self, word: str) -> Tuple[float, str]:
        """Exact minimum of normalized Levenshtein over all indexed forms,
        with the nearest form (ties broken lexicographically).
        """
        if not self._lengths:
            raise LexiconError("edit distance index is empty")
        word = normalize_form(word)
        lw = len(word)

        best = float("inf")
        best_form = ""
        # Nearest lengths first so the running best tightens quickly.
        for length in sorted(self._lengths, key=lambda m: (abs(m - lw), m)):
            gap = abs(length - lw)
            max_len = max(length, lw, 1)
            if gap / max_len > best:
                continue
            # Distances above floor(best * max_len) cannot tie or improve;
            # the epsilon absorbs float error in the product.
            cutoff = int(best * max_len + 1e-9) if best <= 1.0 else max_len
            for form in self.buckets[length]:
                d = levenshtein(word, form, cutoff=cutoff)
                if d > cutoff:
                    continue
                norm = d / max_len
                if norm < best or (norm == best and form < best_form):
                    best = norm
                    best_form = form
                    cutoff = int(best * max_len + 1e-9)
                    if best == 0.0:
                        return 0.0, best_form
        return best, best_form


def min_normalized_edit_distance(index: EditDistanceIndex, word: str) -> Tuple[float, str]:
    return index.min_normalized_distance(word)


def is_diacritic_variant(
    lexicon: ReferenceLexicon, fold: DiacriticFoldTable, word: str
) -> bool:
    """True iff the word folds onto some entry but is not itself an entry."""
    if lexicon.contains(word):
        return False
    return fold.fold(word) in lexicon.folded_forms(fold)


def adjacent_swaps(word: str) -> Iterable[str]:
    """All strings obtained by swapping one adjacent character pair."""
    for i in range(len(word) - 1):
        if word[i] == word[i + 1]:
            continue
        yield word[:i] + word[i + 1] + word[i] + word[i + 2 :]


def is_adjacent_swap_variant(lexicon: ReferenceLexicon, word: str) -> bool:
    """True iff exactly one adjacent-pair swap turns the word into an entry
    (and the word is not an entry itself).
    """
    word = normalize_form(word)
    if len(word) < 2 or lexicon.contains(word):
        return False
    return any(lexicon.contains(swapped) for swapped in adjacent_swaps(word))
