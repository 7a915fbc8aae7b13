"""Convert English number words to digits inside free text.

Handles compositional forms from "zero" up to
"nine hundred ninety nine thousand nine hundred ninety nine", including
hyphenated tens ("twenty-one"). Number-word runs are parsed strictly, so
"between one and five" stays two separate numbers ("and" is never consumed).
"""

from __future__ import annotations

import re

_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_NUMBER_WORDS = set(_UNITS) | set(_TEENS) | set(_TENS) | {"zero", "hundred", "thousand"}

_WORD_RE = re.compile(r"[A-Za-z]+")
_JOINER_RE = re.compile(r"[\s-]+")
_NUMERAL_RE = re.compile(r"\d+(?:\.\d+)?")


def _parse_below_hundred(words: list[str], i: int):
    if i >= len(words):
        return None
    w = words[i]
    if w in _TEENS:
        return _TEENS[w], i + 1
    if w in _TENS:
        value, j = _TENS[w], i + 1
        if j < len(words) and words[j] in _UNITS:
            value += _UNITS[words[j]]
            j += 1
        return value, j
    if w in _UNITS:
        return _UNITS[w], i + 1
    return None


def _parse_below_thousand(words: list[str], i: int):
    result = _parse_below_hundred(words, i)
    if result is None:
        return None
    value, j = result
    if value in range(1, 10) and j < len(words) and words[j] == "hundred":
        value *= 100
        j += 1
        rest = _parse_below_hundred(words, j)
        if rest is not None:
            value += rest[0]
            j = rest[1]
    return value, j


def _parse_number(words: list[str], i: int):
    if words[i] == "zero":
        return 0, i + 1
    result = _parse_below_thousand(words, i)
    if result is None:
        return None
    value, j = result
    if j < len(words) and words[j] == "thousand" and 1 <= value <= 999:
        value *= 1000
        j += 1
        rest = _parse_below_thousand(words, j)
        if rest is not None:
            value += rest[0]
            j = rest[1]
    return value, j


def convert_number_words(text: str) -> str:
    """Rewrite every maximal number-word run as digits, leaving the rest alone."""
    tokens = [(m.group(0).lower(), m.start(), m.end()) for m in _WORD_RE.finditer(text)]
    replacements: list[tuple[int, int, str]] = []
    i = 0
    while i < len(tokens):
        word = tokens[i][0]
        if word not in _NUMBER_WORDS or word in ("hundred", "thousand"):
            i += 1
            continue
        # Candidate run: consecutive number words separated only by spaces/hyphens.
        j = i
        while (
            j + 1 < len(tokens)
            and tokens[j + 1][0] in _NUMBER_WORDS
            and _JOINER_RE.fullmatch(text[tokens[j][2]:tokens[j + 1][1]])
        ):
            j += 1
        run = [t[0] for t in tokens[i:j + 1]]
        parsed = _parse_number(run, 0)
        if parsed is None:
            i += 1
            continue
        value, consumed = parsed
        start = tokens[i][1]
        end = tokens[i + consumed - 1][2]
        replacements.append((start, end, str(value)))
        i += consumed
    out: list[str] = []
    pos = 0
    for start, end, digits in replacements:
        out.append(text[pos:start])
        out.append(digits)
        pos = end
    out.append(text[pos:])
    return "".join(out)


def extract_numerals(text: str) -> list[str]:
    """Digits (after number-word conversion) in textual order, as written."""
    return [m.group(0) for m in _NUMERAL_RE.finditer(convert_number_words(text))]
