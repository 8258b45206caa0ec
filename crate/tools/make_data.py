#!/usr/bin/env python3
"""Regenerates the bundled data files under data/ and the reference codec
vectors under crates/core/tests/fixtures/.

Requires: wordfreq, pypinyin, pywubi, jellyfish (reference vectors only).
Output is deterministic for fixed package versions.
"""
import os
import random
import sys

from wordfreq import top_n_list

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")
FIXTURES = os.path.join(ROOT, "crates", "core", "tests", "fixtures")

TABLE_CHARS = "笑校孝效氏事市视"


def english_words(n):
    out = []
    for w in top_n_list("en", 40000):
        if w.isascii() and w.isalpha() and (len(w) >= 2 or w in ("a", "i")):
            out.append(w)
        if len(out) == n:
            break
    return out


def chinese_chars(limit):
    seen = []
    have = set()
    for ch in TABLE_CHARS:
        seen.append(ch)
        have.add(ch)
    for w in top_n_list("zh", 60000):
        for ch in w:
            if "一" <= ch <= "鿿" and ch not in have:
                have.add(ch)
                seen.append(ch)
        if len(seen) >= limit:
            break
    return seen[:limit]


def write_tables(chars):
    from pypinyin import Style, pinyin
    from pywubi.loader import lookup

    with open(os.path.join(DATA, "pinyin.tsv"), "w", encoding="utf-8") as f:
        f.write("# character<TAB>pinyin with tone digit (5 = neutral); first line per character is the default\n")
        for ch in chars:
            readings = pinyin(ch, style=Style.TONE3, heteronym=True, neutral_tone_with_five=True)[0]
            for r in readings:
                if r and r[-1] in "12345":
                    f.write(f"{ch}\t{r}\n")
    with open(os.path.join(DATA, "wubi.tsv"), "w", encoding="utf-8") as f:
        f.write("# character<TAB>wubi 86 keystrokes; first line per character is the full code\n")
        for ch in chars:
            for code in lookup(ch):
                f.write(f"{ch}\t{code}\n")


def zipf_choice(rng, items, s=1.0):
    weights = [1.0 / (k + 1) ** s for k in range(len(items))]
    return rng.choices(items, weights=weights, k=1)[0]


def desk_corpus(words, n_sentences=10000, topics=25, seed=20200101):
    rng = random.Random(seed)
    function_words = words[:100]
    content = words[100:1600]
    by_topic = [[] for _ in range(topics)]
    for w in content:
        by_topic[rng.randrange(topics)].append(w)
    fw_weights = [1.0 / (k + 1) for k in range(len(function_words))]
    topic_weights = [[1.0 / (k + 1) ** 0.7 for k in range(len(t))] for t in by_topic]
    lines = []
    for _ in range(n_sentences):
        t = rng.randrange(topics)
        length = rng.randint(8, 16)
        toks = []
        for _ in range(length):
            u = rng.random()
            if u < 0.35:
                toks.append(rng.choices(function_words, weights=fw_weights, k=1)[0])
            else:
                tt = t if u < 0.92 else rng.randrange(topics)
                toks.append(rng.choices(by_topic[tt], weights=topic_weights[tt], k=1)[0])
        lines.append(" ".join(toks))
    return lines


def reference_vectors(words):
    import jellyfish

    names = [
        "Robert", "Rupert", "Rubin", "Ashcraft", "Ashcroft", "Tymczak", "Pfister",
        "Jackson", "Washington", "Lee", "Gutierrez", "Honeyman", "Knight",
        "Macintosh", "Schmidt", "Philips", "Kessler", "Schoenberg", "Wright",
        "Thompson", "Lloyd", "Xavier", "Ghislaine", "Gnome", "Aeon", "Pneumatic",
    ]
    sample = names + words[:60] + words[200:5000:40]
    with open(os.path.join(FIXTURES, "codec_vectors.tsv"), "w", encoding="utf-8") as f:
        f.write(f"# word\tsoundex\tnysiis\tmetaphone  (reference: jellyfish 1.2.1)\n")
        for w in sample:
            f.write(f"{w}\t{jellyfish.soundex(w)}\t{jellyfish.nysiis(w)}\t{jellyfish.metaphone(w)}\n")


def main():
    os.makedirs(DATA, exist_ok=True)
    os.makedirs(FIXTURES, exist_ok=True)
    words = english_words(5000)
    with open(os.path.join(DATA, "en_vocab_5k.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(words) + "\n")
    write_tables(chinese_chars(6000))
    with open(os.path.join(DATA, "desk.en.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(desk_corpus(words)) + "\n")
    if "--no-vectors" not in sys.argv:
        reference_vectors(words)


if __name__ == "__main__":
    main()
