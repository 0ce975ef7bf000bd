#!/usr/bin/env python3
"""Regenerate the tokenizer conformance fixture.

Builds a multilingual corpus from the CLDR locale tables shipped with
@angular/common plus a handful of hand-written lines, then records the
token sequence produced by the reference BERT tokenizer (the pure-Python
BasicTokenizer + WordpieceTokenizer pair from `transformers`) for every line.
The fast `tokenizers` BertWordPiece pipeline is run as a cross-check and any
disagreement is printed, but the Python reference is what gets frozen.

Usage:
    python3 scripts/make_tokenizer_fixture.py \
        --vocab crates/core/tests/data/bert-base-uncased-vocab.txt \
        --locales /usr/lib/node_modules/@angular/common/locales \
        --out crates/core/tests/data
"""

import argparse
import glob
import json
import os
import re

from transformers.models.bert.tokenization_bert_legacy import (
    BasicTokenizer,
    WordpieceTokenizer,
    load_vocab,
)

STRING_RE = re.compile(r'"((?:[^"\\\n]|\\.)*)"')

HANDWRITTEN = [
    "Hello, world!",
    "state-of-the-art models don't always win.",
    "The unaffable CAFÉ owner said: \"¡Qué día!\"",
    "Ünïcödé àccents are stripped before WordPiece; naïve façade rôle.",
    "東京タワーは高い。北京欢迎你！서울은 아름답다.",
    "Numbers like 3.14159, 1,000,000 and 42nd street.",
    "Emails: someone@example.com, URLs: https://example.org/a?b=c&d=e",
    "tabs\tand   multiple    spaces\tcollapse",
    "zero\u200bwidth\u200djoiners and soft\u00adhyphens vanish\u0007 bell \u00a0nbsp",
    "combining: e\u0301 n\u0303 a\u0308 \u0301lone mark",
    "Ελληνικά: ΣΟΦΟΣ σοφός Οδυσσεύς",
    "Русский текст с пунктуацией — и тире.",
    "עברית וערבית: مرحبا بالعالم",
    "हिन्दी पाठ और বাংলা লেখা",
    "ＦＵＬＬＷＩＤＴＨ ｌｅｔｔｅｒｓ and ｄｉｇｉｔｓ １２３",
    "a" * 100,
    "b" * 101,
    "Supercalifragilisticexpialidocious antidisestablishmentarianism",
    "emoji 🙂👍 and symbols ©®™ ∑ ∞ ≠ ≤",
    "İstanbul ŞEHİR ığdır",
    "Straße GROẞ ǅemal ǈ ǋ",
    "\u00e9 vs e\u0301 and \u00f1 vs n\u0303 \u212b \u2126 \uf900\ufa10 \ue000 private",
    "quotes ‘single’ “double” «guillemets» „low“",
    "ellipsis… dash – em—dash ¿inverted? ¡bang!",
    "",
    "   ",
    "I.B.M. U.S.A. e.g. i.e. etc.",
    "C++ & C# are languages; so is F#.",
    "the quick brown fox jumps over the lazy dog",
    "THE QUICK BROWN FOX JUMPS OVER THE LAZY DOG",
]


def locale_lines(locale_dir):
    lines = []
    for path in sorted(glob.glob(os.path.join(locale_dir, "*.js"))):
        with open(path, encoding="utf-8") as f:
            src = f.read()
        start = src.find("export default")
        if start < 0:
            continue
        strings = []
        for m in STRING_RE.finditer(src[start:]):
            try:
                s = json.loads('"' + m.group(1) + '"')
            except json.JSONDecodeError:
                continue
            if "\n" in s or "\r" in s or "[" in s and "]" in s:
                continue
            strings.append(s)
        for i in range(0, len(strings), 24):
            chunk = strings[i : i + 24]
            if chunk:
                lines.append(" ".join(chunk))
    return lines


def reference(basic, wordpiece, vocab, line):
    toks = []
    for word in basic.tokenize(line):
        toks.extend(wordpiece.tokenize(word))
    return toks, [vocab[t] for t in toks]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vocab", required=True)
    ap.add_argument("--locales", required=True)
    ap.add_argument("--spanish", default=None)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    vocab = load_vocab(args.vocab)
    basic = BasicTokenizer(do_lower_case=True, tokenize_chinese_chars=True)
    wordpiece = WordpieceTokenizer(vocab=vocab, unk_token="[UNK]")

    corpus = list(HANDWRITTEN)
    if args.spanish:
        with open(args.spanish, encoding="utf-8") as f:
            corpus.extend(l.rstrip("\n") for l in f)
    corpus.extend(locale_lines(args.locales))

    fast = None
    try:
        from tokenizers import BertWordPieceTokenizer

        fast = BertWordPieceTokenizer(args.vocab, lowercase=True, strip_accents=None)
    except Exception as exc:  # pragma: no cover
        print("fast tokenizer unavailable:", exc)

    disagreements = 0
    with open(os.path.join(args.out, "multilingual_corpus.txt"), "w", encoding="utf-8", newline="\n") as c, open(
        os.path.join(args.out, "multilingual_reference.tsv"), "w", encoding="utf-8", newline="\n"
    ) as e:
        for line in corpus:
            toks, ids = reference(basic, wordpiece, vocab, line)
            c.write(line + "\n")
            e.write(" ".join(toks) + "\t" + " ".join(map(str, ids)) + "\n")
            if fast is not None:
                enc = fast.encode(line, add_special_tokens=False)
                if enc.tokens != toks:
                    disagreements += 1
    print(f"{len(corpus)} lines written; fast/python disagreements: {disagreements}")


if __name__ == "__main__":
    main()
