"""Regenerate snowball_pt_vocabulary.tsv.

Needs the `snowballstemmer` and `pyspellchecker` wheels on PYTHONPATH. The
word list is the most frequent purely alphabetic entries of the
pyspellchecker Portuguese frequency dictionary; stems come from the
Snowball-generated Python stemmer.
"""
import gzip
import json
import re
import sys

import snowballstemmer
import spellchecker

LIMIT = int(sys.argv[1]) if len(sys.argv) > 1 else 30000

path = spellchecker.__path__[0] + "/resources/pt.json.gz"
freq = json.load(gzip.open(path))
word_re = re.compile(r"^[a-zà-ÿç]+$")
words = [w for w, _ in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0])) if word_re.match(w)]
words = sorted(words[:LIMIT])
stemmer = snowballstemmer.stemmer("portuguese")
for w in words:
    print(f"{w}\t{stemmer.stemWord(w)}")
