"""Toy out-of-process embedding backend: letter counts plus a bias term.

With --ragged the vector length follows the text length, which the harness
must reject.
"""
import json
import sys

ragged = "--ragged" in sys.argv
for line in sys.stdin:
    req = json.loads(line)
    text = req["text"].lower()
    vec = [float(text.count(c)) for c in "abcdefghijklmnopqrstuvwxyz"] + [1.0]
    if ragged:
        vec = vec[: 2 + len(text) % 5]
    print(json.dumps({"id": req["id"], "vector": vec}), flush=True)
