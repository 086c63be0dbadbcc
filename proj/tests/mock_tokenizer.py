#!/usr/bin/env python3
"""Whitespace tokenizer speaking the line-JSON tokenizer protocol.

stdin:  {"text": str}
stdout: {"tokens": [{"surface": str, "normalized": str, "pos": str}]}

Tokens ending in '/x' are tagged OTHER, everything else NOUN, so tests can
exercise POS filtering through the subprocess path.
"""
import json
import sys

for line in sys.stdin:
    line = line.strip()
    if not line:
        continue
    req = json.loads(line)
    tokens = []
    for raw in req.get("text", "").split():
        if raw.endswith("/x"):
            tokens.append({"surface": raw[:-2], "normalized": raw[:-2], "pos": "OTHER"})
        else:
            tokens.append({"surface": raw, "normalized": raw.lower(), "pos": "NOUN"})
    sys.stdout.write(json.dumps({"tokens": tokens}, ensure_ascii=False) + "\n")
    sys.stdout.flush()
