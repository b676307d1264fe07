"""Independent count of the fixture corpus: sentences, (sentence, mwe)
occurrences and the word-length histogram of the idiom sentences.

usage: python3 bronze_counts.py > ../golden/bronze_counts.json
"""
import json
import pathlib
import re

HERE = pathlib.Path(__file__).resolve().parent.parent
ABBREV = {"Mr", "Mrs", "Ms", "Dr", "St", "Jr", "Sr", "Prof"}


def body(raw):
    lo = raw.lower()
    s = lo.find("*** start of")
    e = lo.find("*** end of", s)
    if s < 0 or e < 0:
        return raw.strip()
    s = raw.index("\n", s) + 1
    return raw[s:e].strip()


def sentences(text):
    text = " ".join(text.split())
    pieces = re.split(r'(?<=[.!?])(["”]?) (?=["“]?[A-Z])', text)
    out, cur = [], ""
    for i in range(0, len(pieces), 2):
        cur += pieces[i] + (pieces[i + 1] if i + 1 < len(pieces) else "")
        last = re.search(r"(\w+)\.$", cur)
        if last and (last.group(1) in ABBREV or re.fullmatch(r"[A-Z]", last.group(1))):
            cur += " "
            continue
        out.append(cur)
        cur = ""
    if cur.strip():
        out.append(cur.strip())
    return out


def main():
    lexicon = [json.loads(l) for l in (HERE / "lexicon.jsonl").read_text().splitlines() if l.strip()]
    n_sent, per_mwe, hist = 0, {}, {}
    for path in sorted((HERE / "corpus").iterdir()):
        for s in sentences(body(path.read_text())):
            n_sent += 1
            for entry in lexicon:
                hits = []
                for syn in entry["figurative_synonyms"]:
                    for m in re.finditer(r"(?<![^\W_])" + re.escape(syn) + r"(?![^\W_])", s, re.IGNORECASE):
                        hits.append((m.start(), -len(syn), m))
                if not hits:
                    continue
                _, _, m = min(hits, key=lambda h: h[:2])
                idiom = entry["mwe"]
                if m.group(0)[0].isupper():
                    idiom = idiom[0].upper() + idiom[1:]
                e = s[: m.start()] + idiom + s[m.end():]
                words = len(re.findall(r"[^\W_]+(?:'[^\W_]+)*", e))
                per_mwe[entry["mwe"]] = per_mwe.get(entry["mwe"], 0) + 1
                hist[str(words // 10)] = hist.get(str(words // 10), 0) + 1
    print(json.dumps({
        "sentences": n_sent,
        "triplets": sum(per_mwe.values()),
        "distinct_mwes": len(per_mwe),
        "per_mwe": dict(sorted(per_mwe.items())),
        "length_histogram": dict(sorted(hist.items(), key=lambda kv: int(kv[0]))),
    }, indent=2))


if __name__ == "__main__":
    main()
