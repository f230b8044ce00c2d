#!/usr/bin/env python3
"""Re-derive the gold pairs of a wiki page dump from scratch.

Usage: crosscheck_gold_fixture.py <pages.jsonl> <source-wiki> <target-wiki>

Prints one "source-iri<TAB>target-iri" line per surviving gold pair, sorted.
This deliberately shares no code with the kgbench package: the dump is parsed
with its own regexes and the link-section, redirect, functional and injective
rules are applied independently, so the two implementations check each other.
"""

import json
import re
import sys
from collections import Counter

HEADING = re.compile(r"^(={2,6})\s*(.*?)\s*\1\s*$", re.MULTILINE)
LINK = re.compile(r"\[\[(.*?)\]\]")


def canon(title):
    return " ".join(title.replace("_", " ").split())


def iri(wiki, title):
    return "http://kg.example.org/%s/resource/%s" % (wiki, canon(title).replace(" ", "_"))


def sections_of(record):
    if "sections" in record:
        return [(s["header"], s["body"]) for s in record["sections"]]
    text = record.get("text", "")
    # Body text runs from the end of one heading line to the start of the next.
    out = []
    matches = list(HEADING.finditer(text))
    lead = text[: matches[0].start()] if matches else text
    if lead.strip():
        out.append(("", lead))
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        out.append((m.group(2), text[m.end() : end]))
    return out


def main():
    if len(sys.argv) != 4:
        sys.exit(__doc__.strip().splitlines()[2])
    dump, src_wiki, tgt_wiki = sys.argv[1:4]

    redirects = {}
    candidates = []  # (source title, target title)
    with open(dump, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            wiki, title = rec["wiki"], canon(rec["title"])
            if rec.get("redirect_to") is not None:
                if wiki == tgt_wiki:
                    redirects[title] = canon(rec["redirect_to"])
                continue
            if wiki != src_wiki:
                continue
            for header, body in sections_of(rec):
                if "link" not in header.lower():
                    continue
                for token in LINK.findall(body):
                    target = token.split("|")[0].strip()
                    if ":" not in target:
                        continue
                    prefix, rest = target.split(":", 1)
                    if prefix.strip() == tgt_wiki and canon(rest):
                        candidates.append((title, canon(rest)))

    resolved = []
    for source, target in candidates:
        seen = set()
        while target in redirects:
            if target in seen or len(seen) >= 10:
                target = None  # cycle or runaway chain: drop the link
                break
            seen.add(target)
            target = redirects[target]
        if target is not None:
            resolved.append((source, target))

    pairs = set(resolved)
    out_degree = Counter(s for s, _ in pairs)
    functional = {(s, t) for s, t in pairs if out_degree[s] == 1}
    in_degree = Counter(t for _, t in functional)
    gold = {(s, t) for s, t in functional if in_degree[t] == 1}

    for source, target in sorted(gold):
        print("%s\t%s" % (iri(src_wiki, source), iri(tgt_wiki, target)))


if __name__ == "__main__":
    main()
