#!/usr/bin/env python3
"""Independent derivation of the expected corpus-builder outputs.

Re-implements, from scratch and in a different language, everything the
corpus builder is documented to do with the fixture episodes in this
directory:

  * SRT parsing (blocks sorted by start time, `NAME:` speaker prefixes,
    multi-line captions joined with spaces),
  * laughter alignment (an utterance is a punchline when a merged laughter
    span starts within one second after it ends, boundary inclusive),
  * laughter trimming (sample i of an utterance is dropped when
    start_s + i/rate falls inside a merged span, half-open),
  * the seeded per-season 80/10/10 episode split (SplitMix64 stream,
    Fisher-Yates shuffle, dev/test/train in shuffle order),
  * the on-disk layout written by the builder (manifest.tsv and one
    records TSV per episode).

Running it regenerates expected/ next to the fixtures:

    python3 derive_expected.py

The acceptance test then compares the builder's actual output against these
files byte for byte. Audio payloads are summarized as sample counts in
expected/audio_counts.tsv (the synthesized track is deterministic, so byte
reproducibility of the WAVs themselves is checked run-against-run instead).
"""

import math
import os
import re
import sys

RATE = 8000
SHOW = "laughtrack"
SEASON = 1
EPISODES = range(1, 11)
SPLIT_SEED = 2024

# --- deterministic RNG (SplitMix64), bit-compatible with the library ---------

MASK = (1 << 64) - 1


class Rng:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return (z ^ (z >> 31)) & MASK

    def next_below(self, n):
        return self.next_u64() % n


def fisher_yates(items, rng):
    for i in range(len(items), 1, -1):
        j = rng.next_below(i)
        items[i - 1], items[j] = items[j], items[i - 1]


def rng_self_check():
    assert Rng(42).next_u64() == 0xBDD732262FEB6E95, "SplitMix64 mismatch"
    perm = list(range(10))
    fisher_yates(perm, Rng(123))
    assert perm == [7, 3, 4, 9, 8, 2, 1, 0, 6, 5], "shuffle mismatch"


# --- helpers mirroring the documented numeric conventions ---------------------


def llround(x):
    # round half away from zero; all fixture values are non-negative
    assert x >= 0.0
    return int(math.floor(x + 0.5))


def fmt_time(t):
    return f"{t:.6f}"


def sanitize(s):
    return s.replace("\t", " ").replace("\n", " ").replace("\r", " ")


# --- SRT ----------------------------------------------------------------------

TS = re.compile(r"^(\d+):(\d+):(\d+),(\d+)$")


def parse_timestamp(s):
    m = TS.match(s)
    assert m, f"bad timestamp {s!r}"
    h, mi, sec, ms = (int(g) for g in m.groups())
    return h * 3600.0 + mi * 60.0 + sec + ms / 1000.0


def split_speaker(text):
    colon = text.find(":")
    if colon <= 0:
        return None, text
    has_upper = False
    for c in text[:colon]:
        if c.isupper():
            has_upper = True
        elif c.islower():
            return None, text
        elif not (c.isdigit() or c in " ._'-"):
            return None, text
    if not has_upper:
        return None, text
    speaker = text[:colon].rstrip(" ")
    rest = text[colon + 1 :].lstrip(" ")
    return speaker, rest


def parse_srt(path):
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.rstrip("\r\n") for ln in f]
    caps = []
    at = 0
    while at < len(lines):
        while at < len(lines) and lines[at].strip() == "":
            at += 1
        if at >= len(lines):
            break
        at += 1  # index line (unused: utterances are renumbered after sorting)
        start_txt, end_txt = lines[at].split(" --> ")
        start, end = parse_timestamp(start_txt), parse_timestamp(end_txt)
        assert end > start
        at += 1
        text_lines = []
        while at < len(lines) and lines[at].strip() != "":
            text_lines.append(lines[at])
            at += 1
        text = " ".join(text_lines)
        speaker, rest = split_speaker(text)
        caps.append({"start": start, "end": end, "speaker": speaker or "", "text": rest})
    caps.sort(key=lambda c: c["start"])  # stable
    return caps


# --- laughter ------------------------------------------------------------------


def load_laughs(path):
    spans = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                a, b = line.split(",")
                spans.append((float(a), float(b)))
            except ValueError:
                assert line_no == 1, f"bad laugh row {line!r}"
    return spans


def merge_spans(spans):
    spans = sorted(spans)
    merged = []
    for s, e in spans:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [(s, e) for s, e in merged]


# --- per-episode derivation ------------------------------------------------------


def derive_episode(ep):
    stem = f"{SHOW}_s{SEASON:02d}e{ep:02d}"
    caps = parse_srt(f"s{SEASON:02d}e{ep:02d}.srt")
    laughs = merge_spans(load_laughs(f"s{SEASON:02d}e{ep:02d}.laughs.csv"))
    last_end = max(c["end"] for c in caps)
    track_n = llround((last_end + 2.0) * RATE)

    utts = []
    for idx, c in enumerate(caps):
        lo = min(max(llround(c["start"] * RATE), 0), track_n)
        hi = min(max(llround(c["end"] * RATE), lo), track_n)
        kept = 0
        for i in range(hi - lo):
            t = c["start"] + i / float(RATE)
            if not any(s <= t < e for s, e in laughs):
                kept += 1
        punch = any(s > c["end"] and s <= c["end"] + 1.0 for s, e in laughs)
        utts.append(
            {
                "index": idx,
                "start": c["start"],
                "end": c["end"],
                "speaker": c["speaker"],
                "text": c["text"],
                "punch": punch,
                "samples": kept,
            }
        )
    return stem, utts


def records_text(stem, utts):
    out = ["index\tstart_s\tend_s\tspeaker\ttext\tis_punchline\taudio_path"]
    for u in utts:
        audio_path = f"audio/{stem}_{u['index']:04d}.wav" if u["samples"] > 0 else ""
        out.append(
            "\t".join(
                [
                    str(u["index"]),
                    fmt_time(u["start"]),
                    fmt_time(u["end"]),
                    sanitize(u["speaker"]),
                    sanitize(u["text"]),
                    "1" if u["punch"] else "0",
                    audio_path,
                ]
            )
        )
    return "\n".join(out) + "\n"


def main():
    rng_self_check()
    os.chdir(os.path.dirname(os.path.abspath(__file__)))
    os.makedirs("expected", exist_ok=True)

    derived = {}  # episode -> (stem, utts)
    for ep in EPISODES:
        stem, utts = derive_episode(ep)
        derived[ep] = (stem, utts)
        with open(f"expected/{stem}.tsv", "w", encoding="utf-8", newline="") as f:
            f.write(records_text(stem, utts))

    # One show, one season, ten episodes: a single shuffle group. dev and
    # test take the first two shuffled slots, train keeps the rest in
    # shuffle order.
    order = list(EPISODES)
    rng = Rng(SPLIT_SEED)
    fisher_yates(order, rng)
    dev, test, train = order[:1], order[1:2], order[2:]

    manifest = ["split\tshow\tseason\tepisode\trecords_file"]
    for name, eps in (("train", train), ("dev", dev), ("test", test)):
        for ep in eps:
            stem = derived[ep][0]
            manifest.append(f"{name}\t{SHOW}\t{SEASON}\t{ep}\t{stem}.tsv")
    with open("expected/manifest.tsv", "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(manifest) + "\n")

    counts = ["records_file\tindex\tsamples\tusable"]
    for ep in EPISODES:
        stem, utts = derived[ep]
        for u in utts:
            usable = 1 if u["samples"] > 0 else 0
            counts.append(f"{stem}.tsv\t{u['index']}\t{u['samples']}\t{usable}")
    with open("expected/audio_counts.tsv", "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(counts) + "\n")

    print(f"wrote expected/ for {len(derived)} episodes "
          f"(train={train} dev={dev} test={test})", file=sys.stderr)


if __name__ == "__main__":
    main()
