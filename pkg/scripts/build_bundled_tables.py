"""Regenerate the small tables shipped in src/hanfuse/data.

Inputs (none of them are runtime dependencies of the package):

  * the Wubi-86 JSON dictionary from the ``pywubi`` wheel (MIT)
  * ``pypinyin`` for readings (MIT)
  * jieba's ``dict.txt`` word-frequency list (MIT), used both to rank
    characters by frequency and to derive static character vectors by
    PPMI + truncated SVD over within-word co-occurrence

Usage:
    python scripts/build_bundled_tables.py --wubi-json wubi_86.json \
        --jieba-dict dict.txt --out src/hanfuse/data
"""

import argparse
import json
import math
import os
from collections import Counter, defaultdict

import numpy as np
from pypinyin import Style, pinyin

from hanfuse import phonetics

# Phono-semantic families: members share a component and usually a rhyme,
# which gives the glyph and phonetic spaces real neighbors inside a small table.
FAMILIES = [
    "甫浦傅捕铺辅哺埔圃",
    "乔桥侨娇骄轿",
    "青清情晴请精静睛",
    "包抱跑泡炮饱胞苞",
    "方放房访防芳纺仿",
    "马妈吗骂码玛",
    "巴把爸吧爬疤芭",
    "工江红功攻空贡扛",
    "生性姓星胜牲笙",
    "中钟种忠肿仲",
    "皮坡波破披疲被",
    "令领冷铃零岭龄玲",
    "羊洋样祥详氧",
    "每海梅敏悔霉",
    "林淋琳霖彬",
    "华哗桦骅",
    "安按案鞍氨",
    "长张涨帐账胀",
    "东冻栋陈",
    "京景凉惊鲸",
    "山仙岩峰",
    "明朗湖州",
    "草早曹糟遭槽",
    "大太天夫",
]
EXTRA = "上北南西国城市区路街河港京沪津宁广福建兴龙凤金银李王刘赵周吴郑冯陈孙朱胡高何罗郭梁宋唐许韩"


def canonical_readings(ch, finals):
    out = []
    for syl in pinyin(ch, style=Style.TONE3, heteronym=True, neutral_tone_with_five=True)[0]:
        syl = syl[:-1] + "0" if syl.endswith("5") else syl
        if not syl[-1:].isdigit():
            continue
        try:
            phonetics.parse_syllable(syl, finals)
        except Exception:
            continue
        if syl not in out:
            out.append(syl)
    return out[:3]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wubi-json", required=True)
    ap.add_argument("--jieba-dict", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--size", type=int, default=500)
    ap.add_argument("--dim", type=int, default=32)
    args = ap.parse_args()

    finals = phonetics.default_final_map()
    with open(args.wubi_json, encoding="utf-8") as fh:
        wubi = {k: v[0] for k, v in json.load(fh).items() if len(k) == 1 and 0x4E00 <= ord(k) <= 0x9FFF}

    words = []
    char_freq = Counter()
    with open(args.jieba_dict, encoding="utf-8") as fh:
        for line in fh:
            w, f, _ = line.split(" ")
            f = int(f)
            if all(c in wubi for c in w):
                words.append((w, f))
                for c in w:
                    char_freq[c] += f

    readings = {}

    def usable(c):
        if c not in wubi or c not in char_freq:
            return False
        if c not in readings:
            readings[c] = canonical_readings(c, finals)
        return bool(readings[c])

    chosen = []
    for group in FAMILIES + [EXTRA]:
        for c in group:
            if c not in chosen and usable(c):
                chosen.append(c)
    for c, _ in char_freq.most_common():
        if len(chosen) >= args.size:
            break
        if c not in chosen and usable(c):
            chosen.append(c)
    chosen.sort()

    # character vectors from within-word co-occurrence, contexts = top 3000 chars
    contexts = [c for c, _ in char_freq.most_common(3000)]
    cidx = {c: i for i, c in enumerate(contexts)}
    tidx = {c: i for i, c in enumerate(chosen)}
    counts = np.zeros((len(chosen), len(contexts)))
    for w, f in words:
        if len(w) < 2:
            continue
        weight = math.log1p(f)
        for i, a in enumerate(w):
            if a not in tidx:
                continue
            for j, b in enumerate(w):
                if i != j and b in cidx:
                    counts[tidx[a], cidx[b]] += weight
    total = counts.sum()
    row = counts.sum(1, keepdims=True)
    col = counts.sum(0, keepdims=True) ** 0.75
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.log(counts * col.sum() / (row * col))
    ppmi = np.where(np.isfinite(pmi) & (pmi > 0), pmi, 0.0)
    u, s, _ = np.linalg.svd(ppmi, full_matrices=False)
    vecs = u[:, : args.dim] * np.sqrt(s[: args.dim])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    covered = (row[:, 0] > 0) & (norms[:, 0] > 0)
    vecs = np.where(norms > 0, vecs / np.maximum(norms, 1e-12), 0.0)
    del total

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "wubi.tsv"), "w", encoding="utf-8") as fh:
        fh.write("# Wubi-86 full codes (source: pywubi, MIT)\n")
        for c in chosen:
            fh.write(f"{c}\t{wubi[c]}\n")
    with open(os.path.join(args.out, "pinyin.tsv"), "w", encoding="utf-8") as fh:
        fh.write("# numbered-tone pinyin, first reading canonical (source: pypinyin, MIT)\n")
        for c in chosen:
            fh.write(f"{c}\t{','.join(readings[c])}\n")
    rows = [(c, vecs[i]) for i, c in enumerate(chosen) if covered[i]]
    with open(os.path.join(args.out, "vectors.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"{len(rows)} {args.dim}\n")
        for c, v in rows:
            fh.write(c + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
    print(f"{len(chosen)} characters, {len(rows)} with vectors")


if __name__ == "__main__":
    main()
