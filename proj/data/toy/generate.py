#!/usr/bin/env python3
# Copyright (c) 2026 The protfit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the toy dataset: a site-independent landscape over a 48-residue
wild type, a training corpus and an alignment sampled from it, a mutant list,
two assays and their reference metadata.

Outputs are checked in; rerunning reproduces them byte for byte.
"""

import math
import os
import random

AA = "ACDEFGHIKLMNPQRSTVWY"
HERE = os.path.dirname(os.path.abspath(__file__))
LENGTH = 48


def softmax(row):
    m = max(row)
    e = [math.exp(x - m) for x in row]
    z = sum(e)
    return [x / z for x in e]


def draw(rng, probs):
    u = rng.random()
    for a, p in enumerate(probs):
        u -= p
        if u < 0:
            return AA[a]
    return AA[-1]


def write(name, text):
    with open(os.path.join(HERE, name), "w", newline="\n") as f:
        f.write(text)


def main():
    rng = random.Random(20260401)
    logits = [[rng.gauss(0.0, 1.5) for _ in AA] for _ in range(LENGTH)]
    wt = "".join(AA[max(range(20), key=lambda a: row[a])] for row in logits)
    probs = [softmax(row) for row in logits]

    def effect(code):
        total = 0.0
        for part in code.split(":"):
            i = int(part[1:-1]) - 1
            total += logits[i][AA.index(part[-1])] - logits[i][AA.index(part[0])]
        return total

    write("wild_type.fasta", ">TOYA_HUMAN toy wild type\n" + wt + "\n")

    corpus = []
    for k in range(240):
        corpus.append((f"toy{k:03d}", "".join(draw(rng, p) for p in probs)))
    s = list(corpus[7][1])
    s[11] = "X"
    corpus[7] = (corpus[7][0], "".join(s))
    s = list(corpus[19][1])
    s[30] = "B"
    corpus[19] = (corpus[19][0], "".join(s))
    corpus.append(("toy_selenocysteine", wt[:20] + "U" + wt[21:]))
    corpus.append(("toy_fragment", wt[:12]))
    write("corpus.fasta", "".join(f">{i}\n{r}\n" for i, r in corpus))

    rows = [">TOYA_HUMAN/1-48\n" + wt + "\n"]
    for k in range(119):
        chars = []
        for i, p in enumerate(probs):
            u = rng.random()
            if i < 4 and k % 3 == 0:
                chars.append("-")
            elif u < 0.04:
                chars.append("-")
            else:
                chars.append(draw(rng, p))
            if i == 24 and k % 10 == 0:
                chars.append("gk")
        rows.append(f">hom{k:03d}\n" + "".join(chars) + "\n")
    write("alignment.a2m", "".join(rows))

    singles = [f"{wt[i]}{i + 1}{a}" for i in range(4, 14) for a in AA if a != wt[i]]
    doubles = []
    while len(doubles) < 12:
        i, j = sorted(rng.sample(range(4, 14), 2))
        a = rng.choice([x for x in AA if x != wt[i]])
        b = rng.choice([x for x in AA if x != wt[j]])
        code = f"{wt[i]}{i + 1}{a}:{wt[j]}{j + 1}{b}"
        if code not in doubles:
            doubles.append(code)
    indels = ["del20-21", "ins30:GA"]
    write("mutants.csv", "mutant\n" + "".join(c + "\n" for c in singles + doubles + indels))

    assay1 = []
    for code in singles + doubles:
        assay1.append((code, effect(code) + rng.gauss(0.0, 0.4)))
    assay1.append((f"{wt[4]}5{wt[4]}", 0.0))
    assay1.append((singles[3], assay1[3][1] + 0.1))
    assay1.append((singles[8], None))
    lines = ["mutant,DMS_score\n"]
    for code, v in assay1:
        lines.append(f"{code},{'NA' if v is None else format(v, '.6f')}\n")
    write("assays/TOY1.csv", "".join(lines))
    write("assays/TOY1.fasta", ">TOYA_HUMAN\n" + wt + "\n")

    lines = ["mutant,DMS_score,target_seq\n"]
    for code in singles[:95]:
        lines.append(f"{code},{effect(code) + rng.gauss(0.0, 0.8):.6f},{wt}\n")
    write("assays/TOY2.csv", "".join(lines))

    write(
        "reference.csv",
        "assay_id,uniprot_id,cutoff,cutoff_method,msa_depth_bucket,mutation_depth_bucket,taxon\n"
        "TOY1,TOYA_HUMAN,,median,medium,multiple,human\n"
        "TOY2,TOYA_HUMAN,-1.5,manual,medium,single,human\n",
    )


if __name__ == "__main__":
    os.makedirs(os.path.join(HERE, "assays"), exist_ok=True)
    main()
