"""Independent hand-evaluation oracles for the scoring formulas.

These are deliberately naive, from-the-definition transcriptions, kept free
of any imports from the package so they can referee it.
"""

import math


def oracle_nrl(i, side, ap):
    if side == 0:
        return len([a for a in ap if a < i])
    return len([a for a in ap if a > i])


def oracle_rns(x, w, i, ap):
    return (x + 1) / ((oracle_nrl(i, 0, ap) + 1) * (w + 1))


def oracle_lns(z, y, i, ap):
    return (z + 1) / ((oracle_nrl(i, 1, ap) + 1) * (y + 1))


def oracle_index_score(x, w, z, y, f, g, i, ap):
    """None when the keyword never appeared at index i."""
    if f == 0:
        return None
    return abs(oracle_rns(x, w, i, ap) - oracle_lns(z, y, i, ap)) / (g + 1) * math.log10(f + 1)


def oracle_neighbor_values(i, ap):
    """(lower_distance, lower_agg, upper_distance, upper_agg) with virtual boundaries."""
    lowers = sorted(a for a in ap if a < i)
    uppers = sorted(a for a in ap if a > i)
    if lowers:
        x, w = i - lowers[-1], ap.count(lowers[-1])
    else:
        x, w = i, 0
    if uppers:
        z, y = uppers[0] - i, ap.count(uppers[0])
    else:
        z, y = 11 - i, 0
    return x, w, z, y


def oracle_cs(i, j, v_l):
    return 1 - abs(i - j) / v_l


def oracle_ps(d_s, g_m):
    if d_s <= 0:
        return 0.5
    return 1 / (1 + math.exp(-(math.log2(d_s) * g_m)))


def oracle_couplet_count(ik_sizes):
    return math.ceil(sum(ik_sizes) / 10)


def oracle_rkn(c, rsv, lsv):
    return (c * rsv) + (c * lsv)


def oracle_sf(f, t, b):
    return (4 * f + 3 * t + 2 * b) / 10


def oracle_place_keywords(keywords, freq_of, literal_upper=False):
    """Replay of the full greedy placement chain. freq_of(index, word) -> int."""
    ap = []
    for kw in keywords:
        scores = {}
        for i in range(1, 11):
            f = freq_of(i, kw)
            x, w, z, y = oracle_neighbor_values(i, ap)
            g = ap.count(i)
            if literal_upper:
                z = x
            s = oracle_index_score(x, w, z, y, f, g, i, ap)
            if s is not None:
                scores[i] = s
        if not scores:
            return None  # unplaceable
        best_score = max(scores.values())
        ap.append(min(i for i in scores if scores[i] == best_score))
    return ap


def oracle_bleu1(cand, ref):
    matches = 0
    seen = {}
    for tok in cand:
        seen[tok] = seen.get(tok, 0) + 1
    for tok, count in seen.items():
        matches += min(count, ref.count(tok))
    precision = matches / len(cand)
    bp = 1.0 if len(cand) >= len(ref) else math.exp(1 - len(ref) / len(cand))
    return bp * precision


def oracle_lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]
