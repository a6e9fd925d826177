"""Independent reference computations for frozen test values.

Nothing here imports the package: the PRNG stream, the draw procedures and
the tau-b pair count are written out longhand so they can check the library
rather than mirror it.
"""

import math

M64 = (1 << 64) - 1


def splitmix_stream(seed):
    state = seed
    while True:
        state = (state + 0x9E3779B97F4A7C15) & M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        yield z ^ (z >> 31)


def draw_below(stream, n):
    reject_under = (2**64) % n
    for x in stream:
        if x >= reject_under:
            return x % n


def draw_unit(stream):
    return (next(stream) >> 11) / 2.0**53


def fisher_yates(stream, n):
    a = list(range(n))
    for i in reversed(range(1, n)):
        j = draw_below(stream, i + 1)
        a[i], a[j] = a[j], a[i]
    return a


def typo_replay(words, degree, seed):
    """Which word indices get which swap, for space-separated ``words``."""
    def sites(w):
        return [p for p in range(len(w) - 1) if w[p] != w[p + 1]]

    eligible = [i for i, w in enumerate(words) if any(c.isalpha() for c in w) and sites(w)]
    k = math.floor(degree * len(eligible) + 0.5)
    stream = splitmix_stream(seed)
    pool = list(range(len(eligible)))
    picks = []
    for i in range(k):
        j = i + draw_below(stream, len(eligible) - i)
        pool[i], pool[j] = pool[j], pool[i]
        picks.append(pool[i])
    out = list(words)
    for pick in picks:
        idx = eligible[pick]
        w = words[idx]
        s = sites(w)
        p = s[draw_below(stream, len(s))]
        out[idx] = w[:p] + w[p + 1] + w[p] + w[p + 2:]
    return out


def jumble_replay(words, degree, seed):
    m = len(words)
    span = max(2, math.floor(degree * m + 0.5))
    stream = splitmix_stream(seed)
    out = []
    for start in range(0, m, span):
        chunk = words[start:start + span]
        if len(chunk) >= 2:
            chunk = [chunk[j] for j in fisher_yates(stream, len(chunk))]
        out.extend(chunk)
    return out


def antonym_replay(words, lexicon, degree, seed):
    stream = splitmix_stream(seed)
    out = list(words)
    for i, w in enumerate(words):
        if w.lower() in lexicon:
            if draw_unit(stream) < degree:
                out[i] = lexicon[w.lower()]
    return out


def tau_b_bruteforce(xs, ys):
    n = len(xs)
    c = d = tx = ty = 0
    for a in range(n):
        for b in range(a + 1, n):
            dx = xs[a] - xs[b]
            dy = ys[a] - ys[b]
            if dx == 0:
                tx += 1
            if dy == 0:
                ty += 1
            if dx * dy > 0:
                c += 1
            elif dx * dy < 0:
                d += 1
    p = n * (n - 1) // 2
    return (c - d) / math.sqrt((p - tx) * (p - ty))
