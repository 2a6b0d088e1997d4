"""Pure-Python kernel implementations.

These are the hot inner loops of the package: n-gram counting for the
metrics, adjacent-pair counting and merge replay for BPE, and the backoff
chain walk for language-model scoring.  A compiled twin of this module
lives in ``_speedups.pyx``; both expose identical signatures and must
produce identical results (see tests/test_kernels.py).
"""


def count_token_ngrams(tokens, max_order):
    """Count all token n-grams of order 1..max_order.

    Returns a dict mapping n-gram tuples to occurrence counts.
    """
    counts = {}
    num = len(tokens)
    for n in range(1, max_order + 1):
        for i in range(num - n + 1):
            gram = tuple(tokens[i:i + n])
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def count_char_ngrams(text, order):
    """Count character n-grams of exactly `order` in `text`."""
    counts = {}
    for i in range(len(text) - order + 1):
        gram = text[i:i + order]
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def count_adjacent_pairs(words, freqs):
    """Count adjacent symbol pairs over a vocabulary of symbol sequences.

    `words` is a list of symbol tuples, `freqs` the per-word corpus
    frequencies; each adjacent pair in a word contributes that word's
    frequency.
    """
    counts = {}
    for word, freq in zip(words, freqs):
        for i in range(len(word) - 1):
            pair = (word[i], word[i + 1])
            counts[pair] = counts.get(pair, 0) + freq
    return counts


def apply_merges(symbols, ranks):
    """Collapse a symbol sequence by replaying merges in rank order.

    At every step the adjacent pair with the lowest rank in `ranks` is
    merged (all its occurrences, left to right) until no adjacent pair has
    a rank.  Equivalent to replaying the full merge list in order, but only
    touches pairs actually present.
    """
    word = list(symbols)
    while len(word) > 1:
        best_rank = None
        best_pair = None
        for i in range(len(word) - 1):
            pair = (word[i], word[i + 1])
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = pair
        if best_pair is None:
            break
        first, second = best_pair
        merged = first + second
        out = []
        i = 0
        while i < len(word):
            if i < len(word) - 1 and word[i] == first and word[i + 1] == second:
                out.append(merged)
                i += 2
            else:
                out.append(word[i])
                i += 1
        word = out
    return word


def sequence_log2prob(seq, max_context, probs, bows):
    """Total log2 probability of positions 1..end of a padded sequence.

    `seq` must already carry the BOS sentinel at index 0, the EOS sentinel
    at the end, and OOV tokens replaced by the UNK sentinel.  `probs` maps
    (context_tuple, token) to log2 probabilities, `bows` maps context
    tuples to log2 backoff weights; contexts are shortened from the left
    until a match is found.
    """
    total = 0.0
    for j in range(1, len(seq)):
        token = seq[j]
        start = j - max_context
        if start < 0:
            start = 0
        context = tuple(seq[start:j])
        acc = 0.0
        while True:
            lp = probs.get((context, token))
            if lp is not None:
                total += acc + lp
                break
            if not context:
                raise KeyError(f"token not in model vocabulary: {token!r}")
            bow = bows.get(context)
            if bow is not None:
                acc += bow
            context = context[1:]
    return total
