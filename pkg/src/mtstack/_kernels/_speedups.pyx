# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel implementations.

Signature-for-signature twin of ``_pyimpl``; see that module for the
contracts.  Keep the two in lockstep: tests/test_kernels.py checks them
against each other on randomised inputs.
"""


def count_token_ngrams(list tokens, int max_order):
    cdef dict counts = {}
    cdef Py_ssize_t num = len(tokens)
    cdef Py_ssize_t i, n
    cdef tuple gram
    for n in range(1, max_order + 1):
        for i in range(num - n + 1):
            gram = tuple(tokens[i:i + n])
            if gram in counts:
                counts[gram] = <int> counts[gram] + 1
            else:
                counts[gram] = 1
    return counts


def count_char_ngrams(str text, int order):
    cdef dict counts = {}
    cdef Py_ssize_t i
    cdef Py_ssize_t end = len(text) - order + 1
    cdef str gram
    for i in range(end):
        gram = text[i:i + order]
        if gram in counts:
            counts[gram] = <int> counts[gram] + 1
        else:
            counts[gram] = 1
    return counts


def count_adjacent_pairs(list words, list freqs):
    cdef dict counts = {}
    cdef Py_ssize_t w, i
    cdef tuple word, pair
    cdef long freq
    for w in range(len(words)):
        word = words[w]
        freq = freqs[w]
        for i in range(len(word) - 1):
            pair = (word[i], word[i + 1])
            if pair in counts:
                counts[pair] = <long> counts[pair] + freq
            else:
                counts[pair] = freq
    return counts


def apply_merges(tuple symbols, dict ranks):
    cdef list word = list(symbols)
    cdef list out
    cdef Py_ssize_t i, n
    cdef object rank, best_rank
    cdef tuple pair, best_pair
    cdef str first, second, merged
    while len(word) > 1:
        best_rank = None
        best_pair = None
        n = len(word)
        for i in range(n - 1):
            pair = (word[i], word[i + 1])
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = pair
        if best_pair is None:
            break
        first = best_pair[0]
        second = best_pair[1]
        merged = first + second
        out = []
        i = 0
        while i < n:
            if i < n - 1 and word[i] == first and word[i + 1] == second:
                out.append(merged)
                i += 2
            else:
                out.append(word[i])
                i += 1
        word = out
    return word


def sequence_log2prob(list seq, int max_context, dict probs, dict bows):
    cdef double total = 0.0
    cdef double acc
    cdef Py_ssize_t j, start
    cdef Py_ssize_t n = len(seq)
    cdef tuple context
    cdef object token, lp, bow
    for j in range(1, n):
        token = seq[j]
        start = j - max_context
        if start < 0:
            start = 0
        context = tuple(seq[start:j])
        acc = 0.0
        while True:
            lp = probs.get((context, token))
            if lp is not None:
                total += acc + <double> lp
                break
            if len(context) == 0:
                raise KeyError(f"token not in model vocabulary: {token!r}")
            bow = bows.get(context)
            if bow is not None:
                acc += <double> bow
            context = context[1:]
    return total
