"""Subword segmentation: learning, application, reversal, model files."""

import random

import pytest

from mtstack import markers
from mtstack.bpe import (
    BpeModel,
    BpeModelError,
    BpeTrainingError,
    apply_bpe,
    learn_bpe,
    load_bpe,
    save_bpe,
    undo_bpe,
)

from oracles import bpe_apply_naive, pair_count_bruteforce


def random_corpus(seed, n_lines, alphabet="abcdef", max_words=8, max_len=7):
    rng = random.Random(seed)
    lines = []
    for _ in range(n_lines):
        words = []
        for _ in range(rng.randint(1, max_words)):
            length = rng.randint(1, max_len)
            words.append("".join(rng.choice(alphabet) for _ in range(length)))
        lines.append(" ".join(words))
    return lines


def expected_segmentation(model, token):
    symbols = bpe_apply_naive(model.merges, token)
    units = [s + model.separator for s in symbols[:-1]]
    units.append(symbols[-1][: -len("</w>")])
    return " ".join(units)


def test_zero_merges_splits_to_characters():
    model = learn_bpe(["ab"], 0)
    assert model.num_merges == 0
    assert apply_bpe(model, "ab") == "a@@ b"
    assert apply_bpe(model, "abc ab") == "a@@ b@@ c a@@ b"


def test_first_merge_is_most_frequent_pair():
    corpus = ["aaab aaab"]
    model = learn_bpe(corpus, 1)
    counts = pair_count_bruteforce(corpus)
    top = max(counts.values())
    assert counts[model.merges[0]] == top
    assert model.merges[0] == ("a", "a")


def test_first_merge_low_lower():
    corpus = ["low low lower"]
    counts = pair_count_bruteforce(corpus)
    assert counts[("l", "o")] == 3
    model = learn_bpe(corpus, 1)
    assert model.merges[0] == ("l", "o")


def test_every_merge_is_maximal():
    corpus = random_corpus(92, 60, max_words=6)
    model = learn_bpe(corpus, 40)
    words = []
    for line in corpus:
        for word in line.split():
            words.append(list(word[:-1]) + [word[-1] + "</w>"])
    for first, second in model.merges:
        counts = {}
        for word in words:
            for i in range(len(word) - 1):
                pair = (word[i], word[i + 1])
                counts[pair] = counts.get(pair, 0) + 1
        top = max(counts.values())
        assert counts[(first, second)] == top
        assert (first, second) == min(p for p, c in counts.items() if c == top)
        for word in words:
            i = 0
            while i < len(word) - 1:
                if word[i] == first and word[i + 1] == second:
                    word[i:i + 2] = [first + second]
                else:
                    i += 1


def test_apply_matches_naive_replay():
    model = learn_bpe(random_corpus(17, 200), 60)
    rng = random.Random(18)
    seen = [w for line in random_corpus(17, 40) for w in line.split()]
    unseen = [
        "".join(rng.choice("abcdefüß") for _ in range(rng.randint(1, 10)))
        for _ in range(1000 - len(seen))
    ]
    for token in seen + unseen:
        assert apply_bpe(model, token) == expected_segmentation(model, token)


def test_unseen_characters_pass_through():
    model = learn_bpe(["aa aa bb"], 3)
    assert apply_bpe(model, "xyz") == "x@@ y@@ z"


def test_fully_merged_word_has_no_separator():
    model = learn_bpe(["ab ab ab"], 1)
    assert model.merges[0] == ("a", "b</w>")
    assert apply_bpe(model, "ab") == "ab"


def test_round_trip_identity():
    corpus = random_corpus(41, 2000, alphabet="abcdeot.,?", max_words=10)
    model = learn_bpe(corpus, 100)
    for line in corpus:
        assert undo_bpe(apply_bpe(model, line)) == line


def test_undo_examples():
    assert undo_bpe("a@@ b") == "ab"
    assert undo_bpe("plain text stays") == "plain text stays"
    assert undo_bpe("a@@") == "a"
    assert undo_bpe("hel@@ lo wor@@") == "hello wor"


def test_more_merges_never_fragment_further():
    corpus = random_corpus(55, 150)
    model = learn_bpe(corpus, 80)
    tokens = [w for line in random_corpus(56, 30) for w in line.split()]
    for k in (0, 10, 40, len(model.merges) - 1):
        coarse = BpeModel(model.merges[: k + 1])
        fine = BpeModel(model.merges[:k])
        for token in tokens:
            n_fine = len(apply_bpe(fine, token).split())
            n_coarse = len(apply_bpe(coarse, token).split())
            assert n_coarse <= n_fine


def test_learning_is_deterministic():
    corpus = random_corpus(77, 120)
    first = learn_bpe(list(corpus), 50)
    second = learn_bpe(list(corpus), 50)
    assert first.merges == second.merges


def test_merges_exhaust_gracefully():
    model = learn_bpe(["ab ab"], 50)
    assert model.num_merges < 50
    assert apply_bpe(model, "ab") == "ab"


def test_training_errors():
    with pytest.raises(BpeTrainingError):
        learn_bpe([], 10)
    with pytest.raises(BpeTrainingError):
        learn_bpe(["   ", ""], 10)
    with pytest.raises(BpeTrainingError):
        learn_bpe(["a b"], -1)


def test_placeholders_stay_whole():
    token = markers.placeholder("URL", 1)
    model = learn_bpe(["aaa aaa"], 2)
    out = apply_bpe(model, f"aaa {token} aaa")
    assert token in out.split()
    trained = learn_bpe([f"{token} {token} zz"], 1)
    assert trained.merges[0] == ("z", "z</w>")


def test_joint_learning_covers_both_sides():
    src = ["xxxx xxxx"]
    tgt = ["yyyy yyyy"]
    model = learn_bpe([src, tgt], 2)
    assert model.merges == (("x", "x"), ("y", "y"))


def test_model_file_round_trip(tmp_path):
    model = learn_bpe(random_corpus(3, 80), 40)
    path = tmp_path / "codes.bpe"
    save_bpe(model, path)
    loaded = load_bpe(path)
    assert loaded.merges == model.merges
    assert loaded.separator == model.separator
    first_line = path.read_text(encoding="utf-8").splitlines()[0]
    assert first_line == "#bpe v1 separator=@@"
    again = tmp_path / "codes2.bpe"
    save_bpe(loaded, again)
    assert again.read_bytes() == path.read_bytes()


def test_model_file_errors(tmp_path):
    headerless = tmp_path / "bad1.bpe"
    headerless.write_text("a b\n", encoding="utf-8")
    with pytest.raises(BpeModelError):
        load_bpe(headerless)
    extra_field = tmp_path / "bad2.bpe"
    extra_field.write_text("#bpe v1 separator=@@\na b\na b c\n", encoding="utf-8")
    with pytest.raises(BpeModelError, match="line 3"):
        load_bpe(extra_field)


def test_duplicate_merges_rejected():
    with pytest.raises(BpeModelError):
        BpeModel((("a", "b"), ("a", "b")))
