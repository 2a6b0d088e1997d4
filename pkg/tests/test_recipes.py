"""End-to-end tests for declarative experiment recipes."""

import dataclasses
import json
import random
import textwrap
import warnings

import pytest

from lmfixtures import FIN_SRC, FIN_TGT, MED_SRC, MED_TGT
from mtstack.gateway import parse_training_config
from mtstack.metrics import bleu_corpus, chrf_corpus
from mtstack.recipes import (
    RecipeError,
    StalenessWarning,
    diff_recipes,
    load_recipe,
    run_recipe,
)


def write_lines(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_recipe(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(textwrap.dedent(text), encoding="utf-8")


def vocab_lines(rng, vocab, count):
    return [
        " ".join(rng.choice(vocab) for _ in range(rng.randint(3, 8)))
        for _ in range(count)
    ]


def seed_data(root):
    """Raw base corpus, two-domain pool, LM lines, mono lines, eval files."""
    rng = random.Random(2024)
    data = root / "data"

    good = []
    for _ in range(9):
        length = rng.randint(3, 8)
        good.append(
            (
                " ".join(rng.choice(MED_SRC) for _ in range(length)),
                " ".join(rng.choice(MED_TGT) for _ in range(length)),
            )
        )
    raw = list(good)
    raw.append(("", "vacuna"))
    raw.append((" ".join(["dose"] * 120), "dosis"))
    raw.append(good[0])
    write_lines(data / "raw.en", [s for s, _ in raw])
    write_lines(data / "raw.es", [t for _, t in raw])

    pool = []
    for _ in range(60):
        length = rng.randint(3, 8)
        pool.append(
            (
                " ".join(rng.choice(MED_SRC) for _ in range(length)),
                " ".join(rng.choice(MED_TGT) for _ in range(length)),
            )
        )
    for _ in range(60):
        length = rng.randint(3, 8)
        pool.append(
            (
                " ".join(rng.choice(FIN_SRC) for _ in range(length)),
                " ".join(rng.choice(FIN_TGT) for _ in range(length)),
            )
        )
    rng.shuffle(pool)
    write_lines(data / "pool.en", [s for s, _ in pool])
    write_lines(data / "pool.es", [t for _, t in pool])

    write_lines(data / "lm-in.en", vocab_lines(rng, MED_SRC, 120))
    write_lines(data / "lm-out.en", vocab_lines(rng, FIN_SRC, 120))
    write_lines(data / "lm-in.es", vocab_lines(rng, MED_TGT, 120))
    write_lines(data / "lm-out.es", vocab_lines(rng, FIN_TGT, 120))

    write_lines(data / "mono.es", vocab_lines(rng, MED_TGT, 25))

    references = vocab_lines(rng, MED_TGT, 12)
    baseline = [" ".join(rng.sample(line.split(), len(line.split()))) for line in references]
    write_lines(data / "ref.es", references)
    write_lines(data / "hyp-baseline.es", baseline)
    write_lines(data / "hyp-perfect.es", references)
    return data


CLEAN_ONLY = """\
    name: clean-only
    seed: 7
    workspace: ../runs/clean-only
    source_lang: en
    target_lang: es
    steps:
      - step: clean
        inputs: {source: ../data/raw.en, target: ../data/raw.es}
        outputs: {source: clean.en, target: clean.es, report: clean.report.json}
    """

FULL_RECIPE = """\
    name: full-toy
    seed: 99
    workspace: ../runs/full
    source_lang: en
    target_lang: es
    steps:
      - step: clean
        inputs: {source: ../data/raw.en, target: ../data/raw.es}
        outputs: {source: clean.en, target: clean.es, report: clean.report.json}
      - step: train-lm
        inputs: {lines: ../data/lm-in.en}
        outputs: {model: lm/in.en.arpa}
        params: {lang: en, order: 2, smoothing: witten_bell}
      - step: train-lm
        inputs: {lines: ../data/lm-out.en}
        outputs: {model: lm/out.en.arpa}
        params: {lang: en, order: 2, smoothing: witten_bell}
      - step: train-lm
        inputs: {lines: ../data/lm-in.es}
        outputs: {model: lm/in.es.arpa}
        params: {lang: es, order: 2, smoothing: witten_bell}
      - step: train-lm
        inputs: {lines: ../data/lm-out.es}
        outputs: {model: lm/out.es.arpa}
        params: {lang: es, order: 2, smoothing: witten_bell}
      - step: select
        inputs:
          source: ../data/pool.en
          target: ../data/pool.es
          lm_in_src: lm/in.en.arpa
          lm_out_src: lm/out.en.arpa
          lm_in_tgt: lm/in.es.arpa
          lm_out_tgt: lm/out.es.arpa
        outputs: {source: selected.en, target: selected.es, scores: selection.tsv}
        params: {n: 40}
      - step: copy-augment
        inputs: {mono: ../data/mono.es}
        outputs: {source: copied.en, target: copied.es}
      - step: build-set
        inputs:
          source: clean.en
          target: clean.es
          source2: selected.en
          target2: selected.es
          source3: copied.en
          target3: copied.es
        outputs: {source: train.en, target: train.es}
      - step: bpe-learn
        inputs: {corpus: train.en, corpus2: train.es}
        outputs: {model: bpe.codes}
        params: {merges: 30}
      - step: emit-config
        outputs: {config: train.yaml}
        params:
          overrides: {bpe_merges: 30}
      - step: evaluate
        inputs:
          reference: ../data/ref.es
          baseline: ../data/hyp-baseline.es
          perfect: ../data/hyp-perfect.es
        outputs: {summary: eval.json}
    """


@pytest.fixture()
def workdir(tmp_path):
    seed_data(tmp_path)
    return tmp_path


def test_clean_only_recipe_conserves_pairs(workdir):
    write_recipe(workdir / "recipes" / "clean.yaml", CLEAN_ONLY)
    manifest = run_recipe(load_recipe(workdir / "recipes" / "clean.yaml"))

    assert [record.step for record in manifest.steps] == ["clean"]
    record = manifest.steps[0]
    assert record.inputs["source"]["rows"] == 12
    assert record.outputs["source"]["rows"] == 9
    assert record.outputs["target"]["rows"] == 9

    report = json.loads((workdir / "runs" / "clean-only" / "clean.report.json").read_text())
    removed = sum(report["removed_by_rule"].values())
    assert report["retained_pairs"] + removed == report["input_pairs"]
    assert report["input_pairs"] == 12
    assert report["retained_pairs"] == 9


def test_full_recipe_set_arithmetic(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    manifest = run_recipe(load_recipe(workdir / "recipes" / "full.yaml"))

    by_kind = {}
    for record in manifest.steps:
        by_kind.setdefault(record.step, []).append(record)

    assert len(by_kind["train-lm"]) == 4
    cleaned = by_kind["clean"][0].outputs["source"]["rows"]
    selected = by_kind["select"][0].outputs["source"]["rows"]
    copied = by_kind["copy-augment"][0].outputs["source"]["rows"]
    built = by_kind["build-set"][0].outputs["source"]["rows"]
    assert cleaned == 9
    assert selected == 40
    assert copied == 25
    assert built == cleaned + selected + copied
    assert by_kind["build-set"][0].outputs["target"]["rows"] == built


def test_full_recipe_selects_in_domain(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    run_recipe(load_recipe(workdir / "recipes" / "full.yaml"))

    selected = (workdir / "runs" / "full" / "selected.en").read_text().splitlines()
    assert len(selected) == 40
    in_domain = set(MED_SRC)
    for line in selected:
        assert set(line.split()) <= in_domain


def test_every_workspace_file_is_in_the_manifest(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    manifest = run_recipe(load_recipe(workdir / "recipes" / "full.yaml"))

    declared = set()
    for record in manifest.steps:
        for entry in record.outputs.values():
            declared.add(entry["path"])
    workspace = workdir / "runs" / "full"
    on_disk = {
        str(path.relative_to(workspace))
        for path in workspace.rglob("*")
        if path.is_file()
    }
    assert on_disk == declared | {"manifest.json"}


def test_same_recipe_and_seed_reproduce_the_manifest(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    recipe = load_recipe(workdir / "recipes" / "full.yaml")
    first = run_recipe(recipe)

    elsewhere = dataclasses.replace(recipe, workspace=str(workdir / "runs" / "full-2"))
    second = run_recipe(elsewhere)
    assert first == second
    assert first.to_json() == second.to_json()

    first_bytes = (workdir / "runs" / "full" / "manifest.json").read_bytes()
    second_bytes = (workdir / "runs" / "full-2" / "manifest.json").read_bytes()
    assert first_bytes == second_bytes

    with warnings.catch_warnings():
        warnings.simplefilter("error", StalenessWarning)
        rerun = run_recipe(recipe)
    assert rerun == first


def test_missing_input_halts_with_the_step_named(workdir):
    write_recipe(
        workdir / "recipes" / "broken.yaml",
        """\
        name: broken
        seed: 1
        workspace: ../runs/broken
        source_lang: en
        target_lang: es
        steps:
          - step: clean
            inputs: {source: ../data/raw.en, target: ../data/raw.es}
            outputs: {source: clean.en, target: clean.es, report: report.json}
          - step: bpe-learn
            inputs: {corpus: never-built.en}
            outputs: {model: bpe.codes}
            params: {merges: 5}
        """,
    )
    with pytest.raises(RecipeError, match=r"step 2 \(bpe-learn\): missing input 'corpus'"):
        run_recipe(load_recipe(workdir / "recipes" / "broken.yaml"))


def test_changed_input_raises_staleness_warning(workdir):
    write_recipe(workdir / "recipes" / "clean.yaml", CLEAN_ONLY)
    recipe = load_recipe(workdir / "recipes" / "clean.yaml")
    run_recipe(recipe)

    raw = workdir / "data" / "raw.en"
    raw.write_text(raw.read_text() + "tablet fever mask\n", encoding="utf-8")
    write_lines(
        workdir / "data" / "raw.es",
        (workdir / "data" / "raw.es").read_text().splitlines() + ["tableta fiebre mascara"],
    )
    with pytest.warns(StalenessWarning) as captured:
        run_recipe(recipe)
    messages = [str(entry.message) for entry in captured]
    assert any("input 'source' changed" in message for message in messages)
    assert any("input 'target' changed" in message for message in messages)


def test_recipe_inheritance_appends_steps(workdir):
    write_recipe(workdir / "recipes" / "base.yaml", CLEAN_ONLY)
    write_recipe(
        workdir / "recipes" / "sub" / "ext.yaml",
        """\
        extends: ../base.yaml
        name: ext
        workspace: ../../runs/ext
        steps:
          - step: bpe-learn
            inputs: {corpus: clean.en}
            outputs: {model: bpe.codes}
            params: {merges: 10}
        """,
    )
    recipe = load_recipe(workdir / "recipes" / "sub" / "ext.yaml")
    assert recipe.name == "ext"
    assert recipe.seed == 7
    assert [step.kind for step in recipe.steps] == ["clean", "bpe-learn"]

    manifest = run_recipe(recipe)
    assert [record.step for record in manifest.steps] == ["clean", "bpe-learn"]
    assert (workdir / "runs" / "ext" / "bpe.codes").exists()


def test_inheritance_cycle_is_rejected(workdir):
    write_recipe(
        workdir / "recipes" / "a.yaml",
        """\
        extends: b.yaml
        seed: 1
        workspace: ../runs/a
        source_lang: en
        target_lang: es
        """,
    )
    write_recipe(
        workdir / "recipes" / "b.yaml",
        """\
        extends: a.yaml
        seed: 1
        workspace: ../runs/b
        source_lang: en
        target_lang: es
        """,
    )
    with pytest.raises(RecipeError, match="cycle"):
        load_recipe(workdir / "recipes" / "a.yaml")


def test_diff_reports_appended_steps_and_changed_values(workdir):
    write_recipe(workdir / "recipes" / "base.yaml", CLEAN_ONLY)
    write_recipe(
        workdir / "recipes" / "ext.yaml",
        """\
        extends: base.yaml
        name: ext
        seed: 8
        workspace: ../runs/ext
        steps:
          - step: bpe-learn
            inputs: {corpus: clean.en}
            outputs: {model: bpe.codes}
            params: {merges: 10}
        """,
    )
    base = load_recipe(workdir / "recipes" / "base.yaml")
    ext = load_recipe(workdir / "recipes" / "ext.yaml")

    assert diff_recipes(base, base) == []
    lines = diff_recipes(base, ext)
    assert "name: 'clean-only' -> 'ext'" in lines
    assert "seed: 7 -> 8" in lines
    assert "step 2 (bpe-learn): only in second recipe" in lines

    tightened = dataclasses.replace(
        base,
        steps=(
            dataclasses.replace(base.steps[0], params={"max_tokens": 50}),
        ),
    )
    lines = diff_recipes(base, tightened)
    assert "step 1 (clean): params.max_tokens: None -> 50" in lines


def test_evaluation_summary_matches_direct_scoring(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    run_recipe(load_recipe(workdir / "recipes" / "full.yaml"))

    summary = json.loads((workdir / "runs" / "full" / "eval.json").read_text())
    references = (workdir / "data" / "ref.es").read_text().splitlines()
    baseline = (workdir / "data" / "hyp-baseline.es").read_text().splitlines()

    assert set(summary["systems"]) == {"baseline", "perfect"}
    assert summary["systems"]["perfect"]["bleu"] == 100.0
    assert summary["systems"]["perfect"]["chrf"] == 100.0
    assert summary["systems"]["baseline"]["bleu"] == bleu_corpus(baseline, references).score
    assert summary["systems"]["baseline"]["chrf"] == chrf_corpus(baseline, references).score
    assert summary["systems"]["baseline"]["segments"] == 12


def test_emitted_config_carries_the_override(workdir):
    write_recipe(workdir / "recipes" / "full.yaml", FULL_RECIPE)
    run_recipe(load_recipe(workdir / "recipes" / "full.yaml"))

    document = (workdir / "runs" / "full" / "train.yaml").read_text()
    pair, config = parse_training_config(document)
    assert pair == ("en", "es")
    assert config.bpe_merges == 30
    assert config.beam_size == 12


def test_copy_augment_sampling_is_seeded(workdir):
    recipe_text = """\
        name: sampled
        seed: 5
        workspace: ../runs/sampled
        source_lang: en
        target_lang: es
        steps:
          - step: copy-augment
            inputs: {mono: ../data/mono.es}
            outputs: {source: copied.en, target: copied.es}
            params: {sample: 10}
        """
    write_recipe(workdir / "recipes" / "sampled.yaml", recipe_text)
    recipe = load_recipe(workdir / "recipes" / "sampled.yaml")
    manifest = run_recipe(recipe)
    assert manifest.steps[0].outputs["source"]["rows"] == 10
    first = (workdir / "runs" / "sampled" / "copied.es").read_bytes()

    again = dataclasses.replace(recipe, workspace=str(workdir / "runs" / "sampled-2"))
    run_recipe(again)
    assert (workdir / "runs" / "sampled-2" / "copied.es").read_bytes() == first

    oversampled = dataclasses.replace(
        recipe,
        workspace=str(workdir / "runs" / "sampled-3"),
        steps=(
            dataclasses.replace(recipe.steps[0], params={"sample": 26}),
        ),
    )
    with pytest.raises(RecipeError, match="exceeds the 25 available lines"):
        run_recipe(oversampled)


def test_recipe_validation_rejects_malformed_documents(workdir):
    header = textwrap.dedent(
        """\
        name: bad
        seed: 1
        workspace: ../runs/bad
        source_lang: en
        target_lang: es
        """
    )

    def body(text):
        return header + textwrap.dedent(text)

    cases = [
        (
            body(
                """\
                steps:
                  - step: fetch
                    outputs: {out: x}
                """
            ),
            "unknown step kind",
        ),
        (
            body(
                """\
                steps:
                  - step: bpe-learn
                    inputs: {corpus: ../data/raw.en}
                    outputs: {model: /tmp/escape.codes}
                    params: {merges: 5}
                """
            ),
            "must stay inside the workspace",
        ),
        (
            body(
                """\
                steps:
                  - step: clean
                    inputs: {source: a, target: b}
                    outputs: {source: c, target: d, report: e}
                    params: {aggressiveness: high}
                """
            ),
            "unknown params: aggressiveness",
        ),
        (
            body(
                """\
                steps:
                  - step: build-set
                    inputs: {source: a, target: b, source2: c}
                    outputs: {source: d, target: e}
                """
            ),
            "pair as source<k>/target<k>",
        ),
        (
            body(
                """\
                steps:
                  - step: evaluate
                    inputs: {reference: ../data/ref.es}
                    outputs: {summary: eval.json}
                """
            ),
            "at least one hypothesis",
        ),
        (
            body(
                """\
                gpu_count: 4
                steps:
                  - step: emit-config
                    outputs: {config: train.yaml}
                """
            ),
            "unknown recipe keys: gpu_count",
        ),
        (
            """\
        name: bad
        seed: nine
        workspace: ../runs/bad
        source_lang: en
        target_lang: es
        steps:
          - step: emit-config
            outputs: {config: train.yaml}
        """,
            "'seed' must be an integer",
        ),
        (
            """\
        name: bad
        seed: 1
        source_lang: en
        target_lang: es
        steps:
          - step: emit-config
            outputs: {config: train.yaml}
        """,
            "'workspace' is required",
        ),
    ]
    for i, (text, message) in enumerate(cases):
        path = workdir / "recipes" / f"bad-{i}.yaml"
        write_recipe(path, text)
        with pytest.raises(RecipeError, match=message):
            load_recipe(path)
