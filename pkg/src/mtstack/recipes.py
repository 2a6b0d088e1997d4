"""Declarative experiment recipes chaining the toolkit's own operations.

A recipe file is a YAML document with a seed, a workspace, a language
pair, and an ordered step list covering corpus cleaning, domain LM
training, cross-entropy-difference selection, copy augmentation,
training-set assembly, BPE learning, configuration emission, and
evaluation of externally produced hypothesis files.  Running a recipe
executes the steps in order and writes a manifest recording the
SHA-256 digest and row count of every input and output, so a finished
workspace documents its own lineage.  Re-running an unchanged recipe
reproduces the manifest byte for byte; inputs that changed since a
prior run raise staleness warnings.  A recipe can extend another,
inheriting its steps and appending new ones, which keeps derived
experiments down to the lines that differ.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import yaml

from .bpe import learn_bpe, save_bpe
from .corpus import LANGUAGES, CleaningConfig, clean, load_parallel, save_parallel
from .gateway.config import emit_training_config
from .lm import SMOOTHINGS, load_lm, save_lm
from .metrics import bleu_corpus, chrf_corpus
from .selection import (
    LmQuad,
    build_finetune_set,
    copy_augment,
    select_top,
    train_domain_lm,
    write_score_table,
)

MANIFEST_NAME = "manifest.json"

STEP_KINDS = (
    "clean",
    "train-lm",
    "select",
    "copy-augment",
    "build-set",
    "bpe-learn",
    "emit-config",
    "evaluate",
)

_RECIPE_KEYS = {
    "name",
    "seed",
    "workspace",
    "source_lang",
    "target_lang",
    "steps",
    "extends",
}

_STEP_KEYS = {"step", "inputs", "outputs", "params"}

_NUMBERED_SOURCE = re.compile(r"source([2-9]\d*)")


class RecipeError(ValueError):
    """Raised for malformed recipes and failed runs."""


class StalenessWarning(UserWarning):
    """An input changed since the manifest already in the workspace."""


@dataclass(frozen=True)
class RecipeStep:
    """One step descriptor: kind, role-to-path maps, and parameters.

    Output paths are workspace-relative.  Input paths name either a
    prior step's output (same workspace-relative string) or an
    external file resolved against base_dir, the directory of the
    recipe file that declared the step.
    """

    kind: str
    inputs: dict
    outputs: dict
    params: dict
    base_dir: str


@dataclass(frozen=True)
class Recipe:
    name: str
    seed: int
    workspace: str
    source_lang: str
    target_lang: str
    steps: tuple


@dataclass(frozen=True)
class StepRecord:
    step: str
    inputs: dict
    outputs: dict


@dataclass(frozen=True)
class RecipeManifest:
    recipe: str
    seed: int
    steps: tuple

    def to_json(self) -> str:
        body = {
            "recipe": self.recipe,
            "seed": self.seed,
            "steps": [
                {"step": s.step, "inputs": s.inputs, "outputs": s.outputs}
                for s in self.steps
            ],
        }
        return json.dumps(body, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RecipeManifest":
        try:
            body = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RecipeError(f"manifest is not valid JSON: {exc}") from exc
        try:
            steps = tuple(
                StepRecord(s["step"], s["inputs"], s["outputs"]) for s in body["steps"]
            )
            return cls(body["recipe"], body["seed"], steps)
        except (KeyError, TypeError) as exc:
            raise RecipeError(f"manifest is missing required fields: {exc}") from exc


def _require_mapping(value, what: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise RecipeError(f"{what} must be a mapping")
    return dict(value)


def _check_roles(where: str, step_kind: str, section: str, roles: dict) -> None:
    for role, path in roles.items():
        if not isinstance(role, str) or not role:
            raise RecipeError(f"{where}: {step_kind}: {section} role names must be strings")
        if not isinstance(path, str) or not path:
            raise RecipeError(
                f"{where}: {step_kind}: {section} path for {role!r} must be a non-empty string"
            )


def _check_workspace_relative(where: str, step_kind: str, outputs: dict) -> None:
    for role, path in outputs.items():
        parts = Path(path).parts
        if Path(path).is_absolute() or os.pardir in parts:
            raise RecipeError(
                f"{where}: {step_kind}: output {role!r} must stay inside the workspace: {path}"
            )


def _require_param(where: str, step: RecipeStep, name: str, kind: type):
    value = step.params.get(name)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise RecipeError(
            f"{where}: {step.kind}: param {name!r} must be {kind.__name__}"
        )
    return value


def _validate_step(where: str, step: RecipeStep) -> None:
    fixed = {
        "clean": ({"source", "target"}, {"source", "target", "report"}),
        "train-lm": ({"lines"}, {"model"}),
        "select": (
            {"source", "target", "lm_in_src", "lm_out_src", "lm_in_tgt", "lm_out_tgt"},
            {"source", "target", "scores"},
        ),
        "copy-augment": ({"mono"}, {"source", "target"}),
        "emit-config": (set(), {"config"}),
    }
    allowed_params = {
        "clean": {"min_tokens", "max_tokens", "max_length_ratio", "drop_duplicates"},
        "train-lm": {"lang", "order", "smoothing"},
        "select": {"n"},
        "copy-augment": {"label", "sample"},
        "build-set": set(),
        "bpe-learn": {"merges"},
        "emit-config": {"overrides"},
        "evaluate": set(),
    }
    extra = set(step.params) - allowed_params[step.kind]
    if extra:
        raise RecipeError(
            f"{where}: {step.kind}: unknown params: {', '.join(sorted(extra))}"
        )

    if step.kind in fixed:
        want_in, want_out = fixed[step.kind]
        if set(step.inputs) != want_in:
            raise RecipeError(
                f"{where}: {step.kind}: inputs must be exactly {sorted(want_in)}"
            )
        if set(step.outputs) != want_out:
            raise RecipeError(
                f"{where}: {step.kind}: outputs must be exactly {sorted(want_out)}"
            )
    elif step.kind == "build-set":
        roles = set(step.inputs)
        if not {"source", "target"} <= roles:
            raise RecipeError(f"{where}: build-set: needs base 'source' and 'target' inputs")
        extras = roles - {"source", "target"}
        numbered = {m.group(1) for role in extras if (m := _NUMBERED_SOURCE.fullmatch(role))}
        expected = {"source" + k for k in numbered} | {"target" + k for k in numbered}
        if extras != expected:
            raise RecipeError(
                f"{where}: build-set: extra inputs must pair as source<k>/target<k> with k >= 2"
            )
        if set(step.outputs) != {"source", "target"}:
            raise RecipeError(f"{where}: build-set: outputs must be exactly ['source', 'target']")
    elif step.kind == "bpe-learn":
        if not step.inputs:
            raise RecipeError(f"{where}: bpe-learn: needs at least one input corpus")
        if set(step.outputs) != {"model"}:
            raise RecipeError(f"{where}: bpe-learn: outputs must be exactly ['model']")
    elif step.kind == "evaluate":
        if "reference" not in step.inputs or len(step.inputs) < 2:
            raise RecipeError(
                f"{where}: evaluate: needs a 'reference' input and at least one hypothesis input"
            )
        if set(step.outputs) != {"summary"}:
            raise RecipeError(f"{where}: evaluate: outputs must be exactly ['summary']")

    if step.kind == "train-lm":
        lang = _require_param(where, step, "lang", str)
        if lang not in LANGUAGES:
            raise RecipeError(f"{where}: train-lm: unknown lang {lang!r}")
        if "order" in step.params:
            _require_param(where, step, "order", int)
        if "smoothing" in step.params and step.params["smoothing"] not in SMOOTHINGS:
            raise RecipeError(
                f"{where}: train-lm: smoothing must be one of {', '.join(SMOOTHINGS)}"
            )
    elif step.kind == "select":
        if _require_param(where, step, "n", int) < 0:
            raise RecipeError(f"{where}: select: param 'n' must be >= 0")
    elif step.kind == "bpe-learn":
        if _require_param(where, step, "merges", int) < 0:
            raise RecipeError(f"{where}: bpe-learn: param 'merges' must be >= 0")
    elif step.kind == "copy-augment" and "sample" in step.params:
        if _require_param(where, step, "sample", int) < 1:
            raise RecipeError(f"{where}: copy-augment: param 'sample' must be >= 1")
    elif step.kind == "emit-config" and "overrides" in step.params:
        if not isinstance(step.params["overrides"], dict):
            raise RecipeError(f"{where}: emit-config: param 'overrides' must be a mapping")


def _parse_step(raw, where: str, base_dir: Path) -> RecipeStep:
    if not isinstance(raw, dict):
        raise RecipeError(f"{where}: each step must be a mapping")
    unknown = set(raw) - _STEP_KEYS
    if unknown:
        raise RecipeError(f"{where}: unknown step keys: {', '.join(sorted(unknown))}")
    kind = raw.get("step")
    if kind not in STEP_KINDS:
        raise RecipeError(
            f"{where}: unknown step kind {kind!r} (expected one of {', '.join(STEP_KINDS)})"
        )
    inputs = _require_mapping(raw.get("inputs"), f"{where}: {kind}: inputs")
    outputs = _require_mapping(raw.get("outputs"), f"{where}: {kind}: outputs")
    params = _require_mapping(raw.get("params"), f"{where}: {kind}: params")
    _check_roles(where, kind, "inputs", inputs)
    _check_roles(where, kind, "outputs", outputs)
    _check_workspace_relative(where, kind, outputs)
    step = RecipeStep(kind, inputs, outputs, params, str(base_dir))
    _validate_step(where, step)
    return step


def load_recipe(path: str | os.PathLike) -> Recipe:
    """Load a recipe file, resolving its inheritance chain.

    A recipe naming another under 'extends' inherits that recipe's
    settings and steps; its own steps are appended and its own scalar
    keys win.  Relative external input paths resolve against the file
    that declared them, so extending a recipe from another directory
    does not break its inputs.
    """
    return _load_recipe(Path(path).resolve(), chain=())


def _load_recipe(path: Path, chain: tuple) -> Recipe:
    if path in chain:
        cycle = " -> ".join(p.name for p in chain + (path,))
        raise RecipeError(f"recipe inheritance cycle: {cycle}")
    if not path.exists():
        raise RecipeError(f"recipe file not found: {path}")
    where = path.name
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise RecipeError(f"{where}: not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise RecipeError(f"{where}: recipe must be a mapping")
    unknown = set(data) - _RECIPE_KEYS
    if unknown:
        raise RecipeError(f"{where}: unknown recipe keys: {', '.join(sorted(unknown))}")

    base = None
    if "extends" in data:
        parent = data["extends"]
        if not isinstance(parent, str) or not parent:
            raise RecipeError(f"{where}: 'extends' must name a recipe file")
        base = _load_recipe((path.parent / parent).resolve(), chain + (path,))

    raw_steps = data.get("steps", [])
    if raw_steps is None:
        raw_steps = []
    if not isinstance(raw_steps, list):
        raise RecipeError(f"{where}: 'steps' must be a list")
    own_steps = tuple(
        _parse_step(raw, f"{where}: step {i}", path.parent)
        for i, raw in enumerate(raw_steps, start=1)
    )

    name = data.get("name", base.name if base else path.stem)
    seed = data.get("seed", base.seed if base else None)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise RecipeError(f"{where}: 'seed' must be an integer")
    if "workspace" in data:
        raw_workspace = data["workspace"]
        if not isinstance(raw_workspace, str) or not raw_workspace:
            raise RecipeError(f"{where}: 'workspace' must be a path")
        workspace = str((path.parent / raw_workspace).resolve())
    elif base is not None:
        workspace = base.workspace
    else:
        raise RecipeError(f"{where}: 'workspace' is required")
    source_lang = data.get("source_lang", base.source_lang if base else None)
    target_lang = data.get("target_lang", base.target_lang if base else None)
    for label, lang in (("source_lang", source_lang), ("target_lang", target_lang)):
        if lang not in LANGUAGES:
            raise RecipeError(
                f"{where}: {label!r} must be one of {', '.join(LANGUAGES)}"
            )

    steps = (base.steps if base else ()) + own_steps
    if not steps:
        raise RecipeError(f"{where}: recipe has no steps")
    return Recipe(str(name), seed, workspace, source_lang, target_lang, steps)


def _read_lines(path: Path) -> list:
    with open(path, "r", encoding="utf-8", newline=None) as handle:
        return handle.read().splitlines()


def _file_record(authored: str, resolved: Path) -> dict:
    data = resolved.read_bytes()
    rows = data.count(b"\n")
    if data and not data.endswith(b"\n"):
        rows += 1
    return {
        "path": authored,
        "sha256": hashlib.sha256(data).hexdigest(),
        "rows": rows,
    }


class _StepIo(NamedTuple):
    inputs: dict
    outputs: dict


def _run_clean(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    config = CleaningConfig(**step.params)
    corpus = load_parallel(
        io.inputs["source"],
        io.inputs["target"],
        source_lang=recipe.source_lang,
        target_lang=recipe.target_lang,
    )
    kept, report = clean(corpus, config)
    removed = sum(report.removed_by_rule.values())
    if report.retained_pairs + removed != report.input_pairs:
        raise RecipeError(
            f"cleaning dropped pairs without accounting for them: "
            f"{report.retained_pairs} + {removed} != {report.input_pairs}"
        )
    save_parallel(kept, io.outputs["source"], io.outputs["target"])
    io.outputs["report"].write_text(report.to_json() + "\n", encoding="utf-8")


def _run_train_lm(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    kwargs = {}
    if "order" in step.params:
        kwargs["order"] = step.params["order"]
    if "smoothing" in step.params:
        kwargs["smoothing"] = step.params["smoothing"]
    model = train_domain_lm(_read_lines(io.inputs["lines"]), step.params["lang"], **kwargs)
    save_lm(model, io.outputs["model"])


def _run_select(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    quad = LmQuad(
        load_lm(io.inputs["lm_in_src"]),
        load_lm(io.inputs["lm_out_src"]),
        load_lm(io.inputs["lm_in_tgt"]),
        load_lm(io.inputs["lm_out_tgt"]),
        src_lang=recipe.source_lang,
        tgt_lang=recipe.target_lang,
    )
    pool = load_parallel(
        io.inputs["source"],
        io.inputs["target"],
        source_lang=recipe.source_lang,
        target_lang=recipe.target_lang,
    )
    chosen, scores = select_top(pool, quad, step.params["n"])
    save_parallel(chosen, io.outputs["source"], io.outputs["target"])
    write_score_table(scores, io.outputs["scores"])


def _run_copy_augment(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    lines = _read_lines(io.inputs["mono"])
    sample = step.params.get("sample")
    if sample is not None:
        if sample > len(lines):
            raise RecipeError(
                f"copy-augment: sample {sample} exceeds the {len(lines)} available lines"
            )
        lines = random.Random(recipe.seed).sample(lines, sample)
    corpus = copy_augment(
        lines,
        step.params.get("label", "copied"),
        source_lang=recipe.source_lang,
        target_lang=recipe.target_lang,
    )
    save_parallel(corpus, io.outputs["source"], io.outputs["target"])


def _run_build_set(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    def load(src_role: str, tgt_role: str):
        return load_parallel(
            io.inputs[src_role],
            io.inputs[tgt_role],
            source_lang=recipe.source_lang,
            target_lang=recipe.target_lang,
        )

    base = load("source", "target")
    keys = sorted(
        (int(m.group(1)) for role in io.inputs if (m := _NUMBERED_SOURCE.fullmatch(role)))
    )
    additions = [load(f"source{k}", f"target{k}") for k in keys]
    combined = build_finetune_set(base, additions, recipe.seed)
    save_parallel(combined, io.outputs["source"], io.outputs["target"])


def _run_bpe_learn(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    corpora = [_read_lines(io.inputs[role]) for role in sorted(io.inputs)]
    model = learn_bpe(corpora, step.params["merges"])
    save_bpe(model, io.outputs["model"])


def _run_emit_config(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    document = emit_training_config(
        (recipe.source_lang, recipe.target_lang), step.params.get("overrides")
    )
    io.outputs["config"].write_text(document, encoding="utf-8")


def _run_evaluate(recipe: Recipe, step: RecipeStep, io: _StepIo) -> None:
    references = _read_lines(io.inputs["reference"])
    systems = {}
    for role in sorted(io.inputs):
        if role == "reference":
            continue
        hypotheses = _read_lines(io.inputs[role])
        systems[role] = {
            "bleu": bleu_corpus(hypotheses, references).score,
            "chrf": chrf_corpus(hypotheses, references).score,
            "segments": len(hypotheses),
        }
    summary = {"reference": step.inputs["reference"], "systems": systems}
    io.outputs["summary"].write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


_HANDLERS = {
    "clean": _run_clean,
    "train-lm": _run_train_lm,
    "select": _run_select,
    "copy-augment": _run_copy_augment,
    "build-set": _run_build_set,
    "bpe-learn": _run_bpe_learn,
    "emit-config": _run_emit_config,
    "evaluate": _run_evaluate,
}


def _warn_if_stale(prior, index: int, step: RecipeStep, input_records: dict) -> None:
    if prior is None or index > len(prior.steps):
        return
    before = prior.steps[index - 1]
    if before.step != step.kind:
        warnings.warn(
            f"step {index} changed kind ({before.step} -> {step.kind}); "
            f"the workspace manifest is stale",
            StalenessWarning,
            stacklevel=3,
        )
        return
    for role in sorted(input_records):
        old = before.inputs.get(role)
        if old is not None and old["sha256"] != input_records[role]["sha256"]:
            warnings.warn(
                f"step {index} ({step.kind}): input {role!r} changed since the "
                f"previous run; downstream artifacts were stale",
                StalenessWarning,
                stacklevel=3,
            )


def run_recipe(recipe: Recipe) -> RecipeManifest:
    """Execute a recipe's steps in order and record their lineage.

    Each input is resolved against prior step outputs first, then as
    an external file; a path that matches neither halts the run with
    the failing step named.  The returned manifest is also written to
    the workspace as manifest.json, and every file the run creates is
    listed in it.
    """
    workspace = Path(recipe.workspace)
    workspace.mkdir(parents=True, exist_ok=True)
    manifest_path = workspace / MANIFEST_NAME
    prior = None
    if manifest_path.exists():
        prior = RecipeManifest.from_json(manifest_path.read_text(encoding="utf-8"))

    produced = {}
    records = []
    for index, step in enumerate(recipe.steps, start=1):
        resolved_inputs = {}
        input_records = {}
        for role in sorted(step.inputs):
            authored = step.inputs[role]
            if authored in produced:
                resolved = produced[authored]
            else:
                resolved = Path(authored)
                if not resolved.is_absolute():
                    resolved = Path(step.base_dir) / resolved
                if not resolved.exists():
                    raise RecipeError(
                        f"step {index} ({step.kind}): missing input {role!r}: {authored}"
                    )
            resolved_inputs[role] = resolved
            input_records[role] = _file_record(authored, resolved)
        _warn_if_stale(prior, index, step, input_records)

        resolved_outputs = {}
        for role in sorted(step.outputs):
            target = workspace / step.outputs[role]
            target.parent.mkdir(parents=True, exist_ok=True)
            resolved_outputs[role] = target
        _HANDLERS[step.kind](recipe, step, _StepIo(resolved_inputs, resolved_outputs))

        output_records = {}
        for role in sorted(resolved_outputs):
            target = resolved_outputs[role]
            if not target.exists():
                raise RecipeError(
                    f"step {index} ({step.kind}): declared output {role!r} was not produced"
                )
            output_records[role] = _file_record(step.outputs[role], target)
            produced[step.outputs[role]] = target
        records.append(StepRecord(step.kind, input_records, output_records))

    manifest = RecipeManifest(recipe.name, recipe.seed, tuple(records))
    manifest_path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    return manifest


def diff_recipes(a: Recipe, b: Recipe) -> list:
    """Lines describing how two resolved recipes differ.

    Compares experimental content (name, seed, language pair, steps);
    workspace locations are deliberately not compared.  An empty list
    means the recipes describe the same experiment.
    """
    lines = []
    for field_name in ("name", "seed", "source_lang", "target_lang"):
        left, right = getattr(a, field_name), getattr(b, field_name)
        if left != right:
            lines.append(f"{field_name}: {left!r} -> {right!r}")
    common = min(len(a.steps), len(b.steps))
    for i in range(common):
        sa, sb = a.steps[i], b.steps[i]
        if sa.kind != sb.kind:
            lines.append(f"step {i + 1}: {sa.kind} -> {sb.kind}")
            continue
        for section in ("inputs", "outputs", "params"):
            left, right = getattr(sa, section), getattr(sb, section)
            for key in sorted(set(left) | set(right)):
                if left.get(key) != right.get(key):
                    lines.append(
                        f"step {i + 1} ({sa.kind}): {section}.{key}: "
                        f"{left.get(key)!r} -> {right.get(key)!r}"
                    )
    for i in range(common, len(a.steps)):
        lines.append(f"step {i + 1} ({a.steps[i].kind}): only in first recipe")
    for i in range(common, len(b.steps)):
        lines.append(f"step {i + 1} ({b.steps[i].kind}): only in second recipe")
    return lines
