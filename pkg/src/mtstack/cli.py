"""Command-line entry points for the toolkit.

Command groups mirror the library layout: corpus preparation, language
models, data selection, subword segmentation, evaluation, the
reversible text pipeline, the translation services, and experiment
recipes.  Commands read and write UTF-8 text files and print results
to stdout; structural problems exit with a message instead of a
traceback.
"""

from __future__ import annotations

import functools
import json
import threading
import time
import warnings
from pathlib import Path

import click
import httpx
import uvicorn
import yaml

from . import __version__
from .bpe import apply_bpe, learn_bpe, load_bpe, save_bpe, undo_bpe
from .corpus import (
    CleaningConfig,
    clean,
    load_parallel,
    save_parallel,
    stats_table,
)
from .gateway import (
    WorkerRegistry,
    create_gateway_app,
    create_worker_app,
    is_supported_pair,
    mock_backend,
)
from .gateway.app import DEFAULT_BACKEND_TIMEOUT, DEFAULT_MAX_TEXT_BYTES
from .gateway.backends import MOCK_MODES
from .gateway.registry import DEFAULT_HEARTBEAT_TIMEOUT
from .lm import SMOOTHINGS, cross_entropy, load_lm, perplexity, save_lm, train_lm
from .metrics import bleu_corpus, chrf_corpus, paired_bootstrap
from .pipeline import PipelineModels, load_truecaser, postprocess, preprocess
from .recipes import MANIFEST_NAME, StalenessWarning, diff_recipes, load_recipe, run_recipe
from .selection import (
    LmQuad,
    build_finetune_set,
    copy_augment,
    select_top,
    score_corpus,
    write_score_table,
)

_EXISTING_FILE = click.Path(exists=True, dir_okay=False)
_OUT_FILE = click.Path(dir_okay=False, writable=True)


def friendly_errors(func):
    """Turn the library's ValueError family into clean CLI failures."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _read_lines(path) -> list:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().splitlines()


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")


@click.group()
@click.version_option(version=__version__, prog_name="mtstack")
def main():
    """Machine-translation engineering toolkit."""


# ---------------------------------------------------------------- corpus


@main.group()
def corpus():
    """Load, clean, and summarize parallel corpora."""


def _pair_langs(func):
    func = click.option("--src", "source_lang", required=True, help="Source language code.")(func)
    func = click.option("--tgt", "target_lang", required=True, help="Target language code.")(func)
    return func


@corpus.command("clean")
@click.option("--source", "source_path", type=_EXISTING_FILE, required=True)
@click.option("--target", "target_path", type=_EXISTING_FILE, required=True)
@_pair_langs
@click.option("--min-tokens", default=1, show_default=True)
@click.option("--max-tokens", default=100, show_default=True)
@click.option("--max-ratio", default=9.0, show_default=True)
@click.option("--dedup/--no-dedup", default=True, show_default=True)
@click.option("--out-source", type=_OUT_FILE, required=True)
@click.option("--out-target", type=_OUT_FILE, required=True)
@click.option("--report", "report_path", type=_OUT_FILE, default=None,
              help="Also write the cleaning report as JSON.")
@friendly_errors
def corpus_clean(source_path, target_path, source_lang, target_lang, min_tokens,
                 max_tokens, max_ratio, dedup, out_source, out_target, report_path):
    """Filter a parallel corpus through the rule cascade."""
    pairs = load_parallel(
        source_path, target_path, source_lang=source_lang, target_lang=target_lang
    )
    config = CleaningConfig(min_tokens, max_tokens, max_ratio, dedup)
    kept, report = clean(pairs, config)
    save_parallel(kept, out_source, out_target)
    if report_path:
        Path(report_path).write_text(report.to_json() + "\n", encoding="utf-8")
    click.echo(report.to_table())


@corpus.command("stats")
@click.option("--source", "source_path", type=_EXISTING_FILE, required=True)
@click.option("--target", "target_path", type=_EXISTING_FILE, required=True)
@_pair_langs
@friendly_errors
def corpus_stats(source_path, target_path, source_lang, target_lang):
    """Segment and token counts for a parallel corpus."""
    pairs = load_parallel(
        source_path, target_path, source_lang=source_lang, target_lang=target_lang
    )
    click.echo(stats_table(pairs))


# -------------------------------------------------------------------- lm


@main.group()
def lm():
    """Train and apply smoothed n-gram language models."""


@lm.command("train")
@click.argument("lines_file", type=_EXISTING_FILE)
@click.option("--order", default=4, show_default=True)
@click.option("--smoothing", type=click.Choice(SMOOTHINGS), default=SMOOTHINGS[0],
              show_default=True)
@click.option("--model", "model_path", type=_OUT_FILE, required=True)
@friendly_errors
def lm_train(lines_file, order, smoothing, model_path):
    """Train a model on one monolingual file of pretokenized lines."""
    lines = _read_lines(lines_file)
    model = train_lm(lines, order=order, smoothing=smoothing)
    save_lm(model, model_path)
    click.echo(f"trained order-{order} {smoothing} model on {len(lines)} lines")


@lm.command("score")
@click.option("--model", "model_path", type=_EXISTING_FILE, required=True)
@click.argument("lines_file", type=_EXISTING_FILE)
@friendly_errors
def lm_score(model_path, lines_file):
    """Bits per token for each line, then the corpus perplexity."""
    model = load_lm(model_path)
    lines = _read_lines(lines_file)
    for line in lines:
        click.echo(f"{cross_entropy(model, line):.6f}")
    click.echo(f"# perplexity {perplexity(model, lines):.6f}")


# ---------------------------------------------------------------- select


@main.group()
def select():
    """Cross-entropy-difference data selection and set building."""


def _quad_options(func):
    decorators = [
        click.option("--in-src", "in_src", type=_EXISTING_FILE, required=True,
                     help="In-domain source-side LM."),
        click.option("--out-src", "out_src", type=_EXISTING_FILE, required=True,
                     help="Out-of-domain source-side LM."),
        click.option("--in-tgt", "in_tgt", type=_EXISTING_FILE, required=True,
                     help="In-domain target-side LM."),
        click.option("--out-tgt", "out_tgt", type=_EXISTING_FILE, required=True,
                     help="Out-of-domain target-side LM."),
    ]
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def _load_quad(in_src, out_src, in_tgt, out_tgt, source_lang, target_lang) -> LmQuad:
    return LmQuad(
        load_lm(in_src),
        load_lm(out_src),
        load_lm(in_tgt),
        load_lm(out_tgt),
        src_lang=source_lang,
        tgt_lang=target_lang,
    )


@select.command("score")
@click.option("--source", "source_path", type=_EXISTING_FILE, required=True)
@click.option("--target", "target_path", type=_EXISTING_FILE, required=True)
@_pair_langs
@_quad_options
@click.option("--out", "out_path", type=_OUT_FILE, required=True,
              help="Score table destination (TSV).")
@friendly_errors
def select_score(source_path, target_path, source_lang, target_lang,
                 in_src, out_src, in_tgt, out_tgt, out_path):
    """Score every pair of a corpus against the four domain models."""
    pairs = load_parallel(
        source_path, target_path, source_lang=source_lang, target_lang=target_lang
    )
    quad = _load_quad(in_src, out_src, in_tgt, out_tgt, source_lang, target_lang)
    scores = score_corpus(pairs, quad)
    write_score_table(scores, out_path)
    click.echo(f"scored {len(scores)} pairs")


@select.command("top")
@click.option("--source", "source_path", type=_EXISTING_FILE, required=True)
@click.option("--target", "target_path", type=_EXISTING_FILE, required=True)
@_pair_langs
@_quad_options
@click.option("-n", "count", type=int, required=True, help="Pairs to keep.")
@click.option("--out-source", type=_OUT_FILE, required=True)
@click.option("--out-target", type=_OUT_FILE, required=True)
@click.option("--scores", "scores_path", type=_OUT_FILE, default=None,
              help="Also write the full score table.")
@friendly_errors
def select_top_cmd(source_path, target_path, source_lang, target_lang,
                   in_src, out_src, in_tgt, out_tgt, count,
                   out_source, out_target, scores_path):
    """Keep the n most in-domain pairs of a corpus."""
    pairs = load_parallel(
        source_path, target_path, source_lang=source_lang, target_lang=target_lang
    )
    quad = _load_quad(in_src, out_src, in_tgt, out_tgt, source_lang, target_lang)
    chosen, scores = select_top(pairs, quad, count)
    save_parallel(chosen, out_source, out_target)
    if scores_path:
        write_score_table(scores, scores_path)
    click.echo(f"selected {len(chosen)} of {len(scores)} pairs")


@select.command("copy-augment")
@click.argument("mono_file", type=_EXISTING_FILE)
@_pair_langs
@click.option("--label", default="copied", show_default=True,
              help="Provenance label for the synthetic pairs.")
@click.option("--out-source", type=_OUT_FILE, required=True)
@click.option("--out-target", type=_OUT_FILE, required=True)
@friendly_errors
def select_copy_augment(mono_file, source_lang, target_lang, label,
                        out_source, out_target):
    """Copy target-language lines onto the source side as extra pairs."""
    lines = _read_lines(mono_file)
    pairs = copy_augment(lines, label, source_lang=source_lang, target_lang=target_lang)
    save_parallel(pairs, out_source, out_target)
    click.echo(f"copied {len(pairs)} lines")


@select.command("build")
@click.option("--source", "source_path", type=_EXISTING_FILE, required=True)
@click.option("--target", "target_path", type=_EXISTING_FILE, required=True)
@_pair_langs
@click.option("--add", "additions", type=(str, str), multiple=True,
              help="Extra corpus as a source/target file pair; repeatable.")
@click.option("--seed", type=int, required=True, help="Shuffle seed.")
@click.option("--out-source", type=_OUT_FILE, required=True)
@click.option("--out-target", type=_OUT_FILE, required=True)
@friendly_errors
def select_build(source_path, target_path, source_lang, target_lang,
                 additions, seed, out_source, out_target):
    """Concatenate a base corpus with additions and shuffle."""
    base = load_parallel(
        source_path, target_path, source_lang=source_lang, target_lang=target_lang
    )
    extra = [
        load_parallel(src, tgt, source_lang=source_lang, target_lang=target_lang)
        for src, tgt in additions
    ]
    combined = build_finetune_set(base, extra, seed)
    save_parallel(combined, out_source, out_target)
    click.echo(f"built {len(combined)} pairs from {len(base)} + {len(additions)} additions")


# ------------------------------------------------------------------- bpe


@main.group()
def bpe():
    """Learn and apply byte-pair-encoding subword models."""


@bpe.command("learn")
@click.argument("corpora", type=_EXISTING_FILE, nargs=-1, required=True)
@click.option("-n", "--merges", "merges", type=int, required=True)
@click.option("--model", "model_path", type=_OUT_FILE, required=True)
@friendly_errors
def bpe_learn(corpora, merges, model_path):
    """Learn merges jointly over one or more tokenized corpora."""
    model = learn_bpe([_read_lines(path) for path in corpora], merges)
    save_bpe(model, model_path)
    click.echo(f"learned {model.num_merges} merges from {len(corpora)} corpora")


@bpe.command("apply")
@click.option("--model", "model_path", type=_EXISTING_FILE, required=True)
@click.argument("lines", type=click.File("r", encoding="utf-8"), default="-", required=False)
@friendly_errors
def bpe_apply(model_path, lines):
    """Segment tokenized lines; reads stdin when no file is given."""
    model = load_bpe(model_path)
    for line in lines:
        click.echo(apply_bpe(model, line.rstrip("\n")))


@bpe.command("undo")
@click.option("--separator", default="@@", show_default=True)
@click.argument("lines", type=click.File("r", encoding="utf-8"), default="-", required=False)
@friendly_errors
def bpe_undo(separator, lines):
    """Rejoin subword units; reads stdin when no file is given."""
    for line in lines:
        click.echo(undo_bpe(line.rstrip("\n"), separator))


# ------------------------------------------------------------------ eval


@main.group(name="eval")
def eval_group():
    """Score hypotheses with BLEU, chrF, and significance tests."""


@eval_group.command("bleu")
@click.option("--hyp", "hyp_path", type=_EXISTING_FILE, required=True)
@click.option("--ref", "ref_path", type=_EXISTING_FILE, required=True)
@friendly_errors
def eval_bleu(hyp_path, ref_path):
    """Corpus BLEU as a JSON report of every component."""
    result = bleu_corpus(_read_lines(hyp_path), _read_lines(ref_path))
    click.echo(json.dumps(result.as_dict(), indent=2, sort_keys=True))


@eval_group.command("chrf")
@click.option("--hyp", "hyp_path", type=_EXISTING_FILE, required=True)
@click.option("--ref", "ref_path", type=_EXISTING_FILE, required=True)
@click.option("--char-order", default=6, show_default=True)
@click.option("--beta", default=2.0, show_default=True)
@friendly_errors
def eval_chrf(hyp_path, ref_path, char_order, beta):
    """Corpus chrF as a JSON report of every component."""
    result = chrf_corpus(
        _read_lines(hyp_path), _read_lines(ref_path), char_order=char_order, beta=beta
    )
    click.echo(json.dumps(result.as_dict(), indent=2, sort_keys=True))


@eval_group.command("signif")
@click.option("--hyp-a", "hyp_a_path", type=_EXISTING_FILE, required=True)
@click.option("--hyp-b", "hyp_b_path", type=_EXISTING_FILE, required=True)
@click.option("--ref", "ref_path", type=_EXISTING_FILE, required=True)
@click.option("--metric", type=click.Choice(["bleu", "chrf"]), default="bleu",
              show_default=True)
@click.option("--iters", default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@friendly_errors
def eval_signif(hyp_a_path, hyp_b_path, ref_path, metric, iters, seed):
    """Paired bootstrap resampling between two systems."""
    result = paired_bootstrap(
        _read_lines(hyp_a_path),
        _read_lines(hyp_b_path),
        _read_lines(ref_path),
        metric=metric,
        iterations=iters,
        seed=seed,
    )
    click.echo(json.dumps(result.as_dict(), indent=2, sort_keys=True))


# -------------------------------------------------------------- pipeline


@main.group()
def pipeline():
    """Reversible pre- and post-processing for translation text."""


@pipeline.command("run")
@_pair_langs
@click.option("--identity-backend", is_flag=True,
              help="Echo the preprocessed lines back as the translation.")
@click.option("--truecaser", "truecaser_path", type=_EXISTING_FILE, default=None)
@click.option("--bpe", "bpe_path", type=_EXISTING_FILE, default=None)
@click.option("--dnt", "dnt_terms", multiple=True,
              help="Glossary term to mask verbatim; repeatable.")
@click.argument("document", type=click.File("r", encoding="utf-8"), default="-",
                required=False)
@friendly_errors
def pipeline_run(source_lang, target_lang, identity_backend, truecaser_path,
                 bpe_path, dnt_terms, document):
    """Round-trip a document through the pipeline and print the result."""
    if not identity_backend:
        raise click.UsageError(
            "offline runs support only the identity backend; pass --identity-backend"
        )
    models = PipelineModels(
        truecaser=load_truecaser(truecaser_path) if truecaser_path else None,
        bpe=load_bpe(bpe_path) if bpe_path else None,
        dnt_glossary=tuple(dnt_terms),
    )
    text = document.read()
    lines, state = preprocess(text, (source_lang, target_lang), models)
    click.echo(postprocess(lines, state, models))


# ----------------------------------------------------------------- serve


@main.group()
def serve():
    """Run the translation gateway and worker services."""


_GATEWAY_CONFIG_KEYS = {"heartbeat_timeout_s", "backend_timeout_s", "max_text_bytes"}


def build_gateway(config_path=None):
    """The ASGI gateway app configured from an optional YAML file."""
    settings = {}
    if config_path is not None:
        loaded = yaml.safe_load(Path(config_path).read_text(encoding="utf-8"))
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise click.ClickException(f"{config_path}: config must be a mapping")
        unknown = set(loaded) - _GATEWAY_CONFIG_KEYS
        if unknown:
            raise click.ClickException(
                f"{config_path}: unknown config keys: {', '.join(sorted(unknown))}"
            )
        settings = loaded
    registry = WorkerRegistry(
        heartbeat_timeout=settings.get("heartbeat_timeout_s", DEFAULT_HEARTBEAT_TIMEOUT)
    )
    return create_gateway_app(
        registry,
        backend_timeout=settings.get("backend_timeout_s", DEFAULT_BACKEND_TIMEOUT),
        max_text_bytes=settings.get("max_text_bytes", DEFAULT_MAX_TEXT_BYTES),
    )


@serve.command("gateway")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--config", "config_path", type=_EXISTING_FILE, default=None,
              help="YAML with heartbeat_timeout_s, backend_timeout_s, max_text_bytes.")
@friendly_errors
def serve_gateway(host, port, config_path):
    """Serve the translation gateway."""
    uvicorn.run(build_gateway(config_path), host=host, port=port)


def _parse_pair(pair: str) -> tuple:
    source, dash, target = pair.partition("-")
    if not dash or not is_supported_pair(source, target):
        raise click.ClickException(f"unsupported language pair: {pair!r}")
    return source, target


def _load_lexicon(path) -> dict:
    table = {}
    for i, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 2:
            raise click.ClickException(
                f"{path}: line {i}: expected 2 tab-separated columns"
            )
        table[columns[0]] = columns[1]
    return table


def _register_with_gateway(gateway_url, source, target, endpoint, worker_id):
    body = {
        "source_lang": source,
        "target_lang": target,
        "endpoint": endpoint,
        "worker_id": worker_id,
    }
    url = gateway_url.rstrip("/") + "/workers/register"
    try:
        reply = httpx.post(url, json=body, timeout=10.0)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"could not register with {gateway_url}: {exc}") from exc
    if reply.status_code != 200:
        raise click.ClickException(
            f"gateway refused registration ({reply.status_code}): {reply.text}"
        )
    return reply.json()["worker_id"]


def _heartbeat_forever(gateway_url, worker_id, every):
    url = gateway_url.rstrip("/") + "/workers/heartbeat"
    while True:
        time.sleep(every)
        try:
            httpx.post(url, json={"worker_id": worker_id}, timeout=10.0)
        except httpx.HTTPError:
            continue


@serve.command("worker")
@click.option("--pair", required=True, help="Language pair as src-tgt, e.g. en-fr.")
@click.option("--backend", "backend_mode", type=click.Choice(MOCK_MODES),
              default="identity", show_default=True)
@click.option("--lexicon", "lexicon_path", type=_EXISTING_FILE, default=None,
              help="Token TSV for the lexicon backend.")
@click.option("--gateway-url", default=None,
              help="Register here at startup and heartbeat while serving.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8001, show_default=True)
@click.option("--endpoint", default=None,
              help="Advertised endpoint when it differs from host:port.")
@click.option("--worker-id", default=None)
@click.option("--heartbeat-every", default=5.0, show_default=True)
@friendly_errors
def serve_worker(pair, backend_mode, lexicon_path, gateway_url, host, port,
                 endpoint, worker_id, heartbeat_every):
    """Serve one mock translation worker."""
    source, target = _parse_pair(pair)
    table = _load_lexicon(lexicon_path) if lexicon_path else None
    backend = mock_backend(backend_mode, lexicon_table=table)
    app = create_worker_app(source, target, backend)
    if gateway_url:
        advertised = endpoint or f"http://{host}:{port}"
        worker_id = _register_with_gateway(gateway_url, source, target, advertised, worker_id)
        click.echo(f"registered as {worker_id} for {source}-{target}")
        threading.Thread(
            target=_heartbeat_forever,
            args=(gateway_url, worker_id, heartbeat_every),
            daemon=True,
        ).start()
    uvicorn.run(app, host=host, port=port)


# ---------------------------------------------------------------- recipe


@main.group()
def recipe():
    """Run and compare declarative experiment recipes."""


@recipe.command("run")
@click.argument("recipe_file", type=_EXISTING_FILE)
@friendly_errors
def recipe_run(recipe_file):
    """Execute a recipe and print its manifest summary."""
    loaded = load_recipe(recipe_file)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StalenessWarning)
        manifest = run_recipe(loaded)
    for entry in caught:
        if issubclass(entry.category, StalenessWarning):
            click.echo(f"warning: {entry.message}", err=True)
    for i, record in enumerate(manifest.steps, start=1):
        produced = ", ".join(
            f"{record.outputs[role]['path']} ({record.outputs[role]['rows']} rows)"
            for role in sorted(record.outputs)
        )
        click.echo(f"step {i} {record.step}: {produced}")
    click.echo(f"manifest: {Path(loaded.workspace) / MANIFEST_NAME}")


@recipe.command("diff")
@click.argument("recipe_a", type=_EXISTING_FILE)
@click.argument("recipe_b", type=_EXISTING_FILE)
@click.pass_context
@friendly_errors
def recipe_diff(ctx, recipe_a, recipe_b):
    """Compare two recipes; exits 1 when they differ."""
    lines = diff_recipes(load_recipe(recipe_a), load_recipe(recipe_b))
    if not lines:
        click.echo("recipes describe the same experiment")
        return
    for line in lines:
        click.echo(line)
    ctx.exit(1)
