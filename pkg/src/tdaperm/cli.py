"""Command-line front end wiring the full pipeline.

Subcommands: ``ph`` (point cloud or graph to diagram CSV), ``summarize``
(diagram to summary-vector CSV), ``distmat`` (diagrams to a pairwise
distance matrix), ``permtest`` (distance matrix to a permutation-test
result), ``power`` (config JSON to a power table) and ``bench`` (timing
table).  Every subcommand is deterministic given its flags and seed; output
goes to --output when given, stdout otherwise.  Exit codes: 0 success, 2
validation or parse failure, 3 resource cap exceeded.
"""

from __future__ import annotations

import io
import json
import math
import sys

import click

from .diagram import load_diagrams, save_diagrams
from .distances import distance_matrix, save_distance_matrix, load_distance_matrix, DISTANCE_METHODS
from .errors import ParseError, ResourceCapError, ValidationError
from .experiments import ExperimentConfig, run_benchmark, run_power_experiment
from .filtration import (
    DEFAULT_SIMPLEX_CAP,
    build_lower_star,
    build_rips,
    load_graph,
    load_points,
)
from .permutation import (
    GroupLabels,
    exact_permutation_pvalue,
    permutation_pvalue,
    save_test_result,
)
from .persistence import compute_persistence
from .summaries import (
    ImageConfig,
    ScaleGrid,
    betti_samples,
    landscape_vector,
    persistence_image,
    save_vector,
    vab,
)

SUMMARY_KINDS = ("vab", "betti-samples", "landscape", "image")


def _emit(ctx, text):
    out = ctx.obj.get("output")
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _render(save_fn, obj):
    buf = io.StringIO()
    save_fn(obj, buf)
    return buf.getvalue()


def _parse_p(value):
    if value == "inf":
        return math.inf
    p = float(value)
    return int(p) if p in (1.0, 2.0) else p


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for randomized subcommands.")
@click.option("--output", type=click.Path(dir_okay=False, writable=True),
              default=None, help="Write output here instead of stdout.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker threads for distance matrices.")
@click.pass_context
def cli(ctx, seed, output, threads):
    """Persistence diagrams, summaries, distances and permutation tests."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, output=output, threads=threads)


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-dim", type=int, default=1, show_default=True,
              help="Top simplex dimension for the Rips complex.")
@click.option("--threshold", type=float, default=None,
              help="Rips scale cutoff (default: enclosing radius).")
@click.option("--hom-dim", type=int, default=None,
              help="Highest homology dimension to report (default: all).")
@click.option("--fill-triangles", is_flag=True,
              help="Add 3-cliques to graph lower-star filtrations.")
@click.option("--cap", type=int, default=DEFAULT_SIMPLEX_CAP, show_default=True,
              help="Abort if the complex would exceed this many simplices.")
@click.pass_context
def ph(ctx, input_path, max_dim, threshold, hom_dim, fill_triangles, cap):
    """Compute persistence diagrams for a point-cloud CSV or graph JSON."""
    if _looks_like_graph(input_path):
        filt = build_lower_star(load_graph(input_path),
                                fill_triangles=fill_triangles, simplex_cap=cap)
    else:
        filt = build_rips(load_points(input_path), max_dim=max_dim,
                          threshold=threshold, simplex_cap=cap)
    diagrams = compute_persistence(filt, max_hom_dim=hom_dim)
    _emit(ctx, _render(save_diagrams, {d: dgm for d, dgm in enumerate(diagrams)}))


def _looks_like_graph(path):
    if path.endswith(".json"):
        return True
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(64).lstrip()
    return head.startswith("{")


def _diagram_range(dgm):
    deaths = dgm.deaths
    finite = deaths[dgm.finite_mask]
    top = float(finite.max()) if finite.size else 0.0
    births = dgm.births
    if births.size:
        top = max(top, float(births.max()))
    return top if top > 0 else 1.0


@cli.command()
@click.argument("diagram_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(SUMMARY_KINDS), default="vab",
              show_default=True)
@click.option("--dim", type=int, default=0, show_default=True,
              help="Homology dimension to summarize.")
@click.option("--grid-size", type=int, default=None,
              help="Scale-grid points (default 100; 20 cells per axis for image).")
@click.option("--k", type=int, default=1, show_default=True,
              help="Landscape level.")
@click.option("--sigma", type=float, default=None,
              help="Image kernel width (default: half max persistence / cells).")
@click.pass_context
def summarize(ctx, diagram_path, kind, dim, grid_size, k, sigma):
    """Vectorize one diagram from a diagram CSV."""
    diagrams = load_diagrams(diagram_path)
    if dim not in diagrams:
        raise ValidationError(f"no dimension-{dim} diagram in {diagram_path}")
    dgm = diagrams[dim]
    top = _diagram_range(dgm)
    if kind == "image":
        cells = 20 if grid_size is None else grid_size
        finite = dgm.truncate_deaths(top)
        pmax = finite.max_persistence()
        if sigma is None:
            sigma = 0.5 * (pmax if pmax > 0 else 1.0) / cells
        axis = ScaleGrid.linspace(0.0, top, cells + 1)
        vec = persistence_image(finite, ImageConfig(axis, axis, sigma))
    else:
        size = 100 if grid_size is None else grid_size
        grid = ScaleGrid.linspace(0.0, top, size)
        if kind == "vab":
            vec = vab(dgm, grid)
        elif kind == "betti-samples":
            vec = betti_samples(dgm, grid)
        else:
            vec = landscape_vector(dgm.truncate_deaths(top), k, grid)
    _emit(ctx, _render(save_vector, vec))


@cli.command()
@click.argument("diagram_paths", type=click.Path(exists=True, dir_okay=False),
                nargs=-1, required=True)
@click.option("--method", type=click.Choice(DISTANCE_METHODS), required=True)
@click.option("--p", type=click.Choice(["1", "2", "inf"]), default="1",
              show_default=True, help="Planar norm for Wasserstein.")
@click.option("--q", type=float, default=1.0, show_default=True,
              help="Outer exponent for Wasserstein.")
@click.option("--directions", type=int, default=10, show_default=True,
              help="Projection directions for the sliced distance.")
@click.option("--dim", type=int, default=0, show_default=True,
              help="Homology dimension to read from each file.")
@click.option("--grid-size", type=int, default=None,
              help="Scale-grid points (default 100; 20 cells per axis for pi).")
@click.option("--k", type=int, default=1, show_default=True,
              help="Landscape level for method pl.")
@click.option("--sigma", type=float, default=None,
              help="Image kernel width for method pi.")
@click.pass_context
def distmat(ctx, diagram_paths, method, p, q, directions, dim, grid_size, k, sigma):
    """Pairwise distance matrix over one diagram per input file."""
    diagrams = []
    for path in diagram_paths:
        per_dim = load_diagrams(path)
        if dim not in per_dim:
            raise ValidationError(f"no dimension-{dim} diagram in {path}")
        diagrams.append(per_dim[dim])
    kwargs = dict(p=_parse_p(p), q=q, n_directions=directions, k=k,
                  sigma=sigma, threads=ctx.obj["threads"])
    if grid_size is not None:
        if method == "pi":
            kwargs["image_cells"] = grid_size
        else:
            kwargs["grid_size"] = grid_size
    dm = distance_matrix(diagrams, method, **kwargs)
    _emit(ctx, _render(save_distance_matrix, dm))


@cli.command()
@click.argument("matrix_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", required=True,
              help="Comma-separated group labels, e.g. 1,1,2,2.")
@click.option("--permutations", type=int, default=1000, show_default=True)
@click.option("--mixing", type=click.Choice(["standard", "strong", "exhaustive"]),
              default="standard", show_default=True)
@click.option("--q", type=float, default=1.0, show_default=True,
              help="Loss exponent on matrix entries.")
@click.pass_context
def permtest(ctx, matrix_path, labels, permutations, mixing, q):
    """Two-group permutation test on a saved distance matrix."""
    dm = load_distance_matrix(matrix_path)
    try:
        values = [int(tok) for tok in labels.split(",")]
    except ValueError:
        raise ValidationError(f"labels must be comma-separated integers, got {labels!r}") from None
    groups = GroupLabels(values)
    if mixing == "exhaustive":
        result = exact_permutation_pvalue(dm, groups, q=q)
    else:
        result = permutation_pvalue(dm, groups, n_perms=permutations,
                                    mixing=mixing, q=q, seed=ctx.obj["seed"])
    _emit(ctx, _render(save_test_result, result))


@cli.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment config JSON.")
@click.pass_context
def power(ctx, config_path):
    """Monte-Carlo power table for a configured experiment."""
    with open(config_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid experiment config JSON: {exc}") from None
    if isinstance(obj, dict) and "seed" not in obj:
        obj["seed"] = ctx.obj["seed"]
    cfg = ExperimentConfig.from_json(json.dumps(obj))
    report = run_power_experiment(cfg)
    _emit(ctx, report.to_csv())


def _parse_int_list(text, flag):
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ValidationError(f"{flag} must be comma-separated integers, got {text!r}") from None


@cli.command()
@click.option("--sizes", default="100", show_default=True,
              help="Comma-separated diagram sizes.")
@click.option("--counts", default="10", show_default=True,
              help="Comma-separated diagram counts.")
@click.option("--repeats", type=int, default=3, show_default=True)
@click.option("--methods", default="vab", show_default=True,
              help="Comma-separated distance methods.")
@click.pass_context
def bench(ctx, sizes, counts, repeats, methods):
    """Median distance-matrix timings as a JSON array."""
    method_list = [tok.strip() for tok in methods.split(",")]
    rows = []
    for n in _parse_int_list(counts, "--counts"):
        for size in _parse_int_list(sizes, "--sizes"):
            rows.extend(run_benchmark(n, size, method_list, repeats=repeats,
                                      seed=ctx.obj["seed"]))
    _emit(ctx, json.dumps(rows, sort_keys=True) + "\n")


def main(argv=None):
    """Entry point returning a process exit code."""
    try:
        cli.main(args=argv, prog_name="tdaperm", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (ValidationError, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
