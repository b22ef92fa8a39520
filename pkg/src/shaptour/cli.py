"""Command line entry points: precompute a bundle, serve a bundle."""

from __future__ import annotations

import sys

import click

from .bundle import save_bundle
from .dataset import load_csv
from .errors import BundleError, DataValidationError, PipelineStageError
from .forest import Hyperparams, default_hyper
from .pipeline import compute_bundle

EXIT_VALIDATION = 2
EXIT_INTERNAL = 1


def _stderr(msg: str) -> None:
    click.echo(msg, err=True)


@click.group()
def main():
    """Precompute and serve radial-tour explorations of forest attributions."""


@main.command()
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=False), help="input CSV (header row required)")
@click.option("--response", "response_column", required=True,
              help="name of the response column")
@click.option("--task", type=click.Choice(["auto", "classification", "regression"]),
              default="auto", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trees", type=int, default=None, help="number of trees")
@click.option("--mtry", type=int, default=None, help="features sampled per split")
@click.option("--min-node", type=int, default=None, help="minimum terminal node size")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="output bundle path (JSON)")
def precompute(data_path, response_column, task, seed, trees, mtry, min_node, out_path):
    """Fit the forest, attribute every observation, and write the bundle."""
    try:
        ds = load_csv(data_path, response_column=response_column, task=task)
        _stderr(f"loaded {ds.name}: n={ds.n} p={ds.p} task={ds.task}")
        base = default_hyper(ds.task, ds.n, ds.p)
        hyper = Hyperparams(
            n_trees=trees if trees is not None else base.n_trees,
            mtry=mtry if mtry is not None else base.mtry,
            min_node=min_node if min_node is not None else base.min_node,
        )
        bundle = compute_bundle(ds, hyper=hyper, seed=seed, log=_stderr)
        save_bundle(bundle, out_path)
    except DataValidationError as exc:
        _stderr(f"validation error: {exc}")
        sys.exit(EXIT_VALIDATION)
    except PipelineStageError as exc:
        _stderr(f"error: {exc}")
        sys.exit(EXIT_INTERNAL)
    except OSError as exc:
        _stderr(f"io error: {exc}")
        sys.exit(EXIT_INTERNAL)
    _stderr(f"wrote {out_path}")


@main.command()
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--port", type=int, default=8700, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(bundle_path, port, host):
    """Serve a precomputed bundle over HTTP (plus the UI, when built)."""
    from .service import serve as run

    try:
        run(bundle_path, port=port, host=host)
    except BundleError as exc:
        _stderr(f"bundle error: {exc}")
        sys.exit(EXIT_VALIDATION)
    except OSError as exc:
        _stderr(f"cannot serve: {exc}")
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    main()
