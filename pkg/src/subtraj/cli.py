"""Command line entry point: ``subtraj cluster|sweep|synth|verify|bench|convert``."""

from __future__ import annotations

import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .datasets import convert_trip_files, generate_synthetic, load_dataset, write_dataset
from .experiment import METRIC_COLUMNS, ExperimentConfig, bench_sc, run_experiment, scoring_vector_protocol
from .trajectory import concatenate

SWEEP_ELLS = (4, 8, 16, 32, 64)
SWEEP_MS = (2, 4, 8, 16)

_ALGOS = click.Choice(["SC-l", "SC-m", "PSC"])
_OBJECTIVES = click.Choice(["k-centre", "k-means"])


def _delta_options(f):
    f = click.option("--delta-max", type=float, default=None,
                     help="Largest Delta tried; defaults to the bounding-box diagonal.")(f)
    f = click.option("--delta-min", type=float, default=2.0, show_default=True,
                     help="Smallest Delta; the schedule doubles from here.")(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Subtrajectory clustering under the discrete Fréchet distance."""


@main.command()
@click.option("--dataset", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--algo", type=_ALGOS, required=True)
@click.option("--objective", type=_OBJECTIVES, default="k-means", show_default=True)
@click.option("--ell", type=int, default=None, help="Centre length in edges (SC-l).")
@click.option("--m", "m", type=int, default=None, help="Cluster cardinality (SC-m).")
@click.option("--c1", type=float, default=1.0, show_default=True)
@click.option("--c2", type=float, required=True)
@click.option("--c3", type=float, default=None, help="Defaults to the number of trajectories.")
@_delta_options
@click.option("--time-limit", type=float, default=3600.0, show_default=True, help="Seconds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dense", is_flag=True, help="Scan rows densely instead of using the range index.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.option("--name", default=None, help="Output file stem; defaults to the configuration name.")
def cluster(dataset, algo, objective, ell, m, c1, c2, c3, delta_min, delta_max, time_limit, seed,
            dense, out_dir, name):
    """Run one clustering configuration and write its CSV row and JSON clustering."""
    if c3 is None:
        c3 = float(len(load_dataset(dataset)))
    try:
        config = ExperimentConfig(algo, objective, (c1, c2, c3), dataset=dataset, ell=ell, m=m,
                                  delta_min=delta_min, delta_max=delta_max, time_limit=time_limit,
                                  seed=seed, dense=dense)
        config.clustering_config()
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    row, _ = run_experiment(config, out_dir, name)
    click.echo(row.to_csv(objective=objective), nl=False)


def _sweep_configs(dataset, objective, vectors, delta_min, delta_max, time_limit, seed):
    for vec in vectors:
        base = dict(objective=objective, vector=tuple(vec), dataset=dataset, delta_min=delta_min,
                    delta_max=delta_max, time_limit=time_limit, seed=seed)
        for ell in SWEEP_ELLS:
            yield f"SC-l-{ell}", ExperimentConfig("SC-l", ell=ell, **base)
        for m in SWEEP_MS:
            yield f"SC-m-{m}", ExperimentConfig("SC-m", m=m, **base)
        yield "PSC", ExperimentConfig("PSC", **base)


def _run_one(args):
    name, config, out_dir = args
    c2 = f"{config.vector[1]:g}"
    row, _ = run_experiment(config, out_dir, f"{name}_c2-{c2}_{config.objective}")
    return row


@main.command()
@click.option("--dataset", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--objective", type=_OBJECTIVES, default="k-means", show_default=True)
@click.option("--base-c2", type=float, required=True, help="c2 of the middle scoring vector.")
@_delta_options
@click.option("--time-limit", type=float, default=3600.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
def sweep(dataset, objective, base_c2, delta_min, delta_max, time_limit, seed, workers, out_dir):
    """Run every l, m and PSC configuration for the three protocol scoring vectors."""
    count = len(load_dataset(dataset))
    vectors = scoring_vector_protocol(count, base_c2)
    jobs = [(name, cfg, out_dir) for name, cfg in
            _sweep_configs(dataset, objective, vectors, delta_min, delta_max, time_limit, seed)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    else:
        rows = [_run_one(job) for job in jobs]
    cols = list(METRIC_COLUMNS)
    cols[7] = "kMeans" if objective == "k-means" else "kCenters"
    out = Path(out_dir) / f"sweep_{objective}.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow(row.cells())
    click.echo(out.read_text(), nl=False)


@main.command()
@click.option("--domain", "domain_size", type=int, default=100, show_default=True)
@click.option("--trajectories", type=int, default=100, show_default=True)
@click.option("--c", "c_percent", type=float, required=True, help="Percent of the domain per trajectory.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def synth(domain_size, trajectories, c_percent, seed, output):
    """Generate a synthetic dataset from a random domain and a TSP ordering."""
    try:
        trajs = generate_synthetic(domain_size, trajectories, c_percent, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    write_dataset(trajs, output)
    click.echo(f"{len(trajs)} trajectories, {sum(len(t) for t in trajs)} vertices -> {output}")


@main.command()
@click.option("--scale", type=float, default=0.1, show_default=True,
              help="Fraction of the full instance counts to run.")
@click.option("--seed", type=int, default=0, show_default=True)
def verify(scale, seed):
    """Check the solvers against the brute-force oracles on small random inputs."""
    from .verify import run_all

    ok = True
    for result in run_all(scale, seed):
        click.echo(result.line())
        ok &= result.passed
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--dataset", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--delta", "deltas", type=float, multiple=True, default=(50.0, 100.0, 200.0), show_default=True)
@click.option("--m", "ms", type=int, multiple=True, default=(10, 20, 40), show_default=True)
@click.option("--dense", is_flag=True)
def bench(dataset, deltas, ms, dense):
    """Time single SC(m, max, Delta) calls over a grid of Delta and m."""
    store = concatenate(load_dataset(dataset))
    bench_sc(store, deltas[:1], ms[:1], dense=dense)  # compile outside the timings
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["Name", "Delta", "m", "Seconds", "GBytes", "l"])
    for r in bench_sc(store, deltas, ms, dense=dense):
        w.writerow([r.name, f"{r.delta:g}", r.m, f"{r.seconds:.2f}", f"{r.peak_bytes / 1e9:.2f}", r.ell])


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.argument("output", type=click.Path(dir_okay=False))
def convert(directory, output):
    """Merge a directory of per-trip files into one dataset file."""
    count, vertices = convert_trip_files(directory, output)
    click.echo(f"{count} trajectories, {vertices} vertices -> {output}")


if __name__ == "__main__":
    main()
