"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
from __future__ import annotations

import csv
import json
import sys

import click
import numpy as np

from .corpus import build_matrix, load_stoplist, read_corpus_tsv
from .estimation import estimate_parameters, growth_curve
from .fitness import parse_fitness
from .graphgen import EdgeModel, Graph, calibrate_theta, sample_graph
from .graphstats import distance_profile
from .likelihood import log_likelihood
from .matrix import load_fitness, load_matrix, save_fitness, save_matrix
from .mcmc import McmcConfig, recover_fitness, recover_fitness_normalized
from .model import ModelParams, sample_matrix
from .ranking import rank_report
from .experiment import load_config, run_experiment


@click.group()
def cli():
    """Latent-attribute network model: simulate, estimate, infer, measure."""


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@cli.command()
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--c", type=float, default=0.0, show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--fitness", "fitness_spec", required=True, help="e.g. uniform:0.25:1.75")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="matrix file")
@click.option("--fitness-out", type=click.Path(), default=None)
def generate(alpha, beta, c, n, fitness_spec, seed, out, fitness_out):
    """Sample an attribute matrix (and its fitness vector) to files."""
    params = ModelParams(alpha, beta, c)
    dist = parse_fitness(fitness_spec)
    matrix, fitness = sample_matrix(params, dist, n, seed)
    save_matrix(out, matrix, alpha=alpha, beta=beta, c=c, seed=seed)
    if fitness_out:
        save_fitness(fitness_out, fitness)
    click.echo(f"wrote {out}: n={matrix.n} features={matrix.n_features}")


@cli.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--mean-fitness", type=float, default=None, help="enables alpha_hat")
@click.option("--fit-lo", type=int, default=None)
@click.option("--fit-hi", type=int, default=None)
@click.option("--full-range", is_flag=True, help="regress over every point")
@click.option("--curve-out", type=click.Path(), default=None, help="CSV of (i, L_i)")
def estimate(matrix_file, mean_fitness, fit_lo, fit_hi, full_range, curve_out):
    """Estimate beta and alpha' (and alpha) from a matrix file; JSON to stdout."""
    matrix, _ = load_matrix(matrix_file)
    fit_range = None
    if full_range:
        fit_range = (1, matrix.n)
    elif fit_lo is not None or fit_hi is not None:
        fit_range = (fit_lo or 1, fit_hi or matrix.n)
    result = estimate_parameters(matrix, mean_fitness, fit_range)
    if curve_out:
        with open(curve_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "L_i"])
            for i, val in enumerate(growth_curve(matrix), start=1):
                writer.writerow([i, int(val)])
    _echo_json(
        {
            "beta_hat": result.beta_hat,
            "alpha_prime_hat": result.alpha_prime_hat,
            "alpha_hat": result.alpha_hat,
            "r2": result.r2,
            "fit_range": list(result.fit_range),
        }
    )


@cli.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.argument("fitness_file", type=click.Path(exists=True))
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--c", type=float, default=0.0, show_default=True)
def loglik(matrix_file, fitness_file, alpha, beta, c):
    """Log-likelihood of a matrix under a fitness vector (debugging aid)."""
    matrix, _ = load_matrix(matrix_file)
    fitness = load_fitness(fitness_file)
    value = log_likelihood(matrix, fitness, ModelParams(alpha, beta, c))
    click.echo(repr(value))


@cli.command("infer-fitness")
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--alpha", type=float, default=None, help="skip estimation")
@click.option("--beta", type=float, default=None, help="skip estimation")
@click.option("--c", type=float, default=0.0, show_default=True)
@click.option("--sigma2", type=float, default=1.0, show_default=True)
@click.option("--j", "n_candidates", type=int, default=4, show_default=True)
@click.option("--t", "tol", type=float, default=0.25, show_default=True)
@click.option("--window", type=int, default=None, help="default 5*n")
@click.option("--kn", type=int, default=None, help="restrict proposals to a prefix")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-iters", type=int, default=None, help="default 500*n")
@click.option("--trace-out", type=click.Path(), default=None, help="objective CSV")
def infer_fitness(
    matrix_file, alpha, beta, c, sigma2, n_candidates, tol, window, kn, seed, max_iters, trace_out
):
    """Recover a plausible (normalised) fitness realisation; JSON to stdout."""
    matrix, _ = load_matrix(matrix_file)
    config = McmcConfig(
        sigma2=sigma2,
        n_candidates=n_candidates,
        tol=tol,
        window=window,
        k_n=kn,
        max_iter=max_iters,
        seed=seed,
    )
    if (alpha is None) != (beta is None):
        raise click.UsageError("give both --alpha and --beta, or neither")
    if alpha is None:
        trace = recover_fitness_normalized(matrix, config, c=c)
    else:
        trace = recover_fitness(matrix, ModelParams(alpha, beta, c), config)
    if trace_out:
        with open(trace_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "log_likelihood"])
            for it, val in enumerate(trace.objective):
                writer.writerow([it, repr(float(val))])
    _echo_json(
        {
            "beta_hat": trace.beta_hat,
            "alpha_prime_hat": trace.alpha_prime_hat,
            "r_prime": [float(v) for v in trace.r_hat],
            "n_iter": trace.n_iter,
            "converged": trace.converged,
            "log_likelihood": trace.log_likelihood,
        }
    )


@cli.command("rank-eval")
@click.argument("truth_file", type=click.Path(exists=True))
@click.argument("estimate_file", type=click.Path(exists=True))
@click.option("--kn", type=int, default=None, help="extra prefix size to report")
def rank_eval(truth_file, estimate_file, kn):
    """Kendall tau and both weighted variants at sqrt(n), n/2 and n."""
    truth = load_fitness(truth_file)
    estimate = load_fitness(estimate_file)
    if truth.size != estimate.size:
        raise ValueError(
            f"value files disagree in length ({truth.size} vs {estimate.size})"
        )
    k = truth.size
    k_values = sorted({int(np.sqrt(k)), k // 2, k} | ({int(kn)} if kn else set()))
    k_values = [v for v in k_values if v >= 2]
    _echo_json({str(k): v for k, v in rank_report(truth, estimate, k_values).items()})


@cli.command()
@click.argument("matrix_file", type=click.Path(exists=True))
@click.option("--model", "kind", type=click.Choice(["ff", "ffba", "ffjr"]), default="ff")
@click.option("--k", "K", type=float, default=4.0, show_default=True, help="inf allowed")
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--theta", type=float, default=None, help="skip calibration")
@click.option("--target-m", type=float, default=None, help="expected edge count")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="edge list file")
def graph(matrix_file, kind, K, delta, theta, target_m, seed, out):
    """Draw a graph from a matrix under the FF / FFBA / FFJR models."""
    matrix, _ = load_matrix(matrix_file)
    if (theta is None) == (target_m is None):
        raise click.UsageError("give exactly one of --theta / --target-m")
    if theta is None:
        target = delta * target_m if kind == "ffjr" else target_m
        theta = calibrate_theta(matrix, K, target)
    model = EdgeModel(kind=kind, K=K, theta=theta, delta=delta)
    g = sample_graph(matrix, model, seed)
    with open(out, "w") as fh:
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")
    meta = {
        "model": kind,
        "K": K,
        "theta": theta,
        "delta": delta,
        "seed": seed,
        "n": g.n,
        "m_realized": g.num_edges,
    }
    with open(out + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _echo_json(meta)


@cli.command()
@click.argument("edge_file", type=click.Path(exists=True))
@click.option("--n", type=int, default=None, help="node count if larger than max id + 1")
@click.option("--sources", type=int, default=None, help="sampled-BFS source count")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--degrees-out", type=click.Path(), default=None)
@click.option("--distances-out", type=click.Path(), default=None)
def stats(edge_file, n, sources, seed, degrees_out, distances_out):
    """Topology report for an edge-list file; JSON summary to stdout."""
    edges = []
    with open(edge_file) as fh:
        for line in fh:
            if line.strip():
                i, j = line.split()
                edges.append((int(i), int(j)))
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n_nodes = int(edges.max()) + 1 if edges.size else 0
    if n is not None:
        n_nodes = max(n, n_nodes)
    g = Graph(n_nodes, edges)
    report = distance_profile(g, sources, seed)
    if degrees_out:
        with open(degrees_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["degree", "count"])
            for deg in sorted(report.degree_histogram):
                writer.writerow([deg, report.degree_histogram[deg]])
    if distances_out:
        with open(distances_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "cdf"])
            for k, val in enumerate(report.distance_cdf):
                writer.writerow([k, repr(float(val))])
    _echo_json(
        {
            "reachable_fraction": report.reachable_fraction,
            "n": g.n,
            "m": g.num_edges,
            "method": report.method,
        }
    )


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True,
              help="TSV of (id, date, title, abstract) in corpus order")
@click.option("--stoplist", type=click.Path(exists=True), default=None)
@click.option("--min-token-len", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="matrix file")
@click.option("--features-out", type=click.Path(), default=None, help="id->word TSV")
def ingest(input_path, stoplist, min_token_len, out, features_out):
    """Build a left-ordered matrix from an ordered document corpus."""
    _, texts = read_corpus_tsv(input_path)
    stopwords = load_stoplist(stoplist) if stoplist else frozenset()
    matrix, names, skipped = build_matrix(texts, stopwords, min_token_len)
    save_matrix(out, matrix)
    if features_out:
        with open(features_out, "w") as fh:
            for idx, name in enumerate(names):
                fh.write(f"{idx}\t{name}\n")
    _echo_json(
        {
            "n": matrix.n,
            "n_features": matrix.n_features,
            "ones": matrix.ones_count,
            "documents_without_tokens": skipped,
        }
    )


@cli.command()
@click.argument("config_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="override config output dir")
@click.option("--workers", type=int, default=1, show_default=True)
def run(config_file, out, workers):
    """Run a declarative experiment config; writes an artifact directory."""
    config = load_config(config_file)
    out_root = out or config.get("output")
    if not out_root:
        raise click.UsageError("give --out or an `output` key in the config")
    manifest = run_experiment(config, out_root, workers)
    click.echo(f"wrote {out_root}: {len(manifest['cells'])} cells")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:  # --help and friends
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
