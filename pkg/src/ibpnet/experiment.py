"""Declarative experiment runner.

One YAML config describes one experiment: model parameters (scalars or
sweep lists), a fitness spec, replica count and the pipeline steps to run on
every generated matrix.  Each (parameter combination, replica) gets its own
subdirectory and an RNG seeded from the master seed by its position, so a
rerun reproduces every output byte for byte.

Config schema (keys in any order)::

    seed: 42                      # master seed, required
    n: 500                        # nodes, scalar or list
    replicas: 3                   # matrices per parameter combination
    model: {alpha: 3.0, beta: [0.5, 0.75], c: 0.0}   # scalars or lists
    fitness: uniform:0.25:1.75
    steps:                        # any of the following, with options
      - generate                  # implied; writes matrix.txt + fitness.txt
      - estimate                  # estimate.json + curve.csv
      - infer-fitness: {tol: 1.0, max_iter: 20000}
      - graph: {model: ff, K: 4.0, target_m: 4000}
      - stats
    output: out-dir               # may be overridden on the command line
"""
from __future__ import annotations

import csv
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import yaml

from . import __version__
from .estimation import estimate_parameters, growth_curve
from .fitness import parse_fitness
from .graphgen import EdgeModel, calibrate_theta, sample_graph
from .graphstats import distance_profile
from .matrix import save_fitness, save_matrix
from .mcmc import McmcConfig, recover_fitness_normalized
from .model import ModelParams, sample_matrix

__all__ = ["load_config", "run_experiment"]

_SWEEP_KEYS = ("alpha", "beta", "c", "n")


def load_config(path) -> dict:
    with open(path) as fh:
        config = yaml.safe_load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"{path}: config must be a mapping")
    for key in ("seed", "n", "fitness"):
        if key not in config and not (key in config.get("model", {})):
            raise ValueError(f"config is missing required key {key!r}")
    return config


def _combinations(config):
    model = dict(config.get("model", {}))
    model.setdefault("alpha", 3.0)
    model.setdefault("beta", 0.5)
    model.setdefault("c", 0.0)
    model["n"] = config["n"]
    lists = {
        k: (v if isinstance(v, (list, tuple)) else [v]) for k, v in model.items()
    }
    for combo in itertools.product(*(lists[k] for k in _SWEEP_KEYS)):
        yield dict(zip(_SWEEP_KEYS, combo))


def _normalize_steps(config):
    steps = []
    for entry in config.get("steps", ["generate"]):
        if isinstance(entry, str):
            steps.append((entry.replace("_", "-"), {}))
        elif isinstance(entry, dict) and len(entry) == 1:
            name, opts = next(iter(entry.items()))
            steps.append((name.replace("_", "-"), opts or {}))
        else:
            raise ValueError(f"malformed step entry: {entry!r}")
    names = [s[0] for s in steps]
    known = {"generate", "estimate", "infer-fitness", "graph", "stats"}
    unknown = set(names) - known
    if unknown:
        raise ValueError(f"unknown steps: {sorted(unknown)}")
    if "generate" not in names:
        steps.insert(0, ("generate", {}))
    return steps


def _combo_label(combo) -> str:
    return "alpha{alpha:g}_beta{beta:g}_c{c:g}_n{n}".format(**combo)


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_curve_csv(path, curve) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "L_i"])
        for i, value in enumerate(curve, start=1):
            writer.writerow([i, int(value)])


def _run_cell(args):
    """One (combo, replica) pipeline; separate function so it can fork."""
    out_dir, combo, replica, steps, fitness_spec, master_seed, combo_idx = args
    os.makedirs(out_dir, exist_ok=True)
    seed_seq = np.random.SeedSequence(master_seed, spawn_key=(combo_idx, replica))
    seeds = seed_seq.generate_state(4)
    params = ModelParams(combo["alpha"], combo["beta"], combo["c"])
    dist = parse_fitness(fitness_spec)
    matrix, fitness = sample_matrix(
        params, dist, int(combo["n"]), np.random.default_rng(int(seeds[0]))
    )
    produced = {}
    for name, opts in steps:
        if name == "generate":
            save_matrix(
                out_dir + "/matrix.txt",
                matrix,
                alpha=combo["alpha"],
                beta=combo["beta"],
                c=combo["c"],
                seed=int(seeds[0]),
            )
            save_fitness(out_dir + "/fitness.txt", fitness)
            produced["generate"] = ["matrix.txt", "fitness.txt"]
        elif name == "estimate":
            result = estimate_parameters(matrix, mean_fitness=opts.get("mean_fitness"))
            _write_json(
                out_dir + "/estimate.json",
                {
                    "beta_hat": result.beta_hat,
                    "alpha_prime_hat": result.alpha_prime_hat,
                    "alpha_hat": result.alpha_hat,
                    "r2": result.r2,
                    "fit_range": list(result.fit_range),
                },
            )
            _write_curve_csv(out_dir + "/curve.csv", growth_curve(matrix))
            produced["estimate"] = ["estimate.json", "curve.csv"]
        elif name == "infer-fitness":
            config = McmcConfig(
                sigma2=opts.get("sigma2", 1.0),
                n_candidates=opts.get("n_candidates", 4),
                r_init=opts.get("r_init", 1.0),
                tol=opts.get("tol", 0.25),
                window=opts.get("window"),
                k_n=opts.get("k_n"),
                max_iter=opts.get("max_iter"),
                seed=int(seeds[1]),
            )
            trace = recover_fitness_normalized(matrix, config)
            _write_json(
                out_dir + "/infer.json",
                {
                    "beta_hat": trace.beta_hat,
                    "alpha_prime_hat": trace.alpha_prime_hat,
                    "r_prime": [float(v) for v in trace.r_hat],
                    "n_iter": trace.n_iter,
                    "converged": trace.converged,
                    "log_likelihood": trace.log_likelihood,
                },
            )
            produced["infer-fitness"] = ["infer.json"]
        elif name == "graph":
            kind = opts.get("model", "ff")
            K = float(opts.get("K", 4.0))
            delta = float(opts.get("delta", 1.0))
            if "theta" in opts:
                theta = float(opts["theta"])
            else:
                target = float(opts.get("target_m", 2 * matrix.n))
                if kind == "ffjr":
                    target = delta * target
                theta = calibrate_theta(matrix, K, target)
            model = EdgeModel(kind=kind, K=K, theta=theta, delta=delta)
            graph = sample_graph(matrix, model, np.random.default_rng(int(seeds[2])))
            with open(out_dir + "/graph.txt", "w") as fh:
                for i, j in graph.edges:
                    fh.write(f"{i} {j}\n")
            _write_json(
                out_dir + "/graph.txt.json",
                {
                    "model": kind,
                    "K": K,
                    "theta": theta,
                    "delta": delta,
                    "seed": int(seeds[2]),
                    "n": graph.n,
                    "m_realized": graph.num_edges,
                },
            )
            produced["graph"] = ["graph.txt", "graph.txt.json"]
            produced["_graph_obj"] = graph
        elif name == "stats":
            graph = produced.get("_graph_obj")
            if graph is None:
                raise ValueError("the stats step needs a graph step before it")
            report = distance_profile(graph, opts.get("sources"), int(seeds[3]))
            with open(out_dir + "/degree.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["degree", "count"])
                for deg in sorted(report.degree_histogram):
                    writer.writerow([deg, report.degree_histogram[deg]])
            with open(out_dir + "/distance.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["k", "cdf"])
                for k, val in enumerate(report.distance_cdf):
                    writer.writerow([k, repr(float(val))])
            _write_json(
                out_dir + "/stats.json",
                {
                    "reachable_fraction": report.reachable_fraction,
                    "n": graph.n,
                    "m": graph.num_edges,
                    "method": report.method,
                },
            )
            produced["stats"] = ["degree.csv", "distance.csv", "stats.json"]
    produced.pop("_graph_obj", None)
    return out_dir, produced


def run_experiment(config: dict, out_root, workers: int = 1) -> dict:
    """Execute the config; returns the manifest (also written to disk)."""
    os.makedirs(out_root, exist_ok=True)
    steps = _normalize_steps(config)
    master_seed = int(config["seed"])
    replicas = int(config.get("replicas", 1))
    fitness_spec = config["fitness"]

    tasks = []
    cells = []
    for combo_idx, combo in enumerate(_combinations(config)):
        label = _combo_label(combo)
        for rep in range(replicas):
            rel_dir = os.path.join(label, f"rep{rep:03d}")
            tasks.append(
                (
                    os.path.join(out_root, rel_dir),
                    combo,
                    rep,
                    steps,
                    fitness_spec,
                    master_seed,
                    combo_idx,
                )
            )
            # relative paths keep the manifest identical across reruns
            cells.append({"combo": combo, "replica": rep, "dir": rel_dir})

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    for cell, (_, produced) in zip(cells, results):
        cell["outputs"] = produced

    manifest = {
        "config": config,
        "version": __version__,
        "master_seed": master_seed,
        "cells": cells,
    }
    _write_json(os.path.join(out_root, "manifest.json"), manifest)
    return manifest
