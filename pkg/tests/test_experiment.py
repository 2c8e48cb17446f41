import hashlib
import json
from pathlib import Path

import pytest
import yaml

from ibpnet.experiment import load_config, run_experiment


def write_config(path, **overrides):
    config = {
        "seed": 42,
        "n": 120,
        "replicas": 2,
        "model": {"alpha": 3.0, "beta": 0.5, "c": 0.0},
        "fitness": "uniform:0.25:1.75",
        "steps": ["generate", "estimate"],
    }
    config.update(overrides)
    path.write_text(yaml.safe_dump(config))
    return config


def tree_digest(root: Path) -> str:
    blobs = []
    for p in sorted(root.rglob("*")):
        if p.is_file():
            blobs.append(str(p.relative_to(root)).encode())
            blobs.append(p.read_bytes())
    return hashlib.sha256(b"".join(blobs)).hexdigest()


class TestRunner:
    def test_pipeline_produces_artifacts_and_manifest(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(
            cfg_path,
            steps=[
                "generate",
                "estimate",
                {"graph": {"model": "ff", "K": 4.0, "target_m": 300}},
                "stats",
            ],
        )
        out = tmp_path / "out"
        manifest = run_experiment(load_config(cfg_path), out)
        assert (out / "manifest.json").exists()
        cell = out / manifest["cells"][0]["dir"]
        for name in (
            "matrix.txt",
            "fitness.txt",
            "estimate.json",
            "curve.csv",
            "graph.txt",
            "graph.txt.json",
            "stats.json",
            "degree.csv",
            "distance.csv",
        ):
            assert (cell / name).exists(), name

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        config = write_config(cfg_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_experiment(load_config(cfg_path), out1)
        run_experiment(config, out2)
        assert tree_digest(out1) == tree_digest(out2)

    def test_sweep_creates_one_directory_per_combination(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(
            cfg_path, model={"alpha": 3.0, "beta": [0.5, 0.75], "c": 0.0}, replicas=1
        )
        out = tmp_path / "out"
        manifest = run_experiment(load_config(cfg_path), out)
        assert len(manifest["cells"]) == 2
        labels = {Path(c["dir"]).parent.name for c in manifest["cells"]}
        assert labels == {"alpha3_beta0.5_c0_n120", "alpha3_beta0.75_c0_n120"}

    def test_zero_replicas_writes_manifest_only(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(cfg_path, replicas=0)
        out = tmp_path / "out"
        manifest = run_experiment(load_config(cfg_path), out)
        assert manifest["cells"] == []
        assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]

    def test_parallel_workers_match_serial_output(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(cfg_path, replicas=2)
        out1, out2 = tmp_path / "serial", tmp_path / "parallel"
        run_experiment(load_config(cfg_path), out1, workers=1)
        run_experiment(load_config(cfg_path), out2, workers=2)
        assert tree_digest(out1) == tree_digest(out2)

    def test_replicas_differ_from_each_other(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(cfg_path, replicas=2)
        out = tmp_path / "out"
        manifest = run_experiment(load_config(cfg_path), out)
        a, b = (out / c["dir"] / "matrix.txt" for c in manifest["cells"][:2])
        assert a.read_bytes() != b.read_bytes()

    def test_stats_without_graph_fails_with_step_name(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(cfg_path, steps=["generate", "stats"])
        with pytest.raises(ValueError, match="stats"):
            run_experiment(load_config(cfg_path), tmp_path / "out")

    def test_unknown_step_rejected(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        write_config(cfg_path, steps=["generate", "frobnicate"])
        with pytest.raises(ValueError, match="frobnicate"):
            run_experiment(load_config(cfg_path), tmp_path / "out")

    def test_missing_required_key_rejected(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        cfg_path.write_text(yaml.safe_dump({"n": 10, "fitness": "uniform:1:1"}))
        with pytest.raises(ValueError, match="seed"):
            load_config(cfg_path)


class TestManifest:
    def test_manifest_echoes_config_and_seeds(self, tmp_path):
        cfg_path = tmp_path / "exp.yaml"
        config = write_config(cfg_path)
        out = tmp_path / "out"
        run_experiment(load_config(cfg_path), out)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"] == config
        assert manifest["master_seed"] == 42
        assert all("outputs" in cell for cell in manifest["cells"])
