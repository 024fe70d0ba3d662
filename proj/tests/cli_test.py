#!/usr/bin/env python3
"""End-to-end checks of the qclust command-line tool.

Usage: cli_test.py <path-to-qclust>

Covers exit codes and error JSON, CSV/FSK1 ingestion, report structure,
model export, report comparison, reproducibility, and dump files.
"""

import json
import math
import os
import subprocess
import sys
import tempfile

CHECKS = 0


def fail(message):
    print(f"cli_test FAIL: {message}", file=sys.stderr)
    sys.exit(1)


def check(condition, message):
    global CHECKS
    if not condition:
        fail(message)
    CHECKS += 1


def run(qclust, *args):
    proc = subprocess.run(
        [qclust, *args], capture_output=True, text=True, timeout=300
    )
    return proc.returncode, proc.stdout, proc.stderr


def write_blob_csv(path):
    """Ten labeled series in two well-separated groups (5 + 5, length 12)."""
    rows = []
    for label, (base, step) in enumerate([(0.0, 0.1), (50.0, -0.2)]):
        for p in range(5):
            values = [base + step * j + 0.01 * ((p + j) % 3) for j in range(12)]
            rows.append([label] + values)
    with open(path, "w", encoding="ascii") as f:
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    return len(rows)


def main():
    if len(sys.argv) != 2:
        fail("usage: cli_test.py <path-to-qclust>")
    qclust = sys.argv[1]
    tmp = tempfile.mkdtemp(prefix="qclust_cli_")

    # --- exit codes and error JSON -------------------------------------
    code, _, _ = run(qclust, "--help")
    check(code == 0, "--help should exit 0")

    missing = os.path.join(tmp, "no_such_file.csv")
    code, out, _ = run(qclust, "cluster", missing, "--k", "2")
    check(code == 2, f"missing input should exit 2, got {code}")
    err = json.loads(out)
    check(err["error"]["type"] == "io", "missing input should raise an io error")
    check(missing in err["error"]["message"], "io error should name the path")

    code, _, _ = run(qclust, "cluster")  # required positional absent
    check(code == 2, "missing required argument should exit 2")

    code, _, _ = run(qclust, "frobnicate")
    check(code == 2, "unknown subcommand should exit 2")

    csv_path = os.path.join(tmp, "blobs.csv")
    n_rows = write_blob_csv(csv_path)

    code, out, _ = run(qclust, "cluster", csv_path, "--k", "2", "--lambda1", "5")
    check(code == 1, f"lambda1 without lambda2 should exit 1, got {code}")
    check(
        json.loads(out)["error"]["type"] == "computation",
        "half-specified weights should raise a computation error",
    )

    code, out, _ = run(
        qclust, "cluster", csv_path, "--k", "2", "--roi", "0,0,2,2"
    )
    check(code == 2, "ROI on a CSV dataset should exit 2")
    check(
        json.loads(out)["error"]["type"] == "format",
        "ROI on series data should raise a format error",
    )

    # --- cluster report on labeled CSV (exact solver) -------------------
    report_path = os.path.join(tmp, "cluster.json")
    code, _, stderr = run(
        qclust,
        "cluster",
        csv_path,
        "--k",
        "2",
        "--metric",
        "inv-euclid",
        "--solver",
        "brute-force",
        "--out",
        report_path,
    )
    check(code == 0, f"cluster run failed: {stderr}")
    with open(report_path, encoding="ascii") as f:
        report = json.load(f)

    check(report["command"] == "cluster", "report must record the subcommand")
    check(report["input"] == csv_path, "report must record the input path")
    digest = report["dataset_digest"]
    check(
        len(digest) == 16 and all(c in "0123456789abcdef" for c in digest),
        "dataset digest should be 16 hex characters",
    )
    cfg = report["config"]
    check(cfg["metric"] == "inv-euclid", "config must record the metric")
    check(cfg["k"] == 2, "config must record k")
    check(cfg["lambda1"] / cfg["lambda2"] == 100.0, "strict regime is 100x")
    check(cfg["solver"]["type"] == "brute-force", "config must record solver")

    result = report["result"]
    expected_keys = {
        "sizes", "outlier_count", "assignments", "source", "repaired",
        "means", "energy", "rmse_per_class", "mds", "overlap",
        "best_energy", "energy_trace", "restarts_hitting_best",
    }
    check(
        expected_keys <= set(result.keys()),
        f"result is missing keys: {expected_keys - set(result.keys())}",
    )
    check(
        sum(result["sizes"]) + result["outlier_count"] == n_rows,
        "sizes plus outliers must cover every row",
    )
    check(result["source"] == "qubo", "cluster result source must be qubo")
    check(result["mds"] is None, "no MDS on the inverse-Euclidean path")
    check(result["overlap"] is None, "no overlap without MDS")
    check(result["repaired"] == [], "exact strict solve needs no repairs")
    check(result["outlier_count"] == 0, "strict solve leaves no outliers")
    groups = {}
    for label_row, cluster in enumerate(result["assignments"]):
        groups.setdefault(cluster, set()).add(label_row // 5)
    check(
        len(groups) == 2 and all(len(v) == 1 for v in groups.values()),
        "exact solve should split the two labeled groups",
    )
    check(result["rmse_per_class"] is not None, "labeled 2-class run has RMSE")
    check(
        all(e < 1e-9 for e in result["rmse_per_class"]),
        "exact split means zero per-class RMSE",
    )
    energy = result["energy"]
    total = (
        energy["similarity_term"]
        + energy["onehot_penalty"]
        + energy["balance_penalty"]
    )
    check(
        math.isclose(total, energy["total"], rel_tol=0, abs_tol=1e-9),
        "energy terms must sum to the total",
    )
    check(
        math.isclose(result["best_energy"], energy["total"], abs_tol=1e-9),
        "solver energy must equal the decoded breakdown",
    )
    check(len(result["means"]) == 2, "one mean row per cluster")

    # --- reproducibility modulo timestamp -------------------------------
    rep_a = os.path.join(tmp, "rep_a.json")
    rep_b = os.path.join(tmp, "rep_b.json")
    anneal_args = [
        "cluster",
        csv_path,
        "--k",
        "2",
        "--sweeps",
        "200",
        "--restarts",
        "4",
        "--seed",
        "7",
    ]
    for out_path in (rep_a, rep_b):
        code, _, stderr = run(qclust, *anneal_args, "--out", out_path)
        check(code == 0, f"anneal run failed: {stderr}")
    with open(rep_a, encoding="ascii") as f:
        a = json.load(f)
    with open(rep_b, encoding="ascii") as f:
        b = json.load(f)
    a.pop("timestamp")
    b.pop("timestamp")
    check(a == b, "same seed and input must reproduce the identical report")

    # --- baseline report -------------------------------------------------
    base_path = os.path.join(tmp, "baseline.json")
    code, _, stderr = run(
        qclust,
        "baseline",
        csv_path,
        "--k",
        "2",
        "--seed",
        "3",
        "--n-init",
        "4",
        "--out",
        base_path,
    )
    check(code == 0, f"baseline run failed: {stderr}")
    with open(base_path, encoding="ascii") as f:
        base = json.load(f)
    check(base["result"]["source"] == "kmeans", "baseline source is kmeans")
    check(base["result"]["energy"] is None, "baseline carries no QUBO energy")
    check(isinstance(base["result"]["inertia"], float), "baseline has inertia")
    check(
        sum(base["result"]["sizes"]) == n_rows,
        "k-means assigns every row to a cluster",
    )

    # --- eval: identical reports give zero deltas ------------------------
    eval_path = os.path.join(tmp, "eval.json")
    code, _, stderr = run(qclust, "eval", rep_a, rep_b, "--out", eval_path)
    check(code == 0, f"eval failed: {stderr}")
    with open(eval_path, encoding="ascii") as f:
        delta = json.load(f)["delta"]
    check(delta["outlier_count"] == 0, "identical runs: zero outlier delta")
    check(delta["energy_total"] == 0.0, "identical runs: zero energy delta")
    check(
        all(d == 0.0 for d in delta["rmse_per_class"]),
        "identical runs: zero RMSE deltas",
    )

    # --- eval rejects reports from different datasets --------------------
    other_csv = os.path.join(tmp, "other.csv")
    with open(csv_path, encoding="ascii") as f:
        body = f.read()
    with open(other_csv, "w", encoding="ascii") as f:
        f.write(body.replace("50.0", "51.0"))
    rep_c = os.path.join(tmp, "rep_c.json")
    code, _, stderr = run(
        qclust, "cluster", other_csv, "--k", "2", "--sweeps", "100",
        "--out", rep_c
    )
    check(code == 0, f"run on second dataset failed: {stderr}")
    code, out, _ = run(qclust, "eval", rep_a, rep_c)
    check(code == 2, "eval across datasets should exit 2")
    check(
        json.loads(out)["error"]["type"] == "format",
        "digest mismatch should raise a format error",
    )
    check(
        "different datasets" in json.loads(out)["error"]["message"],
        "digest mismatch message should say the datasets differ",
    )

    # --- synth round-trip and frame pipeline dumps -----------------------
    fsk_path = os.path.join(tmp, "synth.fsk")
    code, _, stderr = run(
        qclust,
        "synth",
        "--frames",
        "24",
        "--height",
        "6",
        "--width",
        "5",
        "--seed",
        "2",
        "--out",
        fsk_path,
    )
    check(code == 0, f"synth failed: {stderr}")
    with open(fsk_path, "rb") as f:
        check(f.read(4) == b"FSK1", "frame stack must start with FSK1 magic")
    phases_path = fsk_path + ".phases.csv"
    with open(phases_path, encoding="ascii") as f:
        phases = [float(line) for line in f if line.strip()]
    check(len(phases) == 24, "one true phase per frame")
    check(
        all(0.0 <= p < 2 * math.pi for p in phases),
        "phases must be wrapped to [0, 2*pi)",
    )

    mds_csv = os.path.join(tmp, "coords.csv")
    means_csv = os.path.join(tmp, "means.csv")
    frame_report = os.path.join(tmp, "frames.json")
    code, _, stderr = run(
        qclust,
        "cluster",
        fsk_path,
        "--metric",
        "cosine",
        "--svd-rank",
        "3",
        "--k",
        "3",
        "--sweeps",
        "300",
        "--restarts",
        "4",
        "--seed",
        "1",
        "--out",
        frame_report,
        "--dump-mds",
        mds_csv,
        "--dump-means",
        means_csv,
    )
    check(code == 0, f"frame-stack cluster run failed: {stderr}")
    with open(frame_report, encoding="ascii") as f:
        frame_result = json.load(f)["result"]
    check(frame_result["mds"] is not None, "cosine path attaches MDS")
    check(
        sum(frame_result["sizes"]) + frame_result["outlier_count"] == 24,
        "frame run must account for all frames",
    )
    with open(mds_csv, encoding="ascii") as f:
        mds_rows = [line.split(",") for line in f.read().splitlines() if line]
    check(len(mds_rows) == 24, "MDS dump has one row per frame")
    check(all(len(r) == 2 for r in mds_rows), "MDS dump has two columns")
    with open(means_csv, encoding="ascii") as f:
        mean_rows = [line for line in f.read().splitlines() if line]
    check(len(mean_rows) == 3, "means dump has one row per cluster")

    # --- QUBO export ------------------------------------------------------
    export_path = os.path.join(tmp, "model.json")
    code, _, stderr = run(
        qclust,
        "qubo-export",
        csv_path,
        "--k",
        "2",
        "--lambda1",
        "5",
        "--lambda2",
        "1",
        "--out",
        export_path,
    )
    check(code == 0, f"qubo-export failed: {stderr}")
    with open(export_path, encoding="ascii") as f:
        model = json.load(f)
    check(model["n"] == n_rows and model["k"] == 2, "export records n and k")
    check(model["lambda1"] == 5.0 and model["lambda2"] == 1.0, "export weights")
    check(len(model["linear"]) == n_rows * 2, "one linear term per variable")
    check(model["offset"] == 5.0 * n_rows, "all-zero energy is n * lambda1")
    check(
        all(u < v for u, v, _ in model["quadratic"]),
        "quadratic terms are strictly upper-triangular",
    )
    # Every variable pays lambda2 - lambda1 up front.
    check(
        all(c == 1.0 - 5.0 for c in model["linear"]),
        "linear coefficient must be lambda2 - lambda1",
    )

    print(f"cli_test: all {CHECKS} checks passed")


if __name__ == "__main__":
    main()
