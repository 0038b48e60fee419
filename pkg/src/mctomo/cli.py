"""Command line interface: simulate, reconstruct, complete, purity-check, bench."""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import bench as bench_mod
from . import serialize
from .completion import complete_rank1, feasibility_check
from .linalg import fidelity
from .measure import NoiseModel
from .tomography import (
    default_purity_tol,
    fivebasis_reconstruct,
    mcqst_reconstruct,
    purity_certify,
    reconstruct_with_rotation,
    simulate_records,
)
from .validation import check_state_vector, num_qubits


def _noise_option(value) -> NoiseModel | None:
    return None if value is None else NoiseModel(value)


def _emit(doc: dict, out: str | None) -> None:
    if out:
        serialize.dump_document(doc, out)
    else:
        click.echo(json.dumps(doc, indent=2))


@click.group()
def main():
    """Pure-state tomography via rank-1 matrix completion."""


@main.command()
@click.option("--state", "state_path", required=True, type=click.Path(exists=True),
              help="State vector JSON file to measure.")
@click.option("--shots", type=int, required=True, help="Total shot budget over all settings.")
@click.option("--noise", type=float, default=None, help="Per-qubit readout flip probability.")
@click.option("--seed", type=int, default=None, help="Sampling seed.")
@click.option("--out", type=click.Path(), default=None, help="Output file (default: stdout).")
def simulate(state_path, shots, noise, seed, out):
    """Measure a known state in all 2n+1 settings and emit the shot records."""
    psi = check_state_vector(serialize.state_from_json(serialize.load_document(state_path)))
    records = simulate_records(psi, shots, _noise_option(noise), np.random.default_rng(seed))
    _emit(serialize.records_to_json(records, num_qubits(psi.shape[0])), out)


@main.command()
@click.option("--state", "state_path", type=click.Path(exists=True), default=None,
              help="State vector JSON to measure and reconstruct.")
@click.option("--records", "records_path", type=click.Path(exists=True), default=None,
              help="Shot-record JSON to replay instead of measuring.")
@click.option("--protocol", type=click.Choice(["mcqst", "fivebasis"]), default="mcqst")
@click.option("--shots", type=int, default=None, help="Total budget; omit with --exact.")
@click.option("--exact", is_flag=True, help="Use exact outcome probabilities (no sampling).")
@click.option("--noise", type=float, default=None, help="Per-qubit readout flip probability.")
@click.option("--seed", type=int, default=None)
@click.option("--pivot-floor", type=float, default=None)
@click.option("--no-rotation", is_flag=True, help="Disable the sparse-state rotation path.")
@click.option("--truth", "truth_path", type=click.Path(exists=True), default=None,
              help="Reference state; adds a fidelity field to the output.")
@click.option("--out", type=click.Path(), default=None)
def reconstruct(state_path, records_path, protocol, shots, exact, noise, seed,
                pivot_floor, no_rotation, truth_path, out):
    """Reconstruct a pure state and emit the result as JSON."""
    if (state_path is None) == (records_path is None):
        raise click.UsageError("provide exactly one of --state or --records")
    if not exact and shots is None and state_path is not None:
        raise click.UsageError("provide --shots or pass --exact")
    noise_model = _noise_option(noise)
    rng = np.random.default_rng(seed)

    if records_path is not None:
        records = serialize.records_from_json(serialize.load_document(records_path))
        if protocol != "mcqst":
            raise click.UsageError("record replay is only supported for the mcqst protocol")
        result = mcqst_reconstruct(records=records, noise=noise_model,
                                   pivot_floor=pivot_floor)
    else:
        psi = check_state_vector(serialize.state_from_json(serialize.load_document(state_path)))
        budget = None if exact else shots
        if protocol == "fivebasis":
            result = fivebasis_reconstruct(psi, shots=budget, rng=rng,
                                           pivot_floor=pivot_floor)
        elif no_rotation:
            result = mcqst_reconstruct(psi, shots=budget, noise=noise_model, rng=rng,
                                       pivot_floor=pivot_floor)
        else:
            result = reconstruct_with_rotation(psi, shots=budget, noise=noise_model,
                                               rng=rng, pivot_floor=pivot_floor)

    fid = None
    if truth_path is not None:
        truth = check_state_vector(serialize.state_from_json(serialize.load_document(truth_path)))
        fid = fidelity(result.estimate, truth)
    _emit(serialize.result_to_json(result, fid), out)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="Partial matrix JSON (entries + known mask).")
@click.option("--pivot-floor", type=float, default=1e-12, show_default=True)
@click.option("--recover", is_flag=True, help="Fill unreachable entries by the purity bound.")
@click.option("--out", type=click.Path(), default=None)
def complete(input_path, pivot_floor, recover, out):
    """Complete a rank-1 partial matrix and emit the filled matrix."""
    pm = serialize.partial_matrix_from_json(serialize.load_document(input_path))
    report = feasibility_check(pm)
    if not report.ok:
        raise click.ClickException(
            f"mask not completable ({report.status.value}); unreached rows "
            f"{list(report.unreached_rows)}, cols {list(report.unreached_cols)}")
    diag = pm.entries.diagonal().real
    result = complete_rank1(pm, diag, pivot_floor=pivot_floor, recover=recover)
    doc = serialize.matrix_to_json(result.matrix)
    doc["redundancy"] = report.redundancy
    doc["recovered_pairs"] = [list(p) for p in result.recovered_pairs]
    _emit(doc, out)


@main.command("purity-check")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="Density matrix or partial matrix JSON.")
@click.option("--tol", type=float, default=None,
              help="Deviation tolerance; defaults from --shots-per-setting.")
@click.option("--shots-per-setting", type=int, default=None,
              help="Used to derive the default tolerance when --tol is omitted.")
@click.option("--out", type=click.Path(), default=None)
def purity_check(input_path, tol, shots_per_setting, out):
    """Certify purity from measured entries: |rho_jk|^2 == rho_jj * rho_kk."""
    doc = serialize.load_document(input_path)
    if doc.get("kind") == serialize.KIND_PARTIAL:
        subject = serialize.partial_matrix_from_json(doc)
    else:
        subject = serialize.matrix_from_json(doc)
    if tol is None:
        if shots_per_setting is None:
            raise click.UsageError("provide --tol or --shots-per-setting")
        tol = default_purity_tol(shots_per_setting)
    report = purity_certify(subject, tol)
    _emit({
        "pure": report.is_pure,
        "max_deviation": report.max_deviation,
        "worst_pair": list(report.worst_pair) if report.worst_pair else None,
        "pairs_checked": report.pairs_checked,
        "tol": tol,
    }, out)


@main.group()
def bench():
    """Benchmark sweeps over qubits, budgets, and protocols."""


@bench.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True),
              help="ExperimentConfig JSON file.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output path; .json extension selects JSON, anything else CSV.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--exact", is_flag=True, help="Force exact mode (shots_range = [exact]).")
@click.option("--workers", type=int, default=None, help="Override the worker count.")
def bench_run(config_path, out_path, seed, exact, workers):
    """Run a sweep and write one row per trial."""
    doc = serialize.load_document(config_path)
    cfg = bench_mod.ExperimentConfig.from_json(doc)
    if seed is not None:
        cfg.seed = seed
    if exact:
        cfg.shots_range = [None]
    if workers is not None:
        cfg.workers = workers
    rows = list(bench_mod.run_experiment(cfg))
    text = (bench_mod.rows_to_json(rows) if out_path.endswith(".json")
            else bench_mod.rows_to_csv(rows))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    errors = sum(1 for r in rows if r.error)
    click.echo(f"wrote {len(rows)} rows ({errors} errors) to {out_path}", err=True)


if __name__ == "__main__":
    sys.exit(main())
