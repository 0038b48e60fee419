import io
import json

import pytest

from mctomo.bench import (
    BenchRow,
    ExperimentConfig,
    aggregate_median,
    read_csv,
    rows_to_csv,
    rows_to_json,
    run_experiment,
    run_single,
    trial_seed,
)
from mctomo.measure import NoiseModel
from mctomo.serialize import dump_document, state_to_json
from mctomo.states import haar_random_state


def strip_timing(csv_text: str) -> str:
    """Drop the wall_time_ms column, the only non-deterministic field."""
    lines = csv_text.splitlines()
    out = []
    for line in lines:
        if line.startswith("#"):
            out.append(line)
            continue
        cells = line.split(",")
        out.append(",".join(cells[:7] + cells[8:]))
    return "\n".join(out)


class TestConfig:
    def test_json_round_trip(self):
        cfg = ExperimentConfig(protocol="both", n_range=[2, 3],
                               shots_range=[10_000, None], trials=5, seed=9)
        back = ExperimentConfig.from_json(cfg.to_json())
        assert back == cfg

    def test_exact_token_parsing(self):
        cfg = ExperimentConfig.from_json({"shots_range": ["exact", 100], "n_range": [2]})
        assert cfg.shots_range == [None, 100]

    def test_noise_parsing(self):
        cfg = ExperimentConfig.from_json({"noise": {"readout_flip_prob": 0.01}})
        assert cfg.noise == NoiseModel(0.01)

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            ExperimentConfig(trials=0)

    def test_budget_below_settings_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n_range=[3], shots_range=[5])

    def test_noise_only_for_mcqst(self):
        with pytest.raises(ValueError):
            ExperimentConfig(protocol="both", noise=NoiseModel(0.01))


class TestRunExperiment:
    def test_exact_rows_near_perfect(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[1], shots_range=[None],
                               trials=3, seed=1)
        rows = list(run_experiment(cfg))
        assert len(rows) == 3
        assert all(r.infidelity < 1e-9 for r in rows)
        assert all(not r.error for r in rows)

    def test_row_count_is_grid_times_trials(self):
        cfg = ExperimentConfig(protocol="both", n_range=[1, 2],
                               shots_range=[None, 1000], trials=2, seed=0)
        rows = list(run_experiment(cfg))
        assert len(rows) == 2 * 2 * 2 * 2

    def test_deterministic_rerun(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[2], shots_range=[2000],
                               trials=4, seed=5)
        first = rows_to_csv(run_experiment(cfg))
        second = rows_to_csv(run_experiment(cfg))
        assert strip_timing(first) == strip_timing(second)

    def test_single_cell_reproduces_sweep_row(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[2], shots_range=[3000],
                               trials=3, seed=11)
        rows = list(run_experiment(cfg))
        target = rows[1]
        redo = run_single(cfg, "mcqst", 2, 3000, target.trial)
        assert redo.seed == target.seed
        assert redo.fidelity == target.fidelity
        assert redo.infidelity == target.infidelity

    def test_canonical_ordering(self):
        cfg = ExperimentConfig(protocol="both", n_range=[2, 1],
                               shots_range=[2000, None], trials=2, seed=2)
        rows = list(run_experiment(cfg))
        keys = [(r.protocol, r.n, -1 if r.n_total is None else r.n_total, r.trial)
                for r in rows]
        assert keys == sorted(keys)

    def test_error_rows_recorded_not_raised(self, tmp_path):
        path = tmp_path / "state.json"
        dump_document(state_to_json(haar_random_state(3, 0)), path)
        cfg = ExperimentConfig(protocol="mcqst", n_range=[2], shots_range=[None],
                               trials=2, seed=0, state_source="file",
                               state_file=str(path))
        rows = list(run_experiment(cfg))
        assert len(rows) == 2
        assert all("qubits" in r.error for r in rows)
        assert all(r.fidelity is None for r in rows)

    def test_shared_state_for_both_protocols(self):
        cfg = ExperimentConfig(protocol="both", n_range=[2], shots_range=[None],
                               trials=1, seed=3)
        rows = list(run_experiment(cfg))
        assert rows[0].seed == rows[1].seed

    def test_worker_pool_matches_sequential(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[1, 2], shots_range=[None],
                               trials=2, seed=4)
        seq = rows_to_csv(run_experiment(cfg))
        cfg.workers = 2
        par = rows_to_csv(run_experiment(cfg))
        assert strip_timing(seq) == strip_timing(par)

    def test_infidelity_decreases_with_budget(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[2],
                               shots_range=[10_000, 1_000_000], trials=20, seed=6)
        medians = {m.n_total: m.median_infidelity
                   for m in aggregate_median(run_experiment(cfg))}
        assert medians[1_000_000] < medians[10_000]

    def test_row_invariants(self):
        cfg = ExperimentConfig(protocol="both", n_range=[2], shots_range=[None, 5000],
                               trials=3, seed=13)
        for row in run_experiment(cfg):
            assert not row.error
            assert 0.0 <= row.fidelity <= 1.0
            assert row.infidelity == pytest.approx(1.0 - row.fidelity, abs=1e-12)


class TestTrialSeed:
    def test_stable_and_distinct(self):
        assert trial_seed(1, 2, 1000, 0) == trial_seed(1, 2, 1000, 0)
        assert trial_seed(1, 2, 1000, 0) != trial_seed(1, 2, 1000, 1)
        assert trial_seed(1, 2, None, 0) != trial_seed(1, 2, 1000, 0)

    def test_fits_in_uint64(self):
        assert 0 <= trial_seed(999, 6, 10 ** 9, 12345) < 2 ** 64


class TestAggregateMedian:
    @staticmethod
    def rows_with_infidelities(values, protocol="mcqst", n=2, n_total=100):
        return [BenchRow(protocol, n, n_total, i, 0, 1 - v, v, 0.0)
                for i, v in enumerate(values)]

    def test_odd_count(self):
        rows = self.rows_with_infidelities([0.1, 0.2, 0.3])
        assert aggregate_median(rows)[0].median_infidelity == pytest.approx(0.2)

    def test_even_count_averages_central_pair(self):
        rows = self.rows_with_infidelities([0.1, 0.2, 0.3, 0.4])
        assert aggregate_median(rows)[0].median_infidelity == pytest.approx(0.25)

    def test_error_rows_excluded_and_counted(self):
        rows = self.rows_with_infidelities([0.1, 0.3])
        rows.append(BenchRow("mcqst", 2, 100, 9, 0, None, None, 0.0, error="boom"))
        agg = aggregate_median(rows)[0]
        assert agg.median_infidelity == pytest.approx(0.2)
        assert agg.trials == 2
        assert agg.errors == 1


class TestCsv:
    def test_schema_header(self):
        cfg = ExperimentConfig(protocol="mcqst", n_range=[1], shots_range=[None],
                               trials=1, seed=0)
        text = rows_to_csv(run_experiment(cfg))
        lines = text.splitlines()
        assert lines[0] == "# mctomo bench csv v1"
        assert lines[1] == "protocol,n,N_total,trial,seed,fidelity,infidelity,wall_time_ms,error"

    def test_round_trip_identical_values(self):
        cfg = ExperimentConfig(protocol="both", n_range=[1], shots_range=[None, 500],
                               trials=2, seed=8)
        rows = list(run_experiment(cfg))
        back = read_csv(io.StringIO(rows_to_csv(rows)))
        assert back == rows

    def test_exact_budget_token(self):
        row = BenchRow("mcqst", 2, None, 0, 1, 1.0, 0.0, 1.5)
        text = rows_to_csv([row])
        assert ",exact," in text.splitlines()[2]
        assert read_csv(io.StringIO(text))[0].n_total is None

    def test_error_with_comma_round_trips(self):
        row = BenchRow("mcqst", 2, 100, 0, 1, None, None, 1.0, error="bad, very bad")
        assert read_csv(io.StringIO(rows_to_csv([row])))[0].error == "bad, very bad"

    def test_json_rows(self):
        rows = [BenchRow("mcqst", 2, None, 0, 1, 0.5, 0.5, 2.0)]
        payload = json.loads(rows_to_json(rows))
        assert payload[0]["N_total"] == "exact"
        assert payload[0]["fidelity"] == 0.5
