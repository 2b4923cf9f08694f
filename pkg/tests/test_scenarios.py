"""Tests for the scenario registry and end-to-end runs."""

import json
import math

import pytest

from lindblad_lab.core.exceptions import InvariantViolationError
from lindblad_lab.models import LatticeGeometry, random_local_hamiltonian, tfim_chain
from lindblad_lab.scenarios import ScenarioOutcome, discover_scenarios, get_scenario, scenario
from lindblad_lab.schemas.config import SCENARIO_FAMILIES
from lindblad_lab.services.runner import RUN_LOG_NAME, parse_config, resolve_output_dir, run_scenario

VOLATILE_KEYS = {"run_id", "started_at", "finished_at", "wall_time_s", "output_dir"}


def run(tmp_path, document):
    return run_scenario(parse_config(document), tmp_path)


def csv_lines(path):
    return path.read_text().splitlines()


class TestRegistry:
    """Tests for scenario discovery."""

    def test_every_scenario_registered(self):
        """Test discovery finds one scenario per config name."""
        assert set(discover_scenarios()) == set(SCENARIO_FAMILIES)

    def test_help_text(self):
        """Test scenarios carry a description."""
        assert all(s.help for s in discover_scenarios().values())

    def test_unknown_scenario(self):
        """Test lookups of unknown names raise KeyError."""
        with pytest.raises(KeyError):
            get_scenario("nope")

    def test_duplicate_registration(self):
        """Test a name may be registered once."""
        discover_scenarios()
        with pytest.raises(ValueError):

            @scenario("prepare-ground")
            def again(config):
                return ScenarioOutcome()


class TestRunner:
    """Tests for run orchestration and artifacts."""

    def test_output_dir_precedence(self, tmp_path):
        """Test the explicit directory wins over the config's output."""
        config = parse_config({"scenario": "error-order", "output": str(tmp_path / "from-config")})
        assert resolve_output_dir(config, tmp_path / "cli") == tmp_path / "cli"

    def test_manifest_and_files(self, tmp_path):
        """Test a run writes CSVs, run.log and a manifest describing them."""
        result = run(tmp_path, {"scenario": "prepare-ground", "model": {"kind": "tfim", "n": 2}})
        manifest = json.loads(result.manifest_path.read_text())
        assert manifest["scenario"] == "prepare-ground"
        assert manifest["manifest_version"] == 1
        assert manifest["config"]["jump"]["family"] == "ground"
        assert manifest["seeds"] == {"config": 0, "probes": 0}
        assert [f["name"] for f in manifest["files"]] == ["evolution.csv", "hitting.csv"]
        assert (tmp_path / RUN_LOG_NAME).exists()
        assert csv_lines(tmp_path / "evolution.csv")[0] == "t,distance,fidelity,energy,trace_drift"
        assert len(csv_lines(tmp_path / "evolution.csv")) == 52

    def test_rerun_is_byte_identical(self, tmp_path):
        """Test two runs of one config agree on every CSV and non-volatile manifest field."""
        document = {"scenario": "prepare-ground", "model": {"kind": "tfim", "n": 2}, "probes": {"random": 2}}
        first = run(tmp_path / "a", document)
        second = run(tmp_path / "b", document)
        for name in ("evolution.csv", "hitting.csv"):
            assert (first.output_dir / name).read_bytes() == (second.output_dir / name).read_bytes()
        a = {k: v for k, v in json.loads(first.manifest_path.read_text()).items() if k not in VOLATILE_KEYS}
        b = {k: v for k, v in json.loads(second.manifest_path.read_text()).items() if k not in VOLATILE_KEYS}
        assert a == b

    def test_invariant_violation_leaves_no_manifest(self, tmp_path):
        """Test an aborted run keeps its log but writes no manifest."""
        document = {"scenario": "prepare-ground", "model": {"kind": "tfim", "n": 2}, "checks": {"fixed_point_tol": 1e-300}}
        with pytest.raises(InvariantViolationError):
            run(tmp_path, document)
        assert not (tmp_path / "manifest.json").exists()
        assert (tmp_path / RUN_LOG_NAME).exists()


class TestPreparationScenarios:
    """End-to-end checks of the state-preparation scenarios."""

    def test_prepare_ground(self, tmp_path):
        """Test the ground state is reached from the top eigenstate."""
        metrics = run(tmp_path, {"scenario": "prepare-ground", "model": {"kind": "tfim", "n": 2}}).manifest.metrics
        assert metrics["fixed_point_residual"] < 1e-9
        assert metrics["stationary_fidelity"] == pytest.approx(1.0, abs=1e-8)
        assert metrics["final_fidelity"] > 0.999
        assert metrics["worst_probe"] is not None
        assert metrics["spectral_gap"] > 0

    def test_prepare_ground_quadrature(self, tmp_path):
        """Test the quadrature method reports its mismatch."""
        document = {"scenario": "prepare-ground", "model": {"kind": "tfim", "n": 2}, "jump": {"method": "quadrature"}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["max_quadrature_mismatch"] <= 1e-6

    @pytest.mark.parametrize("family", ["gibbs_single", "gibbs_family"])
    def test_prepare_gibbs(self, tmp_path, family):
        """Test the Gibbs state is the stationary state."""
        document = {"scenario": "prepare-gibbs", "model": {"kind": "tfim", "n": 2}, "jump": {"family": family}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["fixed_point_residual"] < 1e-9
        assert metrics["stationary_distance_to_gibbs"] < 1e-6
        assert metrics["coherent_solve_residual"] < 1e-8

    def test_prepare_excited_projected(self, tmp_path):
        """Test the projected family fixes the first excited state."""
        document = {"scenario": "prepare-excited", "model": {"kind": "tfim", "n": 2}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["family"] == "excited_projected"
        assert metrics["target_index"] == 1
        assert metrics["target_residual"] < 1e-9

    def test_prepare_excited_squared(self, tmp_path):
        """Test the squared family targets the eigenstate nearest mu."""
        document = {"scenario": "prepare-excited", "model": {"kind": "tfim", "n": 2}, "jump": {"family": "excited_squared", "mu": 0.9}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["target_residual"] < 1e-9
        assert metrics["mu"] == 0.9

    def test_prepare_ground_three_sites_within_mixing_time(self, tmp_path):
        """Test the three-site chain reaches fidelity 0.999 from its top eigenstate by 1.5 tau_mix."""
        model = {"kind": "tfim", "n": 3}
        first = run(tmp_path / "a", {"scenario": "prepare-ground", "model": model}).manifest.metrics
        tau = first["tau_mix"]
        assert tau is not None and tau > 0
        assert first["final_fidelity"] >= 0.999
        document = {"scenario": "prepare-ground", "model": model, "evolve": {"t_max": 1.5 * tau}}
        second = run(tmp_path / "b", document).manifest.metrics
        assert second["t_final"] == pytest.approx(1.5 * tau)
        assert second["final_fidelity"] >= 0.999

    def test_prepare_excited_projected_three_sites(self, tmp_path):
        """Test the projected family drives the three-site chain into its first excited state."""
        document = {"scenario": "prepare-excited", "model": {"kind": "tfim", "n": 3}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["target_index"] == 1
        assert metrics["target_residual"] < 1e-9
        assert metrics["final_fidelity"] >= 0.999

    def test_prepare_excited_squared_random_local(self, tmp_path):
        """Test the squared family prepares an interior eigenstate of a seeded random 2-local chain."""
        values = random_local_hamiltonian(LatticeGeometry(n_sites=3), 2, seed=0).spectrum.eigenvalues
        mu = float(values[3] + 0.1 * (values[4] - values[3]))
        document = {
            "scenario": "prepare-excited",
            "model": {"kind": "random_local", "n": 3, "k": 2, "seed": 0},
            "jump": {"family": "excited_squared", "mu": mu},
        }
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["target_residual"] < 1e-9
        assert metrics["stationary_null_dim"] == 1
        assert metrics["stationary_fidelity"] == pytest.approx(1.0, abs=1e-8)
        assert metrics["final_fidelity"] >= 0.999

    def test_prepare_singular(self, tmp_path):
        """Test the prepared state matches the SVD oracle."""
        result = run(tmp_path, {"scenario": "prepare-singular"})
        metrics = result.manifest.metrics
        assert metrics["stationary_fidelity"] == pytest.approx(1.0, abs=1e-6)
        assert metrics["sigma_min"] > 0
        assert metrics["unique_fixed_point"] is True
        assert result.manifest.seeds["matrix"] == 7

    def test_prepare_nonnormal(self, tmp_path):
        """Test the grid search recovers an eigenpair."""
        metrics = run(tmp_path, {"scenario": "prepare-nonnormal"}).manifest.metrics
        assert metrics["relative_residual"] < 1e-6
        assert metrics["ambiguous"] is False
        assert len(csv_lines(tmp_path / "nonnormal.csv")) == 1 + 25


class TestAnalysisScenarios:
    """End-to-end checks of the analysis scenarios."""

    def test_mixing_scan(self, tmp_path):
        """Test one row per size and a fit without a confidence interval for two points."""
        metrics = run(tmp_path, {"scenario": "mixing-scan", "n_list": [2, 3]}).manifest.metrics
        assert metrics["sizes"] == 2
        assert metrics["fit_exponent"] is not None
        assert metrics["fit_exponent_ci_low"] is None
        assert metrics["couplings"] == "X0"
        assert metrics["filter_delta"] == pytest.approx(tfim_chain(3).gap_hint)
        assert metrics["filter_e_max"] == pytest.approx(tfim_chain(3).e_max)
        assert len(csv_lines(tmp_path / "mixing.csv")) == 3

    def test_quasilocality(self, tmp_path):
        """Test shells and the decay fit are reported."""
        document = {"scenario": "quasilocality", "model": {"kind": "tfim", "n": 5, "g": 2.0}}
        metrics = run(tmp_path, document).manifest.metrics
        assert metrics["site"] == 2
        assert metrics["coupling"] == "X2"
        assert metrics["nonzero_shells"] == 3
        assert metrics["reconstruction_error"] < 1e-10
        assert len(csv_lines(tmp_path / "shells.csv")) == 4

    def test_error_order(self, tmp_path):
        """Test amplitude damping shows orders two and one."""
        metrics = run(tmp_path, {"scenario": "error-order"}).manifest.metrics
        assert 1.8 <= metrics["single_step_slope"] <= 2.2
        assert 0.8 <= metrics["accumulated_slope"] <= 1.2
        assert len(csv_lines(tmp_path / "order.csv")) == 8

    def test_error_order_ground_chain(self, tmp_path):
        """Test the dilation channel on the two-site ground-state generator shows orders two and one."""
        document = {"scenario": "error-order", "model": {"kind": "tfim", "n": 2}, "jump": {"family": "ground"}}
        metrics = run(tmp_path, document).manifest.metrics
        assert 1.8 <= metrics["single_step_slope"] <= 2.2
        assert 0.8 <= metrics["accumulated_slope"] <= 1.2

    @pytest.mark.slow
    def test_mixing_scan_confidence_interval(self, tmp_path):
        """Test three or more sizes produce a confidence interval around the exponent."""
        metrics = run(tmp_path, {"scenario": "mixing-scan", "n_list": [2, 3, 4]}).manifest.metrics
        low, high = metrics["fit_exponent_ci_low"], metrics["fit_exponent_ci_high"]
        assert math.isfinite(low) and math.isfinite(high)
        assert low <= metrics["fit_exponent"] <= high

    @pytest.mark.slow
    def test_mixing_scan_grows_with_chain_length(self, tmp_path):
        """Test boundary dissipation on the critical chain mixes more slowly as the chain grows."""
        metrics = run(tmp_path, {"scenario": "mixing-scan", "n_list": [2, 3, 4, 5]}).manifest.metrics
        assert metrics["sizes"] == 4
        assert metrics["monotone"] is True
        assert metrics["fit_exponent"] > 0
