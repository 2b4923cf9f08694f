"""Tests for config documents, CSV tables and the manifest schema."""

import pytest

from lindblad_lab.core.exceptions import ConfigValidationError
from lindblad_lab.jumps.types import JumpMethod
from lindblad_lab.schemas.config import RandomMatrixModelConfig, TFIMModelConfig
from lindblad_lab.services.artifacts import CsvTable, finite_or_none, format_cell, write_csv
from lindblad_lab.services.runner import load_config, parse_config


def error_locations(exc: ConfigValidationError) -> list[str]:
    return [".".join(str(part) for part in item["loc"]) for item in exc.details["errors"]]


class TestScenarioConfig:
    """Tests for config validation and defaults."""

    def test_minimal_config_resolves_defaults(self):
        """Test a bare scenario name fills every default."""
        config = parse_config({"scenario": "prepare-ground"})
        assert config.jump.family == "ground"
        assert isinstance(config.model, TFIMModelConfig)
        assert config.model.n == 3
        assert config.jump.method is JumpMethod.EIGENBASIS
        assert config.probes.eta == 0.01

    def test_json_string_input(self):
        """Test JSON text is accepted."""
        config = parse_config('{"scenario": "error-order", "seed": 4}')
        assert config.seed == 4
        assert config.jump.family == "amplitude_damping"

    def test_unknown_key_rejected(self):
        """Test unknown keys fail with their location."""
        with pytest.raises(ConfigValidationError) as exc_info:
            parse_config({"scenario": "prepare-ground", "jump": {"famly": "ground"}})
        assert exc_info.value.exit_code == 2
        assert "jump.famly" in error_locations(exc_info.value)

    def test_unknown_scenario_rejected(self):
        """Test the scenario name is a closed set."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-everything"})

    def test_family_must_fit_scenario(self):
        """Test a family foreign to the scenario is refused."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-ground", "jump": {"family": "gibbs_single"}})

    @pytest.mark.parametrize(("scenario", "dim"), [("prepare-singular", 8), ("prepare-nonnormal", 6)])
    def test_matrix_scenarios_default_model(self, scenario, dim):
        """Test matrix scenarios default to a seeded random matrix."""
        config = parse_config({"scenario": scenario})
        assert isinstance(config.model, RandomMatrixModelConfig)
        assert config.model.dim == dim

    def test_matrix_scenario_rejects_lattice_model(self):
        """Test an explicit lattice model is not silently replaced."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-singular", "model": {"kind": "tfim", "n": 3}})

    def test_lattice_scenario_rejects_matrix_model(self):
        """Test random_matrix is only for matrix scenarios."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-ground", "model": {"kind": "random_matrix"}})

    def test_squared_family_needs_mu(self):
        """Test excited_squared requires mu."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-excited", "jump": {"family": "excited_squared"}})

    def test_mixing_scan_needs_resizable_model(self):
        """Test explicit Pauli terms cannot be rescaled."""
        model = {"kind": "pauli_terms", "n": 2, "terms": [[1.0, "Z0"]]}
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "mixing-scan", "model": model})

    def test_quasilocality_single_coupling(self):
        """Test quasilocality takes one coupling label."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "quasilocality", "jump": {"couplings": ["X1", "X2"]}})

    def test_n_list_sorted_and_distinct(self):
        """Test n_list is sorted and duplicates are refused."""
        assert parse_config({"scenario": "mixing-scan", "n_list": [4, 2, 3]}).n_list == [2, 3, 4]
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "mixing-scan", "n_list": [2, 2]})

    def test_dt_list_sorted_descending(self):
        """Test dt_list is sorted largest first and needs four entries."""
        config = parse_config({"scenario": "error-order", "dt_list": [0.01, 0.1, 0.05, 0.02]})
        assert config.dt_list == [0.1, 0.05, 0.02, 0.01]
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "error-order", "dt_list": [0.1, 0.05, 0.02]})

    def test_random_local_locality(self):
        """Test k may not exceed n."""
        with pytest.raises(ConfigValidationError):
            parse_config({"scenario": "prepare-ground", "model": {"kind": "random_local", "n": 2, "k": 3}})

    def test_probe_seeds(self):
        """Test probe seeds run consecutively from the base seed."""
        config = parse_config({"scenario": "prepare-ground", "probes": {"random": 3, "seed": 10}})
        assert config.probes.seeds == (10, 11, 12)

    def test_resolved_config_round_trips(self):
        """Test the echoed config validates back to the same model."""
        config = parse_config({"scenario": "prepare-gibbs", "jump": {"beta": 2.0}})
        assert parse_config(config.serializable_dict()) == config


class TestLoadConfig:
    """Tests for reading config files."""

    def test_missing_file(self, tmp_path):
        """Test an unreadable path is a validation error."""
        with pytest.raises(ConfigValidationError):
            load_config(tmp_path / "missing.json")

    def test_malformed_json(self, tmp_path):
        """Test broken JSON is a validation error."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigValidationError):
            load_config(path)


class TestCsvTables:
    """Tests for CSV tables and cell formatting."""

    def test_unknown_schema(self):
        """Test only registered file names are allowed."""
        with pytest.raises(KeyError):
            CsvTable("unknown")

    def test_column_count_checked(self):
        """Test rows must match the schema width."""
        table = CsvTable("order")
        with pytest.raises(ValueError):
            table.append(0.1, 0.2)

    @pytest.mark.parametrize(
        ("value", "expected"),
        [(None, ""), (True, "true"), (3, "3"), (0.1, "0.1"), (float("inf"), "inf"), ("basis[0]", "basis[0]")],
    )
    def test_format_cell(self, value, expected):
        """Test cells are written exactly and missing values are empty."""
        assert format_cell(value) == expected

    def test_finite_or_none(self):
        """Test non-finite values map to None."""
        assert finite_or_none(float("nan")) is None
        assert finite_or_none(2.5) == 2.5

    def test_write_csv(self, tmp_path):
        """Test the header, rows and file record."""
        table = CsvTable("hitting")
        table.append("basis[0]", 0.0)
        table.append("basis[1]", None)
        record = write_csv(tmp_path, table)
        assert (tmp_path / "hitting.csv").read_text() == "probe,hitting_time\nbasis[0],0.0\nbasis[1],\n"
        assert record.name == "hitting.csv"
        assert record.rows == 2
        assert record.schema_version == 1
