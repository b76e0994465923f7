import json
import numpy as np
import pytest

from pathlib import Path

from src.isomeasure.main import main
from src.isomeasure.utils.verifier import theorem1_bound


def _read(path: Path) -> dict | list:
    return json.loads(path.read_text(encoding="utf-8"))


def test_gen_simplex(tmp_path: Path, capsys) -> None:
    """Test generation of the regular simplex measure.

    Asserts:
        Exit code 0, a measure file and a summary with tiny residuals.
    """
    out = tmp_path / "simplex.json"
    assert main(["gen", "simplex", "--n", "3", "--out", str(out)]) == 0
    data = _read(out)
    assert data["dim"] == 3
    assert len(data["atoms"]) == 4
    summary = json.loads(capsys.readouterr().out)
    assert summary["atoms"] == 4
    assert summary["isotropy_residual"] <= 1e-12
    assert summary["first_moment_norm"] <= 1e-12


def test_gen_random_is_deterministic(tmp_path: Path) -> None:
    """Test that one seed always writes the same file.

    Asserts:
        Two runs give byte-identical files.
    """
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        argv = ["gen", "random", "--n", "3", "--m", "8", "--seed", "42"]
        assert main(argv + ["--out", str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_gen_perturbed(tmp_path: Path) -> None:
    """Test a perturbed simplex.

    Asserts:
        Exit code 0 and weight on both rotated copies of the support.
    """
    out = tmp_path / "perturbed.json"
    argv = ["gen", "simplex", "--n", "2", "--perturb", "0.1", "--seed", "3"]
    assert main(argv + ["--out", str(out)]) == 0
    atoms = _read(out)["atoms"]
    assert len(atoms) == 6
    assert sum(atom["c"] for atom in atoms) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "extra", [["--m", "3"], []], ids=["too_few_atoms", "missing_m"]
)
def test_gen_random_usage(tmp_path: Path, extra: list[str]) -> None:
    """Test random generation with a bad atom count.

    Asserts:
        Exit code 1 and no file is written.
    """
    out = tmp_path / "random.json"
    argv = ["gen", "random", "--n", "3"] + extra + ["--out", str(out)]
    assert main(argv) == 1
    assert not out.exists()


def test_gen_infeasible(monkeypatch, tmp_path: Path) -> None:
    """Test directions that can never carry isotropic weights.

    Asserts:
        Exit code 2.
    """

    def one_sided(n, m, rng):
        directions = np.abs(rng.standard_normal((m, n))) + 0.1
        return directions / np.linalg.norm(directions, axis=1)[:, None]

    monkeypatch.setattr(
        "src.isomeasure.utils.generators._sample_directions", one_sided
    )
    out = tmp_path / "random.json"
    argv = ["gen", "random", "--n", "2", "--m", "5", "--out", str(out)]
    assert main(argv) == 2


def test_verify_simplex(simplex3_path: Path, out_path: Path) -> None:
    """Test both inequalities on the tetrahedral measure.

    Asserts:
        Exit code 0 and equality in both reports.
    """
    assert main(["verify", str(simplex3_path), "--out", str(out_path)]) == 0
    reports = _read(out_path)
    assert [r["theorem"] for r in reports] == ["T1", "T2"]
    assert all(r["equality"] and r["holds"] for r in reports)


def test_verify_single(cross2_path: Path, out_path: Path) -> None:
    """Test --which t1 on the planar cross.

    Asserts:
        One strict report for the polar body.
    """
    argv = ["verify", str(cross2_path), "--which", "t1"]
    assert main(argv + ["--out", str(out_path)]) == 0
    report = _read(out_path)
    assert report["theorem"] == "T1"
    assert report["volume"] == pytest.approx(4.0)
    assert not report["equality"]
    assert report["gap"] > 0


def test_verify_not_isotropic(skewed_path: Path, capsys) -> None:
    """Test a measure violating the precondition.

    Asserts:
        Exit code 3 and the residuals on stderr.
    """
    assert main(["verify", str(skewed_path)]) == 3
    err = capsys.readouterr().err
    assert "isotropy_residual" in err


def test_chain_is_reproducible(simplex3_path: Path, tmp_path: Path) -> None:
    """Test the first chain twice with one seed.

    Asserts:
        Exit code 0 both times and byte-identical reports.
    """
    outputs = [tmp_path / "a.json", tmp_path / "b.json"]
    for out in outputs:
        argv = [
            "chain",
            str(simplex3_path),
            "--theorem",
            "t1",
            "--samples",
            "100000",
            "--seed",
            "1",
            "--probes",
            "100",
            "--out",
            str(out),
        ]
        assert main(argv) == 0
    assert outputs[0].read_bytes() == outputs[1].read_bytes()
    assert _read(outputs[0])["passed"]


def test_chain_too_few_samples(simplex3_path: Path) -> None:
    """Test a sample count below the minimum.

    Asserts:
        Exit code 1.
    """
    argv = ["chain", str(simplex3_path), "--theorem", "t2"]
    assert main(argv + ["--samples", "1000"]) == 1


def test_lift(cross2_path: Path, out_path: Path) -> None:
    """Test lifting the planar cross.

    Asserts:
        Exit code 0, four lifted atoms in R^3 and a passing check.
    """
    assert main(["lift", str(cross2_path), "--out", str(out_path)]) == 0
    data = _read(out_path)
    assert data["lifted"]["dim"] == 3
    assert len(data["lifted"]["atoms"]) == 4
    assert data["check"]["passed"]


def test_volume_polar(simplex3_path: Path, out_path: Path) -> None:
    """Test the exact polar volume of the tetrahedral measure.

    Asserts:
        The volume is 8 sqrt 3 and equals the bound.
    """
    argv = ["volume", str(simplex3_path), "--polar", "--out", str(out_path)]
    assert main(argv) == 0
    data = _read(out_path)
    assert data["volume"] == pytest.approx(13.8564065, rel=1e-8)
    assert data["volume"] == pytest.approx(theorem1_bound(3), rel=1e-9)
    assert data["equality"]


def test_volume_monte_carlo(cross2_path: Path, out_path: Path) -> None:
    """Test the sampled volume of the planar cross body.

    Asserts:
        The estimate is within five standard errors of 2.
    """
    argv = ["volume", str(cross2_path), "--body", "--samples", "20000"]
    assert main(argv + ["--seed", "4", "--out", str(out_path)]) == 0
    data = _read(out_path)
    assert data["volume"] == pytest.approx(2.0)
    assert abs(data["mc_volume"] - 2.0) <= 5 * data["mc_stderr"]


@pytest.mark.parametrize("source", ["list", "file"])
def test_ballbarthe_orthonormal(
    source: str, ortho3_path: Path, values_path: Path, capsys
) -> None:
    """Test the determinant inequality on an orthonormal basis.

    Asserts:
        Exit code 0, det 6 and equality expected and observed.
    """
    values = "1,2,3" if source == "list" else str(values_path)
    assert main(["ballbarthe", str(ortho3_path), "--values", values]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["lhs"] == pytest.approx(6.0)
    assert result["rhs"] == pytest.approx(6.0)
    assert result["equality_expected"] and result["equality_observed"]


def test_ballbarthe_constant(cross2_path: Path, capsys) -> None:
    """Test constant values on the planar cross.

    Asserts:
        det (2 I) = 4 equals 2^2.
    """
    argv = ["ballbarthe", str(cross2_path), "--constant", "2"]
    assert main(argv) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["lhs"] == pytest.approx(4.0)
    assert result["equality_observed"]


def test_ballbarthe_not_isotropic(skewed_path: Path) -> None:
    """Test the determinant inequality on a skewed measure.

    Asserts:
        Exit code 3.
    """
    assert main(["ballbarthe", str(skewed_path), "--constant", "1"]) == 3


def test_ballbarthe_bad_values(ortho3_path: Path) -> None:
    """Test values that cannot be parsed.

    Asserts:
        Exit code 1.
    """
    assert main(["ballbarthe", str(ortho3_path), "--values", "a,b"]) == 1


@pytest.mark.parametrize(
    "argv",
    [[], ["verify", "missing.json"], ["volume", "missing.json"]],
    ids=["no_command", "missing_file", "missing_mode"],
)
def test_usage_errors(argv: list[str]) -> None:
    """Test argument and file errors.

    Asserts:
        Exit code 1.
    """
    assert main(argv) == 1


def test_help() -> None:
    """Test the help flag.

    Asserts:
        Exit code 0.
    """
    assert main(["--help"]) == 0


def test_invalid_config_file(
    invalid_config: Path, simplex3_path: Path
) -> None:
    """Test an explicit config that fails validation.

    Asserts:
        Exit code 1.
    """
    argv = ["--config", str(invalid_config), "verify", str(simplex3_path)]
    assert main(argv) == 1
