"""Tests for main module"""

import json
import math
import shutil

import pytest

from torsion_asymptotics.asymptotics import AsymModel, model_samples, write_samples
from torsion_asymptotics.config import CORPUS_ENV
from torsion_asymptotics.corpus import CORPUS_DIR
from torsion_asymptotics.main import main
from torsion_asymptotics.problem import write_problem


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


@pytest.fixture
def problem(tmp_path):
    """Factory writing one problem file per call"""
    counter = iter(range(1000))

    def make(**payload):
        path = tmp_path / f"problem{next(counter)}.json"
        write_problem(path, payload)
        return path

    return make


@pytest.fixture
def node(problem):
    return problem(germs=[{"kind": "brieskorn_pham", "exponents": [2, 2]}])


class TestArguments:
    def test_unknown_subcommand(self, capsys):
        assert main(["volume"]) == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0

    def test_bad_convention(self, capsys, node):
        code, out = run(capsys, "kappa-ihs", str(node), "--convention", "hodge")

        assert code == 2
        assert out is None

    def test_missing_problem_file(self, capsys, tmp_path):
        assert main(["milnor", str(tmp_path / "missing.json")]) == 2

    def test_wrong_problem_kind(self, capsys, problem):
        path = problem(colength={"degMu": 1})

        assert main(["kappa-ihs", str(path)]) == 2

    @pytest.mark.parametrize(
        "command, payload",
        [
            ("kappa-ihs", {"germs": [{"kind": "brieskorn_pham", "exponents": [2, 2]}], "rank": "x"}),
            ("kappa-ihs", {"germs": [{"kind": "brieskorn_pham", "exponents": ["a"]}]}),
            ("milnor", {"germs": [{"kind": "newton_convenient", "vertices": 7}]}),
            ("exponents", {"monodromy": {"n": 1, "perDegree": []}}),
            ("exponents", {"colength": {"degMu": "two"}}),
            ("kappa-quadratic", {"quadratic": {"curve": {"genus": "g", "degXi": 0, "rankXi": 1, "degH": 0}}}),
            ("kappa-semistable", {"semistable": {"alphaF": "1/2", "beta": "1/2", "degMu": "four"}}),
            ("kappa-semistable", {"semistable": ["1/2"]}),
            ("bt-fit", {"bt": {"detSamples": [[0.1]], "degree": 2}}),
            ("bt-fit", {"bt": {"detSamples": [[0.1, 1.0]], "degree": "two"}}),
            ("bt-fit", {"bt": {"exponents": ["e"], "samples": []}}),
            ("bt-fit", {"bt": {"exponents": [0], "samples": 3}}),
            ("curvature-check", {"curvature": {"terms": [{"power": "two"}], "grid": {"rMin": 1e-5, "rMax": 0.1}}}),
        ],
    )
    def test_malformed_values_are_input_errors(self, capsys, problem, command, payload):
        assert main([command, str(problem(**payload))]) == 2


class TestSingularityCommands:
    def test_kappa_ihs(self, capsys, node):
        code, out = run(capsys, "kappa-ihs", str(node))

        assert code == 0
        assert out["command"] == "kappa-ihs"
        assert out["kappa"]["value"] == "-1/6"
        assert out["kappa"]["decimal"] == -0.166666666667
        assert out["germs"][0]["mu"]["value"] == 1

    def test_milnor(self, capsys, problem):
        path = problem(germs=[{"kind": "newton_convenient", "vertices": [[2, 0], [0, 3]]}])
        code, out = run(capsys, "milnor", str(path))

        assert code == 0
        assert out["germs"][0]["mu"]["value"] == 2
        assert "Kouchnirenko" in out["germs"][0]["mu"]["source"]

    def test_spectrum(self, capsys, problem):
        path = problem(germs=[{"kind": "brieskorn_pham", "exponents": [2, 3]}])
        code, out = run(capsys, "spectrum", str(path))

        assert code == 0
        assert out["germs"][0]["spectrum"]["value"] == ["5/6", "7/6"]

    def test_spectral_genus_alt(self, capsys, problem):
        path = problem(germs=[{"kind": "brieskorn_pham", "exponents": [2, 3]}])
        code, out = run(capsys, "spectral-genus", str(path), "--convention", "alt")

        assert code == 0
        assert out["germs"][0]["spectralGenus"]["value"] == "5/6"

    def test_exponents_from_monodromy(self, capsys, problem):
        path = problem(monodromy={"n": 1, "perDegree": {"0": ["1/3", "1/6"], "1": ["1/2"]}})
        code, out = run(capsys, "exponents", str(path))

        assert code == 0
        assert out["delta0"]["value"] == "1/2"
        assert out["epsilon"]["value"] == 0

    def test_exponents_from_germs(self, capsys, problem):
        path = problem(germs=[{"kind": "brieskorn_pham", "exponents": [3, 3]}])
        code, out = run(capsys, "exponents", str(path))

        assert code == 0
        assert out["germs"][0]["delta0"]["value"] == "1/3"


class TestKappaCommands:
    def test_quadratic_curve(self, capsys, problem):
        path = problem(quadratic={"curve": {"genus": 0, "degXi": 3, "rankXi": 2, "degH": 1, "m": 1}})
        code, out = run(capsys, "kappa-quadratic", str(path))

        assert code == 0
        assert out["kappa"]["value"] == "-1/4"
        assert out["alpha"]["value"] == "-1/4"
        assert out["kappaClosedForm"]["value"] == "-1/4"
        assert out["kappaPolynomialInM"]["value"] == ["-1/12", "-1/6"]

    def test_semistable(self, capsys, problem):
        path = problem(semistable={"alphaF": "1/2", "beta": "3/2", "degMu": 4, "alpha": "1/4"})
        code, out = run(capsys, "kappa-semistable", str(path))

        assert code == 0
        assert out["kappa"]["value"] == "1/2"
        assert out["delta"]["value"] == "1/4"

    def test_semistable_rejects_float_input(self, capsys, problem):
        path = problem(semistable={"alphaF": 0.5, "beta": 1})

        assert main(["kappa-semistable", str(path)]) == 2


class TestFitCommands:
    @pytest.fixture
    def samples_csv(self, tmp_path):
        path = tmp_path / "samples.csv"
        write_samples(path, model_samples(AsymModel(-1 / 12, 2, 0.5), [2.0 * 1.1**k for k in range(60)]))
        return path

    def test_fit_csv(self, capsys, samples_csv):
        code, out = run(capsys, "fit", str(samples_csv))

        assert code == 0
        assert out["kappa"]["value"] == pytest.approx(-1 / 12, abs=1e-8)
        assert out["rhoRounded"]["value"] == 2
        assert out["rhoIsIntegral"]["value"] is True

    def test_fit_problem_resolves_relative_csv(self, capsys, samples_csv, problem):
        path = problem(fit={"csv": samples_csv.name, "withC": True})
        code, out = run(capsys, "fit", str(path))

        assert code == 0
        assert out["c"]["value"] == pytest.approx(0, abs=1e-5)

    def test_fit_payload_needs_csv(self, capsys, problem):
        assert main(["fit", str(problem(fit={}))]) == 2

    def test_log_power(self, capsys, tmp_path):
        path = tmp_path / "ratio.csv"
        path.write_text("log_inv_r,value\n" + "".join(f"{L},{2 * L**3}\n" for L in (1.0, 10.0, 100.0, 1000.0)))
        code, out = run(capsys, "fit", str(path), "--model", "log-power")

        assert code == 0
        assert out["rhoRounded"]["value"] == 3

    def test_too_few_samples(self, capsys, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("r,value\n0.1,1.0\n")

        assert main(["fit", str(path)]) == 2

    def test_bt_fit_from_expansion(self, capsys, problem):
        path = problem(
            bt={
                "expansion": {"exponents": [1, 0], "coefficients": [[[1, 0], [0, 1]], [[1, 0], [0, 2]]]},
                "grid": {"rMin": 1e-6, "rMax": 0.5, "count": 30},
            }
        )
        code, out = run(capsys, "bt-fit", str(path))

        assert code == 0
        assert out["rho"]["value"] == 2
        assert out["minEigenvalue"]["value"] >= 1

    def test_bt_fit_from_det_samples(self, capsys, problem):
        rows = [[r, (1 - 2 * math.log(r)) ** 2] for r in (1e-6, 1e-4, 1e-2, 0.3)]
        code, out = run(capsys, "bt-fit", str(problem(bt={"detSamples": rows, "degree": 3})))

        assert code == 0
        assert out["rho"]["value"] == 2

    def test_bt_fit_needs_a_source(self, capsys, problem):
        assert main(["bt-fit", str(problem(bt={"degree": 2}))]) == 2

    def test_curvature_check(self, capsys, problem):
        path = problem(curvature={"terms": [{"power": 2}, {"power": 0, "phi": "1 + x"}], "grid": {"rMin": 1e-5, "rMax": 0.1}})
        code, out = run(capsys, "curvature-check", str(path))

        assert code == 0
        assert out["leadingPower"]["value"] == 2
        assert out["points"]["value"] == 25
        assert out["withinEnvelope"]["value"] is True
        assert out["envelopeBound"]["source"] == "default"

    def test_curvature_outside_envelope(self, capsys, problem):
        path = problem(
            curvature={
                "terms": [{"power": 2}, {"power": 0, "phi": "1 + x"}],
                "grid": {"rMin": 1e-5, "rMax": 0.1},
                "envelopeBound": 1e-6,
            }
        )
        code, out = run(capsys, "curvature-check", str(path))

        assert code == 3
        assert out["withinEnvelope"]["value"] is False
        assert out["violations"][0].startswith("curvature remainder envelope")

    def test_curvature_bad_bound(self, capsys, problem):
        path = problem(curvature={"terms": [{"power": 2}], "grid": {"rMin": 1e-5, "rMax": 0.1}, "envelopeBound": "loose"})

        assert main(["curvature-check", str(path)]) == 2

    def test_fit_payload_unknown_model(self, capsys, tmp_path, problem):
        csv_path = tmp_path / "s.csv"
        write_samples(csv_path, model_samples(AsymModel(-1 / 12, 2, 0.5), [2.0 * 1.1**k for k in range(60)]))

        assert main(["fit", str(problem(fit={"csv": csv_path.name, "model": "spline"}))]) == 2


class TestEllipticVerify:
    def test_passes(self, capsys):
        code, out = run(capsys, "elliptic-verify")

        assert code == 0
        assert out["kappa"]["value"] == pytest.approx(-1 / 12, abs=1e-6)
        assert out["rhoRounded"]["value"] == 2
        assert "violations" not in out

    def test_writes_samples(self, capsys, tmp_path):
        path = tmp_path / "node.csv"

        assert main(["elliptic-verify", "--count", "20", "--csv", str(path)]) == 0
        assert path.read_text().startswith("log_inv_r,value")

    def test_output_file_and_determinism(self, capsys, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"

        assert main(["elliptic-verify", "--output", str(first)]) == 0
        assert main(["elliptic-verify", "--output", str(second)]) == 0
        assert capsys.readouterr().out == ""
        assert first.read_bytes() == second.read_bytes()

    def test_invalid_grid(self, capsys):
        assert main(["elliptic-verify", "--im-tau-min", "0.5"]) == 2


class TestCorpusCheck:
    def test_bundled(self, capsys):
        code, out = run(capsys, "corpus-check")

        assert code == 0
        assert out["checked"]["value"] == 44
        assert out["diffs"]["value"] == 0

    def test_corrupted_corpus_from_environment(self, capsys, tmp_path, monkeypatch):
        shutil.copy(CORPUS_DIR / "quadratic_curves.json", tmp_path / "quadratic_curves.json")
        data = json.loads((tmp_path / "quadratic_curves.json").read_text())
        data["configs"][0]["kappa"] = "1"
        (tmp_path / "quadratic_curves.json").write_text(json.dumps(data))
        monkeypatch.setenv(CORPUS_ENV, str(tmp_path))

        code, out = run(capsys, "corpus-check")

        assert code == 3
        assert out["diffs"]["value"] == 1
        assert out["violations"][0].startswith("elliptic-trivial")

    def test_flag_overrides_environment(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv(CORPUS_ENV, str(tmp_path / "missing"))
        code, out = run(capsys, "corpus-check", "--corpus-dir", str(tmp_path))

        assert code == 0
        assert out["checked"]["value"] == 0
        assert out["notes"] == ["corpus is empty"]

    def test_missing_directory(self, capsys, tmp_path):
        assert main(["corpus-check", "--corpus-dir", str(tmp_path / "missing")]) == 2
