import json
from pathlib import Path

import pytest

from chute.cli import main
from chute.instances import generate_instance, serialize_instance
from chute.scalarize import ChebyshevParams
from chute.shells import gap_vector
from chute.solver import brute_force_chebyshev


@pytest.fixture(scope="module")
def toy_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "toy.json"
    path.write_text(json.dumps({
        "format": "momkp-v1", "name": "TOY", "k": 2, "n": 2, "m": 1,
        "objectives": [[4, 1], [1, 4]], "constraints": [[1, 1]], "rhs": [1],
    }))
    return str(path)


@pytest.fixture(scope="module")
def rand_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "rand.json"
    inst = generate_instance(2, 10, 2, seed=101, name="R10")
    path.write_text(serialize_instance(inst))
    return str(path)


class TestSolve:
    def test_result_file_is_sandwich_valid(self, toy_file, tmp_path):
        out = tmp_path / "result.json"
        code = main(["solve", "--instance", toy_file, "--lambda", "0.5,0.5",
                     "--variant", "chute1", "--gamma", "10", "--tl", "5",
                     "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        # oracle check: exact optimum outcome lies inside every interval
        from chute.instances import parse_instance, WeightVector, evaluate_outcome
        from chute.scalarize import ReferencePoint
        inst = parse_instance(Path(toy_file).read_text())
        ys = ReferencePoint(tuple(doc["y_star"]["values"]),
                            tuple(doc["y_star"]["provenance"]))
        params = ChebyshevParams(WeightVector((0.5, 0.5)), ys, doc["rho"])
        oracle = brute_force_chebyshev(inst, params)
        f_opt = evaluate_outcome(inst, oracle.incumbent).values
        for l in range(2):
            assert doc["L"][l] <= f_opt[l] + 1e-9
            assert f_opt[l] <= doc["U"][l] + 1e-9

    def test_missing_lambda_flags_exits_2(self, toy_file, capsys):
        code = main(["solve", "--instance", toy_file])
        assert code == 2
        assert "lambda" in capsys.readouterr().err

    def test_identical_reruns_modulo_wallclock(self, rand_file, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        flags = ["solve", "--instance", rand_file, "--lambda-count", "1",
                 "--seed", "9", "--out"]
        assert main(flags + [str(out1)]) == 0
        assert main(flags + [str(out2)]) == 0
        from chute.reporting import strip_wallclock
        a = strip_wallclock(json.loads(out1.read_text()))
        b = strip_wallclock(json.loads(out2.read_text()))
        assert a == b

    def test_unreadable_instance_exits_2(self, tmp_path):
        code = main(["solve", "--instance", str(tmp_path / "missing.json"),
                     "--lambda", "0.5,0.5"])
        assert code == 2

    def test_bad_lambda_dimension_exits_2(self, toy_file):
        code = main(["solve", "--instance", toy_file, "--lambda", "0.2,0.3,0.5"])
        assert code == 2


class TestExperimentCommand:
    def test_sweep_writes_tables(self, rand_file, tmp_path, capsys):
        out = tmp_path / "exp"
        code = main(["experiment", "--instance", rand_file,
                     "--lambda-count", "2", "--seed", "1",
                     "--gamma", "5", "--gamma", "10",
                     "--variant", "chute1", "--variant", "chute2",
                     "--tl", "5", "--ts", "2", "--out", str(out)])
        assert code == 0
        listed = capsys.readouterr().out.strip().splitlines()
        assert str(out / "results.json") in listed
        rows = (out / "R10_chute1_results.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 2
        assert (out / "R10_chute2_times.csv").exists()
        assert (out / "averages.csv").exists()
        assert (out / "R10_chute1_gaps.png").exists()

    def test_gap_cells_match_direct_computation(self, rand_file, tmp_path):
        out = tmp_path / "exp2"
        main(["experiment", "--instance", rand_file, "--lambda-count", "1",
              "--seed", "2", "--gamma", "10", "--variant", "chute1",
              "--out", str(out)])
        doc = json.loads((out / "results.json").read_text())
        cell = doc["cells"][0]["result"]
        expect = gap_vector(cell["L"], cell["U"])
        table = (out / "R10_chute1_results.csv").read_text().strip().splitlines()
        row = table[1].split(",")
        k = 2
        got = tuple(float(x) for x in row[2 + 3 * k:2 + 4 * k])
        assert got == tuple(round(g, 2) for g in expect)


class TestOracleCommand:
    def test_exact_result(self, toy_file, tmp_path):
        out = tmp_path / "oracle.json"
        code = main(["oracle", "--instance", toy_file, "--lambda", "0.5,0.5",
                     "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["bits"] == [1, 0]
        assert doc["objective"] == pytest.approx(2.005, abs=1e-12)
        assert doc["outcome"] == [4, 1]

    def test_guard_exits_2(self, tmp_path):
        big = tmp_path / "big.json"
        big.write_text(serialize_instance(generate_instance(2, 26, 1, seed=0)))
        code = main(["oracle", "--instance", str(big), "--lambda", "0.5,0.5"])
        assert code == 2


class TestFrontCommand:
    def test_merge_and_figure(self, rand_file, tmp_path):
        results = []
        for i, lam in enumerate(("0.3,0.7", "0.6,0.4")):
            out = tmp_path / f"r{i}.json"
            assert main(["solve", "--instance", rand_file, "--lambda", lam,
                         "--out", str(out)]) == 0
            results.append(str(out))
        points = tmp_path / "front.csv"
        code = main(["front", "--results", *results, "--out", str(points)])
        assert code == 0
        assert points.exists()
        assert points.with_suffix(".png").exists()
        header = points.read_text().splitlines()[0]
        assert header == "set,f1,f2"

    def test_mixed_instances_exit_2(self, rand_file, toy_file, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["solve", "--instance", rand_file, "--lambda", "0.5,0.5", "--out", str(a)])
        main(["solve", "--instance", toy_file, "--lambda", "0.5,0.5", "--out", str(b)])
        code = main(["front", "--results", str(a), str(b),
                     "--out", str(tmp_path / "front.csv")])
        assert code == 2
