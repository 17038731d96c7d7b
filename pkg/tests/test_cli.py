"""CLI: subcommand behavior, exit codes, JSON shape, determinism."""

import json

import pytest

from padicperiods import cli, formal
from padicperiods.padic import PadicMatrix, make_field_cached, matrix_to_json


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestModelsCommand:
    def test_n2_slopes(self, capsys):
        code, out, _ = run(capsys, ["models", "--n", "2", "--precision", "12"])
        assert code == 0
        rep = json.loads(out)
        assert rep["schema"] == 1
        assert rep["slopes"]["height_n_model"] == ["1/2", "1/2"]
        assert rep["slopes"]["special_model"] == ["1/2"] * 4
        assert rep["delta"]["height"] == 1

    def test_n1_trivial(self, capsys):
        code, out, _ = run(capsys, ["models", "--n", "1", "--precision", "8"])
        assert code == 0
        rep = json.loads(out)
        assert rep["slopes"]["height_n_model"] == ["1/1"]

    def test_missing_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["models"])
        assert exc.value.code == 2


class TestCorrespondCommand:
    def test_sampled_point(self, capsys):
        code, out, _ = run(
            capsys,
            ["correspond", "--n", "2", "--m", "2", "--seed", "7", "--precision", "32"],
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["involution"] and rep["transpose_duality"]
        assert rep["omega"]["X"]["status"] == "in_Omega"

    def test_field_too_small(self, capsys):
        code, _, err = run(capsys, ["correspond", "--n", "2", "--m", "1"])
        assert code == cli.EXIT_BAD_FLAGS
        assert "field too small" in err

    def test_full_rank_matrix_rejected(self, tmp_path, capsys):
        K = make_field_cached(2, 2, 16)
        path = tmp_path / "m.json"
        path.write_text(json.dumps(matrix_to_json(PadicMatrix.identity(K, 2))))
        code, out, _ = run(capsys, ["correspond", "--matrix", str(path)])
        assert code == cli.EXIT_RANK_REJECTED
        rep = json.loads(out)
        assert rep["rank_rejected"]["kind"] == "full_rank"

    def test_rational_hyperplane_witness(self, tmp_path, capsys):
        # symmetric rational rank-1 matrix: fil_G is a rational hyperplane
        K = make_field_cached(2, 2, 16)
        X = PadicMatrix.from_ints(K, [[1, 1], [1, 1]])
        path = tmp_path / "m.json"
        path.write_text(json.dumps(matrix_to_json(X)))
        code, out, _ = run(capsys, ["correspond", "--matrix", str(path)])
        rep = json.loads(out)
        assert rep["omega"]["X"]["status"] == "not_in_Omega"
        assert "witness" in rep["omega"]["X"]


class TestLedgerCommand:
    def test_cm_table(self, capsys):
        code, out, _ = run(capsys, ["ledger", "--p", "2", "--h", "3", "--i0", "0"])
        assert code == 0
        rep = json.loads(out)
        assert rep["y_valuations"] == ["1/7", "2/7", "4/7"]
        assert all(c["pass"] for c in rep["checks"])

    def test_heights_consistent(self, capsys):
        code, out, _ = run(capsys, ["ledger", "--heights", "2,3,6,1"])
        assert code == 0
        assert json.loads(out)["height_transfer"]["consistent"]

    def test_heights_inconsistent(self, capsys):
        code, out, _ = run(capsys, ["ledger", "--heights", "2,3,5,1"])
        assert code == cli.EXIT_CHECK_FAILED
        assert not json.loads(out)["height_transfer"]["consistent"]

    def test_bad_heights_flag(self, capsys):
        code, _, err = run(capsys, ["ledger", "--heights", "2,3"])
        assert code == cli.EXIT_BAD_FLAGS

    def test_missing_flags(self, capsys):
        code, _, _ = run(capsys, ["ledger"])
        assert code == cli.EXIT_BAD_FLAGS


class TestFormalGroupCommand:
    def test_height_one(self, capsys):
        code, out, _ = run(capsys, ["formal-group", "--p", "2", "--h", "1", "--D", "4"])
        assert code == 0
        rep = json.loads(out)
        assert rep["height"] == 2 and rep["height_ok"]
        assert [[1, 0], "1/1"] in rep["law"]
        assert [[1, 1], "-1/1"] in rep["law"]

    def test_height_two(self, capsys):
        code, out, _ = run(capsys, ["formal-group", "--p", "2", "--h", "2", "--D", "8"])
        assert code == 0
        assert json.loads(out)["height"] == 4

    def test_small_D_rejected(self, capsys):
        code, _, err = run(capsys, ["formal-group", "--p", "2", "--h", "2", "--D", "3"])
        assert code == cli.EXIT_BAD_FLAGS

    def test_integrality_exit_code(self, capsys, monkeypatch):
        def boom(p, h, D):
            raise formal.IntegralityError("planted")

        monkeypatch.setattr(cli.formal, "group_law", boom)
        code, _, err = run(capsys, ["formal-group", "--p", "2", "--h", "1"])
        assert code == cli.EXIT_INTEGRALITY


class TestDeterminism:
    def test_byte_identical_reruns(self, capsys):
        argvs = [
            ["models", "--n", "2", "--precision", "12"],
            ["correspond", "--n", "2", "--m", "2", "--seed", "3", "--precision", "32"],
            ["ledger", "--p", "3", "--h", "2", "--i0", "1"],
            ["formal-group", "--p", "3", "--h", "1", "--D", "6"],
        ]
        for argv in argvs:
            _, out1, _ = run(capsys, argv)
            _, out2, _ = run(capsys, argv)
            assert out1 == out2
            assert out1.endswith("\n")

    def test_pretty_adds_no_information(self, capsys):
        _, plain, _ = run(capsys, ["ledger", "--p", "2", "--h", "2", "--i0", "0"])
        _, pretty, _ = run(capsys, ["--pretty", "ledger", "--p", "2", "--h", "2", "--i0", "0"])
        assert json.loads(plain) == json.loads(pretty)

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("PADIC_PRECISION", "12")
        # the parser default is bound when the parser is built
        parser = cli.build_parser()
        args = parser.parse_args(["models", "--n", "1"])
        assert args.precision == 12
