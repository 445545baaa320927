import json

import pytest

from gmra import catalog, cli
from gmra.jsonio import dump_json, problem_to_json


@pytest.fixture
def problems(tmp_path):
    def write(name):
        path = tmp_path / f"{name}.json"
        path.write_text(dump_json(problem_to_json(catalog.get(name))))
        return str(path)

    return write


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMtilde:
    def test_journe_schema(self, problems, capsys):
        code, out, _ = run(capsys, ["--json", "mtilde", problems("journe")])
        assert code == 0
        assert json.loads(out) == {
            "mtilde": [{"interval": ["0", "1"], "value": 1}]
        }

    def test_flags_accepted_after_subcommand(self, problems, capsys):
        code, out, _ = run(capsys, ["mtilde", problems("journe"), "--json"])
        assert code == 0
        assert json.loads(out) == {
            "mtilde": [{"interval": ["0", "1"], "value": 1}]
        }

    def test_inconsistent_multiplicity_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "endomorphism": {"N": 2},
                    "multiplicity": [{"interval": ["1/4", "1/2"], "value": 1}],
                }
            )
        )
        code, _, err = run(capsys, ["mtilde", str(path)])
        assert code == 2


class TestSigma:
    def test_journe_sets(self, problems, capsys):
        code, out, _ = run(capsys, ["--json", "sigma", problems("journe")])
        assert code == 0
        data = json.loads(out)
        assert data["sigma"][1] == [["0", "1/7"], ["6/7", "1"]]
        assert data["sigma_tilde"] == [[["0", "1"]]]

    def test_centered_convention(self, problems, capsys):
        code, out, _ = run(
            capsys,
            ["--json", "--convention", "centered", "sigma", problems("journe")],
        )
        data = json.loads(out)
        assert data["sigma"][1] == [["-1/7", "1/7"]]


class TestCheckFilter:
    def test_passes(self, problems, capsys):
        code, out, _ = run(capsys, ["--json", "check-filter", problems("haar")])
        assert code == 0
        data = json.loads(out)
        assert data["filter"]["passed"] is True
        assert data["complementary"]["passed"] is True

    def test_negative_fixture_exits_2(self, problems, capsys):
        code, out, _ = run(
            capsys, ["--json", "check-filter", problems("haar_unnormalized")]
        )
        assert code == 2
        assert json.loads(out)["filter"]["max_residual"] >= 1.0


class TestEquiv:
    def test_negated_pair_exits_2(self, problems, capsys):
        code, out, _ = run(
            capsys,
            ["--json", "equiv", problems("haar"), problems("haar_negated")],
        )
        assert code == 2
        data = json.loads(out)
        assert data["verdict"] == "inequivalent"
        assert data["obstruction"]["kind"] == "constant_ratio"
        assert abs(data["obstruction"]["detail"]["ratio"]["re"] + 1.0) < 1e-9

    def test_same_pair_exits_0(self, problems, capsys):
        code, out, _ = run(
            capsys, ["--json", "equiv", problems("haar"), problems("haar")]
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "equivalent"

    def test_unknown_exits_3(self, tmp_path, capsys):
        # |h| = 1 filters with no certified obstruction or witness at degree 0
        base = {
            "endomorphism": {"N": 2},
            "multiplicity": [{"interval": ["0", "1"], "value": 1}],
        }
        a = dict(base)
        a["filters"] = {
            "H": [[{"pieces": [{"interval": ["0", "1"],
                                "terms": [{"freq": "1", "re": 1.0, "im": 0.0}]}]}]]
        }
        b = dict(base)
        b["filters"] = {
            "H": [[{"pieces": [{"interval": ["0", "1"],
                                "terms": [{"freq": "-1", "re": 1.0, "im": 0.0}]}]}]]
        }
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        pa.write_text(json.dumps(a))
        pb.write_text(json.dumps(b))
        code, out, _ = run(
            capsys, ["--json", "equiv", str(pa), str(pb), "--degree", "0"]
        )
        assert code == 3
        assert json.loads(out)["verdict"] == "unknown"


class TestConstruct:
    def test_rank2_negative_supports(self, problems, capsys):
        code, out, _ = run(
            capsys,
            [
                "--json",
                "--convention",
                "centered",
                "construct",
                problems("journe_rank2"),
                "--down",
                "1",
                "--depth",
                "1",
            ],
        )
        assert code == 0
        data = json.loads(out)
        assert data["negative"][0]["V"] == [
            [["-2/7", "-1/4"], ["-1/7", "1/7"], ["1/4", "2/7"]],
            [["-1/14", "1/14"]],
        ]

    def test_eigenfilter_refused(self, problems, capsys):
        code, out, _ = run(
            capsys, ["--json", "construct", problems("eigenfilter_constant")]
        )
        assert code == 2
        assert json.loads(out)["error"] == "NotPureIsometry"


class TestCascade:
    def test_cantor_verdict(self, problems, capsys):
        code, out, _ = run(
            capsys,
            ["--json", "cascade", problems("cantor3"), "--iters", "80",
             "--samples", "64"],
        )
        assert code == 0
        assert json.loads(out)["verdict"] == "degenerates_to_zero"

    def test_csv_dump(self, problems, capsys, tmp_path):
        target = tmp_path / "dump.csv"
        code, _, _ = run(
            capsys,
            ["cascade", problems("haar"), "--iters", "40", "--samples", "16",
             "--dump", str(target)],
        )
        assert code == 0
        lines = target.read_text().strip().splitlines()
        assert lines[0] == "omega,re,im,abs"
        assert len(lines) == 17


class TestComplement:
    def test_haar_complement(self, problems, capsys):
        code, out, _ = run(
            capsys, ["--json", "complement", problems("haar"), "--grid", "32"]
        )
        assert code == 0
        data = json.loads(out)
        assert data["report"]["passed"] is True
        assert data["G"]["grid"] == 64
        assert len(data["G"]["samples"][0][0]) == 64


class TestValidateAndCatalog:
    def test_validate_ok(self, problems, capsys):
        code, out, _ = run(capsys, ["--json", "validate", problems("journe")])
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_catalog_list(self, capsys):
        code, out, _ = run(capsys, ["catalog", "list"])
        assert code == 0
        assert "journe" in out.split()

    def test_catalog_show_roundtrip(self, capsys, tmp_path):
        code, out, _ = run(capsys, ["--json", "catalog", "show", "haar"])
        assert code == 0
        path = tmp_path / "haar.json"
        path.write_text(out)
        code, out2, _ = run(capsys, ["--json", "check-filter", str(path)])
        assert code == 0

    def test_catalog_unknown_name(self, capsys):
        code, _, err = run(capsys, ["catalog", "show", "nope"])
        assert code == 2 or code == 4  # UnknownName is an input-side error
        assert "nope" in err


class TestInputErrors:
    def test_missing_file_exits_4(self, capsys):
        code, _, err = run(capsys, ["mtilde", "/does/not/exist.json"])
        assert code == 4

    def test_schema_error_carries_path(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"endomorphism": {"N": 1}, "multiplicity": []}))
        code, _, err = run(capsys, ["mtilde", str(path)])
        assert code == 4
        assert "endomorphism.N" in err

    def test_unknown_command_exits_4(self, capsys):
        code, _, _ = run(capsys, ["frobnicate"])
        assert code == 4

    def test_tol_env_override(self, problems, capsys, monkeypatch):
        monkeypatch.setenv("GMRA_TOL", "1e-20")
        code, out, _ = run(capsys, ["--json", "check-filter", problems("haar")])
        # residual ~1e-16 exceeds the absurdly tight env tolerance
        assert code == 2
        monkeypatch.setenv("GMRA_TOL", "not-a-float")
        code, _, err = run(capsys, ["check-filter", problems("haar")])
        assert code == 4


class TestDeterminism:
    def test_byte_identical_reports(self, problems, capsys):
        path = problems("journe")
        _, out1, _ = run(capsys, ["--json", "validate", path])
        _, out2, _ = run(capsys, ["--json", "validate", path])
        assert out1 == out2

    def test_float_format(self, problems, capsys):
        _, out, _ = run(capsys, ["--json", "check-filter", problems("haar")])
        data = json.loads(out)
        assert isinstance(data["filter"]["max_residual"], float)


class TestRoutingAudit:
    def test_mtilde_routes_to_library(self, problems, capsys, monkeypatch):
        calls = {}

        def spy(m, e):
            calls["hit"] = True
            from gmra.multiplicity import compute_mtilde

            return compute_mtilde(m, e)

        monkeypatch.setattr(cli, "compute_mtilde", spy)
        run(capsys, ["mtilde", problems("haar")])
        assert calls.get("hit")

    def test_purity_routes_to_library(self, problems, capsys, monkeypatch):
        from gmra import equivalence

        calls = {}
        real = equivalence.purity_test

        def spy(H, **kw):
            calls["hit"] = True
            return real(H, **kw)

        monkeypatch.setattr(cli.equivalence, "purity_test", spy)
        run(capsys, ["purity", problems("haar")])
        assert calls.get("hit")
