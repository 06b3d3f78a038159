"""Command-line interface: exit codes, artifacts, determinism, config."""

import csv
import json
from importlib import resources

import jsonschema
import pytest

from jacobi_spectra.cli import main

CATALOG = [
    "Line_CP2",
    "Conic_CP2",
    "FactorSphere",
    "Diagonal_Product",
    "FlatSubtorus",
]


def _schema(name):
    ref = resources.files("jacobi_spectra") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


def _validate(path, schema_name):
    payload = json.loads(path.read_text())
    jsonschema.validate(payload, _schema(schema_name))
    return payload


# ---------------------------------------------------------------------------
# listing and geometry dump
# ---------------------------------------------------------------------------

def test_list_curves(capsys):
    assert main(["list-curves"]) == 0
    out = capsys.readouterr().out
    for name in CATALOG:
        assert name in out
    assert "c=6" in out and "c=0" in out


def test_dump_geometry(tmp_path):
    out = tmp_path / "geo"
    assert main(["dump-geometry", "--curve", "Conic_CP2", "--out", str(out)]) == 0
    payload = _validate(out / "geometry.json", "geometry")
    assert payload["curve"] == "Conic_CP2"
    assert payload["deg_normal"] == 4
    _validate(out / "manifest.json", "manifest")


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_artifacts(tmp_path):
    out = tmp_path / "spec"
    rc = main(
        ["spectrum", "--curve", "FactorSphere", "--cutoff", "4", "--out", str(out)]
    )
    assert rc == 0
    payload = _validate(out / "spectrum.json", "spectrum")
    ev = payload["eigenvalues"]
    assert abs(ev[0]) <= 1e-8
    assert all(abs(v - 2.0) <= 1e-8 for v in ev[1:4])
    assert payload["kernel_dim"] == 1
    assert payload["lambda1"] == pytest.approx(2.0, abs=1e-8)

    with (out / "ladder.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "eigenvalue"]
    assert len(rows) - 1 == len(ev)

    svg = (out / "ladder.svg").read_text()
    assert svg.startswith("<svg") and "2c = 2" in svg

    manifest = _validate(out / "manifest.json", "manifest")
    assert set(manifest["files"]) == {"spectrum.json", "ladder.csv", "ladder.svg"}
    assert manifest["config"]["curve"] == "FactorSphere"


def test_spectrum_rerun_is_byte_identical(tmp_path):
    args = ["spectrum", "--curve", "Line_CP2", "--cutoff", "6", "--seed", "7"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    for name in ("spectrum.json", "ladder.csv", "ladder.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_spectrum_emit_subset(tmp_path):
    out = tmp_path / "sub"
    rc = main(
        [
            "spectrum",
            "--curve",
            "Line_CP2",
            "--cutoff",
            "4",
            "--emit",
            "json",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    assert (out / "spectrum.json").exists()
    assert not (out / "ladder.csv").exists()
    assert not (out / "ladder.svg").exists()


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_torus_with_skips(tmp_path, capsys):
    out = tmp_path / "ver"
    rc = main(
        [
            "verify",
            "--curve",
            "FlatSubtorus",
            "--checks",
            "thm1,thm2,claim1,claim2",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    text = capsys.readouterr().out
    assert "PASS" in text and "SKIP" in text
    payload = _validate(out / "verify.json", "verify")
    assert payload["overall"] is True
    by_name = {c["check"]: c for c in payload["checks"]}
    assert by_name["thm2_lambda1"]["skipped"] is True
    assert by_name["thm2_remark2"]["pass"] is True
    assert "skipped" not in by_name["thm2_remark2"]
    assert by_name["claim1_dim"]["pass"] is True


def test_verify_mixed_parameters_via_alias(tmp_path):
    out = tmp_path / "mixed"
    rc = main(
        [
            "verify",
            "--curve",
            "FactorSphere_Mixed",
            "--checks",
            "thm1",
            "--cutoffs",
            "4,6",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    payload = _validate(out / "verify.json", "verify")
    row = payload["checks"][0]
    assert row["check"] == "thm1_lower_bound"
    assert row["predicted"] == pytest.approx(2.0)
    assert row["measured"] == pytest.approx(4.0, abs=1e-6)


def test_verify_failure_exit_code(tmp_path):
    out = tmp_path / "fail"
    rc = main(
        [
            "verify",
            "--curve",
            "Conic_CP2",
            "--checks",
            "topology",
            "--tol",
            "tol_geom=1e-30",
            "--out",
            str(out),
        ]
    )
    assert rc == 1
    payload = _validate(out / "verify.json", "verify")
    assert payload["overall"] is False


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------

def test_converge_artifacts(tmp_path):
    out = tmp_path / "conv"
    rc = main(
        [
            "converge",
            "--curve",
            "Line_CP2",
            "--cutoffs",
            "6,8,10",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = (out / "convergence.csv").read_text().strip().splitlines()
    assert lines[0] == "cutoff,lambda1,kernel_dim,observed_order"
    assert len([ln for ln in lines if not ln.startswith("#")]) == 4
    footer = [ln for ln in lines if ln.startswith("# lambda1_extrapolated")]
    assert len(footer) == 1
    assert float(footer[0].split(",")[1]) == pytest.approx(12.0, rel=1e-9)
    assert (out / "convergence.svg").read_text().startswith("<svg")
    _validate(out / "manifest.json", "manifest")


# ---------------------------------------------------------------------------
# exit codes for bad usage
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--curve", "NoSuchCurve"],
        ["spectrum", "--curve", "Line_CP2", "--cutoff", "1"],
        ["spectrum", "--curve", "Line_CP2", "--emit", "pdf"],
        ["verify", "--curve", "Line_CP2", "--tol", "tol_nonsense=1"],
        ["converge", "--curve", "Line_CP2", "--cutoffs", "8"],
        ["converge", "--curve", "Line_CP2", "--cutoffs", "8,6,10"],
        ["converge", "--curve", "Line_CP2"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    rc = main(argv + ["--out", str(tmp_path / "x")])
    assert rc == 2
    assert capsys.readouterr().err.strip()


def test_solver_failure_exit_3(tmp_path, monkeypatch):
    import jacobi_spectra.cli as cli_mod
    from jacobi_spectra.errors import GramIllConditioned

    def boom(*a, **k):
        raise GramIllConditioned("synthetic ill-conditioned gram")

    monkeypatch.setattr(cli_mod, "eigensolve", boom)
    rc = main(
        ["spectrum", "--curve", "Line_CP2", "--cutoff", "4", "--out", str(tmp_path)]
    )
    assert rc == 3


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def test_config_file_layering(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        'curve = "FactorSphere"\ncutoff = 4\nseed = 9\nemit = ["json"]\n'
    )
    out = tmp_path / "from_toml"
    rc = main(["spectrum", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["curve"] == "FactorSphere"
    assert manifest["config"]["cutoff"] == 4
    assert manifest["config"]["seed"] == 9

    # explicit flags win over the config file
    out2 = tmp_path / "override"
    rc = main(
        ["spectrum", "--config", str(cfg), "--cutoff", "6", "--out", str(out2)]
    )
    assert rc == 0
    manifest2 = json.loads((out2 / "manifest.json").read_text())
    assert manifest2["config"]["cutoff"] == 6
    assert manifest2["config"]["curve"] == "FactorSphere"


def test_config_file_json(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"curve": "Line_CP2", "cutoff": 4}))
    out = tmp_path / "from_json"
    rc = main(["spectrum", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    payload = json.loads((out / "spectrum.json").read_text())
    assert payload["curve"] == "Line_CP2" and payload["cutoff"] == 4


def test_bad_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('curve = "Line_CP2"\nwavelength = 3\n')
    rc = main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "wavelength" in capsys.readouterr().err
