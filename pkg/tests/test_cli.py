import io
import json
import subprocess
import sys

import pytest

from cechdolbeault.cli import main
from cechdolbeault.complexes import cohomology
from cechdolbeault.formats import dumps, read_path
from cechdolbeault.models import CORPUS
from cechdolbeault.morphisms import blowup_decomposition, injectivity_certificates


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    for name in CORPUS:
        code, _, _ = run("emit-bundle", name, str(root / name))
        assert code == 0
    return root


def as_json(obj):
    return json.loads(dumps(obj))


def structured(*argv):
    code, out, err = run("--structured", *argv)
    return code, json.loads(out)


def test_list_bundles():
    code, out, _ = run("emit-bundle", "--list")
    assert code == 0
    assert out.split() == sorted(CORPUS)


def test_emit_unknown_bundle(tmp_path):
    code, _, err = run("emit-bundle", "klein-bottle", str(tmp_path))
    assert code == 2 and "unknown bundle" in err


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_validate_corpus(corpus, name):
    code, report = structured("validate", str(corpus / name))
    assert code == 0 and report["passed"]


def test_cohomology_of_torus2(corpus):
    code, out, _ = run("cohomology", str(corpus / "torus-2"), "--p", "1", "--q", "1")
    assert code == 0
    assert out.splitlines()[-1].split() == ["1", "1", "4", "4"]


def test_cohomology_matches_library(corpus):
    code, report = structured("cohomology", str(corpus / "torus-2"))
    b = read_path(corpus / "torus-2")
    c = next(iter(b.models.values())).complex
    assert code == 0
    for g in report["groups"]:
        assert g["dim"] == cohomology(c, g["p"], g["q"]).dim


def test_morphism_check_cover(corpus):
    code, report = structured("morphism-check", str(corpus / "cover2-torus-1"))
    assert code == 0
    assert report["mu"] == "2" and report["projection_identity"]["holds"]
    m = next(iter(read_path(corpus / "cover2-torus-1").morphisms.values()))
    assert report["certificates"] == as_json([c.to_dict() for c in injectivity_certificates(m)])


def test_morphism_check_broken(corpus):
    code, out, _ = run("morphism-check", str(corpus / "broken-torus-1"))
    assert code == 1
    assert "degree mu = 3" in out and "no certificates issued" in out


def test_blowup_violation_names_the_map(corpus):
    code, out, _ = run("blowup", str(corpus / "blowup-violating"))
    assert code == 1
    assert "π* on H^{0,0}(U0) iso (rank 1, 2x1)" in out


@pytest.mark.parametrize("name", ["blowup-11", "blowup-surface", "blowup-mixed"])
def test_blowup_matches_library(corpus, name):
    code, report = structured("blowup", str(corpus / name))
    assert code == 0
    m = next(iter(read_path(corpus / name).morphisms.values()))
    for entry in report["bidegrees"]:
        assert entry == as_json(blowup_decomposition(m, entry["p"], entry["q"]).to_dict())


@pytest.mark.parametrize("cmd", ["relative", "les", "dual-compare"])
def test_pair_commands_on_torus(corpus, cmd):
    code, report = structured(cmd, str(corpus / "torus-2"))
    assert code == 0 and report["passed"]


def test_unknown_command_is_a_usage_error(capsys):
    assert run("bogus", "x")[0] == 2
    assert run("validate")[0] == 2
    assert run("cohomology", ".", "--colour")[0] == 2


def test_missing_path(tmp_path):
    code, _, err = run("validate", str(tmp_path / "missing"))
    assert code == 2 and "input error" in err


def test_unknown_object_name(corpus):
    code, _, err = run("cohomology", str(corpus / "torus-1"), "--object", "nope")
    assert code == 2 and "unknown object" in err


def test_structured_output_is_repeatable(corpus):
    argv = ["--structured", "blowup", str(corpus / "blowup-mixed")]
    assert run(*argv) == run(*argv)


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "cechdolbeault", "validate", str(corpus / "torus-1")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
