import json
import random
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedk1.cli import main
from gradedk1.errors import DegreeError, JobError, JobSyntaxError
from gradedk1.grading import cyclic
from gradedk1.jobs import JobSpec, emit_job, job_to_dict, parse_job
from gradedk1.rings import GroupRing, LaurentRing, PairRing, TrivialRing, ideal
from gradedk1.runner import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_TRUNCATED, emit_report, run_job
from gradedk1.sampling import random_family, random_generator, random_invertible

JOBS = Path(__file__).resolve().parent.parent / "jobs"
SAMPLE_JOBS = sorted(p for p in JOBS.glob("*.toml") if p.name != "bad_degree.toml")


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


# ---------------------------------------------------------------------------
# parsing and emitting


@pytest.mark.parametrize("path", SAMPLE_JOBS, ids=lambda p: p.stem)
def test_sample_jobs_round_trip(path):
    spec = parse_job(path.read_text())
    again = parse_job(emit_job(spec))
    assert job_to_dict(again) == job_to_dict(spec)


RINGS = [TrivialRing(4), TrivialRing(2, (2,)), GroupRing(3, cyclic(2)), PairRing(4, 2), LaurentRing(3)]


@given(st.sampled_from(RINGS), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_random_jobs_round_trip(ring, size, seed):
    rng = random.Random(seed)
    fam = random_family(ring.grading, size, rng)
    spec = JobSpec("verify-identities", ring, fam, seed=seed % 1000, samples=2)
    spec.matrices = [random_invertible(ring, fam, rng)]
    if size > 1:
        spec.elementary = [random_generator(ring, fam, rng)]
    text = emit_job(spec)
    assert job_to_dict(parse_job(text)) == job_to_dict(spec)


def test_ideal_round_trip(z4):
    spec = JobSpec("exactness", z4, parse_job('command="k1"\nfamily=[[]]\n[ring]\nkind="trivial"\nmodulus=4\n').family)
    spec.ideal = ideal(z4, [z4.element(2)])
    assert job_to_dict(parse_job(emit_job(spec))) == job_to_dict(spec)


def test_syntax_errors_carry_line_and_column():
    with pytest.raises(JobSyntaxError) as info:
        parse_job('command = "k1"\nfamily = [0,\n[ring]\nkind = "trivial"\n')
    assert info.value.details["line"] == 3 and info.value.details["column"] >= 1
    assert info.value.to_dict()["code"] == "E_SYNTAX"


@pytest.mark.parametrize(
    "text, error, fragment",
    [
        ('command="k1"\nfamily=[]\n[ring]\nkind="trivial"\nmodulus=4\n', JobError, "empty"),
        ('command="k1"\nfamily=[[]]\n[ring]\nkind="trivial"\nmodulus=1\n', JobError, "modulus"),
        ('command="exactness"\nfamily=[[]]\n[ring]\nkind="trivial"\nmodulus=4\n', JobError, "ideal"),
        ('command="gamma-action"\nfamily=[0]\n[ring]\nkind="group-ring"\nmodulus=3\n', JobError, "lambda"),
        ('command="k1"\nfamily=[[]]\nlevel=0\n[ring]\nkind="trivial"\nmodulus=4\n', JobError, "level"),
        ('command="k1"\nfamily=[[]]\nbogus=1\n[ring]\nkind="trivial"\nmodulus=4\n', JobError, "bogus"),
        ('command="k1"\nfamily=[[]]\n[ring]\nkind="laurent"\nfield=4\n', JobError, "prime"),
    ],
)
def test_invalid_jobs_are_rejected(text, error, fragment):
    with pytest.raises(error) as info:
        parse_job(text)
    assert fragment in str(info.value)


def test_bad_degree_names_the_entry():
    with pytest.raises(DegreeError) as info:
        parse_job((JOBS / "bad_degree.toml").read_text())
    assert "e_{1,2}" in str(info.value) and "expected -1" in str(info.value)


# ---------------------------------------------------------------------------
# the command line


def test_cli_exit_codes(capsys):
    code, out = _run(capsys, "run", JOBS / "exactness_z4.toml")
    assert code == EXIT_OK and "sequence is exact" in out
    code, out = _run(capsys, "run", JOBS / "bad_degree.toml", "--format", "structured")
    assert code == EXIT_INPUT and json.loads(out)["error"]["code"] == "E_DEGREE"
    code, out = _run(capsys, "k1", JOBS / "k1_gl2_f3.toml", "--cap", "10")
    assert code == EXIT_TRUNCATED and "truncated" in out
    code, _ = _run(capsys, "k1", JOBS / "exactness_z4.toml")
    assert code == EXIT_INPUT  # command disagrees with the file


def test_cli_missing_file(capsys, tmp_path):
    code, out = _run(capsys, "run", tmp_path / "nope.toml")
    assert code == EXIT_INPUT and "cannot read" in out


def test_cli_rejects_nonpositive_level(capsys):
    code, _ = _run(capsys, "run", JOBS / "exactness_z4.toml", "--level", "0")
    assert code == EXIT_INPUT


def test_failed_certificate_is_exit_one(monkeypatch):
    from gradedk1 import runner

    spec = parse_job((JOBS / "verify_laurent.toml").read_text())
    real = runner._explicit_certificates

    def broken(spec, name):
        certs = real(spec, name)
        for c in certs:
            c.verified = False
        return certs

    monkeypatch.setattr(runner, "_explicit_certificates", broken)
    code, report = run_job(spec)
    assert code == EXIT_FAILED and report["status"] == "failed"


@pytest.mark.parametrize("path", SAMPLE_JOBS, ids=lambda p: p.stem)
def test_structured_reports_are_deterministic(path):
    spec = parse_job(path.read_text())
    first = emit_report(run_job(spec)[1], "structured")
    second = emit_report(run_job(parse_job(path.read_text()))[1], "structured")
    assert first == second
    spec.workers = 4
    threaded = json.loads(emit_report(run_job(spec)[1], "structured"))
    assert threaded["result"] == json.loads(first)["result"]


def test_usage_errors_are_input_rejections(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", str(JOBS / "k1_gl2_f3.toml")])
    assert info.value.code == EXIT_INPUT
