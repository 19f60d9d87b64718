"""Run a parsed job and serialize its report."""

from __future__ import annotations

import json
import random
from typing import Callable

from . import k1 as engine
from .errors import GradedK1Error, TruncatedError, WitnessUnavailableError
from .jobs import JobSpec, job_to_dict
from .matrices import ElementaryGenerator, GradedMatrix
from .sampling import random_generator, random_invertible, random_unit, unit_degrees
from .whitehead import (
    Certificate,
    commutator_embedding,
    conjugate_block_factorization,
    hyperbolic_factorization,
    rotation_factorization,
    stable_perfectness_witness,
    strongly_graded_perfectness_witness,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_TRUNCATED = 2
EXIT_INPUT = 3


def _cert_summary(cert: Certificate, with_letters: bool = True) -> dict:
    out = cert.to_dict()
    if not with_letters:
        out.pop("letters")
    if cert.notes:
        out["notes"] = {k: v for k, v in sorted(cert.notes.items()) if isinstance(v, (bool, int, str, list, dict))}
    return out


# ---------------------------------------------------------------------------
# verify-identities


def _sample_certificates(spec: JobSpec, name: str, rng: random.Random) -> list[Certificate]:
    ring, fam = spec.ring, spec.family
    out = []
    for _ in range(spec.samples):
        if name == "hyperbolic":
            out.append(hyperbolic_factorization(random_invertible(ring, fam, rng)))
        elif name == "commutator":
            out.append(commutator_embedding(random_invertible(ring, fam, rng), random_invertible(ring, fam, rng)))
        elif name == "stable-perfectness":
            if len(fam) < 2:
                return out
            out.append(stable_perfectness_witness(random_generator(ring, fam, rng)))
        elif name == "strong-perfectness":
            if len(fam) < 3:
                return out
            out.append(strongly_graded_perfectness_witness(random_generator(ring, fam, rng)))
        elif name == "rotation":
            lam = unit_degrees(ring, rng)
            out.append(rotation_factorization(random_unit(ring, lam, rng), len(fam), fam))
        elif name == "conjugate-block":
            lam = unit_degrees(ring, rng)
            out.append(conjugate_block_factorization(random_invertible(ring, fam, rng), random_unit(ring, lam, rng)))
    return out


def _explicit_certificates(spec: JobSpec, name: str) -> list[Certificate]:
    ring = spec.ring
    mats: list[GradedMatrix] = spec.matrices
    gens: list[ElementaryGenerator] = spec.elementary
    out = []
    if name == "hyperbolic":
        out += [hyperbolic_factorization(m) for m in mats]
    elif name == "commutator":
        out += [commutator_embedding(a, b) for a in mats for b in mats if a.family == b.family]
    elif name == "stable-perfectness":
        out += [stable_perfectness_witness(g) for g in gens]
    elif name == "strong-perfectness":
        out += [strongly_graded_perfectness_witness(g) for g in gens if len(g.family) >= 3]
    elif name == "conjugate-block":
        one = ring.one()
        out += [conjugate_block_factorization(m, one) for m in mats]
    return out


def run_verify(spec: JobSpec) -> tuple[int, dict]:
    rng = random.Random(spec.seed)
    sections = {}
    failures = 0
    for name in spec.identities:
        try:
            certs = _explicit_certificates(spec, name) + _sample_certificates(spec, name, rng)
        except WitnessUnavailableError as exc:
            sections[name] = {"skipped": exc.to_dict()}
            continue
        bad = [c for c in certs if not c.verified]
        failures += len(bad)
        sections[name] = {
            "count": len(certs),
            "verified": len(certs) - len(bad),
            "certificates": [_cert_summary(c) for c in certs],
        }
    return (EXIT_FAILED if failures else EXIT_OK), {"identities": sections, "failures": failures}


# ---------------------------------------------------------------------------
# K1 commands


def _k1_consistent(rep: engine.K1Report) -> bool:
    return not rep.normal or rep.gl_order == rep.e_order * rep.order


def run_k1(spec: JobSpec) -> tuple[int, dict]:
    rep = engine.k1_local(spec.ring, spec.family, spec.level, spec.cap, spec.workers)
    return (EXIT_OK if _k1_consistent(rep) else EXIT_FAILED), {"k1": rep.to_dict()}


def run_relative(spec: JobSpec) -> tuple[int, dict]:
    rep = engine.k1_relative_local(spec.ring, spec.ideal, spec.family, spec.level, spec.cap, spec.workers)
    contain = engine.relative_containment(spec.ring, spec.ideal, spec.family, spec.level, spec.cap)
    ok = _k1_consistent(rep) and contain["in_congruence"]
    return (EXIT_OK if ok else EXIT_FAILED), {"relative_k1": rep.to_dict(), "containment": contain}


def run_exactness(spec: JobSpec) -> tuple[int, dict]:
    rep = engine.check_exactness(spec.ring, spec.ideal, spec.family, spec.level, spec.cap, spec.workers)
    return (EXIT_OK if rep.exact else EXIT_FAILED), {"exactness": rep.to_dict()}


def run_perfectness(spec: JobSpec) -> tuple[int, dict]:
    e = engine.elementary_group(spec.ring, spec.family, spec.level, spec.cap, spec.workers)
    e.require_complete()
    rep = engine.perfectness_check(e, spec.cap, spec.workers)
    out = {"perfectness": rep.to_dict()}
    code = EXIT_OK
    fam = spec.family.repeat(spec.level)
    if len(fam) >= 3:
        # constructive witnesses exist exactly when the needed degrees are strongly graded
        try:
            certs = []
            for g in e.generators:
                i, j, r = g.elementary
                gen = ElementaryGenerator(fam, i, j, e.algebra.entry_component(i, j)[r])
                certs.append(strongly_graded_perfectness_witness(gen))
            failed = sum(not c.verified for c in certs)
            out["strong_witnesses"] = {"count": len(certs), "verified": len(certs) - failed}
            if failed:
                code = EXIT_FAILED
        except WitnessUnavailableError as exc:
            out["strong_witnesses"] = {"unavailable": exc.to_dict()}
    return code, out


def run_gamma(spec: JobSpec) -> tuple[int, dict]:
    ring, fam, lam = spec.ring, spec.family, spec.lam
    rep = engine.k1_local(ring, fam, spec.level, spec.cap, spec.workers)
    susp = engine.suspension_check(ring, fam, lam, spec.level, spec.cap)
    compat = engine.gamma_action_check(ring, fam, lam, spec.level, spec.cap)
    out = {"k1": rep.to_dict(), "suspension": susp, "action": compat}
    ok = susp["bijective"] and susp["same_invariants"] and compat["compatible"]
    big = fam.repeat(spec.level)
    try:
        certs = [engine.crossed_product_triviality_check(ring, big, lam, h) for h in rep.representatives]
        out["triviality"] = {
            "count": len(certs),
            "verified": sum(c.verified for c in certs),
            "certificates": [_cert_summary(c, with_letters=False) for c in certs],
        }
        ok = ok and all(c.verified and c.notes.get("conjugate_equals_translate") for c in certs)
    except WitnessUnavailableError as exc:
        out["triviality"] = {"unavailable": exc.to_dict()}
    return (EXIT_OK if ok else EXIT_FAILED), out


def run_stabilization(spec: JobSpec) -> tuple[int, dict]:
    levels = spec.levels or list(range(1, spec.level + 1))
    rep = engine.stabilization_check(spec.ring, spec.family, levels, spec.cap, spec.workers)
    ok = all(_k1_consistent(r) for r in rep.reports) and all(m["homomorphism"] for m in rep.maps)
    return (EXIT_OK if ok else EXIT_FAILED), {"stabilization": rep.to_dict()}


HANDLERS: dict[str, Callable[[JobSpec], tuple[int, dict]]] = {
    "verify-identities": run_verify,
    "k1": run_k1,
    "relative-k1": run_relative,
    "exactness": run_exactness,
    "perfectness": run_perfectness,
    "gamma-action": run_gamma,
    "stabilization": run_stabilization,
}


def run_job(spec: JobSpec) -> tuple[int, dict]:
    """Execute a job; returns (exit code, report). Never raises for engine failures."""
    report = {"job": job_to_dict(spec), "command": spec.command}
    try:
        code, result = HANDLERS[spec.command](spec)
    except TruncatedError as exc:
        report.update(status="truncated", error=exc.to_dict())
        return EXIT_TRUNCATED, report
    except GradedK1Error as exc:
        report.update(status="failed", error=exc.to_dict())
        return EXIT_FAILED, report
    report["result"] = result
    report["status"] = "ok" if code == EXIT_OK else "failed"
    return code, report


# ---------------------------------------------------------------------------
# rendering


def emit_report(report: dict, fmt: str = "structured") -> bytes:
    if fmt == "structured":
        return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    return ("\n".join(render_text(report)) + "\n").encode("utf-8")


def _k1_lines(rep: dict, title: str) -> list[str]:
    inv = rep["invariants"]
    group = "obstructed" if inv is None else ("trivial" if not inv else " x ".join(f"Z/{d}" for d in inv))
    lines = [
        f"{title} at family {rep['family']} level {rep['level']}: {group}",
        f"  |GL| = {rep['gl_order']}  |E| = {rep['e_order']}  index = {rep['quotient_order']}"
        f"  normal = {rep['normal']}",
    ]
    if rep["obstruction"]:
        lines.append(f"  obstruction: {rep['obstruction']}")
    return lines


def render_text(report: dict) -> list[str]:
    lines = [f"command: {report['command']}", f"status: {report['status']}"]
    if "error" in report:
        err = report["error"]
        lines.append(f"error [{err['code']}]: {err['message']}")
        return lines
    res = report["result"]
    if "k1" in res:
        lines += _k1_lines(res["k1"], "K1")
    if "relative_k1" in res:
        lines += _k1_lines(res["relative_k1"], "K1(A,I)")
        c = res["containment"]
        lines.append(f"  E(A,I) in GL(A,I): {c['in_congruence']}  E(A,I) in E(A): {c['in_elementary']}")
    if "exactness" in res:
        ex = res["exactness"]
        lines += _k1_lines(ex["relative"], "K1(A,I)")
        lines += _k1_lines(ex["middle"], "K1(A)")
        lines += _k1_lines(ex["quotient"], "K1(A/I)")
        lines.append(f"image (p2)_* = {ex['image_p2']}  kernel q_* = {ex['kernel_q']}")
        lines.append("sequence is exact" if ex["exact"] else "SEQUENCE IS NOT EXACT")
    if "perfectness" in res:
        p = res["perfectness"]
        verdict = "perfect" if p["perfect"] else "NOT perfect"
        lines.append(f"E: {verdict}  |E| = {p['e_order']}  |[E,E]| = {p['commutator_order']}")
        if p["witness"]:
            lines.append(f"  witness outside [E,E]: {p['witness']['letter']}")
        if p["abelianization"] is not None:
            lines.append(f"  E/[E,E] invariants: {p['abelianization']}")
        sw = res.get("strong_witnesses")
        if sw and "count" in sw:
            lines.append(f"  constructive witnesses: {sw['verified']}/{sw['count']} verified")
    if "suspension" in res:
        s = res["suspension"]
        lines.append(
            f"suspension: invariants {s['invariants']} -> {s['shifted_invariants']}, bijective = {s['bijective']}"
        )
        lines.append(f"action compatible with products: {res['action']['compatible']}")
        t = res["triviality"]
        if "count" in t:
            lines.append(f"trivial action certificates: {t['verified']}/{t['count']} verified")
        else:
            lines.append(f"trivial action not certified: {t['unavailable']['message']}")
    if "stabilization" in res:
        st = res["stabilization"]
        for r in st["reports"]:
            lines += _k1_lines(r, "K1")
        for m in st["maps"]:
            lines.append(f"  level {m['from']} -> {m['to']}: iso = {m['iso']}")
        lines.append(f"stable from level: {st['stable_from']}")
    if "identities" in res:
        for name, sec in res["identities"].items():
            if "skipped" in sec:
                lines.append(f"{name}: skipped ({sec['skipped']['message']})")
                continue
            lines.append(f"{name}: {sec['verified']}/{sec['count']} verified")
            for c in sec["certificates"]:
                if not c["verified"]:
                    lines.append(f"  FAILED {c['kind']} on family {c['family']}")
    return lines
