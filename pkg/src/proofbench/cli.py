"""Command-line front end: generate, encode, check, translate, verify, tabulate.

Exit status: 0 success, 1 a checker or verifier rejected something, 2 malformed
input or mismatched formats. All randomness comes from one random.Random
(Mersenne Twister) seeded with the --seed integer, consumed in stage order.
"""
from __future__ import annotations

import csv
import io
import os
import random
import sys
import time

import click

from . import checkers as C
from . import io_json
from .cnf import DimacsError, emit_dimacs, parse_dimacs
from .formulations import FormulationError, identity_formulation, verify_formulation
from .mutate import KINDS as MUTATION_KINDS, mutants
from .translators import (TranslationError, eol_to_uns, maxresw_to_revres, revres_to_res, revres_to_sopl,
                          revres_to_usa, revrest_to_uns, sol_to_usa, sopl_formulation_to_revres, uns_to_eol,
                          usa_to_sol)
from .zoo import (GRID_PROBLEMS, LINE_PROBLEMS, PROBLEMS, brute_solutions, encode_cnf, instance_to_json,
                  or_to_sopl, random_instance, solution_to_json)

METRIC_COLUMNS = ("problem", "n", "system", "size", "width_or_degree", "unary_size", "ms")


class StageFailure(Exception):
    """A rejection inside a pipeline (exit status 1)."""

    def __init__(self, stage, reason, witness=None):
        super().__init__(reason)
        self.stage = stage
        self.reason = reason
        self.witness = witness


class FormatMismatch(Exception):
    """Wrong or malformed input (exit status 2)."""


# sizes

def n_for_lambda(problem, lam):
    if problem in GRID_PROBLEMS or problem == "SoD":
        return (1 << lam) - 1
    if problem in LINE_PROBLEMS:
        return 1 << lam
    if problem == "PIGEON":
        return (1 << lam) + 1
    raise FormatMismatch("no size rule for %s" % problem)


def _resolve_n(problem, n, lam):
    if n is None and lam is None:
        raise FormatMismatch("give --n or --lambda")
    return n if n is not None else n_for_lambda(problem, lam)


# metrics table

def emit_metrics_table(rows) -> str:
    """CSV with a fixed column order, stably sorted by (problem, n)."""
    rows = sorted(rows, key=lambda r: (str(r.get("problem", "")), int(r.get("n", 0) or 0)))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=METRIC_COLUMNS, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if r.get(k) is None else r.get(k) for k in METRIC_COLUMNS})
    return buf.getvalue()


def parse_metrics_table(text):
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        row = {}
        for k in METRIC_COLUMNS:
            v = r.get(k, "")
            if k in ("problem", "system"):
                row[k] = v
            elif v == "":
                row[k] = None
            else:
                row[k] = float(v) if k == "ms" else int(v)
        out.append(row)
    return out


def metrics_row(problem, n, m: C.ProofMetrics, ms=None):
    r = {"problem": problem, "n": n}
    r.update(m.row())
    r["ms"] = ms
    return r


# loading

def load_cnf(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_dimacs(fh.read())
    except (OSError, DimacsError) as e:
        raise FormatMismatch("cannot read CNF %s: %s" % (path, e))


def load_json(path):
    try:
        return io_json.read_json(path)
    except (OSError, ValueError) as e:
        raise FormatMismatch("cannot read JSON %s: %s" % (path, e))


def load_proof(path):
    try:
        return io_json.proof_from_json(load_json(path))
    except C.MalformedProof as e:
        raise FormatMismatch(str(e))


def load_formulation(path):
    obj = load_json(path)
    try:
        return io_json.formulation_from_json(obj)
    except (KeyError, ValueError, TypeError, FormulationError) as e:
        raise FormatMismatch("bad formulation file: %s" % e)


SYSTEM_OF = {C.ResolutionProof: "res", C.RevResProof: "revres", C.MaxResWProof: "maxresw",
             C.NsProof: "ns", C.SaProof: "sa", C.EpsNsProof: "epsns"}


def run_check(F, proof, system=None, kind=None, mode="exhaustive", samples=1000, seed=0):
    """ProofMetrics on acceptance; raises StageFailure on rejection."""
    got = SYSTEM_OF.get(type(proof))
    if system is not None and system != got:
        raise FormatMismatch("proof file holds %s, not %s" % (got, system))
    try:
        if got == "res":
            return C.check_resolution(F, proof)
        if got == "revres":
            if kind is not None and kind != proof.kind:
                proof = C.RevResProof(proof.multiplicities, proof.steps, kind)
            return C.check_revres(F, proof)
        if got == "maxresw":
            return C.check_maxresw(F, proof)
        if got == "ns":
            return C.check_ns(F, proof)
        if got == "sa":
            return C.check_sa(F, proof)
        rep = C.check_eps_ns(F, proof, samples=None if mode == "exhaustive" else samples, seed=seed)
        if not rep.ok:
            raise StageFailure("check", "eps-NS bound violated", rep.witness)
        return C.ProofMetrics("epsNS", sum(len(q.terms) for q in proof.ns.coeffs.values()), 0,
                              detail={"min": str(rep.min_residual), "max": str(rep.max_residual),
                                      "certifying": rep.certifying})
    except C.ProofRejected as e:
        raise StageFailure("check", e.reason, e.witness)
    except C.MalformedProof as e:
        raise FormatMismatch(str(e))


# translators by name: (input kind, function)

TRANSLATORS = {
    "sopl-to-revres": ("formulation", lambda F, phi, **kw: sopl_formulation_to_revres(F, phi, guard_samples=kw.get("samples", 512))),
    "revres-to-sopl": ("revres", lambda F, p, **kw: revres_to_sopl(F, p)),
    "eol-to-uns": ("formulation", lambda F, phi, **kw: eol_to_uns(F, phi)),
    "uns-to-eol": ("ns", lambda F, p, **kw: uns_to_eol(F, p)),
    "sol-to-usa": ("formulation", lambda F, phi, **kw: sol_to_usa(F, phi)),
    "usa-to-sol": ("sa", lambda F, p, **kw: usa_to_sol(F, C.normalize_sa(F, p))),
    "revres-to-usa": ("revres", lambda F, p, **kw: revres_to_usa(F, p)),
    "revrest-to-uns": ("revres", lambda F, p, **kw: revrest_to_uns(F, p)),
    "revres-to-res": ("revres", lambda F, p, **kw: revres_to_res(F, p)),
    "maxresw-to-revres": ("maxresw", lambda F, p, **kw: maxresw_to_revres(F, p)),
}


def _kind_of(obj):
    if isinstance(obj, io_json.Formulation):
        return "formulation"
    return SYSTEM_OF.get(type(obj))


def run_translate(name, F, obj, **kw):
    if name not in TRANSLATORS:
        raise FormatMismatch("unknown translator %r (choose from %s)" % (name, ", ".join(sorted(TRANSLATORS))))
    needs, fn = TRANSLATORS[name]
    if _kind_of(obj) != needs:
        raise FormatMismatch("%s expects a %s input, got %s" % (name, needs, _kind_of(obj)))
    try:
        return fn(F, obj, **kw)
    except TranslationError as e:
        raise StageFailure("translate", e.reason, e.witness)
    except C.ProofRejected as e:
        raise StageFailure("translate", e.reason, e.witness)


def artifact_json(obj):
    if isinstance(obj, io_json.Formulation):
        return io_json.formulation_to_json(obj)
    return io_json.proof_to_json(obj)


def _emit(obj, out):
    text = io_json.dumps(obj)
    if out:
        io_json.write_atomic(out, text)
    else:
        click.echo(text, nl=False)


def _finish(fn):
    """Run fn() and map failures to exit codes with a JSON report on stdout."""
    try:
        fn()
    except StageFailure as e:
        click.echo(io_json.dumps({"status": "rejected", "stage": e.stage, "reason": e.reason,
                                  "witness": _jsonable(e.witness)}), nl=False)
        sys.exit(1)
    except FormatMismatch as e:
        click.echo(io_json.dumps({"status": "malformed", "reason": str(e)}), nl=False)
        sys.exit(2)
    sys.exit(0)


def _jsonable(w):
    if w is None or isinstance(w, (int, str, float, bool)):
        return w
    if isinstance(w, (list, tuple)):
        return [_jsonable(v) for v in w]
    if isinstance(w, dict):
        return {str(k): _jsonable(v) for k, v in w.items()}
    return repr(w)


# commands

@click.group()
@click.version_option(package_name="artifact")
def main():
    """proofbench: proof checkers, search-problem encodings and proof translators."""


@main.command()
@click.option("--problem", required=True, type=click.Choice(list(PROBLEMS) + ["or-sopl"]))
@click.option("--n", "n", type=int)
@click.option("--lambda", "lam", type=int)
@click.option("--x", "xbits", help="bit string of length n-1 (or-sopl only)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def gen(problem, n, lam, xbits, seed, out):
    """Random instance (or planted or-sopl instance) with its brute-force solutions."""
    def go():
        click.echo(io_json.dumps(generate(problem, n, lam, xbits, random.Random(seed), out)), nl=False)
    _finish(go)


def generate(problem, n, lam, xbits, rng, out=None):
    if problem == "or-sopl":
        if xbits is None:
            raise FormatMismatch("or-sopl needs --x")
        if any(ch not in "01" for ch in xbits):
            raise FormatMismatch("--x must be a bit string")
        x = [int(ch) for ch in xbits]
        size = len(x) + 1
        if n is not None and n != size:
            raise FormatMismatch("--x must have n-1 bits")
        perms = [rng.sample(range(1, size + 1), size) for _ in range(size - 1)]
        inst, planted = or_to_sopl(x, perms)
        sols = brute_solutions(inst)
        obj = {"instance": instance_to_json(inst), "permutations": perms, "planted": list(planted),
               "solutions": [solution_to_json(s) for s in sorted(sols, key=repr)]}
    else:
        size = _resolve_n(problem, n, lam)
        inst = random_instance(problem, size, rng)
        sols = brute_solutions(inst)
        obj = {"instance": instance_to_json(inst),
               "solutions": [solution_to_json(s) for s in sorted(sols, key=repr)]}
    if out:
        io_json.write_json(out, obj)
    return {"status": "ok", "problem": problem, "n": size, "solutions": len(sols)}


@main.command()
@click.option("--problem", required=True, type=click.Choice(list(PROBLEMS)))
@click.option("--n", "n", type=int)
@click.option("--lambda", "lam", type=int)
@click.option("--out", required=True, type=click.Path(file_okay=False), help="output directory")
def encode(problem, n, lam, out):
    """CNF encoding (formula.cnf) plus its variable layout (layout.json)."""
    def go():
        size = _resolve_n(problem, n, lam)
        try:
            F, layout, _ = encode_cnf(problem, size)
        except (ValueError, NotImplementedError) as e:
            raise FormatMismatch(str(e))
        io_json.write_atomic(os.path.join(out, "formula.cnf"),
                             emit_dimacs(F, ["%s n=%d" % (problem, size)]))
        io_json.write_json(os.path.join(out, "layout.json"), layout.to_json())
        click.echo(io_json.dumps({"status": "ok", "variables": F.variable_count, "clauses": F.m,
                                  "width": F.width()}), nl=False)
    _finish(go)


@main.command()
@click.option("--system", type=click.Choice(sorted(set(SYSTEM_OF.values()))))
@click.option("--cnf", "cnf_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["plain", "terminal"]))
@click.option("--mode", type=click.Choice(["exhaustive", "sample"]), default="exhaustive", show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def check(system, cnf_path, in_path, kind, mode, samples, seed):
    """Check a proof file against a CNF; prints its metrics."""
    def go():
        F = load_cnf(cnf_path)
        proof = load_proof(in_path)
        m = run_check(F, proof, system, kind, mode, samples, seed)
        click.echo(io_json.dumps({"status": "accepted", "metrics": _metrics_json(m)}), nl=False)
    _finish(go)


def _metrics_json(m):
    d = m.row()
    d["steps"] = m.steps
    extra = {k: v for k, v in m.detail.items() if k not in ("final",)}
    d["detail"] = _jsonable(extra)
    return d


@main.command()
@click.option("--system", "name", required=True, type=click.Choice(sorted(TRANSLATORS) + ["identity"]))
@click.option("--cnf", "cnf_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--problem", type=click.Choice(list(PROBLEMS)))
@click.option("--n", "n", type=int)
@click.option("--lambda", "lam", type=int)
@click.option("--samples", type=int, default=512, show_default=True, help="guard samples")
@click.option("--out", type=click.Path(dir_okay=False))
def translate(name, cnf_path, in_path, problem, n, lam, samples, out):
    """Run a translator (identity builds the identity formulation of an encoding)."""
    def go():
        if name == "identity":
            if problem is None:
                raise FormatMismatch("identity needs --problem")
            try:
                result = identity_formulation(problem, _resolve_n(problem, n, lam))
            except (ValueError, FormulationError) as e:
                raise FormatMismatch(str(e))
        else:
            if cnf_path is None or in_path is None:
                raise FormatMismatch("%s needs --cnf and --in" % name)
            F = load_cnf(cnf_path)
            needs = TRANSLATORS[name][0]
            obj = load_formulation(in_path) if needs == "formulation" else load_proof(in_path)
            result = run_translate(name, F, obj, samples=samples)
        _emit(artifact_json(result), out)
        if out:
            click.echo(io_json.dumps({"status": "ok", "output": out}), nl=False)
    _finish(go)


@main.command("verify-formulation")
@click.option("--cnf", "cnf_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["exhaustive", "sample"]), default="exhaustive", show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify_formulation_cmd(cnf_path, in_path, mode, samples, seed):
    """Check that every solution of the reduced instance maps to a falsified clause."""
    def go():
        F = load_cnf(cnf_path)
        phi = load_formulation(in_path)
        rep = run_verify(F, phi, mode, samples, seed)
        click.echo(io_json.dumps(rep), nl=False)
    _finish(go)


def run_verify(F, phi, mode, samples, seed):
    try:
        rep = verify_formulation(F, phi, mode=mode, samples=samples, seed=seed)
    except FormulationError as e:
        raise FormatMismatch(str(e))
    except ValueError as e:
        raise FormatMismatch(str(e))
    if not rep.passed:
        x, sol, i, reason = rep.failures[0]
        raise StageFailure("verify", reason, {"x": list(x), "solution": solution_to_json(sol), "clause": i})
    return {"status": "verified", "tested": rep.tested, "certifying": rep.certifying,
            "converse_misses": rep.converse_misses}


# pipelines

STAGES = ("gen", "encode", "translate", "check", "verify", "mutate", "metrics")


def default_spec(problem, n, seed, mutate=None):
    stages = [{"stage": "gen", "problem": problem, "n": n},
              {"stage": "encode", "problem": problem, "n": n},
              {"stage": "translate", "name": "identity"},
              {"stage": "verify", "mode": "sample", "samples": 200},
              {"stage": "translate", "name": "sopl-to-revres"}]
    if mutate:
        stages.append({"stage": "mutate", "kind": mutate})
    stages += [{"stage": "check"}, {"stage": "metrics"}]
    return {"seed": seed, "stages": stages}


def run_pipeline(spec, out_dir, timing=True):
    """Execute the stages; returns the metrics rows. Raises StageFailure / FormatMismatch."""
    if not isinstance(spec, dict) or not isinstance(spec.get("stages"), list):
        raise FormatMismatch("pipeline spec needs a 'stages' list")
    rng = random.Random(int(spec.get("seed", 0)))
    state = {"F": None, "problem": None, "n": None, "artifact": None}
    rows = []
    os.makedirs(out_dir, exist_ok=True)
    for k, st in enumerate(spec["stages"], 1):
        name = st.get("stage")
        if name not in STAGES:
            raise FormatMismatch("unknown stage %r" % (name,))
        tag = "%02d-%s" % (k, name)
        t0 = time.perf_counter()
        try:
            if name == "gen":
                generate(st["problem"], st.get("n"), st.get("lambda"), st.get("x"), rng,
                         os.path.join(out_dir, tag + ".instance.json"))
            elif name == "encode":
                problem = st.get("problem", state["problem"])
                size = _resolve_n(problem, st.get("n"), st.get("lambda"))
                F, layout, _ = encode_cnf(problem, size)
                state.update(F=F, problem=problem, n=size)
                io_json.write_atomic(os.path.join(out_dir, tag + ".cnf"), emit_dimacs(F))
                io_json.write_json(os.path.join(out_dir, tag + ".layout.json"), layout.to_json())
            elif name == "translate":
                if state["F"] is None:
                    raise FormatMismatch("translate stage before encode")
                tname = st.get("name")
                if tname == "identity":
                    result = identity_formulation(state["problem"], state["n"])
                else:
                    result = run_translate(tname, state["F"], state["artifact"],
                                           samples=int(st.get("samples", 512)))
                state["artifact"] = result
                io_json.write_json(os.path.join(out_dir, "%s-%s.json" % (tag, tname)), artifact_json(result))
            elif name == "verify":
                if _kind_of(state["artifact"]) != "formulation":
                    raise FormatMismatch("verify stage needs a formulation")
                rep = run_verify(state["F"], state["artifact"], st.get("mode", "sample"),
                                 int(st.get("samples", 1000)), rng.getrandbits(32))
                io_json.write_json(os.path.join(out_dir, tag + ".json"), rep)
            elif name == "mutate":
                art = state["artifact"]
                if _kind_of(art) in (None, "formulation"):
                    raise FormatMismatch("mutate stage needs a proof")
                ms = mutants(state["F"], art, rng, 1, st.get("kind"))
                if not ms:
                    raise FormatMismatch("no %s site in this proof" % st.get("kind"))
                state["artifact"] = ms[0][1]
                io_json.write_json(os.path.join(out_dir, "%s-%s.json" % (tag, ms[0][0])),
                                   artifact_json(ms[0][1]))
            elif name == "check":
                art = state["artifact"]
                if _kind_of(art) in (None, "formulation"):
                    raise FormatMismatch("check stage needs a proof")
                m = run_check(state["F"], art, st.get("system"), st.get("kind"))
                ms_ = (time.perf_counter() - t0) * 1000
                rows.append(metrics_row(state["problem"], state["n"], m,
                                        round(ms_, 3) if timing else None))
                io_json.write_json(os.path.join(out_dir, tag + ".metrics.json"), _metrics_json(m))
            elif name == "metrics":
                io_json.write_atomic(os.path.join(out_dir, "metrics.csv"), emit_metrics_table(rows))
        except StageFailure as e:
            e.stage = tag
            io_json.write_json(os.path.join(out_dir, "failure.json"),
                               {"status": "rejected", "stage": tag, "reason": e.reason,
                                "witness": _jsonable(e.witness)})
            raise
        except (KeyError, ValueError, NotImplementedError) as e:
            raise FormatMismatch("stage %s: %s" % (tag, e))
    return rows


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False), help="pipeline spec JSON")
@click.option("--problem", type=click.Choice(["SoPL", "EoPL"]), default="SoPL", show_default=True)
@click.option("--n", "n", type=int)
@click.option("--lambda", "lam", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mutate", type=click.Choice(list(MUTATION_KINDS)), help="inject one fault before checking")
@click.option("--timing/--no-timing", default=True, show_default=True,
              help="fill the ms column (the only non-reproducible field)")
@click.option("--out", required=True, type=click.Path(file_okay=False))
def pipeline(spec_path, problem, n, lam, seed, mutate, timing, out):
    """Run a staged pipeline (default: gen, encode, identity, verify, sopl-to-revres, check, metrics)."""
    def go():
        spec = load_json(spec_path) if spec_path else default_spec(problem, _resolve_n(problem, n, lam), seed, mutate)
        io_json.write_json(os.path.join(out, "spec.json"), spec)
        rows = run_pipeline(spec, out, timing)
        click.echo(io_json.dumps({"status": "ok", "rows": rows}), nl=False)
    _finish(go)


@main.command()
@click.option("--problem", "problems", multiple=True, type=click.Choice(["SoPL", "EoPL"]), default=("SoPL", "EoPL"))
@click.option("--lambda", "lams", multiple=True, type=int, default=(1, 2))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--timing/--no-timing", default=True, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def metrics(problems, lams, fmt, timing, out):
    """Metrics table for the grid pipelines and the simulations derived from them."""
    def go():
        rows = metrics_rows(problems, lams, timing)
        text = emit_metrics_table(rows) if fmt == "csv" else io_json.dumps(rows)
        if out:
            io_json.write_atomic(out, text)
        else:
            click.echo(text, nl=False)
    _finish(go)


def metrics_rows(problems, lams, timing=True):
    rows = []

    def timed(fn):
        t0 = time.perf_counter()
        v = fn()
        return v, (round((time.perf_counter() - t0) * 1000, 3) if timing else None)

    for problem in problems:
        for lam in lams:
            n = n_for_lambda(problem, lam)
            F, _, _ = encode_cnf(problem, n)
            phi = identity_formulation(problem, n)
            pi, ms = timed(lambda: sopl_formulation_to_revres(F, phi))
            rows.append(metrics_row(problem, n, C.check_revres(F, pi), ms))
            res, ms = timed(lambda: revres_to_res(F, pi))
            rows.append(metrics_row(problem, n, C.check_resolution(F, res), ms))
            sa, ms = timed(lambda: revres_to_usa(F, pi))
            rows.append(metrics_row(problem, n, C.check_sa(F, sa), ms))
            if pi.kind == "terminal":
                ns, ms = timed(lambda: revrest_to_uns(F, pi))
                rows.append(metrics_row(problem, n, C.check_ns(F, ns), ms))
    return rows


if __name__ == "__main__":
    main()
