"""Batch CLI: validate task files, run classifiers and searches, report.

Exit codes: 0 all tasks completed (verdicts of any flavor included),
2 schema error in the task file, 3 a cap was exceeded somewhere.

JSON reports are deterministic: entries are ordered by task index and
integers wider than 2^53 are emitted as strings, so runs with different
parallelism produce byte-identical output.  Timing is only shown in the
text format for the same reason.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema

from .braid import (
    artin_endo,
    braid_permutation,
    cover_from_finite_quotient,
    induced_cover_homology,
    is_cyclotomic_product,
    parse_braid,
    permutation_order,
)
from .caps import Caps, DEFAULT_CAPS, caps_from_env
from .classify import (
    BSSpec,
    bs_classify,
    free_fiber_residually_p,
    primes_up_to,
    residually_p_prime_set,
    sl2_power_divisibility,
    torus_residually_nilpotent,
    torus_residually_p,
)
from .errors import CapExceeded, LayerTooDeep, ResipError, SchemaError, SearchSpaceTooLarge
from .extension import (
    BilinearCocycle,
    CircleBundleSpec,
    circle_bundle_central_witness,
    heisenberg_checks,
    verify_cocycle,
)
from .freegrp import FreeEndo, MappingTorusElement, MappingTorusSpec, parse_word
from .intlin import IntMatrix, charpoly_exact, det_exact, poly_divmod
from .witness import PGroupQuotient, find_p_quotient_witness, verify_witness

TASK_KINDS = (
    "torus",
    "primes",
    "fibered",
    "bs",
    "braid-cover",
    "witness",
    "extension",
    "sl2-power",
)


@dataclass(frozen=True)
class Task:
    id: str
    kind: str
    payload: dict


@dataclass(frozen=True)
class TaskFile:
    version: int
    tasks: tuple[Task, ...]


@dataclass
class ReportEntry:
    id: str
    kind: str
    status: str  # ok | error | cap
    result: Optional[dict] = None
    error: Optional[dict] = None
    cap_events: list = field(default_factory=list)
    elapsed_ms: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"id": self.id, "kind": self.kind, "status": self.status}
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        if self.cap_events:
            out["cap_events"] = self.cap_events
        return out


def _schema() -> dict:
    text = resources.files("resip").joinpath("schema/taskfile.schema.json").read_text()
    return json.loads(text)


def _coerce_int(v) -> int:
    if isinstance(v, bool):
        raise SchemaError("boolean where integer expected")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError as exc:
            raise SchemaError(f"bad integer literal {v!r}") from exc
    raise SchemaError(f"bad integer {v!r}")


def _coerce_matrix(rows, path: str) -> IntMatrix:
    coerced = [[_coerce_int(x) for x in row] for row in rows]
    n = len(coerced)
    if any(len(row) != n for row in coerced):
        raise SchemaError("matrix must be square", path)
    return IntMatrix.from_rows(coerced)


def parse_task_file(text: str) -> TaskFile:
    """Validate against the shipped schema; SchemaError carries the JSON
    path of the first offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(
        validator.iter_errors(doc),
        key=lambda e: (list(e.absolute_path), e.message),
    )
    if errors:
        err = errors[0]
        path = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path
        )
        raise SchemaError(err.message, path)
    tasks = []
    for i, raw in enumerate(doc["tasks"]):
        tasks.append(
            Task(
                id=raw.get("id", str(i)),
                kind=raw["kind"],
                payload={k: v for k, v in raw.items() if k not in ("id", "kind")},
            )
        )
    return TaskFile(version=doc["version"], tasks=tuple(tasks))


def _task_primes(payload: dict) -> list[int]:
    if "primes" in payload:
        ps = [_coerce_int(p) for p in payload["primes"]]
        import sympy

        for p in ps:
            if not sympy.isprime(p):
                raise SchemaError(f"{p} is not prime", "$.primes")
        return ps
    return primes_up_to(_coerce_int(payload["primes_up_to"]))


def _build_endo(payload: dict) -> FreeEndo:
    rank = payload["rank"]
    images = tuple(parse_word(t, rank) for t in payload["images"])
    inverse = tuple(parse_word(t, rank) for t in payload["inverse"])
    return FreeEndo(rank, images, inverse)


def run_task(task: Task, caps: Caps) -> dict:
    payload = task.payload
    if task.kind == "torus":
        matrix = _coerce_matrix(payload["matrix"], "$.matrix")
        verdicts = [torus_residually_p(matrix, p).to_dict() for p in _task_primes(payload)]
        return {
            "matrix": [list(r) for r in matrix.entries],
            "verdicts": verdicts,
            "residually_nilpotent": torus_residually_nilpotent(matrix),
        }
    if task.kind == "primes":
        matrix = _coerce_matrix(payload["matrix"], "$.matrix")
        return {
            "matrix": [list(r) for r in matrix.entries],
            "prime_set": residually_p_prime_set(matrix).to_dict(),
        }
    if task.kind == "fibered":
        endo = _build_endo(payload)
        spec = MappingTorusSpec(endo, payload.get("description", ""))
        verdicts = [
            free_fiber_residually_p(spec, p, caps).to_dict()
            for p in _task_primes(payload)
        ]
        return {"rank": endo.rank, "verdicts": verdicts}
    if task.kind == "bs":
        return bs_classify(BSSpec(_coerce_int(payload["q"]))).to_dict()
    if task.kind == "braid-cover":
        strands = payload["strands"]
        braid = parse_braid(payload["braid"], strands)
        perm, pure = braid_permutation(braid)
        endo = artin_endo(braid)
        cover = cover_from_finite_quotient(
            strands, payload["assignments"], payload["modulus"]
        )
        matrix = induced_cover_homology(endo, cover)
        cp = charpoly_exact(matrix)
        divisor_reports = []
        for div in payload.get("divisors", []):
            quot, rem = poly_divmod(cp, tuple(div))
            divides = all(c == 0 for c in rem)
            entry = {
                "divisor": list(div),
                "divides": divides,
            }
            if divides:
                entry["quotient"] = list(quot)
                entry["quotient_cyclotomic_product"] = is_cyclotomic_product(quot)
            divisor_reports.append(entry)
        return {
            "permutation": list(perm),
            "is_pure": pure,
            "permutation_order": permutation_order(perm),
            "cover_rank": cover.subgroup_rank,
            "matrix": [list(r) for r in matrix.entries],
            "charpoly": list(cp),
            "det": det_exact(matrix),
            "divisors": divisor_reports,
        }
    if task.kind == "witness":
        endo = _build_endo(payload)
        spec = MappingTorusSpec(endo, payload.get("description", ""))
        element = MappingTorusElement(
            _coerce_int(payload["element"]["t"]),
            parse_word(payload["element"]["w"], endo.rank),
        )
        outcome = find_p_quotient_witness(
            spec, element, payload["p"], caps, payload.get("exploratory", False)
        )
        result = outcome.to_dict()
        if outcome.certificate is not None:
            verification = verify_witness(outcome.certificate, caps)
            result["verification"] = verification.to_dict()
            result["reverify_command"] = (
                "resip verify-witness --certificate <file with this certificate>"
            )
        return result
    if task.kind == "extension":
        check = payload["check"]
        if check == "heisenberg":
            return {"check": check, "report": heisenberg_checks().to_dict()}
        if check == "circle-bundle":
            spec = CircleBundleSpec(payload["genus"], payload["euler"])
            return {"check": check, "report": circle_bundle_central_witness(spec).to_dict()}
        form = tuple(tuple(_coerce_int(x) for x in row) for row in payload["form"])
        cocycle = BilinearCocycle(form, payload.get("coeff_modulus"))
        result = verify_cocycle(cocycle)
        return {
            "check": check,
            "report": {"ok": result.ok, "violation": result.violation},
        }
    if task.kind == "sl2-power":
        matrix = _coerce_matrix(payload["matrix"], "$.matrix")
        cap = _coerce_int(payload["cap"]) if "cap" in payload else None
        k = sl2_power_divisibility(matrix, payload["p"], cap)
        return {"p": payload["p"], "k": k}
    raise SchemaError(f"unknown task kind {task.kind}")


def _run_one(task: Task, caps: Caps) -> ReportEntry:
    start = time.monotonic()
    try:
        result = run_task(task, caps)
        entry = ReportEntry(task.id, task.kind, "ok", result=result)
    except (CapExceeded, SearchSpaceTooLarge, LayerTooDeep) as exc:
        entry = ReportEntry(
            task.id,
            task.kind,
            "cap",
            error={"type": type(exc).__name__, "message": str(exc)},
            cap_events=[{"type": type(exc).__name__, "message": str(exc)}],
        )
    except ResipError as exc:
        entry = ReportEntry(
            task.id,
            task.kind,
            "error",
            error={"type": type(exc).__name__, "message": str(exc)},
        )
    entry.elapsed_ms = (time.monotonic() - start) * 1000.0
    return entry


def run_tasks(
    taskfile: TaskFile, parallelism: int = 1, caps: Caps = DEFAULT_CAPS
) -> list[ReportEntry]:
    """Run every task; output order always matches input order."""
    if parallelism <= 1 or len(taskfile.tasks) <= 1:
        return [_run_one(t, caps) for t in taskfile.tasks]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(lambda t: _run_one(t, caps), taskfile.tasks))


def _json_safe(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= 2 ** 53 else value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    raise TypeError(f"unserializable value {value!r}")


def emit_report(entries: list[ReportEntry], fmt: str = "json") -> str:
    if fmt == "json":
        doc = {
            "version": "resip-report/1",
            "entries": [_json_safe(e.to_dict()) for e in entries],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    lines = []
    for e in entries:
        stamp = f"{e.elapsed_ms:8.1f} ms" if e.elapsed_ms is not None else ""
        lines.append(f"task {e.id} [{e.kind}] {e.status} {stamp}".rstrip())
        if e.status == "ok":
            lines.extend("  " + line for line in _summarize(e.kind, e.result))
        else:
            lines.append(f"  {e.error['type']}: {e.error['message']}")
    return "\n".join(lines) + "\n"


def _summarize(kind: str, result: dict) -> list[str]:
    if kind == "torus":
        out = []
        for v in result["verdicts"]:
            out.append(f"p={v['p']}: {v['outcome']}")
        out.append(f"residually nilpotent: {result['residually_nilpotent']}")
        return out
    if kind == "primes":
        ps = result["prime_set"]
        desc = "all primes" if ps["all_primes"] else "{" + ", ".join(map(str, ps["primes"])) + "}"
        return [f"residually p exactly at {desc} (gcd {ps['gcd']})"]
    if kind == "fibered":
        return [f"p={v['p']}: {v['outcome']}" for v in result["verdicts"]]
    if kind == "bs":
        ps = result["residually_p_primes"]
        desc = "all primes" if ps["all_primes"] else "{" + ", ".join(map(str, ps["primes"])) + "}"
        return [
            f"BS(1,{result['q']}): residually p at {desc}, "
            f"omega-nilpotent: {result['omega_nilpotent']}"
        ]
    if kind == "braid-cover":
        out = [
            f"permutation {result['permutation']} (pure: {result['is_pure']})",
            f"cover rank {result['cover_rank']}, det {result['det']}",
            f"charpoly {result['charpoly']}",
        ]
        for d in result["divisors"]:
            out.append(f"divisible by {d['divisor']}: {d['divides']}")
        return out
    if kind == "witness":
        if result["status"] == "certificate":
            c = result["certificate"]
            return [
                f"certificate kind {c['kind']}, data {c['data']}",
                f"re-verification: {result['verification']['ok']}",
            ]
        return [f"undecided: {result['reason']}"]
    if kind == "extension":
        return [f"{result['check']}: ok={result['report']['ok']}"]
    if kind == "sl2-power":
        return [f"least k with p | det(A^k - I): {result['k']}"]
    return [json.dumps(result)]


def _parse_caps_args(pairs: list[str], base: Caps) -> Caps:
    overrides = {}
    for chunk in pairs:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise SchemaError(f"bad cap override {item!r}, expected KEY=VALUE")
            key, value = item.split("=", 1)
            try:
                overrides[key.strip()] = int(value)
            except ValueError as exc:
                raise SchemaError(f"bad cap value {value!r} for {key.strip()}") from exc
    try:
        return base.with_overrides(**overrides)
    except KeyError as exc:
        raise SchemaError(str(exc.args[0])) from exc


def _matrix_from_text(text: str) -> list[list[int]]:
    rows = [row.strip() for row in text.split(";") if row.strip()]
    return [[int(x) for x in row.split()] for row in rows]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resip",
        description="residual properties of mapping-torus groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--parallel", type=int, default=1)
        p.add_argument("--caps", action="append", default=[], metavar="KEY=VAL")

    run = sub.add_parser("run", help="run a JSON task file")
    run.add_argument("--tasks", required=True, metavar="FILE")
    common(run)

    torus = sub.add_parser("torus", help="torus-bundle verdicts per prime")
    torus.add_argument("--matrix", required=True, help='rows separated by ";", e.g. "2 1; 1 1"')
    torus.add_argument("--primes-up-to", type=int, default=None)
    torus.add_argument("--primes", default=None, help="comma-separated primes")
    common(torus)

    primes = sub.add_parser("primes", help="exact residually-p prime set")
    primes.add_argument("--matrix", required=True)
    common(primes)

    bs = sub.add_parser("bs", help="classify BS(1,q)")
    bs.add_argument("--q", required=True)
    common(bs)

    fibered = sub.add_parser("fibered", help="free-fiber mapping torus verdicts")
    fibered.add_argument("--images", required=True, help='generator images separated by ";"')
    fibered.add_argument("--inverse", required=True)
    fibered.add_argument("--primes-up-to", type=int, default=None)
    fibered.add_argument("--primes", default=None)
    common(fibered)

    bc = sub.add_parser("braid-cover", help="induced homology on a cyclic cover")
    bc.add_argument("--strands", type=int, required=True)
    bc.add_argument("--braid", required=True)
    bc.add_argument("--modulus", type=int, required=True)
    bc.add_argument("--assignments", required=True, help="comma-separated values in Z/m")
    bc.add_argument("--divisor", action="append", default=[], help='charpoly divisor "1 -3 1"')
    common(bc)

    wit = sub.add_parser("witness", help="search a finite p-group witness")
    wit.add_argument("--images", required=True)
    wit.add_argument("--inverse", required=True)
    wit.add_argument("--p", type=int, required=True)
    wit.add_argument("--t", type=int, default=0)
    wit.add_argument("--w", default="1")
    wit.add_argument("--exploratory", action="store_true")
    common(wit)

    ext = sub.add_parser("extension", help="central extension checks")
    ext.add_argument("--check", choices=("heisenberg", "circle-bundle"), required=True)
    ext.add_argument("--genus", type=int, default=None)
    ext.add_argument("--euler", type=int, default=None)
    common(ext)

    sl2 = sub.add_parser("sl2-power", help="least k with p | det(A^k - I)")
    sl2.add_argument("--matrix", required=True)
    sl2.add_argument("--p", type=int, required=True)
    sl2.add_argument("--cap", type=int, default=None)
    common(sl2)

    ver = sub.add_parser("verify-witness", help="re-check a stored certificate")
    ver.add_argument("--certificate", required=True, metavar="FILE")
    common(ver)
    return parser


def _words_arg(text: str) -> list[str]:
    return [w.strip() for w in text.split(";")]


def _single_task(args) -> dict:
    if args.command == "torus":
        payload = {"kind": "torus", "matrix": _matrix_from_text(args.matrix)}
        _append_primes(payload, args)
        return payload
    if args.command == "primes":
        return {"kind": "primes", "matrix": _matrix_from_text(args.matrix)}
    if args.command == "bs":
        return {"kind": "bs", "q": args.q}
    if args.command == "fibered":
        images = _words_arg(args.images)
        payload = {
            "kind": "fibered",
            "rank": len(images),
            "images": images,
            "inverse": _words_arg(args.inverse),
        }
        _append_primes(payload, args)
        return payload
    if args.command == "braid-cover":
        payload = {
            "kind": "braid-cover",
            "strands": args.strands,
            "braid": args.braid,
            "modulus": args.modulus,
            "assignments": [int(x) for x in args.assignments.split(",")],
        }
        if args.divisor:
            payload["divisors"] = [
                [int(c) for c in d.split()] for d in args.divisor
            ]
        return payload
    if args.command == "witness":
        images = _words_arg(args.images)
        payload = {
            "kind": "witness",
            "rank": len(images),
            "images": images,
            "inverse": _words_arg(args.inverse),
            "p": args.p,
            "element": {"t": args.t, "w": args.w},
        }
        if args.exploratory:
            payload["exploratory"] = True
        return payload
    if args.command == "extension":
        payload = {"kind": "extension", "check": args.check}
        if args.check == "circle-bundle":
            if args.genus is None or args.euler is None:
                raise SchemaError("circle-bundle needs --genus and --euler")
            payload["genus"] = args.genus
            payload["euler"] = args.euler
        return payload
    if args.command == "sl2-power":
        payload = {
            "kind": "sl2-power",
            "matrix": _matrix_from_text(args.matrix),
            "p": args.p,
        }
        if args.cap is not None:
            payload["cap"] = args.cap
        return payload
    raise SchemaError(f"no task for command {args.command}")


def _append_primes(payload: dict, args) -> None:
    if args.primes:
        payload["primes"] = [int(p) for p in args.primes.split(",")]
    elif args.primes_up_to is not None:
        payload["primes_up_to"] = args.primes_up_to
    else:
        payload["primes_up_to"] = 100


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # allow the documented flag style "resip --tasks FILE ..." as shorthand
    if argv and argv[0].startswith("--"):
        argv = ["run"] + argv
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        try:
            caps = caps_from_env(DEFAULT_CAPS)
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad RESIP_CAPS value: {exc}") from exc
        caps = _parse_caps_args(args.caps, caps)
        if args.command == "verify-witness":
            with open(args.certificate, "r", encoding="utf-8") as fh:
                cert = PGroupQuotient.from_dict(json.load(fh))
            report = verify_witness(cert, caps)
            doc = _json_safe({"certificate_ok": report.ok, "checks": report.to_dict()["checks"]})
            if args.format == "json":
                print(json.dumps(doc, indent=2, sort_keys=True))
            else:
                print(f"certificate ok: {report.ok}")
                for name, passed in report.to_dict()["checks"]:
                    print(f"  {name}: {passed}")
            return 0 if report.ok else 1
        if args.command == "run":
            with open(args.tasks, "r", encoding="utf-8") as fh:
                taskfile = parse_task_file(fh.read())
        else:
            task_doc = {"version": 1, "tasks": [_single_task(args)]}
            taskfile = parse_task_file(json.dumps(task_doc))
        entries = run_tasks(taskfile, args.parallel, caps)
        sys.stdout.write(emit_report(entries, args.format))
        if any(e.status == "cap" for e in entries):
            return 3
        return 0
    except SchemaError as exc:
        print(f"schema error at {exc.path}: {exc.reason}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
