# polyzeta/cli.py
"""
Interfaz de línea de comandos.

Uso:
  python -m polyzeta dual 6,2
  python -m polyzeta count --weight 10 --depth 5
  python -m polyzeta closed --g 2 --side shuffle 2,1,1
  python -m polyzeta reconcile --g 21 --side stuffle --max-weight 9
  python -m polyzeta relations --weight 7 --families 1,2,3,21 --out rels.json
  python -m polyzeta reduce --weight 8 --report basis
  python -m polyzeta eval 2,1 --tol 1e-6
  python -m polyzeta verify --weight 6 --numeric-tol 1e-3

Códigos de salida: 0 éxito, 1 fallo de verificación, 2 uso inválido, 3 inconsistencia interna.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Any, Callable

from polyzeta import oracle
from polyzeta.closedforms import LEFT_FACTORS, Side, annotated_terms, closed, left_key, reconcile
from polyzeta.core import dual, format_composition, is_self_dual, parse_composition, signature, to_ab
from polyzeta.counting import count_report, format_count_table, n_total, n_wd, n_wdh
from polyzeta.engine import (
    FAMILY_KEYS, Mode, assemble_matrix, compare_modes, expected_relation_count, hoffman_reduce,
    parse_families, verify_numeric,
)
from polyzeta.errors import InconsistencyError, PolyzetaError, ToleranceUnreachable
from polyzeta.numeric import eval_mzv
from polyzeta.ordering import enumerate_weight
from polyzeta.settings import get_settings
from polyzeta.storage import get_or_generate, to_file, write_matrix_csv

logger = logging.getLogger("polyzeta")

Outcome = tuple[int, str, Any]

# ----------------------------
# Utilidades
# ----------------------------


def _setup_logging(level: str) -> None:
    if not isinstance(logging.getLevelName(level), int):
        level = "INFO"
    logging.basicConfig(level=level, format="[%(levelname)s] %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def _emit(args: argparse.Namespace, text: str, data: Any) -> None:
    body = json.dumps(data, ensure_ascii=False, indent=2) if args.format == "json" else text
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body + "\n", encoding="utf-8")
        logger.info("salida escrita en %s", path)
    else:
        print(body)


def _fmt(c) -> str:
    return format_composition(c, compress=False)


# ----------------------------
# Comandos
# ----------------------------


def cmd_list(args) -> Outcome:
    rows = []
    for i, c in enumerate(enumerate_weight(args.weight)):
        sig = signature(c)
        if args.depth is not None and sig.depth != args.depth:
            continue
        if args.height is not None and sig.height != args.height:
            continue
        rows.append((i, c, sig))
    text = "\n".join(f"{i:>5}  ({_fmt(c)})  {tuple(sig)}" for i, c, sig in rows)
    data = [{"index": i, "composition": list(c), "signature": list(sig)} for i, c, sig in rows]
    return 0, text, data


def cmd_dual(args) -> Outcome:
    c = parse_composition(args.composition)
    d = dual(c)
    return 0, format_composition(d), {"composition": list(c), "dual": list(d), "self_dual": is_self_dual(c)}


def cmd_wdh(args) -> Outcome:
    c = parse_composition(args.composition)
    sig = signature(c)
    text = f"({sig.weight},{sig.depth},{sig.height})"
    return 0, text, {"composition": list(c), "signature": list(sig), "blocks": [list(b) for b in to_ab(c)]}


def cmd_count(args) -> Outcome:
    w = args.weight
    if args.table:
        return 0, format_count_table(w), count_report(w).model_dump(mode="json")
    if args.depth is not None and args.height is not None:
        value = n_wdh(w, args.depth, args.height)
    elif args.depth is not None:
        value = n_wd(w, args.depth)
    elif args.height is not None:
        value = sum(n_wdh(w, d, args.height) for d in range(1, w))
    else:
        value = n_total(w)
    return 0, str(value), {"weight": w, "depth": args.depth, "height": args.height, "count": value}


def _product(op: Callable) -> Callable[[argparse.Namespace], Outcome]:
    def handler(args) -> Outcome:
        x = parse_composition(args.x)
        y = parse_composition(args.y)
        result = op(x, y)
        return 0, str(result), result.to_json()
    return handler


def cmd_closed(args) -> Outcome:
    z = parse_composition(args.z)
    result = closed(args.g, args.side, z, completion=not args.stated_only)
    lines = [str(result)]
    data: dict[str, Any] = {"g": left_key(args.g), "side": args.side, "z": list(z), "result": result.to_json()}
    if args.annotate:
        terms = list(annotated_terms(args.g, args.side, z, completion=not args.stated_only))
        lines += [f"  {t.family}: {t.coeff}*({_fmt(t.composition)})  {t.tag}" for t in terms]
        data["terms"] = [t.model_dump(mode="json") for t in terms]
    return 0, "\n".join(lines), data


def cmd_reconcile(args) -> Outcome:
    reports = reconcile(args.g, args.side, args.max_weight, args.min_weight)
    verdicts = Counter(r.verdict for r in reports)
    tag = reports[0].tag if reports else f"g={args.g} {args.side}"
    lines = [
        f"{tag} w≤{args.max_weight}: {len(reports)} casos · "
        f"exact={verdicts['exact']} reconciled={verdicts['reconciled']} mismatch={verdicts['mismatch']}"
    ]
    for r in reports:
        if r.verdict == "mismatch":
            lines.append(f"  [FAIL] z=({r.composition}) faltan={len(r.missing)} sobran={len(r.extra)} difieren={len(r.mismatched)}")
    code = 1 if verdicts["mismatch"] else 0
    return code, "\n".join(lines), [r.model_dump(mode="json") for r in reports]


def _relations(args):
    return get_or_generate(
        args.weight, parse_families(args.families), args.duality, args.mode,
        data_dir=args.data_dir, use_cache=not args.no_cache,
    )


def cmd_relations(args) -> Outcome:
    rs = _relations(args)
    text = "\n".join(f"{rel.provenance}: {rel.body}" for rel in rs.relations)
    return 0, text, to_file(rs).model_dump(mode="json", by_alias=True)


def _paired_line(report) -> str:
    mark = " [DIVERGEN]" if report.ranks_diverge else ""
    return f"rango solo familias={report.families_rank} con dualidad={report.duality_rank}{mark}"


def cmd_reduce(args) -> Outcome:
    rs = _relations(args)
    result = hoffman_reduce(args.weight, relations=rs)
    report = result.hoffman
    if args.csv:
        write_matrix_csv(assemble_matrix(rs, hoffman_last=True), Path(args.csv))
        logger.info("matriz CSV escrita en %s", args.csv)

    data: dict[str, Any] = report.model_dump(mode="json")
    lines = [
        f"w={report.weight} relaciones={report.relations} rango={report.rank} esperado={report.expected_rank}",
        _paired_line(report),
    ]
    if args.report in ("basis", "table"):
        lines.append("base libre: " + " ".join(f"({c})" for c in report.free_columns))
    if args.report == "table":
        table = result.table_lines()
        lines += table
        data["table"] = {_fmt(c): result.reduction[c].to_json() for c in result.pivot_columns}
    lines += [f"[FAIL] {f}" for f in report.failures]
    return (0 if report.ok else 1), "\n".join(lines), data


def cmd_eval(args) -> Outcome:
    c = parse_composition(args.composition)
    code = 0
    try:
        res = eval_mzv(c, args.tol)
    except ToleranceUnreachable as e:
        logger.warning("%s; se muestra la mejor estimación", e)
        res, code = e.result, 1
    text = "\n".join([
        f"ζ({_fmt(c)}) = {res.value:.12f}",
        f"cola ≈ {res.tail_estimate:.3e}",
        f"términos = {res.terms_used}",
        f"error ≈ {res.error_estimate:.3e}",
    ])
    return code, text, {"composition": list(c), **res.model_dump(mode="json")}


def cmd_verify(args) -> Outcome:
    w = args.weight
    fams = parse_families(args.families)
    checks: list[dict[str, Any]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    # 1) enumeración
    total = len(enumerate_weight(w))
    report = count_report(w)
    check("enumeración", total == n_total(w) == report.total, f"{total} polyzetas")

    # 2) formas cerradas contra oráculo en el peso w
    for key in fams:
        if w - LEFT_FACTORS[key].weight < 2:
            continue
        for side in Side:
            reps = reconcile(key, side, w, min_weight=w)
            bad = [r.composition for r in reps if r.verdict == "mismatch"]
            check(f"conciliación g={key} {side.value}", not bad, ", ".join(bad))

    # 3) ley de conteo de relaciones y modo cerrado ≡ oráculo
    rs = get_or_generate(w, fams, args.duality, args.mode, data_dir=args.data_dir, use_cache=not args.no_cache)
    n_family = sum(1 for rel in rs.relations if rel.family in fams)
    expected = expected_relation_count(w, fams)
    check("conteo de relaciones", n_family == expected, f"{n_family} (esperado {expected})")
    if fams == FAMILY_KEYS and w >= 5:
        check("conteo 2^(w−2)", n_family == n_total(w), f"{n_family}")
    diffs = compare_modes(w, fams)
    check("modo cerrado ≡ oráculo", not diffs, ", ".join(diffs))

    # 4) rango y base de Hoffman
    hoff = hoffman_reduce(w, relations=rs).hoffman
    check("rango 2^(w−2) − δ_w", hoff.ok,
          f"rango {hoff.rank}, libres " + " ".join(f"({c})" for c in hoff.free_columns))

    # 5) residuos numéricos
    num = verify_numeric(rs, args.numeric_tol)
    worst = ", ".join(f"{k}:{v:.1e}" for k, v in sorted(num.worst.items()))
    check("residuos numéricos", num.ok, worst)

    failures = [c for c in checks if not c["ok"]]
    lines = [f"w={w} familias={','.join(fams)} dualidad={args.duality} modo={Mode(args.mode).value}"]
    lines += [f"[{'OK' if c['ok'] else 'FAIL'}] {c['name']}" + (f": {c['detail']}" if c["detail"] else "") for c in checks]
    lines.append(_paired_line(hoff))
    lines.append(f"{len(rs)} relaciones, rango {hoff.rank}, {len(failures)} fallos")
    data = {
        "weight": w,
        "checks": checks,
        "failures": [c["name"] for c in failures],
        "hoffman": hoff.model_dump(mode="json"),
        "numeric": num.model_dump(mode="json"),
    }
    return (1 if failures else 0), "\n".join(lines), data


# ----------------------------
# Parser
# ----------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text", help="Formato de salida")
    common.add_argument("--out", type=str, default=None, help="Archivo de salida (por defecto stdout)")
    common.add_argument("--data-dir", type=str, default=None, help="Directorio de datos (caché de relaciones)")
    common.add_argument("--log-level", type=str, default=None, help="DEBUG, INFO, WARNING…")

    parser = argparse.ArgumentParser(prog="polyzeta", description="Polyzetas: productos, relaciones de doble shuffle y base de Hoffman")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    def relation_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--weight", type=int, required=True)
        p.add_argument("--families", type=str, default=",".join(FAMILY_KEYS), help="Subconjunto de 1,2,3,21")
        p.add_argument("--duality", action="store_true", help="Agrega relaciones z − z°")
        p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.CLOSED.value)
        p.add_argument("--no-cache", action="store_true", help="No lee ni escribe la caché de relaciones")

    p = add("list", cmd_list, "Polyzetas de peso w en orden ≺")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--height", type=int, default=None)

    p = add("dual", cmd_dual, "Polyzeta dual")
    p.add_argument("composition")

    p = add("wdh", cmd_wdh, "Firma (peso, profundidad, altura)")
    p.add_argument("composition")

    p = add("count", cmd_count, "Conteos cerrados")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--table", action="store_true", help="Tabla por profundidad")

    for name, op in (("stuffle", oracle.stuffle), ("shuffle", oracle.shuffle)):
        p = add(name, _product(op), f"Producto {name} por fuerza bruta")
        p.add_argument("x")
        p.add_argument("y")

    p = add("closed", cmd_closed, "Forma cerrada de g·z")
    p.add_argument("--g", choices=list(LEFT_FACTORS), required=True)
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--stated-only", action="store_true", help="Solo las familias enunciadas, sin completar")
    p.add_argument("--annotate", action="store_true", help="Muestra familia y firma de cada término")
    p.add_argument("z")

    p = add("reconcile", cmd_reconcile, "Forma cerrada contra oráculo")
    p.add_argument("--g", choices=list(LEFT_FACTORS), required=True)
    p.add_argument("--side", choices=[s.value for s in Side], required=True)
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--min-weight", type=int, default=None)

    p = add("relations", cmd_relations, "Conjunto de relaciones de peso w")
    relation_flags(p)

    p = add("reduce", cmd_reduce, "Rango exacto y reducción a la base de Hoffman")
    relation_flags(p)
    p.add_argument("--report", choices=["rank", "basis", "table"], default="rank")
    p.add_argument("--csv", type=str, default=None, help="Exporta la matriz en CSV")

    p = add("eval", cmd_eval, "Valor numérico")
    p.add_argument("composition")
    p.add_argument("--tol", type=float, default=None)

    p = add("verify", cmd_verify, "Verificación de extremo a extremo en el peso w")
    relation_flags(p)
    p.add_argument("--numeric-tol", type=float, default=1e-3)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    _setup_logging((args.log_level or get_settings().log_level).upper())
    try:
        code, text, data = args.handler(args)
    except InconsistencyError as e:
        logger.error("inconsistencia interna: %s", e)
        return 3
    except PolyzetaError as e:
        logger.error("%s", e)
        return 2
    _emit(args, text, data)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
