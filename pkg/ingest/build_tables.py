# ingest/build_tables.py
"""
Precálculo de tablas de relaciones por peso
→ genera (o lee de caché) los conjuntos de relaciones, reduce cada matriz a la
base de Hoffman y, opcionalmente, exporta las matrices en CSV.

Uso:
  python -m ingest.build_tables --min-weight 4 --max-weight 10
  python -m ingest.build_tables --max-weight 8 --families 1,2 --duality --csv
  python -m ingest.build_tables --max-weight 12 --workers 4
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from polyzeta.engine import FAMILY_KEYS, Mode, assemble_matrix, hoffman_reduce, parse_families
from polyzeta.settings import get_settings
from polyzeta.storage import cache_path, get_or_generate, write_matrix_csv

logger = logging.getLogger("ingest.build_tables")

# ----------------------------
# Trabajo por peso
# ----------------------------


def build_weight(w: int, families: tuple[str, ...], duality: bool, mode: str,
                 data_dir: str, csv: bool) -> dict:
    """Un peso completo; devuelve su fila del reporte final."""
    rs = get_or_generate(w, families, duality, mode, data_dir=data_dir)
    result = hoffman_reduce(w, relations=rs)
    row = {
        "weight": w,
        "relations": len(rs),
        "rank": result.rank,
        "expected_rank": result.hoffman.expected_rank,
        "ok": result.hoffman.ok,
        "cache": str(cache_path(w, families, duality, mode, data_dir)),
    }
    if csv:
        out = Path(data_dir) / "matrices" / f"w{w}-f{'-'.join(families)}-{'dual' if duality else 'nodual'}-{mode}.csv"
        write_matrix_csv(assemble_matrix(rs, hoffman_last=True), out)
        row["csv"] = str(out)
    return row


def main(argv: list[str] | None = None) -> dict:
    parser = argparse.ArgumentParser()
    parser.add_argument("--min-weight", type=int, default=4)
    parser.add_argument("--max-weight", type=int, default=10)
    parser.add_argument("--families", type=str, default=",".join(FAMILY_KEYS), help="Subconjunto de 1,2,3,21")
    parser.add_argument("--duality", action="store_true", help="Agrega relaciones z − z°")
    parser.add_argument("--mode", type=str, default=Mode.CLOSED.value, choices=[m.value for m in Mode])
    parser.add_argument("--data-dir", type=str, default=None, help="Directorio de datos (por defecto el de la configuración)")
    parser.add_argument("--csv", action="store_true", help="Exporta cada matriz en CSV")
    parser.add_argument("--workers", type=int, default=1, help="Procesos en paralelo (uno por peso)")
    args = parser.parse_args(argv)

    s = get_settings()
    logging.basicConfig(level=s.log_level, format="[%(levelname)s] %(message)s", stream=sys.stderr)

    data_dir = args.data_dir or str(s.data_dir)
    families = parse_families(args.families)
    weights = list(range(max(4, args.min_weight), args.max_weight + 1))
    if not weights:
        logger.info("No hay pesos en el rango pedido.")
        return {}

    logger.info("Construyendo pesos %s (familias=%s, dualidad=%s, modo=%s) ...",
                weights, ",".join(families), args.duality, args.mode)
    job = (families, args.duality, args.mode, data_dir, args.csv)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(build_weight, weights, *[[x] * len(weights) for x in job]))
    else:
        rows = [build_weight(w, *job) for w in weights]

    for row in rows:
        tag = "OK" if row["ok"] else "WARN"
        print(f"[{tag}] w={row['weight']}: {row['relations']} relaciones, "
              f"rango {row['rank']} (esperado {row['expected_rank']})")

    report = {
        "weights": weights,
        "families": list(families),
        "duality": args.duality,
        "mode": args.mode,
        "data_dir": str(Path(data_dir).resolve()),
        "tables": rows,
    }
    print(report)
    return report


if __name__ == "__main__":
    main()
