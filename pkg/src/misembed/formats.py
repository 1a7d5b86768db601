"""On-disk formats of the pipeline: embedding JSON, states CSV, analysis CSVs.

Every file starts with a JSON header (a `# {...}` comment line for CSV, a
"header" key for JSON) carrying at least seed, w, and format_version, so a
run is reproducible from its outputs alone. Exact quantities are serialized
exactly: energies as (half, w) integer pairs, ratios as "num/den" strings,
configurations as hex with vertex 0 in the least significant bit.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import Iterable, Union

from .analysis import AnnotatedRecord, DecayFit, LocalizationMap, TauCurve
from .graphs import ExactValue, GraphFormatError, WeightedGraph, graph_from_obj, graph_to_obj
from .lattice import CrossingLattice, CrossingSite
from .solver import StateRecord

FORMAT_VERSION = 1

__all__ = [
    "FORMAT_VERSION",
    "embedding_from_obj",
    "embedding_to_obj",
    "format_fraction",
    "parse_fraction",
    "read_embedding",
    "read_states_csv",
    "write_embedding",
    "write_states_csv",
]


def format_fraction(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def make_header(seed=None, w=None, **extra) -> dict:
    header = {"format_version": FORMAT_VERSION, "seed": seed}
    header["w"] = format_fraction(w) if w is not None else None
    header.update(extra)
    return header


# ---------------------------------------------------------------------------
# Embedding JSON


def embedding_to_obj(cl: CrossingLattice) -> dict:
    return {
        "variant": cl.variant,
        "w": format_fraction(cl.w),
        "host": graph_to_obj(cl.host),
        "source": graph_to_obj(cl.source),
        "chains": [list(chain) for chain in cl.chains],
        "crossings": [
            {
                "pair": list(site.pair),
                "kind": site.kind,
                "gadgets": [{"role": role, "id": gid} for role, gid in site.gadgets],
                "slot_p": site.slot_p,
                "slot_q": site.slot_q,
                "b_e": site.b_e,
            }
            for site in cl.crossings
        ],
        "vertex_blocks": list(cl.vertex_blocks),
    }


def embedding_from_obj(obj: dict) -> CrossingLattice:
    try:
        crossings = tuple(
            CrossingSite(
                pair=tuple(site["pair"]),
                kind=site["kind"],
                gadgets=tuple((g["role"], g["id"]) for g in site["gadgets"]),
                slot_p=site["slot_p"],
                slot_q=site["slot_q"],
                b_e=site["b_e"],
            )
            for site in obj["crossings"]
        )
        return CrossingLattice(
            source=graph_from_obj(obj["source"]),
            variant=obj["variant"],
            w=parse_fraction(obj["w"]),
            host=graph_from_obj(obj["host"]),
            chains=tuple(tuple(chain) for chain in obj["chains"]),
            crossings=crossings,
            vertex_blocks=tuple(obj["vertex_blocks"]),
        )
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"embedding: missing or malformed field ({exc})") from None


def write_embedding(cl: CrossingLattice, path, header: Union[dict, None] = None) -> None:
    obj = embedding_to_obj(cl)
    if header is not None:
        obj["header"] = header
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_embedding(path) -> tuple[CrossingLattice, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return embedding_from_obj(obj), obj.get("header", {})


# ---------------------------------------------------------------------------
# States CSV

STATE_COLUMNS = ["energy_half", "energy_w", "energy_float", "config_hex"]
ANNOTATION_COLUMNS = ["d", "l", "r_distance", "r_deselect", "tie"]


def _open_csv_writer(path, header: dict):
    fh = open(path, "w", encoding="utf-8", newline="")
    fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
    return fh, csv.writer(fh, lineterminator="\n")


def write_states_csv(
    path,
    records: Iterable[StateRecord],
    header: dict,
    w: Union[Fraction, None],
) -> int:
    """Plain enumeration output, one row per state. Returns the row count."""
    fh, writer = _open_csv_writer(path, header)
    count = 0
    with fh:
        writer.writerow(STATE_COLUMNS)
        for rec in records:
            energy = rec.energy()
            if isinstance(energy, ExactValue):
                value = float(energy.value(w)) if w is not None else energy.half / 2
                writer.writerow([energy.half, energy.wbias, repr(value), format(rec.bits, "x")])
            else:
                writer.writerow(["", "", repr(energy), format(rec.bits, "x")])
            count += 1
    return count


def write_annotated_csv(
    path,
    rows: Iterable[tuple[StateRecord, AnnotatedRecord]],
    header: dict,
    w: Union[Fraction, None],
) -> int:
    fh, writer = _open_csv_writer(path, header)
    count = 0
    with fh:
        writer.writerow(STATE_COLUMNS + ANNOTATION_COLUMNS)
        for rec, ann in rows:
            energy = rec.energy()
            if isinstance(energy, ExactValue):
                base = [energy.half, energy.wbias, repr(float(energy.value(w)))]
            else:
                base = ["", "", repr(energy)]
            writer.writerow(
                base
                + [
                    format(rec.bits, "x"),
                    ann.d,
                    ann.l,
                    format_fraction(ann.r_distance),
                    format_fraction(ann.r_deselect),
                    int(ann.tie),
                ]
            )
            count += 1
    return count


def read_states_csv(path) -> tuple[dict, list[dict]]:
    """Header and rows of a states CSV (annotated columns included if present)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise GraphFormatError("states csv: missing header comment line")
        header = json.loads(first[2:])
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            row = {
                "bits": int(raw["config_hex"], 16),
                "energy_float": float(raw["energy_float"]),
            }
            if raw["energy_half"] != "":
                row["energy"] = ExactValue(int(raw["energy_half"]), int(raw["energy_w"]))
            for col in ANNOTATION_COLUMNS:
                if col in raw and raw[col] is not None and raw[col] != "":
                    if col in ("r_distance", "r_deselect"):
                        row[col] = parse_fraction(raw[col])
                    else:
                        row[col] = int(raw[col])
            rows.append(row)
    return header, rows


# ---------------------------------------------------------------------------
# Analysis CSVs


def write_taud_csv(path, curve: TauCurve, header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(["E_half", "E_w", "E_float", "d", "tau_num", "tau_den"])
        reps = curve.exact_reps or (None,) * len(curve.energies)
        for k, de in enumerate(curve.energies):
            rep = reps[k]
            # distinct lattice points can evaluate equal at the run's w; the
            # exact columns stay blank for such merged grid energies
            e_half = rep.half if rep is not None else ""
            e_w = rep.wbias if rep is not None else ""
            for d in curve.d_values:
                tau = curve.fractions[d][k]
                writer.writerow(
                    [e_half, e_w, repr(float(de)), d, tau.numerator, tau.denominator]
                )


def write_ecfit_csv(path, fits: Iterable[DecayFit], header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(["d", "E_c", "stderr", "window_lo", "window_hi", "n_points", "flag"])
        for fit in fits:
            writer.writerow(
                [
                    fit.d,
                    repr(fit.e_c) if fit.e_c is not None else "",
                    repr(fit.stderr) if fit.stderr is not None else "",
                    repr(fit.window[0]),
                    repr(fit.window[1]),
                    fit.n_points,
                    fit.flag or "",
                ]
            )


def write_localization_csv(path, loc: LocalizationMap, header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(["vertex", "b_e", "xi_raw", "xi_norm"])
        for v, (raw, norm, be) in enumerate(zip(loc.raw, loc.normalized, loc.b_e)):
            writer.writerow([v, be, raw, repr(norm)])


def write_compare_csv(path, rows, header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(["dE", "r0", "strategy", "prob"])
        for de, r0, strategy, prob in rows:
            writer.writerow(
                [repr(float(de)), format_fraction(r0), strategy, repr(float(prob))]
            )


def write_scaling_csv(path, report, header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(
            ["N", "seed", "states", "mean_l", "E_c0", "max_amplification", "eq10_violations"]
        )
        for row in report.rows:
            writer.writerow(
                [
                    row["n"],
                    row["seed"] if row["seed"] is not None else "",
                    row["states"],
                    repr(row["mean_l"]),
                    repr(row["e_c0"]) if row["e_c0"] is not None else "",
                    repr(row["max_amplification"])
                    if row["max_amplification"] is not None
                    else "",
                    row["eq10_violations"],
                ]
            )
        writer.writerow([])
        writer.writerow(["gamma_hat", repr(report.gamma_hat) if report.gamma_hat is not None else ""])


def write_pathology_csv(path, reports, header: dict) -> None:
    fh, writer = _open_csv_writer(path, header)
    with fh:
        writer.writerow(
            [
                "k",
                "n_mis",
                "expected_violations_num",
                "expected_violations_den",
                "single_cycle_num",
                "single_cycle_den",
                "wall_prob_num",
                "wall_prob_den",
            ]
        )
        for rep in reports:
            writer.writerow(
                [
                    rep.cycles,
                    rep.host_mis_count,
                    rep.expected_violations.numerator,
                    rep.expected_violations.denominator,
                    rep.single_cycle_violation_probability.numerator,
                    rep.single_cycle_violation_probability.denominator,
                    rep.wall_probability.numerator,
                    rep.wall_probability.denominator,
                ]
            )
