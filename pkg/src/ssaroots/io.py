"""JSON and CSV formats used by the command line tool.

Floats are written with ``repr`` so that output is byte-stable.
"""
from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid, InvalidModel
from .polynomial import ComplexPoly
from .series import SignalModel

ROOTS_HEADER = ["re", "im", "kind", "side", "L"]


def fmt(x) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # drop negative zero
    return repr(x)


def model_from_json(data) -> tuple[SignalModel, bool]:
    """Parse a model document; the flag tells whether it was given in real form.

    Accepted shapes: ``{"terms": [{"root": [re, im], "poly": [[re, im], ...]}]}``
    or ``{"real_terms": [{"rho": .., "omega": .., "phi": .., "poly": [...]}]}``.
    """
    if not isinstance(data, dict) or not ({"terms", "real_terms"} & data.keys()):
        raise InvalidModel("model JSON needs a 'terms' or 'real_terms' list")
    try:
        return SignalModel.from_json(data), "real_terms" in data
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidModel):
            raise
        raise InvalidModel(f"malformed model JSON: {exc}") from exc


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(str(path), f"cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(str(path), f"invalid JSON ({exc.msg})") from exc


def read_model(path) -> tuple[SignalModel, bool]:
    return model_from_json(load_json(path))


def write_model(path, m: SignalModel) -> None:
    Path(path).write_text(json.dumps(m.to_json(), indent=2) + "\n")


def poly_from_json(data) -> ComplexPoly:
    if isinstance(data, dict):
        data = data.get("coeffs", data.get("poly"))
    return ComplexPoly.from_json(data)


def series_to_csv(F) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "re", "im"])
    for n, f in enumerate(np.asarray(F, dtype=complex)):
        w.writerow([n, fmt(f.real), fmt(f.imag)])
    return buf.getvalue()


def write_series_csv(path, F) -> None:
    Path(path).write_text(series_to_csv(F))


def read_series_csv(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigInvalid(str(path), f"cannot read file ({exc.strerror})") from exc
    if not rows or "re" not in rows[0]:
        raise ConfigInvalid(str(path), "series CSV needs columns n, re, im")
    try:
        rows.sort(key=lambda r: int(r.get("n", 0)))
        return np.array([complex(float(r["re"]), float(r.get("im") or 0.0)) for r in rows])
    except ValueError as exc:
        raise ConfigInvalid(str(path), f"bad number in series CSV ({exc})") from exc


def roots_to_csv(rows) -> str:
    """``rows`` holds ``(value, kind, side, L)`` tuples."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROOTS_HEADER)
    for z, kind, side, L in rows:
        z = complex(z)
        w.writerow([fmt(z.real), fmt(z.imag), kind, side, L])
    return buf.getvalue()


def write_roots_csv(path, rows) -> None:
    Path(path).write_text(roots_to_csv(rows))


def table_to_csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
