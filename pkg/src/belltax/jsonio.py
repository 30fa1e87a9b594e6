"""JSON files for joint distributions.

Layout::

    {"a_settings": [0, 30], "b_settings": [30, 60], "lambda": ["l1", "l2"],
     "entries": [{"alpha": "+", "beta": "-", "a": 0, "b": 30, "lambda": "l1", "p": "3/32"}, ...]}

Exact probabilities and non-integral rational angles are written as "n/d"
strings, floats as JSON numbers. A file whose probabilities are all strings
or integers loads in exact mode. Zero cells may be omitted.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .probcore import BelltaxError, JointDistribution, UsageError, VariableSpace, to_exact


class ParseError(UsageError):
    """Malformed distribution file; the message names the line or field."""


def _encode_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def distribution_to_dict(P: JointDistribution, include_zero: bool = False) -> dict:
    s = P.space
    entries = []
    for (alpha, beta, a, b, lam), p in P.cells(nonzero=not include_zero):
        value = _encode_number(p) if P.exact else float(p)
        if P.exact and isinstance(value, int):
            value = str(value)
        entries.append(
            {"alpha": alpha, "beta": beta, "a": _encode_number(a), "b": _encode_number(b), "lambda": lam, "p": value}
        )
    return {
        "a_settings": [_encode_number(x) for x in s.a_settings],
        "b_settings": [_encode_number(x) for x in s.b_settings],
        "lambda": list(s.lambda_values),
        "exact": P.exact,
        "entries": entries,
    }


def dumps(P: JointDistribution) -> str:
    """JSON text with one entry per line."""
    data = distribution_to_dict(P)
    head = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in data.items() if k != "entries")
    rows = ",\n".join("  " + json.dumps(e, ensure_ascii=False) for e in data["entries"])
    return "{\n" + head + ',\n "entries": [\n' + rows + "\n ]\n}"


def save_distribution(P: JointDistribution, path) -> None:
    Path(path).write_text(dumps(P) + "\n", encoding="utf-8")


def _angle(value, where: str):
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected an angle, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            return to_exact(value)
        except UsageError:
            pass
    raise ParseError(f"{where}: expected an angle, got {value!r}")


def _probability(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseError(f"{where}: expected a number or an 'n/d' string, got {value!r}")
    if isinstance(value, str):
        try:
            return to_exact(value)
        except UsageError:
            raise ParseError(f"{where}: not a rational number: {value!r}") from None
    return value


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def distribution_from_dict(data: dict) -> JointDistribution:
    if not isinstance(data, dict):
        raise ParseError("top level: expected an object")
    a_raw = _field(data, "a_settings", "top level")
    b_raw = _field(data, "b_settings", "top level")
    lam_raw = data.get("lambda", ["0"])
    for key, raw in (("a_settings", a_raw), ("b_settings", b_raw), ("lambda", lam_raw)):
        if not isinstance(raw, list):
            raise ParseError(f"{key}: expected a list")
    a_settings = tuple(_angle(x, f"a_settings[{k}]") for k, x in enumerate(a_raw))
    b_settings = tuple(_angle(x, f"b_settings[{k}]") for k, x in enumerate(b_raw))
    try:
        space = VariableSpace(a_settings, b_settings, tuple(str(x) for x in lam_raw))
    except BelltaxError as exc:
        raise ParseError(f"variable space: {exc}") from None
    entries = _field(data, "entries", "top level")
    if not isinstance(entries, list):
        raise ParseError("entries: expected a list")
    cells = {}
    for k, entry in enumerate(entries):
        where = f"entries[{k}]"
        cell = (
            _field(entry, "alpha", where),
            _field(entry, "beta", where),
            _angle(_field(entry, "a", where), f"{where}.a"),
            _angle(_field(entry, "b", where), f"{where}.b"),
            str(entry.get("lambda", space.lambda_values[0])),
        )
        p = _probability(_field(entry, "p", where), f"{where}.p")
        try:
            for var, value in zip(("alpha", "beta", "a", "b", "lambda"), cell):
                space.index(var, value)
        except BelltaxError as exc:
            raise ParseError(f"{where}: {exc}") from None
        if cell in cells:
            raise ParseError(f"{where}: cell given twice")
        cells[cell] = p
    exact = data.get("exact")
    if exact is None:
        exact = all(isinstance(p, (int, Fraction)) for p in cells.values())
    try:
        return JointDistribution.from_cells(space, cells, exact=bool(exact))
    except BelltaxError as exc:
        raise ParseError(f"entries: {exc}") from None


def loads(text: str) -> JointDistribution:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return distribution_from_dict(data)


def load_distribution(path) -> JointDistribution:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
