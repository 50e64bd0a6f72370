"""JSON and command-line argument parsing shared by the CLI."""

import json
import os
from fractions import Fraction
from typing import Dict, List

from .arith import fmt, to_fraction
from .errors import DomainError
from .places import Place
from .quadform import QuadraticForm


class ParseError(Exception):
    """Malformed JSON or an unreadable argument (exit code 1)."""

    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info

    def to_json(self) -> dict:
        return dict({"error": "parse-error", "message": str(self)}, **self.info)


def load_json_arg(text: str, what: str = "argument"):
    """Inline JSON (starting with { or [) or a path to a JSON file."""
    src = text.strip()
    if not src.startswith(("{", "[")):
        if not os.path.exists(src):
            raise ParseError(f"{what}: {text!r} is neither inline JSON nor an existing file")
        with open(src, encoding="utf-8") as fh:
            src = fh.read()
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def check_fields(obj, allowed, what: str):
    if not isinstance(obj, dict):
        raise DomainError(f"{what} must be a JSON object")
    extra = set(obj) - set(allowed)
    if extra:
        raise DomainError(f"unknown fields in {what}: {sorted(extra)}")


def parse_rational(s) -> Fraction:
    try:
        return to_fraction(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {s!r}") from exc


def parse_rational_list(text: str) -> List[Fraction]:
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise DomainError("empty list of rationals")
    return [parse_rational(p) for p in parts]


def parse_form(obj) -> QuadraticForm:
    check_fields(obj, {"diag"}, "form")
    if "diag" not in obj or not isinstance(obj["diag"], list):
        raise DomainError("form needs a diag list")
    return QuadraticForm([parse_rational(x) for x in obj["diag"]])


def form_from_arg(text: str) -> QuadraticForm:
    """A form given as JSON / JSON file, or as a comma-separated diagonal."""
    s = text.strip()
    if s.startswith("{") or (not s[:1].isdigit() and s[:1] not in "-+" and os.path.exists(s)):
        return parse_form(load_json_arg(s, "form"))
    return QuadraticForm(parse_rational_list(s))


def parse_places(text: str) -> List[Place]:
    try:
        return [Place.parse(p.strip()) for p in str(text).split(",") if p.strip()]
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad place list {text!r}") from exc


def parse_hasse(obj) -> Dict[Place, int]:
    if not isinstance(obj, dict):
        raise DomainError("hasse data must be an object {place: +1/-1}")
    out = {}
    for k, e in obj.items():
        if e not in (1, -1):
            raise DomainError(f"Hasse value at {k} must be +1 or -1")
        out[Place.parse(k)] = e
    return out


def rational_json(x) -> str:
    return fmt(x)
