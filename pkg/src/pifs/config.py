"""Experiment recipes in INI syntax (read with :mod:`configparser`).

Sections::

    [space]        metric = <key>          lo = <coords>   hi = <coords>
    [ifs]          snap, tol, max_iter, seed_set (a set literal or a path)
    [map.<k>]      form = <map literal>    lip = <s>       label = <name>
    [condensation] set = <set literal or path>
    [render]       width, height
    [collage]      set = <set literal or path>, cases, seed, workers
    [semigroup]    predicate, depth
    [conspace]     t, limit, sequence, terms, mode (continuity | cauchy), grid

A set literal is ``interval a b`` or points separated by ``;`` with
coordinates separated by spaces (``0 0; 0.5 0``).  Map coefficients may be
arithmetic (``affine1d 1/3 2/3``); in the ``[conspace] sequence`` literal
they may also use the term index ``n``, e.g. ``affine1d 0.5 1/n``.  Map
sections are read in the numeric order of their suffix.  Inline comments
start with ``#``.
"""

from __future__ import annotations

import ast
import configparser
import operator
import os
from dataclasses import dataclass, field

import numpy as np

from .hyperspace import FinitePointSet, parse_set, read_set
from .maps import parse_map
from .pmetric import PartialMetric


class ConfigError(ValueError):
    """The recipe is unreadable or inconsistent."""


@dataclass
class Experiment:
    space: PartialMetric
    maps: list
    condensation: object = None
    snap: float | None = 2.0**-10
    tol: float | None = None
    max_iter: int = 200
    seed_set: object = None
    width: int = 256
    height: int = 256
    collage: dict = field(default_factory=dict)
    semigroup: dict = field(default_factory=dict)
    conspace: dict = field(default_factory=dict)
    path: str = ""

    def ifs(self):
        from .ifs import IFSp

        if not self.maps:
            raise ConfigError(f"{self.path or 'config'} defines no [map.<k>] sections")
        return IFSp(self.space, self.maps, self.condensation)


def _floats(text, what):
    try:
        return [float(v) for v in text.split()]
    except ValueError:
        raise ConfigError(f"{what}: expected numbers, got {text!r}") from None


def parse_set_literal(text, base_dir=""):
    """``interval a b``, ``x1 y1; x2 y2`` or a path to a set file."""
    text = text.strip()
    if text.startswith("interval"):
        return parse_set(text)
    if ";" in text or _is_numeric_row(text):
        rows = [_floats(r, "set literal") for r in text.split(";") if r.strip()]
        if len({len(r) for r in rows}) != 1:
            raise ConfigError(f"ragged set literal {text!r}")
        return FinitePointSet(np.array(rows))
    path = text if os.path.isabs(text) else os.path.join(base_dir, text)
    try:
        return read_set(path)
    except OSError as exc:
        raise ConfigError(f"cannot read set file {path}: {exc}") from None


def _is_numeric_row(text):
    try:
        [float(v) for v in text.split()]
    except ValueError:
        return False
    return bool(text.split())


def _snap(text):
    text = text.strip().lower()
    if text in ("none", "exact"):
        return None
    return _number(text)


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def _eval_node(node, n):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, n)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "n" and n is not None:
        return float(n)
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        left, right = _eval_node(node.left, n), _eval_node(node.right, n)
        if isinstance(node.op, ast.Pow) and abs(right) > 1024:
            raise ConfigError(f"exponent {right:g} is too large")
        try:
            return _OPS[type(node.op)](left, right)
        except (ZeroDivisionError, OverflowError) as exc:
            raise ConfigError(f"cannot evaluate coefficient: {exc}") from None
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_node(node.operand, n))
    raise ConfigError(f"unsupported expression element {ast.dump(node)}")


def evaluate_coefficient(text, n=None):
    """Arithmetic on numbers (and ``n`` when given); nothing else is allowed."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ConfigError(f"cannot parse coefficient {text!r}") from None
    return _eval_node(tree, n)


def _number(text):
    return evaluate_coefficient(text)


def sequence_literal(template, n):
    """Evaluate the coefficients of a map literal; they may use ``n`` when it is given."""
    head, *coeffs = template.split()
    return " ".join([head] + [repr(evaluate_coefficient(c, n)) for c in coeffs])


def _map_sections(cp):
    keys = [s for s in cp.sections() if s.startswith("map.")]

    def order(name):
        suffix = name[4:]
        return (0, int(suffix), "") if suffix.isdigit() else (1, 0, suffix)

    return sorted(keys, key=order)


def load_config(path):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return experiment_from_parser(cp, os.path.dirname(os.path.abspath(path)), path)


def loads_config(text, base_dir=""):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return experiment_from_parser(cp, base_dir, "")


def experiment_from_parser(cp, base_dir="", path=""):
    if not cp.has_section("space"):
        raise ConfigError("config needs a [space] section")
    sp = cp["space"]
    if "metric" not in sp:
        raise ConfigError("[space] needs a metric key")
    box = None
    if "lo" in sp or "hi" in sp:
        if not ("lo" in sp and "hi" in sp):
            raise ConfigError("[space] needs both lo and hi, or neither")
        box = (_floats(sp["lo"], "lo"), _floats(sp["hi"], "hi"))
    try:
        space = PartialMetric.from_key(sp["metric"], box=box)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    maps = []
    for name in _map_sections(cp):
        sec = cp[name]
        if "form" not in sec:
            raise ConfigError(f"[{name}] needs a form")
        lip = _number(sec["lip"]) if "lip" in sec else None
        try:
            literal = sequence_literal(sec["form"], None)
            maps.append(parse_map(literal, lip, sec.get("label", name[4:]), space.key))
        except ValueError as exc:
            raise ConfigError(f"[{name}]: {exc}") from None

    exp = Experiment(space, maps, path=path)
    try:
        if cp.has_section("ifs"):
            sec = cp["ifs"]
            if "snap" in sec:
                exp.snap = _snap(sec["snap"])
            if "tol" in sec:
                exp.tol = _number(sec["tol"])
            exp.max_iter = sec.getint("max_iter", exp.max_iter)
            if "seed_set" in sec:
                exp.seed_set = parse_set_literal(sec["seed_set"], base_dir)
        if cp.has_section("condensation"):
            exp.condensation = parse_set_literal(cp["condensation"]["set"], base_dir)
        if cp.has_section("render"):
            exp.width = cp["render"].getint("width", exp.width)
            exp.height = cp["render"].getint("height", exp.height)
        if cp.has_section("collage"):
            sec = cp["collage"]
            exp.collage = {
                "set": parse_set_literal(sec["set"], base_dir) if "set" in sec else None,
                "cases": sec.getint("cases", 0),
                "seed": sec.getint("seed", 0),
                "workers": sec.getint("workers", 1),
            }
        if cp.has_section("semigroup"):
            sec = cp["semigroup"]
            exp.semigroup = {
                "predicate": sec.get("predicate", "contraction"),
                "depth": sec.getint("depth", 2),
            }
        if cp.has_section("conspace"):
            sec = cp["conspace"]
            exp.conspace = {
                "t": _number(sec["t"]),
                "limit": sec.get("limit"),
                "sequence": sec["sequence"],
                "terms": sec.getint("terms", 32),
                "mode": sec.get("mode", "continuity"),
                "grid": sec.getint("grid", 2**10 + 1),
            }
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value in config: {exc}") from None
    if exp.conspace and exp.conspace["mode"] not in ("continuity", "cauchy"):
        raise ConfigError(f"[conspace] mode must be continuity or cauchy, got {exp.conspace['mode']!r}")
    return exp

