"""Reading and writing scenario files.

A scenario file is INI-style text with four sections::

    [model]
    a0 = -0.5
    a1 = 0.3                      # constant kernel
    b0 = 1
    b1 = [[-1, 0], [0, 1]]        # (xi, value) table, linear in between
    sigma = 0.2
    r = 1
    T = 2

    [history]
    eta0 = 1
    eta = 1                       # optional, defaults to eta0
    delta = 0                     # optional, defaults to 0

    [objective]
    beta = 1
    gamma = 1

    [numerics]
    n_points = 101
    n_paths = 10000               # optional
    seed = 0                      # optional

``a1`` may also be ``point(<coefficient>)`` for forgetting concentrated at
lag ``r``.  Comments start with ``#`` or ``;``.  Unknown sections or keys
are errors.
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .grid import SegmentPath
from .params import PointDelay, ScenarioParams

SCHEMA = {
    "model": {"a0": True, "a1": True, "b0": True, "b1": True, "sigma": True, "r": True, "T": True},
    "history": {"eta0": True, "eta": False, "delta": False},
    "objective": {"beta": True, "gamma": True},
    "numerics": {"n_points": True, "n_paths": False, "seed": False},
}
DEFAULT_PATHS = 10_000
DEFAULT_SEED = 0

_POINT = re.compile(r"^point\(\s*(?P<c>[^)]+?)\s*\)$")


class ScenarioFileError(ScenarioError):
    pass


@dataclass(frozen=True)
class Scenario:
    params: ScenarioParams
    n_paths: int = DEFAULT_PATHS
    seed: int = DEFAULT_SEED


class _Locator:
    """Maps ``section.key`` to the line and column where its value starts."""

    def __init__(self, text: str):
        self.where = {}
        section = None
        for lineno, line in enumerate(text.splitlines(), start=1):
            head = re.match(r"^\s*\[([^\]]+)\]", line)
            if head:
                section = head.group(1).strip()
                continue
            m = re.match(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]\s*", line)
            if m and section is not None:
                self.where[(section, m.group(1))] = (lineno, m.end() + 1)

    def __call__(self, section: str, key: str) -> str:
        if (section, key) not in self.where:
            return ""
        line, col = self.where[(section, key)]
        return f"line {line}, column {col}: "


def _number(raw: str, what: str, loc: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioFileError(f"{loc}{what}: expected a number, got {raw!r}") from None
    if not np.isfinite(value):
        raise ScenarioFileError(f"{loc}{what}: value must be finite")
    return value


def _integer(raw: str, what: str, loc: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ScenarioFileError(f"{loc}{what}: expected an integer, got {raw!r}") from None


def _segment(raw: str, what: str, loc: str, r: float, n_points: int) -> SegmentPath:
    raw = raw.strip()
    if raw.startswith("["):
        try:
            table = np.array(json.loads(raw), dtype=float)
        except (ValueError, TypeError) as exc:
            raise ScenarioFileError(f"{loc}{what}: malformed table ({exc})") from None
        if table.ndim != 2 or table.shape[1] != 2:
            raise ScenarioFileError(f"{loc}{what}: table must be a list of [xi, value] pairs")
        try:
            return SegmentPath.from_table(r, n_points, table[:, 0], table[:, 1])
        except ScenarioError as exc:
            raise ScenarioFileError(f"{loc}{what}: {exc}") from None
    return SegmentPath.constant(r, n_points, _number(raw, what, loc))


def loads(text: str) -> Scenario:
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None, default_section="\0"
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        prefix = f"line {lineno}: " if lineno else ""
        raise ScenarioFileError(f"{prefix}{exc.message.splitlines()[0]}") from None

    loc = _Locator(text)
    for section in parser.sections():
        if section not in SCHEMA:
            raise ScenarioFileError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ScenarioFileError(f"{loc(section, key)}unknown key '{section}.{key}'")
    for section, keys in SCHEMA.items():
        for key, required in keys.items():
            if required and not parser.has_option(section, key):
                raise ScenarioFileError(f"missing required key '{section}.{key}'")

    def get(section, key):
        return parser.get(section, key).strip()

    def num(section, key):
        return _number(get(section, key), f"{section}.{key}", loc(section, key))

    r = num("model", "r")
    n_points = _integer(get("numerics", "n_points"), "numerics.n_points", loc("numerics", "n_points"))
    if n_points < 2:
        raise ScenarioFileError(f"{loc('numerics', 'n_points')}numerics.n_points must be >= 2")

    def seg(section, key, default=None):
        if not parser.has_option(section, key):
            return SegmentPath.constant(r, n_points, default)
        return _segment(get(section, key), f"{section}.{key}", loc(section, key), r, n_points)

    a1_raw = get("model", "a1")
    point = _POINT.match(a1_raw)
    if point:
        a1 = PointDelay(_number(point.group("c"), "model.a1", loc("model", "a1")))
    else:
        a1 = seg("model", "a1")

    eta0 = num("history", "eta0")
    try:
        params = ScenarioParams(
            a0=num("model", "a0"),
            a1=a1,
            b0=num("model", "b0"),
            b1=seg("model", "b1"),
            sigma=num("model", "sigma"),
            r=r,
            T=num("model", "T"),
            eta0=eta0,
            eta=seg("history", "eta", eta0),
            delta=seg("history", "delta", 0.0),
            beta=num("objective", "beta"),
            gamma=num("objective", "gamma"),
        )
    except ScenarioError as exc:
        raise ScenarioFileError(str(exc)) from None

    n_paths, seed = DEFAULT_PATHS, DEFAULT_SEED
    if parser.has_option("numerics", "n_paths"):
        n_paths = _integer(get("numerics", "n_paths"), "numerics.n_paths", loc("numerics", "n_paths"))
    if parser.has_option("numerics", "seed"):
        seed = _integer(get("numerics", "seed"), "numerics.seed", loc("numerics", "seed"))
    return Scenario(params, n_paths, seed)


def load(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioFileError(f"cannot read scenario file: {exc}") from None
    return loads(text)


def _emit_segment(path: SegmentPath) -> str:
    vals = path.values
    if np.all(vals == vals[0]):
        return repr(float(vals[0]))
    return json.dumps([[float(x), float(v)] for x, v in zip(path.xi, vals)])


def dumps(scenario: Scenario) -> str:
    p = scenario.params
    a1 = f"point({p.a1.coefficient!r})" if p.point_delay else _emit_segment(p.a1)
    lines = [
        "[model]",
        f"a0 = {p.a0!r}",
        f"a1 = {a1}",
        f"b0 = {p.b0!r}",
        f"b1 = {_emit_segment(p.b1)}",
        f"sigma = {p.sigma!r}",
        f"r = {p.r!r}",
        f"T = {p.T!r}",
        "",
        "[history]",
        f"eta0 = {p.eta0!r}",
        f"eta = {_emit_segment(p.eta)}",
        f"delta = {_emit_segment(p.delta)}",
        "",
        "[objective]",
        f"beta = {p.beta!r}",
        f"gamma = {p.gamma!r}",
        "",
        "[numerics]",
        f"n_points = {p.n_points}",
        f"n_paths = {scenario.n_paths}",
        f"seed = {scenario.seed}",
        "",
    ]
    return "\n".join(lines)


def dump(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario), encoding="utf-8")
