"""Experiment files: INI-style text describing one simulation.

Example::

    [graph]
    weights =
        0 3.4 0 0
        3.4 0 2.1 4.3
        0 2.1 0 1.1
        0 4.3 1.1 0

    [x0]
    values = 6.2945 8.1158 -7.4603 8.2675
    # or: seed = 7  and optionally  range = -10 10

    [law]
    name = dynamic-continuous

    [params]
    sigma = 0.5          # scalar for every agent, or one value per agent
    beta = 1
    xi = 1
    theta = 1
    internal0 = 10

    [sim]
    t_final = 10
    dt = 0.001
    event_tol = 1e-9
    zeno_floor = 1e-7
    sample_stride = 10

Only ``[graph]``, ``[x0]`` and ``[law]`` are required; the rest default to the
values shown. Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
import re
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .graph import build_graph
from .simulator import SimConfig, validate_config
from .triggering import LawKind, TriggerParams

PARAM_DEFAULTS = {"sigma": 0.5, "beta": 1.0, "xi": 1.0, "theta": 1.0, "internal0": 10.0}
SIM_DEFAULTS = {"t_final": 10.0, "dt": 1e-3, "event_tol": 1e-9, "zeno_floor": 1e-7, "sample_stride": 10}
ALLOWED = {
    "graph": {"weights"},
    "x0": {"values", "seed", "range"},
    "law": {"name"},
    "params": set(PARAM_DEFAULTS),
    "sim": set(SIM_DEFAULTS),
}
REQUIRED_SECTIONS = ("graph", "x0", "law")

_SPLIT = re.compile(r"[\s,]+")


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.parser = configparser.ConfigParser(
            interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__none__")
        try:
            self.parser.read_string(text)
        except configparser.Error as exc:
            raise ParseError(f"malformed experiment file: {exc.message.splitlines()[0]}",
                             line=getattr(exc, "lineno", None)) from exc

    def fail(self, message: str, section: str, key: str | None = None):
        field = f"{section}.{key}" if key else section
        raise ParseError(message, field=field, line=_line_of(self.text, section, key))

    def numbers(self, section: str, key: str) -> list[float]:
        raw = self.parser.get(section, key)
        tokens = [t for t in _SPLIT.split(raw.strip()) if t]
        if not tokens:
            self.fail("empty value", section, key)
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            self.fail(f"not a number list: {raw.strip()!r}", section, key)
        if not all(math.isfinite(v) for v in values):
            self.fail("values must be finite", section, key)
        return values

    def scalar(self, section: str, key: str) -> float:
        values = self.numbers(section, key)
        if len(values) != 1:
            self.fail(f"expected one number, got {len(values)}", section, key)
        return values[0]

    def integer(self, section: str, key: str) -> int:
        raw = self.parser.get(section, key).strip()
        try:
            return int(raw)
        except ValueError:
            self.fail(f"expected an integer, got {raw!r}", section, key)


def loads_config(text: str) -> SimConfig:
    """Parse and fully validate an experiment description."""
    r = _Reader(text)
    p = r.parser
    for section in p.sections():
        if section not in ALLOWED:
            r.fail(f"unknown section [{section}]", section)
        for key in p.options(section):
            if key not in ALLOWED[section]:
                r.fail(f"unknown key {key!r}", section, key)
    for section in REQUIRED_SECTIONS:
        if not p.has_section(section):
            raise ParseError(f"missing section [{section}]", field=section)
    if not p.has_option("law", "name"):
        r.fail("missing law name", "law", "name")
    if not p.has_option("graph", "weights"):
        r.fail("missing adjacency rows", "graph", "weights")

    rows = [row for row in p.get("graph", "weights").replace(";", "\n").splitlines() if row.strip()]
    try:
        weights = [[float(t) for t in _SPLIT.split(row.strip()) if t] for row in rows]
    except ValueError:
        r.fail("adjacency rows must be numbers", "graph", "weights")
    if any(len(row) != len(rows) for row in weights):
        r.fail("adjacency must be square", "graph", "weights")
    if not all(math.isfinite(v) for row in weights for v in row):
        r.fail("adjacency entries must be finite", "graph", "weights")
    graph = build_graph(weights)
    n = graph.n

    try:
        law = LawKind.parse(p.get("law", "name"))
    except ValueError as exc:
        r.fail(str(exc), "law", "name")

    x0 = seed = None
    x0_range = (-10.0, 10.0)
    if p.has_option("x0", "values"):
        if p.has_option("x0", "seed"):
            r.fail("give either values or seed, not both", "x0", "seed")
        x0 = tuple(r.numbers("x0", "values"))
    elif p.has_option("x0", "seed"):
        seed = r.integer("x0", "seed")
    else:
        r.fail("needs values or seed", "x0")
    if p.has_option("x0", "range"):
        rng = r.numbers("x0", "range")
        if len(rng) != 2:
            r.fail("range needs two numbers", "x0", "range")
        x0_range = (rng[0], rng[1])

    vectors = {}
    for key, default in PARAM_DEFAULTS.items():
        if p.has_option("params", key):
            values = r.numbers("params", key)
            if len(values) == 1:
                values = values * n
            elif len(values) != n:
                r.fail(f"expected 1 or {n} values, got {len(values)}", "params", key)
        else:
            values = [default] * n
        vectors[key] = tuple(values)
    params = TriggerParams(**vectors)

    sim = dict(SIM_DEFAULTS)
    for key in SIM_DEFAULTS:
        if p.has_option("sim", key):
            sim[key] = r.integer("sim", key) if key == "sample_stride" else r.scalar("sim", key)

    cfg = SimConfig(graph=graph, x0=x0, law=law, params=params, seed=seed, x0_range=x0_range, **sim)
    return validate_config(cfg)


def resolve_config_path(path: str | Path) -> Path:
    """An existing file path, or the name of a bundled config such as ``paper_fig3.cfg``."""
    path = Path(path)
    if path.exists():
        return path
    bundled = resources.files("etconsensus") / "configs" / path.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no config file {str(path)!r} and no bundled config of that name")


def load_config(path: str | Path) -> SimConfig:
    return loads_config(resolve_config_path(path).read_text())


def _fmt(values) -> str:
    values = list(values)
    if len(set(values)) == 1:
        return repr(values[0])
    return " ".join(repr(v) for v in values)


def dumps_config(cfg: SimConfig) -> str:
    """Inverse of :func:`loads_config`; floats are written with repr so they round-trip."""
    lines = ["[graph]", "weights ="]
    for row in cfg.graph.weights:
        lines.append("    " + " ".join(repr(float(v)) for v in row))
    lines += ["", "[x0]"]
    if cfg.x0 is not None:
        lines.append("values = " + " ".join(repr(v) for v in cfg.x0))
    else:
        lines.append(f"seed = {cfg.seed}")
    lines.append(f"range = {cfg.x0_range[0]!r} {cfg.x0_range[1]!r}")
    lines += ["", "[law]", f"name = {cfg.law.value}", "", "[params]"]
    for key in PARAM_DEFAULTS:
        lines.append(f"{key} = {_fmt(getattr(cfg.params, key))}")
    lines += ["", "[sim]"]
    for key in SIM_DEFAULTS:
        lines.append(f"{key} = {getattr(cfg, key)!r}")
    return "\n".join(lines) + "\n"
