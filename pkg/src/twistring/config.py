"""Run configuration read from an INI-style file.

Sections: [curve], [translation], [sheaf], [points], [engine] and an optional
[sklyanin]. Rationals may be written as "num/den", points as "x, y" or
"infinity", and divisors as JSON lists of {"point": ..., "coeff": n}.
"""
from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from typing import Dict, Optional

from .curve_core import Curve, CurvePoint, Translation, as_rational, make_automorphism
from .divisor_calc import DEFAULT_ORBIT_CAP, Divisor, divisor_from_json
from .riemann_roch import SAMPLE_MARGIN, SampleSchedule
from .sklyanin_free import SklyaninParams
from .thcr_engine import SheafData

DEFAULT_TEXT = """
[curve]
a1 = 0
a2 = 0
a3 = 1
a4 = -1
a6 = 0

[translation]
kind = translation
point = 0, 0

[sheaf]
base = [{"point": "infinity", "coeff": 3}]

[points]
p = 1, 0
q = 2, 2

[engine]
orbit_cap = 16
sample_generator = 0, 0
sample_offset = infinity
sample_margin = 4
max_degree = 8
format = json

[sklyanin]
a = 1
b = 2
c = 3
"""


class ConfigError(ValueError):
    pass


def parse_point(curve: Curve, text: str) -> CurvePoint:
    text = text.strip()
    if text.lower() in ("infinity", "o", "inf"):
        return curve.infinity
    parts = [s.strip() for s in text.strip("()[]").split(",")]
    if len(parts) != 2:
        raise ConfigError(f"cannot read point {text!r}; use 'x, y' or 'infinity'")
    return curve.point(as_rational(parts[0]), as_rational(parts[1]))


@dataclass
class Config:
    curve: Curve
    translation: Translation
    base_divisor: Divisor
    points: Dict[str, CurvePoint]
    orbit_cap: int = DEFAULT_ORBIT_CAP
    sample_generator: Optional[CurvePoint] = None
    sample_offset: Optional[CurvePoint] = None
    sample_margin: int = SAMPLE_MARGIN
    max_degree: int = 8
    output_format: str = "json"
    sklyanin: Optional[SklyaninParams] = None
    source_text: str = field(default="", repr=False)

    def sheaf(self) -> SheafData:
        gen = self.sample_generator or self.translation.t
        schedule = SampleSchedule(gen, self.sample_offset, self.sample_margin)
        return SheafData(self.translation, self.base_divisor, schedule)

    def require_ambient(self) -> None:
        if self.base_divisor.degree != 3:
            raise ConfigError(f"this command needs deg D_L = 3, got {self.base_divisor.degree}")

    def divisor(self, data) -> Divisor:
        if isinstance(data, str):
            data = json.loads(data)
        return divisor_from_json(self.curve, data, self.points, self.translation)


def load_config(path: Optional[str] = None, text: Optional[str] = None) -> Config:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(DEFAULT_TEXT)
    source = DEFAULT_TEXT
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    elif text is not None:
        source = text
    if path is not None or text is not None:
        user = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        user.read_string(source)
        # a user [points] section replaces the default names entirely
        if user.has_section("points"):
            parser.remove_section("points")
            parser.add_section("points")
        for sec in user.sections():
            if not parser.has_section(sec):
                parser.add_section(sec)
            for k, v in user.items(sec):
                parser.set(sec, k, v)
    return _build(parser, source)


def _build(cp: configparser.ConfigParser, source: str) -> Config:
    try:
        cv = cp["curve"]
        curve = Curve(*(as_rational(cv.get(k, "0")) for k in ("a1", "a2", "a3", "a4", "a6")))
        tr = cp["translation"]
        t = parse_point(curve, tr.get("point", ""))
        translation = make_automorphism(curve, tr.get("kind", "translation"), t)
        points = {name: parse_point(curve, val) for name, val in cp["points"].items()}
        base = divisor_from_json(curve, json.loads(cp["sheaf"].get("base")), points, translation)
        eng = cp["engine"]
        gen = eng.get("sample_generator", "").strip()
        off = eng.get("sample_offset", "").strip()
        sk = None
        if cp.has_section("sklyanin"):
            s = cp["sklyanin"]
            sk = SklyaninParams(s.get("a", "1"), s.get("b", "2"), s.get("c", "3"))
        fmt = eng.get("format", "json").strip().lower()
        if fmt not in ("json", "csv"):
            raise ConfigError(f"unknown output format {fmt!r}")
        return Config(
            curve=curve,
            translation=translation,
            base_divisor=base,
            points=points,
            orbit_cap=eng.getint("orbit_cap", DEFAULT_ORBIT_CAP),
            sample_generator=parse_point(curve, gen) if gen else None,
            sample_offset=parse_point(curve, off) if off else None,
            sample_margin=eng.getint("sample_margin", SAMPLE_MARGIN),
            max_degree=eng.getint("max_degree", 8),
            output_format=fmt,
            sklyanin=sk,
            source_text=source,
        )
    except (KeyError, ValueError, TypeError, configparser.Error, ZeroDivisionError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"bad configuration: {err}") from err
