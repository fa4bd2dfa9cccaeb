"""Run configuration: every threshold of the pipeline, with named presets."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, fields
from fractions import Fraction


@dataclass
class RunConfig:
    preset: str = "desk"
    g: int | None = None
    D: int = 4  # pseudo-grid depth
    rho: int = 2  # crossbar width
    M1: int = 2  # slices in the first slicing
    w_slice: int = 2  # width of the first slicing
    M_hat2: int = 2  # sub-slices per thin slice in the re-slicing case
    M2: int | None = None  # slice count promised after re-slicing
    w2_ratio: Fraction = Fraction(1, 2)  # width of the re-slicing, as a fraction of N
    intersect_w: int = 2
    intersect_D: int = 1
    wld_w: int = 2
    wld_D: int = 2
    chain_w: int = 2
    chain_L: int = 2  # length of the Path-of-Sets system
    type1_ratio: Fraction = Fraction(1, 2)
    boost_delta: int = 4
    boost_fractions: tuple | None = (1, 1, 1)
    boost_retries: int = 20
    hit_bound: int | None = None
    cap: int = 12
    samples: int = 200
    seed: int = 0
    strict: bool = False
    kappa_min: int | None = None
    kappa_min_weak: int | None = None

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, tuple):
                v = [str(x) if isinstance(x, Fraction) else x for x in v]
            out[f.name] = v
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        kw = dict(data)
        for k in ("w2_ratio", "type1_ratio"):
            if k in kw:
                kw[k] = Fraction(kw[k])
        if kw.get("boost_fractions") is not None:
            kw["boost_fractions"] = tuple(Fraction(x) for x in kw["boost_fractions"])
        return cls(**kw)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _log2(g: int) -> int:
    k = int(math.log2(g))
    if 2 ** k != g:
        raise ValueError("paper presets need g to be a power of two")
    return k


def paper(g: int) -> RunConfig:
    """Thresholds exactly as in the proof, for a grid of size g."""
    if g < 2:
        raise ValueError("g must be at least 2")
    lg = _log2(g)
    D = 64 * g ** 4
    return RunConfig(
        preset=f"paper:g={g}", g=g, D=D, rho=g * g,
        M1=128 * g ** 3 * lg, w_slice=2 ** 11 * g ** 6,
        M_hat2=g, M2=8 * g ** 4 * lg, w2_ratio=Fraction(1, g),
        intersect_w=4 * g * g, intersect_D=D // 2,
        wld_w=g * g, wld_D=D // 4,
        chain_w=g * g, chain_L=g * g,
        type1_ratio=Fraction(1, g),
        boost_delta=4, boost_fractions=None,
        strict=True,
        kappa_min=2 ** 22 * g ** 9 * lg, kappa_min_weak=2 ** 22 * g ** 10 * lg,
    )


def desk(**overrides) -> RunConfig:
    """Small thresholds that run in seconds; lemma preconditions are waived."""
    cfg = RunConfig()
    for k, v in overrides.items():
        if not hasattr(cfg, k):
            raise ValueError(f"unknown config key {k}")
        setattr(cfg, k, v)
    return cfg


def resolve(spec: str) -> RunConfig:
    """Parse "paper:g=4", "desk" or "desk:rho=3,D=2"."""
    m = re.fullmatch(r"paper:g=(\d+)", spec)
    if m:
        return paper(int(m.group(1)))
    if spec == "desk":
        return desk()
    m = re.fullmatch(r"desk:(.*)", spec)
    if m:
        kw = {}
        for part in m.group(1).split(","):
            k, _, v = part.partition("=")
            kw[k.strip()] = Fraction(v) if "/" in v else int(v)
        return desk(**kw)
    raise ValueError(f"unknown preset {spec!r}")


def desk_for(kappa: int, **overrides) -> RunConfig:
    """Desk preset with the pseudo-grid depth scaled to the witness count."""
    D = 4 if kappa >= 64 else 2 if kappa >= 8 else 1
    return desk(**{"D": D, **overrides})
