"""The full dichotomy: a crossbar of width rho, or a strong Path-of-Sets
system in a minor of the host."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .certificates import Certificate, crossbar_certificate, minor_model_body, pos_certificate, validate_certificate
from .chain import ChainError, ClusterSlot, IndexSets, assemble_weak_pos, find_chain
from .config import RunConfig
from .decomposition import group_by_class, prune_to_intersecting, well_linked_decompose, exact_or_sampled_oracle
from .graph import Graph, graph_from_paths
from .pos import BoostError, boost_to_strong, validate_pos
from .pseudo_grid import (
    Crossbar, WitnessPaths, build_pseudo_grid_or_crossbar, initial_witnesses, select_min_edge_witnesses,
)
from .slicing import (
    Lift, Slicing, case2_reslice, compute_slicing, reduce_to_perfect_unique_linkage, refine_slicing,
    rs_numbering, verify_unique_linkage,
)

log = logging.getLogger(__name__)


class PipelineError(Exception):
    def __init__(self, stage, message, partial=None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.partial = partial


@dataclass
class PipelineResult:
    certificate: Certificate
    stats: dict = field(default_factory=dict)


@dataclass
class _Slice:
    index: int  # 1-based
    sigma: list  # R indices with a non-empty segment
    q: list  # indices into the instance Q
    kept: list = field(default_factory=list)
    dropped: list = field(default_factory=list)
    q_kept: list = field(default_factory=list)


def _segment(s: Slicing, r: int, i: int) -> tuple:
    return s.segment(r, i)


def _prune(inst, s: Slicing, cfg: RunConfig, stats: dict) -> list[_Slice]:
    out = []
    for i in range(1, s.M + 1):
        rs = [r for r in range(len(s.R)) if _segment(s, r, i)]
        fam = list(s.families[i - 1])
        sl = _Slice(i, rs, fam)
        segs = [_segment(s, r, i) for r in rs]
        pair = prune_to_intersecting(segs, [inst.Q[q] for q in fam], cfg.intersect_w, cfg.intersect_D,
                                     strict=cfg.strict)
        sl.kept = [rs[k] for k in pair.kept]
        sl.dropped = [rs[k] for k in pair.discarded] + [r for r in range(len(s.R)) if r not in rs]
        sl.q_kept = [fam[k] for k in pair.q_kept]
        if pair.waived:
            stats.setdefault("waived", []).append(f"prune slice {i}: " + "; ".join(pair.waived))
        out.append(sl)
    return out


def _decompose(inst, s: Slicing, sl: _Slice, cfg: RunConfig, stats: dict) -> list[ClusterSlot]:
    if not sl.kept or not sl.q_kept:
        return []
    i = sl.index
    segs = [_segment(s, r, i) for r in sl.sigma]
    G = graph_from_paths(segs + [inst.Q[q] for q in sl.q])
    sigma = [_segment(s, r, i) for r in sl.kept]
    oracle = exact_or_sampled_oracle(cfg.cap, cfg.samples, cfg.seed)
    dec = well_linked_decompose(G, sigma, [inst.Q[q] for q in sl.q_kept], cfg.wld_w, cfg.wld_D,
                                cut_oracle=oracle, strict=cfg.strict)
    if dec.waived:
        stats.setdefault("waived", []).append(f"decompose slice {i}: " + "; ".join(dec.waived))
    stats.setdefault("decompositions", []).append({"slice": i, **dec.ledger(), "status": dec.status})
    return [ClusterSlot(i, dec.clusters[c], frozenset(sl.kept[k] for k in dec.members[c])) for c in dec.kept]


def _chain_and_assemble(inst, s: Slicing, slots: list, D_hat: int, cfg: RunConfig, stats: dict):
    N = len(inst.R)
    slots = sorted(slots, key=lambda c: (c.slice, min(c.vertices)))
    idx = IndexSets(N, [c.members for c in slots], D_hat, cfg.chain_w)
    hyp = idx.hypotheses()
    if hyp:
        if cfg.strict:
            raise PipelineError("chain", "; ".join(hyp))
        stats.setdefault("waived", []).append("chain: " + "; ".join(hyp))
    try:
        ch = find_chain(idx, cfg.chain_L, strict=cfg.strict)
    except (ChainError, ValueError) as exc:
        raise PipelineError("chain", str(exc)) from exc
    stats["chain"] = [slots[k].slice for k in ch.indices]
    try:
        weak = assemble_weak_pos(inst.graph, inst.R, s.markers, slots, ch, cfg.chain_w)
    except ChainError as exc:
        raise PipelineError("assemble", str(exc)) from exc
    rep = validate_pos(weak, "weak", cap=cfg.cap, samples=cfg.samples, seed=cfg.seed)
    if not rep.ok:
        raise PipelineError("assemble", f"weak Path-of-Sets system rejected: {rep.violations}")
    return weak


def _model(reduction, Hp: Graph, host: Graph) -> dict:
    inst = reduction.instance
    branch: dict = {}
    for v, rep in reduction.remap.items():
        branch.setdefault(rep, set()).add(v)
    host_edge = {}
    for e in inst.graph.edge_ids():
        u, v = Hp.endpoints(e)
        a, b = inst.graph.endpoints(e)
        host_edge[e] = (u, v) if reduction.remap[u] == a else (v, u)
    return minor_model_body(inst.graph, branch, host_edge)


def crossbar_or_pos(H: Graph, A, B, X, cfg: RunConfig, P=None, Q=None) -> PipelineResult:
    """Run the dichotomy and return a validated certificate."""
    stats: dict = {"case": None}
    if len({len(A), len(B), len(X)}) != 1:
        raise ValueError("A, B and X must have the same size")
    if any(H.degree(x) != 1 for x in X):
        raise ValueError("every X vertex must have degree 1")
    if P is None or Q is None:
        w0 = initial_witnesses(H, A, B, X)
        P, Q = w0.P, w0.Q
    w = select_min_edge_witnesses(H, A, B, X, P, Q)
    stats["witness_edges"] = w.edge_count()
    res = build_pseudo_grid_or_crossbar(H, A, B, X, w, cfg.D, cfg.rho)
    if isinstance(res, Crossbar):
        stats["stage"] = "pseudo-grid"
        return _finish_crossbar(H, res, cfg, stats)
    pg = res
    R = [w.P[j] for lay in pg.layers for j in lay]
    sets = [{v for j in lay for v in w.P[j]} for lay in pg.layers]
    tails = [t for _, t in pg.tails if all(st & set(t) for st in sets)]
    stats.update(N=len(R), tails=len(pg.tails), Q2=len(tails))
    red = reduce_to_perfect_unique_linkage(R, tails, w.Q)
    inst = red.instance
    Hp = graph_from_paths(R + tails)
    if not inst.is_perfect():
        raise PipelineError("reduce", "reduced instance is not perfect")
    uv = verify_unique_linkage(inst)
    if not uv.ok:
        raise PipelineError("reduce", f"linkage is not unique ({uv.status})")
    num = rs_numbering(inst)
    lift = Lift(H, tuple(A), tuple(B), tuple(X), R, tails)
    try:
        s = compute_slicing(inst, cfg.M1, cfg.w_slice, num, strict=cfg.strict)
    except Exception as exc:
        raise PipelineError("slicing", str(exc)) from exc
    stats["slicing_width"] = s.width
    slices = _prune(inst, s, cfg, stats)
    N = len(R)
    type1 = [sl for sl in slices if len(sl.kept) >= cfg.type1_ratio * N]
    stats["type1"] = [sl.index for sl in type1]
    if 2 * len(type1) >= len(slices):
        stats["case"] = 1
        slots = []
        for sl in type1:
            slots += _decompose(inst, s, sl, cfg, stats)
        if not slots:
            raise PipelineError("decompose", "no happy cluster in any slice")
        grp = group_by_class([(k, len(c.members)) for k, c in enumerate(slots)], 4 * cfg.wld_D)
        chosen = [slots[k] for k in sorted(grp.members)]
        stats["size_class"] = grp.j
        weak = _chain_and_assemble(inst, s, chosen, cfg.wld_D * 2 ** grp.j, cfg, stats)
    else:
        stats["case"] = 2
        w2 = max(1, math.ceil(cfg.w2_ratio * N))
        refinements = {}
        for sl in slices:
            if sl in type1:
                continue
            out = case2_reslice(inst, s, sl.index, sl.kept, sl.dropped, sl.q_kept, cfg.M_hat2, w2,
                                lift=lift, rho=cfg.rho, hit_bound=cfg.hit_bound)
            if isinstance(out, Crossbar):
                stats["stage"] = f"re-slicing slice {sl.index}"
                return _finish_crossbar(H, out, cfg, stats)
            refinements[sl.index] = out
        s = refine_slicing(s, refinements)
        stats["slices_after_reslicing"] = s.M
        slices = _prune(inst, s, cfg, stats)
        slots = []
        for sl in slices:
            cands = _decompose(inst, s, sl, cfg, stats)
            if cands:
                slots.append(max(cands, key=lambda c: (len(c.members), -min(c.vertices))))
        if not slots:
            raise PipelineError("decompose", "no happy cluster in any slice")
        weak = _chain_and_assemble(inst, s, slots, cfg.wld_D, cfg, stats)
    model = _model(red, Hp, H)
    try:
        strong = boost_to_strong(weak, cfg.boost_delta, cfg.boost_retries, cfg.seed, cfg.boost_fractions,
                                 cfg.cap, cfg.samples)
        final = strong
    except BoostError as exc:
        stats["boost"] = f"{exc.kind}: {exc}"
        final = weak
    stats["stage"] = "path-of-sets"
    cert = pos_certificate(final, model, cfg.to_json(), stats)
    rep = validate_certificate(cert, H, cfg.cap, cfg.samples, cfg.seed)
    if not rep.ok:
        raise PipelineError("validate", f"certificate rejected: {rep.violations}")
    return PipelineResult(cert, stats)


def _finish_crossbar(H, cb: Crossbar, cfg: RunConfig, stats: dict) -> PipelineResult:
    cert = crossbar_certificate(cb, cfg.to_json(), stats)
    rep = validate_certificate(cert, H)
    if not rep.ok:
        raise PipelineError("validate", f"crossbar rejected: {rep.violations}")
    return PipelineResult(cert, stats)
