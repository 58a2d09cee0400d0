"""End-to-end pipeline: distances, domain, pairings, candidates, filtering,
completion, certificate; each stage writes a JSON artifact and the run ends
with rendered figures.  Exit codes: 0 certificate found, 2 search space
exhausted without one, 1 error.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor

from . import render
from .config import PipelineConfig
from .domain import (
    FundamentalDomain,
    SidePairing,
    build_domain,
    enumerate_pairings,
    find_pairing,
    pairing_json,
)
from .geom import CoincidentCurves, Isometry, dist
from .group import (
    GroupPresentation,
    ReductionStalled,
    group_from_solution,
    second_packing_certificate,
)
from .search import (
    Candidate,
    bananas,
    candidates,
    compatibility_matrix,
    complete_pairing,
    edge_coverage,
    verify_topology,
)
from .tess import DistanceSet, admissible_distances, triangle_generators

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXHAUSTED = 2


class StageError(RuntimeError):
    def __init__(self, stage: str, reason: str):
        super().__init__(f"[{stage}] {reason}")
        self.stage = stage
        self.reason = reason


def _cpx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _iso_json(m: Isometry) -> dict:
    mat = [m.a, m.b, m.b.conjugate(), m.a.conjugate()]
    return {"matrix": [_cpx(v) for v in mat], "reversing": m.reversing}


def _iso_from_json(d: dict) -> Isometry:
    (ar, ai), (br, bi) = d["matrix"][0], d["matrix"][1]
    return Isometry(complex(ar, ai), complex(br, bi), bool(d["reversing"]))


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _artifact(cfg: PipelineConfig, stage: str, data: dict) -> dict:
    return {
        "stage": stage,
        "config_hash": cfg.config_hash(),
        "tolerances": {
            "match_tol": cfg.match_tol,
            "dedup_tol": cfg.dedup_tol,
            "candidate_dedup": cfg.candidate_dedup,
            "angle_tol": cfg.angle_tol,
        },
        "depth": cfg.depth,
        **data,
    }


def stage_distances(cfg: PipelineConfig, out: str | None = None) -> DistanceSet:
    dset = admissible_distances(cfg.n, cfg.depth, cfg.match_tol, cfg.dedup_tol)
    if out:
        write_json(
            os.path.join(out, "distances.json"),
            _artifact(cfg, "distances", {"values": list(dset.values)}),
        )
    return dset


def stage_domain(cfg: PipelineConfig, out: str | None = None) -> FundamentalDomain:
    F = build_domain(cfg.n, cfg.attachments, frame=cfg.frame)
    if out:
        data = {
            "n": F.n,
            "k": F.k,
            "genus": cfg.genus,
            "placements": [_iso_json(p) for p in F.placements],
            "internal_edges": [
                [[p + 1, e], [q + 1, f]] for (p, e), (q, f) in F.internal_edges
            ],
            "boundary_edges": [
                {
                    "poly": e.poly + 1,
                    "edge": e.edge,
                    "endpoints": [_cpx(e.endpoints[0]), _cpx(e.endpoints[1])],
                }
                for e in F.boundary
            ],
        }
        write_json(os.path.join(out, "domain.json"), _artifact(cfg, "domain", data))
        with open(os.path.join(out, "domain.svg"), "w", encoding="utf-8") as fh:
            fh.write(render.render_svg(render.scene_base(F)))
    return F


def stage_pairings(
    cfg: PipelineConfig, F: FundamentalDomain, out: str | None = None
) -> list[SidePairing]:
    L = enumerate_pairings(F)
    if out:
        write_json(
            os.path.join(out, "pairings.json"),
            _artifact(
                cfg,
                "pairings",
                {
                    "count": len(L),
                    "boundary_edges": len(F.boundary),
                    "pairings": [pairing_json(p) for p in L],
                },
            ),
        )
    return L


def _candidate_json(c: Candidate) -> dict:
    p1, p2 = c.seed_pair
    return {
        "point": _cpx(c.point),
        "seed_distances": [c.seed_distances[0], c.seed_distances[1]],
        "seeds": [list(p1.record), list(p2.record)],
    }


def stage_candidates(
    cfg: PipelineConfig,
    F: FundamentalDomain,
    dset: DistanceSet,
    p1: SidePairing,
    p2: SidePairing,
    out: str | None = None,
) -> list[Candidate]:
    C = candidates(p1, p2, dset, F, dedup=cfg.candidate_dedup)
    if out:
        write_json(
            os.path.join(out, "candidates.json"),
            _artifact(
                cfg,
                "candidates",
                {
                    "seed_pair": [list(p1.record), list(p2.record)],
                    "count": len(C),
                    "candidates": [_candidate_json(c) for c in C],
                },
            ),
        )
        fam1 = bananas(p1, dset)
        fam2 = bananas(p2, dset)
        with open(os.path.join(out, "bananas.svg"), "w", encoding="utf-8") as fh:
            fh.write(render.render_svg(render.scene_bananas(F, p1, p2, fam1, fam2)))
        with open(os.path.join(out, "candidates.svg"), "w", encoding="utf-8") as fh:
            fh.write(
                render.render_svg(render.scene_candidates(F, [c.point for c in C]))
            )
    return C


def filter_candidates(
    cfg: PipelineConfig,
    F: FundamentalDomain,
    L: list[SidePairing],
    dset: DistanceSet,
    C: list[Candidate],
) -> list[dict]:
    """Per-candidate compatible pairings and edge coverage.

    Items are independent; with workers > 1 they are assembled by a thread
    pool and merged back in candidate order.
    """
    matrix = compatibility_matrix([c.point for c in C], L, dset)
    centers = [F.center(i) for i in range(F.k)]

    def one(i: int) -> dict:
        c = C[i]
        Lc = [p for p, ok in zip(L, matrix[i]) if ok]
        cov = edge_coverage(Lc, F)
        uncovered = sorted(k for k, v in cov.items() if not v)
        return {
            "candidate": c,
            "Lc": Lc,
            "covered": not uncovered,
            "uncovered": uncovered,
            "is_center": any(abs(c.point - z) < 1e-6 for z in centers),
        }

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(one, range(len(C))))
    return [one(i) for i in range(len(C))]


def _filtering_json(items: list[dict]) -> list[dict]:
    out = []
    for it in items:
        out.append(
            {
                "point": _cpx(it["candidate"].point),
                "compatible_count": len(it["Lc"]),
                "covered": it["covered"],
                "uncovered": [[p + 1, e] for p, e in it["uncovered"]],
                "is_center": it["is_center"],
            }
        )
    return out


def _solution_json(sol, topo) -> dict:
    return {
        "identifications": [
            {
                "type": "or-hyperbolic" if rev else "hyperbolic",
                "a": [a[0] + 1, a[1]],
                "b": [b[0] + 1, b[1]],
            }
            for rev, a, b in sorted(sol.identifications)
        ],
        "pairings": [pairing_json(p) for p in sol.pairings],
        "reversing_count": sol.reversing_count,
        "vertex_cycles": [
            {"vertices": [_cpx(v) for v in verts], "angle_sum": total}
            for verts, total in sol.vertex_cycles
        ],
        "topology": topo,
    }


def _membership_json(idx: int, label: str, res) -> dict:
    return {
        "generator": idx,
        "label": label,
        "member": res.member,
        "word": list(res.word),
        "residual": res.residual,
        "strategy": res.strategy,
    }


def certificate_json(
    cfg: PipelineConfig, G: GroupPresentation, cert: dict, sol, topo
) -> dict:
    return _artifact(
        cfg,
        "certificate",
        {
            "candidate": _cpx(cert["candidate"]),
            "o_prime": _cpx(cert["o_prime"]),
            "midpoint": _cpx(cert["midpoint"]),
            "tau": _iso_json(cert["tau"]),
            "swap_residual": cert["swap_residual"],
            "residual_tol": 1e-6,
            "swap_tol": 1e-8,
            "basepoint": _cpx(G.basepoint),
            "generators": [
                {"label": lbl, **_iso_json(g)}
                for lbl, g in zip(G.labels, G.generators)
            ],
            "memberships": [
                _membership_json(i, G.labels[i], r)
                for i, r in enumerate(cert["memberships"])
            ],
            "normalizes": cert["normalizes"],
            "stalled": cert["stalled"],
            "passed": cert["passed"],
            "solution": _solution_json(sol, topo),
        },
    )


def _resolve_seeds(cfg: PipelineConfig, L: list[SidePairing]):
    r1, r2 = cfg.seed_pairs
    return find_pairing(L, *r1), find_pairing(L, *r2)


def _seed_pair_iter(cfg: PipelineConfig, L: list[SidePairing]):
    if cfg.seed_pairs is not None:
        yield _resolve_seeds(cfg, L)
        return
    for i, j in itertools.combinations(range(len(L)), 2):
        yield L[i], L[j]


def _staged(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc


def run_pipeline(cfg: PipelineConfig, progress=None, certify: bool = True) -> int:
    """Execute the full search; returns the process exit code.

    With ``certify=False`` the run stops after side-pairing completion and
    succeeds as soon as some candidate admits a full solution.
    """
    cfg.validate()
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    log = progress or (lambda msg: None)

    dset = _staged("distances", stage_distances, cfg, out)
    log(f"distances: {len(dset.values)} values at depth {cfg.depth}")
    F = _staged("domain", stage_domain, cfg, out)
    log(f"domain: {F.k} tiles, {len(F.boundary)} boundary edges")
    L = _staged("pairings", stage_pairings, cfg, F, out)
    log(f"pairings: {len(L)} axial entries")
    gens = triangle_generators(cfg.n)

    if cfg.seed_pairs is not None:
        seed_iter = [_staged("candidates", _resolve_seeds, cfg, L)]
    else:
        seed_iter = _seed_pair_iter(cfg, L)
    for p1, p2 in seed_iter:
        try:
            C = stage_candidates(cfg, F, dset, p1, p2, out)
        except (CoincidentCurves, ValueError) as exc:
            if cfg.seed_pairs is not None:
                raise StageError("candidates", f"{type(exc).__name__}: {exc}") from exc
            continue  # degenerate auto-mode seed pair, move on
        log(f"seed {p1.record} x {p2.record}: {len(C)} candidates")
        code = _staged(
            "search",
            _process_seed_pair,
            cfg, F, L, dset, gens, p1, p2, C, out, log, certify,
        )
        if code is not None:
            return code
        if cfg.seed_pairs is not None:
            break
    return EXIT_EXHAUSTED


def _process_seed_pair(cfg, F, L, dset, gens, p1, p2, C, out, log, certify):
    """Filter, complete and certify the candidates of one seed pair.

    Returns an exit code when the run can stop, None to try the next pair.
    """
    items = filter_candidates(cfg, F, L, dset, C)
    write_json(
        os.path.join(out, "filtering.json"),
        _artifact(
            cfg,
            "filtering",
            {
                "seed_pair": [list(p1.record), list(p2.record)],
                "candidates": _filtering_json(items),
            },
        ),
    )
    solutions_log: list[dict] = []
    result = None
    first_solution = None
    for it in items:
        if not it["covered"] or it["is_center"]:
            continue
        sols = complete_pairing(it["Lc"], F, limit=cfg.limit)
        entry = {"point": _cpx(it["candidate"].point), "solutions": []}
        for sol in sols:
            topo = verify_topology(sol, F)
            entry["solutions"].append(_solution_json(sol, topo))
        solutions_log.append(entry)
        if sols and first_solution is None:
            first_solution = (it, sols[0])
        if not certify or result is not None:
            continue
        for sol in sols:
            G = group_from_solution(sol, F)
            try:
                cert = second_packing_certificate(it["candidate"].point, G, gens)
            except (ReductionStalled, ValueError):
                continue
            if cert["passed"]:
                topo = verify_topology(sol, F)
                result = (it, sol, topo, G, cert)
                break
    write_json(
        os.path.join(out, "solutions.json"),
        _artifact(
            cfg,
            "solutions",
            {
                "seed_pair": [list(p1.record), list(p2.record)],
                "limit": cfg.limit,
                "candidates": solutions_log,
            },
        ),
    )
    if not certify and first_solution is not None:
        it, sol = first_solution
        log(f"solutions found at {it['candidate'].point:.6f}")
        _render_final(out, F, C, it, sol, None)
        return EXIT_OK
    if result is not None:
        it, sol, topo, G, cert = result
        write_json(
            os.path.join(out, "certificate.json"),
            certificate_json(cfg, G, cert, sol, topo),
        )
        log(
            f"certificate passed at {it['candidate'].point:.6f} "
            f"(genus {topo['genus']}, chi {topo['euler_characteristic']})"
        )
        _render_final(out, F, C, it, sol, cert)
        return EXIT_OK
    return None


def _render_final(out, F, C, it, sol, cert):
    star = it["candidate"].point
    with open(os.path.join(out, "candidates.svg"), "w", encoding="utf-8") as fh:
        fh.write(
            render.render_svg(
                render.scene_candidates(F, [c.point for c in C], star=star)
            )
        )
    with open(os.path.join(out, "solution.svg"), "w", encoding="utf-8") as fh:
        fh.write(render.render_svg(render.scene_solution(F, list(sol.pairings))))
    if cert is None:
        return
    with open(os.path.join(out, "certificate.svg"), "w", encoding="utf-8") as fh:
        fh.write(
            render.render_svg(
                render.scene_certificate(
                    F, cert["candidate"], cert["o_prime"], cert["midpoint"]
                )
            )
        )


def verify_certificate_file(path: str, word_tol: float = 1e-7) -> tuple[bool, list[str]]:
    """Re-check a certificate artifact without re-running the search.

    Verifies unit determinants, word soundness (each membership word composes
    to the conjugated generator), residuals against stored values, the
    normalizer verdict, and the swap of the candidate with O'.
    """
    with open(path, "r", encoding="utf-8") as fh:
        cert = json.load(fh)
    problems: list[str] = []
    gens = [_iso_from_json(g) for g in cert["generators"]]
    tau = _iso_from_json(cert["tau"])
    P = complex(*cert["candidate"])
    o_prime = complex(*cert["o_prime"])
    if abs(dist(tau(P), o_prime) - cert["swap_residual"]) > 1e-9:
        problems.append("stored swap residual does not match recomputation")
    if cert["swap_residual"] > cert["swap_tol"]:
        problems.append("tau does not swap the candidate with O'")
    if len(cert["memberships"]) != len(gens):
        problems.append("certificate does not cover every generator")
    tau_inv = tau.inverse()
    for m in cert["memberships"]:
        g = gens[m["generator"]]
        h = tau * g * tau_inv
        if not m["member"]:
            problems.append(f"membership failed for generator {m['generator']}")
            continue
        word = Isometry.identity()
        for idx in m["word"]:
            word = word * gens[idx]
        res = word.matrix_dist(h)
        if res > word_tol:
            problems.append(
                f"word for generator {m['generator']} misses by {res:.2e}"
            )
    if not cert["passed"]:
        problems.append("certificate is marked failed")
    return (not problems), problems
