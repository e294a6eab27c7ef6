"""Acceptance experiments, grouped into named suites.

Each criterion function returns a :class:`CriterionResult` whose ``detail``
is JSON-ready. Seeds are pinned through :func:`weldlab.rng.child_seed` so a
suite run is reproducible from its root seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.stats import linregress

from . import adversary as adv
from .advice import ConstantAdvice, RandomAdvice, parity_advice
from .analysis import (Coloring, exact_distance, reduced_graph,
                       sibling_distance, structural_census, two_color)
from .generators import InstanceSpec, Variant, build_instance
from .marker import AdviceMap
from .qwalk import cross_check, sweep, walk_cost
from .rng import child_seed
from .tester import TestContext, TesterConfig, final_test


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.id}: {self.name} ({self.seconds:.1f}s)"


def _timed(fn):
    def run(*args, **kwargs) -> CriterionResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------- completeness

@_timed
def perfect_completeness(seed: int = 0, ks=(2, 3, 4, 5), seeds: int = 20, eps: float = 0.1) -> CriterionResult:
    """final_test with marker advice accepts every G1 instance."""
    runs, rejects = [], []
    for k in ks:
        for s in range(seeds):
            spec = InstanceSpec(k, Variant.G1, seed=child_seed(seed, "completeness", k, s))
            inst = build_instance(spec)
            advice = AdviceMap(inst.oracle, k, seed=spec.seed)
            v = final_test(TestContext(inst.oracle, advice, TesterConfig(k, eps=eps), seed=spec.seed))
            runs.append(v.accept)
            if not v.accept:
                rejects.append({"k": k, "seed": s, "reason": v.reason.value})
    return CriterionResult(1, "perfect completeness", all(runs),
                           detail={"runs": len(runs), "accepted": sum(runs), "rejects": rejects})


@_timed
def marker_exactness(seed: int = 0, ks=(2, 3, 4, 5), seeds: int = 10) -> CriterionResult:
    """classify_vertex agrees with the generator's weld flags on every vertex."""
    checked = mismatches = 0
    worst = []
    for k in ks:
        for s in range(seeds):
            spec = InstanceSpec(k, Variant.G1, seed=child_seed(seed, "marker", k, s))
            inst = build_instance(spec)
            o = inst.oracle
            amap = AdviceMap(o, k, seed=spec.seed)
            labels = o.label_of
            truth = inst.is_weld
            for v in range(o.vertex_count):
                if amap.mark(int(labels[v])) != int(truth[v]):
                    mismatches += 1
                    if len(worst) < 10:
                        worst.append({"k": k, "seed": s, "vertex": v})
            checked += o.vertex_count
    return CriterionResult(2, "quantum marker exactness", mismatches == 0,
                           detail={"vertices": checked, "mismatches": mismatches, "examples": worst})


SOUNDNESS_ADVICE = ("zero", "one", "random", "parity")


@_timed
def soundness(seed: int = 0, ks=(3, 4), seeds: int = 5, eps: float = 0.1) -> CriterionResult:
    """G2 instances are rejected under each adversarial advice family."""
    rows, ok = [], True
    for k in ks:
        for s in range(seeds):
            spec = InstanceSpec(k, Variant.G2, seed=child_seed(seed, "soundness", k, s))
            inst = build_instance(spec)
            sources = {"zero": ConstantAdvice(0), "one": ConstantAdvice(1),
                       "random": RandomAdvice(spec.seed), "parity": parity_advice(inst)}
            for name in SOUNDNESS_ADVICE:
                v = final_test(TestContext(inst.oracle, sources[name], TesterConfig(k, eps=eps), seed=spec.seed))
                ok &= not v.accept
                rows.append({"k": k, "seed": s, "advice": name, "accept": v.accept,
                             "reason": v.reason.value if v.reason else None})
    return CriterionResult(0, "soundness on G2", ok, detail={"runs": rows})


# ------------------------------------------------------------------------ walk

@_timed
def walk_validation(seed: int = 0, k_cross=range(2, 9), k_sweep=range(2, 13), points: int = 100,
                    tol: float = 1e-9) -> CriterionResult:
    """Column-space and full-graph amplitudes agree; p*(k) >= 1/(2k)."""
    cross = {}
    for k in k_cross:
        times = np.linspace(0.0, 4.0 * k, points)
        cross[k] = cross_check(k, times, np.random.default_rng(child_seed(seed, "walk", k)))
    table = []
    for k in k_sweep:
        s = sweep(k)
        table.append({"k": k, "p_star": s.p_star, "t_argmax": s.t_argmax, "t_half": s.t_half,
                      "p_half": s.p_half, "floor": 1 / (2 * k), "walk_cost": walk_cost(k)})
    passed = max(cross.values()) <= tol and all(r["p_star"] >= r["floor"] for r in table)
    return CriterionResult(3, "walk cross-validation", passed,
                           detail={"max_amplitude_gap": max(cross.values()),
                                   "gap_by_k": {str(k): v for k, v in cross.items()}, "p_star": table})


@_timed
def cost_scaling(seed: int = 0, ks=range(2, 11), samples: int = 3) -> CriterionResult:
    """Log-log fit of modeled quantum queries per weld marking against k."""
    means = []
    for k in ks:
        spec = InstanceSpec(k, Variant.G1, seed=child_seed(seed, "cost", k))
        inst = build_instance(spec)
        o = inst.oracle
        rng = np.random.default_rng(spec.seed)
        welds = rng.choice(np.flatnonzero(inst.is_weld), samples, replace=False)
        amap = AdviceMap(o, k, seed=spec.seed)
        costs = [amap.classify(int(o.label_of[v])).quantum_queries for v in welds]
        means.append(float(np.mean(costs)))
    fit = linregress(np.log(list(ks)), np.log(means))
    passed = fit.slope <= 4 and fit.rvalue ** 2 >= 0.95
    return CriterionResult(4, "quantum cost polynomial", passed,
                           detail={"k": list(ks), "modeled_quantum_queries": means,
                                   "slope": fit.slope, "r2": fit.rvalue ** 2})


# -------------------------------------------------------------------- hardness

def game_grid(ks, seed: int = 0, trials: int = 2000, strategies=adv.REFERENCE_STRATEGIES, games="ABCD"):
    rows = []
    for k in ks:
        for t in sorted({int(2 ** (k / 8)), int(2 ** (k / 4))}):
            for g in games:
                for name in strategies:
                    r = adv.run_game(adv.GameSpec(g, k, t, trials), name, child_seed(seed, "games"))
                    lo, hi = r.interval
                    rows.append({"game": g, "k": k, "t": t, "strategy": name, "trials": trials,
                                 "wins": r.wins, "win_prob": r.win_prob, "stderr": r.stderr,
                                 "wilson_low": lo, "wilson_high": hi,
                                 "ratio": hi / adv.game_bound(k, t)})
    return rows


C_MAX = 2.5


@_timed
def classical_hardness(seed: int = 0, ks=range(8, 15), trials: int = 2000, limit: float = 0.1,
                       strategies=adv.REFERENCE_STRATEGIES) -> CriterionResult:
    """Distinguishing advantage at t = 2^{k/8} and the game win bound."""
    dist = []
    for k in ks:
        t = int(2 ** (k / 8))
        for name in strategies:
            r = adv.distinguishing_experiment(k, t, name, trials, child_seed(seed, "distinguish"),
                                              diagnostics=False)
            dist.append({"k": k, "t": t, "strategy": name, "trials": trials,
                         "advantage": r.advantage, "stderr": r.stderr, "upper": r.advantage_upper,
                         "events": {v: dict(c) for v, c in r.events.items()}})
    games = game_grid(ks, seed, trials, strategies)
    c_fit = max(row["ratio"] for row in games)
    passed = all(d["upper"] <= limit for d in dist) and c_fit <= C_MAX
    return CriterionResult(5, "classical hardness scaling", passed,
                           detail={"distinguishing": dist, "games": games, "c_fit": c_fit, "c_max": C_MAX})


@_timed
def simulator_fidelity(seed: int = 0, k: int = 10, t: int | None = None, trials: int = 5000) -> CriterionResult:
    """Per-step reveal histograms of the simulator match real G1/G2 runs."""
    t = int(2 ** (k / 4)) if t is None else t
    rep = adv.simulator_fidelity(k, t, trials, child_seed(seed, "fidelity"))
    return CriterionResult(6, "simulator fidelity", rep.passed,
                           detail={"k": k, "t": t, "trials": trials, "kept": rep.kept, "p_values": rep.p_values})


# -------------------------------------------------------------------- distance

@_timed
def distance_side(seed: int = 0, ks=range(2, 9), seeds: int = 20, exact_seeds: int = 5) -> CriterionResult:
    """G1 reduces to bipartite graphs, G2 to non-bipartite ones, and every
    reduced G2 component at k=3 needs at least one edge removed."""
    g1_bad, g2_bip = [], {}
    for k in ks:
        for s in range(seeds):
            sd = child_seed(seed, "distance", k, s)
            if not isinstance(two_color(build_instance(InstanceSpec(k, Variant.G1, seed=sd)).graph), Coloring):
                g1_bad.append({"k": k, "seed": s})
            if k >= 4:
                col = two_color(build_instance(InstanceSpec(k, Variant.G2, seed=sd)).graph)
                g2_bip[k] = g2_bip.get(k, 0) + isinstance(col, Coloring)
    floors, short = [], 0
    for s in range(exact_seeds):
        g = build_instance(InstanceSpec(3, Variant.G2, seed=child_seed(seed, "exact", s))).graph
        A = reduced_graph(g)
        ncomp, comp = connected_components(A, directed=False)
        for c in range(ncomp):
            verts = np.flatnonzero(comp == c)
            sub = A[verts][:, verts]
            d = exact_distance(sub)
            floors.append(d)
            short += d < max(1, math.ceil(sub.nnz // 2 / 96))
    passed = (not g1_bad and all(v == 0 for k, v in g2_bip.items() if k >= 5) and min(floors) >= 1
              and not short)
    return CriterionResult(7, "distance side", passed,
                           detail={"g1_non_bipartite": g1_bad,
                                   "g2_bipartite_runs": {str(k): v for k, v in g2_bip.items()},
                                   "k3_components": len(floors), "k3_min_exact": min(floors),
                                   "k3_below_floor": short,
                                   "k3_exact_histogram": {str(x): floors.count(x) for x in sorted(set(floors))}})


@_timed
def census(seed: int = 0, ks=range(2, 11), seeds: int = 10) -> CriterionResult:
    """Closed-form identities on generated instances; even seeds G1, odd seeds G2."""
    failures = []
    for k in ks:
        for s in range(seeds):
            variant = Variant.G1 if s % 2 == 0 else Variant.G2
            inst = build_instance(InstanceSpec(k, variant, seed=child_seed(seed, "census", k, s)))
            rep = structural_census(inst)
            if not rep.passed:
                failures.append({"k": k, "seed": s, "variant": variant.value, "failed": rep.failures})
            del inst
    sib = sibling_distance(3, child_seed(seed, "sibling"))
    return CriterionResult(8, "structural census", not failures,
                           detail={"failures": failures, "sibling_k3_differing_edges": sib.differing_edges,
                                   "sibling_k3_ratio": sib.ratio})


CRITERIA = {1: perfect_completeness, 2: marker_exactness, 3: walk_validation, 4: cost_scaling,
            5: classical_hardness, 6: simulator_fidelity, 7: distance_side, 8: census}

SUITES = {
    "completeness": (perfect_completeness, marker_exactness),
    "soundness": (soundness,),
    "walk": (walk_validation, cost_scaling),
    "hardness": (classical_hardness, simulator_fidelity),
    "distance": (distance_side, census),
}


def run_suite(name: str, seed: int = 0) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    results = [fn(seed=seed) for fn in SUITES[name]]
    return {"suite": name, "seed": seed, "passed": all(r.passed for r in results),
            "criteria": [asdict(r) for r in results]}
