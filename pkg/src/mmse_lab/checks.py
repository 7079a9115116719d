"""Invariant sweep behind ``mmse-lab check all``."""

from __future__ import annotations

import numpy as np

from . import analysis, calculus, infotheory, oracle
from .corpus import continuous_corpus, default_corpus, unit_power_corpus
from .errors import MmseLabError
from .mmse import mmse, mmse_curve

CORPORA = {"default": default_corpus, "unit_power": unit_power_corpus,
           "continuous": continuous_corpus}


def _record(results, name, check, fn):
    try:
        detail = fn()
        ok = bool(detail.pop("ok", True)) if isinstance(detail, dict) else True
    except MmseLabError as exc:
        ok, detail = False, {"error": str(exc)}
    results.append({"dist": name, "check": check, "passed": ok, "detail": detail})


def run_checks(corpus: str = "default", seed: int = 0, mc_samples: int = 20_000) -> dict:
    dists = CORPORA[corpus]()
    grid = np.geomspace(1e-2, 1e2, 25)
    results = []
    for name, d in dists.items():
        def curve():
            mmse_curve(d, grid).check_invariants()
            return {"points": len(grid)}

        def derivs():
            gaps = {o: calculus.derivative_report(d, 1.0, o).rel_gap for o in (1, 2, 3)}
            return {"rel_gaps": gaps, "ok": max(gaps.values()) < 1e-4}

        def immse():
            direct = infotheory.mutual_information_direct(d, 2.0)
            integral = infotheory.mutual_information(d, 2.0)
            return {"integral": integral, "direct": direct,
                    "ok": abs(direct - integral) < 1e-7 * max(1.0, direct)}

        def dominance():
            gap = analysis.check_gaussian_dominance(d, grid)
            return {"max_excess": gap, "ok": gap <= 1e-10}

        def monte_carlo():
            est = oracle.mc_mmse(d, 1.0, mc_samples, seed)
            value = mmse(d, 1.0)
            return {"z": est.z_score(value), "ok": est.covers(value, 4.0)}

        for check, fn in (("curve", curve), ("derivatives", derivs), ("i_mmse", immse),
                          ("gaussian_dominance", dominance), ("monte_carlo", monte_carlo)):
            _record(results, name, check, fn)
        _record(results, name, "single_crossing",
                lambda: {"classification": analysis.single_crossing(
                    d, 1.0, analysis.GridConfig(n=60)).classification})
    return {"corpus": corpus, "passed": all(r["passed"] for r in results),
            "n_checks": len(results), "results": results}
