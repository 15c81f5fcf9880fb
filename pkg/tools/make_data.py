"""Regenerate the problem files in src/dykstra_msf/data.

Random instances come from fixed seeds, and the polyhedral ones get an
oracle solution written next to them, so the output is reproducible.
"""
import json
from pathlib import Path

import numpy as np

from dykstra_msf import oracle
from dykstra_msf.problems import bundled_dir, dump_problem
from dykstra_msf.random_instances import random_feasible_anchor_instance, random_polyhedral_instance

POLY_SEEDS = (11, 12, 13)
FEASIBLE_SEED = 21


def main(out=None):
    out = Path(out) if out else bundled_dir()
    out.mkdir(parents=True, exist_ok=True)
    for p in (1.5, 2.0):
        dump_problem(oracle.tight_instance(p), out / f"tight_p{p:g}.json")
    dump_problem(oracle.nonlinear_instance(), out / "nonlinear.json")
    dump_problem(random_feasible_anchor_instance(np.random.default_rng(FEASIBLE_SEED)), out / "feasible_anchor.json")
    for k, seed in enumerate(POLY_SEEDS, start=1):
        inst = random_polyhedral_instance(np.random.default_rng(seed))
        sol = oracle.solve_qp_activeset(oracle.PolyhedralQP.from_instance(inst))
        dump_problem(inst, out / f"polyhedral_{k}.json")
        side = {
            "x_star": sol.x.tolist(),
            "d_star": -0.5 * float(np.sum((sol.x - inst.anchor) ** 2)),
            "active_rows": list(sol.active),
        }
        (out / f"polyhedral_{k}.solution.json").write_text(json.dumps(side) + "\n")


if __name__ == "__main__":
    main()
