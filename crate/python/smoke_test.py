"""Smoke test for the dynred Python extension.

Build and install first, for example:

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/dynred-*.whl
"""

import math

import dynred


def check_matching():
    inst = dynred.OuMvInstance.generate(6, density=0.3, seed=5)
    run = dynred.solve_oumv_via_matching(inst)
    assert run["bits"] == dynred.oumv_oracle(inst), run
    n = inst.n
    for i, (size, bit) in enumerate(zip(run["sizes"], run["bits"])):
        assert size == 4 * n + 2 * i + int(bit)
    back = dynred.solve_oumv_via_matching(inst, decremental=True)
    assert back["bits"] == run["bits"][::-1]
    again = dynred.OuMvInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()


def check_flow():
    f = dynred.CnfFormula.parse("p cnf 2 2\n1 0\n-1 0\n")
    run = dynred.solve_sat_via_flow(f)
    assert run["satisfiable"] is False
    assert all(p["value"] == p["phase"] * run["big_n"] for p in run["phases"])
    g = dynred.CnfFormula.generate(8, 20, seed=3)
    assert dynred.solve_sat_via_flow(g, early_exit=True)["satisfiable"] == dynred.sat_oracle(g)


def check_diameter():
    inst = dynred.TcStarInstance.plant(4, 2, 2, (1, 2, 3), seed=7)
    assert inst.is_valid()
    assert (1, 2, 3) in dynred.tcstar_oracle(inst)
    assert dynred.solve_tcstar_static(inst)["answer"]
    assert dynred.solve_tcstar_static(inst, gamma=0.5)["answer"]
    assert dynred.solve_tcstar_incremental(inst)["answer"]
    run = dynred.solve_tcstar_node_addition(inst)
    assert run["answer"] and len(run["ledger"]["phases"]) == 4
    assert dynred.solve_tcstar_subdivided(inst, 2)["original_pair_diameter"] == 12
    h = dynred.build_h(inst)
    assert h.diameter() == 4
    alpha = dynred.solve_alpha()
    assert abs(alpha - (math.sqrt(5) - 1) / 2) < 1e-12


def check_engines():
    m = dynred.MatchingEngine()
    l0, l1 = m.add_node(True), m.add_node(True)
    r0, r1 = m.add_node(False), m.add_node(False)
    m.insert_edge(l0, r1)
    m.insert_edge(l1, r1)
    assert m.insert_edge(l0, r0) == 2 == m.oracle_size()
    try:
        m.insert_edge(l0, l1)
    except ValueError:
        pass
    else:
        raise AssertionError("same-side edge accepted")

    fl = dynred.FlowEngine()
    a = fl.add_node()
    fl.insert_edge(fl.source, a, 3)
    fl.insert_edge(a, fl.sink, 2)
    assert fl.value() == 2 == fl.oracle_value()

    g = dynred.DynGraph()
    for _ in range(3):
        g.insert_node()
    g.insert_edge(0, 1)
    g.insert_edge(1, 2)
    assert g.diameter() == 2
    g.rollback(1)
    assert g.diameter() is None
    assert g.counters()["insertions"] == 2
    assert dynred.DynGraph.from_log_text(g.to_log_text()).edges() == g.edges()


def check_guard():
    big = dynred.TcStarInstance.generate(17, seed=1)
    try:
        dynred.tcstar_oracle(big)
    except dynred.GuardError:
        pass
    else:
        raise AssertionError("guard not raised")


def main():
    check_matching()
    check_flow()
    check_diameter()
    check_engines()
    check_guard()
    assert abs(dynred.fit_exponent([(2, 4), (4, 16), (8, 64)]) - 2.0) < 1e-9
    print("dynred smoke test passed")


if __name__ == "__main__":
    main()
