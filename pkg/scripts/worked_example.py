"""Walk through the five-vertex example: static bounds, latest positions, WBH trace."""

from branchdual.bandwidth import (PartialLayout, alpha_bound, bandwidth, bandwidth_domain,
                                  ell_bounds, five_vertex_graph, gamma_bound, layered_order,
                                  relaxation_value)
from branchdual.dual import GreedySelector, LayeredSelector, run_worst_bound


def main() -> None:
    g = five_vertex_graph()
    name = dict(enumerate(g.labels))
    print("edges:", ", ".join(f"{name[u]}-{name[v]}" for u, v in g.edges))
    for arr in ([0, 1, 2, 3, 4], [0, 2, 1, 4, 3]):
        print("bandwidth of", "".join(name[v] for v in arr), "=", bandwidth(g, arr))
    print("alpha =", alpha_bound(g), " gamma =", gamma_bound(g))
    layout = PartialLayout((2,), ())
    for phi in (1, 2):
        ell = ell_bounds(g, layout, phi)
        shown = "infeasible" if ell is None else {name[v]: p for v, p in enumerate(ell)}
        print(f"c first, phi={phi}: latest positions {shown}")
    print("relaxation with c first:", relaxation_value(g, layout))
    domain, oracle = bandwidth_domain(g)
    for label, selector in (("layered", LayeredSelector(layered_order(g.n))),
                            ("greedy", GreedySelector(domain, oracle))):
        cert = run_worst_bound(domain, oracle, selector)
        print(f"WBH {label}: bound {cert.proved_bound} ({cert.status}) after "
              f"{cert.expansions} expansions, trace {cert.trace}")


if __name__ == "__main__":
    main()
