"""Catalog of target graphs and fusion plans.

Linear clusters grow by three-qubit entangling gates that bridge existing
chains; complete-graph gates collapse to stars under one complementation at
the hub.  The fig4b/fig4c/fig5 plans extrapolate the overlapping-clique
pattern to 2D and 3D lattice targets; their step patterns are reconstructions
by analogy, so their outcomes are reported rather than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Cz, Entangle, FusionPlan, Graph

# ---------------------------------------------------------------------------
# target graph families


def linear_cluster(n: int) -> Graph:
    """Path graph 0-1-...-(n-1)."""
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(n: int, hub: int = 0) -> Graph:
    return Graph.from_edges(n, [(hub, v) for v in range(n) if v != hub])


def box() -> Graph:
    """4-cycle 0-1-2-3-0."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def h_shape() -> Graph:
    """Double star: hubs 1 and 4 with two leaves each, joined through 0."""
    return Graph.from_edges(7, [(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (4, 6)])


def grid(rows: int, cols: int) -> Graph:
    """Square-lattice cluster, row-major vertex labels."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def grid3d(nx: int, ny: int, nz: int) -> Graph:
    """Cubic-lattice cluster, x fastest."""
    def vid(x, y, z):
        return (z * ny + y) * nx + x

    edges = []
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if x + 1 < nx:
                    edges.append((vid(x, y, z), vid(x + 1, y, z)))
                if y + 1 < ny:
                    edges.append((vid(x, y, z), vid(x, y + 1, z)))
                if z + 1 < nz:
                    edges.append((vid(x, y, z), vid(x, y, z + 1)))
    return Graph.from_edges(nx * ny * nz, edges)


# ---------------------------------------------------------------------------
# fusion plans


def linear_cluster_plan(n: int) -> FusionPlan:
    """Odd-length chain from (n-1)/2 three-qubit gates on overlapping triples."""
    if n < 3 or n % 2 == 0:
        raise ValueError("chain plans are defined for odd n >= 3")
    steps = tuple(Entangle((k, k + 1, k + 2)) for k in range(0, n - 2, 2))
    return FusionPlan(n, steps, linear_cluster(n),
                      description=f"{(n - 1) // 2} three-qubit gates fused into a "
                                  f"{n}-qubit chain")


def _plans() -> dict[str, FusionPlan]:
    plans = {
        "fig2a": FusionPlan(
            3, (Entangle((0, 1, 2)),), linear_cluster(3),
            description="three-qubit entangling gate; triangle, equivalent to "
                        "the 3-chain",
        ),
        "fig2b": FusionPlan(
            7,
            (Cz(0, 1), Cz(1, 2), Cz(4, 5), Cz(5, 6), Entangle((2, 3, 4))),
            linear_cluster(7),
            description="two 3-chains bridged through a fresh qubit into the "
                        "7-chain",
        ),
        "fig3a": FusionPlan(
            4, (Entangle((0, 1, 2, 3)),), star(4),
            description="four-qubit entangling gate; equivalent to the "
                        "4-star (GHZ class)",
        ),
        "fig3b": FusionPlan(
            7, (Entangle((0, 1, 2, 3)), Entangle((0, 4, 5, 6))), h_shape(),
            description="two four-qubit gates sharing one qubit; double-star "
                        "H shape",
        ),
        "fig3c": FusionPlan(
            4, (Entangle((0, 1, 2, 3)), Cz(0, 2)), box(),
            description="four-qubit gate plus one controlled-Z across a "
                        "diagonal; box graph",
        ),
        "fig4a": FusionPlan(
            5, (Entangle((0, 1, 2, 3, 4)),), star(5),
            description="five-qubit entangling gate; equivalent to the "
                        "5-star (GHZ class)",
        ),
        "grid2x2": FusionPlan(
            4, (Entangle((0, 1, 2, 3)), Cz(1, 2)), grid(2, 2),
            description="four-qubit gate plus one controlled-Z; 2x2 lattice",
        ),
        "linear7": linear_cluster_plan(7),
        "fig4b": FusionPlan(
            8, (Entangle((0, 1, 2, 3, 4)), Entangle((3, 4, 5, 6, 7))),
            grid(2, 4),
            description="two five-qubit gates sharing two qubits, aimed at "
                        "the 2x4 lattice",
            reconstructed=True,
        ),
        "fig4c": FusionPlan(
            9, (Entangle((0, 1, 2, 3, 4)), Entangle((4, 5, 6, 7, 8))),
            grid(3, 3),
            description="two five-qubit gates sharing one qubit, aimed at "
                        "the 3x3 lattice",
            reconstructed=True,
        ),
        "fig5": FusionPlan(
            12,
            (Entangle((0, 1, 2, 3, 4, 5, 6)), Entangle((5, 6, 7, 8, 9, 10, 11))),
            grid3d(2, 2, 3),
            description="two seven-qubit gates sharing two qubits, aimed at "
                        "the 2x2x3 lattice",
            reconstructed=True,
        ),
    }
    return plans


def catalog_graphs() -> dict[str, Graph]:
    return {
        "path3": linear_cluster(3),
        "path5": linear_cluster(5),
        "path7": linear_cluster(7),
        "star4": star(4),
        "star5": star(5),
        "star6": star(6),
        "box4": box(),
        "h7": h_shape(),
        "grid2x2": grid(2, 2),
        "grid2x3": grid(2, 3),
        "grid3x3": grid(3, 3),
        "cube": grid3d(2, 2, 2),
        "grid2x2x3": grid3d(2, 2, 3),
    }


def catalog_plans() -> dict[str, FusionPlan]:
    return _plans()


@dataclass(frozen=True)
class RecipeEntry:
    name: str
    kind: str  # "graph" | "plan"
    n_qubits: int
    description: str
    reconstructed: bool = False


def recipes() -> list[RecipeEntry]:
    out = [
        RecipeEntry(name, "graph", g.n, f"{len(g.edges())} edges")
        for name, g in catalog_graphs().items()
    ]
    out += [
        RecipeEntry(name, "plan", p.n_qubits, p.description, p.reconstructed)
        for name, p in catalog_plans().items()
    ]
    return out
