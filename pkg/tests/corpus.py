"""The acceptance corpus: 53 seeded spaces, all with rational distances."""

from __future__ import annotations

from lfembed.generators import grid, random_graph, random_tree, uniform_points

#: operator configurations every corpus space is embedded with
MODES = (("identity", None), ("half", None), ("random", 11), ("random", 23), ("random", 37))


def corpus_specs() -> list:
    specs = []
    for dim in (1, 2):
        for radius in (1, 2, 3, 4):
            specs.append((f"grid-d{dim}-r{radius}", grid, (dim, radius)))
    for n, seeds in ((12, (1, 2)), (20, (14, 15)), (30, (3, 4, 5)), (45, (16, 17)), (60, (6, 7)), (80, (18,)),
                     (100, (8, 9)), (150, (10,))):
        for seed in seeds:
            # sparse enough to keep long geodesics, dense enough to stay near-connected
            specs.append((f"graph-n{n}-s{seed}", random_graph, (n, min(1.0, 3 / n), seed)))
    specs.append(("graph-n20-dense", random_graph, (20, 0.5, 12)))
    specs.append(("graph-n40-dense", random_graph, (40, 0.3, 13)))
    for n, seeds in ((8, (1, 2)), (12, (12, 13)), (25, (3, 4, 5)), (40, (14, 15)), (60, (6, 7)), (100, (8, 9)),
                     (150, (10, 11))):
        for seed in seeds:
            specs.append((f"tree-n{n}-s{seed}", random_tree, (n, seed)))
    for n, dim, norm, seeds in (
        (10, 1, "l1", (1, 2)),
        (15, 1, "l1", (11, 12)),
        (25, 2, "l1", (3, 4)),
        (50, 2, "l1", (5, 6)),
        (100, 2, "l1", (7,)),
        (40, 3, "linf", (8, 9)),
        (60, 2, "linf", (13,)),
        (80, 2, "linf", (10,)),
    ):
        for seed in seeds:
            specs.append((f"uniform-{norm}-n{n}-d{dim}-s{seed}", uniform_points, (n, dim, seed, norm)))
    return specs


def build(spec):
    _, fn, args = spec
    return fn(*args)
