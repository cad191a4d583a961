"""Force-graph interchange documents.

The document is a pair of vectors, nodes and links.  Every node object
carries id, type, x, y, vx, vy, links, age; every link object carries
source, target, value, age.  One node per center and per port; internal
links (center to port) have width value 2, external links (port to port,
one per molecule edge) width value 1.  Positions start on the unit circle
and velocities at zero; the force layout belongs to the display layer.
"""

from __future__ import annotations

import math

from .molcore import Molecule, to_port_graph

INTERNAL_VALUE = 2
EXTERNAL_VALUE = 1


def d3_document(molecule: Molecule) -> dict:
    graph = to_port_graph(molecule)
    total = len(graph.centers) + len(graph.ports)
    nodes = []
    index: dict[int, int] = {}

    def place(gid: int, type_name: str):
        k = len(nodes)
        index[gid] = k
        angle = 2 * math.pi * k / total if total else 0.0
        nodes.append(
            {
                "id": k,
                "type": type_name,
                "x": math.cos(angle),
                "y": math.sin(angle),
                "vx": 0,
                "vy": 0,
                "links": [],
                "age": 0,
            }
        )

    for gid, ntype in graph.centers:
        place(gid, ntype.name)
    for port in graph.ports:
        place(port.id, port.kind)

    links = []
    for center, port in graph.internal_edges:
        links.append(
            {
                "source": index[center],
                "target": index[port],
                "value": INTERNAL_VALUE,
                "age": 0,
            }
        )
    for a, b in graph.external_edges:
        links.append(
            {"source": index[a], "target": index[b], "value": EXTERNAL_VALUE, "age": 0}
        )
    return {"nodes": nodes, "links": links}
