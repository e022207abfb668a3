"""Graphviz DOT rendering of a flat net, one cluster per page path."""

from __future__ import annotations

from typing import Dict, List

from .kernel import Net


def _q(text: str) -> str:
    return '"%s"' % text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


class _Cluster:
    def __init__(self, path: str):
        self.path = path
        self.nodes: List[str] = []
        self.children: Dict[str, "_Cluster"] = {}

    def child(self, name: str) -> "_Cluster":
        if name not in self.children:
            self.children[name] = _Cluster(self.path + name + "/")
        return self.children[name]


def dump_net(net: Net, name: str = "net") -> str:
    """Places are ellipses (id and colour set), transitions boxes (id and
    guard), arcs carry their inscriptions. Ids keep their page prefixes."""
    root = _Cluster("")

    def home(node_id: str) -> _Cluster:
        c = root
        for part in node_id.split("/")[:-1]:
            c = c.child(part)
        return c

    for pid in sorted(net.places):
        pl = net.places[pid]
        label = "%s\n%s" % (pid, pl.colorset.name)
        home(pid).nodes.append("%s [shape=ellipse, label=%s];" % (_q(pid), _q(label)))
    for tid in sorted(net.transitions):
        t = net.transitions[tid]
        label = tid if t.guard is None else "%s\n[%s]" % (tid, t.guard)
        home(tid).nodes.append("%s [shape=box, label=%s];" % (_q(tid), _q(label)))

    lines = ["digraph %s {" % _q(name)]

    def emit(c: _Cluster, depth: int) -> None:
        pad = "  " * depth
        for node in c.nodes:
            lines.append(pad + node)
        for key in sorted(c.children):
            sub = c.children[key]
            lines.append("%ssubgraph %s {" % (pad, _q("cluster_" + sub.path.rstrip("/"))))
            lines.append("%s  label=%s;" % (pad, _q(sub.path.rstrip("/"))))
            emit(sub, depth + 1)
            lines.append(pad + "}")

    emit(root, 1)
    for tid in sorted(net.transitions):
        t = net.transitions[tid]
        for arc in t.inputs:
            lines.append("  %s -> %s [label=%s];" % (_q(arc.place), _q(tid), _q(str(arc.expr))))
        for arc in t.outputs:
            lines.append("  %s -> %s [label=%s];" % (_q(tid), _q(arc.place), _q(str(arc.expr))))
    lines.append("}")
    return "\n".join(lines) + "\n"
