"""Bound tables as delimited text plus matplotlib figures rendered to files."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .decomposition import TreeDecomposition, _rooted, is_round, potential  # noqa: E402

_PNG_META = {"Software": None}


def bound_rows(checks) -> list[list]:
    return [[c.name, c.claimed, c.observed, "pass" if c.ok else "FAIL"] for c in checks]


def delimited(header, rows, delimiter="\t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_delimited(path, header, rows, delimiter="\t"):
    Path(path).write_text(delimited(header, rows, delimiter))


def node_rows(td: TreeDecomposition, r=None) -> list[list]:
    rows = []
    for i, bag in enumerate(td.bags):
        cover = td.covers[i] if td.covers is not None else ()
        top = max((b.radius for b in cover), default=0)
        phi = potential(cover, r) if r is not None and cover and is_round(cover, r) else ""
        rows.append([i, len(bag), len(cover), top, phi])
    return rows


NODE_HEADER = ["node", "bag_size", "cover_size", "max_radius", "potential"]


def _numeric(x):
    try:
        return float(x)
    except (TypeError, ValueError):
        return None


def plot_bounds(checks, path, title="claimed vs observed"):
    """Horizontal bars for every numeric bound: claimed (outline) and observed (filled)."""
    rows = [
        (c.name, _numeric(c.claimed), _numeric(c.observed), c.ok)
        for c in checks
        if "<=" in c.name and not isinstance(c.claimed, bool)
    ]
    rows = [x for x in rows if x[1] is not None and x[2] is not None]
    fig, ax = plt.subplots(figsize=(7, 0.6 * max(len(rows), 1) + 1.2))
    for i, (name, claimed, observed, ok) in enumerate(rows):
        ax.barh(i, claimed, color="none", edgecolor="0.3", height=0.6)
        ax.barh(i, observed, color="tab:green" if ok else "tab:red", height=0.4)
    ax.set_yticks(range(len(rows)), [x[0] for x in rows], fontsize=8)
    ax.set_xscale("symlog", linthresh=1)
    ax.set_xlabel("value (outline: claimed bound, bar: observed)")
    ax.set_title(title, fontsize=10)
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def plot_bag_profile(td: TreeDecomposition, path, r=None, title="bags and covers"):
    rows = node_rows(td, r)
    xs = [x[0] for x in rows]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(xs, [x[1] for x in rows], "o-", ms=3, label="bag size")
    if td.covers is not None:
        ax.plot(xs, [x[2] for x in rows], "s-", ms=3, label="cover size")
        ax.plot(xs, [x[3] for x in rows], "^-", ms=3, label="max radius")
    ax.set_xlabel("node")
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def _layout(td: TreeDecomposition):
    """Layered layout: depth on y, leaves spread evenly on x."""
    N = td.num_nodes
    adj, parent, depth, order = _rooted(N, td.tree_edges)
    children = [[] for _ in range(N)]
    for x in order[1:]:
        children[parent[x]].append(x)
    xpos = [0.0] * N
    nxt = [0]

    def place(x):
        stack = [(x, False)]
        while stack:
            v, done = stack.pop()
            if done:
                cs = children[v]
                xpos[v] = sum(xpos[c] for c in cs) / len(cs) if cs else nxt[0]
                if not cs:
                    nxt[0] += 1
                continue
            stack.append((v, True))
            stack.extend((c, False) for c in reversed(children[v]))

    place(order[0] if order else 0)
    return xpos, [-d for d in depth]


def plot_tree(td: TreeDecomposition, path, title="decomposition tree"):
    if td.num_nodes == 0:
        return
    xs, ys = _layout(td)
    sizes = [len(b) for b in td.bags]
    fig, ax = plt.subplots(figsize=(min(2 + 0.35 * td.num_nodes, 14), 4))
    for a, b in td.tree_edges:
        ax.plot([xs[a], xs[b]], [ys[a], ys[b]], color="0.6", lw=1, zorder=1)
    sc = ax.scatter(xs, ys, c=sizes, s=120, cmap="viridis", zorder=2)
    for i in range(td.num_nodes):
        ax.annotate(str(i), (xs[i], ys[i]), ha="center", va="center", fontsize=6, color="w")
    fig.colorbar(sc, ax=ax, label="bag size")
    ax.set_axis_off()
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def render_decomposition_figures(td: TreeDecomposition, checks, directory, stem: str, r=None) -> list[str]:
    """Write ``<stem>_bounds.png``, ``<stem>_bags.png``, ``<stem>_tree.png`` and ``<stem>_bags.tsv``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    if checks:
        plot_bounds(checks, d / f"{stem}_bounds.png")
        write_delimited(d / f"{stem}_bounds.tsv", ["check", "claimed", "observed", "status"], bound_rows(checks))
        out += [f"{stem}_bounds.png", f"{stem}_bounds.tsv"]
    plot_bag_profile(td, d / f"{stem}_bags.png", r)
    plot_tree(td, d / f"{stem}_tree.png")
    write_delimited(d / f"{stem}_bags.tsv", NODE_HEADER, node_rows(td, r))
    out += [f"{stem}_bags.png", f"{stem}_tree.png", f"{stem}_bags.tsv"]
    return sorted(out)
