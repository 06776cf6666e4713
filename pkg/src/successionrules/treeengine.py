"""Level-by-level enumeration of generating trees, transfer matrices and DOT export.

Productions depend only on the label, so all nodes carrying the same label
have isomorphic subtrees.  Enumeration therefore keeps one signed counter per
label and level instead of materialising nodes; a marked node contributes a
negative count, which is exactly the annihilation of marked against plain
labels on the same level.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .rulecore import Label, RuleError, SuccessionRule


class JumpsPresent(RuleError):
    pass


class NodeBudgetExceeded(RuntimeError):
    pass


@dataclass
class LevelProfile:
    level: int
    signed_counts: dict[Label, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.signed_counts.values())


def expand(rule: SuccessionRule, depth: int) -> list[LevelProfile]:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    levels: list[defaultdict[Label, int]] = [defaultdict(int) for _ in range(depth + 1)]
    levels[0][rule.axiom.unmarked()] += rule.axiom.sign
    for n in range(depth + 1):
        for label, count in levels[n].items():
            if not count:
                continue
            prod = rule.productions.get(label)
            if prod is None:
                continue  # (0) is a sink
            for jump, succ, mult in prod.branches:
                if n + jump > depth:
                    continue
                levels[n + jump][succ.unmarked()] += count * mult * succ.sign
    return [
        LevelProfile(n, {lab: c for lab, c in lv.items() if c})
        for n, lv in enumerate(levels)
    ]


def totals(rule: SuccessionRule, depth: int) -> list[int]:
    return [p.total for p in expand(rule, depth)]


@dataclass(frozen=True)
class ProductionMatrix:
    label_index: tuple[Label, ...]
    matrix: tuple[tuple[int, ...], ...]

    def start_vector(self, axiom: Label) -> list[int]:
        u = [0] * len(self.label_index)
        u[self.label_index.index(axiom.unmarked())] = axiom.sign
        return u

    def level_totals(self, axiom: Label, depth: int) -> list[int]:
        """``u M^n 1`` for ``n = 0..depth``."""
        u = self.start_vector(axiom)
        size = len(u)
        out = []
        for _ in range(depth + 1):
            out.append(sum(u))
            u = [sum(u[i] * self.matrix[i][j] for i in range(size)) for j in range(size)]
        return out


def production_matrix(rule: SuccessionRule) -> ProductionMatrix:
    if rule.max_jump() > 1:
        raise JumpsPresent("production matrix needs a rule whose sons all land one level down")
    labels = rule.labels()
    pos = {lab: i for i, lab in enumerate(labels)}
    rows = [[0] * len(labels) for _ in labels]
    for parent, prod in rule.productions.items():
        for _, succ, mult in prod.branches:
            rows[pos[parent]][pos[succ.unmarked()]] += mult * succ.sign
    return ProductionMatrix(tuple(labels), tuple(tuple(r) for r in rows))


def _dot_name(label: Label) -> str:
    body = str(label.value) if not label.tag else f"{label.value}_{label.tag}"
    return ("~" if label.marked else "") + body


def export_dot(
    rule: SuccessionRule,
    depth: int,
    *,
    compact: bool = False,
    max_nodes: int = 5000,
) -> str:
    """Render the first ``depth`` levels as a DOT digraph.

    In explicit mode every node is drawn.  Marked nodes are dashed; plain and
    marked nodes that annihilate each other on a level are additionally
    greyed out.  Compact mode draws one node per label and level carrying the
    signed multiplicity as an exponent.
    """
    if compact:
        return _export_compact(rule, depth, max_nodes)
    return _export_tree(rule, depth, max_nodes)


def _export_tree(rule: SuccessionRule, depth: int, max_nodes: int) -> str:
    # node: (id, level, label with effective mark, parent id, jump)
    nodes: list[tuple[int, int, Label, int | None, int]] = [(0, 0, rule.axiom, None, 0)]
    pending: dict[int, list[int]] = defaultdict(list)
    pending[0].append(0)
    for n in range(depth + 1):
        for nid in pending.get(n, []):
            _, _, label, _, _ = nodes[nid]
            prod = rule.production(label)
            if prod is None:
                continue
            for jump, succ, mult in prod.branches:
                if n + jump > depth:
                    continue
                child = succ.toggled() if label.marked else succ
                for _ in range(mult):
                    if len(nodes) >= max_nodes:
                        raise NodeBudgetExceeded(
                            f"more than {max_nodes} nodes needed up to depth {depth}"
                        )
                    cid = len(nodes)
                    nodes.append((cid, n + jump, child, nid, jump))
                    pending[n + jump].append(cid)

    killed: set[int] = set()
    for n in range(depth + 1):
        plain: dict[Label, list[int]] = defaultdict(list)
        marked: dict[Label, list[int]] = defaultdict(list)
        for nid in pending.get(n, []):
            label = nodes[nid][2]
            (marked if label.marked else plain)[label.unmarked()].append(nid)
        for base, negs in marked.items():
            for pos_id, neg_id in zip(plain.get(base, []), negs):
                killed.update((pos_id, neg_id))

    lines = ["digraph generating_tree {", "  node [shape=plaintext];"]
    for n in range(depth + 1):
        ids = pending.get(n, [])
        total = sum(nodes[i][2].sign for i in ids)
        lines.append(f"  // level {n}: {len(ids)} nodes, total {total}")
        for nid in ids:
            label = nodes[nid][2]
            attrs = [f'label="({_dot_name(label)})"']
            if label.marked:
                attrs.append("style=dashed")
            if nid in killed:
                attrs.append("fontcolor=gray")
            lines.append(f"  n{nid} [{', '.join(attrs)}];")
    for nid, _, _, parent, jump in nodes[1:]:
        extra = f' [label="{jump}"]' if jump > 1 else ""
        lines.append(f"  n{parent} -> n{nid}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _export_compact(rule: SuccessionRule, depth: int, max_nodes: int) -> str:
    profiles = expand(rule, depth)
    names: dict[tuple[int, Label], str] = {}
    lines = ["digraph generating_tree {", "  node [shape=plaintext];"]
    for prof in profiles:
        lines.append(f"  // level {prof.level}: total {prof.total}")
        for label, count in prof.signed_counts.items():
            if len(names) >= max_nodes:
                raise NodeBudgetExceeded(f"more than {max_nodes} compact nodes")
            name = f"l{prof.level}_{len(names)}"
            names[(prof.level, label)] = name
            shown = label if count > 0 else label.toggled()
            exp = abs(count)
            text = f"({_dot_name(shown)})" + (f"^{exp}" if exp != 1 else "")
            style = ", style=dashed" if count < 0 else ""
            lines.append(f'  {name} [label="{text}", exponent={count}{style}];')
    for prof in profiles:
        for label in prof.signed_counts:
            prod = rule.productions.get(label)
            if prod is None:
                continue
            seen = set()
            for jump, succ, _ in prod.branches:
                target = names.get((prof.level + jump, succ.unmarked()))
                if target is None or target in seen:
                    continue
                seen.add(target)
                extra = f' [label="{jump}"]' if jump > 1 else ""
                lines.append(f"  {names[(prof.level, label)]} -> {target}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"
