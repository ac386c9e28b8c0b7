"""Finite-depth homeomorphism machinery between presented Cantor spaces.

A homeomorphism is never materialized; it exists as a stream of correspondences,
each a matched pair of clopen partitions at a mesh bound, each refining the
previous one. Extension across an entwined pair follows the nested clopen
system construction: clopen neighborhoods D_w of the subdivided subspace plus
non-empty remainders K_w, with canonical lexicographic piece pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cantor import (
    ClopenSet,
    EntwinedChain,
    PresentationError,
    SubPresentation,
    TreePresentation,
    _extend_with_remainder,
    is_entwined,
    split_clopen,
    whole_boundary,
)


def paired_subdivision(P: ClopenSet, Q: ClopenSet, mesh: float):
    """Co-recursive canonical binary subdivision of two clopen sets.

    Both sides split (lexicographic canonical splits) until both diameters at a
    node are <= mesh; the two trees share one index shape. Deterministic.
    """
    tree_p = {"": P}
    tree_q = {"": Q}
    stack = [""]
    while stack:
        w = stack.pop()
        if tree_p[w].diameter() > mesh or tree_q[w].diameter() > mesh:
            p0, p1 = split_clopen(tree_p[w])
            q0, q1 = split_clopen(tree_q[w])
            tree_p[w + "0"], tree_p[w + "1"] = p0, p1
            tree_q[w + "0"], tree_q[w + "1"] = q0, q1
            stack.extend((w + "0", w + "1"))
    return tree_p, tree_q


def tree_leaves(tree: dict) -> list[str]:
    return sorted(w for w in tree if w + "0" not in tree)


def piece_contains(coarse: ClopenSet, fine: ClopenSet) -> bool:
    """Cylinder-exact containment of one clopen set in another."""
    dd = max(fine.max_word_len(), coarse.max_word_len())
    return all(coarse.contains_word(u) for u in fine.refine_to_depth(dd))


@dataclass
class PiecePair:
    address: str
    left: ClopenSet
    right: ClopenSet


@dataclass
class CorrespondenceAtDepth:
    """Matched clopen partitions of two presented spaces at mesh <= 2^-depth."""

    depth: int
    pairs: list[PiecePair]

    @property
    def mesh(self) -> float:
        return max(max(p.left.diameter(), p.right.diameter()) for p in self.pairs)

    def piece_tree(self, side: str) -> dict[str, ClopenSet]:
        """Binary subdivision tree over the pieces, reconstructed from addresses."""
        leaves = {p.address: (p.left if side == "left" else p.right) for p in self.pairs}
        presentation = next(iter(leaves.values())).presentation
        tree = dict(leaves)
        for addr in sorted(leaves, key=len, reverse=True):
            w = addr
            while w:
                w = w[:-1]
                if w in tree:
                    break
                words = []
                for a, c in leaves.items():
                    if a.startswith(w):
                        words.extend(c.words)
                tree[w] = ClopenSet(presentation, words)
        if "" not in tree:
            words = []
            for c in leaves.values():
                words.extend(c.words)
            tree[""] = ClopenSet(presentation, words)
        return tree

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "mesh": self.mesh,
            "pairs": [
                {"address": p.address, "left": p.left.to_json(), "right": p.right.to_json()}
                for p in self.pairs
            ],
        }


def pair_cantor(X: TreePresentation, Y: TreePresentation, depth: int) -> CorrespondenceAtDepth:
    """Canonical correspondence between two presented Cantor spaces at mesh 2^-depth."""
    tree_x, tree_y = paired_subdivision(whole_boundary(X), whole_boundary(Y), 2.0**-depth)
    pairs = [PiecePair(w, tree_x[w], tree_y[w]) for w in tree_leaves(tree_x)]
    return CorrespondenceAtDepth(depth, pairs)


@dataclass
class NestedClopenSystem:
    """Clopen sets C_w (sub), D_w (ambient) and remainders K_w over a binary index tree."""

    link: SubPresentation
    c_nodes: dict = field(default_factory=dict)
    d_nodes: dict = field(default_factory=dict)
    k_nodes: dict = field(default_factory=dict)  # internal indices only

    def index_tree(self) -> set[str]:
        return set(self.c_nodes)

    def leaves(self) -> list[str]:
        return tree_leaves(self.c_nodes)

    def internal(self) -> list[str]:
        return sorted(w for w in self.c_nodes if w + "0" in self.c_nodes)

    def verify(self, schedule_arity: int | None = None) -> list[str]:
        """Invariant sweep by cylinder enumeration; returns a list of violations."""
        issues = []
        sub = self.link.sub()
        ambient = self.link.ambient
        if self.c_nodes[""] != whole_boundary(sub):
            issues.append("C_root is not the whole sub-boundary")
        if self.d_nodes[""] != whole_boundary(ambient):
            issues.append("D_root is not the whole ambient boundary")
        arity = schedule_arity or max(2, sub.max_out_degree())
        for w in sorted(self.c_nodes):
            cw, dw = self.c_nodes[w], self.d_nodes[w]
            sched = 2.0 ** -(len(w) // max(1, arity - 1))
            if cw.diameter() > sched + 1e-12:
                issues.append(f"diameter schedule broken at C_{w}")
            # D_w meets the sub-boundary exactly in C_w
            dd = max(cw.max_word_len(), dw.max_word_len())
            trace = sorted(u for u in dw.refine_to_depth(dd) if sub.is_valid_word(u))
            if trace != cw.refine_to_depth(dd):
                issues.append(f"D_{w} does not meet the sub-boundary in C_{w}")
            if w + "0" in self.c_nodes:
                c0, c1 = self.c_nodes[w + "0"], self.c_nodes[w + "1"]
                d0, d1 = self.d_nodes[w + "0"], self.d_nodes[w + "1"]
                kw = self.k_nodes[w]
                depth_all = max(
                    x.max_word_len() for x in (cw, c0, c1, dw, d0, d1, kw)
                )
                r0, r1 = c0.refine_to_depth(depth_all), c1.refine_to_depth(depth_all)
                if sorted(r0 + r1) != cw.refine_to_depth(depth_all):
                    issues.append(f"C_{w} != C_{w}0 disjoint-union C_{w}1")
                if set(r0) & set(r1):
                    issues.append(f"C_{w}0 meets C_{w}1")
                e0, e1, ek = (
                    d0.refine_to_depth(depth_all),
                    d1.refine_to_depth(depth_all),
                    kw.refine_to_depth(depth_all),
                )
                if set(e0) & set(e1):
                    issues.append(f"D_{w}0 meets D_{w}1")
                if sorted(e0 + e1 + ek) != dw.refine_to_depth(depth_all):
                    issues.append(f"D_{w} != D_{w}0 + D_{w}1 + K_{w}")
        return issues


def build_nested_system(
    S: SubPresentation,
    depth: int | None = None,
    c_tree: dict[str, ClopenSet] | None = None,
) -> NestedClopenSystem:
    """Build the nested clopen system over a subdivision of the sub-boundary.

    With `depth`, the canonical balanced binary subdivision of that depth is
    used; alternatively pass an explicit prefix-closed binary subdivision
    (clopen sets in the sub-presentation). Requires the link to be entwined.
    """
    res = is_entwined(S)
    if not res.entwined:
        raise PresentationError(f"link not entwined; witness cylinder {res.witness}")
    sub = S.sub()
    if c_tree is None:
        if depth is None:
            raise ValueError("pass a subdivision depth or an explicit tree")
        c_tree = {"": whole_boundary(sub)}
        for level in range(depth):
            for w in [u for u in c_tree if len(u) == level]:
                c0, c1 = split_clopen(c_tree[w])
                c_tree[w + "0"], c_tree[w + "1"] = c0, c1
    sys = NestedClopenSystem(S, c_nodes=dict(c_tree))
    sys.d_nodes[""] = whole_boundary(S.ambient)
    for w in sorted(c_tree, key=len):
        if w + "0" not in c_tree:
            continue
        d0, d1 = _extend_clopen_within(S, sys.d_nodes[w], c_tree[w + "0"], c_tree[w + "1"], eps=1.0)
        sys.d_nodes[w + "0"], sys.d_nodes[w + "1"] = d0, d1
        hull_depth = d0.max_word_len()
        taken = set(d0.words) | set(d1.words)
        k_words = []
        for base in sys.d_nodes[w].words:
            for u in S.ambient.words_at_depth(hull_depth, prefix=base):
                if u not in taken:
                    k_words.append(u)
        if not k_words:
            raise PresentationError(f"empty remainder K_{w}; entwinement should prevent this")
        sys.k_nodes[w] = ClopenSet(S.ambient, k_words)
    return sys


def _match_pairs(phi: CorrespondenceAtDepth, sysA: NestedClopenSystem, sysB: NestedClopenSystem):
    """Check that phi pairs the C-leaves of the two systems; returns leaf -> pair."""
    def key(c: ClopenSet):
        return tuple(c.refine_to_depth(c.max_word_len()))

    by_left = {key(p.left): p for p in phi.pairs}
    out = {}
    leavesA, leavesB = sysA.leaves(), sysB.leaves()
    if set(sysA.index_tree()) != set(sysB.index_tree()):
        raise PresentationError("index mismatch between the two nested systems")
    for w in leavesA:
        pair = by_left.get(key(sysA.c_nodes[w]))
        if pair is None:  # representation-insensitive fallback
            pair = next((p for p in phi.pairs if p.left == sysA.c_nodes[w]), None)
        if pair is None or pair.right != sysB.c_nodes[w]:
            raise PresentationError(f"correspondence does not respect the systems at index {w!r}")
        out[w] = pair
    if len(out) != len(phi.pairs):
        raise PresentationError("correspondence has pieces outside the system leaves")
    return out


def extend_homeo(
    phi: CorrespondenceAtDepth,
    sysA: NestedClopenSystem,
    sysB: NestedClopenSystem,
) -> CorrespondenceAtDepth:
    """Extend a correspondence across an entwined pair on both sides.

    The output partitions the two ambient boundaries into the leaf
    neighborhoods D_w (paired with D'_w) and canonical chunkings of the
    remainders K_w (paired with K'_w), restricting to phi on the sub-boundaries.
    """
    _match_pairs(phi, sysA, sysB)
    mesh = 2.0**-phi.depth
    pairs = []
    for w in sorted(sysA.c_nodes):
        binaddr = "".join("1" + b for b in w)
        if w + "0" in sysA.c_nodes:
            ta, tb = paired_subdivision(sysA.k_nodes[w], sysB.k_nodes[w], mesh)
            for v in tree_leaves(ta):
                pairs.append(PiecePair(binaddr + "0" + v, ta[v], tb[v]))
        else:
            pairs.append(PiecePair(binaddr, sysA.d_nodes[w], sysB.d_nodes[w]))
    pairs.sort(key=lambda p: p.address)
    return CorrespondenceAtDepth(phi.depth, pairs)


def omega_homeo(chain_a: EntwinedChain, chain_b: EntwinedChain, depth: int) -> list[CorrespondenceAtDepth]:
    """Stagewise correspondences between two entwined chains at mesh 2^-depth.

    Stage n+1 extends stage n across the n-th links, so its restriction to the
    n-th spaces is exactly the stage-n correspondence.
    """
    if len(chain_a) != len(chain_b):
        raise ValueError("chains must have equal length")
    chain_a.validate_entwined()
    chain_b.validate_entwined()
    out = [pair_cantor(chain_a.presentations[0], chain_b.presentations[0], depth)]
    for i in range(len(chain_a) - 1):
        tree_a = out[-1].piece_tree("left")
        tree_b = out[-1].piece_tree("right")
        sys_a = build_nested_system(chain_a.link(i), c_tree=tree_a)
        sys_b = build_nested_system(chain_b.link(i), c_tree=tree_b)
        out.append(extend_homeo(out[-1], sys_a, sys_b))
    return out


# ---------------------------------------------------------------------------
# verification oracles (exhaustive cylinder enumeration)

def correspondence_issues(corr: CorrespondenceAtDepth, X: TreePresentation, Y: TreePresentation) -> list[str]:
    issues = []
    for side, space in (("left", X), ("right", Y)):
        pieces = [getattr(p, side) for p in corr.pairs]
        dd = max(c.max_word_len() for c in pieces)
        covered = []
        for c in pieces:
            covered.extend(c.refine_to_depth(dd))
        if len(covered) != len(set(covered)):
            issues.append(f"{side} pieces overlap")
        if sorted(covered) != space.words_at_depth(dd):
            issues.append(f"{side} pieces do not partition the boundary")
    if corr.mesh > 2.0**-corr.depth + 1e-12:
        issues.append(f"mesh {corr.mesh} exceeds 2^-{corr.depth}")
    return issues


def refines(fine: CorrespondenceAtDepth, coarse: CorrespondenceAtDepth) -> bool:
    """Each fine pair is contained componentwise in exactly one coarse pair."""
    for fp in fine.pairs:
        hosts = [cp for cp in coarse.pairs if piece_contains(cp.left, fp.left)]
        if len(hosts) != 1:
            return False
        if not piece_contains(hosts[0].right, fp.right):
            return False
    return True


def restriction(
    corr: CorrespondenceAtDepth, sub_x: TreePresentation, sub_y: TreePresentation
) -> CorrespondenceAtDepth:
    """Trace of a correspondence on a pair of sub-boundaries."""
    pairs = []
    for p in corr.pairs:
        left = p.left.restricted_to(sub_x)
        right = p.right.restricted_to(sub_y)
        if (left is None) != (right is None):
            raise PresentationError(f"piece {p.address} meets one sub-boundary but not the other")
        if left is not None:
            pairs.append(PiecePair(p.address, left, right))
    return CorrespondenceAtDepth(corr.depth, pairs)


def same_correspondence(a: CorrespondenceAtDepth, b: CorrespondenceAtDepth) -> bool:
    dl = max(p.left.max_word_len() for p in list(a.pairs) + list(b.pairs))
    dr = max(p.right.max_word_len() for p in list(a.pairs) + list(b.pairs))

    def norm(corr):
        return {
            (tuple(p.left.refine_to_depth(dl)), tuple(p.right.refine_to_depth(dr)))
            for p in corr.pairs
        }

    return norm(a) == norm(b)


def correspondence_dot(stages: list[CorrespondenceAtDepth], names: list[str] | None = None) -> str:
    """DOT refinement diagram: one rank per stage, edges by trace containment."""
    names = names or [f"stage{i}" for i in range(len(stages))]
    lines = ["digraph refinement {", "  rankdir=TB;", "  node [shape=box, fontsize=9];"]
    for i, corr in enumerate(stages):
        lines.append(f"  subgraph cluster_{i} {{ label=\"{names[i]} (depth {corr.depth})\";")
        for p in corr.pairs:
            lines.append(f'    "{names[i]}/{p.address}" [label="{p.address}|{len(p.left.words)}w"];')
        lines.append("  }")
    for i in range(len(stages) - 1):
        prev, nxt = stages[i], stages[i + 1]
        for fp in nxt.pairs:
            sub_pres = prev.pairs[0].left.presentation
            tr = fp.left.restricted_to(sub_pres)
            if tr is None:
                continue
            for cp in prev.pairs:
                if piece_contains(cp.left, tr):
                    lines.append(f'  "{names[i]}/{cp.address}" -> "{names[i + 1]}/{fp.address}";')
                    break
    lines.append("}")
    return "\n".join(lines) + "\n"
