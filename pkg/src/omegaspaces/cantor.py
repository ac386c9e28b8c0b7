"""Symbolic engine for Cantor spaces presented as boundaries of finite-state rooted trees.

A presentation is a label-deterministic automaton; its boundary is the set of
infinite label paths from the root, metrized so the cylinder over a word of
length n has diameter 2^-n. Everything downstream (empty-interior tests,
clopen algebra, homeomorphism approximations) is decidable on this class.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

Word = tuple[str, ...]


class PresentationError(ValueError):
    """Structural defect in a presentation (unreachable state, dead end, bad edge)."""


class EntwinementError(ValueError):
    """A sub-presentation fails a properness/entwinement precondition."""


class ResolutionError(ValueError):
    """An operation needs deeper unfolding than its depth budget allows."""

    def __init__(self, msg, required_depth=None):
        super().__init__(msg)
        self.required_depth = required_depth


class TreePresentation:
    """Finite-state rooted tree presentation (states, root, deterministic labeled edges).

    Immutable by convention: no method mutates the automaton after construction.
    """

    def __init__(self, states, root, edges):
        """`edges` maps (state, label) -> state."""
        self.states = tuple(states)
        self.root = root
        self.edges = dict(edges)
        state_set = set(self.states)
        if root not in state_set:
            raise PresentationError(f"root {root!r} is not a state")
        if len(state_set) != len(self.states):
            raise PresentationError("duplicate states")
        self._out = {s: [] for s in self.states}
        for (s, lab), t in self.edges.items():
            if s not in state_set:
                raise PresentationError(f"edge from unknown state {s!r}")
            if t not in state_set:
                raise PresentationError(f"edge ({s!r}, {lab!r}) leads to unknown state {t!r}")
            self._out[s].append(lab)
        for s in self._out:
            self._out[s].sort()

    def out_labels(self, state) -> list[str]:
        return self._out[state]

    def step(self, state, label):
        return self.edges.get((state, label))

    def state_at(self, word: Word):
        """State reached by a word from the root, or None if the word is invalid."""
        s = self.root
        for lab in word:
            s = self.edges.get((s, lab))
            if s is None:
                return None
        return s

    def is_valid_word(self, word: Word) -> bool:
        return self.state_at(word) is not None

    def words_at_depth(self, depth: int, prefix: Word = ()) -> list[Word]:
        """All valid words of the given length extending `prefix`."""
        s = self.state_at(prefix)
        if s is None:
            return []
        frontier = [(prefix, s)]
        for _ in range(depth - len(prefix)):
            frontier = [(w + (lab,), self.edges[(s, lab)]) for w, s in frontier for lab in self._out[s]]
        return [w for w, _ in frontier]

    def reachable_states(self) -> set:
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            s = queue.popleft()
            for lab in self._out[s]:
                t = self.edges[(s, lab)]
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return seen

    def branching_states(self) -> set:
        return {s for s in self.states if len(self._out[s]) >= 2}

    def max_out_degree(self) -> int:
        return max(len(self._out[s]) for s in self.states)

    def descend_to_branch(self, word: Word) -> Word:
        """Extend a word along forced edges until the current state branches."""
        s = self.state_at(word)
        if s is None:
            raise PresentationError(f"invalid word {word}")
        seen = set()
        while len(self._out[s]) == 1:
            if s in seen:
                raise PresentationError(f"state {s!r} cannot reach a branching state")
            seen.add(s)
            lab = self._out[s][0]
            word = word + (lab,)
            s = self.edges[(s, lab)]
        return word

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "root": self.root,
            "edges": sorted([s, lab, t] for (s, lab), t in self.edges.items()),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TreePresentation":
        edges = {(s, lab): t for s, lab, t in data["edges"]}
        if len(edges) != len(data["edges"]):
            raise PresentationError("duplicate (state, label) edge; presentations are label-deterministic")
        return cls(data["states"], data["root"], edges)

    def __eq__(self, other):
        return (
            isinstance(other, TreePresentation)
            and set(self.states) == set(other.states)
            and self.root == other.root
            and self.edges == other.edges
        )

    def __repr__(self):
        return f"TreePresentation({len(self.states)} states, root={self.root!r}, {len(self.edges)} edges)"


@dataclass
class ValidationReport:
    nonempty: bool
    perfect: bool
    branch_witness: dict = field(default_factory=dict)  # state -> path of labels to a branching state
    violations: list = field(default_factory=list)  # states from which no branching state is reachable

    @property
    def valid(self) -> bool:
        return self.nonempty and self.perfect


def validate_presentation(T: TreePresentation) -> ValidationReport:
    """Check the two decidable Cantor conditions: non-emptiness and perfectness.

    Structural defects (unreachable states, dead ends) raise PresentationError
    naming the state; perfectness failures are reported with a violating state.
    """
    reachable = T.reachable_states()
    for s in T.states:
        if s not in reachable:
            raise PresentationError(f"unreachable state {s!r}")
        if not T.out_labels(s):
            raise PresentationError(f"dead-end state {s!r} has no outgoing edge")
    branching = T.branching_states()
    # BFS backwards over 'can reach a branching state'
    witness = {}
    for s in branching:
        witness[s] = []
    frontier = set(branching)
    while frontier:
        nxt = set()
        for s in T.states:
            if s in witness:
                continue
            for lab in T.out_labels(s):
                t = T.edges[(s, lab)]
                if t in witness:
                    witness[s] = [lab] + witness[t]
                    nxt.add(s)
                    break
        frontier = nxt
    violations = [s for s in T.states if s not in witness]
    return ValidationReport(
        nonempty=True,
        perfect=not violations,
        branch_witness=witness,
        violations=violations,
    )


class SubPresentation:
    """A sub-automaton C of an ambient presentation D, sharing the root.

    Every C-edge is a D-edge, so the boundary of C sits inside the boundary of D.
    """

    def __init__(self, ambient: TreePresentation, sub_states, sub_edges):
        self.ambient = ambient
        self.sub_states = frozenset(sub_states)
        self.sub_edges = frozenset(sub_edges)  # set of (state, label)
        if ambient.root not in self.sub_states:
            raise PresentationError("sub-presentation must contain the root")
        for (s, lab) in self.sub_edges:
            if (s, lab) not in ambient.edges:
                raise PresentationError(f"sub-edge ({s!r},{lab!r}) is not an ambient edge")
            if s not in self.sub_states or ambient.edges[(s, lab)] not in self.sub_states:
                raise PresentationError(f"sub-edge ({s!r},{lab!r}) leaves the sub-state set")
        self._sub = None
        self._product = None
        self._escape = None

    @classmethod
    def from_presentations(cls, sub: TreePresentation, ambient: TreePresentation) -> "SubPresentation":
        if sub.root != ambient.root:
            raise PresentationError("sub and ambient presentations must share the root")
        return cls(ambient, sub.states, sub.edges.keys())

    def sub(self) -> TreePresentation:
        """The sub-automaton as a presentation in its own right."""
        if self._sub is None:
            edges = {e: self.ambient.edges[e] for e in self.sub_edges}
            self._sub = TreePresentation(sorted(self.sub_states), self.ambient.root, edges)
        return self._sub

    def product_states(self):
        """Reachable (ambient state, sub state) pairs along sub-valid words."""
        if self._product is not None:
            return self._product
        start = (self.ambient.root, self.ambient.root)
        seen = {start: ()}
        queue = deque([start])
        sub = self.sub()
        while queue:
            d, c = queue.popleft()
            for lab in sub.out_labels(c):
                nxt = (self.ambient.edges[(d, lab)], sub.edges[(c, lab)])
                if nxt not in seen:
                    seen[nxt] = seen[(d, c)] + (lab,)
                    queue.append(nxt)
        self._product = seen
        return seen

    def escape_depths(self):
        """For each reachable product state, the least extra depth at which some
        ambient word through it leaves the sub-presentation (None if never)."""
        if self._escape is not None:
            return self._escape
        sub = self.sub()
        seen = self.product_states()
        depth = {}
        frontier = []
        for (d, c) in seen:
            c_labels = set(sub.out_labels(c))
            if any(lab not in c_labels for lab in self.ambient.out_labels(d)):
                depth[(d, c)] = 1
                frontier.append((d, c))
        # reverse edges of the product graph
        rev = {}
        for (d, c) in seen:
            for lab in sub.out_labels(c):
                nxt = (self.ambient.edges[(d, lab)], sub.edges[(c, lab)])
                if nxt in seen:
                    rev.setdefault(nxt, []).append((d, c))
        queue = deque(frontier)
        while queue:
            node = queue.popleft()
            for prev in rev.get(node, []):
                if prev not in depth:
                    depth[prev] = depth[node] + 1
                    queue.append(prev)
        self._escape = {pair: depth.get(pair) for pair in seen}
        return self._escape


@dataclass
class EntwinedResult:
    entwined: bool
    witness: Word | None = None  # an ambient cylinder inside the sub-boundary, when not entwined


def is_entwined(S: SubPresentation) -> EntwinedResult:
    """Decide whether the sub-boundary has empty interior in the ambient boundary.

    Product-automaton co-reachability: entwined iff from every reachable
    (ambient, sub) state pair some escaping ambient word exists. Raises
    EntwinementError when the boundaries coincide (no proper containment).
    """
    access = S.product_states()
    depths = S.escape_depths()
    if depths[(S.ambient.root, S.ambient.root)] is None:
        raise EntwinementError("sub-presentation has the same boundary as the ambient one")
    for pair, d in depths.items():
        if d is None:
            return EntwinedResult(False, witness=access[pair])
    return EntwinedResult(True)


def entwined_scan(S: SubPresentation, depth: int | None = None) -> EntwinedResult:
    """Brute-force oracle: walk ambient cylinders word by word.

    A cylinder sits inside the sub-boundary iff no extension of its word ever
    escapes. The walk cuts off at `depth`, by default #product states + 1 so
    the verdict is exact; pass depth=6 for the fixed-horizon scan.
    """
    sub = S.sub()
    if depth is None:
        depth = max(6, len(S.product_states()) + 1)

    def escapes(word: Word, budget: int, seen: frozenset) -> bool:
        d = S.ambient.state_at(word)
        c = sub.state_at(word)
        if c is None:
            return True
        if budget == 0 or (d, c) in seen:
            return False
        seen = seen | {(d, c)}
        return any(escapes(word + (lab,), budget - 1, seen) for lab in S.ambient.out_labels(d))

    # scan sub-valid cylinders breadth-first; non-sub-valid ones are disjoint from C
    queue = deque([()])
    while queue:
        w = queue.popleft()
        if not escapes(w, depth, frozenset()):
            return EntwinedResult(False, witness=w)
        if len(w) < depth:
            d = S.ambient.state_at(w)
            for lab in S.ambient.out_labels(d):
                if sub.is_valid_word(w + (lab,)):
                    queue.append(w + (lab,))
    return EntwinedResult(True)


def _common_prefix_len(words) -> int:
    first, last = min(words), max(words)
    n = 0
    for a, b in zip(first, last):
        if a != b:
            break
        n += 1
    return n


class ClopenSet:
    """Clopen subset of a presented boundary: a finite prefix-antichain of valid words."""

    def __init__(self, presentation: TreePresentation, words):
        self.presentation = presentation
        self.words = tuple(sorted(tuple(w) for w in words))
        if not self.words:
            raise ValueError("clopen sets here are non-empty word lists; use no set instead")
        for w in self.words:
            if not presentation.is_valid_word(w):
                raise PresentationError(f"word {w} is not a valid path from the root")
        for i in range(len(self.words) - 1):
            a, b = self.words[i], self.words[i + 1]
            if b[: len(a)] == a:
                raise ValueError(f"antichain violation: {a} is a prefix of {b}")

    def diameter(self) -> float:
        """Declared diameter under the 2^-depth cylinder convention."""
        if len(self.words) == 1:
            return 2.0 ** -len(self.words[0])
        return 2.0 ** -_common_prefix_len(self.words)

    def max_word_len(self) -> int:
        return max(len(w) for w in self.words)

    def refine_to_depth(self, depth: int) -> list[Word]:
        """All valid depth-`depth` words whose cylinders make up this set."""
        if depth < self.max_word_len():
            raise ValueError("refinement depth is shallower than the word list")
        out = []
        for w in self.words:
            out.extend(self.presentation.words_at_depth(depth, prefix=w))
        return sorted(out)

    def contains_word(self, u: Word) -> bool:
        """Whether the cylinder over u lies inside this set."""
        return any(tuple(u[: len(w)]) == w for w in self.words)

    def meets_word(self, u: Word) -> bool:
        u = tuple(u)
        return any(u[: len(w)] == w or w[: len(u)] == u for w in self.words)

    def restricted_to(self, sub: TreePresentation) -> "ClopenSet | None":
        """Intersection with the boundary of a sub-automaton, as a clopen set there."""
        kept = [w for w in self.words if sub.is_valid_word(w)]
        return ClopenSet(sub, kept) if kept else None

    def sup_dist_to(self, other: "ClopenSet") -> float:
        """Sup over this set's points of the cylinder-metric distance to `other`.

        Both sets are refined to a common depth; distinct equal-length words sit
        at distance exactly 2^-lcp, a shared word contributes at most 2^-depth.
        """
        dd = max(self.max_word_len(), other.max_word_len())
        mine = self.refine_to_depth(dd)
        theirs = set(other.refine_to_depth(dd))
        worst = 0.0
        for w in mine:
            if w in theirs:
                best = 2.0**-dd
            else:
                best = 2.0
                for u in theirs:
                    k = 0
                    for a, b in zip(w, u):
                        if a != b:
                            break
                        k += 1
                    best = min(best, 2.0**-k)
            worst = max(worst, best)
        return worst

    def to_json(self):
        return [list(w) for w in self.words]

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        d = max(self.max_word_len(), other.max_word_len())
        return self.refine_to_depth(d) == other.refine_to_depth(d)

    def __repr__(self):
        return f"ClopenSet({len(self.words)} words, depth<={self.max_word_len()})"


def whole_boundary(T: TreePresentation) -> ClopenSet:
    return ClopenSet(T, [()])


def split_clopen(P: ClopenSet) -> tuple[ClopenSet, ClopenSet]:
    """Canonical binary split of a clopen set: descend to the first branching,
    peel off the lexicographically least continuation. Deterministic."""
    T = P.presentation
    if len(P.words) == 1:
        w = T.descend_to_branch(P.words[0])
        labels = T.out_labels(T.state_at(w))
        left = ClopenSet(T, [w + (labels[0],)])
        right = ClopenSet(T, [w + (lab,) for lab in labels[1:]])
        return left, right
    k = _common_prefix_len(P.words)
    first = P.words[0][k]
    left_words = [w for w in P.words if w[k] == first]
    right_words = [w for w in P.words if w[k] != first]
    return ClopenSet(T, left_words), ClopenSet(T, right_words)


def extend_clopen(
    S: SubPresentation,
    c0: ClopenSet,
    c1: ClopenSet,
    eps: float,
    max_depth: int = 48,
) -> tuple[ClopenSet, ClopenSet]:
    """Extend a clopen split of the sub-boundary to disjoint clopen neighborhoods
    in the ambient boundary.

    Returns (D0, D1) with: D_i meets the sub-boundary exactly in C_i; D0, D1
    disjoint; their union proper in the ambient boundary; D_i within eps of C_i
    in the cylinder metric; and C_i still of empty interior in D_i.
    """
    ambient = whole_boundary(S.ambient)
    d0, d1, _ = _extend_with_remainder(S, ambient, c0, c1, eps, max_depth)
    return d0, d1


def _eps_exponent(eps: float) -> int:
    from math import log2

    m = -log2(eps)
    if abs(m - round(m)) > 1e-9 or eps <= 0 or eps > 1:
        raise ValueError(f"eps must be a power of 1/2 in (0,1], got {eps}")
    return int(round(m))


def _extend_with_remainder(
    S: SubPresentation,
    D_w: ClopenSet,
    c0: ClopenSet,
    c1: ClopenSet,
    eps: float,
    max_depth: int = 48,
) -> tuple[ClopenSet, ClopenSet, ClopenSet]:
    """extend_clopen relative to an ambient clopen piece D_w, plus the remainder.

    Hulls are taken per parent word, just deep enough to classify against the
    split and to leave one escaping cylinder (this keeps depths from compounding
    along nested splits). Returns (D0, D1, K) with K = D_w - (D0 u D1).
    """
    sub = S.sub()
    m = _eps_exponent(eps)
    c_words = list(c0.words) + list(c1.words)
    for c in (c0, c1):
        for w in c.words:
            if not sub.is_valid_word(w):
                raise PresentationError(f"split word {w} is not valid in the sub-presentation")
            # [w] must sit inside the ambient piece as a set (refine through depth mixes)
            dd = max(len(w), D_w.max_word_len())
            for u in sub.words_at_depth(dd, prefix=w):
                if not D_w.contains_word(u):
                    raise PresentationError(f"split word {w} leaves the ambient piece")

    # per-word hull depth: cover every split word meeting the parent word
    need = {}
    for w in D_w.words:
        if not sub.is_valid_word(w):
            need[w] = None  # wholly escaped cylinder; goes to the remainder
            continue
        k = max(len(w), m + 1)
        for u in c_words:
            if u[: len(w)] == w or w[: len(u)] == u:
                k = max(k, len(u))
        need[w] = k
    sub_words = [w for w in D_w.words if need[w] is not None]
    if not sub_words:
        raise ValueError("split does not meet the ambient piece")

    # one escaping cylinder keeps the union of the hulls proper in D_w
    depths = S.escape_depths()
    esc_choice = None
    for w in sub_words:
        esc = depths[(S.ambient.state_at(w), sub.state_at(w))]
        if esc is None:
            raise EntwinementError(f"no escape below {w}; sub-boundary not entwined there")
        if esc_choice is None or len(w) + esc < esc_choice[1]:
            esc_choice = (w, len(w) + esc)
    w_star, k_star = esc_choice
    need[w_star] = max(need[w_star], k_star)
    worst = max(need[w] for w in sub_words)
    if worst > max_depth:
        raise ResolutionError(
            f"eps={eps} needs cylinder depth {worst} > budget {max_depth}; unfold deeper",
            required_depth=worst,
        )

    hull0, hull1, rem = [], [], []
    for w in D_w.words:
        if need[w] is None:
            rem.append(w)
            continue
        k = need[w]
        taken = set()
        for u in sub.words_at_depth(k, prefix=w):
            taken.add(u)
            if c0.contains_word(u):
                hull0.append(u)
            elif c1.contains_word(u):
                hull1.append(u)
            else:
                raise ValueError(f"C0, C1 do not partition the sub-piece: {u} uncovered")
        for u in S.ambient.words_at_depth(k, prefix=w):
            if u not in taken:
                rem.append(u)
    if not hull0 or not hull1:
        raise ValueError("both sides of the clopen split must be non-empty")
    if not rem:
        raise EntwinementError("no remainder left; entwinement should prevent this")
    return (
        ClopenSet(S.ambient, hull0),
        ClopenSet(S.ambient, hull1),
        ClopenSet(S.ambient, rem),
    )


# ---------------------------------------------------------------------------
# standard presentations and chains

def full_shift(n_labels: int = 2) -> TreePresentation:
    labels = [str(i) for i in range(n_labels)]
    return TreePresentation(["q"], "q", {("q", lab): "q" for lab in labels})


def single_loop() -> TreePresentation:
    """One state, one loop: the boundary is a single point (not perfect)."""
    return TreePresentation(["q"], "q", {("q", "0"): "q"})


def glued_tree() -> TreePresentation:
    """Binary tree with a fresh binary copy rooted at every vertex.

    The plain binary boundary sits inside this one with empty interior: every
    binary cylinder also contains paths that branch off through the glue label.
    """
    return TreePresentation(
        ["main", "copy"],
        "main",
        {
            ("main", "0"): "main",
            ("main", "1"): "main",
            ("main", "g"): "copy",
            ("copy", "0"): "copy",
            ("copy", "1"): "copy",
        },
    )


def binary_inside_glued() -> SubPresentation:
    D = glued_tree()
    return SubPresentation(D, ["main"], [("main", "0"), ("main", "1")])


@dataclass
class EntwinedChain:
    """Chain of presentations, each a sub-automaton of the next."""

    presentations: list

    def __post_init__(self):
        for a, b in zip(self.presentations, self.presentations[1:]):
            if not set(a.states) <= set(b.states):
                raise PresentationError("chain link states are not nested")
            if not set(a.edges.items()) <= set(b.edges.items()):
                raise PresentationError("chain link edges are not nested")
            if a.root != b.root:
                raise PresentationError("chain links must share the root")

    def __len__(self):
        return len(self.presentations)

    def link(self, i: int) -> SubPresentation:
        return SubPresentation.from_presentations(self.presentations[i], self.presentations[i + 1])

    def validate_entwined(self):
        """is_entwined on every link; raises with the witness cylinder on failure."""
        for i in range(len(self.presentations) - 1):
            res = is_entwined(self.link(i))
            if not res.entwined:
                raise EntwinementError(f"chain link {i} is not entwined; witness cylinder {res.witness}")

    def to_json(self):
        return {"presentations": [p.to_json() for p in self.presentations]}

    @classmethod
    def from_json(cls, data):
        return cls([TreePresentation.from_json(p) for p in data["presentations"]])


def _glue_everywhere(T: TreePresentation, glue_label: str, tag: str) -> TreePresentation:
    """Attach a fresh binary copy at every vertex via a new label."""
    copy = f"copy_{tag}"
    states = list(T.states) + [copy]
    edges = dict(T.edges)
    for s in T.states:
        edges[(s, glue_label)] = copy
    edges[(copy, "0")] = copy
    edges[(copy, "1")] = copy
    return TreePresentation(states, T.root, edges)


def _glue_alternate(T: TreePresentation, glue_label: str, tag: str, parity) -> tuple[TreePresentation, dict]:
    """Attach fresh binary copies only at even-depth vertices.

    `parity` maps each state to the depth parity of the vertices it carries;
    states must be parity-pure (maintained by the chain builders below).
    """
    even, odd = f"copy_{tag}_e", f"copy_{tag}_o"
    states = list(T.states) + [even, odd]
    edges = dict(T.edges)
    for s in T.states:
        if parity[s] == 0:
            edges[(s, glue_label)] = odd
    edges[(even, "0")] = odd
    edges[(even, "1")] = odd
    edges[(odd, "0")] = even
    edges[(odd, "1")] = even
    new_parity = dict(parity)
    new_parity[even] = 0
    new_parity[odd] = 1
    return TreePresentation(states, T.root, edges), new_parity


def glued_chain(links: int) -> EntwinedChain:
    """Iterated gluing at every vertex: binary shift, glued tree, glued^2 tree, ..."""
    ps = [full_shift(2)]
    for i in range(links):
        ps.append(_glue_everywhere(ps[-1], f"g{i}", str(i)))
    return EntwinedChain(ps)


def alternate_chain(links: int) -> EntwinedChain:
    """Iterated gluing at even-depth vertices only."""
    base = TreePresentation(
        ["e", "o"], "e", {("e", "0"): "o", ("e", "1"): "o", ("o", "0"): "e", ("o", "1"): "e"}
    )
    parity = {"e": 0, "o": 1}
    ps = [base]
    for i in range(links):
        nxt, parity = _glue_alternate(ps[-1], f"g{i}", str(i), parity)
        ps.append(nxt)
    return EntwinedChain(ps)


def load_presentation(path) -> TreePresentation:
    with open(path) as fh:
        return TreePresentation.from_json(json.load(fh))


def load_chain(path) -> EntwinedChain:
    with open(path) as fh:
        return EntwinedChain.from_json(json.load(fh))
