"""Classical finite-word machinery: NFAs over arbitrary hashable letters,
regular expressions in both directions (Kleene), and a compiler from MSO on
finite words to NFAs via variable-track expansion."""

from itertools import product


class Nfa:
    def __init__(self, states, alphabet, initial, accepting, transitions):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.transitions = frozenset(transitions)
        for q, a, r in self.transitions:
            if q not in self.states or r not in self.states:
                raise ValueError("transition endpoint outside state set")
            if a not in self.alphabet:
                raise ValueError("transition letter %r outside alphabet" % (a,))
        if not self.initial <= self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting outside state set")

    def step(self, current, letter):
        return frozenset(r for q, a, r in self.transitions
                         if q in current and a == letter)

    def accepts(self, word):
        current = self.initial
        for a in word:
            current = self.step(current, a)
            if not current:
                return False
        return bool(current & self.accepting)

    def lang_upto(self, n):
        """All accepted letter tuples of length <= n."""
        out = []
        layer = [((), self.initial)]
        for _ in range(n + 1):
            nxt = []
            for word, cur in layer:
                if cur & self.accepting:
                    out.append(word)
                for a in sorted(self.alphabet, key=str):
                    dst = self.step(cur, a)
                    if dst:
                        nxt.append((word + (a,), dst))
            layer = nxt
        return out

    def map_letters(self, fn):
        """Homomorphic image under a letter mapping (projection)."""
        alphabet = frozenset(fn(a) for a in self.alphabet)
        trans = frozenset((q, fn(a), r) for q, a, r in self.transitions)
        return Nfa(self.states, alphabet, self.initial, self.accepting, trans)

    def determinize(self):
        """Subset construction; the result is complete over the alphabet."""
        letters = sorted(self.alphabet, key=str)
        start = self.initial
        seen = {start}
        work = [start]
        trans = set()
        while work:
            cur = work.pop()
            for a in letters:
                dst = self.step(cur, a)
                trans.add((cur, a, dst))
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
        accepting = frozenset(s for s in seen if s & self.accepting)
        return Nfa(seen, self.alphabet, [start], accepting, trans)

    def complement(self):
        det = self.determinize()
        return Nfa(det.states, det.alphabet, det.initial,
                   det.states - det.accepting, det.transitions)

    def is_empty(self):
        seen = set(self.initial)
        work = list(self.initial)
        while work:
            q = work.pop()
            if q in self.accepting:
                return False
            for p, _, r in self.transitions:
                if p == q and r not in seen:
                    seen.add(r)
                    work.append(r)
        return True

    def renumber(self):
        """Map states to 0..n-1 in a canonical order."""
        order = sorted(self.states, key=str)
        ix = {q: i for i, q in enumerate(order)}
        return Nfa(range(len(order)), self.alphabet,
                   [ix[q] for q in self.initial],
                   [ix[q] for q in self.accepting],
                   [(ix[q], a, ix[r]) for q, a, r in self.transitions])


def nfa_union(a, b):
    tag = lambda side, q: (side, q)
    states = [tag(0, q) for q in a.states] + [tag(1, q) for q in b.states]
    trans = ([(tag(0, q), x, tag(0, r)) for q, x, r in a.transitions]
             + [(tag(1, q), x, tag(1, r)) for q, x, r in b.transitions])
    return Nfa(states, a.alphabet | b.alphabet,
               [tag(0, q) for q in a.initial] + [tag(1, q) for q in b.initial],
               [tag(0, q) for q in a.accepting] + [tag(1, q) for q in b.accepting],
               trans)


def nfa_intersection(a, b):
    alphabet = a.alphabet & b.alphabet
    states = set(product(a.states, b.states))
    trans = []
    for q1, x, r1 in a.transitions:
        if x not in alphabet:
            continue
        for q2, y, r2 in b.transitions:
            if y == x:
                trans.append(((q1, q2), x, (r1, r2)))
    return Nfa(states, alphabet,
               product(a.initial, b.initial),
               product(a.accepting, b.accepting), trans)


# ---------------------------------------------------------------------------
# regular expressions over arbitrary letters

class Re:
    def __repr__(self):
        return "Re(%s)" % print_re(self)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))


class REmpty(Re):
    def _key(self):
        return ()


class REps(Re):
    def _key(self):
        return ()


class RSym(Re):
    def __init__(self, letter):
        self.letter = letter

    def _key(self):
        return (self.letter,)


class RUnion(Re):
    def __init__(self, left, right):
        self.left, self.right = left, right

    def _key(self):
        return (self.left, self.right)


class RConcat(Re):
    def __init__(self, left, right):
        self.left, self.right = left, right

    def _key(self):
        return (self.left, self.right)


class RStar(Re):
    def __init__(self, sub):
        self.sub = sub

    def _key(self):
        return (self.sub,)


R_EMPTY = REmpty()
R_EPS = REps()


def r_union(a, b):
    if isinstance(a, REmpty):
        return b
    if isinstance(b, REmpty):
        return a
    if a == b:
        return a
    return RUnion(a, b)


def r_concat(a, b):
    if isinstance(a, REmpty) or isinstance(b, REmpty):
        return R_EMPTY
    if isinstance(a, REps):
        return b
    if isinstance(b, REps):
        return a
    return RConcat(a, b)


def r_star(a):
    if isinstance(a, (REmpty, REps)):
        return R_EPS
    if isinstance(a, RStar):
        return a
    return RStar(a)


def print_re(re):
    if isinstance(re, REmpty):
        return "0"
    if isinstance(re, REps):
        return "e"
    if isinstance(re, RSym):
        return repr(re.letter)
    if isinstance(re, RUnion):
        return "(%s + %s)" % (print_re(re.left), print_re(re.right))
    if isinstance(re, RConcat):
        return "(%s %s)" % (print_re(re.left), print_re(re.right))
    return "%s*" % print_re(re.sub)


def nfa_to_re(nfa):
    """State elimination on the renumbered automaton, removing states in
    ascending id order."""
    a = nfa.renumber()
    n = len(a.states)
    start, end = -1, n
    edges = {}

    def add(p, q, r):
        edges[(p, q)] = r_union(edges.get((p, q), R_EMPTY), r)

    for q in sorted(a.initial):
        add(start, q, R_EPS)
    for q in sorted(a.accepting):
        add(q, end, R_EPS)
    for p, x, q in sorted(a.transitions, key=lambda t: (t[0], t[2], str(t[1]))):
        add(p, q, RSym(x))

    for k in range(n):
        loop_star = r_star(edges.pop((k, k), R_EMPTY))
        into = sorted(((p, r) for (p, q), r in edges.items() if q == k and p != k),
                      key=lambda pr: pr[0])
        outof = sorted(((q, r) for (p, q), r in edges.items() if p == k and q != k),
                       key=lambda qr: qr[0])
        for (p, _) in into:
            edges.pop((p, k))
        for (q, _) in outof:
            edges.pop((k, q))
        for p, rin in into:
            for q, rout in outof:
                add(p, q, r_concat(rin, r_concat(loop_star, rout)))
    return edges.get((start, end), R_EMPTY)


def re_to_nfa(re, alphabet):
    """Thompson-style construction; the result has no epsilon transitions."""
    counter = [0]

    def fresh():
        counter[0] += 1
        return counter[0]

    def build(r):
        # returns (states, initial, accepting, trans, eps) with eps pairs
        if isinstance(r, REmpty):
            q = fresh()
            return {q}, {q}, set(), set(), set()
        if isinstance(r, REps):
            q = fresh()
            return {q}, {q}, {q}, set(), set()
        if isinstance(r, RSym):
            q, p = fresh(), fresh()
            return {q, p}, {q}, {p}, {(q, r.letter, p)}, set()
        if isinstance(r, RUnion):
            s1, i1, a1, t1, e1 = build(r.left)
            s2, i2, a2, t2, e2 = build(r.right)
            return s1 | s2, i1 | i2, a1 | a2, t1 | t2, e1 | e2
        if isinstance(r, RConcat):
            s1, i1, a1, t1, e1 = build(r.left)
            s2, i2, a2, t2, e2 = build(r.right)
            eps = e1 | e2 | {(q, p) for q in a1 for p in i2}
            return s1 | s2, i1, a2, t1 | t2, eps
        s1, i1, a1, t1, e1 = build(r.sub)
        q = fresh()
        eps = e1 | {(p, x) for p in a1 for x in i1} | {(q, x) for x in i1}
        return s1 | {q}, {q}, a1 | {q}, t1, eps

    states, initial, accepting, trans, eps = build(re)

    succ = {}
    for p, q in eps:
        succ.setdefault(p, set()).add(q)

    def closure(qs):
        out = set(qs)
        work = list(qs)
        while work:
            q = work.pop()
            for r in succ.get(q, ()):
                if r not in out:
                    out.add(r)
                    work.append(r)
        return out

    new_trans = set()
    for p in states:
        for q in closure({p}):
            for (q2, a, r) in trans:
                if q2 == q:
                    for r2 in closure({r}):
                        new_trans.add((p, a, r2))
    init_cl = closure(initial)
    new_acc = set(accepting)
    new_init = init_cl
    return Nfa(states, alphabet, new_init, new_acc, new_trans)


# ---------------------------------------------------------------------------
# MSO over finite words

class FiniteMso:
    def __repr__(self):
        return type(self).__name__ + repr(self.__dict__)


class MLess(FiniteMso):
    def __init__(self, x, y):
        self.x, self.y = x, y


class MIn(FiniteMso):
    def __init__(self, x, X):
        self.x, self.X = x, X


class MLab(FiniteMso):
    def __init__(self, letter, x):
        self.letter, self.x = letter, x


class MNot(FiniteMso):
    def __init__(self, sub):
        self.sub = sub


class MAnd(FiniteMso):
    def __init__(self, left, right):
        self.left, self.right = left, right


class MOr(FiniteMso):
    def __init__(self, left, right):
        self.left, self.right = left, right


class MExists1(FiniteMso):
    def __init__(self, var, sub):
        self.var, self.sub = var, sub


class MExists2(FiniteMso):
    def __init__(self, var, sub):
        self.var, self.sub = var, sub


def _expanded_alphabet(alphabet, nvars):
    return [(a, bits) for a in sorted(alphabet, key=str)
            for bits in product((0, 1), repeat=nvars)]


def _last_index(var_order, var):
    # rightmost occurrence, so rebinding a name shadows correctly
    return len(var_order) - 1 - var_order[::-1].index(var)


def _consistency_nfa(alphabet, var_order, var):
    # exactly one 1 on the var's bit track
    i = _last_index(var_order, var)
    letters = _expanded_alphabet(alphabet, len(var_order))
    trans = []
    for (a, bits) in letters:
        if bits[i]:
            trans.append((0, (a, bits), 1))
        else:
            trans.append((0, (a, bits), 0))
            trans.append((1, (a, bits), 1))
    return Nfa([0, 1], letters, [0], [1], trans)


def _atom_nfa(phi, alphabet, var_order):
    letters = _expanded_alphabet(alphabet, len(var_order))
    ix = {v: _last_index(var_order, v) for v in var_order}
    if isinstance(phi, MLess):
        xi, yi = ix[phi.x], ix[phi.y]
        trans = []
        for (a, bits) in letters:
            bx, by = bits[xi], bits[yi]
            if not bx and not by:
                trans.append((0, (a, bits), 0))
                trans.append((2, (a, bits), 2))
            if bx and not by:
                trans.append((0, (a, bits), 1))
            if not bx:
                if by:
                    trans.append((1, (a, bits), 2))
                else:
                    trans.append((1, (a, bits), 1))
        return Nfa([0, 1, 2], letters, [0], [2], trans)
    if isinstance(phi, MIn):
        xi, Xi = ix[phi.x], ix[phi.X]
        trans = []
        for (a, bits) in letters:
            if not bits[xi]:
                trans.append((0, (a, bits), 0))
            elif bits[Xi]:
                trans.append((0, (a, bits), 1))
            trans.append((1, (a, bits), 1))
        return Nfa([0, 1], letters, [0], [1], trans)
    if isinstance(phi, MLab):
        xi = ix[phi.x]
        trans = []
        for (a, bits) in letters:
            if not bits[xi]:
                trans.append((0, (a, bits), 0))
            elif a == phi.letter:
                trans.append((0, (a, bits), 1))
            trans.append((1, (a, bits), 1))
        return Nfa([0, 1], letters, [0], [1], trans)
    raise ValueError("not an atom: %r" % (phi,))


def mso_to_nfa(phi, alphabet):
    """Compile an MSO sentence on finite words to an NFA over the alphabet."""

    def compile_(phi, var_order):
        if isinstance(phi, (MLess, MIn, MLab)):
            return _atom_nfa(phi, alphabet, var_order)
        if isinstance(phi, MNot):
            sub = compile_(phi.sub, var_order)
            full = _expanded_alphabet(alphabet, len(var_order))
            sub = Nfa(sub.states, full, sub.initial, sub.accepting, sub.transitions)
            return sub.complement()
        if isinstance(phi, MAnd):
            return nfa_intersection(compile_(phi.left, var_order),
                                    compile_(phi.right, var_order))
        if isinstance(phi, MOr):
            return nfa_union(compile_(phi.left, var_order),
                             compile_(phi.right, var_order))
        if isinstance(phi, (MExists1, MExists2)):
            var_order2 = var_order + [phi.var]
            inner = compile_(phi.sub, var_order2)
            if isinstance(phi, MExists1):
                inner = nfa_intersection(
                    inner, _consistency_nfa(alphabet, var_order2, phi.var))
            dropped = inner.map_letters(lambda l: (l[0], l[1][:-1]))
            return dropped.renumber()
        raise ValueError("unknown MSO node %r" % (phi,))

    out = compile_(phi, [])
    return out.map_letters(lambda l: l[0]).renumber()
