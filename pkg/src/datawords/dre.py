"""Expressions over data words built from region literals, union,
k-contracting concatenation, and k-iteration; a direct semantic oracle; and
the compilations between expressions and register automata."""

import math
from itertools import product

from .atoms import (
    NIL, TOP, Atom, Top, candidate_pool, conj, eq, eval_qf, free_qf_vars,
    parse_qf, print_qf, rename_qf, type_formula, validate_qf,
)
from .nra import (
    CUR, Nra, Rule, annotate_nil, eliminate_epsilon, vpost, vpre,
)
from .finite_automata import (
    Nfa, REmpty, REps, RSym, RUnion, RConcat, RStar, nfa_to_re,
)
from .words import DataWord, parse_data_word, print_data_word


def xvar(i):
    return "x%d" % i


class Dre:
    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __repr__(self):
        return print_dre(self)


class Zero(Dre):
    __slots__ = ()

    def _key(self):
        return ()


class Lit(Dre):
    """All words with this label track whose data track satisfies the
    constraint over x1..xm. A literal parsed from a concrete word keeps it
    for printing; the constraint is then the word's region."""

    __slots__ = ("labels", "phi", "source")

    def __init__(self, labels, phi, source=None):
        self.labels = tuple(labels)
        self.phi = phi
        self.source = source
        allowed = {xvar(i + 1) for i in range(len(self.labels))}
        if not free_qf_vars(phi) <= allowed:
            raise ValueError("literal constraint mentions unknown positions")

    def _key(self):
        return (self.labels, self.phi)


class Union(Dre):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def _key(self):
        return (self.left, self.right)


class Concat(Dre):
    __slots__ = ("k", "left", "right")

    def __init__(self, k, left, right):
        if k < 0:
            raise ValueError("negative interface width")
        self.k = k
        self.left = left
        self.right = right

    def _key(self):
        return (self.k, self.left, self.right)


class Iter(Dre):
    __slots__ = ("k", "sub")

    def __init__(self, k, sub):
        if k < 0:
            raise ValueError("negative interface width")
        self.k = k
        self.sub = sub

    def _key(self):
        return (self.k, self.sub)


def lit_of_word(word, dom):
    return Lit(word.labels,
               type_formula(word.data, dom, [xvar(i + 1)
                                             for i in range(len(word))]),
               source=word)


def dre_labels(expr):
    if isinstance(expr, Lit):
        return set(expr.labels)
    if isinstance(expr, (Union, Concat)):
        return dre_labels(expr.left) | dre_labels(expr.right)
    if isinstance(expr, Iter):
        return dre_labels(expr.sub)
    return set()


def dre_depth(expr):
    if isinstance(expr, (Zero, Lit)):
        return 1
    if isinstance(expr, (Union, Concat)):
        return 1 + max(dre_depth(expr.left), dre_depth(expr.right))
    return 1 + dre_depth(expr.sub)


def dre_maxk(expr):
    if isinstance(expr, (Zero, Lit)):
        return 0
    if isinstance(expr, (Union, Concat)):
        inner = max(dre_maxk(expr.left), dre_maxk(expr.right))
        return max(inner, expr.k) if isinstance(expr, Concat) else inner
    return max(expr.k, dre_maxk(expr.sub))


# ---------------------------------------------------------------------------
# text format

def parse_dre(text, dom):
    return _DreParser(text, dom).parse()


class _DreParser:
    def __init__(self, text, dom):
        self.text = text
        self.dom = dom
        self.pos = 0

    def error(self, msg):
        raise ValueError("%s at offset %d in %r" % (msg, self.pos, self.text))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, s):
        self.skip_ws()
        if not self.text.startswith(s, self.pos):
            self.error("expected %r" % s)
        self.pos += len(s)

    def parse(self):
        e = self.union()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing input")
        return e

    def union(self):
        e = self.concat()
        while self.peek() == "+":
            self.eat("+")
            e = Union(e, self.concat())
        return e

    def concat(self):
        e = self.iterated()
        while self.peek() == ".":
            self.eat(".")
            k = self.braced_int()
            e = Concat(k, e, self.iterated())
        return e

    def iterated(self):
        e = self.atom()
        while self.peek() == "*":
            self.eat("*")
            e = Iter(self.braced_int(), e)
        return e

    def braced_int(self):
        self.eat("{")
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a number")
        k = int(self.text[start:self.pos])
        self.eat("}")
        return k

    def atom(self):
        c = self.peek()
        if c == "0":
            self.eat("0")
            return Zero()
        if c == "(":
            self.eat("(")
            e = self.union()
            self.eat(")")
            return e
        if c == "[":
            self.eat("[")
            end = self.text.find("]", self.pos)
            if end < 0:
                self.error("unclosed literal")
            body = self.text[self.pos:end]
            self.pos = end + 1
            word = parse_data_word(body, self.dom)
            return lit_of_word(word, self.dom)
        if self.text.startswith("any", self.pos):
            self.pos += 3
            self.eat("(")
            # scan to the matching close, split at the first top comma
            depth = 1
            start = self.pos
            comma = None
            while self.pos < len(self.text) and depth:
                ch = self.text[self.pos]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                elif ch == "," and depth == 1 and comma is None:
                    comma = self.pos
                self.pos += 1
            if depth:
                self.error("unclosed any()")
            if comma is None:
                self.error("any() needs a label part and a constraint part")
            labels = tuple(self.text[start:comma].split())
            phi = parse_qf(self.text[comma + 1:self.pos - 1])
            return Lit(labels, phi)
        self.error("expected an expression")


def print_dre(expr):
    return _print_dre(expr, 0)


def _print_dre(expr, level):
    if isinstance(expr, Zero):
        return "0"
    if isinstance(expr, Lit):
        if expr.source is not None:
            return "[%s]" % print_data_word(expr.source)
        return "any(%s, %s)" % (" ".join(expr.labels), print_qf(expr.phi))
    if isinstance(expr, Union):
        s = "%s + %s" % (_print_dre(expr.left, 0), _print_dre(expr.right, 0))
        return "(%s)" % s if level > 0 else s
    if isinstance(expr, Concat):
        s = "%s .{%d} %s" % (_print_dre(expr.left, 1), expr.k,
                             _print_dre(expr.right, 2))
        return "(%s)" % s if level > 1 else s
    if isinstance(expr, Iter):
        return "%s*{%d}" % (_print_dre(expr.sub, 3), expr.k)
    raise TypeError("not an expression: %r" % (expr,))


# ---------------------------------------------------------------------------
# semantic oracle

def dre_oracle(expr, dom, alphabet, extra_rounds=0):
    """Reusable membership decider for one expression, straight off the
    definitions. Interface words for contracting operators are enumerated
    over a candidate pool derived from the word at hand, deduplicated by
    region; the memo is shared across words."""
    memo = {}
    iface_cache = {}
    len_memo = {}

    def lengths(node, bound):
        """Overapproximate set of word lengths <= bound the node can accept;
        data constraints are ignored, so absence is conclusive."""
        key = (id(node), bound)
        if key in len_memo:
            return len_memo[key]
        if isinstance(node, Zero):
            out = frozenset()
        elif isinstance(node, Lit):
            m = len(node.labels)
            out = frozenset([m] if m <= bound else [])
        elif isinstance(node, Union):
            out = lengths(node.left, bound) | lengths(node.right, bound)
        elif isinstance(node, Concat):
            k = node.k
            left = lengths(node.left, bound + k)
            right = lengths(node.right, bound + k)
            out = frozenset(a + b - 2 * k for a in left for b in right
                            if a >= k and b >= k and a + b - 2 * k <= bound)
        else:
            # each fold adds a - 2k to the length; mixed signs generate a
            # whole subgroup, so fall back to the residue test there
            k = node.k
            base = 2 * k
            subl = [a for a in lengths(node.sub, bound + k) if a >= k]
            deltas = sorted({a - 2 * k for a in subl} - {0})
            if any(d > 0 for d in deltas) and any(d < 0 for d in deltas):
                g = 0
                for d in deltas:
                    g = math.gcd(g, abs(d))
                out = frozenset(n for n in range(bound + 1)
                                if (n - base) % g == 0)
            elif deltas:
                cur = set()
                work = [base]
                seen_s = {base}
                while work:
                    s = work.pop()
                    if s <= bound:
                        cur.add(s)
                    for d in deltas:
                        n2 = s + d
                        if 0 <= n2 <= max(bound, base) and n2 not in seen_s:
                            seen_s.add(n2)
                            work.append(n2)
                out = frozenset(cur)
            else:
                out = frozenset([base] if base <= bound else [])
            out = frozenset(n for n in out if n >= 0)
        len_memo[key] = out
        return out

    def rel_code(a, b):
        if a is NIL or b is NIL:
            return (a is NIL, b is NIL)
        if dom.kind == "equality":
            return a == b
        return (a < b, a == b)

    def interfaces(w, k):
        """Interface words for the contracting operators; labels do not
        interact with the data, so deduplication runs on the data type
        alone (relations inside the tuple and against the word's data)."""
        if k == 0:
            return [DataWord((), ())]
        key = (w.data, k)
        if key in iface_cache:
            return iface_cache[key]
        pool = candidate_pool(w.data, k + extra_rounds, dom)
        base = tuple(w.data)
        tuples = []
        seen = set()
        for vals in product(pool, repeat=k):
            sig = tuple(rel_code(v, u) for v in vals for u in base) + tuple(
                rel_code(vals[i], vals[j])
                for i in range(k) for j in range(i + 1, k))
            if sig not in seen:
                seen.add(sig)
                tuples.append(vals)
        out = [DataWord(labs, vals)
               for labs in product(alphabet, repeat=k) for vals in tuples]
        iface_cache[key] = out
        return out

    def member(node, w):
        key = (id(node), w)
        if key in memo:
            return memo[key]
        if len(w) not in lengths(node, len(w)):
            memo[key] = False
            return False
        r = _member(node, w)
        memo[key] = r
        return r

    def _member(node, w):
        if isinstance(node, Zero):
            return False
        if isinstance(node, Lit):
            if w.labels != node.labels:
                return False
            nu = {xvar(i + 1): d for i, d in enumerate(w.data)}
            return eval_qf(node.phi, nu, dom)
        if isinstance(node, Union):
            return member(node.left, w) or member(node.right, w)
        if isinstance(node, Concat):
            n = len(w)
            for i in range(n + 1):
                prefix = DataWord(w.labels[:i], w.data[:i])
                rest = DataWord(w.labels[i:], w.data[i:])
                for v in interfaces(w, node.k):
                    if member(node.left, prefix.concat(v)) \
                            and member(node.right, v.reverse().concat(rest)):
                        return True
            return False
        if isinstance(node, Iter):
            return _iter_member(node, w)
        raise TypeError("not an expression: %r" % (node,))

    def _iter_member(node, w):
        k, sub = node.k, node.sub
        n = len(w)
        if n == 2 * k and w == w.reverse():
            return True
        # a word shorter than the interface cannot be a factor of its own
        if n >= k and member(sub, w):
            return True
        ifs = interfaces(w, k)
        suffix = [DataWord(w.labels[i:], w.data[i:]) for i in range(n + 1)]
        prefix = [DataWord(w.labels[:i], w.data[:i]) for i in range(n + 1)]
        states = set()
        work = []

        def add(i, v):
            if (i, v) not in states:
                states.add((i, v))
                work.append((i, v))
                return member(sub, v.reverse().concat(suffix[i]))
            return False

        for i in range(n + 1):
            for v in ifs:
                if member(sub, prefix[i].concat(v)) and add(i, v):
                    return True
        while work:
            i, v = work.pop()
            head = v.reverse()
            for i2 in range(i, n + 1):
                base = head.concat(DataWord(w.labels[i:i2], w.data[i:i2]))
                for v2 in ifs:
                    if (i2, v2) not in states and member(sub, base.concat(v2)):
                        if add(i2, v2):
                            return True
        return False

    return lambda word: member(expr, word)


def oracle_membership(expr, word, dom, alphabet=None, extra_rounds=0):
    """Decide w in L(E) straight off the definitions."""
    if alphabet is None:
        alphabet = sorted(dre_labels(expr) | set(word.labels))
    return dre_oracle(expr, dom, alphabet, extra_rounds)(word)


# ---------------------------------------------------------------------------
# compiling an expression to an automaton

def _preserve(regs):
    return [eq(vpost(r), vpre(r)) for r in regs]


class _Compiler:
    def __init__(self, alphabet, dom):
        self.alphabet = tuple(alphabet)
        self.dom = dom
        self.counter = 0

    def prefix(self):
        self.counter += 1
        return "g%d" % self.counter

    def compile(self, node):
        if isinstance(node, Zero):
            p = self.prefix()
            return Nra([("z", p)], self.alphabet, self.dom, [], [("z", p)],
                       [], [])
        if isinstance(node, Lit):
            return self.compile_lit(node)
        if isinstance(node, Union):
            a = self.compile(node.left)
            b = self.compile(node.right)
            return Nra(a.states | b.states, self.alphabet, self.dom,
                       a.registers + b.registers, a.initial | b.initial,
                       a.accepting | b.accepting, a.rules + b.rules)
        if isinstance(node, Concat):
            return self.compile_concat(node)
        if isinstance(node, Iter):
            return self.compile_iter(node)
        raise TypeError("not an expression: %r" % (node,))

    def compile_lit(self, node):
        p = self.prefix()
        m = len(node.labels)
        for letter in node.labels:
            if letter not in self.alphabet:
                raise ValueError("literal letter %r outside alphabet"
                                 % (letter,))
        if m == 0:
            accept = [(p, 0)] if eval_qf(node.phi, {}, self.dom) else []
            return Nra([(p, 0)], self.alphabet, self.dom, [], [(p, 0)],
                       accept, [])
        regs = ["%s_w%d" % (p, i + 1) for i in range(m)]
        states = [(p, i) for i in range(m + 1)]
        rules = []
        for i in range(1, m + 1):
            parts = [eq(vpost(regs[i - 1]), CUR)]
            parts += _preserve(regs[:i - 1])
            if i == m:
                sub = {xvar(j + 1): vpost(regs[j]) for j in range(m)}
                parts.append(rename_qf(node.phi, sub))
            rules.append(Rule((p, i - 1), node.labels[i - 1], conj(parts),
                              (p, i)))
        return Nra(states, self.alphabet, self.dom, regs, [(p, 0)],
                   [(p, m)], rules)

    def compile_concat(self, node):
        a = self.compile(node.left)
        b = self.compile(node.right)
        k = node.k
        p = self.prefix()
        s = ["%s_s%d" % (p, j + 1) for j in range(k)]
        labwords = [tuple(t) for j in range(k + 1)
                    for t in product(self.alphabet, repeat=j)]
        full = [t for t in labwords if len(t) == k]
        states = set()
        rules = []

        def p1(q):
            return ("c1", p, q)

        def p2(q, j, labs):
            return ("c2", p, q, j, labs)

        def p3(q, j, labs):
            return ("c3", p, q, j, labs)

        def p4(q):
            return ("c4", p, q)

        states.update(p1(q) for q in a.states)
        states.update(p4(q) for q in b.states)
        for q in a.states:
            for labs in labwords:
                if 1 <= len(labs) <= k:
                    states.add(p2(q, len(labs), labs))
        for q in b.states:
            for labs in full:
                for j in range(k):
                    states.add(p3(q, j, labs))

        # P1: run the left automaton on real input
        for t in a.rules:
            rules.append(Rule(p1(t.source), t.letter, t.constraint,
                              p1(t.target)))
        # P2: guess the interface with epsilon steps, feeding the left
        # automaton and banking the data
        for t in a.input_rules():
            for j0 in range(k):
                for labs in (t2 for t2 in labwords if len(t2) == j0):
                    src = p1(t.source) if j0 == 0 else p2(t.source, j0, labs)
                    phi = conj([rename_qf(t.constraint,
                                          {CUR: vpost(s[j0])})]
                               + _preserve(s[:j0]))
                    rules.append(Rule(src, None, phi,
                                      p2(t.target, j0 + 1, labs + (t.letter,))))
        for t in a.eps_rules():
            for j in range(1, k + 1):
                for labs in (t2 for t2 in labwords if len(t2) == j):
                    phi = conj([t.constraint] + _preserve(s[:j]))
                    rules.append(Rule(p2(t.source, j, labs), None, phi,
                                      p2(t.target, j, labs)))
        # seam: left accepted the guessed factor, hand the banked interface
        # to the right automaton
        if k == 0:
            for q in a.accepting:
                for q0 in b.initial:
                    rules.append(Rule(p1(q), None, TOP, p4(q0)))
        else:
            for q in a.accepting:
                for labs in full:
                    for q0 in b.initial:
                        rules.append(Rule(p2(q, k, labs), None,
                                          conj(_preserve(s)),
                                          p3(q0, 0, labs)))
        # P3: replay the reversed interface into the right automaton
        for t in b.input_rules():
            for labs in full:
                for j in range(k):
                    if labs[k - 1 - j] != t.letter:
                        continue
                    phi = conj([rename_qf(t.constraint,
                                          {CUR: vpre(s[k - 1 - j])})]
                               + _preserve(s[:k - 1 - j]))
                    dst = p4(t.target) if j + 1 == k \
                        else p3(t.target, j + 1, labs)
                    rules.append(Rule(p3(t.source, j, labs), None, phi, dst))
        for t in b.eps_rules():
            for labs in full:
                for j in range(k):
                    phi = conj([t.constraint] + _preserve(s[:k - j]))
                    rules.append(Rule(p3(t.source, j, labs), None, phi,
                                      p3(t.target, j, labs)))
        # P4: run the right automaton on the real suffix
        for t in b.rules:
            rules.append(Rule(p4(t.source), t.letter, t.constraint,
                              p4(t.target)))

        return Nra(states, self.alphabet, self.dom,
                   a.registers + b.registers + tuple(s),
                   [p1(q) for q in a.initial],
                   [p4(q) for q in b.accepting], rules)

    def compile_iter(self, node):
        a = self.compile(node.sub)
        k = node.k
        p = self.prefix()
        pr = ["%s_p%d" % (p, j + 1) for j in range(k)]
        h = ["%s_h%d" % (p, j + 1) for j in range(k)]
        labwords = [tuple(t) for j in range(k + 1)
                    for t in product(self.alphabet, repeat=j)]
        full = [t for t in labwords if len(t) == k]
        states = set()
        rules = []

        def real(q, c):
            # c saturates at k: a factor taken wholly from real input must
            # be at least as long as the interface it stands in for
            return ("ir", p, q, c)

        def replay(q, j, labs):
            return ("ip", p, q, j, labs)

        def guess(q, j, labs):
            return ("ig", p, q, j, labs)

        def pal_store(j, labs):
            return ("pa", p, j, labs)

        def pal_check(j, labs):
            return ("pb", p, j, labs)

        states.update(real(q, c) for q in a.states for c in range(k + 1))
        for q in a.states:
            for labs in labwords:
                if 1 <= len(labs) <= k:
                    states.add(guess(q, len(labs), labs))
            for labs in full:
                for j in range(k):
                    states.add(replay(q, j, labs))
        for labs in labwords:
            j = len(labs)
            if j < k:
                states.add(pal_store(j, labs))
        for labs in full:
            for j in range(k + 1):
                states.add(pal_check(j, labs))

        # factor body on real input, no interface pending
        for t in a.rules:
            for c in range(k + 1):
                c2 = c if t.is_eps() else min(k, c + 1)
                rules.append(Rule(real(t.source, c), t.letter, t.constraint,
                                  real(t.target, c2)))
        # trailing guess of the next interface
        for t in a.input_rules():
            for j0 in range(k):
                for labs in (t2 for t2 in labwords if len(t2) == j0):
                    phi = conj([rename_qf(t.constraint,
                                          {CUR: vpost(pr[j0])})]
                               + _preserve(pr[:j0]))
                    dst = guess(t.target, j0 + 1, labs + (t.letter,))
                    if j0 == 0:
                        for c in range(k + 1):
                            rules.append(Rule(real(t.source, c), None, phi,
                                              dst))
                    else:
                        rules.append(Rule(guess(t.source, j0, labs), None,
                                          phi, dst))
        for t in a.eps_rules():
            for j in range(1, k + 1):
                for labs in (t2 for t2 in labwords if len(t2) == j):
                    phi = conj([t.constraint] + _preserve(pr[:j]))
                    rules.append(Rule(guess(t.source, j, labs), None, phi,
                                      guess(t.target, j, labs)))
        # seam: factor accepted, next factor starts by replaying
        if k == 0:
            for q in a.accepting:
                for q0 in a.initial:
                    rules.append(Rule(real(q, 0), None, TOP, real(q0, 0)))
        else:
            for q in a.accepting:
                for labs in full:
                    for q0 in a.initial:
                        rules.append(Rule(guess(q, k, labs), None,
                                          conj(_preserve(pr)),
                                          replay(q0, 0, labs)))
        # replay the reversed pending interface into the next factor
        for t in a.input_rules():
            for labs in full:
                for j in range(k):
                    if labs[k - 1 - j] != t.letter:
                        continue
                    phi = conj([rename_qf(t.constraint,
                                          {CUR: vpre(pr[k - 1 - j])})]
                               + _preserve(pr[:k - 1 - j]))
                    dst = real(t.target, k) if j + 1 == k \
                        else replay(t.target, j + 1, labs)
                    rules.append(Rule(replay(t.source, j, labs), None, phi,
                                      dst))
        for t in a.eps_rules():
            for labs in full:
                for j in range(k):
                    phi = conj([t.constraint] + _preserve(pr[:k - j]))
                    rules.append(Rule(replay(t.source, j, labs), None, phi,
                                      replay(t.target, j, labs)))
        # the zero-factor branch: palindromes of length 2k
        for labs in labwords:
            j = len(labs)
            if j >= k:
                continue
            for sigma in self.alphabet:
                phi = conj([eq(vpost(h[j]), CUR)] + _preserve(h[:j]))
                dst = pal_check(0, labs + (sigma,)) if j + 1 == k \
                    else pal_store(j + 1, labs + (sigma,))
                rules.append(Rule(pal_store(j, labs), sigma, phi, dst))
        for labs in full:
            for j in range(k):
                sigma = labs[k - 1 - j]
                phi = conj([eq(CUR, vpre(h[k - 1 - j]))]
                           + _preserve(h[:k - 1 - j]))
                rules.append(Rule(pal_check(j, labs), sigma, phi,
                                  pal_check(j + 1, labs)))

        initial = [real(q, 0) for q in a.initial]
        accepting = [real(q, k) for q in a.accepting]
        accepting += [pal_check(k, labs) for labs in full]
        if k == 0:
            initial.append(pal_check(0, ()))
        else:
            initial.append(pal_store(0, ()))
        return Nra(states, self.alphabet, self.dom,
                   a.registers + tuple(pr) + tuple(h),
                   initial, accepting, rules)


def eps_chain_bound(expr):
    """How many consecutive epsilon steps a run of the compiled gadget can
    need: guesses and replays per interface, interleaved with the body's own
    chains, with a few fully virtual factor rounds on top."""
    if isinstance(expr, (Zero, Lit)):
        return 0
    if isinstance(expr, Union):
        return max(eps_chain_bound(expr.left), eps_chain_bound(expr.right))
    if isinstance(expr, Concat):
        a = eps_chain_bound(expr.left)
        b = eps_chain_bound(expr.right)
        return a + b + expr.k * (a + b + 2) + 1
    if isinstance(expr, Iter):
        a = eps_chain_bound(expr.sub)
        return 4 * (2 * expr.k * (a + 1) + a + 2)
    raise TypeError("not an expression: %r" % (expr,))


def compile_dre_eps(expr, alphabet, dom):
    """The raw compiled automaton, epsilon rules and all, plus its structural
    chain bound."""
    aut = _Compiler(alphabet, dom).compile(expr)
    return aut, max(1, eps_chain_bound(expr))


def dre_to_nra(expr, alphabet, dom):
    """An epsilon-free automaton with the expression's language."""
    aut, bound = compile_dre_eps(expr, alphabet, dom)
    return eliminate_epsilon(aut, bound, trusted=True)


# ---------------------------------------------------------------------------
# compiling an automaton to an expression

def pal_expr(k, alphabet):
    """Palindromes of length 2k as an expression."""
    if k == 0:
        return Lit((), TOP)
    phi = conj([eq(xvar(i), xvar(2 * k + 1 - i)) for i in range(1, k + 1)])
    out = None
    for labs in product(alphabet, repeat=k):
        lit = Lit(labs + tuple(reversed(labs)), phi)
        out = lit if out is None else Union(out, lit)
    return out


def nra_to_dre(aut):
    """An expression with the automaton's language, through the automaton's
    transition-label NFA. Nil-ness of registers is pushed into states first
    so every rule constraint reads over real values."""
    if aut.has_eps():
        raise ValueError("eliminate epsilon rules before building an expression")
    k = aut.k
    ann = annotate_nil(aut)
    rules = list(ann.rules)
    if not aut.alphabet:
        empty_ok = any(q in ann.accepting for q in ann.initial)
        return Lit((), TOP) if empty_ok else Zero()
    pad = aut.alphabet[0]

    transitions = [(r.source, i, r.target) for i, r in enumerate(rules)]
    nfa = Nfa(ann.states, tuple(range(len(rules))), ann.initial,
              ann.accepting, transitions)
    skeleton = nfa_to_re(nfa)

    def block(rule):
        sub = {CUR: xvar(k + 1)}
        for i, r in enumerate(aut.registers, start=1):
            sub[vpre(r)] = xvar(k - i + 1)
            sub[vpost(r)] = xvar(k + 1 + i)
        labels = (pad,) * k + (rule.letter,) + (pad,) * k
        return Lit(labels, rename_qf(rule.constraint, sub))

    def walk(e):
        if isinstance(e, REmpty):
            return Zero()
        if isinstance(e, REps):
            return pal_expr(k, aut.alphabet)
        if isinstance(e, RSym):
            return block(rules[e.letter])
        if isinstance(e, RUnion):
            return Union(walk(e.left), walk(e.right))
        if isinstance(e, RConcat):
            return Concat(k, walk(e.left), walk(e.right))
        if isinstance(e, RStar):
            return Iter(k, walk(e.sub))
        raise TypeError("unexpected expression part: %r" % (e,))

    guard = Lit((pad,) * k, TOP)
    return Concat(k, guard, Concat(k, walk(skeleton), guard))
