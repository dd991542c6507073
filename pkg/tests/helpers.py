"""Shared brute-force oracles for the test suite. Everything here favors
obvious correctness over speed."""

from itertools import chain, combinations, product

from datawords.finite_automata import (
    MAnd, MExists1, MExists2, MIn, MLab, MLess, MNot, MOr,
    Nfa, REmpty, REps, RSym, RUnion, RConcat, RStar,
)


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r)
                               for r in range(len(items) + 1))


def eval_finite_mso(phi, word, nu):
    """Naive MSO semantics on a finite word (tuple of letters), positions
    1-based; nu maps first-order vars to positions and set vars to sets."""
    n = len(word)
    if isinstance(phi, MLess):
        return nu[phi.x] < nu[phi.y]
    if isinstance(phi, MIn):
        return nu[phi.x] in nu[phi.X]
    if isinstance(phi, MLab):
        return word[nu[phi.x] - 1] == phi.letter
    if isinstance(phi, MNot):
        return not eval_finite_mso(phi.sub, word, nu)
    if isinstance(phi, MAnd):
        return (eval_finite_mso(phi.left, word, nu)
                and eval_finite_mso(phi.right, word, nu))
    if isinstance(phi, MOr):
        return (eval_finite_mso(phi.left, word, nu)
                or eval_finite_mso(phi.right, word, nu))
    if isinstance(phi, MExists1):
        return any(eval_finite_mso(phi.sub, word, {**nu, phi.var: p})
                   for p in range(1, n + 1))
    if isinstance(phi, MExists2):
        return any(eval_finite_mso(phi.sub, word, {**nu, phi.var: frozenset(s)})
                   for s in powerset(range(1, n + 1)))
    raise ValueError("unknown MSO node %r" % (phi,))


def random_nfa(rng, alphabet, nstates):
    states = list(range(nstates))
    trans = []
    for q in states:
        for a in alphabet:
            for r in states:
                if rng.random() < 0.3:
                    trans.append((q, a, r))
    initial = [q for q in states if rng.random() < 0.5] or [0]
    accepting = [q for q in states if rng.random() < 0.5]
    return Nfa(states, alphabet, initial, accepting, trans)


def re_words_upto(expr, alphabet, n):
    """Direct denotation of a regular expression, cut at length n."""
    if isinstance(expr, REmpty):
        return set()
    if isinstance(expr, REps):
        return {()}
    if isinstance(expr, RSym):
        return {(expr.letter,)} if n >= 1 else set()
    if isinstance(expr, RUnion):
        return re_words_upto(expr.left, alphabet, n) | re_words_upto(expr.right, alphabet, n)
    if isinstance(expr, RConcat):
        left = re_words_upto(expr.left, alphabet, n)
        right = re_words_upto(expr.right, alphabet, n)
        return {u + v for u in left for v in right if len(u) + len(v) <= n}
    sub = re_words_upto(expr.sub, alphabet, n)
    out = {()}
    frontier = {()}
    while frontier:
        step = {u + v for u in frontier for v in sub
                if len(u) + len(v) <= n and v}
        step -= out
        out |= step
        frontier = step
    return out


def nra_membership_bruteforce(aut, word, pool):
    """Membership by enumerating every reachable configuration, assigning all
    post registers from the pool by brute product. No solver involved."""
    from datawords.atoms import NIL, eval_qf
    from datawords.nra import CUR, vpre, vpost

    vals = list(pool) + [NIL]
    k = len(aut.registers)
    n = len(word)
    seen = set()
    stack = [(0, q, (NIL,) * k) for q in sorted(aut.initial, key=str)]
    while stack:
        pos, state, regs = stack.pop()
        if (pos, state, regs) in seen:
            continue
        seen.add((pos, state, regs))
        if pos == n and state in aut.accepting:
            return True
        for rule in aut.rules_from(state):
            if rule.is_eps():
                datum, nxt = None, pos
            else:
                if pos == n or word.labels[pos] != rule.letter:
                    continue
                datum, nxt = word.data[pos], pos + 1
            for post in product(vals, repeat=k):
                nu = {vpre(r): v for r, v in zip(aut.registers, regs)}
                nu.update({vpost(r): v for r, v in zip(aut.registers, post)})
                if datum is not None:
                    nu[CUR] = datum
                if eval_qf(rule.constraint, nu, aut.domain):
                    stack.append((nxt, rule.target, post))
    return False


def enum_words(alphabet, values, maxlen):
    """Every data word over the letters and values up to the length bound."""
    from datawords.words import DataWord

    out = [DataWord((), ())]
    for n in range(1, maxlen + 1):
        for labs in product(alphabet, repeat=n):
            for data in product(values, repeat=n):
                out.append(DataWord(labs, data))
    return out


def random_constraint(rng, dom, registers, with_cur=True, depth=2):
    """A random small constraint over the rule variables."""
    from datawords.atoms import And, Atom, Not, TOP
    from datawords.nra import CUR, vpre, vpost

    vars_ = [CUR] if with_cur else []
    for r in registers:
        vars_.extend([vpre(r), vpost(r)])

    def go(d):
        roll = rng.random()
        if d == 0 or roll < 0.5:
            if rng.random() < 0.12:
                return Atom("nil", (rng.choice(vars_),))
            rel = "=" if dom.kind == "equality" else rng.choice(["=", "<"])
            return Atom(rel, (rng.choice(vars_), rng.choice(vars_)))
        if roll < 0.68:
            return Not(go(d - 1))
        return And(go(d - 1), go(d - 1))

    if not vars_:
        return TOP
    return go(depth)


def random_nra(rng, dom, nstates=3, k=1, labels=("a", "b"), eps_frac=0.0):
    """A random automaton; epsilon rules, when present, only point at higher
    state numbers so chains stay acyclic."""
    from datawords.nra import Nra, Rule

    states = ["s%d" % i for i in range(nstates)]
    registers = ["r%d" % (i + 1) for i in range(k)]
    rules = []
    nrules = rng.randint(nstates, 2 * nstates + 2)
    for _ in range(nrules):
        src = rng.randrange(nstates)
        if rng.random() < eps_frac and src + 1 < nstates:
            dst = rng.randrange(src + 1, nstates)
            rules.append(Rule(states[src], None,
                              random_constraint(rng, dom, registers,
                                                with_cur=False),
                              states[dst]))
        else:
            dst = rng.randrange(nstates)
            rules.append(Rule(states[src], rng.choice(labels),
                              random_constraint(rng, dom, registers),
                              states[dst]))
    naccept = rng.randint(1, nstates)
    accepting = rng.sample(states, naccept)
    return Nra(states, labels, dom, registers, [states[0]], accepting, rules)


def random_dre(rng, dom, labels=("a", "b"), values=(1, 2), depth=2, maxk=1,
               maxlit=2):
    """A random small expression. Iteration bodies stay literal-shaped so
    bounded sweeps against the compiled automata remain affordable."""
    from datawords.dre import Concat, Iter, Lit, Union, Zero, lit_of_word
    from datawords.words import DataWord

    def literal():
        from fractions import Fraction
        n = rng.randint(0, maxlit)
        labs = tuple(rng.choice(labels) for _ in range(n))
        raw = [rng.choice(values) for _ in range(n)]
        if dom.kind == "dense-order":
            raw = [Fraction(v) for v in raw]
        return lit_of_word(DataWord(labs, tuple(raw)), dom)

    def go(d, in_iter):
        roll = rng.random()
        if d == 0 or in_iter:
            if roll < 0.08:
                return Zero()
            if roll < 0.75 or in_iter:
                return literal()
        if roll < 0.45:
            return Union(go(d - 1, in_iter), go(d - 1, in_iter))
        if roll < 0.75:
            k = rng.randint(0, maxk)
            return Concat(k, go(d - 1, in_iter), go(d - 1, in_iter))
        k = rng.randint(0, maxk)
        body = literal() if rng.random() < 0.7 else Union(literal(), literal())
        return Iter(k, body)

    return go(depth, False)
