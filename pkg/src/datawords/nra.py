"""Register automata with nondeterministic reassignment (guessing) over data
words: runs and membership, emptiness through a region abstraction, guess
classification, epsilon-rule composition, and the injective normal form the
logic translation needs."""

import bisect
import json
from fractions import Fraction

from .atoms import (
    BOT, NIL, And, Atom, Not, Top, TOP, candidate_pool, conj, domain_by_kind,
    eq, eval_qf, free_qf_vars, linear_pool, nil, parse_qf, prepare_solver,
    print_qf, region_representatives_lifted, rename_qf, satisfiable_qf,
    solve_qf, type_of, validate_qf,
)
from .words import DataWord

CUR = "cur"


def vpre(reg):
    return reg + "^pre"


def vpost(reg):
    return reg + "^post"


class Rule:
    """One transition: letter is None for an epsilon rule (no input consumed,
    constraint must not mention cur)."""

    __slots__ = ("source", "letter", "constraint", "target")

    def __init__(self, source, letter, constraint, target):
        self.source = source
        self.letter = letter
        self.constraint = constraint
        self.target = target

    def is_eps(self):
        return self.letter is None

    def __repr__(self):
        lab = "eps" if self.letter is None else repr(self.letter)
        return "Rule(%r --%s[%s]--> %r)" % (
            self.source, lab, print_qf(self.constraint), self.target)

    def __eq__(self, other):
        return (isinstance(other, Rule)
                and (self.source, self.letter, self.constraint, self.target)
                == (other.source, other.letter, other.constraint, other.target))

    def __hash__(self):
        return hash((self.source, self.letter, self.constraint, self.target))


class Nra:
    """A register automaton with guessing. Registers start Nil; a rule fires
    when its constraint holds of (pre registers, current datum, post
    registers); post registers the constraint does not mention are havocked."""

    def __init__(self, states, alphabet, domain, registers, initial, accepting,
                 rules):
        self.states = frozenset(states)
        self.alphabet = tuple(alphabet)
        self.domain = domain
        self.registers = tuple(registers)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.rules = tuple(rules)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has duplicate letters")
        if len(set(self.registers)) != len(self.registers):
            raise ValueError("duplicate register names")
        if not self.initial <= self.states or not self.accepting <= self.states:
            raise ValueError("initial/accepting outside state set")
        allowed = {CUR} | {vpre(r) for r in self.registers} \
            | {vpost(r) for r in self.registers}
        eps_allowed = allowed - {CUR}
        for rule in self.rules:
            if rule.source not in self.states or rule.target not in self.states:
                raise ValueError("rule endpoint outside state set")
            if rule.letter is not None and rule.letter not in self.alphabet:
                raise ValueError("rule letter %r outside alphabet" % (rule.letter,))
            validate_qf(rule.constraint, self.domain,
                        eps_allowed if rule.is_eps() else allowed)

    @property
    def k(self):
        return len(self.registers)

    def input_rules(self):
        return [r for r in self.rules if not r.is_eps()]

    def eps_rules(self):
        return [r for r in self.rules if r.is_eps()]

    def has_eps(self):
        return any(r.is_eps() for r in self.rules)

    def rules_from(self, state):
        return [r for r in self.rules if r.source == state]

    def initial_valuation(self):
        return (NIL,) * len(self.registers)

    def __repr__(self):
        return "Nra(states=%d, k=%d, rules=%d, %s)" % (
            len(self.states), self.k, len(self.rules), self.domain.kind)


# ---------------------------------------------------------------------------
# JSON interchange

def nra_to_json(aut):
    doc = {
        "states": sorted(str(q) for q in aut.states),
        "alphabet": list(aut.alphabet),
        "atoms": aut.domain.kind,
        "registers": list(aut.registers),
        "initial": sorted(str(q) for q in aut.initial),
        "accepting": sorted(str(q) for q in aut.accepting),
        "rules": [
            {"from": str(r.source), "letter": r.letter,
             "constraint": print_qf(r.constraint), "to": str(r.target)}
            for r in aut.input_rules()],
        "eps_rules": [
            {"from": str(r.source), "constraint": print_qf(r.constraint),
             "to": str(r.target)}
            for r in aut.eps_rules()],
    }
    return doc


def nra_from_json(doc):
    if isinstance(doc, str):
        doc = json.loads(doc)
    dom = domain_by_kind(doc["atoms"])
    rules = [Rule(r["from"], r["letter"], parse_qf(r["constraint"]), r["to"])
             for r in doc.get("rules", [])]
    rules += [Rule(r["from"], None, parse_qf(r["constraint"]), r["to"])
              for r in doc.get("eps_rules", [])]
    return Nra(doc["states"], doc["alphabet"], dom, doc["registers"],
               doc["initial"], doc["accepting"], rules)


def stringify_states(aut):
    """Rename every state to a string; compiler constructions build tuple
    states, the interchange format wants flat names."""
    order = sorted(aut.states, key=str)
    names = {}
    for q in order:
        base = q if isinstance(q, str) else "q%d" % order.index(q)
        name = base
        n = 2
        while name in names.values():
            name = "%s_%d" % (base, n)
            n += 1
        names[q] = name
    return Nra([names[q] for q in aut.states], aut.alphabet, aut.domain,
               aut.registers,
               [names[q] for q in aut.initial],
               [names[q] for q in aut.accepting],
               [Rule(names[r.source], r.letter, r.constraint, names[r.target])
                for r in aut.rules])


# ---------------------------------------------------------------------------
# runs and membership

class Step:
    """One applied rule in a run: datum is None on epsilon steps."""

    __slots__ = ("rule", "datum", "pre", "post")

    def __init__(self, rule, datum, pre, post):
        self.rule = rule
        self.datum = datum
        self.pre = pre
        self.post = post

    def __repr__(self):
        return "Step(%r, datum=%r)" % (self.rule, self.datum)


class Run:
    """An accepting run: the initial state plus applied steps."""

    def __init__(self, start, steps):
        self.start = start
        self.steps = list(steps)

    def final_state(self):
        return self.steps[-1].rule.target if self.steps else self.start

    def __len__(self):
        return len(self.steps)


def default_pool(aut, word, extra=None):
    if extra is None:
        extra = aut.k + 1
    if aut.domain.kind == "dense-order":
        # per-gap insertion; the round-based pool grows exponentially in
        # extra, which the wide automata coming out of the compilers cannot
        # afford
        return linear_pool(word.data, extra, aut.domain)
    return candidate_pool(word.data, extra, aut.domain)


class Unk:
    """A havocked register value nobody has looked at yet. It stays symbolic
    until a constraint genuinely reads the register; copies share identity so
    late binding stays consistent."""

    __slots__ = ("uid",)
    _canon = []

    def __init__(self, uid):
        self.uid = uid

    def __repr__(self):
        return "?%d" % self.uid

    @classmethod
    def canonical(cls, n):
        while len(cls._canon) <= n:
            cls._canon.append(cls(-len(cls._canon) - 1))
        return cls._canon[n]


def _normalize_regs(regs):
    ids = {}
    out = []
    for v in regs:
        if isinstance(v, Unk):
            idx = ids.setdefault(v.uid, len(ids))
            out.append(Unk.canonical(idx))
        else:
            out.append(v)
    return tuple(out)


def _conjuncts(phi):
    if isinstance(phi, And):
        return _conjuncts(phi.left) + _conjuncts(phi.right)
    return [phi]


def _rule_solver_plan(aut):
    """Per rule: top-level copy conjuncts handled symbolically, the residual
    constraint for the solver, which pre registers it genuinely reads, and
    how each post register is produced."""
    read_anywhere = set()
    for rule in aut.rules:
        for v in free_qf_vars(rule.constraint):
            if v.endswith("^pre"):
                read_anywhere.add(v[:-4])
    plans = []
    for rule in aut.rules:
        parts = _conjuncts(rule.constraint)
        copy_cand = set()
        rest_parts = []
        for p in parts:
            reg = None
            if isinstance(p, Atom) and p.rel == "=":
                a, b = p.args
                if a.endswith("^post") and b == vpre(a[:-5]):
                    reg = a[:-5]
                elif a.endswith("^pre") and b == vpost(a[:-4]):
                    reg = a[:-4]
            if reg is not None and reg not in copy_cand:
                copy_cand.add(reg)
            else:
                rest_parts.append(p)
        rest = conj(rest_parts)
        rest_vars = free_qf_vars(rest)
        # a copy register whose variables also occur elsewhere must go back
        # to the solver
        copies = set()
        for r in sorted(copy_cand):
            if vpre(r) in rest_vars or vpost(r) in rest_vars:
                rest_parts.append(Atom("=", (vpost(r), vpre(r))))
                rest = conj(rest_parts)
                rest_vars = free_qf_vars(rest)
            else:
                copies.add(r)
        genuine_pres = [r for r in aut.registers if vpre(r) in rest_vars]
        mentioned = [r for r in aut.registers if vpost(r) in rest_vars]
        havoc_unk = []
        collapse = []
        for r in aut.registers:
            if r in copies or r in mentioned:
                continue
            if r in read_anywhere:
                havoc_unk.append(r)
            else:
                collapse.append(r)
        # a register this rule constrains but no rule ever reads back is a
        # pure witness: its value need not be carried in the search state
        discard = frozenset(r for r in mentioned if r not in read_anywhere)
        fixed_keys = [vpre(r) for r in genuine_pres]
        if not rule.is_eps():
            fixed_keys.append(CUR)
        prep = prepare_solver(rest, fixed_keys,
                              [vpost(r) for r in mentioned],
                              frozenset(vpost(r) for r in discard))
        plans.append((rule, copies, rest, genuine_pres, mentioned, havoc_unk,
                      collapse, discard, prep))
    return plans


def _plans_by_source(aut):
    cached = getattr(aut, "_plan_cache", None)
    if cached is None:
        cached = {}
        for entry in _rule_solver_plan(aut):
            cached.setdefault(entry[0].source, []).append(entry)
        aut._plan_cache = cached
    return cached


def _apply_binding(regs, unk, value):
    return tuple(value if v is unk else v for v in regs)


def _reduced_candidates(pool, anchors, dom, need):
    """Pool values that matter for one step: every anchored value, plus
    representatives of the fresh ones. Fresh pool values not related to any
    anchor are interchangeable, so only enough for `need` simultaneous
    distinct picks are kept (per order gap for the dense domain)."""
    anchored = [v for v in pool if v in anchors]
    fresh = [v for v in pool if v not in anchors]
    if dom.kind == "equality":
        return anchored + fresh[:need]
    srt = sorted(anchored)
    out = list(anchored)
    per_gap = {}
    for v in fresh:
        g = bisect.bisect_left(srt, v)
        if per_gap.get(g, 0) < need:
            per_gap[g] = per_gap.get(g, 0) + 1
            out.append(v)
    return out


def _step_options(aut, plan, regs, datum, pool, next_uid, anchors=None):
    """All (refined pre, step post, carried post, bindings) for one rule
    application. Unknown pre values a constraint reads are bound here,
    branching over the pool. The carried post drops witness-only values so
    the search state stays small; the step post keeps them for run
    reconstruction."""
    rule, copies, rest, genuine_pres, mentioned, havoc_unk, collapse, \
        discard, prep = plan
    idx = {r: i for i, r in enumerate(aut.registers)}

    unks = []
    for r in genuine_pres:
        v = regs[idx[r]]
        if isinstance(v, Unk) and v not in unks:
            unks.append(v)

    if anchors is None:
        cand_vals = list(pool) + [NIL]
    else:
        held = {v for v in regs if not isinstance(v, Unk) and v is not NIL}
        need = len(unks) + len(mentioned) + 1
        cand_vals = _reduced_candidates(pool, anchors | held, aut.domain,
                                        need) + [NIL]

    from itertools import product as iproduct
    emitted = set()
    for choice in iproduct(cand_vals, repeat=len(unks)):
        bound = regs
        for u, val in zip(unks, choice):
            bound = _apply_binding(bound, u, val)
        binds = {u.uid: val for u, val in zip(unks, choice)}
        fixed = {vpre(r): bound[idx[r]] for r in genuine_pres}
        if datum is not None:
            fixed[CUR] = datum
        cands = {vpost(r): cand_vals for r in mentioned}
        witness_vars = frozenset(vpost(r) for r in discard)
        for nu in solve_qf(rest, aut.domain, fixed, cands,
                           throwaway=witness_vars, prep=prep):
            step_post = []
            carried = []
            for r in aut.registers:
                if r in copies:
                    step_post.append(bound[idx[r]])
                    carried.append(bound[idx[r]])
                elif r in mentioned:
                    step_post.append(nu[vpost(r)])
                    carried.append(NIL if r in discard else nu[vpost(r)])
                elif r in collapse:
                    step_post.append(NIL)
                    carried.append(NIL)
                else:
                    u = Unk(next_uid())
                    step_post.append(u)
                    carried.append(u)
            dkey = (bound, tuple("?" if isinstance(v, Unk) else v
                                 for v in carried))
            if dkey in emitted:
                continue
            emitted.add(dkey)
            yield bound, tuple(step_post), tuple(carried), binds


def membership(aut, word, pool=None, extra=None):
    """Whether the automaton accepts the data word, deciding guesses over a
    finite candidate pool."""
    return accepting_run(aut, word, pool, extra) is not None


def accepting_run(aut, word, pool=None, extra=None):
    """An accepting Run, or None. Search is a depth-first walk memoized on
    (consumed prefix length, state, register values up to renaming of the
    unread havoc placeholders); every concrete value comes from the pool, so
    the memo key is exact."""
    if pool is None:
        pool = default_pool(aut, word, extra)
    n = len(word)
    anchors = frozenset(v for v in word.data if v is not NIL)
    plans = _plans_by_source(aut)
    seen = set()
    counter = [0]

    def next_uid():
        counter[0] += 1
        return counter[0]

    def search(pos, state, regs):
        key = (pos, state, _normalize_regs(regs))
        if key in seen:
            return None
        seen.add(key)
        if pos == n and state in aut.accepting:
            return [], {}
        for entry in plans.get(state, ()):
            rule = entry[0]
            if rule.is_eps():
                datum = None
            else:
                if pos == n or word.labels[pos] != rule.letter:
                    continue
                datum = word.data[pos]
            nxt = pos if rule.is_eps() else pos + 1
            for bound, post, carried, binds in _step_options(
                    aut, entry, regs, datum, pool, next_uid, anchors):
                found = search(nxt, rule.target, carried)
                if found is not None:
                    steps, later = found
                    merged = dict(binds)
                    merged.update(later)
                    return ([Step(rule, datum, bound, post)] + steps, merged)
        return None

    for q0 in sorted(aut.initial, key=str):
        found = search(0, q0, aut.initial_valuation())
        if found is not None:
            steps, binds = found

            def concrete(vals):
                return tuple(
                    binds.get(v.uid, NIL) if isinstance(v, Unk) else v
                    for v in vals)

            # rebuild the valuation chain: the search state drops witness
            # values, the reported run must carry them through copies
            copies_of = {}
            for entries in plans.values():
                for entry in entries:
                    copies_of[id(entry[0])] = entry[1]
            idx = {r: i for i, r in enumerate(aut.registers)}
            vals = aut.initial_valuation()
            solid = []
            for s in steps:
                pre = tuple(vals)
                post = list(concrete(s.post))
                for r in copies_of[id(s.rule)]:
                    post[idx[r]] = pre[idx[r]]
                solid.append(Step(s.rule, s.datum, pre, tuple(post)))
                vals = tuple(post)
            return Run(q0, solid)
    return None


def check_run(aut, word, run):
    """Validate a run against the automaton and word; raises on mismatch."""
    if run.start not in aut.initial:
        raise ValueError("run does not start in an initial state")
    state = run.start
    regs = aut.initial_valuation()
    pos = 0
    for step in run.steps:
        rule = step.rule
        if rule.source != state:
            raise ValueError("run steps do not chain")
        if step.pre != regs:
            raise ValueError("pre valuation mismatch")
        nu = {vpre(r): v for r, v in zip(aut.registers, regs)}
        nu.update({vpost(r): v for r, v in zip(aut.registers, step.post)})
        if rule.is_eps():
            if step.datum is not None:
                raise ValueError("epsilon step carries a datum")
        else:
            if pos >= len(word) or word.labels[pos] != rule.letter:
                raise ValueError("letter mismatch at position %d" % (pos + 1))
            if step.datum != word.data[pos]:
                raise ValueError("datum mismatch at position %d" % (pos + 1))
            nu[CUR] = step.datum
            pos += 1
        if not eval_qf(rule.constraint, nu, aut.domain):
            raise ValueError("constraint fails at step")
        state = rule.target
        regs = step.post
    if pos != len(word):
        raise ValueError("run does not consume the whole word")
    if state not in aut.accepting:
        raise ValueError("run does not end accepting")


# ---------------------------------------------------------------------------
# guess classification

class Guess:
    """A value stored without being read from the input: register r took value
    v at step index a (1-based over run steps); live is the maximal step range
    [a, b] during which v stays in some register; weak tells whether the word
    supplies v at an input step in that range."""

    __slots__ = ("step_index", "register", "value", "live", "weak")

    def __init__(self, step_index, register, value, live, weak):
        self.step_index = step_index
        self.register = register
        self.value = value
        self.live = live
        self.weak = weak

    def __repr__(self):
        return "Guess(step=%d, %s=%r, live=%r, weak=%r)" % (
            self.step_index, self.register, self.value, self.live, self.weak)


def classify_guesses(aut, run):
    """All guess events in a run, each labeled weak or strong."""
    out = []
    vals = [run.steps[0].pre if run.steps else aut.initial_valuation()]
    for step in run.steps:
        vals.append(step.post)
    for a, step in enumerate(run.steps, start=1):
        prev = set(vals[a - 1])
        for reg, v in zip(aut.registers, vals[a]):
            if v is NIL or v in prev:
                continue
            if step.datum is not None and v == step.datum:
                continue
            b = a
            while b + 1 <= len(run.steps) and v in vals[b + 1]:
                b += 1
            # the first step that drops v still reads it as a pre value, so
            # it belongs to the live range
            end = min(b + 1, len(run.steps))
            weak = any(
                run.steps[m - 1].datum == v
                for m in range(a, end + 1)
                if run.steps[m - 1].datum is not None)
            out.append(Guess(a, reg, v, (a, end), weak))
    return out


def run_is_weak(aut, run):
    return all(g.weak for g in classify_guesses(aut, run))


# ---------------------------------------------------------------------------
# emptiness

def _eager_steps(aut, plan, regs, datum, pool):
    """Post register tuples for one rule from a fully concrete configuration;
    havoc registers branch over the pool eagerly."""
    rule, copies, rest, genuine_pres, mentioned, havoc_unk, collapse, \
        discard, prep = plan
    idx = {r: i for i, r in enumerate(aut.registers)}
    cand_vals = list(pool) + [NIL]
    fixed = {vpre(r): regs[idx[r]] for r in genuine_pres}
    if datum is not None:
        fixed[CUR] = datum
    cands = {vpost(r): cand_vals for r in mentioned}
    for r in havoc_unk:
        cands[vpost(r)] = cand_vals
    for nu in solve_qf(rest, aut.domain, fixed, cands):
        post = []
        for r in aut.registers:
            if r in copies:
                post.append(regs[idx[r]])
            elif r in collapse:
                post.append(NIL)
            else:
                post.append(nu[vpost(r)])
        yield tuple(post)


def emptiness(aut):
    """True iff the automaton accepts no data word. Works on the region
    abstraction: states paired with the type of the register tuple over the
    Nil-lifted universe."""
    dom = aut.domain
    k = aut.k
    start_regs = aut.initial_valuation()

    def abstract(regs):
        return type_of(regs, dom)

    seen = set()
    work = []
    for q in aut.initial:
        key = (q, abstract(start_regs))
        seen.add(key)
        work.append((q, start_regs))
    plans = _rule_solver_plan(aut)
    by_source = {}
    for entry in plans:
        by_source.setdefault(entry[0].source, []).append(entry)
    while work:
        state, regs = work.pop()
        if state in aut.accepting:
            return False
        pool = candidate_pool([v for v in regs if v is not NIL], k + 1, dom)
        for entry in by_source.get(state, ()):
            rule = entry[0]
            data_options = [None] if rule.is_eps() else list(pool)
            for datum in data_options:
                for post in _eager_steps(aut, entry, regs, datum, pool):
                    key = (rule.target, abstract(post))
                    if key not in seen:
                        seen.add(key)
                        work.append((rule.target, post))
    return True


# ---------------------------------------------------------------------------
# epsilon elimination

class EpsilonCycleError(ValueError):
    pass


def _eps_graph_check(aut, bound):
    """Reject epsilon cycles and syntactic chains longer than the bound."""
    edges = {}
    for r in aut.eps_rules():
        edges.setdefault(r.source, []).append(r.target)
    color = {}
    depth = {}

    def visit(q):
        color[q] = 1
        best = 0
        for t in edges.get(q, ()):
            if color.get(t) == 1:
                raise EpsilonCycleError("epsilon cycle through %r" % (t,))
            if color.get(t) != 2:
                visit(t)
            best = max(best, 1 + depth[t])
        color[q] = 2
        depth[q] = best

    for q in list(edges):
        if color.get(q) != 2:
            visit(q)
    longest = max(depth.values(), default=0)
    if longest > bound:
        raise EpsilonCycleError(
            "an epsilon chain of length %d is syntactically possible, bound is %d"
            % (longest, bound))


def _aux_name(level, reg):
    return "c%d_%s" % (level, reg)


def _compose_chain(aut, chain, input_rule, tail):
    """Conjoin the constraints of (chain; input_rule; tail) over one composed
    transition; intermediate valuations live in the post variables of fresh
    copy registers."""
    k_steps = list(chain) + [input_rule] + list(tail)
    parts = []
    level = 0
    for i, rule in enumerate(k_steps):
        last = i == len(k_steps) - 1
        sub = {}
        for r in aut.registers:
            sub[vpre(r)] = vpre(r) if level == 0 else vpost(_aux_name(level, r))
            sub[vpost(r)] = vpost(r) if last else vpost(_aux_name(level + 1, r))
        parts.append(rename_qf(rule.constraint, sub))
        level += 1
    return conj(parts), len(k_steps) - 1


def _relation_sig(phi, obs):
    """Canonical signature of the relation phi defines over the obs
    variables, every other variable being existential. Equal signatures
    mean equal relations (not conversely); auxiliary structure the color
    refinement cannot pin down falls back to a never-equal signature so
    deduplication stays sound."""
    parts = []
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, And):
            stack.append(f.left)
            stack.append(f.right)
        elif not isinstance(f, Top):
            parts.append(f)
    parent = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    kept = []
    for p in parts:
        if isinstance(p, Atom) and p.rel == "=":
            ra, rb = find(p.args[0]), find(p.args[1])
            if ra != rb:
                parent[ra] = rb
        else:
            kept.append(p)
    obs_set = set(obs)
    allv = set(obs) | set(parent)
    for p in kept:
        allv |= free_qf_vars(p)
    classes = {}
    for v in allv:
        classes.setdefault(find(v), []).append(v)
    base = {}
    aux_roots = []
    obs_partition = set()
    for root, mem in classes.items():
        om = sorted(m for m in mem if m in obs_set)
        if om:
            base[root] = "o(%s)" % ",".join(om)
            obs_partition.add(tuple(om))
        else:
            aux_roots.append(root)

    def render(label_of):
        return tuple(sorted(
            print_qf(rename_qf(p, {v: label_of(v) for v in free_qf_vars(p)}))
            for p in kept))

    if not aux_roots:
        return (frozenset(obs_partition), render(lambda v: base[find(v)]))

    color = {r: 0 for r in aux_roots}
    for _ in range(len(aux_roots) + 1):
        profiles = {r: [] for r in aux_roots}
        for p in kept:
            fv = sorted(free_qf_vars(p))
            lab = {v: base.get(find(v), None) for v in fv}
            for v in fv:
                if lab[v] is None:
                    lab[v] = "c%d" % color[find(v)]
            text = print_qf(rename_qf(p, lab))
            for v in fv:
                root = find(v)
                if root in profiles:
                    profiles[root].append(text)
        keys = {r: (color[r], tuple(sorted(profiles[r]))) for r in aux_roots}
        rank = {k: i for i, k in enumerate(sorted(set(keys.values())))}
        newc = {r: rank[keys[r]] for r in aux_roots}
        if newc == color:
            break
        color = newc
    if len(set(color.values())) != len(aux_roots):
        return object()
    for i, root in enumerate(sorted(aux_roots, key=lambda r: color[r])):
        base[root] = "a%d" % i
    return (frozenset(obs_partition), render(lambda v: base[find(v)]))


def _eps_chains(aut, bound, prune_sat=True):
    """All epsilon-rule chains of length <= bound, grouped by start state;
    prefixes with unsatisfiable composed constraints are cut. Chains with
    the same endpoints whose composed constraints define the same relation
    are interchangeable everywhere a chain is used, so only the first is
    kept and extended; this is what tames cyclic and diamond-shaped
    epsilon structure."""
    by_src = {}
    for r in aut.eps_rules():
        by_src.setdefault(r.source, []).append(r)
    obs = tuple(vpre(r) for r in aut.registers) \
        + tuple(vpost(r) for r in aut.registers)
    chains = []
    seen = set()

    def consider(chain):
        phi, _ = _compose_chain(aut, chain[:-1], chain[-1], [])
        if prune_sat and not satisfiable_qf(phi, aut.domain):
            return False
        key = (chain[0].source, chain[-1].target, _relation_sig(phi, obs))
        if key in seen:
            return False
        seen.add(key)
        chains.append(list(chain))
        return True

    def extend(chain):
        if len(chain) >= bound:
            return
        for r in by_src.get(chain[-1].target, ()):
            chain.append(r)
            if consider(chain):
                extend(chain)
            chain.pop()

    for rules in by_src.values():
        for r in rules:
            if consider([r]):
                extend([r])
    return chains


ACC_SINK = "acc_sink"


def eliminate_epsilon(aut, bound, trusted=False):
    """Replace epsilon rules by composed input rules carrying the chain
    constraints over fresh register copies. Public callers get a syntactic
    safety check (cycles or over-long chains are errors); the expression
    compiler passes trusted=True with its structural bound."""
    if not trusted:
        _eps_graph_check(aut, bound)
    if not aut.has_eps():
        return aut

    chains = _eps_chains(aut, bound)
    by_start = {}
    by_end = {}
    for c in chains:
        by_start.setdefault(c[0].source, []).append(c)
        by_end.setdefault(c[-1].target, []).append(c)
    # trailing chains that reach acceptance, grouped by start state
    trails = [c for c in chains if c[-1].target in aut.accepting]
    trails_by_start = {}
    for c in trails:
        trails_by_start.setdefault(c[0].source, []).append(c)

    max_aux = 0
    new_rules = []
    emitted = set()

    def emit(source, letter, phi, target, aux_used):
        nonlocal max_aux
        sig = (source, letter, print_qf(phi), target)
        if sig in emitted:
            return
        if not satisfiable_qf(phi, aut.domain):
            return
        emitted.add(sig)
        max_aux = max(max_aux, aux_used)
        new_rules.append(Rule(source, letter, phi, target))

    for t in aut.input_rules():
        leads = [[]] + by_end.get(t.source, [])
        for lead in leads:
            src = lead[0].source if lead else t.source
            phi, aux = _compose_chain(aut, lead, t, [])
            emit(src, t.letter, phi, t.target, aux)
            for trail in trails_by_start.get(t.target, ()):
                phi2, aux2 = _compose_chain(aut, lead, t, trail)
                emit(src, t.letter, phi2, ACC_SINK, aux2)

    accepting = set(aut.accepting)
    # the empty word may be accepted through an initial epsilon chain
    new_initial = set(aut.initial)
    new_accepting = set(accepting)
    for q in aut.initial:
        if q in accepting:
            continue
        for c in by_start.get(q, ()):
            if c[-1].target not in accepting:
                continue
            phi, _ = _compose_chain(aut, c[:-1], c[-1], [])
            start_fix = {vpre(r): NIL for r in aut.registers}
            if satisfiable_qf(phi, aut.domain, start_fix):
                new_accepting.add(q)
                break

    registers = list(aut.registers)
    for lvl in range(1, max_aux + 1):
        registers += [_aux_name(lvl, r) for r in aut.registers]
    states = set(aut.states) | {ACC_SINK}
    return Nra(states, aut.alphabet, aut.domain, registers,
               new_initial, new_accepting | {ACC_SINK}, new_rules)


# ---------------------------------------------------------------------------
# the injective (simple) normal form

def _ann_of(values):
    """Equality/nil pattern of a value tuple: 0 for Nil, else block ids by
    first occurrence."""
    ann = []
    blocks = {}
    for v in values:
        if v is NIL:
            ann.append(0)
        else:
            if v not in blocks:
                blocks[v] = len(blocks) + 1
            ann.append(blocks[v])
    return tuple(ann)


def _canonical_index(ann, i):
    return ann.index(ann[i])


def _region_rule_constraint(aut, rep, pre_ann, post_ann):
    """Constraint over canonical register variables and cur matching the
    region of (pre, cur, post) given by the representative tuple."""
    k = aut.k
    dom = aut.domain
    names = []
    vals = []
    for i, r in enumerate(aut.registers):
        if pre_ann[i] != 0 and _canonical_index(pre_ann, i) == i:
            names.append(vpre(r))
            vals.append(rep[i])
    names.append(CUR)
    vals.append(rep[k])
    for i, r in enumerate(aut.registers):
        if post_ann[i] != 0 and _canonical_index(post_ann, i) == i:
            names.append(vpost(r))
            vals.append(rep[k + 1 + i])
    parts = []
    m = len(names)
    for i in range(m):
        for j in range(i + 1, m):
            a, b = vals[i], vals[j]
            if dom.kind == "dense-order":
                if a == b:
                    parts.append(eq(names[i], names[j]))
                elif a < b:
                    parts.append(Atom("<", (names[i], names[j])))
                else:
                    parts.append(Atom("<", (names[j], names[i])))
            else:
                if a == b:
                    parts.append(eq(names[i], names[j]))
                else:
                    parts.append(Not(eq(names[i], names[j])))
    # duplicates collapse onto the least register of their block; the spare
    # copies are parked at Nil so valuations stay injective where real
    for i, r in enumerate(aut.registers):
        if post_ann[i] == 0 or _canonical_index(post_ann, i) != i:
            parts.append(nil(vpost(r)))
    return conj(parts)


def to_simple(aut):
    """Language-equal automaton whose reachable register valuations are
    injective where real: states carry the equality/nil pattern, duplicate
    registers collapse onto the least representative, and every rule states
    pairwise distinctness and a preserve-or-change verdict explicitly."""
    if aut.has_eps():
        raise ValueError("eliminate epsilon rules before to_simple")
    dom = aut.domain
    k = aut.k
    reps = region_representatives_lifted(2 * k + 1, dom)
    start_ann = _ann_of(aut.initial_valuation())
    seen = set()
    work = []
    for q in aut.initial:
        seen.add((q, start_ann))
        work.append((q, start_ann))
    new_rules = []
    rule_set = set()
    info = {}
    while work:
        state, pre_ann = work.pop()
        for rule in aut.rules_from(state):
            for rep in reps:
                if rep[k] is NIL:
                    continue
                if _ann_of(rep[:k]) != pre_ann:
                    continue
                nu = {vpre(r): rep[i] for i, r in enumerate(aut.registers)}
                nu[CUR] = rep[k]
                nu.update({vpost(r): rep[k + 1 + i]
                           for i, r in enumerate(aut.registers)})
                if not eval_qf(rule.constraint, nu, dom):
                    continue
                post_ann = _ann_of(rep[k + 1:])
                phi = _region_rule_constraint(aut, rep, pre_ann, post_ann)
                src = (state, pre_ann)
                dst = (rule.target, post_ann)
                nr = Rule(src, rule.letter, phi, dst)
                if nr not in rule_set:
                    rule_set.add(nr)
                    new_rules.append(nr)
                    info[nr] = (pre_ann, post_ann)
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
    states = set(seen)
    initial = {(q, start_ann) for q in aut.initial}
    accepting = {s for s in states if s[0] in aut.accepting}
    out = Nra(states, aut.alphabet, dom, aut.registers, initial, accepting,
              new_rules)
    out.simple_info = {i: info[r] for i, r in enumerate(out.rules)}
    return out


def simple_annotations(aut):
    """The per-rule (pre, post) equality/nil patterns of a simple automaton,
    recovering them from the constraints if not attached."""
    if hasattr(aut, "simple_info"):
        return dict(aut.simple_info)
    out = {}
    for i, rule in enumerate(aut.rules):
        out[i] = (_constraint_ann(aut, rule, "pre"),
                  _constraint_ann(aut, rule, "post"))
    return out


def _constraint_ann(aut, rule, side):
    var = vpre if side == "pre" else vpost
    forced_nil = set()
    equal = {}
    for part in _conjuncts(rule.constraint):
        if isinstance(part, Atom) and part.rel == "nil":
            for i, r in enumerate(aut.registers):
                if part.args[0] == var(r):
                    forced_nil.add(i)
        if isinstance(part, Atom) and part.rel == "=":
            for i, r in enumerate(aut.registers):
                for j, s in enumerate(aut.registers):
                    if part.args == (var(r), var(s)) and i != j:
                        equal[max(i, j)] = min(i, j)
    ann = []
    blocks = {}
    for i in range(aut.k):
        if i in forced_nil:
            ann.append(0)
            continue
        root = equal.get(i, i)
        if root not in blocks:
            blocks[root] = len(blocks) + 1
        ann.append(blocks[root])
    return tuple(ann)


def is_simple(aut):
    """Check the syntactic simple-form contract: every rule's constraint
    conjoins pairwise distinctness over its non-nil registers (pre, post, and
    across) and an explicit preserve-or-change verdict per register."""
    anns = simple_annotations(aut)
    for i, rule in enumerate(aut.rules):
        pre_ann, post_ann = anns[i]
        if len(set(b for b in pre_ann if b)) != len([b for b in pre_ann if b]):
            return False
        parts = _conjuncts(rule.constraint)
        atoms = set()
        for p in parts:
            if isinstance(p, Atom):
                atoms.add((True, p.rel, p.args))
            elif isinstance(p, Not) and isinstance(p.sub, Atom):
                atoms.add((False, p.sub.rel, p.sub.args))

        def distinct(u, v):
            return ((False, "=", (u, v)) in atoms or (False, "=", (v, u)) in atoms
                    or (True, "<", (u, v)) in atoms or (True, "<", (v, u)) in atoms)

        live_pre = [r for j, r in enumerate(aut.registers) if pre_ann[j] != 0
                    and _canonical_index(pre_ann, j) == j]
        live_post = [r for j, r in enumerate(aut.registers) if post_ann[j] != 0
                     and _canonical_index(post_ann, j) == j]
        for a_i, u in enumerate(live_pre):
            for v in live_pre[a_i + 1:]:
                if not distinct(vpre(u), vpre(v)):
                    return False
        for a_i, u in enumerate(live_post):
            for v in live_post[a_i + 1:]:
                if not distinct(vpost(u), vpost(v)):
                    return False
        for u in live_pre:
            for v in live_post:
                if u == v:
                    continue
                if not distinct(vpre(u), vpost(v)):
                    return False
        for r in aut.registers:
            if r in live_pre and r in live_post:
                has_verdict = ((True, "=", (vpre(r), vpost(r))) in atoms
                               or (True, "=", (vpost(r), vpre(r))) in atoms
                               or distinct(vpre(r), vpost(r)))
                if not has_verdict:
                    return False
    return True


# ---------------------------------------------------------------------------
# nil tracking: push nil-ness of registers into the state so constraints can
# be read over real values only

def fold_nil(phi, is_nil_var):
    """Evaluate every atom touching a variable the predicate marks Nil:
    equality holds between two Nils, fails between Nil and anything real,
    order never holds on Nil, and nil() tests become constants. The result
    mentions no nil() atom and no Nil-marked variable."""
    if isinstance(phi, Top):
        return TOP
    if isinstance(phi, Not):
        sub = fold_nil(phi.sub, is_nil_var)
        if sub is TOP:
            return BOT
        if sub == BOT:
            return TOP
        return Not(sub)
    if isinstance(phi, And):
        left = fold_nil(phi.left, is_nil_var)
        right = fold_nil(phi.right, is_nil_var)
        if left == BOT or right == BOT:
            return BOT
        if left is TOP:
            return right
        if right is TOP:
            return left
        return And(left, right)
    if isinstance(phi, Atom):
        if phi.rel == "nil":
            return TOP if is_nil_var(phi.args[0]) else BOT
        flags = [is_nil_var(a) for a in phi.args]
        if not any(flags):
            return phi
        if phi.rel == "=" and all(flags):
            return TOP
        return BOT
    raise TypeError("not a constraint: %r" % (phi,))


def annotate_nil(aut):
    """Language-equal automaton whose states carry the exact set of Nil
    registers; every rule constraint is folded so it never tests nil-ness and
    never touches a register that is Nil on either side."""
    regs = aut.registers
    start = (NIL,) * len(regs)
    start_nil = frozenset(regs)
    seen = set()
    work = []
    for q in aut.initial:
        s = (q, start_nil)
        seen.add(s)
        work.append(s)
    subsets = []
    for mask in range(1 << len(regs)):
        subsets.append(frozenset(r for i, r in enumerate(regs)
                                 if mask >> i & 1))
    new_rules = []
    while work:
        state = work.pop()
        q, pre_nil = state
        for rule in aut.rules_from(q):
            for post_nil in subsets:
                def marked(v, pre_nil=pre_nil, post_nil=post_nil):
                    if v.endswith("^pre"):
                        return v[:-4] in pre_nil
                    if v.endswith("^post"):
                        return v[:-5] in post_nil
                    return False
                phi = fold_nil(rule.constraint, marked)
                if phi == BOT:
                    continue
                # registers the folded constraint leaves free must still be
                # drivable to the declared side of the nil split
                if not satisfiable_qf(phi, aut.domain, allow_nil=False):
                    continue
                dst = (rule.target, post_nil)
                new_rules.append(Rule(state, rule.letter, phi, dst))
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
    initial = {(q, start_nil) for q in aut.initial}
    accepting = {s for s in seen if s[0] in aut.accepting}
    return Nra(seen, aut.alphabet, aut.domain, regs, initial, accepting,
               new_rules)
