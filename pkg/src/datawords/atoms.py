"""Data domains (naturals with equality, rationals with dense order), the Nil
lift, quantifier-free constraint formulas, and the region machinery that keeps
every search in this package finite."""

from fractions import Fraction
from functools import lru_cache
from itertools import product


class _Nil:
    """Sentinel for an unset register. Compares equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_"


NIL = _Nil()


def is_nil(v):
    return v is NIL


class AtomDomain:
    """A relational value domain: 'equality' (naturals, =) or 'dense-order'
    (rationals, = and <). nil is the lifted unary emptiness test."""

    def __init__(self, kind):
        if kind not in ("equality", "dense-order"):
            raise ValueError("unknown domain kind: %r" % (kind,))
        self.kind = kind
        self.signature = {"=": 2, "nil": 1}
        if kind == "dense-order":
            self.signature["<"] = 2

    def __repr__(self):
        return "AtomDomain(%r)" % self.kind

    def check_value(self, v):
        """Raise unless v is Nil or a payload of this domain's kind."""
        if v is NIL:
            return
        if self.kind == "equality":
            if not (isinstance(v, int) and not isinstance(v, bool)) or v < 0:
                raise ValueError("equality domain wants naturals, got %r" % (v,))
        else:
            if not isinstance(v, (int, Fraction)) or isinstance(v, bool):
                raise ValueError("dense-order domain wants rationals, got %r" % (v,))

    def eval_atom(self, rel, vals):
        """Truth of one relation applied to lifted values. Anything except =
        and nil is false as soon as a Nil is involved; = holds on two Nils."""
        if rel == "nil":
            return vals[0] is NIL
        if rel == "=":
            a, b = vals
            if a is NIL or b is NIL:
                return a is NIL and b is NIL
            return a == b
        if rel == "<":
            if self.kind != "dense-order":
                raise ValueError("< is not in the equality signature")
            a, b = vals
            if a is NIL or b is NIL:
                return False
            return a < b
        raise ValueError("unknown relation %r" % (rel,))


EQUALITY = AtomDomain("equality")
DENSE_ORDER = AtomDomain("dense-order")


def domain_by_kind(kind):
    return EQUALITY if kind == "equality" else AtomDomain(kind)


class TupleDomain:
    """Values are fixed-width tuples over a base domain; relations are the base
    relations applied to selected components, e.g. ('=', (1, 3))."""

    def __init__(self, base, width):
        self.base = base
        self.width = width
        self.kind = "tuple:%s:%d" % (base.kind, width)
        self.signature = {"nil": 1}
        for rel, ar in base.signature.items():
            if rel == "nil":
                continue
            for idx in product(range(1, width + 1), repeat=ar):
                self.signature[(rel, idx)] = ar

    def eval_atom(self, rel, vals):
        if rel == "nil":
            return vals[0] is NIL
        base_rel, idx = rel
        picked = []
        for v, i in zip(vals, idx):
            picked.append(NIL if v is NIL else v[i - 1])
        return self.base.eval_atom(base_rel, picked)


# ---------------------------------------------------------------------------
# values: text forms "42", "3/4", "_"

def parse_value(text, dom):
    text = text.strip()
    if text == "_":
        return NIL
    if dom.kind == "equality":
        v = int(text)
        dom.check_value(v)
        return v
    v = Fraction(text)
    return v


def print_value(v):
    if v is NIL:
        return "_"
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return "%d/%d" % (v.numerator, v.denominator)
    return str(v)


# ---------------------------------------------------------------------------
# quantifier-free formulas: T, ~phi, (phi & psi), R(x,...), x = y, x < y

class QfFormula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __invert__(self):
        return Not(self)

    def __repr__(self):
        return print_qf(self)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))


class Top(QfFormula):
    __slots__ = ()

    def _key(self):
        return ()


TOP = Top()


class Not(QfFormula):
    __slots__ = ("sub",)

    def __init__(self, sub):
        self.sub = sub

    def _key(self):
        return (self.sub,)


BOT = Not(TOP)


class And(QfFormula):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def _key(self):
        return (self.left, self.right)


class Atom(QfFormula):
    __slots__ = ("rel", "args")

    def __init__(self, rel, args):
        self.rel = rel
        self.args = tuple(args)

    def _key(self):
        return (self.rel, self.args)


def Or(a, b):
    return Not(And(Not(a), Not(b)))


def conj(parts):
    """Right-nested conjunction of a list, T when empty."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def eq(x, y):
    return Atom("=", (x, y))


def lt(x, y):
    return Atom("<", (x, y))


def nil(x):
    return Atom("nil", (x,))


def free_qf_vars(phi):
    """Set of variable names occurring in phi."""
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.update(f.args)
        elif isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, And):
            stack.append(f.left)
            stack.append(f.right)
    return out


def rename_qf(phi, mapping):
    """Substitute variable names; names missing from mapping stay put."""
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, Not):
        return Not(rename_qf(phi.sub, mapping))
    if isinstance(phi, And):
        return And(rename_qf(phi.left, mapping), rename_qf(phi.right, mapping))
    return Atom(phi.rel, tuple(mapping.get(a, a) for a in phi.args))


def eval_qf(phi, valuation, dom):
    """Truth of phi under a total valuation (dict var -> AtomValue)."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Not):
        return not eval_qf(phi.sub, valuation, dom)
    if isinstance(phi, And):
        return eval_qf(phi.left, valuation, dom) and eval_qf(phi.right, valuation, dom)
    vals = []
    for a in phi.args:
        if a not in valuation:
            raise ValueError("unbound constraint variable %r" % (a,))
        vals.append(valuation[a])
    return dom.eval_atom(phi.rel, vals)


# parser -------------------------------------------------------------------

def _tokenize_qf(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()&~,=<":
            toks.append(c)
            i += 1
        else:
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_^"):
                j += 1
            if j == i:
                raise ValueError("bad character %r in constraint" % c)
            toks.append(text[i:j])
            i = j
    return toks


class _QfParser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, want=None):
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise ValueError("expected %r, got %r" % (want, t))
        self.pos += 1
        return t

    def formula(self):
        out = self.unary()
        while self.peek() == "&":
            self.take("&")
            out = And(out, self.unary())
        return out

    def unary(self):
        t = self.peek()
        if t == "~":
            self.take("~")
            return Not(self.unary())
        if t == "(":
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if t == "T":
            self.take("T")
            return TOP
        return self.atom()

    def atom(self):
        name = self.take()
        t = self.peek()
        if t == "(":  # prefix form: nil(x), rel(x,y)
            self.take("(")
            args = [self.take()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.take())
            self.take(")")
            return Atom(name, tuple(args))
        if t in ("=", "<"):
            op = self.take()
            rhs = self.take()
            return Atom(op, (name, rhs))
        raise ValueError("dangling %r in constraint" % name)


def parse_qf(text):
    p = _QfParser(_tokenize_qf(text))
    f = p.formula()
    if p.peek() is not None:
        raise ValueError("trailing tokens in constraint: %r" % p.toks[p.pos:])
    return f


def print_qf(phi):
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Not):
        inner = print_qf(phi.sub)
        if isinstance(phi.sub, (Top, Not)):
            return "~" + inner
        if inner.startswith("("):
            return "~" + inner
        return "~(" + inner + ")"
    if isinstance(phi, And):
        return "(%s & %s)" % (print_qf(phi.left), print_qf(phi.right))
    if phi.rel in ("=", "<") and len(phi.args) == 2 and isinstance(phi.rel, str):
        return "%s %s %s" % (phi.args[0], phi.rel, phi.args[1])
    return "%s(%s)" % (phi.rel, ",".join(str(a) for a in phi.args))


def validate_qf(phi, dom, allowed_vars=None):
    """Check relations against the domain signature and variables against an
    optional allowed set."""
    if isinstance(phi, Not):
        validate_qf(phi.sub, dom, allowed_vars)
    elif isinstance(phi, And):
        validate_qf(phi.left, dom, allowed_vars)
        validate_qf(phi.right, dom, allowed_vars)
    elif isinstance(phi, Atom):
        if phi.rel not in dom.signature:
            raise ValueError("relation %r not in %s signature" % (phi.rel, dom.kind))
        if len(phi.args) != dom.signature[phi.rel]:
            raise ValueError("arity mismatch in %r" % (phi,))
        if allowed_vars is not None:
            for a in phi.args:
                if a not in allowed_vars:
                    raise ValueError("variable %r not allowed here" % (a,))


# ---------------------------------------------------------------------------
# regions

class QfType:
    """The complete atomic diagram of a value tuple: which relation instances
    hold over positions 1..arity. Two tuples are region-equivalent iff their
    types coincide."""

    def __init__(self, arity, literals):
        self.arity = arity
        self.literals = frozenset(literals)

    def __eq__(self, other):
        return (isinstance(other, QfType)
                and self.arity == other.arity
                and self.literals == other.literals)

    def __hash__(self):
        return hash((self.arity, self.literals))

    def __repr__(self):
        pos = sorted(l for l in self.literals if l[0])
        return "QfType(%d, %r)" % (self.arity, pos)


def type_of(values, dom):
    """QfType of a tuple of (possibly Nil) values."""
    values = tuple(values)
    m = len(values)
    lits = []
    for rel, ar in dom.signature.items():
        for idx in product(range(m), repeat=ar):
            holds = dom.eval_atom(rel, [values[i] for i in idx])
            lits.append((holds, rel, tuple(i + 1 for i in idx)))
    return QfType(m, lits)


def same_region(v1, v2, dom):
    v1, v2 = tuple(v1), tuple(v2)
    return len(v1) == len(v2) and type_of(v1, dom) == type_of(v2, dom)


def type_formula(values, dom, names):
    """A constraint over the given variable names that holds exactly on the
    region of the (real-valued) tuple."""
    values = tuple(values)
    m = len(values)
    parts = []
    for i in range(m):
        for j in range(i + 1, m):
            a, b = values[i], values[j]
            if dom.kind == "dense-order":
                if a == b:
                    parts.append(eq(names[i], names[j]))
                elif a < b:
                    parts.append(lt(names[i], names[j]))
                else:
                    parts.append(lt(names[j], names[i]))
            else:
                if a == b:
                    parts.append(eq(names[i], names[j]))
                else:
                    parts.append(Not(eq(names[i], names[j])))
    return conj(parts)


def _rgs(m):
    # restricted-growth strings over 1..m, one per set partition
    out = []

    def go(prefix, mx):
        if len(prefix) == m:
            out.append(tuple(prefix))
            return
        for v in range(1, mx + 2):
            go(prefix + [v], max(mx, v))

    go([], 0)
    return out


@lru_cache(maxsize=None)
def _region_reps(m, kind):
    if m == 0:
        return ((),)
    if kind == "equality":
        return tuple(_rgs(m))
    reps = []
    for f in product(range(1, m + 1), repeat=m):
        top = max(f)
        if set(f) == set(range(1, top + 1)):
            reps.append(tuple(Fraction(v) for v in f))
    return tuple(reps)


def region_representatives(m, dom):
    """One canonical real-valued tuple per region of m-tuples."""
    return [tuple(r) for r in _region_reps(m, dom.kind)]


def region_representatives_lifted(m, dom):
    """Like region_representatives but over the Nil-lifted universe: every
    subset of positions may be Nil."""
    out = []
    for mask in range(1 << m):
        real_slots = [i for i in range(m) if not (mask >> i) & 1]
        for rep in region_representatives(len(real_slots), dom):
            tup = [NIL] * m
            for slot, v in zip(real_slots, rep):
                tup[slot] = v
            out.append(tuple(tup))
    return out


def candidate_pool(values, extra, dom):
    """Finitely many values sufficient to witness any satisfiable constraint
    shape relative to the given values; extra controls the fresh supply."""
    vals = sorted(set(v for v in values if v is not NIL))
    if dom.kind == "equality":
        base = max(vals) + 1 if vals else 0
        return vals + [base + i for i in range(extra)]
    vals = [Fraction(v) for v in vals]
    for _ in range(extra):
        if not vals:
            vals = [Fraction(0)]
            continue
        grown = [vals[0] - 1]
        for a, b in zip(vals, vals[1:]):
            grown.append(a)
            grown.append((a + b) / 2)
        grown.append(vals[-1])
        grown.append(vals[-1] + 1)
        vals = grown
    return vals


# ---------------------------------------------------------------------------
# a small backtracking solver over candidate values

def eval_qf_partial(phi, valuation, dom):
    """Three-valued truth under a partial valuation: True, False, or None."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Not):
        v = eval_qf_partial(phi.sub, valuation, dom)
        return None if v is None else not v
    if isinstance(phi, And):
        a = eval_qf_partial(phi.left, valuation, dom)
        if a is False:
            return False
        b = eval_qf_partial(phi.right, valuation, dom)
        if b is False:
            return False
        if a is None or b is None:
            return None
        return True
    vals = []
    for a in phi.args:
        if a not in valuation:
            return None
        vals.append(valuation[a])
    return dom.eval_atom(phi.rel, vals)


def _collect_atoms(phi, out, sign=True):
    if isinstance(phi, Atom):
        out.append((sign, phi))
    elif isinstance(phi, Not):
        _collect_atoms(phi.sub, out, not sign)
    elif isinstance(phi, And):
        # signs below an And under a Not are not simple conjuncts; only
        # descend positively so propagation stays sound
        if sign:
            _collect_atoms(phi.left, out, True)
            _collect_atoms(phi.right, out, True)


def _witness_candidates(cands, present, dom):
    """One candidate per region relative to the values already present, for
    variables whose exact value the caller discards. Equality: each present
    value once, one fresh value, Nil once, all drawn from `cands`. Dense
    order: each present value, one synthesized rational per gap (midpoints
    and one step beyond the ends), and Nil when `cands` offers it; the
    synthesized values need not come from `cands`, which is why this is
    reserved for throwaway variables assigned after all the pool-bound
    ones."""
    if dom.kind == "equality":
        kept = []
        seen = set()
        for val in cands:
            if val is NIL:
                key = ("nil",)
            elif val in present:
                key = ("eq", val)
            else:
                key = ("fresh",)
            if key not in seen:
                seen.add(key)
                kept.append(val)
        return kept
    vals = sorted(Fraction(v) for v in present)
    out = []
    if any(c is NIL for c in cands):
        out.append(NIL)
    if not vals:
        out.append(Fraction(0))
        return out
    out.append(vals[0] - 1)
    for a, b in zip(vals, vals[1:]):
        out.append(a)
        out.append((a + b) / 2)
    out.append(vals[-1])
    out.append(vals[-1] + 1)
    return out


def prepare_solver(phi, fixed_keys, cand_keys, throwaway=None):
    """Assignment order and conjunct schedule for solving phi repeatedly
    with the same variable split but different values. Top-level equality
    conjuncts merge their variables into classes assigned as one; top-level
    nil conjuncts pin a class to Nil."""
    throwaway = throwaway or frozenset()
    fixed_keys = set(fixed_keys)
    cand_keys = list(cand_keys)

    def split_conj(f, out):
        if isinstance(f, And):
            split_conj(f.left, out)
            split_conj(f.right, out)
        else:
            out.append(f)

    parts = []
    split_conj(phi, parts)

    known = fixed_keys | set(cand_keys)
    parent = {v: v for v in known}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    nil_pinned = set()
    kept = []
    for part in parts:
        if isinstance(part, Atom) and part.rel == "=" \
                and all(a in known for a in part.args):
            union(part.args[0], part.args[1])
        elif isinstance(part, Atom) and part.rel == "nil" \
                and part.args[0] in known:
            nil_pinned.add(part.args[0])
        else:
            kept.append(part)

    members = {}
    for v in known:
        members.setdefault(find(v), []).append(v)
    # one name per class: a fixed variable when there is one, so its value
    # is available immediately
    rep_of = {}
    cls = []
    for root, mem in sorted(members.items(), key=lambda kv: str(kv[0])):
        fixed_mem = sorted(m for m in mem if m in fixed_keys)
        rep = fixed_mem[0] if fixed_mem else sorted(mem, key=str)[0]
        for m in mem:
            rep_of[m] = rep
        cls.append((rep, tuple(sorted(mem, key=str)), tuple(fixed_mem),
                    any(m in nil_pinned for m in mem),
                    all(m in throwaway for m in mem) and not fixed_mem))

    rewritten = [rename_qf(p, rep_of) for p in kept]
    free = set()
    for p in rewritten:
        free |= free_qf_vars(p)

    # a witness class nothing constrains needs no enumeration at all: any
    # single value does, since the caller never looks at it
    disposable_reps = frozenset(rep for rep, mem, fm, pn, disp in cls if disp)
    dummies = []
    unknowns = []
    for rep, mem, fixed_mem, pin_nil, disposable in cls:
        if fixed_mem or pin_nil:
            continue
        if disposable and rep not in free:
            dummies.append(rep)
        else:
            unknowns.append(rep)
    # witness classes last: beyond the first witness assignment that works
    # the rest are redundant, so the search can stop at one completion
    unknowns.sort(key=lambda v: (v in disposable_reps, v not in free, str(v)))
    cut = len(unknowns)
    while cut > 0 and unknowns[cut - 1] in disposable_reps:
        cut -= 1

    # schedule each remaining conjunct at the assignment step where its last
    # variable arrives, so a step checks only what it completes
    order = {v: i for i, v in enumerate(unknowns)}
    due = [[] for _ in range(len(unknowns) + 1)]
    for part in rewritten:
        last = -1
        for v in free_qf_vars(part):
            if v in order:
                last = max(last, order[v])
            elif v not in fixed_keys and v not in rep_of:
                raise ValueError("solver variable %r has no candidates" % (v,))
        due[last + 1].append(part)
    return unknowns, due, cls, disposable_reps, tuple(dummies), cut


def solve_qf(phi, dom, fixed, candidates, limit=None, throwaway=None,
             prep=None):
    """Yield total valuations extending `fixed` over the keys of `candidates`
    (each a list of values to try) that satisfy phi. Positive equality
    conjuncts merge variables; everything else backtracks. Variables in
    `throwaway` are existential witnesses whose exact value the caller
    discards, so only one candidate per region relative to the values chosen
    so far is tried; in the dense order that witness may be a synthesized
    rational outside the variable's candidate list."""
    if prep is None:
        prep = prepare_solver(phi, fixed, candidates, throwaway)
    unknowns, due, cls, disposable, dummies, cut = prep

    # pinned and fixed classes first; bail out on contradictions
    base = dict(fixed)
    for rep, mem, fixed_mem, pin_nil, disp in cls:
        if fixed_mem:
            val = fixed[fixed_mem[0]]
            if any(fixed[m] != val for m in fixed_mem[1:]):
                return
            if pin_nil and val is not NIL:
                return
            base[rep] = val
        elif pin_nil:
            base[rep] = NIL

    cand_of = {}
    for rep, mem, fixed_mem, pin_nil, disp in cls:
        if fixed_mem or pin_nil:
            continue
        lists = [candidates[m] for m in mem if m in candidates]
        pool = lists[0]
        if any(l is not pool for l in lists[1:]):
            first = set(lists[0])
            for l in lists[1:]:
                first &= set(l)
            pool = [v for v in lists[0] if v in first]
        cand_of[rep] = pool
    for rep in dummies:
        if not cand_of[rep]:
            return
        base[rep] = cand_of[rep][0]

    count = 0

    def expand(nu):
        out = dict(fixed)
        for rep, mem, fixed_mem, pin_nil, disp in cls:
            val = nu[rep]
            for m in mem:
                out[m] = val
        return out

    def find_one(i, nu):
        for part in due[i]:
            if not eval_qf(part, nu, dom):
                return False
        if i == len(unknowns):
            return True
        var = unknowns[i]
        present = {v for v in nu.values() if v is not NIL}
        for val in _witness_candidates(cand_of[var], present, dom):
            nu[var] = val
            if find_one(i + 1, nu):
                return True
            del nu[var]
        return False

    def go(i, nu):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if i == cut:
            if find_one(i, nu):
                count += 1
                yield expand(nu)
                for v in unknowns[cut:]:
                    nu.pop(v, None)
            return
        for part in due[i]:
            if not eval_qf(part, nu, dom):
                return
        var = unknowns[i]
        if var in disposable:
            present = {v for v in nu.values() if v is not NIL}
            cands = _witness_candidates(cand_of[var], present, dom)
        else:
            cands = cand_of[var]
        tried = set()
        for val in cands:
            if val in tried:
                continue
            tried.add(val)
            nu[var] = val
            yield from go(i + 1, nu)
            del nu[var]
            if limit is not None and count >= limit:
                return

    yield from go(0, base)


def linear_pool(values, extra, dom):
    """Like candidate_pool but with per-gap insertion for the dense order,
    so the pool grows linearly in extra no matter how many slots are
    needed."""
    if dom.kind == "equality":
        return candidate_pool(values, extra, dom)
    vals = sorted(set(Fraction(v) for v in values if v is not NIL))
    if not vals:
        vals = [Fraction(0)]
    out = set(vals)
    for i in range(1, extra + 1):
        out.add(vals[0] - i)
        out.add(vals[-1] + i)
    for a, b in zip(vals, vals[1:]):
        for i in range(1, extra + 1):
            out.add(a + (b - a) * Fraction(i, extra + 1))
    return sorted(out)


def satisfiable_qf(phi, dom, fixed=None, allow_nil=True):
    """Whether phi has a model over the Nil-lifted universe (free variables
    not pinned by `fixed` range over a generic finite pool)."""
    fixed = dict(fixed or {})
    vars_ = sorted((v for v in free_qf_vars(phi) if v not in fixed), key=str)
    anchors = [v for v in fixed.values() if v is not NIL]
    pool = linear_pool(anchors, len(vars_) + 1, dom)
    cands = {v: ([NIL] + pool if allow_nil else list(pool)) for v in vars_}
    # witnesses only: one representative per region is enough for existence
    for _ in solve_qf(phi, dom, fixed, cands, limit=1,
                      throwaway=frozenset(vars_)):
        return True
    return False
