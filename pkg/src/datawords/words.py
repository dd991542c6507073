"""Data words (a finite-label track convolved with a data track), multi-track
words, and the 1-based position intervals used as quantifier scopes."""

from .atoms import NIL, parse_value, print_value


class DataWord:
    """Equal-length label and data tracks. Positions are 1-based; data entries
    are never Nil."""

    __slots__ = ("labels", "data")

    def __init__(self, labels, data):
        labels = tuple(labels)
        data = tuple(data)
        if len(labels) != len(data):
            raise ValueError("label/data track length mismatch")
        for d in data:
            if d is NIL:
                raise ValueError("data track entries must be real values")
        self.labels = labels
        self.data = data

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return (isinstance(other, DataWord)
                and self.labels == other.labels and self.data == other.data)

    def __hash__(self):
        return hash((self.labels, self.data))

    def __repr__(self):
        return "DataWord(%r)" % print_data_word(self)

    def letter(self, pos):
        """(label, datum) at a 1-based position."""
        return self.labels[pos - 1], self.data[pos - 1]

    def slice(self, lo, hi):
        """Sub-word on 1-based positions lo..hi inclusive."""
        return DataWord(self.labels[lo - 1:hi], self.data[lo - 1:hi])

    def reverse(self):
        return DataWord(self.labels[::-1], self.data[::-1])

    def concat(self, other):
        return DataWord(self.labels + other.labels, self.data + other.data)


EPSILON = DataWord((), ())


def check_alphabet(word, alphabet):
    for a in word.labels:
        if a not in alphabet:
            raise ValueError("label %r outside the declared alphabet" % (a,))


def parse_data_word(text, dom):
    """Parse 'a:10 b:42' into a DataWord; the empty string is the empty word."""
    labels, data = [], []
    for chunk in text.split():
        if ":" not in chunk:
            raise ValueError("expected label:value, got %r" % chunk)
        lab, val = chunk.split(":", 1)
        labels.append(lab)
        data.append(parse_value(val, dom))
    return DataWord(labels, data)


def print_data_word(word):
    return " ".join("%s:%s" % (l, print_value(d))
                    for l, d in zip(word.labels, word.data))


class MultiTrackWord:
    """A convolution of equal-length tracks, each either a finite-label track
    or a data track."""

    __slots__ = ("tracks",)

    def __init__(self, tracks):
        tracks = tuple(tuple(t) for t in tracks)
        if tracks:
            n = len(tracks[0])
            for t in tracks:
                if len(t) != n:
                    raise ValueError("tracks must have equal length")
        self.tracks = tracks

    def __len__(self):
        return len(self.tracks[0]) if self.tracks else 0

    def __eq__(self, other):
        return isinstance(other, MultiTrackWord) and self.tracks == other.tracks

    def __hash__(self):
        return hash(self.tracks)

    def column(self, pos):
        return tuple(t[pos - 1] for t in self.tracks)


def convolve(tracks):
    return MultiTrackWord(tracks)


def project(word, index):
    """Track at a 1-based index of a multi-track word."""
    return word.tracks[index - 1]


# ---------------------------------------------------------------------------
# intervals of 1-based positions

class Interval:
    """Non-empty [lo, hi] with 1 <= lo <= hi, or the distinguished empty
    interval."""

    __slots__ = ("lo", "hi", "_empty")

    def __init__(self, lo, hi):
        if lo < 1 or hi < lo:
            raise ValueError("bad interval [%r, %r]" % (lo, hi))
        self.lo = lo
        self.hi = hi
        self._empty = False

    @classmethod
    def _make_empty(cls):
        iv = object.__new__(cls)
        iv.lo = iv.hi = 0
        iv._empty = True
        return iv

    @classmethod
    def full(cls, n):
        return EMPTY_INTERVAL if n == 0 else cls(1, n)

    def is_empty(self):
        return self._empty

    def __len__(self):
        return 0 if self._empty else self.hi - self.lo + 1

    def __contains__(self, pos):
        return not self._empty and self.lo <= pos <= self.hi

    def positions(self):
        return [] if self._empty else list(range(self.lo, self.hi + 1))

    def intersects(self, other):
        if self._empty or other._empty:
            return False
        return self.lo <= other.hi and other.lo <= self.hi

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if self._empty or other._empty:
            return self._empty and other._empty
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self._empty, self.lo, self.hi))

    def __repr__(self):
        return "Interval.EMPTY" if self._empty else "Interval(%d, %d)" % (self.lo, self.hi)


EMPTY_INTERVAL = Interval._make_empty()


def subs(interval, cuts):
    """Split an interval at a cut-point set: consecutive ranges between the
    members of (cuts & interval) | {lo, hi+1}, left ends aligned to cuts."""
    if interval.is_empty():
        return []
    marks = sorted(set(c for c in cuts if c in interval) | {interval.lo, interval.hi + 1})
    return [Interval(a, b - 1) for a, b in zip(marks, marks[1:])]
