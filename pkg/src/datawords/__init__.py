"""Three equivalent ways to describe data-word languages: register automata
with guessing, data-regular expressions, and scoped MSO, plus the
translations between them."""

from .atoms import (
    NIL,
    AtomDomain,
    EQUALITY,
    DENSE_ORDER,
    candidate_pool,
    eval_qf,
    parse_qf,
    parse_value,
    print_qf,
    print_value,
    region_representatives,
    same_region,
    type_of,
)
from .words import (
    DataWord,
    Interval,
    EMPTY_INTERVAL,
    MultiTrackWord,
    convolve,
    parse_data_word,
    print_data_word,
    project,
    subs,
)
