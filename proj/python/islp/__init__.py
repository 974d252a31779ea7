from ._core import (
    Grammar,
    GrammarError,
    Index,
    RangeError,
    apply_morphism,
    balance,
    bwt_runs,
    clamp_degree,
    delta,
    edit,
    gen_fibonacci,
    gen_left_chain,
    gen_random_unbalanced,
    gen_sk,
    gen_thue_morse_concat,
    lz76_z,
    random_islp,
    reverse,
    thue_morse_prefix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
