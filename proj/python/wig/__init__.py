"""Python bindings for the wig library.

Signals are 1-d complex arrays on the centered grid x_j = (j - n/2) h; the
default step is the self-dual h = 1/sqrt(n). Operator matrices follow the
library convention T f = h * M @ f.
"""

from ._wig import (
    WigError,
    apply_word,
    dft,
    fio_membership,
    gaussian,
    hermite,
    idft,
    intertwining_defect,
    is_symplectic,
    propagate,
    read_wkt,
    run_suite,
    selfdual_step,
    stft,
    suite_names,
    type1_fio,
    wigner,
    wigner_kernel,
    word_projection,
    write_wkt,
)

__all__ = [
    "WigError",
    "apply_word",
    "dft",
    "fio_membership",
    "gaussian",
    "hermite",
    "idft",
    "intertwining_defect",
    "is_symplectic",
    "propagate",
    "read_wkt",
    "run_suite",
    "selfdual_step",
    "stft",
    "suite_names",
    "type1_fio",
    "wigner",
    "wigner_kernel",
    "word_projection",
    "write_wkt",
]
