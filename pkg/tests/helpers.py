"""Builders for synthetic record tables."""

import numpy as np

from humanbell.models import QuantumModel, RetardedLHV
from humanbell.records import RecordTable

OPT_A = (3 * np.pi / 4, np.pi / 4)
OPT_B = (0.0, np.pi / 2)


def table(setting_a, setting_b, x, y, internal_a=None, internal_b=None, retarded_a=None, retarded_b=None,
          template_a=None, template_b=None):
    n = len(x)
    ia = np.zeros(n, bool) if internal_a is None else np.asarray(internal_a, bool)
    ib = np.zeros(n, bool) if internal_b is None else np.asarray(internal_b, bool)
    return RecordTable(
        pair_id=np.arange(n), emission_t=np.arange(n) * 1e-3,
        t_meas_a=np.arange(n) * 1e-3, t_meas_b=np.arange(n) * 1e-3,
        setting_a=setting_a, setting_b=setting_b,
        retarded_a=setting_a if retarded_a is None else retarded_a,
        retarded_b=setting_b if retarded_b is None else retarded_b,
        outcome_a=x, outcome_b=y, internal_a=ia, internal_b=ib,
        template_a=np.where(ia, 0, -1) if template_a is None else template_a,
        template_b=np.where(ib, 0, -1) if template_b is None else template_b,
    )


def model_table(model, n, gen, angles_a=OPT_A, angles_b=OPT_B, fixed_retarded=None, internal=False):
    """Uniform random setting indices; outcomes from `model`.

    fixed_retarded=(i, j) pins the retarded indices, otherwise they equal the actual ones.
    """
    sa = gen.integers(0, 2, n)
    sb = gen.integers(0, 2, n)
    if fixed_retarded is None:
        ra, rb = sa, sb
    else:
        ra, rb = np.full(n, fixed_retarded[0]), np.full(n, fixed_retarded[1])
    aa, ab = np.asarray(angles_a), np.asarray(angles_b)
    x, y = model.sample(aa[sa], ab[sb], aa[ra], ab[rb], gen)
    flag = np.full(n, internal or fixed_retarded is not None)
    return table(sa, sb, x, y, flag, flag, ra, rb)


__all__ = ["OPT_A", "OPT_B", "table", "model_table", "QuantumModel", "RetardedLHV"]
