import numpy as np
import pytest

from rulelens.dataset import Column, ColumnKind, Dataset, infer_kinds, load_csv, with_target
from rulelens.linguistics import build_vocabulary


def make_dataset(columns, target=None):
    """columns: list of (name, values); numeric lists become continuous."""
    cols = []
    n = len(columns[0][1])
    for name, values in columns:
        if all(isinstance(v, (int, float)) for v in values):
            cols.append(Column(name=name, kind=ColumnKind.CONTINUOUS,
                               values=tuple(float(v) for v in values),
                               minimum=float(min(values)), maximum=float(max(values))))
        else:
            vals = tuple(str(v) for v in values)
            cols.append(Column(name=name, kind=ColumnKind.CATEGORICAL, values=vals,
                               categories=tuple(sorted(set(vals)))))
    return Dataset(columns=tuple(cols), n=n, target=target)


@pytest.fixture
def salaries_vocab_dataset():
    """Small typed dataset + vocabulary mirroring the demo schema."""
    ds = make_dataset(
        [
            ("Gender", ["female", "male", "other", "female", "male", "other", "female", "male"]),
            ("GPA", [1.0, 2.0, 3.0, 4.0, 1.5, 2.5, 3.5, 2.0]),
            ("Salary", [10.0, 50.0, 90.0, 20.0, 60.0, 80.0, 15.0, 55.0]),
        ],
        target="Salary",
    )
    vocab = build_vocabulary(ds, 3, 3)
    return ds, vocab


@pytest.fixture
def xy_dataset():
    """One predictor x in [0, 10], target Y in [0, 100]."""
    ds = make_dataset(
        [("x", [0.0, 2.5, 5.0, 7.5, 10.0, 1.0, 9.0, 4.0]),
         ("Y", [0.0, 25.0, 50.0, 75.0, 100.0, 10.0, 90.0, 40.0])],
        target="Y",
    )
    return ds, build_vocabulary(ds, 3, 3)
