import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raschclust.data import ResponseMatrix, parse_csv, read_csv
from raschclust.errors import DataError


def test_defaults_and_shape():
    m = ResponseMatrix(np.array([[0, 1], [1, 0], [1, 1]]))
    assert m.person_count == 3
    assert m.item_count == 2
    assert m.item_labels == ("item1", "item2")


@pytest.mark.parametrize("values, msg", [
    (np.array([[0, 2], [1, 0]]), "only 0 and 1"),
    (np.array([[0, 1]]), "at least 2 persons"),
    (np.array([[0], [1]]), "at least 2 items"),
    (np.zeros(4), "2-d"),
])
def test_rejects_bad_values(values, msg):
    with pytest.raises(DataError, match=msg):
        ResponseMatrix(values)


def test_rejects_duplicate_labels():
    with pytest.raises(DataError, match="unique"):
        ResponseMatrix(np.eye(2, dtype=int), ("a", "a"))


def test_values_are_immutable():
    m = ResponseMatrix(np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        m.values[0, 0] = 1


def test_restrict_keeps_order_and_labels():
    m = ResponseMatrix(np.array([[0, 1, 1], [1, 0, 1]]), ("a", "b", "c"))
    r = m.restrict([2, 0])
    assert r.item_labels == ("c", "a")
    assert (r.values == m.values[:, [2, 0]]).all()
    with pytest.raises(DataError, match="duplicate"):
        m.restrict([0, 0])
    with pytest.raises(DataError, match="out of range"):
        m.restrict([0, 3])


def test_constant_items():
    m = ResponseMatrix(np.array([[0, 1, 1], [0, 0, 1], [0, 1, 1]]))
    assert m.constant_items() == [0, 2]


def test_parse_simple():
    m = parse_csv("a,b\n0,1\n1,0\n1,1\n")
    assert m.person_count == 3 and m.item_count == 2


def test_parse_person_id_column_ignored():
    m = parse_csv("person_id,a,b\np1,0,1\np2,1,0\n")
    assert m.item_labels == ("a", "b")
    assert m.person_count == 2


@pytest.mark.parametrize("text, msg", [
    ("", "empty file"),
    ("a,b\n", "no data rows"),
    ("a,a\n0,1\n", "duplicate item labels: a"),
    ("a,b\n0,1\n1\n", "row 3 has 1 cells"),
    ("a,b\n0,NA\n1,0\n", r"non-binary cell 'NA' at row 2, column 'b'"),
])
def test_parse_errors_name_the_problem(text, msg):
    with pytest.raises(DataError, match=msg):
        parse_csv(text)


def test_read_csv_roundtrip(tmp_path, rasch6):
    path = tmp_path / "data.csv"
    path.write_text(rasch6.to_csv())
    back = read_csv(path)
    assert back.item_labels == rasch6.item_labels
    assert (back.values == rasch6.values).all()


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(2, 8), st.integers(0, 10 ** 6))
def test_csv_roundtrip_property(P, I, seed):
    rng = np.random.default_rng(seed)
    m = ResponseMatrix(rng.integers(0, 2, size=(P, I)))
    back = parse_csv(m.to_csv())
    assert (back.values == m.values).all()
    assert back.item_labels == m.item_labels
