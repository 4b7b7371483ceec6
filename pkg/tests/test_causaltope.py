import pytest
import sympy

from causalspace import causaltope as ct
from causalspace.orders import hist_space, parse_order
from causalspace.spaces import Space


def order_space(text):
    return Space(hist_space(parse_order(text)))


ANCHORS = [
    ("discrete(A,B,C)", 91, 37, 26),
    ("total(A,B,C)", 35, 21, 42),
    ("total(A,C)|total(B,C)", 47, 23, 40),
    ("total(A,B)|total(A,C)", 51, 29, 34),
    ("total(A,B)|discrete(C)", 63, 31, 32),
]


@pytest.mark.parametrize("text,rows,indep,dim", ANCHORS)
def test_order_space_systems(text, rows, indep, dim):
    space = order_space(text)
    system = ct.build_equations(space)
    assert system.num_rows == rows
    assert ct.rank(system) == indep
    assert ct.causaltope_dim(space) == dim


def test_single_event_space_dim():
    space = Space.from_histories(
        [1, 2]  # A/0, A/1
    )
    assert ct.causaltope_dim(space) == 2  # 4 - 1 - 1


def test_rank_of_zero_system():
    empty = ct.LinearSystem((), 2)
    assert ct.rank(empty) == 0
    zero_rows = ct.LinearSystem(((0,) * 16, (0,) * 16), 2)
    assert ct.rank(zero_rows) == 0


def test_rows_are_marginal_differences():
    system = ct.build_equations(order_space("total(A,B,C)"))
    for row in system.rows:
        assert sum(v for v in row if v > 0) == -sum(v for v in row if v < 0)
        assert set(row) <= {-1, 0, 1}


def test_rank_matches_sympy():
    for text, *_ in ANCHORS[:3]:
        system = ct.build_equations(order_space(text))
        expected = sympy.Matrix(system.rows).rank()
        assert ct.rank(system) == expected


def test_rank_invariant_under_row_permutation_and_pair_scheme():
    space = order_space("total(A,B)|discrete(C)")
    system = ct.build_equations(space)
    shuffled = ct.LinearSystem(tuple(reversed(system.rows)), system.num_events)
    assert ct.rank(shuffled) == ct.rank(system)
    all_pairs = ct.build_equations(space, pairs="all")
    assert ct.rank(all_pairs) == ct.rank(system)
    assert all_pairs.num_rows >= system.num_rows


def test_product_models_satisfy_causality_rows():
    # models whose outputs are input-independent coin tosses null every row
    for text, *_ in ANCHORS[:3]:
        system = ct.build_equations(order_space(text))
        n = system.num_events
        weights = [3, 5, 7][:n]
        model = []
        for i in range(1 << n):
            for o in range(1 << n):
                p = 1
                for e in range(n):
                    p *= weights[e] if (o >> (n - 1 - e)) & 1 else 13 - weights[e]
                model.append(p)
        for row in system.rows:
            assert sum(c * m for c, m in zip(row, model)) == 0


def test_dump_csv_roundtrip():
    space = order_space("total(A,B)")
    system = ct.build_equations(space)
    data = ct.dump_csv(system)
    lines = data.decode().strip().split("\n")
    assert len(lines) == system.num_rows + 1  # header included
    parsed = ct.parse_csv(data, system.num_events)
    assert parsed == system


def test_dump_csv_empty_system():
    empty = ct.LinearSystem((), 2)
    data = ct.dump_csv(empty)
    assert data.decode().strip().count("\n") == 0  # header only
    assert ct.parse_csv(data, 2) == empty


def test_dump_pgm():
    system = ct.build_equations(order_space("total(A,B)"))
    data = ct.dump_pgm(system).decode()
    header = data.split("\n")[0].split()
    assert header[0] == "P2"
    assert int(header[1]) == system.num_columns
    assert int(header[2]) == system.num_rows
    values = {int(v) for line in data.split("\n")[1:] if line for v in line.split()}
    assert values <= {0, 128, 255}


def test_dump_system_dispatch():
    system = ct.build_equations(order_space("total(A,B)"))
    assert ct.dump_system(system, "csv") == ct.dump_csv(system)
    assert ct.dump_system(system, "pgm") == ct.dump_pgm(system)
    with pytest.raises(ValueError):
        ct.dump_system(system, "svg")


def test_build_equations_requires_complete_space():
    incomplete = Space(hist_space(parse_order("total(A,{B,C})")))
    with pytest.raises(ValueError):
        ct.build_equations(incomplete)
    not_free = Space.from_histories([1, 4, 8])  # A/0, B/0, B/1
    with pytest.raises(ValueError):
        ct.build_equations(not_free)


def test_combined_rank():
    a = ct.build_equations(order_space("total(A,B,C)"))
    b = ct.build_equations(order_space("total(B,A,C)"))
    stacked = ct.combined_rank([a, b])
    assert max(ct.rank(a), ct.rank(b)) <= stacked <= ct.rank(a) + ct.rank(b)
    assert ct.combined_rank([a]) == ct.rank(a)
    with pytest.raises(ValueError):
        ct.combined_rank([a, ct.LinearSystem((), 2)])
