import random
import string
from decimal import Decimal

import pytest

from shoplist import sqlcmd
from shoplist.errors import (
    ApplyError,
    ForeignKeyViolation,
    NotAQuery,
    SqlSyntaxError,
    UnsupportedStatement,
)
from shoplist.sqlcmd import (
    Delete,
    Insert,
    ResultSet,
    STAR,
    Select,
    Update,
    apply_changes,
    execute_non_query,
    fill,
    parse,
    render,
)

SAMPLE_INSERT = "Insert into Products(Product_Name, Price) values ('Milk', 2.5)"


# -- parsing ----------------------------------------------------------------

def test_parse_sample_insert():
    cmd = parse(SAMPLE_INSERT)
    assert cmd == Insert("Products", ("Product_Name", "Price"), ("Milk", Decimal("2.5")))


def test_parse_minimal_select():
    assert parse("select * from Categories") == Select(STAR, "Categories", None)


def test_parse_select_with_predicate():
    cmd = parse("SELECT Product_Name, Price FROM Products WHERE Price >= 10")
    assert cmd == Select(("Product_Name", "Price"), "Products", ("Price", ">=", 10))


def test_parse_update_and_delete():
    assert parse("update Products set Price = 3.0, Is_Favorite = TRUE where Product_Id = 2") == \
        Update("Products", (("Price", Decimal("3.0")), ("Is_Favorite", True)),
               ("Product_Id", "=", 2))
    assert parse("delete from List where Bought = FALSE") == \
        Delete("List", ("Bought", "=", False))


def test_parse_unsupported_statement():
    with pytest.raises(UnsupportedStatement):
        parse("DROP TABLE Products")


def test_parse_quote_escaping():
    cmd = parse("insert into P(a) values ('it''s')")
    assert cmd.values == ("it's",)


def test_parse_null_literal():
    cmd = parse("insert into P(a) values (NULL)")
    assert cmd.values == (None,)


@pytest.mark.parametrize("bad", [
    "",
    "insert into P(a, b) values (1)",
    "select from Products",
    "insert into P(a) values (1) extra",
    "update P where x = 1",
    "select * from P where x ! 1",
    "delete P",
])
def test_parse_syntax_errors(bad):
    with pytest.raises(SqlSyntaxError):
        parse(bad)


def test_syntax_error_carries_position():
    try:
        parse("select * frm Products")
    except SqlSyntaxError as e:
        assert e.position == 9
        assert "FROM" in e.expected
    else:
        pytest.fail("expected SqlSyntaxError")


# -- rendering --------------------------------------------------------------

def test_render_canonical_forms():
    assert render(parse(SAMPLE_INSERT)) == \
        "INSERT INTO Products (Product_Name, Price) VALUES ('Milk', 2.5)"
    assert render(parse("select * from Categories")) == "SELECT * FROM Categories"
    assert render(parse("delete from P where a='x''y'")) == "DELETE FROM P WHERE a = 'x''y'"


def _random_identifier(rng):
    while True:
        first = rng.choice(string.ascii_letters + "_")
        rest = "".join(rng.choices(string.ascii_letters + string.digits + "_",
                                   k=rng.randrange(0, 10)))
        ident = first + rest
        if ident.upper() not in sqlcmd._RESERVED:
            return ident


def _random_literal(rng):
    roll = rng.random()
    if roll < 0.25:
        return rng.randrange(-10**9, 10**9)
    if roll < 0.5:
        return Decimal(rng.randrange(-10**7, 10**7)) / Decimal(10) ** rng.randrange(1, 5)
    if roll < 0.75:
        alphabet = string.printable + "'éü"
        return "".join(rng.choices(alphabet, k=rng.randrange(0, 12)))
    if roll < 0.85:
        return True
    if roll < 0.95:
        return False
    return None


def random_command(rng):
    table = _random_identifier(rng)
    which = rng.randrange(4)
    where = None
    if rng.random() < 0.6:
        where = (_random_identifier(rng), rng.choice(sqlcmd.PREDICATE_OPS
                 if hasattr(sqlcmd, "PREDICATE_OPS")
                 else ("=", "<>", "<", "<=", ">", ">=")), _random_literal(rng))
    if which == 0:
        n = rng.randrange(1, 6)
        return Insert(table,
                      tuple(_random_identifier(rng) for _ in range(n)),
                      tuple(_random_literal(rng) for _ in range(n)))
    if which == 1:
        if rng.random() < 0.4:
            cols = STAR
        else:
            cols = tuple(_random_identifier(rng) for _ in range(rng.randrange(1, 5)))
        return Select(cols, table, where)
    if which == 2:
        n = rng.randrange(1, 5)
        return Update(table,
                      tuple((_random_identifier(rng), _random_literal(rng)) for _ in range(n)),
                      where)
    return Delete(table, where)


def test_parse_render_round_trip_randomized():
    rng = random.Random(2024)
    for _ in range(2_000):
        cmd = random_command(rng)
        assert parse(render(cmd)) == cmd


def test_parse_render_parse_fixpoint():
    statements = [
        SAMPLE_INSERT,
        "select   *   from  categories",
        "UPDATE products SET price=1.5 WHERE product_id=3",
        "delete from list",
    ]
    for s in statements:
        once = parse(s)
        assert parse(render(parse(render(once)))) == once


# -- execution --------------------------------------------------------------

def test_execute_sample_insert(store):
    assert execute_non_query(store, parse(SAMPLE_INSERT)) == 1
    rows = store.scan("Products")
    assert len(rows) == 1
    assert rows[0]["Product_Name"] == "Milk"
    assert rows[0]["Price"] == Decimal("2.5")


def test_execute_update_zero_rows(store):
    assert execute_non_query(store, parse("update Products set Price = 1 where Product_Id = 9")) == 0


def test_execute_select_rejected(store):
    with pytest.raises(NotAQuery):
        execute_non_query(store, parse("select * from Products"))


def test_execute_delete_fk_passthrough(store):
    execute_non_query(store, parse("insert into Categories(Category_Name) values ('food')"))
    execute_non_query(store, parse(
        "insert into Products(Category_Id, Product_Name, Price) values (1, 'bread', 2)"))
    with pytest.raises(ForeignKeyViolation):
        execute_non_query(store, parse("delete from Categories"))


def test_insert_increases_count_by_one(store):
    for i in range(5):
        before = len(store.scan("Categories"))
        execute_non_query(store, parse(f"insert into Categories(Category_Name) values ('c{i}')"))
        assert len(store.scan("Categories")) == before + 1


# -- fill -------------------------------------------------------------------

def test_fill_empty_list_has_four_columns(store):
    rs = fill(store, parse("select * from List"))
    assert rs.columns == ["Item_Id", "Product_Id", "Bought", "Added_At"]
    assert rs.rows == []


def test_fill_projection(store):
    execute_non_query(store, parse(SAMPLE_INSERT))
    rs = fill(store, parse("select Product_Name from Products"))
    assert rs.columns == ["Product_Name"]
    assert rs.rows == [["Milk"]]
    assert rs.row_states == ["unchanged"]


def test_fill_matches_scan_with_predicate(store):
    rng = random.Random(5)
    for i in range(40):
        store.insert_row("Products", {
            "Product_Name": f"p{i}", "Price": Decimal(rng.randrange(50)),
        })
    rs = fill(store, parse("select * from Products where Price > 10"))
    scanned = store.scan("Products", ("Price", ">", Decimal(10)))
    assert rs.rows == [[r[c] for c in rs.columns] for r in scanned]


def test_fill_never_mutates(store):
    store.insert_row("Categories", {"Category_Name": "food"})
    before = store.scan("Categories")
    fill(store, parse("select * from Categories"))
    assert store.scan("Categories") == before


# -- apply_changes ----------------------------------------------------------

def test_apply_added_row(store):
    rs = fill(store, parse("select * from Categories"))
    rs.add_row([None, "food"])
    assert apply_changes(store, rs) == 1
    assert store.scan("Categories")[0]["Category_Name"] == "food"


def test_apply_unchanged_is_identity(store):
    store.insert_row("Categories", {"Category_Name": "food"})
    rs = fill(store, parse("select * from Categories"))
    assert apply_changes(store, rs) == 0


def test_apply_modify_and_delete(store):
    a = store.insert_row("Categories", {"Category_Name": "a"})
    store.insert_row("Categories", {"Category_Name": "b"})
    rs = fill(store, parse("select * from Categories"))
    rs.set_value(0, "Category_Name", "renamed")
    rs.mark_deleted(1)
    assert apply_changes(store, rs) == 2
    rows = store.scan("Categories")
    assert len(rows) == 1 and rows[0]["Category_Name"] == "renamed"
    assert rows[0]["Category_Id"] == a


def test_apply_error_reports_row_index(store):
    cat = store.insert_row("Categories", {"Category_Name": "food"})
    store.insert_row("Products", {
        "Category_Id": cat, "Product_Name": "bread", "Price": Decimal(1),
    })
    rs = fill(store, parse("select * from Categories"))
    rs.mark_deleted(0)  # still referenced -> FK violation
    with pytest.raises(ApplyError) as err:
        apply_changes(store, rs)
    assert err.value.row_index == 0
    assert isinstance(err.value.cause, ForeignKeyViolation)


def test_apply_random_batch_equals_sequential_oracle(store, store_factory):
    rng = random.Random(11)
    mirror = store_factory()
    for i in range(20):
        row = {"Product_Name": f"p{i}", "Price": Decimal(i)}
        store.insert_row("Products", dict(row))
        mirror.insert_row("Products", dict(row))
    rs = fill(store, parse("select * from Products"))
    ops = []  # replay plan for the mirror, in apply order
    for i in range(len(rs.rows)):
        roll = rng.random()
        if roll < 0.3:
            rs.mark_deleted(i)
            ops.append(("delete", rs.pks[i], None))
        elif roll < 0.6:
            price = Decimal(rng.randrange(100))
            rs.set_value(i, "Price", price)
            ops.append(("update", rs.pks[i], price))
    for _ in range(5):
        name = f"new{rng.randrange(1000)}"
        rs.add_row([None, None, name, Decimal(3), False])
        ops.append(("insert", None, name))
    applied = apply_changes(store, rs)
    count = 0
    for kind, pk, arg in sorted(ops, key=lambda o: {"delete": 0, "update": 1, "insert": 2}[o[0]]):
        if kind == "delete":
            count += mirror.delete_row("Products", pk)
        elif kind == "update":
            count += mirror.update_row("Products", pk, {"Price": arg})
        else:
            mirror.insert_row("Products", {"Product_Name": arg, "Price": Decimal(3)})
            count += 1
    assert applied == count
    assert store.scan("Products") == mirror.scan("Products")
