"""The four user-facing workflows: Category, Product, New list, List.

A thin validated facade over the store; every mutation goes through store
operations so the sync tracker sees exactly one change per call.  List
items derive a display color from the bought flag: red = still to buy,
green = bought.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import List, Optional

from .errors import (
    DuplicateCategory,
    DuplicateListItem,
    InvalidName,
    InvalidPrice,
    UnknownCategory,
    UnknownItem,
    UnknownProduct,
)
from .store import Store

MAX_NAME_LEN = 64

COLOR_RED = "red"
COLOR_GREEN = "green"


@dataclass(frozen=True)
class Category:
    id: int
    name: str


@dataclass(frozen=True)
class Product:
    id: int
    category_id: Optional[int]
    name: str
    price: Decimal
    is_favorite: bool


@dataclass(frozen=True)
class ShopListItem:
    id: int
    product_id: int
    bought: bool
    added_at: int

    @property
    def display_color(self) -> str:
        return COLOR_GREEN if self.bought else COLOR_RED


@dataclass(frozen=True)
class ShopListEntry:
    """A list item joined with its product's name and price."""

    item: ShopListItem
    product_name: str
    price: Decimal


def _category(row: dict) -> Category:
    return Category(row["Category_Id"], row["Category_Name"])


def _product(row: dict) -> Product:
    return Product(
        row["Product_Id"], row["Category_Id"], row["Product_Name"],
        row["Price"], row["Is_Favorite"],
    )


def _item(row: dict) -> ShopListItem:
    return ShopListItem(row["Item_Id"], row["Product_Id"], row["Bought"], row["Added_At"])


def _check_name(name: str) -> str:
    if not isinstance(name, str) or not name.strip():
        raise InvalidName("name must be non-empty")
    name = name.strip()
    if len(name) > MAX_NAME_LEN:
        raise InvalidName(f"name longer than {MAX_NAME_LEN} characters")
    return name


def _check_price(price) -> Decimal:
    if isinstance(price, bool):
        raise InvalidPrice(f"not a price: {price!r}")
    if isinstance(price, (int, str)):
        try:
            price = Decimal(price)
        except InvalidOperation:
            raise InvalidPrice(f"not a price: {price!r}") from None
    if not isinstance(price, Decimal) or price.is_nan():
        raise InvalidPrice(f"not a price: {price!r}")
    if price < 0:
        raise InvalidPrice("price must be >= 0")
    return price


class ShopListApp:
    def __init__(self, store: Store):
        self.store = store

    # -- categories --------------------------------------------------------

    def add_category(self, name: str) -> Category:
        name = _check_name(name)
        for row in self.store.scan("Categories"):
            if row["Category_Name"].lower() == name.lower():
                raise DuplicateCategory(f"category {name!r} already exists")
        pk = self.store.insert_row("Categories", {"Category_Name": name})
        return Category(pk, name)

    def list_categories(self) -> List[Category]:
        return [_category(r) for r in self.store.scan("Categories")]

    def get_category(self, category_id: int) -> Category:
        row = self.store.get_row("Categories", category_id)
        if row is None:
            raise UnknownCategory(f"no category {category_id}")
        return _category(row)

    # -- products ----------------------------------------------------------

    def add_product(
        self,
        category_id: Optional[int],
        name: str,
        price,
        favorite: bool = False,
    ) -> Product:
        name = _check_name(name)
        price = _check_price(price)
        if category_id is not None and self.store.get_row("Categories", category_id) is None:
            raise UnknownCategory(f"no category {category_id}")
        pk = self.store.insert_row("Products", {
            "Category_Id": category_id,
            "Product_Name": name,
            "Price": price,
            "Is_Favorite": bool(favorite),
        })
        return self.get_product(pk)

    def get_product(self, product_id: int) -> Product:
        row = self.store.get_row("Products", product_id)
        if row is None:
            raise UnknownProduct(f"no product {product_id}")
        return _product(row)

    def set_favorite(self, product_id: int, favorite: bool) -> Product:
        current = self.get_product(product_id)
        if current.is_favorite != bool(favorite):
            self.store.update_row("Products", product_id, {"Is_Favorite": bool(favorite)})
        return self.get_product(product_id)

    def list_products(
        self,
        category_id: Optional[int] = None,
        favorites_only: bool = False,
    ) -> List[Product]:
        if category_id is not None:
            self.get_category(category_id)
        products = [_product(r) for r in self.store.scan("Products")]
        if category_id is not None:
            products = [p for p in products if p.category_id == category_id]
        if favorites_only:
            products = [p for p in products if p.is_favorite]
        products.sort(key=lambda p: (p.name, p.id))
        return products

    # -- shopping list -----------------------------------------------------

    def new_shoplist(self) -> int:
        cleared = 0
        for row in self.store.scan("List"):
            if self.store.delete_row("List", row["Item_Id"]):
                cleared += 1
        return cleared

    def add_to_list(self, product_id: int) -> ShopListItem:
        self.get_product(product_id)
        for row in self.store.scan("List"):
            if row["Product_Id"] == product_id:
                raise DuplicateListItem(f"product {product_id} is already on the list")
        pk = self.store.insert_row("List", {
            "Product_Id": product_id,
            "Bought": False,
            "Added_At": self.store.clock(),
        })
        return self.get_item(pk)

    def get_item(self, item_id: int) -> ShopListItem:
        row = self.store.get_row("List", item_id)
        if row is None:
            raise UnknownItem(f"no list item {item_id}")
        return _item(row)

    def check_item(self, item_id: int) -> ShopListItem:
        current = self.get_item(item_id)
        self.store.update_row("List", item_id, {"Bought": not current.bought})
        return self.get_item(item_id)

    def current_list(self) -> List[ShopListEntry]:
        products = {r["Product_Id"]: r for r in self.store.scan("Products")}
        entries = []
        for row in self.store.scan("List"):
            item = _item(row)
            prod = products[item.product_id]
            entries.append(ShopListEntry(item, prod["Product_Name"], prod["Price"]))
        entries.sort(key=lambda e: (e.item.added_at, e.item.id))
        return entries
