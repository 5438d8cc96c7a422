import pytest

from errors import KeyMissing, VariantMismatch
from hetmap import HetMap, Variant


class TestInsert:
    def test_integer_value(self):
        m = HetMap()
        m.insert("shots", 8192)
        assert m.get("shots", Variant.INT) == 8192
        assert m.variant("shots") is Variant.INT

    def test_overwrite_reports_previous(self):
        m = HetMap()
        assert m.insert("double-key", 2.0) is None
        assert m.insert("double-key", 3.0) == 2.0
        assert m.get("double-key", Variant.REAL) == 3.0

    def test_real_list_keeps_order(self):
        m = HetMap({"vector-key": [1.0, 2.0]})
        assert m.get("vector-key", Variant.REALS) == [1.0, 2.0]

    def test_variants_are_detected(self):
        m = HetMap(
            {
                "b": True,
                "t": "text",
                "ints": [1, 2],
                "texts": ["a", "b"],
                "pairs": [("k", "v")],
                "handle": object(),
            }
        )
        assert m.variant("b") is Variant.BOOL
        assert m.variant("t") is Variant.TEXT
        assert m.variant("ints") is Variant.INTS
        assert m.variant("texts") is Variant.TEXTS
        assert m.variant("pairs") is Variant.PAIRS
        assert m.variant("handle") is Variant.HANDLE


class TestGet:
    def test_missing_key(self):
        with pytest.raises(KeyMissing, match="absent"):
            HetMap().get("absent", Variant.REAL)

    def test_wrong_variant(self):
        m = HetMap({"shots": 8192})
        with pytest.raises(VariantMismatch) as info:
            m.get("shots", Variant.TEXT)
        assert info.value.stored == "int"
        assert info.value.requested == "text"

    def test_integer_widens_to_real(self):
        m = HetMap({"tol": 1})
        assert m.get("tol", Variant.REAL) == 1.0
        assert isinstance(m.get("tol", Variant.REAL), float)

    def test_real_does_not_narrow(self):
        with pytest.raises(VariantMismatch):
            HetMap({"x": 1.5}).get("x", Variant.INT)

    def test_bool_is_not_an_integer(self):
        with pytest.raises(VariantMismatch):
            HetMap({"flag": True}).get("flag", Variant.INT)

    def test_get_or_default(self):
        m = HetMap({"a": 1})
        assert m.get_or("b", Variant.INT, 7) == 7
        assert m.get_or("a", Variant.INT, 7) == 1

    def test_round_trip(self):
        values = {"i": -3, "r": 0.25, "b": False, "t": "xasm", "l": [0.5, 1.5], "n": [3, 4], "s": ["a"]}
        m = HetMap()
        for key, value in values.items():
            m.insert(key, value)
        for key, value in values.items():
            assert m.get(key, m.variant(key)) == value


class TestConvenience:
    def test_update_copy_remove(self):
        m = HetMap({"a": 1})
        clone = m.copy().update({"b": "x"})
        assert "b" in clone and "b" not in m
        assert clone.remove("a") == 1
        assert clone.keys() == ["b"]

    def test_to_json_drops_handles(self):
        m = HetMap({"shots": 10, "obj": object(), "pairs": [("a", "b")]})
        assert m.to_json() == {"shots": 10, "pairs": [["a", "b"]]}

    def test_item_access(self):
        m = HetMap()
        m["k"] = 2.5
        assert m["k"] == 2.5
        with pytest.raises(KeyError):
            m["missing"]
