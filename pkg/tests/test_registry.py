import pytest

from errors import DuplicateService, ServiceNotFound
from registry import ServiceRegistry
from xasm import XasmCompiler


class TestServiceRegistry:
    def test_register_and_get(self):
        registry = ServiceRegistry()
        registry.register("compiler", "xasm", XasmCompiler)
        assert registry.get("compiler", "xasm").name() == "xasm"

    def test_duplicate_without_replace(self):
        registry = ServiceRegistry()
        registry.register("compiler", "xasm", XasmCompiler)
        with pytest.raises(DuplicateService):
            registry.register("compiler", "xasm", XasmCompiler)
        registry.register("compiler", "xasm", XasmCompiler, replace=True)

    def test_missing(self):
        with pytest.raises(ServiceNotFound, match="compiler:nonexistent"):
            ServiceRegistry().get("compiler", "nonexistent")

    def test_fresh_instances(self):
        registry = ServiceRegistry()
        registry.register("compiler", "xasm", XasmCompiler)
        assert registry.get("compiler", "xasm") is not registry.get("compiler", "xasm")

    def test_listing_and_clear(self):
        registry = ServiceRegistry()
        registry.register("b", "two", object)
        registry.register("a", "one", object)
        assert registry.services() == [("a", "one"), ("b", "two")]
        assert registry.names("a") == ["one"]
        registry.clear()
        assert len(registry) == 0
