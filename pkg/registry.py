"""In-process service registry keyed by (kind, name)."""
from __future__ import annotations

import threading
from typing import Callable

from errors import DuplicateService, ServiceNotFound
from log import get_logger

logger = get_logger("registry")


class ServiceRegistry:
    """Maps (kind, name) to a factory; every lookup builds a fresh instance."""

    def __init__(self):
        self._catalog: dict[tuple[str, str], Callable[[], object]] = {}
        self._lock = threading.Lock()

    def register(self, kind: str, name: str, factory: Callable[[], object], replace=False):
        key = (kind, name)
        with self._lock:
            if key in self._catalog and not replace:
                raise DuplicateService(kind, name)
            self._catalog[key] = factory
        logger.debug(f"registered {kind}:{name}")

    def get(self, kind: str, name: str):
        factory = self._catalog.get((kind, name))
        if factory is None:
            raise ServiceNotFound(kind, name)
        return factory()

    def has(self, kind: str, name: str) -> bool:
        return (kind, name) in self._catalog

    def names(self, kind: str) -> list[str]:
        return sorted(n for k, n in self._catalog if k == kind)

    def services(self) -> list[tuple[str, str]]:
        return sorted(self._catalog)

    def clear(self):
        with self._lock:
            self._catalog.clear()

    def __len__(self):
        return len(self._catalog)


services = ServiceRegistry()


def register_service(kind: str, name: str, factory, replace=False):
    services.register(kind, name, factory, replace=replace)


def get_service(kind: str, name: str):
    return services.get(kind, name)


def has_service(kind: str, name: str) -> bool:
    return services.has(kind, name)
