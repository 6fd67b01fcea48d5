"""
Detector adapter construction

Builds adapters from the ``detectors`` section of the experiment config and
owns them until closed.
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional

from bulbpatch.config.models import DetectorRole, DetectorSpec, ExperimentConfig
from bulbpatch.core.detect import DetectorAdapter, ToyTemplateDetector
from bulbpatch.integrations.external_detector import ExternalDetector
from bulbpatch.integrations.transports import HttpTransport, SubprocessTransport, TcpTransport, Transport
from bulbpatch.utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

AdapterFactory = Callable[[DetectorSpec], DetectorAdapter]


def transport_factory(spec: DetectorSpec) -> Callable[[], Transport]:
    if spec.transport == "subprocess":
        if not spec.command:
            raise ConfigurationError(f"detector '{spec.name}': subprocess transport needs a command")
        return lambda: SubprocessTransport(spec.command)
    if spec.transport == "tcp":
        return lambda: TcpTransport(spec.host, spec.port, timeout=spec.timeout)
    return lambda: HttpTransport(spec.url, timeout=spec.timeout)


def build_adapter(spec: DetectorSpec) -> DetectorAdapter:
    if spec.kind == "toy":
        return ToyTemplateDetector(spec.toy, name=spec.name)
    return ExternalDetector(spec.name, transport_factory(spec), pool_size=spec.pool_size, threshold=spec.threshold)


class DetectorRegistry:
    """Lazily built adapters keyed by name; close() releases external connections."""

    def __init__(self, config: ExperimentConfig, factory: Optional[AdapterFactory] = None):
        self.config = config
        self._factory = factory or build_adapter
        self._adapters: Dict[str, DetectorAdapter] = {}

    def get(self, name: str) -> DetectorAdapter:
        if name not in self._adapters:
            spec = self.config.detector_spec(name)
            if spec is None:
                raise ConfigurationError(f"unknown detector '{name}'")
            self._adapters[name] = self._factory(spec)
            logger.info(f"Built detector adapter {self._adapters[name]!r}")
        return self._adapters[name]

    def many(self, names: Iterable[str]) -> List[DetectorAdapter]:
        return [self.get(name) for name in names]

    def for_role(self, role: DetectorRole) -> List[DetectorAdapter]:
        specs = self.config.detectors_for(role)
        if not specs:
            raise ConfigurationError(f"no detector has the '{role}' role")
        return self.many(spec.name for spec in specs)

    def close(self) -> None:
        for adapter in self._adapters.values():
            adapter.close()
        self._adapters.clear()

    def __enter__(self) -> "DetectorRegistry":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
