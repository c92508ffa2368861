from .GeneratorGateway import GenerationRequest, GenerationResponse, GeneratorGateway, build_gateway, request_key
from .GenerationCache import GenerationCache
from .Transports import HttpTransport, MockTransport

__all__ = [
    "GenerationRequest", "GenerationResponse", "GeneratorGateway", "build_gateway", "request_key",
    "GenerationCache", "HttpTransport", "MockTransport",
]
