from .ExtractionRecord import Entity, Relation, Event, ExtractionRecord, record_from_json
from .OutputParser import ReasoningOutput, canonicalize, parse_completion, parse_model_output, split_reasoning

__all__ = ["Entity", "Relation", "Event", "ExtractionRecord", "record_from_json", "ReasoningOutput", "canonicalize",
           "parse_completion", "parse_model_output", "split_reasoning"]
