from .UnifiedSchema import (
    TaskKind,
    Subtask,
    SchemaClass,
    UnifiedSchema,
    ValidationReport,
    compile_schema,
    serialize_schema,
    parse_schema,
    schema_from_json,
    load_schemas,
    schema_stats,
    validate_output,
)

__all__ = [
    "TaskKind", "Subtask", "SchemaClass", "UnifiedSchema", "ValidationReport",
    "compile_schema", "serialize_schema", "parse_schema", "schema_from_json",
    "load_schemas", "schema_stats", "validate_output",
]
