from .fault_dictionary import (
    FaultDictionary,
    FaultDictionarySet,
    FaultSignature,
    SignatureSource,
    build_dictionaries,
    build_signatures,
    column_selection,
    load_dictionaries,
    save_dictionaries,
    signature_rank_law,
)

__all__ = [
    "FaultDictionary",
    "FaultDictionarySet",
    "FaultSignature",
    "SignatureSource",
    "build_dictionaries",
    "build_signatures",
    "column_selection",
    "load_dictionaries",
    "save_dictionaries",
    "signature_rank_law",
]
