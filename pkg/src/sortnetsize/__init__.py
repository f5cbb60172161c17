"""Minimal-size sorting network search with verifiable lower-bound certificates."""

from .canon import CanonicalForm, canonicalize, find_similarity_witness
from .certificate import (
    Certificate,
    CertificateParseError,
    CertificateRejected,
    CertStep,
    Premise,
    check_certificate,
    decode,
    encode,
    generate_certificate,
)
from .huffman import huffman_min, huffman_min_bruteforce
from .network import (
    ComparatorNetwork,
    apply_network,
    batcher_network,
    is_sorting_network,
    prune_network,
    standardize,
)
from .search import (
    BoundsTable,
    memo_min_size,
    min_size,
    minimal_size,
    van_voorhis_chain,
)
from .seqset import (
    BoolSeqSet,
    Comparator,
    apply_comparator,
    interior,
    is_trivially_sortable,
    prunable_channels,
    prune,
    pruned_interior,
    successors,
    transform,
    weight,
)
from .subsume import filter_nonsubsumed, subsumes, subsumption_witness

__all__ = [name for name in dir() if not name.startswith("_")]
