"""Lower-bound certificates: generate from a search dump, check, tamper.

Run:  python3 demos/04_certificate_pipeline.py
"""

import tempfile

from sortnetsize import (
    CertificateRejected,
    CertificateParseError,
    check_certificate,
    decode,
    encode,
    generate_certificate,
    min_size,
)
from sortnetsize.search import load_dump, write_dump

# The search's final bounds table doubles as proof material.  Certificate
# generation first discards sets subsumed by stronger ones, then derives the
# surviving bounds inside a four-rule system (Triv, PH, Succ, Huffman) whose
# checker needs nothing but subset tests, comparator images and pruning.
value, table = min_size(5)
with tempfile.TemporaryDirectory() as dump_dir:
    write_dump(table, dump_dir, 5, value)
    manifest, parts = load_dump(dump_dir)
    cert = generate_certificate(manifest, parts)

raw = encode(cert)
print(f"certificate for s(5) >= {value}: {len(cert.steps)} steps, {len(raw)} bytes")

n, k = check_certificate(decode(raw))
print(f"checker accepts and certifies: s({n}) >= {k}")

rules = [step.rule for step in cert.steps]
print("rule usage: Succ x%d, Huffman x%d" % (rules.count(2), rules.count(3)))

# Certificates are bit-exact: any meaningful corruption is caught either by
# the parser or by the rule checks.
corrupted = bytearray(raw)
corrupted[-6] ^= 0x01  # clobber one byte inside the final step
try:
    check_certificate(decode(bytes(corrupted)))
    print("tampered certificate slipped through?!")
except (CertificateRejected, CertificateParseError) as exc:
    print("tampered certificate rejected:", exc)
