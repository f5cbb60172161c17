"""Four-rule lower-bound certificates: model, codec, checker, generator.

A certificate is a topologically ordered list of derivation steps, each
deriving s(subject) >= bound by one of four rules:

* Triv: any set needs at least 0 comparators.
* PH: a set with more members than sorted sequences exist needs at least 1.
* Succ: every non-redundant comparator image is covered by a premise whose
  set embeds into it under a recorded permutation/negation; the bound is one
  more than the smallest premise bound.
* Huffman: the premises cover exactly the prunable channels of the subject
  (or its recorded negation), each premise set embedding into the full
  pruned set; the bound is the Huffman merge of the premise bounds.

Premises either reference an earlier step or inline the Triv/PH rule on the
largest admissible set.  Checking a step needs only set equality, subset
tests, comparator images, pruning and the Huffman merge; neither
canonicalization nor subsumption is ever invoked by the checker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .huffman import huffman_min
from .seqset import (
    BoolSeqSet,
    bitmap_byte_length,
    comparator_bits,
    exchange_bits,
    negate_bits,
    permute_bits,
    prune_bits,
)

MAGIC = b"SNB1"
VERSION = 1

RULE_TRIV = 0
RULE_PH = 1
RULE_SUCC = 2
RULE_HUFFMAN = 3

KIND_TRIV = 0
KIND_PH = 1
KIND_REF = 2

_RULE_NAMES = {RULE_TRIV: "Triv", RULE_PH: "PH", RULE_SUCC: "Succ", RULE_HUFFMAN: "Huffman"}


class CertificateParseError(ValueError):
    """Malformed certificate bytes; .code holds the distinct error class."""

    def __init__(self, code, detail=""):
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


class CertificateRejected(ValueError):
    """A step failed verification; .code and .step identify the failure."""

    def __init__(self, code, step, detail=""):
        self.code = code
        self.step = step
        msg = f"step {step}: {code}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


class GenerationError(RuntimeError):
    """The bounds dump cannot support a derivation (corrupt or inconsistent)."""


@dataclass(frozen=True)
class Premise:
    """One premise of a Succ or Huffman step.

    ``discriminator`` names what the premise covers: the comparator (i, j)
    for a Succ parent, the pruned channel for a Huffman parent.  StepRef
    premises carry the index of the referenced step plus the transform
    embedding the referenced subject into the covered set.
    """

    discriminator: tuple | int
    kind: int
    step: int = 0
    negate: bool = False
    perm: tuple = ()


@dataclass(frozen=True)
class CertStep:
    rule: int
    subject: BoolSeqSet
    bound: int
    negate: bool = False  # Huffman only: which polarity is pruned
    premises: tuple = ()


@dataclass(frozen=True)
class Certificate:
    channels: int
    steps: tuple

    def __len__(self):
        return len(self.steps)


# ---------------------------------------------------------------------------
# Codec


def encode(cert: Certificate) -> bytes:
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(cert.channels)
    out += len(cert.steps).to_bytes(8, "little")
    for step in cert.steps:
        width = step.subject.width
        out.append(step.rule)
        out.append(width)
        out += step.subject.to_bytes()
        out += step.bound.to_bytes(4, "little")
        if step.rule == RULE_HUFFMAN:
            out.append(1 if step.negate else 0)
        out += len(step.premises).to_bytes(4, "little")
        pwidth = width if step.rule == RULE_SUCC else width - 1
        for prem in step.premises:
            if step.rule == RULE_SUCC:
                out.append(prem.discriminator[0])
                out.append(prem.discriminator[1])
            else:
                out.append(prem.discriminator)
            out.append(prem.kind)
            if prem.kind == KIND_REF:
                out += prem.step.to_bytes(8, "little")
                out.append(1 if prem.negate else 0)
                out += bytes(prem.perm)
                assert len(prem.perm) == pwidth
    return bytes(out)


class _Reader:
    def __init__(self, raw):
        self.raw = raw
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.raw):
            raise CertificateParseError("truncated", f"needed {n} bytes at offset {self.pos}")
        chunk = self.raw[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def byte(self):
        return self.take(1)[0]

    def uint(self, n):
        return int.from_bytes(self.take(n), "little")


def decode(raw: bytes) -> Certificate:
    if raw[: len(MAGIC)] != MAGIC:
        raise CertificateParseError("bad-magic")
    reader = _Reader(raw)
    reader.take(len(MAGIC))
    if reader.byte() != VERSION:
        raise CertificateParseError("bad-version")
    channels = reader.byte()
    if not 1 <= channels <= 16:
        raise CertificateParseError("out-of-range", f"channel count {channels}")
    count = reader.uint(8)
    if count == 0:
        raise CertificateParseError("truncated", "certificate has no steps")
    steps = []
    for index in range(count):
        rule = reader.byte()
        if rule not in _RULE_NAMES:
            raise CertificateParseError("out-of-range", f"rule byte {rule} in step {index}")
        width = reader.byte()
        if not 1 <= width <= 16:
            raise CertificateParseError("out-of-range", f"width {width} in step {index}")
        bitmap = reader.take(bitmap_byte_length(width))
        bits = int.from_bytes(bitmap, "little")
        if bits >> (1 << width):
            raise CertificateParseError("out-of-range", f"bitmap bits beyond width in step {index}")
        bound = reader.uint(4)
        negate = False
        if rule == RULE_HUFFMAN:
            flag = reader.byte()
            if flag > 1:
                raise CertificateParseError("out-of-range", f"negation byte {flag}")
            negate = bool(flag)
        nprem = reader.uint(4)
        premises = []
        pwidth = width if rule == RULE_SUCC else width - 1
        for _ in range(nprem):
            if rule == RULE_SUCC:
                i = reader.byte()
                j = reader.byte()
                if i >= width or j >= width:
                    raise CertificateParseError("out-of-range", f"comparator ({i},{j})")
                disc = (i, j)
            else:
                disc = reader.byte()
                if disc >= width:
                    raise CertificateParseError("out-of-range", f"channel {disc}")
            kind = reader.byte()
            if kind not in (KIND_TRIV, KIND_PH, KIND_REF):
                raise CertificateParseError("out-of-range", f"premise kind {kind}")
            if kind == KIND_REF:
                ref = reader.uint(8)
                if ref >= index:
                    raise CertificateParseError(
                        "out-of-range", f"step {index} references step {ref}"
                    )
                flag = reader.byte()
                if flag > 1:
                    raise CertificateParseError("out-of-range", f"negation byte {flag}")
                if pwidth < 1:
                    raise CertificateParseError("out-of-range", "premise below width 1")
                perm = tuple(reader.take(pwidth))
                if sorted(perm) != list(range(pwidth)):
                    raise CertificateParseError(
                        "non-bijective-permutation", f"{perm} in step {index}"
                    )
                premises.append(Premise(disc, kind, ref, bool(flag), perm))
            else:
                premises.append(Premise(disc, kind))
        steps.append(
            CertStep(rule, BoolSeqSet(width, bits), bound, negate, tuple(premises))
        )
    if reader.pos != len(raw):
        raise CertificateParseError("trailing-data", f"{len(raw) - reader.pos} bytes")
    if steps[-1].subject.width != channels:
        raise CertificateParseError(
            "width-mismatch",
            f"final step width {steps[-1].subject.width}, declared {channels}",
        )
    return Certificate(channels, tuple(steps))


# ---------------------------------------------------------------------------
# Checker


def _check_premise(prem, index, zwidth, zbits, steps):
    """Verified bound contributed by one premise covering the set zbits."""
    if prem.kind == KIND_TRIV:
        return 0
    if prem.kind == KIND_PH:
        if zbits.bit_count() < zwidth + 2:
            raise CertificateRejected(
                "bad-rule", index, f"inline PH on {zbits.bit_count()} members at width {zwidth}"
            )
        return 1
    if prem.step >= index:
        raise CertificateRejected("bad-ref", index, "forward reference")
    ref = steps[prem.step]
    if ref.subject.width != zwidth:
        raise CertificateRejected(
            "bad-ref", index, f"referenced width {ref.subject.width}, expected {zwidth}"
        )
    target = permute_bits(zwidth, zbits, prem.perm)
    if prem.negate:
        target = negate_bits(zwidth, target)
    if ref.subject.bits & ~target:
        raise CertificateRejected("bad-subset", index, f"premise {prem.discriminator}")
    return ref.bound


def check_step(step: CertStep, index: int, steps) -> None:
    """Verify one step against the already-verified prefix; raise on failure."""
    width = step.subject.width
    bits = step.subject.bits
    if step.rule == RULE_TRIV:
        if step.premises:
            raise CertificateRejected("bad-coverage", index, "Triv takes no premises")
        if step.bound != 0:
            raise CertificateRejected("bad-bound", index, "Triv derives exactly 0")
        return
    if step.rule == RULE_PH:
        if step.premises:
            raise CertificateRejected("bad-coverage", index, "PH takes no premises")
        if bits.bit_count() < width + 2:
            raise CertificateRejected(
                "bad-rule", index, f"PH needs at least {width + 2} members"
            )
        if step.bound != 1:
            raise CertificateRejected("bad-bound", index, "PH derives exactly 1")
        return
    if step.rule == RULE_SUCC:
        if not step.premises:
            raise CertificateRejected("bad-coverage", index, "Succ needs premises")
        by_disc = {}
        for prem in step.premises:
            if prem.discriminator in by_disc:
                raise CertificateRejected(
                    "bad-coverage", index, f"duplicate comparator {prem.discriminator}"
                )
            by_disc[prem.discriminator] = prem
        bounds = []
        for i in range(width - 1):
            for j in range(i + 1, width):
                image = comparator_bits(width, bits, i, j)
                if image == bits or image == exchange_bits(width, bits, i, j):
                    continue  # redundant comparator: permutation-similar image
                prem = by_disc.pop((i, j), None)
                if prem is None:
                    raise CertificateRejected(
                        "bad-coverage", index, f"no premise for comparator ({i},{j})"
                    )
                bounds.append(_check_premise(prem, index, width, image, steps))
        if by_disc:
            raise CertificateRejected(
                "bad-coverage", index, f"premise for redundant comparator {next(iter(by_disc))}"
            )
        if not bounds:
            raise CertificateRejected("bad-coverage", index, "no non-redundant comparators")
        if step.bound > 1 + min(bounds):
            raise CertificateRejected(
                "bad-bound", index, f"{step.bound} > 1 + min{tuple(bounds)}"
            )
        return
    if step.rule == RULE_HUFFMAN:
        if width < 2:
            raise CertificateRejected("bad-rule", index, "Huffman needs width >= 2")
        zbits = negate_bits(width, bits) if step.negate else bits
        prunable = [i for i in range(width) if zbits >> (1 << i) & 1]
        if not prunable:
            raise CertificateRejected("bad-channels", index, "no prunable channels")
        discs = [prem.discriminator for prem in step.premises]
        if sorted(discs) != prunable or len(set(discs)) != len(discs):
            raise CertificateRejected(
                "bad-channels", index, f"premises {discs} != prunable {prunable}"
            )
        bounds = []
        for prem in step.premises:
            pruned = prune_bits(width, zbits, prem.discriminator)
            bounds.append(_check_premise(prem, index, width - 1, pruned, steps))
        if step.bound > huffman_min(bounds):
            raise CertificateRejected(
                "bad-bound", index, f"{step.bound} > huffman{tuple(bounds)}"
            )
        return
    raise CertificateRejected("bad-rule", index, f"unknown rule {step.rule}")


def check_certificate(cert: Certificate, threads: int = 1):
    """Verify every step; (final width, final bound) on acceptance.

    Premise references point strictly backwards, so once the step list is
    materialized each step verifies independently; with threads > 1 the
    steps are checked in parallel and the earliest failure is reported.
    """
    steps = cert.steps
    if not steps:
        raise CertificateParseError("truncated", "certificate has no steps")
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        def run(args):
            index, step = args
            try:
                check_step(step, index, steps)
                return None
            except CertificateRejected as exc:
                return exc

        with ThreadPoolExecutor(max_workers=threads) as pool:
            failures = [exc for exc in pool.map(run, enumerate(steps)) if exc is not None]
        if failures:
            raise min(failures, key=lambda exc: exc.step)
    else:
        for index, step in enumerate(steps):
            check_step(step, index, steps)
    final = steps[-1]
    return final.subject.width, final.bound


# ---------------------------------------------------------------------------
# Generation from a bounds dump


def _invert(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


class _Generator:
    def __init__(self, parts, threads=1):
        from .subsume import RedirectIndex, filter_nonsubsumed

        self.filtered = {}
        for (width, bound), masks in sorted(parts.items()):
            kept = filter_nonsubsumed(masks, width=width, threads=threads)
            if kept:
                self.filtered[(width, bound)] = kept
        self.redirect = RedirectIndex(self.filtered).redirect
        self.steps = []
        self.emitted = {}

    def filtered_count(self):
        return sum(len(v) for v in self.filtered.values())

    def premise_target(self, width, bits):
        """(level, hit) for a raw set: best derivable bound and how.

        hit is None for the inline rules (level 0 or 1) and the redirect
        result for step references.
        """
        size = bits.bit_count()
        hit = self.redirect(width, bits)
        if hit is not None and hit[1] >= 2:
            return hit[1], hit
        if size <= width + 1:
            return 0, None
        return 1, None

    def _plan(self, width, bits, bound):
        """Rule choice plus resolved premise targets for one stored set."""
        from .seqset import successor_bits

        for negate in (False, True):
            zbits = negate_bits(width, bits) if negate else bits
            channels = [i for i in range(width) if zbits >> (1 << i) & 1]
            if not channels:
                continue
            targets = [
                (p, self.premise_target(width - 1, prune_bits(width, zbits, p)))
                for p in channels
            ]
            if bound <= huffman_min([level for _, (level, _) in targets]):
                return RULE_HUFFMAN, negate, targets
        targets = [
            ((i, j), self.premise_target(width, ybits))
            for (i, j), ybits in successor_bits(width, bits)
        ]
        if not targets or bound > 1 + min(level for _, (level, _) in targets):
            raise GenerationError(
                f"cannot derive bound {bound} for a width-{width} set; dump inconsistent"
            )
        return RULE_SUCC, False, targets

    def emit(self, width, bits, bound):
        """Emit the step deriving s(set) >= bound, depth-first, iteratively."""
        stack = [(width, bits, bound, None)]
        while stack:
            w, b, k, plan = stack.pop()
            if (w, b) in self.emitted:
                continue
            if plan is None:
                plan = self._plan(w, b, k)
                stack.append((w, b, k, plan))
                _, _, targets = plan
                for _, (level, hit) in targets:
                    if hit is not None:
                        child_bits, child_bound = hit[0], hit[1]
                        cw = w if plan[0] == RULE_SUCC else w - 1
                        if (cw, child_bits) not in self.emitted:
                            stack.append((cw, child_bits, child_bound, None))
                continue
            rule, negate, targets = plan
            premises = []
            pwidth = w if rule == RULE_SUCC else w - 1
            for disc, (level, hit) in targets:
                if hit is not None:
                    child_bits, _, perm, neg = hit
                    index = self.emitted[(pwidth, child_bits)]
                    premises.append(Premise(disc, KIND_REF, index, neg, _invert(perm)))
                elif level == 1:
                    premises.append(Premise(disc, KIND_PH))
                else:
                    premises.append(Premise(disc, KIND_TRIV))
            self.steps.append(
                CertStep(rule, BoolSeqSet(w, b), k, negate, tuple(premises))
            )
            self.emitted[(w, b)] = len(self.steps) - 1


def generate_certificate(manifest, parts, threads: int = 1) -> Certificate:
    """Certificate deriving s(n) >= manifest['s'] from a bounds dump.

    Parts are first filtered to their non-subsumed antichains; premises are
    then redirected so only surviving sets appear as step subjects.
    """
    n = manifest["n"]
    s_value = manifest["s"]
    full = BoolSeqSet.full(n)
    if s_value <= 1:
        if s_value == 0:
            step = CertStep(RULE_TRIV, full, 0)
        else:
            step = CertStep(RULE_PH, full, 1)
        return Certificate(n, (step,))
    gen = _Generator(parts, threads=threads)
    hit = gen.redirect(n, full.bits)
    if hit is None or hit[1] != s_value:
        found = None if hit is None else hit[1]
        raise GenerationError(
            f"dump cannot certify s({n}) = {s_value}; best redirect bound {found}"
        )
    root_bits, root_bound = hit[0], hit[1]
    gen.emit(n, root_bits, root_bound)
    root_index = gen.emitted[(n, root_bits)]
    steps = gen.steps
    if root_index != len(steps) - 1:
        steps = steps[: root_index + 1]  # root emitted last by construction
    return Certificate(n, tuple(steps))


def write_certificate(cert: Certificate, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(cert))


def read_certificate(path: str) -> Certificate:
    with open(path, "rb") as fh:
        return decode(fh.read())
