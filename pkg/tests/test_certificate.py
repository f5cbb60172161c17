import pytest

from sortnetsize.certificate import (
    KIND_PH,
    KIND_REF,
    KIND_TRIV,
    RULE_HUFFMAN,
    RULE_PH,
    RULE_SUCC,
    RULE_TRIV,
    Certificate,
    CertificateParseError,
    CertificateRejected,
    CertStep,
    GenerationError,
    Premise,
    check_certificate,
    check_step,
    decode,
    encode,
    generate_certificate,
)
from sortnetsize.search import load_dump, min_size, write_dump
from sortnetsize.seqset import BoolSeqSet

from conftest import exhaustive_min_size


@pytest.fixture(scope="module")
def cert5(tmp_path_factory):
    value, table = min_size(5)
    d = tmp_path_factory.mktemp("dump5")
    write_dump(table, str(d), 5, value)
    manifest, parts = load_dump(str(d))
    return generate_certificate(manifest, parts)


def triv_step(width=3):
    return CertStep(RULE_TRIV, BoolSeqSet.full(width), 0)


def test_trivial_rules():
    assert check_certificate(Certificate(3, (triv_step(),))) == (3, 0)
    ph = CertStep(RULE_PH, BoolSeqSet.full(2), 1)
    assert check_certificate(Certificate(2, (ph,))) == (2, 1)


def test_triv_bound_must_be_zero():
    bad = CertStep(RULE_TRIV, BoolSeqSet.full(2), 1)
    with pytest.raises(CertificateRejected) as err:
        check_certificate(Certificate(2, (bad,)))
    assert err.value.code == "bad-bound"


def test_ph_strict_threshold():
    # width + 1 members is a threshold set and must NOT pass PH
    x = BoolSeqSet.of(3, [0b000, 0b100, 0b110, 0b111])
    with pytest.raises(CertificateRejected) as err:
        check_step(CertStep(RULE_PH, x, 1), 0, ())
    assert err.value.code == "bad-rule"
    ok = BoolSeqSet.of(3, [0, 4, 6, 7, 1])
    check_step(CertStep(RULE_PH, ok, 1), 0, ())


def test_succ_on_cube2_example():
    """B^2 has one non-redundant comparator; its image has 3 < 4 members so
    inline PH is rejected, while a Triv step reference certifies bound 1."""
    cube = BoolSeqSet.full(2)
    inline_ph = CertStep(RULE_SUCC, cube, 1, False, (Premise((0, 1), KIND_PH),))
    with pytest.raises(CertificateRejected) as err:
        check_certificate(Certificate(2, (inline_ph,)))
    assert err.value.code == "bad-rule"

    image = BoolSeqSet.of(2, [0, 2, 3])
    steps = (
        CertStep(RULE_TRIV, image, 0),
        CertStep(RULE_SUCC, cube, 1, False, (Premise((0, 1), KIND_REF, 0, False, (0, 1)),)),
    )
    assert check_certificate(Certificate(2, steps)) == (2, 1)


def test_succ_coverage_checks():
    cube = BoolSeqSet.full(2)
    with pytest.raises(CertificateRejected) as err:
        check_step(CertStep(RULE_SUCC, cube, 1), 0, ())
    assert err.value.code == "bad-coverage"
    dup = CertStep(
        RULE_SUCC, cube, 1, False, (Premise((0, 1), KIND_TRIV), Premise((0, 1), KIND_TRIV))
    )
    with pytest.raises(CertificateRejected) as err:
        check_step(dup, 0, ())
    assert err.value.code == "bad-coverage"
    # premise for a redundant comparator is rejected
    sorted2 = BoolSeqSet.of(2, [0, 2, 3])
    extra = CertStep(RULE_SUCC, sorted2, 1, False, (Premise((0, 1), KIND_TRIV),))
    with pytest.raises(CertificateRejected) as err:
        check_step(extra, 0, ())
    assert err.value.code == "bad-coverage"


def test_succ_bound_uses_min():
    cube = BoolSeqSet.full(2)
    steps = (
        CertStep(RULE_TRIV, BoolSeqSet.of(2, [0, 2, 3]), 0),
        CertStep(RULE_SUCC, cube, 2, False, (Premise((0, 1), KIND_REF, 0, False, (0, 1)),)),
    )
    with pytest.raises(CertificateRejected) as err:
        check_certificate(Certificate(2, steps))
    assert err.value.code == "bad-bound"


def test_huffman_exact_channel_coverage():
    cube = BoolSeqSet.full(3)
    # all three channels prunable; omitting one must fail
    premises = (Premise(0, KIND_PH), Premise(1, KIND_PH))
    step = CertStep(RULE_HUFFMAN, cube, 2, False, premises)
    with pytest.raises(CertificateRejected) as err:
        check_step(step, 0, ())
    assert err.value.code == "bad-channels"
    full = (Premise(0, KIND_PH), Premise(1, KIND_PH), Premise(2, KIND_PH))
    ok = CertStep(RULE_HUFFMAN, cube, 3, False, full)
    check_step(ok, 0, ())
    too_high = CertStep(RULE_HUFFMAN, cube, 4, False, full)
    with pytest.raises(CertificateRejected) as err:
        check_step(too_high, 0, ())
    assert err.value.code == "bad-bound"


def test_huffman_negation_polarity():
    # this set has no prunable channel, but its negation has all three
    x = BoolSeqSet(3, BoolSeqSet.full(3).bits & ~0b10110)
    good = CertStep(
        RULE_HUFFMAN,
        x,
        2,
        True,
        (Premise(0, KIND_TRIV), Premise(1, KIND_TRIV), Premise(2, KIND_TRIV)),
    )
    check_step(good, 0, ())  # huffman over {0,0,0} supports bound 2
    with pytest.raises(CertificateRejected) as err:
        check_step(CertStep(RULE_HUFFMAN, x, 2, False, ()), 0, ())
    assert err.value.code == "bad-channels"


def test_premise_subset_check():
    cube = BoolSeqSet.full(2)
    wrong = BoolSeqSet.of(2, [1, 2])  # not a subset of the comparator image
    steps = (
        CertStep(RULE_TRIV, wrong, 0),
        CertStep(RULE_SUCC, cube, 1, False, (Premise((0, 1), KIND_REF, 0, False, (0, 1)),)),
    )
    with pytest.raises(CertificateRejected) as err:
        check_certificate(Certificate(2, steps))
    assert err.value.code == "bad-subset"


def test_premise_forward_reference_rejected():
    cube = BoolSeqSet.full(2)
    step = CertStep(RULE_SUCC, cube, 1, False, (Premise((0, 1), KIND_REF, 5, False, (0, 1)),))
    with pytest.raises(CertificateRejected) as err:
        check_step(step, 0, (step,) * 6)
    assert err.value.code == "bad-ref"


def test_codec_roundtrip_small():
    image = BoolSeqSet.of(2, [0, 2, 3])
    cert = Certificate(
        2,
        (
            CertStep(RULE_TRIV, image, 0),
            CertStep(RULE_SUCC, BoolSeqSet.full(2), 1, False,
                     (Premise((0, 1), KIND_REF, 0, True, (1, 0)),)),
        ),
    )
    assert decode(encode(cert)) == cert


def test_codec_roundtrip_generated(cert5):
    raw = encode(cert5)
    assert decode(raw) == cert5
    # canonical encoding: re-encoding the decoded value is byte-identical
    assert encode(decode(raw)) == raw


def test_parse_errors(cert5):
    raw = bytearray(encode(cert5))
    with pytest.raises(CertificateParseError) as err:
        decode(b"")
    assert err.value.code == "bad-magic"
    with pytest.raises(CertificateParseError) as err:
        decode(b"XXXX" + bytes(raw[4:]))
    assert err.value.code == "bad-magic"
    bad_version = bytes(raw[:4]) + b"\x07" + bytes(raw[5:])
    with pytest.raises(CertificateParseError) as err:
        decode(bad_version)
    assert err.value.code == "bad-version"
    with pytest.raises(CertificateParseError) as err:
        decode(bytes(raw[:-3]))
    assert err.value.code == "truncated"
    with pytest.raises(CertificateParseError) as err:
        decode(bytes(raw) + b"\x00")
    assert err.value.code == "trailing-data"


def test_parse_rejects_non_bijective_permutation(cert5):
    raw = bytearray(encode(cert5))
    # find a StepRef premise permutation and duplicate one entry
    cert = cert5
    offset = 4 + 1 + 1 + 8
    target = None
    for step in cert.steps:
        width = step.subject.width
        offset += 1 + 1 + max(1, (1 << width) >> 3) + 4
        if step.rule == RULE_HUFFMAN:
            offset += 1
        offset += 4
        pwidth = width if step.rule == RULE_SUCC else width - 1
        for prem in step.premises:
            offset += 2 if step.rule == RULE_SUCC else 1
            offset += 1
            if prem.kind == KIND_REF:
                offset += 8 + 1
                if pwidth >= 2:
                    target = offset
                offset += pwidth
        if target:
            break
    assert target is not None
    raw[target] = raw[target + 1]
    with pytest.raises(CertificateParseError) as err:
        decode(bytes(raw))
    assert err.value.code == "non-bijective-permutation"


def test_generated_certificate_checks(cert5):
    assert check_certificate(cert5) == (5, 9)
    assert check_certificate(cert5, threads=2) == (5, 9)


def test_pipeline_completeness_small(tmp_path):
    """Generated certificates certify the exact known values for n = 2..6."""
    known = {2: 1, 3: 3, 4: 5, 5: 9, 6: 12}
    for n, want in known.items():
        value, table = min_size(n)
        d = tmp_path / f"d{n}"
        write_dump(table, str(d), n, value)
        manifest, parts = load_dump(str(d))
        cert = generate_certificate(manifest, parts)
        assert check_certificate(decode(encode(cert))) == (n, want)


def test_checker_never_canonicalizes(cert5, monkeypatch):
    import sortnetsize.canon as canon
    import sortnetsize.subsume as subsume

    def boom(*args, **kwargs):
        raise AssertionError("checker invoked canonicalization or subsumption")

    monkeypatch.setattr(canon, "_canonical_label_full", boom)
    monkeypatch.setattr(canon, "canonical_bits", boom)
    monkeypatch.setattr(canon, "canonicalize", boom)
    monkeypatch.setattr(subsume, "subsumes", boom)
    monkeypatch.setattr(subsume, "subsumption_witness", boom)
    monkeypatch.setattr(subsume, "_perm_subsumes", boom)
    assert check_certificate(decode(encode(cert5))) == (5, 9)


def test_generation_failure_on_corrupt_parts():
    manifest = {"n": 4, "s": 5}
    with pytest.raises(GenerationError):
        generate_certificate(manifest, {})


def test_degenerate_roots():
    cert = generate_certificate({"n": 1, "s": 0}, {})
    assert len(cert.steps) == 1 and cert.steps[0].rule == RULE_TRIV
    assert check_certificate(cert) == (1, 0)
    cert = generate_certificate({"n": 2, "s": 1}, {})
    assert len(cert.steps) == 1 and cert.steps[0].rule == RULE_PH
    assert check_certificate(cert) == (2, 1)


def test_width_mismatch_rejected_at_decode():
    cert = Certificate(3, (triv_step(2),))
    with pytest.raises(CertificateParseError) as err:
        decode(encode(cert))
    assert err.value.code == "width-mismatch"


def test_accepted_bounds_never_overstate_small(rng):
    """Soundness harness: random small certificates never certify more than
    the exhaustive minimum of their subject."""
    from sortnetsize.seqset import comparator_bits, exchange_bits, negate_bits

    oracle3 = exhaustive_min_size(3)
    oracle4 = exhaustive_min_size(4)
    accepted = 0
    for _ in range(800):
        width = rng.choice((3, 4))
        steps = []
        for index in range(rng.randint(1, 4)):
            bits = rng.getrandbits(1 << width) or 1
            subject = BoolSeqSet(width, bits)
            rule = rng.choice((RULE_TRIV, RULE_PH, RULE_SUCC, RULE_HUFFMAN))
            bound = rng.choice((0, 0, 1, 1, 1, 2, 2, 3, 4))
            negate = rule == RULE_HUFFMAN and rng.random() < 0.5
            premises = []
            if rule == RULE_SUCC:
                for i in range(width - 1):
                    for j in range(i + 1, width):
                        image = comparator_bits(width, bits, i, j)
                        redundant = image == bits or image == exchange_bits(width, bits, i, j)
                        # mostly premise exactly the non-redundant comparators,
                        # with occasional noise to exercise rejection paths
                        if (not redundant) == (rng.random() < 0.95):
                            premises.append(_random_premise(rng, (i, j), width, index))
            elif rule == RULE_HUFFMAN:
                zbits = negate_bits(width, bits) if negate else bits
                for p in range(width):
                    prunable = bool(zbits >> (1 << p) & 1)
                    if prunable == (rng.random() < 0.95):
                        premises.append(_random_premise(rng, p, width - 1, index))
            steps.append(CertStep(rule, subject, bound, negate, tuple(premises)))
        cert = Certificate(width, tuple(steps))
        try:
            got_width, got_bound = check_certificate(cert)
        except CertificateRejected:
            continue
        accepted += 1
        for step in cert.steps:  # every step must be individually true
            oracle = oracle3 if step.subject.width == 3 else oracle4
            if step.subject.width in (3, 4):
                assert step.bound <= oracle(step.subject.bits), (
                    step.subject.bits,
                    step.bound,
                )
    assert accepted > 30


def _random_premise(rng, disc, pwidth, index):
    kind = rng.choice((KIND_TRIV, KIND_PH, KIND_REF))
    if kind == KIND_REF and index > 0:
        perm = list(range(pwidth))
        rng.shuffle(perm)
        return Premise(disc, KIND_REF, rng.randrange(index), rng.random() < 0.5, tuple(perm))
    return Premise(disc, rng.choice((KIND_TRIV, KIND_PH)))
