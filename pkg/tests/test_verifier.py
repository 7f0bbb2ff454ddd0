import json

from elfe.provers import ProverConfig, default_configs
from elfe.verifier import (
    ASSUMED,
    GREEN,
    ORANGE,
    PARSE_ERROR,
    PARSED,
    PROVED,
    RED,
    REFUTED,
    UNKNOWN,
    VerifyOptions,
    status_color,
    verify_text,
)

from texts import DOUBLE_COMPLEMENT, INJECTIVITY_HINTED, LIB_DIR, RELATIONS_WRONG


def opts(**kw):
    base = dict(lib_path=(LIB_DIR,), timeout=30.0, max_workers=2)
    base.update(kw)
    return VerifyOptions(**base)


def test_verify_injectivity_hinted_all_green():
    report = verify_text(INJECTIVITY_HINTED, opts())
    assert report.verified
    statuses = {e.status for e in report.statements}
    assert statuses <= {ASSUMED, PROVED, PARSED}
    proved = [e for e in report.statements if e.status == PROVED]
    # three obligations plus the aggregating lemma header
    assert len([e for e in proved if e.tptp]) == 3
    for e in proved:
        if e.tptp:
            assert e.prover == "resolution"
            assert "fof(goal, conjecture" in e.tptp


def test_verify_empty_text():
    report = verify_text("", opts())
    assert report.verified and report.statements == []


def test_verify_parse_error_is_reported_not_raised():
    report = verify_text("Lemma broken", opts())
    assert not report.verified
    (entry,) = report.statements
    assert entry.status == PARSE_ERROR
    assert entry.message


def test_verify_refuted_carries_model():
    report = verify_text(RELATIONS_WRONG, opts(timeout=60.0))
    assert not report.verified
    leaves = [e for e in report.statements if e.tptp]
    refuted = [e for e in leaves if e.status == REFUTED]
    assert len(refuted) == 1
    assert "domain:" in refuted[0].model
    assert refuted[0].prover == "modelfinder"
    # failure isolation: every other obligation still got its own verdict
    assert all(e.status == PROVED for e in leaves if e is not refuted[0])
    # the lemma header aggregates to red
    header = next(e for e in report.statements if e.id == "lemma1")
    assert header.status == REFUTED


def test_report_spans_disjoint_and_ordered():
    report = verify_text(DOUBLE_COMPLEMENT, opts())
    assert report.verified
    spans = [e.span for e in report.statements if e.span is not None]
    for a, b in zip(spans, spans[1:]):
        assert (a.end_line, a.end_col) <= (b.start_line, b.start_col)


def test_every_obligation_leaf_appears_exactly_once():
    from elfe.kernel import collect_obligations, elaborate
    from elfe.lang import apply_let_bindings, parse_document

    doc = apply_let_bindings(parse_document(DOUBLE_COMPLEMENT, search_path=[LIB_DIR]))
    expected = {ob.statement_id for ob in collect_obligations(elaborate(doc))}
    report = verify_text(DOUBLE_COMPLEMENT, opts())
    seen = [e.id for e in report.statements if e.tptp]
    assert sorted(seen) == sorted(expected)


def test_emit_dir_writes_problems(tmp_path):
    emit = tmp_path / "problems"
    verify_text(INJECTIVITY_HINTED, opts(emit_dir=emit))
    files = sorted(p.name for p in emit.glob("*.p"))
    assert len(files) == 3
    text = (emit / files[0]).read_text(encoding="utf-8")
    assert "fof(" in text


def test_report_json_shape_is_stable():
    report = verify_text("Lemma: P implies P. Proof: Assume P. Hence P. qed.", opts())
    data = report.to_json()
    assert set(data) == {"verified", "statements", "elapsedMs"}
    leaf = next(e for e in data["statements"] if "tptp" in e)
    assert {"id", "status", "ms", "span"} <= set(leaf)
    assert {"startLine", "startCol", "endLine", "endCol"} == set(leaf["span"])
    json.dumps(data)  # serializable


def test_report_deterministic_for_fixed_verdicts():
    a = verify_text(INJECTIVITY_HINTED, opts()).to_json()
    b = verify_text(INJECTIVITY_HINTED, opts()).to_json()
    for x in (a, b):
        x.pop("elapsedMs")
        for e in x["statements"]:
            e.pop("ms")
    assert a == b


def test_status_color_mapping():
    assert status_color(ASSUMED) == GREEN
    assert status_color(PROVED) == GREEN
    assert status_color(PROVED, verbose=True) == ORANGE
    assert status_color(PARSED) == GREEN
    assert status_color(UNKNOWN) == RED
    assert status_color(REFUTED) == RED
    assert status_color(PARSE_ERROR) == RED
