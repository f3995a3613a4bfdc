from wmha.fileio import model_to_document, parse_document
from wmha.groupoids import convolution_algebra, function_algebra, preset
from wmha.pipeline import (StructureInput, verify_groupoid_model,
                           verify_lazy_model, verify_structure)
from wmha.report import FAIL, PASS, SKIP


def convolution_model():
    return convolution_algebra(preset("pair:2"))


def test_all_finite_presets_pass_both_paths():
    for name, kind in (("pair:2", "function"), ("pair:2", "convolution"),
                       ("group:cyclic:2", "convolution"),
                       ("bundle:cyclic:2:3", "function")):
        report, ctx = verify_groupoid_model(preset(name), kind, path="both")
        assert report.verdict == PASS, (name, kind, report.first_failure())
        assert report.status_of("oracle-witnesses") == PASS
        assert report.status_of("path-equivalence") == PASS
        assert report.status_of("duality-pairing") == PASS
        assert report.classification["wmha"] and report.classification["regular"]


def test_skip_semantics_on_broken_associativity():
    # corrupt one structure constant so associativity fails: downstream
    # checks must be skipped, not failed
    m = convolution_algebra(preset("pair:2"))
    doc = model_to_document(m, with_witnesses=False)
    doc["algebra"]["structure"][0][3] = "2"
    parsed = parse_document(doc)
    report, ctx = verify_structure(parsed.structure, path="def114")
    assert report.verdict == FAIL
    statuses = {r.check_id: r.status for r in report.checks}
    assert statuses["algebra-associative"] == FAIL or statuses["algebra-nondegenerate"] == FAIL
    assert statuses["counit-exists"] == SKIP
    assert statuses["idempotent-exists"] == SKIP


def test_first_failure_is_named_for_bad_t1():
    m = function_algebra(preset("pair:2"))
    doc = model_to_document(m, with_witnesses=False)
    doc["coproduct"]["T1"][0][2] = "5/3"
    parsed = parse_document(doc)
    report, ctx = verify_structure(parsed.structure, path="def114")
    assert report.verdict == FAIL
    first = report.first_failure()
    assert first is not None and first.check_id.startswith("coproduct")


def test_op_round_trip_runs_once():
    report, ctx = verify_groupoid_model(preset("pair:2"), "convolution", path="def114")
    assert report.status_of("regular-op-antipode") == PASS
    assert report.status_of("appendix-op-roundtrip") == PASS


def test_thm29_path_uses_input_candidates():
    m = convolution_algebra(preset("pair:2"))
    doc = model_to_document(m, with_witnesses=True)
    parsed = parse_document(doc)
    report, ctx = verify_structure(parsed.structure, path="thm29")
    assert report.verdict == PASS
    assert report.status_of("thm29-identities") == PASS
    assert report.status_of("counit-matches-input") == PASS
    # the axiom-path checks were not run at all on this path
    assert report.status_of("projections-solve") is None


def test_lazy_windows_pass_and_certify():
    report = verify_lazy_model(preset("pair:inf"), "function", k_max=3, seed=11)
    assert report.verdict == PASS
    for cid in ("window-consistency", "global-nonunital", "sampled-local-units"):
        assert report.status_of(cid) == PASS
    assert report.seed == 11


def test_lazy_zero_windows_pass_vacuously():
    report = verify_lazy_model(preset("pair:inf"), "function", k_max=0, seed=1)
    assert report.verdict == PASS


def test_classification_shape():
    report, ctx = verify_groupoid_model(preset("group:cyclic:3"), "convolution",
                                        path="both")
    cls = report.classification
    assert cls["hopf"] and cls["weak_hopf"] and cls["unital"] and cls["star"]


def test_swapped_flip_maps_fail_late_consistency():
    m = convolution_model()
    inp = StructureInput(m.algebra, m.t1, m.t2, m.t4, m.t3)  # T3/T4 swapped
    report, ctx = verify_structure(inp, path="def114")
    assert report.verdict == FAIL
    assert report.status_of("coproduct-regular-maps") == FAIL


def test_wrong_idempotent_candidate_fails_antipode_path():
    from wmha.linalg import Matrix

    m = convolution_model()
    ident = Matrix.identity(16)
    inp = StructureInput(m.algebra, m.t1, m.t2, antipode=m.oracle_s,
                         e_pair=(ident, ident))
    report, ctx = verify_structure(inp, path="thm29")
    assert report.verdict == FAIL
    assert report.status_of("thm29-e-ranges") == FAIL


def test_supplied_counit_mismatch_is_reported():
    from wmha.scalars import ONE, ZERO

    m = convolution_model()
    inp = StructureInput(m.algebra, m.t1, m.t2,
                         counit=[ONE, ONE, ONE, ZERO])
    report, ctx = verify_structure(inp, path="def114")
    assert report.status_of("counit-matches-input") == FAIL


def test_window_inconsistency_is_detected():
    from wmha.groupoids import LazyGroupoid, cyclic_bundle, pair_groupoid

    # windows that are valid groupoids but not nested
    broken = LazyGroupoid("broken", lambda k: pair_groupoid(k) if k != 2
                          else cyclic_bundle(2, 2))
    report = verify_lazy_model(broken, "convolution", k_max=3, seed=0)
    assert report.status_of("window-consistency") == FAIL


def test_report_json_is_deterministic():
    r1, _ = verify_groupoid_model(preset("pair:2"), "function", path="both")
    r2, _ = verify_groupoid_model(preset("pair:2"), "function", path="both")
    assert r1.to_json() == r2.to_json()


def test_conjugated_presentation_verifies_with_dense_constants():
    # change basis by an invertible rational matrix: the conjugated
    # presentation has dense structure constants but must verify, with
    # every witness the conjugate of the original one
    report, ctx, p, q, m = _conjugated_run("pair:2", complex_entries=False)
    from wmha.linalg import invert
    assert report.verdict == PASS, report.first_failure()
    assert ctx.antipode.s_matrix == invert(p) * m.oracle_s * p
    assert ctx.e.left == invert(q) * m.oracle_e_left * q


def test_complex_conjugated_presentation_verifies():
    # a change of basis with imaginary parts drives Gaussian-rational
    # arithmetic through every solver
    report, ctx, p, q, m = _conjugated_run("group:cyclic:3", complex_entries=True)
    from wmha.linalg import invert
    assert report.verdict == PASS, report.first_failure()
    assert ctx.antipode.s_matrix == invert(p) * m.oracle_s * p


def _conjugated_run(name, complex_entries):
    import random

    from wmha.algebras import Algebra
    from wmha.linalg import Matrix, invert
    from wmha.scalars import Scalar, ZERO, rational

    m = convolution_algebra(preset(name))
    n = m.algebra.dim
    rng = random.Random(3)
    p = None
    while p is None or invert(p) is None:
        def entry():
            re = rational(rng.randint(-2, 2), rng.choice([1, 2])).re
            im = rational(rng.randint(-1, 1)).re \
                if complex_entries and rng.random() < 0.4 else rational(0).re
            return Scalar(re, im)
        p = Matrix.from_rows([[entry() for _ in range(n)] for _ in range(n)])
    pinv = invert(p)
    entries = []
    for i in range(n):
        for j in range(n):
            prod = m.algebra.mul_sparse(
                {k: v for k, v in enumerate(p.col(i)) if v},
                {k: v for k, v in enumerate(p.col(j)) if v})
            vec = pinv.apply([prod.get(k, ZERO) for k in range(n)])
            for k, v in enumerate(vec):
                if v:
                    entries.append((i, j, k, v))
    conj = Algebra.from_structure(n, None, entries)
    if complex_entries:
        assert any(v.im for _, _, _, v in conj.structure_entries()), \
            "conjugation should produce genuinely complex structure constants"
    q = p.kron(p)
    qinv = invert(q)
    inp = StructureInput(conj, qinv * m.t1 * q, qinv * m.t2 * q,
                         qinv * m.t3 * q, qinv * m.t4 * q)
    report, ctx = verify_structure(inp, path="def114")
    return report, ctx, p, q, m