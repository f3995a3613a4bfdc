"""Verification reports: a fixed registry of named checks, each tied to
one anchor (the statement label it certifies), with pass/fail/skip
status, witnesses and counterexamples.

Reports are deterministic: same input and seed give byte-identical
JSON.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

TOOL_VERSION = "wmha 0.1.0"
REPORT_SCHEMA = 1

# (check id, anchor, one-line description).  Anchors are the statement
# labels of the underlying theory; every id maps to exactly one anchor.
REGISTRY = [
    ("groupoid-axioms", "conv-0", "groupoid source/target/compose/inverse axioms"),
    ("algebra-associative", "def-0-assoc", "structure tensor is associative"),
    ("algebra-nondegenerate", "def-0-nondeg", "product is non-degenerate as a bilinear form"),
    ("algebra-idempotent", "def-0-idem", "products span the whole algebra (A^2 = A)"),
    ("star-structure", "def-1.1-star", "star is involutive and anti-multiplicative"),
    ("coproduct-module-laws", "not-1.2", "canonical maps respect one-sided multiplication"),
    ("coproduct-mixed-law", "not-1.2-mixed", "T1/T2 agree on two-sided products"),
    ("coproduct-homomorphism", "def-1.1-i", "the coproduct reconstructed from T1/T2 is multiplicative"),
    ("coproduct-coassociative", "def-1.1-ii", "coassociativity as a commutation of canonical maps"),
    ("coproduct-regular-maps", "def-1.1-reg", "supplied flipped-side maps are consistent with T1/T2"),
    ("coproduct-full", "def-1.4", "legs of the coproduct span the algebra"),
    ("counit-exists", "def-1.3", "counit solves both defining identities, uniquely"),
    ("counit-matches-input", "def-1.3-input", "supplied counit equals the solved one"),
    ("idempotent-exists", "asm-1.5", "canonical idempotent with the prescribed range actions"),
    ("idempotent-valid", "prop-1.6", "canonical idempotent is an idempotent multiplier fixing the coproduct"),
    ("idempotent-from-flips", "prop-4.2-e", "idempotent recomputed from flipped-side maps agrees"),
    ("e-coassociativity", "prop-1.9", "extended coproduct legs of E agree and are dominated"),
    ("e-legs-commute", "asm-1.10-comm", "E (x) 1 and 1 (x) E commute"),
    ("e-product-formula", "asm-1.10", "coproduct of E equals the product of its two leg liftings"),
    ("projections-solve", "prop-1.11", "projection maps G1/G2 solved from their defining equalities"),
    ("projections-crosscheck", "prop-1.11-proof", "G1/G2 agree with the counit-contraction construction"),
    ("projections-idempotent", "prop-1.13", "G1/G2 are idempotent and 1-G lands in the kernels"),
    ("projections-factor", "rem-1.12", "G maps factor through two-sided idempotent multipliers"),
    ("kernels-match", "def-1.14-iii", "kernels of canonical maps equal ranges of 1-G"),
    ("generalized-inverses", "prop-2.3", "R1/R2 satisfy TR = E-action, RT = G, and module laws"),
    ("r-commutation", "prop-2.3-comm", "generalized inverses commute with the opposite canonical map"),
    ("antipode-defined", "prop-2.4", "one-sided antipodes extracted by counit contraction"),
    ("antipodes-agree", "prop-2.7", "left and right antipodes give one multiplier-valued map"),
    ("antipode-remark-equalities", "rem-2.8-ii", "contracted one-sided antipode sums agree"),
    ("antipode-counit-identities", "prop-2.6", "both counit-style antipode identities hold"),
    ("antipode-antimultiplicative", "prop-3.5", "S(ab) = S(b)S(a)"),
    ("antipode-spans", "prop-3.6", "A S(A) and S(A) A span the algebra"),
    ("antipode-anticoproduct", "prop-3.7", "coproduct of S(a) equals E-damped flipped (S x S) coproduct"),
    ("source-target-defined", "def-3.1", "source and target maps computed as multipliers"),
    ("source-target-legs", "lem-3.2", "images of source/target maps equal the legs of E"),
    ("source-target-coproduct", "lem-3.3", "coproducts of source/target values absorb into E"),
    ("source-target-commute", "lem-3.4", "source and target images are commuting subalgebras"),
    ("source-target-inclusions", "prop-3.9", "multiplying by source/target images stays in principal ideals"),
    ("thm29-r-ranges", "thm-2.9-i", "candidate antipode gives R maps with range in A (x) A"),
    ("thm29-identities", "thm-2.9-eq-2.5", "candidate antipode satisfies both counit-style identities"),
    ("thm29-e-ranges", "thm-2.9-eq-2.6", "T R equals the candidate idempotent actions"),
    ("thm29-e-conditions", "thm-2.9-eq-2.7", "candidate idempotent satisfies the leg conditions"),
    ("path-equivalence", "thm-2.9", "axiom path and antipode path agree on E and S"),
    ("oracle-witnesses", "ex-1.15-1.16", "computed witnesses equal the groupoid model oracles"),
    ("duality-pairing", "ex-1.16-dual", "the two groupoid models pair as dual structures"),
    ("regular", "thm-4.10", "antipode maps the algebra bijectively onto itself"),
    ("regular-flip-ranges", "prop-4.2", "flipped-side canonical maps have the E-prescribed ranges"),
    ("regular-op-antipode", "prop-4.3", "antipode of the opposite presentation inverts S"),
    ("regular-ss-flip", "prop-4.4", "(S x S) applied to E equals flipped E"),
    ("regular-f-factorization", "prop-4.5", "G maps factor through F idempotents"),
    ("regular-f-relations", "prop-4.6", "the four leg-13 relations for F1..F4"),
    ("regular-f-formulas", "prop-4.7", "F idempotents arise from E through the antipode"),
    ("regular-cop-idempotent", "sec-4-cop", "flipped-coproduct presentation has idempotent sigma E"),
    ("local-units", "prop-4.9", "the algebra has (local) units"),
    ("star-compatible", "prop-4.11", "star structure: E self-adjoint, S twisted-involutive, F1*=F3, F2*=F4"),
    ("weak-hopf-counit", "prop-4.12-eq-4.12", "unital case satisfies the first weak-multiplicativity identity"),
    ("weak-hopf-counit-op", "prop-4.12-eq-4.13", "unital case satisfies the second weak-multiplicativity identity"),
    ("weak-hopf-antipode-formulas", "prop-4.12-s", "counit contractions of E reproduce source/target values"),
    ("appendix-inverse-unit", "app-A.3", "multiplying S across E collapses to the identity"),
    ("appendix-source-target-swap", "app-A.4", "S exchanges the source and target maps"),
    ("appendix-e-absorption", "app-A.5", "E absorbs source values across its legs through S"),
    ("appendix-e-flip", "app-A.8", "flipped (S x S) image of E equals E"),
    ("appendix-op-roundtrip", "app-A.12", "opposite presentation verifies as the same structure"),
    ("window-consistency", "ex-1.15-windows", "witnesses restrict consistently across nested windows"),
    ("global-nonunital", "ex-1.16-unit", "full lazy algebra certified non-unital"),
    ("sampled-local-units", "prop-4.9-sampled", "sampled finite sets admit exhibited local units"),
]

REGISTRY_IDS = [r[0] for r in REGISTRY]
REGISTRY_ANCHORS = {r[0]: r[1] for r in REGISTRY}
_ORDER = {cid: i for i, (cid, _, _) in enumerate(REGISTRY)}

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass
class CheckResult:
    check_id: str
    status: str
    detail: str = ""
    counterexample: Optional[str] = None
    witness_refs: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.check_id not in REGISTRY_ANCHORS:
            raise KeyError(f"check id {self.check_id!r} not in registry")
        if self.status not in (PASS, FAIL, SKIP):
            raise ValueError(f"bad status {self.status!r}")


def passed(check_id, detail="", witness_refs=None) -> CheckResult:
    return CheckResult(check_id, PASS, detail, None, witness_refs or [])


def failed(check_id, detail="", counterexample=None) -> CheckResult:
    return CheckResult(check_id, FAIL, detail, counterexample)


def skipped(check_id, prerequisite: str) -> CheckResult:
    return CheckResult(check_id, SKIP, f"prerequisite failed: {prerequisite}")


def check(check_id, ok: bool, detail_pass="", detail_fail="", counterexample=None) -> CheckResult:
    if ok:
        return passed(check_id, detail_pass)
    return failed(check_id, detail_fail or detail_pass, counterexample)


@dataclass
class VerificationReport:
    tool_version: str = TOOL_VERSION
    input_digest: str = ""
    seed: Optional[int] = None
    checks: List[CheckResult] = field(default_factory=list)
    witnesses: Dict[str, object] = field(default_factory=dict)
    classification: Dict[str, object] = field(default_factory=dict)

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        return result

    def extend(self, results) -> None:
        for r in results:
            self.add(r)

    def has_failed(self, check_id: str) -> bool:
        return any(c.check_id == check_id and c.status == FAIL for c in self.checks)

    def status_of(self, check_id: str) -> Optional[str]:
        got = [c.status for c in self.checks if c.check_id == check_id]
        if not got:
            return None
        if FAIL in got:
            return FAIL
        if SKIP in got and PASS not in got:
            return SKIP
        return PASS

    @property
    def verdict(self) -> str:
        return FAIL if any(c.status == FAIL for c in self.checks) else PASS

    def first_failure(self) -> Optional[CheckResult]:
        for c in self.sorted_checks():
            if c.status == FAIL:
                return c
        return None

    def sorted_checks(self) -> List[CheckResult]:
        return sorted(self.checks, key=lambda c: (_ORDER[c.check_id], c.detail))

    def to_json_dict(self) -> dict:
        checks = []
        for c in self.sorted_checks():
            entry = {
                "id": c.check_id,
                "anchor": REGISTRY_ANCHORS[c.check_id],
                "status": c.status,
                "detail": c.detail,
                "witness_refs": c.witness_refs,
            }
            if c.counterexample is not None:
                entry["counterexample"] = c.counterexample
            checks.append(entry)
        out = {
            "schema": REPORT_SCHEMA,
            "tool_version": self.tool_version,
            "input_digest": self.input_digest,
            "checks": checks,
            "witnesses": self.witnesses,
            "classification": self.classification,
            "verdict": self.verdict,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def digest_of(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
