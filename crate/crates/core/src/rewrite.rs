//! Presented graded rings: generator tables, monomial rewrite rules, and
//! normal forms.
//!
//! A ring model is presented by a finite set of generators with integer
//! degrees and a list of rewrite rules `pattern -> replacement`, where the
//! pattern is a monomial and the replacement a homogeneous class of the
//! same degree. Reduction replaces any term divisible by a pattern until
//! no rule applies; terms whose degree exceeds the ambient dimension are
//! dropped (the ring is truncated above its top degree).
//!
//! The rule sets shipped by this crate are locally confluent, which is
//! verified at model construction by reducing every overlap of two rule
//! patterns both ways ([`RewriteSystem::check_local_confluence`]). Since
//! rules are degree-preserving and each application strictly shrinks its
//! leading exponent, reduction terminates and normal forms are canonical
//! representatives.

use std::collections::BTreeMap;

use num::{One, Signed};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::ring::{render_rational, ClassExpr, GenId, Monomial, Rational};

/// Whether a generator carries geometric degree or is an unknown
/// coefficient to be solved for (degree 0, inert under rewriting).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Geometric,
    Unknown,
}

/// One named generator of a presented ring.
#[derive(Debug, Clone)]
pub struct GeneratorEntry {
    pub id: GenId,
    pub name: String,
    pub degree: u32,
    pub kind: GeneratorKind,
    /// For per-component generators of the level models: the component
    /// index. `None` for everything else.
    pub component: Option<u32>,
}

impl GeneratorEntry {
    pub fn geometric(id: GenId, name: &str) -> Self {
        GeneratorEntry {
            id,
            name: name.to_string(),
            degree: 1,
            kind: GeneratorKind::Geometric,
            component: None,
        }
    }

    pub fn unknown(id: GenId, name: &str) -> Self {
        GeneratorEntry {
            id,
            name: name.to_string(),
            degree: 0,
            kind: GeneratorKind::Unknown,
            component: None,
        }
    }

    pub fn with_component(mut self, i: u32) -> Self {
        self.component = Some(i);
        self
    }
}

/// The generator alphabet of one model, in display order. Rendering,
/// degree bookkeeping, and name resolution all go through the table.
#[derive(Debug, Clone)]
pub struct GeneratorTable {
    entries: Vec<GeneratorEntry>,
}

impl GeneratorTable {
    /// Validates and freezes a table: ids and names must be unique,
    /// geometric generators must have positive degree, unknowns degree 0.
    pub fn new(entries: Vec<GeneratorEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            for other in &entries[..i] {
                if other.id == e.id {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate generator id {} in table",
                        e.id.0
                    )));
                }
                if other.name == e.name {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate generator name `{}` in table",
                        e.name
                    )));
                }
            }
            match e.kind {
                GeneratorKind::Geometric if e.degree == 0 => {
                    return Err(Error::InvalidParameter(format!(
                        "geometric generator `{}` must have positive degree",
                        e.name
                    )));
                }
                GeneratorKind::Unknown if e.degree != 0 => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown generator `{}` must have degree 0",
                        e.name
                    )));
                }
                _ => {}
            }
        }
        Ok(GeneratorTable { entries })
    }

    pub fn entries(&self) -> &[GeneratorEntry] {
        &self.entries
    }

    pub fn entry(&self, id: GenId) -> Option<&GeneratorEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn by_name(&self, name: &str) -> Option<&GeneratorEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn contains(&self, id: GenId) -> bool {
        self.entry(id).is_some()
    }

    /// Display name for an id; falls back to `#k` for foreign ids (used
    /// only in diagnostics).
    pub fn gen_name(&self, id: GenId) -> String {
        match self.entry(id) {
            Some(e) => e.name.clone(),
            None => format!("#{}", id.0),
        }
    }

    /// Geometric degree of a monomial (unknowns contribute 0). Panics if
    /// the monomial mentions a generator outside the table; callers
    /// validate alphabets first.
    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.iter()
            .map(|(g, e)| {
                let entry = self
                    .entry(g)
                    .unwrap_or_else(|| panic!("generator #{} not in table", g.0));
                entry.degree * e
            })
            .sum()
    }

    /// Splits a monomial into its geometric and unknown parts.
    pub fn split_monomial(&self, m: &Monomial) -> (Monomial, Monomial) {
        let mut geometric = Vec::new();
        let mut unknown = Vec::new();
        for (g, e) in m.iter() {
            let entry = self
                .entry(g)
                .unwrap_or_else(|| panic!("generator #{} not in table", g.0));
            match entry.kind {
                GeneratorKind::Geometric => geometric.push((g, e)),
                GeneratorKind::Unknown => unknown.push((g, e)),
            }
        }
        (
            Monomial::from_exponents(geometric),
            Monomial::from_exponents(unknown),
        )
    }

    /// The part of `x` of geometric degree exactly `d`.
    pub fn homogeneous_part(&self, x: &ClassExpr, d: u32) -> ClassExpr {
        ClassExpr::from_terms(
            x.terms()
                .filter(|(m, _)| self.monomial_degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn exponent_vector(&self, m: &Monomial) -> Vec<u32> {
        self.entries.iter().map(|e| m.exponent(e.id)).collect()
    }

    /// Renders a monomial as `name^e*name^e*...` in table order; `1` for
    /// the empty product. Panics on generators outside the table.
    pub fn render_monomial(&self, m: &Monomial) -> String {
        for g in m.generators() {
            assert!(self.contains(g), "generator #{} not in table", g.0);
        }
        if m.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for e in &self.entries {
            let exp = m.exponent(e.id);
            if exp == 1 {
                parts.push(e.name.clone());
            } else if exp > 1 {
                parts.push(format!("{}^{}", e.name, exp));
            }
        }
        parts.join("*")
    }

    /// Canonical text form of a class. Terms are ordered by geometric
    /// degree, then by descending exponent vector in table order, so the
    /// output is deterministic; the result parses back to an equal class.
    pub fn render(&self, x: &ClassExpr) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut keyed: Vec<(u32, Vec<u32>, &Monomial, &Rational)> = x
            .terms()
            .map(|(m, c)| (self.monomial_degree(m), self.exponent_vector(m), m, c))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));

        let mut out = String::new();
        for (i, (_, _, mono, coeff)) in keyed.iter().enumerate() {
            if i == 0 {
                // The sign of a leading term stays attached to its
                // coefficient so the output remains parseable.
                if mono.is_one() {
                    out.push_str(&render_rational(coeff));
                } else if coeff.is_one() {
                    out.push_str(&self.render_monomial(mono));
                } else {
                    out.push_str(&format!(
                        "{}*{}",
                        render_rational(coeff),
                        self.render_monomial(mono)
                    ));
                }
            } else {
                out.push_str(if coeff.is_negative() { " - " } else { " + " });
                let abs = coeff.abs();
                if mono.is_one() {
                    out.push_str(&render_rational(&abs));
                } else if abs.is_one() {
                    out.push_str(&self.render_monomial(mono));
                } else {
                    out.push_str(&format!(
                        "{}*{}",
                        render_rational(&abs),
                        self.render_monomial(mono)
                    ));
                }
            }
        }
        out
    }
}

/// One rewrite rule `pattern -> replacement`. Validated when assembled
/// into a [`RewriteSystem`].
#[derive(Debug, Clone)]
pub struct RewriteRule {
    name: String,
    pattern: Monomial,
    replacement: ClassExpr,
}

impl RewriteRule {
    pub fn new(name: &str, pattern: Monomial, replacement: ClassExpr) -> Self {
        RewriteRule {
            name: name.to_string(),
            pattern,
            replacement,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &Monomial {
        &self.pattern
    }

    pub fn replacement(&self) -> &ClassExpr {
        &self.replacement
    }
}

/// Outcome of reducing one overlap of two rule patterns both ways.
#[derive(Debug, Clone)]
pub struct OverlapCase {
    pub rule_a: String,
    pub rule_b: String,
    /// The least common multiple of the two patterns.
    pub overlap: Monomial,
    /// Normal form after rewriting the overlap with rule A first.
    pub via_a: ClassExpr,
    /// Normal form after rewriting the overlap with rule B first.
    pub via_b: ClassExpr,
    pub joinable: bool,
    /// True when the patterns share no generator, so joinability is
    /// automatic.
    pub disjoint: bool,
}

/// Result of a local confluence check: one case per unordered rule pair.
#[derive(Debug, Clone)]
pub struct ConfluenceReport {
    pub cases: Vec<OverlapCase>,
}

impl ConfluenceReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.joinable)
    }

    pub fn first_failure(&self) -> Option<&OverlapCase> {
        self.cases.iter().find(|c| !c.joinable)
    }
}

/// Cap on rewrite applications per reduction. The shipped systems are
/// terminating (degree-preserving rules that strictly shrink an
/// exponent), so hitting the cap means a caller-supplied system cycles;
/// reduction panics rather than spinning forever.
const MAX_REWRITE_STEPS: u64 = 20_000_000;

/// A validated rewrite presentation: rules, ambient dimension, and the
/// grading of the alphabet.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    rules: Vec<RewriteRule>,
    dimension: u32,
    degrees: BTreeMap<GenId, u32>,
}

impl RewriteSystem {
    /// Validates each rule against the table: patterns are nonempty
    /// monomials in geometric generators only; replacements stay inside
    /// the alphabet, are homogeneous of the pattern's degree, and
    /// strictly decrease the exponent of the pattern's leading (lowest
    /// id) generator, the invariant that keeps reduction terminating.
    ///
    /// Local confluence is deliberately *not* checked here — adversarial
    /// systems must be constructible so the checker has something to
    /// reject. Model constructors run [`Self::check_local_confluence`]
    /// and refuse to ship a non-confluent presentation.
    pub fn new(rules: Vec<RewriteRule>, dimension: u32, table: &GeneratorTable) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter(
                "ambient dimension must be at least 1".to_string(),
            ));
        }
        for rule in &rules {
            let err = |reason: String| Error::InvalidRule {
                name: rule.name.clone(),
                reason,
            };
            if rule.pattern.is_one() {
                return Err(err("pattern must be a nonempty monomial".to_string()));
            }
            for g in rule.pattern.generators() {
                match table.entry(g) {
                    None => {
                        return Err(err(format!(
                            "pattern generator `{}` not in table",
                            table.gen_name(g)
                        )))
                    }
                    Some(e) if e.kind == GeneratorKind::Unknown => {
                        return Err(err(format!(
                            "pattern generator `{}` is an unknown; patterns must be geometric",
                            e.name
                        )))
                    }
                    _ => {}
                }
            }
            let pattern_degree = table.monomial_degree(&rule.pattern);
            let lead = rule
                .pattern
                .generators()
                .min()
                .expect("pattern is nonempty");
            let lead_exp = rule.pattern.exponent(lead);
            for (m, _) in rule.replacement.terms() {
                for g in m.generators() {
                    if !table.contains(g) {
                        return Err(err(format!(
                            "replacement generator `{}` not in table",
                            table.gen_name(g)
                        )));
                    }
                }
                if table.monomial_degree(m) != pattern_degree {
                    return Err(err(format!(
                        "replacement term `{}` does not match pattern degree {}",
                        table.render_monomial(m),
                        pattern_degree
                    )));
                }
                if m.exponent(lead) >= lead_exp {
                    return Err(err(format!(
                        "replacement term `{}` does not decrease the leading generator `{}`",
                        table.render_monomial(m),
                        table.gen_name(lead)
                    )));
                }
            }
        }
        let degrees = table.entries().iter().map(|e| (e.id, e.degree)).collect();
        Ok(RewriteSystem {
            rules,
            dimension,
            degrees,
        })
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Geometric degree of a monomial under this system's grading.
    /// Panics on generators outside the alphabet.
    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.iter()
            .map(|(g, e)| {
                self.degrees
                    .get(&g)
                    .unwrap_or_else(|| panic!("generator #{} not in system alphabet", g.0))
                    * e
            })
            .sum()
    }

    /// Fully reduces `x`: applies rules until no term is divisible by any
    /// pattern, dropping terms of degree above the ambient dimension.
    /// The result is canonical for confluent systems regardless of
    /// reduction order. Panics on generators outside the alphabet or if
    /// the step cap is hit (non-terminating caller-supplied system).
    pub fn normal_form(&self, x: &ClassExpr) -> ClassExpr {
        self.normal_form_counting(x).0
    }

    pub(crate) fn normal_form_counting(&self, x: &ClassExpr) -> (ClassExpr, u64) {
        let mut work: Vec<(Monomial, Rational)> = x
            .terms()
            .filter(|(m, _)| self.monomial_degree(m) <= self.dimension)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        let mut out = ClassExpr::zero();
        let mut steps: u64 = 0;
        while let Some((mono, coeff)) = work.pop() {
            match self.rules.iter().find(|r| r.pattern.divides(&mono)) {
                Some(rule) => {
                    steps += 1;
                    assert!(
                        steps <= MAX_REWRITE_STEPS,
                        "rewrite step cap exceeded; system does not terminate"
                    );
                    let quot = mono
                        .checked_div(&rule.pattern)
                        .expect("pattern divides the term");
                    for (rm, rc) in rule.replacement.terms() {
                        work.push((rm.mul(&quot), rc * &coeff));
                    }
                }
                None => out.add_term(mono, coeff),
            }
        }
        (out, steps)
    }

    /// Like [`Self::normal_form`] but picks the term and rule to rewrite
    /// pseudo-randomly from `seed`. For a confluent system the result
    /// equals `normal_form(x)` for every seed; the verification sweeps
    /// use this to probe order independence.
    pub fn normal_form_seeded(&self, x: &ClassExpr, seed: u64) -> ClassExpr {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut work: Vec<(Monomial, Rational)> = x
            .terms()
            .filter(|(m, _)| self.monomial_degree(m) <= self.dimension)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        let mut steps: u64 = 0;
        loop {
            let candidates: Vec<(usize, Vec<usize>)> = work
                .iter()
                .enumerate()
                .filter_map(|(i, (m, _))| {
                    let applicable: Vec<usize> = self
                        .rules
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| r.pattern.divides(m))
                        .map(|(ri, _)| ri)
                        .collect();
                    if applicable.is_empty() {
                        None
                    } else {
                        Some((i, applicable))
                    }
                })
                .collect();
            if candidates.is_empty() {
                break;
            }
            let (wi, applicable) = &candidates[rng.gen_range(0..candidates.len())];
            let rule = &self.rules[applicable[rng.gen_range(0..applicable.len())]];
            let (mono, coeff) = work.swap_remove(*wi);
            steps += 1;
            assert!(
                steps <= MAX_REWRITE_STEPS,
                "rewrite step cap exceeded; system does not terminate"
            );
            let quot = mono
                .checked_div(rule.pattern())
                .expect("pattern divides the term");
            for (rm, rc) in rule.replacement.terms() {
                work.push((rm.mul(&quot), rc * &coeff));
            }
        }
        ClassExpr::from_terms(work)
    }

    /// Reduces every overlap (pattern lcm) of two distinct rules both
    /// ways and records whether the two normal forms agree. By Newman's
    /// lemma a terminating system whose overlaps all join is confluent.
    pub fn check_local_confluence(&self) -> ConfluenceReport {
        let mut cases = Vec::new();
        for i in 0..self.rules.len() {
            for j in (i + 1)..self.rules.len() {
                let a = &self.rules[i];
                let b = &self.rules[j];
                let overlap = a.pattern.lcm(&b.pattern);
                let via_a = self.normal_form(&self.apply_at(&overlap, a));
                let via_b = self.normal_form(&self.apply_at(&overlap, b));
                cases.push(OverlapCase {
                    rule_a: a.name.clone(),
                    rule_b: b.name.clone(),
                    overlap: overlap.clone(),
                    joinable: via_a == via_b,
                    disjoint: !a.pattern.shares_generator(&b.pattern),
                    via_a,
                    via_b,
                });
            }
        }
        ConfluenceReport { cases }
    }

    /// One rewrite of `mono` by `rule` (which must divide it).
    fn apply_at(&self, mono: &Monomial, rule: &RewriteRule) -> ClassExpr {
        let quot = mono
            .checked_div(&rule.pattern)
            .expect("pattern divides the overlap");
        ClassExpr::from_terms(
            rule.replacement
                .terms()
                .map(|(m, c)| (m.mul(&quot), c.clone())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rat_int};
    use proptest::prelude::*;

    const A: GenId = GenId(0);
    const B: GenId = GenId(1);
    const U: GenId = GenId(9);

    fn toy_table() -> GeneratorTable {
        GeneratorTable::new(vec![
            GeneratorEntry::geometric(A, "a"),
            GeneratorEntry::geometric(B, "b"),
            GeneratorEntry::unknown(U, "u"),
        ])
        .unwrap()
    }

    /// A single relation b^2 -> -a*b: the shape of the self-intersection
    /// rule used by the divisor models.
    fn toy_system(dimension: u32) -> RewriteSystem {
        let table = toy_table();
        let rules = vec![RewriteRule::new(
            "b^2",
            Monomial::power(B, 2),
            ClassExpr::term(
                Monomial::from_exponents([(A, 1), (B, 1)]),
                rat_int(-1),
            ),
        )];
        RewriteSystem::new(rules, dimension, &table).unwrap()
    }

    #[test]
    fn normal_form_applies_relations() {
        let sys = toy_system(3);
        // (b + a) * b = b^2 + a*b -> -a*b + a*b = 0
        let x = ClassExpr::gen(B).add(&ClassExpr::gen(A)).mul(&ClassExpr::gen(B));
        assert!(sys.normal_form(&x).is_zero());
        // b^3 -> -a*b^2 -> a^2*b
        let cube = ClassExpr::term(Monomial::power(B, 3), rat_int(1));
        assert_eq!(
            sys.normal_form(&cube),
            ClassExpr::term(Monomial::from_exponents([(A, 2), (B, 1)]), rat_int(1))
        );
    }

    #[test]
    fn normal_form_truncates_above_dimension() {
        let sys = toy_system(2);
        let too_high = ClassExpr::term(Monomial::power(A, 3), rat_int(5));
        assert!(sys.normal_form(&too_high).is_zero());
        let top = ClassExpr::term(Monomial::power(A, 2), rat(5, 3));
        assert_eq!(sys.normal_form(&top), top);
    }

    #[test]
    fn unknown_factors_ride_along() {
        let sys = toy_system(3);
        // u * b^2 -> -u*a*b
        let x = ClassExpr::term(Monomial::from_exponents([(U, 1), (B, 2)]), rat_int(1));
        assert_eq!(
            sys.normal_form(&x),
            ClassExpr::term(
                Monomial::from_exponents([(U, 1), (A, 1), (B, 1)]),
                rat_int(-1)
            )
        );
    }

    #[test]
    fn rule_validation_rejects_bad_rules() {
        let table = toy_table();
        // Empty pattern.
        let r = RewriteRule::new("empty", Monomial::one(), ClassExpr::zero());
        assert!(matches!(
            RewriteSystem::new(vec![r], 2, &table),
            Err(Error::InvalidRule { .. })
        ));
        // Unknown generator in the pattern.
        let r = RewriteRule::new("unknown", Monomial::gen(U), ClassExpr::zero());
        assert!(matches!(
            RewriteSystem::new(vec![r], 2, &table),
            Err(Error::InvalidRule { .. })
        ));
        // Replacement of the wrong degree.
        let r = RewriteRule::new(
            "inhomogeneous",
            Monomial::power(B, 2),
            ClassExpr::gen(A),
        );
        assert!(matches!(
            RewriteSystem::new(vec![r], 2, &table),
            Err(Error::InvalidRule { .. })
        ));
        // Replacement that does not decrease the leading exponent.
        let r = RewriteRule::new(
            "nondecreasing",
            Monomial::power(B, 2),
            ClassExpr::term(Monomial::power(B, 2), rat_int(-1)),
        );
        assert!(matches!(
            RewriteSystem::new(vec![r], 2, &table),
            Err(Error::InvalidRule { .. })
        ));
    }

    #[test]
    fn confluence_check_flags_a_genuinely_ambiguous_system() {
        let table = toy_table();
        let rules = vec![
            RewriteRule::new(
                "b^2->a^2",
                Monomial::power(B, 2),
                ClassExpr::term(Monomial::power(A, 2), rat_int(1)),
            ),
            RewriteRule::new("b^2->0", Monomial::power(B, 2), ClassExpr::zero()),
        ];
        let sys = RewriteSystem::new(rules, 4, &table).unwrap();
        let report = sys.check_local_confluence();
        assert!(!report.passed());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.overlap, Monomial::power(B, 2));
        assert!(!failure.disjoint);
        assert_eq!(
            failure.via_a,
            ClassExpr::term(Monomial::power(A, 2), rat_int(1))
        );
        assert!(failure.via_b.is_zero());
    }

    #[test]
    fn disjoint_overlaps_are_reported_as_trivial() {
        let table = toy_table();
        let rules = vec![
            RewriteRule::new("a^2", Monomial::power(A, 2), ClassExpr::zero()),
            RewriteRule::new("b^2", Monomial::power(B, 2), ClassExpr::zero()),
        ];
        let sys = RewriteSystem::new(rules, 4, &table).unwrap();
        let report = sys.check_local_confluence();
        assert!(report.passed());
        assert_eq!(report.cases.len(), 1);
        assert!(report.cases[0].disjoint);
        assert!(report.cases[0].joinable);
    }

    #[test]
    fn rendering_matches_the_pinned_conventions() {
        let table = toy_table();
        assert_eq!(table.render(&ClassExpr::zero()), "0");
        let x = ClassExpr::from_terms([
            (Monomial::gen(B), rat(1, 2)),
            (Monomial::gen(A), rat_int(1)),
            (Monomial::one(), rat_int(-3)),
        ]);
        // Constant first (degree 0), then degree-1 terms in table order.
        assert_eq!(table.render(&x), "-3 + a + 1/2*b");
        // A leading negative term keeps its sign inside the coefficient.
        let y = ClassExpr::from_terms([
            (Monomial::gen(A), rat_int(-1)),
            (Monomial::gen(B), rat_int(2)),
        ]);
        assert_eq!(table.render(&y), "-1*a + 2*b");
        // Exponents and mixed products.
        let z = ClassExpr::from_terms([
            (Monomial::from_exponents([(A, 2), (B, 1)]), rat(-5, 7)),
            (Monomial::power(A, 3), rat_int(1)),
        ]);
        assert_eq!(table.render(&z), "a^3 - 5/7*a^2*b");
    }

    #[test]
    fn step_count_stays_linear_for_the_shipped_rule_shape() {
        let sys = toy_system(8);
        let x = ClassExpr::term(Monomial::power(B, 8), rat_int(3));
        let (_, steps) = sys.normal_form_counting(&x);
        // b^8 needs exactly 7 applications of b^2 -> -a*b.
        assert_eq!(steps, 7);
    }

    fn arb_class() -> impl Strategy<Value = ClassExpr> {
        let mono = (0u32..=4, 0u32..=4, 0u32..=1).prop_map(|(a, b, u)| {
            Monomial::from_exponents([(A, a), (B, b), (U, u)])
        });
        let coeff = (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q));
        proptest::collection::vec((mono, coeff), 0..6).prop_map(ClassExpr::from_terms)
    }

    proptest! {
        #[test]
        fn normal_form_is_idempotent(x in arb_class()) {
            let sys = toy_system(5);
            let nf = sys.normal_form(&x);
            prop_assert_eq!(sys.normal_form(&nf), nf);
        }

        #[test]
        fn normal_form_is_order_independent(x in arb_class(), seed in any::<u64>()) {
            let sys = toy_system(5);
            prop_assert_eq!(sys.normal_form_seeded(&x, seed), sys.normal_form(&x));
        }

        #[test]
        fn normal_form_is_additive(x in arb_class(), y in arb_class()) {
            let sys = toy_system(5);
            prop_assert_eq!(
                sys.normal_form(&x.add(&y)),
                sys.normal_form(&x).add(&sys.normal_form(&y))
            );
        }
    }
}
