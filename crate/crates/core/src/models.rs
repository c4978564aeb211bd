//! The three ring models of the compactified family and their evaluation
//! functionals.
//!
//! All three share the divisor classes μ, α, η pulled back from the base
//! of the family (written `mu`, `alpha`, `eta`):
//!
//! * **base** — the product of the base abelian variety with the test
//!   curve; dimension `g`, relations η² = 0 and αη = 0.
//! * **poincare** — the compactified Poincaré bundle over that product;
//!   dimension `g + 1`, adds the bundle class ξ with ξ² = −αξ.
//! * **level** — the level-`m` analog, whose boundary normalization has
//!   `m` bundle components; one class ξ_i per component with
//!   ξ_i² = −mαξ_i, and ξ_iξ_j = 0 for i ≠ j since distinct components
//!   meet only along sections.
//!
//! Top intersection numbers come from a linear functional on normal-form
//! monomials of top degree: on the base, μ^{g−1}η ↦ n(g−1)! and
//! μ^{g−2}α² ↦ −2n(g−2)! with everything else zero; on the bundle models
//! the ξ-linear part is evaluated by the base functional and pure
//! pullback monomials die. Four inert degree-0 generators (`c_xi`,
//! `c_mu`, `c_alpha`, `c_eta`) are available as unknowns for the
//! coefficient solver and ride through evaluation linearly.

use num::Zero;

use crate::error::{Error, Result};
use crate::rewrite::{
    GeneratorEntry, GeneratorTable, RewriteRule, RewriteSystem,
};
use crate::ring::{factorial, rat_int, ClassExpr, GenId, Monomial, Rational};

/// Pullback of the principal polarization of the base abelian variety.
pub const MU: GenId = GenId(0);
/// The mixed class on the product (polarization correlation with the
/// test curve).
pub const ALPHA: GenId = GenId(1);
/// Pullback of the point class of the test curve.
pub const ETA: GenId = GenId(2);
/// First Chern class of the tautological bundle on the compactified
/// Poincaré bundle; the class of the infinity section.
pub const XI: GenId = GenId(3);
/// Unknown coefficients used by the theta solver (degree 0, inert).
pub const C_XI: GenId = GenId(4);
pub const C_MU: GenId = GenId(5);
pub const C_ALPHA: GenId = GenId(6);
pub const C_ETA: GenId = GenId(7);

/// The component-`i` bundle class of a level model.
pub fn xi_component(i: u32) -> GenId {
    GenId(8 + i)
}

/// Canonical display name for an id, independent of any model table.
/// Used in panic and error messages only.
pub fn standard_gen_name(id: GenId) -> String {
    match id.0 {
        0 => "mu".to_string(),
        1 => "alpha".to_string(),
        2 => "eta".to_string(),
        3 => "xi".to_string(),
        4 => "c_xi".to_string(),
        5 => "c_mu".to_string(),
        6 => "c_alpha".to_string(),
        7 => "c_eta".to_string(),
        k => format!("xi_{}", k - 8),
    }
}

/// Which of the three presentations a model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Base,
    Poincare,
    Level,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Base => "base",
            ModelKind::Poincare => "poincare",
            ModelKind::Level => "level",
        }
    }
}

/// The two disjoint sections of the compactified bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Zero,
    Infinity,
}

/// The three test curves pairing against divisor classes: copies of the
/// test curve sitting over a point, under a point, and diagonally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestCurve {
    MuStar,
    EtaStar,
    DeltaStar,
}

impl TestCurve {
    pub const ALL: [TestCurve; 3] = [
        TestCurve::MuStar,
        TestCurve::EtaStar,
        TestCurve::DeltaStar,
    ];

    pub fn from_name(name: &str) -> Option<TestCurve> {
        match name {
            "mu_star" => Some(TestCurve::MuStar),
            "eta_star" => Some(TestCurve::EtaStar),
            "delta_star" => Some(TestCurve::DeltaStar),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestCurve::MuStar => "mu_star",
            TestCurve::EtaStar => "eta_star",
            TestCurve::DeltaStar => "delta_star",
        }
    }

    fn row(&self) -> usize {
        match self {
            TestCurve::MuStar => 0,
            TestCurve::EtaStar => 1,
            TestCurve::DeltaStar => 2,
        }
    }
}

/// Intersection numbers of the divisor generators against the test
/// curves. Rows are indexed by (μ*, η*, δ*), columns by (μ, η, α).
#[derive(Debug, Clone)]
pub struct CurvePairing {
    matrix: [[Rational; 3]; 3],
}

impl CurvePairing {
    /// The table for a test curve of degree `n`:
    /// [[n, 0, 0], [0, n, 0], [n, n, 2n]].
    pub fn standard(n: u32) -> CurvePairing {
        let n = rat_int(n as i64);
        let z = Rational::zero;
        CurvePairing {
            matrix: [
                [n.clone(), z(), z()],
                [z(), n.clone(), z()],
                [n.clone(), n.clone(), &n + &n],
            ],
        }
    }

    /// An arbitrary table; used to exercise the rank check on degenerate
    /// inputs.
    pub fn new(matrix: [[Rational; 3]; 3]) -> CurvePairing {
        CurvePairing { matrix }
    }

    pub fn entry(&self, curve: TestCurve, column: usize) -> &Rational {
        &self.matrix[curve.row()][column]
    }

    /// The full table, rows (μ*, η*, δ*) by columns (μ, η, α).
    pub fn entries(&self) -> &[[Rational; 3]; 3] {
        &self.matrix
    }

    /// Exact rank over the rationals by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Rational>> = self.matrix.iter().map(|r| r.to_vec()).collect();
        let mut rank = 0;
        for col in 0..3 {
            let Some(pivot) = (rank..3).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            let pivot_row = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot_row[col];
                for (cell, pivot_cell) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *cell = &*cell - &(&factor * pivot_cell);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// One of the three presented rings, with its alphabet, rewrite system,
/// evaluation data, and curve pairing.
#[derive(Debug, Clone)]
pub struct RingModel {
    kind: ModelKind,
    g: u32,
    n: u32,
    m: Option<u32>,
    generators: GeneratorTable,
    system: RewriteSystem,
    pairing: CurvePairing,
}

fn check_params(g: u32, n: u32) -> Result<()> {
    if g < 2 {
        return Err(Error::InvalidParameter(format!(
            "g must be at least 2 (the evaluation table needs (g-2)!), got g={g}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got n={n}"
        )));
    }
    Ok(())
}

fn unknown_entries() -> Vec<GeneratorEntry> {
    vec![
        GeneratorEntry::unknown(C_XI, "c_xi"),
        GeneratorEntry::unknown(C_MU, "c_mu"),
        GeneratorEntry::unknown(C_ALPHA, "c_alpha"),
        GeneratorEntry::unknown(C_ETA, "c_eta"),
    ]
}

fn base_rules() -> Vec<RewriteRule> {
    vec![
        RewriteRule::new("eta^2 -> 0", Monomial::power(ETA, 2), ClassExpr::zero()),
        RewriteRule::new(
            "alpha*eta -> 0",
            Monomial::from_exponents([(ALPHA, 1), (ETA, 1)]),
            ClassExpr::zero(),
        ),
    ]
}

fn finish_model(
    kind: ModelKind,
    g: u32,
    n: u32,
    m: Option<u32>,
    entries: Vec<GeneratorEntry>,
    rules: Vec<RewriteRule>,
    dimension: u32,
) -> Result<RingModel> {
    let generators = GeneratorTable::new(entries)?;
    let system = RewriteSystem::new(rules, dimension, &generators)?;
    let report = system.check_local_confluence();
    if let Some(fail) = report.first_failure() {
        return Err(Error::NotConfluent {
            witness: format!(
                "rules `{}` and `{}` reduce {} to different normal forms",
                fail.rule_a,
                fail.rule_b,
                generators.render_monomial(&fail.overlap)
            ),
        });
    }
    Ok(RingModel {
        kind,
        g,
        n,
        m,
        generators,
        system,
        pairing: CurvePairing::standard(n),
    })
}

/// The dimension-`g` product model with relations η² = 0 and αη = 0.
pub fn make_base_ring(g: u32, n: u32) -> Result<RingModel> {
    check_params(g, n)?;
    let mut entries = vec![
        GeneratorEntry::geometric(MU, "mu"),
        GeneratorEntry::geometric(ALPHA, "alpha"),
        GeneratorEntry::geometric(ETA, "eta"),
    ];
    entries.extend(unknown_entries());
    finish_model(ModelKind::Base, g, n, None, entries, base_rules(), g)
}

/// The dimension-`g+1` bundle model: base relations plus ξ² = −αξ.
pub fn make_poincare_ring(g: u32, n: u32) -> Result<RingModel> {
    check_params(g, n)?;
    let mut entries = vec![
        GeneratorEntry::geometric(MU, "mu"),
        GeneratorEntry::geometric(ALPHA, "alpha"),
        GeneratorEntry::geometric(ETA, "eta"),
        GeneratorEntry::geometric(XI, "xi"),
    ];
    entries.extend(unknown_entries());
    let mut rules = base_rules();
    rules.push(RewriteRule::new(
        "xi^2 -> -alpha*xi",
        Monomial::power(XI, 2),
        ClassExpr::term(Monomial::from_exponents([(ALPHA, 1), (XI, 1)]), rat_int(-1)),
    ));
    finish_model(ModelKind::Poincare, g, n, None, entries, rules, g + 1)
}

/// The level-`m` model: one bundle class per boundary component, with
/// ξ_i² = −mαξ_i and ξ_iξ_j = 0 for i ≠ j. `m = 1` coincides with the
/// poincare model up to renaming ξ_0 ↔ ξ.
pub fn make_level_ring(g: u32, n: u32, m: u32) -> Result<RingModel> {
    check_params(g, n)?;
    if m < 1 {
        return Err(Error::InvalidParameter(format!(
            "m must be at least 1, got m={m}"
        )));
    }
    let mut entries = Vec::new();
    for i in 0..m {
        entries.push(
            GeneratorEntry::geometric(xi_component(i), &format!("xi_{i}")).with_component(i),
        );
    }
    entries.push(GeneratorEntry::geometric(MU, "mu"));
    entries.push(GeneratorEntry::geometric(ALPHA, "alpha"));
    entries.push(GeneratorEntry::geometric(ETA, "eta"));
    entries.extend(unknown_entries());

    let mut rules = Vec::new();
    for i in 0..m {
        rules.push(RewriteRule::new(
            &format!("xi_{i}^2 -> -{m}*alpha*xi_{i}"),
            Monomial::power(xi_component(i), 2),
            ClassExpr::term(
                Monomial::from_exponents([(ALPHA, 1), (xi_component(i), 1)]),
                rat_int(-(m as i64)),
            ),
        ));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            rules.push(RewriteRule::new(
                &format!("xi_{i}*xi_{j} -> 0"),
                Monomial::from_exponents([(xi_component(i), 1), (xi_component(j), 1)]),
                ClassExpr::zero(),
            ));
        }
    }
    rules.extend(base_rules());
    finish_model(ModelKind::Level, g, n, Some(m), entries, rules, g + 1)
}

impl RingModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The level for level models, `None` otherwise.
    pub fn m(&self) -> Option<u32> {
        self.m
    }

    /// Top geometric degree: `g` for the base model, `g + 1` for the
    /// bundle models.
    pub fn dimension(&self) -> u32 {
        self.system.dimension()
    }

    pub fn generators(&self) -> &GeneratorTable {
        &self.generators
    }

    pub fn system(&self) -> &RewriteSystem {
        &self.system
    }

    pub fn pairing(&self) -> &CurvePairing {
        &self.pairing
    }

    /// `kind(g=G,n=N[,m=M])`, the descriptor accepted by the CLI.
    pub fn descriptor(&self) -> String {
        match self.m {
            Some(m) => format!("{}(g={},n={},m={})", self.kind.as_str(), self.g, self.n, m),
            None => format!("{}(g={},n={})", self.kind.as_str(), self.g, self.n),
        }
    }

    /// Errors unless every generator of `x` is in this model's table.
    pub fn check_alphabet(&self, x: &ClassExpr) -> Result<()> {
        for (mono, _) in x.terms() {
            for g in mono.generators() {
                if !self.generators.contains(g) {
                    return Err(Error::Alphabet(standard_gen_name(g)));
                }
            }
        }
        Ok(())
    }

    /// Alphabet-checked normal form.
    pub fn normal_form(&self, x: &ClassExpr) -> Result<ClassExpr> {
        self.check_alphabet(x)?;
        Ok(self.system.normal_form(x))
    }

    /// `x^k` with reduction interleaved after every multiplication, so
    /// intermediate results stay in normal form. On these models normal
    /// forms carry each bundle class to exponent at most 1, which keeps
    /// high powers (the `g = 64` boundary computation) small.
    pub fn pow_reduced(&self, x: &ClassExpr, k: u32) -> Result<ClassExpr> {
        self.check_alphabet(x)?;
        let mut result = ClassExpr::one();
        let mut base = self.system.normal_form(x);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.system.normal_form(&result.mul(&base));
            }
            k >>= 1;
            if k > 0 {
                base = self.system.normal_form(&base.mul(&base));
            }
        }
        Ok(result)
    }

    /// Value of the top-degree functional on a normal-form monomial's
    /// geometric part. Zero for everything outside the table.
    pub(crate) fn top_table_value(&self, geom: &Monomial) -> Rational {
        match self.kind {
            ModelKind::Base => self.base_table_value(geom),
            ModelKind::Poincare => match geom.exponent(XI) {
                0 => Rational::zero(),
                1 => {
                    let rest = geom
                        .checked_div(&Monomial::gen(XI))
                        .expect("xi divides the monomial");
                    self.base_table_value(&rest)
                }
                _ => {
                    debug_assert!(false, "monomial not in normal form: xi^2 survived");
                    Rational::zero()
                }
            },
            ModelKind::Level => {
                let m = self.m.expect("level model has m");
                let components: Vec<(u32, u32)> = (0..m)
                    .map(|i| (i, geom.exponent(xi_component(i))))
                    .filter(|(_, e)| *e > 0)
                    .collect();
                match components.as_slice() {
                    [] => Rational::zero(),
                    [(i, 1)] => {
                        let rest = geom
                            .checked_div(&Monomial::gen(xi_component(*i)))
                            .expect("xi_i divides the monomial");
                        self.base_table_value(&rest)
                    }
                    _ => {
                        debug_assert!(
                            false,
                            "monomial not in normal form: multiple or squared bundle classes"
                        );
                        Rational::zero()
                    }
                }
            }
        }
    }

    /// The base functional: μ^{g−1}η ↦ n(g−1)!, μ^{g−2}α² ↦ −2n(g−2)!,
    /// all other monomials of degree g ↦ 0.
    fn base_table_value(&self, mono: &Monomial) -> Rational {
        let g = self.g;
        let mu = mono.exponent(MU);
        let alpha = mono.exponent(ALPHA);
        let eta = mono.exponent(ETA);
        debug_assert_eq!(mu + alpha + eta, g, "base functional needs degree g");
        if eta == 1 && alpha == 0 {
            Rational::from_integer(factorial(g - 1) * self.n)
        } else if eta == 0 && alpha == 2 {
            -Rational::from_integer(factorial(g - 2) * self.n * 2u32)
        } else {
            Rational::zero()
        }
    }

    /// The top-degree evaluation functional, extended linearly over the
    /// unknowns: reduces `x`, requires every term to have geometric
    /// degree equal to the model dimension, and returns the resulting
    /// class in the unknowns alone (a constant when `x` has none).
    pub fn evaluate_top(&self, x: &ClassExpr) -> Result<ClassExpr> {
        self.check_alphabet(x)?;
        let nf = self.system.normal_form(x);
        let mut out = ClassExpr::zero();
        for (mono, coeff) in nf.terms() {
            let (geom, unknown) = self.generators.split_monomial(mono);
            let degree = self.generators.monomial_degree(&geom);
            if degree != self.dimension() {
                return Err(Error::DegreeMismatch {
                    expected: self.dimension(),
                    found: degree,
                });
            }
            let value = self.top_table_value(&geom);
            if !value.is_zero() {
                out.add_term(unknown, coeff * &value);
            }
        }
        Ok(out)
    }

    /// [`Self::evaluate_top`] for unknown-free input: returns the exact
    /// intersection number.
    pub fn evaluate_top_number(&self, x: &ClassExpr) -> Result<Rational> {
        let value = self.evaluate_top(x)?;
        value.as_constant().ok_or_else(|| {
            Error::NotNumeric(format!(
                "result still involves unknowns: {}",
                self.generators.render(&value)
            ))
        })
    }

    /// The class of a section of the poincare model: ξ for the infinity
    /// section, ξ + α for the zero section.
    pub fn section_class(&self, section: Section) -> Result<ClassExpr> {
        if self.kind != ModelKind::Poincare {
            return Err(Error::WrongModelKind {
                op: "section_class",
                expected: "poincare",
                found: self.kind.as_str(),
            });
        }
        Ok(match section {
            Section::Infinity => ClassExpr::gen(XI),
            Section::Zero => ClassExpr::gen(XI).add(&ClassExpr::gen(ALPHA)),
        })
    }

    /// Component-`i` section classes of a level model: ξ_i, and
    /// ξ_i + mα for the zero section.
    pub fn level_section_class(&self, i: u32, section: Section) -> Result<ClassExpr> {
        let (ModelKind::Level, Some(m)) = (self.kind, self.m) else {
            return Err(Error::WrongModelKind {
                op: "level_section_class",
                expected: "level",
                found: self.kind.as_str(),
            });
        };
        if i >= m {
            return Err(Error::InvalidParameter(format!(
                "component {i} out of range; the model has components 0..{m}"
            )));
        }
        Ok(match section {
            Section::Infinity => ClassExpr::gen(xi_component(i)),
            Section::Zero => ClassExpr::gen(xi_component(i))
                .add(&ClassExpr::gen(ALPHA).scale(&rat_int(m as i64))),
        })
    }

    /// Restricts a divisor class of the poincare model to a section,
    /// identifying the section with the base product: ξ ↦ −α on the
    /// infinity section (self-intersection), ξ ↦ 0 on the zero section
    /// (the sections are disjoint).
    pub fn restrict_section(&self, x: &ClassExpr, section: Section) -> Result<ClassExpr> {
        if self.kind != ModelKind::Poincare {
            return Err(Error::WrongModelKind {
                op: "restrict_section",
                expected: "poincare",
                found: self.kind.as_str(),
            });
        }
        self.check_alphabet(x)?;
        let nf = self.system.normal_form(x);
        for (mono, _) in nf.terms() {
            let (geom, _) = self.generators.split_monomial(mono);
            let degree = self.generators.monomial_degree(&geom);
            if degree != 1 {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    found: degree,
                });
            }
        }
        let image = match section {
            Section::Infinity => ClassExpr::gen(ALPHA).neg(),
            Section::Zero => ClassExpr::zero(),
        };
        Ok(nf.substitute(|g| (g == XI).then(|| image.clone())))
    }

    /// Pairs a divisor class over {μ, η, α} with a test curve by linear
    /// extension of the pairing table.
    pub fn pair_with_curve(&self, x: &ClassExpr, curve: TestCurve) -> Result<Rational> {
        self.check_alphabet(x)?;
        // Column coefficients in table order (μ, η, α).
        let mut columns = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (mono, coeff) in x.terms() {
            let single = {
                let mut it = mono.iter();
                match (it.next(), it.next()) {
                    (Some((g, 1)), None) => Some(g),
                    _ => None,
                }
            };
            let column = match single {
                Some(MU) => 0,
                Some(ETA) => 1,
                Some(ALPHA) => 2,
                _ => {
                    let degree = self.generators.monomial_degree(mono);
                    if degree != 1 {
                        return Err(Error::DegreeMismatch {
                            expected: 1,
                            found: degree,
                        });
                    }
                    return Err(Error::InvalidParameter(format!(
                        "curve pairing is defined on divisors over mu, eta, alpha; found `{}`",
                        self.generators.render_monomial(mono)
                    )));
                }
            };
            columns[column] = &columns[column] + coeff;
        }
        let mut total = Rational::zero();
        for (c, value) in columns.iter().enumerate() {
            total = &total + &(self.pairing.entry(curve, c) * value);
        }
        Ok(total)
    }

    /// Rank of the curve pairing: 3 means the three divisor classes are
    /// independent, i.e. they generate a rank-3 piece of the Néron–Severi
    /// group.
    pub fn ns_generation_check(&self) -> usize {
        self.pairing.rank()
    }

    /// Canonical text form of a class under this model's table.
    pub fn render(&self, x: &ClassExpr) -> String {
        self.generators.render(x)
    }
}

/// Pullback along the `N`-th power of the fiberwise shift of the
/// product: μ ↦ μ + Nα + N²η, α ↦ α + 2Nη, η ↦ η (the closed form of the
/// N-fold composite; negative `N` is the inverse). A ring automorphism.
///
/// Defined on classes over the base alphabet (unknowns may ride along);
/// panics if `x` mentions a bundle class.
pub fn shift_pullback(x: &ClassExpr, n: i64) -> ClassExpr {
    for (mono, _) in x.terms() {
        for g in mono.generators() {
            assert!(
                matches!(g, MU | ALPHA | ETA | C_XI | C_MU | C_ALPHA | C_ETA),
                "shift_pullback is defined over the base alphabet; `{}` is not in it",
                standard_gen_name(g)
            );
        }
    }
    let mu_image = ClassExpr::from_terms([
        (Monomial::gen(MU), rat_int(1)),
        (Monomial::gen(ALPHA), rat_int(n)),
        (Monomial::gen(ETA), rat_int(n * n)),
    ]);
    let alpha_image = ClassExpr::from_terms([
        (Monomial::gen(ALPHA), rat_int(1)),
        (Monomial::gen(ETA), rat_int(2 * n)),
    ]);
    x.substitute(|g| match g {
        MU => Some(mu_image.clone()),
        ALPHA => Some(alpha_image.clone()),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;
    use proptest::prelude::*;

    fn mono(parts: &[(GenId, u32)]) -> Monomial {
        Monomial::from_exponents(parts.iter().copied())
    }

    #[test]
    fn constructors_validate_parameters() {
        assert!(make_base_ring(1, 1).is_err());
        assert!(make_base_ring(2, 0).is_err());
        assert!(make_poincare_ring(1, 2).is_err());
        assert!(make_level_ring(3, 1, 0).is_err());
        assert!(make_base_ring(2, 1).is_ok());
    }

    #[test]
    fn base_model_shape() {
        let model = make_base_ring(4, 1).unwrap();
        assert_eq!(model.dimension(), 4);
        assert_eq!(model.system().rules().len(), 2);
        assert_eq!(model.descriptor(), "base(g=4,n=1)");
    }

    #[test]
    fn level_model_shape() {
        let model = make_level_ring(3, 1, 2).unwrap();
        assert_eq!(model.dimension(), 4);
        // xi_0^2, xi_1^2, xi_0*xi_1, eta^2, alpha*eta
        assert_eq!(model.system().rules().len(), 5);
        assert_eq!(model.descriptor(), "level(g=3,n=1,m=2)");
        let three = make_level_ring(2, 1, 3).unwrap();
        let xi_gens = three
            .generators()
            .entries()
            .iter()
            .filter(|e| e.component.is_some())
            .count();
        assert_eq!(xi_gens, 3);
    }

    #[test]
    fn base_evaluation_table() {
        // η·μ³ at g=4, n=2: n(g−1)! = 12.
        let model = make_base_ring(4, 2).unwrap();
        let x = ClassExpr::term(mono(&[(ETA, 1), (MU, 3)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(12));
        // α²·μ at g=3: −2n(g−2)!.
        let model = make_base_ring(3, 1).unwrap();
        let x = ClassExpr::term(mono(&[(ALPHA, 2), (MU, 1)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(-2));
        let model = make_base_ring(3, 3).unwrap();
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(-6));
        // Everything else in the table is zero.
        let x = ClassExpr::term(mono(&[(MU, 3)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(0));
        let x = ClassExpr::term(mono(&[(ALPHA, 1), (ETA, 1), (MU, 1)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(0));
    }

    #[test]
    fn evaluation_rejects_wrong_degree_and_alphabet() {
        let model = make_base_ring(4, 1).unwrap();
        let low = ClassExpr::term(mono(&[(MU, 2)]), rat_int(1));
        assert!(matches!(
            model.evaluate_top(&low),
            Err(Error::DegreeMismatch { expected: 4, found: 2 })
        ));
        let foreign = ClassExpr::gen(XI);
        assert_eq!(
            model.evaluate_top(&foreign),
            Err(Error::Alphabet("xi".to_string()))
        );
    }

    #[test]
    fn poincare_evaluation() {
        let model = make_poincare_ring(4, 1).unwrap();
        // Pure pullback top class dies.
        let x = ClassExpr::term(mono(&[(MU, 5)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(0));
        // ξ·μ^{g−1}η ↦ n(g−1)!.
        let x = ClassExpr::term(mono(&[(XI, 1), (MU, 3), (ETA, 1)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(6));
        // Reduction first: ξ³μ² = α²ξμ² after normal form, ↦ −2n·2!·... at
        // g=4: α²μ²ξ ↦ −2·2! = −4.
        let x = ClassExpr::term(mono(&[(XI, 3), (MU, 2)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(-4));
    }

    #[test]
    fn poincare_sections_do_not_meet() {
        let model = make_poincare_ring(4, 1).unwrap();
        let p0 = model.section_class(Section::Zero).unwrap();
        let pinf = model.section_class(Section::Infinity).unwrap();
        assert!(model.normal_form(&p0.mul(&pinf)).unwrap().is_zero());
    }

    #[test]
    fn high_xi_powers_truncate() {
        // ξ⁴ at g=2 lives above dimension 3 and vanishes.
        let model = make_poincare_ring(2, 1).unwrap();
        let x = ClassExpr::term(Monomial::power(XI, 4), rat_int(1));
        assert!(model.normal_form(&x).unwrap().is_zero());
        // ξ³ reduces to α²ξ (two applications of the self-intersection
        // rule) and is top-degree.
        let x = ClassExpr::term(Monomial::power(XI, 3), rat_int(1));
        assert_eq!(
            model.normal_form(&x).unwrap(),
            ClassExpr::term(mono(&[(ALPHA, 2), (XI, 1)]), rat_int(1))
        );
    }

    #[test]
    fn level_sections_do_not_meet_per_component() {
        let model = make_level_ring(3, 1, 2).unwrap();
        for i in 0..2 {
            let p0 = model.level_section_class(i, Section::Zero).unwrap();
            let pinf = model.level_section_class(i, Section::Infinity).unwrap();
            assert!(model.normal_form(&p0.mul(&pinf)).unwrap().is_zero());
        }
        assert!(model.level_section_class(2, Section::Zero).is_err());
    }

    #[test]
    fn level_evaluation_uses_the_component_cofactor() {
        let model = make_level_ring(3, 1, 2).unwrap();
        // ξ_0·μ²η ↦ n(g−1)! = 2.
        let x = ClassExpr::term(mono(&[(xi_component(0), 1), (MU, 2), (ETA, 1)]), rat_int(1));
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(2));
        // Cross products die by rewriting.
        let x = ClassExpr::term(
            mono(&[(xi_component(0), 1), (xi_component(1), 1), (MU, 2)]),
            rat_int(1),
        );
        assert_eq!(model.evaluate_top_number(&x).unwrap(), rat_int(0));
    }

    #[test]
    fn restriction_examples() {
        let model = make_poincare_ring(3, 1).unwrap();
        let xi = ClassExpr::gen(XI);
        assert!(model.restrict_section(&xi, Section::Zero).unwrap().is_zero());
        assert_eq!(
            model.restrict_section(&xi, Section::Infinity).unwrap(),
            ClassExpr::gen(ALPHA).neg()
        );
        // ξ + μ + α/2 + η/4 restricted to the infinity section.
        let d = ClassExpr::from_terms([
            (Monomial::gen(XI), rat_int(1)),
            (Monomial::gen(MU), rat_int(1)),
            (Monomial::gen(ALPHA), rat(1, 2)),
            (Monomial::gen(ETA), rat(1, 4)),
        ]);
        let expected = ClassExpr::from_terms([
            (Monomial::gen(MU), rat_int(1)),
            (Monomial::gen(ALPHA), rat(-1, 2)),
            (Monomial::gen(ETA), rat(1, 4)),
        ]);
        assert_eq!(
            model.restrict_section(&d, Section::Infinity).unwrap(),
            expected
        );
        // Non-divisor input is rejected.
        let quad = ClassExpr::term(mono(&[(MU, 2)]), rat_int(1));
        assert!(matches!(
            model.restrict_section(&quad, Section::Infinity),
            Err(Error::DegreeMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn shift_examples() {
        let mu = ClassExpr::gen(MU);
        assert_eq!(
            shift_pullback(&mu, 1),
            ClassExpr::from_terms([
                (Monomial::gen(MU), rat_int(1)),
                (Monomial::gen(ALPHA), rat_int(1)),
                (Monomial::gen(ETA), rat_int(1)),
            ])
        );
        assert_eq!(
            shift_pullback(&mu, 3),
            ClassExpr::from_terms([
                (Monomial::gen(MU), rat_int(1)),
                (Monomial::gen(ALPHA), rat_int(3)),
                (Monomial::gen(ETA), rat_int(9)),
            ])
        );
        let alpha = ClassExpr::gen(ALPHA);
        assert_eq!(shift_pullback(&shift_pullback(&alpha, 1), -1), alpha);
    }

    #[test]
    fn pairing_examples() {
        for n in 1..=4u32 {
            let model = make_base_ring(4, n).unwrap();
            let alpha = ClassExpr::gen(ALPHA);
            assert_eq!(
                model.pair_with_curve(&alpha, TestCurve::DeltaStar).unwrap(),
                rat_int(2 * n as i64)
            );
            let eta = ClassExpr::gen(ETA);
            assert_eq!(
                model.pair_with_curve(&eta, TestCurve::MuStar).unwrap(),
                rat_int(0)
            );
            // μ + Nα + N²η against δ* is (N+1)²n.
            let x = shift_pullback(&ClassExpr::gen(MU), 2);
            assert_eq!(
                model.pair_with_curve(&x, TestCurve::DeltaStar).unwrap(),
                rat_int(9 * n as i64)
            );
            // Adjointness spot check: s*(α) against δ* is 4n.
            let y = shift_pullback(&ClassExpr::gen(ALPHA), 1);
            assert_eq!(
                model.pair_with_curve(&y, TestCurve::DeltaStar).unwrap(),
                rat_int(4 * n as i64)
            );
        }
    }

    #[test]
    fn pairing_rejects_non_divisors() {
        let model = make_poincare_ring(3, 1).unwrap();
        let xi = ClassExpr::gen(XI);
        assert!(matches!(
            model.pair_with_curve(&xi, TestCurve::MuStar),
            Err(Error::InvalidParameter(_))
        ));
        let quad = ClassExpr::term(mono(&[(MU, 2)]), rat_int(1));
        assert!(matches!(
            model.pair_with_curve(&quad, TestCurve::MuStar),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn rank_check() {
        assert_eq!(make_base_ring(2, 1).unwrap().ns_generation_check(), 3);
        assert_eq!(make_base_ring(2, 5).unwrap().ns_generation_check(), 3);
        // Degenerate table: δ* row equal to the sum of the other two rows
        // loses a dimension.
        let n = rat_int(1);
        let z = Rational::zero;
        let degenerate = CurvePairing::new([
            [n.clone(), z(), z()],
            [z(), n.clone(), z()],
            [n.clone(), n.clone(), z()],
        ]);
        assert_eq!(degenerate.rank(), 2);
    }

    #[test]
    fn mu_shift_powers_evaluate_to_zero() {
        for g in 2..=6u32 {
            let model = make_base_ring(g, 1).unwrap();
            for n in -3i64..=3 {
                let mu_n = shift_pullback(&ClassExpr::gen(MU), n);
                assert_eq!(
                    model.evaluate_top_number(&mu_n.pow(g)).unwrap(),
                    rat_int(0),
                    "mu_N^g should vanish at g={g}, N={n}"
                );
            }
        }
    }

    fn arb_base_class(max_exp: u32) -> impl Strategy<Value = ClassExpr> {
        let monomial = (0..=max_exp, 0..=max_exp, 0..=max_exp)
            .prop_map(|(a, b, c)| mono(&[(MU, a), (ALPHA, b), (ETA, c)]));
        let coeff = (-12i64..=12, 1i64..=5).prop_map(|(p, q)| rat(p, q));
        proptest::collection::vec((monomial, coeff), 0..5).prop_map(ClassExpr::from_terms)
    }

    fn arb_top_base_class(g: u32) -> impl Strategy<Value = ClassExpr> {
        let monomial = (0..=g).prop_flat_map(move |a| {
            (Just(a), 0..=(g - a))
                .prop_map(move |(a, b)| mono(&[(MU, a), (ALPHA, b), (ETA, g - a - b)]))
        });
        let coeff = (-12i64..=12, 1i64..=5).prop_map(|(p, q)| rat(p, q));
        proptest::collection::vec((monomial, coeff), 1..5).prop_map(ClassExpr::from_terms)
    }

    proptest! {
        #[test]
        fn shift_is_multiplicative(x in arb_base_class(3), y in arb_base_class(3), n in -4i64..=4) {
            prop_assert_eq!(
                shift_pullback(&x.mul(&y), n),
                shift_pullback(&x, n).mul(&shift_pullback(&y, n))
            );
        }

        #[test]
        fn shift_inverts(x in arb_base_class(3), n in -4i64..=4) {
            prop_assert_eq!(shift_pullback(&shift_pullback(&x, n), -n), x);
        }

        #[test]
        fn evaluation_is_shift_invariant(x in arb_top_base_class(4), n in -4i64..=4) {
            let model = make_base_ring(4, 2).unwrap();
            let shifted = shift_pullback(&x, n);
            prop_assert_eq!(
                model.evaluate_top_number(&shifted).unwrap(),
                model.evaluate_top_number(&x).unwrap()
            );
        }

        #[test]
        fn normal_form_is_idempotent_on_models(x in arb_base_class(4)) {
            let model = make_poincare_ring(3, 1).unwrap();
            let nf = model.normal_form(&x).unwrap();
            prop_assert_eq!(model.normal_form(&nf).unwrap(), nf);
        }
    }
}
