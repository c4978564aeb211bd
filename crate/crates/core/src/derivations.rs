//! The mechanized derivations: the theta-coefficient solver, the
//! expansion trick, the boundary ramification numbers, the level analog,
//! the relative-tangent cancellation, and an independent brute-force
//! evaluation oracle used for differential testing.

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::models::{
    make_base_ring, make_poincare_ring, shift_pullback, standard_gen_name, ModelKind, RingModel,
    Section, ALPHA, C_ALPHA, C_ETA, C_MU, C_XI, ETA, MU, XI,
};
use crate::models::xi_component;
use crate::rewrite::GeneratorTable;
use crate::ring::{factorial, rat, rat_int, rat_pow, ClassExpr, GenId, Monomial, Rational};

/// The solved coefficients of the universal theta divisor, together with
/// the two constraint classes re-evaluated at the solution (both must be
/// the zero class).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaSolution {
    pub c_xi: Rational,
    pub c_mu: Rational,
    pub c_alpha: Rational,
    pub c_eta: Rational,
    /// Zero-section restriction minus the shifted infinity-section
    /// restriction, at the solution.
    pub gluing_residual: ClassExpr,
    /// Top evaluation of the g-th power of the infinity-section
    /// restriction, at the solution.
    pub vanishing_residual: ClassExpr,
}

/// One affine-linear equation `Σ coeffs·unknown + constant = 0`.
struct LinearEquation {
    coeffs: BTreeMap<GenId, Rational>,
    constant: Rational,
}

/// Reads a class as a bundle of linear equations, one per geometric
/// monomial: the unknown cofactor of each geometric monomial must vanish.
/// Errors if any cofactor is nonlinear in the unknowns (degree ≥ 2
/// unknown monomials), which would signal a staging bug in the solver.
fn linear_equations_from_class(
    x: &ClassExpr,
    table: &GeneratorTable,
) -> Result<Vec<LinearEquation>> {
    let mut groups: BTreeMap<Monomial, LinearEquation> = BTreeMap::new();
    for (mono, coeff) in x.terms() {
        let (geometric, unknown) = table.split_monomial(mono);
        let eq = groups.entry(geometric).or_insert_with(|| LinearEquation {
            coeffs: BTreeMap::new(),
            constant: Rational::zero(),
        });
        if unknown.is_one() {
            eq.constant = &eq.constant + coeff;
        } else if unknown.exponent_sum() == 1 {
            let var = unknown.generators().next().expect("one unknown");
            let slot = eq.coeffs.entry(var).or_insert_with(Rational::zero);
            *slot = &*slot + coeff;
        } else {
            return Err(Error::Solver(format!(
                "constraint is nonlinear in the unknowns at term {}",
                table.render_monomial(mono)
            )));
        }
    }
    Ok(groups.into_values().collect())
}

/// Gaussian elimination over the rationals. Returns the unknowns the
/// system determines uniquely (a pivot whose row touches no free
/// column); errors on an inconsistent system. Underdetermined systems
/// are fine — the caller supplies more equations in a later stage.
fn solve_determined(
    equations: &[LinearEquation],
    unknowns: &[GenId],
) -> Result<BTreeMap<GenId, Rational>> {
    let cols = unknowns.len();
    let mut rows: Vec<(Vec<Rational>, Rational)> = equations
        .iter()
        .map(|eq| {
            let coeffs = unknowns
                .iter()
                .map(|u| eq.coeffs.get(u).cloned().unwrap_or_else(Rational::zero))
                .collect();
            (coeffs, -eq.constant.clone())
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0;
    for col in 0..cols {
        let Some(found) = (next_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, found);
        let inv = rows[next_row].0[col].clone();
        for c in 0..cols {
            rows[next_row].0[c] = &rows[next_row].0[c] / &inv;
        }
        rows[next_row].1 = &rows[next_row].1 / &inv;
        for r in 0..rows.len() {
            if r != next_row && !rows[r].0[col].is_zero() {
                let factor = rows[r].0[col].clone();
                for c in 0..cols {
                    let delta = &factor * &rows[next_row].0[c];
                    rows[r].0[c] = &rows[r].0[c] - &delta;
                }
                let delta = &factor * &rows[next_row].1;
                rows[r].1 = &rows[r].1 - &delta;
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }
    // A row 0 = c with c ≠ 0 means the constraints contradict each other.
    for (coeffs, rhs) in &rows {
        if coeffs.iter().all(Zero::is_zero) && !rhs.is_zero() {
            return Err(Error::Solver(
                "constraint system is inconsistent".to_string(),
            ));
        }
    }
    let mut solution = BTreeMap::new();
    for (row, col) in pivots {
        let clean = (0..cols).all(|c| c == col || rows[row].0[c].is_zero());
        if clean {
            solution.insert(unknowns[col], rows[row].1.clone());
        }
    }
    Ok(solution)
}

/// Substitutes known coefficient values, leaving other unknowns intact.
fn substitute_unknowns(x: &ClassExpr, values: &BTreeMap<GenId, Rational>) -> ClassExpr {
    x.substitute(|g| values.get(&g).map(|v| ClassExpr::constant(v.clone())))
}

/// The solver's ansatz ξ + c_μ·μ + c_α·α + c_η·η. The ξ-coefficient is
/// fixed to 1 up front: the divisor meets a general fiber of the bundle
/// once, which is an input to this computation, not an output.
fn theta_ansatz() -> ClassExpr {
    ClassExpr::from_terms([
        (Monomial::gen(XI), Rational::one()),
        (Monomial::from_exponents([(C_MU, 1), (MU, 1)]), Rational::one()),
        (
            Monomial::from_exponents([(C_ALPHA, 1), (ALPHA, 1)]),
            Rational::one(),
        ),
        (
            Monomial::from_exponents([(C_ETA, 1), (ETA, 1)]),
            Rational::one(),
        ),
    ])
}

/// Solves for the coefficients of the universal theta divisor on the
/// compactified bundle:
///
/// 1. **Gluing.** The zero- and infinity-section restrictions of the
///    divisor must agree under the fiberwise shift; comparing the α and
///    η cofactors gives linear equations determining c_μ = 1 and
///    c_α = 1/2.
/// 2. **Vanishing.** The top power of the infinity-section restriction
///    evaluates to zero, which after substituting stage 1 is linear in
///    c_η and gives n·g!·(c_η − 1/4) = 0.
///
/// The answer (1, 1, 1/2, 1/4) is independent of g and n.
pub fn solve_theta_coefficients(g: u32, n: u32) -> Result<ThetaSolution> {
    let base = make_base_ring(g, n)?;
    let bundle = make_poincare_ring(g, n)?;
    let d = theta_ansatz();

    let r_zero = bundle.restrict_section(&d, Section::Zero)?;
    let r_inf = bundle.restrict_section(&d, Section::Infinity)?;
    let glue = r_zero.sub(&shift_pullback(&r_inf, 1));

    let unknowns = [C_MU, C_ALPHA, C_ETA];
    let stage_a = linear_equations_from_class(&glue, base.generators())?;
    let mut values = solve_determined(&stage_a, &unknowns)?;

    let r_inf_known = substitute_unknowns(&r_inf, &values);
    let vanishing = base.evaluate_top(&r_inf_known.pow(g))?;
    let stage_b = linear_equations_from_class(&vanishing, base.generators())?;
    values.extend(solve_determined(&stage_b, &unknowns)?);

    let value_of = |id: GenId| -> Result<Rational> {
        values.get(&id).cloned().ok_or_else(|| {
            Error::Solver(format!(
                "coefficient `{}` is not determined by the constraints",
                standard_gen_name(id)
            ))
        })
    };
    let c_mu = value_of(C_MU)?;
    let c_alpha = value_of(C_ALPHA)?;
    let c_eta = value_of(C_ETA)?;

    let gluing_residual = substitute_unknowns(&glue, &values);
    let vanishing_residual = base.evaluate_top(&substitute_unknowns(&r_inf, &values).pow(g))?;
    if !gluing_residual.is_zero() || !vanishing_residual.is_zero() {
        return Err(Error::Solver(
            "solution does not satisfy the constraints it was solved from".to_string(),
        ));
    }

    Ok(ThetaSolution {
        c_xi: Rational::one(),
        c_mu,
        c_alpha,
        c_eta,
        gluing_residual,
        vanishing_residual,
    })
}

/// The universal theta divisor class ξ + μ + α/2 + η/4 of a poincare
/// model.
pub fn theta_class(model: &RingModel) -> Result<ClassExpr> {
    if model.kind() != ModelKind::Poincare {
        return Err(Error::WrongModelKind {
            op: "theta_class",
            expected: "poincare",
            found: model.kind().as_str(),
        });
    }
    Ok(ClassExpr::from_terms([
        (Monomial::gen(XI), rat_int(1)),
        (Monomial::gen(MU), rat_int(1)),
        (Monomial::gen(ALPHA), rat(1, 2)),
        (Monomial::gen(ETA), rat(1, 4)),
    ]))
}

/// The component-`i` theta divisor class of a level model:
/// ξ_i + mμ + (m/2)α + (m/4)η. The m-scalings are the pullback of the
/// base classes along the level cover.
pub fn level_theta_class(model: &RingModel, i: u32) -> Result<ClassExpr> {
    let (ModelKind::Level, Some(m)) = (model.kind(), model.m()) else {
        return Err(Error::WrongModelKind {
            op: "level_theta_class",
            expected: "level",
            found: model.kind().as_str(),
        });
    };
    if i >= m {
        return Err(Error::InvalidParameter(format!(
            "component {i} out of range; the model has components 0..{m}"
        )));
    }
    let m = m as i64;
    Ok(ClassExpr::from_terms([
        (Monomial::gen(xi_component(i)), rat_int(1)),
        (Monomial::gen(MU), rat_int(m)),
        (Monomial::gen(ALPHA), rat(m, 2)),
        (Monomial::gen(ETA), rat(m, 4)),
    ]))
}

/// Closed form of the expansion trick:
/// (ξ + aμ + bα)^{g+1} evaluates to −(n(g+1)!/3)·a^{g−2}·(b³ − (b−1)³).
pub fn trick_t_closed_form(a: &Rational, b: &Rational, g: u32, n: u32) -> Rational {
    let lead = Rational::from_integer(factorial(g + 1) * n) / rat_int(3);
    let b_cubes = rat_pow(b, 3) - rat_pow(&(b - Rational::one()), 3);
    -(lead * rat_pow(a, g - 2) * b_cubes)
}

/// The same number by direct expansion and top evaluation, with no
/// closed form involved.
pub fn trick_t_expansion(a: &Rational, b: &Rational, g: u32, n: u32) -> Result<Rational> {
    let model = make_poincare_ring(g, n)?;
    let x = ClassExpr::from_terms([
        (Monomial::gen(XI), Rational::one()),
        (Monomial::gen(MU), a.clone()),
        (Monomial::gen(ALPHA), b.clone()),
    ]);
    model.evaluate_top_number(&x.pow(g + 1))
}

/// The expansion trick: returns the closed form after checking it
/// against the direct expansion, exactly.
pub fn trick_t(a: &Rational, b: &Rational, g: u32, n: u32) -> Result<Rational> {
    if g < 2 {
        return Err(Error::InvalidParameter(format!(
            "trick T needs g at least 2, got g={g}"
        )));
    }
    let closed = trick_t_closed_form(a, b, g, n);
    let expanded = trick_t_expansion(a, b, g, n)?;
    if closed != expanded {
        return Err(Error::Inconsistency(format!(
            "trick T closed form disagrees with the expansion at a={a}, b={b}, g={g}, n={n}"
        )));
    }
    Ok(closed)
}

/// The expected boundary ramification number n(g+1)!/6.
pub fn mumford_expected(g: u32, n: u32) -> Rational {
    Rational::from_integer(factorial(g + 1) * n) / rat_int(6)
}

/// The boundary contribution to the ramification divisor coefficient:
/// the (g+1)-st self-intersection of the universal theta divisor on the
/// compactified bundle. Asserts the closed form n(g+1)!/6.
pub fn mumford_boundary_number(g: u32, n: u32) -> Result<Rational> {
    let model = make_poincare_ring(g, n)?;
    let d = theta_class(&model)?;
    let value = model.evaluate_top_number(&model.pow_reduced(&d, g + 1)?)?;
    let expected = mumford_expected(g, n);
    if value != expected {
        return Err(Error::Inconsistency(format!(
            "boundary number at g={g}, n={n} is {value}, expected {expected}"
        )));
    }
    Ok(value)
}

/// The expected level-m branch number m^{g+1}·n·(g+1)!/6.
pub fn level_branch_expected(g: u32, n: u32, m: u32) -> Rational {
    rat_pow(&rat_int(m as i64), g + 1) * mumford_expected(g, n)
}

/// One component's contribution to the level-m branch number:
/// the (g+1)-st self-intersection of the component-`i` theta class,
/// m^g·n·(g+1)!/6 independently of `i`.
pub fn level_component_number(model: &RingModel, i: u32) -> Result<Rational> {
    let d = level_theta_class(model, i)?;
    model.evaluate_top_number(&model.pow_reduced(&d, model.g() + 1)?)
}

/// The level-m branch number: the sum over the m boundary components of
/// the (g+1)-st self-intersections of their theta classes. Asserts the
/// closed form m^{g+1}·n·(g+1)!/6.
pub fn level_branch_number(g: u32, n: u32, m: u32) -> Result<Rational> {
    let model = crate::models::make_level_ring(g, n, m)?;
    let mut total = Rational::zero();
    for i in 0..m {
        total += level_component_number(&model, i)?;
    }
    let expected = level_branch_expected(g, n, m);
    if total != expected {
        return Err(Error::Inconsistency(format!(
            "level branch number at g={g}, n={n}, m={m} is {total}, expected {expected}"
        )));
    }
    Ok(total)
}

/// Total Chern class of the relative tangent sheaf of the compactified
/// bundle over the curve: expands (1 + ξ)²·(1 + α(1 − ξ)) and reduces
/// degree by degree. The degree-2 part must cancel to 0 under ξ² = −αξ
/// — that cancellation is what reduces the ramification computation to
/// a pure self-intersection — so the result is 1 + (2ξ + α). The
/// identity is degree-bounded: the twisting expansion carries meaning
/// through degree 2, and higher parts are not consulted.
pub fn chern_relative_tangent(model: &RingModel) -> Result<ClassExpr> {
    if model.kind() != ModelKind::Poincare {
        return Err(Error::WrongModelKind {
            op: "chern_relative_tangent",
            expected: "poincare",
            found: model.kind().as_str(),
        });
    }
    let one = ClassExpr::one();
    let xi = ClassExpr::gen(XI);
    let alpha = ClassExpr::gen(ALPHA);
    let product = one
        .add(&xi)
        .pow(2)
        .mul(&one.add(&alpha.mul(&one.sub(&xi))));
    let table = model.generators();
    let degree_0 = table.homogeneous_part(&product, 0);
    let degree_1 = model.system().normal_form(&table.homogeneous_part(&product, 1));
    let degree_2 = model.system().normal_form(&table.homogeneous_part(&product, 2));
    if !degree_2.is_zero() {
        return Err(Error::Inconsistency(format!(
            "degree-2 part of the relative tangent Chern class did not cancel: {}",
            model.render(&degree_2)
        )));
    }
    Ok(degree_0.add(&degree_1))
}

/// Deterministic seed from the model descriptor and the canonical form
/// of the input (FNV-1a over the term data).
fn oracle_seed(model: &RingModel, x: &ClassExpr) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(model.descriptor().as_bytes());
    for (mono, coeff) in x.terms() {
        for (g, e) in mono.iter() {
            eat(&g.0.to_le_bytes());
            eat(&e.to_le_bytes());
        }
        eat(&coeff.numer().to_signed_bytes_le());
        eat(&[0xfe]);
        eat(&coeff.denom().to_signed_bytes_le());
        eat(&[0xff]);
    }
    h
}

/// Evaluates a top-degree, unknown-free class by a deliberately
/// different route from [`RingModel::evaluate_top`]: each input term is
/// reduced on its own with relation applications chosen in
/// pseudo-random order and no dimension truncation, then looked up in
/// the evaluation table and summed. Agreement with `evaluate_top` is
/// the engine's differential test.
pub fn brute_force_oracle(model: &RingModel, x: &ClassExpr) -> Result<Rational> {
    let seed = oracle_seed(model, x);
    brute_force_oracle_seeded(model, x, seed)
}

/// [`brute_force_oracle`] with the reduction order pinned by `seed`.
pub fn brute_force_oracle_seeded(model: &RingModel, x: &ClassExpr, seed: u64) -> Result<Rational> {
    model.check_alphabet(x)?;
    for (mono, _) in x.terms() {
        for g in mono.generators() {
            if matches!(g, C_XI | C_MU | C_ALPHA | C_ETA) {
                return Err(Error::InvalidParameter(
                    "oracle input must not contain unknowns".to_string(),
                ));
            }
        }
        let degree = model.generators().monomial_degree(mono);
        if degree != model.dimension() {
            return Err(Error::DegreeMismatch {
                expected: model.dimension(),
                found: degree,
            });
        }
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let rules = model.system().rules();
    let mut terms: Vec<(Monomial, Rational)> = x
        .terms()
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    // Visit the input terms in shuffled order.
    for k in (1..terms.len()).rev() {
        let j = rng.gen_range(0..=k);
        terms.swap(k, j);
    }

    let mut total = Rational::zero();
    for (mono, coeff) in terms {
        let mut work = vec![(mono, coeff)];
        loop {
            let candidates: Vec<(usize, Vec<usize>)> = work
                .iter()
                .enumerate()
                .filter_map(|(i, (m, _))| {
                    let applicable: Vec<usize> = rules
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| r.pattern().divides(m))
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
            let rule = &rules[applicable[rng.gen_range(0..applicable.len())]];
            let (m, c) = work.swap_remove(*wi);
            let quot = m.checked_div(rule.pattern()).expect("pattern divides");
            for (rm, rc) in rule.replacement().terms() {
                work.push((rm.mul(&quot), rc * &c));
            }
        }
        for (m, c) in work {
            let value = model.top_table_value(&m);
            if !value.is_zero() {
                total += c * value;
            }
        }
    }
    Ok(total)
}
