//! Exact sparse polynomial algebra over an abstract generator alphabet.
//!
//! Everything downstream (rewriting, evaluation, the derivations) works
//! with [`ClassExpr`]: a finite rational linear combination of
//! [`Monomial`]s in interned generators. Coefficients are
//! arbitrary-precision rationals, so every equality in the engine is
//! exact; there is no floating point anywhere.
//!
//! Canonical form is structural: a monomial never stores a zero exponent
//! and a class never stores a zero coefficient, so `==` on either type is
//! equality of canonical forms.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational. Always reduced, denominator
/// positive; both are maintained by the underlying representation.
pub type Rational = BigRational;

/// `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An integer as a [`Rational`].
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// `k!` as an exact integer.
pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `base^exp` for rationals, with `0^0 = 1`.
pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    num::pow(base.clone(), exp as usize)
}

/// Renders a rational as `p` or `p/q` (lowest terms, sign on the
/// numerator).
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` with optional leading sign. Inverse of
/// [`render_rational`] on its image.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Syntax {
        offset: 0,
        message: format!("expected a rational number, got `{s}`"),
    };
    let (num_str, den_str) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let num: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    let den: BigInt = match den_str {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Interned generator identifier. The algebra layer treats ids as opaque;
/// a model's generator table gives them names and degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub u32);

/// A product of generator powers, stored as a sparse exponent vector
/// sorted by generator id. Zero exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: Vec<(GenId, u32)>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    /// A single generator to the first power.
    pub fn gen(id: GenId) -> Self {
        Monomial::power(id, 1)
    }

    /// `id^exp`; the empty product if `exp == 0`.
    pub fn power(id: GenId, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial {
                exps: vec![(id, exp)],
            }
        }
    }

    /// Builds a monomial from arbitrary (id, exponent) pairs: duplicates
    /// are merged, zeros dropped, order normalized.
    pub fn from_exponents(pairs: impl IntoIterator<Item = (GenId, u32)>) -> Self {
        let mut map: BTreeMap<GenId, u32> = BTreeMap::new();
        for (id, e) in pairs {
            if e > 0 {
                *map.entry(id).or_insert(0) += e;
            }
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent of `id`, zero if absent.
    pub fn exponent(&self, id: GenId) -> u32 {
        self.exps
            .iter()
            .find(|(g, _)| *g == id)
            .map_or(0, |(_, e)| *e)
    }

    /// The stored (generator, exponent) pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (GenId, u32)> + '_ {
        self.exps.iter().copied()
    }

    /// Generators occurring with positive exponent.
    pub fn generators(&self) -> impl Iterator<Item = GenId> + '_ {
        self.exps.iter().map(|(g, _)| *g)
    }

    /// Sum of all exponents, regardless of generator grading.
    pub fn exponent_sum(&self) -> u32 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    /// Product of two monomials (exponents add).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        // Merge two sorted exponent vectors.
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (ga, ea) = self.exps[i];
            let (gb, eb) = other.exps[j];
            match ga.cmp(&gb) {
                std::cmp::Ordering::Less => {
                    out.push((ga, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((gb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((ga, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// True if `self` divides `other` (every exponent is covered).
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|(g, e)| other.exponent(*g) >= *e)
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.exps.len());
        for (g, e) in &self.exps {
            let d = other.exponent(*g);
            if d > *e {
                return None;
            }
            if *e - d > 0 {
                out.push((*g, *e - d));
            }
        }
        if other.exps.iter().any(|(g, e)| self.exponent(*g) < *e) {
            return None;
        }
        Some(Monomial { exps: out })
    }

    /// Least common multiple (exponent-wise max).
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<GenId, u32> = self.exps.iter().copied().collect();
        for (g, e) in &other.exps {
            let slot = map.entry(*g).or_insert(0);
            *slot = (*slot).max(*e);
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    /// True if the two monomials mention a common generator.
    pub fn shares_generator(&self, other: &Monomial) -> bool {
        self.exps.iter().any(|(g, _)| other.exponent(*g) > 0)
    }
}

/// A finite rational linear combination of monomials: the universal
/// currency of the engine. The map never stores zero coefficients, so
/// `==` is equality of canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl ClassExpr {
    pub fn zero() -> Self {
        ClassExpr {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        ClassExpr::constant(Rational::one())
    }

    /// A constant class.
    pub fn constant(c: Rational) -> Self {
        ClassExpr::term(Monomial::one(), c)
    }

    /// A single generator with coefficient 1.
    pub fn gen(id: GenId) -> Self {
        ClassExpr::term(Monomial::gen(id), Rational::one())
    }

    /// A single term. Canonicalizes: a zero coefficient yields zero.
    pub fn term(mono: Monomial, coeff: Rational) -> Self {
        let mut out = ClassExpr::zero();
        out.add_term(mono, coeff);
        out
    }

    /// Accumulates arbitrary (monomial, coefficient) pairs.
    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut out = ClassExpr::zero();
        for (m, c) in pairs {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The stored terms in monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `mono`, zero if absent.
    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `coeff * mono` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &ClassExpr) -> ClassExpr {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ClassExpr) -> ClassExpr {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> ClassExpr {
        ClassExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> ClassExpr {
        if c.is_zero() {
            return ClassExpr::zero();
        }
        ClassExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &ClassExpr) -> ClassExpr {
        let mut out = ClassExpr::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `self^k` by repeated squaring; `k = 0` gives 1.
    pub fn pow(&self, k: u32) -> ClassExpr {
        let mut result = ClassExpr::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Substitutes classes for generators. `image(g)` returning `None`
    /// leaves `g` fixed; returning `Some(expr)` replaces every occurrence
    /// of `g^e` by `expr^e`. The substitution is a ring homomorphism.
    pub fn substitute<F>(&self, image: F) -> ClassExpr
    where
        F: Fn(GenId) -> Option<ClassExpr>,
    {
        let mut out = ClassExpr::zero();
        for (mono, coeff) in self.terms() {
            let mut term = ClassExpr::constant(coeff.clone());
            for (g, e) in mono.iter() {
                let factor = match image(g) {
                    Some(expr) => expr.pow(e),
                    None => ClassExpr::term(Monomial::power(g, e), Rational::one()),
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }

    /// `Some(c)` if the class is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl std::ops::Add for &ClassExpr {
    type Output = ClassExpr;
    fn add(self, rhs: &ClassExpr) -> ClassExpr {
        ClassExpr::add(self, rhs)
    }
}

impl std::ops::Sub for &ClassExpr {
    type Output = ClassExpr;
    fn sub(self, rhs: &ClassExpr) -> ClassExpr {
        ClassExpr::sub(self, rhs)
    }
}

impl std::ops::Mul for &ClassExpr {
    type Output = ClassExpr;
    fn mul(self, rhs: &ClassExpr) -> ClassExpr {
        ClassExpr::mul(self, rhs)
    }
}

impl std::ops::Neg for &ClassExpr {
    type Output = ClassExpr;
    fn neg(self) -> ClassExpr {
        ClassExpr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: GenId = GenId(0);
    const B: GenId = GenId(1);
    const C: GenId = GenId(2);

    #[test]
    fn rational_helpers() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(render_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(render_rational(&rat_int(7)), "7");
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(rat_pow(&rat(0, 1), 0), rat_int(1));
        assert_eq!(rat_pow(&rat(-2, 3), 3), rat(-8, 27));
        assert_eq!(parse_rational("-9/12").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("14").unwrap(), rat_int(14));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn monomial_canonical_form() {
        let m = Monomial::from_exponents([(B, 2), (A, 0), (A, 1), (B, 1)]);
        assert_eq!(m, Monomial::from_exponents([(A, 1), (B, 3)]));
        assert_eq!(m.exponent(A), 1);
        assert_eq!(m.exponent(B), 3);
        assert_eq!(m.exponent(C), 0);
        assert_eq!(m.exponent_sum(), 4);
        assert!(Monomial::power(A, 0).is_one());
    }

    #[test]
    fn monomial_divisibility() {
        let ab = Monomial::from_exponents([(A, 1), (B, 2)]);
        let b = Monomial::power(B, 1);
        assert!(b.divides(&ab));
        assert!(!ab.divides(&b));
        assert_eq!(
            ab.checked_div(&b).unwrap(),
            Monomial::from_exponents([(A, 1), (B, 1)])
        );
        assert_eq!(b.checked_div(&ab), None);
        let ac = Monomial::from_exponents([(A, 2), (C, 1)]);
        assert_eq!(
            ab.lcm(&ac),
            Monomial::from_exponents([(A, 2), (B, 2), (C, 1)])
        );
        assert!(ab.shares_generator(&ac));
        assert!(!b.shares_generator(&ac));
    }

    #[test]
    fn class_cancellation() {
        let x = ClassExpr::gen(A);
        let y = x.sub(&x);
        assert!(y.is_zero());
        assert_eq!(y.num_terms(), 0);
        // (a + b)(a - b) = a^2 - b^2
        let sum = ClassExpr::gen(A).add(&ClassExpr::gen(B));
        let diff = ClassExpr::gen(A).sub(&ClassExpr::gen(B));
        let prod = sum.mul(&diff);
        let expected = ClassExpr::from_terms([
            (Monomial::power(A, 2), rat_int(1)),
            (Monomial::power(B, 2), rat_int(-1)),
        ]);
        assert_eq!(prod, expected);
    }

    #[test]
    fn constant_detection() {
        assert_eq!(ClassExpr::zero().as_constant(), Some(rat_int(0)));
        assert_eq!(ClassExpr::constant(rat(3, 2)).as_constant(), Some(rat(3, 2)));
        assert_eq!(ClassExpr::gen(A).as_constant(), None);
    }

    #[test]
    fn substitution_is_a_homomorphism_on_a_sample() {
        // a -> a + b, fix the rest; check on (a + c)^2.
        let x = ClassExpr::gen(A).add(&ClassExpr::gen(C)).pow(2);
        let image = |g: GenId| {
            (g == A).then(|| ClassExpr::gen(A).add(&ClassExpr::gen(B)))
        };
        let lhs = x.substitute(image);
        let rhs = ClassExpr::gen(A)
            .add(&ClassExpr::gen(B))
            .add(&ClassExpr::gen(C))
            .pow(2);
        assert_eq!(lhs, rhs);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(p, q)| rat(p, q))
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        (0u32..=3, 0u32..=3, 0u32..=2).prop_map(|(a, b, c)| {
            Monomial::from_exponents([(A, a), (B, b), (C, c)])
        })
    }

    fn arb_class() -> impl Strategy<Value = ClassExpr> {
        proptest::collection::vec((arb_monomial(), arb_rational()), 0..5)
            .prop_map(ClassExpr::from_terms)
    }

    proptest! {
        #[test]
        fn add_commutes(x in arb_class(), y in arb_class()) {
            prop_assert_eq!(x.add(&y), y.add(&x));
        }

        #[test]
        fn mul_commutes(x in arb_class(), y in arb_class()) {
            prop_assert_eq!(x.mul(&y), y.mul(&x));
        }

        #[test]
        fn mul_distributes(x in arb_class(), y in arb_class(), z in arb_class()) {
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        }

        #[test]
        fn mul_associates(x in arb_class(), y in arb_class(), z in arb_class()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn sub_is_add_neg(x in arb_class(), y in arb_class()) {
            prop_assert_eq!(x.sub(&y), x.add(&y.neg()));
        }

        #[test]
        fn pow_adds_exponents(x in arb_class(), a in 0u32..4, b in 0u32..4) {
            prop_assert_eq!(x.pow(a).mul(&x.pow(b)), x.pow(a + b));
        }

        #[test]
        fn rational_render_round_trip(r in arb_rational()) {
            prop_assert_eq!(parse_rational(&render_rational(&r)).unwrap(), r);
        }

        #[test]
        fn monomial_mul_matches_exponent_sums(a in arb_monomial(), b in arb_monomial()) {
            let p = a.mul(&b);
            for g in [A, B, C] {
                prop_assert_eq!(p.exponent(g), a.exponent(g) + b.exponent(g));
            }
            prop_assert!(a.divides(&p));
            prop_assert_eq!(p.checked_div(&a).unwrap(), b);
        }
    }
}
