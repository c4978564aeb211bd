//! Expression and model-descriptor parsing for the CLI.
//!
//! The expression grammar is deliberately small and unambiguous, parsed
//! by recursive descent with no implicit multiplication:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' nat)?
//! atom     := rational | ident | '(' expr ')'
//! rational := int ('/' posint)?
//! ```
//!
//! Identifiers resolve against the active model's generator table
//! (`mu`, `alpha`, `eta`, `xi`, `xi_0`…), plus the named divisor
//! classes: `D` (the universal theta class of a poincare model), `D_i`
//! (component theta classes of a level model), and `P0` / `Pinf` (the
//! section classes).

use num::bigint::BigInt;
use num::{ToPrimitive, Zero};

use crate::derivations::{level_theta_class, theta_class};
use crate::error::{Error, Result};
use crate::models::{
    make_base_ring, make_level_ring, make_poincare_ring, ModelKind, RingModel, Section,
};
use crate::ring::{ClassExpr, GenId, Rational};

/// The named divisor classes the grammar can mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConstant {
    /// `D`: the universal theta class of the poincare model.
    Theta,
    /// `D_i`: the component-i theta class of a level model.
    ThetaComponent(u32),
    /// `P0`: the zero-section class ξ + α.
    SectionZero,
    /// `Pinf`: the infinity-section class ξ.
    SectionInfinity,
}

/// Parsed expression tree, already resolved against a model's alphabet.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Sum(Box<ExprAst>, Box<ExprAst>),
    Difference(Box<ExprAst>, Box<ExprAst>),
    Product(Box<ExprAst>, Box<ExprAst>),
    Power(Box<ExprAst>, u32),
    Literal(Rational),
    Generator(GenId),
    Constant(NamedConstant),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let value: BigInt = digits.parse().expect("digits parse as an integer");
            out.push((Tok::Number(value), offset));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut name = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    name.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(name), offset));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(Error::Syntax {
                    offset,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        out.push((tok, offset));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    model: &'a RingModel,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    node = ExprAst::Sum(Box::new(node), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    node = ExprAst::Difference(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut node = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            node = ExprAst::Product(Box::new(node), Box::new(self.factor()?));
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let exp = self.exponent()?;
            return Ok(ExprAst::Power(Box::new(base), exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.bump() {
            Some(Tok::Number(n)) => n
                .to_u32()
                .ok_or_else(|| self.syntax("exponent does not fit in 32 bits")),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("exponent must be a non-negative integer literal"))
            }
        }
    }

    /// An unsigned rational literal, the numerator already consumed.
    fn rational_tail(&mut self, numerator: BigInt) -> Result<Rational> {
        if self.peek() != Some(&Tok::Slash) {
            return Ok(Rational::from_integer(numerator));
        }
        self.bump();
        match self.bump() {
            Some(Tok::Number(d)) if !d.is_zero() => Ok(Rational::new(numerator, d)),
            Some(Tok::Number(_)) => {
                self.pos -= 1;
                Err(self.syntax("denominator must be positive"))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.syntax("expected a denominator after `/`"))
            }
        }
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Number(n)) => Ok(ExprAst::Literal(self.rational_tail(n)?)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Number(n)) => Ok(ExprAst::Literal(-self.rational_tail(n)?)),
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    Err(self.syntax("expected a number after unary `-`"))
                }
            },
            Some(Tok::Ident(name)) => self.resolve(&name, offset),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        Err(self.syntax("expected `)`"))
                    }
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(Error::Syntax {
                    offset,
                    message: "expected a number, identifier, or `(`".to_string(),
                })
            }
        }
    }

    fn resolve(&self, name: &str, _offset: usize) -> Result<ExprAst> {
        if let Some(entry) = self.model.generators().by_name(name) {
            return Ok(ExprAst::Generator(entry.id));
        }
        let kind = self.model.kind();
        match name {
            "D" if kind == ModelKind::Poincare => {
                return Ok(ExprAst::Constant(NamedConstant::Theta))
            }
            "P0" if kind == ModelKind::Poincare => {
                return Ok(ExprAst::Constant(NamedConstant::SectionZero))
            }
            "Pinf" if kind == ModelKind::Poincare => {
                return Ok(ExprAst::Constant(NamedConstant::SectionInfinity))
            }
            _ => {}
        }
        if kind == ModelKind::Level {
            if let Some(index) = name.strip_prefix("D_").and_then(|s| s.parse::<u32>().ok()) {
                if index < self.model.m().unwrap_or(0) {
                    return Ok(ExprAst::Constant(NamedConstant::ThetaComponent(index)));
                }
            }
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            model: self.model.descriptor(),
        })
    }
}

/// Parses `src` into an AST resolved against `model`.
pub fn parse_expr_ast(src: &str, model: &RingModel) -> Result<ExprAst> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: src.len(),
        model,
    };
    let ast = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(Error::Syntax {
            offset: parser.offset(),
            message: "unexpected trailing input (implicit multiplication is not supported)"
                .to_string(),
        });
    }
    Ok(ast)
}

/// Lowers a resolved AST to a class, expanding named divisor classes.
pub fn lower_ast(ast: &ExprAst, model: &RingModel) -> Result<ClassExpr> {
    Ok(match ast {
        ExprAst::Sum(a, b) => lower_ast(a, model)?.add(&lower_ast(b, model)?),
        ExprAst::Difference(a, b) => lower_ast(a, model)?.sub(&lower_ast(b, model)?),
        ExprAst::Product(a, b) => lower_ast(a, model)?.mul(&lower_ast(b, model)?),
        ExprAst::Power(a, k) => lower_ast(a, model)?.pow(*k),
        ExprAst::Literal(r) => ClassExpr::constant(r.clone()),
        ExprAst::Generator(id) => ClassExpr::gen(*id),
        ExprAst::Constant(NamedConstant::Theta) => theta_class(model)?,
        ExprAst::Constant(NamedConstant::ThetaComponent(i)) => level_theta_class(model, *i)?,
        ExprAst::Constant(NamedConstant::SectionZero) => model.section_class(Section::Zero)?,
        ExprAst::Constant(NamedConstant::SectionInfinity) => {
            model.section_class(Section::Infinity)?
        }
    })
}

/// Parses and lowers in one step.
pub fn parse_expr(src: &str, model: &RingModel) -> Result<ClassExpr> {
    lower_ast(&parse_expr_ast(src, model)?, model)
}

/// Parses a model descriptor `kind(g=G,n=N[,m=M])` and constructs the
/// model.
pub fn parse_model_descriptor(src: &str) -> Result<RingModel> {
    let s = src.trim();
    let shape_err = || {
        Error::InvalidParameter(format!(
            "model descriptor must look like base(g=..,n=..), poincare(g=..,n=..), or level(g=..,n=..,m=..); got `{s}`"
        ))
    };
    let open = s.find('(').ok_or_else(shape_err)?;
    if !s.ends_with(')') {
        return Err(shape_err());
    }
    let kind = &s[..open];
    let body = &s[open + 1..s.len() - 1];

    let mut g: Option<u32> = None;
    let mut n: Option<u32> = None;
    let mut m: Option<u32> = None;
    for part in body.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(shape_err)?;
        let value: u32 = value.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "model parameter `{}` must be a non-negative integer, got `{}`",
                key.trim(),
                value.trim()
            ))
        })?;
        let slot = match key.trim() {
            "g" => &mut g,
            "n" => &mut n,
            "m" => &mut m,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown model parameter `{other}`"
                )))
            }
        };
        if slot.replace(value).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate model parameter `{}`",
                key.trim()
            )));
        }
    }

    let need = |v: Option<u32>, name: &str| {
        v.ok_or_else(|| Error::InvalidParameter(format!("model descriptor is missing `{name}`")))
    };
    match kind {
        "base" | "poincare" if m.is_some() => Err(Error::InvalidParameter(format!(
            "`m` is only meaningful for level models, not {kind}"
        ))),
        "base" => make_base_ring(need(g, "g")?, need(n, "n")?),
        "poincare" => make_poincare_ring(need(g, "g")?, need(n, "n")?),
        "level" => make_level_ring(need(g, "g")?, need(n, "n")?, need(m, "m")?),
        other => Err(Error::InvalidParameter(format!(
            "unknown model kind `{other}` (expected base, poincare, or level)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ALPHA, ETA, MU, XI};
    use crate::ring::{rat, rat_int, Monomial};
    use proptest::prelude::*;

    #[test]
    fn lowers_monomials() {
        let model = make_base_ring(4, 2).unwrap();
        let x = parse_expr("eta*mu^3", &model).unwrap();
        assert_eq!(
            x,
            ClassExpr::term(Monomial::from_exponents([(ETA, 1), (MU, 3)]), rat_int(1))
        );
    }

    #[test]
    fn named_classes_expand() {
        let model = make_poincare_ring(4, 1).unwrap();
        let spelled = parse_expr("(xi + mu + 1/2*alpha + 1/4*eta)^5", &model).unwrap();
        let named = parse_expr("D^5", &model).unwrap();
        assert_eq!(spelled, named);
        let p0 = parse_expr("P0", &model).unwrap();
        assert_eq!(
            p0,
            ClassExpr::gen(XI).add(&ClassExpr::gen(ALPHA))
        );
        let sections = parse_expr("P0*Pinf", &model).unwrap();
        assert!(model.normal_form(&sections).unwrap().is_zero());
    }

    #[test]
    fn level_component_classes() {
        let model = make_level_ring(3, 1, 2).unwrap();
        let d0 = parse_expr("D_0", &model).unwrap();
        assert_eq!(
            d0,
            crate::derivations::level_theta_class(&model, 0).unwrap()
        );
        assert!(matches!(
            parse_expr("D_2", &model),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("xi_2^2", &model),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn unknown_identifiers_are_model_sensitive() {
        let base = make_base_ring(4, 1).unwrap();
        assert!(matches!(
            parse_expr("xi", &base),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("D", &base),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn precedence_is_power_then_product_then_sum() {
        let model = make_base_ring(4, 1).unwrap();
        let flat = parse_expr("mu + alpha*eta^2", &model).unwrap();
        let nested = parse_expr("mu + (alpha*(eta^2))", &model).unwrap();
        assert_eq!(flat, nested);
        let diff = parse_expr("mu - alpha - eta", &model).unwrap();
        let nested_diff = parse_expr("(mu - alpha) - eta", &model).unwrap();
        assert_eq!(diff, nested_diff);
    }

    #[test]
    fn rational_literals() {
        let model = make_base_ring(4, 1).unwrap();
        assert_eq!(
            parse_expr("3/6", &model).unwrap(),
            ClassExpr::constant(rat(1, 2))
        );
        assert_eq!(
            parse_expr("-3/6 + mu - mu", &model).unwrap(),
            ClassExpr::constant(rat(-1, 2))
        );
        assert!(matches!(
            parse_expr("1/0", &model),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let model = make_base_ring(4, 1).unwrap();
        // Implicit multiplication.
        match parse_expr("2mu", &model) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        // Negative exponent.
        assert!(matches!(
            parse_expr("mu^-1", &model),
            Err(Error::Syntax { .. })
        ));
        // Unbalanced parenthesis.
        assert!(matches!(
            parse_expr("(mu + eta", &model),
            Err(Error::Syntax { .. })
        ));
        // Stray character.
        match parse_expr("mu $ eta", &model) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for text in ["base(g=4,n=1)", "poincare(g=2,n=3)", "level(g=3,n=1,m=2)"] {
            let model = parse_model_descriptor(text).unwrap();
            assert_eq!(model.descriptor(), text);
        }
        let spaced = parse_model_descriptor(" base( g = 4 , n = 1 ) ").unwrap();
        assert_eq!(spaced.descriptor(), "base(g=4,n=1)");
    }

    #[test]
    fn descriptor_errors() {
        for bad in [
            "base",
            "base(g=4)",
            "base(n=1)",
            "base(g=4,n=1,m=2)",
            "level(g=3,n=1)",
            "widget(g=3,n=1)",
            "base(g=x,n=1)",
            "base(g=4,g=5,n=1)",
            "base(g=4,q=1)",
        ] {
            assert!(
                matches!(parse_model_descriptor(bad), Err(Error::InvalidParameter(_))),
                "descriptor `{bad}` should be rejected"
            );
        }
        // Parameter bounds come from the constructors.
        assert!(parse_model_descriptor("base(g=1,n=1)").is_err());
        assert!(parse_model_descriptor("base(g=4,n=0)").is_err());
    }

    fn arb_poincare_class() -> impl Strategy<Value = ClassExpr> {
        use crate::models::{C_ALPHA, C_ETA, C_MU, C_XI};
        let monomial = proptest::collection::vec(
            prop_oneof![
                Just(MU),
                Just(ALPHA),
                Just(ETA),
                Just(XI),
                Just(C_XI),
                Just(C_MU),
                Just(C_ALPHA),
                Just(C_ETA),
            ]
            .prop_flat_map(|g| (Just(g), 1u32..=3)),
            0..4,
        )
        .prop_map(Monomial::from_exponents);
        let coeff = (-30i64..=30, 1i64..=9).prop_map(|(p, q)| rat(p, q));
        proptest::collection::vec((monomial, coeff), 0..5).prop_map(ClassExpr::from_terms)
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(x in arb_poincare_class()) {
            let model = make_poincare_ring(4, 1).unwrap();
            let rendered = model.render(&x);
            let back = parse_expr(&rendered, &model).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
