//! Expression language naming polytopes on the command line.
//!
//! Grammar, with all four infix operators at one precedence level and
//! left-associative:
//!
//! ```text
//! expr    := term (op term)*            op ∈ {join, cart, dsum, topo}
//! term    := primary ('^' int)*
//! primary := atom | unary '(' expr ')' | '(' expr ')'
//! atom    := point | edge | gon '(' int ')' | simplex '(' int ')'
//!          | cube '(' int ')' | cross '(' int ')' | torus '(' int ',' int ')'
//! unary   := pyr | prism | pri | bipyr | dual
//! ```
//!
//! `^ k` is the k-th cartesian power, so `edge ^ 3` names the 3-cube;
//! powers under the other operators are spelled out with the infix form.
//! Parameter ranges are enforced while parsing.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

use crate::catalog;
use crate::poset::Polytope;
use crate::products::{self, ProductKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Point,
    Edge,
    Gon(usize),
    Simplex(i32),
    Cube(i32),
    Cross(i32),
    Torus(usize, i32),
    Pyr(Box<Expr>),
    Prism(Box<Expr>),
    Bipyr(Box<Expr>),
    Dual(Box<Expr>),
    Product(ProductKind, Box<Expr>, Box<Expr>),
    Power(Box<Expr>, usize),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Right operands and power bases print parenthesized when they
        // are products, so output re-parses to the same tree under
        // left associativity.
        fn tight(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if matches!(e, Expr::Product(..)) {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Point => write!(f, "point"),
            Expr::Edge => write!(f, "edge"),
            Expr::Gon(p) => write!(f, "gon({p})"),
            Expr::Simplex(n) => write!(f, "simplex({n})"),
            Expr::Cube(n) => write!(f, "cube({n})"),
            Expr::Cross(n) => write!(f, "cross({n})"),
            Expr::Torus(p, d) => write!(f, "torus({p},{d})"),
            Expr::Pyr(e) => write!(f, "pyr({e})"),
            Expr::Prism(e) => write!(f, "prism({e})"),
            Expr::Bipyr(e) => write!(f, "bipyr({e})"),
            Expr::Dual(e) => write!(f, "dual({e})"),
            Expr::Product(kind, a, b) => {
                write!(f, "{a} {} ", kind.name())?;
                tight(b, f)
            }
            Expr::Power(e, k) => {
                tight(e, f)?;
                write!(f, " ^ {k}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    /// The text does not match the grammar; position is a byte offset.
    Syntax { position: usize, message: String },
    /// A parameter is outside its documented range.
    Range { message: String },
    /// The expression parses but does not build a polytope.
    Eval { message: String },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Syntax { position, message } => {
                write!(f, "syntax error at byte {position}: {message}")
            }
            ExprError::Range { message } => write!(f, "parameter out of range: {message}"),
            ExprError::Eval { message } => write!(f, "cannot build polytope: {message}"),
        }
    }
}

impl Error for ExprError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Caret,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        match bytes[i] {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, start));
                i += 1;
            }
            b'^' => {
                out.push((Tok::Caret, start));
                i += 1;
            }
            b'a'..=b'z' => {
                while i < bytes.len() && bytes[i].is_ascii_lowercase() {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value = text[start..i].parse::<u64>().map_err(|_| ExprError::Range {
                    message: format!("number `{}` is too large", &text[start..i]),
                })?;
                out.push((Tok::Int(value), start));
            }
            c => {
                return Err(ExprError::Syntax {
                    position: start,
                    message: format!("unexpected character `{}`", c as char),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, at)| at)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += t.is_some() as usize;
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { position: self.here(), message: message.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn int(&mut self, what: &str) -> Result<u64, ExprError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        while let Some(Tok::Ident(name)) = self.peek() {
            let Some(kind) = ProductKind::parse(name) else {
                break;
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = Expr::Product(kind, Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let k = self.int("an exponent after `^`")?;
            if k == 0 {
                return Err(ExprError::Range {
                    message: "powers start at 1".into(),
                });
            }
            base = Expr::Power(Box::new(base), k as usize);
        }
        Ok(base)
    }

    fn rank_arg(&mut self, name: &str, least: i64) -> Result<i32, ExprError> {
        self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
        let v = self.int("a rank parameter")?;
        self.expect(Tok::RParen, "`)`")?;
        let v = i32::try_from(v).ok().filter(|&v| i64::from(v) >= least);
        v.ok_or_else(|| ExprError::Range {
            message: format!("{name} needs a rank of at least {least}"),
        })
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "point" => Ok(Expr::Point),
                "edge" => Ok(Expr::Edge),
                "gon" => {
                    self.expect(Tok::LParen, "`(` after `gon`")?;
                    let p = self.int("a side count")?;
                    self.expect(Tok::RParen, "`)`")?;
                    if p < 2 {
                        return Err(ExprError::Range {
                            message: "gon needs at least 2 sides".into(),
                        });
                    }
                    Ok(Expr::Gon(p as usize))
                }
                "simplex" => Ok(Expr::Simplex(self.rank_arg("simplex", 0)?)),
                "cube" => Ok(Expr::Cube(self.rank_arg("cube", 1)?)),
                "cross" => Ok(Expr::Cross(self.rank_arg("cross", 1)?)),
                "torus" => {
                    self.expect(Tok::LParen, "`(` after `torus`")?;
                    let p = self.int("a side count")?;
                    self.expect(Tok::Comma, "`,`")?;
                    let d = self.int("a dimension")?;
                    self.expect(Tok::RParen, "`)`")?;
                    if p < 2 || d < 2 {
                        return Err(ExprError::Range {
                            message: "torus needs p >= 2 and d >= 2".into(),
                        });
                    }
                    Ok(Expr::Torus(p as usize, d as i32))
                }
                "pyr" | "prism" | "pri" | "bipyr" | "dual" => {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let inner = Box::new(self.expr()?);
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "pyr" => Expr::Pyr(inner),
                        "prism" | "pri" => Expr::Prism(inner),
                        "bipyr" => Expr::Bipyr(inner),
                        _ => Expr::Dual(inner),
                    })
                }
                _ => Err(ExprError::Syntax {
                    position: at,
                    message: format!("expected a polytope, found `{name}`"),
                }),
            },
            Some(tok) => Err(ExprError::Syntax {
                position: at,
                message: format!("expected a polytope, found `{tok:?}`"),
            }),
            None => Err(ExprError::Syntax {
                position: at,
                message: "expected a polytope expression".into(),
            }),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return parser.fail("unexpected trailing input");
    }
    Ok(expr)
}

/// Builds the named polytope. Catalog atoms are constructed once per
/// evaluation and reused, so repeated atoms cost one build.
pub fn eval(expr: &Expr) -> Result<Polytope, ExprError> {
    let mut atoms = BTreeMap::new();
    eval_cached(expr, &mut atoms)
}

/// Parses and evaluates in one step.
pub fn parse_eval(text: &str) -> Result<Polytope, ExprError> {
    eval(&parse(text)?)
}

fn eval_cached(expr: &Expr, atoms: &mut BTreeMap<Expr, Polytope>) -> Result<Polytope, ExprError> {
    let built = |r: Result<Polytope, catalog::BadParameter>| {
        r.map_err(|e| ExprError::Range { message: e.to_string() })
    };
    let atom = match expr {
        Expr::Point => Some(Ok(catalog::point())),
        Expr::Edge => Some(Ok(catalog::edge())),
        Expr::Gon(p) => Some(built(catalog::gon(*p))),
        Expr::Simplex(n) => Some(built(catalog::simplex(*n))),
        Expr::Cube(n) => Some(built(catalog::cube(*n))),
        Expr::Cross(n) => Some(built(catalog::cross(*n))),
        Expr::Torus(p, d) => Some(built(catalog::torus(*p, *d))),
        _ => None,
    };
    if let Some(result) = atom {
        if let Some(hit) = atoms.get(expr) {
            return Ok(hit.clone());
        }
        let p = result?;
        atoms.insert(expr.clone(), p.clone());
        return Ok(p);
    }
    let fail = |e: products::ProductError| ExprError::Eval { message: e.to_string() };
    match expr {
        Expr::Pyr(e) => Ok(products::pyr(&eval_cached(e, atoms)?)),
        Expr::Prism(e) => products::pri(&eval_cached(e, atoms)?).map_err(fail),
        Expr::Bipyr(e) => products::bipyr(&eval_cached(e, atoms)?).map_err(fail),
        Expr::Dual(e) => Ok(eval_cached(e, atoms)?.dual()),
        Expr::Product(kind, a, b) => {
            let a = eval_cached(a, atoms)?;
            let b = eval_cached(b, atoms)?;
            products::product(*kind, &a, &b).map_err(fail)
        }
        Expr::Power(e, k) => {
            let base = eval_cached(e, atoms)?;
            products::power(ProductKind::Cartesian, &base, *k).map_err(fail)
        }
        _ => unreachable!("atoms are handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cross, cube, gon, simplex, torus};
    use crate::is_isomorphic;
    use proptest::prelude::*;

    #[test]
    fn atoms_and_operators_parse_to_the_expected_trees() {
        assert_eq!(parse("pyr(gon(5))").unwrap(), Expr::Pyr(Box::new(Expr::Gon(5))));
        assert_eq!(
            parse("edge cart gon(5)").unwrap(),
            Expr::Product(
                ProductKind::Cartesian,
                Box::new(Expr::Edge),
                Box::new(Expr::Gon(5))
            )
        );
        assert_eq!(parse("pri(cube(2))").unwrap(), parse("prism(cube(2))").unwrap());
        assert_eq!(
            parse("torus(4,2)").unwrap(),
            Expr::Torus(4, 2),
        );
    }

    #[test]
    fn operators_chain_left_associatively() {
        assert_eq!(
            parse("point join edge cart gon(3)").unwrap(),
            Expr::Product(
                ProductKind::Cartesian,
                Box::new(Expr::Product(
                    ProductKind::Join,
                    Box::new(Expr::Point),
                    Box::new(Expr::Edge)
                )),
                Box::new(Expr::Gon(3))
            )
        );
        // Powers bind tighter than the infix operators.
        assert_eq!(
            parse("edge dsum edge ^ 2").unwrap(),
            Expr::Product(
                ProductKind::DirectSum,
                Box::new(Expr::Edge),
                Box::new(Expr::Power(Box::new(Expr::Edge), 2))
            )
        );
    }

    #[test]
    fn syntax_errors_carry_the_byte_position() {
        match parse("gon(5) extra").unwrap_err() {
            ExprError::Syntax { position, .. } => assert_eq!(position, 7),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        match parse("gon(").unwrap_err() {
            ExprError::Syntax { position, .. } => assert_eq!(position, 4),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        match parse("frob(3)").unwrap_err() {
            ExprError::Syntax { position, .. } => assert_eq!(position, 0),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        match parse("edge @ edge").unwrap_err() {
            ExprError::Syntax { position, .. } => assert_eq!(position, 5),
            other => panic!("expected a syntax error, got {other:?}"),
        }
        assert!(matches!(parse("torus(4)"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn parameter_ranges_are_checked_while_parsing() {
        for text in ["gon(1)", "cube(0)", "cross(0)", "torus(1,2)", "torus(4,1)", "edge ^ 0"] {
            assert!(
                matches!(parse(text), Err(ExprError::Range { .. })),
                "{text} should be out of range"
            );
        }
        // The digon and the 0-simplex are legitimate.
        assert!(parse("gon(2)").is_ok());
        assert!(parse("simplex(0)").is_ok());
    }

    #[test]
    fn evaluation_matches_the_catalog() {
        let gon4 = gon(4).unwrap();
        let torus42 = torus(4, 2).unwrap();
        let cases: Vec<(&str, Polytope)> = vec![
            ("edge ^ 3", cube(3).unwrap()),
            ("point join point", catalog::edge()),
            ("pyr(point)", catalog::edge()),
            ("point join point join point", simplex(2).unwrap()),
            ("edge cart edge", gon4.clone()),
            ("edge dsum edge", gon4.clone()),
            ("gon(4) topo gon(4)", torus42.clone()),
            ("torus(4,2)", torus42),
            ("dual(cube(3))", cross(3).unwrap()),
            ("dual(dual(simplex(3)))", simplex(3).unwrap()),
            ("bipyr(gon(4))", cross(3).unwrap()),
            ("prism(edge ^ 2)", cube(3).unwrap()),
        ];
        for (text, expected) in cases {
            let got = parse_eval(text).unwrap();
            assert!(
                is_isomorphic(got.poset(), expected.poset()).is_some(),
                "{text} evaluated to the wrong polytope"
            );
        }
    }

    #[test]
    fn evaluation_errors_name_the_offending_operation() {
        // Topological products need rank >= 2 on both sides.
        assert!(matches!(
            parse_eval("edge topo gon(3)"),
            Err(ExprError::Eval { .. })
        ));
        // The point is the identity for both cardinal sums, not an error.
        let p = parse_eval("point dsum point").unwrap();
        assert_eq!(p.rank(), 0);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Point),
            Just(Expr::Edge),
            (2usize..9).prop_map(Expr::Gon),
            (0i32..4).prop_map(Expr::Simplex),
            (1i32..4).prop_map(Expr::Cube),
            (1i32..4).prop_map(Expr::Cross),
            ((2usize..5), (2i32..4)).prop_map(|(p, d)| Expr::Torus(p, d)),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Pyr(Box::new(e))),
                inner.clone().prop_map(|e| Expr::Prism(Box::new(e))),
                inner.clone().prop_map(|e| Expr::Bipyr(Box::new(e))),
                inner.clone().prop_map(|e| Expr::Dual(Box::new(e))),
                (
                    prop_oneof![
                        Just(ProductKind::Join),
                        Just(ProductKind::Cartesian),
                        Just(ProductKind::DirectSum),
                        Just(ProductKind::Topological),
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(k, a, b)| Expr::Product(k, Box::new(a), Box::new(b))),
                (inner, 1usize..4).prop_map(|(e, k)| Expr::Power(Box::new(e), k)),
            ]
        })
    }

    proptest! {
        #[test]
        fn printing_and_reparsing_is_the_identity(e in arb_expr()) {
            prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }
}
