//! Group laws evaluated on level quotients.
//!
//! ```text
//! law     = factor { factor } ;
//! factor  = atom [ "^" integer ] ;
//! atom    = variable | "1" | "(" law ")" | "[" law "," law "]" ;
//! variable = "a" | ... | "z" ;
//! integer = [ "-" ] digit { digit } ;
//! ```
//!
//! Whitespace is ignored, `[u, v] = u⁻¹ v⁻¹ u v`, and variables are bound in
//! alphabetical order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AnalysisError, LevelQuotient};
use crate::elements::TruncatedElement;
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    One,
    Var(usize),
    Pow(Box<Term>, i64),
    Comm(Box<Term>, Box<Term>),
    Product(Vec<Term>),
}

/// A word in free generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Law {
    text: String,
    vars: Vec<char>,
    term: Term,
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    vars: Vec<char>,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<char> {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
            } else {
                return Some(c);
            }
        }
        None
    }

    fn expect(&mut self, want: char) -> Result<(), AnalysisError> {
        match self.peek() {
            Some(c) if c == want => {
                self.chars.next();
                Ok(())
            }
            Some(c) => Err(AnalysisError::LawParse(format!("expected '{want}', found '{c}'"))),
            None => Err(AnalysisError::LawParse(format!("expected '{want}', found end of input"))),
        }
    }

    fn law(&mut self) -> Result<Term, AnalysisError> {
        let mut factors = Vec::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c == '1' || c == '(' || c == '[') {
            factors.push(self.factor()?);
        }
        match factors.len() {
            0 => Err(AnalysisError::LawParse(match self.peek() {
                Some(c) => format!("unexpected '{c}'"),
                None => "empty law".into(),
            })),
            1 => Ok(factors.pop().expect("one factor")),
            _ => Ok(Term::Product(factors)),
        }
    }

    fn factor(&mut self) -> Result<Term, AnalysisError> {
        let atom = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(atom);
        }
        self.chars.next();
        let mut digits = String::new();
        if self.peek() == Some('-') {
            self.chars.next();
            digits.push('-');
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            self.chars.next();
            digits.push(c);
        }
        let n = digits
            .parse::<i64>()
            .map_err(|_| AnalysisError::LawParse(format!("bad exponent '{digits}'")))?;
        Ok(Term::Pow(Box::new(atom), n))
    }

    fn atom(&mut self) -> Result<Term, AnalysisError> {
        match self.peek() {
            Some('1') => {
                self.chars.next();
                Ok(Term::One)
            }
            Some('(') => {
                self.chars.next();
                let t = self.law()?;
                self.expect(')')?;
                Ok(t)
            }
            Some('[') => {
                self.chars.next();
                let u = self.law()?;
                self.expect(',')?;
                let v = self.law()?;
                self.expect(']')?;
                Ok(Term::Comm(Box::new(u), Box::new(v)))
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.chars.next();
                let i = match self.vars.iter().position(|&v| v == c) {
                    Some(i) => i,
                    None => {
                        self.vars.push(c);
                        self.vars.len() - 1
                    }
                };
                Ok(Term::Var(i))
            }
            Some(c) => Err(AnalysisError::LawParse(format!("unexpected '{c}'"))),
            None => Err(AnalysisError::LawParse("unexpected end of input".into())),
        }
    }
}

fn renumber(t: &mut Term, map: &[usize]) {
    match t {
        Term::One => {}
        Term::Var(i) => *i = map[*i],
        Term::Pow(b, _) => renumber(b, map),
        Term::Comm(u, v) => {
            renumber(u, map);
            renumber(v, map);
        }
        Term::Product(fs) => fs.iter_mut().for_each(|f| renumber(f, map)),
    }
}

impl FromStr for Law {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            chars: s.char_indices().peekable(),
            vars: Vec::new(),
        };
        let mut term = p.law()?;
        if let Some(c) = p.peek() {
            return Err(AnalysisError::LawParse(format!("unexpected '{c}'")));
        }
        let mut vars = p.vars;
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        let map: Vec<usize> = vars
            .iter()
            .map(|c| sorted.binary_search(c).expect("present"))
            .collect();
        renumber(&mut term, &map);
        vars = sorted;
        Ok(Law {
            text: s.trim().to_string(),
            vars,
            term,
        })
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Law {
    pub fn variables(&self) -> &[char] {
        &self.vars
    }

    /// Value of the law with variable `i` bound to `values[i]`.
    pub fn evaluate(&self, values: &[TruncatedElement], id: &TruncatedElement) -> TruncatedElement {
        fn go(t: &Term, vals: &[TruncatedElement], id: &TruncatedElement) -> TruncatedElement {
            match t {
                Term::One => id.clone(),
                Term::Var(i) => vals[*i].clone(),
                Term::Pow(b, n) => go(b, vals, id).pow(*n),
                Term::Comm(u, v) => {
                    let (u, v) = (go(u, vals, id), go(v, vals, id));
                    u.inv().mul_unchecked(&v.inv()).mul_unchecked(&u).mul_unchecked(&v)
                }
                Term::Product(fs) => fs.iter().fold(id.clone(), |acc, f| acc.mul_unchecked(&go(f, vals, id))),
            }
        }
        go(&self.term, values, id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawWitness {
    /// `(variable, element)` pairs.
    pub assignment: Vec<(char, String)>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub size: usize,
    pub holds: bool,
    pub witness: Option<LawWitness>,
    pub checked: usize,
    pub total: u128,
    pub sampled: bool,
}

/// Evaluates `law` under substitutions of quotient elements: every one when
/// there are at most `budget`, otherwise `budget` seeded random ones.
pub fn law_check(
    q: &LevelQuotient,
    law: &Law,
    budget: usize,
    seed: u64,
    exec: Execution,
) -> Result<LawReport, AnalysisError> {
    q.require_complete()?;
    let elems = q.elements();
    let m = elems.len();
    let v = law.vars.len();
    let total = (m as u128).checked_pow(v as u32).unwrap_or(u128::MAX);
    let exhaustive = total <= budget as u128;
    let count = if exhaustive { total as usize } else { budget };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<Vec<usize>> = if exhaustive {
        Vec::new()
    } else {
        (0..count).map(|_| (0..v).map(|_| rng.gen_range(0..m)).collect()).collect()
    };
    let assignment = |c: usize| -> Vec<usize> {
        if exhaustive {
            let mut c = c;
            let mut out = vec![0; v];
            for slot in out.iter_mut().rev() {
                *slot = c % m;
                c /= m;
            }
            out
        } else {
            picks[c].clone()
        }
    };
    let id = TruncatedElement::identity(q.signature().clone(), q.depth());
    let fail = par::find_map_first(exec, count, |c| {
        let idx = assignment(c);
        let vals: Vec<TruncatedElement> = idx.iter().map(|&i| elems[i].clone()).collect();
        let value = law.evaluate(&vals, &id);
        (!value.is_identity()).then_some((idx, value))
    });
    let witness = fail.map(|(idx, value)| LawWitness {
        assignment: law
            .vars
            .iter()
            .zip(&idx)
            .map(|(&c, &i)| (c, elems[i].to_string()))
            .collect(),
        value: value.to_string(),
    });
    Ok(LawReport {
        law: law.to_string(),
        size: q.size(),
        holds: witness.is_none(),
        witness,
        checked: count,
        total,
        sampled: !exhaustive,
    })
}
