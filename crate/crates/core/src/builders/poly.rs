//! Sums of monomials in the variables `x1..xt, y1..yt` with integer
//! coefficients, e.g. `x1*y1 + x2*y2` or `x1^2 - 2*x1*y1 + y1^2`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: i64,
    /// Exponents of `x1..xt` followed by `y1..yt`.
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    t: usize,
    terms: Vec<Monomial>,
    source: String,
}

impl Polynomial {
    pub fn parse(src: &str, t: usize) -> Result<Self> {
        let err = |msg: String| Error::Polynomial(format!("{msg} in {src:?}"));
        let cleaned: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty polynomial".into()));
        }
        // split into signed terms
        let mut raw_terms: Vec<(i64, String)> = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        for (i, c) in cleaned.char_indices() {
            if (c == '+' || c == '-') && !(i > 0 && cleaned[..i].ends_with('^')) {
                if !cur.is_empty() {
                    raw_terms.push((sign, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(err("dangling operator".into()));
                }
                sign = if c == '-' { -1 } else { 1 };
            } else {
                cur.push(c);
            }
        }
        if cur.is_empty() {
            return Err(err("trailing operator".into()));
        }
        raw_terms.push((sign, cur));

        let mut terms = Vec::new();
        for (sign, body) in raw_terms {
            let mut coeff = sign;
            let mut exps = vec![0u32; 2 * t];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor".into()));
                }
                if let Ok(c) = factor.parse::<i64>() {
                    coeff = coeff
                        .checked_mul(c)
                        .ok_or_else(|| err("coefficient overflow".into()))?;
                    continue;
                }
                let (var, power) = match factor.split_once('^') {
                    Some((v, p)) => (
                        v,
                        p.parse::<u32>()
                            .map_err(|_| err(format!("bad exponent {p:?}")))?,
                    ),
                    None => (factor, 1),
                };
                let offset = match var.chars().next() {
                    Some('x') => 0,
                    Some('y') => t,
                    _ => return Err(err(format!("unknown variable {var:?}"))),
                };
                let idx: usize = var[1..]
                    .parse()
                    .map_err(|_| err(format!("bad variable index {var:?}")))?;
                if idx == 0 || idx > t {
                    return Err(err(format!("variable {var} outside 1..={t}")));
                }
                exps[offset + idx - 1] += power;
            }
            terms.push(Monomial { coeff, exps });
        }
        Ok(Self {
            t,
            terms,
            source: src.trim().to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.t
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// `P(x, y) mod q`.
    pub fn eval(&self, q: u32, x: &[u32], y: &[u32]) -> u32 {
        let q64 = q as u64;
        let mut acc = 0u64;
        for term in &self.terms {
            let mut v = term.coeff.rem_euclid(q as i64) as u64;
            for (k, &e) in term.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if k < self.t { x[k] } else { y[k - self.t] } as u64;
                let mut p = 1u64;
                for _ in 0..e {
                    p = p * base % q64;
                }
                v = v * p % q64;
            }
            acc = (acc + v) % q64;
        }
        acc as u32
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
