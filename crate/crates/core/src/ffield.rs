//! Prime-field arithmetic and vectors over `F_q^t`.
//!
//! Residues are stored as `u32` in `[0, q)` and reduced eagerly. Products are
//! formed in `u64`, so any prime below `2^32` is safe; the builders only ever
//! use small moduli.

use std::fmt;

use crate::error::{Error, Result};

/// Binary or unary operation on residues, used by [`PrimeField::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q as u64) {
            return Err(Error::NotPrime(q as u64));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    fn check(&self, a: u32) -> Result<()> {
        if a >= self.q {
            Err(Error::ResidueOutOfRange {
                value: a,
                modulus: self.q,
            })
        } else {
            Ok(())
        }
    }

    /// Reduces an arbitrary signed integer into `[0, q)`.
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(Error::NoInverse(a));
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Checked dispatch over [`FieldOp`]; `b` is required for the binary ops.
    pub fn apply(&self, op: FieldOp, a: u32, b: Option<u32>) -> Result<u32> {
        self.check(a)?;
        let rhs = || -> Result<u32> {
            let b = b.ok_or_else(|| Error::InvalidArgument("binary op needs two operands".into()))?;
            self.check(b)?;
            Ok(b)
        };
        match op {
            FieldOp::Add => Ok(self.add(a, rhs()?)),
            FieldOp::Mul => Ok(self.mul(a, rhs()?)),
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
        }
    }
}

/// Trial division; adequate for the moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldVector {
    q: u32,
    coords: Vec<u32>,
}

impl FieldVector {
    pub fn new(field: PrimeField, coords: Vec<u32>) -> Result<Self> {
        for &c in &coords {
            field.check(c)?;
        }
        Ok(Self {
            q: field.modulus(),
            coords,
        })
    }

    pub fn zero(field: PrimeField, t: usize) -> Self {
        Self {
            q: field.modulus(),
            coords: vec![0; t],
        }
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::FieldMismatch {
                left: self.q,
                right: other.q,
            });
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                left: self.coords.len(),
                right: other.coords.len(),
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let q = self.q as u64;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| ((a as u64 + q - b as u64) % q) as u32)
            .collect();
        Ok(Self { q: self.q, coords })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let q = self.q as u64;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| ((a as u64 + b as u64) % q) as u32)
            .collect();
        Ok(Self { q: self.q, coords })
    }

    /// `sum u_i v_i mod q`.
    pub fn dot(&self, other: &Self) -> Result<u32> {
        self.compatible(other)?;
        Ok(dot_raw(self.q, &self.coords, &other.coords))
    }

    /// `sum (u_i - v_i)^2 mod q`.
    pub fn sqdist(&self, other: &Self) -> Result<u32> {
        self.compatible(other)?;
        Ok(sqdist_raw(self.q, &self.coords, &other.coords))
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot_raw(q: u32, a: &[u32], b: &[u32]) -> u32 {
    let q = q as u64;
    (a.iter()
        .zip(b)
        .map(|(&x, &y)| x as u64 * y as u64 % q)
        .sum::<u64>()
        % q) as u32
}

pub(crate) fn sqdist_raw(q: u32, a: &[u32], b: &[u32]) -> u32 {
    let q = q as u64;
    (a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let diff = (x as u64 + q - y as u64) % q;
            diff * diff % q
        })
        .sum::<u64>()
        % q) as u32
}

/// All vectors of `F_q^t` in lexicographic coordinate order (first coordinate
/// most significant).
pub fn enumerate_vectors(field: PrimeField, t: usize) -> Vec<FieldVector> {
    let q = field.modulus();
    let total = (q as usize).pow(t as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; t];
    for _ in 0..total {
        out.push(FieldVector {
            q,
            coords: cur.clone(),
        });
        for pos in (0..t).rev() {
            cur[pos] += 1;
            if cur[pos] < q {
                break;
            }
            cur[pos] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(q: u32, c: &[u32]) -> FieldVector {
        FieldVector::new(PrimeField::new(q).unwrap(), c.to_vec()).unwrap()
    }

    #[test]
    fn arith_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.apply(FieldOp::Mul, 1, Some(5)).unwrap(), 5);
        assert_eq!(f7.apply(FieldOp::Inv, 3, None).unwrap(), 5);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.apply(FieldOp::Add, 4, Some(3)).unwrap(), 2);
        assert_eq!(f5.apply(FieldOp::Neg, 2, None).unwrap(), 3);
    }

    #[test]
    fn arith_errors() {
        assert!(matches!(PrimeField::new(9), Err(Error::NotPrime(9))));
        assert!(PrimeField::new(1).is_err());
        let f7 = PrimeField::new(7).unwrap();
        assert!(matches!(f7.apply(FieldOp::Inv, 0, None), Err(Error::NoInverse(0))));
        assert!(f7.apply(FieldOp::Add, 7, Some(1)).is_err());
        assert!(f7.apply(FieldOp::Add, 1, None).is_err());
    }

    #[test]
    fn dot_examples() {
        assert_eq!(fv(7, &[1, 2]).dot(&fv(7, &[3, 2])).unwrap(), 0);
        assert_eq!(fv(7, &[0, 0, 0]).dot(&fv(7, &[3, 2, 6])).unwrap(), 0);
        assert_eq!(fv(3, &[1, 1, 1]).dot(&fv(3, &[1, 1, 1])).unwrap(), 0);
        assert!(fv(7, &[1, 2]).dot(&fv(7, &[1, 2, 3])).is_err());
        assert!(fv(7, &[1, 2]).dot(&fv(5, &[1, 2])).is_err());
    }

    #[test]
    fn sqdist_examples() {
        assert_eq!(fv(5, &[3, 4]).sqdist(&fv(5, &[3, 4])).unwrap(), 0);
        assert_eq!(fv(5, &[0, 0]).sqdist(&fv(5, &[1, 0])).unwrap(), 1);
        assert_eq!(fv(5, &[0, 0]).sqdist(&fv(5, &[2, 2])).unwrap(), 3);
        assert!(fv(5, &[0, 0]).sqdist(&fv(5, &[0])).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let vs = enumerate_vectors(PrimeField::new(3).unwrap(), 2);
        assert_eq!(vs.len(), 9);
        assert_eq!(vs[0].coords(), &[0, 0]);
        assert_eq!(vs[1].coords(), &[0, 1]);
        assert_eq!(vs[3].coords(), &[1, 0]);
        assert_eq!(vs[8].coords(), &[2, 2]);
    }

    const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 29, 31];

    fn field_and_vectors() -> impl Strategy<Value = (u32, Vec<u32>, Vec<u32>)> {
        (0..PRIMES.len(), 1usize..5).prop_flat_map(|(i, t)| {
            let q = PRIMES[i];
            (
                Just(q),
                proptest::collection::vec(0..q, t),
                proptest::collection::vec(0..q, t),
            )
        })
    }

    proptest! {
        #[test]
        fn inverse_round_trips(i in 0..PRIMES.len(), a in 1u32..1000) {
            let f = PrimeField::new(PRIMES[i]).unwrap();
            let a = a % f.modulus();
            prop_assume!(a != 0);
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }

        #[test]
        fn dot_and_sqdist_symmetric((q, a, b) in field_and_vectors()) {
            let (u, v) = (fv(q, &a), fv(q, &b));
            prop_assert_eq!(u.dot(&v).unwrap(), v.dot(&u).unwrap());
            prop_assert_eq!(u.sqdist(&v).unwrap(), v.sqdist(&u).unwrap());
        }

        #[test]
        fn sqdist_is_self_dot_of_difference((q, a, b) in field_and_vectors()) {
            let (u, v) = (fv(q, &a), fv(q, &b));
            let diff = u.sub(&v).unwrap();
            prop_assert_eq!(u.sqdist(&v).unwrap(), diff.dot(&diff).unwrap());
        }
    }
}
