//! Exact arithmetic in GF(2^k) on a polynomial basis, together with the
//! additive equivalence `a ~_s b  <=>  a = b + l*s + l^2` and its canonical
//! class representatives.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// Element of GF(2^k): the bit pattern of its residue polynomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fel(pub u16);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Fel> {
        u16::from_str_radix(s, 16)
            .map(Fel)
            .map_err(|_| Error::Format(format!("bad field element {s:?}")))
    }
}

impl fmt::Debug for Fel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fel({:x})", self.0)
    }
}

impl fmt::Display for Fel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// A concrete GF(2^k): extension degree, defining polynomial, and the
/// exp/log tables used for multiplication.
pub struct Field {
    k: u32,
    poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#b}", self.k, self.poly)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.poly == other.poly
    }
}

impl Eq for Field {}

/// Remainder of `a` modulo `m` in GF(2)[x], both as bit patterns.
fn poly_rem(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros() as i32;
    loop {
        let da = 63 - (a | 1).leading_zeros() as i32;
        if a == 0 || da < dm {
            return a;
        }
        a ^= m << (da - dm);
    }
}

fn is_irreducible(p: u32, k: u32) -> bool {
    // trial division by every polynomial of degree 1..=k/2
    for d in 1..=k / 2 {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(p as u64, q as u64) == 0 {
                return false;
            }
        }
    }
    true
}

/// Builds GF(2^k) over the canonical defining polynomial: the least bit
/// pattern among irreducible degree-k polynomials with nonzero constant term.
pub fn make_field(k: u32) -> Result<Arc<Field>> {
    Field::new(k).map(Arc::new)
}

impl Field {
    pub fn new(k: u32) -> Result<Field> {
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::FieldDegree(k));
        }
        let poly = ((1u32 << k) + 1..1u32 << (k + 1))
            .step_by(2)
            .find(|&p| is_irreducible(p, k))
            .expect("an irreducible polynomial of every degree exists");
        let order = 1u32 << k;
        let mut field = Field {
            k,
            poly,
            exp: Vec::new(),
            log: vec![0; order as usize],
        };
        if k == 1 {
            field.exp = vec![1];
            return Ok(field);
        }
        // exp/log tables from a primitive element
        'outer: for g in 2..order {
            let g = Fel(g as u16);
            let mut exp = Vec::with_capacity(order as usize - 1);
            let mut cur = Fel::ONE;
            for _ in 0..order - 1 {
                exp.push(cur.0);
                cur = field.mul_slow(cur, g);
            }
            if cur != Fel::ONE || exp.iter().skip(1).any(|&e| e == 1) {
                continue 'outer;
            }
            for (i, &e) in exp.iter().enumerate() {
                field.log[e as usize] = i as u16;
            }
            field.exp = exp;
            return Ok(field);
        }
        unreachable!("every finite field has a primitive element")
    }

    /// Shift-and-reduce multiplication; used only to bootstrap the tables.
    fn mul_slow(&self, a: Fel, b: Fel) -> Fel {
        let mut acc: u32 = 0;
        let mut a = a.0 as u32;
        let mut b = b.0 as u32;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            a <<= 1;
            if a >> self.k != 0 {
                a ^= self.poly;
            }
            b >>= 1;
        }
        Fel(acc as u16)
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^k.
    pub fn order(&self) -> u32 {
        1 << self.k
    }

    pub fn elements(&self) -> impl Iterator<Item = Fel> {
        (0..self.order() as u16).map(Fel)
    }

    pub fn contains(&self, a: Fel) -> bool {
        (a.0 as u32) < self.order()
    }

    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        Fel(a.0 ^ b.0)
    }

    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        if a.is_zero() || b.is_zero() {
            return Fel::ZERO;
        }
        let n = self.order() as usize - 1;
        let i = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        Fel(self.exp[if i >= n { i - n } else { i }])
    }

    pub fn inv(&self, a: Fel) -> Result<Fel> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order() as usize - 1;
        let i = self.log[a.0 as usize] as usize;
        Ok(Fel(self.exp[(n - i) % n]))
    }

    pub fn div(&self, a: Fel, b: Fel) -> Result<Fel> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn square(&self, a: Fel) -> Fel {
        self.mul(a, a)
    }

    /// The unique square root; the Frobenius is bijective on a finite field,
    /// so this is a^(2^(k-1)).
    pub fn sqrt(&self, a: Fel) -> Fel {
        let mut b = a;
        for _ in 1..self.k {
            b = self.square(b);
        }
        b
    }

    pub fn pow(&self, a: Fel, e: u64) -> Fel {
        let mut acc = Fel::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// The displacement `l^2 + l*s` appearing in the relation `~_s`.
    pub fn artin_schreier(&self, s: Fel, l: Fel) -> Fel {
        self.add(self.square(l), self.mul(l, s))
    }

    /// Canonical representative of `a` under `~_s`: the minimal bit pattern
    /// in the coset `a + { l^2 + l*s : l }`.
    pub fn as_class_of(&self, s: Fel, a: Fel) -> Fel {
        self.elements()
            .map(|l| self.add(a, self.artin_schreier(s, l)))
            .min()
            .unwrap()
    }

    /// Number of `~_s` equivalence classes.
    pub fn as_class_count(&self, s: Fel) -> usize {
        let mut seen = vec![false; self.order() as usize];
        let mut image = 0usize;
        for l in self.elements() {
            let d = self.artin_schreier(s, l);
            if !seen[d.0 as usize] {
                seen[d.0 as usize] = true;
                image += 1;
            }
        }
        self.order() as usize / image
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(0..self.order()) as u16)
    }

    pub fn sample_nonzero<R: Rng>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(1..self.order()) as u16)
    }
}
