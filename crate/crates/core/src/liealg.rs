//! The Chevalley module V(Phi) over GF(2^k), its bracket, and the adjoint
//! action of the elementary root elements `x_alpha(a)`.
//!
//! In characteristic 2 every structure constant is 1 and every sign
//! disappears, so the action formulas collapse to:
//!
//! * `x_a(t) e_b = e_b`                          when (a,b) >= 0, b != -a
//! * `x_a(t) e_b = e_b + t e_{a+b}`              when (a,b) = -1
//! * `x_a(t) e_{-a} = e_{-a} + t h_a + t^2 e_a`
//! * `x_a(t) h    = h + (pairing(h,a) mod 2) t e_a`
//!
//! Cartan elements are stored over the simple generators; `h` at an
//! arbitrary root expands through the root's coordinates mod 2.

use crate::error::{Error, Result};
use crate::gf2k::{Fel, Field};
use crate::rootsys::{Root, RootSystem};
use std::fmt;
use std::sync::Arc;

/// Element of the Chevalley module: root-vector coefficients plus a Cartan
/// part over the simple generators.
#[derive(Clone)]
pub struct ChevVec {
    sys: Arc<RootSystem>,
    field: Arc<Field>,
    e: Vec<Fel>,
    h: Vec<Fel>,
}

impl PartialEq for ChevVec {
    fn eq(&self, other: &Self) -> bool {
        self.sys.id() == other.sys.id()
            && *self.field == *other.field
            && self.e == other.e
            && self.h == other.h
    }
}

impl Eq for ChevVec {}

impl fmt::Debug for ChevVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChevVec({}", self.sys.id())?;
        for (i, c) in self.support_e() {
            write!(f, " {}*e[{}]", c, self.sys.root_at(i))?;
        }
        for (i, c) in self.h.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " {}*h{}", c, i + 1)?;
            }
        }
        write!(f, ")")
    }
}

impl ChevVec {
    pub fn zero(sys: Arc<RootSystem>, field: Arc<Field>) -> ChevVec {
        let n = sys.num_roots();
        let r = sys.rank();
        ChevVec {
            sys,
            field,
            e: vec![Fel::ZERO; n],
            h: vec![Fel::ZERO; r],
        }
    }

    /// The basis vector `e_root`.
    pub fn basis_e(sys: Arc<RootSystem>, field: Arc<Field>, root: &Root) -> Result<ChevVec> {
        let mut v = ChevVec::zero(sys, field);
        let i = v.require(root)?;
        v.e[i as usize] = Fel::ONE;
        Ok(v)
    }

    /// The basis vector `h_i` over a simple root.
    pub fn basis_h(sys: Arc<RootSystem>, field: Arc<Field>, i: usize) -> ChevVec {
        let mut v = ChevVec::zero(sys, field);
        v.h[i] = Fel::ONE;
        v
    }

    pub fn sys(&self) -> &Arc<RootSystem> {
        &self.sys
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn require(&self, r: &Root) -> Result<u16> {
        self.sys.idx_of(r).ok_or_else(|| Error::NotARoot {
            system: self.sys.id().to_string(),
            coords: r.to_string(),
        })
    }

    pub fn get_e(&self, root: &Root) -> Result<Fel> {
        Ok(self.e[self.require(root)? as usize])
    }

    pub fn set_e(&mut self, root: &Root, c: Fel) -> Result<()> {
        let i = self.require(root)?;
        self.e[i as usize] = c;
        Ok(())
    }

    pub fn get_h(&self, i: usize) -> Fel {
        self.h[i]
    }

    pub fn set_h(&mut self, i: usize, c: Fel) {
        self.h[i] = c;
    }

    pub(crate) fn e_at(&self, i: u16) -> Fel {
        self.e[i as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|c| c.is_zero()) && self.h.iter().all(|c| c.is_zero())
    }

    /// Nonzero root coefficients, in canonical root order.
    pub fn support_e(&self) -> impl Iterator<Item = (u16, Fel)> + '_ {
        self.e
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i as u16, c))
    }

    pub fn support_size(&self) -> usize {
        self.support_e().count()
    }

    pub fn hpart(&self) -> &[Fel] {
        &self.h
    }

    /// True when the vector lies in the layer-one span V1: empty Cartan part
    /// and every supported root at layer one.
    pub fn in_v1(&self) -> bool {
        self.h.iter().all(|c| c.is_zero())
            && self.support_e().all(|(i, _)| self.sys.layer_of(i) == 1)
    }

    pub fn add(&self, other: &ChevVec) -> Result<ChevVec> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.e.iter_mut().zip(other.e.iter()) {
            *a = self.field.add(*a, *b);
        }
        for (a, b) in out.h.iter_mut().zip(other.h.iter()) {
            *a = self.field.add(*a, *b);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Fel) -> ChevVec {
        let mut out = self.clone();
        for a in out.e.iter_mut() {
            *a = self.field.mul(*a, c);
        }
        for a in out.h.iter_mut() {
            *a = self.field.mul(*a, c);
        }
        out
    }

    fn check_compatible(&self, other: &ChevVec) -> Result<()> {
        if self.sys.id() != other.sys.id() {
            return Err(Error::MixedSystems);
        }
        if *self.field != *other.field {
            return Err(Error::MixedFields);
        }
        Ok(())
    }

    /// XOR-sum of the Cartan coefficients selected by a simple-index bitmask.
    fn h_masked(&self, mask: u8) -> Fel {
        let mut acc = Fel::ZERO;
        for (i, &c) in self.h.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = self.field.add(acc, c);
            }
        }
        acc
    }
}

/// Lie bracket, bilinear over the basis rules.
pub fn bracket(u: &ChevVec, v: &ChevVec) -> Result<ChevVec> {
    u.check_compatible(v)?;
    let sys = &u.sys;
    let f = &u.field;
    let mut out = ChevVec::zero(sys.clone(), f.clone());
    for (i, a) in u.support_e() {
        for (j, b) in v.support_e() {
            let ab = f.mul(a, b);
            if ab.is_zero() {
                continue;
            }
            if j == sys.neg_idx(i) {
                // [e_a, e_{-a}] = h_a
                let mask = sys.coords_mod2(i);
                for t in 0..sys.rank() {
                    if mask >> t & 1 == 1 {
                        out.h[t] = f.add(out.h[t], ab);
                    }
                }
            } else if let Some(k) = sys.sum_idx(i, j) {
                out.e[k as usize] = f.add(out.e[k as usize], ab);
            }
        }
    }
    // [h, e_b] terms from both sides (signs coincide in characteristic 2)
    for (w, other) in [(u, v), (v, u)] {
        if w.h.iter().all(|c| c.is_zero()) {
            continue;
        }
        for (j, b) in other.support_e() {
            let pairing = w.h_masked(sys.cartan_mod2(j));
            let c = f.mul(pairing, b);
            out.e[j as usize] = f.add(out.e[j as usize], c);
        }
    }
    Ok(out)
}

/// Index-level action of `x_alpha(a)`; the workhorse behind [`apply_x`].
pub(crate) fn apply_x_idx(ai: u16, a: Fel, v: &ChevVec) -> ChevVec {
    let sys = v.sys.clone();
    let f = v.field.clone();
    let mut out = v.clone();
    if a.is_zero() {
        return out;
    }
    let nai = sys.neg_idx(ai);
    for (b, c) in v.support_e() {
        match sys.inner_idx(ai, b) {
            -1 => {
                let k = sys.sum_idx(ai, b).expect("angle 2pi/3 pair sums to a root") as usize;
                out.e[k] = f.add(out.e[k], f.mul(a, c));
            }
            -2 => {
                debug_assert_eq!(b, nai);
                let ac = f.mul(a, c);
                let mask = sys.coords_mod2(ai);
                for t in 0..sys.rank() {
                    if mask >> t & 1 == 1 {
                        out.h[t] = f.add(out.h[t], ac);
                    }
                }
                let sq = f.mul(f.mul(a, a), c);
                out.e[ai as usize] = f.add(out.e[ai as usize], sq);
            }
            _ => {}
        }
    }
    let pairing = v.h_masked(sys.cartan_mod2(ai));
    if !pairing.is_zero() {
        let c = f.mul(a, pairing);
        out.e[ai as usize] = f.add(out.e[ai as usize], c);
    }
    out
}

/// Action of the elementary root element `x_alpha(a)` on `v`.
pub fn apply_x(alpha: &Root, a: Fel, v: &ChevVec) -> Result<ChevVec> {
    let ai = v.require(alpha)?;
    Ok(apply_x_idx(ai, a, v))
}

/// A product of elementary root elements. Factors are listed left to right
/// as in the written product, so the last factor acts first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupWord {
    pub factors: Vec<(Root, Fel)>,
}

impl GroupWord {
    pub fn identity() -> GroupWord {
        GroupWord::default()
    }

    pub fn single(alpha: Root, a: Fel) -> GroupWord {
        GroupWord {
            factors: vec![(alpha, a)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// The product `self * earlier`: `earlier` acts first.
    pub fn compose(mut self, earlier: GroupWord) -> GroupWord {
        self.factors.extend(earlier.factors);
        self
    }
}

/// Applies a word factor by factor, rightmost first; the empty word is the
/// identity.
pub fn apply_word(w: &GroupWord, v: &ChevVec) -> Result<ChevVec> {
    let mut cur = v.clone();
    for (alpha, a) in w.factors.iter().rev() {
        cur = apply_x(alpha, *a, &cur)?;
    }
    Ok(cur)
}

/// The four-factor element `w_alpha(a)` (characteristic-2 form). Its action
/// is diagonal on the whole basis: `e_b` is scaled by `a^(-(alpha,b))` and
/// the Cartan subalgebra is fixed.
pub fn w_word(sys: &RootSystem, field: &Field, alpha: &Root, a: Fel) -> Result<GroupWord> {
    sys.idx_of(alpha).ok_or_else(|| Error::NotARoot {
        system: sys.id().to_string(),
        coords: alpha.to_string(),
    })?;
    let inv = field.inv(a)?;
    let neg = alpha.negated();
    Ok(GroupWord {
        factors: vec![
            (neg, field.add(field.mul(a, a), a)),
            (*alpha, inv),
            (neg, field.add(a, Fel::ONE)),
            (*alpha, Fel::ONE),
        ],
    })
}

/// Rank over the field of `(ad v)^power` on the full module basis.
pub fn ad_rank(v: &ChevVec, power: u32) -> Result<usize> {
    if power != 1 && power != 2 {
        return Err(Error::Precondition(format!(
            "ad power must be 1 or 2, got {power}"
        )));
    }
    let sys = &v.sys;
    let f = &v.field;
    let n = sys.num_roots();
    let dim = n + sys.rank();
    let mut rows: Vec<Vec<Fel>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let basis = if j < n {
            ChevVec::basis_e(sys.clone(), f.clone(), &sys.root_at(j as u16))?
        } else {
            ChevVec::basis_h(sys.clone(), f.clone(), j - n)
        };
        let mut img = bracket(v, &basis)?;
        if power == 2 {
            img = bracket(v, &img)?;
        }
        let mut row = img.e;
        row.extend(img.h);
        rows.push(row);
    }
    Ok(gauss_rank(rows, f))
}

/// Rank of a matrix given as rows; specializes to bit-packed elimination
/// over GF(2).
pub(crate) fn gauss_rank(rows: Vec<Vec<Fel>>, field: &Field) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    if field.degree() == 1 {
        let words = cols.div_ceil(64);
        let mut packed: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                let mut w = vec![0u64; words];
                for (c, x) in r.iter().enumerate() {
                    if !x.is_zero() {
                        w[c / 64] |= 1 << (c % 64);
                    }
                }
                w
            })
            .collect();
        let mut rank = 0;
        for c in 0..cols {
            let (wi, bi) = (c / 64, c % 64);
            let Some(p) = (rank..packed.len()).find(|&r| packed[r][wi] >> bi & 1 == 1) else {
                continue;
            };
            packed.swap(rank, p);
            let pivot = packed[rank].clone();
            for (r, row) in packed.iter_mut().enumerate() {
                if r != rank && row[wi] >> bi & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(pivot.iter()) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        return rank;
    }
    let mut rows = rows;
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inv(rows[rank][c]).unwrap();
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let factor = row[c];
                for (a, b) in row.iter_mut().zip(pivot.iter()) {
                    *a = field.add(*a, field.mul(factor, *b));
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::make_field;
    use crate::rootsys::{build_root_system, RootSystemId};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn setup(id: RootSystemId, k: u32) -> (Arc<RootSystem>, Arc<Field>) {
        (build_root_system(id), make_field(k).unwrap())
    }

    fn random_vec(
        sys: &Arc<RootSystem>,
        field: &Arc<Field>,
        rng: &mut ChaCha8Rng,
        support: usize,
    ) -> ChevVec {
        let mut v = ChevVec::zero(sys.clone(), field.clone());
        for _ in 0..support {
            let i = rng.gen_range(0..sys.num_roots());
            v.e[i] = field.sample(rng);
        }
        for i in 0..sys.rank() {
            if rng.gen_bool(0.3) {
                v.h[i] = field.sample(rng);
            }
        }
        v
    }

    #[test]
    fn bracket_opposite_roots_gives_cartan() {
        let (sys, field) = setup(RootSystemId::E6, 1);
        let d = sys.delta();
        let ed = ChevVec::basis_e(sys.clone(), field.clone(), &d).unwrap();
        let emd = ChevVec::basis_e(sys.clone(), field.clone(), &d.negated()).unwrap();
        let h = bracket(&ed, &emd).unwrap();
        // h_delta expands as delta's coordinates mod 2
        for (i, &c) in d.coords().iter().enumerate() {
            let expect = if c % 2 == 1 { Fel::ONE } else { Fel::ZERO };
            assert_eq!(h.get_h(i), expect);
        }
        assert!(h.support_e().next().is_none());
    }

    #[test]
    fn bracket_zero_cases() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        // [e_a, e_b] = 0 whenever a+b is not a root and b != -a
        for a in sys.roots().iter().take(12) {
            for b in sys.roots().iter().take(12) {
                if sys.inner(a, b).unwrap() == -1 || *b == a.negated() {
                    continue;
                }
                let ea = ChevVec::basis_e(sys.clone(), field.clone(), a).unwrap();
                let eb = ChevVec::basis_e(sys.clone(), field.clone(), b).unwrap();
                assert!(bracket(&ea, &eb).unwrap().is_zero());
            }
        }
        // [e_a, e_a] = 0 for every root
        for r in sys.roots() {
            let ea = ChevVec::basis_e(sys.clone(), field.clone(), r).unwrap();
            assert!(bracket(&ea, &ea).unwrap().is_zero());
        }
        // [h_i, e_i] = A_ii e = 2e = 0
        for i in 0..sys.rank() {
            let hi = ChevVec::basis_h(sys.clone(), field.clone(), i);
            let ei = ChevVec::basis_e(sys.clone(), field.clone(), &sys.simple_root(i)).unwrap();
            assert!(bracket(&hi, &ei).unwrap().is_zero());
        }
    }

    #[test]
    fn action_fixes_acute_layers() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let a = Fel(2);
        for &alpha_i in sys.layer_list(0).iter().take(4) {
            let alpha = sys.root_at(alpha_i);
            for b in 0..sys.num_roots() as u16 {
                if sys.inner_idx(alpha_i, b) >= 0 {
                    let eb = ChevVec::basis_e(sys.clone(), field.clone(), &sys.root_at(b)).unwrap();
                    assert_eq!(apply_x(&alpha, a, &eb).unwrap(), eb);
                }
            }
        }
    }

    #[test]
    fn action_on_opposite_root() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let alpha = sys.root_at(sys.layer_list(0)[0]);
        let a = Fel(2);
        let em = ChevVec::basis_e(sys.clone(), field.clone(), &alpha.negated()).unwrap();
        let got = apply_x(&alpha, a, &em).unwrap();
        // e_{-a} + a h_a + a^2 e_a
        let mut expect = em.clone();
        expect.set_e(&alpha, field.mul(a, a)).unwrap();
        let ai = sys.idx_of(&alpha).unwrap();
        let mask = sys.coords_mod2(ai);
        for t in 0..sys.rank() {
            if mask >> t & 1 == 1 {
                expect.set_h(t, a);
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn one_parameter_subgroup_law() {
        let (sys, field) = setup(RootSystemId::E6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = sys.root_at(rng.gen_range(0..sys.num_roots()) as u16);
            let (a, b) = (field.sample(&mut rng), field.sample(&mut rng));
            let v = random_vec(&sys, &field, &mut rng, 6);
            let lhs = apply_x(&alpha, a, &apply_x(&alpha, b, &v).unwrap()).unwrap();
            let rhs = apply_x(&alpha, field.add(a, b), &v).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn action_is_automorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in RootSystemId::all() {
            let (sys, field) = setup(id, 2);
            for _ in 0..40 {
                let alpha = sys.root_at(rng.gen_range(0..sys.num_roots()) as u16);
                let a = field.sample(&mut rng);
                let u = random_vec(&sys, &field, &mut rng, 5);
                let v = random_vec(&sys, &field, &mut rng, 5);
                let lhs = apply_x(&alpha, a, &bracket(&u, &v).unwrap()).unwrap();
                let rhs = bracket(
                    &apply_x(&alpha, a, &u).unwrap(),
                    &apply_x(&alpha, a, &v).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn apply_word_basics() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_vec(&sys, &field, &mut rng, 8);
        assert_eq!(apply_word(&GroupWord::identity(), &v).unwrap(), v);
        let alpha = sys.root_at(20);
        let a = Fel(3);
        assert_eq!(
            apply_word(&GroupWord::single(alpha, a), &v).unwrap(),
            apply_x(&alpha, a, &v).unwrap()
        );
        // a word followed by itself reversed cancels factor by factor
        let w = GroupWord {
            factors: vec![(sys.root_at(4), Fel(2)), (sys.root_at(9), Fel(1))],
        };
        let mut back = w.factors.clone();
        back.reverse();
        let cancel = GroupWord { factors: back }.compose(w);
        assert_eq!(apply_word(&cancel, &v).unwrap(), v);
    }

    #[test]
    fn w_word_is_diagonal() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        for &ai in sys.layer_list(0).iter().take(6) {
            let alpha = sys.root_at(ai);
            for a in field.elements().skip(1) {
                let w = w_word(&sys, &field, &alpha, a).unwrap();
                for b in 0..sys.num_roots() as u16 {
                    let eb = ChevVec::basis_e(sys.clone(), field.clone(), &sys.root_at(b)).unwrap();
                    let got = apply_word(&w, &eb).unwrap();
                    let layer = sys.inner_idx(ai, b) as i64;
                    let order = (field.order() - 1) as i64;
                    let exp = (-layer).rem_euclid(order) as u64;
                    let scale = field.pow(a, exp);
                    assert_eq!(got, eb.scale(scale), "alpha={alpha} b={}", sys.root_at(b));
                }
                // the Cartan subalgebra is fixed
                for i in 0..sys.rank() {
                    let h = ChevVec::basis_h(sys.clone(), field.clone(), i);
                    assert_eq!(apply_word(&w, &h).unwrap(), h);
                }
            }
        }
    }

    #[test]
    fn w_word_at_one_is_identity() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let alpha = sys.root_at(sys.layer_list(0)[3]);
        let w = w_word(&sys, &field, &alpha, Fel::ONE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_vec(&sys, &field, &mut rng, 10);
        assert_eq!(apply_word(&w, &v).unwrap(), v);
        assert!(w_word(&sys, &field, &alpha, Fel::ZERO).is_err());
    }

    #[test]
    fn v1_stability() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        for &ai in sys.layer_list(0) {
            let alpha = sys.root_at(ai);
            for &bi in sys.layer_list(1) {
                let eb = ChevVec::basis_e(sys.clone(), field.clone(), &sys.root_at(bi)).unwrap();
                for a in [Fel::ONE, Fel(2)] {
                    assert!(apply_x(&alpha, a, &eb).unwrap().in_v1());
                }
            }
        }
    }

    #[test]
    fn ad_rank_examples() {
        let (sys, field) = setup(RootSystemId::E6, 1);
        let zero = ChevVec::zero(sys.clone(), field.clone());
        assert_eq!(ad_rank(&zero, 1).unwrap(), 0);
        let ed = ChevVec::basis_e(sys.clone(), field.clone(), &sys.delta()).unwrap();
        // image of ad e_delta: the 20 vectors e_{delta+b} for b in the
        // opposite layer, plus h_delta, plus e_delta itself
        assert_eq!(ad_rank(&ed, 1).unwrap(), 22);
        assert!(ad_rank(&ed, 3).is_err());
    }

    #[test]
    fn ad_rank_conjugation_invariant() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let v = random_vec(&sys, &field, &mut rng, 4);
            let alpha = sys.root_at(rng.gen_range(0..sys.num_roots()) as u16);
            let a = field.sample_nonzero(&mut rng);
            let moved = apply_x(&alpha, a, &v).unwrap();
            for p in [1, 2] {
                assert_eq!(ad_rank(&v, p).unwrap(), ad_rank(&moved, p).unwrap());
            }
        }
    }

    #[test]
    fn mixed_operands_rejected() {
        let (s6, f2) = setup(RootSystemId::E6, 1);
        let (s7, _) = setup(RootSystemId::E7, 1);
        let f4 = make_field(2).unwrap();
        let a = ChevVec::zero(s6.clone(), f2.clone());
        let b = ChevVec::zero(s7, f2);
        let c = ChevVec::zero(s6, f4);
        assert!(bracket(&a, &b).is_err());
        assert!(bracket(&a, &c).is_err());
    }
}
