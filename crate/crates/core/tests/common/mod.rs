//! Shared helpers for the integration suites: the closed-form lift oracle
//! and vector samplers. The oracle is written out term by term, independent
//! of the group-action code it checks.
#![allow(dead_code)] // each test target uses its own subset

use chevorbit::gf2k::{Fel, Field};
use chevorbit::liealg::{ChevVec, GroupWord};
use chevorbit::rootsys::{Quadruple, Root, RootSystem};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A vector on the five-root frame (lambda, delta-lambda, mu, nu, xi).
pub fn frame_vector(
    sys: &Arc<RootSystem>,
    field: &Arc<Field>,
    quad: &Quadruple,
    c: [Fel; 5],
) -> ChevVec {
    let li = sys.idx_of(&quad.lambda).unwrap();
    let partner = sys.root_at(sys.partner_idx(li));
    let mut v = ChevVec::zero(sys.clone(), field.clone());
    v.set_e(&quad.lambda, c[0]).unwrap();
    v.set_e(&partner, c[1]).unwrap();
    v.set_e(&quad.mu, c[2]).unwrap();
    v.set_e(&quad.nu, c[3]).unwrap();
    v.set_e(&quad.xi, c[4]).unwrap();
    v
}

fn root_minus(a: Root, b: Root) -> Root {
    Root::from_coords(
        &a.coords()
            .iter()
            .zip(b.coords())
            .map(|(p, q)| p - q)
            .collect::<Vec<_>>(),
    )
}

/// The closed form of the lift of a frame vector at parameter 0: the maximal
/// root, the five frame coefficients, the twelve product cross terms, the
/// four opposite-root terms, the opposite maximal term, and the Cartan part.
pub fn closed_form_lift(
    sys: &Arc<RootSystem>,
    field: &Arc<Field>,
    quad: &Quadruple,
    c: [Fel; 5],
) -> ChevVec {
    let [cl, cd, cm, cn, cx] = c;
    let f = field;
    let d = sys.delta();
    let (l, m, n, x) = (quad.lambda, quad.mu, quad.nu, quad.xi);
    let mul = |a: Fel, b: Fel| f.mul(a, b);
    let mul3 = |a: Fel, b: Fel, cc: Fel| f.mul(a, f.mul(b, cc));
    let terms: Vec<(Root, Fel)> = vec![
        (d, Fel::ONE),
        (l, cl),
        (m, cm),
        (n, cn),
        (x, cx),
        (root_minus(d, l), cd),
        (root_minus(m, root_minus(d, l)), mul(cm, cl)),
        (root_minus(n, root_minus(d, l)), mul(cn, cl)),
        (root_minus(n, root_minus(d, m)), mul(cn, cm)),
        (root_minus(x, root_minus(d, l)), mul(cx, cl)),
        (root_minus(x, root_minus(d, m)), mul(cx, cm)),
        (root_minus(x, root_minus(d, n)), mul(cx, cn)),
        (x.negated(), mul3(cn, cm, cl)),
        (n.negated(), mul3(cx, cm, cl)),
        (m.negated(), mul3(cx, cn, cl)),
        (l.negated(), f.add(mul3(cx, cn, cm), mul(mul(cd, cd), cl))),
        (d.negated(), mul(mul(cx, cn), mul(cm, cl))),
        (root_minus(m, d), mul3(cd, cm, cl)),
        (root_minus(n, d), mul3(cd, cn, cl)),
        (root_minus(x, d), mul3(cd, cx, cl)),
    ];
    let mut y = ChevVec::zero(sys.clone(), field.clone());
    for (root, coeff) in terms {
        if !coeff.is_zero() {
            let prev = y.get_e(&root).unwrap();
            y.set_e(&root, f.add(prev, coeff)).unwrap();
        }
    }
    let s = mul(cd, cl);
    if !s.is_zero() {
        for (i, &co) in l.coords().iter().enumerate() {
            if co.rem_euclid(2) == 1 {
                y.set_h(i, s);
            }
        }
    }
    y
}

/// Layer-one vector with a uniformly drawn support size, then uniform
/// nonzero coefficients; small orbits appear at useful rates.
pub fn stratified_v1(
    sys: &Arc<RootSystem>,
    field: &Arc<Field>,
    rng: &mut ChaCha8Rng,
) -> ChevVec {
    let mut idxs: Vec<u16> = sys.layer_list(1).to_vec();
    let dim = idxs.len();
    let u = rng.gen_range(0..=dim);
    for j in 0..u {
        let t = rng.gen_range(j..dim);
        idxs.swap(j, t);
    }
    let mut v = ChevVec::zero(sys.clone(), field.clone());
    for &i in &idxs[..u] {
        let root = sys.root_at(i);
        v.set_e(&root, field.sample_nonzero(rng)).unwrap();
    }
    v
}

/// A random word over the roots orthogonal to delta.
pub fn random_word(
    sys: &Arc<RootSystem>,
    field: &Arc<Field>,
    rng: &mut ChaCha8Rng,
    max_len: usize,
) -> GroupWord {
    let phi0 = sys.layer_list(0);
    let len = rng.gen_range(1..=max_len);
    let factors = (0..len)
        .map(|_| {
            let alpha = sys.root_at(phi0[rng.gen_range(0..phi0.len())]);
            (alpha, field.sample(rng))
        })
        .collect();
    GroupWord { factors }
}
