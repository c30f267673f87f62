//! Orbit invariants of the layer-one module: the unipotent lift, the Cartan
//! coefficient `t`, the additive class of the lowest coefficient, the rank
//! profile, and the classifier assembling them into an orbit label.
//!
//! Every vector `x` in V1 lifts to elements `y` with `y^delta = 1` that agree
//! with `x` on the first layer; the lifts differ by the choice of one scalar.
//! The coefficient of `y` at `h_k` (the simple Cartan generator paired with
//! the maximal root) does not depend on that choice, and the coefficient at
//! the opposite of the maximal root moves inside a single `~_t` class. The
//! pair `(t, class)` separates the two-parameter orbit family; ties at
//! `t = 0, class = 0` are broken by the conjugation-invariant rank profile
//! of the adjoint operator.

use crate::error::{Error, Result};
use crate::gf2k::{Fel, Field};
use crate::liealg::{ad_rank, apply_x_idx, ChevVec};
use crate::rootsys::RootSystem;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Orbit name per the classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitLabel {
    Zero,
    Singular,
    Shiny,
    Luminous,
    /// Two-parameter family: the Cartan invariant `s != 0` and the class
    /// representative of the lowest lift coefficient under `~_s`.
    Fam { s: Fel, class: Fel },
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Zero => write!(f, "zero"),
            OrbitLabel::Singular => write!(f, "singular"),
            OrbitLabel::Shiny => write!(f, "shiny"),
            OrbitLabel::Luminous => write!(f, "luminous"),
            OrbitLabel::Fam { s, class } => write!(f, "fam(s={s}, class={class})"),
        }
    }
}

impl OrbitLabel {
    /// The angle adjective, where the classification assigns one. Family
    /// orbits with a nonzero class consist of dark vectors (every lift has a
    /// nonzero lowest coefficient); over GF(2) the `class = 0` family orbit
    /// consists of luminous vectors.
    pub fn adjective(&self, field: &Field) -> Option<&'static str> {
        match self {
            OrbitLabel::Zero => None,
            OrbitLabel::Singular => Some("singular"),
            OrbitLabel::Shiny => Some("shiny"),
            OrbitLabel::Luminous => Some("luminous"),
            OrbitLabel::Fam { class, .. } if !class.is_zero() => Some("dark"),
            OrbitLabel::Fam { .. } if field.order() == 2 => Some("luminous"),
            OrbitLabel::Fam { .. } => None,
        }
    }
}

/// The invariant tuple attached to a vector of V1. `rank_profile` is
/// meaningful only when `t = 0` and `cls = 0`; it is `(0, 0)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub is_zero: bool,
    pub t: Fel,
    pub cls: Fel,
    pub rank_profile: (u16, u16),
}

fn require_v1(x: &ChevVec) -> Result<()> {
    if x.in_v1() {
        Ok(())
    } else {
        Err(Error::NotInTopLayer)
    }
}

/// Lift with an explicit order on the opposite-layer factors; the canonical
/// entry point is [`lift`].
pub(crate) fn lift_with_order(x: &ChevVec, a: Fel, gammas: &[u16]) -> Result<ChevVec> {
    require_v1(x)?;
    let sys = x.sys();
    let field = x.field();
    let delta = sys.delta_idx();
    let mut y = ChevVec::basis_e(sys.clone(), field.clone(), &sys.delta())?;
    for &g in gammas {
        debug_assert_eq!(sys.layer_of(g), -1);
        let coeff = x.e_at(sys.sum_idx(delta, g).expect("delta plus opposite-layer root"));
        if !coeff.is_zero() {
            y = apply_x_idx(g, coeff, &y);
        }
    }
    if !a.is_zero() {
        y = apply_x_idx(sys.neg_idx(delta), a, &y);
    }
    Ok(y)
}

/// The unipotent lift `y = u * e_delta`: `y^delta = 1`, `y` agrees with `x`
/// on the first layer, and the free parameter `a` selects the member of the
/// lift series. Factors over the opposite layer are applied in ascending
/// canonical root order.
pub fn lift(x: &ChevVec, a: Fel) -> Result<ChevVec> {
    lift_with_order(x, a, x.sys().layer_list(-1))
}

/// The coefficient of the lift at `h_k`; independent of the lift parameter.
pub fn t_of(x: &ChevVec) -> Result<Fel> {
    Ok(lift(x, Fel::ZERO)?.get_h(x.sys().alpha_k()))
}

/// The `~_t` class representative of the lift coefficient at the opposite of
/// the maximal root; lifts differ by `a^2 + a*t`, so the class is well
/// defined.
pub fn delta_class_of(x: &ChevVec) -> Result<Fel> {
    let sys = x.sys();
    let y = lift(x, Fel::ZERO)?;
    let t = y.get_h(sys.alpha_k());
    let low = y.e_at(sys.neg_idx(sys.delta_idx()));
    Ok(x.field().as_class_of(t, low))
}

/// The unique lift with a zero coefficient at the opposite of the maximal
/// root; exists exactly when `t = 0` and the class is zero.
pub fn zero_lift(x: &ChevVec) -> Result<ChevVec> {
    let sys = x.sys();
    let field = x.field();
    let y0 = lift(x, Fel::ZERO)?;
    let t = y0.get_h(sys.alpha_k());
    let low = y0.e_at(sys.neg_idx(sys.delta_idx()));
    if !t.is_zero() || !field.as_class_of(t, low).is_zero() {
        return Err(Error::Precondition(
            "zero lift requires t = 0 and class 0".into(),
        ));
    }
    let a = field.sqrt(low);
    let y = lift(x, a)?;
    debug_assert!(y.e_at(sys.neg_idx(sys.delta_idx())).is_zero());
    Ok(y)
}

/// Ranks of `ad x` and `(ad x)^2` on the full module; constant on orbits.
pub fn rank_signature(x: &ChevVec) -> Result<(u16, u16)> {
    require_v1(x)?;
    Ok((ad_rank(x, 1)? as u16, ad_rank(x, 2)? as u16))
}

/// The canonical representative for an orbit label, built on the canonical
/// quadruple.
pub fn canonical_rep(
    sys: &Arc<RootSystem>,
    field: &Arc<Field>,
    label: OrbitLabel,
) -> Result<ChevVec> {
    let q = sys.find_quadruple(None)?;
    let mut v = ChevVec::zero(sys.clone(), field.clone());
    match label {
        OrbitLabel::Zero => {}
        OrbitLabel::Singular => v.set_e(&q.lambda, Fel::ONE)?,
        OrbitLabel::Shiny => {
            v.set_e(&q.lambda, Fel::ONE)?;
            v.set_e(&q.mu, Fel::ONE)?;
        }
        OrbitLabel::Luminous => {
            v.set_e(&q.lambda, Fel::ONE)?;
            v.set_e(&q.mu, Fel::ONE)?;
            v.set_e(&q.nu, Fel::ONE)?;
        }
        OrbitLabel::Fam { s, class } => {
            if s.is_zero() || !field.contains(s) || !field.contains(class) {
                return Err(Error::InvalidLabel(label.to_string()));
            }
            if field.as_class_of(s, class) != class {
                return Err(Error::InvalidLabel(format!(
                    "{label}: {class} is not a class representative"
                )));
            }
            let li = sys.idx_of(&q.lambda).unwrap();
            let rest = sys.root_at(sys.partner_idx(li));
            v.set_e(&q.lambda, Fel::ONE)?;
            v.set_e(&rest, s)?;
            v.set_e(&q.mu, Fel::ONE)?;
            v.set_e(&q.nu, Fel::ONE)?;
            v.set_e(&q.xi, class)?;
        }
    }
    Ok(v)
}

/// Every orbit label over the given field: the four fixed ones plus the
/// two-parameter family, 4 + 2(|K| - 1) in total.
pub fn all_labels(field: &Field) -> Vec<OrbitLabel> {
    let mut out = vec![
        OrbitLabel::Zero,
        OrbitLabel::Singular,
        OrbitLabel::Shiny,
        OrbitLabel::Luminous,
    ];
    for s in field.elements().skip(1) {
        let mut reps: Vec<Fel> = field.elements().map(|a| field.as_class_of(s, a)).collect();
        reps.sort();
        reps.dedup();
        for class in reps {
            out.push(OrbitLabel::Fam { s, class });
        }
    }
    out
}

/// Classifier for one (root system, field) pair. Construction computes the
/// rank profiles of the three `t = 0` canonical representatives and refuses
/// to proceed if any two collide.
pub struct Classifier {
    sys: Arc<RootSystem>,
    field: Arc<Field>,
    table: BTreeMap<(u16, u16), OrbitLabel>,
}

impl Classifier {
    pub fn new(sys: Arc<RootSystem>, field: Arc<Field>) -> Result<Classifier> {
        let mut table = BTreeMap::new();
        for label in [OrbitLabel::Singular, OrbitLabel::Shiny, OrbitLabel::Luminous] {
            let rep = canonical_rep(&sys, &field, label)?;
            debug_assert!(t_of(&rep)?.is_zero());
            let profile = rank_signature(&rep)?;
            if let Some(prev) = table.insert(profile, label) {
                return Err(Error::RankCollision(format!(
                    "{prev} and {label} share rank profile {profile:?} on {} over GF({})",
                    sys.id(),
                    field.order()
                )));
            }
        }
        Ok(Classifier { sys, field, table })
    }

    pub fn sys(&self) -> &Arc<RootSystem> {
        &self.sys
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Rank profile -> label table for the `t = 0` orbits.
    pub fn profile_table(&self) -> &BTreeMap<(u16, u16), OrbitLabel> {
        &self.table
    }

    /// The full invariant tuple of `x`.
    pub fn signature(&self, x: &ChevVec) -> Result<Signature> {
        require_v1(x)?;
        let sys = &self.sys;
        if x.is_zero() {
            return Ok(Signature {
                is_zero: true,
                t: Fel::ZERO,
                cls: Fel::ZERO,
                rank_profile: (0, 0),
            });
        }
        let y = lift(x, Fel::ZERO)?;
        let t = y.get_h(sys.alpha_k());
        let low = y.e_at(sys.neg_idx(sys.delta_idx()));
        let cls = self.field.as_class_of(t, low);
        let rank_profile = if t.is_zero() && cls.is_zero() {
            rank_signature(x)?
        } else {
            (0, 0)
        };
        Ok(Signature {
            is_zero: false,
            t,
            cls,
            rank_profile,
        })
    }

    /// Decision tree over the signature.
    pub fn classify(&self, x: &ChevVec) -> Result<OrbitLabel> {
        let sig = self.signature(x)?;
        self.label_of(&sig)
    }

    pub fn label_of(&self, sig: &Signature) -> Result<OrbitLabel> {
        if sig.is_zero {
            return Ok(OrbitLabel::Zero);
        }
        if !sig.t.is_zero() {
            return Ok(OrbitLabel::Fam {
                s: sig.t,
                class: sig.cls,
            });
        }
        if !sig.cls.is_zero() {
            return Err(Error::Precondition(
                "t = 0 with a nonzero class can only occur over imperfect fields".into(),
            ));
        }
        self.table.get(&sig.rank_profile).copied().ok_or_else(|| {
            Error::Internal(format!(
                "rank profile {:?} matches no t = 0 orbit",
                sig.rank_profile
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2k::make_field;
    use crate::liealg::{apply_word, GroupWord};
    use crate::rootsys::{build_root_system, RootSystemId};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn setup(id: RootSystemId, k: u32) -> (Arc<RootSystem>, Arc<Field>) {
        (build_root_system(id), make_field(k).unwrap())
    }

    /// A quintuple-shaped vector on the canonical quadruple.
    fn quintuple(
        sys: &Arc<RootSystem>,
        field: &Arc<Field>,
        c: [Fel; 5],
    ) -> (ChevVec, crate::rootsys::Quadruple) {
        let q = sys.find_quadruple(None).unwrap();
        let li = sys.idx_of(&q.lambda).unwrap();
        let rest = sys.root_at(sys.partner_idx(li));
        let mut v = ChevVec::zero(sys.clone(), field.clone());
        v.set_e(&q.lambda, c[0]).unwrap();
        v.set_e(&rest, c[1]).unwrap();
        v.set_e(&q.mu, c[2]).unwrap();
        v.set_e(&q.nu, c[3]).unwrap();
        v.set_e(&q.xi, c[4]).unwrap();
        (v, q)
    }

    fn random_v1(sys: &Arc<RootSystem>, field: &Arc<Field>, rng: &mut ChaCha8Rng) -> ChevVec {
        let mut v = ChevVec::zero(sys.clone(), field.clone());
        let phi1 = sys.layer_list(1);
        for &i in phi1 {
            if rng.gen_bool(0.5) {
                let root = sys.root_at(i);
                v.set_e(&root, field.sample(rng)).unwrap();
            }
        }
        v
    }

    #[test]
    fn lift_of_zero_is_e_delta() {
        let (sys, field) = setup(RootSystemId::E6, 1);
        let zero = ChevVec::zero(sys.clone(), field.clone());
        let y = lift(&zero, Fel::ZERO).unwrap();
        let ed = ChevVec::basis_e(sys.clone(), field.clone(), &sys.delta()).unwrap();
        assert_eq!(y, ed);
        assert_eq!(zero_lift(&zero).unwrap(), ed);
    }

    #[test]
    fn lift_of_all_ones_quintuple() {
        let (sys, field) = setup(RootSystemId::E6, 1);
        let one = Fel::ONE;
        let (x, q) = quintuple(&sys, &field, [one; 5]);
        let y = lift(&x, Fel::ZERO).unwrap();
        assert_eq!(y.e_at(sys.neg_idx(sys.delta_idx())), Fel::ONE);
        for (i, &c) in q.lambda.coords().iter().enumerate() {
            let expect = if c % 2 == 1 { Fel::ONE } else { Fel::ZERO };
            assert_eq!(y.get_h(i), expect);
        }
    }

    #[test]
    fn lift_low_lambda_coefficient() {
        // coefficient at e_{-lambda} must be x^xi x^nu x^mu + (x^{d-l})^2 x^l
        let (sys, field) = setup(RootSystemId::E6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let c: [Fel; 5] = std::array::from_fn(|_| field.sample(&mut rng));
            let (x, q) = quintuple(&sys, &field, c);
            let y = lift(&x, Fel::ZERO).unwrap();
            let got = y.get_e(&q.lambda.negated()).unwrap();
            let expect = field.add(
                field.mul(c[4], field.mul(c[3], c[2])),
                field.mul(field.mul(c[1], c[1]), c[0]),
            );
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn lift_series_agrees_on_layer_one() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let x = random_v1(&sys, &field, &mut rng);
        let y0 = lift(&x, Fel::ZERO).unwrap();
        for a in field.elements() {
            let y = lift(&x, a).unwrap();
            assert_eq!(y.e_at(sys.delta_idx()), Fel::ONE);
            for &i in sys.layer_list(1) {
                assert_eq!(y.e_at(i), x.e_at(i));
            }
            assert_eq!(y.get_h(sys.alpha_k()), y0.get_h(sys.alpha_k()));
            let t = y.get_h(sys.alpha_k());
            let low = y.e_at(sys.neg_idx(sys.delta_idx()));
            let low0 = y0.e_at(sys.neg_idx(sys.delta_idx()));
            assert_eq!(field.as_class_of(t, low), field.as_class_of(t, low0));
        }
    }

    #[test]
    fn lift_order_independence_of_invariants() {
        let (sys, field) = setup(RootSystemId::E6, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let x = random_v1(&sys, &field, &mut rng);
            let t = t_of(&x).unwrap();
            let cls = delta_class_of(&x).unwrap();
            let mut gammas: Vec<u16> = sys.layer_list(-1).to_vec();
            for _ in 0..4 {
                gammas.shuffle(&mut rng);
                let y = lift_with_order(&x, Fel::ZERO, &gammas).unwrap();
                assert_eq!(y.get_h(sys.alpha_k()), t);
                let low = y.e_at(sys.neg_idx(sys.delta_idx()));
                assert_eq!(field.as_class_of(t, low), cls);
            }
        }
    }

    #[test]
    fn t_examples() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        // quintuple (1, s, 1, 1, c) has t = s
        for s in field.elements() {
            for c in field.elements() {
                let (x, _) = quintuple(&sys, &field, [Fel::ONE, s, Fel::ONE, Fel::ONE, c]);
                assert_eq!(t_of(&x).unwrap(), s);
                assert_eq!(
                    delta_class_of(&x).unwrap(),
                    field.as_class_of(s, c),
                    "s={s} c={c}"
                );
            }
        }
        // types with no partner coefficient have t = 0
        let (sys2, field2) = setup(RootSystemId::E6, 1);
        for label in [OrbitLabel::Singular, OrbitLabel::Shiny, OrbitLabel::Luminous] {
            let rep = canonical_rep(&sys2, &field2, label).unwrap();
            assert_eq!(t_of(&rep).unwrap(), Fel::ZERO);
        }
        // over GF(2): the pair orbit has t = 1 and class 0, the full support
        // orbit has t = 1 and class 1
        let (x6, _) = quintuple(
            &sys2,
            &field2,
            [Fel::ONE, Fel::ONE, Fel::ZERO, Fel::ZERO, Fel::ZERO],
        );
        assert_eq!(t_of(&x6).unwrap(), Fel::ONE);
        assert_eq!(delta_class_of(&x6).unwrap(), Fel::ZERO);
        let (x9, _) = quintuple(&sys2, &field2, [Fel::ONE; 5]);
        assert_eq!(t_of(&x9).unwrap(), Fel::ONE);
        assert_eq!(delta_class_of(&x9).unwrap(), Fel::ONE);
    }

    #[test]
    fn zero_lift_contract() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let q = sys.find_quadruple(None).unwrap();
        let x = ChevVec::basis_e(sys.clone(), field.clone(), &q.lambda).unwrap();
        let y = zero_lift(&x).unwrap();
        let support: Vec<u16> = y.support_e().map(|(i, _)| i).collect();
        assert_eq!(
            support,
            vec![
                sys.idx_of(&q.lambda).unwrap(),
                sys.delta_idx()
            ]
            .into_iter()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>()
        );
        assert!(y.e_at(sys.neg_idx(sys.delta_idx())).is_zero());
        // not defined when t != 0
        let (x9, _) = quintuple(&sys, &field, [Fel::ONE; 5]);
        assert!(zero_lift(&x9).is_err());
    }

    #[test]
    fn classifier_table_and_examples() {
        let (sys, field) = setup(RootSystemId::E6, 1);
        let cls = Classifier::new(sys.clone(), field.clone()).unwrap();
        assert_eq!(cls.profile_table().len(), 3);

        let q = sys.find_quadruple(None).unwrap();
        let e_lam = ChevVec::basis_e(sys.clone(), field.clone(), &q.lambda).unwrap();
        assert_eq!(cls.classify(&e_lam).unwrap(), OrbitLabel::Singular);

        let zero = ChevVec::zero(sys.clone(), field.clone());
        assert_eq!(cls.classify(&zero).unwrap(), OrbitLabel::Zero);

        let (x6, _) = quintuple(
            &sys,
            &field,
            [Fel::ONE, Fel::ONE, Fel::ZERO, Fel::ZERO, Fel::ZERO],
        );
        let got = cls.classify(&x6).unwrap();
        assert_eq!(
            got,
            OrbitLabel::Fam {
                s: Fel::ONE,
                class: Fel::ZERO
            }
        );
        assert_eq!(got.adjective(&field), Some("luminous"));

        let (x9, _) = quintuple(&sys, &field, [Fel::ONE; 5]);
        let got = cls.classify(&x9).unwrap();
        assert_eq!(
            got,
            OrbitLabel::Fam {
                s: Fel::ONE,
                class: Fel::ONE
            }
        );
        assert_eq!(got.adjective(&field), Some("dark"));
    }

    #[test]
    fn classify_family_over_gf4() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        let cls = Classifier::new(sys.clone(), field.clone()).unwrap();
        for s in field.elements().skip(1) {
            for c in field.elements() {
                let (x, _) = quintuple(&sys, &field, [Fel::ONE, s, Fel::ONE, Fel::ONE, c]);
                assert_eq!(
                    cls.classify(&x).unwrap(),
                    OrbitLabel::Fam {
                        s,
                        class: field.as_class_of(s, c)
                    }
                );
            }
        }
    }

    #[test]
    fn classification_is_word_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let (sys, field) = setup(RootSystemId::E6, 2);
        let cls = Classifier::new(sys.clone(), field.clone()).unwrap();
        let phi0 = sys.layer_list(0);
        for _ in 0..30 {
            let x = random_v1(&sys, &field, &mut rng);
            let label = cls.classify(&x).unwrap();
            let factors: Vec<_> = (0..rng.gen_range(1..12))
                .map(|_| {
                    let alpha = sys.root_at(phi0[rng.gen_range(0..phi0.len())]);
                    (alpha, field.sample(&mut rng))
                })
                .collect();
            let moved = apply_word(&GroupWord { factors }, &x).unwrap();
            assert_eq!(cls.classify(&moved).unwrap(), label);
        }
    }

    #[test]
    fn canonical_reps_and_labels() {
        let (sys, field) = setup(RootSystemId::E6, 2);
        assert!(canonical_rep(&sys, &field, OrbitLabel::Zero)
            .unwrap()
            .is_zero());
        let shiny = canonical_rep(&sys, &field, OrbitLabel::Shiny).unwrap();
        assert_eq!(shiny.support_size(), 2);
        // s = 0 is not a valid family label, nor is a non-representative class
        assert!(canonical_rep(
            &sys,
            &field,
            OrbitLabel::Fam {
                s: Fel::ZERO,
                class: Fel::ZERO
            }
        )
        .is_err());
        let s = Fel(2);
        let non_rep = field
            .elements()
            .find(|&c| field.as_class_of(s, c) != c)
            .unwrap();
        assert!(canonical_rep(&sys, &field, OrbitLabel::Fam { s, class: non_rep }).is_err());
    }

    #[test]
    fn signature_completeness() {
        for k in [1u32, 2, 3] {
            let (sys, field) = setup(RootSystemId::E6, k);
            let cls = Classifier::new(sys.clone(), field.clone()).unwrap();
            let labels = all_labels(&field);
            assert_eq!(labels.len() as u32, 4 + 2 * (field.order() - 1));
            let mut sigs = Vec::new();
            for &label in &labels {
                let rep = canonical_rep(&sys, &field, label).unwrap();
                let sig = cls.signature(&rep).unwrap();
                assert_eq!(cls.label_of(&sig).unwrap(), label);
                sigs.push(sig);
            }
            sigs.sort();
            sigs.dedup();
            assert_eq!(sigs.len(), labels.len());
        }
    }
}
