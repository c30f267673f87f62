//! Constructive reductions in the layer-one module: scale normalization by
//! diagonal elements, the three-factor cross-term sweep of the last
//! coefficient, best-effort reduction of an arbitrary vector to the
//! five-root frame, and full canonicalization to the orbit representative.
//! Every operation returns a witness word over roots orthogonal to the
//! maximal root, so correctness is checkable by applying the word.

use crate::error::{Error, Result};
use crate::gf2k::{Fel, Field};
use crate::invariants::{canonical_rep, Classifier, OrbitLabel};
use crate::liealg::{apply_word, apply_x_idx, ChevVec, GroupWord};
use crate::rootsys::{Quadruple, Root, RootSystem};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Arc;

/// A vector supported on the five-root frame of a quadruple: coefficients at
/// (lambda, delta-lambda, mu, nu, xi).
#[derive(Clone, Debug)]
pub struct QuintupleVec {
    sys: Arc<RootSystem>,
    field: Arc<Field>,
    pub quad: Quadruple,
    pub coeffs: [Fel; 5],
}

impl PartialEq for QuintupleVec {
    fn eq(&self, other: &Self) -> bool {
        self.sys.id() == other.sys.id()
            && *self.field == *other.field
            && self.quad == other.quad
            && self.coeffs == other.coeffs
    }
}

impl QuintupleVec {
    pub fn new(
        sys: Arc<RootSystem>,
        field: Arc<Field>,
        quad: Quadruple,
        coeffs: [Fel; 5],
    ) -> QuintupleVec {
        QuintupleVec {
            sys,
            field,
            quad,
            coeffs,
        }
    }

    pub fn sys(&self) -> &Arc<RootSystem> {
        &self.sys
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// The five frame roots (lambda, delta-lambda, mu, nu, xi).
    pub fn frame_roots(&self) -> [Root; 5] {
        let sys = &self.sys;
        let li = sys.idx_of(&self.quad.lambda).unwrap();
        let rest = sys.root_at(sys.partner_idx(li));
        [
            self.quad.lambda,
            rest,
            self.quad.mu,
            self.quad.nu,
            self.quad.xi,
        ]
    }

    pub fn to_chev(&self) -> ChevVec {
        let mut v = ChevVec::zero(self.sys.clone(), self.field.clone());
        for (root, c) in self.frame_roots().iter().zip(self.coeffs.iter()) {
            v.set_e(root, *c).unwrap();
        }
        v
    }
}

fn frame_indices(sys: &RootSystem, quad: &Quadruple) -> [u16; 5] {
    let li = sys.idx_of(&quad.lambda).unwrap();
    [
        li,
        sys.partner_idx(li),
        sys.idx_of(&quad.mu).unwrap(),
        sys.idx_of(&quad.nu).unwrap(),
        sys.idx_of(&quad.xi).unwrap(),
    ]
}

/// Accumulates factors in application order and renders them as a word.
struct WordBuilder {
    applied: Vec<(u16, Fel)>,
}

impl WordBuilder {
    fn new() -> WordBuilder {
        WordBuilder {
            applied: Vec::new(),
        }
    }

    fn push(&mut self, root_idx: u16, a: Fel) {
        if !a.is_zero() {
            self.applied.push((root_idx, a));
        }
    }

    fn finish(self, sys: &RootSystem) -> GroupWord {
        let factors = self
            .applied
            .into_iter()
            .rev()
            .map(|(i, a)| (sys.root_at(i), a))
            .collect();
        GroupWord { factors }
    }
}

/// Makes the lambda, mu, nu coefficients 1 by three diagonal elements chosen
/// through angle constraints. The partner coefficient becomes the product of
/// the original lambda pair, the xi coefficient the product of all four
/// quadruple coefficients.
pub fn normalize_scales(x: &QuintupleVec) -> Result<(QuintupleVec, GroupWord)> {
    let sys = &x.sys;
    let field = &x.field;
    let [c_l, c_d, c_m, c_n, c_x] = x.coeffs;
    if c_l.is_zero() || c_m.is_zero() || c_n.is_zero() {
        return Err(Error::Precondition(
            "scale normalization needs nonzero lambda, mu, nu coefficients".into(),
        ));
    }
    let q = &x.quad;
    let mut out = [c_l, c_d, c_m, c_n, c_x];
    let mut word = GroupWord::identity();
    let plans: [(usize, [i32; 4]); 3] = [
        (0, [1, 0, 0, -1]),
        (2, [0, 1, 0, -1]),
        (3, [0, 0, 1, -1]),
    ];
    for (slot, pattern) in plans {
        let a = out[slot];
        if a == Fel::ONE {
            continue;
        }
        let constraints: Vec<(Root, i32)> = q
            .roots()
            .iter()
            .zip(pattern.iter())
            .map(|(r, c)| (*r, *c))
            .collect();
        let alpha = sys
            .find_angle_root(&constraints)?
            .ok_or(Error::NoAngleRoot)?;
        let w = crate::liealg::w_word(sys, field, &alpha, a)?;
        word = w.compose(word);
        // the diagonal action scales e_b by a^(-(alpha,b))
        out[slot] = Fel::ONE;
        out[4] = field.mul(out[4], a);
        if slot == 0 {
            out[1] = field.mul(out[1], a);
        }
    }
    let result = QuintupleVec::new(sys.clone(), field.clone(), *q, out);
    debug_assert_eq!(apply_word(&word, &x.to_chev())?, result.to_chev());
    Ok((result, word))
}

/// The three-factor sweep: changes only the xi coefficient, by
/// `k*c_partner + k^2 * c_mu c_nu / c_lambda`.
pub fn sweep_xi(x: &QuintupleVec, k: Fel) -> Result<(QuintupleVec, GroupWord)> {
    let sys = &x.sys;
    let field = &x.field;
    let [c_l, c_d, c_m, c_n, c_x] = x.coeffs;
    if c_l.is_zero() {
        return Err(Error::Precondition(
            "the sweep needs a nonzero lambda coefficient".into(),
        ));
    }
    if k.is_zero() {
        return Ok((x.clone(), GroupWord::identity()));
    }
    let [li, _, mi, ni, _] = frame_indices(sys, &x.quad);
    let di = sys.partner_idx(li);
    // delta-lambda-mu, delta-lambda-nu, delta-mu-nu
    let d_l_m = sys.sum_idx(di, sys.neg_idx(mi)).expect("root");
    let d_l_n = sys.sum_idx(di, sys.neg_idx(ni)).expect("root");
    let d_m_n = sys
        .sum_idx(sys.partner_idx(mi), sys.neg_idx(ni))
        .expect("root");
    let inv_l = field.inv(c_l)?;
    let word = GroupWord {
        factors: vec![
            (sys.root_at(d_l_m), field.mul(k, field.mul(c_n, inv_l))),
            (sys.root_at(d_l_n), field.mul(k, field.mul(c_m, inv_l))),
            (sys.root_at(d_m_n), k),
        ],
    };
    let delta_xi = field.add(
        field.mul(k, c_d),
        field.mul(field.mul(k, k), field.mul(c_m, field.mul(c_n, inv_l))),
    );
    let out = [c_l, c_d, c_m, c_n, field.add(c_x, delta_xi)];
    let result = QuintupleVec::new(sys.clone(), field.clone(), x.quad, out);
    debug_assert_eq!(apply_word(&word, &x.to_chev())?, result.to_chev());
    Ok((result, word))
}

/// Options for the randomized reduction search.
#[derive(Clone, Copy, Debug)]
pub struct ReduceOpts {
    pub seed: u64,
    pub budget: usize,
}

impl Default for ReduceOpts {
    fn default() -> Self {
        ReduceOpts {
            seed: 0,
            budget: 10_000,
        }
    }
}

/// (support outside the frame, total support); the greedy search minimizes
/// this lexicographically.
fn cost(v: &ChevVec, frame: &[u16; 5]) -> (usize, usize) {
    let mut out = 0;
    let mut total = 0;
    for (i, _) in v.support_e() {
        total += 1;
        if !frame.contains(&i) {
            out += 1;
        }
    }
    (out, total)
}

/// Candidate moves: for each root orthogonal to delta, the parameter values
/// that cancel some currently nonzero coefficient.
fn candidate_moves(sys: &RootSystem, field: &Field, v: &ChevVec) -> Vec<(u16, Fel)> {
    let support: Vec<(u16, Fel)> = v.support_e().collect();
    let mut moves = Vec::new();
    for &ai in sys.layer_list(0) {
        let mut cands: Vec<Fel> = Vec::new();
        for &(b, c) in &support {
            if sys.inner_idx(ai, b) != -1 {
                continue;
            }
            let t = sys.sum_idx(ai, b).unwrap();
            let tv = v.e_at(t);
            if !tv.is_zero() {
                let a = field.div(tv, c).unwrap();
                if !a.is_zero() && !cands.contains(&a) {
                    cands.push(a);
                }
            }
        }
        moves.extend(cands.into_iter().map(|a| (ai, a)));
    }
    moves
}

/// Greedy support-shrinking reduction to the five-root frame with seeded
/// plateau walks and restarts. On success the applied word maps the input
/// exactly onto the returned frame vector.
pub fn reduce_to_quintuple(x: &ChevVec, opts: &ReduceOpts) -> Result<(QuintupleVec, GroupWord)> {
    if !x.in_v1() {
        return Err(Error::NotInTopLayer);
    }
    let sys = x.sys().clone();
    let field = x.field().clone();
    let quad = sys.find_quadruple(None)?;
    let frame = frame_indices(&sys, &quad);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut used = 0usize;

    let finish = |v: &ChevVec, builder: WordBuilder| -> (QuintupleVec, GroupWord) {
        let coeffs = std::array::from_fn(|i| v.e_at(frame[i]));
        (
            QuintupleVec::new(sys.clone(), field.clone(), quad, coeffs),
            builder.finish(&sys),
        )
    };

    let mut v = x.clone();
    let mut builder = WordBuilder::new();
    let mut stale = 0usize;
    loop {
        let here = cost(&v, &frame);
        if here.0 == 0 {
            return Ok(finish(&v, builder));
        }
        if used >= opts.budget {
            return Err(Error::SearchBudget(opts.budget));
        }
        let moves = candidate_moves(&sys, &field, &v);
        let mut best: Option<((usize, usize), u16, Fel, ChevVec)> = None;
        for (ai, a) in &moves {
            let v2 = apply_x_idx(*ai, *a, &v);
            let c2 = cost(&v2, &frame);
            if c2 < here && best.as_ref().map_or(true, |(bc, ..)| c2 < *bc) {
                best = Some((c2, *ai, *a, v2));
            }
        }
        if let Some((_, ai, a, v2)) = best {
            builder.push(ai, a);
            v = v2;
            used += 1;
            stale = 0;
            continue;
        }
        // plateau: a random move that does not worsen the cost
        let mut plateau: Vec<(u16, Fel, ChevVec)> = Vec::new();
        for (ai, a) in &moves {
            let v2 = apply_x_idx(*ai, *a, &v);
            if cost(&v2, &frame) <= here {
                plateau.push((*ai, *a, v2));
            }
        }
        stale += 1;
        if !plateau.is_empty() && stale < 40 {
            let (ai, a, v2) = plateau.swap_remove(rng.gen_range(0..plateau.len()));
            builder.push(ai, a);
            v = v2;
            used += 1;
            continue;
        }
        // restart from the input with a random prefix
        v = x.clone();
        builder = WordBuilder::new();
        stale = 0;
        let phi0 = sys.layer_list(0);
        for _ in 0..6 {
            let ai = phi0[rng.gen_range(0..phi0.len())];
            let a = field.sample_nonzero(&mut rng);
            builder.push(ai, a);
            v = apply_x_idx(ai, a, &v);
            used += 1;
        }
    }
}

/// Reflection permutations of the roots, one per positive root orthogonal to
/// delta. Each acts on the module through the three-factor word
/// `x_a(1) x_{-a}(1) x_a(1)`, which permutes basis vectors without signs.
struct Reflections {
    roots: Vec<u16>,
    perms: Vec<Vec<u16>>,
}

fn reflections(sys: &RootSystem) -> Reflections {
    let mut roots = Vec::new();
    let mut perms = Vec::new();
    for &ai in sys.layer_list(0) {
        let alpha = sys.root_at(ai);
        if alpha.height() < 0 {
            continue;
        }
        let perm: Vec<u16> = (0..sys.num_roots() as u16)
            .map(|b| {
                let beta = sys.root_at(b);
                let n = sys.inner_idx(ai, b) as i32;
                let mut c = [0i8; 8];
                c[..sys.rank()].copy_from_slice(beta.coords());
                for (t, &ac) in alpha.coords().iter().enumerate() {
                    c[t] -= (n * ac as i32) as i8;
                }
                sys.idx_of(&Root::from_coords(&c[..sys.rank()])).unwrap()
            })
            .collect();
        roots.push(ai);
        perms.push(perm);
    }
    Reflections { roots, perms }
}

/// Finds a product of reflections carrying `start` onto `target` (as sets of
/// layer-one roots) by breadth-first search, and returns it as a word.
fn weyl_position(
    sys: &RootSystem,
    start: &[u16],
    target: &[u16],
) -> Result<Option<Vec<u16>>> {
    let mut start: Vec<u16> = start.to_vec();
    start.sort();
    let mut target: Vec<u16> = target.to_vec();
    target.sort();
    if start == target {
        return Ok(Some(Vec::new()));
    }
    let refl = reflections(sys);
    let mut parent: HashMap<Vec<u16>, (Vec<u16>, usize)> = HashMap::new();
    let mut frontier = vec![start.clone()];
    parent.insert(start.clone(), (Vec::new(), usize::MAX));
    let cap = 1 << 21;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for state in frontier {
            for (gi, perm) in refl.perms.iter().enumerate() {
                let mut image: Vec<u16> = state.iter().map(|&i| perm[i as usize]).collect();
                image.sort();
                if parent.contains_key(&image) {
                    continue;
                }
                parent.insert(image.clone(), (state.clone(), gi));
                if image == target {
                    // walk back to the start, collecting generators
                    let mut gens = Vec::new();
                    let mut cur = image;
                    while let Some((prev, gi)) = parent.get(&cur) {
                        if *gi == usize::MAX {
                            break;
                        }
                        gens.push(refl.roots[*gi]);
                        cur = prev.clone();
                    }
                    gens.reverse();
                    return Ok(Some(gens));
                }
                if parent.len() > cap {
                    return Ok(None);
                }
                next.push(image);
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// Internal driver state threading a vector and its witness together.
struct Driver {
    sys: Arc<RootSystem>,
    field: Arc<Field>,
    v: ChevVec,
    builder: WordBuilder,
}

impl Driver {
    fn apply(&mut self, root_idx: u16, a: Fel) {
        if a.is_zero() {
            return;
        }
        self.v = apply_x_idx(root_idx, a, &self.v);
        self.builder.push(root_idx, a);
    }

    fn apply_group_word(&mut self, w: &GroupWord) -> Result<()> {
        for (root, a) in w.factors.iter().rev() {
            let i = self
                .sys
                .idx_of(root)
                .ok_or_else(|| Error::Internal("word factor outside the system".into()))?;
            self.apply(i, *a);
        }
        Ok(())
    }

    fn apply_reflections(&mut self, gens: &[u16]) {
        for &ai in gens {
            let nai = self.sys.neg_idx(ai);
            self.apply(ai, Fel::ONE);
            self.apply(nai, Fel::ONE);
            self.apply(ai, Fel::ONE);
        }
    }

    fn support(&self) -> Vec<u16> {
        self.v.support_e().map(|(i, _)| i).collect()
    }
}

/// Eliminates frame coefficients that flow into each other: whenever two
/// supported frame roots meet at angle pi/3 a single transvection cancels
/// one of them. Runs to a fixed point.
fn shrink_in_frame(d: &mut Driver, frame: &[u16; 5]) {
    loop {
        let support = d.support();
        let mut acted = false;
        'scan: for &dst in &support {
            for &src in &support {
                if src == dst || d.sys.inner_idx(dst, src) != 1 {
                    continue;
                }
                // x_{dst-src}(a) e_src = e_src + a e_dst
                let alpha = d.sys.sum_idx(dst, d.sys.neg_idx(src)).unwrap();
                let a = d.field.div(d.v.e_at(dst), d.v.e_at(src)).unwrap();
                let v2 = apply_x_idx(alpha, a, &d.v);
                let before = cost(&d.v, frame);
                let after = cost(&v2, frame);
                if after < before {
                    d.apply(alpha, a);
                    acted = true;
                    break 'scan;
                }
            }
        }
        if !acted {
            return;
        }
    }
}

/// Scales the coefficient at `target` to 1 with a diagonal element fixing
/// the roots in `fix`.
fn scale_one(d: &mut Driver, target: u16, fix: &[u16]) -> Result<()> {
    let a = d.v.e_at(target);
    if a.is_zero() {
        return Err(Error::Internal("nothing to scale".into()));
    }
    if a == Fel::ONE {
        return Ok(());
    }
    let mut constraints = vec![(d.sys.root_at(target), 1)];
    for &f in fix {
        constraints.push((d.sys.root_at(f), 0));
    }
    let alpha = d
        .sys
        .find_angle_root(&constraints)?
        .ok_or(Error::NoAngleRoot)?;
    let w = crate::liealg::w_word(&d.sys, &d.field, &alpha, a)?;
    d.apply_group_word(&w)
}

/// Canonicalization pipeline: reduce to the frame, shrink, reposition by
/// reflections, normalize scales, sweep the last coefficient to its class
/// representative. Falls back to a label-only answer (no witness) if any
/// search step gives out.
pub fn canonicalize(
    cls: &Classifier,
    x: &ChevVec,
    opts: &ReduceOpts,
) -> Result<(OrbitLabel, ChevVec, Option<GroupWord>)> {
    if !x.in_v1() {
        return Err(Error::NotInTopLayer);
    }
    let label = cls.classify(x)?;
    let rep = canonical_rep(cls.sys(), cls.field(), label)?;
    match canonical_witness(cls, x, opts) {
        Ok((wlabel, wrep, word))
            if wlabel == label && wrep == rep && apply_word(&word, x)? == rep =>
        {
            Ok((label, rep, Some(word)))
        }
        _ => Ok((label, rep, None)),
    }
}

fn canonical_witness(
    cls: &Classifier,
    x: &ChevVec,
    opts: &ReduceOpts,
) -> Result<(OrbitLabel, ChevVec, GroupWord)> {
    let sys = cls.sys().clone();
    let field = cls.field().clone();
    if x.is_zero() {
        return Ok((
            OrbitLabel::Zero,
            ChevVec::zero(sys, field),
            GroupWord::identity(),
        ));
    }
    let quad = sys.find_quadruple(None)?;
    let frame = frame_indices(&sys, &quad);
    let (q, w1) = reduce_to_quintuple(x, opts)?;
    let mut d = Driver {
        sys: sys.clone(),
        field: field.clone(),
        v: q.to_chev(),
        builder: WordBuilder::new(),
    };
    d.apply_group_word(&w1.clone())?;
    // the witness builder must start from x, so rebuild: apply w1 to x
    d.v = apply_word(&w1, x)?;

    shrink_in_frame(&mut d, &frame);

    let [li, di, mi, ni, xi_] = frame;
    let has = |d: &Driver, i: u16| !d.v.e_at(i).is_zero();
    let reposition = |d: &mut Driver, target: &[u16]| -> Result<()> {
        let support = d.support();
        let gens = weyl_position(&d.sys, &support, target)?
            .ok_or_else(|| Error::Internal("no reflection path to standard position".into()))?;
        d.apply_reflections(&gens);
        Ok(())
    };

    let label;
    if !has(&d, di) || !has(&d, li) {
        // support inside the quadruple (or the lone partner root): the
        // all-orthogonal types
        let size = d.support().len();
        match size {
            0 => return Err(Error::Internal("nonzero vector reduced to zero".into())),
            1 => {
                reposition(&mut d, &[li])?;
                scale_one(&mut d, li, &[])?;
                label = OrbitLabel::Singular;
            }
            2 => {
                reposition(&mut d, &[li, mi])?;
                scale_one(&mut d, li, &[mi])?;
                scale_one(&mut d, mi, &[li])?;
                label = OrbitLabel::Shiny;
            }
            3 | 4 => {
                let target: &[u16] = if size == 3 {
                    &[li, mi, ni]
                } else {
                    &[li, mi, ni, xi_]
                };
                reposition(&mut d, target)?;
                let coeffs = std::array::from_fn(|i| d.v.e_at(frame[i]));
                let q = QuintupleVec::new(sys.clone(), field.clone(), quad, coeffs);
                let (q2, w) = normalize_scales(&q)?;
                d.apply_group_word(&w)?;
                if size == 4 {
                    // the four-root type collapses: sweep the last
                    // coefficient to zero
                    let k = field.sqrt(q2.coeffs[4]);
                    let (_, w) = sweep_xi(&q2, k)?;
                    d.apply_group_word(&w)?;
                }
                label = OrbitLabel::Luminous;
            }
            _ => return Err(Error::Internal("orthogonal support wider than frame".into())),
        }
    } else {
        // the pair {lambda, delta-lambda} is present
        let rest: Vec<u16> = [mi, ni, xi_]
            .into_iter()
            .filter(|&i| has(&d, i))
            .collect();
        match rest.len() {
            0 => {
                // pair only: scale, then grow the mu and nu coefficients
                scale_one(&mut d, li, &[])?;
                let s = d.v.e_at(di);
                let inv_s = field.inv(s)?;
                let grow_nu = sys.neg_idx(sys.sum_idx(di, sys.neg_idx(ni)).unwrap());
                let grow_mu = sys.neg_idx(sys.sum_idx(di, sys.neg_idx(mi)).unwrap());
                let cleaner =
                    sys.neg_idx(sys.sum_idx(sys.partner_idx(mi), sys.neg_idx(ni)).unwrap());
                d.apply(grow_nu, inv_s);
                d.apply(grow_mu, inv_s);
                d.apply(cleaner, inv_s);
                label = OrbitLabel::Fam {
                    s,
                    class: Fel::ZERO,
                };
            }
            2 | 3 => {
                let target: Vec<u16> = if rest.len() == 2 {
                    vec![li, di, mi, ni]
                } else {
                    vec![li, di, mi, ni, xi_]
                };
                reposition(&mut d, &target)?;
                let coeffs = std::array::from_fn(|i| d.v.e_at(frame[i]));
                let q = QuintupleVec::new(sys.clone(), field.clone(), quad, coeffs);
                let (q2, w) = normalize_scales(&q)?;
                d.apply_group_word(&w)?;
                let s = q2.coeffs[1];
                let class = field.as_class_of(s, q2.coeffs[4]);
                if q2.coeffs[4] != class {
                    // solve l^2 + l s = current + class and sweep
                    let diff = field.add(q2.coeffs[4], class);
                    let l = field
                        .elements()
                        .find(|&l| field.artin_schreier(s, l) == diff)
                        .ok_or_else(|| {
                            Error::Internal("class difference outside the displacement image".into())
                        })?;
                    let (_, w) = sweep_xi(&q2, l)?;
                    d.apply_group_word(&w)?;
                }
                label = OrbitLabel::Fam { s, class };
            }
            _ => {
                return Err(Error::Internal(
                    "pair with a single extra coefficient survived shrinking".into(),
                ))
            }
        }
    }
    let rep = d.v.clone();
    Ok((label, rep, d.builder.finish(&sys)))
}
