//! Root systems E6, E7, E8: construction by closure from the Cartan matrix,
//! inner products, the maximal root and its layers, and the orthogonal
//! quadruples that frame canonical orbit representatives.
//!
//! Roots are integer coordinate vectors over the simple roots in Bourbaki
//! numbering, with every root normalized to self-inner-product 2. The
//! canonical ordering (ascending height, then lexicographic coordinates) is
//! fixed once here; every "first found" choice in the crate uses it.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RootSystemId {
    E6,
    E7,
    E8,
}

impl RootSystemId {
    pub fn rank(self) -> usize {
        match self {
            RootSystemId::E6 => 6,
            RootSystemId::E7 => 7,
            RootSystemId::E8 => 8,
        }
    }

    pub fn all() -> [RootSystemId; 3] {
        [RootSystemId::E6, RootSystemId::E7, RootSystemId::E8]
    }
}

impl fmt::Display for RootSystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystemId::E6 => write!(f, "E6"),
            RootSystemId::E7 => write!(f, "E7"),
            RootSystemId::E8 => write!(f, "E8"),
        }
    }
}

impl FromStr for RootSystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E6" | "e6" => Ok(RootSystemId::E6),
            "E7" | "e7" => Ok(RootSystemId::E7),
            "E8" | "e8" => Ok(RootSystemId::E8),
            other => Err(Error::Format(format!("unknown root system {other:?}"))),
        }
    }
}

/// A root, stored as signed coefficients over the simple roots.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Root {
    rank: u8,
    c: [i8; 8],
}

impl Root {
    pub fn from_coords(coords: &[i8]) -> Root {
        assert!(coords.len() <= 8);
        let mut c = [0i8; 8];
        c[..coords.len()].copy_from_slice(coords);
        Root {
            rank: coords.len() as u8,
            c,
        }
    }

    pub fn coords(&self) -> &[i8] {
        &self.c[..self.rank as usize]
    }

    pub fn height(&self) -> i32 {
        self.coords().iter().map(|&x| x as i32).sum()
    }

    pub fn negated(&self) -> Root {
        let mut c = self.c;
        for x in &mut c[..self.rank as usize] {
            *x = -*x;
        }
        Root { rank: self.rank, c }
    }

    fn plus(&self, other: &Root) -> Root {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(other.c.iter()) {
            *x += y;
        }
        Root { rank: self.rank, c }
    }
}

impl PartialOrd for Root {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Root {
    /// Canonical order: ascending height, then lexicographic coordinates.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.height(), self.coords()).cmp(&(other.height(), other.coords()))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Root({self})")
    }
}

impl FromStr for Root {
    type Err = Error;

    fn from_str(s: &str) -> Result<Root> {
        let coords: std::result::Result<Vec<i8>, _> =
            s.split(',').map(|p| p.trim().parse::<i8>()).collect();
        let coords = coords.map_err(|_| Error::Format(format!("bad root coordinates {s:?}")))?;
        if coords.is_empty() || coords.len() > 8 {
            return Err(Error::Format(format!("bad root coordinates {s:?}")));
        }
        Ok(Root::from_coords(&coords))
    }
}

/// Four pairwise orthogonal layer-one roots summing to twice the maximal root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadruple {
    pub lambda: Root,
    pub mu: Root,
    pub nu: Root,
    pub xi: Root,
}

impl Quadruple {
    pub fn roots(&self) -> [Root; 4] {
        [self.lambda, self.mu, self.nu, self.xi]
    }
}

const NO_ROOT: u16 = u16::MAX;

pub struct RootSystem {
    id: RootSystemId,
    rank: usize,
    cartan: Vec<Vec<i32>>,
    roots: Vec<Root>,
    index: HashMap<Root, u16>,
    delta: Root,
    delta_idx: u16,
    alpha_k: usize,
    neg: Vec<u16>,
    inner_tab: Vec<i8>,
    sum_tab: Vec<u16>,
    layer_tab: Vec<i8>,
    layers: [Vec<u16>; 5],
    simple_idx: Vec<u16>,
    coords_mod2: Vec<u8>,
    cartan_mod2: Vec<u8>,
}

fn cartan_matrix(id: RootSystemId) -> Vec<Vec<i32>> {
    let rank = id.rank();
    // Bourbaki: the chain is 1-3-4-5-...-l with node 2 attached to node 4.
    let mut bonds = vec![(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)];
    if rank >= 7 {
        bonds.push((6, 7));
    }
    if rank >= 8 {
        bonds.push((7, 8));
    }
    let mut a = vec![vec![0i32; rank]; rank];
    for i in 0..rank {
        a[i][i] = 2;
    }
    for (p, q) in bonds {
        a[p - 1][q - 1] = -1;
        a[q - 1][p - 1] = -1;
    }
    a
}

/// Constructs the full root system: closure of the simple roots under root
/// addition, negatives included, in canonical order.
pub fn build_root_system(id: RootSystemId) -> Arc<RootSystem> {
    let rank = id.rank();
    let cartan = cartan_matrix(id);

    let inner_coords = |a: &Root, b: &Root| -> i32 {
        let (ca, cb) = (a.coords(), b.coords());
        let mut s = 0;
        for i in 0..rank {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..rank {
                s += ca[i] as i32 * cb[j] as i32 * cartan[i][j];
            }
        }
        s
    };

    let simple: Vec<Root> = (0..rank)
        .map(|i| {
            let mut c = [0i8; 8];
            c[i] = 1;
            Root { rank: rank as u8, c }
        })
        .collect();

    // positive roots: repeatedly add a simple root wherever the inner
    // product is -1 (the simply laced criterion for the sum to be a root)
    let mut pos: Vec<Root> = simple.clone();
    let mut seen: std::collections::HashSet<Root> = pos.iter().copied().collect();
    let mut head = 0;
    while head < pos.len() {
        let beta = pos[head];
        head += 1;
        for alpha in &simple {
            if inner_coords(&beta, alpha) == -1 {
                let sum = beta.plus(alpha);
                if seen.insert(sum) {
                    pos.push(sum);
                }
            }
        }
    }

    let mut roots: Vec<Root> = pos.iter().map(Root::negated).collect();
    roots.extend(pos);
    roots.sort();

    let n = roots.len();
    let index: HashMap<Root, u16> = roots
        .iter()
        .enumerate()
        .map(|(i, r)| (*r, i as u16))
        .collect();

    let delta = *roots.last().unwrap();
    assert!(
        roots[n - 2].height() < delta.height(),
        "maximal root must be unique"
    );
    let delta_idx = (n - 1) as u16;

    let alpha_k = {
        let mut hits = (0..rank).filter(|&i| inner_coords(&delta, &simple[i]) != 0);
        let k = hits.next().expect("delta pairs with one simple root");
        assert!(hits.next().is_none());
        assert_eq!(inner_coords(&delta, &simple[k]), 1);
        assert_eq!(delta.coords()[k], 2);
        k
    };

    let mut inner_tab = vec![0i8; n * n];
    for i in 0..n {
        for j in i..n {
            let v = inner_coords(&roots[i], &roots[j]) as i8;
            inner_tab[i * n + j] = v;
            inner_tab[j * n + i] = v;
        }
    }

    let mut sum_tab = vec![NO_ROOT; n * n];
    for i in 0..n {
        for j in 0..n {
            if inner_tab[i * n + j] == -1 {
                let s = roots[i].plus(&roots[j]);
                sum_tab[i * n + j] = *index.get(&s).expect("sum of roots at angle 2pi/3");
            }
        }
    }

    let neg: Vec<u16> = roots.iter().map(|r| index[&r.negated()]).collect();

    let mut layer_tab = vec![0i8; n];
    let mut layers: [Vec<u16>; 5] = Default::default();
    for i in 0..n {
        let l = inner_tab[i * n + delta_idx as usize];
        layer_tab[i] = l;
        layers[(l + 2) as usize].push(i as u16);
    }

    let simple_idx: Vec<u16> = simple.iter().map(|s| index[s]).collect();

    // per-root bitmasks over the simple indices: coordinates mod 2 (the
    // expansion of h_alpha) and Cartan pairings mod 2
    let coords_mod2: Vec<u8> = roots
        .iter()
        .map(|r| {
            r.coords()
                .iter()
                .enumerate()
                .fold(0u8, |m, (i, &c)| m | ((c as u8 & 1) << i))
        })
        .collect();
    let cartan_mod2: Vec<u8> = (0..n)
        .map(|r| {
            (0..rank).fold(0u8, |m, i| {
                let v = inner_tab[simple_idx[i] as usize * n + r];
                m | (((v & 1) as u8) << i)
            })
        })
        .collect();

    Arc::new(RootSystem {
        id,
        rank,
        cartan,
        roots,
        index,
        delta,
        delta_idx,
        alpha_k,
        neg,
        inner_tab,
        sum_tab,
        layer_tab,
        layers,
        simple_idx,
        coords_mod2,
        cartan_mod2,
    })
}

impl RootSystem {
    pub fn id(&self) -> RootSystemId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i32>] {
        &self.cartan
    }

    /// All roots in canonical order.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn delta(&self) -> Root {
        self.delta
    }

    /// Zero-based index of the unique simple root not orthogonal to delta.
    pub fn alpha_k(&self) -> usize {
        self.alpha_k
    }

    pub fn simple_root(&self, i: usize) -> Root {
        let mut c = [0i8; 8];
        c[i] = 1;
        Root {
            rank: self.rank as u8,
            c,
        }
    }

    pub fn is_root(&self, r: &Root) -> bool {
        self.index.contains_key(r)
    }

    fn require(&self, r: &Root) -> Result<u16> {
        self.index.get(r).copied().ok_or_else(|| Error::NotARoot {
            system: self.id.to_string(),
            coords: r.to_string(),
        })
    }

    /// Inner product of two roots (all roots have length squared 2, so this
    /// coincides with the Cartan integer).
    pub fn inner(&self, a: &Root, b: &Root) -> Result<i32> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        Ok(self.inner_idx(i, j) as i32)
    }

    /// `a + b` when it is again a root.
    pub fn sum_root(&self, a: &Root, b: &Root) -> Result<Option<Root>> {
        let (i, j) = (self.require(a)?, self.require(b)?);
        Ok(self.sum_idx(i, j).map(|k| self.roots[k as usize]))
    }

    /// All roots whose inner product with `alpha` equals `i`.
    pub fn phi_layer(&self, alpha: &Root, i: i32) -> Result<Vec<Root>> {
        let a = self.require(alpha)?;
        Ok((0..self.roots.len() as u16)
            .filter(|&b| self.inner_idx(a, b) as i32 == i)
            .map(|b| self.roots[b as usize])
            .collect())
    }

    /// Completes `lambda` (or the first layer-one root) to a Quadruple:
    /// pairwise orthogonal layer-one roots summing to `2*delta`. Scanning in
    /// canonical order makes the completion the lexicographically least one.
    pub fn find_quadruple(&self, lambda: Option<&Root>) -> Result<Quadruple> {
        let phi1 = self.layer_list(1);
        let li = match lambda {
            Some(l) => {
                let i = self.require(l)?;
                if self.layer_of(i) != 1 {
                    return Err(Error::Precondition(format!(
                        "lambda {l} is not in the first layer"
                    )));
                }
                i
            }
            None => phi1[0],
        };
        let lam = self.roots[li as usize];
        let two_delta = self.delta.plus(&self.delta);
        for &mi in phi1 {
            if mi == li || self.inner_idx(li, mi) != 0 {
                continue;
            }
            for &ni in phi1 {
                if ni <= mi || self.inner_idx(li, ni) != 0 || self.inner_idx(mi, ni) != 0 {
                    continue;
                }
                let mut xi = two_delta;
                for r in [lam, self.roots[mi as usize], self.roots[ni as usize]] {
                    xi = xi.plus(&r.negated());
                }
                if let Some(&xidx) = self.index.get(&xi) {
                    if self.layer_of(xidx) == 1
                        && self.inner_idx(li, xidx) == 0
                        && self.inner_idx(mi, xidx) == 0
                        && self.inner_idx(ni, xidx) == 0
                    {
                        return Ok(Quadruple {
                            lambda: lam,
                            mu: self.roots[mi as usize],
                            nu: self.roots[ni as usize],
                            xi,
                        });
                    }
                }
            }
        }
        Err(Error::Precondition(format!(
            "no quadruple completion for lambda {lam}"
        )))
    }

    /// First root orthogonal to delta meeting every `(root, inner)` constraint.
    pub fn find_angle_root(&self, constraints: &[(Root, i32)]) -> Result<Option<Root>> {
        let idxs: Vec<(u16, i32)> = constraints
            .iter()
            .map(|(r, c)| Ok((self.require(r)?, *c)))
            .collect::<Result<_>>()?;
        Ok(self
            .layer_list(0)
            .iter()
            .find(|&&a| idxs.iter().all(|&(r, c)| self.inner_idx(a, r) as i32 == c))
            .map(|&a| self.roots[a as usize]))
    }

    // -- index-level accessors used by the rest of the crate --

    pub fn idx_of(&self, r: &Root) -> Option<u16> {
        self.index.get(r).copied()
    }

    pub fn root_at(&self, i: u16) -> Root {
        self.roots[i as usize]
    }

    pub fn inner_idx(&self, i: u16, j: u16) -> i8 {
        self.inner_tab[i as usize * self.roots.len() + j as usize]
    }

    pub fn sum_idx(&self, i: u16, j: u16) -> Option<u16> {
        let v = self.sum_tab[i as usize * self.roots.len() + j as usize];
        (v != NO_ROOT).then_some(v)
    }

    pub fn neg_idx(&self, i: u16) -> u16 {
        self.neg[i as usize]
    }

    pub fn delta_idx(&self) -> u16 {
        self.delta_idx
    }

    /// Layer of a root relative to delta, in -2..=2.
    pub fn layer_of(&self, i: u16) -> i8 {
        self.layer_tab[i as usize]
    }

    /// Indices of the roots in layer `l`, canonical order.
    pub fn layer_list(&self, l: i8) -> &[u16] {
        &self.layers[(l + 2) as usize]
    }

    /// For a layer-one root `i`, the index of `delta - root(i)`.
    pub fn partner_idx(&self, i: u16) -> u16 {
        debug_assert_eq!(self.layer_of(i), 1);
        self.sum_idx(self.delta_idx, self.neg_idx(i))
            .expect("delta minus a layer-one root is a root")
    }

    pub fn simple_idx(&self, i: usize) -> u16 {
        self.simple_idx[i]
    }

    /// Bitmask over simple indices: the coordinates of root `i` reduced
    /// mod 2. This is the expansion of `h` at that root over the simple
    /// Cartan generators.
    pub fn coords_mod2(&self, i: u16) -> u8 {
        self.coords_mod2[i as usize]
    }

    /// Bitmask over simple indices: Cartan pairings of root `i` with the
    /// simple roots, mod 2.
    pub fn cartan_mod2(&self, i: u16) -> u8 {
        self.cartan_mod2[i as usize]
    }
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSystem({}, {} roots)", self.id, self.roots.len())
    }
}
