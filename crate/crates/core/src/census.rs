//! Independent verification of the classification: exhaustive breadth-first
//! orbit enumeration of the group action on the layer-one module over GF(2),
//! and sampled signature censuses over larger fields.
//!
//! States are bit encodings of layer-one vectors (bit i = coefficient at the
//! i-th layer-one root), so over GF(2) a state is the whole vector. The
//! visited set is a flat bit array; frontiers are expanded in blocks with a
//! deterministic merge, so the resulting partition does not depend on the
//! worker count.

use crate::error::{Error, Result};
use crate::gf2k::{Fel, Field};
use crate::invariants::{Classifier, OrbitLabel, Signature};
use crate::liealg::{apply_x, ChevVec};
use crate::rootsys::{Root, RootSystem, RootSystemId};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// One orbit of the exhaustive census.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub label: OrbitLabel,
    pub representative: ChevVec,
    pub size: u64,
}

/// The restriction of one elementary generator to the layer-one module, as a
/// dense matrix (column c is the image of the c-th basis vector).
#[derive(Clone, Debug)]
pub struct GenMatrix {
    pub root: Root,
    pub scalar: Fel,
    pub matrix: Vec<Vec<Fel>>,
}

/// One generator per (root orthogonal to delta, GF(2)-basis scalar); these
/// generate the same group as all elementary elements.
pub fn generator_matrices(sys: &Arc<RootSystem>, field: &Arc<Field>) -> Vec<GenMatrix> {
    let phi1 = sys.layer_list(1);
    let dim = phi1.len();
    let pos: BTreeMap<u16, usize> = phi1.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut out = Vec::new();
    for &ai in sys.layer_list(0) {
        for j in 0..field.degree() {
            let scalar = Fel(1 << j);
            let mut matrix = vec![vec![Fel::ZERO; dim]; dim];
            for (c, &bi) in phi1.iter().enumerate() {
                matrix[c][c] = Fel::ONE;
                if sys.inner_idx(ai, bi) == -1 {
                    let t = sys.sum_idx(ai, bi).unwrap();
                    matrix[pos[&t]][c] = scalar;
                }
            }
            out.push(GenMatrix {
                root: sys.root_at(ai),
                scalar,
                matrix,
            });
        }
    }
    out
}

/// Bit encoding of a layer-one GF(2) vector.
pub fn encode_state(v: &ChevVec) -> Result<u64> {
    if !v.in_v1() || v.field().degree() != 1 {
        return Err(Error::Precondition(
            "state encoding needs a GF(2) vector in the layer-one span".into(),
        ));
    }
    let phi1 = v.sys().layer_list(1);
    let mut s = 0u64;
    for (p, &i) in phi1.iter().enumerate() {
        if !v.e_at(i).is_zero() {
            s |= 1 << p;
        }
    }
    Ok(s)
}

pub fn decode_state(sys: &Arc<RootSystem>, field: &Arc<Field>, state: u64) -> ChevVec {
    let mut v = ChevVec::zero(sys.clone(), field.clone());
    for (p, &i) in sys.layer_list(1).iter().enumerate() {
        if state >> p & 1 == 1 {
            let root = sys.root_at(i);
            v.set_e(&root, Fel::ONE).unwrap();
        }
    }
    v
}

/// Options for the exhaustive census.
#[derive(Clone, Copy, Debug)]
pub struct BfsOpts {
    /// Permit the 2^32-state run (E7 over GF(2), 512 MiB visited set).
    pub allow_heavy: bool,
    /// Worker threads for frontier expansion; the partition is identical for
    /// any count.
    pub workers: usize,
    /// Orbit members sampled per orbit to verify the label is constant.
    pub check_samples: usize,
    pub seed: u64,
    /// Use the bitset-scan frontier even for small state spaces (the path
    /// large runs take); for testing.
    pub force_scan: bool,
}

impl Default for BfsOpts {
    fn default() -> Self {
        BfsOpts {
            allow_heavy: false,
            workers: 1,
            check_samples: 64,
            seed: 0,
            force_scan: false,
        }
    }
}

struct BitVec(Vec<u64>);

impl BitVec {
    fn new(bits: u64) -> BitVec {
        BitVec(vec![0u64; (bits as usize).div_ceil(64)])
    }

    fn get(&self, i: u64) -> bool {
        self.0[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: u64) {
        self.0[(i / 64) as usize] |= 1 << (i % 64);
    }
}

fn transvection_pairs(sys: &RootSystem) -> Vec<Vec<(u8, u8)>> {
    let phi1 = sys.layer_list(1);
    let pos: BTreeMap<u16, usize> = phi1.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    sys.layer_list(0)
        .iter()
        .map(|&ai| {
            phi1.iter()
                .enumerate()
                .filter(|(_, &bi)| sys.inner_idx(ai, bi) == -1)
                .map(|(p, &bi)| {
                    let t = sys.sum_idx(ai, bi).unwrap();
                    (p as u8, pos[&t] as u8)
                })
                .collect()
        })
        .collect()
}

#[inline]
fn apply_pairs(pairs: &[(u8, u8)], s: u64) -> u64 {
    let mut out = s;
    for &(a, b) in pairs {
        if s >> a & 1 == 1 {
            out ^= 1 << b;
        }
    }
    out
}

/// Exhaustive census; refuses state spaces beyond the supported budget.
pub fn bfs_census(cls: &Classifier, opts: &BfsOpts) -> Result<Vec<OrbitRecord>> {
    Ok(bfs_census_impl(cls, opts)?.0)
}

/// As [`bfs_census`], and also returns the orbit index of every state.
/// Only available for state spaces small enough to hold the table.
pub fn bfs_census_detailed(cls: &Classifier, opts: &BfsOpts) -> Result<(Vec<OrbitRecord>, Vec<u8>)> {
    let (records, table) = bfs_census_impl(cls, opts)?;
    let table = table.ok_or_else(|| {
        Error::Refused("orbit table only available for vector-frontier runs".into())
    })?;
    Ok((records, table))
}

fn bfs_census_impl(
    cls: &Classifier,
    opts: &BfsOpts,
) -> Result<(Vec<OrbitRecord>, Option<Vec<u8>>)> {
    let sys = cls.sys();
    let field = cls.field();
    if field.degree() != 1 {
        return Err(Error::Refused(format!(
            "exhaustive census is only supported over GF(2), got GF({})",
            field.order()
        )));
    }
    match sys.id() {
        RootSystemId::E6 => {}
        RootSystemId::E7 => {
            if !opts.allow_heavy {
                return Err(Error::Refused(
                    "E7 census walks 2^32 states; pass the heavy flag to run it".into(),
                ));
            }
        }
        RootSystemId::E8 => {
            return Err(Error::Refused(
                "E8 census would walk 2^56 states; use the sampled census".into(),
            ));
        }
    }
    let bits = sys.layer_list(1).len() as u32;
    let gens = transvection_pairs(sys);
    let workers = opts.workers.max(1);

    let (bases, table) = if bits <= 24 && !opts.force_scan {
        let (b, t) = bfs_vector_frontier(bits, &gens, workers);
        (b, Some(t))
    } else {
        (bfs_scan_frontier(bits, &gens, workers), None)
    };

    let nstates = 1u64 << bits;
    let total: u64 = bases.iter().map(|&(_, size)| size).sum();
    if total != nstates {
        return Err(Error::Internal(format!(
            "census sizes sum to {total}, expected {nstates}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut records = Vec::with_capacity(bases.len());
    for &(base, size) in &bases {
        let representative = decode_state(sys, field, base);
        let label = cls.classify(&representative)?;
        // the label must be constant along the orbit; spot-check members
        // reached by random generator walks
        for _ in 0..opts.check_samples.min(size as usize) {
            let mut s = base;
            for _ in 0..rng.gen_range(4..24) {
                s = apply_pairs(&gens[rng.gen_range(0..gens.len())], s);
            }
            let member = decode_state(sys, field, s);
            if cls.classify(&member)? != label {
                return Err(Error::Internal(format!(
                    "label not constant on the orbit of state {base:#x}"
                )));
            }
        }
        records.push(OrbitRecord {
            label,
            representative,
            size,
        });
    }
    Ok((records, table))
}

/// Frontier kept as a vector of states; orbit table filled along the way.
fn bfs_vector_frontier(
    bits: u32,
    gens: &[Vec<(u8, u8)>],
    workers: usize,
) -> (Vec<(u64, u64)>, Vec<u8>) {
    let nstates = 1u64 << bits;
    let mut visited = BitVec::new(nstates);
    let mut orbit_of = vec![0u8; nstates as usize];
    let mut bases = Vec::new();
    let mut base = 0u64;
    loop {
        while base < nstates && visited.get(base) {
            base += 1;
        }
        if base >= nstates {
            break;
        }
        let oid = bases.len() as u8;
        visited.set(base);
        orbit_of[base as usize] = oid;
        let mut size = 1u64;
        let mut frontier: Vec<u32> = vec![base as u32];
        while !frontier.is_empty() {
            let expanded = expand_blocks(&frontier, gens, workers);
            let mut next = Vec::new();
            for s in expanded {
                if !visited.get(s as u64) {
                    visited.set(s as u64);
                    orbit_of[s as usize] = oid;
                    size += 1;
                    next.push(s);
                }
            }
            frontier = next;
        }
        bases.push((base, size));
    }
    (bases, orbit_of)
}

fn expand_blocks(frontier: &[u32], gens: &[Vec<(u8, u8)>], workers: usize) -> Vec<u32> {
    let expand = |chunk: &[u32]| -> Vec<u32> {
        let mut out = Vec::with_capacity(chunk.len() * gens.len());
        for &s in chunk {
            for pairs in gens {
                out.push(apply_pairs(pairs, s as u64) as u32);
            }
        }
        out
    };
    if workers <= 1 || frontier.len() < 4096 {
        return expand(frontier);
    }
    let chunk_size = frontier.len().div_ceil(workers);
    let chunks: Vec<&[u32]> = frontier.chunks(chunk_size).collect();
    let results: Vec<Vec<u32>> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| scope.spawn(move || expand(chunk)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results.into_iter().flatten().collect()
}

/// Frontier kept as a bit array, scanned level by level; memory stays at
/// three bit arrays regardless of frontier width.
fn bfs_scan_frontier(bits: u32, gens: &[Vec<(u8, u8)>], workers: usize) -> Vec<(u64, u64)> {
    let nstates = 1u64 << bits;
    let words = (nstates as usize).div_ceil(64);
    let mut visited = vec![0u64; words];
    let mut cur = vec![0u64; words];
    let next: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();
    let mut bases = Vec::new();
    let mut base = 0u64;
    loop {
        while base < nstates && visited[(base / 64) as usize] >> (base % 64) & 1 == 1 {
            base += 1;
        }
        if base >= nstates {
            break;
        }
        visited[(base / 64) as usize] |= 1 << (base % 64);
        cur.fill(0);
        cur[(base / 64) as usize] |= 1 << (base % 64);
        let mut size = 1u64;
        loop {
            let scan = |range: std::ops::Range<usize>| {
                for w in range {
                    let mut word = cur[w];
                    while word != 0 {
                        let bit = word.trailing_zeros() as u64;
                        word &= word - 1;
                        let s = (w as u64) * 64 + bit;
                        for pairs in gens {
                            let t = apply_pairs(pairs, s);
                            next[(t / 64) as usize].fetch_or(1 << (t % 64), Ordering::Relaxed);
                        }
                    }
                }
            };
            if workers <= 1 {
                scan(0..words);
            } else {
                let per = words.div_ceil(workers);
                std::thread::scope(|scope| {
                    for w in 0..workers {
                        let lo = (w * per).min(words);
                        let hi = ((w + 1) * per).min(words);
                        let scan = &scan;
                        scope.spawn(move || scan(lo..hi));
                    }
                });
            }
            let mut any = false;
            for w in 0..words {
                let fresh = next[w].load(Ordering::Relaxed) & !visited[w];
                next[w].store(0, Ordering::Relaxed);
                visited[w] |= fresh;
                cur[w] = fresh;
                if fresh != 0 {
                    any = true;
                    size += fresh.count_ones() as u64;
                }
            }
            if !any {
                break;
            }
        }
        bases.push((base, size));
    }
    bases
}

/// Classifies `n` pseudorandom layer-one vectors, deterministically in the
/// seed, and returns the signature histogram. Support sizes are drawn
/// uniformly so that small orbits show up as well.
pub fn sample_census(
    cls: &Classifier,
    n: usize,
    seed: u64,
) -> Result<BTreeMap<Signature, u64>> {
    let sys = cls.sys();
    let field = cls.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idxs: Vec<u16> = sys.layer_list(1).to_vec();
    let dim = idxs.len();
    let mut hist = BTreeMap::new();
    for _ in 0..n {
        let u = rng.gen_range(0..=dim);
        for j in 0..u {
            let t = rng.gen_range(j..dim);
            idxs.swap(j, t);
        }
        let mut v = ChevVec::zero(sys.clone(), field.clone());
        for &i in &idxs[..u] {
            let root = sys.root_at(i);
            v.set_e(&root, field.sample_nonzero(&mut rng))?;
        }
        let sig = cls.signature(&v)?;
        *hist.entry(sig).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Orbit count predicted by the classification: 4 + 2(|K| - 1).
pub fn expected_orbit_count(field: &Field) -> u64 {
    4 + 2 * (field.order() as u64 - 1)
}

pub fn save_census(records: &[OrbitRecord], path: &Path) -> Result<()> {
    let dto = crate::wire::CensusFileDto::of(records)?;
    let mut text = serde_json::to_string_pretty(&dto)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_census(path: &Path) -> Result<Vec<OrbitRecord>> {
    let text = std::fs::read_to_string(path)?;
    let dto: crate::wire::CensusFileDto = serde_json::from_str(&text)?;
    dto.to_records()
}

/// Checks a generator matrix against the elementary action on every basis
/// vector; used by tests and the self-test command.
pub fn matrix_matches_action(sys: &Arc<RootSystem>, field: &Arc<Field>, g: &GenMatrix) -> Result<bool> {
    let phi1 = sys.layer_list(1);
    for (c, &bi) in phi1.iter().enumerate() {
        let basis = ChevVec::basis_e(sys.clone(), field.clone(), &sys.root_at(bi))?;
        let img = apply_x(&g.root, g.scalar, &basis)?;
        for (r, &ri) in phi1.iter().enumerate() {
            let root = sys.root_at(ri);
            if img.get_e(&root)? != g.matrix[r][c] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
