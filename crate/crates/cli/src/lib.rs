//! Batch command-line surface over the classifier: root-system dumps,
//! vector classification, canonicalization with witness output, censuses,
//! and a self-test.
//!
//! Exit codes: 0 success, 1 domain or usage error, 2 budget refusal.

use chevorbit::census::{self, BfsOpts};
use chevorbit::invariants::Classifier;
use chevorbit::reduce::{canonicalize, ReduceOpts};
use chevorbit::wire::{CensusFileDto, ChevVecDto, FieldDto, LabelDto};
use chevorbit::{build_root_system, make_field, ChevVec, Error, RootSystemId};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::{Read, Write};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "chevorbit", version, about = "orbit classification in characteristic-2 exceptional Chevalley modules", disable_help_subcommand = true)]
struct Cli {
    /// Emit machine-readable JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Phi {
    E6,
    E7,
    E8,
}

impl From<Phi> for RootSystemId {
    fn from(p: Phi) -> RootSystemId {
        match p {
            Phi::E6 => RootSystemId::E6,
            Phi::E7 => RootSystemId::E7,
            Phi::E8 => RootSystemId::E8,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CensusMode {
    Bfs,
    Sample,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Dump the root system: roots, maximal root, its simple partner, layer sizes.
    Rootsys {
        #[arg(long, value_enum, default_value = "e6")]
        phi: Phi,
    },
    /// Classify a vector (JSON on stdin or in a file).
    Classify {
        /// Input file; "-" reads standard input.
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Canonicalize a vector: orbit label, representative, witness word.
    Canon {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search budget for the reduction, in applied moves.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Exhaustive (GF(2)) or sampled orbit census.
    Census {
        #[arg(long, value_enum, default_value = "e6")]
        phi: Phi,
        /// Field degree k for GF(2^k).
        #[arg(long, default_value_t = 1)]
        field: u32,
        #[arg(long, value_enum, default_value = "bfs")]
        mode: CensusMode,
        /// Sample count for the sampled census.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the census to this file as well.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow the 2^32-state E7 run.
        #[arg(long)]
        allow_heavy: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the built-in verification suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn run_main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut stdin = std::io::stdin().lock();
    let stdout = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(&args, &mut stdin, stdout, &mut err)
}

/// Drives one invocation; separated from process I/O so tests can capture
/// output byte for byte.
pub fn run<R: Read, W: Write, E: Write>(
    args: &[String],
    stdin: &mut R,
    mut stdout: W,
    stderr: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return 1;
        }
    };
    let json = cli.json;
    match dispatch(cli, stdin, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            let code = match e {
                Error::Refused(_) => 2,
                _ => 1,
            };
            if json {
                let payload = serde_json::json!({ "error": e.to_string() });
                let _ = writeln!(stdout, "{payload}");
            } else {
                let _ = writeln!(stderr, "error: {e}");
            }
            code
        }
    }
}

fn dispatch<R: Read, W: Write>(cli: Cli, stdin: &mut R, out: &mut W) -> chevorbit::Result<()> {
    match cli.cmd {
        Cmd::Rootsys { phi } => rootsys_cmd(phi.into(), out),
        Cmd::Classify { input } => classify_cmd(&read_vector(&input, stdin)?, cli.json, out),
        Cmd::Canon {
            input,
            seed,
            budget,
        } => canon_cmd(&read_vector(&input, stdin)?, seed, budget, cli.json, out),
        Cmd::Census {
            phi,
            field,
            mode,
            n,
            seed,
            out: out_path,
            allow_heavy,
            workers,
        } => census_cmd(
            phi.into(),
            field,
            mode,
            n,
            seed,
            out_path,
            allow_heavy,
            workers,
            cli.json,
            out,
        ),
        Cmd::Selftest { seed } => selftest_cmd(seed, out),
    }
}

fn read_vector<R: Read>(input: &str, stdin: &mut R) -> chevorbit::Result<ChevVec> {
    let text = if input == "-" {
        let mut buf = String::new();
        stdin.read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(input)?
    };
    let dto: ChevVecDto = serde_json::from_str(&text)?;
    dto.to_chev()
}

#[derive(Serialize)]
struct RootsysOut {
    phi: String,
    rank: usize,
    num_roots: usize,
    delta: String,
    /// One-based index of the simple root paired with delta.
    alpha_k: usize,
    layer_sizes: std::collections::BTreeMap<i8, usize>,
    roots: Vec<String>,
}

fn rootsys_cmd<W: Write>(id: RootSystemId, out: &mut W) -> chevorbit::Result<()> {
    let sys = build_root_system(id);
    let payload = RootsysOut {
        phi: sys.id().to_string(),
        rank: sys.rank(),
        num_roots: sys.num_roots(),
        delta: sys.delta().to_string(),
        alpha_k: sys.alpha_k() + 1,
        layer_sizes: (-2..=2)
            .map(|l| (l, sys.layer_list(l).len()))
            .collect(),
        roots: sys.roots().iter().map(|r| r.to_string()).collect(),
    };
    writeln!(out, "{}", serde_json::to_string(&payload)?)?;
    Ok(())
}

#[derive(Serialize)]
struct ClassifyOut {
    label: LabelDto,
    adjective: Option<&'static str>,
    t: String,
    class: String,
    rank_profile: Option<(u16, u16)>,
}

fn classify_cmd<W: Write>(v: &ChevVec, json: bool, out: &mut W) -> chevorbit::Result<()> {
    let cls = Classifier::new(v.sys().clone(), v.field().clone())?;
    let sig = cls.signature(v)?;
    let label = cls.label_of(&sig)?;
    let payload = ClassifyOut {
        label: LabelDto::of(label),
        adjective: label.adjective(v.field()),
        t: sig.t.to_hex(),
        class: sig.cls.to_hex(),
        rank_profile: (sig.t.is_zero() && sig.cls.is_zero() && !sig.is_zero)
            .then_some(sig.rank_profile),
    };
    if json {
        writeln!(out, "{}", serde_json::to_string(&payload)?)?;
    } else {
        writeln!(out, "label: {label}")?;
        if let Some(adj) = payload.adjective {
            writeln!(out, "adjective: {adj}")?;
        }
        writeln!(out, "t: {}", payload.t)?;
        writeln!(out, "class: {}", payload.class)?;
        if let Some((r1, r2)) = payload.rank_profile {
            writeln!(out, "rank profile: ({r1}, {r2})")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CanonOut {
    label: LabelDto,
    adjective: Option<&'static str>,
    representative: ChevVecDto,
    witness: Option<Vec<(String, String)>>,
}

fn canon_cmd<W: Write>(
    v: &ChevVec,
    seed: u64,
    budget: usize,
    json: bool,
    out: &mut W,
) -> chevorbit::Result<()> {
    let cls = Classifier::new(v.sys().clone(), v.field().clone())?;
    let opts = ReduceOpts { seed, budget };
    let (label, rep, word) = canonicalize(&cls, v, &opts)?;
    let payload = CanonOut {
        label: LabelDto::of(label),
        adjective: label.adjective(v.field()),
        representative: ChevVecDto::of(&rep),
        witness: word.as_ref().map(chevorbit::wire::word_to_dto),
    };
    if json {
        writeln!(out, "{}", serde_json::to_string(&payload)?)?;
    } else {
        writeln!(out, "label: {label}")?;
        match &payload.witness {
            Some(w) => writeln!(out, "witness: {} factors", w.len())?,
            None => writeln!(out, "witness: none (label by invariants only)")?,
        }
        writeln!(out, "representative: {}", serde_json::to_string(&payload.representative)?)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SigCount {
    is_zero: bool,
    t: String,
    class: String,
    rank_profile: (u16, u16),
    count: u64,
}

#[derive(Serialize)]
struct SampleOut {
    phi: String,
    field: FieldDto,
    n: usize,
    seed: u64,
    distinct_signatures: usize,
    expected_orbits: u64,
    signatures: Vec<SigCount>,
}

#[allow(clippy::too_many_arguments)]
fn census_cmd<W: Write>(
    id: RootSystemId,
    field_deg: u32,
    mode: CensusMode,
    n: usize,
    seed: u64,
    out_path: Option<PathBuf>,
    allow_heavy: bool,
    workers: usize,
    json: bool,
    out: &mut W,
) -> chevorbit::Result<()> {
    let sys = build_root_system(id);
    let field = make_field(field_deg)?;
    let cls = Classifier::new(sys, field.clone())?;
    match mode {
        CensusMode::Bfs => {
            let opts = BfsOpts {
                allow_heavy,
                workers,
                seed,
                ..BfsOpts::default()
            };
            let records = census::bfs_census(&cls, &opts)?;
            if let Some(path) = &out_path {
                census::save_census(&records, path)?;
            }
            let dto = CensusFileDto::of(&records)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&dto)?)?;
            } else {
                writeln!(out, "{} over GF({}): {} orbits", dto.phi, field.order(), records.len())?;
                for r in &records {
                    writeln!(out, "  {}  size {}", r.label, r.size)?;
                }
            }
        }
        CensusMode::Sample => {
            let hist = census::sample_census(&cls, n, seed)?;
            let signatures: Vec<SigCount> = hist
                .iter()
                .map(|(sig, count)| SigCount {
                    is_zero: sig.is_zero,
                    t: sig.t.to_hex(),
                    class: sig.cls.to_hex(),
                    rank_profile: sig.rank_profile,
                    count: *count,
                })
                .collect();
            let payload = SampleOut {
                phi: cls.sys().id().to_string(),
                field: FieldDto::of(&field),
                n,
                seed,
                distinct_signatures: signatures.len(),
                expected_orbits: census::expected_orbit_count(&field),
                signatures,
            };
            if json {
                writeln!(out, "{}", serde_json::to_string(&payload)?)?;
            } else {
                writeln!(
                    out,
                    "{} over GF({}): {} distinct signatures in {} samples (expected orbit count {})",
                    payload.phi,
                    field.order(),
                    payload.distinct_signatures,
                    n,
                    payload.expected_orbits
                )?;
                for s in &payload.signatures {
                    writeln!(
                        out,
                        "  t={} class={} profile={:?} zero={}  count {}",
                        s.t, s.class, s.rank_profile, s.is_zero, s.count
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn selftest_cmd<W: Write>(seed: u64, out: &mut W) -> chevorbit::Result<()> {
    selftest::run(seed, out)
}

pub mod selftest {
    //! The built-in verification suites: diagonal action of the four-factor
    //! elements, the closed form of the unipotent lift, and the automorphism
    //! property of the elementary action.

    use chevorbit::gf2k::{Fel, Field};
    use chevorbit::invariants::lift;
    use chevorbit::liealg::{apply_word, apply_x, bracket, w_word, ChevVec};
    use chevorbit::rootsys::{Quadruple, RootSystem, RootSystemId};
    use chevorbit::{build_root_system, make_field, Error};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;
    use std::sync::Arc;

    /// The closed form of the lift of a frame vector at parameter 0, written
    /// out term by term. Test oracle, independent of the group action code.
    pub fn closed_form_lift(
        sys: &Arc<RootSystem>,
        field: &Arc<Field>,
        quad: &Quadruple,
        c: [Fel; 5],
    ) -> ChevVec {
        let [cl, cd, cm, cn, cx] = c;
        let f = field;
        let mul = |a: Fel, b: Fel| f.mul(a, b);
        let mul3 = |a: Fel, b: Fel, c: Fel| f.mul(a, f.mul(b, c));
        let d = sys.delta();
        let (l, m, n, x) = (quad.lambda, quad.mu, quad.nu, quad.xi);
        let minus = |a: chevorbit::Root, b: chevorbit::Root| {
            chevorbit::Root::from_coords(
                &a.coords()
                    .iter()
                    .zip(b.coords())
                    .map(|(p, q)| p - q)
                    .collect::<Vec<_>>(),
            )
        };
        let mut y = ChevVec::zero(sys.clone(), field.clone());
        let mut add_term = |root: chevorbit::Root, coeff: Fel| {
            if !coeff.is_zero() {
                let prev = y.get_e(&root).unwrap();
                y.set_e(&root, f.add(prev, coeff)).unwrap();
            }
        };
        add_term(d, Fel::ONE);
        add_term(l, cl);
        add_term(m, cm);
        add_term(n, cn);
        add_term(x, cx);
        add_term(minus(d, l), cd);
        add_term(minus(m, minus(d, l)), mul(cm, cl));
        add_term(minus(n, minus(d, l)), mul(cn, cl));
        add_term(minus(n, minus(d, m)), mul(cn, cm));
        add_term(minus(x, minus(d, l)), mul(cx, cl));
        add_term(minus(x, minus(d, m)), mul(cx, cm));
        add_term(minus(x, minus(d, n)), mul(cx, cn));
        add_term(x.negated(), mul3(cn, cm, cl));
        add_term(n.negated(), mul3(cx, cm, cl));
        add_term(m.negated(), mul3(cx, cn, cl));
        add_term(
            l.negated(),
            f.add(mul3(cx, cn, cm), mul(mul(cd, cd), cl)),
        );
        add_term(d.negated(), mul(mul(cx, cn), mul(cm, cl)));
        add_term(minus(m, d), mul3(cd, cm, cl));
        add_term(minus(n, d), mul3(cd, cn, cl));
        add_term(minus(x, d), mul3(cd, cx, cl));
        // Cartan part: the lambda pair product times h_lambda
        let s = mul(cd, cl);
        if !s.is_zero() {
            let mut v = y.clone();
            for (i, &co) in l.coords().iter().enumerate() {
                if co.rem_euclid(2) == 1 {
                    v.set_h(i, s);
                }
            }
            return v;
        }
        y
    }

    fn frame_vector(
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

    pub fn run<W: Write>(seed: u64, out: &mut W) -> chevorbit::Result<()> {
        let mut failures = 0;

        // four-factor elements act diagonally with the stated eigenvalues
        let sys = build_root_system(RootSystemId::E6);
        let field = make_field(2)?;
        let mut checked = 0usize;
        'lemma: for &ai in sys.layer_list(0) {
            let alpha = sys.root_at(ai);
            for a in field.elements().skip(1) {
                let w = w_word(&sys, &field, &alpha, a)?;
                for b in 0..sys.num_roots() as u16 {
                    let eb = ChevVec::basis_e(sys.clone(), field.clone(), &sys.root_at(b))?;
                    let got = apply_word(&w, &eb)?;
                    let layer = sys.inner_idx(ai, b) as i64;
                    let order = (field.order() - 1) as i64;
                    let scale = field.pow(a, (-layer).rem_euclid(order) as u64);
                    if got != eb.scale(scale) {
                        failures += 1;
                        break 'lemma;
                    }
                    checked += 1;
                }
            }
        }
        writeln!(
            out,
            "{} diagonal action: {checked} basis images checked",
            if failures == 0 { "ok" } else { "FAIL" }
        )?;

        // unipotent lift matches its closed form
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lift_failures = 0;
        for id in [RootSystemId::E6, RootSystemId::E7, RootSystemId::E8] {
            let sys = build_root_system(id);
            for k in [1u32, 2, 3] {
                let field = make_field(k)?;
                let quad = sys.find_quadruple(None)?;
                for _ in 0..50 {
                    let c: [Fel; 5] = std::array::from_fn(|_| field.sample(&mut rng));
                    let x = frame_vector(&sys, &field, &quad, c);
                    let y = lift(&x, Fel::ZERO)?;
                    if y != closed_form_lift(&sys, &field, &quad, c) {
                        lift_failures += 1;
                    }
                }
            }
        }
        writeln!(
            out,
            "{} lift closed form: 450 random frame vectors",
            if lift_failures == 0 { "ok" } else { "FAIL" }
        )?;
        failures += lift_failures;

        // the elementary action respects the bracket
        let mut auto_failures = 0;
        for id in [RootSystemId::E6, RootSystemId::E7, RootSystemId::E8] {
            let sys = build_root_system(id);
            let field = make_field(2)?;
            for _ in 0..100 {
                let alpha = sys.root_at(rng.gen_range(0..sys.num_roots()) as u16);
                let a = field.sample(&mut rng);
                let mut mk = |support: usize| {
                    let mut v = ChevVec::zero(sys.clone(), field.clone());
                    for _ in 0..support {
                        let r = sys.root_at(rng.gen_range(0..sys.num_roots()) as u16);
                        v.set_e(&r, field.sample(&mut rng)).unwrap();
                    }
                    v
                };
                let (u, v) = (mk(5), mk(5));
                let lhs = apply_x(&alpha, a, &bracket(&u, &v)?)?;
                let rhs = bracket(&apply_x(&alpha, a, &u)?, &apply_x(&alpha, a, &v)?)?;
                if lhs != rhs {
                    auto_failures += 1;
                }
            }
        }
        writeln!(
            out,
            "{} bracket automorphism: 300 random triples",
            if auto_failures == 0 { "ok" } else { "FAIL" }
        )?;
        failures += auto_failures;

        if failures == 0 {
            Ok(())
        } else {
            Err(Error::Internal(format!("self-test: {failures} failures")))
        }
    }
}
