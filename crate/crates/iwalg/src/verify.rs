//! Randomized and fixed-instance audits of the structural theorems: grade and
//! dimension identities, the Auslander condition, Auslander–Buchsbaum, local
//! duality at finite length, induction, change of rings, and an independent
//! matrix-group oracle for rule-presented multiplication.

use crate::budget;
use crate::cli::print_module;
use crate::homology::{self, homological_dim};
use crate::invariants::{self, InvariantError};
use crate::poly::*;
use crate::ring::{binomial_big, elem_mul, random_element, Element, IntPoly, Mode, Precision, RingContext};
use crate::sbasis::{self, Certification, ModuleMap, Presentation};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Enough to rerun a failing instance.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub ring: String,
    pub precision: Precision,
    pub seed: u64,
    pub instance: usize,
    pub presentation: String,
    pub trace: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub check: String,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// Instances whose verdict rests on a value that did not stabilize.
    pub heuristic: usize,
    pub witness: Option<Witness>,
}

impl AuditReport {
    pub fn new(check: impl Into<String>) -> Self {
        AuditReport { check: check.into(), instances: 0, passed: 0, failed: 0, heuristic: 0, witness: None }
    }

    pub fn record(&mut self, ok: bool, heuristic: bool, witness: impl FnOnce() -> Witness) {
        self.instances += 1;
        if heuristic {
            self.heuristic += 1;
        }
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn merge(&mut self, other: AuditReport) {
        self.instances += other.instances;
        self.passed += other.passed;
        self.failed += other.failed;
        self.heuristic += other.heuristic;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    /// No failures and nothing resting on a heuristic value.
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.heuristic == 0
    }
}

pub fn ring_descriptor(ring: &RingContext) -> String {
    let mode = match ring.mode {
        Mode::Abelian => "abelian",
        Mode::Rules => "rules",
    };
    format!("p={} vars={} mode={}", ring.p, ring.r, mode)
}

fn witness(ring: &RingContext, prec: Precision, seed: u64, instance: usize, m: &Presentation<Zp>, trace: String) -> Witness {
    Witness {
        ring: ring_descriptor(ring),
        precision: prec,
        seed,
        instance,
        presentation: print_module(&m.label, m),
        trace,
    }
}

fn fmt_dim(v: Option<usize>) -> String {
    v.map_or("-inf".into(), |x| x.to_string())
}

/// A random combination Σ c_k e_k with c_k of degree ≤ 1.
pub fn random_combination<D: Domain>(d: &D, nvars: usize, n: usize, rng: &mut impl Rng) -> Vector<D::C> {
    let p = d.p() as i64;
    let mut terms = Vec::new();
    for k in 0..n as u32 {
        terms.push(Term { comp: k, mon: ONE_MON, c: d.from_i64(rng.gen_range(0..p)) });
        for j in 0..nvars {
            terms.push(Term { comp: k, mon: var_mon(j), c: d.from_i64(rng.gen_range(0..p)) });
        }
    }
    from_terms(d, terms)
}

/// For each m with E^m(M) ≠ 0, every sampled cyclic submodule N of E^m(M)
/// has j(N) ≥ m.
pub fn auslander_spotcheck(ring: &RingContext, m: &Presentation<Zp>, trials: usize, seed: u64) -> Result<AuditReport, InvariantError> {
    let mut rep = AuditReport::new("auslander_condition");
    let res = homology::resolve(m)?;
    let Some(pd) = res.pd() else { return Ok(rep) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..=pd {
        // the twist is a ring automorphism fixing the maximal ideal, so grades
        // of submodules do not see it; untwisted entries stay far smaller
        let e = homology::ext_from_resolution(&res, i, false)?.module;
        if e.is_zero() {
            continue;
        }
        for t in 0..trials {
            let v = random_combination(&e.dom, e.nvars, e.ngens, &mut rng);
            let n = e.submodule(&[v.clone()]);
            let j = invariants::ext_profile(&n)?.grade();
            let ok = j.map_or(true, |j| j >= i);
            rep.record(ok, false, || {
                witness(ring, ring.default_prec, seed, t, m, format!("E^{i}: cyclic submodule has j = {j:?}"))
            });
        }
    }
    Ok(rep)
}

/// For finite-length M: E^i(M) = 0 for i < d, dim E^d(M) = dim M, and the
/// evaluation map M → E^dE^d(M) is an isomorphism.
///
/// The dual of a minimal resolution of M is a minimal resolution of E^d(M)
/// exactly when E^i(M) = 0 for i < d; dualizing it again returns φ_1 through
/// the involution twice, and the evaluation map is the identity on F_0.
pub fn local_duality_finite(ring: &Arc<RingContext>, m: &Presentation<Zp>, seed: u64) -> Result<AuditReport, InvariantError> {
    let mut rep = AuditReport::new("local_duality_finite");
    let prec = ring.default_prec;
    let d = ring.d;
    let dm = invariants::delta(ring, m, prec, ring.max_escalations)?;
    if dm.value != Some(0) {
        rep.record(false, dm.certification == Certification::Heuristic, || {
            witness(ring, prec, seed, 0, m, format!("not of finite length: δ = {}", fmt_dim(dm.value)))
        });
        return Ok(rep);
    }
    let res = homology::resolve(m)?;
    let mut trace = Vec::new();
    let lower_zero = (0..d).all(|i| {
        homology::ext_from_resolution(&res, i, true).map(|e| e.module.is_zero()).unwrap_or(false)
    });
    trace.push(format!("E^i = 0 for i < d: {lower_zero}"));

    let ed = homology::ext_from_resolution(&res, d, true)?.module;
    let len_m = sbasis::certified_length(ring, m, prec, ring.max_escalations)?;
    let len_e = sbasis::certified_length(ring, &ed, prec, ring.max_escalations)?;
    let same_length = len_m.value.is_some() && len_m.value == len_e.value;
    trace.push(format!("dim M = {:?}, dim E^d = {:?}", len_m.value, len_e.value));

    // E^dE^d(M) presented on F_0 by ι²(φ_1), evaluation map = identity
    let module = &res.module;
    let dom = &module.dom;
    let n = module.ngens;
    let eval_iso = match res.maps.first() {
        None => false,
        Some(a1) => {
            let back = homology::involute(dom, module.nvars, &homology::involute(dom, module.nvars, a1));
            let ee = Presentation::new(dom.clone(), module.nvars, n, back);
            let id: Vec<Vector<BigInt>> = (0..n as u32).map(|k| constant(dom, dom.one(), k)).collect();
            let f = ModuleMap::new(module.clone(), ee.clone(), id.clone());
            let g = ModuleMap::new(ee, module.clone(), id);
            f.is_well_defined() && g.is_well_defined() && f.kernel().is_zero() && f.cokernel().is_zero()
        }
    };
    trace.push(format!("evaluation map is an isomorphism: {eval_iso}"));

    // the double adjoint computed from scratch has the same size
    let ee = homology::ext(&ed, d)?.module;
    let len_ee = sbasis::certified_length(ring, &ee, prec, ring.max_escalations)?;
    let same_double = len_ee.value == len_m.value;
    trace.push(format!("dim E^dE^d = {:?}", len_ee.value));

    let heuristic = [&len_m, &len_e, &len_ee].iter().any(|c| c.certification == Certification::Heuristic);
    let ok = lower_zero && same_length && eval_iso && same_double;
    rep.record(ok, heuristic, || witness(ring, prec, seed, 0, m, trace.join("; ")));
    Ok(rep)
}

/// Ind from Λ(Z_p^s) to Λ(Z_p^r): j and pd are preserved, δ shifts by r − s.
pub fn induction_check(m: &Presentation<Zp>, r: usize, seed: u64) -> Result<AuditReport, InvariantError> {
    let mut rep = AuditReport::new("induction");
    let s = m.nvars;
    let p = m.dom.p;
    let ring_h = Arc::new(RingContext::abelian(p, s).map_err(sbasis::SbasisError::from)?);
    let ring_g = Arc::new(RingContext::abelian(p, r).map_err(sbasis::SbasisError::from)?);
    let mut ind = m.clone();
    ind.nvars = r;

    let ph = invariants::ext_profile(m)?;
    let pg = invariants::ext_profile(&ind)?;
    let dh = invariants::delta(&ring_h, m, ring_h.default_prec, ring_h.max_escalations)?;
    let dg = invariants::delta(&ring_g, &ind, ring_g.default_prec, ring_g.max_escalations)?;
    let shift = r - s;
    let ok = ph.grade() == pg.grade()
        && ph.resolution.pd() == pg.resolution.pd()
        && dg.value == dh.value.map(|x| x + shift)
        && dh.value == ph.grade().map(|j| s + 1 - j);
    let heuristic = dh.certification == Certification::Heuristic || dg.certification == Certification::Heuristic;
    rep.record(ok, heuristic, || {
        witness(&ring_h, ring_h.default_prec, seed, 0, m, format!(
            "j: {:?} -> {:?}, pd: {:?} -> {:?}, δ: {} -> {}",
            ph.grade(), pg.grade(), ph.resolution.pd(), pg.resolution.pd(), fmt_dim(dh.value), fmt_dim(dg.value)
        ))
    });
    Ok(rep)
}

/// M = Λ(H × Z_p)/(f, b_{s+1}) for f ∈ Λ(H) is pseudo-null over Λ(H × Z_p).
pub fn torsion_pseudonull_check(p: u64, s: usize, f: &Vector<BigInt>, seed: u64) -> Result<AuditReport, InvariantError> {
    let mut rep = AuditReport::new("torsion_pseudonull");
    let d = Zp::new(p);
    let r = s + 1;
    let ring = Arc::new(RingContext::abelian(p, r).map_err(sbasis::SbasisError::from)?);
    let m = Presentation::new(d.clone(), r, 1, vec![f.clone(), monomial(&d, d.one(), var_mon(s), 0)]);
    let dg = invariants::delta(&ring, &m, ring.default_prec, ring.max_escalations)?;
    let de = invariants::delta_via_ext(&m)?;
    let ok = invariants::is_pseudo_null(dg.value, ring.d) && invariants::is_pseudo_null(de, ring.d);
    rep.record(ok, dg.certification == Certification::Heuristic, || {
        witness(&ring, ring.default_prec, seed, 0, &m, format!("δ = {} (gr), {} (Ext)", fmt_dim(dg.value), fmt_dim(de)))
    });
    Ok(rep)
}

/// For a Λ/p-module N: E^i_{Λ/p}(N) and E^{i+1}_Λ(N) have the same profile.
pub fn change_of_rings_check(n: &Presentation<Fp>, seed: u64) -> Result<AuditReport, InvariantError> {
    let mut rep = AuditReport::new("change_of_rings");
    let lifted = sbasis::lift_from_fp(n);
    let ring = RingContext::abelian(n.dom.p, n.nvars).map_err(sbasis::SbasisError::from)?;
    let res_fp = homology::resolve(n)?;
    let res_l = homology::resolve(&lifted)?;
    for i in 0..=homological_dim(n) {
        let a = sbasis::lift_from_fp(&homology::ext_from_resolution(&res_fp, i, true)?.module);
        let b = homology::ext_from_resolution(&res_l, i + 1, true)?.module;
        let pa = invariants::profile(&a)?;
        let pb = invariants::profile(&b)?;
        rep.record(pa == pb, false, || {
            witness(&ring, ring.default_prec, seed, i, &lifted, format!("i = {i}: {pa:?} vs {pb:?}"))
        });
    }
    Ok(rep)
}

/// Kernel and cokernel of M → E^1E^1(M) are pseudo-null (M torsion), and
/// E^1(M), E^1(tor M) agree in (δ, j, μ) up to pseudo-null modules.
pub fn pseudo_iso_check(ring: &RingContext, m: &Presentation<Zp>, seed: u64) -> Result<(AuditReport, AuditReport), InvariantError> {
    let d = ring.d;
    let mut defect = AuditReport::new("e1e1_defect");
    let mut adjoint = AuditReport::new("e1_of_torsion");
    let pn_class = |x: Option<usize>| x.filter(|&v| v + 2 > d);
    let delta_m = invariants::delta_via_ext(m)?;
    if delta_m.map_or(true, |x| x < d) {
        let cmp = homology::e1e1_comparison(m)?;
        let dk = invariants::delta_via_ext(&cmp.kernel)?;
        let dc = invariants::delta_via_ext(&cmp.cokernel)?;
        let ok = invariants::is_pseudo_null(dk, d) && invariants::is_pseudo_null(dc, d);
        defect.record(ok, false, || {
            witness(ring, ring.default_prec, seed, 0, m, format!("δ(ker) = {}, δ(coker) = {}", fmt_dim(dk), fmt_dim(dc)))
        });
    }
    let cs = homology::canonical_sequence(m)?;
    let e1 = homology::ext(m, 1)?.module;
    let e1t = homology::ext(&cs.torsion, 1)?.module;
    let a = (pn_class(invariants::delta_via_ext(&e1)?), invariants::mu(&e1).mu);
    let b = (pn_class(invariants::delta_via_ext(&e1t)?), invariants::mu(&e1t).mu);
    adjoint.record(a == b, false, || {
        witness(ring, ring.default_prec, seed, 0, m, format!("(δ mod pn, μ): {a:?} vs {b:?}"))
    });
    Ok((defect, adjoint))
}

/// 3×3 upper unitriangular matrices over Z/q.
type Mat = [[BigInt; 3]; 3];

fn mat_mul(a: &Mat, b: &Mat, q: &BigInt) -> Mat {
    let mut c: Mat = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = BigInt::from(0);
            for k in 0..3 {
                s += &a[i][k] * &b[k][j];
            }
            c[i][j] = s.mod_floor(q);
        }
    }
    c
}

fn generator_matrix(p: u64, i: usize) -> Mat {
    let mut m: Mat = Default::default();
    for k in 0..3 {
        m[k][k] = BigInt::from(1);
    }
    let (r, c) = [(0, 1), (1, 2), (0, 2)][i];
    m[r][c] = BigInt::from(p * p);
    m
}

/// Signed representative of x mod q.
fn balanced(x: &BigInt, q: &BigInt) -> BigInt {
    let x = x.mod_floor(q);
    if &x * 2 > *q {
        x - q
    } else {
        x
    }
}

/// Expand g = x_1^{e_1} x_2^{e_2} x_3^{e_3} as Π (1 + b_i)^{e_i}, already in
/// the ordered normal form.
fn coordinates_to_element(ring: &Arc<RingContext>, prec: Precision, e: &[BigInt; 3]) -> Element {
    let n = prec.n;
    let mut poly: IntPoly = Vec::new();
    for a1 in 0..n {
        for a2 in 0..n - a1 {
            for a3 in 0..n - a1 - a2 {
                let c = binomial_big(&e[0], a1) * binomial_big(&e[1], a2) * binomial_big(&e[2], a3);
                let mut m = ONE_MON;
                m[0] = a1 as u16;
                m[1] = a2 as u16;
                m[2] = a3 as u16;
                poly.push((m, c));
            }
        }
    }
    Element::from_int_poly(ring, prec, &poly)
}

/// Multiply random words in the x_i with `elem_mul` and with matrices, and
/// compare after reading off coordinates.
pub fn matrix_oracle_check(ring: &Arc<RingContext>, prec: Precision, trials: usize, word_len: usize, seed: u64) -> AuditReport {
    let mut rep = AuditReport::new("matrix_oracle");
    let p = ring.p;
    let q = BigInt::from(p).pow(prec.a + 4);
    let pp = BigInt::from(p * p);
    let qe = BigInt::from(p).pow(prec.a + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Element::constant(ring, prec, 1);
    let xs: Vec<Element> = (0..3)
        .map(|i| crate::ring::elem_add(&one, &Element::var(ring, prec, i)).unwrap())
        .collect();
    for t in 0..trials {
        let word: Vec<usize> = (0..word_len).map(|_| rng.gen_range(0..3)).collect();
        let mut g: Mat = Default::default();
        for (k, row) in g.iter_mut().enumerate() {
            row[k] = BigInt::from(1);
        }
        let mut lhs = one.clone();
        let mut failure = None;
        for &i in &word {
            g = mat_mul(&g, &generator_matrix(p, i), &q);
            match elem_mul(&lhs, &xs[i]) {
                Ok(x) => lhs = x,
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let e1 = balanced(&(&g[0][1] / &pp), &qe);
        let e2 = balanced(&(&g[1][2] / &pp), &qe);
        let e3 = balanced(&((&g[0][2] - &pp * &pp * &e1 * &e2) / &pp), &qe);
        let rhs = coordinates_to_element(ring, prec, &[e1, e2, e3]);
        let ok = failure.is_none() && lhs == rhs;
        rep.record(ok, false, || Witness {
            ring: ring_descriptor(ring),
            precision: prec,
            seed,
            instance: t,
            presentation: String::new(),
            trace: format!(
                "word {:?}: elem_mul = {}, matrix = {}{}",
                word.iter().map(|i| i + 1).collect::<Vec<_>>(),
                crate::ring::format_element(&lhs),
                crate::ring::format_element(&rhs),
                failure.map(|f| format!(" ({f})")).unwrap_or_default()
            ),
        });
    }
    rep
}

/// σ(xy) = σ(x)σ(y) whenever v(x) + v(y) is below the exact range.
pub fn symbol_multiplicativity(ring: &Arc<RingContext>, prec: Precision, pairs: usize, seed: u64) -> AuditReport {
    let mut rep = AuditReport::new("symbol_multiplicativity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = prec.exact_below();
    let mut t = 0;
    while rep.instances < pairs && t < pairs * 20 {
        t += 1;
        let x = random_element(ring, prec, &mut rng, 3);
        let y = random_element(ring, prec, &mut rng, 3);
        let (Some(vx), Some(vy)) = (x.v_m().value, y.v_m().value) else { continue };
        if vx + vy >= exact {
            continue;
        }
        let ok = match (elem_mul(&x, &y), x.symbol(), y.symbol()) {
            (Ok(xy), Ok(sx), Ok(sy)) => xy.symbol().map(|s| s == sx.mul(&sy)).unwrap_or(false),
            _ => false,
        };
        rep.record(ok, false, || Witness {
            ring: ring_descriptor(ring),
            precision: prec,
            seed,
            instance: t,
            presentation: String::new(),
            trace: format!("x = {}, y = {}", crate::ring::format_element(&x), crate::ring::format_element(&y)),
        });
    }
    rep
}

/// Shape of the random presentations.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusConfig {
    pub p: u64,
    pub count: usize,
    pub ranks: Vec<usize>,
    pub max_gens: usize,
    pub max_rels: usize,
    pub max_degree: u32,
    pub trials: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { p: 3, count: 50, ranks: vec![1, 2], max_gens: 3, max_rels: 4, max_degree: 2, trials: 8 }
    }
}

fn random_entry(d: &Zp, r: usize, max_degree: u32, rng: &mut impl Rng) -> Vector<BigInt> {
    if rng.gen_bool(0.45) {
        return vec![];
    }
    let p2 = (d.p * d.p) as i64;
    let k = rng.gen_range(1..=2);
    let terms = (0..k)
        .map(|_| {
            let mut m = ONE_MON;
            for _ in 0..rng.gen_range(0..=max_degree) {
                m[rng.gen_range(0..r)] += 1;
            }
            Term { comp: 0, mon: m, c: BigInt::from(rng.gen_range(0..=p2)) }
        })
        .collect();
    from_terms(d, terms)
}

/// A random nonzero module.
pub fn random_presentation(cfg: &CorpusConfig, r: usize, rng: &mut impl Rng) -> Presentation<Zp> {
    let d = Zp::new(cfg.p);
    loop {
        let n = rng.gen_range(1..=cfg.max_gens);
        let nrels = rng.gen_range(1..=cfg.max_rels);
        let rels = (0..nrels)
            .map(|_| {
                let mut row = vec![];
                for j in 0..n as u32 {
                    row = add(&d, &row, &embed(&random_entry(&d, r, cfg.max_degree, rng), j));
                }
                row
            })
            .collect();
        let m = Presentation::new(d.clone(), r, n, rels);
        if !m.is_zero() {
            return m;
        }
    }
}

/// Deterministic corpus: instance k uses its own stream derived from the seed.
pub fn generate_corpus(cfg: &CorpusConfig, seed: u64) -> Vec<Presentation<Zp>> {
    (0..cfg.count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(k as u64));
            let r = cfg.ranks[k % cfg.ranks.len()];
            random_presentation(cfg, r, &mut rng).with_label(format!("C{k}"))
        })
        .collect()
}

/// Run the dimension, pd, Auslander–Buchsbaum and Auslander-condition
/// identities over a random corpus. Reports come back in a fixed order.
pub fn corpus_run(cfg: &CorpusConfig, seed: u64) -> Result<Vec<AuditReport>, InvariantError> {
    let corpus = generate_corpus(cfg, seed);
    let rings: Vec<Arc<RingContext>> = (0..=*cfg.ranks.iter().max().unwrap_or(&1))
        .map(|r| Arc::new(RingContext::abelian(cfg.p, r.max(1)).expect("valid corpus ring")))
        .collect();
    let cap = budget::limit();
    let per: Vec<Result<Vec<AuditReport>, InvariantError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(k, m)| budget::inherit(cap, || corpus_instance(&rings[m.nvars], m, seed, k, cfg.trials)))
        .collect();
    let mut out: Vec<AuditReport> = Vec::new();
    for reps in per {
        for r in reps? {
            match out.iter_mut().find(|o| o.check == r.check) {
                Some(o) => o.merge(r),
                None => out.push(r),
            }
        }
    }
    Ok(out)
}

fn corpus_instance(ring: &Arc<RingContext>, m: &Presentation<Zp>, seed: u64, k: usize, trials: usize) -> Result<Vec<AuditReport>, InvariantError> {
    let d = ring.d;
    let prec = ring.default_prec;
    let w = |trace: String| witness(ring, prec, seed, k, m, trace);

    let dg = invariants::delta(ring, m, prec, ring.max_escalations)?;
    let prof = invariants::ext_profile(m)?;
    let j_gr = dg.value.map(|x| d - x);
    let j_ext = prof.grade();
    let heur = dg.certification == Certification::Heuristic;

    let mut dim = AuditReport::new("dimension_identity");
    let ok = dg.value.is_some() && j_gr == j_ext && dg.value.zip(j_ext).map_or(false, |(a, b)| a + b == d);
    dim.record(ok, heur, || w(format!("δ(gr) = {}, j(gr) = {j_gr:?}, j(Ext) = {j_ext:?}", fmt_dim(dg.value))));

    let routes = invariants::pd_routes(m, &prof);
    let mut pd = AuditReport::new("pd_triple");
    pd.record(routes.agree() && routes.betti.is_some(), false, || w(format!("{routes:?}")));

    let depth = homology::depth(m);
    let mut ab = AuditReport::new("auslander_buchsbaum");
    let ok = matches!((routes.betti, depth), (Some(p), Some(t)) if p + t == d);
    ab.record(ok, false, || w(format!("pd = {:?}, depth = {depth:?}", routes.betti)));

    let mut aus = auslander_spotcheck(ring, m, trials, seed ^ (k as u64).wrapping_mul(0x5851_F42D))?;
    if let Some(wit) = aus.witness.as_mut() {
        wit.instance = k;
    }
    Ok(vec![dim, pd, ab, aus])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_oracle_agrees() {
        let ring = Arc::new(RingContext::congruence_heisenberg(3, 9).unwrap());
        let prec = Precision::new(4, 6).unwrap();
        let rep = matrix_oracle_check(&ring, prec, 8, 4, 7);
        assert!(rep.ok(), "{rep:?}");
        // x1x2 and x2x1 differ
        let one = Element::constant(&ring, prec, 1);
        let x1 = crate::ring::elem_add(&one, &Element::var(&ring, prec, 0)).unwrap();
        let x2 = crate::ring::elem_add(&one, &Element::var(&ring, prec, 1)).unwrap();
        assert_ne!(elem_mul(&x1, &x2).unwrap(), elem_mul(&x2, &x1).unwrap());
    }

    #[test]
    fn symbols_multiply() {
        let ring = Arc::new(RingContext::congruence_heisenberg(3, 9).unwrap());
        let rep = symbol_multiplicativity(&ring, Precision::new(4, 6).unwrap(), 20, 1);
        assert_eq!(rep.instances, 20);
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn small_corpus() {
        let cfg = CorpusConfig { count: 4, trials: 2, ..Default::default() };
        let reps = corpus_run(&cfg, 11).unwrap();
        assert_eq!(reps.len(), 4);
        for r in &reps {
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn duality_on_residue_field() {
        let ring = Arc::new(RingContext::abelian(3, 1).unwrap());
        let d = Zp::new(3);
        let m = Presentation::new(d.clone(), 1, 1, vec![constant(&d, BigInt::from(3), 0), monomial(&d, d.one(), var_mon(0), 0)]);
        let rep = local_duality_finite(&ring, &m, 0).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }
}
