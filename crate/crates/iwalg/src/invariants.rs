//! δ, j, pd, depth, rank, μ, the predicates built from them, the dimension
//! filtration and the decomposition of p-torsion modules.
//!
//! Most quantities have two independent routes. δ comes from the leading-form
//! module gr(M) (proved when it meets a Fitting-ideal lower bound, otherwise
//! certified by precision stabilization, which can be fooled) and from the first
//! nonvanishing E^i(M); pd from the Betti length, the Ext support and the
//! complex Hom(F, k).

use crate::gb;
use crate::graded;
use crate::homology::{self, homological_dim, HomologyError, Resolution};
use crate::poly::*;
use crate::ring::{GradedPoly, Mode, Precision, RingContext};
use crate::sbasis::{self, Certification, Presentation, SbasisError};
use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Sbasis(#[from] SbasisError),
    #[error("{0} is not available in rules mode")]
    Unsupported(&'static str),
    #[error("p-exponent {exponent} is not below the precision a = {a}")]
    PrecisionInsufficient { exponent: u32, a: u32 },
}

pub fn ser_delta<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_u64(*x as u64),
        None => s.serialize_str("-inf"),
    }
}

pub fn ser_grade<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_u64(*x as u64),
        None => s.serialize_str("inf"),
    }
}

/// E^0(M), …, E^d(M) from one minimal resolution, as plain Ext modules
/// (no involution twist; vanishing, supports and annihilators do not see it).
#[derive(Clone, Debug)]
pub struct ExtProfile<D: Domain = Zp> {
    pub resolution: Resolution<D>,
    pub modules: Vec<Presentation<D>>,
}

impl<D: Domain> ExtProfile<D> {
    pub fn nonzero(&self) -> Vec<bool> {
        self.modules.iter().map(|e| !e.is_zero()).collect()
    }

    /// min{i : E^i ≠ 0}; None for M = 0.
    pub fn grade(&self) -> Option<usize> {
        self.nonzero().iter().position(|&x| x)
    }

    /// max{i : E^i ≠ 0}.
    pub fn pd(&self) -> Option<usize> {
        self.nonzero().iter().rposition(|&x| x)
    }
}

pub fn ext_profile<D: Domain>(m: &Presentation<D>) -> Result<ExtProfile<D>, InvariantError> {
    let resolution = homology::resolve(m)?;
    let modules = (0..=homological_dim(m))
        .map(|i| homology::ext_from_resolution(&resolution, i, false).map(|e| e.module))
        .collect::<Result<_, _>>()?;
    Ok(ExtProfile { resolution, modules })
}

/// δ = d − min{i : E^i(M) ≠ 0}.
pub fn delta_via_ext<D: Domain>(m: &Presentation<D>) -> Result<Option<usize>, InvariantError> {
    if m.is_zero() {
        return Ok(None);
    }
    let d = homological_dim(m);
    Ok(ext_profile(m)?.grade().map(|j| d - j))
}

/// δ = dim gr(M), certified by comparing successive precisions.
pub fn delta(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    prec: Precision,
    max_escalations: u32,
) -> Result<sbasis::Certified<Option<usize>>, InvariantError> {
    Ok(sbasis::certified_dim(ring, m, prec, max_escalations)?)
}

/// j = d − δ via gr.
pub fn grade(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    prec: Precision,
    max_escalations: u32,
) -> Result<sbasis::Certified<Option<usize>>, InvariantError> {
    let c = delta(ring, m, prec, max_escalations)?;
    let flip = |v: Option<usize>| v.map(|x| ring.d - x);
    Ok(sbasis::Certified {
        value: flip(c.value),
        certification: c.certification,
        escalations: c.escalations,
        history: c.history.into_iter().map(flip).collect(),
        precision: c.precision,
    })
}

pub fn is_pseudo_null(delta: Option<usize>, d: usize) -> bool {
    delta.map_or(true, |x| x + 2 <= d)
}

/// pd by Betti length, by Ext support and by dim_k Ext^i(M, k) on an
/// unminimized resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PdRoutes {
    pub betti: Option<usize>,
    pub ext: Option<usize>,
    pub ext_k: Option<usize>,
}

impl PdRoutes {
    pub fn agree(&self) -> bool {
        self.betti == self.ext && self.ext == self.ext_k
    }
}

pub fn pd_routes<D: Domain>(m: &Presentation<D>, profile: &ExtProfile<D>) -> PdRoutes {
    let top = homological_dim(m);
    let ek = homology::ext_k_from_complex(&m.simplify().pres, top);
    PdRoutes {
        betti: profile.resolution.pd(),
        ext: profile.pd(),
        ext_k: ek.iter().rposition(|&x| x > 0),
    }
}

/// n − rank of the relation matrix over the fraction field.
pub fn rank<D: Domain>(m: &Presentation<D>) -> usize {
    m.ngens - gb::rank(&m.dom, &m.rels)
}

/// Rank from the symbol matrix of the relations; the only route in rules mode.
pub fn graded_rank_estimate(ring: &Arc<RingContext>, m: &Presentation<Zp>, prec: Precision) -> usize {
    let rows = sbasis::to_elements(m, ring, prec);
    let symbols: Vec<Vec<GradedPoly>> = rows
        .iter()
        .filter_map(|row| {
            let v = row.iter().filter_map(|e| e.v_m().value).min()?;
            Some(
                row.iter()
                    .map(|e| match (e.v_m().value, e.symbol()) {
                        (Some(w), Ok(s)) if w == v => s,
                        _ => GradedPoly::zero(ring.p, ring.r + 1),
                    })
                    .collect(),
            )
        })
        .collect();
    m.ngens - graded::graded_rank(&symbols)
}

/// Chain ranks d_j = rk_{Λ/p}(_{p^{j+1}}M / _{p^j}M) and μ = Σ d_j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuReport {
    pub mu: usize,
    pub chain_ranks: Vec<usize>,
    /// Smallest e with _{p^e}M = _{p^∞}M.
    pub p_exponent: u32,
}

/// (U : p) in F = R^n.
fn colon_p(d: &Zp, n: usize, u: &[Vector<BigInt>]) -> Vec<Vector<BigInt>> {
    let pe: Vec<Vector<BigInt>> = (0..n as u32).map(|i| constant(d, d.from_i64(d.p as i64), i)).collect();
    gb::kernel(d, &pe, n, u)
}

/// Generators in F of _{p^j}M for j = 0, 1, … until the chain stops growing.
pub fn p_torsion_chain(m: &Presentation<Zp>) -> Vec<Vec<Vector<BigInt>>> {
    let d = &m.dom;
    let n = m.ngens;
    let mut chain = vec![m.rels.clone()];
    loop {
        let last = chain.last().unwrap();
        let next = colon_p(d, n, last);
        if next.iter().all(|v| sbasis::local_member(d, v, n, last)) {
            return chain;
        }
        chain.push(next);
    }
}

pub fn mu(m: &Presentation<Zp>) -> MuReport {
    let d = &m.dom;
    let n = m.ngens;
    let chain = p_torsion_chain(m);
    let chain_ranks: Vec<usize> = chain
        .windows(2)
        .map(|w| {
            let q = homology::subquotient(d, m.nvars, n, &w[1], &w[0]);
            rank(&sbasis::mod_p(&q))
        })
        .collect();
    MuReport { mu: chain_ranks.iter().sum(), p_exponent: (chain.len() - 1) as u32, chain_ranks }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    /// n_1 ≤ n_2 ≤ … with tor_{Z_p}M ∼ ⊕ Λ/p^{n_i}.
    pub exponents: Vec<u32>,
    pub mu: usize,
    pub chain_ranks: Vec<usize>,
    pub p_exponent: u32,
    /// Σ n_i = μ and #{n_i ≥ j+1} = d_j.
    pub consistent: bool,
}

pub fn decompose_p_torsion(m: &Presentation<Zp>, a: u32) -> Result<DecompositionReport, InvariantError> {
    let mr = mu(m);
    if mr.p_exponent >= a {
        return Err(InvariantError::PrecisionInsufficient { exponent: mr.p_exponent, a });
    }
    let dj = &mr.chain_ranks;
    let mut exponents = Vec::new();
    let mut monotone = true;
    for j in 0..dj.len() {
        let next = dj.get(j + 1).copied().unwrap_or(0);
        if next > dj[j] {
            monotone = false;
            continue;
        }
        exponents.extend(std::iter::repeat((j + 1) as u32).take(dj[j] - next));
    }
    let total: usize = exponents.iter().map(|&x| x as usize).sum();
    let counts_ok = (0..dj.len()).all(|j| exponents.iter().filter(|&&e| e as usize > j).count() == dj[j]);
    Ok(DecompositionReport {
        consistent: monotone && counts_ok && total == mr.mu,
        exponents,
        mu: mr.mu,
        chain_ranks: mr.chain_ranks,
        p_exponent: mr.p_exponent,
    })
}

/// ann(Q) as an ideal of the polynomial ring (vectors in component 0).
pub fn annihilator<D: Domain>(q: &Presentation<D>) -> Vec<Vector<D::C>> {
    let d = &q.dom;
    let t = q.ngens;
    if t == 0 {
        return vec![constant(d, d.one(), 0)];
    }
    let diag: Vector<D::C> = (0..t as u32).map(|k| Term { comp: k * t as u32 + k, mon: ONE_MON, c: d.one() }).collect();
    let diag = from_terms(d, diag);
    let mut u = Vec::new();
    for blk in 0..t {
        for r in &q.rels {
            u.push(offset(r, (blk * t) as u32));
        }
    }
    gb::kernel(d, &[diag], t * t, &u)
}

/// (U : J) for an ideal J, inside F = R^n.
pub fn colon_ideal<D: Domain>(d: &D, n: usize, u: &[Vector<D::C>], j: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let s = j.len();
    let f: Vec<Vector<D::C>> = (0..n as u32)
        .map(|i| {
            let mut acc = vec![];
            for (k, g) in j.iter().enumerate() {
                acc = add(d, &acc, &offset(&embed(g, i), (k * n) as u32));
            }
            acc
        })
        .collect();
    let mut blocks = Vec::with_capacity(s * u.len());
    for k in 0..s {
        for r in u {
            blocks.push(offset(r, (k * n) as u32));
        }
    }
    gb::kernel(d, &f, n * s, &blocks)
}

/// (U : J^∞).
pub fn saturate<D: Domain>(d: &D, n: usize, u: &[Vector<D::C>], j: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let mut k = gb::groebner(d, u);
    loop {
        let next = gb::groebner(d, &colon_ideal(d, n, &k, j));
        if next.iter().all(|v| gb::member(d, v, &k)) {
            return k;
        }
        k = next;
    }
}

fn ideal_product<D: Domain>(d: &D, a: &[Vector<D::C>], b: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(poly_mul(d, x, y));
        }
    }
    gb::groebner(d, &out)
}

/// Generators in F of T_i(M) = H^0_{J_i}(M), J_i = Π_{j ≥ d−i} ann E^j(M),
/// for i = 0..=d. Associated primes of dimension ≤ i are exactly those in the
/// support of some E^j with j ≥ d − i.
pub fn torsion_filtration_generators<D: Domain>(m: &Presentation<D>) -> Result<Vec<Vec<Vector<D::C>>>, InvariantError> {
    let dom = &m.dom;
    let n = m.ngens;
    let dd = homological_dim(m);
    let prof = ext_profile(m)?;
    let anns: Vec<Option<Vec<Vector<D::C>>>> =
        prof.modules.iter().map(|e| (!e.is_zero()).then(|| annihilator(e))).collect();
    let mut out = Vec::with_capacity(dd + 1);
    let mut ideal: Option<Vec<Vector<D::C>>> = None;
    let mut current = m.rels.clone();
    for i in 0..dd {
        let mut changed = false;
        if let Some(a) = &anns[dd - i] {
            ideal = Some(match &ideal {
                None => a.clone(),
                Some(j) => ideal_product(dom, j, a),
            });
            changed = true;
        }
        if changed {
            current = saturate(dom, n, &m.rels, ideal.as_ref().unwrap());
        }
        out.push(current.clone());
    }
    out.push((0..n as u32).map(|k| constant(dom, dom.one(), k)).collect());
    Ok(out)
}

/// Isomorphism-invariant data used to compare modules built by different routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub zero: bool,
    #[serde(serialize_with = "ser_delta")]
    pub delta: Option<usize>,
    pub mu: usize,
    pub betti: Vec<usize>,
}

pub fn profile(m: &Presentation<Zp>) -> Result<Profile, InvariantError> {
    let zero = m.is_zero();
    if zero {
        return Ok(Profile { zero, delta: None, mu: 0, betti: vec![0] });
    }
    let prof = ext_profile(m)?;
    let d = homological_dim(m);
    Ok(Profile {
        zero,
        delta: prof.grade().map(|j| d - j),
        mu: mu(m).mu,
        betti: prof.resolution.betti.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationLevel {
    pub index: usize,
    #[serde(skip)]
    pub generators: Vec<Vector<BigInt>>,
    #[serde(skip)]
    pub module: Presentation<Zp>,
    pub min_generators: usize,
    #[serde(serialize_with = "ser_delta")]
    pub delta: Option<usize>,
    /// T_i / T_{i-1} is zero or of pure dimension i.
    pub pure_quotient: bool,
    /// T_i / T_{i-1} = 0 exactly when E^{d-i}E^{d-i}(M) = 0.
    pub quotient_matches_double_adjoint: bool,
    /// Agreement with the recursion T_{d-i-1} = E^{i+1} D Ω^i T_{d-i}.
    pub recursion_agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    pub d: usize,
    pub levels: Vec<FiltrationLevel>,
    /// T_0(M) and E^dE^d(M) have the same profile.
    pub t0_matches_double_adjoint: bool,
}

impl FiltrationReport {
    pub fn consistent(&self) -> bool {
        self.t0_matches_double_adjoint
            && self.levels.iter().all(|l| {
                l.pure_quotient
                    && l.quotient_matches_double_adjoint
                    && l.recursion_agrees
                    && l.delta.map_or(true, |x| x <= l.index)
            })
    }
}

/// δ(Q) = i and T_{i-1}(Q) = 0, or Q = 0.
fn is_pure(q: &Presentation<Zp>, i: usize) -> Result<bool, InvariantError> {
    let q = q.simplify().pres;
    if q.is_zero() {
        return Ok(true);
    }
    if delta_via_ext(&q)? != Some(i) {
        return Ok(false);
    }
    if i == 0 {
        return Ok(true);
    }
    let t = torsion_filtration_generators(&q)?;
    Ok(q.submodule(&t[i - 1]).is_zero())
}

fn double_adjoint(m: &Presentation<Zp>, i: usize) -> Result<Presentation<Zp>, InvariantError> {
    let e = homology::ext(m, i)?.module;
    Ok(homology::ext(&e, i)?.module)
}

pub fn dimension_filtration(m: &Presentation<Zp>) -> Result<FiltrationReport, InvariantError> {
    let d = homological_dim(m);
    let n = m.ngens;
    let gens = torsion_filtration_generators(m)?;
    let subs: Vec<Presentation<Zp>> = gens.iter().map(|g| m.submodule(g).simplify().pres).collect();

    // recursion: T_d = M, T_{d-i-1} = E^{i+1} D Ω^i T_{d-i}
    let mut rec: Vec<Option<Presentation<Zp>>> = vec![None; d + 1];
    rec[d] = Some(m.simplify().pres);
    for i in 0..d {
        let prev = rec[d - i].as_ref().unwrap();
        let looped = homology::loop_power(prev, i)?;
        let dt = homology::transpose_module(&looped)?;
        rec[d - i - 1] = Some(homology::ext(&dt, i + 1)?.module);
    }

    let mut levels = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let sub = &subs[i];
        let below: Vec<Vector<BigInt>> = if i == 0 { m.rels.clone() } else { gens[i - 1].clone() };
        let quotient = homology::subquotient(&m.dom, m.nvars, n, &gens[i], &below);
        let quotient_zero = quotient.is_zero();
        let ee = double_adjoint(m, d - i)?;
        let kept = sub.ngens;
        levels.push(FiltrationLevel {
            index: i,
            generators: gens[i].iter().filter(|v| !m.local_member(v)).cloned().collect(),
            module: sub.clone(),
            min_generators: kept,
            delta: delta_via_ext(sub)?,
            pure_quotient: is_pure(&quotient, i)?,
            quotient_matches_double_adjoint: quotient_zero == ee.is_zero(),
            recursion_agrees: profile(sub)? == profile(rec[i].as_ref().unwrap())?,
        });
    }
    let ee = double_adjoint(m, d)?;
    let t0_matches_double_adjoint = profile(&subs[0])? == profile(&ee)?;
    Ok(FiltrationReport { d, levels, t0_matches_double_adjoint })
}

/// v ∈ M lies in the submodule generated by `gens` (all vectors in F).
pub fn in_submodule<D: Domain>(m: &Presentation<D>, gens: &[Vector<D::C>], v: &Vector<D::C>) -> bool {
    let mut u = m.rels.clone();
    u.extend(gens.iter().cloned());
    sbasis::local_member(&m.dom, v, m.ngens, &u)
}

/// Generators of (A + U) ∩ (B + U) in F.
pub fn intersect<D: Domain>(m: &Presentation<D>, a: &[Vector<D::C>], b: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let d = &m.dom;
    let mut u = m.rels.clone();
    u.extend(b.iter().cloned());
    gb::kernel(d, a, m.ngens, &u)
        .iter()
        .map(|c| {
            let mut acc = vec![];
            for (l, al) in a.iter().enumerate() {
                let e = entry::<D>(c, l as u32);
                if !e.is_empty() {
                    acc = add(d, &acc, &poly_mul(d, &e, al));
                }
            }
            acc
        })
        .filter(|v| !v.is_empty())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Flags {
    pub torsion: bool,
    pub torsion_free: bool,
    pub pseudo_null: bool,
    pub reflexive: bool,
    pub cohen_macaulay: bool,
}

/// Whether independently computed routes gave the same answer.
#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub grade: bool,
    pub pd: bool,
    pub torsion: bool,
    pub torsion_free: bool,
    pub auslander_buchsbaum: bool,
}

impl Agreement {
    pub fn all(&self) -> bool {
        self.grade && self.pd && self.torsion && self.torsion_free && self.auslander_buchsbaum
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub d: usize,
    #[serde(serialize_with = "ser_delta")]
    pub delta: Option<usize>,
    #[serde(rename = "j", serialize_with = "ser_grade")]
    pub grade: Option<usize>,
    #[serde(rename = "j_via_ext", serialize_with = "ser_grade")]
    pub grade_via_ext: Option<usize>,
    pub pd: Option<usize>,
    pub pd_routes: PdRoutes,
    pub depth: Option<usize>,
    pub rank: usize,
    pub mu: usize,
    pub betti: Vec<usize>,
    pub ext_nonzero: Vec<bool>,
    #[serde(flatten)]
    pub flags: Flags,
    pub agreement: Agreement,
    pub certification: Certification,
    pub escalations: u32,
    pub precision: Precision,
}

pub fn invariant_report(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    prec: Precision,
    max_escalations: u32,
) -> Result<InvariantReport, InvariantError> {
    if ring.mode == Mode::Rules {
        return Err(InvariantError::Unsupported("the full invariant report"));
    }
    let d = ring.d;
    let cd = delta(ring, m, prec, max_escalations)?;
    let delta = cd.value;
    let grade = delta.map(|x| d - x);
    let prof = ext_profile(m)?;
    let grade_via_ext = prof.grade();
    let routes = pd_routes(m, &prof);
    let depth = homology::depth(m);
    let cs = homology::canonical_sequence(m)?;
    let module = &cs.module;
    let tor_is_all = module.quotient(&cs.torsion_generators).is_zero();
    let tor_is_zero = cs.torsion.is_zero();
    let e1d = homology::ext(&homology::transpose_module(m)?, 1)?.module;
    let nonzero = prof.nonzero();
    let torsion = delta.map_or(true, |x| x < d);
    let flags = Flags {
        torsion,
        torsion_free: tor_is_zero,
        pseudo_null: is_pseudo_null(delta, d),
        reflexive: tor_is_zero && cs.cokernel.is_zero(),
        cohen_macaulay: nonzero.iter().enumerate().all(|(i, &nz)| !nz || Some(i) == grade_via_ext),
    };
    let ab = match (routes.betti, depth) {
        (Some(p), Some(dp)) => p + dp == d,
        (None, None) => true,
        _ => false,
    };
    let agreement = Agreement {
        grade: grade == grade_via_ext,
        pd: routes.agree(),
        torsion: torsion == tor_is_all,
        torsion_free: tor_is_zero == e1d.is_zero(),
        auslander_buchsbaum: ab,
    };
    Ok(InvariantReport {
        d,
        delta,
        grade,
        grade_via_ext,
        pd: routes.betti,
        pd_routes: routes,
        depth,
        rank: rank(m),
        mu: mu(m).mu,
        betti: prof.resolution.betti.clone(),
        ext_nonzero: nonzero,
        flags,
        agreement,
        certification: cd.certification,
        escalations: cd.escalations,
        precision: cd.precision,
    })
}

/// What can be computed for a rule-presented group ring.
#[derive(Clone, Debug, Serialize)]
pub struct RulesInvariantReport {
    pub d: usize,
    #[serde(serialize_with = "ser_delta")]
    pub delta: Option<usize>,
    #[serde(rename = "j", serialize_with = "ser_grade")]
    pub grade: Option<usize>,
    pub rank: usize,
    pub rank_certification: Certification,
    pub certification: Certification,
    pub escalations: u32,
    pub precision: Precision,
}

pub fn rules_invariant_report(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    prec: Precision,
    max_escalations: u32,
) -> Result<RulesInvariantReport, InvariantError> {
    let cd = delta(ring, m, prec, max_escalations)?;
    Ok(RulesInvariantReport {
        d: ring.d,
        delta: cd.value,
        grade: cd.value.map(|x| ring.d - x),
        rank: graded_rank_estimate(ring, m, cd.precision),
        rank_certification: Certification::Heuristic,
        certification: cd.certification,
        escalations: cd.escalations,
        precision: cd.precision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(d: &Zp, terms: &[(i64, &[u16])], comp: u32) -> Vector<BigInt> {
        from_terms(
            d,
            terms
                .iter()
                .map(|(c, e)| {
                    let mut m = ONE_MON;
                    m[..e.len()].copy_from_slice(e);
                    Term { comp, mon: m, c: BigInt::from(*c) }
                })
                .collect(),
        )
    }

    fn cyclic(r: usize, rels: &[&[(i64, &[u16])]]) -> Presentation<Zp> {
        let d = Zp::new(3);
        let rows = rels.iter().map(|t| poly(&d, t, 0)).collect();
        Presentation::new(d, r, 1, rows)
    }

    fn k(r: usize) -> Presentation<Zp> {
        let d = Zp::new(3);
        let mut rows = vec![poly(&d, &[(3, &[])], 0)];
        for j in 0..r {
            let mut e = vec![0u16; j + 1];
            e[j] = 1;
            rows.push(monomial(&d, d.one(), { let mut m = ONE_MON; m[..e.len()].copy_from_slice(&e); m }, 0));
        }
        Presentation::new(d, r, 1, rows)
    }

    #[test]
    fn report_for_lambda_mod_p() {
        let ring = Arc::new(RingContext::abelian(3, 1).unwrap());
        let m = cyclic(1, &[&[(3, &[])]]);
        let rep = invariant_report(&ring, &m, ring.default_prec, 3).unwrap();
        assert_eq!(rep.delta, Some(1));
        assert_eq!(rep.grade, Some(1));
        assert_eq!(rep.pd, Some(1));
        assert_eq!(rep.depth, Some(1));
        assert_eq!(rep.mu, 1);
        assert!(rep.flags.torsion && !rep.flags.pseudo_null && rep.flags.cohen_macaulay);
        assert!(rep.agreement.all());
    }

    #[test]
    fn mu_and_decomposition() {
        let d = Zp::new(3);
        let m = Presentation::new(d.clone(), 1, 2, vec![poly(&d, &[(3, &[])], 0), poly(&d, &[(27, &[])], 1)]);
        let r = mu(&m);
        assert_eq!(r.mu, 4);
        assert_eq!(r.chain_ranks, vec![2, 1, 1]);
        let dec = decompose_p_torsion(&m, 4).unwrap();
        assert_eq!(dec.exponents, vec![1, 3]);
        assert!(dec.consistent);
        assert!(decompose_p_torsion(&m, 3).is_err());
        // Λ/(p, b1) over r = 2 is pseudo-null with μ = 0
        let pn = cyclic(2, &[&[(3, &[])], &[(1, &[1])]]);
        assert_eq!(mu(&pn).mu, 0);
    }

    #[test]
    fn filtration_of_lambda_mod_p_plus_k() {
        let m = cyclic(1, &[&[(3, &[])]]).direct_sum(&k(1));
        let f = dimension_filtration(&m).unwrap();
        assert!(f.consistent(), "{f:?}");
        assert_eq!(f.levels[0].min_generators, 1);
        assert_eq!(f.levels[0].delta, Some(0));
        assert_eq!(f.levels[1].min_generators, 2);
        assert_eq!(f.levels[2].min_generators, 2);
    }

    #[test]
    fn filtration_of_free() {
        let d = Zp::new(3);
        let f = dimension_filtration(&Presentation::free(d, 1, 1)).unwrap();
        assert!(f.consistent());
        assert_eq!(f.levels.iter().map(|l| l.min_generators).collect::<Vec<_>>(), vec![0, 0, 1]);
    }

    #[test]
    fn pd_routes_on_k() {
        let m = k(2);
        let prof = ext_profile(&m).unwrap();
        let r = pd_routes(&m, &prof);
        assert_eq!(r.betti, Some(3));
        assert!(r.agree());
        assert_eq!(homology::depth(&m), Some(0));
    }

    #[test]
    fn ranks() {
        let d = Zp::new(3);
        let row = add(&d, &poly(&d, &[(3, &[])], 0), &poly(&d, &[(1, &[1])], 1));
        assert_eq!(rank(&Presentation::new(d.clone(), 1, 2, vec![row])), 1);
        assert_eq!(rank(&cyclic(1, &[&[(3, &[])]])), 0);
        assert_eq!(rank(&Presentation::free(d, 1, 3)), 3);
    }
}
