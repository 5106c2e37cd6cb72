//! Presentations of Λ-modules and the two bases behind them.
//!
//! Relations are exact polynomials over Z_(p)[b] (or F_p[b] for Λ/p). Global
//! Gröbner computations give kernels and syzygies; Λ is flat over the
//! polynomial ring, so these base-change to Λ. Questions that depend on the
//! local ring (vanishing, minimal generators, membership) use Nakayama on
//! constant terms.
//!
//! The truncated local standard basis works with `Element`s at precision
//! (a, N) and yields the leading-form module gr(M).

use crate::budget;
use crate::gb;
use crate::graded::{self, GradedSubmodule, MonomialOrder};
use crate::poly::*;
use crate::ring::{elem_mul, elem_sub, Element, GradedPoly, Precision, RingContext, RingError};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SbasisError {
    #[error("standard basis exceeded its step budget")]
    StepBudget,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("map is not well defined")]
    IllDefined,
}

/// A module F^n / (row span of `rels`).
#[derive(Clone, Debug)]
pub struct Presentation<D: Domain = Zp> {
    pub dom: D,
    pub nvars: usize,
    pub ngens: usize,
    pub rels: Vec<Vector<D::C>>,
    pub label: String,
}

impl<D: Domain> Presentation<D> {
    pub fn new(dom: D, nvars: usize, ngens: usize, rels: Vec<Vector<D::C>>) -> Self {
        let rels = rels.into_iter().filter(|r| !r.is_empty()).collect();
        Presentation { dom, nvars, ngens, rels, label: String::new() }
    }

    pub fn free(dom: D, nvars: usize, n: usize) -> Self {
        Self::new(dom, nvars, n, vec![])
    }

    pub fn zero(dom: D, nvars: usize) -> Self {
        Self::new(dom, nvars, 0, vec![])
    }

    pub fn with_label(mut self, l: impl Into<String>) -> Self {
        self.label = l.into();
        self
    }

    /// dim_k M/MM.
    pub fn min_gens(&self) -> usize {
        let p = self.dom.p();
        let rows: Vec<Vec<u64>> = self
            .rels
            .iter()
            .map(|r| {
                let mut row = vec![0u64; self.ngens];
                for t in r.iter().filter(|t| t.mon == ONE_MON) {
                    row[t.comp as usize] = self.dom.residue(&t.c);
                }
                row
            })
            .collect();
        self.ngens - fp_rank(rows, p)
    }

    /// Vanishing over the local ring (Nakayama).
    pub fn is_zero(&self) -> bool {
        self.min_gens() == 0
    }

    /// Remove generators killed by a relation with a unit entry.
    pub fn simplify(&self) -> Simplified<D> {
        simplify(self)
    }

    pub fn direct_sum(&self, other: &Presentation<D>) -> Presentation<D> {
        let mut rels = self.rels.clone();
        rels.extend(other.rels.iter().map(|r| offset(r, self.ngens as u32)));
        Presentation::new(self.dom.clone(), self.nvars, self.ngens + other.ngens, rels)
    }

    /// M / (submodule generated by `extra`).
    pub fn quotient(&self, extra: &[Vector<D::C>]) -> Presentation<D> {
        let mut rels = self.rels.clone();
        rels.extend(extra.iter().cloned());
        Presentation::new(self.dom.clone(), self.nvars, self.ngens, rels)
    }

    /// The submodule of M generated by `gens` (vectors in F^n), presented on those generators.
    pub fn submodule(&self, gens: &[Vector<D::C>]) -> Presentation<D> {
        let rels = gb::kernel(&self.dom, gens, self.ngens, &self.rels);
        Presentation::new(self.dom.clone(), self.nvars, gens.len(), rels)
    }

    /// Whether v lies in the relation module after passing to the local ring.
    pub fn local_member(&self, v: &Vector<D::C>) -> bool {
        local_member(&self.dom, v, self.ngens, &self.rels)
    }

    /// Whether the images of `gens` in M vanish, i.e. gens ⊆ relations locally.
    pub fn all_local_members(&self, gens: &[Vector<D::C>]) -> bool {
        gens.iter().all(|v| self.local_member(v))
    }

    pub fn rels_as_matrix(&self) -> Vec<Vec<Vector<D::C>>> {
        self.rels
            .iter()
            .map(|r| (0..self.ngens as u32).map(|j| entry::<D>(r, j)).collect())
            .collect()
    }
}

/// Row rank over F_p.
pub fn fp_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let fp = Fp::new(p);
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = fp.inv(rows[rank][col] % p);
        for x in rows[rank].iter_mut() {
            *x = fp.mul(x, &inv);
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] % p != 0 {
                let f = rows[i][col] % p;
                for c in 0..ncols {
                    let sub = fp.mul(&f, &rows[rank][c]);
                    rows[i][c] = fp.sub(&(rows[i][c] % p), &sub);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Local membership of v in the submodule generated by `u`: the ideal (U : v)
/// contains a unit of the local ring.
pub fn local_member<D: Domain>(d: &D, v: &Vector<D::C>, n: usize, u: &[Vector<D::C>]) -> bool {
    if v.is_empty() {
        return true;
    }
    let gb_u = gb::groebner(d, u);
    if gb::member(d, v, &gb_u) {
        return true;
    }
    let colon = gb::kernel(d, std::slice::from_ref(v), n, u);
    colon.iter().any(|g| is_local_unit(d, &entry::<D>(g, 0)))
}

/// Result of simplification: the new presentation, the surviving original
/// generators, and the elimination steps needed to transport vectors.
#[derive(Clone, Debug)]
pub struct Simplified<D: Domain> {
    pub pres: Presentation<D>,
    pub kept: Vec<usize>,
    steps: Vec<(u32, Vector<D::C>)>,
    old_n: usize,
}

impl<D: Domain> Simplified<D> {
    /// Express a vector over the old generators in the new ones. The result
    /// agrees with the original up to a unit factor.
    pub fn transport(&self, v: &Vector<D::C>) -> Vector<D::C> {
        let d = &self.pres.dom;
        let mut v = v.clone();
        for (j, row) in &self.steps {
            let vj = entry::<D>(&v, *j);
            if vj.is_empty() {
                continue;
            }
            let u = entry::<D>(row, *j);
            v = sub(d, &poly_mul(d, &u, &v), &poly_mul(d, &vj, row));
            normalize(d, &mut v);
        }
        reindex(&v, &self.index_map())
    }

    fn index_map(&self) -> Vec<Option<u32>> {
        let mut map = vec![None; self.old_n];
        for (new, &old) in self.kept.iter().enumerate() {
            map[old] = Some(new as u32);
        }
        map
    }
}

/// Markowitz-style cost of pivoting on entry `j` of row `i`: the size of the
/// products that the elimination forms, smallest pivot first on ties.
fn pivot_cost<D: Domain>(rows: &[Vector<D::C>], i: usize, u: &Vector<D::C>, j: u32) -> (usize, usize, u32) {
    let pivot_len = rows[i].len();
    let fill: usize = rows
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, r)| {
            let e = r.iter().filter(|t| t.comp == j).count();
            if e == 0 { 0 } else { u.len() * r.len() + e * pivot_len }
        })
        .sum();
    (fill, u.len(), u.iter().map(|t| mdeg(&t.mon)).max().unwrap_or(0))
}

pub fn simplify<D: Domain>(m: &Presentation<D>) -> Simplified<D> {
    let d = &m.dom;
    let mut rows: Vec<Vector<D::C>> = m.rels.clone();
    let mut alive = vec![true; m.ngens];
    let mut steps = Vec::new();
    loop {
        let mut best: Option<((usize, usize, u32), usize, u32)> = None;
        for (i, r) in rows.iter().enumerate() {
            let comps: BTreeSet<u32> = r.iter().map(|t| t.comp).collect();
            for j in comps {
                let e = entry::<D>(r, j);
                if is_local_unit(d, &e) {
                    let s = pivot_cost::<D>(&rows, i, &e, j);
                    if best.as_ref().map_or(true, |b| s < b.0) {
                        best = Some((s, i, j));
                    }
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        let row = rows.swap_remove(i);
        let u = entry::<D>(&row, j);
        for r in rows.iter_mut() {
            let e = entry::<D>(r, j);
            if e.is_empty() {
                continue;
            }
            let mut nr = sub(d, &poly_mul(d, &u, r), &poly_mul(d, &e, &row));
            normalize(d, &mut nr);
            budget::check(max_bits(d, &nr));
            *r = nr;
        }
        rows.retain(|r| !r.is_empty());
        alive[j as usize] = false;
        steps.push((j, row));
    }
    let kept: Vec<usize> = (0..m.ngens).filter(|&k| alive[k]).collect();
    let mut s = Simplified {
        pres: Presentation::zero(d.clone(), m.nvars),
        kept,
        steps,
        old_n: m.ngens,
    };
    let map = s.index_map();
    let mut rels: Vec<Vector<D::C>> = Vec::new();
    for r in rows {
        let mut r = reindex(&r, &map);
        normalize(d, &mut r);
        if !r.is_empty() && !rels.contains(&r) {
            rels.push(r);
        }
    }
    s.pres = Presentation::new(d.clone(), m.nvars, s.kept.len(), rels).with_label(m.label.clone());
    s
}

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug)]
pub struct ModuleMap<D: Domain = Zp> {
    pub source: Presentation<D>,
    pub target: Presentation<D>,
    pub images: Vec<Vector<D::C>>,
}

impl<D: Domain> ModuleMap<D> {
    pub fn new(source: Presentation<D>, target: Presentation<D>, images: Vec<Vector<D::C>>) -> Self {
        assert_eq!(images.len(), source.ngens);
        ModuleMap { source, target, images }
    }

    fn apply_row(&self, row: &Vector<D::C>) -> Vector<D::C> {
        let d = &self.source.dom;
        let mut acc = vec![];
        for j in 0..self.source.ngens as u32 {
            let e = entry::<D>(row, j);
            if !e.is_empty() {
                acc = add(d, &acc, &poly_mul(d, &e, &self.images[j as usize]));
            }
        }
        acc
    }

    /// Each source relation maps into the target relations.
    pub fn is_well_defined(&self) -> bool {
        let d = &self.source.dom;
        let g = gb::groebner(d, &self.target.rels);
        self.source.rels.iter().all(|r| {
            let img = self.apply_row(r);
            gb::member(d, &img, &g) || self.target.local_member(&img)
        })
    }

    /// Generators (in the source free module) of the preimage of the target relations.
    pub fn kernel_generators(&self) -> Vec<Vector<D::C>> {
        gb::kernel(&self.source.dom, &self.images, self.target.ngens, &self.target.rels)
    }

    pub fn kernel(&self) -> Presentation<D> {
        let k = self.kernel_generators();
        self.source.submodule(&k)
    }

    pub fn image(&self) -> Presentation<D> {
        self.target.submodule(&self.images)
    }

    pub fn cokernel(&self) -> Presentation<D> {
        self.target.quotient(&self.images)
    }
}

/// Kernel of f: M → N as a presentation (generators are syzygy vectors).
pub fn kernel<D: Domain>(f: &ModuleMap<D>) -> Presentation<D> {
    f.kernel()
}

pub fn coker<D: Domain>(f: &ModuleMap<D>) -> Presentation<D> {
    f.cokernel()
}

pub fn image<D: Domain>(f: &ModuleMap<D>) -> Presentation<D> {
    f.image()
}

pub fn direct_sum<D: Domain>(a: &Presentation<D>, b: &Presentation<D>) -> Presentation<D> {
    a.direct_sum(b)
}

pub fn quotient<D: Domain>(m: &Presentation<D>, extra: &[Vector<D::C>]) -> Presentation<D> {
    m.quotient(extra)
}

/// Convert exact relations to truncated elements.
pub fn to_elements(m: &Presentation<Zp>, ring: &Arc<RingContext>, prec: Precision) -> Vec<Vec<Element>> {
    m.rels
        .iter()
        .map(|r| {
            (0..m.ngens as u32)
                .map(|j| {
                    let poly: Vec<(Mon, num_bigint::BigInt)> =
                        r.iter().filter(|t| t.comp == j).map(|t| (t.mon, t.c.clone())).collect();
                    Element::from_int_poly(ring, prec, &poly)
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Truncated local standard bases.

/// Ghost monomial X_0^s X^α of a term c·b^α with s = v_p(c); index 0 holds s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lead {
    deg: u32,
    comp: u32,
    ghost: Mon,
    /// c / p^s mod p^a
    unit: u64,
}

fn lead_better(a: &Lead, b: &Lead) -> bool {
    use std::cmp::Ordering::*;
    match a.deg.cmp(&b.deg).then(a.comp.cmp(&b.comp)) {
        Less => true,
        Greater => false,
        Equal => degrevlex(&a.ghost, &b.ghost) == Greater,
    }
}

fn leading(v: &[Element], p: u64, r: usize) -> Option<Lead> {
    let mut best: Option<Lead> = None;
    for (comp, e) in v.iter().enumerate() {
        for (m, c) in e.terms() {
            let s = crate::ring::vp_u64(*c, p);
            let mut ghost = ONE_MON;
            ghost[0] = s as u16;
            ghost[1..=r].copy_from_slice(&m[..r]);
            let cand = Lead { deg: mdeg(&ghost), comp: comp as u32, ghost, unit: c / p.pow(s) };
            if best.as_ref().map_or(true, |b| lead_better(&cand, b)) {
                best = Some(cand);
            }
        }
    }
    best
}

fn ghost_divides(a: &Lead, b: &Lead) -> bool {
    a.comp == b.comp && mon_divides(&a.ghost, &b.ghost)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    Certified,
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct StandardBasis {
    pub rank: usize,
    pub precision: Precision,
    pub basis: Vec<Vec<Element>>,
    /// Minimal generators (component, X-monomial) of the leading-term module
    /// in degrees where truncation cannot interfere.
    pub leading: Vec<(u32, Mon)>,
    pub leading_forms: Vec<Vec<GradedPoly>>,
    pub certification: Certification,
}

fn mul_monomial(ring: &Arc<RingContext>, prec: Precision, c: u64, gamma: &Mon, v: &[Element]) -> Result<Vec<Element>, RingError> {
    let m = Element::monomial(ring, prec, c, *gamma);
    v.iter().map(|e| elem_mul(&m, e)).collect()
}

fn vec_sub(a: &[Element], b: &[Element]) -> Result<Vec<Element>, RingError> {
    a.iter().zip(b).map(|(x, y)| elem_sub(x, y)).collect()
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q is a prime power; a is a unit mod q
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (q as i128, (a % q) as i128);
    while nr != 0 {
        let k = r / nr;
        (t, nt) = (nt, t - k * nt);
        (r, nr) = (nr, r - k * nr);
    }
    t.rem_euclid(q as i128) as u64
}

const SB_BUDGET: usize = 200_000;

struct SbRun<'a> {
    ring: &'a Arc<RingContext>,
    prec: Precision,
    q: u64,
    steps: usize,
}

impl SbRun<'_> {
    fn multiplier(&self, f: &Lead, g: &Lead) -> (u64, Mon) {
        let p = self.ring.p;
        let c = ((f.unit as u128 * inv_mod(g.unit, self.q) as u128) % self.q as u128) as u64;
        let s = (f.ghost[0] - g.ghost[0]) as u32;
        let c = ((c as u128 * p.pow(s) as u128) % self.q as u128) as u64;
        let mut gamma = ONE_MON;
        for i in 0..self.ring.r {
            gamma[i] = f.ghost[i + 1] - g.ghost[i + 1];
        }
        (c, gamma)
    }

    fn reduce(&mut self, mut f: Vec<Element>, basis: &[(Lead, Vec<Element>)]) -> Result<Vec<Element>, SbasisError> {
        loop {
            let Some(lf) = leading(&f, self.ring.p, self.ring.r) else { return Ok(f) };
            let Some((lg, g)) = basis.iter().find(|(lg, _)| ghost_divides(lg, &lf)) else { return Ok(f) };
            self.steps += 1;
            if self.steps > SB_BUDGET {
                return Err(SbasisError::StepBudget);
            }
            let (c, gamma) = self.multiplier(&lf, lg);
            let t = mul_monomial(self.ring, self.prec, c, &gamma, g)?;
            f = vec_sub(&f, &t)?;
        }
    }
}

/// Truncated standard basis of the row span of `rows` (each of length n).
pub fn standard_basis(
    ring: &Arc<RingContext>,
    n: usize,
    rows: &[Vec<Element>],
    prec: Precision,
) -> Result<StandardBasis, SbasisError> {
    ring.check_precision(prec)?;
    let p = ring.p;
    let r = ring.r;
    let mut run = SbRun { ring, prec, q: ring.modulus(prec), steps: 0 };
    let mut basis: Vec<(Lead, Vec<Element>)> = Vec::new();
    let mut queue: Vec<Vec<Element>> = rows.iter().map(|r| r.iter().map(|e| e.truncate(prec)).collect()).collect();
    let mut pairs: Vec<(u32, usize, usize)> = Vec::new();
    let mut extra: Vec<(u32, Vec<Element>)> = Vec::new();

    loop {
        let next = if let Some(f) = queue.pop() {
            Some(f)
        } else if let Some(k) = (0..extra.len()).min_by_key(|&k| extra[k].0) {
            Some(extra.swap_remove(k).1)
        } else if let Some(k) = (0..pairs.len()).min_by_key(|&k| (pairs[k].0, pairs[k].2, pairs[k].1)) {
            let (_, i, j) = pairs.swap_remove(k);
            let (li, gi) = &basis[i];
            let (lj, gj) = &basis[j];
            let mut lcm = mon_lcm(&li.ghost, &lj.ghost);
            lcm[0] = li.ghost[0].max(lj.ghost[0]);
            let top = Lead { deg: mdeg(&lcm), comp: li.comp, ghost: lcm, unit: 1 };
            let (ci, gam_i) = run.multiplier(&top, li);
            let (cj, gam_j) = run.multiplier(&top, lj);
            let a = mul_monomial(ring, prec, ci, &gam_i, gi)?;
            let b = mul_monomial(ring, prec, cj, &gam_j, gj)?;
            Some(vec_sub(&a, &b)?)
        } else {
            None
        };
        let Some(f) = next else { break };
        let h = run.reduce(f, &basis)?;
        let Some(lh) = leading(&h, p, r) else { continue };
        let idx = basis.len();
        for (k, (lk, _)) in basis.iter().enumerate() {
            if lk.comp == lh.comp {
                let deg = mdeg(&mon_lcm(&lk.ghost, &lh.ghost));
                pairs.push((deg, k, idx));
            }
        }
        // annihilator pair
        let s = lh.ghost[0] as u32;
        if s > 0 {
            let t = mul_monomial(ring, prec, p.pow(prec.a - s), &ONE_MON, &h)?;
            extra.push((lh.deg + prec.a - s, t));
        }
        // truncation pairs
        let alpha: u32 = lh.deg - s;
        if alpha > 0 && alpha < prec.n {
            for gamma in monomials_of_degree(r, prec.n - alpha) {
                let t = mul_monomial(ring, prec, 1, &gamma, &h)?;
                extra.push((prec.n + s, t));
            }
        }
        basis.push((lh, h));
    }

    let bound = prec.exact_below();
    let mut lts: Vec<Lead> = basis.iter().map(|(l, _)| *l).filter(|l| l.deg < bound).collect();
    lts.sort_by(|a, b| a.deg.cmp(&b.deg).then(a.comp.cmp(&b.comp)).then(degrevlex(&b.ghost, &a.ghost)));
    let mut minimal: Vec<Lead> = Vec::new();
    for l in lts {
        if !minimal.iter().any(|m| ghost_divides(m, &l)) {
            minimal.push(l);
        }
    }
    let leading_set: Vec<(u32, Mon)> = minimal.iter().map(|l| (l.comp, l.ghost)).collect();
    let mut forms = Vec::new();
    for (l, v) in &basis {
        if l.deg < bound {
            forms.push(leading_form(v, l.deg, p, r));
        }
    }
    Ok(StandardBasis {
        rank: n,
        precision: prec,
        basis: basis.into_iter().map(|(_, v)| v).collect(),
        leading: leading_set,
        leading_forms: forms,
        certification: Certification::Heuristic,
    })
}

fn leading_form(v: &[Element], deg: u32, p: u64, r: usize) -> Vec<GradedPoly> {
    v.iter()
        .map(|e| {
            let mut g = GradedPoly::zero(p, r + 1);
            for (m, c) in e.terms() {
                let s = crate::ring::vp_u64(*c, p);
                if mdeg(m) + s == deg {
                    let mut x = ONE_MON;
                    x[0] = s as u16;
                    x[1..=r].copy_from_slice(&m[..r]);
                    g.terms.insert(x, (c / p.pow(s)) % p);
                }
            }
            g
        })
        .collect()
}

pub fn monomials_of_degree(r: usize, deg: u32) -> Vec<Mon> {
    let mut out = Vec::new();
    fn rec(i: usize, r: usize, left: u32, m: &mut Mon, out: &mut Vec<Mon>) {
        if i + 1 == r {
            m[i] = left as u16;
            out.push(*m);
            m[i] = 0;
            return;
        }
        for e in 0..=left {
            m[i] = e as u16;
            rec(i + 1, r, left - e, m, out);
        }
        m[i] = 0;
    }
    let mut m = ONE_MON;
    rec(0, r, deg, &mut m, &mut out);
    out
}

/// gr(M) = gr(F) / LF(U) at a given precision.
#[derive(Clone, Debug)]
pub struct GradedModule {
    pub rank: usize,
    pub nvars: usize,
    pub leading: Vec<(u32, Mon)>,
    pub forms: GradedSubmodule,
    pub precision: Precision,
}

impl GradedModule {
    pub fn dim(&self) -> Option<usize> {
        graded::monomial_quotient_dim(self.nvars, self.rank, &self.leading)
    }

    /// dim_{F_p} gr(M) when finite.
    pub fn length(&self) -> Option<u64> {
        if self.dim() != Some(0) && self.dim().is_some() {
            return None;
        }
        graded::staircase_count(self.nvars, self.rank, &self.leading)
    }
}

pub fn gr_module(ring: &Arc<RingContext>, m: &Presentation<Zp>, prec: Precision) -> Result<GradedModule, SbasisError> {
    let rows = to_elements(m, ring, prec);
    let sb = standard_basis(ring, m.ngens, &rows, prec)?;
    let forms = graded::groebner(
        &GradedSubmodule::new(ring.p, ring.r + 1, m.ngens, sb.leading_forms.clone()),
        MonomialOrder,
    );
    Ok(GradedModule { rank: m.ngens, nvars: ring.r + 1, leading: sb.leading, forms, precision: prec })
}

/// A value obtained by comparing successive precision levels.
#[derive(Clone, Debug, Serialize)]
pub struct Certified<T> {
    pub value: T,
    pub certification: Certification,
    pub escalations: u32,
    /// Values at each level tried, lowest precision first.
    pub history: Vec<T>,
    pub precision: Precision,
}

/// Run `f` at `start` and at escalated precisions until two consecutive
/// levels agree, or the escalation limit is hit.
pub fn certify<T: PartialEq + Clone, E>(
    start: Precision,
    max_escalations: u32,
    f: impl Fn(Precision) -> Result<T, E>,
) -> Result<Certified<T>, E> {
    certify_with(start, max_escalations, 1, |_| false, f)
}

/// Like [`certify`], but stabilization needs `window` consecutive agreements,
/// and a value for which `proven` holds is accepted at once.
pub fn certify_with<T: PartialEq + Clone, E>(
    start: Precision,
    max_escalations: u32,
    window: u32,
    proven: impl Fn(&T) -> bool,
    f: impl Fn(Precision) -> Result<T, E>,
) -> Result<Certified<T>, E> {
    let mut prec = start;
    let mut prev = f(prec)?;
    let mut history = vec![prev.clone()];
    if proven(&prev) {
        return Ok(Certified { value: prev, certification: Certification::Certified, escalations: 0, history, precision: prec });
    }
    let mut agreed = 0;
    for k in 0..=max_escalations {
        let next_prec = prec.escalate();
        let next = f(next_prec)?;
        history.push(next.clone());
        agreed = if next == prev { agreed + 1 } else { 0 };
        if agreed >= window || proven(&next) {
            return Ok(Certified { value: next, certification: Certification::Certified, escalations: k, history, precision: next_prec });
        }
        prev = next;
        prec = next_prec;
    }
    Ok(Certified { value: prev, certification: Certification::Heuristic, escalations: max_escalations, history, precision: prec })
}

/// Lower bound on δ(M) from Eagon–Northcott: Supp M = V(Fitt_0 M), and the
/// maximal minors of an n × m matrix generate an ideal of height ≤ m − n + 1.
pub fn fitting_dim_lower_bound(d: usize, m: &Presentation<Zp>) -> usize {
    let s = m.simplify().pres;
    let (n, k) = (s.ngens, s.rels.len());
    if k < n {
        return d;
    }
    d.saturating_sub(k - n + 1)
}

/// Escalate `start` until the exact range covers the M-valuation of every
/// (simplified) relation; below that, truncation can hide a whole relation
/// and two consecutive levels agree on the wrong answer.
pub fn covering_precision(ring: &RingContext, m: &Presentation<Zp>, start: Precision) -> Precision {
    let rels = match ring.mode {
        crate::ring::Mode::Abelian => m.simplify().pres.rels,
        crate::ring::Mode::Rules => m.rels.clone(),
    };
    let v = rels
        .iter()
        .filter_map(|r| r.iter().map(|t| crate::ring::vp_big(&t.c, ring.p) + mdeg(&t.mon)).min())
        .max();
    let mut prec = start;
    if let Some(v) = v {
        while prec.exact_below() <= v {
            let next = prec.escalate();
            if ring.check_precision(next).is_err() {
                break;
            }
            prec = next;
        }
    }
    prec
}

/// Module-level helper: standard basis with certification of its leading module dimension.
pub fn certified_dim(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    start: Precision,
    max_escalations: u32,
) -> Result<Certified<Option<usize>>, SbasisError> {
    if m.is_zero() {
        return Ok(Certified {
            value: None,
            certification: Certification::Certified,
            escalations: 0,
            history: vec![None],
            precision: start,
        });
    }
    // gr computed below the exact bound only misses leading terms, so its
    // dimension is an upper bound; meeting the Fitting bound proves it
    let lower = match ring.mode {
        crate::ring::Mode::Abelian => Some(fitting_dim_lower_bound(ring.d, m)),
        crate::ring::Mode::Rules => None,
    };
    certify_with(covering_precision(ring, m, start), max_escalations, 2, |v: &Option<usize>| v.is_some() && *v == lower, |pr| {
        gr_module(ring, m, pr).map(|g| g.dim())
    })
}

pub fn certified_length(
    ring: &Arc<RingContext>,
    m: &Presentation<Zp>,
    start: Precision,
    max_escalations: u32,
) -> Result<Certified<Option<u64>>, SbasisError> {
    if m.is_zero() {
        return Ok(Certified { value: Some(0), certification: Certification::Certified, escalations: 0, history: vec![Some(0)], precision: start });
    }
    certify_with(covering_precision(ring, m, start), max_escalations, 2, |_| false, |pr| {
        gr_module(ring, m, pr).map(|g| g.length())
    })
}

/// Matrix of relations reduced mod p, as rows over F_p[b].
pub fn mod_p(m: &Presentation<Zp>) -> Presentation<Fp> {
    let fp = Fp::new(m.dom.p);
    let rels = m.rels.iter().map(|r| convert(&m.dom, &fp, r)).collect();
    Presentation::new(fp, m.nvars, m.ngens, rels)
}

/// Lift a Λ/p-module to Λ by adding p·e_c for each generator.
pub fn lift_from_fp(m: &Presentation<Fp>) -> Presentation<Zp> {
    let zp = Zp::new(m.dom.p);
    let mut rels: Vec<Vector<num_bigint::BigInt>> = m.rels.iter().map(|r| convert(&m.dom, &zp, r)).collect();
    for c in 0..m.ngens as u32 {
        rels.push(constant(&zp, zp.from_i64(m.dom.p as i64), c));
    }
    Presentation::new(zp, m.nvars, m.ngens, rels).with_label(m.label.clone())
}

/// Sorted map from generator count to relations; handy for debugging output.
pub fn describe<D: Domain>(m: &Presentation<D>) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    out.insert("generators".into(), m.ngens.to_string());
    out.insert("relations".into(), m.rels.len().to_string());
    out
}
