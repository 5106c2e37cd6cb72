//! Buchberger's algorithm for submodules of free modules over D[x_1..x_n],
//! D a field or a discrete valuation ring, with the position-over-term
//! degrevlex order.
//!
//! Over a valuation ring a leading term c*x^a divides d*x^b when x^a | x^b
//! and v(c) <= v(d); with that divisibility, S-polynomials alone suffice.

use crate::budget;
use crate::poly::*;
use std::any::{Any, TypeId};
use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

fn lt_divides<D: Domain>(d: &D, g: &Term<D::C>, f: &Term<D::C>) -> bool {
    g.comp == f.comp && mon_divides(&g.mon, &f.mon) && d.val(&g.c) <= d.val(&f.c)
}

/// Cancel the common unit of two multipliers; without this every step
/// multiplies in a full leading coefficient.
fn coprime<D: Domain>(d: &D, a: D::C, b: D::C) -> (D::C, D::C) {
    match d.content_unit(&[&a, &b]) {
        Some(u) => (d.div_unit(&a, &u), d.div_unit(&b, &u)),
        None => (a, b),
    }
}

/// One reduction step of the term `t` of `f` by the leading term of `g`.
fn reduce_step<D: Domain>(d: &D, f: &Vector<D::C>, t: &Term<D::C>, g: &Vector<D::C>) -> Vector<D::C> {
    let lg = &g[0];
    let vf = d.val(&t.c);
    let vg = d.val(&lg.c);
    let (a, b) = coprime(d, d.unit_part(&lg.c), d.mul(&d.unit_part(&t.c), &d.p_pow(vf - vg)));
    let m = mon_div(&t.mon, &lg.mon);
    lin(d, &a, f, &b, &m, g)
}

/// Reduce until the leading term is not divisible by any basis leading term.
pub fn reduce_top<D: Domain>(d: &D, mut f: Vector<D::C>, basis: &[Vector<D::C>]) -> Vector<D::C> {
    loop {
        let Some(lt) = f.first().cloned() else { return f };
        match basis.iter().find(|g| !g.is_empty() && lt_divides(d, &g[0], &lt)) {
            Some(g) => {
                f = reduce_step(d, &f, &lt, g);
                normalize(d, &mut f);
            }
            None => return f,
        }
    }
}

/// Full normal form: no term is divisible by a basis leading term.
/// The result is defined up to a unit factor.
pub fn reduce_full<D: Domain>(d: &D, f: Vector<D::C>, basis: &[Vector<D::C>]) -> Vector<D::C> {
    reduce_full_opts(d, f, basis, true)
}

/// Full reduction without rescaling. With a monic basis over a field this is
/// the linear normal form.
pub fn reduce_full_linear<D: Domain>(d: &D, f: Vector<D::C>, basis: &[Vector<D::C>]) -> Vector<D::C> {
    reduce_full_opts(d, f, basis, false)
}

/// Among the basis elements whose leading term divides `t`, the one with the
/// smallest lead unit and then the fewest terms; this keeps the fraction-free
/// multipliers small.
fn reducer<'a, D: Domain>(d: &D, t: &Term<D::C>, basis: &'a [Vector<D::C>]) -> Option<&'a Vector<D::C>> {
    basis
        .iter()
        .filter(|g| !g.is_empty() && lt_divides(d, &g[0], t))
        .min_by_key(|g| (d.to_bigint(&d.unit_part(&g[0].c)).bits(), g.len()))
}

fn reduce_full_opts<D: Domain>(d: &D, mut f: Vector<D::C>, basis: &[Vector<D::C>], norm: bool) -> Vector<D::C> {
    let mut pos = 0;
    while pos < f.len() {
        let t = f[pos].clone();
        match reducer(d, &t, basis) {
            Some(g) => {
                f = reduce_step(d, &f, &t, g);
                if norm {
                    normalize(d, &mut f);
                }
                if let Some(t) = f.get(pos) {
                    budget::check(d.bits(&t.c));
                }
            }
            None => pos += 1,
        }
    }
    f
}

struct Pair {
    i: usize,
    j: usize,
    comp: u32,
    lcm: Mon,
    sugar: u32,
}

fn pair_cmp(a: &Pair, b: &Pair) -> Ordering {
    // Lowest sugar first, then smallest lcm, then older pairs.
    a.sugar
        .cmp(&b.sugar)
        .then_with(|| term_cmp(a.comp, &a.lcm, b.comp, &b.lcm))
        .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
}

fn mdeg(m: &Mon) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

fn sugar_of<C>(f: &Vector<C>) -> u32 {
    f.iter().map(|t| mdeg(&t.mon)).max().unwrap_or(0)
}

fn spoly<D: Domain>(d: &D, f: &Vector<D::C>, g: &Vector<D::C>) -> Vector<D::C> {
    let (lf, lg) = (&f[0], &g[0]);
    let lcm = mon_lcm(&lf.mon, &lg.mon);
    let (vf, vg) = (d.val(&lf.c), d.val(&lg.c));
    let v = vf.max(vg);
    let (a, b) = coprime(
        d,
        d.mul(&d.unit_part(&lg.c), &d.p_pow(v - vf)),
        d.mul(&d.unit_part(&lf.c), &d.p_pow(v - vg)),
    );
    let fa = shift(d, &d.one(), &mon_div(&lcm, &lf.mon), f);
    lin(d, &a, &fa, &b, &mon_div(&lcm, &lg.mon), g)
}

/// Gröbner basis of the submodule generated by `gens`.
///
/// The result is minimal and tail-reduced. Selection is deterministic.
/// Results are memoized: the invariants ask for the same bases repeatedly.
pub fn groebner<D: Domain>(d: &D, gens: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let key = (TypeId::of::<D>(), d.p(), gens.to_vec());
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    let slot = h.finish();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&slot).and_then(|e| e.downcast_ref::<Entry<D::C>>()) {
        if hit.0 == key {
            return hit.1.clone();
        }
    }
    let out = groebner_opts(d, gens, true);
    let mut c = cache.lock().unwrap();
    if c.len() >= CACHE_SIZE {
        c.clear();
    }
    c.insert(slot, Box::new((key, out.clone())));
    out
}

type Entry<C> = ((TypeId, u64, Vec<Vector<C>>), Vec<Vector<C>>);

const CACHE_SIZE: usize = 1024;

static CACHE: OnceLock<Mutex<HashMap<u64, Box<dyn Any + Send + Sync>>>> = OnceLock::new();

pub fn groebner_opts<D: Domain>(d: &D, gens: &[Vector<D::C>], chain: bool) -> Vec<Vector<D::C>> {
    let mut st = Buchberger { g: Vec::new(), sugar: Vec::new(), dead: Vec::new(), pairs: Vec::new(), pending: HashSet::new(), created: HashSet::new() };

    for f in gens {
        let mut f = reduce_top(d, f.clone(), &st.g);
        if f.is_empty() {
            continue;
        }
        normalize(d, &mut f);
        let sugar = sugar_of(&f);
        st.add(d, f, sugar);
    }

    while !st.pairs.is_empty() {
        let k = (0..st.pairs.len())
            .min_by(|&x, &y| pair_cmp(&st.pairs[x], &st.pairs[y]))
            .unwrap();
        let pr = st.pairs.swap_remove(k);
        st.pending.remove(&(pr.i, pr.j));
        if chain && st.chain_skip(d, &pr) {
            continue;
        }
        let s = spoly(d, &st.g[pr.i], &st.g[pr.j]);
        let mut h = reduce_full(d, s, &st.g);
        if h.is_empty() {
            continue;
        }
        normalize(d, &mut h);
        budget::check(max_bits(d, &h));
        st.add(d, h, pr.sugar);
    }
    minimize(d, st.g)
}

struct Buchberger<C> {
    g: Vec<Vector<C>>,
    sugar: Vec<u32>,
    /// Leading term divisible by a later element's: no new pairs. Pairs
    /// already queued stay, together with the pair against the newcomer.
    dead: Vec<bool>,
    pairs: Vec<Pair>,
    pending: HashSet<(usize, usize)>,
    created: HashSet<(usize, usize)>,
}

impl<C: Clone> Buchberger<C> {
    fn add<D: Domain<C = C>>(&mut self, d: &D, h: Vector<C>, sugar: u32) {
        let j = self.g.len();
        for (i, gi) in self.g.iter().enumerate() {
            if self.dead[i] || gi[0].comp != h[0].comp {
                continue;
            }
            let lcm = mon_lcm(&gi[0].mon, &h[0].mon);
            let s = (self.sugar[i] + mdeg(&lcm) - mdeg(&gi[0].mon)).max(sugar + mdeg(&lcm) - mdeg(&h[0].mon));
            self.pairs.push(Pair { i, j, comp: h[0].comp, lcm, sugar: s });
            self.pending.insert((i, j));
            self.created.insert((i, j));
        }
        for (i, gi) in self.g.iter().enumerate() {
            if !self.dead[i] && lt_divides(d, &h[0], &gi[0]) {
                self.dead[i] = true;
            }
        }
        self.g.push(h);
        self.sugar.push(sugar);
        self.dead.push(false);
    }

    /// Buchberger's chain criterion, with the strong lcm over a valuation
    /// ring: (i, j) is redundant given g_k once (i, k) and (j, k) are done.
    fn chain_skip<D: Domain<C = C>>(&self, d: &D, pr: &Pair) -> bool {
        let g = &self.g;
        let v = d.val(&g[pr.i][0].c).max(d.val(&g[pr.j][0].c));
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let done = |a: usize, b: usize| self.created.contains(&key(a, b)) && !self.pending.contains(&key(a, b));
        g.iter().enumerate().any(|(k, gk)| {
            k != pr.i
                && k != pr.j
                && gk[0].comp == pr.comp
                && mon_divides(&gk[0].mon, &pr.lcm)
                && d.val(&gk[0].c) <= v
                && done(pr.i, k)
                && done(pr.j, k)
        })
    }
}

fn minimize<D: Domain>(d: &D, g: Vec<Vector<D::C>>) -> Vec<Vector<D::C>> {
    let mut keep: Vec<Vector<D::C>> = Vec::new();
    for (i, f) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(j, h)| {
            j != i
                && lt_divides(d, &h[0], &f[0])
                && (!lt_divides(d, &f[0], &h[0]) || j < i)
        });
        if !redundant {
            keep.push(f.clone());
        }
    }
    for i in 0..keep.len() {
        let others: Vec<Vector<D::C>> =
            keep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, h)| h.clone()).collect();
        keep[i] = reduce_tail(d, keep[i].clone(), &others);
    }
    keep.sort_by(|a, b| term_cmp(b[0].comp, &b[0].mon, a[0].comp, &a[0].mon));
    keep
}

fn reduce_tail<D: Domain>(d: &D, mut f: Vector<D::C>, basis: &[Vector<D::C>]) -> Vector<D::C> {
    let mut pos = 1;
    while pos < f.len() {
        let t = f[pos].clone();
        match basis.iter().find(|g| lt_divides(d, &g[0], &t)) {
            Some(g) => {
                f = reduce_step(d, &f, &t, g);
                normalize(d, &mut f);
            }
            None => pos += 1,
        }
    }
    f
}

/// Membership in the submodule whose Gröbner basis is `gb`.
pub fn member<D: Domain>(d: &D, f: &Vector<D::C>, gb: &[Vector<D::C>]) -> bool {
    reduce_top(d, f.clone(), gb).is_empty()
}

/// Kernel of R^m -> R^n / U, e_l |-> f[l]. Returns generators in R^m.
pub fn kernel<D: Domain>(d: &D, f: &[Vector<D::C>], n: usize, u: &[Vector<D::C>]) -> Vec<Vector<D::C>> {
    let n32 = n as u32;
    let mut rows: Vec<Vector<D::C>> = Vec::with_capacity(f.len() + u.len());
    for (l, fl) in f.iter().enumerate() {
        let mut r = fl.clone();
        r.push(Term { comp: n32 + l as u32, mon: ONE_MON, c: d.one() });
        rows.push(r);
    }
    rows.extend(u.iter().filter(|v| !v.is_empty()).cloned());
    let gb = groebner(d, &rows);
    let mut out: Vec<Vector<D::C>> = gb
        .into_iter()
        .filter(|v| v[0].comp >= n32)
        .map(|v| offset_down(&v, n32))
        .collect();
    out.sort_by(|a, b| term_cmp(b[0].comp, &b[0].mon, a[0].comp, &a[0].mon));
    out
}

fn offset_down<C: Clone>(f: &Vector<C>, off: u32) -> Vector<C> {
    f.iter().map(|t| Term { comp: t.comp - off, mon: t.mon, c: t.c.clone() }).collect()
}

/// Syzygies of the rows.
pub fn syzygies<D: Domain>(d: &D, rows: &[Vector<D::C>], n: usize) -> Vec<Vector<D::C>> {
    kernel(d, rows, n, &[])
}

/// Rank over the fraction field of the row span.
pub fn rank<D: Domain>(d: &D, rows: &[Vector<D::C>]) -> usize {
    let gb = groebner(d, rows);
    let comps: HashSet<u32> = gb.iter().map(|v| v[0].comp).collect();
    comps.len()
}

/// Whether two generating sets span the same submodule.
pub fn same_span<D: Domain>(d: &D, a: &[Vector<D::C>], b: &[Vector<D::C>]) -> bool {
    let ga = groebner(d, a);
    let gb_ = groebner(d, b);
    b.iter().all(|v| member(d, v, &ga)) && a.iter().all(|v| member(d, v, &gb_))
}
