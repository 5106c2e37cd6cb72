//! Submodules of free modules over gr(Λ) = F_p[X_0, …, X_r]: Gröbner bases,
//! normal forms, Krull dimension and generic rank.

use crate::gb;
use crate::poly::{mon_divides, Fp, Mon, Term, Vector, MAXV, ONE_MON};
use crate::ring::GradedPoly;
use std::collections::BTreeMap;

/// The only order used: degrevlex on X_0..X_r, position over term with
/// component 0 ranked highest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MonomialOrder;

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSubmodule {
    pub p: u64,
    pub nvars: usize,
    pub rank: usize,
    pub gens: Vec<Vec<GradedPoly>>,
    pub basis: Option<Vec<Vec<GradedPoly>>>,
}

pub fn to_vector(v: &[GradedPoly]) -> Vector<u64> {
    let d = Fp::new(v.first().map_or(3, |g| g.p));
    let mut terms = Vec::new();
    for (j, g) in v.iter().enumerate() {
        for (m, c) in &g.terms {
            terms.push(Term { comp: j as u32, mon: *m, c: *c });
        }
    }
    crate::poly::from_terms(&d, terms)
}

pub fn from_vector(v: &Vector<u64>, p: u64, nvars: usize, rank: usize) -> Vec<GradedPoly> {
    let mut out = vec![GradedPoly::zero(p, nvars); rank];
    for t in v {
        out[t.comp as usize].terms.insert(t.mon, t.c);
    }
    out
}

impl GradedSubmodule {
    pub fn new(p: u64, nvars: usize, rank: usize, gens: Vec<Vec<GradedPoly>>) -> Self {
        GradedSubmodule { p, nvars, rank, gens, basis: None }
    }

    fn vectors(&self, rows: &[Vec<GradedPoly>]) -> Vec<Vector<u64>> {
        rows.iter().map(|r| to_vector(r)).filter(|v| !v.is_empty()).collect()
    }

    pub fn basis_vectors(&self) -> Vec<Vector<u64>> {
        self.vectors(self.basis.as_ref().expect("groebner basis not computed"))
    }

    /// Leading monomials of the basis, as (component, monomial).
    pub fn leading_terms(&self) -> Vec<(u32, Mon)> {
        self.basis_vectors().iter().map(|v| (v[0].comp, v[0].mon)).collect()
    }

    pub fn krull_dim(&self) -> Option<usize> {
        monomial_quotient_dim(self.nvars, self.rank, &self.leading_terms())
    }
}

/// Reduced Gröbner basis.
pub fn groebner(s: &GradedSubmodule, _ord: MonomialOrder) -> GradedSubmodule {
    let d = Fp::new(s.p);
    let gb = gb::groebner(&d, &s.vectors(&s.gens));
    let basis = gb.iter().map(|v| from_vector(v, s.p, s.nvars, s.rank)).collect();
    GradedSubmodule { basis: Some(basis), ..s.clone() }
}

pub fn normal_form(v: &[GradedPoly], g: &GradedSubmodule) -> Vec<GradedPoly> {
    let d = Fp::new(g.p);
    let r = gb::reduce_full_linear(&d, to_vector(v), &g.basis_vectors());
    from_vector(&r, g.p, g.nvars, g.rank)
}

/// Krull dimension of ⊕_c F[X]/I_c for monomial ideals I_c given by generators.
/// None encodes the zero module.
pub fn monomial_quotient_dim(nvars: usize, rank: usize, lts: &[(u32, Mon)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for c in 0..rank as u32 {
        let gens: Vec<Mon> = lts.iter().filter(|(k, _)| *k == c).map(|(_, m)| *m).collect();
        if gens.iter().any(|m| *m == ONE_MON) {
            continue;
        }
        let dim = max_independent_set(nvars, &gens);
        best = Some(best.map_or(dim, |b: usize| b.max(dim)));
    }
    best
}

/// Largest set S of variables such that no generator is supported inside S.
fn max_independent_set(nvars: usize, gens: &[Mon]) -> usize {
    let supports: Vec<u32> = gens
        .iter()
        .map(|m| (0..nvars).filter(|&i| m[i] > 0).fold(0u32, |s, i| s | (1 << i)))
        .collect();
    let mut best = 0;
    for s in 0u32..(1 << nvars) {
        let size = s.count_ones() as usize;
        if size > best && supports.iter().all(|&g| g & !s != 0) {
            best = size;
        }
    }
    best
}

/// Number of standard monomials of ⊕_c F[X]/I_c, or None if infinite.
pub fn staircase_count(nvars: usize, rank: usize, lts: &[(u32, Mon)]) -> Option<u64> {
    let mut total = 0u64;
    for c in 0..rank as u32 {
        let gens: Vec<Mon> = lts.iter().filter(|(k, _)| *k == c).map(|(_, m)| *m).collect();
        let mut bound = [0u16; MAXV];
        for (i, b) in bound.iter_mut().enumerate().take(nvars) {
            // a pure power of X_i bounds the staircase in that direction
            let pure = gens
                .iter()
                .filter(|m| (0..nvars).all(|k| k == i || m[k] == 0))
                .map(|m| m[i])
                .min()?;
            *b = pure;
        }
        total += count_below(nvars, &bound, &gens);
    }
    Some(total)
}

fn count_below(nvars: usize, bound: &[u16; MAXV], gens: &[Mon]) -> u64 {
    let mut count = 0;
    let mut m = ONE_MON;
    loop {
        if !gens.iter().any(|g| mon_divides(g, &m)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return count;
            }
            m[i] += 1;
            if m[i] < bound[i] {
                break;
            }
            m[i] = 0;
            i += 1;
        }
    }
}

/// Rank over the fraction field of a matrix with rows in F_p[X]^n.
pub fn graded_rank(rows: &[Vec<GradedPoly>]) -> usize {
    let Some(p) = rows.iter().flatten().map(|g| g.p).next() else { return 0 };
    let d = Fp::new(p);
    let vs: Vec<Vector<u64>> = rows.iter().map(|r| to_vector(r)).filter(|v| !v.is_empty()).collect();
    gb::rank(&d, &vs)
}

/// Hilbert function of F[X]^rank / (monomial module) in each degree up to `top`.
pub fn hilbert_function(nvars: usize, rank: usize, lts: &[(u32, Mon)], top: u32) -> BTreeMap<u32, u64> {
    let mut out = BTreeMap::new();
    for deg in 0..=top {
        let mut n = 0u64;
        for_each_monomial(nvars, deg, &mut |m| {
            for c in 0..rank as u32 {
                if !lts.iter().any(|(k, g)| *k == c && mon_divides(g, m)) {
                    n += 1;
                }
            }
        });
        out.insert(deg, n);
    }
    out
}

fn for_each_monomial(nvars: usize, deg: u32, f: &mut dyn FnMut(&Mon)) {
    fn rec(i: usize, nvars: usize, left: u32, m: &mut Mon, f: &mut dyn FnMut(&Mon)) {
        if i + 1 == nvars {
            m[i] = left as u16;
            f(m);
            m[i] = 0;
            return;
        }
        for e in 0..=left {
            m[i] = e as u16;
            rec(i + 1, nvars, left - e, m, f);
        }
        m[i] = 0;
    }
    let mut m = ONE_MON;
    rec(0, nvars, deg, &mut m, f);
}
