//! Exact sparse polynomials and free-module vectors over a coefficient domain.
//!
//! Two domains are provided: `Zp`, the integers localized at p (stored as
//! integers, with units prime to p allowed as scaling factors), and `Fp`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt::Debug;
use std::hash::Hash;

pub const MAXV: usize = 8;

/// Exponent vector. Unused trailing slots stay zero.
pub type Mon = [u16; MAXV];

pub const ONE_MON: Mon = [0; MAXV];

pub fn mdeg(m: &Mon) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Degree reverse lexicographic order, variable 0 largest.
pub fn degrevlex(a: &Mon, b: &Mon) -> Ordering {
    match mdeg(a).cmp(&mdeg(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..MAXV).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    Ordering::Equal
}

pub fn mon_mul(a: &Mon, b: &Mon) -> Mon {
    let mut m = *a;
    for i in 0..MAXV {
        m[i] += b[i];
    }
    m
}

pub fn mon_divides(a: &Mon, b: &Mon) -> bool {
    (0..MAXV).all(|i| a[i] <= b[i])
}

pub fn mon_div(a: &Mon, b: &Mon) -> Mon {
    let mut m = *a;
    for i in 0..MAXV {
        m[i] -= b[i];
    }
    m
}

pub fn mon_lcm(a: &Mon, b: &Mon) -> Mon {
    let mut m = *a;
    for i in 0..MAXV {
        m[i] = m[i].max(b[i]);
    }
    m
}

pub fn var_mon(i: usize) -> Mon {
    let mut m = ONE_MON;
    m[i] = 1;
    m
}

/// Coefficient domain: a discrete valuation ring with uniformizer p, or F_p.
pub trait Domain: Clone + Debug + Send + Sync + 'static {
    type C: Clone + Eq + Hash + Debug + Send + Sync + 'static;

    fn p(&self) -> u64;
    fn zero(&self) -> Self::C;
    fn from_i64(&self, v: i64) -> Self::C;
    fn from_bigint(&self, v: &BigInt) -> Self::C;
    fn to_bigint(&self, c: &Self::C) -> BigInt;
    /// Bit length of the integer representative.
    fn bits(&self, c: &Self::C) -> u64 {
        self.to_bigint(c).bits()
    }
    fn is_zero(&self, c: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn sub(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    /// p-adic valuation of a nonzero coefficient (always 0 over a field).
    fn val(&self, c: &Self::C) -> u32;
    /// c / p^val(c).
    fn unit_part(&self, c: &Self::C) -> Self::C;
    fn p_pow(&self, k: u32) -> Self::C;
    fn residue(&self, c: &Self::C) -> u64;
    /// A unit dividing every coefficient, chosen so the first becomes "positive"/monic.
    fn content_unit(&self, cs: &[&Self::C]) -> Option<Self::C>;
    fn div_unit(&self, a: &Self::C, u: &Self::C) -> Self::C;
    fn is_unit(&self, c: &Self::C) -> bool {
        !self.is_zero(c) && self.val(c) == 0
    }
    fn one(&self) -> Self::C {
        self.from_i64(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zp {
    pub p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        Zp { p }
    }
}

impl Domain for Zp {
    type C = BigInt;

    fn p(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn to_bigint(&self, c: &BigInt) -> BigInt {
        c.clone()
    }
    fn bits(&self, c: &BigInt) -> u64 {
        c.bits()
    }
    fn is_zero(&self, c: &BigInt) -> bool {
        c.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn val(&self, c: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let mut v = 0;
        let mut x = c.clone();
        loop {
            let (q, r) = x.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            x = q;
            v += 1;
        }
    }
    fn unit_part(&self, c: &BigInt) -> BigInt {
        let p = BigInt::from(self.p);
        let mut x = c.clone();
        loop {
            let (q, r) = x.div_rem(&p);
            if !r.is_zero() {
                return x;
            }
            x = q;
        }
    }
    fn p_pow(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.p), k as usize)
    }
    fn residue(&self, c: &BigInt) -> u64 {
        c.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn content_unit(&self, cs: &[&BigInt]) -> Option<BigInt> {
        let first = cs.first()?;
        let mut g = BigInt::zero();
        for c in cs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let mut u = self.unit_part(&g);
        if first.is_negative() {
            u = -u;
        }
        if u.is_one() {
            None
        } else {
            Some(u)
        }
    }
    fn div_unit(&self, a: &BigInt, u: &BigInt) -> BigInt {
        a / u
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        Fp { p }
    }
    pub fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

impl Domain for Fp {
    type C = u64;

    fn p(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> u64 {
        0
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn to_bigint(&self, c: &u64) -> BigInt {
        BigInt::from(*c)
    }
    fn is_zero(&self, c: &u64) -> bool {
        *c == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn val(&self, _c: &u64) -> u32 {
        0
    }
    fn unit_part(&self, c: &u64) -> u64 {
        *c
    }
    fn p_pow(&self, k: u32) -> u64 {
        if k == 0 {
            1
        } else {
            0
        }
    }
    fn residue(&self, c: &u64) -> u64 {
        *c
    }
    fn content_unit(&self, cs: &[&u64]) -> Option<u64> {
        let first = **cs.first()?;
        if first == 1 {
            None
        } else {
            Some(first)
        }
    }
    fn div_unit(&self, a: &u64, u: &u64) -> u64 {
        self.mul(a, &self.inv(*u))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term<C> {
    pub comp: u32,
    pub mon: Mon,
    pub c: C,
}

/// Sparse vector of a free module, terms sorted with the leading term first.
/// Polynomials are vectors supported in component 0.
pub type Vector<C> = Vec<Term<C>>;

/// Position-over-term: a smaller component index ranks higher.
pub fn term_cmp(ac: u32, am: &Mon, bc: u32, bm: &Mon) -> Ordering {
    match bc.cmp(&ac) {
        Ordering::Equal => degrevlex(am, bm),
        o => o,
    }
}

pub fn constant<D: Domain>(d: &D, c: D::C, comp: u32) -> Vector<D::C> {
    if d.is_zero(&c) {
        vec![]
    } else {
        vec![Term { comp, mon: ONE_MON, c }]
    }
}

pub fn monomial<D: Domain>(d: &D, c: D::C, mon: Mon, comp: u32) -> Vector<D::C> {
    if d.is_zero(&c) {
        vec![]
    } else {
        vec![Term { comp, mon, c }]
    }
}

/// Build a vector from unsorted terms, combining duplicates.
pub fn from_terms<D: Domain>(d: &D, mut terms: Vec<Term<D::C>>) -> Vector<D::C> {
    terms.sort_by(|x, y| term_cmp(y.comp, &y.mon, x.comp, &x.mon));
    let mut out: Vector<D::C> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(last) = out.last_mut() {
            if last.comp == t.comp && last.mon == t.mon {
                last.c = d.add(&last.c, &t.c);
                continue;
            }
        }
        out.push(t);
    }
    out.retain(|t| !d.is_zero(&t.c));
    out
}

/// a*f - b*m*g, where m is a monomial shift.
pub fn lin<D: Domain>(
    d: &D,
    a: &D::C,
    f: &Vector<D::C>,
    b: &D::C,
    m: &Mon,
    g: &Vector<D::C>,
) -> Vector<D::C> {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    let one = d.one();
    let a_one = *a == one;
    while i < f.len() || j < g.len() {
        let ord = if i == f.len() {
            Ordering::Less
        } else if j == g.len() {
            Ordering::Greater
        } else {
            let gm = mon_mul(&g[j].mon, m);
            term_cmp(f[i].comp, &f[i].mon, g[j].comp, &gm)
        };
        match ord {
            Ordering::Greater => {
                let c = if a_one { f[i].c.clone() } else { d.mul(a, &f[i].c) };
                if !d.is_zero(&c) {
                    out.push(Term { comp: f[i].comp, mon: f[i].mon, c });
                }
                i += 1;
            }
            Ordering::Less => {
                let c = d.neg(&d.mul(b, &g[j].c));
                if !d.is_zero(&c) {
                    out.push(Term { comp: g[j].comp, mon: mon_mul(&g[j].mon, m), c });
                }
                j += 1;
            }
            Ordering::Equal => {
                let fc = if a_one { f[i].c.clone() } else { d.mul(a, &f[i].c) };
                let c = d.sub(&fc, &d.mul(b, &g[j].c));
                if !d.is_zero(&c) {
                    out.push(Term { comp: f[i].comp, mon: f[i].mon, c });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn add<D: Domain>(d: &D, f: &Vector<D::C>, g: &Vector<D::C>) -> Vector<D::C> {
    let one = d.one();
    lin(d, &one, f, &d.neg(&one), &ONE_MON, g)
}

pub fn sub<D: Domain>(d: &D, f: &Vector<D::C>, g: &Vector<D::C>) -> Vector<D::C> {
    let one = d.one();
    lin(d, &one, f, &one, &ONE_MON, g)
}

pub fn scale<D: Domain>(d: &D, c: &D::C, f: &Vector<D::C>) -> Vector<D::C> {
    f.iter()
        .filter_map(|t| {
            let c = d.mul(c, &t.c);
            (!d.is_zero(&c)).then(|| Term { comp: t.comp, mon: t.mon, c })
        })
        .collect()
}

pub fn shift<D: Domain>(d: &D, c: &D::C, m: &Mon, f: &Vector<D::C>) -> Vector<D::C> {
    f.iter()
        .filter_map(|t| {
            let c = d.mul(c, &t.c);
            (!d.is_zero(&c)).then(|| Term { comp: t.comp, mon: mon_mul(&t.mon, m), c })
        })
        .collect()
}

/// Polynomial (component 0) times vector.
pub fn poly_mul<D: Domain>(d: &D, p: &Vector<D::C>, f: &Vector<D::C>) -> Vector<D::C> {
    let mut acc: Vector<D::C> = vec![];
    for t in p {
        let s = shift(d, &t.c, &t.mon, f);
        acc = add(d, &acc, &s);
    }
    acc
}

/// Divide out the unit content so coefficients stay small.
/// Widest coefficient of `f`, in bits.
pub fn max_bits<D: Domain>(d: &D, f: &Vector<D::C>) -> u64 {
    f.iter().map(|t| d.bits(&t.c)).max().unwrap_or(0)
}

pub fn normalize<D: Domain>(d: &D, f: &mut Vector<D::C>) {
    let u = {
        let cs: Vec<&D::C> = f.iter().map(|t| &t.c).collect();
        d.content_unit(&cs)
    };
    if let Some(u) = u {
        for t in f.iter_mut() {
            t.c = d.div_unit(&t.c, &u);
        }
    }
}

/// Entry j of a vector, as a polynomial.
pub fn entry<D: Domain>(f: &Vector<D::C>, j: u32) -> Vector<D::C> {
    f.iter()
        .filter(|t| t.comp == j)
        .map(|t| Term { comp: 0, mon: t.mon, c: t.c.clone() })
        .collect()
}

/// Place a polynomial in component j.
pub fn embed<C: Clone>(p: &Vector<C>, j: u32) -> Vector<C> {
    p.iter().map(|t| Term { comp: j, mon: t.mon, c: t.c.clone() }).collect()
}

/// Re-index components; `map[c]` is the new index or None to drop.
pub fn reindex<C: Clone>(f: &Vector<C>, map: &[Option<u32>]) -> Vector<C> {
    f.iter()
        .filter_map(|t| map[t.comp as usize].map(|c| Term { comp: c, mon: t.mon, c: t.c.clone() }))
        .collect()
}

/// Add `off` to every component index (order is preserved).
pub fn offset<C: Clone>(f: &Vector<C>, off: u32) -> Vector<C> {
    f.iter().map(|t| Term { comp: t.comp + off, mon: t.mon, c: t.c.clone() }).collect()
}

pub fn constant_term<D: Domain>(d: &D, p: &Vector<D::C>) -> D::C {
    p.iter()
        .find(|t| t.mon == ONE_MON)
        .map(|t| t.c.clone())
        .unwrap_or_else(|| d.zero())
}

/// Whether a polynomial is a unit of the local ring (constant term is a unit).
pub fn is_local_unit<D: Domain>(d: &D, p: &Vector<D::C>) -> bool {
    d.is_unit(&constant_term(d, p))
}

pub fn max_comp<C>(f: &Vector<C>) -> Option<u32> {
    f.iter().map(|t| t.comp).max()
}

/// Map coefficients into another domain (e.g. reduce mod p).
pub fn convert<D: Domain, E: Domain>(d: &D, e: &E, f: &Vector<D::C>) -> Vector<E::C> {
    let terms = f
        .iter()
        .map(|t| Term { comp: t.comp, mon: t.mon, c: e.from_bigint(&d.to_bigint(&t.c)) })
        .collect();
    from_terms(e, terms)
}

pub fn poly_pow<D: Domain>(d: &D, p: &Vector<D::C>, k: u32) -> Vector<D::C> {
    let mut acc = constant(d, d.one(), 0);
    for _ in 0..k {
        acc = poly_mul(d, p, &acc);
    }
    acc
}

pub fn degree_in<C>(p: &Vector<C>, var: usize) -> u16 {
    p.iter().map(|t| t.mon[var]).max().unwrap_or(0)
}

/// Render a polynomial in variables named by `name(i)`.
pub fn format_poly<D: Domain>(d: &D, p: &Vector<D::C>, name: &dyn Fn(usize) -> String) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, t) in p.iter().enumerate() {
        let c = d.to_bigint(&t.c);
        let neg = c.is_negative();
        if k > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        let a = c.abs();
        let mut factors = vec![];
        if !a.is_one() || t.mon == ONE_MON {
            factors.push(a.to_string());
        }
        for (i, &e) in t.mon.iter().enumerate() {
            if e == 1 {
                factors.push(name(i));
            } else if e > 1 {
                factors.push(format!("{}^{}", name(i), e));
            }
        }
        s.push_str(&factors.join("*"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Mon {
        let mut x = ONE_MON;
        x[..e.len()].copy_from_slice(e);
        x
    }

    #[test]
    fn degrevlex_basics() {
        assert_eq!(degrevlex(&m(&[1, 0]), &m(&[0, 1])), Ordering::Greater);
        assert_eq!(degrevlex(&m(&[2]), &m(&[0, 1])), Ordering::Greater);
        // x0*x2 < x1^2 in degrevlex
        assert_eq!(degrevlex(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn zp_valuation_and_content() {
        let d = Zp::new(3);
        assert_eq!(d.val(&BigInt::from(18)), 2);
        assert_eq!(d.unit_part(&BigInt::from(-18)), BigInt::from(-2));
        let a = BigInt::from(-10);
        let b = BigInt::from(6);
        assert_eq!(d.content_unit(&[&a, &b]), Some(BigInt::from(-2)));
    }

    #[test]
    fn lin_cancels_leading() {
        let d = Zp::new(3);
        let f = from_terms(&d, vec![
            Term { comp: 0, mon: m(&[1]), c: BigInt::from(2) },
            Term { comp: 0, mon: ONE_MON, c: BigInt::from(1) },
        ]);
        let g = from_terms(&d, vec![Term { comp: 0, mon: ONE_MON, c: BigInt::from(1) }]);
        let r = lin(&d, &BigInt::from(1), &f, &BigInt::from(2), &m(&[1]), &g);
        assert_eq!(r, vec![Term { comp: 0, mon: ONE_MON, c: BigInt::from(1) }]);
    }

    #[test]
    fn format_signs() {
        let d = Zp::new(3);
        let f = from_terms(&d, vec![
            Term { comp: 0, mon: m(&[0, 2]), c: BigInt::from(-2) },
            Term { comp: 0, mon: ONE_MON, c: BigInt::from(3) },
        ]);
        let s = format_poly(&d, &f, &|i| format!("b{}", i + 1));
        assert_eq!(s, "-2*b2^2 + 3");
    }
}
