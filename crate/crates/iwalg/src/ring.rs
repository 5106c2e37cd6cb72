//! The Iwasawa algebra at finite precision.
//!
//! An `Element` is known modulo p^a·Λ + I^N with I = (b_1, …, b_r). In rules
//! mode monomials are kept sorted and an out-of-order pair b_j·b_i (j > i) is
//! rewritten as b_i·b_j + h_ij.

use crate::poly::{degrevlex, mdeg, Mon, MAXV, ONE_MON};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RingError {
    #[error("p must be an odd prime")]
    NotOddPrime,
    #[error("variable count must be between 1 and {max}")]
    BadRank { max: usize },
    #[error("precision must satisfy a >= 1 and N >= 1")]
    BadPrecision,
    #[error("p^a does not fit the coefficient width")]
    PrecisionTooLarge,
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("rewriting exceeded its step budget")]
    StepBudget,
    #[error("rule {j} {i} is not allowed (need j > i, both in 1..={r})")]
    BadRule { j: usize, i: usize, r: usize },
    #[error("rules are stored only up to degree {stored}; precision needs {needed}")]
    RulesTooShort { stored: u32, needed: u32 },
    #[error("valuation is only a lower bound at this precision")]
    PrecisionInsufficient,
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut q = 3;
    while q * q <= p {
        if p % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Abelian,
    Rules,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub a: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

impl Precision {
    pub fn new(a: u32, n: u32) -> Result<Self, RingError> {
        if a == 0 || n == 0 {
            return Err(RingError::BadPrecision);
        }
        Ok(Precision { a, n })
    }

    /// Degrees below this bound are unaffected by truncation.
    pub fn exact_below(&self) -> u32 {
        self.a.min(self.n)
    }

    pub fn escalate(&self) -> Precision {
        Precision { a: self.a + 1, n: self.n + 2 }
    }

    pub fn meet(&self, other: &Precision) -> Precision {
        Precision { a: self.a.min(other.a), n: self.n.min(other.n) }
    }
}

/// Integer polynomial in b_1..b_r (coefficients may contain powers of p).
pub type IntPoly = Vec<(Mon, BigInt)>;

#[derive(Clone, Debug, PartialEq)]
pub struct RingContext {
    pub p: u64,
    pub r: usize,
    pub d: usize,
    pub mode: Mode,
    /// h_ij for j > i (0-based), keyed by (j, i).
    pub rules: BTreeMap<(usize, usize), IntPoly>,
    /// Rules are exact up to this b-degree.
    pub rule_degree: u32,
    pub default_prec: Precision,
    pub max_escalations: u32,
}

pub const MAX_VARS: usize = MAXV - 1;

impl RingContext {
    pub fn abelian(p: u64, r: usize) -> Result<Self, RingError> {
        if !is_odd_prime(p) {
            return Err(RingError::NotOddPrime);
        }
        if r == 0 || r > MAX_VARS {
            return Err(RingError::BadRank { max: MAX_VARS });
        }
        Ok(RingContext {
            p,
            r,
            d: r + 1,
            mode: Mode::Abelian,
            rules: BTreeMap::new(),
            rule_degree: u32::MAX,
            default_prec: Precision { a: 4, n: 8 },
            max_escalations: 3,
        })
    }

    /// Rule-presented ring. `rules` uses 1-based indices (j, i) with j > i.
    pub fn with_rules(
        p: u64,
        r: usize,
        rules: BTreeMap<(usize, usize), IntPoly>,
        rule_degree: u32,
    ) -> Result<Self, RingError> {
        let mut ctx = RingContext::abelian(p, r)?;
        ctx.mode = Mode::Rules;
        ctx.rule_degree = rule_degree;
        for ((j, i), h) in rules {
            if !(1..=r).contains(&i) || !(1..=r).contains(&j) || j <= i {
                return Err(RingError::BadRule { j, i, r });
            }
            ctx.rules.insert((j - 1, i - 1), h);
        }
        Ok(ctx)
    }

    /// Coordinates x_1 = 1+p²E_12, x_2 = 1+p²E_23, x_3 = 1+p²E_13 of the
    /// congruence subgroup of the Heisenberg group. From x_1x_2 = x_2x_1x_3^{p²}
    /// and x_3 central, b_2b_1 = b_1b_2 + (1+b_1)(1+b_2)((1+b_3)^{-p²} - 1).
    pub fn congruence_heisenberg(p: u64, degree: u32) -> Result<Self, RingError> {
        if !is_odd_prime(p) {
            return Err(RingError::NotOddPrime);
        }
        let e = -BigInt::from(p * p);
        let mut h: IntPoly = Vec::new();
        for k in 1..=degree {
            let c = binomial_big(&e, k);
            for (u, v) in [(0u16, 0u16), (1, 0), (0, 1), (1, 1)] {
                if k + (u + v) as u32 > degree {
                    continue;
                }
                let mut m = ONE_MON;
                m[0] = u;
                m[1] = v;
                m[2] = k as u16;
                h.push((m, c.clone()));
            }
        }
        let mut rules = BTreeMap::new();
        rules.insert((2, 1), h);
        RingContext::with_rules(p, 3, rules, degree)
    }

    pub fn check_precision(&self, prec: Precision) -> Result<(), RingError> {
        if prec.a == 0 || prec.n == 0 {
            return Err(RingError::BadPrecision);
        }
        let q = (self.p as u128).checked_pow(prec.a).ok_or(RingError::PrecisionTooLarge)?;
        if q >= (1u128 << 62) {
            return Err(RingError::PrecisionTooLarge);
        }
        if self.mode == Mode::Rules && prec.n + prec.a > self.rule_degree.saturating_add(1) {
            return Err(RingError::RulesTooShort { stored: self.rule_degree, needed: prec.n + prec.a - 1 });
        }
        Ok(())
    }

    pub fn modulus(&self, prec: Precision) -> u64 {
        self.p.pow(prec.a)
    }
}

/// Binomial coefficient C(e, k) for an arbitrary integer e.
pub fn binomial_big(e: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= e - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn vp_u64(mut c: u64, p: u64) -> u32 {
    let mut v = 0;
    while c != 0 && c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

pub fn vp_big(c: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut v = 0;
    let mut x = c.clone();
    while !x.is_zero() && (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// M-adic valuation of an exact integer polynomial.
pub fn int_poly_vm(h: &IntPoly, p: u64) -> Option<u32> {
    h.iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| mdeg(m) + vp_big(c, p))
        .min()
}

#[derive(Clone, Debug)]
pub struct Element {
    ring: Arc<RingContext>,
    prec: Precision,
    terms: BTreeMap<Mon, u64>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.terms == other.terms && *self.ring == *other.ring
    }
}

/// Result of the M-adic valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valuation {
    /// None encodes +∞.
    pub value: Option<u32>,
    /// True when truncation could hide a smaller value.
    pub is_bound: bool,
}

impl Element {
    pub fn zero(ring: &Arc<RingContext>, prec: Precision) -> Self {
        Element { ring: ring.clone(), prec, terms: BTreeMap::new() }
    }

    pub fn from_int_poly(ring: &Arc<RingContext>, prec: Precision, poly: &IntPoly) -> Self {
        let q = BigInt::from(ring.modulus(prec));
        let mut terms = BTreeMap::new();
        for (m, c) in poly {
            if mdeg(m) >= prec.n {
                continue;
            }
            let e = terms.entry(*m).or_insert(BigInt::zero());
            *e += c;
        }
        let terms = terms
            .into_iter()
            .filter_map(|(m, c)| {
                let c = c.mod_floor(&q).to_u64().unwrap();
                (c != 0).then_some((m, c))
            })
            .collect();
        Element { ring: ring.clone(), prec, terms }
    }

    pub fn constant(ring: &Arc<RingContext>, prec: Precision, c: i64) -> Self {
        Self::from_int_poly(ring, prec, &vec![(ONE_MON, BigInt::from(c))])
    }

    /// The generator b_i (0-based).
    pub fn var(ring: &Arc<RingContext>, prec: Precision, i: usize) -> Self {
        let mut m = ONE_MON;
        m[i] = 1;
        Self::from_int_poly(ring, prec, &vec![(m, BigInt::one())])
    }

    pub fn monomial(ring: &Arc<RingContext>, prec: Precision, c: u64, m: Mon) -> Self {
        Self::from_int_poly(ring, prec, &vec![(m, BigInt::from(c))])
    }

    pub fn ring(&self) -> &Arc<RingContext> {
        &self.ring
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn terms(&self) -> &BTreeMap<Mon, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn modulus(&self) -> u64 {
        self.ring.modulus(self.prec)
    }

    pub fn truncate(&self, prec: Precision) -> Element {
        let q = self.ring.modulus(prec);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| mdeg(m) < prec.n)
            .filter_map(|(m, c)| (c % q != 0).then_some((*m, c % q)))
            .collect();
        Element { ring: self.ring.clone(), prec, terms }
    }

    pub fn neg(&self) -> Element {
        let q = self.modulus();
        let terms = self.terms.iter().map(|(m, c)| (*m, q - c)).collect();
        Element { ring: self.ring.clone(), prec: self.prec, terms }
    }

    pub fn scale(&self, k: u64) -> Element {
        let q = self.modulus();
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let v = mulmod(*c, k % q, q);
                (v != 0).then_some((*m, v))
            })
            .collect();
        Element { ring: self.ring.clone(), prec: self.prec, terms }
    }

    pub fn v_m(&self) -> Valuation {
        let p = self.ring.p;
        let v = self.terms.iter().map(|(m, c)| mdeg(m) + vp_u64(*c, p)).min();
        let bound = match v {
            None => true,
            Some(v) => v >= self.prec.exact_below(),
        };
        Valuation { value: v, is_bound: bound }
    }

    /// Leading form in gr(Λ) = F_p[X_0, …, X_r].
    pub fn symbol(&self) -> Result<GradedPoly, RingError> {
        let vm = self.v_m();
        if vm.is_bound {
            return Err(RingError::PrecisionInsufficient);
        }
        let v = vm.value.unwrap();
        let p = self.ring.p;
        let mut g = GradedPoly::zero(p, self.ring.r + 1);
        for (m, c) in &self.terms {
            let s = vp_u64(*c, p);
            if mdeg(m) + s != v {
                continue;
            }
            let unit = (c / p.pow(s)) % p;
            let mut x = ONE_MON;
            x[0] = s as u16;
            for i in 0..self.ring.r {
                x[i + 1] = m[i];
            }
            g.terms.insert(x, unit);
        }
        Ok(g)
    }

    pub fn to_int_poly(&self) -> IntPoly {
        self.terms.iter().map(|(m, c)| (*m, BigInt::from(*c))).collect()
    }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn check_same(x: &Element, y: &Element) -> Result<Precision, RingError> {
    if !Arc::ptr_eq(&x.ring, &y.ring) && *x.ring != *y.ring {
        return Err(RingError::RingMismatch);
    }
    Ok(x.prec.meet(&y.prec))
}

pub fn elem_add(x: &Element, y: &Element) -> Result<Element, RingError> {
    let prec = check_same(x, y)?;
    let q = x.ring.modulus(prec);
    let mut terms = x.truncate(prec).terms;
    for (m, c) in &y.terms {
        if mdeg(m) >= prec.n {
            continue;
        }
        let e = terms.entry(*m).or_insert(0);
        *e = (*e + c % q) % q;
    }
    terms.retain(|_, c| *c != 0);
    Ok(Element { ring: x.ring.clone(), prec, terms })
}

pub fn elem_sub(x: &Element, y: &Element) -> Result<Element, RingError> {
    elem_add(x, &y.neg())
}

const STEP_BUDGET: usize = 2_000_000;

pub fn elem_mul(x: &Element, y: &Element) -> Result<Element, RingError> {
    let prec = check_same(x, y)?;
    let ring = x.ring.clone();
    ring.check_precision(prec)?;
    let q = ring.modulus(prec);
    let mut out: BTreeMap<Mon, u64> = BTreeMap::new();
    match ring.mode {
        Mode::Abelian => {
            for (mx, cx) in &x.terms {
                for (my, cy) in &y.terms {
                    let m = crate::poly::mon_mul(mx, my);
                    if mdeg(&m) >= prec.n {
                        continue;
                    }
                    let e = out.entry(m).or_insert(0);
                    *e = (*e + mulmod(*cx, *cy, q)) % q;
                }
            }
        }
        Mode::Rules => {
            let rw = Rewriter::new(&ring, prec);
            for (mx, cx) in &x.terms {
                for (my, cy) in &y.terms {
                    let mut w = word_of(mx, ring.r);
                    w.extend(word_of(my, ring.r));
                    rw.normalize(mulmod(*cx, *cy, q), w, &mut out)?;
                }
            }
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(Element { ring, prec, terms: out })
}

fn word_of(m: &Mon, r: usize) -> Vec<u8> {
    let mut w = Vec::new();
    for i in 0..r {
        for _ in 0..m[i] {
            w.push(i as u8);
        }
    }
    w
}

struct Rewriter {
    p: u64,
    q: u64,
    prec: Precision,
    rules: BTreeMap<(u8, u8), Vec<(Vec<u8>, u64)>>,
}

impl Rewriter {
    fn new(ring: &RingContext, prec: Precision) -> Self {
        let q = ring.modulus(prec);
        let qb = BigInt::from(q);
        let rules = ring
            .rules
            .iter()
            .map(|(&(j, i), h)| {
                let terms = h
                    .iter()
                    .filter_map(|(m, c)| {
                        let c = c.mod_floor(&qb).to_u64().unwrap();
                        (c != 0).then(|| (word_of(m, ring.r), c))
                    })
                    .collect();
                ((j as u8, i as u8), terms)
            })
            .collect();
        Rewriter { p: ring.p, q, prec, rules }
    }

    fn normalize(&self, c: u64, w: Vec<u8>, out: &mut BTreeMap<Mon, u64>) -> Result<(), RingError> {
        let mut stack = vec![(c, w)];
        let mut steps = 0usize;
        while let Some((c, w)) = stack.pop() {
            if c == 0 {
                continue;
            }
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(RingError::StepBudget);
            }
            // Each length-lowering rewrite costs more p-adic valuation than it
            // saves in length, so this word can never drop below N.
            let v = vp_u64(c, self.p);
            let slack = (self.prec.a - 1).saturating_sub(v) as usize;
            if w.len() >= self.prec.n as usize + slack {
                continue;
            }
            match (0..w.len().saturating_sub(1)).find(|&k| w[k] > w[k + 1]) {
                None => {
                    if w.len() < self.prec.n as usize {
                        let mut m = ONE_MON;
                        for &x in &w {
                            m[x as usize] += 1;
                        }
                        let e = out.entry(m).or_insert(0);
                        *e = (*e + c) % self.q;
                    }
                }
                Some(k) => {
                    let (j, i) = (w[k], w[k + 1]);
                    let mut sw = w.clone();
                    sw.swap(k, k + 1);
                    stack.push((c, sw));
                    if let Some(h) = self.rules.get(&(j, i)) {
                        for (hw, hc) in h {
                            let mut nw = w[..k].to_vec();
                            nw.extend_from_slice(hw);
                            nw.extend_from_slice(&w[k + 2..]);
                            stack.push((mulmod(c, *hc, self.q), nw));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element of gr(Λ) = F_p[X_0, …, X_r]; X_0 is the symbol of p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    pub p: u64,
    pub nvars: usize,
    pub terms: BTreeMap<Mon, u64>,
}

impl GradedPoly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        GradedPoly { p, nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(p: u64, nvars: usize, c: u64, m: Mon) -> Self {
        let mut g = Self::zero(p, nvars);
        if c % p != 0 {
            g.terms.insert(m, c % p);
        }
        g
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &GradedPoly) -> GradedPoly {
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            let e = t.entry(*m).or_insert(0);
            *e = (*e + c) % self.p;
        }
        t.retain(|_, c| *c != 0);
        GradedPoly { p: self.p, nvars: self.nvars, terms: t }
    }

    pub fn mul(&self, o: &GradedPoly) -> GradedPoly {
        let mut t: BTreeMap<Mon, u64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let e = t.entry(crate::poly::mon_mul(ma, mb)).or_insert(0);
                *e = (*e + ca * cb) % self.p;
            }
        }
        t.retain(|_, c| *c != 0);
        GradedPoly { p: self.p, nvars: self.nvars, terms: t }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(mdeg);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Homogeneous components by total degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, GradedPoly> {
        let mut out: BTreeMap<u32, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(mdeg(m))
                .or_insert_with(|| GradedPoly::zero(self.p, self.nvars))
                .terms
                .insert(*m, *c);
        }
        out
    }

    /// Terms in descending degrevlex order.
    pub fn sorted_terms(&self) -> Vec<(Mon, u64)> {
        let mut v: Vec<(Mon, u64)> = self.terms.iter().map(|(m, c)| (*m, *c)).collect();
        v.sort_by(|a, b| degrevlex(&b.0, &a.0));
        v
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .iter()
            .map(|(m, c)| {
                let mut fs = vec![];
                if *c != 1 || *m == ONE_MON {
                    fs.push(c.to_string());
                }
                for i in 0..self.nvars {
                    match m[i] {
                        0 => {}
                        1 => fs.push(format!("X{i}")),
                        e => fs.push(format!("X{i}^{e}")),
                    }
                }
                fs.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationEntry {
    pub check: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub entries: Vec<ValidationEntry>,
}

pub fn format_element(x: &Element) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut ts: Vec<(&Mon, &u64)> = x.terms.iter().collect();
    ts.sort_by(|a, b| degrevlex(b.0, a.0));
    ts.iter()
        .map(|(m, c)| {
            let mut fs = vec![];
            if **c != 1 || **m == ONE_MON {
                fs.push(c.to_string());
            }
            for i in 0..x.ring.r {
                match m[i] {
                    0 => {}
                    1 => fs.push(format!("b{}", i + 1)),
                    e => fs.push(format!("b{}^{}", i + 1, e)),
                }
            }
            fs.join("*")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A random element with a few low-degree terms.
pub fn random_element(ring: &Arc<RingContext>, prec: Precision, rng: &mut impl Rng, max_terms: usize) -> Element {
    let q = ring.modulus(prec);
    let k = rng.gen_range(1..=max_terms);
    let mut poly = Vec::new();
    for _ in 0..k {
        let mut m = ONE_MON;
        let deg = rng.gen_range(0..prec.n.min(4));
        for _ in 0..deg {
            m[rng.gen_range(0..ring.r)] += 1;
        }
        poly.push((m, BigInt::from(rng.gen_range(0..q))));
    }
    Element::from_int_poly(ring, prec, &poly)
}

/// Soundness gate for a ring descriptor at a given precision.
pub fn validate_ring(ring: &Arc<RingContext>, prec: Precision, samples: usize, seed: u64) -> ValidationReport {
    let mut entries = Vec::new();
    if let Err(e) = ring.check_precision(prec) {
        entries.push(ValidationEntry { check: "precision".into(), passed: false, witness: Some(e.to_string()) });
        return ValidationReport { passed: false, entries };
    }
    if ring.mode == Mode::Abelian {
        entries.push(ValidationEntry { check: "abelian".into(), passed: true, witness: None });
        return ValidationReport { passed: true, entries };
    }

    for (&(j, i), h) in &ring.rules {
        let v = int_poly_vm(h, ring.p);
        let ok = v.map_or(true, |v| v >= 3);
        entries.push(ValidationEntry {
            check: format!("extra-powerful h_{}{}", j + 1, i + 1),
            passed: ok,
            witness: (!ok).then(|| format!("v_M(h_{}{}) = {}", j + 1, i + 1, v.unwrap())),
        });
    }

    let gens: Vec<Element> = (0..ring.r).map(|i| Element::var(ring, prec, i)).collect();
    let mut assoc_fail = None;
    'outer: for x in &gens {
        for y in &gens {
            for z in &gens {
                match assoc_defect(x, y, z) {
                    Ok(None) => {}
                    Ok(Some(w)) | Err(w) => {
                        assoc_fail = Some(w);
                        break 'outer;
                    }
                }
            }
        }
    }
    entries.push(ValidationEntry {
        check: "associativity on generators".into(),
        passed: assoc_fail.is_none(),
        witness: assoc_fail,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rand_assoc = None;
    let mut distrib = None;
    for _ in 0..samples {
        let x = random_element(ring, prec, &mut rng, 3);
        let y = random_element(ring, prec, &mut rng, 3);
        let z = random_element(ring, prec, &mut rng, 3);
        if rand_assoc.is_none() {
            match assoc_defect(&x, &y, &z) {
                Ok(None) => {}
                Ok(Some(w)) | Err(w) => rand_assoc = Some(w),
            }
        }
        if distrib.is_none() {
            let lhs = elem_add(&y, &z).and_then(|s| elem_mul(&x, &s));
            let rhs = elem_mul(&x, &y).and_then(|a| elem_mul(&x, &z).and_then(|b| elem_add(&a, &b)));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) if l == r => {}
                (Ok(_), Ok(_)) => {
                    distrib = Some(format!(
                        "x = {}, y = {}, z = {}",
                        format_element(&x),
                        format_element(&y),
                        format_element(&z)
                    ))
                }
                (Err(e), _) | (_, Err(e)) => distrib = Some(e.to_string()),
            }
        }
    }
    entries.push(ValidationEntry {
        check: "associativity on random triples".into(),
        passed: rand_assoc.is_none(),
        witness: rand_assoc,
    });
    entries.push(ValidationEntry {
        check: "distributivity on random triples".into(),
        passed: distrib.is_none(),
        witness: distrib,
    });
    let passed = entries.iter().all(|e| e.passed);
    ValidationReport { passed, entries }
}

fn assoc_defect(x: &Element, y: &Element, z: &Element) -> Result<Option<String>, String> {
    let l = elem_mul(x, y).and_then(|xy| elem_mul(&xy, z)).map_err(|e| e.to_string())?;
    let r = elem_mul(y, z).and_then(|yz| elem_mul(x, &yz)).map_err(|e| e.to_string())?;
    if l == r {
        Ok(None)
    } else {
        Ok(Some(format!(
            "({})({})({}): {} vs {}",
            format_element(x),
            format_element(y),
            format_element(z),
            format_element(&l),
            format_element(&r)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(p: u64, r: usize) -> Arc<RingContext> {
        Arc::new(RingContext::abelian(p, r).unwrap())
    }

    fn mon(e: &[u16]) -> Mon {
        let mut m = ONE_MON;
        m[..e.len()].copy_from_slice(e);
        m
    }

    #[test]
    fn primes() {
        assert!(is_odd_prime(3) && is_odd_prime(7) && is_odd_prime(101));
        assert!(!is_odd_prime(2) && !is_odd_prime(4) && !is_odd_prime(9) && !is_odd_prime(1));
        assert_eq!(RingContext::abelian(4, 1).unwrap_err().to_string(), "p must be an odd prime");
    }

    #[test]
    fn add_examples() {
        let r = ab(3, 1);
        let pr = Precision::new(1, 8).unwrap();
        let x = Element::from_int_poly(&r, pr, &vec![(ONE_MON, 1.into()), (mon(&[1]), 1.into())]);
        let y = Element::from_int_poly(&r, pr, &vec![(ONE_MON, 2.into()), (mon(&[1]), 1.into())]);
        let s = elem_add(&x, &y).unwrap();
        assert_eq!(s, Element::monomial(&r, pr, 2, mon(&[1])));
        assert_eq!(elem_add(&x, &Element::zero(&r, pr)).unwrap(), x);
        let t = Element::monomial(&r, pr, 1, mon(&[7]));
        assert_eq!(elem_add(&t, &t).unwrap(), Element::monomial(&r, pr, 2, mon(&[7])));
    }

    #[test]
    fn mul_examples() {
        let r = ab(3, 1);
        let pr = Precision::new(4, 8).unwrap();
        let x = Element::from_int_poly(&r, pr, &vec![(ONE_MON, 3.into()), (mon(&[1]), 1.into())]);
        let b = Element::var(&r, pr, 0);
        let want = Element::from_int_poly(&r, pr, &vec![(mon(&[1]), 3.into()), (mon(&[2]), 1.into())]);
        assert_eq!(elem_mul(&x, &b).unwrap(), want);
        let pr1 = Precision::new(1, 8).unwrap();
        let p = Element::constant(&r, pr1, 3);
        assert!(elem_mul(&p, &Element::var(&r, pr1, 0)).unwrap().is_zero());
    }

    #[test]
    fn valuation_and_symbol() {
        let r = ab(3, 1);
        let pr = Precision::new(4, 8).unwrap();
        let x = Element::from_int_poly(&r, pr, &vec![(ONE_MON, 3.into()), (mon(&[2]), 1.into())]);
        assert_eq!(x.v_m().value, Some(1));
        assert_eq!(x.symbol().unwrap().to_string(), "X0");
        let y = Element::from_int_poly(&r, pr, &vec![(mon(&[1]), 3.into()), (mon(&[2]), 1.into())]);
        assert_eq!(y.v_m().value, Some(2));
        let s = y.symbol().unwrap();
        assert_eq!(s.terms.len(), 2);
        let z = Element::from_int_poly(&r, pr, &vec![(mon(&[1]), 6.into())]);
        assert_eq!(z.symbol().unwrap().to_string(), "2*X0*X1");
        let zero = Element::zero(&r, pr);
        assert_eq!(zero.v_m(), Valuation { value: None, is_bound: true });
        let deep = Element::monomial(&r, pr, 81, ONE_MON);
        assert!(deep.is_zero());
        let near = Element::monomial(&r, pr, 1, mon(&[5]));
        assert!(near.v_m().is_bound);
        assert_eq!(near.symbol().unwrap_err(), RingError::PrecisionInsufficient);
    }

    #[test]
    fn graded_display() {
        let mut g = GradedPoly::zero(3, 3);
        g.terms.insert(mon(&[2, 1]), 2);
        g.terms.insert(mon(&[0, 0, 1]), 1);
        assert_eq!(g.to_string(), "2*X0^2*X1 + X2");
    }

    #[test]
    fn heisenberg_rule_valuation() {
        let h = RingContext::congruence_heisenberg(3, 20).unwrap();
        let rule = &h.rules[&(1, 0)];
        assert_eq!(int_poly_vm(rule, 3), Some(3));
    }

    #[test]
    fn heisenberg_validates() {
        let h = Arc::new(RingContext::congruence_heisenberg(3, 20).unwrap());
        let rep = validate_ring(&h, Precision::new(4, 6).unwrap(), 10, 1);
        assert!(rep.passed, "{:?}", rep);
    }

    #[test]
    fn weak_rule_rejected() {
        let mut rules = BTreeMap::new();
        rules.insert((2, 1), vec![(mon(&[1]), BigInt::from(3))]);
        let ctx = Arc::new(RingContext::with_rules(3, 2, rules, 20).unwrap());
        let rep = validate_ring(&ctx, Precision::new(4, 6).unwrap(), 4, 1);
        assert!(!rep.passed);
    }
}
