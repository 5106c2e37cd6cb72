//! The IWM text format and command dispatch behind the `iwalg` binary.
//!
//! ```text
//! ring p=3 vars=1 mode=abelian
//! prec a=4 N=8
//! module M rank=2
//! rel : [p, b1^2 + 2*p*b1]
//! ```
//!
//! Rules mode adds `rule <j> <i> : <polyexpr>` lines (b_j b_i = b_i b_j + h_ji)
//! and an optional `degree=<k>` on the ring line when the rule series were cut
//! off at total degree k. `#` starts a comment. Besides `+`, `*`, `^`, the
//! expression syntax accepts `-` and parentheses.

use crate::budget::{self, BudgetExceeded};
use crate::homology;
use crate::invariants::{self, InvariantError};
use crate::poly::*;
use crate::ring::{self, is_odd_prime, IntPoly, Mode, Precision, RingContext, RingError, MAX_VARS};
use crate::sbasis::{Certification, Presentation, SbasisError};
use crate::verify::{self, AuditReport, CorpusConfig};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub type Poly = BTreeMap<Mon, BigInt>;

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleBlock {
    pub name: String,
    pub rank: usize,
    pub rows: Vec<Vec<Poly>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IwmDocument {
    pub p: u64,
    pub vars: usize,
    pub mode: Mode,
    pub degree: Option<u32>,
    pub prec: Option<(u32, u32)>,
    /// (j, i, h_ji), 1-based.
    pub rules: Vec<(usize, usize, Poly)>,
    pub modules: Vec<ModuleBlock>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
    /// Syntax errors and semantic validation failures are reported alike.
    pub validation: bool,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    vars: usize,
    p: u64,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            line: self.line,
            column: self.pos + 1,
            message: msg.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            validation: false,
        }
    }

    fn invalid(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: col + 1, message: msg.into(), expected: vec![], validation: true }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of line".to_string(), |x| format!("'{}'", x as char));
            Err(self.err(format!("unexpected {found}"), &[&format!("'{}'", c as char)]))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos] as char;
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer", &["integer"]));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap())
    }

    fn small(&mut self, what: &str) -> Result<u64, ParseError> {
        let col = self.pos;
        let n = self.integer()?;
        n.to_u64().ok_or_else(|| self.invalid(col, format!("{what} is too large")))
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = Poly::new();
        let mut sign = if self.eat(b'-') { -1 } else { 1 };
        loop {
            let t = self.term()?;
            for (m, c) in t {
                *acc.entry(m).or_insert_with(BigInt::zero) += c * sign;
            }
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                break;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = poly_product(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let col = self.pos;
            let e = self.small("exponent")?;
            if e > 64 {
                return Err(self.invalid(col, "exponent above 64"));
            }
            let mut out = constant_poly(BigInt::one());
            for _ in 0..e {
                out = poly_product(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        const EXPECTED: &[&str] = &["integer", "'p'", "'b<k>'", "'('"];
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(constant_poly(self.integer()?)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'p') => {
                self.pos += 1;
                Ok(constant_poly(BigInt::from(self.p)))
            }
            Some(b'b') => {
                let col = self.pos;
                self.pos += 1;
                if !self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(self.err("variable index missing", &["digit"]));
                }
                let k = self.small("variable index")? as usize;
                if k == 0 || k > self.vars {
                    return Err(self.invalid(col, format!("b{k} is not one of b1..b{}", self.vars)));
                }
                let mut m = ONE_MON;
                m[k - 1] = 1;
                Ok(Poly::from([(m, BigInt::one())]))
            }
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char), EXPECTED)),
            None => Err(self.err("unexpected end of line", EXPECTED)),
        }
    }
}

fn constant_poly(c: BigInt) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(ONE_MON, c);
    }
    p
}

fn poly_product(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            *out.entry(mon_mul(ma, mb)).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Parse `key=value` pairs, each key at most once.
fn header(cur: &mut Cursor, allowed: &[&str]) -> Result<BTreeMap<String, (usize, String)>, ParseError> {
    let mut out = BTreeMap::new();
    while !cur.at_end() {
        let col = cur.pos;
        let key = cur.word();
        if !allowed.contains(&key.as_str()) {
            let exp: Vec<String> = allowed.iter().map(|k| format!("'{k}='")).collect();
            let exp: Vec<&str> = exp.iter().map(|s| s.as_str()).collect();
            cur.pos = col;
            return Err(cur.err(format!("unknown key '{key}'"), &exp));
        }
        cur.expect(b'=')?;
        let vcol = cur.pos;
        let value = cur.word();
        if value.is_empty() {
            return Err(cur.err("missing value", &["value"]));
        }
        if out.insert(key.clone(), (vcol, value)).is_some() {
            return Err(cur.invalid(col, format!("duplicate key '{key}'")));
        }
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(cur: &Cursor, col: usize, key: &str, v: &str) -> Result<T, ParseError> {
    v.parse().map_err(|_| cur.invalid(col, format!("{key} must be a nonnegative integer, got '{v}'")))
}

pub fn parse(text: &str) -> Result<IwmDocument, ParseError> {
    let mut doc: Option<IwmDocument> = None;
    let mut names = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor { s: line.as_bytes(), pos: 0, line: lineno + 1, vars: 0, p: 0 };
        if cur.at_end() {
            continue;
        }
        let kcol = cur.pos;
        let kw = cur.word();
        if let Some(d) = &doc {
            cur.vars = d.vars;
            cur.p = d.p;
        }
        match (kw.as_str(), doc.as_mut()) {
            ("ring", None) => {
                let h = header(&mut cur, &["p", "vars", "mode", "degree"])?;
                let get = |k: &str| h.get(k).cloned().ok_or_else(|| cur.err(format!("missing '{k}='"), &[&format!("'{k}='")]));
                let (pc, pv) = get("p")?;
                let p: u64 = number(&cur, pc, "p", &pv)?;
                if !is_odd_prime(p) {
                    return Err(cur.invalid(pc, RingError::NotOddPrime.to_string()));
                }
                let (vc, vv) = get("vars")?;
                let vars: usize = number(&cur, vc, "vars", &vv)?;
                if vars == 0 || vars > MAX_VARS {
                    return Err(cur.invalid(vc, format!("vars must be in 1..={MAX_VARS}")));
                }
                let (mc, mv) = get("mode")?;
                let mode = match mv.as_str() {
                    "abelian" => Mode::Abelian,
                    "rules" => Mode::Rules,
                    _ => return Err(ParseError { line: cur.line, column: mc + 1, message: format!("unknown mode '{mv}'"), expected: vec!["abelian".into(), "rules".into()], validation: false }),
                };
                let degree = match h.get("degree") {
                    Some((c, v)) => {
                        if mode != Mode::Rules {
                            return Err(cur.invalid(*c, "degree= only applies to mode=rules"));
                        }
                        Some(number(&cur, *c, "degree", v)?)
                    }
                    None => None,
                };
                doc = Some(IwmDocument { p, vars, mode, degree, prec: None, rules: vec![], modules: vec![] });
            }
            (_, None) => {
                cur.pos = kcol;
                return Err(cur.err(format!("'{kw}' before the ring header"), &["'ring'"]));
            }
            ("ring", Some(_)) => return Err(cur.invalid(kcol, "second ring header")),
            ("prec", Some(d)) => {
                if d.prec.is_some() {
                    return Err(cur.invalid(kcol, "second prec header"));
                }
                let h = header(&mut cur, &["a", "N"])?;
                let get = |k: &str| h.get(k).cloned().ok_or_else(|| cur.err(format!("missing '{k}='"), &[&format!("'{k}='")]));
                let (ac, av) = get("a")?;
                let (nc, nv) = get("N")?;
                let a: u32 = number(&cur, ac, "a", &av)?;
                let n: u32 = number(&cur, nc, "N", &nv)?;
                if a == 0 || n == 0 {
                    return Err(cur.invalid(ac, "precision must satisfy a ≥ 1 and N ≥ 1"));
                }
                d.prec = Some((a, n));
            }
            ("rule", Some(d)) => {
                if d.mode != Mode::Rules {
                    return Err(cur.invalid(kcol, "rule lines need mode=rules"));
                }
                let jc = cur.pos;
                let j = cur.small("rule index")? as usize;
                let i = cur.small("rule index")? as usize;
                if !(1..=d.vars).contains(&j) || !(1..=d.vars).contains(&i) || j <= i {
                    return Err(cur.invalid(jc, format!("rule {j} {i} needs {} ≥ j > i ≥ 1", d.vars)));
                }
                if d.rules.iter().any(|r| r.0 == j && r.1 == i) {
                    return Err(cur.invalid(jc, format!("duplicate rule {j} {i}")));
                }
                cur.expect(b':')?;
                let h = cur.expr()?;
                if !cur.at_end() {
                    return Err(cur.err("trailing input", &["'+'", "'-'", "'*'", "end of line"]));
                }
                d.rules.push((j, i, h));
            }
            ("module", Some(d)) => {
                let ncol = cur.pos;
                let name = cur.word();
                if name.is_empty() || name.contains('=') {
                    return Err(cur.err("missing module name", &["name"]));
                }
                if !names.insert(name.clone()) {
                    return Err(cur.invalid(ncol, format!("duplicate module name '{name}'")));
                }
                let h = header(&mut cur, &["rank"])?;
                let (rc, rv) = h.get("rank").cloned().ok_or_else(|| cur.err("missing 'rank='", &["'rank='"]))?;
                let rank: usize = number(&cur, rc, "rank", &rv)?;
                d.modules.push(ModuleBlock { name, rank, rows: vec![] });
            }
            ("rel", Some(d)) => {
                let Some(block) = d.modules.last_mut() else {
                    return Err(cur.invalid(kcol, "rel outside a module block"));
                };
                cur.expect(b':')?;
                cur.expect(b'[')?;
                let mut row = Vec::new();
                if !cur.eat(b']') {
                    loop {
                        row.push(cur.expr()?);
                        if cur.eat(b',') {
                            continue;
                        }
                        cur.expect(b']').map_err(|mut e| {
                            e.expected = vec!["','".into(), "']'".into()];
                            e
                        })?;
                        break;
                    }
                }
                if !cur.at_end() {
                    return Err(cur.err("trailing input after ']'", &["end of line"]));
                }
                if row.len() != block.rank {
                    return Err(cur.invalid(kcol, format!("row has {} entries, module {} has rank {}", row.len(), block.name, block.rank)));
                }
                block.rows.push(row);
            }
            _ => {
                cur.pos = kcol;
                return Err(cur.err(format!("unknown line '{kw}'"), &["'prec'", "'rule'", "'module'", "'rel'"]));
            }
        }
    }
    doc.ok_or(ParseError { line: 1, column: 1, message: "missing ring header".into(), expected: vec!["'ring'".into()], validation: false })
}

pub fn format_poly_expr(p: u64, vars: usize, poly: &Poly) -> String {
    if poly.is_empty() {
        return "0".into();
    }
    let mut terms: Vec<(&Mon, &BigInt)> = poly.iter().collect();
    terms.sort_by(|a, b| mdeg(a.0).cmp(&mdeg(b.0)).then_with(|| b.0.cmp(a.0)));
    let pb = BigInt::from(p);
    let mut out = String::new();
    for (k, (m, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mut u = c.abs();
        let mut v = 0;
        while u.is_multiple_of(&pb) {
            u /= &pb;
            v += 1;
        }
        let mut fs = Vec::new();
        if !u.is_one() {
            fs.push(u.to_string());
        }
        match v {
            0 => {}
            1 => fs.push("p".into()),
            _ => fs.push(format!("p^{v}")),
        }
        for i in 0..vars {
            match m[i] {
                0 => {}
                1 => fs.push(format!("b{}", i + 1)),
                e => fs.push(format!("b{}^{e}", i + 1)),
            }
        }
        if fs.is_empty() {
            fs.push("1".into());
        }
        let body = fs.join("*");
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => out.push_str(&format!("-{body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
            (_, true) => out.push_str(&format!(" - {body}")),
        }
    }
    out
}

pub fn print_document(doc: &IwmDocument) -> String {
    let mode = match doc.mode {
        Mode::Abelian => "abelian",
        Mode::Rules => "rules",
    };
    let mut out = format!("ring p={} vars={} mode={}", doc.p, doc.vars, mode);
    if let Some(k) = doc.degree {
        out.push_str(&format!(" degree={k}"));
    }
    out.push('\n');
    if let Some((a, n)) = doc.prec {
        out.push_str(&format!("prec a={a} N={n}\n"));
    }
    for (j, i, h) in &doc.rules {
        out.push_str(&format!("rule {j} {i} : {}\n", format_poly_expr(doc.p, doc.vars, h)));
    }
    for b in &doc.modules {
        out.push_str(&format!("module {} rank={}\n", b.name, b.rank));
        for row in &b.rows {
            let es: Vec<String> = row.iter().map(|e| format_poly_expr(doc.p, doc.vars, e)).collect();
            out.push_str(&format!("rel : [{}]\n", es.join(", ")));
        }
    }
    out
}

fn entry_poly(v: &Vector<BigInt>, j: u32) -> Poly {
    v.iter().filter(|t| t.comp == j).map(|t| (t.mon, t.c.clone())).collect()
}

fn row_strings(p: u64, vars: usize, n: usize, v: &Vector<BigInt>) -> Vec<String> {
    (0..n as u32).map(|j| format_poly_expr(p, vars, &entry_poly(v, j))).collect()
}

/// A module block in IWM syntax.
pub fn print_module(name: &str, m: &Presentation<Zp>) -> String {
    let name = if name.is_empty() { "M" } else { name };
    let mut out = format!("module {} rank={}\n", name, m.ngens);
    for r in &m.rels {
        out.push_str(&format!("rel : [{}]\n", row_strings(m.dom.p, m.nvars, m.ngens, r).join(", ")));
    }
    out
}

impl ModuleBlock {
    pub fn presentation(&self, p: u64, vars: usize) -> Presentation<Zp> {
        let d = Zp::new(p);
        let rels = self
            .rows
            .iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .enumerate()
                    .flat_map(|(j, e)| e.iter().map(move |(m, c)| Term { comp: j as u32, mon: *m, c: c.clone() }))
                    .collect();
                from_terms(&d, terms)
            })
            .collect();
        Presentation::new(d, vars, self.rank, rels).with_label(self.name.clone())
    }
}

impl IwmDocument {
    pub fn ring(&self) -> Result<RingContext, RingError> {
        match self.mode {
            Mode::Abelian => RingContext::abelian(self.p, self.vars),
            Mode::Rules => {
                let rules = self
                    .rules
                    .iter()
                    .map(|(j, i, h)| ((*j, *i), h.iter().map(|(m, c)| (*m, c.clone())).collect::<IntPoly>()))
                    .collect();
                RingContext::with_rules(self.p, self.vars, rules, self.degree.unwrap_or(u32::MAX))
            }
        }
    }
}

/// Failure with a machine-readable kind and the process exit code.
#[derive(Clone, Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
    pub detail: Value,
}

impl CliError {
    pub fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), exit_code: 2, detail: Value::Null }
    }

    pub fn to_json(&self) -> Value {
        let mut e = json!({ "kind": self.kind, "message": self.message });
        if let Value::Object(extra) = &self.detail {
            for (k, v) in extra {
                e[k] = v.clone();
            }
        }
        json!({ "error": e })
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError {
            kind: if e.validation { "validation_error" } else { "parse_error" },
            message: e.to_string(),
            exit_code: 2,
            detail: json!({ "line": e.line, "column": e.column, "expected": e.expected }),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        let kind = match &e {
            InvariantError::Unsupported(_) => "unsupported",
            InvariantError::PrecisionInsufficient { .. } => "precision_insufficient",
            InvariantError::Homology(_) => "computation_failure",
            InvariantError::Sbasis(SbasisError::StepBudget) => "step_budget",
            InvariantError::Sbasis(_) => "computation_failure",
        };
        CliError { kind, message: e.to_string(), exit_code: 1, detail: Value::Null }
    }
}

impl From<BudgetExceeded> for CliError {
    fn from(e: BudgetExceeded) -> Self {
        CliError { kind: "step_budget", message: e.to_string(), exit_code: 1, detail: Value::Null }
    }
}

impl From<homology::HomologyError> for CliError {
    fn from(e: homology::HomologyError) -> Self {
        InvariantError::from(e).into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Info,
    Invariants,
    Filtration,
    Resolve { length: usize },
    Ext { i: usize },
    Mu,
    Decompose,
    Verify { suite: String, trials: usize },
    OracleCheck { trials: usize },
}

pub const SUITES: &[&str] = &["all", "auslander", "duality", "filtration", "pseudo", "corpus", "rules"];

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub prec_a: Option<u32>,
    pub prec_n: Option<u32>,
    pub max_escalations: Option<u32>,
    pub seed: u64,
}

/// Seed from the flag, else from IWALG_SEED, else 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("IWALG_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::validation("validation_error", format!("IWALG_SEED is not an integer: '{v}'"))),
        Err(_) => Ok(0),
    }
}

/// Outcome of a command: the JSON report and whether a check failed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub counterexample: bool,
}

struct Ctx {
    ring: Arc<RingContext>,
    prec: Precision,
    seed: u64,
}

struct ModuleResult {
    results: Value,
    certification: Certification,
    escalations: u32,
    counterexample: bool,
}

impl ModuleResult {
    fn exact(results: Value) -> Self {
        ModuleResult { results, certification: Certification::Certified, escalations: 0, counterexample: false }
    }
}

fn ring_json(ring: &RingContext) -> Value {
    let mode = match ring.mode {
        Mode::Abelian => "abelian",
        Mode::Rules => "rules",
    };
    json!({ "p": ring.p, "vars": ring.r, "mode": mode, "d": ring.d })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn abelian_only(ctx: &Ctx, what: &'static str) -> Result<(), CliError> {
    if ctx.ring.mode == Mode::Rules {
        return Err(InvariantError::Unsupported(what).into());
    }
    Ok(())
}

fn audits_json(reps: &[AuditReport]) -> (Value, bool) {
    let failed = reps.iter().any(|r| !r.ok());
    (json!({ "audits": to_value(&reps), "passed": !failed }), failed)
}

fn run_module(ctx: &Ctx, cmd: &Command, m: &Presentation<Zp>) -> Result<ModuleResult, CliError> {
    let ring = &ctx.ring;
    let (p, vars) = (ring.p, ring.r);
    match cmd {
        Command::Info => {
            let s = m.simplify();
            let mut v = json!({
                "generators": m.ngens,
                "relations": m.rels.len(),
                "min_generators": m.min_gens(),
                "zero": m.is_zero(),
                "simplified": print_module(&m.label, &s.pres),
            });
            if ring.mode == Mode::Abelian {
                v["rank"] = json!(invariants::rank(m));
            }
            Ok(ModuleResult::exact(v))
        }
        Command::Invariants => {
            if ring.mode == Mode::Rules {
                let rep = invariants::rules_invariant_report(ring, m, ctx.prec, ring.max_escalations)?;
                return Ok(ModuleResult {
                    results: to_value(&rep),
                    certification: Certification::Heuristic,
                    escalations: rep.escalations,
                    counterexample: false,
                });
            }
            let rep = invariants::invariant_report(ring, m, ctx.prec, ring.max_escalations)?;
            Ok(ModuleResult {
                results: to_value(&rep),
                certification: rep.certification,
                escalations: rep.escalations,
                counterexample: false,
            })
        }
        Command::Filtration => {
            abelian_only(ctx, "filtration")?;
            let f = invariants::dimension_filtration(m)?;
            let mut v = to_value(&f);
            for (lvl, out) in f.levels.iter().zip(v["levels"].as_array_mut().unwrap()) {
                out["generators"] = json!(lvl.generators.iter().map(|g| row_strings(p, vars, m.ngens, g)).collect::<Vec<_>>());
            }
            v["consistent"] = json!(f.consistent());
            Ok(ModuleResult::exact(v))
        }
        Command::Resolve { length } => {
            abelian_only(ctx, "resolve")?;
            let res = homology::minimal_free_resolution(m, *length)?;
            let maps: Vec<Vec<Vec<String>>> = res
                .maps
                .iter()
                .enumerate()
                .map(|(i, rows)| rows.iter().map(|r| row_strings(p, vars, res.betti[i], r)).collect())
                .collect();
            Ok(ModuleResult::exact(json!({
                "betti": res.betti,
                "complete": res.complete,
                "minimal": res.is_minimal(),
                "maps": maps,
                "pd": res.complete.then(|| res.pd()).flatten(),
            })))
        }
        Command::Ext { i } => {
            abelian_only(ctx, "ext")?;
            if *i > ring.d {
                return Ok(ModuleResult::exact(json!({ "index": i, "zero": true, "generators": 0 })));
            }
            let e = homology::ext(m, *i)?.module;
            let ann = crate::gb::groebner(&e.dom, &invariants::annihilator(&e));
            Ok(ModuleResult::exact(json!({
                "index": i,
                "zero": e.is_zero(),
                "generators": e.ngens,
                "cyclic": e.min_gens() == 1,
                "presentation": print_module("E", &e),
                "annihilator": ann.iter().map(|g| format_poly_expr(p, vars, &entry_poly(g, 0))).collect::<Vec<_>>(),
                "mu": invariants::mu(&e).mu,
                "delta": to_value(&invariants::profile(&e)?)["delta"],
            })))
        }
        Command::Mu => {
            abelian_only(ctx, "mu")?;
            Ok(ModuleResult::exact(to_value(&invariants::mu(m))))
        }
        Command::Decompose => {
            abelian_only(ctx, "decompose")?;
            let rep = invariants::decompose_p_torsion(m, ctx.prec.a)?;
            Ok(ModuleResult::exact(to_value(&rep)))
        }
        Command::Verify { suite, trials } => {
            abelian_only(ctx, "verify on modules")?;
            let mut reps = Vec::new();
            let all = suite == "all";
            if all || suite == "auslander" {
                reps.push(verify::auslander_spotcheck(ring, m, *trials, ctx.seed)?);
            }
            if suite == "duality" {
                reps.push(verify::local_duality_finite(ring, m, ctx.seed)?);
            }
            if all || suite == "filtration" {
                let f = invariants::dimension_filtration(m)?;
                let mut r = AuditReport::new("filtration");
                r.record(f.consistent(), false, || verify::Witness {
                    ring: verify::ring_descriptor(ring),
                    precision: ctx.prec,
                    seed: ctx.seed,
                    instance: 0,
                    presentation: print_module(&m.label, m),
                    trace: serde_json::to_string(&f).unwrap_or_default(),
                });
                reps.push(r);
            }
            if all || suite == "pseudo" {
                let (a, b) = verify::pseudo_iso_check(ring, m, ctx.seed)?;
                reps.push(a);
                reps.push(b);
            }
            let (v, failed) = audits_json(&reps);
            Ok(ModuleResult {
                results: v,
                certification: if reps.iter().any(|r| r.heuristic > 0) { Certification::Heuristic } else { Certification::Certified },
                escalations: 0,
                counterexample: failed,
            })
        }
        Command::OracleCheck { .. } => unreachable!("document-level command"),
    }
}

fn run_document_level(ctx: &Ctx, cmd: &Command) -> Result<Option<ModuleResult>, CliError> {
    let ring = &ctx.ring;
    let suite_reps = |reps: Vec<AuditReport>| {
        let (v, failed) = audits_json(&reps);
        ModuleResult { results: v, certification: Certification::Certified, escalations: 0, counterexample: failed }
    };
    match cmd {
        Command::OracleCheck { trials } => {
            let h = Arc::new(RingContext::congruence_heisenberg(ring.p, ctx.prec.a + ctx.prec.n - 1).map_err(|e| CliError::validation("validation_error", e.to_string()))?);
            let val = ring::validate_ring(&h, ctx.prec, 16, ctx.seed);
            let mut v = AuditReport::new("validate_ring");
            v.record(val.passed, false, || verify::Witness {
                ring: verify::ring_descriptor(&h),
                precision: ctx.prec,
                seed: ctx.seed,
                instance: 0,
                presentation: String::new(),
                trace: serde_json::to_string(&val).unwrap_or_default(),
            });
            let o = verify::matrix_oracle_check(&h, ctx.prec, *trials, 4, ctx.seed);
            let s = verify::symbol_multiplicativity(&h, ctx.prec, 50, ctx.seed);
            Ok(Some(suite_reps(vec![v, o, s])))
        }
        Command::Verify { suite, trials } if suite == "corpus" => {
            let cfg = CorpusConfig { p: ring.p, trials: *trials, ..Default::default() };
            Ok(Some(suite_reps(verify::corpus_run(&cfg, ctx.seed)?)))
        }
        Command::Verify { suite, trials } if suite == "rules" => {
            if ring.mode != Mode::Rules {
                return Err(CliError::validation("validation_error", "suite 'rules' needs mode=rules"));
            }
            let val = ring::validate_ring(ring, ctx.prec, 16, ctx.seed);
            let mut v = AuditReport::new("validate_ring");
            v.record(val.passed, false, || verify::Witness {
                ring: verify::ring_descriptor(ring),
                precision: ctx.prec,
                seed: ctx.seed,
                instance: 0,
                presentation: String::new(),
                trace: serde_json::to_string(&val).unwrap_or_default(),
            });
            let s = verify::symbol_multiplicativity(ring, ctx.prec, *trials, ctx.seed);
            Ok(Some(suite_reps(vec![v, s])))
        }
        _ => Ok(None),
    }
}

/// Run a command on a parsed document.
/// Cap on coefficient width for commands; see [`budget`].
pub const COEFF_BUDGET_BITS: u64 = 1 << 14;

pub fn run(doc: &IwmDocument, cmd: &Command, opts: &Options) -> Result<Outcome, CliError> {
    budget::guarded(COEFF_BUDGET_BITS, || run_unguarded(doc, cmd, opts)).unwrap_or_else(|e| Err(e.into()))
}

fn run_unguarded(doc: &IwmDocument, cmd: &Command, opts: &Options) -> Result<Outcome, CliError> {
    if let Command::Verify { suite, .. } = cmd {
        if !SUITES.contains(&suite.as_str()) {
            return Err(CliError::validation("validation_error", format!("unknown suite '{suite}', expected one of {}", SUITES.join(", "))));
        }
    }
    let mut ring = doc.ring().map_err(|e| CliError::validation("validation_error", e.to_string()))?;
    let (a0, n0) = doc.prec.unwrap_or((ring.default_prec.a, ring.default_prec.n));
    let prec = Precision::new(opts.prec_a.unwrap_or(a0), opts.prec_n.unwrap_or(n0))
        .map_err(|e| CliError::validation("validation_error", e.to_string()))?;
    ring.check_precision(prec).map_err(|e| CliError::validation("validation_error", e.to_string()))?;
    ring.default_prec = prec;
    if let Some(k) = opts.max_escalations {
        ring.max_escalations = k;
    }
    if ring.mode == Mode::Rules {
        let val = ring::validate_ring(&Arc::new(ring.clone()), prec, 16, opts.seed);
        if !val.passed {
            let mut e = CliError::validation("invalid_ring", "ring descriptor failed validation");
            e.detail = json!({ "validation": to_value(&val) });
            return Err(e);
        }
    }
    let ctx = Ctx { ring: Arc::new(ring), prec, seed: opts.seed };
    let head = |mr: &ModuleResult, module: Value| {
        json!({
            "ring": ring_json(&ctx.ring),
            "module": module,
            "precision": to_value(&ctx.prec),
            "results": mr.results,
            "certification": to_value(&mr.certification),
            "escalations": mr.escalations,
        })
    };
    if let Some(mr) = run_document_level(&ctx, cmd)? {
        return Ok(Outcome { report: head(&mr, Value::Null), counterexample: mr.counterexample });
    }
    if doc.modules.is_empty() {
        return Err(CliError::validation("validation_error", "document has no module blocks"));
    }
    let cap = budget::limit();
    let results: Vec<Result<ModuleResult, CliError>> = doc
        .modules
        .par_iter()
        .map(|b| budget::inherit(cap, || run_module(&ctx, cmd, &b.presentation(doc.p, doc.vars))))
        .collect();
    let mut per = Vec::with_capacity(results.len());
    for (b, r) in doc.modules.iter().zip(results) {
        per.push((b.name.clone(), r?));
    }
    if per.len() == 1 {
        let (name, mr) = &per[0];
        return Ok(Outcome { report: head(mr, json!(name)), counterexample: mr.counterexample });
    }
    let mut modules = serde_json::Map::new();
    for (name, mr) in &per {
        modules.insert(name.clone(), json!({
            "module": name,
            "results": mr.results,
            "certification": to_value(&mr.certification),
            "escalations": mr.escalations,
        }));
    }
    let heuristic = per.iter().any(|(_, m)| m.certification == Certification::Heuristic);
    Ok(Outcome {
        report: json!({
            "ring": ring_json(&ctx.ring),
            "precision": to_value(&ctx.prec),
            "modules": modules,
            "certification": if heuristic { "heuristic" } else { "certified" },
            "escalations": per.iter().map(|(_, m)| m.escalations).max().unwrap_or(0),
        }),
        counterexample: per.iter().any(|(_, m)| m.counterexample),
    })
}

/// Plain-text rendering of a report.
pub fn render_text(v: &Value) -> String {
    fn walk(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    match x {
                        Value::Object(_) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(x, indent + 1, out);
                        }
                        Value::Array(a) if a.iter().any(|e| e.is_object()) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for e in a {
                                out.push_str(&format!("{pad}  -\n"));
                                walk(e, indent + 2, out);
                            }
                        }
                        Value::String(s) if s.contains('\n') => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for l in s.lines() {
                                out.push_str(&format!("{pad}  {l}\n"));
                            }
                        }
                        Value::String(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                        _ => out.push_str(&format!("{pad}{k}: {x}\n")),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{other}\n")),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_document() {
        let doc = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=1\nrel : [p]\n").unwrap();
        assert_eq!(doc.modules.len(), 1);
        let m = doc.modules[0].presentation(3, 1);
        assert_eq!(m.rels.len(), 1);
        assert_eq!(m.rels[0][0].c, BigInt::from(3));
    }

    #[test]
    fn parses_evident_row() {
        let doc = parse("ring p=3 vars=2 mode=abelian\nmodule M rank=2\nrel : [p^2 + 2*b1*b2, b2]\n").unwrap();
        let row = &doc.modules[0].rows[0];
        assert_eq!(format_poly_expr(3, 2, &row[0]), "p^2 + 2*b1*b2");
        assert_eq!(format_poly_expr(3, 2, &row[1]), "b2");
    }

    #[test]
    fn rejects_bad_prime() {
        let e = parse("ring p=4 vars=1 mode=abelian\n").unwrap_err();
        assert!(e.message.contains("p must be an odd prime"));
        assert_eq!(e.line, 1);
    }

    #[test]
    fn diagnostics() {
        let e = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=2\nrel : [p]\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.validation);
        let e = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=1\nrel : [p +]\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 11));
        assert!(!e.expected.is_empty());
        let e = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=1\nmodule M rank=1\n").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=1\nrel : [b2]\n").unwrap_err();
        assert!(e.validation);
    }

    #[test]
    fn round_trip() {
        let text = "ring p=5 vars=2 mode=abelian\nprec a=3 N=6\nmodule A rank=2\nrel : [p, 2*p^2*b1 - b2^2]\nrel : [0, 1 + b1]\nmodule B rank=1\n";
        let doc = parse(text).unwrap();
        assert_eq!(print_document(&doc), text);
        assert_eq!(parse(&print_document(&doc)).unwrap(), doc);
    }

    #[test]
    fn decompose_diagonal() {
        let doc = parse("ring p=3 vars=1 mode=abelian\nmodule M rank=2\nrel : [p, 0]\nrel : [0, p^3]\n").unwrap();
        let out = run(&doc, &Command::Decompose, &Options::default()).unwrap();
        assert_eq!(out.report["results"]["exponents"], json!([1, 3]));
        assert_eq!(out.report["results"]["mu"], json!(4));
    }
}
