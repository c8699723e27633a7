//! Polynomials over GF(2) in the weighted variables `w1, ..., wk`, where `wi` has degree `i`.
//!
//! A [`Poly`] is a set of [`Monomial`]s: every coefficient is 1 and inserting a monomial twice
//! cancels it. Terms are kept sorted in the crate-wide monomial order (see [`Monomial`]'s `Ord`),
//! which is also the order of the canonical text rendering `w1^2*w2 + w3`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use smallvec::SmallVec;

use crate::error::{Error, Result};

type Exponents = SmallVec<[u32; 8]>;

/// The ring `GF(2)[w1, ..., wk]` with `deg wi = i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSpec {
    k: usize,
}

impl VarSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::NoVariables(k));
        }
        Ok(VarSpec { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Weight of `wi` (1-based).
    pub fn weight(&self, i: usize) -> u32 {
        debug_assert!((1..=self.k).contains(&i));
        i as u32
    }

    fn check_var(&self, i: usize) -> Result<()> {
        if (1..=self.k).contains(&i) {
            Ok(())
        } else {
            Err(Error::VarOutOfRange {
                index: i,
                k: self.k,
            })
        }
    }
}

/// A monomial `w1^e1 * ... * wk^ek` with its weighted degree `sum i*ei`.
///
/// Ordering: ascending weighted degree, then descending lexicographic order on the exponent
/// vector with `w1` most significant. So in degree 3 with `k = 3` the order is
/// `w1^3, w1*w2, w3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Exponents,
    degree: u32,
}

fn weighted_degree(exps: &[u32]) -> u32 {
    exps.iter()
        .enumerate()
        .try_fold(0u32, |acc, (i, &e)| {
            e.checked_mul(i as u32 + 1).and_then(|x| acc.checked_add(x))
        })
        .expect("monomial degree overflows u32")
}

impl Monomial {
    pub fn one(vars: VarSpec) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, vars.k),
            degree: 0,
        }
    }

    /// The variable `wi`, 1-based.
    pub fn var(vars: VarSpec, i: usize) -> Result<Self> {
        vars.check_var(i)?;
        let mut m = Monomial::one(vars);
        m.exps[i - 1] = 1;
        m.degree = i as u32;
        Ok(m)
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        VarSpec::new(exps.len())?;
        Ok(Monomial {
            exps: SmallVec::from_slice(exps),
            degree: weighted_degree(exps),
        })
    }

    pub fn vars(&self) -> VarSpec {
        VarSpec { k: self.exps.len() }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Exponent of `wi`, 1-based.
    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i - 1]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Recomputes the weighted degree from the exponents.
    pub fn recompute_degree(&self) -> u32 {
        weighted_degree(&self.exps)
    }

    /// Number of variable factors counted with multiplicity.
    pub fn factor_count(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Product of two monomials over the same variables. Panics on exponent overflow.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exps.len(), other.exps.len(), "variable count mismatch");
        let exps: Exponents = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| {
                a.checked_add(*b)
                    .expect("exponent overflow in monomial product")
            })
            .collect();
        let degree = self
            .degree
            .checked_add(other.degree)
            .expect("degree overflow in monomial product");
        Monomial { exps, degree }
    }

    /// `self^e`. Panics on overflow.
    pub fn pow(&self, e: u32) -> Monomial {
        let exps: Exponents = self
            .exps
            .iter()
            .map(|a| {
                a.checked_mul(e)
                    .expect("exponent overflow in monomial power")
            })
            .collect();
        let degree = self
            .degree
            .checked_mul(e)
            .expect("degree overflow in monomial power");
        Monomial { exps, degree }
    }

    /// `self / wi` if `wi` divides `self`.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i - 1] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.exps[i - 1] -= 1;
        m.degree -= i as u32;
        Some(m)
    }

    /// Same exponents in a ring with `k >= self.k` variables.
    pub fn embed(&self, k: usize) -> Monomial {
        assert!(k >= self.exps.len(), "cannot embed into fewer variables");
        let mut exps = self.exps.clone();
        exps.resize(k, 0);
        Monomial {
            exps,
            degree: self.degree,
        }
    }

    fn uses_any(&self, kill: &[usize]) -> bool {
        kill.iter().any(|&i| self.exps[i - 1] > 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "w{}", i + 1)?;
            } else {
                write!(f, "w{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// A polynomial over GF(2): a sorted set of distinct monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: VarSpec,
    terms: Vec<Monomial>,
}

/// Sorts and keeps each monomial that occurs an odd number of times.
fn cancel_pairs(mut terms: Vec<Monomial>) -> Vec<Monomial> {
    terms.sort_unstable();
    let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
    for m in terms {
        if out.last() == Some(&m) {
            out.pop();
        } else {
            out.push(m);
        }
    }
    out
}

/// Symmetric difference of two sorted, duplicate-free term lists.
fn xor_merge(a: &[Monomial], b: &[Monomial]) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Poly {
    pub fn zero(vars: VarSpec) -> Self {
        Poly {
            vars,
            terms: Vec::new(),
        }
    }

    pub fn one(vars: VarSpec) -> Self {
        Poly::from_monomial(Monomial::one(vars))
    }

    /// The variable `wi`, 1-based.
    pub fn var(vars: VarSpec, i: usize) -> Result<Self> {
        Ok(Poly::from_monomial(Monomial::var(vars, i)?))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Poly {
            vars: m.vars(),
            terms: vec![m],
        }
    }

    /// Builds a polynomial from monomials, cancelling repeated ones in pairs.
    pub fn from_terms<I>(vars: VarSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = Monomial>,
    {
        let terms: Vec<Monomial> = terms.into_iter().collect();
        if let Some(m) = terms.iter().find(|m| m.exps.len() != vars.k) {
            return Err(Error::VarMismatch {
                left: vars.k,
                right: m.exps.len(),
            });
        }
        Ok(Poly {
            vars,
            terms: cancel_pairs(terms),
        })
    }

    pub fn vars(&self) -> VarSpec {
        self.vars
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Monomial> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.binary_search(m).is_ok()
    }

    /// The common degree of all terms; `None` for zero or mixed-degree polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let first = self.terms.first()?.degree;
        (self.terms.last()?.degree == first).then_some(first)
    }

    /// True if every term has degree `j` (vacuously true for zero).
    pub fn is_homogeneous_of(&self, j: u32) -> bool {
        self.terms.iter().all(|m| m.degree == j)
    }

    fn check_same_ring(&self, other: &Poly) -> Result<()> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarMismatch {
                left: self.vars.k,
                right: other.vars.k,
            })
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same_ring(other)?;
        Ok(Poly {
            vars: self.vars,
            terms: xor_merge(&self.terms, &other.terms),
        })
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same_ring(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        match small.len() {
            0 => Ok(Poly::zero(self.vars)),
            1 => Ok(large.mul_monomial(&small.terms[0])),
            _ => {
                let mut products = Vec::with_capacity(small.len() * large.len());
                for a in &small.terms {
                    products.extend(large.terms.iter().map(|b| a.mul(b)));
                }
                Ok(Poly {
                    vars: self.vars,
                    terms: cancel_pairs(products),
                })
            }
        }
    }

    /// Multiplication by a single monomial; the term order is preserved, so no re-sort happens.
    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        assert_eq!(self.vars.k, m.exps.len(), "variable count mismatch");
        Poly {
            vars: self.vars,
            terms: self.terms.iter().map(|t| t.mul(m)).collect(),
        }
    }

    /// Squaring is the Frobenius map: it doubles every exponent and never cancels.
    pub fn square(&self) -> Poly {
        Poly {
            vars: self.vars,
            terms: self.terms.iter().map(|t| t.pow(2)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Sets the variables `w_i`, `i` in `kill`, to zero.
    pub fn reduce_mod_vars(&self, kill: &[usize]) -> Result<Poly> {
        for &i in kill {
            self.vars.check_var(i)?;
        }
        Ok(Poly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|m| !m.uses_any(kill))
                .cloned()
                .collect(),
        })
    }

    /// Same polynomial viewed in `GF(2)[w1, ..., wk]` for a larger `k`.
    pub fn embed(&self, k: usize) -> Result<Poly> {
        if k < self.vars.k {
            return Err(Error::Precondition(format!(
                "cannot embed a polynomial in {} variables into {k}",
                self.vars.k
            )));
        }
        Ok(Poly {
            vars: VarSpec { k },
            terms: self.terms.iter().map(|m| m.embed(k)).collect(),
        })
    }

    /// Terms of degree at most `max_degree`.
    pub fn truncate_degree(&self, max_degree: u32) -> Poly {
        let end = self.terms.partition_point(|m| m.degree <= max_degree);
        Poly {
            vars: self.vars,
            terms: self.terms[..end].to_vec(),
        }
    }

    /// Terms of degree exactly `j`.
    pub fn homogeneous_part(&self, j: u32) -> Poly {
        let lo = self.terms.partition_point(|m| m.degree < j);
        let hi = self.terms.partition_point(|m| m.degree <= j);
        Poly {
            vars: self.vars,
            terms: self.terms[lo..hi].to_vec(),
        }
    }

    /// Parses the canonical rendering, e.g. `w1^2*w2 + w3`, `1`, `0`.
    ///
    /// Terms may come in any order; repeated terms cancel.
    pub fn parse(vars: VarSpec, input: &str) -> Result<Poly> {
        let err = |reason: String| Error::Parse {
            input: input.to_string(),
            reason,
        };
        let trimmed = input.trim();
        if trimmed.is_empty() {
            return Err(err("empty input".into()));
        }
        if trimmed == "0" {
            return Ok(Poly::zero(vars));
        }
        let mut terms = Vec::new();
        for term in trimmed.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(err("empty term".into()));
            }
            let mut exps: Exponents = SmallVec::from_elem(0, vars.k);
            if term != "1" {
                for factor in term.split('*') {
                    let factor = factor.trim();
                    let body = factor
                        .strip_prefix('w')
                        .ok_or_else(|| err(format!("factor {factor:?} does not start with 'w'")))?;
                    let (index, power) = match body.split_once('^') {
                        Some((i, e)) => (i.trim(), e.trim()),
                        None => (body, "1"),
                    };
                    let index: usize = index
                        .parse()
                        .map_err(|_| err(format!("bad variable index in {factor:?}")))?;
                    let power: u32 = power
                        .parse()
                        .map_err(|_| err(format!("bad exponent in {factor:?}")))?;
                    vars.check_var(index)?;
                    exps[index - 1] = exps[index - 1]
                        .checked_add(power)
                        .ok_or_else(|| err("exponent overflow".into()))?;
                }
            }
            let degree = weighted_degree(&exps);
            terms.push(Monomial { exps, degree });
        }
        Poly::from_terms(vars, terms)
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs)
            .expect("adding polynomials from different rings")
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs)
            .expect("multiplying polynomials from different rings")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, m) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// All monomials of weighted degree `j`, in the crate monomial order.
pub fn enumerate_monomials(vars: VarSpec, j: u32) -> Vec<Monomial> {
    fn fill(exps: &mut Exponents, var: usize, remaining: u32, out: &mut Vec<Monomial>, j: u32) {
        let k = exps.len();
        let w = var as u32 + 1;
        if var + 1 == k {
            if remaining.is_multiple_of(w) {
                exps[var] = remaining / w;
                out.push(Monomial {
                    exps: exps.clone(),
                    degree: j,
                });
                exps[var] = 0;
            }
            return;
        }
        for e in (0..=remaining / w).rev() {
            exps[var] = e;
            fill(exps, var + 1, remaining - e * w, out, j);
        }
        exps[var] = 0;
    }

    let mut out = Vec::new();
    let mut exps: Exponents = SmallVec::from_elem(0, vars.k);
    fill(&mut exps, 0, j, &mut out, j);
    out
}
