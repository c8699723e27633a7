//! Characteristic rank of the canonical bundle over `G~_{n,k}` and cup-length bounds.
//!
//! `charrank` is the largest `q` such that `p*: H^j(G_{n,k}) -> H^j(G~_{n,k})` is onto for all
//! `j <= q`, i.e. one less than the first degree where `w1` has a kernel. The upper cup-length
//! bound is `cup <= 1 + floor((d - j - 1) / r)` with `j` a characteristic rank (valid because
//! all top-degree monomials in the Stiefel-Whitney classes vanish upstairs, which is checked,
//! not assumed) and `r` the first positive degree with nonzero cohomology.

use serde::Serialize;

use crate::cohomology::{Cohomology, GrassmannContext};
use crate::duals::DualTable;
use crate::error::{Error, Result};
use crate::gf2poly::{enumerate_monomials, Monomial, Poly};

/// Closed-form value of the characteristic rank for a given `(n, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Prediction {
    Exact(u32),
    LowerBound(u32),
    NotCovered,
}

impl Prediction {
    /// The value used as `j` in the cup-length bound.
    pub fn value(&self) -> Option<u32> {
        match *self {
            Prediction::Exact(v) | Prediction::LowerBound(v) => Some(v),
            Prediction::NotCovered => None,
        }
    }
}

/// `2^t - n` for the `t` with `2^(t-1) < n <= 2^t`.
pub fn gap_below_power_of_two(n: u32) -> u32 {
    n.next_power_of_two() - n
}

/// The case table for `3 <= k <= n - k`:
///
/// * `k = 3`: `n - 2` if `n = 2^t`; `n - 5 + i` if `n = 2^t - i`, `i in {1,2,3}`; else `>= n - 2`.
/// * `k = 4`: `n - 5 + i` if `n = 2^t - i`, `i in {0,1,2,3}`; else `>= n - 3`.
/// * `k >= 5`: `>= n - k + 1`.
pub fn predicted_charrank(n: u32, k: u32) -> Result<Prediction> {
    if k < 3 || k > n.saturating_sub(k) {
        return Err(Error::Precondition(format!(
            "closed forms need 3 <= k <= n-k (n={n}, k={k})"
        )));
    }
    let i = gap_below_power_of_two(n);
    Ok(match k {
        3 => match i {
            0 => Prediction::Exact(n - 2),
            1..=3 => Prediction::Exact(n - 5 + i),
            _ => Prediction::LowerBound(n - 2),
        },
        4 => match i {
            0..=3 => Prediction::Exact(n - 5 + i),
            _ => Prediction::LowerBound(n - 3),
        },
        _ => Prediction::LowerBound(n - k + 1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CharrankValue {
    Exact(u32),
    /// The scan reached its cap without finding a kernel.
    AtLeast(u32),
}

impl CharrankValue {
    pub fn value(&self) -> u32 {
        match *self {
            CharrankValue::Exact(v) | CharrankValue::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CharrankValue::Exact(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharrankResult {
    pub context: GrassmannContext,
    pub value: CharrankValue,
    pub prediction: Prediction,
    /// Exact rows: equality; bound rows: `value >= bound`; uncovered contexts: vacuously true.
    pub agrees: bool,
    /// For odd `n` the same value is the characteristic rank of the manifold `G~_{n,k}` itself.
    pub odd_n_manifold_note: bool,
}

fn agreement(value: CharrankValue, prediction: Prediction) -> bool {
    match (prediction, value) {
        (Prediction::NotCovered, _) => true,
        (Prediction::Exact(e), CharrankValue::Exact(v)) => v == e,
        (Prediction::Exact(_), CharrankValue::AtLeast(_)) => false,
        (Prediction::LowerBound(l), v) => v.value() >= l,
    }
}

/// Scans `j = 0, 1, ...` for the first degree where `w1: H^j -> H^{j+1}` has a kernel.
///
/// With `cap = Some(c)` the scan stops after degree `c` and reports `AtLeast(c)` if no kernel
/// was found.
pub fn charrank_oriented(coh: &Cohomology, cap: Option<u32>) -> Result<CharrankResult> {
    let ctx = coh.context();
    let d = ctx.dim();
    if let Some(c) = cap {
        if c > d {
            return Err(Error::DegreeOutOfRange { j: c, max: d });
        }
    }
    let last = cap.unwrap_or(d);
    let value = match (0..=last).find(|&j| coh.w1_kernel_dim(j) > 0) {
        Some(0) => CharrankValue::Exact(0),
        Some(j) => CharrankValue::Exact(j - 1),
        None if cap.is_some() && last < d => CharrankValue::AtLeast(last),
        None => CharrankValue::Exact(d),
    };
    let prediction = predicted_charrank(ctx.n(), ctx.k()).unwrap_or(Prediction::NotCovered);
    Ok(CharrankResult {
        context: ctx,
        value,
        prediction,
        agrees: agreement(value, prediction),
        odd_n_manifold_note: ctx.n() % 2 == 1,
    })
}

/// Computes the characteristic rank and compares it with [`predicted_charrank`].
pub fn check_predicted_charrank(n: u32, k: u32) -> Result<bool> {
    predicted_charrank(n, k)?;
    let coh = Cohomology::new(GrassmannContext::new(n, k)?);
    Ok(charrank_oriented(&coh, None)?.agrees)
}

/// Consistency of a computed characteristic rank with the vanishing of `g_{n-k+1}`, `g_{n-k+2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GCriteria {
    pub g_first_nonzero: bool,
    pub g_second_nonzero: bool,
    /// `charrank >= n-k` iff `g_{n-k+1} != 0`.
    pub surjectivity_criterion_holds: bool,
    /// If both are nonzero then `charrank >= n-k+1`; `None` when the premise fails.
    pub two_generator_bound_holds: Option<bool>,
}

/// Cross-checks an exact characteristic rank against the `g` table (`w1` killed).
pub fn g_criteria(result: &CharrankResult, g_table: &mut DualTable) -> Result<GCriteria> {
    let ctx = result.context;
    if g_table.k() != ctx.k() as usize || g_table.killed() != [1] {
        return Err(Error::Precondition(
            "expected the g table for the same k".into(),
        ));
    }
    let CharrankValue::Exact(value) = result.value else {
        return Err(Error::Precondition(
            "criteria need an exact characteristic rank".into(),
        ));
    };
    let first = ctx.n() - ctx.k() + 1;
    let g_first_nonzero = !g_table.class(first).is_zero();
    let g_second_nonzero = !g_table.class(first + 1).is_zero();
    let base = ctx.n() - ctx.k();
    Ok(GCriteria {
        g_first_nonzero,
        g_second_nonzero,
        surjectivity_criterion_holds: (value >= base) == g_first_nonzero,
        two_generator_bound_holds: (g_first_nonzero && g_second_nonzero).then_some(value > base),
    })
}

/// Closed-form cup-length upper bounds (floored), where a row exists.
///
/// * `k = 3`: `n - 3` if `n = 2^t`; `(2n-3-i)/2` if `n = 2^t - i`, `i in {2,3}`; `n - 3`
///   otherwise, except `n = 2^t - 1`, which has no row.
/// * `k = 4`: `(3n-10-i)/2` if `n = 2^t - i`, `i <= 3`; `(3n-12)/2` otherwise.
/// * `k >= 5`: `(k-1)(n-k)/2`.
pub fn closed_form_cup_bound(n: u32, k: u32) -> Option<u32> {
    if k < 3 || k > n.saturating_sub(k) {
        return None;
    }
    let i = gap_below_power_of_two(n);
    match k {
        3 => match i {
            0 => Some(n - 3),
            1 => None,
            2 | 3 => Some((2 * n - 3 - i) / 2),
            _ => Some(n - 3),
        },
        4 => match i {
            0..=3 => Some((3 * n - 10 - i) / 2),
            _ => Some((3 * n - 12) / 2),
        },
        _ => Some((k - 1) * (n - k) / 2),
    }
}

/// `1 + floor((d - j - 1) / r)`.
pub fn cup_bound_from_rank(d: u32, j: u32, r: u32) -> u32 {
    assert!(r >= 1, "r must be positive");
    1 + d.saturating_sub(j + 1) / r
}

/// A cup-length lower bound from a nonvanishing product of Stiefel-Whitney classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwLowerBound {
    pub value: u32,
    /// Rendered monomial `w2^a ... wk^z` whose image is nonzero.
    pub witness: Option<String>,
    pub tested: usize,
    pub search_capped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CupBoundReport {
    pub context: GrassmannContext,
    pub d: u32,
    pub j_used: u32,
    /// Whether `j_used` is an exact characteristic rank or a capped scan's lower bound.
    pub j_exact: bool,
    pub r_used: u32,
    pub upper: u32,
    pub closed_form_upper: Option<u32>,
    /// The bound recomputed with the predicted characteristic rank; equals `closed_form_upper`.
    pub recomputed_closed_form: Option<u32>,
    pub lower: Option<SwLowerBound>,
    /// Set when the lower and upper bounds meet.
    pub exact: Option<u32>,
    /// Known value `2^t - 3` for `n = 2^t`, `k = 3`; it relies on a class outside the image of
    /// `p*`, so it cannot be certified by the monomial search.
    pub known_exact: Option<u32>,
}

/// Upper cup-length bound for `G~_{n,k}` from a characteristic rank result.
pub fn cup_upper(coh: &Cohomology, charrank: &CharrankResult) -> Result<CupBoundReport> {
    let ctx = coh.context();
    if charrank.context != ctx {
        return Err(Error::Precondition(
            "characteristic rank is for another context".into(),
        ));
    }
    if !coh.top_monomials_die() {
        return Err(Error::Inconsistent(format!(
            "a top-degree Stiefel-Whitney monomial survives in G~_({},{})",
            ctx.n(),
            ctx.k()
        )));
    }
    let d = ctx.dim();
    let r = coh.r_oriented();
    let j = charrank.value.value();
    let upper = cup_bound_from_rank(d, j, r);
    let closed = closed_form_cup_bound(ctx.n(), ctx.k());
    let recomputed = closed
        .and(charrank.prediction.value())
        .map(|pj| cup_bound_from_rank(d, pj, r));
    if closed != recomputed {
        return Err(Error::Inconsistent(format!(
            "closed-form cup bound {closed:?} differs from recomputed {recomputed:?} for ({}, {})",
            ctx.n(),
            ctx.k()
        )));
    }
    let known_exact = (ctx.k() == 3 && ctx.n().is_power_of_two()).then(|| ctx.n() - 3);
    Ok(CupBoundReport {
        context: ctx,
        d,
        j_used: j,
        j_exact: charrank.value.is_exact(),
        r_used: r,
        upper,
        closed_form_upper: closed,
        recomputed_closed_form: recomputed,
        lower: None,
        exact: None,
        known_exact,
    })
}

impl CupBoundReport {
    pub fn with_lower(mut self, lower: SwLowerBound) -> Self {
        self.exact = (lower.value == self.upper).then_some(self.upper);
        self.lower = Some(lower);
        self
    }
}

/// Largest factor count of a monomial `w2^e2 ... wk^ek` (no `w1`) of degree `<= d` whose image
/// in `H*(G~_{n,k})` is nonzero. Tests at most `budget` monomials.
pub fn cup_lower_sw(coh: &Cohomology, budget: usize) -> SwLowerBound {
    let ctx = coh.context();
    let k = ctx.k() as usize;
    let mut best = SwLowerBound {
        value: 0,
        witness: None,
        tested: 0,
        search_capped: false,
    };
    if k < 2 {
        return best;
    }
    for j in 2..=ctx.dim() {
        for m in monomials_without_w1(k, j) {
            if m.factor_count() <= best.value {
                continue;
            }
            if best.tested == budget {
                best.search_capped = true;
                return best;
            }
            best.tested += 1;
            if coh.monomial_survives_pstar(&m) {
                best.value = m.factor_count();
                best.witness = Some(m.to_string());
            }
        }
    }
    best
}

/// Degree-`j` monomials in `GF(2)[w1..wk]` not divisible by `w1`.
fn monomials_without_w1(k: usize, j: u32) -> Vec<Monomial> {
    let vars = crate::gf2poly::VarSpec::new(k).expect("k >= 1");
    enumerate_monomials(vars, j)
        .into_iter()
        .filter(|m| m.exponent(1) == 0)
        .collect()
}

/// `pstar_nonzero(w2^e)` convenience for the cup-length lower bound on `G~_{2^t,3}`.
pub fn w2_power_survives(coh: &Cohomology, e: u32) -> Result<bool> {
    let vars = coh.context().vars();
    let w2 = Poly::var(vars, 2)?;
    coh.pstar_nonzero(&w2.pow(e))
}
