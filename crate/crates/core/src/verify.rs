//! Check suites.
//!
//! A suite produces named pass/fail [`Check`]s plus one [`ContextRow`] per Grassmannian it had
//! to compute. Suites never stop at the first failure; every check reports what it saw.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohomology::{Cohomology, GrassmannContext};
use crate::duals::{dual_class, frobenius_recurrence_holds, g_table, scan_table, DualTable};
use crate::error::{Error, Result};
use crate::gf2poly::{enumerate_monomials, Monomial, Poly, VarSpec};
use crate::rank_cup::{
    charrank_oriented, cup_lower_sw, cup_upper, g_criteria, w2_power_survives, CharrankValue,
    Prediction,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Zeros,
    Points,
    Frobenius,
    Charrank,
    Cup,
    Gysin,
    Ideal,
    All,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Zeros,
        Suite::Points,
        Suite::Frobenius,
        Suite::Charrank,
        Suite::Cup,
        Suite::Gysin,
        Suite::Ideal,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Zeros => "zeros",
            Suite::Points => "points",
            Suite::Frobenius => "frobenius",
            Suite::Charrank => "charrank",
            Suite::Cup => "cup",
            Suite::Gysin => "gysin",
            Suite::Ideal => "ideal",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "unknown suite".into(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Upper end of the `g_i` scans. `None`: 1024 for `k = 3`, 512 for `k = 4, 5, 6`.
    pub hi: Option<u32>,
    /// Largest exponent `t` of the `n <= 2^t` grids. `None`: 6 for characteristic ranks and
    /// Gysin data, 5 for cup lengths.
    pub t_max: Option<u32>,
    pub frobenius_samples: usize,
    pub seed: u64,
    /// Monomials tested per context by the lower cup-length search.
    pub lower_budget: usize,
    /// Record wall-clock time per context (makes output non-reproducible).
    pub timing: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            hi: None,
            t_max: None,
            frobenius_samples: 50,
            seed: 0x5eed,
            lower_budget: 200_000,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, failures: Vec<String>, ok_detail: impl Into<String>) -> Self {
        let passed = failures.is_empty();
        Check {
            name: name.into(),
            passed,
            detail: if passed {
                ok_detail.into()
            } else {
                failures.join("; ")
            },
        }
    }
}

/// One computed Grassmannian.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContextRow {
    pub n: u32,
    pub k: u32,
    pub predicted: Prediction,
    pub computed: CharrankValue,
    pub agrees: bool,
    pub r_oriented: u32,
    pub cup_upper: Option<u32>,
    pub cup_closed_form: Option<u32>,
    pub cup_lower: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub rows: Vec<ContextRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let grid_t = opts.t_max.unwrap_or(6);
    let cup_t = opts.t_max.unwrap_or(5);
    match suite {
        Suite::Zeros => checks.extend(g_zero_sets(
            opts.hi.unwrap_or(1024),
            opts.hi.unwrap_or(512),
        )?),
        Suite::Points => checks.extend(point_values()?),
        Suite::Frobenius => checks.push(frobenius(opts.frobenius_samples, opts.seed)?),
        Suite::Charrank | Suite::Gysin => {
            let aspects = if suite == Suite::Gysin {
                Aspects::GYSIN
            } else {
                Aspects::CHARRANK
            };
            let (c, r) = grid_checks(&charrank_grid(grid_t), aspects, opts)?;
            checks.extend(c);
            rows.extend(r);
        }
        Suite::Cup => {
            let (c, r) = grid_checks(&cup_grid(cup_t), Aspects::CUP, opts)?;
            checks.extend(c);
            rows.extend(r);
        }
        Suite::Ideal => checks.push(ideal_membership(&[(6, 3), (7, 3)])?),
        Suite::All => {
            checks.extend(g_zero_sets(
                opts.hi.unwrap_or(1024),
                opts.hi.unwrap_or(512),
            )?);
            checks.extend(point_values()?);
            checks.push(frobenius(opts.frobenius_samples, opts.seed)?);
            let mut grid = charrank_grid(grid_t);
            for c in cup_grid(cup_t) {
                if !grid.contains(&c) {
                    grid.push(c);
                }
            }
            let (c, r) = grid_checks(&grid, Aspects::EVERYTHING, opts)?;
            checks.extend(c);
            rows.extend(r);
            checks.push(ideal_membership(&[(6, 3), (7, 3)])?);
        }
    }
    Ok(SuiteReport {
        suite,
        checks,
        rows,
    })
}

/// `{2^t - 3 : t >= 3} ∩ [2, hi]`
fn expected_g_zeros(hi: u32) -> Vec<u32> {
    (3..32)
        .map(|t| (1u64 << t) - 3)
        .take_while(|&z| z <= hi as u64)
        .map(|z| z as u32)
        .collect()
}

/// Zero sets of `g_i` for `k = 3, 4` (exactly `2^t - 3`) and `k = 5, 6` (empty), plus agreement
/// of `g_i` at `k = 6` with `w6 = 0` and `g_i` at `k = 5`.
pub fn g_zero_sets(hi_k3: u32, hi_rest: u32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, hi) in [(3usize, hi_k3), (4, hi_rest), (5, hi_rest), (6, hi_rest)] {
        let mut table = g_table(k)?;
        let scan = scan_table(&mut table, 2, hi.max(2), false)?;
        let expected = if k <= 4 {
            expected_g_zeros(hi)
        } else {
            Vec::new()
        };
        let failures = if scan.zero_degrees == expected {
            Vec::new()
        } else {
            vec![format!(
                "zeros {:?}, expected {expected:?}",
                scan.zero_degrees
            )]
        };
        checks.push(Check::new(
            format!("g_i zero set, k={k}, 2<=i<={hi}"),
            failures,
            format!("zeros {expected:?}"),
        ));
    }

    let mut g6 = g_table(6)?;
    let mut g5 = g_table(5)?;
    g6.extend_to(hi_rest);
    g5.extend_to(hi_rest);
    let mut failures = Vec::new();
    for i in 0..=hi_rest {
        let restricted = g6.class(i).reduce_mod_vars(&[6])?;
        if restricted != g5.class(i).embed(6)? {
            failures.push(format!("i={i}"));
        }
    }
    checks.push(Check::new(
        format!("g_i at k=6 restricts to g_i at k=5, i<={hi_rest}"),
        failures,
        "all agree",
    ));
    Ok(checks)
}

fn poly(k: usize, s: &str) -> Result<Poly> {
    Poly::parse(VarSpec::new(k)?, s)
}

/// Individual values of `g`, `h` (`w1, w2, w3` killed at `k = 5`) and `z` (`w1, w2, w3` killed
/// at `k = 4`).
pub fn point_values() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut expect = |name: String, got: &Poly, want: &Poly| {
        let failures = if got == want {
            Vec::new()
        } else {
            vec![format!("got {got}")]
        };
        checks.push(Check::new(name, failures, format!("= {want}")));
    };

    let mut g4 = g_table(4)?;
    let zero4 = Poly::zero(VarSpec::new(4)?);
    expect("g_1 at k=4".into(), g4.class(1), &zero4);
    expect("g_5 at k=4".into(), g4.class(5), &zero4);
    let mut g5 = g_table(5)?;
    expect("g_5 at k=5".into(), g5.class(5), &poly(5, "w5")?);

    let mut z = DualTable::reduced(4, &[1, 2, 3])?;
    expect("z_12".into(), z.class(12), &poly(4, "w4^3")?);
    for t in 4..=10u32 {
        let want = poly(4, &format!("w4^{}", (1u32 << (t - 2)) - 1))?;
        let got = z.class((1 << t) - 4).clone();
        expect(format!("z_{} (t={t})", (1u32 << t) - 4), &got, &want);
    }

    let mut h = DualTable::reduced(5, &[1, 2, 3])?;
    for t in 4..=8u32 {
        let step = 1u32 << (t - 3);
        let vars = h.vars();
        let w4 = Monomial::var(vars, 4)?.pow(step);
        let w5 = Monomial::var(vars, 5)?.pow(step);
        let rhs = &h.class((1 << (t - 1)) - 3).mul_monomial(&w4)
            + &h.class(3 * step - 3).mul_monomial(&w5);
        let lhs = h.class((1 << t) - 3).clone();
        let failures = if lhs == rhs {
            Vec::new()
        } else {
            vec![format!(
                "h_{} = {lhs}, recursion gives {rhs}",
                (1u32 << t) - 3
            )]
        };
        checks.push(Check::new(
            format!("h recursion at t={t}"),
            failures,
            "holds",
        ));
    }
    Ok(checks)
}

/// The squared recurrence for `g` at `samples` random valid `(k, i, s)` with `k <= 5`,
/// `i <= 300`.
pub fn frobenius(samples: usize, seed: u64) -> Result<Check> {
    const I_MAX: u32 = 300;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables: BTreeMap<usize, DualTable> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut tried = Vec::new();
    for _ in 0..samples {
        let k = rng.gen_range(2..=5usize);
        let max_s = (0..)
            .take_while(|&s| (k as u32) * (1 << s) < I_MAX)
            .last()
            .unwrap_or(0);
        let s = rng.gen_range(0..=max_s);
        let i = rng.gen_range(1 + (k as u32) * (1 << s)..=I_MAX);
        let table = match tables.entry(k) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(g_table(k)?),
        };
        if !frobenius_recurrence_holds(table, i, s)? {
            failures.push(format!("(k={k}, i={i}, s={s})"));
        }
        tried.push(format!("({k},{i},{s})"));
    }
    Ok(Check::new(
        format!("squared g recurrence, {samples} samples, seed {seed:#x}"),
        failures,
        tried.join(" "),
    ))
}

/// `k = 3`: `6 <= n <= 2^t`; `k = 4`: `8 <= n <= 2^min(t,5)`; `k = 5`: `10 <= n <= 24`
/// (capped by `2^t`).
pub fn charrank_grid(t_max: u32) -> Vec<(u32, u32)> {
    let top = |t: u32| 1u32.checked_shl(t).unwrap_or(u32::MAX);
    let mut grid: Vec<(u32, u32)> = (6..=top(t_max)).map(|n| (n, 3)).collect();
    grid.extend((8..=top(t_max.min(5))).map(|n| (n, 4)));
    grid.extend((10..=top(t_max).min(24)).map(|n| (n, 5)));
    grid
}

/// `(2^t, 3)` for `3 <= t <= t_max`, and every `k = 3, 4` context with `n <= min(2^t_max, 32)`.
pub fn cup_grid(t_max: u32) -> Vec<(u32, u32)> {
    let top = 1u32.checked_shl(t_max).unwrap_or(u32::MAX);
    let mut grid: Vec<(u32, u32)> = (6..=top.min(32)).map(|n| (n, 3)).collect();
    grid.extend((3..=t_max).map(|t| (1 << t, 3)).filter(|&(n, _)| n > 32));
    grid.extend((8..=top.min(32)).map(|n| (n, 4)));
    grid
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Aspects {
    charrank: bool,
    gysin: bool,
    cup: bool,
}

impl Aspects {
    const CHARRANK: Aspects = Aspects {
        charrank: true,
        gysin: false,
        cup: false,
    };
    const GYSIN: Aspects = Aspects {
        charrank: false,
        gysin: true,
        cup: false,
    };
    const CUP: Aspects = Aspects {
        charrank: false,
        gysin: false,
        cup: true,
    };
    const EVERYTHING: Aspects = Aspects {
        charrank: true,
        gysin: true,
        cup: true,
    };
}

#[derive(Default)]
struct Failures {
    exact_rows: Vec<String>,
    bound_rows: Vec<String>,
    g_criteria: Vec<String>,
    gysin: Vec<String>,
    top: Vec<String>,
    cup_power_of_two: Vec<String>,
    cup_closed_form: Vec<String>,
    cup_order: Vec<String>,
}

fn tag(n: u32, k: u32) -> String {
    format!("({n},{k})")
}

fn grid_checks(
    grid: &[(u32, u32)],
    aspects: Aspects,
    opts: &SuiteOptions,
) -> Result<(Vec<Check>, Vec<ContextRow>)> {
    let mut failures = Failures::default();
    let mut rows = Vec::with_capacity(grid.len());
    let mut g_tables: BTreeMap<u32, DualTable> = BTreeMap::new();
    let (mut exact_count, mut bound_count, mut pow2_count, mut closed_count) = (0, 0, 0, 0);

    for &(n, k) in grid {
        let start = Instant::now();
        log::info!("computing G~({n},{k})");
        let ctx = GrassmannContext::new(n, k)?;
        let coh = Cohomology::new(ctx);
        let here = tag(n, k);
        let charrank = charrank_oriented(&coh, None)?;

        if aspects.charrank || aspects.gysin {
            match charrank.prediction {
                Prediction::Exact(_) => exact_count += 1,
                _ => bound_count += 1,
            }
            if !charrank.agrees {
                let msg = format!(
                    "{here}: computed {:?}, predicted {:?}",
                    charrank.value, charrank.prediction
                );
                match charrank.prediction {
                    Prediction::Exact(_) => failures.exact_rows.push(msg),
                    _ => failures.bound_rows.push(msg),
                }
            }
            if charrank.value.value() + 1 < n - k {
                failures.bound_rows.push(format!("{here}: below n-k-1"));
            }
            let table = match g_tables.entry(k) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(g_table(k as usize)?),
            };
            let crit = g_criteria(&charrank, table)?;
            if !crit.surjectivity_criterion_holds || crit.two_generator_bound_holds == Some(false) {
                failures.g_criteria.push(format!("{here}: {crit:?}"));
            }
        }

        if aspects.gysin {
            let report = coh.gysin_report();
            for v in report.violations() {
                failures.gysin.push(format!("{here}: {v}"));
            }
            if let Some(row) = report
                .rows
                .iter()
                .take((n - k) as usize)
                .find(|r| r.ker > 0)
            {
                failures
                    .gysin
                    .push(format!("{here}: kernel of w1 in degree {} <= n-k-1", row.j));
            }
            if !coh.top_monomials_die() {
                failures.top.push(here.clone());
            }
        }

        let mut cup_fields = (None, None, None);
        if aspects.cup {
            match cup_upper(&coh, &charrank) {
                Err(e @ Error::Inconsistent(_)) => {
                    failures.cup_closed_form.push(format!("{here}: {e}"))
                }
                Err(e) => return Err(e),
                Ok(report) => {
                    let lower = cup_lower_sw(&coh, opts.lower_budget);
                    if lower.value > report.upper {
                        failures.cup_order.push(format!(
                            "{here}: lower {} > upper {}",
                            lower.value, report.upper
                        ));
                    }
                    if n.is_power_of_two() && k == 3 {
                        pow2_count += 1;
                        let survives = w2_power_survives(&coh, n - 4)?;
                        if report.upper != n - 3 || !survives {
                            failures.cup_power_of_two.push(format!(
                                "{here}: upper {}, w2^{} survives: {survives}",
                                report.upper,
                                n - 4
                            ));
                        }
                    }
                    if let Some(closed) = report.closed_form_upper {
                        closed_count += 1;
                        if report.upper > closed || report.recomputed_closed_form != Some(closed) {
                            failures.cup_closed_form.push(format!(
                                "{here}: upper {}, closed form {closed}, recomputed {:?}",
                                report.upper, report.recomputed_closed_form
                            ));
                        }
                    }
                    cup_fields = (
                        Some(report.upper),
                        report.closed_form_upper,
                        Some(lower.value),
                    );
                }
            }
        }

        rows.push(ContextRow {
            n,
            k,
            predicted: charrank.prediction,
            computed: charrank.value,
            agrees: charrank.agrees,
            r_oriented: coh.r_oriented(),
            cup_upper: cup_fields.0,
            cup_closed_form: cup_fields.1,
            cup_lower: cup_fields.2,
            elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
        });
    }

    let span = describe_grid(grid);
    let mut checks = Vec::new();
    if aspects.charrank {
        checks.push(Check::new(
            format!("characteristic rank equals closed form, exact rows of {span}"),
            failures.exact_rows,
            format!("{exact_count} contexts"),
        ));
        checks.push(Check::new(
            format!("characteristic rank meets lower bound, other rows of {span}"),
            failures.bound_rows,
            format!("{bound_count} contexts"),
        ));
        checks.push(Check::new(
            format!("g_(n-k+1), g_(n-k+2) criteria, {span}"),
            failures.g_criteria,
            format!("{} contexts", grid.len()),
        ));
    }
    if aspects.gysin {
        checks.push(Check::new(
            format!("Gysin totals, duality and exactness, {span}"),
            failures.gysin,
            format!("{} contexts", grid.len()),
        ));
        checks.push(Check::new(
            format!("top-degree monomials die, {span}"),
            failures.top,
            format!("{} contexts", grid.len()),
        ));
    }
    if aspects.cup {
        checks.push(Check::new(
            format!("cup length of G~(2^t,3): upper 2^t-3 and w2^(2^t-4) survives, {span}"),
            failures.cup_power_of_two,
            format!("{pow2_count} contexts"),
        ));
        checks.push(Check::new(
            format!("cup bound matches closed form, {span}"),
            failures.cup_closed_form,
            format!("{closed_count} contexts"),
        ));
        checks.push(Check::new(
            format!("cup lower bound <= upper bound, {span}"),
            failures.cup_order,
            format!("{} contexts", grid.len()),
        ));
    }
    Ok((checks, rows))
}

fn describe_grid(grid: &[(u32, u32)]) -> String {
    let mut by_k: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for &(n, k) in grid {
        let e = by_k.entry(k).or_insert((n, n));
        e.0 = e.0.min(n);
        e.1 = e.1.max(n);
    }
    by_k.iter()
        .map(|(k, (lo, hi))| format!("k={k} n={lo}..{hi}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Compares [`Cohomology::reduce_in_degree`] with membership in the span of all `q * wbar_m`,
/// found by enumerating every GF(2) combination of those rows, for every polynomial of every
/// degree.
pub fn ideal_membership(contexts: &[(u32, u32)]) -> Result<Check> {
    const MAX_COLS: usize = 24;
    const MAX_ROWS: usize = 24;
    let mut failures = Vec::new();
    let mut polys = 0usize;
    for &(n, k) in contexts {
        let ctx = GrassmannContext::new(n, k)?;
        let coh = Cohomology::new(ctx);
        let vars = ctx.vars();
        let duals: Vec<Poly> = (0..=n)
            .map(|m| dual_class(k as usize, m))
            .collect::<Result<_>>()?;
        for j in 0..=ctx.dim() {
            let basis = enumerate_monomials(vars, j);
            let mask_of = |p: &Poly| {
                p.terms().iter().fold(0u32, |acc, t| {
                    acc ^ 1 << basis.binary_search(t).expect("term of degree j")
                })
            };
            let mut gens = Vec::new();
            for m in ctx.ideal_degrees().filter(|&m| m <= j) {
                for q in enumerate_monomials(vars, j - m) {
                    gens.push(mask_of(&duals[m as usize].mul_monomial(&q)));
                }
            }
            if basis.len() > MAX_COLS || gens.len() > MAX_ROWS {
                return Err(Error::Precondition(format!(
                    "G({n},{k}) degree {j} is too large for exhaustive enumeration"
                )));
            }
            let mut in_span = vec![false; 1 << basis.len()];
            let mut acc = 0u32;
            in_span[0] = true;
            // Gray-code walk over all subsets of the generator rows.
            for step in 1u32..(1 << gens.len()) {
                acc ^= gens[step.trailing_zeros() as usize];
                in_span[acc as usize] = true;
            }
            for mask in 0u32..(1 << basis.len()) {
                let p = Poly::from_terms(
                    vars,
                    (0..basis.len())
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| basis[b].clone()),
                )?;
                let zero = coh.reduce_in_degree(&p, j)?.is_zero();
                if zero != in_span[mask as usize] {
                    failures.push(format!("G({n},{k}) degree {j}: {p}"));
                }
                polys += 1;
            }
        }
    }
    Ok(Check::new(
        format!("ideal membership by exhaustive span, {contexts:?}"),
        failures,
        format!("{polys} polynomials"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn grids() {
        let g = charrank_grid(4);
        assert!(g.contains(&(16, 3)) && g.contains(&(16, 4)) && g.contains(&(16, 5)));
        assert!(!g.contains(&(17, 3)));
        assert_eq!(charrank_grid(6).iter().filter(|c| c.1 == 5).count(), 15);
        let c = cup_grid(6);
        assert!(c.contains(&(64, 3)) && !c.contains(&(40, 3)) && c.contains(&(32, 4)));
        assert_eq!(expected_g_zeros(100), vec![5, 13, 29, 61]);
    }

    #[test]
    fn small_suites_pass() {
        for check in g_zero_sets(128, 64).unwrap() {
            assert!(check.passed, "{check:?}");
        }
        for check in point_values().unwrap() {
            assert!(check.passed, "{check:?}");
        }
        assert!(frobenius(10, 1).unwrap().passed);
        let (checks, rows) = grid_checks(
            &[(8, 3), (13, 4)],
            Aspects::EVERYTHING,
            &SuiteOptions::default(),
        )
        .unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(rows[0].computed, CharrankValue::Exact(6));
        assert_eq!(rows[0].cup_upper, Some(5));
        assert_eq!(rows[1].computed, CharrankValue::Exact(11));
    }

    #[test]
    fn ideal_check_on_smallest_context() {
        let check = ideal_membership(&[(6, 3)]).unwrap();
        assert!(check.passed, "{check:?}");
    }
}
