//! Dual Stiefel-Whitney class polynomials and their reductions.
//!
//! `wbar_i` is the degree-`i` component of `(1 + w1 + ... + wk)^{-1}`, computed by the
//! recurrence `wbar_i = w1 wbar_{i-1} + w2 wbar_{i-2} + ... + wk wbar_{i-k}`. Setting a set of
//! variables to zero is a ring homomorphism, so the reduced classes (`g_i` with `w1 = 0`, and
//! further reductions) obey the same recurrence restricted to the surviving variables. A
//! [`DualTable`] with a non-empty kill set runs that restricted recurrence directly.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2poly::{Monomial, Poly, VarSpec};

pub const CACHE_FORMAT: &str = "charrank-duals";
pub const CACHE_VERSION: u32 = 1;

/// Memoized `wbar_0, wbar_1, ...` in `GF(2)[w1..wk]`, optionally with some variables set to zero.
#[derive(Clone, Debug)]
pub struct DualTable {
    vars: VarSpec,
    killed: Vec<usize>,
    surviving: Vec<Monomial>,
    entries: Vec<Poly>,
}

fn normalize_kill_set(vars: VarSpec, killed: &[usize]) -> Result<Vec<usize>> {
    let mut killed = killed.to_vec();
    killed.sort_unstable();
    killed.dedup();
    if let Some(&bad) = killed.iter().find(|&&i| i == 0 || i > vars.k()) {
        return Err(Error::VarOutOfRange {
            index: bad,
            k: vars.k(),
        });
    }
    Ok(killed)
}

impl DualTable {
    /// Table of the unreduced classes `wbar_i`.
    pub fn new(k: usize) -> Result<Self> {
        DualTable::reduced(k, &[])
    }

    /// Table of `wbar_i` with the variables in `killed` (1-based) set to zero.
    pub fn reduced(k: usize, killed: &[usize]) -> Result<Self> {
        let vars = VarSpec::new(k)?;
        let killed = normalize_kill_set(vars, killed)?;
        let surviving = (1..=k)
            .filter(|i| !killed.contains(i))
            .map(|i| Monomial::var(vars, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(DualTable {
            vars,
            killed,
            surviving,
            entries: vec![Poly::one(vars)],
        })
    }

    pub fn vars(&self) -> VarSpec {
        self.vars
    }

    pub fn k(&self) -> usize {
        self.vars.k()
    }

    pub fn killed(&self) -> &[usize] {
        &self.killed
    }

    pub fn computed_up_to(&self) -> u32 {
        (self.entries.len() - 1) as u32
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn extend_to(&mut self, i: u32) {
        let target = i as usize;
        if target >= self.entries.len() {
            log::debug!(
                "extending dual table k={} killed={:?} from {} to {}",
                self.k(),
                self.killed,
                self.computed_up_to(),
                i
            );
        }
        while self.entries.len() <= target {
            let next = self.recurrence(self.entries.len());
            self.entries.push(next);
        }
    }

    /// Entry `i` if already computed.
    pub fn get(&self, i: u32) -> Option<&Poly> {
        self.entries.get(i as usize)
    }

    /// Entry `i`, extending the table as needed.
    pub fn class(&mut self, i: u32) -> &Poly {
        self.extend_to(i);
        &self.entries[i as usize]
    }

    /// Right-hand side of the recurrence for degree `i >= 1` from the stored lower entries.
    fn recurrence(&self, i: usize) -> Poly {
        let mut acc = Poly::zero(self.vars);
        for var in &self.surviving {
            let w = var.degree() as usize;
            if w <= i {
                acc = &acc + &self.entries[i - w].mul_monomial(var);
            }
        }
        acc
    }

    /// Recomputes entry `i` (`1 <= i <= computed_up_to`) from the recurrence and compares.
    pub fn satisfies_recurrence(&self, i: u32) -> bool {
        let i = i as usize;
        i >= 1 && i < self.entries.len() && self.recurrence(i) == self.entries[i]
    }

    fn header(&self) -> String {
        let killed: Vec<String> = self.killed.iter().map(|i| i.to_string()).collect();
        let killed = if killed.is_empty() {
            "-".to_string()
        } else {
            killed.join(",")
        };
        format!(
            "{CACHE_FORMAT} v{CACHE_VERSION} k={} killed={} up_to={}",
            self.k(),
            killed,
            self.computed_up_to()
        )
    }

    /// Writes the header line and one canonical rendering per entry.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header())?;
        let mut line = String::new();
        for entry in &self.entries {
            line.clear();
            write!(line, "{entry}").expect("writing to a String");
            writeln!(out, "{line}")?;
        }
        out.flush()
    }

    /// Reads a table written by [`DualTable::write_to`] and checks that it is the requested one.
    /// Every entry is re-verified against the recurrence.
    pub fn read_from<R: BufRead>(
        input: R,
        k: usize,
        killed: &[usize],
        path: &Path,
    ) -> Result<Self> {
        let bad = |reason: String| Error::CacheFormat {
            path: path.to_path_buf(),
            reason,
        };
        let mut table = DualTable::reduced(k, killed)?;
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != CACHE_FORMAT {
            return Err(bad(format!("unrecognized header {header:?}")));
        }
        if fields[1] != format!("v{CACHE_VERSION}") {
            return Err(bad(format!(
                "format version {} is not v{CACHE_VERSION}",
                fields[1]
            )));
        }
        let expected = table.header();
        let expected: Vec<&str> = expected.split_whitespace().collect();
        if fields[2..4] != expected[2..4] {
            return Err(bad(format!(
                "table is for {} {}, wanted {} {}",
                fields[2], fields[3], expected[2], expected[3]
            )));
        }
        let up_to: u32 = fields[4]
            .strip_prefix("up_to=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("bad up_to field {:?}", fields[4])))?;
        let mut entries = Vec::with_capacity(up_to as usize + 1);
        for line in lines {
            let line = line?;
            let poly = Poly::parse(table.vars, &line).map_err(|e| bad(e.to_string()))?;
            entries.push(poly);
        }
        if entries.len() != up_to as usize + 1 {
            return Err(bad(format!(
                "header promises {} entries, found {}",
                up_to + 1,
                entries.len()
            )));
        }
        if entries[0] != Poly::one(table.vars) {
            return Err(bad("entry 0 is not 1".into()));
        }
        table.entries = entries;
        for i in 1..=up_to {
            if !table.satisfies_recurrence(i) {
                return Err(bad(format!("entry {i} violates the recurrence")));
            }
        }
        Ok(table)
    }
}

/// `wbar_i` in `GF(2)[w1..wk]`.
pub fn dual_class(k: usize, i: u32) -> Result<Poly> {
    let mut table = DualTable::new(k)?;
    Ok(table.class(i).clone())
}

/// `g_i`: `wbar_i` with `w1 = 0`. Needs `k >= 2`.
pub fn g(k: usize, i: u32) -> Result<Poly> {
    let mut table = g_table(k)?;
    Ok(table.class(i).clone())
}

/// Table of the classes `g_i`.
pub fn g_table(k: usize) -> Result<DualTable> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "g_i needs at least two variables (k={k})"
        )));
    }
    DualTable::reduced(k, &[1])
}

/// Degrees in `lo..=hi` at which the reduced class vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionScan {
    pub k: usize,
    pub killed: Vec<usize>,
    pub lo: u32,
    pub hi: u32,
    pub zero_degrees: Vec<u32>,
    /// Rendered reduced classes for every scanned degree, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<(u32, String)>>,
}

/// Scans the reduction of `wbar_i` modulo the variables in `killed` for `i` in `lo..=hi`.
pub fn scan_vanishing(
    k: usize,
    killed: &[usize],
    lo: u32,
    hi: u32,
    with_values: bool,
) -> Result<ReductionScan> {
    let mut table = DualTable::reduced(k, killed)?;
    scan_table(&mut table, lo, hi, with_values)
}

/// As [`scan_vanishing`], reusing (and extending) an existing table.
pub fn scan_table(
    table: &mut DualTable,
    lo: u32,
    hi: u32,
    with_values: bool,
) -> Result<ReductionScan> {
    if lo > hi {
        return Err(Error::Precondition(format!(
            "scan range {lo}..={hi} is empty"
        )));
    }
    table.extend_to(hi);
    let mut zero_degrees = Vec::new();
    let mut values = with_values.then(Vec::new);
    for i in lo..=hi {
        let class = table.get(i).expect("table extended");
        if class.is_zero() {
            zero_degrees.push(i);
        }
        if let Some(values) = values.as_mut() {
            values.push((i, class.to_string()));
        }
    }
    Ok(ReductionScan {
        k: table.k(),
        killed: table.killed().to_vec(),
        lo,
        hi,
        zero_degrees,
        values,
    })
}

/// Checks `g_i = sum_{m=2..k} wm^(2^s) g_{i - m 2^s}`, valid whenever `i >= 1 + k 2^s`.
pub fn verify_frobenius_recurrence(k: usize, i: u32, s: u32) -> Result<bool> {
    let mut table = g_table(k)?;
    frobenius_recurrence_holds(&mut table, i, s)
}

/// As [`verify_frobenius_recurrence`] with a caller-owned `g` table.
pub fn frobenius_recurrence_holds(table: &mut DualTable, i: u32, s: u32) -> Result<bool> {
    if table.killed() != [1] {
        return Err(Error::Precondition(
            "expected the table of g_i (w1 killed)".into(),
        ));
    }
    let k = table.k();
    let step = 1u32
        .checked_shl(s)
        .filter(|_| s < 31)
        .ok_or_else(|| Error::Precondition(format!("s={s} is too large")))?;
    let bound = (k as u64) * step as u64 + 1;
    if (i as u64) < bound {
        return Err(Error::Precondition(format!(
            "recurrence needs i >= 1 + k*2^s = {bound}, got i={i}"
        )));
    }
    table.extend_to(i);
    let vars = table.vars();
    let mut rhs = Poly::zero(vars);
    for m in 2..=k {
        let factor = Monomial::var(vars, m)?.pow(step);
        let lower = table.get(i - m as u32 * step).expect("extended");
        rhs = &rhs + &lower.mul_monomial(&factor);
    }
    Ok(table.get(i).expect("extended") == &rhs)
}
