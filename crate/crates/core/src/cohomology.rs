//! Degree-wise linear algebra in `H*(G_{n,k}; Z2) = Z2[w1..wk] / (wbar_{n-k+1}, ..., wbar_n)`.
//!
//! Each degree `j` gets a [`DegreeSlice`]: the monomial basis of the free degree-`j` piece, the
//! reduced echelon form of the ideal's degree-`j` part, and the non-pivot monomials as a basis of
//! the quotient `H^j(G_{n,k})`. Multiplication by `w1` between consecutive slices gives, through
//! the Gysin sequence of the double cover `p: G~_{n,k} -> G_{n,k}`,
//!
//! ```text
//! dim H^j(G~) = dim coker(w1: H^{j-1} -> H^j) + dim ker(w1: H^j -> H^{j+1}),
//! ```
//!
//! and `p*` is onto in degree `j` exactly when that kernel vanishes.

use std::ops::RangeInclusive;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::duals::DualTable;
use crate::error::{Error, Result};
use crate::gf2poly::{enumerate_monomials, Monomial, Poly, VarSpec};
use crate::linalg::{BitVec, Echelon};

/// The pair `(n, k)` with `1 <= k <= n - k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GrassmannContext {
    n: u32,
    k: u32,
}

impl GrassmannContext {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k == 0 || k > n.saturating_sub(k) {
            return Err(Error::InvalidContext { n, k });
        }
        Ok(GrassmannContext { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Manifold dimension `k(n - k)`.
    pub fn dim(&self) -> u32 {
        self.k * (self.n - self.k)
    }

    /// Degrees of the ideal generators, `n-k+1 ..= n`.
    pub fn ideal_degrees(&self) -> RangeInclusive<u32> {
        self.n - self.k + 1..=self.n
    }

    pub fn vars(&self) -> VarSpec {
        VarSpec::new(self.k as usize).expect("k >= 1")
    }
}

/// One degree of the Borel presentation.
///
/// Slices are built in increasing degree. The degree-`j` part of the quotient is presented as
/// the span of the products `w_i * s`, with `s` a chosen representative of degree `j - i`, modulo
/// the relations `w_l * (w_i s) = w_i * (w_l s)` and, in generator degrees, `wbar_j`. Columns are
/// ordered like [`DegreeSlice::basis`], so the non-pivot monomials are the standard monomials of
/// the ideal and [`DegreeSlice::ideal_rows`] is the reduced echelon form of the whole ideal slice.
#[derive(Clone, Debug)]
pub struct DegreeSlice {
    j: u32,
    basis: Vec<Monomial>,
    quotient_picks: Vec<usize>,
    /// Coset of each basis monomial, in coordinates over `quotient_picks`.
    normal_forms: Vec<BitVec>,
}

impl DegreeSlice {
    fn empty(j: u32) -> Self {
        DegreeSlice {
            j,
            basis: Vec::new(),
            quotient_picks: Vec::new(),
            normal_forms: Vec::new(),
        }
    }

    /// `lower[t]` is the slice of degree `t` for every `t < j`; `duals[m]` is `wbar_m`.
    fn build(ctx: &GrassmannContext, j: u32, lower: &[&DegreeSlice], duals: &[Poly]) -> Self {
        let vars = ctx.vars();
        if j > ctx.dim() {
            return DegreeSlice::empty(j);
        }
        if j == 0 {
            return DegreeSlice {
                j,
                basis: vec![Monomial::one(vars)],
                quotient_picks: vec![0],
                normal_forms: vec![BitVec::unit(1, 0)],
            };
        }
        let k = ctx.k() as usize;
        // w[i] = w_i; index 0 is unused.
        let w: Vec<Monomial> = (0..=k)
            .map(|i| Monomial::var(vars, i.max(1)).expect("variable in range"))
            .collect();
        let basis = enumerate_monomials(vars, j);
        let index = |m: &Monomial| basis.binary_search(m).expect("monomial of degree j");

        // Columns: the products w_i * s.
        let mut col_of = vec![usize::MAX; basis.len()];
        for i in 1..=k.min(j as usize) {
            for s in lower[j as usize - i].quotient_basis() {
                col_of[index(&s.mul(&w[i]))] = 0;
            }
        }
        let cols: Vec<usize> = (0..basis.len()).filter(|&c| col_of[c] == 0).collect();
        for (pos, &c) in cols.iter().enumerate() {
            col_of[c] = pos;
        }
        let ncols = cols.len();
        // Adds `w_i * x` to `row`, where `x` is a class of degree `j - i`.
        let add_multiple = |row: &mut BitVec, i: usize, x: &BitVec| {
            let src = lower[j as usize - i];
            for t in x.iter_ones() {
                row.flip(col_of[index(&src.basis[src.quotient_picks[t]].mul(&w[i]))]);
            }
        };

        let mut rows = Vec::new();
        for i in 1..=k {
            for l in i + 1..=k {
                if i + l > j as usize {
                    continue;
                }
                let deg_x = j as usize - l;
                let deg_y = j as usize - i;
                for s in lower[j as usize - i - l].quotient_basis() {
                    let (sx, sy) = (lower[deg_x], lower[deg_y]);
                    let xc = sx.basis_index(&s.mul(&w[i])).expect("degree j - l");
                    let yc = sy.basis_index(&s.mul(&w[l])).expect("degree j - i");
                    if sx.is_pick(xc) && sy.is_pick(yc) {
                        continue;
                    }
                    let mut row = BitVec::zeros(ncols);
                    add_multiple(&mut row, l, &sx.normal_forms[xc]);
                    add_multiple(&mut row, i, &sy.normal_forms[yc]);
                    if !row.is_zero() {
                        rows.push(row);
                    }
                }
            }
        }
        if ctx.ideal_degrees().contains(&j) {
            // wbar_j = sum_i w_i * wbar_{j-i}
            let mut row = BitVec::zeros(ncols);
            for i in 1..=k.min(j as usize) {
                let m = j as usize - i;
                add_multiple(&mut row, i, &lower[m].class_of_terms(&duals[m]));
            }
            rows.push(row);
        }

        let ideal = Echelon::new(rows, ncols);
        let local_picks = ideal.non_pivot_cols();
        let mut pick_of_col = vec![None; ncols];
        for (t, &c) in local_picks.iter().enumerate() {
            pick_of_col[c] = Some(t);
        }
        let dim = local_picks.len();
        let col_forms: Vec<BitVec> = (0..ncols)
            .map(|c| match pick_of_col[c] {
                Some(t) => BitVec::unit(dim, t),
                None => {
                    let row = ideal.pivot_row(c).expect("pivot column has a row");
                    BitVec::from_ones(dim, row.iter_ones().filter_map(|c2| pick_of_col[c2]))
                }
            })
            .collect();
        let normal_forms = basis
            .iter()
            .enumerate()
            .map(|(c, m)| {
                if col_of[c] != usize::MAX {
                    return col_forms[col_of[c]].clone();
                }
                let i = (1..=k)
                    .find(|&i| m.exponent(i) > 0)
                    .expect("positive degree");
                let parent = m.div_var(i).expect("w_i divides m");
                let src = lower[j as usize - i];
                let mut v = BitVec::zeros(dim);
                for t in src
                    .class_of_monomial(&parent)
                    .expect("parent in basis")
                    .iter_ones()
                {
                    let prod = src.basis[src.quotient_picks[t]].mul(&w[i]);
                    v.xor_assign(&col_forms[col_of[index(&prod)]]);
                }
                v
            })
            .collect();
        let quotient_picks = local_picks.into_iter().map(|c| cols[c]).collect();

        DegreeSlice {
            j,
            basis,
            quotient_picks,
            normal_forms,
        }
    }

    fn is_pick(&self, c: usize) -> bool {
        self.quotient_picks.binary_search(&c).is_ok()
    }

    pub fn degree(&self) -> u32 {
        self.j
    }

    /// All monomials of degree `j`, in the crate monomial order.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// Reduced echelon form of the ideal's degree-`j` part, over [`DegreeSlice::basis`].
    ///
    /// Assembled from the normal forms: one row `m + NF(m)` per non-chosen monomial `m`.
    pub fn ideal_rows(&self) -> Echelon {
        let rows = (0..self.basis.len())
            .filter(|&c| !self.is_pick(c))
            .map(|c| {
                let mut row = BitVec::unit(self.basis.len(), c);
                for t in self.normal_forms[c].iter_ones() {
                    row.flip(self.quotient_picks[t]);
                }
                row
            })
            .collect();
        Echelon::new(rows, self.basis.len())
    }

    /// Indices into the basis of the monomials chosen as coset representatives.
    pub fn quotient_picks(&self) -> &[usize] {
        &self.quotient_picks
    }

    pub fn quotient_basis(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.quotient_picks.iter().map(|&c| &self.basis[c])
    }

    /// `dim H^j(G_{n,k})`.
    pub fn dim_h(&self) -> usize {
        self.quotient_picks.len()
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.basis.binary_search(m).ok()
    }

    /// Coset of a degree-`j` monomial in quotient coordinates.
    pub fn class_of_monomial(&self, m: &Monomial) -> Option<&BitVec> {
        self.basis_index(m).map(|c| &self.normal_forms[c])
    }

    /// Coset of a polynomial whose terms all have degree `j`.
    fn class_of_terms(&self, p: &Poly) -> BitVec {
        let mut v = BitVec::zeros(self.dim_h());
        for t in p.terms() {
            if let Some(nf) = self.class_of_monomial(t) {
                v.xor_assign(nf);
            }
        }
        v
    }
}

/// Reduced echelon form of the ideal's degree-`j` part computed directly from the rows
/// `q * wbar_m` (`q` a monomial of degree `j - m`).
///
/// Much slower than [`DegreeSlice::ideal_rows`]; kept as an independent reference.
pub fn direct_ideal_slice(ctx: &GrassmannContext, j: u32, generators: &[(u32, Poly)]) -> Echelon {
    let vars = ctx.vars();
    let basis = enumerate_monomials(vars, j);
    let ncols = basis.len();
    let column = |m: &Monomial| {
        basis
            .binary_search(m)
            .expect("term of degree j is in basis")
    };
    let mut rows = Vec::new();
    for (m, gen) in generators.iter().filter(|(m, _)| *m <= j) {
        for q in enumerate_monomials(vars, j - m) {
            rows.push(BitVec::from_ones(
                ncols,
                gen.terms().iter().map(|t| column(&t.mul(&q))),
            ));
        }
    }
    Echelon::new(rows, ncols)
}

/// A cohomology class of `G_{n,k}` in the quotient coordinates of its degree slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVector {
    pub degree: u32,
    pub coords: BitVec,
}

impl ClassVector {
    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

/// Matrix of `w1: H^j -> H^{j+1}`; row `r` is the image of the `r`-th quotient basis element.
#[derive(Clone, Debug)]
pub struct W1Operator {
    pub j: u32,
    pub rows: Vec<BitVec>,
    pub target_dim: usize,
    pub rank: usize,
}

impl W1Operator {
    pub fn kernel_dim(&self) -> usize {
        self.rows.len() - self.rank
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GysinRow {
    pub j: u32,
    /// `dim H^j(G_{n,k})`
    pub dim_g: usize,
    /// rank of `w1: H^j -> H^{j+1}`
    pub w1_rank: usize,
    pub ker: usize,
    pub coker: usize,
    /// `dim H^j(G~_{n,k})`
    pub dim_oriented: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GysinReport {
    pub context: GrassmannContext,
    pub rows: Vec<GysinRow>,
    /// Smallest positive degree with nonzero cohomology of `G~_{n,k}`, or `d + 1`.
    pub r_oriented: u32,
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl GysinReport {
    pub fn betti_g(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim_g).collect()
    }

    pub fn betti_oriented(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim_oriented).collect()
    }

    pub fn total_dim_g(&self) -> usize {
        self.rows.iter().map(|r| r.dim_g).sum()
    }

    pub fn total_dim_oriented(&self) -> usize {
        self.rows.iter().map(|r| r.dim_oriented).sum()
    }

    /// Checks the structural identities every report must satisfy; returns the violated ones.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ctx = self.context;
        let expected = binomial(ctx.n(), ctx.k());
        if self.total_dim_g() as u128 != expected {
            out.push(format!(
                "total dim H*(G) = {} but C({}, {}) = {expected}",
                self.total_dim_g(),
                ctx.n(),
                ctx.k()
            ));
        }
        let g = self.betti_g();
        let o = self.betti_oriented();
        let rev = |v: &[usize]| v.iter().rev().copied().collect::<Vec<_>>();
        if g != rev(&g) {
            out.push("Betti numbers of G are not Poincare-symmetric".into());
        }
        if o != rev(&o) {
            out.push("Betti numbers of G~ are not Poincare-symmetric".into());
        }
        let mut prev_rank = 0;
        for r in &self.rows {
            if r.ker != r.dim_g - r.w1_rank
                || r.coker != r.dim_g - prev_rank
                || r.dim_oriented != r.ker + r.coker
            {
                out.push(format!("degree {}: row is not Gysin-exact", r.j));
            }
            prev_rank = r.w1_rank;
        }
        out
    }
}

/// Lazily computed degree slices of `H*(G_{n,k})` plus derived maps.
///
/// Slices and images are computed at most once and shared; all methods take `&self` and may be
/// called from several threads.
pub struct Cohomology {
    ctx: GrassmannContext,
    generators: Vec<(u32, Poly)>,
    /// `wbar_0 ..= wbar_n`
    duals: Vec<Poly>,
    slices: Vec<OnceLock<DegreeSlice>>,
    w1_ops: Vec<OnceLock<W1Operator>>,
    w1_images: Vec<OnceLock<Echelon>>,
}

impl Cohomology {
    pub fn new(ctx: GrassmannContext) -> Self {
        let mut table = DualTable::new(ctx.k() as usize).expect("k >= 1");
        table.extend_to(ctx.n());
        Cohomology::with_duals(ctx, &table).expect("table matches context")
    }

    /// Uses precomputed `wbar_i` (e.g. from the cache); the table must cover degree `n`.
    pub fn with_duals(ctx: GrassmannContext, table: &DualTable) -> Result<Self> {
        if table.k() != ctx.k() as usize || !table.killed().is_empty() {
            return Err(Error::Precondition(format!(
                "dual table (k={}, killed={:?}) does not match k={}",
                table.k(),
                table.killed(),
                ctx.k()
            )));
        }
        let duals = (0..=ctx.n())
            .map(|m| {
                table
                    .get(m)
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("dual table lacks degree {m}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let generators = ctx
            .ideal_degrees()
            .map(|m| (m, duals[m as usize].clone()))
            .collect();
        let slots = ctx.dim() as usize + 2;
        Ok(Cohomology {
            ctx,
            generators,
            duals,
            slices: (0..slots).map(|_| OnceLock::new()).collect(),
            w1_ops: (0..slots).map(|_| OnceLock::new()).collect(),
            w1_images: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn context(&self) -> GrassmannContext {
        self.ctx
    }

    /// Ideal generators `wbar_m`, `m = n-k+1..=n`.
    pub fn generators(&self) -> &[(u32, Poly)] {
        &self.generators
    }

    /// Slice for any degree; degrees above `d` give the zero space.
    fn slice(&self, j: u32) -> &DegreeSlice {
        let idx = (j as usize).min(self.slices.len() - 1);
        if let Some(s) = self.slices[idx].get() {
            return s;
        }
        let mut lower: Vec<&DegreeSlice> = Vec::with_capacity(idx + 1);
        for t in 0..=idx {
            let s = self.slices[t].get_or_init(|| {
                log::trace!("slice n={} k={} j={}", self.ctx.n(), self.ctx.k(), t);
                DegreeSlice::build(&self.ctx, t as u32, &lower, &self.duals)
            });
            lower.push(s);
        }
        lower[idx]
    }

    pub fn degree_slice(&self, j: u32) -> Result<&DegreeSlice> {
        if j > self.ctx.dim() {
            return Err(Error::DegreeOutOfRange {
                j,
                max: self.ctx.dim(),
            });
        }
        Ok(self.slice(j))
    }

    /// `dim H^j(G_{n,k})`, zero above the top degree.
    pub fn dim_h(&self, j: u32) -> usize {
        self.slice(j).dim_h()
    }

    fn check_ring(&self, p: &Poly) -> Result<()> {
        if p.vars() != self.ctx.vars() {
            return Err(Error::VarMismatch {
                left: self.ctx.k() as usize,
                right: p.vars().k(),
            });
        }
        Ok(())
    }

    /// Coordinates of a homogeneous polynomial in `H^j(G_{n,k})`, `j` its degree.
    ///
    /// The zero polynomial reduces to the zero vector of `H^0`. Degrees above `d` give an empty
    /// vector.
    pub fn reduce_to_quotient(&self, p: &Poly) -> Result<ClassVector> {
        self.check_ring(p)?;
        if p.is_zero() {
            return Ok(ClassVector {
                degree: 0,
                coords: BitVec::zeros(self.dim_h(0)),
            });
        }
        let j = p.homogeneous_degree().ok_or(Error::Inhomogeneous)?;
        Ok(ClassVector {
            degree: j,
            coords: self.slice(j).class_of_terms(p),
        })
    }

    /// As [`Cohomology::reduce_to_quotient`] with the degree given explicitly.
    pub fn reduce_in_degree(&self, p: &Poly, j: u32) -> Result<ClassVector> {
        self.check_ring(p)?;
        if !p.is_homogeneous_of(j) {
            return Err(Error::NotHomogeneous { expected: j });
        }
        Ok(ClassVector {
            degree: j,
            coords: self.slice(j).class_of_terms(p),
        })
    }

    fn operator(&self, j: u32) -> &W1Operator {
        let idx = (j as usize).min(self.w1_ops.len() - 1);
        self.w1_ops[idx].get_or_init(|| {
            let source = self.slice(j);
            let target = self.slice(j + 1);
            let w1 = Monomial::var(self.ctx.vars(), 1).expect("k >= 1");
            let rows: Vec<BitVec> = if target.dim_h() == 0 {
                (0..source.dim_h()).map(|_| BitVec::zeros(0)).collect()
            } else {
                source
                    .quotient_basis()
                    .map(|m| {
                        target
                            .class_of_monomial(&m.mul(&w1))
                            .expect("w1 * basis monomial has degree j+1")
                            .clone()
                    })
                    .collect()
            };
            let rank = crate::linalg::rank(rows.clone(), target.dim_h());
            W1Operator {
                j,
                rows,
                target_dim: target.dim_h(),
                rank,
            }
        })
    }

    /// Multiplication by `w1` from `H^j` to `H^{j+1}`, `0 <= j < d`.
    pub fn w1_operator(&self, j: u32) -> Result<&W1Operator> {
        if j >= self.ctx.dim() {
            return Err(Error::DegreeOutOfRange {
                j,
                max: self.ctx.dim().saturating_sub(1),
            });
        }
        Ok(self.operator(j))
    }

    /// Rank of `w1: H^j -> H^{j+1}`; zero for `j >= d`.
    pub fn w1_rank(&self, j: u32) -> usize {
        if j >= self.ctx.dim() {
            0
        } else {
            self.operator(j).rank
        }
    }

    /// `dim ker(w1: H^j -> H^{j+1})`.
    pub fn w1_kernel_dim(&self, j: u32) -> usize {
        self.dim_h(j) - self.w1_rank(j)
    }

    /// `dim H^j(G~_{n,k})` from the Gysin sequence.
    pub fn dim_oriented(&self, j: u32) -> usize {
        let coker = self.dim_h(j) - if j == 0 { 0 } else { self.w1_rank(j - 1) };
        self.w1_kernel_dim(j) + coker
    }

    /// Smallest positive degree with `H^j(G~) != 0`, or `d + 1`.
    pub fn r_oriented(&self) -> u32 {
        let d = self.ctx.dim();
        (1..=d).find(|&j| self.dim_oriented(j) > 0).unwrap_or(d + 1)
    }

    /// Image of `w1: H^{j-1} -> H^j` as an echelon form in `H^j` coordinates.
    fn w1_image(&self, j: u32) -> &Echelon {
        let idx = (j as usize).min(self.w1_images.len() - 1);
        self.w1_images[idx].get_or_init(|| {
            let dim = self.dim_h(j);
            if j == 0 || j > self.ctx.dim() {
                return Echelon::new(Vec::new(), dim);
            }
            Echelon::new(self.operator(j - 1).rows.clone(), dim)
        })
    }

    /// True iff the class of `p` in `H^j(G)` is not a multiple of `w1`, i.e. `p*` of it is
    /// nonzero in `H^j(G~)`.
    pub fn pstar_nonzero(&self, p: &Poly) -> Result<bool> {
        let class = self.reduce_to_quotient(p)?;
        if p.is_zero() {
            return Ok(false);
        }
        Ok(self.class_survives_pstar(&class))
    }

    pub fn class_survives_pstar(&self, class: &ClassVector) -> bool {
        if class.is_zero() {
            return false;
        }
        let mut v = class.coords.clone();
        self.w1_image(class.degree).reduce(&mut v);
        !v.is_zero()
    }

    /// `p*` of a single monomial is nonzero.
    pub fn monomial_survives_pstar(&self, m: &Monomial) -> bool {
        match self.slice(m.degree()).class_of_monomial(m) {
            Some(v) => self.class_survives_pstar(&ClassVector {
                degree: m.degree(),
                coords: v.clone(),
            }),
            None => false,
        }
    }

    /// True iff every degree-`d` monomial in `w1..wk` dies under `p*`.
    pub fn top_monomials_die(&self) -> bool {
        let d = self.ctx.dim();
        enumerate_monomials(self.ctx.vars(), d)
            .iter()
            .all(|m| !self.monomial_survives_pstar(m))
    }

    /// Computes every slice and `w1` rank and assembles the Gysin table.
    pub fn gysin_report(&self) -> GysinReport {
        let d = self.ctx.dim();
        self.slice(d);
        (0..d).into_par_iter().for_each(|j| {
            self.operator(j);
        });
        let mut rows = Vec::with_capacity(d as usize + 1);
        let mut prev_rank = 0;
        for j in 0..=d {
            let dim_g = self.dim_h(j);
            let w1_rank = self.w1_rank(j);
            let ker = dim_g - w1_rank;
            let coker = dim_g - prev_rank;
            rows.push(GysinRow {
                j,
                dim_g,
                w1_rank,
                ker,
                coker,
                dim_oriented: ker + coker,
            });
            prev_rank = w1_rank;
        }
        let r_oriented = rows
            .iter()
            .skip(1)
            .find(|r| r.dim_oriented > 0)
            .map_or(d + 1, |r| r.j);
        GysinReport {
            context: self.ctx,
            rows,
            r_oriented,
        }
    }
}

/// One-shot helper for [`Cohomology::gysin_report`].
pub fn gysin_report(ctx: GrassmannContext) -> GysinReport {
    Cohomology::new(ctx).gysin_report()
}
