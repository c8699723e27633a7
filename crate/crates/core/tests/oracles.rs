//! Independent oracles: partition counting, the geometric series, multinomial parity, and the
//! Schubert basis with the mod-2 Pieri rule.

use std::collections::{BTreeMap, BTreeSet};

use charrank_core::gf2poly::{enumerate_monomials, Monomial, Poly, VarSpec};
use charrank_core::{dual_class, Cohomology, GrassmannContext};

/// Partitions of `j` into parts of size at most `k`.
fn partition_count(j: usize, k: usize) -> u64 {
    let mut ways = vec![0u64; j + 1];
    ways[0] = 1;
    for part in 1..=k {
        for total in part..=j {
            ways[total] += ways[total - part];
        }
    }
    ways[j]
}

#[test]
fn monomial_counts_match_partition_counts() {
    for k in 1..=6 {
        let vars = VarSpec::new(k).unwrap();
        for j in 0..=60 {
            let monomials = enumerate_monomials(vars, j);
            assert_eq!(
                monomials.len() as u64,
                partition_count(j as usize, k),
                "k={k} j={j}"
            );
            assert!(
                monomials.windows(2).all(|w| w[0] < w[1]),
                "order k={k} j={j}"
            );
            assert!(monomials
                .iter()
                .all(|m| m.degree() == j && m.recompute_degree() == j));
        }
    }
}

#[test]
fn dual_classes_match_geometric_series() {
    const TOP: u32 = 40;
    for k in 1..=5 {
        let vars = VarSpec::new(k).unwrap();
        let mut s = Poly::zero(vars);
        for i in 1..=k {
            s = &s + &Poly::var(vars, i).unwrap();
        }
        // 1 / (1 + s) = sum of s^m over GF(2), truncated at degree TOP.
        let mut series = Poly::one(vars);
        let mut power = Poly::one(vars);
        for _ in 1..=TOP {
            power = (&power * &s).truncate_degree(TOP);
            series = &series + &power;
        }
        for i in 0..=TOP {
            assert_eq!(
                dual_class(k, i).unwrap(),
                series.homogeneous_part(i),
                "k={k} i={i}"
            );
        }
    }
}

/// The coefficient of `w^e` in `wbar_i` is the multinomial `(sum e)! / prod e!` mod 2, which is
/// odd exactly when the exponents have no binary digit in common.
#[test]
fn dual_class_coefficients_are_multinomial_parities() {
    for k in 1..=6 {
        let vars = VarSpec::new(k).unwrap();
        for i in 0..=60 {
            let wbar = dual_class(k, i).unwrap();
            for m in enumerate_monomials(vars, i) {
                let mut seen = 0u32;
                let mut odd = true;
                for &e in m.exponents() {
                    odd &= seen & e == 0;
                    seen |= e;
                }
                assert_eq!(wbar.contains(&m), odd, "k={k} i={i} {m}");
            }
        }
    }
}

/// `H*(G_{n,k})` in the Schubert basis: partitions with at most `k` parts, each at most `n-k`.
/// `w_i` acts by adding vertical strips of `i` boxes (mod 2).
struct Schubert {
    k: usize,
    width: u32,
}

type Partition = Vec<u32>;
type Class = BTreeSet<Partition>;

impl Schubert {
    fn new(n: u32, k: u32) -> Self {
        Schubert {
            k: k as usize,
            width: n - k,
        }
    }

    fn partitions(&self, size: u32) -> Vec<Partition> {
        fn go(rows: usize, max: u32, left: u32, prefix: &mut Partition, out: &mut Vec<Partition>) {
            if rows == 0 {
                if left == 0 {
                    out.push(prefix.clone());
                }
                return;
            }
            for part in (0..=max.min(left)).rev() {
                prefix.push(part);
                go(rows - 1, part, left - part, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(self.k, self.width, size, &mut Vec::new(), &mut out);
        out
    }

    /// `w_i * sigma_lambda`: all ways to add one box to `i` distinct rows.
    fn pieri(&self, i: usize, lambda: &Partition, out: &mut Class) {
        for rows in 0u32..(1 << self.k) {
            if rows.count_ones() as usize != i {
                continue;
            }
            let mu: Partition = (0..self.k).map(|r| lambda[r] + (rows >> r & 1)).collect();
            let fits = mu[0] <= self.width && mu.windows(2).all(|w| w[0] >= w[1]);
            if fits && !out.remove(&mu) {
                out.insert(mu);
            }
        }
    }

    fn multiply(&self, i: usize, class: &Class) -> Class {
        let mut out = Class::new();
        for lambda in class {
            self.pieri(i, lambda, &mut out);
        }
        out
    }

    fn monomial(&self, m: &Monomial) -> Class {
        let mut class: Class = [vec![0; self.k]].into_iter().collect();
        for (idx, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                class = self.multiply(idx + 1, &class);
            }
        }
        class
    }
}

/// Rank of a set of GF(2) vectors given by their supports.
fn rank(rows: &[Class]) -> usize {
    let mut basis: BTreeMap<Partition, Class> = BTreeMap::new();
    for row in rows {
        let mut v = row.clone();
        while let Some(lead) = v.iter().next().cloned() {
            match basis.get(&lead) {
                Some(b) => v = v.symmetric_difference(b).cloned().collect(),
                None => {
                    basis.insert(lead, v);
                    break;
                }
            }
        }
    }
    basis.len()
}

fn in_span(rows: &[Class], v: &Class) -> bool {
    let mut with = rows.to_vec();
    with.push(v.clone());
    rank(&with) == rank(rows)
}

const CONTEXTS: [(u32, u32); 10] = [
    (4, 2),
    (6, 3),
    (7, 3),
    (8, 3),
    (9, 3),
    (8, 4),
    (9, 4),
    (10, 4),
    (10, 5),
    (11, 5),
];

#[test]
fn betti_numbers_and_w1_ranks_match_schubert_calculus() {
    for (n, k) in CONTEXTS {
        let coh = Cohomology::new(GrassmannContext::new(n, k).unwrap());
        let s = Schubert::new(n, k);
        let d = k * (n - k);
        for j in 0..=d {
            let cells = s.partitions(j);
            assert_eq!(coh.dim_h(j), cells.len(), "G({n},{k}) degree {j}");
            let images: Vec<Class> = cells
                .iter()
                .map(|l| s.multiply(1, &[l.clone()].into_iter().collect()))
                .collect();
            assert_eq!(
                coh.w1_rank(j),
                rank(&images),
                "G({n},{k}) w1 rank in degree {j}"
            );
        }
    }
}

#[test]
fn monomial_classes_match_schubert_calculus() {
    for (n, k) in CONTEXTS {
        let ctx = GrassmannContext::new(n, k).unwrap();
        let coh = Cohomology::new(ctx);
        let s = Schubert::new(n, k);
        for j in 0..=ctx.dim() {
            let w1_image: Vec<Class> = s
                .partitions(j.saturating_sub(1))
                .into_iter()
                .filter(|_| j > 0)
                .map(|l| s.multiply(1, &[l].into_iter().collect()))
                .collect();
            let (mut ours_rows, mut theirs_rows, mut stacked) = (vec![], vec![], vec![]);
            for m in enumerate_monomials(ctx.vars(), j) {
                let schubert = s.monomial(&m);
                let ours = coh
                    .reduce_to_quotient(&Poly::from_monomial(m.clone()))
                    .unwrap();
                assert_eq!(ours.is_zero(), schubert.is_empty(), "G({n},{k}) {m}");
                let survives = !schubert.is_empty() && !in_span(&w1_image, &schubert);
                assert_eq!(coh.monomial_survives_pstar(&m), survives, "G~({n},{k}) {m}");

                // Quotient coordinates tagged so they cannot collide with partitions.
                let ours: Class = ours
                    .coords
                    .iter_ones()
                    .map(|t| vec![u32::MAX, t as u32])
                    .collect();
                stacked.push(ours.union(&schubert).cloned().collect::<Class>());
                ours_rows.push(ours);
                theirs_rows.push(schubert);
            }
            // Same linear relations among the monomials on both sides.
            let r = rank(&ours_rows);
            assert_eq!(r, rank(&theirs_rows), "G({n},{k}) degree {j}");
            assert_eq!(r, rank(&stacked), "G({n},{k}) degree {j}");
        }
    }
}
