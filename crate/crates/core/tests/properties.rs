use charrank_core::duals::{g_table, DualTable};
use charrank_core::gf2poly::{enumerate_monomials, Monomial, Poly, VarSpec};
use charrank_core::{dual_class, g, Cohomology, GrassmannContext};
use proptest::prelude::*;

fn monomial(k: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..4, k).prop_map(|e| Monomial::from_exponents(&e).unwrap())
}

fn poly_in(k: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(monomial(k), 0..8)
        .prop_map(move |ms| Poly::from_terms(VarSpec::new(k).unwrap(), ms).unwrap())
}

fn three_polys() -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (1usize..=4).prop_flat_map(|k| (poly_in(k), poly_in(k), poly_in(k)))
}

fn kill_set(k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=k, 0..=k)
}

proptest! {
    #[test]
    fn addition_is_an_abelian_group_of_exponent_two((a, b, c) in three_polys()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a + &a).is_zero());
        prop_assert_eq!(&a + &Poly::zero(a.vars()), a.clone());
    }

    #[test]
    fn multiplication_is_commutative_associative_and_distributive((a, b, c) in three_polys()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Poly::one(a.vars()), a.clone());
    }

    #[test]
    fn squaring_is_additive((a, b, _) in three_polys()) {
        prop_assert_eq!((&a + &b).square(), &a.square() + &b.square());
        prop_assert_eq!(a.square(), &a * &a);
        prop_assert_eq!(a.pow(4), a.square().square());
    }

    #[test]
    fn homogeneous_products_add_degrees(k in 1usize..=4, j1 in 0u32..8, j2 in 0u32..8, s1 in any::<u64>(), s2 in any::<u64>()) {
        let vars = VarSpec::new(k).unwrap();
        let pick = |j: u32, seed: u64| {
            let basis = enumerate_monomials(vars, j);
            Poly::from_terms(vars, basis.into_iter().enumerate().filter(|(i, _)| seed >> (i % 64) & 1 == 1).map(|(_, m)| m)).unwrap()
        };
        let (a, b) = (pick(j1, s1), pick(j2, s2));
        let product = &a * &b;
        if !product.is_zero() {
            prop_assert_eq!(product.homogeneous_degree(), Some(j1 + j2));
        }
    }

    #[test]
    fn reductions_compose(a in (1usize..=5).prop_flat_map(|k| (poly_in(k), kill_set(k), kill_set(k)))) {
        let (p, x, y) = a;
        let both: Vec<usize> = x.iter().chain(&y).copied().collect();
        prop_assert_eq!(
            p.reduce_mod_vars(&x).unwrap().reduce_mod_vars(&y).unwrap(),
            p.reduce_mod_vars(&both).unwrap()
        );
    }

    #[test]
    fn rendering_round_trips(p in (1usize..=5).prop_flat_map(poly_in)) {
        let text = p.to_string();
        prop_assert_eq!(Poly::parse(p.vars(), &text).unwrap(), p);
    }

    /// The quotient map is linear and kills every multiple of a generator.
    #[test]
    fn quotient_map_is_linear(ctx_idx in 0usize..4, j in 0u32..16, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (n, k) = [(6, 3), (7, 3), (8, 4), (10, 5)][ctx_idx];
        let ctx = GrassmannContext::new(n, k).unwrap();
        let j = j.min(ctx.dim());
        let coh = Cohomology::new(ctx);
        let pick = |j: u32, seed: u64| {
            let basis = enumerate_monomials(ctx.vars(), j);
            Poly::from_terms(ctx.vars(), basis.into_iter().enumerate().filter(|(i, _)| seed >> (i % 64) & 1 == 1).map(|(_, m)| m)).unwrap()
        };
        let (a, b) = (pick(j, s1), pick(j, s2));
        let mut sum = coh.reduce_in_degree(&a, j).unwrap().coords;
        sum.xor_assign(&coh.reduce_in_degree(&b, j).unwrap().coords);
        prop_assert_eq!(coh.reduce_in_degree(&(&a + &b), j).unwrap().coords, sum);
        for (m, gen) in coh.generators() {
            if *m <= j {
                let multiple = &pick(j - m, s1 ^ s2) * gen;
                prop_assert!(coh.reduce_in_degree(&multiple, j).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn dual_classes_restrict_to_fewer_variables() {
    for k in 2..=6usize {
        for r in 1..k {
            let killed: Vec<usize> = (r + 1..=k).collect();
            for i in 0..=60 {
                let restricted = dual_class(k, i).unwrap().reduce_mod_vars(&killed).unwrap();
                assert_eq!(
                    restricted,
                    dual_class(r, i).unwrap().embed(k).unwrap(),
                    "k={k} r={r} i={i}"
                );
                if r >= 2 {
                    let restricted = g(k, i).unwrap().reduce_mod_vars(&killed).unwrap();
                    assert_eq!(
                        restricted,
                        g(r, i).unwrap().embed(k).unwrap(),
                        "g k={k} r={r} i={i}"
                    );
                }
            }
        }
    }
}

#[test]
fn reduced_tables_satisfy_their_recurrence() {
    for (k, killed) in [
        (3, vec![1]),
        (4, vec![1]),
        (5, vec![1]),
        (4, vec![1, 2, 3]),
        (5, vec![1, 2, 3]),
        (6, vec![]),
    ] {
        let mut t = DualTable::reduced(k, &killed).unwrap();
        t.extend_to(120);
        for i in 0..=120 {
            assert!(
                i == 0 || t.satisfies_recurrence(i),
                "k={k} killed={killed:?} i={i}"
            );
            let full = dual_class(k, i).unwrap().reduce_mod_vars(&killed).unwrap();
            assert_eq!(t.get(i).unwrap(), &full, "k={k} killed={killed:?} i={i}");
        }
    }
}

/// `h_(2^t-3) = w4^(2^(t-3)) h_(2^(t-1)-3) + w5^(2^(t-3)) h_(3*2^(t-3)-3)` at `k = 5`.
#[test]
fn h_recursion() {
    let mut h = DualTable::reduced(5, &[1, 2, 3]).unwrap();
    let vars = h.vars();
    for t in 4..=8u32 {
        let step = 1u32 << (t - 3);
        let w4 = Monomial::var(vars, 4).unwrap().pow(step);
        let w5 = Monomial::var(vars, 5).unwrap().pow(step);
        let rhs = &h.class((1 << (t - 1)) - 3).mul_monomial(&w4)
            + &h.class(3 * step - 3).mul_monomial(&w5);
        assert_eq!(h.class((1 << t) - 3).clone(), rhs, "t={t}");
        assert!(!rhs.is_zero(), "t={t}");
    }
}

#[test]
fn z_closed_form() {
    let mut z = DualTable::reduced(4, &[1, 2, 3]).unwrap();
    for t in 4..=10u32 {
        let want = Monomial::var(z.vars(), 4).unwrap().pow((1 << (t - 2)) - 1);
        assert_eq!(
            z.class((1 << t) - 4).clone(),
            Poly::from_monomial(want),
            "t={t}"
        );
    }
}

#[test]
fn g_satisfies_the_plain_recurrence() {
    for k in 2..=5usize {
        let mut t = g_table(k).unwrap();
        t.extend_to(200);
        let vars = t.vars();
        for i in 1..=200u32 {
            let mut rhs = Poly::zero(vars);
            for m in 2..=(k as u32).min(i) {
                rhs = &rhs
                    + &t.get(i - m)
                        .unwrap()
                        .mul_monomial(&Monomial::var(vars, m as usize).unwrap());
            }
            assert_eq!(t.get(i).unwrap(), &rhs, "k={k} i={i}");
        }
    }
}
