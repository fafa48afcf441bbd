use proptest::prelude::*;

use qharness::measures::jacobi::{jacobi_from_recurrence, moments_from_jacobi};
use qharness::measures::quadrature::golub_welsch;
use qharness::process::{bipoisson_polys, finite_diff_generator, qh_transition_polys, TransitionSpec};
use qharness::verify::algebra_identities;
use qharness::{rat, Error, Polynomial, QHParams, Rational, RationalSeq, RealScalar};

const L: usize = 6;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn unit_interval() -> impl Strategy<Value = Rational> {
    (-6i64..=6).prop_map(|n| rat(n, 6))
}

/// Element with `deg X_n <= n + b`, `b <= 0`.
fn element(b: i64) -> impl Strategy<Value = RationalSeq> {
    prop::collection::vec(prop::collection::vec(small_rational(), L), L).prop_map(move |rows| {
        let coords = rows
            .into_iter()
            .enumerate()
            .map(|(n, row)| {
                let top = n as i64 + b;
                if top < 0 {
                    Polynomial::new(vec![])
                } else {
                    Polynomial::new(row.into_iter().take(top as usize + 1).collect())
                }
            })
            .collect();
        RationalSeq::from_coords(coords, b).unwrap()
    })
}

fn graded() -> impl Strategy<Value = RationalSeq> {
    (element(-1), prop::collection::vec((1i64..=5, prop::bool::ANY), L)).prop_map(|(low, leads)| {
        let coords = low
            .coords()
            .iter()
            .zip(leads)
            .enumerate()
            .map(|(n, (c, (l, neg)))| {
                let lead = if neg { rat(-l, 1) } else { rat(l, 1) };
                c + &Polynomial::monomial(lead, n)
            })
            .collect();
        RationalSeq::from_coords(coords, 0).unwrap()
    })
}

fn matrix(x: &RationalSeq) -> Vec<Vec<Rational>> {
    (0..L).map(|n| (0..L).map(|j| x.coord(n).unwrap().coeff(j)).collect()).collect()
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..L)
        .map(|i| {
            (0..L)
                .map(|j| (0..L).fold(rat(0, 1), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// Strips inadmissible draws: `x` outside the support makes some `sub[n]` negative.
macro_rules! admit {
    ($e:expr) => {
        match $e {
            Err(Error::Inadmissible(_)) => {
                prop_assume!(false);
                unreachable!()
            }
            r => r.unwrap(),
        }
    };
}

fn admissible() -> impl Strategy<Value = (QHParams<Rational>, Rational)> {
    (0i64..=4, 0i64..=4, 0i64..=4, 0i64..=5, 1i64..=6).prop_map(|(e, th, ta, q, t)| {
        let p = QHParams::new(rat(e, 4), rat(th, 4), rat(ta, 4), rat(q, 6)).unwrap();
        (p, rat(t, 2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_representation_reverses_order(p in element(0), q in element(0)) {
        let pq = p.mul(&q).unwrap();
        prop_assert_eq!(matrix(&pq), matmul(&matrix(&q), &matrix(&p)));
    }

    #[test]
    fn product_respects_bandwidth(p in element(0), q in element(-1)) {
        let pq = p.mul(&q).unwrap();
        for (k, c) in pq.coords().iter().enumerate() {
            prop_assert!(c.degree() <= k as i64 - 1);
        }
    }

    #[test]
    fn neumann_inverse_is_two_sided(x in element(-1)) {
        let inv = x.invert_neumann().unwrap();
        let w = &RationalSeq::e(L) + &x;
        let e = RationalSeq::e(L);
        prop_assert!(w.mul(&inv).unwrap().check_identity(&e, L).unwrap().exact_zero);
        prop_assert!(inv.mul(&w).unwrap().check_identity(&e, L).unwrap().exact_zero);
    }

    #[test]
    fn graded_inverse_is_two_sided(p in graded()) {
        let inv = p.invert_graded().unwrap();
        let e = RationalSeq::e(L);
        prop_assert!(p.mul(&inv).unwrap().check_identity(&e, L).unwrap().exact_zero);
        prop_assert!(inv.mul(&p).unwrap().check_identity(&e, L).unwrap().exact_zero);
    }

    #[test]
    fn algebra_identities_hold(beta in small_rational(), q in unit_interval()) {
        for c in algebra_identities(&beta, &q, 8).unwrap() {
            prop_assert!(c.report.exact_zero, "{}", c.name);
        }
    }

    #[test]
    fn fd_quotient_is_exact_below_degree_three((p, t) in admissible(), x in 0i64..=4, k in 1u32..=10) {
        let x = rat(x, 4);
        let h = rat(1, 1i64 << k);
        let y = Polynomial::monomial(rat(1, 1), 1);
        let y2 = Polynomial::monomial(rat(1, 1), 2);
        prop_assert_eq!(admit!(finite_diff_generator(&p, &t, &x, &y, &h)), rat(0, 1));
        prop_assert_eq!(admit!(finite_diff_generator(&p, &t, &x, &y2, &h)), rat(1, 1) + p.eta.clone() * x);
    }

    #[test]
    fn transition_first_two_moments((p, t) in admissible(), x in -4i64..=4, s in 0i64..=3) {
        let (x, s) = (rat(x, 4), rat(s, 4) * t.clone());
        let j = admit!(qh_transition_polys(&p, &x, &t, &s, 3));
        let m = moments_from_jacobi(&j, 2).unwrap();
        let dt = t.clone() - s.clone();
        prop_assert_eq!(&m[1], &x);
        let expect = x.clone() * x.clone() + p.eta.clone() * dt.clone() * x + dt;
        prop_assert_eq!(&m[2], &expect);
    }

    #[test]
    fn tau_zero_transition_is_bipoisson((p, t) in admissible(), x in -4i64..=4) {
        let p = QHParams::new(p.eta, p.theta, rat(0, 1), p.q).unwrap();
        let (x, s) = (rat(x, 4), t.clone() * rat(1, 3));
        let a = admit!(qh_transition_polys(&p, &x, &t, &s, 10));
        let b = bipoisson_polys(&p.eta, &p.theta, &p.q, &x, &t, &s, 10).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn time_change_to_bipoisson((p, t) in admissible(), x in -4i64..=4) {
        let spec = TransitionSpec::new(p.clone(), t.clone() * rat(1, 2), t, rat(x, 4)).unwrap();
        let (tt, s1, t1) = spec.bipoisson_equivalent().unwrap();
        let a = spec.jacobi(10).unwrap();
        let b = qharness::process::bipoisson_jacobi_raw(&p.eta, &tt, &p.q, &spec.x, &t1, &s1, 10);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gauss_rule_reproduces_moments((p, t) in admissible(), x in 0i64..=4) {
        let x = rat(x, 4);
        let j = jacobi_from_recurrence(&p, &t, &x, 12);
        prop_assume!(j.sub.iter().skip(1).all(|b| b > &rat(0, 1)));
        let exact = moments_from_jacobi(&j, 11).unwrap();
        let g = golub_welsch(&j.to_f64(), 6).unwrap();
        let (num, abs) = (g.moments(11), g.absolute_moments(11));
        for k in 0..=11 {
            prop_assert!((num[k] - exact[k].to_f64()).abs() <= 1e-10 * abs[k].max(1e-300), "k = {}", k);
        }
    }
}
