use ncalc::algebra::{complex, quaternion};
use ncalc::calculus::{diff_poly_tensor, FiniteDiff, Monomial, NoncommPoly};
use ncalc::forms::{exterior_differential, random_polynomial_form, FormP};
use ncalc::integration::{integrate_along_path, Path};
use ncalc::multilinear::{alternate, symmetrize, PolyMap, Term};
use ncalc::sampling;
use ncalc::{Algebra64, Element64, SlotMap};
use proptest::prelude::*;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn quat() -> impl Strategy<Value = Element64> {
    coords(4).prop_map(|c| Element64::from_f64(&quaternion(), &c))
}

fn random_map(alg: &Algebra64, degree: usize, seed: u64) -> PolyMap<f64> {
    let mut rng = sampling::rng(seed);
    let terms = (0..3)
        .map(|_| {
            let mut t = Term::simple(sampling::random_elements(&mut rng, alg, degree + 1, 1.0));
            t.perm = ncalc::Permutation::new({
                let mut v: Vec<usize> = (0..degree).collect();
                v.rotate_left(rand::Rng::gen_range(&mut rng, 0..degree.max(1)));
                v
            })
            .unwrap();
            t
        })
        .collect();
    PolyMap::from_terms(alg, degree, terms).unwrap()
}

fn random_poly(alg: &Algebra64, max_deg: usize, seed: u64) -> NoncommPoly<f64> {
    let mut rng = sampling::rng(seed);
    let ms = (0..=max_deg)
        .map(|n| Monomial::new(sampling::random_elements(&mut rng, alg, n + 1, 1.0), vec![SlotMap::E; n]).unwrap())
        .collect();
    NoncommPoly::from_monomials(alg, ms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polylinear_in_each_argument(seed in any::<u64>(), a in quat(), b in quat(), c in quat(), s in -3.0f64..3.0) {
        let qa = quaternion::<f64>();
        let f = random_map(&qa, 2, seed);
        let lhs = f.apply(&[&a + &b.scale(s), c.clone()]).unwrap();
        let rhs = &f.apply(&[a.clone(), c.clone()]).unwrap() + &f.apply(&[b.clone(), c.clone()]).unwrap().scale(s);
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        let lhs = f.apply(&[c.clone(), &a + &b.scale(s)]).unwrap();
        let rhs = &f.apply(&[c.clone(), a]).unwrap() + &f.apply(&[c, b]).unwrap().scale(s);
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn alternation_is_idempotent(seed in any::<u64>(), args in prop::collection::vec(quat(), 3)) {
        let f = random_map(&quaternion(), 3, seed);
        let once = alternate(&f).unwrap();
        let twice = alternate(&once).unwrap();
        prop_assert!(once.apply(&args).unwrap().approx_eq(&twice.apply(&args).unwrap(), 1e-12));
        prop_assert!(once.is_skew());
        let sym = symmetrize(&f).unwrap();
        let swapped = [args[1].clone(), args[0].clone(), args[2].clone()];
        prop_assert!(sym.apply(&args).unwrap().approx_eq(&sym.apply(&swapped).unwrap(), 1e-12));
    }

    #[test]
    fn sum_and_product_rules(s1 in any::<u64>(), s2 in any::<u64>(), x in quat(), h in quat()) {
        let qa = quaternion::<f64>();
        let (p, q) = (random_poly(&qa, 3, s1), random_poly(&qa, 2, s2));
        let (dp, dq) = (diff_poly_tensor(&p).apply_at(&x, std::slice::from_ref(&h)).unwrap(), diff_poly_tensor(&q).apply_at(&x, std::slice::from_ref(&h)).unwrap());
        let dsum = diff_poly_tensor(&p.add(&q)).apply_at(&x, std::slice::from_ref(&h)).unwrap();
        prop_assert!(dsum.approx_eq(&(&dp + &dq), 1e-11));
        let dprod = diff_poly_tensor(&p.mul(&q)).apply_at(&x, std::slice::from_ref(&h)).unwrap();
        let want = &(&dp * &q.eval(&x).unwrap()) + &(&p.eval(&x).unwrap() * &dq);
        prop_assert!(dprod.approx_eq(&want, 1e-10 * want.coord_norm().max(1.0)));
    }

    #[test]
    fn chain_rule(s1 in any::<u64>(), s2 in any::<u64>(), x in quat(), h in quat()) {
        let qa = quaternion::<f64>();
        let (p, q) = (random_poly(&qa, 2, s1), random_poly(&qa, 2, s2));
        let inner = q.eval(&x).unwrap();
        let dq = diff_poly_tensor(&q).apply_at(&x, std::slice::from_ref(&h)).unwrap();
        let chain = diff_poly_tensor(&p).apply_at(&inner, &[dq]).unwrap();
        let numeric = FiniteDiff::default().gateaux(|y| p.eval(&q.eval(y).unwrap()).unwrap(), &x, &h).unwrap();
        prop_assert!(chain.approx_eq(&numeric, 1e-7 * chain.coord_norm().max(1.0)));
    }

    #[test]
    fn subdivision_additivity(seed in any::<u64>(), pts in prop::collection::vec(quat(), 4)) {
        let qa = quaternion::<f64>();
        let g = FormP::from_tensor_poly(random_polynomial_form(&mut sampling::rng(seed), &qa, 1, 2, 3).unwrap());
        let whole = integrate_along_path(&g, &Path::polyline(pts.clone()).unwrap(), 4).unwrap().value;
        let legs = pts.windows(2).fold(Element64::zero(&qa), |acc, w| {
            &acc + &integrate_along_path(&g, &Path::linear(&w[0], &w[1]).unwrap(), 4).unwrap().value
        });
        prop_assert!(whole.approx_eq(&legs, 1e-9));
    }

    #[test]
    fn collinear_waypoint_is_invisible(seed in any::<u64>(), a in quat(), b in quat(), s in 0.05f64..0.95) {
        let qa = quaternion::<f64>();
        let g = FormP::from_tensor_poly(random_polynomial_form(&mut sampling::rng(seed), &qa, 1, 2, 3).unwrap());
        let mid = &a + &(&b - &a).scale(s);
        let straight = integrate_along_path(&g, &Path::linear(&a, &b).unwrap(), 4).unwrap().value;
        let split = integrate_along_path(&g, &Path::polyline(vec![a, mid, b]).unwrap(), 4).unwrap().value;
        prop_assert!(straight.approx_eq(&split, 1e-10));
    }

    #[test]
    fn exact_forms_integrate_to_endpoint_difference(seed in any::<u64>(), a in quat(), w in prop::collection::vec(quat(), 2), b in quat()) {
        let qa = quaternion::<f64>();
        let f = random_poly(&qa, 3, seed);
        let path = Path::polyline(vec![a.clone(), w[0].clone(), w[1].clone(), b.clone()]).unwrap();
        let got = integrate_along_path(&FormP::differential_of(&f), &path, 4).unwrap().value;
        let want = &f.eval(&b).unwrap() - &f.eval(&a).unwrap();
        prop_assert!(got.approx_eq(&want, 1e-7 * want.coord_norm().max(1.0)));
    }

    #[test]
    fn exterior_differential_is_skew(seed in any::<u64>(), x in quat(), args in prop::collection::vec(quat(), 3)) {
        let qa = quaternion::<f64>();
        let w = FormP::from_tensor_poly(random_polynomial_form(&mut sampling::rng(seed), &qa, 2, 2, 3).unwrap());
        let d = exterior_differential(&w).unwrap();
        let v = d.eval(&x, &args).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let mut sw = args.clone();
            sw.swap(i, j);
            prop_assert!((&v + &d.eval(&x, &sw).unwrap()).coord_norm() < 1e-8);
        }
    }

    #[test]
    fn holomorphic_derivatives_are_complex_linear(c in coords(4), z in coords(2), h in coords(2)) {
        let alg = complex::<f64>();
        let (p, q) = (Element64::from_f64(&alg, &c[..2]), Element64::from_f64(&alg, &c[2..]));
        let f = move |x: &Element64| &(&p * &x.pow(3)) + &(&q * x);
        let d = ncalc::complexfield::decompose_derivative(f, &Element64::from_f64(&alg, &z), FiniteDiff::default()).unwrap();
        let (h, i) = (Element64::from_f64(&alg, &h), Element64::basis(&alg, 1));
        prop_assert!(d.apply(&(&i * &h)).approx_eq(&(&i * &d.apply(&h)), 1e-8));
    }
}
