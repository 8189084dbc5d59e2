use std::sync::Arc;

use ncalc::algebra::{complex, quaternion};
use ncalc::calculus::{FiniteDiff, NoncommPoly, TensorPoly};
use ncalc::complexfield::{complex_form, conj, integrate_complex_form, ComplexFn};
use ncalc::demos::{two_leg_closed_form, worked_complex_form};
use ncalc::forms::{
    check_integrable, d_squared_residual, exterior_differential, exterior_differential_tensor, poincare_k,
    random_polynomial_form, wedge_forms, FormP, Verdict,
};
use ncalc::integration::{definite_integral, integrate_along_path, loop_integral, path_dependence_gap, Path};
use ncalc::parse::parse_tensor_poly;
use ncalc::{sampling, Algebra64, Element64, Error};

fn q(c: [f64; 4]) -> Element64 {
    Element64::from_f64(&quaternion(), &c)
}

fn form(src: &str, alg: &Algebra64) -> FormP<f64> {
    FormP::from_tensor_poly(parse_tensor_poly(src, alg).unwrap())
}

#[test]
fn exact_differential_over_arbitrary_path() {
    let qa = quaternion::<f64>();
    let g = FormP::differential_of(&NoncommPoly::power(&qa, 2));
    let (a, b) = (q([0.5, -1.0, 0.2, 0.0]), q([-0.3, 0.4, 1.0, 0.7]));
    let path = Path::polyline(vec![a.clone(), q([1.0, 1.0, -1.0, 0.5]), b.clone()]).unwrap();
    let got = integrate_along_path(&g, &path, 4).unwrap().value;
    assert!(got.approx_eq(&(&(&b * &b) - &(&a * &a)), 1e-8));
}

#[test]
fn definite_integrals() {
    let qa = quaternion::<f64>();
    let (a, b) = (q([0.1, 0.7, -0.4, 0.3]), q([-0.6, 0.2, 0.5, 1.0]));
    let sq = FormP::differential_of(&NoncommPoly::power(&qa, 2));
    let v = check_integrable(&sq, 8, 1).unwrap();
    let o = Element64::zero(&qa);
    assert!(definite_integral(&sq, &v, &o, &b).unwrap().approx_eq(&(&b * &b), 1e-12));

    let cube = form("1⊗x^2 + x⊗x + x^2⊗1", &qa);
    let v = check_integrable(&cube, 8, 1).unwrap();
    assert!(v.is_certified());
    assert!(definite_integral(&cube, &v, &a, &b).unwrap().approx_eq(&(&b.pow(3) - &a.pow(3)), 1e-8));
    assert!(definite_integral(&cube, &v, &a, &a).unwrap().is_zero());

    let bad = form("3⊗x^2", &qa);
    let refuted = check_integrable(&bad, 8, 1).unwrap();
    assert_eq!(definite_integral(&bad, &refuted, &a, &b), Err(Error::NotCertified));
}

#[test]
fn loops() {
    let qa = quaternion::<f64>();
    let d_cube = FormP::differential_of(&NoncommPoly::power(&qa, 3));
    let square = Path::polyline(vec![q([0.; 4]), q([1., 0., 0., 0.]), q([1., 1., 0., 0.]), q([0., 1., 0., 0.]), q([0.; 4])]).unwrap();
    assert!(loop_integral(&d_cube, &square).unwrap().coord_norm() < 1e-8);

    let g = form("3⊗x^2", &qa);
    let (i, j) = (Element64::basis(&qa, 1), Element64::basis(&qa, 2));
    let o = Element64::zero(&qa);
    let tri = Path::polyline(vec![o.clone(), i.clone(), j.clone(), o.clone()]).unwrap();
    let value = loop_integral(&g, &tri).unwrap();
    let gap = &two_leg_closed_form(&i, &j) - &j.pow(3);
    assert!(value.approx_eq(&gap, 1e-12), "{value} vs {gap}");
    assert!(value.coord_norm() > 0.1);

    let a = q([0.3, 0.1, 0.0, -0.2]);
    let degenerate = Path::polyline(vec![a.clone(), a]).unwrap();
    assert!(loop_integral(&g, &degenerate).unwrap().is_zero());
}

#[test]
fn certified_form_has_vanishing_loops() {
    let qa = quaternion::<f64>();
    let cube = form("1⊗x^2 + x⊗x + x^2⊗1", &qa);
    let mut rng = sampling::rng(11);
    for _ in 0..5 {
        let mut pts = sampling::random_elements(&mut rng, &qa, 4, 1.0);
        pts.push(pts[0].clone());
        assert!(loop_integral(&cube, &Path::polyline(pts).unwrap()).unwrap().coord_norm() < 1e-6);
    }
}

#[test]
fn gaps() {
    let qa = quaternion::<f64>();
    let (i, j) = (Element64::basis(&qa, 1), Element64::basis(&qa, 2));
    let gap = path_dependence_gap(&form("3⊗x^2", &qa), &i, &j).unwrap();
    assert!(gap.approx_eq(&(&two_leg_closed_form(&i, &j) - &j.pow(3)), 1e-7));
    let none = path_dependence_gap(&form("1⊗x^2 + x⊗x + x^2⊗1", &qa), &i, &j).unwrap();
    assert!(none.coord_norm() < 1e-8);
}

#[test]
fn wedge_with_constant_function_scales() {
    let qa = quaternion::<f64>();
    let c = Element64::scalar(&qa, 2.5);
    let f = FormP::from_tensor_poly(TensorPoly::simple(vec![NoncommPoly::constant(c)]).unwrap());
    let beta = form("x⊗1 + 1⊗x", &qa);
    let w = wedge_forms(&f, &beta).unwrap();
    let (x, a) = (q([0.2, 0.1, -0.3, 0.9]), q([1.0, -0.5, 0.3, 0.0]));
    let want = beta.eval(&x, std::slice::from_ref(&a)).unwrap().scale(2.5);
    assert!(w.eval(&x, &[a]).unwrap().approx_eq(&want, 1e-14));
}

#[test]
fn wedge_refuses_non_skew_values() {
    let qa = quaternion::<f64>();
    let not_skew = FormP::from_tensor_poly(parse_tensor_poly("1⊗1⊗x", &qa).unwrap());
    assert!(matches!(wedge_forms(&not_skew, &form("1⊗1", &qa)), Err(Error::NotSkew { .. })));
}

#[test]
fn two_form_differential_expansion() {
    let qa = quaternion::<f64>();
    let mut rng = sampling::rng(3);
    let tp = random_polynomial_form(&mut rng, &qa, 2, 2, 3).unwrap();
    let deriv = tp.derivative();
    let numeric = exterior_differential(&FormP::from_tensor_poly(tp.clone())).unwrap();
    let x = sampling::random_element(&mut rng, &qa, 1.0);
    let a = sampling::random_elements(&mut rng, &qa, 3, 1.0);
    let at = |i: usize, j: usize, k: usize| deriv.apply_at(&x, &[a[i].clone(), a[j].clone(), a[k].clone()]).unwrap();
    let expansion = &(&at(0, 1, 2) - &at(1, 0, 2)) + &at(2, 0, 1);
    assert!(exterior_differential_tensor(&tp).apply_at(&x, &a).unwrap().approx_eq(&expansion, 1e-13));
    assert!(numeric.eval(&x, &a).unwrap().approx_eq(&expansion, 1e-8));
}

#[test]
fn complex_worked_form_is_closed() {
    let c = complex::<f64>();
    let (a, b) = worked_complex_form();
    let w = complex_form(&c, &a, &b).unwrap();
    let d = exterior_differential(&w).unwrap();
    let mut rng = sampling::rng(8);
    for _ in 0..10 {
        let x = sampling::random_element(&mut rng, &c, 1.0);
        let args = sampling::random_elements(&mut rng, &c, 2, 1.0);
        assert!(d.eval(&x, &args).unwrap().coord_norm() < 1e-6);
    }
}

#[test]
fn second_differentials_vanish() {
    let qa = quaternion::<f64>();
    assert!(d_squared_residual(&form("x^2⊗1 + 1⊗x^2", &qa), 8, 2).unwrap() < 5e-5);
    assert!(d_squared_residual(&form("(1+2i)⊗(3k)", &qa), 8, 2).unwrap() < 1e-12);
}

#[test]
fn integrability_verdicts() {
    let qa = quaternion::<f64>();
    match check_integrable(&form("3⊗x^2", &qa), 8, 4).unwrap() {
        Verdict::Refuted { witness } => assert!(witness.residual > 1.0),
        v => panic!("{v:?}"),
    }
    let d = exterior_differential(&form("3⊗x^2", &qa)).unwrap();
    let (one, i, j) = (Element64::one(&qa), Element64::basis(&qa, 1), Element64::basis(&qa, 2));
    let want = &(&j * &(&i + &i)).scale(3.0) - &(&i * &(&j + &j)).scale(3.0);
    assert!(d.eval(&one, &[i, j]).unwrap().approx_eq(&want, 1e-7));
    assert!(want.coord_norm() > 1.0);
    assert!(check_integrable(&form("3⊗x^2", &complex()), 8, 4).unwrap().is_certified());
}

#[test]
fn poincare_examples() {
    let qa = quaternion::<f64>();
    let cube = form("1⊗x^2 + x⊗x + x^2⊗1", &qa);
    let k = poincare_k(&cube).unwrap();
    let dk = exterior_differential(&k).unwrap();
    let (x, a) = (q([0.4, -0.2, 0.8, 0.1]), q([0.3, 1.0, -0.6, 0.2]));
    assert!(k.eval_function(&x).unwrap().approx_eq(&x.pow(3), 1e-7));
    assert!(dk.eval(&x, std::slice::from_ref(&a)).unwrap().approx_eq(&cube.eval(&x, &[a]).unwrap(), 1e-6));

    let f = FormP::function(&qa, ncalc::forms::Smoothness::CInf, |x| x.pow(2));
    let z = poincare_k(&f).unwrap();
    assert_eq!(z.degree(), 0);
    assert!(z.eval_function(&x).unwrap().is_zero());
}

#[test]
fn conjugate_antiderivative() {
    let c = complex::<f64>();
    let a: ComplexFn<f64> = Arc::new(|x| Element64::zero(x.algebra()));
    let b: ComplexFn<f64> = Arc::new(|x| conj(x).scale(2.0));
    let f = integrate_complex_form(&c, &a, &b, 8, 1).unwrap();
    let z = Element64::from_f64(&c, &[0.6, 0.3]);
    assert!(f.eval_function(&z).unwrap().approx_eq(&conj(&z).pow(2), 1e-7));
    assert!(f.eval_function(&Element64::zero(&c)).unwrap().is_zero());
}

#[test]
fn worked_antiderivative_reproduces_coefficients() {
    let c = complex::<f64>();
    let (a, b) = worked_complex_form();
    let f = integrate_complex_form(&c, &a, &b, 8, 1).unwrap();
    let z = Element64::from_f64(&c, &[0.3, -0.7]);
    let d = ncalc::complexfield::decompose_derivative(|x| f.eval_function(x).unwrap(), &z, FiniteDiff::default()).unwrap();
    assert!(d.a.approx_eq(&a(&z), 1e-6) && d.b.approx_eq(&b(&z), 1e-6));
}

#[test]
fn second_derivative_of_z_zbar_squared_is_symmetric() {
    let c = complex::<f64>();
    let fd = FiniteDiff::with_step(1e-4);
    let f = |x: &Element64| x * &conj(x).pow(2);
    let z = Element64::from_f64(&c, &[0.5, 0.8]);
    let (h1, h2) = (Element64::from_f64(&c, &[0.3, -1.0]), Element64::from_f64(&c, &[1.2, 0.4]));
    let second = |u: &Element64, v: &Element64| fd.gateaux(|y| fd.gateaux(f, y, v).unwrap(), &z, u).unwrap();
    let (s12, s21) = (second(&h1, &h2), second(&h2, &h1));
    assert!(s12.approx_eq(&s21, 1e-5));
    let zb = conj(&z);
    let want = &(&zb * &(&(&h1 * &conj(&h2)) + &(&conj(&h1) * &h2))).scale(2.0) + &(&z * &(&conj(&h1) * &conj(&h2))).scale(2.0);
    assert!(s12.approx_eq(&want, 1e-5));
}

#[test]
fn single_precision_pipeline() {
    let qa = quaternion::<f32>();
    let g = FormP::from_tensor_poly(parse_tensor_poly("1⊗x^2 + x⊗x + x^2⊗1", &qa).unwrap());
    let x = ncalc::Element32::from_f64(&qa, &[0.3, -0.2, 0.5, 0.1]);
    let r = integrate_along_path(&g, &Path::linear(&ncalc::Element32::zero(&qa), &x).unwrap(), 4).unwrap();
    assert!(r.value.approx_eq(&x.pow(3), 1e-5));
}
