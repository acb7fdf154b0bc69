use vdw_grating::lifshitz::{
    c3_lifshitz, c3_lifshitz_prepared, c3_one_oscillator, eps_imaginary_axis, static_response_g0,
    surface_response, tauc_lorentz_eps2, AtomModel, KramersKronig, LifshitzOptions,
    OneOscillatorAtom, SurfaceModel, TabulatedPolarizability, TaucLorentzParams,
};

fn sinx() -> TaucLorentzParams {
    TaucLorentzParams::new(2.29, 74.5, 7.17, 7.62).unwrap()
}

fn he() -> AtomModel {
    OneOscillatorAtom::new(0.0468, 1.18).unwrap().into()
}

fn ne() -> AtomModel {
    OneOscillatorAtom::new(0.0276, 2.04).unwrap().into()
}

#[test]
fn static_response_of_silicon_nitride() {
    let g0 = static_response_g0(&sinx(), &KramersKronig::default()).unwrap();
    println!("g0 = {g0}");
    assert!((g0 - 0.588).abs() < 0.005, "{g0}");
}

// Composite Simpson in E = E_a tan(x) on directly evaluated g(iω), without the
// cached ε(iξ) table or adaptive refinement.
fn simpson_oracle(alpha0: f64, ea: f64) -> f64 {
    let kk = KramersKronig::default();
    let surface = SurfaceModel::TaucLorentz(sinx());
    let n = 2000;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let f = |x: f64| {
        if x >= std::f64::consts::FRAC_PI_2 {
            return 0.0;
        }
        let t = x.tan();
        let e = ea * t;
        let alpha = alpha0 / (1.0 + t * t);
        alpha * surface_response(e, &surface, &kk).unwrap() * ea * (1.0 + t * t)
    };
    let mut sum = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0 * 1e3 / (4.0 * std::f64::consts::PI)
}

#[test]
fn metastable_rare_gas_coefficients() {
    let surface = SurfaceModel::TaucLorentz(sinx());
    let prepared = surface.prepare(&Default::default()).unwrap();
    for (atom, alpha0, ea) in [(he(), 0.0468, 1.18), (ne(), 0.0276, 2.04)] {
        let c3 = c3_lifshitz_prepared(&atom, &prepared, 1e-10).unwrap();
        let oracle = simpson_oracle(alpha0, ea);
        assert!(
            (c3.value - oracle).abs() < 1e-6 * oracle,
            "{} vs {oracle}",
            c3.value
        );
        assert!(c3.uncertainty < 1e-6 * c3.value);
    }
}

#[test]
fn linear_in_polarizability() {
    let surface = SurfaceModel::TaucLorentz(sinx());
    let prepared = surface.prepare(&Default::default()).unwrap();
    let base = c3_lifshitz_prepared(&he(), &prepared, 1e-12).unwrap().value;
    let double = c3_lifshitz_prepared(&he().scaled(2.0).unwrap(), &prepared, 1e-12)
        .unwrap()
        .value;
    assert!((double - 2.0 * base).abs() < 1e-9 * base);
}

#[test]
fn dense_table_matches_one_oscillator_closed_form() {
    let energies: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
    let alphas: Vec<f64> = energies
        .iter()
        .map(|e| 0.0468 / (1.0 + (e / 1.18).powi(2)))
        .collect();
    let table = TabulatedPolarizability::new(energies, alphas).unwrap();
    let surface = SurfaceModel::oscillator(0.588, 13.0).unwrap();
    let numeric = c3_lifshitz(&table.into(), &surface, &LifshitzOptions::default())
        .unwrap()
        .value;
    let closed = c3_one_oscillator(0.0468, 0.588, 1.18, 13.0).unwrap();
    assert!(
        ((numeric - closed) / closed).abs() < 1e-4,
        "{numeric} vs {closed}"
    );
}

#[test]
fn weak_absorber_has_vanishing_response() {
    let kk = KramersKronig::default();
    let weak = TaucLorentzParams::new(2.29, 1e-6, 7.17, 7.62).unwrap();
    assert!(static_response_g0(&weak, &kk).unwrap() < 1e-6);
    let mut prev = 0.0;
    for a in [10.0, 30.0, 60.0, 100.0, 150.0] {
        let p = TaucLorentzParams::new(2.29, a, 7.17, 7.62).unwrap();
        let g0 = static_response_g0(&p, &kk).unwrap();
        assert!(g0 > prev && g0 < 1.0);
        prev = g0;
    }
}

fn ratio(s: &str) -> num_rational::BigRational {
    // Decimal literal as an exact rational.
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: num_bigint::BigInt = format!("{int}{frac}").parse().unwrap();
    let scale = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    num_rational::BigRational::new(digits, scale)
}

#[test]
fn eps2_at_six_ev_matches_exact_arithmetic() {
    use num_traits::ToPrimitive;
    let (eg, a, e0, c, e) = (
        ratio("2.29"),
        ratio("74.5"),
        ratio("7.17"),
        ratio("7.62"),
        ratio("6.0"),
    );
    let gap = &e - &eg;
    let num = &a * &e0 * &c * &gap * &gap;
    let d = &e * &e - &e0 * &e0;
    let den = (&d * &d + &c * &c * &e * &e) * &e;
    let exact = (num / den).to_f64().unwrap();
    let got = tauc_lorentz_eps2(6.0, &sinx()).unwrap();
    assert!(((got - exact) / exact).abs() < 4e-16, "{got} vs {exact}");
}

// Trapezoid rule with 10⁶ panels in E = E_g + w tan u.
fn kk_trapezoid(xi: f64) -> f64 {
    let p = sinx();
    let n = 1_000_000;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let f = |u: f64| {
        if u >= std::f64::consts::FRAC_PI_2 {
            return 0.0;
        }
        let e = 2.29 + 10.0 * u.tan();
        let jac = 10.0 / (u.cos() * u.cos());
        e * tauc_lorentz_eps2(e, &p).unwrap() / (e * e + xi * xi) * jac
    };
    let mut s = 0.5 * (f(0.0) + f(std::f64::consts::FRAC_PI_2));
    for i in 1..n {
        s += f(i as f64 * h);
    }
    1.0 + 2.0 / std::f64::consts::PI * s * h
}

#[test]
fn kramers_kronig_matches_brute_force_trapezoid() {
    let kk = KramersKronig::default();
    for xi in [0.0, 1.0, 5.0, 20.0, 300.0] {
        let got = eps_imaginary_axis(xi, &sinx(), &kk).unwrap();
        let oracle = kk_trapezoid(xi);
        assert!(((got.value - oracle) / oracle).abs() < 1e-6, "xi = {xi}");
        assert!(got.error < 1e-8 * got.value);
    }
    let far = eps_imaginary_axis(1e6, &sinx(), &kk).unwrap().value;
    assert!(far - 1.0 < 1e-8 && far >= 1.0);
}
