//! Interior stress law S(D) and wall law s(u).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Symmetric 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Sym2 {
    pub fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Self { xx, yy, xy }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 1.0, 0.0)
    }

    /// Frobenius product D:E.
    pub fn dot(&self, o: &Sym2) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn scale(&self, a: f64) -> Sym2 {
        Sym2::new(a * self.xx, a * self.yy, a * self.xy)
    }

    pub fn add(&self, o: &Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.yy + o.yy, self.xy + o.xy)
    }

    /// Orthonormal coordinates (xx, yy, √2·xy).
    fn to_vec(self) -> [f64; 3] {
        [self.xx, self.yy, std::f64::consts::SQRT_2 * self.xy]
    }

    fn from_vec(z: &[f64]) -> Sym2 {
        Sym2::new(z[0], z[1], z[2] / std::f64::consts::SQRT_2)
    }
}

/// Rational saturating response a·x + b·x/(1+|x|²) shared by both shipped nonlinear laws.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Rational {
    a: f64,
    b: f64,
}

impl Rational {
    /// Scalar factor multiplying x.
    fn factor(&self, r2: f64) -> f64 {
        self.a + self.b / (1.0 + r2)
    }

    /// d factor / d r².
    fn factor_prime(&self, r2: f64) -> f64 {
        -self.b / (1.0 + r2).powi(2)
    }

    /// Exact (inf of derivative eigenvalues, sup of |F(x)|/|x|).
    fn bounds(&self) -> (f64, f64) {
        // Tangential eigenvalue a + b/(1+r²) spans [a, a+b]; the radial one
        // a + b(1−r²)/(1+r²)² spans [a − b/8, a + b] (extremum at r² = 3).
        let lo = if self.b >= 0.0 { self.a - self.b / 8.0 } else { self.a + self.b };
        let hi = self.a.max(self.a + self.b);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StressKind {
    /// S = 2νD.
    Linear { nu: f64 },
    /// S = ν(|D|²)D with ν(r) = ν_∞ + (ν₀ − ν_∞)/(1 + r).
    ShearDependent { nu_inf: f64, nu_0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressLaw {
    pub kind: StressKind,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl StressLaw {
    pub fn linear(nu: f64) -> Self {
        Self { kind: StressKind::Linear { nu }, c1: 2.0 * nu, c2: 2.0 * nu, c3: 2.0 * nu }
    }

    /// Shear-dependent law with its exact structural constants.
    pub fn shear_dependent(nu_inf: f64, nu_0: f64) -> Self {
        let (lo, hi) = Rational { a: nu_inf, b: nu_0 - nu_inf }.bounds();
        Self { kind: StressKind::ShearDependent { nu_inf, nu_0 }, c1: lo, c2: hi, c3: lo }
    }

    pub fn with_constants(mut self, c1: f64, c2: f64, c3: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.c3 = c3;
        self
    }

    fn rational(&self) -> Rational {
        match self.kind {
            StressKind::Linear { nu } => Rational { a: 2.0 * nu, b: 0.0 },
            StressKind::ShearDependent { nu_inf, nu_0 } => Rational { a: nu_inf, b: nu_0 - nu_inf },
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, StressKind::Linear { .. })
    }

    /// Viscosity bounds of ν(·) (for the linear law both equal 2ν).
    pub fn nu_min(&self) -> f64 {
        let r = self.rational();
        r.a.min(r.a + r.b)
    }

    pub fn nu_max(&self) -> f64 {
        let r = self.rational();
        r.a.max(r.a + r.b)
    }

    /// Viscosity ν_imp of the linear part 2ν_imp·D treated implicitly by the solver.
    pub fn implicit_nu(&self) -> f64 {
        match self.kind {
            StressKind::Linear { nu } => nu,
            StressKind::ShearDependent { .. } => 0.5 * self.nu_max(),
        }
    }

    /// ∂S/∂D at D applied to E.
    pub fn jacobian_apply(&self, d: &Sym2, e: &Sym2) -> Sym2 {
        let r = self.rational();
        let r2 = d.norm_sq();
        e.scale(r.factor(r2)).add(&d.scale(2.0 * r.factor_prime(r2) * d.dot(e)))
    }
}

pub fn stress_eval(law: &StressLaw, d: &Sym2) -> Sym2 {
    d.scale(law.rational().factor(d.norm_sq()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlipKind {
    /// s(u) = 2νu.
    Linear { nu: f64 },
    /// s(u) = a·u + b·u/(1 + |u|²).
    Rational { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipLaw {
    pub kind: SlipKind,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl SlipLaw {
    pub fn linear(nu: f64) -> Self {
        Self { kind: SlipKind::Linear { nu }, c1: 2.0 * nu, c2: 2.0 * nu, c3: 2.0 * nu }
    }

    /// Rational law with its exact structural constants.
    pub fn rational(a: f64, b: f64) -> Self {
        let (lo, hi) = Rational { a, b }.bounds();
        Self { kind: SlipKind::Rational { a, b }, c1: lo, c2: hi, c3: lo }
    }

    pub fn with_constants(mut self, c1: f64, c2: f64, c3: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.c3 = c3;
        self
    }

    fn rational_form(&self) -> Rational {
        match self.kind {
            SlipKind::Linear { nu } => Rational { a: 2.0 * nu, b: 0.0 },
            SlipKind::Rational { a, b } => Rational { a, b },
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, SlipKind::Linear { .. })
    }

    /// Tangential component s₁(g, 0) on the flat wall.
    pub fn tangential(&self, g: f64) -> f64 {
        g * self.rational_form().factor(g * g)
    }

    /// ∂s₁/∂u₁ at (g, 0).
    pub fn tangential_slope(&self, g: f64) -> f64 {
        let r = self.rational_form();
        let r2 = g * g;
        r.factor(r2) + 2.0 * r.factor_prime(r2) * r2
    }

    /// Slope at the origin; used as the implicit reference coefficient.
    pub fn reference_slope(&self) -> f64 {
        self.tangential_slope(0.0)
    }
}

pub fn slip_eval(law: &SlipLaw, u: [f64; 2]) -> [f64; 2] {
    let f = law.rational_form().factor(u[0] * u[0] + u[1] * u[1]);
    [f * u[0], f * u[1]]
}

/// Interior and wall laws used by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Laws {
    pub stress: StressLaw,
    pub slip: SlipLaw,
}

impl Laws {
    pub fn linear(nu: f64) -> Self {
        Self { stress: StressLaw::linear(nu), slip: SlipLaw::linear(nu) }
    }

    pub fn is_linear(&self) -> bool {
        self.stress.is_linear() && self.slip.is_linear()
    }
}

/// Sampled structural ratios of a law against its declared constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub min_coercivity: f64,
    pub max_growth: f64,
    pub min_derivative: f64,
    pub coercivity_ok: bool,
    pub growth_ok: bool,
    pub derivative_ok: bool,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.coercivity_ok && self.growth_ok && self.derivative_ok
    }
}

/// Laws whose structural conditions can be sampled.
pub trait Checkable {
    const DIM: usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn declared(&self) -> (f64, f64, f64);
}

impl Checkable for StressLaw {
    const DIM: usize = 3;
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        stress_eval(self, &Sym2::from_vec(x)).to_vec().to_vec()
    }
    fn declared(&self) -> (f64, f64, f64) {
        (self.c1, self.c2, self.c3)
    }
}

impl Checkable for SlipLaw {
    const DIM: usize = 2;
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        slip_eval(self, [x[0], x[1]]).to_vec()
    }
    fn declared(&self) -> (f64, f64, f64) {
        (self.c1, self.c2, self.c3)
    }
}

/// Relative tolerance for the sampled conditions.
pub const CONDITION_TOL: f64 = 1e-6;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sample_vec<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    let dir = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-3 && n <= 1.0 {
            break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
        }
    };
    let mag = 10f64.powf(rng.gen_range(-2.0..=2.0));
    dir.into_iter().map(|x| mag * x).collect()
}

/// Samples monotonicity, growth and derivative coercivity with log-uniform magnitudes in [10⁻², 10²].
pub fn validate_conditions<L: Checkable>(law: &L, sample_count: usize, rng_seed: u64) -> ConditionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let dim = L::DIM;
    let (mut coer, mut growth, mut deriv) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    for _ in 0..sample_count.max(1) {
        let d = sample_vec(&mut rng, dim);
        let e = sample_vec(&mut rng, dim);
        let sd = law.apply(&d);
        let se = law.apply(&e);
        let diff: Vec<f64> = d.iter().zip(&e).map(|(a, b)| a - b).collect();
        let sdiff: Vec<f64> = sd.iter().zip(&se).map(|(a, b)| a - b).collect();
        let dd = dot(&diff, &diff);
        if dd > 0.0 {
            coer = coer.min(dot(&sdiff, &diff) / dd);
        }
        growth = growth.max(dot(&sd, &sd).sqrt() / dot(&d, &d).sqrt());

        let en = dot(&e, &e).sqrt();
        let unit: Vec<f64> = e.iter().map(|x| x / en).collect();
        let t = 1e-5 * dot(&d, &d).sqrt().max(1e-2);
        let plus: Vec<f64> = d.iter().zip(&unit).map(|(a, b)| a + t * b).collect();
        let minus: Vec<f64> = d.iter().zip(&unit).map(|(a, b)| a - t * b).collect();
        let fd: Vec<f64> = law.apply(&plus).iter().zip(law.apply(&minus)).map(|(p, m)| (p - m) / (2.0 * t)).collect();
        deriv = deriv.min(dot(&fd, &unit));
    }
    let (c1, c2, c3) = law.declared();
    ConditionReport {
        min_coercivity: coer,
        max_growth: growth,
        min_derivative: deriv,
        coercivity_ok: coer >= c1 * (1.0 - CONDITION_TOL),
        growth_ok: growth <= c2 * (1.0 + CONDITION_TOL),
        derivative_ok: deriv >= c3 * (1.0 - CONDITION_TOL),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_stress() {
        let s = stress_eval(&StressLaw::linear(1.0), &Sym2::identity());
        assert_eq!(s, Sym2::new(2.0, 2.0, 0.0));
    }

    #[test]
    fn zero_maps_to_zero() {
        for law in [StressLaw::linear(0.7), StressLaw::shear_dependent(1.0, 2.0)] {
            assert_eq!(stress_eval(&law, &Sym2::default()), Sym2::default());
        }
        for law in [SlipLaw::linear(0.7), SlipLaw::rational(2.0, 1.0)] {
            assert_eq!(slip_eval(&law, [0.0, 0.0]), [0.0, 0.0]);
        }
    }

    #[test]
    fn shear_dependent_example() {
        let law = StressLaw::shear_dependent(1.0, 2.0);
        let d = Sym2::new(1.0, -1.0, 0.0);
        let s = stress_eval(&law, &d);
        let expected = d.scale(1.0 + 1.0 / 3.0);
        assert!((s.xx - expected.xx).abs() < 1e-15 && (s.yy - expected.yy).abs() < 1e-15 && s.xy == 0.0);
    }

    #[test]
    fn slip_examples() {
        assert_eq!(slip_eval(&SlipLaw::linear(1.0), [1.0, 0.0]), [2.0, 0.0]);
        assert_eq!(slip_eval(&SlipLaw::rational(2.0, 1.0), [1.0, 0.0]), [2.5, 0.0]);
    }

    #[test]
    fn linear_ratios_are_two_nu() {
        let r = validate_conditions(&StressLaw::linear(1.0), 1000, 1);
        for x in [r.min_coercivity, r.max_growth, r.min_derivative] {
            assert!((x - 2.0).abs() < 1e-8, "{x}");
        }
        assert!(r.pass());
        let r = validate_conditions(&SlipLaw::linear(1.0), 1000, 1);
        assert!(r.pass());
        assert!((r.min_coercivity - 2.0).abs() < 1e-8);
    }

    #[test]
    fn overstated_coercivity_is_flagged() {
        let r = validate_conditions(&StressLaw::linear(1.0).with_constants(3.0, 3.0, 2.0), 1000, 2);
        assert!(!r.coercivity_ok);
        assert!(r.growth_ok && r.derivative_ok);
    }

    #[test]
    fn rational_slip_constants() {
        // Brute-force infimum of the secant and derivative ratios is 15/8, supremum of the growth ratio is 3.
        let exact = SlipLaw::rational(2.0, 1.0);
        assert_eq!((exact.c1, exact.c2, exact.c3), (15.0 / 8.0, 3.0, 15.0 / 8.0));
        let r = validate_conditions(&exact, 20000, 3);
        assert!(r.pass(), "{r:?}");
        assert!(r.min_derivative < 1.9 && r.min_coercivity < 2.0, "{r:?}");
        let claimed = exact.with_constants(2.0, 3.0, 2.0);
        let r = validate_conditions(&claimed, 20000, 3);
        assert!(!r.coercivity_ok && !r.derivative_ok && r.growth_ok);
    }

    #[test]
    fn shear_dependent_constants() {
        let law = StressLaw::shear_dependent(1.0, 2.0);
        assert_eq!((law.c1, law.c2, law.c3), (7.0 / 8.0, 2.0, 7.0 / 8.0));
        assert!(validate_conditions(&law, 20000, 4).pass());
    }

    #[test]
    fn wall_slope_matches_difference_quotient() {
        let law = SlipLaw::rational(2.0, 1.0);
        for g in [-3.0, -0.4, 0.0, 0.9, 1.7] {
            let h = 1e-6;
            let fd = (law.tangential(g + h) - law.tangential(g - h)) / (2.0 * h);
            assert!((fd - law.tangential_slope(g)).abs() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn stress_jacobian_matches_difference(
            xx in -5.0..5.0f64, yy in -5.0..5.0f64, xy in -5.0..5.0f64,
            ex in -1.0..1.0f64, ey in -1.0..1.0f64, exy in -1.0..1.0f64,
        ) {
            let law = StressLaw::shear_dependent(1.0, 2.0);
            let d = Sym2::new(xx, yy, xy);
            let e = Sym2::new(ex, ey, exy);
            let h = 1e-6;
            let p = stress_eval(&law, &d.add(&e.scale(h)));
            let m = stress_eval(&law, &d.add(&e.scale(-h)));
            let fd = p.add(&m.scale(-1.0)).scale(0.5 / h);
            let j = law.jacobian_apply(&d, &e);
            prop_assert!((fd.xx - j.xx).abs() < 1e-6 && (fd.yy - j.yy).abs() < 1e-6 && (fd.xy - j.xy).abs() < 1e-6);
        }

        #[test]
        fn stress_is_symmetric_and_monotone(
            a in prop::array::uniform3(-50.0..50.0f64), b in prop::array::uniform3(-50.0..50.0f64),
        ) {
            let law = StressLaw::shear_dependent(1.0, 2.0);
            let d = Sym2::new(a[0], a[1], a[2]);
            let e = Sym2::new(b[0], b[1], b[2]);
            let diff = d.add(&e.scale(-1.0));
            let sd = stress_eval(&law, &d).add(&stress_eval(&law, &e).scale(-1.0));
            prop_assert!(sd.dot(&diff) >= law.c1 * diff.norm_sq() * (1.0 - 1e-12));
        }
    }
}
