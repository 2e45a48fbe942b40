//! Initial histories `φ(s, x)` on `s ∈ [−τ, 0]`.

use std::cell::RefCell;
use std::sync::Arc;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

/// `φ(s, x, component)`.
pub type InitialFn = Arc<dyn Fn(f64, [f64; 2], usize) -> f64 + Send + Sync>;

/// An initial history together with a label for reports.
#[derive(Clone)]
pub struct InitialHistory {
    label: String,
    f: InitialFn,
    time_invariant: bool,
}

impl std::fmt::Debug for InitialHistory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialHistory")
            .field("label", &self.label)
            .field("time_invariant", &self.time_invariant)
            .finish()
    }
}

impl InitialHistory {
    pub fn new(label: impl Into<String>, f: impl Fn(f64, [f64; 2], usize) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f), time_invariant: false }
    }

    /// A history that does not depend on `s`; it is evaluated once per node.
    pub fn stationary(label: impl Into<String>, f: impl Fn([f64; 2], usize) -> f64 + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(move |_, x, c| f(x, c)), time_invariant: true }
    }

    pub fn zero() -> Self {
        Self::stationary("zero", |_, _| 0.0)
    }

    /// Spatially constant values per component.
    pub fn constant(values: Vec<f64>) -> Self {
        Self::stationary(format!("constant {values:?}"), move |_, c| values[c])
    }

    /// `amplitude[c] · Π sin(π x_i / L_i)` on a domain with side lengths
    /// `lengths`.
    pub fn first_mode(lengths: Vec<f64>, amplitude: Vec<f64>) -> Self {
        Self::stationary("first Dirichlet mode", move |x, c| {
            amplitude[c] * lengths.iter().enumerate().map(|(i, l)| (std::f64::consts::PI * x[i] / l).sin()).product::<f64>()
        })
    }

    /// The two-component datum
    /// `φ_j(x) = Π_{σ=1}^{3} sin^j[x₁³³ (x₁ − 5(σ+1))³⁵³ x₂⁶³ (x₂ − 5(σ+1))⁷⁹]`,
    /// see [`example41_initial`].
    pub fn example41() -> Self {
        Self::stationary("product of sines", example41_initial)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_time_invariant(&self) -> bool {
        self.time_invariant
    }

    pub fn eval(&self, s: f64, x: [f64; 2], component: usize) -> f64 {
        (self.f)(s, x, component)
    }
}

const EXPONENTS: [i32; 4] = [33, 353, 63, 79];

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

/// `sin(x₁³³ (x₁ − c)³⁵³ x₂⁶³ (x₂ − c)⁷⁹)` to `f64` accuracy, including
/// arguments far beyond the `f64` range.
///
/// The product is formed in binary floating point with enough bits to keep
/// its absolute error below `2⁻⁶⁴`, reduced modulo `2π`, and only then
/// handed to `f64::sin`.
pub fn sin_of_power_product(x1: f64, x2: f64, c: f64) -> f64 {
    let factors = [x1, x1 - c, x2, x2 - c];
    if factors.iter().any(|f| *f == 0.0) {
        return 0.0;
    }
    let log2_mag: f64 = factors.iter().zip(EXPONENTS).map(|(f, e)| e as f64 * f.abs().log2()).sum();
    if log2_mag < -2.0 {
        let direct: f64 = factors.iter().zip(EXPONENTS).map(|(f, e)| f.powi(e)).product();
        if direct.is_finite() {
            return direct.sin();
        }
    }
    let bits = (log2_mag.max(0.0).ceil() as usize + 128).div_ceil(64) * 64;
    let rm = RoundingMode::ToEven;
    CONSTS.with(|cc| {
        let mut cc = cc.borrow_mut();
        let big_c = BigFloat::from_f64(c, bits);
        let b1 = BigFloat::from_f64(x1, bits);
        let b2 = BigFloat::from_f64(x2, bits);
        let exact = [b1.clone(), b1.sub(&big_c, bits, rm), b2.clone(), b2.sub(&big_c, bits, rm)];
        let mut arg = BigFloat::from_f64(1.0, bits);
        for (f, e) in exact.iter().zip(EXPONENTS) {
            arg = arg.mul(&f.powi(e as usize, bits, rm), bits, rm);
        }
        let two_pi = cc.pi(bits, rm).mul(&BigFloat::from_f64(2.0, bits), bits, rm);
        let reduced = arg.rem(&two_pi);
        bigfloat_to_f64(&reduced).sin()
    })
}

/// Nearest-ish `f64` to a finite `BigFloat` of moderate exponent.
fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        None => f64::NAN,
        Some((words, _, sign, exponent, _)) => {
            let Some(&top) = words.last() else { return 0.0 };
            if top == 0 {
                return 0.0;
            }
            let next = if words.len() >= 2 { words[words.len() - 2] } else { 0 };
            // mantissa is 0.m × 2^e with the leading bit in the top word
            let value = (top as f64 + next as f64 / 18446744073709551616.0) * 2f64.powi(exponent - 64);
            if sign == Sign::Neg {
                -value
            } else {
                value
            }
        }
    }
}

/// Component `component` (zero-based) of the product-of-sines datum at `x`.
pub fn example41_initial(x: [f64; 2], component: usize) -> f64 {
    let base: f64 = (1..=3).map(|sigma| sin_of_power_product(x[0], x[1], 5.0 * (sigma as f64 + 1.0))).product();
    base.powi(component as i32 + 1)
}
