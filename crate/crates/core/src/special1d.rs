//! One-dimensional Morse bound states.
//!
//! The Morse Hamiltonian is `h = -d²/dx² + A (e^{-2αx} - 2 e^{-αx})`. Its
//! bound states are labelled by `n` with `s_n = √A/α - n - 1/2 > 0`,
//! energies `ε_n = -α² s_n²` and eigenfunctions
//!
//! ```text
//! η_n(x) = exp(-ξ/2) ξ^{s_n} F(-n, 2 s_n + 1; ξ),   ξ = (2√A/α) e^{-αx},
//! ```
//!
//! where `F(-n, b; ξ)` is the terminating Kummer series.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field2D, Jet1, Jet2};
use crate::quad::simpson;

/// Coupling constants of the Morse well.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorseParams {
    /// Well depth `A`.
    pub depth: f64,
    /// Inverse length scale `α`.
    pub alpha: f64,
}

impl MorseParams {
    pub fn new(depth: f64, alpha: f64) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::InvalidParameter(format!("well depth A must be > 0, got {depth}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(Self { depth, alpha })
    }

    /// `√A / α`.
    pub fn lambda(&self) -> f64 {
        self.depth.sqrt() / self.alpha
    }

    /// `s_n = √A/α - n - 1/2`; may be non-positive for unbound `n`.
    pub fn s(&self, n: usize) -> f64 {
        self.lambda() - n as f64 - 0.5
    }

    pub fn has_bound_states(&self) -> bool {
        self.lambda() > 0.5
    }

    /// `ξ(x) = (2√A/α) e^{-αx}` and its logarithm.
    fn xi(&self, x: f64) -> (f64, f64) {
        let ln_xi = (2.0 * self.lambda()).ln() - self.alpha * x;
        (ln_xi.exp(), ln_xi)
    }

    /// Morse profile `A (e^{-2αx} - 2 e^{-αx})` with derivatives.
    pub fn potential(&self, x: f64) -> Jet1 {
        let a = self.alpha;
        let e1 = (-a * x).exp();
        let e2 = e1 * e1;
        Jet1::new(
            self.depth * (e2 - 2.0 * e1),
            self.depth * (-2.0 * a * e2 + 2.0 * a * e1),
            self.depth * (4.0 * a * a * e2 - 2.0 * a * a * e1),
        )
    }
}

/// The Morse profile as a field of `x1` alone, for the 1D oracle.
#[derive(Clone, Copy, Debug)]
pub struct MorseWell(pub MorseParams);

impl Field2D for MorseWell {
    fn jet(&self, x1: f64, _x2: f64) -> Result<Jet2> {
        Ok(Jet2::along_x1(self.0.potential(x1)))
    }
}

/// A bound level of the 1D Morse problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorseLevel {
    pub n: usize,
    pub s: f64,
    pub epsilon: f64,
}

/// Terminating confluent hypergeometric series
/// `F(-n, b; x) = Σ_{j=0}^{n} (-n)_j / (b)_j x^j / j!`.
pub fn kummer_truncated(n: usize, b: f64, x: f64) -> Result<f64> {
    for j in 0..n {
        if b + j as f64 == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "b = {b} gives a zero Pochhammer denominator in F(-{n}, b; x)"
            )));
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..n {
        let jf = j as f64;
        term *= (jf - n as f64) / (b + jf) * x / (jf + 1.0);
        sum += term;
    }
    Ok(sum)
}

pub fn morse_level(n: usize, params: &MorseParams) -> Result<MorseLevel> {
    let s = params.s(n);
    if s <= 0.0 {
        return Err(Error::NotBound { n, s });
    }
    Ok(MorseLevel { n, s, epsilon: -params.alpha * params.alpha * s * s })
}

pub fn count_bound_states(params: &MorseParams) -> usize {
    (0..).take_while(|&n| params.s(n) > 0.0).count()
}

/// All bound levels in increasing order of energy.
pub fn bound_levels(params: &MorseParams) -> Vec<MorseLevel> {
    (0..count_bound_states(params)).map(|n| morse_level(n, params).expect("counted as bound")).collect()
}

/// Unit-normalized Morse eigenfunction with analytic derivatives.
#[derive(Clone, Debug)]
pub struct MorseEigenfunction {
    pub level: MorseLevel,
    pub params: MorseParams,
    /// Multiplier applied to the raw closed form so that the L² norm is one.
    pub normalization: f64,
    /// Interval that carries all but `e^{-40}` of the amplitude envelope.
    pub support: (f64, f64),
}

const LOG_ENVELOPE_DROP: f64 = 40.0;

impl MorseEigenfunction {
    /// `ln(e^{-ξ/2} ξ^s)` as a function of `x`.
    pub fn log_envelope(&self, x: f64) -> Jet1 {
        let a = self.params.alpha;
        let s = self.level.s;
        let (xi, ln_xi) = self.params.xi(x);
        Jet1::new(-0.5 * xi + s * ln_xi, a * (0.5 * xi - s), -0.5 * a * a * xi)
    }

    /// `F(-n, 2s+1; ξ(x))` as a function of `x`.
    pub fn polynomial(&self, x: f64) -> Jet1 {
        let n = self.level.n;
        let b = 2.0 * self.level.s + 1.0;
        let a = self.params.alpha;
        let (xi, _) = self.params.xi(x);
        // b > 1 for bound levels, so the series never divides by zero.
        let f0 = kummer_truncated(n, b, xi).expect("b > 1");
        let (f1, f2) = match n {
            0 => (0.0, 0.0),
            1 => (-1.0 / b, 0.0),
            _ => {
                let nf = n as f64;
                let f1 = -nf / b * kummer_truncated(n - 1, b + 1.0, xi).expect("b > 1");
                let f2 = nf * (nf - 1.0) / (b * (b + 1.0)) * kummer_truncated(n - 2, b + 2.0, xi).expect("b > 1");
                (f1, f2)
            }
        };
        Jet1::new(f0, -a * xi * f1, a * a * xi * f1 + a * a * xi * xi * f2)
    }

    /// Closed form without the normalization multiplier.
    pub fn raw_jet(&self, x: f64) -> Jet1 {
        let env = self.log_envelope(x);
        if env.value < -700.0 {
            return Jet1::default();
        }
        env.exp() * self.polynomial(x)
    }

    pub fn jet(&self, x: f64) -> Jet1 {
        self.raw_jet(x).scale(self.normalization)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x).value
    }

    /// Upper bound on `ln|η_n|` (unnormalized), used to pick the support.
    fn log_bound(&self, x: f64) -> f64 {
        let (xi, ln_xi) = self.params.xi(x);
        let b = 2.0 * self.level.s + 1.0;
        let n = self.level.n;
        // Σ |(-n)_j/(b)_j| ξ^j / j! bounds |F|.
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for j in 0..n {
            let jf = j as f64;
            term *= (n as f64 - jf) / (b + jf) * xi / (jf + 1.0);
            sum += term;
        }
        -0.5 * xi + self.level.s * ln_xi + sum.ln()
    }

    fn find_support(&self) -> (f64, f64) {
        let step = 0.02 / self.params.alpha;
        let peak = {
            // The envelope peaks near ξ = 2s + n; scan a generous window.
            let mut best = f64::NEG_INFINITY;
            let mut x = -5.0 / self.params.alpha;
            while x < 5.0 / self.params.alpha {
                best = best.max(self.log_bound(x));
                x += step;
            }
            best
        };
        let mut left = 0.0;
        while self.log_bound(left) > peak - LOG_ENVELOPE_DROP {
            left -= step;
        }
        let mut right = 0.0;
        while self.log_bound(right) > peak - LOG_ENVELOPE_DROP {
            right += step;
        }
        (left, right)
    }

    /// Number of sign changes of η_n on a uniform sampling of its support.
    pub fn sign_changes(&self, samples: usize) -> usize {
        let (a, b) = self.support;
        let mut last = 0.0f64;
        let mut count = 0;
        for i in 0..=samples {
            let v = self.raw_jet(a + (b - a) * i as f64 / samples as f64).value;
            if v.abs() < 1e-300 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }
}

/// Builds the normalized eigenfunction for level `n`. The normalization is
/// computed by composite Simpson quadrature over the decay-resolved support.
pub fn morse_eigenfunction(n: usize, params: &MorseParams) -> Result<MorseEigenfunction> {
    let level = morse_level(n, params)?;
    let mut ef = MorseEigenfunction { level, params: *params, normalization: 1.0, support: (0.0, 0.0) };
    ef.support = ef.find_support();
    let (a, b) = ef.support;
    let intervals = (((b - a) * params.alpha * 400.0) as usize).max(4000);
    let norm2 = simpson(|x| ef.raw_jet(x).value.powi(2), a, b, intervals);
    ef.normalization = 1.0 / norm2.sqrt();
    Ok(ef)
}

/// `⟨η_n, η_m⟩` by Simpson quadrature over the union of supports.
pub fn overlap(f: &MorseEigenfunction, g: &MorseEigenfunction) -> f64 {
    let a = f.support.0.min(g.support.0);
    let b = f.support.1.max(g.support.1);
    let intervals = (((b - a) * f.params.alpha * 400.0) as usize).max(4000);
    simpson(|x| f.value(x) * g.value(x), a, b, intervals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> MorseParams {
        MorseParams::new(30.25, 1.0).unwrap()
    }

    /// Exact rational evaluation of the truncated series.
    fn kummer_rational(n: i128, b: i128, x: i128) -> (i128, i128) {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let (mut num, mut den) = (0i128, 1i128);
        for j in 0..=n {
            // (-n)_j / (b)_j x^j / j!
            let (mut tn, mut td) = (1i128, 1i128);
            for i in 0..j {
                tn *= (-n + i) * x;
                td *= (b + i) * (i + 1);
            }
            num = num * td + tn * den;
            den *= td;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
        (num, den)
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_truncated(0, 7.0, 3.2).unwrap(), 1.0);
        assert!((kummer_truncated(1, 4.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        let (p, q) = kummer_rational(2, 11, 1);
        assert_eq!((p, q), (109, 132));
        assert!((kummer_truncated(2, 11.0, 1.0).unwrap() - p as f64 / q as f64).abs() < 1e-15);
    }

    #[test]
    fn kummer_matches_rational_oracle_on_a_table() {
        for n in 0..8 {
            for b in 1..6 {
                for x in 0..5 {
                    let (p, q) = kummer_rational(n, b, x);
                    let v = kummer_truncated(n as usize, b as f64, x as f64).unwrap();
                    assert!((v - p as f64 / q as f64).abs() <= 1e-12 * (1.0 + v.abs()));
                }
            }
        }
    }

    #[test]
    fn kummer_rejects_zero_denominator() {
        assert!(matches!(kummer_truncated(3, -1.0, 0.5), Err(Error::InvalidParameter(_))));
        // b = -3 only appears after the series has terminated
        assert!(kummer_truncated(3, -3.0, 0.5).is_ok());
    }

    #[test]
    fn levels_of_reference_well() {
        let p = reference();
        let l0 = morse_level(0, &p).unwrap();
        assert_eq!((l0.s, l0.epsilon), (5.0, -25.0));
        let l4 = morse_level(4, &p).unwrap();
        assert_eq!((l4.s, l4.epsilon), (1.0, -1.0));
        assert!(matches!(morse_level(5, &p), Err(Error::NotBound { n: 5, .. })));
    }

    #[test]
    fn bound_state_counts() {
        assert_eq!(count_bound_states(&reference()), 5);
        assert_eq!(count_bound_states(&MorseParams::new(0.16, 1.0).unwrap()), 0);
        assert_eq!(count_bound_states(&MorseParams::new(30.25, 2.0).unwrap()), 3);
    }

    #[test]
    fn invalid_params() {
        assert!(MorseParams::new(-1.0, 1.0).is_err());
        assert!(MorseParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn energies_strictly_increase() {
        let levels = bound_levels(&reference());
        assert!(levels.windows(2).all(|w| w[0].epsilon < w[1].epsilon));
    }

    #[test]
    fn ground_state_schrodinger_residual() {
        let p = reference();
        let eta = morse_eigenfunction(0, &p).unwrap();
        let (a, b) = eta.support;
        let (mut res, mut norm) = (0.0, 0.0);
        for i in 0..1000 {
            let x = a + (b - a) * (i as f64 + 0.5) / 1000.0;
            let j = eta.jet(x);
            let r = -j.dd + (p.potential(x).value - eta.level.epsilon) * j.value;
            res += r * r;
            norm += j.value * j.value;
        }
        assert!((res / norm).sqrt() < 1e-8, "{}", (res / norm).sqrt());
    }

    #[test]
    fn every_level_satisfies_the_schrodinger_equation() {
        let p = MorseParams::new(12.0, 0.7).unwrap();
        for lvl in bound_levels(&p) {
            let eta = morse_eigenfunction(lvl.n, &p).unwrap();
            let (a, b) = eta.support;
            for i in 0..200 {
                let x = a + (b - a) * i as f64 / 199.0;
                let j = eta.jet(x);
                let r = -j.dd + (p.potential(x).value - lvl.epsilon) * j.value;
                assert!(r.abs() < 1e-9 * (1.0 + j.dd.abs()), "n={} x={x} r={r}", lvl.n);
            }
        }
    }

    #[test]
    fn node_count_follows_oscillation_theorem() {
        let p = reference();
        for n in 0..5 {
            assert_eq!(morse_eigenfunction(n, &p).unwrap().sign_changes(20_000), n);
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        let p = reference();
        let efs: Vec<_> = (0..5).map(|n| morse_eigenfunction(n, &p).unwrap()).collect();
        for (i, f) in efs.iter().enumerate() {
            for (j, g) in efs.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((overlap(f, g) - target).abs() < 1e-6, "<{i},{j}>");
            }
        }
    }

    #[test]
    fn decays_at_both_ends() {
        let eta = morse_eigenfunction(4, &reference()).unwrap();
        let (a, b) = eta.support;
        assert!(eta.value(a).abs() < 1e-12 && eta.value(b).abs() < 1e-12);
        assert!(eta.value(-40.0) == 0.0);
    }

    #[test]
    fn derivative_consistency_is_second_order() {
        let eta = morse_eigenfunction(2, &reference()).unwrap();
        let err = |h: f64| {
            let mut e = 0.0f64;
            for i in 0..400 {
                let x = -0.8 + 8.0 * i as f64 / 399.0;
                let fd = (eta.value(x + h) - eta.value(x - h)) / (2.0 * h);
                e = e.max((fd - eta.jet(x).d).abs());
            }
            e
        };
        let (e1, e2) = (err(0.02), err(0.01));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "order {order}");
    }
}
