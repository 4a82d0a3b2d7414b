//! Exact integer and modular arithmetic primitives.
//!
//! Everything downstream works with polynomials over the integers and their
//! induced maps on `Z/p^nZ`. Coefficients are arbitrary-precision; residues
//! live in `u64` because every modulus we ever iterate over is small.

use std::fmt;

pub use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level must be at least 1")]
    InvalidLevel,
    #[error("{p}^{n} does not fit in 64 bits")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("{a} is not a unit modulo {p}^{n}")]
    NotAUnit { a: BigInt, p: u64, n: u32 },
    #[error("constant term {a0} is divisible by {p}; the map fixes 0 modulo {p}")]
    ConstantTermNotUnit { a0: BigInt, p: u64 },
    #[error("residue value {value} is not in [0, {modulus})")]
    ValueOutOfRange { value: u64, modulus: u64 },
}

/// A (small) prime modulus base, verified at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Verifies primality by trial division; inputs here are always tiny.
    pub fn new(value: u64) -> Result<Self, ArithError> {
        if value < 2 {
            return Err(ArithError::NotPrime(value));
        }
        if value.is_multiple_of(2) {
            return if value == 2 {
                Ok(Prime(2))
            } else {
                Err(ArithError::NotPrime(value))
            };
        }
        let mut d = 3u64;
        while d.saturating_mul(d) <= value {
            if value.is_multiple_of(d) {
                return Err(ArithError::NotPrime(value));
            }
            d += 2;
        }
        Ok(Prime(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponent of the modulus `p^n`; always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u32);

impl Level {
    pub fn new(n: u32) -> Result<Self, ArithError> {
        if n == 0 {
            return Err(ArithError::InvalidLevel);
        }
        Ok(Level(n))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `p^n` as a machine word, or an error when it overflows.
pub fn modulus(p: Prime, n: Level) -> Result<u64, ArithError> {
    p.value()
        .checked_pow(n.value())
        .ok_or(ArithError::ModulusTooLarge {
            p: p.value(),
            n: n.value(),
        })
}

/// A canonical representative of `Z/p^nZ`: a value in `[0, p^n)` together
/// with the prime and level it lives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    prime: Prime,
    level: Level,
}

impl Residue {
    /// Wraps an already-canonical value; rejects values outside `[0, p^n)`.
    pub fn new(value: u64, prime: Prime, level: Level) -> Result<Self, ArithError> {
        let m = modulus(prime, level)?;
        if value >= m {
            return Err(ArithError::ValueOutOfRange { value, modulus: m });
        }
        Ok(Residue {
            value,
            prime,
            level,
        })
    }

    /// Canonicalizes an arbitrary integer into `[0, p^n)`.
    pub fn reduce(value: &BigInt, prime: Prime, level: Level) -> Result<Self, ArithError> {
        let m = modulus(prime, level)?;
        Ok(Residue {
            value: big_mod_u64(value, m),
            prime,
            level,
        })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn prime(self) -> Prime {
        self.prime
    }

    pub fn level(self) -> Level {
        self.level
    }

    /// The modulus `p^n`; infallible because construction validated it.
    pub fn modulus(self) -> u64 {
        modulus(self.prime, self.level).expect("validated at construction")
    }

    /// Image under the canonical projection to a lower level.
    pub fn project(self, lower: Level) -> Result<Self, ArithError> {
        if lower.value() > self.level.value() {
            return Err(ArithError::InvalidLevel);
        }
        let m = modulus(self.prime, lower)?;
        Ok(Residue {
            value: self.value % m,
            prime: self.prime,
            level: lower,
        })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn big_mod_u64(value: &BigInt, m: u64) -> u64 {
    value
        .mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("mod_floor result fits the modulus")
}

/// A polynomial with exact integer coefficients, stored low degree first.
///
/// The coefficient vector is never empty and its last entry is nonzero
/// unless the polynomial is a single constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        IntPoly {
            coeffs: vec![c.into()],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Canonical machine form: comma-separated coefficients, low degree first.
    pub fn coeff_list(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for IntPoly {
    /// Expression form, highest degree first, e.g. `5x^5 + 10x^4 - 5x^2 - 4x + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if i == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{i}")?;
                }
            }
        }
        Ok(())
    }
}

/// A polynomial with coefficients pre-reduced into `[0, m)` for fast
/// repeated evaluation at a fixed modulus `m = p^n`.
#[derive(Debug, Clone)]
pub struct ReducedPoly {
    coeffs: Vec<u64>,
    modulus: u64,
}

impl ReducedPoly {
    pub fn new(f: &IntPoly, p: Prime, n: Level) -> Result<Self, ArithError> {
        let m = modulus(p, n)?;
        Ok(ReducedPoly {
            coeffs: f.coeffs().iter().map(|c| big_mod_u64(c, m)).collect(),
            modulus: m,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Horner evaluation with 128-bit intermediates; never overflows for
    /// any 64-bit modulus.
    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus as u128;
        let x = x as u128;
        let mut acc = 0u128;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c as u128) % m;
        }
        acc as u64
    }
}

/// The p-adic valuation of an integer: the exponent of the largest power of
/// `p` dividing it, with zero mapped to the infinite marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn padic_valuation(x: &BigInt, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p.value());
    let mut rest = x.clone();
    let mut count = 0u64;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(count);
        }
        rest = q;
        count += 1;
    }
}

/// Multiplicative inverse modulo `p^n` via the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigInt, p: Prime, n: Level) -> Result<Residue, ArithError> {
    let m = modulus(p, n)?;
    if a.mod_floor(&BigInt::from(p.value())).is_zero() {
        return Err(ArithError::NotAUnit {
            a: a.clone(),
            p: p.value(),
            n: n.value(),
        });
    }
    let a_red = big_mod_u64(a, m) as i128;
    let m_i = m as i128;
    let (mut r0, mut r1) = (m_i, a_red);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "unit check above guarantees gcd 1");
    let inv = t0.rem_euclid(m_i) as u64;
    Residue::new(inv, p, n)
}

/// Evaluates `f` at `x` in `Z/p^nZ`, reducing after every Horner step.
pub fn poly_eval_mod(f: &IntPoly, x: Residue) -> Residue {
    let m = x.modulus();
    let m128 = m as u128;
    let xv = x.value() as u128;
    let mut acc = 0u128;
    for c in f.coeffs().iter().rev() {
        acc = (acc * xv + big_mod_u64(c, m) as u128) % m128;
    }
    Residue {
        value: acc as u64,
        prime: x.prime(),
        level: x.level(),
    }
}

/// Exact integer derivative; constants map to the zero polynomial.
pub fn poly_derivative(f: &IntPoly) -> IntPoly {
    let coeffs: Vec<BigInt> = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    IntPoly::new(coeffs)
}

/// Coefficients of the composition `f(g(x))` reduced modulo `p^n`.
pub fn poly_compose_mod(
    f: &IntPoly,
    g: &IntPoly,
    p: Prime,
    n: Level,
) -> Result<IntPoly, ArithError> {
    let m = modulus(p, n)?;
    let g_red: Vec<u64> = g.coeffs().iter().map(|c| big_mod_u64(c, m)).collect();
    // Horner on polynomials: acc <- acc * g + a_i, highest degree first.
    let mut acc: Vec<u64> = vec![big_mod_u64(&f.coeff(f.degree()), m)];
    for i in (0..f.degree()).rev() {
        acc = poly_mul_mod(&acc, &g_red, m);
        let a_i = big_mod_u64(&f.coeff(i), m);
        acc[0] = add_mod(acc[0], a_i, m);
    }
    Ok(IntPoly::new(acc.into_iter().map(BigInt::from).collect()))
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    let m128 = m as u128;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let prod = (ai as u128 * bj as u128) % m128;
            out[i + j] = ((out[i + j] as u128 + prod) % m128) as u64;
        }
    }
    out
}

/// Conjugates `f` to a polynomial with constant term exactly 1:
/// `g(x) = (1/a0) f(a0 x)`, i.e. `g_i = a_i a0^{i-1}` for `i >= 1`.
///
/// The conjugation preserves minimality, so downstream criteria only ever
/// need the constant-term-1 case. Errors out when `p` divides `a0`, in
/// which case 0 is a fixed point modulo `p` and the map is not minimal.
pub fn normalize(f: &IntPoly, p: Prime) -> Result<IntPoly, ArithError> {
    let a0 = f.constant_term();
    if a0.mod_floor(&BigInt::from(p.value())).is_zero() {
        return Err(ArithError::ConstantTermNotUnit {
            a0: a0.clone(),
            p: p.value(),
        });
    }
    if a0.is_one() {
        return Ok(f.clone());
    }
    let mut coeffs = Vec::with_capacity(f.degree() + 1);
    coeffs.push(BigInt::one());
    let mut scale = BigInt::one(); // a0^{i-1}
    for i in 1..=f.degree() {
        coeffs.push(f.coeff(i) * &scale);
        if i < f.degree() {
            scale *= a0;
        }
    }
    Ok(IntPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn lv(n: u32) -> Level {
        Level::new(n).unwrap()
    }

    fn res(v: u64, pr: u64, n: u32) -> Residue {
        Residue::new(v, p(pr), lv(n)).unwrap()
    }

    /// The running example polynomial 5x^5 + 10x^4 - 5x^2 - 4x + 1.
    fn example_poly() -> IntPoly {
        IntPoly::from_i64(&[1, -4, -5, 0, 10, 5])
    }

    #[test]
    fn prime_construction() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(5).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(1), Err(ArithError::NotPrime(1)));
        assert_eq!(Prime::new(4), Err(ArithError::NotPrime(4)));
        assert_eq!(Prime::new(91), Err(ArithError::NotPrime(91))); // 7 * 13
        assert_eq!(Prime::new(0), Err(ArithError::NotPrime(0)));
    }

    #[test]
    fn level_requires_positive() {
        assert!(Level::new(0).is_err());
        assert_eq!(Level::new(3).unwrap().value(), 3);
    }

    #[test]
    fn modulus_overflow_detected() {
        assert!(modulus(p(5), lv(27)).is_ok()); // 5^27 < 2^64
        assert!(modulus(p(5), lv(28)).is_err());
    }

    #[test]
    fn valuation_of_zero_is_infinite() {
        assert_eq!(padic_valuation(&BigInt::from(0), p(5)), Valuation::Infinite);
    }

    #[test]
    fn valuation_by_repeated_division() {
        // 50 = 2 * 5^2
        assert_eq!(
            padic_valuation(&BigInt::from(50), p(5)),
            Valuation::Finite(2)
        );
        // residue 4 (= -161311 + 161315) is coprime to 5
        assert_eq!(
            padic_valuation(&BigInt::from(4), p(5)),
            Valuation::Finite(0)
        );
        assert_eq!(
            padic_valuation(&BigInt::from(-161311), p(5)),
            Valuation::Finite(0)
        );
        assert_eq!(
            padic_valuation(&BigInt::from(-50), p(5)),
            Valuation::Finite(2)
        );
        assert_eq!(
            padic_valuation(&BigInt::from(8), p(2)),
            Valuation::Finite(3)
        );
    }

    #[test]
    fn mod_inverse_identity() {
        assert_eq!(
            mod_inverse(&BigInt::from(1), p(5), lv(2)).unwrap().value(),
            1
        );
    }

    #[test]
    fn mod_inverse_matches_exhaustive_search() {
        // independent oracle: the unique r in [0, 25) with 3r = 1 (mod 25)
        let oracle = (0..25u64).find(|r| (3 * r) % 25 == 1).unwrap();
        assert_eq!(oracle, 17);
        assert_eq!(
            mod_inverse(&BigInt::from(3), p(5), lv(2)).unwrap().value(),
            17
        );
    }

    #[test]
    fn mod_inverse_rejects_non_units() {
        assert!(matches!(
            mod_inverse(&BigInt::from(5), p(5), lv(2)),
            Err(ArithError::NotAUnit { .. })
        ));
        assert!(matches!(
            mod_inverse(&BigInt::from(-10), p(5), lv(3)),
            Err(ArithError::NotAUnit { .. })
        ));
    }

    #[test]
    fn mod_inverse_all_units() {
        for (pr, n) in [(2, 3), (3, 3), (5, 2)] {
            let m = modulus(p(pr), lv(n)).unwrap();
            for a in 1..m {
                if a % pr == 0 {
                    continue;
                }
                let inv = mod_inverse(&BigInt::from(a), p(pr), lv(n)).unwrap();
                assert_eq!((a as u128 * inv.value() as u128) % m as u128, 1);
            }
        }
    }

    #[test]
    fn eval_mod_example_orbit_step() {
        let f = example_poly();
        assert_eq!(poly_eval_mod(&f, res(1, 5, 2)).value(), 7);
        assert_eq!(poly_eval_mod(&f, res(0, 5, 2)).value(), 1);
        let x = IntPoly::from_i64(&[0, 1]);
        assert_eq!(poly_eval_mod(&x, res(23, 5, 2)).value(), 23);
    }

    #[test]
    fn eval_mod_handles_negative_coefficients() {
        // -4x + 1 at x = 2 mod 25: -8 + 1 = -7 = 18
        let f = IntPoly::from_i64(&[1, -4]);
        assert_eq!(poly_eval_mod(&f, res(2, 5, 2)).value(), 18);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            poly_derivative(&IntPoly::from_i64(&[1, 1])),
            IntPoly::from_i64(&[1])
        );
        assert_eq!(
            poly_derivative(&example_poly()),
            IntPoly::from_i64(&[-4, -10, 0, 40, 25])
        );
        assert_eq!(
            poly_derivative(&IntPoly::from_i64(&[7])),
            IntPoly::from_i64(&[0])
        );
        // f'(1) = 51 = 1 (mod 5)
        let d = poly_derivative(&example_poly());
        assert_eq!(d.eval(&BigInt::from(1)), BigInt::from(51));
    }

    #[test]
    fn compose_examples() {
        let f = example_poly();
        let x = IntPoly::from_i64(&[0, 1]);
        let f_mod_25: Vec<BigInt> = f
            .coeffs()
            .iter()
            .map(|c| BigInt::from(big_mod_u64(c, 25)))
            .collect();
        assert_eq!(
            poly_compose_mod(&f, &x, p(5), lv(2)).unwrap(),
            IntPoly::new(f_mod_25)
        );

        let xp1 = IntPoly::from_i64(&[1, 1]);
        assert_eq!(
            poly_compose_mod(&xp1, &xp1, p(5), lv(2)).unwrap(),
            IntPoly::from_i64(&[2, 1])
        );

        let sq = IntPoly::from_i64(&[0, 0, 1]);
        assert_eq!(
            poly_compose_mod(&sq, &xp1, p(5), lv(1)).unwrap(),
            IntPoly::from_i64(&[1, 2, 1])
        );
    }

    #[test]
    fn normalize_examples() {
        let f = example_poly();
        assert_eq!(normalize(&f, p(5)).unwrap(), f);

        // (1/3)(2*3x + 3) = 2x + 1
        let g = IntPoly::from_i64(&[3, 2]);
        assert_eq!(normalize(&g, p(5)).unwrap(), IntPoly::from_i64(&[1, 2]));

        assert!(matches!(
            normalize(&IntPoly::from_i64(&[5, 5]), p(5)),
            Err(ArithError::ConstantTermNotUnit { .. })
        ));
    }

    #[test]
    fn residue_bounds_checked() {
        assert!(Residue::new(24, p(5), lv(2)).is_ok());
        assert!(matches!(
            Residue::new(25, p(5), lv(2)),
            Err(ArithError::ValueOutOfRange { .. })
        ));
        let r = Residue::reduce(&BigInt::from(-1), p(5), lv(2)).unwrap();
        assert_eq!(r.value(), 24);
    }

    #[test]
    fn residue_projection() {
        let r = res(23, 5, 2);
        assert_eq!(r.project(lv(1)).unwrap().value(), 3);
        assert!(r.project(lv(3)).is_err());
    }

    #[test]
    fn display_round_shapes() {
        assert_eq!(example_poly().to_string(), "5x^5 + 10x^4 - 5x^2 - 4x + 1");
        assert_eq!(IntPoly::from_i64(&[0]).to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[0, -1, 1]).to_string(), "x^2 - x");
        assert_eq!(IntPoly::from_i64(&[-7]).to_string(), "-7");
        assert_eq!(IntPoly::from_i64(&[1, 1]).to_string(), "x + 1");
        assert_eq!(example_poly().coeff_list(), "1,-4,-5,0,10,5");
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let f = IntPoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(f.degree(), 1);
        assert_eq!(IntPoly::from_i64(&[]).degree(), 0);
        assert!(IntPoly::from_i64(&[]).is_zero());
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        proptest::collection::vec(-100i64..=100, 1..=9).prop_map(|v| IntPoly::from_i64(&v))
    }

    proptest! {
        /// Evaluation commutes with the projection tower: reducing the
        /// level-n value mod p^{n-1} equals evaluating at level n-1.
        #[test]
        fn eval_compatible_with_projection(
            f in small_poly(),
            x in 0u64..1000,
            pr in prop::sample::select(vec![2u64, 3, 5]),
            n in 2u32..=4,
        ) {
            let hi = lv(n);
            let lo = lv(n - 1);
            let x_hi = Residue::reduce(&BigInt::from(x), p(pr), hi).unwrap();
            let x_lo = x_hi.project(lo).unwrap();
            let via_hi = poly_eval_mod(&f, x_hi).project(lo).unwrap();
            let via_lo = poly_eval_mod(&f, x_lo);
            prop_assert_eq!(via_hi, via_lo);
        }

        /// a0 * g(x) = f(a0 * x) exactly, where g is the conjugated form.
        #[test]
        fn normalize_conjugacy_identity(
            f in small_poly(),
            x in -50i64..=50,
            pr in prop::sample::select(vec![2u64, 3, 5]),
        ) {
            let a0 = f.constant_term().clone();
            prop_assume!(!a0.mod_floor(&BigInt::from(pr)).is_zero());
            let g = normalize(&f, p(pr)).unwrap();
            prop_assert_eq!(g.constant_term(), &BigInt::one());
            prop_assert_eq!(g.degree(), f.degree());
            let x = BigInt::from(x);
            prop_assert_eq!(&a0 * g.eval(&x), f.eval(&(&a0 * &x)));
        }

        /// (f o g)' = (f' o g) * g' modulo p^n.
        #[test]
        fn compose_chain_rule(
            f in small_poly(),
            g in small_poly(),
            x in 0u64..100,
            pr in prop::sample::select(vec![2u64, 3, 5]),
            n in 1u32..=3,
        ) {
            let pn = (p(pr), lv(n));
            let comp = poly_compose_mod(&f, &g, pn.0, pn.1).unwrap();
            let lhs = poly_derivative(&comp);
            let xr = Residue::reduce(&BigInt::from(x), pn.0, pn.1).unwrap();
            let gx = poly_eval_mod(&g, xr);
            let lhs_val = poly_eval_mod(&lhs, xr).value();
            let fp_at_gx = poly_eval_mod(&poly_derivative(&f), gx).value() as u128;
            let gp_at_x = poly_eval_mod(&poly_derivative(&g), xr).value() as u128;
            let m = xr.modulus() as u128;
            prop_assert_eq!(lhs_val as u128, (fp_at_gx * gp_at_x) % m);
        }

        /// Every unit has a two-sided inverse.
        #[test]
        fn inverse_multiplies_to_one(
            a in -10_000i64..=10_000,
            pr in prop::sample::select(vec![2u64, 3, 5]),
            n in 1u32..=4,
        ) {
            prop_assume!(a.unsigned_abs() % pr != 0);
            let m = modulus(p(pr), lv(n)).unwrap();
            let inv = mod_inverse(&BigInt::from(a), p(pr), lv(n)).unwrap();
            let a_red = big_mod_u64(&BigInt::from(a), m);
            prop_assert_eq!((a_red as u128 * inv.value() as u128) % m as u128, 1);
        }

        /// Printing and parsing the coefficient list round-trips.
        #[test]
        fn coeff_list_round_trip(f in small_poly()) {
            let parsed: Vec<BigInt> = f
                .coeff_list()
                .split(',')
                .map(|s| s.parse::<BigInt>().unwrap())
                .collect();
            prop_assert_eq!(IntPoly::new(parsed), f);
        }
    }
}
