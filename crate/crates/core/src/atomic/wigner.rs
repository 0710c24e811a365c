//! Wigner 6j symbols via the Racah sum, evaluated in exact rational
//! arithmetic (big integers) to avoid the catastrophic cancellation that
//! plagues floating-point factorial sums at larger angular momenta.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Angular momentum as a doubled integer (`two_j = 2j`), so half-integers
/// are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfInt {
    two_j: i64,
}

impl HalfInt {
    pub fn new(two_j: i64) -> Result<Self> {
        if two_j < 0 {
            return Err(Error::BadHalfInteger(format!("2j = {two_j} < 0")));
        }
        Ok(HalfInt { two_j })
    }

    /// From a float that must be a non-negative multiple of 1/2.
    pub fn from_f64(j: f64) -> Result<Self> {
        let two_j = (2.0 * j).round();
        if j < 0.0 || (2.0 * j - two_j).abs() > 1e-9 {
            return Err(Error::BadHalfInteger(format!("j = {j}")));
        }
        Self::new(two_j as i64)
    }

    pub fn two_j(self) -> i64 {
        self.two_j
    }

    pub fn to_f64(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.two_j % 2 == 0
    }
}

fn triangle_ok(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.two_j, b.two_j, c.two_j);
    // parity: a + b + c must be an integer (even doubled sum)
    (a + b + c) % 2 == 0 && c >= (a - b).abs() && c <= a + b
}

/// factorial(n) as BigInt with a small thread-local cache.
fn factorial(n: i64) -> BigInt {
    thread_local! {
        static CACHE: std::cell::RefCell<Vec<BigInt>> =
            std::cell::RefCell::new(vec![BigInt::one()]);
    }
    CACHE.with(|c| {
        let mut cache = c.borrow_mut();
        while (cache.len() as i64) <= n {
            let next = cache.last().unwrap() * BigInt::from(cache.len());
            cache.push(next);
        }
        cache[n as usize].clone()
    })
}

/// `Delta(abc)^2 = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!` as a rational;
/// all arguments are doubled, so the factorial indices are integers.
fn triangle_coeff_sq(a: HalfInt, b: HalfInt, c: HalfInt) -> BigRational {
    let (a, b, c) = (a.two_j, b.two_j, c.two_j);
    let f = |x: i64| factorial(x / 2);
    BigRational::new(
        f(a + b - c) * f(a - b + c) * f(-a + b + c),
        f(a + b + c + 2),
    )
}

/// Exact 6j value represented as `sign * sqrt(num/den)`.
#[derive(Debug, Clone)]
pub struct SignedSqrt {
    /// signed rational whose absolute value is the square of the symbol
    signed_sq: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt {
            signed_sq: BigRational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mag = self
            .signed_sq
            .abs()
            .to_f64()
            .unwrap_or(f64::INFINITY)
            .sqrt();
        if self.signed_sq.is_negative() {
            -mag
        } else {
            mag
        }
    }
}

/// Racah formula for `{j1 j2 j3; j4 j5 j6}`, exact.
pub fn wigner_6j_exact(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> SignedSqrt {
    let triads = [
        (j1, j2, j3),
        (j1, j5, j6),
        (j4, j2, j6),
        (j4, j5, j3),
    ];
    if triads.iter().any(|&(a, b, c)| !triangle_ok(a, b, c)) {
        return SignedSqrt::zero();
    }

    // doubled triad sums
    let s: Vec<i64> = triads
        .iter()
        .map(|&(a, b, c)| (a.two_j + b.two_j + c.two_j) / 2)
        .collect();
    // doubled quad sums
    let q = [
        (j1.two_j + j2.two_j + j4.two_j + j5.two_j) / 2,
        (j2.two_j + j3.two_j + j5.two_j + j6.two_j) / 2,
        (j3.two_j + j1.two_j + j6.two_j + j4.two_j) / 2,
    ];

    let t_min = *s.iter().max().unwrap();
    let t_max = *q.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let num = factorial(t + 1);
        let mut den = BigInt::one();
        for &sk in &s {
            den *= factorial(t - sk);
        }
        for &qk in &q {
            den *= factorial(qk - t);
        }
        let term = BigRational::new(num, den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }

    let mut prefactor_sq = BigRational::one();
    for &(a, b, c) in &triads {
        prefactor_sq *= triangle_coeff_sq(a, b, c);
    }
    // value = sqrt(prefactor_sq) * sum: store sign(sum) * prefactor_sq * sum^2
    let signed_sq = if sum.is_negative() {
        -(prefactor_sq * (&sum * &sum))
    } else {
        prefactor_sq * (&sum * &sum)
    };
    SignedSqrt { signed_sq }
}

/// `{j1 j2 j3; j4 j5 j6}` as f64; zero whenever a triad violates the
/// triangle rules. Arguments must be non-negative half-integers.
pub fn wigner_6j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    let h = |x: f64| HalfInt::from_f64(x);
    Ok(wigner_6j_exact(h(j1)?, h(j2)?, h(j3)?, h(j4)?, h(j5)?, h(j6)?).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    /// Independent plain-f64 Racah sum used as an oracle.
    fn wigner_6j_f64(j: [f64; 6]) -> f64 {
        fn fact(n: f64) -> f64 {
            let mut acc = 1.0;
            let mut k = 2.0;
            while k <= n + 0.1 {
                acc *= k;
                k += 1.0;
            }
            acc
        }
        let tri = |a: f64, b: f64, c: f64| -> Option<f64> {
            let (x, y, z) = (a + b - c, a - b + c, -a + b + c);
            if x < -0.1 || y < -0.1 || z < -0.1 || ((a + b + c) * 2.0).round() as i64 % 2 != 0 {
                return None;
            }
            Some(fact(x) * fact(y) * fact(z) / fact(a + b + c + 1.0))
        };
        let [j1, j2, j3, j4, j5, j6] = j;
        let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
        let mut pref = 1.0;
        for (a, b, c) in triads {
            match tri(a, b, c) {
                Some(v) => pref *= v,
                None => return 0.0,
            }
        }
        let pref = pref.sqrt();
        let s: Vec<f64> = triads.iter().map(|(a, b, c)| a + b + c).collect();
        let q = [j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4];
        let t0 = s.iter().cloned().fold(0.0f64, f64::max);
        let t1 = q.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        let mut t = t0;
        while t <= t1 + 0.1 {
            let sign = if (t.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            let mut den = 1.0;
            for &sk in &s {
                den *= fact(t - sk);
            }
            for &qk in &q {
                den *= fact(qk - t);
            }
            sum += sign * fact(t + 1.0) / den;
            t += 1.0;
        }
        pref * sum
    }

    #[test]
    fn triangle_violation_is_zero() {
        assert_eq!(wigner_6j(1.0, 1.0, 3.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(wigner_6j(0.5, 0.5, 2.0, 0.5, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn non_half_integer_rejected() {
        assert!(wigner_6j(0.3, 0.5, 1.0, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn spot_values_match_oracle() {
        let cases: [[f64; 6]; 5] = [
            [0.5, 0.5, 1.0, 0.5, 0.5, 1.0],
            [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            [2.0, 1.0, 1.0, 1.0, 2.0, 1.0],
            [1.5, 1.5, 1.0, 0.5, 0.5, 1.0],
            [4.0, 4.0, 0.0, 0.5, 0.5, 4.5],
        ];
        for c in cases {
            let exact = wigner_6j(c[0], c[1], c[2], c[3], c[4], c[5]).unwrap();
            let oracle = wigner_6j_f64(c);
            assert_abs_diff_eq!(exact, oracle, epsilon = 1e-12);
        }
        // frozen value from the independent factorial-sum oracle
        assert_abs_diff_eq!(
            wigner_6j(0.5, 0.5, 1.0, 0.5, 0.5, 1.0).unwrap(),
            wigner_6j_f64([0.5, 0.5, 1.0, 0.5, 0.5, 1.0]),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            wigner_6j(0.5, 0.5, 1.0, 0.5, 0.5, 1.0).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-12
        );
    }

    fn random_half_int(rng: &mut impl Rng, max2: i64) -> f64 {
        rng.gen_range(0..=max2) as f64 / 2.0
    }

    #[test]
    fn orthogonality_identity_on_random_triads() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(6);
        let mut checked = 0;
        while checked < 50 {
            let j1 = random_half_int(&mut rng, 6);
            let j2 = random_half_int(&mut rng, 6);
            let j3 = random_half_int(&mut rng, 6);
            let j4 = random_half_int(&mut rng, 6);
            let j5 = random_half_int(&mut rng, 6);
            let j6 = random_half_int(&mut rng, 6);
            // x runs over the coupling range of (j1, j2) and (j3, j4)
            let lo = (j1 - j2).abs().max((j3 - j4).abs());
            let hi = (j1 + j2).min(j3 + j4);
            if hi < lo {
                continue;
            }
            let sum_with = |jx: f64| -> f64 {
                let mut acc = 0.0;
                let mut x = lo;
                while x <= hi + 0.1 {
                    acc += (2.0 * x + 1.0)
                        * wigner_6j(j1, j2, x, j3, j4, j5).unwrap()
                        * wigner_6j(j1, j2, x, j3, j4, jx).unwrap();
                    x += 1.0;
                }
                acc
            };
            let diag = sum_with(j5);
            // only meaningful when the j5 triads can exist at all
            let j5_possible = diag.abs() > 0.0;
            if j5_possible {
                assert_abs_diff_eq!(diag, 1.0 / (2.0 * j5 + 1.0), epsilon = 1e-10);
                if (j6 - j5).abs() > 0.1 {
                    assert_abs_diff_eq!(sum_with(j6), 0.0, epsilon = 1e-10);
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn classical_symmetries_fuzz() {
        // column permutations and row swaps of two columns leave the symbol
        // unchanged (all 24 classical symmetries are generated by these)
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 200 {
            let j: Vec<f64> = (0..6).map(|_| random_half_int(&mut rng, 5)).collect();
            let (a, b, c, d, e, f) = (j[0], j[1], j[2], j[3], j[4], j[5]);
            let base = wigner_6j(a, b, c, d, e, f).unwrap();
            if base == 0.0 {
                continue;
            }
            let variants = [
                wigner_6j(b, a, c, e, d, f).unwrap(), // swap columns 1,2
                wigner_6j(a, c, b, d, f, e).unwrap(), // swap columns 2,3
                wigner_6j(c, b, a, f, e, d).unwrap(), // swap columns 1,3
                wigner_6j(d, e, c, a, b, f).unwrap(), // exchange rows in cols 1,2
                wigner_6j(a, e, f, d, b, c).unwrap(), // exchange rows in cols 2,3
                wigner_6j(d, b, f, a, e, c).unwrap(), // exchange rows in cols 1,3
            ];
            for v in variants {
                assert_abs_diff_eq!(v, base, epsilon = 1e-12);
            }
            done += 1;
        }
    }
}
