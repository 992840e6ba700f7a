use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::famcore::{intersection_histogram, SetFamily};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Law of `|a ∩ b| mod p` for independent uniform `a ∈ A`, `b ∈ B`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionDistribution {
    pub prime: u64,
    /// `counts[x]` ordered pairs have intersection size `≡ x (mod p)`.
    pub counts: Vec<u128>,
    pub total: u128,
}

impl IntersectionDistribution {
    pub fn probability(&self, x: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[x]), BigInt::from(self.total))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// `f̂(j) = Σₓ f(x) ω^{jx}` with `ω = e^{2πi/p}`, as `(re, im)`.
    pub fn transform(&self, j: u64) -> (f64, f64) {
        let p = self.prime;
        let (mut re, mut im) = (0.0, 0.0);
        for (x, &c) in self.counts.iter().enumerate() {
            let f = c as f64 / self.total as f64;
            let angle = 2.0 * std::f64::consts::PI * ((j % p) * x as u64 % p) as f64 / p as f64;
            re += f * angle.cos();
            im += f * angle.sin();
        }
        (re, im)
    }
}

pub fn intersection_distribution(
    a: &SetFamily,
    b: &SetFamily,
    prime: u64,
) -> Result<IntersectionDistribution> {
    if !is_prime(prime) {
        return Err(Error::InvalidPrime(prime));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let hist = intersection_histogram(a, b)?;
    let mut counts = vec![0u128; prime as usize];
    for (l, c) in hist.into_iter().enumerate() {
        counts[l % prime as usize] += c;
    }
    Ok(IntersectionDistribution {
        prime,
        counts,
        total: a.len() as u128 * b.len() as u128,
    })
}

/// `|E ω^{j·|a∩b|}|` for a nonzero residue `j`.
pub fn bias(a: &SetFamily, b: &SetFamily, prime: u64, j: u64) -> Result<f64> {
    if !is_prime(prime) {
        return Err(Error::InvalidPrime(prime));
    }
    if j.is_multiple_of(prime) {
        return Err(Error::InvalidFrequency { j, p: prime });
    }
    let (re, im) = intersection_distribution(a, b, prime)?.transform(j);
    Ok(re.hypot(im).min(1.0))
}

/// Both sides of `Σⱼ |f̂(j)|² = p·Σₓ f(x)²`, each computed exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalCheck {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub spectral: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub physical: BigRational,
    pub holds: bool,
}

/// Evaluates `Σⱼ |f̂(j)|²` in the cyclotomic field.
///
/// `|f̂(j)|² = Σ_d g(d) ω^{jd}` with `g` the cyclic autocorrelation of `f`.
/// Each term is kept as a coefficient vector over `1, ω, …, ω^{p−1}`; the
/// sum is reduced by `1 + ω + … + ω^{p−1} = 0` and must come out rational.
pub fn parseval_check(dist: &IntersectionDistribution) -> ParsevalCheck {
    let p = dist.prime as usize;
    let f: Vec<BigRational> = (0..p).map(|x| dist.probability(x)).collect();
    let g: Vec<BigRational> = (0..p)
        .map(|d| (0..p).map(|x| &f[x] * &f[(x + d) % p]).sum())
        .collect();
    let mut coeffs = vec![BigRational::zero(); p];
    for j in 0..p {
        for (d, gd) in g.iter().enumerate() {
            coeffs[j * d % p] += gd;
        }
    }
    // Subtracting `c₁·(1 + ω + …)` zeroes the ω¹ coefficient.
    let shift = if p > 1 { coeffs[1].clone() } else { BigRational::zero() };
    for c in coeffs.iter_mut() {
        *c -= &shift;
    }
    let rational = coeffs[1..].iter().all(|c| c.is_zero());
    let spectral = coeffs[0].clone();
    let physical = BigRational::from_integer(BigInt::from(p)) * &g[0];
    ParsevalCheck {
        holds: rational && spectral == physical,
        spectral,
        physical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_traits::One;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn empty_sets_intersect_in_zero() {
        let a = SetFamily::from_one_based(3, &[vec![]]).unwrap();
        let d = intersection_distribution(&a, &a, 2).unwrap();
        assert_eq!(d.probability(0), BigRational::one());
        assert_eq!(d.probability(1), BigRational::zero());
    }

    #[test]
    fn power_set_parity() {
        let a = SetFamily::power_set(2);
        let d = intersection_distribution(&a, &a, 2).unwrap();
        // 9 disjoint pairs, 6 with one common element, 1 with two.
        assert_eq!(d.probability(0), q(10, 16));
        let a1 = SetFamily::power_set(1);
        let d1 = intersection_distribution(&a1, &a1, 2).unwrap();
        assert_eq!(d1.probability(0), q(3, 4));
        assert_eq!(d1.counts.iter().sum::<u128>(), d1.total);
    }

    #[test]
    fn bias_examples() {
        let a = SetFamily::from_one_based(1, &[vec![1]]).unwrap();
        assert_relative_eq!(bias(&a, &a, 2, 1).unwrap(), 1.0);
        let p1 = SetFamily::power_set(1);
        assert_relative_eq!(bias(&p1, &p1, 2, 1).unwrap(), 0.5);
        assert_eq!(bias(&p1, &p1, 3, 3), Err(Error::InvalidFrequency { j: 3, p: 3 }));
        assert_eq!(bias(&p1, &p1, 4, 1), Err(Error::InvalidPrime(4)));
    }

    #[test]
    fn parseval_small() {
        for p in [2, 3, 5, 7] {
            let a = SetFamily::power_set(3);
            let b = SetFamily::from_one_based(3, &[vec![1, 2], vec![3], vec![1, 2, 3]]).unwrap();
            let d = intersection_distribution(&a, &b, p).unwrap();
            let c = parseval_check(&d);
            assert!(c.holds, "p = {p}: {c:?}");
            let float: f64 = (0..p).map(|j| {
                let (re, im) = d.transform(j);
                re * re + im * im
            }).sum();
            let phys: f64 = d.probabilities().iter().map(|x| x * x).sum::<f64>() * p as f64;
            assert_relative_eq!(float, phys, epsilon = 1e-12);
        }
    }
}
