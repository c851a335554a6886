//! Finite differences of `√x` and the inequalities built on them.
//!
//! `f^<n>(x) = f^<n−1>(x) − f^<n−1>(x − 1)` is evaluated as the binomial sum
//! `Σ_j (−1)^j C(n, j) f(x − j)`; derivatives come from the closed form
//! `f^(k)(x) = c_k·x^(1/2 − k)`.

use crate::numerics::Real;
use crate::verify::{certified, log2_margin, precondition, CheckRecord, VerifyError};

/// Guard bits used when both sides of an identity are accumulated.
const GUARD_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffFunction {
    /// `f(x) = √x`
    Sqrt,
    /// `f(x) = √(x + 1)`
    SqrtShifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiffOracle {
    pub function: DiffFunction,
    pub max_order: usize,
}

impl DiffOracle {
    pub fn sqrt() -> Self {
        DiffOracle { function: DiffFunction::Sqrt, max_order: 8 }
    }

    pub fn sqrt_shifted() -> Self {
        DiffOracle { function: DiffFunction::SqrtShifted, max_order: 8 }
    }

    fn shift(&self) -> i64 {
        match self.function {
            DiffFunction::Sqrt => 0,
            DiffFunction::SqrtShifted => 1,
        }
    }

    /// Argument of the square root at `x`.
    fn radicand(&self, x: &Real) -> Real {
        x + &Real::from_i64(self.shift(), x.precision())
    }

    /// Smallest `x` at which `f` is defined.
    pub fn domain_min(&self) -> i64 {
        -self.shift()
    }

    pub fn value(&self, x: &Real) -> Result<Real, VerifyError> {
        let r = self.radicand(x);
        if r.is_negative() {
            return Err(precondition(format!("f is undefined at {x}")));
        }
        Ok(r.sqrt())
    }

    /// `f^(k)(x)`; for `k ≥ 1` the argument must lie strictly inside the domain.
    pub fn derivative(&self, k: usize, x: &Real) -> Result<Real, VerifyError> {
        if k == 0 {
            return self.value(x);
        }
        let r = self.radicand(x);
        if !r.is_positive() {
            return Err(precondition(format!("f^({k}) is undefined at {x}")));
        }
        let p = x.precision();
        let exponent = Real::from_ratio(1 - 2 * k as i64, 2, p);
        Ok(sqrt_derivative_coefficient(k, p) * r.powf(&exponent))
    }

    /// Integer-indexed sequence `f(n)`, zero below the domain.
    pub fn sequence_value(&self, n: i64, precision: usize) -> Real {
        if n + self.shift() < 0 {
            Real::zero(precision)
        } else {
            Real::from_i64(n + self.shift(), precision).sqrt()
        }
    }

    /// `f^<m>(n)` of the zero-extended sequence.
    pub fn sequence_difference(&self, m: usize, n: i64, precision: usize) -> Real {
        binomial_sum(m, precision, |j| self.sequence_value(n - j as i64, precision))
    }
}

/// `c_k` in `d^k/dx^k √x = c_k·x^(1/2 − k)`, i.e.
/// `(−1)^(k+1)·(2k−2)! / ((k−1)!·2^(2k−1))` for `k ≥ 1`.
pub fn sqrt_derivative_coefficient(k: usize, precision: usize) -> Real {
    (0..k).fold(Real::one(precision), |c, j| c * Real::from_ratio(1 - 2 * j as i64, 2, precision))
}

fn binomial_sum(n: usize, precision: usize, term: impl Fn(usize) -> Real) -> Real {
    let mut total = Real::zero(precision);
    let mut binom = Real::one(precision);
    for j in 0..=n {
        let t = &binom * &term(j);
        total = if j % 2 == 0 { &total + &t } else { &total - &t };
        binom = binom * Real::from_ratio((n - j) as i64, j as i64 + 1, precision);
    }
    total
}

/// `f^<n>(x)`.
pub fn finite_difference(oracle: &DiffOracle, n: usize, x: &Real) -> Result<Real, VerifyError> {
    if n > oracle.max_order {
        return Err(precondition(format!("order {n} exceeds the oracle's maximum {}", oracle.max_order)));
    }
    let p = x.precision();
    if x - &Real::from_u64(n as u64, p) < Real::from_i64(oracle.domain_min(), p) {
        return Err(precondition(format!("f^<{n}>({x}) reaches outside the domain")));
    }
    let values: Vec<Real> =
        (0..=n).map(|j| oracle.value(&(x - &Real::from_u64(j as u64, p)))).collect::<Result<_, _>>()?;
    Ok(binomial_sum(n, p, |j| values[j].clone()))
}

/// `f^(k−m)<m>(x)`: the `m`-th difference of the `(k−m)`-th derivative.
pub fn derivative_difference(oracle: &DiffOracle, k: usize, m: usize, x: &Real) -> Result<Real, VerifyError> {
    if m > k {
        return Err(precondition(format!("m = {m} exceeds k = {k}")));
    }
    let p = x.precision();
    let values: Vec<Real> = (0..=m)
        .map(|j| oracle.derivative(k - m, &(x - &Real::from_u64(j as u64, p))))
        .collect::<Result<_, _>>()?;
    Ok(binomial_sum(m, p, |j| values[j].clone()))
}

fn sign_flip(k: usize, v: Real) -> Real {
    if k % 2 == 1 {
        v
    } else {
        -v
    }
}

#[derive(Clone, Debug)]
pub struct DiffBoundPoint {
    pub x: Real,
    /// `(−1)^(k+1) f^(k)(x − k/2)`
    pub lower: Real,
    /// `(−1)^(k+1) f^<k>(x)`
    pub middle: Real,
    /// `(−1)^(k+1) f^(k)(x − k)`
    pub upper: Real,
    pub lower_margin_log2: Real,
    pub upper_margin_log2: Real,
}

#[derive(Clone, Debug)]
pub struct DiffBoundsReport {
    pub k: usize,
    pub precision_bits: usize,
    pub points: Vec<DiffBoundPoint>,
}

impl DiffBoundsReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|pt| certified(&pt.lower_margin_log2) && certified(&pt.upper_margin_log2))
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        self.points
            .iter()
            .flat_map(|pt| {
                let x = pt.x.to_shortest(20);
                [("lower", &pt.lower_margin_log2), ("upper", &pt.upper_margin_log2)].map(|(which, m)| {
                    CheckRecord::new(format!("diff/bounds/k={}/{which}/x={x:0>6}", self.k), self.precision_bits)
                        .param("k", self.k)
                        .param("x", &x)
                        .margin(m)
                })
            })
            .collect()
    }
}

/// Checks `(−1)^(k+1) f^(k)(x − k/2) ≤ (−1)^(k+1) f^<k>(x) ≤ (−1)^(k+1) f^(k)(x − k)`.
pub fn check_diff_bounds(oracle: &DiffOracle, k: usize, x_grid: &[Real]) -> Result<DiffBoundsReport, VerifyError> {
    if k == 0 || k > oracle.max_order {
        return Err(precondition(format!("k = {k} must lie in 1..={}", oracle.max_order)));
    }
    if oracle.function != DiffFunction::Sqrt {
        return Err(precondition("difference bounds are stated for f = √x"));
    }
    let precision_bits = x_grid.first().map(Real::precision).unwrap_or(crate::numerics::DEFAULT_PRECISION);
    let mut points = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        let p = x.precision();
        let kk = Real::from_u64(k as u64, p);
        if *x <= kk {
            return Err(precondition(format!("grid point {x} must exceed k = {k}")));
        }
        let lower = sign_flip(k, oracle.derivative(k, &(x - &kk.mul_pow2(-1)))?);
        let middle = sign_flip(k, finite_difference(oracle, k, x)?);
        let upper = sign_flip(k, oracle.derivative(k, &(x - &kk))?);
        points.push(DiffBoundPoint {
            x: x.clone(),
            lower_margin_log2: log2_margin(&lower, &middle),
            upper_margin_log2: log2_margin(&middle, &upper),
            lower,
            middle,
            upper,
        });
    }
    Ok(DiffBoundsReport { k, precision_bits, points })
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub k: usize,
    pub m: usize,
    pub precision_bits: usize,
    /// `(x, (−1)^(k+1) f^(k−m)<m>(x))`
    pub values: Vec<(Real, Real)>,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.values.iter().all(|(_, v)| certified(v))
    }

    pub fn records(&self) -> Vec<CheckRecord> {
        self.values
            .iter()
            .map(|(x, v)| {
                let x = x.to_shortest(20);
                CheckRecord::new(format!("diff/positivity/k={}/m={}/x={x:0>6}", self.k, self.m), self.precision_bits)
                    .param("k", self.k)
                    .param("m", self.m)
                    .param("x", &x)
                    .passed(certified(v))
            })
            .collect()
    }
}

/// Checks `(−1)^(k+1) f^(k−m)<m>(x) ≥ 0` on the grid.
pub fn check_diff_positivity(oracle: &DiffOracle, k: usize, m: usize, x_grid: &[Real]) -> Result<PositivityReport, VerifyError> {
    if !(1..=4).contains(&k) || m > k {
        return Err(precondition(format!("need 1 ≤ k ≤ 4 and 0 ≤ m ≤ k, got k = {k}, m = {m}")));
    }
    let precision_bits = x_grid.first().map(Real::precision).unwrap_or(crate::numerics::DEFAULT_PRECISION);
    let mut values = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        if *x <= Real::from_u64(m as u64, x.precision()) {
            return Err(precondition(format!("grid point {x} must exceed m = {m}")));
        }
        values.push((x.clone(), sign_flip(k, derivative_difference(oracle, k, m, x)?)));
    }
    Ok(PositivityReport { k, m, precision_bits, values })
}

#[derive(Clone, Debug)]
pub struct AbelReport {
    pub n: usize,
    pub m: usize,
    pub precision_bits: usize,
    pub lhs: Real,
    pub rhs: Real,
    pub abs_diff: Real,
    pub tolerance: Real,
}

impl AbelReport {
    pub fn passed(&self) -> bool {
        self.abs_diff <= self.tolerance
    }

    pub fn record(&self) -> CheckRecord {
        CheckRecord::new(format!("diff/abel/m={}/n={:02}", self.m, self.n), self.precision_bits)
            .param("n", self.n)
            .param("m", self.m)
            .param("abs_diff", self.abs_diff.to_shortest(6))
            .passed(self.passed())
    }
}

/// Evaluates both sides of
/// `Σ_(j≤n) g(j)·f^<m>(j) = G(n)·f^<m>(n) − Σ_(j<n) G(j)·f^<m+1>(j+1)`
/// with `G(j) = Σ_(i≤j) g(i)`. The sequence is extended by zero below its
/// domain; both sides are accumulated with guard bits and compared to
/// `2^−(p−16)`.
pub fn check_abel_decomposition(
    g: impl Fn(usize, usize) -> Real,
    oracle: &DiffOracle,
    n: usize,
    m: usize,
    precision: usize,
) -> Result<AbelReport, VerifyError> {
    if m + 1 > oracle.max_order {
        return Err(precondition(format!("m + 1 = {} exceeds the oracle's maximum order", m + 1)));
    }
    let q = precision + GUARD_BITS;
    let mut partial = Real::zero(q);
    let mut lhs = Real::zero(q);
    let mut correction = Real::zero(q);
    for j in 0..=n {
        let gj = g(j, q);
        lhs = &lhs + &(&gj * &oracle.sequence_difference(m, j as i64, q));
        partial = &partial + &gj;
        if j < n {
            correction = &correction + &(&partial * &oracle.sequence_difference(m + 1, j as i64 + 1, q));
        }
    }
    let rhs = &(&partial * &oracle.sequence_difference(m, n as i64, q)) - &correction;
    let abs_diff = (&lhs - &rhs).abs();
    Ok(AbelReport {
        n,
        m,
        precision_bits: precision,
        lhs: lhs.with_precision(precision)?,
        rhs: rhs.with_precision(precision)?,
        abs_diff: abs_diff.with_precision(precision)?,
        tolerance: Real::pow2(-(precision as i64 - 16), precision),
    })
}

/// `Φ(i) = 3f(i+1) − 3(i+3)f^<1>(i+1) + 3(i²/2 + 5i/2 + 4)f^<2>(i+1)` with
/// `f(n) = √(n+1)`.
pub fn phi(i: u64, precision: usize) -> Result<Real, VerifyError> {
    if i < 1 {
        return Err(precondition("Φ is defined for i ≥ 1"));
    }
    let oracle = DiffOracle::sqrt_shifted();
    let p = precision;
    let x = Real::from_u64(i + 1, p);
    let three = Real::from_u64(3, p);
    let ii = Real::from_u64(i, p);
    let quad = &(&(&ii * &ii).mul_pow2(-1) + &(Real::from_ratio(5, 2, p) * &ii)) + &Real::from_u64(4, p);
    let t0 = &three * &oracle.value(&x)?;
    let t1 = &three * &(Real::from_u64(i + 3, p) * finite_difference(&oracle, 1, &x)?);
    let t2 = &three * &(quad * finite_difference(&oracle, 2, &x)?);
    Ok(&(&t0 - &t1) + &t2)
}

/// `12√3 − 30√2 + 21`.
pub fn phi_at_one(precision: usize) -> Real {
    let p = precision;
    let r3 = Real::from_u64(3, p).sqrt();
    let r2 = Real::from_u64(2, p).sqrt();
    &(&(Real::from_u64(12, p) * r3) - &(Real::from_u64(30, p) * r2)) + &Real::from_u64(21, p)
}

/// `9/8·√i − 51/8·i^(−1/2) − 3·i^(−3/2)`, a lower estimate of `Φ(i)`.
pub fn phi_binding_lower_bound(i: u64, precision: usize) -> Real {
    let p = precision;
    let r = Real::from_u64(i, p).sqrt();
    let inv = r.recip();
    let inv3 = &inv / &Real::from_u64(i, p);
    &(&(Real::from_ratio(9, 8, p) * &r) - &(Real::from_ratio(51, 8, p) * &inv)) - &(Real::from_u64(3, p) * inv3)
}

/// `g_k(n)` from its definition: `g_0(n) = 2^n`, `g_k(n) = Σ_(j≤n) g_(k−1)(j)`.
pub fn g_sequence(k: usize, n_max: usize) -> Vec<i128> {
    let mut cur: Vec<i128> = (0..=n_max).map(|n| 1i128 << n).collect();
    for _ in 0..k {
        let mut acc = 0i128;
        cur = cur
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
    }
    cur
}

/// Closed forms of `g_1`, `g_2`, `g_3`.
pub fn g_closed_form(k: usize, n: usize) -> Option<i128> {
    let n2 = n as i128;
    match k {
        1 => Some((1i128 << (n + 1)) - 1),
        2 => Some((1i128 << (n + 2)) - n2 - 3),
        3 => Some((1i128 << (n + 3)) - (n2 * n2 + 7 * n2) / 2 - 7),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DEFAULT_PRECISION as P;

    fn r(n: i64) -> Real {
        Real::from_i64(n, P)
    }

    fn close(a: &Real, b: &Real, rel_bits: i64) -> bool {
        (a - b).abs() <= b.abs() * Real::pow2(-rel_bits, P)
    }

    /// Difference straight from the recursive definition.
    fn recursive(o: &DiffOracle, n: usize, x: &Real) -> Real {
        if n == 0 {
            o.value(x).unwrap()
        } else {
            recursive(o, n - 1, x) - recursive(o, n - 1, &(x - &Real::one(P)))
        }
    }

    #[test]
    fn difference_examples() {
        let o = DiffOracle::sqrt();
        let d1 = finite_difference(&o, 1, &r(4)).unwrap();
        assert!(close(&d1, &(r(2) - r(3).sqrt()), 240));
        assert_eq!(finite_difference(&o, 0, &r(9)).unwrap(), r(3));
        let d2 = finite_difference(&o, 2, &r(4)).unwrap();
        let expect = &(r(2) - r(3).sqrt().mul_pow2(1)) + &r(2).sqrt();
        assert!(close(&d2, &expect, 230));
        assert!((d2.to_f64() + 0.0499).abs() < 1e-4);
        assert!(finite_difference(&o, 3, &r(2)).is_err());
    }

    #[test]
    fn binomial_sum_matches_recursion() {
        for o in [DiffOracle::sqrt(), DiffOracle::sqrt_shifted()] {
            for n in 0..=6 {
                for x in [7, 10, 25] {
                    let a = finite_difference(&o, n, &r(x)).unwrap();
                    let b = recursive(&o, n, &r(x));
                    assert!((&a - &b).abs() <= Real::pow2(-220, P), "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn differences_compose() {
        // (f^<a>)^<b> = f^<a+b>
        let o = DiffOracle::sqrt();
        let x = r(20);
        for a in 0..=3 {
            for b in 0..=3 {
                let composed = binomial_sum(b, P, |j| finite_difference(&o, a, &(&x - &r(j as i64))).unwrap());
                let direct = finite_difference(&o, a + b, &x).unwrap();
                assert!((&composed - &direct).abs() <= Real::pow2(-220, P));
            }
        }
    }

    #[test]
    fn derivative_coefficients() {
        let expect = [(1, 1, 2), (2, -1, 4), (3, 3, 8), (4, -15, 16)];
        for (k, num, den) in expect {
            assert_eq!(sqrt_derivative_coefficient(k, P), Real::from_ratio(num, den, P));
        }
        assert_eq!(sqrt_derivative_coefficient(0, P), Real::one(P));
    }

    #[test]
    fn derivatives_match_fine_differences() {
        // central difference of f^(k−1) with step 2^−20
        let o = DiffOracle::sqrt();
        let x = Real::from_ratio(13, 4, P);
        let h = Real::pow2(-20, P);
        for k in 1..=4 {
            let fwd = o.derivative(k - 1, &(&x + &h)).unwrap();
            let back = o.derivative(k - 1, &(&x - &h)).unwrap();
            let numeric = (fwd - back) / h.mul_pow2(1);
            let exact = o.derivative(k, &x).unwrap();
            assert!((numeric - &exact).abs() <= exact.abs() * Real::pow2(-30, P), "k={k}");
        }
    }

    #[test]
    fn bounds_first_order_example() {
        let rep = check_diff_bounds(&DiffOracle::sqrt(), 1, &[r(2)]).unwrap();
        let pt = &rep.points[0];
        assert!((pt.lower.to_f64() - 0.408248).abs() < 1e-6);
        assert!((pt.middle.to_f64() - 0.414214).abs() < 1e-6);
        assert_eq!(pt.upper, Real::from_ratio(1, 2, P));
        assert!(rep.passed());
    }

    #[test]
    fn bounds_second_order_signs() {
        let o = DiffOracle::sqrt();
        let x = r(3);
        assert!(o.derivative(2, &Real::from_ratio(2, 1, P)).unwrap().is_negative());
        assert!(finite_difference(&o, 2, &x).unwrap().is_negative());
        assert!(o.derivative(2, &r(1)).unwrap().is_negative());
        assert!(check_diff_bounds(&o, 2, &[x]).unwrap().passed());
    }

    #[test]
    fn bounds_reject_small_x() {
        assert!(check_diff_bounds(&DiffOracle::sqrt(), 1, &[r(1)]).is_err());
        assert!(check_diff_bounds(&DiffOracle::sqrt(), 5, &[r(3)]).is_err());
    }

    #[test]
    fn bounds_hold_on_grids() {
        for k in 1..=4usize {
            let grid: Vec<Real> = (1..=50).map(|j| r(k as i64 + j)).collect();
            assert!(check_diff_bounds(&DiffOracle::sqrt(), k, &grid).unwrap().passed(), "k={k}");
        }
    }

    #[test]
    fn positivity_holds() {
        for k in 1..=4usize {
            for m in 0..=k {
                let grid: Vec<Real> = (1..=50).map(|j| r(m as i64 + j)).collect();
                assert!(check_diff_positivity(&DiffOracle::sqrt(), k, m, &grid).unwrap().passed(), "k={k} m={m}");
            }
        }
        assert!(check_diff_positivity(&DiffOracle::sqrt(), 5, 0, &[r(1)]).is_err());
        assert!(check_diff_positivity(&DiffOracle::sqrt(), 2, 3, &[r(5)]).is_err());
        assert!(check_diff_positivity(&DiffOracle::sqrt(), 2, 1, &[r(1)]).is_err());
    }

    #[test]
    fn abel_identity() {
        let o = DiffOracle::sqrt_shifted();
        let pow = |j: usize, q: usize| Real::pow2(j as i64, q);
        for m in 0..=2 {
            for n in 0..=32 {
                let rep = check_abel_decomposition(pow, &o, n, m, P).unwrap();
                assert!(rep.passed(), "n={n} m={m} diff={}", rep.abs_diff);
            }
        }
        let zero = check_abel_decomposition(pow, &o, 0, 1, P).unwrap();
        assert_eq!(zero.lhs, o.sequence_difference(1, 0, P));
    }

    #[test]
    fn phi_values() {
        let p1 = phi(1, P).unwrap();
        assert!(close(&p1, &phi_at_one(P), 200));
        assert!((p1.to_f64() + 0.642).abs() < 1e-3);
        let b5 = phi_binding_lower_bound(5, P);
        let expect = -(Real::from_ratio(27, 100, P) * Real::from_u64(5, P).sqrt());
        assert!(close(&b5, &expect, 240));
        for i in 1..=100 {
            assert!(phi(i, P).unwrap() >= p1, "i={i}");
        }
        assert!(phi(5, P).unwrap() >= b5);
        assert!(phi(0, P).is_err());
    }

    #[test]
    fn g_sequences_match_closed_forms() {
        for k in 1..=3 {
            let seq = g_sequence(k, 64);
            for (n, v) in seq.iter().enumerate() {
                assert_eq!(Some(*v), g_closed_form(k, n), "k={k} n={n}");
            }
        }
    }
}
