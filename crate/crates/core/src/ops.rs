//! Scalar and sequence operators: the centered modulo fold, forward
//! differences, anti-differences and rounding onto the `2λℤ` grid.

use crate::error::{Error, Result};

/// Relative guard band applied before truncating floats that should sit on
/// an integer.
pub(crate) const GUARD: f64 = 1e-12;

/// Modulo half-range `λ` of a self-reset detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Threshold(lambda))
        } else {
            Err(Error::Domain(format!(
                "threshold must be positive and finite, got {lambda}"
            )))
        }
    }

    #[inline]
    pub fn lambda(self) -> f64 {
        self.0
    }

    /// Width `2λ` of one fold.
    #[inline]
    pub fn period(self) -> f64 {
        2.0 * self.0
    }

    /// Number of periods `n` such that `t - 2λn` lies in `[-λ, λ)`.
    #[inline]
    pub fn fold_count(self, t: f64) -> f64 {
        let period = self.period();
        let n = ((t + self.0) / period).floor();
        let r = t - period * n;
        if r >= self.0 {
            n + 1.0
        } else if r < -self.0 {
            n - 1.0
        } else {
            n
        }
    }

    /// `M_λ(t) = t - 2λ⌊(t+λ)/(2λ)⌋`, without the finiteness check.
    ///
    /// The subtraction `t - 2λn` is exact (both operands are within a
    /// factor of two of each other), so adding back the same `2λn` returns
    /// `t` bit for bit. When `t` sits within an ulp of an odd multiple of
    /// `λ`, the rounded product can push the result just outside the
    /// interval; it is then clamped.
    #[inline]
    pub fn fold(self, t: f64) -> f64 {
        let r = t - self.period() * self.fold_count(t);
        if r >= self.0 {
            f64::from_bits(self.0.to_bits() - 1)
        } else if r < -self.0 {
            -self.0
        } else {
            r
        }
    }

    /// Nearest multiple `m` of `2λ` in the sense `m = ⌈⌊x/λ⌋ / 2⌉`.
    #[inline]
    pub fn grid_index(self, x: f64) -> f64 {
        let q = guarded_floor(x / self.0);
        (q / 2.0).ceil()
    }

    /// Distance of `x` from the closest point of `2λℤ`.
    #[inline]
    pub fn grid_distance(self, x: f64) -> f64 {
        let period = self.period();
        (x - period * (x / period).round()).abs()
    }
}

/// Floor that snaps values within a relative `1e-12` band of an integer onto it.
#[inline]
pub(crate) fn guarded_floor(q: f64) -> f64 {
    let r = q.round();
    if (q - r).abs() <= GUARD * q.abs().max(1.0) {
        r
    } else {
        q.floor()
    }
}

/// Ceiling with the same guard band as [`guarded_floor`].
#[inline]
pub(crate) fn guarded_ceil(q: f64) -> f64 {
    let r = q.round();
    if (q - r).abs() <= GUARD * q.abs().max(1.0) {
        r
    } else {
        q.ceil()
    }
}

/// Centered `2λ`-modulo: `M_λ(t) = t - 2λ⌊(t+λ)/(2λ)⌋ ∈ [-λ, λ)`.
pub fn modulo_fold(t: f64, thr: Threshold) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("cannot fold non-finite value {t}")));
    }
    Ok(thr.fold(t))
}

/// Rounds `x` onto `2λℤ` as `2λ⌈⌊x/λ⌋/2⌉`. Points already on the grid are fixed.
pub fn round_to_2lambda(x: f64, thr: Threshold) -> f64 {
    thr.period() * thr.grid_index(x)
}

/// A finite real sequence carrying the signed index of its first element.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeq {
    base: i64,
    values: Vec<f64>,
}

impl SampleSeq {
    pub fn new(base: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Size("sample sequence must be non-empty".into()));
        }
        Ok(SampleSeq { base, values })
    }

    pub fn zeros(base: i64, len: usize) -> Result<Self> {
        Self::new(base, vec![0.0; len])
    }

    /// Sequence over `lo..=hi` with `value(k)` at each index.
    pub fn from_fn(lo: i64, hi: i64, value: impl FnMut(i64) -> f64) -> Result<Self> {
        if hi < lo {
            return Err(Error::Size(format!("empty index range {lo}..={hi}")));
        }
        Self::new(lo, (lo..=hi).map(value).collect())
    }

    #[inline]
    pub fn base(&self) -> i64 {
        self.base
    }

    /// Index of the last element.
    #[inline]
    pub fn last_index(&self) -> i64 {
        self.base + self.values.len() as i64 - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn contains(&self, k: i64) -> bool {
        k >= self.base && k <= self.last_index()
    }

    /// Value at absolute index `k`.
    #[inline]
    pub fn get(&self, k: i64) -> Option<f64> {
        if self.contains(k) {
            Some(self.values[(k - self.base) as usize])
        } else {
            None
        }
    }

    /// Iterator over `(index, value)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.base + i as i64, v))
    }

    /// Copy of the sub-sequence over `lo..=hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi || !self.contains(lo) || !self.contains(hi) {
            return Err(Error::Size(format!(
                "range {lo}..={hi} not inside {}..={}",
                self.base,
                self.last_index()
            )));
        }
        let start = (lo - self.base) as usize;
        let end = (hi - self.base) as usize + 1;
        Self::new(lo, self.values[start..end].to_vec())
    }

    /// Maximum absolute value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SampleSeq {
            base: self.base,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// `N`-th order forward difference `(Δ^N a)[k] = Σ_m C(N,m)(-1)^(N-m) a[k+m]`.
///
/// The result has `a.len() - N` entries and keeps the base index.
pub fn forward_diff(a: &SampleSeq, order: usize) -> Result<SampleSeq> {
    if a.len() <= order {
        return Err(Error::Size(format!(
            "difference of order {order} needs more than {order} samples, got {}",
            a.len()
        )));
    }
    let mut v = a.values.clone();
    for _ in 0..order {
        for i in 0..v.len() - 1 {
            v[i] = v[i + 1] - v[i];
        }
        v.pop();
    }
    Ok(SampleSeq {
        base: a.base,
        values: v,
    })
}

/// Anti-difference anchored at the base index: `(S a)[k] = Σ_{j=base}^{k-1} a[j]`.
///
/// The result is one element longer than `a` and starts with zero, so that
/// `S(Δa) = a - a[base]`.
pub fn anti_diff(a: &SampleSeq) -> SampleSeq {
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for &v in &a.values {
        acc += v;
        out.push(acc);
    }
    SampleSeq {
        base: a.base,
        values: out,
    }
}

/// Anti-difference anchored at index zero:
/// `Σ_{j=0}^{k-1} a[j]` for `k > 0`, `0` at `k = 0`, `-Σ_{j=k}^{-1} a[j]` for `k < 0`.
///
/// The result covers `base..=base+len`, so `S(Δa) = a - a[0]` on the input range.
pub fn anti_diff_bilateral(a: &SampleSeq) -> Result<SampleSeq> {
    if !a.contains(0) {
        return Err(Error::Domain(format!(
            "bilateral anti-difference needs index 0 inside {}..={}",
            a.base,
            a.last_index()
        )));
    }
    let zero = (-a.base) as usize;
    let mut out = vec![0.0; a.len() + 1];
    let mut acc = 0.0;
    for i in zero..a.len() {
        acc += a.values[i];
        out[i + 1] = acc;
    }
    acc = 0.0;
    for i in (0..zero).rev() {
        acc -= a.values[i];
        out[i] = acc;
    }
    Ok(SampleSeq {
        base: a.base,
        values: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thr(l: f64) -> Threshold {
        Threshold::new(l).unwrap()
    }

    #[test]
    fn fold_examples() {
        assert_eq!(modulo_fold(0.3, thr(1.0)).unwrap(), 0.3);
        assert_eq!(modulo_fold(1.0, thr(1.0)).unwrap(), -1.0);
        assert_eq!(modulo_fold(0.025, thr(0.025)).unwrap(), -0.025);
        assert_eq!(modulo_fold(2.5, thr(1.0)).unwrap(), 0.5);
        assert_eq!(modulo_fold(-2.5, thr(1.0)).unwrap(), -0.5);
        assert!(modulo_fold(f64::NAN, thr(1.0)).is_err());
        assert!(modulo_fold(f64::INFINITY, thr(1.0)).is_err());
    }

    #[test]
    fn threshold_rejects_nonpositive() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(-1.0).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
    }

    #[test]
    fn fold_stays_half_open_near_boundaries() {
        let t = thr(0.025);
        for n in -50..50 {
            let edge = (2 * n + 1) as f64 * 0.025;
            for x in [edge, f64::from_bits(edge.to_bits() + 1), f64::from_bits(edge.to_bits() - 1)] {
                let r = t.fold(x);
                assert!((-0.025..0.025).contains(&r), "x={x} folded to {r}");
            }
        }
    }

    #[test]
    fn forward_diff_examples() {
        let a = SampleSeq::new(0, vec![0.0, 1.0, 4.0, 9.0]).unwrap();
        assert_eq!(forward_diff(&a, 1).unwrap().values(), &[1.0, 3.0, 5.0]);
        assert_eq!(forward_diff(&a, 2).unwrap().values(), &[2.0, 2.0]);
        let c = SampleSeq::new(-3, vec![7.5; 6]).unwrap();
        let d = forward_diff(&c, 1).unwrap();
        assert_eq!(d.base(), -3);
        assert!(d.values().iter().all(|&v| v == 0.0));
        assert!(forward_diff(&a, 4).is_err());
    }

    #[test]
    fn forward_diff_matches_binomial_sum() {
        let a = SampleSeq::new(-2, vec![3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, 6.0]).unwrap();
        for order in 1..a.len() {
            let d = forward_diff(&a, order).unwrap();
            for (i, &v) in d.values().iter().enumerate() {
                let mut expect = 0.0;
                let mut binom = 1.0;
                for m in 0..=order {
                    let sign = if (order - m) % 2 == 0 { 1.0 } else { -1.0 };
                    expect += sign * binom * a.values()[i + m];
                    binom = binom * (order - m) as f64 / (m + 1) as f64;
                }
                assert_eq!(v, expect);
            }
        }
    }

    #[test]
    fn anti_diff_examples() {
        let a = SampleSeq::new(-1, vec![1.0, 3.0, 5.0]).unwrap();
        let s = anti_diff(&a);
        assert_eq!(s.base(), -1);
        assert_eq!(s.values(), &[0.0, 1.0, 4.0, 9.0]);
        let z = anti_diff(&SampleSeq::zeros(4, 5).unwrap());
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bilateral_examples() {
        let a = SampleSeq::new(-2, vec![1.0; 4]).unwrap();
        let s = anti_diff_bilateral(&a).unwrap();
        assert_eq!(s.base(), -2);
        assert_eq!(s.values(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(anti_diff_bilateral(&SampleSeq::new(1, vec![1.0]).unwrap()).is_err());
        assert!(anti_diff_bilateral(&SampleSeq::new(-3, vec![1.0, 2.0]).unwrap()).is_err());

        // S(Δa) = a - a[0]
        let a = SampleSeq::new(-3, vec![2.0, 5.0, -1.0, 4.0, 4.0, 0.0, -2.0]).unwrap();
        let s = anti_diff_bilateral(&forward_diff(&a, 1).unwrap()).unwrap();
        let a0 = a.get(0).unwrap();
        for (k, v) in a.indexed() {
            assert_eq!(s.get(k).unwrap(), v - a0);
        }
    }

    #[test]
    fn rounding_examples() {
        let t = thr(0.1);
        assert_eq!(round_to_2lambda(0.4, t), 0.4);
        assert_eq!(round_to_2lambda(0.0, t), 0.0);
        assert_eq!(round_to_2lambda(0.23, t), 0.2);
        assert_eq!(round_to_2lambda(-0.15, t), -0.2);
        assert_eq!(round_to_2lambda(0.19, t), 0.2);
        assert_eq!(round_to_2lambda(-0.05, t), 0.0);
        let lam = 0.00025;
        let t = thr(lam);
        for m in -5000..5000 {
            let x = 2.0 * lam * m as f64;
            assert_eq!(round_to_2lambda(x, t), x);
        }
    }

    #[test]
    fn restrict_and_lookup() {
        let a = SampleSeq::from_fn(-3, 3, |k| k as f64).unwrap();
        assert_eq!(a.get(-3), Some(-3.0));
        assert_eq!(a.get(4), None);
        let r = a.restrict(-1, 2).unwrap();
        assert_eq!(r.base(), -1);
        assert_eq!(r.values(), &[-1.0, 0.0, 1.0, 2.0]);
        assert!(a.restrict(-4, 0).is_err());
        assert!(SampleSeq::new(0, vec![]).is_err());
    }
}
