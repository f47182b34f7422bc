use super::decomposition::DecompositionPlan;
use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use serde::Serialize;

/// Constants of an `ω`-Calderón–Zygmund operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CzBound {
    pub l2_norm: f64,
    pub c_k: f64,
    pub dini: f64,
    /// `‖T‖_{L²} + C_K + ‖ω‖_Dini`.
    pub c_t: f64,
}

impl CzBound {
    pub fn new(l2_norm: f64, c_k: f64, dini: f64) -> Result<Self> {
        for (name, v) in [("l2_norm", l2_norm), ("c_k", c_k), ("dini", dini)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, v, "must be finite and nonnegative"));
            }
        }
        Ok(Self {
            l2_norm,
            c_k,
            dini,
            c_t: l2_norm + c_k + dini,
        })
    }

    /// Bound for the piece `T̃_j` with modulus [`piece_modulus`] and a given
    /// (estimated) `L²` norm.
    pub fn for_piece(kernel: &KernelSpec, j: u32, l2_norm: f64) -> Result<Self> {
        let sup = kernel.norm_inf();
        let dini = dini_norm(|t| piece_modulus(sup, j, t))?;
        Self::new(l2_norm, sup, dini)
    }
}

/// `ω_j(t) = ‖Ω‖_∞ min(1, 2^{N(j)} t)`, the modulus shape of the `j`-th piece
/// with the dimensional factor taken as 1.
pub fn piece_modulus(omega_sup: f64, j: u32, t: f64) -> f64 {
    let n = DecompositionPlan::schedule(j as i64) as f64;
    omega_sup * (2f64.powf(n) * t).min(1.0)
}

/// Trapezoid rule for `∫_a^b ω(e^u) du`, doubled until stable to `1e-10`.
fn log_chunk(omega: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let g = |u: f64| -> Result<f64> {
        let v = omega(u.exp());
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "modulus must be finite and nonnegative, got {v} at t = {:e}",
                u.exp()
            )));
        }
        Ok(v)
    };
    let mut n = 64usize;
    let mut step = (b - a) / n as f64;
    let mut sum = 0.5 * (g(a)? + g(b)?);
    for i in 1..n {
        sum += g(a + i as f64 * step)?;
    }
    let mut prev = sum * step;
    loop {
        // add the midpoints of the current panels
        let mut mids = 0.0;
        for i in 0..n {
            mids += g(a + (i as f64 + 0.5) * step)?;
        }
        sum += mids;
        n *= 2;
        step *= 0.5;
        let cur = sum * step;
        if (cur - prev).abs() <= 1e-10 * cur.abs() || cur == 0.0 {
            return Ok(cur);
        }
        if n > 1 << 22 {
            return Err(Error::Numeric("Dini quadrature does not settle".into()));
        }
        prev = cur;
    }
}

/// `‖ω‖_Dini = ∫_0^1 ω(t)/t dt`, in `u = ln t` on chunks of six decades pushed
/// toward 0 until a chunk adds less than `1e-10` of the total.
pub fn dini_norm(omega: impl Fn(f64) -> f64) -> Result<f64> {
    let chunk = 6.0 * std::f64::consts::LN_10;
    let floor = 1e-300f64.ln();
    let mut total = 0.0;
    let mut hi = 0.0;
    while hi > floor {
        let lo = (hi - chunk).max(floor);
        let part = log_chunk(&omega, lo, hi)?;
        total += part;
        if part <= 1e-10 * total {
            return Ok(total);
        }
        hi = lo;
    }
    Err(Error::Numeric(
        "Dini integral diverges: the modulus does not vanish at 0".into(),
    ))
}

/// Terms `(1 + N(j)) 2^{-α N(j-1) θ}` for `j = 0..=j_max`.
pub fn summation_terms(alpha: f64, theta: f64, j_max: u32) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", alpha, "must be positive"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param("theta", theta, "needs 0 < theta < 1"));
    }
    if j_max > 62 {
        return Err(Error::param("j_max", j_max as f64, "schedule overflows past 62"));
    }
    Ok((0..=j_max as i64)
        .map(|j| {
            let n = DecompositionPlan::schedule(j) as f64;
            let prev = DecompositionPlan::schedule(j - 1) as f64;
            (1.0 + n) * 2f64.powf(-alpha * prev * theta)
        })
        .collect())
}

/// `Σ_{j <= J} (1 + N(j)) 2^{-α N(j-1) θ}`, rejected unless the neglected tail
/// is below `1e-12` of the sum (the terms decay faster than geometrically once
/// the last ratio drops below 1, so `last · ρ / (1 - ρ)` bounds the tail).
pub fn summation_bound(alpha: f64, theta: f64, j_max: u32) -> Result<f64> {
    let terms = summation_terms(alpha, theta, j_max)?;
    let sum: f64 = terms.iter().sum();
    let n = terms.len();
    let (last, prev) = (terms[n - 1], if n > 1 { terms[n - 2] } else { f64::INFINITY });
    let rho = last / prev;
    let tail = if last == 0.0 {
        0.0
    } else if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    if !(tail <= 1e-12 * sum) {
        return Err(Error::Numeric(format!(
            "summation truncated at J = {j_max} leaves tail {tail:e} of sum {sum:e}"
        )));
    }
    Ok(sum)
}

/// Smallest `J` at which [`summation_bound`] accepts the truncation.
pub fn summation_j_max(alpha: f64, theta: f64) -> Result<u32> {
    for j in 1..=62 {
        if summation_bound(alpha, theta, j).is_ok() {
            return Ok(j);
        }
    }
    Err(Error::Numeric(format!(
        "summation does not converge for alpha = {alpha}, theta = {theta}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dini_examples() {
        assert!((dini_norm(|t| t).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(dini_norm(|_| 0.0).unwrap(), 0.0);
        for n in [0.0, 2.0, 8.0] {
            let exact = 1.0 + n * std::f64::consts::LN_2;
            let got = dini_norm(|t: f64| (2f64.powf(n) * t).min(1.0)).unwrap();
            assert!((got - exact).abs() < 1e-6 * exact, "{got} vs {exact}");
        }
        assert!(matches!(dini_norm(|_| 1.0), Err(Error::Numeric(_))));
        assert!(dini_norm(|t| -t).is_err());
    }

    #[test]
    fn cz_bound_sums_components() {
        let k = KernelSpec::hilbert(1).unwrap();
        let b = CzBound::for_piece(&k, 2, 0.5).unwrap();
        assert!((b.c_t - (0.5 + 1.0 + b.dini)).abs() < 1e-15);
        assert!((b.dini - (1.0 + 4.0 * std::f64::consts::LN_2)).abs() < 1e-6);
        assert!(CzBound::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn summation_is_monotone_in_theta() {
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let theta = i as f64 / 100.0;
            let s = summation_bound(1.0, theta, summation_j_max(1.0, 0.01).unwrap()).unwrap();
            assert!(s < prev);
            prev = s;
        }
        assert!(summation_bound(1.0, 0.5, 1).is_err());
        assert!(summation_bound(0.0, 0.5, 10).is_err());
        assert!(summation_bound(1.0, 1.0, 10).is_err());
    }
}
