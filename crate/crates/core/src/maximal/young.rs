use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Identity,
    Power(f64),
    /// `t (1 + log⁺ t)^δ`
    LLogL(f64),
    /// `e^t - 1`
    ExpL,
    /// `Ψ(t^{1/ρ})`
    Rescaled(Box<YoungFunction>, f64),
    Custom(Evaluator),
}

/// A Young function `Ψ`: convex, increasing, `Ψ(0) = 0`, `Ψ(t) → ∞`.
#[derive(Clone)]
pub struct YoungFunction {
    label: String,
    kind: Kind,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("YoungFunction")
            .field("label", &self.label)
            .finish()
    }
}

/// `log⁺ t = max(0, ln t)`.
pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

impl YoungFunction {
    pub fn identity() -> Self {
        Self {
            label: "identity".into(),
            kind: Kind::Identity,
        }
    }

    /// `t^r`, `r >= 1`.
    pub fn power(r: f64) -> Result<Self> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::param("r", r, "power Young functions need r >= 1"));
        }
        Ok(Self {
            label: format!("power:{r}"),
            kind: Kind::Power(r),
        })
    }

    /// `t (1 + log⁺ t)^δ`, `δ > 0`.
    pub fn llogl(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::param("delta", delta, "must be positive"));
        }
        Ok(Self {
            label: format!("llogl:{delta}"),
            kind: Kind::LLogL(delta),
        })
    }

    /// The Zygmund class `L log L`.
    pub fn llogl1() -> Self {
        Self::llogl(1.0).expect("delta = 1 is valid")
    }

    pub fn expl() -> Self {
        Self {
            label: "expl".into(),
            kind: Kind::ExpL,
        }
    }

    /// `Ψ_ρ(t) = Ψ(t^{1/ρ})`.
    pub fn rescaled(&self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::param("rho", rho, "must be positive"));
        }
        Ok(Self {
            label: format!("{}@{rho}", self.label),
            kind: Kind::Rescaled(Box::new(self.clone()), rho),
        })
    }

    /// An arbitrary evaluator; call [`YoungFunction::validate`] before trusting it.
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            kind: Kind::Custom(Arc::new(f)),
        }
    }

    /// Parses `"identity"`, `"power:r"`, `"llogl:δ"` and `"expl"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("young function '{spec}' needs a number")))
        };
        match name {
            "identity" => Ok(Self::identity()),
            "power" => Self::power(num(arg)?),
            "llogl" => Self::llogl(arg.map_or(Ok(1.0), |_| num(arg))?),
            "expl" => Ok(Self::expl()),
            _ => Err(Error::Config(format!("unknown young function '{spec}'"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, Kind::Identity)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Identity => t,
            Kind::Power(r) => t.powf(*r),
            Kind::LLogL(d) => t * (1.0 + log_plus(t)).powf(*d),
            Kind::ExpL => t.exp_m1(),
            Kind::Rescaled(base, rho) => base.eval(t.powf(1.0 / rho)),
            Kind::Custom(f) => f(t),
        }
    }

    /// Analytic inverse where one is cheap.
    pub fn inverse(&self, y: f64) -> Option<f64> {
        match &self.kind {
            Kind::Identity => Some(y),
            Kind::Power(r) => Some(y.powf(1.0 / r)),
            Kind::ExpL => Some(y.ln_1p()),
            _ => None,
        }
    }

    /// Checks the defining properties on a sampled grid: `Ψ(0) = 0`, strict
    /// increase, midpoint convexity, and growth past `1e6` at a sentinel.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Numeric(format!("{}: {what}", self.label)));
        if self.eval(0.0).abs() > 1e-300 {
            return bad("Ψ(0) != 0");
        }
        // stop where Ψ overflows
        let ts: Vec<f64> = (0..=400)
            .map(|i| 1e-6 * 10f64.powf(i as f64 / 40.0))
            .take_while(|&t| self.eval(t).is_finite())
            .collect();
        let mut prev = 0.0;
        for &t in &ts {
            let v = self.eval(t);
            if !(v > prev) {
                return bad("not strictly increasing");
            }
            prev = v;
        }
        for w in ts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = self.eval(0.5 * (a + b));
            let chord = 0.5 * (self.eval(a) + self.eval(b));
            if mid > chord * (1.0 + 1e-12) {
                return bad("midpoint convexity fails");
            }
        }
        let sentinel = self.eval(1e6);
        if !(sentinel >= 1e6) {
            return bad("Ψ does not grow without bound");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_functions_are_young() {
        for y in [
            YoungFunction::identity(),
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::llogl1(),
            YoungFunction::llogl(0.5).unwrap(),
            YoungFunction::expl(),
        ] {
            y.validate().unwrap();
        }
    }

    #[test]
    fn degenerate_functions_fail_validation() {
        assert!(YoungFunction::custom("flat", |t| t.min(1.0)).validate().is_err());
        assert!(YoungFunction::custom("concave", |t| t.sqrt()).validate().is_err());
        assert!(YoungFunction::custom("offset", |t| t + 1.0).validate().is_err());
        assert!(YoungFunction::power(0.5).is_err());
    }

    #[test]
    fn log_plus_bound() {
        // 1 + log⁺ t <= t^δ / δ for δ in (0, 1]
        for delta in [0.1, 0.5, 1.0] {
            for i in 0..2000 {
                let t = 1e-3 * 1.01f64.powi(i);
                assert!(1.0 + log_plus(t) <= t.powf(delta) / delta * (1.0 + 1e-12) || t < 1.0);
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(YoungFunction::parse("llogl:2").unwrap().eval(std::f64::consts::E), {
            let e = std::f64::consts::E;
            e * 4.0
        });
        assert!(YoungFunction::parse("power:3").unwrap().eval(2.0) == 8.0);
        assert!(YoungFunction::parse("expl").is_ok());
        assert!(YoungFunction::parse("identity").unwrap().is_identity());
        assert!(YoungFunction::parse("cosh").is_err());
        assert!(YoungFunction::parse("power").is_err());
        let r = YoungFunction::power(2.0).unwrap().rescaled(2.0).unwrap();
        assert!((r.eval(3.0) - 3.0).abs() < 1e-12);
    }
}
