//! Integer eigenvalues of a DSRG parameter set and the necessary conditions
//! they impose.

use thiserror::Error;

use super::DsrgParams;

/// Eigenvalues `k = θ0 > θ1 > θ2` with multiplicities `1, m1, m2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spectrum {
    pub theta0: i64,
    pub theta1: i64,
    pub theta2: i64,
    pub delta: u64,
    pub m0: u64,
    pub m1: u64,
    pub m2: u64,
}

impl std::fmt::Display for Spectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "theta {} {} {} mult {} {} {}",
            self.theta0, self.theta1, self.theta2, self.m0, self.m1, self.m2
        )
    }
}

/// Why a parameter set has no integral spectrum.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    /// `δ² = (μ-λ)² + 4(t-μ)` is not the square of a positive integer.
    #[error("delta^2={delta_sq}")]
    DeltaNotInteger { delta_sq: i128 },
    /// Kept for completeness: `δ² ≡ (μ-λ)² (mod 4)` makes `λ - μ + δ` even
    /// whenever δ is an integer.
    #[error("lambda-mu+delta={numerator} is odd")]
    HalvesNotInteger { numerator: i128 },
    #[error("multiplicity {numerator}/{delta} is not an integer")]
    MultiplicityNotInteger { numerator: i128, delta: i128 },
    #[error("multiplicity {value} is negative")]
    MultiplicityNegative { value: i128 },
}

impl Infeasible {
    pub fn reason(&self) -> &'static str {
        match self {
            Infeasible::DeltaNotInteger { .. } => "delta_not_integer",
            Infeasible::HalvesNotInteger { .. } => "halves_not_integer",
            Infeasible::MultiplicityNotInteger { .. } => "multiplicity_not_integer",
            Infeasible::MultiplicityNegative { .. } => "multiplicity_negative",
        }
    }
}

/// Evaluates the eigenvalue formulas exactly.
///
/// Only integrality is checked here; the parameter invariants are the job of
/// [`DsrgParams::validate`] and are both reported by [`feasibility`].
pub fn spectrum(p: &DsrgParams) -> Result<Spectrum, Infeasible> {
    let (v, k, t, lambda, mu) = (
        p.v as i128,
        p.k as i128,
        p.t as i128,
        p.lambda as i128,
        p.mu as i128,
    );
    let delta_sq = (mu - lambda) * (mu - lambda) + 4 * (t - mu);
    let delta = match exact_sqrt(delta_sq) {
        Some(d) if d > 0 => d,
        _ => return Err(Infeasible::DeltaNotInteger { delta_sq }),
    };
    let numerator = lambda - mu + delta;
    if numerator % 2 != 0 {
        return Err(Infeasible::HalvesNotInteger { numerator });
    }
    let theta1 = numerator / 2;
    let theta2 = theta1 - delta;

    let multiplicity = |numerator: i128| {
        if numerator % delta != 0 {
            return Err(Infeasible::MultiplicityNotInteger { numerator, delta });
        }
        let value = numerator / delta;
        if value < 0 {
            return Err(Infeasible::MultiplicityNegative { value });
        }
        Ok(value)
    };
    let m1 = multiplicity(-(k + theta2 * (v - 1)))?;
    let m2 = multiplicity(k + theta1 * (v - 1))?;

    Ok(Spectrum {
        theta0: k as i64,
        theta1: theta1 as i64,
        theta2: theta2 as i64,
        delta: delta as u64,
        m0: 1,
        m1: m1 as u64,
        m2: m2 as u64,
    })
}

fn exact_sqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let r = (x as u128).isqrt() as i128;
    (r * r == x).then_some(r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of every necessary condition; passing them all proves nothing
/// about existence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub params: DsrgParams,
    pub checks: Vec<FeasibilityCheck>,
    pub spectrum: Result<Spectrum, Infeasible>,
}

impl FeasibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FeasibilityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.params)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

pub fn feasibility(p: &DsrgParams) -> FeasibilityReport {
    let mut checks = Vec::new();
    let mut check = |name, passed, detail: String| checks.push(FeasibilityCheck { name, passed, detail });

    check(
        "order",
        p.t <= p.k && p.k < p.v,
        format!("t={} <= k={} < v={}", p.t, p.k, p.v),
    );
    check("lambda", p.lambda < p.k, format!("lambda={} < k={}", p.lambda, p.k));
    let lhs = p.k as i128 * (p.k as i128 + p.mu as i128 - p.lambda as i128);
    let rhs = p.t as i128 + (p.v as i128 - 1) * p.mu as i128;
    check(
        "row_sum",
        lhs == rhs,
        format!("k(k+mu-lambda)={lhs}, t+(v-1)mu={rhs}"),
    );

    let spec = spectrum(p);
    match &spec {
        Ok(s) => {
            check("spectrum", true, s.to_string());
            let (k, t1, t2) = (s.theta0 as i128, s.theta1 as i128, s.theta2 as i128);
            let (m1, m2) = (s.m1 as i128, s.m2 as i128);
            let trace = k + t1 * m1 + t2 * m2;
            check("trace_a", trace == 0, format!("k+m1*theta1+m2*theta2={trace}"));
            let trace_sq = k * k + t1 * t1 * m1 + t2 * t2 * m2;
            let vt = p.v as i128 * p.t as i128;
            check(
                "trace_a2",
                trace_sq == vt,
                format!("k^2+m1*theta1^2+m2*theta2^2={trace_sq}, vt={vt}"),
            );
        }
        Err(e) => check("spectrum", false, format!("{}: {e}", e.reason())),
    }
    FeasibilityReport {
        params: *p,
        checks,
        spectrum: spec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64, k: u64, t: u64, lambda: u64, mu: u64) -> DsrgParams {
        DsrgParams { v, k, t, lambda, mu }
    }

    #[test]
    fn spectra_of_known_sets() {
        let s = spectrum(&p(36, 12, 5, 2, 5)).unwrap();
        assert_eq!((s.theta0, s.theta1, s.theta2), (12, 0, -3));
        assert_eq!((s.m0, s.m1, s.m2), (1, 31, 4));
        assert_eq!(s.to_string(), "theta 12 0 -3 mult 1 31 4");

        let s = spectrum(&p(54, 18, 7, 4, 7)).unwrap();
        assert_eq!((s.theta1, s.theta2, s.m1, s.m2), (0, -3, 47, 6));

        let s = spectrum(&p(8, 4, 3, 1, 3)).unwrap();
        assert_eq!((s.theta1, s.theta2, s.m1, s.m2, s.delta), (0, -2, 5, 2, 2));
    }

    #[test]
    fn delta_not_integer() {
        let e = spectrum(&p(10, 4, 3, 1, 2)).unwrap_err();
        assert_eq!(e, Infeasible::DeltaNotInteger { delta_sq: 5 });
        assert_eq!(e.reason(), "delta_not_integer");
        assert_eq!(e.to_string(), "delta^2=5");
        // t = μ = λ gives δ = 0, which is not positive.
        assert!(matches!(
            spectrum(&p(10, 3, 1, 1, 1)),
            Err(Infeasible::DeltaNotInteger { delta_sq: 0 })
        ));
    }

    #[test]
    fn multiplicity_failures() {
        // δ = 2, θ2 = -2: m1 = -(3 - 18)/2 = 15/2.
        assert_eq!(
            spectrum(&p(10, 3, 2, 0, 2)).unwrap_err(),
            Infeasible::MultiplicityNotInteger { numerator: 15, delta: 2 }
        );
        // δ = 1, θ1 = -1: m2 = 4 - 9.
        assert_eq!(
            spectrum(&p(10, 4, 1, 0, 3)).unwrap_err(),
            Infeasible::MultiplicityNegative { value: -5 }
        );
    }

    #[test]
    fn delta_has_the_parity_of_mu_minus_lambda() {
        for lambda in 0..12i128 {
            for mu in 0..12i128 {
                for t in 0..12i128 {
                    let d2 = (mu - lambda).pow(2) + 4 * (t - mu);
                    if let Some(d) = exact_sqrt(d2) {
                        assert_eq!((lambda - mu + d).rem_euclid(2), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn feasibility_reports() {
        let r = feasibility(&p(36, 12, 5, 2, 5));
        assert!(r.passed(), "{r}");
        let r = feasibility(&p(8, 4, 3, 1, 3));
        assert!(r.passed());
        let r = feasibility(&p(10, 4, 3, 1, 2));
        assert!(!r.passed());
        let failed: Vec<_> = r.failures().map(|c| c.name).collect();
        assert_eq!(failed, ["row_sum", "spectrum"]);
        assert!(r.to_string().contains("delta_not_integer"));
    }
}
