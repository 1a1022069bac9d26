//! Physical, forcing and inequality constants, with regime validation.
//!
//! Parameters arrive as a flat map of named scalars. The accepted keys are:
//!
//! | key | symbol | required | default |
//! |-----|--------|----------|---------|
//! | `nu` | ν, viscosity | yes | |
//! | `lambda` | λ, smallest Stokes eigenvalue | yes | |
//! | `lambda0` | λ₀, Poincaré constant | yes | |
//! | `c_omega` | c_Ω ≥ 1 | no | 1 |
//! | `f_norm` | ‖f‖₂ | yes | |
//! | `curlF_norm` | ‖curl F‖₂ | yes | |
//! | `psi_inf` | ‖ψ‖∞ | yes | |
//! | `r` | Hölder exponent, 1/2 ≤ r ≤ 1 | yes | |
//! | `eps` | ε | yes | |
//! | `delta` | δ | yes | |
//! | `mu` | μ | yes | |
//! | `c` | generic constant of the sub-critical bound | no | 1 |
//! | `c1` | constant of the full-NSE enstrophy bound | no | 1 |
//! | `c2` | constant of the coherence bounds | no | 2 |
//! | `eta` | parabola weight η > 1 (full NSE) | no | 2 |
//! | `eps0` | ε₀ of the L^{3/2} condition | no | 0.2 |
//! | `c_prime` | c′_Ω of the L^{3/2} condition | no | 1 |
//! | `C_sub` | overrides the sub-critical growth constant C | no | derived |

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Flat parameter map as read from JSON.
pub type RawParams = BTreeMap<String, f64>;

const REQUIRED: [&str; 10] = [
    "nu",
    "lambda",
    "lambda0",
    "f_norm",
    "curlF_norm",
    "psi_inf",
    "r",
    "eps",
    "delta",
    "mu",
];

const OPTIONAL: [(&str, f64); 7] = [
    ("c_omega", 1.0),
    ("c", 1.0),
    ("c1", 1.0),
    ("c2", 2.0),
    ("eta", 2.0),
    ("eps0", 0.2),
    ("c_prime", 1.0),
];

const OVERRIDES: [&str; 1] = ["C_sub"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainParams {
    pub nu: f64,
    pub lambda: f64,
    pub lambda0: f64,
    pub c_omega: f64,
}

impl DomainParams {
    /// `C_Ω = 1 + 4 c_Ω`.
    pub fn big_c_omega(&self) -> f64 {
        1.0 + 4.0 * self.c_omega
    }

    /// `λ₀ / c_Ω`, slope of the lower boundary `ℰ ≥ λ̲ e`.
    pub fn lambda_lower(&self) -> f64 {
        self.lambda0 / self.c_omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingParams {
    pub f_norm: f64,
    pub curl_f_norm: f64,
    pub psi_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceParams {
    pub r: f64,
    pub eps: f64,
    pub delta: f64,
    pub mu: f64,
    pub c_gen: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CoherenceParams {
    /// `ρ = 2ε + δ`.
    pub fn rho(&self) -> f64 {
        2.0 * self.eps + self.delta
    }
}

/// Constants of the L^{3/2} scaling-invariant condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingInputs {
    pub eps0: f64,
    pub c_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub domain: DomainParams,
    pub forcing: ForcingParams,
    pub coherence: CoherenceParams,
    pub scaling: ScalingInputs,
    /// Parabola weight η of the full-NSE construction.
    pub eta: f64,
    /// Explicit sub-critical growth constant, replacing the derived one.
    pub c_sub: Option<f64>,
}

/// Units that map a nondimensional (ν = λ = 1) model back to physical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    /// Energy unit `ν² λ^{-1/2}`.
    pub energy: f64,
    /// Enstrophy unit `ν² λ^{1/2}`.
    pub enstrophy: f64,
}

impl ModelParams {
    /// Grashof number `G = ‖f‖₂ / (ν² λ^{3/4})`.
    pub fn grashof(&self) -> f64 {
        self.forcing.f_norm / (self.domain.nu.powi(2) * self.domain.lambda.powf(0.75))
    }

    /// `e₀ = ν² G² / λ^{1/2}`, radius of the absorbing energy ball.
    pub fn e0(&self) -> f64 {
        self.domain.nu.powi(2) * self.grashof().powi(2) / self.domain.lambda.sqrt()
    }

    pub fn rho(&self) -> f64 {
        self.coherence.rho()
    }

    pub fn is_critical(&self) -> bool {
        self.coherence.r == 0.5
    }

    pub fn is_normalized(&self) -> bool {
        self.domain.nu == 1.0 && self.domain.lambda == 1.0
    }

    /// Copy with the given forcing amplitude expressed as a Grashof number.
    pub fn with_grashof(&self, g: f64) -> ModelParams {
        let mut p = *self;
        p.forcing.f_norm = g * self.domain.nu.powi(2) * self.domain.lambda.powf(0.75);
        p
    }

    /// Same physics in units where ν = λ = 1.
    ///
    /// Time is measured in `1/(νλ)` and length in `λ^{-1/2}`; energies
    /// scale by [`Units::energy`], enstrophies by [`Units::enstrophy`] and
    /// `‖curl F‖₂` by `ν² λ^{5/4}`. Dimensionless inputs are unchanged.
    pub fn nondimensionalized(&self) -> (ModelParams, Units) {
        let (nu, lambda) = (self.domain.nu, self.domain.lambda);
        let mut p = *self;
        p.domain.nu = 1.0;
        p.domain.lambda = 1.0;
        p.domain.lambda0 = self.domain.lambda0 / lambda;
        p.forcing.f_norm = self.grashof();
        p.forcing.curl_f_norm = self.forcing.curl_f_norm / (nu * nu * lambda.powf(1.25));
        let units = Units {
            energy: nu * nu / lambda.sqrt(),
            enstrophy: nu * nu * lambda.sqrt(),
        };
        (p, units)
    }

    /// Flat map holding every key, defaults included.
    pub fn to_raw(&self) -> RawParams {
        let mut m = RawParams::new();
        let d = &self.domain;
        let f = &self.forcing;
        let c = &self.coherence;
        for (k, v) in [
            ("nu", d.nu),
            ("lambda", d.lambda),
            ("lambda0", d.lambda0),
            ("c_omega", d.c_omega),
            ("f_norm", f.f_norm),
            ("curlF_norm", f.curl_f_norm),
            ("psi_inf", f.psi_inf),
            ("r", c.r),
            ("eps", c.eps),
            ("delta", c.delta),
            ("mu", c.mu),
            ("c", c.c_gen),
            ("c1", c.c1),
            ("c2", c.c2),
            ("eta", self.eta),
            ("eps0", self.scaling.eps0),
            ("c_prime", self.scaling.c_prime),
        ] {
            m.insert(k.to_string(), v);
        }
        if let Some(cs) = self.c_sub {
            m.insert("C_sub".to_string(), cs);
        }
        m
    }
}

/// Validates a flat parameter map.
pub fn build_params(raw: &RawParams) -> Result<ModelParams> {
    for key in raw.keys() {
        let known = REQUIRED.contains(&key.as_str())
            || OPTIONAL.iter().any(|(k, _)| k == key)
            || OVERRIDES.contains(&key.as_str());
        if !known {
            return Err(Error::UnknownKey(key.clone()));
        }
    }
    for (k, v) in raw {
        if !v.is_finite() {
            return Err(Error::InvalidRegime(format!("{k} = {v} is not finite")));
        }
    }
    let req = |k: &str| {
        raw.get(k)
            .copied()
            .ok_or_else(|| Error::MissingKey(k.to_string()))
    };
    let opt = |k: &str| {
        let default = OPTIONAL
            .iter()
            .find(|(n, _)| *n == k)
            .map(|(_, d)| *d)
            .unwrap();
        raw.get(k).copied().unwrap_or(default)
    };
    let p = ModelParams {
        domain: DomainParams {
            nu: req("nu")?,
            lambda: req("lambda")?,
            lambda0: req("lambda0")?,
            c_omega: opt("c_omega"),
        },
        forcing: ForcingParams {
            f_norm: req("f_norm")?,
            curl_f_norm: req("curlF_norm")?,
            psi_inf: req("psi_inf")?,
        },
        coherence: CoherenceParams {
            r: req("r")?,
            eps: req("eps")?,
            delta: req("delta")?,
            mu: req("mu")?,
            c_gen: opt("c"),
            c1: opt("c1"),
            c2: opt("c2"),
        },
        scaling: ScalingInputs {
            eps0: opt("eps0"),
            c_prime: opt("c_prime"),
        },
        eta: opt("eta"),
        c_sub: raw.get("C_sub").copied(),
    };
    validate(&p)?;
    Ok(p)
}

fn validate(p: &ModelParams) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidRegime(msg));
    let d = &p.domain;
    let f = &p.forcing;
    let c = &p.coherence;
    for (name, v) in [
        ("nu", d.nu),
        ("lambda", d.lambda),
        ("lambda0", d.lambda0),
        ("eps", c.eps),
        ("mu", c.mu),
        ("c", c.c_gen),
        ("c1", c.c1),
        ("c2", c.c2),
    ] {
        if !(v > 0.0) {
            return bad(format!("{name} = {v} must be positive"));
        }
    }
    for (name, v) in [
        ("f_norm", f.f_norm),
        ("curlF_norm", f.curl_f_norm),
        ("psi_inf", f.psi_inf),
        ("delta", c.delta),
        ("eps0", p.scaling.eps0),
        ("c_prime", p.scaling.c_prime),
    ] {
        if !(v >= 0.0) {
            return bad(format!("{name} = {v} must be non-negative"));
        }
    }
    if !(d.c_omega >= 1.0) {
        return bad(format!("c_omega = {} must be at least 1", d.c_omega));
    }
    if !(c.delta < 1.0) {
        return bad(format!("delta = {} must be below 1", c.delta));
    }
    if !(c.rho() < 1.0) {
        return bad(format!("rho = {} >= 1", c.rho()));
    }
    if !(0.5..=1.0).contains(&c.r) {
        return bad(format!("r = {} outside [1/2, 1]", c.r));
    }
    if !(p.eta > 1.0) {
        return bad(format!("eta = {} must exceed 1", p.eta));
    }
    if let Some(cs) = p.c_sub {
        if !(cs >= 0.0) {
            return bad(format!("C_sub = {cs} must be non-negative"));
        }
    }
    Ok(())
}

/// Parameters of the reference configuration: ν = λ = λ₀ = μ = 1, ε = 0.2,
/// δ = 0.5, c₂ = 2, G = 2, ‖curl F‖₂ = 10, ψ∞ = 0, r = 1/2.
pub fn reference_params() -> ModelParams {
    let raw: RawParams = [
        ("nu", 1.0),
        ("lambda", 1.0),
        ("lambda0", 1.0),
        ("c_omega", 1.0),
        ("f_norm", 2.0),
        ("curlF_norm", 10.0),
        ("psi_inf", 0.0),
        ("r", 0.5),
        ("eps", 0.2),
        ("delta", 0.5),
        ("mu", 1.0),
        ("c1", 1.0),
        ("c2", 2.0),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    build_params(&raw).expect("reference parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_derived_fields() {
        let p = reference_params();
        assert_eq!(p.grashof(), 2.0);
        assert!((p.rho() - 0.9).abs() < 1e-15);
        assert_eq!(p.domain.big_c_omega(), 5.0);
        assert_eq!(p.e0(), 4.0);
        assert!(p.is_critical());
    }

    #[test]
    fn rho_at_least_one_rejected() {
        let mut raw = reference_params().to_raw();
        raw.insert("eps".into(), 0.3);
        match build_params(&raw) {
            Err(Error::InvalidRegime(msg)) => assert!(msg.contains("rho")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_forcing_allowed() {
        let mut raw = reference_params().to_raw();
        raw.insert("f_norm".into(), 0.0);
        let p = build_params(&raw).unwrap();
        assert_eq!(p.grashof(), 0.0);
        assert_eq!(p.e0(), 0.0);
    }

    #[test]
    fn missing_and_unknown_keys() {
        let mut raw = reference_params().to_raw();
        raw.remove("mu");
        assert_eq!(build_params(&raw), Err(Error::MissingKey("mu".into())));
        let mut raw = reference_params().to_raw();
        raw.insert("mu_typo".into(), 1.0);
        assert_eq!(build_params(&raw), Err(Error::UnknownKey("mu_typo".into())));
    }

    #[test]
    fn every_constraint_has_a_rejecting_input() {
        let cases: [(&str, f64); 16] = [
            ("nu", 0.0),
            ("lambda", -1.0),
            ("lambda0", 0.0),
            ("c_omega", 0.5),
            ("f_norm", -1.0),
            ("curlF_norm", -1.0),
            ("psi_inf", -0.1),
            ("r", 0.4),
            ("r", 1.1),
            ("eps", 0.0),
            ("delta", 1.0),
            ("mu", 0.0),
            ("c2", 0.0),
            ("eta", 1.0),
            ("eps0", -1.0),
            ("c1", f64::NAN),
        ];
        for (k, v) in cases {
            let mut raw = reference_params().to_raw();
            raw.insert(k.into(), v);
            assert!(
                matches!(build_params(&raw), Err(Error::InvalidRegime(_))),
                "{k} = {v} accepted"
            );
        }
    }

    #[test]
    fn nondimensionalization_keeps_grashof() {
        let mut p = reference_params();
        p.domain.nu = 0.5;
        p.domain.lambda = 4.0;
        let (q, units) = p.nondimensionalized();
        assert!(q.is_normalized());
        assert!((q.grashof() - p.grashof()).abs() < 1e-12);
        assert!((q.e0() * units.energy - p.e0()).abs() < 1e-12 * p.e0());
    }
}
