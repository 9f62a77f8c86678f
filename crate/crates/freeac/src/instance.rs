//! Random test instances and their JSON container.
//!
//! Generated Schur-class series carry an ℓ¹ certificate: complex Gaussian
//! coefficients rescaled so `Σ ||F_α|| <= ρ < 1`, which guarantees membership in
//! the Schur class and non-unitality at every truncation. Constant terms are
//! Hermitianized so instances are canonical representatives for the
//! modulo-imaginary-constants Herglotz bijection, making round trips exact.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jsonio;
use crate::linalg::{opnorm, rand_cmat};
use crate::series::{CommSeries, FreeSeries};
use crate::word::{enumerate_multi_indices, enumerate_words};

pub const DEFAULT_TRUNC: usize = 6;

/// Generation parameters echoed into instance metadata.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub d: usize,
    pub m: usize,
    pub deg: usize,
    pub rho: f64,
    pub seed: u64,
    pub trunc: usize,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 1 || self.d > 9 {
            return Err(Error::InvalidParameter(format!("d = {} not in 1..=9", self.d)));
        }
        if self.m < 1 {
            return Err(Error::InvalidParameter("m must be >= 1".into()));
        }
        if self.deg > self.trunc {
            return Err(Error::InvalidParameter(format!(
                "deg = {} exceeds truncation N = {}",
                self.deg, self.trunc
            )));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {} not in (0, 1)", self.rho)));
        }
        Ok(())
    }
}

/// Random free Schur-class series: Gaussian coefficients up to degree `deg`,
/// Hermitian constant term, rescaled to ℓ¹ norm exactly `ρ`.
pub fn random_free_schur(params: &GenParams) -> Result<FreeSeries> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    random_free_schur_with(&mut rng, params.d, params.m, params.deg, params.trunc, params.rho)
}

pub fn random_free_schur_with(
    rng: &mut ChaCha8Rng,
    d: usize,
    m: usize,
    deg: usize,
    trunc: usize,
    rho: f64,
) -> Result<FreeSeries> {
    let mut coeffs = Vec::new();
    let mut l1 = 0.0f64;
    for w in enumerate_words(d, deg)? {
        let mut g = rand_cmat(rng, m, m);
        if w.is_empty() {
            g = (&g + g.adjoint()).map(|z| z.scale(0.5));
        }
        l1 += opnorm(&g);
        coeffs.push((w, g));
    }
    let scale = rho / l1.max(f64::MIN_POSITIVE);
    let mut b = FreeSeries::zero(d, m, trunc);
    for (w, g) in coeffs {
        b.set_coeff(w, g.map(|z| z.scale(scale)))?;
    }
    Ok(b)
}

/// Random commutative Schur-class series under the same ℓ¹ recipe (the
/// Drury-Arveson multiplier norm of `z^n` is at most 1).
pub fn random_comm_schur(params: &GenParams) -> Result<CommSeries> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    random_comm_schur_with(&mut rng, params.d, params.m, params.deg, params.trunc, params.rho)
}

pub fn random_comm_schur_with(
    rng: &mut ChaCha8Rng,
    d: usize,
    m: usize,
    deg: usize,
    trunc: usize,
    rho: f64,
) -> Result<CommSeries> {
    let mut coeffs = Vec::new();
    let mut l1 = 0.0f64;
    for n in enumerate_multi_indices(d, deg) {
        let mut g = rand_cmat(rng, m, m);
        if n.degree() == 0 {
            g = (&g + g.adjoint()).map(|z| z.scale(0.5));
        }
        l1 += opnorm(&g);
        coeffs.push((n, g));
    }
    let scale = rho / l1.max(f64::MIN_POSITIVE);
    let mut b = CommSeries::zero(d, m, trunc);
    for (n, g) in coeffs {
        b.set_coeff(n, g.map(|z| z.scale(scale)))?;
    }
    Ok(b)
}

/// The series payload of an [`Instance`].
#[derive(Debug, Clone)]
pub enum Payload {
    Free(FreeSeries),
    Comm(CommSeries),
}

/// A generated or loaded test instance: a Schur-class series plus the metadata
/// needed to reproduce and trust it (seed, generator parameters, and which norm
/// bound certified contractivity).
#[derive(Debug, Clone)]
pub struct Instance {
    pub payload: Payload,
    pub seed: Option<u64>,
    pub params: Option<GenParams>,
    /// `"l1"` when the ℓ¹ bound certified the Schur class, `"compressed"` when
    /// only the compressed lower bound did, `"none"` otherwise.
    pub certification: String,
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Free(_) => "free",
            Payload::Comm(_) => "comm",
        }
    }

    pub fn free(&self) -> Result<&FreeSeries> {
        match &self.payload {
            Payload::Free(s) => Ok(s),
            Payload::Comm(_) => Err(Error::InvalidParameter(
                "expected a free instance, got a commutative one".into(),
            )),
        }
    }

    pub fn comm(&self) -> Result<&CommSeries> {
        match &self.payload {
            Payload::Comm(s) => Ok(s),
            Payload::Free(_) => Err(Error::InvalidParameter(
                "expected a commutative instance, got a free one".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, series) = match &self.payload {
            Payload::Free(s) => ("free", jsonio::free_series_to_json(s)),
            Payload::Comm(s) => ("comm", jsonio::comm_series_to_json(s)),
        };
        let mut meta = serde_json::Map::new();
        if let Some(seed) = self.seed {
            meta.insert("seed".into(), json!(seed));
        }
        if let Some(p) = &self.params {
            meta.insert(
                "params".into(),
                json!({"d": p.d, "m": p.m, "deg": p.deg, "rho": p.rho, "N": p.trunc}),
            );
        }
        meta.insert("certification".into(), json!(self.certification));
        json!({
            "kind": kind,
            "series": series,
            "meta": Value::Object(meta),
        })
    }

    pub fn from_json(v: &Value) -> Result<Instance> {
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Json("instance needs \"kind\": \"free\"|\"comm\"".into()))?;
        let series = v
            .get("series")
            .ok_or_else(|| Error::Json("instance needs \"series\"".into()))?;
        let payload = match kind {
            "free" => Payload::Free(jsonio::free_series_from_json(series)?),
            "comm" => Payload::Comm(jsonio::comm_series_from_json(series)?),
            other => return Err(Error::Json(format!("unknown instance kind \"{other}\""))),
        };
        let seed = v
            .get("meta")
            .and_then(|m| m.get("seed"))
            .and_then(|s| s.as_u64());
        let certification = v
            .get("meta")
            .and_then(|m| m.get("certification"))
            .and_then(|c| c.as_str())
            .unwrap_or("none")
            .to_string();
        Ok(Instance { payload, seed, params: None, certification })
    }

    /// Canonical serialized bytes (pretty JSON plus trailing newline); identical
    /// parameters produce identical bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("valid json");
        s.push('\n');
        s.into_bytes()
    }
}

/// Generate an instance per the CLI contract.
pub fn generate(params: &GenParams, mode: &str) -> Result<Instance> {
    let payload = match mode {
        "free" => Payload::Free(random_free_schur(params)?),
        "comm" => Payload::Comm(random_comm_schur(params)?),
        other => {
            return Err(Error::InvalidParameter(format!(
                "mode must be \"free\" or \"comm\", got \"{other}\""
            )))
        }
    };
    Ok(Instance {
        payload,
        seed: Some(params.seed),
        params: Some(params.clone()),
        certification: "l1".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64) -> GenParams {
        GenParams { d: 2, m: 2, deg: 2, rho: 0.8, seed, trunc: 4 }
    }

    #[test]
    fn deterministic_bytes() {
        let a = generate(&params(7), "free").unwrap().to_bytes();
        let b = generate(&params(7), "free").unwrap().to_bytes();
        assert_eq!(a, b);
        let c = generate(&params(8), "free").unwrap().to_bytes();
        assert_ne!(a, c);
    }

    #[test]
    fn l1_bound_holds() {
        let inst = generate(&params(3), "free").unwrap();
        let b = inst.free().unwrap();
        let l1: f64 = b.coeffs().map(|(_, m)| opnorm(m)).sum();
        assert!(l1 <= 0.8 + 1e-12);
        assert!((l1 - 0.8).abs() < 1e-9);
        // Hermitian constant term (canonical representative)
        let b0 = b.constant_coeff();
        assert!(crate::linalg::max_abs(&(&b0 - b0.adjoint())) < 1e-15);
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = params(1);
        p.rho = 1.5;
        assert!(generate(&p, "free").is_err());
        let mut p = params(1);
        p.d = 10;
        assert!(generate(&p, "free").is_err());
        assert!(generate(&params(1), "nope").is_err());
    }

    #[test]
    fn instance_json_roundtrip() {
        let inst = generate(&params(9), "comm").unwrap();
        let v = inst.to_json();
        let back = Instance::from_json(&v).unwrap();
        assert_eq!(back.kind(), "comm");
        assert_eq!(
            back.comm().unwrap().max_coeff_diff(inst.comm().unwrap()),
            0.0
        );
        assert_eq!(back.certification, "l1");
    }
}
