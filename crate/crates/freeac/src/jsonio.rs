//! JSON encodings shared by the library types and the CLI.
//!
//! Conventions: complex numbers are `[re, im]` pairs; matrices are row-major
//! nested arrays; words are digit strings (`""` is the empty word); multi-indices
//! are comma-joined counts like `"2,1"`; kernel entries use compound keys `"α|β"`.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::herglotz::MomentFunctional;
use crate::linalg::CMat;
use crate::series::{CommSeries, FreeSeries, NCPoint};
use crate::word::{MultiIndex, Word};

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Json("complex number must be [re, im]".into()))?;
    if arr.len() != 2 {
        return Err(Error::Json("complex number must be [re, im]".into()));
    }
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::Json("complex re not a number".into()))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::Json("complex im not a number".into()))?;
    Ok(Complex64::new(re, im))
}

pub fn mat_to_json(m: &CMat) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
        .collect();
    Value::Array(rows)
}

pub fn mat_from_json(v: &Value) -> Result<CMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Json("matrix must be an array of rows".into()))?;
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Json("empty matrix".into()));
    }
    let first = rows[0]
        .as_array()
        .ok_or_else(|| Error::Json("matrix row must be an array".into()))?;
    let ncols = first.len();
    let mut m = CMat::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Json("matrix row must be an array".into()))?;
        if row.len() != ncols {
            return Err(Error::Json("ragged matrix rows".into()));
        }
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = complex_from_json(entry)?;
        }
    }
    Ok(m)
}

pub fn free_series_to_json(s: &FreeSeries) -> Value {
    let mut coeffs = Map::new();
    for (w, mat) in s.coeffs() {
        coeffs.insert(w.to_string(), mat_to_json(mat));
    }
    json!({
        "d": s.d(),
        "m": s.m(),
        "N": s.trunc(),
        "coeffs": Value::Object(coeffs),
    })
}

pub fn free_series_from_json(v: &Value) -> Result<FreeSeries> {
    let d = get_usize(v, "d")?;
    let m = get_usize(v, "m")?;
    let n = get_usize(v, "N")?;
    let mut s = FreeSeries::zero(d, m, n);
    let coeffs = v
        .get("coeffs")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Json("series needs a \"coeffs\" object".into()))?;
    for (key, mat) in coeffs {
        s.set_coeff(Word::parse(d, key)?, mat_from_json(mat)?)?;
    }
    Ok(s)
}

pub fn comm_series_to_json(s: &CommSeries) -> Value {
    let mut coeffs = Map::new();
    for (n, mat) in s.coeffs() {
        coeffs.insert(n.to_string(), mat_to_json(mat));
    }
    json!({
        "d": s.d(),
        "m": s.m(),
        "N": s.trunc(),
        "coeffs": Value::Object(coeffs),
    })
}

pub fn comm_series_from_json(v: &Value) -> Result<CommSeries> {
    let d = get_usize(v, "d")?;
    let m = get_usize(v, "m")?;
    let n = get_usize(v, "N")?;
    let mut s = CommSeries::zero(d, m, n);
    let coeffs = v
        .get("coeffs")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Json("series needs a \"coeffs\" object".into()))?;
    for (key, mat) in coeffs {
        let idx: MultiIndex = key.parse()?;
        if idx.d() != d {
            return Err(Error::Json(format!("multi-index \"{key}\" has wrong arity")));
        }
        s.set_coeff(idx, mat_from_json(mat)?)?;
    }
    Ok(s)
}

pub fn moments_to_json(phi: &MomentFunctional) -> Value {
    let mut moments = Map::new();
    for (w, mat) in phi.moments() {
        moments.insert(w.to_string(), mat_to_json(mat));
    }
    json!({
        "d": phi.d(),
        "m": phi.m(),
        "N": phi.trunc(),
        "phi_I": mat_to_json(phi.phi_i()),
        "moments": Value::Object(moments),
    })
}

pub fn moments_from_json(v: &Value) -> Result<MomentFunctional> {
    let d = get_usize(v, "d")?;
    let m = get_usize(v, "m")?;
    let n = get_usize(v, "N")?;
    let phi_i = mat_from_json(
        v.get("phi_I")
            .ok_or_else(|| Error::Json("moments need \"phi_I\"".into()))?,
    )?;
    let mut phi = MomentFunctional::new(d, m, n, phi_i)?;
    let moments = v
        .get("moments")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Json("moments need a \"moments\" object".into()))?;
    for (key, mat) in moments {
        phi.set_moment(Word::parse(d, key)?, mat_from_json(mat)?)?;
    }
    Ok(phi)
}

pub fn comm_moments_to_json(mu: &crate::commutative::CommMomentFunctional) -> Value {
    let mut moments = Map::new();
    for (n, mat) in mu.moments() {
        moments.insert(n.to_string(), mat_to_json(mat));
    }
    json!({
        "d": mu.d(),
        "m": mu.m(),
        "N": mu.trunc(),
        "mu_I": mat_to_json(mu.mu_i()),
        "moments": Value::Object(moments),
    })
}

pub fn nc_point_to_json(p: &NCPoint) -> Value {
    json!({
        "n": p.dim(),
        "Z": p.mats().iter().map(mat_to_json).collect::<Vec<_>>(),
    })
}

pub fn nc_point_from_json(v: &Value) -> Result<NCPoint> {
    let mats = v
        .get("Z")
        .and_then(|z| z.as_array())
        .ok_or_else(|| Error::Json("NC point needs \"Z\": [matrix, ...]".into()))?
        .iter()
        .map(mat_from_json)
        .collect::<Result<Vec<_>>>()?;
    NCPoint::new(mats)
}

pub fn kernel_to_json(k: &crate::kernels::CoeffKernel) -> Value {
    let mut entries = Map::new();
    for ((a, b), mat) in k.entries() {
        entries.insert(format!("{a}|{b}"), mat_to_json(mat));
    }
    json!({
        "d": k.d(),
        "m": k.m(),
        "N": k.trunc(),
        "entries": Value::Object(entries),
    })
}

fn get_usize(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(|x| x.as_u64())
        .map(|x| x as usize)
        .ok_or_else(|| Error::Json(format!("missing or non-integer \"{key}\"")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ci;

    #[test]
    fn series_json_roundtrip() {
        let mut s = FreeSeries::zero(2, 2, 3);
        let mat =
            CMat::from_row_slice(2, 2, &[ci(1.0, -0.5), ci(0.0, 2.0), ci(3.0, 0.0), ci(0.0, 0.0)]);
        s.set_coeff(Word::parse(2, "12").unwrap(), mat).unwrap();
        let v = free_series_to_json(&s);
        let back = free_series_from_json(&v).unwrap();
        assert_eq!(back.max_coeff_diff(&s), 0.0);
        // empty word key is ""
        let id = FreeSeries::identity(1, 1, 0);
        let v = free_series_to_json(&id);
        assert!(v["coeffs"].get("").is_some());
    }

    #[test]
    fn comm_series_json_roundtrip() {
        let mut s = CommSeries::zero(2, 1, 3);
        s.set_coeff(MultiIndex::new(vec![2, 1]), CMat::from_element(1, 1, ci(0.5, 0.25)))
            .unwrap();
        let v = comm_series_to_json(&s);
        assert!(v["coeffs"].get("2,1").is_some());
        let back = comm_series_from_json(&v).unwrap();
        assert_eq!(back.max_coeff_diff(&s), 0.0);
    }
}
