//! Report envelope and value formatting shared by every command.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs: Value,
    pub tolerances: Value,
    pub status: Status,
    pub results: Value,
}

impl ReportEnvelope {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::CheckFailed => 2,
            Status::Error => 1,
        }
    }

    pub fn to_json(&self) -> String {
        // struct serialization + BTreeMap-backed objects keep the output
        // byte-deterministic for identical inputs
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Rounds to 12 significant digits so serialized values are stable across
/// accumulations that differ only in the last few bits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let exponent = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - exponent);
    (x * factor).round() / factor
}

/// Best small-denominator rational with denominator at most 100, via the
/// continued-fraction convergents; `None` when no convergent matches to
/// 1e-9 relative accuracy.
pub fn rational_guess(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-9 * x.abs().max(1.0);
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if q > 100 {
            return None;
        }
        if (x - p as f64 / q as f64).abs() <= tol {
            return Some(if q == 1 {
                format!("{p}")
            } else {
                format!("{p}/{q}")
            });
        }
        if frac.abs() < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i64;
        let p_next = a.checked_mul(p)?.checked_add(p_prev)?;
        let q_next = a.checked_mul(q)?.checked_add(q_prev)?;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    None
}

/// Rational form when one exists, otherwise the 12-significant-digit
/// decimal.
pub fn pretty_value(x: f64) -> String {
    rational_guess(x).unwrap_or_else(|| format!("{}", sig12(x)))
}

#[derive(Debug, Serialize)]
pub struct EigenvalueRow {
    pub value: f64,
    pub multiplicity: usize,
    pub rational: Option<String>,
}

pub fn eigenvalue_rows(clusters: &[curvlab_core::operators::EigenCluster]) -> Vec<EigenvalueRow> {
    clusters
        .iter()
        .map(|c| EigenvalueRow {
            value: sig12(c.value),
            multiplicity: c.multiplicity,
            rational: rational_guess(c.value),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_guess_finds_small_fractions() {
        assert_eq!(rational_guess(-3.6).as_deref(), Some("-18/5"));
        assert_eq!(rational_guess(2.25).as_deref(), Some("9/4"));
        assert_eq!(rational_guess(5.0).as_deref(), Some("5"));
        assert_eq!(rational_guess(-19.2).as_deref(), Some("-96/5"));
        assert_eq!(rational_guess(std::f64::consts::PI), None);
        assert_eq!(rational_guess(1.0 / 101.0), None);
    }

    #[test]
    fn sig12_truncates_noise() {
        assert_eq!(sig12(3.6000000000000014), 3.6);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-1.2000000000000024e3), -1200.0);
    }
}
