use std::io::Write;

use crate::error::{invalid, Result};

/// Observables of `u(t)` at one record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub grad_sq: f64,
    /// `h(t) = ‖x u(t)‖²`.
    pub variance: f64,
    pub q: f64,
    pub s: f64,
    /// Step size used for the step ending at this record.
    pub dt: f64,
}

/// Records in strictly increasing time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableSeries {
    pub records: Vec<ObservableRecord>,
}

impl ObservableSeries {
    pub fn push(&mut self, rec: ObservableRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(rec.t > last.t) {
                return Err(invalid(format!("record at t = {} does not follow t = {}", rec.t, last.t)));
            }
        }
        self.records.push(rec);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&ObservableRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&ObservableRecord> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Largest `|mass(t)/mass(0) - 1|`.
    pub fn mass_drift(&self) -> f64 {
        self.drift(|r| r.mass)
    }

    /// Largest `|E(t) - E(0)| / |E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        self.drift(|r| r.energy)
    }

    fn drift(&self, f: impl Fn(&ObservableRecord) -> f64) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        let base = f(first);
        self.records
            .iter()
            .map(|r| (f(r) - base).abs() / base.abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `t,mass,energy,grad_sq,variance,Q,S,dt`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,mass,energy,grad_sq,variance,Q,S,dt")?;
        for r in &self.records {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.t, r.mass, r.energy, r.grad_sq, r.variance, r.q, r.s, r.dt
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64) -> ObservableRecord {
        ObservableRecord {
            t,
            mass: 1.0,
            energy: -2.0 + t,
            grad_sq: 1.0,
            variance: 1.0,
            q: 0.0,
            s: 0.0,
            dt: 0.1,
        }
    }

    #[test]
    fn rejects_non_increasing_time() {
        let mut s = ObservableSeries::default();
        s.push(rec(0.0)).unwrap();
        assert!(s.push(rec(0.0)).is_err());
        s.push(rec(0.5)).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.energy_drift() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut s = ObservableSeries::default();
        s.push(rec(0.0)).unwrap();
        s.push(rec(1.0)).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,mass,energy,grad_sq,variance,Q,S,dt\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
