//! Per-mode force tables: Chebyshev coefficients read from CSV.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use poiseuille_core::force::{chebyshev_force, ModeForce};
use poiseuille_core::ChebyshevGrid;
use serde::Deserialize;

use crate::error::LabError;

#[derive(Debug, Deserialize)]
struct Row {
    n: i64,
    k: usize,
    f1_re: f64,
    f1_im: f64,
    f2_re: f64,
    f2_im: f64,
}

/// Rows `n,k,f1_re,f1_im,f2_re,f2_im` give `F_n = (Σ a_k T_k, Σ b_k T_k)`. A mode
/// listed only as `n` gets `F_{−n} = conj F_n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForceTable {
    modes: BTreeMap<i64, (Vec<C64>, Vec<C64>)>,
}

impl ForceTable {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let bad = |msg: String| LabError::Invalid(vec![format!("force_table: {}: {msg}", path.display())]);
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| bad(e.to_string()))?;
        let mut modes: BTreeMap<i64, (Vec<C64>, Vec<C64>)> = BTreeMap::new();
        for (line, row) in reader.deserialize::<Row>().enumerate() {
            let r = row.map_err(|e| bad(e.to_string()))?;
            let vals = [r.f1_re, r.f1_im, r.f2_re, r.f2_im];
            if vals.iter().any(|x| !x.is_finite()) {
                return Err(bad(format!("row {}: coefficients must be finite", line + 1)));
            }
            let e = modes.entry(r.n).or_default();
            for v in [&mut e.0, &mut e.1] {
                if v.len() <= r.k {
                    v.resize(r.k + 1, C64::new(0.0, 0.0));
                }
            }
            e.0[r.k] += C64::new(r.f1_re, r.f1_im);
            e.1[r.k] += C64::new(r.f2_re, r.f2_im);
        }
        if modes.is_empty() {
            return Err(bad("no rows".into()));
        }
        let listed: Vec<i64> = modes.keys().copied().collect();
        for n in listed {
            if !modes.contains_key(&-n) {
                let (a, b) = &modes[&n];
                let c = (a.iter().map(|z| z.conj()).collect(), b.iter().map(|z| z.conj()).collect());
                modes.insert(-n, c);
            }
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.modes.keys().copied()
    }

    pub fn contains(&self, n: i64) -> bool {
        self.modes.contains_key(&n)
    }

    /// Zero force for modes absent from the table.
    pub fn sample(&self, n: i64, amplitude: f64, grid: &ChebyshevGrid) -> ModeForce {
        match self.modes.get(&n) {
            Some((a, b)) => chebyshev_force(a, b, grid).scale(amplitude),
            None => ModeForce::zero(grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_modes_are_conjugated() {
        let dir = tempdir();
        let path = dir.join("force.csv");
        std::fs::write(&path, "n,k,f1_re,f1_im,f2_re,f2_im\n2,0,1,0.5,0,0\n2,1,0,0,3,-1\n").unwrap();
        let t = ForceTable::load(&path).unwrap();
        let g = ChebyshevGrid::new(8).unwrap();
        let (a, b) = (t.sample(2, 1.0, &g), t.sample(-2, 1.0, &g));
        for (x, y) in a.f1.iter().zip(&b.f1).chain(a.f2.iter().zip(&b.f2)) {
            assert_eq!(*x, y.conj());
        }
        let y = g.points()[3];
        assert!((a.f2[3] - C64::new(3.0, -1.0) * y).norm() < 1e-14);
        assert_eq!(t.modes().collect::<Vec<_>>(), vec![-2, 2]);
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("poiseuille-table-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }
}
