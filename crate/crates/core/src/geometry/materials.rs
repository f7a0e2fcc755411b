use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const GAGG_CSV: &str = include_str!("../../data/gagg.csv");
const BGO_CSV: &str = include_str!("../../data/bgo.csv");
const CSV_HEADER: &str = "energy_keV,mu_pe_per_mm,mu_compton_per_mm";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Material {
    Gagg,
    Bgo,
}

/// Linear attenuation coefficients (1/mm) at one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Attenuation {
    pub photoelectric: f64,
    pub compton: f64,
}

impl Attenuation {
    pub fn total(&self) -> f64 {
        self.photoelectric + self.compton
    }
}

/// Tabulated photoelectric and Compton attenuation for one material,
/// interpolated linearly in log-log space.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialTable {
    material: Material,
    energies: Vec<f64>,
    mu_pe: Vec<f64>,
    mu_compton: Vec<f64>,
}

impl MaterialTable {
    /// Parses the `energy_keV,mu_pe_per_mm,mu_compton_per_mm` CSV format.
    pub fn from_csv(material: Material, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => return Err(Error::Table(format!("bad header {other:?}"))),
        }
        let mut table = Self { material, energies: Vec::new(), mu_pe: Vec::new(), mu_compton: Vec::new() };
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Table(format!("line {}: expected 3 columns", lineno + 2)));
            }
            let parse =
                |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Table(format!("line {}: {e}", lineno + 2)));
            table.energies.push(parse(cols[0])?);
            table.mu_pe.push(parse(cols[1])?);
            table.mu_compton.push(parse(cols[2])?);
        }
        table.validate()?;
        Ok(table)
    }

    pub fn bundled(material: Material) -> Self {
        let text = match material {
            Material::Gagg => GAGG_CSV,
            Material::Bgo => BGO_CSV,
        };
        Self::from_csv(material, text).expect("bundled attenuation tables are well-formed")
    }

    fn validate(&self) -> Result<()> {
        if self.energies.len() < 2 {
            return Err(Error::Table("need at least two grid points".into()));
        }
        if self.energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("energy grid is not strictly increasing".into()));
        }
        let all_positive =
            self.energies.iter().chain(&self.mu_pe).chain(&self.mu_compton).all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::Table("all energies and coefficients must be positive".into()));
        }
        Ok(())
    }

    pub fn material(&self) -> Material {
        self.material
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy_range(&self) -> (f64, f64) {
        (self.energies[0], self.energies[self.energies.len() - 1])
    }

    pub fn lookup(&self, energy: f64) -> Result<Attenuation> {
        let (min, max) = self.energy_range();
        if !(energy >= min && energy <= max) {
            return Err(Error::EnergyOutOfRange { energy, min, max });
        }
        let hi = self.energies.partition_point(|&e| e < energy);
        if self.energies[hi] == energy {
            return Ok(Attenuation { photoelectric: self.mu_pe[hi], compton: self.mu_compton[hi] });
        }
        let lo = hi - 1;
        let t = (energy / self.energies[lo]).ln() / (self.energies[hi] / self.energies[lo]).ln();
        let interp = |ys: &[f64]| (ys[lo].ln() + t * (ys[hi].ln() - ys[lo].ln())).exp();
        Ok(Attenuation { photoelectric: interp(&self.mu_pe), compton: interp(&self.mu_compton) })
    }
}

/// The two bundled tables, indexed by material.
#[derive(Clone, Debug)]
pub struct Materials {
    gagg: MaterialTable,
    bgo: MaterialTable,
}

impl Default for Materials {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Materials {
    pub fn bundled() -> Self {
        Self { gagg: MaterialTable::bundled(Material::Gagg), bgo: MaterialTable::bundled(Material::Bgo) }
    }

    pub fn table(&self, material: Material) -> &MaterialTable {
        match material {
            Material::Gagg => &self.gagg,
            Material::Bgo => &self.bgo,
        }
    }

    pub fn lookup(&self, material: Material, energy: f64) -> Result<Attenuation> {
        self.table(material).lookup(energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_cover_instrument_band() {
        for m in [Material::Gagg, Material::Bgo] {
            let t = MaterialTable::bundled(m);
            let (lo, hi) = t.energy_range();
            assert!(lo <= 10.0 && hi >= 3500.0);
            assert!(t.energies().len() >= 20);
        }
    }

    #[test]
    fn exact_at_grid_points() {
        let t = MaterialTable::bundled(Material::Gagg);
        for (i, &e) in t.energies.iter().enumerate() {
            let a = t.lookup(e).unwrap();
            assert_eq!(a.photoelectric, t.mu_pe[i]);
            assert_eq!(a.compton, t.mu_compton[i]);
        }
    }

    #[test]
    fn geometric_midpoint_gives_geometric_mean() {
        let t = MaterialTable::bundled(Material::Bgo);
        for i in 0..t.energies.len() - 1 {
            let e = (t.energies[i] * t.energies[i + 1]).sqrt();
            let a = t.lookup(e).unwrap();
            let pe = (t.mu_pe[i] * t.mu_pe[i + 1]).sqrt();
            let c = (t.mu_compton[i] * t.mu_compton[i + 1]).sqrt();
            assert!((a.photoelectric / pe - 1.0).abs() < 1e-9);
            assert!((a.compton / c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_range_energy_is_an_error() {
        let t = MaterialTable::bundled(Material::Gagg);
        assert!(matches!(t.lookup(5.0), Err(Error::EnergyOutOfRange { .. })));
        assert!(matches!(t.lookup(4000.0), Err(Error::EnergyOutOfRange { .. })));
        assert!(t.lookup(f64::NAN).is_err());
    }

    #[test]
    fn interpolation_monotone_where_endpoints_decrease() {
        let t = MaterialTable::bundled(Material::Gagg);
        for i in 0..t.energies.len() - 1 {
            if t.mu_pe[i + 1] < t.mu_pe[i] {
                let (e0, e1) = (t.energies[i], t.energies[i + 1]);
                let mut prev = f64::INFINITY;
                for k in 0..=50 {
                    let e = e0 * (e1 / e0).powf(k as f64 / 50.0);
                    let v = t.lookup(e.clamp(e0, e1)).unwrap().photoelectric;
                    assert!(v <= prev * (1.0 + 1e-12));
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn rejects_malformed_csv() {
        assert!(MaterialTable::from_csv(Material::Gagg, "e,a,b\n1,2,3\n").is_err());
        let dup = format!("{CSV_HEADER}\n10,1,1\n10,1,1\n");
        assert!(MaterialTable::from_csv(Material::Gagg, &dup).is_err());
        let neg = format!("{CSV_HEADER}\n10,1,1\n20,-1,1\n");
        assert!(MaterialTable::from_csv(Material::Gagg, &neg).is_err());
    }
}
