//! Distribution functions and decreasing rearrangements of sampled data.

use std::io::Read;

use crate::error::{Error, Result};
use crate::profile::{check_positive, Join, Knot, RadialProfile};

/// Cell values with the area each cell covers.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSamples {
    values: Vec<f64>,
    areas: Vec<f64>,
}

impl WeightedSamples {
    pub fn new(values: Vec<f64>, areas: Vec<f64>) -> Result<Self> {
        if values.len() != areas.len() {
            return Err(Error::InvalidSamples(format!(
                "{} values but {} areas",
                values.len(),
                areas.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSamples(format!("value {i} is not a nonnegative number")));
        }
        if let Some(i) = areas.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidSamples(format!("area {i} is not positive")));
        }
        if !areas.iter().sum::<f64>().is_finite() {
            return Err(Error::InvalidSamples("total area is not finite".into()));
        }
        Ok(WeightedSamples { values, areas })
    }

    /// Cells of equal area `cell_area`.
    pub fn uniform(values: Vec<f64>, cell_area: f64) -> Result<Self> {
        let areas = vec![cell_area; values.len()];
        Self::new(values, areas)
    }

    /// Samples a radial function on the annuli between consecutive `radii`, taking
    /// each value at the radius that splits the annulus into equal areas.
    pub fn from_radial<F: Fn(f64) -> f64>(f: F, radii: &[f64]) -> Result<Self> {
        let (mut values, mut areas) = (Vec::new(), Vec::new());
        for w in radii.windows(2) {
            let (r0, r1) = (w[0], w[1]);
            if !(r1 > r0 && r0 >= 0.0) {
                return Err(Error::InvalidSamples("radii must be increasing and nonnegative".into()));
            }
            let mid = (0.5 * (r0 * r0 + r1 * r1)).sqrt();
            values.push(f(mid).abs());
            areas.push(std::f64::consts::PI * (r1 * r1 - r0 * r0));
        }
        Self::new(values, areas)
    }

    /// Reads `value,area` rows. A leading header row is skipped, and values enter
    /// through their absolute value since `u*` rearranges `|u|`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut values, mut areas) = (Vec::new(), Vec::new());
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidSamples(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::InvalidSamples(format!(
                    "row {}: expected value,area but found {} fields",
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(v), Ok(a)) => {
                    values.push(v.abs());
                    areas.push(a);
                }
                _ if line == 0 => continue,
                _ => return Err(Error::InvalidSamples(format!("row {}: not numeric", line + 1))),
            }
        }
        Self::new(values, areas)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// `μ(s) = |{u > s}|`.
    pub fn distribution(&self, s: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.areas)
            .filter(|(v, _)| **v > s)
            .map(|(_, a)| a)
            .sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().zip(&self.areas).map(|(v, a)| v * v * a).sum()
    }

    /// Distinct positive levels in decreasing order with the area at each level.
    fn levels(&self) -> Vec<(f64, f64)> {
        let mut cells: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&self.areas)
            .filter(|(v, _)| **v > 0.0)
            .map(|(v, a)| (*v, *a))
            .collect();
        cells.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut levels: Vec<(f64, f64)> = Vec::with_capacity(cells.len());
        for (v, a) in cells {
            match levels.last_mut() {
                Some(last) if last.0 == v => last.1 += a,
                _ => levels.push((v, a)),
            }
        }
        levels
    }
}

/// `u*` of sampled data as an exact step profile.
///
/// Levels `v_1 > v_2 > ... > v_m` with cumulative areas `A_1 < ... < A_m = T_sup`
/// give `u* = v_j` on `[A_{j-1}, A_j)`. In `s = log(T_sup/t)` this is a knot at
/// `s = 0` with value `v_m` followed by jumps up to `v_j` at `s = log(T_sup/A_j)`.
pub fn decreasing_rearrangement(w: &WeightedSamples) -> Result<RadialProfile> {
    let levels = w.levels();
    if levels.is_empty() {
        return RadialProfile::zero(w.total_area().max(f64::MIN_POSITIVE));
    }
    // cumulative areas from the top level down
    let mut cumulative = Vec::with_capacity(levels.len());
    let mut acc = 0.0;
    for &(_, a) in &levels {
        acc += a;
        cumulative.push(acc);
    }
    let t_support = acc;
    let m = levels.len();
    let mut knots = vec![Knot::linear(0.0, levels[m - 1].0)];
    // level j (0-based, descending) starts at s = log(T/A_j) where A_j = cumulative[j]
    for j in (0..m - 1).rev() {
        let s = (t_support / cumulative[j]).ln();
        if s <= knots.last().map_or(0.0, |k| k.s) {
            // area below float resolution relative to T_sup; fold it into the next level
            knots.last_mut().expect("nonempty").v = levels[j].0;
            continue;
        }
        knots.push(Knot::jump(s, levels[j].0));
    }
    RadialProfile::from_knots(t_support, knots)
}

/// `μ(y) = |{u* > y}|` of a profile, for `y >= 0`.
pub fn profile_distribution(p: &RadialProfile, y: f64) -> f64 {
    let knots = p.knots();
    if y >= p.max_value() {
        return 0.0;
    }
    if knots[0].v > y {
        return p.t_support();
    }
    for w in knots.windows(2) {
        let (prev, k) = (w[0], w[1]);
        if k.v > y {
            let s = match k.join {
                Join::Jump => k.s,
                Join::Linear => prev.s + (y - prev.v) / (k.v - prev.v) * (k.s - prev.s),
            };
            return p.t_support() * (-s).exp();
        }
    }
    0.0
}

/// Hardy–Littlewood maximal function `u**(t) = (1/t) ∫_0^t u*`.
pub fn maximal_function(p: &RadialProfile, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    Ok(p.integral_up_to(t) / t)
}

/// Finite-difference Dirichlet energy `Σ 2π r̄ (Δf)² / Δr` of annulus values
/// `values[j]` sitting at the equal-area radius of `[radii[j], radii[j+1]]`.
pub fn annular_dirichlet_energy(values: &[f64], radii: &[f64]) -> f64 {
    let centers: Vec<f64> = radii
        .windows(2)
        .map(|w| (0.5 * (w[0] * w[0] + w[1] * w[1])).sqrt())
        .collect();
    values
        .windows(2)
        .zip(centers.windows(2))
        .map(|(v, c)| {
            let dr = c[1] - c[0];
            let mid = 0.5 * (c[0] + c[1]);
            2.0 * std::f64::consts::PI * mid * (v[1] - v[0]).powi(2) / dr
        })
        .sum()
}
